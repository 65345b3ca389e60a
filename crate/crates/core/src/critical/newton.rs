//! Damped Newton / Gauss–Newton for the small polynomial systems used to
//! pin down cusps, nodes, tangencies and quadruple roots.

use nalgebra::{DMatrix, DVector};

pub const MAX_ITER: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub x: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NewtonDivergence;

/// Minimizes `‖F(x)‖` with full Newton steps when the Jacobian is square and
/// the minimum-norm / least-squares step otherwise. Each step is halved until
/// the residual norm decreases.
pub fn solve<F>(system: F, x0: &[f64], tol: f64) -> Result<NewtonOutcome, NewtonDivergence>
where
    F: Fn(&[f64]) -> (Vec<f64>, DMatrix<f64>),
{
    let mut x = x0.to_vec();
    let (mut r, mut j) = system(&x);
    let mut norm = l2(&r);
    for it in 0..MAX_ITER {
        if !norm.is_finite() {
            return Err(NewtonDivergence);
        }
        if norm <= tol {
            return Ok(NewtonOutcome { x, residual: norm, iterations: it });
        }
        let rhs = DVector::from_vec(r.iter().map(|v| -v).collect());
        let step = match j.clone().svd(true, true).solve(&rhs, 1e-14) {
            Ok(s) => s,
            Err(_) => return Err(NewtonDivergence),
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        while lambda > 1e-6 {
            let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + lambda * s).collect();
            let (rc, jc) = system(&cand);
            let nc = l2(&rc);
            if nc.is_finite() && nc < norm {
                x = cand;
                r = rc;
                j = jc;
                norm = nc;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            // Stalled: a least-squares minimum that is not a root, or
            // round-off floor. Let the caller judge the final residual.
            return Ok(NewtonOutcome { x, residual: norm, iterations: it });
        }
    }
    Ok(NewtonOutcome { x, residual: norm, iterations: MAX_ITER })
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}
