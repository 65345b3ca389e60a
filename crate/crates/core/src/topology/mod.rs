//! Aspects, pseudosingularities, reduced aspects and the cuspidality verdict.

mod aspects;
mod label;
mod path;
mod pseudo;

pub use aspects::{compute_aspects, singular_blockers, AspectMap, BlockedEdges, SINGULAR_NODE_TOL};
pub use label::{compute_reduced_aspects, label_config, label_solutions, ReducedAspectMap, SolutionLabel};
pub use path::{find_nonsingular_path, verify_path, JointPath, PathCheck, PATH_TOL, VERIFY_SAMPLES};
pub use pseudo::{compute_pseudosingularities, PseudoSingularitySet, PS_EXCLUSION, PS_MIN_DET};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::critical::{
    critical_values, find_cusps, find_nodes, genericity_audit, region_census, trace_on_grid, CuspPoint, DetGrid,
    GenericityReport, JointCurve, NodePoint, RegionCensus, WorkspaceCurve, DEFAULT_GRID_N,
};
use crate::dh::{cross_section_at, validate_params, CrossSectionPoint, DhParams, JointConfig};
use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    /// Torus resolution for tracing and the topology maps.
    pub grid_n: usize,
    /// Workspace resolution of the IKS-count census.
    pub census_n: usize,
    /// Audited points for each sampling check.
    pub samples: usize,
    pub seed: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self { grid_n: DEFAULT_GRID_N, census_n: 160, samples: 200, seed: 0x3c05_9a11 }
    }
}

/// Two IK solutions of one point sharing an aspect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SameAspectWitness {
    pub point: CrossSectionPoint,
    pub aspect: i32,
    pub configs: [JointConfig; 2],
}

/// Independent check of the verdict: do two IKS of one point ever share an
/// aspect?
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    /// Points with at least two IKS, none near a singularity.
    pub sampled: usize,
    pub attempts: usize,
    /// Sampling drew from the 4-IKS cells of the census.
    pub stratified: bool,
    pub witnesses: Vec<SameAspectWitness>,
    pub same_aspect_found: bool,
    /// `same_aspect_found` equals the cusp-based verdict.
    pub agrees: bool,
}

/// Check that IKS of one point always fall in distinct reduced aspects.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedAspectAudit {
    pub sampled: usize,
    pub attempts: usize,
    /// Points where two IKS share a reduced aspect, with that label.
    pub violations: Vec<(CrossSectionPoint, i32)>,
}

impl ReducedAspectAudit {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CuspidalityReport {
    /// `true` iff the robot has a cusp.
    pub verdict: bool,
    pub cusps: Vec<CuspPoint>,
    pub nodes: Vec<NodePoint>,
    pub aspect_count: usize,
    pub reduced_aspect_count: usize,
    pub cross_validation: CrossValidation,
    pub reduced_aspect_audit: ReducedAspectAudit,
    pub genericity: GenericityReport,
}

/// Everything computed for one robot.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub params: DhParams,
    pub options: AnalysisOptions,
    pub grid: DetGrid,
    pub curves: Vec<JointCurve>,
    pub workspace: Vec<WorkspaceCurve>,
    pub cusps: Vec<CuspPoint>,
    pub nodes: Vec<NodePoint>,
    pub genericity: GenericityReport,
    pub aspects: AspectMap,
    pub pseudo: PseudoSingularitySet,
    pub reduced: ReducedAspectMap,
    pub census: RegionCensus,
}

const BATCH: usize = 64;

impl Analysis {
    pub fn run(p: &DhParams, options: &AnalysisOptions) -> Result<Self> {
        let p = validate_params(*p)?;
        if options.grid_n < 64 {
            return Err(Error::GridTooCoarse(options.grid_n));
        }
        let grid = DetGrid::evaluate(&p, options.grid_n);
        let curves = trace_on_grid(&p, &grid);
        let workspace = critical_values(&p, &curves);
        let cusps = find_cusps(&p, &workspace)?;
        let nodes = find_nodes(&p, &workspace)?;
        let genericity = genericity_audit(&p, &grid, &curves, &workspace, &cusps)?;
        let aspects = compute_aspects(&p, &grid, &curves);
        let pseudo = compute_pseudosingularities(&p, &curves)?;
        let reduced = compute_reduced_aspects(&p, &grid, &aspects, &pseudo);
        let census = region_census(&p, options.census_n.max(8), &workspace, &cusps, &nodes)?;
        Ok(Self {
            params: p,
            options: *options,
            grid,
            curves,
            workspace,
            cusps,
            nodes,
            genericity,
            aspects,
            pseudo,
            reduced,
            census,
        })
    }

    pub fn is_cuspidal(&self) -> bool {
        !self.cusps.is_empty()
    }

    pub fn label(&self, target: &CrossSectionPoint) -> Result<Vec<SolutionLabel>> {
        label_solutions(&self.params, &self.aspects, &self.reduced, target)
    }

    pub fn path(&self, start: &JointConfig, goal: &JointConfig) -> Result<Option<JointPath>> {
        find_nonsingular_path(&self.params, &self.grid, &self.aspects, start, goal)
    }

    /// Draws batches of candidate points until `samples` of them are usable.
    fn sample<T: Send>(
        &self,
        salt: u64,
        mut draw: impl FnMut(&mut ChaCha8Rng) -> CrossSectionPoint,
        eval: impl Fn(&CrossSectionPoint) -> Option<T> + Sync + Send,
    ) -> (Vec<T>, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.options.seed ^ salt);
        let want = self.options.samples;
        let mut out = Vec::new();
        let mut attempts = 0;
        while out.len() < want && attempts < 50 * want.max(1) {
            let batch: Vec<CrossSectionPoint> = (0..BATCH).map(|_| draw(&mut rng)).collect();
            for r in par::map_slice(&batch, &eval) {
                attempts += 1;
                if let Some(v) = r {
                    out.push(v);
                    if out.len() == want {
                        break;
                    }
                }
            }
        }
        (out, attempts)
    }

    /// Samples points with ≥ 2 IKS, preferring the 4-IKS census cells, and
    /// looks for two IKS in one aspect.
    pub fn cross_validate(&self) -> CrossValidation {
        let c = &self.census;
        let four: Vec<(usize, usize)> = (0..c.nz)
            .flat_map(|iz| (0..c.nx).map(move |ix| (ix, iz)))
            .filter(|&(ix, iz)| c.count(ix, iz) == 4)
            .collect();
        let stratified = !four.is_empty();
        let pool: Vec<(usize, usize)> = if stratified {
            four
        } else {
            (0..c.nz).flat_map(|iz| (0..c.nx).map(move |ix| (ix, iz))).filter(|&(ix, iz)| c.count(ix, iz) >= 2).collect()
        };
        if pool.is_empty() {
            return CrossValidation {
                sampled: 0,
                attempts: 0,
                stratified,
                witnesses: Vec::new(),
                same_aspect_found: false,
                agrees: !self.is_cuspidal(),
            };
        }
        let (dx, dz) = c.cell_size();
        let draw = |rng: &mut ChaCha8Rng| {
            let (ix, iz) = pool[rng.random_range(0..pool.len())];
            CrossSectionPoint::new(
                c.rho_range.0 + (ix as f64 + rng.random::<f64>()) * dx,
                c.z_range.0 + (iz as f64 + rng.random::<f64>()) * dz,
            )
        };
        let eval = |pt: &CrossSectionPoint| {
            let labels = self.label(pt).ok()?;
            if labels.len() < 2 || labels.iter().any(|l| l.near_singular || l.aspect < 0) {
                return None;
            }
            let mut hit = None;
            'outer: for a in 0..labels.len() {
                for b in a + 1..labels.len() {
                    if labels[a].aspect == labels[b].aspect {
                        hit = Some(SameAspectWitness {
                            point: *pt,
                            aspect: labels[a].aspect,
                            configs: [labels[a].config, labels[b].config],
                        });
                        break 'outer;
                    }
                }
            }
            Some(hit)
        };
        let (results, attempts) = self.sample(0x51, draw, eval);
        let sampled = results.len();
        let witnesses: Vec<SameAspectWitness> = results.into_iter().flatten().collect();
        let found = !witnesses.is_empty();
        CrossValidation {
            sampled,
            attempts,
            stratified,
            witnesses,
            same_aspect_found: found,
            agrees: found == self.is_cuspidal(),
        }
    }

    /// Samples images of uniformly random joint configurations and checks
    /// that their IKS carry pairwise distinct reduced-aspect labels.
    pub fn reduced_aspect_audit(&self) -> ReducedAspectAudit {
        let p = self.params;
        let draw = |rng: &mut ChaCha8Rng| {
            let t2 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let t3 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            cross_section_at(&p, t2, t3)
        };
        let eval = |pt: &CrossSectionPoint| {
            let labels = self.label(pt).ok()?;
            if labels.len() < 2 || labels.iter().any(|l| l.on_boundary || l.reduced < 0) {
                return None;
            }
            let mut seen: Vec<i32> = labels.iter().map(|l| l.reduced).collect();
            seen.sort_unstable();
            let dup = seen.windows(2).find(|w| w[0] == w[1]).map(|w| w[0]);
            Some(dup.map(|l| (*pt, l)))
        };
        let (results, attempts) = self.sample(0x72, draw, eval);
        ReducedAspectAudit { sampled: results.len(), attempts, violations: results.into_iter().flatten().collect() }
    }

    pub fn report(&self) -> CuspidalityReport {
        CuspidalityReport {
            verdict: self.is_cuspidal(),
            cusps: self.cusps.clone(),
            nodes: self.nodes.clone(),
            aspect_count: self.aspects.count,
            reduced_aspect_count: self.reduced.count,
            cross_validation: self.cross_validate(),
            reduced_aspect_audit: self.reduced_aspect_audit(),
            genericity: self.genericity.clone(),
        }
    }
}

/// Cusp-based cuspidality verdict with the aspect-based cross-check, using
/// default options.
pub fn is_cuspidal(p: &DhParams) -> Result<CuspidalityReport> {
    is_cuspidal_with(p, &AnalysisOptions::default())
}

pub fn is_cuspidal_with(p: &DhParams, options: &AnalysisOptions) -> Result<CuspidalityReport> {
    let analysis = Analysis::run(p, options)?;
    if !analysis.genericity.is_generic {
        return Err(Error::NonGenericRobot(Box::new(analysis.genericity)));
    }
    Ok(analysis.report())
}
