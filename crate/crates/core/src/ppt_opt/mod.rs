//! Convex optimization over the set of PPT states.
//!
//! The set of states with positive partial transpose across a cut is convex,
//! compact and contained in the set of nondistillable states. Optimizing over
//! it therefore gives one-sided surrogates for quantities defined over the
//! (computationally uncharacterized) nondistillable set:
//!
//! * the maximal overlap `max ⟨ψ|σ|ψ⟩` of a pure target with a PPT state
//!   ([`max_overlap_ppt`]), whose square root is the best PPT fidelity;
//! * the minimal trace distance to a PPT state ([`min_trace_distance_ppt`]);
//! * the geometric distillability `1 - sup F` restricted to PPT states
//!   ([`geometric_distillability_ppt`]). Because PPT states form a subset of
//!   the nondistillable ones, this value is an upper bound on the geometric
//!   distillability over all nondistillable states.
//!
//! Every result carries a certificate state that is exactly feasible (up to
//! round-off), so reported overlaps are achieved lower bounds on the true
//! maximum and reported distances are achieved upper bounds on the true minimum.

mod distance;
mod overlap;
mod projection;

use serde::{Deserialize, Serialize};

pub use distance::min_trace_distance_ppt;
pub use overlap::max_overlap_ppt;
pub use projection::Residuals;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::{Bipartition, DensityMatrix};

/// Largest Hilbert-space dimension accepted by the optimizers (6 qubits).
pub const OPT_DIM_CAP: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    Fixed,
    /// `step / sqrt(k + 1)` at outer iteration `k`.
    Diminishing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PptOptConfig {
    pub max_iters: usize,
    pub tol: f64,
    pub step_rule: StepRule,
    pub step_size: f64,
    pub bisection_depth: usize,
    /// Iteration cap of each inner Dykstra projection.
    pub projection_iters: usize,
    pub cut: Bipartition,
}

impl PptOptConfig {
    pub fn new(cut: Bipartition) -> Self {
        PptOptConfig {
            max_iters: 5000,
            tol: 1e-7,
            step_rule: StepRule::Fixed,
            step_size: 1.0,
            bisection_depth: 40,
            projection_iters: 20_000,
            cut,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 || self.projection_iters == 0 {
            return Err(Error::invalid("iteration caps must be at least 1"));
        }
        if self.step_size.is_nan() || self.step_size <= 0.0 {
            return Err(Error::invalid("step size must be positive"));
        }
        Ok(())
    }

    fn step(&self, k: usize) -> f64 {
        match self.step_rule {
            StepRule::Fixed => self.step_size,
            StepRule::Diminishing => self.step_size / ((k + 1) as f64).sqrt(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PptOptResult {
    pub value: f64,
    /// A PPT state attaining `value`.
    pub certificate: DensityMatrix,
    pub iterations: usize,
    pub converged: bool,
    /// Constraint violations of the certificate.
    pub residuals: Residuals,
    /// Objective value after each outer iteration.
    pub history: Vec<f64>,
    /// Whether the level-set bisection fallback ran.
    pub used_bisection: bool,
}

fn check_problem(dims: &[usize], config: &PptOptConfig) -> Result<()> {
    config.validate()?;
    let dim = linalg::total_dim(dims);
    if dim > OPT_DIM_CAP {
        return Err(Error::SizeLimit { dim, cap: OPT_DIM_CAP });
    }
    if config.cut.n_subsystems() != dims.len() {
        return Err(Error::invalid(format!(
            "cut covers {} subsystems, state has {}",
            config.cut.n_subsystems(),
            dims.len()
        )));
    }
    Ok(())
}

/// Result of projecting a Hermitian matrix onto the PPT states.
#[derive(Clone, Debug)]
pub struct PptProjection {
    pub state: DensityMatrix,
    pub iterations: usize,
    pub converged: bool,
    /// Violations of the last Dykstra iterate, before the feasibility repair.
    pub residuals: Residuals,
}

/// Frobenius-nearest PPT state to `m`, by Dykstra's alternating projections.
///
/// On non-convergence the last iterate (made feasible) is returned with
/// `converged = false`.
pub fn project_ppt_state(m: &CMatrix, dims: &[usize], config: &PptOptConfig) -> Result<PptProjection> {
    check_problem(dims, config)?;
    if m.nrows() != linalg::total_dim(dims) || !m.is_square() {
        return Err(Error::invalid("matrix does not match dims"));
    }
    if linalg::hermitian_deviation(m) > linalg::EIGH_HERMITIAN_TOL {
        return Err(Error::invalid("projection input must be Hermitian"));
    }
    let projector = projection::PptProjector::new(dims, config.cut.left());
    let mut warm = projection::DykstraWarmStart::cold(projector.dim());
    let out = projector.dykstra(m, &mut warm, config.tol, config.projection_iters)?;
    Ok(PptProjection {
        state: DensityMatrix::new(dims.to_vec(), out.point)?,
        iterations: out.iterations,
        converged: out.converged,
        residuals: out.raw_residuals,
    })
}

/// Geometric distillability relative to the PPT states.
#[derive(Clone, Debug)]
pub enum GeometricDistillability {
    /// Pure input: `1 - √(max overlap)`.
    Exact { value: f64, overlap: PptOptResult },
    /// Mixed input: bounds from the minimal trace distance `t` via
    /// `1 - F ≤ T ≤ √(1 - F²)`, i.e. `1 - √(1 - t²) ≤ D_g ≤ t`.
    Interval {
        lower: f64,
        upper: f64,
        distance: PptOptResult,
    },
}

impl GeometricDistillability {
    pub fn bounds(&self) -> (f64, f64) {
        match self {
            GeometricDistillability::Exact { value, .. } => (*value, *value),
            GeometricDistillability::Interval { lower, upper, .. } => (*lower, *upper),
        }
    }

    pub fn converged(&self) -> bool {
        match self {
            GeometricDistillability::Exact { overlap, .. } => overlap.converged,
            GeometricDistillability::Interval { distance, .. } => distance.converged,
        }
    }
}

/// States with purity at least `1 - PURE_PATH_TOL` take the pure-target path.
pub const PURE_PATH_TOL: f64 = 1e-9;

pub fn geometric_distillability_ppt(rho: &DensityMatrix, config: &PptOptConfig) -> Result<GeometricDistillability> {
    check_problem(rho.dims(), config)?;
    if let Some(psi) = rho.to_pure(PURE_PATH_TOL)? {
        let overlap = max_overlap_ppt(&psi, config)?;
        let value = (1.0 - overlap.value.max(0.0).sqrt()).clamp(0.0, 1.0);
        return Ok(GeometricDistillability::Exact { value, overlap });
    }
    let distance = min_trace_distance_ppt(rho, config)?;
    let t = distance.value.clamp(0.0, 1.0);
    Ok(GeometricDistillability::Interval {
        lower: 1.0 - (1.0 - t * t).sqrt(),
        upper: t,
        distance,
    })
}
