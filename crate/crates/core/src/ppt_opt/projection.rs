use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{self, CMatrix, PartialTransposeMap};

/// Constraint violations of a candidate PPT state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `max(0, -λ_min(σ))`
    pub psd: f64,
    /// `max(0, -λ_min(σ^Γ))`
    pub ppt: f64,
    /// `|Tr σ - 1|`
    pub trace: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.psd.max(self.ppt).max(self.trace)
    }
}

/// Dual increments carried between Dykstra runs.
///
/// `x + p + q` equals the point being projected at every step, so a run can be
/// restarted from the increments of a nearby earlier projection.
#[derive(Clone, Debug)]
pub(crate) struct DykstraWarmStart {
    p: CMatrix,
    q: CMatrix,
}

impl DykstraWarmStart {
    pub(crate) fn cold(dim: usize) -> Self {
        DykstraWarmStart {
            p: CMatrix::zeros(dim, dim),
            q: CMatrix::zeros(dim, dim),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct DykstraOutcome {
    /// Feasible point after repair.
    pub point: CMatrix,
    pub iterations: usize,
    pub converged: bool,
    /// Violations before repair.
    pub raw_residuals: Residuals,
}

/// Projects onto `{σ ⪰ 0, σ^Γ ⪰ 0, Tr σ = 1}` for a fixed factorization and cut.
///
/// The set is the intersection of two spectraplexes: the unit-trace PSD
/// matrices, and its image under the partial transpose. The partial transpose
/// is a Frobenius isometry that preserves the trace, so projecting onto the
/// second set is "transpose, project onto the spectraplex, transpose back".
#[derive(Clone, Debug)]
pub(crate) struct PptProjector {
    dim: usize,
    pt: PartialTransposeMap,
}

impl PptProjector {
    pub(crate) fn new(dims: &[usize], transposed: &[usize]) -> Self {
        let pt = PartialTransposeMap::new(dims, transposed);
        PptProjector { dim: pt.dim(), pt }
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    fn project_psd_set(&self, m: &CMatrix) -> Result<CMatrix> {
        linalg::project_spectraplex(m)
    }

    fn project_ppt_set(&self, m: &CMatrix) -> Result<CMatrix> {
        Ok(self.pt.apply(&linalg::project_spectraplex(&self.pt.apply(m))?))
    }

    pub(crate) fn residuals(&self, m: &CMatrix) -> Result<Residuals> {
        let lo = linalg::eigh(m)?.min();
        let lo_pt = linalg::eigh(&self.pt.apply(m))?.min();
        Ok(Residuals {
            psd: (-lo).max(0.0),
            ppt: (-lo_pt).max(0.0),
            trace: (linalg::trace_re(m) - 1.0).abs(),
        })
    }

    /// Mixes in the least amount of `I/D` that makes `m` exactly feasible.
    ///
    /// `I/D` has spectrum `1/D` both before and after the partial transpose,
    /// so weight `v D / (1 + v D)` lifts a minimum eigenvalue of `-v` to zero.
    pub(crate) fn repair(&self, m: &CMatrix) -> Result<(CMatrix, Residuals)> {
        let m = linalg::hermitize(m);
        let tr = linalg::trace_re(&m);
        let m = m.unscale(tr);
        let res = self.residuals(&m)?;
        let v = res.psd.max(res.ppt);
        if v == 0.0 {
            return Ok((m, res));
        }
        let d = self.dim as f64;
        // A hair more than the exact weight so round-off cannot leave a negative.
        let v = v * (1.0 + 1e-6) + 1e-15;
        let w = v * d / (1.0 + v * d);
        let out = m.scale(1.0 - w) + CMatrix::identity(self.dim, self.dim).scale(w / d);
        Ok((out, res))
    }

    /// Dykstra's alternating projections toward the nearest PPT state to `target`.
    pub(crate) fn dykstra(
        &self,
        target: &CMatrix,
        warm: &mut DykstraWarmStart,
        tol: f64,
        max_iters: usize,
    ) -> Result<DykstraOutcome> {
        let target = linalg::hermitize(target);
        let mut x = &target - &warm.p - &warm.q;
        let mut converged = false;
        let mut iterations = 0;
        for k in 1..=max_iters.max(1) {
            iterations = k;
            let y = self.project_psd_set(&(&x + &warm.p))?;
            warm.p = &x + &warm.p - &y;
            let x_next = self.project_ppt_set(&(&y + &warm.q))?;
            warm.q = &y + &warm.q - &x_next;
            let step = linalg::frobenius(&(&x_next - &x));
            let gap = linalg::frobenius(&(&y - &x_next));
            x = x_next;
            if step <= tol && gap <= tol {
                converged = true;
                break;
            }
        }
        let (point, raw_residuals) = self.repair(&x)?;
        Ok(DykstraOutcome {
            point,
            iterations,
            converged,
            raw_residuals,
        })
    }

    /// Dykstra's projections onto the PSD set, the PPT set and the halfspace
    /// `{⟨P, σ⟩ ≥ level}`, started at `start`. Returns the repaired end point.
    pub(crate) fn level_set_search(
        &self,
        start: &CMatrix,
        objective: &CMatrix,
        level: f64,
        tol: f64,
        max_iters: usize,
    ) -> Result<CMatrix> {
        let norm_sqr = linalg::hs_inner(objective, objective);
        let d = self.dim;
        let mut x = start.clone();
        let (mut p, mut q, mut r) = (CMatrix::zeros(d, d), CMatrix::zeros(d, d), CMatrix::zeros(d, d));
        for _ in 0..max_iters.max(1) {
            let y = self.project_psd_set(&(&x + &p))?;
            p = &x + &p - &y;
            let z = self.project_ppt_set(&(&y + &q))?;
            q = &y + &q - &z;
            let mut w = &z + &r;
            let value = linalg::hs_inner(objective, &w);
            if value < level {
                w += objective.scale((level - value) / norm_sqr);
            }
            r = &z + &r - &w;
            let gap = linalg::frobenius(&(&y - &z)).max(linalg::frobenius(&(&z - &w)));
            let step = linalg::frobenius(&(&w - &x));
            x = w;
            if gap <= tol && step <= tol {
                break;
            }
        }
        Ok(self.repair(&x)?.0)
    }
}
