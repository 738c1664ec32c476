use super::projection::{DykstraWarmStart, PptProjector};
use super::{check_problem, PptOptConfig, PptOptResult};
use crate::error::Result;
use crate::linalg::{self, CMatrix};
use crate::state::{DensityMatrix, PureState};

/// Maximizes `⟨ψ|σ|ψ⟩` over PPT states `σ` by projected gradient ascent from
/// `I/D`, falling back to a bisection over level sets when the ascent does not
/// settle within `max_iters`.
///
/// The returned value is always attained by the returned certificate, so it is
/// a valid lower bound on the true maximum even when `converged` is false.
pub fn max_overlap_ppt(psi: &PureState, config: &PptOptConfig) -> Result<PptOptResult> {
    check_problem(psi.dims(), config)?;
    let dims = psi.dims().to_vec();
    let projector = PptProjector::new(&dims, config.cut.left());
    let d = projector.dim();
    let target = psi.projector();
    let value_of = |m: &CMatrix| linalg::hs_inner(&target, m);

    let mut sigma = CMatrix::identity(d, d).unscale(d as f64);
    let mut value = value_of(&sigma);
    let mut best = (value, sigma.clone());
    let mut history = vec![value];
    let mut warm = DykstraWarmStart::cold(d);
    let mut converged = false;
    let mut iterations = 0;

    for k in 0..config.max_iters {
        iterations = k + 1;
        let ascent = &sigma + target.scale(config.step(k));
        let next = projector
            .dykstra(&ascent, &mut warm, config.tol, config.projection_iters)?
            .point;
        let next_value = value_of(&next);
        let moved = linalg::frobenius(&(&next - &sigma));
        sigma = next;
        value = next_value;
        history.push(value);
        if value > best.0 {
            best = (value, sigma.clone());
        }
        if moved <= config.tol {
            converged = true;
            break;
        }
    }

    let mut used_bisection = false;
    if !converged && config.bisection_depth > 0 {
        used_bisection = true;
        let (mut lo, mut hi) = (best.0, 1.0_f64);
        for _ in 0..config.bisection_depth {
            if hi - lo <= config.tol {
                break;
            }
            let level = 0.5 * (lo + hi);
            let candidate = projector.level_set_search(&best.1, &target, level, config.tol, config.projection_iters)?;
            let candidate_value = value_of(&candidate);
            // The repair step costs a little objective, so a level counts as
            // reached within a slack; `lo` only ever holds attained values.
            if candidate_value >= level - config.tol.sqrt() {
                if candidate_value > best.0 {
                    best = (candidate_value, candidate);
                }
                lo = best.0;
            } else {
                hi = level;
            }
        }
        converged = hi - lo <= config.tol.sqrt();
    }

    let (certificate, _) = projector.repair(&best.1)?;
    let residuals = projector.residuals(&certificate)?;
    let value = value_of(&certificate);
    Ok(PptOptResult {
        value,
        certificate: DensityMatrix::new(dims, certificate)?,
        iterations,
        converged,
        residuals,
        history,
        used_bisection,
    })
}
