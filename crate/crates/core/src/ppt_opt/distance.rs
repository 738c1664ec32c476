use super::projection::{DykstraWarmStart, PptProjector};
use super::{check_problem, PptOptConfig, PptOptResult};
use crate::error::Result;
use crate::linalg::{self, CMatrix};
use crate::state::DensityMatrix;

/// Smoothing levels of the trace norm, coarse to fine.
const SMOOTHING_SCHEDULE: [f64; 7] = [5e-2, 1.5e-2, 5e-3, 1.5e-3, 5e-4, 1.5e-4, 5e-5];

/// Gradient of `½ Σ_i √(λ_i² + μ²)` over the eigenvalues of `σ - ρ`.
fn smoothed_gradient(diff: &CMatrix, mu: f64) -> Result<CMatrix> {
    let e = linalg::eigh(&linalg::hermitize(diff))?;
    Ok(e.reconstruct_with(|x| 0.5 * x / (x * x + mu * mu).sqrt()))
}

fn half_trace_norm(m: &CMatrix) -> Result<f64> {
    Ok(0.5 * linalg::trace_norm(&linalg::hermitize(m))?)
}

/// Minimizes `T(ρ, σ)` over PPT states `σ`.
///
/// The trace norm is replaced by the smooth surrogate `Σ √(λ² + μ²)` and
/// minimized by accelerated projected gradient steps of length `2μ` (the
/// inverse Lipschitz constant), with `μ` decreased in stages. The exact trace
/// distance of every iterate is evaluated and the best feasible one is kept,
/// so the returned value is attained by the certificate.
pub fn min_trace_distance_ppt(rho: &DensityMatrix, config: &PptOptConfig) -> Result<PptOptResult> {
    check_problem(rho.dims(), config)?;
    let dims = rho.dims().to_vec();
    let projector = PptProjector::new(&dims, config.cut.left());
    let d = projector.dim();
    let target = rho.matrix();
    let distance_to = |m: &CMatrix| half_trace_norm(&(m - target));

    let mut warm = DykstraWarmStart::cold(d);
    let start = projector.dykstra(target, &mut warm, config.tol, config.projection_iters)?;
    let mut sigma = start.point;
    let mut best = (distance_to(&sigma)?, sigma.clone());
    let mut history = vec![best.0];
    let mut iterations = 0;
    // A PPT input is its own certificate.
    let mut converged = best.0 <= config.tol;

    if !converged {
        let per_stage = (config.max_iters / SMOOTHING_SCHEDULE.len()).max(1);
        for &mu in &SMOOTHING_SCHEDULE {
            let mut previous = sigma.clone();
            let mut momentum = 1.0_f64;
            let mut settled = false;
            for _ in 0..per_stage {
                iterations += 1;
                let next_momentum = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
                let extrapolated = &sigma + (&sigma - &previous).scale((momentum - 1.0) / next_momentum);
                let grad = smoothed_gradient(&(&extrapolated - target), mu)?;
                let step_point = &extrapolated - grad.scale(2.0 * mu);
                let next = projector
                    .dykstra(&step_point, &mut warm, config.tol, config.projection_iters)?
                    .point;
                let moved = linalg::frobenius(&(&next - &sigma));
                previous = std::mem::replace(&mut sigma, next);
                momentum = next_momentum;
                let dist = distance_to(&sigma)?;
                history.push(dist);
                if dist < best.0 {
                    best = (dist, sigma.clone());
                }
                if moved <= config.tol {
                    settled = true;
                    break;
                }
            }
            // Restart each stage from the best point found so far.
            sigma = best.1.clone();
            converged = settled;
        }
    }

    let certificate = best.1;
    let residuals = projector.residuals(&certificate)?;
    let value = distance_to(&certificate)?.clamp(0.0, 1.0);
    Ok(PptOptResult {
        value,
        certificate: DensityMatrix::new(dims, certificate)?,
        iterations,
        converged,
        residuals,
        history,
        used_bisection: false,
    })
}
