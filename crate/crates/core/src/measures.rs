//! Entropic and entanglement measures, all in bits, plus one-sided witnesses
//! for distillable entanglement.
//!
//! The witnesses bracket the distillable entanglement `D` across a cut:
//!
//! * [`hashing_witness`] is the coherent information, a *lower* bound. A
//!   strictly positive value certifies that the state is distillable.
//! * [`negativity_witness`] is the logarithmic negativity, an *upper* bound.
//!   A zero value means the state is PPT across the cut and therefore
//!   nondistillable, even with PPT assistance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::state::{Bipartition, DensityMatrix, Party, TripartiteState};

/// Eigenvalues at or below this are dropped from entropy sums (`0 log 0 = 0`).
pub const ENTROPY_EIG_CUTOFF: f64 = 1e-12;
/// Default tolerance on the minimum eigenvalue of the partial transpose.
pub const DEFAULT_PPT_TOL: f64 = 1e-9;
/// Trace norms within this of one count as PPT for the logarithmic negativity.
pub const NEGATIVITY_TOL: f64 = 1e-9;

/// Shannon entropy (bits) of a spectrum.
pub fn shannon_bits(spectrum: impl IntoIterator<Item = f64>) -> f64 {
    spectrum
        .into_iter()
        .filter(|&p| p > ENTROPY_EIG_CUTOFF)
        .map(|p| -p * p.log2())
        .sum()
}

/// `S(ρ) = -Tr ρ log2 ρ`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let s = shannon_bits(rho.eigenvalues()?);
    Ok(s.max(0.0))
}

/// `S(ρ^{BC}) - S(ρ^C)`; negative values mean Bob's share can be merged
/// while gaining entanglement.
pub fn conditional_entropy(rho: &TripartiteState) -> Result<f64> {
    let s_bc = von_neumann_entropy(&rho.reduced(&[Party::B, Party::C])?)?;
    let s_c = von_neumann_entropy(&rho.reduced(&[Party::C])?)?;
    Ok(s_bc - s_c)
}

/// `S(left) + S(right) - S(ρ)` across `cut`.
pub fn mutual_information(rho: &DensityMatrix, cut: &Bipartition) -> Result<f64> {
    check_cut(rho, cut)?;
    let s_left = von_neumann_entropy(&rho.partial_trace(cut.left())?)?;
    let s_right = von_neumann_entropy(&rho.partial_trace(cut.right())?)?;
    let s_all = von_neumann_entropy(rho)?;
    Ok((s_left + s_right - s_all).max(0.0))
}

fn check_cut(rho: &DensityMatrix, cut: &Bipartition) -> Result<()> {
    if cut.n_subsystems() != rho.n_subsystems() {
        return Err(Error::invalid(format!(
            "cut covers {} subsystems, state has {}",
            cut.n_subsystems(),
            rho.n_subsystems()
        )));
    }
    Ok(())
}

fn check_same_dim(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::invalid(format!(
            "dimension mismatch: {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    Ok(())
}

/// Dominant eigenvector when the state is pure up to round-off.
fn pure_vector(rho: &DensityMatrix) -> Result<Option<linalg::CVector>> {
    if rho.purity() < 1.0 - 1e-10 {
        return Ok(None);
    }
    let e = linalg::eigh(rho.matrix())?;
    let top = e.values.len() - 1;
    Ok(Some(e.vectors.column(top).into_owned()))
}

/// Uhlmann fidelity `F(ρ, σ) = Tr √(√ρ σ √ρ)`, clamped to `[0, 1]`.
///
/// When either argument is pure the closed form `√⟨ψ|σ|ψ⟩` is used, which
/// avoids square roots of round-off eigenvalues.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    for (pure, other) in [(rho, sigma), (sigma, rho)] {
        if let Some(psi) = pure_vector(pure)? {
            let overlap = (psi.adjoint() * other.matrix() * &psi)[(0, 0)].re;
            return Ok(overlap.max(0.0).sqrt().min(1.0));
        }
    }
    let root = linalg::matrix_sqrt(rho.matrix())?;
    let inner: CMatrix = &root * sigma.matrix() * &root;
    let ev = linalg::eigvalsh(&linalg::hermitize(&inner))?;
    let f: f64 = ev.iter().map(|&x| x.max(0.0).sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// `T(ρ, σ) = ||ρ - σ||_1 / 2`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    let diff = rho.matrix() - sigma.matrix();
    Ok((0.5 * linalg::trace_norm(&diff)?).clamp(0.0, 1.0))
}

/// `log2 ||ρ^{T_left}||_1`; exactly zero for PPT states.
pub fn log_negativity(rho: &DensityMatrix, cut: &Bipartition) -> Result<f64> {
    let norm = linalg::trace_norm(&rho.partial_transpose(cut)?)?;
    if norm <= 1.0 + NEGATIVITY_TOL {
        Ok(0.0)
    } else {
        Ok(norm.log2())
    }
}

/// Smallest eigenvalue of the partial transpose across `cut`.
pub fn min_partial_transpose_eigenvalue(rho: &DensityMatrix, cut: &Bipartition) -> Result<f64> {
    Ok(linalg::eigh(&rho.partial_transpose(cut)?)?.min())
}

/// Positive partial transpose across `cut`, up to `tol` on the spectrum.
pub fn is_ppt(rho: &DensityMatrix, cut: &Bipartition, tol: f64) -> Result<bool> {
    if tol.is_nan() || tol < 0.0 {
        return Err(Error::invalid(format!("PPT tolerance must be nonnegative, got {tol}")));
    }
    Ok(min_partial_transpose_eigenvalue(rho, cut)? >= -tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    LowerBound,
    UpperBound,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessQuantity {
    DistillableEntanglement,
}

/// A computable one-sided bound on an uncomputable entanglement quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessValue {
    pub value: f64,
    pub direction: BoundDirection,
    pub quantity: WitnessQuantity,
    pub cut: Bipartition,
}

impl WitnessValue {
    /// A lower-bound witness above `tol` certifies the quantity is positive.
    pub fn certifies_positive(&self, tol: f64) -> bool {
        self.direction == BoundDirection::LowerBound && self.value > tol
    }

    /// An upper-bound witness at or below `tol` certifies the quantity vanishes.
    pub fn certifies_zero(&self, tol: f64) -> bool {
        self.direction == BoundDirection::UpperBound && self.value <= tol
    }
}

/// Coherent information in the stronger of the two directions,
/// `max(S(left) - S(ρ), S(right) - S(ρ))`.
pub fn hashing_witness(rho: &DensityMatrix, cut: &Bipartition) -> Result<WitnessValue> {
    check_cut(rho, cut)?;
    let s_all = von_neumann_entropy(rho)?;
    let s_left = von_neumann_entropy(&rho.partial_trace(cut.left())?)?;
    let s_right = von_neumann_entropy(&rho.partial_trace(cut.right())?)?;
    Ok(WitnessValue {
        value: (s_left - s_all).max(s_right - s_all),
        direction: BoundDirection::LowerBound,
        quantity: WitnessQuantity::DistillableEntanglement,
        cut: cut.clone(),
    })
}

pub fn negativity_witness(rho: &DensityMatrix, cut: &Bipartition) -> Result<WitnessValue> {
    Ok(WitnessValue {
        value: log_negativity(rho, cut)?,
        direction: BoundDirection::UpperBound,
        quantity: WitnessQuantity::DistillableEntanglement,
        cut: cut.clone(),
    })
}
