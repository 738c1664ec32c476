//! Generalized Bloch vectors over the Gell-Mann basis.
//!
//! A `d`-level state is written `ρ = I/d + ½ Σ_i r_i G_i`, where the `d² - 1`
//! matrices `G_i` are traceless, Hermitian and normalized so that
//! `Tr(G_i G_j) = 2 δ_ij`. For `d = 2` the basis is exactly `(X, Y, Z)`.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::measures;
use crate::sample;
use crate::state::{Bipartition, DensityMatrix};

pub const MAX_BASIS_DIM: usize = 16;
/// Singular values below this fraction of the largest count as zero.
pub const RANK_RELATIVE_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct OperatorBasis {
    dim: usize,
    elements: Vec<CMatrix>,
}

impl OperatorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Generalized Gell-Mann matrices for dimension `d`: all symmetric
/// off-diagonal pairs `(j, k)` with `j < k` in lexicographic order, then the
/// antisymmetric pairs in the same order, then the `d - 1` diagonal elements.
pub fn gell_mann_basis(d: usize) -> Result<OperatorBasis> {
    if !(2..=MAX_BASIS_DIM).contains(&d) {
        return Err(Error::invalid(format!(
            "Gell-Mann basis needs 2 <= d <= {MAX_BASIS_DIM}, got {d}"
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect();
    let mut elements = Vec::with_capacity(d * d - 1);
    for &(j, k) in &pairs {
        let mut g = CMatrix::zeros(d, d);
        g[(j, k)] = c(1.0, 0.0);
        g[(k, j)] = c(1.0, 0.0);
        elements.push(g);
    }
    for &(j, k) in &pairs {
        let mut g = CMatrix::zeros(d, d);
        g[(j, k)] = c(0.0, -1.0);
        g[(k, j)] = c(0.0, 1.0);
        elements.push(g);
    }
    for l in 1..d {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut g = CMatrix::zeros(d, d);
        for j in 0..l {
            g[(j, j)] = c(scale, 0.0);
        }
        g[(l, l)] = c(-(l as f64) * scale, 0.0);
        elements.push(g);
    }
    Ok(OperatorBasis { dim: d, elements })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlochVector {
    pub dim: usize,
    pub coords: Vec<f64>,
}

impl BlochVector {
    /// `I/d + ½ Σ r_i G_i`. Hermitian with unit trace; not necessarily PSD.
    pub fn reconstruct(&self, basis: &OperatorBasis) -> Result<CMatrix> {
        if basis.dim() != self.dim || basis.len() != self.coords.len() {
            return Err(Error::invalid("basis does not match the Bloch vector"));
        }
        let mut m = CMatrix::identity(self.dim, self.dim).unscale(self.dim as f64);
        for (r, g) in self.coords.iter().zip(basis.elements()) {
            m += g.scale(0.5 * r);
        }
        Ok(m)
    }
}

/// Coordinates `r_i = Tr(ρ G_i)` with respect to the full (composite) dimension.
pub fn bloch_coords(rho: &DensityMatrix) -> Result<BlochVector> {
    let basis = gell_mann_basis(rho.dim())?;
    Ok(coords_in(rho.matrix(), &basis))
}

fn coords_in(m: &CMatrix, basis: &OperatorBasis) -> BlochVector {
    BlochVector {
        dim: basis.dim(),
        // Tr(ρ G) = Σ_jk ρ_jk G_kj = ⟨G, ρ⟩ for Hermitian G.
        coords: basis.elements().iter().map(|g| linalg::hs_inner(g, m)).collect(),
    }
}

/// Numerical rank of the matrix whose rows are the Bloch vectors of `states`.
pub fn rank_of_family(states: &[DensityMatrix]) -> Result<usize> {
    let first = states
        .first()
        .ok_or_else(|| Error::invalid("rank_of_family needs at least one state"))?;
    let d = first.dim();
    if states.iter().any(|s| s.dim() != d) {
        return Err(Error::invalid("all states in a family must share a dimension"));
    }
    if states.len() > d * d {
        return Err(Error::invalid(format!(
            "family of {} states exceeds d^2 = {}",
            states.len(),
            d * d
        )));
    }
    let basis = gell_mann_basis(d)?;
    let rows: Vec<Vec<f64>> = states.iter().map(|s| coords_in(s.matrix(), &basis).coords).collect();
    let n_cols = d * d - 1;
    let m = DMatrix::from_fn(rows.len(), n_cols, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let largest = sv.iter().copied().fold(0.0, f64::max);
    if largest == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > RANK_RELATIVE_TOL * largest).count())
}

/// Convex mixture of `mixing_terms` random product pure states on two qubits,
/// with weights drawn uniformly and normalized. Separable by construction.
pub fn random_separable_two_qubit(seed: u64, mixing_terms: usize) -> Result<DensityMatrix> {
    let mut rng = sample::rng_from_seed(seed);
    random_separable_two_qubit_with(&mut rng, mixing_terms)
}

pub(crate) fn random_separable_two_qubit_with<R: Rng + ?Sized>(
    rng: &mut R,
    mixing_terms: usize,
) -> Result<DensityMatrix> {
    if mixing_terms == 0 {
        return Err(Error::invalid("mixing_terms must be at least 1"));
    }
    let weights: Vec<f64> = (0..mixing_terms).map(|_| rng.random::<f64>() + f64::EPSILON).collect();
    let total: f64 = weights.iter().sum();
    let mut acc = CMatrix::zeros(4, 4);
    for w in weights {
        let b = sample::random_pure(&[2], rng)?;
        let c = sample::random_pure(&[2], rng)?;
        acc += b.tensor(&c)?.projector().scale(w / total);
    }
    let acc = linalg::hermitize(&acc);
    let tr = linalg::trace_re(&acc);
    let out = DensityMatrix::new(vec![2, 2], acc.unscale(tr))?;
    debug_assert!(measures::is_ppt(
        &out,
        &Bipartition::new(&[0], 2)?,
        measures::DEFAULT_PPT_TOL
    )?);
    Ok(out)
}
