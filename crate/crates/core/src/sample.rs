//! Seeded random states for fixtures, families and property tests.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{self, c, CMatrix, CVector};
use crate::state::{DensityMatrix, PureState};

/// Deterministic generator used for every seeded construction in the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> linalg::C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Complex Ginibre matrix with i.i.d. standard normal entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

/// Haar-random pure state.
pub fn random_pure<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<PureState> {
    let d = linalg::total_dim(dims);
    let v = CVector::from_fn(d, |_, _| gaussian_complex(rng));
    PureState::normalized(dims.to_vec(), v)
}

/// Induced-measure mixed state `G G† / Tr(G G†)` with a `d x rank` Ginibre `G`.
pub fn random_density<R: Rng + ?Sized>(dims: &[usize], rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let d = linalg::total_dim(dims);
    let g = ginibre(d, rank.max(1), rng);
    let m = &g * g.adjoint();
    let m = linalg::hermitize(&m).unscale(linalg::trace_re(&m));
    DensityMatrix::new(dims.to_vec(), m)
}

/// Full-rank random state (Hilbert–Schmidt measure).
pub fn random_full_rank<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<DensityMatrix> {
    random_density(dims, linalg::total_dim(dims), rng)
}

/// Random Hermitian matrix (GUE-like), not normalized.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    linalg::hermitize(&ginibre(d, d, rng))
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix, with
/// the phases of `R`'s diagonal folded back into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { c(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_sampling_is_reproducible() {
        let a = random_full_rank(&[2, 2], &mut rng_from_seed(5)).unwrap();
        let b = random_full_rank(&[2, 2], &mut rng_from_seed(5)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let u = random_unitary(6, &mut rng_from_seed(1));
        let err = linalg::max_abs(&(u.adjoint() * &u - CMatrix::identity(6, 6)));
        assert!(err < 1e-12);
    }
}
