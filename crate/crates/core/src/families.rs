//! Concrete tripartite state families.
//!
//! Every constructor labels its subsystems as A, B and C (in that order unless
//! stated otherwise) so the output can go straight into [`crate::classify`].

use rand::Rng;

use crate::bloch;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::sample;
use crate::state::{DensityMatrix, PureState};

pub use crate::state::TripartiteState;

/// Number of classical branches in the separable no-merge family: one per
/// dimension of the two-qubit Bloch space.
pub const SEP_FAMILY_SIZE: usize = 15;
/// Minimum branch weight in the separable no-merge family.
pub const SEP_FAMILY_MIN_WEIGHT: f64 = 0.01;
/// Product pure states mixed into each separable branch.
pub const SEP_FAMILY_MIXING_TERMS: usize = 4;
/// Draws attempted before giving up on a full-rank family.
pub const SEP_FAMILY_MAX_RETRIES: u64 = 100;

/// `(|00⟩ + |11⟩)/√2`.
pub fn phi_plus() -> PureState {
    PureState::from_real(vec![2, 2], &[1.0, 0.0, 0.0, 1.0]).expect("fixed amplitudes")
}

/// `(|000⟩ + |111⟩)/√2`, one qubit per party.
pub fn ghz() -> TripartiteState {
    let mut amps = [0.0; 8];
    amps[0] = 1.0;
    amps[7] = 1.0;
    let psi = PureState::from_real(vec![2, 2, 2], &amps).expect("fixed amplitudes");
    TripartiteState::abc(psi.to_density()).expect("three subsystems")
}

/// `½ (|000⟩⟨000| + |111⟩⟨111|)`.
pub fn classical_correlated() -> TripartiteState {
    let mut probs = [0.0; 8];
    probs[0] = 0.5;
    probs[7] = 0.5;
    let rho = DensityMatrix::diagonal(vec![2, 2, 2], &probs).expect("fixed weights");
    TripartiteState::abc(rho).expect("three subsystems")
}

/// `|α⟩^A ⊗ |β⟩^B ⊗ |γ⟩^C`. Each factor may itself be composite; its
/// subsystems all go to the same party.
pub fn product_pure(alpha: &PureState, beta: &PureState, gamma: &PureState) -> Result<TripartiteState> {
    let psi = alpha.tensor(beta)?.tensor(gamma)?;
    let na = alpha.dims().len();
    let nb = beta.dims().len();
    let nc = gamma.dims().len();
    let a: Vec<usize> = (0..na).collect();
    let b: Vec<usize> = (na..na + nb).collect();
    let c: Vec<usize> = (na + nb..na + nb + nc).collect();
    TripartiteState::new(psi.to_density(), &a, &b, &c)
}

/// `|ψ⟩⟨ψ|^{AB} ⊗ |0⟩⟨0|^C` for a two-subsystem `ψ`.
pub fn product_example(psi: &PureState) -> Result<TripartiteState> {
    if psi.dims().len() != 2 {
        return Err(Error::invalid(format!(
            "product_example needs a bipartite state, got dims {:?}",
            psi.dims()
        )));
    }
    let zero = PureState::basis(vec![2], 0)?;
    TripartiteState::abc(psi.tensor(&zero)?.to_density())
}

/// `(1 - p) |φ+⟩⟨φ+|^{AB} ⊗ |0⟩⟨0|^C + p I/8` for `0 < p < 1`.
///
/// The C factor is diagonal in every branch, so the state is PPT (indeed
/// separable) across AB:C for every `p`. The coherent information A:BC stays
/// positive for `p` below [`ROBUST_FAMILY_HASHING_THRESHOLD`].
pub fn robust_vanishing_family(p: f64) -> Result<TripartiteState> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid(format!("p must lie in (0, 1), got {p}")));
    }
    let core = phi_plus().tensor(&PureState::basis(vec![2], 0)?)?.to_density();
    let noise = DensityMatrix::maximally_mixed(vec![2, 2, 2])?;
    TripartiteState::abc(core.mix(&noise, p)?)
}

/// Largest `p` for which the hashing witness of [`robust_vanishing_family`]
/// across A:BC is positive, found by bisection (see the `families` tests).
pub const ROBUST_FAMILY_HASHING_THRESHOLD: f64 = 0.317_068_894_938_921;

/// `ε σ + (1 - ε) ρ`, keeping ρ's party labels.
pub fn perturb(rho: &TripartiteState, sigma: &TripartiteState, eps: f64) -> Result<TripartiteState> {
    if rho.state().dims() != sigma.state().dims() {
        return Err(Error::invalid("perturbation must match the state's dims"));
    }
    for party in [crate::state::Party::A, crate::state::Party::B, crate::state::Party::C] {
        if rho.indices(party) != sigma.indices(party) {
            return Err(Error::invalid("perturbation must use the same party labels"));
        }
    }
    rho.with_state(rho.state().mix(sigma.state(), eps)?)
}

/// `Σ_i p_i |i⟩⟨i|^A ⊗ σ_i^{BC}` with a classical A register of dimension
/// `weights.len()`.
pub fn classical_quantum(weights: &[f64], branches: &[DensityMatrix]) -> Result<TripartiteState> {
    if weights.len() != branches.len() || weights.len() < 2 {
        return Err(Error::invalid("need matching weights and branches (at least two)"));
    }
    let bc_dims = branches[0].dims().to_vec();
    if bc_dims.len() != 2 || branches.iter().any(|s| s.dims() != bc_dims.as_slice()) {
        return Err(Error::invalid("branches must be bipartite states with equal dims"));
    }
    let total: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < 0.0) || (total - 1.0).abs() > 1e-12 {
        return Err(Error::invalid("weights must form a probability vector"));
    }
    let n = weights.len();
    let d_bc = branches[0].dim();
    let mut m = CMatrix::zeros(n * d_bc, n * d_bc);
    for (i, (w, s)) in weights.iter().zip(branches).enumerate() {
        m.view_mut((i * d_bc, i * d_bc), (d_bc, d_bc))
            .copy_from(&s.matrix().scale(*w));
    }
    let dims = vec![n, bc_dims[0], bc_dims[1]];
    TripartiteState::abc(DensityMatrix::new(dims, linalg::hermitize(&m))?)
}

/// Ingredients of a separable no-merge state, kept for inspection.
#[derive(Clone, Debug)]
pub struct SepNoMergeFamily {
    pub weights: Vec<f64>,
    pub branches: Vec<DensityMatrix>,
    /// Draw index (0-based) that first achieved full Bloch rank.
    pub attempt: u64,
    pub state: TripartiteState,
}

/// Weights: uniform draws, normalized, then affinely lifted so every weight is
/// at least [`SEP_FAMILY_MIN_WEIGHT`] and they still sum to one.
fn draw_weights<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + f64::EPSILON).collect();
    let total: f64 = raw.iter().sum();
    let spare = 1.0 - SEP_FAMILY_MIN_WEIGHT * n as f64;
    raw.iter().map(|r| SEP_FAMILY_MIN_WEIGHT + spare * r / total).collect()
}

/// Fully separable state on a 15-level A and two qubits B, C whose fifteen
/// separable BC branches have linearly independent Bloch vectors.
///
/// Draw `k` uses the generator seeded with `seed + k`; the first draw whose
/// branches reach Bloch rank 15 is returned.
pub fn sep_no_merge_components(seed: u64) -> Result<SepNoMergeFamily> {
    for attempt in 0..SEP_FAMILY_MAX_RETRIES {
        let mut rng = sample::rng_from_seed(seed.wrapping_add(attempt));
        let weights = draw_weights(&mut rng, SEP_FAMILY_SIZE);
        let branches = (0..SEP_FAMILY_SIZE)
            .map(|_| bloch::random_separable_two_qubit_with(&mut rng, SEP_FAMILY_MIXING_TERMS))
            .collect::<Result<Vec<_>>>()?;
        if bloch::rank_of_family(&branches)? == SEP_FAMILY_SIZE {
            let state = classical_quantum(&weights, &branches)?;
            return Ok(SepNoMergeFamily {
                weights,
                branches,
                attempt,
                state,
            });
        }
    }
    Err(Error::Generation(format!(
        "no rank-{SEP_FAMILY_SIZE} separable family within {SEP_FAMILY_MAX_RETRIES} draws from seed {seed}"
    )))
}

pub fn sep_no_merge_family(seed: u64) -> Result<TripartiteState> {
    sep_no_merge_components(seed).map(|f| f.state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{self, DEFAULT_PPT_TOL};
    use crate::state::{Bipartition, Party};

    #[test]
    fn phi_plus_reductions() {
        let rho = phi_plus().to_density();
        let half = CMatrix::identity(2, 2).unscale(2.0);
        for keep in [0, 1] {
            let r = rho.partial_trace(&[keep]).unwrap();
            assert!(linalg::max_abs(&(r.matrix() - &half)) < 1e-15);
        }
        let cut = Bipartition::new(&[0], 2).unwrap();
        assert!((measures::log_negativity(&rho, &cut).unwrap() - 1.0).abs() < 1e-12);
        assert!((phi_plus().amplitudes().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sep_family_structure() {
        let fam = sep_no_merge_components(7).unwrap();
        assert_eq!(fam.state.state().dims(), &[15, 2, 2]);
        assert!(fam.weights.iter().all(|&w| w >= SEP_FAMILY_MIN_WEIGHT));
        assert!((fam.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let bc = Bipartition::new(&[0], 2).unwrap();
        for s in &fam.branches {
            assert!(measures::is_ppt(s, &bc, DEFAULT_PPT_TOL).unwrap());
        }
        assert_eq!(bloch::rank_of_family(&fam.branches).unwrap(), 15);
        let rho = &fam.state;
        assert!(measures::is_ppt(rho.state(), &rho.cut_ab_c(), DEFAULT_PPT_TOL).unwrap());
        assert!(measures::conditional_entropy(rho).unwrap() > 0.0);
        // Same seed, same state.
        assert_eq!(sep_no_merge_family(7).unwrap(), fam.state);
    }

    #[test]
    fn product_example_cases() {
        let prod = PureState::basis(vec![2, 2], 0).unwrap();
        let rho = product_example(&prod).unwrap();
        assert_eq!(rho.state().dims(), &[2, 2, 2]);
        assert!((rho.state().purity() - 1.0).abs() < 1e-12);

        let rho = product_example(&phi_plus()).unwrap();
        assert!((measures::conditional_entropy(&rho).unwrap() - 1.0).abs() < 1e-12);
        assert!(measures::is_ppt(rho.state(), &rho.cut_ab_c(), DEFAULT_PPT_TOL).unwrap());

        assert!(product_example(&PureState::basis(vec![2], 0).unwrap()).is_err());
    }

    #[test]
    fn robust_family_basics() {
        assert!(robust_vanishing_family(0.0).is_err());
        assert!(robust_vanishing_family(1.0).is_err());
        let rho = robust_vanishing_family(0.1).unwrap();
        assert!(measures::is_ppt(rho.state(), &rho.cut_ab_c(), DEFAULT_PPT_TOL).unwrap());
        let w = measures::hashing_witness(rho.state(), &rho.cut_a_bc()).unwrap();
        assert!(w.value > 0.0);

        let p = 1e-3;
        let near = robust_vanishing_family(p).unwrap();
        let base = product_example(&phi_plus()).unwrap();
        assert!(measures::trace_distance(near.state(), base.state()).unwrap() <= p);
    }

    fn robust_hashing(p: f64) -> f64 {
        let rho = robust_vanishing_family(p).unwrap();
        measures::hashing_witness(rho.state(), &rho.cut_a_bc()).unwrap().value
    }

    #[test]
    fn robust_family_threshold_by_bisection() {
        let (mut lo, mut hi) = (1e-6, 1.0 - 1e-6);
        assert!(robust_hashing(lo) > 0.0 && robust_hashing(hi) < 0.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if robust_hashing(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - ROBUST_FAMILY_HASHING_THRESHOLD).abs() < 1e-9, "threshold {lo}");
        assert!(robust_hashing(ROBUST_FAMILY_HASHING_THRESHOLD - 1e-6) > 0.0);
        assert!(robust_hashing(ROBUST_FAMILY_HASHING_THRESHOLD + 1e-6) < 0.0);
    }

    #[test]
    fn perturb_endpoints() {
        let rho = robust_vanishing_family(0.2).unwrap();
        let sigma = ghz();
        assert_eq!(
            perturb(&rho, &sigma, 0.0).unwrap().state().matrix(),
            rho.state().matrix()
        );
        assert_eq!(
            perturb(&rho, &sigma, 1.0).unwrap().state().matrix(),
            sigma.state().matrix()
        );
        assert!(perturb(&rho, &sigma, 1.5).is_err());
        let other = sep_no_merge_family(1).unwrap();
        assert!(perturb(&rho, &other, 0.1).is_err());
    }

    #[test]
    fn fixtures() {
        let g = ghz();
        assert!(measures::conditional_entropy(&g).unwrap().abs() < 1e-12);
        let cc = classical_correlated();
        let mi = measures::mutual_information(cc.state(), &cc.cut_a_bc()).unwrap();
        assert!((mi - 1.0).abs() < 1e-12);
        let zero = PureState::basis(vec![2], 0).unwrap();
        let plus = PureState::from_real(vec![2], &[1.0, 1.0]).unwrap();
        let prod = product_pure(&zero, &plus, &zero).unwrap();
        for left in [&[Party::A][..], &[Party::B], &[Party::C]] {
            let cut = prod.cut(left).unwrap();
            assert!(measures::mutual_information(prod.state(), &cut).unwrap().abs() < 1e-12);
            assert_eq!(measures::log_negativity(prod.state(), &cut).unwrap(), 0.0);
        }
    }
}
