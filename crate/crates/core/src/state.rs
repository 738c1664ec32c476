//! Density matrices and pure states over tensor-factored Hilbert spaces.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};

/// Default cap on the total Hilbert-space dimension of a state (12 qubits).
pub const DEFAULT_DIM_CAP: usize = 4096;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-PSD_CLAMP_TOL, 0)` are treated as round-off and clamped.
pub const PSD_CLAMP_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-12;

fn check_dims(dims: &[usize]) -> Result<usize> {
    if dims.is_empty() {
        return Err(Error::invalid("dims must list at least one subsystem"));
    }
    if let Some(d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::invalid(format!("subsystem dimension {d} is below 2")));
    }
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or(Error::SizeLimit {
            dim: usize::MAX,
            cap: DEFAULT_DIM_CAP,
        })
}

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: CVector,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        let d = check_dims(&dims)?;
        if amplitudes.len() != d {
            return Err(Error::invalid(format!(
                "expected {d} amplitudes for dims {dims:?}, got {}",
                amplitudes.len()
            )));
        }
        let norm_sqr = amplitudes.norm_squared();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("amplitudes have squared norm {norm_sqr}")));
        }
        Ok(PureState { dims, amplitudes })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(dims: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::invalid("cannot normalize a zero vector"));
        }
        PureState::new(dims, amplitudes.unscale(norm))
    }

    pub fn from_real(dims: Vec<usize>, amplitudes: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|&x| c(x, 0.0)));
        PureState::normalized(dims, v)
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let d = check_dims(&dims)?;
        if index >= d {
            return Err(Error::invalid(format!(
                "basis index {index} out of range for dimension {d}"
            )));
        }
        let mut v = CVector::zeros(d);
        v[index] = c(1.0, 0.0);
        PureState::new(dims, v)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let dim = self.dim() * other.dim();
        if dim > DEFAULT_DIM_CAP {
            return Err(Error::SizeLimit {
                dim,
                cap: DEFAULT_DIM_CAP,
            });
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        let amps = self.amplitudes.kronecker(&other.amplitudes);
        Ok(PureState { dims, amplitudes: amps })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims.clone(),
            data: self.projector(),
        }
    }
}

/// A two-sided cut of the subsystem list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    /// `left` holds the subsystem indices on one side; the rest of
    /// `0..n_subsystems` forms the other side.
    pub fn new(left: &[usize], n_subsystems: usize) -> Result<Self> {
        let left: BTreeSet<usize> = left.iter().copied().collect();
        if let Some(&bad) = left.iter().find(|&&k| k >= n_subsystems) {
            return Err(Error::invalid(format!(
                "subsystem index {bad} out of range for {n_subsystems} subsystems"
            )));
        }
        let right: Vec<usize> = (0..n_subsystems).filter(|k| !left.contains(k)).collect();
        if left.is_empty() || right.is_empty() {
            return Err(Error::invalid("both sides of a bipartition must be nonempty"));
        }
        Ok(Bipartition {
            left: left.into_iter().collect(),
            right,
        })
    }

    /// Builds a cut from both sides, checking that they partition `0..n`.
    pub fn from_sides(left: &[usize], right: &[usize], n_subsystems: usize) -> Result<Self> {
        let cut = Bipartition::new(left, n_subsystems)?;
        let mut r: Vec<usize> = right.to_vec();
        r.sort_unstable();
        r.dedup();
        if r != cut.right || r.len() != right.len() {
            return Err(Error::invalid(format!(
                "{left:?} and {right:?} do not partition {n_subsystems} subsystems"
            )));
        }
        Ok(cut)
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn n_subsystems(&self) -> usize {
        self.left.len() + self.right.len()
    }

    fn check_against(&self, dims: &[usize]) -> Result<()> {
        if self.n_subsystems() != dims.len() {
            return Err(Error::invalid(format!(
                "cut covers {} subsystems but the state has {}",
                self.n_subsystems(),
                dims.len()
            )));
        }
        Ok(())
    }
}

/// A Hermitian, unit-trace, positive semidefinite matrix with a tensor
/// factorization. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    data: CMatrix,
}

impl DensityMatrix {
    /// Validates and normalizes a candidate density matrix.
    ///
    /// Small negative eigenvalues (down to `-1e-9`) are clamped to zero and the
    /// trace renormalized; larger violations are rejected.
    pub fn new(dims: Vec<usize>, data: CMatrix) -> Result<Self> {
        let d = check_dims(&dims)?;
        if d > DEFAULT_DIM_CAP {
            return Err(Error::SizeLimit {
                dim: d,
                cap: DEFAULT_DIM_CAP,
            });
        }
        if data.nrows() != d || data.ncols() != d {
            return Err(Error::invalid(format!(
                "dims {dims:?} need a {d}x{d} matrix, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("matrix has non-finite entries".into()));
        }
        let dev = linalg::hermitian_deviation(&data);
        if dev > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:.3e})")));
        }
        let tr = linalg::trace_re(&data);
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let data = linalg::hermitize(&data);
        let e = linalg::eigh(&data)?;
        let lo = e.min();
        if lo < -PSD_CLAMP_TOL {
            return Err(Error::InvalidState(format!(
                "not positive semidefinite (min eigenvalue {lo:.3e})"
            )));
        }
        let data = if lo < 0.0 {
            let clamped = e.reconstruct_with(|x| x.max(0.0));
            let t = linalg::trace_re(&clamped);
            clamped.unscale(t)
        } else {
            data
        };
        Ok(DensityMatrix { dims, data })
    }

    /// Skips validation; callers guarantee the invariants (closed operations).
    pub(crate) fn from_parts(dims: Vec<usize>, data: CMatrix) -> Self {
        debug_assert_eq!(linalg::total_dim(&dims), data.nrows());
        DensityMatrix { dims, data }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Result<Self> {
        let d = check_dims(&dims)?;
        if d > DEFAULT_DIM_CAP {
            return Err(Error::SizeLimit {
                dim: d,
                cap: DEFAULT_DIM_CAP,
            });
        }
        Ok(DensityMatrix {
            dims,
            data: CMatrix::identity(d, d).unscale(d as f64),
        })
    }

    /// Diagonal state with the given probabilities (normalized).
    pub fn diagonal(dims: Vec<usize>, probs: &[f64]) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if probs.iter().any(|&p| p < 0.0) || total.is_nan() || total <= 0.0 {
            return Err(Error::invalid("diagonal weights must be nonnegative with positive sum"));
        }
        let v = CVector::from_iterator(probs.len(), probs.iter().map(|&p| c(p / total, 0.0)));
        DensityMatrix::new(dims, CMatrix::from_diagonal(&v))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn n_subsystems(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(linalg::eigvalsh(&self.data)?.iter().copied().collect())
    }

    /// The dominant eigenvector when `purity ≥ 1 - tol`, otherwise `None`.
    pub fn to_pure(&self, tol: f64) -> Result<Option<PureState>> {
        if self.purity() < 1.0 - tol {
            return Ok(None);
        }
        let e = linalg::eigh(&self.data)?;
        let top = e.vectors.column(e.values.len() - 1).into_owned();
        Ok(Some(PureState::normalized(self.dims.clone(), top)?))
    }

    /// Same matrix, different factorization (total dimension must agree).
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        let d = check_dims(&dims)?;
        if d != self.dim() {
            return Err(Error::invalid(format!(
                "cannot refactor dimension {} as {dims:?}",
                self.dim()
            )));
        }
        Ok(DensityMatrix::from_parts(dims, self.data.clone()))
    }

    /// `ρ ⊗ σ` with the default dimension cap.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        self.tensor_with_cap(other, DEFAULT_DIM_CAP)
    }

    pub fn tensor_with_cap(&self, other: &DensityMatrix, cap: usize) -> Result<Self> {
        let dim = self
            .dim()
            .checked_mul(other.dim())
            .ok_or(Error::SizeLimit { dim: usize::MAX, cap })?;
        if dim > cap {
            return Err(Error::SizeLimit { dim, cap });
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Ok(DensityMatrix::from_parts(dims, self.data.kronecker(&other.data)))
    }

    /// Reduced state on the subsystems in `keep`, listed in their original order.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let keep: Vec<usize> = keep.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        if keep.is_empty() {
            return Err(Error::invalid("partial trace needs a nonempty keep set"));
        }
        if let Some(&bad) = keep.iter().find(|&&k| k >= self.dims.len()) {
            return Err(Error::invalid(format!("subsystem index {bad} out of range")));
        }
        if keep.len() == self.dims.len() {
            return Ok(self.clone());
        }
        let data = linalg::partial_trace_matrix(&self.data, &self.dims, &keep);
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(DensityMatrix::from_parts(dims, linalg::hermitize(&data)))
    }

    /// Partial transpose of the left side of `cut`. Hermitian, trace one,
    /// generally not PSD.
    pub fn partial_transpose(&self, cut: &Bipartition) -> Result<CMatrix> {
        cut.check_against(&self.dims)?;
        Ok(linalg::partial_transpose_matrix(&self.data, &self.dims, cut.left()))
    }

    /// `(1 - weight) ρ + weight σ`.
    pub fn mix(&self, other: &DensityMatrix, weight: f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::invalid(format!(
                "cannot mix states with dims {:?} and {:?}",
                self.dims, other.dims
            )));
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::invalid(format!("mixing weight {weight} outside [0, 1]")));
        }
        let data = self.data.scale(1.0 - weight) + other.data.scale(weight);
        Ok(DensityMatrix::from_parts(self.dims.clone(), data))
    }

    /// Applies `U ρ U†` for a unitary `U` of matching dimension.
    pub fn conjugate_by(&self, unitary: &CMatrix) -> Result<Self> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::invalid("unitary dimension mismatch"));
        }
        let data = unitary * &self.data * unitary.adjoint();
        DensityMatrix::new(self.dims.clone(), linalg::hermitize(&data))
    }
}

/// `ρ ⊗ σ`.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    a.tensor(b)
}

pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    rho.partial_trace(keep)
}

pub fn partial_transpose(rho: &DensityMatrix, cut: &Bipartition) -> Result<CMatrix> {
    rho.partial_transpose(cut)
}

/// The three parties of a merging scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
    C,
}

/// A density matrix whose subsystems are assigned to Alice (A), Bob (B) and
/// Charlie (C). Each party holds at least one subsystem.
#[derive(Clone, Debug, PartialEq)]
pub struct TripartiteState {
    state: DensityMatrix,
    a: Vec<usize>,
    b: Vec<usize>,
    c: Vec<usize>,
}

impl TripartiteState {
    pub fn new(state: DensityMatrix, a: &[usize], b: &[usize], c: &[usize]) -> Result<Self> {
        let n = state.n_subsystems();
        let mut seen = vec![false; n];
        for (name, side) in [("A", a), ("B", b), ("C", c)] {
            if side.is_empty() {
                return Err(Error::invalid(format!("party {name} holds no subsystem")));
            }
            for &k in side {
                if k >= n {
                    return Err(Error::invalid(format!("subsystem {k} out of range for party {name}")));
                }
                if std::mem::replace(&mut seen[k], true) {
                    return Err(Error::invalid(format!("subsystem {k} assigned twice")));
                }
            }
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::invalid(format!("subsystem {k} is not assigned to any party")));
        }
        let sorted = |v: &[usize]| {
            let mut v = v.to_vec();
            v.sort_unstable();
            v
        };
        Ok(TripartiteState {
            state,
            a: sorted(a),
            b: sorted(b),
            c: sorted(c),
        })
    }

    /// Three subsystems, one per party, in A, B, C order.
    pub fn abc(state: DensityMatrix) -> Result<Self> {
        TripartiteState::new(state, &[0], &[1], &[2])
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn into_state(self) -> DensityMatrix {
        self.state
    }

    pub fn indices(&self, party: Party) -> &[usize] {
        match party {
            Party::A => &self.a,
            Party::B => &self.b,
            Party::C => &self.c,
        }
    }

    /// Local dimension held by a party.
    pub fn party_dim(&self, party: Party) -> usize {
        self.indices(party).iter().map(|&k| self.state.dims()[k]).product()
    }

    fn union(&self, parties: &[Party]) -> Vec<usize> {
        let mut idx: Vec<usize> = parties.iter().flat_map(|&p| self.indices(p).to_vec()).collect();
        idx.sort_unstable();
        idx
    }

    /// Reduced state on the union of the given parties.
    pub fn reduced(&self, parties: &[Party]) -> Result<DensityMatrix> {
        self.state.partial_trace(&self.union(parties))
    }

    /// The cut separating `left` parties from everyone else.
    pub fn cut(&self, left: &[Party]) -> Result<Bipartition> {
        Bipartition::new(&self.union(left), self.state.n_subsystems())
    }

    /// A : BC
    pub fn cut_a_bc(&self) -> Bipartition {
        self.cut(&[Party::A]).expect("parties are nonempty")
    }

    /// AB : C
    pub fn cut_ab_c(&self) -> Bipartition {
        self.cut(&[Party::A, Party::B]).expect("parties are nonempty")
    }

    /// Same labels, new underlying state (dims must agree).
    pub fn with_state(&self, state: DensityMatrix) -> Result<Self> {
        if state.dims() != self.state.dims() {
            return Err(Error::invalid("replacement state has different dims"));
        }
        Ok(TripartiteState {
            state,
            a: self.a.clone(),
            b: self.b.clone(),
            c: self.c.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi_plus() -> PureState {
        PureState::from_real(vec![2, 2], &[1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    fn close(a: &CMatrix, b: &CMatrix, tol: f64) -> bool {
        linalg::max_abs(&(a - b)) <= tol
    }

    #[test]
    fn to_pure_recovers_the_ket() {
        let psi = PureState::from_real(vec![2, 2], &[0.6, 0.0, 0.0, 0.8]).unwrap();
        let back = psi.to_density().to_pure(1e-9).unwrap().unwrap();
        let overlap = psi.amplitudes().dotc(back.amplitudes()).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
        assert!(DensityMatrix::maximally_mixed(vec![2])
            .unwrap()
            .to_pure(1e-9)
            .unwrap()
            .is_none());
    }

    #[test]
    fn tensor_of_maximally_mixed_qubits() {
        let q = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        let both = q.tensor(&q).unwrap();
        assert_eq!(both.dims(), &[2, 2]);
        assert!(close(both.matrix(), &CMatrix::identity(4, 4).unscale(4.0), 1e-15));
    }

    #[test]
    fn tensor_of_basis_states() {
        let zero = PureState::basis(vec![2], 0).unwrap().to_density();
        let one = PureState::basis(vec![2], 1).unwrap().to_density();
        let prod = zero.tensor(&one).unwrap();
        let expected = PureState::basis(vec![2, 2], 1).unwrap().to_density();
        assert!(close(prod.matrix(), expected.matrix(), 0.0));
    }

    #[test]
    fn tensor_respects_cap() {
        let q = DensityMatrix::maximally_mixed(vec![4]).unwrap();
        let err = q.tensor_with_cap(&q, 8).unwrap_err();
        assert!(matches!(err, Error::SizeLimit { dim: 16, cap: 8 }));
    }

    #[test]
    fn reduced_phi_plus_is_maximally_mixed() {
        // Hand computation: |φ+⟩⟨φ+| has entries 1/2 at (0,0),(0,3),(3,0),(3,3);
        // tracing the second qubit leaves diag(1/2, 1/2).
        let r = phi_plus().to_density().partial_trace(&[0]).unwrap();
        assert!(close(r.matrix(), &CMatrix::identity(2, 2).unscale(2.0), 1e-15));
        let r = phi_plus().to_density().partial_trace(&[1]).unwrap();
        assert!(close(r.matrix(), &CMatrix::identity(2, 2).unscale(2.0), 1e-15));
    }

    #[test]
    fn partial_trace_rejects_empty_keep() {
        let s = phi_plus().to_density();
        assert!(matches!(s.partial_trace(&[]), Err(Error::InvalidArgument(_))));
        assert_eq!(s.partial_trace(&[0, 1]).unwrap(), s);
    }

    #[test]
    fn partial_transpose_of_phi_plus() {
        let s = phi_plus().to_density();
        let cut = Bipartition::new(&[0], 2).unwrap();
        let pt = s.partial_transpose(&cut).unwrap();
        let ev = linalg::eigvalsh(&pt).unwrap();
        let expected = [-0.5, 0.5, 0.5, 0.5];
        for (got, want) in ev.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{ev:?}");
        }
        let back = linalg::partial_transpose_matrix(&pt, s.dims(), cut.left());
        assert_eq!(&back, s.matrix());
    }

    #[test]
    fn construction_clamps_round_off_and_rejects_negative_spectra() {
        let tiny = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0 + 5e-11, 0.0), c(-5e-11, 0.0)]));
        let s = DensityMatrix::new(vec![2], tiny).unwrap();
        assert!(s.eigenvalues().unwrap().iter().all(|&x| x >= 0.0));
        assert!((linalg::trace_re(s.matrix()) - 1.0).abs() < 1e-15);

        let bad = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.1, 0.0), c(-0.1, 0.0)]));
        assert!(matches!(DensityMatrix::new(vec![2], bad), Err(Error::InvalidState(_))));

        let off_trace = CMatrix::identity(2, 2).scale(0.6);
        assert!(matches!(
            DensityMatrix::new(vec![2], off_trace),
            Err(Error::InvalidState(_))
        ));
    }

    #[test]
    fn bipartition_validation() {
        assert!(Bipartition::new(&[], 3).is_err());
        assert!(Bipartition::new(&[0, 1, 2], 3).is_err());
        assert!(Bipartition::new(&[3], 3).is_err());
        let cut = Bipartition::new(&[2, 0], 3).unwrap();
        assert_eq!(cut.left(), &[0, 2]);
        assert_eq!(cut.right(), &[1]);
        assert!(Bipartition::from_sides(&[0], &[1, 2], 3).is_ok());
        assert!(Bipartition::from_sides(&[0], &[1], 3).is_err());
    }

    #[test]
    fn tripartite_labels_must_partition() {
        let s = DensityMatrix::maximally_mixed(vec![2, 2, 2]).unwrap();
        assert!(TripartiteState::new(s.clone(), &[0], &[1], &[2]).is_ok());
        assert!(TripartiteState::new(s.clone(), &[0], &[1], &[1]).is_err());
        assert!(TripartiteState::new(s.clone(), &[0], &[1], &[]).is_err());
        assert!(TripartiteState::new(s, &[0], &[1], &[]).is_err());
    }

    #[test]
    fn pure_state_norm_check() {
        let v = CVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(PureState::new(vec![2], v.clone()).is_err());
        assert!(PureState::normalized(vec![2], v).is_ok());
    }
}
