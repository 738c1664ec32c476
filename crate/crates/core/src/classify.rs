//! Decides, where the available certificates allow it, whether a tripartite
//! state can be merged perfectly in the asymptotic limit or has vanishing
//! merging fidelity.
//!
//! Distillable entanglement is not computable in general, so each criterion is
//! three-valued: it reports `True` or `False` only when a computable witness
//! settles it at the configured tolerance, and `Unknown` otherwise. The verdict
//! is derived from certified criteria alone:
//!
//! | verdict            | evidence                                                        |
//! |--------------------|-----------------------------------------------------------------|
//! | `PERFECT`          | `S(BC) - S(C) ≤ 0`                                              |
//! | `VANISHING`        | PPT across AB:C and positive coherent information across A:BC  |
//! | `NO_PERFECT_MERGE` | separable full-rank cq-family structure, or a certified violation of `D(A:BC) ≤ D(AB:C)` |
//! | `INCONCLUSIVE`     | none of the above                                               |

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bloch;
use crate::error::{Error, Result};
use crate::families::SEP_FAMILY_SIZE;
use crate::linalg;
use crate::measures::{self, DEFAULT_PPT_TOL};
use crate::state::{Bipartition, DensityMatrix, Party, TripartiteState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    PerfectSufficient,
    VanishingPqsm,
    VanishingLqsm,
    NecessaryPpt,
    SepFamilyObstruction,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::PerfectSufficient => "perfect_sufficient",
            Criterion::VanishingPqsm => "vanishing_pqsm",
            Criterion::VanishingLqsm => "vanishing_lqsm",
            Criterion::NecessaryPpt => "necessary_ppt",
            Criterion::SepFamilyObstruction => "sep_family_obstruction",
        }
    }

    /// The condition the criterion tests, in formula form.
    pub fn condition(self) -> &'static str {
        match self {
            Criterion::PerfectSufficient => "S(BC) - S(C) <= 0",
            Criterion::VanishingPqsm => "D_LOCC(A:BC) > E_N(AB:C) = 0",
            Criterion::VanishingLqsm => "D_LOCC(A:BC) > D_LOCC(AB:C) = 0",
            Criterion::NecessaryPpt => "D_PPT(A:BC) <= D_PPT(AB:C)",
            Criterion::SepFamilyObstruction => {
                "rho = sum_i p_i |i><i|_A (x) sigma_i^BC, sigma_i separable, Bloch rank 15"
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truth {
    True,
    False,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub name: Criterion,
    pub holds: Truth,
    pub witness: Option<f64>,
    pub condition: String,
}

impl CriterionResult {
    fn new(name: Criterion, holds: Truth, witness: Option<f64>) -> Self {
        CriterionResult {
            name,
            holds,
            witness,
            condition: name.condition().to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Perfect,
    Vanishing,
    NoPerfectMerge,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Perfect => "PERFECT",
            Verdict::Vanishing => "VANISHING",
            Verdict::NoPerfectMerge => "NO_PERFECT_MERGE",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Tolerances used by every criterion.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    /// Minimum partial-transpose eigenvalue still counted as PPT.
    pub ppt_tol: f64,
    /// Margin for entropic witnesses (conditional entropy, coherent information).
    pub witness_tol: f64,
    /// Largest off-diagonal A-block entry still counted as classical.
    pub block_tol: f64,
    /// Smallest branch weight accepted by the family obstruction.
    pub min_branch_weight: f64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig {
            ppt_tol: DEFAULT_PPT_TOL,
            witness_tol: 1e-9,
            block_tol: 1e-9,
            min_branch_weight: 1e-6,
        }
    }
}

impl ClassifyConfig {
    /// One tolerance for both the PPT test and the witness margins.
    pub fn with_tol(tol: f64) -> Self {
        ClassifyConfig {
            ppt_tol: tol,
            witness_tol: tol,
            ..ClassifyConfig::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub criteria: Vec<CriterionResult>,
    pub verdict: Verdict,
    pub fidelity_lower_bound: f64,
    pub consistency: bool,
    /// Every scalar the criteria were computed from, by name.
    pub witnesses: BTreeMap<String, f64>,
}

impl ClassificationReport {
    pub fn criterion(&self, name: Criterion) -> Option<&CriterionResult> {
        self.criteria.iter().find(|c| c.name == name)
    }
}

/// `S(BC) - S(C) ≤ 0` suffices for perfect asymptotic merging.
pub fn check_perfect_sufficient(rho: &TripartiteState) -> Result<CriterionResult> {
    check_perfect_sufficient_with(rho, &ClassifyConfig::default())
}

pub fn check_perfect_sufficient_with(rho: &TripartiteState, config: &ClassifyConfig) -> Result<CriterionResult> {
    let h = measures::conditional_entropy(rho)?;
    let holds = if h <= config.witness_tol {
        Truth::True
    } else {
        Truth::False
    };
    Ok(CriterionResult::new(Criterion::PerfectSufficient, holds, Some(h)))
}

/// Distillable across A:BC (certified by the hashing witness) and PPT across
/// AB:C implies vanishing asymptotic fidelity with PPT assistance.
pub fn check_vanishing_pqsm(rho: &TripartiteState) -> Result<CriterionResult> {
    check_vanishing_pqsm_with(rho, &ClassifyConfig::default())
}

pub fn check_vanishing_pqsm_with(rho: &TripartiteState, config: &ClassifyConfig) -> Result<CriterionResult> {
    let state = rho.state();
    let ppt = measures::is_ppt(state, &rho.cut_ab_c(), config.ppt_tol)?;
    let hashing = measures::hashing_witness(state, &rho.cut_a_bc())?;
    let holds = match (ppt, hashing.certifies_positive(config.witness_tol)) {
        (false, _) => Truth::False,
        (true, true) => Truth::True,
        (true, false) => Truth::Unknown,
    };
    Ok(CriterionResult::new(
        Criterion::VanishingPqsm,
        holds,
        Some(hashing.value),
    ))
}

/// LOCC-only analogue: distillable across A:BC and nondistillable across AB:C.
/// Nondistillability is certified only through a vanishing log negativity.
pub fn check_vanishing_lqsm(rho: &TripartiteState) -> Result<CriterionResult> {
    check_vanishing_lqsm_with(rho, &ClassifyConfig::default())
}

pub fn check_vanishing_lqsm_with(rho: &TripartiteState, config: &ClassifyConfig) -> Result<CriterionResult> {
    let state = rho.state();
    let hashing = measures::hashing_witness(state, &rho.cut_a_bc())?;
    let negativity = measures::negativity_witness(state, &rho.cut_ab_c())?;
    // The PPT test at the configured tolerance also certifies nondistillability;
    // it keeps this criterion implied by the PQSM one at any tolerance.
    let nondistillable =
        negativity.certifies_zero(config.witness_tol) || measures::is_ppt(state, &rho.cut_ab_c(), config.ppt_tol)?;
    let distillable = hashing.certifies_positive(config.witness_tol);
    let holds = if distillable && nondistillable {
        Truth::True
    } else if measures::log_negativity(state, &rho.cut_a_bc())? <= config.witness_tol
        || measures::hashing_witness(state, &rho.cut_ab_c())?.certifies_positive(config.witness_tol)
    {
        // Either A:BC is certified nondistillable or AB:C is certified distillable.
        Truth::False
    } else {
        Truth::Unknown
    };
    Ok(CriterionResult::new(
        Criterion::VanishingLqsm,
        holds,
        Some(hashing.value),
    ))
}

/// Perfect merging requires `D_PPT(A:BC) ≤ D_PPT(AB:C)`. A hashing witness
/// across A:BC exceeding the log negativity across AB:C certifies a violation,
/// reported as `False`; otherwise the criterion is `Unknown`.
pub fn check_necessary_ppt(rho: &TripartiteState) -> Result<CriterionResult> {
    check_necessary_ppt_with(rho, &ClassifyConfig::default())
}

pub fn check_necessary_ppt_with(rho: &TripartiteState, config: &ClassifyConfig) -> Result<CriterionResult> {
    let state = rho.state();
    let hashing = measures::hashing_witness(state, &rho.cut_a_bc())?;
    let negativity = measures::negativity_witness(state, &rho.cut_ab_c())?;
    let gap = hashing.value - negativity.value;
    let holds = if gap > config.witness_tol {
        Truth::False
    } else {
        Truth::Unknown
    };
    Ok(CriterionResult::new(Criterion::NecessaryPpt, holds, Some(gap)))
}

/// Detects the separable no-merge structure `Σ_i p_i |i⟩⟨i|^A ⊗ σ_i^{BC}`:
/// classical A register in the computational basis, B and C single qubits,
/// every branch weight at least `min_branch_weight`, every branch PPT across
/// B:C (hence separable), and branch Bloch vectors of rank 15.
pub fn check_sep_family_obstruction(rho: &TripartiteState) -> Result<CriterionResult> {
    check_sep_family_obstruction_with(rho, &ClassifyConfig::default())
}

pub fn check_sep_family_obstruction_with(rho: &TripartiteState, config: &ClassifyConfig) -> Result<CriterionResult> {
    let absent = |rank: Option<f64>| {
        Ok(CriterionResult::new(
            Criterion::SepFamilyObstruction,
            Truth::False,
            rank,
        ))
    };
    if rho.party_dim(Party::B) != 2 || rho.party_dim(Party::C) != 2 {
        return absent(None);
    }
    let Some(branches) = cq_branches(rho, config)? else {
        return absent(None);
    };
    if branches.len() < SEP_FAMILY_SIZE || branches.len() > SEP_FAMILY_SIZE + 1 {
        return absent(None);
    }
    let bc_cut = Bipartition::new(&[0], 2)?;
    for s in &branches {
        if !measures::is_ppt(s, &bc_cut, config.ppt_tol)? {
            return absent(None);
        }
    }
    let rank = bloch::rank_of_family(&branches)?;
    let holds = if rank == SEP_FAMILY_SIZE {
        Truth::True
    } else {
        Truth::False
    };
    Ok(CriterionResult::new(
        Criterion::SepFamilyObstruction,
        holds,
        Some(rank as f64),
    ))
}

/// Splits a state that is block diagonal in A's computational basis into
/// normalized BC branches. `None` when the structure is absent or a branch
/// weight falls below the configured minimum.
fn cq_branches(rho: &TripartiteState, config: &ClassifyConfig) -> Result<Option<Vec<DensityMatrix>>> {
    let state = rho.state();
    let dims = state.dims();
    let a = rho.indices(Party::A);
    let bc: Vec<usize> = rho
        .indices(Party::B)
        .iter()
        .chain(rho.indices(Party::C))
        .copied()
        .collect();
    // Reorder subsystems as (A..., B..., C...) so A is the leading digit.
    let order: Vec<usize> = a.iter().chain(&bc).copied().collect();
    let m = permute_subsystems(state.matrix(), dims, &order);
    let d_a = rho.party_dim(Party::A);
    let d_bc = state.dim() / d_a;

    for i in 0..d_a {
        for j in 0..d_a {
            if i == j {
                continue;
            }
            let block = m.view((i * d_bc, j * d_bc), (d_bc, d_bc));
            if block.iter().any(|z| z.norm() > config.block_tol) {
                return Ok(None);
            }
        }
    }
    let b_dim = rho.party_dim(Party::B);
    let c_dim = rho.party_dim(Party::C);
    let mut branches = Vec::with_capacity(d_a);
    for i in 0..d_a {
        let block = m.view((i * d_bc, i * d_bc), (d_bc, d_bc)).into_owned();
        let weight = linalg::trace_re(&block);
        if weight < config.min_branch_weight {
            return Ok(None);
        }
        match DensityMatrix::new(vec![b_dim, c_dim], linalg::hermitize(&block.unscale(weight))) {
            Ok(s) => branches.push(s),
            Err(_) => return Ok(None),
        }
    }
    Ok(Some(branches))
}

/// Reorders the tensor factors of `m` so that new factor `k` is old factor `order[k]`.
fn permute_subsystems(m: &linalg::CMatrix, dims: &[usize], order: &[usize]) -> linalg::CMatrix {
    let d = m.nrows();
    let new_dims: Vec<usize> = order.iter().map(|&k| dims[k]).collect();
    let old_strides = linalg::strides(dims);
    let new_strides = linalg::strides(&new_dims);
    let map: Vec<usize> = (0..d)
        .map(|old| {
            order
                .iter()
                .zip(&new_strides)
                .map(|(&k, &s)| ((old / old_strides[k]) % dims[k]) * s)
                .sum()
        })
        .collect();
    let mut out = linalg::CMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            out[(map[r], map[c])] = m[(r, c)];
        }
    }
    out
}

/// `2^{½ (I(A:C) - I(A:BC))}`: the LOCC merging fidelity bound evaluated with
/// the concentrated information replaced by the do-nothing protocol's value
/// `I(A:C)` (Bob's share is discarded). Always in `(0, 1]`.
pub fn fidelity_lower_bound(rho: &TripartiteState) -> Result<f64> {
    let i_ac = mutual_information_a_c(rho)?;
    let i_a_bc = measures::mutual_information(rho.state(), &rho.cut_a_bc())?;
    Ok(2f64.powf(0.5 * (i_ac - i_a_bc)).min(1.0))
}

/// `I(A:C)` of the reduced AC state.
fn mutual_information_a_c(rho: &TripartiteState) -> Result<f64> {
    let ac = rho.reduced(&[Party::A, Party::C])?;
    // The reduction keeps subsystems in their original order; locate A inside it.
    let mut kept: Vec<usize> = rho
        .indices(Party::A)
        .iter()
        .chain(rho.indices(Party::C))
        .copied()
        .collect();
    kept.sort_unstable();
    let a_pos: Vec<usize> = kept
        .iter()
        .enumerate()
        .filter(|(_, k)| rho.indices(Party::A).contains(k))
        .map(|(pos, _)| pos)
        .collect();
    measures::mutual_information(&ac, &Bipartition::new(&a_pos, ac.n_subsystems())?)
}

/// Purity below which a state is rejected by [`merging_cost_pure`].
pub const PURITY_TOL: f64 = 1e-9;

/// Quantum communication (in ebits) needed to merge a pure tripartite state,
/// `S(BC) - S(C)`. Negative values are the rate at which singlets are gained.
pub fn merging_cost_pure(psi: &TripartiteState) -> Result<f64> {
    let purity = psi.state().purity();
    if purity < 1.0 - PURITY_TOL {
        return Err(Error::invalid(format!(
            "merging cost needs a pure state (purity {purity:.12})"
        )));
    }
    measures::conditional_entropy(psi)
}

/// Runs every criterion and combines them into a verdict.
pub fn classify(rho: &TripartiteState) -> Result<ClassificationReport> {
    classify_with(rho, &ClassifyConfig::default())
}

pub fn classify_with(rho: &TripartiteState, config: &ClassifyConfig) -> Result<ClassificationReport> {
    let report = evaluate(rho, config)?;
    if !report.consistency {
        return Err(Error::Inconsistent(format!(
            "perfect-merging and vanishing-fidelity criteria both hold (witnesses {:?})",
            report.witnesses
        )));
    }
    Ok(report)
}

/// Like [`classify_with`] but returns the report even when it is
/// inconsistent, so callers can serialize it before failing.
pub fn evaluate(rho: &TripartiteState, config: &ClassifyConfig) -> Result<ClassificationReport> {
    let perfect = check_perfect_sufficient_with(rho, config)?;
    let vanishing = check_vanishing_pqsm_with(rho, config)?;
    let vanishing_lqsm = check_vanishing_lqsm_with(rho, config)?;
    let necessary = check_necessary_ppt_with(rho, config)?;
    let obstruction = check_sep_family_obstruction_with(rho, config)?;
    let fidelity_floor = fidelity_lower_bound(rho)?;

    let consistency = !(perfect.holds == Truth::True && vanishing.holds == Truth::True);
    let verdict = if perfect.holds == Truth::True {
        Verdict::Perfect
    } else if vanishing.holds == Truth::True {
        Verdict::Vanishing
    } else if obstruction.holds == Truth::True || necessary.holds == Truth::False {
        Verdict::NoPerfectMerge
    } else {
        Verdict::Inconclusive
    };

    let state = rho.state();
    let mut witnesses = BTreeMap::new();
    witnesses.insert("conditional_entropy".to_string(), perfect.witness.unwrap_or(f64::NAN));
    witnesses.insert(
        "hashing_a_bc".to_string(),
        measures::hashing_witness(state, &rho.cut_a_bc())?.value,
    );
    witnesses.insert(
        "log_negativity_ab_c".to_string(),
        measures::log_negativity(state, &rho.cut_ab_c())?,
    );
    witnesses.insert(
        "log_negativity_a_bc".to_string(),
        measures::log_negativity(state, &rho.cut_a_bc())?,
    );
    witnesses.insert(
        "min_pt_eigenvalue_ab_c".to_string(),
        measures::min_partial_transpose_eigenvalue(state, &rho.cut_ab_c())?,
    );
    witnesses.insert(
        "mutual_information_a_bc".to_string(),
        measures::mutual_information(state, &rho.cut_a_bc())?,
    );
    witnesses.insert("fidelity_lower_bound".to_string(), fidelity_floor);
    if let Some(rank) = obstruction.witness {
        witnesses.insert("bloch_rank".to_string(), rank);
    }

    Ok(ClassificationReport {
        criteria: vec![perfect, vanishing, vanishing_lqsm, necessary, obstruction],
        verdict,
        fidelity_lower_bound: fidelity_floor,
        consistency,
        witnesses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{self, phi_plus};
    use crate::state::PureState;

    fn zero_phi_plus() -> TripartiteState {
        // |0⟩^A ⊗ |φ+⟩^{BC}
        let zero = PureState::basis(vec![2], 0).unwrap();
        TripartiteState::abc(zero.tensor(&phi_plus()).unwrap().to_density()).unwrap()
    }

    fn product_case() -> TripartiteState {
        families::product_example(&PureState::basis(vec![2, 2], 0).unwrap()).unwrap()
    }

    fn entangled_case() -> TripartiteState {
        families::product_example(&phi_plus()).unwrap()
    }

    #[test]
    fn perfect_sufficient_fixtures() {
        let r = check_perfect_sufficient(&zero_phi_plus()).unwrap();
        assert_eq!(r.holds, Truth::True);
        assert!((r.witness.unwrap() + 1.0).abs() < 1e-12);

        let r = check_perfect_sufficient(&entangled_case()).unwrap();
        assert_eq!(r.holds, Truth::False);
        assert!((r.witness.unwrap() - 1.0).abs() < 1e-12);

        let r = check_perfect_sufficient(&product_case()).unwrap();
        assert_eq!(r.holds, Truth::True);
        assert!(r.witness.unwrap().abs() < 1e-12);
    }

    #[test]
    fn vanishing_fixtures() {
        assert_eq!(check_vanishing_pqsm(&entangled_case()).unwrap().holds, Truth::True);
        let robust = families::robust_vanishing_family(0.1).unwrap();
        assert_eq!(check_vanishing_pqsm(&robust).unwrap().holds, Truth::True);
        assert_eq!(check_vanishing_pqsm(&families::ghz()).unwrap().holds, Truth::False);

        assert_eq!(check_vanishing_lqsm(&entangled_case()).unwrap().holds, Truth::True);
        assert_eq!(check_vanishing_lqsm(&families::ghz()).unwrap().holds, Truth::False);
        let prod = check_vanishing_lqsm(&product_case()).unwrap();
        assert_ne!(prod.holds, Truth::True);
        assert!(prod.witness.unwrap().abs() < 1e-12);
    }

    #[test]
    fn necessary_condition_fixtures() {
        let r = check_necessary_ppt(&entangled_case()).unwrap();
        assert_eq!(r.holds, Truth::False);
        assert!((r.witness.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(check_necessary_ppt(&zero_phi_plus()).unwrap().holds, Truth::Unknown);
        assert_eq!(check_necessary_ppt(&product_case()).unwrap().holds, Truth::Unknown);
    }

    #[test]
    fn obstruction_fixtures() {
        let fam = families::sep_no_merge_components(3).unwrap();
        let r = check_sep_family_obstruction(&fam.state).unwrap();
        assert_eq!(r.holds, Truth::True);
        assert_eq!(r.witness, Some(15.0));

        let mut branches = fam.branches.clone();
        branches[14] = branches[0].clone();
        let degenerate = families::classical_quantum(&fam.weights, &branches).unwrap();
        assert_eq!(check_sep_family_obstruction(&degenerate).unwrap().holds, Truth::False);

        assert_eq!(
            check_sep_family_obstruction(&families::ghz()).unwrap().holds,
            Truth::False
        );
    }

    #[test]
    fn obstruction_respects_party_order() {
        // Same family with A stored last: subsystems (B, C, A).
        let fam = families::sep_no_merge_components(4).unwrap();
        let m = permute_subsystems(fam.state.state().matrix(), &[15, 2, 2], &[1, 2, 0]);
        let rho = DensityMatrix::new(vec![2, 2, 15], m).unwrap();
        let rho = TripartiteState::new(rho, &[2], &[0], &[1]).unwrap();
        assert_eq!(check_sep_family_obstruction(&rho).unwrap().holds, Truth::True);
    }

    #[test]
    fn fidelity_floor_fixtures() {
        let zero = PureState::basis(vec![2], 0).unwrap();
        let prod = families::product_pure(&zero, &zero, &zero).unwrap();
        assert!((fidelity_lower_bound(&prod).unwrap() - 1.0).abs() < 1e-12);
        assert!((fidelity_lower_bound(&entangled_case()).unwrap() - 0.5).abs() < 1e-12);
        assert!((fidelity_lower_bound(&zero_phi_plus()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn merging_cost_fixtures() {
        assert!((merging_cost_pure(&entangled_case()).unwrap() - 1.0).abs() < 1e-12);
        assert!(merging_cost_pure(&families::ghz()).unwrap().abs() < 1e-12);
        assert!((merging_cost_pure(&zero_phi_plus()).unwrap() + 1.0).abs() < 1e-12);
        assert!(merging_cost_pure(&families::classical_correlated()).is_err());
    }

    #[test]
    fn verdict_fixtures() {
        assert_eq!(classify(&zero_phi_plus()).unwrap().verdict, Verdict::Perfect);
        assert_eq!(classify(&entangled_case()).unwrap().verdict, Verdict::Vanishing);
        assert_eq!(classify(&families::ghz()).unwrap().verdict, Verdict::Perfect);
        let sep = families::sep_no_merge_family(7).unwrap();
        assert_eq!(classify(&sep).unwrap().verdict, Verdict::NoPerfectMerge);
    }
}
