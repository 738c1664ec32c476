use pptmerge::measures::{self, BoundDirection};
use pptmerge::{sample, Bipartition, DensityMatrix};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn entropy_is_additive(seed in any::<u64>(), da in 2usize..=4, db in 2usize..=4) {
        let mut rng = sample::rng_from_seed(seed);
        let a = sample::random_density(&[da], 1 + (seed as usize) % da, &mut rng).unwrap();
        let b = sample::random_full_rank(&[db], &mut rng).unwrap();
        let s = measures::von_neumann_entropy(&a.tensor(&b).unwrap()).unwrap();
        let sum = measures::von_neumann_entropy(&a).unwrap() + measures::von_neumann_entropy(&b).unwrap();
        prop_assert!((s - sum).abs() < 1e-9);
    }

    #[test]
    fn log_negativity_is_additive(seed in any::<u64>()) {
        let mut rng = sample::rng_from_seed(seed);
        let a = sample::random_density(&[2, 2], 2, &mut rng).unwrap();
        let b = sample::random_density(&[2, 2], 1, &mut rng).unwrap();
        let cut = Bipartition::new(&[0], 2).unwrap();
        let joint_cut = Bipartition::new(&[0, 2], 4).unwrap();
        let joint = measures::log_negativity(&a.tensor(&b).unwrap(), &joint_cut).unwrap();
        let sum = measures::log_negativity(&a, &cut).unwrap() + measures::log_negativity(&b, &cut).unwrap();
        prop_assert!((joint - sum).abs() < 1e-9);
    }

    #[test]
    fn fidelity_and_trace_distance_sandwich(seed in any::<u64>(), d in 2usize..=16) {
        let mut rng = sample::rng_from_seed(seed);
        let rho = sample::random_density(&[d], 1 + (seed as usize) % d, &mut rng).unwrap();
        let sigma = sample::random_full_rank(&[d], &mut rng).unwrap();
        let f = measures::fidelity(&rho, &sigma).unwrap();
        let t = measures::trace_distance(&rho, &sigma).unwrap();
        prop_assert!(1.0 - f <= t + 1e-8);
        prop_assert!(t <= (1.0 - f * f).max(0.0).sqrt() + 1e-8);
        prop_assert!((measures::fidelity(&sigma, &rho).unwrap() - f).abs() < 1e-8);
    }

    #[test]
    fn witnesses_are_ordered(seed in any::<u64>(), noise in 0.0f64..1.0) {
        let mut rng = sample::rng_from_seed(seed);
        let rho = sample::random_density(&[2, 3], 2, &mut rng)
            .unwrap()
            .mix(&DensityMatrix::maximally_mixed(vec![2, 3]).unwrap(), noise)
            .unwrap();
        let cut = Bipartition::new(&[0], 2).unwrap();
        let h = measures::hashing_witness(&rho, &cut).unwrap();
        let n = measures::negativity_witness(&rho, &cut).unwrap();
        prop_assert_eq!(h.direction, BoundDirection::LowerBound);
        prop_assert_eq!(n.direction, BoundDirection::UpperBound);
        prop_assert!(h.value <= n.value + 1e-8);
        if measures::is_ppt(&rho, &cut, measures::DEFAULT_PPT_TOL).unwrap() {
            prop_assert!(n.value <= 1e-8);
            prop_assert!(h.value <= 1e-8);
        }
    }
}

#[test]
fn pure_states_with_flat_schmidt_spectrum_saturate_the_ordering() {
    let psi = pptmerge::families::phi_plus().to_density();
    let cut = Bipartition::new(&[0], 2).unwrap();
    let h = measures::hashing_witness(&psi, &cut).unwrap().value;
    let n = measures::negativity_witness(&psi, &cut).unwrap().value;
    let s = measures::von_neumann_entropy(&psi.partial_trace(&[0]).unwrap()).unwrap();
    assert!((h - n).abs() < 1e-8 && (h - s).abs() < 1e-8);
}

#[test]
fn conditional_entropy_is_bounded_by_log_dim() {
    let mut rng = sample::rng_from_seed(42);
    for _ in 0..100 {
        let rho = sample::random_full_rank(&[2, 2, 2], &mut rng).unwrap();
        let t = pptmerge::TripartiteState::abc(rho).unwrap();
        let h = measures::conditional_entropy(&t).unwrap();
        assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&h), "{h}");
    }
}
