use pptmerge::bloch::{self, gell_mann_basis};
use pptmerge::linalg;
use pptmerge::{measures, sample, Bipartition, DensityMatrix};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coordinates_are_affine_in_the_state(seed in any::<u64>(), d in 2usize..=4, w in 0.0f64..1.0) {
        let mut rng = sample::rng_from_seed(seed);
        let a = sample::random_full_rank(&[d], &mut rng).unwrap();
        let b = sample::random_density(&[d], 1, &mut rng).unwrap();
        let mixed = bloch::bloch_coords(&a.mix(&b, w).unwrap()).unwrap();
        let ca = bloch::bloch_coords(&a).unwrap();
        let cb = bloch::bloch_coords(&b).unwrap();
        for k in 0..ca.coords.len() {
            prop_assert!((mixed.coords[k] - ((1.0 - w) * ca.coords[k] + w * cb.coords[k])).abs() < 1e-12);
        }
        let back = ca.reconstruct(&gell_mann_basis(d).unwrap()).unwrap();
        prop_assert!(linalg::max_abs(&(back - a.matrix())) < 1e-12);
    }

    #[test]
    fn rank_ignores_order_and_the_maximally_mixed_state(seed in any::<u64>(), n in 1usize..=15) {
        let family: Vec<DensityMatrix> = (0..n)
            .map(|k| bloch::random_separable_two_qubit(seed.wrapping_add(k as u64), 4).unwrap())
            .collect();
        let rank = bloch::rank_of_family(&family).unwrap();
        let mut reversed = family.clone();
        reversed.reverse();
        prop_assert_eq!(bloch::rank_of_family(&reversed).unwrap(), rank);
        let mut padded = family.clone();
        padded.push(DensityMatrix::maximally_mixed(vec![2, 2]).unwrap());
        prop_assert_eq!(bloch::rank_of_family(&padded).unwrap(), rank);
    }

    #[test]
    fn random_separable_states_are_ppt(seed in any::<u64>(), terms in 1usize..=6) {
        let rho = bloch::random_separable_two_qubit(seed, terms).unwrap();
        let cut = Bipartition::new(&[0], 2).unwrap();
        prop_assert!(measures::is_ppt(&rho, &cut, 1e-12).unwrap());
    }
}

#[test]
fn squared_basis_norms() {
    for d in 2..=6 {
        let basis = gell_mann_basis(d).unwrap();
        let total: f64 = basis.elements().iter().map(|g| linalg::hs_inner(g, g)).sum();
        assert!((total - 2.0 * (d * d - 1) as f64).abs() < 1e-12);
    }
}

#[test]
fn seeds_give_distinct_separable_states() {
    let a = bloch::random_separable_two_qubit(1, 4).unwrap();
    let b = bloch::random_separable_two_qubit(2, 4).unwrap();
    assert!(linalg::max_abs(&(a.matrix() - b.matrix())) > 1e-6);
}
