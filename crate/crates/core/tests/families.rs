use pptmerge::families::{self, ROBUST_FAMILY_HASHING_THRESHOLD};
use pptmerge::measures;
use pptmerge::{sample, TripartiteState};

#[test]
fn robust_family_is_ppt_across_ab_c() {
    for k in 0..1000 {
        let p = (k + 1) as f64 / 1001.0;
        let rho = families::robust_vanishing_family(p).unwrap();
        assert!(
            measures::is_ppt(rho.state(), &rho.cut_ab_c(), measures::DEFAULT_PPT_TOL).unwrap(),
            "p = {p}"
        );
    }
}

#[test]
fn robust_family_hashing_changes_sign_at_threshold() {
    let witness = |p: f64| {
        let rho = families::robust_vanishing_family(p).unwrap();
        measures::hashing_witness(rho.state(), &rho.cut_a_bc()).unwrap().value
    };
    assert!(witness(ROBUST_FAMILY_HASHING_THRESHOLD - 1e-6) > 0.0);
    assert!(witness(ROBUST_FAMILY_HASHING_THRESHOLD + 1e-6) < 0.0);
}

#[test]
fn perturbed_sep_family_branches_stay_ppt() {
    let family = families::sep_no_merge_components(11).unwrap();
    let mut rng = sample::rng_from_seed(12);
    let bc = pptmerge::Bipartition::new(&[0], 2).unwrap();
    for branch in &family.branches {
        let noise = sample::random_full_rank(&[2, 2], &mut rng).unwrap();
        let perturbed = branch.mix(&noise, 1e-3).unwrap();
        assert!(measures::is_ppt(&perturbed, &bc, measures::DEFAULT_PPT_TOL).unwrap());
    }
}

#[test]
fn perturbing_toward_itself_is_the_identity() {
    let rho = families::ghz();
    let same = families::perturb(&rho, &rho, 0.3).unwrap();
    assert!(measures::trace_distance(same.state(), rho.state()).unwrap() < 1e-12);
    let other =
        TripartiteState::abc(sample::random_full_rank(&[2, 2, 2], &mut sample::rng_from_seed(3)).unwrap()).unwrap();
    let moved = families::perturb(&rho, &other, 0.25).unwrap();
    let t = measures::trace_distance(moved.state(), rho.state()).unwrap();
    let full = measures::trace_distance(other.state(), rho.state()).unwrap();
    assert!((t - 0.25 * full).abs() < 1e-9);
}
