mod common;

use proptest::prelude::*;
use superkoszul::brackets::VolumeData;
use superkoszul::corpus::{even_chart, mixed_chart, Corpus};
use superkoszul::hbarops::{
    build_delta_p, koszul_operator, random_operator, symbol_commutator_residual, symbol_product_residual, HbarOp,
};
use superkoszul::mx::{
    check_modular_closed, delta_p_star, delta_p_star_closed_form, gauge_law_residual, quantum_mx, Direction, DualPair,
};
use superkoszul::superalg::{Parity, Scalar};
use superkoszul::thick::{fourier_inversion_residuals, KernelChart};

use common::{positions, random_bivector};

fn homogeneous_op(k: &mut Corpus, chart: &std::sync::Arc<superkoszul::superalg::Chart>, degree: i32) -> HbarOp {
    let pos = positions(chart);
    loop {
        let (even, odd) = random_operator(k, chart, &pos, degree, 2).parity_split();
        let pick = if k.coin() { even } else { odd };
        if !pick.is_zero() {
            return pick;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn delta_p_is_minus_hbar_squared_koszul_operator(seed: u64) {
        let chart = mixed_chart();
        let mut k = Corpus::new(seed);
        let p = random_bivector(&mut k, &chart);
        let sum = build_delta_p(&p).unwrap().add(&koszul_operator(&p).unwrap().scale(&Scalar::hbar_power(2))).unwrap();
        prop_assert!(sum.is_zero(), "{}", sum);
    }

    #[test]
    fn delta_p_squares_to_zero_exactly_for_pinfty(seed: u64) {
        let chart = mixed_chart();
        let mut k = Corpus::new(seed);
        let p = k.pinfty(&chart, 2);
        let d = build_delta_p(&p).unwrap();
        prop_assert!(d.compose(&d).unwrap().is_zero());
        if let Some(b) = k.broken_bivector(&even_chart(3)) {
            let d = build_delta_p(&b).unwrap();
            prop_assert!(!d.compose(&d).unwrap().is_zero());
        }
    }

    #[test]
    fn symbols_multiply_and_commutators_give_the_poisson_bracket(seed: u64, da in 0i32..4, db in 0i32..4) {
        let chart = mixed_chart();
        let mut k = Corpus::new(seed);
        let a = homogeneous_op(&mut k, &chart, da);
        let b = homogeneous_op(&mut k, &chart, db);
        prop_assert!(symbol_product_residual(&a, &b).unwrap().is_zero());
        prop_assert!(symbol_commutator_residual(&a, &b).unwrap().is_zero());
    }

    #[test]
    fn quantum_transformation_is_an_involutive_anti_homomorphism(seed: u64, dim in 1usize..4) {
        let chart = even_chart(dim);
        let mut k = Corpus::new(seed);
        let pair = DualPair::new(&chart).unwrap();
        let base = chart.base();
        let vol = VolumeData::new(k.poly(&chart, &base, 2, 2, Some(Parity::Even))).unwrap();
        let fwd = |a: &HbarOp| quantum_mx(a, &pair, &vol, Direction::FormsToMultivectors).unwrap();
        let back = |a: &HbarOp| quantum_mx(a, &pair, &vol, Direction::MultivectorsToForms).unwrap();
        let a = homogeneous_op(&mut k, &chart, 2);
        let b = homogeneous_op(&mut k, &chart, 1);
        prop_assert_eq!(back(&fwd(&a)), a.clone());
        let s = if a.parity().unwrap().koszul(b.parity().unwrap()) { -1 } else { 1 };
        let lhs = fwd(&a.compose(&b).unwrap());
        let rhs = fwd(&b).compose(&fwd(&a)).unwrap().scale(&Scalar::int(s));
        prop_assert!(lhs.sub(&rhs).unwrap().is_zero());
    }

    #[test]
    fn modular_cocycle_is_closed_and_changes_by_the_gauge(seed: u64) {
        let chart = even_chart(3);
        let mut k = Corpus::new(seed);
        let p = k.pinfty(&chart, 2);
        let base = chart.base();
        let vol = VolumeData::new(k.poly(&chart, &base, 2, 3, Some(Parity::Even))).unwrap();
        prop_assert!(check_modular_closed(&p, &vol).passed());
        let f = k.base_function(&chart, &base, 3);
        prop_assert!(gauge_law_residual(&p, &vol, &f).unwrap().is_zero());
        let star = delta_p_star(&p, &vol).unwrap();
        prop_assert!(star.sub(&delta_p_star_closed_form(&p, &vol).unwrap()).unwrap().is_zero());
    }
}

#[test]
fn pairing_kernel_inverts_and_is_its_own_double_dual() {
    for dim in 1..=3 {
        let kc = KernelChart::over(&even_chart(dim)).unwrap();
        for r in fourier_inversion_residuals(&kc, dim as u32).unwrap() {
            assert!(r.is_zero(), "dim {dim}: {r}");
        }
        let k = kc.pairing_kernel().unwrap();
        assert!(k.dual().dual() == k, "dim {dim}");
    }
}
