mod common;

use proptest::prelude::*;
use superkoszul::brackets::{
    bivector_component, canonical_poisson, canonical_schouten, check_bv_generates, de_rham, even_bracket_axioms,
    higher_derived_bracket_p, higher_koszul_bracket, koszul_binary, odd_bracket_axioms, poisson_functions,
    KoszulBracket, PStructure,
};
use superkoszul::corpus::{even_chart, mixed_chart, so3_lie_poisson, Corpus};
use superkoszul::hbarops::{koszul_operator, OpHandle};
use superkoszul::linfty::Version;
use superkoszul::superalg::{parse_poly, SuperPoly};

use common::{multivector_positions, positions, random_bivector};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn schouten_bracket_is_an_odd_bracket(seed: u64) {
        let chart = mixed_chart();
        let gens = multivector_positions(&chart);
        let mut k = Corpus::new(seed);
        let (a, b, c) = (k.homogeneous(&chart, &gens, 2, 2), k.homogeneous(&chart, &gens, 2, 2), k.homogeneous(&chart, &gens, 2, 2));
        for r in odd_bracket_axioms(Version::Symmetric, canonical_schouten, &a, &b, &c).unwrap() {
            prop_assert!(r.is_zero(), "{}", r);
        }
    }

    #[test]
    fn canonical_poisson_bracket_is_an_even_bracket(seed: u64) {
        let chart = mixed_chart();
        let gens: Vec<usize> = (0..chart.len()).collect();
        let mut k = Corpus::new(seed);
        let (a, b, c) = (k.homogeneous(&chart, &gens, 2, 2), k.homogeneous(&chart, &gens, 2, 2), k.homogeneous(&chart, &gens, 2, 2));
        for r in even_bracket_axioms(canonical_poisson, &a, &b, &c).unwrap() {
            prop_assert!(r.is_zero(), "{}", r);
        }
    }

    #[test]
    fn random_pinfty_structures_square_to_zero(seed: u64, dim in 1usize..4) {
        let mut k = Corpus::new(seed);
        prop_assert!(k.pinfty(&even_chart(dim), 2).is_pinfty());
        prop_assert!(k.pinfty(&mixed_chart(), 2).is_pinfty());
    }

    // Coefficients of the bivector may be odd here.
    #[test]
    fn derived_bracket_matches_the_component_formula(seed: u64) {
        let chart = mixed_chart();
        let mut k = Corpus::new(seed);
        let p = random_bivector(&mut k, &chart);
        let base = chart.base();
        let f = k.homogeneous(&chart, &base, 2, 3);
        let g = k.homogeneous(&chart, &base, 2, 3);
        let hd = higher_derived_bracket_p(&p, &[f.clone(), g.clone()]).unwrap();
        prop_assert_eq!(&hd + &poisson_functions(&p, &f, &g).unwrap(), SuperPoly::zero(&chart));
        let df_dg = koszul_binary(&p, &de_rham(&f).unwrap(), &de_rham(&g).unwrap()).unwrap();
        let expected = de_rham(&hd).unwrap().scale_int(-f.parity().unwrap().sign());
        prop_assert_eq!(df_dg, expected);
    }

    #[test]
    fn hamiltonian_bracket_is_minus_the_table_bracket(seed: u64) {
        let chart = mixed_chart();
        let mut k = Corpus::new(seed);
        let p = random_bivector(&mut k, &chart);
        let forms = positions(&chart);
        let u = k.homogeneous(&chart, &forms, 2, 2);
        let v = k.homogeneous(&chart, &forms, 2, 2);
        let h = higher_koszul_bracket(&p, &[u.clone(), v.clone()]).unwrap();
        prop_assert_eq!(&h + &koszul_binary(&p, &u, &v).unwrap(), SuperPoly::zero(&chart));
    }

    #[test]
    fn minus_koszul_operator_generates_the_koszul_bracket(seed: u64) {
        let chart = mixed_chart();
        let mut k = Corpus::new(seed);
        let p = random_bivector(&mut k, &chart);
        let forms = positions(&chart);
        let sample: Vec<SuperPoly> = (0..3).map(|_| k.homogeneous(&chart, &forms, 2, 2)).collect();
        let op = OpHandle { label: "-koszul_operator".into(), op: koszul_operator(&p).unwrap().neg() };
        let c = check_bv_generates(&op, &KoszulBracket(p.clone()), &sample);
        prop_assert!(c.passed(), "{:?}", c);
    }
}

#[test]
fn function_bracket_of_coordinates_is_minus_the_component() {
    let chart = mixed_chart();
    let mut k = Corpus::new(11);
    let anti: Vec<usize> = chart.antifiber_pairs().iter().map(|q| q.1).collect();
    for _ in 0..10 {
        let p = random_bivector(&mut k, &chart);
        for &a in &chart.base() {
            for &b in &chart.base() {
                let (xa, xb) = (SuperPoly::var(&chart, a), SuperPoly::var(&chart, b));
                let pab = bivector_component(&p, a, b).unwrap().restrict_zero(&anti);
                let expected = pab.scale_int(-chart.parity(a).sign());
                assert_eq!(higher_derived_bracket_p(&p, &[xa, xb]).unwrap(), expected);
            }
        }
    }
}

#[test]
fn so3_brackets_of_coordinates() {
    let chart = even_chart(3);
    let p = PStructure::new(so3_lie_poisson(&chart)).unwrap();
    assert!(p.is_pinfty());
    let x = |n: &str| parse_poly(&chart, n).unwrap();
    // ⟦P, x1⟧ = x2 x3* - x3 x2*, then ⟦·, x2⟧ = -x3.
    assert_eq!(
        canonical_schouten(p.p(), &x("x1")).unwrap(),
        x("x2*x3_star - x3*x2_star")
    );
    assert_eq!(higher_derived_bracket_p(&p, &[x("x1"), x("x2")]).unwrap(), x("-x3"));
    assert_eq!(higher_derived_bracket_p(&p, &[x("x2"), x("x3")]).unwrap(), x("-x1"));
    assert_eq!(koszul_binary(&p, &x("x1"), &x("dx2")).unwrap(), x("-x3"));
    assert_eq!(koszul_binary(&p, &x("dx1"), &x("dx2")).unwrap(), x("dx3"));
}
