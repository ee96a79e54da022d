use proptest::prelude::*;
use superkoszul::corpus::{even_chart, mixed_chart, Corpus};
use superkoszul::superalg::{laws, parse_poly, Parity, SuperPoly};

fn charts() -> impl Strategy<Value = usize> {
    0usize..3
}

fn chart_of(i: usize) -> std::sync::Arc<superkoszul::superalg::Chart> {
    match i {
        0 => even_chart(2),
        1 => even_chart(3),
        _ => mixed_chart(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn products_are_supercommutative_and_associative(seed: u64, c in charts()) {
        let chart = chart_of(c);
        let gens: Vec<usize> = (0..chart.len()).collect();
        let mut k = Corpus::new(seed);
        let a = k.homogeneous(&chart, &gens, 2, 3);
        let b = k.homogeneous(&chart, &gens, 2, 3);
        let d = k.homogeneous(&chart, &gens, 2, 3);
        prop_assert!(laws::supercommutator(&a, &b).is_zero());
        prop_assert!(laws::associator(&a, &b, &d).is_zero());
        prop_assert!(laws::parity_additivity(&a, &b).unwrap());
    }

    #[test]
    fn derivatives_are_graded_derivations(seed: u64, c in charts()) {
        let chart = chart_of(c);
        let gens: Vec<usize> = (0..chart.len()).collect();
        let mut k = Corpus::new(seed);
        let a = k.homogeneous(&chart, &gens, 3, 3);
        let b = k.homogeneous(&chart, &gens, 3, 3);
        let u = *k.pick(&gens);
        let v = *k.pick(&gens);
        prop_assert!(laws::derivative_leibniz(u, &a, &b).is_zero());
        prop_assert!(laws::derivative_commutator(u, v, &a).is_zero());
    }

    #[test]
    fn berezin_integral_kills_derivatives_and_anticommutes(seed: u64) {
        let chart = mixed_chart();
        let odd: Vec<usize> = (0..chart.len()).filter(|&i| chart.parity(i) == Parity::Odd).collect();
        let gens: Vec<usize> = (0..chart.len()).collect();
        let mut k = Corpus::new(seed);
        let f = k.poly(&chart, &gens, 3, 4, None);
        let t1 = *k.pick(&odd);
        let t2 = *k.pick(&odd);
        prop_assert!(laws::berezin_of_derivative(t1, &f).unwrap().is_zero());
        prop_assert!(laws::berezin_swap(t1, t2, &f).unwrap().is_zero());
        let free: Vec<usize> = gens.iter().copied().filter(|&g| g != t1).collect();
        let g = k.poly(&chart, &free, 2, 3, None);
        prop_assert!(laws::berezin_normalization(t1, &g).unwrap().is_zero());
    }

    #[test]
    fn display_round_trips_through_the_parser(seed: u64, c in charts()) {
        let chart = chart_of(c);
        let gens: Vec<usize> = (0..chart.len()).collect();
        let mut k = Corpus::new(seed);
        let f = k.poly(&chart, &gens, 3, 5, None);
        prop_assert_eq!(parse_poly(&chart, &f.to_string()).unwrap(), f);
    }
}

#[test]
fn odd_generators_square_to_zero_and_anticommute() {
    let chart = mixed_chart();
    let th = SuperPoly::var_named(&chart, "th").unwrap();
    let dx1 = SuperPoly::var_named(&chart, "dx1").unwrap();
    assert!((&th * &th).is_zero());
    assert_eq!(&th * &dx1, -(&dx1 * &th));
    // th_star is even, so its powers survive.
    let ths = SuperPoly::var_named(&chart, "th_star").unwrap();
    assert_eq!(ths.pow(3).to_string(), "th_star^3");
}
