use superkoszul::brackets::{PStructure, VolumeData};
use superkoszul::corpus::{even_chart, so3_lie_poisson, Corpus};
use superkoszul::mx::{modular_cocycle, solve_modular_potential};
use superkoszul::superalg::parse_poly;
use superkoszul::thick::{check_intertwining, form_basis};

#[test]
fn dual_anchor_intertwines_for_unimodular_data() {
    let chart = even_chart(3);
    let p = PStructure::new(so3_lie_poisson(&chart)).unwrap();
    let vol = VolumeData::trivial(&chart);
    assert!(modular_cocycle(&p, &vol).unwrap().is_zero());
    let forms = form_basis(&chart, 1, 3);
    let c = check_intertwining("so3", &p, &vol, None, &forms);
    assert!(c.passed(), "{c:?}");
}

#[test]
fn nonzero_cocycle_without_potential_is_skipped() {
    let chart = even_chart(3);
    let p = PStructure::new(parse_poly(&chart, "x3 + (1 + x3^2)*x2_star*x1_star").unwrap()).unwrap();
    let vol = VolumeData::new(parse_poly(&chart, "x1").unwrap()).unwrap();
    assert!(!modular_cocycle(&p, &vol).unwrap().is_zero());
    let c = check_intertwining("obstructed", &p, &vol, None, &form_basis(&chart, 1, 2));
    assert_eq!(c.status.label(), "skipped");
}

#[test]
fn potential_corrects_the_intertwining_relation() {
    let chart = even_chart(3);
    let p = PStructure::new(parse_poly(&chart, "x3 + (1 + x3^2)*x2_star*x1_star").unwrap()).unwrap();
    let vol = VolumeData::new(parse_poly(&chart, "x1").unwrap()).unwrap();
    let f = parse_poly(&chart, "x2_star*x3_star + x3^2*x2_star*x3_star").unwrap();
    let c = check_intertwining("corrected", &p, &vol, Some(&f), &form_basis(&chart, 1, 3));
    assert!(c.passed(), "{c:?}");
    let solved = solve_modular_potential(&p, &vol, 3)
        .unwrap()
        .expect("a potential exists");
    assert!(!solved.is_zero());
}

#[test]
fn random_unimodular_instances_intertwine() {
    let mut k = Corpus::new(3);
    for dim in 1..=3 {
        let chart = even_chart(dim);
        let vol = VolumeData::trivial(&chart);
        let forms = form_basis(&chart, 1, 2);
        for _ in 0..4 {
            let p = k.pinfty(&chart, 2);
            if !modular_cocycle(&p, &vol).unwrap().is_zero() {
                continue;
            }
            let c = check_intertwining("random", &p, &vol, None, &forms);
            assert!(c.passed(), "P = {}: {c:?}", p.p());
        }
    }
}
