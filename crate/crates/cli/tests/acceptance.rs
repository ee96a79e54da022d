//! One line per acceptance criterion, each run over a seeded corpus of
//! manifests with a wall-clock budget. Exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use serde_json::json;
use superkoszul::corpus::{even_chart, mixed_chart, Corpus};
use superkoszul::mx::solve_modular_potential;
use superkoszul::report::{Check, Status};
use superkoszul::superalg::{Chart, Parity, SuperPoly};
use superkoszul_cli::manifest::{parse_manifest_str, Manifest};
use superkoszul_cli::suites::{intertwine, jacobi, koszul, modular, mx, pinfty, quantum, symbols, thick};

const SEED: u64 = 0x5eed_2024;
/// Random P-infinity instances per chart.
const RANDOM_PER_CHART: usize = 4;

fn manifest(
    chart: &Chart,
    p: &SuperPoly,
    log_rho: &SuperPoly,
    f: Option<&SuperPoly>,
    size: usize,
    seed: u64,
) -> Manifest {
    let base: Vec<_> = chart
        .base()
        .iter()
        .map(|&b| {
            let parity = if chart.parity(b).is_even() { "even" } else { "odd" };
            json!({"name": chart.generator(b).name, "parity": parity})
        })
        .collect();
    let text = json!({
        "base": base,
        "P": p.to_string(),
        "log_rho": log_rho.to_string(),
        "F": f.map(|f| f.to_string()),
        "budgets": {"corpus_size": size, "seed": seed},
    });
    parse_manifest_str(&text.to_string()).unwrap_or_else(|e| panic!("{e}: {text}"))
}

fn bundled(text: &str, size: usize) -> Manifest {
    let mut m = parse_manifest_str(text).expect("bundled manifest");
    m.budgets.corpus_size = size;
    m
}

struct Corpora {
    /// The bundled examples with the full corpus size.
    fixed: Vec<Manifest>,
    /// Random P-infinity structures on even charts of dimension 1 to 3 and on
    /// the mixed chart, with random volumes.
    random: Vec<Manifest>,
    /// Structures whose self-bracket does not vanish.
    broken: Vec<Manifest>,
}

fn corpora() -> Corpora {
    let fixed = vec![
        bundled(include_str!("../manifests/so3.json"), 50),
        bundled(include_str!("../manifests/mixed.json"), 50),
        bundled(include_str!("../manifests/potential.json"), 50),
    ];
    let mut k = Corpus::new(SEED);
    let charts: Vec<Arc<Chart>> = vec![even_chart(1), even_chart(2), even_chart(3), mixed_chart()];
    let mut random = Vec::new();
    let mut broken = Vec::new();
    for chart in &charts {
        let even: Vec<usize> = chart
            .base()
            .into_iter()
            .filter(|&b| chart.parity(b).is_even())
            .collect();
        for i in 0..RANDOM_PER_CHART {
            let p = k.pinfty(chart, 2);
            let log_rho = k.poly(chart, &even, 2, 2, Some(Parity::Even));
            random.push(manifest(chart, p.p(), &log_rho, None, 12, SEED + i as u64));
        }
        if let Some(p) = k.broken_bivector(chart) {
            broken.push(manifest(chart, p.p(), &SuperPoly::zero(chart), None, 12, SEED));
        }
    }
    Corpora { fixed, random, broken }
}

/// Attach a modular potential of bounded degree where one exists.
fn with_potential(m: &Manifest) -> Manifest {
    let mut m = m.clone();
    if m.f.is_none() && m.p.is_pinfty() {
        if let Ok(Some(f)) = solve_modular_potential(&m.p, &m.vol, 3) {
            m.f = Some(f);
        }
    }
    m
}

struct Outcome {
    ok: bool,
    summary: String,
}

/// Passes iff no check fails and every check name passes on some instance.
fn judge(checks: &[Check]) -> Outcome {
    let mut by_name: BTreeMap<&str, (usize, usize, usize)> = BTreeMap::new();
    let mut first_fail = None;
    for c in checks {
        let e = by_name.entry(&c.name).or_default();
        match &c.status {
            Status::Pass => e.0 += 1,
            Status::Fail(w) => {
                e.1 += 1;
                first_fail.get_or_insert_with(|| format!("{}: {w}", c.name));
            }
            Status::Skipped(_) => e.2 += 1,
        }
    }
    let never: Vec<&str> = by_name.iter().filter(|(_, v)| v.0 == 0).map(|(n, _)| *n).collect();
    let passes = checks.iter().filter(|c| c.passed()).count();
    let fails = checks.iter().filter(|c| c.status.is_fail()).count();
    let mut summary = format!("{passes} pass, {fails} fail, {} skipped", checks.len() - passes - fails);
    if let Some(f) = &first_fail {
        let short: String = f.chars().take(600).collect();
        summary.push_str(&format!("; first failure {short}"));
    }
    if !never.is_empty() {
        summary.push_str(&format!("; never passed: {}", never.join(", ")));
    }
    Outcome {
        ok: fails == 0 && never.is_empty() && !checks.is_empty(),
        summary,
    }
}

fn over(ms: &[&Manifest], f: impl Fn(&Manifest) -> Vec<Check> + Sync) -> Vec<Check> {
    std::thread::scope(|s| {
        let handles: Vec<_> = ms.iter().map(|m| s.spawn(|| f(m))).collect();
        handles
            .into_iter()
            .zip(ms)
            .flat_map(|(h, m)| {
                let mut checks = h.join().expect("instance panicked");
                for c in &mut checks {
                    if let Status::Fail(w) = &mut c.status {
                        *w = format!("{w} [P = {}, log_rho = {}]", m.p.p(), m.vol.log_rho());
                    }
                }
                checks
            })
            .collect()
    })
}

fn main() -> ExitCode {
    let c = corpora();
    let all: Vec<&Manifest> = c.fixed.iter().chain(&c.random).collect();
    let with_broken: Vec<&Manifest> = all.iter().copied().chain(&c.broken).collect();
    let potentials: Vec<Manifest> = all.iter().map(|m| with_potential(m)).collect();
    let potentials: Vec<&Manifest> = potentials.iter().collect();
    let dims: Vec<Manifest> = (1..=3)
        .map(|d| {
            let chart = even_chart(d);
            manifest(
                &chart,
                &SuperPoly::zero(&chart),
                &SuperPoly::zero(&chart),
                None,
                12,
                SEED,
            )
        })
        .collect();
    let dims: Vec<&Manifest> = dims.iter().chain(all.iter().copied()).collect();

    type Run<'a> = Box<dyn Fn() -> Vec<Check> + 'a>;
    let criteria: Vec<(u32, &str, u64, Run)> = vec![
        (
            1,
            "graded-algebra laws",
            10,
            Box::new(|| over(&all, pinfty::algebra_laws)),
        ),
        (
            2,
            "Poisson and Schouten axioms",
            30,
            Box::new(|| over(&all, jacobi::bracket_axioms)),
        ),
        (
            3,
            "derived brackets and higher Jacobi identities",
            60,
            Box::new(|| {
                over(&with_broken, |m| {
                    let mut out = pinfty::derived_brackets(m);
                    out.extend(jacobi::higher_jacobi(m));
                    out.push(jacobi::anchor_morphism(m));
                    out
                })
            }),
        ),
        (
            4,
            "Koszul bracket tables",
            60,
            Box::new(|| {
                over(&with_broken, |m| {
                    let mut out = koszul::tables(m);
                    out.push(koszul::exact_forms(m));
                    out.extend(koszul::bv_generators(m));
                    out
                })
            }),
        ),
        (
            5,
            "symbols of products and commutators, hbar-Leibniz",
            120,
            Box::new(|| {
                over(&all, |m| {
                    let mut out = symbols::symbol_calculus(m);
                    out.push(symbols::hbar_leibniz(m));
                    out
                })
            }),
        ),
        (
            6,
            "Delta_P: square, Koszul operator, classical brackets",
            120,
            Box::new(|| {
                over(&with_broken, |m| {
                    vec![
                        quantum::square(m),
                        quantum::koszul_relation(m),
                        quantum::symbol(m),
                        quantum::classical_brackets(m),
                    ]
                })
            }),
        ),
        (
            7,
            "quantum MX transformation and pairing oracle",
            120,
            Box::new(|| {
                over(&with_broken, |m| {
                    let mut out = mx::classical(m);
                    out.extend(mx::quantum_rules(m));
                    out.extend(mx::images(m));
                    out.push(mx::pairing_oracle(m, m.budgets.corpus_size));
                    out
                })
            }),
        ),
        (
            8,
            "modular cocycle and gauge law",
            60,
            Box::new(|| {
                over(&with_broken, |m| {
                    vec![
                        modular::cocycle_closed(m),
                        modular::gauge_law(m),
                        modular::laplacian_of_square(m),
                    ]
                })
            }),
        ),
        (
            9,
            "linear pullback and Phi-related anchor and dual",
            120,
            Box::new(|| {
                over(&with_broken, |m| {
                    let mut out = vec![thick::linear_pullback(m)];
                    out.extend(thick::anchor(m));
                    out.extend(thick::phi_related(m));
                    out
                })
            }),
        ),
        (
            10,
            "pairing kernel and double dual",
            120,
            Box::new(|| over(&dims, thick::kernels)),
        ),
        (
            11,
            "intertwining on forms, corrected by a potential",
            300,
            Box::new(|| {
                over(&potentials, |m| {
                    let mut out = intertwine::intertwining(m);
                    out.push(modular::potential(m));
                    out
                })
            }),
        ),
    ];

    println!(
        "acceptance: {} fixed, {} random, {} broken instances, seed {SEED:#x}",
        c.fixed.len(),
        c.random.len(),
        c.broken.len()
    );
    let mut failed = 0;
    for (id, title, budget, run) in criteria {
        let start = Instant::now();
        let checks = run();
        let elapsed = start.elapsed();
        let mut outcome = judge(&checks);
        if elapsed > Duration::from_secs(budget) {
            outcome.ok = false;
            outcome.summary.push_str(&format!("; over the {budget} s budget"));
        }
        let label = if outcome.ok { "PASS" } else { "FAIL" };
        println!(
            "criterion {id:>2} {label} {title} ({:.2} s): {}",
            elapsed.as_secs_f64(),
            outcome.summary
        );
        if !outcome.ok {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
