//! Verification suites, looked up by name in a [`Registry`].

use std::collections::BTreeMap;
use std::sync::Arc;

use superkoszul::corpus::Corpus;
use superkoszul::report::{all_zero, Check};
use superkoszul::superalg::{Chart, Parity, SuperPoly};
use superkoszul::Result;
use thiserror::Error;

use crate::manifest::Manifest;

pub mod intertwine;
pub mod jacobi;
pub mod koszul;
pub mod modular;
pub mod mx;
pub mod pinfty;
pub mod quantum;
pub mod symbols;
pub mod thick;

pub use intertwine::Intertwine;
pub use jacobi::Jacobi;
pub use koszul::Koszul;
pub use modular::Modular;
pub use mx::Mx;
pub use pinfty::Pinfty;
pub use quantum::QuantumBrackets;
pub use symbols::Symbols;
pub use thick::Thick;

/// A named group of checks run against one manifest.
pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;
    fn about(&self) -> &'static str;
    fn run(&self, m: &Manifest) -> Vec<Check>;
}

#[derive(Debug, Error)]
#[error("unknown suite `{0}`; expected one of: {1}")]
pub struct UnknownSuite(pub String, pub String);

pub struct Registry {
    suites: BTreeMap<&'static str, Box<dyn Suite>>,
}

impl Registry {
    pub fn new() -> Self {
        Registry {
            suites: BTreeMap::new(),
        }
    }

    /// Every suite shipped with the tool.
    pub fn standard() -> Self {
        let mut r = Registry::new();
        r.register(Box::new(Pinfty));
        r.register(Box::new(Koszul));
        r.register(Box::new(Jacobi));
        r.register(Box::new(Symbols));
        r.register(Box::new(QuantumBrackets));
        r.register(Box::new(Mx));
        r.register(Box::new(Modular));
        r.register(Box::new(Thick));
        r.register(Box::new(Intertwine));
        r
    }

    pub fn register(&mut self, suite: Box<dyn Suite>) {
        self.suites.insert(suite.name(), suite);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Suite> {
        self.suites.get(name).map(|s| s.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.suites.keys().copied().collect()
    }

    /// Run one suite, or every registered suite for `all`. Suites of `all` run
    /// on separate threads; the caller sorts the combined checks.
    pub fn run(&self, name: &str, m: &Manifest) -> std::result::Result<Vec<Check>, UnknownSuite> {
        if name == "all" {
            let suites: Vec<&dyn Suite> = self.suites.values().map(|s| s.as_ref()).collect();
            let results = std::thread::scope(|scope| {
                let handles: Vec<_> = suites.iter().map(|s| scope.spawn(move || s.run(m))).collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("suite thread panicked"))
                    .collect::<Vec<_>>()
            });
            return Ok(results.into_iter().flatten().collect());
        }
        match self.get(name) {
            Some(s) => Ok(s.run(m)),
            None => {
                let mut names = self.names();
                names.push("all");
                Err(UnknownSuite(name.to_string(), names.join(", ")))
            }
        }
    }
}

impl Default for Registry {
    fn default() -> Self {
        Self::standard()
    }
}

/// A random stream derived from the manifest seed and a tag, so that suites and
/// checks draw independent but reproducible samples.
pub(crate) fn corpus(m: &Manifest, tag: &str) -> Corpus {
    // FNV-1a
    let mut h: u64 = 0xcbf29ce484222325;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    Corpus::new(m.budgets.seed ^ h)
}

pub(crate) fn multivector_positions(chart: &Chart) -> Vec<usize> {
    chart.antifiber_pairs().iter().flat_map(|&(x, xs)| [x, xs]).collect()
}

pub(crate) fn form_positions(chart: &Chart) -> Vec<usize> {
    chart.tangent_pairs().iter().flat_map(|&(x, dx)| [x, dx]).collect()
}

pub(crate) fn all_generators(chart: &Chart) -> Vec<usize> {
    (0..chart.len()).collect()
}

/// `n` nonzero homogeneous polynomials in `gens`.
pub(crate) fn samples(k: &mut Corpus, chart: &Arc<Chart>, gens: &[usize], degree: u32, n: usize) -> Vec<SuperPoly> {
    (0..n).map(|_| k.homogeneous(chart, gens, degree, 3)).collect()
}

pub(crate) fn samples_of_parity(
    k: &mut Corpus,
    chart: &Arc<Chart>,
    gens: &[usize],
    degree: u32,
    n: usize,
    parity: Parity,
) -> Vec<SuperPoly> {
    (0..n)
        .map(|_| k.nonzero_poly(chart, gens, degree, 3, Some(parity)))
        .collect()
}

/// Pass iff every residual is zero; the witness names the failing sample.
pub(crate) fn zero_on_samples(name: String, residuals: impl IntoIterator<Item = Result<SuperPoly>>) -> Check {
    all_zero(name, residuals, |i| format!("sample {i}"))
}

pub(crate) fn check_name(suite: &str, check: &str) -> String {
    format!("{suite}.{check}")
}

/// Whether the base of the chart is purely even.
pub(crate) fn even_base(chart: &Chart) -> bool {
    chart.base().iter().all(|&x| chart.parity(x).is_even())
}
