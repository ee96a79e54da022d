//! Suite reports and their text and JSON renderings.

use serde::{Deserialize, Serialize};
use superkoszul::report::{Check, Status};

use crate::manifest::Budgets;

/// Bumped whenever a field of the JSON rendering changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable that turns on ANSI colors in text reports (`always`).
pub const COLOR_ENV: &str = "SUPERKOSZUL_COLOR";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: String,
    /// Witness of a failure or reason for a skip.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub suite: String,
    pub seed: u64,
    pub budgets: Budgets,
    pub summary: Summary,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn new(suite: &str, budgets: &Budgets, mut checks: Vec<Check>) -> Report {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let mut summary = Summary::default();
        let checks = checks
            .into_iter()
            .map(|c| {
                let detail = match &c.status {
                    Status::Pass => {
                        summary.pass += 1;
                        None
                    }
                    Status::Fail(w) => {
                        summary.fail += 1;
                        Some(w.clone())
                    }
                    Status::Skipped(r) => {
                        summary.skipped += 1;
                        Some(r.clone())
                    }
                };
                CheckRecord {
                    name: c.name,
                    status: c.status.label().to_string(),
                    detail,
                }
            })
            .collect();
        Report {
            schema_version: SCHEMA_VERSION,
            suite: suite.to_string(),
            seed: budgets.seed,
            budgets: budgets.clone(),
            summary,
            checks,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0
    }

    /// 0 when no check failed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_passed() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self, color: bool) -> String {
        let b = &self.budgets;
        let mut out = format!(
            "superkoszul report (schema {})\nsuite: {}\nseed: {}\nbudgets: hbar_order={} momentum_order={} corpus_degree={} corpus_size={}\n",
            self.schema_version, self.suite, self.seed, b.hbar_order, b.momentum_order, b.corpus_degree, b.corpus_size
        );
        for c in &self.checks {
            let label = format!("{:<7}", c.status);
            let label = if color { paint(&c.status, &label) } else { label };
            match &c.detail {
                None => out.push_str(&format!("{label} {}\n", c.name)),
                Some(d) => out.push_str(&format!("{label} {}: {d}\n", c.name)),
            }
        }
        out.push_str(&format!(
            "summary: {} pass, {} fail, {} skipped\n",
            self.summary.pass, self.summary.fail, self.summary.skipped
        ));
        out
    }
}

fn paint(status: &str, text: &str) -> String {
    let code = match status {
        "pass" => "32",
        "fail" => "31",
        _ => "33",
    };
    format!("\x1b[{code}m{text}\x1b[0m")
}

/// Colors are used only when the environment asks for them.
pub fn color_from_env() -> bool {
    std::env::var(COLOR_ENV).is_ok_and(|v| v == "always")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report::new(
            "demo",
            &Budgets::default(),
            vec![
                Check::skipped("b.second", "not applicable"),
                Check::pass("a.first"),
                Check::fail("c.third", "residual x1"),
            ],
        )
    }

    #[test]
    fn checks_are_sorted_and_counted() {
        let r = sample();
        let names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["a.first", "b.second", "c.third"]);
        assert_eq!(
            r.summary,
            Summary {
                pass: 1,
                fail: 1,
                skipped: 1
            }
        );
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn json_round_trips() {
        let r = sample();
        let back: Report = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn text_lists_every_check() {
        let text = sample().to_text(false);
        assert!(text.contains("pass    a.first\n"));
        assert!(text.contains("skipped b.second: not applicable\n"));
        assert!(text.contains("fail    c.third: residual x1\n"));
        assert!(text.contains(&format!("seed: {}", crate::manifest::DEFAULT_SEED)));
    }
}
