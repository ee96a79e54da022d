use std::fmt;

/// Outcome of a single named verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// Carries a serialized witness (usually a nonzero residual).
    Fail(String),
    Skipped(String),
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail(_) => "fail",
            Status::Skipped(_) => "skipped",
        }
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Status::Fail(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub status: Status,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            status: Status::Pass,
        }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            status: Status::Fail(witness.into()),
        }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            status: Status::Skipped(reason.into()),
        }
    }

    /// Pass iff `residual` renders as the zero polynomial.
    pub fn zero_residual(name: impl Into<String>, residual: &crate::superalg::SuperPoly) -> Check {
        if residual.is_zero() {
            Check::pass(name)
        } else {
            Check::fail(name, format!("residual {residual}"))
        }
    }

    pub fn from_result(name: impl Into<String>, r: crate::Result<Check>) -> Check {
        let name = name.into();
        match r {
            Ok(c) => c,
            Err(e) => Check::fail(name, format!("error: {e}")),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.status {
            Status::Pass => write!(f, "{}: pass", self.name),
            Status::Fail(w) => write!(f, "{}: fail ({w})", self.name),
            Status::Skipped(r) => write!(f, "{}: skipped ({r})", self.name),
        }
    }
}

/// Fold a sequence of per-item results into one check that fails on the first
/// offending item.
pub fn all_zero(
    name: impl Into<String>,
    residuals: impl IntoIterator<Item = crate::Result<crate::superalg::SuperPoly>>,
    mut describe: impl FnMut(usize) -> String,
) -> Check {
    let name = name.into();
    for (k, r) in residuals.into_iter().enumerate() {
        match r {
            Ok(res) if res.is_zero() => {}
            Ok(res) => return Check::fail(name, format!("{}: residual {res}", describe(k))),
            Err(e) => return Check::fail(name, format!("{}: error: {e}", describe(k))),
        }
    }
    Check::pass(name)
}
