use std::fmt;

use crate::algebra::Element;

/// Outcome of an exact identity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Verified,
    Counterexample {
        lhs: String,
        rhs: String,
        /// First term (in display order) of `lhs - rhs`.
        witness: String,
    },
}

impl Verdict {
    pub fn compare(lhs: &Element, rhs: &Element) -> Verdict {
        if lhs == rhs {
            return Verdict::Verified;
        }
        let diff = lhs - rhs;
        let witness = diff
            .sorted_terms()
            .first()
            .map(|(m, c)| format!("{c}*{}", m.render(diff.table())))
            .unwrap_or_else(|| "tables differ".to_string());
        Verdict::Counterexample {
            lhs: lhs.render(),
            rhs: rhs.render(),
            witness,
        }
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Verified => write!(f, "verified"),
            Verdict::Counterexample { witness, .. } => {
                write!(f, "counterexample (first difference {witness})")
            }
        }
    }
}
