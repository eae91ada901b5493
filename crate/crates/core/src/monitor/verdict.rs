//! Monitoring verdicts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// The monitoring state of a trace prefix. The first four are the
/// anticipatory verdicts; the rest are reported when the anticipatory
/// analysis is unavailable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// Satisfied now, but some continuation violates the property.
    Cs,
    /// Satisfied now and by every continuation.
    Ps,
    /// Violated now, but some continuation satisfies the property.
    Cv,
    /// Violated now and by every continuation.
    Pv,
    /// The prefix satisfies the property; continuations were not analysed.
    SatisfiedSoFar,
    /// The prefix violates the property; continuations were not analysed.
    ViolatedSoFar,
    /// A resource limit prevented a verdict.
    Inconclusive(String),
}

impl Verdict {
    pub fn code(&self) -> &'static str {
        match self {
            Verdict::Cs => "cs",
            Verdict::Ps => "ps",
            Verdict::Cv => "cv",
            Verdict::Pv => "pv",
            Verdict::SatisfiedSoFar => "satisfied-so-far",
            Verdict::ViolatedSoFar => "violated-so-far",
            Verdict::Inconclusive(_) => "inconclusive",
        }
    }

    /// Process exit status for scripting.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Cs => 10,
            Verdict::Ps => 0,
            Verdict::Cv => 11,
            Verdict::Pv => 1,
            _ => 2,
        }
    }

    pub fn is_anticipatory(&self) -> bool {
        matches!(self, Verdict::Cs | Verdict::Ps | Verdict::Cv | Verdict::Pv)
    }

    pub fn is_permanent(&self) -> bool {
        matches!(self, Verdict::Ps | Verdict::Pv)
    }

    /// Whether the prefix itself satisfies the property, when known.
    pub fn prefix_satisfied(&self) -> Option<bool> {
        match self {
            Verdict::Cs | Verdict::Ps | Verdict::SatisfiedSoFar => Some(true),
            Verdict::Cv | Verdict::Pv | Verdict::ViolatedSoFar => Some(false),
            Verdict::Inconclusive(_) => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Inconclusive(why) => write!(f, "inconclusive ({why})"),
            v => f.write_str(v.code()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown verdict `{0}`")]
pub struct UnknownVerdict(pub String);

impl FromStr for Verdict {
    type Err = UnknownVerdict;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "cs" => Verdict::Cs,
            "ps" => Verdict::Ps,
            "cv" => Verdict::Cv,
            "pv" => Verdict::Pv,
            "satisfied-so-far" => Verdict::SatisfiedSoFar,
            "violated-so-far" => Verdict::ViolatedSoFar,
            _ => match s.strip_prefix("inconclusive") {
                Some(rest) => Verdict::Inconclusive(rest.trim().trim_start_matches('(').trim_end_matches(')').to_string()),
                None => return Err(UnknownVerdict(s.to_string())),
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_round_trip() {
        for v in [Verdict::Cs, Verdict::Ps, Verdict::Cv, Verdict::Pv, Verdict::SatisfiedSoFar, Verdict::ViolatedSoFar] {
            assert_eq!(v.code().parse::<Verdict>().unwrap(), v);
            let j = serde_json::to_string(&v).unwrap();
            assert_eq!(serde_json::from_str::<Verdict>(&j).unwrap(), v);
        }
        assert_eq!(Verdict::Inconclusive("x".into()).to_string().parse::<Verdict>().unwrap(), Verdict::Inconclusive("x".into()));
        assert_eq!(Verdict::Cv.exit_code(), 11);
    }
}
