use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Which context channels are fused into the encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "NONE")]
    None,
    #[serde(rename = "RAW_BUGS")]
    RawBugs,
    #[serde(rename = "FILTERED_BUGS")]
    FilteredBugs,
    #[serde(rename = "PATTERNS")]
    Patterns,
    #[serde(rename = "BUGS_AND_PATTERNS")]
    BugsAndPatterns,
}

impl Variant {
    /// Report column order.
    pub const ALL: [Variant; 5] = [
        Variant::None,
        Variant::RawBugs,
        Variant::FilteredBugs,
        Variant::Patterns,
        Variant::BugsAndPatterns,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::None => "NONE",
            Variant::RawBugs => "RAW_BUGS",
            Variant::FilteredBugs => "FILTERED_BUGS",
            Variant::Patterns => "PATTERNS",
            Variant::BugsAndPatterns => "BUGS_AND_PATTERNS",
        }
    }

    pub fn uses_bugs(self) -> bool {
        matches!(self, Variant::RawBugs | Variant::FilteredBugs | Variant::BugsAndPatterns)
    }

    /// Bug warnings pass through the trained filter first.
    pub fn filters_bugs(self) -> bool {
        matches!(self, Variant::FilteredBugs | Variant::BugsAndPatterns)
    }

    pub fn uses_patterns(self) -> bool {
        matches!(self, Variant::Patterns | Variant::BugsAndPatterns)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Variant::ALL.iter().map(|v| v.as_str()).collect();
                Error::Config(format!("unknown variant `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_error() {
        for v in Variant::ALL {
            assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
        }
        let msg = "BUGS".parse::<Variant>().unwrap_err().to_string();
        for v in Variant::ALL {
            assert!(msg.contains(v.as_str()), "{msg}");
        }
    }

    #[test]
    fn channel_flags() {
        assert!(!Variant::None.uses_bugs() && !Variant::None.uses_patterns());
        assert!(Variant::RawBugs.uses_bugs() && !Variant::RawBugs.filters_bugs());
        assert!(Variant::BugsAndPatterns.filters_bugs() && Variant::BugsAndPatterns.uses_patterns());
        assert!(Variant::Patterns.uses_patterns() && !Variant::Patterns.uses_bugs());
    }
}
