//! Diagnostic flags attached to profiles, norms and experiment outcomes.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// Spectral content close to the band edge is not negligible.
    ResolutionWarning,
    /// Values beyond the admissible support radius are not negligible.
    TailBeyondSupport,
    /// The node at the origin was dropped from a singular weighted integral.
    OriginExcluded,
    /// Dyadic sums were cut at the edges of the resolvable band.
    BandTruncated,
    /// Successive iterate differences did not contract.
    NonContraction,
    /// The coefficient smallness check failed; iteration stopped early.
    SmallnessViolated,
    /// A blow-up signal was raised during time stepping.
    BlowupSignal,
    /// The time cap was reached without a blow-up signal.
    Censored,
    /// Blow-up times on the refinement ladder disagree beyond tolerance.
    Unconfirmed,
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        f.write_str(&s)
    }
}

/// Ordered set of flags.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Flags(BTreeSet<Flag>);

impl Flags {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, flag: Flag) {
        self.0.insert(flag);
    }

    pub fn contains(&self, flag: Flag) -> bool {
        self.0.contains(&flag)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn merge(&mut self, other: &Flags) {
        self.0.extend(other.0.iter().copied());
    }

    pub fn iter(&self) -> impl Iterator<Item = Flag> + '_ {
        self.0.iter().copied()
    }
}

impl FromIterator<Flag> for Flags {
    fn from_iter<I: IntoIterator<Item = Flag>>(iter: I) -> Self {
        Flags(iter.into_iter().collect())
    }
}
