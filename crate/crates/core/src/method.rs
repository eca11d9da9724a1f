//! A single name for every clustering method the crate can run.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dendrogram::Dendrogram;
use crate::linkage::{run_standard, BuiltinLinkage, RunTrace};
use crate::metric::FiniteMetricSpace;
use crate::unchaining::{run_almost_standard, sl_alpha, Condition, UnchainingError};

/// `sl`, `cl`, `al`, `exotic`, `sl-alpha:<alpha>` or
/// `almost-standard:<linkage>:<condition>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MethodSpec {
    Standard(BuiltinLinkage),
    AlmostStandard(BuiltinLinkage, Condition),
    SlAlpha(f64),
}

impl MethodSpec {
    pub fn run(&self, space: &FiniteMetricSpace) -> Result<(Dendrogram, RunTrace), UnchainingError> {
        match self {
            MethodSpec::Standard(l) => Ok(run_standard(space, l)?),
            MethodSpec::AlmostStandard(l, p) => run_almost_standard(space, l, p),
            MethodSpec::SlAlpha(alpha) => sl_alpha(space, *alpha),
        }
    }

    pub fn linkage(&self) -> BuiltinLinkage {
        match self {
            MethodSpec::Standard(l) | MethodSpec::AlmostStandard(l, _) => *l,
            MethodSpec::SlAlpha(_) => BuiltinLinkage::Sl,
        }
    }

    pub fn condition(&self) -> Option<Condition> {
        match self {
            MethodSpec::Standard(_) => None,
            MethodSpec::AlmostStandard(_, p) => Some(*p),
            MethodSpec::SlAlpha(alpha) => crate::unchaining::PAlpha::new(*alpha).ok().map(Condition::PAlpha),
        }
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodSpec::Standard(l) => write!(f, "{l}"),
            MethodSpec::AlmostStandard(l, p) => write!(f, "almost-standard:{l}:{p}"),
            MethodSpec::SlAlpha(alpha) => write!(f, "sl-alpha:{alpha}"),
        }
    }
}

impl FromStr for MethodSpec {
    type Err = UnchainingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(alpha) = s.strip_prefix("sl-alpha:") {
            let alpha: f64 = alpha
                .parse()
                .map_err(|_| UnchainingError::UnknownCondition(s.to_string()))?;
            crate::unchaining::PAlpha::new(alpha)?;
            return Ok(MethodSpec::SlAlpha(alpha));
        }
        if let Some(rest) = s.strip_prefix("almost-standard:") {
            let (l, p) = rest
                .split_once(':')
                .ok_or_else(|| UnchainingError::UnknownCondition(s.to_string()))?;
            return Ok(MethodSpec::AlmostStandard(l.parse()?, p.parse()?));
        }
        Ok(MethodSpec::Standard(s.parse()?))
    }
}

impl Serialize for MethodSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MethodSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
