//! Look-ahead sets and per-iteration window schedules.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite nonempty set of positive look-ahead depths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LookAheadSet(BTreeSet<usize>);

impl LookAheadSet {
    pub fn new<I: IntoIterator<Item = usize>>(depths: I) -> Result<Self> {
        let set: BTreeSet<usize> = depths.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidParameter("look-ahead set is empty".into()));
        }
        if set.contains(&0) {
            return Err(Error::InvalidParameter("look-ahead depths must be at least 1".into()));
        }
        Ok(Self(set))
    }

    /// `{1, ..., k}`.
    pub fn initial_segment(k: usize) -> Result<Self> {
        Self::new(1..=k)
    }

    pub fn depths(&self) -> &BTreeSet<usize> {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn max(&self) -> usize {
        *self.0.last().expect("nonempty")
    }

    pub fn contains(&self, p: usize) -> bool {
        self.0.contains(&p)
    }

    pub fn is_initial_segment(&self) -> bool {
        self.0.len() == self.max()
    }

    /// The depths `l <= i`.
    pub fn up_to(&self, i: usize) -> BTreeSet<usize> {
        self.0.range(..=i).copied().collect()
    }

    /// This set with depth 1 added.
    pub fn with_one(&self) -> Self {
        let mut set = self.0.clone();
        set.insert(1);
        Self(set)
    }
}

impl fmt::Display for LookAheadSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Window used in each improvement iteration; the last entry repeats forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WindowSchedule {
    /// `{1, ..., k}` in every iteration.
    Constant(usize),
    /// `{1, ..., k_i}` in iteration `i`.
    Explicit(Vec<usize>),
    /// Arbitrary depth sets `D_i` in iteration `i`.
    GeneralSets(Vec<LookAheadSet>),
}

impl WindowSchedule {
    /// Window of the 1-based iteration `k`.
    pub fn window(&self, k: usize) -> LookAheadSet {
        let i = k.max(1) - 1;
        match self {
            WindowSchedule::Constant(w) => LookAheadSet::initial_segment(*w),
            WindowSchedule::Explicit(ws) => LookAheadSet::initial_segment(ws[i.min(ws.len() - 1)]),
            WindowSchedule::GeneralSets(sets) => return sets[i.min(sets.len() - 1)].clone(),
        }
        .expect("schedule validated on construction")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidParameter(msg.into()));
        match self {
            WindowSchedule::Constant(0) => bad("window size must be at least 1"),
            WindowSchedule::Explicit(ws) if ws.is_empty() => bad("empty window list"),
            WindowSchedule::Explicit(ws) if ws.contains(&0) => bad("window size must be at least 1"),
            WindowSchedule::GeneralSets(sets) if sets.is_empty() => bad("empty look-ahead set list"),
            _ => Ok(()),
        }
    }
}

impl FromStr for WindowSchedule {
    type Err = Error;

    /// Parses `"k"`, `"k1,k2,...,kn"` or `"D:{1,3,5};{1,2}"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_usize =
            |t: &str| -> Result<usize> { t.trim().parse().map_err(|_| Error::Parse(format!("bad window value {t:?}"))) };
        let schedule = if let Some(rest) = s.strip_prefix("D:") {
            let sets = rest
                .split(';')
                .map(|part| {
                    let inner = part
                        .trim()
                        .strip_prefix('{')
                        .and_then(|p| p.strip_suffix('}'))
                        .ok_or_else(|| Error::Parse(format!("expected {{...}}, got {part:?}")))?;
                    let depths = inner.split(',').map(parse_usize).collect::<Result<Vec<_>>>()?;
                    LookAheadSet::new(depths)
                })
                .collect::<Result<Vec<_>>>()?;
            WindowSchedule::GeneralSets(sets)
        } else if s.contains(',') {
            WindowSchedule::Explicit(s.split(',').map(parse_usize).collect::<Result<_>>()?)
        } else {
            WindowSchedule::Constant(parse_usize(s)?)
        };
        schedule.validate()?;
        Ok(schedule)
    }
}

impl fmt::Display for WindowSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowSchedule::Constant(k) => write!(f, "{k}"),
            WindowSchedule::Explicit(ws) => {
                let parts: Vec<String> = ws.iter().map(ToString::to_string).collect();
                write!(f, "{}", parts.join(","))
            }
            WindowSchedule::GeneralSets(sets) => {
                let parts: Vec<String> = sets.iter().map(ToString::to_string).collect();
                write!(f, "D:{}", parts.join(";"))
            }
        }
    }
}
