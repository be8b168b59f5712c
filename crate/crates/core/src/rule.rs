//! Stopping rules evaluated pathwise.
//!
//! Every rule here is a stopping time: it is computed from a single path by
//! scanning forward, so the same sampled path can be shared by several rules
//! and their times compared directly.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::Model;
use crate::state_set::StateSet;
use crate::window::LookAheadSet;

/// A stopping time value; `Never` also covers paths censored at the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Time {
    At(usize),
    Never,
}

impl Time {
    pub fn finite(self) -> Option<usize> {
        match self {
            Time::At(t) => Some(t),
            Time::Never => None,
        }
    }

    pub fn plus(self, k: usize) -> Time {
        match self {
            Time::At(t) => Time::At(t + k),
            Time::Never => Time::Never,
        }
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Time::At(t) => write!(f, "{t}"),
            Time::Never => write!(f, "inf"),
        }
    }
}

/// Random access to a single trajectory `Z_0, Z_1, ...`.
pub trait Trajectory {
    /// State at time `t`, or `None` past the horizon.
    fn state(&mut self, t: usize) -> Option<usize>;
}

/// A fixed, finite trajectory; mostly useful in tests.
impl Trajectory for Vec<usize> {
    fn state(&mut self, t: usize) -> Option<usize> {
        self.get(t).copied()
    }
}

/// First time `>= from` at which the path is in `target`.
pub fn first_entrance(path: &mut dyn Trajectory, target: &StateSet, from: Time) -> Time {
    let Time::At(mut t) = from else {
        return Time::Never;
    };
    while let Some(z) = path.state(t) {
        if target.contains(z) {
            return Time::At(t);
        }
        t += 1;
    }
    Time::Never
}

/// Discounted payoff `alpha(Z_0)...alpha(Z_{t-1}) g(Z_t)`.
///
/// A censored time contributes the payoff at the last available state.
pub fn discounted_payoff(model: &Model, path: &mut dyn Trajectory, time: Time, horizon: usize) -> f64 {
    let end = match time {
        Time::At(t) => t,
        Time::Never => horizon,
    };
    let mut factor = 1.0;
    for t in 0..end {
        match path.state(t) {
            Some(z) => factor *= model.alpha()[z],
            None => return 0.0,
        }
    }
    match path.state(end) {
        Some(z) => factor * model.payoff()[z],
        None => 0.0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StoppingRule {
    /// Stop at the deterministic time `n`.
    Fixed(usize),
    /// First entrance into `target` at or after the time given by `after`.
    FirstEntrance { target: StateSet, after: Box<StoppingRule> },
    /// Improved rule built from a base rule; see [`ImprovedRule`].
    Improved(Box<ImprovedRule>),
    Never,
}

impl StoppingRule {
    /// First entrance into `target` from time 0.
    pub fn entrance(target: StateSet) -> Self {
        StoppingRule::FirstEntrance {
            target,
            after: Box::new(StoppingRule::Fixed(0)),
        }
    }

    pub fn entrance_after(target: StateSet, after: StoppingRule) -> Self {
        StoppingRule::FirstEntrance {
            target,
            after: Box::new(after),
        }
    }

    /// Stopping time on `path`.
    pub fn evaluate(&self, path: &mut dyn Trajectory) -> Result<Time> {
        Ok(match self {
            StoppingRule::Fixed(n) => match path.state(*n) {
                Some(_) => Time::At(*n),
                None => Time::Never,
            },
            StoppingRule::FirstEntrance { target, after } => {
                let from = after.evaluate(path)?;
                first_entrance(path, target, from)
            }
            StoppingRule::Improved(rule) => rule.evaluate(path)?.result,
            StoppingRule::Never => Time::Never,
        })
    }

    /// True when the rule can stop without any further look at the path.
    pub fn is_immediate(&self) -> bool {
        matches!(self, StoppingRule::Fixed(0))
    }
}

impl fmt::Display for StoppingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StoppingRule::Fixed(n) => write!(f, "stop at {n}"),
            StoppingRule::FirstEntrance { target, after } => {
                write!(f, "first entrance into {target:?} after ({after})")
            }
            StoppingRule::Improved(rule) => write!(
                f,
                "{} of ({}) with D={}",
                if rule.capped { "improved" } else { "uncapped improvement" },
                rule.rho,
                rule.depths
            ),
            StoppingRule::Never => write!(f, "never"),
        }
    }
}

/// The improvement of a base rule `rho` with respect to `(B, D, sigma)`.
///
/// Writing `tau = tau_sigma(B^{*D})`: on `{rho = tau}` the improved rule is
/// `rho`. Otherwise `rho = n` and `Z_n` fails the look-ahead test first at
/// depth `j = min{i in D : Z_n not in B^{*D_{<=i}}}`; the improved rule then
/// waits for `B` from time `n + j`, but never beyond `tau`. The uncapped
/// variant drops that last cap.
#[derive(Debug, Clone, PartialEq)]
pub struct ImprovedRule {
    pub base: StateSet,
    pub depths: LookAheadSet,
    /// `B^{*D}`.
    pub improved: StateSet,
    /// `(i, B^{*D_{<=i}})` for each `i` in `D`, ascending.
    pub family: Vec<(usize, StateSet)>,
    pub sigma: StoppingRule,
    pub rho: StoppingRule,
    pub capped: bool,
}

/// All times involved in one evaluation of an [`ImprovedRule`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImprovedTimes {
    pub sigma: Time,
    pub rho: Time,
    /// `tau_sigma(B^{*D})`.
    pub cap: Time,
    pub result: Time,
}

impl ImprovedTimes {
    /// The first violated ordering property of the result, if any:
    /// `sigma <= result <= cap`, `rho <= result`, and `rho + 1 <= result`
    /// whenever `rho < cap`.
    pub fn ordering_violation(&self) -> Option<String> {
        let r = self.result;
        if self.sigma > r {
            return Some(format!("sigma={} > result={r}", self.sigma));
        }
        if r > self.cap {
            return Some(format!("result={r} > tau_sigma(B*D)={}", self.cap));
        }
        if self.rho > r {
            return Some(format!("rho={} > result={r}", self.rho));
        }
        if self.rho < self.cap && self.rho.plus(1) > r {
            return Some(format!("rho={} < cap but result={r} <= rho", self.rho));
        }
        None
    }
}

impl ImprovedRule {
    pub fn evaluate(&self, path: &mut dyn Trajectory) -> Result<ImprovedTimes> {
        let sigma = self.sigma.evaluate(path)?;
        let rho = self.rho.evaluate(path)?;
        let cap = first_entrance(path, &self.improved, sigma);
        if sigma > rho || rho > cap {
            return Err(Error::RuleOrderViolation(format!(
                "base rule must satisfy sigma <= rho <= tau_sigma(B*D), got {sigma} / {rho} / {cap}"
            )));
        }
        let result = match rho {
            Time::At(n) if rho != cap => {
                let z = path.state(n).expect("rho is finite, so Z_rho exists");
                if !self.base.contains(z) {
                    return Err(Error::RuleOrderViolation(format!("base rule stops outside B at state {z}")));
                }
                let j = self
                    .family
                    .iter()
                    .find(|(_, set)| !set.contains(z))
                    .map(|(i, _)| *i)
                    .expect("Z_rho lies outside B^{*D}, so some prefix set excludes it");
                let wait = first_entrance(path, &self.base, Time::At(n + j));
                if self.capped {
                    wait.min(cap)
                } else {
                    wait
                }
            }
            _ => rho,
        };
        Ok(ImprovedTimes {
            sigma,
            rho,
            cap,
            result,
        })
    }
}
