//! Step-size sequences `λ_n ∈ (0, 1)` and regularization weights
//! `θ_n ∈ (0, 1/2)` for the anchored iterations, and their validation.
//!
//! The convergence conditions checked are
//!
//! * (i)   `θ_n` decreasing with `θ_n → 0`,
//! * (ii)  `Σ λ_n θ_n = ∞`,
//! * (iii) `((θ_{n−1}/θ_n) − 1) / (λ_n θ_n) → 0`.
//!
//! The additional clause `Σ λ_n < ∞` that usually accompanies (iii) cannot be
//! met together with (ii) when `θ_n < 1/2`; the validator always reports this
//! instead of checking it.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A pair of sequences indexed from `n = 1`.
pub trait Schedule: Send + Sync {
    fn lambda_at(&self, n: u64) -> f64;
    fn theta_at(&self, n: u64) -> f64;
}

/// `λ_n = λ₀ n^{−a}`, `θ_n = θ₀ n^{−b}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSchedule {
    pub lambda0: f64,
    pub a: f64,
    pub theta0: f64,
    pub b: f64,
}

impl Default for PowerSchedule {
    fn default() -> Self {
        Self {
            lambda0: 0.9,
            a: 0.5,
            theta0: 1e-3,
            b: 0.25,
        }
    }
}

impl PowerSchedule {
    pub fn new(lambda0: f64, a: f64, theta0: f64, b: f64) -> Result<Self> {
        let s = Self { lambda0, a, theta0, b };
        let problems = s.violations();
        if let Some(first) = problems.into_iter().next() {
            return Err(first);
        }
        Ok(s)
    }

    /// Every parameter-range violation, not just the first.
    pub fn violations(&self) -> Vec<Error> {
        let mut out = Vec::new();
        if !(self.lambda0 > 0.0 && self.lambda0 < 1.0) {
            out.push(Error::invalid("lambda0", format!("lambda_1 must lie in (0, 1), got {}", self.lambda0)));
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            out.push(Error::invalid("a", format!("must be >= 0, got {}", self.a)));
        }
        if !(self.theta0 > 0.0 && self.theta0 < 0.5) {
            out.push(Error::invalid("theta0", format!("theta_1 must lie in (0, 1/2), got {}", self.theta0)));
        }
        if !(self.b > 0.0 && self.b.is_finite()) {
            out.push(Error::invalid("b", format!("theta_n must strictly decrease (b > 0), got {}", self.b)));
        }
        out
    }

    pub fn lambda(&self, n: u64) -> Result<f64> {
        if n < 1 {
            return Err(Error::invalid("n", "sequences are indexed from 1"));
        }
        Ok(self.lambda_at(n))
    }

    pub fn theta(&self, n: u64) -> Result<f64> {
        if n < 1 {
            return Err(Error::invalid("n", "sequences are indexed from 1"));
        }
        Ok(self.theta_at(n))
    }

    /// Analytic verdicts backed by numeric evidence up to `horizon`.
    pub fn validate(&self, horizon: u64) -> Result<ScheduleReport> {
        let evidence = Evidence::collect(self, horizon)?;
        let sum_ab = self.a + self.b;
        let theta_ok = self.b > 0.0 && self.theta0 > 0.0 && self.theta0 < 0.5;
        let i = Verdict {
            condition: "(i) theta_n decreasing to 0",
            pass: theta_ok && evidence.theta_strictly_decreasing,
            method: Method::Analytic,
            horizon,
            formula: format!("theta_n = {} * n^-{}; b > 0 and theta0 in (0, 1/2)", short(self.theta0), short(self.b)),
        };
        let ii = Verdict {
            condition: "(ii) sum lambda_n theta_n = inf",
            pass: sum_ab <= 1.0,
            method: Method::Analytic,
            horizon,
            formula: format!(
                "lambda_n theta_n = {} * n^-{}; p-series diverges iff a + b = {} <= 1",
                short(self.lambda0 * self.theta0),
                short(sum_ab),
                short(sum_ab)
            ),
        };
        let iii = Verdict {
            condition: "(iii) ratio ((theta_{n-1}/theta_n) - 1)/(lambda_n theta_n) -> 0",
            pass: sum_ab < 1.0 && evidence.ratio_decreasing,
            method: Method::Analytic,
            horizon,
            formula: format!(
                "ratio ~ b/(lambda0 theta0) * n^(a+b-1) = {} * n^{}; vanishes iff a + b < 1",
                short(self.b / (self.lambda0 * self.theta0)),
                short(sum_ab - 1.0)
            ),
        };
        Ok(ScheduleReport::assemble(i, ii, iii, evidence))
    }
}

/// Up to 12 significant digits, without the binary noise of sums like
/// `0.8 + 0.4`.
fn short(v: f64) -> String {
    let s = format!("{v:.11e}");
    let parsed: f64 = s.parse().unwrap_or(v);
    format!("{parsed}")
}

impl Schedule for PowerSchedule {
    fn lambda_at(&self, n: u64) -> f64 {
        if self.a == 0.0 {
            self.lambda0
        } else {
            self.lambda0 * (n as f64).powf(-self.a)
        }
    }

    fn theta_at(&self, n: u64) -> f64 {
        self.theta0 * (n as f64).powf(-self.b)
    }
}

/// A schedule given by two closures.
pub struct FnSchedule<L, T> {
    pub lambda: L,
    pub theta: T,
}

impl<L, T> Schedule for FnSchedule<L, T>
where
    L: Fn(u64) -> f64 + Send + Sync,
    T: Fn(u64) -> f64 + Send + Sync,
{
    fn lambda_at(&self, n: u64) -> f64 {
        (self.lambda)(n)
    }

    fn theta_at(&self, n: u64) -> f64 {
        (self.theta)(n)
    }
}

/// Debug wrapper forcing `θ_n ≡ 0`: the anchored iteration degenerates to the
/// plain dual-space step `J x_{n+1} = J x_n − λ_n T x_n`.
pub struct Unregularized<S>(pub S);

impl<S: Schedule> Schedule for Unregularized<S> {
    fn lambda_at(&self, n: u64) -> f64 {
        self.0.lambda_at(n)
    }

    fn theta_at(&self, _n: u64) -> f64 {
        0.0
    }
}

/// Numeric validation for an arbitrary schedule. Divergence and limits are
/// judged from finite tables, so passing verdicts are evidence, not proof.
pub fn validate_numeric(schedule: &dyn Schedule, horizon: u64) -> Result<ScheduleReport> {
    let ev = Evidence::collect(schedule, horizon)?;
    let in_range = (1..=horizon.min(100_000)).all(|n| {
        let (l, t) = (schedule.lambda_at(n), schedule.theta_at(n));
        l > 0.0 && l < 1.0 && t > 0.0 && t < 0.5
    });
    let i = Verdict {
        condition: "(i) theta_n decreasing to 0",
        pass: in_range && ev.theta_strictly_decreasing,
        method: Method::Numeric,
        horizon,
        formula: "theta_{n+1} < theta_n on sampled n; lambda_n in (0,1), theta_n in (0,1/2)".into(),
    };
    let decades: Vec<f64> = ev.partial_sums.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let growing = match decades.as_slice() {
        [.., prev, last] => *last >= 0.95 * *prev,
        _ => false,
    };
    let ii = Verdict {
        condition: "(ii) sum lambda_n theta_n = inf",
        pass: growing,
        method: Method::Numeric,
        horizon,
        formula: "last-decade increment of the partial sum >= 0.95 x previous decade".into(),
    };
    let iii = Verdict {
        condition: "(iii) ratio ((theta_{n-1}/theta_n) - 1)/(lambda_n theta_n) -> 0",
        pass: ev.ratio_decreasing,
        method: Method::Numeric,
        horizon,
        formula: "ratio strictly decreasing across decades".into(),
    };
    Ok(ScheduleReport::assemble(i, ii, iii, ev))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Method {
    Analytic,
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub condition: &'static str,
    pub pass: bool,
    pub method: Method,
    pub horizon: u64,
    pub formula: String,
}

/// The `Σλ_n < ∞` clause is incompatible with (ii) whenever `θ_n < 1/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummabilityConflict {
    pub jointly_satisfiable: bool,
    pub chain: String,
    pub lambda_partial_sum: f64,
    pub horizon: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScheduleReport {
    pub theta_decreasing: Verdict,
    pub divergent_sum: Verdict,
    pub ratio_limit: Verdict,
    pub summability: SummabilityConflict,
    /// `(N, Σ_{n≤N} λ_n θ_n)` at decades up to the horizon.
    pub partial_sums: Vec<(u64, f64)>,
    /// `(n, ((θ_{n−1}/θ_n) − 1)/(λ_n θ_n))` at decades up to the horizon.
    pub ratio_samples: Vec<(u64, f64)>,
}

impl ScheduleReport {
    fn assemble(i: Verdict, ii: Verdict, iii: Verdict, ev: Evidence) -> Self {
        let chain = "theta_n < 1/2  =>  lambda_n theta_n <= (1/2) lambda_n  =>  \
                     sum lambda_n theta_n <= (1/2) sum lambda_n; \
                     so sum lambda_n < inf forces sum lambda_n theta_n < inf, contradicting (ii)"
            .to_string();
        Self {
            theta_decreasing: i,
            divergent_sum: ii,
            ratio_limit: iii,
            summability: SummabilityConflict {
                jointly_satisfiable: false,
                chain,
                lambda_partial_sum: ev.lambda_sum,
                horizon: ev.horizon,
            },
            partial_sums: ev.partial_sums,
            ratio_samples: ev.ratio_samples,
        }
    }

    /// (i), (ii) and the limit clause of (iii) all pass.
    pub fn admissible(&self) -> bool {
        self.theta_decreasing.pass && self.divergent_sum.pass && self.ratio_limit.pass
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for v in [&self.theta_decreasing, &self.divergent_sum, &self.ratio_limit] {
            let _ = writeln!(
                out,
                "[{}] {} ({:?}, horizon {}): {}",
                if v.pass { "PASS" } else { "FAIL" },
                v.condition,
                v.method,
                v.horizon,
                v.formula
            );
        }
        let _ = writeln!(
            out,
            "[UNSATISFIABLE] sum lambda_n < inf together with (ii): {} (partial sum of lambda_n to {} is {:.6e})",
            self.summability.chain, self.summability.horizon, self.summability.lambda_partial_sum
        );
        let _ = writeln!(out, "partial sums of lambda_n theta_n:");
        for (n, s) in &self.partial_sums {
            let _ = writeln!(out, "  N = {n:>10}  {s:.6e}");
        }
        let _ = writeln!(out, "condition (iii) ratio:");
        for (n, r) in &self.ratio_samples {
            let _ = writeln!(out, "  n = {n:>10}  {r:.6e}");
        }
        out
    }
}

struct Evidence {
    horizon: u64,
    theta_strictly_decreasing: bool,
    ratio_decreasing: bool,
    partial_sums: Vec<(u64, f64)>,
    ratio_samples: Vec<(u64, f64)>,
    lambda_sum: f64,
}

fn checkpoints(horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = std::iter::successors(Some(10u64), |n| n.checked_mul(10))
        .take_while(|&n| n <= horizon)
        .collect();
    if out.last() != Some(&horizon) {
        out.push(horizon);
    }
    out
}

impl Evidence {
    fn collect(s: &(impl Schedule + ?Sized), horizon: u64) -> Result<Self> {
        if horizon < 10 {
            return Err(Error::invalid("horizon", format!("need at least 10 terms, got {horizon}")));
        }
        let marks = checkpoints(horizon);
        let mut partial_sums = Vec::with_capacity(marks.len());
        let mut sum = 0.0;
        let mut lambda_sum = 0.0;
        let mut next = 0;
        for n in 1..=horizon {
            let l = s.lambda_at(n);
            sum += l * s.theta_at(n);
            lambda_sum += l;
            if n == marks[next] {
                partial_sums.push((n, sum));
                next += 1;
            }
        }
        // logarithmic sampling of strict decrease
        let mut probes: Vec<u64> = Vec::new();
        let mut n = 1u64;
        while n < horizon {
            probes.push(n);
            n = (n + 1).max((n as f64 * 1.1) as u64);
        }
        let theta_strictly_decreasing = probes.iter().all(|&n| s.theta_at(n + 1) < s.theta_at(n));
        let ratio_samples: Vec<(u64, f64)> = marks
            .iter()
            .map(|&n| {
                let (tp, t, l) = (s.theta_at(n - 1), s.theta_at(n), s.lambda_at(n));
                (n, ((tp / t) - 1.0) / (l * t))
            })
            .collect();
        let ratio_decreasing = ratio_samples.windows(2).all(|w| w[1].1 < w[0].1);
        Ok(Self {
            horizon,
            theta_strictly_decreasing,
            ratio_decreasing,
            partial_sums,
            ratio_samples,
            lambda_sum,
        })
    }
}
