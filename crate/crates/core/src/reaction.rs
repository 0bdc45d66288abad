//! Cut-off KPP reaction terms.
//!
//! `f_c(u) = f(u)` for `u > u_c` and `0` otherwise. The threshold itself
//! takes the zero branch, so the reaction-off region is closed.

use std::fmt;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ReactionKind {
    /// `f(u) = u(1 - u)`.
    Fisher,
    /// `f(u) = Σ c_k u^k`, with `coeffs[0]` multiplying `u`.
    Poly { coeffs: Vec<f64> },
}

impl fmt::Display for ReactionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReactionKind::Fisher => f.write_str("fisher"),
            ReactionKind::Poly { .. } => f.write_str("poly"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReactionSpec {
    pub kind: ReactionKind,
    pub u_c: f64,
    fprime_at_one: f64,
    f_c_plus: f64,
}

/// One failed KPP condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KppViolation {
    pub condition: &'static str,
    /// Sample point where the condition failed first (if sampled).
    pub at: Option<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KppReport {
    pub n_samples: usize,
    pub violations: Vec<KppViolation>,
}

impl KppReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Convert a failing report into an error naming every failed condition.
    pub fn into_result(self) -> Result<()> {
        if self.passed() {
            return Ok(());
        }
        let msg = self
            .violations
            .iter()
            .map(|v| match v.at {
                Some(u) => format!("{} (u={u:.4}, value={:.3e})", v.condition, v.value),
                None => format!("{} (value={:.3e})", v.condition, v.value),
            })
            .collect::<Vec<_>>()
            .join("; ");
        Err(Error::NotKpp(msg))
    }
}

impl ReactionSpec {
    pub fn fisher(u_c: f64) -> Result<Self> {
        Self::new(ReactionKind::Fisher, u_c)
    }

    pub fn poly(coeffs: Vec<f64>, u_c: f64) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(invalid("poly_coeffs", "need at least one finite coefficient"));
        }
        Self::new(ReactionKind::Poly { coeffs }, u_c)
    }

    /// Build without checking the KPP conditions; see [`Self::validate_kpp`].
    pub fn new(kind: ReactionKind, u_c: f64) -> Result<Self> {
        if !(u_c > 0.0 && u_c < 1.0) {
            return Err(invalid("u_c", format!("{u_c} not in (0, 1)")));
        }
        let mut spec = Self {
            kind,
            u_c,
            fprime_at_one: 0.0,
            f_c_plus: 0.0,
        };
        spec.fprime_at_one = spec.fprime(1.0);
        spec.f_c_plus = spec.f(u_c);
        Ok(spec)
    }

    /// Same reaction with another threshold.
    pub fn with_uc(&self, u_c: f64) -> Result<Self> {
        Self::new(self.kind.clone(), u_c)
    }

    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        match &self.kind {
            ReactionKind::Fisher => u * (1.0 - u),
            ReactionKind::Poly { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| (acc + c) * u),
        }
    }

    pub fn fprime(&self, u: f64) -> f64 {
        match &self.kind {
            ReactionKind::Fisher => 1.0 - 2.0 * u,
            ReactionKind::Poly { coeffs } => coeffs
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (k, c)| acc * u + (k + 1) as f64 * c),
        }
    }

    /// The cut-off reaction `f_c`.
    #[inline]
    pub fn eval_fc(&self, u: f64) -> f64 {
        if u > self.u_c {
            self.f(u)
        } else {
            0.0
        }
    }

    pub fn fprime_at_one(&self) -> f64 {
        self.fprime_at_one
    }

    /// `f(u_c)`, the right limit of `f_c` at the threshold.
    pub fn f_c_plus(&self) -> f64 {
        self.f_c_plus
    }

    /// Largest value of `f'` on `[0, 1]`, sampled; bounds the reaction term
    /// in explicit time-step limits.
    pub fn max_fprime(&self) -> f64 {
        (0..=1000)
            .map(|i| self.fprime(i as f64 / 1000.0))
            .fold(f64::NEG_INFINITY, f64::max)
            .max(0.0)
    }

    /// Check `f(0) = f(1) = 0`, `f'(0) = 1`, `f'(1) < 0`, `0 < f(u) ≤ u` on
    /// `(0, 1)` and `f < 0` on `(1, ∞)` on a grid of `n_samples` points.
    pub fn validate_kpp(&self, n_samples: usize) -> Result<KppReport> {
        if n_samples < 100 {
            return Err(invalid("n_samples", "must be at least 100"));
        }
        const TOL: f64 = 1e-10;
        let mut violations = Vec::new();
        let mut push = |condition, at, value| violations.push(KppViolation { condition, at, value });

        let f0 = self.f(0.0);
        if f0.abs() > TOL {
            push("f(0) = 0", None, f0);
        }
        let f1 = self.f(1.0);
        if f1.abs() > TOL {
            push("f(1) = 0", None, f1);
        }
        let h = 1e-6;
        let d0 = (self.f(h) - self.f(-h)) / (2.0 * h);
        if (d0 - 1.0).abs() > 1e-6 {
            push("f'(0) = 1", None, d0);
        }
        let d1 = (self.f(1.0 + h) - self.f(1.0 - h)) / (2.0 * h);
        if !(d1 < 0.0) {
            push("f'(1) < 0", None, d1);
        }

        let n = n_samples;
        let interior = (1..n).map(|i| i as f64 / n as f64);
        if let Some(u) = interior.clone().find(|&u| !(self.f(u) > 0.0)) {
            push("f(u) > 0 on (0,1)", Some(u), self.f(u));
        }
        if let Some(u) = interior.clone().find(|&u| self.f(u) > u * (1.0 + TOL)) {
            push("f(u) <= u on (0,1)", Some(u), self.f(u) - u);
        }
        // (1, ∞) sampled on (1, 10].
        if let Some(u) = (1..=n)
            .map(|i| 1.0 + 9.0 * i as f64 / n as f64)
            .find(|&u| !(self.f(u) < 0.0))
        {
            push("f(u) < 0 on (1,inf)", Some(u), self.f(u));
        }
        Ok(KppReport {
            n_samples,
            violations,
        })
    }
}
