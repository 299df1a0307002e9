//! Centrality and maintenance potentials.
//!
//! [`CoshPotential`] measures how far `μ/t` is from the all-ones vector and
//! steers the outer loop. [`SoftErrorPotential`] and [`WeightSchedule`] are the
//! ingredients of the amortization argument behind the projection maintainer;
//! the maintainer only uses the schedule to weight its cost counters.

use crate::error::{Error, Result};

/// Arguments of `cosh`/`sinh` beyond this magnitude are reported as divergence.
pub const COSH_CLAMP: f64 = 700.0;

/// Natural log of `n`, with `n` clamped to at least 3 so the result is ≥ 1.
pub fn log_n(n: usize) -> f64 {
    (n.max(3) as f64).ln()
}

/// `Φ_λ(r) = Σ cosh(λ r_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoshPotential {
    lambda: f64,
}

impl CoshPotential {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!("lambda must be positive and finite, got {lambda}")));
        }
        Ok(CoshPotential { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn scaled<'a>(&self, r: &'a [f64]) -> impl Iterator<Item = Result<f64>> + 'a {
        let lambda = self.lambda;
        r.iter().enumerate().map(move |(index, &ri)| {
            let argument = lambda * ri;
            if argument.abs() > COSH_CLAMP || !argument.is_finite() {
                Err(Error::Divergence { index, argument })
            } else {
                Ok(argument)
            }
        })
    }

    pub fn value(&self, r: &[f64]) -> Result<f64> {
        self.scaled(r).map(|z| z.map(f64::cosh)).sum()
    }

    /// Component `i` is `λ sinh(λ r_i)`.
    pub fn gradient(&self, r: &[f64]) -> Result<Vec<f64>> {
        self.scaled(r).map(|z| z.map(|z| self.lambda * z.sinh())).collect()
    }

    /// `‖v‖²` in the Hessian norm at `r`: `Σ λ² cosh(λ r_i) v_i²`.
    pub fn hessian_norm_sq(&self, r: &[f64], v: &[f64]) -> Result<f64> {
        let l2 = self.lambda * self.lambda;
        self.scaled(r)
            .zip(v)
            .map(|(z, vi)| z.map(|z| l2 * z.cosh() * vi * vi))
            .sum()
    }
}

pub fn phi(p: &CoshPotential, r: &[f64]) -> Result<f64> {
    p.value(r)
}

pub fn grad_phi(p: &CoshPotential, r: &[f64]) -> Result<Vec<f64>> {
    p.gradient(r)
}

/// Piecewise-quadratic plateau `ψ`: quadratic up to `ε`, concave back up to
/// the plateau value `ε` at `2ε`, flat afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftErrorPotential {
    eps_mp: f64,
}

impl SoftErrorPotential {
    pub fn new(eps_mp: f64) -> Result<Self> {
        if !(eps_mp > 0.0 && eps_mp < 0.25) {
            return Err(Error::Domain(format!("eps_mp must lie in (0, 1/4), got {eps_mp}")));
        }
        Ok(SoftErrorPotential { eps_mp })
    }

    pub fn eps_mp(&self) -> f64 {
        self.eps_mp
    }

    pub fn value(&self, x: f64) -> f64 {
        let e = self.eps_mp;
        let a = x.abs();
        if a <= e {
            a * a / (2.0 * e)
        } else if a <= 2.0 * e {
            e - (2.0 * e - a).powi(2) / (2.0 * e)
        } else {
            e
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let e = self.eps_mp;
        let a = x.abs();
        if a <= e {
            x / e
        } else if a <= 2.0 * e {
            x.signum() * (2.0 * e - a) / e
        } else {
            0.0
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let e = self.eps_mp;
        let a = x.abs();
        if a <= e {
            1.0 / e
        } else if a <= 2.0 * e {
            -1.0 / e
        } else {
            0.0
        }
    }
}

pub fn psi(p: &SoftErrorPotential, x: f64) -> f64 {
    p.value(x)
}

pub fn psi_prime(p: &SoftErrorPotential, x: f64) -> f64 {
    p.derivative(x)
}

pub const DEFAULT_OMEGA: f64 = 2.373;
pub const DEFAULT_BATCH_EXPONENT: f64 = 1.0 / 3.0;

/// Per-rank weights `g_1 ≥ g_2 ≥ … ≥ g_n`. A batched update of rank `r`
/// is charged `r · g_r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSchedule {
    n: usize,
    a: f64,
    omega: f64,
}

impl WeightSchedule {
    /// Requires `a ∈ (0,1)`, `ω ∈ [2,3]` and `ω ≤ 3 − a` (otherwise the
    /// weights would increase past `n^a`).
    pub fn new(n: usize, a: f64, omega: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("weight schedule needs n ≥ 1".into()));
        }
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::Domain(format!("batch exponent a must lie in (0,1), got {a}")));
        }
        if !(2.0..=3.0).contains(&omega) {
            return Err(Error::Domain(format!("omega must lie in [2,3], got {omega}")));
        }
        if omega > 3.0 - a {
            return Err(Error::Domain(format!("omega = {omega} exceeds 3 - a = {}", 3.0 - a)));
        }
        Ok(WeightSchedule { n, a, omega })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn batch_exponent(&self) -> f64 {
        self.a
    }

    /// `g_i` for `1 ≤ i ≤ n` (1-based).
    pub fn weight(&self, i: usize) -> f64 {
        debug_assert!(i >= 1 && i <= self.n);
        let n = self.n as f64;
        let threshold = n.powf(self.a);
        if (i as f64) < threshold {
            n.powf(-self.a)
        } else {
            let tail = (self.omega - 2.0) / (1.0 - self.a);
            (i as f64).powf(tail - 1.0) * n.powf(-self.a * tail)
        }
    }
}

pub fn g_weight(sched: &WeightSchedule, i: usize) -> f64 {
    sched.weight(i)
}
