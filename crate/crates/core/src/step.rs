//! One stochastic central-path step.
//!
//! The target change of `μ = xs` is replaced by an unbiased sparse surrogate,
//! pushed through the maintained projection, and resampled until the relative
//! step size is small.

use rand::Rng;

use crate::error::{Error, Result};
use crate::maintenance::ProjectionMaintainer;
use crate::potential::log_n;

pub const DEFAULT_MAX_RESAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseDirection {
    /// `δ̃_μ`, zero off the support.
    pub values: Vec<f64>,
    pub support: Vec<usize>,
    /// The keep probabilities `p_i` (all 1 for a degenerate zero input).
    pub probs: Vec<f64>,
    /// Draws rejected before this one was accepted.
    pub resample_count: usize,
}

impl SparseDirection {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Every `p_i = 1`, so the draw is deterministic.
    pub fn is_saturated(&self) -> bool {
        self.probs.iter().all(|&p| p >= 1.0)
    }
}

/// `p_i = min(1, k (δ_i² / Σδ² + 1/n))`.
pub fn keep_probabilities(delta_mu: &[f64], k: f64) -> Vec<f64> {
    let n = delta_mu.len() as f64;
    let total: f64 = delta_mu.iter().map(|d| d * d).sum();
    if total == 0.0 {
        return vec![1.0; delta_mu.len()];
    }
    delta_mu
        .iter()
        .map(|d| (k * (d * d / total + 1.0 / n)).min(1.0))
        .collect()
}

/// Keeps coordinate `i` with probability `p_i` and rescales it by `1/p_i`,
/// so the result is unbiased. An all-zero input gives an empty support.
pub fn sample_sparse_direction<R: Rng + ?Sized>(delta_mu: &[f64], k: f64, rng: &mut R) -> Result<SparseDirection> {
    if !(k >= 1.0) {
        return Err(Error::Domain(format!("sampling rate k must be at least 1, got {k}")));
    }
    let probs = keep_probabilities(delta_mu, k);
    let mut values = vec![0.0; delta_mu.len()];
    let mut support = Vec::new();
    if delta_mu.iter().any(|&d| d != 0.0) {
        for (i, (&d, &p)) in delta_mu.iter().zip(&probs).enumerate() {
            // Saturated coordinates consume no randomness.
            if p >= 1.0 || rng.gen::<f64>() < p {
                values[i] = d / p;
                support.push(i);
            }
        }
    }
    Ok(SparseDirection {
        values,
        support,
        probs,
        resample_count: 0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub x_new: Vec<f64>,
    pub s_new: Vec<f64>,
    pub delta_x: Vec<f64>,
    pub delta_s: Vec<f64>,
    pub xbar: Vec<f64>,
    pub sbar: Vec<f64>,
    pub direction: SparseDirection,
    /// `‖δ̃_μ / (x̄ s̄)‖_∞`, recorded but not enforced.
    pub mu_ratio_inf: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOptions {
    pub k: f64,
    pub max_resamples: usize,
    /// Accept a draw once `‖δ̃_x/x̄‖_∞` and `‖δ̃_s/s̄‖_∞` are both at most this.
    /// `None` means [`step_bound`].
    pub bound: Option<f64>,
}

impl StepOptions {
    pub fn new(k: f64) -> Self {
        StepOptions {
            k,
            max_resamples: DEFAULT_MAX_RESAMPLES,
            bound: None,
        }
    }
}

/// Relative step bound `1 / (100 ln n)`.
pub fn step_bound(n: usize) -> f64 {
    1.0 / (100.0 * log_n(n))
}

pub fn stochastic_step<R: Rng + ?Sized>(
    mp: &mut ProjectionMaintainer,
    x: &[f64],
    s: &[f64],
    delta_mu: &[f64],
    options: StepOptions,
    rng: &mut R,
) -> Result<StepResult> {
    let n = mp.n();
    for (name, v) in [("x", x), ("s", s), ("delta_mu", delta_mu)] {
        if v.len() != n {
            return Err(Error::dims(step_op(name), n, v.len()));
        }
    }
    if let Some(index) = x.iter().chain(s).position(|&v| !(v > 0.0)) {
        return Err(Error::PositivityLost { index: index % n });
    }

    let w: Vec<f64> = x.iter().zip(s).map(|(xi, si)| xi / si).collect();
    let vtilde = mp.update(&w)?;
    let mut xbar = Vec::with_capacity(n);
    let mut sbar = Vec::with_capacity(n);
    let mut root_mu = Vec::with_capacity(n);
    for i in 0..n {
        let ratio = (vtilde[i] / w[i]).sqrt();
        xbar.push(x[i] * ratio);
        sbar.push(s[i] / ratio);
        root_mu.push((x[i] * s[i]).sqrt());
    }

    if delta_mu.iter().all(|&d| d == 0.0) {
        return Ok(StepResult {
            x_new: x.to_vec(),
            s_new: s.to_vec(),
            delta_x: vec![0.0; n],
            delta_s: vec![0.0; n],
            xbar,
            sbar,
            direction: sample_sparse_direction(delta_mu, options.k.max(1.0), rng)?,
            mu_ratio_inf: 0.0,
        });
    }

    let bound = options.bound.unwrap_or_else(|| step_bound(n));
    let mut h = vec![0.0; n];
    for attempt in 0..=options.max_resamples {
        let mut direction = sample_sparse_direction(delta_mu, options.k, rng)?;
        direction.resample_count = attempt;
        for (hi, (&d, &rm)) in h.iter_mut().zip(direction.values.iter().zip(&root_mu)) {
            *hi = d / rm;
        }
        let p = mp.query(&h)?;
        let mut delta_x = Vec::with_capacity(n);
        let mut delta_s = Vec::with_capacity(n);
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let ds = sbar[i] / root_mu[i] * p[i];
            let dx = direction.values[i] / sbar[i] - xbar[i] / root_mu[i] * p[i];
            worst = worst.max((ds / sbar[i]).abs()).max((dx / xbar[i]).abs());
            delta_x.push(dx);
            delta_s.push(ds);
        }
        if worst.is_finite() && worst <= bound {
            let x_new: Vec<f64> = x.iter().zip(&delta_x).map(|(a, b)| a + b).collect();
            let s_new: Vec<f64> = s.iter().zip(&delta_s).map(|(a, b)| a + b).collect();
            if let Some(index) = x_new.iter().chain(&s_new).position(|&v| !(v > 0.0)) {
                return Err(Error::PositivityLost { index: index % n });
            }
            let mu_ratio_inf = direction
                .values
                .iter()
                .zip(&root_mu)
                .map(|(d, rm)| (d / (rm * rm)).abs())
                .fold(0.0, f64::max);
            return Ok(StepResult {
                x_new,
                s_new,
                delta_x,
                delta_s,
                xbar,
                sbar,
                direction,
                mu_ratio_inf,
            });
        }
        if direction.is_saturated() {
            // A deterministic draw would fail the same way again.
            return Err(Error::StepUnbounded { resamples: attempt });
        }
    }
    Err(Error::StepUnbounded {
        resamples: options.max_resamples,
    })
}

fn step_op(name: &str) -> &'static str {
    match name {
        "x" => "stochastic_step (x)",
        "s" => "stochastic_step (s)",
        _ => "stochastic_step (delta_mu)",
    }
}
