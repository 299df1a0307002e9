//! The outer central-path loop.
//!
//! `t` shrinks geometrically from 1. Each iteration asks for a change of `μ`
//! that tracks the new `t` and pushes down the cosh potential, takes one
//! stochastic step, and falls back to a deterministic re-centering when the
//! step is rejected or leaves the iterate badly off-center.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{norm2, project, Cholesky, Kernels, Matrix};
use crate::lp::{recover_solution, reformulate, LinearProgram, ReformulatedLP};
use crate::maintenance::{CounterSnapshot, MaintainerConfig, ProjectionMaintainer};
use crate::potential::{log_n, CoshPotential, DEFAULT_OMEGA};
use crate::step::{stochastic_step, StepOptions, StepResult, DEFAULT_MAX_RESAMPLES};

/// Dual matrix multiplication exponent used for the paper-mode batch size.
pub const ALPHA: f64 = 0.31389;

/// Centrality radius that every accepted iterate must satisfy.
pub const CENTRALITY_RADIUS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Constants exactly as in the analysis. Very small steps.
    Paper,
    #[default]
    Practical,
    /// Step size `Θ(1/√n)` with batch exponent `min(1/3, α)`.
    UltraShort,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Mode::Paper),
            "practical" => Ok(Mode::Practical),
            "ultra-short" => Ok(Mode::UltraShort),
            other => Err(Error::Domain(format!("unknown mode '{other}'"))),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Paper => "paper",
            Mode::Practical => "practical",
            Mode::UltraShort => "ultra-short",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub delta: f64,
    pub mode: Mode,
    /// Overrides the mode's batch exponent.
    pub a: Option<f64>,
    pub omega: f64,
    pub seed: u64,
    /// Defaults to the schedule's own iteration count plus one.
    pub max_iters: Option<usize>,
    pub max_resamples: usize,
    pub trace_path: Option<PathBuf>,
    /// Keep the trace rows in the report. Paper-mode runs can take tens of
    /// millions of iterations, so callers may turn this off.
    pub keep_trace: bool,
    pub deterministic_kernels: bool,
    pub refresh_every: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            delta: 1e-3,
            mode: Mode::Practical,
            a: None,
            omega: DEFAULT_OMEGA,
            seed: 0,
            max_iters: None,
            max_resamples: DEFAULT_MAX_RESAMPLES,
            trace_path: None,
            keep_trace: true,
            deterministic_kernels: true,
            refresh_every: 50,
        }
    }
}

impl SolverConfig {
    pub fn with_mode(mode: Mode) -> Self {
        SolverConfig {
            mode,
            ..Self::default()
        }
    }
}

/// Mode-derived constants for a problem with `n` variables (after reformulation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameters {
    pub n: usize,
    pub eps: f64,
    pub eps_mp: f64,
    pub k: f64,
    pub lambda: f64,
    pub a: f64,
    /// `min(δ/2, 1/λ)`, used for the reformulation and the stopping rule.
    pub delta_prime: f64,
    /// The loop runs while `t > δ'²/(2n)`.
    pub t_final: f64,
    /// Relative size limit for accepted stochastic steps, `0.4/λ`.
    pub step_bound: f64,
}

impl Parameters {
    pub fn derive(n: usize, mode: Mode, delta: f64, a: Option<f64>) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::Domain(format!("delta must lie in (0, 1], got {delta}")));
        }
        let ln = log_n(n);
        let root_n = (n as f64).sqrt();
        let (eps, eps_mp, k, lambda, default_a) = match mode {
            Mode::Paper => {
                let eps = 1.0 / (40_000.0 * ln);
                let eps_mp = 1.0 / 40_000.0;
                (eps, eps_mp, 1000.0 * eps * root_n * ln * ln / eps_mp, 40.0 * ln, ALPHA.min(2.0 / 3.0))
            }
            Mode::Practical | Mode::UltraShort => {
                let base = 1.0 / (40.0 * ln);
                let eps = if mode == Mode::UltraShort { base.min(1.0 / root_n) } else { base };
                let eps_mp = 1.0 / 40.0;
                let a = if mode == Mode::UltraShort { (1.0f64 / 3.0).min(ALPHA) } else { 1.0 / 3.0 };
                (eps, eps_mp, (10.0 * eps * root_n * ln * ln / eps_mp).ceil(), 10.0 * ln, a)
            }
        };
        let a = a.unwrap_or(default_a);
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::Domain(format!("batch exponent a must lie in (0, 1), got {a}")));
        }
        let delta_prime = (delta / 2.0).min(1.0 / lambda);
        // 0.4/λ: exactly 1/(100 ln n) with the paper-mode λ, and the same
        // fraction of the potential's 1/λ radius in the other modes.
        let step_bound = match mode {
            Mode::Paper => crate::step::step_bound(n),
            Mode::Practical | Mode::UltraShort => 0.4 / lambda,
        };
        Ok(Parameters {
            n,
            eps,
            eps_mp,
            k: k.max(1.0),
            lambda,
            a,
            delta_prime,
            t_final: delta_prime * delta_prime / (2.0 * n as f64),
            step_bound,
        })
    }

    /// `t_new / t`.
    pub fn shrink(&self) -> f64 {
        1.0 - self.eps / (3.0 * (self.n as f64).sqrt())
    }

    /// Exact number of iterations the schedule takes from `t = 1`.
    pub fn scheduled_iterations(&self) -> usize {
        let shrink = self.shrink();
        let mut t = 1.0;
        let mut count = 0;
        // Replays the loop's own arithmetic so the count matches bit for bit.
        while t > self.t_final {
            t *= shrink;
            count += 1;
        }
        count
    }

    /// `⌈3√n/ε · ln(2n/δ'²)⌉ + 1`.
    pub fn iteration_bound(&self) -> usize {
        let n = self.n as f64;
        (3.0 * n.sqrt() / self.eps * (2.0 * n / (self.delta_prime * self.delta_prime)).ln()).ceil() as usize + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub x: Vec<f64>,
    pub s: Vec<f64>,
    pub t: f64,
    pub mu: Vec<f64>,
    pub phi: f64,
}

impl IterateState {
    pub fn new(x: Vec<f64>, s: Vec<f64>, t: f64, potential: &CoshPotential) -> Result<Self> {
        let mu: Vec<f64> = x.iter().zip(&s).map(|(a, b)| a * b).collect();
        let phi = potential.value(&centrality(&mu, t))?;
        Ok(IterateState { x, s, t, mu, phi })
    }

    /// `max_i |μ_i/t − 1|`.
    pub fn max_deviation(&self) -> f64 {
        max_deviation(&self.mu, self.t)
    }
}

fn centrality(mu: &[f64], t: f64) -> Vec<f64> {
    mu.iter().map(|m| m / t - 1.0).collect()
}

fn max_deviation(mu: &[f64], t: f64) -> f64 {
    mu.iter().map(|m| (m / t - 1.0).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iter: usize,
    pub t: f64,
    pub phi: f64,
    pub r_k: usize,
    pub support: usize,
    pub resamples: usize,
    pub gap: f64,
}

pub const TRACE_HEADER: &str = "iter,t,phi,r_k,support,resamples,gap";

impl TraceRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{:.16e},{:.16e},{},{},{},{:.16e}",
            self.iter, self.t, self.phi, self.r_k, self.support, self.resamples, self.gap
        )
    }
}

pub fn trace_to_csv(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.to_csv_line());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FallbackReason {
    PotentialExploded,
    OffCenter,
    StepUnbounded,
    PositivityLost,
}

/// Per-iteration callback payload.
#[derive(Debug)]
pub enum SolveEvent<'a> {
    Accepted {
        iter: usize,
        a: &'a Matrix,
        x: &'a [f64],
        s: &'a [f64],
        delta_mu: &'a [f64],
        step: &'a StepResult,
    },
    Fallback {
        iter: usize,
        reason: FallbackReason,
        state: &'a IterateState,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub x_hat: Vec<f64>,
    pub objective: f64,
    pub primal_infeas_l1: f64,
    pub iterations: usize,
    pub fallbacks: usize,
    pub converged: bool,
    pub trace: Vec<TraceRow>,
    pub parameters: Parameters,
    pub t_final: f64,
    /// `Σ x̄ s̄` at exit.
    pub gap: f64,
    /// The `θ` coordinate of the reformulated iterate at exit.
    pub theta: f64,
    pub x_bar: Vec<f64>,
    pub s_bar: Vec<f64>,
    pub counters: CounterSnapshot,
}

impl SolveReport {
    pub fn trace_csv(&self) -> String {
        trace_to_csv(&self.trace)
    }
}

/// `(t_new/t − 1) μ − (ε/2) t_new ∇Φ/‖∇Φ‖₂` at `μ = xs`. The gradient term is
/// dropped when `‖∇Φ‖₂ < 1e-14`.
pub fn compute_delta_mu(
    x: &[f64],
    s: &[f64],
    t: f64,
    t_new: f64,
    eps: f64,
    potential: &CoshPotential,
) -> Result<Vec<f64>> {
    let mu: Vec<f64> = x.iter().zip(s).map(|(a, b)| a * b).collect();
    let grad = potential.gradient(&centrality(&mu, t))?;
    let gnorm = norm2(&grad);
    let ratio = t_new / t - 1.0;
    let scale = if gnorm < 1e-14 { 0.0 } else { 0.5 * eps * t_new / gnorm };
    Ok(mu.iter().zip(&grad).map(|(m, g)| ratio * m - scale * g).collect())
}

/// Deterministic re-centering at `t_new` with exact projections.
///
/// Repeats full Newton steps toward `xs = t_new`, with the per-coordinate
/// target clamped to `±0.1 xs` and a fraction-to-boundary damping of 0.9,
/// until `‖xs − t_new‖₂ ≤ eps_target`.
pub fn classical_step(x: &[f64], s: &[f64], t_new: f64, a: &Matrix, eps_target: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = x.len();
    if s.len() != n || a.cols() != n {
        return Err(Error::dims("classical_step", n, s.len()));
    }
    let cap = 64 * ((n as f64).sqrt() * log_n(n)).ceil() as usize;
    let mut x = x.to_vec();
    let mut s = s.to_vec();
    let mut residual = f64::INFINITY;
    for _ in 0..=cap {
        let mu: Vec<f64> = x.iter().zip(&s).map(|(a, b)| a * b).collect();
        residual = mu.iter().map(|m| (m - t_new).powi(2)).sum::<f64>().sqrt();
        if residual <= eps_target {
            return Ok((x, s));
        }
        let w: Vec<f64> = x.iter().zip(&s).map(|(a, b)| a / b).collect();
        let u: Vec<f64> = mu
            .iter()
            .map(|&m| (t_new - m).clamp(-0.1 * m, 0.1 * m) / m.sqrt())
            .collect();
        let pu = project(a, &w, &u)?;
        let mut alpha: f64 = 1.0;
        let mut dx = Vec::with_capacity(n);
        let mut ds = Vec::with_capacity(n);
        for i in 0..n {
            let rw = w[i].sqrt();
            let dxi = rw * (u[i] - pu[i]);
            let dsi = pu[i] / rw;
            if dxi < 0.0 {
                alpha = alpha.min(-0.9 * x[i] / dxi);
            }
            if dsi < 0.0 {
                alpha = alpha.min(-0.9 * s[i] / dsi);
            }
            dx.push(dxi);
            ds.push(dsi);
        }
        for i in 0..n {
            x[i] += alpha * dx[i];
            s[i] += alpha * ds[i];
        }
    }
    Err(Error::CenteringFailed {
        iterations: cap,
        residual,
    })
}

/// Least-squares dual `y` from `Āᵀy = c̄ − s`.
pub fn recover_dual(lp: &LinearProgram, s: &[f64]) -> Result<Vec<f64>> {
    let a = lp.a();
    if s.len() != a.cols() {
        return Err(Error::dims("recover_dual", a.cols(), s.len()));
    }
    let rhs: Vec<f64> = lp.c().iter().zip(s).map(|(c, si)| c - si).collect();
    let chol = Cholesky::factor(&crate::linalg::form_gram(a, &vec![1.0; a.cols()])?)?;
    let mut y = a.mat_vec(&rhs);
    chol.solve_in_place(&mut y);
    Ok(y)
}

pub fn solve(lp: &LinearProgram, config: &SolverConfig) -> Result<SolveReport> {
    solve_observed(lp, config, |_| {})
}

/// [`solve`] with a callback invoked on every accepted step and every fallback.
pub fn solve_observed<F>(lp: &LinearProgram, config: &SolverConfig, mut observe: F) -> Result<SolveReport>
where
    F: FnMut(&SolveEvent<'_>),
{
    let n_bar = lp.num_variables() + 2;
    let params = Parameters::derive(n_bar, config.mode, config.delta, config.a)?;
    let refm = reformulate(lp, params.delta_prime)?;
    let abar = refm.lpbar.a().clone();
    let potential = CoshPotential::new(params.lambda)?;
    let blowup = (n_bar as f64).powi(3);

    let w0: Vec<f64> = refm.x0.iter().zip(&refm.s0).map(|(a, b)| a / b).collect();
    let mp_config = MaintainerConfig {
        eps_mp: params.eps_mp,
        a: params.a,
        omega: config.omega,
        refresh_every: config.refresh_every,
        kernels: if config.deterministic_kernels {
            Kernels::Sequential
        } else {
            Kernels::Parallel
        },
    };
    let mut mp = ProjectionMaintainer::with_config(&abar, &w0, mp_config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let options = StepOptions {
        k: params.k,
        max_resamples: config.max_resamples,
        bound: Some(params.step_bound),
    };
    let max_iters = config.max_iters.unwrap_or_else(|| params.iteration_bound());

    let mut trace_out = match &config.trace_path {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            writeln!(w, "{TRACE_HEADER}")?;
            Some(w)
        }
        None => None,
    };

    let mut state = IterateState::new(refm.x0.clone(), refm.s0.clone(), 1.0, &potential)?;
    let shrink = params.shrink();
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut fallbacks = 0;

    while state.t > params.t_final {
        if iterations >= max_iters {
            break;
        }
        let t_new = shrink * state.t;
        let delta_mu = compute_delta_mu(&state.x, &state.s, state.t, t_new, params.eps, &potential)?;
        let outcome = match stochastic_step(&mut mp, &state.x, &state.s, &delta_mu, options, &mut rng) {
            Ok(step) => {
                let mu_new: Vec<f64> = step.x_new.iter().zip(&step.s_new).map(|(a, b)| a * b).collect();
                let phi_new = potential.value(&centrality(&mu_new, t_new));
                match phi_new {
                    Ok(phi) if phi > blowup => Err(FallbackReason::PotentialExploded),
                    Err(_) => Err(FallbackReason::PotentialExploded),
                    Ok(_) if max_deviation(&mu_new, t_new) > CENTRALITY_RADIUS => Err(FallbackReason::OffCenter),
                    Ok(phi) => Ok((step, mu_new, phi)),
                }
            }
            Err(Error::StepUnbounded { .. }) => Err(FallbackReason::StepUnbounded),
            Err(Error::PositivityLost { .. }) => Err(FallbackReason::PositivityLost),
            Err(e) => return Err(e),
        };

        let (support, resamples) = match outcome {
            Ok((step, mu_new, phi)) => {
                observe(&SolveEvent::Accepted {
                    iter: iterations,
                    a: &abar,
                    x: &state.x,
                    s: &state.s,
                    delta_mu: &delta_mu,
                    step: &step,
                });
                let stats = (step.direction.support.len(), step.direction.resample_count);
                state.x = step.x_new;
                state.s = step.s_new;
                state.mu = mu_new;
                state.phi = phi;
                state.t = t_new;
                stats
            }
            Err(reason) => {
                let (x, s) = classical_step(&state.x, &state.s, t_new, &abar, params.eps * t_new)?;
                let w: Vec<f64> = x.iter().zip(&s).map(|(a, b)| a / b).collect();
                mp.reinitialize(&w)?;
                state = IterateState::new(x, s, t_new, &potential)?;
                fallbacks += 1;
                observe(&SolveEvent::Fallback {
                    iter: iterations,
                    reason,
                    state: &state,
                });
                (n_bar, 0)
            }
        };

        let row = TraceRow {
            iter: iterations,
            t: state.t,
            phi: state.phi,
            r_k: mp.last_rank(),
            support,
            resamples,
            gap: state.mu.iter().sum(),
        };
        if let Some(w) = trace_out.as_mut() {
            writeln!(w, "{}", row.to_csv_line())?;
        }
        if config.keep_trace {
            trace.push(row);
        }
        iterations += 1;
    }
    if let Some(mut w) = trace_out {
        w.flush()?;
    }

    finish(lp, &refm, state, iterations, fallbacks, trace, params, mp.counters())
}

#[allow(clippy::too_many_arguments)]
fn finish(
    lp: &LinearProgram,
    refm: &ReformulatedLP,
    state: IterateState,
    iterations: usize,
    fallbacks: usize,
    trace: Vec<TraceRow>,
    params: Parameters,
    counters: CounterSnapshot,
) -> Result<SolveReport> {
    let x_hat = recover_solution(&state.x, refm, lp)?;
    Ok(SolveReport {
        objective: lp.objective(&x_hat),
        primal_infeas_l1: lp.infeasibility_l1(&x_hat),
        x_hat,
        iterations,
        fallbacks,
        converged: state.t <= params.t_final,
        trace,
        parameters: params,
        t_final: state.t,
        gap: state.mu.iter().sum(),
        theta: state.x[refm.theta_index()],
        x_bar: state.x,
        s_bar: state.s,
        counters,
    })
}
