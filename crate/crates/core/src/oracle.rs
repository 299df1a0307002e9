//! Slow, independent reference implementations used as ground truth.

use crate::error::{Error, Result};
use crate::linalg::{project, Lu, Matrix};
use crate::lp::{recover_solution, reformulate, LinearProgram};

/// Largest variable count accepted by [`vertex_enumerate_solve`].
pub const MAX_ENUMERATION_N: usize = 30;
/// Largest number of bases accepted by [`vertex_enumerate_solve`].
pub const MAX_ENUMERATION_BASES: f64 = 5e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleStatus {
    Optimal,
    Infeasible,
    /// Some feasible vertex violates the stated diameter bound `R`.
    UnboundedFlagged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub optimum: f64,
    pub argmin: Vec<f64>,
    pub status: OracleStatus,
}

/// `C(n, k)` as a float, to compare against the guard without overflow.
pub fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Brute force over all `d`-column bases.
pub fn vertex_enumerate_solve(lp: &LinearProgram) -> Result<OracleResult> {
    let (d, n) = (lp.num_constraints(), lp.num_variables());
    let bases = binomial(n, d);
    if n > MAX_ENUMERATION_N || bases > MAX_ENUMERATION_BASES {
        return Err(Error::OracleGuard(format!(
            "n = {n}, C(n, d) = {bases:.0} exceeds the enumeration limits"
        )));
    }
    let a = lp.a();
    let b = lp.b();
    let b_scale = 1.0 + b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut over_diameter = false;
    let mut basis: Vec<usize> = (0..d).collect();
    loop {
        if let Some(x) = basic_solution(a, b, &basis, b_scale) {
            if x.iter().sum::<f64>() > lp.diameter() * (1.0 + 1e-9) {
                over_diameter = true;
            }
            let value = lp.objective(&x);
            if best.as_ref().map_or(true, |(v, _)| value < *v) {
                best = Some((value, x));
            }
        }
        if !next_combination(&mut basis, n) {
            break;
        }
    }
    Ok(match best {
        None => OracleResult {
            optimum: f64::INFINITY,
            argmin: Vec::new(),
            status: OracleStatus::Infeasible,
        },
        Some((optimum, argmin)) => OracleResult {
            optimum,
            argmin,
            status: if over_diameter {
                OracleStatus::UnboundedFlagged
            } else {
                OracleStatus::Optimal
            },
        },
    })
}

/// The feasible basic solution for `basis`, if the basis is nonsingular and
/// its solution is nonnegative.
fn basic_solution(a: &Matrix, b: &[f64], basis: &[usize], b_scale: f64) -> Option<Vec<f64>> {
    let block = a.select_columns(basis);
    let lu = Lu::factor(&block, 1e-12).ok()?;
    let xb = lu.solve(b);
    if xb.iter().any(|&v| !(v >= -1e-10)) {
        return None;
    }
    let residual = block
        .mat_vec(&xb)
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (l, r)| m.max((l - r).abs()));
    if residual > 1e-9 * b_scale {
        return None;
    }
    let mut x = vec![0.0; a.cols()];
    for (&j, &v) in basis.iter().zip(&xb) {
        x[j] = v.max(0.0);
    }
    Some(x)
}

/// Advances to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// `√W Aᵀ(A W Aᵀ)⁻¹A √W h`, refactorized on every call.
pub fn naive_projection_apply(a: &Matrix, w: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    project(a, w, h)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRun {
    pub result: OracleResult,
    /// `Σ x̄ s̄` at exit.
    pub gap: f64,
    pub t_final: f64,
    pub iterations: usize,
    /// Variable count of the reformulated problem.
    pub n_bar: usize,
}

/// Textbook short-step method: `t ← (1 − 1/(4√n)) t` followed by one exact
/// Newton step toward `xs = t`, until `t ≤ δ'²/(2n)` with `δ' = δ/2`.
pub fn reference_ipm(lp: &LinearProgram, delta: f64) -> Result<ReferenceRun> {
    let delta_prime = delta / 2.0;
    let refm = reformulate(lp, delta_prime)?;
    let a = refm.lpbar.a();
    let n = a.cols();
    let t_stop = delta_prime * delta_prime / (2.0 * n as f64);
    let shrink = 1.0 - 1.0 / (4.0 * (n as f64).sqrt());

    let mut t = 1.0;
    let (mut x, mut s) = crate::solver::classical_step(&refm.x0, &refm.s0, t, a, 1e-3 * t)?;
    let mut iterations = 0;
    while t > t_stop {
        t *= shrink;
        let w: Vec<f64> = x.iter().zip(&s).map(|(a, b)| a / b).collect();
        let u: Vec<f64> = x.iter().zip(&s).map(|(a, b)| (t - a * b) / (a * b).sqrt()).collect();
        let pu = project(a, &w, &u)?;
        for i in 0..n {
            let rw = w[i].sqrt();
            x[i] += rw * (u[i] - pu[i]);
            s[i] += pu[i] / rw;
        }
        if let Some(i) = x.iter().chain(&s).position(|&v| !(v > 0.0)) {
            return Err(Error::PositivityLost { index: i % n });
        }
        iterations += 1;
    }
    let x_hat = recover_solution(&x, &refm, lp)?;
    Ok(ReferenceRun {
        result: OracleResult {
            optimum: lp.objective(&x_hat),
            argmin: x_hat,
            status: OracleStatus::Optimal,
        },
        gap: x.iter().zip(&s).map(|(a, b)| a * b).sum(),
        t_final: t,
        iterations,
        n_bar: n,
    })
}
