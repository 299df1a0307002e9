//! Projection maintenance under slowly drifting diagonal weights.
//!
//! [`ProjectionMaintainer`] keeps `M = Aᵀ(A V Aᵀ)⁻¹A` for a lagging weight
//! vector `v`. `update` moves `v` toward the target `w` only once at least
//! `n^a` coordinates have drifted past the tolerance, and then does so in one
//! batched Woodbury correction. In between, `query` folds the few drifted
//! coordinates into each product with a small online Woodbury solve, so answers
//! are always exact projections at the reported weights `ṽ`.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{axpy, check_finite, form_gram, Cholesky, Kernels, Lu, Matrix};
use crate::lp::check_full_row_rank;
use crate::potential::{log_n, WeightSchedule, DEFAULT_OMEGA};

/// Pivot tolerance for the small `I + Δ M_SS` systems.
const INNER_PIVOT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaintainerConfig {
    pub eps_mp: f64,
    /// Batch exponent: updates are deferred while fewer than `n^a`
    /// coordinates have drifted.
    pub a: f64,
    pub omega: f64,
    /// Recompute `M` from scratch after this many batched updates (0 = never).
    pub refresh_every: usize,
    pub kernels: Kernels,
}

impl MaintainerConfig {
    pub fn new(eps_mp: f64, a: f64) -> Self {
        MaintainerConfig {
            eps_mp,
            a,
            omega: DEFAULT_OMEGA,
            refresh_every: 50,
            kernels: Kernels::Sequential,
        }
    }
}

#[derive(Debug, Default)]
pub struct Counters {
    updates: u64,
    rank_updates: u64,
    total_rank: u64,
    weighted_cost: f64,
    rebuild_fallbacks: u64,
    periodic_refreshes: u64,
    reinitializations: u64,
    queries: AtomicU64,
    query_fallbacks: AtomicU64,
}

impl Counters {
    pub fn snapshot(&self) -> CounterSnapshot {
        CounterSnapshot {
            updates: self.updates,
            rank_updates: self.rank_updates,
            total_rank: self.total_rank,
            weighted_cost: self.weighted_cost,
            rebuild_fallbacks: self.rebuild_fallbacks,
            periodic_refreshes: self.periodic_refreshes,
            reinitializations: self.reinitializations,
            queries: self.queries.load(Ordering::Relaxed),
            query_fallbacks: self.query_fallbacks.load(Ordering::Relaxed),
        }
    }
}

/// Plain copy of the counters at one point in time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CounterSnapshot {
    pub updates: u64,
    /// Updates that actually changed `v` (the `r ≥ n^a` branch).
    pub rank_updates: u64,
    /// `Σ r_k`.
    pub total_rank: u64,
    /// `Σ r_k · g_{r_k}`.
    pub weighted_cost: f64,
    pub rebuild_fallbacks: u64,
    pub periodic_refreshes: u64,
    pub reinitializations: u64,
    pub queries: u64,
    pub query_fallbacks: u64,
}

impl CounterSnapshot {
    pub fn rows(&self) -> Vec<(&'static str, String)> {
        vec![
            ("updates", self.updates.to_string()),
            ("rank_updates", self.rank_updates.to_string()),
            ("total_rank", self.total_rank.to_string()),
            ("weighted_cost", format!("{:.16e}", self.weighted_cost)),
            ("rebuild_fallback", self.rebuild_fallbacks.to_string()),
            ("periodic_refresh", self.periodic_refreshes.to_string()),
            ("reinitialize", self.reinitializations.to_string()),
            ("queries", self.queries.to_string()),
            ("query_fallback", self.query_fallbacks.to_string()),
        ]
    }

    /// `key,value` CSV with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,value\n");
        for (k, v) in self.rows() {
            out.push_str(k);
            out.push(',');
            out.push_str(&v);
            out.push('\n');
        }
        out
    }
}

/// Online correction for the coordinates where `ṽ ≠ v`.
#[derive(Debug, Clone)]
struct OnlineCorrection {
    indices: Vec<usize>,
    delta: Vec<f64>,
    /// Factorization of `I + Δ̃ M_S̃S̃`; `None` if singular.
    lu: Option<Lu>,
}

#[derive(Debug)]
pub struct ProjectionMaintainer {
    a: Matrix,
    w: Vec<f64>,
    v: Vec<f64>,
    vtilde: Vec<f64>,
    sqrt_vtilde: Vec<f64>,
    m: Matrix,
    config: MaintainerConfig,
    schedule: WeightSchedule,
    since_refresh: usize,
    last_rank: usize,
    online: OnlineCorrection,
    counters: Counters,
}

impl ProjectionMaintainer {
    pub fn initialize(a: &Matrix, w: &[f64], eps_mp: f64, batch_exponent: f64) -> Result<Self> {
        Self::with_config(a, w, MaintainerConfig::new(eps_mp, batch_exponent))
    }

    pub fn with_config(a: &Matrix, w: &[f64], config: MaintainerConfig) -> Result<Self> {
        let n = a.cols();
        if w.len() != n {
            return Err(Error::dims("ProjectionMaintainer::initialize", n, w.len()));
        }
        check_positive(w)?;
        if !(config.eps_mp > 0.0 && config.eps_mp <= 0.25) {
            return Err(Error::Domain(format!("eps_mp must lie in (0, 1/4], got {}", config.eps_mp)));
        }
        if !(config.a > 0.0 && config.a < 1.0) {
            return Err(Error::Domain(format!("batch exponent must lie in (0, 1), got {}", config.a)));
        }
        if a.rows() > n {
            return Err(Error::Domain(format!("need d ≤ n, got {}x{n}", a.rows())));
        }
        check_full_row_rank(a)?;
        // Cost weights need ω ≤ 3 − a to stay non-increasing.
        let schedule = WeightSchedule::new(n, config.a, config.omega.min(3.0 - config.a).max(2.0))?;
        let m = fresh_m(a, w)?;
        Ok(ProjectionMaintainer {
            a: a.clone(),
            w: w.to_vec(),
            v: w.to_vec(),
            vtilde: w.to_vec(),
            sqrt_vtilde: w.iter().map(|x| x.sqrt()).collect(),
            m,
            config,
            schedule,
            since_refresh: 0,
            last_rank: 0,
            online: OnlineCorrection {
                indices: Vec::new(),
                delta: Vec::new(),
                lu: None,
            },
            counters: Counters::default(),
        })
    }

    /// Rebuilds from scratch at `w`, keeping the counters.
    pub fn reinitialize(&mut self, w: &[f64]) -> Result<()> {
        if w.len() != self.n() {
            return Err(Error::dims("ProjectionMaintainer::reinitialize", self.n(), w.len()));
        }
        check_positive(w)?;
        self.m = fresh_m(&self.a, w)?;
        self.w = w.to_vec();
        self.v = w.to_vec();
        self.set_vtilde_from_v();
        self.since_refresh = 0;
        self.counters.reinitializations += 1;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn constraint_matrix(&self) -> &Matrix {
        &self.a
    }

    pub fn eps_mp(&self) -> f64 {
        self.config.eps_mp
    }

    pub fn config(&self) -> &MaintainerConfig {
        &self.config
    }

    /// `n^a`, the deferral budget.
    pub fn budget(&self) -> f64 {
        (self.n() as f64).powf(self.config.a)
    }

    pub fn w(&self) -> &[f64] {
        &self.w
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn vtilde(&self) -> &[f64] {
        &self.vtilde
    }

    pub fn m(&self) -> &Matrix {
        &self.m
    }

    /// Coordinates where `w` left the `(1 ± ε_mp) v` band.
    pub fn outside(&self) -> &[usize] {
        &self.online.indices
    }

    /// Rank applied by the most recent `update` (0 when it was deferred).
    pub fn last_rank(&self) -> usize {
        self.last_rank
    }

    pub fn counters(&self) -> CounterSnapshot {
        self.counters.snapshot()
    }

    pub fn weight_schedule(&self) -> &WeightSchedule {
        &self.schedule
    }

    pub fn update(&mut self, w_new: &[f64]) -> Result<&[f64]> {
        let n = self.n();
        if w_new.len() != n {
            return Err(Error::dims("ProjectionMaintainer::update", n, w_new.len()));
        }
        check_positive(w_new)?;
        self.counters.updates += 1;
        self.last_rank = 0;

        let eps = self.config.eps_mp;
        let y: Vec<f64> = w_new.iter().zip(&self.v).map(|(wi, vi)| wi / vi - 1.0).collect();
        // Not strictly inside the band, i.e. |y_i| ≥ ε_mp. Evaluated with the
        // same multiplicative test that defines ṽ so the two sets nest exactly.
        let flagged: Vec<bool> = w_new
            .iter()
            .zip(&self.v)
            .map(|(&wi, &vi)| !((1.0 - eps) * vi < wi && wi < (1.0 + eps) * vi))
            .collect();
        let mut r = flagged.iter().filter(|&&f| f).count();

        if r > 0 && (r as f64) >= self.budget() {
            let mut order: Vec<usize> = (0..n).collect();
            // Descending |y|, flagged first, ties by ascending index.
            order.sort_by(|&i, &j| {
                flagged[j]
                    .cmp(&flagged[i])
                    .then(y[j].abs().total_cmp(&y[i].abs()))
                    .then(i.cmp(&j))
            });
            let shrink = 1.0 - 1.0 / log_n(n);
            while 1.5 * (r as f64) < n as f64 {
                let next = (1.5 * r as f64).ceil() as usize;
                if y[order[next - 1]].abs() >= shrink * y[order[r - 1]].abs() {
                    r = next.min(n);
                } else {
                    break;
                }
            }
            let (support, delta): (Vec<usize>, Vec<f64>) = order[..r]
                .iter()
                .filter(|&&i| w_new[i] != self.v[i])
                .map(|&i| (i, w_new[i] - self.v[i]))
                .unzip();
            let mut v_new = self.v.clone();
            for &i in &order[..r] {
                v_new[i] = w_new[i];
            }

            match self.woodbury_update(&support, &delta) {
                Ok(()) => {
                    self.v = v_new;
                    self.since_refresh += 1;
                    if self.config.refresh_every > 0 && self.since_refresh >= self.config.refresh_every {
                        self.m = fresh_m(&self.a, &self.v)?;
                        self.since_refresh = 0;
                        self.counters.periodic_refreshes += 1;
                    }
                }
                Err(_) => {
                    self.m = fresh_m(&self.a, w_new)?;
                    self.v = w_new.to_vec();
                    self.since_refresh = 0;
                    self.counters.rebuild_fallbacks += 1;
                }
            }
            self.last_rank = r;
            self.counters.rank_updates += 1;
            self.counters.total_rank += r as u64;
            self.counters.weighted_cost += r as f64 * self.schedule.weight(r);
        }

        self.w.copy_from_slice(w_new);
        self.set_vtilde_from_v();
        Ok(&self.vtilde)
    }

    /// `√Ṽ Aᵀ(A Ṽ Aᵀ)⁻¹A √Ṽ h` for the `ṽ` of the last update.
    pub fn query(&self, h: &[f64]) -> Result<Vec<f64>> {
        let n = self.n();
        if h.len() != n {
            return Err(Error::dims("ProjectionMaintainer::query", n, h.len()));
        }
        self.counters.queries.fetch_add(1, Ordering::Relaxed);
        if !self.online.indices.is_empty() && self.online.lu.is_none() {
            self.counters.query_fallbacks.fetch_add(1, Ordering::Relaxed);
            return crate::oracle::naive_projection_apply(&self.a, &self.vtilde, h);
        }

        // z = M (√ṽ h); M is symmetric so rows stand in for columns.
        let mut z = vec![0.0; n];
        for (j, (&hj, &sj)) in h.iter().zip(&self.sqrt_vtilde).enumerate() {
            if hj != 0.0 {
                axpy(hj * sj, self.m.row(j), &mut z);
            }
        }
        if let Some(lu) = &self.online.lu {
            let rhs: Vec<f64> = self
                .online
                .indices
                .iter()
                .zip(&self.online.delta)
                .map(|(&i, &di)| di * z[i])
                .collect();
            let coef = lu.solve(&rhs);
            for (&i, &ck) in self.online.indices.iter().zip(&coef) {
                axpy(-ck, self.m.row(i), &mut z);
            }
        }
        for (zi, sj) in z.iter_mut().zip(&self.sqrt_vtilde) {
            *zi *= sj;
        }
        Ok(z)
    }

    /// `M ← M − M_S (I + Δ M_SS)⁻¹ Δ M_Sᵀ`, the rank-|S| Woodbury correction
    /// for `V ← V + Δ`.
    fn woodbury_update(&mut self, support: &[usize], delta: &[f64]) -> Result<()> {
        let r = support.len();
        if r == 0 {
            return Ok(());
        }
        let n = self.n();
        let lu = Lu::factor(&inner_system(&self.m, support, delta), INNER_PIVOT_TOL)?;
        // X = K⁻¹ Δ M_Sᵀ, solved one column of the r×n right-hand side at a time.
        let mut x = Matrix::zeros(r, n);
        let mut col = vec![0.0; r];
        for j in 0..n {
            for (k, (&s, &dk)) in support.iter().zip(delta).enumerate() {
                col[k] = dk * self.m.get(s, j);
            }
            let sol = lu.solve(&col);
            for (k, v) in sol.into_iter().enumerate() {
                x.set(k, j, v);
            }
        }
        check_finite(x.as_slice()).map_err(|_| Error::Singular { pivot: 0, value: f64::NAN })?;
        let m_s = self.m.select_columns(support);
        let row_kernel = |(p, row): (usize, &mut [f64])| {
            for (k, &coef) in m_s.row(p).iter().enumerate() {
                if coef != 0.0 {
                    axpy(-coef, x.row(k), row);
                }
            }
        };
        let cols = self.m.cols();
        let data = self.m.as_mut_slice();
        match self.config.kernels {
            Kernels::Sequential => data.chunks_mut(cols).enumerate().for_each(row_kernel),
            Kernels::Parallel => data.par_chunks_mut(cols).enumerate().for_each(row_kernel),
        }
        self.m.symmetrize();
        Ok(())
    }

    fn set_vtilde_from_v(&mut self) {
        let eps = self.config.eps_mp;
        let mut indices = Vec::new();
        let mut delta = Vec::new();
        for i in 0..self.n() {
            let (wi, vi) = (self.w[i], self.v[i]);
            if (1.0 - eps) * vi <= wi && wi <= (1.0 + eps) * vi {
                self.vtilde[i] = vi;
            } else {
                self.vtilde[i] = wi;
                indices.push(i);
                delta.push(wi - vi);
            }
            self.sqrt_vtilde[i] = self.vtilde[i].sqrt();
        }
        let lu = if indices.is_empty() {
            None
        } else {
            Lu::factor(&inner_system(&self.m, &indices, &delta), INNER_PIVOT_TOL).ok()
        };
        self.online = OnlineCorrection { indices, delta, lu };
    }
}

/// `I + Δ M_SS`.
fn inner_system(m: &Matrix, support: &[usize], delta: &[f64]) -> Matrix {
    let r = support.len();
    let mut k = Matrix::identity(r);
    for (p, (&i, &di)) in support.iter().zip(delta).enumerate() {
        for (q, &j) in support.iter().enumerate() {
            let v = k.get(p, q) + di * m.get(i, j);
            k.set(p, q, v);
        }
    }
    k
}

fn check_positive(w: &[f64]) -> Result<()> {
    match w.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
        Some(i) => Err(Error::Domain(format!("weight w[{i}] = {} is not positive", w[i]))),
        None => Ok(()),
    }
}

/// `Aᵀ(A diag(w) Aᵀ)⁻¹A` from a fresh factorization.
fn fresh_m(a: &Matrix, w: &[f64]) -> Result<Matrix> {
    let chol = Cholesky::factor(&form_gram(a, w)?)?;
    let (d, n) = (a.rows(), a.cols());
    // Z = G⁻¹ A, column by column.
    let mut z = Matrix::zeros(d, n);
    let mut col = vec![0.0; d];
    for j in 0..n {
        for (i, c) in col.iter_mut().enumerate() {
            *c = a.get(i, j);
        }
        chol.solve_in_place(&mut col);
        for (i, &c) in col.iter().enumerate() {
            z.set(i, j, c);
        }
    }
    let mut m = Matrix::zeros(n, n);
    for p in 0..n {
        for q in p..n {
            let v: f64 = (0..d).map(|i| a.get(i, p) * z.get(i, q)).sum();
            m.set(p, q, v);
            m.set(q, p, v);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{mat_mul, projection_full, solve_spd};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Matrix {
        Matrix::new(d, n, (0..d * n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    /// `Aᵀ(AWAᵀ)⁻¹A` through the generic SPD solve, independent of `fresh_m`.
    fn naive_m(a: &Matrix, w: &[f64]) -> Matrix {
        let g = form_gram(a, w).unwrap();
        let z = solve_spd(&g, a).unwrap();
        mat_mul(&a.transpose(), &z).unwrap()
    }

    fn rel_frobenius(got: &Matrix, want: &Matrix) -> f64 {
        got.sub(want).unwrap().frobenius_norm() / want.frobenius_norm().max(1e-300)
    }

    #[test]
    fn initialize_examples() {
        let mp = ProjectionMaintainer::initialize(&Matrix::identity(2), &[2.0, 4.0], 0.1, 0.5).unwrap();
        let close = |m: &Matrix, want: &[f64]| m.as_slice().iter().zip(want).all(|(g, w)| (g - w).abs() <= 1e-15);
        assert!(close(mp.m(), &[0.5, 0.0, 0.0, 0.25]));
        let a = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let mp = ProjectionMaintainer::initialize(&a, &[1.0, 1.0], 0.1, 0.5).unwrap();
        // AWAᵀ = 2, so M = AᵀA/2
        assert!(close(mp.m(), &[0.5; 4]));
        assert_eq!(mp.counters(), CounterSnapshot::default());

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = random_matrix(&mut rng, 3, 8);
        let w: Vec<f64> = (0..8).map(|_| rng.gen_range(0.2..4.0)).collect();
        let mp = ProjectionMaintainer::initialize(&a, &w, 0.1, 0.5).unwrap();
        assert!(mp.m().sub(&naive_m(&a, &w)).unwrap().max_abs() < 1e-10);
        assert_eq!(mp.v(), &w[..]);
        assert_eq!(mp.vtilde(), &w[..]);
    }

    #[test]
    fn initialize_rejects_bad_arguments() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert!(ProjectionMaintainer::initialize(&a, &[1.0, 0.0], 0.1, 0.5).is_err());
        assert!(ProjectionMaintainer::initialize(&a, &[1.0, 1.0], 0.3, 0.5).is_err());
        assert!(ProjectionMaintainer::initialize(&a, &[1.0, 1.0], 0.25, 0.5).is_ok());
        assert!(ProjectionMaintainer::initialize(&a, &[1.0, 1.0], 0.1, 1.0).is_err());
        assert!(ProjectionMaintainer::initialize(&a, &[1.0], 0.1, 0.5).is_err());
        let dependent = Matrix::from_rows(&[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]]).unwrap();
        assert!(ProjectionMaintainer::initialize(&dependent, &[1.0; 3], 0.1, 0.5).is_err());
    }

    #[test]
    fn no_drift_keeps_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 3, 9);
        let w: Vec<f64> = (0..9).map(|_| rng.gen_range(0.5..2.0)).collect();
        let mut mp = ProjectionMaintainer::initialize(&a, &w, 0.1, 0.5).unwrap();
        let m0 = mp.m().clone();
        let vt = mp.update(&w).unwrap().to_vec();
        assert_eq!(vt, w);
        assert_eq!(mp.last_rank(), 0);
        assert_eq!(mp.m(), &m0);
        assert_eq!(mp.v(), &w[..]);
    }

    #[test]
    fn single_doubled_coordinate_is_deferred_but_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_matrix(&mut rng, 2, 4);
        let w = vec![1.0, 2.0, 0.5, 1.5];
        let mut mp = ProjectionMaintainer::initialize(&a, &w, 0.1, 0.5).unwrap();
        assert_eq!(mp.budget(), 2.0);
        let m0 = mp.m().clone();
        let mut w2 = w.clone();
        w2[2] *= 2.0;
        let vt = mp.update(&w2).unwrap().to_vec();
        assert_eq!(mp.m(), &m0);
        assert_eq!(mp.v(), &w[..]);
        assert_eq!(vt, w2);
        assert_eq!(mp.outside(), &[2]);
        // the online correction makes the query exact at ṽ
        let h = vec![0.3, -1.0, 2.0, 0.5];
        let got = mp.query(&h).unwrap();
        let want = projection_full(&a, &w2).unwrap().mat_vec(&h);
        for (g, t) in got.iter().zip(&want) {
            assert!((g - t).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_scaling_takes_the_full_rank_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 4, 10);
        let w: Vec<f64> = (0..10).map(|_| rng.gen_range(0.5..2.0)).collect();
        let mut mp = ProjectionMaintainer::initialize(&a, &w, 0.1, 0.5).unwrap();
        let w2: Vec<f64> = w.iter().map(|x| 1.6 * x).collect();
        mp.update(&w2).unwrap();
        assert_eq!(mp.last_rank(), 10);
        assert_eq!(mp.v(), &w2[..]);
        let fresh = ProjectionMaintainer::initialize(&a, &w2, 0.1, 0.5).unwrap();
        assert!(rel_frobenius(mp.m(), fresh.m()) <= 1e-8);
        let c = mp.counters();
        assert_eq!((c.rank_updates, c.total_rank), (1, 10));
    }

    #[test]
    fn query_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_matrix(&mut rng, 3, 7);
        let w: Vec<f64> = (0..7).map(|_| rng.gen_range(0.5..2.0)).collect();
        let mp = ProjectionMaintainer::initialize(&a, &w, 0.1, 0.5).unwrap();
        assert_eq!(mp.query(&[0.0; 7]).unwrap(), vec![0.0; 7]);
        let p = projection_full(&a, &w).unwrap();
        let h: Vec<f64> = (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for (g, t) in mp.query(&h).unwrap().iter().zip(p.mat_vec(&h)) {
            assert!((g - t).abs() <= 1e-10);
        }
        assert!(mp.query(&[1.0]).is_err());
        // the malformed query is rejected before it is counted
        assert_eq!(mp.counters().queries, 2);
    }

    #[test]
    fn expansion_loop_grows_rank_geometrically() {
        // n = 16, a = 0.5: budget 4. Four coordinates drift by 0.5, the next
        // eight by 0.45 (within the (1 − 1/ln 16) shrink factor), the rest stay put.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 4, 16);
        let w = vec![1.0; 16];
        let mut mp = ProjectionMaintainer::initialize(&a, &w, 0.2, 0.5).unwrap();
        let mut w2 = w.clone();
        for (i, wi) in w2.iter_mut().enumerate() {
            *wi = match i {
                0..=3 => 1.5,
                4..=11 => 1.15,
                _ => 1.0,
            };
        }
        // |y| = 0.5 for 4 coordinates (flagged), 0.15 for 8 (below eps = 0.2).
        // r = 4 → ⌈6⌉: |y_π(6)| = 0.15 < (1 − 1/ln 16)·0.5 ≈ 0.32, so r stays 4.
        mp.update(&w2).unwrap();
        assert_eq!(mp.last_rank(), 4);

        let mut mp = ProjectionMaintainer::initialize(&a, &w, 0.2, 0.5).unwrap();
        for wi in w2.iter_mut().skip(4).take(8) {
            *wi = 1.45;
        }
        // now all twelve drifted coordinates are flagged: r = 12 ≥ 4;
        // ⌈18⌉ > 16 stops the loop.
        mp.update(&w2).unwrap();
        assert_eq!(mp.last_rank(), 12);

        let mut mp = ProjectionMaintainer::initialize(&a, &w, 0.2, 0.5).unwrap();
        let mut w3 = vec![1.0; 16];
        for wi in w3.iter_mut().take(4) {
            *wi = 1.5;
        }
        for wi in w3.iter_mut().skip(4).take(2) {
            *wi = 1.18; // below eps, and below (1 − 1/ln 16)·0.5 ≈ 0.32
        }
        mp.update(&w3).unwrap();
        assert_eq!(mp.last_rank(), 4);

        let mut mp = ProjectionMaintainer::initialize(&a, &w, 0.2, 0.5).unwrap();
        for wi in w3.iter_mut().skip(4).take(2) {
            *wi = 1.19;
        }
        for wi in w3.iter_mut().take(4) {
            *wi = 1.25;
        }
        // r = 4 flagged at 0.25; ⌈6⌉-th has |y| = 0.19 ≥ 0.639·0.25 ≈ 0.16 → r = 6;
        // ⌈9⌉-th has |y| = 0 → stop.
        mp.update(&w3).unwrap();
        assert_eq!(mp.last_rank(), 6);
        assert_eq!(&mp.v()[..6], &w3[..6]);
        let fresh = naive_m(&a, mp.v());
        assert!(rel_frobenius(mp.m(), &fresh) <= 1e-8);
    }

    #[test]
    fn periodic_refresh_and_fallback_counters() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_matrix(&mut rng, 3, 8);
        let mut w: Vec<f64> = (0..8).map(|_| rng.gen_range(0.5..2.0)).collect();
        let mut cfg = MaintainerConfig::new(0.1, 0.5);
        cfg.refresh_every = 2;
        let mut mp = ProjectionMaintainer::with_config(&a, &w, cfg).unwrap();
        for _ in 0..4 {
            for x in w.iter_mut() {
                *x *= 1.3;
            }
            mp.update(&w).unwrap();
        }
        let c = mp.counters();
        assert_eq!(c.rank_updates, 4);
        assert_eq!(c.periodic_refreshes, 2);
        assert!(rel_frobenius(mp.m(), &naive_m(&a, &w)) < 1e-10);
        let csv = c.to_csv();
        assert!(csv.starts_with("key,value\nupdates,4\n"));
        assert!(csv.contains("periodic_refresh,2\n"));
    }

    #[test]
    fn parallel_kernels_match_sequential() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 10, 40);
        let w: Vec<f64> = (0..40).map(|_| rng.gen_range(0.5..2.0)).collect();
        let w2: Vec<f64> = w.iter().map(|x| x * rng.gen_range(0.6..1.4)).collect();
        let mut seq = ProjectionMaintainer::initialize(&a, &w, 0.1, 0.3).unwrap();
        let mut cfg = MaintainerConfig::new(0.1, 0.3);
        cfg.kernels = Kernels::Parallel;
        let mut par = ProjectionMaintainer::with_config(&a, &w, cfg).unwrap();
        seq.update(&w2).unwrap();
        par.update(&w2).unwrap();
        assert_eq!(seq.m(), par.m());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]
        #[test]
        fn drift_keeps_band_budget_and_exact_queries(
            seed in proptest::prelude::any::<u64>(),
            n in 4usize..24,
            eps_mp in 0.01f64..0.25,
            steps in 1usize..12,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, n / 2, n);
            let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
            let mut mp = ProjectionMaintainer::initialize(&a, &w, eps_mp, 0.5).unwrap();
            for _ in 0..steps {
                for wi in w.iter_mut() {
                    if rng.gen_bool(0.4) {
                        *wi *= 1.0 + rng.gen_range(-0.3..0.3);
                    }
                }
                let vt = mp.update(&w).unwrap().to_vec();
                for i in 0..n {
                    proptest::prop_assert!((1.0 - eps_mp) * vt[i] <= w[i] && w[i] <= (1.0 + eps_mp) * vt[i]);
                }
                proptest::prop_assert!((mp.outside().len() as f64) < mp.budget());
                proptest::prop_assert!(rel_frobenius(mp.m(), &naive_m(&a, mp.v())) <= 1e-9);
                let h: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let want = crate::oracle::naive_projection_apply(&a, &vt, &h).unwrap();
                let got = mp.query(&h).unwrap();
                let err: f64 = got.iter().zip(&want).map(|(g, w)| (g - w).powi(2)).sum::<f64>().sqrt();
                proptest::prop_assert!(err <= 1e-9 * crate::linalg::norm2(&want).max(1e-300));
            }
        }
    }
}
