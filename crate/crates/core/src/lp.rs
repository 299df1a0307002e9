//! Standard-form LP instances `min cᵀx s.t. Ax = b, x ≥ 0`, the feasible-start
//! reformulation used by the solvers, and recovery of an original-space point.

use crate::error::{Error, Result};
use crate::linalg::{check_finite, dot, form_gram, norm1, norm_inf, Cholesky, Matrix};

/// Floor for the Lipschitz bound when the objective is zero.
pub const MIN_LIPSCHITZ: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    a: Matrix,
    b: Vec<f64>,
    c: Vec<f64>,
    diameter: f64,
    lipschitz: f64,
}

impl LinearProgram {
    /// `diameter` is a trusted bound on `‖x‖₁` over the feasible set.
    /// `lipschitz` defaults to `max(‖c‖_∞, 1e-30)`; an explicit value below
    /// `‖c‖_∞` is rejected.
    pub fn new(a: Matrix, b: Vec<f64>, c: Vec<f64>, diameter: f64, lipschitz: Option<f64>) -> Result<Self> {
        let (d, n) = (a.rows(), a.cols());
        if d == 0 || d > n {
            return Err(Error::Domain(format!("need 1 ≤ d ≤ n, got d={d}, n={n}")));
        }
        if b.len() != d {
            return Err(Error::dims("LinearProgram::new (b)", d, b.len()));
        }
        if c.len() != n {
            return Err(Error::dims("LinearProgram::new (c)", n, c.len()));
        }
        check_finite(&b)?;
        check_finite(&c)?;
        if !(diameter > 0.0) || !diameter.is_finite() {
            return Err(Error::Domain(format!("diameter bound R must be positive, got {diameter}")));
        }
        let c_inf = norm_inf(&c);
        let lipschitz = match lipschitz {
            None => c_inf.max(MIN_LIPSCHITZ),
            Some(l) if l.is_finite() && l >= c_inf && l > 0.0 => l,
            Some(l) => {
                return Err(Error::Domain(format!("Lipschitz bound L={l} is below ‖c‖_∞={c_inf}")))
            }
        };
        check_full_row_rank(&a)?;
        Ok(LinearProgram {
            a,
            b,
            c,
            diameter,
            lipschitz,
        })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn num_constraints(&self) -> usize {
        self.a.rows()
    }

    pub fn num_variables(&self) -> usize {
        self.a.cols()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        dot(&self.c, x)
    }

    /// `‖Ax − b‖₁`.
    pub fn infeasibility_l1(&self, x: &[f64]) -> f64 {
        let ax = self.a.mat_vec(x);
        ax.iter().zip(&self.b).map(|(l, r)| (l - r).abs()).sum()
    }

    /// `R Σ|A_ij| + ‖b‖₁`, the scale in the infeasibility guarantee.
    pub fn infeasibility_scale(&self) -> f64 {
        self.diameter * norm1(self.a.as_slice()) + norm1(&self.b)
    }
}

pub(crate) fn check_full_row_rank(a: &Matrix) -> Result<()> {
    let gram = form_gram(a, &vec![1.0; a.cols()])?;
    Cholesky::factor_strict(&gram, 1e-12).map(|_| ()).map_err(|e| match e {
        Error::NotPositiveDefinite { pivot, .. } => {
            Error::Domain(format!("constraint matrix is not full row rank (row {pivot})"))
        }
        other => other,
    })
}

/// The `(d+1) × (n+2)` feasible-start problem together with its initial
/// strictly feasible primal-dual triple.
#[derive(Debug, Clone, PartialEq)]
pub struct ReformulatedLP {
    pub lpbar: LinearProgram,
    pub x0: Vec<f64>,
    pub y0: Vec<f64>,
    pub s0: Vec<f64>,
    pub delta: f64,
    pub original_n: usize,
    pub original_d: usize,
}

impl ReformulatedLP {
    /// Index of the slack-like `τ` coordinate.
    pub fn tau_index(&self) -> usize {
        self.original_n
    }

    /// Index of the `θ` coordinate, which measures residual infeasibility.
    pub fn theta_index(&self) -> usize {
        self.original_n + 1
    }
}

/// Builds
///
/// ```text
///     Ā = [ A    0   b/R − A1 ]     b̄ = [ b/R ]     c̄ = [ (δ/L) c ]
///         [ 1ᵀ   1   0        ]          [ n+1 ]          [ 0       ]
///                                                          [ 1       ]
/// ```
///
/// with `x̄ = 1`, `ȳ = (0, −1)` and `s̄ = (1 + (δ/L)c, 1, 1)`.
pub fn reformulate(lp: &LinearProgram, delta: f64) -> Result<ReformulatedLP> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1], got {delta}")));
    }
    let (d, n) = (lp.num_constraints(), lp.num_variables());
    let r = lp.diameter;
    let scale = delta / lp.lipschitz;

    let mut data = Vec::with_capacity((d + 1) * (n + 2));
    for i in 0..d {
        let row = lp.a.row(i);
        let row_sum: f64 = row.iter().sum();
        data.extend_from_slice(row);
        data.push(0.0);
        data.push(lp.b[i] / r - row_sum);
    }
    data.extend(std::iter::repeat(1.0).take(n + 1));
    data.push(0.0);
    let abar = Matrix::new(d + 1, n + 2, data)?;

    let mut bbar: Vec<f64> = lp.b.iter().map(|bi| bi / r).collect();
    bbar.push((n + 1) as f64);

    let mut cbar: Vec<f64> = lp.c.iter().map(|ci| scale * ci).collect();
    cbar.push(0.0);
    cbar.push(1.0);

    let x0 = vec![1.0; n + 2];
    let mut y0 = vec![0.0; d + 1];
    y0[d] = -1.0;
    let mut s0: Vec<f64> = lp.c.iter().map(|ci| 1.0 + scale * ci).collect();
    s0.push(1.0);
    s0.push(1.0);

    // ‖c̄‖_∞ = 1 since δ ≤ 1; the merged row pins ‖x̄[..=n]‖₁ = n + 1, which is
    // recorded as the nominal diameter (θ is not covered by it).
    let lpbar = LinearProgram::new(abar, bbar, cbar, (n + 1) as f64, Some(1.0))?;
    Ok(ReformulatedLP {
        lpbar,
        x0,
        y0,
        s0,
        delta,
        original_n: n,
        original_d: d,
    })
}

/// `x̂ = R · x̄[0..n]`. Entries down to −1e-12 are clamped to zero.
pub fn recover_solution(xbar: &[f64], refm: &ReformulatedLP, lp: &LinearProgram) -> Result<Vec<f64>> {
    let n = refm.original_n;
    if xbar.len() != n + 2 {
        return Err(Error::dims("recover_solution", n + 2, xbar.len()));
    }
    if let Some(i) = xbar.iter().position(|&v| v < -1e-12) {
        return Err(Error::Domain(format!("recover_solution: x̄[{i}] = {} is negative", xbar[i])));
    }
    Ok(xbar[..n].iter().map(|&v| lp.diameter * v.max(0.0)).collect())
}

pub fn duality_gap(x: &[f64], s: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), s.len());
    dot(x, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tiny() -> LinearProgram {
        let a = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        LinearProgram::new(a, vec![1.0], vec![-1.0, 0.0], 2.0, Some(1.0)).unwrap()
    }

    fn random_lp(rng: &mut ChaCha8Rng, d: usize, n: usize) -> LinearProgram {
        let data = (0..d * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = Matrix::new(d, n, data).unwrap();
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
        let b = a.mat_vec(&x);
        let c = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        LinearProgram::new(a, b, c, 2.0 * norm1(&x), None).unwrap()
    }

    #[test]
    fn validation() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert!(LinearProgram::new(a.clone(), vec![1.0], vec![1.0], 1.0, None).is_err());
        assert!(LinearProgram::new(a.clone(), vec![1.0], vec![1.0, 0.0], 0.0, None).is_err());
        assert!(LinearProgram::new(a.clone(), vec![1.0], vec![2.0, 0.0], 1.0, Some(1.0)).is_err());
        let lp = LinearProgram::new(a, vec![1.0], vec![0.0, 0.0], 1.0, None).unwrap();
        assert_eq!(lp.lipschitz(), MIN_LIPSCHITZ);
        let wide = Matrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        assert!(LinearProgram::new(wide, vec![1.0, 2.0], vec![1.0], 1.0, None).is_err());
        let dependent = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]).unwrap();
        assert!(matches!(
            LinearProgram::new(dependent, vec![1.0, 2.0], vec![0.0; 3], 1.0, None),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn reformulation_of_tiny_example() {
        let r = reformulate(&tiny(), 0.5).unwrap();
        let abar = r.lpbar.a();
        assert_eq!(abar.to_rows(), vec![vec![1.0, 1.0, 0.0, -1.5], vec![1.0, 1.0, 1.0, 0.0]]);
        assert_eq!(r.lpbar.b(), &[0.5, 3.0]);
        assert_eq!(r.lpbar.c(), &[-0.5, 0.0, 0.0, 1.0]);
        assert_eq!(abar.mat_vec(&[1.0; 4]), vec![0.5, 3.0]);
        assert_eq!(r.y0, vec![0.0, -1.0]);
        assert_eq!(r.s0, vec![0.5, 1.0, 1.0, 1.0]);
        assert_eq!(r.theta_index(), 3);
        assert!(reformulate(&tiny(), 0.0).is_err());
        assert!(reformulate(&tiny(), 1.5).is_err());
    }

    #[test]
    fn initial_triple_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..50 {
            let d = rng.gen_range(1..8);
            let n = rng.gen_range(d..20);
            let lp = random_lp(&mut rng, d, n);
            let delta = if trial == 0 { 1.0 } else { rng.gen_range(1e-4..1.0) };
            let r = reformulate(&lp, delta).unwrap();
            let abar = r.lpbar.a();
            for (lhs, rhs) in abar.mat_vec(&r.x0).iter().zip(r.lpbar.b()) {
                assert!((lhs - rhs).abs() <= 1e-10);
            }
            let aty = abar.mat_t_vec(&r.y0);
            for i in 0..n + 2 {
                let want = r.lpbar.c()[i] - aty[i];
                assert!((r.s0[i] - want).abs() <= 1e-10);
                assert!(r.x0[i] > 0.0 && r.s0[i] > 0.0);
                let mu = r.x0[i] * r.s0[i];
                assert!(mu >= 1.0 - delta - 1e-12 && mu <= 1.0 + delta + 1e-12);
            }
        }
    }

    #[test]
    fn recover_examples() {
        let lp = tiny();
        let r = reformulate(&lp, 0.5).unwrap();
        assert_eq!(recover_solution(&[0.5, 0.0, 0.0, 0.0], &r, &lp).unwrap(), vec![1.0, 0.0]);
        assert!(recover_solution(&[0.5, -1e-6, 0.0, 0.0], &r, &lp).is_err());
        assert!(recover_solution(&[0.5, 0.0, 0.0], &r, &lp).is_err());
        assert_eq!(recover_solution(&[0.5, -1e-13, 0.0, 0.0], &r, &lp).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn reformulate_then_recover_is_identity_on_feasible_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let d = rng.gen_range(1..6);
            let n = rng.gen_range(d + 1..15);
            let lp = random_lp(&mut rng, d, n);
            let r = reformulate(&lp, 0.1).unwrap();
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
            let mut xbar: Vec<f64> = x.iter().map(|v| v / lp.diameter()).collect();
            xbar.extend([0.0, 0.0]);
            let back = recover_solution(&xbar, &r, &lp).unwrap();
            for (u, v) in back.iter().zip(&x) {
                assert!((u - v).abs() <= 1e-12 * (1.0 + v.abs()));
            }
        }
    }

    #[test]
    fn duality_gap_examples() {
        assert_eq!(duality_gap(&[1.0; 3], &[1.0; 3]), 3.0);
        assert_eq!(duality_gap(&[2.0, 0.0], &[0.0, 5.0]), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x: Vec<f64> = (0..17).map(|_| rng.gen_range(0.0..3.0)).collect();
        let s: Vec<f64> = (0..17).map(|_| rng.gen_range(0.0..3.0)).collect();
        let mut want = 0.0;
        for i in (0..17).rev() {
            want += x[i] * s[i];
        }
        assert!((duality_gap(&x, &s) - want).abs() < 1e-12);
    }
}
