//! Dense row-major kernels shared by the solver, the maintainer and the oracles.
//!
//! Everything is plain cubic-time arithmetic on `f64`. Vectors are passed as
//! slices and returned as `Vec<f64>`; only matrices get a dedicated type.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Selects between strictly sequential kernels and row-parallel ones.
///
/// Row-parallel products keep the per-entry summation order, so in practice
/// both produce identical bits; only `Sequential` promises it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Kernels {
    #[default]
    Sequential,
    Parallel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims("Matrix::new", rows * cols, data.len()));
        }
        check_finite(&data)?;
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::dims("Matrix::from_rows", cols, format!("{} in row {i}", row.len())));
            }
            data.extend_from_slice(row);
        }
        Matrix::new(rows.len(), cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Keeps the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            let src = self.row(i);
            let dst = out.row_mut(i);
            for (k, &j) in cols.iter().enumerate() {
                dst[k] = src[j];
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        norm_inf(&self.data)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dims(
                "Matrix::sub",
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Replaces the matrix by `(M + Mᵀ)/2`.
    pub fn symmetrize(&mut self) {
        let n = self.rows;
        debug_assert_eq!(n, self.cols);
        for i in 0..n {
            for j in (i + 1)..n {
                let avg = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg;
            }
        }
    }

    /// Largest absolute entry of `M - Mᵀ`.
    pub fn asymmetry(&self) -> f64 {
        let n = self.rows;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn mat_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Mᵀ x`, computed without forming the transpose.
    pub fn mat_t_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                axpy(xi, self.row(i), &mut out);
            }
        }
        out
    }
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    mat_mul_with(a, b, Kernels::Sequential)
}

pub fn mat_mul_with(a: &Matrix, b: &Matrix, kernels: Kernels) -> Result<Matrix> {
    if a.cols != b.rows {
        return Err(Error::dims(
            "mat_mul",
            format!("{} rows on the right", a.cols),
            b.rows,
        ));
    }
    let mut out = Matrix::zeros(a.rows, b.cols);
    let row_kernel = |(i, dst): (usize, &mut [f64])| {
        for (k, &aik) in a.row(i).iter().enumerate() {
            if aik != 0.0 {
                axpy(aik, b.row(k), dst);
            }
        }
    };
    if b.cols == 0 {
        return Ok(out);
    }
    match kernels {
        Kernels::Sequential => out.data.chunks_mut(b.cols).enumerate().for_each(row_kernel),
        Kernels::Parallel => out.data.par_chunks_mut(b.cols).enumerate().for_each(row_kernel),
    }
    Ok(out)
}

/// `A diag(w) Aᵀ` for strictly positive weights.
pub fn form_gram(a: &Matrix, w: &[f64]) -> Result<Matrix> {
    if w.len() != a.cols {
        return Err(Error::dims("form_gram", a.cols, w.len()));
    }
    if let Some(i) = w.iter().position(|&wi| !(wi > 0.0) || !wi.is_finite()) {
        return Err(Error::Domain(format!("form_gram: weight w[{i}] = {} is not positive", w[i])));
    }
    let d = a.rows;
    let mut g = Matrix::zeros(d, d);
    let mut scaled = vec![0.0; a.cols];
    for i in 0..d {
        for (s, (&aij, &wj)) in scaled.iter_mut().zip(a.row(i).iter().zip(w)) {
            *s = aij * wj;
        }
        for k in i..d {
            let v = dot(&scaled, a.row(k));
            g.data[i * d + k] = v;
            g.data[k * d + i] = v;
        }
    }
    Ok(g)
}

/// Lower-triangular Cholesky factor `G = L Lᵀ`, possibly of a jittered `G`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
    jitter: f64,
}

impl Cholesky {
    /// Factorizes `g`; on pivot failure retries once with diagonal jitter
    /// `1e-12 · trace(G)/d`.
    pub fn factor(g: &Matrix) -> Result<Self> {
        check_square("Cholesky::factor", g)?;
        match factor_lower(g, 0.0, 0.0) {
            Ok(l) => Ok(Cholesky { l, jitter: 0.0 }),
            Err(_) => {
                let d = g.rows.max(1) as f64;
                let jitter = 1e-12 * g.trace().abs() / d;
                let l = factor_lower(g, jitter, 0.0)?;
                Ok(Cholesky { l, jitter })
            }
        }
    }

    /// Factorization without jitter that also rejects pivots below
    /// `rel_tol · max diag`. Used as a rank test.
    pub fn factor_strict(g: &Matrix, rel_tol: f64) -> Result<Self> {
        check_square("Cholesky::factor_strict", g)?;
        let max_diag = (0..g.rows).map(|i| g.get(i, i)).fold(0.0, f64::max);
        let l = factor_lower(g, 0.0, rel_tol * max_diag)?;
        Ok(Cholesky { l, jitter: 0.0 })
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn dim(&self) -> usize {
        self.l.rows
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.l.rows;
        debug_assert_eq!(b.len(), n);
        for i in 0..n {
            let row = self.l.row(i);
            let s = b[i] - dot(&row[..i], &b[..i]);
            b[i] = s / row[i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= self.l.get(k, i) * b[k];
            }
            b[i] = s / self.l.get(i, i);
        }
    }

    pub fn solve_vec(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

fn check_square(op: &'static str, g: &Matrix) -> Result<()> {
    if g.rows != g.cols {
        return Err(Error::dims(op, "square matrix", format!("{}x{}", g.rows, g.cols)));
    }
    Ok(())
}

fn factor_lower(g: &Matrix, jitter: f64, min_pivot: f64) -> Result<Matrix> {
    let n = g.rows;
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let lj = l.row(j);
        let diag = g.get(j, j) + jitter - dot(&lj[..j], &lj[..j]);
        if !(diag > min_pivot) || !diag.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: diag });
        }
        let ljj = diag.sqrt();
        l.data[j * n + j] = ljj;
        for i in (j + 1)..n {
            let s = g.get(i, j) - dot(&l.data[i * n..i * n + j], &l.data[j * n..j * n + j]);
            l.data[i * n + j] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `G X = B` for symmetric positive definite `G`.
pub fn solve_spd(g: &Matrix, b: &Matrix) -> Result<Matrix> {
    if b.rows != g.rows {
        return Err(Error::dims("solve_spd", g.rows, b.rows));
    }
    let chol = Cholesky::factor(g)?;
    let mut x = Matrix::zeros(b.rows, b.cols);
    let mut col = vec![0.0; b.rows];
    for j in 0..b.cols {
        for (i, c) in col.iter_mut().enumerate() {
            *c = b.get(i, j);
        }
        chol.solve_in_place(&mut col);
        for (i, &c) in col.iter().enumerate() {
            x.set(i, j, c);
        }
    }
    Ok(x)
}

/// LU factorization with partial pivoting for small general systems.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Fails with [`Error::Singular`] when a pivot falls below
    /// `rel_tol · max|entry|`.
    pub fn factor(a: &Matrix, rel_tol: f64) -> Result<Self> {
        check_square("Lu::factor", a)?;
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let threshold = rel_tol * a.max_abs();
        for k in 0..n {
            let (p, pv) = (k..n)
                .map(|i| (i, lu.get(i, k).abs()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pv > threshold) || !pv.is_finite() {
                return Err(Error::Singular { pivot: k, value: pv });
            }
            if p != k {
                perm.swap(p, k);
                for j in 0..n {
                    lu.data.swap(p * n + j, k * n + j);
                }
            }
            let pivot = lu.get(k, k);
            for i in (k + 1)..n {
                let f = lu.get(i, k) / pivot;
                lu.data[i * n + k] = f;
                if f != 0.0 {
                    for j in (k + 1)..n {
                        lu.data[i * n + j] -= f * lu.data[k * n + j];
                    }
                }
            }
        }
        Ok(Lu { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s = dot(&self.lu.row(i)[..i], &x[..i]);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let s = dot(&row[i + 1..], &x[i + 1..]);
            x[i] = (x[i] - s) / row[i];
        }
        x
    }
}

/// `√W Aᵀ (A W Aᵀ)⁻¹ A √W h` from a fresh factorization, without forming
/// the projector.
pub fn project(a: &Matrix, w: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    if h.len() != a.cols {
        return Err(Error::dims("project", a.cols, h.len()));
    }
    let chol = Cholesky::factor(&form_gram(a, w)?)?;
    let sqrt_w: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    let scaled: Vec<f64> = h.iter().zip(&sqrt_w).map(|(hi, sw)| hi * sw).collect();
    let mut y = a.mat_vec(&scaled);
    chol.solve_in_place(&mut y);
    let mut out = a.mat_t_vec(&y);
    for (o, sw) in out.iter_mut().zip(&sqrt_w) {
        *o *= sw;
    }
    Ok(out)
}

/// The full projector `√W Aᵀ (A W Aᵀ)⁻¹ A √W`.
pub fn projection_full(a: &Matrix, w: &[f64]) -> Result<Matrix> {
    let g = form_gram(a, w)?;
    let chol = Cholesky::factor(&g)?;
    let n = a.cols;
    let d = a.rows;
    let sqrt_w: Vec<f64> = w.iter().map(|v| v.sqrt()).collect();
    // B = A √W, then Z = G⁻¹ B column by column.
    let mut b = a.clone();
    for i in 0..d {
        for (bij, sw) in b.row_mut(i).iter_mut().zip(&sqrt_w) {
            *bij *= sw;
        }
    }
    let mut z = Matrix::zeros(d, n);
    let mut col = vec![0.0; d];
    for j in 0..n {
        for (i, c) in col.iter_mut().enumerate() {
            *c = b.get(i, j);
        }
        chol.solve_in_place(&mut col);
        for (i, &c) in col.iter().enumerate() {
            z.set(i, j, c);
        }
    }
    let mut p = mat_mul(&b.transpose(), &z)?;
    p.symmetrize();
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
        let data = (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Matrix::new(rows, cols, data).unwrap()
    }

    fn triple_loop(a: &Matrix, b: &Matrix) -> Vec<Vec<f64>> {
        let mut c = vec![vec![0.0; b.cols()]; a.rows()];
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                for k in 0..a.cols() {
                    c[i][j] += a.get(i, k) * b.get(k, j);
                }
            }
        }
        c
    }

    fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> Matrix {
        let b = random_matrix(rng, n, n);
        let mut g = mat_mul(&b, &b.transpose()).unwrap();
        for i in 0..n {
            let v = g.get(i, i) + 0.1;
            g.set(i, i, v);
        }
        g
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(Matrix::new(2, 2, vec![1.0; 3]), Err(Error::DimensionMismatch { .. })));
        assert_eq!(
            Matrix::new(1, 2, vec![1.0, f64::NAN]).unwrap_err(),
            Error::NonFinite { index: 1 }
        );
    }

    #[test]
    fn mat_mul_identity_and_small() {
        let b = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(mat_mul(&Matrix::identity(2), &b).unwrap(), b);
        let row = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let col = Matrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        assert_eq!(mat_mul(&row, &col).unwrap().as_slice(), &[2.0]);
        assert!(matches!(mat_mul(&row, &row), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn mat_mul_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_matrix(&mut rng, 3, 4);
        let b = random_matrix(&mut rng, 4, 2);
        let want = triple_loop(&a, &b);
        for kernels in [Kernels::Sequential, Kernels::Parallel] {
            let got = mat_mul_with(&a, &b, kernels).unwrap();
            for i in 0..3 {
                for j in 0..2 {
                    assert!((got.get(i, j) - want[i][j]).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn gram_examples() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert_eq!(form_gram(&a, &[1.0, 1.0]).unwrap().as_slice(), &[2.0]);
        let g = form_gram(&Matrix::identity(2), &[2.0, 3.0]).unwrap();
        assert_eq!(g.as_slice(), &[2.0, 0.0, 0.0, 3.0]);
        assert!(matches!(form_gram(&a, &[1.0, 0.0]), Err(Error::Domain(_))));
        assert!(matches!(form_gram(&a, &[1.0, -2.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn gram_matches_triple_loop_and_is_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 3, 6);
        let w: Vec<f64> = (0..6).map(|_| rng.gen_range(0.1..3.0)).collect();
        let g = form_gram(&a, &w).unwrap();
        for i in 0..3 {
            for k in 0..3 {
                let want: f64 = (0..6).map(|j| a.get(i, j) * w[j] * a.get(k, j)).sum();
                assert!((g.get(i, k) - want).abs() < 1e-12);
                assert!((g.get(i, k) - g.get(k, i)).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn solve_spd_examples() {
        let b = Matrix::from_rows(&[vec![1.0, -2.0, 3.5], vec![0.25, 7.0, -1.0]]).unwrap();
        assert_eq!(solve_spd(&Matrix::identity(2), &b).unwrap(), b);
        let g = Matrix::from_diag(&[2.0, 4.0]);
        let x = solve_spd(&g, &Matrix::identity(2)).unwrap();
        for (got, want) in x.as_slice().iter().zip([0.5, 0.0, 0.0, 0.25]) {
            assert!((got - want).abs() <= 1e-15);
        }
    }

    #[test]
    fn solve_spd_residuals_on_seeded_corpus() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..100 {
            let n = 1 + (trial * 7) % 64;
            let g = random_spd(&mut rng, n);
            let b = random_matrix(&mut rng, n, 3);
            let x = solve_spd(&g, &b).unwrap();
            let resid = mat_mul(&g, &x).unwrap().sub(&b).unwrap().frobenius_norm();
            // condition-scaled: ‖G‖_F ‖X‖_F bounds ‖G‖‖G⁻¹‖‖B‖
            let scale = g.frobenius_norm() * x.frobenius_norm();
            assert!(resid <= 1e-9 * scale.max(b.frobenius_norm()), "n={n} resid={resid:e}");
        }
    }

    #[test]
    fn cholesky_jitter_then_hard_failure() {
        // Rank one, positive semidefinite: first attempt hits a zero pivot.
        let g = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let chol = Cholesky::factor(&g).unwrap();
        assert!(chol.jitter() > 0.0);
        let indefinite = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            Cholesky::factor(&indefinite),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
        assert!(Cholesky::factor_strict(&g, 1e-12).is_err());
    }

    #[test]
    fn lu_solves_and_detects_singularity() {
        let a = Matrix::from_rows(&[vec![0.0, 2.0], vec![3.0, 1.0]]).unwrap();
        let lu = Lu::factor(&a, 1e-13).unwrap();
        let x = lu.solve(&[4.0, 5.0]);
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        let s = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(Lu::factor(&s, 1e-12), Err(Error::Singular { .. })));
    }

    #[test]
    fn projection_examples() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let p = projection_full(&a, &[1.0, 1.0]).unwrap();
        for v in p.as_slice() {
            assert!((v - 0.5).abs() < 1e-15);
        }
        let p = projection_full(&Matrix::identity(3), &[0.3, 2.0, 9.0]).unwrap();
        assert!(p.sub(&Matrix::identity(3)).unwrap().max_abs() < 1e-14);
    }

    fn assert_projector(p: &Matrix, d: usize) {
        let p2 = mat_mul(p, p).unwrap();
        let idem = p2.sub(p).unwrap().frobenius_norm();
        assert!(idem <= 1e-8 * (1.0 + p.frobenius_norm()), "idempotence {idem:e}");
        assert!(p.sub(&p.transpose()).unwrap().frobenius_norm() <= 1e-10);
        assert!((p.trace() - d as f64).abs() <= 1e-8 * d as f64);
    }

    #[test]
    fn projection_is_an_orthogonal_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 2, 5);
        let w: Vec<f64> = (0..5).map(|_| rng.gen_range(0.2..5.0)).collect();
        assert_projector(&projection_full(&a, &w).unwrap(), 2);
        for (d, n) in [(3, 8), (6, 20), (10, 30)] {
            let a = random_matrix(&mut rng, d, n);
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..100.0)).collect();
            assert_projector(&projection_full(&a, &w).unwrap(), d);
        }
    }

    #[test]
    fn rank_deficiency_is_caught_by_strict_factorization() {
        // The jitter retry rescues an exactly singular Gram; rank checks use the strict path.
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![-1.0, -1.0]]).unwrap();
        let g = form_gram(&a, &[1.0, 1.0]).unwrap();
        assert!(Cholesky::factor(&g).is_ok());
        assert!(matches!(
            Cholesky::factor_strict(&g, 1e-12),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
    }
}
