//! Real/complex conversions, small dense matrices and Gram-Schmidt QR.
//!
//! Everything here is row-major and sized for the 16x16 real systems the
//! decoders work on. Nothing tries to be a general linear algebra package.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexValue = Complex64;

/// Residual column norms at or below this are treated as linearly dependent.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Count of real multiplications and divisions spent by an operation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Flops {
    pub mults: u64,
    pub divs: u64,
}

impl Flops {
    pub const fn new(mults: u64, divs: u64) -> Self {
        Self { mults, divs }
    }
}

impl std::ops::Add for Flops {
    type Output = Flops;
    fn add(self, rhs: Flops) -> Flops {
        Flops::new(self.mults + rhs.mults, self.divs + rhs.divs)
    }
}

impl std::ops::AddAssign for Flops {
    fn add_assign(&mut self, rhs: Flops) {
        self.mults += rhs.mults;
        self.divs += rhs.divs;
    }
}

/// Dense real matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn transpose(&self) -> RealMatrix {
        RealMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn matmul(&self, rhs: &RealMatrix) -> Result<RealMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = RealMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == 0.0 {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c] += a * rhs[(k, c)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `selfᵀ·x` without forming the transpose.
    pub fn transpose_matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} rows",
                x.len(),
                self.rows
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (r, &xr) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(r)) {
                *o += a * xr;
            }
        }
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Max-abs entrywise difference; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &RealMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Column `j` of the result is column `order[j]` of `self`.
    pub fn select_columns(&self, order: &[usize]) -> RealMatrix {
        RealMatrix::from_fn(self.rows, order.len(), |r, c| self[(r, order[c])])
    }

    /// Column-major concatenation.
    pub fn vec_stack(&self) -> Vec<f64> {
        (0..self.cols).flat_map(|c| (0..self.rows).map(move |r| (r, c))).map(|i| self[i]).collect()
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<ComplexValue>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ComplexValue::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ComplexValue::new(1.0, 0.0);
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<ComplexValue>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Inverse of [`ComplexMatrix::vec_stack`].
    pub fn from_column_major(rows: usize, cols: usize, stacked: &[ComplexValue]) -> Result<Self> {
        if stacked.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                stacked.len()
            )));
        }
        let mut m = Self::zeros(rows, cols);
        for c in 0..cols {
            for r in 0..rows {
                m[(r, c)] = stacked[c * rows + r];
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[ComplexValue] {
        &self.data
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                out[(r, c)] = (0..self.cols).map(|k| self[(r, k)] * rhs[(k, c)]).sum();
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::DimensionMismatch("matrix sum of unequal shapes".into()));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Column-major concatenation.
    pub fn vec_stack(&self) -> Vec<ComplexValue> {
        let mut out = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                out.push(self[(r, c)]);
            }
        }
        out
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = ComplexValue;
    fn index(&self, (r, c): (usize, usize)) -> &ComplexValue {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut ComplexValue {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// `z ↦ [[re, -im], [im, re]]`.
pub fn check_expand(z: ComplexValue) -> RealMatrix {
    RealMatrix { rows: 2, cols: 2, data: vec![z.re, -z.im, z.im, z.re] }
}

/// Replaces every entry of `m` with its 2x2 real block.
pub fn check_expand_matrix(m: &ComplexMatrix) -> RealMatrix {
    let mut out = RealMatrix::zeros(2 * m.rows, 2 * m.cols);
    for r in 0..m.rows {
        for c in 0..m.cols {
            let z = m[(r, c)];
            out[(2 * r, 2 * c)] = z.re;
            out[(2 * r, 2 * c + 1)] = -z.im;
            out[(2 * r + 1, 2 * c)] = z.im;
            out[(2 * r + 1, 2 * c + 1)] = z.re;
        }
    }
    out
}

/// `[v1.re, v1.im, …, vn.re, vn.im]`.
pub fn tilde_interleave(v: &[ComplexValue]) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Inverse of [`tilde_interleave`]. A trailing odd entry is ignored.
pub fn tilde_deinterleave(v: &[f64]) -> Vec<ComplexValue> {
    v.chunks_exact(2).map(|p| ComplexValue::new(p[0], p[1])).collect()
}

/// Computes `(I_t ⊗ block)·m` by applying `block` to each row band of `m`.
pub fn kron_identity_apply(block: &RealMatrix, t: usize, m: &RealMatrix) -> Result<RealMatrix> {
    if block.cols * t != m.rows {
        return Err(Error::DimensionMismatch(format!(
            "I_{t} ⊗ ({}x{}) does not conform with {} rows",
            block.rows, block.cols, m.rows
        )));
    }
    let mut out = RealMatrix::zeros(block.rows * t, m.cols);
    for band in 0..t {
        for r in 0..block.rows {
            let out_row = band * block.rows + r;
            for k in 0..block.cols {
                let a = block[(r, k)];
                if a == 0.0 {
                    continue;
                }
                let in_row = band * block.cols + k;
                for c in 0..m.cols {
                    out[(out_row, c)] += a * m[(in_row, c)];
                }
            }
        }
    }
    Ok(out)
}

/// Thin QR factors: `q` has orthonormal columns, `r` is upper triangular
/// with a nonnegative diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct QrFactors {
    pub q: RealMatrix,
    pub r: RealMatrix,
}

impl QrFactors {
    /// Multiplications and divisions spent by [`gram_schmidt_qr`] on an m x n input.
    ///
    /// Each of the two projection passes costs `2·m` multiplications per
    /// (earlier column, current column) pair; each column then needs `m`
    /// multiplications for its norm and `m` divisions to normalize.
    pub fn cost(m: usize, n: usize) -> Flops {
        let (m, n) = (m as u64, n as u64);
        let pairs = n * (n - 1) / 2;
        Flops::new(2 * 2 * m * pairs + m * n, m * n)
    }

    /// `Qᵀ·y`.
    pub fn project(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.q.transpose_matvec(y)
    }

    /// Solves `R·x = z` by back-substitution.
    pub fn back_substitute(&self, z: &[f64]) -> Result<Vec<f64>> {
        let n = self.r.cols();
        if z.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side of length {} for a {n}x{n} triangle",
                z.len()
            )));
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let diag = self.r[(i, i)];
            if diag.abs() <= RANK_TOLERANCE {
                return Err(Error::RankDeficient { column: i, norm: diag.abs() });
            }
            let tail: f64 = ((i + 1)..n).map(|k| self.r[(i, k)] * x[k]).sum();
            x[i] = (z[i] - tail) / diag;
        }
        Ok(x)
    }

    /// Flops of [`QrFactors::project`] followed by [`QrFactors::back_substitute`].
    pub fn solve_cost(m: usize, n: usize) -> Flops {
        let (m, n) = (m as u64, n as u64);
        Flops::new(m * n + n * (n - 1) / 2, n)
    }
}

/// Classical Gram-Schmidt QR of an m x n matrix with m ≥ n.
///
/// `R[k][j] = ⟨q_k, h_j⟩`, `r_j = h_j − Σ_k R[k][j]·q_k`, `R[j][j] = ‖r_j‖` and
/// `q_j = r_j / ‖r_j‖`. The projection step is applied a second time to the
/// residual and folded into `R`, which keeps `Qᵀ·Q` at unit roundoff for the
/// condition numbers random channels produce.
pub fn gram_schmidt_qr(a: &RealMatrix) -> Result<QrFactors> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::DimensionMismatch(format!("QR needs rows ≥ cols, got {m}x{n}")));
    }
    let mut q = RealMatrix::zeros(m, n);
    let mut r = RealMatrix::zeros(n, n);
    let mut residual = vec![0.0; m];
    let mut coeffs = vec![0.0; n];
    for j in 0..n {
        for (i, x) in residual.iter_mut().enumerate() {
            *x = a[(i, j)];
        }
        for _pass in 0..2 {
            // classical: all projections against the same residual snapshot
            for (k, coeff) in coeffs.iter_mut().enumerate().take(j) {
                *coeff = (0..m).map(|i| q[(i, k)] * residual[i]).sum();
            }
            for k in 0..j {
                r[(k, j)] += coeffs[k];
                for (i, x) in residual.iter_mut().enumerate() {
                    *x -= coeffs[k] * q[(i, k)];
                }
            }
        }
        let norm = residual.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= RANK_TOLERANCE {
            return Err(Error::RankDeficient { column: j, norm });
        }
        r[(j, j)] = norm;
        for (i, x) in residual.iter().enumerate() {
            q[(i, j)] = x / norm;
        }
    }
    Ok(QrFactors { q, r })
}

/// Solves the square system `a·x = b` through QR back-substitution.
pub fn solve_linear(a: &RealMatrix, b: &[f64]) -> Result<Vec<f64>> {
    if a.rows() != a.cols() {
        return Err(Error::DimensionMismatch(format!(
            "solve_linear needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch(format!(
            "right-hand side of length {} for {} rows",
            b.len(),
            a.rows()
        )));
    }
    let qr = gram_schmidt_qr(a)?;
    qr.back_substitute(&qr.project(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RealMatrix {
        RealMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
    }

    /// Materializes `I_t ⊗ block`.
    fn explicit_kron(block: &RealMatrix, t: usize) -> RealMatrix {
        let (br, bc) = (block.rows(), block.cols());
        RealMatrix::from_fn(br * t, bc * t, |r, col| {
            if r / br == col / bc {
                block[(r % br, col % bc)]
            } else {
                0.0
            }
        })
    }

    #[test]
    fn check_expand_examples() {
        assert_eq!(check_expand(c(1.0, 0.0)).as_slice(), &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(check_expand(c(0.0, 1.0)).as_slice(), &[0.0, -1.0, 1.0, 0.0]);
        assert_eq!(check_expand(c(3.0, -2.0)).as_slice(), &[3.0, 2.0, -2.0, 3.0]);
    }

    #[test]
    fn check_expand_matrix_examples() {
        let i = ComplexMatrix::from_row_major(1, 1, vec![c(0.0, 1.0)]).unwrap();
        assert_eq!(check_expand_matrix(&i).as_slice(), &[0.0, -1.0, 1.0, 0.0]);
        assert_eq!(check_expand_matrix(&ComplexMatrix::identity(2)), RealMatrix::identity(4));
    }

    #[test]
    fn check_expand_matrix_matches_complex_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let h = ComplexMatrix::from_row_major(
                2,
                4,
                (0..8).map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect(),
            )
            .unwrap();
            let s: Vec<_> =
                (0..4).map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
            let direct = h.matmul(&ComplexMatrix::from_column_major(4, 1, &s).unwrap()).unwrap();
            let real = check_expand_matrix(&h).matvec(&tilde_interleave(&s)).unwrap();
            let expected = tilde_interleave(direct.as_slice());
            for (a, b) in real.iter().zip(&expected) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn check_expand_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..1000 {
            let a = c(rng.sample(StandardNormal), rng.sample(StandardNormal));
            let b = c(rng.sample(StandardNormal), rng.sample(StandardNormal));
            let lhs = check_expand(a * b);
            let rhs = check_expand(a).matmul(&check_expand(b)).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn tilde_examples() {
        assert_eq!(tilde_interleave(&[c(1.0, 2.0)]), vec![1.0, 2.0]);
        assert_eq!(tilde_interleave(&[c(0.0, 1.0), c(0.0, -1.0)]), vec![0.0, 1.0, 0.0, -1.0]);
        let v = vec![c(1.5, -2.0), c(0.25, 8.0)];
        assert_eq!(tilde_deinterleave(&tilde_interleave(&v)), v);
    }

    #[test]
    fn vec_stack_examples() {
        let m = RealMatrix::from_row_major(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.vec_stack(), vec![1.0, 3.0, 2.0, 4.0]);
        let col = RealMatrix::from_row_major(3, 1, vec![5.0, 6.0, 7.0]).unwrap();
        assert_eq!(col.vec_stack(), vec![5.0, 6.0, 7.0]);

        let z = ComplexMatrix::from_row_major(2, 3, (0..6).map(|k| c(k as f64, -(k as f64))).collect())
            .unwrap();
        let back = ComplexMatrix::from_column_major(2, 3, &z.vec_stack()).unwrap();
        assert_eq!(back, z);
    }

    #[test]
    fn kron_identity_apply_trivial_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let block = gaussian_matrix(&mut rng, 3, 4);
        let m = gaussian_matrix(&mut rng, 4, 5);
        assert!(kron_identity_apply(&block, 1, &m).unwrap().max_abs_diff(&block.matmul(&m).unwrap()) < 1e-15);
        let m8 = gaussian_matrix(&mut rng, 8, 3);
        assert_eq!(kron_identity_apply(&RealMatrix::identity(4), 2, &m8).unwrap(), m8);
    }

    #[test]
    fn kron_identity_apply_matches_explicit_kronecker() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let block = gaussian_matrix(&mut rng, 4, 8);
        let g = gaussian_matrix(&mut rng, 32, 16);
        let fast = kron_identity_apply(&block, 4, &g).unwrap();
        let slow = explicit_kron(&block, 4).matmul(&g).unwrap();
        assert_eq!((fast.rows(), fast.cols()), (16, 16));
        assert!(fast.max_abs_diff(&slow) < 1e-12);
    }

    #[test]
    fn kron_identity_apply_rejects_bad_shapes() {
        let block = RealMatrix::identity(2);
        let m = RealMatrix::zeros(5, 1);
        assert!(matches!(kron_identity_apply(&block, 2, &m), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn qr_examples() {
        let qr = gram_schmidt_qr(&RealMatrix::identity(4)).unwrap();
        assert_eq!(qr.q, RealMatrix::identity(4));
        assert_eq!(qr.r, RealMatrix::identity(4));

        let a = RealMatrix::from_row_major(2, 1, vec![3.0, 4.0]).unwrap();
        let qr = gram_schmidt_qr(&a).unwrap();
        assert!((qr.q[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((qr.q[(1, 0)] - 0.8).abs() < 1e-15);
        assert!((qr.r[(0, 0)] - 5.0).abs() < 1e-15);
    }

    #[test]
    fn qr_rejects_dependent_columns() {
        let a = RealMatrix::from_row_major(3, 2, vec![1.0, 2.0, 2.0, 4.0, 3.0, 6.0]).unwrap();
        assert!(matches!(gram_schmidt_qr(&a), Err(Error::RankDeficient { column: 1, .. })));
    }

    #[test]
    fn qr_random_16x16_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let eye = RealMatrix::identity(16);
        for _ in 0..1000 {
            let a = gaussian_matrix(&mut rng, 16, 16);
            let qr = gram_schmidt_qr(&a).unwrap();
            let qtq = qr.q.transpose().matmul(&qr.q).unwrap();
            assert!(qtq.max_abs_diff(&eye) < 1e-10);
            assert!(qr.q.matmul(&qr.r).unwrap().max_abs_diff(&a) < 1e-9);
            for i in 0..16 {
                assert!(qr.r[(i, i)] >= 0.0);
                for j in 0..i {
                    assert_eq!(qr.r[(i, j)], 0.0);
                }
            }
            // off-diagonal entries are inner products ⟨q_k, h_j⟩
            for k in 0..16 {
                for j in (k + 1)..16 {
                    let ip: f64 = (0..16).map(|i| qr.q[(i, k)] * a[(i, j)]).sum();
                    assert!((ip - qr.r[(k, j)]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn qr_cost_for_16x16() {
        // two passes of 2·16 mults over 120 pairs, 16 mults per norm, 16 divs per column
        assert_eq!(QrFactors::cost(16, 16), Flops::new(4 * 16 * 120 + 256, 256));
    }

    #[test]
    fn solve_linear_examples() {
        let b = vec![1.0, -2.0, 3.5];
        assert_eq!(solve_linear(&RealMatrix::identity(3), &b).unwrap(), b);

        let d = RealMatrix::from_fn(3, 3, |r, c| if r == c { (r + 2) as f64 } else { 0.0 });
        let x = solve_linear(&d, &b).unwrap();
        for i in 0..3 {
            assert!((x[i] - b[i] / (i + 2) as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn solve_linear_random_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for _ in 0..200 {
            let a = gaussian_matrix(&mut rng, 16, 16);
            let b: Vec<f64> = (0..16).map(|_| rng.sample(StandardNormal)).collect();
            let x = solve_linear(&a, &b).unwrap();
            let ax = a.matvec(&x).unwrap();
            let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let resid = ax.iter().zip(&b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
            assert!(resid <= 1e-8 * scale, "residual {resid}");
        }
    }

    #[test]
    fn solve_linear_rejects_singular() {
        let a = RealMatrix::from_row_major(2, 2, vec![1.0, 2.0, 2.0, 4.0]).unwrap();
        assert!(matches!(solve_linear(&a, &[1.0, 1.0]), Err(Error::RankDeficient { .. })));
    }
}
