//! Small dense complex linear algebra for receiver-side whitening.
//!
//! Matrices here are at most 8x8, stored dense and row-major. The Cholesky
//! factorization, the triangular inverse and the whitening product all
//! record their arithmetic in an [`OpCounter`] so the cost difference
//! between the diagonal and the dense whitening paths can be measured
//! rather than asserted.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use num_complex::Complex64;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use num_traits::Zero;
use thiserror::Error;

/// Complex sample type used throughout the crate.
pub type C64 = Complex64;

/// Absolute tolerance used to accept a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Relative diagonal loading applied when a factorization hits a
/// non-positive pivot.
pub const REGULARIZATION_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("matrix is not positive definite (pivot {pivot} <= 0 after regularization)")]
    NotPositiveDefinite { pivot: usize },
    #[error("dimension mismatch: {left_rows}x{left_cols} * {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian at ({row}, {col})")]
    NotHermitian { row: usize, col: usize },
    #[error("matrix has a non-finite entry")]
    NonFinite,
}

/// Arithmetic event counts for one kernel invocation (or a sum of them).
///
/// Multiplying a complex number by a real scale and taking `|z|^2` are
/// both counted as one complex multiply.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounter {
    pub complex_mults: u64,
    pub complex_adds: u64,
    pub divisions: u64,
    pub sqrts: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn mul(&mut self, n: u64) {
        self.complex_mults += n;
    }

    #[inline]
    pub fn add(&mut self, n: u64) {
        self.complex_adds += n;
    }

    #[inline]
    pub fn div(&mut self, n: u64) {
        self.divisions += n;
    }

    #[inline]
    pub fn sqrt(&mut self, n: u64) {
        self.sqrts += n;
    }

    /// Sum of every counted event.
    pub fn total(&self) -> u64 {
        self.complex_mults + self.complex_adds + self.divisions + self.sqrts
    }

    /// Count of the operation class that dominates a whitening setup.
    ///
    /// The dense path is dominated by multiplies (cubic in N); the diagonal
    /// path performs no multiplies at all, only one square root and one
    /// reciprocal per antenna.
    pub fn dominant(&self) -> u64 {
        if self.complex_mults > 0 {
            self.complex_mults
        } else {
            self.divisions + self.sqrts
        }
    }

    pub fn merge(&mut self, other: &OpCounter) {
        self.complex_mults += other.complex_mults;
        self.complex_adds += other.complex_adds;
        self.divisions += other.divisions;
        self.sqrts += other.sqrts;
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, " ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, " {:+.4}{:+.4}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data. Panics if the length is wrong.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data length");
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Column vector.
    pub fn column(values: &[C64]) -> Self {
        Self::from_row_major(values.len(), 1, values.to_vec())
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
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_structurally_diagonal(&self) -> bool {
        for r in 0..self.rows {
            for c in 0..self.cols {
                if r != c && !self[(r, c)].is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// True when every entry above the diagonal is exactly zero.
    pub fn is_lower_triangular(&self) -> bool {
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                if !self[(r, c)].is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Plain triple-loop product (uncounted).
    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
        if self.cols != rhs.rows {
            return Err(self.mismatch(rhs));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(self.mismatch(rhs));
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self::from_row_major(self.rows, self.cols, data))
    }

    pub fn scale(&self, s: f64) -> ComplexMatrix {
        let data = self.data.iter().map(|z| z * s).collect();
        Self::from_row_major(self.rows, self.cols, data)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn mismatch(&self, rhs: &ComplexMatrix) -> NumericsError {
        NumericsError::DimensionMismatch {
            left_rows: self.rows,
            left_cols: self.cols,
            right_rows: rhs.rows,
            right_cols: rhs.cols,
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// Square Hermitian matrix with a real, non-negative diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    /// Validates `m` against the Hermitian invariants.
    pub fn new(m: ComplexMatrix) -> Result<Self, NumericsError> {
        if !m.is_square() {
            return Err(NumericsError::NotSquare {
                rows: m.rows,
                cols: m.cols,
            });
        }
        if !m.is_finite() {
            return Err(NumericsError::NonFinite);
        }
        let n = m.rows;
        for r in 0..n {
            let d = m[(r, r)];
            if d.im != 0.0 || d.re < 0.0 {
                return Err(NumericsError::NotHermitian { row: r, col: r });
            }
            for c in (r + 1)..n {
                if (m[(r, c)] - m[(c, r)].conj()).norm() > HERMITIAN_TOL {
                    return Err(NumericsError::NotHermitian { row: r, col: c });
                }
            }
        }
        Ok(Self(m))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self, NumericsError> {
        let d: Vec<C64> = diag.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::new(ComplexMatrix::from_diagonal(&d))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.rows
    }

    #[inline]
    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    /// `diag(self)` as a new Hermitian matrix.
    pub fn diagonal_part(&self) -> HermitianMatrix {
        let d: Vec<C64> = (0..self.dim()).map(|i| self.0[(i, i)]).collect();
        Self(ComplexMatrix::from_diagonal(&d))
    }

    pub fn is_diagonal(&self) -> bool {
        self.0.is_structurally_diagonal()
    }
}

impl Index<(usize, usize)> for HermitianMatrix {
    type Output = C64;

    #[inline]
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

/// Lower-triangular Cholesky factor `L` with `R = L L^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    lower: ComplexMatrix,
    is_diagonal: bool,
    regularized: bool,
}

impl CholeskyFactor {
    /// Wraps a lower-triangular matrix with a positive real diagonal.
    pub fn from_lower(lower: ComplexMatrix) -> Result<Self, NumericsError> {
        if !lower.is_square() {
            return Err(NumericsError::NotSquare {
                rows: lower.rows,
                cols: lower.cols,
            });
        }
        if !lower.is_lower_triangular() || !lower.is_finite() {
            return Err(NumericsError::NotPositiveDefinite { pivot: 0 });
        }
        for i in 0..lower.rows {
            let d = lower[(i, i)];
            if d.im != 0.0 || d.re <= 0.0 {
                return Err(NumericsError::NotPositiveDefinite { pivot: i });
            }
        }
        let is_diagonal = lower.is_structurally_diagonal();
        Ok(Self {
            lower,
            is_diagonal,
            regularized: false,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.lower.rows
    }

    #[inline]
    pub fn lower(&self) -> &ComplexMatrix {
        &self.lower
    }

    #[inline]
    pub fn is_diagonal(&self) -> bool {
        self.is_diagonal
    }

    /// Whether diagonal loading was needed to complete the factorization.
    #[inline]
    pub fn regularized(&self) -> bool {
        self.regularized
    }

    /// `L L^H`, uncounted.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.lower
            .matmul(&self.lower.conj_transpose())
            .expect("square factor")
    }
}

/// Factorizes `r`, taking the O(N) path when `r` is structurally diagonal.
///
/// A non-positive pivot triggers one retry on `R + eps * (tr(R)/N) * I`
/// (`eps` alone when the trace is zero).
pub fn cholesky(r: &HermitianMatrix, counter: &mut OpCounter) -> Result<CholeskyFactor, NumericsError> {
    if r.is_diagonal() {
        cholesky_diagonal(&r.diagonal(), counter)
    } else {
        cholesky_dense(r, counter)
    }
}

/// Square roots of a non-negative diagonal, one sqrt per entry.
pub fn cholesky_diagonal(diag: &[f64], counter: &mut OpCounter) -> Result<CholeskyFactor, NumericsError> {
    if diag.iter().any(|d| !d.is_finite() || *d < 0.0) {
        return Err(NumericsError::NonFinite);
    }
    let n = diag.len();
    let mut shift = 0.0;
    if diag.iter().any(|&d| d <= 0.0) {
        shift = regularization_shift(diag.iter().sum::<f64>(), n);
    }
    let mut lower = ComplexMatrix::zeros(n, n);
    for (i, &d) in diag.iter().enumerate() {
        let v = d + shift;
        if v <= 0.0 {
            return Err(NumericsError::NotPositiveDefinite { pivot: i });
        }
        counter.sqrt(1);
        lower[(i, i)] = C64::new(v.sqrt(), 0.0);
    }
    Ok(CholeskyFactor {
        lower,
        is_diagonal: true,
        regularized: shift > 0.0,
    })
}

/// Dense column-by-column factorization, regardless of structure.
pub fn cholesky_dense(r: &HermitianMatrix, counter: &mut OpCounter) -> Result<CholeskyFactor, NumericsError> {
    let mut scratch = OpCounter::new();
    match factor_dense(r, 0.0, &mut scratch) {
        Ok(lower) => {
            counter.merge(&scratch);
            Ok(CholeskyFactor {
                lower,
                is_diagonal: false,
                regularized: false,
            })
        }
        Err(_) => {
            // the failed attempt still did the work
            counter.merge(&scratch);
            let shift = regularization_shift(r.trace(), r.dim());
            let lower = factor_dense(r, shift, counter)?;
            Ok(CholeskyFactor {
                lower,
                is_diagonal: false,
                regularized: true,
            })
        }
    }
}

fn regularization_shift(trace: f64, n: usize) -> f64 {
    let mean = trace / n as f64;
    if mean > 0.0 {
        REGULARIZATION_EPS * mean
    } else {
        REGULARIZATION_EPS
    }
}

fn factor_dense(r: &HermitianMatrix, shift: f64, counter: &mut OpCounter) -> Result<ComplexMatrix, NumericsError> {
    let n = r.dim();
    let a = r.as_matrix();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut pivot = a[(j, j)].re + shift;
        for k in 0..j {
            pivot -= l[(j, k)].norm_sqr();
        }
        counter.mul(j as u64);
        counter.add(j as u64);
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(NumericsError::NotPositiveDefinite { pivot: j });
        }
        let d = pivot.sqrt();
        counter.sqrt(1);
        let inv = 1.0 / d;
        counter.div(1);
        l[(j, j)] = C64::new(d, 0.0);
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            counter.mul(j as u64 + 1);
            counter.add(j as u64);
            l[(i, j)] = s * inv;
        }
    }
    Ok(l)
}

/// Inverse of a Cholesky factor; lower triangular.
///
/// A diagonal factor is inverted with exactly N reciprocals.
pub fn lower_inverse(l: &CholeskyFactor, counter: &mut OpCounter) -> ComplexMatrix {
    let n = l.dim();
    let lm = l.lower();
    let mut x = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        x[(i, i)] = C64::new(1.0 / lm[(i, i)].re, 0.0);
    }
    counter.div(n as u64);
    if l.is_diagonal() {
        return x;
    }
    // forward substitution, column by column
    for j in 0..n {
        for i in (j + 1)..n {
            let mut s = C64::zero();
            for k in j..i {
                s += lm[(i, k)] * x[(k, j)];
            }
            counter.mul((i - j) as u64 + 1);
            counter.add((i - j - 1) as u64);
            x[(i, j)] = -s * x[(i, i)].re;
        }
    }
    x
}

/// `linv * target`, exploiting diagonal or lower-triangular structure.
pub fn whiten_apply(
    linv: &ComplexMatrix,
    target: &ComplexMatrix,
    counter: &mut OpCounter,
) -> Result<ComplexMatrix, NumericsError> {
    if linv.cols() != target.rows() || !linv.is_square() {
        return Err(NumericsError::DimensionMismatch {
            left_rows: linv.rows(),
            left_cols: linv.cols(),
            right_rows: target.rows(),
            right_cols: target.cols(),
        });
    }
    let n = linv.rows();
    let k = target.cols();
    let mut out = ComplexMatrix::zeros(n, k);
    if linv.is_structurally_diagonal() {
        for r in 0..n {
            let s = linv[(r, r)];
            for c in 0..k {
                out[(r, c)] = s * target[(r, c)];
            }
        }
        counter.mul((n * k) as u64);
        return Ok(out);
    }
    let upper = if linv.is_lower_triangular() { None } else { Some(n) };
    for r in 0..n {
        let end = upper.unwrap_or(r + 1);
        for c in 0..k {
            let mut s = C64::zero();
            for j in 0..end {
                s += linv[(r, j)] * target[(j, c)];
            }
            out[(r, c)] = s;
        }
        counter.mul((end * k) as u64);
        counter.add(((end - 1) * k) as u64);
    }
    Ok(out)
}

/// `(A + A^H) / 2` with the diagonal forced real.
pub fn hermitian_projection(a: &ComplexMatrix) -> Result<HermitianMatrix, NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.rows();
    let mut m = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        m[(r, r)] = C64::new(a[(r, r)].re.max(0.0), 0.0);
        for c in (r + 1)..n {
            let v = (a[(r, c)] + a[(c, r)].conj()) * 0.5;
            m[(r, c)] = v;
            m[(c, r)] = v.conj();
        }
    }
    HermitianMatrix::new(m)
}

/// Inverse of a small Hermitian positive definite matrix (uncounted).
pub fn hpd_inverse(a: &HermitianMatrix) -> Result<ComplexMatrix, NumericsError> {
    let mut scratch = OpCounter::new();
    let l = cholesky_dense(a, &mut scratch)?;
    let linv = lower_inverse(&l, &mut scratch);
    linv.conj_transpose().matmul(&linv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    fn random_hpd(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
        let a = random_matrix(rng, n, n);
        let r = a.matmul(&a.conj_transpose()).unwrap();
        let r = r.sub(&ComplexMatrix::identity(n).scale(-1.0)).unwrap();
        hermitian_projection(&r).unwrap()
    }

    // naive oracle, kept independent of ComplexMatrix::matmul
    fn naive_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut s = c(0.0, 0.0);
                for k in 0..a.cols() {
                    s += a[(i, k)] * b[(k, j)];
                }
                out[(i, j)] = s;
            }
        }
        out
    }

    #[test]
    fn cholesky_of_identity_is_identity() {
        let mut ops = OpCounter::new();
        let l = cholesky_dense(&HermitianMatrix::identity(4), &mut ops).unwrap();
        assert_eq!(l.lower(), &ComplexMatrix::identity(4));
    }

    #[test]
    fn cholesky_of_diagonal_takes_square_roots() {
        let mut ops = OpCounter::new();
        let r = HermitianMatrix::from_real_diagonal(&[4.0, 9.0]).unwrap();
        let l = cholesky(&r, &mut ops).unwrap();
        assert!(l.is_diagonal());
        assert_eq!(l.lower()[(0, 0)], c(2.0, 0.0));
        assert_eq!(l.lower()[(1, 1)], c(3.0, 0.0));
        assert_eq!(ops.sqrts, 2);
        assert_eq!(ops.complex_mults, 0);
        // dense route agrees
        let ld = cholesky_dense(&r, &mut OpCounter::new()).unwrap();
        assert_eq!(ld.lower(), l.lower());
    }

    #[test]
    fn cholesky_reconstructs_random_hpd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = random_hpd(&mut rng, 4);
        let l = cholesky(&r, &mut OpCounter::new()).unwrap();
        let rec = naive_product(l.lower(), &l.lower().conj_transpose());
        let err = rec.sub(r.as_matrix()).unwrap().frobenius_norm() / r.as_matrix().frobenius_norm();
        assert!(err <= 1e-10, "{err}");
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert_eq!(l.lower()[(i, j)], c(0.0, 0.0));
            }
            assert!(l.lower()[(i, i)].re > 0.0);
        }
    }

    #[test]
    fn rank_deficient_matrix_is_regularized() {
        // v v^H with v = [1, 1]: singular
        let m = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let r = HermitianMatrix::new(m).unwrap();
        let l = cholesky(&r, &mut OpCounter::new()).unwrap();
        assert!(l.regularized());
        let rec = l.reconstruct();
        let err = rec.sub(r.as_matrix()).unwrap().frobenius_norm();
        assert!(err < 1e-8);
    }

    #[test]
    fn zero_matrix_is_loaded_with_absolute_eps() {
        let r = HermitianMatrix::new(ComplexMatrix::zeros(3, 3)).unwrap();
        let l = cholesky_dense(&r, &mut OpCounter::new()).unwrap();
        assert!(l.regularized());
        assert!((l.lower()[(0, 0)].re - REGULARIZATION_EPS.sqrt()).abs() < 1e-15);
        let ld = cholesky_diagonal(&[0.0, 0.0], &mut OpCounter::new()).unwrap();
        assert!(ld.regularized());
    }

    #[test]
    fn indefinite_matrix_fails() {
        let m = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        let r = HermitianMatrix::new(m).unwrap();
        assert_eq!(
            cholesky(&r, &mut OpCounter::new()).unwrap_err(),
            NumericsError::NotPositiveDefinite { pivot: 1 }
        );
    }

    #[test]
    fn lower_inverse_examples() {
        let mut ops = OpCounter::new();
        let id = CholeskyFactor::from_lower(ComplexMatrix::identity(4)).unwrap();
        assert_eq!(lower_inverse(&id, &mut ops), ComplexMatrix::identity(4));

        let mut ops = OpCounter::new();
        let d = CholeskyFactor::from_lower(ComplexMatrix::from_diagonal(&[c(2.0, 0.0), c(4.0, 0.0)])).unwrap();
        let inv = lower_inverse(&d, &mut ops);
        assert_eq!(inv, ComplexMatrix::from_diagonal(&[c(0.5, 0.0), c(0.25, 0.0)]));
        assert_eq!(ops.divisions, 2);
        assert_eq!(ops.complex_mults, 0);
    }

    #[test]
    fn lower_inverse_of_random_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut lower = ComplexMatrix::zeros(3, 3);
        for i in 0..3 {
            lower[(i, i)] = c(0.5 + rng.random::<f64>(), 0.0);
            for j in 0..i {
                lower[(i, j)] = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
        let l = CholeskyFactor::from_lower(lower).unwrap();
        let inv = lower_inverse(&l, &mut OpCounter::new());
        assert!(inv.is_lower_triangular());
        let prod = naive_product(l.lower(), &inv);
        assert!(prod.sub(&ComplexMatrix::identity(3)).unwrap().frobenius_norm() <= 1e-10);
    }

    #[test]
    fn whiten_apply_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random_matrix(&mut rng, 4, 3);
        let out = whiten_apply(&ComplexMatrix::identity(4), &t, &mut OpCounter::new()).unwrap();
        assert_eq!(out, t);

        let mut ops = OpCounter::new();
        let linv = ComplexMatrix::from_diagonal(&[c(0.5, 0.0), c(0.5, 0.0)]);
        let y = ComplexMatrix::column(&[c(2.0, 0.0), c(4.0, 0.0)]);
        let out = whiten_apply(&linv, &y, &mut ops).unwrap();
        assert_eq!(out, ComplexMatrix::column(&[c(1.0, 0.0), c(2.0, 0.0)]));
        assert_eq!(ops.complex_mults, 2);

        let a = random_matrix(&mut rng, 4, 4);
        let b = random_matrix(&mut rng, 4, 2);
        let out = whiten_apply(&a, &b, &mut OpCounter::new()).unwrap();
        let oracle = naive_product(&a, &b);
        assert!(out.sub(&oracle).unwrap().frobenius_norm() < 1e-14);

        let bad = random_matrix(&mut rng, 3, 2);
        assert!(matches!(
            whiten_apply(&a, &bad, &mut OpCounter::new()),
            Err(NumericsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn whiten_apply_lower_triangular_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = random_hpd(&mut rng, 4);
        let l = cholesky(&r, &mut OpCounter::new()).unwrap();
        let linv = lower_inverse(&l, &mut OpCounter::new());
        let y = random_matrix(&mut rng, 4, 2);
        let mut ops = OpCounter::new();
        let out = whiten_apply(&linv, &y, &mut ops).unwrap();
        assert!(out.sub(&naive_product(&linv, &y)).unwrap().frobenius_norm() < 1e-13);
        assert_eq!(ops.complex_mults, (1 + 2 + 3 + 4) * 2);
    }

    #[test]
    fn hermitian_projection_examples() {
        let a = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let h = hermitian_projection(&a).unwrap();
        assert_eq!(h[(0, 1)], c(0.0, 0.5));
        assert_eq!(h[(1, 0)], c(0.0, -0.5));
        assert_eq!(h[(0, 0)], c(1.0, 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = random_hpd(&mut rng, 3);
        assert_eq!(hermitian_projection(r.as_matrix()).unwrap(), r);

        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_projection(&rect), Err(NumericsError::NotSquare { .. })));
    }

    #[test]
    fn operation_counts_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let setup = |n: usize, rng: &mut ChaCha8Rng| {
            let r = random_hpd(rng, n);
            let mut ops = OpCounter::new();
            let l = cholesky_dense(&r, &mut ops).unwrap();
            lower_inverse(&l, &mut ops);
            ops
        };
        let small = setup(2, &mut rng);
        let large = setup(8, &mut rng);
        // n=2: 2 + 2 multiplies; n=8: 112 + 112
        assert_eq!(small.complex_mults, 4);
        assert_eq!(large.complex_mults, 224);
    }

    #[test]
    fn hpd_inverse_is_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let r = random_hpd(&mut rng, 4);
        let inv = hpd_inverse(&r).unwrap();
        let prod = naive_product(r.as_matrix(), &inv);
        assert!(prod.sub(&ComplexMatrix::identity(4)).unwrap().frobenius_norm() < 1e-12);
    }

    #[test]
    fn hermitian_validation_rejects_bad_input() {
        let m = ComplexMatrix::from_row_major(2, 2, vec![c(1.0, 0.0), c(1.0, 1.0), c(1.0, 1.0), c(1.0, 0.0)]);
        assert!(matches!(HermitianMatrix::new(m), Err(NumericsError::NotHermitian { .. })));
        let neg = ComplexMatrix::from_diagonal(&[c(-1.0, 0.0)]);
        assert!(HermitianMatrix::new(neg).is_err());
    }
}
