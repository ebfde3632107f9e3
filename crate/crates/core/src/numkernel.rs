//! Dense complex linear algebra for the small square matrices used here
//! (3x3 and 6x6 dominate).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, C64};

/// Smallest pivot magnitude accepted by the LU factorization.
pub const PIVOT_FLOOR: f64 = 1e-300;

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, " ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, " {:+.6e}{:+.6e}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
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
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row slices; all rows must share one length.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Self {
        let nr = rows.len();
        let nc = if nr == 0 { 0 } else { rows[0].as_ref().len() };
        let mut data = Vec::with_capacity(nr * nc);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), nc, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: nr,
            cols: nc,
            data,
        }
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let nr = rows.len();
        let nc = if nr == 0 { 0 } else { rows[0].as_ref().len() };
        Self::from_fn(nr, nc, |i, j| C64::new(rows[i].as_ref()[j], 0.0))
    }

    pub fn from_diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// `[[a, b], [c, d]]` from four equally sized square blocks.
    pub fn from_blocks(a: &CMat, b: &CMat, c: &CMat, d: &CMat) -> Self {
        let m = a.rows;
        assert!(
            [a, b, c, d].iter().all(|x| x.rows == m && x.cols == m),
            "blocks must be square and of equal size"
        );
        let mut out = Self::zeros(2 * m, 2 * m);
        out.set_block(0, 0, a);
        out.set_block(0, m, b);
        out.set_block(m, 0, c);
        out.set_block(m, m, d);
        out
    }

    /// The block-swap matrix `T = [[0, I], [I, 0]]` of size `2m`.
    pub fn block_swap(m: usize) -> Self {
        let mut t = Self::zeros(2 * m, 2 * m);
        for i in 0..m {
            t[(i, m + i)] = C64::new(1.0, 0.0);
            t[(m + i, i)] = C64::new(1.0, 0.0);
        }
        t
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
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> CMat {
        CMat::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &CMat) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// The four `m x m` blocks of a `2m x 2m` matrix.
    pub fn quarters(&self) -> [CMat; 4] {
        assert!(
            self.is_square() && self.rows % 2 == 0,
            "quarters of a non-even square matrix"
        );
        let m = self.rows / 2;
        [
            self.block(0, 0, m, m),
            self.block(0, m, m, m),
            self.block(m, 0, m, m),
            self.block(m, m, m, m),
        ]
    }

    /// Principal submatrix on the given index set.
    pub fn select(&self, idx: &[usize]) -> CMat {
        CMat::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])])
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn conj(&self) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: C64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry magnitude.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `self * other` without allocating a temporary for the operator form.
    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn lu(&self) -> Result<Lu> {
        Lu::factor(self)
    }

    pub fn inverse(&self) -> Result<CMat> {
        mat_inverse(self)
    }

    pub fn solve(&self, rhs: &CMat) -> Result<CMat> {
        Ok(self.lu()?.solve(rhs))
    }

    pub fn det(&self) -> C64 {
        match self.lu() {
            Ok(lu) => lu.det(),
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn exp(&self) -> Result<CMat> {
        mat_exp(self)
    }

    /// 1-norm condition number `|A|_1 |A^-1|_1`; infinite when singular.
    pub fn condition_one(&self) -> f64 {
        match self.inverse() {
            Ok(inv) => self.norm_one() * inv.norm_one(),
            Err(_) => f64::INFINITY,
        }
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

macro_rules! elementwise {
    ($tr:ident, $f:ident, $op:tt, $atr:ident, $af:ident) => {
        impl $tr<&CMat> for &CMat {
            type Output = CMat;
            fn $f(self, rhs: &CMat) -> CMat {
                assert!(self.rows == rhs.rows && self.cols == rhs.cols, "shape mismatch");
                CMat {
                    rows: self.rows,
                    cols: self.cols,
                    data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a $op b).collect(),
                }
            }
        }
        impl $tr<CMat> for CMat {
            type Output = CMat;
            fn $f(self, rhs: CMat) -> CMat {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&CMat> for CMat {
            type Output = CMat;
            fn $f(self, rhs: &CMat) -> CMat {
                (&self).$f(rhs)
            }
        }
        impl $atr<&CMat> for CMat {
            fn $af(&mut self, rhs: &CMat) {
                assert!(self.rows == rhs.rows && self.cols == rhs.cols, "shape mismatch");
                for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
                    *a = *a $op b;
                }
            }
        }
    };
}

elementwise!(Add, add, +, AddAssign, add_assign);
elementwise!(Sub, sub, -, SubAssign, sub_assign);

impl Mul<&CMat> for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs)
    }
}

impl Mul<CMat> for CMat {
    type Output = CMat;
    fn mul(self, rhs: CMat) -> CMat {
        self.matmul(&rhs)
    }
}

impl Mul<&CMat> for CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        self.matmul(rhs)
    }
}

impl Mul<CMat> for &CMat {
    type Output = CMat;
    fn mul(self, rhs: CMat) -> CMat {
        self.matmul(&rhs)
    }
}

impl Mul<C64> for &CMat {
    type Output = CMat;
    fn mul(self, s: C64) -> CMat {
        self.scale(s)
    }
}

impl Mul<C64> for CMat {
    type Output = CMat;
    fn mul(self, s: C64) -> CMat {
        self.scale(s)
    }
}

impl Neg for &CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        self.scale_re(-1.0)
    }
}

impl Neg for CMat {
    type Output = CMat;
    fn neg(self) -> CMat {
        self.scale_re(-1.0)
    }
}

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMat,
    perm: Vec<usize>,
    sign: f64,
    norm_one: f64,
}

impl Lu {
    pub fn factor(a: &CMat) -> Result<Lu> {
        if !a.is_square() {
            return Err(Error::Dimension("LU requires a square matrix"));
        }
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let norm_one = a.norm_one();
        for k in 0..n {
            let (p, pmag) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold(
                    (k, -1.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
            if !(pmag >= PIVOT_FLOOR) {
                return Err(Error::SingularMatrix {
                    pivot: pmag.max(0.0),
                    condition_estimate: f64::INFINITY,
                });
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != C64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let t = lu[(k, j)];
                        lu[(i, j)] -= f * t;
                    }
                }
            }
        }
        Ok(Lu {
            lu,
            perm,
            sign,
            norm_one,
        })
    }

    pub fn det(&self) -> C64 {
        let n = self.lu.rows;
        (0..n)
            .map(|i| self.lu[(i, i)])
            .fold(C64::new(self.sign, 0.0), |acc, d| acc * d)
    }

    /// Solves `A X = B` column by column.
    pub fn solve(&self, b: &CMat) -> CMat {
        let n = self.lu.rows;
        assert_eq!(b.rows, n, "rhs row mismatch");
        let mut x = CMat::zeros(n, b.cols);
        for col in 0..b.cols {
            let mut y: Vec<C64> = (0..n).map(|i| b[(self.perm[i], col)]).collect();
            for i in 0..n {
                for k in 0..i {
                    let t = self.lu[(i, k)] * y[k];
                    y[i] -= t;
                }
            }
            for i in (0..n).rev() {
                for k in i + 1..n {
                    let t = self.lu[(i, k)] * y[k];
                    y[i] -= t;
                }
                y[i] /= self.lu[(i, i)];
            }
            for i in 0..n {
                x[(i, col)] = y[i];
            }
        }
        x
    }

    pub fn inverse(&self) -> CMat {
        self.solve(&CMat::identity(self.lu.rows))
    }

    /// Reciprocal 1-norm condition number (exact, via the explicit inverse).
    pub fn rcond(&self) -> f64 {
        let inv_norm = self.inverse().norm_one();
        if self.norm_one == 0.0 || !inv_norm.is_finite() {
            0.0
        } else {
            1.0 / (self.norm_one * inv_norm)
        }
    }
}

/// Inverse by LU with partial pivoting.
pub fn mat_inverse(a: &CMat) -> Result<CMat> {
    let lu = Lu::factor(a)?;
    let inv = lu.inverse();
    if !inv.is_finite() {
        return Err(Error::SingularMatrix {
            pivot: 0.0,
            condition_estimate: f64::INFINITY,
        });
    }
    Ok(inv)
}

/// Inverse together with its 1-norm condition number.
pub fn mat_inverse_with_condition(a: &CMat) -> Result<(CMat, f64)> {
    let inv = mat_inverse(a)?;
    let cond = a.norm_one() * inv.norm_one();
    Ok((inv, cond))
}

const PADE_ORDER: usize = 8;
/// Scaling target for `|A / 2^s|_1`.
const EXPM_SCALE_TARGET: f64 = 0.5;

/// Matrix exponential by scaling and squaring with a diagonal Padé
/// approximant of order 8.
pub fn mat_exp(a: &CMat) -> Result<CMat> {
    if !a.is_square() {
        return Err(Error::Dimension("expm requires a square matrix"));
    }
    if !a.is_finite() {
        return Err(Error::Overflow);
    }
    let n = a.rows;
    let norm = a.norm_one();
    let mut s = 0i32;
    if norm > EXPM_SCALE_TARGET {
        s = (norm / EXPM_SCALE_TARGET).log2().ceil() as i32;
    }
    let scaled = a.scale_re(0.5f64.powi(s));

    // c_k = (2p-k)! p! / ((2p)! k! (p-k)!)
    let p = PADE_ORDER;
    let mut coef = [0.0f64; PADE_ORDER + 1];
    coef[0] = 1.0;
    for k in 1..=p {
        coef[k] = coef[k - 1] * (p - k + 1) as f64 / (k * (2 * p - k + 1)) as f64;
    }
    let mut num = CMat::identity(n);
    let mut den = CMat::identity(n);
    let mut power = CMat::identity(n);
    for (k, &ck) in coef.iter().enumerate().skip(1) {
        power = power.matmul(&scaled);
        let term = power.scale_re(ck);
        num += &term;
        if k % 2 == 0 {
            den += &term;
        } else {
            den -= &term;
        }
    }
    let mut r = den.solve(&num)?;
    for _ in 0..s {
        r = r.matmul(&r);
        if !r.is_finite() {
            return Err(Error::Overflow);
        }
    }
    if !r.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(r)
}

/// `|A - A^+|_F / max(|A|_F, tiny)`.
pub fn hermitian_residual(a: &CMat) -> f64 {
    let d = a - &a.adjoint();
    d.norm_fro() / a.norm_fro().max(f64::MIN_POSITIVE)
}

/// Relative distance `|A - B|_max / max(|A|_max, |B|_max, tiny)`.
pub fn rel_max_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm_max() / a.norm_max().max(b.norm_max()).max(f64::MIN_POSITIVE)
}

/// Determinant of the leading 2x2 block.
pub fn det2(a: &CMat) -> C64 {
    a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)]
}
