//! Dense matrices over a [`Ring`].
//!
//! Determinants use pivoted elimination when a unit pivot is available and
//! fall back to the division-free Berkowitz algorithm otherwise, so they work
//! over polynomial and jet rings as well as over fields.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::scalar::{Ring, ToComplex};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<R> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Ring> Matrix<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![R::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = R::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let data: Vec<R> = rows.into_iter().flatten().collect();
        assert_eq!(data.len(), r * c, "ragged rows");
        Matrix { rows: r, cols: c, data }
    }

    pub fn diagonal(d: &[R]) -> Self {
        let n = d.len();
        Matrix::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { R::zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: R) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: R) {
        let idx = i * self.cols + j;
        let cur = std::mem::replace(&mut self.data[idx], R::zero());
        self.data[idx] = cur + v;
    }

    pub fn entries(&self) -> &[R] {
        &self.data
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> R {
        (0..self.rows.min(self.cols)).fold(R::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn scale(&self, c: &R) -> Self {
        self.map(|v| v.clone() * c.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn nonzero_count(&self) -> usize {
        self.data.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|v| v.magnitude()).fold(0.0, f64::max)
    }

    pub fn row(&self, i: usize) -> Vec<R> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn mul_vec(&self, v: &[R]) -> Vec<R> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(R::zero(), |acc, j| {
                    let a = self.get(i, j);
                    if a.is_zero() {
                        acc
                    } else {
                        acc + a.clone() * v[j].clone()
                    }
                })
            })
            .collect()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.clone() * other.clone() - other.clone() * self.clone()
    }

    /// Submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Coefficients of `det(z - A)`, leading coefficient first
    /// (`[1, c_1, ..., c_n]`), by the division-free Berkowitz algorithm.
    pub fn charpoly(&self) -> Vec<R> {
        assert_eq!(self.rows, self.cols, "charpoly of a non-square matrix");
        let n = self.rows;
        // Berkowitz: build the Toeplitz vectors of the leading principal blocks.
        let mut poly: Vec<R> = vec![R::one()];
        for r in 0..n {
            // A_r is the leading (r+1)x(r+1) block: [[a, R], [S, M]] with a = A[r][r].
            let a = self.get(r, r).clone();
            let row: Vec<R> = (0..r).map(|j| self.get(r, j).clone()).collect();
            let col: Vec<R> = (0..r).map(|i| self.get(i, r).clone()).collect();
            let m = self.select(&(0..r).collect::<Vec<_>>(), &(0..r).collect::<Vec<_>>());
            // Toeplitz first column: 1, -a, -R S, -R M S, ..., -R M^{r-1} S
            let mut t: Vec<R> = Vec::with_capacity(r + 2);
            t.push(R::one());
            t.push(-a);
            let mut v = col;
            for _ in 0..r {
                let dot = row.iter().zip(&v).fold(R::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
                t.push(-dot);
                v = m.mul_vec(&v);
            }
            // new poly = T * old poly, T lower triangular Toeplitz of size (r+2)x(r+1)
            let mut next = vec![R::zero(); r + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                let mut s = R::zero();
                for (j, pj) in poly.iter().enumerate() {
                    if i >= j && i - j < t.len() {
                        s = s + t[i - j].clone() * pj.clone();
                    }
                }
                *slot = s;
            }
            poly = next;
        }
        poly
    }

    /// Determinant; pivoted elimination when unit pivots exist, Berkowitz otherwise.
    pub fn det(&self) -> R {
        assert_eq!(self.rows, self.cols, "det of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return R::one();
        }
        match self.det_elimination() {
            Some(d) => d,
            None => {
                let cp = self.charpoly();
                let c = cp[n].clone();
                if n.is_multiple_of(2) {
                    c
                } else {
                    -c
                }
            }
        }
    }

    fn det_elimination(&self) -> Option<R> {
        let n = self.rows;
        let mut a = self.data.clone();
        let mut det = R::one();
        for k in 0..n {
            let mut pivot = None;
            let mut best = -1.0;
            for i in k..n {
                let v = &a[i * n + k];
                if v.is_zero() {
                    continue;
                }
                if v.try_inv().is_none() {
                    continue;
                }
                let m = v.magnitude();
                if R::EXACT {
                    pivot = Some(i);
                    break;
                }
                if m > best {
                    best = m;
                    pivot = Some(i);
                }
            }
            let p = match pivot {
                Some(p) => p,
                None => {
                    if (k..n).all(|i| a[i * n + k].is_zero()) {
                        return Some(R::zero());
                    }
                    return None;
                }
            };
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let piv = a[k * n + k].clone();
            let inv = piv.try_inv()?;
            det = det * piv;
            for i in (k + 1)..n {
                let f = a[i * n + k].clone();
                if f.is_zero() {
                    continue;
                }
                let f = f * inv.clone();
                for j in k..n {
                    let upd = a[k * n + j].clone();
                    if upd.is_zero() {
                        continue;
                    }
                    a[i * n + j] = a[i * n + j].clone() - f.clone() * upd;
                }
            }
        }
        Some(det)
    }

    /// Inverse by Gauss-Jordan elimination, `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv: Matrix<R> = Matrix::identity(n);
        for k in 0..n {
            let mut pivot = None;
            let mut best = -1.0;
            for i in k..n {
                let v = a.get(i, k);
                if v.is_zero() || v.try_inv().is_none() {
                    continue;
                }
                if R::EXACT {
                    pivot = Some(i);
                    break;
                }
                let m = v.magnitude();
                if m > best {
                    best = m;
                    pivot = Some(i);
                }
            }
            let p = pivot?;
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                    inv.data.swap(k * n + j, p * n + j);
                }
            }
            let pinv = a.get(k, k).try_inv()?;
            for j in 0..n {
                a.data[k * n + j] = a.data[k * n + j].clone() * pinv.clone();
                inv.data[k * n + j] = inv.data[k * n + j].clone() * pinv.clone();
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let f = a.get(i, k).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let ak = a.data[k * n + j].clone();
                    let ik = inv.data[k * n + j].clone();
                    a.data[i * n + j] = a.data[i * n + j].clone() - f.clone() * ak;
                    inv.data[i * n + j] = inv.data[i * n + j].clone() - f.clone() * ik;
                }
            }
        }
        Some(inv)
    }
}

impl<R: Ring + ToComplex> Matrix<R> {
    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_c64())
    }

    pub fn to_real(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_c64().re)
    }
}

impl<R: Ring> Add for Matrix<R> {
    type Output = Matrix<R>;
    fn add(self, rhs: Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.into_iter().zip(rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<R: Ring> Sub for Matrix<R> {
    type Output = Matrix<R>;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.into_iter().zip(rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<R: Ring> Neg for Matrix<R> {
    type Output = Matrix<R>;
    fn neg(self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.into_iter().map(|a| -a).collect() }
    }
}

impl<R: Ring> Mul for Matrix<R> {
    type Output = Matrix<R>;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<R: Ring> Mul<&Matrix<R>> for &Matrix<R> {
    type Output = Matrix<R>;
    fn mul(self, rhs: &Matrix<R>) -> Matrix<R> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch");
        let (n, m, p) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![R::zero(); n * p];
        for i in 0..n {
            for k in 0..m {
                let a = &self.data[i * m + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..p {
                    let b = &rhs.data[k * p + j];
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * p + j;
                    let cur = std::mem::replace(&mut out[idx], R::zero());
                    out[idx] = cur + a.clone() * b.clone();
                }
            }
        }
        Matrix { rows: n, cols: p, data: out }
    }
}

/// Determinant of a small square array of mutually commuting ring elements
/// (for instance operators), by the Leibniz formula. The product in each term
/// is taken in row order.
pub fn leibniz_det<T: Clone>(
    entries: &[Vec<T>],
    one: T,
    mul: impl Fn(&T, &T) -> T,
    add: impl Fn(&T, &T) -> T,
    neg: impl Fn(&T) -> T,
    zero: T,
) -> T {
    let n = entries.len();
    if n == 0 {
        return one;
    }
    let mut total = zero;
    for perm in crate::tensor::Permutation::all(n) {
        let mut term = one.clone();
        for (i, row) in entries.iter().enumerate() {
            term = mul(&term, &row[perm.apply(i)]);
        }
        if perm.sign() < 0 {
            term = neg(&term);
        }
        total = add(&total, &term);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{Jet, UPoly};
    use crate::scalar::{q, qi, Rational};

    fn m(rows: Vec<Vec<i64>>) -> Matrix<Rational> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(qi).collect()).collect())
    }

    #[test]
    fn det_agrees_between_routes() {
        let a = m(vec![vec![2, -1, 0, 3], vec![1, 4, 2, 0], vec![0, 5, -2, 1], vec![3, 0, 1, 1]]);
        let cp = a.charpoly();
        let berk = cp[4].clone();
        assert_eq!(a.det(), berk);
        let leib = leibniz_det(
            &(0..4).map(|i| a.row(i)).collect::<Vec<_>>(),
            qi(1),
            |x, y| x * y,
            |x, y| x + y,
            |x| -x,
            qi(0),
        );
        assert_eq!(a.det(), leib);
    }

    #[test]
    fn charpoly_of_triangular() {
        let a = m(vec![vec![1, 7, 2], vec![0, 2, 5], vec![0, 0, 3]]);
        assert_eq!(a.charpoly(), vec![qi(1), qi(-6), qi(11), qi(-6)]);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = m(vec![vec![2, 1], vec![7, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Matrix::identity(2));
        assert!(m(vec![vec![1, 2], vec![2, 4]]).inverse().is_none());
    }

    #[test]
    fn det_over_polynomials_and_jets() {
        let z = UPoly::<Rational>::x();
        let a = Matrix::from_rows(vec![
            vec![z.clone() - UPoly::constant(qi(1)), UPoly::constant(qi(2))],
            vec![UPoly::constant(qi(3)), z.clone()],
        ]);
        let d = a.det();
        assert_eq!(d.coeffs(), &[qi(-6), qi(-1), qi(1)]);
        let e = Jet::<Rational>::var(3);
        let b = Matrix::from_rows(vec![vec![e.clone(), Jet::one()], vec![Jet::one(), e.clone()]]);
        assert_eq!(b.det(), e.clone() * e - Jet::one());
        assert_eq!(Matrix::diagonal(&[q(1, 2), q(2, 3)]).det(), q(1, 3));
    }
}
