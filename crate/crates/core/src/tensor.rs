//! Operators on the tensor product `(C^N)^{(x) n}`.
//!
//! Basis vectors are `|a_1, ..., a_n>` with local indices `0 <= a_i < N`,
//! ordered lexicographically with site `0` most significant. Sites and local
//! indices are 0-based throughout the API.
//!
//! - [`Permutation`] and its operator [`TensorOperator::perm_op`], acting as
//!   `P_s (v_1 (x) ... (x) v_n) = v_{s(1)} (x) ... (x) v_{s(n)}`
//! - [`TensorOperator::elem`]: `e_ab` embedded at one site
//! - [`SectorLabel`] and [`TensorOperator::sector_projector`]: weight sectors
//! - [`OpPoly`]: polynomials in `x` with operator coefficients

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{format_rational, Rational, Ring};

/// Maximum number of entries serialized by [`TensorOperator::to_json`].
pub const MAX_SERIALIZED_ENTRIES: usize = 1 << 16;

/// A permutation of `{0, ..., n-1}` stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::IndexOutOfRange(format!("{images:?} is not a permutation")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(i, j);
        Permutation(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &s)| i == s)
    }

    /// `self o other`, i.e. `i -> self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut v = vec![0; self.0.len()];
        for (i, &s) in self.0.iter().enumerate() {
            v[s] = i;
        }
        Permutation(v)
    }

    /// The permutation whose operator is `P_self P_other`.
    ///
    /// With the action `P_s |a> = |a_{s(1)}, ..., a_{s(n)}>` one has
    /// `P_s P_t = P_{t o s}`.
    pub fn op_product(&self, other: &Permutation) -> Permutation {
        other.compose(self)
    }

    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut c = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                c.push(i);
                i = self.0[i];
            }
            out.push(c);
        }
        out
    }

    pub fn sign(&self) -> i32 {
        let transpositions: usize = self.cycles().iter().map(|c| c.len() - 1).sum();
        if transpositions.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// All permutations of `n` elements in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // next lexicographic permutation
            let mut i = n;
            if n < 2 {
                break;
            }
            i -= 1;
            while i > 0 && cur[i - 1] >= cur[i] {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            let mut j = n - 1;
            while cur[j] <= cur[i - 1] {
                j -= 1;
            }
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

/// Weight sector: multiplicities `m_a` of each local index, summing to `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SectorLabel(Vec<usize>);

impl SectorLabel {
    pub fn new(counts: Vec<usize>, sites: usize) -> Result<Self> {
        let total: usize = counts.iter().sum();
        if total != sites {
            return Err(Error::InvalidSector(format!("{counts:?} sums to {total}, expected {sites}")));
        }
        Ok(SectorLabel(counts))
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn sites(&self) -> usize {
        self.0.iter().sum()
    }

    /// `n! / prod m_a!`.
    pub fn dimension(&self) -> usize {
        let mut d: u128 = (1..=self.sites() as u128).product();
        for &m in &self.0 {
            d /= (1..=m as u128).product::<u128>();
        }
        d as usize
    }

    /// All sectors for `N` local states on `n` sites.
    pub fn all(rank: usize, sites: usize) -> Vec<SectorLabel> {
        fn rec(rank: usize, rem: usize, cur: &mut Vec<usize>, out: &mut Vec<SectorLabel>) {
            if cur.len() + 1 == rank {
                cur.push(rem);
                out.push(SectorLabel(cur.clone()));
                cur.pop();
                return;
            }
            for m in (0..=rem).rev() {
                cur.push(m);
                rec(rank, rem - m, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if rank > 0 {
            rec(rank, sites, &mut Vec::new(), &mut out);
        }
        out
    }

    /// Basis indices of the sector in increasing order.
    pub fn basis(&self) -> Vec<usize> {
        let rank = self.rank();
        let sites = self.sites();
        (0..rank.pow(sites as u32))
            .filter(|&idx| {
                let mut counts = vec![0; rank];
                for a in decode(idx, rank, sites) {
                    counts[a] += 1;
                }
                counts == self.0
            })
            .collect()
    }
}

/// Local indices of a basis index.
pub fn decode(mut idx: usize, rank: usize, sites: usize) -> Vec<usize> {
    let mut out = vec![0; sites];
    for i in (0..sites).rev() {
        out[i] = idx % rank;
        idx /= rank;
    }
    out
}

/// Basis index of local indices.
pub fn encode(locals: &[usize], rank: usize) -> usize {
    locals.iter().fold(0, |acc, &a| acc * rank + a)
}

/// A linear operator on `(C^N)^{(x) n}` with entries in `R`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator<R> {
    rank: usize,
    sites: usize,
    mat: Matrix<R>,
}

impl<R: Ring> TensorOperator<R> {
    pub fn zero(rank: usize, sites: usize) -> Self {
        let d = rank.pow(sites as u32);
        TensorOperator { rank, sites, mat: Matrix::zeros(d, d) }
    }

    pub fn identity(rank: usize, sites: usize) -> Self {
        let d = rank.pow(sites as u32);
        TensorOperator { rank, sites, mat: Matrix::identity(d) }
    }

    pub fn scalar(rank: usize, sites: usize, c: R) -> Self {
        Self::identity(rank, sites).scale(&c)
    }

    pub fn from_matrix(rank: usize, sites: usize, mat: Matrix<R>) -> Result<Self> {
        let d = rank.pow(sites as u32);
        if mat.rows() != d || mat.cols() != d {
            return Err(Error::ShapeMismatch(format!("expected {d}x{d}, got {}x{}", mat.rows(), mat.cols())));
        }
        Ok(TensorOperator { rank, sites, mat })
    }

    /// `e_ab` at `site`: `1^{(x) site} (x) e_ab (x) 1^{(x)(n - site - 1)}`.
    pub fn elem(rank: usize, sites: usize, site: usize, a: usize, b: usize) -> Result<Self> {
        if site >= sites || a >= rank || b >= rank {
            return Err(Error::IndexOutOfRange(format!(
                "site {site} of {sites}, indices ({a},{b}) of {rank}"
            )));
        }
        let mut op = Self::zero(rank, sites);
        let d = op.dim();
        for col in 0..d {
            let mut locals = decode(col, rank, sites);
            if locals[site] != b {
                continue;
            }
            locals[site] = a;
            op.mat.set(encode(&locals, rank), col, R::one());
        }
        Ok(op)
    }

    /// `P_s |a_1, ..., a_n> = |a_{s(1)}, ..., a_{s(n)}>`.
    pub fn perm_op(rank: usize, sigma: &Permutation) -> Self {
        let sites = sigma.len();
        let mut op = Self::zero(rank, sites);
        for col in 0..op.dim() {
            let a = decode(col, rank, sites);
            let b: Vec<usize> = (0..sites).map(|i| a[sigma.apply(i)]).collect();
            op.mat.set(encode(&b, rank), col, R::one());
        }
        op
    }

    /// `M_a = sum_l e_aa^{(l)}`.
    pub fn weight_op(rank: usize, sites: usize, a: usize) -> Result<Self> {
        let mut acc = Self::zero(rank, sites);
        for l in 0..sites {
            acc = acc + Self::elem(rank, sites, l, a, a)?;
        }
        Ok(acc)
    }

    /// Orthogonal projector onto the sector with multiplicities `m`.
    pub fn sector_projector(rank: usize, sites: usize, m: &SectorLabel) -> Result<Self> {
        if m.rank() != rank || m.sites() != sites {
            return Err(Error::InvalidSector(format!("{:?} for N={rank}, n={sites}", m.counts())));
        }
        let mut op = Self::zero(rank, sites);
        for idx in m.basis() {
            op.mat.set(idx, idx, R::one());
        }
        Ok(op)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &Matrix<R> {
        &self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> &R {
        self.mat.get(row, col)
    }

    pub fn add_at(&mut self, row: usize, col: usize, v: R) {
        self.mat.add_at(row, col, v);
    }

    pub fn scale(&self, c: &R) -> Self {
        TensorOperator { rank: self.rank, sites: self.sites, mat: self.mat.scale(c) }
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> TensorOperator<S> {
        TensorOperator { rank: self.rank, sites: self.sites, mat: self.mat.map(f) }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self * other - other * self
    }

    pub fn is_zero(&self) -> bool {
        self.mat.is_zero()
    }

    pub fn nonzero_count(&self) -> usize {
        self.mat.nonzero_count()
    }

    pub fn max_magnitude(&self) -> f64 {
        self.mat.max_magnitude()
    }

    /// True when the operator is a multiple of the identity.
    pub fn is_scalar(&self) -> bool {
        let c = self.get(0, 0).clone();
        (self.clone() - Self::scalar(self.rank, self.sites, c)).is_zero()
    }

    /// Block of the operator on the sector basis.
    pub fn restrict(&self, sector: &SectorLabel) -> Matrix<R> {
        let b = sector.basis();
        self.mat.select(&b, &b)
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.rank != other.rank || self.sites != other.sites {
            return Err(Error::ShapeMismatch(format!(
                "(N={}, n={}) vs (N={}, n={})",
                self.rank, self.sites, other.rank, other.sites
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self.clone() + other.clone())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(self * other)
    }
}

impl TensorOperator<Rational> {
    /// Row-major entries as `"p/q"` strings; refuses operators above
    /// [`MAX_SERIALIZED_ENTRIES`] entries.
    pub fn to_json(&self) -> Result<serde_json::Value> {
        let d = self.dim();
        if d * d > MAX_SERIALIZED_ENTRIES {
            return Err(Error::TooLarge(d * d));
        }
        let rows: Vec<Vec<String>> =
            (0..d).map(|i| (0..d).map(|j| format_rational(self.get(i, j))).collect()).collect();
        Ok(serde_json::json!({ "rank": self.rank, "sites": self.sites, "entries": rows }))
    }
}

impl<R: Ring> Add for TensorOperator<R> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!((self.rank, self.sites), (rhs.rank, rhs.sites), "shape mismatch");
        TensorOperator { rank: self.rank, sites: self.sites, mat: self.mat + rhs.mat }
    }
}

impl<R: Ring> Sub for TensorOperator<R> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        assert_eq!((self.rank, self.sites), (rhs.rank, rhs.sites), "shape mismatch");
        TensorOperator { rank: self.rank, sites: self.sites, mat: self.mat - rhs.mat }
    }
}

impl<R: Ring> Neg for TensorOperator<R> {
    type Output = Self;
    fn neg(self) -> Self {
        TensorOperator { rank: self.rank, sites: self.sites, mat: -self.mat }
    }
}

impl<R: Ring> Mul<&TensorOperator<R>> for &TensorOperator<R> {
    type Output = TensorOperator<R>;
    fn mul(self, rhs: &TensorOperator<R>) -> TensorOperator<R> {
        assert_eq!((self.rank, self.sites), (rhs.rank, rhs.sites), "shape mismatch");
        TensorOperator { rank: self.rank, sites: self.sites, mat: &self.mat * &rhs.mat }
    }
}

impl<R: Ring> Mul for TensorOperator<R> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

/// Polynomial in `x` with operator coefficients, in increasing degree.
#[derive(Clone, Debug, PartialEq)]
pub struct OpPoly<R> {
    rank: usize,
    sites: usize,
    coeffs: Vec<TensorOperator<R>>,
}

impl<R: Ring> OpPoly<R> {
    pub fn zero(rank: usize, sites: usize) -> Self {
        OpPoly { rank, sites, coeffs: Vec::new() }
    }

    pub fn new(rank: usize, sites: usize, coeffs: Vec<TensorOperator<R>>) -> Self {
        let mut p = OpPoly { rank, sites, coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[TensorOperator<R>] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> TensorOperator<R> {
        self.coeffs.get(k).cloned().unwrap_or_else(|| TensorOperator::zero(self.rank, self.sites))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Adds `poly(x) * op`, where `poly` is given by its coefficients.
    pub fn add_scaled(&mut self, poly: &[R], op: &TensorOperator<R>) {
        for (k, c) in poly.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            while self.coeffs.len() <= k {
                self.coeffs.push(TensorOperator::zero(self.rank, self.sites));
            }
            let cur = std::mem::replace(&mut self.coeffs[k], TensorOperator::zero(self.rank, self.sites));
            self.coeffs[k] = cur + op.scale(c);
        }
        self.trim();
    }

    pub fn eval(&self, x: &R) -> TensorOperator<R> {
        let mut acc = TensorOperator::zero(self.rank, self.sites);
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(x) + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        OpPoly::new(
            self.rank,
            self.sites,
            self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.scale(&R::from_int(k as i64))).collect(),
        )
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S + Copy) -> OpPoly<S> {
        OpPoly::new(self.rank, self.sites, self.coeffs.iter().map(|c| c.map(f)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    type Op = TensorOperator<Rational>;

    #[test]
    fn elementary_operators_multiply_like_matrix_units() {
        let (n_loc, n) = (3, 2);
        for site in 0..n {
            for (a, b, c, d) in [(0, 1, 1, 2), (0, 1, 2, 2), (2, 2, 2, 0)] {
                let lhs = Op::elem(n_loc, n, site, a, b).unwrap() * Op::elem(n_loc, n, site, c, d).unwrap();
                let rhs = if b == c { Op::elem(n_loc, n, site, a, d).unwrap() } else { Op::zero(n_loc, n) };
                assert_eq!(lhs, rhs);
            }
        }
        assert!(Op::elem(2, 2, 2, 0, 0).is_err());
    }

    #[test]
    fn transposition_is_the_sum_over_matrix_units() {
        let (rank, sites) = (3, 3);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let mut acc = Op::zero(rank, sites);
            for a in 0..rank {
                for b in 0..rank {
                    acc = acc + Op::elem(rank, sites, i, a, b).unwrap() * Op::elem(rank, sites, j, b, a).unwrap();
                }
            }
            assert_eq!(acc, Op::perm_op(rank, &Permutation::transposition(sites, i, j)));
        }
    }

    #[test]
    fn permutation_operators_follow_op_product() {
        let rank = 2;
        let perms = Permutation::all(3);
        assert_eq!(perms.len(), 6);
        for s in &perms {
            for t in &perms {
                let lhs = Op::perm_op(rank, s) * Op::perm_op(rank, t);
                assert_eq!(lhs, Op::perm_op(rank, &s.op_product(t)));
            }
        }
    }

    #[test]
    fn permutation_conjugates_site_operators() {
        // P_s e^{(i)} P_s^{-1} = e^{(s^{-1}(i))}
        let (rank, sites) = (2, 3);
        let s = Permutation::new(vec![1, 2, 0]).unwrap();
        let p = Op::perm_op(rank, &s);
        let pinv = Op::perm_op(rank, &s.inverse());
        assert_eq!(&p * &pinv, Op::identity(rank, sites));
        for i in 0..sites {
            let e = Op::elem(rank, sites, i, 0, 1).unwrap();
            let moved = Op::elem(rank, sites, s.inverse().apply(i), 0, 1).unwrap();
            assert_eq!(&(&p * &e) * &pinv, moved);
        }
    }

    #[test]
    fn sector_projectors_resolve_identity() {
        let (rank, sites) = (3, 3);
        let mut acc = Op::zero(rank, sites);
        for m in SectorLabel::all(rank, sites) {
            let p = Op::sector_projector(rank, sites, &m).unwrap();
            assert_eq!(&p * &p, p);
            assert_eq!(m.basis().len(), m.dimension());
            acc = acc + p;
        }
        assert_eq!(acc, Op::identity(rank, sites));
        assert!(SectorLabel::new(vec![1, 1], 3).is_err());
    }

    #[test]
    fn weight_operators_commute_with_permutations() {
        let (rank, sites) = (2, 3);
        let m0 = Op::weight_op(rank, sites, 0).unwrap();
        for s in Permutation::all(sites) {
            assert!(m0.commutator(&Op::perm_op(rank, &s)).is_zero());
        }
    }

    #[test]
    fn serialization_guard() {
        let op = Op::identity(2, 2);
        let js = op.to_json().unwrap();
        assert_eq!(js["entries"][0][0], "1");
        assert!(Op::zero(4, 5).to_json().is_err());
    }

    #[test]
    fn op_poly_eval_and_derivative() {
        let id = Op::identity(2, 1);
        let mut p = OpPoly::zero(2, 1);
        p.add_scaled(&[qi(1), qi(0), qi(3)], &id);
        assert_eq!(p.eval(&qi(2)), id.scale(&qi(13)));
        assert_eq!(p.derivative().eval(&qi(2)), id.scale(&qi(12)));
    }
}
