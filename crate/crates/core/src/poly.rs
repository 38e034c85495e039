//! Polynomial and truncated series rings.
//!
//! - [`MPoly`]: sparse multivariate polynomial with rational coefficients
//! - [`UPoly`]: dense univariate polynomial over any [`Ring`]
//! - [`Jet`]: truncated power series in one infinitesimal over any [`Ring`]
//!
//! All three implement [`Ring`] themselves, so they can be used as scalars of
//! operators and matrices (symbolic times, spectral parameters, Taylor
//! expansions in `x`, the small parameter `eta` of the group picture).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::{qi, Rational, Ring};

/// Exponent vector of a monomial; trailing zeros are trimmed so that equal
/// monomials compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(i: usize, e: u32) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = e;
        Monomial::new(v)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Degree with variable `i` weighted by `weight(i)`.
    pub fn weighted_degree(&self, weight: impl Fn(usize) -> u32) -> u32 {
        self.0.iter().enumerate().map(|(i, e)| e * weight(i)).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let len = self.0.len().max(other.0.len());
        let v = (0..len).map(|i| self.exp(i) + other.exp(i)).collect();
        Monomial::new(v)
    }
}

/// Sparse multivariate polynomial over the rationals.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .0
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| **e > 0)
                    .map(|(i, e)| if *e == 1 { format!("v{i}") } else { format!("v{i}^{e}") })
                    .collect();
                if vars.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}*{}", vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl MPoly {
    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !Ring::is_zero(&c) {
            terms.insert(Monomial::one(), c);
        }
        MPoly { terms }
    }

    pub fn var(i: usize) -> Self {
        Self::monomial(Monomial::var(i, 1), qi(1))
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !Ring::is_zero(&c) {
            terms.insert(m, c);
        }
        MPoly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(|| qi(0))
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.0.is_empty())
    }

    pub fn num_vars(&self) -> usize {
        self.terms.keys().map(|m| m.0.len()).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if Ring::is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if Ring::is_zero(existing) {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> MPoly {
        if Ring::is_zero(c) {
            return MPoly::default();
        }
        MPoly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Partial derivative with respect to variable `i`.
    pub fn partial(&self, i: usize) -> MPoly {
        let mut out = MPoly::default();
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e == 0 {
                continue;
            }
            let mut v = m.0.clone();
            v[i] -= 1;
            out.add_term(Monomial::new(v), c * qi(e as i64));
        }
        out
    }

    /// Keeps only monomials whose weighted degree is at most `max`.
    pub fn truncate_weighted(&self, max: u32, weight: impl Fn(usize) -> u32) -> MPoly {
        MPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weighted_degree(&weight) <= max)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Evaluates at `values[i]` for variable `i`; missing variables must not occur.
    pub fn eval<R: Ring>(&self, values: &[R]) -> R {
        let mut acc = R::zero();
        for (m, c) in &self.terms {
            let mut t = R::from_rational(c);
            for (i, e) in m.0.iter().enumerate() {
                if *e > 0 {
                    t = t * values[i].pow(*e);
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Substitutes variable `i` by `subs[i]`.
    pub fn substitute(&self, subs: &[MPoly]) -> MPoly {
        self.eval(subs)
    }
}

impl Add for MPoly {
    type Output = MPoly;
    fn add(mut self, rhs: MPoly) -> MPoly {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub for MPoly {
    type Output = MPoly;
    fn sub(mut self, rhs: MPoly) -> MPoly {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
        self
    }
}

impl Neg for MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        MPoly { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Mul for MPoly {
    type Output = MPoly;
    fn mul(self, rhs: MPoly) -> MPoly {
        let mut out = MPoly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Ring for MPoly {
    const EXACT: bool = true;
    fn zero() -> Self {
        MPoly::default()
    }
    fn one() -> Self {
        MPoly::constant(qi(1))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_rational(r: &Rational) -> Self {
        MPoly::constant(r.clone())
    }
    fn try_inv(&self) -> Option<Self> {
        if self.is_constant() {
            self.constant_term().try_inv().map(MPoly::constant)
        } else {
            None
        }
    }
    fn magnitude(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).sum()
    }
}

/// Dense univariate polynomial, coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq)]
pub struct UPoly<R> {
    coeffs: Vec<R>,
}

impl<R: Ring> UPoly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn constant(c: R) -> Self {
        UPoly::new(vec![c])
    }

    /// The polynomial `z - c`.
    pub fn linear(c: R) -> Self {
        UPoly::new(vec![-c, R::one()])
    }

    pub fn x() -> Self {
        UPoly::new(vec![R::zero(), R::one()])
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::zero)
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn eval(&self, x: &R) -> R {
        let mut acc = R::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        UPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * R::from_int(k as i64))
                .collect(),
        )
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> UPoly<S> {
        UPoly::new(self.coeffs.iter().map(f).collect())
    }
}

impl<R: Ring> Add for UPoly<R> {
    type Output = UPoly<R>;
    fn add(self, rhs: Self) -> Self {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        UPoly::new((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl<R: Ring> Sub for UPoly<R> {
    type Output = UPoly<R>;
    fn sub(self, rhs: Self) -> Self {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        UPoly::new((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl<R: Ring> Neg for UPoly<R> {
    type Output = UPoly<R>;
    fn neg(self) -> Self {
        UPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl<R: Ring> Mul for UPoly<R> {
    type Output = UPoly<R>;
    fn mul(self, rhs: Self) -> Self {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return UPoly::new(Vec::new());
        }
        let mut out = vec![R::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        UPoly::new(out)
    }
}

impl<R: Ring> Ring for UPoly<R> {
    const EXACT: bool = R::EXACT;
    fn zero() -> Self {
        UPoly::new(Vec::new())
    }
    fn one() -> Self {
        UPoly::constant(R::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn from_rational(r: &Rational) -> Self {
        UPoly::constant(R::from_rational(r))
    }
    fn try_inv(&self) -> Option<Self> {
        if self.coeffs.len() == 1 {
            self.coeffs[0].try_inv().map(UPoly::constant)
        } else {
            None
        }
    }
    fn magnitude(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).sum()
    }
}

/// Truncated power series `c_0 + c_1 e + ... + c_{order-1} e^{order-1}`.
///
/// A jet built from a plain scalar (`zero`, `one`, `from_rational`) is exact
/// and carries no truncation; mixing it with a truncated jet truncates the
/// result at the smaller order.
#[derive(Clone, Debug)]
pub struct Jet<R> {
    coeffs: Vec<R>,
    order: Option<usize>,
}

impl<R: Ring> PartialEq for Jet<R> {
    fn eq(&self, other: &Self) -> bool {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len).all(|k| self.coeff(k) == other.coeff(k))
    }
}

impl<R: Ring> Jet<R> {
    /// Jet with explicit coefficients, truncated at `order` terms.
    pub fn new(mut coeffs: Vec<R>, order: usize) -> Self {
        coeffs.truncate(order);
        let mut j = Jet { coeffs, order: Some(order) };
        j.trim();
        j
    }

    pub fn constant(c: R) -> Self {
        let mut j = Jet { coeffs: vec![c], order: None };
        j.trim();
        j
    }

    /// The infinitesimal itself, `e`, at the given order.
    pub fn var(order: usize) -> Self {
        Jet::new(vec![R::zero(), R::one()], order)
    }

    /// `c + e` at the given order.
    pub fn variable_at(c: R, order: usize) -> Self {
        Jet::new(vec![c, R::one()], order)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn order(&self) -> Option<usize> {
        self.order
    }

    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::zero)
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    fn combined_order(&self, other: &Self) -> Option<usize> {
        match (self.order, other.order) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        }
    }

    fn build(coeffs: Vec<R>, order: Option<usize>) -> Self {
        let mut c = coeffs;
        if let Some(o) = order {
            c.truncate(o);
        }
        let mut j = Jet { coeffs: c, order };
        j.trim();
        j
    }

    /// Multiplies by `e^k`.
    pub fn shift(&self, k: usize) -> Self {
        let mut c = vec![R::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        Jet::build(c, self.order)
    }

    /// `exp(a e)` for a scalar `a`, to the given order.
    pub fn exp_linear(a: &R, order: usize) -> Self {
        let mut c = Vec::with_capacity(order);
        let mut term = R::one();
        for k in 0..order {
            if k > 0 {
                term = term * a.clone() * R::from_rational(&crate::scalar::q(1, k as i64));
            }
            c.push(term.clone());
        }
        Jet::new(c, order)
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Jet<S> {
        Jet::build(self.coeffs.iter().map(f).collect(), self.order)
    }
}

impl<R: Ring> Add for Jet<R> {
    type Output = Jet<R>;
    fn add(self, rhs: Self) -> Self {
        let order = self.combined_order(&rhs);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Jet::build((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect(), order)
    }
}

impl<R: Ring> Sub for Jet<R> {
    type Output = Jet<R>;
    fn sub(self, rhs: Self) -> Self {
        let order = self.combined_order(&rhs);
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Jet::build((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect(), order)
    }
}

impl<R: Ring> Neg for Jet<R> {
    type Output = Jet<R>;
    fn neg(self) -> Self {
        Jet::build(self.coeffs.into_iter().map(|c| -c).collect(), self.order)
    }
}

impl<R: Ring> Mul for Jet<R> {
    type Output = Jet<R>;
    fn mul(self, rhs: Self) -> Self {
        let order = self.combined_order(&rhs);
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return Jet::build(Vec::new(), order);
        }
        let mut len = self.coeffs.len() + rhs.coeffs.len() - 1;
        if let Some(o) = order {
            len = len.min(o);
        }
        let mut out = vec![R::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len || a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Jet::build(out, order)
    }
}

impl<R: Ring> Ring for Jet<R> {
    const EXACT: bool = R::EXACT;
    fn zero() -> Self {
        Jet { coeffs: Vec::new(), order: None }
    }
    fn one() -> Self {
        Jet::constant(R::one())
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn from_rational(r: &Rational) -> Self {
        Jet::constant(R::from_rational(r))
    }
    /// Inverse of a jet whose constant term is a unit.
    fn try_inv(&self) -> Option<Self> {
        let c0inv = self.coeff(0).try_inv()?;
        match self.order {
            None if self.coeffs.len() <= 1 => Some(Jet::constant(c0inv)),
            None => None,
            Some(order) => {
                let mut out: Vec<R> = Vec::with_capacity(order);
                for k in 0..order {
                    if k == 0 {
                        out.push(c0inv.clone());
                        continue;
                    }
                    let mut s = R::zero();
                    for j in 1..=k {
                        s = s + self.coeff(j) * out[k - j].clone();
                    }
                    out.push(-(s * c0inv.clone()));
                }
                Some(Jet::new(out, order))
            }
        }
    }
    fn magnitude(&self) -> f64 {
        self.coeffs.iter().map(|c| c.magnitude()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn mpoly_arithmetic_and_partials() {
        let x = MPoly::var(0);
        let y = MPoly::var(1);
        let p = (x.clone() + y.clone()) * (x.clone() - y.clone());
        let expected = x.clone() * x.clone() - y.clone() * y.clone();
        assert_eq!(p, expected);
        assert_eq!(p.partial(0), x.scale(&qi(2)));
        assert_eq!(p.eval(&[qi(3), qi(2)]), qi(5));
        assert!((p.clone() - expected).is_zero());
    }

    #[test]
    fn mpoly_weighted_truncation() {
        let t1 = MPoly::var(0);
        let t2 = MPoly::var(1);
        let p = t1.clone() * t1.clone() * t1.clone() + t2.clone() * t1.clone() + t2.clone() * t2;
        let tr = p.truncate_weighted(3, |i| i as u32 + 1);
        assert_eq!(tr.num_terms(), 2);
    }

    #[test]
    fn upoly_eval_and_product() {
        let p = UPoly::linear(qi(2)) * UPoly::linear(qi(-3));
        assert_eq!(p.coeffs(), &[qi(-6), qi(1), qi(1)]);
        assert_eq!(p.eval(&qi(2)), qi(0));
        assert_eq!(p.derivative().eval(&qi(0)), qi(1));
    }

    #[test]
    fn jet_inverse_matches_geometric_series() {
        let order = 6;
        let one_minus = Jet::new(vec![qi(1), qi(-1)], order);
        let inv = one_minus.try_inv().unwrap();
        for k in 0..order {
            assert_eq!(inv.coeff(k), qi(1));
        }
        assert_eq!(inv * one_minus, Jet::<Rational>::one());
    }

    #[test]
    fn jet_exp_linear_is_multiplicative() {
        let order = 7;
        let a = Jet::exp_linear(&q(1, 2), order);
        let b = Jet::exp_linear(&q(3, 2), order);
        assert_eq!(a * b, Jet::exp_linear(&qi(2), order));
    }

    #[test]
    fn jet_constants_do_not_truncate() {
        let e = Jet::<Rational>::var(3);
        let c = Jet::constant(qi(5));
        let p = (c + e.clone()) * e.clone() * e.clone() * e;
        assert!(p.is_zero());
    }
}
