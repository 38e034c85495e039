//! Structured representation of operator-valued functions of `h` and the
//! matrix derivative `d`.
//!
//! An [`HFunction`] is a finite sum of terms
//!
//! ```text
//! c(t, zeta) * P_sigma * W_1(h^(1)) ... W_n(h^(n)) * prod_k (tr h^k)^{m_k} * TAG
//! ```
//!
//! where each slot word is `W(u) = u^a prod_l R_l(u)^{b_l}` with
//! `R_l(u) = (1 - zeta_l u)^{-1}`, and the common tag is
//! `TAG = exp(sum_{k<=K} t_k tr h^k) prod_l det(1 - zeta_l h)^{-eps_l}`.
//! The coefficient `c` is a polynomial in the symbolic parameters: variable
//! `k - 1` is `t_k`, variable `K + l` is `zeta_l`.
//!
//! The derivative `d_j` on a fresh slot `j` follows the Leibniz rule:
//! hitting the tag gives `k t_k h^{k-1}` and `eps_l zeta_l R_l` at slot `j`,
//! hitting `(tr h^k)^m` gives `m k (tr h^k)^{m-1} h^{k-1}`, and hitting a slot
//! word `W(h^(i))` gives `P_ij [Delta W](h^(i), h^(j))` with the divided
//! difference `Delta W(u, v) = (W(u) - W(v)) / (u - v)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::partitions::{character_power_sum_poly, Partition};
use crate::poly::{MPoly, Monomial};
use crate::scalar::{qi, Rational, Ring};
use crate::tensor::{decode, encode, Permutation, TensorOperator};

/// Commutative word `h^a prod_l R_l^{b_l}` occupying one slot.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    h: u32,
    res: Vec<u32>,
}

impl Word {
    pub fn new(h: u32, mut res: Vec<u32>) -> Self {
        while res.last() == Some(&0) {
            res.pop();
        }
        Word { h, res }
    }

    pub fn unit() -> Self {
        Word::default()
    }

    pub fn power(a: u32) -> Self {
        Word { h: a, res: Vec::new() }
    }

    pub fn resolvent(l: usize) -> Self {
        let mut res = vec![0; l + 1];
        res[l] = 1;
        Word { h: 0, res }
    }

    pub fn h_exponent(&self) -> u32 {
        self.h
    }

    pub fn res_exponent(&self, l: usize) -> u32 {
        self.res.get(l).copied().unwrap_or(0)
    }

    fn times(&self, other: &Word) -> Word {
        let len = self.res.len().max(other.res.len());
        Word::new(self.h + other.h, (0..len).map(|l| self.res_exponent(l) + other.res_exponent(l)).collect())
    }

    /// Value at a scalar `u`, given the resolvent points.
    pub fn eval<R: Ring>(&self, u: &R, points: &[R]) -> Result<R> {
        let mut v = u.pow(self.h);
        for (l, &b) in self.res.iter().enumerate() {
            if b == 0 {
                continue;
            }
            let den = R::one() - points[l].clone() * u.clone();
            let inv = den.try_inv().ok_or_else(|| Error::Pole(format!("1 - zeta_{l} u vanishes")))?;
            v = v * inv.pow(b);
        }
        Ok(v)
    }

    /// Divided difference as a list of `(coefficient, u-word, v-word)`.
    /// `zeta_var(l)` is the parameter index of `zeta_l`.
    fn divided_difference(&self, zeta_var: impl Fn(usize) -> usize) -> Vec<(MPoly, Word, Word)> {
        // factors F_0 = h^a, F_l = R_l^{b_l}; product rule with u on the left, v on the right
        let mut factors: Vec<(Option<usize>, u32)> = vec![(None, self.h)];
        for (l, &b) in self.res.iter().enumerate() {
            if b > 0 {
                factors.push((Some(l), b));
            }
        }
        let single = |f: &(Option<usize>, u32), e: u32| -> Word {
            match f.0 {
                None => Word::power(e),
                Some(l) => {
                    let mut res = vec![0; l + 1];
                    res[l] = e;
                    Word::new(0, res)
                }
            }
        };
        let mut out = Vec::new();
        for s in 0..factors.len() {
            let left = factors[..s].iter().fold(Word::unit(), |acc, f| acc.times(&single(f, f.1)));
            let right = factors[s + 1..].iter().fold(Word::unit(), |acc, f| acc.times(&single(f, f.1)));
            let (kind, e) = factors[s];
            match kind {
                None => {
                    for p in 0..e {
                        out.push((MPoly::constant(qi(1)), left.times(&Word::power(p)), right.times(&Word::power(e - 1 - p))));
                    }
                }
                Some(l) => {
                    let f = &factors[s];
                    for p in 0..e {
                        out.push((
                            MPoly::var(zeta_var(l)),
                            left.times(&single(f, p + 1)),
                            right.times(&single(f, e - p)),
                        ));
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct TermKey {
    perm: Permutation,
    words: Vec<Word>,
    traces: Vec<u32>,
}

/// Parameter layout shared by all terms: `K` time variables and resolvent
/// points with their weights `eps_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HSpace {
    pub rank: usize,
    pub sites: usize,
    pub times: usize,
    pub points: Vec<i32>,
}

impl HSpace {
    pub fn new(rank: usize, sites: usize) -> Self {
        HSpace { rank, sites, times: 0, points: Vec::new() }
    }

    fn zeta_var(&self, l: usize) -> usize {
        self.times + l
    }
}

/// Operator-valued function of `h` in structured form.
#[derive(Clone, Debug, PartialEq)]
pub struct HFunction {
    space: HSpace,
    occupied: Vec<bool>,
    terms: BTreeMap<TermKey, MPoly>,
}

/// Result of evaluating at a diagonal `h`: the operator multiplies
/// `exp(log_scale)`, where `log_scale = sum_k t_k tr h^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluated<R> {
    pub op: TensorOperator<R>,
    pub log_scale: R,
}

impl HFunction {
    fn empty(space: HSpace) -> Self {
        let n = space.sites;
        HFunction { space, occupied: vec![false; n], terms: BTreeMap::new() }
    }

    fn unit_key(sites: usize) -> TermKey {
        TermKey { perm: Permutation::identity(sites), words: vec![Word::unit(); sites], traces: Vec::new() }
    }

    /// Scalar function given as a polynomial in the power sums
    /// (variable `k - 1` stands for `tr h^k`).
    pub fn trace_polynomial(rank: usize, sites: usize, poly: &MPoly) -> Self {
        let mut f = HFunction::empty(HSpace::new(rank, sites));
        for (m, c) in poly.terms() {
            let mut key = Self::unit_key(sites);
            key.traces = m.exps().to_vec();
            f.terms.insert(key, MPoly::constant(c.clone()));
        }
        f
    }

    /// The character `chi_lambda(h)`.
    pub fn character(rank: usize, sites: usize, lambda: &Partition) -> Self {
        Self::trace_polynomial(rank, sites, &character_power_sum_poly(lambda))
    }

    /// `exp(sum_{k<=K} t_k tr h^k) prod_l det(1 - zeta_l h)^{-eps_l}`.
    pub fn exponential(rank: usize, sites: usize, times: usize, points: &[i32]) -> Self {
        let space = HSpace { rank, sites, times, points: points.to_vec() };
        let mut f = HFunction::empty(space);
        f.terms.insert(Self::unit_key(sites), MPoly::constant(qi(1)));
        f
    }

    /// Multiplies the tag of a scalar trace function by an exponential tag.
    pub fn with_tag(mut self, times: usize, points: &[i32]) -> Result<Self> {
        if self.space.times != 0 || !self.space.points.is_empty() {
            return Err(Error::Runtime("tag already present".into()));
        }
        self.space.times = times;
        self.space.points = points.to_vec();
        Ok(self)
    }

    /// Declares one more resolvent point with weight `eps`; returns its index.
    pub fn extend_point(&mut self, eps: i32) -> usize {
        // parameter indices of existing zetas shift only if times change, which they do not here
        self.space.points.push(eps);
        self.space.points.len() - 1
    }

    pub fn space(&self) -> &HSpace {
        &self.space
    }

    pub fn occupied(&self) -> &[bool] {
        &self.occupied
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, key: TermKey, c: MPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(existing) => {
                let sum = std::mem::take(existing) + c;
                if sum.is_zero() {
                    self.terms.remove(&key);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn add(&self, other: &HFunction) -> Result<HFunction> {
        if self.space != other.space || self.occupied != other.occupied {
            return Err(Error::ShapeMismatch("HFunction layouts differ".into()));
        }
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> HFunction {
        let mut out = HFunction::empty(self.space.clone());
        out.occupied = self.occupied.clone();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v.scale(c));
        }
        out
    }

    /// `d_j f` for a slot `j` not yet occupied.
    pub fn mat_derive(&self, j: usize) -> Result<HFunction> {
        if j >= self.space.sites {
            return Err(Error::IndexOutOfRange(format!("slot {j} of {}", self.space.sites)));
        }
        if self.occupied[j] {
            return Err(Error::SlotOccupied(j));
        }
        let mut out = HFunction::empty(self.space.clone());
        out.occupied = self.occupied.clone();
        out.occupied[j] = true;
        let n = self.space.sites;
        let k_times = self.space.times;
        for (key, c) in &self.terms {
            // exponential of the traces
            for k in 1..=k_times {
                let mut nk = key.clone();
                nk.words[j] = Word::power((k - 1) as u32);
                out.add_term(nk, c.clone() * MPoly::var(k - 1).scale(&qi(k as i64)));
            }
            // determinant factors
            for (l, &eps) in self.space.points.iter().enumerate() {
                if eps == 0 {
                    continue;
                }
                let mut nk = key.clone();
                nk.words[j] = Word::resolvent(l);
                out.add_term(nk, c.clone() * MPoly::var(self.space.zeta_var(l)).scale(&qi(eps as i64)));
            }
            // trace monomial
            for (idx, &m) in key.traces.iter().enumerate() {
                if m == 0 {
                    continue;
                }
                let k = idx + 1;
                let mut nk = key.clone();
                nk.traces[idx] -= 1;
                while nk.traces.last() == Some(&0) {
                    nk.traces.pop();
                }
                nk.words[j] = Word::power((k - 1) as u32);
                out.add_term(nk, c.scale(&qi((m as i64) * (k as i64))));
            }
            // slot words
            for i in 0..n {
                if !self.occupied[i] {
                    continue;
                }
                let w = &key.words[i];
                if w.h == 0 && w.res.is_empty() {
                    continue;
                }
                let perm = key.perm.op_product(&Permutation::transposition(n, i, j));
                for (coef, wu, wv) in w.divided_difference(|l| self.space.zeta_var(l)) {
                    let mut nk = key.clone();
                    nk.perm = perm.clone();
                    nk.words[i] = wu;
                    nk.words[j] = wv;
                    out.add_term(nk, c.clone() * coef);
                }
            }
        }
        Ok(out)
    }

    /// `d_{slots[last]} ... d_{slots[0]} f`.
    pub fn derive_chain(&self, slots: &[usize]) -> Result<HFunction> {
        let mut f = self.clone();
        for &s in slots {
            f = f.mat_derive(s)?;
        }
        Ok(f)
    }

    /// All `d_S f` for subsets `S` of the sites, indexed by bitmask.
    pub fn derivative_table(&self) -> Result<Vec<HFunction>> {
        self.derivative_table_on(self.space.sites)
    }

    /// All `d_S f` for subsets `S` of the first `n` slots.
    pub fn derivative_table_on(&self, n: usize) -> Result<Vec<HFunction>> {
        if n > self.space.sites {
            return Err(Error::IndexOutOfRange(format!("{n} slots of {}", self.space.sites)));
        }
        let mut table: Vec<HFunction> = Vec::with_capacity(1 << n);
        table.push(self.clone());
        for mask in 1usize..(1 << n) {
            let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
            let prev = table[mask & !(1 << top)].mat_derive(top)?;
            table.push(prev);
        }
        Ok(table)
    }

    /// Evaluates at `h = diag(twist)` with the given parameter values.
    ///
    /// `times[k-1]` is `t_k` (missing entries are zero) and `points[l]` is
    /// `zeta_l`.
    pub fn evaluate<R: Ring>(&self, twist: &[R], times: &[R], points: &[R]) -> Result<Evaluated<R>> {
        let rank = self.space.rank;
        let n = self.space.sites;
        if twist.len() != rank {
            return Err(Error::ShapeMismatch(format!("twist of length {} for N = {rank}", twist.len())));
        }
        if points.len() != self.space.points.len() {
            return Err(Error::UnknownPoint(points.len()));
        }
        let mut params: Vec<R> = (0..self.space.times).map(|k| times.get(k).cloned().unwrap_or_else(R::zero)).collect();
        params.extend(points.iter().cloned());

        let max_trace = self.terms.keys().map(|k| k.traces.len()).max().unwrap_or(0).max(self.space.times);
        let power_sums: Vec<R> = (1..=max_trace)
            .map(|k| twist.iter().fold(R::zero(), |acc, x| acc + x.pow(k as u32)))
            .collect();

        let mut scalar_tag = R::one();
        for (l, &eps) in self.space.points.iter().enumerate() {
            for x in twist {
                let base = R::one() - points[l].clone() * x.clone();
                let f = if eps >= 0 {
                    base.try_inv()
                        .ok_or_else(|| Error::Pole(format!("det(1 - zeta_{l} h) vanishes")))?
                        .pow(eps as u32)
                } else {
                    base.pow((-eps) as u32)
                };
                scalar_tag = scalar_tag * f;
            }
        }
        let log_scale = (0..self.space.times).fold(R::zero(), |acc, k| acc + params[k].clone() * power_sums[k].clone());

        let mut op = TensorOperator::zero(rank, n);
        let dim = op.dim();
        let states: Vec<Vec<usize>> = (0..dim).map(|c| decode(c, rank, n)).collect();
        for (key, c) in &self.terms {
            let coef = c.eval(&params);
            if coef.is_zero() {
                continue;
            }
            let mut trace_val = R::one();
            for (idx, &m) in key.traces.iter().enumerate() {
                if m > 0 {
                    trace_val = trace_val * power_sums[idx].pow(m);
                }
            }
            let pref = coef * trace_val * scalar_tag.clone();
            if pref.is_zero() {
                continue;
            }
            // word values per slot and local index
            let mut word_vals: Vec<Option<Vec<R>>> = Vec::with_capacity(n);
            for w in &key.words {
                if w.h == 0 && w.res.is_empty() {
                    word_vals.push(None);
                } else {
                    let vals = twist.iter().map(|u| w.eval(u, points)).collect::<Result<Vec<R>>>()?;
                    word_vals.push(Some(vals));
                }
            }
            for (col, a) in states.iter().enumerate() {
                let mut v = pref.clone();
                for (i, wv) in word_vals.iter().enumerate() {
                    if let Some(vals) = wv {
                        v = v * vals[a[i]].clone();
                        if v.is_zero() {
                            break;
                        }
                    }
                }
                if v.is_zero() {
                    continue;
                }
                let b: Vec<usize> = (0..n).map(|i| a[key.perm.apply(i)]).collect();
                op.add_at(encode(&b, rank), col, v);
            }
        }
        Ok(Evaluated { op, log_scale })
    }

    /// Coefficient polynomials, for inspection and tests.
    pub fn coefficient_monomials(&self) -> Vec<Monomial> {
        self.terms.values().flat_map(|c| c.terms().map(|(m, _)| m.clone()).collect::<Vec<_>>()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    type Op = TensorOperator<Rational>;

    #[test]
    fn derivative_of_trace_is_identity_and_of_square_is_twice_h() {
        let twist = vec![q(3, 2), q(-1, 3)];
        let tr = MPoly::var(0);
        let f = HFunction::trace_polynomial(2, 1, &tr).mat_derive(0).unwrap();
        let e = f.evaluate::<Rational>(&twist, &[], &[]).unwrap();
        assert_eq!(e.op, Op::identity(2, 1));
        let f2 = HFunction::trace_polynomial(2, 1, &MPoly::var(1)).mat_derive(0).unwrap();
        let e2 = f2.evaluate::<Rational>(&twist, &[], &[]).unwrap();
        let h = Op::elem(2, 1, 0, 0, 0).unwrap().scale(&twist[0]) + Op::elem(2, 1, 0, 1, 1).unwrap().scale(&twist[1]);
        assert_eq!(e2.op, h.scale(&qi(2)));
    }

    #[test]
    fn second_derivative_of_trace_square_is_twice_permutation() {
        // d_2 d_1 tr h^2 = 2 P_12
        let f = HFunction::trace_polynomial(3, 2, &MPoly::var(1)).derive_chain(&[0, 1]).unwrap();
        let e = f.evaluate::<Rational>(&[qi(1), qi(2), qi(5)], &[], &[]).unwrap();
        assert_eq!(e.op, Op::perm_op(3, &Permutation::transposition(2, 0, 1)).scale(&qi(2)));
    }

    #[test]
    fn derivatives_commute() {
        let lam = Partition::new(vec![2, 1]).unwrap();
        let f = HFunction::character(2, 3, &lam).with_tag(2, &[1]).unwrap();
        let twist = vec![q(2, 1), q(-1, 2)];
        let times = vec![q(1, 3), q(-2, 5)];
        let points = vec![q(1, 7)];
        let a = f.derive_chain(&[0, 1, 2]).unwrap().evaluate(&twist, &times, &points).unwrap();
        let b = f.derive_chain(&[2, 0, 1]).unwrap().evaluate(&twist, &times, &points).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn occupied_slot_is_rejected() {
        let f = HFunction::exponential(2, 2, 1, &[]).mat_derive(0).unwrap();
        assert_eq!(f.mat_derive(0), Err(Error::SlotOccupied(0)));
        assert!(f.mat_derive(5).is_err());
    }

    #[test]
    fn determinant_derivative_rule() {
        // d det(1 - z h)^{-1} = z (1 - z h)^{-1} det(1 - z h)^{-1}
        let twist = vec![q(1, 2), q(3, 1)];
        let z = q(1, 5);
        let f = HFunction::exponential(2, 1, 0, &[1]).mat_derive(0).unwrap();
        let e = f.evaluate(&twist, &[], std::slice::from_ref(&z)).unwrap();
        let w: Rational = twist.iter().map(|x| (qi(1) - &z * x).recip()).product();
        for a in 0..2 {
            let expect = &z * (qi(1) - &z * &twist[a]).recip() * &w;
            assert_eq!(e.op.get(a, a), &expect);
        }
    }

    #[test]
    fn pole_is_reported() {
        let f = HFunction::exponential(1, 1, 0, &[1]);
        assert!(matches!(f.evaluate(&[qi(2)], &[], &[q(1, 2)]), Err(Error::Pole(_))));
    }
}
