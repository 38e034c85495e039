//! Entrywise oracle for matrix derivatives.
//!
//! A [`BrutePoly`] stores an operator-valued function as a sum over strings
//! of matrix units `e_{a_1 b_1} (x) ... (x) e_{a_k b_k}` on the occupied slots,
//! each multiplied by a polynomial in the `N^2` matrix entries (variable
//! `c * N + d` is the entry `(c, d)`), divided by a product of powers of
//! `det(1 - zeta_l h)` and multiplied by `exp(sum_k t_k tr h^k)` with numeric
//! parameters. Derivatives are plain partial derivatives with the quotient
//! rule, so this route shares nothing with the structured one beyond the
//! polynomial arithmetic.
//!
//! The same container also carries functions of a group element `g`, for the
//! co-derivative `D f(g) = sum_ab e_ab sum_d g_ad df/dg_bd`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::partitions::{character_power_sum_poly, Partition};
use crate::poly::MPoly;
use crate::scalar::{qi, Rational, Ring};
use crate::tensor::{decode, encode, TensorOperator};

/// Key: `(slot, a, b)` for each occupied slot, in slot order.
type UnitString = Vec<(usize, usize, usize)>;

#[derive(Clone, Debug, PartialEq)]
pub struct BrutePoly {
    rank: usize,
    sites: usize,
    occupied: Vec<bool>,
    entries: BTreeMap<UnitString, MPoly>,
    /// `d_l = det(1 - zeta_l h)` as polynomials, with their denominator exponents.
    dets: Vec<MPoly>,
    den_exps: Vec<u32>,
    /// `theta(h) = sum_k t_k tr h^k`, zero when there is no exponential.
    theta: MPoly,
}

/// Matrix of entry variables.
pub fn entry_matrix(rank: usize) -> Matrix<MPoly> {
    Matrix::from_fn(rank, rank, |c, d| MPoly::var(c * rank + d))
}

/// `tr X^k` for the entry matrix, `k = 1..=kmax`.
pub fn entry_power_sums(rank: usize, kmax: usize) -> Vec<MPoly> {
    let x = entry_matrix(rank);
    let mut p = Matrix::identity(rank);
    let mut out = Vec::with_capacity(kmax);
    for _ in 0..kmax {
        p = &p * &x;
        out.push(p.trace());
    }
    out
}

/// `chi_lambda(X)` as a polynomial in the entries.
pub fn entry_character(rank: usize, lambda: &Partition) -> MPoly {
    let poly = character_power_sum_poly(lambda);
    let kmax = poly.num_vars();
    poly.eval(&entry_power_sums(rank, kmax))
}

impl BrutePoly {
    /// Scalar function `f(h) exp(sum t_k tr h^k) prod_l det(1 - zeta_l h)^{-eps_l}`.
    pub fn new(rank: usize, sites: usize, f: MPoly, times: &[Rational], points: &[(Rational, i32)]) -> Self {
        let ps = entry_power_sums(rank, times.len());
        let theta = times.iter().zip(&ps).fold(MPoly::default(), |acc, (t, p)| acc + p.scale(t));
        let x = entry_matrix(rank);
        let mut numerator = f;
        let mut dets = Vec::new();
        let mut den_exps = Vec::new();
        for (zeta, eps) in points {
            let m = Matrix::identity(rank) - x.scale(&MPoly::constant(zeta.clone()));
            let d = m.det();
            if *eps < 0 {
                for _ in 0..(-eps) {
                    numerator = numerator * d.clone();
                }
            } else if *eps > 0 {
                dets.push(d);
                den_exps.push(*eps as u32);
            }
        }
        let mut entries = BTreeMap::new();
        if !numerator.is_zero() {
            entries.insert(Vec::new(), numerator);
        }
        BrutePoly { rank, sites, occupied: vec![false; sites], entries, dets, den_exps, theta }
    }

    /// Polynomial function of the group element (no denominators, no exponential).
    pub fn group(rank: usize, sites: usize, f: MPoly) -> Self {
        BrutePoly::new(rank, sites, f, &[], &[])
    }

    /// `chi_lambda(g - 1)` as a function of `g`.
    pub fn shifted_character(rank: usize, sites: usize, lambda: &Partition) -> Self {
        let chi = entry_character(rank, lambda);
        let subs: Vec<MPoly> = (0..rank * rank)
            .map(|v| {
                let (c, d) = (v / rank, v % rank);
                if c == d {
                    MPoly::var(v) - MPoly::constant(qi(1))
                } else {
                    MPoly::var(v)
                }
            })
            .collect();
        BrutePoly::group(rank, sites, chi.substitute(&subs))
    }

    pub fn num_strings(&self) -> usize {
        self.entries.len()
    }

    fn prepare(&self, j: usize) -> Result<BrutePoly> {
        if j >= self.sites {
            return Err(Error::IndexOutOfRange(format!("slot {j} of {}", self.sites)));
        }
        if self.occupied[j] {
            return Err(Error::SlotOccupied(j));
        }
        let mut out = self.clone();
        out.entries.clear();
        out.occupied[j] = true;
        Ok(out)
    }

    fn insert(entries: &mut BTreeMap<UnitString, MPoly>, key: UnitString, p: MPoly) {
        if p.is_zero() {
            return;
        }
        let e = entries.entry(key).or_default();
        *e = std::mem::take(e) + p;
    }

    fn with_unit(key: &UnitString, slot: usize, a: usize, b: usize) -> UnitString {
        let mut k = key.clone();
        k.push((slot, a, b));
        k.sort();
        k
    }

    /// `d_j` by partial derivatives: component `e_ab` at slot `j` carries
    /// `d/dh_ba`.
    pub fn brute_derive(&self, j: usize) -> Result<BrutePoly> {
        let mut out = self.prepare(j)?;
        let rank = self.rank;
        let dets_prod = self.dets.iter().fold(MPoly::constant(qi(1)), |acc, d| acc * d.clone());
        for (key, p) in &self.entries {
            for a in 0..rank {
                for b in 0..rank {
                    let v = b * rank + a;
                    let mut num = p.partial(v) + p.clone() * self.theta.partial(v);
                    if !self.dets.is_empty() {
                        num = num * dets_prod.clone();
                        for (l, d) in self.dets.iter().enumerate() {
                            let others = self
                                .dets
                                .iter()
                                .enumerate()
                                .filter(|(m, _)| *m != l)
                                .fold(MPoly::constant(qi(1)), |acc, (_, dm)| acc * dm.clone());
                            num = num - (p.clone() * d.partial(v) * others).scale(&qi(self.den_exps[l] as i64));
                        }
                    }
                    Self::insert(&mut out.entries, Self::with_unit(key, j, a, b), num);
                }
            }
        }
        for e in out.den_exps.iter_mut() {
            *e += 1;
        }
        Ok(out)
    }

    /// Co-derivative `D_j` on a polynomial function of `g`.
    pub fn co_derive(&self, j: usize) -> Result<BrutePoly> {
        if !self.dets.is_empty() || !self.theta.is_zero() {
            return Err(Error::Runtime("co-derivative needs a polynomial function of g".into()));
        }
        let mut out = self.prepare(j)?;
        let rank = self.rank;
        for (key, p) in &self.entries {
            for a in 0..rank {
                for b in 0..rank {
                    let mut acc = MPoly::default();
                    for d in 0..rank {
                        let dp = p.partial(b * rank + d);
                        if !dp.is_zero() {
                            acc = acc + MPoly::var(a * rank + d) * dp;
                        }
                    }
                    Self::insert(&mut out.entries, Self::with_unit(key, j, a, b), acc);
                }
            }
        }
        Ok(out)
    }

    pub fn brute_chain(&self, slots: &[usize]) -> Result<BrutePoly> {
        slots.iter().try_fold(self.clone(), |f, &s| f.brute_derive(s))
    }

    pub fn co_chain(&self, slots: &[usize]) -> Result<BrutePoly> {
        slots.iter().try_fold(self.clone(), |f, &s| f.co_derive(s))
    }

    /// Evaluates at the diagonal matrix `diag(values)`. Returns the operator
    /// (already divided by the determinant powers) and `theta(diag)`.
    pub fn evaluate<R: Ring>(&self, values: &[R]) -> Result<(TensorOperator<R>, R)> {
        let rank = self.rank;
        if values.len() != rank {
            return Err(Error::ShapeMismatch(format!("{} values for N = {rank}", values.len())));
        }
        let vars: Vec<R> =
            (0..rank * rank).map(|v| if v / rank == v % rank { values[v / rank].clone() } else { R::zero() }).collect();
        let mut den = R::one();
        for (d, &e) in self.dets.iter().zip(&self.den_exps) {
            den = den * d.eval(&vars).pow(e);
        }
        let den_inv = den.try_inv().ok_or_else(|| Error::Pole("det(1 - zeta h) vanishes".into()))?;
        let theta = self.theta.eval(&vars);
        let n = self.sites;
        let mut op = TensorOperator::zero(rank, n);
        let dim = op.dim();
        for (key, p) in &self.entries {
            let v = p.eval(&vars) * den_inv.clone();
            if v.is_zero() {
                continue;
            }
            for col in 0..dim {
                let mut locals = decode(col, rank, n);
                if key.iter().any(|&(s, _, b)| locals[s] != b) {
                    continue;
                }
                for &(s, a, _) in key {
                    locals[s] = a;
                }
                op.add_at(encode(&locals, rank), col, v.clone());
            }
        }
        Ok((op, theta))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::tensor::Permutation;

    #[test]
    fn entry_character_matches_known_forms() {
        // chi_(1,1)(X) = det X for 2x2
        let chi = entry_character(2, &Partition::column(2));
        let det = MPoly::var(0) * MPoly::var(3) - MPoly::var(1) * MPoly::var(2);
        assert_eq!(chi, det);
    }

    #[test]
    fn determinant_rule_d_det_h() {
        // d det h = det(h) h^{-1}: for 2x2 at diag(a, b) this is diag(b, a)
        let det = entry_character(2, &Partition::column(2));
        let f = BrutePoly::new(2, 1, det, &[], &[]).brute_derive(0).unwrap();
        let (op, _) = f.evaluate(&[q(2, 1), q(5, 3)]).unwrap();
        assert_eq!(op.get(0, 0), &q(5, 3));
        assert_eq!(op.get(1, 1), &q(2, 1));
        assert_eq!(op.nonzero_count(), 2);
    }

    #[test]
    fn co_derivative_rules() {
        // D_1 tr g = g_1 and D_2 g_1 = P_12 g_1
        let rank = 2;
        let tr = MPoly::var(0) + MPoly::var(3);
        let g = vec![q(3, 1), q(-1, 2)];
        let f = BrutePoly::group(rank, 2, tr);
        let d1 = f.co_derive(0).unwrap();
        let (op1, _) = d1.evaluate(&g).unwrap();
        let g1 = TensorOperator::elem(rank, 2, 0, 0, 0).unwrap().scale(&g[0])
            + TensorOperator::elem(rank, 2, 0, 1, 1).unwrap().scale(&g[1]);
        assert_eq!(op1, g1);
        let (op2, _) = d1.co_derive(1).unwrap().evaluate(&g).unwrap();
        let p12 = TensorOperator::perm_op(rank, &Permutation::transposition(2, 0, 1));
        assert_eq!(op2, &p12 * &g1);
    }

    #[test]
    fn co_derivatives_do_not_commute() {
        let rank = 2;
        let chi = entry_character(rank, &Partition::row(2));
        let g = vec![q(3, 1), q(-1, 2)];
        let f = BrutePoly::group(rank, 2, chi);
        let (a, _) = f.co_chain(&[0, 1]).unwrap().evaluate(&g).unwrap();
        let (b, _) = f.co_chain(&[1, 0]).unwrap().evaluate(&g).unwrap();
        assert_ne!(a, b);
    }
}
