//! The twisted inhomogeneous gl(N) Gaudin model.
//!
//! - [`GaudinModel`]: twist `h = diag(k_a)`, marked points `x_i`
//! - [`GaudinModel::hamiltonian`]: `H_i = h^(i) + sum_{j != i} P_ij / (x_i - x_j)`
//! - [`GaudinModel::t_operator`]: `T_lambda(x) = (x - x_n + d_n) ... (x - x_1 + d_1) chi_lambda(h)`
//!   as a polynomial in `x` (polynomial normalization)
//! - [`GaudinModel::normalized_t_operator`]: the same divided by `prod (x - x_i)`
//! - [`GaudinModel::master_table`] / [`MasterTable::evaluate`]: the master
//!   T-operator `T(x, t)` with explicit times and Miwa shifts
//! - [`GaudinModel::schur_coefficient`]: `s_lambda(d~) T(x, t)|_{t=0}`
//! - [`spin`]: Talalaev's spin-chain transfer matrices in the group picture

pub mod spin;

use crate::error::{Error, Result};
use crate::matrix_derivative::{Evaluated, HFunction};
use crate::partitions::{schur_jt, Partition};
use crate::poly::{MPoly, UPoly};
use crate::scalar::{factorial, q, qi, Rational, Ring};
use crate::tensor::{OpPoly, Permutation, SectorLabel, TensorOperator};

pub type Op = TensorOperator<Rational>;

#[derive(Clone, Debug, PartialEq)]
pub struct GaudinModel {
    rank: usize,
    twist: Vec<Rational>,
    positions: Vec<Rational>,
}

/// Miwa shift `t -> t + sign [z^{-1}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MiwaShift {
    pub z: Rational,
    pub sign: i32,
}

impl MiwaShift {
    pub fn plus(z: Rational) -> Self {
        MiwaShift { z, sign: 1 }
    }

    pub fn minus(z: Rational) -> Self {
        MiwaShift { z, sign: -1 }
    }
}

/// Explicit times `t_1..t_K` together with Miwa shifts.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TimeSpec {
    pub times: Vec<Rational>,
    pub shifts: Vec<MiwaShift>,
}

impl TimeSpec {
    pub fn new(times: Vec<Rational>) -> Self {
        TimeSpec { times, shifts: Vec::new() }
    }

    pub fn shifted(&self, shift: MiwaShift) -> Self {
        let mut s = self.clone();
        s.shifts.push(shift);
        s
    }

    /// `t -> -t`, including the Miwa shifts.
    pub fn negated(&self) -> Self {
        TimeSpec {
            times: self.times.iter().map(|t| -t.clone()).collect(),
            shifts: self.shifts.iter().map(|s| MiwaShift { z: s.z.clone(), sign: -s.sign }).collect(),
        }
    }
}

/// `T(x, t) = exp(log_scale) * poly(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MasterT<R> {
    pub log_scale: R,
    pub poly: OpPoly<R>,
}

/// Precomputed `d_S exp(...)` for every subset `S`, for a fixed number of
/// times and fixed Miwa weights.
#[derive(Clone, Debug)]
pub struct MasterTable {
    table: Vec<HFunction>,
    times: usize,
    weights: Vec<i32>,
}

impl GaudinModel {
    pub fn new(rank: usize, twist: Vec<Rational>, positions: Vec<Rational>) -> Result<Self> {
        if rank == 0 {
            return Err(Error::ShapeMismatch("rank must be positive".into()));
        }
        if twist.len() != rank {
            return Err(Error::ShapeMismatch(format!("twist has {} entries, N = {rank}", twist.len())));
        }
        for i in 0..positions.len() {
            for j in 0..i {
                if positions[i] == positions[j] {
                    return Err(Error::CoincidentPositions(format!("x_{j} = x_{i} = {}", positions[i])));
                }
            }
        }
        Ok(GaudinModel { rank, twist, positions })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn sites(&self) -> usize {
        self.positions.len()
    }

    pub fn twist(&self) -> &[Rational] {
        &self.twist
    }

    pub fn positions(&self) -> &[Rational] {
        &self.positions
    }

    pub fn dim(&self) -> usize {
        self.rank.pow(self.sites() as u32)
    }

    /// The same twist on a different set of positions.
    pub fn with_positions(&self, positions: Vec<Rational>) -> Result<Self> {
        GaudinModel::new(self.rank, self.twist.clone(), positions)
    }

    pub fn sectors(&self) -> Vec<SectorLabel> {
        SectorLabel::all(self.rank, self.sites())
    }

    /// `h^(i) = sum_a k_a e_aa^(i)`.
    pub fn twist_at(&self, i: usize) -> Result<Op> {
        let mut acc = Op::zero(self.rank, self.sites());
        for (a, k) in self.twist.iter().enumerate() {
            acc = acc + Op::elem(self.rank, self.sites(), i, a, a)?.scale(k);
        }
        Ok(acc)
    }

    /// `H_i = h^(i) + sum_{j != i} P_ij / (x_i - x_j)`.
    pub fn hamiltonian(&self, i: usize) -> Result<Op> {
        let n = self.sites();
        if i >= n {
            return Err(Error::IndexOutOfRange(format!("site {i} of {n}")));
        }
        let mut acc = self.twist_at(i)?;
        for j in 0..n {
            if j == i {
                continue;
            }
            let c = (&self.positions[i] - &self.positions[j]).recip();
            acc = acc + Op::perm_op(self.rank, &Permutation::transposition(n, i, j)).scale(&c);
        }
        Ok(acc)
    }

    pub fn hamiltonians(&self) -> Result<Vec<Op>> {
        (0..self.sites()).map(|i| self.hamiltonian(i)).collect()
    }

    /// `H(x) = tr h^2 / 2 + sum_i H_i / (x - x_i)`.
    pub fn h_of_x(&self, x: &Rational) -> Result<Op> {
        let n = self.sites();
        let tr2: Rational = self.twist.iter().map(|k| k * k).sum();
        let mut acc = Op::scalar(self.rank, n, tr2 * q(1, 2));
        for i in 0..n {
            let c = self.pole_factor(x, i)?;
            acc = acc + self.hamiltonian(i)?.scale(&c);
        }
        Ok(acc)
    }

    fn pole_factor(&self, x: &Rational, i: usize) -> Result<Rational> {
        (x - &self.positions[i]).try_inv().ok_or_else(|| Error::Pole(format!("x = x_{i}")))
    }

    /// `prod_{i not in S} (x - x_i)` in the ring `R`.
    pub fn complement_poly<R: Ring>(&self, mask: usize) -> UPoly<R> {
        (0..self.sites())
            .filter(|i| mask & (1 << i) == 0)
            .fold(UPoly::constant(R::one()), |acc, i| acc * UPoly::linear(R::from_rational(&self.positions[i])))
    }

    /// `prod_i (x - x_i)`, which is also `T_empty(x)`.
    pub fn vacuum_poly<R: Ring>(&self) -> UPoly<R> {
        self.complement_poly(0)
    }

    fn twist_in<R: Ring>(&self) -> Vec<R> {
        self.twist.iter().map(R::from_rational).collect()
    }

    fn assemble<R: Ring>(&self, evaluated: Vec<Evaluated<R>>) -> MasterT<R> {
        let mut poly = OpPoly::zero(self.rank, self.sites());
        let log_scale = evaluated.first().map(|e| e.log_scale.clone()).unwrap_or_else(R::zero);
        for (mask, e) in evaluated.into_iter().enumerate() {
            poly.add_scaled(self.complement_poly::<R>(mask).coeffs(), &e.op);
        }
        MasterT { log_scale, poly }
    }

    /// `T_lambda(x)` in the polynomial normalization, over any ring.
    pub fn t_operator_in<R: Ring>(&self, lambda: &Partition) -> Result<OpPoly<R>> {
        let f = HFunction::character(self.rank, self.sites(), lambda);
        let twist = self.twist_in::<R>();
        let evaluated = f
            .derivative_table()?
            .iter()
            .map(|g| g.evaluate(&twist, &[], &[]))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.assemble(evaluated).poly)
    }

    /// `T_lambda(x)` in the polynomial normalization.
    pub fn t_operator(&self, lambda: &Partition) -> Result<OpPoly<Rational>> {
        self.t_operator_in(lambda)
    }

    pub fn t_operator_at(&self, lambda: &Partition, x: &Rational) -> Result<Op> {
        Ok(self.t_operator(lambda)?.eval(x))
    }

    /// `T_lambda(x) / prod (x - x_i)` at `x` in any ring where the
    /// denominator is invertible (for instance a jet `x0 + e`).
    pub fn normalized_t_operator<R: Ring>(&self, lambda: &Partition, x: &R) -> Result<TensorOperator<R>> {
        let t = self.t_operator_in::<R>(lambda)?;
        let den = self.vacuum_poly::<R>().eval(x);
        let inv = den.try_inv().ok_or_else(|| Error::Pole("x coincides with a marked point".into()))?;
        Ok(t.eval(x).scale(&inv))
    }

    /// Derivative tables for the master T-operator with `times` explicit
    /// times and Miwa shifts of the given signs.
    pub fn master_table(&self, times: usize, weights: &[i32]) -> Result<MasterTable> {
        let f = HFunction::exponential(self.rank, self.sites(), times, weights);
        Ok(MasterTable { table: f.derivative_table()?, times, weights: weights.to_vec() })
    }

    /// Exact `T(x, t)` for the given times and Miwa shifts.
    pub fn master_t(&self, spec: &TimeSpec) -> Result<MasterT<Rational>> {
        let weights: Vec<i32> = spec.shifts.iter().map(|s| s.sign).collect();
        let table = self.master_table(spec.times.len(), &weights)?;
        let zetas = spec
            .shifts
            .iter()
            .map(|s| s.z.try_inv().ok_or_else(|| Error::Pole("Miwa shift at z = 0".into())))
            .collect::<Result<Vec<_>>>()?;
        table.evaluate(self, &spec.times, &zetas)
    }

    /// `T_lambda(x) = s_lambda(d~) T(x, t)|_{t=0}` with symbolic times.
    pub fn schur_coefficient(&self, lambda: &Partition) -> Result<OpPoly<Rational>> {
        let k = lambda.weight();
        let series = self.master_series(k)?;
        let t: Vec<MPoly> = (0..k.max(1)).map(MPoly::var).collect();
        let s = schur_jt(lambda, &t);
        Ok(series.map(|entry| pair_with_derivatives(&s, entry)))
    }

    /// `T(x, t)` as a polynomial in the times, truncated at weighted degree
    /// `degree` (weight `k` for `t_k`).
    pub fn master_series(&self, degree: usize) -> Result<OpPoly<MPoly>> {
        let k = degree.max(1);
        let table = self.master_table(k, &[])?;
        let t: Vec<MPoly> = (0..k).map(MPoly::var).collect();
        let m = table.evaluate(self, &t, &[])?;
        let weight = |i: usize| i as u32 + 1;
        // exp(theta) truncated
        let mut exp = MPoly::constant(qi(1));
        let mut term = MPoly::constant(qi(1));
        for j in 1..=degree {
            term = (term * m.log_scale.clone()).truncate_weighted(degree as u32, weight);
            exp = exp + term.scale(&Rational::from_integer(factorial(j as u32)).recip());
        }
        let d = degree as u32;
        Ok(m.poly.map(|entry| (entry.clone() * exp.clone()).truncate_weighted(d, weight)))
    }
}

impl GaudinModel {
    /// `prod (x - x_i)` times the identity.
    pub fn vacuum_op_poly(&self) -> OpPoly<Rational> {
        let mut p = OpPoly::zero(self.rank, self.sites());
        p.add_scaled(self.vacuum_poly::<Rational>().coeffs(), &Op::identity(self.rank, self.sites()));
        p
    }
}

/// `s(d~) F |_{t=0}` for polynomials `s` and `F` in the times, with
/// `d~ = (d_1, d_2 / 2, d_3 / 3, ...)`.
pub fn pair_with_derivatives(s: &MPoly, f: &MPoly) -> Rational {
    let mut acc = qi(0);
    for (m, c) in s.terms() {
        let fc = f.coefficient(m);
        if Ring::is_zero(&fc) {
            continue;
        }
        let mut w = c * fc;
        for (idx, &e) in m.exps().iter().enumerate() {
            let k = (idx + 1) as i64;
            w = w * Rational::from_integer(factorial(e)) * Ring::pow(&qi(k), e).recip();
        }
        acc += w;
    }
    acc
}

impl MasterTable {
    pub fn times(&self) -> usize {
        self.times
    }

    pub fn weights(&self) -> &[i32] {
        &self.weights
    }

    /// Evaluates with `times[k-1] = t_k` and `zetas[l] = 1/z_l`; a zero
    /// `zeta` switches the corresponding shift off.
    pub fn evaluate<R: Ring>(&self, model: &GaudinModel, times: &[R], zetas: &[R]) -> Result<MasterT<R>> {
        let twist = model.twist_in::<R>();
        let evaluated =
            self.table.iter().map(|g| g.evaluate(&twist, times, zetas)).collect::<Result<Vec<_>>>()?;
        Ok(model.assemble(evaluated))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> GaudinModel {
        GaudinModel::new(2, vec![qi(2), qi(-1)], vec![qi(0), qi(1), q(5, 2)]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(GaudinModel::new(2, vec![qi(1)], vec![qi(0)]).is_err());
        assert!(matches!(
            GaudinModel::new(2, vec![qi(1), qi(2)], vec![qi(0), qi(0)]),
            Err(Error::CoincidentPositions(_))
        ));
    }

    #[test]
    fn hamiltonians_commute_and_sum_to_weighted_twist() {
        let m = model();
        let hs = m.hamiltonians().unwrap();
        for a in &hs {
            for b in &hs {
                assert!(a.commutator(b).is_zero());
            }
        }
        let total = hs.iter().cloned().fold(Op::zero(2, 3), |acc, h| acc + h);
        let mut weighted = Op::zero(2, 3);
        for (a, k) in m.twist().iter().enumerate() {
            weighted = weighted + Op::weight_op(2, 3, a).unwrap().scale(k);
        }
        assert_eq!(total, weighted);
    }

    #[test]
    fn empty_diagram_gives_vacuum_polynomial() {
        let m = model();
        let t = m.t_operator(&Partition::empty()).unwrap();
        let x = q(7, 3);
        let expect = m.vacuum_poly::<Rational>().eval(&x);
        assert_eq!(t.eval(&x), Op::scalar(2, 3, expect));
    }

    #[test]
    fn master_t_at_zero_times_is_vacuum() {
        let m = model();
        let mt = m.master_t(&TimeSpec::default()).unwrap();
        assert_eq!(mt.poly, m.vacuum_op_poly());
    }

    #[test]
    fn pairing_recovers_coefficients() {
        // s = t1^2, F = t1^2 -> 2
        let t1 = MPoly::var(0);
        assert_eq!(pair_with_derivatives(&(t1.clone() * t1.clone()), &(t1.clone() * t1)), qi(2));
        // s = t2, F = t2 -> 1/2
        assert_eq!(pair_with_derivatives(&MPoly::var(1), &MPoly::var(1)), q(1, 2));
    }
}
