//! Properties of the master T-operator as a function of the times, and the
//! cross-check of the structured matrix derivative against the entrywise one.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::gaudin::{GaudinModel, TimeSpec};
use crate::kp_verifier::result::{CheckResult, Recorder};
use crate::matrix_derivative::brute::entry_character;
use crate::matrix_derivative::{BrutePoly, HFunction};
use crate::partitions::{schur_jt, Partition};
use crate::poly::{Jet, MPoly};
use crate::scalar::{Rational, Ring};
use crate::tensor::{OpPoly, TensorOperator};

fn finish(rec: Recorder, name: &str, r: Result<()>) -> CheckResult {
    match r {
        Ok(()) => rec.finish(),
        Err(e) => CheckResult::failed(name, e.to_string()),
    }
}

fn op_poly_sub<R: Ring>(a: &OpPoly<R>, b: &OpPoly<R>) -> Vec<TensorOperator<R>> {
    let deg = a.coeffs().len().max(b.coeffs().len());
    (0..deg).map(|k| a.coeff(k) - b.coeff(k)).collect()
}

/// `T(x, t)` agrees with `sum_{|lambda| <= D} T_lambda(x) s_lambda(t)` up to
/// weighted degree `D`, and `s_lambda(d~) T|_{t=0} = T_lambda`.
pub fn check_master_expansion(model: &GaudinModel, degree: usize) -> CheckResult {
    let mut rec = Recorder::new::<Rational>("master_expansion");
    rec.param("N", model.rank());
    rec.param("n", model.sites());
    rec.param("D", degree);
    let r = (|| -> Result<()> {
        let series = model.master_series(degree)?;
        let t: Vec<MPoly> = (0..degree.max(1)).map(MPoly::var).collect();
        let (rank, n) = (model.rank(), model.sites());
        let mut acc: Vec<TensorOperator<MPoly>> = Vec::new();
        for lam in Partition::all_up_to(degree) {
            let s = schur_jt(&lam, &t);
            let tl = model.t_operator(&lam)?;
            for (k, c) in tl.coeffs().iter().enumerate() {
                while acc.len() <= k {
                    acc.push(TensorOperator::zero(rank, n));
                }
                let term = c.map(|v| MPoly::constant(v.clone()) * s.clone());
                acc[k] = acc[k].clone() + term;
            }
        }
        let expansion = OpPoly::new(rank, n, acc);
        for (k, d) in op_poly_sub(&series, &expansion).iter().enumerate() {
            rec.operator(format!("x^{k}"), d, 0.0);
        }
        for lam in Partition::all_up_to(degree.min(3)) {
            let d = op_poly_sub(&model.schur_coefficient(&lam)?, &model.t_operator(&lam)?);
            let bad = d.iter().map(|o| o.nonzero_count()).sum::<usize>();
            rec.condition(format!("schur coefficient {lam}"), bad == 0);
        }
        Ok(())
    })();
    finish(rec, "master_expansion", r)
}

/// `T(x, +[z^{-1}])` at zero times is `sum_s z^{-s} T_(s)(x)`, and
/// `T(x, -[z^{-1}])` is `sum_a (-z^{-1})^a T_(1^a)(x)`.
pub fn check_master_generating(model: &GaudinModel, x: &Rational, order: usize) -> CheckResult {
    let mut rec = Recorder::new::<Rational>("master_generating");
    rec.param("N", model.rank());
    rec.param("n", model.sites());
    rec.param_q("x", x);
    rec.param("order", order);
    let r = (|| -> Result<()> {
        let u = Jet::<Rational>::var(order + 1);
        let xj = Jet::constant(x.clone());
        for sign in [1, -1] {
            let table = model.master_table(0, &[sign])?;
            let op = table.evaluate::<Jet<Rational>>(model, &[], std::slice::from_ref(&u))?.poly.eval(&xj);
            for s in 0..=order {
                let coeff = op.map(|j| j.coeff(s));
                let (lam, c) =
                    if sign > 0 { (Partition::row(s), 1) } else { (Partition::column(s), if s % 2 == 0 { 1 } else { -1 }) };
                let expect = model.t_operator_at(&lam, x)?.scale(&Rational::from_int(c));
                rec.operator(format!("sign {sign} u^{s}"), &(coeff - expect), 0.0);
            }
        }
        Ok(())
    })();
    finish(rec, "master_generating", r)
}

/// `d_x T = d_{t_1} T - tr h T`, with `t_1` symbolic, the other times and a
/// Miwa shift numeric. On the polynomial part this reads `d_x P = d_{t_1} P`.
pub fn check_master_diff(model: &GaudinModel, times: &[Rational], miwa: &Rational) -> CheckResult {
    let mut rec = Recorder::new::<Rational>("master_diff");
    rec.param("N", model.rank());
    rec.param("n", model.sites());
    rec.param_qs("t", times);
    rec.param_q("zeta", miwa);
    let r = (|| -> Result<()> {
        let k = times.len().max(1);
        let mut t: Vec<MPoly> = times.iter().map(|v| MPoly::constant(v.clone())).collect();
        t.resize(k, MPoly::zero());
        t[0] = MPoly::var(0);
        let table = model.master_table(k, &[1])?;
        let p = table.evaluate::<MPoly>(model, &t, &[MPoly::constant(miwa.clone())])?.poly;
        let dx = p.derivative();
        let dt = p.map(|e| e.partial(0));
        for (i, d) in op_poly_sub(&dx, &dt).iter().enumerate() {
            rec.operator(format!("x^{i}"), d, 0.0);
        }
        Ok(())
    })();
    finish(rec, "master_diff", r)
}

/// `exp(x tr h) T(x, t)` depends on `x` and `t_1` only through `x + t_1`:
/// the polynomial part satisfies `P(x + s, t) = P(x, t + s e_1)`.
pub fn check_shift_covariance<R: Ring>(model: &GaudinModel, x: &Rational, s: &Rational, spec: &TimeSpec) -> CheckResult {
    let mut rec = Recorder::new::<R>("shift_covariance");
    rec.param("N", model.rank());
    rec.param("n", model.sites());
    rec.param_q("x", x);
    rec.param_q("s", s);
    rec.param_qs("t", &spec.times);
    let r = (|| -> Result<()> {
        let mut shifted = spec.clone();
        if shifted.times.is_empty() {
            shifted.times.push(Rational::zero());
        }
        shifted.times[0] += s;
        let mut base = spec.clone();
        base.times.resize(shifted.times.len(), Rational::zero());
        let a = master_poly::<R>(model, &base)?.eval(&R::from_rational(&(x + s)));
        let b = master_poly::<R>(model, &shifted)?.eval(&R::from_rational(x));
        let scale = a.max_magnitude().max(b.max_magnitude());
        rec.operator("P(x+s,t) - P(x,t+s)", &(a - b), scale);
        Ok(())
    })();
    finish(rec, "shift_covariance", r)
}

fn master_poly<R: Ring>(model: &GaudinModel, spec: &TimeSpec) -> Result<OpPoly<R>> {
    let weights: Vec<i32> = spec.shifts.iter().map(|s| s.sign).collect();
    let table = model.master_table(spec.times.len(), &weights)?;
    let zetas: Vec<R> = spec
        .shifts
        .iter()
        .map(|s| s.z.try_inv().map(|v| R::from_rational(&v)).ok_or_else(|| crate::Error::Pole("z = 0".into())))
        .collect::<Result<_>>()?;
    let times: Vec<R> = spec.times.iter().map(R::from_rational).collect();
    Ok(table.evaluate(model, &times, &zetas)?.poly)
}

/// `[T(x, t), T(x', t')] = 0` for times with explicit and Miwa parts.
pub fn check_master_commutativity<R: Ring>(model: &GaudinModel, pairs: &[(Rational, TimeSpec, Rational, TimeSpec)]) -> CheckResult {
    let mut rec = Recorder::new::<R>("master_commutativity");
    rec.param("N", model.rank());
    rec.param("n", model.sites());
    let r = (|| -> Result<()> {
        for (i, (x, t, y, s)) in pairs.iter().enumerate() {
            let a = master_poly::<R>(model, t)?.eval(&R::from_rational(x));
            let b = master_poly::<R>(model, s)?.eval(&R::from_rational(y));
            let scale = a.max_magnitude() * b.max_magnitude();
            rec.operator(format!("pair {i}"), &a.commutator(&b), scale);
        }
        Ok(())
    })();
    finish(rec, "master_commutativity", r)
}

/// Structured matrix derivatives of `chi_lambda(h) exp(sum t_k tr h^k)
/// det(1 - zeta h)^{-1}` against entrywise partial derivatives, for every
/// ordered chain of distinct slots.
pub fn check_derivative_oracle(
    rank: usize,
    sites: usize,
    twist: &[Rational],
    lambdas: &[Partition],
    times: &[Rational],
    zeta: &Rational,
) -> CheckResult {
    let mut rec = Recorder::new::<Rational>("derivative_oracle");
    rec.param("N", rank);
    rec.param("n", sites);
    rec.param_qs("twist", twist);
    rec.param_qs("t", times);
    rec.param_q("zeta", zeta);
    let r = (|| -> Result<()> {
        let chains = ordered_chains(sites);
        for lam in lambdas {
            let h = HFunction::character(rank, sites, lam).with_tag(times.len(), &[1])?;
            let b = BrutePoly::new(rank, sites, entry_character(rank, lam), times, &[(zeta.clone(), 1)]);
            // chains come in order of length, so every prefix is derived first
            let mut derived: BTreeMap<Vec<usize>, (HFunction, BrutePoly)> = BTreeMap::new();
            derived.insert(Vec::new(), (h, b));
            for chain in &chains {
                if let Some((&last, prefix)) = chain.split_last() {
                    let (hp, bp) = &derived[prefix];
                    let next = (hp.mat_derive(last)?, bp.brute_derive(last)?);
                    derived.insert(chain.clone(), next);
                }
                let (hc, bc) = &derived[chain];
                let e = hc.evaluate(twist, times, std::slice::from_ref(zeta))?;
                let (op, theta) = bc.evaluate(twist)?;
                rec.operator(format!("{lam} d{chain:?}"), &(e.op - op), 0.0);
                rec.scalar(format!("{lam} d{chain:?} theta"), &(e.log_scale - theta), 0.0);
            }
        }
        Ok(())
    })();
    finish(rec, "derivative_oracle", r)
}

/// Every ordered sequence of distinct slots, including the empty one.
fn ordered_chains(sites: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..sites {
        let mut next = Vec::new();
        for c in &frontier {
            for s in 0..sites {
                if !c.contains(&s) {
                    let mut d: Vec<usize> = c.clone();
                    d.push(s);
                    next.push(d);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}
