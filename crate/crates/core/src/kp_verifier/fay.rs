//! Bilinear identities for the master T-operator with Miwa-shifted times.
//!
//! A shift `t + [z^{-1}]` multiplies the exponential by `det(1 - h/z)^{-1}`,
//! so every shifted operator is evaluated exactly with `zeta = 1/z`. All
//! operators in one identity share `x` and the explicit times; the common
//! factor `exp(sum t_k tr h^k)` is dropped.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gaudin::{GaudinModel, MasterTable};
use crate::kp_verifier::identities::operator_det;
use crate::kp_verifier::result::{CheckResult, Recorder};
use crate::scalar::{binomial, Rational, Ring};
use crate::tensor::{OpPoly, TensorOperator};

/// `T(x, t + sign sum_{i in S} [z_i^{-1}])` for subsets `S` of a fixed point list.
pub struct ShiftedFamily<'a, R> {
    model: &'a GaudinModel,
    table: MasterTable,
    times: Vec<R>,
    zetas: Vec<R>,
    cache: BTreeMap<Vec<usize>, OpPoly<R>>,
}

impl<'a, R: Ring> ShiftedFamily<'a, R> {
    /// `slots` is the largest number of simultaneous shifts that will be requested.
    pub fn new(model: &'a GaudinModel, times: &[Rational], zs: &[Rational], sign: i32, slots: usize) -> Result<Self> {
        let zetas = zs
            .iter()
            .map(|z| z.try_inv().map(|v| R::from_rational(&v)).ok_or_else(|| Error::Pole("Miwa point at z = 0".into())))
            .collect::<Result<Vec<R>>>()?;
        let table = model.master_table(times.len(), &vec![sign; slots])?;
        Ok(ShiftedFamily {
            model,
            table,
            times: times.iter().map(R::from_rational).collect(),
            zetas,
            cache: BTreeMap::new(),
        })
    }

    pub fn poly(&mut self, set: &[usize]) -> Result<OpPoly<R>> {
        let mut key = set.to_vec();
        key.sort();
        if let Some(p) = self.cache.get(&key) {
            return Ok(p.clone());
        }
        let slots = self.table.weights().len();
        if key.len() > slots {
            return Err(Error::TooLarge(key.len()));
        }
        let mut z: Vec<R> = key.iter().map(|&i| self.zetas[i].clone()).collect();
        z.resize(slots, R::zero());
        let p = self.table.evaluate(self.model, &self.times, &z)?.poly;
        self.cache.insert(key, p.clone());
        Ok(p)
    }

    pub fn at(&mut self, set: &[usize], x: &R) -> Result<TensorOperator<R>> {
        Ok(self.poly(set)?.eval(x))
    }

    /// `d^k/dx^k` at `x`.
    pub fn dx_at(&mut self, set: &[usize], x: &R, k: usize) -> Result<TensorOperator<R>> {
        let mut p = self.poly(set)?;
        for _ in 0..k {
            p = p.derivative();
        }
        Ok(p.eval(x))
    }
}

fn distinct(zs: &[Rational]) -> Result<()> {
    for i in 0..zs.len() {
        for j in 0..i {
            if zs[i] == zs[j] {
                return Err(Error::CoincidentPositions(format!("spectral points z_{j} = z_{i}")));
            }
        }
    }
    Ok(())
}

fn mag<R: Ring>(ops: &[&TensorOperator<R>]) -> f64 {
    ops.iter().map(|o| o.max_magnitude()).fold(0.0, f64::max)
}

fn lift<R: Ring>(x: &Rational) -> R {
    R::from_rational(x)
}

fn params(rec: &mut Recorder, model: &GaudinModel, x: &Rational, times: &[Rational], zs: &[Rational]) {
    rec.param("N", model.rank());
    rec.param("n", model.sites());
    rec.param_q("x", x);
    rec.param_qs("t", times);
    rec.param_qs("z", zs);
}

/// Four-point Fay identity on points `a, b, c, d` over the background `bg`.
fn fay4<R: Ring>(fam: &mut ShiftedFamily<R>, x: &R, zs: &[R], bg: &[usize], q: [usize; 4]) -> Result<(TensorOperator<R>, f64)> {
    let [a, b, c, d] = q;
    let with = |extra: [usize; 2]| -> Vec<usize> { bg.iter().copied().chain(extra).collect() };
    let z = |i: usize| zs[i].clone();
    let t1 = &fam.at(&with([a, b]), x)? * &fam.at(&with([c, d]), x)?;
    let t2 = &fam.at(&with([a, c]), x)? * &fam.at(&with([b, d]), x)?;
    let t3 = &fam.at(&with([a, d]), x)? * &fam.at(&with([b, c]), x)?;
    let scale = mag(&[&t1, &t2, &t3]);
    let r = t1.scale(&((z(a) - z(b)) * (z(c) - z(d)))) - t2.scale(&((z(a) - z(c)) * (z(b) - z(d))))
        + t3.scale(&((z(a) - z(d)) * (z(b) - z(c))));
    Ok((r, scale))
}

/// Three-point Fay identity on points `a, b, c` over the background `bg`.
fn fay3<R: Ring>(fam: &mut ShiftedFamily<R>, x: &R, zs: &[R], bg: &[usize], q: [usize; 3]) -> Result<(TensorOperator<R>, f64)> {
    let [a, b, c] = q;
    let with = |extra: &[usize]| -> Vec<usize> { bg.iter().chain(extra).copied().collect() };
    let z = |i: usize| zs[i].clone();
    let t1 = &fam.at(&with(&[a]), x)? * &fam.at(&with(&[b, c]), x)?;
    let t2 = &fam.at(&with(&[b]), x)? * &fam.at(&with(&[a, c]), x)?;
    let t3 = &fam.at(&with(&[c]), x)? * &fam.at(&with(&[a, b]), x)?;
    let scale = mag(&[&t1, &t2, &t3]);
    let r = t1.scale(&(z(b) - z(c))) + t2.scale(&(z(c) - z(a))) + t3.scale(&(z(a) - z(b)));
    Ok((r, scale))
}

/// Differential Fay identity on points `a, b` over the background `bg`, in
/// the form `T_b dT_a - T_a dT_b + (z_a - z_b)(T T_ab - T_a T_b) = 0`.
fn fay_diff<R: Ring>(fam: &mut ShiftedFamily<R>, x: &R, zs: &[R], bg: &[usize], q: [usize; 2]) -> Result<(TensorOperator<R>, f64)> {
    let [a, b] = q;
    let with = |extra: &[usize]| -> Vec<usize> { bg.iter().chain(extra).copied().collect() };
    let ta = fam.at(&with(&[a]), x)?;
    let tb = fam.at(&with(&[b]), x)?;
    let dta = fam.dx_at(&with(&[a]), x, 1)?;
    let dtb = fam.dx_at(&with(&[b]), x, 1)?;
    let t0 = fam.at(&with(&[]), x)?;
    let tab = fam.at(&with(&[a, b]), x)?;
    let p1 = &tb * &dta;
    let p2 = &ta * &dtb;
    let p3 = &t0 * &tab;
    let p4 = &ta * &tb;
    let scale = mag(&[&p1, &p2, &p3, &p4]);
    let r = p1 - p2 + (p3 - p4).scale(&(zs[a].clone() - zs[b].clone()));
    Ok((r, scale))
}

/// The four-, three- and differential-Fay identities for shifts at
/// `z_0..z_3` (three-point form on `z_1..z_3`, differential form on `z_1, z_2`).
pub fn check_fay<R: Ring>(model: &GaudinModel, x: &Rational, times: &[Rational], zs: &[Rational; 4]) -> CheckResult {
    let mut rec = Recorder::new::<R>("fay");
    params(&mut rec, model, x, times, zs);
    let run = |rec: &mut Recorder| -> Result<()> {
        distinct(zs)?;
        let mut fam = ShiftedFamily::<R>::new(model, times, zs, 1, 2)?;
        let xr = lift::<R>(x);
        let zr: Vec<R> = zs.iter().map(lift::<R>).collect();
        let (r, s) = fay4(&mut fam, &xr, &zr, &[], [0, 1, 2, 3])?;
        rec.operator("four-term", &r, s);
        let (r, s) = fay3(&mut fam, &xr, &zr, &[], [1, 2, 3])?;
        rec.operator("three-term", &r, s);
        let (r, s) = fay_diff(&mut fam, &xr, &zr, &[], [1, 2])?;
        rec.operator("differential", &r, s);
        Ok(())
    };
    match run(&mut rec) {
        Ok(()) => rec.finish(),
        Err(e) => CheckResult::failed("fay", e.to_string()),
    }
}

/// The Fay identities with a background shift set: the points are
/// `background ++ zs`, and the identities act on the last four, three and
/// two of them.
pub fn check_fay_general<R: Ring>(
    model: &GaudinModel,
    x: &Rational,
    times: &[Rational],
    background: &[Rational],
    zs: &[Rational; 4],
) -> CheckResult {
    let mut rec = Recorder::new::<R>("fay_general");
    let all: Vec<Rational> = background.iter().chain(zs.iter()).cloned().collect();
    params(&mut rec, model, x, times, zs);
    rec.param_qs("background", background);
    let run = |rec: &mut Recorder| -> Result<()> {
        distinct(&all)?;
        let b = background.len();
        let bg: Vec<usize> = (0..b).collect();
        let mut fam = ShiftedFamily::<R>::new(model, times, &all, 1, b + 2)?;
        let xr = lift::<R>(x);
        let zr: Vec<R> = all.iter().map(lift::<R>).collect();
        let (r, s) = fay4(&mut fam, &xr, &zr, &bg, [b, b + 1, b + 2, b + 3])?;
        rec.operator("four-term", &r, s);
        let (r, s) = fay3(&mut fam, &xr, &zr, &bg, [b + 1, b + 2, b + 3])?;
        rec.operator("three-term", &r, s);
        // written as in the generalized differential form
        let (a, c) = (b + 2, b + 3);
        let with = |extra: &[usize]| -> Vec<usize> { bg.iter().chain(extra).copied().collect() };
        let inv = |i: usize| zr[i].try_inv().ok_or_else(|| Error::Pole("z = 0".into()));
        let (ia, ic) = (inv(a)?, inv(c)?);
        let t0 = fam.at(&with(&[]), &xr)?;
        let tac = fam.at(&with(&[a, c]), &xr)?;
        let ta = fam.at(&with(&[a]), &xr)?;
        let tc = fam.at(&with(&[c]), &xr)?;
        let dta = fam.dx_at(&with(&[a]), &xr, 1)?;
        let dtc = fam.dx_at(&with(&[c]), &xr, 1)?;
        let lhs = (&t0 * &tac).scale(&(ia.clone() - ic.clone()));
        let rhs = (&ta * &(tc.clone() - dtc.scale(&ic))).scale(&ia) - (&tc * &(ta.clone() - dta.scale(&ia))).scale(&ic);
        let scale = mag(&[&lhs, &rhs]);
        rec.operator("differential", &(lhs - rhs), scale);
        Ok(())
    };
    match run(&mut rec) {
        Ok(()) => rec.finish(),
        Err(e) => CheckResult::failed("fay_general", e.to_string()),
    }
}

/// The three-term and differential Fay identities for `tau'(t) = T(x, -t)`.
///
/// `tau'(t + [z^{-1}]) = T(x, -t - [z^{-1}])` is a shift of sign `-1` at
/// negated times. The differential identity is taken in its `t_1` form with
/// `d/dt_1 tau'(t) = -(d_x T + tr h T)(x, -t)`; the `tr h` terms cancel
/// between the two antisymmetric products.
pub fn check_sign_flip<R: Ring>(model: &GaudinModel, x: &Rational, times: &[Rational], zs: &[Rational; 3]) -> CheckResult {
    let mut rec = Recorder::new::<R>("sign_flip");
    params(&mut rec, model, x, times, zs);
    let run = |rec: &mut Recorder| -> Result<()> {
        distinct(zs)?;
        let neg: Vec<Rational> = times.iter().map(|t| -t.clone()).collect();
        let mut fam = ShiftedFamily::<R>::new(model, &neg, zs, -1, 2)?;
        let xr = lift::<R>(x);
        let zr: Vec<R> = zs.iter().map(lift::<R>).collect();
        let (r, s) = fay3(&mut fam, &xr, &zr, &[], [0, 1, 2])?;
        rec.operator("three-term", &r, s);
        let tr: R = model.twist().iter().fold(R::zero(), |acc, k| acc + lift::<R>(k));
        let dt1 = |fam: &mut ShiftedFamily<R>, set: &[usize]| -> Result<TensorOperator<R>> {
            Ok(-(fam.dx_at(set, &xr, 1)? + fam.at(set, &xr)?.scale(&tr)))
        };
        let ta = fam.at(&[0], &xr)?;
        let tb = fam.at(&[1], &xr)?;
        let dta = dt1(&mut fam, &[0])?;
        let dtb = dt1(&mut fam, &[1])?;
        let t0 = fam.at(&[], &xr)?;
        let tab = fam.at(&[0, 1], &xr)?;
        let p1 = &tb * &dta;
        let p2 = &ta * &dtb;
        let p3 = &t0 * &tab;
        let p4 = &ta * &tb;
        let scale = mag(&[&p1, &p2, &p3, &p4]);
        let r = p1 - p2 + (p3 - p4).scale(&(zr[0].clone() - zr[1].clone()));
        rec.operator("differential (t_1 form)", &r, scale);
        Ok(())
    };
    match run(&mut rec) {
        Ok(()) => rec.finish(),
        Err(e) => CheckResult::failed("sign_flip", e.to_string()),
    }
}

/// `T^{z_1..z_m} det(z_k^{j-m}) T^{m-1} = det(sum_l (-1)^l C(j-1,l) z_k^{j-m-l} d_x^l T^{z_k})`.
pub fn check_masterdet<R: Ring>(model: &GaudinModel, x: &Rational, times: &[Rational], zs: &[Rational]) -> CheckResult {
    let mut rec = Recorder::new::<R>("masterdet");
    params(&mut rec, model, x, times, zs);
    let run = |rec: &mut Recorder| -> Result<()> {
        distinct(zs)?;
        let m = zs.len();
        let (rank, n) = (model.rank(), model.sites());
        let mut fam = ShiftedFamily::<R>::new(model, times, zs, 1, m)?;
        let xr = lift::<R>(x);
        let zr: Vec<R> = zs.iter().map(lift::<R>).collect();
        let zpow = |k: usize, e: i64| -> Result<R> {
            if e >= 0 {
                Ok(zr[k].pow(e as u32))
            } else {
                zr[k].try_inv().map(|v| v.pow((-e) as u32)).ok_or_else(|| Error::Pole("z = 0".into()))
            }
        };
        let mut vander = Vec::with_capacity(m);
        let mut rows = Vec::with_capacity(m);
        for k in 0..m {
            let mut vrow = Vec::with_capacity(m);
            let mut row = Vec::with_capacity(m);
            for j in 1..=m {
                vrow.push(TensorOperator::scalar(1, 0, zpow(k, j as i64 - m as i64)?));
                let mut entry = TensorOperator::zero(rank, n);
                for l in 0..j {
                    let c = binomial(j as i64 - 1, l as i64) * Rational::from_int(if l % 2 == 0 { 1 } else { -1 });
                    let w = zpow(k, j as i64 - m as i64 - l as i64)? * R::from_rational(&c);
                    entry = entry + fam.dx_at(&[k], &xr, l)?.scale(&w);
                }
                row.push(entry);
            }
            vander.push(vrow);
            rows.push(row);
        }
        let v = operator_det(&vander, 1, 0).get(0, 0).clone();
        if v.is_zero() {
            return Err(Error::Runtime("singular Vandermonde determinant".into()));
        }
        let all: Vec<usize> = (0..m).collect();
        let t0 = fam.at(&[], &xr)?;
        let mut lhs = fam.at(&all, &xr)?.scale(&v);
        for _ in 1..m {
            lhs = &lhs * &t0;
        }
        let rhs = operator_det(&rows, rank, n);
        let scale = mag(&[&lhs, &rhs]);
        rec.operator(format!("m={m}"), &(lhs - rhs), scale);
        Ok(())
    };
    match run(&mut rec) {
        Ok(()) => rec.finish(),
        Err(e) => CheckResult::failed("masterdet", e.to_string()),
    }
}
