//! Checks of the classical side and of its correspondence with the
//! quantum model, reported in the same format as the identity suite.

use num_complex::Complex64;

use crate::calogero::ba::{
    ba10_quantum, ba10_residue, ba10_tau, ba_cc1, ba_determinant, ba_leading, ba_quantum, c0, expectation,
    pole_expansion_residuals, residue_velocity, root_velocity, tau_det,
};
use crate::calogero::dynamics::zero_dynamics;
use crate::calogero::flow::{hamiltonian_field, DRIFT_TOLERANCE};
use crate::calogero::{char_poly, lax_sandwich, lax_traces, CMPhase};
use crate::error::Result;
use crate::gaudin::GaudinModel;
use crate::kp_verifier::{CheckResult, Recorder};
use crate::linalg::Matrix;
use crate::poly::UPoly;
use crate::scalar::{Rational, Ring, ToComplex};
use crate::spectrum::Eigenstate;
use crate::tensor::SectorLabel;

fn finish(rec: Recorder, name: &str, r: Result<()>) -> CheckResult {
    match r {
        Ok(()) => rec.finish(),
        Err(e) => CheckResult::failed(name, e.to_string()),
    }
}

fn rel<R: Ring>(rec: &mut Recorder, label: String, a: &R, b: &R) {
    let scale = a.magnitude().max(b.magnitude());
    rec.scalar(label, &(a.clone() - b.clone()), scale);
}

/// Matching sum against `det(z - Y)`, the commutation relation, the
/// sandwich traces for `k <= kmax`, the trace form of Cayley-Hamilton,
/// Newton's identities, and the derivatives of `Y` with respect to the
/// phase-space coordinates.
pub fn check_cm_structure<R: Ring>(phase: &CMPhase<R>, kmax: usize) -> CheckResult {
    let mut rec = Recorder::new::<R>("cm_structure");
    rec.param("n", phase.len());
    let r = (|| -> Result<()> {
        let n = phase.len();
        let lax = phase.lax()?;
        let j = char_poly(phase)?;
        let cp = lax.y.charpoly();
        let scale = cp.iter().map(|c| c.magnitude()).fold(0.0, f64::max);
        for (k, (a, b)) in j.iter().zip(&cp).enumerate() {
            rec.scalar(format!("J_{k}"), &(a.clone() - b.clone()), scale);
        }
        let ones = Matrix::from_fn(n, n, |_, _| R::one());
        rec.matrix("[X,Y] - 1 + 11^t", &(lax.x.commutator(&lax.y) - Matrix::identity(n) + ones), 1.0);
        let tr = lax_traces(&lax.y, kmax.max(n));
        let sw = lax_sandwich(&lax.y, kmax.max(n));
        for k in 0..=kmax {
            rel(&mut rec, format!("1^t Y^{k} 1"), &sw[k], &tr[k]);
        }
        // sum_k J_{n-k} tr Y^k = 0
        let ch = (0..=n).fold(R::zero(), |a, k| a + j[n - k].clone() * tr[k].clone());
        let chs = (0..=n).map(|k| (j[n - k].clone() * tr[k].clone()).magnitude()).fold(0.0, f64::max);
        rec.scalar("sum J_{n-k} tr Y^k", &ch, chs);
        // k J_k + sum_{i=1}^k J_{k-i} tr Y^i = 0
        for k in 1..=n {
            let s = (1..=k).fold(R::from_int(k as i64) * j[k].clone(), |a, i| a + j[k - i].clone() * tr[i].clone());
            rec.scalar(format!("Newton {k}"), &s, scale);
        }
        for i in 0..n {
            let e = Matrix::from_fn(n, n, |a, b| if a == i && b == i { R::one() } else { R::zero() });
            let half = R::from_rational(&crate::scalar::q(1, 2));
            let et = (&e * &lax.t - &lax.t * &e).scale(&half);
            rec.matrix(format!("dY/dx_{i}"), &(phase.dy_dx(i)? - et), 1.0);
            // dY/dp_i = -E_ii: Y depends on p only on the diagonal
            let mut bumped = phase.clone();
            bumped.p[i] = bumped.p[i].clone() + R::one();
            rec.matrix(format!("dY/dp_{i}"), &(bumped.lax()?.y - lax.y.clone() + e), 1.0);
        }
        // second flow: dp_i = -[T, Y]_ii
        let (_, pdot) = hamiltonian_field(phase, 2)?;
        let ty = lax.t.commutator(&lax.y);
        for i in 0..n {
            rel(&mut rec, format!("dp_{i}/dt_2"), &pdot[i], &-ty.get(i, i).clone());
        }
        Ok(())
    })();
    finish(rec, "cm_structure", r)
}

/// `det(z - Y0) = prod_a (z - k_a)^{m_a}`.
pub fn check_lax_spectrum<R: Ring>(y0: &Matrix<R>, twist: &[Rational], sector: &SectorLabel) -> CheckResult {
    let mut rec = Recorder::new::<R>("lax_spectrum");
    rec.param_qs("twist", twist);
    rec.param("sector", format!("{:?}", sector.counts()));
    let mut target = UPoly::constant(R::one());
    for (k, &m) in twist.iter().zip(sector.counts()) {
        for _ in 0..m {
            target = target * UPoly::linear(R::from_rational(k));
        }
    }
    let cp = y0.charpoly();
    let n = cp.len() - 1;
    let scale = target.coeffs().iter().map(|c| c.magnitude()).fold(0.0, f64::max);
    for (k, c) in cp.iter().enumerate() {
        rec.scalar(format!("z^{}", n - k), &(c.clone() - target.coeff(n - k)), scale);
    }
    rec.finish()
}

/// `tau_det` against the master T-operator eigenvalue on the state at
/// rational times and spectral points.
pub fn check_tau_master<R: Ring>(
    model: &GaudinModel,
    state: &Eigenstate<R>,
    samples: &[(Rational, Vec<Rational>)],
) -> CheckResult {
    let mut rec = Recorder::new::<R>("tau_master");
    rec.param("sector", format!("{:?}", state.sector.counts()));
    let r = (|| -> Result<()> {
        let (x0, y0) = state_pair(model, state)?;
        let twist: Vec<R> = model.twist().iter().map(R::from_rational).collect();
        for (s, (x, times)) in samples.iter().enumerate() {
            let xr = R::from_rational(x);
            let tr: Vec<R> = times.iter().map(R::from_rational).collect();
            let tau = tau_det(&xr, &tr, &x0, &y0, &twist);
            let table = model.master_table(times.len(), &[])?;
            let mt = table.evaluate::<R>(model, &tr, &[])?;
            let lambda = expectation(&mt.poly.eval(&xr), &state.vector)?;
            rec.param_qs(&format!("t{s}"), times);
            rec.param_q(&format!("x{s}"), x);
            rel(&mut rec, format!("sample {s} det"), &tau.det, &lambda);
            rel(&mut rec, format!("sample {s} exponent"), &tau.log_scale, &mt.log_scale);
        }
        Ok(())
    })();
    finish(rec, "tau_master", r)
}

fn state_pair<R: Ring>(model: &GaudinModel, state: &Eigenstate<R>) -> Result<(Vec<R>, Matrix<R>)> {
    let x: Vec<R> = model.positions().iter().map(R::from_rational).collect();
    let y = CMPhase::from_hamiltonians(x.clone(), &state.h)?.lax()?.y;
    Ok((x, y))
}

/// Baker-Akhiezer functions of the state: determinant forms against
/// resolvent forms and against the master T-operator at `-+[z^{-1}]`; the
/// pole expansion of the linear problems; the `x -> infinity` limits; the
/// residue relation and its coefficient form for `m <= mmax`.
pub fn check_ba<R: Ring>(
    model: &GaudinModel,
    state: &Eigenstate<R>,
    points: &[(Rational, Rational)],
    mmax: usize,
) -> CheckResult {
    let mut rec = Recorder::new::<R>("ba_functions");
    rec.param("sector", format!("{:?}", state.sector.counts()));
    rec.param("points", points.len());
    let r = (|| -> Result<()> {
        let (x0, y0) = state_pair(model, state)?;
        let twist: Vec<R> = model.twist().iter().map(R::from_rational).collect();
        let phase = CMPhase::from_hamiltonians(x0.clone(), &state.h)?;
        for (s, (x, z)) in points.iter().enumerate() {
            let (xr, zr) = (R::from_rational(x), R::from_rational(z));
            let det = ba_determinant(&xr, &zr, &x0, &y0, &twist)?;
            let cc = ba_cc1(&xr, &zr, &x0, &y0, &twist)?.values;
            let qu = ba_quantum::<R>(model, x, z, &state.vector)?;
            rel(&mut rec, format!("point {s} psi det/resolvent"), &det.psi, &cc.psi);
            rel(&mut rec, format!("point {s} psi* det/resolvent"), &det.psi_star, &cc.psi_star);
            rel(&mut rec, format!("point {s} psi det/master"), &det.psi, &qu.psi);
            rel(&mut rec, format!("point {s} psi* det/master"), &det.psi_star, &qu.psi_star);
            let res = pole_expansion_residuals(&phase, &xr, &zr, &twist)?;
            let scale = det.psi.magnitude().max(det.psi_star.magnitude());
            for (label, v) in ["psi", "psi*", "dc - Tc", "dc* + Tc*"].iter().zip(res) {
                rec.scalar(format!("point {s} pole expansion {label}"), &v, scale);
            }
            // limits of psi exp(-xz) and psi* exp(xz) as x -> infinity
            let (minus, plus) = ba_leading(model, z)?;
            let c = c0(z, model.twist())?;
            let id = crate::tensor::TensorOperator::<Rational>::identity(model.rank(), model.sites());
            let exact_minus = minus - id.scale(&c);
            let exact_plus = plus - id.scale(&c.recip());
            rec.condition(format!("point {s} limit psi"), exact_minus.is_zero());
            rec.condition(format!("point {s} limit psi*"), exact_plus.is_zero());
            for m in 1..=mmax {
                let a = ba10_residue(&xr, &x0, &y0, m)?;
                let b = ba10_tau(&xr, &x0, &y0, m)?;
                let q = ba10_quantum(model, &xr, &state.vector, m)?;
                rel(&mut rec, format!("point {s} m={m} residue/tau"), &a, &b);
                rel(&mut rec, format!("point {s} m={m} residue/master"), &a, &q);
            }
        }
        for m in 1..=mmax {
            let res = residue_velocity(&y0, m);
            let roots = root_velocity(&x0, &y0, m)?;
            let (dx, _) = hamiltonian_field(&phase, m)?;
            for i in 0..x0.len() {
                rel(&mut rec, format!("m={m} x_{i} residue/zeros"), &res[i], &roots[i]);
                rel(&mut rec, format!("m={m} x_{i} residue/flow"), &res[i], &dx[i]);
            }
        }
        Ok(())
    })();
    finish(rec, "ba_functions", r)
}

pub const VELOCITY_TOLERANCE: f64 = 1e-8;
pub const TRAJECTORY_TOLERANCE: f64 = 1e-6;
pub const ACCELERATION_TOLERANCE: f64 = 1e-6;

/// Zero dynamics of one eigenstate over `t_2 in [0, t_end]`.
pub fn check_zero_dynamics(model: &GaudinModel, state: &Eigenstate<f64>, t_end: f64, steps: usize) -> CheckResult {
    let mut rec = Recorder::new::<f64>("zero_dynamics");
    rec.param("sector", format!("{:?}", state.sector.counts()));
    rec.param("t_end", t_end);
    rec.param("steps", steps);
    let r = (|| -> Result<()> {
        let z = zero_dynamics(model, state, t_end, steps)?;
        rec.measured("velocity + 2H", z.velocity_error, VELOCITY_TOLERANCE);
        rec.measured("acceleration", z.acceleration_error, ACCELERATION_TOLERANCE);
        rec.measured("master zeros vs flow", z.master_vs_flow, TRAJECTORY_TOLERANCE);
        rec.measured("tau zeros vs flow", z.tau_vs_flow, TRAJECTORY_TOLERANCE);
        rec.measured("integral drift", z.flow.drift, DRIFT_TOLERANCE);
        rec.condition("no collision", z.aborted.is_none());
        rec.condition("full window", z.master.times.len() == steps + 1);
        let at_zero = z.master.roots.first().map(|r| {
            r.iter().zip(model.positions()).map(|(a, b)| (a - b.to_c64()).norm()).fold(0.0, f64::max)
        });
        rec.measured("zeros at t=0", at_zero.unwrap_or(f64::INFINITY), VELOCITY_TOLERANCE);
        let isospectral = z
            .flow
            .phases
            .iter()
            .map(|p| lax_spread(p, &z.flow.phases[0]))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        rec.measured("Lax characteristic polynomial", isospectral, VELOCITY_TOLERANCE);
        Ok(())
    })();
    finish(rec, "zero_dynamics", r)
}

fn lax_spread(a: &CMPhase<Complex64>, b: &CMPhase<Complex64>) -> Result<f64> {
    let ca = a.lax()?.y.charpoly();
    let cb = b.lax()?.y.charpoly();
    Ok(ca.iter().zip(&cb).map(|(p, q)| (p - q).norm() / q.norm().max(1.0)).fold(0.0, f64::max))
}
