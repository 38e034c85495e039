//! The determinant tau-function and the stationary Baker-Akhiezer functions
//! built from a pair `(X0, Y0)`, together with their quantum counterparts
//! read off the master T-operator on an eigenvector.
//!
//! Throughout, `psi` and `psi_star` are reported without the exponential
//! factors `exp(+-xz)`.

use crate::calogero::flow::hamiltonian_field;
use crate::calogero::CMPhase;
use crate::error::{Error, Result};
use crate::gaudin::GaudinModel;
use crate::linalg::Matrix;
use crate::poly::{Jet, MPoly, UPoly};
use crate::scalar::{Rational, Ring};
use crate::tensor::{OpPoly, TensorOperator};

/// `exp(log_scale) * det`.
#[derive(Clone, Debug, PartialEq)]
pub struct TauValue<R> {
    pub log_scale: R,
    pub det: R,
}

fn pole<R: Ring>(v: R, what: &str) -> Result<R> {
    v.try_inv().ok_or_else(|| Error::Pole(what.into()))
}

fn power_sums<R: Ring>(twist: &[R], k: usize) -> R {
    twist.iter().fold(R::zero(), |a, v| a + v.pow(k as u32))
}

/// `X0 - sum_k k t_k Y0^{k-1}`, so that the tau-function is `det(x - A)`.
fn shifted_positions<R: Ring>(times: &[R], x0: &[R], y0: &Matrix<R>) -> Matrix<R> {
    let n = x0.len();
    let mut a = Matrix::diagonal(x0);
    let mut power = Matrix::identity(n);
    for (i, t) in times.iter().enumerate() {
        if i > 0 {
            power = &power * y0;
        }
        if !t.is_zero() {
            a = a - power.scale(&(R::from_int(i as i64 + 1) * t.clone()));
        }
    }
    a
}

/// `exp(sum t_k tr h^k) det(x - X0 + sum_k k t_k Y0^{k-1})`.
pub fn tau_det<R: Ring>(x: &R, times: &[R], x0: &[R], y0: &Matrix<R>, twist: &[R]) -> TauValue<R> {
    let log_scale = times.iter().enumerate().fold(R::zero(), |a, (i, t)| a + t.clone() * power_sums(twist, i + 1));
    let a = shifted_positions(times, x0, y0);
    let m = Matrix::identity(x0.len()).scale(x) - a;
    TauValue { log_scale, det: m.det() }
}

/// The polynomial part of [`tau_det`] as a polynomial in `x`
/// (increasing degree).
pub fn tau_poly<R: Ring>(times: &[R], x0: &[R], y0: &Matrix<R>) -> UPoly<R> {
    let cp = shifted_positions(times, x0, y0).charpoly();
    UPoly::new(cp.into_iter().rev().collect())
}

/// `c0(z) = z^{-N} det(z - h)`.
pub fn c0<R: Ring>(z: &R, twist: &[R]) -> Result<R> {
    let zinv = pole(z.clone(), "z = 0")?;
    Ok(twist.iter().fold(R::one(), |a, k| a * (z.clone() - k.clone()) * zinv.clone()))
}

/// `psi exp(-xz)` and `psi* exp(xz)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BaValues<R> {
    pub psi: R,
    pub psi_star: R,
}

/// Stationary Baker-Akhiezer data: the residue vectors, both functions and
/// the potential `u = -sum (x - x_i)^{-2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BaData<R> {
    pub c: Vec<R>,
    pub c_star: Vec<R>,
    pub values: BaValues<R>,
    pub u: R,
}

fn resolvent<R: Ring>(z: &R, y0: &Matrix<R>) -> Result<Matrix<R>> {
    let n = y0.rows();
    (Matrix::identity(n).scale(z) - y0.clone()).inverse().ok_or_else(|| Error::Pole("z in the spectrum of Y0".into()))
}

fn inverse_gaps<R: Ring>(x: &R, x0: &[R]) -> Result<Vec<R>> {
    x0.iter().map(|xi| pole(x.clone() - xi.clone(), "x at a position")).collect()
}

fn ones<R: Ring>(n: usize) -> Vec<R> {
    vec![R::one(); n]
}

fn sum<R: Ring>(v: &[R]) -> R {
    v.iter().fold(R::zero(), |a, b| a + b.clone())
}

/// Determinant forms:
/// `psi = c0 det(x - X0 - (z - Y0)^{-1}) / det(x - X0)`,
/// `psi* = c0^{-1} det(x - X0 + (z - Y0)^{-1}) / det(x - X0)`.
pub fn ba_determinant<R: Ring>(x: &R, z: &R, x0: &[R], y0: &Matrix<R>, twist: &[R]) -> Result<BaValues<R>> {
    let n = x0.len();
    let g = resolvent(z, y0)?;
    let base = Matrix::identity(n).scale(x) - Matrix::diagonal(x0);
    let inv_det = pole(base.det(), "x at a position")?;
    let c = c0(z, twist)?;
    let cinv = pole(c.clone(), "z at a twist eigenvalue")?;
    Ok(BaValues {
        psi: c * (base.clone() - g.clone()).det() * inv_det.clone(),
        psi_star: cinv * (base + g).det() * inv_det,
    })
}

/// Resolvent forms
/// `psi = c0 (1 - 1^t (x - X0)^{-1} (z - Y0)^{-1} 1)`,
/// `psi* = c0^{-1} (1 + 1^t (z - Y0)^{-1} (x - X0)^{-1} 1)`,
/// with `c = -c0 (z - Y0)^{-1} 1` and `c* = c0^{-1} (z - Y0^t)^{-1} 1`.
pub fn ba_cc1<R: Ring>(x: &R, z: &R, x0: &[R], y0: &Matrix<R>, twist: &[R]) -> Result<BaData<R>> {
    let n = x0.len();
    let g = resolvent(z, y0)?;
    let d = inverse_gaps(x, x0)?;
    let c0v = c0(z, twist)?;
    let cinv = pole(c0v.clone(), "z at a twist eigenvalue")?;
    let g1 = g.mul_vec(&ones(n));
    let gt1 = g.transpose().mul_vec(&ones(n));
    let c: Vec<R> = g1.iter().map(|v| -(c0v.clone() * v.clone())).collect();
    let c_star: Vec<R> = gt1.iter().map(|v| cinv.clone() * v.clone()).collect();
    let left = sum(&d.iter().zip(&g1).map(|(a, b)| a.clone() * b.clone()).collect::<Vec<_>>());
    let right = sum(&d.iter().zip(&gt1).map(|(a, b)| a.clone() * b.clone()).collect::<Vec<_>>());
    let u = -sum(&d.iter().map(|v| v.clone() * v.clone()).collect::<Vec<_>>());
    Ok(BaData {
        c,
        c_star,
        values: BaValues { psi: c0v * (R::one() - left), psi_star: cinv * (R::one() + right) },
        u,
    })
}

/// `v^t A v / v^t v`.
pub fn expectation<R: Ring>(op: &TensorOperator<R>, v: &[R]) -> Result<R> {
    let av = op.matrix().mul_vec(v);
    let num = v.iter().zip(&av).fold(R::zero(), |a, (p, q)| a + p.clone() * q.clone());
    let den = v.iter().fold(R::zero(), |a, p| a + p.clone() * p.clone());
    Ok(num * pole(den, "zero vector")?)
}

/// Eigenvalue polynomial of an operator polynomial on an eigenvector.
pub fn eigenvalue_poly<R: Ring>(op: &OpPoly<R>, v: &[R]) -> Result<UPoly<R>> {
    Ok(UPoly::new(op.coeffs().iter().map(|c| expectation(c, v)).collect::<Result<_>>()?))
}

/// The quantum functions on an eigenvector `v`:
/// `psi = T(x, -[z^{-1}]) / T(x, 0)` and `psi* = T(x, +[z^{-1}]) / T(x, 0)`.
pub fn ba_quantum<R: Ring>(model: &GaudinModel, x: &Rational, z: &Rational, v: &[R]) -> Result<BaValues<R>> {
    let zeta = R::from_rational(&pole(z.clone(), "z = 0")?);
    let xr = R::from_rational(x);
    let vac = pole(model.vacuum_poly::<R>().eval(&xr), "x at a position")?;
    let mut out = Vec::with_capacity(2);
    for sign in [-1, 1] {
        let table = model.master_table(0, &[sign])?;
        let op = table.evaluate::<R>(model, &[], std::slice::from_ref(&zeta))?.poly.eval(&xr);
        out.push(expectation(&op, v)? * vac.clone());
    }
    let psi_star = out.pop().expect("two signs");
    Ok(BaValues { psi: out.pop().expect("two signs"), psi_star })
}

/// Leading `x^n` coefficients of `T(x, -+[z^{-1}])`; both are multiples of
/// the identity and give the limits of `psi exp(-xz)` and `psi* exp(xz)`.
pub fn ba_leading(model: &GaudinModel, z: &Rational) -> Result<(TensorOperator<Rational>, TensorOperator<Rational>)> {
    let zeta = pole(z.clone(), "z = 0")?;
    let n = model.sites();
    let mut out = Vec::with_capacity(2);
    for sign in [-1, 1] {
        let table = model.master_table(0, &[sign])?;
        let p = table.evaluate::<Rational>(model, &[], std::slice::from_ref(&zeta))?.poly;
        out.push(p.coeff(n));
    }
    let plus = out.pop().expect("two signs");
    Ok((out.pop().expect("two signs"), plus))
}

/// `res_inf(c_i c_i* z^m dz)` from the `z^{-m-1}` coefficient of
/// `-((z - Y)^{-1} 1)_i ((z - Y^t)^{-1} 1)_i = -sum_{a,b} (Y^a 1)_i (1^t Y^b)_i z^{-a-b-2}`.
pub fn residue_velocity<R: Ring>(y0: &Matrix<R>, m: usize) -> Vec<R> {
    let n = y0.rows();
    if m == 0 {
        return vec![R::zero(); n];
    }
    let yt = y0.transpose();
    let (mut right, mut left) = (vec![ones::<R>(n)], vec![ones::<R>(n)]);
    for a in 1..m {
        right.push(y0.mul_vec(&right[a - 1]));
        left.push(yt.mul_vec(&left[a - 1]));
    }
    (0..n)
        .map(|i| {
            let s = (0..m).fold(R::zero(), |acc, a| acc + right[a][i].clone() * left[m - 1 - a][i].clone());
            -s
        })
        .collect()
}

/// `res_inf(psi psi* z^m dz)` at `t = 0` by coefficient extraction:
/// with `A_j = 1^t D Y^j 1`, `B_j = 1^t Y^j D 1`, `D = (x - X0)^{-1}`, the
/// product is `1 - sum A_j z^{-j-1} + sum B_j z^{-j-1} - sum A_j B_l z^{-j-l-2}`.
pub fn ba10_residue<R: Ring>(x: &R, x0: &[R], y0: &Matrix<R>, m: usize) -> Result<R> {
    let n = x0.len();
    let d = inverse_gaps(x, x0)?;
    let dv: Vec<R> = d.clone();
    let yt = y0.transpose();
    // A_j = d . (Y^j 1), B_j = d . (Y^t)^j 1
    let (mut yj, mut ytj) = (ones::<R>(n), ones::<R>(n));
    let (mut a, mut b) = (Vec::with_capacity(m + 1), Vec::with_capacity(m + 1));
    for j in 0..=m {
        if j > 0 {
            yj = y0.mul_vec(&yj);
            ytj = yt.mul_vec(&ytj);
        }
        a.push(sum(&dv.iter().zip(&yj).map(|(p, q)| p.clone() * q.clone()).collect::<Vec<_>>()));
        b.push(sum(&dv.iter().zip(&ytj).map(|(p, q)| p.clone() * q.clone()).collect::<Vec<_>>()));
    }
    let mut out = b[m].clone() - a[m].clone();
    for j in 0..m {
        out = out - a[j].clone() * b[m - 1 - j].clone();
    }
    Ok(out)
}

/// `d_{t_m} d_{t_1} log tau` at `t = 0` from the determinant formula,
/// `-m sum_i (Y0^{m-1})_ii / (x - x_i)^2`.
pub fn ba10_tau<R: Ring>(x: &R, x0: &[R], y0: &Matrix<R>, m: usize) -> Result<R> {
    let d = inverse_gaps(x, x0)?;
    let p = y0.pow(m as u32 - 1);
    let s = (0..x0.len()).fold(R::zero(), |acc, i| acc + p.get(i, i).clone() * d[i].clone() * d[i].clone());
    Ok(-(R::from_int(m as i64) * s))
}

/// `d x_i / d t_m` at `t = 0` for the zeros of the determinant formula,
/// by implicit differentiation of `det(x - X0 + m t_m Y0^{m-1})`.
pub fn root_velocity<R: Ring>(x0: &[R], y0: &Matrix<R>, m: usize) -> Result<Vec<R>> {
    let n = x0.len();
    let p = y0.pow(m as u32 - 1);
    let mm = R::from_int(m as i64);
    let a = Matrix::from_fn(n, n, |i, j| {
        let base = if i == j { x0[i].clone() } else { R::zero() };
        Jet::new(vec![base, -(mm.clone() * p.get(i, j).clone())], 2)
    });
    let cp = a.charpoly();
    x0.iter()
        .map(|xi| {
            let (mut ft, mut fx) = (R::zero(), R::zero());
            for (k, c) in cp.iter().enumerate() {
                let e = (n - k) as u32;
                ft = ft + c.coeff(1) * xi.pow(e);
                if e > 0 {
                    fx = fx + R::from_int(e as i64) * c.coeff(0) * xi.pow(e - 1);
                }
            }
            Ok(-(ft * pole(fx, "multiple root")?))
        })
        .collect()
}

/// `d_{t_m} P(x, t)` at `t = 0`, where `T = exp(sum t_k tr h^k) P`.
pub fn master_time_derivative(model: &GaudinModel, m: usize) -> Result<OpPoly<Rational>> {
    let table = model.master_table(m, &[])?;
    let mut t = vec![MPoly::zero(); m];
    t[m - 1] = MPoly::var(0);
    let p = table.evaluate::<MPoly>(model, &t, &[])?.poly;
    Ok(p.map(|e| e.partial(0).constant_term()))
}

/// `d_{t_m} d_x log lambda(x, t)` at `t = 0` for the eigenvalue `lambda` of
/// the master T-operator on `v`; by `d_{t_1} = d_x + tr h` this is the left
/// side of the residue relation.
pub fn ba10_quantum<R: Ring>(model: &GaudinModel, x: &R, v: &[R], m: usize) -> Result<R> {
    let q = eigenvalue_poly(&master_time_derivative(model, m)?.map(|c| R::from_rational(c)), v)?;
    let l = model.vacuum_poly::<R>();
    let lv = pole(l.eval(x), "x at a position")?;
    let num = q.derivative().eval(x) * l.eval(x) - q.eval(x) * l.derivative().eval(x);
    Ok(num * lv.clone() * lv)
}

/// Residuals of the pole expansion of the linear problems
/// `d_t psi = psi'' + 2 u psi` and `-d_t psi* = psi*'' + 2 u psi*` along the
/// second flow, at the point `(x, z)`; the residue vectors are
/// differentiated through `dY/dt` computed from the Hamiltonian field.
/// Also returns `|dc/dt - T c|` and `|dc*/dt + T c*|`.
pub fn pole_expansion_residuals<R: Ring>(phase: &CMPhase<R>, x: &R, z: &R, twist: &[R]) -> Result<[R; 4]> {
    let n = phase.len();
    let lax = phase.lax()?;
    let data = ba_cc1(x, z, &phase.x, &lax.y, twist)?;
    let (xdot, pdot) = hamiltonian_field(phase, 2)?;
    let ydot = Matrix::from_fn(n, n, |i, k| {
        if i == k {
            -pdot[i].clone()
        } else {
            let inv = (phase.x[i].clone() - phase.x[k].clone()).try_inv().expect("distinct positions");
            (xdot[i].clone() - xdot[k].clone()) * inv.clone() * inv
        }
    });
    let g = resolvent(z, &lax.y)?;
    let c0v = c0(z, twist)?;
    let cinv = pole(c0v.clone(), "z at a twist eigenvalue")?;
    let gyg = &(&g * &ydot) * &g;
    let cdot: Vec<R> = gyg.mul_vec(&ones(n)).into_iter().map(|v| -(c0v.clone() * v)).collect();
    let cstar_dot: Vec<R> =
        gyg.transpose().mul_vec(&ones(n)).into_iter().map(|v| cinv.clone() * v).collect();
    let d = inverse_gaps(x, &phase.x)?;
    let two = R::from_int(2);
    let s2 = sum(&d.iter().map(|v| v.clone() * v.clone()).collect::<Vec<_>>());
    let residual = |base: R, c: &[R], cd: &[R], sign: R| -> R {
        // sign = +1 for psi, -1 for psi*
        let mut dt = R::zero();
        let mut dx = R::zero();
        let mut dxx = R::zero();
        let mut val = base;
        for i in 0..n {
            let di = d[i].clone();
            dt = dt + cd[i].clone() * di.clone() + c[i].clone() * xdot[i].clone() * di.clone() * di.clone();
            dx = dx - c[i].clone() * di.clone() * di.clone();
            dxx = dxx + two.clone() * c[i].clone() * di.pow(3);
            val = val + c[i].clone() * di;
        }
        sign.clone() * dt - sign * two.clone() * z.clone() * dx - dxx + two.clone() * s2.clone() * val
    };
    let r_psi = residual(c0v, &data.c, &cdot, R::one());
    let r_star = residual(cinv, &data.c_star, &cstar_dot, -R::one());
    let tc = lax.t.mul_vec(&data.c);
    let tcs = lax.t.mul_vec(&data.c_star);
    let e1 = cdot.iter().zip(&tc).fold(R::zero(), |a, (p, q)| a + (p.clone() - q.clone()) * (p.clone() - q.clone()));
    let e2 = cstar_dot
        .iter()
        .zip(&tcs)
        .fold(R::zero(), |a, (p, q)| a + (p.clone() + q.clone()) * (p.clone() + q.clone()));
    Ok([r_psi, r_star, e1, e2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn data() -> (Vec<Rational>, Matrix<Rational>, Vec<Rational>) {
        let ph = CMPhase::from_hamiltonians(vec![qi(0), qi(1), q(5, 2)], &[q(1, 3), q(-2, 3), q(3, 2)]).unwrap();
        let y = ph.lax().unwrap().y;
        (ph.x, y, vec![qi(2), qi(-1)])
    }

    #[test]
    fn tau_at_zero_times_is_the_vacuum() {
        let (x0, y0, tw) = data();
        let x = q(7, 4);
        let t = tau_det(&x, &[qi(0), qi(0), qi(0)], &x0, &y0, &tw);
        assert_eq!(t.det, x0.iter().fold(qi(1), |a, xi| a * (&x - xi)));
        assert_eq!(t.log_scale, qi(0));
        let times = [q(1, 2), q(-1, 3), q(1, 5)];
        assert_eq!(tau_poly(&times, &x0, &y0).eval(&x), tau_det(&x, &times, &x0, &y0, &tw).det);
    }

    #[test]
    fn empty_system_gives_the_free_function() {
        let tw = vec![qi(2), qi(-1)];
        let z = q(3, 2);
        let v = ba_determinant(&qi(1), &z, &[], &Matrix::zeros(0, 0), &tw).unwrap();
        assert_eq!(v.psi, c0(&z, &tw).unwrap());
        assert_eq!(v.psi, (&z - qi(2)) * (&z + qi(1)) / (&z * &z));
    }

    #[test]
    fn determinant_and_resolvent_forms_agree() {
        let (x0, y0, tw) = data();
        for (x, z) in [(q(1, 3), q(7, 2)), (q(-4, 5), q(1, 7)), (qi(4), q(-5, 3))] {
            let a = ba_determinant(&x, &z, &x0, &y0, &tw).unwrap();
            let b = ba_cc1(&x, &z, &x0, &y0, &tw).unwrap();
            assert_eq!(a, b.values);
        }
    }

    #[test]
    fn determinant_identity_from_the_commutation_relation() {
        let (x0, y0, _) = data();
        let (x, z) = (q(2, 7), q(-3, 4));
        let n = 3;
        let xm = Matrix::identity(n).scale(&x) - Matrix::diagonal(&x0);
        let zm = Matrix::identity(n).scale(&z) - y0.clone();
        let lhs = (&xm * &zm - Matrix::identity(n)).det();
        let g = zm.inverse().unwrap();
        let d = xm.inverse().unwrap();
        let one = vec![qi(1); n];
        let s: Rational = (&d * &g).mul_vec(&one).into_iter().sum();
        assert_eq!(lhs, xm.det() * zm.det() * (qi(1) - s));
    }

    #[test]
    fn residue_velocity_matches_hamiltonian_derivative() {
        let (_, y0, _) = data();
        for m in 1..=4 {
            let r = residue_velocity(&y0, m);
            let p = y0.pow(m as u32 - 1);
            for (i, ri) in r.iter().enumerate() {
                assert_eq!(*ri, -(qi(m as i64) * p.get(i, i)));
            }
        }
    }

    #[test]
    fn residue_relation_and_root_velocities() {
        let (x0, y0, _) = data();
        let x = q(-7, 3);
        for m in 1..=3 {
            assert_eq!(ba10_residue(&x, &x0, &y0, m).unwrap(), ba10_tau(&x, &x0, &y0, m).unwrap());
            assert_eq!(root_velocity(&x0, &y0, m).unwrap(), residue_velocity(&y0, m));
        }
    }

    #[test]
    fn pole_expansion_vanishes() {
        let ph = CMPhase::new(vec![qi(0), q(3, 2), q(-2, 5)], vec![q(1, 3), qi(-2), q(5, 4)]).unwrap();
        let tw = vec![qi(2), qi(-1), q(1, 2)];
        let r = pole_expansion_residuals(&ph, &q(5, 7), &q(9, 4), &tw).unwrap();
        for v in r {
            assert_eq!(v, qi(0));
        }
    }
}
