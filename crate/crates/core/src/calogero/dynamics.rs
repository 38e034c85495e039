//! Zeros of a master T-operator eigenvalue as functions of `t_2`, compared
//! with the zeros of the determinant tau-function and with the integrated
//! second Calogero-Moser flow started at `x_i(0)`, `p_i(0) = -H_i`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::calogero::ba::{eigenvalue_poly, master_time_derivative};
use crate::calogero::flow::{cm_acceleration, integrate, FlowReport, SEPARATION_GUARD};
use crate::calogero::CMPhase;
use crate::error::{Error, Result};
use crate::gaudin::{GaudinModel, MasterTable};
use crate::linalg::Matrix;
use crate::spectrum::Eigenstate;
use crate::tensor::Permutation;

const FD_STEP: f64 = 1e-3;

/// Roots of `sum_k c_k x^k` (increasing coefficients, nonzero leading one)
/// as eigenvalues of the companion matrix.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = coeffs[n];
    if lead.norm() == 0.0 {
        return Err(Error::Runtime("vanishing leading coefficient".into()));
    }
    let mut c = DMatrix::<Complex64>::zeros(n, n);
    for i in 1..n {
        c[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..n {
        c[(i, n - 1)] = -coeffs[i] / lead;
    }
    eigenvalues(c)
}

/// Eigenvalues of a complex matrix from its Schur form.
pub fn eigenvalues(m: DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    m.schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::NonConvergence("Schur decomposition".into()))
}

/// Orders `new` to follow `prev` by the matching minimizing the largest
/// displacement; refuses when two of the new roots are closer than the
/// separation guard.
pub fn track_roots(prev: &[Complex64], new: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = prev.len();
    if new.len() != n {
        return Err(Error::ShapeMismatch(format!("{} roots, expected {n}", new.len())));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (new[i] - new[j]).norm();
            if d < SEPARATION_GUARD {
                return Err(Error::Collision(format!("roots {i} and {j} within {d:.3e}")));
            }
        }
    }
    if n <= 7 {
        let mut best: Option<(f64, f64, Vec<usize>)> = None;
        for p in Permutation::all(n) {
            let img = p.images();
            let (mut mx, mut total) = (0.0f64, 0.0);
            for (i, &j) in img.iter().enumerate() {
                let d = (prev[i] - new[j]).norm();
                mx = mx.max(d);
                total += d;
            }
            if best.as_ref().is_none_or(|(bm, bt, _)| mx < *bm || (mx == *bm && total < *bt)) {
                best = Some((mx, total, img.to_vec()));
            }
        }
        let (_, _, img) = best.expect("n > 0 or empty permutation");
        return Ok(img.iter().map(|&j| new[j]).collect());
    }
    let mut used = vec![false; n];
    Ok(prev
        .iter()
        .map(|p| {
            let j = (0..n)
                .filter(|j| !used[*j])
                .min_by(|a, b| (p - new[*a]).norm().total_cmp(&(p - new[*b]).norm()))
                .expect("free root");
            used[j] = true;
            new[j]
        })
        .collect())
}

/// Sampled root positions.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub roots: Vec<Vec<Complex64>>,
}

impl Trajectory {
    /// CSV with header `t,root1_re,root1_im,...`.
    pub fn to_csv(&self) -> String {
        let n = self.roots.first().map_or(0, |r| r.len());
        let mut out = String::from("t");
        for i in 1..=n {
            out.push_str(&format!(",root{i}_re,root{i}_im"));
        }
        out.push('\n');
        for (t, row) in self.times.iter().zip(&self.roots) {
            out.push_str(&format!("{t}"));
            for r in row {
                out.push_str(&format!(",{},{}", r.re, r.im));
            }
            out.push('\n');
        }
        out
    }

    /// Largest distance between corresponding roots over common samples.
    pub fn deviation(&self, other: &[Vec<Complex64>]) -> f64 {
        self.roots
            .iter()
            .zip(other)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q).norm()))
            .fold(0.0, f64::max)
    }
}

/// Conservation log of a flow: `t,drift,I1_re,I1_im,...` with `I_j = tr Y^j`.
pub fn conservation_csv(flow: &FlowReport) -> String {
    let n = flow.invariants.first().map_or(0, |r| r.len());
    let mut out = String::from("t,drift");
    for j in 1..=n {
        out.push_str(&format!(",I{j}_re,I{j}_im"));
    }
    out.push('\n');
    let base = flow.invariants.first().cloned().unwrap_or_default();
    for (t, inv) in flow.times.iter().zip(&flow.invariants) {
        let drift = inv.iter().zip(&base).map(|(u, v)| (u - v).norm() / v.norm().max(1.0)).fold(0.0, f64::max);
        out.push_str(&format!("{t},{drift}"));
        for v in inv {
            out.push_str(&format!(",{},{}", v.re, v.im));
        }
        out.push('\n');
    }
    out
}

/// Everything compared along one `t_2` window.
#[derive(Clone, Debug)]
pub struct ZeroDynamics {
    /// Zeros of the master T-operator eigenvalue.
    pub master: Trajectory,
    /// Zeros of the determinant tau-function.
    pub tau: Trajectory,
    pub flow: FlowReport,
    pub master_vs_flow: f64,
    pub tau_vs_flow: f64,
    /// `d x_i / d t_2` at `0` from the master T-operator.
    pub velocities: Vec<Complex64>,
    /// `max_i |velocity_i + 2 H_i|`.
    pub velocity_error: f64,
    /// Second differences of the zeros at `0` against `-8 sum (x_i - x_j)^{-3}`.
    pub acceleration_error: f64,
    pub aborted: Option<String>,
}

struct MasterZeros<'a> {
    model: &'a GaudinModel,
    table: MasterTable,
    v: &'a [f64],
}

impl MasterZeros<'_> {
    fn at(&self, t2: f64) -> Result<Vec<Complex64>> {
        let p = self.table.evaluate::<f64>(self.model, &[0.0, t2], &[])?.poly;
        let coeffs = eigenvalue_poly(&p, self.v)?;
        poly_roots(&coeffs.coeffs().iter().map(|c| Complex64::new(*c, 0.0)).collect::<Vec<_>>())
    }
}

/// Zero dynamics of the eigenstate `state` over `t_2 in [0, t_end]` with
/// `steps` equal intervals.
pub fn zero_dynamics(model: &GaudinModel, state: &Eigenstate<f64>, t_end: f64, steps: usize) -> Result<ZeroDynamics> {
    let n = model.sites();
    let x0: Vec<Complex64> = model.positions().iter().map(|v| Complex64::new(crate::scalar::rational_to_f64(v), 0.0)).collect();
    let h: Vec<Complex64> = state.h.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let phase = CMPhase::from_hamiltonians(x0.clone(), &h)?;
    let y0 = phase.lax()?.y;
    let zeros = MasterZeros { model, table: model.master_table(2, &[])?, v: &state.vector };

    // at a simple zero of P(., 0): dx_i/dt_2 = -(d_{t_2} P)(x_i) / P'(x_i)
    let dq = master_time_derivative(model, 2)?.map(crate::scalar::rational_to_f64);
    let q = eigenvalue_poly(&dq, &state.vector)?;
    let vac = model.vacuum_poly::<f64>().derivative();
    let velocities: Vec<Complex64> = (0..n)
        .map(|i| {
            let xi = x0[i].re;
            Complex64::new(-q.eval(&xi) / vac.eval(&xi), 0.0)
        })
        .collect();
    let velocity_error = velocities.iter().zip(&h).map(|(v, hi)| (v + hi * 2.0).norm()).fold(0.0, f64::max);

    let second = |step: f64| -> Result<Vec<Complex64>> {
        let plus = track_roots(&x0, &zeros.at(step)?)?;
        let minus = track_roots(&x0, &zeros.at(-step)?)?;
        Ok((0..n).map(|i| (plus[i] - x0[i] * 2.0 + minus[i]) / (step * step)).collect())
    };
    let (d1, d2) = (second(FD_STEP)?, second(FD_STEP / 2.0)?);
    let acc = cm_acceleration(&x0)?;
    let acceleration_error =
        (0..n).map(|i| ((d2[i] * 4.0 - d1[i]) / 3.0 - acc[i]).norm()).fold(0.0, f64::max);

    let dt = if steps == 0 { 0.0 } else { t_end / steps as f64 };
    let flow = integrate(&phase, 2, dt, steps)?;
    let mut master = Trajectory::default();
    let mut tau = Trajectory::default();
    let mut aborted = flow.aborted.clone();
    let (mut prev_m, mut prev_t) = (x0.clone(), x0.clone());
    for s in 0..=steps {
        let t = s as f64 * dt;
        let step = (|| -> Result<(Vec<Complex64>, Vec<Complex64>)> {
            let m = track_roots(&prev_m, &zeros.at(t)?)?;
            let a = Matrix::diagonal(&x0) - y0.scale(&Complex64::new(2.0 * t, 0.0));
            let tr = track_roots(&prev_t, &eigenvalues(a.to_complex())?)?;
            Ok((m, tr))
        })();
        match step {
            Ok((m, tr)) => {
                master.times.push(t);
                master.roots.push(m.clone());
                tau.times.push(t);
                tau.roots.push(tr.clone());
                prev_m = m;
                prev_t = tr;
            }
            Err(e @ Error::Collision(_)) => {
                aborted.get_or_insert(format!("{e} after {} rows", master.times.len()));
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let flow_x: Vec<Vec<Complex64>> = flow.phases.iter().map(|p| p.x.clone()).collect();
    Ok(ZeroDynamics {
        master_vs_flow: master.deviation(&flow_x),
        tau_vs_flow: tau.deviation(&flow_x),
        master,
        tau,
        flow,
        velocities,
        velocity_error,
        acceleration_error,
        aborted,
    })
}
