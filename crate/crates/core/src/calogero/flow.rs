//! Hamiltonian flows `H_k = tr Y^k` and a fixed-step eighth-order integrator.
//!
//! The integrator is Gragg's modified midpoint rule extrapolated over the
//! substep sequence 2, 4, 6, 8, which is an explicit Runge-Kutta scheme of
//! order eight. A step whose local error estimate is too large is split in
//! two, recursively, which resolves close approaches of the particles; the
//! base step is halved until the integrals `tr Y^j`, `j = 1..n`, drift by
//! less than [`DRIFT_TOLERANCE`] over the window.

use num_complex::Complex64;

use crate::calogero::CMPhase;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{q, Ring};

pub const DRIFT_TOLERANCE: f64 = 1e-10;
pub const SEPARATION_GUARD: f64 = 1e-6;
const MAX_HALVINGS: usize = 6;
/// Local error estimate (last two extrapolation columns) above which a
/// step is split.
const LOCAL_ERROR_LIMIT: f64 = 1e-10;
/// Splitting depth at which a step that still fails is taken to run into a
/// collision.
const MAX_DEPTH: usize = 16;
const SEQUENCE: [usize; 4] = [2, 4, 6, 8];

/// `(dx/dt_k, dp/dt_k)` with `dx_i = d tr Y^k / dp_i = -k (Y^{k-1})_ii` and
/// `dp_i = -d tr Y^k / dx_i = -(k/2) ((T Y^{k-1})_ii - (Y^{k-1} T)_ii)`.
pub fn hamiltonian_field<R: Ring>(phase: &CMPhase<R>, k: usize) -> Result<(Vec<R>, Vec<R>)> {
    if k == 0 {
        return Err(Error::Runtime("hierarchy index starts at 1".into()));
    }
    let lax = phase.lax()?;
    let n = phase.len();
    let yk = lax.y.pow(k as u32 - 1);
    let ty = &lax.t * &yk;
    let yt = &yk * &lax.t;
    let kk = R::from_int(k as i64);
    let half = R::from_rational(&q(k as i64, 2));
    let xdot = (0..n).map(|i| -(kk.clone() * yk.get(i, i).clone())).collect();
    let pdot = (0..n).map(|i| -(half.clone() * (ty.get(i, i).clone() - yt.get(i, i).clone()))).collect();
    Ok((xdot, pdot))
}

/// `tr Y^j` for `j = 1..=n`.
pub fn invariants<R: Ring>(phase: &CMPhase<R>) -> Result<Vec<R>> {
    let y = phase.lax()?.y;
    Ok(super::lax_traces(&y, phase.len()).split_off(1))
}

/// `min_{i<j} |x_i - x_j|` (infinite for fewer than two particles).
pub fn min_separation(x: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            best = best.min((x[i] - x[j]).norm());
        }
    }
    best
}

/// Sampled trajectory of one flow.
#[derive(Clone, Debug)]
pub struct FlowReport {
    pub k: usize,
    pub dt: f64,
    /// Integrator steps per output interval after halving.
    pub substeps: usize,
    pub times: Vec<f64>,
    pub phases: Vec<CMPhase<Complex64>>,
    /// `tr Y^j`, `j = 1..n`, at each sample.
    pub invariants: Vec<Vec<Complex64>>,
    /// Largest relative change of an invariant over the window.
    pub drift: f64,
    pub min_separation: f64,
    /// Largest local error estimate of an accepted integrator step.
    pub local_error: f64,
    /// Deepest splitting of a step.
    pub depth: usize,
    /// Set when the separation guard stopped the run; samples up to the
    /// abort are kept.
    pub aborted: Option<String>,
}

impl FlowReport {
    pub fn last(&self) -> &CMPhase<Complex64> {
        self.phases.last().expect("at least the initial sample")
    }
}

type State = Vec<Complex64>;

fn split(state: &State) -> CMPhase<Complex64> {
    let n = state.len() / 2;
    CMPhase { x: state[..n].to_vec(), p: state[n..].to_vec() }
}

fn field(state: &State, k: usize) -> Result<State> {
    let (mut dx, dp) = hamiltonian_field(&split(state), k)?;
    dx.extend(dp);
    Ok(dx)
}

fn axpy(y: &State, h: f64, f: &State) -> State {
    y.iter().zip(f).map(|(a, b)| a + b * h).collect()
}

fn guard(state: &State) -> Result<()> {
    let n = state.len() / 2;
    let sep = min_separation(&state[..n]);
    if sep < SEPARATION_GUARD {
        return Err(Error::Collision(format!("separation {sep:.3e}")));
    }
    Ok(())
}

fn midpoint(y: &State, f0: &State, big: f64, m: usize, k: usize) -> Result<State> {
    let h = big / m as f64;
    let mut prev = y.clone();
    let mut cur = axpy(y, h, f0);
    for _ in 1..m {
        guard(&cur)?;
        let next = axpy(&prev, 2.0 * h, &field(&cur, k)?);
        prev = cur;
        cur = next;
    }
    guard(&cur)?;
    let fe = field(&cur, k)?;
    Ok(cur.iter().zip(&prev).zip(&fe).map(|((c, p), f)| (c + p + f * h) * 0.5).collect())
}

/// One extrapolated step and its local error estimate.
fn step(y: &State, big: f64, k: usize) -> Result<(State, f64)> {
    let f0 = field(y, k)?;
    // prev[l] = T_{j-1, l}; row[l] = T_{j, l}
    let mut prev: Vec<State> = Vec::new();
    for (j, &m) in SEQUENCE.iter().enumerate() {
        let mut row = vec![midpoint(y, &f0, big, m, k)?];
        for l in 1..=j {
            let ratio = (m as f64 / SEQUENCE[j - l] as f64).powi(2) - 1.0;
            let next = row[l - 1].iter().zip(&prev[l - 1]).map(|(a, b)| a + (a - b) / ratio).collect();
            row.push(next);
        }
        prev = row;
    }
    let best = prev.pop().expect("nonempty table");
    let lower = prev.pop().expect("at least two columns");
    let scale = best.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let err = best.iter().zip(&lower).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / scale;
    Ok((best, err))
}

struct Advance {
    state: State,
    err: f64,
    depth: usize,
}

/// Advances by `h`, splitting the step while its error estimate exceeds
/// [`LOCAL_ERROR_LIMIT`].
fn advance(y: &State, h: f64, k: usize, depth: usize) -> Result<Advance> {
    let (next, err) = step(y, h, k)?;
    if err <= LOCAL_ERROR_LIMIT {
        return Ok(Advance { state: next, err, depth });
    }
    if depth == MAX_DEPTH {
        let sep = min_separation(&next[..y.len() / 2]);
        return Err(Error::Collision(format!("local error {err:.3e} at step {h:.3e}, separation {sep:.3e}")));
    }
    let a = advance(y, h / 2.0, k, depth + 1)?;
    let b = advance(&a.state, h / 2.0, k, depth + 1)?;
    Ok(Advance { state: b.state, err: a.err.max(b.err), depth: a.depth.max(b.depth) })
}

fn relative_drift(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).norm() / u.norm().max(1.0)).fold(0.0, f64::max)
}

fn run(phase: &CMPhase<Complex64>, k: usize, dt: f64, steps: usize, substeps: usize) -> Result<FlowReport> {
    let mut state: State = phase.x.iter().chain(&phase.p).cloned().collect();
    let inv0 = invariants(phase)?;
    let mut report = FlowReport {
        k,
        dt,
        substeps,
        times: vec![0.0],
        phases: vec![phase.clone()],
        invariants: vec![inv0.clone()],
        drift: 0.0,
        min_separation: min_separation(&phase.x),
        local_error: 0.0,
        depth: 0,
        aborted: None,
    };
    let h = dt / substeps as f64;
    for s in 1..=steps {
        for _ in 0..substeps {
            match advance(&state, h, k, 0) {
                Ok(a) => {
                    report.local_error = report.local_error.max(a.err);
                    report.depth = report.depth.max(a.depth);
                    state = a.state;
                }
                Err(e @ Error::Collision(_)) => {
                    report.aborted = Some(format!("{e} after {} samples", report.times.len()));
                    report.local_error = f64::INFINITY;
                    return Ok(report);
                }
                Err(e) => return Err(e),
            }
        }
        let ph = split(&state);
        let inv = invariants(&ph)?;
        report.drift = report.drift.max(relative_drift(&inv0, &inv));
        report.min_separation = report.min_separation.min(min_separation(&ph.x));
        report.times.push(s as f64 * dt);
        report.phases.push(ph);
        report.invariants.push(inv);
    }
    Ok(report)
}

/// Integrates the `k`-th flow over `steps` output intervals of length `dt`,
/// halving the integrator step until the drift of the integrals is below
/// [`DRIFT_TOLERANCE`] or stops improving.
pub fn integrate(phase: &CMPhase<Complex64>, k: usize, dt: f64, steps: usize) -> Result<FlowReport> {
    if min_separation(&phase.x) < SEPARATION_GUARD {
        return Err(Error::Collision("initial positions".into()));
    }
    let mut substeps = 1;
    let mut best = run(phase, k, dt, steps, substeps)?;
    for _ in 0..MAX_HALVINGS {
        let guarded = best.local_error.is_infinite();
        if guarded || (best.aborted.is_none() && best.drift < DRIFT_TOLERANCE) {
            break;
        }
        substeps *= 2;
        let next = run(phase, k, dt, steps, substeps)?;
        // below this level a failure to improve is round-off, not truncation
        let stalled = next.aborted.is_none() && next.drift < 1e-8 && next.drift >= 0.5 * best.drift;
        best = next;
        if stalled {
            break;
        }
    }
    Ok(best)
}

/// The phase after flowing for `steps * dt`; fails on a near collision or
/// when the integrals are not conserved to [`DRIFT_TOLERANCE`].
pub fn flow(phase: &CMPhase<Complex64>, k: usize, dt: f64, steps: usize) -> Result<CMPhase<Complex64>> {
    let report = integrate(phase, k, dt, steps)?;
    if let Some(reason) = report.aborted {
        return Err(Error::Collision(reason));
    }
    if report.drift >= DRIFT_TOLERANCE {
        return Err(Error::NonConvergence(format!("integral drift {:.3e}", report.drift)));
    }
    Ok(report.last().clone())
}

/// `dY/dt` along the second flow, `[T, Y]`.
pub fn lax_rhs<R: Ring>(phase: &CMPhase<R>) -> Result<Matrix<R>> {
    let lax = phase.lax()?;
    Ok(lax.t.commutator(&lax.y))
}

/// `-8 sum_{j != i} (x_i - x_j)^{-3}`.
pub fn cm_acceleration<R: Ring>(x: &[R]) -> Result<Vec<R>> {
    let n = x.len();
    (0..n)
        .map(|i| {
            let mut acc = R::zero();
            for j in 0..n {
                if j != i {
                    let inv = (x[i].clone() - x[j].clone())
                        .try_inv()
                        .ok_or_else(|| Error::CoincidentPositions(format!("x_{i} = x_{j}")))?;
                    acc = acc + inv.pow(3);
                }
            }
            Ok(R::from_int(-8) * acc)
        })
        .collect()
}
