//! Joint spectrum of the Gaudin Hamiltonians in a weight sector, computed
//! twice: by simultaneous diagonalization of the operators, and as the
//! solutions of the classical system
//!
//! ```text
//! sum over matchings M of prod_{(i,j) in M} (x_i - x_j)^{-2} prod_{l uncovered} (z - H_l)
//!     = prod_a (z - k_a)^{m_a}
//! ```
//!
//! identically in `z`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::calogero::{matching_poly, CMPhase};
use crate::error::{Error, Result};
use crate::gaudin::GaudinModel;
use crate::linalg::Matrix;
use crate::poly::UPoly;
use crate::scalar::{Rational, Ring, ToComplex};
use crate::tensor::{decode, encode, Permutation, SectorLabel, TensorOperator};

pub const GAP_TOLERANCE: f64 = 1e-8;
pub const REDRAWS: usize = 5;
pub const NEWTON_TOLERANCE: f64 = 1e-12;
pub const NEWTON_ITERATIONS: usize = 100;
pub const MERGE_DISTANCE: f64 = 1e-8;
pub const IMAGINARY_FLAG: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Direct,
    Classical,
}

/// Values of `H_1..H_n` on one joint eigenvector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumTuple {
    pub sector: Vec<usize>,
    pub values: Vec<Complex64>,
    pub source: Source,
    pub residual: f64,
}

impl SpectrumTuple {
    /// `max_i |H_i - H'_i|`.
    pub fn distance(&self, other: &SpectrumTuple) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn max_imaginary(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }
}

/// A joint eigenvector in the full tensor space with its eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenstate<R> {
    pub sector: SectorLabel,
    pub h: Vec<R>,
    pub vector: Vec<R>,
    /// `max_i ||H_i v - h_i v||` with `v` normalized.
    pub residual: f64,
}

impl<R: Ring + ToComplex> Eigenstate<R> {
    pub fn tuple(&self) -> SpectrumTuple {
        SpectrumTuple {
            sector: self.sector.counts().to_vec(),
            values: self.h.iter().map(|v| v.to_c64()).collect(),
            source: Source::Direct,
            residual: self.residual,
        }
    }

    /// `(X0, Y0)` with `X0 = diag(x)` and `Y0` the Lax matrix at `p = -H`.
    pub fn lax_pair(&self, model: &GaudinModel) -> Result<(Vec<R>, Matrix<R>)> {
        let x: Vec<R> = model.positions().iter().map(R::from_rational).collect();
        let y = CMPhase::from_hamiltonians(x.clone(), &self.h)?.lax()?.y;
        Ok((x, y))
    }
}

/// Outcome of the direct diagonalization of one sector.
#[derive(Clone, Debug)]
pub struct DirectResult {
    pub states: Vec<Eigenstate<f64>>,
    /// Number of coefficient redraws used.
    pub redraws: usize,
    /// Whether the joint-diagonalization fallback ran.
    pub fallback: bool,
    /// Clusters the fallback could not split.
    pub unresolved: usize,
}

fn real_block(op: &TensorOperator<Rational>, sector: &SectorLabel) -> DMatrix<f64> {
    op.restrict(sector).to_real()
}

fn sorted_gap(values: &DVector<f64>) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Splits the columns of `basis` into joint eigenvectors of `ops[from..]`,
/// one operator at a time. Returns the vectors and the number of clusters
/// left degenerate.
fn refine(basis: DMatrix<f64>, ops: &[DMatrix<f64>], from: usize) -> (Vec<DVector<f64>>, usize) {
    if basis.ncols() == 1 {
        return (vec![basis.column(0).into_owned()], 0);
    }
    if from == ops.len() {
        return (basis.column_iter().map(|c| c.into_owned()).collect(), 1);
    }
    let m = basis.transpose() * &ops[from] * &basis;
    let m = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|a, b| eig.eigenvalues[*a].total_cmp(&eig.eigenvalues[*b]));
    let scale = ops[from].amax().max(1.0);
    let mut out = Vec::new();
    let mut unresolved = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && eig.eigenvalues[order[end]] - eig.eigenvalues[order[end - 1]] < GAP_TOLERANCE * scale {
            end += 1;
        }
        let cols: Vec<DVector<f64>> =
            order[start..end].iter().map(|&c| &basis * eig.eigenvectors.column(c)).collect();
        let sub = DMatrix::from_columns(&cols);
        let (v, u) = refine(sub, ops, from + 1);
        out.extend(v);
        unresolved += u;
        start = end;
    }
    (out, unresolved)
}

fn normalize_sign(v: &mut DVector<f64>) {
    let norm = v.norm();
    if norm > 0.0 {
        *v /= norm;
    }
    let (idx, _) = v.iter().enumerate().fold((0, 0.0), |(bi, bv), (i, x)| if x.abs() > bv + 1e-12 { (i, x.abs()) } else { (bi, bv) });
    if v[idx] < 0.0 {
        v.neg_mut();
    }
}

/// Joint eigenvectors of `H_1..H_n` in `sector`: a random combination
/// `sum c_i H_i` is diagonalized and the `H_i` read off by Rayleigh
/// quotients. Near-degenerate combinations are redrawn up to
/// [`REDRAWS`] times before falling back to successive diagonalization of
/// the individual operators on each cluster.
pub fn direct_eigenstates(model: &GaudinModel, sector: &SectorLabel, seed: u64) -> Result<DirectResult> {
    check_sector(model, sector)?;
    let hs = model.hamiltonians()?;
    let blocks: Vec<DMatrix<f64>> = hs.iter().map(|h| real_block(h, sector)).collect();
    let dim = sector.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = None;
    let mut redraws = 0;
    let mut last = None;
    for attempt in 0..=REDRAWS {
        let coeffs: Vec<f64> = (0..blocks.len()).map(|_| rng.gen_range(0.5..1.5)).collect();
        let comb = blocks.iter().zip(&coeffs).fold(DMatrix::zeros(dim, dim), |a, (b, c)| a + b * *c);
        let eig = SymmetricEigen::new(comb.clone());
        let scale = comb.amax().max(1.0);
        redraws = attempt;
        if dim == 1 || sorted_gap(&eig.eigenvalues) >= GAP_TOLERANCE * scale {
            chosen = Some(eig);
            break;
        }
        last = Some(eig);
    }
    let (vectors, fallback, unresolved) = match chosen {
        Some(eig) => (eig.eigenvectors.column_iter().map(|c| c.into_owned()).collect::<Vec<_>>(), false, 0),
        None => {
            let eig = last.expect("at least one draw");
            let (v, u) = refine(eig.eigenvectors, &blocks, 0);
            (v, true, u)
        }
    };
    let basis = sector.basis();
    let full = model.dim();
    let mut states: Vec<Eigenstate<f64>> = vectors
        .into_iter()
        .map(|mut v| {
            normalize_sign(&mut v);
            let h: Vec<f64> = blocks.iter().map(|b| v.dot(&(b * &v))).collect();
            let residual =
                blocks.iter().zip(&h).map(|(b, hv)| (b * &v - &v * *hv).norm()).fold(0.0, f64::max);
            let mut vector = vec![0.0; full];
            for (k, &idx) in basis.iter().enumerate() {
                vector[idx] = v[k];
            }
            Eigenstate { sector: sector.clone(), h, vector, residual }
        })
        .collect();
    states.sort_by(|a, b| {
        a.h.iter().zip(&b.h).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(DirectResult { states, redraws, fallback, unresolved })
}

pub fn direct_spectrum(model: &GaudinModel, sector: &SectorLabel, seed: u64) -> Result<Vec<SpectrumTuple>> {
    Ok(direct_eigenstates(model, sector, seed)?.states.iter().map(|s| s.tuple()).collect())
}

fn check_sector(model: &GaudinModel, sector: &SectorLabel) -> Result<()> {
    if sector.rank() != model.rank() || sector.sites() != model.sites() {
        return Err(Error::InvalidSector(format!(
            "{:?} for N = {}, n = {}",
            sector.counts(),
            model.rank(),
            model.sites()
        )));
    }
    Ok(())
}

/// The eigenstate `e_a^{(x)n}` of the sector `n e_a`, with
/// `H_i = k_a + sum_{j != i} 1/(x_i - x_j)`; checked exactly.
pub fn uniform_eigenstate(model: &GaudinModel, a: usize) -> Result<Eigenstate<Rational>> {
    let (rank, n) = (model.rank(), model.sites());
    if a >= rank {
        return Err(Error::IndexOutOfRange(format!("colour {a} for N = {rank}")));
    }
    let mut counts = vec![0; rank];
    counts[a] = n;
    let sector = SectorLabel::new(counts, n)?;
    let x = model.positions();
    let k = &model.twist()[a];
    let h: Vec<Rational> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i).fold(k.clone(), |acc, j| acc + (&x[i] - &x[j]).recip()))
        .collect();
    let mut vector = vec![Rational::zero(); model.dim()];
    vector[encode(&vec![a; n], rank)] = Rational::one();
    let hs = model.hamiltonians()?;
    let exact = hs.iter().zip(&h).all(|(op, hv)| {
        let av = op.matrix().mul_vec(&vector);
        av.iter().zip(&vector).all(|(p, q)| *p == hv * q)
    });
    if !exact {
        return Err(Error::Runtime("uniform state is not an eigenvector".into()));
    }
    Ok(Eigenstate { sector, h, vector, residual: 0.0 })
}

/// Target `prod_a (z - k_a)^{m_a}`.
fn target_poly(model: &GaudinModel, sector: &SectorLabel) -> UPoly<Complex64> {
    let mut p = UPoly::constant(Complex64::new(1.0, 0.0));
    for (k, &m) in model.twist().iter().zip(sector.counts()) {
        for _ in 0..m {
            p = p * UPoly::linear(Complex64::from_rational(k));
        }
    }
    p
}

/// Coefficients of `z^{n-1}, ..., z^0` of the left minus the right side.
fn equations(x: &[Complex64], h: &[Complex64], target: &UPoly<Complex64>) -> Result<Vec<Complex64>> {
    let n = x.len();
    let lhs = matching_poly(x, h, None)?;
    Ok((1..=n).map(|k| lhs.coeff(n - k) - target.coeff(n - k)).collect())
}

fn jacobian(x: &[Complex64], h: &[Complex64]) -> Result<DMatrix<Complex64>> {
    let n = x.len();
    let mut j = DMatrix::zeros(n, n);
    for i in 0..n {
        let d = matching_poly(x, h, Some(i))?;
        for k in 1..=n {
            j[(k - 1, i)] = -d.coeff(n - k);
        }
    }
    Ok(j)
}

fn residual_norm(f: &[Complex64], scale: f64) -> f64 {
    f.iter().map(|v| v.norm()).fold(0.0, f64::max) / scale
}

/// One damped Newton solve; returns the solution and its residual.
fn newton(x: &[Complex64], seed: Vec<Complex64>, target: &UPoly<Complex64>, scale: f64) -> Result<(Vec<Complex64>, f64)> {
    let mut h = seed;
    let mut f = equations(x, &h, target)?;
    let mut r = residual_norm(&f, scale);
    for _ in 0..NEWTON_ITERATIONS {
        if r < NEWTON_TOLERANCE {
            break;
        }
        let j = jacobian(x, &h)?;
        let rhs = DVector::from_iterator(f.len(), f.iter().map(|v| -v));
        let Some(delta) = j.lu().solve(&rhs) else {
            return Err(Error::NonConvergence("singular Jacobian".into()));
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..20 {
            let trial: Vec<Complex64> = h.iter().zip(delta.iter()).map(|(a, d)| a + d * lambda).collect();
            let ft = equations(x, &trial, target)?;
            let rt = residual_norm(&ft, scale);
            if rt < r || rt < NEWTON_TOLERANCE {
                h = trial;
                f = ft;
                r = rt;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::NonConvergence(format!("line search stalled at residual {r:.3e}")));
        }
    }
    if r >= NEWTON_TOLERANCE {
        return Err(Error::NonConvergence(format!("residual {r:.3e} after {NEWTON_ITERATIONS} iterations")));
    }
    // two polishing steps
    for _ in 0..2 {
        let j = jacobian(x, &h)?;
        let rhs = DVector::from_iterator(f.len(), f.iter().map(|v| -v));
        if let Some(delta) = j.lu().solve(&rhs) {
            let trial: Vec<Complex64> = h.iter().zip(delta.iter()).map(|(a, d)| a + d).collect();
            let ft = equations(x, &trial, target)?;
            let rt = residual_norm(&ft, scale);
            if rt <= r {
                h = trial;
                f = ft;
                r = rt;
            }
        }
    }
    Ok((h, r))
}

/// Outcome of the classical solve in one sector.
#[derive(Clone, Debug, Serialize)]
pub struct ClassicalResult {
    pub tuples: Vec<SpectrumTuple>,
    /// Seeds that did not converge, with the reason.
    pub failures: Vec<String>,
    /// Count or imaginary-part anomalies.
    pub anomalies: Vec<String>,
}

type Attempt = (usize, Result<(Vec<Complex64>, f64)>);

/// Seeds: for each assignment `a` of colours to sites with the sector's
/// multiplicities, `H_i = k_{a_i} + sum_{j != i, a_j = a_i} 1/(x_i - x_j)`.
pub fn assignment_seeds(model: &GaudinModel, sector: &SectorLabel) -> Vec<Vec<Complex64>> {
    let (rank, n) = (model.rank(), model.sites());
    let x = model.positions();
    sector
        .basis()
        .into_iter()
        .map(|idx| {
            let a = decode(idx, rank, n);
            (0..n)
                .map(|i| {
                    let mut v = model.twist()[a[i]].clone();
                    for j in 0..n {
                        if j != i && a[j] == a[i] {
                            v += (&x[i] - &x[j]).recip();
                        }
                    }
                    v.to_c64()
                })
                .collect()
        })
        .collect()
}

/// Solves the classical system by Newton multistart from
/// [`assignment_seeds`]; if fewer than `dim` distinct solutions are found,
/// further seeds are drawn around the assignment seeds from `seed`.
pub fn classical_spectrum(model: &GaudinModel, sector: &SectorLabel, seed: u64) -> Result<ClassicalResult> {
    check_sector(model, sector)?;
    let x: Vec<Complex64> = model.positions().iter().map(|v| v.to_c64()).collect();
    let target = target_poly(model, sector);
    let scale = target.coeffs().iter().map(|c| c.norm()).fold(1.0, f64::max);
    let dim = sector.dimension();
    let counts = sector.counts().to_vec();
    let primary = assignment_seeds(model, sector);
    let mut solutions: Vec<(Vec<Complex64>, f64)> = Vec::new();
    let mut failures = Vec::new();
    let mut absorb = |results: Vec<Attempt>,
                      solutions: &mut Vec<(Vec<Complex64>, f64)>,
                      label: &str| {
        for (i, r) in results {
            match r {
                Ok((h, res)) => {
                    let dup = solutions
                        .iter()
                        .any(|(s, _)| s.iter().zip(&h).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) < MERGE_DISTANCE);
                    if !dup {
                        solutions.push((h, res));
                    }
                }
                Err(e) => failures.push(format!("{label} seed {i}: {e}")),
            }
        }
    };
    let results: Vec<_> =
        primary.par_iter().enumerate().map(|(i, s)| (i, newton(&x, s.clone(), &target, scale))).collect();
    absorb(results, &mut solutions, "assignment");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut round = 0;
    while solutions.len() < dim && round < 8 {
        let spread = 0.25 * (round + 1) as f64;
        let extra: Vec<Vec<Complex64>> = primary
            .iter()
            .map(|s| {
                s.iter()
                    .map(|v| v + Complex64::new(rng.gen_range(-spread..spread), rng.gen_range(-spread..spread) * 0.1))
                    .collect()
            })
            .collect();
        let results: Vec<_> =
            extra.par_iter().enumerate().map(|(i, s)| (i, newton(&x, s.clone(), &target, scale))).collect();
        absorb(results, &mut solutions, &format!("round {round}"));
        round += 1;
    }
    let mut anomalies = Vec::new();
    if solutions.len() != dim {
        anomalies.push(format!("{} solutions for sector dimension {dim}", solutions.len()));
    }
    let mut tuples: Vec<SpectrumTuple> = solutions
        .into_iter()
        .map(|(values, residual)| SpectrumTuple { sector: counts.clone(), values, source: Source::Classical, residual })
        .collect();
    tuples.sort_by(|a, b| {
        a.values
            .iter()
            .zip(&b.values)
            .map(|(p, q)| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    for (i, t) in tuples.iter().enumerate() {
        if t.max_imaginary() > IMAGINARY_FLAG {
            anomalies.push(format!("solution {i} has imaginary part {:.3e}", t.max_imaginary()));
        }
    }
    Ok(ClassicalResult { tuples, failures, anomalies })
}

/// Optimal one-to-one matching of two tuple lists.
#[derive(Clone, Debug, Serialize)]
pub struct MatchReport {
    /// `(direct index, classical index, distance)`.
    pub pairs: Vec<(usize, usize, f64)>,
    pub max_deviation: f64,
    pub unmatched_direct: Vec<usize>,
    pub unmatched_classical: Vec<usize>,
    pub tolerance: f64,
    pub passed: bool,
}

const BRUTE_FORCE_LIMIT: usize = 8;

/// Bottleneck matching: minimizes the largest matched distance (ties broken
/// by the total distance). Exhaustive up to eight tuples, greedy beyond.
pub fn match_spectra(direct: &[SpectrumTuple], classical: &[SpectrumTuple], tol: f64) -> MatchReport {
    let (nd, nc) = (direct.len(), classical.len());
    let dist: Vec<Vec<f64>> = direct.iter().map(|d| classical.iter().map(|c| d.distance(c)).collect()).collect();
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    if nd == nc && nd <= BRUTE_FORCE_LIMIT && nd > 0 {
        let mut best: Option<(f64, f64, Vec<usize>)> = None;
        for p in Permutation::all(nd) {
            let img = p.images();
            let (mut mx, mut total) = (0.0f64, 0.0);
            for (i, &j) in img.iter().enumerate() {
                mx = mx.max(dist[i][j]);
                total += dist[i][j];
            }
            let better = match &best {
                None => true,
                Some((bm, bt, _)) => mx < *bm || (mx == *bm && total < *bt),
            };
            if better {
                best = Some((mx, total, img.to_vec()));
            }
        }
        let (_, _, img) = best.expect("nonempty");
        pairs = img.iter().enumerate().map(|(i, &j)| (i, j, dist[i][j])).collect();
    } else {
        let mut cand: Vec<(f64, usize, usize)> =
            (0..nd).flat_map(|i| (0..nc).map(move |j| (i, j))).map(|(i, j)| (dist[i][j], i, j)).collect();
        cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let (mut ud, mut uc) = (vec![false; nd], vec![false; nc]);
        for (d, i, j) in cand {
            if !ud[i] && !uc[j] {
                ud[i] = true;
                uc[j] = true;
                pairs.push((i, j, d));
            }
        }
        pairs.sort_by_key(|p| p.0);
    }
    let unmatched_direct: Vec<usize> = (0..nd).filter(|i| !pairs.iter().any(|p| p.0 == *i)).collect();
    let unmatched_classical: Vec<usize> = (0..nc).filter(|j| !pairs.iter().any(|p| p.1 == *j)).collect();
    let max_deviation = pairs.iter().map(|p| p.2).fold(0.0, f64::max);
    let passed = nd > 0 && nd == nc && max_deviation <= tol;
    MatchReport { pairs, max_deviation, unmatched_direct, unmatched_classical, tolerance: tol, passed }
}

/// `max_j |tr Y0^j - sum_a m_a k_a^j|` over `j = 1..n`, for `Y0` built
/// from the tuple.
pub fn moment_residual(model: &GaudinModel, tuple: &SpectrumTuple) -> Result<f64> {
    let x: Vec<Complex64> = model.positions().iter().map(|v| v.to_c64()).collect();
    let y = CMPhase::from_hamiltonians(x, &tuple.values)?.lax()?.y;
    let traces = crate::calogero::lax_traces(&y, model.sites());
    let mut worst = 0.0f64;
    for (j, tr) in traces.iter().enumerate().skip(1) {
        let expect = model
            .twist()
            .iter()
            .zip(&tuple.sector)
            .fold(Complex64::new(0.0, 0.0), |a, (k, &m)| a + k.to_c64().powu(j as u32) * m as f64);
        worst = worst.max((tr - expect).norm());
    }
    Ok(worst)
}

/// Both pipelines and their matching for one sector.
#[derive(Clone, Debug, Serialize)]
pub struct SpectrumTable {
    pub sector: Vec<usize>,
    pub dimension: usize,
    pub direct: Vec<SpectrumTuple>,
    pub classical: Vec<SpectrumTuple>,
    pub matching: MatchReport,
    pub moment_residual: f64,
    pub redraws: usize,
    pub fallback: bool,
    pub failures: Vec<String>,
    pub anomalies: Vec<String>,
}

impl SpectrumTable {
    pub fn passed(&self, moment_tol: f64) -> bool {
        self.matching.passed && self.classical.len() == self.dimension && self.moment_residual <= moment_tol
    }
}

pub fn spectrum_table(model: &GaudinModel, sector: &SectorLabel, seed: u64, tol: f64) -> Result<SpectrumTable> {
    let direct = direct_eigenstates(model, sector, seed)?;
    let classical = classical_spectrum(model, sector, seed)?;
    let dtuples: Vec<SpectrumTuple> = direct.states.iter().map(|s| s.tuple()).collect();
    let matching = match_spectra(&dtuples, &classical.tuples, tol);
    let mut moment = 0.0f64;
    for t in dtuples.iter().chain(&classical.tuples) {
        moment = moment.max(moment_residual(model, t)?);
    }
    let mut anomalies = classical.anomalies.clone();
    if direct.unresolved > 0 {
        anomalies.push(format!("{} degenerate clusters left unresolved", direct.unresolved));
    }
    Ok(SpectrumTable {
        sector: sector.counts().to_vec(),
        dimension: sector.dimension(),
        direct: dtuples,
        classical: classical.tuples,
        matching,
        moment_residual: moment,
        redraws: direct.redraws,
        fallback: direct.fallback,
        failures: classical.failures,
        anomalies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn model(n: usize) -> GaudinModel {
        let x = [qi(0), qi(1), q(5, 2), q(-3, 2)];
        GaudinModel::new(2, vec![qi(2), qi(-1)], x[..n].to_vec()).unwrap()
    }

    #[test]
    fn single_site() {
        let m = model(1);
        for (a, k) in [(0, 2.0), (1, -1.0)] {
            let mut c = vec![0, 0];
            c[a] = 1;
            let s = SectorLabel::new(c, 1).unwrap();
            let d = direct_spectrum(&m, &s, 0).unwrap();
            assert_eq!(d.len(), 1);
            assert!((d[0].values[0].re - k).abs() < 1e-12);
            let cl = classical_spectrum(&m, &s, 0).unwrap();
            assert!((cl.tuples[0].values[0] - Complex64::new(k, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn two_sites_closed_form() {
        let m = model(2);
        let s = SectorLabel::new(vec![1, 1], 2).unwrap();
        // H1 + H2 = 1, H1 H2 = -2 - 1
        let r = 13f64.sqrt();
        let roots = [(1.0 - r) / 2.0, (1.0 + r) / 2.0];
        let d = direct_spectrum(&m, &s, 3).unwrap();
        let c = classical_spectrum(&m, &s, 3).unwrap();
        assert_eq!(c.tuples.len(), 2);
        for t in d.iter().chain(&c.tuples) {
            let (h1, h2) = (t.values[0].re, t.values[1].re);
            assert!((h1 + h2 - 1.0).abs() < 1e-10);
            assert!(roots.iter().any(|v| (v - h1).abs() < 1e-10));
        }
        assert!(match_spectra(&d, &c.tuples, 1e-9).passed);
    }

    #[test]
    fn uniform_sector_is_exact() {
        let m = model(3);
        let e = uniform_eigenstate(&m, 1).unwrap();
        let s = SectorLabel::new(vec![0, 3], 3).unwrap();
        let c = classical_spectrum(&m, &s, 0).unwrap();
        assert_eq!(c.tuples.len(), 1);
        for (a, b) in c.tuples[0].values.iter().zip(&e.h) {
            assert!((a - b.to_c64()).norm() < 1e-10);
        }
    }

    #[test]
    fn perturbed_list_reports_displacement() {
        let m = model(3);
        let s = SectorLabel::new(vec![2, 1], 3).unwrap();
        let d = direct_spectrum(&m, &s, 1).unwrap();
        let mut shifted = d.clone();
        for t in &mut shifted {
            t.values[0] += 1e-3;
        }
        let r = match_spectra(&d, &shifted, 1e-9);
        assert!((r.max_deviation - 1e-3).abs() < 1e-12);
        assert!(!r.passed);
        assert_eq!(match_spectra(&d, &d, 1e-9).max_deviation, 0.0);
    }

    #[test]
    fn cardinality_mismatch_fails() {
        let m = model(3);
        let s = SectorLabel::new(vec![2, 1], 3).unwrap();
        let d = direct_spectrum(&m, &s, 1).unwrap();
        let r = match_spectra(&d, &d[..2], 1e-9);
        assert!(!r.passed);
        assert_eq!(r.unmatched_direct.len(), 1);
    }
}
