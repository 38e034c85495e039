//! Seeded parameter sampling and the named verification suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::gaudin::{GaudinModel, MiwaShift, TimeSpec};
use crate::kp_verifier::fay::{check_fay, check_fay_general, check_masterdet, check_sign_flip};
use crate::kp_verifier::identities::{
    check_cbr, check_cbr_leading, check_closed_forms, check_commutativity, check_exchange, check_giambelli,
    check_limit_lemma, check_plucker, check_rank1,
};
use crate::kp_verifier::master::{
    check_derivative_oracle, check_master_commutativity, check_master_diff, check_master_expansion,
    check_master_generating, check_shift_covariance,
};
use crate::kp_verifier::result::CheckResult;
use crate::partitions::Partition;
use crate::scalar::{q, Rational};

/// Names of the identity checks, in report order.
pub const KP_CHECKS: &[&str] = &[
    "cbr",
    "cbr_dual",
    "cbr_leading",
    "closed_forms",
    "commutativity",
    "derivative_oracle",
    "exchange",
    "fay",
    "fay_general",
    "giambelli",
    "limit_lemma",
    "master_commutativity",
    "master_diff",
    "master_expansion",
    "master_generating",
    "masterdet",
    "plucker",
    "rank1",
    "shift_covariance",
    "sign_flip",
];

/// Deterministic source of small rational parameters.
#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// `p/q` with `|p| <= num`, `1 <= q <= den`, not in `avoid`.
    pub fn rational(&mut self, num: i64, den: i64, avoid: &[Rational]) -> Rational {
        loop {
            let p = self.rng.gen_range(-num..=num);
            let d = self.rng.gen_range(1..=den);
            let r = q(p, d);
            if !avoid.contains(&r) {
                return r;
            }
        }
    }

    /// `count` distinct rationals avoiding `avoid`.
    pub fn distinct(&mut self, count: usize, num: i64, den: i64, avoid: &[Rational]) -> Vec<Rational> {
        let mut taken = avoid.to_vec();
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let r = self.rational(num, den, &taken);
            taken.push(r.clone());
            out.push(r);
        }
        out
    }

    pub fn times(&mut self, k: usize) -> Vec<Rational> {
        (0..k).map(|_| self.rational(3, 4, &[])).collect()
    }

    pub fn seed_for(&mut self) -> u64 {
        self.rng.gen()
    }
}

/// Suite parameters.
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub seed: u64,
    pub float: bool,
    /// Number of random parameter sets per check.
    pub samples: usize,
    /// Number of explicit times.
    pub times: usize,
    /// Schur truncation degree.
    pub degree: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: 0, float: false, samples: 5, times: 3, degree: 4 }
    }
}

/// Spectral points to avoid: marked points, zero, and the poles `z = k_a` of
/// `det(1 - h/z)`.
fn forbidden(model: &GaudinModel) -> Vec<Rational> {
    let mut v: Vec<Rational> = model.positions().to_vec();
    v.extend(model.twist().iter().cloned());
    v.push(q(0, 1));
    v
}

fn diagrams(max_weight: usize, rank: usize, filter: impl Fn(&Partition) -> bool) -> Vec<Partition> {
    Partition::all_up_to(max_weight).into_iter().filter(|l| l.length() <= rank && filter(l)).collect()
}

macro_rules! dispatch {
    ($float:expr, $f:ident ( $($arg:expr),* )) => {
        if $float { $f::<f64>($($arg),*) } else { $f::<Rational>($($arg),*) }
    };
}

/// Runs one named check with `samples` parameter sets drawn from `seed`.
pub fn run_check(model: &GaudinModel, name: &str, opts: &SuiteOptions) -> Vec<CheckResult> {
    let seed = opts.seed ^ name.bytes().fold(0xcbf29ce484222325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100000001b3));
    let mut s = Sampler::new(seed);
    let avoid = forbidden(model);
    let rank = model.rank();
    let f = opts.float;
    let mut out = Vec::new();
    match name {
        "commutativity" => {
            let lambdas = diagrams(3, rank, |_| true);
            let points: Vec<(Rational, Rational)> = (0..opts.samples)
                .map(|_| {
                    let p = s.distinct(2, 12, 5, &avoid);
                    (p[0].clone(), p[1].clone())
                })
                .collect();
            out.push(dispatch!(f, check_commutativity(model, &lambdas, &points)));
        }
        "closed_forms" => {
            for _ in 0..opts.samples {
                out.push(check_closed_forms(model, &s.rational(12, 5, &avoid)));
            }
        }
        "limit_lemma" => {
            let small = if model.sites() > 2 {
                model.with_positions(model.positions()[..2].to_vec()).expect("subset of distinct points")
            } else {
                model.clone()
            };
            let lambdas = diagrams(3, rank, |_| true);
            out.push(check_limit_lemma(&small, &lambdas, &s.rational(12, 5, &avoid)));
        }
        "giambelli" => {
            let lambdas = diagrams(6, rank, |l| l.durfee() <= 2);
            for _ in 0..opts.samples.min(2) {
                out.push(dispatch!(f, check_giambelli(model, &lambdas, &s.rational(12, 5, &avoid))));
            }
        }
        "cbr" | "cbr_dual" => {
            let dual = name == "cbr_dual";
            let lambdas = diagrams(5, rank, |l| if dual { l.part(0) <= 2 } else { l.length() <= 2 });
            for _ in 0..opts.samples.min(2) {
                out.push(dispatch!(f, check_cbr(model, &lambdas, &s.rational(12, 5, &avoid), dual)));
            }
        }
        "cbr_leading" => {
            out.push(check_cbr_leading(model, &diagrams(4, rank, |l| l.length() <= 2)));
        }
        "fay" => {
            for _ in 0..opts.samples {
                let x = s.rational(12, 5, &avoid);
                let t = s.times(opts.times);
                let z = s.distinct(4, 12, 5, &avoid);
                let zs: [Rational; 4] = z.try_into().expect("four points");
                out.push(dispatch!(f, check_fay(model, &x, &t, &zs)));
            }
        }
        "fay_general" => {
            for _ in 0..opts.samples {
                let x = s.rational(12, 5, &avoid);
                let t = s.times(opts.times);
                let z = s.distinct(5, 12, 5, &avoid);
                let zs: [Rational; 4] = z[1..].to_vec().try_into().expect("four points");
                out.push(dispatch!(f, check_fay_general(model, &x, &t, &z[..1], &zs)));
            }
        }
        "sign_flip" => {
            for _ in 0..opts.samples {
                let x = s.rational(12, 5, &avoid);
                let t = s.times(opts.times);
                let z = s.distinct(3, 12, 5, &avoid);
                let zs: [Rational; 3] = z.try_into().expect("three points");
                out.push(dispatch!(f, check_sign_flip(model, &x, &t, &zs)));
            }
        }
        "masterdet" => {
            for m in 1..=3 {
                let x = s.rational(12, 5, &avoid);
                let t = s.times(opts.times);
                let z = s.distinct(m, 12, 5, &avoid);
                out.push(dispatch!(f, check_masterdet(model, &x, &t, &z)));
            }
        }
        "rank1" => {
            let x = s.rational(12, 5, &avoid);
            out.push(dispatch!(f, check_rank1(model, &x, &[0, 1, 2, 3], &[0, 1, 2, 3])));
        }
        "exchange" => {
            let quads: Vec<[Rational; 4]> = (0..opts.samples)
                .map(|_| {
                    // z and zeta are arguments of det(1 - z h), so avoid 1/k_a
                    let mut bad: Vec<Rational> =
                        model.twist().iter().filter(|k| **k != q(0, 1)).map(|k| k.recip()).collect();
                    bad.push(q(0, 1));
                    s.distinct(4, 6, 7, &bad).try_into().expect("four points")
                })
                .collect();
            out.push(dispatch!(f, check_exchange(model.twist(), model.sites(), &quads)));
        }
        "plucker" => {
            out.push(dispatch!(f, check_plucker(model, &s.rational(12, 5, &avoid))));
        }
        "master_expansion" => out.push(check_master_expansion(model, opts.degree)),
        "master_generating" => out.push(check_master_generating(model, &s.rational(12, 5, &avoid), 4)),
        "master_diff" => {
            let t = s.times(opts.times);
            let bad: Vec<Rational> = model.twist().iter().filter(|k| **k != q(0, 1)).map(|k| k.recip()).collect();
            out.push(check_master_diff(model, &t, &s.rational(6, 7, &bad)));
        }
        "shift_covariance" => {
            for _ in 0..opts.samples.min(3) {
                let x = s.rational(12, 5, &avoid);
                let sh = s.rational(6, 5, &[]);
                let spec = TimeSpec { times: s.times(opts.times), shifts: vec![MiwaShift::plus(s.rational(12, 5, &avoid))] };
                out.push(dispatch!(f, check_shift_covariance(model, &x, &sh, &spec)));
            }
        }
        "master_commutativity" => {
            let pairs: Vec<_> = (0..opts.samples)
                .map(|_| {
                    let x = s.rational(12, 5, &avoid);
                    let y = s.rational(12, 5, &avoid);
                    let t = TimeSpec { times: s.times(opts.times), shifts: vec![MiwaShift::plus(s.rational(12, 5, &avoid))] };
                    let u = TimeSpec { times: s.times(opts.times), shifts: vec![MiwaShift::minus(s.rational(12, 5, &avoid))] };
                    (x, t, y, u)
                })
                .collect();
            out.push(dispatch!(f, check_master_commutativity(model, &pairs)));
        }
        "derivative_oracle" => {
            let sites = model.sites().min(3);
            let bad: Vec<Rational> = model.twist().iter().filter(|k| **k != q(0, 1)).map(|k| k.recip()).collect();
            let lambdas = diagrams(2, rank, |_| true);
            let t = s.times(2);
            out.push(check_derivative_oracle(rank, sites, model.twist(), &lambdas, &t, &s.rational(6, 7, &bad)));
        }
        other => out.push(CheckResult::failed(other, format!("unknown check {other}"))),
    }
    out
}

/// Runs the named checks in parallel; results are ordered by check name,
/// then by sample.
pub fn run_suite(model: &GaudinModel, names: &[&str], opts: &SuiteOptions) -> Vec<CheckResult> {
    let mut sorted: Vec<&str> = names.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let groups: Vec<Vec<CheckResult>> = sorted.par_iter().map(|n| run_check(model, n, opts)).collect();
    groups.into_iter().flatten().collect()
}
