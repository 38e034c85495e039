//! Young diagrams, symmetric functions and gl(N) characters.
//!
//! - [`Partition`]: validated Young diagram with conjugation, Frobenius
//!   coordinates, containment and enumeration
//! - [`complete_sym`], [`elementary_sym`]: `h_k(t)`, `e_k(t)` from
//!   `exp(sum t_k z^k)`
//! - [`schur_jt`], [`schur_dual_jt`]: Schur functions via the two
//!   Jacobi-Trudi determinants
//! - [`character`], [`character_bialternant`], [`character_power_sum_poly`]:
//!   gl(N) characters at a diagonal group element
//! - [`char_shift_coeffs`], [`hook_shift_coeffs`]: expansion of
//!   `chi_lambda(g - 1)` in characters of `g`
//! - [`hook_generating_function`]: closed form of the hook generating function

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::MPoly;
use crate::scalar::{binomial, q, qi, Rational, Ring};

/// A Young diagram `lambda_1 >= lambda_2 >= ... > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub struct Partition(Vec<usize>);

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Partition {
    /// Validates a weakly decreasing list; trailing zeros are dropped.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition(format!("{parts:?} is not non-increasing")));
        }
        let parts: Vec<usize> = parts.into_iter().filter(|&p| p > 0).collect();
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    /// The hook `(alpha + 1, 1^beta)`.
    pub fn hook(alpha: usize, beta: usize) -> Self {
        let mut v = vec![alpha + 1];
        v.extend(std::iter::repeat_n(1, beta));
        Partition(v)
    }

    /// The single row `(k)`; empty for `k = 0`.
    pub fn row(k: usize) -> Self {
        Partition::new(vec![k]).expect("single row")
    }

    /// The single column `(1^k)`.
    pub fn column(k: usize) -> Self {
        Partition(vec![1; k])
    }

    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    /// `lambda_i` with 0-based `i`; zero past the length.
    pub fn part(&self, i: usize) -> usize {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn weight(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn length(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let first = self.part(0);
        Partition((0..first).map(|j| self.0.iter().filter(|&&p| p > j).count()).collect())
    }

    /// Number of diagonal boxes.
    pub fn durfee(&self) -> usize {
        self.0.iter().enumerate().filter(|(i, &p)| p > *i).count()
    }

    /// Frobenius coordinates `(alpha_i, beta_i) = (lambda_i - i, lambda'_i - i)`
    /// with 1-based `i` up to the Durfee size.
    pub fn frobenius(&self) -> (Vec<usize>, Vec<usize>) {
        let d = self.durfee();
        let c = self.conjugate();
        let a = (0..d).map(|i| self.part(i) - i - 1).collect();
        let b = (0..d).map(|i| c.part(i) - i - 1).collect();
        (a, b)
    }

    /// Inverse of [`Partition::frobenius`]; both lists must be strictly decreasing.
    pub fn from_frobenius(alphas: &[usize], betas: &[usize]) -> Result<Partition> {
        if alphas.len() != betas.len() {
            return Err(Error::InvalidPartition("Frobenius lists of different length".into()));
        }
        if alphas.windows(2).any(|w| w[0] <= w[1]) || betas.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::InvalidPartition("Frobenius lists must be strictly decreasing".into()));
        }
        let d = alphas.len();
        let len = if d == 0 { 0 } else { betas[0] + 1 };
        let parts = (0..len)
            .map(|i| if i < d { alphas[i] + i + 1 } else { (0..d).filter(|&j| betas[j] + j >= i).count() })
            .collect();
        Partition::new(parts)
    }

    pub fn contains(&self, mu: &Partition) -> bool {
        mu.length() <= self.length() && mu.0.iter().enumerate().all(|(i, &m)| m <= self.part(i))
    }

    /// All partitions of `k`, in reverse lexicographic order.
    pub fn all_of_weight(k: usize) -> Vec<Partition> {
        fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if rem == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=rem.min(max)).rev() {
                cur.push(p);
                rec(rem - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(k, k, &mut Vec::new(), &mut out);
        out
    }

    /// All partitions of weight at most `k`, including the empty one.
    pub fn all_up_to(k: usize) -> Vec<Partition> {
        (0..=k).flat_map(Partition::all_of_weight).collect()
    }

    /// All diagrams contained in `self`, including the empty one and `self`.
    pub fn subdiagrams(&self) -> Vec<Partition> {
        fn rec(lam: &Partition, i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if i == lam.length() {
                out.push(Partition::new(cur.clone()).expect("valid"));
                return;
            }
            for p in 0..=lam.part(i).min(max) {
                cur.push(p);
                rec(lam, i + 1, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(self, 0, usize::MAX, &mut Vec::new(), &mut out);
        out
    }
}

/// `h_k(t)`: coefficients of `exp(sum_j t_j z^j)`; `t[0]` is `t_1`.
///
/// Uses `k h_k = sum_{m=1}^k m t_m h_{k-m}`. Negative `k` gives zero.
pub fn complete_sym<R: Ring>(k: i64, t: &[R]) -> R {
    complete_sym_table(k.max(0) as usize, t).pop().filter(|_| k >= 0).unwrap_or_else(R::zero)
}

/// `[h_0, ..., h_k]` for the given times.
pub fn complete_sym_table<R: Ring>(k: usize, t: &[R]) -> Vec<R> {
    let mut h = vec![R::one()];
    for j in 1..=k {
        let mut s = R::zero();
        for m in 1..=j {
            if m <= t.len() && !t[m - 1].is_zero() {
                s = s + t[m - 1].clone() * h[j - m].clone() * R::from_int(m as i64);
            }
        }
        h.push(s.scale_q(&q(1, j as i64)));
    }
    h
}

/// `e_k(t) = (-1)^k h_k(-t)`.
pub fn elementary_sym<R: Ring>(k: i64, t: &[R]) -> R {
    let neg: Vec<R> = t.iter().map(|x| -x.clone()).collect();
    let h = complete_sym(k, &neg);
    if k % 2 == 0 {
        h
    } else {
        -h
    }
}

/// `s_lambda(t) = det h_{lambda_i - i + j}(t)`.
pub fn schur_jt<R: Ring>(lambda: &Partition, t: &[R]) -> R {
    let l = lambda.length();
    if l == 0 {
        return R::one();
    }
    let h = complete_sym_table(lambda.part(0) + l, t);
    let m = Matrix::from_fn(l, l, |i, j| {
        let idx = lambda.part(i) as i64 - i as i64 + j as i64;
        if idx < 0 {
            R::zero()
        } else {
            h[idx as usize].clone()
        }
    });
    m.det()
}

/// `s_lambda(t) = det e_{lambda'_i - i + j}(t)`.
pub fn schur_dual_jt<R: Ring>(lambda: &Partition, t: &[R]) -> R {
    let c = lambda.conjugate();
    let l = c.length();
    if l == 0 {
        return R::one();
    }
    let m = Matrix::from_fn(l, l, |i, j| elementary_sym(c.part(i) as i64 - i as i64 + j as i64, t));
    m.det()
}

/// Times `y_k = tr g^k / k` of a diagonal matrix with the given eigenvalues.
pub fn power_sum_times<R: Ring>(eigs: &[R], kmax: usize) -> Vec<R> {
    (1..=kmax)
        .map(|k| {
            let pk = eigs.iter().fold(R::zero(), |acc, x| acc + x.pow(k as u32));
            pk.scale_q(&q(1, k as i64))
        })
        .collect()
}

/// `chi_lambda(g)` at `g = diag(eigs)` via Jacobi-Trudi in the power sums.
pub fn character<R: Ring>(lambda: &Partition, eigs: &[R]) -> R {
    if lambda.length() > eigs.len() {
        return R::zero();
    }
    let kmax = lambda.part(0) + lambda.length();
    schur_jt(lambda, &power_sum_times(eigs, kmax))
}

/// Bialternant formula `det(x_j^{lambda_i + N - i}) / det(x_j^{N - i})`;
/// `None` when eigenvalues repeat.
pub fn character_bialternant(lambda: &Partition, eigs: &[Rational]) -> Option<Rational> {
    let n = eigs.len();
    if lambda.length() > n {
        return Some(qi(0));
    }
    let num = Matrix::from_fn(n, n, |i, j| Ring::pow(&eigs[j], (lambda.part(i) + n - 1 - i) as u32));
    let den = Matrix::from_fn(n, n, |i, j| Ring::pow(&eigs[j], (n - 1 - i) as u32));
    let d = den.det();
    d.try_inv().map(|inv| num.det() * inv)
}

/// `chi_lambda` as a polynomial in the power sums: variable `k - 1` is `tr g^k`.
pub fn character_power_sum_poly(lambda: &Partition) -> MPoly {
    let kmax = lambda.part(0) + lambda.length();
    let t: Vec<MPoly> = (1..=kmax).map(|k| MPoly::var(k - 1).scale(&q(1, k as i64))).collect();
    schur_jt(lambda, &t)
}

/// Coefficients `c_{lambda mu}` in `chi_lambda(g - 1) = sum_mu c_{lambda mu} chi_mu(g)`
/// for gl(N); only diagrams with at most `N` rows appear.
pub fn char_shift_coeffs(lambda: &Partition, n: usize) -> BTreeMap<Partition, Rational> {
    let mut out = BTreeMap::new();
    if lambda.length() > n {
        return out;
    }
    for mu in lambda.subdiagrams() {
        if mu.length() > n {
            continue;
        }
        let m = Matrix::from_fn(n, n, |i, j| {
            binomial((lambda.part(i) + n - 1 - i) as i64, (mu.part(j) + n - 1 - j) as i64)
        });
        let sign = if (lambda.weight() - mu.weight()).is_multiple_of(2) { qi(1) } else { qi(-1) };
        let c = m.det() * sign;
        if !Ring::is_zero(&c) {
            out.insert(mu, c);
        }
    }
    out
}

/// Hook expansion of `chi_{alpha,beta}(g - 1)`: returns the coefficients of
/// `chi_{alpha',beta'}(g)` keyed by `(alpha', beta')` and the constant term.
pub fn hook_shift_coeffs(alpha: usize, beta: usize, n: usize) -> (BTreeMap<(usize, usize), Rational>, Rational) {
    let (a, b, nn) = (alpha as i64, beta as i64, n as i64);
    let mut coeffs = BTreeMap::new();
    for ap in 0..=a {
        for bp in 0..=b {
            let sign = if (a - ap + b - bp) % 2 == 0 { qi(1) } else { qi(-1) };
            let c = sign * binomial(nn + a, nn + ap) * binomial(nn - bp - 1, nn - b - 1);
            if !Ring::is_zero(&c) {
                coeffs.insert((ap as usize, bp as usize), c);
            }
        }
    }
    let mut constant = qi(0);
    for j in 0..=b {
        let sign = if (a + 1 - j) % 2 == 0 { qi(1) } else { qi(-1) };
        constant += sign * binomial(nn + a + b - j, nn - 1) * binomial(nn, j);
    }
    (coeffs, constant)
}

/// Coefficients of Talalaev's one-column combination
/// `sum_l (-1)^{k-l} C(N-l, N-k) T_{(1^l)}`, indexed by `l = 0..=k`.
pub fn talalaev_column_coeffs(k: usize, n: usize) -> Vec<Rational> {
    (0..=k)
        .map(|l| {
            let sign = if (k - l).is_multiple_of(2) { qi(1) } else { qi(-1) };
            sign * binomial(n as i64 - l as i64, n as i64 - k as i64)
        })
        .collect()
}

/// `E(z, zeta) = (w(z)/w(zeta) - 1)/(z - zeta)` with `w(z) = det(1 - z g)^{-1}`.
pub fn hook_generating_function(eigs: &[Rational], z: &Rational, zeta: &Rational) -> Result<Rational> {
    let mut ratio = qi(1);
    for g in eigs {
        let den = qi(1) - z * g;
        let inv = den.try_inv().ok_or_else(|| Error::Pole(format!("1 - z g vanishes at g = {g}")))?;
        ratio = ratio * (qi(1) - zeta * g) * inv;
    }
    let dz = (z - zeta).try_inv().ok_or_else(|| Error::Pole("z = zeta".into()))?;
    Ok((ratio - qi(1)) * dz)
}

/// Truncated double series of the hook generating function:
/// `sum_{alpha,beta <= max} chi_{alpha,beta} z^alpha (-zeta)^beta`.
pub fn hook_series(eigs: &[Rational], z: &Rational, zeta: &Rational, max: usize) -> Rational {
    let mut acc = qi(0);
    for a in 0..=max {
        for b in 0..=max {
            let chi = character(&Partition::hook(a, b), eigs);
            acc += chi * Ring::pow(z, a as u32) * Ring::pow(&-zeta.clone(), b as u32);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn validation_and_basic_shape_data() {
        assert!(Partition::new(vec![1, 2]).is_err());
        assert_eq!(p(&[3, 1, 0]), p(&[3, 1]));
        let l = p(&[4, 2, 2, 1]);
        assert_eq!(l.conjugate(), p(&[4, 3, 1, 1]));
        assert_eq!(l.conjugate().conjugate(), l);
        assert_eq!(l.weight(), 9);
        assert_eq!(l.durfee(), 2);
        assert_eq!(l.frobenius(), (vec![3, 0], vec![3, 1]));
    }

    #[test]
    fn frobenius_roundtrip_for_all_small_diagrams() {
        for lam in Partition::all_up_to(8) {
            let (a, b) = lam.frobenius();
            assert_eq!(Partition::from_frobenius(&a, &b).unwrap(), lam, "{lam}");
        }
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=8).map(|k| Partition::all_of_weight(k).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22]);
        assert_eq!(p(&[2, 1]).subdiagrams().len(), 5);
    }

    #[test]
    fn schur_small_cases_in_power_sums() {
        // s_(2) = (p1^2 + p2)/2, s_(1,1) = (p1^2 - p2)/2 with p_k = k t_k
        let t = vec![q(3, 1), q(5, 2)];
        let p1 = qi(3);
        let p2 = qi(5);
        assert_eq!(schur_jt(&p(&[2]), &t), (&p1 * &p1 + &p2) / qi(2));
        assert_eq!(schur_jt(&p(&[1, 1]), &t), (&p1 * &p1 - &p2) / qi(2));
    }

    #[test]
    fn jacobi_trudi_forms_agree() {
        let t = vec![q(1, 2), q(-2, 3), q(3, 5), q(1, 7), q(-1, 3), q(2, 9), q(1, 4), q(5, 11)];
        for lam in Partition::all_up_to(6) {
            assert_eq!(schur_jt(&lam, &t), schur_dual_jt(&lam, &t), "{lam}");
        }
    }

    #[test]
    fn character_matches_bialternant() {
        let eigs = vec![q(2, 1), q(-1, 3), q(5, 2)];
        for lam in Partition::all_up_to(5) {
            assert_eq!(character(&lam, &eigs), character_bialternant(&lam, &eigs).unwrap(), "{lam}");
        }
        assert_eq!(character(&p(&[1, 1, 1, 1]), &eigs), qi(0));
    }

    #[test]
    fn power_sum_polynomial_of_a_hook() {
        let eigs = vec![q(3, 2), q(-1, 2)];
        let poly = character_power_sum_poly(&p(&[2, 1]));
        let ps: Vec<Rational> = (1..=4).map(|k| eigs.iter().map(|x| Ring::pow(x, k)).sum()).collect();
        assert_eq!(poly.eval(&ps), character(&p(&[2, 1]), &eigs));
        // identically zero on 2x2 matrices after evaluation
        let col = character_power_sum_poly(&p(&[1, 1, 1]));
        assert_eq!(col.eval(&ps), qi(0));
    }

    #[test]
    fn shift_coefficients_reproduce_shifted_character() {
        let eigs = vec![q(3, 1), q(-2, 5), q(7, 3)];
        let shifted: Vec<Rational> = eigs.iter().map(|x| x - qi(1)).collect();
        for lam in Partition::all_up_to(4) {
            let lhs = character(&lam, &shifted);
            let rhs: Rational =
                char_shift_coeffs(&lam, 3).iter().map(|(mu, c)| c * character(mu, &eigs)).sum();
            assert_eq!(lhs, rhs, "{lam}");
        }
    }

    #[test]
    fn talalaev_column_combination_is_the_shift_expansion() {
        for n in 1..=4 {
            for k in 0..=n {
                let coeffs = char_shift_coeffs(&Partition::column(k), n);
                let tal = talalaev_column_coeffs(k, n);
                for (l, c) in tal.iter().enumerate() {
                    let got = coeffs.get(&Partition::column(l)).cloned().unwrap_or_else(|| qi(0));
                    assert_eq!(&got, c, "n={n} k={k} l={l}");
                }
            }
        }
    }

    #[test]
    fn hook_shift_agrees_with_general_expansion() {
        for n in 1..=3 {
            for a in 0..=3 {
                for b in 0..=3 {
                    let (hooks, constant) = hook_shift_coeffs(a, b, n);
                    let general = char_shift_coeffs(&Partition::hook(a, b), n);
                    let c0 = general.get(&Partition::empty()).cloned().unwrap_or_else(|| qi(0));
                    assert_eq!(c0, constant, "n={n} a={a} b={b}");
                    for (mu, c) in &general {
                        if mu.is_empty() {
                            continue;
                        }
                        let (fa, fb) = mu.frobenius();
                        assert_eq!(fa.len(), 1);
                        assert_eq!(hooks.get(&(fa[0], fb[0])), Some(c), "n={n} a={a} b={b} mu={mu}");
                    }
                    for ((ap, bp), c) in &hooks {
                        if Partition::hook(*ap, *bp).length() <= n {
                            assert_eq!(general.get(&Partition::hook(*ap, *bp)), Some(c));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn hook_generating_function_matches_series_and_shift_relation() {
        let eigs = vec![q(1, 3), q(-1, 4)];
        let z = q(1, 50);
        let zeta = q(-1, 70);
        let exact = hook_generating_function(&eigs, &z, &zeta).unwrap();
        let series = hook_series(&eigs, &z, &zeta, 10);
        assert!((rational_abs(&(exact - series))) < q(1, 1_000_000_000_000));

        let n = eigs.len() as i64;
        let z = q(2, 7);
        let zeta = q(-1, 5);
        let shifted: Vec<Rational> = eigs.iter().map(|x| x - qi(1)).collect();
        let lhs = hook_generating_function(&shifted, &z, &zeta).unwrap();
        let zt = &z / (qi(1) + &z);
        let zetat = &zeta / (qi(1) + &zeta);
        let pref = Ring::pow(&(qi(1) + &z), (n + 1) as u32).recip() * Ring::pow(&(qi(1) + &zeta), (n - 1) as u32);
        let minus_one = vec![qi(-1); eigs.len()];
        let rhs = pref * hook_generating_function(&eigs, &zt, &zetat).unwrap()
            + hook_generating_function(&minus_one, &z, &zeta).unwrap();
        assert_eq!(lhs, rhs);
    }

    fn rational_abs(r: &Rational) -> Rational {
        if r < &qi(0) {
            -r.clone()
        } else {
            r.clone()
        }
    }
}
