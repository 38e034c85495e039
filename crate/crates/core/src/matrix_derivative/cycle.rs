//! Closed form of `d^{(x) n} exp(tr phi(h))` as a sum over permutations.
//!
//! ```text
//! d_1 ... d_n exp(tr phi(h)) = sum_sigma P_sigma prod_{cycles c} phi'^{[|c|-1]}(h^(i), i in c) exp(tr phi(h))
//! ```
//!
//! with `phi'^{[m]}` the `m`-th divided difference of `phi'`. Supported
//! potentials are `phi(u) = sum_k t_k u^k - sum_l eps_l log(1 - zeta_l u)`,
//! whose divided differences have closed forms valid for repeated arguments.

use crate::error::{Error, Result};
use crate::matrix_derivative::hfunction::{Evaluated, HFunction};
use crate::scalar::Ring;
use crate::tensor::{decode, encode, Permutation, TensorOperator};

/// Potential `phi(u) = sum_k t_k u^k - sum_l eps_l log(1 - zeta_l u)`.
#[derive(Clone, Debug)]
pub struct Potential<R> {
    pub times: Vec<R>,
    pub points: Vec<(R, i32)>,
}

/// Complete homogeneous symmetric polynomial `h_k(u_0, ..., u_m)`.
fn complete_homogeneous<R: Ring>(k: usize, us: &[R]) -> R {
    // h_k(u_0..u_m) via the recursion over variables
    let mut h = vec![R::zero(); k + 1];
    h[0] = R::one();
    for u in us {
        for d in 1..=k {
            h[d] = h[d].clone() + u.clone() * h[d - 1].clone();
        }
    }
    h[k].clone()
}

impl<R: Ring> Potential<R> {
    /// `phi'^{[m]}(u_0, ..., u_m)` with `m = us.len() - 1`.
    pub fn divided_derivative(&self, us: &[R]) -> Result<R> {
        let m = us.len() - 1;
        let mut acc = R::zero();
        // phi' = sum_k k t_k u^{k-1}; [m] of u^{k-1} is h_{k-1-m}
        for (idx, t) in self.times.iter().enumerate() {
            let k = idx + 1;
            if k < m + 1 || t.is_zero() {
                continue;
            }
            acc = acc + t.clone() * R::from_int(k as i64) * complete_homogeneous(k - 1 - m, us);
        }
        // phi' += eps zeta/(1 - zeta u); [m] is eps zeta^{m+1} / prod (1 - zeta u_i)
        for (zeta, eps) in &self.points {
            let mut v = R::from_int(*eps as i64) * zeta.pow((m + 1) as u32);
            for u in us {
                let den = R::one() - zeta.clone() * u.clone();
                v = v * den.try_inv().ok_or_else(|| Error::Pole("1 - zeta u vanishes".into()))?;
            }
            acc = acc + v;
        }
        Ok(acc)
    }

    /// `tr phi(h)` split into its polynomial part (returned as log scale) and
    /// the algebraic determinant factor.
    fn tag(&self, twist: &[R]) -> Result<(R, R)> {
        let mut log_scale = R::zero();
        for (idx, t) in self.times.iter().enumerate() {
            let pk = twist.iter().fold(R::zero(), |acc, x| acc + x.pow((idx + 1) as u32));
            log_scale = log_scale + t.clone() * pk;
        }
        let mut factor = R::one();
        for (zeta, eps) in &self.points {
            for x in twist {
                let base = R::one() - zeta.clone() * x.clone();
                factor = factor
                    * if *eps >= 0 {
                        base.try_inv().ok_or_else(|| Error::Pole("det(1 - zeta h) vanishes".into()))?.pow(*eps as u32)
                    } else {
                        base.pow((-eps) as u32)
                    };
            }
        }
        Ok((log_scale, factor))
    }
}

/// The permutation sum evaluated at `h = diag(twist)` on `sites` slots.
pub fn cycle_sum<R: Ring>(phi: &Potential<R>, twist: &[R], sites: usize) -> Result<Evaluated<R>> {
    let rank = twist.len();
    let (log_scale, factor) = phi.tag(twist)?;
    let mut op = TensorOperator::zero(rank, sites);
    let dim = op.dim();
    for sigma in Permutation::all(sites) {
        let cycles = sigma.cycles();
        for col in 0..dim {
            let a = decode(col, rank, sites);
            let mut v = factor.clone();
            for c in &cycles {
                let us: Vec<R> = c.iter().map(|&i| twist[a[i]].clone()).collect();
                v = v * phi.divided_derivative(&us)?;
                if v.is_zero() {
                    break;
                }
            }
            if v.is_zero() {
                continue;
            }
            let b: Vec<usize> = (0..sites).map(|i| a[sigma.apply(i)]).collect();
            op.add_at(encode(&b, rank), col, v);
        }
    }
    Ok(Evaluated { op, log_scale })
}

/// `Q(z, zeta) = (z - zeta)^{-1} d^{(x) n} (w(z)/w(zeta))`, `w(z) = det(1 - z h)^{-1}`,
/// through the structured derivative.
pub fn q_operator<R: Ring>(twist: &[R], sites: usize, z: &R, zeta: &R) -> Result<TensorOperator<R>> {
    let f = HFunction::exponential(twist.len(), sites, 0, &[1, -1]);
    let slots: Vec<usize> = (0..sites).collect();
    let e = f.derive_chain(&slots)?.evaluate(twist, &[], &[z.clone(), zeta.clone()])?;
    let inv = (z.clone() - zeta.clone()).try_inv().ok_or_else(|| Error::Pole("z = zeta".into()))?;
    Ok(e.op.scale(&inv))
}

/// `Q(z, zeta)` through the permutation sum.
pub fn q_operator_cycle<R: Ring>(twist: &[R], sites: usize, z: &R, zeta: &R) -> Result<TensorOperator<R>> {
    let phi = Potential { times: Vec::new(), points: vec![(z.clone(), 1), (zeta.clone(), -1)] };
    let e = cycle_sum(&phi, twist, sites)?;
    let inv = (z.clone() - zeta.clone()).try_inv().ok_or_else(|| Error::Pole("z = zeta".into()))?;
    Ok(e.op.scale(&inv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi, Rational};

    #[test]
    fn complete_homogeneous_small() {
        let us = vec![qi(2), qi(3)];
        assert_eq!(complete_homogeneous(2, &us), qi(4 + 6 + 9));
        assert_eq!(complete_homogeneous(0, &us), qi(1));
    }

    #[test]
    fn cycle_sum_matches_structured_route_for_exponential() {
        let twist = vec![q(1, 2), q(-2, 3)];
        let times = vec![q(1, 3), q(2, 5), q(-1, 4)];
        let phi = Potential { times: times.clone(), points: vec![(q(1, 7), 1)] };
        for sites in 1..=3 {
            let closed = cycle_sum(&phi, &twist, sites).unwrap();
            let f = HFunction::exponential(2, sites, 3, &[1]);
            let slots: Vec<usize> = (0..sites).collect();
            let e = f.derive_chain(&slots).unwrap().evaluate(&twist, &times, &[q(1, 7)]).unwrap();
            assert_eq!(closed, e, "sites = {sites}");
        }
    }

    #[test]
    fn q_routes_agree() {
        let twist = vec![q(1, 3), q(3, 2)];
        let (z, zeta) = (q(1, 5), q(-2, 7));
        for sites in 1..=3 {
            let a: TensorOperator<Rational> = q_operator(&twist, sites, &z, &zeta).unwrap();
            let b = q_operator_cycle(&twist, sites, &z, &zeta).unwrap();
            assert_eq!(a, b);
        }
    }
}
