//! The rational Calogero-Moser system.
//!
//! With positions `x_i` and momenta `p_i`,
//!
//! ```text
//! Y_ik = -p_i delta_ik - (1 - delta_ik) / (x_i - x_k)
//! T_ik = -delta_ik sum_{j != i} 2 / (x_i - x_j)^2 + 2 (1 - delta_ik) / (x_i - x_k)^2
//! ```
//!
//! The `k`-th flow is generated by `tr Y^k`. The zeros of an eigenvalue of
//! the master T-operator move according to these flows with `p_i = -H_i`.

pub mod ba;
pub mod checks;
pub mod dynamics;
pub mod flow;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::poly::UPoly;
use crate::scalar::Ring;

pub use ba::{ba_cc1, ba_determinant, ba_quantum, residue_velocity, tau_det, BaValues};
pub use dynamics::{track_roots, zero_dynamics, Trajectory, ZeroDynamics};
pub use flow::{flow, integrate, FlowReport};

/// Phase-space point `(x, p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CMPhase<R> {
    pub x: Vec<R>,
    pub p: Vec<R>,
}

/// `X = diag(x)`, the Lax matrix `Y` and its partner `T`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaxData<R> {
    pub x: Matrix<R>,
    pub y: Matrix<R>,
    pub t: Matrix<R>,
}

impl<R: Ring> CMPhase<R> {
    pub fn new(x: Vec<R>, p: Vec<R>) -> Result<Self> {
        if x.len() != p.len() {
            return Err(Error::ShapeMismatch(format!("{} positions, {} momenta", x.len(), p.len())));
        }
        Ok(CMPhase { x, p })
    }

    /// Phase point with `p_i = -H_i`.
    pub fn from_hamiltonians(x: Vec<R>, h: &[R]) -> Result<Self> {
        CMPhase::new(x, h.iter().map(|v| -v.clone()).collect())
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn inv_diff(&self, i: usize, k: usize) -> Result<R> {
        (self.x[i].clone() - self.x[k].clone())
            .try_inv()
            .ok_or_else(|| Error::CoincidentPositions(format!("x_{i} = x_{k}")))
    }

    pub fn lax(&self) -> Result<LaxData<R>> {
        let n = self.len();
        let mut y = Matrix::zeros(n, n);
        let mut t = Matrix::zeros(n, n);
        for i in 0..n {
            y.set(i, i, -self.p[i].clone());
            let mut diag = R::zero();
            for k in 0..n {
                if k == i {
                    continue;
                }
                let inv = self.inv_diff(i, k)?;
                let sq = inv.clone() * inv.clone();
                y.set(i, k, -inv);
                t.set(i, k, sq.clone() + sq.clone());
                diag = diag - sq.clone() - sq;
            }
            t.set(i, i, diag);
        }
        Ok(LaxData { x: Matrix::diagonal(&self.x), y, t })
    }

    /// `dY/dx_i` entrywise.
    pub fn dy_dx(&self, i: usize) -> Result<Matrix<R>> {
        let n = self.len();
        let mut d = Matrix::zeros(n, n);
        for k in 0..n {
            if k == i {
                continue;
            }
            let inv = self.inv_diff(i, k)?;
            let sq = inv.clone() * inv;
            d.set(i, k, sq.clone());
            d.set(k, i, -sq);
        }
        Ok(d)
    }
}

/// `sum over matchings M of prod_{(i,j) in M} w / (x_i - x_j)^2 prod_{l uncovered} (z - r_l)`,
/// as a polynomial in `z` (increasing degree). With `r = -p` and `w = 1`
/// this is `det(z - Y)`; with `r = H` it is the left side of the spectral
/// equations. Sites in `skip` are left out.
pub fn matching_poly<R: Ring>(x: &[R], r: &[R], skip: Option<usize>) -> Result<UPoly<R>> {
    let n = x.len();
    let mut covered = vec![false; n];
    if let Some(s) = skip {
        covered[s] = true;
    }
    fn rec<R: Ring>(x: &[R], r: &[R], covered: &mut [bool]) -> Result<UPoly<R>> {
        let Some(i) = covered.iter().position(|c| !c) else {
            return Ok(UPoly::constant(R::one()));
        };
        covered[i] = true;
        let mut acc = rec(x, r, covered)? * UPoly::linear(r[i].clone());
        for j in (i + 1)..x.len() {
            if covered[j] {
                continue;
            }
            covered[j] = true;
            let inv = (x[i].clone() - x[j].clone())
                .try_inv()
                .ok_or_else(|| Error::CoincidentPositions(format!("x_{i} = x_{j}")))?;
            acc = acc + rec(x, r, covered)?.map(|c| c.clone() * inv.clone() * inv.clone());
            covered[j] = false;
        }
        covered[i] = false;
        Ok(acc)
    }
    rec(x, r, &mut covered)
}

/// Coefficients `J_0..J_n` of `det(z - Y) = sum_k J_k z^{n-k}` from the
/// matching sum.
pub fn char_poly<R: Ring>(phase: &CMPhase<R>) -> Result<Vec<R>> {
    let r: Vec<R> = phase.p.iter().map(|v| -v.clone()).collect();
    let poly = matching_poly(&phase.x, &r, None)?;
    let n = phase.len();
    Ok((0..=n).map(|k| poly.coeff(n - k)).collect())
}

/// `tr Y^k`, `k = 0..=kmax` (`tr Y^0 = n`).
pub fn lax_traces<R: Ring>(y: &Matrix<R>, kmax: usize) -> Vec<R> {
    let n = y.rows();
    let mut out = Vec::with_capacity(kmax + 1);
    let mut p = Matrix::identity(n);
    for k in 0..=kmax {
        if k > 0 {
            p = &p * y;
        }
        out.push(p.trace());
    }
    out
}

/// `1^t Y^k 1`, `k = 0..=kmax`.
pub fn lax_sandwich<R: Ring>(y: &Matrix<R>, kmax: usize) -> Vec<R> {
    let n = y.rows();
    let mut v = vec![R::one(); n];
    let mut out = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        if k > 0 {
            v = y.mul_vec(&v);
        }
        out.push(v.iter().fold(R::zero(), |a, b| a + b.clone()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi, Rational};

    fn phase() -> CMPhase<Rational> {
        CMPhase::new(vec![qi(0), q(3, 2), q(-2, 5), q(7, 3)], vec![q(1, 3), qi(-2), q(5, 4), q(1, 7)]).unwrap()
    }

    #[test]
    fn single_particle() {
        let p = CMPhase::new(vec![qi(3)], vec![q(1, 2)]).unwrap();
        let l = p.lax().unwrap();
        assert_eq!(l.y.get(0, 0), &q(-1, 2));
        assert!(l.t.is_zero());
        assert_eq!(char_poly(&p).unwrap(), vec![qi(1), q(1, 2)]);
    }

    #[test]
    fn two_particles_single_matching() {
        let p = CMPhase::new(vec![qi(0), qi(2)], vec![qi(1), qi(3)]).unwrap();
        // (z + 1)(z + 3) + 1/4
        assert_eq!(char_poly(&p).unwrap(), vec![qi(1), qi(4), qi(3) + q(1, 4)]);
    }

    #[test]
    fn commutation_relation_and_sandwich() {
        let l = phase().lax().unwrap();
        let n = 4;
        let ones = Matrix::from_fn(n, n, |_, _| qi(1));
        assert_eq!(l.x.commutator(&l.y), Matrix::identity(n) - ones);
        assert_eq!(lax_traces(&l.y, 5), lax_sandwich(&l.y, 5));
    }

    #[test]
    fn lax_derivatives() {
        let ph = phase();
        let l = ph.lax().unwrap();
        for i in 0..4 {
            let e = Matrix::from_fn(4, 4, |a, b| if a == i && b == i { qi(1) } else { qi(0) });
            let half = (&e * &l.t - &l.t * &e).scale(&q(1, 2));
            assert_eq!(ph.dy_dx(i).unwrap(), half);
        }
    }

    #[test]
    fn matching_sum_is_the_characteristic_polynomial() {
        let ph = phase();
        let l = ph.lax().unwrap();
        assert_eq!(char_poly(&ph).unwrap(), l.y.charpoly());
    }
}
