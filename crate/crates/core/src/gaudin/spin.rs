//! Spin-chain transfer matrices in the group picture and their Gaudin limit.
//!
//! With `g = exp(eta h)` the spin-chain transfer matrix is
//! `T_lambda(x) = (1 + eta D_n/(x - x_n)) ... (1 + eta D_1/(x - x_1)) chi_lambda(g)`
//! and Talalaev's combination replaces `chi_lambda(g)` by `chi_lambda(g - 1)`.
//! Everything is evaluated exactly as a truncated series in `eta`.

use crate::error::{Error, Result};
use crate::gaudin::GaudinModel;
use crate::matrix_derivative::brute::entry_character;
use crate::matrix_derivative::BrutePoly;
use crate::partitions::Partition;
use crate::poly::Jet;
use crate::scalar::{Rational, Ring};
use crate::tensor::TensorOperator;

pub type JetOp = TensorOperator<Jet<Rational>>;

/// Eigenvalues `exp(eta k_a)` of the group element, to `order` terms.
pub fn group_eigenvalues(model: &GaudinModel, order: usize) -> Vec<Jet<Rational>> {
    model.twist().iter().map(|k| Jet::exp_linear(k, order)).collect()
}

/// `prod_i (1 + eta D_i / (x - x_i)) f(g)` at `g = exp(eta h)`, with `D_1`
/// acting first.
pub fn spin_chain_operator(model: &GaudinModel, f: &BrutePoly, x: &Rational, order: usize) -> Result<JetOp> {
    let n = model.sites();
    let g = group_eigenvalues(model, order);
    let mut table: Vec<BrutePoly> = Vec::with_capacity(1 << n);
    table.push(f.clone());
    for mask in 1usize..(1 << n) {
        let top = usize::BITS as usize - 1 - mask.leading_zeros() as usize;
        let next = table[mask & !(1 << top)].co_derive(top)?;
        table.push(next);
    }
    let mut acc = TensorOperator::zero(model.rank(), n);
    for (mask, chain) in table.iter().enumerate() {
        let (op, _) = chain.evaluate(&g)?;
        let mut pref = Rational::one();
        for i in 0..n {
            if mask & (1 << i) != 0 {
                let d = x - &model.positions()[i];
                pref *= d.try_inv().ok_or_else(|| Error::Pole(format!("x = x_{i}")))?;
            }
        }
        let k = mask.count_ones() as usize;
        acc = acc + op.map(|j| j.shift(k).scale_q(&pref));
    }
    Ok(acc)
}

/// Spin-chain transfer matrix for `chi_lambda(g)`.
pub fn spin_t_operator(model: &GaudinModel, lambda: &Partition, x: &Rational, order: usize) -> Result<JetOp> {
    let f = BrutePoly::group(model.rank(), model.sites(), entry_character(model.rank(), lambda));
    spin_chain_operator(model, &f, x, order)
}

/// Talalaev's operator built on `chi_lambda(g - 1)`.
pub fn talalaev_t_operator(model: &GaudinModel, lambda: &Partition, x: &Rational, order: usize) -> Result<JetOp> {
    let f = BrutePoly::shifted_character(model.rank(), model.sites(), lambda);
    spin_chain_operator(model, &f, x, order)
}

/// Coefficient of `eta^k` of a jet-valued operator.
pub fn eta_coefficient(op: &JetOp, k: usize) -> TensorOperator<Rational> {
    op.map(|j| j.coeff(k))
}

/// `eta^{-|lambda|}` limit of Talalaev's operator. Returns the leading
/// coefficient and whether every lower coefficient vanishes.
pub fn gaudin_limit(model: &GaudinModel, lambda: &Partition, x: &Rational) -> Result<(TensorOperator<Rational>, bool)> {
    let m = lambda.weight();
    let op = talalaev_t_operator(model, lambda, x, m + 1)?;
    let lower_vanish = (0..m).all(|k| eta_coefficient(&op, k).is_zero());
    Ok((eta_coefficient(&op, m), lower_vanish))
}

/// `eta^k D_k ... D_1 f(g - 1)` at `g = exp(eta h)` on the first `k` slots
/// of `sites`, for `f = chi_lambda`.
pub fn co_derivative_chain(
    model_rank: usize,
    twist: &[Rational],
    sites: usize,
    lambda: &Partition,
    k: usize,
    order: usize,
) -> Result<JetOp> {
    let f = BrutePoly::shifted_character(model_rank, sites, lambda);
    let slots: Vec<usize> = (0..k).collect();
    let g: Vec<Jet<Rational>> = twist.iter().map(|a| Jet::exp_linear(a, order)).collect();
    let (op, _) = f.co_chain(&slots)?.evaluate(&g)?;
    Ok(op.map(|j| j.shift(k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix_derivative::HFunction;
    use crate::scalar::{q, qi};

    #[test]
    fn lemma_leading_coefficient_is_the_matrix_derivative() {
        let twist = vec![q(3, 2), q(-1, 3)];
        for lam in Partition::all_up_to(3) {
            let m = lam.weight();
            for k in 0..=2 {
                let chain = co_derivative_chain(2, &twist, 2, &lam, k, m + 2).unwrap();
                let slots: Vec<usize> = (0..k).collect();
                let d = HFunction::character(2, 2, &lam).derive_chain(&slots).unwrap();
                let expect = d.evaluate::<Rational>(&twist, &[], &[]).unwrap().op;
                for j in 0..m {
                    assert!(eta_coefficient(&chain, j).is_zero(), "lambda={lam} k={k} j={j}");
                }
                assert_eq!(eta_coefficient(&chain, m), expect, "lambda={lam} k={k}");
            }
        }
    }

    #[test]
    fn spin_chain_first_transfer_matrix_expansion() {
        // T_(1) = N + eta (tr h + sum 1/(x - x_i)) + eta^2 H(x) + ...
        let model = GaudinModel::new(2, vec![qi(2), qi(-1)], vec![qi(0), qi(1)]).unwrap();
        let x = q(7, 3);
        let t = spin_t_operator(&model, &Partition::row(1), &x, 3).unwrap();
        let id = TensorOperator::<Rational>::identity(2, 2);
        assert_eq!(eta_coefficient(&t, 0), id.scale(&qi(2)));
        let c1: Rational = qi(1) + (&x - qi(0)).recip() + (&x - qi(1)).recip();
        assert_eq!(eta_coefficient(&t, 1), id.scale(&c1));
        assert_eq!(eta_coefficient(&t, 2), model.h_of_x(&x).unwrap());
    }
}
