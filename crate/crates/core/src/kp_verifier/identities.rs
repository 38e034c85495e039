//! Determinant identities, commutativity and closed forms for the higher
//! T-operators at a fixed spectral parameter.

use crate::error::{Error, Result};
use crate::gaudin::spin::gaudin_limit;
use crate::gaudin::GaudinModel;
use crate::kp_verifier::result::{CheckResult, Recorder};
use crate::linalg::leibniz_det;
use crate::matrix_derivative::{q_operator, q_operator_cycle, HFunction};
use crate::partitions::Partition;
use crate::poly::Jet;
use crate::scalar::{binomial, q, Rational, Ring};
use crate::tensor::{OpPoly, TensorOperator};

/// Determinant of a square array of mutually commuting operators.
pub fn operator_det<R: Ring>(entries: &[Vec<TensorOperator<R>>], rank: usize, sites: usize) -> TensorOperator<R> {
    leibniz_det(
        entries,
        TensorOperator::identity(rank, sites),
        |a, b| a * b,
        |a, b| a.clone() + b.clone(),
        |a| -a.clone(),
        TensorOperator::zero(rank, sites),
    )
}

fn mag<R: Ring>(ops: &[&TensorOperator<R>]) -> f64 {
    ops.iter().map(|o| o.max_magnitude()).fold(0.0, f64::max)
}

fn lift<R: Ring>(x: &Rational) -> R {
    R::from_rational(x)
}

/// `[T_lambda(x), T_mu(x')] = 0` for every pair of diagrams and points, and
/// `[H_i, H_j] = [H_i, T_lambda(x)] = 0`.
pub fn check_commutativity<R: Ring>(
    model: &GaudinModel,
    lambdas: &[Partition],
    points: &[(Rational, Rational)],
) -> CheckResult {
    let mut rec = Recorder::new::<R>("commutativity");
    rec.param("N", model.rank());
    rec.param("n", model.sites());
    rec.param("lambdas", lambdas.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" "));
    let run = |rec: &mut Recorder| -> Result<()> {
        let polys: Vec<OpPoly<R>> = lambdas.iter().map(|l| model.t_operator_in::<R>(l)).collect::<Result<_>>()?;
        let hs: Vec<TensorOperator<R>> =
            model.hamiltonians()?.iter().map(|h| h.map(|c| lift::<R>(c))).collect();
        for (i, a) in hs.iter().enumerate() {
            for (j, b) in hs.iter().enumerate().skip(i + 1) {
                rec.operator(format!("[H_{i},H_{j}]"), &a.commutator(b), mag(&[a, b]).powi(2));
            }
        }
        for (p, (x, y)) in points.iter().enumerate() {
            let (xr, yr) = (lift::<R>(x), lift::<R>(y));
            let at_x: Vec<_> = polys.iter().map(|t| t.eval(&xr)).collect();
            let at_y: Vec<_> = polys.iter().map(|t| t.eval(&yr)).collect();
            for (i, a) in at_x.iter().enumerate() {
                for (j, b) in at_y.iter().enumerate().skip(i) {
                    let label = format!("pt{p} [T{},T{}']", lambdas[i], lambdas[j]);
                    rec.operator(label, &a.commutator(b), mag(&[a, b]).powi(2));
                }
                if p == 0 {
                    for (k, h) in hs.iter().enumerate() {
                        rec.operator(format!("[H_{k},T{}]", lambdas[i]), &h.commutator(a), mag(&[a, h]).powi(2));
                    }
                }
            }
        }
        Ok(())
    };
    match run(&mut rec) {
        Ok(()) => rec.finish(),
        Err(e) => CheckResult::failed("commutativity", e.to_string()),
    }
}

/// The rational-normalization forms of `T_(1)`, `T_(2)`, `T_(1,1)`, and
/// `sT_(2) - sT_(1,1) = 2 H(x)`.
pub fn check_closed_forms(model: &GaudinModel, x: &Rational) -> CheckResult {
    let mut rec = Recorder::new::<Rational>("closed_forms");
    rec.param("N", model.rank());
    rec.param("n", model.sites());
    rec.param_q("x", x);
    let run = |rec: &mut Recorder| -> Result<()> {
        let (rank, n) = (model.rank(), model.sites());
        let id = TensorOperator::<Rational>::identity(rank, n);
        let tr: Rational = model.twist().iter().sum();
        let inv: Vec<Rational> = model
            .positions()
            .iter()
            .map(|p| (x - p).try_inv().ok_or_else(|| Error::Pole("x at a marked point".into())))
            .collect::<Result<_>>()?;
        let s1: Rational = inv.iter().sum();
        let mut s2 = Rational::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                s2 += &inv[i] * &inv[j];
            }
        }
        let hx = model.h_of_x(x)?;
        let t1 = model.normalized_t_operator(&Partition::row(1), x)?;
        let t2 = model.normalized_t_operator(&Partition::row(2), x)?;
        let t11 = model.normalized_t_operator(&Partition::column(2), x)?;
        let central = id.scale(&(&tr * &tr * q(1, 2) + &tr * &s1 + s2));
        rec.operator("T_(1)", &(t1 - id.scale(&(tr.clone() + s1))), 0.0);
        rec.operator("T_(2)", &(t2.clone() - central.clone() - hx.clone()), 0.0);
        rec.operator("T_(1,1)", &(t11.clone() - central + hx.clone()), 0.0);
        rec.operator("T_(2)-T_(1,1)=2H", &(t2 - t11 - hx.scale(&Rational::from_int(2))), 0.0);
        let empty = model.normalized_t_operator(&Partition::empty(), x)?;
        rec.operator("T_()=1", &(empty - id), 0.0);
        Ok(())
    };
    match run(&mut rec) {
        Ok(()) => rec.finish(),
        Err(e) => CheckResult::failed("closed_forms", e.to_string()),
    }
}

/// Leading `eta` coefficient of Talalaev's spin-chain combination versus the
/// Gaudin T-operator in the rational normalization.
pub fn check_limit_lemma(model: &GaudinModel, lambdas: &[Partition], x: &Rational) -> CheckResult {
    let mut rec = Recorder::new::<Rational>("limit_lemma");
    rec.param("N", model.rank());
    rec.param("n", model.sites());
    rec.param_q("x", x);
    let run = |rec: &mut Recorder| -> Result<()> {
        for lam in lambdas {
            let (lead, lower) = gaudin_limit(model, lam, x)?;
            rec.condition(format!("{lam} lower orders vanish"), lower);
            let expect = model.normalized_t_operator(lam, x)?;
            rec.operator(format!("{lam} leading"), &(lead - expect), 0.0);
        }
        Ok(())
    };
    match run(&mut rec) {
        Ok(()) => rec.finish(),
        Err(e) => CheckResult::failed("limit_lemma", e.to_string()),
    }
}

/// `T_lambda T_empty^{d-1} = det T_{lambda_i - i, lambda'_j - j}` in the
/// polynomial normalization, with hook operators `T_{l,k} = T_(l+1,1^k)`.
pub fn check_giambelli<R: Ring>(model: &GaudinModel, lambdas: &[Partition], x: &Rational) -> CheckResult {
    let mut rec = Recorder::new::<R>("giambelli");
    rec.param("N", model.rank());
    rec.param("n", model.sites());
    rec.param_q("x", x);
    let run = |rec: &mut Recorder| -> Result<()> {
        let xr = lift::<R>(x);
        let (rank, n) = (model.rank(), model.sites());
        let vac = model.vacuum_poly::<R>().eval(&xr);
        for lam in lambdas.iter().filter(|l| !l.is_empty()) {
            let (alphas, betas) = lam.frobenius();
            let d = alphas.len();
            let mut rows = Vec::with_capacity(d);
            for &a in &alphas {
                let mut row = Vec::with_capacity(d);
                for &b in &betas {
                    row.push(model.t_operator_in::<R>(&Partition::hook(a, b))?.eval(&xr));
                }
                rows.push(row);
            }
            let det = operator_det(&rows, rank, n);
            let lhs = model.t_operator_in::<R>(lam)?.eval(&xr).scale(&vac.pow(d as u32 - 1));
            let scale = mag(&[&lhs, &det]);
            rec.operator(format!("{lam}"), &(lhs - det), scale);
        }
        Ok(())
    };
    match run(&mut rec) {
        Ok(()) => rec.finish(),
        Err(e) => CheckResult::failed("giambelli", e.to_string()),
    }
}

/// `sT_lambda(x)` and `d^k/dx^k` of it, `k <= order`, from a jet in `x`.
fn normalized_jet<R: Ring>(model: &GaudinModel, lambda: &Partition, x: &R, order: usize) -> Result<Vec<TensorOperator<R>>> {
    let xj = Jet::variable_at(x.clone(), order + 1);
    let op = model.normalized_t_operator::<Jet<R>>(lambda, &xj)?;
    let mut fact = R::one();
    let mut out = Vec::with_capacity(order + 1);
    for k in 0..=order {
        if k > 0 {
            fact = fact * R::from_int(k as i64);
        }
        out.push(op.map(|j| j.coeff(k) * fact.clone()));
    }
    Ok(out)
}

/// Row (one-row diagrams) or column (one-column diagrams) determinant
/// formula in the rational normalization.
fn cbr_determinant<R: Ring>(model: &GaudinModel, lambda: &Partition, x: &R, dual: bool) -> Result<TensorOperator<R>> {
    let shape = if dual { lambda.conjugate() } else { lambda.clone() };
    let l = shape.length();
    let (rank, n) = (model.rank(), model.sites());
    let mut cache: std::collections::BTreeMap<i64, Vec<TensorOperator<R>>> = std::collections::BTreeMap::new();
    let mut rows = Vec::with_capacity(l);
    for i in 1..=l {
        let mut row = Vec::with_capacity(l);
        for j in 1..=l {
            let mut entry = TensorOperator::zero(rank, n);
            for k in 0..j {
                let s = shape.part(i - 1) as i64 - i as i64 + j as i64 - k as i64;
                if s < 0 {
                    continue;
                }
                if let std::collections::btree_map::Entry::Vacant(e) = cache.entry(s) {
                    let diag = if dual { Partition::column(s as usize) } else { Partition::row(s as usize) };
                    e.insert(normalized_jet(model, &diag, x, l)?);
                }
                let c = binomial(j as i64 - 1, k as i64) * Rational::from_int(if k % 2 == 0 { 1 } else { -1 });
                entry = entry + cache[&s][k].scale(&R::from_rational(&c));
            }
            row.push(entry);
        }
        rows.push(row);
    }
    Ok(operator_det(&rows, rank, n))
}

/// Determinant formulas over one-row (`dual = false`) or one-column
/// (`dual = true`) T-operators with `x`-derivatives.
pub fn check_cbr<R: Ring>(model: &GaudinModel, lambdas: &[Partition], x: &Rational, dual: bool) -> CheckResult {
    let name = if dual { "cbr_dual" } else { "cbr" };
    let mut rec = Recorder::new::<R>(name);
    rec.param("N", model.rank());
    rec.param("n", model.sites());
    rec.param_q("x", x);
    let run = |rec: &mut Recorder| -> Result<()> {
        let xr = lift::<R>(x);
        for lam in lambdas {
            let lhs = model.normalized_t_operator::<R>(lam, &xr)?;
            let det = cbr_determinant(model, lam, &xr, dual)?;
            let scale = mag(&[&lhs, &det]);
            rec.operator(format!("{lam}"), &(lhs - det), scale);
        }
        Ok(())
    };
    match run(&mut rec) {
        Ok(()) => rec.finish(),
        Err(e) => CheckResult::failed(name, e.to_string()),
    }
}

/// Leading `x^{n l}` coefficient of the polynomial-normalization determinant
/// against the classical Jacobi-Trudi determinant of characters.
pub fn check_cbr_leading(model: &GaudinModel, lambdas: &[Partition]) -> CheckResult {
    let mut rec = Recorder::new::<Rational>("cbr_leading");
    rec.param("N", model.rank());
    rec.param("n", model.sites());
    let run = |rec: &mut Recorder| -> Result<()> {
        let (rank, n) = (model.rank(), model.sites());
        for lam in lambdas {
            let l = lam.length();
            let mut rows = Vec::with_capacity(l);
            for i in 1..=l {
                let mut row = Vec::with_capacity(l);
                for j in 1..=l {
                    let s = lam.part(i - 1) as i64 - i as i64 + j as i64;
                    let t = if s < 0 {
                        OpPoly::zero(rank, n)
                    } else {
                        model.t_operator(&Partition::row(s as usize))?
                    };
                    row.push(t.coeff(n));
                }
                rows.push(row);
            }
            let top = operator_det(&rows, rank, n);
            let chi = crate::partitions::character(lam, model.twist());
            rec.operator(format!("{lam}"), &(top - TensorOperator::scalar(rank, n, chi)), 0.0);
        }
        Ok(())
    };
    match run(&mut rec) {
        Ok(()) => rec.finish(),
        Err(e) => CheckResult::failed("cbr_leading", e.to_string()),
    }
}

/// `M_{ab} = d_{n+1} sT^{n}_{a,b}(x)` on `n + 1` slots.
pub fn rank1_matrix<R: Ring>(model: &GaudinModel, x: &Rational, alphas: &[usize], betas: &[usize]) -> Result<Vec<Vec<TensorOperator<R>>>> {
    let (rank, n) = (model.rank(), model.sites());
    let twist: Vec<R> = model.twist().iter().map(lift::<R>).collect();
    let xr = lift::<R>(x);
    let inv: Vec<R> = model
        .positions()
        .iter()
        .map(|p| (xr.clone() - lift::<R>(p)).try_inv().ok_or_else(|| Error::Pole("x at a marked point".into())))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(alphas.len());
    for &a in alphas {
        let mut row = Vec::with_capacity(betas.len());
        for &b in betas {
            let base = HFunction::character(rank, n + 1, &Partition::hook(a, b)).mat_derive(n)?;
            let table = base.derivative_table_on(n)?;
            let mut acc = TensorOperator::zero(rank, n + 1);
            for (mask, f) in table.iter().enumerate() {
                let mut pref = R::one();
                for (i, c) in inv.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        pref = pref * c.clone();
                    }
                }
                acc = acc + f.evaluate(&twist, &[], &[])?.op.scale(&pref);
            }
            row.push(acc);
        }
        out.push(row);
    }
    Ok(out)
}

/// All 2x2 minors of `(d_{n+1} sT_{a,b}(x))` vanish, and the matrix is not zero.
pub fn check_rank1<R: Ring>(model: &GaudinModel, x: &Rational, alphas: &[usize], betas: &[usize]) -> CheckResult {
    let mut rec = Recorder::new::<R>("rank1");
    rec.param("N", model.rank());
    rec.param("n", model.sites());
    rec.param_q("x", x);
    rec.param("alphas", format!("{alphas:?}"));
    rec.param("betas", format!("{betas:?}"));
    let run = |rec: &mut Recorder| -> Result<()> {
        let m = rank1_matrix::<R>(model, x, alphas, betas)?;
        let nonzero = m.iter().flatten().any(|e| !e.is_zero());
        rec.condition("some entry nonzero", nonzero);
        for i1 in 0..alphas.len() {
            for i2 in (i1 + 1)..alphas.len() {
                for j1 in 0..betas.len() {
                    for j2 in (j1 + 1)..betas.len() {
                        let a = &m[i1][j1] * &m[i2][j2];
                        let b = &m[i1][j2] * &m[i2][j1];
                        let scale = mag(&[&a, &b]);
                        let label = format!("a=({},{}) b=({},{})", alphas[i1], alphas[i2], betas[j1], betas[j2]);
                        rec.operator(label, &(a - b), scale);
                    }
                }
            }
        }
        Ok(())
    };
    match run(&mut rec) {
        Ok(()) => rec.finish(),
        Err(e) => CheckResult::failed("rank1", e.to_string()),
    }
}

/// `Q(z1,zeta1) Q(z2,zeta2) = Q(z2,zeta1) Q(z1,zeta2)`, `[Q, Q'] = 0`, and the
/// structured and permutation-sum routes to `Q` agree.
pub fn check_exchange<R: Ring>(twist: &[Rational], sites: usize, quads: &[[Rational; 4]]) -> CheckResult {
    let mut rec = Recorder::new::<R>("exchange");
    rec.param("N", twist.len());
    rec.param("n", sites);
    let run = |rec: &mut Recorder| -> Result<()> {
        let tw: Vec<R> = twist.iter().map(lift::<R>).collect();
        for (p, quad) in quads.iter().enumerate() {
            let [z1, zeta1, z2, zeta2] = quad.clone().map(|v| lift::<R>(&v));
            let qa = q_operator(&tw, sites, &z1, &zeta1)?;
            let qb = q_operator(&tw, sites, &z2, &zeta2)?;
            let qc = q_operator(&tw, sites, &z2, &zeta1)?;
            let qd = q_operator(&tw, sites, &z1, &zeta2)?;
            let lhs = &qa * &qb;
            let rhs = &qc * &qd;
            let scale = mag(&[&lhs, &rhs]);
            rec.operator(format!("q{p} exchange"), &(lhs - rhs), scale);
            rec.operator(format!("q{p} commute"), &qa.commutator(&qb), mag(&[&qa, &qb]).powi(2));
            let cyc = q_operator_cycle(&tw, sites, &z1, &zeta1)?;
            rec.operator(format!("q{p} cycle route"), &(cyc - qa.clone()), qa.max_magnitude());
        }
        Ok(())
    };
    match run(&mut rec) {
        Ok(()) => rec.finish(),
        Err(e) => CheckResult::failed("exchange", e.to_string()),
    }
}

/// Three-term Plucker relations among the Schur coefficients `T_lambda(x)`:
/// `T_(2,2) T_() - T_(2,1) T_(1) + T_(2) T_(1,1) = 0` and its shifted
/// companions obtained by adding a common first row.
pub fn check_plucker<R: Ring>(model: &GaudinModel, x: &Rational) -> CheckResult {
    let mut rec = Recorder::new::<R>("plucker");
    rec.param("N", model.rank());
    rec.param("n", model.sites());
    rec.param_q("x", x);
    let run = |rec: &mut Recorder| -> Result<()> {
        let xr = lift::<R>(x);
        let t = |parts: Vec<usize>| -> Result<TensorOperator<R>> {
            Ok(model.t_operator_in::<R>(&Partition::new(parts)?)?.eval(&xr))
        };
        let triples: [[Vec<usize>; 6]; 2] = [
            [vec![2, 2], vec![], vec![2, 1], vec![1], vec![2], vec![1, 1]],
            [vec![3, 2], vec![], vec![3, 1], vec![1], vec![3], vec![1, 1]],
        ];
        for tri in triples {
            let label = Partition::new(tri[0].clone())?.to_string();
            let [a, b, c, d, e, f] = tri.map(&t);
            let t1 = &a? * &b?;
            let t2 = &c? * &d?;
            let t3 = &e? * &f?;
            let scale = mag(&[&t1, &t2, &t3]);
            rec.operator(label, &(t1 - t2 + t3), scale);
        }
        Ok(())
    };
    match run(&mut rec) {
        Ok(()) => rec.finish(),
        Err(e) => CheckResult::failed("plucker", e.to_string()),
    }
}
