use num_complex::Complex64;
use proptest::prelude::*;

use gaudin_kp::calogero::checks::{check_cm_structure, check_tau_master};
use gaudin_kp::calogero::flow::lax_rhs;
use gaudin_kp::calogero::{flow, CMPhase};
use gaudin_kp::cli::RunConfig;
use gaudin_kp::gaudin::{GaudinModel, MiwaShift, TimeSpec};
use gaudin_kp::kp_verifier::{
    check_derivative_oracle, check_master_commutativity, check_shift_covariance, check_sign_flip, CheckResult,
};
use gaudin_kp::matrix_derivative::HFunction;
use gaudin_kp::partitions::{
    char_shift_coeffs, character, character_bialternant, power_sum_times, schur_dual_jt, schur_jt, Partition,
};
use gaudin_kp::scalar::{format_rational, parse_rational, q, qi, Rational};
use gaudin_kp::spectrum::{classical_spectrum, direct_eigenstates, uniform_eigenstate};
use gaudin_kp::tensor::{Permutation, SectorLabel, TensorOperator};
use gaudin_kp::linalg::Matrix;

type Op = TensorOperator<Rational>;

fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=5).prop_map(|(p, d)| q(p, d))
}

fn distinct(count: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rational(), count).prop_filter("distinct", |v| {
        (0..v.len()).all(|i| (0..i).all(|j| v[i] != v[j]))
    })
}

/// Eigenvalue lists for `N = 1..=3`.
fn eigs() -> impl Strategy<Value = Vec<Rational>> {
    (1usize..=3).prop_flat_map(distinct)
}

fn partition(max: usize) -> impl Strategy<Value = Partition> {
    let all = Partition::all_up_to(max);
    (0..all.len()).prop_map(move |i| all[i].clone())
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Permutation::new(v).unwrap())
}

fn exact_pass(r: &CheckResult) -> Result<(), TestCaseError> {
    prop_assert!(r.exact && r.passed, "{} {:?} {:?}", r.name, r.params, r.components.iter().filter(|c| !c.passed).collect::<Vec<_>>());
    Ok(())
}

/// Rank-2 model with two sites and a point away from the positions, the
/// twist and zero.
fn model_and_point() -> impl Strategy<Value = (GaudinModel, Rational)> {
    (distinct(2), distinct(2), rational()).prop_filter_map("generic point", |(k, x, p)| {
        if p == qi(0) || x.contains(&p) || k.contains(&p) {
            return None;
        }
        Some((GaudinModel::new(2, k, x).ok()?, p))
    })
}

fn off_model(m: &GaudinModel, z: &Rational) -> bool {
    *z != qi(0) && !m.positions().contains(z) && !m.twist().contains(z)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn jacobi_trudi_forms_agree(lam in partition(8), t in prop::collection::vec(rational(), 9)) {
        prop_assert_eq!(schur_jt(&lam, &t), schur_dual_jt(&lam, &t));
    }

    #[test]
    fn character_is_schur_at_power_sum_times(lam in partition(6), eigs in eigs()) {
        let direct = character(&lam, &eigs);
        let bialt = character_bialternant(&lam, &eigs).unwrap();
        prop_assert_eq!(&direct, &bialt);
        if lam.length() <= eigs.len() {
            let k = lam.part(0) + lam.length();
            prop_assert_eq!(direct, schur_jt(&lam, &power_sum_times(&eigs, k)));
        }
    }

    #[test]
    fn giambelli_for_characters(lam in partition(8), eigs in eigs()) {
        let (alphas, betas) = lam.frobenius();
        let d = alphas.len();
        let m = Matrix::from_fn(d, d, |i, j| character(&Partition::hook(alphas[i], betas[j]), &eigs));
        prop_assert_eq!(m.det(), character(&lam, &eigs));
    }

    #[test]
    fn shift_of_eigenvalues(lam in partition(5), eigs in eigs()) {
        let n = eigs.len();
        let shifted: Vec<Rational> = eigs.iter().map(|e| e - qi(1)).collect();
        let sum = char_shift_coeffs(&lam, n)
            .iter()
            .fold(qi(0), |acc, (mu, c)| acc + c * character(mu, &eigs));
        prop_assert_eq!(sum, character(&lam, &shifted));
    }

    #[test]
    fn rationals_round_trip(r in (-1000i64..1000, 1i64..1000).prop_map(|(p, d)| q(p, d))) {
        prop_assert_eq!(parse_rational(&format_rational(&r)), Some(r));
    }
}


proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn permutation_operators_are_a_homomorphism(
        (s, t) in (1usize..=4).prop_flat_map(|n| (permutation(n), permutation(n))),
        rank in 1usize..=2,
    ) {
        let lhs = &Op::perm_op(rank, &s) * &Op::perm_op(rank, &t);
        prop_assert_eq!(lhs, Op::perm_op(rank, &s.op_product(&t)));
    }

    #[test]
    fn matrix_units_multiply(rank in 1usize..=3, sites in 1usize..=3, idx in prop::collection::vec(0usize..3, 5)) {
        let site = idx[0] % sites;
        let (a, b, c, d) = (idx[1] % rank, idx[2] % rank, idx[3] % rank, idx[4] % rank);
        let lhs = &Op::elem(rank, sites, site, a, b).unwrap() * &Op::elem(rank, sites, site, c, d).unwrap();
        let rhs = if b == c { Op::elem(rank, sites, site, a, d).unwrap() } else { Op::zero(rank, sites) };
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn sector_projectors_resolve_the_identity(rank in 1usize..=3, sites in 1usize..=3) {
        let sectors = SectorLabel::all(rank, sites);
        let ps: Vec<Op> = sectors.iter().map(|s| Op::sector_projector(rank, sites, s).unwrap()).collect();
        let mut total = Op::zero(rank, sites);
        for (i, p) in ps.iter().enumerate() {
            for (j, r) in ps.iter().enumerate() {
                let prod = p * r;
                if i == j {
                    prop_assert_eq!(&prod, p);
                } else {
                    prop_assert!(prod.is_zero());
                }
            }
            total = total + p.clone();
        }
        prop_assert_eq!(total, Op::identity(rank, sites));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn derivatives_in_different_slots_commute(
        lam in partition(3),
        twist in distinct(2),
        t in prop::collection::vec(rational(), 2),
        (i, j) in (0usize..3, 0usize..3).prop_filter("distinct slots", |(i, j)| i != j),
    ) {
        let f = HFunction::character(2, 3, &lam).with_tag(2, &[]).unwrap();
        let a = f.mat_derive(i).unwrap().mat_derive(j).unwrap().evaluate(&twist, &t, &[]).unwrap();
        let b = f.mat_derive(j).unwrap().mat_derive(i).unwrap().evaluate(&twist, &t, &[]).unwrap();
        prop_assert_eq!(a.op, b.op);
        prop_assert_eq!(a.log_scale, b.log_scale);
    }

    #[test]
    fn structured_and_entrywise_derivatives_agree(
        twist in distinct(2),
        t in prop::collection::vec(rational(), 2),
        zeta in rational(),
        sites in 1usize..=2,
    ) {
        prop_assume!(twist.iter().all(|k| *k == qi(0) || zeta != k.recip()));
        let lambdas = Partition::all_up_to(2);
        exact_pass(&check_derivative_oracle(2, sites, &twist, &lambdas, &t, &zeta))?;
    }

    #[test]
    fn master_operators_commute((m, x) in model_and_point(), y in rational(), z in rational(), w in rational(),
                                t in prop::collection::vec(rational(), 2), u in prop::collection::vec(rational(), 2)) {
        prop_assume!(off_model(&m, &y) && off_model(&m, &z) && off_model(&m, &w));
        let a = TimeSpec { times: t, shifts: vec![MiwaShift::plus(z)] };
        let b = TimeSpec { times: u, shifts: vec![MiwaShift::minus(w)] };
        exact_pass(&check_master_commutativity::<Rational>(&m, &[(x, a, y, b)]))?;
    }

    #[test]
    fn x_and_first_time_enter_through_their_sum((m, x) in model_and_point(), s in rational(), z in rational(),
                                                 t in prop::collection::vec(rational(), 2)) {
        prop_assume!(off_model(&m, &z));
        let spec = TimeSpec { times: t, shifts: vec![MiwaShift::plus(z)] };
        exact_pass(&check_shift_covariance::<Rational>(&m, &x, &s, &spec))?;
    }

    #[test]
    fn long_diagrams_vanish((m, x) in model_and_point(), extra in partition(2)) {
        let mut parts = vec![1, 1, 1];
        parts.extend(extra.parts().iter().map(|_| 1));
        let lam = Partition::new(parts).unwrap();
        prop_assert!(m.t_operator_at(&lam, &x).unwrap().is_zero());
    }

    #[test]
    fn fay_survives_flipping_all_times((m, x) in model_and_point(), zs in distinct(3), t in prop::collection::vec(rational(), 3)) {
        prop_assume!(zs.iter().all(|z| off_model(&m, z)));
        let zs: [Rational; 3] = zs.try_into().unwrap();
        exact_pass(&check_sign_flip::<Rational>(&m, &x, &t, &zs))?;
    }

    #[test]
    fn tau_determinant_of_uniform_states((m, x) in model_and_point(), t in prop::collection::vec(rational(), 3), a in 0usize..2) {
        let st = uniform_eigenstate(&m, a).unwrap();
        exact_pass(&check_tau_master(&m, &st, &[(x, t)]))?;
    }

    #[test]
    fn calogero_structure_is_exact(n in 1usize..=6, seed in prop::collection::vec(rational(), 12)) {
        let mut x = Vec::new();
        for v in seed.iter().take(n) {
            let mut c = v.clone();
            while x.contains(&c) {
                c += qi(13);
            }
            x.push(c);
        }
        let p = seed[6..6 + n].to_vec();
        exact_pass(&check_cm_structure(&CMPhase::new(x, p).unwrap(), 5))?;
    }

    #[test]
    fn config_round_trips_rationals(k in distinct(2), x in distinct(3), seed in 0u64..1000) {
        let list = |v: &[Rational]| v.iter().map(|r| format!("\"{}\"", format_rational(r))).collect::<Vec<_>>().join(", ");
        let text = format!("twist = [{}]\npositions = [{}]\nseed = {seed}\n", list(&k), list(&x));
        let cfg = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(cfg.model.twist(), &k[..]);
        prop_assert_eq!(cfg.model.positions(), &x[..]);
        prop_assert_eq!(cfg.seed, seed);
    }
}

fn float_phase(x: &[i64], p: &[i64]) -> CMPhase<Complex64> {
    CMPhase::new(
        x.iter().map(|v| Complex64::new(*v as f64, 0.0)).collect(),
        p.iter().map(|v| Complex64::new(*v as f64 / 4.0, 0.0)).collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn lax_equation_along_the_second_flow(
        x in prop::collection::btree_set(-8i64..=8, 2..=4).prop_map(|s| s.into_iter().map(|v| 3 * v).collect::<Vec<_>>()),
        p in prop::collection::vec(-4i64..=4, 4),
    ) {
        let ph = float_phase(&x, &p[..x.len()]);
        let h = 1e-3;
        let y = |phase: &CMPhase<Complex64>| phase.lax().unwrap().y;
        let fwd = y(&flow(&ph, 2, h, 1).unwrap());
        let back = y(&flow(&ph, 2, -h, 1).unwrap());
        let fwd2 = y(&flow(&ph, 2, h / 2.0, 1).unwrap());
        let back2 = y(&flow(&ph, 2, -h / 2.0, 1).unwrap());
        let rhs = lax_rhs(&ph).unwrap();
        let n = x.len();
        for i in 0..n {
            for j in 0..n {
                let d1 = (fwd.get(i, j) - back.get(i, j)) / (2.0 * h);
                let d2 = (fwd2.get(i, j) - back2.get(i, j)) / h;
                let d = (d2 * 4.0 - d1) / 3.0;
                let scale = rhs.get(i, j).norm().max(1.0);
                prop_assert!((d - rhs.get(i, j)).norm() / scale < 1e-8, "({i},{j}): {d} vs {}", rhs.get(i, j));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    #[test]
    fn direct_states_are_joint_eigenvectors_and_count_matches(
        x in distinct(3),
        k in distinct(2),
        seed in 0u64..1000,
    ) {
        let m = GaudinModel::new(2, k, x).unwrap();
        let hs = m.hamiltonians().unwrap();
        let weights: Vec<TensorOperator<f64>> =
            (0..2).map(|a| Op::weight_op(2, 3, a).unwrap().map(gaudin_kp::scalar::rational_to_f64)).collect();
        for s in m.sectors() {
            let d = direct_eigenstates(&m, &s, seed).unwrap();
            prop_assert_eq!(d.states.len(), s.dimension());
            for st in &d.states {
                let v = &st.vector;
                for (op, h) in hs.iter().zip(&st.h) {
                    let av = op.map(gaudin_kp::scalar::rational_to_f64).matrix().mul_vec(v);
                    let r = av.iter().zip(v).map(|(a, b)| (a - h * b).abs()).fold(0.0, f64::max);
                    prop_assert!(r < 1e-9 * h.abs().max(1.0), "H residual {r}");
                }
                for (w, &ma) in weights.iter().zip(s.counts()) {
                    let av = w.matrix().mul_vec(v);
                    let r = av.iter().zip(v).map(|(a, b)| (a - ma as f64 * b).abs()).fold(0.0, f64::max);
                    prop_assert!(r < 1e-12, "M residual {r}");
                }
            }
            let c = classical_spectrum(&m, &s, seed).unwrap();
            prop_assert_eq!(c.tuples.len(), s.dimension(), "{:?} failures {:?}", s.counts(), c.failures);
        }
    }
}
