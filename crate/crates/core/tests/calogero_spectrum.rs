use gaudin_kp::calogero::checks::{check_ba, check_cm_structure, check_lax_spectrum, check_tau_master, check_zero_dynamics};
use gaudin_kp::calogero::CMPhase;
use gaudin_kp::gaudin::GaudinModel;
use gaudin_kp::kp_verifier::{CheckResult, Sampler};
use gaudin_kp::scalar::{q, qi, Rational};
use gaudin_kp::spectrum::{direct_eigenstates, spectrum_table, uniform_eigenstate};
use gaudin_kp::tensor::SectorLabel;

fn n2(n: usize) -> GaudinModel {
    let x = [qi(0), qi(2), qi(5)];
    GaudinModel::new(2, vec![qi(2), qi(-1)], x[..n].to_vec()).unwrap()
}

fn n3() -> GaudinModel {
    GaudinModel::new(3, vec![qi(2), qi(-1), q(1, 2)], vec![qi(0), qi(1), q(5, 2)]).unwrap()
}

fn assert_pass(r: &CheckResult) {
    let bad: Vec<_> = r.components.iter().filter(|c| !c.passed).collect();
    assert!(r.passed, "{} failed: {:?} {:?}", r.name, r.params, bad);
}

#[test]
fn cm_structure_exact_up_to_six_particles() {
    let mut s = Sampler::new(11);
    for n in 1..=6 {
        let x = s.distinct(n, 12, 5, &[]);
        let p = s.times(n);
        assert_pass(&check_cm_structure(&CMPhase::new(x, p).unwrap(), 5));
    }
}

#[test]
fn spectra_match_in_every_sector() {
    let mut cases: Vec<(GaudinModel, SectorLabel)> = Vec::new();
    for n in 1..=3 {
        let m = n2(n);
        for s in m.sectors() {
            cases.push((m.clone(), s));
        }
    }
    cases.push((n3(), SectorLabel::new(vec![1, 1, 1], 3).unwrap()));
    for (m, s) in cases {
        let t = spectrum_table(&m, &s, 7, 1e-9).unwrap();
        assert!(t.passed(1e-8), "{:?}: {:?} anomalies {:?} moment {}", s, t.matching, t.anomalies, t.moment_residual);
    }
}

#[test]
fn lax_spectrum_of_every_eigenstate() {
    for m in [n2(2), n2(3), n3()] {
        for s in m.sectors() {
            for st in direct_eigenstates(&m, &s, 3).unwrap().states {
                let (_, y0) = st.lax_pair(&m).unwrap();
                assert_pass(&check_lax_spectrum(&y0, m.twist(), &s));
            }
        }
    }
    let m = n2(3);
    for a in 0..2 {
        let st = uniform_eigenstate(&m, a).unwrap();
        let (_, y0) = st.lax_pair(&m).unwrap();
        assert_pass(&check_lax_spectrum(&y0, m.twist(), &st.sector));
    }
}

fn points(s: &mut Sampler, m: &GaudinModel, k: usize) -> Vec<(Rational, Rational)> {
    let mut avoid: Vec<Rational> = m.positions().to_vec();
    avoid.extend(m.twist().iter().cloned());
    avoid.push(qi(0));
    (0..k).map(|_| (s.rational(12, 5, &avoid), s.rational(12, 5, &avoid))).collect()
}

#[test]
fn baker_akhiezer_functions() {
    let mut s = Sampler::new(5);
    for m in [n2(2), n2(3)] {
        let pts = points(&mut s, &m, 10);
        for sec in m.sectors() {
            for st in direct_eigenstates(&m, &sec, 3).unwrap().states {
                assert_pass(&check_ba(&m, &st, &pts, 2));
            }
        }
        let st = uniform_eigenstate(&m, 0).unwrap();
        let r = check_ba(&m, &st, &pts, 3);
        assert!(r.exact);
        assert_pass(&r);
    }
}

#[test]
fn tau_determinant_is_the_master_eigenvalue() {
    let m = n2(3);
    let mut s = Sampler::new(9);
    let samples: Vec<(Rational, Vec<Rational>)> =
        (0..5).map(|_| (s.rational(12, 5, m.positions()), s.times(3))).collect();
    for sec in m.sectors() {
        for st in direct_eigenstates(&m, &sec, 3).unwrap().states {
            assert_pass(&check_tau_master(&m, &st, &samples));
        }
    }
    let st = uniform_eigenstate(&m, 1).unwrap();
    let r = check_tau_master(&m, &st, &samples);
    assert!(r.exact);
    assert_pass(&r);
}

#[test]
fn zero_dynamics_follow_the_flow() {
    let m = n2(3);
    for sec in m.sectors() {
        for st in direct_eigenstates(&m, &sec, 3).unwrap().states {
            let r = check_zero_dynamics(&m, &st, 0.1, 100);
            println!("{}", r.summary_line());
            for c in &r.components {
                println!("  {} {:e}", c.label, c.residual);
            }
            assert_pass(&r);
        }
    }
}
