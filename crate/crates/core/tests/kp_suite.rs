use gaudin_kp::gaudin::GaudinModel;
use gaudin_kp::kp_verifier::{run_suite, CheckResult, SuiteOptions, KP_CHECKS};
use gaudin_kp::scalar::{q, qi};

fn report(results: &[CheckResult]) -> bool {
    for r in results.iter().filter(|r| !r.passed) {
        println!("{}", r.summary_line());
        for c in r.components.iter().filter(|c| !c.passed) {
            println!("    {} {}", c.label, c.residual);
        }
        if r.components.is_empty() {
            println!("    {:?}", r.params);
        }
    }
    results.iter().all(|r| r.passed)
}

#[test]
fn default_model_passes_every_identity() {
    let model = GaudinModel::new(2, vec![qi(2), qi(-1)], vec![qi(0), qi(1)]).unwrap();
    assert!(report(&run_suite(&model, KP_CHECKS, &SuiteOptions::default())));
}

#[test]
fn three_sites_rank_two() {
    let model = GaudinModel::new(2, vec![q(3, 2), q(-2, 3)], vec![qi(0), qi(1), q(5, 2)]).unwrap();
    let opts = SuiteOptions { seed: 7, ..SuiteOptions::default() };
    assert!(report(&run_suite(&model, KP_CHECKS, &opts)));
}

#[test]
fn rank_three() {
    let model = GaudinModel::new(3, vec![qi(2), qi(-1), q(1, 2)], vec![qi(0), q(3, 2)]).unwrap();
    let opts = SuiteOptions { seed: 11, samples: 2, ..SuiteOptions::default() };
    assert!(report(&run_suite(&model, KP_CHECKS, &opts)));
}

#[test]
fn float_mode_within_tolerance() {
    let model = GaudinModel::new(2, vec![q(3, 2), q(-2, 3)], vec![qi(0), qi(1), q(5, 2)]).unwrap();
    let opts = SuiteOptions { seed: 3, float: true, ..SuiteOptions::default() };
    let results = run_suite(&model, KP_CHECKS, &opts);
    assert!(results.iter().any(|r| !r.exact));
    assert!(report(&results));
}
