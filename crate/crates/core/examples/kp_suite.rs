//! The exact identity suite on a small model.

use gaudin_kp::gaudin::GaudinModel;
use gaudin_kp::kp_verifier::{run_suite, SuiteOptions};
use gaudin_kp::scalar::qi;

fn main() {
    let m = GaudinModel::new(2, vec![qi(2), qi(-1)], vec![qi(0), qi(1)]).unwrap();
    let opts = SuiteOptions { seed: 7, samples: 2, ..SuiteOptions::default() };
    let names = ["commutativity", "closed_forms", "giambelli", "cbr", "fay", "exchange", "rank1"];
    for r in run_suite(&m, &names, &opts) {
        println!("{:<14} {:<5} exact {} residual {:e}", r.name, r.passed, r.exact, r.residual);
    }
}
