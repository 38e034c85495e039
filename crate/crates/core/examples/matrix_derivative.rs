//! Co-derivatives of a character, evaluated at a twist and times.

use gaudin_kp::matrix_derivative::HFunction;
use gaudin_kp::partitions::Partition;
use gaudin_kp::scalar::{format_rational, qi};

fn main() {
    let lam = Partition::new(vec![2, 1]).unwrap();
    let twist = [qi(2), qi(-1)];
    let times = [qi(1), qi(0)];
    let f = HFunction::character(2, 2, &lam).with_tag(2, &[]).unwrap();
    for slots in [vec![0], vec![1], vec![0, 1], vec![1, 0]] {
        let mut g = f.clone();
        for &j in &slots {
            g = g.mat_derive(j).unwrap();
        }
        let e = g.evaluate(&twist, &times, &[]).unwrap();
        let diag: Vec<String> = (0..e.op.dim()).map(|i| format_rational(e.op.get(i, i))).collect();
        println!("slots {slots:?}: log scale {}, diagonal [{}]", format_rational(&e.log_scale), diag.join(", "));
    }
}
