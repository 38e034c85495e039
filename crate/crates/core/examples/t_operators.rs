//! T-operators of a twisted Gaudin model and their commutativity.

use gaudin_kp::gaudin::GaudinModel;
use gaudin_kp::partitions::Partition;
use gaudin_kp::scalar::{format_rational, q, qi};

fn main() {
    let m = GaudinModel::new(2, vec![qi(2), qi(-1)], vec![qi(0), qi(2), qi(5)]).unwrap();
    let (x, y) = (q(7, 3), q(-1, 2));
    let lams: Vec<Partition> = Partition::all_up_to(3).into_iter().filter(|l| l.length() <= 2).collect();
    for a in &lams {
        let ta = m.t_operator_at(a, &x).unwrap();
        for b in &lams {
            let tb = m.t_operator_at(b, &y).unwrap();
            assert!(ta.commutator(&tb).is_zero());
        }
        println!("T_{:?}({}) has {} nonzero entries", a.parts(), format_rational(&x), ta.nonzero_count());
    }
    for (i, h) in m.hamiltonians().unwrap().iter().enumerate() {
        println!("H_{} trace {}", i + 1, format_rational(&h.matrix().trace()));
    }
}
