//! Characters of `GL(N)` at a diagonal twist, through the two
//! Jacobi-Trudi forms and the bialternant.

use gaudin_kp::partitions::{character, character_bialternant, power_sum_times, schur_dual_jt, schur_jt, Partition};
use gaudin_kp::scalar::{format_rational, q, qi};

fn main() {
    let eigs = [qi(2), qi(-1), q(1, 2)];
    let times = power_sum_times(&eigs, 6);
    for lam in Partition::all_up_to(4) {
        let chi = character(&lam, &eigs);
        assert_eq!(chi, character_bialternant(&lam, &eigs).unwrap());
        assert_eq!(schur_jt(&lam, &times), schur_dual_jt(&lam, &times));
        let (a, b) = lam.frobenius();
        println!("{:<12} frobenius {a:?}|{b:?}  chi = {}", format!("{:?}", lam.parts()), format_rational(&chi));
    }
}
