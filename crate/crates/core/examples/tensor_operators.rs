//! Permutation operators and weight sectors on `(C^2)^{⊗3}`.

use gaudin_kp::scalar::Rational;
use gaudin_kp::tensor::{Permutation, SectorLabel, TensorOperator};

type Op = TensorOperator<Rational>;

fn main() {
    let (rank, sites) = (2, 3);
    let s = Permutation::new(vec![1, 2, 0]).unwrap();
    let p = Op::perm_op(rank, &s);
    println!("cycle {:?}: sign {}, {} nonzero entries", s.cycles(), s.sign(), p.nonzero_count());
    let cube = &(&p * &p) * &p;
    println!("P^3 = 1: {}", cube == Op::identity(rank, sites));

    for sector in SectorLabel::all(rank, sites) {
        let proj = Op::sector_projector(rank, sites, &sector).unwrap();
        let commutes = proj.commutator(&p).is_zero();
        println!("sector {:?}: dimension {}, basis {:?}, commutes with P: {commutes}", sector.counts(), sector.dimension(), sector.basis());
    }
}
