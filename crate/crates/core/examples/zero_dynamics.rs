//! Zeros of a master T-operator eigenvalue move as Calogero-Moser
//! particles in the second time.

use gaudin_kp::calogero::zero_dynamics;
use gaudin_kp::gaudin::GaudinModel;
use gaudin_kp::scalar::qi;
use gaudin_kp::spectrum::direct_eigenstates;
use gaudin_kp::tensor::SectorLabel;

fn main() {
    let m = GaudinModel::new(2, vec![qi(2), qi(-1)], vec![qi(0), qi(2), qi(5)]).unwrap();
    let sector = SectorLabel::new(vec![2, 1], 3).unwrap();
    let states = direct_eigenstates(&m, &sector, 0).unwrap().states;
    let z = zero_dynamics(&m, &states[0], 0.1, 10).unwrap();
    print!("{}", z.master.to_csv());
    println!("master vs flow {:e}, tau vs flow {:e}", z.master_vs_flow, z.tau_vs_flow);
    println!("velocity error {:e}, acceleration error {:e}", z.velocity_error, z.acceleration_error);
}
