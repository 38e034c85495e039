//! Second Calogero-Moser flow from a real phase point, with the
//! conserved traces.

use gaudin_kp::calogero::{integrate, CMPhase};
use num_complex::Complex64;

fn main() {
    let c = |v: f64| Complex64::new(v, 0.0);
    let phase = CMPhase::new(vec![c(0.0), c(2.0), c(5.0)], vec![c(0.5), c(-0.25), c(0.1)]).unwrap();
    let report = integrate(&phase, 2, 0.01, 20).unwrap();
    for (t, ph) in report.times.iter().zip(&report.phases).step_by(5) {
        let x: Vec<String> = ph.x.iter().map(|v| format!("{:.6}", v.re)).collect();
        println!("t = {t:.2}  x = [{}]", x.join(", "));
    }
    println!("drift {:e}, min separation {:.4}, substeps {}", report.drift, report.min_separation, report.substeps);
}
