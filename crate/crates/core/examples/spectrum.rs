//! Direct diagonalization against the classical Bethe-type solutions in
//! each weight sector.

use gaudin_kp::gaudin::GaudinModel;
use gaudin_kp::scalar::qi;
use gaudin_kp::spectrum::spectrum_table;

fn main() {
    let m = GaudinModel::new(2, vec![qi(2), qi(-1)], vec![qi(0), qi(2), qi(5)]).unwrap();
    for sector in m.sectors() {
        let t = spectrum_table(&m, &sector, 1, 1e-9).unwrap();
        println!(
            "sector {:?}: dimension {}, {} classical, max deviation {:e}",
            t.sector,
            t.dimension,
            t.classical.len(),
            t.matching.max_deviation
        );
        for tuple in &t.direct {
            let h: Vec<String> = tuple.values.iter().map(|v| format!("{:.6}", v.re)).collect();
            println!("  H = [{}]", h.join(", "));
        }
    }
}
