//! Fits the absolute constants frozen in `qclab::calibration`.
//!
//! Run with `cargo run --release --example calibrate [jl|lemma4]`.

use qclab::calibration::{calibrate_jl, calibrate_lemma4, JL_CALIBRATION_SEED, JL_CALIBRATION_TRIALS};

fn main() -> qclab::Result<()> {
    let which = std::env::args().nth(1).unwrap_or_else(|| "all".into());
    if which == "all" || which == "jl" {
        let cal = calibrate_jl(JL_CALIBRATION_TRIALS, JL_CALIBRATION_SEED)?;
        println!("# jl cells: n,k,epsilon,N,trials,empirical_failure,implied_c");
        for (r, c) in &cal.cells {
            println!("{},{},{},{},{},{},{:.4}", r.n, r.k, r.epsilon, r.num_points, r.trials, r.empirical_failure, c);
        }
        println!("JL_FAILURE_CONSTANT = {:?}", cal.constant);
    }
    if which == "all" || which == "lemma4" {
        let cal = calibrate_lemma4()?;
        println!("# lemma4 cells: p,t,seed,count,mean_norm,implied_c");
        for c in &cal.cells {
            println!("{:.4},{:.2},{},{},{:.6},{:.4}", c.p, c.t, c.seed, c.count, c.mean_norm, c.implied);
        }
        println!("LEMMA4_CONSTANT = {:?}", cal.constant);
    }
    Ok(())
}
