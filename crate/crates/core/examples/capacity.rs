//! Capacity of a few channels by Blahut-Arimoto.
//!
//! cargo run --example capacity

use pas_exponents::optimize::blahut_arimoto;
use pas_exponents::{make_ask_awgn, make_bsc, Dmc};

fn main() -> pas_exponents::Result<()> {
    for p in [0.01, 0.05, 0.11, 0.25] {
        let r = blahut_arimoto(&make_bsc(p)?, 1e-10, 10_000)?;
        println!("BSC({p:<4})  C = {:.6} bits  ({} iterations)", r.capacity, r.iterations);
    }

    // Z-channel: the optimal input is not uniform.
    let z = Dmc::new(
        vec!["0".into(), "1".into()],
        vec!["0".into(), "1".into()],
        vec![vec![1.0, 0.0], vec![0.5, 0.5]],
    )?;
    let r = blahut_arimoto(&z, 1e-12, 100_000)?;
    println!("Z(1/2)     C = {:.6} bits  P(1) = {:.4}", r.capacity, r.px_star.prob(1));

    println!();
    println!("8-ASK over AWGN, 64 output cells");
    for snr in [0.0, 5.0, 10.0, 15.0, 20.0] {
        let fd = make_ask_awgn(3, snr, 64, 4.0)?;
        let r = blahut_arimoto(fd.base(), 1e-9, 100_000)?;
        let px: Vec<String> = r.px_star.probs().iter().map(|p| format!("{p:.3}")).collect();
        println!("  {snr:>4} dB  C = {:.4}  P_X* = [{}]", r.capacity, px.join(" "));
    }
    Ok(())
}
