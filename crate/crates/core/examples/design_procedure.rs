//! The design procedure: optimize `P_A x P_S` for a channel, then quantize
//! `P_A` to an n-type and read off the rate thresholds.
//!
//! cargo run --example design_procedure

use pas_exponents::exponents::rate_thresholds_em;
use pas_exponents::optimize::{blahut_arimoto, maximize_product_mi, project_to_ntype_design};
use pas_exponents::prob::kl_divergence;
use pas_exponents::{make_ask_awgn, product_input};

fn main() -> pas_exponents::Result<()> {
    let fd = make_ask_awgn(3, 12.0, 64, 4.0)?;
    let opt = maximize_product_mi(&fd, 1e-10, 50_000, 8)?;
    let cap = blahut_arimoto(fd.base(), 1e-10, 100_000)?;
    println!("8-ASK at 12 dB");
    println!("  max over P_A P_S of I(X;Y) = {:.6} bits (converged: {})", opt.mi, opt.converged);
    println!("  capacity                   = {:.6} bits", cap.capacity);
    println!("  P_A* = {:?}", round(opt.pa_star.probs()));
    println!("  P_S* = {:?}", round(opt.ps_star.probs()));

    let px = product_input(&opt.pa_star, &opt.ps_star, &fd)?;
    println!();
    println!("{:>4}  {:<22} {:>10} {:>10} {:>10}", "n", "counts", "D", "H(P_bar)", "I - D");
    for n in [4u64, 8, 16, 32, 64, 128, 256] {
        let t = project_to_ntype_design(&opt.pa_star, n)?;
        let pbar = t.as_pmf();
        let th = rate_thresholds_em(&pbar, &opt.pa_star, &px, fd.base())?;
        println!(
            "{n:>4}  {:<22} {:>10.6} {:>10.5} {:>10.5}",
            format!("{:?}", t.counts()),
            kl_divergence(&pbar, &opt.pa_star)?,
            th.source_entropy,
            th.rate_limit
        );
    }
    Ok(())
}

fn round(p: &[f64]) -> Vec<f64> {
    p.iter().map(|v| (v * 1e4).round() / 1e4).collect()
}
