//! Error exponents of systematic encoding on 4-ASK with Maxwell-Boltzmann
//! amplitudes, compared with the unconstrained exponent for the same input.
//!
//! cargo run --example ask_exponents

use pas_exponents::exponents::{dms_renyi, exponent_eg, exponent_es, rate_thresholds_es};
use pas_exponents::prob::entropy;
use pas_exponents::{make_ask_awgn, maxwell_boltzmann, product_input, AskAwgn, Pmf};

fn main() -> pas_exponents::Result<()> {
    let snr = 8.0;
    let fd = make_ask_awgn(2, snr, 64, 4.0)?;
    let amplitudes = AskAwgn::new(2, snr).amplitudes();
    let ps = Pmf::uniform(fd.s_labels().to_vec())?;

    println!("4-ASK at {snr} dB, uniform signs");
    println!("{:>5} {:>8} {:>8} {:>8} {:>8}", "nu", "H(A)", "I(X;Y)", "E_S", "E_G");
    for nu in [0.0, 0.05, 0.1, 0.2, 0.4] {
        let mb = maxwell_boltzmann(&amplitudes, nu)?;
        let pa = Pmf::new(fd.a_labels().to_vec(), mb.probs().to_vec())?;
        let th = rate_thresholds_es(&pa, &ps, &fd)?;
        let es = exponent_es(&pa, &ps, &fd)?;
        // the same source sent with an unconstrained code drawn from P_A P_S
        let px = product_input(&pa, &ps, &fd)?;
        let eg = exponent_eg(&px, fd.base(), dms_renyi(&pa))?;
        println!(
            "{nu:>5} {:>8.4} {:>8.4} {:>8.4} {:>8.4}",
            entropy(&pa),
            th.mutual_info,
            es.exponent,
            eg.exponent
        );
    }

    let pa = Pmf::new(fd.a_labels().to_vec(), maxwell_boltzmann(&amplitudes, 0.1)?.probs().to_vec())?;
    let es = exponent_es(&pa, &ps, &fd)?;
    println!();
    println!("E_S curve at nu = 0.1, every 32nd grid point:");
    for (r, v) in es.curve.rho_values.iter().zip(&es.curve.integrand_values).step_by(32) {
        println!("  rho = {r:.3}  integrand = {v:.5}");
    }
    println!("  maximum {:.6} at rho* = {:.4}", es.exponent, es.rho_star);
    Ok(())
}
