//! Decoding a type-class source as if it were i.i.d.: the divergence
//! penalty on the achievable rate and the resulting exponents.
//!
//! cargo run --example mismatched_rates

use pas_exponents::exponents::{exponent_em, exponent_esm, rate_thresholds_em};
use pas_exponents::{make_bsc, FactoredDmc, Pmf};

fn main() -> pas_exponents::Result<()> {
    let bsc = make_bsc(0.05)?;
    let fd = FactoredDmc::parallel(&bsc, &bsc)?;
    let px = Pmf::uniform(fd.base().input_labels().to_vec())?;
    let pbar = Pmf::indexed(vec![0.5, 0.5])?;

    println!("P_bar = (1/2, 1/2), uniform P_X on two parallel BSC(0.05)");
    println!("{:>6} {:>9} {:>9} {:>9} {:>9}", "P_A(0)", "I(X;Y)", "D", "I - D", "E_M");
    for p0 in [0.5, 0.6, 0.75, 0.9, 0.97] {
        let pa = Pmf::indexed(vec![p0, 1.0 - p0])?;
        let th = rate_thresholds_em(&pbar, &pa, &px, fd.base())?;
        let em = exponent_em(&pbar, &pa, &px, fd.base())?;
        println!(
            "{p0:>6} {:>9.5} {:>9.5} {:>9.5} {:>9.5}",
            th.mutual_info, th.penalty, th.rate_limit, em.exponent
        );
    }

    println!();
    println!("E_SM with matched P_A = P_bar: the alpha(n) term fades with n");
    let ps = Pmf::uniform(fd.s_labels().to_vec())?;
    let pa = Pmf::new(fd.a_labels().to_vec(), vec![0.5, 0.5])?;
    let pbar = pa.clone();
    for n in [4u64, 8, 16, 64, 256, 1024, 4096] {
        let e = exponent_esm(n, &pbar, &pa, &ps, &fd)?;
        println!("  n = {n:>4}: E_SM = {:>9.5}  bound 2^(-nE) = {:.3e}", e.exponent, e.bound(n));
    }
    Ok(())
}
