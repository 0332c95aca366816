//! Type classes: exact sizes against the polynomial bounds, sequence
//! probabilities, ranking, and quantizing a distribution to an n-type.
//!
//! cargo run --example type_classes

use pas_exponents::prob::{entropy, kl_divergence};
use pas_exponents::typeclass::{
    enumerate_type_class, quantize_to_ntype, rank_type_sequence, type_class_info, type_sequence_prob,
    unrank_type_sequence,
};
use pas_exponents::{NType, Pmf};

fn main() -> pas_exponents::Result<()> {
    let abc: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let t = NType::new(abc.clone(), vec![2, 1, 1])?;
    println!("T(2,1,1) has {} members:", t.cardinality().unwrap());
    for seq in enumerate_type_class(&t, 100)? {
        let word: String = seq.iter().map(|&i| abc[i].as_str()).collect();
        println!("  {:>2}  {word}", rank_type_sequence(&t, &seq)?);
    }

    println!();
    println!("log2 |T| against n H - |A| log2(n+1) <= log2 |T| <= n H:");
    for n in [10u64, 40, 160, 640] {
        let t = NType::new(abc.clone(), vec![n / 2, n * 3 / 10, n - n / 2 - n * 3 / 10])?;
        let info = type_class_info(&t);
        println!(
            "  n = {n:>3}: {:>9.3} <= {:>9.3} <= {:>9.3}",
            info.lower_bound_bits, info.log2_cardinality_exact, info.upper_bound_bits
        );
    }

    let q = Pmf::new(abc.clone(), vec![0.6, 0.3, 0.1])?;
    let t = NType::new(abc.clone(), vec![5, 3, 2])?;
    let p = t.as_pmf();
    println!();
    println!(
        "Q^n(x) for x in T(0.5,0.3,0.2), n = 10: 2^{:.4}  (= -n(H + D) with H = {:.4}, D = {:.4})",
        type_sequence_prob(&t, &q)?,
        entropy(&p),
        kl_divergence(&p, &q)?
    );
    println!("member of rank 100: {:?}", unrank_type_sequence(&t, 100)?);

    println!();
    println!("closest n-type to (0.6, 0.3, 0.1):");
    for n in [1u64, 2, 3, 5, 8, 13, 21] {
        let t = quantize_to_ntype(&q, n)?;
        println!("  n = {n:>2}: counts {:?}  D = {:.5}", t.counts(), kl_divergence(&t.as_pmf(), &q)?);
    }
    Ok(())
}
