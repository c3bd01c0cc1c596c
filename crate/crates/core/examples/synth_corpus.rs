//! Generates a synthetic corpus, reports its category shares and writes it as BRAT.
//!
//!     cargo run --example synth_corpus -- <out-dir> [docs] [seed]

use deid::corpus::write_brat_dir;
use deid::synth::{category_shares, generate, GeneratorConfig};

fn main() -> deid::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().unwrap_or_else(|| "synthetic-corpus".into());
    let docs: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(100);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let corpus = generate(&GeneratorConfig::new(seed, docs))?;
    for (cat, share) in category_shares(&corpus) {
        println!("{cat:<10} {share:>6.2}%");
    }
    write_brat_dir(&out, &corpus)?;
    println!("wrote {} documents to {out}", corpus.len());
    Ok(())
}
