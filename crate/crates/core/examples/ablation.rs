//! Retrains the CRF and the rules on nested fractions of a synthetic training split.
//!
//!     cargo run --release --example ablation -- [docs]

use deid::corpus::{split_corpus, LabelSet, SplitRatios};
use deid::crf::CrfConfig;
use deid::eval::{ablation_run, CrfSystem, RuleSystem, Scenario};
use deid::synth::{generate, GeneratorConfig};

fn main() -> deid::Result<()> {
    let docs: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(200);
    let corpus = generate(&GeneratorConfig::new(5, docs))?;
    let split = split_corpus(&corpus, SplitRatios::default(), 5)?;
    let crf = CrfSystem {
        labels: LabelSet::nubes(),
        config: CrfConfig::default(),
    };
    let rules = RuleSystem::default();
    let report = ablation_run(&[&crf, &rules], &split, &[1.0, 10.0, 40.0, 100.0], 5)?;
    for system in ["crf", "rules"] {
        println!("{system}");
        for (fraction, f1) in report.curve(system, Scenario::TokenDetection) {
            println!("  {fraction:>5}%  {f1:.3}");
        }
    }
    print!("\n{}", report.deltas_csv());
    Ok(())
}
