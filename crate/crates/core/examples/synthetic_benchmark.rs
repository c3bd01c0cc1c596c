//! Trains both taggers on a synthetic corpus and scores them on its test split.
//!
//!     cargo run --release --example synthetic_benchmark -- [docs] [seed]

use deid::corpus::{labelled_sentences, split_corpus, LabelSet, SplitRatios};
use deid::crf::{fit_crf, CrfConfig};
use deid::eval::{evaluate_tagger, render_metrics_table};
use deid::rules::RuleSet;
use deid::synth::{generate, GeneratorConfig};

fn main() -> deid::Result<()> {
    let mut args = std::env::args().skip(1);
    let docs: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(500);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(7);

    let corpus = generate(&GeneratorConfig::new(seed, docs))?;
    let split = split_corpus(&corpus, SplitRatios::default(), seed)?;
    let train = labelled_sentences(&split.train)?;
    let dev = labelled_sentences(&split.dev)?;
    println!("{} train sentences, {} test documents", train.len(), split.test.len());

    let rules = RuleSet::compile(&split.train);
    println!("\nrules\n{}", render_metrics_table(&evaluate_tagger(&rules, &split.test)?));

    let (crf, stats) = fit_crf(&train, &dev, &LabelSet::nubes(), &CrfConfig::default())?;
    println!(
        "crf: {} iterations, {} features, {:.1}s",
        stats.iterations, stats.num_features, stats.wall_time_secs
    );
    println!("{}", render_metrics_table(&evaluate_tagger(&crf, &split.test)?));
    Ok(())
}
