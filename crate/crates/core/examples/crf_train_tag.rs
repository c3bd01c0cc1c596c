//! Trains a CRF on synthetic notes, saves and reloads it, and tags a new sentence.
//!
//!     cargo run --release --example crf_train_tag

use deid::corpus::{labelled_sentences, split_sentences, Document, LabelSet};
use deid::crf::{fit_crf, load_model, save_model, CrfConfig};
use deid::synth::{generate, GeneratorConfig};
use deid::Tagger;

fn main() -> deid::Result<()> {
    let docs = generate(&GeneratorConfig::new(11, 150))?;
    let train = labelled_sentences(&docs)?;
    let config = CrfConfig {
        max_iterations: 60,
        ..CrfConfig::default()
    };
    let (model, stats) = fit_crf(&train, &[], &LabelSet::nubes(), &config)?;
    println!("{} iterations, {} features, {:.1}s", stats.iterations, stats.num_features, stats.wall_time_secs);

    let path = std::env::temp_dir().join("deid-example.crf");
    save_model(&model, &path)?;
    let model = load_model(&path)?;

    let doc = Document::new("x", "Paciente de 71 años valorado el 04/05/2017 por el Dr Sancho en el Hospital Severo Ochoa.");
    for s in split_sentences(&doc) {
        for (t, l) in s.tokens.iter().zip(model.tag(&s)) {
            println!("{:<10} {l}", t.surface);
        }
    }
    Ok(())
}
