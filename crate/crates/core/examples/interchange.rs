//! Writes gold and predicted labels as interchange TSV, then turns the predictions back into spans.

use deid::corpus::{labelled_sentences, InterchangeSentence, LabelSet};
use deid::eval::documents_from_interchange;
use deid::rules::{tag_rules, RuleSet};
use deid::synth::{generate, GeneratorConfig};

fn main() -> deid::Result<()> {
    let docs = generate(&GeneratorConfig::new(2, 2))?;
    let rules = RuleSet::compile(&[]);
    let rows: Vec<InterchangeSentence> = labelled_sentences(&docs)?
        .into_iter()
        .map(|ls| InterchangeSentence {
            pred: Some(tag_rules(&ls.sentence, &rules)),
            gold: Some(ls.labels),
            sentence: ls.sentence,
        })
        .collect();
    let path = std::env::temp_dir().join("deid-example.tsv");
    deid::corpus::write_interchange(&path, &rows)?;
    print!("{}", std::fs::read_to_string(&path)?.lines().take(12).collect::<Vec<_>>().join("\n"));
    println!("\n...");

    let read = deid::corpus::read_interchange(&path, &LabelSet::nubes())?;
    for d in documents_from_interchange(&read, &docs)? {
        for a in &d.annotations {
            println!("{} {} {:?}", d.id, a.category, a.surface);
        }
    }
    Ok(())
}
