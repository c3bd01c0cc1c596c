//! Tags free text with the pattern detectors and a gazetteer built from a tiny training set.

use deid::corpus::{parse_brat, split_sentences, Document, LabelSet};
use deid::rules::{tag_rules, RuleSet};

fn main() -> deid::Result<()> {
    let train = parse_brat(
        "train",
        "Ingresa en el Hospital La Paz.",
        "T1\tHospital 14 29\tHospital La Paz\n",
        &LabelSet::nubes(),
    )?;
    let rules = RuleSet::compile(&[train]);
    let doc = Document::new(
        "new",
        "Paciente de 64 años remitido desde el Hospital La Paz el 12/01/2016 a las 10:30 por la Dra Lopez.",
    );
    for s in split_sentences(&doc) {
        for (t, l) in s.tokens.iter().zip(tag_rules(&s, &rules)) {
            println!("{:<10} {l}", t.surface);
        }
    }
    Ok(())
}
