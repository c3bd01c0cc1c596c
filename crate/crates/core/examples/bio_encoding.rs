//! Tokenizes a document, labels it in BIO and decodes the labels back to spans.

use deid::corpus::{decode_bio, encode_document, parse_brat, LabelSet, RepairPolicy};

fn main() -> deid::Result<()> {
    let text = "Acudirá a la Clínica Marseille. Alta el 3 de marzo.";
    let ann = "T1\tHospital 10 30\tla Clínica Marseille\nT2\tDate 40 50\t3 de marzo\n";
    let doc = parse_brat("d", text, ann, &LabelSet::nubes())?;
    let mut tokens = Vec::new();
    let mut labels = Vec::new();
    for ls in encode_document(&doc)? {
        for (t, l) in ls.sentence.tokens.iter().zip(&ls.labels) {
            println!("{:<12} {l}", t.surface);
        }
        println!();
        tokens.extend(ls.sentence.tokens);
        labels.extend(ls.labels);
    }
    let decoded = decode_bio(&doc.text, &tokens, &labels, RepairPolicy::IAsB)?;
    for a in &decoded {
        println!("{} {:?}", a.category, a.surface);
    }
    Ok(())
}
