//! Parses a BRAT document, prints its spans and writes it back out.

use deid::corpus::{parse_brat, serialize_brat, LabelSet};

const TEXT: &str = "Paciente de 64 años operado de una hernia el 12/01/2016 por la Dra Lopez";
const ANN: &str = "T1\tAge 12 19\t64 años\nT2\tDate 45 55\t12/01/2016\nT3\tDoctor 60 72\tla Dra Lopez\n";

fn main() -> deid::Result<()> {
    let doc = parse_brat("ejemplo", TEXT, ANN, &LabelSet::nubes())?;
    for a in &doc.annotations {
        println!("{:<8} [{:>2}, {:>2})  {}", a.category, a.start, a.end, a.surface);
    }
    let (txt, ann) = serialize_brat(&doc);
    assert_eq!(txt, TEXT);
    print!("\n{ann}");
    Ok(())
}
