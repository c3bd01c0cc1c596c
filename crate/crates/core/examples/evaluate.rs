//! Scores a prediction against gold under all five scenarios and prints the confusion matrix.

use deid::corpus::{parse_brat, LabelSet};
use deid::eval::{align_documents, confusion_matrix, render_metrics_table, score_all};

const TEXT: &str = "Paciente de 64 años operado de una hernia el 12/01/2016 por la Dra Lopez";

fn main() -> deid::Result<()> {
    let labels = LabelSet::nubes();
    let gold = parse_brat(
        "d",
        TEXT,
        "T1\tAge 12 19\t64 años\nT2\tDate 45 55\t12/01/2016\nT3\tDoctor 60 72\tla Dra Lopez\n",
        &labels,
    )?;
    // Date found, Age mislabelled as Time, Doctor missing its article.
    let pred = parse_brat(
        "d",
        TEXT,
        "T1\tTime 12 19\t64 años\nT2\tDate 45 55\t12/01/2016\nT3\tDoctor 63 72\tDra Lopez\n",
        &labels,
    )?;
    let (gold, pred) = (vec![gold], vec![pred]);
    let aligned = align_documents(&gold, &pred)?;
    print!("{}", render_metrics_table(&score_all(&aligned, &gold, &pred)?));

    let g: Vec<_> = aligned.iter().flat_map(|s| s.gold.clone()).collect();
    let p: Vec<_> = aligned.iter().flat_map(|s| s.pred.clone()).collect();
    print!("\n{}", confusion_matrix(&g, &p, labels.categories())?.to_tsv());
    Ok(())
}
