//! Renders one sentence with each anonymisation mode and restores the original from the side table.

use deid::anonymise::{anonymise, anonymise_with_mapping, default_pools, restore, AnonymisationPolicy, Mode};
use deid::corpus::{parse_brat, LabelSet};

fn main() -> deid::Result<()> {
    let doc = parse_brat(
        "d",
        "Paciente de 64 años operado de una hernia el 12/01/2016 por la Dra Lopez",
        "T1\tAge 12 19\t64 años\nT2\tDate 45 55\t12/01/2016\nT3\tDoctor 60 72\tla Dra Lopez\n",
        &LabelSet::nubes(),
    )?;
    for mode in [Mode::Mask, Mode::Placeholder] {
        println!("{mode:<12} {}", anonymise(&doc, &doc.annotations, &AnonymisationPolicy::new(mode))?);
    }
    let policy = AnonymisationPolicy {
        mode: Mode::Surrogate,
        surrogate_seed: 2016,
        age_shift_years: (-5, -5),
        ..AnonymisationPolicy::default()
    };
    let (text, mapping) = anonymise_with_mapping(&doc, &doc.annotations, &policy, &default_pools())?;
    println!("{:<12} {text}", "surrogate");
    println!("{:<12} {}", "restored", restore(&text, &mapping)?);
    Ok(())
}
