//! The `deid` command-line tool.
//!
//! Every command writes a `manifest.json` next to its outputs recording the
//! resolved flags, input and output hashes and seeds. `--config <file>`
//! reads `key = value` lines naming any long flag; flags given on the
//! command line win.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::anonymise::{anonymise_with_mapping, default_pools, leak_scan, AnonymisationPolicy, MappingEntry, Mode, SurrogatePools};
use crate::corpus::{
    labelled_sentences, read_brat_dir, read_interchange, split_corpus, write_brat_dir, write_interchange, Document,
    InterchangeSentence, LabelSet, SplitRatios,
};
use crate::crf::{fit_crf, load_model, save_model, CrfConfig};
use crate::error::{Error, Result};
use crate::eval::{
    ablation_run, align_documents, confusion_matrix, documents_from_interchange, render_metrics_table, score_all,
    tag_documents, CrfSystem, Metrics, RuleSystem, TrainableSystem, DEFAULT_FRACTIONS,
};
use crate::rules::RuleSet;
use crate::synth::{generate, GeneratorConfig};
use crate::tagger::Tagger;

#[derive(Parser, Debug, Serialize)]
#[command(name = "deid", version, about = "Clinical-text de-identification")]
pub struct Cli {
    /// `key = value` file supplying defaults for any long flag.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// error, warn, info, debug or trace.
    #[arg(long, global = true, default_value = "warn")]
    pub log_level: String,

    /// Category set: `nubes`, `meddocan`, or a file with one category per line.
    #[arg(long, global = true, default_value = "nubes")]
    pub labels: String,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Write a synthetic BRAT corpus.
    GenCorpus(GenCorpusArgs),
    /// Split a BRAT corpus into train/, dev/ and test/.
    Split(SplitArgs),
    /// Train a CRF model.
    TrainCrf(TrainCrfArgs),
    /// Compile gazetteers from a training corpus into a rules directory.
    BuildRules(BuildRulesArgs),
    /// Tag documents with the rules or a CRF model.
    Tag(TagArgs),
    /// Score predictions against gold annotations.
    Eval(EvalArgs),
    /// Retrain on nested fractions of the training data.
    Ablate(AblateArgs),
    /// Mask, placeholder or surrogate the annotated spans.
    Anonymise(AnonymiseArgs),
    /// Convert interchange TSV predictions into BRAT documents.
    ImportPredictions(ImportArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct GenCorpusArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub docs: usize,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0.35)]
    pub filler_ratio: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SplitArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: u64,
    /// train,dev,test proportions.
    #[arg(long, default_value = "0.72,0.08,0.20")]
    pub ratios: String,
}

#[derive(Args, Debug, Serialize)]
pub struct CrfArgs {
    #[arg(long, default_value_t = 0.1)]
    pub c1: f64,
    #[arg(long, default_value_t = 0.1)]
    pub c2: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub all_transitions: bool,
    /// Feature window offsets.
    #[arg(long, default_value = "-1,0,1", allow_hyphen_values = true)]
    pub window: String,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
}

impl CrfArgs {
    fn config(&self) -> Result<CrfConfig> {
        let window = self
            .window
            .split(',')
            .map(|w| w.trim().parse::<i32>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| Error::InvalidConfig(format!("window {:?} is not a list of integers", self.window)))?;
        let config = CrfConfig {
            max_iterations: self.max_iter,
            c1: self.c1,
            c2: self.c2,
            all_transitions: self.all_transitions,
            window,
            convergence_tol: self.tol,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args, Debug, Serialize)]
pub struct TrainCrfArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub dev: Option<PathBuf>,
    /// Output model file.
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub crf: CrfArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct BuildRulesArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub rules_dir: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct TagArgs {
    /// `rules` or `crf`.
    #[arg(long)]
    pub tagger: String,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub rules_dir: Option<PathBuf>,
    /// `brat` or `tsv`.
    #[arg(long, default_value = "brat")]
    pub format: String,
}

#[derive(Args, Debug, Serialize)]
pub struct EvalArgs {
    #[arg(long)]
    pub gold: PathBuf,
    /// A BRAT directory or an interchange TSV file.
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "system")]
    pub system: String,
    /// Exit nonzero when any scenario's F1 is below this.
    #[arg(long)]
    pub min_f1: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
pub struct AblateArgs {
    /// Directory holding train/, dev/ and test/.
    #[arg(long)]
    pub split_dir: Option<PathBuf>,
    /// Unsplit corpus, split here with `--seed` and `--ratios`.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long, default_value = "0.72,0.08,0.20")]
    pub ratios: String,
    #[arg(long)]
    pub seed: u64,
    /// Training fractions in percent.
    #[arg(long)]
    pub fractions: Option<String>,
    #[arg(long, default_value = "crf,rules")]
    pub systems: String,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub crf: CrfArgs,
}

#[derive(Args, Debug, Serialize)]
pub struct AnonymiseArgs {
    /// `mask`, `placeholder` or `surrogate`.
    #[arg(long)]
    pub mode: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// BRAT directory whose annotations mark the spans to replace.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write mapping.json with the original surfaces. Sensitive.
    #[arg(long)]
    pub keep_mapping: bool,
    #[arg(long, default_value_t = 'X')]
    pub mask_char: char,
    /// Template such as `<{CAT}>`; default pads `[-CAT-]` to the span length.
    #[arg(long)]
    pub placeholder_format: Option<String>,
    #[arg(long, default_value = "-365,365", allow_hyphen_values = true)]
    pub date_shift: String,
    #[arg(long, default_value = "-5,5", allow_hyphen_values = true)]
    pub age_shift: String,
}

#[derive(Args, Debug, Serialize)]
pub struct ImportArgs {
    #[arg(long)]
    pub tsv: PathBuf,
    /// BRAT directory supplying the document texts.
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

/// Provenance record written by every command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub config: serde_json::Value,
    pub corpus_hashes: BTreeMap<String, String>,
    pub seeds: BTreeMap<String, u64>,
    pub tool_version: String,
    pub started_at: u64,
    pub finished_at: u64,
    pub outputs: BTreeMap<String, String>,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// SHA-256 over a file, or over every file under a directory (relative
/// path and contents, in sorted order). `manifest.json` files are skipped.
pub fn hash_path(path: &Path) -> Result<String> {
    let mut h = Sha256::new();
    if path.is_file() {
        h.update(fs::read(path)?);
        return Ok(hex::encode(h.finalize()));
    }
    if !path.is_dir() {
        return Err(Error::FileMissing(path.to_path_buf()));
    }
    let mut files = Vec::new();
    let mut stack = vec![path.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(&dir)? {
            let p = e?.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.file_name().is_some_and(|n| n != "manifest.json") {
                files.push(p);
            }
        }
    }
    files.sort();
    for f in files {
        let rel = f.strip_prefix(path).unwrap_or(&f).to_string_lossy().replace('\\', "/");
        h.update(rel.as_bytes());
        h.update([0]);
        h.update(fs::read(&f)?);
        h.update([0]);
    }
    Ok(hex::encode(h.finalize()))
}

struct Run {
    manifest: RunManifest,
    manifest_path: PathBuf,
}

impl Run {
    fn start(name: &str, config: &impl Serialize, manifest_path: PathBuf) -> Result<Self> {
        let config = serde_json::to_value(config)?;
        let config_hash = hex::encode(Sha256::digest(serde_json::to_vec(&config)?));
        Ok(Self {
            manifest: RunManifest {
                command: name.to_string(),
                config_hash,
                config,
                corpus_hashes: BTreeMap::new(),
                seeds: BTreeMap::new(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                started_at: now(),
                finished_at: 0,
                outputs: BTreeMap::new(),
            },
            manifest_path,
        })
    }

    fn input(&mut self, path: &Path) -> Result<()> {
        self.manifest.corpus_hashes.insert(path.display().to_string(), hash_path(path)?);
        Ok(())
    }

    fn seed(&mut self, name: &str, seed: u64) {
        self.manifest.seeds.insert(name.to_string(), seed);
    }

    fn output(&mut self, path: &Path) -> Result<()> {
        self.manifest.outputs.insert(path.display().to_string(), hash_path(path)?);
        Ok(())
    }

    fn finish(mut self) -> Result<RunManifest> {
        self.manifest.finished_at = now();
        if let Some(parent) = self.manifest_path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&self.manifest_path, serde_json::to_string_pretty(&self.manifest)? + "\n")?;
        Ok(self.manifest)
    }
}

fn sibling_manifest(file: &Path) -> PathBuf {
    let mut name = file.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    file.with_file_name(name)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| x.trim().parse::<T>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| Error::InvalidConfig(format!("{what} {s:?} is not a comma-separated list of numbers")))
}

fn parse_range(s: &str, what: &str) -> Result<(i64, i64)> {
    match parse_list::<i64>(s, what)?[..] {
        [lo, hi] if lo <= hi => Ok((lo, hi)),
        _ => Err(Error::InvalidConfig(format!("{what} {s:?} must be `low,high`"))),
    }
}

fn parse_ratios(s: &str) -> Result<SplitRatios> {
    match parse_list::<f64>(s, "ratios")?[..] {
        [a, b, c] => SplitRatios::new(a, b, c),
        ref other => Err(Error::InvalidRatios(other.to_vec())),
    }
}

fn label_set(spec: &str) -> Result<LabelSet> {
    match spec {
        "nubes" => Ok(LabelSet::nubes()),
        "meddocan" => Ok(LabelSet::meddocan()),
        path => LabelSet::from_file(path),
    }
}

fn metrics_csv(system: &str, metrics: &[Metrics]) -> String {
    let mut out = String::from("system,fraction,scenario,precision,recall,f1,tp,fp,fn\n");
    for m in metrics {
        out.push_str(&format!(
            "{system},100,{},{:.6},{:.6},{:.6},{},{},{}\n",
            m.scenario.as_str(),
            m.precision,
            m.recall,
            m.f1,
            m.tp,
            m.fp,
            m.fn_
        ));
    }
    out
}

fn gen_corpus(a: &GenCorpusArgs) -> Result<()> {
    let mut run = Run::start("gen-corpus", a, a.out.join("manifest.json"))?;
    run.seed("seed", a.seed);
    let mut config = GeneratorConfig::new(a.seed, a.docs);
    config.filler_ratio = a.filler_ratio;
    let docs = generate(&config)?;
    write_brat_dir(&a.out, &docs)?;
    run.output(&a.out)?;
    run.finish()?;
    println!("wrote {} documents to {}", docs.len(), a.out.display());
    Ok(())
}

fn split(a: &SplitArgs, labels: &LabelSet) -> Result<()> {
    let mut run = Run::start("split", a, a.out.join("manifest.json"))?;
    run.input(&a.input)?;
    run.seed("seed", a.seed);
    let docs = read_brat_dir(&a.input, labels)?;
    let s = split_corpus(&docs, parse_ratios(&a.ratios)?, a.seed)?;
    for (name, part) in [("train", &s.train), ("dev", &s.dev), ("test", &s.test)] {
        let dir = a.out.join(name);
        write_brat_dir(&dir, part)?;
        run.output(&dir)?;
    }
    run.finish()?;
    println!("train {} / dev {} / test {}", s.train.len(), s.dev.len(), s.test.len());
    Ok(())
}

fn train_crf(a: &TrainCrfArgs, labels: &LabelSet) -> Result<()> {
    let config = a.crf.config()?;
    let mut run = Run::start("train-crf", a, sibling_manifest(&a.model))?;
    run.input(&a.train)?;
    let train = labelled_sentences(&read_brat_dir(&a.train, labels)?)?;
    let dev = match &a.dev {
        Some(d) => {
            run.input(d)?;
            labelled_sentences(&read_brat_dir(d, labels)?)?
        }
        None => Vec::new(),
    };
    let (model, stats) = fit_crf(&train, &dev, labels, &config)?;
    save_model(&model, &a.model)?;
    let mut stats_path = a.model.clone().into_os_string();
    stats_path.push(".stats.json");
    let stats_path = PathBuf::from(stats_path);
    fs::write(&stats_path, serde_json::to_string_pretty(&stats)? + "\n")?;
    run.output(&a.model)?;
    run.output(&stats_path)?;
    run.finish()?;
    println!(
        "{} iterations, {} features, objective {:.4}",
        stats.iterations,
        stats.num_features,
        stats.objective_history.last().copied().unwrap_or(f64::NAN)
    );
    Ok(())
}

fn build_rules(a: &BuildRulesArgs, labels: &LabelSet) -> Result<()> {
    let mut run = Run::start("build-rules", a, a.rules_dir.join("manifest.json"))?;
    run.input(&a.train)?;
    let rules = RuleSet::compile(&read_brat_dir(&a.train, labels)?);
    rules.save(&a.rules_dir)?;
    run.output(&a.rules_dir)?;
    run.finish()?;
    Ok(())
}

fn load_tagger(kind: &str, model: Option<&Path>, rules_dir: Option<&Path>) -> Result<Box<dyn Tagger>> {
    match kind {
        "crf" => {
            let path = model.ok_or_else(|| Error::InvalidConfig("--tagger crf needs --model".into()))?;
            Ok(Box::new(load_model(path)?))
        }
        "rules" => Ok(Box::new(match rules_dir {
            Some(d) => RuleSet::load(d)?,
            None => {
                log::warn!("no --rules-dir: using shipped patterns and names without gazetteers");
                RuleSet::compile(&[])
            }
        })),
        other => Err(Error::InvalidConfig(format!("unknown tagger {other:?}"))),
    }
}

fn tag(a: &TagArgs, labels: &LabelSet) -> Result<()> {
    let mut run = Run::start("tag", a, a.out.join("manifest.json"))?;
    run.input(&a.input)?;
    if let Some(m) = &a.model {
        run.input(m)?;
    }
    if let Some(r) = &a.rules_dir {
        run.input(r)?;
    }
    let tagger = load_tagger(&a.tagger, a.model.as_deref(), a.rules_dir.as_deref())?;
    let docs = read_brat_dir(&a.input, labels)?;
    let (aligned, pred_docs) = tag_documents(tagger.as_ref(), &docs)?;
    match a.format.as_str() {
        "brat" => {
            write_brat_dir(&a.out, &pred_docs)?;
            run.output(&a.out)?;
        }
        "tsv" => {
            let sentences = labelled_sentences(&docs)?;
            let rows: Vec<InterchangeSentence> = sentences
                .into_iter()
                .zip(aligned)
                .map(|(ls, al)| InterchangeSentence {
                    sentence: ls.sentence,
                    gold: Some(ls.labels),
                    pred: Some(al.pred),
                })
                .collect();
            let path = a.out.join("predictions.tsv");
            write_interchange(&path, &rows)?;
            run.output(&path)?;
        }
        other => return Err(Error::InvalidConfig(format!("unknown format {other:?}"))),
    }
    run.finish()?;
    println!("tagged {} documents", docs.len());
    Ok(())
}

fn read_predictions(path: &Path, gold: &[Document], labels: &LabelSet) -> Result<Vec<Document>> {
    if path.is_dir() {
        read_brat_dir(path, labels)
    } else {
        documents_from_interchange(&read_interchange(path, labels)?, gold)
    }
}

fn eval(a: &EvalArgs, labels: &LabelSet) -> Result<bool> {
    let manifest = a.out.as_ref().map(|o| o.join("manifest.json")).unwrap_or_else(|| sibling_manifest(&a.pred));
    let mut run = Run::start("eval", a, manifest)?;
    run.input(&a.gold)?;
    run.input(&a.pred)?;
    let gold = read_brat_dir(&a.gold, labels)?;
    let pred = read_predictions(&a.pred, &gold, labels)?;
    let aligned = align_documents(&gold, &pred)?;
    let metrics = score_all(&aligned, &gold, &pred)?;
    print!("{}", render_metrics_table(&metrics));
    if let Some(out) = &a.out {
        fs::create_dir_all(out)?;
        let gold_labels: Vec<_> = aligned.iter().flat_map(|s| s.gold.iter().cloned()).collect();
        let pred_labels: Vec<_> = aligned.iter().flat_map(|s| s.pred.iter().cloned()).collect();
        let cm = confusion_matrix(&gold_labels, &pred_labels, labels.categories())?;
        for (name, content) in [
            ("report.csv", metrics_csv(&a.system, &metrics)),
            ("confusion.tsv", cm.to_tsv()),
            ("confusion_counts.tsv", cm.counts_tsv()),
        ] {
            let p = out.join(name);
            fs::write(&p, content)?;
            run.output(&p)?;
        }
    }
    run.finish()?;
    Ok(match a.min_f1 {
        Some(gate) => {
            let failing: Vec<_> = metrics.iter().filter(|m| m.f1 < gate).collect();
            for m in &failing {
                eprintln!("gate: {} f1 {:.4} < {gate}", m.scenario.as_str(), m.f1);
            }
            failing.is_empty()
        }
        None => true,
    })
}

fn ablate(a: &AblateArgs, labels: &LabelSet) -> Result<()> {
    let mut run = Run::start("ablate", a, a.out.join("manifest.json"))?;
    run.seed("seed", a.seed);
    let split = match (&a.split_dir, &a.corpus) {
        (Some(dir), None) => {
            run.input(dir)?;
            let part = |name: &str| read_brat_dir(dir.join(name), labels);
            crate::corpus::CorpusSplit {
                train: part("train")?,
                dev: part("dev")?,
                test: part("test")?,
                seed: a.seed,
                ratios: parse_ratios(&a.ratios)?,
            }
        }
        (None, Some(corpus)) => {
            run.input(corpus)?;
            split_corpus(&read_brat_dir(corpus, labels)?, parse_ratios(&a.ratios)?, a.seed)?
        }
        _ => return Err(Error::InvalidConfig("give exactly one of --split-dir or --corpus".into())),
    };
    let fractions = match &a.fractions {
        Some(f) => parse_list::<f64>(f, "fractions")?,
        None => DEFAULT_FRACTIONS.to_vec(),
    };
    let crf = CrfSystem {
        labels: labels.clone(),
        config: a.crf.config()?,
    };
    let rules = RuleSystem::default();
    let mut systems: Vec<&dyn TrainableSystem> = Vec::new();
    for name in a.systems.split(',').map(str::trim) {
        match name {
            "crf" => systems.push(&crf),
            "rules" => systems.push(&rules),
            other => return Err(Error::InvalidConfig(format!("unknown system {other:?}"))),
        }
    }
    let report = ablation_run(&systems, &split, &fractions, a.seed)?;
    fs::create_dir_all(&a.out)?;
    for (name, content) in [
        ("ablation.csv", report.to_csv()),
        ("deltas.csv", report.deltas_csv()),
        ("ablation.json", serde_json::to_string_pretty(&report)? + "\n"),
    ] {
        let p = a.out.join(name);
        fs::write(&p, content)?;
        run.output(&p)?;
    }
    run.finish()?;
    print!("{}", report.to_csv());
    Ok(())
}

fn anonymise_cmd(a: &AnonymiseArgs, labels: &LabelSet) -> Result<()> {
    let mut run = Run::start("anonymise", a, a.out.join("manifest.json"))?;
    run.input(&a.input)?;
    run.seed("seed", a.seed);
    let policy = AnonymisationPolicy {
        mode: a.mode.parse::<Mode>()?,
        mask_char: a.mask_char,
        placeholder_format: a.placeholder_format.clone(),
        surrogate_seed: a.seed,
        date_shift_days: parse_range(&a.date_shift, "date shift")?,
        age_shift_years: parse_range(&a.age_shift, "age shift")?,
    };
    let mut pools = if policy.mode == Mode::Surrogate {
        default_pools()
    } else {
        SurrogatePools::empty()
    };
    let docs = read_brat_dir(&a.input, labels)?;
    if policy.mode == Mode::Surrogate {
        pools.extend_from_documents(&docs);
    }
    fs::create_dir_all(&a.out)?;
    let mut mapping: BTreeMap<String, Vec<MappingEntry>> = BTreeMap::new();
    let mut leaks = 0;
    for doc in &docs {
        let (text, entries) = anonymise_with_mapping(doc, &doc.annotations, &policy, &pools)?;
        if policy.mode != Mode::Surrogate {
            leaks += leak_scan(&text, &doc.annotations).len();
        }
        fs::write(a.out.join(format!("{}.txt", doc.id)), text)?;
        if a.keep_mapping {
            mapping.insert(doc.id.clone(), entries);
        }
    }
    if leaks > 0 {
        log::warn!("{leaks} original surfaces still occur in the output");
    }
    if a.keep_mapping {
        log::warn!("mapping.json holds the original sensitive text");
        fs::write(a.out.join("mapping.json"), serde_json::to_string_pretty(&mapping)? + "\n")?;
    }
    run.output(&a.out)?;
    run.finish()?;
    println!("anonymised {} documents ({})", docs.len(), policy.mode);
    Ok(())
}

fn import_predictions(a: &ImportArgs, labels: &LabelSet) -> Result<()> {
    let mut run = Run::start("import-predictions", a, a.out.join("manifest.json"))?;
    run.input(&a.tsv)?;
    run.input(&a.gold)?;
    let gold = read_brat_dir(&a.gold, labels)?;
    let docs = documents_from_interchange(&read_interchange(&a.tsv, labels)?, &gold)?;
    write_brat_dir(&a.out, &docs)?;
    run.output(&a.out)?;
    run.finish()?;
    println!("imported predictions for {} documents", docs.len());
    Ok(())
}

/// Flags that take no value; a config value of `true` turns them on.
const SWITCHES: &[&str] = &["keep-mapping"];

/// Appends `--key value` for each config-file entry whose flag is not
/// already on the command line.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let strs: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let path = strs.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            strs.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    });
    let Some(path) = path else { return Ok(args) };
    if !Path::new(&path).exists() {
        return Err(Error::FileMissing(path.into()));
    }
    let mut out = args;
    for (n, line) in fs::read_to_string(&path)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::MalformedLine {
            line: n + 1,
            reason: "expected `key = value`".into(),
        })?;
        let key = key.trim().replace('_', "-");
        let flag = format!("--{key}");
        let given = strs.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given || key == "config" {
            continue;
        }
        let value = value.trim();
        if SWITCHES.contains(&key.as_str()) {
            if value == "true" {
                out.push(flag.into());
            }
        } else {
            out.push(format!("{flag}={value}").into());
        }
    }
    Ok(out)
}

fn dispatch(cli: &Cli) -> Result<bool> {
    let labels = label_set(&cli.labels)?;
    match &cli.command {
        Command::GenCorpus(a) => gen_corpus(a)?,
        Command::Split(a) => split(a, &labels)?,
        Command::TrainCrf(a) => train_crf(a, &labels)?,
        Command::BuildRules(a) => build_rules(a, &labels)?,
        Command::Tag(a) => tag(a, &labels)?,
        Command::Eval(a) => return eval(a, &labels),
        Command::Ablate(a) => ablate(a, &labels)?,
        Command::Anonymise(a) => anonymise_cmd(a, &labels)?,
        Command::ImportPredictions(a) => import_predictions(a, &labels)?,
    }
    Ok(true)
}

fn report(e: &Error) -> i32 {
    eprintln!("error: {}: {e}", e.name());
    1
}

/// Runs the tool on `args` (program name first) and returns the exit
/// code: 0 on success, 1 for data errors or a failed `--min-f1` gate,
/// 2 for usage errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = match expand_config(args.into_iter().map(Into::into).collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let level = cli.log_level.parse().unwrap_or(log::LevelFilter::Warn);
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
    match dispatch(&cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => report(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(xs: &[&str]) -> Vec<OsString> {
        xs.iter().map(OsString::from).collect()
    }

    #[test]
    fn config_fills_missing_flags_only() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        fs::write(&cfg, "# crf\nc1 = 0.5\nmax_iter = 7\nkeep-mapping = true\n").unwrap();
        let args = os(&["deid", "train-crf", "--config", cfg.to_str().unwrap(), "--c1", "0.2"]);
        let out: Vec<String> = expand_config(args).unwrap().iter().map(|a| a.to_string_lossy().into_owned()).collect();
        assert!(out.contains(&"--max-iter=7".to_string()));
        assert!(out.contains(&"--keep-mapping".to_string()));
        assert!(!out.iter().any(|a| a.starts_with("--c1=")));
    }

    #[test]
    fn bad_config_line() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        fs::write(&cfg, "c1 0.5\n").unwrap();
        let args = os(&["deid", "--config", cfg.to_str().unwrap()]);
        assert!(matches!(expand_config(args), Err(Error::MalformedLine { line: 1, .. })));
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["deid", "no-such-command"]), 2);
        assert_eq!(run(["deid", "gen-corpus", "--docs", "3"]), 2);
    }

    #[test]
    fn data_errors_exit_1() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("absent");
        let out = dir.path().join("out");
        assert_eq!(
            run(["deid", "split", "--in", missing.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "1"]),
            1
        );
    }

    #[test]
    fn ranges_and_ratios() {
        assert_eq!(parse_range("-5,5", "x").unwrap(), (-5, 5));
        assert!(parse_range("5,-5", "x").is_err());
        assert!(matches!(parse_ratios("0.5,0.5"), Err(Error::InvalidRatios(_))));
        assert!(parse_ratios("0.72,0.08,0.20").is_ok());
    }
}
