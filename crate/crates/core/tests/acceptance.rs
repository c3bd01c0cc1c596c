//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the lines always print; exits nonzero if any check fails.

use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use deid::anonymise::{anonymise, anonymise_with_mapping, leak_scan, AnonymisationPolicy, Mode, SurrogatePools};
use deid::corpus::{
    decode_bio, encode_document, labelled_sentences, parse_brat, read_brat_dir, split_corpus, Annotation,
    Document, LabelSet, LabelledSentence, RepairPolicy, Sentence, SplitRatios,
};
use deid::crf::{fit_crf, viterbi, CrfConfig, CrfModel};
use deid::eval::{
    ablation_run, align_documents, evaluate_tagger, score_all, CrfSystem, Metrics, Scenario, DEFAULT_FRACTIONS,
};
use deid::rules::RuleSet;
use deid::synth::{generate, GeneratorConfig};

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> (bool, String) {
    (elapsed.as_secs() < limit_secs, format!("{:.1}s of {limit_secs}s", elapsed.as_secs_f64()))
}

// ---------------------------------------------------------------- BIO

fn bio_round_trip() -> Outcome {
    let docs = generate(&GeneratorConfig::new(1000, 1000)).expect("generate");
    let start = Instant::now();
    let mut mismatches = 0;
    let mut spans = 0;
    for doc in &docs {
        let mut tokens = Vec::new();
        let mut labels = Vec::new();
        for ls in encode_document(doc).expect("encode") {
            tokens.extend(ls.sentence.tokens);
            labels.extend(ls.labels);
        }
        let decoded = decode_bio(&doc.text, &tokens, &labels, RepairPolicy::Strict).expect("decode");
        let key = |a: &Annotation| (a.start, a.end, a.category.clone(), a.surface.clone());
        let mut want: Vec<_> = doc.annotations.iter().map(key).collect();
        let mut got: Vec<_> = decoded.iter().map(key).collect();
        want.sort();
        got.sort();
        spans += want.len();
        if want != got {
            mismatches += 1;
        }
    }
    let (fast, t) = within(start.elapsed(), 10);
    check(mismatches == 0 && fast, format!("{} docs, {spans} spans, {mismatches} mismatches, {t}", docs.len()))
}

// ---------------------------------------------------------------- Viterbi

fn path_score(e: &[f64], tr: &[f64], l: usize, path: &[usize]) -> f64 {
    let mut s = 0.0;
    for (t, &y) in path.iter().enumerate() {
        s += e[t * l + y];
        if t > 0 {
            s += tr[path[t - 1] * l + y];
        }
    }
    s
}

fn all_paths(t_len: usize, l: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..l.pow(t_len as u32)).map(move |mut code| {
        let mut p = vec![0; t_len];
        for slot in p.iter_mut().rev() {
            *slot = code % l;
            code /= l;
        }
        p
    })
}

fn viterbi_optimality() -> Outcome {
    let start = Instant::now();
    let (mut instances, mut mismatches) = (0, 0);
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for t_len in 1..=6 {
            for l in 1..=5 {
                let e: Vec<f64> = (0..t_len * l).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let tr: Vec<f64> = (0..l * l).map(|_| rng.gen_range(-3.0..3.0)).collect();
                let best = all_paths(t_len, l)
                    .max_by(|a, b| path_score(&e, &tr, l, a).total_cmp(&path_score(&e, &tr, l, b)))
                    .unwrap();
                instances += 1;
                if viterbi(&e, &tr, l) != best {
                    mismatches += 1;
                }
            }
        }
    }
    let (fast, t) = within(start.elapsed(), 30);
    check(mismatches == 0 && fast, format!("{instances} instances, {mismatches} mismatches, {t}"))
}

// ---------------------------------------------------------------- CRF gradient

const WORDS: &[&str] = &["el", "Dr", "Lopez", "12/01/2016", "de", "64", "años", "Madrid", "hernia", "."];

fn random_batch(rng: &mut ChaCha8Rng, labels: &LabelSet) -> Vec<LabelledSentence> {
    let alphabet = labels.alphabet();
    (0..rng.gen_range(2..5))
        .map(|_| {
            let n = rng.gen_range(1..7);
            let words: Vec<&str> = (0..n).map(|_| WORDS[rng.gen_range(0..WORDS.len())]).collect();
            LabelledSentence {
                sentence: Sentence::from_words(&words),
                labels: (0..n).map(|_| alphabet[rng.gen_range(0..alphabet.len())].clone()).collect(),
            }
        })
        .collect()
}

fn crf_gradient() -> Outcome {
    let labels = LabelSet::new(["Date", "Doctor"]);
    let h = 1e-5;
    let (mut coords, mut worst, mut worst_marginal, mut brute_gap) = (0, 0.0f64, 0.0f64, 0.0f64);
    for m in 0..6u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + m);
        let batch = random_batch(&mut rng, &labels);
        let config = CrfConfig {
            c2: rng.gen_range(0.0..0.5),
            ..CrfConfig::default()
        };
        let mut model = CrfModel::from_training(labels.clone(), &batch, config).expect("model");
        let w: Vec<f64> = (0..model.num_parameters()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        model.set_weights(w.clone()).unwrap();
        let (_, grad) = model.log_likelihood_and_gradient(&batch).unwrap();
        for _ in 0..12 {
            let j = rng.gen_range(0..w.len());
            let mut at = |x: f64| {
                let mut v = w.clone();
                v[j] = x;
                model.set_weights(v).unwrap();
                model.log_likelihood_and_gradient(&batch).unwrap().0
            };
            let fd = (at(w[j] + h) - at(w[j] - h)) / (2.0 * h);
            let rel = (grad[j] - fd).abs() / grad[j].abs().max(fd.abs()).max(1e-6);
            worst = worst.max(rel);
            coords += 1;
        }
        model.set_weights(w.clone()).unwrap();
        let l = model.num_labels();
        for ls in &batch {
            let marg = model.marginals(&ls.sentence).unwrap();
            let t_len = ls.sentence.len();
            for t in 0..t_len {
                let s: f64 = marg[t * l..(t + 1) * l].iter().sum();
                worst_marginal = worst_marginal.max((s - 1.0).abs());
            }
            // Marginals by enumeration.
            let e = model.emission_scores(&ls.sentence).unwrap();
            let tr = model.transitions();
            let mut z = 0.0;
            let mut brute = vec![0.0; t_len * l];
            for p in all_paths(t_len, l) {
                let weight = path_score(&e, tr, l, &p).exp();
                z += weight;
                for (t, &y) in p.iter().enumerate() {
                    brute[t * l + y] += weight;
                }
            }
            for (b, m) in brute.iter().zip(&marg) {
                brute_gap = brute_gap.max((b / z - m).abs());
            }
        }
    }
    check(
        coords >= 50 && worst < 1e-4 && worst_marginal <= 1e-9 && brute_gap <= 1e-9,
        format!(
            "{coords} coordinates over 6 models, max rel err {worst:.2e}; marginal sums off by {worst_marginal:.1e}, vs enumeration {brute_gap:.1e}"
        ),
    )
}

// ---------------------------------------------------------------- metric oracle

const CATS: &[&str] = &["Date", "Age", "Doctor"];

/// Random non-overlapping token spans `(first, last_exclusive, category)`.
fn random_spans(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize, usize)> {
    let mut spans = Vec::new();
    let mut i = 0;
    while i < n {
        if rng.gen_bool(0.3) {
            let len = rng.gen_range(1..=3).min(n - i);
            spans.push((i, i + len, rng.gen_range(0..CATS.len())));
            i += len;
        }
        i += 1;
    }
    spans
}

fn perturb(rng: &mut ChaCha8Rng, gold: &[(usize, usize, usize)], n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for &(s, e, c) in gold {
        match rng.gen_range(0..5) {
            0 => {}
            1 => out.push((s, e, rng.gen_range(0..CATS.len()))),
            2 if e - s > 1 => out.push((s + 1, e, c)),
            3 if e < n && !gold.iter().any(|g| g.0 == e) => out.push((s, e + 1, c)),
            _ => out.push((s, e, c)),
        }
    }
    for (s, e, c) in random_spans(rng, n) {
        if rng.gen_bool(0.2) && !out.iter().any(|o| o.0 < e && s < o.1) {
            out.push((s, e, c));
        }
    }
    out
}

fn doc_from_spans(id: &str, n: usize, spans: &[(usize, usize, usize)]) -> Document {
    let words: Vec<String> = (0..n).map(|k| format!("t{k}")).collect();
    let mut starts = Vec::new();
    let mut pos = 0;
    for w in &words {
        starts.push(pos);
        pos += w.len() + 1;
    }
    let mut doc = Document::new(id, words.join(" "));
    for &(s, e, c) in spans {
        doc.annotate(CATS[c], starts[s], starts[e - 1] + words[e - 1].len()).unwrap();
    }
    doc
}

/// Per-token category, or `None` for outside, with a begin flag.
fn token_view(n: usize, spans: &[(usize, usize, usize)]) -> Vec<Option<(usize, bool)>> {
    let mut v = vec![None; n];
    for &(s, e, c) in spans {
        for (k, slot) in v.iter_mut().enumerate().take(e).skip(s) {
            *slot = Some((c, k == s));
        }
    }
    v
}

fn reference_metrics(n: usize, gold: &[(usize, usize, usize)], pred: &[(usize, usize, usize)]) -> Vec<(usize, usize, usize)> {
    let (g, p) = (token_view(n, gold), token_view(n, pred));
    let mut out = Vec::new();
    let hits: [Box<dyn Fn(Option<(usize, bool)>, Option<(usize, bool)>) -> bool>; 3] = [
        Box::new(|a, b| a.is_some() && b.is_some()),
        Box::new(|a, b| a.is_some() && a.map(|x| x.0) == b.map(|x| x.0)),
        Box::new(|a, b| a.is_some() && a == b),
    ];
    for hit in &hits {
        let tp = (0..n).filter(|&k| hit(g[k], p[k])).count();
        let pred_pos = p.iter().filter(|x| x.is_some()).count();
        let gold_pos = g.iter().filter(|x| x.is_some()).count();
        out.push((tp, pred_pos - tp, gold_pos - tp));
    }
    for with_cat in [false, true] {
        let mut used = vec![false; gold.len()];
        let mut tp = 0;
        for q in pred {
            for (i, gs) in gold.iter().enumerate() {
                if !used[i] && gs.0 == q.0 && gs.1 == q.1 && (!with_cat || gs.2 == q.2) {
                    used[i] = true;
                    tp += 1;
                    break;
                }
            }
        }
        out.push((tp, pred.len() - tp, gold.len() - tp));
    }
    out
}

fn prf(tp: usize, fp: usize, fn_: usize) -> (f64, f64, f64) {
    let p = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let r = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f)
}

fn metric_oracle() -> Outcome {
    let (mut disagreements, mut order_violations) = (0, 0);
    for case in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(case);
        let n = rng.gen_range(1..25);
        let gold = random_spans(&mut rng, n);
        let pred = perturb(&mut rng, &gold, n);
        let gd = vec![doc_from_spans("d", n, &gold)];
        let pd = vec![doc_from_spans("d", n, &pred)];
        let aligned = align_documents(&gd, &pd).unwrap();
        let engine: Vec<Metrics> = score_all(&aligned, &gd, &pd).unwrap();
        let reference = reference_metrics(n, &gold, &pred);
        for (m, &(tp, fp, fn_)) in engine.iter().zip(&reference) {
            let (p, r, f) = prf(tp, fp, fn_);
            if (m.tp, m.fp, m.fn_) != (tp, fp, fn_) || m.precision != p || m.recall != r || m.f1 != f {
                disagreements += 1;
            }
        }
        if !(engine[0].f1 >= engine[1].f1 && engine[1].f1 >= engine[2].f1) {
            order_violations += 1;
        }
    }
    check(
        disagreements == 0 && order_violations == 0,
        format!("1000 cases x 5 scenarios, {disagreements} disagreements, {order_violations} ordering violations"),
    )
}

// ---------------------------------------------------------------- synthetic end to end

fn metric(ms: &[Metrics], s: Scenario) -> &Metrics {
    ms.iter().find(|m| m.scenario == s).unwrap()
}

fn synthetic_end_to_end(corpus: &[Document]) -> Outcome {
    let start = Instant::now();
    let split = split_corpus(corpus, SplitRatios::default(), 7).unwrap();
    let train = labelled_sentences(&split.train).unwrap();
    let dev = labelled_sentences(&split.dev).unwrap();
    let (crf, _) = fit_crf(&train, &dev, &LabelSet::nubes(), &CrfConfig::default()).unwrap();
    let crf_strict = metric(&evaluate_tagger(&crf, &split.test).unwrap(), Scenario::TokenStrict).f1;
    let rules = RuleSet::compile(&split.train);
    let rm = evaluate_tagger(&rules, &split.test).unwrap();
    let r = metric(&rm, Scenario::TokenStrict);
    let (fast, t) = within(start.elapsed(), 600);
    check(
        crf_strict >= 0.95 && r.precision > r.recall && fast,
        format!(
            "crf strict F1 {crf_strict:.3}; rules strict P {:.3} R {:.3}; {t}",
            r.precision, r.recall
        ),
    )
}

// ---------------------------------------------------------------- ablation

fn ablation_shape(corpus: &[Document]) -> Outcome {
    let start = Instant::now();
    let split = split_corpus(corpus, SplitRatios::default(), 7).unwrap();
    let crf = CrfSystem {
        labels: LabelSet::nubes(),
        config: CrfConfig::default(),
    };
    let report = ablation_run(&[&crf], &split, &DEFAULT_FRACTIONS, 7).unwrap();
    let curve = report.curve("crf", Scenario::TokenDetection);
    let first = curve.first().unwrap().1;
    let last = curve.last().unwrap().1;
    let monotone = curve.windows(2).all(|w| w[1].1 >= w[0].1 - 0.02);
    let (fast, t) = within(start.elapsed(), 1800);
    let shape: Vec<String> = curve.iter().map(|(f, v)| format!("{f}%:{v:.3}")).collect();
    check(
        last - first >= 0.05 && monotone && fast,
        format!("detection F1 {}; {t}", shape.join(" ")),
    )
}

// ---------------------------------------------------------------- anonymiser

fn days_from_civil(y: i64, m: i64, d: i64) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let doy = (153 * ((m + 9) % 12) + 2) / 5 + d - 1;
    era * 146097 + yoe * 365 + yoe / 4 - yoe / 100 + doy - 719468
}

fn anonymiser() -> Outcome {
    const TEXT: &str = "Paciente de 64 años operado de una hernia el 12/01/2016 por la Dra Lopez";
    let doc = parse_brat(
        "t1",
        TEXT,
        "T1\tAge 12 19\t64 años\nT2\tDate 45 55\t12/01/2016\nT3\tDoctor 60 72\tla Dra Lopez\n",
        &LabelSet::nubes(),
    )
    .unwrap();
    let mut problems = Vec::new();
    let mask = anonymise(&doc, &doc.annotations, &AnonymisationPolicy::new(Mode::Mask)).unwrap();
    if mask != "Paciente de XXXXXXX operado de una hernia el XXXXXXXXXX por XXXXXXXXXXXX" {
        problems.push(format!("mask {mask:?}"));
    }
    let placeholder = anonymise(&doc, &doc.annotations, &AnonymisationPolicy::new(Mode::Placeholder)).unwrap();
    if placeholder != "Paciente de [-AGE-] operado de una hernia el [--DATE--] por [--DOCTOR--]" {
        problems.push(format!("placeholder {placeholder:?}"));
    }
    let leaks = leak_scan(&mask, &doc.annotations).len() + leak_scan(&placeholder, &doc.annotations).len();

    // Surrogate: age shifted by -5, date shifted to the rendering's day.
    let shift = days_from_civil(2019, 6, 5) - days_from_civil(2016, 1, 12);
    let policy = AnonymisationPolicy {
        mode: Mode::Surrogate,
        surrogate_seed: 1,
        age_shift_years: (-5, -5),
        date_shift_days: (shift, shift),
        ..AnonymisationPolicy::default()
    };
    let mut pools = SurrogatePools::empty();
    pools.surnames = vec!["Sancho".into()];
    let (surrogate, _) = anonymise_with_mapping(&doc, &doc.annotations, &policy, &pools).unwrap();
    if surrogate != "Paciente de 59 años operado de una hernia el 05/06/2019 por la Dra Sancho" {
        problems.push(format!("surrogate {surrogate:?}"));
    }
    check(
        problems.is_empty() && leaks == 0,
        format!("mask/placeholder exact, surrogate {surrogate:?}, {leaks} leaks{}", problems.iter().map(|p| format!("; {p}")).collect::<String>()),
    )
}

// ---------------------------------------------------------------- MEDDOCAN

fn meddocan() -> Outcome {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/meddocan");
    if !root.join("train").is_dir() || !root.join("test").is_dir() {
        return Outcome::Skip(format!("no corpus at {}", root.display()));
    }
    let start = Instant::now();
    let labels = LabelSet::meddocan();
    let read = |p: &str| read_brat_dir(root.join(p), &labels).expect("read corpus");
    let (train, test) = (read("train"), read("test"));
    let dev = if root.join("dev").is_dir() { read("dev") } else { Vec::new() };
    let (crf, _) = fit_crf(
        &labelled_sentences(&train).unwrap(),
        &labelled_sentences(&dev).unwrap(),
        &labels,
        &CrfConfig::default(),
    )
    .unwrap();
    let ms = evaluate_tagger(&crf, &test).unwrap();
    let det = metric(&ms, Scenario::EntityDetection).f1;
    let cls = metric(&ms, Scenario::EntityClassification).f1;
    let (fast, t) = within(start.elapsed(), 7200);
    check(
        (det - 0.960).abs() <= 0.020 && (cls - 0.954).abs() <= 0.020 && fast,
        format!("entity detection F1 {det:.3}, classification F1 {cls:.3}; {t}"),
    )
}

fn main() {
    let corpus = generate(&GeneratorConfig::new(7, 500)).expect("generate");
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("bio-round-trip", Box::new(bio_round_trip)),
        ("viterbi-optimality", Box::new(viterbi_optimality)),
        ("crf-gradient", Box::new(crf_gradient)),
        ("metric-oracle", Box::new(metric_oracle)),
        ("synthetic-end-to-end", Box::new(|| synthetic_end_to_end(&corpus))),
        ("ablation-shape", Box::new(|| ablation_shape(&corpus))),
        ("anonymiser", Box::new(anonymiser)),
        ("meddocan-reproduction", Box::new(meddocan)),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let line = match std::panic::catch_unwind(std::panic::AssertUnwindSafe(run)) {
            Ok(Outcome::Pass(d)) => format!("PASS  {name:<24} {d}"),
            Ok(Outcome::Skip(d)) => format!("SKIP  {name:<24} {d}"),
            Ok(Outcome::Fail(d)) => {
                failed += 1;
                format!("FAIL  {name:<24} {d}")
            }
            Err(_) => {
                failed += 1;
                format!("FAIL  {name:<24} panicked")
            }
        };
        println!("{line}");
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
