//! Rule baseline: regular-expression detectors for Date, Time, Age and
//! Doctor, dictionary look-ups for the remaining categories, and a given-name
//! list for Patient. `Other` has no detector.

mod gazetteer;
mod patterns;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

pub use gazetteer::Gazetteer;
pub use patterns::{match_age, match_date, match_doctor, match_time, MatchOptions, PatternInventory, TokenRange};

use crate::corpus::{decode_spans, BioLabel, Document, LabelledSentence, RepairPolicy, Sentence};
use crate::error::{Error, Result};
use crate::tagger::Tagger;
use gazetteer::fold;

const SHIPPED_NAMES: &str = include_str!("../../resources/names/ine_top200.txt");

/// Conflict order between detectors, most specific first.
pub const PRIORITY: [&str; 10] = [
    "Date", "Time", "Age", "Doctor", "Hospital", "Patient", "Sex", "Kinship", "Location", "Job",
];

/// Categories whose detector is a gazetteer compiled from training data.
pub const GAZETTEER_CATEGORIES: [&str; 5] = ["Hospital", "Sex", "Kinship", "Location", "Job"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Gender {
    Female,
    Male,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GivenName {
    pub name: String,
    pub gender: Option<Gender>,
}

fn parse_names(content: &str) -> Vec<GivenName> {
    let mut out: Vec<GivenName> = Vec::new();
    for line in content.lines() {
        let mut cols = line.split('\t');
        let name = cols.next().unwrap_or("").trim();
        if name.is_empty() || name.starts_with('#') {
            continue;
        }
        if out.iter().any(|n| n.name == name) {
            continue;
        }
        let gender = match cols.next().map(str::trim) {
            Some("F") => Some(Gender::Female),
            Some("M") => Some(Gender::Male),
            _ => None,
        };
        out.push(GivenName {
            name: name.to_string(),
            gender,
        });
    }
    out
}

/// Reads one name per line (an optional tab-separated `F`/`M` column is
/// allowed and ignored here). Order is kept, duplicates removed.
pub fn load_name_list(path: impl AsRef<Path>) -> Result<Vec<String>> {
    Ok(load_gendered_names(path)?.into_iter().map(|n| n.name).collect())
}

pub fn load_gendered_names(path: impl AsRef<Path>) -> Result<Vec<GivenName>> {
    let path = path.as_ref();
    if !path.is_file() {
        return Err(Error::FileMissing(path.to_path_buf()));
    }
    Ok(parse_names(&fs::read_to_string(path)?))
}

/// The shipped list: 100 female then 100 male given names.
pub fn shipped_names() -> Vec<GivenName> {
    parse_names(SHIPPED_NAMES)
}

/// One gazetteer per listed category holding every distinct case-folded
/// gold surface of that category.
pub fn build_gazetteers(train: &[Document], categories: &[&str]) -> BTreeMap<String, Gazetteer> {
    let mut out: BTreeMap<String, Gazetteer> = categories.iter().map(|c| (c.to_string(), Gazetteer::new())).collect();
    for doc in train {
        for a in &doc.annotations {
            if let Some(g) = out.get_mut(&a.category) {
                g.insert(&a.surface);
            }
        }
    }
    out
}

/// Same as [`build_gazetteers`], reading spans off BIO-labelled sentences.
pub fn build_gazetteers_from_sentences(
    train: &[LabelledSentence],
    categories: &[&str],
) -> BTreeMap<String, Gazetteer> {
    let mut out: BTreeMap<String, Gazetteer> = categories.iter().map(|c| (c.to_string(), Gazetteer::new())).collect();
    for ls in train {
        let tokens = &ls.sentence.tokens;
        let spans = decode_spans(tokens, &ls.labels, RepairPolicy::IAsB).expect("lengths match");
        for span in spans {
            if let Some(g) = out.get_mut(&span.category) {
                let phrase: Vec<&str> = tokens
                    .iter()
                    .filter(|t| t.start >= span.start && t.end <= span.end)
                    .map(|t| t.surface.as_str())
                    .collect();
                g.insert(&phrase.join(" "));
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct RuleSet {
    patterns: Option<PatternInventory>,
    pub gazetteers: BTreeMap<String, Gazetteer>,
    name_list: Vec<String>,
    names: Gazetteer,
    pub options: MatchOptions,
}

impl RuleSet {
    /// No detectors at all; tags everything `O`.
    pub fn empty() -> Self {
        Self {
            patterns: None,
            gazetteers: BTreeMap::new(),
            name_list: Vec::new(),
            names: Gazetteer::new(),
            options: MatchOptions::default(),
        }
    }

    pub fn new(patterns: PatternInventory, gazetteers: BTreeMap<String, Gazetteer>, name_list: Vec<String>) -> Self {
        let names = name_list.iter().collect();
        Self {
            patterns: Some(patterns),
            gazetteers,
            name_list,
            names,
            options: MatchOptions::default(),
        }
    }

    /// Default patterns, gazetteers from `train`, and the shipped name list.
    pub fn compile(train: &[Document]) -> Self {
        Self::new(
            PatternInventory::default(),
            build_gazetteers(train, &GAZETTEER_CATEGORIES),
            shipped_names().into_iter().map(|n| n.name).collect(),
        )
    }

    pub fn compile_from_sentences(train: &[LabelledSentence]) -> Self {
        Self::new(
            PatternInventory::default(),
            build_gazetteers_from_sentences(train, &GAZETTEER_CATEGORIES),
            shipped_names().into_iter().map(|n| n.name).collect(),
        )
    }

    pub fn with_options(mut self, options: MatchOptions) -> Self {
        self.options = options;
        self
    }

    pub fn name_list(&self) -> &[String] {
        &self.name_list
    }

    /// Writes `patterns.txt`, `names.txt` and `gazetteers/<Category>.txt`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir.join("gazetteers"))?;
        let patterns = self.patterns.as_ref().map_or("", |p| p.source());
        fs::write(dir.join("patterns.txt"), patterns)?;
        fs::write(dir.join("names.txt"), lines(self.name_list.iter().cloned()))?;
        for (cat, g) in &self.gazetteers {
            fs::write(dir.join("gazetteers").join(format!("{cat}.txt")), lines(g.phrases()))?;
        }
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(Error::FileMissing(dir.to_path_buf()));
        }
        let patterns_path = dir.join("patterns.txt");
        let patterns = if patterns_path.exists() {
            PatternInventory::parse(&fs::read_to_string(patterns_path)?)?
        } else {
            PatternInventory::default()
        };
        let names_path = dir.join("names.txt");
        let name_list = if names_path.exists() {
            load_name_list(names_path)?
        } else {
            Vec::new()
        };
        let mut gazetteers = BTreeMap::new();
        let gdir = dir.join("gazetteers");
        if gdir.is_dir() {
            let mut paths: Vec<_> = fs::read_dir(gdir)?.filter_map(|e| e.ok()).map(|e| e.path()).collect();
            paths.sort();
            for p in paths.into_iter().filter(|p| p.extension().is_some_and(|x| x == "txt")) {
                let cat = p.file_stem().unwrap_or_default().to_string_lossy().into_owned();
                let g: Gazetteer = fs::read_to_string(&p)?.lines().filter(|l| !l.trim().is_empty()).collect();
                gazetteers.insert(cat, g);
            }
        }
        Ok(Self::new(patterns, gazetteers, name_list))
    }
}

fn lines(items: impl Iterator<Item = String>) -> String {
    items.map(|s| s + "\n").collect()
}

struct Candidate {
    priority: usize,
    start: usize,
    end: usize,
    category: &'static str,
}

/// Tags one sentence. Overlapping candidates are resolved by [`PRIORITY`],
/// then earliest start, then longest span.
pub fn tag_rules(sentence: &Sentence, rules: &RuleSet) -> Vec<BioLabel> {
    let n = sentence.len();
    let mut labels = vec![BioLabel::O; n];
    let Some(inv) = rules.patterns.as_ref() else {
        return labels;
    };
    let words = sentence.words();
    let folded: Vec<String> = words.iter().map(|w| fold(w)).collect();
    let opts = &rules.options;
    let prio = |c: &str| PRIORITY.iter().position(|p| *p == c).unwrap_or(PRIORITY.len());

    let mut cands: Vec<Candidate> = Vec::new();
    let mut push = |category: &'static str, range: Option<TokenRange>| {
        if let Some((start, end)) = range {
            cands.push(Candidate {
                priority: prio(category),
                start,
                end,
                category,
            });
        }
    };
    for i in 0..n {
        push("Date", match_date(&words, i, inv));
        push("Time", match_time(&words, i, inv));
        push("Age", match_age(&words, i, inv, opts));
        push("Doctor", match_doctor(&words, i, inv, opts));
        for cat in GAZETTEER_CATEGORIES {
            if let Some(g) = rules.gazetteers.get(cat) {
                push(cat, g.longest_match(&folded, i).map(|e| (i, e)));
            }
        }
        let capitalized = words[i].chars().next().is_some_and(char::is_uppercase);
        if capitalized {
            if let Some(e) = rules.names.longest_match(&folded, i) {
                let end = patterns::capitalized_run(&words, e, inv, opts.window);
                push("Patient", Some((i, end)));
            }
        }
    }
    cands.sort_by_key(|c| (c.priority, c.start, std::cmp::Reverse(c.end - c.start)));

    let mut taken = vec![false; n];
    for c in cands {
        if taken[c.start..c.end].iter().any(|&t| t) {
            continue;
        }
        for (k, slot) in (c.start..c.end).enumerate() {
            taken[slot] = true;
            labels[slot] = if k == 0 {
                BioLabel::B(c.category.to_string())
            } else {
                BioLabel::I(c.category.to_string())
            };
        }
    }
    labels
}

impl Tagger for RuleSet {
    fn name(&self) -> &str {
        "rules"
    }

    fn tag(&self, sentence: &Sentence) -> Vec<BioLabel> {
        tag_rules(sentence, self)
    }
}
