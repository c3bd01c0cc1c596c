//! Synthetic Spanish clinical notes with gold sensitive spans.
//!
//! Each document is a sequence of sentences. A sentence is either filler
//! (no sensitive data, sometimes with numbers that look like ages or times)
//! or a template carrying one mention of a category (two for paired
//! dates). Categories are assigned to the sensitive slots of the whole
//! corpus by largest-remainder apportionment of the target shares and then
//! shuffled, so realised shares track the targets closely.

pub mod vocab;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Document;
use crate::error::{Error, Result};
use crate::rules::{shipped_names, Gender, GivenName};
use vocab::*;

const SURNAMES: &str = include_str!("../../resources/names/surnames.txt");

/// Target share of mentions per category, in percent.
pub const DEFAULT_CATEGORY_TARGETS: [(&str, f64); 11] = [
    ("Date", 39.0),
    ("Hospital", 18.0),
    ("Age", 13.0),
    ("Time", 11.0),
    ("Doctor", 9.0),
    ("Sex", 5.0),
    ("Kinship", 3.0),
    ("Location", 1.0),
    ("Patient", 1.0),
    ("Job", 1.0),
    ("Other", 0.5),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n_documents: usize,
    /// Inclusive range of sentences per document.
    pub sentences_per_doc: (usize, usize),
    /// Probability that a sentence carries no sensitive data.
    pub filler_ratio: f64,
    /// Share of Date sentences that mention two dates.
    pub paired_date_ratio: f64,
    /// Target share of mentions per category, in percent.
    pub category_targets: BTreeMap<String, f64>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            n_documents: 500,
            sentences_per_doc: (4, 12),
            filler_ratio: 0.35,
            paired_date_ratio: 0.1,
            category_targets: DEFAULT_CATEGORY_TARGETS.iter().map(|(c, w)| (c.to_string(), *w)).collect(),
        }
    }
}

impl GeneratorConfig {
    pub fn new(seed: u64, n_documents: usize) -> Self {
        Self {
            seed,
            n_documents,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.sentences_per_doc;
        if lo == 0 || lo > hi {
            return Err(Error::InvalidConfig(format!("sentences_per_doc ({lo}, {hi}) is empty")));
        }
        if !(0.0..1.0).contains(&self.filler_ratio) || !(0.0..=1.0).contains(&self.paired_date_ratio) {
            return Err(Error::InvalidConfig("ratios must lie in [0, 1)".into()));
        }
        for (cat, w) in &self.category_targets {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::InvalidConfig(format!("target for {cat} is {w}")));
            }
            if !DEFAULT_CATEGORY_TARGETS.iter().any(|(c, _)| c == cat) {
                return Err(Error::UnknownCategory(cat.clone()));
            }
        }
        let total: f64 = self.category_targets.values().sum();
        if total <= 0.0 {
            return Err(Error::InvalidConfig("category targets sum to 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Filler,
    Mention(&'static str),
    DatePair,
}

/// Word pools shared by the generator and the surrogate sampler.
pub struct Pools {
    pub given: Vec<GivenName>,
    pub surnames: Vec<String>,
}

impl Default for Pools {
    fn default() -> Self {
        Self {
            given: shipped_names(),
            surnames: SURNAMES.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect(),
        }
    }
}

fn pick<'a, T: ?Sized>(rng: &mut ChaCha8Rng, items: &'a [&'a T]) -> &'a T {
    items[rng.gen_range(0..items.len())]
}

fn cap(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Largest-remainder allocation of `n` items to `weights`; leftovers go to
/// larger remainders, ties to the earlier entry.
fn apportion(n: usize, weights: &[f64]) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| n as f64 * w / total).collect();
    let mut out: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut rest: Vec<usize> = (0..weights.len()).collect();
    rest.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let short = n - out.iter().sum::<usize>();
    for &i in rest.iter().take(short) {
        out[i] += 1;
    }
    out
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    pools: &'a Pools,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum DateKind {
    Day,
    Period,
}

impl Gen<'_> {
    fn year(&mut self) -> u32 {
        self.rng.gen_range(1995..=2019)
    }

    fn day_date(&mut self) -> String {
        let (d, m) = (self.rng.gen_range(1..=28), self.rng.gen_range(1..=12));
        match self.rng.gen_range(0..40) {
            0..=4 => {
                let pad = self.rng.gen_bool(0.6);
                let sep = if self.rng.gen_bool(0.8) { '/' } else { '-' };
                let y = self.year();
                let year = if self.rng.gen_bool(0.2) { format!("{:02}", y % 100) } else { y.to_string() };
                if pad {
                    format!("{d:02}{sep}{m:02}{sep}{year}")
                } else {
                    format!("{d}{sep}{m}{sep}{year}")
                }
            }
            5..=6 => format!("{d} de {} de {}", MONTHS[m - 1], self.year()),
            7..=8 => format!("{d} de {}", MONTHS[m - 1]),
            _ => format!("{d:02}/{m:02}"),
        }
    }

    fn period_date(&mut self) -> String {
        let m = MONTHS[self.rng.gen_range(0..12)];
        match self.rng.gen_range(0..3) {
            0 => format!("{m} de {}", self.year()),
            1 => self.year().to_string(),
            _ => m.to_string(),
        }
    }

    fn hospital(&mut self) -> String {
        format!("{} {}", pick(&mut self.rng, HOSPITAL_HEADS), pick(&mut self.rng, HOSPITAL_NAMES))
    }

    fn age(&mut self) -> String {
        match self.rng.gen_range(0..40) {
            0..=5 => format!("{} años", self.rng.gen_range(18..=95)),
            6 => format!("{} años y medio", self.rng.gen_range(1..=12)),
            7 => format!("{} meses", self.rng.gen_range(2..=23)),
            8 => format!("{} años y {} meses", self.rng.gen_range(1..=5), self.rng.gen_range(1..=11)),
            _ => format!("{} años", pick(&mut self.rng, NUMBER_WORDS)),
        }
    }

    fn time(&mut self) -> (String, bool) {
        let h = self.rng.gen_range(0..24);
        let m = self.rng.gen_range(0..12) * 5;
        match self.rng.gen_range(0..40) {
            0..=4 => (format!("{h:02}:{m:02}"), true),
            5..=6 => (format!("{h}:{m:02} h"), true),
            7..=8 => (format!("{} horas", self.rng.gen_range(1..=23)), false),
            _ => (self.rng.gen_range(1..=12).to_string(), false),
        }
    }

    fn surname(&mut self) -> String {
        let i = self.rng.gen_range(0..self.pools.surnames.len());
        self.pools.surnames[i].clone()
    }

    fn given(&mut self) -> &GivenName {
        let i = self.rng.gen_range(0..self.pools.given.len());
        &self.pools.given[i]
    }

    fn doctor(&mut self) -> String {
        let female = self.rng.gen_bool(0.5);
        let hon = if female { "Dra" } else { "Dr" };
        let dot = if self.rng.gen_bool(0.3) { "." } else { "" };
        let mut name = self.surname();
        if self.rng.gen_bool(0.3) {
            name = format!("{name} {}", self.surname());
        }
        if self.rng.gen_bool(0.5) {
            let art = if female { "la" } else { "el" };
            format!("{art} {hon}{dot} {name}")
        } else {
            format!("{hon}{dot} {name}")
        }
    }

    fn patient(&mut self) -> String {
        let given = self.given().name.clone();
        match self.rng.gen_range(0..3) {
            0 => given,
            1 => format!("{given} {}", self.surname()),
            _ => format!("{given} {} {}", self.surname(), self.surname()),
        }
    }

    fn other(&mut self) -> String {
        if self.rng.gen_bool(0.5) {
            let n: u32 = self.rng.gen_range(10_000_000..100_000_000);
            let letter = (b'A' + self.rng.gen_range(0..26)) as char;
            format!("{n}{letter}")
        } else {
            self.rng.gen_range(100_000..10_000_000u32).to_string()
        }
    }

    fn filler(&mut self) -> String {
        const FILLER: &[&str] = &[
            "Refiere dolor abdominal difuso de inicio brusco.",
            "No presenta alergias medicamentosas conocidas.",
            "Exploración física sin hallazgos relevantes.",
            "Se solicita ecografía abdominal.",
            "Tensión arterial 130/80 mmHg, afebril.",
            "Buen estado general, consciente y orientado.",
            "Se pauta tratamiento analgésico y control evolutivo.",
            "Dolores abdominales de tipo cólico.",
            "Auscultación cardiopulmonar normal.",
            "Analítica con leve leucocitosis.",
            "Se recomienda dieta blanda y abundantes líquidos.",
            "Niega fiebre ni otra sintomatología asociada.",
            "Abdomen blando y depresible, no doloroso a la palpación.",
            "Pendiente de resultados de anatomía patológica.",
            "Evolución favorable durante el ingreso.",
        ];
        let n = self.rng.gen_range(1..=12);
        match self.rng.gen_range(0..40) {
            0 => format!("Tratamiento con paracetamol 1 g cada {} horas.", self.rng.gen_range(4..=12)),
            1 => format!("Exfumador desde hace {n} años."),
            2 => format!("Reposo relativo durante {n} semanas."),
            3 => format!("Dolor de {n} días de evolución."),
            4 => format!("Pérdida de peso en los últimos {n} meses."),
            _ => pick(&mut self.rng, FILLER).to_string(),
        }
    }

    /// Renders `template`, replacing `{E}` markers in order with the given
    /// mentions and `{D}` with `det`.
    fn render(template: &str, det: &str, mentions: &[(&'static str, String)]) -> (String, Vec<(&'static str, usize, usize)>) {
        let template = template.replace("{D}", det);
        let mut out = String::new();
        let mut spans = Vec::new();
        let mut parts = template.split("{E}");
        out.push_str(parts.next().unwrap_or(""));
        for ((cat, surface), rest) in mentions.iter().zip(parts) {
            let start = out.chars().count();
            out.push_str(surface);
            spans.push((*cat, start, start + surface.chars().count()));
            out.push_str(rest);
        }
        (out, spans)
    }

    fn sentence(&mut self, slot: Slot) -> (String, Vec<(&'static str, usize, usize)>) {
        let mut det = "";
        let (template, mentions): (&str, Vec<(&'static str, String)>) = match slot {
            Slot::Filler => return (self.filler(), Vec::new()),
            Slot::DatePair => {
                if self.rng.gen_bool(0.5) {
                    let (d1, d2) = (self.rng.gen_range(1..=14), self.rng.gen_range(15..=28));
                    let m = MONTHS[self.rng.gen_range(0..12)];
                    (
                        pick(&mut self.rng, &["Controles analíticos los días {E} y {E}.", "Revisiones programadas ({E} y {E})."]),
                        vec![("Date", d1.to_string()), ("Date", format!("{d2} de {m}"))],
                    )
                } else {
                    let (a, b) = (self.day_date(), self.day_date());
                    ("Ingresó el {E} y fue dado de alta el {E}.", vec![("Date", a), ("Date", b)])
                }
            }
            Slot::Mention(cat) => match cat {
                "Date" => {
                    let (t, kind) = *pick(
                        &mut self.rng,
                        &[
                            &("Ingresa el {E} por dolor abdominal.", DateKind::Day),
                            &("Fue intervenido el {E} sin incidencias.", DateKind::Day),
                            &("Acude a urgencias el día {E}.", DateKind::Day),
                            &("Última revisión: {E}.", DateKind::Day),
                            &("Se realiza analítica con fecha {E}.", DateKind::Day),
                            &("Alta hospitalaria el {E}.", DateKind::Day),
                            &("Intervenido en {E} de colecistectomía.", DateKind::Period),
                            &("Diagnosticado de diabetes en {E}.", DateKind::Period),
                            &("Control ecográfico realizado en {E}.", DateKind::Period),
                        ],
                    );
                    let d = if kind == DateKind::Day { self.day_date() } else { self.period_date() };
                    (t, vec![("Date", d)])
                }
                "Hospital" => (
                    pick(
                        &mut self.rng,
                        &[
                            "Remitida desde {E} para estudio.",
                            "Ingresa en {E} a cargo de Cirugía.",
                            "Seguimiento en consultas externas de {E}.",
                            "Se traslada a {E} para valoración.",
                            "Valorado previamente en {E}.",
                            "Procedente de {E}.",
                        ],
                    ),
                    vec![("Hospital", self.hospital())],
                ),
                "Age" => (
                    pick(
                        &mut self.rng,
                        &[
                            "Paciente de {E} con antecedentes de hipertensión.",
                            "Niño de {E} que acude por fiebre.",
                            "Edad: {E}.",
                            "A los {E} fue diagnosticado de asma.",
                            "Paciente de {E} que consulta por disnea.",
                        ],
                    ),
                    vec![("Age", self.age())],
                ),
                "Time" => {
                    let (t, clock) = self.time();
                    let template = if clock {
                        pick(&mut self.rng, &["Acude a las {E} por dolor torácico.", "Hora de llegada: {E}.", "Inicio del dolor a las {E}."])
                    } else {
                        pick(&mut self.rng, &["Se administra la dosis a las {E}.", "Acude a las {E} acompañado."])
                    };
                    (template, vec![("Time", t)])
                }
                "Doctor" => (
                    pick(
                        &mut self.rng,
                        &[
                            "Valorado por {E} en consulta.",
                            "Informe firmado por {E}.",
                            "Se comenta el caso con {E}.",
                            "Intervenido por {E} sin complicaciones.",
                        ],
                    ),
                    vec![("Doctor", self.doctor())],
                ),
                "Sex" => {
                    if self.rng.gen_bool(0.7) {
                        let (d, s) = *pick(&mut self.rng, &[&SEX[0], &SEX[1], &SEX[2]]);
                        det = d;
                        (
                            pick(&mut self.rng, &["Se trata de {D} {E} sin alergias conocidas.", "Acude {D} {E} con dolor lumbar."]),
                            vec![("Sex", s.to_string())],
                        )
                    } else {
                        ("Sexo: {E}.", vec![("Sex", pick(&mut self.rng, SEX_FIELD).to_string())])
                    }
                }
                "Kinship" => (
                    pick(
                        &mut self.rng,
                        &[
                            "Acude acompañado de su {E}.",
                            "Antecedentes familiares: {E} con diabetes.",
                            "Refiere que su {E} padeció cáncer de colon.",
                        ],
                    ),
                    vec![("Kinship", pick(&mut self.rng, KINSHIP).to_string())],
                ),
                "Location" => (
                    pick(&mut self.rng, &["Natural de {E}.", "Reside en {E} con su familia.", "Vive en {E} desde hace años."]),
                    vec![("Location", pick(&mut self.rng, LOCATIONS).to_string())],
                ),
                "Patient" => (
                    pick(&mut self.rng, &["{E} acude a revisión.", "Se explica el procedimiento a {E}.", "Paciente: {E}."]),
                    vec![("Patient", self.patient())],
                ),
                "Job" => {
                    let job = pick(&mut self.rng, JOBS).to_string();
                    let t = pick(&mut self.rng, &["Trabaja como {E}.", "Profesión: {E}.", "Trabajó de {E} durante años."]);
                    (t, vec![("Job", job)])
                }
                _ => (
                    pick(&mut self.rng, &["Número de historia clínica {E}.", "DNI {E}."]),
                    vec![("Other", self.other())],
                ),
            },
        };
        let (mut text, spans) = Self::render(template, det, &mentions);
        if spans.first().is_some_and(|s| s.1 == 0) {
            return (text, spans);
        }
        text = cap(&text);
        (text, spans)
    }
}

fn category_name(cat: &str) -> &'static str {
    DEFAULT_CATEGORY_TARGETS.iter().find(|(c, _)| *c == cat).map_or("Other", |(c, _)| c)
}

/// Generates the corpus described by `config` with the shipped name pools.
pub fn generate(config: &GeneratorConfig) -> Result<Vec<Document>> {
    generate_with(config, &Pools::default())
}

pub fn generate_with(config: &GeneratorConfig, pools: &Pools) -> Result<Vec<Document>> {
    config.validate()?;
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        pools,
    };
    let (lo, hi) = config.sentences_per_doc;
    let layout: Vec<Vec<bool>> = (0..config.n_documents)
        .map(|_| {
            let n = g.rng.gen_range(lo..=hi);
            (0..n).map(|_| !g.rng.gen_bool(config.filler_ratio)).collect()
        })
        .collect();
    let n_sensitive = layout.iter().flatten().filter(|&&s| s).count();

    // Slot kinds: one per category, Date split into single and paired so
    // that paired sentences still yield the Date mention share.
    let q = config.paired_date_ratio;
    let mut kinds: Vec<Slot> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for (cat, &w) in &config.category_targets {
        let cat = category_name(cat);
        if cat == "Date" {
            kinds.push(Slot::Mention("Date"));
            weights.push(w * (1.0 - q) / (1.0 + q));
            kinds.push(Slot::DatePair);
            weights.push(w * q / (1.0 + q));
        } else {
            kinds.push(Slot::Mention(cat));
            weights.push(w);
        }
    }
    let mut slots: Vec<Slot> = Vec::with_capacity(n_sensitive);
    for (kind, count) in kinds.iter().zip(apportion(n_sensitive, &weights)) {
        slots.extend(std::iter::repeat(*kind).take(count));
    }
    slots.shuffle(&mut g.rng);
    let mut slots = slots.into_iter();

    let width = config.n_documents.max(1).to_string().len().max(4);
    let mut docs = Vec::with_capacity(config.n_documents);
    for (i, sentences) in layout.iter().enumerate() {
        let mut doc = Document::new(format!("synth-{:0width$}", i + 1), String::new());
        let mut text = String::new();
        let mut len = 0;
        let mut spans = Vec::new();
        for (k, &sensitive) in sentences.iter().enumerate() {
            if k > 0 {
                let sep = if g.rng.gen_bool(0.25) { "\n" } else { " " };
                text.push_str(sep);
                len += 1;
            }
            let slot = if sensitive { slots.next().unwrap_or(Slot::Filler) } else { Slot::Filler };
            let (s, sp) = g.sentence(slot);
            spans.extend(sp.into_iter().map(|(c, a, b)| (c, a + len, b + len)));
            len += s.chars().count();
            text.push_str(&s);
        }
        text.push('\n');
        doc.text = text;
        for (cat, a, b) in spans {
            doc.annotate(cat, a, b)?;
        }
        docs.push(doc);
    }
    Ok(docs)
}

/// Share of mentions per category, in percent.
pub fn category_shares(docs: &[Document]) -> BTreeMap<String, f64> {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let mut total = 0;
    for a in docs.iter().flat_map(|d| &d.annotations) {
        *counts.entry(a.category.clone()).or_default() += 1;
        total += 1;
    }
    counts.into_iter().map(|(c, n)| (c, 100.0 * n as f64 / total.max(1) as f64)).collect()
}

/// Given names by gender plus surnames, used for surrogate names.
pub fn name_pools() -> (Vec<String>, Vec<String>, Vec<String>) {
    let pools = Pools::default();
    let by = |g: Gender| pools.given.iter().filter(|n| n.gender == Some(g)).map(|n| n.name.clone()).collect();
    (by(Gender::Female), by(Gender::Male), pools.surnames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{labelled_sentences, LabelSet};

    #[test]
    fn deterministic_per_seed() {
        let a = generate(&GeneratorConfig::new(7, 30)).unwrap();
        let b = generate(&GeneratorConfig::new(7, 30)).unwrap();
        assert_eq!(a, b);
        let c = generate(&GeneratorConfig::new(8, 30)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn empty_corpus() {
        assert!(generate(&GeneratorConfig::new(1, 0)).unwrap().is_empty());
    }

    #[test]
    fn documents_validate_and_encode() {
        let docs = generate(&GeneratorConfig::new(3, 60)).unwrap();
        let labels = LabelSet::nubes();
        for d in &docs {
            d.validate(&labels).unwrap();
            let mut copy = d.clone();
            assert!(copy.normalize().is_empty(), "{}", d.id);
        }
        labelled_sentences(&docs).unwrap();
    }

    #[test]
    fn shares_track_targets() {
        let docs = generate(&GeneratorConfig::new(11, 500)).unwrap();
        let shares = category_shares(&docs);
        for (cat, target) in DEFAULT_CATEGORY_TARGETS {
            let got = shares.get(cat).copied().unwrap_or(0.0);
            assert!((got - target).abs() <= 2.0, "{cat}: {got:.2} vs {target}");
        }
    }

    #[test]
    fn apportion_sums_and_breaks_ties_early() {
        assert_eq!(apportion(10, &[1.0, 1.0, 1.0]), vec![4, 3, 3]);
        assert_eq!(apportion(0, &[1.0, 2.0]), vec![0, 0]);
    }
}
