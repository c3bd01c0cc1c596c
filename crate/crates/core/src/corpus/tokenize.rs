//! Offset-preserving tokenizer and sentence splitter.

use super::{Document, Sentence, Token};

/// Honorifics and abbreviations after which a period does not end a sentence.
const ABBREVIATIONS: &[&str] = &[
    "dr", "dra", "sr", "sra", "srta", "dña", "dª", "d", "pág", "núm", "nº", "aprox", "etc", "vs", "ej",
];

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

fn is_number_joiner(c: char) -> bool {
    matches!(c, '/' | ':' | '.' | ',' | '-')
}

/// Splits text into tokens with character offsets.
///
/// Alphanumeric runs form one token; punctuation is split off, except that a
/// `/ : . , -` between two digits stays inside the token, so `12/01/2016` and
/// `10:30` are single tokens. Runs of the same punctuation mark (`...`) are
/// grouped. Whitespace is dropped.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if is_word_char(c) {
            i += 1;
            while i < chars.len() {
                let c = chars[i];
                if is_word_char(c) {
                    i += 1;
                } else if is_number_joiner(c)
                    && chars[i - 1].is_ascii_digit()
                    && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit())
                {
                    i += 2;
                } else {
                    break;
                }
            }
        } else {
            i += 1;
            while i < chars.len() && chars[i] == c {
                i += 1;
            }
        }
        tokens.push(Token::new(chars[start..i].iter().collect::<String>(), start, i));
    }
    tokens
}

fn is_terminator(surface: &str) -> bool {
    !surface.is_empty() && surface.chars().all(|c| matches!(c, '.' | '!' | '?'))
}

/// Tokenizes a document and groups the tokens into sentences.
///
/// Boundaries fall after `.`, `!`, `?` (a single period after a known
/// abbreviation does not count) and at line breaks, but never inside an
/// annotated span of the document.
pub fn split_sentences(doc: &Document) -> Vec<Sentence> {
    let tokens = tokenize(&doc.text);
    if tokens.is_empty() {
        return Vec::new();
    }
    let chars: Vec<char> = doc.text.chars().collect();
    let mut spans: Vec<(usize, usize)> = doc.annotations.iter().map(|a| (a.start, a.end)).collect();
    spans.sort_unstable();

    let mut sentences = Vec::new();
    let mut current: Vec<Token> = Vec::new();
    for (k, tok) in tokens.iter().enumerate() {
        current.push(tok.clone());
        let Some(next) = tokens.get(k + 1) else { break };
        let newline = chars[tok.end..next.start].contains(&'\n');
        let terminal = is_terminator(&tok.surface)
            && !(tok.surface == "."
                && k > 0
                && tokens[k - 1].end == tok.start
                && ABBREVIATIONS.contains(&tokens[k - 1].surface.to_lowercase().as_str()));
        if !(newline || terminal) {
            continue;
        }
        let inside_span = spans.iter().any(|&(s, e)| s < tok.end && e > next.start);
        if inside_span {
            continue;
        }
        sentences.push(finish(doc, sentences.len(), std::mem::take(&mut current)));
    }
    if !current.is_empty() {
        sentences.push(finish(doc, sentences.len(), current));
    }
    sentences
}

fn finish(doc: &Document, index: usize, mut tokens: Vec<Token>) -> Sentence {
    for t in &mut tokens {
        t.sentence_index = index;
    }
    Sentence {
        doc_id: doc.id.clone(),
        index,
        tokens,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn keeps_dates_whole() {
        assert_eq!(
            words("operado el 12/01/2016 por la Dra Lopez"),
            ["operado", "el", "12/01/2016", "por", "la", "Dra", "Lopez"]
        );
    }

    #[test]
    fn empty_text() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  \n\t").is_empty());
    }

    #[test]
    fn parenthesised_dates_give_eight_tokens() {
        let w = words("control ( 15 y 22 de junio )");
        assert_eq!(w, ["control", "(", "15", "y", "22", "de", "junio", ")"]);
    }

    #[test]
    fn punctuation_split_from_words() {
        assert_eq!(words("Dra. López, 10:30h."), ["Dra", ".", "López", ",", "10:30h", "."]);
        assert_eq!(words("fin... (x)"), ["fin", "...", "(", "x", ")"]);
        assert_eq!(words("3,5 mg; 2.5"), ["3,5", "mg", ";", "2.5"]);
    }

    #[test]
    fn offsets_index_characters() {
        let text = "Niño de 4 años";
        for t in tokenize(text) {
            assert_eq!(crate::corpus::char_slice(text, t.start, t.end), Some(t.surface.as_str()));
        }
    }

    #[test]
    fn sentences_split_on_terminators_and_newlines() {
        let doc = Document::new("d", "Paciente estable. Alta mañana.");
        let s = split_sentences(&doc);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].words(), ["Paciente", "estable", "."]);
        assert_eq!(s[1].words(), ["Alta", "mañana", "."]);
        assert_eq!(s[1].tokens[0].sentence_index, 1);

        assert_eq!(split_sentences(&Document::new("d", "primera linea\nsegunda linea")).len(), 2);
        assert_eq!(split_sentences(&Document::new("d", "sin terminadores aqui")).len(), 1);
        assert!(split_sentences(&Document::new("d", "")).is_empty());
    }

    #[test]
    fn abbreviation_period_does_not_split() {
        let doc = Document::new("d", "Visto por la Dra. Lopez hoy. Alta.");
        assert_eq!(split_sentences(&doc).len(), 2);
    }

    #[test]
    fn no_boundary_inside_annotation() {
        let mut doc = Document::new("d", "Calle Mayor\n12 de Madrid. Fin.");
        doc.annotate("Location", 0, 14).unwrap();
        let s = split_sentences(&doc);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].words(), ["Calle", "Mayor", "12", "de", "Madrid", "."]);
    }
}
