//! Tokens, EDUs and sentence/paragraph boundaries.

use std::collections::BTreeSet;
use std::path::Path;

use crate::error::{Error, Result};

const DEFAULT_STOPLIST: &str = include_str!("../../resources/stoplist.txt");

/// A pre-segmented token of a document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    /// 1-based position in the document.
    pub index: usize,
    pub form: String,
    /// Content-bearing token, eligible for OOV counting.
    pub is_lexical: bool,
    pub sentence_id: usize,
    pub paragraph_id: usize,
}

/// An elementary discourse unit: an inclusive range of token indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edu {
    pub id: usize,
    pub start: usize,
    pub end: usize,
    pub doc_id: String,
}

impl Edu {
    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }

    pub fn contains(&self, token: usize) -> bool {
        (self.start..=self.end).contains(&token)
    }
}

/// Where sentence and paragraph ids came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundarySource {
    /// Corpus markup (`<s>`, `<P>`, blank lines in the text payload).
    Markup,
    /// Sentence-final punctuation heuristic, or a single paragraph.
    Heuristic,
    /// Sentence ids taken from a syntax layer.
    Syntax,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Boundaries {
    pub sentences: BoundarySource,
    pub paragraphs: BoundarySource,
}

/// Closed-class forms that never count as lexical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stoplist {
    forms: BTreeSet<String>,
}

impl Default for Stoplist {
    fn default() -> Self {
        Self::parse(DEFAULT_STOPLIST)
    }
}

impl Stoplist {
    pub fn parse(text: &str) -> Self {
        let forms = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        Stoplist { forms }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, form: &str) -> bool {
        self.forms.contains(&form.to_lowercase())
    }

    /// A token is lexical iff it has an alphabetic character and is not stoplisted.
    pub fn is_lexical(&self, form: &str) -> bool {
        form.chars().any(char::is_alphabetic) && !self.contains(form)
    }
}

/// Output of [`tokenize_segments`].
#[derive(Debug, Clone)]
pub struct Segmented {
    pub tokens: Vec<Token>,
    pub edus: Vec<Edu>,
    pub boundaries: Boundaries,
}

struct RawToken {
    form: String,
    sentence_break_after: bool,
    paragraph_break_after: bool,
}

/// Split EDU text payloads on whitespace into tokens and assign boundaries.
///
/// `<s>` and `<P>` markers (RST-DT) close a sentence or paragraph; a blank line
/// inside a payload closes a paragraph. Without sentence markup, a token ending
/// in `.`, `!` or `?` (optionally followed by closing quotes or brackets) closes
/// a sentence. Without paragraph markup the document is one paragraph.
pub fn tokenize_segments(doc_id: &str, segments: &[&str], stoplist: &Stoplist) -> Segmented {
    let has_sentence_markup = segments.iter().any(|s| s.contains("<s>"));
    let has_paragraph_markup = segments
        .iter()
        .any(|s| s.contains("<P>") || s.replace("\r\n", "\n").contains("\n\n"));

    let mut raw: Vec<RawToken> = Vec::new();
    let mut edu_ranges = Vec::with_capacity(segments.len());
    for segment in segments {
        let start = raw.len();
        let normalized = segment.replace("\r\n", "\n");
        for (pi, paragraph) in normalized.split("\n\n").enumerate() {
            if pi > 0 {
                if let Some(last) = raw.last_mut() {
                    last.paragraph_break_after = true;
                    last.sentence_break_after = true;
                }
            }
            for piece in paragraph.split_whitespace() {
                push_piece(piece, &mut raw);
            }
        }
        edu_ranges.push((start, raw.len()));
    }

    if !has_sentence_markup {
        for token in raw.iter_mut() {
            if ends_sentence(&token.form) {
                token.sentence_break_after = true;
            }
        }
    }

    let mut tokens = Vec::with_capacity(raw.len());
    let (mut sentence, mut paragraph) = (1, 1);
    for (i, token) in raw.iter().enumerate() {
        tokens.push(Token {
            index: i + 1,
            is_lexical: stoplist.is_lexical(&token.form),
            form: token.form.clone(),
            sentence_id: sentence,
            paragraph_id: paragraph,
        });
        if token.paragraph_break_after {
            paragraph += 1;
            sentence += 1;
        } else if token.sentence_break_after {
            sentence += 1;
        }
    }

    let edus = edu_ranges
        .iter()
        .enumerate()
        .map(|(i, &(start, end))| Edu {
            id: i + 1,
            start: start + 1,
            // an empty payload yields an empty span (end < start)
            end,
            doc_id: doc_id.to_string(),
        })
        .collect();

    Segmented {
        tokens,
        edus,
        boundaries: Boundaries {
            sentences: if has_sentence_markup {
                BoundarySource::Markup
            } else {
                BoundarySource::Heuristic
            },
            paragraphs: if has_paragraph_markup {
                BoundarySource::Markup
            } else {
                BoundarySource::Heuristic
            },
        },
    }
}

fn push_piece(piece: &str, raw: &mut Vec<RawToken>) {
    // markers may be glued to a word: "chairman.<P>"
    let mut rest = piece;
    loop {
        let s = rest.find("<s>");
        let p = rest.find("<P>");
        let next = match (s, p) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let Some(at) = next else {
            if !rest.is_empty() {
                raw.push(RawToken {
                    form: rest.to_string(),
                    sentence_break_after: false,
                    paragraph_break_after: false,
                });
            }
            return;
        };
        let before = &rest[..at];
        if !before.is_empty() {
            raw.push(RawToken {
                form: before.to_string(),
                sentence_break_after: false,
                paragraph_break_after: false,
            });
        }
        let is_paragraph = rest[at..].starts_with("<P>");
        if let Some(last) = raw.last_mut() {
            last.sentence_break_after = true;
            if is_paragraph {
                last.paragraph_break_after = true;
            }
        }
        rest = &rest[at + 3..];
    }
}

fn ends_sentence(form: &str) -> bool {
    let trimmed = form.trim_end_matches(['"', '\'', ')', ']', '”', '’']);
    trimmed.ends_with(['.', '!', '?'])
}

/// Check the token/EDU invariants of a document.
pub fn check_partition(doc_id: &str, tokens: &[Token], edus: &[Edu]) -> Result<()> {
    let fail = |message: String| {
        Err(Error::InvalidTree {
            doc_id: doc_id.to_string(),
            message,
        })
    };
    for (i, t) in tokens.iter().enumerate() {
        if t.index != i + 1 {
            return fail(format!("token {} out of sequence at position {}", t.index, i + 1));
        }
        if i > 0 {
            let prev = &tokens[i - 1];
            if t.sentence_id < prev.sentence_id || t.paragraph_id < prev.paragraph_id {
                return fail(format!("boundary ids decrease at token {}", t.index));
            }
        }
    }
    let mut expected = 1;
    for (i, edu) in edus.iter().enumerate() {
        if edu.id != i + 1 {
            return fail(format!("EDU id {} out of sequence", edu.id));
        }
        if edu.start != expected {
            return fail(format!("EDU {} starts at token {} instead of {}", edu.id, edu.start, expected));
        }
        if edu.is_empty() {
            return fail(format!("EDU {} has no tokens", edu.id));
        }
        expected = edu.end + 1;
    }
    if expected != tokens.len() + 1 {
        return fail(format!(
            "EDUs cover {} tokens but the document has {}",
            expected - 1,
            tokens.len()
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexical_rule() {
        let stop = Stoplist::default();
        assert!(stop.is_lexical("cat"));
        assert!(!stop.is_lexical("The"));
        assert!(!stop.is_lexical("."));
        assert!(!stop.is_lexical("42"));
        assert!(stop.is_lexical("B52"));
    }

    #[test]
    fn heuristic_sentences() {
        let seg = tokenize_segments("d", &["The cat sat .", "It slept", "well !"], &Stoplist::default());
        let ids: Vec<_> = seg.tokens.iter().map(|t| t.sentence_id).collect();
        assert_eq!(ids, vec![1, 1, 1, 1, 2, 2, 2, 2]);
        assert_eq!(seg.boundaries.sentences, BoundarySource::Heuristic);
        assert_eq!(seg.boundaries.paragraphs, BoundarySource::Heuristic);
        check_partition("d", &seg.tokens, &seg.edus).unwrap();
        assert_eq!(seg.edus[1].start, 5);
        assert_eq!(seg.edus[2].end, 8);
    }

    #[test]
    fn markup_boundaries() {
        let seg = tokenize_segments(
            "d",
            &["Mr. Smith is chairman.<P>", "He said <s>", "nothing"],
            &Stoplist::default(),
        );
        let forms: Vec<_> = seg.tokens.iter().map(|t| t.form.as_str()).collect();
        assert_eq!(forms, ["Mr.", "Smith", "is", "chairman.", "He", "said", "nothing"]);
        let sents: Vec<_> = seg.tokens.iter().map(|t| t.sentence_id).collect();
        let paras: Vec<_> = seg.tokens.iter().map(|t| t.paragraph_id).collect();
        // "Mr." does not end a sentence once markup is present
        assert_eq!(sents, vec![1, 1, 1, 1, 2, 2, 3]);
        assert_eq!(paras, vec![1, 1, 1, 1, 2, 2, 2]);
        assert_eq!(seg.boundaries.sentences, BoundarySource::Markup);
    }

    #[test]
    fn blank_line_paragraphs() {
        let seg = tokenize_segments("d", &["one two\n\nthree"], &Stoplist::default());
        let paras: Vec<_> = seg.tokens.iter().map(|t| t.paragraph_id).collect();
        assert_eq!(paras, vec![1, 1, 2]);
    }

    #[test]
    fn partition_violations() {
        let seg = tokenize_segments("d", &["a b", "c"], &Stoplist::default());
        let mut edus = seg.edus.clone();
        edus[1].start = 2;
        assert!(check_partition("d", &seg.tokens, &edus).is_err());
        let mut edus = seg.edus.clone();
        edus.pop();
        assert!(check_partition("d", &seg.tokens, &edus).is_err());
    }
}
