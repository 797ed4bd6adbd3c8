//! Readers and writers for treebanks, dependency exports, DM annotations,
//! syntax layers and training vocabularies.

mod corpus;
mod dis;
mod dm;
mod rs3;
mod rsd;
mod syntax;
mod vocab;

use std::collections::BTreeMap;
use std::path::Path;

use crate::discourse::Stoplist;

pub use corpus::{load_corpus, run_of_path, Corpus, CorpusDocument, CorpusLayout, Prediction, Split, TreeFormat};
pub use dis::{parse_dis, read_dis};
pub use dm::{parse_dm_annotations, read_dm_annotations, GoldDoc};
pub use rs3::{parse_rs3, parse_rs3_signals, read_rs3, read_rs3_document, Rs3Document, Rs3Signal};
pub use rsd::{parse_rsd, read_rsd, write_rsd};
pub use syntax::{parse_syntax, read_syntax};
pub use vocab::{load_vocabulary, Vocabulary};

/// Settings shared by the tree readers.
#[derive(Debug, Clone, Default)]
pub struct ReadOptions {
    pub stoplist: Stoplist,
    /// Genre forced on every document read with these options.
    pub genre: Option<String>,
    /// Genre per document id, e.g. from a metadata table.
    pub genres: BTreeMap<String, String>,
    /// Tag for secondary-annotator trees.
    pub annotator: Option<String>,
}

impl ReadOptions {
    /// Explicit genre, then metadata, then the GUM naming convention
    /// (`GUM_<genre>_<name>`), then `news` for WSJ files, else `unknown`.
    pub fn genre_for(&self, doc_id: &str) -> String {
        if let Some(g) = &self.genre {
            return g.clone();
        }
        if let Some(g) = self.genres.get(doc_id) {
            return g.clone();
        }
        let mut parts = doc_id.split('_');
        match (parts.next(), parts.next()) {
            (Some(p), Some(g)) if p.eq_ignore_ascii_case("gum") && !g.is_empty() => g.to_lowercase(),
            (Some(p), _) if p.eq_ignore_ascii_case("wsj") => "news".to_string(),
            _ => "unknown".to_string(),
        }
    }
}

/// Document id of a file: its name up to the first `.`.
pub fn doc_id_from_path(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    name.split('.').next().unwrap_or(name).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genre_inference() {
        let opts = ReadOptions::default();
        assert_eq!(opts.genre_for("GUM_vlog_portland"), "vlog");
        assert_eq!(opts.genre_for("wsj_1189"), "news");
        assert_eq!(opts.genre_for("doc1"), "unknown");
        let forced = ReadOptions {
            genre: Some("fiction".into()),
            ..Default::default()
        };
        assert_eq!(forced.genre_for("GUM_vlog_portland"), "fiction");
    }

    #[test]
    fn doc_ids() {
        assert_eq!(doc_id_from_path(Path::new("a/wsj_1189.out.dis")), "wsj_1189");
        assert_eq!(doc_id_from_path(Path::new("GUM_x.run3.rs3")), "GUM_x");
    }
}
