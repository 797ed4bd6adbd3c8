use std::collections::HashSet;
use std::path::Path;

use crate::discourse::RstTree;
use crate::error::{Error, Result};

use super::corpus::{tree_files, TreeFormat};
use super::ReadOptions;

/// Lowercased token forms seen in training data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    forms: HashSet<String>,
    pub source: String,
}

impl Vocabulary {
    pub fn from_words<'a>(words: impl IntoIterator<Item = &'a str>, source: &str) -> Result<Self> {
        let forms: HashSet<String> = words.into_iter().map(str::to_lowercase).collect();
        if forms.is_empty() {
            return Err(Error::EmptyVocabulary(source.to_string()));
        }
        Ok(Vocabulary {
            forms,
            source: source.to_string(),
        })
    }

    /// Every token form of the given (training) documents.
    pub fn from_trees(trees: &[RstTree], source: &str) -> Result<Self> {
        Self::from_words(trees.iter().flat_map(|t| t.tokens.iter().map(|tok| tok.form.as_str())), source)
    }

    pub fn contains(&self, form: &str) -> bool {
        self.forms.contains(&form.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}

/// Load a vocabulary from a whitespace-separated word list, or from every
/// `rs3`/`dis` tree in a training directory.
pub fn load_vocabulary(path: &Path) -> Result<Vocabulary> {
    let source = path.display().to_string();
    if path.is_dir() {
        let opts = ReadOptions::default();
        let mut trees = Vec::new();
        for (file, format) in tree_files(path)? {
            match format {
                TreeFormat::Rs3 => trees.push(super::read_rs3(&file, &opts)?),
                TreeFormat::Dis => trees.push(super::read_dis(&file, &opts)?),
                TreeFormat::Rsd => {}
            }
        }
        return Vocabulary::from_trees(&trees, &source);
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Vocabulary::from_words(text.split_whitespace(), &source)
}
