//! Corpus directories.
//!
//! ```text
//! <root>/gold/[train|dev|test/]*.rs3|*.dis   gold trees
//! <root>/pred/<architecture>/DOC.runK.ext    predictions (rs3, dis or rsd)
//! <root>/second/<annotator>/*.rs3|*.dis      secondary annotations
//! <root>/syntax/DOC.tsv                      token-level syntax
//! <root>/dm/*.tsv                            DM annotations
//! <root>/metadata.tsv                        doc_id, genre, split
//! ```
//! Everything except `gold/` is optional. Gold files directly under `gold/`
//! belong to the `test` split unless the metadata says otherwise.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::discourse::{DepGraph, DmAnnotation, RelationScheme, RstTree};
use crate::error::{Error, Result};
use crate::treeops::{to_dependencies, SyntaxLayer};

use super::dm::{parse_dm_annotations, GoldDoc};
use super::{doc_id_from_path, parse_rs3_signals, read_dis, read_rs3_document, read_rsd, read_syntax, ReadOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl FromStr for Split {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(Error::Config(format!("unknown split `{other}`"))),
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TreeFormat {
    Rs3,
    Dis,
    Rsd,
}

impl TreeFormat {
    pub fn of_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_lowercase().as_str() {
            "rs3" => Some(TreeFormat::Rs3),
            "dis" => Some(TreeFormat::Dis),
            "rsd" => Some(TreeFormat::Rsd),
            _ => None,
        }
    }
}

/// One parser run's output for a document.
#[derive(Debug, Clone)]
pub struct Prediction {
    pub run: usize,
    /// Absent when the run was delivered as rsd.
    pub tree: Option<RstTree>,
    pub deps: DepGraph,
}

#[derive(Debug, Clone)]
pub struct CorpusDocument {
    pub gold: RstTree,
    pub gold_deps: DepGraph,
    pub split: Split,
    pub syntax: Option<SyntaxLayer>,
    /// Runs per architecture, ordered by run number.
    pub predictions: BTreeMap<String, Vec<Prediction>>,
    pub secondary: Vec<RstTree>,
}

impl CorpusDocument {
    pub fn doc_id(&self) -> &str {
        &self.gold.doc_id
    }

    pub fn genre(&self) -> &str {
        &self.gold.genre
    }
}

#[derive(Debug, Clone)]
pub struct Corpus {
    /// Ordered by document id.
    pub documents: Vec<CorpusDocument>,
    pub dm_annotations: Vec<DmAnnotation>,
}

impl Corpus {
    pub fn document(&self, doc_id: &str) -> Option<&CorpusDocument> {
        self.documents
            .binary_search_by(|d| d.doc_id().cmp(doc_id))
            .ok()
            .map(|i| &self.documents[i])
    }

    pub fn architectures(&self) -> BTreeSet<&str> {
        self.documents
            .iter()
            .flat_map(|d| d.predictions.keys().map(String::as_str))
            .collect()
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &CorpusDocument> {
        self.documents.iter().filter(move |d| d.split == split)
    }

    pub fn gold_index(&self) -> BTreeMap<String, GoldDoc<'_>> {
        self.documents
            .iter()
            .map(|d| {
                (
                    d.doc_id().to_string(),
                    GoldDoc {
                        tree: &d.gold,
                        deps: &d.gold_deps,
                    },
                )
            })
            .collect()
    }
}

/// Where and how to load a corpus.
#[derive(Debug, Clone)]
pub struct CorpusLayout {
    pub root: PathBuf,
    pub scheme: RelationScheme,
    pub read: ReadOptions,
    /// Worker threads; 0 means one per core.
    pub jobs: usize,
    /// Only keep documents of these splits.
    pub splits: Option<BTreeSet<Split>>,
    /// Also read `dm`/`orphan` signals embedded in gold rs3 files.
    pub embedded_signals: bool,
}

impl CorpusLayout {
    pub fn new(root: impl Into<PathBuf>, scheme: RelationScheme) -> Self {
        CorpusLayout {
            root: root.into(),
            scheme,
            read: ReadOptions::default(),
            jobs: 0,
            splits: None,
            embedded_signals: false,
        }
    }
}

/// Run number from a `DOC.runK.ext` file name.
pub fn run_of_path(path: &Path) -> Option<usize> {
    let name = path.file_name()?.to_str()?;
    name.split('.').skip(1).find_map(|part| part.strip_prefix("run")?.parse().ok())
}

/// Tree files directly inside `dir`, sorted by name.
pub(crate) fn tree_files(dir: &Path) -> Result<Vec<(PathBuf, TreeFormat)>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() {
            if let Some(format) = TreeFormat::of_path(&path) {
                files.push((path, format));
            }
        }
    }
    files.sort();
    Ok(files)
}

fn subdirs(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    if !dir.is_dir() {
        return Ok(out);
    }
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default().to_string();
            out.push((name, path));
        }
    }
    out.sort();
    Ok(out)
}

struct Metadata {
    genres: BTreeMap<String, String>,
    splits: BTreeMap<String, Split>,
}

fn read_metadata(path: &Path) -> Result<Metadata> {
    let mut meta = Metadata {
        genres: BTreeMap::new(),
        splits: BTreeMap::new(),
    };
    if !path.is_file() {
        return Ok(meta);
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') || (i == 0 && line.starts_with("doc_id")) {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        match cols.as_slice() {
            [doc, genre, rest @ ..] => {
                meta.genres.insert(doc.to_string(), genre.to_string());
                if let Some(split) = rest.first().filter(|s| !s.is_empty()) {
                    meta.splits.insert(doc.to_string(), split.parse()?);
                }
            }
            _ => {
                return Err(Error::parse(
                    "metadata",
                    Some(format!("line {}", i + 1)),
                    "expected doc_id, genre[, split]",
                ))
            }
        }
    }
    Ok(meta)
}

struct GoldFile {
    path: PathBuf,
    format: TreeFormat,
    split: Split,
}

struct LoadedGold {
    tree: RstTree,
    deps: DepGraph,
    signals: Vec<DmAnnotation>,
}

fn read_tree(path: &Path, format: TreeFormat, opts: &ReadOptions) -> Result<RstTree> {
    match format {
        TreeFormat::Rs3 => Ok(read_rs3_document(path, opts)?.tree),
        TreeFormat::Dis => read_dis(path, opts),
        TreeFormat::Rsd => Err(Error::Config(format!("{} is not a constituent tree", path.display()))),
    }
}

fn load_gold(file: &GoldFile, layout: &CorpusLayout) -> Result<LoadedGold> {
    let (tree, signals_doc) = match file.format {
        TreeFormat::Rs3 => {
            let doc = read_rs3_document(&file.path, &layout.read)?;
            (doc.tree.clone(), Some(doc))
        }
        other => (read_tree(&file.path, other, &layout.read)?, None),
    };
    layout.scheme.check_total(tree.labels())?;
    let deps = to_dependencies(&tree, &layout.scheme)?;
    let signals = match signals_doc {
        Some(doc) if layout.embedded_signals => parse_rs3_signals(&doc, &deps)?,
        _ => Vec::new(),
    };
    Ok(LoadedGold { tree, deps, signals })
}

fn load_prediction(path: &Path, format: TreeFormat, gold: &RstTree, layout: &CorpusLayout) -> Result<Prediction> {
    let run = run_of_path(path).ok_or_else(|| Error::Config(format!("{}: no `.runK` suffix", path.display())))?;
    let mismatch = |message: String| Error::SegmentationMismatch {
        doc_id: gold.doc_id.clone(),
        message: format!("{}: {message}", path.display()),
    };
    let (tree, deps) = match format {
        TreeFormat::Rsd => (None, read_rsd(path, Some(&layout.scheme))?),
        other => {
            let opts = ReadOptions {
                genre: Some(gold.genre.clone()),
                ..layout.read.clone()
            };
            let tree = read_tree(path, other, &opts)?;
            let spans = |t: &RstTree| t.edus.iter().map(|e| (e.start, e.end)).collect::<Vec<_>>();
            if spans(&tree) != spans(gold) {
                return Err(mismatch("predicted EDU segmentation differs from gold".into()));
            }
            let deps = to_dependencies(&tree, &layout.scheme)?;
            (Some(tree), deps)
        }
    };
    if deps.len() != gold.n_edus() {
        return Err(mismatch(format!("{} EDUs predicted, {} in gold", deps.len(), gold.n_edus())));
    }
    Ok(Prediction { run, tree, deps })
}

/// Load a corpus directory, fanning out over files on `layout.jobs` threads.
pub fn load_corpus(layout: &CorpusLayout) -> Result<Corpus> {
    let root = &layout.root;
    let meta = read_metadata(&root.join("metadata.tsv"))?;
    let mut layout = layout.clone();
    for (doc, genre) in &meta.genres {
        layout.read.genres.entry(doc.clone()).or_insert_with(|| genre.clone());
    }
    let layout = &layout;

    let gold_dir = root.join("gold");
    if !gold_dir.is_dir() {
        return Err(Error::Config(format!("{} has no gold/ directory", root.display())));
    }
    let mut gold_files = Vec::new();
    for (path, format) in tree_files(&gold_dir)? {
        gold_files.push(GoldFile {
            path,
            format,
            split: Split::Test,
        });
    }
    for (name, dir) in subdirs(&gold_dir)? {
        let Ok(split) = name.parse::<Split>() else { continue };
        for (path, format) in tree_files(&dir)? {
            gold_files.push(GoldFile { path, format, split });
        }
    }
    gold_files.retain(|f| f.format != TreeFormat::Rsd);
    for file in &mut gold_files {
        if let Some(split) = meta.splits.get(&doc_id_from_path(&file.path)) {
            file.split = *split;
        }
    }
    if let Some(keep) = &layout.splits {
        gold_files.retain(|f| keep.contains(&f.split));
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(layout.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let loaded: Vec<LoadedGold> = pool.install(|| gold_files.par_iter().map(|f| load_gold(f, layout)).collect::<Result<_>>())?;
    let mut documents: BTreeMap<String, CorpusDocument> = BTreeMap::new();
    let mut dm_annotations = Vec::new();
    for (file, gold) in gold_files.iter().zip(loaded) {
        let doc_id = gold.tree.doc_id.clone();
        dm_annotations.extend(gold.signals);
        let doc = CorpusDocument {
            gold: gold.tree,
            gold_deps: gold.deps,
            split: file.split,
            syntax: None,
            predictions: BTreeMap::new(),
            secondary: Vec::new(),
        };
        if documents.insert(doc_id.clone(), doc).is_some() {
            return Err(Error::Config(format!("duplicate gold document {doc_id}")));
        }
    }

    // predictions for documents outside the selected splits are skipped
    let mut pred_jobs = Vec::new();
    for (arch, dir) in subdirs(&root.join("pred"))? {
        for (path, format) in tree_files(&dir)? {
            let doc_id = doc_id_from_path(&path);
            if documents.contains_key(&doc_id) {
                pred_jobs.push((arch.clone(), doc_id, path, format));
            }
        }
    }
    let preds: Vec<Prediction> = pool.install(|| {
        pred_jobs
            .par_iter()
            .map(|(_, doc_id, path, format)| load_prediction(path, *format, &documents[doc_id].gold, layout))
            .collect::<Result<_>>()
    })?;
    for ((arch, doc_id, path, _), pred) in pred_jobs.into_iter().zip(preds) {
        let runs = documents.get_mut(&doc_id).expect("known").predictions.entry(arch).or_default();
        if runs.iter().any(|p| p.run == pred.run) {
            return Err(Error::Config(format!("{}: run {} given twice", path.display(), pred.run)));
        }
        runs.push(pred);
    }
    for doc in documents.values_mut() {
        for runs in doc.predictions.values_mut() {
            runs.sort_by_key(|p| p.run);
        }
    }

    for (annotator, dir) in subdirs(&root.join("second"))? {
        let opts = ReadOptions {
            annotator: Some(annotator.clone()),
            ..layout.read.clone()
        };
        for (path, format) in tree_files(&dir)? {
            if let Some(doc) = documents.get_mut(&doc_id_from_path(&path)) {
                if format != TreeFormat::Rsd {
                    doc.secondary.push(read_tree(&path, format, &opts)?);
                }
            }
        }
    }

    let syntax_dir = root.join("syntax");
    if syntax_dir.is_dir() {
        for doc in documents.values_mut() {
            let path = syntax_dir.join(format!("{}.tsv", doc.doc_id()));
            if path.is_file() {
                doc.syntax = Some(read_syntax(&path)?);
            }
        }
    }

    let mut corpus = Corpus {
        documents: documents.into_values().collect(),
        dm_annotations,
    };
    let dm_dir = root.join("dm");
    if dm_dir.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(&dm_dir)
            .map_err(|e| Error::io(&dm_dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "tsv"))
            .collect();
        files.sort();
        let index = corpus.gold_index();
        let mut rows = Vec::new();
        for path in files {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            // rows of documents outside the loaded splits are dropped
            let kept: String = text
                .lines()
                .filter(|l| {
                    let doc = l.split('\t').next().unwrap_or_default();
                    l.starts_with('#') || doc == "doc_id" || index.contains_key(doc)
                })
                .map(|l| format!("{l}\n"))
                .collect();
            rows.extend(parse_dm_annotations(&kept, &index)?);
        }
        corpus.dm_annotations.extend(rows);
    }
    corpus
        .dm_annotations
        .sort_by(|a, b| (&a.doc_id, &a.token_indices).cmp(&(&b.doc_id, &b.token_indices)));
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_suffix() {
        assert_eq!(run_of_path(Path::new("x/GUM_a.run3.rs3")), Some(3));
        assert_eq!(run_of_path(Path::new("wsj_0001.run12.out.dis")), Some(12));
        assert_eq!(run_of_path(Path::new("GUM_a.rs3")), None);
    }

    #[test]
    fn split_names() {
        assert_eq!("Dev".parse::<Split>().unwrap(), Split::Dev);
        assert!("holdout".parse::<Split>().is_err());
    }
}
