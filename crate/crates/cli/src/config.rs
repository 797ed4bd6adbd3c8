//! Run configuration: one TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use rstdiag::analysis::{BetaOptions, DmClassMap};
use rstdiag::boost::GbtParams;
use rstdiag::discourse::RelationScheme;
use rstdiag::eval::ErrorTarget;
use rstdiag::features::FeatureMode;
use rstdiag::treeops::SubordStrategy;

/// Environment variable naming the default config file.
pub const CONFIG_ENV: &str = "RSTDIAG_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Corpus label used in report column names.
    #[serde(default = "default_name")]
    pub name: String,
    /// Corpus root directory (gold/, pred/, syntax/, dm/, ...).
    pub corpus: Option<PathBuf>,
    /// `gum`, `rst-dt`, or a relation mapping table.
    #[serde(default = "default_scheme")]
    pub scheme: String,
    /// `gum`, `rst-dt`, or a DM form → classes table.
    #[serde(default = "default_scheme")]
    pub dm_classes: String,
    /// Training vocabulary: a word list or a directory of training trees.
    pub vocabulary: Option<PathBuf>,
    /// `syntax` (dependency labels) or `intra-sentential`.
    #[serde(default = "default_subord")]
    pub subord: String,
    /// Read DM signals embedded in gold rs3 files as well.
    #[serde(default)]
    pub embedded_signals: bool,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default = "default_threshold")]
    pub hard_threshold: usize,
    #[serde(default = "default_target")]
    pub target: String,
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default)]
    pub boost: BoostSection,
    #[serde(default)]
    pub beta: BetaSection,
    /// Directory of the config file; paths are hashed relative to it.
    #[serde(skip)]
    pub base: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoostSection {
    pub n_rounds: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_child_weight: f64,
    pub l2_reg: f64,
    pub subsample: f64,
}

impl Default for BoostSection {
    fn default() -> Self {
        let p = GbtParams::default();
        BoostSection {
            n_rounds: p.n_rounds,
            max_depth: p.max_depth,
            learning_rate: p.learning_rate,
            min_child_weight: p.min_child_weight,
            l2_reg: p.l2_reg,
            subsample: p.subsample,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BetaSection {
    pub doc_effects: bool,
    pub penalty: f64,
    pub max_iter: usize,
}

impl Default for BetaSection {
    fn default() -> Self {
        let o = BetaOptions::default();
        BetaSection {
            doc_effects: o.doc_effects,
            penalty: o.penalty,
            max_iter: o.max_iter,
        }
    }
}

fn default_name() -> String {
    "corpus".into()
}
fn default_scheme() -> String {
    "gum".into()
}
fn default_subord() -> String {
    "syntax".into()
}
fn default_output() -> PathBuf {
    PathBuf::from("rstdiag-out")
}
fn default_threshold() -> usize {
    3
}
fn default_target() -> String {
    "attach".into()
}
fn default_mode() -> String {
    "full".into()
}
fn default_folds() -> usize {
    5
}
fn default_jobs() -> usize {
    1
}

impl Default for RunConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config takes defaults")
    }
}

/// Command-line values that win over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub hard_threshold: Option<usize>,
    pub target: Option<String>,
    pub mode: Option<String>,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Read `path`; relative paths inside are taken from the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut config: RunConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.rebase(base);
        config.base = Some(base.to_path_buf());
        Ok(config)
    }

    /// The file named on the command line, else the one in `RSTDIAG_CONFIG`.
    pub fn locate(explicit: Option<&Path>) -> Result<Self> {
        match explicit {
            Some(p) => Self::load(p),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(p) => Self::load(Path::new(&p)),
                None => bail!("no config file given (use --config or set {CONFIG_ENV})"),
            },
        }
    }

    fn rebase(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(c) = &mut self.corpus {
            join(c);
        }
        if let Some(v) = &mut self.vocabulary {
            join(v);
        }
        join(&mut self.output);
        for table in [&mut self.scheme, &mut self.dm_classes] {
            if !is_builtin(table) && Path::new(table.as_str()).is_relative() {
                *table = base.join(table.as_str()).display().to_string();
            }
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.jobs {
            self.jobs = v;
        }
        if let Some(v) = o.hard_threshold {
            self.hard_threshold = v;
        }
        if let Some(v) = &o.target {
            self.target = v.clone();
        }
        if let Some(v) = &o.mode {
            self.mode = v.clone();
        }
        if let Some(v) = &o.output {
            self.output = v.clone();
        }
    }

    /// Check enumerations and that every referenced path exists.
    pub fn validate(&self) -> Result<()> {
        self.target()?;
        self.mode()?;
        self.subord()?;
        self.gbt_params().validate()?;
        if self.folds < 2 {
            bail!("config key `folds` must be at least 2");
        }
        if self.hard_threshold == 0 {
            bail!("config key `hard_threshold` must be at least 1");
        }
        let corpus = self.corpus_root()?;
        if !corpus.is_dir() {
            bail!("config key `corpus`: {} is not a directory", corpus.display());
        }
        if let Some(v) = &self.vocabulary {
            if !v.exists() {
                bail!("config key `vocabulary`: {} does not exist", v.display());
            }
        }
        for (key, table) in [("scheme", &self.scheme), ("dm_classes", &self.dm_classes)] {
            if !is_builtin(table) && !Path::new(table.as_str()).is_file() {
                bail!("config key `{key}`: {table} does not exist");
            }
        }
        Ok(())
    }

    pub fn corpus_root(&self) -> Result<&Path> {
        self.corpus.as_deref().context("missing config key `corpus`")
    }

    pub fn vocabulary_path(&self) -> Result<&Path> {
        self.vocabulary.as_deref().context("missing config key `vocabulary`")
    }

    pub fn target(&self) -> Result<ErrorTarget> {
        self.target.parse().map_err(|e| anyhow::anyhow!("config key `target`: {e}"))
    }

    pub fn mode(&self) -> Result<FeatureMode> {
        self.mode.parse().map_err(|e| anyhow::anyhow!("config key `mode`: {e}"))
    }

    pub fn subord(&self) -> Result<SubordStrategy> {
        match self.subord.as_str() {
            "syntax" => Ok(SubordStrategy::default_syntax()),
            "intra-sentential" => Ok(SubordStrategy::IntraSentential),
            other => bail!("config key `subord`: unknown strategy `{other}`"),
        }
    }

    pub fn relation_scheme(&self) -> Result<RelationScheme> {
        Ok(match self.scheme.as_str() {
            "gum" => RelationScheme::gum(),
            "rst-dt" => RelationScheme::rst_dt(),
            path => RelationScheme::load(Path::new(path))?,
        })
    }

    pub fn dm_class_map(&self) -> Result<DmClassMap> {
        Ok(match self.dm_classes.as_str() {
            "gum" => DmClassMap::gum(),
            "rst-dt" => DmClassMap::rst_dt(),
            path => DmClassMap::load(Path::new(path))?,
        })
    }

    pub fn gbt_params(&self) -> GbtParams {
        let b = &self.boost;
        GbtParams {
            n_rounds: b.n_rounds,
            max_depth: b.max_depth,
            learning_rate: b.learning_rate,
            min_child_weight: b.min_child_weight,
            l2_reg: b.l2_reg,
            subsample: b.subsample,
            seed: self.seed,
        }
    }

    pub fn beta_options(&self) -> BetaOptions {
        BetaOptions {
            doc_effects: self.beta.doc_effects,
            penalty: self.beta.penalty,
            max_iter: self.beta.max_iter,
            ..BetaOptions::default()
        }
    }

    /// SHA-256 over the effective configuration. The output directory is
    /// left out and input paths are taken relative to the config file, so
    /// relocating a checkout or writing elsewhere keeps the hash.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        let anchor = self.base.clone().unwrap_or_default();
        let rel = |p: &Path| p.strip_prefix(&anchor).map(Path::to_path_buf).unwrap_or_else(|_| p.to_path_buf());
        canonical.corpus = canonical.corpus.as_deref().map(rel);
        canonical.vocabulary = canonical.vocabulary.as_deref().map(rel);
        canonical.output = PathBuf::new();
        for table in [&mut canonical.scheme, &mut canonical.dm_classes] {
            if !is_builtin(table) {
                *table = rel(Path::new(table.as_str())).display().to_string();
            }
        }
        let text = serde_json::to_string(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

fn is_builtin(name: &str) -> bool {
    matches!(name, "gum" | "rst-dt")
}
