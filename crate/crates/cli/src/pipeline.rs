//! Pipeline stages. Each stage computes from the loaded corpus and writes
//! its tables through [`Outputs`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use log::{info, warn};

use rstdiag::analysis::{
    chi_square_phi, consistency_cases, distractor_consistency, term_p_values, welch_t, PValueGrid, Response,
    TestResult,
};
use rstdiag::boost::{cross_validate, fit, importance_report, write_model, Importance};
use rstdiag::discourse::{DepGraph, RelationScheme};
use rstdiag::eval::{error_profiles, parseval, ErrorProfile, ErrorTarget, LabelLevel, ParsevalCounts};
use rstdiag::features::{build_rows, marking_stats, Dataset, FeatureMode, FeatureRow, MarkingCounts};
use rstdiag::ingest::{load_corpus, load_vocabulary, read_dis, read_rs3, write_rsd, Corpus, CorpusLayout, ReadOptions, TreeFormat};
use rstdiag::treeops::{structural_profile, to_dependencies, StructuralProfile};

use crate::config::RunConfig;
use crate::output::{fmt_f, Outputs};

/// Feature sets of the significance grid, each extending the previous one.
pub const FEATURE_SETS: [(&str, &[&str]); 3] = [
    ("markers", &["signal_dm", "distractor_present"]),
    ("markers+subord", &["signal_dm", "distractor_present", "subord"]),
    (
        "all",
        &["signal_dm", "distractor_present", "subord", "length_tokens", "oov_rate", "genre"],
    ),
];

/// A loaded corpus with the settings of one run.
pub struct Session {
    pub config: RunConfig,
    pub scheme: RelationScheme,
    pub corpus: Corpus,
    pub target: ErrorTarget,
    pub mode: FeatureMode,
}

/// Tag errors with the stage that raised them.
pub fn stage<T>(name: &str, result: Result<T>) -> Result<T> {
    result.with_context(|| format!("stage `{name}` failed"))
}

impl Session {
    pub fn open(config: RunConfig) -> Result<Session> {
        config.validate()?;
        let scheme = config.relation_scheme()?;
        let mut layout = CorpusLayout::new(config.corpus_root()?, scheme.clone());
        layout.jobs = config.jobs;
        layout.embedded_signals = config.embedded_signals;
        let corpus = stage("load", load_corpus(&layout).map_err(Into::into))?;
        info!(
            "loaded {} documents, {} DM annotations, architectures {:?}",
            corpus.documents.len(),
            corpus.dm_annotations.len(),
            corpus.architectures()
        );
        Ok(Session {
            target: config.target()?,
            mode: config.mode()?,
            config,
            scheme,
            corpus,
        })
    }

    pub fn architectures(&self) -> Vec<String> {
        self.corpus.architectures().into_iter().map(String::from).collect()
    }

    fn runs(&self, arch: &str, doc: &rstdiag::ingest::CorpusDocument) -> Vec<DepGraph> {
        doc.predictions
            .get(arch)
            .map(|runs| runs.iter().map(|p| p.deps.clone()).collect())
            .unwrap_or_default()
    }

    /// Error profiles per architecture and document.
    pub fn error_profiles(&self) -> Result<BTreeMap<String, BTreeMap<String, Vec<ErrorProfile>>>> {
        let mut out = BTreeMap::new();
        for arch in self.architectures() {
            let mut per_doc = BTreeMap::new();
            for doc in &self.corpus.documents {
                let runs = self.runs(&arch, doc);
                if runs.is_empty() {
                    return Err(anyhow!("architecture `{arch}` has no runs for {}", doc.doc_id()));
                }
                let profiles = error_profiles(&doc.gold_deps, &runs, self.config.hard_threshold, self.target)?;
                per_doc.insert(doc.doc_id().to_string(), profiles);
            }
            out.insert(arch, per_doc);
        }
        Ok(out)
    }

    pub fn structural_profiles(&self) -> Result<BTreeMap<String, Vec<StructuralProfile>>> {
        let strategy = self.config.subord()?;
        self.corpus
            .documents
            .iter()
            .map(|d| {
                let p = structural_profile(&d.gold, &d.gold_deps, d.syntax.as_ref(), &strategy)?;
                Ok((d.doc_id().to_string(), p))
            })
            .collect()
    }

    /// Feature rows per architecture.
    pub fn feature_rows(&self) -> Result<BTreeMap<String, Vec<FeatureRow>>> {
        let vocab = load_vocabulary(self.config.vocabulary_path()?)?;
        let structural = self.structural_profiles()?;
        self.error_profiles()?
            .into_iter()
            .map(|(arch, profiles)| Ok((arch, build_rows(&self.corpus, &profiles, &structural, &vocab)?)))
            .collect()
    }

    fn response(&self) -> Response {
        match self.target {
            ErrorTarget::Attach => Response::ScaledAttach,
            ErrorTarget::Label | ErrorTarget::Either => Response::ScaledLabel,
        }
    }
}

/// Gold and predicted trees as rsd files.
pub fn run_convert(s: &Session, out: &mut Outputs) -> Result<()> {
    for doc in &s.corpus.documents {
        out.write(&format!("convert/gold/{}.rsd", doc.doc_id()), &write_rsd(&doc.gold_deps))?;
        for (arch, runs) in &doc.predictions {
            for p in runs {
                out.write(&format!("convert/{arch}/{}.run{}.rsd", doc.doc_id(), p.run), &write_rsd(&p.deps))?;
            }
        }
    }
    Ok(())
}

/// Per-run micro-averaged Parseval against gold, the mean over runs, and
/// secondary annotators against gold.
pub fn run_score(s: &Session, out: &mut Outputs) -> Result<()> {
    let mut records: Vec<[String; 6]> = Vec::new();
    let row = |source: &str, run: &str, s: f64, n: f64, r: f64, spans: String| {
        [source.to_string(), run.to_string(), fmt_f(s), fmt_f(n), fmt_f(r), spans]
    };
    for arch in s.architectures() {
        let mut per_run: BTreeMap<usize, ParsevalCounts> = BTreeMap::new();
        for doc in &s.corpus.documents {
            for p in doc.predictions.get(&arch).into_iter().flatten() {
                let Some(tree) = &p.tree else { continue };
                let score = parseval(&doc.gold, tree, &s.scheme, LabelLevel::Class)?;
                per_run.entry(p.run).or_default().add(&score.counts);
            }
        }
        if per_run.is_empty() {
            warn!("architecture `{arch}` has only dependency predictions; Parseval skipped");
            continue;
        }
        let scores: Vec<_> = per_run.values().map(ParsevalCounts::score).collect();
        for ((run, counts), sc) in per_run.iter().zip(&scores) {
            records.push(row(&arch, &run.to_string(), sc.s, sc.n, sc.r, counts.total.to_string()));
        }
        let k = scores.len() as f64;
        let mean = |f: fn(&rstdiag::eval::ParsevalScore) -> f64| scores.iter().map(f).sum::<f64>() / k;
        records.push(row(&arch, "mean", mean(|x| x.s), mean(|x| x.n), mean(|x| x.r), String::new()));
    }
    let mut second: BTreeMap<String, ParsevalCounts> = BTreeMap::new();
    for doc in &s.corpus.documents {
        for tree in &doc.secondary {
            let name = tree.annotator.clone().unwrap_or_else(|| "second".into());
            let score = parseval(&doc.gold, tree, &s.scheme, LabelLevel::Class)?;
            second.entry(name).or_default().add(&score.counts);
        }
    }
    for (name, counts) in &second {
        let sc = counts.score();
        records.push(row(&format!("annotator:{name}"), "-", sc.s, sc.n, sc.r, counts.total.to_string()));
    }
    out.write_csv("scores.csv", |w| {
        w.write_record(["source", "run", "S", "N", "R", "spans"])?;
        for r in &records {
            w.write_record(r)?;
        }
        Ok(())
    })?;
    Ok(())
}

/// Per-EDU error counts for each architecture.
pub fn run_errors(s: &Session, out: &mut Outputs) -> Result<()> {
    for (arch, per_doc) in s.error_profiles()? {
        out.write_csv(&format!("errors/{arch}.csv"), |w| {
            w.write_record([
                "doc_id",
                "edu_id",
                "attach_errors",
                "label_errors",
                "either_errors",
                "k",
                "scaled_attach",
                "scaled_label",
                "is_hard",
            ])?;
            for (doc, profiles) in &per_doc {
                for p in profiles {
                    w.write_record([
                        doc.clone(),
                        p.edu_id.to_string(),
                        p.attach_errors.to_string(),
                        p.label_errors.to_string(),
                        p.either_errors.to_string(),
                        p.k.to_string(),
                        fmt_f(p.scaled_attach),
                        fmt_f(p.scaled_label),
                        p.is_hard.to_string(),
                    ])?;
                }
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn dataset_csv(data: &Dataset) -> Result<String> {
    let mut buf = Vec::new();
    data.write_csv(&mut buf)?;
    Ok(String::from_utf8(buf)?)
}

/// Feature tables in the configured mode, one per architecture.
pub fn run_features(s: &Session, rows: &BTreeMap<String, Vec<FeatureRow>>, out: &mut Outputs) -> Result<()> {
    for (arch, rows) in rows {
        let data = FeatureRow::project(rows, s.mode);
        out.write(&format!("features/{arch}.{}.csv", s.mode), &dataset_csv(&data)?)?;
    }
    Ok(())
}

fn marking_record(scope: &str, key: &str, c: &MarkingCounts) -> Vec<String> {
    vec![
        scope.to_string(),
        key.to_string(),
        c.instances.to_string(),
        c.explicit.to_string(),
        c.implicit.to_string(),
        fmt_f(c.explicit_pct()),
        fmt_f(c.implicit_pct()),
        c.distractor_edus.to_string(),
        fmt_f(c.distractor_edu_pct()),
        c.distractor_instances.to_string(),
        fmt_f(c.distractor_instance_pct()),
    ]
}

fn test_record(arch: &str, name: &str, t: &TestResult, n: (usize, usize)) -> Vec<String> {
    vec![
        arch.to_string(),
        name.to_string(),
        fmt_f(t.statistic),
        fmt_f(t.df),
        t.effect_size.map(fmt_f).unwrap_or_default(),
        format!("{:.3e}", t.p_value),
        n.0.to_string(),
        n.1.to_string(),
    ]
}

fn split_by(rows: &[FeatureRow], pred: impl Fn(&FeatureRow) -> bool) -> (Vec<f64>, Vec<f64>) {
    let mut yes = Vec::new();
    let mut no = Vec::new();
    for r in rows {
        if pred(r) {
            yes.push(r.scaled_attach);
        } else {
            no.push(r.scaled_attach);
        }
    }
    (yes, no)
}

/// Marking statistics, group tests, the significance grid and the
/// distractor consistency analysis.
pub fn run_stats(s: &Session, rows: &BTreeMap<String, Vec<FeatureRow>>, out: &mut Outputs) -> Result<()> {
    let stats = marking_stats(&s.corpus);
    out.write_csv("stats/marking.csv", |w| {
        w.write_record([
            "scope",
            "key",
            "instances",
            "explicit",
            "implicit",
            "explicit_pct",
            "implicit_pct",
            "distractor_edus",
            "distractor_edu_pct",
            "distractor_instances",
            "distractor_instance_pct",
        ])?;
        w.write_record(marking_record("total", "all", &stats.total))?;
        for (k, c) in &stats.by_class {
            w.write_record(marking_record("class", k, c))?;
        }
        for (k, c) in &stats.by_genre {
            w.write_record(marking_record("genre", k, c))?;
        }
        Ok(())
    })?;

    // scaled attachment errors with vs. without markers
    let mut tests = Vec::new();
    for (arch, rows) in rows {
        for (name, pred) in [
            ("scaled_attach~signal_dm", (|r: &FeatureRow| r.signal_dm) as fn(&FeatureRow) -> bool),
            ("scaled_attach~distractor_present", |r: &FeatureRow| r.distractor_present),
        ] {
            let (a, b) = split_by(rows, pred);
            match welch_t(&a, &b) {
                Ok(t) => tests.push(test_record(arch, name, &t, (a.len(), b.len()))),
                Err(e) => warn!("{arch}: {name} skipped: {e}"),
            }
        }
    }
    // hard-EDU rates of two architectures on unmarked / distractor EDUs
    let archs: Vec<&String> = rows.keys().collect();
    if let [a, b, ..] = archs.as_slice() {
        for (name, pred) in [
            ("target_hard~architecture|no_signal_dm", (|r: &FeatureRow| !r.signal_dm) as fn(&FeatureRow) -> bool),
            ("target_hard~architecture|distractor_present", |r: &FeatureRow| r.distractor_present),
        ] {
            let count = |rows: &[FeatureRow]| {
                let sel: Vec<&FeatureRow> = rows.iter().filter(|r| pred(r)).collect();
                let hard = sel.iter().filter(|r| r.target_hard).count() as u64;
                [hard, sel.len() as u64 - hard]
            };
            let table = [count(&rows[*a]), count(&rows[*b])];
            let label = format!("{a}|{b}");
            match chi_square_phi(table) {
                Ok(t) => {
                    let n = ((table[0][0] + table[0][1]) as usize, (table[1][0] + table[1][1]) as usize);
                    tests.push(test_record(&label, name, &t, n));
                }
                Err(e) => warn!("{label}: {name} skipped: {e}"),
            }
        }
    }
    out.write_csv("stats/tests.csv", |w| {
        w.write_record(["architecture", "test", "statistic", "df", "effect_size", "p_value", "n_a", "n_b"])?;
        for t in &tests {
            w.write_record(t)?;
        }
        Ok(())
    })?;

    let (grid, notes) = significance_grid(s, rows)?;
    let mut body = String::new();
    for note in &notes {
        let _ = writeln!(body, "# skipped {note}");
    }
    let mut buf = Vec::new();
    grid.write_csv(&mut buf)?;
    body.push_str(&String::from_utf8(buf)?);
    out.write("stats/pvalues.csv", &body)?;

    run_consistency(s, out)
}

/// One column per architecture and feature set; terms whose column has a
/// single value in the data are dropped from that model.
pub fn significance_grid(s: &Session, rows: &BTreeMap<String, Vec<FeatureRow>>) -> Result<(PValueGrid, Vec<String>)> {
    let mut grid = PValueGrid::new();
    let mut notes = Vec::new();
    let opts = s.config.beta_options();
    for (arch, rows) in rows {
        let full = FeatureRow::project(rows, FeatureMode::Full);
        for (set, terms) in FEATURE_SETS {
            let column = format!("{}/{arch}/{set}", s.config.name);
            let kept: Vec<&str> = terms
                .iter()
                .copied()
                .filter(|t| {
                    let j = full.column_index(t).expect("full mode has every grid term");
                    let first = full.rows.first().map(|r| &r.values[j]);
                    let varies = full.rows.iter().any(|r| Some(&r.values[j]) != first);
                    if !varies {
                        notes.push(format!("{column}: term {t} is constant"));
                    }
                    varies
                })
                .collect();
            let data = full.select(&kept)?;
            match term_p_values(&data, &kept, s.response(), &opts) {
                Ok(values) => grid.add_column(&column, &values),
                Err(e) => {
                    warn!("{column}: {e}");
                    notes.push(format!("{column}: {e}"));
                }
            }
        }
    }
    Ok((grid, notes))
}

fn run_consistency(s: &Session, out: &mut Outputs) -> Result<()> {
    let map = s.config.dm_class_map()?;
    let mut summary = Vec::new();
    let mut cases = Vec::new();
    for (arch, per_doc) in s.error_profiles()? {
        let mut all = Vec::new();
        for doc in &s.corpus.documents {
            let runs = s.runs(&arch, doc);
            all.extend(consistency_cases(
                &doc.gold_deps,
                &runs,
                &per_doc[doc.doc_id()],
                &s.corpus.dm_annotations,
            )?);
        }
        let report = distractor_consistency(&all, &map);
        summary.push(vec![
            arch.clone(),
            report.distractor_edus.to_string(),
            report.erroneous.to_string(),
            fmt_f(report.erroneous_pct()),
            report.consistent.to_string(),
            report.inconsistent.to_string(),
            report.uncoverable.to_string(),
            fmt_f(report.consistent_pct()),
        ]);
        for (c, verdict) in &report.verdicts {
            cases.push(vec![
                arch.clone(),
                c.doc_id.clone(),
                c.edu_id.to_string(),
                c.distractor_forms.join("|"),
                c.gold_class.clone(),
                c.majority_class.clone(),
                format!("{verdict:?}").to_lowercase(),
            ]);
        }
    }
    out.write_csv("stats/consistency.csv", |w| {
        w.write_record([
            "architecture",
            "distractor_edus",
            "erroneous",
            "erroneous_pct",
            "consistent",
            "inconsistent",
            "uncoverable",
            "consistent_pct",
        ])?;
        for r in &summary {
            w.write_record(r)?;
        }
        Ok(())
    })?;
    out.write_csv("stats/consistency_cases.csv", |w| {
        w.write_record(["architecture", "doc_id", "edu_id", "distractors", "gold_class", "majority_class", "verdict"])?;
        for r in &cases {
            w.write_record(r)?;
        }
        Ok(())
    })?;
    Ok(())
}

/// Boosted models on every architecture's rows: a full-data fit saved as
/// text, cross-validated accuracy with the majority baseline, and gain
/// importances.
pub fn run_model(s: &Session, rows: &BTreeMap<String, Vec<FeatureRow>>, out: &mut Outputs) -> Result<()> {
    let params = s.config.gbt_params();
    let mut cv_rows = Vec::new();
    let mut importances: Vec<(String, &'static str, Vec<Importance>)> = Vec::new();
    for (arch, rows) in rows {
        let data = FeatureRow::project(rows, s.mode);
        let model = fit(&data, &params)?;
        out.write(&format!("model/{arch}.{}.gbt", s.mode), &write_model(&model)?)?;
        let report = cross_validate(&data, &params, s.config.folds)?;
        for (k, (acc, base)) in report.fold_accuracies.iter().zip(&report.fold_baselines).enumerate() {
            cv_rows.push(vec![arch.clone(), s.mode.to_string(), (k + 1).to_string(), fmt_f(*acc), fmt_f(*base)]);
        }
        cv_rows.push(vec![
            arch.clone(),
            s.mode.to_string(),
            "mean".into(),
            fmt_f(report.accuracy),
            fmt_f(report.baseline),
        ]);
        importances.push((arch.clone(), "full_fit", importance_report(&model)));
        importances.push((arch.clone(), "cv_pooled", report.importance()));
    }
    let protocol = format!(
        "# protocol: {} with k={}, seed={}\n",
        rstdiag::boost::CV_PROTOCOL,
        s.config.folds,
        s.config.seed
    );
    let mut buf = csv::Writer::from_writer(Vec::new());
    buf.write_record(["architecture", "mode", "fold", "accuracy", "majority_baseline"])?;
    for r in &cv_rows {
        buf.write_record(r)?;
    }
    out.write("model/cv.csv", &(protocol + &String::from_utf8(buf.into_inner()?)?))?;
    out.write_csv("model/importance.csv", |w| {
        w.write_record(["architecture", "mode", "source", "rank", "feature", "gain", "share"])?;
        for (arch, source, ranking) in &importances {
            for (i, imp) in ranking.iter().enumerate() {
                w.write_record([
                    arch.clone(),
                    s.mode.to_string(),
                    source.to_string(),
                    (i + 1).to_string(),
                    imp.feature.clone(),
                    fmt_f(imp.gain),
                    fmt_f(imp.share),
                ])?;
            }
        }
        Ok(())
    })?;
    Ok(())
}

/// Counts of EDUs per attachment error count, marker status and
/// architecture, for density plots.
pub fn run_report(rows: &BTreeMap<String, Vec<FeatureRow>>, k: usize, out: &mut Outputs) -> Result<()> {
    let mut records = Vec::new();
    for (arch, rows) in rows {
        for (grouping, pred) in [
            ("dm", (|r: &FeatureRow| r.signal_dm) as fn(&FeatureRow) -> bool),
            ("distractor", |r: &FeatureRow| r.distractor_present),
        ] {
            for status in [true, false] {
                let mut counts = vec![0usize; k + 1];
                for r in rows.iter().filter(|r| pred(r) == status) {
                    counts[r.attach_errors.min(k)] += 1;
                }
                for (errors, n) in counts.iter().enumerate() {
                    records.push([
                        arch.clone(),
                        grouping.to_string(),
                        if status { "present" } else { "absent" }.to_string(),
                        errors.to_string(),
                        n.to_string(),
                    ]);
                }
            }
        }
    }
    out.write_csv("report/density.csv", |w| {
        w.write_record(["architecture", "grouping", "status", "attach_errors", "n_edus"])?;
        for r in &records {
            w.write_record(r)?;
        }
        Ok(())
    })?;
    Ok(())
}

/// Number of runs per architecture (the largest, if documents differ).
pub fn runs_per_architecture(s: &Session) -> usize {
    s.corpus
        .documents
        .iter()
        .flat_map(|d| d.predictions.values().map(Vec::len))
        .max()
        .unwrap_or(0)
}

/// Every stage in order, then the manifest.
pub fn run_pipeline(s: &Session, out: &mut Outputs) -> Result<PathBuf> {
    stage("convert", run_convert(s, out))?;
    stage("score", run_score(s, out))?;
    stage("errors", run_errors(s, out))?;
    let rows = stage("features", s.feature_rows())?;
    stage("features", run_features(s, &rows, out))?;
    stage("stats", run_stats(s, &rows, out))?;
    stage("model", run_model(s, &rows, out))?;
    stage("report", run_report(&rows, runs_per_architecture(s), out))?;
    out.write_manifest()
}

/// Convert tree files (or directories of them) to rsd. Every file is
/// attempted; failures are returned with their paths.
pub fn convert_files(
    inputs: &[PathBuf],
    scheme: &RelationScheme,
    out: &mut Outputs,
) -> Result<(usize, Vec<(PathBuf, String)>)> {
    let mut files = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(input)
                .with_context(|| format!("listing {}", input.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| matches!(TreeFormat::of_path(p), Some(TreeFormat::Rs3 | TreeFormat::Dis)))
                .collect();
            found.sort();
            files.extend(found);
        } else {
            files.push(input.clone());
        }
    }
    let opts = ReadOptions::default();
    let mut failures = Vec::new();
    let mut written = 0;
    for file in files {
        let result = (|| -> Result<String> {
            let tree = match TreeFormat::of_path(&file) {
                Some(TreeFormat::Rs3) => read_rs3(&file, &opts)?,
                Some(TreeFormat::Dis) => read_dis(&file, &opts)?,
                _ => return Err(anyhow!("not an rs3 or dis file")),
            };
            Ok(write_rsd(&to_dependencies(&tree, scheme)?))
        })();
        match result {
            Ok(text) => {
                let stem = file_stem(&file);
                out.write(&format!("{stem}.rsd"), &text)?;
                written += 1;
            }
            Err(e) => failures.push((file, format!("{e:#}"))),
        }
    }
    Ok((written, failures))
}

fn file_stem(path: &Path) -> String {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    name.rsplit_once('.').map_or(name, |(s, _)| s).to_string()
}
