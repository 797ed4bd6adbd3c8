//! Acceptance criteria, one line each. Criteria that need released corpora
//! read them from environment variables and report SKIP when unset:
//!
//! - `RSTDIAG_GUM_DIR`: GUM corpus root (gold/dev, gold/test, dm/ or
//!   embedded signals, and pred/bottom_up/ for the parser-output checks)
//! - `RSTDIAG_RSTDT_DIR`: RST-DT corpus root (gold/test, dm/)

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};

use rstdiag::analysis::{
    beta_fit, chi_square_phi, consistency_cases, distractor_consistency, lrt, welch_t, BetaOptions, DmClassMap,
    LogisticModel, Response,
};
use rstdiag::boost::{cross_validate, document_folds, fit, write_model, GbtParams};
use rstdiag::discourse::{DepGraph, DepNode, DmAnnotation, DmStatus, RelationScheme};
use rstdiag::eval::{error_profiles, parseval, ErrorTarget, LabelLevel};
use rstdiag::features::{marking_stats, DataRow, Dataset, FeatureColumn, FeatureKind, FeatureMode, FeatureRow, FeatureValue};
use rstdiag::ingest::{load_corpus, Corpus, CorpusLayout, Split};
use rstdiag::synth::{random_tree, TreeShape};
use rstdiag::treeops::{binarize, to_dependencies};
use rstdiag_cli::config::RunConfig;
use rstdiag_cli::pipeline::Session;

enum Outcome {
    Pass(String),
    Fail(String),
    Skip(String),
}

use Outcome::{Fail, Pass, Skip};

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Pass(detail)
    } else {
        Fail(detail)
    }
}

fn data_dir(var: &str) -> Option<PathBuf> {
    std::env::var_os(var).map(PathBuf::from).filter(|p| p.is_dir())
}

fn load(root: &Path, scheme: RelationScheme, splits: &[Split]) -> Corpus {
    let mut layout = CorpusLayout::new(root, scheme);
    layout.splits = Some(splits.iter().copied().collect());
    layout.embedded_signals = !root.join("dm").is_dir();
    load_corpus(&layout).expect("released corpus loads")
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// 1
fn parseval_identity_and_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let scheme = RelationScheme::gum();
    let mut bad = Vec::new();
    for i in 0..500 {
        let n = rng.gen_range(3..=10);
        let gold = random_tree(&mut rng, "g", n, TreeShape::binary());
        let pred = random_tree(&mut rng, "p", n, TreeShape::binary());
        let same = parseval(&gold, &gold, &scheme, LabelLevel::Class).unwrap();
        if (same.s, same.n, same.r) != (100.0, 100.0, 100.0) {
            bad.push(format!("identity #{i}"));
        }
        let s = parseval(&gold, &pred, &scheme, LabelLevel::Class).unwrap().s;
        if s != oracle::span_score(&gold, &pred) {
            bad.push(format!("oracle #{i}: {s}"));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        bad.is_empty() && secs < 10.0,
        format!("500 trees, {} mismatches, {secs:.2}s (limit 10s)", bad.len()),
    )
}

// 2
fn dependency_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let scheme = RelationScheme::gum();
    let (mut mismatches, mut variant) = (0, 0);
    for _ in 0..500 {
        let n = rng.gen_range(1..=10);
        let tree = random_tree(&mut rng, "d", n, TreeShape::default());
        let deps = to_dependencies(&tree, &scheme).unwrap();
        let got: Vec<(usize, String)> = deps.nodes().iter().map(|d| (d.head, d.relation.clone())).collect();
        mismatches += usize::from(got != oracle::dependencies(&tree));
        variant += usize::from(to_dependencies(&binarize(&tree), &scheme).unwrap() != deps);
    }
    verdict(
        mismatches == 0 && variant == 0,
        format!("500 trees, {mismatches} oracle mismatches, {variant} binarization changes"),
    )
}

// 3
fn gum_statistics() -> Outcome {
    let Some(root) = data_dir("RSTDIAG_GUM_DIR") else {
        return Skip("RSTDIAG_GUM_DIR not set; released GUM v9 annotations absent".into());
    };
    let start = Instant::now();
    let corpus = load(&root, RelationScheme::gum(), &[Split::Dev, Split::Test]);
    let stats = marking_stats(&corpus);
    let secs = start.elapsed().as_secs_f64();
    let t = &stats.total;
    let mut ok = (t.explicit, t.implicit, t.distractor_edus) == (1198, 4332, 174)
        && close(t.explicit_pct(), 21.7, 0.1)
        && close(t.implicit_pct(), 78.3, 0.1)
        && close(t.distractor_edu_pct(), 3.1, 0.1)
        && secs < 60.0;
    let cls = |name: &str| stats.by_class.get(name).map(|c| (c.explicit, c.implicit, c.explicit_pct(), c.implicit_pct()));
    let cont = cls("Contingency");
    let attr = cls("Attribution");
    ok &= matches!(cont, Some((99, 9, p, _)) if close(p, 91.7, 0.1));
    ok &= matches!(attr, Some((0, 292, _, p)) if close(p, 100.0, 0.1));
    verdict(
        ok,
        format!(
            "explicit {} ({:.1}%), implicit {} ({:.1}%), distractor {} ({:.1}%); Contingency {cont:?}; Attribution {attr:?}; {secs:.1}s",
            t.explicit,
            t.explicit_pct(),
            t.implicit,
            t.implicit_pct(),
            t.distractor_edus,
            t.distractor_edu_pct()
        ),
    )
}

// 4
fn rstdt_statistics() -> Outcome {
    let Some(root) = data_dir("RSTDIAG_RSTDT_DIR") else {
        return Skip("RSTDIAG_RSTDT_DIR not set; licensed RST-DT data absent".into());
    };
    let corpus = load(&root, RelationScheme::rst_dt(), &[Split::Test]);
    let t = marking_stats(&corpus).total;
    verdict(
        (t.explicit, t.implicit, t.distractor_edus) == (398, 1948, 81) && corpus.documents.len() == 38,
        format!(
            "{} documents, explicit {} ({:.1}%), implicit {} ({:.1}%), distractor {} ({:.1}%)",
            corpus.documents.len(),
            t.explicit,
            t.explicit_pct(),
            t.implicit,
            t.implicit_pct(),
            t.distractor_edus,
            t.distractor_edu_pct()
        ),
    )
}

/// Two-sided p of Student's t with 4 degrees of freedom, in closed form.
fn t4_two_sided(t: f64) -> f64 {
    let x = t.abs() / (4.0 + t * t).sqrt();
    // CDF for nu = 4: 1/2 + (x/2)(3 - x^2)/2 with x = t / sqrt(4 + t^2)
    let upper = 0.5 - x * (3.0 - x * x) / 4.0;
    2.0 * upper
}

fn numeric_rows(columns: Vec<FeatureColumn>, rows: Vec<(String, Vec<FeatureValue>, f64)>) -> Dataset {
    Dataset {
        columns,
        rows: rows
            .into_iter()
            .enumerate()
            .map(|(i, (doc_id, values, y))| DataRow {
                doc_id,
                edu_id: i + 1,
                values,
                attach_errors: 0,
                label_errors: 0,
                scaled_attach: y,
                scaled_label: y,
                target_hard: y > 0.5,
            })
            .collect(),
    }
}

fn col(name: &str, kind: FeatureKind) -> FeatureColumn {
    FeatureColumn {
        name: name.into(),
        kind,
    }
}

// 5
fn statistics_oracles() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;

    let w = welch_t(&[1.0, 2.0, 3.0], &[2.0, 3.0, 4.0]).unwrap();
    // means 2 and 3, both variances 1: t = -1 / sqrt(2/3), df = 4, d = 1
    let t = -1.0 / (2.0f64 / 3.0).sqrt();
    ok &= close(w.statistic, t, 1e-6) && close(w.df, 4.0, 1e-6);
    ok &= close(w.effect_size.unwrap().abs(), 1.0, 1e-6) && close(w.p_value, t4_two_sided(t), 1e-6);
    notes.push(format!("welch t={:.6} df={:.3} p={:.6}", w.statistic, w.df, w.p_value));

    let c = chi_square_phi([[20, 5], [5, 20]]).unwrap();
    // p = erfc(3) for chi-square 18 on one degree of freedom
    ok &= c.statistic == 18.0 && c.effect_size == Some(0.6);
    ok &= close(c.p_value, 2.209_049_699_858_544e-5, 1e-9);
    notes.push(format!("chi2={} phi={:?}", c.statistic, c.effect_size.unwrap()));

    // a three-level factor: df 2, so p = exp(-statistic / 2)
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rows = (0..300)
        .map(|i| {
            let g = i % 3;
            let mu = [0.3, 0.4, 0.5][g];
            let y = Beta::new(mu * 8.0, (1.0 - mu) * 8.0).unwrap().sample(&mut rng);
            (format!("d{}", i % 10), vec![FeatureValue::Cat(format!("g{g}"))], y)
        })
        .collect();
    let data = numeric_rows(vec![col("genre", FeatureKind::Categorical)], rows);
    let opts = BetaOptions::default();
    let full = beta_fit(&data, &["genre"], Response::ScaledAttach, &opts).unwrap();
    let reduced = beta_fit(&data, &[], Response::ScaledAttach, &opts).unwrap();
    let l = lrt(&full, &reduced).unwrap();
    let stat = 2.0 * (full.penalized_log_likelihood - reduced.penalized_log_likelihood);
    ok &= close(l.statistic, stat, 1e-6) && l.df == 2.0 && close(l.p_value, (-stat / 2.0).exp(), 1e-6);
    notes.push(format!("lrt stat={:.4} df={} p={:.3e}", l.statistic, l.df, l.p_value));
    verdict(ok, notes.join("; "))
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

// 6
fn beta_recovery() -> Outcome {
    let opts = BetaOptions {
        doc_effects: false,
        ..BetaOptions::default()
    };
    let (mut within, mut null_ok, mut slowest) = (0, 0, 0.0f64);
    let mut worst = (0.0f64, 0.0f64);
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..2000)
            .map(|i| {
                let x: f64 = rng.gen_range(-2.0..2.0);
                let z: f64 = rng.gen_range(-2.0..2.0);
                let mu = sigmoid(-1.0 + 0.8 * x);
                let y = Beta::new(mu * 20.0, (1.0 - mu) * 20.0).unwrap().sample(&mut rng);
                (format!("d{}", i % 40), vec![FeatureValue::Num(x), FeatureValue::Num(z)], y)
            })
            .collect();
        let data = numeric_rows(vec![col("x", FeatureKind::Numeric), col("z", FeatureKind::Numeric)], rows);
        let start = Instant::now();
        let f = beta_fit(&data, &["x", "z"], Response::ScaledAttach, &opts).unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        let e0 = (f.coefficients[0] + 1.0).abs() / 1.0;
        let e1 = (f.coefficients[1] - 0.8).abs() / 0.8;
        worst = (worst.0.max(e0), worst.1.max(e1));
        within += usize::from(e0 <= 0.1 && e1 <= 0.1);
        null_ok += usize::from(f.p_values[2] > 0.1);
    }
    verdict(
        within == 20 && null_ok >= 19 && slowest < 2.0,
        format!(
            "coefficients within 10% in {within}/20 (worst {:.1}%, {:.1}%); null p > 0.1 in {null_ok}/20; slowest fit {slowest:.2}s",
            100.0 * worst.0,
            100.0 * worst.1
        ),
    )
}

fn xor_data(docs: usize, per_doc: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for d in 0..docs {
        for _ in 0..per_doc {
            let (x1, x2): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let hard = (x1 > 0.0) ^ (x2 > 0.0);
            let values = vec![FeatureValue::Num(x1), FeatureValue::Num(x2), FeatureValue::Num(rng.gen())];
            rows.push((format!("doc{d:03}"), values, if hard { 1.0 } else { 0.0 }));
        }
    }
    let cols = vec![
        col("x1", FeatureKind::Numeric),
        col("x2", FeatureKind::Numeric),
        col("noise", FeatureKind::Numeric),
    ];
    numeric_rows(cols, rows)
}

fn toy_rows() -> Dataset {
    let config = RunConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy/rstdiag.toml")).unwrap();
    let session = Session::open(config).unwrap();
    let rows = session.feature_rows().unwrap();
    FeatureRow::project(&rows["bottom_up"], FeatureMode::Full)
}

// 7
fn boosting() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    let xor = xor_data(40, 8, 1);
    let params = GbtParams {
        n_rounds: 50,
        max_depth: 3,
        ..GbtParams::default()
    };

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let noise = numeric_rows(
        vec![col("u", FeatureKind::Numeric)],
        (0..200)
            .map(|i| (format!("d{}", i % 20), vec![FeatureValue::Num(rng.gen())], f64::from(u8::from(rng.gen_bool(0.4)))))
            .collect(),
    );
    let fixtures = [("xor", &xor), ("toy", &toy_rows()), ("noise", &noise)];
    let mut rises = 0;
    for (_, data) in fixtures {
        for subsample in [1.0, 0.7] {
            let m = fit(data, &GbtParams { subsample, ..params }).unwrap();
            rises += m.train_loss.windows(2).filter(|w| w[1] > w[0]).count();
        }
    }
    ok &= rises == 0;
    notes.push(format!("(a) {rises} loss increases over 6 fits"));

    let k = 5;
    let cv = cross_validate(&xor, &params, k).unwrap();
    let folds = document_folds(&xor, k, params.seed).unwrap();
    let mut hits = 0.0;
    for f in 0..k {
        let pick = |keep: bool| Dataset {
            columns: xor.columns.clone(),
            rows: xor.rows.iter().zip(&folds).filter(|(_, &g)| (g == f) == keep).map(|(r, _)| r.clone()).collect(),
        };
        let (train, test) = (pick(false), pick(true));
        hits += LogisticModel::fit(&train, &["x1", "x2"]).unwrap().accuracy(&test).unwrap() * test.rows.len() as f64;
    }
    let linear = hits / xor.rows.len() as f64;
    ok &= cv.accuracy >= 0.95 && (0.45..=0.55).contains(&linear);
    notes.push(format!("(b) boosted CV {:.1}%, linear {:.1}%", 100.0 * cv.accuracy, 100.0 * linear));

    let seeded = GbtParams {
        subsample: 0.7,
        seed: 42,
        ..params
    };
    let (a, b) = (fit(&xor, &seeded).unwrap(), fit(&xor, &seeded).unwrap());
    let identical = a == b && write_model(&a).unwrap() == write_model(&b).unwrap();
    ok &= identical;
    notes.push(format!("(c) refit identical: {identical}"));

    let sum: f64 = a.gain_importance.values().sum();
    let rel = (sum - a.total_gain).abs() / a.total_gain.abs();
    ok &= rel <= 1e-9;
    notes.push(format!("(d) gain sum relative error {rel:.1e}"));
    verdict(ok, notes.join("; "))
}

fn graph(doc: &str, heads: &[usize], classes: &[&str]) -> DepGraph {
    let nodes = heads
        .iter()
        .zip(classes)
        .enumerate()
        .map(|(i, (&head, &class))| DepNode {
            edu_id: i + 1,
            head,
            relation: if head == 0 { "ROOT".into() } else { class.to_lowercase() },
            class: if head == 0 { "ROOT".into() } else { class.to_string() },
            text: String::new(),
        })
        .collect();
    DepGraph::new(doc, nodes).unwrap()
}

fn gum_bottom_up() -> Option<(Corpus, String)> {
    let root = data_dir("RSTDIAG_GUM_DIR")?;
    if !root.join("pred/bottom_up").is_dir() {
        return None;
    }
    Some((load(&root, RelationScheme::gum(), &[Split::Dev, Split::Test]), "bottom_up".to_string()))
}

fn runs_of(corpus: &Corpus, arch: &str) -> Vec<(usize, Vec<DepGraph>)> {
    corpus
        .documents
        .iter()
        .enumerate()
        .map(|(i, d)| (i, d.predictions[arch].iter().map(|p| p.deps.clone()).collect()))
        .collect()
}

// 8
fn error_arithmetic() -> Outcome {
    let mut ok = true;
    let cls = ["Joint", "Elaboration", "Elaboration", "Causal", "Causal", "Causal"];
    let gold = graph("d", &[0, 1, 1, 3, 3, 5], &cls);
    let wrong6 = ["Joint", "Elaboration", "Elaboration", "Causal", "Causal", "Joint"];
    let runs = [
        graph("d", &[0, 3, 1, 1, 3, 5], &wrong6),
        graph("d", &[0, 3, 1, 1, 3, 5], &wrong6),
        graph("d", &[0, 3, 1, 1, 4, 5], &cls),
        graph("d", &[0, 3, 1, 3, 3, 5], &cls),
        graph("d", &[0, 4, 1, 3, 3, 5], &cls),
    ];
    // (attach, label, scaled attach, hard at 3 on attach) counted by hand
    let expected = [
        (0, 0, 0.0, false),
        (5, 5, 1.0, true),
        (0, 0, 0.0, false),
        (3, 3, 0.6, true),
        (1, 1, 0.2, false),
        (0, 2, 0.0, false),
    ];
    let profiles = error_profiles(&gold, &runs, 3, ErrorTarget::Attach).unwrap();
    let got: Vec<_> = profiles
        .iter()
        .map(|p| (p.attach_errors, p.label_errors, p.scaled_attach, p.is_hard))
        .collect();
    ok &= got == expected;
    let by_label = error_profiles(&gold, &runs, 2, ErrorTarget::Label).unwrap();
    let hard: Vec<usize> = by_label.iter().filter(|p| p.is_hard).map(|p| p.edu_id).collect();
    ok &= hard == [2, 4, 6];

    // every document holds 7 easy and 5 hard EDUs, so each fold's prior is 7/12
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rows = (0..30 * 12)
        .map(|i| {
            let y = if i % 12 < 7 { 0.0 } else { 1.0 };
            (format!("d{:02}", i / 12), vec![FeatureValue::Num(rng.gen())], y)
        })
        .collect();
    let data = numeric_rows(vec![col("u", FeatureKind::Numeric)], rows);
    let cv = cross_validate(&data, &GbtParams::default(), 5).unwrap();
    let prior = 100.0 * 7.0 / 12.0;
    ok &= close(100.0 * cv.baseline, prior, 0.1);
    let mut detail = format!(
        "fixture profiles {}; CV baseline {:.2}% vs prior {prior:.2}%",
        if got == expected { "match" } else { "differ" },
        100.0 * cv.baseline
    );

    match gum_bottom_up() {
        None => detail.push_str("; released-data part SKIP (no GUM parser outputs)"),
        Some((corpus, arch)) => {
            let (mut easy, mut total) = (0usize, 0usize);
            for (i, runs) in runs_of(&corpus, &arch) {
                let p = error_profiles(&corpus.documents[i].gold_deps, &runs, 3, ErrorTarget::Attach).unwrap();
                easy += p.iter().filter(|p| !p.is_hard).count();
                total += p.len();
            }
            let share = 100.0 * easy as f64 / total as f64;
            ok &= close(share, 58.3, 0.1);
            detail.push_str(&format!("; GUM {arch} not-hard share {share:.1}% (paper 58.3%)"));
        }
    }
    verdict(ok, detail)
}

fn distractor(doc: &str, edu: usize, form: &str) -> DmAnnotation {
    DmAnnotation {
        doc_id: doc.into(),
        token_indices: vec![edu * 10],
        dm_form: form.into(),
        status: DmStatus::Distractor,
        link: None,
        edu,
    }
}

// 9
fn consistency() -> Outcome {
    let map = DmClassMap::parse("but\tAdversative\nso\tCausal\nwhile\tAdversative, Context\n").unwrap();
    let gold = graph("d", &[0, 1, 1, 1, 1, 1], &["Joint"; 6]);
    // EDUs 2-5 are attached wrongly in every run, EDU 6 never
    let heads = [0, 3, 4, 5, 6, 1];
    let per_run = [
        ["Joint", "Adversative", "Contingency", "Context", "Joint", "Joint"],
        ["Joint", "Adversative", "Contingency", "Context", "Joint", "Joint"],
        ["Joint", "Adversative", "Contingency", "Adversative", "Joint", "Joint"],
        ["Joint", "Joint", "Adversative", "Adversative", "Joint", "Joint"],
        ["Joint", "Joint", "Adversative", "Joint", "Joint", "Joint"],
    ];
    let runs: Vec<DepGraph> = per_run.iter().map(|c| graph("d", &heads, c)).collect();
    let profiles = error_profiles(&gold, &runs, 3, ErrorTarget::Attach).unwrap();
    let dms = [
        distractor("d", 2, "but"),
        distractor("d", 3, "But"),
        distractor("d", 4, "while"),
        distractor("d", 5, "zzyzx"),
        distractor("d", 6, "so"),
    ];
    let cases = consistency_cases(&gold, &runs, &profiles, &dms).unwrap();
    let r = distractor_consistency(&cases, &map);
    // hand labels: 2 consistent, 3 inconsistent, 4 consistent, 5 uncoverable, 6 not erroneous
    let got = (r.distractor_edus, r.erroneous, r.consistent, r.inconsistent, r.uncoverable);
    let mut ok = got == (5, 4, 2, 1, 1);
    let mut detail = format!("fixture (edus, erroneous, consistent, inconsistent, uncoverable) = {got:?}");

    match gum_bottom_up() {
        None => detail.push_str("; released-data part SKIP (no GUM parser outputs)"),
        Some((corpus, arch)) => {
            let mut all = Vec::new();
            for (i, runs) in runs_of(&corpus, &arch) {
                let gold = &corpus.documents[i].gold_deps;
                let p = error_profiles(gold, &runs, 3, ErrorTarget::Attach).unwrap();
                all.extend(consistency_cases(gold, &runs, &p, &corpus.dm_annotations).unwrap());
            }
            let r = distractor_consistency(&all, &DmClassMap::gum());
            ok &= (r.erroneous, r.distractor_edus, r.consistent) == (108, 174, 74) && r.consistent + r.inconsistent == 108;
            detail.push_str(&format!(
                "; GUM {arch}: {}/{} erroneous, {}/{} consistent (paper 108/174, 74/108)",
                r.erroneous,
                r.distractor_edus,
                r.consistent,
                r.consistent + r.inconsistent
            ));
        }
    }
    verdict(ok, detail)
}

// 10
fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/toy/rstdiag.toml");
    let mut manifests = Vec::new();
    let mut slowest = 0.0f64;
    for name in ["first", "second"] {
        let out = dir.path().join(name);
        let start = Instant::now();
        let status = Command::new(env!("CARGO_BIN_EXE_rstdiag"))
            .env_remove("RSTDIAG_CONFIG")
            .env("RUST_LOG", "error")
            .args(["pipeline", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        slowest = slowest.max(start.elapsed().as_secs_f64());
        if !status.success() {
            return Fail(format!("pipeline exited with {status}"));
        }
        manifests.push(std::fs::read(out.join("manifest.json")).unwrap());
    }
    let entries = String::from_utf8_lossy(&manifests[0]).matches("\"sha256\"").count();
    verdict(
        manifests[0] == manifests[1] && slowest < 5.0,
        format!("manifests identical: {} ({entries} outputs); slowest run {slowest:.2}s (limit 5s)", manifests[0] == manifests[1]),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Parseval identity and span oracle", parseval_identity_and_oracle),
        ("dependency conversion oracle and binarization invariance", dependency_oracle),
        ("GUM marking statistics", gum_statistics),
        ("RST-DT marking statistics", rstdt_statistics),
        ("statistics closed forms", statistics_oracles),
        ("beta regression recovery", beta_recovery),
        ("gradient boosting", boosting),
        ("error-profile arithmetic and majority baseline", error_arithmetic),
        ("distractor consistency", consistency),
        ("end-to-end determinism", determinism),
    ];
    let mut failed = BTreeSet::new();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (tag, detail) = match check() {
            Pass(d) => ("PASS", d),
            Fail(d) => {
                failed.insert(i + 1);
                ("FAIL", d)
            }
            Skip(d) => ("SKIP", d),
        };
        *counts.entry(tag).or_default() += 1;
        println!("criterion {:>2} {tag} {name}: {detail}", i + 1);
    }
    println!("acceptance: {counts:?}");
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
