use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rstdiag::analysis::LogisticModel;
use rstdiag::boost::{cross_validate, document_folds, fit, read_model, write_model, GbtParams};
use rstdiag::features::{DataRow, Dataset, FeatureColumn, FeatureKind, FeatureValue};

/// The label is whether x1 and x2 have different signs; a noise column is
/// added. Neither input alone carries any signal.
fn xor_data(docs: usize, per_doc: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for d in 0..docs {
        for e in 0..per_doc {
            let (x1, x2): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            rows.push(DataRow {
                doc_id: format!("doc{d:03}"),
                edu_id: e + 1,
                values: vec![FeatureValue::Num(x1), FeatureValue::Num(x2), FeatureValue::Num(rng.gen())],
                attach_errors: 0,
                label_errors: 0,
                scaled_attach: 0.0,
                scaled_label: 0.0,
                target_hard: (x1 > 0.0) ^ (x2 > 0.0),
            });
        }
    }
    let col = |name: &str, kind| FeatureColumn { name: name.into(), kind };
    Dataset {
        columns: vec![col("x1", FeatureKind::Numeric), col("x2", FeatureKind::Numeric), col("noise", FeatureKind::Numeric)],
        rows,
    }
}

fn subset(data: &Dataset, keep: impl Fn(usize) -> bool) -> Dataset {
    Dataset {
        columns: data.columns.clone(),
        rows: data.rows.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, r)| r.clone()).collect(),
    }
}

#[test]
fn boosting_learns_xor_where_a_linear_model_cannot() {
    let data = xor_data(40, 8, 1);
    let params = GbtParams {
        n_rounds: 50,
        max_depth: 3,
        ..GbtParams::default()
    };
    let k = 5;
    let report = cross_validate(&data, &params, k).unwrap();
    assert!(report.accuracy >= 0.95, "{report:?}");

    let folds = document_folds(&data, k, params.seed).unwrap();
    let mut hits = 0.0;
    for f in 0..k {
        let train = subset(&data, |i| folds[i] != f);
        let test = subset(&data, |i| folds[i] == f);
        let model = LogisticModel::fit(&train, &["x1", "x2"]).unwrap();
        hits += model.accuracy(&test).unwrap() * test.rows.len() as f64;
    }
    let linear = hits / data.rows.len() as f64;
    assert!((0.45..=0.55).contains(&linear), "{linear}");
}

#[test]
fn loss_never_rises_and_gains_add_up() {
    for (seed, subsample) in [(0, 1.0), (3, 0.7)] {
        let data = xor_data(12, 9, seed);
        let model = fit(
            &data,
            &GbtParams {
                subsample,
                seed,
                ..GbtParams::default()
            },
        )
        .unwrap();
        assert!(model.train_loss.windows(2).all(|w| w[1] <= w[0]), "{:?}", model.train_loss);
        let sum: f64 = model.gain_importance.values().sum();
        assert!((sum - model.total_gain).abs() <= 1e-9 * model.total_gain.abs());
    }
}

#[test]
fn same_seed_same_model_and_text_round_trip() {
    let data = xor_data(10, 8, 4);
    let params = GbtParams {
        subsample: 0.6,
        seed: 17,
        ..GbtParams::default()
    };
    let a = fit(&data, &params).unwrap();
    let b = fit(&data, &params).unwrap();
    assert_eq!(a, b);
    let text = write_model(&a).unwrap();
    assert_eq!(text, write_model(&b).unwrap());
    let back = read_model(&format!("# comment\n{text}")).unwrap();
    assert_eq!(back.predict(&data).unwrap(), a.predict(&data).unwrap());
}
