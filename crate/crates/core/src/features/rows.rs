use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::discourse::{DmAnnotation, Token};
use crate::error::{Error, Result};
use crate::eval::ErrorProfile;
use crate::ingest::{Corpus, CorpusDocument, Vocabulary};
use crate::treeops::StructuralProfile;

use super::dataset::{DataRow, Dataset, FeatureMode, FeatureValue};

/// Every feature of one EDU plus its error targets.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub doc_id: String,
    pub edu_id: usize,
    /// Any marker token in the EDU, signal or distractor.
    pub dm_present: bool,
    /// A signal marks the EDU's own gold relation (EDU → head).
    pub signal_dm: bool,
    /// A distractor sits in the EDU or in its head EDU.
    pub distractor_present: bool,
    pub length_tokens: usize,
    pub oov_rate: f64,
    pub genre: String,
    pub syn_function: String,
    pub subord: bool,
    pub gold_class: String,
    pub n_children: usize,
    pub n_descendants: usize,
    pub domain_size: usize,
    pub inter_sentential: bool,
    pub inter_paragraph: bool,
    pub attach_errors: usize,
    pub label_errors: usize,
    pub scaled_attach: f64,
    pub scaled_label: f64,
    pub target_hard: bool,
}

impl FeatureRow {
    pub fn value(&self, name: &str) -> Option<FeatureValue> {
        use FeatureValue::{Bool, Cat, Num};
        Some(match name {
            "length_tokens" => Num(self.length_tokens as f64),
            "dm_present" => Bool(self.dm_present),
            "syn_function" => Cat(self.syn_function.clone()),
            "oov_rate" => Num(self.oov_rate),
            "genre" => Cat(self.genre.clone()),
            "signal_dm" => Bool(self.signal_dm),
            "distractor_present" => Bool(self.distractor_present),
            "subord" => Bool(self.subord),
            "gold_class" => Cat(self.gold_class.clone()),
            "n_children" => Num(self.n_children as f64),
            "n_descendants" => Num(self.n_descendants as f64),
            "domain_size" => Num(self.domain_size as f64),
            "inter_sentential" => Bool(self.inter_sentential),
            "inter_paragraph" => Bool(self.inter_paragraph),
            _ => return None,
        })
    }

    /// Project rows onto a mode's columns; the row count never changes.
    pub fn project(rows: &[FeatureRow], mode: FeatureMode) -> Dataset {
        let columns = mode.columns();
        let rows = rows
            .iter()
            .map(|r| DataRow {
                doc_id: r.doc_id.clone(),
                edu_id: r.edu_id,
                values: columns
                    .iter()
                    .map(|c| r.value(&c.name).expect("known column"))
                    .collect(),
                attach_errors: r.attach_errors,
                label_errors: r.label_errors,
                scaled_attach: r.scaled_attach,
                scaled_label: r.scaled_label,
                target_hard: r.target_hard,
            })
            .collect();
        Dataset { columns, rows }
    }
}

/// Share of an EDU's lexical tokens missing from the vocabulary; 0 without
/// lexical tokens.
pub fn oov_rate(tokens: &[Token], vocab: &Vocabulary) -> f64 {
    let lexical: Vec<&Token> = tokens.iter().filter(|t| t.is_lexical).collect();
    if lexical.is_empty() {
        return 0.0;
    }
    let unseen = lexical.iter().filter(|t| !vocab.contains(&t.form)).count();
    unseen as f64 / lexical.len() as f64
}

/// Assemble one row per EDU of every document with error profiles.
///
/// Rows come out ordered by document id, then EDU id.
pub fn build_rows(
    corpus: &Corpus,
    profiles: &BTreeMap<String, Vec<ErrorProfile>>,
    structural: &BTreeMap<String, Vec<StructuralProfile>>,
    vocab: &Vocabulary,
) -> Result<Vec<FeatureRow>> {
    let mut dms: BTreeMap<&str, Vec<&DmAnnotation>> = BTreeMap::new();
    for dm in &corpus.dm_annotations {
        dms.entry(dm.doc_id.as_str()).or_default().push(dm);
    }
    let jobs: Vec<(&CorpusDocument, &[ErrorProfile], &[StructuralProfile])> = profiles
        .iter()
        .map(|(doc_id, errs)| {
            let doc = corpus
                .document(doc_id)
                .ok_or_else(|| Error::MissingKey(format!("document {doc_id} not in corpus")))?;
            let st = structural
                .get(doc_id)
                .ok_or_else(|| Error::MissingKey(format!("no structural profile for {doc_id}")))?;
            Ok((doc, errs.as_slice(), st.as_slice()))
        })
        .collect::<Result<_>>()?;
    let per_doc: Vec<Vec<FeatureRow>> = jobs
        .par_iter()
        .map(|(doc, errs, st)| doc_rows(doc, errs, st, dms.get(doc.doc_id()).map_or(&[], Vec::as_slice), vocab))
        .collect::<Result<_>>()?;
    Ok(per_doc.into_iter().flatten().collect())
}

fn doc_rows(
    doc: &CorpusDocument,
    errs: &[ErrorProfile],
    structural: &[StructuralProfile],
    dms: &[&DmAnnotation],
    vocab: &Vocabulary,
) -> Result<Vec<FeatureRow>> {
    let doc_id = doc.doc_id();
    let n = doc.gold.n_edus();
    let missing = |what: &str, edu: usize| Error::MissingKey(format!("{doc_id}: no {what} for EDU {edu}"));
    let by_edu_err: BTreeMap<usize, &ErrorProfile> = errs.iter().map(|p| (p.edu_id, p)).collect();
    let by_edu_st: BTreeMap<usize, &StructuralProfile> = structural.iter().map(|p| (p.edu_id, p)).collect();

    let dm_edus: BTreeSet<usize> = dms.iter().map(|d| d.edu).collect();
    let distractor_edus: BTreeSet<usize> = dms.iter().filter(|d| d.is_distractor()).map(|d| d.edu).collect();
    let signalled: BTreeSet<(usize, usize)> = dms
        .iter()
        .filter_map(|d| d.link.as_ref())
        .map(|l| (l.source_edu, l.target_edu))
        .collect();

    (1..=n)
        .map(|edu| {
            let err = by_edu_err.get(&edu).ok_or_else(|| missing("error profile", edu))?;
            let st = by_edu_st.get(&edu).ok_or_else(|| missing("structural profile", edu))?;
            let node = doc.gold_deps.node(edu).ok_or_else(|| missing("gold dependency", edu))?;
            let head = node.head;
            let tokens = doc.gold.edu_tokens(edu);
            Ok(FeatureRow {
                doc_id: doc_id.to_string(),
                edu_id: edu,
                dm_present: dm_edus.contains(&edu),
                signal_dm: head != 0 && signalled.contains(&(edu, head)),
                distractor_present: distractor_edus.contains(&edu) || (head != 0 && distractor_edus.contains(&head)),
                length_tokens: tokens.len(),
                oov_rate: oov_rate(tokens, vocab),
                genre: doc.genre().to_string(),
                syn_function: st.syn_function.clone(),
                subord: st.is_subordinate,
                gold_class: node.class.clone(),
                n_children: st.n_children,
                n_descendants: st.n_descendants,
                domain_size: st.domain_size,
                inter_sentential: head != 0 && !st.same_sentence_as_head,
                inter_paragraph: head != 0 && !st.same_paragraph_as_head,
                attach_errors: err.attach_errors,
                label_errors: err.label_errors,
                scaled_attach: err.scaled_attach,
                scaled_label: err.scaled_label,
                target_hard: err.is_hard,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discourse::{tokenize_segments, ConstituentNode, RelationScheme, Stoplist};
    use crate::eval::{error_profiles, ErrorTarget};
    use crate::discourse::RstTree;
    use crate::ingest::{parse_dm_annotations, Split};
    use crate::treeops::{structural_profile, to_dependencies, SubordStrategy};

    fn corpus(dm_rows: &str) -> Corpus {
        let seg = tokenize_segments(
            "d",
            &["It rained .", "but we went out", "because we were bored ."],
            &Stoplist::default(),
        );
        // [1] <-concession- [2] <-cause- [3]
        let root = ConstituentNode::mono(
            ConstituentNode::leaf(1),
            ConstituentNode::mono(ConstituentNode::leaf(2), ConstituentNode::leaf(3), "causal-cause"),
            "adversative-concession",
        );
        let gold = RstTree::new("d", "news", seg.edus, seg.tokens, root);
        let gold_deps = to_dependencies(&gold, &RelationScheme::gum()).unwrap();
        let mut corpus = Corpus {
            documents: vec![CorpusDocument {
                gold,
                gold_deps,
                split: Split::Test,
                syntax: None,
                predictions: BTreeMap::new(),
                secondary: vec![],
            }],
            dm_annotations: vec![],
        };
        corpus.dm_annotations = parse_dm_annotations(dm_rows, &corpus.gold_index()).unwrap();
        corpus
    }

    fn rows(corpus: &Corpus) -> Vec<FeatureRow> {
        let doc = &corpus.documents[0];
        let errs = error_profiles(&doc.gold_deps, std::slice::from_ref(&doc.gold_deps), 3, ErrorTarget::Attach).unwrap();
        let st = structural_profile(&doc.gold, &doc.gold_deps, None, &SubordStrategy::IntraSentential).unwrap();
        let vocab = Vocabulary::from_words(["it", "rained", "we", "went"], "v").unwrap();
        build_rows(
            corpus,
            &BTreeMap::from([("d".to_string(), errs)]),
            &BTreeMap::from([("d".to_string(), st)]),
            &vocab,
        )
        .unwrap()
    }

    #[test]
    fn marker_features() {
        // "because" signals 3 -> 2; "but" in EDU 2 is a distractor
        let c = corpus("d\t8\tbecause\t3\t2\tcausal-cause\nd\t4\tbut\tNONE\tNONE\tNONE\n");
        let r = rows(&c);
        assert_eq!(r.len(), 3);
        assert!(r[2].signal_dm && r[2].dm_present);
        assert!(r[1].dm_present && !r[1].signal_dm);
        assert!(!r[0].dm_present);
        // distractor in the EDU itself and in the head EDU of EDU 3
        assert!(r[1].distractor_present);
        assert!(r[2].distractor_present);
        assert!(!r[0].distractor_present);
    }

    #[test]
    fn other_columns() {
        let c = corpus("");
        let r = rows(&c);
        assert_eq!(r[0].gold_class, "ROOT");
        assert_eq!(r[1].gold_class, "Adversative");
        assert_eq!(r[1].length_tokens, 4);
        assert_eq!(r[0].oov_rate, 0.0);
        // "bored" is the only unseen lexical token of EDU 3
        assert!(r[2].oov_rate > 0.0);
        assert!(r[1].inter_sentential);
        assert!(!r[2].inter_sentential);
        assert!(!r[0].inter_sentential);
        let realistic = FeatureRow::project(&r, FeatureMode::Realistic);
        assert_eq!(realistic.columns.len(), 5);
        assert_eq!(realistic.rows.len(), FeatureRow::project(&r, FeatureMode::Full).rows.len());
    }

    #[test]
    fn oov_arithmetic() {
        let tok = |form: &str, lexical: bool| Token {
            index: 1,
            form: form.into(),
            is_lexical: lexical,
            sentence_id: 1,
            paragraph_id: 1,
        };
        let vocab = Vocabulary::from_words(["cats", "like", "warm", "milk"], "v").unwrap();
        let all_seen = [tok("Cats", true), tok("like", true), tok("warm", true), tok("milk", true)];
        assert_eq!(oov_rate(&all_seen, &vocab), 0.0);
        let one_unseen = [tok("Cats", true), tok("like", true), tok("cold", true), tok("milk", true)];
        assert_eq!(oov_rate(&one_unseen, &vocab), 0.25);
        assert_eq!(oov_rate(&[tok(",", false), tok(".", false)], &vocab), 0.0);
    }

    #[test]
    fn missing_keys() {
        let c = corpus("");
        let vocab = Vocabulary::from_words(["x"], "v").unwrap();
        let err = build_rows(&c, &BTreeMap::from([("d".to_string(), vec![])]), &BTreeMap::new(), &vocab);
        assert!(matches!(err, Err(Error::MissingKey(_))));
        let err = build_rows(&c, &BTreeMap::from([("zz".to_string(), vec![])]), &BTreeMap::new(), &vocab);
        assert!(matches!(err, Err(Error::MissingKey(_))));
    }
}
