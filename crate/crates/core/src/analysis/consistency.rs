use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::discourse::{DepGraph, DmAnnotation};
use crate::error::{Error, Result};
use crate::eval::ErrorProfile;

const GUM_MAP: &str = include_str!("../../resources/dm_classes_gum.tsv");
const RSTDT_MAP: &str = include_str!("../../resources/dm_classes_rstdt.tsv");

/// Marker form → relation classes it can signal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmClassMap {
    forms: BTreeMap<String, BTreeSet<String>>,
}

impl DmClassMap {
    /// Parse `form<TAB>Class1,Class2` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut forms: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.trim_start().starts_with('#') {
                continue;
            }
            let (form, classes) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse("dm-class map", Some(format!("line {}", i + 1)), "expected form<TAB>classes"))?;
            let key = normalize(form);
            let entry = forms.entry(key).or_default();
            entry.extend(classes.split(',').map(str::trim).filter(|c| !c.is_empty()).map(String::from));
        }
        Ok(DmClassMap { forms })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn gum() -> Self {
        Self::parse(GUM_MAP).expect("bundled GUM marker map parses")
    }

    pub fn rst_dt() -> Self {
        Self::parse(RSTDT_MAP).expect("bundled RST-DT marker map parses")
    }

    pub fn classes_of(&self, form: &str) -> Option<&BTreeSet<String>> {
        self.forms.get(&normalize(form))
    }
}

fn normalize(form: &str) -> String {
    form.split_whitespace().map(str::to_lowercase).collect::<Vec<_>>().join(" ")
}

/// One distractor-bearing EDU.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyCase {
    pub doc_id: String,
    pub edu_id: usize,
    pub erroneous: bool,
    pub gold_class: String,
    pub majority_class: String,
    pub distractor_forms: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NotErroneous,
    /// The majority prediction is a class one of the distractors can signal.
    Consistent,
    Inconsistent,
    /// No distractor form is in the map.
    Uncoverable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub distractor_edus: usize,
    pub erroneous: usize,
    pub consistent: usize,
    pub inconsistent: usize,
    pub uncoverable: usize,
    pub verdicts: Vec<(ConsistencyCase, Verdict)>,
}

impl ConsistencyReport {
    pub fn erroneous_pct(&self) -> f64 {
        pct(self.erroneous, self.distractor_edus)
    }

    /// Consistent cases over erroneous cases whose markers are in the map.
    pub fn consistent_pct(&self) -> f64 {
        pct(self.consistent, self.consistent + self.inconsistent)
    }
}

fn pct(x: usize, n: usize) -> f64 {
    if n == 0 {
        0.0
    } else {
        100.0 * x as f64 / n as f64
    }
}

/// Classify erroneous distractor EDUs by whether the majority prediction
/// agrees with a class their distractor can signal.
pub fn distractor_consistency(cases: &[ConsistencyCase], map: &DmClassMap) -> ConsistencyReport {
    let mut report = ConsistencyReport {
        distractor_edus: cases.len(),
        erroneous: 0,
        consistent: 0,
        inconsistent: 0,
        uncoverable: 0,
        verdicts: Vec::with_capacity(cases.len()),
    };
    for case in cases {
        let verdict = if !case.erroneous {
            Verdict::NotErroneous
        } else {
            report.erroneous += 1;
            let known: Vec<&BTreeSet<String>> = case.distractor_forms.iter().filter_map(|f| map.classes_of(f)).collect();
            if known.is_empty() {
                report.uncoverable += 1;
                Verdict::Uncoverable
            } else if known.iter().any(|classes| classes.contains(&case.majority_class)) {
                report.consistent += 1;
                Verdict::Consistent
            } else {
                report.inconsistent += 1;
                Verdict::Inconsistent
            }
        };
        report.verdicts.push((case.clone(), verdict));
    }
    report
}

/// Most frequent label; ties go to the alphabetically first.
pub fn majority_class<'a>(classes: impl IntoIterator<Item = &'a str>) -> Option<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for c in classes {
        *counts.entry(c).or_default() += 1;
    }
    let best = counts.values().copied().max()?;
    counts.into_iter().find(|&(_, n)| n == best).map(|(c, _)| c.to_string())
}

/// Cases for every distractor-bearing EDU of one document.
///
/// An EDU is erroneous when its error profile marks it hard; the majority
/// class is taken over the runs' predicted classes for the EDU's relation.
pub fn consistency_cases(
    gold: &DepGraph,
    runs: &[DepGraph],
    profiles: &[ErrorProfile],
    dms: &[DmAnnotation],
) -> Result<Vec<ConsistencyCase>> {
    let doc_id = gold.doc_id();
    let mut forms: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for dm in dms.iter().filter(|d| d.doc_id == doc_id && d.is_distractor()) {
        forms.entry(dm.edu).or_default().push(dm.dm_form.clone());
    }
    forms
        .into_iter()
        .map(|(edu, distractor_forms)| {
            let profile = profiles
                .iter()
                .find(|p| p.edu_id == edu)
                .ok_or_else(|| Error::MissingKey(format!("{doc_id}: no error profile for EDU {edu}")))?;
            let gold_node = gold
                .node(edu)
                .ok_or_else(|| Error::MissingKey(format!("{doc_id}: no gold EDU {edu}")))?;
            let majority = majority_class(runs.iter().filter_map(|r| r.node(edu)).map(|n| n.class.as_str()))
                .ok_or_else(|| Error::MissingKey(format!("{doc_id}: no predicted runs")))?;
            Ok(ConsistencyCase {
                doc_id: doc_id.to_string(),
                edu_id: edu,
                erroneous: profile.is_hard,
                gold_class: gold_node.class.clone(),
                majority_class: majority,
                distractor_forms,
            })
        })
        .collect()
}
