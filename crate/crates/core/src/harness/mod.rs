//! Experiment orchestration: ablation over rule subsets, LAS/accuracy
//! curves from perturbed gold trees, chi-squared system comparison and
//! classification timing.

mod corpus;
pub mod report;
mod spec;

use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use corpus::{format_labels, parse_labels, Corpus, Document};
pub use spec::{load_treebank, CorpusSpec, CurveSettings, Experiment, ExperimentSpec, InputSpec};

use crate::deptree::{ConllError, Treebank};
use crate::eval::{attachment_scores, AlignmentError};
use crate::perturb::{perturb_treebank, PerturbError, PerturbationConfig};
use crate::sentiment::{classify_document, ClassifyError, Lexicon, LexiconError, RuleError, RuleSet, RuleSubset};
use crate::stats::{chi_squared_compare, CompareError, ComparisonResult};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Conll {
        path: String,
        #[source]
        source: ConllError,
    },
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Rules(#[from] RuleError),
    #[error("input '{input}' is not aligned with the corpus: {source}")]
    Alignment {
        input: String,
        #[source]
        source: AlignmentError,
    },
    #[error("labels file line {line}: {message}")]
    Labels { line: usize, message: String },
    #[error("documents do not match the corpus ({sentences} sentences); offending ids: {}", ids.join(", "))]
    DocumentMismatch { sentences: usize, ids: Vec<String> },
    #[error("document '{id}': {source}")]
    Classify {
        id: String,
        #[source]
        source: ClassifyError,
    },
    #[error(transparent)]
    Compare(#[from] CompareError),
    #[error(transparent)]
    Perturb(#[from] PerturbError),
    #[error("invalid experiment spec: {0}")]
    Spec(String),
    #[error("unknown input '{0}'")]
    UnknownInput(String),
}

impl HarnessError {
    /// Whether the error stems from how the tool was invoked rather than
    /// from the data it was given.
    pub fn is_usage(&self) -> bool {
        matches!(self, HarnessError::UnknownInput(_) | HarnessError::Spec(_))
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;

/// Per-document correctness of classifying `trees` (aligned with the
/// corpus) under `rules`.
pub fn document_outcomes(corpus: &Corpus, trees: &Treebank, lex: &Lexicon, rules: &RuleSet) -> Result<Vec<bool>> {
    corpus
        .documents
        .par_iter()
        .map(|doc| {
            let sentences = &trees.trees[doc.sentences.clone()];
            classify_document(sentences, lex, rules)
                .map(|label| label == doc.label)
                .map_err(|source| HarnessError::Classify {
                    id: doc.id.clone(),
                    source,
                })
        })
        .collect()
}

/// Accuracy as a percentage.
pub fn accuracy(outcomes: &[bool]) -> f64 {
    if outcomes.is_empty() {
        return 0.0;
    }
    100.0 * outcomes.iter().filter(|&&c| c).count() as f64 / outcomes.len() as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AblationRow {
    pub input: String,
    /// Accuracy percentages, one per column.
    pub accuracies: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AblationTable {
    pub columns: Vec<RuleSubset>,
    pub rows: Vec<AblationRow>,
}

impl AblationTable {
    pub fn cell(&self, input: &str, subset: RuleSubset) -> Option<f64> {
        let col = self.columns.iter().position(|&c| c == subset)?;
        let row = self.rows.iter().find(|r| r.input == input)?;
        Some(row.accuracies[col])
    }
}

/// Classify every document of every input under every rule subset.
pub fn run_ablation(exp: &Experiment) -> Result<AblationTable> {
    let mut rows = Vec::with_capacity(exp.inputs.len());
    for (name, trees) in &exp.inputs {
        let accuracies = exp
            .subsets
            .iter()
            .map(|&subset| {
                let rules = exp.rules.restricted_to(subset);
                document_outcomes(&exp.corpus, trees, &exp.lexicon, &rules).map(|o| accuracy(&o))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(AblationRow {
            input: name.clone(),
            accuracies,
        });
    }
    Ok(AblationTable {
        columns: exp.subsets.clone(),
        rows,
    })
}

/// Chi-squared comparison of two inputs under one rule subset.
pub fn compare_systems(exp: &Experiment, input_a: &str, input_b: &str, subset: RuleSubset) -> Result<ComparisonResult> {
    let rules = exp.rules.restricted_to(subset);
    let a = document_outcomes(&exp.corpus, exp.input(input_a)?, &exp.lexicon, &rules)?;
    let b = document_outcomes(&exp.corpus, exp.input(input_b)?, &exp.lexicon, &rules)?;
    Ok(chi_squared_compare(&a, &b)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    pub target_las: f64,
    /// Mean achieved scores over corpora and seeds.
    pub las: f64,
    pub uas: f64,
    pub la: f64,
    /// Mean accuracy percentage per corpus, in corpus order.
    pub accuracy_by_corpus: Vec<(String, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveSeries {
    pub corpora: Vec<String>,
    /// Sorted by ascending achieved LAS.
    pub points: Vec<CurvePoint>,
}

struct RunResult {
    target: usize,
    corpus: usize,
    las: f64,
    uas: f64,
    la: f64,
    accuracy: f64,
}

/// For each target × seed, perturb every corpus's gold trees, classify
/// with `rules`, and average over seeds.
pub fn run_curve(
    corpora: &[Corpus],
    lex: &Lexicon,
    rules: &RuleSet,
    targets: &[f64],
    template: &PerturbationConfig,
    seeds: &[u64],
) -> Result<CurveSeries> {
    if seeds.is_empty() {
        return Err(HarnessError::Spec("curve needs at least one seed".into()));
    }
    let jobs: Vec<(usize, usize, u64)> = (0..targets.len())
        .flat_map(|t| (0..corpora.len()).flat_map(move |c| seeds.iter().map(move |&s| (t, c, s))))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(t, c, seed)| {
            let corpus = &corpora[c];
            let cfg = template.with_target(targets[t]).with_seed(seed);
            let (trees, _) = perturb_treebank(&corpus.treebank, &cfg)?;
            let scores = attachment_scores(&corpus.treebank, &trees, false).map_err(|source| {
                HarnessError::Alignment {
                    input: corpus.name.clone(),
                    source,
                }
            })?;
            let outcomes = document_outcomes(corpus, &trees, lex, rules)?;
            Ok(RunResult {
                target: t,
                corpus: c,
                las: scores.las,
                uas: scores.uas,
                la: scores.la,
                accuracy: accuracy(&outcomes),
            })
        })
        .collect::<Result<Vec<RunResult>>>()?;

    let mut points: Vec<CurvePoint> = targets
        .iter()
        .enumerate()
        .map(|(t, &target_las)| {
            let runs: Vec<&RunResult> = results.iter().filter(|r| r.target == t).collect();
            let mean = |f: fn(&RunResult) -> f64| runs.iter().map(|r| f(r)).sum::<f64>() / runs.len() as f64;
            let accuracy_by_corpus = corpora
                .iter()
                .enumerate()
                .map(|(c, corpus)| {
                    let accs: Vec<f64> = runs.iter().filter(|r| r.corpus == c).map(|r| r.accuracy).collect();
                    (corpus.name.clone(), accs.iter().sum::<f64>() / accs.len() as f64)
                })
                .collect();
            CurvePoint {
                target_las,
                las: mean(|r| r.las),
                uas: mean(|r| r.uas),
                la: mean(|r| r.la),
                accuracy_by_corpus,
            }
        })
        .collect();
    points.sort_by(|a, b| a.las.total_cmp(&b.las).then(a.target_las.total_cmp(&b.target_las)));
    Ok(CurveSeries {
        corpora: corpora.iter().map(|c| c.name.clone()).collect(),
        points,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TimingRow {
    pub input: String,
    pub subset: RuleSubset,
    pub avg: f64,
    pub min: f64,
    pub max: f64,
}

pub const TIMING_RUNS: usize = 5;

/// Wall-clock seconds to classify the whole corpus, over [`TIMING_RUNS`]
/// runs, for each input and subset. Loading is not timed.
pub fn time_classification(exp: &Experiment) -> Result<Vec<TimingRow>> {
    let mut rows = Vec::new();
    for (name, trees) in &exp.inputs {
        for &subset in &exp.subsets {
            let rules = exp.rules.restricted_to(subset);
            let mut times = Vec::with_capacity(TIMING_RUNS);
            for _ in 0..TIMING_RUNS {
                let start = Instant::now();
                document_outcomes(&exp.corpus, trees, &exp.lexicon, &rules)?;
                times.push(start.elapsed().as_secs_f64());
            }
            let avg = times.iter().sum::<f64>() / times.len() as f64;
            let min = times.iter().copied().fold(f64::INFINITY, f64::min);
            let max = times.iter().copied().fold(0.0, f64::max);
            rows.push(TimingRow {
                input: name.clone(),
                subset,
                avg: avg.clamp(min, max),
                min,
                max,
            });
        }
    }
    Ok(rows)
}
