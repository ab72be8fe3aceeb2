//! Attachment scores and per-label precision/recall between a gold and a
//! predicted treebank.

use serde::Serialize;
use thiserror::Error;

use crate::deptree::{Token, Treebank, PUNCT_TAG};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlignmentError {
    #[error("tree count mismatch: gold has {gold}, predicted has {pred}")]
    TreeCount { gold: usize, pred: usize },
    #[error("sentence '{sentence}' (#{index}): gold has {gold} tokens, predicted has {pred}")]
    TokenCount {
        index: usize,
        sentence: String,
        gold: usize,
        pred: usize,
    },
    #[error("sentence '{sentence}' (#{index}), token {token}: form '{gold}' vs '{pred}'")]
    Form {
        index: usize,
        sentence: String,
        token: usize,
        gold: String,
        pred: String,
    },
    #[error("outcome vectors differ in length: {a} vs {b}")]
    OutcomeLength { a: usize, b: usize },
    #[error("nothing to score")]
    Empty,
}

/// Labeled, unlabeled and label-only attachment scores.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AttachmentScores {
    pub las: f64,
    pub uas: f64,
    pub la: f64,
    pub scored_tokens: usize,
}

impl AttachmentScores {
    pub const PERFECT_EMPTY: AttachmentScores = AttachmentScores {
        las: 1.0,
        uas: 1.0,
        la: 1.0,
        scored_tokens: 0,
    };
}

/// Raw counts behind [`AttachmentScores`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AttachmentCounts {
    pub both: usize,
    pub head: usize,
    pub label: usize,
    pub total: usize,
}

impl AttachmentCounts {
    pub fn scores(&self) -> AttachmentScores {
        if self.total == 0 {
            return AttachmentScores::PERFECT_EMPTY;
        }
        let n = self.total as f64;
        AttachmentScores {
            las: self.both as f64 / n,
            uas: self.head as f64 / n,
            la: self.label as f64 / n,
            scored_tokens: self.total,
        }
    }
}

/// Iterate over aligned token pairs, failing on the first mismatch.
fn aligned_pairs<'a>(
    gold: &'a Treebank,
    pred: &'a Treebank,
) -> Result<Vec<(&'a Token, &'a Token)>, AlignmentError> {
    if gold.len() != pred.len() {
        return Err(AlignmentError::TreeCount {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut pairs = Vec::with_capacity(gold.token_count());
    for (index, (g, p)) in gold.trees.iter().zip(&pred.trees).enumerate() {
        if g.len() != p.len() {
            return Err(AlignmentError::TokenCount {
                index,
                sentence: g.sentence_id.clone(),
                gold: g.len(),
                pred: p.len(),
            });
        }
        for (gt, pt) in g.tokens.iter().zip(&p.tokens) {
            if gt.form != pt.form {
                return Err(AlignmentError::Form {
                    index,
                    sentence: g.sentence_id.clone(),
                    token: gt.id,
                    gold: gt.form.clone(),
                    pred: pt.form.clone(),
                });
            }
            pairs.push((gt, pt));
        }
    }
    Ok(pairs)
}

pub fn attachment_counts(
    gold: &Treebank,
    pred: &Treebank,
    exclude_punct: bool,
) -> Result<AttachmentCounts, AlignmentError> {
    let mut counts = AttachmentCounts::default();
    for (g, p) in aligned_pairs(gold, pred)? {
        if exclude_punct && g.upos == PUNCT_TAG {
            continue;
        }
        let head_ok = g.head == p.head;
        let label_ok = g.deprel == p.deprel;
        counts.total += 1;
        counts.head += head_ok as usize;
        counts.label += label_ok as usize;
        counts.both += (head_ok && label_ok) as usize;
    }
    Ok(counts)
}

/// LAS/UAS/LA over all tokens, or over non-punctuation tokens when
/// `exclude_punct` is set. An empty scoring set yields perfect scores.
pub fn attachment_scores(
    gold: &Treebank,
    pred: &Treebank,
    exclude_punct: bool,
) -> Result<AttachmentScores, AlignmentError> {
    attachment_counts(gold, pred, exclude_punct).map(|c| c.scores())
}

/// A ratio that may be undefined because its denominator is zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ratio {
    Defined(f64),
    Undefined,
}

impl Ratio {
    pub fn of(num: usize, den: usize) -> Ratio {
        if den == 0 {
            Ratio::Undefined
        } else {
            Ratio::Defined(num as f64 / den as f64)
        }
    }

    /// Value for reports: undefined renders as 0.
    pub fn value_or_zero(self) -> f64 {
        match self {
            Ratio::Defined(v) => v,
            Ratio::Undefined => 0.0,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, Ratio::Defined(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabelPR {
    pub label: String,
    pub precision: Ratio,
    pub recall: Ratio,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

#[derive(Default, Clone, Copy)]
struct LabelCounts {
    tp: usize,
    fp: usize,
    fn_: usize,
}

impl LabelCounts {
    fn add(&mut self, g: &Token, p: &Token, label: &str) {
        let tp = p.deprel == label && g.deprel == label && g.head == p.head;
        if tp {
            self.tp += 1;
        } else {
            if p.deprel == label {
                self.fp += 1;
            }
            if g.deprel == label {
                self.fn_ += 1;
            }
        }
    }

    fn finish(self, label: &str) -> LabelPR {
        LabelPR {
            label: label.to_owned(),
            precision: Ratio::of(self.tp, self.tp + self.fp),
            recall: Ratio::of(self.tp, self.tp + self.fn_),
            tp: self.tp,
            fp: self.fp,
            fn_: self.fn_,
        }
    }
}

/// Precision and recall for one dependency label. A true positive needs
/// the predicted label, the gold label and the head to all agree.
pub fn per_label_pr(gold: &Treebank, pred: &Treebank, label: &str) -> Result<LabelPR, AlignmentError> {
    let mut counts = LabelCounts::default();
    for (g, p) in aligned_pairs(gold, pred)? {
        counts.add(g, p, label);
    }
    Ok(counts.finish(label))
}

/// [`per_label_pr`] for every label seen in either treebank, ordered by
/// first appearance (gold first).
pub fn all_label_pr(gold: &Treebank, pred: &Treebank) -> Result<Vec<LabelPR>, AlignmentError> {
    let pairs = aligned_pairs(gold, pred)?;
    let mut labels = gold.label_inventory();
    for l in pred.label_inventory() {
        if !labels.contains(&l) {
            labels.push(l);
        }
    }
    Ok(labels
        .iter()
        .map(|label| {
            let mut counts = LabelCounts::default();
            for (g, p) in &pairs {
                counts.add(g, p, label);
            }
            counts.finish(label)
        })
        .collect())
}
