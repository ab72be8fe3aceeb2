//! Lexicon-driven sentiment with syntactic composition rules.

mod engine;
mod lexicon;
mod rules;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use engine::{
    analyze_tree, analyze_tree_detailed, apply_but, apply_if, apply_intensification, apply_negation,
    base_deprel, trigger_for, Analysis, Application, OpKind, QueuedOperation, SemanticOrientation,
    TargetPredicate,
};
pub use lexicon::{Lexicon, LexiconCounts, LexiconError};
pub use rules::*;

use crate::deptree::DepTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolarityLabel {
    #[serde(rename = "pos")]
    Positive,
    #[serde(rename = "neg")]
    Negative,
}

impl PolarityLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PolarityLabel::Positive => "pos",
            PolarityLabel::Negative => "neg",
        }
    }
}

impl fmt::Display for PolarityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown polarity '{0}' (expected pos or neg)")]
pub struct PolarityParseError(pub String);

impl FromStr for PolarityLabel {
    type Err = PolarityParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pos" | "positive" | "+" | "1" => Ok(PolarityLabel::Positive),
            "neg" | "negative" | "-" | "0" => Ok(PolarityLabel::Negative),
            _ => Err(PolarityParseError(s.to_owned())),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("cannot classify an empty document")]
    EmptyDocument,
}

/// Sum of the sentence orientations of a document.
pub fn document_so(doc: &[DepTree], lex: &Lexicon, rules: &RuleSet) -> SemanticOrientation {
    doc.iter().map(|t| analyze_tree(t, lex, rules)).sum()
}

pub fn polarity_of(so: SemanticOrientation, rules: &RuleSet) -> PolarityLabel {
    if so.0 > rules.classification_threshold {
        PolarityLabel::Positive
    } else {
        PolarityLabel::Negative
    }
}

/// Positive iff the summed orientation exceeds the threshold; ties are
/// negative.
pub fn classify_document(doc: &[DepTree], lex: &Lexicon, rules: &RuleSet) -> Result<PolarityLabel, ClassifyError> {
    if doc.is_empty() {
        return Err(ClassifyError::EmptyDocument);
    }
    Ok(polarity_of(document_so(doc, lex, rules), rules))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> Lexicon {
        Lexicon::new()
            .with_subjective("good", None, 2.0)
            .with_subjective("clean", None, 1.0)
            .with_intensifier("very", 0.25)
    }

    #[test]
    fn threshold_and_ties() {
        let rules = RuleSet::all();
        assert_eq!(polarity_of(SemanticOrientation(3.2), &rules), PolarityLabel::Positive);
        assert_eq!(polarity_of(SemanticOrientation(0.0), &rules), PolarityLabel::Negative);
        let mut strict = rules.clone();
        strict.classification_threshold = 5.0;
        assert_eq!(polarity_of(SemanticOrientation(3.2), &strict), PolarityLabel::Negative);
    }

    #[test]
    fn sums_sentences() {
        let doc = vec![
            DepTree::from_triples("1", &[("very", 2, "advmod"), ("clean", 0, "root")]),
            DepTree::from_triples("2", &[("not", 2, "neg"), ("good", 0, "root")]),
        ];
        let rules = RuleSet::all();
        assert_eq!(document_so(&doc, &lex(), &rules).0, -0.75);
        assert_eq!(classify_document(&doc, &lex(), &rules), Ok(PolarityLabel::Negative));
    }

    #[test]
    fn empty_document_rejected() {
        assert_eq!(
            classify_document(&[], &lex(), &RuleSet::all()),
            Err(ClassifyError::EmptyDocument)
        );
    }

    #[test]
    fn polarity_parsing() {
        assert_eq!("pos".parse(), Ok(PolarityLabel::Positive));
        assert_eq!("Negative".parse(), Ok(PolarityLabel::Negative));
        assert!("neutral".parse::<PolarityLabel>().is_err());
    }
}
