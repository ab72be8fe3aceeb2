//! Rule-based sentiment over dependency trees, and the tooling to measure
//! how parser errors propagate into polarity classification.
//!
//! * [`deptree`]: CoNLL treebank reading, writing and validation.
//! * [`eval`] and [`stats`]: attachment scores, per-label precision and
//!   recall, and chi-squared system comparison.
//! * [`sentiment`]: lexicon lookup and compositional operations
//!   (intensification, negation, "but", "if").
//! * [`perturb`]: seeded degradation of gold trees to a target LAS.
//! * [`harness`]: ablation tables, LAS/accuracy curves, significance tests
//!   and report emission.
//! * [`synthetic`]: generated corpora for experiments without licensed data.

pub mod deptree;
pub mod eval;
pub mod harness;
pub mod perturb;
pub mod sentiment;
pub mod stats;
pub mod synthetic;

pub use deptree::{parse_conll, validate_tree, write_conll, DepTree, Token, Treebank};
pub use eval::{attachment_scores, per_label_pr, AttachmentScores, LabelPR};
pub use perturb::{perturb_treebank, PerturbationConfig, PerturbationReport};
pub use sentiment::{analyze_tree, classify_document, Lexicon, PolarityLabel, RuleSet, SemanticOrientation};
pub use stats::{chi_squared_compare, ComparisonResult};
