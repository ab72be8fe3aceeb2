//! Seeded degradation of gold treebanks to a target LAS.
//!
//! A uniform random subset of `round((1 - target_las) × tokens)` tokens is
//! corrupted. A `label_error_share` fraction of them get a different label
//! only; the rest are reattached to another token (rejection sampling
//! against cycles, at most [`MAX_REATTACH_ATTEMPTS`] draws) and may also be
//! relabelled. Tokens that cannot take a head error, such as sentence
//! roots, fall back to a label error.
//!
//! Token selection uses stream 0 of a ChaCha generator seeded with `seed`;
//! sentence `i` is corrupted with stream `i + 1` of the same seed, so
//! sentences can be processed in parallel without changing the output.

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::deptree::{DepTree, Treebank};
use crate::eval::{attachment_scores, AttachmentScores};

pub const MAX_REATTACH_ATTEMPTS: usize = 100;

fn default_relabel() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    pub target_las: f64,
    pub label_error_share: f64,
    #[serde(default)]
    pub seed: u64,
    /// Labels to draw substitutes from; empty means the gold inventory.
    #[serde(default)]
    pub label_inventory: Vec<String>,
    /// Probability that a reattached token is also relabelled.
    #[serde(default = "default_relabel")]
    pub head_error_relabel_rate: f64,
}

impl PerturbationConfig {
    pub fn new(target_las: f64, label_error_share: f64, seed: u64) -> Self {
        PerturbationConfig {
            target_las,
            label_error_share,
            seed,
            label_inventory: Vec::new(),
            head_error_relabel_rate: default_relabel(),
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        PerturbationConfig { seed, ..self.clone() }
    }

    pub fn with_target(&self, target_las: f64) -> Self {
        PerturbationConfig {
            target_las,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), PerturbError> {
        let unit = |name: &'static str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(PerturbError::OutOfRange { name, value: v })
            }
        };
        unit("target_las", self.target_las)?;
        unit("label_error_share", self.label_error_share)?;
        unit("head_error_relabel_rate", self.head_error_relabel_rate)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum PerturbError {
    #[error("{name} = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("cannot perturb an empty treebank")]
    EmptyTreebank,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerturbationReport {
    pub target_las: f64,
    pub achieved_las: f64,
    pub achieved_uas: f64,
    pub achieved_la: f64,
    pub scored_tokens: usize,
    /// Tokens selected for corruption.
    pub requested_corruptions: usize,
    pub corrupted_tokens: usize,
    pub head_errors: usize,
    pub label_errors: usize,
    /// Rejected reattachment draws (self, gold head or cycle).
    pub discarded_reattachments: usize,
    /// Head errors that fell back to label errors.
    pub head_fallbacks: usize,
    /// Selected tokens that could not be corrupted at all.
    pub shortfall: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Corruption {
    Label,
    Head,
}

#[derive(Default)]
struct SentenceStats {
    head_errors: usize,
    label_errors: usize,
    discarded: usize,
    fallbacks: usize,
    shortfall: usize,
}

fn relabel(tree: &mut DepTree, pos: usize, inventory: &[String], rng: &mut ChaCha8Rng) -> bool {
    let gold = &tree.tokens[pos].deprel;
    let candidates: Vec<&String> = inventory.iter().filter(|l| *l != gold).collect();
    match candidates.choose(rng) {
        Some(label) => {
            tree.tokens[pos].deprel = (*label).clone();
            true
        }
        None => false,
    }
}

fn reattach(tree: &mut DepTree, pos: usize, rng: &mut ChaCha8Rng, stats: &mut SentenceStats) -> bool {
    let n = tree.len();
    let id = pos + 1;
    if n < 2 || tree.tokens[pos].head == 0 {
        return false;
    }
    let gold_head = tree.tokens[pos].head;
    for _ in 0..MAX_REATTACH_ATTEMPTS {
        // uniform over the other n - 1 tokens
        let mut cand = rng.gen_range(1..n);
        if cand >= id {
            cand += 1;
        }
        if cand == gold_head || tree.dominates(id, cand) {
            stats.discarded += 1;
            continue;
        }
        tree.tokens[pos].head = cand;
        return true;
    }
    false
}

fn corrupt_sentence(
    tree: &mut DepTree,
    plan: &[(usize, Corruption)],
    inventory: &[String],
    relabel_rate: f64,
    mut rng: ChaCha8Rng,
) -> SentenceStats {
    let mut stats = SentenceStats::default();
    for &(pos, kind) in plan {
        let mut done = false;
        if kind == Corruption::Head {
            if reattach(tree, pos, &mut rng, &mut stats) {
                stats.head_errors += 1;
                if rng.gen_bool(relabel_rate) {
                    relabel(tree, pos, inventory, &mut rng);
                }
                done = true;
            } else {
                stats.fallbacks += 1;
            }
        }
        if !done {
            if relabel(tree, pos, inventory, &mut rng) {
                stats.label_errors += 1;
            } else {
                stats.shortfall += 1;
            }
        }
    }
    stats
}

/// Corrupt `gold` towards `cfg.target_las`. Deterministic in `(gold, cfg)`.
pub fn perturb_treebank(gold: &Treebank, cfg: &PerturbationConfig) -> Result<(Treebank, PerturbationReport), PerturbError> {
    cfg.validate()?;
    let total = gold.token_count();
    if total == 0 {
        return Err(PerturbError::EmptyTreebank);
    }
    let inventory = if cfg.label_inventory.is_empty() {
        gold.label_inventory()
    } else {
        cfg.label_inventory.clone()
    };

    let requested = ((1.0 - cfg.target_las) * total as f64).round() as usize;
    let label_only = (cfg.label_error_share * requested as f64).round() as usize;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut chosen = index::sample(&mut rng, total, requested).into_vec();
    chosen.sort_unstable();
    chosen.shuffle(&mut rng);

    let mut offsets = Vec::with_capacity(gold.len());
    let mut acc = 0;
    for tree in &gold.trees {
        offsets.push(acc);
        acc += tree.len();
    }
    let mut plans: Vec<Vec<(usize, Corruption)>> = vec![Vec::new(); gold.len()];
    for (rank, &global) in chosen.iter().enumerate() {
        let sentence = offsets.partition_point(|&o| o <= global) - 1;
        let kind = if rank < label_only {
            Corruption::Label
        } else {
            Corruption::Head
        };
        plans[sentence].push((global - offsets[sentence], kind));
    }
    for plan in plans.iter_mut() {
        plan.sort_unstable_by_key(|&(pos, _)| pos);
    }

    let mut trees = gold.trees.clone();
    let stats: Vec<SentenceStats> = trees
        .par_iter_mut()
        .zip(plans.par_iter())
        .enumerate()
        .map(|(i, (tree, plan))| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64 + 1);
            corrupt_sentence(tree, plan, &inventory, cfg.head_error_relabel_rate, rng)
        })
        .collect();

    let perturbed = Treebank::new(
        trees,
        format!(
            "{} perturbed (target LAS {}, seed {})",
            gold.provenance, cfg.target_las, cfg.seed
        ),
    );
    let scores: AttachmentScores =
        attachment_scores(gold, &perturbed, false).expect("perturbation preserves alignment");

    let sum = |f: fn(&SentenceStats) -> usize| stats.iter().map(f).sum::<usize>();
    let head_errors = sum(|s| s.head_errors);
    let label_errors = sum(|s| s.label_errors);
    let shortfall = sum(|s| s.shortfall);
    if shortfall > 0 {
        log::warn!("{} selected tokens could not be corrupted", shortfall);
    }
    let report = PerturbationReport {
        target_las: cfg.target_las,
        achieved_las: scores.las,
        achieved_uas: scores.uas,
        achieved_la: scores.la,
        scored_tokens: total,
        requested_corruptions: requested,
        corrupted_tokens: head_errors + label_errors,
        head_errors,
        label_errors,
        discarded_reattachments: sum(|s| s.discarded),
        head_fallbacks: sum(|s| s.fallbacks),
        shortfall,
    };
    Ok((perturbed, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deptree::{validate_tree, write_conll};

    fn chain_treebank(sentences: usize, len: usize) -> Treebank {
        let labels = ["nsubj", "advmod", "amod", "neg", "dobj"];
        let trees = (0..sentences)
            .map(|s| {
                let triples: Vec<(String, usize, String)> = (1..=len)
                    .map(|i| {
                        let head = if i == 1 { 0 } else { (i + s) % (i - 1) + 1 };
                        let label = if i == 1 { "root".to_owned() } else { labels[(i + s) % labels.len()].to_owned() };
                        (format!("w{}", i), head, label)
                    })
                    .collect();
                let refs: Vec<(&str, usize, &str)> =
                    triples.iter().map(|(f, h, l)| (f.as_str(), *h, l.as_str())).collect();
                DepTree::from_triples(s.to_string(), &refs)
            })
            .collect();
        Treebank::new(trees, "chain")
    }

    #[test]
    fn identity_at_full_las() {
        let gold = chain_treebank(10, 8);
        let (out, report) = perturb_treebank(&gold, &PerturbationConfig::new(1.0, 0.5, 3)).unwrap();
        assert_eq!(out.trees, gold.trees);
        assert_eq!(report.achieved_las, 1.0);
        assert_eq!(report.corrupted_tokens, 0);
    }

    #[test]
    fn label_only_at_zero_las() {
        let gold = chain_treebank(10, 8);
        let (out, report) = perturb_treebank(&gold, &PerturbationConfig::new(0.0, 1.0, 3)).unwrap();
        assert_eq!(report.achieved_la, 0.0);
        assert_eq!(report.achieved_uas, 1.0);
        assert_eq!(report.achieved_las, 0.0);
        for (g, p) in gold.trees.iter().zip(&out.trees) {
            for (gt, pt) in g.tokens.iter().zip(&p.tokens) {
                assert_ne!(gt.deprel, pt.deprel);
            }
        }
    }

    #[test]
    fn head_errors_keep_trees_valid() {
        let gold = chain_treebank(30, 9);
        let (out, report) = perturb_treebank(&gold, &PerturbationConfig::new(0.3, 0.0, 11)).unwrap();
        assert!(report.head_errors > 0);
        assert!(out.trees.iter().all(|t| validate_tree(t).is_valid()));
        assert_eq!(report.shortfall, 0);
        let expected = 1.0 - report.requested_corruptions as f64 / report.scored_tokens as f64;
        assert!((report.achieved_las - expected).abs() < 1e-12);
    }

    #[test]
    fn single_token_sentences_fall_back_to_labels() {
        let gold = Treebank::new(
            (0..20)
                .map(|i| DepTree::from_triples(i.to_string(), &[("w", 0, if i % 2 == 0 { "root" } else { "dep" })]))
                .collect(),
            "singletons",
        );
        let (_, report) = perturb_treebank(&gold, &PerturbationConfig::new(0.5, 0.0, 1)).unwrap();
        assert_eq!(report.head_errors, 0);
        assert_eq!(report.head_fallbacks, 10);
        assert_eq!(report.label_errors, 10);
    }

    #[test]
    fn unreachable_target_reports_shortfall() {
        let gold = Treebank::new(vec![DepTree::from_triples("1", &[("w", 0, "root")])], "one");
        let (out, report) = perturb_treebank(&gold, &PerturbationConfig::new(0.0, 1.0, 1)).unwrap();
        assert_eq!(out.trees, gold.trees);
        assert_eq!(report.shortfall, 1);
        assert_eq!(report.achieved_las, 1.0);
    }

    #[test]
    fn deterministic_per_seed() {
        let gold = chain_treebank(20, 7);
        let cfg = PerturbationConfig::new(0.6, 0.4, 99);
        let a = write_conll(&perturb_treebank(&gold, &cfg).unwrap().0);
        let b = write_conll(&perturb_treebank(&gold, &cfg).unwrap().0);
        assert_eq!(a, b);
        let c = write_conll(&perturb_treebank(&gold, &cfg.with_seed(100)).unwrap().0);
        assert_ne!(a, c);
    }

    #[test]
    fn config_ranges_checked() {
        let gold = chain_treebank(1, 3);
        assert!(matches!(
            perturb_treebank(&gold, &PerturbationConfig::new(1.2, 0.5, 0)),
            Err(PerturbError::OutOfRange { name: "target_las", .. })
        ));
        assert_eq!(
            perturb_treebank(&Treebank::new(vec![], "empty"), &PerturbationConfig::new(0.5, 0.5, 0)),
            Err(PerturbError::EmptyTreebank)
        );
    }
}
