//! Compositional semantic orientation over dependency trees.
//!
//! The tree is folded bottom-up. A node that triggers a rule queues an
//! operation; the operation travels upwards with its branch and is applied
//! at the first (shallowest) ancestor level where its target predicate
//! holds. At a level, matched operations run in a fixed order:
//! intensification, negation, adversative attenuation, then conditional
//! nullification. Operations still queued at the root are discarded.
//!
//! At each level the phrase is kept as a list of parts (the node's own word
//! and one part per child branch) so that operations can target individual
//! branches; the level's value is the sum of its parts.

use std::fmt;
use std::ops::{Add, AddAssign};

use serde::Serialize;

use super::lexicon::Lexicon;
use super::rules::*;
use crate::deptree::DepTree;

/// Signed sentiment strength.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize)]
pub struct SemanticOrientation(pub f64);

impl SemanticOrientation {
    pub const ZERO: SemanticOrientation = SemanticOrientation(0.0);

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Add for SemanticOrientation {
    type Output = SemanticOrientation;
    fn add(self, rhs: Self) -> Self {
        SemanticOrientation(self.0 + rhs.0)
    }
}

impl AddAssign for SemanticOrientation {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

impl std::iter::Sum for SemanticOrientation {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(SemanticOrientation::ZERO, Add::add)
    }
}

impl fmt::Display for SemanticOrientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.0)
    }
}

/// `so × (1 + weight)`; negative weights attenuate.
pub fn apply_intensification(so: SemanticOrientation, weight: f64) -> SemanticOrientation {
    SemanticOrientation(so.0 * (1.0 + weight))
}

pub fn apply_negation(so: SemanticOrientation, strategy: NegationStrategy) -> SemanticOrientation {
    match strategy {
        NegationStrategy::Flip => SemanticOrientation(-so.0),
        NegationStrategy::Shift(amount) => {
            if so.0 > 0.0 {
                SemanticOrientation(so.0 - amount)
            } else if so.0 < 0.0 {
                SemanticOrientation(so.0 + amount)
            } else {
                SemanticOrientation::ZERO
            }
        }
    }
}

/// `main × factor + clause`.
pub fn apply_but(main: SemanticOrientation, clause: SemanticOrientation, factor: f64) -> SemanticOrientation {
    SemanticOrientation(main.0 * factor + clause.0)
}

/// Material in the scope of a conditional contributes nothing.
pub fn apply_if(_subtree: SemanticOrientation) -> SemanticOrientation {
    SemanticOrientation::ZERO
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum OpKind {
    Intensify,
    Negate,
    Attenuate,
    Nullify,
}

/// Where a queued operation lands.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TargetPredicate {
    /// `acomp` siblings of the trigger if any, otherwise the head's phrase.
    HeadOrAcompSibling,
    /// `attr`/`acomp` siblings of the trigger if any, otherwise the head's
    /// phrase.
    HeadOrComplementSibling,
    /// At the trigger's head: the `conj` siblings following the trigger.
    /// Higher up: a `conj` branch that carries the operation.
    AdversativeConjunct,
    /// The whole subtree of the trigger's head.
    HeadSubtree,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QueuedOperation {
    pub kind: OpKind,
    /// Intensifier weight or attenuation factor; unused otherwise.
    pub parameter: f64,
    /// Token that triggered the operation.
    pub origin: usize,
    pub target: TargetPredicate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Application {
    pub op: QueuedOperation,
    /// Token whose level the operation was applied at.
    pub level: usize,
}

/// Result of analysing one tree, with operation diagnostics.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Analysis {
    pub so: SemanticOrientation,
    pub applied: Vec<Application>,
    /// Operations that never found their target, or that were inside a
    /// nullified scope.
    pub discarded: usize,
}

/// The base of a possibly subtyped label, e.g. `advmod` for `advmod:emph`.
pub fn base_deprel(deprel: &str) -> &str {
    deprel.split(':').next().unwrap_or(deprel)
}

/// The operation a token triggers under `rules`, if any. Tokens attached to
/// the root never trigger.
pub fn trigger_for(tree: &DepTree, id: usize, lex: &Lexicon, rules: &RuleSet) -> Option<QueuedOperation> {
    let token = tree.token(id);
    if token.head == 0 {
        return None;
    }
    let deprel = base_deprel(&token.deprel);
    let op = |kind, parameter, target| QueuedOperation {
        kind,
        parameter,
        origin: id,
        target,
    };
    if rules.is_enabled(Rule::Intensification) && INTENSIFIER_DEPRELS.contains(&deprel) {
        if let Some(w) = lex.intensifier(&token.form) {
            return Some(op(OpKind::Intensify, w, TargetPredicate::HeadOrAcompSibling));
        }
    }
    if rules.is_enabled(Rule::Negation) && deprel == NEGATION_DEPREL && lex.is_negator(&token.form) {
        return Some(op(OpKind::Negate, 0.0, TargetPredicate::HeadOrComplementSibling));
    }
    if rules.is_enabled(Rule::But) && deprel == ADVERSATIVE_DEPREL && lex.is_adversative(&token.form) {
        return Some(op(
            OpKind::Attenuate,
            rules.but_main_factor,
            TargetPredicate::AdversativeConjunct,
        ));
    }
    if rules.is_enabled(Rule::If) && deprel == CONDITIONAL_DEPREL && lex.is_conditional(&token.form) {
        return Some(op(OpKind::Nullify, 0.0, TargetPredicate::HeadSubtree));
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PartClass {
    /// The node's own word, ordinary dependents, or a merged negation target.
    Core,
    Acomp,
    Attr,
    Conj,
    /// A dependent that triggered an operation.
    Trigger,
}

#[derive(Clone, Debug)]
struct Part {
    value: SemanticOrientation,
    class: PartClass,
    /// Child ids covered by this part; empty for the node's own word.
    members: Vec<usize>,
}

impl Part {
    fn is_complement(&self) -> bool {
        matches!(self.class, PartClass::Acomp | PartClass::Attr)
    }

    fn is_phrase(&self) -> bool {
        matches!(self.class, PartClass::Core | PartClass::Acomp | PartClass::Attr)
    }
}

struct Branch {
    value: SemanticOrientation,
    pending: Vec<QueuedOperation>,
}

struct Folder<'a> {
    tree: &'a DepTree,
    lex: &'a Lexicon,
    rules: &'a RuleSet,
    children: Vec<Vec<usize>>,
    triggers: Vec<Option<QueuedOperation>>,
    applied: Vec<Application>,
    discarded: usize,
}

impl<'a> Folder<'a> {
    fn new(tree: &'a DepTree, lex: &'a Lexicon, rules: &'a RuleSet) -> Self {
        let triggers = (1..=tree.len())
            .map(|id| {
                if rules.enabled.is_empty() {
                    None
                } else {
                    trigger_for(tree, id, lex, rules)
                }
            })
            .collect();
        Folder {
            tree,
            lex,
            rules,
            children: tree.children(),
            triggers,
            applied: Vec::new(),
            discarded: 0,
        }
    }

    fn trigger(&self, id: usize) -> Option<QueuedOperation> {
        self.triggers[id - 1]
    }

    fn class_of(&self, child: usize) -> PartClass {
        if self.trigger(child).is_some() {
            return PartClass::Trigger;
        }
        match base_deprel(&self.tree.token(child).deprel) {
            d if d == INTENSIFICATION_TARGET_DEPREL => PartClass::Acomp,
            "attr" => PartClass::Attr,
            d if d == CONJUNCT_DEPREL => PartClass::Conj,
            _ => PartClass::Core,
        }
    }

    fn matches(&self, op: &QueuedOperation, arrival: usize, level: usize) -> bool {
        match op.target {
            TargetPredicate::HeadOrAcompSibling
            | TargetPredicate::HeadOrComplementSibling
            | TargetPredicate::HeadSubtree => arrival == op.origin,
            TargetPredicate::AdversativeConjunct => {
                if arrival == op.origin {
                    self.children[level]
                        .iter()
                        .any(|&c| c > op.origin && self.class_of(c) == PartClass::Conj)
                } else {
                    base_deprel(&self.tree.token(arrival).deprel) == CONJUNCT_DEPREL
                }
            }
        }
    }

    fn fold(&mut self, node: usize) -> Branch {
        let token = self.tree.token(node);
        let own = if self.trigger(node).is_some() {
            SemanticOrientation::ZERO
        } else {
            SemanticOrientation(self.lex.so(&token.form, &token.upos))
        };
        let mut parts = vec![Part {
            value: own,
            class: PartClass::Core,
            members: Vec::new(),
        }];
        let mut matched: Vec<(usize, QueuedOperation)> = Vec::new();
        let mut outgoing: Vec<QueuedOperation> = Vec::new();

        let children = self.children[node].clone();
        for child in children {
            let branch = self.fold(child);
            parts.push(Part {
                value: branch.value,
                class: self.class_of(child),
                members: vec![child],
            });
            for op in branch.pending {
                if self.matches(&op, child, node) {
                    matched.push((child, op));
                } else {
                    outgoing.push(op);
                }
            }
        }

        matched.sort_by_key(|(_, op)| (op.kind, op.origin));
        let mut nullified = false;
        for (arrival, op) in matched {
            match op.kind {
                OpKind::Intensify => {
                    let has_acomp = parts.iter().any(|p| p.class == PartClass::Acomp);
                    for part in parts.iter_mut() {
                        let target = if has_acomp {
                            part.class == PartClass::Acomp
                        } else {
                            part.is_phrase()
                        };
                        if target {
                            part.value = apply_intensification(part.value, op.parameter);
                        }
                    }
                }
                OpKind::Negate => {
                    let has_complement = parts.iter().any(Part::is_complement);
                    let (targets, mut rest): (Vec<Part>, Vec<Part>) = parts.into_iter().partition(|p| {
                        if has_complement {
                            p.is_complement()
                        } else {
                            p.is_phrase()
                        }
                    });
                    let sum: SemanticOrientation = targets.iter().map(|p| p.value).sum();
                    rest.push(Part {
                        value: apply_negation(sum, self.rules.negation_strategy),
                        class: if has_complement { PartClass::Attr } else { PartClass::Core },
                        members: targets.into_iter().flat_map(|p| p.members).collect(),
                    });
                    parts = rest;
                }
                OpKind::Attenuate => {
                    let in_clause = |p: &Part| {
                        if arrival == op.origin {
                            p.class == PartClass::Conj && p.members.iter().all(|&m| m > op.origin)
                        } else {
                            p.members == [arrival]
                        }
                    };
                    // Scaling everything outside the clause sums to
                    // main × factor + clause.
                    for part in parts.iter_mut().filter(|p| !in_clause(p)) {
                        part.value = apply_but(part.value, SemanticOrientation::ZERO, op.parameter);
                    }
                }
                OpKind::Nullify => nullified = true,
            }
            self.applied.push(Application { op, level: node });
        }

        let mut value: SemanticOrientation = parts.iter().map(|p| p.value).sum();
        if nullified {
            value = apply_if(value);
            self.discarded += outgoing.len();
            outgoing.clear();
        }
        if let Some(op) = self.trigger(node) {
            outgoing.push(op);
        }
        Branch {
            value,
            pending: outgoing,
        }
    }
}

/// Analyse a tree, returning the semantic orientation together with the
/// operations applied and discarded.
pub fn analyze_tree_detailed(tree: &DepTree, lex: &Lexicon, rules: &RuleSet) -> Analysis {
    if tree.is_empty() {
        return Analysis::default();
    }
    let mut folder = Folder::new(tree, lex, rules);
    let mut so = SemanticOrientation::ZERO;
    for root in folder.children[0].clone() {
        let branch = folder.fold(root);
        so += branch.value;
        folder.discarded += branch.pending.len();
    }
    Analysis {
        so,
        applied: folder.applied,
        discarded: folder.discarded,
    }
}

pub fn analyze_tree(tree: &DepTree, lex: &Lexicon, rules: &RuleSet) -> SemanticOrientation {
    analyze_tree_detailed(tree, lex, rules).so
}
