//! Shared fixtures: a toy lexicon, exhaustive small-tree enumeration, random
//! trees, and a reference composition evaluator written without any
//! operation queue.

#![allow(dead_code)]

use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;

use treesent::sentiment::{NegationStrategy, Rule};
use treesent::{DepTree, Lexicon, RuleSet, Token};

pub const TOY_FORMS: [&str; 6] = ["good", "bad", "huge", "not", "but", "if"];

/// Non-root labels that change what the rules do.
pub const TOY_LABELS: [&str; 7] = ["advmod", "acomp", "attr", "neg", "cc", "conj", "mark"];

/// Values are dyadic so sums are exact in any order.
pub fn toy_lexicon() -> Lexicon {
    Lexicon::new()
        .with_subjective("good", None, 2.0)
        .with_subjective("bad", None, -1.5)
        .with_subjective("huge", None, 1.0)
        .with_intensifier("huge", 0.5)
        .with_negator("not")
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data").join(name)
}

/// Every head vector (index 0 unused) over `n` tokens that forms a single
/// rooted tree.
pub fn head_assignments(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut heads = vec![0; n + 1];
    fill(1, n, &mut heads, &mut out);
    out
}

fn fill(i: usize, n: usize, heads: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if i > n {
        if is_tree(heads) {
            out.push(heads.clone());
        }
        return;
    }
    for h in 0..=n {
        if h != i {
            heads[i] = h;
            fill(i + 1, n, heads, out);
        }
    }
}

fn is_tree(heads: &[usize]) -> bool {
    let n = heads.len() - 1;
    if (1..=n).filter(|&i| heads[i] == 0).count() != 1 {
        return false;
    }
    (1..=n).all(|start| {
        let mut cur = start;
        for _ in 0..=n {
            if cur == 0 {
                return true;
            }
            cur = heads[cur];
        }
        false
    })
}

/// `labels` holds one label per non-root token, in token order.
pub fn build_tree(forms: &[&str], heads: &[usize], labels: &[&str]) -> DepTree {
    let mut next = labels.iter();
    let tokens = forms
        .iter()
        .enumerate()
        .map(|(i, form)| {
            let id = i + 1;
            let deprel = if heads[id] == 0 { "root" } else { next.next().unwrap() };
            Token::new(id, form, "X", heads[id], deprel)
        })
        .collect();
    DepTree::new("t", tokens)
}

/// A random valid tree: each token after the first, in a shuffled order,
/// attaches to one already placed.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize, forms: &[&str], labels: &[&str]) -> DepTree {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut heads = vec![0; n + 1];
    for k in 1..n {
        heads[order[k]] = order[rng.gen_range(0..k)];
    }
    let tokens = (1..=n)
        .map(|id| {
            let form = forms.choose(rng).unwrap();
            let deprel = if heads[id] == 0 { "root" } else { labels.choose(rng).unwrap() };
            Token::new(id, form, "X", heads[id], deprel)
        })
        .collect();
    DepTree::new("r", tokens)
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Trigger {
    Intensify(f64),
    Negate,
    But,
    If,
}

#[derive(Clone, Copy, Debug)]
enum ButSite {
    /// Applied at the trigger's own head, against the later conjuncts.
    Local(usize),
    /// Applied higher up, against the conjunct branch `child`.
    Via(usize),
}

/// Reference evaluator. Where each operation lands is computed by walking
/// the ancestors of its trigger; the value of a node is then a closed-form
/// combination of per-class sums over its children.
pub struct Reference<'a> {
    tree: &'a DepTree,
    lex: &'a Lexicon,
    rules: &'a RuleSet,
    kids: Vec<Vec<usize>>,
    trig: Vec<Option<Trigger>>,
}

fn base(label: &str) -> &str {
    label.split(':').next().unwrap()
}

impl<'a> Reference<'a> {
    pub fn new(tree: &'a DepTree, lex: &'a Lexicon, rules: &'a RuleSet) -> Self {
        let n = tree.tokens.len();
        let mut kids = vec![Vec::new(); n + 1];
        for t in &tree.tokens {
            kids[t.head].push(t.id);
        }
        let mut r = Reference {
            tree,
            lex,
            rules,
            kids,
            trig: vec![None; n + 1],
        };
        for id in 1..=n {
            r.trig[id] = r.classify(id);
        }
        r
    }

    fn classify(&self, id: usize) -> Option<Trigger> {
        let t = &self.tree.tokens[id - 1];
        if t.head == 0 {
            return None;
        }
        let on = |rule| self.rules.enabled.contains(&rule);
        let label = base(&t.deprel);
        if on(Rule::Intensification) && matches!(label, "advmod" | "amod" | "nmod") {
            if let Some(w) = self.lex.intensifier(&t.form) {
                return Some(Trigger::Intensify(w));
            }
        }
        if on(Rule::Negation) && label == "neg" && self.lex.is_negator(&t.form) {
            return Some(Trigger::Negate);
        }
        if on(Rule::But) && label == "cc" && self.lex.is_adversative(&t.form) {
            return Some(Trigger::But);
        }
        if on(Rule::If) && label == "mark" && self.lex.is_conditional(&t.form) {
            return Some(Trigger::If);
        }
        None
    }

    fn head(&self, id: usize) -> usize {
        self.tree.tokens[id - 1].head
    }

    fn label(&self, id: usize) -> &str {
        base(&self.tree.tokens[id - 1].deprel)
    }

    fn is_conjunct(&self, id: usize) -> bool {
        self.label(id) == "conj" && self.trig[id].is_none()
    }

    fn nullified(&self, node: usize) -> bool {
        self.kids[node].iter().any(|&c| self.trig[c] == Some(Trigger::If))
    }

    /// Level and site of a "but" triggered by `t`, or `None` if it is lost.
    fn but_landing(&self, t: usize) -> Option<(usize, ButSite)> {
        let h = self.head(t);
        if self.kids[h].iter().any(|&c| c > t && self.is_conjunct(c)) {
            return Some((h, ButSite::Local(t)));
        }
        let mut arrival = h;
        if self.nullified(arrival) {
            return None;
        }
        loop {
            let up = self.head(arrival);
            if up == 0 {
                return None;
            }
            if self.label(arrival) == "conj" {
                return Some((up, ButSite::Via(arrival)));
            }
            if self.nullified(up) {
                return None;
            }
            arrival = up;
        }
    }

    fn negate(&self, x: f64) -> f64 {
        match self.rules.negation_strategy {
            NegationStrategy::Flip => -x,
            NegationStrategy::Shift(a) => {
                if x > 0.0 {
                    x - a
                } else if x < 0.0 {
                    x + a
                } else {
                    0.0
                }
            }
        }
    }

    /// Semantic orientation of the whole tree and the number of operations
    /// that found a target.
    pub fn evaluate(&self) -> (f64, usize) {
        let n = self.tree.tokens.len();
        // operations landing at each level
        let mut ints: Vec<Vec<f64>> = vec![Vec::new(); n + 1];
        let mut negs = vec![0usize; n + 1];
        let mut buts: Vec<Vec<(usize, ButSite)>> = vec![Vec::new(); n + 1];
        let mut landed = 0;
        for t in 1..=n {
            match self.trig[t] {
                Some(Trigger::Intensify(w)) => {
                    ints[self.head(t)].push(w);
                    landed += 1;
                }
                Some(Trigger::Negate) => {
                    negs[self.head(t)] += 1;
                    landed += 1;
                }
                Some(Trigger::If) => landed += 1,
                Some(Trigger::But) => {
                    if let Some((level, site)) = self.but_landing(t) {
                        buts[level].push((t, site));
                        landed += 1;
                    }
                }
                None => {}
            }
        }
        let total = self.kids[0]
            .iter()
            .map(|&r| self.value(r, &ints, &negs, &buts))
            .sum();
        (total, landed)
    }

    fn value(&self, node: usize, ints: &[Vec<f64>], negs: &[usize], buts: &[Vec<(usize, ButSite)>]) -> f64 {
        let tok = &self.tree.tokens[node - 1];
        let mut core = if self.trig[node].is_some() {
            0.0
        } else {
            self.lex.so(&tok.form, &tok.upos)
        };
        let (mut acomp, mut attr, mut triggers) = (0.0, 0.0, 0.0);
        let (mut has_acomp, mut has_attr) = (false, false);
        let mut conjuncts: Vec<(usize, f64)> = Vec::new();
        for &c in &self.kids[node] {
            let v = self.value(c, ints, negs, buts);
            if self.trig[c].is_some() {
                triggers += v;
                continue;
            }
            match self.label(c) {
                "acomp" => {
                    acomp += v;
                    has_acomp = true;
                }
                "attr" => {
                    attr += v;
                    has_attr = true;
                }
                "conj" => conjuncts.push((c, v)),
                _ => core += v,
            }
        }

        let scale: f64 = ints[node].iter().map(|w| 1.0 + w).product();
        if has_acomp {
            acomp *= scale;
        } else {
            core *= scale;
            attr *= scale;
        }

        let mut rest = if has_acomp || has_attr {
            let mut y = acomp + attr;
            for _ in 0..negs[node] {
                y = self.negate(y);
            }
            core + y
        } else {
            for _ in 0..negs[node] {
                core = self.negate(core);
            }
            core
        };
        rest += triggers;

        let mut sites = buts[node].clone();
        sites.sort_by_key(|(origin, _)| *origin);
        let f = self.rules.but_main_factor;
        for (_, site) in sites {
            rest *= f;
            for (c, v) in conjuncts.iter_mut() {
                let in_clause = match site {
                    ButSite::Local(t) => *c > t,
                    ButSite::Via(a) => *c == a,
                };
                if !in_clause {
                    *v *= f;
                }
            }
        }

        if self.nullified(node) {
            return 0.0;
        }
        rest + conjuncts.iter().map(|(_, v)| v).sum::<f64>()
    }
}

/// Sum of the lexicon orientation of every token, ignoring structure.
pub fn token_sum(tree: &DepTree, lex: &Lexicon) -> f64 {
    tree.tokens.iter().map(|t| lex.so(&t.form, &t.upos)).sum()
}
