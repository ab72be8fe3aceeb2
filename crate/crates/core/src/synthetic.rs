//! Generated review corpora with gold dependency trees.
//!
//! Sentences are drawn from a small set of English templates that exercise
//! every composition rule (plain predicates, intensified and negated
//! predicates, negated attributes, adversative coordination and
//! conditionals). Gold document labels are produced by running the engine
//! with all rules on the gold trees, so that any later loss of accuracy is
//! caused by tree corruption alone.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::deptree::{DepTree, Token, Treebank};
use crate::harness::{Corpus, Document};
use crate::sentiment::{document_so, polarity_of, Lexicon, RuleSet};

const POSITIVE: [(&str, f64); 6] = [
    ("good", 2.0),
    ("great", 3.0),
    ("wonderful", 4.0),
    ("nice", 1.5),
    ("fun", 2.0),
    ("clever", 2.5),
];
const NEGATIVE: [(&str, f64); 6] = [
    ("bad", -2.0),
    ("awful", -4.0),
    ("boring", -2.5),
    ("dull", -2.0),
    ("weak", -1.5),
    ("poor", -2.0),
];
const INTENSIFIERS: [(&str, f64); 5] = [
    ("very", 0.25),
    ("really", 0.3),
    ("extremely", 0.5),
    ("slightly", -0.5),
    ("somewhat", -0.3),
];
const NEGATORS: [&str; 2] = ["not", "never"];
const NOUNS: [&str; 8] = ["movie", "plot", "acting", "story", "cast", "film", "ending", "script"];
const FILLER_NOUNS: [&str; 4] = ["scene", "hour", "theater", "screen"];

/// The lexicon the generated corpora are built against.
pub fn lexicon() -> Lexicon {
    let mut lex = Lexicon::new();
    for (w, so) in POSITIVE.iter().chain(NEGATIVE.iter()) {
        lex = lex.with_subjective(w, Some("ADJ"), *so);
    }
    for (w, weight) in INTENSIFIERS {
        lex = lex.with_intensifier(w, weight);
    }
    for w in NEGATORS {
        lex = lex.with_negator(w);
    }
    lex
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub documents: usize,
    pub min_sentences: usize,
    pub max_sentences: usize,
    /// Probability that a sentence's surface polarity agrees with the
    /// document's intended polarity.
    pub agreement: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            documents: 600,
            min_sentences: 20,
            max_sentences: 40,
            agreement: 0.7,
            seed: 2017,
        }
    }
}

/// Builds one sentence token by token.
struct SentenceBuilder {
    tokens: Vec<Token>,
}

impl SentenceBuilder {
    fn new() -> Self {
        SentenceBuilder { tokens: Vec::new() }
    }

    /// Append a token with a placeholder head; returns its id.
    fn push(&mut self, form: &str, upos: &str, deprel: &str) -> usize {
        let id = self.tokens.len() + 1;
        self.tokens.push(Token::new(id, form, upos, 0, deprel));
        id
    }

    fn attach(&mut self, dep: usize, head: usize) {
        self.tokens[dep - 1].head = head;
    }

    fn finish(self, sentence_id: String) -> DepTree {
        DepTree::new(sentence_id, self.tokens)
    }
}

struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    fn adjective(&mut self, positive: bool) -> &'static str {
        let pool = if positive { &POSITIVE } else { &NEGATIVE };
        pool.choose(&mut self.rng).unwrap().0
    }

    fn intensifier(&mut self) -> &'static str {
        INTENSIFIERS.choose(&mut self.rng).unwrap().0
    }

    fn noun(&mut self) -> &'static str {
        NOUNS.choose(&mut self.rng).unwrap()
    }

    /// "the NOUN is [not] [INT] ADJ", returning the copula id.
    fn predicate(&mut self, b: &mut SentenceBuilder, adj_positive: bool, negated: bool, intensified: bool) -> usize {
        let det = b.push("the", "DET", "det");
        let noun_form = self.noun();
        let noun = b.push(noun_form, "NOUN", "nsubj");
        let cop = b.push("is", "VERB", "root");
        b.attach(det, noun);
        b.attach(noun, cop);
        if negated {
            let form = *NEGATORS.choose(&mut self.rng).unwrap();
            let neg = b.push(form, "PART", "neg");
            b.attach(neg, cop);
        }
        let int = if intensified {
            let form = self.intensifier();
            Some(b.push(form, "ADV", "advmod"))
        } else {
            None
        };
        let adj_form = self.adjective(adj_positive);
        let adj = b.push(adj_form, "ADJ", "acomp");
        b.attach(adj, cop);
        if let Some(int) = int {
            // intensifier on the adjective, or on the copula with the
            // adjective as its acomp target
            let head = if self.rng.gen_bool(0.7) { adj } else { cop };
            b.attach(int, head);
        }
        cop
    }

    fn sentence(&mut self, id: String, surface_positive: bool) -> DepTree {
        let mut b = SentenceBuilder::new();
        let kind = self.rng.gen_range(0..100);
        match kind {
            // plain predicate
            0..=54 => {
                let intensified = self.rng.gen_bool(0.4);
                let cop = self.predicate(&mut b, surface_positive, false, intensified);
                let p = b.push(".", "PUNCT", "punct");
                b.attach(p, cop);
            }
            // negated predicate
            55..=66 => {
                let intensified = self.rng.gen_bool(0.3);
                let cop = self.predicate(&mut b, !surface_positive, true, intensified);
                let p = b.push(".", "PUNCT", "punct");
                b.attach(p, cop);
            }
            // it is [not] a [INT] ADJ NOUN
            67..=76 => {
                let negated = self.rng.gen_bool(0.5);
                let it = b.push("it", "PRON", "nsubj");
                let cop = b.push("is", "VERB", "root");
                b.attach(it, cop);
                if negated {
                    let neg = b.push("not", "PART", "neg");
                    b.attach(neg, cop);
                }
                let det = b.push("a", "DET", "det");
                let int = if self.rng.gen_bool(0.4) {
                    let form = self.intensifier();
                    Some(b.push(form, "ADV", "advmod"))
                } else {
                    None
                };
                let adj_form = self.adjective(surface_positive != negated);
                let adj = b.push(adj_form, "ADJ", "amod");
                let noun_form = self.noun();
                let noun = b.push(noun_form, "NOUN", "attr");
                b.attach(det, noun);
                b.attach(adj, noun);
                b.attach(noun, cop);
                if let Some(int) = int {
                    b.attach(int, adj);
                }
                let p = b.push(".", "PUNCT", "punct");
                b.attach(p, cop);
            }
            // X is ADJ1 but Y is ADJ2: the second clause carries the stance
            77..=84 => {
                let first = self.predicate(&mut b, !surface_positive, false, false);
                let but = b.push("but", "CCONJ", "cc");
                let second_negated = self.rng.gen_bool(0.3);
                let second = self.predicate(&mut b, surface_positive != second_negated, second_negated, false);
                b.tokens[second - 1].deprel = "conj".into();
                b.attach(second, first);
                // both common attachment styles for the coordinator
                let head = if self.rng.gen_bool(0.5) { first } else { second };
                b.attach(but, head);
                let p = b.push(".", "PUNCT", "punct");
                b.attach(p, first);
            }
            // if X is ADJ1 , Y is ADJ2: the conditional clause is ignored
            85..=89 => {
                let mark = b.push("if", "SCONJ", "mark");
                let cond = self.predicate(&mut b, !surface_positive, false, false);
                b.tokens[cond - 1].deprel = "advcl".into();
                b.attach(mark, cond);
                let comma = b.push(",", "PUNCT", "punct");
                let main = self.predicate(&mut b, surface_positive, false, false);
                b.attach(cond, main);
                b.attach(comma, main);
                let p = b.push(".", "PUNCT", "punct");
                b.attach(p, main);
            }
            // filler without sentiment words
            _ => {
                let det = b.push("the", "DET", "det");
                let noun_form = self.noun();
                let noun = b.push(noun_form, "NOUN", "nsubj");
                let verb = b.push("lasts", "VERB", "root");
                let num = b.push("an", "DET", "det");
                let obj_form = *FILLER_NOUNS.choose(&mut self.rng).unwrap();
                let obj = b.push(obj_form, "NOUN", "dobj");
                b.attach(det, noun);
                b.attach(noun, verb);
                b.attach(num, obj);
                b.attach(obj, verb);
                let p = b.push(".", "PUNCT", "punct");
                b.attach(p, verb);
            }
        }
        b.finish(id)
    }
}

/// A labelled corpus whose gold labels come from the all-rules engine on
/// the gold trees.
pub fn generate_corpus(cfg: &SyntheticConfig) -> Corpus {
    let lex = lexicon();
    let rules = RuleSet::all();
    let mut gen = Generator {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
    };
    let mut trees = Vec::new();
    let mut documents = Vec::with_capacity(cfg.documents);
    let max = cfg.max_sentences.max(cfg.min_sentences).max(1);
    let min = cfg.min_sentences.clamp(1, max);
    for d in 0..cfg.documents {
        let intended = d % 2 == 0;
        let n = gen.rng.gen_range(min..=max);
        let start = trees.len();
        for s in 0..n {
            let surface = if gen.rng.gen_bool(cfg.agreement) { intended } else { !intended };
            trees.push(gen.sentence(format!("d{:04}-s{:02}", d, s), surface));
        }
        let so = document_so(&trees[start..], &lex, &rules);
        documents.push(Document {
            id: format!("d{:04}", d),
            label: polarity_of(so, &rules),
            sentences: start..trees.len(),
        });
    }
    Corpus {
        name: "synthetic".into(),
        treebank: Treebank::new(trees, format!("synthetic reviews (seed {})", cfg.seed)),
        documents,
    }
}

/// Sentences from the same templates until at least `min_tokens` tokens.
pub fn generate_treebank(min_tokens: usize, seed: u64) -> Treebank {
    let mut gen = Generator {
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    let mut trees = Vec::new();
    let mut tokens = 0;
    while tokens < min_tokens {
        let surface = gen.rng.gen_bool(0.5);
        let tree = gen.sentence(format!("s{:04}", trees.len() + 1), surface);
        tokens += tree.len();
        trees.push(tree);
    }
    Treebank::new(trees, format!("synthetic sentences (seed {})", seed))
}
