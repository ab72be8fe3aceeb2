//! Dependency trees and CoNLL-X style treebank I/O.
//!
//! Sentences are blocks of tab-separated token lines separated by blank
//! lines. Each line carries ten columns:
//!
//! ```text
//! ID  FORM  LEMMA  UPOS  XPOS  FEATS  HEAD  DEPREL  DEPS  MISC
//! ```
//!
//! Lines with eight or nine columns are accepted (missing trailing columns
//! read as `_`); anything else is rejected. Multi-word token ranges
//! (`3-4`) and empty nodes (`5.1`) are skipped and counted. Comment lines
//! start with `#`; a `# sent_id = ...` comment sets the sentence id.

use std::fmt;

use thiserror::Error;

/// Placeholder for an empty CoNLL field.
pub const EMPTY: &str = "_";

/// Coarse tag used for punctuation tokens.
pub const PUNCT_TAG: &str = "PUNCT";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    /// 1-based position in the sentence.
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    /// Head position, 0 for the artificial root.
    pub head: usize,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

impl Token {
    /// A token with only the structural fields set; the rest are `_`.
    pub fn new(id: usize, form: &str, upos: &str, head: usize, deprel: &str) -> Self {
        Token {
            id,
            form: form.to_owned(),
            lemma: EMPTY.to_owned(),
            upos: upos.to_owned(),
            xpos: EMPTY.to_owned(),
            feats: EMPTY.to_owned(),
            head,
            deprel: deprel.to_owned(),
            deps: EMPTY.to_owned(),
            misc: EMPTY.to_owned(),
        }
    }

    pub fn is_root(&self) -> bool {
        self.head == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepTree {
    pub sentence_id: String,
    pub tokens: Vec<Token>,
}

impl DepTree {
    pub fn new(sentence_id: impl Into<String>, tokens: Vec<Token>) -> Self {
        DepTree {
            sentence_id: sentence_id.into(),
            tokens,
        }
    }

    /// Build a tree from `(form, head, deprel)` triples, with every tag set
    /// to `X`. Handy for hand-built test trees.
    pub fn from_triples(sentence_id: impl Into<String>, triples: &[(&str, usize, &str)]) -> Self {
        let tokens = triples
            .iter()
            .enumerate()
            .map(|(i, &(form, head, deprel))| Token::new(i + 1, form, "X", head, deprel))
            .collect();
        DepTree::new(sentence_id, tokens)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token at 1-based position `id`.
    pub fn token(&self, id: usize) -> &Token {
        &self.tokens[id - 1]
    }

    /// Id of the first token attached to the artificial root.
    pub fn root(&self) -> Option<usize> {
        self.tokens.iter().find(|t| t.head == 0).map(|t| t.id)
    }

    /// Child lists indexed by head position; index 0 holds the dependents
    /// of the artificial root. Children are in ascending id order.
    ///
    /// Heads outside the sentence are ignored.
    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.tokens.len() + 1];
        for t in &self.tokens {
            if t.head <= self.tokens.len() {
                children[t.head].push(t.id);
            }
        }
        children
    }

    /// Whether `ancestor` dominates `node` (reflexively) in the current head
    /// relation. Stops after `len` steps so it terminates on cyclic input.
    pub fn dominates(&self, ancestor: usize, node: usize) -> bool {
        let mut cur = node;
        for _ in 0..=self.tokens.len() {
            if cur == ancestor {
                return true;
            }
            if cur == 0 || cur > self.tokens.len() {
                return false;
            }
            cur = self.tokens[cur - 1].head;
        }
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Treebank {
    pub trees: Vec<DepTree>,
    pub provenance: String,
}

impl Treebank {
    pub fn new(trees: Vec<DepTree>, provenance: impl Into<String>) -> Self {
        Treebank {
            trees,
            provenance: provenance.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.trees.iter().map(DepTree::len).sum()
    }

    /// All dependency labels in first-seen order.
    pub fn label_inventory(&self) -> Vec<String> {
        let mut seen = Vec::<String>::new();
        for t in self.trees.iter().flat_map(|tree| tree.tokens.iter()) {
            if !seen.iter().any(|l| l == &t.deprel) {
                seen.push(t.deprel.clone());
            }
        }
        seen
    }
}

/// A single structural problem found by [`validate_tree`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// The sentence has no tokens.
    Empty,
    /// Token ids are not `1..=n` in order; `position` is the 1-based line
    /// position where the wrong id was found.
    IdGap { position: usize, found: usize },
    /// No token is attached to the root.
    NoRoot,
    /// More than one token is attached to the root.
    MultiRoot { ids: Vec<usize> },
    SelfLoop { id: usize },
    HeadOutOfRange { id: usize, head: usize },
    /// Tokens on or feeding into a head cycle, i.e. not reachable from the
    /// root.
    Cycle { ids: Vec<usize> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "empty sentence"),
            Violation::IdGap { position, found } => {
                write!(f, "id gap: position {} has id {}", position, found)
            }
            Violation::NoRoot => write!(f, "no root"),
            Violation::MultiRoot { ids } => write!(f, "multi-root: tokens {:?}", ids),
            Violation::SelfLoop { id } => write!(f, "self-loop at token {}", id),
            Violation::HeadOutOfRange { id, head } => {
                write!(f, "head out of range: token {} has head {}", id, head)
            }
            Violation::Cycle { ids } => write!(f, "cycle: tokens {:?} unreachable from root", ids),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Check the single-root, acyclic, contiguous-id invariants of a tree.
pub fn validate_tree(tree: &DepTree) -> ValidationReport {
    let mut violations = Vec::new();
    let n = tree.tokens.len();
    if n == 0 {
        violations.push(Violation::Empty);
        return ValidationReport { violations };
    }

    for (pos, t) in tree.tokens.iter().enumerate() {
        if t.id != pos + 1 {
            violations.push(Violation::IdGap {
                position: pos + 1,
                found: t.id,
            });
        }
    }

    let roots: Vec<usize> = tree.tokens.iter().filter(|t| t.head == 0).map(|t| t.id).collect();
    match roots.len() {
        0 => violations.push(Violation::NoRoot),
        1 => {}
        _ => violations.push(Violation::MultiRoot { ids: roots }),
    }

    let mut structural_ok = true;
    for t in &tree.tokens {
        if t.head == t.id {
            violations.push(Violation::SelfLoop { id: t.id });
            structural_ok = false;
        } else if t.head > n {
            violations.push(Violation::HeadOutOfRange {
                id: t.id,
                head: t.head,
            });
            structural_ok = false;
        }
    }

    // Reachability only makes sense once heads are in range and ids line up.
    if structural_ok && violations.iter().all(|v| !matches!(v, Violation::IdGap { .. })) {
        let children = tree.children();
        let mut reached = vec![false; n + 1];
        let mut stack = vec![0usize];
        while let Some(node) = stack.pop() {
            for &c in &children[node] {
                if !reached[c] {
                    reached[c] = true;
                    stack.push(c);
                }
            }
        }
        let unreachable: Vec<usize> = (1..=n).filter(|&i| !reached[i]).collect();
        if !unreachable.is_empty() {
            violations.push(Violation::Cycle { ids: unreachable });
        }
    }

    ValidationReport { violations }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConllError {
    #[error("line {line}: expected 8 to 10 tab-separated columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: invalid {field} '{value}'")]
    InvalidNumber {
        line: usize,
        field: &'static str,
        value: String,
    },
    #[error("sentence '{sentence}': {report}")]
    Invalid {
        sentence: String,
        report: ValidationReport,
    },
}

/// Counters collected while reading a treebank.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub sentences: usize,
    pub tokens: usize,
    /// Multi-word token and empty node lines that were skipped.
    pub skipped_lines: usize,
}

/// Parse a CoNLL treebank; every tree is validated.
pub fn parse_conll(text: &str) -> Result<Treebank, ConllError> {
    let (tb, stats) = parse_conll_with_stats(text)?;
    if stats.skipped_lines > 0 {
        log::warn!(
            "skipped {} multi-word or empty-node lines",
            stats.skipped_lines
        );
    }
    Ok(tb)
}

pub fn parse_conll_with_stats(text: &str) -> Result<(Treebank, ParseStats), ConllError> {
    let mut stats = ParseStats::default();
    let mut trees = Vec::new();
    let mut tokens: Vec<Token> = Vec::new();
    let mut sent_id: Option<String> = None;

    let finish = |tokens: &mut Vec<Token>, sent_id: &mut Option<String>, trees: &mut Vec<DepTree>| {
        if tokens.is_empty() {
            *sent_id = None;
            return Ok(());
        }
        let id = sent_id.take().unwrap_or_else(|| default_sentence_id(trees.len()));
        let tree = DepTree::new(id, std::mem::take(tokens));
        let report = validate_tree(&tree);
        if !report.is_valid() {
            return Err(ConllError::Invalid {
                sentence: tree.sentence_id,
                report,
            });
        }
        trees.push(tree);
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            finish(&mut tokens, &mut sent_id, &mut trees)?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("sent_id") {
                let value = value.trim_start().trim_start_matches('=').trim();
                if !value.is_empty() {
                    sent_id = Some(value.to_owned());
                }
            }
            continue;
        }

        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 8 || cols.len() > 10 {
            return Err(ConllError::ColumnCount {
                line: line_no,
                found: cols.len(),
            });
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            stats.skipped_lines += 1;
            continue;
        }
        let id = parse_index(cols[0], line_no, "id")?;
        let head = parse_index(cols[6], line_no, "head")?;
        let field = |i: usize| -> String {
            match cols.get(i) {
                Some(v) if !v.is_empty() => (*v).to_owned(),
                _ => EMPTY.to_owned(),
            }
        };
        tokens.push(Token {
            id,
            form: cols[1].to_owned(),
            lemma: field(2),
            upos: field(3),
            xpos: field(4),
            feats: field(5),
            head,
            deprel: field(7),
            deps: field(8),
            misc: field(9),
        });
        stats.tokens += 1;
    }
    finish(&mut tokens, &mut sent_id, &mut trees)?;
    stats.sentences = trees.len();

    Ok((Treebank::new(trees, "conll"), stats))
}

fn parse_index(value: &str, line: usize, field: &'static str) -> Result<usize, ConllError> {
    value.parse::<usize>().map_err(|_| ConllError::InvalidNumber {
        line,
        field,
        value: value.to_owned(),
    })
}

fn default_sentence_id(index: usize) -> String {
    (index + 1).to_string()
}

fn or_empty(value: &str) -> &str {
    if value.is_empty() {
        EMPTY
    } else {
        value
    }
}

/// Serialize a treebank. A `# sent_id` comment is written only when a
/// tree's id differs from its 1-based position, so that positional ids
/// round-trip without comments. Every sentence ends with a blank line.
pub fn write_conll(tb: &Treebank) -> String {
    let mut out = String::new();
    for (i, tree) in tb.trees.iter().enumerate() {
        if tree.sentence_id != default_sentence_id(i) {
            out.push_str("# sent_id = ");
            out.push_str(&tree.sentence_id);
            out.push('\n');
        }
        for t in &tree.tokens {
            let row = [
                t.id.to_string(),
                t.form.clone(),
                or_empty(&t.lemma).to_owned(),
                or_empty(&t.upos).to_owned(),
                or_empty(&t.xpos).to_owned(),
                or_empty(&t.feats).to_owned(),
                t.head.to_string(),
                or_empty(&t.deprel).to_owned(),
                or_empty(&t.deps).to_owned(),
                or_empty(&t.misc).to_owned(),
            ];
            out.push_str(&row.join("\t"));
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_SENTENCES: &str = "1\tnot\tnot\tPART\t_\t_\t2\tneg\t_\t_
2\tgood\tgood\tADJ\t_\t_\t0\troot\t_\t_

1\tvery\tvery\tADV\t_\t_\t2\tadvmod\t_\t_
2\tbad\tbad\tADJ\t_\t_\t0\troot\t_\t_
3\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_
";

    #[test]
    fn parses_two_sentences() {
        let tb = parse_conll(TWO_SENTENCES).unwrap();
        assert_eq!(tb.len(), 2);
        assert_eq!(tb.trees[0].len(), 2);
        assert_eq!(tb.trees[1].len(), 3);
        assert_eq!(tb.trees[1].sentence_id, "2");
    }

    #[test]
    fn root_at_second_token() {
        let text = "1\tnot\tnot\tPART\t_\t_\t2\tneg\t_\t_\n\
                    2\tgood\tgood\tADJ\t_\t_\t0\troot\t_\t_\n";
        let tb = parse_conll(text).unwrap();
        let tree = &tb.trees[0];
        assert_eq!(tree.root(), Some(2));
        assert_eq!(tree.token(2).form, "good");
        assert_eq!(tree.token(2).deprel, "root");
        assert_eq!(tree.token(1).head, 2);
    }

    #[test]
    fn two_cycle_is_rejected() {
        let text = "1\ta\ta\tX\t_\t_\t2\tdep\t_\t_\n\
                    2\tb\tb\tX\t_\t_\t1\tdep\t_\t_\n";
        match parse_conll(text) {
            Err(ConllError::Invalid { sentence, report }) => {
                assert_eq!(sentence, "1");
                assert!(report
                    .violations
                    .iter()
                    .any(|v| matches!(v, Violation::Cycle { .. })));
            }
            other => panic!("expected cycle error, got {:?}", other),
        }
    }

    #[test]
    fn column_count_errors_name_the_line() {
        let text = "1\tgood\tgood\tADJ\t_\t_\t0\troot\t_\t_\n\n1\tbad\tADJ\t0\troot\n";
        assert_eq!(
            parse_conll(text),
            Err(ConllError::ColumnCount { line: 3, found: 5 })
        );
        let eleven = "1\tgood\tgood\tADJ\t_\t_\t0\troot\t_\t_\textra\n";
        assert_eq!(
            parse_conll(eleven),
            Err(ConllError::ColumnCount { line: 1, found: 11 })
        );
    }

    #[test]
    fn non_integer_head_is_rejected() {
        let text = "1\tgood\tgood\tADJ\t_\t_\tx\troot\t_\t_\n";
        assert_eq!(
            parse_conll(text),
            Err(ConllError::InvalidNumber {
                line: 1,
                field: "head",
                value: "x".into()
            })
        );
    }

    #[test]
    fn eight_columns_accepted() {
        let text = "1\tgood\tgood\tADJ\t_\t_\t0\troot\n";
        let tb = parse_conll(text).unwrap();
        assert_eq!(tb.trees[0].tokens[0].deps, "_");
        assert_eq!(tb.trees[0].tokens[0].misc, "_");
    }

    #[test]
    fn multiword_and_empty_nodes_skipped() {
        let text = "1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_\n\
                    1\tdo\tdo\tAUX\t_\t_\t0\troot\t_\t_\n\
                    2\tn't\tnot\tPART\t_\t_\t1\tneg\t_\t_\n\
                    2.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n";
        let (tb, stats) = parse_conll_with_stats(text).unwrap();
        assert_eq!(stats.skipped_lines, 2);
        assert_eq!(tb.trees[0].len(), 2);
    }

    #[test]
    fn sent_id_comment_round_trips() {
        let text = "# sent_id = doc1-s3\n1\tgood\tgood\tADJ\t_\t_\t0\troot\t_\t_\n\n";
        let tb = parse_conll(text).unwrap();
        assert_eq!(tb.trees[0].sentence_id, "doc1-s3");
        assert_eq!(write_conll(&tb), text);
    }

    #[test]
    fn write_is_byte_identical_for_normalized_input() {
        let tb = parse_conll(TWO_SENTENCES).unwrap();
        let written = write_conll(&tb);
        assert_eq!(written, format!("{}\n", TWO_SENTENCES));
        assert_eq!(parse_conll(&written).unwrap(), tb);
    }

    #[test]
    fn empty_fields_rendered_as_underscore() {
        let mut tree = DepTree::from_triples("1", &[("good", 0, "root")]);
        tree.tokens[0].lemma.clear();
        tree.tokens[0].feats.clear();
        let out = write_conll(&Treebank::new(vec![tree], "test"));
        assert_eq!(out, "1\tgood\t_\tX\t_\t_\t0\troot\t_\t_\n\n");
    }

    #[test]
    fn three_token_tree_writes_three_lines_and_blank() {
        let tree = DepTree::from_triples("1", &[("very", 2, "advmod"), ("good", 0, "root"), ("!", 2, "punct")]);
        let out = write_conll(&Treebank::new(vec![tree], "test"));
        let lines: Vec<&str> = out.split('\n').collect();
        // three token lines, the blank separator, and the empty tail after
        // the final newline
        assert_eq!(lines.len(), 5);
        assert!(lines[..3].iter().all(|l| l.split('\t').count() == 10));
        assert_eq!(lines[3], "");
        assert!(out.ends_with("\n\n"));
    }

    #[test]
    fn validate_reports_each_violation() {
        let ok = DepTree::from_triples("1", &[("not", 2, "neg"), ("good", 0, "root")]);
        assert!(validate_tree(&ok).is_valid());

        let multi = DepTree::from_triples("1", &[("a", 0, "root"), ("b", 0, "root")]);
        assert_eq!(
            validate_tree(&multi).violations,
            vec![Violation::MultiRoot { ids: vec![1, 2] }]
        );

        let out_of_range = DepTree::from_triples(
            "1",
            &[("a", 0, "root"), ("b", 1, "dep"), ("c", 7, "dep"), ("d", 1, "dep"), ("e", 1, "dep")],
        );
        assert_eq!(
            validate_tree(&out_of_range).violations,
            vec![Violation::HeadOutOfRange { id: 3, head: 7 }]
        );

        let mut gap = DepTree::from_triples("1", &[("a", 0, "root"), ("b", 1, "dep")]);
        gap.tokens[1].id = 3;
        assert!(validate_tree(&gap)
            .violations
            .contains(&Violation::IdGap { position: 2, found: 3 }));

        let self_loop = DepTree::from_triples("1", &[("a", 0, "root"), ("b", 2, "dep")]);
        assert_eq!(
            validate_tree(&self_loop).violations,
            vec![Violation::SelfLoop { id: 2 }]
        );

        let cycle = DepTree::from_triples("1", &[("a", 0, "root"), ("b", 3, "dep"), ("c", 2, "dep")]);
        assert_eq!(
            validate_tree(&cycle).violations,
            vec![Violation::Cycle { ids: vec![2, 3] }]
        );
    }

    #[test]
    fn children_lists_are_consistent() {
        let tb = parse_conll(TWO_SENTENCES).unwrap();
        for tree in &tb.trees {
            let children = tree.children();
            for t in &tree.tokens {
                let count = children[t.head].iter().filter(|&&c| c == t.id).count();
                assert_eq!(count, 1);
            }
        }
    }
}
