use std::ops::Range;

use super::{HarnessError, Result};
use crate::deptree::Treebank;
use crate::sentiment::PolarityLabel;

/// A labelled document: a contiguous range of sentences in the corpus
/// treebank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub label: PolarityLabel,
    /// 0-based, end-exclusive sentence range.
    pub sentences: Range<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    pub name: String,
    /// Reference trees; parser outputs and perturbed variants are aligned
    /// with these.
    pub treebank: Treebank,
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn new(name: impl Into<String>, treebank: Treebank, documents: Vec<Document>) -> Result<Self> {
        let corpus = Corpus {
            name: name.into(),
            treebank,
            documents,
        };
        corpus.check_documents()?;
        Ok(corpus)
    }

    /// Every document must be a non-empty range inside the treebank, and
    /// ids must be unique.
    pub fn check_documents(&self) -> Result<()> {
        let n = self.treebank.len();
        let mut bad: Vec<String> = Vec::new();
        for (i, d) in self.documents.iter().enumerate() {
            let duplicate = self.documents[..i].iter().any(|o| o.id == d.id);
            if d.sentences.is_empty() || d.sentences.end > n || duplicate {
                bad.push(d.id.clone());
            }
        }
        if self.documents.is_empty() {
            bad.push("<no documents>".into());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(HarnessError::DocumentMismatch { sentences: n, ids: bad })
        }
    }

    /// One document per sentence, all labelled `label`; used when no labels
    /// file is given.
    pub fn sentence_documents(treebank: &Treebank, label: PolarityLabel) -> Vec<Document> {
        treebank
            .trees
            .iter()
            .enumerate()
            .map(|(i, t)| Document {
                id: t.sentence_id.clone(),
                label,
                sentences: i..i + 1,
            })
            .collect()
    }
}

/// Parse a labels file: one `doc_id<TAB>pos|neg<TAB>start<TAB>end` line per
/// document, with 0-based end-exclusive sentence indices. Blank lines and
/// `#` comments are skipped.
pub fn parse_labels(text: &str) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').collect();
        if cols.len() != 4 {
            return Err(HarnessError::Labels {
                line,
                message: format!("expected 4 tab-separated columns, found {}", cols.len()),
            });
        }
        let label = cols[1].parse::<PolarityLabel>().map_err(|e| HarnessError::Labels {
            line,
            message: e.to_string(),
        })?;
        let index = |s: &str| {
            s.trim().parse::<usize>().map_err(|_| HarnessError::Labels {
                line,
                message: format!("invalid sentence index '{}'", s),
            })
        };
        docs.push(Document {
            id: cols[0].to_owned(),
            label,
            sentences: index(cols[2])?..index(cols[3])?,
        });
    }
    Ok(docs)
}

pub fn format_labels(docs: &[Document]) -> String {
    let mut out = String::from("# doc_id\tlabel\tfirst_sentence\tend_sentence\n");
    for d in docs {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            d.id, d.label, d.sentences.start, d.sentences.end
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deptree::DepTree;

    fn treebank(n: usize) -> Treebank {
        Treebank::new(
            (0..n).map(|i| DepTree::from_triples(i.to_string(), &[("good", 0, "root")])).collect(),
            "t",
        )
    }

    #[test]
    fn labels_round_trip() {
        let docs = vec![
            Document {
                id: "a".into(),
                label: PolarityLabel::Positive,
                sentences: 0..2,
            },
            Document {
                id: "b".into(),
                label: PolarityLabel::Negative,
                sentences: 2..3,
            },
        ];
        assert_eq!(parse_labels(&format_labels(&docs)).unwrap(), docs);
    }

    #[test]
    fn bad_label_line() {
        assert!(matches!(
            parse_labels("a\tmaybe\t0\t1\n"),
            Err(HarnessError::Labels { line: 1, .. })
        ));
        assert!(matches!(
            parse_labels("a\tpos\t0\n"),
            Err(HarnessError::Labels { line: 1, .. })
        ));
    }

    #[test]
    fn out_of_range_documents_listed() {
        let docs = parse_labels("a\tpos\t0\t2\nb\tneg\t2\t5\nc\tneg\t3\t3\n").unwrap();
        match Corpus::new("c", treebank(3), docs) {
            Err(HarnessError::DocumentMismatch { ids, sentences }) => {
                assert_eq!(sentences, 3);
                assert_eq!(ids, vec!["b".to_owned(), "c".to_owned()]);
            }
            other => panic!("{:?}", other),
        }
    }
}
