use std::collections::{HashMap, HashSet};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected 'kind<TAB>form[<TAB>upos[<TAB>value]]'")]
    Malformed { line: usize },
    #[error("line {line}: unknown entry kind '{kind}' (expected so, int or neg)")]
    UnknownKind { line: usize, kind: String },
    #[error("line {line}: invalid value '{value}'")]
    InvalidValue { line: usize, value: String },
    #[error("line {line}: duplicate {kind} entry for '{form}'")]
    Duplicate { line: usize, kind: String, form: String },
    #[error("line {line}: intensifier weight {weight} must be greater than -1")]
    WeightRange { line: usize, weight: f64 },
    #[error("semantic orientation for '{form}' must be finite")]
    NonFinite { form: String },
}

/// Word-level sentiment resources.
///
/// Keys are lowercased forms. Subjective entries may be restricted to a
/// coarse tag; a tagged entry wins over an untagged one for the same form.
#[derive(Clone, Debug, PartialEq)]
pub struct Lexicon {
    subjective: HashMap<(String, Option<String>), f64>,
    intensifiers: HashMap<String, f64>,
    negators: HashSet<String>,
    adversative_markers: HashSet<String>,
    conditional_markers: HashSet<String>,
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon {
            subjective: HashMap::new(),
            intensifiers: HashMap::new(),
            negators: HashSet::new(),
            adversative_markers: ["but".to_owned()].into_iter().collect(),
            conditional_markers: ["if".to_owned()].into_iter().collect(),
        }
    }
}

/// Number of entries of each kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LexiconCounts {
    pub subjective: usize,
    pub intensifiers: usize,
    pub negators: usize,
}

fn normalize_upos(upos: Option<&str>) -> Option<String> {
    match upos {
        None | Some("") | Some("_") => None,
        Some(tag) => Some(tag.to_owned()),
    }
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_subjective(mut self, form: &str, upos: Option<&str>, so: f64) -> Self {
        self.subjective
            .insert((form.to_lowercase(), normalize_upos(upos)), so);
        self
    }

    pub fn with_intensifier(mut self, form: &str, weight: f64) -> Self {
        assert!(weight > -1.0, "intensifier weight must be > -1");
        self.intensifiers.insert(form.to_lowercase(), weight);
        self
    }

    pub fn with_negator(mut self, form: &str) -> Self {
        self.negators.insert(form.to_lowercase());
        self
    }

    pub fn with_adversative(mut self, form: &str) -> Self {
        self.adversative_markers.insert(form.to_lowercase());
        self
    }

    pub fn with_conditional(mut self, form: &str) -> Self {
        self.conditional_markers.insert(form.to_lowercase());
        self
    }

    /// Semantic orientation of a word, 0 when unknown.
    pub fn so(&self, form: &str, upos: &str) -> f64 {
        let form = form.to_lowercase();
        let tagged = self.subjective.get(&(form.clone(), normalize_upos(Some(upos))));
        tagged
            .or_else(|| self.subjective.get(&(form, None)))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn intensifier(&self, form: &str) -> Option<f64> {
        self.intensifiers.get(&form.to_lowercase()).copied()
    }

    /// With an empty negator list every `neg` dependent counts as a
    /// negator; otherwise the form must be listed.
    pub fn is_negator(&self, form: &str) -> bool {
        self.negators.is_empty() || self.negators.contains(&form.to_lowercase())
    }

    pub fn is_adversative(&self, form: &str) -> bool {
        self.adversative_markers.contains(&form.to_lowercase())
    }

    pub fn is_conditional(&self, form: &str) -> bool {
        self.conditional_markers.contains(&form.to_lowercase())
    }

    pub fn counts(&self) -> LexiconCounts {
        LexiconCounts {
            subjective: self.subjective.len(),
            intensifiers: self.intensifiers.len(),
            negators: self.negators.len(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Lexicon, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parse the tab-separated lexicon format:
    ///
    /// ```text
    /// so   good  ADJ  2.0
    /// int  very  _    0.25
    /// neg  not
    /// ```
    ///
    /// Blank lines and lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Lexicon, LexiconError> {
        let mut lex = Lexicon::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let raw = raw.trim_end_matches('\r');
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = raw.split('\t').map(str::trim).collect();
            if cols.len() < 2 || cols[1].is_empty() {
                return Err(LexiconError::Malformed { line });
            }
            let form = cols[1].to_lowercase();
            let upos = normalize_upos(cols.get(2).copied());
            let value = || -> Result<f64, LexiconError> {
                let v = cols.get(3).ok_or(LexiconError::Malformed { line })?;
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| LexiconError::InvalidValue {
                        line,
                        value: (*v).to_owned(),
                    })
            };
            let duplicate = |kind: &str| LexiconError::Duplicate {
                line,
                kind: kind.to_owned(),
                form: form.clone(),
            };
            match cols[0] {
                "so" => {
                    let so = value()?;
                    if lex.subjective.insert((form.clone(), upos), so).is_some() {
                        return Err(duplicate("so"));
                    }
                }
                "int" => {
                    let weight = value()?;
                    if weight <= -1.0 {
                        return Err(LexiconError::WeightRange { line, weight });
                    }
                    if lex.intensifiers.insert(form.clone(), weight).is_some() {
                        return Err(duplicate("int"));
                    }
                }
                "neg" => {
                    if !lex.negators.insert(form.clone()) {
                        return Err(duplicate("neg"));
                    }
                }
                other => {
                    return Err(LexiconError::UnknownKind {
                        line,
                        kind: other.to_owned(),
                    })
                }
            }
        }
        Ok(lex)
    }

    /// Serialize back to the tab-separated format, entries sorted.
    pub fn to_tsv(&self) -> String {
        let mut lines = Vec::new();
        let mut so: Vec<_> = self.subjective.iter().collect();
        so.sort_by(|a, b| a.0.cmp(b.0));
        for ((form, upos), v) in so {
            lines.push(format!("so\t{}\t{}\t{}", form, upos.as_deref().unwrap_or("_"), v));
        }
        let mut ints: Vec<_> = self.intensifiers.iter().collect();
        ints.sort_by(|a, b| a.0.cmp(b.0));
        for (form, w) in ints {
            lines.push(format!("int\t{}\t_\t{}", form, w));
        }
        let mut negs: Vec<_> = self.negators.iter().collect();
        negs.sort();
        for form in negs {
            lines.push(format!("neg\t{}", form));
        }
        let mut out = lines.join("\n");
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let lex = Lexicon::parse("so\tgood\tADJ\t2.0\nint\tvery\t_\t0.25\nneg\tnot\n").unwrap();
        assert_eq!(lex.so("good", "ADJ"), 2.0);
        assert_eq!(lex.so("Good", "ADJ"), 2.0);
        assert_eq!(lex.so("good", "NOUN"), 0.0);
        assert_eq!(lex.intensifier("very"), Some(0.25));
        assert!(lex.is_negator("NOT"));
        assert!(!lex.is_negator("never"));
        assert_eq!(
            lex.counts(),
            LexiconCounts {
                subjective: 1,
                intensifiers: 1,
                negators: 1
            }
        );
    }

    #[test]
    fn tagged_entry_preferred() {
        let lex = Lexicon::parse("so\tlike\t_\t0.5\nso\tlike\tVERB\t2.0\n").unwrap();
        assert_eq!(lex.so("like", "VERB"), 2.0);
        assert_eq!(lex.so("like", "ADP"), 0.5);
    }

    #[test]
    fn duplicate_entry_names_line() {
        let err = Lexicon::parse("so\tgood\tADJ\t2.0\n\nso\tgood\tADJ\t1.0\n").unwrap_err();
        assert!(matches!(err, LexiconError::Duplicate { line: 3, .. }), "{err}");
    }

    #[test]
    fn bad_values_rejected() {
        assert!(matches!(
            Lexicon::parse("so\tgood\tADJ\tgreat\n"),
            Err(LexiconError::InvalidValue { line: 1, .. })
        ));
        assert!(matches!(
            Lexicon::parse("int\tbarely\t_\t-1.0\n"),
            Err(LexiconError::WeightRange { line: 1, .. })
        ));
        assert!(matches!(
            Lexicon::parse("foo\tbar\n"),
            Err(LexiconError::UnknownKind { line: 1, .. })
        ));
    }

    #[test]
    fn tsv_round_trip() {
        let lex = Lexicon::new()
            .with_subjective("good", Some("ADJ"), 2.0)
            .with_subjective("bad", None, -1.5)
            .with_intensifier("very", 0.25)
            .with_negator("not");
        assert_eq!(Lexicon::parse(&lex.to_tsv()).unwrap(), lex);
    }

    #[test]
    fn default_markers() {
        let lex = Lexicon::new();
        assert!(lex.is_adversative("But"));
        assert!(lex.is_conditional("if"));
        assert!(lex.is_negator("anything"));
    }
}
