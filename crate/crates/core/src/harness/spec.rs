use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::corpus::{parse_labels, Corpus};
use super::{HarnessError, Result};
use crate::deptree::{parse_conll, Treebank};
use crate::eval::attachment_counts;
use crate::perturb::PerturbationConfig;
use crate::sentiment::{Lexicon, RuleSet, RuleSetConfig, RuleSubset};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    #[serde(default = "default_corpus_name")]
    pub name: String,
    /// Reference CoNLL file for the corpus.
    pub treebank: PathBuf,
    /// Sidecar labels file.
    pub labels: PathBuf,
}

fn default_corpus_name() -> String {
    "corpus".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub name: String,
    pub treebank: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSettings {
    pub targets: Vec<f64>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_label_share")]
    pub label_error_share: f64,
}

fn default_label_share() -> f64 {
    0.5
}

impl Default for CurveSettings {
    fn default() -> Self {
        CurveSettings {
            targets: vec![1.0, 0.92, 0.85, 0.7, 0.5, 0.0],
            seeds: vec![1, 2, 3, 4, 5],
            label_error_share: default_label_share(),
        }
    }
}

impl CurveSettings {
    pub fn template(&self) -> PerturbationConfig {
        PerturbationConfig::new(1.0, self.label_error_share, 0)
    }
}

/// On-disk experiment description (JSON). Relative paths are resolved
/// against the directory of the spec file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub corpus: CorpusSpec,
    pub lexicon: PathBuf,
    #[serde(default)]
    pub rules: Option<RuleSetConfig>,
    /// Defaults to the six standard columns.
    #[serde(default)]
    pub subsets: Option<Vec<RuleSubset>>,
    /// Predicted treebanks; when empty the corpus treebank is the only
    /// input, named "gold".
    #[serde(default)]
    pub inputs: Vec<InputSpec>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub curve: Option<CurveSettings>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HarnessError::Spec(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Experiment> {
        let path = path.as_ref();
        let spec = Self::from_json(&read(path)?)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        spec.resolve(base)
    }

    /// Read every referenced file, relative to `base`.
    pub fn resolve(&self, base: &Path) -> Result<Experiment> {
        let at = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };
        let treebank = load_treebank(&at(&self.corpus.treebank))?;
        let documents = parse_labels(&read(&at(&self.corpus.labels))?)?;
        let corpus = Corpus::new(self.corpus.name.clone(), treebank, documents)?;
        let lexicon = Lexicon::load(at(&self.lexicon))?;
        let rules = match &self.rules {
            Some(cfg) => cfg.clone().into_rule_set()?,
            None => RuleSet::all(),
        };
        let mut inputs = Vec::new();
        for input in &self.inputs {
            inputs.push((input.name.clone(), load_treebank(&at(&input.treebank))?));
        }
        Experiment::new(
            corpus,
            lexicon,
            rules,
            self.subsets.clone().unwrap_or_else(|| RuleSubset::COLUMNS.to_vec()),
            inputs,
            self.seed,
            self.curve.clone().unwrap_or_default(),
        )
    }
}

pub(crate) fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_treebank(path: &Path) -> Result<Treebank> {
    let mut tb = parse_conll(&read(path)?).map_err(|source| HarnessError::Conll {
        path: path.display().to_string(),
        source,
    })?;
    tb.provenance = path.display().to_string();
    Ok(tb)
}

/// A fully loaded experiment.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub corpus: Corpus,
    pub lexicon: Lexicon,
    /// Base parameters; subsets only change which rules are enabled.
    pub rules: RuleSet,
    pub subsets: Vec<RuleSubset>,
    pub inputs: Vec<(String, Treebank)>,
    pub seed: u64,
    pub curve: CurveSettings,
}

impl Experiment {
    /// Checks that every input is token-aligned with the corpus. With no
    /// inputs the corpus trees become the single input "gold".
    pub fn new(
        corpus: Corpus,
        lexicon: Lexicon,
        rules: RuleSet,
        subsets: Vec<RuleSubset>,
        mut inputs: Vec<(String, Treebank)>,
        seed: u64,
        curve: CurveSettings,
    ) -> Result<Self> {
        if inputs.is_empty() {
            inputs.push(("gold".into(), corpus.treebank.clone()));
        }
        for (name, tb) in &inputs {
            attachment_counts(&corpus.treebank, tb, false).map_err(|source| HarnessError::Alignment {
                input: name.clone(),
                source,
            })?;
        }
        rules.validate()?;
        Ok(Experiment {
            corpus,
            lexicon,
            rules,
            subsets,
            inputs,
            seed,
            curve,
        })
    }

    pub fn input(&self, name: &str) -> Result<&Treebank> {
        self.inputs
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, tb)| tb)
            .ok_or_else(|| HarnessError::UnknownInput(name.to_owned()))
    }
}
