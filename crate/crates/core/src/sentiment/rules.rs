use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Names are case-insensitive when read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", try_from = "String")]
pub enum Rule {
    Intensification,
    But,
    Negation,
    If,
}

impl Rule {
    pub const ALL: [Rule; 4] = [Rule::Intensification, Rule::But, Rule::Negation, Rule::If];
}

#[derive(Debug, Error, PartialEq)]
pub enum RuleError {
    #[error("unknown rule '{0}'")]
    UnknownRule(String),
    #[error("unknown rule subset '{0}' (expected All, None, Intensification, but, if or Negation)")]
    UnknownSubset(String),
    #[error("unknown negation strategy '{0}' (expected flip or shift)")]
    UnknownStrategy(String),
    #[error("but_main_factor {0} must lie in (0, 1]")]
    ButFactor(f64),
    #[error("shift amount {0} must be positive")]
    ShiftAmount(f64),
    #[error("threshold must be finite")]
    Threshold,
    #[error("invalid rule configuration: {0}")]
    Json(String),
}

impl FromStr for Rule {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "intensification" => Ok(Rule::Intensification),
            "but" => Ok(Rule::But),
            "negation" => Ok(Rule::Negation),
            "if" => Ok(Rule::If),
            _ => Err(RuleError::UnknownRule(s.to_owned())),
        }
    }
}

impl TryFrom<String> for Rule {
    type Error = RuleError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NegationStrategy {
    /// Invert the sign.
    Flip,
    /// Move the value towards and past zero by a fixed amount.
    Shift(f64),
}

pub const DEFAULT_SHIFT: f64 = 4.0;
pub const DEFAULT_BUT_FACTOR: f64 = 0.5;

/// Labels an intensifier branch may carry.
pub const INTENSIFIER_DEPRELS: [&str; 3] = ["advmod", "amod", "nmod"];
/// Label of a sibling branch that an intensifier targets instead of its head.
pub const INTENSIFICATION_TARGET_DEPREL: &str = "acomp";
/// Labels of sibling complements that a negator targets instead of its head.
pub const NEGATION_TARGET_DEPRELS: [&str; 2] = ["attr", "acomp"];
pub const NEGATION_DEPREL: &str = "neg";
pub const ADVERSATIVE_DEPREL: &str = "cc";
pub const CONJUNCT_DEPREL: &str = "conj";
pub const CONDITIONAL_DEPREL: &str = "mark";

/// Enabled compositional operations and their parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleSet {
    pub enabled: BTreeSet<Rule>,
    pub negation_strategy: NegationStrategy,
    pub but_main_factor: f64,
    /// Documents scoring strictly above this are positive.
    pub classification_threshold: f64,
}

impl Default for RuleSet {
    fn default() -> Self {
        RuleSet::all()
    }
}

impl RuleSet {
    pub fn with_rules(rules: impl IntoIterator<Item = Rule>) -> Self {
        RuleSet {
            enabled: rules.into_iter().collect(),
            negation_strategy: NegationStrategy::Flip,
            but_main_factor: DEFAULT_BUT_FACTOR,
            classification_threshold: 0.0,
        }
    }

    pub fn all() -> Self {
        Self::with_rules(Rule::ALL)
    }

    pub fn none() -> Self {
        Self::with_rules([])
    }

    pub fn is_enabled(&self, rule: Rule) -> bool {
        self.enabled.contains(&rule)
    }

    /// Same parameters, different enabled set.
    pub fn restricted_to(&self, subset: RuleSubset) -> Self {
        RuleSet {
            enabled: subset.rules().into_iter().collect(),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), RuleError> {
        if !(self.but_main_factor > 0.0 && self.but_main_factor <= 1.0) {
            return Err(RuleError::ButFactor(self.but_main_factor));
        }
        if let NegationStrategy::Shift(a) = self.negation_strategy {
            if !(a > 0.0 && a.is_finite()) {
                return Err(RuleError::ShiftAmount(a));
            }
        }
        if !self.classification_threshold.is_finite() {
            return Err(RuleError::Threshold);
        }
        Ok(())
    }

    /// Parse the JSON configuration:
    ///
    /// ```json
    /// {"enabled_rules": ["negation", "if"], "negation_strategy": "shift",
    ///  "shift_amount": 4.0, "but_main_factor": 0.5, "threshold": 0.0}
    /// ```
    ///
    /// Every key is optional; missing keys take the defaults of
    /// [`RuleSet::all`].
    pub fn from_json(text: &str) -> Result<Self, RuleError> {
        let cfg: RuleSetConfig = serde_json::from_str(text).map_err(|e| RuleError::Json(e.to_string()))?;
        cfg.into_rule_set()
    }

    pub fn to_config(&self) -> RuleSetConfig {
        let (strategy, shift) = match self.negation_strategy {
            NegationStrategy::Flip => ("flip", None),
            NegationStrategy::Shift(a) => ("shift", Some(a)),
        };
        RuleSetConfig {
            enabled_rules: Some(self.enabled.iter().copied().collect()),
            negation_strategy: Some(strategy.to_owned()),
            shift_amount: shift,
            but_main_factor: Some(self.but_main_factor),
            threshold: Some(self.classification_threshold),
        }
    }
}

/// Serialized shape of a [`RuleSet`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleSetConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enabled_rules: Option<Vec<Rule>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negation_strategy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift_amount: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub but_main_factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

impl RuleSetConfig {
    pub fn into_rule_set(self) -> Result<RuleSet, RuleError> {
        let mut rules = RuleSet::all();
        if let Some(enabled) = self.enabled_rules {
            rules.enabled = enabled.into_iter().collect();
        }
        match self.negation_strategy.as_deref().map(str::to_ascii_lowercase).as_deref() {
            None | Some("flip") => {}
            Some("shift") => {
                rules.negation_strategy = NegationStrategy::Shift(self.shift_amount.unwrap_or(DEFAULT_SHIFT))
            }
            Some(other) => return Err(RuleError::UnknownStrategy(other.to_owned())),
        }
        if let Some(f) = self.but_main_factor {
            rules.but_main_factor = f;
        }
        if let Some(t) = self.threshold {
            rules.classification_threshold = t;
        }
        rules.validate()?;
        Ok(rules)
    }
}

/// The rule subsets reported as ablation columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleSubset {
    All,
    None,
    Intensification,
    But,
    If,
    Negation,
}

impl RuleSubset {
    /// Column order of the ablation table.
    pub const COLUMNS: [RuleSubset; 6] = [
        RuleSubset::All,
        RuleSubset::None,
        RuleSubset::Intensification,
        RuleSubset::But,
        RuleSubset::If,
        RuleSubset::Negation,
    ];

    pub fn rules(self) -> Vec<Rule> {
        match self {
            RuleSubset::All => Rule::ALL.to_vec(),
            RuleSubset::None => vec![],
            RuleSubset::Intensification => vec![Rule::Intensification],
            RuleSubset::But => vec![Rule::But],
            RuleSubset::If => vec![Rule::If],
            RuleSubset::Negation => vec![Rule::Negation],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleSubset::All => "All",
            RuleSubset::None => "None",
            RuleSubset::Intensification => "Intensification",
            RuleSubset::But => "but",
            RuleSubset::If => "if",
            RuleSubset::Negation => "Negation",
        }
    }
}

impl fmt::Display for RuleSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RuleSubset {
    type Err = RuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleSubset::COLUMNS
            .iter()
            .copied()
            .find(|c| c.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| RuleError::UnknownSubset(s.to_owned()))
    }
}

impl Serialize for RuleSubset {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for RuleSubset {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
