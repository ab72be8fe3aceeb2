//! CSV and JSON rendering of experiment results. Column and key order is
//! fixed, so identical results always render to identical bytes.

use std::path::Path;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use super::{AblationTable, CurveSeries, HarnessError, Result, TimingRow};
use crate::eval::{AttachmentScores, LabelPR, Ratio};
use crate::perturb::PerturbationReport;
use crate::sentiment::{PolarityLabel, RuleSubset};
use crate::stats::ComparisonResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{}' (expected csv or json)", other)),
        }
    }
}

const UNDEFINED_MARK: &str = "*";
const UNDEFINED_NOTE: &str = "# * undefined: the label was never predicted (precision) or never in gold (recall)";

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

pub fn ablation(table: &AblationTable, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("input");
            for c in &table.columns {
                out.push(',');
                out.push_str(c.name());
            }
            out.push('\n');
            for row in &table.rows {
                out.push_str(&row.input);
                for acc in &row.accuracies {
                    out.push_str(&format!(",{:.2}", acc));
                }
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|row| {
                    let mut cells = Map::new();
                    cells.insert("input".into(), json!(row.input));
                    for (c, acc) in table.columns.iter().zip(&row.accuracies) {
                        cells.insert(c.name().into(), json!(round2(*acc)));
                    }
                    Value::Object(cells)
                })
                .collect();
            let columns: Vec<&str> = table.columns.iter().map(|c| c.name()).collect();
            pretty(&json!({ "columns": columns, "rows": rows }))
        }
    }
}

pub fn curve(series: &CurveSeries, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("target_las,las,uas,la");
            for name in &series.corpora {
                out.push(',');
                out.push_str(name);
            }
            out.push('\n');
            for p in &series.points {
                out.push_str(&format!("{:.4},{:.4},{:.4},{:.4}", p.target_las, p.las, p.uas, p.la));
                for (_, acc) in &p.accuracy_by_corpus {
                    out.push_str(&format!(",{:.2}", acc));
                }
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let points: Vec<Value> = series
                .points
                .iter()
                .map(|p| {
                    let mut accs = Map::new();
                    for (name, acc) in &p.accuracy_by_corpus {
                        accs.insert(name.clone(), json!(round2(*acc)));
                    }
                    json!({
                        "las": p.las,
                        "accuracy_by_corpus": accs,
                        "target_las": p.target_las,
                        "uas": p.uas,
                        "la": p.la,
                    })
                })
                .collect();
            pretty(&Value::Array(points))
        }
    }
}

pub fn timing(rows: &[TimingRow], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("input,subset,avg,min,max\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{:.6},{:.6},{:.6}\n",
                    r.input, r.subset, r.avg, r.min, r.max
                ));
            }
            out
        }
        Format::Json => pretty(&json!(rows
            .iter()
            .map(|r| json!({
                "input": r.input,
                "subset": r.subset.name(),
                "avg": r.avg,
                "min": r.min,
                "max": r.max,
            }))
            .collect::<Vec<_>>())),
    }
}

fn ratio_cell(r: Ratio) -> String {
    match r {
        Ratio::Defined(v) => format!("{:.4}", v),
        Ratio::Undefined => format!("{:.4}{}", 0.0, UNDEFINED_MARK),
    }
}

pub fn evaluation(scores: &AttachmentScores, labels: &[LabelPR], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("metric,value\n");
            out.push_str(&format!("LAS,{:.4}\nUAS,{:.4}\nLA,{:.4}\n", scores.las, scores.uas, scores.la));
            out.push_str(&format!("scored_tokens,{}\n\n", scores.scored_tokens));
            out.push_str("label,precision,recall,tp,fp,fn\n");
            let mut undefined = false;
            for l in labels {
                undefined |= !l.precision.is_defined() || !l.recall.is_defined();
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    l.label,
                    ratio_cell(l.precision),
                    ratio_cell(l.recall),
                    l.tp,
                    l.fp,
                    l.fn_
                ));
            }
            if undefined {
                out.push_str(UNDEFINED_NOTE);
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let labels: Vec<Value> = labels
                .iter()
                .map(|l| {
                    json!({
                        "label": l.label,
                        "precision": l.precision.value_or_zero(),
                        "precision_undefined": !l.precision.is_defined(),
                        "recall": l.recall.value_or_zero(),
                        "recall_undefined": !l.recall.is_defined(),
                        "tp": l.tp,
                        "fp": l.fp,
                        "fn": l.fn_,
                    })
                })
                .collect();
            pretty(&json!({
                "las": scores.las,
                "uas": scores.uas,
                "la": scores.la,
                "scored_tokens": scores.scored_tokens,
                "labels": labels,
            }))
        }
    }
}

pub fn comparison(result: &ComparisonResult, input_a: &str, input_b: &str, subset: RuleSubset, format: Format) -> String {
    let [[ac, ai], [bc, bi]] = result.contingency;
    match format {
        Format::Csv => format!(
            "input_a,input_b,subset,a_correct,a_incorrect,b_correct,b_incorrect,statistic,p_value\n\
             {},{},{},{},{},{},{},{},{}\n",
            input_a, input_b, subset, ac, ai, bc, bi, result.statistic, result.p_value
        ),
        Format::Json => pretty(&json!({
            "input_a": input_a,
            "input_b": input_b,
            "subset": subset.name(),
            "contingency": [[ac, ai], [bc, bi]],
            "statistic": result.statistic,
            "p_value": result.p_value,
        })),
    }
}

pub fn perturbation(report: &PerturbationReport) -> String {
    pretty(&serde_json::to_value(report).expect("report serializes"))
}

/// One classified document.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifiedDocument {
    pub id: String,
    pub so: f64,
    pub predicted: PolarityLabel,
    pub gold: Option<PolarityLabel>,
}

pub fn classification(docs: &[ClassifiedDocument], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::from("doc_id,so,predicted,gold\n");
            for d in docs {
                out.push_str(&format!(
                    "{},{:.4},{},{}\n",
                    d.id,
                    d.so,
                    d.predicted,
                    d.gold.map(|g| g.as_str()).unwrap_or("")
                ));
            }
            out
        }
        Format::Json => pretty(&json!(docs
            .iter()
            .map(|d| json!({
                "doc_id": d.id,
                "so": d.so,
                "predicted": d.predicted.as_str(),
                "gold": d.gold.map(|g| g.as_str()),
            }))
            .collect::<Vec<_>>())),
    }
}

/// Write to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|source| HarnessError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            print!("{}", content);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{AblationRow, CurvePoint};

    #[test]
    fn ablation_csv_header() {
        let table = AblationTable {
            columns: RuleSubset::COLUMNS.to_vec(),
            rows: vec![AblationRow {
                input: "malt".into(),
                accuracies: vec![75.0, 68.05, 70.0, 69.0, 68.5, 72.126],
            }],
        };
        let csv = ablation(&table, Format::Csv);
        assert_eq!(
            csv,
            "input,All,None,Intensification,but,if,Negation\nmalt,75.00,68.05,70.00,69.00,68.50,72.13\n"
        );
        let v: Value = serde_json::from_str(&ablation(&table, Format::Json)).unwrap();
        assert_eq!(v["rows"][0]["None"], json!(68.05));
        let keys: Vec<&String> = v["rows"][0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["input", "All", "None", "Intensification", "but", "if", "Negation"]);
    }

    #[test]
    fn undefined_precision_is_marked() {
        let scores = AttachmentScores {
            las: 0.5,
            uas: 0.5,
            la: 1.0,
            scored_tokens: 2,
        };
        let labels = vec![LabelPR {
            label: "neg".into(),
            precision: Ratio::Undefined,
            recall: Ratio::Defined(0.0),
            tp: 0,
            fp: 0,
            fn_: 1,
        }];
        let csv = evaluation(&scores, &labels, Format::Csv);
        assert!(csv.contains("neg,0.0000*,0.0000,0,0,1\n"));
        assert!(csv.contains(UNDEFINED_NOTE));
        let v: Value = serde_json::from_str(&evaluation(&scores, &labels, Format::Json)).unwrap();
        assert_eq!(v["labels"][0]["precision"], json!(0.0));
        assert_eq!(v["labels"][0]["precision_undefined"], json!(true));
    }

    #[test]
    fn curve_json_layout() {
        let series = CurveSeries {
            corpora: vec!["a".into()],
            points: vec![CurvePoint {
                target_las: 0.5,
                las: 0.5,
                uas: 0.7,
                la: 0.7,
                accuracy_by_corpus: vec![("a".into(), 81.234)],
            }],
        };
        let v: Value = serde_json::from_str(&curve(&series, Format::Json)).unwrap();
        assert_eq!(v[0]["las"], json!(0.5));
        assert_eq!(v[0]["accuracy_by_corpus"]["a"], json!(81.23));
        assert!(curve(&series, Format::Csv).starts_with("target_las,las,uas,la,a\n"));
    }
}
