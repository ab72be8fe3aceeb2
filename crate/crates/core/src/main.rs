use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use treesent::deptree::{write_conll, Treebank};
use treesent::eval::{all_label_pr, attachment_scores};
use treesent::harness::report::{self, ClassifiedDocument, Format};
use treesent::harness::{
    compare_systems, format_labels, load_treebank, parse_labels, run_ablation, run_curve, time_classification, Corpus,
    CorpusSpec, CurveSettings, ExperimentSpec, HarnessError, InputSpec,
};
use treesent::perturb::{perturb_treebank, PerturbationConfig};
use treesent::sentiment::{document_so, polarity_of, Lexicon, Rule, RuleSet, RuleSubset};
use treesent::synthetic::{self, SyntheticConfig};

#[derive(Parser)]
#[command(name = "treesent", version, about = "Dependency-tree sentiment and task-oriented parser evaluation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Output {
    /// Output format.
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Attachment scores and a per-label precision/recall table.
    Evaluate {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Leave PUNCT tokens out of the scores.
        #[arg(long)]
        exclude_punct: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Classify the documents of a treebank.
    Classify {
        #[arg(long)]
        treebank: PathBuf,
        #[arg(long)]
        lexicon: PathBuf,
        /// Rule parameters (JSON).
        #[arg(long)]
        ruleset: Option<PathBuf>,
        /// Labels file defining documents; without it every sentence is a
        /// document.
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Comma-separated rule subsets whose rules are enabled.
        #[arg(long, value_delimiter = ',')]
        rules: Option<Vec<RuleSubset>>,
        #[command(flatten)]
        output: Output,
    },
    /// Accuracy table over rule subsets for every input of an experiment.
    Ablate {
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated subsets (columns); defaults to the experiment's.
        #[arg(long, value_delimiter = ',')]
        rules: Option<Vec<RuleSubset>>,
        /// Also time each classification over 5 runs.
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Degrade a gold treebank towards a target LAS.
    Perturb {
        #[arg(long)]
        gold: PathBuf,
        /// Perturbation config (JSON); overridden by the flags below.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        target_las: Option<f64>,
        #[arg(long)]
        label_share: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Where to write the perturbed treebank.
        #[arg(long, short)]
        out: PathBuf,
        /// Where to write the JSON report; stdout by default.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// LAS vs. accuracy series from perturbed gold trees.
    Curve {
        #[arg(long)]
        spec: PathBuf,
        /// Offset added to every curve seed.
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Chi-squared comparison of two inputs.
    Compare {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Rule subset to classify with.
        #[arg(long, default_value = "All")]
        rules: RuleSubset,
        #[command(flatten)]
        output: Output,
    },
    /// Write a synthetic labelled corpus, its lexicon, perturbed inputs and
    /// an experiment spec.
    Synth {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 600)]
        documents: usize,
        #[arg(long, default_value_t = 2017)]
        seed: u64,
        /// Probability that a sentence agrees with its document's stance.
        #[arg(long)]
        agreement: Option<f64>,
        #[arg(long)]
        min_sentences: Option<usize>,
        #[arg(long)]
        max_sentences: Option<usize>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}

fn rules_for(base: RuleSet, subsets: &[RuleSubset]) -> RuleSet {
    let enabled: BTreeSet<Rule> = subsets.iter().flat_map(|s| s.rules()).collect();
    RuleSet { enabled, ..base }
}

fn run(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Evaluate {
            gold,
            pred,
            exclude_punct,
            output,
        } => {
            let gold = load_treebank(&gold)?;
            let pred = load_treebank(&pred)?;
            let align = |source| HarnessError::Alignment {
                input: pred.provenance.clone(),
                source,
            };
            let scores = attachment_scores(&gold, &pred, exclude_punct).map_err(align)?;
            let labels = all_label_pr(&gold, &pred).map_err(align)?;
            report::emit(output.out.as_deref(), &report::evaluation(&scores, &labels, output.format))
        }
        Command::Classify {
            treebank,
            lexicon,
            ruleset,
            labels,
            rules,
            output,
        } => {
            let tb = load_treebank(&treebank)?;
            let lex = Lexicon::load(&lexicon)?;
            let mut rule_set = match ruleset {
                Some(p) => RuleSet::from_json(&read(&p)?)?,
                None => RuleSet::all(),
            };
            if let Some(subsets) = rules {
                rule_set = rules_for(rule_set, &subsets);
            }
            let (documents, gold_known) = match labels {
                Some(p) => (parse_labels(&read(&p)?)?, true),
                None => (
                    Corpus::sentence_documents(&tb, treesent::PolarityLabel::Negative),
                    false,
                ),
            };
            let corpus = Corpus::new("corpus", tb, documents)?;
            let docs: Vec<ClassifiedDocument> = corpus
                .documents
                .iter()
                .map(|d| {
                    let so = document_so(&corpus.treebank.trees[d.sentences.clone()], &lex, &rule_set);
                    ClassifiedDocument {
                        id: d.id.clone(),
                        so: so.0,
                        predicted: polarity_of(so, &rule_set),
                        gold: gold_known.then_some(d.label),
                    }
                })
                .collect();
            report::emit(output.out.as_deref(), &report::classification(&docs, output.format))
        }
        Command::Ablate {
            spec,
            rules,
            timing,
            output,
        } => {
            let mut exp = ExperimentSpec::load(&spec)?;
            if let Some(subsets) = rules {
                exp.subsets = subsets;
            }
            let table = run_ablation(&exp)?;
            report::emit(output.out.as_deref(), &report::ablation(&table, output.format))?;
            if timing {
                let rows = time_classification(&exp)?;
                let text = report::timing(&rows, output.format);
                let path = output.out.as_deref().map(timing_path);
                report::emit(path.as_deref(), &text)?;
            }
            Ok(())
        }
        Command::Perturb {
            gold,
            config,
            target_las,
            label_share,
            seed,
            out,
            report: report_path,
        } => {
            let tb = load_treebank(&gold)?;
            let mut cfg = match config {
                Some(p) => serde_json::from_str::<PerturbationConfig>(&read(&p)?)
                    .map_err(|e| HarnessError::Spec(format!("{}: {}", p.display(), e)))?,
                None => PerturbationConfig::new(
                    target_las.ok_or_else(|| HarnessError::Spec("--target-las or --config is required".into()))?,
                    0.5,
                    0,
                ),
            };
            if let Some(t) = target_las {
                cfg.target_las = t;
            }
            if let Some(s) = label_share {
                cfg.label_error_share = s;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let (perturbed, rep) = perturb_treebank(&tb, &cfg)?;
            report::emit(Some(&out), &write_conll(&perturbed))?;
            report::emit(report_path.as_deref(), &report::perturbation(&rep))
        }
        Command::Curve { spec, seed, output } => {
            let exp = ExperimentSpec::load(&spec)?;
            let offset = seed.unwrap_or(exp.seed);
            let seeds: Vec<u64> = exp.curve.seeds.iter().map(|s| s.wrapping_add(offset)).collect();
            let series = run_curve(
                std::slice::from_ref(&exp.corpus),
                &exp.lexicon,
                &exp.rules,
                &exp.curve.targets,
                &exp.curve.template(),
                &seeds,
            )?;
            report::emit(output.out.as_deref(), &report::curve(&series, output.format))
        }
        Command::Compare {
            spec,
            a,
            b,
            rules,
            output,
        } => {
            let exp = ExperimentSpec::load(&spec)?;
            let result = compare_systems(&exp, &a, &b, rules)?;
            report::emit(
                output.out.as_deref(),
                &report::comparison(&result, &a, &b, rules, output.format),
            )
        }
        Command::Synth {
            out_dir,
            documents,
            seed,
            agreement,
            min_sentences,
            max_sentences,
        } => {
            let defaults = SyntheticConfig::default();
            let cfg = SyntheticConfig {
                documents,
                seed,
                agreement: agreement.unwrap_or(defaults.agreement),
                min_sentences: min_sentences.unwrap_or(defaults.min_sentences),
                max_sentences: max_sentences.unwrap_or(defaults.max_sentences),
            };
            write_synthetic(&out_dir, &cfg)
        }
    }
}

fn read(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn timing_path(out: &Path) -> PathBuf {
    let mut name = out.file_stem().unwrap_or_default().to_os_string();
    name.push(".timing.");
    name.push(out.extension().unwrap_or_else(|| "csv".as_ref()));
    out.with_file_name(name)
}

fn write_synthetic(dir: &Path, cfg: &SyntheticConfig) -> Result<(), HarnessError> {
    let seed = cfg.seed;
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| HarnessError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let corpus = synthetic::generate_corpus(cfg);
    let write = |name: &str, content: &str| report::emit(Some(&dir.join(name)), content);
    write("gold.conll", &write_conll(&corpus.treebank))?;
    write("labels.tsv", &format_labels(&corpus.documents))?;
    write("lexicon.tsv", &synthetic::lexicon().to_tsv())?;

    let mut inputs = vec![InputSpec {
        name: "gold".into(),
        treebank: "gold.conll".into(),
    }];
    for (name, target) in [("las92", 0.92), ("las85", 0.85), ("las50", 0.5)] {
        let (tb, _): (Treebank, _) = perturb_treebank(&corpus.treebank, &PerturbationConfig::new(target, 0.5, seed))?;
        let file = format!("{}.conll", name);
        write(&file, &write_conll(&tb))?;
        inputs.push(InputSpec {
            name: name.into(),
            treebank: file.into(),
        });
    }
    let spec = ExperimentSpec {
        corpus: CorpusSpec {
            name: corpus.name.clone(),
            treebank: "gold.conll".into(),
            labels: "labels.tsv".into(),
        },
        lexicon: "lexicon.tsv".into(),
        rules: None,
        subsets: None,
        inputs,
        seed,
        curve: Some(CurveSettings::default()),
    };
    let json = serde_json::to_string_pretty(&spec).expect("spec serializes") + "\n";
    write("experiment.json", &json)
}
