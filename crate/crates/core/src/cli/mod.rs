//! The `mbsp` command line.

pub mod experiments;
pub mod report;

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::chunker::{evaluate_chunks, make_window_instances, Chunker, ChunkerConfig};
use crate::corpus::{
    read_corpus, write_corpus, write_corpus_file, Columns, CorpusDocument, CorpusError,
};
use crate::mbl::{load_model, save_model, Algorithm, InstanceBase};
use crate::relations::{
    classes_from_pairs, relation_schema, sentence_instances, training_instances,
    RelationEvaluation, RelationMode, RelationModel, RelationTarget,
};
use experiments::{ChunkSource, RelationCvOptions};
use report::{chunk_metrics, relation_metrics, Metric};

#[derive(Debug, Parser)]
#[command(
    name = "mbsp",
    version,
    about = "Memory-based shallow parsing: chunking and subject/object detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Task {
    Chunks,
    Relations,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct WindowArgs {
    /// Tokens of context left of the focus.
    #[arg(long, default_value_t = 2)]
    pub left: usize,
    /// Tokens of context right of the focus.
    #[arg(long, default_value_t = 1)]
    pub right: usize,
    /// Five tokens left and three right.
    #[arg(long, conflicts_with_all = ["left", "right"])]
    pub wide: bool,
    /// Comma-separated subset of `words,pos`.
    #[arg(long, default_value = "words,pos")]
    pub features: String,
}

impl WindowArgs {
    pub fn config(&self, algorithm: Algorithm) -> Result<ChunkerConfig> {
        let (mut use_words, mut use_pos) = (false, false);
        for part in self.features.split(',').map(str::trim) {
            match part {
                "words" | "word" => use_words = true,
                "pos" => use_pos = true,
                _ => {
                    bail!("unknown feature set {part:?} in --features (expected words and/or pos)")
                }
            }
        }
        let (left, right) = if self.wide {
            (5, 3)
        } else {
            (self.left, self.right)
        };
        let config = ChunkerConfig {
            left_context: left,
            right_context: right,
            use_words,
            use_pos,
            algorithm,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Args)]
pub struct FoldArgs {
    /// Number of folds.
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn parse_beta(s: &str) -> Result<f64, String> {
    let beta: f64 = s.parse().map_err(|_| format!("invalid number {s:?}"))?;
    if beta.is_finite() && beta > 0.0 {
        Ok(beta)
    } else {
        Err("beta must be positive".to_string())
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a chunker on a corpus with gold chunk tags.
    TrainChunker {
        corpus: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "ib1ig")]
        algorithm: Algorithm,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Fill in the chunk-tag column of a corpus.
    Chunk {
        corpus: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare predicted chunk tags against gold ones.
    EvalChunks {
        gold: PathBuf,
        predicted: PathBuf,
        #[arg(long, default_value = "1", value_parser = parse_beta)]
        beta: f64,
    },
    /// Train a subject/object classifier on gold chunks and relations.
    TrainRelations {
        corpus: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "ib1ig")]
        algorithm: RelationMode,
        #[arg(long, default_value = "both")]
        target: RelationTarget,
    },
    /// Fill in the relation column of a chunked corpus.
    Relate {
        corpus: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Defaults to the kind of model stored in the file.
        #[arg(long)]
        algorithm: Option<RelationMode>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare predicted relations against gold ones.
    EvalRelations {
        gold: PathBuf,
        predicted: PathBuf,
        #[arg(long, default_value = "1", value_parser = parse_beta)]
        beta: f64,
    },
    /// Cross-validate the chunker.
    CvChunker {
        corpus: PathBuf,
        #[command(flatten)]
        folds: FoldArgs,
        #[arg(long, default_value = "ib1ig")]
        algorithm: Algorithm,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value = "1", value_parser = parse_beta)]
        beta: f64,
    },
    /// Cross-validate subject/object detection.
    CvRelations {
        corpus: PathBuf,
        #[command(flatten)]
        folds: FoldArgs,
        #[arg(long, default_value = "ib1ig")]
        algorithm: RelationMode,
        #[arg(long, default_value = "both")]
        target: RelationTarget,
        /// Chunk tags for test sentences: `gold` or `predicted`.
        #[arg(long, default_value = "gold")]
        chunks: ChunkSource,
        /// Learner for the chunker when `--chunks predicted`.
        #[arg(long, default_value = "igtree")]
        chunker_algorithm: Algorithm,
        #[arg(long, default_value = "1", value_parser = parse_beta)]
        beta: f64,
    },
    /// Print information-gain feature weights, highest first.
    IgReport {
        corpus: PathBuf,
        #[arg(long, value_enum, default_value_t = Task::Chunks)]
        task: Task,
        #[command(flatten)]
        window: WindowArgs,
        #[arg(long, default_value = "both")]
        target: RelationTarget,
    },
    /// Cross-validate the single-feature chunking baselines and the random
    /// and heuristic relation baselines.
    Baseline {
        corpus: PathBuf,
        #[command(flatten)]
        folds: FoldArgs,
        #[arg(long, value_enum, default_value_t = Task::All)]
        task: Task,
        /// Learner for the chunking baselines.
        #[arg(long, default_value = "ib1ig")]
        algorithm: Algorithm,
        #[arg(long, default_value = "both")]
        target: RelationTarget,
        #[arg(long, default_value = "1", value_parser = parse_beta)]
        beta: f64,
    },
}

fn read(path: &Path) -> Result<CorpusDocument> {
    match read_corpus(path) {
        Ok(doc) => Ok(doc),
        Err(e @ CorpusError::Io { .. }) => Err(e.into()),
        Err(e) => Err(anyhow::Error::new(e).context(format!("reading corpus {}", path.display()))),
    }
}

fn emit(
    doc: &CorpusDocument,
    columns: Columns,
    out_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<()> {
    match out_path {
        Some(path) => write_corpus_file(doc, path, columns)
            .with_context(|| format!("writing {}", path.display()))?,
        None => write_corpus(doc, out, columns)?,
    }
    Ok(())
}

fn has_relations(doc: &CorpusDocument) -> bool {
    doc.sentences
        .iter()
        .any(|s| s.tokens.iter().any(|t| !t.relations.is_empty()))
}

fn check_parallel(gold: &CorpusDocument, predicted: &CorpusDocument) -> Result<()> {
    if gold.sentences.len() != predicted.sentences.len() {
        bail!(
            "gold has {} sentences but prediction has {}",
            gold.sentences.len(),
            predicted.sentences.len()
        );
    }
    for (i, (g, p)) in gold.sentences.iter().zip(&predicted.sentences).enumerate() {
        if g.len() != p.len() {
            bail!(
                "sentence {}: gold has {} tokens but prediction has {}",
                i + 1,
                g.len(),
                p.len()
            );
        }
    }
    Ok(())
}

fn fold_rows<E>(
    folds: &[experiments::FoldResult<E>],
    metrics: impl Fn(&E) -> Vec<Metric>,
) -> Vec<(usize, Vec<Metric>)> {
    folds
        .iter()
        .map(|f| (f.test_sentences, metrics(&f.eval)))
        .collect()
}

fn header(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn window_description(config: &ChunkerConfig) -> Vec<(&'static str, String)> {
    let features: Vec<&str> = [(config.use_words, "words"), (config.use_pos, "pos")]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect();
    vec![
        ("algorithm", config.algorithm.to_string()),
        ("left", config.left_context.to_string()),
        ("right", config.right_context.to_string()),
        ("features", features.join(",")),
    ]
}

/// Runs one parsed command, writing reports to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::TrainChunker {
            corpus,
            model,
            algorithm,
            window,
        } => {
            let doc = read(&corpus)?;
            let config = window.config(algorithm)?;
            let chunker = Chunker::train(&doc.sentences, config)?;
            save_model(chunker.classifier(), &model)
                .with_context(|| format!("writing model {}", model.display()))?;
            writeln!(
                out,
                "trained {algorithm} chunker on {} tokens ({} sentences), {} features; model written to {}",
                doc.token_count(),
                doc.sentences.len(),
                config.feature_names().len(),
                model.display()
            )?;
        }
        Command::Chunk {
            corpus,
            model,
            window,
            out: out_path,
        } => {
            let mut doc = read(&corpus)?;
            let classifier =
                load_model(&model).with_context(|| format!("loading model {}", model.display()))?;
            let config = window.config(classifier.algorithm())?;
            let chunker = Chunker::from_classifier(classifier, config)?;
            let tags = chunker.tag_all(&doc.sentences.iter().collect::<Vec<_>>())?;
            for (sentence, tags) in doc.sentences.iter_mut().zip(&tags) {
                sentence.set_tags(tags);
            }
            let columns = if has_relations(&doc) {
                Columns::Full
            } else {
                Columns::Chunks
            };
            emit(&doc, columns, out_path.as_deref(), out)?;
        }
        Command::EvalChunks {
            gold,
            predicted,
            beta,
        } => {
            let gold_doc = read(&gold)?;
            let pred_doc = read(&predicted)?;
            check_parallel(&gold_doc, &pred_doc)?;
            let eval = evaluate_chunks(&gold_doc.sentences, &pred_doc.sentences)?;
            report::write_chunk_evaluation(out, &eval, gold_doc.sentences.len(), beta)?;
        }
        Command::TrainRelations {
            corpus,
            model,
            algorithm,
            target,
        } => {
            let doc = read(&corpus)?;
            let instances = training_instances(&doc.sentences, target)?;
            let trained = RelationModel::train(&instances, algorithm)?;
            let saved = trained.primary_classifier();
            save_model(&saved, &model)
                .with_context(|| format!("writing model {}", model.display()))?;
            writeln!(
                out,
                "trained {algorithm} relation model on {} instances ({} sentences); {} model written to {}",
                instances.len(),
                doc.sentences.len(),
                saved.algorithm(),
                model.display()
            )?;
        }
        Command::Relate {
            corpus,
            model,
            algorithm,
            out: out_path,
        } => {
            let mut doc = read(&corpus)?;
            let classifier =
                load_model(&model).with_context(|| format!("loading model {}", model.display()))?;
            let mode = algorithm.unwrap_or_else(|| classifier.algorithm().into());
            let relation_model = RelationModel::from_classifier(classifier, mode)?;
            let predictions = doc
                .sentences
                .par_iter()
                .enumerate()
                .map(|(i, s)| {
                    let chunks = s.chunks().ok_or_else(|| {
                        anyhow!("sentence {} has no complete chunk-tag column", i + 1)
                    })?;
                    Ok(relation_model.predict_relations(s, &chunks)?)
                })
                .collect::<Result<Vec<_>>>()?;
            for (sentence, pairs) in doc.sentences.iter_mut().zip(&predictions) {
                sentence.set_relation_pairs(pairs);
            }
            emit(&doc, Columns::Full, out_path.as_deref(), out)?;
        }
        Command::EvalRelations {
            gold,
            predicted,
            beta,
        } => {
            let gold_doc = read(&gold)?;
            let pred_doc = read(&predicted)?;
            check_parallel(&gold_doc, &pred_doc)?;
            let mut eval = RelationEvaluation::default();
            for (i, (g, p)) in gold_doc
                .sentences
                .iter()
                .zip(&pred_doc.sentences)
                .enumerate()
            {
                let chunks = p.chunks().or_else(|| g.chunks()).ok_or_else(|| {
                    anyhow!("sentence {} has no chunk tags in either file", i + 1)
                })?;
                let instances = sentence_instances(g, &chunks, RelationTarget::Both);
                let predicted_pairs = p.relation_pairs();
                eval.add_pairs(&g.relation_pairs(), &predicted_pairs);
                eval.add_instances(
                    &instances,
                    &classes_from_pairs(&instances, &predicted_pairs),
                );
            }
            report::write_relation_evaluation(out, &eval, gold_doc.sentences.len(), beta)?;
        }
        Command::CvChunker {
            corpus,
            folds,
            algorithm,
            window,
            beta,
        } => {
            let doc = read(&corpus)?;
            let config = window.config(algorithm)?;
            let results = experiments::cv_chunker(&doc, folds.k, folds.seed, config)?;
            let mut head = vec![
                ("task", "chunking".to_string()),
                ("sentences", doc.sentences.len().to_string()),
                ("k", folds.k.to_string()),
                ("seed", folds.seed.to_string()),
            ];
            head.extend(window_description(&config));
            head.push(("beta", beta.to_string()));
            report::write_cv_report(
                out,
                &header(&head),
                &fold_rows(&results, |e| chunk_metrics(e, beta)),
                &chunk_metrics(&experiments::micro_chunks(&results), beta),
            )?;
        }
        Command::CvRelations {
            corpus,
            folds,
            algorithm,
            target,
            chunks,
            chunker_algorithm,
            beta,
        } => {
            let doc = read(&corpus)?;
            let options = RelationCvOptions {
                mode: algorithm,
                target,
                chunks,
                chunker: ChunkerConfig {
                    algorithm: chunker_algorithm,
                    ..ChunkerConfig::default()
                },
            };
            let results = experiments::cv_relations(&doc, folds.k, folds.seed, options)?;
            let mut head = vec![
                ("task", "relations".to_string()),
                ("sentences", doc.sentences.len().to_string()),
                ("k", folds.k.to_string()),
                ("seed", folds.seed.to_string()),
                ("algorithm", algorithm.to_string()),
                ("target", format!("{target:?}").to_ascii_lowercase()),
                ("chunks", format!("{chunks:?}").to_ascii_lowercase()),
            ];
            if chunks == ChunkSource::Predicted {
                head.push(("chunker_algorithm", chunker_algorithm.to_string()));
            }
            head.push(("beta", beta.to_string()));
            report::write_cv_report(
                out,
                &header(&head),
                &fold_rows(&results, |e| relation_metrics(e, beta)),
                &relation_metrics(&experiments::micro_relations(&results), beta),
            )?;
        }
        Command::IgReport {
            corpus,
            task,
            window,
            target,
        } => {
            let doc = read(&corpus)?;
            let mut base = match task {
                Task::Chunks => {
                    let config = window.config(Algorithm::Ib1Ig)?;
                    let mut base = InstanceBase::new(config.schema()?);
                    for sentence in &doc.sentences {
                        for instance in make_window_instances(sentence, &config)? {
                            base.push(instance)?;
                        }
                    }
                    base
                }
                Task::Relations => InstanceBase::with_instances(
                    relation_schema(),
                    training_instances(&doc.sentences, target)?
                        .iter()
                        .map(|i| i.to_instance()),
                )?,
                Task::All => bail!("ig-report needs --task chunks or --task relations"),
            };
            base.compute_weights()?;
            let schema = base.schema();
            writeln!(out, "information gain over {} instances (bits)", base.len())?;
            writeln!(out)?;
            let mut entries = Vec::new();
            for (rank, f) in schema.order_by_weight().into_iter().enumerate() {
                let name = &schema.features()[f].name;
                let w = schema.weights()[f];
                writeln!(out, "{:>3}  {:<16} {:.4}", rank + 1, name, w)?;
                entries.push((format!("weight.{name}"), format!("{w:.6}")));
            }
            report::write_machine_block(out, &entries)?;
        }
        Command::Baseline {
            corpus,
            folds,
            task,
            algorithm,
            target,
            beta,
        } => {
            let doc = read(&corpus)?;
            writeln!(
                out,
                "baselines: {} sentences, k {}, seed {}",
                doc.sentences.len(),
                folds.k,
                folds.seed
            )?;
            let mut entries = Vec::new();
            if matches!(task, Task::Chunks | Task::All) {
                let mut rows = Vec::new();
                for (name, config) in [
                    ("focus-pos", ChunkerConfig::pos_baseline(algorithm)),
                    ("focus-word", ChunkerConfig::word_baseline(algorithm)),
                ] {
                    let results = experiments::cv_chunker(&doc, folds.k, folds.seed, config)?;
                    let per_fold = fold_rows(&results, |e| chunk_metrics(e, beta));
                    let mean = report::mean_metrics(
                        &per_fold.into_iter().map(|(_, m)| m).collect::<Vec<_>>(),
                    );
                    let label = format!("{name}/{algorithm}");
                    entries.extend(report::metric_entries(&format!("{label}.macro."), &mean));
                    rows.push((label, mean));
                }
                writeln!(out)?;
                report::write_table(out, "chunking (macro avg)", &rows)?;
            }
            if matches!(task, Task::Relations | Task::All) {
                let results =
                    experiments::cv_relation_baselines(&doc, folds.k, folds.seed, target)?;
                let mut rows = Vec::new();
                for (name, runs) in [
                    ("random", &results.random),
                    ("heuristic", &results.heuristic),
                ] {
                    let per_fold = fold_rows(runs, |e| relation_metrics(e, beta));
                    let mean = report::mean_metrics(
                        &per_fold.into_iter().map(|(_, m)| m).collect::<Vec<_>>(),
                    );
                    entries.extend(report::metric_entries(&format!("{name}.macro."), &mean));
                    rows.push((name.to_string(), mean));
                }
                writeln!(out)?;
                report::write_table(out, "relations (macro avg)", &rows)?;
            }
            report::write_machine_block(out, &entries)?;
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)?;
    execute(cli, out)
}

/// Entry point for the binary: returns the process exit code.
pub fn main_with_args(args: impl IntoIterator<Item = std::ffi::OsString>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let result = execute(cli, &mut out).and_then(|()| out.flush().map_err(Into::into));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("mbsp: error: {e:#}");
            1
        }
    }
}
