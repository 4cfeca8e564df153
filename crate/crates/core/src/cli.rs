//! Command-line pipeline: build-grammar, select-basis, encode, explain, and
//! the eval subcommands. Every command is deterministic given its flags;
//! outputs embed a hash of the resolved configuration and the basis manifest
//! hash of their inputs.
//!
//! Exit codes: 0 success, 2 input/config error, 3 domain error (OOV, empty
//! pools), 4 numerical failure.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::basis::{sha256_hex, BasisSet, Manifest, SelectionConfig};
use crate::embedding::EmbeddingSpace;
use crate::encode;
use crate::error::{Error, Result};
use crate::eval::{analogy, classify, intrusion, tradeoff};
use crate::grammar::GrammarBasis;
use crate::lexicon::{Lexicon, Relation};
use crate::selection::DiversityAgg;
use crate::solver::SolverConfig;

#[derive(Parser)]
#[command(
    name = "sparse-embed",
    about = "Sparse word embeddings with inherently labeled dimensions",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the 11 grammatical basis vectors and write a basis manifest.
    BuildGrammar(BuildGrammarArgs),
    /// Filter candidates, greedily select basis words, extend the manifest.
    SelectBasis(SelectBasisArgs),
    /// Encode the vocabulary into sparse vectors.
    Encode(EncodeArgs),
    /// Print a word's labeled decomposition from an encoded file.
    Explain(ExplainArgs),
    /// Evaluations over encoded vectors.
    #[command(subcommand)]
    Eval(EvalCommand),
}

#[derive(Subcommand)]
enum EvalCommand {
    /// Sparsity vs reconstruction error over a list of alphas (CSV).
    Tradeoff(TradeoffArgs),
    /// 3CosAdd analogy accuracy, overall and per grammatical/semantic split.
    Analogy(AnalogyArgs),
    /// Generate word intrusion questions (JSON-lines, with and without hint).
    IntrusionGen(IntrusionArgs),
    /// Bag-of-words logistic regression train/test with coefficient report.
    Classify(ClassifyArgs),
}

#[derive(Args, Serialize)]
struct BuildGrammarArgs {
    /// Dense embedding file (word2vec/fastText text format).
    #[arg(long)]
    embeddings: PathBuf,
    /// Lexical annotation TSV.
    #[arg(long)]
    lexicon: PathBuf,
    /// Output manifest path (JSON).
    #[arg(long)]
    out: PathBuf,
    /// Vocabulary size to load.
    #[arg(long, default_value_t = 30_000)]
    limit: usize,
    /// Words used for the principal component and selection reference.
    #[arg(long, default_value_t = 30_000)]
    top_k: usize,
}

#[derive(Args, Serialize)]
struct SelectBasisArgs {
    /// Manifest written by build-grammar.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long)]
    lexicon: PathBuf,
    /// Extended manifest output path.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 30_000)]
    limit: usize,
    #[arg(long, default_value_t = 30_000)]
    top_k: usize,
    /// Number of basis words to select.
    #[arg(long, default_value_t = 3_000)]
    n_select: usize,
    /// Diversity weight aggregation: the formula's max, or min.
    #[arg(long, default_value = "max", value_parser = parse_agg)]
    diversity_agg: DiversityAgg,
}

#[derive(Args, Serialize)]
struct EncodeArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    embeddings: PathBuf,
    /// Sparse vector output file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.001)]
    clamp: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-7)]
    rel_tol: f64,
    #[arg(long, default_value_t = 30_000)]
    limit: usize,
    /// Worker threads; the output is identical regardless.
    #[arg(long, default_value_t = 1)]
    #[serde(skip)]
    threads: usize,
}

#[derive(Args, Serialize)]
struct ExplainArgs {
    /// Encoded sparse vector file.
    #[arg(long)]
    sparse: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    /// Word to decompose.
    word: String,
    /// Show only the strongest N terms.
    #[arg(long)]
    top: Option<usize>,
}

#[derive(Args, Serialize)]
struct TradeoffArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    embeddings: PathBuf,
    /// Comma-separated alphas, e.g. 0.05,0.1,0.2,0.35,0.6.
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<f64>,
    /// CSV output.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.001)]
    clamp: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    #[arg(long, default_value_t = 1e-7)]
    rel_tol: f64,
    #[arg(long, default_value_t = 30_000)]
    limit: usize,
    #[arg(long, default_value_t = 1)]
    #[serde(skip)]
    threads: usize,
}

#[derive(Args, Serialize)]
struct AnalogyArgs {
    /// questions-words.txt format file.
    #[arg(long)]
    questions: PathBuf,
    /// Vector space to evaluate.
    #[arg(long, value_parser = ["dense-cosine", "sparse-cosine", "reconstructed-cosine"])]
    mode: String,
    /// Dense embeddings (for dense-cosine).
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Encoded sparse file (for sparse-/reconstructed-cosine).
    #[arg(long)]
    sparse: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Evaluate the held-out half, or everything.
    #[arg(long, default_value = "test", value_parser = ["test", "all"])]
    split: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 30_000)]
    limit: usize,
}

#[derive(Args, Serialize)]
struct IntrusionArgs {
    #[arg(long)]
    sparse: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    /// Embeddings supply the frequency order for the candidate pool.
    #[arg(long)]
    embeddings: PathBuf,
    /// Output JSON-lines (with hint); a .nohint twin is written next to it.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    n_questions: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Candidate pool: this many most frequent words, filtered.
    #[arg(long, default_value_t = 20_000)]
    pool: usize,
    #[arg(long, default_value_t = 30_000)]
    limit: usize,
}

#[derive(Args, Serialize)]
struct ClassifyArgs {
    /// Training documents: label<TAB>text per line.
    #[arg(long)]
    train: PathBuf,
    /// Test documents in the same format.
    #[arg(long)]
    test: PathBuf,
    #[arg(long, value_parser = ["dense", "sparse", "reconstructed"])]
    mode: String,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    sparse: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    #[arg(long, default_value_t = 1e-4)]
    l2: f64,
    #[arg(long, default_value_t = 2000)]
    epochs: usize,
    /// Coefficients to show per class.
    #[arg(long, default_value_t = 10)]
    report_top: usize,
    /// Where to write the coefficient report (stdout when omitted).
    #[arg(long)]
    report_out: Option<PathBuf>,
    #[arg(long, default_value_t = 30_000)]
    limit: usize,
}

fn parse_agg(s: &str) -> std::result::Result<DiversityAgg, String> {
    DiversityAgg::parse(s).ok_or_else(|| format!("unknown aggregation {s:?} (use max or min)"))
}

fn config_hash<T: Serialize>(name: &str, args: &T) -> String {
    let body = serde_json::to_string(args).expect("args serialize");
    sha256_hex(format!("{name}:{body}").as_bytes())
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::BuildGrammar(args) => cmd_build_grammar(args),
        Command::SelectBasis(args) => cmd_select_basis(args),
        Command::Encode(args) => cmd_encode(args),
        Command::Explain(args) => cmd_explain(args),
        Command::Eval(EvalCommand::Tradeoff(args)) => cmd_tradeoff(args),
        Command::Eval(EvalCommand::Analogy(args)) => cmd_analogy(args),
        Command::Eval(EvalCommand::IntrusionGen(args)) => cmd_intrusion(args),
        Command::Eval(EvalCommand::Classify(args)) => cmd_classify(args),
    }
}

/// Loads an embedding file and preprocesses it unless the file already
/// carries preprocessed vectors.
fn load_preprocessed(path: &Path, limit: usize) -> Result<EmbeddingSpace> {
    let space = EmbeddingSpace::load(path, limit)?;
    if space.is_preprocessed() {
        Ok(space)
    } else {
        space.preprocess()
    }
}

fn effective_top_k(requested: usize, vocab: usize) -> usize {
    if requested > vocab {
        eprintln!("note: top_k {requested} exceeds vocabulary {vocab}; using {vocab}");
        vocab
    } else {
        requested
    }
}

fn cmd_build_grammar(args: BuildGrammarArgs) -> Result<()> {
    let hash = config_hash("build-grammar", &args);
    let space = load_preprocessed(&args.embeddings, args.limit)?;
    let lexicon = Lexicon::load(&args.lexicon)?;
    for relation in Relation::ALL {
        if lexicon.pairs(relation).is_empty() {
            return Err(Error::Format {
                path: args.lexicon.display().to_string(),
                message: format!(
                    "no {relation} pairs; is the \"## RELATIONS\" section missing?"
                ),
            });
        }
    }
    lexicon.resolve_pairs(&space)?;

    let top_k = effective_top_k(args.top_k, space.len());
    let basis = GrammarBasis::build(&space, &lexicon, top_k)?;

    println!("{:<16} contributors", "label");
    for (label, n) in basis.labels().iter().zip(basis.provenance()) {
        println!("{label:<16} {n}");
    }
    println!("max pairwise ortho dot: {:.3e}", basis.max_pairwise_dot());

    let manifest = Manifest::from_grammar(&basis, &hash);
    manifest.save(&args.out)?;
    println!("manifest hash: {}", manifest.hash());
    Ok(())
}

fn cmd_select_basis(args: SelectBasisArgs) -> Result<()> {
    let hash = config_hash("select-basis", &args);
    let mut manifest = Manifest::load(&args.manifest)?;
    let grammar = manifest.grammar_basis()?;
    let space = load_preprocessed(&args.embeddings, args.limit)?;
    if space.dim() != manifest.n_d() {
        return Err(Error::Config(format!(
            "embedding dimension {} does not match manifest n_d {}",
            space.dim(),
            manifest.n_d()
        )));
    }
    let lexicon = Lexicon::load(&args.lexicon)?;
    if args.n_select == 0 {
        return Err(Error::Config("n_select must be positive".into()));
    }

    let config = SelectionConfig {
        top_k: effective_top_k(args.top_k, space.len()),
        n_select: args.n_select,
        diversity_agg: args.diversity_agg,
    };
    let (set, report) = BasisSet::build(&space, &lexicon, grammar, &config)?;
    println!(
        "selected {} of {} candidates ({} flagged >50% length removed, {} dropped)",
        set.n_words(),
        report.kept.len(),
        report.flagged_count(),
        report.dropped.len()
    );
    for step in set.selection_trace().iter().take(5) {
        println!("  step {:>4}  {:<20} score {:.6}", step.step, step.word, step.score);
    }

    manifest.attach_words(
        set.word_labels().to_vec(),
        set.word_vectors().to_vec(),
        set.selection_trace().to_vec(),
        config,
        &hash,
    );
    manifest.save(&args.out)?;
    println!("manifest hash: {}", manifest.hash());
    Ok(())
}

fn cmd_encode(args: EncodeArgs) -> Result<()> {
    let hash = config_hash("encode", &args);
    let manifest = Manifest::load(&args.manifest)?;
    let basis = manifest.basis_set()?;
    let space = load_preprocessed(&args.embeddings, args.limit)?;
    if space.dim() != manifest.n_d() {
        return Err(Error::Config(format!(
            "embedding dimension {} does not match manifest n_d {}",
            space.dim(),
            manifest.n_d()
        )));
    }

    let config = SolverConfig {
        alpha: args.alpha,
        max_iter: args.max_iter,
        rel_tol: args.rel_tol,
        clamp: args.clamp,
    };
    let words = space.words().to_vec();
    let (vectors, stats) = encode::batch_encode(&words, &space, &basis, &config, args.threads)?;

    let mut collection = crate::sparse_io::SparseCollection::new(
        manifest.hash().to_string(),
        basis.n_words(),
    );
    collection.metadata.insert("alpha".into(), format!("{}", args.alpha));
    collection.metadata.insert("clamp".into(), format!("{}", args.clamp));
    collection.metadata.insert("rel_tol".into(), format!("{}", args.rel_tol));
    collection.metadata.insert("max_iter".into(), format!("{}", args.max_iter));
    collection.metadata.insert("config_hash".into(), hash);
    collection.metadata.insert("degenerate".into(), format!("{}", stats.degenerate));
    collection.metadata.insert(
        "iters_hist".into(),
        stats
            .iteration_histogram
            .iter()
            .map(|(b, c)| format!("{b}:{c}"))
            .collect::<Vec<_>>()
            .join(","),
    );
    collection
        .metadata
        .insert("mean_nnz_words".into(), format!("{:.4}", stats.mean_nnz_words));
    collection
        .metadata
        .insert("mean_error_sq".into(), format!("{:.6}", stats.mean_error_sq));
    collection.extend(vectors);
    collection.save(&args.out)?;

    println!(
        "encoded {} words: mean nnz {:.2}, mean squared error {:.4}, {} degenerate",
        collection.len(),
        stats.mean_nnz_words,
        stats.mean_error_sq,
        stats.degenerate
    );
    Ok(())
}

fn cmd_explain(args: ExplainArgs) -> Result<()> {
    let manifest = Manifest::load(&args.manifest)?;
    let basis = manifest.basis_set()?;
    let collection = crate::sparse_io::SparseCollection::load(&args.sparse, Some(manifest.hash()))?;
    let sv = collection
        .get(&args.word)
        .ok_or_else(|| Error::OutOfVocabulary(args.word.clone()))?;
    let terms = encode::explain(sv, &basis)?;
    println!("{}", encode::render_explanation(&args.word, &terms, args.top));
    Ok(())
}

fn cmd_tradeoff(args: TradeoffArgs) -> Result<()> {
    let hash = config_hash("eval-tradeoff", &args);
    let manifest = Manifest::load(&args.manifest)?;
    let basis = manifest.basis_set()?;
    let space = load_preprocessed(&args.embeddings, args.limit)?;
    if args.alphas.is_empty() {
        return Err(Error::Config("need at least one alpha".into()));
    }

    let base = SolverConfig {
        alpha: 1.0,
        max_iter: args.max_iter,
        rel_tol: args.rel_tol,
        clamp: args.clamp,
    };
    let words = space.words().to_vec();
    let points = tradeoff::tradeoff_curve(&words, &space, &basis, &args.alphas, &base, args.threads)?;

    let comments = vec![
        ("config_hash".to_string(), hash),
        ("basis".to_string(), manifest.hash().to_string()),
    ];
    let file = File::create(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let mut w = BufWriter::new(file);
    tradeoff::write_csv(&points, &comments, &mut w).map_err(|e| Error::io(&args.out, e))?;
    w.flush().map_err(|e| Error::io(&args.out, e))?;

    for p in &points {
        println!(
            "alpha {:>7}: mean nnz {:>8.2}, mean err^2 {:.5}, mean err {:.5}",
            p.alpha, p.mean_nnz, p.mean_error_sq, p.mean_error_l2
        );
    }
    Ok(())
}

fn load_eval_vectors(
    mode: &str,
    embeddings: &Option<PathBuf>,
    sparse: &Option<PathBuf>,
    manifest: &Option<PathBuf>,
    limit: usize,
) -> Result<analogy::AnalogyVectors> {
    match mode {
        "dense-cosine" => {
            let path = embeddings
                .as_ref()
                .ok_or_else(|| Error::Config("dense-cosine needs --embeddings".into()))?;
            let space = load_preprocessed(path, limit)?;
            Ok(analogy::AnalogyVectors::dense(&space))
        }
        "sparse-cosine" => {
            let (collection, _) = load_sparse_with_manifest(sparse, manifest)?;
            Ok(analogy::AnalogyVectors::sparse(&collection))
        }
        "reconstructed-cosine" => {
            let (collection, basis) = load_sparse_with_manifest(sparse, manifest)?;
            let basis = basis.ok_or_else(|| {
                Error::Config("reconstructed-cosine needs --manifest".into())
            })?;
            analogy::AnalogyVectors::reconstructed(&collection, &basis)
        }
        other => Err(Error::Config(format!("unknown mode {other:?}"))),
    }
}

fn load_sparse_with_manifest(
    sparse: &Option<PathBuf>,
    manifest: &Option<PathBuf>,
) -> Result<(crate::sparse_io::SparseCollection, Option<BasisSet>)> {
    let sparse = sparse
        .as_ref()
        .ok_or_else(|| Error::Config("this mode needs --sparse".into()))?;
    match manifest {
        Some(mpath) => {
            let manifest = Manifest::load(mpath)?;
            let basis = manifest.basis_set()?;
            let collection =
                crate::sparse_io::SparseCollection::load(sparse, Some(manifest.hash()))?;
            Ok((collection, Some(basis)))
        }
        None => {
            let collection = crate::sparse_io::SparseCollection::load(sparse, None)?;
            Ok((collection, None))
        }
    }
}

fn cmd_analogy(args: AnalogyArgs) -> Result<()> {
    let questions = analogy::load_questions(&args.questions)?;
    let questions = if args.split == "test" {
        analogy::test_split(questions, args.seed)
    } else {
        questions
    };
    let vectors = load_eval_vectors(&args.mode, &args.embeddings, &args.sparse, &args.manifest, args.limit)?;
    let report = analogy::analogy_eval(&questions, &vectors)?;
    println!(
        "answered {} (skipped {}): total {:.4}, grammatical {:.4} ({}), semantic {:.4} ({})",
        report.answered,
        report.skipped,
        report.accuracy(),
        report.gram_accuracy(),
        report.gram_answered,
        report.sem_accuracy(),
        report.sem_answered
    );
    Ok(())
}

fn blind_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("questions");
    let ext = out.extension().and_then(|s| s.to_str());
    let name = match ext {
        Some(ext) => format!("{stem}.nohint.{ext}"),
        None => format!("{stem}.nohint"),
    };
    out.with_file_name(name)
}

fn cmd_intrusion(args: IntrusionArgs) -> Result<()> {
    let hash = config_hash("eval-intrusion-gen", &args);
    let manifest = Manifest::load(&args.manifest)?;
    let basis = manifest.basis_set()?;
    let collection = crate::sparse_io::SparseCollection::load(&args.sparse, Some(manifest.hash()))?;
    let space = load_preprocessed(&args.embeddings, args.limit)?;

    let questions = intrusion::generate_intrusion_questions(
        &collection,
        &space,
        &basis,
        args.n_questions,
        args.seed,
        args.pool,
    )?;
    let meta = vec![
        ("config_hash".to_string(), hash),
        ("basis".to_string(), manifest.hash().to_string()),
        ("seed".to_string(), args.seed.to_string()),
    ];

    let file = File::create(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let mut w = BufWriter::new(file);
    intrusion::write_jsonl(&questions, true, &meta, &mut w).map_err(|e| Error::io(&args.out, e))?;
    w.flush().map_err(|e| Error::io(&args.out, e))?;

    let blind = blind_path(&args.out);
    let file = File::create(&blind).map_err(|e| Error::io(&blind, e))?;
    let mut w = BufWriter::new(file);
    intrusion::write_jsonl(&questions, false, &meta, &mut w).map_err(|e| Error::io(&blind, e))?;
    w.flush().map_err(|e| Error::io(&blind, e))?;

    println!(
        "wrote {} questions to {} and {}",
        questions.len(),
        args.out.display(),
        blind.display()
    );
    Ok(())
}

fn cmd_classify(args: ClassifyArgs) -> Result<()> {
    let train_docs = classify::load_documents(&args.train)?;
    let test_docs = classify::load_documents(&args.test)?;

    let manifest = match (&args.mode[..], &args.manifest) {
        ("dense", _) => None,
        (_, Some(mpath)) => Some(Manifest::load(mpath)?),
        (_, None) => None,
    };
    let collection;
    let basis;
    let space;
    let feature_space = match args.mode.as_str() {
        "dense" => {
            let path = args
                .embeddings
                .as_ref()
                .ok_or_else(|| Error::Config("dense mode needs --embeddings".into()))?;
            space = load_preprocessed(path, args.limit)?;
            classify::FeatureSpace::Dense(&space)
        }
        "sparse" => {
            let path = args
                .sparse
                .as_ref()
                .ok_or_else(|| Error::Config("sparse mode needs --sparse".into()))?;
            let expected = manifest.as_ref().map(|m| m.hash().to_string());
            collection = crate::sparse_io::SparseCollection::load(path, expected.as_deref())?;
            classify::FeatureSpace::Sparse { collection: &collection }
        }
        "reconstructed" => {
            let path = args
                .sparse
                .as_ref()
                .ok_or_else(|| Error::Config("reconstructed mode needs --sparse".into()))?;
            let m = manifest
                .as_ref()
                .ok_or_else(|| Error::Config("reconstructed mode needs --manifest".into()))?;
            collection = crate::sparse_io::SparseCollection::load(path, Some(m.hash()))?;
            basis = m.basis_set()?;
            classify::FeatureSpace::reconstructed(&collection, &basis)?
        }
        other => return Err(Error::Config(format!("unknown mode {other:?}"))),
    };

    let train = classify::build_dataset(&train_docs, &feature_space);
    let test = classify::build_dataset(&test_docs, &feature_space);
    if train.all_oov > 0 {
        eprintln!("note: {} training documents were entirely out of vocabulary", train.all_oov);
    }

    let config = classify::LogRegConfig {
        step: args.step,
        l2: args.l2,
        max_epochs: args.epochs,
        rel_tol: 1e-6,
    };
    let clf = classify::train_logreg(&train, &config)?;

    // test labels must index into the training class list
    let mut test_correct = 0usize;
    for (f, &l) in test.features.iter().zip(&test.labels) {
        if clf.predict(f) == test.classes[l] {
            test_correct += 1;
        }
    }
    let test_acc = test_correct as f64 / test.features.len().max(1) as f64;
    println!("train accuracy: {:.4}", clf.accuracy(&train));
    println!("test accuracy: {:.4}", test_acc);

    let label_of: Box<dyn Fn(usize) -> String> = match &feature_space {
        classify::FeatureSpace::Sparse { .. } => {
            let m = manifest
                .as_ref()
                .ok_or_else(|| Error::Config("sparse coefficient report needs --manifest".into()))?;
            let basis = m.basis_set()?;
            Box::new(move |d| basis.label(d).unwrap_or("?").to_string())
        }
        _ => Box::new(|d| format!("dim-{d}")),
    };
    let report = clf.coefficient_report(&label_of, args.report_top);
    match &args.report_out {
        Some(path) => {
            std::fs::write(path, &report).map_err(|e| Error::io(path, e))?;
            println!("coefficient report written to {}", path.display());
        }
        None => print!("{report}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn config_hash_ignores_threads() {
        let make = |threads: usize| EncodeArgs {
            manifest: "m.json".into(),
            embeddings: "e.txt".into(),
            out: "o.sparse".into(),
            alpha: 0.35,
            clamp: 0.001,
            max_iter: 1000,
            rel_tol: 1e-7,
            limit: 100,
            threads,
        };
        assert_eq!(
            config_hash("encode", &make(1)),
            config_hash("encode", &make(8))
        );
    }

    #[test]
    fn blind_path_inserts_nohint() {
        assert_eq!(
            blind_path(Path::new("/tmp/q.jsonl")),
            PathBuf::from("/tmp/q.nohint.jsonl")
        );
        assert_eq!(blind_path(Path::new("q")), PathBuf::from("q.nohint"));
    }
}
