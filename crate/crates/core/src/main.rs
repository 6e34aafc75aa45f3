use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cm2::classifier::{explain, to_structured};
use cm2::eval::{evaluate, penalty_sweep, sweep_csv, validate_thetas};
use cm2::ingest::{parse_hocr, parse_keywords_csv, parse_words_xml};
use cm2::registry::{build_matrix_with_warnings, load_registry, save_registry};
use cm2::synth::{gen_corpus, read_corpus, write_corpus, SynthSpec};
use cm2::{classify, ClassifierConfig, CoordinateMatrix, Document, Error};

const EXIT_REJECTED: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_KEYWORD_MISSING: u8 = 3;

#[derive(Parser)]
#[command(
    name = "cm2",
    version,
    about = "One-shot document classification by keyword layout"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Register a class from one sample document and its keyword list.
    AddTemplate(AddTemplate),
    /// Classify a document against a registry.
    Classify(Classify),
    /// Score a labelled corpus at one maximum penalty.
    Evaluate(Evaluate),
    /// Score a labelled corpus at several maximum penalties.
    Sweep(Sweep),
    /// Generate a synthetic labelled corpus.
    GenCorpus(GenCorpus),
}

#[derive(Args, Clone, Copy)]
struct Matching {
    /// Largest vertical offset between tokens of one keyword phrase.
    #[arg(long, default_value_t = cm2::model::DEFAULT_LINE_TOLERANCE)]
    line_tolerance: u32,
    /// Largest horizontal gap between tokens of one keyword phrase.
    #[arg(long, default_value_t = cm2::model::DEFAULT_GAP_TOLERANCE)]
    gap_tolerance: u32,
    /// 1-based page searched for keywords.
    #[arg(long, default_value_t = 1)]
    page: u32,
}

impl Matching {
    fn config(self, max_penalty: u32) -> ClassifierConfig {
        ClassifierConfig {
            max_penalty,
            line_tolerance: self.line_tolerance,
            gap_tolerance: self.gap_tolerance,
            page_index: self.page,
        }
    }
}

#[derive(Args)]
struct AddTemplate {
    #[arg(long = "class")]
    class_id: String,
    /// Sample document (canonical XML, or hOCR for .hocr/.html/.xhtml).
    #[arg(long)]
    doc: PathBuf,
    /// Keyword CSV: one `keyword,value` record per line.
    #[arg(long)]
    keywords: PathBuf,
    /// Registry file, created if missing.
    #[arg(long)]
    registry: PathBuf,
    #[command(flatten)]
    matching: Matching,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Struct,
}

#[derive(Args)]
struct Classify {
    #[arg(long)]
    doc: PathBuf,
    #[arg(long)]
    registry: PathBuf,
    #[arg(long, default_value_t = cm2::model::DEFAULT_MAX_PENALTY)]
    max_penalty: u32,
    /// Append the per-keyword distance table (text format only).
    #[arg(long)]
    explain: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(flatten)]
    matching: Matching,
}

#[derive(Args)]
struct CorpusSource {
    /// Corpus directory as written by `gen-corpus`.
    #[arg(long)]
    corpus: PathBuf,
    /// Registry to classify against; built from the corpus templates if omitted.
    #[arg(long)]
    registry: Option<PathBuf>,
}

#[derive(Args)]
struct Evaluate {
    #[command(flatten)]
    source: CorpusSource,
    #[arg(long, default_value_t = cm2::model::DEFAULT_MAX_PENALTY)]
    max_penalty: u32,
    /// Directory for report.txt, per_class.csv and confusion.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    matching: Matching,
}

#[derive(Args)]
struct Sweep {
    #[command(flatten)]
    source: CorpusSource,
    /// Strictly increasing comma-separated maximum penalties.
    #[arg(long, value_delimiter = ',', required = true)]
    penalties: Vec<u32>,
    /// Directory for sweep.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    matching: Matching,
}

#[derive(Args)]
struct GenCorpus {
    #[arg(long)]
    seed: u64,
    /// Output directory; must not exist.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 53)]
    templates: usize,
    #[arg(long, default_value_t = 10)]
    instances: usize,
    #[arg(long, default_value_t = 4)]
    min_keywords: usize,
    #[arg(long, default_value_t = 8)]
    max_keywords: usize,
    #[arg(long, default_value_t = 20)]
    jitter: u32,
    #[arg(long, default_value_t = 0.1)]
    drop_prob: f64,
    #[arg(long, default_value_t = 40)]
    distractors: usize,
    #[arg(long, default_value_t = 500)]
    min_separation: u32,
    #[arg(long, default_value_t = 2480)]
    page_width: u32,
    #[arg(long, default_value_t = 3500)]
    page_height: u32,
    /// Let filler words reuse keyword tokens.
    #[arg(long)]
    collision_stress: bool,
}

fn read_file(path: &Path) -> Result<Vec<u8>, Error> {
    fs::read(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn load_document(path: &Path) -> Result<Document, Error> {
    let bytes = read_file(path)?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    match ext.as_deref() {
        Some("hocr" | "html" | "htm" | "xhtml") => {
            let id = path
                .file_stem()
                .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            parse_hocr(&bytes, &id)
        }
        _ => parse_words_xml(&bytes, &path.display().to_string()),
    }
}

fn load_registry_file(path: &Path) -> Result<CoordinateMatrix, Error> {
    let file =
        fs::File::open(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    load_registry(std::io::BufReader::new(file))
        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// Writes through a temporary sibling and renames it into place.
fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), Error> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Input(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp-{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = fs::write(&tmp, contents).and_then(|()| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

/// Writes several files into `dir`; on failure removes the ones already written.
fn write_outputs(dir: &Path, files: &[(&str, String)]) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::Input(format!("{}: {e}", dir.display())))?;
    for (i, (name, contents)) in files.iter().enumerate() {
        if let Err(e) = write_atomic(&dir.join(name), contents.as_bytes()) {
            for (written, _) in &files[..i] {
                let _ = fs::remove_file(dir.join(written));
            }
            return Err(e);
        }
    }
    Ok(())
}

fn add_template(args: AddTemplate) -> Result<u8, Error> {
    let cfg = args.matching.config(cm2::model::DEFAULT_MAX_PENALTY);
    let mut matrix = if args.registry.exists() {
        load_registry_file(&args.registry)?
    } else {
        CoordinateMatrix::new()
    };
    if matrix.contains_class(&args.class_id) {
        return Err(Error::Input(format!(
            "class {:?} is already registered in {}",
            args.class_id,
            args.registry.display()
        )));
    }
    let doc = load_document(&args.doc)?;
    let keywords = parse_keywords_csv(&read_file(&args.keywords)?, &args.class_id)
        .map_err(|e| Error::Input(format!("{}: {e}", args.keywords.display())))?;
    let (rows, warnings) = build_matrix_with_warnings([(&doc, keywords.as_slice())], &cfg)?;
    for w in &warnings {
        eprintln!(
            "warning: {:?} occurs {} times in {}; using {}",
            w.keyword,
            w.occurrences,
            args.doc.display(),
            w.chosen
        );
    }
    matrix.append(rows)?;
    let mut out = Vec::new();
    save_registry(&matrix, &mut out)?;
    write_atomic(&args.registry, &out)?;
    Ok(0)
}

fn classify_cmd(args: Classify) -> Result<u8, Error> {
    let cfg = args.matching.config(args.max_penalty);
    cfg.validate()?;
    let matrix = load_registry_file(&args.registry)?;
    let doc = load_document(&args.doc)?;
    let result = classify(&matrix, &doc, &cfg)?;
    let text = match args.format {
        Format::Struct => to_structured(&result),
        Format::Text => {
            let mut text = format!(
                "{} {}\n",
                result.predicted.as_deref().unwrap_or(cm2::REJECTED),
                result.score
            );
            if args.explain {
                text.push_str(&explain(&result));
            }
            text
        }
    };
    print_out(&text)?;
    Ok(if result.is_rejected() {
        EXIT_REJECTED
    } else {
        0
    })
}

fn print_out(text: &str) -> Result<(), Error> {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_bytes())?;
    stdout.flush()?;
    Ok(())
}

fn corpus_inputs(
    source: &CorpusSource,
    cfg: &ClassifierConfig,
) -> Result<(CoordinateMatrix, Vec<cm2::LabeledDoc>), Error> {
    let corpus = read_corpus(&source.corpus)?;
    let matrix = match &source.registry {
        Some(path) => load_registry_file(path)?,
        None => build_matrix_with_warnings(corpus.training_samples(), cfg)?.0,
    };
    Ok((matrix, corpus.test_set))
}

fn evaluate_cmd(args: Evaluate) -> Result<u8, Error> {
    let cfg = args.matching.config(args.max_penalty);
    cfg.validate()?;
    let (matrix, test_set) = corpus_inputs(&args.source, &cfg)?;
    let report = evaluate(&matrix, &test_set, &cfg)?;
    let text = report.to_text();
    if let Some(dir) = &args.out {
        write_outputs(
            dir,
            &[
                ("report.txt", text.clone()),
                ("per_class.csv", report.per_class_csv()),
                ("confusion.csv", report.confusion_csv()),
            ],
        )?;
    }
    print_out(&text)?;
    Ok(0)
}

fn sweep_cmd(args: Sweep) -> Result<u8, Error> {
    validate_thetas(&args.penalties)?;
    let cfg = args.matching.config(args.penalties[0]);
    cfg.validate()?;
    let (matrix, test_set) = corpus_inputs(&args.source, &cfg)?;
    let reports = penalty_sweep(&matrix, &test_set, &args.penalties, &cfg)?;
    let csv = sweep_csv(&reports);
    if let Some(dir) = &args.out {
        write_outputs(dir, &[("sweep.csv", csv.clone())])?;
    }
    print_out(&csv)?;
    Ok(0)
}

fn gen_corpus_cmd(args: GenCorpus) -> Result<u8, Error> {
    let spec = SynthSpec {
        n_templates: args.templates,
        instances_per_template: args.instances,
        keywords_per_template: args.min_keywords..=args.max_keywords,
        page_width: args.page_width,
        page_height: args.page_height,
        jitter: args.jitter,
        drop_prob: args.drop_prob,
        distractor_words: args.distractors,
        min_separation: args.min_separation,
        collision_stress: args.collision_stress,
        seed: args.seed,
    };
    let corpus = gen_corpus(&spec)?;
    write_corpus(&corpus, &args.out)?;
    print_out(&format!(
        "wrote {} templates, {} keywords, {} test documents to {}\n",
        corpus.templates.len(),
        corpus.total_keywords(),
        corpus.test_set.len(),
        args.out.display()
    ))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::AddTemplate(a) => add_template(a),
        Command::Classify(a) => classify_cmd(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Sweep(a) => sweep_cmd(a),
        Command::GenCorpus(a) => gen_corpus_cmd(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::KeywordNotFound { .. } => EXIT_KEYWORD_MISSING,
                _ => EXIT_INVALID,
            })
        }
    }
}
