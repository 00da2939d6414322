use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sheafkit::json::{self, Document};
use sheafkit::ratlin::parse_list;
use sheafkit::{encode, recoverability, FilterSpec, Morphism, Rational, Sheaf, Timeline};

mod report;

use report::Report;

#[derive(Parser)]
#[command(name = "sheafkit", version, about = "Cellular sheaves over simplicial complexes")]
struct Cli {
    /// Output format (JSON unless the command has a plainer natural form).
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Shorthand for `--format human`.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Human,
}

#[derive(Subcommand)]
enum Command {
    /// Basis of the global sections of a sheaf, or of a network's concentration sheaf.
    Sections { file: PathBuf },
    /// Check the sheaf axioms (for a morphism: both sheaves and every square).
    Validate { file: PathBuf },
    /// Check that a morphism's squares commute.
    MorphismCheck { file: PathBuf },
    /// Matrix of the induced map on global sections.
    Induced { file: PathBuf },
    /// Global sections of the kernel sheaf of a morphism, or of a network's sampling morphism.
    Ambiguity { file: PathBuf },
    /// Flow-network analyses.
    #[command(subcommand)]
    Flow(FlowCommand),
    /// FIR filters encoded as sheaf morphisms.
    #[command(subcommand)]
    Fir(FirCommand),
    #[command(name = "flow-check", hide = true)]
    FlowCheck { file: PathBuf },
    #[command(name = "fir-apply", hide = true)]
    FirApply(ApplyArgs),
    #[command(name = "fir-encode", hide = true)]
    FirEncode(EncodeArgs),
}

#[derive(Subcommand)]
enum FlowCommand {
    /// Decide whether the sensors determine every concentration. Exits 1 if not.
    Check { file: PathBuf },
}

#[derive(Subcommand)]
enum FirCommand {
    /// Filter an input sequence. A window of T outputs consumes T + N − 1 samples.
    Apply(ApplyArgs),
    /// Emit the sheaves and morphisms encoding a filter over a window.
    Encode(EncodeArgs),
}

#[derive(Args)]
struct ApplyArgs {
    /// Comma-separated taps h(0),…,h(N−1).
    #[arg(long, allow_hyphen_values = true)]
    taps: String,
    /// Comma-separated samples, oldest first; with `--value-dim d`, d entries per sample.
    #[arg(long, allow_hyphen_values = true)]
    input: String,
    #[arg(long, default_value_t = 1)]
    value_dim: usize,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long, allow_hyphen_values = true)]
    taps: String,
    /// Number of timeline vertices T.
    #[arg(long)]
    window: usize,
    #[arg(long, default_value_t = 1)]
    value_dim: usize,
    /// Write the encoding here instead of standard output.
    #[arg(long)]
    emit_sheaves: Option<PathBuf>,
}

/// Failure modes, each mapped to an exit code.
enum Failure {
    /// Malformed input, schema or axiom violation: exit 2.
    Input(String),
    /// A report was produced but it describes invalid data: exit 2.
    Invalid(Report),
    /// Analysis verdict "not recoverable": exit 1.
    Unrecoverable(Report),
}

impl From<sheafkit::Error> for Failure {
    fn from(e: sheafkit::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<Report, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = if cli.human { Some(Format::Human) } else { cli.format };
    match run(cli.command) {
        Ok(report) => {
            print(&report, format);
            ExitCode::SUCCESS
        }
        Err(Failure::Unrecoverable(report)) => {
            print(&report, format);
            ExitCode::from(1)
        }
        Err(Failure::Invalid(report)) => {
            print(&report, format);
            ExitCode::from(2)
        }
        Err(Failure::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn print(report: &Report, format: Option<Format>) {
    let out = match (format, &report.text) {
        (Some(Format::Json), _) | (None, None) => report.json() + "\n",
        (_, Some(text)) => format!("{text}\n"),
        (Some(Format::Human), None) => report.human(),
    };
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = io::stdout().lock().write_all(out.as_bytes());
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Sections { file } => sections(&load(&file)?),
        Command::Validate { file } => validate(&load(&file)?),
        Command::MorphismCheck { file } => morphism_check(&expect_morphism(load(&file)?)?),
        Command::Induced { file } => induced(&expect_morphism(load(&file)?)?),
        Command::Ambiguity { file } => ambiguity(&load(&file)?),
        Command::Flow(FlowCommand::Check { file }) | Command::FlowCheck { file } => flow_check(&load(&file)?),
        Command::Fir(FirCommand::Apply(args)) | Command::FirApply(args) => fir_apply(&args),
        Command::Fir(FirCommand::Encode(args)) | Command::FirEncode(args) => fir_encode(&args),
    }
}

fn load(path: &Path) -> Result<Document, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Document::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn expect_morphism(doc: Document) -> Result<Morphism, Failure> {
    match doc {
        Document::Morphism(m) => Ok(m),
        _ => Err(Failure::Input("$: expected a morphism document (with \"source\" and \"target\")".into())),
    }
}

fn sheaf_of(doc: &Document) -> Result<Sheaf, Failure> {
    match doc {
        Document::Sheaf(s) => Ok(s.clone()),
        Document::Network(net, _) => Ok(net.concentration_sheaf()),
        Document::Morphism(_) => Err(Failure::Input("$: expected a sheaf or flow network document".into())),
    }
}

fn sections(doc: &Document) -> Outcome {
    let sheaf = sheaf_of(doc)?;
    let space = sheaf.global_sections()?;
    let basis: Vec<Value> = space.basis().iter().map(json::section_to_json).collect();
    Ok(Report::new(json!({ "dimension": space.dimension(), "basis": basis })))
}

fn violation_json(v: &sheafkit::Violation) -> Value {
    use sheafkit::Violation::*;
    let faces = |fs: &[&sheafkit::Face]| fs.iter().map(|f| json::face_to_json(f)).collect::<Vec<_>>();
    match v {
        MissingRestriction { from, to } => {
            json!({ "kind": "missing", "faces": faces(&[from, to]), "message": v.to_string() })
        }
        ShapeMismatch { from, to, .. } => {
            json!({ "kind": "shape", "faces": faces(&[from, to]), "message": v.to_string() })
        }
        Composition { a, b, c } => {
            json!({ "kind": "composition", "faces": faces(&[a, b, c]), "message": v.to_string() })
        }
    }
}

fn square_json(v: &sheafkit::SquareViolation) -> Value {
    json!({
        "from": json::face_to_json(&v.from),
        "to": json::face_to_json(&v.to),
        "via_source": json::matrix_to_json(&v.via_source),
        "via_target": json::matrix_to_json(&v.via_target),
    })
}

fn validate(doc: &Document) -> Outcome {
    let value = match doc {
        Document::Morphism(m) => {
            let source: Vec<Value> = m.source().violations().iter().map(violation_json).collect();
            let target: Vec<Value> = m.target().violations().iter().map(violation_json).collect();
            let squares: Vec<Value> = if source.is_empty() && target.is_empty() {
                m.square_violations()?.iter().map(square_json).collect()
            } else {
                Vec::new()
            };
            let valid = source.is_empty() && target.is_empty() && squares.is_empty();
            json!({ "valid": valid, "source": source, "target": target, "squares": squares })
        }
        _ => {
            let violations: Vec<Value> = sheaf_of(doc)?.violations().iter().map(violation_json).collect();
            json!({ "valid": violations.is_empty(), "violations": violations })
        }
    };
    let report = Report::new(value);
    if report.value["valid"] == json!(true) {
        Ok(report)
    } else {
        Err(Failure::Invalid(report))
    }
}

fn morphism_check(m: &Morphism) -> Outcome {
    let squares: Vec<Value> = m.square_violations()?.iter().map(square_json).collect();
    let report = Report::new(json!({ "commutes": squares.is_empty(), "violations": squares }));
    if squares.is_empty() {
        Ok(report)
    } else {
        Err(Failure::Invalid(report))
    }
}

fn induced(m: &Morphism) -> Outcome {
    let map = m.induced_map()?;
    let basis = |s: &sheafkit::SectionSpace| s.basis().iter().map(json::section_to_json).collect::<Vec<_>>();
    Ok(Report::new(json!({
        "source_dimension": map.source_space.dimension(),
        "target_dimension": map.target_space.dimension(),
        "matrix": json::matrix_to_json(&map.matrix),
        "rank": map.rank(),
        "injective": map.is_injective(),
        "surjective": map.is_surjective(),
        "source_basis": basis(&map.source_space),
        "target_basis": basis(&map.target_space),
    })))
}

fn ambiguity(doc: &Document) -> Outcome {
    let m = match doc {
        Document::Morphism(m) => m.clone(),
        Document::Network(net, sensors) => sheafkit::sampling_morphism(&net.concentration_sheaf(), sensors)?,
        Document::Sheaf(_) => return Err(Failure::Input("$: expected a morphism or flow network document".into())),
    };
    let (kernel, embedding) = m.kernel_sheaf()?;
    let space = kernel.global_sections()?;
    let patterns: Vec<Value> = space
        .basis()
        .iter()
        .map(|s| embedding.apply(s).map(|s| json::section_to_json(&s)))
        .collect::<sheafkit::Result<_>>()?;
    let induced_kernel = m.kernel_of_induced()?.dimension();
    Ok(Report::new(json!({
        "dimension": space.dimension(),
        "induced_kernel_dimension": induced_kernel,
        "patterns": patterns,
    })))
}

fn flow_check(doc: &Document) -> Outcome {
    let Document::Network(net, sensors) = doc else {
        return Err(Failure::Input("$: expected a flow network document (with \"edges\")".into()));
    };
    let r = recoverability(&net.concentration_sheaf(), sensors)?;
    let report = Report::new(json!({
        "recoverable": r.recoverable,
        "section_dimension": r.section_dimension,
        "ambiguity_dimension": r.ambiguity_dimension,
        "induced_kernel_dimension": r.induced_kernel_dimension,
        "unrecoverable_patterns": r.unrecoverable_patterns.iter().map(json::section_to_json).collect::<Vec<_>>(),
    }));
    if r.recoverable {
        Ok(report)
    } else {
        Err(Failure::Unrecoverable(report))
    }
}

fn taps(s: &str) -> Result<Vec<Rational>, Failure> {
    parse_list(s).map_err(|e| Failure::Input(format!("--taps: {e}")))
}

fn fir_apply(args: &ApplyArgs) -> Outcome {
    let h = taps(&args.taps)?;
    let flat = parse_list(&args.input).map_err(|e| Failure::Input(format!("--input: {e}")))?;
    let d = args.value_dim;
    let spec = FilterSpec::new(h, d)?;
    if flat.len() % d != 0 {
        return Err(Failure::Input(format!("--input: {} entries do not split into samples of {d}", flat.len())));
    }
    let x: Vec<Vec<Rational>> = flat.chunks(d).map(<[Rational]>::to_vec).collect();
    if x.len() < spec.len() {
        return Err(Failure::Input(format!(
            "--input: {} samples, a filter with {} taps needs at least {}",
            x.len(),
            spec.len(),
            spec.len()
        )));
    }
    let window = Timeline::with_len(x.len() - spec.len() + 1)?;
    let y = encode(&spec, &window)?.apply(&x)?;
    let text = y.iter().flatten().map(Rational::to_string).collect::<Vec<_>>().join(",");
    let value = json!({ "output": y.iter().map(|v| json::vector_to_json(v)).collect::<Vec<_>>() });
    Ok(Report::plain(value, text))
}

fn fir_encode(args: &EncodeArgs) -> Outcome {
    let spec = FilterSpec::new(taps(&args.taps)?, args.value_dim)?;
    let enc = encode(&spec, &Timeline::with_len(args.window)?)?;
    let value = json::encoding_to_json(&enc);
    match &args.emit_sheaves {
        None => Ok(Report::new(value)),
        Some(path) => {
            let text = serde_json::to_string_pretty(&value).expect("JSON values serialize") + "\n";
            fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            Ok(Report::new(json!({
                "written": path.display().to_string(),
                "input_len": enc.input_len(),
                "output_len": enc.window.len(),
            })))
        }
    }
}
