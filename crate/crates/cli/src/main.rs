use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use leisheet_core::bench::{run_bench, BenchFunction, BenchPlan};
use leisheet_core::json_generator::convert_sheet;
use leisheet_core::schema_model::load_schema;
use leisheet_core::template_io::TemplateBundle;
use leisheet_core::{
    read_bundle, read_sheet, serialize, validate_events, write_bundle, Error, ProducerInfo,
};
use leisheet_service::{serve, ServiceConfig, ServiceError, DEFAULT_MAX_BODY_BYTES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Exit {
    Ok = 0,
    DataInvalid = 1,
    Schema = 2,
    Io = 3,
    Usage = 4,
}

impl From<Exit> for ExitCode {
    fn from(e: Exit) -> Self {
        ExitCode::from(e as u8)
    }
}

/// Failure with its exit status; the message goes to stderr.
struct Failure(Exit, String);

type CmdResult = Result<Exit, Failure>;

fn schema_failure(e: Error) -> Failure {
    match e {
        Error::Io { .. } => Failure(Exit::Io, e.to_string()),
        e => Failure(Exit::Schema, format!("{}: {e}", e.code())),
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure(Exit::Io, format!("{}: {e}", path.display()))
}

#[derive(Parser)]
#[command(
    name = "leisheet",
    version,
    about = "Spreadsheet templates and JSON events from JSON Schemas"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write template.csv and its manifest for a schema.
    Template {
        #[arg(long)]
        schema: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Convert a filled-in sheet into a JSON event array.
    Convert(ConvertArgs),
    /// Validate a JSON event array against a schema.
    Validate {
        #[arg(long)]
        schema: PathBuf,
        /// Event array file, or `-` for stdin.
        #[arg(long, default_value = "-")]
        input: String,
    },
    /// Run the HTTP validation service.
    Serve {
        #[arg(long, env = "PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "SCHEMA_DIR")]
        schema_dir: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_BODY_BYTES)]
        max_body_bytes: usize,
    },
    /// Time template building, conversion and validation.
    Bench {
        /// Comma-separated: buildTemplate, parseToJSON, validate.
        #[arg(long, value_delimiter = ',')]
        functions: Option<Vec<BenchFunction>>,
        /// Comma-separated sizes, overriding each function's defaults.
        #[arg(long, value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Report CSV path, or `-` for stdout.
        #[arg(long, default_value = "-")]
        out: String,
    },
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(
        long,
        conflicts_with = "template",
        required_unless_present = "template"
    )]
    schema: Option<PathBuf>,
    /// Directory written by `template`.
    #[arg(long)]
    template: Option<PathBuf>,
    #[arg(long)]
    data: PathBuf,
    /// JSON file with fullName, email, address, phone and pic.
    #[arg(long)]
    producer: Option<PathBuf>,
    /// Property identification code; overrides the producer file.
    #[arg(long)]
    pic: Option<String>,
    /// Output path, or `-` for stdout.
    #[arg(long, default_value = "-")]
    out: String,
    #[arg(long)]
    pretty: bool,
    #[arg(long, default_value_t = ',', value_parser = parse_delimiter)]
    delimiter: char,
}

fn parse_delimiter(s: &str) -> Result<char, String> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii() && c != '"' && c != '\n' && c != '\r' => Ok(c),
        _ => Err(format!(
            "delimiter must be a single ASCII character, got {s:?}"
        )),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                Exit::Usage
            } else {
                Exit::Ok
            }
            .into();
        }
    };
    let result = match cli.command {
        Command::Template { schema, out } => cmd_template(&schema, &out),
        Command::Convert(args) => cmd_convert(args),
        Command::Validate { schema, input } => cmd_validate(&schema, &input),
        Command::Serve {
            port,
            schema_dir,
            max_body_bytes,
        } => cmd_serve(ServiceConfig {
            port,
            schema_dir,
            max_body_bytes,
        }),
        Command::Bench {
            functions,
            sizes,
            runs,
            seed,
            out,
        } => cmd_bench(functions, sizes, runs as usize, seed, &out),
    };
    match result {
        Ok(code) => code.into(),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            code.into()
        }
    }
}

fn load_bundle_from_schema(path: &Path) -> Result<TemplateBundle, Failure> {
    let doc = load_schema(path).map_err(schema_failure)?;
    for w in &doc.warnings {
        eprintln!("warning: {w}");
    }
    TemplateBundle::from_schema(&doc).map_err(schema_failure)
}

fn cmd_template(schema: &Path, out: &Path) -> CmdResult {
    let bundle = load_bundle_from_schema(schema)?;
    let files = write_bundle(&bundle, out).map_err(schema_failure)?;
    eprintln!(
        "wrote {} ({} columns) and {}",
        files.csv.display(),
        bundle.columns.len(),
        files.manifest.display()
    );
    Ok(Exit::Ok)
}

fn load_producer(path: Option<&Path>, pic: Option<String>) -> Result<ProducerInfo, Failure> {
    let mut producer = match path {
        Some(p) => ProducerInfo::from_file(p).map_err(|e| match e {
            Error::Io { .. } => Failure(Exit::Io, e.to_string()),
            e => Failure(Exit::DataInvalid, format!("producer: {e}")),
        })?,
        None => ProducerInfo::default(),
    };
    if pic.is_some() {
        producer.pic = pic;
    }
    producer
        .normalized()
        .map_err(|e| Failure(Exit::DataInvalid, e.to_string()))
}

fn cmd_convert(args: ConvertArgs) -> CmdResult {
    let bundle = match (&args.schema, &args.template) {
        (Some(schema), _) => load_bundle_from_schema(schema)?,
        (None, Some(dir)) => read_bundle(dir).map_err(schema_failure)?,
        (None, None) => unreachable!("clap requires one source"),
    };
    let producer = load_producer(args.producer.as_deref(), args.pic)?;
    let sheet = read_sheet(&args.data, args.delimiter as u8).map_err(|e| match &e {
        Error::Csv { source, .. } if !source.is_io_error() => {
            Failure(Exit::DataInvalid, e.to_string())
        }
        _ => Failure(Exit::Io, e.to_string()),
    })?;

    let conversion = match convert_sheet(
        &sheet,
        &bundle.columns,
        &bundle.row_template,
        &producer,
        &bundle.event_name,
    ) {
        Ok(c) => c,
        Err(issues) => {
            for issue in &issues {
                eprintln!("{issue}");
            }
            return Err(Failure(
                Exit::DataInvalid,
                format!("{} issue(s); no output written", issues.len()),
            ));
        }
    };
    for w in &conversion.warnings {
        eprintln!("warning: {w}");
    }
    let mut text = serialize(&conversion.events, args.pretty);
    text.push('\n');
    write_output(&args.out, text.as_bytes())?;
    Ok(Exit::Ok)
}

fn write_output(out: &str, bytes: &[u8]) -> Result<(), Failure> {
    if out == "-" {
        let mut stdout = std::io::stdout().lock();
        return stdout
            .write_all(bytes)
            .and_then(|_| stdout.flush())
            .map_err(|e| io_failure(Path::new("<stdout>"), e));
    }
    let path = Path::new(out);
    std::fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

fn cmd_validate(schema: &Path, input: &str) -> CmdResult {
    let doc = load_schema(schema).map_err(schema_failure)?;
    let text = if input == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| io_failure(Path::new("<stdin>"), e))?;
        s
    } else {
        std::fs::read_to_string(input).map_err(|e| io_failure(Path::new(input), e))?
    };
    let events: serde_json::Value = serde_json::from_str(text.trim_start_matches('\u{feff}'))
        .map_err(|e| Failure(Exit::DataInvalid, format!("{input}: malformed JSON: {e}")))?;
    let report =
        validate_events(&events, &doc).map_err(|e| Failure(Exit::DataInvalid, e.to_string()))?;
    let mut out = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
    out.push('\n');
    write_output("-", out.as_bytes())?;
    Ok(if report.valid {
        Exit::Ok
    } else {
        Exit::DataInvalid
    })
}

fn cmd_serve(config: ServiceConfig) -> CmdResult {
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Failure(Exit::Io, format!("runtime: {e}")))?;
    let result = runtime.block_on(serve(config, |addr, registry| {
        for (path, reason) in &registry.skipped {
            eprintln!("warning: skipped {}: {reason}", path.display());
        }
        let names: Vec<&str> = registry.names().collect();
        eprintln!("listening on {addr}; schemas: {}", names.join(", "));
    }));
    match result {
        Ok(()) => Ok(Exit::Ok),
        Err(e @ ServiceError::NoSchemas { .. }) => Err(Failure(Exit::Schema, e.to_string())),
        Err(e @ ServiceError::Io { .. }) => Err(Failure(Exit::Io, e.to_string())),
    }
}

fn cmd_bench(
    functions: Option<Vec<BenchFunction>>,
    sizes: Option<Vec<usize>>,
    runs: usize,
    seed: u64,
    out: &str,
) -> CmdResult {
    let plan = BenchPlan {
        functions: functions.unwrap_or_else(|| BenchFunction::ALL.to_vec()),
        sizes,
        runs,
        seed,
        ..BenchPlan::default()
    };
    let report = run_bench(&plan).map_err(|e| Failure(Exit::DataInvalid, e.to_string()))?;
    write_output(out, report.to_csv().as_bytes())?;
    for &f in &plan.functions {
        if let Some(fit) = report.fit(f) {
            eprintln!(
                "{f}: slope {:.6} ms/unit, intercept {:.4} ms, R^2 {:.4}",
                fit.slope, fit.intercept, fit.r_squared
            );
        }
    }
    Ok(Exit::Ok)
}
