//! Timing of template building, sheet conversion and event validation
//! against input size.
//!
//! Each (function, size) point runs one untimed warm-up followed by the
//! configured number of timed runs on a monotonic clock; within each run
//! every size is timed once, in a seeded random order. Template
//! building finishes in microseconds, so each of its runs times a batch
//! of builds and reports the per-build mean.

use std::fmt::{self, Write as _};
use std::fs;
use std::hint::black_box;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::json_generator::{convert_sheet, serialize, ProducerInfo};
use crate::schema_model::parse_schema;
use crate::schema_validator::validate_events;
use crate::tabular_ingest::parse_sheet;
use crate::template_io::{render_bundle, TemplateBundle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BenchFunction {
    BuildTemplate,
    ParseToJson,
    Validate,
}

impl BenchFunction {
    pub const ALL: [BenchFunction; 3] = [
        BenchFunction::BuildTemplate,
        BenchFunction::ParseToJson,
        BenchFunction::Validate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchFunction::BuildTemplate => "buildTemplate",
            BenchFunction::ParseToJson => "parseToJSON",
            BenchFunction::Validate => "validate",
        }
    }

    /// Property counts for template building, event counts otherwise.
    pub fn default_sizes(self) -> Vec<usize> {
        match self {
            BenchFunction::BuildTemplate => (5..=25).step_by(5).collect(),
            _ => (1_000..=10_000).step_by(1_000).collect(),
        }
    }
}

impl fmt::Display for BenchFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchFunction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        BenchFunction::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown bench function {s:?} (expected buildTemplate, parseToJSON or validate)"))
    }
}

/// Population mean and standard deviation.
pub fn mean_stddev(samples: &[f64]) -> (f64, f64) {
    if samples.is_empty() {
        return (0.0, 0.0);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchResult {
    pub function: BenchFunction,
    pub size: usize,
    /// Milliseconds per run.
    pub runs: Vec<f64>,
    pub mean: f64,
    pub stddev: f64,
}

impl BenchResult {
    pub fn from_runs(function: BenchFunction, size: usize, runs: Vec<f64>) -> Self {
        let (mean, stddev) = mean_stddev(&runs);
        BenchResult {
            function,
            size,
            runs,
            mean,
            stddev,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `ys` on `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 || sxx == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    LinearFit {
        slope,
        intercept,
        r_squared,
    }
}

/// Adjacent pairs (ordered by size) whose mean time decreases.
pub fn mean_inversions(results: &[&BenchResult]) -> usize {
    let mut sorted: Vec<&&BenchResult> = results.iter().collect();
    sorted.sort_by_key(|r| r.size);
    sorted.windows(2).filter(|w| w[1].mean < w[0].mean).count()
}

/// Synthetic schema text plus a CSV of valid rows for it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticInput {
    pub schema: String,
    pub csv: String,
}

impl SyntheticInput {
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let schema = dir.join("synthetic.schema.json");
        let csv = dir.join("synthetic.csv");
        fs::write(&schema, &self.schema).map_err(|e| Error::io(&schema, e))?;
        fs::write(&csv, &self.csv).map_err(|e| Error::io(&csv, e))?;
        Ok((schema, csv))
    }
}

#[derive(Debug, Clone, Copy)]
enum LeafKind {
    Text,
    Number,
    Choice,
    Date,
    Integer,
    Flag,
    Timestamp,
    Email,
}

const LEAF_KINDS: [LeafKind; 8] = [
    LeafKind::Text,
    LeafKind::Number,
    LeafKind::Choice,
    LeafKind::Date,
    LeafKind::Integer,
    LeafKind::Flag,
    LeafKind::Timestamp,
    LeafKind::Email,
];

/// The first eight leaves of every synthetic schema: a weight event.
const WEIGHT_LEAVES: [(&str, &str); 8] = [
    ("animalId", "Animal ID"),
    ("weight", "Live Weight"),
    ("method", "Method"),
    ("weighDate", "Weigh Date"),
    ("ageMonths", "Age (months)"),
    ("fasted", "Fasted"),
    ("recordedAt", "Recorded At"),
    ("operator", "Operator Email"),
];

const METHODS: [&str; 3] = ["scale", "estimate", "tape"];

/// Builds a flat weight-like schema with `schema_size` leaves and a CSV
/// of `event_count` valid rows. Output depends only on the arguments.
pub fn generate_synthetic(schema_size: usize, event_count: usize, seed: u64) -> SyntheticInput {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut leaves: Vec<(String, String, LeafKind)> = Vec::with_capacity(schema_size);
    for i in 0..schema_size {
        let (name, header, kind) = match WEIGHT_LEAVES.get(i) {
            Some((n, h)) => (n.to_string(), h.to_string(), LEAF_KINDS[i]),
            None => (
                format!("prop{}", i + 1),
                format!("Property {}", i + 1),
                LEAF_KINDS[rng.gen_range(0..LEAF_KINDS.len())],
            ),
        };
        leaves.push((name, header, kind));
    }

    let mut properties = Map::new();
    for (name, header, kind) in &leaves {
        let mut prop = match kind {
            LeafKind::Text => json!({"type": "string"}),
            LeafKind::Number => json!({"type": "number"}),
            LeafKind::Choice => json!({"type": "string", "enum": METHODS}),
            LeafKind::Date => json!({"type": "string", "format": "date"}),
            LeafKind::Integer => json!({"type": "integer"}),
            LeafKind::Flag => json!({"type": "boolean"}),
            LeafKind::Timestamp => json!({"type": "string", "format": "date-time"}),
            LeafKind::Email => json!({"type": "string", "format": "email"}),
        };
        prop["displayName"] = json!(header);
        prop["description"] = json!(format!("{header} of the weighed animal."));
        properties.insert(name.clone(), prop);
    }
    let required: Vec<&str> = leaves.iter().take(2).map(|(n, _, _)| n.as_str()).collect();
    let schema = json!({
        "description": "weight",
        "type": "object",
        "required": required,
        "properties": properties,
    });
    let schema = serde_json::to_string_pretty(&schema).expect("schema serializes") + "\n";

    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let headers: Vec<&str> = leaves.iter().map(|(_, h, _)| h.as_str()).collect();
    writer.write_record(&headers).expect("in-memory write");
    for row in 0..event_count {
        let record: Vec<String> = leaves
            .iter()
            .enumerate()
            .map(|(i, (_, _, kind))| {
                // leave some optional cells blank
                if i >= 2 && rng.gen_ratio(1, 10) {
                    return String::new();
                }
                synthetic_cell(*kind, row, &mut rng)
            })
            .collect();
        writer.write_record(&record).expect("in-memory write");
    }
    let csv =
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("ASCII output");
    SyntheticInput { schema, csv }
}

fn synthetic_cell(kind: LeafKind, row: usize, rng: &mut ChaCha8Rng) -> String {
    match kind {
        LeafKind::Text => format!("NAUS{:08}", row * 7 + rng.gen_range(0..7)),
        LeafKind::Number => format!("{:.1}", rng.gen_range(150.0..750.0)),
        LeafKind::Choice => METHODS[rng.gen_range(0..METHODS.len())].to_owned(),
        LeafKind::Date => format!(
            "20{:02}-{:02}-{:02}",
            rng.gen_range(15..25),
            rng.gen_range(1..=12),
            rng.gen_range(1..=28)
        ),
        LeafKind::Integer => rng.gen_range(0..120).to_string(),
        LeafKind::Flag => if rng.gen_bool(0.5) { "true" } else { "false" }.to_owned(),
        LeafKind::Timestamp => format!(
            "2024-{:02}-{:02}T{:02}:{:02}:00Z",
            rng.gen_range(1..=12),
            rng.gen_range(1..=28),
            rng.gen_range(0..24),
            rng.gen_range(0..60)
        ),
        LeafKind::Email => format!(
            "op{}@station{}.com.au",
            rng.gen_range(1..50),
            rng.gen_range(1..9)
        ),
    }
}

#[derive(Debug, Clone)]
pub struct BenchPlan {
    pub functions: Vec<BenchFunction>,
    /// Overrides every function's default sizes when set.
    pub sizes: Option<Vec<usize>>,
    pub runs: usize,
    pub seed: u64,
    /// Builds timed per template-building run.
    pub template_batch: usize,
    /// Schema width used when sizing by event count.
    pub event_columns: usize,
}

impl Default for BenchPlan {
    fn default() -> Self {
        BenchPlan {
            functions: BenchFunction::ALL.to_vec(),
            sizes: None,
            runs: 10,
            seed: 42,
            template_batch: 200,
            event_columns: 8,
        }
    }
}

impl BenchPlan {
    pub fn sizes_for(&self, function: BenchFunction) -> Vec<usize> {
        self.sizes
            .clone()
            .unwrap_or_else(|| function.default_sizes())
    }
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub results: Vec<BenchResult>,
}

impl BenchReport {
    pub fn for_function(&self, function: BenchFunction) -> Vec<&BenchResult> {
        self.results
            .iter()
            .filter(|r| r.function == function)
            .collect()
    }

    /// Fit of mean time against size for one function.
    pub fn fit(&self, function: BenchFunction) -> Option<LinearFit> {
        let rs = self.for_function(function);
        if rs.len() < 2 {
            return None;
        }
        let xs: Vec<f64> = rs.iter().map(|r| r.size as f64).collect();
        let ys: Vec<f64> = rs.iter().map(|r| r.mean).collect();
        Some(linear_fit(&xs, &ys))
    }

    /// `function,size,run,ms` rows, then `mean` and `stddev` summary
    /// rows per point.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("function,size,run,ms\n");
        for r in &self.results {
            for (i, ms) in r.runs.iter().enumerate() {
                let _ = writeln!(out, "{},{},{},{:.6}", r.function, r.size, i + 1, ms);
            }
        }
        for r in &self.results {
            let _ = writeln!(out, "{},{},mean,{:.6}", r.function, r.size, r.mean);
            let _ = writeln!(out, "{},{},stddev,{:.6}", r.function, r.size, r.stddev);
        }
        out
    }
}

/// Runs every (function, size) point of `plan`.
pub fn run_bench(plan: &BenchPlan) -> Result<BenchReport> {
    assert!(plan.runs > 0, "bench plan needs at least one run");
    let mut report = BenchReport::default();
    for &function in &plan.functions {
        let sizes = plan.sizes_for(function);
        let mut workloads = sizes
            .iter()
            .map(|&size| match function {
                BenchFunction::BuildTemplate => build_template_workload(plan, size),
                BenchFunction::ParseToJson => parse_to_json_workload(plan, size),
                BenchFunction::Validate => validate_workload(plan, size),
            })
            .collect::<Result<Vec<_>>>()?;
        for w in &mut workloads {
            (w.body)()?;
        }
        // sizes interleave in a fresh order each run so slow spells of the
        // machine spread across points instead of biasing neighbours
        let mut order_rng = ChaCha8Rng::seed_from_u64(plan.seed);
        let mut order: Vec<usize> = (0..sizes.len()).collect();
        let mut samples = vec![Vec::with_capacity(plan.runs); sizes.len()];
        for _ in 0..plan.runs {
            order.shuffle(&mut order_rng);
            for &i in &order {
                samples[i].push(workloads[i].time()?);
            }
        }
        for (size, runs) in sizes.into_iter().zip(samples) {
            report
                .results
                .push(BenchResult::from_runs(function, size, runs));
        }
    }
    Ok(report)
}

struct Workload {
    per_run: usize,
    body: Box<dyn FnMut() -> Result<()>>,
}

impl Workload {
    /// Milliseconds per call, averaged over one batch.
    fn time(&mut self) -> Result<f64> {
        let start = Instant::now();
        for _ in 0..self.per_run {
            (self.body)()?;
        }
        Ok(start.elapsed().as_secs_f64() * 1_000.0 / self.per_run as f64)
    }
}

fn csv_error(source: csv::Error) -> Error {
    Error::Csv {
        path: PathBuf::from("synthetic.csv"),
        source,
    }
}

fn build_template_workload(plan: &BenchPlan, properties: usize) -> Result<Workload> {
    let input = generate_synthetic(properties, 0, plan.seed);
    Ok(Workload {
        per_run: plan.template_batch.max(1),
        body: Box::new(move || {
            let doc = parse_schema(&input.schema, "synthetic.schema.json")?;
            let bundle = TemplateBundle::from_schema(&doc)?;
            black_box(render_bundle(&bundle)?);
            Ok(())
        }),
    })
}

fn parse_to_json_workload(plan: &BenchPlan, events: usize) -> Result<Workload> {
    let input = generate_synthetic(plan.event_columns, events, plan.seed);
    let doc = parse_schema(&input.schema, "synthetic.schema.json")?;
    let bundle = TemplateBundle::from_schema(&doc)?;
    let producer = bench_producer();
    Ok(Workload {
        per_run: 1,
        body: Box::new(move || {
            let sheet = parse_sheet(input.csv.as_bytes(), b',').map_err(csv_error)?;
            let conversion = convert_sheet(
                &sheet,
                &bundle.columns,
                &bundle.row_template,
                &producer,
                &bundle.event_name,
            )
            .map_err(|issues| Error::PreconditionViolation { issues })?;
            black_box(serialize(&conversion.events, false));
            Ok(())
        }),
    })
}

fn validate_workload(plan: &BenchPlan, events: usize) -> Result<Workload> {
    let input = generate_synthetic(plan.event_columns, events, plan.seed);
    let doc = parse_schema(&input.schema, "synthetic.schema.json")?;
    let bundle = TemplateBundle::from_schema(&doc)?;
    let sheet = parse_sheet(input.csv.as_bytes(), b',').map_err(csv_error)?;
    let conversion = convert_sheet(
        &sheet,
        &bundle.columns,
        &bundle.row_template,
        &bench_producer(),
        &bundle.event_name,
    )
    .map_err(|issues| Error::PreconditionViolation { issues })?;
    let text = serialize(&conversion.events, false);
    Ok(Workload {
        per_run: 1,
        body: Box::new(move || {
            let value: Value = serde_json::from_str(&text).map_err(|source| Error::Parse {
                path: "synthetic events".to_owned(),
                source,
            })?;
            let report = validate_events(&value, &doc)?;
            debug_assert!(report.valid);
            black_box(report);
            Ok(())
        }),
    })
}

fn bench_producer() -> ProducerInfo {
    ProducerInfo {
        full_name: Some("Bench Producer".into()),
        email: Some("bench@example.com.au".into()),
        address: Some("1 Station Road".into()),
        phone: Some("0400 000 000".into()),
        pic: Some("NABC1234".into()),
    }
}
