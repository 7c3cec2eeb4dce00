//! Command-line front end: argument grammar, dispatch and JSON/CSV export.
//!
//! Exit status is 0 when every verification passes, 1 when a check fails or a
//! computation errors out, and 2 for usage errors.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::continuity::{
    linear_dilatation_with, modulus_estimate, quasi_inverse_check, verify_global_modulus_f, verify_global_modulus_h,
    verify_main_theorem, DEFAULT_QC_THRESHOLD,
};
use crate::deformations::{ConeMap, GluedMap, InverseOf};
use crate::energy::{
    biconformal_energy, conformal_energy_h, energy_f_monte_carlo, inner_distortion_integral, verify_energy_identity,
};
use crate::error::{Error, Result};
use crate::geometry::{ConePoint, NormKind};
use crate::report::{VerificationReport, SCHEMA_VERSION};
use crate::spec::{parse_center, parse_family, parse_radii, MapSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug, Serialize)]
#[command(name = "bicon", version, about = "Cone deformations, moduli of continuity and quasiconformality probes")]
pub struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub out: Format,

    /// Write the result here instead of standard output
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Worker threads (1 = sequential); results do not depend on it
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Cone,
    Euclid,
}

impl From<Norm> for NormKind {
    fn from(n: Norm) -> Self {
        match n {
            Norm::Cone => NormKind::Cone,
            Norm::Euclid => NormKind::Euclid,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Quad,
    Mc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    H,
    F,
}

/// Accepts `1e6` style counts.
fn count(s: &str) -> std::result::Result<usize, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: `{s}`"))?;
    if v >= 1.0 && v.fract() == 0.0 && v <= 1e15 {
        Ok(v as usize)
    } else {
        Err(format!("expected a positive whole number, got `{s}`"))
    }
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Sampled optimal modulus of continuity over a radius grid (CSV columns radius,value)
    Modulus {
        /// Map specifier, e.g. glued:phi=iterlog:k=2,alpha=1,n=2
        #[arg(long)]
        map: String,
        /// `0` or comma-separated coordinates (t last)
        #[arg(long, default_value = "0")]
        center: String,
        /// `log:a..b[:N]` or a comma list
        #[arg(long, default_value = "log:1e-6..1")]
        radii: String,
        #[arg(long, value_enum, default_value_t = Norm::Cone)]
        norm: Norm,
        /// Sphere samples per radius
        #[arg(long, default_value = "4096", value_parser = count)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Conformal energy of a cone map (or of its inverse), or the bi-conformal energy of a glued map
    Energy {
        #[arg(long)]
        map: String,
        #[arg(long, value_enum, default_value_t = Method::Quad)]
        method: Method,
        /// Which map of the pair: h, or its inverse f
        #[arg(long, value_enum, default_value_t = Target::H)]
        of: Target,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Monte-Carlo sample count
        #[arg(long, default_value = "1e6", value_parser = count)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Verification suites
    Verify {
        #[command(subcommand)]
        suite: Suite,
    },
    /// Linear dilatation on Euclidean spheres (CSV columns radius,ratio,verdict)
    Dilatation {
        #[arg(long)]
        map: String,
        #[arg(long, default_value = "0")]
        center: String,
        #[arg(long, default_value = "log:1e-3..0.5")]
        radii: String,
        #[arg(long, default_value = "4096", value_parser = count)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Ratio beyond which growing dilatation is reported as a violation
        #[arg(long, default_value_t = DEFAULT_QC_THRESHOLD)]
        threshold: f64,
    },
    /// Apply a map to a CSV point list (one point per row, t last)
    Eval {
        #[arg(long)]
        map: String,
        /// Input CSV with a header row; standard input if omitted
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Apply the inverse map to a CSV point list
    Invert {
        #[arg(long)]
        map: String,
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "suite", rename_all = "kebab-case")]
pub enum Suite {
    /// Normalisation, axis-attained optimal moduli and global moduli of the glued map
    MainTheorem {
        /// Family specifier, e.g. iterlog:k=2,alpha=1,n=2
        #[arg(long)]
        phi: String,
        #[arg(long, default_value = "log:1e-6..1")]
        radii: String,
        #[arg(long, default_value = "4096", value_parser = count)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Admissibility conditions of a family
    Conditions {
        #[arg(long)]
        phi: String,
        #[arg(long, default_value = "2048", value_parser = count)]
        grid: usize,
    },
    /// Global moduli of H (constant 4) and F (constant 3M near the origin)
    GlobalModulus {
        #[arg(long)]
        phi: String,
        #[arg(long, default_value = "1e5", value_parser = count)]
        pairs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Monte-Carlo energy of F against the inner-distortion integral of H
    EnergyIdentity {
        #[arg(long)]
        phi: String,
        #[arg(long, default_value = "1e6", value_parser = count)]
        samples: usize,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Allowed relative difference
        #[arg(long, default_value_t = 0.02)]
        relative: f64,
    },
    /// Composed ratios of the optimal moduli of a map and its inverse
    QuasiInverse {
        #[arg(long)]
        map: String,
        #[arg(long, default_value = "0")]
        center: String,
        #[arg(long, default_value = "log:1e-6..1")]
        radii: String,
        #[arg(long, value_enum, default_value_t = Norm::Cone)]
        norm: Norm,
        #[arg(long, default_value = "1024", value_parser = count)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest accepted ratio K (ratios must lie in [1/K, K])
        #[arg(long, default_value_t = 1e3)]
        bound: f64,
    },
}

/// CSV form of a result.
enum Artifact {
    Table { header: Vec<String>, rows: Vec<Vec<String>> },
}

struct Outcome {
    json: serde_json::Value,
    table: Artifact,
    passed: bool,
}

fn usage(flag: &str, err: Error) -> Error {
    match err {
        Error::Parse { what, input, reason } => Error::Parse { what, input, reason: format!("{reason} (in --{flag})") },
        other => other,
    }
}

fn report_rows(report: &VerificationReport) -> Artifact {
    Artifact::Table {
        header: ["condition", "pass", "measured_constant", "grid_size", "tolerance", "detail"].map(String::from).to_vec(),
        rows: report
            .checks
            .iter()
            .map(|c| {
                vec![
                    c.condition.clone(),
                    c.pass.to_string(),
                    c.measured_constant.map(|v| v.to_string()).unwrap_or_default(),
                    c.grid_size.to_string(),
                    c.tolerance.to_string(),
                    c.detail.clone(),
                ]
            })
            .collect(),
    }
}

fn report_outcome(report: VerificationReport) -> Result<Outcome> {
    Ok(Outcome { passed: report.passed(), table: report_rows(&report), json: serde_json::to_value(&report)? })
}

fn cone_phi(spec: &str) -> Result<ConeMap<f64>> {
    Ok(ConeMap::new(parse_family(spec).map_err(|e| usage("phi", e))?))
}

fn read_points(input: &Option<PathBuf>, n: usize) -> Result<Vec<ConePoint<f64>>> {
    let mut text = String::new();
    match input {
        Some(path) => text = std::fs::read_to_string(path)?,
        None => {
            std::io::stdin().read_to_string(&mut text)?;
        }
    }
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let coords = record
            .iter()
            .map(|v| v.parse::<f64>().map_err(|_| Error::parse("point", v, format!("row {}", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        if coords.len() != n {
            return Err(Error::parse("point", record.as_slice(), format!("row {} has {} coordinates, map needs {n}", i + 1, coords.len())));
        }
        points.push(ConePoint::from_coords(&coords)?);
    }
    Ok(points)
}

fn point_table(points: &[ConePoint<f64>], n: usize) -> Artifact {
    let mut header: Vec<String> = (1..n).map(|i| format!("x{i}")).collect();
    header.push("t".into());
    Artifact::Table { header, rows: points.iter().map(|p| p.coords().map(|c| c.to_string()).collect()).collect() }
}

fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Modulus { map, center, radii, norm, count, seed } => {
            let spec = MapSpec::parse(map).map_err(|e| usage("map", e))?;
            let h = spec.build();
            let center = parse_center(center, h.dim()).map_err(|e| usage("center", e))?;
            let radii = parse_radii(radii).map_err(|e| usage("radii", e))?;
            let est = modulus_estimate(h.as_ref(), &center, &radii, (*norm).into(), *count, *seed)?;
            let rows = est.radii.iter().zip(&est.values).map(|(r, v)| vec![r.to_string(), v.to_string()]).collect();
            Ok(Outcome {
                json: serde_json::to_value(&est)?,
                table: Artifact::Table { header: vec!["radius".into(), "value".into()], rows },
                passed: true,
            })
        }
        Command::Energy { map, method, of, tol, samples, seed } => {
            let spec = MapSpec::parse(map).map_err(|e| usage("map", e))?;
            let (json, rows) = match (spec, method, of) {
                (MapSpec::Cone(phi), Method::Quad, Target::H) => one_energy(conformal_energy_h(&ConeMap::new(phi), *tol)?)?,
                (MapSpec::Cone(phi), Method::Quad, Target::F) => one_energy(inner_distortion_integral(&ConeMap::new(phi), *tol)?)?,
                (MapSpec::Cone(phi), Method::Mc, Target::F) => one_energy(energy_f_monte_carlo(&ConeMap::new(phi), *samples, *seed)?)?,
                (MapSpec::Glued(phi), Method::Quad, _) => {
                    let e = biconformal_energy(&GluedMap::new(phi), *tol)?;
                    let rows = [("energy_h", &e.energy_h), ("energy_f", &e.energy_f), ("total", &e.total)]
                        .iter()
                        .map(|(name, r)| {
                            vec![name.to_string(), r.value.to_string(), r.samples_or_nodes.to_string(), r.error_estimate.to_string()]
                        })
                        .collect();
                    (serde_json::to_value(&e)?, rows)
                }
                _ => {
                    return Err(Error::InvalidParameter(
                        "energy supports cone maps (quad for h or f, mc for f) and glued maps with quad (in --map/--method/--of)".into(),
                    ))
                }
            };
            Ok(Outcome {
                json,
                table: Artifact::Table {
                    header: ["quantity", "value", "samples_or_nodes", "error_estimate"].map(String::from).to_vec(),
                    rows,
                },
                passed: true,
            })
        }
        Command::Verify { suite } => verify(suite),
        Command::Dilatation { map, center, radii, count, seed, threshold } => {
            let spec = MapSpec::parse(map).map_err(|e| usage("map", e))?;
            let h = spec.build();
            let center = parse_center(center, h.dim()).map_err(|e| usage("center", e))?;
            let radii = parse_radii(radii).map_err(|e| usage("radii", e))?;
            let est = linear_dilatation_with(h.as_ref(), &center, &radii, *count, *seed, *threshold)?;
            let verdict = serde_json::to_value(est.verdict)?.as_str().unwrap_or_default().to_string();
            let rows = est.radii.iter().zip(&est.ratios).map(|(r, v)| vec![r.to_string(), v.to_string(), verdict.clone()]).collect();
            Ok(Outcome {
                json: serde_json::to_value(&est)?,
                table: Artifact::Table { header: ["radius", "ratio", "verdict"].map(String::from).to_vec(), rows },
                passed: true,
            })
        }
        Command::Eval { map, input } | Command::Invert { map, input } => {
            let spec = MapSpec::parse(map).map_err(|e| usage("map", e))?;
            let h = spec.build();
            let n = h.dim();
            let points = read_points(input, n)?;
            let forward = matches!(command, Command::Eval { .. });
            let images = points
                .iter()
                .map(|p| if forward { h.eval(p) } else { h.inverse(p) })
                .collect::<Result<Vec<_>>>()?;
            Ok(Outcome { json: serde_json::to_value(&images)?, table: point_table(&images, n), passed: true })
        }
    }
}

fn one_energy(r: crate::energy::EnergyResult) -> Result<(serde_json::Value, Vec<Vec<String>>)> {
    let method = serde_json::to_value(r.method)?.as_str().unwrap_or_default().to_string();
    let rows = vec![vec![method, r.value.to_string(), r.samples_or_nodes.to_string(), r.error_estimate.to_string()]];
    Ok((serde_json::to_value(&r)?, rows))
}

fn verify(suite: &Suite) -> Result<Outcome> {
    match suite {
        Suite::MainTheorem { phi, radii, count, seed } => {
            let glued = GluedMap::new(parse_family(phi).map_err(|e| usage("phi", e))?);
            let radii = parse_radii(radii).map_err(|e| usage("radii", e))?;
            report_outcome(verify_main_theorem(&glued, &radii, *count, *seed)?)
        }
        Suite::Conditions { phi, grid } => {
            let phi = parse_family(phi).map_err(|e| usage("phi", e))?;
            report_outcome(phi.check_conditions(*grid)?)
        }
        Suite::GlobalModulus { phi, pairs, seed } => {
            let map = cone_phi(phi)?;
            let mut report = verify_global_modulus_h(&map, *pairs, *seed)?;
            report.extend(verify_global_modulus_f(&map, *pairs, *seed)?);
            report_outcome(report)
        }
        Suite::EnergyIdentity { phi, samples, tol, seed, relative } => {
            report_outcome(verify_energy_identity(&cone_phi(phi)?, *samples, *tol, *seed, *relative)?)
        }
        Suite::QuasiInverse { map, center, radii, norm, count, seed, bound } => {
            let spec = MapSpec::parse(map).map_err(|e| usage("map", e))?;
            let h = spec.build();
            let center = parse_center(center, h.dim()).map_err(|e| usage("center", e))?;
            let radii = parse_radii(radii).map_err(|e| usage("radii", e))?;
            let table = quasi_inverse_check(h.as_ref(), &InverseOf(h.as_ref()), &center, &radii, (*norm).into(), *count, *seed)?;
            let mut report = VerificationReport::new(format!("quasi-inverse, {}", h.describe())).with_seed(*seed);
            for (name, values) in [("h-after-f", &table.h_after_f), ("f-after-h", &table.f_after_h)] {
                let k = values.iter().map(|v| v.max(1.0 / v)).fold(1.0, f64::max);
                report.push(name, k <= *bound, Some(k), radii.len(), *bound, "largest max(ratio, 1/ratio) over the radii");
            }
            let mut outcome = report_outcome(report)?;
            outcome.json = serde_json::json!({ "report": outcome.json, "table": table });
            Ok(outcome)
        }
    }
}

fn render(cli: &Cli, outcome: Outcome) -> Result<Vec<u8>> {
    let config = serde_json::to_value(cli)?;
    match cli.out {
        Format::Json => {
            let doc = serde_json::json!({ "schema_version": SCHEMA_VERSION, "config": config, "result": outcome.json });
            let mut bytes = serde_json::to_vec_pretty(&doc)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let mut bytes = format!("# config: {}\n", serde_json::to_string(&config)?).into_bytes();
            let Artifact::Table { header, rows } = outcome.table;
            let mut writer = csv::Writer::from_writer(&mut bytes);
            writer.write_record(&header)?;
            for row in rows {
                writer.write_record(&row)?;
            }
            writer.flush()?;
            drop(writer);
            Ok(bytes)
        }
    }
}

fn emit(cli: &Cli, bytes: &[u8]) -> Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
    }
    Ok(())
}

fn failure_report(cli: &Cli, err: &Error) -> VerificationReport {
    let subject = serde_json::to_value(&cli.command)
        .ok()
        .and_then(|v| v.get("command").and_then(|c| c.as_str()).map(String::from))
        .unwrap_or_default();
    let mut report = VerificationReport::new(subject);
    report.push("run", false, None, 0, 0.0, err.to_string());
    report
}

/// Runs a parsed command line and returns the exit status.
pub fn run(cli: &Cli) -> i32 {
    let result = match cli.threads {
        Some(threads) => match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => Err(Error::InvalidParameter(format!("cannot start {threads} threads: {e}"))),
        },
        None => execute(&cli.command),
    };
    let outcome = match result {
        Ok(outcome) => outcome,
        Err(err @ (Error::Parse { .. } | Error::InvalidParameter(_))) => {
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
        Err(err) => {
            eprintln!("error: {err}");
            let report = failure_report(cli, &err);
            let outcome = Outcome {
                table: report_rows(&report),
                json: serde_json::to_value(&report).unwrap_or_default(),
                passed: false,
            };
            if let Ok(bytes) = render(cli, outcome) {
                let _ = emit(cli, &bytes);
            }
            return EXIT_FAILED;
        }
    };
    let passed = outcome.passed;
    match render(cli, outcome).and_then(|bytes| emit(cli, &bytes)) {
        Ok(()) if passed => EXIT_OK,
        Ok(()) => EXIT_FAILED,
        Err(err) => {
            eprintln!("error: {err}");
            EXIT_FAILED
        }
    }
}

/// Parses `args` and runs; usage errors exit with 2, `--help` and `--version` with 0.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}
