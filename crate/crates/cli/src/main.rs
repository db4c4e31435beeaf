use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dynheight::arithmetic::{certify_integral_model, integral_model, Caps, ExactRational};
use dynheight::complexdyn::{backward_orbit_complex_with, green_function, OrbitOptions};
use dynheight::heights::{height_sequence_with, HeightOptions};
use dynheight::mp::{BigComplex, MIN_BITS};
use dynheight::padic::{backward_orbit_padic, default_digits, verify_total_splitting};
use dynheight::pairing::{
    az_decomposition_estimate, az_pullback_sequence, BasePoint, PairingReport,
};
use dynheight::par;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

mod export;

use export::{key_values, orbit_rows, padic_rows, table, to_csv, HeightRow};

#[derive(Parser, Debug)]
#[command(
    name = "dynheight",
    version,
    about = "Heights and backward orbits of (x^p - x)/p"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Mantissa bits for complex arithmetic.
    #[arg(long, global = true, env = "DYNHEIGHT_BITS", default_value_t = 128)]
    bits: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Zero every elapsed-time field so repeated runs are byte-identical.
    #[arg(long, global = true)]
    no_timing: bool,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[arg(long, global = true, default_value_t = 1 << 16)]
    max_orbit: u64,

    #[arg(long, global = true, default_value_t = 1 << 16)]
    max_degree: u64,

    #[arg(long, global = true, default_value_t = 1 << 26)]
    max_coeff_bits: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Averaged heights of the roots of phi_p^n(x) = 1 for n = 1..n_max.
    Heights {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n_max: u32,
        /// Skip the integrality and p-adic splitting checks.
        #[arg(long)]
        no_certify: bool,
    },
    /// p-adic backward orbit of 1 and its total-splitting check.
    Padic {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: u32,
        /// Working digits K (default 64 + n).
        #[arg(long)]
        digits: Option<u32>,
        /// Include every leaf in JSON output.
        #[arg(long)]
        leaves: bool,
    },
    /// Complex backward-orbit leaves for plotting.
    Orbit {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        base_re: ExactRational,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        base_im: ExactRational,
    },
    /// Green's function at a rational point.
    Green {
        #[arg(long)]
        p: u32,
        #[arg(long, allow_hyphen_values = true)]
        re: ExactRational,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        im: ExactRational,
    },
    /// Arakelov-Zhang pairing estimate.
    Pairing {
        #[arg(long)]
        p: u32,
        #[arg(long, value_enum, default_value_t = Method::Pullback)]
        method: Method,
        /// Depth for the pullback estimate.
        #[arg(long, default_value_t = 14)]
        n: u32,
        /// Report every depth up to n instead of only n.
        #[arg(long)]
        sequence: bool,
        /// Unit-circle samples for the decomposition estimate.
        #[arg(long, default_value_t = 64)]
        samples: u64,
        #[arg(long, default_value = "41/100", allow_hyphen_values = true)]
        base_re: ExactRational,
        #[arg(long, default_value = "37/100", allow_hyphen_values = true)]
        base_im: ExactRational,
    },
    /// Coefficients of the integral model p^{e_n} (phi_p^n(x) - 1).
    Model {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Pullback,
    Decomposition,
}

/// The full input, echoed into every JSON report.
#[derive(Debug, Serialize, Deserialize)]
struct RunConfig {
    command: String,
    p: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_max: Option<u32>,
    bits: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    digits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    base_re: Option<ExactRational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    base_im: Option<ExactRational>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<Method>,
    format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    threads: Option<usize>,
    caps: Caps,
}

impl RunConfig {
    fn new(cli: &Cli, command: &str, p: u32) -> Self {
        RunConfig {
            command: command.into(),
            p,
            n: None,
            n_max: None,
            bits: cli.bits,
            digits: None,
            base_re: None,
            base_im: None,
            samples: None,
            method: None,
            format: cli.format,
            threads: cli.threads,
            caps: caps(cli),
        }
    }
}

fn caps(cli: &Cli) -> Caps {
    Caps {
        max_degree: cli.max_degree,
        max_coeff_bits: cli.max_coeff_bits,
        max_orbit: cli.max_orbit,
    }
}

#[derive(Debug)]
enum Failure {
    Core(dynheight::Error),
    Usage(String),
    Output(String),
}

impl From<dynheight::Error> for Failure {
    fn from(e: dynheight::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Output(e.to_string())
    }
}

/// A rendered report in whichever format was requested.
struct Rendered {
    json: Value,
    csv: String,
    table: String,
}

fn envelope(config: &RunConfig, body: Value) -> Value {
    let mut v = json!({ "config": config });
    if let (Value::Object(dst), Value::Object(src)) = (&mut v, body) {
        dst.extend(src);
    }
    v
}

fn fmt_f(x: f64) -> String {
    format!("{x:.12}")
}

fn fmt_e(x: f64) -> String {
    format!("{x:.3e}")
}

fn run(cli: &Cli) -> Result<Rendered, Failure> {
    if cli.bits < MIN_BITS {
        return Err(Failure::Usage(format!(
            "--bits must be at least {MIN_BITS}"
        )));
    }
    if cli.threads == Some(0) {
        return Err(Failure::Usage("--threads must be positive".into()));
    }
    par::configure_threads(cli.threads);
    let caps = caps(cli);
    let timing = |ms: u64| if cli.no_timing { 0 } else { ms };

    match &cli.command {
        Command::Heights {
            p,
            n_max,
            no_certify,
        } => {
            let mut cfg = RunConfig::new(cli, "heights", *p);
            cfg.n_max = Some(*n_max);
            let opts = HeightOptions {
                certify: !no_certify,
                caps,
                ..HeightOptions::new(cli.bits)
            };
            let mut reports = height_sequence_with(*p, *n_max, &opts)?;
            for r in &mut reports {
                r.elapsed_ms = timing(r.elapsed_ms);
            }
            let rows: Vec<HeightRow> = reports.iter().map(HeightRow::from).collect();
            let table_rows = reports
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.count.to_string(),
                        fmt_f(r.avg_height),
                        fmt_f(r.bound),
                        fmt_f(r.limit),
                        fmt_e(r.abs_error()),
                        fmt_e(r.max_residual),
                    ]
                })
                .collect::<Vec<_>>();
            Ok(Rendered {
                json: envelope(&cfg, json!({ "reports": reports })),
                csv: to_csv(&rows)?,
                table: table(
                    &[
                        "n",
                        "count",
                        "avg_height",
                        "bound",
                        "limit",
                        "abs_error",
                        "max_residual",
                    ],
                    &table_rows,
                ),
            })
        }
        Command::Padic {
            p,
            n,
            digits,
            leaves,
        } => {
            let k = digits.unwrap_or_else(|| default_digits(*n));
            let mut cfg = RunConfig::new(cli, "padic", *p);
            cfg.n = Some(*n);
            cfg.digits = Some(k);
            let orbit = backward_orbit_padic(*p, *n, k, &caps)?;
            let report = verify_total_splitting(&orbit);
            let rows = padic_rows(&orbit);
            let mut body = json!({ "report": report });
            if *leaves {
                body["leaves"] = json!(rows);
            }
            let table = key_values(&[
                ("p", report.p.to_string()),
                ("n", report.n.to_string()),
                ("digits", k.to_string()),
                ("count", report.count.to_string()),
                ("expected_count", report.expected_count.to_string()),
                ("distinct", report.distinct.to_string()),
                ("addresses_distinct", report.addresses_distinct.to_string()),
                ("min_forward_digits", report.min_forward_digits.to_string()),
                ("holds", report.holds.to_string()),
            ]);
            Ok(Rendered {
                json: envelope(&cfg, body),
                csv: to_csv(&rows)?,
                table,
            })
        }
        Command::Orbit {
            p,
            n,
            base_re,
            base_im,
        } => {
            let mut cfg = RunConfig::new(cli, "orbit", *p);
            cfg.n = Some(*n);
            cfg.base_re = Some(base_re.clone());
            cfg.base_im = Some(base_im.clone());
            let opts = OrbitOptions {
                caps,
                ..OrbitOptions::for_bits(cli.bits)
            };
            let target = BigComplex::from_rationals(base_re, base_im, cli.bits);
            let orbit = backward_orbit_complex_with(*p, *n, &target, cli.bits, &opts)?;
            let rows = orbit_rows(&orbit);
            let table_rows = rows
                .iter()
                .map(|r| {
                    vec![
                        r.address.clone(),
                        r.re.clone(),
                        r.im.clone(),
                        fmt_e(r.residual),
                    ]
                })
                .collect::<Vec<_>>();
            let summary = json!({
                "p": p,
                "n": n,
                "count": orbit.leaves.len(),
                "bits": orbit.bits,
                "max_residual": orbit.max_residual,
            });
            Ok(Rendered {
                json: envelope(&cfg, json!({ "report": summary, "leaves": rows })),
                csv: to_csv(&rows)?,
                table: table(&["address", "re", "im", "residual"], &table_rows),
            })
        }
        Command::Green { p, re, im } => {
            let mut cfg = RunConfig::new(cli, "green", *p);
            cfg.base_re = Some(re.clone());
            cfg.base_im = Some(im.clone());
            let z = BigComplex::from_rationals(re, im, cli.bits);
            let g = green_function(&z, *p, cli.bits)?;
            let report = json!({
                "p": p,
                "re": re,
                "im": im,
                "value": g.value,
                "status": g.status,
                "iterations_used": g.iterations_used,
                "truncation_bound": g.truncation_bound,
            });
            let status = serde_json::to_value(g.status).expect("status serializes");
            let status = status.as_str().unwrap_or_default().to_string();
            #[derive(Serialize)]
            struct Row<'a> {
                p: u32,
                re: String,
                im: String,
                value: f64,
                status: &'a str,
                iterations_used: usize,
                truncation_bound: f64,
            }
            let row = Row {
                p: *p,
                re: re.to_string(),
                im: im.to_string(),
                value: g.value,
                status: &status,
                iterations_used: g.iterations_used,
                truncation_bound: g.truncation_bound,
            };
            Ok(Rendered {
                json: envelope(&cfg, json!({ "report": report })),
                csv: to_csv(&[row])?,
                table: key_values(&[
                    ("z", format!("{re} + {im}i")),
                    ("value", format!("{:.15e}", g.value)),
                    ("status", status.clone()),
                    ("iterations_used", g.iterations_used.to_string()),
                    ("truncation_bound", fmt_e(g.truncation_bound)),
                ]),
            })
        }
        Command::Pairing {
            p,
            method,
            n,
            sequence,
            samples,
            base_re,
            base_im,
        } => {
            let mut cfg = RunConfig::new(cli, "pairing", *p);
            cfg.method = Some(*method);
            let mut reports: Vec<PairingReport> = match method {
                Method::Pullback => {
                    cfg.n = Some(*n);
                    cfg.base_re = Some(base_re.clone());
                    cfg.base_im = Some(base_im.clone());
                    let base = BasePoint::new(base_re.clone(), base_im.clone());
                    let all = az_pullback_sequence(*p, *n, &base, cli.bits, &caps)?;
                    if *sequence {
                        all
                    } else {
                        all.into_iter().last().into_iter().collect()
                    }
                }
                Method::Decomposition => {
                    cfg.samples = Some(*samples);
                    vec![az_decomposition_estimate(*p, *samples, cli.bits)?]
                }
            };
            for r in &mut reports {
                r.elapsed_ms = timing(r.elapsed_ms);
            }
            #[derive(Serialize)]
            struct Row {
                p: u32,
                method: String,
                depth: Option<u32>,
                samples: Option<u64>,
                estimate: f64,
                target: f64,
                abs_error: f64,
            }
            let rows: Vec<Row> = reports
                .iter()
                .map(|r| Row {
                    p: r.p,
                    method: format!("{method:?}").to_lowercase(),
                    depth: r.parameters.depth,
                    samples: r.parameters.samples,
                    estimate: r.estimate,
                    target: r.target,
                    abs_error: r.abs_error,
                })
                .collect();
            let table_rows = rows
                .iter()
                .map(|r| {
                    vec![
                        r.method.clone(),
                        r.depth.map(|d| d.to_string()).unwrap_or_default(),
                        r.samples.map(|d| d.to_string()).unwrap_or_default(),
                        fmt_f(r.estimate),
                        fmt_f(r.target),
                        fmt_e(r.abs_error),
                    ]
                })
                .collect::<Vec<_>>();
            let body = if reports.len() == 1 {
                json!({ "report": reports[0] })
            } else {
                json!({ "reports": reports })
            };
            Ok(Rendered {
                json: envelope(&cfg, body),
                csv: to_csv(&rows)?,
                table: table(
                    &[
                        "method",
                        "depth",
                        "samples",
                        "estimate",
                        "target",
                        "abs_error",
                    ],
                    &table_rows,
                ),
            })
        }
        Command::Model { p, n } => {
            let mut cfg = RunConfig::new(cli, "model", *p);
            cfg.n = Some(*n);
            let f = integral_model(*p, *n, &caps)?;
            let cert = certify_integral_model(*p, *n, 64.min(caps.max_degree), &caps)?;
            let coefficients: Vec<Value> = f
                .coeffs()
                .iter()
                .map(|c| {
                    serde_json::from_str(&c.to_string()).expect("integer literal is valid JSON")
                })
                .collect();
            let report = json!({
                "p": p,
                "n": n,
                "degree": f.degree(),
                "monic": f.is_monic(),
                "max_coeff_bits": f.max_coeff_bits(),
                "certificate": cert.status(),
                "coefficients": coefficients,
            });
            #[derive(Serialize)]
            struct Row {
                degree: usize,
                coefficient: String,
            }
            let rows: Vec<Row> = f
                .coeffs()
                .iter()
                .enumerate()
                .map(|(degree, c)| Row {
                    degree,
                    coefficient: c.to_string(),
                })
                .collect();
            Ok(Rendered {
                json: envelope(&cfg, json!({ "report": report })),
                csv: to_csv(&rows)?,
                table: format!("F_{n}(x) = {f}\n"),
            })
        }
    }
}

fn emit(cli: &Cli, out: &Rendered) -> Result<(), Failure> {
    let text = match cli.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&out.json).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => out.csv.clone(),
        Format::Table => out.table.clone(),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Output(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Output(e.to_string())),
    }
}

/// Exit status and message: 2 for bad input, 3 for a failed computation.
fn describe(f: Failure) -> (u8, String) {
    match f {
        Failure::Core(e) => (if e.is_validation() { 2 } else { 3 }, e.to_string()),
        Failure::Usage(m) => (2, m),
        Failure::Output(m) => (2, format!("cannot write report: {m}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|out| emit(&cli, &out)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = describe(f);
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
