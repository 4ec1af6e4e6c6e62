//! Command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::fiber;
use crate::geometry::{self, ChartPoint};
use crate::hermitian;
use crate::models::{catalog, load_model};
use crate::report::{write_reports, Format};
use crate::suite::{run_defaults, run_on_model, Suite, SuiteConfig};

#[derive(Debug, Parser)]
#[command(name = "kahler-verify", version, about = "Verify curvature identities on Hermitian model manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a verification suite and emit one report per check.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Catalog name or path to a TOML model file; defaults to the suite's model list.
        #[arg(long)]
        model: Option<String>,
        /// Base points (or polynomials per case for prop31).
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Zero the runtime field so that runs are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Dump frame-indexed curvature at a point as JSON.
    Curvature {
        #[arg(long)]
        model: String,
        /// Comma-separated chart coordinates; defaults to the sampling center.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        chart: usize,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
        deriv_order: u8,
    },
    /// Dump fiber statistics of H at a point as JSON.
    Stats {
        #[arg(long)]
        model: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0)]
        chart: usize,
    },
    /// List catalog models.
    List,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Serialize)]
struct CurvatureDump<'a> {
    model: &'a str,
    curvature: &'a geometry::CurvatureData,
    complex_structure: Option<ndarray::Array2<f64>>,
    star: Option<hermitian::StarCurvature>,
}

fn resolve_point(model: &crate::models::ModelManifold, point: Option<Vec<f64>>, chart: usize) -> ChartPoint {
    ChartPoint::new(chart, point.unwrap_or_else(|| model.sampling_center()))
}

fn emit_json<T: Serialize>(value: &T) -> io::Result<()> {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    serde_json::to_writer_pretty(&mut lock, value)?;
    writeln!(lock)
}

/// Runs the CLI and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::List => {
            for e in catalog() {
                println!("{:<20} {}", e.name, e.description);
            }
            EXIT_OK
        }
        Command::Verify {
            suite,
            model,
            points,
            tol,
            seed,
            out,
            format,
            no_timing,
        } => {
            let cfg = SuiteConfig {
                points,
                tol,
                seed,
                timing: !no_timing,
            };
            let reports = match model {
                Some(name) => match load_model(&name) {
                    Ok(m) => run_on_model(suite, &m, &cfg),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_USAGE;
                    }
                },
                None => match run_defaults(suite, &cfg) {
                    Ok(r) => r,
                    Err(e) => {
                        eprintln!("error: {e}");
                        return EXIT_FAIL;
                    }
                },
            };
            let written = match out {
                Some(path) => File::create(&path)
                    .and_then(|f| write_reports(BufWriter::new(f), &reports, format)),
                None => write_reports(io::stdout().lock(), &reports, format),
            };
            if let Err(e) = written {
                eprintln!("error: cannot write reports: {e}");
                return EXIT_FAIL;
            }
            let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
            for r in &failed {
                if let Some(n) = &r.note {
                    eprintln!("FAIL {} [{}]: {n}", r.identity, r.model);
                }
            }
            if failed.is_empty() {
                EXIT_OK
            } else {
                EXIT_FAIL
            }
        }
        Command::Curvature {
            model,
            point,
            chart,
            deriv_order,
        } => {
            let m = match load_model(&model) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_USAGE;
                }
            };
            let p = resolve_point(&m, point, chart);
            let result = geometry::curvature(&m, &p, usize::from(deriv_order)).and_then(|c| {
                let j = hermitian::j_in_frame(&m, &p, &c.frame)?;
                let star = j.as_ref().map(|j| hermitian::star_curvature(&c, j)).transpose()?;
                Ok((c, j, star))
            });
            match result {
                Ok((c, j, star)) => {
                    let dump = CurvatureDump {
                        model: m.name(),
                        curvature: &c,
                        complex_structure: j,
                        star,
                    };
                    if emit_json(&dump).is_err() {
                        return EXIT_FAIL;
                    }
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_FAIL
                }
            }
        }
        Command::Stats { model, point, chart } => {
            let m = match load_model(&model) {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_USAGE;
                }
            };
            let p = resolve_point(&m, point, chart);
            match fiber::h_stats(&m, &p) {
                Ok(st) => {
                    if emit_json(&st).is_err() {
                        return EXIT_FAIL;
                    }
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_FAIL
                }
            }
        }
    }
}
