//! `matroidc`: dimension tables, differential matrices, homology and identity
//! checks for the oriented matroid complexes.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use matroidc_core::complexes::{chain_basis, differential_matrix, verify_anticommute, verify_duality, verify_square_zero, Report};
use matroidc_core::enumerate::{enumerate_all, MAX_ENUMERATED};
use matroidc_core::hopf::{connected_dim_check, verify_homotopy, verify_hopf};
use matroidc_core::linalg::{default_primes, homology_at, homology_table, RankOptions};
use matroidc_core::source::format_mtrd;
use matroidc_core::{ComplexSpec, DifferentialKind, Error, MatroidSource};

#[derive(Parser)]
#[command(name = "matroidc", version, about = "Deletion/contraction complexes of oriented matroid classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Comma-separated property tags, `connected`, or `all`.
    #[arg(long, default_value = "all")]
    spec: String,
    /// Census file or directory; degrees it lacks fall back to the enumerator.
    #[arg(long, env = "MATROIDC_DB_DIR")]
    source: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Mm,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Square,
    Anticommute,
    Hopf,
    Homotopy,
    Duality,
    Freealg,
}

#[derive(Subcommand)]
enum Command {
    /// Chain-group dimensions per (n, r).
    Dims {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 7)]
        max_n: usize,
    },
    /// Betti numbers of one differential.
    Homology {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "del")]
        kind: String,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        /// A single cell `n,r`.
        #[arg(long)]
        bidegree: Option<String>,
        /// Exact rational ranks only.
        #[arg(long)]
        exact: bool,
        /// Number of 62-bit primes for the modular pass.
        #[arg(long, default_value_t = 3)]
        primes: usize,
    },
    /// Identity checks; exits 1 on any failure.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        max_n: Option<usize>,
        /// Restrict the square suite to one differential.
        #[arg(long)]
        kind: Option<String>,
    },
    /// All classes on n elements as MTRD.
    Enumerate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n: usize,
    },
    /// The differential out of degree n as a Matrix Market file.
    ExportMatrix {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "del")]
        kind: String,
        #[arg(long)]
        n: usize,
    },
    /// Loads and validates a census, then reports its coverage.
    IngestCheck {
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Verification,
    Config(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::SourceIncomplete { .. } | Error::DegreeTooLarge(_) | Error::Io(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("matroidc: {e}");
            if let Error::InvalidRecord { source, .. } = &e {
                eprintln!("  caused by: {source}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

fn source_for(common: &Common) -> Result<MatroidSource, Error> {
    let builtin = MatroidSource::enumerator(MAX_ENUMERATED)?;
    match &common.source {
        Some(p) => Ok(MatroidSource::layered(vec![MatroidSource::from_path(p)?, builtin])),
        None => Ok(builtin),
    }
}

fn setup(common: &Common) -> Result<(), Error> {
    if let Some(t) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Io(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn emit(common: &Common, text: &str) -> Result<(), Error> {
    match &common.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn parse_bidegree(s: &str) -> Result<(usize, usize), Error> {
    let bad = || Error::ParseError { line: 0, msg: format!("bidegree `{s}` is not `n,r`") };
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn json<T: serde::Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn finish_report(common: &Common, report: &Report) -> Result<(), Failure> {
    emit(common, &report.to_string())?;
    if report.all_pass() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Dims { common, max_n } => {
            setup(&common)?;
            let spec = ComplexSpec::parse(&common.spec)?;
            let src = source_for(&common)?;
            let mut rows = Vec::new();
            for n in 0..=max_n {
                let b = chain_basis(n, &spec, &src)?;
                for r in 0..=n {
                    rows.push((n, r, b.positions_of_rank(r).len()));
                }
            }
            let text = match common.format {
                Format::Json => json(
                    &rows
                        .iter()
                        .map(|&(n, r, dim)| serde_json::json!({"spec": spec.to_string(), "n": n, "r": r, "dim": dim}))
                        .collect::<Vec<_>>(),
                ),
                _ => {
                    let mut s = String::from("spec,n,r,dim\n");
                    for (n, r, dim) in rows {
                        s.push_str(&format!("{},{n},{r},{dim}\n", quote(&spec.to_string())));
                    }
                    s
                }
            };
            emit(&common, &text)?;
        }
        Command::Homology { common, kind, max_n, bidegree, exact, primes } => {
            setup(&common)?;
            let spec = ComplexSpec::parse(&common.spec)?;
            let kind: DifferentialKind = kind.parse()?;
            let src = source_for(&common)?;
            let opts = RankOptions { exact, primes: default_primes(primes) };
            let table = match bidegree {
                Some(b) => {
                    let (n, r) = parse_bidegree(&b)?;
                    homology_at(&spec, kind, n, r, &src, &opts)?
                }
                None => homology_table(&spec, kind, max_n, &src, &opts)?,
            };
            let text = match common.format {
                Format::Json => json(&table),
                _ => table.to_csv(),
            };
            emit(&common, &text)?;
        }
        Command::Verify { common, suite, max_n, kind } => {
            setup(&common)?;
            let spec = ComplexSpec::parse(&common.spec)?;
            let src = source_for(&common)?;
            let mut report = Report::new();
            match suite {
                Suite::Square => {
                    let kinds = match kind {
                        Some(k) => vec![k.parse()?],
                        None => DifferentialKind::ALL.to_vec(),
                    };
                    for k in kinds {
                        report.extend(verify_square_zero(k, max_n.unwrap_or(7), &spec, &src)?);
                    }
                }
                Suite::Anticommute => {
                    use DifferentialKind::*;
                    for (a, b) in [(Del, Clp), (Lp, Con), (Del, Con), (Lp, Clp)] {
                        report.extend(verify_anticommute(a, b, max_n.unwrap_or(7), &spec, &src)?);
                    }
                }
                Suite::Hopf => report.extend(verify_hopf(max_n.unwrap_or(5), &src)?),
                Suite::Homotopy => report.extend(verify_homotopy(max_n.unwrap_or(6), &src)?),
                Suite::Duality => report.extend(verify_duality(max_n.unwrap_or(6), &spec, &src)?),
                Suite::Freealg => report.extend(connected_dim_check(max_n.unwrap_or(7), &src)?),
            }
            finish_report(&common, &report)?;
        }
        Command::Enumerate { common, n } => {
            setup(&common)?;
            let spec = ComplexSpec::parse(&common.spec)?;
            let ms: Vec<_> = enumerate_all(n)?.into_iter().filter(|m| spec.holds(m)).collect();
            emit(&common, &format_mtrd(&ms))?;
        }
        Command::ExportMatrix { common, kind, n } => {
            setup(&common)?;
            let spec = ComplexSpec::parse(&common.spec)?;
            let kind: DifferentialKind = kind.parse()?;
            let src = source_for(&common)?;
            let m = differential_matrix(kind, n, &spec, &src)?;
            let text = match common.format {
                Format::Json => json(&serde_json::json!({
                    "rows": m.rows(),
                    "cols": m.cols(),
                    "entries": m.entries().iter().map(|&(r, c, v)| [r as i64 + 1, c as i64 + 1, v]).collect::<Vec<_>>(),
                })),
                _ => m.to_matrix_market(),
            };
            emit(&common, &text)?;
        }
        Command::IngestCheck { common } => {
            setup(&common)?;
            let path = common
                .source
                .clone()
                .ok_or_else(|| Error::Io("ingest-check needs --source or MATROIDC_DB_DIR".into()))?;
            let db = MatroidSource::from_path(&path)?;
            let mut s = format!("source {}\n", db.describe());
            for (n, count) in db.stored() {
                s.push_str(&format!("degree {n}: {count} classes\n"));
            }
            emit(&common, &s)?;
        }
    }
    Ok(())
}

fn quote(s: &str) -> String {
    if s.contains(',') {
        format!("\"{s}\"")
    } else {
        s.to_string()
    }
}
