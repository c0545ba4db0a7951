//! `hallq`: classify representations, straighten products, run verification suites.
//!
//! Exit codes: 0 success, 1 a check failed, 2 invalid input, 3 an enumeration bound was hit.

mod expr;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hallq::cache::Cache;
use hallq::cplx::Oracle;
use hallq::dh::DoubleHall;
use hallq::report::{Check, Report, Status};
use hallq::uq::FPrefactor;
use hallq::verify::{self, Suite, VerifyConfig};
use hallq::{HallError, Quiver, RepCategory};
use serde_json::json;

#[derive(Parser)]
#[command(name = "hallq", version, about = "Exact Hall algebras of quiver representations over F_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Quiver file (`field`, `vertex`, `edge` lines).
    #[arg(long)]
    quiver: PathBuf,
    /// Prime field, overriding the file's `field` line.
    #[arg(short, long)]
    p: Option<u32>,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Structure-constant cache file [default: $HALLQ_CACHE, else a file in the temp directory].
    #[arg(long)]
    cache: Option<PathBuf>,
    /// Do not read or write the cache.
    #[arg(long, conflicts_with = "cache")]
    no_cache: bool,
}

#[derive(Subcommand)]
enum Command {
    /// List isomorphism classes of a dimension vector.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Dimension vector, comma separated in vertex order.
        #[arg(long, value_delimiter = ',', required = true)]
        dim: Vec<usize>,
    },
    /// Straighten a product into normal form.
    Product {
        #[command(flatten)]
        common: Common,
        /// For example `E[1] F[1]`, `K(S:a) E[1]` or `1/2 v^(1/2) F[0.1]`.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        expr: String,
        /// Work in the reduced algebra, where `K†_β = K_{−β}`.
        #[arg(long, conflicts_with = "oracle")]
        reduced: bool,
        /// Rewrite the result in the basis `E{X,Y} K Kd` of the Hall algebra of complexes (no loops).
        #[arg(long)]
        oracle: bool,
    },
    /// Run a verification suite; exits 0 iff every check passes.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Dimension cap of the suite.
        #[arg(long)]
        max_dim: Option<usize>,
        /// Seed of the randomized checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Recompute every cached record first and fail on any mismatch.
        #[arg(long)]
        audit_cache: bool,
        /// Largest total dimension of a Serre relation.
        #[arg(long, default_value_t = 4)]
        serre_max_dim: usize,
        /// Prefactor of the image of F; `minus-one` is a deliberately wrong control.
        #[arg(long, value_enum, default_value = "minus-v")]
        f_prefactor: PrefactorArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Relations,
    Serre,
    Drinfeld,
    Assoc,
    Oracle,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Relations => Suite::Relations,
            SuiteArg::Serre => Suite::Serre,
            SuiteArg::Drinfeld => Suite::Drinfeld,
            SuiteArg::Assoc => Suite::Assoc,
            SuiteArg::Oracle => Suite::Oracle,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PrefactorArg {
    MinusV,
    MinusOne,
}

/// A command's outcome mapped onto the exit-code convention.
enum Failure {
    Checks,
    Input(HallError),
    Bound(HallError),
}

impl From<HallError> for Failure {
    fn from(e: HallError) -> Failure {
        if e.is_bound() {
            Failure::Bound(e)
        } else {
            Failure::Input(e)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Bound(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn load(common: &Common) -> Result<Arc<RepCategory>, Failure> {
    let text = std::fs::read_to_string(&common.quiver)
        .map_err(|e| HallError::Io(format!("{}: {e}", common.quiver.display())))?;
    let quiver = Quiver::parse(&text)?;
    let quiver = match common.p {
        Some(p) => quiver.with_field(p)?,
        None => quiver,
    };
    let mut cat = RepCategory::from_quiver(quiver)?;
    if !common.no_cache {
        let path = common.cache.clone().unwrap_or_else(Cache::default_path);
        cat = cat.with_cache(Arc::new(open_cache(&path)?));
    }
    Ok(Arc::new(cat))
}

fn open_cache(path: &Path) -> Result<Cache, HallError> {
    Cache::open(path).map_err(|e| HallError::Io(format!("cache {}: {e}", path.display())))
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("JSON values serialize"));
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Classify { common, dim } => {
            let cat = load(&common)?;
            if dim.len() != cat.quiver().num_vertices() {
                return Err(Failure::Input(HallError::Mismatch(format!(
                    "dimension vector has {} entries, the quiver has {} vertices",
                    dim.len(),
                    cat.quiver().num_vertices()
                ))));
            }
            let classes = cat.classify(&dim)?;
            cat.record_auts(&[dim.clone()])?;
            if common.json {
                print_json(&json!({ "dims": dim, "p": cat.p(), "classes": classes.iter().map(|c| c.as_ref()).collect::<Vec<_>>() }));
            } else {
                let width = classes.iter().map(|c| c.key.len()).max().unwrap_or(3).max(3);
                println!("{:<width$}  {:>10}  kclass", "key", "aut");
                for c in &classes {
                    println!("{:<width$}  {:>10}  ({})", c.key, c.aut_order, c.kclass);
                }
            }
            Ok(())
        }
        Command::Product { common, expr, reduced, oracle } => {
            let cat = load(&common)?;
            let dh = DoubleHall::new(cat.clone(), reduced);
            let x = expr::evaluate(&dh, &expr)?;
            if oracle {
                let y = Oracle::new(cat.clone())?.from_dh(&x)?.normalize(cat.q());
                if common.json {
                    print_json(&json!({ "expr": expr, "oracle": true, "p": cat.p(), "terms": y.dump(&cat) }));
                } else {
                    println!("{}", y.render(&cat));
                }
            } else if common.json {
                print_json(&json!({ "expr": expr, "reduced": reduced, "p": cat.p(), "terms": x.dump(&cat) }));
            } else {
                println!("{}", x.render(&cat));
            }
            Ok(())
        }
        Command::Verify { common, suite, max_dim, seed, audit_cache, serre_max_dim, f_prefactor } => {
            let cat = load(&common)?;
            let mut config = VerifyConfig { max_dim, seed, ..VerifyConfig::default() };
            config.xi.serre_max_dim = serre_max_dim;
            config.xi.f_prefactor = match f_prefactor {
                PrefactorArg::MinusV => FPrefactor::MinusV,
                PrefactorArg::MinusOne => FPrefactor::MinusOne,
            };
            let mut audit = Vec::new();
            if audit_cache {
                for (op, args, cached, fresh) in cat.audit_cache()? {
                    audit.push(Check::compare(format!("cache[{op} {args}]"), cached, fresh, "mismatch".into(), false));
                }
            }
            let mut report = if audit.is_empty() {
                verify::run(&cat, suite.into(), &config)?
            } else {
                Report { suite: "audit-cache".into(), checks: Vec::new(), config: json!({}) }
            };
            report.checks.splice(0..0, audit);
            if common.json {
                print_json(&serde_json::to_value(&report).expect("reports serialize"));
            } else {
                print!("{}", report.table());
            }
            if report.any_failed() {
                Err(Failure::Checks)
            } else if report.checks.iter().any(|c| c.status == Status::Bound) {
                Err(Failure::Bound(HallError::EnumerationTooLarge("some checks hit an enumeration bound".into())))
            } else {
                Ok(())
            }
        }
    }
}
