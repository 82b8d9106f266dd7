use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mtoone_cli::grid::{parse_list, Grid};
use mtoone_cli::search::{SearchSpec, DEFAULT_BUDGET};
use mtoone_cli::{
    analyze, count, run_verify, search, verify_exit_code, CliError, Family, VerifyConfig,
    EXIT_DISAGREE,
};

#[derive(Parser)]
#[command(
    name = "mtoone",
    version,
    about = "Analyze, verify and search m-to-1 maps over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fiber histogram, admissible m and exceptional sets of one polynomial.
    Analyze {
        /// Field as p^n, optionally with a modulus: 64 = 2^6/1,1,0,1,1,0,1
        #[arg(value_name = "FIELD", required_unless_present = "field")]
        field_pos: Option<String>,
        /// Coefficients from x^0 upward ("0,1,0,1") or a sum of terms ("x^3 + x")
        #[arg(value_name = "POLY", required_unless_present = "poly")]
        poly_pos: Option<String>,
        #[arg(long, conflicts_with = "field_pos")]
        field: Option<String>,
        #[arg(long, conflicts_with = "poly_pos")]
        poly: Option<String>,
        /// Report only this m
        #[arg(long)]
        m: Option<usize>,
        /// Restrict the domain to the nonzero elements
        #[arg(long)]
        star: bool,
        #[arg(long)]
        json: bool,
    },
    /// Check a theorem family against exhaustive scans over a parameter grid.
    Verify(VerifyArgs),
    /// Find h of bounded degree with x^r h(x^s) m-to-1 on the nonzero elements.
    Search {
        #[arg(value_name = "FIELD", required_unless_present = "field")]
        field_pos: Option<String>,
        #[arg(long, conflicts_with = "field_pos")]
        field: Option<String>,
        #[arg(long)]
        s: u64,
        /// Degree bound for h
        #[arg(long)]
        deg: usize,
        #[arg(long)]
        m: u64,
        /// Exponents r (list such as 1,2 or 1..4); default 1..=s
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        monic: bool,
        /// At most this many nonzero coefficients in h
        #[arg(long)]
        support: Option<usize>,
        /// Largest number of candidates to enumerate
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        #[arg(long)]
        json: bool,
    },
    /// Number of m-to-1 self-maps of a q-set.
    Count {
        q: u64,
        #[arg(long)]
        m: Option<u64>,
        /// Also count by running through all q^q maps
        #[arg(long)]
        enumerate: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_name = "FAMILY", required_unless_present = "family")]
    family_pos: Option<String>,
    #[arg(long, conflicts_with = "family_pos")]
    family: Option<String>,
    /// Values of q, e.g. 5,7,9..13
    #[arg(long)]
    q: Option<String>,
    /// Extension degrees n (q = 2^n families)
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    k: Option<String>,
    /// Keep only these multiplicities
    #[arg(long)]
    m: Option<String>,
    /// Several axes at once: "q=5,7;n=2..4"
    #[arg(long)]
    grid: Option<String>,
    /// Random draws per grid cell
    #[arg(long)]
    draws: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check every m up to ell*m1 in the main grid
    #[arg(long)]
    all: bool,
    /// Write the JSON report here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a CSV export
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads; 0 uses every processor
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Model file for the criteria family
    #[arg(long)]
    fixture: Option<PathBuf>,
    /// Print the full report to stdout
    #[arg(long)]
    json: bool,
}

fn opt_list(s: &Option<String>) -> Result<Option<Vec<u64>>, CliError> {
    s.as_deref().map(parse_list).transpose()
}

fn verify(args: VerifyArgs) -> Result<i32, CliError> {
    let family: Family = args
        .family_pos
        .or(args.family)
        .expect("required by clap")
        .parse()?;
    let mut grid = Grid {
        q: opt_list(&args.q)?,
        n: opt_list(&args.n)?,
        r: opt_list(&args.r)?,
        d: opt_list(&args.d)?,
        k: opt_list(&args.k)?,
        m: opt_list(&args.m)?,
    };
    if let Some(spec) = &args.grid {
        grid.apply(spec)?;
    }
    let cfg = VerifyConfig {
        family,
        grid,
        draws: args.draws,
        seed: args.seed,
        all: args.all,
        fixture: args.fixture,
    };
    let report = run_verify(&cfg, args.jobs)?;
    if let Some(path) = &args.out {
        report.write_json(path)?;
    }
    if let Some(path) = &args.csv {
        report.write_csv(path)?;
    }
    if args.json {
        print!("{}", report.to_json());
    } else {
        let s = report.summary;
        println!(
            "{}: {} records, {} agree, {} disagree, {} skipped",
            report.family, s.total, s.agreements, s.disagreements, s.skipped
        );
        for r in report.disagreements().take(20) {
            println!(
                "DISAGREE {} predicted={} observed={}{}",
                serde_json::to_string(&r.params).expect("serializable"),
                r.predicted,
                r.observed,
                r.note
                    .as_ref()
                    .map(|n| format!(" ({n})"))
                    .unwrap_or_default()
            );
        }
    }
    Ok(verify_exit_code(&report))
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Analyze {
            field_pos,
            poly_pos,
            field,
            poly,
            m,
            star,
            json,
        } => {
            let field = field_pos.or(field).expect("required by clap");
            let poly = poly_pos.or(poly).expect("required by clap");
            let a = analyze::analyze(&field, &poly, m, star)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&a).expect("serializable")
                );
            } else {
                print!("{}", a.to_text());
            }
            Ok(0)
        }
        Command::Verify(args) => verify(args),
        Command::Search {
            field_pos,
            field,
            s,
            deg,
            m,
            r,
            monic,
            support,
            budget,
            json,
        } => {
            let spec = SearchSpec {
                field: field_pos.or(field).expect("required by clap"),
                s,
                deg,
                m,
                r: opt_list(&r)?.unwrap_or_default(),
                monic,
                support,
                budget,
            };
            let res = search::search(&spec)?;
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&res).expect("serializable")
                );
            } else {
                print!("{}", res.to_text());
            }
            Ok(if res.all_verified() { 0 } else { EXIT_DISAGREE })
        }
        Command::Count {
            q,
            m,
            enumerate,
            json,
        } => {
            let out = count::run_count(q, m, enumerate, json)?;
            print!("{out}");
            Ok(
                if out.contains("DISAGREE") || out.contains("\"agree\": false") {
                    EXIT_DISAGREE
                } else {
                    0
                },
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() {
                mtoone_cli::EXIT_PARSE
            } else {
                0
            };
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
