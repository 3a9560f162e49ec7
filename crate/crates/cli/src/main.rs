mod cache;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use cache::FactorCache;
use excycle::search::{divisor_sweep_with, repunit, scan_primitives_with, SweepOptions};
use excycle::{
    certify_with, classify_with, conjecture_scan_with, construct_from_digits, construct_quotient, multiplicative_order, verify_cycle, CertifyOptions, ClassifyOptions,
    ConjectureReport, DigitWord, Error, Instance,
};
use render::{Format, Report};

const EXIT_OK: u8 = 0;
const EXIT_NONE: u8 = 1;
const EXIT_INTERNAL: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_RESOURCE: u8 = 69;

#[derive(Parser)]
#[command(
    name = "excycle",
    about = "Extreme cycles and completeness verdicts for digit sets {0,m} at even scale g",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Factorization cache file (JSON lines, append-only)
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Seed for the randomized primality rounds above 2^64
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for the parallel searches (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Classify-call budget for sweeps and the conjecture scan
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Refine,
    Scan,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate all non-trivial extreme cycles of (g, m)
    Cycles {
        #[arg(long)]
        g: u128,
        #[arg(long)]
        m: u128,
        /// Search algorithm
        #[arg(long, value_enum, default_value_t = Algo::Refine)]
        algo: Algo,
        /// Ceiling on the scan window
        #[arg(long, default_value_t = excycle::cycles::DEFAULT_SCAN_CEILING)]
        scan_ceiling: u128,
        /// Integers per interval at which refine stops splitting
        #[arg(long, default_value_t = excycle::cycles::DEFAULT_LEAF_THRESHOLD)]
        leaf_threshold: u128,
    },
    /// Decide complete / incomplete / primitive
    Classify {
        #[arg(long)]
        g: u128,
        #[arg(long)]
        m: u128,
    },
    /// Run the theorem rules and print every certificate with its witness
    Certify {
        #[arg(long)]
        g: u128,
        #[arg(long)]
        m: u128,
    },
    /// Multiplicative order of g modulo m with its factorization
    Order {
        #[arg(long)]
        g: u128,
        #[arg(long)]
        m: u128,
    },
    /// All primitive numbers up to a bound, ascending
    Primitives {
        #[arg(long)]
        g: u128,
        #[arg(long)]
        max: u128,
    },
    /// The base-g repunit primitive (g^g - 1)/(g - 1) and its unique cycle
    Repunit {
        #[arg(long)]
        g: u128,
    },
    /// Build an incomplete number from a 0/1 digit word (read as k_0..k_{n-1})
    Construct {
        #[arg(long)]
        g: u128,
        #[arg(long)]
        digits: String,
    },
    /// Divisor-ladder sweep of g^n - 1 for new primitive numbers
    Sweep {
        #[arg(long)]
        g: u128,
        #[arg(long)]
        n: u32,
        /// Already-known primitive numbers, comma separated (g-1 is implied)
        #[arg(long, value_delimiter = ',')]
        known: Vec<u128>,
    },
    /// Gather evidence that (g^g - 1)/(g - 1) is the first non-trivial primitive
    Conjecture {
        #[arg(long)]
        g: u128,
    },
    /// Quotient construction (g^q - 1)/(g - 1) with certified order q
    Quotient {
        #[arg(long)]
        g: u128,
        #[arg(long)]
        q: u128,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(seed) = cli.seed {
        excycle::set_probabilistic_seed(seed);
    }
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let mut cache = match &cli.cache {
        Some(path) => FactorCache::open(path),
        None => FactorCache::disabled(),
    };
    let started = Instant::now();
    match run(&cli, &mut cache) {
        Ok(report) => {
            report.print(cli.format, started.elapsed());
            ExitCode::from(report.exit)
        }
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::InvalidInstance { .. } | Error::InvalidWord => EXIT_USAGE,
                Error::ResourceLimit { .. } => EXIT_RESOURCE,
                _ => EXIT_INTERNAL,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli, cache: &mut FactorCache) -> excycle::Result<Report> {
    let budget = cli.budget.unwrap_or(excycle::search::DEFAULT_CLASSIFY_BUDGET);
    match &cli.command {
        Command::Cycles {
            g,
            m,
            algo,
            scan_ceiling,
            leaf_threshold,
        } => {
            let inst = Instance::new(*g, *m)?;
            let cycles = match algo {
                Algo::Refine => {
                    excycle::cycles::enumerate_cycles_refine_with(&inst, *leaf_threshold)?
                }
                Algo::Scan => excycle::cycles::enumerate_cycles_scan_with(&inst, *scan_ceiling)?,
            };
            debug_assert!(cycles
                .iter()
                .all(|c| verify_cycle(&inst, c.points(), c.digits())));
            let order = if excycle::gcd(*g, *m) == 1 {
                Some(multiplicative_order(*g, *m)?.order)
            } else {
                None
            };
            let exit = if cycles.is_empty() { EXIT_NONE } else { EXIT_OK };
            Ok(render::cycles_report(&inst, &cycles, order, exit))
        }
        Command::Classify { g, m } => {
            let inst = Instance::new(*g, *m)?;
            let cls = classify_with(&inst, &ClassifyOptions::default())?;
            let exit = match cls.verdict {
                excycle::Verdict::Incomplete => EXIT_OK,
                excycle::Verdict::Complete => EXIT_NONE,
            };
            Ok(render::classify_report(&inst, &cls, exit))
        }
        Command::Certify { g, m } => {
            Instance::new(*g, *m)?;
            let certs = certify_with(*g, *m, &CertifyOptions::default())?;
            let exit = if certs.is_empty() { EXIT_NONE } else { EXIT_OK };
            Ok(render::certify_report(*g, *m, &certs, exit))
        }
        Command::Order { g, m } => {
            Instance::new(*g, *m)?;
            let profile = multiplicative_order(*g, *m)?;
            let modulus_factorization = cache.factor(*m);
            Ok(render::order_report(&profile, &modulus_factorization))
        }
        Command::Primitives { g, max } => {
            Instance::new(*g, 1)?;
            let opts = SweepOptions {
                classify_budget: budget,
            };
            let records = scan_primitives_with(*g, *max, &opts)?;
            for r in &records {
                cache.factor(r.m);
            }
            let exit = if records.is_empty() { EXIT_NONE } else { EXIT_OK };
            Ok(render::records_report(
                "primitives",
                *g,
                Some(("max", *max)),
                &records,
                exit,
            ))
        }
        Command::Repunit { g } => {
            Instance::new(*g, 1)?;
            let record = repunit(*g)?;
            cache.factor(record.m);
            Ok(render::records_report("repunit", *g, None, &[record], EXIT_OK))
        }
        Command::Construct { g, digits } => {
            let word = DigitWord::parse(digits)?;
            let (m, cycle) = construct_from_digits(*g, &word)?;
            let inst = Instance::new(*g, m)?;
            cache.factor(m);
            Ok(render::construct_report(&inst, &word, &cycle))
        }
        Command::Sweep { g, n, known } => {
            Instance::new(*g, 1)?;
            let opts = SweepOptions {
                classify_budget: budget,
            };
            let records = divisor_sweep_with(*g, *n, known, &opts)?;
            for r in &records {
                cache.factor(r.m);
            }
            let exit = if records.is_empty() { EXIT_NONE } else { EXIT_OK };
            Ok(render::sweep_report(*g, *n, known, &records, exit))
        }
        Command::Conjecture { g } => {
            Instance::new(*g, 1)?;
            let report = conjecture_scan_with(*g, budget)?;
            let exit = match report {
                ConjectureReport::Verified { .. } | ConjectureReport::Counterexample { .. } => {
                    EXIT_OK
                }
                ConjectureReport::BudgetExhausted { .. } => EXIT_NONE,
            };
            Ok(render::conjecture_report(*g, &report, exit))
        }
        Command::Quotient { g, q } => {
            Instance::new(*g, 1)?;
            let (m, order) = construct_quotient(*g, *q)?;
            cache.factor(m);
            Ok(render::quotient_report(*g, *q, m, order))
        }
    }
}
