//! `fieldpsi`: character sums, pseudo-finite measures and equidistribution
//! experiments over finite fields, as reproducible sweeps over primes.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or input error.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl From<fieldpsi::Error> for CliError {
    fn from(e: fieldpsi::Error) -> Self {
        CliError::usage(e.to_string())
    }
}

macro_rules! io_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError { code: 2, message: format!("output: {e}") }
            }
        }
    )*};
}
io_error!(std::io::Error, csv::Error, serde_json::Error);

#[derive(Debug, Parser)]
#[command(name = "fieldpsi", version, about = "Finite-field character sums and equidistribution sweeps")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. `--jobs`, `--json` and `--csv` are
/// not echoed into reports, so output does not depend on them.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Global {
    /// Sweep primes up to this bound
    #[arg(long, global = true)]
    pub xlimit: Option<u64>,
    /// Use this single prime instead of a sweep
    #[arg(long, global = true)]
    pub prime: Option<u64>,
    /// Restrict the sweep to p ≡ RES (mod MOD)
    #[arg(long = "mod", global = true, requires = "res")]
    pub modulus: Option<u64>,
    #[arg(long, global = true, requires = "modulus")]
    pub res: Option<u64>,
    /// Tolerance for the subcommand's check
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Point-enumeration budget (field elements visited)
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    /// Worker threads
    #[serde(skip)]
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Write the JSON report here
    #[serde(skip)]
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    /// Write the CSV table here
    #[serde(skip)]
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Weil bound for Σ ψ(f(x)) over F_q; CSV: p,degree,magnitude,bound,pass
    Weil(commands::WeilArgs),
    /// sup of a real Laurent series on a curve's character image; CSV: p,points,sup,tol,pass
    Axiom3(commands::Axiom3Args),
    /// Symmetric character sums over roots and their closure identities; CSV: p,re,im (or identity,instances,failures,max_error with --verify)
    Psisym(commands::PsisymArgs),
    /// The algebraic function κ_{P,Q}; CSV: p,value
    Kappa(commands::KappaArgs),
    /// Points in a box against the p^dim·2^-n heuristic; CSV: p,count,fraction,expected_fraction,hyperplane_contained
    Boxcount(commands::BoxArgs),
    /// Leading-order measure |X(F_p)|/p^dim; CSV: p,count,value
    Mu0(commands::Mu0Args),
    /// Next-to-leading-order measure p^(1/2-dim)(|X|-|X'|); CSV: p,count,count_ref,value
    Mu1(commands::Mu1Args),
    /// Fourier identities on random tables over F_p^n; CSV: index,p,n,plancherel_error,inversion_error,delta_error
    Fourier(commands::FourierArgs),
    /// Moments of a variety's image on the torus; CSV: m,re,im,abs
    Pushforward(commands::PushforwardArgs),
    /// Roots ν of f mod p as angles ν/p; CSV: p,root,angle_num,angle_den
    Dfi(commands::DfiArgs),
    /// Angles g(ν)/p over roots ν of f mod p; CSV: p,root,angle_num,angle_den
    Dfiext(commands::DfiExtArgs),
    /// Joint Weyl sums, checked against the extended sweep; CSV: h,re,im,abs,ext_re,ext_im,diff
    Multiweyl(commands::MultiWeylArgs),
    /// Exact congruence law for ψ_p(1/n); CSV: n,p,k,m,angle,nearest,distance,closed_form,pairing
    Spcheck(commands::SpArgs),
    /// Z-basis of the lattice generated by number-field elements; CSV: index,basis
    Latbasis(commands::LatArgs),
    /// Possible character values on a finite set of field elements; CSV: index,element,coordinates
    Valueset(commands::ValueSetArgs),
}

fn run(cli: Cli) -> Result<commands::Outcome, CliError> {
    let g = &cli.global;
    commands::validate_global(g)?;
    match &cli.command {
        Command::Weil(a) => commands::weil(g, a),
        Command::Axiom3(a) => commands::axiom3(g, a),
        Command::Psisym(a) => commands::psisym(g, a),
        Command::Kappa(a) => commands::kappa(g, a),
        Command::Boxcount(a) => commands::boxcount(g, a),
        Command::Mu0(a) => commands::mu0(g, a),
        Command::Mu1(a) => commands::mu1(g, a),
        Command::Fourier(a) => commands::fourier(g, a),
        Command::Pushforward(a) => commands::pushforward(g, a),
        Command::Dfi(a) => commands::dfi(g, a),
        Command::Dfiext(a) => commands::dfiext(g, a),
        Command::Multiweyl(a) => commands::multiweyl(g, a),
        Command::Spcheck(a) => commands::spcheck(g, a),
        Command::Latbasis(a) => commands::latbasis(g, a),
        Command::Valueset(a) => commands::valueset(g, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let start = Instant::now();
    let json = cli.global.json.clone();
    let csv = cli.global.csv.clone();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.global.jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    };
    if cli.global.jobs == Some(0) {
        eprintln!("error: --jobs must be at least 1");
        return ExitCode::from(2);
    }
    let result = pool.install(|| run(cli)).and_then(|out| {
        if let Some(path) = &json {
            out.report.write_json(path)?;
        }
        if let Some(path) = &csv {
            out.table.write(path)?;
        }
        Ok(out)
    });
    match result {
        Ok(out) => {
            println!("{}", out.summary);
            eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
            if out.check_failed {
                eprintln!("check failed");
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
