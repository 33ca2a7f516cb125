use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use eilscond::genrand::{gen_problem, DEFAULT_HYPERBOLIC_CAP};
use eilscond::{densela, GenSpec, MemoryCap};
use eilscond_cli::bundle::{load_and_analyze, Bundle};
use eilscond_cli::commands::{self, Form, LSpec};
use eilscond_cli::experiment::{self, ExperimentConfig, LChoice, Pattern};
use eilscond_cli::CliError;

/// Equality-constrained indefinite least squares: generation, solution
/// and projected condition numbers.
#[derive(Parser)]
#[command(name = "eilscond", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random problem bundle.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        /// Output bundle directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a bundle, write x, r and lambda, and report residuals.
    Solve {
        bundle: PathBuf,
        /// Directory for the solution files (defaults to the bundle).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute a projected condition number.
    Cond {
        bundle: PathBuf,
        /// norm2, mixed, comp or unit.
        #[arg(long, default_value = "norm2")]
        preset: String,
        /// kron, c1, c2, exact-inf or ubound.
        #[arg(long, default_value = "c1")]
        form: String,
        /// `identity`, `cols i..j` (one-based, inclusive) or `file <path>`.
        #[arg(long = "L", num_args = 1..=2, default_values_t = vec!["identity".to_string()])]
        l: Vec<String>,
    },
    /// Run one of the experiment patterns and print CSV.
    Experiment {
        /// errbound, form-timing, ubound-timing or ubound-ratio.
        #[arg(long)]
        pattern: String,
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value_t = 10)]
        reps: usize,
        /// errbound/ubound-ratio projection: identity, leadingK or convex.
        #[arg(long = "L", default_value = "identity")]
        l: String,
        #[arg(long, default_value_t = 1e-9)]
        epsilon: f64,
        /// Size grid for the timing patterns, e.g. "240,120,80;360,180,120".
        #[arg(long)]
        sizes: Option<String>,
        /// Inner repetitions per timing cell (after one warm-up run).
        #[arg(long, default_value_t = 5)]
        timing_reps: usize,
        /// Write the CSV here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 20)]
    p: usize,
    #[arg(long, default_value_t = 10)]
    q: usize,
    #[arg(long, default_value_t = 20)]
    n: usize,
    #[arg(long, default_value_t = 5)]
    s: usize,
    #[arg(long = "kappaA", default_value_t = 10.0)]
    kappa_a: f64,
    #[arg(long = "kappaB", default_value_t = 1.0)]
    kappa_b: f64,
    #[arg(long, default_value_t = 1e-9)]
    omega: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    tau: f64,
    #[arg(long, default_value_t = 2018)]
    seed: u64,
    /// Largest hyperbolic angle in the J-orthogonal factor.
    #[arg(long, default_value_t = DEFAULT_HYPERBOLIC_CAP)]
    hyperbolic_cap: f64,
}

impl GenArgs {
    fn spec(&self) -> GenSpec {
        GenSpec {
            p: self.p,
            q: self.q,
            n: self.n,
            s: self.s,
            kappa_a: self.kappa_a,
            kappa_b: self.kappa_b,
            omega: self.omega,
            tau: self.tau,
            seed: self.seed,
            hyperbolic_cap: self.hyperbolic_cap,
        }
    }
}

/// Prints a line to standard output; a closed pipe ends the command quietly.
macro_rules! say {
    ($($t:tt)*) => {
        if writeln!(std::io::stdout(), $($t)*).is_err() {
            return Ok(());
        }
    };
}

fn parse_sizes(s: &str) -> Result<Vec<(usize, usize, usize)>, CliError> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let v: Vec<usize> = t
                .split(',')
                .map(|x| x.trim().parse())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Usage(format!("bad size `{t}`")))?;
            match v[..] {
                [m, n, s] if m >= n && n >= s && s >= 1 => Ok((m, n, s)),
                _ => Err(CliError::Usage(format!("size `{t}` must be m,n,s with m >= n >= s >= 1"))),
            }
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { gen, out } => {
            let g = gen_problem(&gen.spec())?;
            let bundle = Bundle::from_generated(&g)?;
            bundle.save(&out)?;
            let b = bundle.b.as_ref().expect("generated bundles carry B");
            say!("wrote {}", out.display());
            say!("kappa(A) = {:.6e}", densela::cond2(&bundle.a));
            say!("kappa(B) = {:.6e}", densela::cond2(b));
            say!("||r||_2  = {:.6e}", g.r_true.norm());
            if g.attempt > 0 {
                say!("accepted on attempt {}", g.attempt + 1);
            }
        }
        Command::Solve { bundle, out } => {
            let (_, an) = load_and_analyze(&bundle)?;
            let dir = out.unwrap_or(bundle);
            for path in commands::write_solution(&an, &dir)? {
                say!("wrote {}", path.display());
            }
            for (name, v) in commands::residual_report(&an) {
                say!("{name:<40} {v:.3e}");
            }
        }
        Command::Cond { bundle, preset, form, l } => {
            let preset = commands::parse_preset(&preset)?;
            let form = Form::parse(&form)?;
            let lspec = LSpec::parse(&l)?;
            let (_, an) = load_and_analyze(&bundle)?;
            let lm = lspec.resolve(an.n())?;
            let report = match commands::condition(&an, preset, form, lm, MemoryCap::from_env()) {
                Err(CliError::Eils(e)) => {
                    if let Some(note) = commands::memory_guard_note(&e) {
                        eprintln!("{note}");
                    }
                    return Err(e.into());
                }
                other => other?,
            };
            say!("kappa    = {:.16e}", report.value);
            say!("preset   = {:?}", report.preset);
            say!("formula  = {}", report.form.formula());
            say!("elapsed  = {:.6} s", report.elapsed.as_secs_f64());
        }
        Command::Experiment { pattern, gen, reps, l, epsilon, sizes, timing_reps, out } => {
            let mut cfg = ExperimentConfig::new(Pattern::parse(&pattern)?, gen.spec());
            cfg.reps = reps;
            cfg.l = LChoice::parse(&l)?;
            cfg.epsilon = epsilon;
            cfg.timing_reps = timing_reps;
            if let Some(s) = sizes {
                cfg.sizes = parse_sizes(&s)?;
            }
            let report = experiment::run(&cfg)?;
            for note in &report.notes {
                eprintln!("{note}");
            }
            let csv = report.to_csv();
            match out {
                Some(path) => std::fs::write(&path, csv).map_err(|e| CliError::io(&path, e))?,
                None => {
                    let _ = std::io::stdout().write_all(csv.as_bytes());
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
