use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lbsphere::diagnostics::FeatureKind;
use lbsphere::optim::Method;
use lbsphere_cli::experiment::{success_table, ALL_CASES};
use lbsphere_cli::summary::comparison_table;
use lbsphere_cli::{exit, tools, CliError, CliResult, Expectation, RunConfig};

/// Stationary states of the Landau-Brazovskii model on the sphere.
#[derive(Parser)]
#[command(name = "lbsphere", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimize from one initial state with one method.
    Run {
        /// `key = value` configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// `--key value` overrides of configuration entries.
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
    /// Run several methods from the same initial state and tabulate them.
    Compare {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated methods; all eight by default.
        #[arg(long, value_delimiter = ',')]
        methods: Vec<String>,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
    /// Success rates of PMA and random starts and radii.
    SuccessRate {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Feature count that defines success.
        #[arg(long)]
        expect: usize,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(trailing_var_arg = true, allow_hyphen_values = true)]
        overrides: Vec<String>,
    },
    /// Count spots or stripes of a saved field (coefficients or grid CSV).
    Count {
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        n_theta: Option<usize>,
        #[arg(long)]
        n_phi: Option<usize>,
    },
    /// Convert between coefficient text and grid CSV.
    Transform {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, value_enum)]
        to: Target,
        /// Bandlimit of the analysis when converting to coefficients.
        #[arg(long)]
        bandlimit: Option<usize>,
        #[arg(long)]
        n_theta: Option<usize>,
        #[arg(long)]
        n_phi: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Spots,
    Stripes,
}

impl From<Kind> for FeatureKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Spots => FeatureKind::Spots,
            Kind::Stripes => FeatureKind::Stripes,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    Grid,
    Coeffs,
}

fn grid_arg(n_theta: Option<usize>, n_phi: Option<usize>) -> CliResult<Option<(usize, usize)>> {
    match (n_theta, n_phi) {
        (None, None) => Ok(None),
        (Some(t), Some(p)) => Ok(Some((t, p))),
        _ => Err(CliError::Config("give both --n-theta and --n-phi".into())),
    }
}

fn execute(cmd: Command) -> CliResult<i32> {
    match cmd {
        Command::Run { config, overrides } => {
            let cfg = RunConfig::load(config.as_deref(), &overrides)?;
            let report = lbsphere_cli::run(&cfg)?;
            print!("{}", report.summary.to_text());
            Ok(if report.summary.converged {
                exit::CONVERGED
            } else {
                exit::NONCONVERGED
            })
        }
        Command::Compare {
            config,
            methods,
            overrides,
        } => {
            let cfg = RunConfig::load(config.as_deref(), &overrides)?;
            let methods: Vec<Method> = if methods.is_empty() {
                Method::ALL.to_vec()
            } else {
                methods
                    .iter()
                    .map(|m| m.parse())
                    .collect::<Result<_, _>>()?
            };
            let rows = lbsphere_cli::compare_methods(&cfg, &methods)?;
            print!("{}", comparison_table(&rows));
            let all = rows.iter().all(|(_, r)| matches!(r, Ok(s) if s.converged));
            Ok(if all { exit::CONVERGED } else { exit::NONCONVERGED })
        }
        Command::SuccessRate {
            config,
            trials,
            expect,
            kind,
            overrides,
        } => {
            let cfg = RunConfig::load(config.as_deref(), &overrides)?;
            let expectation = Expectation {
                kind: kind.into(),
                count: expect,
            };
            let reports =
                lbsphere_cli::success_rate_experiment(&cfg, trials, expectation, &ALL_CASES)?;
            print!("{}", success_table(&reports, expectation));
            Ok(exit::CONVERGED)
        }
        Command::Count {
            input,
            kind,
            n_theta,
            n_phi,
        } => {
            let kind: FeatureKind = kind.into();
            let c = tools::count_file(&input, kind, grid_arg(n_theta, n_phi)?)?;
            println!("{kind} = {}", c.count);
            println!("flat = {}", c.flat);
            Ok(exit::CONVERGED)
        }
        Command::Transform {
            input,
            output,
            to,
            bandlimit,
            n_theta,
            n_phi,
        } => {
            match to {
                Target::Grid => {
                    tools::coefficients_to_grid(&input, &output, grid_arg(n_theta, n_phi)?)?
                }
                Target::Coeffs => {
                    let n = bandlimit.ok_or_else(|| {
                        CliError::Config("--bandlimit is required for --to coeffs".into())
                    })?;
                    tools::grid_to_coefficients(&input, &output, n)?
                }
            }
            Ok(exit::CONVERGED)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::INVALID_CONFIG as u8 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
