use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use braket_rhs::cli::{self, CheckOptions, CmdOutput, Format};
use braket_rhs::random::seed_from_env;
use braket_rhs::Exec;

#[derive(Parser)]
#[command(name = "braket-rhs", version, about = "Bra-ket algebra checks for composite and identical-particle models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        }
    }
}

#[derive(Args)]
struct CheckArgs {
    /// Run only this suite; repeatable.
    #[arg(long = "suite", value_name = "NAME")]
    suites: Vec<String>,
    /// Residual tolerance for eigensolver-based checks; exact-algebra checks use 1% of it.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    /// Run trials on the calling thread only.
    #[arg(long)]
    sequential: bool,
}

impl CheckArgs {
    fn options(&self) -> CheckOptions {
        CheckOptions {
            suites: self.suites.clone(),
            tol: self.tol,
            format: self.format.into(),
            seed: seed_from_env(),
            exec: if self.sequential { Exec::Sequential } else { Exec::Parallel },
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run check suites against a model file.
    Check {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        args: CheckArgs,
    },
    /// Print the spectral decomposition of the model's composite observable.
    Spectral {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
    },
    /// Evaluate a Dirac-notation expression (default model: the bundled two-qubit one).
    Eval {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
    /// Run the check suites on the bundled two-qubit model.
    Demo {
        #[command(flatten)]
        args: CheckArgs,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { cli::EXIT_CONFIG as u8 } else { 0 });
        }
    };
    let out: CmdOutput = match &cli.command {
        Command::Check { config, args } => cli::cmd_check(config, &args.options()),
        Command::Spectral { config, format } => cli::cmd_spectral(config, (*format).into()),
        Command::Eval { config, expr, format } => cli::cmd_eval(config.as_deref(), expr, (*format).into()),
        Command::Demo { args } => cli::cmd_demo(&args.options()),
    };
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code as u8)
}
