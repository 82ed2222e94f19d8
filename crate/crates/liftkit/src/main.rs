use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use liftkit::commands::{self, UltraArgs};
use liftkit::sweep;

#[derive(Parser)]
#[command(name = "liftkit", version, about = "Correct approximate matrix relations and run lifting experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a corrector on a tuple of matrices.
    Correct {
        #[arg(long)]
        op: String,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Extra p-norms for the distance report.
        #[arg(long = "p")]
        p: Vec<f64>,
    },
    /// Run an ε–δ sweep from a config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "p")]
        p: Vec<f64>,
    },
    /// Lifts in a finite stretch of a tracial ultraproduct.
    Ultra {
        /// diagonal-completion, projection-trace, chain, partial-isometry,
        /// extend-units or bratteli.
        name: String,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        inclusion: Option<PathBuf>,
        #[arg(long)]
        pi: Option<PathBuf>,
        #[arg(long)]
        chain: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
        /// Ambient dimensions, comma separated.
        #[arg(long, value_delimiter = ',')]
        ambient: Vec<usize>,
        #[arg(long)]
        t: Option<f64>,
        /// Omit matrices from the output.
        #[arg(long)]
        brief: bool,
    },
    /// Generate an ensemble instance.
    Gen {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        /// Ensemble kind when no spec file is given.
        #[arg(long)]
        op: Option<String>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure how far a tuple is from satisfying a relation.
    Defect {
        #[arg(long = "in")]
        input: PathBuf,
        /// Relation name; otherwise the input's "relation" field.
        #[arg(long)]
        op: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "p")]
        p: Vec<f64>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Correct { op, input, out, p } => commands::correct(&op, &input, out.as_deref(), &p),
        Command::Sweep { config, out, seed, p } => sweep::sweep_cmd(&config, out.as_deref(), seed, &p),
        Command::Ultra {
            name,
            input,
            out,
            inclusion,
            pi,
            chain,
            depth,
            ambient,
            t,
            brief,
        } => commands::ultra(
            &name,
            &UltraArgs {
                input,
                out,
                inclusion,
                pi,
                chain,
                depth,
                ambient,
                t,
                brief,
            },
        ),
        Command::Gen {
            input,
            op,
            dim,
            delta,
            seed,
            out,
        } => commands::gen(input.as_deref(), op.as_deref(), dim, delta, seed, out.as_deref()),
        Command::Defect { input, op, out, p } => commands::defect_cmd(&input, op.as_deref(), out.as_deref(), &p),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("liftkit: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
