use std::path::PathBuf;
use std::process::ExitCode;

use asplund::{Lambda, PParam};
use asplund_cli::{cmd_transform, cmd_verify, init_threads, Transform};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "asplund",
    version,
    about = "Sup-convolutions, symmetrizations and inequality checks on grids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment manifest and write results.csv and results.json
    Verify { config: PathBuf },
    /// Transform gridfn files
    Transform {
        #[command(subcommand)]
        op: Op,
    },
}

#[derive(Subcommand)]
enum Op {
    /// Supremum along an axis
    Project(AxisArgs),
    /// Steiner symmetrization along an axis
    Steiner(AxisArgs),
    /// Schwarz symmetrization about an axis
    Schwarz(AxisArgs),
    /// p-sup-convolution (1-λ)f ⋆_p λg
    Supconv {
        #[arg(long, allow_hyphen_values = true)]
        lambda: Lambda,
        #[arg(long, allow_hyphen_values = true)]
        p: PParam,
        f: PathBuf,
        g: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(clap::Args)]
struct AxisArgs {
    #[arg(long)]
    axis: usize,
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    let code = match cli.command {
        Command::Verify { config } => cmd_verify(&config),
        Command::Transform { op } => {
            let (t, inputs, out) = match op {
                Op::Project(a) => (Transform::Project { axis: a.axis }, vec![a.input], a.out),
                Op::Steiner(a) => (Transform::Steiner { axis: a.axis }, vec![a.input], a.out),
                Op::Schwarz(a) => (Transform::Schwarz { axis: a.axis }, vec![a.input], a.out),
                Op::Supconv { lambda, p, f, g, out } => (Transform::Supconv { lambda, p }, vec![f, g], out),
            };
            cmd_transform(&t, &inputs, out.as_deref())
        }
    };
    ExitCode::from(code as u8)
}
