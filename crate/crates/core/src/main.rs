use clap::{Args, Parser, Subcommand};
use shootcurve::cli::{self, Command, Overrides};
use std::path::PathBuf;
use std::process::ExitCode;

/// Global solution curves of u'' + λ f(u) − μ g(x) = 0 on (−1, 1), u(±1) = 0,
/// continued in α = u(0).
#[derive(Parser)]
#[command(name = "shootcurve", version)]
struct Opts {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check g against the structural conditions.
    Validate(Common),
    /// Trace λ(α) at fixed μ for every configured run.
    LambdaCurve(Common),
    /// Trace μ(α) at fixed λ for every configured run.
    MuCurve(Common),
    /// Positivity-loss envelope of the logistic model.
    Envelope(Common),
    /// Run the built-in property suite.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    alpha_step: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    quiet: bool,
}

fn main() -> ExitCode {
    let opts = Opts::parse();
    let (command, common) = match opts.command {
        Cmd::Validate(c) => (Command::Validate, c),
        Cmd::LambdaCurve(c) => (Command::LambdaCurve, c),
        Cmd::MuCurve(c) => (Command::MuCurve, c),
        Cmd::Envelope(c) => (Command::Envelope, c),
        Cmd::Verify(c) => (Command::Verify, c),
    };
    let overrides = Overrides {
        out: common.out,
        alpha_step: common.alpha_step,
        steps: common.steps,
        quiet: common.quiet,
    };
    let quiet = overrides.quiet;

    match cli::run(command, &common.config, &overrides) {
        Ok(out) => {
            if !quiet {
                report(&out.properties);
                for m in &out.messages {
                    println!("{}", m.trim_end());
                }
                for p in &out.written {
                    println!("wrote {}", p.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let cli::CliError::Verification { properties, .. } = &e {
                report(properties);
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn report(properties: &[shootcurve::verify::PropertyResult]) {
    for p in properties {
        println!("{} {}: {}", if p.passed { "PASS" } else { "FAIL" }, p.name, p.detail);
    }
}
