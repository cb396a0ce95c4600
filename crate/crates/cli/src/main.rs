mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use commands::{Ctx, Usage};

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match e.downcast_ref::<morrey_lab::Error>() {
        Some(morrey_lab::Error::Divergent(_)) => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            anyhow::bail!(Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    }
    let ctx = Ctx { json: cli.json, out_dir: cli.out_dir, config: cli.config };
    match cli.command {
        Command::KernelNorm(a) => commands::kernel_norm(&ctx, a),
        Command::Apply(a) => commands::apply(&ctx, a),
        Command::Maximal(a) => commands::maximal(&ctx, a),
        Command::Norm(a) => commands::norm(&ctx, a),
        Command::Verify(a) => commands::verify(&ctx, a),
        Command::Compare(a) => commands::compare(&ctx, a),
        Command::ParamScan(a) => commands::param_scan(&ctx, a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
