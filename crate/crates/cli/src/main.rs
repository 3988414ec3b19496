//! `plancherel`: seeded runs of the verification suites.
//!
//! Exit codes: 0 all checks pass, 1 a check failed, 2 configuration or
//! resource error.

mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use plancherel_core::pipeline::{
    covariance_suite, exact_check_suite, sample_suite, verify_suite, wigner_suite, SuiteOutput,
};
use serde::Serialize;

use manifest::{render_csv, render_text, write_run, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "plancherel", version, about = "Verification suites for one-sided Plancherel characters")]
struct Cli {
    /// TOML configuration; absent tables and keys take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed of the selected suite.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for replica batches.
    #[arg(long, global = true, env = "PLANCHEREL_THREADS")]
    threads: Option<usize>,
    /// Output directory for artifacts and the manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact combinatorics, measure and state oracles.
    ExactCheck,
    /// RSK sampler batch with per-replica records.
    Sample,
    /// Limiting covariance tables by quadrature.
    Covariance,
    /// Wigner trace covariance against overlap.
    Wigner,
    /// Sampler against quadrature and exact states over a ladder of L.
    Verify,
    /// Render a manifest as text or CSV.
    Report {
        /// Manifest file or the directory holding it.
        manifest: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Text,
    Csv,
}

fn with_seed<T: Serialize>(
    name: &str,
    mut params: T,
    seed: Option<u64>,
    seed_field: impl Fn(&mut T) -> &mut u64,
    run: impl Fn(&T) -> plancherel_core::Result<SuiteOutput>,
) -> Result<(RunManifest, SuiteOutput), String> {
    if let Some(s) = seed {
        *seed_field(&mut params) = s;
    }
    let used = *seed_field(&mut params);
    let output = run(&params).map_err(|e| e.to_string())?;
    let json = serde_json::to_value(&params).map_err(|e| e.to_string())?;
    Ok((RunManifest::new(name, json, Some(used), &output), output))
}

fn run(cli: &Cli) -> Result<bool, String> {
    if let Command::Report { manifest, format } = &cli.command {
        let (m, dir) = RunManifest::read(manifest)?;
        for a in &m.artifacts {
            if !dir.join(a).is_file() {
                return Err(format!("artifact {a} listed in the manifest is missing"));
            }
        }
        print!(
            "{}",
            match format {
                Format::Text => render_text(&m),
                Format::Csv => render_csv(&m),
            }
        );
        return Ok(m.passed);
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err("--threads must be positive".into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let file = config::load(cli.config.as_deref())?;
    let (manifest, output) = match &cli.command {
        Command::ExactCheck => with_seed("exact-check", file.exact_check, cli.seed, |c| &mut c.seed, exact_check_suite)?,
        Command::Sample => with_seed("sample", file.sample, cli.seed, |c| &mut c.seed, sample_suite)?,
        Command::Wigner => with_seed("wigner", file.wigner, cli.seed, |c| &mut c.seed, wigner_suite)?,
        Command::Verify => with_seed("verify", file.verify, cli.seed, |c| &mut c.seed, |c| {
            verify_suite(c).map(|(out, _)| out)
        })?,
        Command::Covariance => {
            if cli.seed.is_some() {
                return Err("covariance is deterministic and takes no seed".into());
            }
            let output = covariance_suite(&file.covariance).map_err(|e| e.to_string())?;
            let json = serde_json::to_value(&file.covariance).map_err(|e| e.to_string())?;
            (RunManifest::new("covariance", json, None, &output), output)
        }
        Command::Report { .. } => unreachable!("handled above"),
    };
    write_run(&cli.out, &manifest, &output)?;
    print!("{}", render_text(&manifest));
    Ok(manifest.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
