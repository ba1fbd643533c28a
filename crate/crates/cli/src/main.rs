use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use kmslab_cli::{execute, CliError, Settings};

/// Diagnostics for conformal measures and KMS states of the ℕ² groupoid.
///
/// Every flag can also be given in a `key = value` config file; flags win.
#[derive(Parser, Debug)]
#[command(name = "kms-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Plain-text `key = value` config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Inverse temperature (p/q, decimal, surd or cf:).
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<String>,
    /// θ = c(e₂) (p/q, decimal, surd or cf:).
    #[arg(long, global = true, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Seed for every sampling step [default: 0].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance for measured records [default: per command].
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Cylinder depth [default: per command].
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Any other setting, as `key=value` (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the existence gate over a grid of (β, θ).
    Exists {
        /// Comma-separated β values [default: -2,-1,1,2].
        #[arg(long, allow_hyphen_values = true)]
        betas: Option<String>,
        /// Comma-separated θ values [default: -0.5,0,0.5,1,pi].
        #[arg(long, allow_hyphen_values = true)]
        thetas: Option<String>,
    },
    /// Run the invariant suite of a measure or model:
    /// orbit, adding-machine, real-line, cone, rotation2, rotation3.
    Check {
        target: Option<String>,
        /// Orbit base point, e.g. "(0)*.(1)*".
        #[arg(long)]
        x: Option<String>,
        /// Rotation angle or cone slope in (0, 1) [default: sqrt(2)-1].
        #[arg(long)]
        alpha: Option<String>,
        /// Adding-machine bias p in (0, 1/2); overrides --beta.
        #[arg(long)]
        p: Option<String>,
        /// Window for the adding-machine Q-injectivity record.
        #[arg(long)]
        window: Option<i64>,
        /// Grid size of the rotation3 density estimate [default: 16384].
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Verify the KMS condition for a state family:
    /// cond-exp, type-i, theta-zero, tracial.
    Kms {
        family: Option<String>,
        #[arg(long)]
        x: Option<String>,
        /// Circle or torus measure, e.g. "haar" or "0.1:0.5,haar:0.5" or "(0.2,0.5):1".
        #[arg(long)]
        mu: Option<String>,
        /// Type-I character angle in turns [default: 0].
        #[arg(long, allow_hyphen_values = true)]
        character: Option<f64>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Ratio-set histogram of a model; writes CSV next to the report.
    Ratio {
        model: Option<String>,
        #[arg(long)]
        samples: Option<usize>,
        /// CSV output path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Check the unimodular transport for coprime (p, q).
    Transport {
        #[arg(long)]
        p: Option<i64>,
        #[arg(long)]
        q: Option<i64>,
        /// Check all coprime pairs up to this bound [default: 50].
        #[arg(long)]
        max: Option<i64>,
    },
}

fn settings(cli: &Cli) -> Result<(String, Settings), CliError> {
    let mut s = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    s.set_opt("beta", cli.beta.as_ref());
    s.set_opt("theta", cli.theta.as_ref());
    s.set_opt("seed", cli.seed);
    s.set_opt("tol", cli.tol);
    s.set_opt("depth", cli.depth);
    s.set_opt("out", cli.out.as_ref().map(|p| p.display().to_string()));
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        s.set(k, v.trim());
    }
    let name = match &cli.command {
        Command::Exists { betas, thetas } => {
            s.set_opt("betas", betas.as_ref());
            s.set_opt("thetas", thetas.as_ref());
            "exists"
        }
        Command::Check {
            target,
            x,
            alpha,
            p,
            window,
            grid,
        } => {
            s.set_opt("target", target.as_ref());
            s.set_opt("x", x.as_ref());
            s.set_opt("alpha", alpha.as_ref());
            s.set_opt("p", p.as_ref());
            s.set_opt("window", *window);
            s.set_opt("grid", *grid);
            "check"
        }
        Command::Kms {
            family,
            x,
            mu,
            character,
            trials,
        } => {
            s.set_opt("family", family.as_ref());
            s.set_opt("x", x.as_ref());
            s.set_opt("mu", mu.as_ref());
            s.set_opt("character", *character);
            s.set_opt("trials", *trials);
            "kms"
        }
        Command::Ratio {
            model,
            samples,
            csv,
        } => {
            s.set_opt("model", model.as_ref());
            s.set_opt("samples", *samples);
            s.set_opt("csv", csv.as_ref().map(|p| p.display().to_string()));
            "ratio"
        }
        Command::Transport { p, q, max } => {
            s.set_opt("p", *p);
            s.set_opt("q", *q);
            s.set_opt("max", *max);
            "transport"
        }
    };
    Ok((name.to_string(), s))
}

fn write(path: &str, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{path}: {e}")))
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    let (name, s) = settings(cli)?;
    let outcome = execute(&name, &s)?;
    let json = outcome.report.to_json();
    match s.raw("out") {
        Some(path) => write(path, &json)?,
        None => print!("{json}"),
    }
    if let Some(csv) = &outcome.csv {
        let path = match (s.raw("csv"), s.raw("out")) {
            (Some(p), _) => Some(p.to_string()),
            (None, Some(out)) => Some(
                PathBuf::from(out)
                    .with_extension("csv")
                    .display()
                    .to_string(),
            ),
            (None, None) => None,
        };
        match path {
            Some(p) => write(&p, csv)?,
            None => eprint!("{csv}"),
        }
    }
    Ok(!outcome.report.failed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("kms-lab: {e}");
            ExitCode::from(2)
        }
    }
}
