use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use g2star_core::io::parse_vector;
use g2star_core::{parse_spec, render_text, run, Command, Error, Granularity, Mode, RunOptions, Scenario};

/// Almost paracontact metric structures from G2* 3-forms on 7-dimensional
/// Lie algebras.
#[derive(Parser)]
#[command(name = "g2star", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Metric, Levi-Civita connection and cross-product tables.
    Tables(Common),
    /// Check the axioms of the induced structure.
    Audit(Common),
    /// Full classification report.
    Classify(Common),
    /// Run a nonexistence argument on the symbolic structure.
    Chain {
        #[command(flatten)]
        common: Common,
        /// `normal`, `paracontact`, `w2`, `all` or a scenario file.
        #[arg(long)]
        scenario: String,
    },
    /// Survey of random unit timelike xi in floating point.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    /// Problem file (TOML).
    file: PathBuf,
    /// Seven comma-separated scalars, overriding `xi` in the file.
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    /// `literal` or `normalized`, overriding the file.
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long, default_value_t = Granularity::Grouped)]
    granularity: Granularity,
    /// Scale a timelike xi to unit length instead of rejecting it.
    #[arg(long)]
    rescale: bool,
    #[arg(long)]
    json: bool,
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Validation {
        location: path.display().to_string(),
        reason: e.to_string(),
    })
}

fn scenarios(name: &str) -> Result<Vec<Scenario>, Error> {
    match name {
        "all" => ["normal", "paracontact", "w2"].into_iter().map(Scenario::builtin).collect(),
        "normal" | "paracontact" | "w2" => Ok(vec![Scenario::builtin(name)?]),
        path => Ok(vec![Scenario::parse(&read(Path::new(path))?)?]),
    }
}

fn execute(cmd: Cmd) -> Result<String, Error> {
    let (common, command) = match cmd {
        Cmd::Tables(c) => (c, Command::Tables),
        Cmd::Audit(c) => (c, Command::Audit),
        Cmd::Classify(c) => (c, Command::Classify),
        Cmd::Chain { common, scenario } => (common, Command::Chain(scenarios(&scenario)?)),
        Cmd::Sample { common, n, seed } => (common, Command::Sample { n, seed }),
    };
    let spec = parse_spec(&read(&common.file)?)?;
    let opts = RunOptions {
        mode: common.mode,
        xi: common.xi.as_deref().map(|x| parse_vector(x, spec.radicand)).transpose()?,
        granularity: common.granularity,
        rescale: common.rescale,
    };
    let report = run(&command, &spec, &opts)?;
    Ok(if common.json {
        report.to_json()
    } else {
        render_text(&report)
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(out) => {
            println!("{}", out.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
