//! `ggdp`: green GDP accounts, grey relational analysis and GM(1,1)
//! forecasts from country indicator panels.

mod commands;
mod config;
mod output;
mod transport;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ggdp_core::panel::fetch::DEFAULT_API_BASE;
use ggdp_core::panel::CsvLayout;
use ggdp_core::{Error, ErrorKind, Result};

use crate::commands::Run;
use crate::config::{BridgeChoice, InputSpec, RunConfig};
use crate::output::Outputs;

#[derive(Parser)]
#[command(name = "ggdp", version, about = "Green GDP accounting toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build green GDP accounts; writes report.json, ggdp.csv and one chart per country.
    Compute(RunArgs),
    /// Grey relational grades of each country's indicators against a parent series.
    Gra(RunArgs),
    /// GM(1,1) fits and forecasts, plus trend correlations.
    Forecast(RunArgs),
    /// Percent-change scores for climate indicators alongside GGDP.
    Impact(RunArgs),
    /// Download indicators from the World Bank API into panel.csv and panel.json.
    Fetch {
        #[command(flatten)]
        run: RunArgs,
        /// API base URL.
        #[arg(long, env = "GGDP_API_BASE", default_value = DEFAULT_API_BASE)]
        api_base: String,
    },
    /// Check input panels and list every issue.
    Validate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Long-layout CSV or panel JSON input; replaces the configured inputs.
    #[arg(long = "input", value_name = "PATH")]
    inputs: Vec<PathBuf>,
    /// Restrict to these countries (ISO alpha-3).
    #[arg(long = "country", value_name = "CODE")]
    countries: Vec<String>,
    /// Grey relational resolution coefficient, in (0, 1].
    #[arg(long)]
    rho: Option<f64>,
    /// Compare raw values instead of mean-normalized ones.
    #[arg(long)]
    no_normalize: bool,
    /// Forecast steps past the sample.
    #[arg(long)]
    horizon: Option<usize>,
    /// EPCL/EPDL bridge coefficients.
    #[arg(long, value_enum)]
    bridge: Option<BridgeChoice>,
    /// Include full coefficient matrices in the report.
    #[arg(long)]
    full: bool,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if !self.inputs.is_empty() {
            cfg.inputs = self
                .inputs
                .iter()
                .map(|path| InputSpec {
                    path: path.clone(),
                    layout: CsvLayout::Long,
                })
                .collect();
        }
        if !self.countries.is_empty() {
            cfg.countries = self.countries.iter().map(|c| c.to_ascii_uppercase()).collect();
        }
        if let Some(rho) = self.rho {
            cfg.gra.rho = rho;
        }
        if self.no_normalize {
            cfg.gra.normalize = false;
        }
        if let Some(h) = self.horizon {
            cfg.forecast.horizon = h;
        }
        if let Some(b) = self.bridge {
            cfg.bridge = b;
        }
        if self.full {
            cfg.full = true;
        }
        cfg.check()?;
        Ok(cfg)
    }
}

fn exit_code(kind: ErrorKind) -> u8 {
    match kind {
        ErrorKind::Input => 1,
        ErrorKind::Computation => 2,
        ErrorKind::Io => 3,
    }
}

fn emit(run: &Run, outputs: Outputs) -> Result<()> {
    for path in outputs.commit(&run.cfg.out_dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn execute(command: Command) -> Result<()> {
    let (name, args) = match &command {
        Command::Compute(a) => ("compute", a),
        Command::Gra(a) => ("gra", a),
        Command::Forecast(a) => ("forecast", a),
        Command::Impact(a) => ("impact", a),
        Command::Fetch { run, .. } => ("fetch", run),
        Command::Validate(a) => ("validate", a),
    };
    let run = Run {
        cfg: args.config()?,
        command: name,
    };
    match command {
        Command::Compute(_) => emit(&run, commands::compute(&run)?),
        Command::Gra(_) => emit(&run, commands::gra(&run)?),
        Command::Forecast(_) => emit(&run, commands::forecast(&run)?),
        Command::Impact(_) => emit(&run, commands::impact(&run)?),
        Command::Fetch { api_base, .. } => {
            let transport = transport::UreqTransport::new();
            emit(&run, commands::fetch(&run, &transport, &api_base)?)
        }
        Command::Validate(_) => commands::validate_inputs(&run),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(exit_code(ErrorKind::Input))
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ggdp: {}", describe(&e));
            ExitCode::from(exit_code(e.kind()))
        }
    }
}

fn describe(e: &Error) -> String {
    let class = match e.kind() {
        ErrorKind::Input => "input error",
        ErrorKind::Computation => "computation error",
        ErrorKind::Io => "I/O error",
    };
    format!("{class}: {e}")
}
