//! `siegel`: batch runs over the siegel library driven by one JSON config.

mod compute;
mod config;
mod output;
mod reproduce;
mod sample;
mod verify;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use siegel::{Kind, System};

use config::{parse_domain, Command, DiscMapChoice, Example, Format, Function, RunConfig, Suite};
use output::Report;

const EXIT_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Flags override the fields of the JSON config.
#[derive(Parser, Debug)]
#[command(name = "siegel", version, about = "Kernels, boundary measures and Clark measures on symmetric Siegel domains")]
struct Args {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// halfline, polydisc:N, matrix:PxQ, spin:D or a JSON kind record.
    #[arg(long, value_parser = parse_domain)]
    domain: Option<Kind>,
    #[arg(long, value_enum)]
    command: Option<Command>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "quad.radius")]
    quad_radius: Option<f64>,
    #[arg(long = "quad.nodes")]
    quad_nodes: Option<usize>,
    #[arg(long, value_enum)]
    example: Option<Example>,
    /// Comma-separated example parameters.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    suite: Option<Suite>,
    /// Function to disintegrate.
    #[arg(long, value_enum)]
    function: Option<Function>,
    /// Map whose Clark measures are computed.
    #[arg(long, value_enum)]
    map: Option<DiscMapChoice>,
    /// arg α of the Clark parameter.
    #[arg(long, allow_hyphen_values = true)]
    alpha_angle: Option<f64>,
}

fn load(args: Args) -> Result<RunConfig, String> {
    let mut cfg = match &args.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(d) = args.domain {
        cfg.domain = d;
    }
    if let Some(c) = args.command {
        cfg.command = Some(c);
    }
    if let Some(o) = args.out {
        cfg.out = Some(o);
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(r) = args.quad_radius {
        cfg.quad.radius = r;
    }
    if let Some(n) = args.quad_nodes {
        cfg.quad.nodes = n;
    }
    if let Some(e) = args.example {
        cfg.example = Some(e);
    }
    if let Some(p) = args.params {
        cfg.params = Some(p);
    }
    if let Some(s) = args.suite {
        cfg.suite = s;
    }
    if let Some(f) = args.function {
        cfg.function = f;
    }
    if let Some(m) = args.map {
        cfg.map = m;
    }
    if let Some(a) = args.alpha_angle {
        cfg.alpha_angle = a;
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), String> {
    let command = cfg.command.ok_or("no command given")?;
    cfg.quad.validate().map_err(|e| e.to_string())?;
    let sys = System::new(cfg.domain.clone()).map_err(|e| e.to_string())?;
    match command {
        Command::Reproduce => {
            cfg.example.ok_or("reproduce needs an example")?;
            if let Some(p) = &cfg.params {
                if p.len() != 2 {
                    return Err(format!("examples take two parameters, got {}", p.len()));
                }
            }
        }
        Command::Disintegrate => compute::check_function(cfg.function, sys.kind())?,
        Command::Clark => {
            if !(sys.is_polydisc() || *sys.kind() == Kind::HalfLine) {
                return Err("clark runs on the half-line or a polydisc".into());
            }
        }
        Command::KernelEval | Command::Verify => {}
    }
    if cfg.samples == 0 {
        return Err("samples must be positive".into());
    }
    Ok(())
}

fn execute(cfg: &RunConfig) -> Result<Report, String> {
    match cfg.command.expect("validated") {
        Command::Reproduce => reproduce::run(cfg),
        Command::Verify => verify::run(cfg),
        Command::KernelEval => compute::kernel_eval(cfg),
        Command::Disintegrate => compute::run_disintegrate(cfg),
        Command::Clark => compute::run_clark(cfg),
    }
}

fn write(cfg: &RunConfig, report: &Report) -> std::io::Result<()> {
    let sink: Box<dyn Write> = match &cfg.out {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = BufWriter::new(sink);
    match cfg.format {
        Format::Csv => report.table.write_csv(&mut w)?,
        Format::Json => {
            let doc = report.json.clone().unwrap_or_else(|| report.table.to_json());
            serde_json::to_writer_pretty(&mut w, &doc)?;
            writeln!(w)?;
        }
    }
    w.flush()
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let cfg = match load(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let report = match execute(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_FAILED);
        }
    };
    if let Err(e) = write(&cfg, &report) {
        eprintln!("error: writing output: {e}");
        return ExitCode::from(EXIT_FAILED);
    }
    match report.failure {
        Some(row) => {
            eprintln!("failed: {row}");
            ExitCode::from(EXIT_FAILED)
        }
        None => ExitCode::SUCCESS,
    }
}
