use std::fs;
use std::io::{self, IsTerminal, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use vmlab_core::selftest::{self, Fault};
use vmlab_core::InstrumentKind;
use vmlab_service::{ServeConfig, ServeError, DATA_DIR_ENV};

use vmlab_cli::{gen_csv, grade_csv, render, RenderFormat};

#[derive(Parser)]
#[command(name = "vmlab", version, about = "Virtual metrology lab: service, worksheets and self-test")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the HTTP service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, env = DATA_DIR_ENV, default_value = "vmlab-data")]
        data_dir: PathBuf,
        /// Generator seed for a fresh data directory.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write a worksheet of seeded exercises with their answers.
    Gen {
        #[arg(long, value_parser = parse_kind)]
        instrument: InstrumentKind,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        count: u32,
        #[arg(long)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grade an answer file with columns kind,target_ticks,answer.
    Grade {
        #[arg(long)]
        answers: PathBuf,
    },
    /// Print an instrument at a position as geometry JSON or SVG.
    Render {
        #[arg(long, value_parser = parse_kind)]
        instrument: InstrumentKind,
        #[arg(long)]
        ticks: u64,
        #[arg(long)]
        show_reading: bool,
        #[arg(long, value_enum, default_value_t = RenderFormat::Geometry)]
        format: RenderFormat,
    },
    /// Write the offline lab bundle.
    Export {
        #[arg(long)]
        out: PathBuf,
    },
    /// Exhaustive round-trip and vernier checks over every default instrument.
    Selftest {
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    Roundtrip,
    Coincidence,
}

fn parse_kind(s: &str) -> Result<InstrumentKind, String> {
    s.parse().map_err(|e: vmlab_core::model::UnknownInstrument| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Serve {
            port,
            host,
            data_dir,
            seed,
        } => serve(ServeConfig {
            addr: SocketAddr::new(host, port),
            data_dir,
            seed,
        }),
        Command::Gen {
            instrument,
            count,
            seed,
            out,
        } => {
            let csv = gen_csv(instrument, count, seed);
            match out {
                Some(path) => fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
                None => io::stdout().write_all(csv.as_bytes())?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Grade { answers } => {
            let file = fs::File::open(&answers).with_context(|| format!("opening {}", answers.display()))?;
            let report = grade_csv(io::BufReader::new(file)).with_context(|| answers.display().to_string())?;
            print!("{report}");
            Ok(if report.all_correct() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Render {
            instrument,
            ticks,
            show_reading,
            format,
        } => {
            let doc = render(instrument, ticks, show_reading, format)?;
            io::stdout().write_all(doc.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Export { out } => {
            let files = vmlab_service::export::export_bundle(&out)
                .with_context(|| format!("exporting to {}", out.display()))?;
            println!("wrote {} files to {}", files.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Selftest { inject_fault } => {
            let fault = inject_fault.map(|f| match f {
                FaultArg::Roundtrip => Fault::RoundTripOffByOne,
                FaultArg::Coincidence => Fault::CoincidenceOffByOne,
            });
            let start = Instant::now();
            let report = selftest::run_with(&selftest::default_specs(), fault);
            for failure in report.failures.iter().take(10) {
                eprintln!("{failure}");
            }
            println!("{report} ({} ms)", start.elapsed().as_millis());
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn serve(config: ServeConfig) -> Result<ExitCode> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(io::stderr)
        .with_ansi(io::stderr().is_terminal())
        .init();
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let (listener, app) = vmlab_service::bind(&config).await.map_err(|e| match e {
            ServeError::Lab(e) => anyhow::anyhow!("data directory {}: {e}", config.data_dir.display()),
            other => other.into(),
        })?;
        println!("listening on http://{}", listener.local_addr()?);
        io::stdout().flush()?;
        vmlab_service::run(listener, app).await?;
        Ok(ExitCode::SUCCESS)
    })
}
