//! `pansharp` command-line tool.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pansharp::Error;

#[derive(Debug, Parser)]
#[command(name = "pansharp", version, about = "Pan-sharpening fusion and quality assessment")]
struct Cli {
    /// JSON file with option values; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Maximum number of worker threads.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fuse the PAN and MS bands of a scene manifest.
    Fuse(FuseArgs),
    /// Score fused bands against reference bands.
    Metrics(MetricsArgs),
    /// Run the reduced-resolution protocol and write a report directory.
    Protocol(ProtocolArgs),
    /// Emit the QNR-versus-exponent grid-search curve as CSV.
    QnrCurve(CurveArgs),
    /// Write a seeded synthetic scene as PGM files plus manifests.
    MakeScene(SceneArgs),
    /// Check NSCT reconstruction on a seeded random image.
    NsctSelftest(SelftestArgs),
}

/// Fusion flags shared by several commands.
#[derive(Debug, Clone, Default, Args)]
pub struct FusionFlags {
    /// Injection exponent in [0, 1]; omit to select it by QNR grid search.
    #[arg(long)]
    pub a: Option<f64>,
    /// Comma-separated non-negative band weights; omit to fit them against PAN.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    /// Grid step of the exponent search.
    #[arg(long)]
    pub a_step: Option<f64>,
    /// Guard on Brovey denominators.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// NSCT direction counts per level, finest first (e.g. 8,8).
    #[arg(long, value_delimiter = ',')]
    pub dirs: Option<Vec<usize>>,
    /// NSCT boundary extension: symmetric, periodic or zero.
    #[arg(long)]
    pub boundary: Option<String>,
    /// MS expansion kernel: bilinear or bicubic.
    #[arg(long)]
    pub interpolation: Option<String>,
    /// Block size of the QNR quality index.
    #[arg(long)]
    pub qnr_window: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FuseArgs {
    /// brovey, adaptive-brovey, improved-adaptive-brovey, ihs or pca.
    #[arg(long)]
    pub method: Option<String>,
    /// Scene manifest with MS bands, a PAN entry and the ratio.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub fusion: FusionFlags,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    /// Fused bands: a manifest file or a directory of band_<i>.pgm files.
    #[arg(long)]
    pub fused: Option<PathBuf>,
    /// Reference bands: a manifest file or a directory of band_<i>.pgm files.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Scene manifest (low-resolution MS and PAN) enabling QNR.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// Resolution ratio used by ERGAS and QNR.
    #[arg(long)]
    pub ratio: Option<usize>,
    /// Block size of the QNR quality index.
    #[arg(long)]
    pub qnr_window: Option<usize>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Overrides applied on top of the experiment spec.
#[derive(Debug, Clone, Default, Args)]
pub struct SpecFlags {
    /// Scene manifest for a real-data run (replaces the synthetic input).
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Synthetic scene side length in PAN pixels.
    #[arg(long)]
    pub size: Option<usize>,
    /// Synthetic scene band count.
    #[arg(long)]
    pub bands: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub ratio: Option<usize>,
    /// Comma-separated method labels (`oracle` returns the reference).
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    /// Output directory; each run writes into a subdirectory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub run_id: Option<String>,
    #[command(flatten)]
    pub fusion: FusionFlags,
}

#[derive(Debug, Args)]
pub struct ProtocolArgs {
    #[command(flatten)]
    pub spec: SpecFlags,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// adaptive-brovey or improved-adaptive-brovey.
    #[arg(long)]
    pub method: Option<String>,
    /// CSV destination; stdout when omitted.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub spec: SpecFlags,
}

#[derive(Debug, Args)]
pub struct SceneArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub bands: Option<usize>,
    #[arg(long)]
    pub ratio: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long)]
    pub levels: Option<usize>,
    /// Direction counts per level, finest first.
    #[arg(long, value_delimiter = ',')]
    pub dirs: Option<Vec<usize>>,
    #[arg(long)]
    pub size: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub boundary: Option<String>,
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::InvalidParameter("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Config(e.to_string()))?;
    }
    let file = config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Fuse(args) => commands::fuse(args, file),
        Command::Metrics(args) => commands::metrics(args, file),
        Command::Protocol(args) => commands::protocol(args, file),
        Command::QnrCurve(args) => commands::qnr_curve(args, file),
        Command::MakeScene(args) => commands::make_scene(args, file),
        Command::NsctSelftest(args) => commands::nsct_selftest(args, file),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error: usage: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}: {}", e.kind(), e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
