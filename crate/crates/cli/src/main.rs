mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Spectral reflectance estimation from RGB images and video.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// Worker threads for estimation, search and video stages.
    #[arg(long, global = true, env = "SPECTRACAST_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic spectral scene or video with its highlight mask.
    Datagen(DatagenArgs),
    /// Draw a training set from one or more spectral cubes.
    Sample(SampleArgs),
    /// Render a cube to a PPM image, or a spectral video to raw RGB video.
    Render(RenderArgs),
    /// Fit an estimation model.
    Fit(FitArgs),
    /// Estimate a spectral cube from an RGB image.
    Estimate(EstimateArgs),
    /// Estimate every frame of an RGB video.
    Video(VideoArgs),
    /// Compare estimated spectra against ground truth.
    Evaluate(EvaluateArgs),
    /// Search for a representative training set across images.
    SearchTrain(SearchArgs),
    /// Write one band of a cube as a grayscale PPM.
    BandView(BandViewArgs),
}

#[derive(Args, Debug, Clone)]
pub struct ReportArg {
    /// Also write the run report to this file.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct CameraArg {
    /// `gaussian`, `colorimetric` or a camera spec file.
    #[arg(long, default_value = "gaussian")]
    camera: String,
}

#[derive(Args, Debug, Clone)]
pub struct MethodArgs {
    /// wiener_prior, wiener_data, pseudoinverse, linear, imai_berns or shi_healey.
    #[arg(long, default_value = "pseudoinverse")]
    method: String,
    /// Polynomial combo preset (linear3, sq6, cross6, full12, ...).
    #[arg(long, conflicts_with = "combo_terms")]
    combo: Option<String>,
    /// Explicit combo terms, e.g. "R,G,B,R2,G2,B2".
    #[arg(long)]
    combo_terms: Option<String>,
    /// Basis count for linear, imai_berns and shi_healey.
    #[arg(long)]
    basis: Option<usize>,
    /// Shi-Healey: smallest basis size tried per pixel.
    #[arg(long)]
    basis_from: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DatagenArgs {
    /// Output cube (SPC1), or spectral video (SPVC) with `--frames`.
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth highlight mask (scalar map; video frames stacked vertically).
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Scene size as WIDTHxHEIGHT.
    #[arg(long, default_value = "64x64")]
    size: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 6)]
    materials: usize,
    #[arg(long, default_value_t = 0.03)]
    highlight_fraction: f64,
    #[arg(long, default_value_t = 3.0)]
    highlight_gain: f64,
    #[arg(long, default_value_t = 40.0)]
    smoothness: f64,
    #[arg(long, default_value_t = 0.3)]
    red_bias: f64,
    #[arg(long, default_value_t = 0.01)]
    jitter: f64,
    /// Number of video frames; omit for a single scene.
    #[arg(long)]
    frames: Option<usize>,
    /// Horizontal drift in pixels per frame.
    #[arg(long, default_value_t = 1.0)]
    drift: f64,
    #[arg(long, value_enum, default_value = "f64")]
    encoding: Encoding,
    #[command(flatten)]
    report: ReportArg,
}

#[derive(clap::ValueEnum, Debug, Clone, Copy)]
pub enum Encoding {
    F32,
    F64,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// Source cubes; repeat for several images.
    #[arg(long = "cube", required = true)]
    cubes: Vec<PathBuf>,
    #[command(flatten)]
    camera: CameraArg,
    #[arg(long, default_value_t = 0.05)]
    fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output training set (SPTS).
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    report: ReportArg,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    /// Input cube (SPC1) or spectral video (SPVC).
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    camera: CameraArg,
    /// PPM for a cube, raw RGB video (SPVR) for a spectral video.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    report: ReportArg,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[command(flatten)]
    method: MethodArgs,
    /// Paired training set (SPTS): reflectances and RGB values.
    #[arg(long)]
    train: Option<PathBuf>,
    /// Reflectances only, as spectra CSV.
    #[arg(long, conflicts_with = "train")]
    reflectances: Option<PathBuf>,
    /// `gaussian`, `colorimetric` or a camera spec file.
    #[arg(long)]
    camera: Option<String>,
    /// Output model (SPEM).
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    report: ReportArg,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[arg(long)]
    model: PathBuf,
    /// Input RGB image (P6 PPM).
    #[arg(long)]
    image: PathBuf,
    /// Output cube (SPC1).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "f64")]
    encoding: Encoding,
    #[command(flatten)]
    report: ReportArg,
}

#[derive(Args, Debug)]
pub struct VideoArgs {
    #[arg(long)]
    model: PathBuf,
    /// Raw RGB video (SPVR) or a directory of frame_NNNNNN.ppm files.
    #[arg(long)]
    input: PathBuf,
    /// Output spectral video (SPVC).
    #[arg(long)]
    out: PathBuf,
    /// Reuse the previous spectral frame when similarity >= threshold.
    #[arg(long)]
    skip_threshold: Option<f64>,
    /// Estimation workers; defaults to --threads.
    #[arg(long)]
    workers: Option<usize>,
    /// Frames decoded ahead of the writer.
    #[arg(long)]
    in_flight: Option<usize>,
    /// Fixed delay between decoded frames, in milliseconds.
    #[arg(long)]
    frame_delay_ms: Option<u64>,
    #[command(flatten)]
    report: ReportArg,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Ground truth cube (SPC1) or spectral video (SPVC).
    #[arg(long)]
    truth: PathBuf,
    /// Estimate of the same kind as `--truth`.
    #[arg(long)]
    estimate: PathBuf,
    /// Ground-truth highlight mask; splits the means into masked/unmasked.
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Per-pixel RMSE map output (single cubes only).
    #[arg(long)]
    rmse_map: Option<PathBuf>,
    /// Detected-highlight mask output (single cubes only).
    #[arg(long)]
    highlight_map: Option<PathBuf>,
    #[command(flatten)]
    report: ReportArg,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    /// Candidate images; repeat for several.
    #[arg(long = "cube", required = true)]
    cubes: Vec<PathBuf>,
    #[command(flatten)]
    camera: CameraArg,
    #[command(flatten)]
    method: MethodArgs,
    /// Comma-separated sampling fractions.
    #[arg(long, default_value = "0.01,0.05,0.1,0.2,0.5", value_delimiter = ',')]
    fractions: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Winning training set (SPTS).
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    report: ReportArg,
}

#[derive(Args, Debug)]
pub struct BandViewArgs {
    #[arg(long)]
    cube: PathBuf,
    /// Wavelength in nm; picks the band within half a grid step.
    #[arg(long, conflicts_with = "band", required_unless_present = "band")]
    nm: Option<f64>,
    /// Band index.
    #[arg(long)]
    band: Option<usize>,
    /// Output grayscale PPM.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command, cli.threads) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
