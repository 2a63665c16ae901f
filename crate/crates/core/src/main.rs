use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shapefeat::features::FeatureParams;
use shapefeat::pipeline::{
    run_create_label, run_extract, run_nifti, CreateLabelConfig, Mode, NiftiConfig, Preprocessing, RunConfig,
    RunSummary,
};
use shapefeat::polygonal::{DEFAULT_DP_EPSILON, DEFAULT_MPP_CELL};
use shapefeat::raster::{DEFAULT_CLOSE_RADIUS, DEFAULT_SIGMA, DEFAULT_THRESHOLD};
use shapefeat::signature::DEFAULT_SAMPLES;
use shapefeat::Error;

/// Shape features from folders of binary masks
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Extract per-region shape features to CSV and render feature maps
    Extract(ExtractArgs),
    /// Write label templates (CSV) and numbered overlays for annotation
    CreateLabel(CreateLabelArgs),
    /// Build NIfTI label volumes from annotated templates and verify them
    Nifti(NiftiArgs),
}

#[derive(Args, Debug)]
struct PreprocessArgs {
    /// Luma threshold; pixels strictly above it are foreground
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: u8,
    /// Gaussian smoothing sigma in pixels
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    sigma: f64,
    /// Half-width of the square closing element
    #[arg(long = "close_radius", default_value_t = DEFAULT_CLOSE_RADIUS)]
    close_radius: usize,
}

impl PreprocessArgs {
    fn config(&self) -> Preprocessing {
        Preprocessing { threshold: self.threshold, sigma: self.sigma, close_radius: self.close_radius }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LabelMode {
    #[value(name = "s", alias = "single")]
    Single,
    #[value(name = "m", alias = "multi")]
    Multi,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    /// Folder with binary mask images
    #[arg(long)]
    input: PathBuf,
    /// Output CSV path
    #[arg(long = "csv_file")]
    csv_file: PathBuf,
    /// Folder for feature-map images; omitted means no maps
    #[arg(long)]
    output: Option<PathBuf>,
    /// Single-class (s) or multi-class (m) extraction
    #[arg(long, value_enum, default_value = "s")]
    label: LabelMode,
    /// Folder with <stem>.nii label volumes (multi-class only)
    #[arg(long = "nifti_folder")]
    nifti_folder: Option<PathBuf>,
    /// Boundary samples per signature
    #[arg(long = "n_samples", default_value_t = DEFAULT_SAMPLES)]
    n_samples: usize,
    /// Douglas-Peucker tolerance in pixels
    #[arg(long = "dp_epsilon", default_value_t = DEFAULT_DP_EPSILON)]
    dp_epsilon: f64,
    /// Minimum perimeter polygon cell size in pixels
    #[arg(long = "mpp_cell", default_value_t = DEFAULT_MPP_CELL)]
    mpp_cell: usize,
    #[command(flatten)]
    preprocess: PreprocessArgs,
}

#[derive(Args, Debug)]
struct CreateLabelArgs {
    /// Folder with binary mask images
    #[arg(long = "folder_path")]
    folder_path: PathBuf,
    /// Folder for <stem>.csv templates
    #[arg(long = "output_csv_folder")]
    output_csv_folder: PathBuf,
    /// Folder for <stem>_labels.png overlays
    #[arg(long = "output_image_folder")]
    output_image_folder: PathBuf,
    #[command(flatten)]
    preprocess: PreprocessArgs,
}

#[derive(Args, Debug)]
struct NiftiArgs {
    /// Folder with binary mask images
    #[arg(long = "folder_path")]
    folder_path: PathBuf,
    /// Folder with annotated <stem>.csv tables
    #[arg(long = "input_csv_folder")]
    input_csv_folder: PathBuf,
    /// Folder for <stem>.nii volumes
    #[arg(long = "nifti_save_dir")]
    nifti_save_dir: PathBuf,
    /// Folder for <stem>_labeled.png previews
    #[arg(long = "label_save_dir")]
    label_save_dir: PathBuf,
    #[command(flatten)]
    preprocess: PreprocessArgs,
}

fn run(command: Command) -> Result<RunSummary, Error> {
    match command {
        Command::Extract(a) => {
            let mut config = RunConfig::new(a.input, a.csv_file);
            config.output = a.output;
            config.mode = match a.label {
                LabelMode::Single => Mode::Single,
                LabelMode::Multi => Mode::Multi,
            };
            config.nifti_folder = a.nifti_folder;
            config.preprocessing = a.preprocess.config();
            config.features = FeatureParams { n_samples: a.n_samples, dp_epsilon: a.dp_epsilon, mpp_cell: a.mpp_cell };
            run_extract(&config)
        }
        Command::CreateLabel(a) => run_create_label(&CreateLabelConfig {
            folder: a.folder_path,
            csv_out: a.output_csv_folder,
            image_out: a.output_image_folder,
            preprocessing: a.preprocess.config(),
        }),
        Command::Nifti(a) => {
            let summary = run_nifti(&NiftiConfig {
                folder: a.folder_path,
                csv_folder: a.input_csv_folder,
                nifti_out: a.nifti_save_dir,
                label_out: a.label_save_dir,
                preprocessing: a.preprocess.config(),
            })?;
            for (stem, report) in &summary.reports {
                println!("{stem}: {report}");
            }
            Ok(summary)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(summary) => {
            if !summary.failures.is_empty() {
                eprintln!("{} of {} files failed", summary.failures.len(), summary.files);
            }
            ExitCode::from(summary.exit_code() as u8)
        }
        Err(e @ Error::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {:#}", anyhow::Error::new(e).context("run aborted"));
            ExitCode::from(1)
        }
    }
}
