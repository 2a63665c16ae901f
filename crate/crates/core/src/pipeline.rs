//! Folder-level batch runs behind the command-line front end.

use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, info, warn};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::featuremap::{render_feature_map, FeatureMapSpec};
use crate::features::{feature_column_names, format_value, region_features, region_pixel_points, FeatureParams};
use crate::labels::{
    build_label_volume, create_label_template, majority_label, read_label_table, read_nifti, render_label_preview,
    verify_labels, write_nifti, LabelReport,
};
use crate::raster::{
    decode_mask, label_components, largest_region, preprocess, trace_contours, BinaryMask, DEFAULT_CLOSE_RADIUS,
    DEFAULT_SIGMA, DEFAULT_THRESHOLD,
};

const IMAGE_EXTENSIONS: [&str; 5] = ["png", "jpg", "jpeg", "tif", "tiff"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Single,
    Multi,
}

/// Decoding and cleanup applied identically by every command.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preprocessing {
    pub threshold: u8,
    pub sigma: f64,
    pub close_radius: usize,
}

impl Default for Preprocessing {
    fn default() -> Self {
        Self { threshold: DEFAULT_THRESHOLD, sigma: DEFAULT_SIGMA, close_radius: DEFAULT_CLOSE_RADIUS }
    }
}

impl Preprocessing {
    pub fn validate(&self) -> Result<()> {
        if self.threshold == 0 {
            return Err(Error::Usage("threshold must be positive".into()));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Usage(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.close_radius == 0 {
            return Err(Error::Usage("close_radius must be positive".into()));
        }
        Ok(())
    }

    pub fn load(&self, path: &Path) -> Result<BinaryMask> {
        let mask = decode_mask(path, self.threshold)?;
        let name = mask.source_name().to_string();
        Ok(preprocess(&mask, self.sigma, self.close_radius)?.with_name(name))
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub csv_file: PathBuf,
    /// Feature-map folder; `None` skips rendering.
    pub output: Option<PathBuf>,
    pub mode: Mode,
    pub nifti_folder: Option<PathBuf>,
    pub preprocessing: Preprocessing,
    pub features: FeatureParams,
    pub feature_map: FeatureMapSpec,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, csv_file: impl Into<PathBuf>) -> Self {
        Self {
            input: input.into(),
            csv_file: csv_file.into(),
            output: None,
            mode: Mode::Single,
            nifti_folder: None,
            preprocessing: Preprocessing::default(),
            features: FeatureParams::default(),
            feature_map: FeatureMapSpec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.preprocessing.validate()?;
        if self.mode == Mode::Multi && self.nifti_folder.is_none() {
            return Err(Error::Usage("multi-class mode requires --nifti_folder".into()));
        }
        let f = &self.features;
        if f.n_samples < 8 {
            return Err(Error::Usage(format!("n_samples must be at least 8, got {}", f.n_samples)));
        }
        if !(f.dp_epsilon > 0.0 && f.dp_epsilon.is_finite()) {
            return Err(Error::Usage(format!("dp_epsilon must be positive, got {}", f.dp_epsilon)));
        }
        if f.mpp_cell == 0 {
            return Err(Error::Usage("mpp_cell must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CreateLabelConfig {
    pub folder: PathBuf,
    pub csv_out: PathBuf,
    pub image_out: PathBuf,
    pub preprocessing: Preprocessing,
}

#[derive(Debug, Clone)]
pub struct NiftiConfig {
    pub folder: PathBuf,
    pub csv_folder: PathBuf,
    pub nifti_out: PathBuf,
    pub label_out: PathBuf,
    pub preprocessing: Preprocessing,
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRecord {
    pub image_name: String,
    /// 1-based ordinal of the outer contour within its image.
    pub contour_number: usize,
    pub label: Option<u16>,
    pub features: Vec<(String, f64)>,
}

impl FeatureRecord {
    pub fn feature(&self, name: &str) -> Option<f64> {
        self.features.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }
}

#[derive(Debug)]
pub struct FileFailure {
    pub file: String,
    pub error: Error,
}

#[derive(Debug, Default)]
pub struct RunSummary {
    pub files: usize,
    pub records: Vec<FeatureRecord>,
    pub failures: Vec<FileFailure>,
    /// Label verification per mask stem.
    pub reports: Vec<(String, LabelReport)>,
}

impl RunSummary {
    /// 0 on full success, 1 when any file failed or was inconsistent.
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() && self.reports.iter().all(|(_, r)| r.consistent) {
            0
        } else {
            1
        }
    }
}

/// Image files in `folder`, sorted by file name.
pub fn list_images(folder: &Path) -> Result<Vec<PathBuf>> {
    if !folder.is_dir() {
        return Err(Error::Usage(format!("input folder {} does not exist", folder.display())));
    }
    let entries = fs::read_dir(folder).map_err(|e| Error::io(folder, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(folder, e))?.path();
        let is_image = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()));
        if is_image && path.is_file() {
            files.push(path);
        }
    }
    if files.is_empty() {
        return Err(Error::Usage(format!("no mask images in {}", folder.display())));
    }
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn report_failures(failures: &[FileFailure]) {
    for f in failures {
        log::error!("{}: {}", f.file, f.error);
    }
}

fn extract_image(path: &Path, config: &RunConfig) -> Result<Vec<FeatureRecord>> {
    let image_name = file_name(path);
    let mask = config.preprocessing.load(path)?;
    let labeled = label_components(&mask);
    let contours = trace_contours(&labeled);

    let volume = match (config.mode, &config.nifti_folder) {
        (Mode::Multi, Some(dir)) => {
            let vol = read_nifti(&dir.join(format!("{}.nii", file_stem(path))))?;
            if (vol.width(), vol.height()) != (mask.width(), mask.height()) {
                return Err(Error::DimensionMismatch {
                    mask_w: mask.width(),
                    mask_h: mask.height(),
                    vol_w: vol.width(),
                    vol_h: vol.height(),
                });
            }
            Some(vol)
        }
        _ => None,
    };

    let largest = largest_region(&labeled).ok();
    let mut largest_features = None;
    let mut records = Vec::new();
    let columns = feature_column_names();
    for (ordinal, outer) in contours.iter().filter(|c| !c.is_hole).enumerate() {
        let region = outer.region_label;
        let pixels = labeled.region_pixels(region);
        let label = match &volume {
            Some(vol) => match majority_label(vol, &pixels) {
                Some(0) | None => {
                    debug!("{image_name}: contour {} is background-labeled, skipped", ordinal + 1);
                    None
                }
                l => l,
            },
            None => None,
        };
        let wanted = volume.is_none() || label.is_some();
        if !wanted && Some(region) != largest {
            continue;
        }
        let holes: Vec<_> = contours.iter().filter(|c| c.is_hole && c.region_label == region).collect();
        let points = region_pixel_points(&labeled, region);
        let feats = match region_features::<f64>(outer, &holes, &points, &config.features) {
            Ok(f) => f,
            Err(e) => {
                warn!("{image_name}: contour {} skipped: {e}", ordinal + 1);
                continue;
            }
        };
        if wanted {
            records.push(FeatureRecord {
                image_name: image_name.clone(),
                contour_number: ordinal + 1,
                label,
                features: columns.iter().cloned().zip(feats.values()).collect(),
            });
        }
        if Some(region) == largest {
            largest_features = Some(feats);
        }
    }

    if let Some(dir) = &config.output {
        match &largest_features {
            Some(roi) => {
                let img = render_feature_map(&mask, roi, &config.feature_map);
                let out = dir.join(format!("{}_featuremap.png", file_stem(path)));
                img.save(&out)?;
            }
            None => info!("{image_name}: no usable region, feature map skipped"),
        }
    }
    Ok(records)
}

/// Writes records with a header row; `multi` adds the `label` column.
pub fn write_feature_csv(path: &Path, records: &[FeatureRecord], multi: bool) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["image_name".to_string(), "contour_number".to_string()];
    if multi {
        header.push("label".into());
    }
    header.extend(feature_column_names());
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![r.image_name.clone(), r.contour_number.to_string()];
        if multi {
            row.push(r.label.map(|l| l.to_string()).unwrap_or_default());
        }
        row.extend(r.features.iter().map(|&(_, v)| format_value(v)));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Extracts features from every mask in the input folder and writes the CSV
/// and feature maps. `Err` means a usage or output error; per-file failures
/// are collected in the summary.
pub fn run_extract(config: &RunConfig) -> Result<RunSummary> {
    config.validate()?;
    let files = list_images(&config.input)?;
    if let Some(dir) = &config.output {
        ensure_dir(dir)?;
    }
    let results: Vec<Result<Vec<FeatureRecord>>> = files.par_iter().map(|p| extract_image(p, config)).collect();
    let mut summary = RunSummary { files: files.len(), ..Default::default() };
    for (path, result) in files.iter().zip(results) {
        match result {
            Ok(records) => summary.records.extend(records),
            Err(error) => summary.failures.push(FileFailure { file: file_name(path), error }),
        }
    }
    report_failures(&summary.failures);
    write_feature_csv(&config.csv_file, &summary.records, config.mode == Mode::Multi)?;
    info!("{} rows from {} images written to {}", summary.records.len(), files.len(), config.csv_file.display());
    Ok(summary)
}

/// Writes `<stem>.csv` templates and `<stem>_labels.png` overlays.
pub fn run_create_label(config: &CreateLabelConfig) -> Result<RunSummary> {
    config.preprocessing.validate()?;
    let files = list_images(&config.folder)?;
    ensure_dir(&config.csv_out)?;
    ensure_dir(&config.image_out)?;
    let results: Vec<Result<usize>> = files
        .par_iter()
        .map(|path| {
            let mask = config.preprocessing.load(path)?;
            let stem = file_stem(path);
            create_label_template(
                &mask,
                &config.csv_out.join(format!("{stem}.csv")),
                &config.image_out.join(format!("{stem}_labels.png")),
            )
        })
        .collect();
    let mut summary = RunSummary { files: files.len(), ..Default::default() };
    for (path, result) in files.iter().zip(results) {
        match result {
            Ok(n) => info!("{}: {n} regions", file_name(path)),
            Err(error) => summary.failures.push(FileFailure { file: file_name(path), error }),
        }
    }
    report_failures(&summary.failures);
    Ok(summary)
}

fn nifti_image(path: &Path, config: &NiftiConfig) -> Result<LabelReport> {
    let stem = file_stem(path);
    let csv_path = config.csv_folder.join(format!("{stem}.csv"));
    if !csv_path.is_file() {
        return Err(Error::MissingPair { expected: format!("label table {stem}.csv"), stem });
    }
    let table = read_label_table(&csv_path)?;
    let mask = config.preprocessing.load(path)?;
    let volume = build_label_volume(&mask, &table)?;
    let nii = config.nifti_out.join(format!("{stem}.nii"));
    write_nifti(&volume, &nii)?;
    render_label_preview(&volume).save(config.label_out.join(format!("{stem}_labeled.png")))?;
    Ok(verify_labels(&volume, &table))
}

/// Builds `<stem>.nii` volumes and `<stem>_labeled.png` previews from
/// annotated tables and verifies each one.
pub fn run_nifti(config: &NiftiConfig) -> Result<RunSummary> {
    config.preprocessing.validate()?;
    let files = list_images(&config.folder)?;
    if !config.csv_folder.is_dir() {
        return Err(Error::Usage(format!("label table folder {} does not exist", config.csv_folder.display())));
    }
    ensure_dir(&config.nifti_out)?;
    ensure_dir(&config.label_out)?;
    let results: Vec<Result<LabelReport>> = files.par_iter().map(|p| nifti_image(p, config)).collect();
    let mut summary = RunSummary { files: files.len(), ..Default::default() };
    for (path, result) in files.iter().zip(results) {
        match result {
            Ok(report) => {
                debug!("{}: {report}", file_stem(path));
                summary.reports.push((file_stem(path), report));
            }
            Err(error) => summary.failures.push(FileFailure { file: file_name(path), error }),
        }
    }
    report_failures(&summary.failures);
    Ok(summary)
}
