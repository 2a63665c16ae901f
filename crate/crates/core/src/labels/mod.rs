//! Multi-class labeling: templates, annotated label tables, NIfTI label
//! volumes and consistency checks.

mod nifti;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::path::Path;

use image::{Rgb, RgbImage};

pub use nifti::{
    decode_nifti, encode_nifti, read_nifti, write_nifti, NiftiHeader, NiftiLabelVolume, DT_INT16, DT_UINT16, DT_UINT8,
    HEADER_SIZE, MAGIC, VOX_OFFSET,
};

use crate::error::{Error, Result};
use crate::features::format_value;
use crate::raster::{label_components, BinaryMask, LabeledMask};
use crate::render::{draw_text, label_color, text_width};

pub const TABLE_HEADER: [&str; 4] = ["cell_id", "centroid_x", "centroid_y", "final_label"];

/// One annotated region.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelTableRow {
    pub cell_id: u32,
    pub centroid_x: f64,
    pub centroid_y: f64,
    pub final_label: u16,
}

/// One region of a template, before annotation.
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateRow {
    pub cell_id: u32,
    pub centroid_x: f64,
    pub centroid_y: f64,
}

/// Labels the mask and lists each region with its pixel centroid.
pub fn label_template(mask: &BinaryMask) -> (LabeledMask, Vec<TemplateRow>) {
    let labeled = label_components(mask);
    let rows = labeled
        .region_centroids()
        .into_iter()
        .enumerate()
        .map(|(i, (cx, cy))| TemplateRow { cell_id: i as u32 + 1, centroid_x: cx, centroid_y: cy })
        .collect();
    (labeled, rows)
}

/// Writes the template CSV with an empty `final_label` column.
pub fn write_label_template(path: &Path, rows: &[TemplateRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TABLE_HEADER)?;
    for r in rows {
        w.write_record([r.cell_id.to_string(), format_value(r.centroid_x), format_value(r.centroid_y), String::new()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// The mask as RGB with each cell id drawn in red over its centroid.
pub fn render_label_overlay(mask: &BinaryMask, rows: &[TemplateRow]) -> RgbImage {
    let (w, h) = (mask.width() as u32, mask.height() as u32);
    let mut img = RgbImage::from_fn(w, h, |x, y| {
        if mask.get(x as usize, y as usize) {
            Rgb([255, 255, 255])
        } else {
            Rgb([0, 0, 0])
        }
    });
    let scale = (w.min(h) / 128).max(1);
    for r in rows {
        let text = r.cell_id.to_string();
        let x = r.centroid_x.round() as i64 - text_width(&text, scale) as i64 / 2;
        let y = r.centroid_y.round() as i64 - (5 * scale) as i64 / 2;
        draw_text(&mut img, x, y, &text, scale, Rgb([220, 20, 20]));
    }
    img
}

/// Writes the template CSV and overlay PNG for one mask; returns the region count.
pub fn create_label_template(mask: &BinaryMask, csv_path: &Path, image_path: &Path) -> Result<usize> {
    let (_, rows) = label_template(mask);
    write_label_template(csv_path, &rows)?;
    render_label_overlay(mask, &rows).save(image_path)?;
    Ok(rows.len())
}

fn parse_final_label(raw: &str) -> std::result::Result<u16, String> {
    if raw.is_empty() {
        return Err("final_label is empty; fill in a numerical label".into());
    }
    let value = match raw.parse::<u64>() {
        Ok(v) => v,
        Err(_) => match raw.parse::<f64>() {
            Ok(f) if f.is_finite() && f >= 0.0 && f.fract() == 0.0 => f as u64,
            _ => return Err(format!("final_label `{raw}` is not a non-negative integer")),
        },
    };
    u16::try_from(value).map_err(|_| format!("final_label {value} exceeds {}", u16::MAX))
}

/// Parses an annotated label table from any reader; `path` is used in errors.
pub fn parse_label_table(reader: impl Read, path: &Path) -> Result<Vec<LabelTableRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut idx = [0usize; 4];
    for (slot, name) in idx.iter_mut().zip(TABLE_HEADER) {
        *slot = headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}') == name)
            .ok_or_else(|| Error::MissingHeader { path: path.to_path_buf(), header: name })?;
    }
    let invalid = |cell_id: &str, message: String| Error::InvalidLabel {
        path: path.to_path_buf(),
        cell_id: cell_id.to_string(),
        message,
    };
    let mut rows = Vec::new();
    let mut seen = BTreeSet::new();
    for record in rdr.records() {
        let record = record?;
        let field = |i: usize| record.get(idx[i]).unwrap_or("");
        let raw_id = field(0);
        let cell_id = raw_id
            .parse::<u32>()
            .ok()
            .filter(|&v| v > 0)
            .ok_or_else(|| invalid(raw_id, "cell_id must be a positive integer".into()))?;
        let coord = |i: usize| {
            field(i).parse::<f64>().map_err(|_| invalid(raw_id, format!("{} `{}` is not a number", TABLE_HEADER[i], field(i))))
        };
        let centroid_x = coord(1)?;
        let centroid_y = coord(2)?;
        let final_label = parse_final_label(field(3)).map_err(|m| invalid(raw_id, m))?;
        if !seen.insert(cell_id) {
            return Err(Error::DuplicateCellId { path: path.to_path_buf(), cell_id });
        }
        rows.push(LabelTableRow { cell_id, centroid_x, centroid_y, final_label });
    }
    Ok(rows)
}

pub fn read_label_table(path: &Path) -> Result<Vec<LabelTableRow>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_label_table(file, path)
}

/// Relabels the connected regions of `mask` by their `final_label` and stores
/// the result in NIfTI row order.
///
/// Every region needs a table row and every row must name an existing region.
pub fn build_label_volume(mask: &BinaryMask, table: &[LabelTableRow]) -> Result<NiftiLabelVolume> {
    let labeled = label_components(mask);
    let map: BTreeMap<u32, u16> = table.iter().map(|r| (r.cell_id, r.final_label)).collect();
    let n = labeled.num_regions();
    let unlabeled: Vec<u32> = (1..=n).filter(|id| !map.contains_key(id)).collect();
    let unmatched: Vec<u32> = map.keys().copied().filter(|&id| id > n).collect();
    if !unlabeled.is_empty() || !unmatched.is_empty() {
        return Err(Error::MissingLabels { unlabeled, unmatched });
    }
    let lut: Vec<u16> = (0..=n).map(|id| if id == 0 { 0 } else { map[&id] }).collect();
    let image_labels: Vec<u16> = labeled.labels().iter().map(|&l| lut[l as usize]).collect();
    NiftiLabelVolume::from_image_labels(labeled.width(), labeled.height(), &image_labels)
}

/// Label-set comparison between a table and a volume.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelReport {
    /// Nonzero `final_label` values in the table.
    pub expected: BTreeSet<u16>,
    /// Nonzero voxel values.
    pub found: BTreeSet<u16>,
    pub missing: BTreeSet<u16>,
    pub extra: BTreeSet<u16>,
    pub consistent: bool,
}

impl fmt::Display for LabelReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.consistent {
            write!(f, "consistent (labels {:?})", self.expected)
        } else {
            write!(f, "inconsistent: missing {:?}, extra {:?}", self.missing, self.extra)
        }
    }
}

pub fn verify_labels(volume: &NiftiLabelVolume, table: &[LabelTableRow]) -> LabelReport {
    let expected: BTreeSet<u16> = table.iter().map(|r| r.final_label).filter(|&l| l != 0).collect();
    let found: BTreeSet<u16> = volume.voxels().iter().copied().filter(|&l| l != 0).collect();
    let missing: BTreeSet<u16> = expected.difference(&found).copied().collect();
    let extra: BTreeSet<u16> = found.difference(&expected).copied().collect();
    let consistent = missing.is_empty() && extra.is_empty();
    LabelReport { expected, found, missing, extra, consistent }
}

/// Color preview of a label volume in image orientation.
pub fn render_label_preview(volume: &NiftiLabelVolume) -> RgbImage {
    let labels = volume.to_image_labels();
    let w = volume.width();
    RgbImage::from_fn(w as u32, volume.height() as u32, |x, y| {
        label_color(labels[x as usize + y as usize * w] as u32)
    })
}

/// Most frequent label under a set of image pixels; ties go to the smaller
/// label. `None` for an empty pixel set.
pub fn majority_label(volume: &NiftiLabelVolume, pixels: &[(usize, usize)]) -> Option<u16> {
    let mut counts: BTreeMap<u16, usize> = BTreeMap::new();
    for &(x, y) in pixels {
        *counts.entry(volume.image_label(x, y)).or_default() += 1;
    }
    counts.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0))).map(|(l, _)| l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_blocks() -> BinaryMask {
        BinaryMask::from_fn(30, 10, |x, y| (2..8).contains(&y) && (x % 10) >= 2 && (x % 10) < 8)
    }

    fn table(labels: &[(u32, u16)]) -> Vec<LabelTableRow> {
        labels
            .iter()
            .map(|&(cell_id, final_label)| LabelTableRow { cell_id, centroid_x: 0.0, centroid_y: 0.0, final_label })
            .collect()
    }

    fn parse(text: &str) -> Result<Vec<LabelTableRow>> {
        parse_label_table(text.as_bytes(), Path::new("t.csv"))
    }

    #[test]
    fn parses_spaced_row() {
        let rows = parse("cell_id,centroid_x,centroid_y,final_label\n1, 45.0, 51.0, 2\n").unwrap();
        assert_eq!(rows, vec![LabelTableRow { cell_id: 1, centroid_x: 45.0, centroid_y: 51.0, final_label: 2 }]);
    }

    #[test]
    fn blank_label_names_cell() {
        match parse("cell_id,centroid_x,centroid_y,final_label\n1,4,5,2\n7,1.5,2.5,\n") {
            Err(Error::InvalidLabel { cell_id, .. }) => assert_eq!(cell_id, "7"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("cell_id,centroid_x,centroid_y,final_label\n3,1,1,tumor\n"),
            Err(Error::InvalidLabel { .. })
        ));
        assert!(matches!(
            parse("cell_id,centroid_x,centroid_y,final_label\n3,1,1,-1\n"),
            Err(Error::InvalidLabel { .. })
        ));
        assert_eq!(parse("cell_id,centroid_x,centroid_y,final_label\n3,1,1,2.0\n").unwrap()[0].final_label, 2);
    }

    #[test]
    fn missing_header_and_duplicates() {
        match parse("cell_id,centroid_x,centroid_y\n1,2,3\n") {
            Err(Error::MissingHeader { header, .. }) => assert_eq!(header, "final_label"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse("cell_id,centroid_x,centroid_y,final_label\n1,0,0,1\n1,0,0,2\n"),
            Err(Error::DuplicateCellId { cell_id: 1, .. })
        ));
    }

    #[test]
    fn template_then_filled_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mask = three_blocks();
        let csv_path = dir.path().join("m.csv");
        let n = create_label_template(&mask, &csv_path, &dir.path().join("m.png")).unwrap();
        assert_eq!(n, 3);
        let text = std::fs::read_to_string(&csv_path).unwrap();
        assert!(text.starts_with("cell_id,centroid_x,centroid_y,final_label\n"));
        assert!(text.lines().nth(1).unwrap().ends_with(','));
        assert!(matches!(read_label_table(&csv_path), Err(Error::InvalidLabel { .. })));

        let filled: String = text
            .lines()
            .enumerate()
            .map(|(i, l)| match i {
                0 => format!("{l}\n"),
                i => format!("{l}{}\n", [0, 1, 2][i - 1]),
            })
            .collect();
        std::fs::write(&csv_path, filled).unwrap();
        let rows = read_label_table(&csv_path).unwrap();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows.iter().map(|r| r.final_label).collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!((rows[0].centroid_x, rows[0].centroid_y), (4.5, 4.5));
    }

    #[test]
    fn build_maps_and_zeroes() {
        let mask = three_blocks();
        let vol = build_label_volume(&mask, &table(&[(1, 1), (2, 2), (3, 0)])).unwrap();
        let values: BTreeSet<u16> = vol.voxels().iter().copied().collect();
        assert_eq!(values, BTreeSet::from([0, 1, 2]));
        assert_eq!(vol.image_label(25, 5), 0);
        assert_eq!(vol.image_label(15, 2), 2);
        let report = verify_labels(&vol, &table(&[(1, 1), (2, 2), (3, 0)]));
        assert!(report.consistent, "{report}");
    }

    #[test]
    fn identity_mapping_is_flipped_labels() {
        let mask = BinaryMask::from_fn(12, 9, |x, y| (x + 2 * y) % 5 == 0);
        let labeled = label_components(&mask);
        let rows = table(&(1..=labeled.num_regions()).map(|i| (i, i as u16)).collect::<Vec<_>>());
        let vol = build_label_volume(&mask, &rows).unwrap();
        for y in 0..9 {
            for x in 0..12 {
                assert_eq!(vol.voxel(x, 8 - y) as u32, labeled.get(x, y));
            }
        }
    }

    #[test]
    fn missing_rows_and_unknown_ids() {
        let mask = three_blocks();
        match build_label_volume(&mask, &table(&[(1, 1), (3, 1), (9, 4)])) {
            Err(Error::MissingLabels { unlabeled, unmatched }) => {
                assert_eq!(unlabeled, vec![2]);
                assert_eq!(unmatched, vec![9]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn verify_reports_missing_and_extra() {
        let vol = NiftiLabelVolume::from_voxels(4, 1, vec![1, 2, 0, 2]).unwrap();
        let r = verify_labels(&vol, &table(&[(1, 1), (2, 2), (3, 3)]));
        assert_eq!(r.missing, BTreeSet::from([3]));
        assert!(r.extra.is_empty());
        assert!(!r.consistent);
        let vol = NiftiLabelVolume::from_voxels(3, 1, vec![1, 7, 2]).unwrap();
        let r = verify_labels(&vol, &table(&[(1, 1), (2, 2)]));
        assert_eq!(r.extra, BTreeSet::from([7]));
        assert!(r.missing.is_empty());
    }

    #[test]
    fn majority_vote() {
        let vol = NiftiLabelVolume::from_image_labels(4, 1, &[1, 2, 2, 1]).unwrap();
        assert_eq!(majority_label(&vol, &[(0, 0), (1, 0), (2, 0)]), Some(2));
        assert_eq!(majority_label(&vol, &[(0, 0), (1, 0)]), Some(1));
        assert_eq!(majority_label(&vol, &[]), None);
    }
}
