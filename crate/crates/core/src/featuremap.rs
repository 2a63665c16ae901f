//! Per-image feature-map panels drawn over the largest region.

use image::{Rgb, RgbImage};
use log::info;

use crate::error::Result;
use crate::features::{region_features, region_pixel_points, FeatureParams, RegionFeatures};
use crate::geometry::Point2;
use crate::raster::{label_components, largest_region, trace_contours, BinaryMask};
use crate::render::{draw_line, draw_polygon, draw_text, fill_rect, put, round_point, GLYPH_H};
use crate::signature::SignatureKind;

/// Height of the caption strip under each tile.
pub const CAPTION_HEIGHT: u32 = GLYPH_H + 4;
pub const PANEL_COLUMNS: usize = 4;

const FOREGROUND: Rgb<u8> = Rgb([255, 255, 255]);
const DIMMED: Rgb<u8> = Rgb([70, 70, 70]);
const CAPTION_BG: Rgb<u8> = Rgb([30, 30, 30]);
const CAPTION_FG: Rgb<u8> = Rgb([235, 235, 235]);
const RAY: Rgb<u8> = Rgb([255, 215, 0]);
const HULL: Rgb<u8> = Rgb([0, 200, 255]);
const MBR: Rgb<u8> = Rgb([255, 0, 200]);
const DP: Rgb<u8> = Rgb([60, 220, 60]);
const MPP: Rgb<u8> = Rgb([255, 140, 0]);
const CURVATURE_RAMP: [Rgb<u8>; 4] = [Rgb([40, 90, 255]), Rgb([40, 220, 120]), Rgb([255, 220, 0]), Rgb([255, 40, 40])];
const PLOT: Rgb<u8> = Rgb([0, 220, 255]);
const AXIS: Rgb<u8> = Rgb([120, 120, 120]);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overlay {
    /// The unannotated mask.
    Reference,
    CentroidRays,
    HullPolygon,
    MbrBox,
    DpPolygon,
    MppPolygon,
    CurvatureColoredBoundary,
    SignaturePlot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    pub caption: String,
    pub overlay: Overlay,
}

impl Panel {
    pub fn new(caption: &str, overlay: Overlay) -> Self {
        Self { caption: caption.to_string(), overlay }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMapSpec {
    panels: Vec<Panel>,
}

impl FeatureMapSpec {
    /// The reference panel is inserted first; a leading reference in `overlays` is not duplicated.
    pub fn new(overlays: Vec<Panel>) -> Self {
        let mut panels = vec![Panel::new("reference", Overlay::Reference)];
        panels.extend(overlays.into_iter().filter(|p| p.overlay != Overlay::Reference));
        Self { panels }
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn columns(&self) -> usize {
        self.panels.len().min(PANEL_COLUMNS)
    }

    pub fn rows(&self) -> usize {
        self.panels.len().div_ceil(PANEL_COLUMNS)
    }

    /// Output size for a source image of `width` x `height`.
    pub fn canvas_size(&self, width: u32, height: u32) -> (u32, u32) {
        (self.columns() as u32 * width, self.rows() as u32 * (height + CAPTION_HEIGHT))
    }
}

impl Default for FeatureMapSpec {
    fn default() -> Self {
        Self::new(vec![
            Panel::new("cdf", Overlay::CentroidRays),
            Panel::new("convex_hull", Overlay::HullPolygon),
            Panel::new("mbr", Overlay::MbrBox),
            Panel::new("dp", Overlay::DpPolygon),
            Panel::new("mpp", Overlay::MppPolygon),
            Panel::new("curvature", Overlay::CurvatureColoredBoundary),
            Panel::new("cdf_signature", Overlay::SignaturePlot),
        ])
    }
}

fn draw_mask(img: &mut RgbImage, mask: &BinaryMask, ox: i64, oy: i64, color: Rgb<u8>) {
    for y in 0..mask.height() {
        for x in 0..mask.width() {
            if mask.get(x, y) {
                put(img, ox + x as i64, oy + y as i64, color);
            }
        }
    }
}

/// `|kappa|` quartile bin of every sample.
fn curvature_bins(kappa: &[f64]) -> Vec<usize> {
    let mut sorted: Vec<f64> = kappa.iter().map(|k| k.abs()).collect();
    sorted.sort_by(f64::total_cmp);
    let q = |f: f64| sorted[((sorted.len() - 1) as f64 * f).round() as usize];
    let cuts = [q(0.25), q(0.5), q(0.75)];
    kappa.iter().map(|k| cuts.iter().filter(|&&c| k.abs() > c).count()).collect()
}

fn draw_signature_plot(img: &mut RgbImage, values: &[f64], ox: i64, oy: i64, w: u32, h: u32) {
    let margin = 2i64;
    let (pw, ph) = ((w as i64 - 2 * margin).max(1), (h as i64 - 2 * margin).max(1));
    draw_line(img, (ox + margin, oy + margin + ph - 1), (ox + margin + pw - 1, oy + margin + ph - 1), AXIS);
    draw_line(img, (ox + margin, oy + margin), (ox + margin, oy + margin + ph - 1), AXIS);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let n = values.len();
    let at = |i: usize| {
        let x = ox + margin + ((i as f64 / (n.max(2) - 1) as f64) * (pw - 1) as f64).round() as i64;
        let y = oy + margin + ((1.0 - (values[i] - lo) / span) * (ph - 1) as f64).round() as i64;
        (x, y)
    };
    for i in 1..n {
        draw_line(img, at(i - 1), at(i), PLOT);
    }
}

/// Draws every panel of `spec`. Overlays use the geometry of `roi`.
pub fn render_feature_map(mask: &BinaryMask, roi: &RegionFeatures<f64>, spec: &FeatureMapSpec) -> RgbImage {
    let (w, h) = (mask.width() as u32, mask.height() as u32);
    let (cw, ch) = spec.canvas_size(w, h);
    let mut img = RgbImage::new(cw, ch);
    for (i, panel) in spec.panels().iter().enumerate() {
        let col = (i % PANEL_COLUMNS) as i64;
        let row = (i / PANEL_COLUMNS) as i64;
        let (ox, oy) = (col * w as i64, row * (h + CAPTION_HEIGHT) as i64);
        let off = (ox, oy);
        let base = if panel.overlay == Overlay::Reference { FOREGROUND } else { DIMMED };
        if panel.overlay != Overlay::SignaturePlot {
            draw_mask(&mut img, mask, ox, oy, base);
        }
        match panel.overlay {
            Overlay::Reference => {}
            Overlay::CentroidRays => {
                let c = round_point(roi.boundary.centroid, off);
                let step = (roi.boundary.points.len() / 32).max(1);
                for p in roi.boundary.points.iter().step_by(step) {
                    draw_line(&mut img, c, round_point(*p, off), RAY);
                }
            }
            Overlay::HullPolygon => draw_polygon(&mut img, &roi.hull, off, HULL),
            Overlay::MbrBox => draw_polygon(&mut img, &roi.geom.mbr.corners(), off, MBR),
            Overlay::DpPolygon => draw_polygon(&mut img, &roi.dp.vertices, off, DP),
            Overlay::MppPolygon => {
                if let Some((mpp, _)) = &roi.mpp {
                    draw_polygon(&mut img, &mpp.vertices, off, MPP);
                }
            }
            Overlay::CurvatureColoredBoundary => {
                let pts: &[Point2<f64>] = &roi.boundary.points;
                let bins = curvature_bins(&roi.signature(SignatureKind::Curvature).values);
                for i in 0..pts.len() {
                    let a = round_point(pts[i], off);
                    let b = round_point(pts[(i + 1) % pts.len()], off);
                    draw_line(&mut img, a, b, CURVATURE_RAMP[bins[i]]);
                }
            }
            Overlay::SignaturePlot => {
                let values = &roi.signature(SignatureKind::CentroidDistance).values;
                draw_signature_plot(&mut img, values, ox, oy, w, h);
            }
        }
        let cy = oy + h as i64;
        fill_rect(&mut img, ox, cy, w, CAPTION_HEIGHT, CAPTION_BG);
        draw_text(&mut img, ox + 2, cy + 2, &panel.caption, 1, CAPTION_FG);
    }
    img
}

/// Renders the map for the largest region of a preprocessed mask.
///
/// Returns `Ok(None)` and logs a notice when the mask has no usable region.
pub fn feature_map(mask: &BinaryMask, params: &FeatureParams, spec: &FeatureMapSpec) -> Result<Option<RgbImage>> {
    let labeled = label_components(mask);
    let Ok(label) = largest_region(&labeled) else {
        info!("{}: no foreground region, feature map skipped", mask.source_name());
        return Ok(None);
    };
    let contours = trace_contours(&labeled);
    let Some(outer) = contours.iter().find(|c| c.region_label == label && !c.is_hole) else {
        info!("{}: largest region has no traceable contour, feature map skipped", mask.source_name());
        return Ok(None);
    };
    let holes: Vec<_> = contours.iter().filter(|c| c.region_label == label && c.is_hole).collect();
    let pixels = region_pixel_points(&labeled, label);
    let roi = region_features::<f64>(outer, &holes, &pixels, params)?;
    Ok(Some(render_feature_map(mask, &roi, spec)))
}
