//! Per-region feature bundle and the flat column schema written to CSV.

use crate::error::{Error, Result};
use crate::geometric::{geometric_features_with, GeomFeatures};
use crate::geometry::Point2;
use crate::polygonal::{
    douglas_peucker, min_perimeter_polygon, polygon_metrics, ApproxMethod, PolyApprox, PolyMetrics,
    DEFAULT_DP_EPSILON, DEFAULT_MPP_CELL,
};
use crate::raster::{Contour, LabeledMask};
use crate::scalar::Scalar;
use crate::signature::{SampledBoundary, ShapeSignature, SignatureKind, DEFAULT_SAMPLES};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureParams {
    pub n_samples: usize,
    pub dp_epsilon: f64,
    pub mpp_cell: usize,
}

impl Default for FeatureParams {
    fn default() -> Self {
        Self { n_samples: DEFAULT_SAMPLES, dp_epsilon: DEFAULT_DP_EPSILON, mpp_cell: DEFAULT_MPP_CELL }
    }
}

#[derive(Debug, Clone)]
pub struct RegionFeatures<T> {
    pub boundary: SampledBoundary<T>,
    pub signatures: Vec<ShapeSignature<T>>,
    pub geom: GeomFeatures<T>,
    pub hull: Vec<Point2<T>>,
    pub dp: PolyApprox<T>,
    pub dp_metrics: PolyMetrics<T>,
    /// `None` when the region is thinner than one MPP cell.
    pub mpp: Option<(PolyApprox<T>, PolyMetrics<T>)>,
}

const GEOM_COLUMNS: [&str; 16] = [
    "area",
    "perimeter",
    "centroid_x",
    "centroid_y",
    "circularity",
    "eccentricity",
    "solidity",
    "convexity",
    "rectangularity",
    "elongation",
    "abe",
    "euler_number",
    "hole_area_ratio",
    "mbr_width",
    "mbr_height",
    "mbr_angle",
];

const POLY_METRICS: [&str; 4] = ["n_vertices", "perimeter_ratio", "area_ratio", "compression"];
const STATS: [&str; 4] = ["mean", "std", "min", "max"];

/// Feature column names in output order (identity columns excluded).
pub fn feature_column_names() -> Vec<String> {
    let mut names: Vec<String> = GEOM_COLUMNS.iter().map(|s| s.to_string()).collect();
    for kind in SignatureKind::ALL {
        names.extend(STATS.iter().map(|s| format!("{}_{s}", kind.name())));
    }
    for method in [ApproxMethod::DouglasPeucker, ApproxMethod::Mpp] {
        names.extend(POLY_METRICS.iter().map(|m| format!("{}_{m}", method.prefix())));
    }
    names
}

fn metric_values<T: Scalar>(m: Option<&PolyMetrics<T>>) -> [f64; 4] {
    match m {
        Some(m) => [m.n_vertices as f64, m.perimeter_ratio.as_f64(), m.area_ratio.as_f64(), m.compression.as_f64()],
        None => [f64::NAN; 4],
    }
}

impl<T: Scalar> RegionFeatures<T> {
    /// Values aligned with [`feature_column_names`].
    pub fn values(&self) -> Vec<f64> {
        let g = &self.geom;
        let mut v = vec![
            g.area.as_f64(),
            g.perimeter.as_f64(),
            g.centroid.x.as_f64(),
            g.centroid.y.as_f64(),
            g.circularity.as_f64(),
            g.eccentricity.as_f64(),
            g.solidity.as_f64(),
            g.convexity.as_f64(),
            g.rectangularity.as_f64(),
            g.elongation.as_f64(),
            g.abe.as_f64(),
            g.euler_number as f64,
            g.hole_area_ratio.as_f64(),
            g.mbr.width.as_f64(),
            g.mbr.height.as_f64(),
            g.mbr.angle_deg.as_f64(),
        ];
        for sig in &self.signatures {
            let s = sig.summarize();
            v.extend([s.mean.as_f64(), s.std.as_f64(), s.min.as_f64(), s.max.as_f64()]);
        }
        v.extend(metric_values(Some(&self.dp_metrics)));
        v.extend(metric_values(self.mpp.as_ref().map(|(_, m)| m)));
        v
    }

    pub fn signature(&self, kind: SignatureKind) -> &ShapeSignature<T> {
        self.signatures.iter().find(|s| s.kind == kind).expect("all signature kinds computed")
    }
}

/// Pixel centers of one labeled region.
pub fn region_pixel_points<T: Scalar>(labeled: &LabeledMask, label: u32) -> Vec<Point2<T>> {
    labeled
        .region_pixels(label)
        .into_iter()
        .map(|(x, y)| Point2::new(T::from_count(x), T::from_count(y)))
        .collect()
}

/// All three feature classes for one region.
pub fn region_features<T: Scalar>(
    outer: &Contour,
    holes: &[&Contour],
    region_pixels: &[Point2<T>],
    params: &FeatureParams,
) -> Result<RegionFeatures<T>> {
    if outer.is_hole {
        return Err(Error::InvalidParameter("region features need an outer contour".into()));
    }
    let outer_pts = outer.to_points::<T>();
    let hole_pts: Vec<Vec<Point2<T>>> = holes.iter().map(|h| h.to_points()).collect();
    let boundary = SampledBoundary::new(&outer_pts, params.n_samples)?;
    let signatures = boundary.all()?;
    let geom = geometric_features_with(&outer_pts, &hole_pts, region_pixels, &boundary)?;
    let hull = crate::geometric::convex_hull(&outer_pts)?;
    let dp = douglas_peucker(&outer_pts, T::lit(params.dp_epsilon))?;
    let dp_metrics = polygon_metrics(&dp, &outer_pts);
    let mpp = match min_perimeter_polygon::<T>(outer, params.mpp_cell) {
        Ok(approx) => {
            let m = polygon_metrics(&approx, &outer_pts);
            Some((approx, m))
        }
        Err(Error::DegenerateBand { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(RegionFeatures { boundary, signatures, geom, hull, dp, dp_metrics, mpp })
}

/// Formats a value with 6 significant digits, trailing zeros trimmed.
///
/// Output is locale-independent; non-finite values print as `NaN`, `inf` or `-inf`.
pub fn format_value(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        let v = if exp > 5 {
            let unit = 10f64.powi(exp - 5);
            (v / unit).round() * unit
        } else {
            v
        };
        let s = format!("{v:.decimals$}");
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{v:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{e}")
    }
}
