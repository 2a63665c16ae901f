//! Scalar geometric descriptors of one region boundary.

use std::cmp::Ordering;

pub use crate::geometry::{polygon_area, polygon_centroid, polygon_perimeter};

use crate::error::{Error, Result};
use crate::geometry::{orient, Point2};
use crate::scalar::Scalar;
use crate::signature::SampledBoundary;

/// Upper clip for circularity; digitized circles overshoot 1 slightly.
pub const CIRCULARITY_CLIP: f64 = 1.05;

/// Minimum-area enclosing rectangle. `width` is the longer side and
/// `angle_deg` its direction from +x toward +y, in `[0, 180)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MbrResult<T> {
    pub width: T,
    pub height: T,
    pub angle_deg: T,
    pub center: Point2<T>,
}

impl<T: Scalar> MbrResult<T> {
    pub fn area(&self) -> T {
        self.width * self.height
    }

    /// Corners in counter-clockwise order.
    pub fn corners(&self) -> [Point2<T>; 4] {
        let a = self.angle_deg.to_radians();
        let u = Point2::new(a.cos(), a.sin());
        let v = Point2::new(-u.y, u.x);
        let (hw, hh) = (self.width * T::lit(0.5), self.height * T::lit(0.5));
        let c = self.center;
        [
            c - u * hw - v * hh,
            c + u * hw - v * hh,
            c + u * hw + v * hh,
            c - u * hw + v * hh,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeomFeatures<T> {
    pub area: T,
    pub perimeter: T,
    pub centroid: Point2<T>,
    pub circularity: T,
    pub eccentricity: T,
    pub solidity: T,
    pub convexity: T,
    pub rectangularity: T,
    pub elongation: T,
    pub abe: T,
    pub euler_number: i32,
    pub hole_area_ratio: T,
    pub mbr: MbrResult<T>,
}

/// `4 pi A / P^2`, clipped to `[0, 1.05]`.
pub fn circularity<T: Scalar>(area: T, perimeter: T) -> T {
    let c = T::lit(4.0) * T::PI() * area / (perimeter * perimeter);
    c.max(T::zero()).min(T::lit(CIRCULARITY_CLIP))
}

/// `sqrt(1 - l2 / l1)` from the eigenvalues of the central second-moment matrix.
pub fn eccentricity_principal_axes<T: Scalar>(pixels: &[Point2<T>]) -> Result<T> {
    if pixels.len() < 2 {
        return Err(Error::DegenerateRegion("eccentricity needs at least two pixels"));
    }
    let n = T::from_count(pixels.len());
    let mean = pixels.iter().fold(Point2::default(), |acc: Point2<T>, &p| acc + p) * (T::one() / n);
    let (mut m20, mut m02, mut m11) = (T::zero(), T::zero(), T::zero());
    for &p in pixels {
        let d = p - mean;
        m20 = m20 + d.x * d.x;
        m02 = m02 + d.y * d.y;
        m11 = m11 + d.x * d.y;
    }
    let half = T::lit(0.5);
    let mid = (m20 + m02) * half;
    let disc = (((m20 - m02) * half).powi(2) + m11 * m11).sqrt();
    let (l1, l2) = (mid + disc, mid - disc);
    if !(l1 > T::zero()) {
        return Err(Error::DegenerateRegion("all pixels coincide"));
    }
    Ok((T::one() - l2.max(T::zero()) / l1).max(T::zero()).sqrt())
}

fn cmp_xy<T: Scalar>(a: &Point2<T>, b: &Point2<T>) -> Ordering {
    a.x.partial_cmp(&b.x)
        .unwrap_or(Ordering::Equal)
        .then(a.y.partial_cmp(&b.y).unwrap_or(Ordering::Equal))
}

/// Andrew's monotone chain. Counter-clockwise, collinear points dropped.
pub fn convex_hull<T: Scalar>(points: &[Point2<T>]) -> Result<Vec<Point2<T>>> {
    let mut pts = points.to_vec();
    pts.sort_by(cmp_xy);
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::DegenerateHull);
    }
    let mut hull: Vec<Point2<T>> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point2<T>>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= T::zero() {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    if hull.len() < 3 {
        return Err(Error::DegenerateHull);
    }
    Ok(hull)
}

/// `area(shape) / area(hull)`.
pub fn solidity<T: Scalar>(shape: &[Point2<T>], hull: &[Point2<T>]) -> Result<T> {
    let hull_area = polygon_area(hull);
    if !(hull_area > T::zero()) {
        return Err(Error::DegenerateHull);
    }
    Ok(polygon_area(shape) / hull_area)
}

/// `perimeter(hull) / perimeter(shape)`.
pub fn convexity<T: Scalar>(shape: &[Point2<T>], hull: &[Point2<T>]) -> Result<T> {
    if !(polygon_area(hull) > T::zero()) {
        return Err(Error::DegenerateHull);
    }
    let p = polygon_perimeter(shape);
    if !(p > T::zero()) {
        return Err(Error::DegenerateContour("zero perimeter"));
    }
    Ok(polygon_perimeter(hull) / p)
}

/// Normalizes a direction in degrees into `[0, 180)`.
fn half_turn_degrees<T: Scalar>(deg: T) -> T {
    let full = T::lit(180.0);
    let mut a = deg % full;
    if a < T::zero() {
        a = a + full;
    }
    if a >= full - T::lit(1e-9) {
        a = T::zero();
    }
    a
}

/// Rotating calipers over the hull edges.
///
/// Each hull edge direction is tried as one rectangle side. The smallest area
/// wins; near-equal areas keep the smaller normalized angle.
pub fn min_bounding_rect<T: Scalar>(hull: &[Point2<T>]) -> Result<MbrResult<T>> {
    if hull.len() < 3 || !(polygon_area(hull) > T::zero()) {
        return Err(Error::DegenerateHull);
    }
    let rel_tol = T::lit(1e-9);
    let mut best: Option<MbrResult<T>> = None;
    for i in 0..hull.len() {
        let e = hull[(i + 1) % hull.len()] - hull[i];
        let len = e.norm();
        if !(len > T::zero()) {
            continue;
        }
        let u = e * (T::one() / len);
        let v = Point2::new(-u.y, u.x);
        let (mut umin, mut umax, mut vmin, mut vmax) =
            (T::infinity(), T::neg_infinity(), T::infinity(), T::neg_infinity());
        // Projecting offsets from the edge origin keeps results independent of translation.
        let origin = hull[i];
        for &p in hull {
            let d = p - origin;
            let (a, b) = (d.dot(u), d.dot(v));
            umin = umin.min(a);
            umax = umax.max(a);
            vmin = vmin.min(b);
            vmax = vmax.max(b);
        }
        let (du, dv) = (umax - umin, vmax - vmin);
        let half = T::lit(0.5);
        let center = origin + u * ((umin + umax) * half) + v * ((vmin + vmax) * half);
        let dir = u.y.atan2(u.x).to_degrees();
        let cand = if du >= dv {
            MbrResult { width: du, height: dv, angle_deg: half_turn_degrees(dir), center }
        } else {
            MbrResult { width: dv, height: du, angle_deg: half_turn_degrees(dir + T::lit(90.0)), center }
        };
        best = Some(match best {
            None => cand,
            Some(b) => {
                let (ca, ba) = (cand.area(), b.area());
                if (ca - ba).abs() <= rel_tol * ba.max(T::one()) {
                    if cand.angle_deg < b.angle_deg { cand } else { b }
                } else if ca < ba {
                    cand
                } else {
                    b
                }
            }
        });
    }
    best.ok_or(Error::DegenerateHull)
}

/// `area / (mbr.width * mbr.height)`.
pub fn rectangularity<T: Scalar>(area: T, mbr: &MbrResult<T>) -> T {
    area / mbr.area()
}

/// `1 - height / width`.
pub fn elongation<T: Scalar>(mbr: &MbrResult<T>) -> T {
    T::one() - mbr.height / mbr.width
}

/// Mean squared curvature of the arc-length resampled boundary.
pub fn average_bending_energy<T: Scalar>(poly: &[Point2<T>], n: usize) -> Result<T> {
    Ok(bending_energy_of(&SampledBoundary::new(poly, n)?))
}

pub(crate) fn bending_energy_of<T: Scalar>(boundary: &SampledBoundary<T>) -> T {
    let k = boundary.curvature().values;
    k.iter().map(|&v| v * v).sum::<T>() / T::from_count(k.len())
}

/// `(1 - holes, total hole area / outer area)`.
pub fn euler_and_holes<T: Scalar>(outer: &[Point2<T>], holes: &[Vec<Point2<T>>]) -> (i32, T) {
    let outer_area = polygon_area(outer);
    let hole_area = holes.iter().fold(T::zero(), |acc, h| acc + polygon_area(h));
    let ratio = if outer_area > T::zero() { hole_area / outer_area } else { T::zero() };
    (1 - holes.len() as i32, ratio)
}

/// Every geometric descriptor of one region.
///
/// Circularity uses the perimeter of the arc-length resampled boundary, not the
/// raw 8-connected contour length reported in `perimeter`.
///
/// `region_pixels` are the pixel centers of the region, used for the moment-based eccentricity.
pub fn geometric_features<T: Scalar>(
    outer: &[Point2<T>],
    holes: &[Vec<Point2<T>>],
    region_pixels: &[Point2<T>],
    n_samples: usize,
) -> Result<GeomFeatures<T>> {
    let boundary = SampledBoundary::new(outer, n_samples)?;
    geometric_features_with(outer, holes, region_pixels, &boundary)
}

pub(crate) fn geometric_features_with<T: Scalar>(
    outer: &[Point2<T>],
    holes: &[Vec<Point2<T>>],
    region_pixels: &[Point2<T>],
    boundary: &SampledBoundary<T>,
) -> Result<GeomFeatures<T>> {
    let area = polygon_area(outer);
    let perimeter = polygon_perimeter(outer);
    let hull = convex_hull(outer)?;
    let mbr = min_bounding_rect(&hull)?;
    let (euler_number, hole_area_ratio) = euler_and_holes(outer, holes);
    Ok(GeomFeatures {
        area,
        perimeter,
        centroid: boundary.centroid,
        circularity: circularity(area, boundary.resampled_perimeter),
        eccentricity: eccentricity_principal_axes(region_pixels)?,
        solidity: solidity(outer, &hull)?,
        convexity: convexity(outer, &hull)?,
        rectangularity: rectangularity(area, &mbr),
        elongation: elongation(&mbr),
        abe: bending_energy_of(boundary),
        euler_number,
        hole_area_ratio,
        mbr,
    })
}
