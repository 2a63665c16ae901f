//! One-dimensional boundary signatures.
//!
//! Every signature is sampled at `n` points spaced equally by arc length
//! around the closed boundary, starting at the boundary's first vertex, and is
//! reduced to four population statistics for tabular output.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{orient, polygon_centroid, Point2};
use crate::scalar::Scalar;

pub const DEFAULT_SAMPLES: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignatureKind {
    CentroidDistance,
    TangentAngle,
    Curvature,
    AreaFunction,
    ChordLength,
    TriangleArea,
}

impl SignatureKind {
    pub const ALL: [SignatureKind; 6] = [
        SignatureKind::CentroidDistance,
        SignatureKind::TangentAngle,
        SignatureKind::Curvature,
        SignatureKind::AreaFunction,
        SignatureKind::ChordLength,
        SignatureKind::TriangleArea,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SignatureKind::CentroidDistance => "centroid_distance",
            SignatureKind::TangentAngle => "tangent_angle",
            SignatureKind::Curvature => "curvature",
            SignatureKind::AreaFunction => "area_function",
            SignatureKind::ChordLength => "chord_length",
            SignatureKind::TriangleArea => "triangle_area",
        }
    }
}

impl fmt::Display for SignatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSignature<T> {
    pub kind: SignatureKind,
    pub values: Vec<T>,
}

impl<T: Scalar> ShapeSignature<T> {
    pub fn n_samples(&self) -> usize {
        self.values.len()
    }

    pub fn summarize(&self) -> SignatureStats<T> {
        summarize_signature(&self.values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignatureStats<T> {
    pub mean: T,
    pub std: T,
    pub min: T,
    pub max: T,
}

/// Population mean, standard deviation, minimum and maximum.
///
/// # Panics
/// If `values` is empty.
pub fn summarize_signature<T: Scalar>(values: &[T]) -> SignatureStats<T> {
    assert!(!values.is_empty(), "signature has no samples");
    let n = T::from_count(values.len());
    let mean = values.iter().copied().sum::<T>() / n;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n;
    let (min, max) = values
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    SignatureStats { mean, std: var.sqrt(), min, max }
}

/// Points at arc-length positions `k * P / n`, `k = 0..n`, measured from the
/// first vertex along the closed polygon.
pub fn resample_equal_arclength<T: Scalar>(poly: &[Point2<T>], n: usize) -> Result<Vec<Point2<T>>> {
    if n == 0 {
        return Err(Error::InvalidParameter("resample count must be positive".into()));
    }
    let m = poly.len();
    let seg_len: Vec<T> = (0..m).map(|i| poly[i].distance(poly[(i + 1) % m])).collect();
    let perimeter: T = seg_len.iter().copied().sum();
    if m < 2 || !(perimeter > T::zero()) {
        return Err(Error::DegenerateContour("zero perimeter"));
    }
    let step = perimeter / T::from_count(n);
    let mut out = Vec::with_capacity(n);
    let mut seg = 0usize;
    let mut seg_start = T::zero();
    for k in 0..n {
        let s = step * T::from_count(k);
        while seg + 1 < m && seg_start + seg_len[seg] <= s {
            seg_start = seg_start + seg_len[seg];
            seg += 1;
        }
        let a = poly[seg];
        let b = poly[(seg + 1) % m];
        let t = if seg_len[seg] > T::zero() {
            ((s - seg_start) / seg_len[seg]).min(T::one())
        } else {
            T::zero()
        };
        out.push(a.lerp(b, t));
    }
    Ok(out)
}

/// Resampled boundary shared by all signatures of one contour.
#[derive(Debug, Clone)]
pub struct SampledBoundary<T> {
    pub points: Vec<Point2<T>>,
    /// Length of the source polygon.
    pub perimeter: T,
    /// Length of the resampled polygon; smooths out the 8-chain staircase.
    pub resampled_perimeter: T,
    pub centroid: Point2<T>,
}

impl<T: Scalar> SampledBoundary<T> {
    pub fn new(poly: &[Point2<T>], n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidParameter(format!("signature sample count must be at least 8, got {n}")));
        }
        let points = resample_equal_arclength(poly, n)?;
        let perimeter = crate::geometry::polygon_perimeter(poly);
        let centroid = polygon_centroid(poly)?;
        let resampled_perimeter = crate::geometry::polygon_perimeter(&points);
        Ok(Self { points, perimeter, resampled_perimeter, centroid })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    #[inline]
    fn at(&self, k: isize) -> Point2<T> {
        self.points[k.rem_euclid(self.n() as isize) as usize]
    }

    pub fn centroid_distance(&self) -> ShapeSignature<T> {
        let values = self.points.iter().map(|p| p.distance(self.centroid)).collect();
        ShapeSignature { kind: SignatureKind::CentroidDistance, values }
    }

    pub fn tangent_angle(&self) -> ShapeSignature<T> {
        let n = self.n() as isize;
        let w = (n / 32).max(1);
        let raw: Vec<T> = (0..n)
            .map(|k| {
                let d = self.at(k + w) - self.at(k - w);
                d.y.atan2(d.x)
            })
            .collect();
        let mut values = Vec::with_capacity(raw.len());
        let mut acc = raw[0];
        values.push(acc);
        for k in 1..raw.len() {
            acc = acc + wrap_angle(raw[k] - raw[k - 1]);
            values.push(acc);
        }
        ShapeSignature { kind: SignatureKind::TangentAngle, values }
    }

    pub fn curvature(&self) -> ShapeSignature<T> {
        let tangent = self.tangent_angle().values;
        let n = tangent.len();
        let step = self.perimeter / T::from_count(n);
        let values = (0..n)
            .map(|k| wrap_angle(tangent[(k + 1) % n] - tangent[k]) / step)
            .collect();
        ShapeSignature { kind: SignatureKind::Curvature, values }
    }

    pub fn area_function(&self) -> ShapeSignature<T> {
        let n = self.n() as isize;
        let half = T::lit(0.5);
        let values = (0..n)
            .map(|k| orient(self.centroid, self.at(k), self.at(k + 1)).abs() * half)
            .collect();
        ShapeSignature { kind: SignatureKind::AreaFunction, values }
    }

    pub fn chord_length(&self) -> Result<ShapeSignature<T>> {
        let n = self.n();
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("chord length needs an even sample count, got {n}")));
        }
        let values = (0..n).map(|k| self.points[k].distance(self.points[(k + n / 2) % n])).collect();
        Ok(ShapeSignature { kind: SignatureKind::ChordLength, values })
    }

    pub fn triangle_area(&self, ts: usize) -> Result<ShapeSignature<T>> {
        let n = self.n();
        if ts < 1 || 2 * ts >= n {
            return Err(Error::InvalidParameter(format!("triangle offset must satisfy 1 <= ts < n/2, got {ts} for n = {n}")));
        }
        let ts = ts as isize;
        let half = T::lit(0.5);
        let values = (0..n as isize)
            .map(|k| orient(self.at(k - ts), self.at(k), self.at(k + ts)) * half)
            .collect();
        Ok(ShapeSignature { kind: SignatureKind::TriangleArea, values })
    }

    /// All six signatures, triangle offset `n / 8`.
    pub fn all(&self) -> Result<Vec<ShapeSignature<T>>> {
        Ok(vec![
            self.centroid_distance(),
            self.tangent_angle(),
            self.curvature(),
            self.area_function(),
            self.chord_length()?,
            self.triangle_area(default_triangle_offset(self.n()))?,
        ])
    }
}

pub fn default_triangle_offset(n: usize) -> usize {
    (n / 8).max(1)
}

/// Maps an angle difference into `(-pi, pi]`.
pub fn wrap_angle<T: Scalar>(a: T) -> T {
    let two_pi = T::TAU();
    let mut r = a % two_pi;
    if r > T::PI() {
        r = r - two_pi;
    } else if r <= -T::PI() {
        r = r + two_pi;
    }
    r
}

pub fn centroid_distance_function<T: Scalar>(poly: &[Point2<T>], n: usize) -> Result<ShapeSignature<T>> {
    Ok(SampledBoundary::new(poly, n)?.centroid_distance())
}

pub fn tangent_angle_function<T: Scalar>(poly: &[Point2<T>], n: usize) -> Result<ShapeSignature<T>> {
    Ok(SampledBoundary::new(poly, n)?.tangent_angle())
}

pub fn curvature_function<T: Scalar>(poly: &[Point2<T>], n: usize) -> Result<ShapeSignature<T>> {
    Ok(SampledBoundary::new(poly, n)?.curvature())
}

pub fn area_function<T: Scalar>(poly: &[Point2<T>], n: usize) -> Result<ShapeSignature<T>> {
    Ok(SampledBoundary::new(poly, n)?.area_function())
}

pub fn chord_length_function<T: Scalar>(poly: &[Point2<T>], n: usize) -> Result<ShapeSignature<T>> {
    SampledBoundary::new(poly, n)?.chord_length()
}

pub fn triangle_area_signature<T: Scalar>(poly: &[Point2<T>], n: usize, ts: usize) -> Result<ShapeSignature<T>> {
    SampledBoundary::new(poly, n)?.triangle_area(ts)
}
