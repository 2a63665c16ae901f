//! Planar points and closed-polygon primitives shared by every feature class.
//!
//! Coordinates are image coordinates: `x` grows to the right, `y` grows
//! downward, and integer positions are pixel centers. Orientation terms
//! ("counter-clockwise", "left turn") refer to the sign of the shoelace sum in
//! these raw coordinates, so a positive signed area means counter-clockwise.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2-D cross product.
    #[inline]
    pub fn cross(self, other: Self) -> T {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, other: Self) -> T {
        (self - other).norm()
    }

    #[inline]
    pub fn lerp(self, other: Self, t: T) -> Self {
        self + (other - self) * t
    }
}

impl<T: Scalar> Add for Point2<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Point2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Mul<T> for Point2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s)
    }
}

impl<T: Scalar> Neg for Point2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Cross product of `(b - a)` and `(c - a)`; positive when `a, b, c` turn left.
#[inline]
pub fn orient<T: Scalar>(a: Point2<T>, b: Point2<T>, c: Point2<T>) -> T {
    (b - a).cross(c - a)
}

/// Signed shoelace area of a closed polygon (last vertex joins the first).
pub fn signed_area<T: Scalar>(poly: &[Point2<T>]) -> T {
    if poly.len() < 3 {
        return T::zero();
    }
    let mut acc = T::zero();
    for (i, &p) in poly.iter().enumerate() {
        let q = poly[(i + 1) % poly.len()];
        acc = acc + p.cross(q);
    }
    acc * T::lit(0.5)
}

pub fn polygon_area<T: Scalar>(poly: &[Point2<T>]) -> T {
    signed_area(poly).abs()
}

/// Closed path length, including the segment from the last vertex back to the first.
pub fn polygon_perimeter<T: Scalar>(poly: &[Point2<T>]) -> T {
    if poly.len() < 2 {
        return T::zero();
    }
    poly.iter()
        .enumerate()
        .map(|(i, &p)| p.distance(poly[(i + 1) % poly.len()]))
        .sum()
}

/// Area-weighted centroid of a closed polygon.
pub fn polygon_centroid<T: Scalar>(poly: &[Point2<T>]) -> Result<Point2<T>> {
    let a = signed_area(poly);
    if a == T::zero() || !a.is_finite() {
        return Err(Error::DegenerateContour("zero area, centroid undefined"));
    }
    // Shift to the first vertex to keep the products small.
    let o = poly[0];
    let (mut cx, mut cy) = (T::zero(), T::zero());
    for (i, &p) in poly.iter().enumerate() {
        let p = p - o;
        let q = poly[(i + 1) % poly.len()] - o;
        let w = p.cross(q);
        cx = cx + (p.x + q.x) * w;
        cy = cy + (p.y + q.y) * w;
    }
    let k = T::one() / (T::lit(6.0) * a);
    Ok(Point2::new(o.x + cx * k, o.y + cy * k))
}

/// Euclidean distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance<T: Scalar>(p: Point2<T>, a: Point2<T>, b: Point2<T>) -> T {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == T::zero() {
        return p.distance(a);
    }
    let ap = p - a;
    let t = (ap.dot(ab) / len2).max(T::zero()).min(T::one());
    (ap - ab * t).norm()
}

/// Even-odd point-in-polygon test; points exactly on an edge may land either way.
pub fn point_in_polygon<T: Scalar>(p: Point2<T>, poly: &[Point2<T>]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Vec<Point2<f64>> {
        [(0.0, 0.0), (99.0, 0.0), (99.0, 99.0), (0.0, 99.0)]
            .iter()
            .map(|&(x, y)| Point2::new(x, y))
            .collect()
    }

    #[test]
    fn square_area_perimeter_centroid() {
        let sq = square();
        assert_eq!(polygon_area(&sq), 9801.0);
        assert_eq!(polygon_perimeter(&sq), 396.0);
        let c = polygon_centroid(&sq).unwrap();
        assert!((c.x - 49.5).abs() < 1e-12 && (c.y - 49.5).abs() < 1e-12);
    }

    #[test]
    fn positive_area_is_counter_clockwise() {
        // Walking right along the top edge first, then down, in y-down coordinates.
        assert!(signed_area(&square()) > 0.0);
        let mut rev = square();
        rev.reverse();
        assert!(signed_area(&rev) < 0.0);
    }

    #[test]
    fn translated_square_keeps_area() {
        let shifted: Vec<_> = square().iter().map(|&p| p + Point2::new(17.0, 23.0)).collect();
        assert_eq!(polygon_area(&shifted), 9801.0);
        assert_eq!(polygon_perimeter(&shifted), 396.0);
        let c = polygon_centroid(&shifted).unwrap();
        assert!((c.x - 66.5).abs() < 1e-9 && (c.y - 72.5).abs() < 1e-9);
    }

    #[test]
    fn zero_area_centroid_is_error() {
        let line = vec![Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(2.0, 2.0)];
        assert!(polygon_centroid(&line).is_err());
    }

    #[test]
    fn f32_works_too() {
        let sq: Vec<Point2<f32>> = square().iter().map(|p| Point2::new(p.x as f32, p.y as f32)).collect();
        assert_eq!(polygon_area(&sq), 9801.0f32);
    }

    #[test]
    fn segment_distance_clamps_to_endpoints() {
        let a = Point2::new(0.0, 0.0);
        let b = Point2::new(10.0, 0.0);
        assert_eq!(point_segment_distance(Point2::new(5.0, 3.0), a, b), 3.0);
        assert_eq!(point_segment_distance(Point2::new(13.0, 4.0), a, b), 5.0);
    }
}
