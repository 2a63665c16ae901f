//! Polygonal approximations of region boundaries.
//!
//! Two methods are provided:
//!
//! * Douglas–Peucker simplification of the closed contour, split at its two
//!   farthest-apart points. Retained vertices are a subsequence of the input.
//! * Grid-constrained minimum perimeter polygon (MPP). The region is covered by
//!   square cells of `cell_size` pixels whose corners sit on pixel centers
//!   anchored at the contour's bounding-box minimum. Cells lying entirely inside
//!   the region form the inner wall; offsetting that wall by one cell gives the
//!   outer wall. The MPP is the shortest closed path inside this band that
//!   encloses the inner wall. Its vertices are convex inner-wall corners or the
//!   outer-wall mirrors of concave inner-wall corners, found with a two-crawler
//!   sweep from the top-left corner.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::geometric::convex_hull;
use crate::geometry::{point_segment_distance, polygon_area, polygon_perimeter, Point2};
use crate::raster::{Contour, PixelPos};
use crate::scalar::Scalar;

pub const DEFAULT_DP_EPSILON: f64 = 2.0;
pub const DEFAULT_MPP_CELL: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ApproxMethod {
    DouglasPeucker,
    Mpp,
}

impl ApproxMethod {
    pub fn prefix(self) -> &'static str {
        match self {
            ApproxMethod::DouglasPeucker => "dp",
            ApproxMethod::Mpp => "mpp",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyApprox<T> {
    pub vertices: Vec<Point2<T>>,
    pub method: ApproxMethod,
    /// Epsilon in pixels for Douglas–Peucker, cell size in pixels for MPP.
    pub param: T,
    /// For Douglas–Peucker, the contour index of every vertex; empty for MPP.
    pub source_indices: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyMetrics<T> {
    pub n_vertices: usize,
    pub perimeter_ratio: T,
    pub area_ratio: T,
    pub compression: T,
}

/// Scalar summaries of an approximation relative to its source boundary.
pub fn polygon_metrics<T: Scalar>(approx: &PolyApprox<T>, source: &[Point2<T>]) -> PolyMetrics<T> {
    let n_vertices = approx.vertices.len();
    PolyMetrics {
        n_vertices,
        perimeter_ratio: polygon_perimeter(&approx.vertices) / polygon_perimeter(source),
        area_ratio: polygon_area(&approx.vertices) / polygon_area(source),
        compression: T::from_count(n_vertices) / T::from_count(source.len()),
    }
}

/// Index pair `(i, j)`, `i < j`, of the two farthest-apart points; ties keep the
/// lexicographically smallest pair.
fn farthest_pair<T: Scalar>(pts: &[Point2<T>]) -> (usize, usize) {
    let candidates: Vec<usize> = match convex_hull(pts) {
        Ok(hull) => {
            let mut idx: Vec<usize> =
                hull.iter().filter_map(|h| pts.iter().position(|p| p == h)).collect();
            idx.sort_unstable();
            idx
        }
        Err(_) => (0..pts.len()).collect(),
    };
    let mut best = (0, 1.min(pts.len() - 1));
    let mut best_d = T::neg_infinity();
    for (a, &i) in candidates.iter().enumerate() {
        for &j in &candidates[a + 1..] {
            let d = pts[i] - pts[j];
            let d2 = d.dot(d);
            if d2 > best_d {
                best_d = d2;
                best = (i, j);
            }
        }
    }
    best
}

/// Douglas–Peucker simplification of a closed polygon.
///
/// A point is kept when its distance to the current chord exceeds `epsilon`.
/// With `epsilon == 0` nothing is discarded.
pub fn douglas_peucker<T: Scalar>(pts: &[Point2<T>], epsilon: T) -> Result<PolyApprox<T>> {
    if !(epsilon >= T::zero()) {
        return Err(Error::InvalidParameter(format!("epsilon must be non-negative, got {epsilon}")));
    }
    let n = pts.len();
    if n < 3 {
        return Err(Error::DegenerateContour("fewer than three points"));
    }
    let mut keep = vec![false; n];
    if epsilon == T::zero() {
        keep.iter_mut().for_each(|k| *k = true);
    } else {
        let (i, j) = farthest_pair(pts);
        keep[i] = true;
        keep[j] = true;
        let at = |k: usize| pts[k % n];
        // Chains over unrolled indices: i..=j and j..=i+n.
        let mut stack = vec![(i, j), (j, i + n)];
        while let Some((s, e)) = stack.pop() {
            if e <= s + 1 {
                continue;
            }
            let (a, b) = (at(s), at(e));
            let mut far = (s, T::neg_infinity());
            for k in s + 1..e {
                let d = point_segment_distance(at(k), a, b);
                if d > far.1 {
                    far = (k, d);
                }
            }
            if far.1 > epsilon {
                keep[far.0 % n] = true;
                stack.push((far.0, e));
                stack.push((s, far.0));
            }
        }
    }
    let source_indices: Vec<usize> = (0..n).filter(|&k| keep[k]).collect();
    if source_indices.len() < 3 {
        return Err(Error::DegenerateContour("simplification collapsed to fewer than three vertices"));
    }
    Ok(PolyApprox {
        vertices: source_indices.iter().map(|&k| pts[k]).collect(),
        method: ApproxMethod::DouglasPeucker,
        param: epsilon,
        source_indices,
    })
}

/// Filled interior (plus boundary) of an integer polygon over its bounding box.
struct FilledRegion {
    x0: i64,
    y0: i64,
    width: usize,
    height: usize,
    inside: Vec<bool>,
}

fn fill_polygon(points: &[PixelPos]) -> FilledRegion {
    let x0 = points.iter().map(|p| p.x as i64).min().unwrap();
    let x1 = points.iter().map(|p| p.x as i64).max().unwrap();
    let y0 = points.iter().map(|p| p.y as i64).min().unwrap();
    let y1 = points.iter().map(|p| p.y as i64).max().unwrap();
    let (width, height) = ((x1 - x0 + 1) as usize, (y1 - y0 + 1) as usize);
    let mut inside = vec![false; width * height];
    let n = points.len();

    let mut crossings: Vec<f64> = Vec::new();
    for row in 0..height {
        let y = y0 + row as i64;
        crossings.clear();
        for i in 0..n {
            let (a, b) = (points[i], points[(i + 1) % n]);
            let (ay, by) = (a.y as i64, b.y as i64);
            if (ay > y) != (by > y) {
                let t = (y - ay) as f64 / (by - ay) as f64;
                crossings.push(a.x as f64 + t * (b.x - a.x) as f64);
            }
        }
        crossings.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for pair in crossings.chunks_exact(2) {
            let lo = (pair[0].ceil() as i64).max(x0);
            let hi = (pair[1].floor() as i64).min(x1);
            for x in lo..=hi {
                inside[row * width + (x - x0) as usize] = true;
            }
        }
    }
    // Lattice points on the boundary itself.
    for i in 0..n {
        let (a, b) = (points[i], points[(i + 1) % n]);
        let (dx, dy) = ((b.x - a.x) as i64, (b.y - a.y) as i64);
        let steps = gcd(dx.unsigned_abs(), dy.unsigned_abs()).max(1) as i64;
        for s in 0..=steps {
            let x = a.x as i64 + dx * s / steps;
            let y = a.y as i64 + dy * s / steps;
            inside[(y - y0) as usize * width + (x - x0) as usize] = true;
        }
    }
    FilledRegion { x0, y0, width, height, inside }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Full cells of the inner wall, holes filled, restricted to the largest
/// 4-connected cell component.
struct CellComplex {
    nx: usize,
    ny: usize,
    full: Vec<bool>,
}

impl CellComplex {
    fn get(&self, i: i64, j: i64) -> bool {
        i >= 0 && j >= 0 && (i as usize) < self.nx && (j as usize) < self.ny && self.full[j as usize * self.nx + i as usize]
    }
}

fn build_cells(region: &FilledRegion, cell: usize) -> Option<CellComplex> {
    let nx = (region.width - 1) / cell;
    let ny = (region.height - 1) / cell;
    if nx == 0 || ny == 0 {
        return None;
    }
    // Summed-area table of inside pixels.
    let (w, h) = (region.width, region.height);
    let mut sat = vec![0u32; (w + 1) * (h + 1)];
    for y in 0..h {
        let mut row = 0u32;
        for x in 0..w {
            row += region.inside[y * w + x] as u32;
            sat[(y + 1) * (w + 1) + x + 1] = sat[y * (w + 1) + x + 1] + row;
        }
    }
    let count = |x0: usize, y0: usize, x1: usize, y1: usize| {
        sat[y1 * (w + 1) + x1] + sat[y0 * (w + 1) + x0] - sat[y0 * (w + 1) + x1] - sat[y1 * (w + 1) + x0]
    };
    let need = ((cell + 1) * (cell + 1)) as u32;
    let mut full = vec![false; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let (px, py) = (i * cell, j * cell);
            full[j * nx + i] = count(px, py, px + cell + 1, py + cell + 1) == need;
        }
    }

    // Largest 4-connected component, first in raster order on ties.
    let mut comp = vec![0u32; nx * ny];
    let mut best = (0u32, 0usize);
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..nx * ny {
        if !full[start] || comp[start] != 0 {
            continue;
        }
        next += 1;
        comp[start] = next;
        queue.push_back(start);
        let mut size = 0usize;
        while let Some(c) = queue.pop_front() {
            size += 1;
            let (i, j) = (c % nx, c / nx);
            let mut nbrs = Vec::with_capacity(4);
            if i > 0 {
                nbrs.push(c - 1);
            }
            if i + 1 < nx {
                nbrs.push(c + 1);
            }
            if j > 0 {
                nbrs.push(c - nx);
            }
            if j + 1 < ny {
                nbrs.push(c + nx);
            }
            for d in nbrs {
                if full[d] && comp[d] == 0 {
                    comp[d] = next;
                    queue.push_back(d);
                }
            }
        }
        if size > best.1 {
            best = (next, size);
        }
    }
    if best.1 == 0 {
        return None;
    }
    // Fill holes: anything not 8-reachable from outside the padded frame.
    let (pw, ph) = (nx + 2, ny + 2);
    let solid = |pi: usize, pj: usize| pi >= 1 && pj >= 1 && pi <= nx && pj <= ny && comp[(pj - 1) * nx + pi - 1] == best.0;
    let mut outside = vec![false; pw * ph];
    outside[0] = true;
    queue.push_back(0);
    while let Some(c) = queue.pop_front() {
        let (pi, pj) = ((c % pw) as i64, (c / pw) as i64);
        for dj in -1..=1i64 {
            for di in -1..=1i64 {
                let (qi, qj) = (pi + di, pj + dj);
                if qi < 0 || qj < 0 || qi >= pw as i64 || qj >= ph as i64 {
                    continue;
                }
                let q = qj as usize * pw + qi as usize;
                if !outside[q] && !solid(qi as usize, qj as usize) {
                    outside[q] = true;
                    queue.push_back(q);
                }
            }
        }
    }
    let full = (0..nx * ny).map(|c| !outside[(c / nx + 1) * pw + c % nx + 1]).collect();
    Some(CellComplex { nx, ny, full })
}

type Lattice = (i64, i64);

/// Crack-following walk around the cell complex, interior on the left.
/// At pinch vertices the walk turns left, hugging the current cell.
fn boundary_walk(cells: &CellComplex) -> Vec<Lattice> {
    let mut out_edges: HashMap<Lattice, Vec<Lattice>> = HashMap::new();
    let mut start = None;
    for j in 0..cells.ny as i64 {
        for i in 0..cells.nx as i64 {
            if !cells.get(i, j) {
                continue;
            }
            if start.is_none() {
                start = Some((i, j));
            }
            if !cells.get(i, j - 1) {
                out_edges.entry((i, j)).or_default().push((1, 0));
            }
            if !cells.get(i + 1, j) {
                out_edges.entry((i + 1, j)).or_default().push((0, 1));
            }
            if !cells.get(i, j + 1) {
                out_edges.entry((i + 1, j + 1)).or_default().push((-1, 0));
            }
            if !cells.get(i - 1, j) {
                out_edges.entry((i, j + 1)).or_default().push((0, -1));
            }
        }
    }
    let start = start.expect("cell complex is non-empty");
    let mut walk = vec![start];
    let mut v = (start.0 + 1, start.1);
    let mut dir: Lattice = (1, 0);
    while v != start {
        walk.push(v);
        let options = &out_edges[&v];
        dir = if options.len() == 1 {
            options[0]
        } else {
            let left = (-dir.1, dir.0);
            if options.contains(&left) { left } else { options[0] }
        };
        v = (v.0 + dir.0, v.1 + dir.1);
    }
    walk
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Corner {
    Convex,
    ConcaveMirror,
}

#[inline]
fn orient_i(a: Lattice, b: Lattice, c: Lattice) -> i64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Corner vertices of the walk; concave corners are replaced by their outer-wall mirrors.
fn classify_corners(walk: &[Lattice]) -> Vec<(Lattice, Corner)> {
    let n = walk.len();
    let mut out = Vec::new();
    for k in 0..n {
        let (p, v, q) = (walk[(k + n - 1) % n], walk[k], walk[(k + 1) % n]);
        let din = (v.0 - p.0, v.1 - p.1);
        let dout = (q.0 - v.0, q.1 - v.1);
        let turn = din.0 * dout.1 - din.1 * dout.0;
        if turn > 0 {
            out.push((v, Corner::Convex));
        } else if turn < 0 {
            // outward normal of a direction d (interior on the left) is (d.y, -d.x)
            let m = (v.0 + din.1 + dout.1, v.1 - din.0 - dout.0);
            out.push((m, Corner::ConcaveMirror));
        } else if din.0 == -dout.0 && din.1 == -dout.1 {
            // Reversal cannot occur on a crack walk of 4-connected cells.
            unreachable!("boundary walk reversed direction");
        }
    }
    out
}

/// Two-crawler sweep; returns indices into `verts` of the MPP vertices.
/// `verts[0]` must be a convex vertex that lies on the MPP.
fn crawl(verts: &[(Lattice, Corner)]) -> Vec<usize> {
    let n = verts.len();
    let at = |k: usize| verts[k % n].0;
    let mut out = vec![0usize];
    let mut apex = 0usize;
    let (mut wc, mut bc) = (0usize, 0usize);
    let mut k = 1usize;
    while k <= n {
        let (a, v) = (at(apex), at(k));
        if orient_i(a, at(wc), v) > 0 {
            apex = wc;
        } else if orient_i(a, at(bc), v) < 0 {
            apex = bc;
        } else {
            match verts[k % n].1 {
                Corner::Convex => wc = k,
                Corner::ConcaveMirror => bc = k,
            }
            k += 1;
            continue;
        }
        out.push(apex % n);
        wc = apex;
        bc = apex;
        k = apex + 1;
    }
    out
}

/// Minimum perimeter polygon on a `cell_size` pixel grid.
pub fn min_perimeter_polygon<T: Scalar>(contour: &Contour, cell_size: usize) -> Result<PolyApprox<T>> {
    if cell_size < 1 {
        return Err(Error::InvalidParameter("MPP cell size must be at least 1".into()));
    }
    if contour.points.len() < 3 {
        return Err(Error::DegenerateContour("fewer than three points"));
    }
    let region = fill_polygon(&contour.points);
    let cells = build_cells(&region, cell_size).ok_or(Error::DegenerateBand { cell_size })?;
    let walk = boundary_walk(&cells);
    let corners = classify_corners(&walk);
    debug_assert_eq!(corners[0].1, Corner::Convex);
    let chosen = crawl(&corners);
    if chosen.len() < 3 {
        return Err(Error::DegenerateBand { cell_size });
    }
    let c = cell_size as i64;
    let vertices = chosen
        .iter()
        .map(|&k| {
            let (i, j) = corners[k].0;
            Point2::new(T::from_int(region.x0 + i * c), T::from_int(region.y0 + j * c))
        })
        .collect();
    Ok(PolyApprox { vertices, method: ApproxMethod::Mpp, param: T::from_count(cell_size), source_indices: Vec::new() })
}
