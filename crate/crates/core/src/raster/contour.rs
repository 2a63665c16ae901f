use std::collections::{HashMap, VecDeque};

use super::LabeledMask;
use crate::geometry::Point2;
use crate::scalar::Scalar;

/// Integer pixel-center coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PixelPos {
    pub x: i32,
    pub y: i32,
}

impl PixelPos {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn to_point<T: Scalar>(self) -> Point2<T> {
        Point2::new(T::from_int(self.x as i64), T::from_int(self.y as i64))
    }
}

/// Closed boundary of one region (or of one of its holes).
///
/// Outer contours have positive signed area in image coordinates, hole contours
/// negative. Consecutive points, including last to first, are 8-neighbors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contour {
    pub points: Vec<PixelPos>,
    pub region_label: u32,
    pub is_hole: bool,
}

impl Contour {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn to_points<T: Scalar>(&self) -> Vec<Point2<T>> {
        self.points.iter().map(|p| p.to_point()).collect()
    }

    /// Exact doubled shoelace sum.
    pub fn doubled_signed_area(&self) -> i64 {
        let n = self.points.len();
        (0..n)
            .map(|i| {
                let (p, q) = (self.points[i], self.points[(i + 1) % n]);
                p.x as i64 * q.y as i64 - q.x as i64 * p.y as i64
            })
            .sum()
    }

    pub fn translated(&self, dx: i32, dy: i32) -> Self {
        Self {
            points: self.points.iter().map(|p| PixelPos::new(p.x + dx, p.y + dy)).collect(),
            ..self.clone()
        }
    }

    /// Same closed curve traversed the other way, keeping the first point.
    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        if points.len() > 1 {
            points[1..].reverse();
        }
        Self { points, ..self.clone() }
    }
}

pub(crate) const MIN_CONTOUR_POINTS: usize = 4;

/// Moore neighborhood, clockwise on screen, starting west.
const RING: [(i32, i32); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];

fn ring_index(dx: i32, dy: i32) -> usize {
    RING.iter()
        .position(|&d| d == (dx, dy))
        .expect("backtrack pixel is an 8-neighbor")
}

/// Moore-neighbor boundary following from `start`, which must be the first
/// member pixel in raster order (so its west neighbor is outside the set).
///
/// Tracing stops once a (pixel, entry direction) state repeats. This is Jacob's
/// criterion generalized to shapes such as one-pixel-wide lines, where the
/// initial entry is never repeated.
pub fn trace_region_boundary(start: PixelPos, member: impl Fn(i32, i32) -> bool) -> Vec<PixelPos> {
    let mut seen: HashMap<(PixelPos, usize), usize> = HashMap::new();
    let mut states: Vec<(PixelPos, usize)> = Vec::new();
    let mut p = start;
    let mut back = 0usize;
    let cycle_start = loop {
        if let Some(&i) = seen.get(&(p, back)) {
            break i;
        }
        seen.insert((p, back), states.len());
        states.push((p, back));

        let next = (1..8).map(|k| (back + k) % 8).find(|&d| member(p.x + RING[d].0, p.y + RING[d].1));
        let Some(d) = next else {
            return vec![start];
        };
        let prev = RING[(d + 7) % 8];
        let c = PixelPos::new(p.x + RING[d].0, p.y + RING[d].1);
        back = ring_index(p.x + prev.0 - c.x, p.y + prev.1 - c.y);
        p = c;
    };
    let cycle = &states[cycle_start..];
    let offset = cycle.iter().position(|&(q, _)| q == start).unwrap_or(0);
    cycle[offset..].iter().chain(&cycle[..offset]).map(|&(q, _)| q).collect()
}

/// Outer and hole contours of every region, ordered by region label (outer
/// first, then that region's holes in raster order of their first pixel).
/// Contours with fewer than four points are dropped.
pub fn trace_contours(labeled: &LabeledMask) -> Vec<Contour> {
    let (w, h) = (labeled.width(), labeled.height());
    let n = labeled.num_regions() as usize;

    let mut first: Vec<Option<PixelPos>> = vec![None; n + 1];
    for y in 0..h {
        for x in 0..w {
            let l = labeled.get(x, y) as usize;
            if l > 0 && first[l].is_none() {
                first[l] = Some(PixelPos::new(x as i32, y as i32));
            }
        }
    }

    let holes = find_holes(labeled);
    let mut holes_by_region: Vec<Vec<(PixelPos, u32)>> = vec![Vec::new(); n + 1];
    for (id, start) in holes.starts.iter().enumerate() {
        let enclosing = labeled.get(start.x as usize, start.y as usize - 1);
        holes_by_region[enclosing as usize].push((*start, id as u32 + 1));
    }

    let mut out = Vec::new();
    for label in 1..=n {
        let Some(start) = first[label] else { continue };
        let l = label as u32;
        let points = trace_region_boundary(start, |x, y| labeled.get_signed(x as i64, y as i64) == l);
        if points.len() >= MIN_CONTOUR_POINTS {
            out.push(Contour { points, region_label: l, is_hole: false });
        }
        for &(hstart, hid) in &holes_by_region[label] {
            let points = trace_region_boundary(hstart, |x, y| holes.get(x, y) == hid);
            if points.len() >= MIN_CONTOUR_POINTS {
                let c = Contour { points, region_label: l, is_hole: true };
                out.push(c.reversed());
            }
        }
    }
    out
}

struct Holes {
    width: usize,
    height: usize,
    ids: Vec<u32>,
    starts: Vec<PixelPos>,
}

impl Holes {
    fn get(&self, x: i32, y: i32) -> u32 {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            0
        } else {
            self.ids[y as usize * self.width + x as usize]
        }
    }
}

/// Background 4-components that do not reach the frame.
fn find_holes(labeled: &LabeledMask) -> Holes {
    let (w, h) = (labeled.width(), labeled.height());
    let bg = |i: usize| labeled.labels()[i] == 0;
    // 0 = unvisited, u32::MAX = connected to the frame
    let mut ids = vec![0u32; w * h];
    let mut queue = VecDeque::new();

    let flood = |seed: usize, id: u32, ids: &mut Vec<u32>, queue: &mut VecDeque<usize>| {
        ids[seed] = id;
        queue.push_back(seed);
        while let Some(i) = queue.pop_front() {
            let (x, y) = (i % w, i / w);
            let mut visit = |j: usize| {
                if bg(j) && ids[j] == 0 {
                    ids[j] = id;
                    queue.push_back(j);
                }
            };
            if x > 0 {
                visit(i - 1);
            }
            if x + 1 < w {
                visit(i + 1);
            }
            if y > 0 {
                visit(i - w);
            }
            if y + 1 < h {
                visit(i + w);
            }
        }
    };

    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let on_frame = x == 0 || y == 0 || x + 1 == w || y + 1 == h;
            if on_frame && bg(i) && ids[i] == 0 {
                flood(i, u32::MAX, &mut ids, &mut queue);
            }
        }
    }
    let mut starts = Vec::new();
    for i in 0..w * h {
        if bg(i) && ids[i] == 0 {
            starts.push(PixelPos::new((i % w) as i32, (i / w) as i32));
            flood(i, starts.len() as u32, &mut ids, &mut queue);
        }
    }
    for id in ids.iter_mut() {
        if *id == u32::MAX {
            *id = 0;
        }
    }
    Holes { width: w, height: h, ids, starts }
}
