use super::BinaryMask;
use crate::error::{Error, Result};

/// Per-pixel region ids; 0 is background, regions are `1..=num_regions`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledMask {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    num_regions: u32,
}

impl LabeledMask {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn num_regions(&self) -> u32 {
        self.num_regions
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Out-of-bounds reads return 0.
    #[inline]
    pub fn get_signed(&self, x: i64, y: i64) -> u32 {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            0
        } else {
            self.get(x as usize, y as usize)
        }
    }

    /// Pixel counts indexed by label (index 0 counts background).
    pub fn region_areas(&self) -> Vec<usize> {
        let mut areas = vec![0usize; self.num_regions as usize + 1];
        for &l in &self.labels {
            areas[l as usize] += 1;
        }
        areas
    }

    /// Pixel coordinates of one region in raster order.
    pub fn region_pixels(&self, label: u32) -> Vec<(usize, usize)> {
        self.labels
            .iter()
            .enumerate()
            .filter(|&(_, &l)| l == label)
            .map(|(i, _)| (i % self.width, i / self.width))
            .collect()
    }

    /// Mean pixel coordinate of every region, indexed by `label - 1`.
    pub fn region_centroids(&self) -> Vec<(f64, f64)> {
        let n = self.num_regions as usize;
        let mut acc = vec![(0.0f64, 0.0f64, 0usize); n];
        for (i, &l) in self.labels.iter().enumerate() {
            if l > 0 {
                let a = &mut acc[l as usize - 1];
                a.0 += (i % self.width) as f64;
                a.1 += (i / self.width) as f64;
                a.2 += 1;
            }
        }
        acc.into_iter().map(|(sx, sy, c)| (sx / c as f64, sy / c as f64)).collect()
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

fn union(parent: &mut [u32], a: u32, b: u32) {
    let (ra, rb) = (find(parent, a), find(parent, b));
    if ra != rb {
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        parent[hi as usize] = lo;
    }
}

/// Two-pass union-find labeling with 8-connectivity.
///
/// Final ids follow the raster-scan order of each component's first pixel.
pub fn label_components(mask: &BinaryMask) -> LabeledMask {
    let (w, h) = (mask.width(), mask.height());
    let mut prov = vec![0u32; w * h];
    let mut parent: Vec<u32> = vec![0];
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            // Already-visited 8-neighbors: W, NW, N, NE.
            let mut neighbors = [0u32; 4];
            if x > 0 {
                neighbors[0] = prov[y * w + x - 1];
            }
            if y > 0 {
                let up = (y - 1) * w;
                if x > 0 {
                    neighbors[1] = prov[up + x - 1];
                }
                neighbors[2] = prov[up + x];
                if x + 1 < w {
                    neighbors[3] = prov[up + x + 1];
                }
            }
            let mut current = 0u32;
            for &n in neighbors.iter().filter(|&&n| n != 0) {
                if current == 0 {
                    current = n;
                } else {
                    union(&mut parent, current, n);
                }
            }
            if current == 0 {
                current = parent.len() as u32;
                parent.push(current);
            }
            prov[y * w + x] = current;
        }
    }

    let mut remap = vec![0u32; parent.len()];
    let mut next = 0u32;
    let mut labels = prov;
    for l in labels.iter_mut() {
        if *l == 0 {
            continue;
        }
        let root = find(&mut parent, *l) as usize;
        if remap[root] == 0 {
            next += 1;
            remap[root] = next;
        }
        *l = remap[root];
    }
    LabeledMask { width: w, height: h, labels, num_regions: next }
}

/// Label with the largest pixel count; ties go to the smaller label.
pub fn largest_region(labeled: &LabeledMask) -> Result<u32> {
    let areas = labeled.region_areas();
    let mut best: Option<(u32, usize)> = None;
    for (label, &area) in areas.iter().enumerate().skip(1) {
        if best.is_none_or(|(_, a)| area > a) {
            best = Some((label as u32, area));
        }
    }
    best.map(|(l, _)| l).ok_or(Error::NoRegion)
}
