//! Synthetic shapes and independent oracles shared by the integration tests.
#![allow(dead_code)]

use shapefeat::raster::{label_components, trace_contours, BinaryMask, Contour};

/// Disc of pixels with `(x - c)^2 + (y - c)^2 <= r^2`, centered on a pixel.
pub fn disc(r: f64, margin: usize) -> BinaryMask {
    let size = 2 * (r.ceil() as usize + margin) + 1;
    let c = (size / 2) as f64;
    BinaryMask::from_fn(size, size, |x, y| {
        let (dx, dy) = (x as f64 - c, y as f64 - c);
        dx * dx + dy * dy <= r * r
    })
}

pub fn ellipse(a: f64, b: f64, margin: usize) -> BinaryMask {
    let w = 2 * (a.ceil() as usize + margin) + 1;
    let h = 2 * (b.ceil() as usize + margin) + 1;
    let (cx, cy) = ((w / 2) as f64, (h / 2) as f64);
    BinaryMask::from_fn(w, h, |x, y| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        (dx / a).powi(2) + (dy / b).powi(2) <= 1.0
    })
}

/// Axis-aligned block of `side_x` by `side_y` pixels starting at `(x0, y0)`.
pub fn block(w: usize, h: usize, x0: usize, y0: usize, side_x: usize, side_y: usize) -> BinaryMask {
    BinaryMask::from_fn(w, h, |x, y| (x0..x0 + side_x).contains(&x) && (y0..y0 + side_y).contains(&y))
}

/// Rectangle of continuous size `len` by `wid` rotated by `deg` (from +x toward +y),
/// rasterized by pixel-center containment.
pub fn rotated_rect(len: f64, wid: f64, deg: f64, size: usize) -> BinaryMask {
    let (s, c) = deg.to_radians().sin_cos();
    let m = size as f64 / 2.0;
    BinaryMask::from_fn(size, size, |x, y| {
        let (dx, dy) = (x as f64 - m, y as f64 - m);
        let u = dx * c + dy * s;
        let v = -dx * s + dy * c;
        u.abs() <= len / 2.0 && v.abs() <= wid / 2.0
    })
}

pub fn outer_contours(m: &BinaryMask) -> Vec<Contour> {
    trace_contours(&label_components(m)).into_iter().filter(|c| !c.is_hole).collect()
}

pub fn single_outer(m: &BinaryMask) -> Contour {
    let mut c = outer_contours(m);
    assert_eq!(c.len(), 1, "expected exactly one region");
    c.remove(0)
}

/// Random blob: union of overlapping discs around a center, deterministic per seed.
pub fn random_blob(seed: u64, size: usize) -> BinaryMask {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let c = size as f64 / 2.0;
    let discs: Vec<(f64, f64, f64)> = (0..6)
        .map(|_| {
            let ang: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let off: f64 = rng.gen_range(0.0..size as f64 / 6.0);
            let r: f64 = rng.gen_range(size as f64 / 10.0..size as f64 / 5.0);
            (c + off * ang.cos(), c + off * ang.sin(), r)
        })
        .collect();
    let mut m = BinaryMask::from_fn(size, size, |x, y| {
        discs.iter().any(|&(cx, cy, r)| (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r)
    });
    // keep only the largest component so every blob is one region
    let l = label_components(&m);
    let keep = shapefeat::raster::largest_region(&l).unwrap();
    for y in 0..size {
        for x in 0..size {
            m.set(x, y, l.get(x, y) == keep);
        }
    }
    m
}

/// Independent BFS flood fill (8-connectivity) returning region areas in
/// raster order of first pixel.
pub fn flood_fill_areas(m: &BinaryMask) -> Vec<usize> {
    let (w, h) = (m.width(), m.height());
    let mut seen = vec![false; w * h];
    let mut areas = Vec::new();
    for start in 0..w * h {
        if !m.pixels()[start] || seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut n = 0;
        while let Some(i) = stack.pop() {
            n += 1;
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h {
                        let j = ny as usize * w + nx as usize;
                        if m.pixels()[j] && !seen[j] {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
        }
        areas.push(n);
    }
    areas
}

/// L-shape: `side` x `side` square with its top-right `side/2` quadrant removed.
pub fn l_shape(side: usize, margin: usize) -> BinaryMask {
    let n = side + 2 * margin;
    let half = side / 2;
    BinaryMask::from_fn(n, n, |x, y| {
        let (inside_x, inside_y) = ((margin..margin + side).contains(&x), (margin..margin + side).contains(&y));
        let cut = x >= margin + half && y < margin + half;
        inside_x && inside_y && !cut
    })
}

/// Writes the mask as an 8-bit grayscale PNG (255 foreground).
pub fn save_mask(m: &BinaryMask, path: &std::path::Path) {
    let img = image::GrayImage::from_fn(m.width() as u32, m.height() as u32, |x, y| {
        image::Luma([if m.get(x as usize, y as usize) { 255 } else { 0 }])
    });
    img.save(path).unwrap();
}

/// Union of several masks of equal size.
pub fn union(masks: &[BinaryMask]) -> BinaryMask {
    let (w, h) = (masks[0].width(), masks[0].height());
    BinaryMask::from_fn(w, h, |x, y| masks.iter().any(|m| m.get(x, y)))
}

/// Three separated 30x30 blocks in a row on a 130x50 canvas.
pub fn three_blocks() -> BinaryMask {
    union(&[block(130, 50, 5, 10, 30, 30), block(130, 50, 50, 10, 30, 30), block(130, 50, 95, 10, 30, 30)])
}
