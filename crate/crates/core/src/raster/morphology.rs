use super::BinaryMask;
use crate::error::{Error, Result};

pub const DEFAULT_SIGMA: f64 = 1.0;
pub const DEFAULT_CLOSE_RADIUS: usize = 1;

/// Reflect-mode index (`d c b a | a b c d | d c b a`), valid for any offset.
#[inline]
fn reflect(i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    let m = i.rem_euclid(period);
    (if m >= n { period - 1 - m } else { m }) as usize
}

fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut k: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = k.iter().sum();
    k.iter_mut().for_each(|w| *w /= sum);
    k
}

/// Separable Gaussian blur of the 0/1 field followed by re-thresholding at one half.
pub fn gaussian_blur_then_rebinarize(mask: &BinaryMask, sigma: f64) -> Result<BinaryMask> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    let (w, h) = (mask.width(), mask.height());
    let kernel = gaussian_kernel(sigma);
    let r = (kernel.len() / 2) as isize;

    let src: Vec<f64> = mask.pixels().iter().map(|&p| if p { 1.0 } else { 0.0 }).collect();
    let mut horiz = vec![0.0; w * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..w {
            horiz[y * w + x] = kernel
                .iter()
                .enumerate()
                .map(|(k, wt)| wt * row[reflect(x as isize + k as isize - r, w)])
                .sum();
        }
    }
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let v: f64 = kernel
                .iter()
                .enumerate()
                .map(|(k, wt)| wt * horiz[reflect(y as isize + k as isize - r, h) * w + x])
                .sum();
            out.push(v >= 0.5);
        }
    }
    BinaryMask::new(w, h, out, mask.source_name())
}

/// 1-D running max (`dilate = true`) or min over a window of `radius` on each side.
/// Samples outside `0..len` are background.
fn filter_line(line: &[bool], radius: usize, dilate: bool, out: &mut [bool]) {
    let n = line.len();
    for (i, o) in out.iter_mut().enumerate() {
        let lo = i.saturating_sub(radius);
        let hi = (i + radius).min(n - 1);
        *o = if dilate {
            line[lo..=hi].iter().any(|&v| v)
        } else {
            // Window reaching outside the frame sees background.
            i >= radius && i + radius < n && line[lo..=hi].iter().all(|&v| v)
        };
    }
}

fn filter_2d(px: &[bool], w: usize, h: usize, radius: usize, dilate: bool) -> Vec<bool> {
    let mut tmp = vec![false; w * h];
    for y in 0..h {
        filter_line(&px[y * w..(y + 1) * w], radius, dilate, &mut tmp[y * w..(y + 1) * w]);
    }
    let mut out = vec![false; w * h];
    let mut col = vec![false; h];
    let mut res = vec![false; h];
    for x in 0..w {
        for y in 0..h {
            col[y] = tmp[y * w + x];
        }
        filter_line(&col, radius, dilate, &mut res);
        for y in 0..h {
            out[y * w + x] = res[y];
        }
    }
    out
}

/// Dilation then erosion with a `(2r+1)×(2r+1)` square.
///
/// The mask is treated as lying on an infinite background plane: it is padded by
/// `radius` before filtering and cropped afterwards, so regions touching the
/// frame are not eaten by the erosion step.
pub fn morphological_close(mask: &BinaryMask, radius: usize) -> Result<BinaryMask> {
    if radius == 0 {
        return Err(Error::InvalidParameter("closing radius must be at least 1".into()));
    }
    let (w, h) = (mask.width(), mask.height());
    let (pw, ph) = (w + 2 * radius, h + 2 * radius);
    let mut padded = vec![false; pw * ph];
    for y in 0..h {
        for x in 0..w {
            padded[(y + radius) * pw + x + radius] = mask.get(x, y);
        }
    }
    let dilated = filter_2d(&padded, pw, ph, radius, true);
    let closed = filter_2d(&dilated, pw, ph, radius, false);
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        out.extend_from_slice(&closed[(y + radius) * pw + radius..(y + radius) * pw + radius + w]);
    }
    BinaryMask::new(w, h, out, mask.source_name())
}

/// Blur → re-binarize → close.
pub fn preprocess(mask: &BinaryMask, sigma: f64, close_radius: usize) -> Result<BinaryMask> {
    let blurred = gaussian_blur_then_rebinarize(mask, sigma)?;
    morphological_close(&blurred, close_radius)
}
