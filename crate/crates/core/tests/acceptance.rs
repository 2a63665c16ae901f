//! Acceptance suite. Prints one PASS/FAIL line per criterion followed by the
//! individual checks, and exits nonzero when any criterion fails.

mod common;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use common::*;
use rand::{Rng, SeedableRng};
use shapefeat::features::{feature_column_names, region_features, region_pixel_points, FeatureParams};
use shapefeat::geometric::{average_bending_energy, convex_hull, min_bounding_rect, polygon_perimeter};
use shapefeat::geometry::{point_segment_distance, Point2};
use shapefeat::labels::{decode_nifti, encode_nifti, read_nifti, write_nifti, NiftiLabelVolume};
use shapefeat::polygonal::{douglas_peucker, min_perimeter_polygon};
use shapefeat::pipeline::{
    run_create_label, run_extract, run_nifti, CreateLabelConfig, Mode, NiftiConfig, Preprocessing, RunConfig,
};
use shapefeat::raster::{label_components, trace_contours, BinaryMask};
use shapefeat::signature::SignatureKind;
use shapefeat::Features;

type P = Point2<f64>;

struct Check {
    name: String,
    ok: bool,
    detail: String,
}

fn check(name: &str, ok: bool, detail: String) -> Check {
    Check { name: name.to_string(), ok, detail }
}

fn within(name: &str, value: f64, target: f64, tol: f64) -> Check {
    check(name, (value - target).abs() <= tol, format!("{value:.6} (target {target} +/- {tol})"))
}

fn within_rel(name: &str, value: f64, target: f64, rel: f64) -> Check {
    let err = (value - target) / target;
    check(name, err.abs() <= rel, format!("{value:.6e} (target {target:.6e}, error {:+.1}%, limit {:.0}%)", err * 100.0, rel * 100.0))
}

/// Features of the single region of `m`.
fn features_of(m: &BinaryMask) -> Features {
    let labeled = label_components(m);
    let contours = trace_contours(&labeled);
    let outer = contours.iter().find(|c| !c.is_hole).expect("one region");
    let holes: Vec<_> = contours.iter().filter(|c| c.is_hole && c.region_label == outer.region_label).collect();
    let px = region_pixel_points(&labeled, outer.region_label);
    region_features(outer, &holes, &px, &FeatureParams::default()).unwrap()
}

fn sweep_mbr_area(pts: &[P]) -> f64 {
    (0..1800)
        .map(|k| {
            let (s, c) = (k as f64 * 0.1).to_radians().sin_cos();
            let (mut u0, mut u1, mut v0, mut v1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
            for p in pts {
                let (u, v) = (p.x * c + p.y * s, -p.x * s + p.y * c);
                (u0, u1, v0, v1) = (u0.min(u), u1.max(u), v0.min(v), v1.max(v));
            }
            (u1 - u0) * (v1 - v0)
        })
        .fold(f64::MAX, f64::min)
}

fn c1_circle() -> Vec<Check> {
    let f = features_of(&disc(64.0, 4));
    let cdf = f.signature(SignatureKind::CentroidDistance).summarize();
    let kappa = f.signature(SignatureKind::Curvature).summarize();
    vec![
        check("circularity >= 0.95", f.geom.circularity >= 0.95, format!("{:.4}", f.geom.circularity)),
        check("eccentricity <= 0.05", f.geom.eccentricity <= 0.05, format!("{:.4}", f.geom.eccentricity)),
        within("cdf mean", cdf.mean, 64.0, 1.5),
        check("cdf std/mean <= 0.02", cdf.std / cdf.mean <= 0.02, format!("{:.5}", cdf.std / cdf.mean)),
        within_rel("curvature mean", kappa.mean, 1.0 / 64.0, 0.10),
        within_rel("abe", f.geom.abe, 2.44e-4, 0.15),
    ]
}

fn c2_square() -> Vec<Check> {
    let m = block(110, 110, 5, 5, 100, 100);
    let f = features_of(&m);
    let g = &f.geom;
    let outer = single_outer(&m).to_points::<f64>();
    let dp = douglas_peucker(&outer, 0.5).unwrap();
    vec![
        check("area == 9801", g.area == 9801.0, format!("{}", g.area)),
        check("perimeter == 396", g.perimeter == 396.0, format!("{}", g.perimeter)),
        within("circularity", g.circularity, std::f64::consts::FRAC_PI_4, 0.02),
        within("mbr angle", g.mbr.angle_deg, 0.0, 0.5),
        within("mbr width", g.mbr.width, 100.0, 1.0),
        within("mbr height", g.mbr.height, 100.0, 1.0),
        check("dp(0.5) vertices == 4", dp.vertices.len() == 4, format!("{}", dp.vertices.len())),
        check("elongation <= 0.02", g.elongation <= 0.02, format!("{:.4}", g.elongation)),
    ]
}

fn c3_rotated_rect() -> Vec<Check> {
    let m = rotated_rect(100.0, 50.0, 30.0, 160);
    let f = features_of(&m);
    let mbr = f.geom.mbr;
    let sweep = sweep_mbr_area(&single_outer(&m).to_points::<f64>());
    let rel = (mbr.area() - sweep).abs() / sweep;
    vec![
        within("angle", mbr.angle_deg, 30.0, 1.0),
        within("width", mbr.width, 100.0, 2.0),
        within("height", mbr.height, 50.0, 2.0),
        check("area vs 0.1 deg sweep <= 0.5%", rel <= 0.005, format!("{:.2} vs {sweep:.2} ({:.3}%)", mbr.area(), rel * 100.0)),
    ]
}

fn c4_ellipse() -> Vec<Check> {
    let f = features_of(&ellipse(80.0, 40.0, 4));
    vec![within("eccentricity", f.geom.eccentricity, 0.866, 0.02)]
}

fn c5_l_shape() -> Vec<Check> {
    let f = features_of(&l_shape(100, 4));
    let tar = &f.signature(SignatureKind::TriangleArea).values;
    let negatives = tar.iter().filter(|&&v| v < 0.0).count();
    // Pixel-center L: 99^2 - 50^2, plus half a pixel where the 8-connected
    // trace takes the reflex corner diagonally. The hull adds the 50x50/2
    // triangle spanning the missing quadrant.
    let oracle = 7301.5 / 8551.0;
    vec![
        within("solidity", f.geom.solidity, 0.75, 0.03),
        within("solidity vs shoelace/hull oracle 7301.5/8551", f.geom.solidity, oracle, 1e-9),
        check("tar has a negative sample", negatives >= 1, format!("{negatives} negative of {}", tar.len())),
    ]
}

fn c6_douglas_peucker() -> Vec<Check> {
    let (mut worst, mut bound_ok, mut monotone_ok) = (0.0f64, true, true);
    let mut counts = Vec::new();
    for seed in 0..20 {
        let pts = single_outer(&random_blob(100 + seed, 96)).to_points::<f64>();
        let n = pts.len();
        let mut last = usize::MAX;
        for eps in [0.5, 1.0, 2.0, 4.0] {
            let kept = douglas_peucker(&pts, eps).unwrap().source_indices;
            for w in 0..kept.len() {
                let (s, e) = (kept[w], kept[(w + 1) % kept.len()]);
                let span = (e + n - s) % n;
                for k in 1..span {
                    let d = point_segment_distance(pts[(s + k) % n], pts[s], pts[e]);
                    worst = worst.max(d / eps);
                    bound_ok &= d <= eps + 1e-9;
                }
            }
            monotone_ok &= kept.len() <= last;
            last = kept.len();
            if seed == 0 {
                counts.push(kept.len());
            }
        }
    }
    vec![
        check("discarded points within eps", bound_ok, format!("max distance/eps {worst:.3} over 20 blobs")),
        check("vertex count non-increasing in eps", monotone_ok, format!("blob 0 counts {counts:?}")),
    ]
}

fn c7_mpp() -> Vec<Check> {
    let cell = 2;
    let convex = [
        ("disc", disc(40.0, 4)),
        ("square", block(110, 110, 5, 5, 100, 100)),
        ("rotated rect", rotated_rect(100.0, 50.0, 30.0, 160)),
        ("ellipse", ellipse(80.0, 40.0, 4)),
    ];
    let mut shapes: Vec<(String, BinaryMask)> = convex.iter().map(|(n, m)| (n.to_string(), m.clone())).collect();
    shapes.push(("l-shape".into(), l_shape(100, 4)));
    shapes.extend((0..5).map(|s| (format!("blob {s}"), random_blob(s, 96))));

    let mut shorter = true;
    let mut worst_ratio = 0.0f64;
    for (_, m) in &shapes {
        let c = single_outer(m);
        let mpp = min_perimeter_polygon::<f64>(&c, cell).unwrap();
        let r = polygon_perimeter(&mpp.vertices) / polygon_perimeter(&c.to_points::<f64>());
        worst_ratio = worst_ratio.max(r);
        shorter &= r <= 1.0 + 1e-12;
    }
    let mut near_hull = true;
    let mut details = Vec::new();
    for (name, m) in &convex {
        let c = single_outer(m);
        let mpp = min_perimeter_polygon::<f64>(&c, cell).unwrap();
        let hull = convex_hull(&c.to_points::<f64>()).unwrap();
        let gap = (polygon_perimeter(&mpp.vertices) - polygon_perimeter(&hull)).abs();
        let limit = 2.0 * cell as f64 * mpp.vertices.len() as f64;
        near_hull &= gap <= limit;
        details.push(format!("{name} {gap:.2}/{limit}"));
    }
    // staircase: parallelogram band along slope 1/2
    let (len, thick) = (200usize, 12.0);
    let band = BinaryMask::from_fn(len + 10, len / 2 + 30, |x, y| {
        (5..=5 + len).contains(&x) && (y as f64 - (10.0 + x as f64 / 2.0)).abs() <= thick / 2.0
    });
    let c = single_outer(&band);
    let analytic = 2.0 * len as f64 * 1.25f64.sqrt() + 2.0 * thick;
    let mpp_p = polygon_perimeter(&min_perimeter_polygon::<f64>(&c, cell).unwrap().vertices);
    let stair_p = polygon_perimeter(&c.to_points::<f64>());
    let rel = (mpp_p - analytic).abs() / analytic;
    vec![
        check("mpp perimeter <= contour perimeter", shorter, format!("{} shapes, max ratio {worst_ratio:.4}", shapes.len())),
        check("convex: |mpp - hull| <= 2 cell n", near_hull, details.join(", ")),
        check(
            "staircase within 2% of straight edges",
            rel <= 0.02,
            format!("mpp {mpp_p:.2}, analytic {analytic:.2} ({:.2}%), staircase contour {stair_p:.2}", rel * 100.0),
        ),
    ]
}

fn c8_nifti() -> Vec<Check> {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rand::rngs::StdRng::seed_from_u64(8);
    let mut round_trip = true;
    for i in 0..20 {
        let (w, h) = (rng.gen_range(1..64), rng.gen_range(1..64));
        let voxels: Vec<u16> = (0..w * h).map(|_| rng.gen_range(0..12)).collect();
        let vol = NiftiLabelVolume::from_voxels(w, h, voxels).unwrap();
        let path = dir.path().join(format!("v{i}.nii"));
        write_nifti(&vol, &path).unwrap();
        let back = read_nifti(&path).unwrap();
        round_trip &= back.voxels() == vol.voxels() && (back.width(), back.height()) == (w, h);
    }
    let bytes = encode_nifti(&NiftiLabelVolume::from_voxels(4, 4, vec![3; 16]).unwrap()).unwrap();
    let truncated = catch_unwind(AssertUnwindSafe(|| {
        (0..bytes.len()).all(|cut| decode_nifti(&bytes[..cut]).is_err())
    }));
    vec![
        check("20 random round trips voxel-exact", round_trip, String::new()),
        check("sizeof_hdr bytes", bytes[0..4] == 348i32.to_le_bytes(), format!("{:?}", &bytes[0..4])),
        check("magic n+1\\0", &bytes[344..348] == b"n+1\0", format!("{:?}", &bytes[344..348])),
        check(
            "every truncation rejected without panic",
            truncated.unwrap_or(false),
            format!("{} prefixes", bytes.len()),
        ),
    ]
}

fn fill_template(path: &Path, labels: &[u16]) {
    let text = fs::read_to_string(path).unwrap();
    let filled: Vec<String> = text
        .lines()
        .enumerate()
        .map(|(i, l)| if i == 0 { l.to_string() } else { format!("{l}{}", labels[i - 1]) })
        .collect();
    fs::write(path, filled.join("\n") + "\n").unwrap();
}

fn c9_multi_class() -> Vec<Check> {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let input = root.join("masks");
    fs::create_dir(&input).unwrap();
    save_mask(&three_blocks(), &input.join("cells.png"));
    let pre = Preprocessing::default();
    let created = run_create_label(&CreateLabelConfig {
        folder: input.clone(),
        csv_out: root.join("csv"),
        image_out: root.join("overlay"),
        preprocessing: pre,
    })
    .unwrap();
    fill_template(&root.join("csv/cells.csv"), &[1, 2, 0]);
    let nifti = run_nifti(&NiftiConfig {
        folder: input.clone(),
        csv_folder: root.join("csv"),
        nifti_out: root.join("nii"),
        label_out: root.join("labeled"),
        preprocessing: pre,
    })
    .unwrap();
    let consistent = nifti.exit_code() == 0 && nifti.reports.len() == 1 && nifti.reports[0].1.consistent;
    let mut config = RunConfig::new(&input, root.join("features.csv"));
    config.mode = Mode::Multi;
    config.nifti_folder = Some(root.join("nii"));
    let extracted = run_extract(&config).unwrap();
    let labels: Vec<Option<u16>> = extracted.records.iter().map(|r| r.label).collect();
    vec![
        check("template created", created.exit_code() == 0, String::new()),
        check("run_nifti consistent", consistent, nifti.reports.first().map(|r| r.1.to_string()).unwrap_or_default()),
        check("2 rows labelled {1, 2}", labels == vec![Some(1), Some(2)], format!("{labels:?}")),
    ]
}

fn c10_determinism() -> Vec<Check> {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    fs::create_dir(&input).unwrap();
    save_mask(&disc(30.0, 5), &input.join("a_disc.png"));
    save_mask(&ellipse(45.0, 20.0, 5), &input.join("b_ellipse.png"));
    save_mask(&rotated_rect(60.0, 30.0, 30.0, 90), &input.join("c_rect.png"));
    save_mask(&l_shape(60, 5), &input.join("d_l.png"));
    save_mask(&three_blocks(), &input.join("e_blocks.png"));
    let run = |tag: &str| {
        let mut config = RunConfig::new(&input, dir.path().join(format!("{tag}.csv")));
        config.output = Some(dir.path().join(tag));
        let s = run_extract(&config).unwrap();
        assert_eq!(s.exit_code(), 0);
        let csv = fs::read(dir.path().join(format!("{tag}.csv"))).unwrap();
        let mut maps: Vec<(String, Vec<u8>)> = fs::read_dir(dir.path().join(tag))
            .unwrap()
            .map(|e| {
                let p = e.unwrap().path();
                (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap())
            })
            .collect();
        maps.sort();
        (csv, maps)
    };
    let (csv1, maps1) = run("first");
    let (csv2, maps2) = run("second");
    vec![
        check("csv byte-identical", csv1 == csv2, format!("{} bytes", csv1.len())),
        check("5 feature maps byte-identical", maps1.len() == 5 && maps1 == maps2, format!("{} maps", maps1.len())),
    ]
}

/// Columns computed from the arc-length resampled boundary.
fn is_resampled(name: &str) -> bool {
    name == "circularity" || name == "abe" || SignatureKind::ALL.iter().any(|k| name.starts_with(k.name()))
}

fn c11_invariance() -> Vec<Check> {
    let names = feature_column_names();
    let (mut exact_worst, mut resampled_worst) = (0.0f64, 0.0f64);
    let (mut exact_name, mut resampled_name) = (String::new(), String::new());
    let mut centroid_ok = true;
    for seed in 0..6 {
        let base = random_blob(200 + seed, 80);
        let (dx, dy) = (17 + seed as usize, 23);
        let shifted = BinaryMask::from_fn(80 + dx, 80 + dy, |x, y| x >= dx && y >= dy && base.get(x - dx, y - dy));
        let (a, b) = (features_of(&base).values(), features_of(&shifted).values());
        for (i, name) in names.iter().enumerate() {
            match name.as_str() {
                "centroid_x" => centroid_ok &= (b[i] - a[i] - dx as f64).abs() < 1e-9,
                "centroid_y" => centroid_ok &= (b[i] - a[i] - dy as f64).abs() < 1e-9,
                n if is_resampled(n) => {
                    let rel = (a[i] - b[i]).abs() / a[i].abs().max(1e-12);
                    if rel > resampled_worst {
                        (resampled_worst, resampled_name) = (rel, n.to_string());
                    }
                }
                n => {
                    let d = (a[i] - b[i]).abs();
                    if d > exact_worst || (a[i].is_nan() != b[i].is_nan()) {
                        (exact_worst, exact_name) = (if d.is_nan() { f64::INFINITY } else { d }, n.to_string());
                    }
                }
            }
        }
    }

    let (mut dims_ok, mut angle_ok) = (true, true);
    let mut abe_worst = 0.0f64;
    for seed in 0..6 {
        let pts = single_outer(&random_blob(300 + seed, 90)).to_points::<f64>();
        let scaled: Vec<P> = pts.iter().map(|p| *p * 2.0).collect();
        let m1 = min_bounding_rect(&convex_hull(&pts).unwrap()).unwrap();
        let m2 = min_bounding_rect(&convex_hull(&scaled).unwrap()).unwrap();
        dims_ok &= (m2.width - 2.0 * m1.width).abs() < 1e-6 && (m2.height - 2.0 * m1.height).abs() < 1e-6;
        angle_ok &= (m2.angle_deg - m1.angle_deg).abs() < 1e-6;
        let ratio = average_bending_energy(&pts, 128).unwrap() / average_bending_energy(&scaled, 128).unwrap();
        abe_worst = abe_worst.max((ratio - 4.0).abs() / 4.0);
    }
    vec![
        check("exact features unchanged (1e-6)", exact_worst <= 1e-6, format!("worst {exact_worst:.2e} {exact_name}")),
        check(
            "resampled features unchanged (2%)",
            resampled_worst <= 0.02,
            format!("worst {:.2e}% {resampled_name}", resampled_worst * 100.0),
        ),
        check("centroid shifts with the shape", centroid_ok, String::new()),
        check("x2: mbr dims double", dims_ok, String::new()),
        check("x2: mbr angle fixed", angle_ok, String::new()),
        check("x2: abe / 4 within 5%", abe_worst <= 0.05, format!("worst deviation {:.3}%", abe_worst * 100.0)),
    ]
}

type Criterion = (&'static str, fn() -> Vec<Check>);

fn main() {
    let criteria: [Criterion; 11] = [
        ("analytic circle suite", c1_circle),
        ("analytic square suite", c2_square),
        ("rotated-rectangle mbr", c3_rotated_rect),
        ("ellipse eccentricity", c4_ellipse),
        ("l-shape solidity and tar sign", c5_l_shape),
        ("douglas-peucker contract", c6_douglas_peucker),
        ("minimum perimeter polygon contract", c7_mpp),
        ("nifti codec", c8_nifti),
        ("multi-class end-to-end", c9_multi_class),
        ("determinism", c10_determinism),
        ("invariance suite", c11_invariance),
    ];
    let mut failed = Vec::new();
    for (i, (title, run)) in criteria.iter().enumerate() {
        let checks = catch_unwind(run).unwrap_or_else(|_| vec![check("criterion ran to completion", false, "panicked".into())]);
        let ok = checks.iter().all(|c| c.ok);
        println!("[{}] criterion {:>2}: {title}", if ok { "PASS" } else { "FAIL" }, i + 1);
        for c in &checks {
            println!("         {} {}: {}", if c.ok { "ok  " } else { "FAIL" }, c.name, c.detail);
        }
        if !ok {
            failed.push(i + 1);
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed.len(), criteria.len());
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
