#![allow(dead_code)]

use rbfsmooth_core::random::SeededRng;
use rbfsmooth_core::{KernelFamily, KernelSpec, Points, PolyFrame};

/// One representative of every kernel family valid for `(d, theta)`.
pub fn kernels(dim: usize, theta: usize) -> Vec<KernelSpec> {
    let s = theta as f64 - 0.5;
    let mut families = vec![
        KernelFamily::ThinPlate { s },
        KernelFamily::ShiftedThinPlate { s, a: 0.5 },
        KernelFamily::InverseMultiquadric { a: 1.0 },
        KernelFamily::Gaussian,
    ];
    if theta >= 2 {
        families.push(KernelFamily::ThinPlate { s: theta as f64 - 1.0 });
    }
    if dim > 1 {
        families.push(KernelFamily::Multiquadric { a: 1.0 });
    }
    families
        .into_iter()
        .map(|f| KernelSpec::new(f, theta, dim).expect("valid kernel"))
        .collect()
}

pub fn random_points(rng: &mut SeededRng, n: usize, dim: usize, lo: f64, hi: f64) -> Points {
    let coords = (0..n * dim).map(|_| rng.uniform(lo, hi)).collect();
    Points::new(dim, coords).unwrap()
}

/// A smooth non-polynomial test function.
pub fn smooth(x: &[f64]) -> f64 {
    x.iter().enumerate().map(|(i, v)| ((i + 1) as f64 * v).sin()).sum::<f64>() + 0.3 * x[0] * x[0]
}

pub fn random_poly(rng: &mut SeededRng, frame: &PolyFrame) -> Vec<f64> {
    (0..frame.size()).map(|_| rng.uniform(-2.0, 2.0)).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Random points at least `min_sep` apart, so coefficient-level checks are
/// not dominated by near-duplicate nodes.
pub fn separated_points(rng: &mut SeededRng, n: usize, dim: usize, lo: f64, hi: f64, min_sep: f64) -> Points {
    let mut pts = Points::empty(dim);
    while pts.len() < n {
        let p: Vec<f64> = (0..dim).map(|_| rng.uniform(lo, hi)).collect();
        let far = pts
            .iter()
            .all(|q| q.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() >= min_sep * min_sep);
        if far {
            pts.push(&p);
        }
    }
    pts
}
