use alloc::vec::Vec;

use super::{gen_uniform, least_squares_line, row_seed, Region};
use crate::error::{Error, Result};
use crate::points::{dist_sq, Points};

/// `h_X = sup_{w in region} dist(w, X)`, measured as the maximum over a
/// regular probe grid of `probe_per_axis^d` points spanning the closed box.
pub fn cavity_density(region: &Region, x: &Points, probe_per_axis: usize) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Input("cavity density of an empty point set".into()));
    }
    if x.dim() != region.dim() {
        return Err(Error::Shape {
            expected: region.dim(),
            got: x.dim(),
        });
    }
    let probes = region.probe_grid(probe_per_axis)?;
    if x.dim() == 1 {
        let mut sorted: Vec<f64> = x.as_flat().to_vec();
        sorted.sort_by(f64::total_cmp);
        let worst = probes
            .as_flat()
            .iter()
            .map(|&w| {
                let i = sorted.partition_point(|&v| v < w);
                let right = sorted.get(i).map_or(f64::INFINITY, |v| v - w);
                let left = if i > 0 { w - sorted[i - 1] } else { f64::INFINITY };
                left.min(right)
            })
            .fold(0.0, f64::max);
        return Ok(worst);
    }
    let worst_sq = probes
        .iter()
        .map(|w| {
            x.iter()
                .map(|p| dist_sq(w, p))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Ok(libm::sqrt(worst_sq))
}

/// Least-squares fit of `log10 h_X = log10 h1 - a log10 N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityFit {
    pub rows: Vec<(usize, f64)>,
    pub h1: f64,
    pub a_exp: f64,
    pub r2: f64,
}

impl DensityFit {
    pub fn from_rows(rows: Vec<(usize, f64)>) -> Result<Self> {
        if rows.iter().any(|&(n, h)| n == 0 || !(h > 0.0)) {
            return Err(Error::Input(
                "density rows need positive sizes and densities".into(),
            ));
        }
        let xs: Vec<f64> = rows.iter().map(|r| libm::log10(r.0 as f64)).collect();
        let ys: Vec<f64> = rows.iter().map(|r| libm::log10(r.1)).collect();
        let fit = least_squares_line(&xs, &ys)?;
        Ok(Self {
            rows,
            h1: libm::pow(10.0, fit.intercept),
            a_exp: -fit.slope,
            r2: fit.r2,
        })
    }

    /// Predicted density `h1 N^(-a)`.
    pub fn predict(&self, n: usize) -> f64 {
        self.h1 * libm::pow(n as f64, -self.a_exp)
    }
}

/// `count` sizes growing geometrically by `multiplier` up to `max`,
/// strictly increasing.
pub fn exponential_sizes(max: usize, count: usize, multiplier: f64) -> Vec<usize> {
    let mut sizes: Vec<usize> = (0..count)
        .rev()
        .map(|k| libm::round(max as f64 / libm::pow(multiplier, k as f64)).max(1.0) as usize)
        .collect();
    sizes.dedup();
    sizes
}

/// Measures `h_X` for uniform samples of each size and fits the power law.
pub fn density_law(
    region: &Region,
    sizes: &[usize],
    seed: u64,
    probe_per_axis: usize,
) -> Result<DensityFit> {
    if sizes.len() < 2 || sizes.windows(2).any(|w| w[1] <= w[0]) || sizes[0] == 0 {
        return Err(Error::Parameter(
            "density law needs at least two strictly increasing positive sizes".into(),
        ));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for (i, &n) in sizes.iter().enumerate() {
        let x = gen_uniform(region, n, row_seed(seed, i))?;
        rows.push((n, cavity_density(region, &x, probe_per_axis)?));
    }
    DensityFit::from_rows(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn cavity_examples() {
        let r = Region::interval(-1.5, 1.5).unwrap();
        let x = Points::from_scalars(&[-1.5, 1.5]).unwrap();
        assert!((cavity_density(&r, &x, 10_001).unwrap() - 1.5).abs() < 1e-12);
        let x = Points::from_scalars(&[-1.0, 0.5]).unwrap();
        assert!((cavity_density(&r, &x, 10_001).unwrap() - 1.0).abs() < 1e-12);
        assert!(cavity_density(&r, &Points::empty(1), 10).is_err());
    }

    #[test]
    fn one_dimensional_fast_path_matches_brute_force() {
        let r = Region::interval(0.0, 2.0).unwrap();
        let x = gen_uniform(&r, 37, 5).unwrap();
        let fast = cavity_density(&r, &x, 501).unwrap();
        let probes = r.probe_grid(501).unwrap();
        let brute = probes
            .iter()
            .map(|w| x.iter().map(|p| (w[0] - p[0]).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        assert_eq!(fast, brute);
    }

    #[test]
    fn probe_refinement_is_lipschitz_bounded() {
        let r = Region::interval(-1.5, 1.5).unwrap();
        let x = gen_uniform(&r, 200, 11).unwrap();
        let coarse = cavity_density(&r, &x, 1_000).unwrap();
        let fine = cavity_density(&r, &x, 10_000).unwrap();
        assert!((coarse - fine).abs() <= 3.0 / 1_000.0);
    }

    #[test]
    fn power_law_rows_are_recovered() {
        let fit = DensityFit::from_rows(vec![(10, 2.0 * libm::pow(10.0, -0.8)), (1000, 2.0 * libm::pow(1000.0, -0.8))])
            .unwrap();
        assert!((fit.a_exp - 0.8).abs() < 1e-12 && (fit.h1 - 2.0).abs() < 1e-12);
        let doubled = DensityFit::from_rows(fit.rows.iter().map(|&(n, h)| (n, 2.0 * h)).collect()).unwrap();
        assert!((doubled.h1 - 4.0).abs() < 1e-12 && (doubled.a_exp - 0.8).abs() < 1e-12);
    }

    #[test]
    fn exponential_sizes_end_at_max() {
        let s = exponential_sizes(5000, 20, 1.2);
        assert_eq!(s.len(), 20);
        assert_eq!(*s.last().unwrap(), 5000);
        assert!(s.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(s[0], (5000.0 / libm::pow(1.2, 19.0)).round() as usize);
    }

    #[test]
    fn density_law_validates_sizes() {
        let r = Region::interval(0.0, 1.0).unwrap();
        assert!(density_law(&r, &[10], 0, 100).is_err());
        assert!(density_law(&r, &[10, 10], 0, 100).is_err());
    }
}
