mod common;

use approx::assert_abs_diff_eq;
use rbfsmooth_core::assembly::{cpd_check, interp_system, solve_block};
use rbfsmooth_core::linalg::relative_residual;
use rbfsmooth_core::model::{fit_interpolant, seminorm_sq_diff};
use rbfsmooth_core::random::SeededRng;
use rbfsmooth_core::{FittedModel, ModelKind, Points, PolyFrame};

#[test]
fn polynomials_are_reproduced_with_zero_coefficients() {
    let mut rng = SeededRng::new(1);
    for d in [1, 2] {
        for theta in 1..=3 {
            let frame = PolyFrame::new(d, theta).unwrap();
            // smooth kernels need spacing comparable to their width
            let n = if d == 1 { 10 } else { 25 };
            let x = common::separated_points(&mut rng, n, d, -2.0, 2.0, 0.05);
            let probes = common::random_points(&mut rng, 50, d, -2.0, 2.0);
            for spec in common::kernels(d, theta) {
                let c = common::random_poly(&mut rng, &frame);
                let y: Vec<f64> = x.iter().map(|p| frame.eval_poly(&c, p)).collect();
                let model = fit_interpolant(&spec, &frame, &x, &y).unwrap();
                let v_norm = model.v().iter().map(|v| v * v).sum::<f64>().sqrt();
                let scale = y.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
                assert!(v_norm <= 1e-8 * scale, "{:?}: |v| = {v_norm}", spec.family());
                for p in probes.iter() {
                    assert_abs_diff_eq!(model.eval(p), frame.eval_poly(&c, p), epsilon = 1e-8);
                }
            }
        }
    }
}

#[test]
fn sin_data_is_interpolated() {
    let mut rng = SeededRng::new(2);
    let x = common::random_points(&mut rng, 20, 1, -1.5, 1.5);
    let y: Vec<f64> = x.iter().map(|p| p[0].sin()).collect();
    for s in [1.0, 1.5] {
        let spec = rbfsmooth_core::KernelSpec::new(rbfsmooth_core::KernelFamily::ThinPlate { s }, 2, 1).unwrap();
        let frame = PolyFrame::new(1, 2).unwrap();
        let model = fit_interpolant(&spec, &frame, &x, &y).unwrap();
        for (p, yi) in x.iter().zip(&y) {
            assert!((model.eval(p) - yi).abs() <= 1e-8 * (1.0 + yi.abs()));
        }
    }
}

#[test]
fn evaluation_matches_naive_summation() {
    let mut rng = SeededRng::new(3);
    let frame = PolyFrame::new(2, 2).unwrap();
    for spec in common::kernels(2, 2) {
        let x = common::random_points(&mut rng, 15, 2, -1.0, 1.0);
        let y: Vec<f64> = x.iter().map(common::smooth).collect();
        let model = fit_interpolant(&spec, &frame, &x, &y).unwrap();
        for _ in 0..20 {
            let p = [rng.uniform(-1.2, 1.2), rng.uniform(-1.2, 1.2)];
            let mut naive = model.beta()[0] + model.beta()[1] * p[0] + model.beta()[2] * p[1];
            for (z, v) in model.centers().iter().zip(model.v()) {
                let r2 = (p[0] - z[0]).powi(2) + (p[1] - z[1]).powi(2);
                naive += v * spec.family().radial(r2);
            }
            assert_abs_diff_eq!(model.eval(&p), naive, epsilon = 1e-12 * (1.0 + naive.abs()));
        }
    }
}

#[test]
fn data_order_does_not_matter() {
    let mut rng = SeededRng::new(4);
    let frame = PolyFrame::new(2, 2).unwrap();
    let x = common::random_points(&mut rng, 30, 2, -1.0, 1.0);
    let y: Vec<f64> = x.iter().map(common::smooth).collect();
    let perm: Vec<usize> = (0..30).map(|i| (7 * i + 3) % 30).collect();
    let xp = x.select(&perm);
    let yp: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
    for spec in common::kernels(2, 2) {
        let a = fit_interpolant(&spec, &frame, &x, &y).unwrap();
        let b = fit_interpolant(&spec, &frame, &xp, &yp).unwrap();
        for p in common::random_points(&mut rng, 20, 2, -1.0, 1.0).iter() {
            assert_abs_diff_eq!(a.eval(p), b.eval(p), epsilon = 1e-10);
        }
    }
}

/// `f(x) - sum f(a_i) l_i(x)` equals the seminorm inner product of `f` with
/// the semi-Riesz representer `r_x`, expanded over kernel translates.
#[test]
fn semi_riesz_reproduces_the_complement() {
    let mut rng = SeededRng::new(5);
    for (d, theta) in [(1, 2), (2, 2), (2, 3)] {
        let frame = PolyFrame::new(d, theta).unwrap();
        let x = common::random_points(&mut rng, 20, d, -1.0, 1.0);
        let y: Vec<f64> = x.iter().map(common::smooth).collect();
        let uf = frame.minimal_unisolvent_subset(&x).unwrap();
        for spec in common::kernels(d, theta) {
            let f = fit_interpolant(&spec, &frame, &x, &y).unwrap();
            let fa: Vec<f64> = uf.points().iter().map(|a| f.eval(a)).collect();
            for _ in 0..10 {
                let p: Vec<f64> = (0..d).map(|_| rng.uniform(-1.0, 1.0)).collect();
                let l = uf.cardinal_values(&p);
                let inner: f64 = f
                    .centers()
                    .iter()
                    .zip(f.v())
                    .map(|(z, v)| {
                        let mut g = spec.eval_between(z, &p);
                        for (lk, a) in l.iter().zip(uf.points().iter()) {
                            g -= lk * spec.eval_between(z, a);
                        }
                        v * g
                    })
                    .sum();
                let qf = uf.lagrange_complement(&fa, &p, f.eval(&p)).unwrap();
                assert_abs_diff_eq!(inner, qf, epsilon = 1e-7);
            }
        }
    }
}

/// Any other interpolant `u + h` with `h` vanishing on `X` has larger
/// seminorm, and the excess is exactly `|h|^2`.
#[test]
fn interpolant_minimizes_the_seminorm() {
    let mut rng = SeededRng::new(6);
    let frame = PolyFrame::new(1, 2).unwrap();
    let spec = common::kernels(1, 2)[0];
    let x = common::random_points(&mut rng, 12, 1, -1.0, 1.0);
    let y: Vec<f64> = x.iter().map(common::smooth).collect();
    let u = fit_interpolant(&spec, &frame, &x, &y).unwrap();
    for _ in 0..20 {
        let z = common::random_points(&mut rng, 3, 1, -1.0, 1.0);
        let all = x.concat(&z);
        let mut hy = vec![0.0; x.len()];
        hy.extend((0..3).map(|_| rng.uniform(-1.0, 1.0)));
        let h = fit_interpolant(&spec, &frame, &all, &hy).unwrap();
        let mut v = h.v().to_vec();
        for (vi, ui) in v.iter_mut().zip(u.v()) {
            *vi += ui;
        }
        let beta: Vec<f64> = h.beta().iter().zip(u.beta()).map(|(a, b)| a + b).collect();
        let g = FittedModel::from_parts(spec, all, v, beta, ModelKind::Interpolant, 0.0).unwrap();
        for (p, yi) in x.iter().zip(&y) {
            assert_abs_diff_eq!(g.eval(p), *yi, epsilon = 1e-8);
        }
        assert!(u.seminorm_sq() <= g.seminorm_sq() + 1e-8);
        assert_abs_diff_eq!(u.seminorm_sq() + h.seminorm_sq(), g.seminorm_sq(), epsilon = 1e-8 * (1.0 + g.seminorm_sq()));
        assert_abs_diff_eq!(seminorm_sq_diff(&g, &u).unwrap(), h.seminorm_sq(), epsilon = 1e-8 * (1.0 + h.seminorm_sq()));
    }
}

#[test]
fn random_saddle_systems_are_regular() {
    let mut rng = SeededRng::new(7);
    for trial in 0..50 {
        let d = 1 + trial % 2;
        let theta = 1 + trial % 3;
        let n = 10 + (trial * 7) % 50;
        let frame = PolyFrame::new(d, theta).unwrap();
        let x = common::random_points(&mut rng, n, d, -1.0, 1.0);
        let y: Vec<f64> = x.iter().map(common::smooth).collect();
        let specs = common::kernels(d, theta);
        let spec = specs[trial % specs.len()];
        let sys = interp_system(&spec, &frame, &x, &y).unwrap();
        let sol = solve_block(&sys).unwrap();
        assert!(relative_residual(&sys.matrix, &sol, &sys.rhs) <= 1e-8);
    }
}

#[test]
fn kernels_are_conditionally_positive_definite() {
    let mut rng = SeededRng::new(8);
    for (d, theta) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
        let frame = PolyFrame::new(d, theta).unwrap();
        for spec in common::kernels(d, theta) {
            let x = common::random_points(&mut rng, 15, d, -1.0, 1.0);
            assert!(cpd_check(&spec, &frame, &x, 20, 11).unwrap(), "{:?}", spec.family());
        }
    }
}

#[test]
fn unisolvency_failure_is_an_input_error() {
    let frame = PolyFrame::new(2, 2).unwrap();
    let spec = common::kernels(2, 2)[0];
    let collinear = Points::from_rows(2, &[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).unwrap();
    let err = fit_interpolant(&spec, &frame, &collinear, &[0.0, 1.0, 2.0]).unwrap_err();
    assert!(err.is_input_error());
}
