mod common;

use approx::assert_abs_diff_eq;
use rbfsmooth_core::approx::{compare, fit_approx, make_grid, ApproxFitter, GridSpec};
use rbfsmooth_core::assembly::{exact_system, interp_system};
use rbfsmooth_core::exact::{diagnostics, fit_exact, functional_value};
use rbfsmooth_core::model::fit_interpolant;
use rbfsmooth_core::random::SeededRng;
use rbfsmooth_core::{FittedModel, KernelSpec, ModelKind, Points, PolyFrame};

fn instance(seed: u64, n: usize, d: usize) -> (Points, Vec<f64>) {
    let mut rng = SeededRng::new(seed);
    let x = common::random_points(&mut rng, n, d, -1.0, 1.0);
    let y = x.iter().map(|p| common::smooth(p) + 0.05 * rng.uniform(-1.0, 1.0)).collect();
    (x, y)
}

fn tps(d: usize) -> KernelSpec {
    common::kernels(d, 2)[0]
}

#[test]
fn exact_system_differs_only_on_the_kernel_diagonal() {
    let frame = PolyFrame::new(2, 2).unwrap();
    let (x, y) = instance(1, 12, 2);
    let rho = 0.37;
    let a = interp_system(&tps(2), &frame, &x, &y).unwrap();
    let b = exact_system(&tps(2), &frame, &x, &y, rho).unwrap();
    let shift = (2.0 * std::f64::consts::PI) * 12.0 * rho;
    let diff = &b.matrix - &a.matrix;
    for i in 0..diff.nrows() {
        for j in 0..diff.ncols() {
            let expected = if i == j && i < 12 { shift } else { 0.0 };
            assert_abs_diff_eq!(diff[(i, j)], expected, epsilon = 1e-12 * shift);
        }
    }
    assert_eq!(a.rhs, b.rhs);
}

#[test]
fn identities_hold_for_every_kernel() {
    for (seed, d) in [(2, 1), (3, 2)] {
        let (x, y) = instance(seed, 40, d);
        let frame = PolyFrame::new(d, 2).unwrap();
        for spec in common::kernels(d, 2) {
            for rho in [1e-4, 1e-2, 1.0] {
                let s = fit_exact(&spec, &frame, &x, &y, rho).unwrap();
                let diag = diagnostics(&s, &x, &y).unwrap();
                assert!(diag.identities_hold(), "{:?} rho={rho}: {diag:?}", spec.family());
            }
        }
    }
}

#[test]
fn smoother_never_increases_the_seminorm_of_a_native_function() {
    let mut rng = SeededRng::new(4);
    let frame = PolyFrame::new(1, 2).unwrap();
    let spec = tps(1);
    let centers = common::random_points(&mut rng, 6, 1, -1.0, 1.0);
    let weights: Vec<f64> = (0..6).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let fd = fit_interpolant(&spec, &frame, &centers, &weights).unwrap();
    let x = common::random_points(&mut rng, 40, 1, -1.0, 1.0);
    let y = fd.eval_many(&x);
    for rho in [1e-6, 1e-3, 1.0] {
        let s = fit_exact(&spec, &frame, &x, &y, rho).unwrap();
        assert!(s.seminorm_sq() <= fd.seminorm_sq() * (1.0 + 1e-8));
    }
}

#[test]
fn smoother_minimizes_the_functional() {
    let (x, y) = instance(5, 30, 2);
    let frame = PolyFrame::new(2, 2).unwrap();
    let spec = tps(2);
    let rho = 1e-3;
    let s = fit_exact(&spec, &frame, &x, &y, rho).unwrap();
    let je = functional_value(&s, &x, &y, rho);
    let interp = fit_interpolant(&spec, &frame, &x, &y).unwrap();
    let zero = FittedModel::from_parts(spec, x.clone(), vec![0.0; 30], vec![0.0; 3], ModelKind::ExactSmoother, rho).unwrap();
    let uf = frame.minimal_unisolvent_subset(&x).unwrap();
    let samples: Vec<f64> = uf.source_indices().iter().map(|&i| y[i]).collect();
    let proj = FittedModel::from_parts(
        spec,
        x.clone(),
        vec![0.0; 30],
        uf.lagrange_coefficients(&samples).unwrap(),
        ModelKind::ExactSmoother,
        rho,
    )
    .unwrap();
    for other in [&interp, &zero, &proj] {
        assert!(je <= functional_value(other, &x, &y, rho) + 1e-12);
    }
}

#[test]
fn seminorm_decreases_as_rho_grows() {
    let (x, y) = instance(6, 40, 1);
    let frame = PolyFrame::new(1, 2).unwrap();
    let mut last = f64::INFINITY;
    for k in -8..=2 {
        let rho = 10f64.powi(k);
        let s = fit_exact(&tps(1), &frame, &x, &y, rho).unwrap().seminorm_sq();
        assert!(s <= last + 1e-10);
        last = s;
    }
}

#[test]
fn only_polynomials_are_fixed_points() {
    let mut rng = SeededRng::new(7);
    let frame = PolyFrame::new(2, 3).unwrap();
    let spec = common::kernels(2, 3)[0];
    let x = common::random_points(&mut rng, 30, 2, -1.0, 1.0);
    let c = common::random_poly(&mut rng, &frame);
    let p: Vec<f64> = x.iter().map(|q| frame.eval_poly(&c, q)).collect();
    let s = fit_exact(&spec, &frame, &x, &p, 0.1).unwrap();
    assert!(common::max_abs_diff(&s.eval_many(&x), &p) <= 1e-8);

    let f = fit_interpolant(&spec, &frame, &x, &x.iter().map(common::smooth).collect::<Vec<_>>()).unwrap();
    let fx = f.eval_many(&x);
    let s = fit_exact(&spec, &frame, &x, &fx, 0.1).unwrap();
    assert!(common::max_abs_diff(&s.eval_many(&x), &fx) > 1e-6);
}

#[test]
fn tiny_rho_approaches_the_interpolant() {
    // noise-free data: the gap scales with rho N |v|, and noisy interpolants
    // on close nodes have huge coefficients
    for seed in 0..5 {
        let mut rng = SeededRng::new(10 + seed);
        let x = common::random_points(&mut rng, 30, 1, -1.0, 1.0);
        let y: Vec<f64> = x.iter().map(common::smooth).collect();
        let frame = PolyFrame::new(1, 2).unwrap();
        let s = fit_exact(&tps(1), &frame, &x, &y, 1e-10).unwrap();
        let u = fit_interpolant(&tps(1), &frame, &x, &y).unwrap();
        let mut rng = SeededRng::new(seed);
        for p in common::random_points(&mut rng, 50, 1, -1.0, 1.0).iter() {
            assert!((s.eval(p) - u.eval(p)).abs() <= 1e-5 * (1.0 + u.eval(p).abs()));
        }
    }
}

#[test]
fn approx_with_data_centers_equals_exact() {
    let (x, y) = instance(20, 25, 2);
    let frame = PolyFrame::new(2, 2).unwrap();
    let mut rng = SeededRng::new(21);
    for spec in common::kernels(2, 2) {
        let rho = 1e-2;
        let e = fit_exact(&spec, &frame, &x, &y, rho).unwrap();
        let a = fit_approx(&spec, &frame, &x, &y, &x, rho).unwrap();
        for p in common::random_points(&mut rng, 50, 2, -1.0, 1.0).iter() {
            assert_abs_diff_eq!(e.eval(p), a.eval(p), epsilon = 1e-7);
        }
        let c = compare(&e, &a, &x, &y, rho).unwrap();
        assert!(c.lhs.abs() <= 1e-9 && c.rhs.abs() <= 1e-9, "{c:?}");
    }
}

#[test]
fn comparison_identity_on_a_coarse_grid() {
    let (x, y) = instance(30, 40, 1);
    let frame = PolyFrame::new(1, 2).unwrap();
    let grid = make_grid(&GridSpec::new(vec![-1.0], vec![1.0], vec![9]).unwrap(), 2);
    for spec in common::kernels(1, 2) {
        let rho = 1e-3;
        let e = fit_exact(&spec, &frame, &x, &y, rho).unwrap();
        let a = fit_approx(&spec, &frame, &x, &y, &grid.points, rho).unwrap();
        let c = compare(&e, &a, &x, &y, rho).unwrap();
        assert!(c.holds(), "{:?}: {c:?}", spec.family());
        assert!(c.j_approx >= c.j_exact);
        assert!(c.gap().abs() <= 1e-7 * c.rhs.abs().max(1e-12) || c.gap().abs() <= 1e-12);
    }
}

#[test]
fn approx_residual_is_orthogonal_to_polynomials() {
    let (x, y) = instance(40, 200, 2);
    let frame = PolyFrame::new(2, 2).unwrap();
    let grid = make_grid(&GridSpec::new(vec![-1.0, -1.0], vec![1.0, 1.0], vec![5, 5]).unwrap(), 2);
    let a = fit_approx(&tps(2), &frame, &x, &y, &grid.points, 1e-3).unwrap();
    let s = a.eval_many(&x);
    let scale: f64 = s.iter().zip(&y).map(|(a, b)| a.abs() + b.abs()).sum();
    let mut moments = vec![0.0; frame.size()];
    for (k, p) in x.iter().enumerate() {
        for (m, q) in moments.iter_mut().zip(frame.monomials(p)) {
            *m += q * (s[k] - y[k]);
        }
    }
    for m in moments {
        assert!(m.abs() <= 1e-7 * scale);
    }
}

#[test]
fn approx_system_size_is_independent_of_n() {
    let frame = PolyFrame::new(1, 2).unwrap();
    let grid = make_grid(&GridSpec::new(vec![-1.0], vec![1.0], vec![20]).unwrap(), 2);
    for n in [50, 100, 400, 1600] {
        let (x, y) = instance(n as u64, n, 1);
        let fitter = ApproxFitter::new(&tps(1), &frame, &x, &y, &grid.points).unwrap();
        assert_eq!(fitter.system_dim(), 20 + 2 * frame.size());
    }
}

#[test]
fn chunk_size_does_not_change_the_fit() {
    let (x, y) = instance(50, 300, 1);
    let frame = PolyFrame::new(1, 2).unwrap();
    let grid = make_grid(&GridSpec::new(vec![-1.0], vec![1.0], vec![12]).unwrap(), 2);
    let a = ApproxFitter::with_chunk(&tps(1), &frame, &x, &y, &grid.points, 7).unwrap().fit(1e-3).unwrap();
    let b = ApproxFitter::new(&tps(1), &frame, &x, &y, &grid.points).unwrap().fit(1e-3).unwrap();
    for p in x.iter().take(20) {
        assert_abs_diff_eq!(a.eval(p), b.eval(p), epsilon = 1e-10);
    }
}

#[test]
fn approx_functional_converges_as_centers_approach_data() {
    let (x, y) = instance(60, 30, 1);
    let frame = PolyFrame::new(1, 2).unwrap();
    let spec = tps(1);
    let rho = 1e-2;
    let je = functional_value(&fit_exact(&spec, &frame, &x, &y, rho).unwrap(), &x, &y, rho);
    let mut rng = SeededRng::new(61);
    let noise: Vec<f64> = (0..x.len()).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let mut last = f64::INFINITY;
    for k in 1..=6 {
        let eps = 10f64.powi(-k);
        let shifted: Vec<f64> = x.as_flat().iter().zip(&noise).map(|(a, n)| a + eps * n).collect();
        let centers = Points::new(1, shifted).unwrap();
        let a = fit_approx(&spec, &frame, &x, &y, &centers, rho).unwrap();
        let gap = functional_value(&a, &x, &y, rho) - je;
        assert!(gap >= -1e-12 && gap <= last, "k={k}: gap {gap} after {last}");
        last = gap;
    }
    assert!(last < 1e-6);
}
