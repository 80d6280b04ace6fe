use std::f64::consts::{FRAC_1_PI, PI};

use super::*;
use crate::fock::{quadrature_pdf, DensityMatrix, HermiteTable};
use crate::sim::{make_state, StateKind, StateSpec};
use crate::Error;

fn random_state(dim: usize, seed: u64) -> DensityMatrix {
    make_state(&StateSpec::new(StateKind::RandomMixed { rank: dim, seed }, dim)).unwrap()
}

fn support_half_width(dim: usize) -> f64 {
    (2.0 * dim as f64).sqrt() + 3.0
}

#[test]
fn wigner_values_at_origin() {
    let origin = PhaseSpaceGrid::new(vec![0.0], vec![0.0]).unwrap();
    let vac = wigner_direct(&DensityMatrix::fock(0, 3).unwrap(), &origin);
    assert!((vac.values[(0, 0)] - FRAC_1_PI).abs() < 1e-14);
    let one = wigner_direct(&DensityMatrix::fock(1, 3).unwrap(), &origin);
    assert!((one.values[(0, 0)] + FRAC_1_PI).abs() < 1e-14);
}

#[test]
fn parity_identity_at_origin() {
    for seed in 0..10 {
        let rho = random_state(2 + seed as usize % 7, seed);
        let expect: f64 = (0..rho.dim())
            .map(|n| if n % 2 == 0 { 1.0 } else { -1.0 } * rho.get(n, n).re)
            .sum::<f64>()
            * FRAC_1_PI;
        assert!((wigner_point(&rho, 0.0, 0.0) - expect).abs() < 1e-8);
    }
}

#[test]
fn vacuum_wigner_matches_gaussian() {
    let rho = DensityMatrix::fock(0, 4).unwrap();
    for &(q, p) in &[(0.3, -0.7), (1.5, 0.2), (-2.0, 2.0)] {
        let w: f64 = wigner_point(&rho, q, p);
        let exact = (-(q * q + p * p) as f64).exp() * FRAC_1_PI;
        assert!((w - exact).abs() < 1e-14);
    }
}

#[test]
fn wigner_normalization() {
    for seed in 0..3 {
        let dim = 3 + seed as usize;
        let rho = random_state(dim, seed);
        let grid = PhaseSpaceGrid::square(support_half_width(dim) + 1.0, 161).unwrap();
        let w = wigner_direct(&rho, &grid);
        assert!((w.integral() - 1.0).abs() < 1e-3, "{}", w.integral());
        assert!(w.warnings.is_empty());
    }
}

#[test]
fn wigner_support_warning() {
    let rho = DensityMatrix::fock(2, 4).unwrap();
    let w = wigner_direct(&rho, &PhaseSpaceGrid::square(1.0, 11).unwrap());
    assert!(matches!(w.warnings[0], crate::Warning::Support { .. }));
}

#[test]
fn wigner_marginals_match_quadrature_densities() {
    let xs: Vec<f64> = (0..81).map(|i| -4.0 + 0.1 * i as f64).collect();
    let table = HermiteTable::new(5, &xs);
    for seed in 0..3 {
        let dim = 4 + seed as usize;
        let rho = random_state(dim, 100 + seed);
        let grid = PhaseSpaceGrid::square(support_half_width(dim), 256).unwrap();
        let w = wigner_direct(&rho, &grid);
        for j in 0..8 {
            let theta = PI * j as f64 / 8.0 + 0.1;
            let marginal = w.project(theta, &xs);
            let exact = quadrature_pdf(&rho, theta, &table).unwrap();
            let err = marginal
                .iter()
                .zip(&exact.p)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 5e-3, "dim {dim} θ {theta}: {err}");
        }
    }
}

#[test]
fn husimi_examples() {
    let origin = PhaseSpaceGrid::new(vec![0.0], vec![0.0]).unwrap();
    let vac = husimi(&DensityMatrix::fock(0, 3).unwrap(), &origin);
    assert!((vac.values[(0, 0)] - FRAC_1_PI).abs() < 1e-15);
    let one = husimi(&DensityMatrix::fock(1, 3).unwrap(), &origin);
    assert!(one.values[(0, 0)].abs() < 1e-15);

    let grid = PhaseSpaceGrid::square(8.0, 161).unwrap();
    let q = husimi(&DensityMatrix::fock(0, 3).unwrap(), &grid);
    assert!((q.integral() - 1.0).abs() < 1e-3);
    let q = husimi(&random_state(5, 9), &grid);
    assert!((q.integral() - 1.0).abs() < 1e-3);
    assert!(q.values.iter().all(|&v| v >= -1e-15));
}

#[test]
fn husimi_is_smoothed_wigner() {
    for seed in 0..3 {
        let rho = random_state(4, 40 + seed);
        let grid = PhaseSpaceGrid::square(8.0, 161).unwrap();
        let smoothed = smooth_to_husimi(&wigner_direct(&rho, &grid));
        let direct = husimi(&rho, &grid);
        let err = smoothed.max_abs_diff(&direct).unwrap();
        assert!(err < 5e-3, "{err}");
    }
}

#[test]
fn filter_kernels_match_closed_forms() {
    let cfg = RadonConfig::new(16, 65, 4.0);
    let tau = 8.0 / 64.0;
    let ram = cfg.clone().with_filter(RadonFilter::RamLak);
    assert!((ram.kernel(0.0) - 1.0 / (4.0 * tau * tau)).abs() < 1e-10);
    for n in 1..6 {
        let s = n as f64 * tau;
        let expect = if n % 2 == 0 { 0.0 } else { -1.0 / (PI * PI * (n * n) as f64 * tau * tau) };
        assert!((ram.kernel(s) - expect).abs() < 1e-9, "{n}");
        let shepp = -2.0 / (PI * PI * tau * tau * (4.0 * (n * n) as f64 - 1.0));
        assert!((cfg.kernel(s) - shepp).abs() < 1e-9, "{n}");
    }
}

#[test]
fn filter_kernel_matches_quadrature_of_windowed_ramp() {
    let cfg = RadonConfig {
        cutoff: 0.6,
        ..RadonConfig::new(16, 65, 4.0)
    };
    for filter in [RadonFilter::RamLak, RadonFilter::SheppLogan] {
        let cfg = cfg.clone().with_filter(filter);
        let nu_c = 0.6 / (2.0 * 0.125);
        for &s in &[0.0, 0.05, 0.3, 1.7] {
            let steps = 20000;
            let h = nu_c / steps as f64;
            let integrand = |nu: f64| {
                let w = match filter {
                    RadonFilter::RamLak => 1.0,
                    RadonFilter::SheppLogan => {
                        let x = nu / (2.0 * nu_c);
                        if x == 0.0 { 1.0 } else { (PI * x).sin() / (PI * x) }
                    }
                };
                2.0 * nu * w * (2.0 * PI * nu * s).cos()
            };
            let mut acc = integrand(0.0) + integrand(nu_c);
            for i in 1..steps {
                acc += integrand(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            let oracle = acc * h / 3.0;
            assert!((cfg.kernel(s) - oracle).abs() < 1e-8 * oracle.abs().max(1.0), "{filter:?} {s}");
        }
    }
}

#[test]
fn back_projection_reproduces_wigner() {
    for (n, filter) in [(0, RadonFilter::RamLak), (1, RadonFilter::RamLak), (1, RadonFilter::SheppLogan)] {
        let rho = DensityMatrix::fock(n, 4).unwrap();
        let cfg = RadonConfig {
            grid_points: 61,
            ..RadonConfig::new(64, 256, 6.0).with_filter(filter)
        };
        let est = wigner_inverse_radon(&radon_projections(&rho, &cfg).unwrap(), &cfg).unwrap();
        let direct = wigner_direct(&rho, &est);
        let err = est.max_abs_diff(&direct).unwrap();
        assert!(err < 0.02, "n={n} {filter:?}: {err}");
        if n == 1 {
            assert!(est.interpolate(0.0, 0.0) < -0.2);
        }
    }
}

#[test]
fn back_projection_accepts_full_circle_angles() {
    let rho = random_state(3, 7);
    let cfg = RadonConfig {
        grid_points: 41,
        ..RadonConfig::new(32, 200, 6.0)
    };
    let half = radon_projections(&rho, &cfg).unwrap();
    let table = HermiteTable::new(2, &cfg.bin_centers());
    let mixed: Vec<_> = (0..32)
        .map(|j| {
            let theta = PI * j as f64 / 32.0 + if j % 2 == 1 { PI } else { 0.0 };
            quadrature_pdf(&rho, theta, &table).unwrap()
        })
        .collect();
    let a = wigner_inverse_radon(&half, &cfg).unwrap();
    let b = wigner_inverse_radon(&mixed, &cfg).unwrap();
    assert!(a.max_abs_diff(&b).unwrap() < 1e-9);
}

#[test]
fn back_projection_rejects_poor_coverage() {
    let rho = DensityMatrix::fock(0, 2).unwrap();
    let cfg = RadonConfig::new(8, 64, 5.0);
    let dists = radon_projections(&rho, &cfg).unwrap();
    let single = cfg.clone();
    assert!(matches!(
        wigner_inverse_radon(&dists[..1], &single),
        Err(Error::AngleCoverage(_))
    ));
    let clustered: Vec<_> = dists[..4].to_vec();
    assert!(matches!(
        wigner_inverse_radon(&clustered, &RadonConfig::new(4, 64, 5.0)),
        Err(Error::AngleCoverage(_))
    ));
    assert!(RadonConfig::new(3, 64, 5.0).validate(2).is_err());
    assert!(RadonConfig { cutoff: 0.0, ..cfg.clone() }.validate(2).is_err());
    assert!(RadonConfig { cutoff: 1.5, ..cfg }.validate(2).is_err());
}

#[test]
fn characteristic_function_examples() {
    let origin = PhaseSpaceGrid::new(vec![0.0], vec![0.0]).unwrap();
    for seed in 0..3 {
        let rho = random_state(5, seed);
        let (report, mag) = weyl_condition_scan(&rho, &origin);
        assert!((mag.values[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((characteristic_point(&rho, 0.0, 0.0) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert_eq!(report.points, 1);
    }

    let grid = PhaseSpaceGrid::square(4.0, 81).unwrap();
    let vac = DensityMatrix::fock(0, 3).unwrap();
    let (report, mag) = weyl_condition_scan(&vac, &grid);
    assert_eq!(report.fraction_below, 0.0);
    assert!(!report.zero_set_detected && !report.suspect);
    for (i, &q) in grid.q.iter().enumerate() {
        for (j, &p) in grid.p.iter().enumerate() {
            let exact = (-(q * q + p * p) / 4.0).exp();
            assert!((mag.values[(i, j)] - exact).abs() < 1e-13);
        }
    }

    let mixed = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
    let (report, _) = weyl_condition_scan(&mixed, &grid);
    assert!(report.zero_set_detected && report.nodal_cells > 0);
    for &(q, p) in &[(0.4, 1.1), (2.0, -0.3)] {
        let a2: f64 = (q * q + p * p) / 2.0;
        let exact = (-a2 / 2.0).exp() * (2.0 - a2) / 2.0;
        assert!((characteristic_point(&mixed, q, p).re - exact).abs() < 1e-13);
    }
}

#[test]
fn characteristic_function_of_coherent_state() {
    let spec = StateSpec::new(StateKind::Coherent { re: 0.8, im: -0.3 }, 20);
    let rho = make_state(&spec).unwrap();
    let beta = Complex64::new(0.8, -0.3);
    for &(q, p) in &[(0.5, 0.2), (-1.0, 0.7)] {
        let alpha = Complex64::new(q, p) / std::f64::consts::SQRT_2;
        // ⟨β|D(α)|β⟩ = exp(−|α|²/2 + αβ* − α*β)
        let exact = (-alpha.norm_sqr() / 2.0 + alpha * beta.conj() - alpha.conj() * beta).exp();
        assert!((characteristic_point(&rho, q, p) - exact).norm() < 1e-8);
    }
}

#[test]
fn grid_json_round_trip() {
    let rho = random_state(3, 1);
    let w = wigner_direct(&rho, &PhaseSpaceGrid::square(5.0, 21).unwrap());
    let back = PhaseSpaceGrid::from_json(&w.to_json().unwrap()).unwrap();
    assert_eq!(back.values, w.values);
}

#[test]
fn wigner_marginals_converge_on_refined_grid() {
    let xs: Vec<f64> = (0..41).map(|i| -4.0 + 0.2 * i as f64).collect();
    let table = HermiteTable::new(3, &xs);
    let rho = random_state(4, 3);
    let grid = PhaseSpaceGrid::square(support_half_width(4), 1024).unwrap();
    let w = wigner_direct(&rho, &grid);
    for theta in [0.0, 0.7, 2.3] {
        let exact = quadrature_pdf(&rho, theta, &table).unwrap();
        let err = w
            .project(theta, &xs)
            .iter()
            .zip(&exact.p)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-4, "θ {theta}: {err}");
    }
}

#[test]
fn filters_give_distinct_estimates() {
    let rho = DensityMatrix::fock(1, 4).unwrap();
    let base = RadonConfig {
        grid_points: 41,
        ..RadonConfig::new(32, 128, 6.0)
    };
    let dists = radon_projections(&rho, &base).unwrap();
    let ram = base.clone().with_filter(RadonFilter::RamLak);
    let a = wigner_inverse_radon(&dists, &ram).unwrap();
    let b = wigner_inverse_radon(&dists, &base).unwrap();
    let gap = a.max_abs_diff(&b).unwrap();
    assert!(gap > 1e-6 && gap < 0.05, "{gap}");
}
