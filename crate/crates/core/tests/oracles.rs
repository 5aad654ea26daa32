//! Values checked against independent numerical oracles: direct complex
//! arithmetic, golden-section and grid minimization, seeded Monte Carlo.

mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use common::{golden_section, golden_section_log, grid_min, min_2d, rel_err};
use noise_budget::calibration::{
    blue_sideband_amplitude, fit_coupling_slope, fit_lorentzian, g_from_blue_sideband,
    linear_omegas, synth_sideband_spectrum, BlueSidebandSetup, Lorentzian,
};
use noise_budget::homodyne::{
    displacement_psd, displacement_psd_cavity, displacement_psd_full, light_psd,
    mechanical_psd_full, squashing_ratio, squeezing_optimum,
};
use noise_budget::limits::{
    cot_phi_opt, force_psd_opt, p_opt, p_opt_fixed_angle, phi_opt, psd_at_phi_opt, ql_added,
    ql_psd, sql_psd, stitch_quadratures, uncertainty_product, variational_spectrum, LimitCurve,
};
use noise_budget::model::{chi_c, chi_m, chi_m_dimensionless, hz};
use noise_budget::synodyne::{beta_opt, synodyne_psd, synodyne_ql, Branch, SynodyneLO};
use noise_budget::sweep::{linspace, run_sweep, ReadoutKind, SweepSpec};
use noise_budget::{
    ClassicalNoise, Detection, Execution, MechanicalMode, OpticalCavity, Power, Rho, SystemParams,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn det(eps: f64) -> Detection {
    Detection::new(eps).unwrap()
}

fn mode(n_th: f64) -> MechanicalMode {
    MechanicalMode::with_occupation(n_th).unwrap()
}

/// Minimizes the quadrature-dependent part of the displacement PSD over phi
/// and returns `cot(phi_min)`. The other components do not depend on phi, so
/// dropping them keeps the search well conditioned.
fn cot_oracle(rho: f64, p: f64, eps: f64) -> f64 {
    let m = mode(0.0);
    let d = det(eps);
    let g = |phi: f64| {
        let c = displacement_psd(Rho(rho), Power(p), phi, &d, &m).unwrap();
        c.s_ii + c.s_corr
    };
    let (phi, _) = golden_section(g, 1e-7, PI - 1e-7, 1e-14);
    phi.cos() / phi.sin()
}

#[test]
fn dimensional_and_dimensionless_susceptibility_agree() {
    let m = MechanicalMode::new(hz(1.596e6), hz(340.0), 0.0, 0.0).unwrap();
    let omega = m.omega_m + hz(1700.0);
    let rho = m.rho(omega);
    assert!((rho.0 - 10.0).abs() < 1e-9);
    let dimensional = chi_m(omega, &m).norm();
    let scaled = 2.0 / m.gamma * chi_m_dimensionless(rho).norm();
    assert!(rel_err(dimensional, scaled) < 1e-12);
    assert!(rel_err(dimensional, 2.0 / m.gamma / 101f64.sqrt()) < 1e-9);
}

#[test]
fn cavity_response_at_mechanical_frequency() {
    let cav = OpticalCavity::resonant(hz(2.5e6)).unwrap();
    let omega = hz(1.596e6);
    let half = 0.5 * cav.kappa;
    // 1 / (kappa/2 - i omega), by hand
    let direct = half * half / (half * half + omega * omega);
    let value = chi_c(omega, &cav).norm_sqr() * half * half;
    assert!(rel_err(value, direct) < 1e-12);
    assert!((value - 0.3802).abs() < 1e-4);
}

#[test]
fn phase_quadrature_sql_power_and_value() {
    let m = mode(0.0);
    let added = |p: f64| {
        let c = displacement_psd(Rho(12.0), Power(p), FRAC_PI_2, &Detection::ideal(), &m).unwrap();
        c.s_ii + c.s_ff
    };
    let (p_min, v_min) = golden_section_log(added, 0.1, 1e4, 1e-13);
    assert!(rel_err(p_min, 145f64.sqrt()) < 1e-6);
    let analytic = p_opt_fixed_angle(Rho(12.0), FRAC_PI_2, &Detection::ideal()).unwrap();
    assert!(rel_err(analytic.p.0, 145f64.sqrt()) < 1e-12);
    assert!((v_min - 1.0 / 145f64.sqrt()).abs() < 1e-8);
    assert!((sql_psd(Rho(12.0)) - 1.0 / 145f64.sqrt()).abs() < 1e-15);
}

#[test]
fn dimensionless_psd_matches_full_cavity_model() {
    let mut sys = SystemParams::membrane_experiment();
    sys.mode.n_th = 1.29;
    let m = sys.mode;
    let photons = sys.photons(Power(14.0)).unwrap();
    for (rho, expected) in [(5.0, 0.4187), (-5.0, 0.8033)] {
        let omega = Rho(rho).to_omega(&m);
        let full = displacement_psd_full(omega, FRAC_PI_4, photons, &sys, &ClassicalNoise::default())
            .unwrap();
        let simple = displacement_psd(Rho(rho), Power(14.0), FRAC_PI_4, &det(0.35), &m).unwrap();
        assert!(rel_err(simple.total, full.total) < 0.01, "rho {rho}: {} vs {}", simple.total, full.total);
        assert!((simple.total - expected).abs() < 5e-4);
    }
    let plus = displacement_psd(Rho(5.0), Power(14.0), FRAC_PI_4, &det(0.35), &m).unwrap();
    let minus = displacement_psd(Rho(-5.0), Power(14.0), FRAC_PI_4, &det(0.35), &m).unwrap();
    assert!(plus.s_corr < 0.0 && minus.s_corr > 0.0);
    assert!((plus.s_corr + minus.s_corr).abs() < 1e-15);
}

#[test]
fn cavity_filtering_is_negligible_at_rho_12() {
    let m = SystemParams::membrane_experiment().mode;
    let cav = OpticalCavity::resonant(hz(2.5e6)).unwrap();
    let omega = Rho(12.0).to_omega(&m);
    let filtered = displacement_psd_cavity(omega, Power(28.0), FRAC_PI_4, &det(0.35), &m, &cav).unwrap();
    let plain = displacement_psd(Rho(12.0), Power(28.0), FRAC_PI_4, &det(0.35), &m).unwrap();
    // |chi_c|^2 falls by 2 omega_m d_omega / ((kappa/2)^2 + omega_m^2) at an
    // offset of six linewidths: about 1.6e-3, not negligible at 1e-4
    let half = 0.5 * cav.kappa;
    let ratio = (half * half + m.omega_m * m.omega_m) / (half * half + omega * omega);
    assert!(rel_err(filtered.s_ii, plain.s_ii / ratio) < 1e-12);
    let correction = rel_err(filtered.s_ii, plain.s_ii);
    assert!(correction > 1e-3 && correction < 2e-3, "{correction}");

    let wide = OpticalCavity::resonant(1e9 * m.omega_m).unwrap();
    let limit = displacement_psd_cavity(omega, Power(28.0), FRAC_PI_4, &det(0.35), &m, &wide).unwrap();
    assert!(rel_err(limit.total, plain.total) < 1e-6);
}

#[test]
fn ponderomotive_squeezing_minimum() {
    let m = mode(0.0);
    let d = Detection::ideal();
    let f = |phi: f64| light_psd(Rho(5.0), phi, Power(6.0), &d, &m).unwrap();
    let n = (PI / 1e-4) as usize + 1;
    let (phi_grid, s_grid) = grid_min(f, 0.0, PI, n);
    let (phi_sq, s_sq) = squeezing_optimum(Rho(5.0), Power(6.0), &d, &m).unwrap();
    assert!((s_grid - 0.445).abs() < 5e-4, "grid minimum {s_grid}");
    assert!(s_sq <= s_grid && s_grid - s_sq < 1e-6);
    assert!((phi_grid - phi_sq).abs() < 2e-4);
    // the squeezing quadrature lies between amplitude and the displacement optimum
    assert!(phi_sq < phi_opt(Rho(5.0), Power(6.0), &d).unwrap());
}

#[test]
fn squashing_is_an_order_below_quantum_terms() {
    let mut sys = SystemParams::membrane_experiment();
    sys.mode.n_th = 1.29;
    let noise = ClassicalNoise::new(0.004, 0.015).unwrap();
    let omega = Rho(10.0).to_omega(&sys.mode);
    let squash = squashing_ratio(omega, FRAC_PI_4, &sys.cavity, &sys.mode, &noise).unwrap();
    let quantum = displacement_psd(Rho(10.0), Power(14.0), FRAC_PI_4, &sys.detection, &sys.mode).unwrap();
    assert!(squash.abs() * 10.0 < quantum.total, "{squash} vs {}", quantum.total);
}

#[test]
fn full_motion_spectrum_matches_dimensionless_on_resonance() {
    let mut sys = SystemParams::membrane_experiment();
    sys.mode.n_th = 0.0;
    for p in [0.5, 3.0, 14.0] {
        let photons = sys.photons(Power(p)).unwrap();
        let xx = mechanical_psd_full(sys.mode.omega_m, photons, &sys, &ClassicalNoise::default())
            .unwrap();
        let c = displacement_psd(Rho(0.0), Power(p), FRAC_PI_2, &sys.detection, &sys.mode).unwrap();
        assert!(rel_err(0.5 * sys.mode.gamma * xx, c.s_m + c.s_ff) < 1e-9);
    }
}

#[test]
fn optimal_quadrature_examples() {
    let cot = cot_phi_opt(Rho(5.0), Power(50.0), &Detection::ideal()).unwrap();
    assert!((cot - 250.0 / 26.0).abs() < 1e-12);
    assert!((cot_oracle(5.0, 50.0, 1.0) - cot).abs() < 1e-6 * cot);
    assert!((phi_opt(Rho(5.0), Power(50.0), &Detection::ideal()).unwrap().to_degrees() - 5.94).abs() < 0.01);

    let cot = cot_phi_opt(Rho(12.0), Power(28.0), &det(0.35)).unwrap();
    assert!((cot - 117.6 / 145.0).abs() < 1e-12);
    assert!((cot_oracle(12.0, 28.0, 0.35) - cot).abs() < 1e-6);
    assert!((phi_opt(Rho(12.0), Power(28.0), &det(0.35)).unwrap().to_degrees() - 50.95).abs() < 0.01);
}

#[test]
fn optimal_quadrature_beats_phase_quadrature() {
    let m = mode(1.29);
    let v = psd_at_phi_opt(Rho(5.0), Power(14.0), &det(0.35), &m).unwrap();
    let at90 = displacement_psd(Rho(5.0), Power(14.0), FRAC_PI_2, &det(0.35), &m).unwrap().total;
    assert!(v < at90);
}

#[test]
fn quantum_limit_from_two_dimensional_search() {
    let m = mode(1.29);
    let d = det(0.35);
    let f = |p: f64, phi: f64| displacement_psd(Rho(5.0), Power(p), phi, &d, &m).unwrap().total;
    let (p, _, v) = min_2d(f, (0.1, 1e4), (1e-4, PI - 1e-4), 1e-12);
    let ql = ql_psd(Rho(5.0), &d, &m);
    assert!(rel_err(v, ql) < 1e-8, "{v} vs {ql}");
    assert!(rel_err(p, p_opt(Rho(5.0), &d).p.0) < 1e-4);
    assert!((ql_added(Rho(5.0), &d) - 0.2700).abs() < 1e-4);
    assert!((ql - 0.4077).abs() < 1e-4);
}

#[test]
fn uncertainty_product_from_components() {
    // On resonance |chi| = 1, so s_ii s_ff is the product of the unfiltered
    // spectra; at rho = 1 the cross term exposes S_IF = -s_corr / (2 rho |chi|^2).
    let d = det(0.35);
    let m = mode(0.0);
    let phi = FRAC_PI_4;
    let c0 = displacement_psd(Rho(0.0), Power(3.0), phi, &d, &m).unwrap();
    let c1 = displacement_psd(Rho(1.0), Power(3.0), phi, &d, &m).unwrap();
    let s_if = -c1.s_corr / (2.0 * 0.5);
    let u = uncertainty_product(phi, Power(3.0), &d).unwrap();
    assert!(rel_err(u.lhs, c0.s_ii * c0.s_ff) < 1e-12);
    assert!(rel_err(u.rhs, 0.25 + s_if * s_if) < 1e-12);
    assert!((u.lhs - 2.0 / 1.4).abs() < 1e-12);
    assert!((u.rhs - 0.5).abs() < 1e-12);
}

#[test]
fn variational_curve_between_quantum_limit_and_phase_quadrature() {
    let grid = linspace(0.0, 20.0, 201);
    let d = Detection::ideal();
    let m = mode(0.0);
    let var = variational_spectrum(&grid, Power(50.0), &d, &m, Execution::Sequential).unwrap();
    let at90 = LimitCurve::fixed_angle(&grid, Power(50.0), FRAC_PI_2, &d, &m, Execution::Sequential).unwrap();
    let ql = LimitCurve::ql(&grid, &d, &m);
    for (i, &rho) in grid.iter().enumerate() {
        if rho == 0.0 {
            assert_eq!(var.values[i], at90.values[i]);
        } else {
            assert!(var.values[i] < at90.values[i], "rho {rho}");
        }
        assert!(var.values[i] >= ql.values[i] - 1e-15, "rho {rho}");
    }
    // tangency where p_opt(rho) = 50, found by bisection
    let (mut lo, mut hi) = (0.0, 20.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if p_opt(Rho(mid), &d).p.0 < 50.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let touch = 0.5 * (lo + hi);
    assert!((touch - 7.0).abs() < 1e-9);
    let gap = psd_at_phi_opt(Rho(touch), Power(50.0), &d, &m).unwrap() - ql_psd(Rho(touch), &d, &m);
    assert!(gap.abs() < 1e-12);
}

#[test]
fn stitched_envelope_follows_optimal_quadrature() {
    let grid = linspace(-15.0, 15.0, 301);
    let d = det(0.35);
    let m = mode(1.29);
    let angles = [45.0f64, 60.0, 75.0, 90.0];
    let curves: Vec<LimitCurve> = angles
        .iter()
        .map(|a| LimitCurve::fixed_angle(&grid, Power(14.0), a.to_radians(), &d, &m, Execution::Sequential).unwrap())
        .collect();
    let s = stitch_quadratures(&curves).unwrap();
    for (i, &rho) in grid.iter().enumerate() {
        let target = phi_opt(Rho(rho), Power(14.0), &d).unwrap().to_degrees();
        let chosen = s.chosen_phi[i].to_degrees();
        let below = angles.iter().copied().filter(|&a| a <= target).fold(f64::NAN, f64::max);
        let above = angles.iter().copied().filter(|&a| a >= target).fold(f64::NAN, f64::min);
        let ok = [below, above]
            .iter()
            .any(|a| a.is_finite() && (a - chosen).abs() < 1e-9);
        assert!(ok, "rho {rho}: phi_opt {target} chose {chosen}");
        let min = curves.iter().map(|c| c.values[i]).fold(f64::INFINITY, f64::min);
        assert_eq!(s.values[i], min);
    }
    let mid = grid.iter().position(|&r| r == 0.0).unwrap();
    assert_eq!(s.chosen_phi[mid].to_degrees().round(), 90.0);
    let at5 = grid.iter().position(|&r| (r - 5.0).abs() < 1e-9).unwrap();
    assert_eq!(s.chosen_phi[at5].to_degrees().round(), 45.0);
    for i in 0..mid {
        assert_eq!(s.chosen_phi[i].to_degrees().round(), 90.0);
    }
}

#[test]
fn force_quantum_limit_on_resonance() {
    let d = det(0.35);
    let m = mode(1.29);
    let v = force_psd_opt(Rho(0.0), &d, &m, None).unwrap();
    assert!(rel_err(v, ql_psd(Rho(0.0), &d, &m) / Rho(0.0).chi_sq()) < 1e-12);
    assert!((v - 5.27).abs() < 0.005);
}

#[test]
fn near_balanced_lo_quadrature_ratio() {
    let lo = SynodyneLO::new(1.02, 0.0).unwrap();
    let (a, p) = lo.coefficients();
    // alpha_- = 1, alpha_+ = 1.02 at zero phase
    let alpha_a = 0.5 * (1.0 + 1.02);
    let alpha_p = 0.5 * (1.02 - 1.0);
    assert!(rel_err(a.norm_sqr(), alpha_a * alpha_a) < 1e-12);
    assert!(rel_err(p.norm_sqr(), alpha_p * alpha_p) < 1e-9);
    assert!(rel_err(a.norm_sqr() / p.norm_sqr(), 10201.0) < 1e-9);
}

#[test]
fn single_tone_limit_of_lo_factors() {
    let beta = 1e6;
    for phi in [0.1, FRAC_PI_4, 1.2] {
        let lo = SynodyneLO::new(beta, phi).unwrap();
        let d = 1.0 + beta * beta - 2.0 * beta * (2.0 * phi).cos();
        assert!(rel_err(lo.shot_noise_factor(), 2.0 * (1.0 + beta * beta) / d) < 1e-12);
        assert!((lo.shot_noise_factor() - 2.0).abs() < 1e-5);
        assert!((lo.correlation_factor() - 1.0).abs() < 1e-5);
        let flipped = SynodyneLO::new(1.0 / beta, phi).unwrap();
        assert!((flipped.correlation_factor() + 1.0).abs() < 1e-5);
    }
}

#[test]
fn phase_branch_sideband_ratio_by_search() {
    let d = Detection::ideal();
    let m = mode(0.0);
    let f = |beta: f64| {
        let lo = SynodyneLO::new(beta, FRAC_PI_2).unwrap();
        synodyne_psd(Rho(0.0), Power(0.5), &lo, &d, &m).unwrap()
    };
    let (beta, _) = golden_section_log(f, 1.0 + 1e-9, 1e3, 1e-13);
    let opt = beta_opt(Rho(0.0), Power(0.5), &d, Branch::Auto).unwrap();
    assert_eq!(opt.branch, Branch::Phase);
    assert!((opt.beta - 3.0).abs() < 1e-12);
    assert!(rel_err(beta, 3.0) < 1e-6);
}

#[test]
fn synodyne_quantum_limit_by_two_dimensional_search() {
    let d = det(0.35);
    let m = mode(0.0);
    let added = |beta: f64, p: f64, phi: f64| {
        let lo = SynodyneLO::new(beta, phi).unwrap();
        synodyne_psd(Rho(0.0), Power(p), &lo, &d, &m).unwrap() - 1.0
    };
    let expected = (0.65f64 / 0.35).sqrt();
    assert!((synodyne_ql(Rho(0.0), &d, &m) - 1.0 - expected).abs() < 1e-12);
    assert!((expected - 1.363).abs() < 5e-4);

    // phase quadrature LO: search over (p, ln beta)
    let (_, _, v) = min_2d(
        |p, u| added(u.exp(), p, FRAC_PI_2),
        (0.01, 1e3),
        (1e-9, 10.0),
        1e-12,
    );
    assert!(rel_err(v, expected) < 1e-7, "{v} vs {expected}");

    // an amplitude-quadrature LO cannot reach it at this efficiency; its
    // infimum is the single-tone limit sqrt(2/eps) - 1
    let (_, _, v0) = min_2d(
        |p, u| added(u.exp(), p, 0.0),
        (0.01, 1e3),
        (1e-6, 20.0),
        1e-12,
    );
    assert!(v0 > expected + 0.02);
    assert!((v0 - ((2.0f64 / 0.35).sqrt() - 1.0)).abs() < 1e-4, "{v0}");
}

#[test]
fn coupling_round_trip_at_device_parameters() {
    let sys = SystemParams::membrane_experiment();
    let setup = BlueSidebandSetup {
        gamma: sys.mode.gamma,
        n_th: 1.368,
        omega_m: sys.mode.omega_m,
        n_damp: 2.0e8,
        detection: sys.detection,
        cavity: sys.cavity,
    };
    let g = hz(39.0);
    let a_b = blue_sideband_amplitude(g, &setup).unwrap();
    let back = g_from_blue_sideband(a_b, &setup).unwrap();
    assert!(rel_err(back, g) < 1e-9);
}

#[test]
fn coupling_slope_with_noisy_series() {
    let g = hz(35.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noise = Normal::new(0.0, 0.05).unwrap();
    let series: Vec<(f64, f64)> = (1..=8)
        .map(|k| {
            let n = k as f64 * 2.5e7;
            (n, g * g * n * (1.0 + noise.sample(&mut rng)))
        })
        .collect();
    let fit = fit_coupling_slope(&series).unwrap();
    assert!(rel_err(fit.g, g) < 0.15);
    assert!(fit.g_std > 0.0 && fit.g_std < 0.15 * g);
}

fn truth() -> Lorentzian {
    Lorentzian {
        center: hz(1.596e6),
        gamma: hz(325.0),
        amplitude: 0.78,
        offset: 1.0,
    }
}

#[test]
fn lorentzian_noiseless_recovery() {
    let t = truth();
    let omegas = linear_omegas(t.center, 5.0 * t.gamma, 400);
    let samples = synth_sideband_spectrum(&t, &omegas, 0.0, 0).unwrap();
    let fit = fit_lorentzian(&samples, None).unwrap().params;
    assert!(rel_err(fit.gamma, t.gamma) < 1e-6);
    assert!(rel_err(fit.amplitude, t.amplitude) < 1e-6);
    assert!(rel_err(fit.offset, t.offset) < 1e-6);
    assert!((fit.center - t.center).abs() < 1e-6 * t.gamma);
}

#[test]
fn lorentzian_noisy_recovery() {
    let t = truth();
    let omegas = linear_omegas(t.center, 5.0 * t.gamma, 400);
    for seed in 0..5 {
        let samples = synth_sideband_spectrum(&t, &omegas, 0.01, seed).unwrap();
        let fit = fit_lorentzian(&samples, None).unwrap();
        assert!(rel_err(fit.params.gamma, t.gamma) < 0.03, "seed {seed}");
        assert!(rel_err(fit.params.amplitude, t.amplitude) < 0.03, "seed {seed}");
        assert!((fit.residual_rms - 0.01).abs() < 0.002);
    }
}

#[test]
fn sweep_reproduces_inset_ordering() {
    let mut spec = SweepSpec::new(ReadoutKind::Homodyne, -10.0, 10.0, 201, vec![14.0]);
    spec.angles_deg = vec![45.0, 90.0];
    spec.epsilon = 0.35;
    spec.n_th = 1.29;
    let table = run_sweep(&spec).unwrap();
    let extra_imprecision = 1.0 / (2.0 * 0.35 * 14.0);
    for pair in table.rows.chunks(2) {
        let (a45, a90) = (&pair[0], &pair[1]);
        assert_eq!(a45.phi_used, 45.0);
        assert_eq!(a90.phi_used, 90.0);
        // 45 deg doubles the imprecision; it wins once the correlation term
        // pays for that
        assert_eq!(a45.total < a90.total, a45.s_corr < -extra_imprecision, "rho {}", a45.rho);
        if (1.0..=9.0).contains(&a45.rho.abs()) {
            assert_eq!(a45.total < a90.total, a45.rho > 0.0, "rho {}", a45.rho);
        }
    }
}
