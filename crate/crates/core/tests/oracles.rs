//! Reference values and derived convergence checks for the sweeps and fidelities.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use lambda_holonomy::dynamics::{avg_gate_fidelity, NoiseModel, REFERENCE_RABI_CAP};
use lambda_holonomy::gate::{compile_at_rabi_cap, minimize_area, CompileOptions, GateSpec, MinimizeOptions};
use lambda_holonomy::linalg::{cr, Vec2};
use lambda_holonomy::sweeps::{
    area_vs_amplitude, default_eps_grid, linspace, population_trace, robustness_case, robustness_grid,
    smin_vs_theta, Metric, RobustnessOptions, Scheme,
};

#[test]
fn area_curve_minimum_is_grid_stable() {
    let opts = CompileOptions::default();
    let coarse_grid = linspace(0.1, 1.2, 23);
    let fine_grid = linspace(0.1, 1.2, 45);
    let step = coarse_grid[1] - coarse_grid[0];
    let coarse = area_vs_amplitude(FRAC_PI_2, 29.5, &coarse_grid, opts, 0).unwrap();
    let fine = area_vs_amplitude(FRAC_PI_2, 29.5, &fine_grid, opts, 0).unwrap();
    let a_coarse = coarse_grid[coarse.argmin().unwrap().0];
    let a_fine = fine_grid[fine.argmin().unwrap().0];
    assert!((a_coarse - a_fine).abs() < step);
    // the curve minimum sits within one step of the refined minimizer
    let m = minimize_area(FRAC_PI_2, 29.5, (0.0, 1.5), MinimizeOptions::default()).unwrap();
    assert!((a_coarse - m.amplitude).abs() <= step);
    assert!(coarse.values.iter().flatten().all(|s| *s >= m.area - 1e-9));
}

#[test]
fn small_rotation_area_is_gamma_excursion() {
    // θ = 0: Ω₁ ≡ 0 and S = ∫|γ̇| dt; |γ| rises to A and returns in each segment, so S = 4A
    let r = area_vs_amplitude(0.0, 30.0, &[0.2, 0.5], CompileOptions::default(), 1).unwrap();
    assert!((r.values[0].unwrap() - 0.8).abs() < 1e-9);
    assert!((r.values[1].unwrap() - 2.0).abs() < 1e-9);
}

#[test]
fn quarter_pi_optimal_amplitude() {
    let r = smin_vs_theta(&[FRAC_PI_4], 1.5, MinimizeOptions::default(), 1).unwrap();
    assert!((r.aux["amplitude"][0].unwrap() - 0.38).abs() <= 0.02);
}

#[test]
fn population_trace_reference_fidelities() {
    let noise = NoiseModel::reference();
    for (theta, amplitude, expected) in [(FRAC_PI_2, 0.46, 0.9991), (FRAC_PI_4, 0.38, 0.9997)] {
        let spec = GateSpec::rx(theta).unwrap();
        let s = compile_at_rabi_cap(&spec, amplitude, REFERENCE_RABI_CAP, CompileOptions::default()).unwrap();
        let trace = population_trace(&spec, &s, &Vec2::new(cr(1.0), cr(0.0)), &noise).unwrap();
        for p in &trace {
            assert!((p.p0 + p.pe + p.p1 - 1.0).abs() < 1e-8);
        }
        assert!(trace.windows(2).all(|w| w[1].t > w[0].t));
        let f = trace.last().unwrap().fidelity;
        assert!((f - expected).abs() <= 1e-3, "θ = {theta}: F(T) = {f}");
    }
}

#[test]
fn gate_fidelity_state_count_converges() {
    let noise = NoiseModel::reference();
    for (theta, amplitude) in [(FRAC_PI_2, 0.46), (FRAC_PI_4, 0.38)] {
        let spec = GateSpec::rx(theta).unwrap();
        let s = compile_at_rabi_cap(&spec, amplitude, REFERENCE_RABI_CAP, CompileOptions::default()).unwrap();
        let a = avg_gate_fidelity(&spec, &s, &noise, 1001).unwrap();
        let b = avg_gate_fidelity(&spec, &s, &noise, 2001).unwrap();
        assert!((a - b).abs() <= 1e-6);
    }
}

#[test]
fn robustness_mean_converges_with_resolution() {
    let spec = GateSpec::rx(FRAC_PI_2).unwrap();
    let case = robustness_case(&spec, Scheme::Noncyclic, RobustnessOptions::default()).unwrap();
    let noise = NoiseModel::reference();
    let coarse = robustness_grid(&case, &default_eps_grid(21), &default_eps_grid(21), &noise, Metric::Gate, 0).unwrap();
    let fine = robustness_grid(&case, &default_eps_grid(41), &default_eps_grid(41), &noise, Metric::Gate, 0).unwrap();
    let (a, b) = (coarse.mean().unwrap(), fine.mean().unwrap());
    assert!((a - b).abs() <= 1e-4, "21x21 mean {a}, 41x41 mean {b}");
}

fn trapezoid_mean(values: &[Option<f64>], n: usize) -> f64 {
    let w = |i: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
    let (mut sum, mut norm) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            sum += w(i) * w(j) * values[i * n + j].unwrap();
            norm += w(i) * w(j);
        }
    }
    sum / norm
}

#[test]
fn robustness_trapezoid_mean_converges_with_resolution() {
    // the plain grid mean carries an O(h) edge bias in the curvature; trapezoid weights remove it
    let spec = GateSpec::rx(FRAC_PI_2).unwrap();
    let case = robustness_case(&spec, Scheme::Noncyclic, RobustnessOptions::default()).unwrap();
    let noise = NoiseModel::reference();
    let coarse = robustness_grid(&case, &default_eps_grid(21), &default_eps_grid(21), &noise, Metric::Gate, 0).unwrap();
    let fine = robustness_grid(&case, &default_eps_grid(41), &default_eps_grid(41), &noise, Metric::Gate, 0).unwrap();
    let (a, b) = (trapezoid_mean(&coarse.values, 21), trapezoid_mean(&fine.values, 41));
    assert!((a - b).abs() <= 1e-4, "21x21 {a}, 41x41 {b}");
}

#[test]
fn robustness_beats_baseline_on_21_grid() {
    let spec = GateSpec::rx(FRAC_PI_2).unwrap();
    let noise = NoiseModel::reference();
    let eps = default_eps_grid(21);
    let means: Vec<f64> = [Scheme::Noncyclic, Scheme::Nhqc]
        .iter()
        .map(|&scheme| {
            let case = robustness_case(&spec, scheme, RobustnessOptions::default()).unwrap();
            robustness_grid(&case, &eps, &eps, &noise, Metric::Gate, 0).unwrap().mean().unwrap()
        })
        .collect();
    assert!(means[0] > means[1]);
    assert!(means[0] < 1.0 && means[1] > 0.9);
}
