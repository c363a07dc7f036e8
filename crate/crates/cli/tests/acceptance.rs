//! Acceptance criteria, one test per criterion. Each prints a single
//! `[PASS]`/`[FAIL]` line before asserting; run with `--nocapture` to see them.

use std::f64::consts::{FRAC_PI_4, PI};
use std::process::Command;

use quench_core::numerics::{OdeSpec, QuadratureSpec};
use quench_core::spin::{
    anti_adiabatic_threshold, branch_symmetry_check, omega_scan, oracle_deviation, return_probability,
    return_probability_cycle, Branch, RotorConfig, ScanSpec,
};
use quench_core::well::{
    decompose, eigen_energy, energy_scan, expansion_coefficient, force_scan, overlap_oracle, projection_norm,
    quench_energy, QuenchRatio, WellConfig, DEFAULT_FORCE_STEP,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: u32, title: &str, ok: bool, detail: String) {
    println!("[{}] C{id:02} {title}: {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} failed: {detail}");
}

fn ratio(g: f64) -> QuenchRatio<f64> {
    QuenchRatio::new(g).unwrap()
}

fn rotor(tilt: f64, r: f64) -> RotorConfig<f64> {
    RotorConfig::default().with_tilt(tilt).unwrap().with_drive_ratio(r).unwrap()
}

#[test]
fn c01_ground_energy_constant() {
    let cfg = WellConfig::<f64>::default();
    let e1 = eigen_energy(1, cfg.initial_width(), &cfg).unwrap();
    let rel = (e1 / 5.49e-23 - 1.0).abs();
    verdict(1, "ground energy E1 = 5.49e-23 J within 0.5%", rel <= 5e-3, format!("E1 = {e1:.6e} J, rel err {rel:.2e}"));
}

#[test]
fn c02_closed_form_vs_quadrature() {
    let cfg = WellConfig::default();
    let spec = QuadratureSpec::new(1e-11, 500_000).unwrap();
    let mut worst = 0.0f64;
    for g in [0.1, 0.3, 0.5, 0.9, 1.5, 2.0, 2.5, 4.9, 5.0, 10.1] {
        for n in 1..=20 {
            let closed = expansion_coefficient(n, &ratio(g)).unwrap();
            let oracle = overlap_oracle(n, &ratio(g), &cfg, &spec).unwrap();
            worst = worst.max((closed - oracle).abs());
        }
    }
    verdict(2, "closed-form b_n vs overlap quadrature <= 1e-8", worst <= 1e-8, format!("max |diff| = {worst:.2e}"));
}

#[test]
fn c03_parseval_and_projection_norm() {
    let mut worst = 0.0f64;
    for g in [1.5, 2.0, 5.0] {
        worst = worst.max((decompose(&ratio(g), 10_000).unwrap().captured() - 1.0).abs());
    }
    for g in [0.3, 0.5, 0.9] {
        let c = decompose(&ratio(g), 10_000).unwrap().captured();
        worst = worst.max((c - projection_norm(&ratio(g))).abs());
    }
    verdict(3, "captured(N=1e4) vs 1 or projection norm within 1e-3", worst <= 1e-3, format!("max dev = {worst:.2e}"));
}

#[test]
fn c04_mean_energy_conservation() {
    let cfg = WellConfig::default();
    let mut worst = 0.0f64;
    for g in [1.5, 2.0, 3.0] {
        worst = worst.max((quench_energy(&ratio(g), 10_000, &cfg).unwrap().raw - 1.0).abs());
    }
    verdict(4, "raw energy (N=1e4) = 1 E1 within 1e-3", worst <= 1e-3, format!("max dev = {worst:.2e}"));
}

#[test]
fn c05_population_peak_structure() {
    let mut detail = Vec::new();
    let mut ok = true;
    for g in [1.5f64, 4.9, 10.1] {
        let peak = decompose(&ratio(g), 40).unwrap().peak_level();
        let want = g.round() as usize;
        ok &= peak == want;
        detail.push(format!("argmax(gamma={g}) = {peak} (want {want})"));
    }
    let d = decompose(&ratio(4.9), 40).unwrap();
    let rho = d.populations();
    let far = (1usize..=40).filter(|n| n.abs_diff(5) >= 3).map(|n| rho[n - 1]).fold(0.0, f64::max);
    let dominant = rho.iter().all(|p| *p <= rho[4]);
    ok &= dominant && far < 0.02;
    detail.push(format!("rho_5(4.9) = {:.4}, dominant = {dominant}, max far rho = {far:.4}", rho[4]));
    verdict(5, "population peaks at round(gamma)", ok, detail.join("; "));
}

#[test]
fn c06_ten_level_coverage() {
    let expand: Vec<f64> = (0..100).map(|i| 1.0 + 4.0 * i as f64 / 99.0).collect();
    let min_expand = expand
        .iter()
        .map(|g| decompose(&ratio(*g), 10).unwrap().captured())
        .fold(f64::INFINITY, f64::min);
    let shrink: Vec<f64> = (0..100).map(|i| 0.01 + 0.98 * i as f64 / 99.0).collect();
    let (mut worst_shrink, mut at) = (0.0f64, 0.0);
    for g in shrink {
        let dev = (decompose(&ratio(g), 10).unwrap().captured() - projection_norm(&ratio(g))).abs();
        if dev > worst_shrink {
            (worst_shrink, at) = (dev, g);
        }
    }
    verdict(
        6,
        "ten levels capture >= 0.95 on [1,5]; shrink within 0.02 of projection norm",
        min_expand >= 0.95 && worst_shrink <= 0.02,
        format!("min captured on [1,5] = {min_expand:.4}; max shrink dev = {worst_shrink:.4} at gamma = {at:.3}"),
    );
}

/// Grid positions where the sign of consecutive values changes, located at
/// the midpoint of the pair.
fn sign_flips(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    (1..ys.len()).filter(|&i| ys[i].signum() != ys[i - 1].signum()).map(|i| 0.5 * (xs[i] + xs[i - 1])).collect()
}

#[test]
fn c07_force_signs() {
    let compressed = force_scan(0.1, 0.9, 81, 10, DEFAULT_FORCE_STEP).unwrap();
    let all_positive = compressed.rows.iter().all(|r| r.force > 0.0);
    let max_compressed = compressed.rows.iter().map(|r| r.force).fold(f64::MIN, f64::max);
    let expanded = force_scan(1.5, 5.0, 351, 10, DEFAULT_FORCE_STEP).unwrap();
    let max_expanded = expanded.rows.iter().map(|r| r.force.abs()).fold(0.0, f64::max);

    let window = force_scan(2.5, 3.5, 101, 10, DEFAULT_FORCE_STEP).unwrap();
    let xs: Vec<f64> = window.rows.iter().map(|r| r.gamma).collect();
    let fs: Vec<f64> = window.rows.iter().map(|r| r.force).collect();
    let force_flips = sign_flips(&xs, &fs);

    let energy = energy_scan(2.5, 3.5, 101, 10).unwrap();
    let mids: Vec<f64> = energy.windows(2).map(|w| 0.5 * (w[0].0 + w[1].0)).collect();
    let secants: Vec<f64> = energy.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect();
    let secant_flips = sign_flips(&mids, &secants);

    let spacing = 0.01;
    let matched = !force_flips.is_empty()
        && force_flips.len() == secant_flips.len()
        && force_flips.iter().zip(&secant_flips).all(|(a, b)| (a - b).abs() <= 1.5 * spacing);

    verdict(
        7,
        "force repulsive for gamma<1, negligible for gamma>1, flips with E' slope",
        all_positive && max_compressed > 100.0 * max_expanded && matched,
        format!(
            "min F on [0.1,0.9] > 0: {all_positive}; max F = {max_compressed:.3e} vs 100 x {max_expanded:.3e}; \
             F flips at {force_flips:.3?}, slope flips at {secant_flips:.3?}"
        ),
    );
}

#[test]
fn c08_spin_ode_equivalence() {
    let spec = OdeSpec::default();
    let mut worst = 0.0f64;
    for tilt in [PI / 12.0, FRAC_PI_4, PI / 3.0] {
        for r in [0.3, 1.0, 1.442, 5.0, 15.0] {
            let dev = oracle_deviation(Branch::Upper, &rotor(tilt, r), &spec).unwrap();
            worst = worst.max(dev.max_component_error);
        }
    }
    verdict(8, "closed-form spin evolution vs RK4 within 1e-6 over one cycle", worst <= 1e-6, format!("max dev = {worst:.2e}"));
}

#[test]
fn c09_cycle_consistency_and_branch_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut cycle, mut symmetry) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let c = rotor(rng.gen_range(0.0..=PI), rng.gen_range(0.05..20.0));
        let t = rng.gen_range(0.0..3.0) * c.drive_period();
        let from_time = return_probability(c.drive_period(), Branch::Upper, &c);
        cycle = cycle.max((from_time - return_probability_cycle(c.drive(), &c).unwrap()).abs());
        symmetry = symmetry.max(branch_symmetry_check(t, &c).difference);
    }
    verdict(
        9,
        "one-cycle formula and branch symmetry hold to 1e-12",
        cycle <= 1e-12 && symmetry <= 1e-12,
        format!("cycle dev = {cycle:.2e}, branch dev = {symmetry:.2e} over 1000 draws"),
    );
}

#[test]
fn c10_anti_adiabatic_threshold() {
    let th = anti_adiabatic_threshold(0.02, &rotor(FRAC_PI_4, 1.0), &ScanSpec::default()).unwrap();
    let onset_ok = (th.monotone_onset - 1.442).abs() <= 0.05;
    let tilts = [PI / 12.0, PI / 6.0, FRAC_PI_4, PI / 3.0];
    let at_15: Vec<f64> =
        tilts.iter().map(|&a| return_probability_cycle(15.0 * rotor(a, 1.0).larmor(), &rotor(a, 1.0)).unwrap()).collect();
    let frozen_ok = at_15.iter().all(|r| *r >= 0.98);
    let aligned = omega_scan(0.05, 20.0, 10_000, &[0.0], &rotor(0.0, 1.0)).unwrap();
    let aligned_dev = aligned[0].rows.iter().map(|(_, r)| (r - 1.0).abs()).fold(0.0, f64::max);
    verdict(
        10,
        "monotone onset 1.442 +- 0.05, rho1(15 w0) >= 0.98, rho1 = 1 at alpha = 0",
        onset_ok && frozen_ok && aligned_dev <= 1e-12,
        format!(
            "onset = {:.4}, rho1(15) = {at_15:.4?}, max |rho1 - 1| at alpha=0 = {aligned_dev:.1e}",
            th.monotone_onset
        ),
    );
}

#[test]
fn c11_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_quench");
    let runs = |args: &[&str]| {
        let a = Command::new(bin).args(args).output().unwrap();
        let b = Command::new(bin).args(args).output().unwrap();
        a.status.success() && b.status.success() && !a.stdout.is_empty() && a.stdout == b.stdout
    };
    let energy = runs(&["well", "energy-scan", "--gamma", "0.1:5", "--points", "500", "--levels", "10"]);
    let omega = runs(&["spin", "omega-scan", "--alpha", "pi/4", "--ratio", "0.05:20", "--points", "10000"]);
    verdict(
        11,
        "repeated energy-scan and omega-scan output is byte-identical",
        energy && omega,
        format!("energy-scan identical: {energy}, omega-scan identical: {omega}"),
    );
}
