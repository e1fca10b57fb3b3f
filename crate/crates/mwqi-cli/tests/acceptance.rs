//! Acceptance suite: one test per numbered criterion, each printing a
//! machine-greppable verdict line (run with `--nocapture` to see them all).
//!
//! c10(b) encodes a qualitative expectation about where the normalized
//! measures peak that the implemented model does not satisfy; it is kept
//! as an honest failing test and documented in the README rather than
//! weakened to pass.

use std::f64::consts::TAU;
use std::process::Command;

use nalgebra::Matrix6;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use mwqi::config::fig2_preset;
use mwqi::converter::{
    coefficients_lossless, coefficients_lossy, coefficients_spectral, stability, IoCoefficients,
    KappaRatios,
};
use mwqi::params::{occupancies, planck_occupancy, ThermalOccupancies};
use mwqi::receiver::{
    entanglement_threshold, max_idler_range, receiver_moments, BackgroundConvention,
    TargetScenario,
};
use mwqi::source::{source_measures, source_moments, JointSourceState};
use mwqi::verify::{oracle_receiver_moments, symplectic_spectrum_numeric};

const KAPPA_W: f64 = 1.2566370614359172e7;
const KAPPA_O: f64 = 6.283185307179586e6;
const GAMMA_M: f64 = 2094.3951023931954;

fn verdict(id: &str, desc: &str, failures: &[String]) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {id} {desc}: {status}");
    assert!(
        failures.is_empty(),
        "{id} failed:\n{}",
        failures.join("\n")
    );
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + b.abs())
}

/// The reference operating point: fig2 preset, lossless narrowband,
/// cooperativities (5181.95, 668.43).
fn benchmark() -> (
    IoCoefficients<f64>,
    ThermalOccupancies<f64>,
    JointSourceState<f64>,
) {
    let params = fig2_preset::<f64>().build_params().unwrap();
    let occ = occupancies(&params).unwrap();
    let c = coefficients_lossless(5181.95, 668.43).unwrap();
    let s = source_moments(&c, &occ).unwrap();
    (c, occ, s)
}

// ---------------------------------------------------------------------------

#[test]
fn c01_thermal_occupancy_benchmark() {
    let mut failures = Vec::new();
    let n = planck_occupancy(TAU * 1.0e10, 293.0).unwrap();
    if (n - 610.0).abs() > 0.5 {
        failures.push(format!("occupancy at (2*pi*10 GHz, 293 K) = {n}, want 610 +- 0.5"));
    }
    verdict("c01", "thermal occupancy at the radar band", &failures);
}

#[test]
fn c02_source_occupancy_benchmark() {
    let mut failures = Vec::new();
    let (_, _, s) = benchmark();

    if (s.n_o - 0.681).abs() > 0.01 * 0.681 {
        failures.push(format!("n_o = {}, want 0.681 within 1%", s.n_o));
    }
    if !(0.6..=0.8).contains(&s.n_w) {
        failures.push(format!("n_w = {} outside the documented band [0.6, 0.8]", s.n_w));
    }

    // Downstream invariants at the same point.
    let m = source_measures(&s).unwrap();
    if m.metric_e <= 1.0 {
        failures.push(format!("classicality metric {} should exceed 1", m.metric_e));
    }
    if m.e_n <= 0.0 {
        failures.push(format!("log-negativity {} should be positive", m.e_n));
    }
    if m.zeta_minus >= 0.5 {
        failures.push(format!("zeta_minus {} should drop below 1/2", m.zeta_minus));
    }
    if m.nu_minus < 0.5 - 1e-9 {
        failures.push(format!("nu_minus {} violates the uncertainty bound", m.nu_minus));
    }
    if m.i_fwd > m.e_n + 1e-9 || m.i_rev > m.e_n + 1e-9 {
        failures.push(format!(
            "coherent information ({}, {}) should not exceed E_N = {}",
            m.i_fwd, m.i_rev, m.e_n
        ));
    }
    if m.d_w_given_o < -1e-9 || m.d_o_given_w < -1e-9 {
        failures.push(format!(
            "discord ({}, {}) should be non-negative",
            m.d_w_given_o, m.d_o_given_w
        ));
    }
    verdict("c02", "source occupancies and invariants at the reference point", &failures);
}

#[test]
fn c03_entanglement_threshold_benchmark() {
    let mut failures = Vec::new();
    let (_, _, s) = benchmark();
    let threshold = entanglement_threshold(&s, 0.07).unwrap();
    if (threshold - 0.069).abs() > 0.05 * 0.069 {
        failures.push(format!("threshold = {threshold}, want 0.069 within 5%"));
    }
    verdict("c03", "background brightness threshold", &failures);
}

#[test]
fn c04_idler_range() {
    let mut failures = Vec::new();
    let range = max_idler_range::<f64>(0.2, 3.0, 2.0 / 3.0).unwrap();
    if (range - 11.25).abs() > 1e-12 * 11.25 {
        failures.push(format!("range = {range}, want 11.25 km"));
    }
    let range = max_idler_range::<f64>(0.4, 3.0, 2.0 / 3.0).unwrap();
    if (range - 5.625).abs() > 1e-12 * 5.625 {
        failures.push(format!("doubled loss should halve the range, got {range}"));
    }
    verdict("c04", "maximum idler storage range", &failures);
}

#[test]
fn c05_quantum_advantage_over_integration() {
    let mut failures = Vec::new();
    let (c, occ, s) = benchmark();
    let mut last_gap = f64::NEG_INFINITY;
    for i in 0..26 {
        let m = 10f64.powf(4.0 + 5.0 * i as f64 / 25.0);
        let t = TargetScenario::new(0.07, 610.01307681073505, m).unwrap();
        let r = receiver_moments(&s, &c, &occ, &t, BackgroundConvention::default()).unwrap();
        if r.advantage_f <= 1.0 {
            failures.push(format!("advantage {} at M = {m} should exceed 1", r.advantage_f));
        }
        if r.log10_p_qi >= r.log10_p_coh {
            failures.push(format!(
                "P_QI should undercut P_coh at M = {m}: log10 {} vs {}",
                r.log10_p_qi, r.log10_p_coh
            ));
        }
        let gap = r.log10_p_coh - r.log10_p_qi;
        if gap <= last_gap {
            failures.push(format!("log-probability gap should grow with M, stalled at M = {m}"));
        }
        last_gap = gap;
    }
    verdict("c05", "error-probability advantage grows with integration", &failures);
}

// ---------------------------------------------------------------------------

struct DrawnPoint {
    c: IoCoefficients<f64>,
    occ: ThermalOccupancies<f64>,
}

/// A random stable operating point at lossy-narrowband fidelity with random
/// thermal inputs.
fn draw_point(rng: &mut ChaCha20Rng) -> DrawnPoint {
    let gamma_w = (rng.gen::<f64>() * (100.0f64.ln() - 0.1f64.ln()) + 0.1f64.ln()).exp();
    let gamma_o = rng.gen::<f64>() * 0.9 * (1.0 + gamma_w);
    let r_w = 0.3 + 0.7 * rng.gen::<f64>();
    let r_o = 0.3 + 0.7 * rng.gen::<f64>();
    let ratios = KappaRatios::from_in_fractions(r_w, r_o).unwrap();
    let c = coefficients_lossy(gamma_w, gamma_o, &ratios).unwrap();
    let occ = ThermalOccupancies {
        n_w_t: rng.gen::<f64>() * 1.5,
        n_o_t: rng.gen::<f64>() * 0.1,
        n_b_t: rng.gen::<f64>() * 100.0,
        n_w_int: rng.gen::<f64>() * 1.5,
        n_o_int: rng.gen::<f64>() * 0.1,
    };
    DrawnPoint { c, occ }
}

#[test]
fn c06_wick_and_eigenvalue_oracles() {
    let mut failures = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(0xC06);
    let tol = 1e-10;

    // Receiver moments against the Wick moment-factoring oracle.
    for i in 0..100 {
        let DrawnPoint { c, occ } = draw_point(&mut rng);
        let s = source_moments(&c, &occ).unwrap();
        let eta = 0.01 + 0.29 * rng.gen::<f64>();
        let n_b = rng.gen::<f64>() * 1000.0;
        let convention = if i % 2 == 0 {
            BackgroundConvention::ExactDivOneMinusEta
        } else {
            BackgroundConvention::Approximate
        };
        let t = TargetScenario::new(eta, n_b, 1.0).unwrap();
        let r = receiver_moments(&s, &c, &occ, &t, convention).unwrap();
        for (present, mean_plus, mean_minus, var_diff, n_return) in [
            (false, r.mean_plus_h0, r.mean_minus_h0, r.var_diff_h0, r.n_return_h0),
            (true, r.mean_plus_h1, r.mean_minus_h1, r.var_diff_h1, r.n_return_h1),
        ] {
            let o = oracle_receiver_moments(&c, &occ, eta, n_b, convention, present).unwrap();
            for (label, closed, oracle) in [
                ("mean_plus", mean_plus, o.mean_plus),
                ("mean_minus", mean_minus, o.mean_minus),
                ("var_diff", var_diff, o.var_diff),
                ("n_return", n_return, o.n_return),
                ("n_retained", s.n_o, o.n_retained),
            ] {
                let err = rel_err(closed, oracle);
                if err > tol {
                    failures.push(format!(
                        "draw {i} (target {present}): {label} closed {closed} vs oracle {oracle} \
                         (rel {err:.3e})"
                    ));
                }
            }
        }
    }

    // Closed-form symplectic spectra against the numeric eigenvalue oracle.
    for i in 0..100 {
        let DrawnPoint { c, occ } = draw_point(&mut rng);
        let s = source_moments(&c, &occ).unwrap();
        let m = source_measures(&s).unwrap();
        let cm = [
            [s.v11, 0.0, s.v13, 0.0],
            [0.0, s.v11, 0.0, -s.v13],
            [s.v13, 0.0, s.v33, 0.0],
            [0.0, -s.v13, 0.0, s.v33],
        ];
        let flat: Vec<f64> = cm.iter().flatten().copied().collect();
        let nus = symplectic_spectrum_numeric(&flat, 2, None).unwrap();
        let zetas = symplectic_spectrum_numeric(&flat, 2, Some(1)).unwrap();
        for (label, closed, numeric) in [
            ("nu_minus", m.nu_minus, nus[0]),
            ("nu_plus", m.nu_plus, nus[1]),
            ("zeta_minus", m.zeta_minus, zetas[0]),
        ] {
            let err = rel_err(closed, numeric);
            if err > tol {
                failures.push(format!(
                    "cm draw {i}: {label} closed {closed} vs numeric {numeric} (rel {err:.3e})"
                ));
            }
        }
    }

    failures.truncate(10);
    verdict("c06", "closed forms match the independent oracles", &failures);
}

#[test]
fn c07_commutator_preservation() {
    let mut failures = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(0xC07);
    let spread_ok = |gw: f64, go: f64| (1.0 + gw - go).abs() >= 0.05 * (1.0 + gw + go);

    let draw_pair = |rng: &mut ChaCha20Rng| loop {
        let gw = rng.gen::<f64>() * 20.0;
        let go = rng.gen::<f64>() * 20.0;
        if spread_ok(gw, go) {
            return (gw, go);
        }
    };

    for i in 0..10_000 {
        let (gw, go) = draw_pair(&mut rng);
        let c = coefficients_lossless::<f64>(gw, go).unwrap();
        let (rw, ro) = c.commutator_residuals();
        let tol = 1e-10 * c.magnitude_scale();
        if rw.abs() > tol || ro.abs() > tol {
            failures.push(format!("lossless draw {i}: residuals ({rw:.3e}, {ro:.3e})"));
        }
    }

    for i in 0..10_000 {
        let (gw, go) = draw_pair(&mut rng);
        let ratios =
            KappaRatios::from_in_fractions(rng.gen::<f64>(), rng.gen::<f64>()).unwrap();
        let c = coefficients_lossy::<f64>(gw, go, &ratios).unwrap();
        let (rw, ro) = c.commutator_residuals();
        let tol = 1e-10 * c.magnitude_scale();
        if rw.abs() > tol || ro.abs() > tol {
            failures.push(format!("lossy draw {i}: residuals ({rw:.3e}, {ro:.3e})"));
        }
    }

    for i in 0..10_000 {
        let (gw, go) = draw_pair(&mut rng);
        let ratios = KappaRatios::from_in_fractions(
            0.1 + 0.9 * rng.gen::<f64>(),
            0.1 + 0.9 * rng.gen::<f64>(),
        )
        .unwrap();
        let omega = (2.0 * rng.gen::<f64>() - 1.0) * KAPPA_O;
        let c =
            coefficients_spectral::<f64>(gw, go, KAPPA_W, KAPPA_O, GAMMA_M, &ratios, omega)
                .unwrap();
        let (rw, ro) = c.commutator_residuals();
        let tol = 1e-10 * c.magnitude_scale();
        if rw.abs() > tol || ro.abs() > tol {
            failures.push(format!("spectral draw {i}: residuals ({rw:.3e}, {ro:.3e})"));
        }

        // Carrier limit reduces to the lossy-narrowband coefficients.
        let at_zero =
            coefficients_spectral::<f64>(gw, go, KAPPA_W, KAPPA_O, GAMMA_M, &ratios, 0.0)
                .unwrap();
        let lossy = coefficients_lossy::<f64>(gw, go, &ratios).unwrap();
        for (a, b) in [
            (at_zero.a_w, lossy.a_w),
            (at_zero.a_o, lossy.a_o),
            (at_zero.b, lossy.b),
            (at_zero.c_w, lossy.c_w),
            (at_zero.c_o, lossy.c_o),
            (at_zero.d_w, lossy.d_w),
            (at_zero.d_o, lossy.d_o),
            (at_zero.e_w_coef, lossy.e_w_coef),
            (at_zero.e_o_coef, lossy.e_o_coef),
        ] {
            if (a - b).norm() > 1e-12 * (1.0 + b.norm()) {
                failures.push(format!("carrier limit mismatch at draw {i}: {a} vs {b}"));
            }
        }
    }

    failures.truncate(10);
    verdict("c07", "commutator preservation at all fidelities", &failures);
}

/// Real quadrature-space drift matrix of the closed three-mode dynamics,
/// ordering (X_w, Y_w, X_o, Y_o, X_b, Y_b) — an independent route to the
/// stability verdict.
fn quadrature_drift(g_w: f64, g_o: f64) -> Matrix6<f64> {
    let mut a = Matrix6::zeros();
    a[(0, 0)] = -KAPPA_W;
    a[(0, 5)] = g_w;
    a[(1, 1)] = -KAPPA_W;
    a[(1, 4)] = -g_w;
    a[(2, 2)] = -KAPPA_O;
    a[(2, 5)] = -g_o;
    a[(3, 3)] = -KAPPA_O;
    a[(3, 4)] = -g_o;
    a[(4, 4)] = -GAMMA_M;
    a[(4, 3)] = -g_o;
    a[(4, 1)] = g_w;
    a[(5, 5)] = -GAMMA_M;
    a[(5, 2)] = -g_o;
    a[(5, 0)] = -g_w;
    a
}

#[test]
fn c08_stability_criterion() {
    let mut failures = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(0xC08);

    for i in 0..10_000 {
        let gamma_w = rng.gen::<f64>() * 12.0;
        let gamma_o = rng.gen::<f64>() * 12.0;
        let report = stability::<f64>(gamma_w, gamma_o, KAPPA_W, KAPPA_O, GAMMA_M).unwrap();
        if report.margin.abs() <= 1e-9 * KAPPA_W {
            continue; // too close to the boundary for either method's roundoff
        }
        let g_w = (gamma_w * KAPPA_W * GAMMA_M).sqrt();
        let g_o = (gamma_o * KAPPA_O * GAMMA_M).sqrt();
        let max_re = quadrature_drift(g_w, g_o)
            .complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        if report.stable != (max_re < 0.0) {
            failures.push(format!(
                "draw {i} at ({gamma_w}, {gamma_o}): verdict {} vs eigenvalue max Re {max_re}",
                report.stable
            ));
        }
    }

    // The constant coefficient of the characteristic cubic vanishes on
    // gamma_o = 1 + gamma_w, so the margin collapses there.
    for gamma_w in [0.0, 1.0, 2.5, 10.0, 100.0] {
        let report =
            stability::<f64>(gamma_w, 1.0 + gamma_w, KAPPA_W, KAPPA_O, GAMMA_M).unwrap();
        if report.stable {
            failures.push(format!("boundary point ({gamma_w}) wrongly declared stable"));
        }
        if report.margin.abs() > 1e-7 * KAPPA_W {
            failures.push(format!(
                "boundary margin at ({gamma_w}) should vanish, got {}",
                report.margin
            ));
        }
    }

    failures.truncate(10);
    verdict("c08", "stability verdict matches drift eigenvalues", &failures);
}

#[test]
fn c09_measure_dichotomy() {
    let mut failures = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(0xC09);

    for i in 0..10_000 {
        let DrawnPoint { c, occ } = draw_point(&mut rng);
        let s = source_moments(&c, &occ).unwrap();
        let m = source_measures(&s).unwrap();
        if (m.metric_e - 1.0).abs() > 1e-8 && (m.metric_e > 1.0) != (m.e_n > 0.0) {
            failures.push(format!(
                "draw {i}: metric {} and E_N {} disagree on entanglement",
                m.metric_e, m.e_n
            ));
        }
        if m.i_fwd > m.e_n + 1e-9 || m.i_rev > m.e_n + 1e-9 {
            failures.push(format!(
                "draw {i}: coherent information ({}, {}) exceeds E_N {}",
                m.i_fwd, m.i_rev, m.e_n
            ));
        }
    }

    failures.truncate(10);
    verdict("c09", "entanglement dichotomy and information bound", &failures);
}

// ---------------------------------------------------------------------------
// c10: figure-shape reproduction through the command-line binary

fn run_csv(args: &[&str]) -> Vec<Vec<String>> {
    let out = Command::new(env!("CARGO_BIN_EXE_mwqi"))
        .args(args)
        .output()
        .expect("binary must run");
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|s| s.to_string()).collect())
        .collect()
}

#[test]
fn c10a_stable_region_boundary() {
    let mut failures = Vec::new();
    for gamma_w in ["0.5", "2.0", "8.0"] {
        let boundary = 1.0 + gamma_w.parse::<f64>().unwrap();
        for command in ["source", "advantage"] {
            let mut args = vec![command, "--gamma-w", gamma_w, "--gamma-o", "0.05:40:60:log"];
            if command == "advantage" {
                args.extend(["--eta", "0.07", "--n-b", "610"]);
            }
            let rows = run_csv(&args);
            for row in &rows {
                let go: f64 = row[1].parse().unwrap();
                let stable = &row[2] == "1";
                // No grid point lands within 1e-6 of the boundary, so the
                // flag must match the side exactly.
                if (go < boundary) != stable {
                    failures.push(format!(
                        "{command} slice {gamma_w}: row at gamma_o = {go} flagged {stable} \
                         across boundary {boundary}"
                    ));
                }
            }
        }
    }
    verdict("c10a", "stable region bounded by the cooperativity line", &failures);
}

#[test]
fn c10b_measure_maxima_near_boundary() {
    // Expectation encoded here: for each gamma_w slice, the argmax over
    // gamma_o of every normalized measure and of the advantage lies within
    // 10% of the stability boundary gamma_o = 1 + gamma_w.
    let mut failures = Vec::new();
    let slices = ["2.0", "5.0", "10.0", "50.0", "100.0"];
    let measures = [
        ("metric_E", 3usize),
        ("E_N_per_photon", 4),
        ("I_fwd_per_photon", 5),
        ("I_rev_per_photon", 6),
        ("D_w_o_per_photon", 7),
        ("D_o_w_per_photon", 8),
    ];

    println!("measured argmax location over gamma_o, as % of the boundary 1 + gamma_w:");
    println!("{:<22} {}", "measure", slices.map(|s| format!("{s:>8}")).join(" "));

    let mut table: Vec<(String, Vec<f64>)> = measures
        .iter()
        .map(|(name, _)| (name.to_string(), Vec::new()))
        .collect();
    table.push(("F".to_string(), Vec::new()));

    for slice in &slices {
        let boundary = 1.0 + slice.parse::<f64>().unwrap();
        let source_rows = run_csv(&[
            "source", "--gamma-w", slice, "--gamma-o", "0.05:101:100:log",
        ]);
        let stable: Vec<&Vec<String>> =
            source_rows.iter().filter(|r| r[2] == "1").collect();
        for (k, (name, col)) in measures.iter().enumerate() {
            let best = stable
                .iter()
                .max_by(|a, b| {
                    let va: f64 = a[*col].parse().unwrap();
                    let vb: f64 = b[*col].parse().unwrap();
                    va.partial_cmp(&vb).unwrap()
                })
                .expect("slice has stable rows");
            let at: f64 = best[1].parse().unwrap();
            table[k].1.push(100.0 * at / boundary);
            if at < 0.9 * boundary {
                failures.push(format!(
                    "{name} peaks at gamma_o = {at:.4} on slice gamma_w = {slice} \
                     ({:.1}% of boundary {boundary})",
                    100.0 * at / boundary
                ));
            }
        }

        let adv_rows = run_csv(&[
            "advantage", "--gamma-w", slice, "--gamma-o", "0.05:101:100:log", "--eta", "0.07",
            "--n-b", "610",
        ]);
        let best = adv_rows
            .iter()
            .filter(|r| r[2] == "1")
            .max_by(|a, b| {
                let va: f64 = a[3].parse().unwrap();
                let vb: f64 = b[3].parse().unwrap();
                va.partial_cmp(&vb).unwrap()
            })
            .expect("slice has stable rows");
        let at: f64 = best[1].parse().unwrap();
        let idx = table.len() - 1;
        table[idx].1.push(100.0 * at / boundary);
        if at < 0.9 * boundary {
            failures.push(format!(
                "advantage F peaks at gamma_o = {at:.4} on slice gamma_w = {slice} \
                 ({:.1}% of boundary {boundary})",
                100.0 * at / boundary
            ));
        }
    }

    for (name, cells) in &table {
        println!(
            "{:<22} {}",
            name,
            cells.iter().map(|v| format!("{v:>7.1}%")).collect::<Vec<_>>().join(" ")
        );
    }

    verdict("c10b", "normalized measures peak adjacent to the boundary", &failures);
}
