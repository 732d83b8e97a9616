use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use phononbus_core::msgate::{bell_state_fidelity, fitted_rate, g_ms, ideal_gg, simulate, MSConfig};
use phononbus_core::units::mhz;

fn cfg(ratio: f64) -> MSConfig {
    let delta = mhz(148.0);
    MSConfig { g0: ratio * delta, delta, ..Default::default() }
}

#[test]
fn starts_in_ground_pair() {
    let r = simulate(&cfg(0.1)).unwrap();
    assert!((r.trajectory.observable("n_gg").unwrap()[0] - 1.0).abs() < 1e-14);
    assert_eq!(r.ideal[0], 1.0);
}

#[test]
fn populations_follow_effective_model() {
    let r = simulate(&cfg(0.1)).unwrap();
    let gg = r.trajectory.observable("n_gg").unwrap();
    let ee = r.trajectory.observable("n_ee").unwrap();
    let worst = (0..gg.len())
        .map(|k| (gg[k] - r.ideal[k]).abs().max((ee[k] - (1.0 - r.ideal[k])).abs()))
        .fold(0.0, f64::max);
    assert!(worst < 0.05, "worst deviation {worst}");
    let t_end = *r.trajectory.times.last().unwrap();
    assert!((r.g_ms * t_end - FRAC_PI_2).abs() < 1e-12);
    assert!(*ee.last().unwrap() >= 0.95, "n_ee at g t = π/2: {}", ee.last().unwrap());
}

#[test]
fn odd_parity_leakage_is_small() {
    for ratio in [0.05, 0.1, 0.2] {
        let r = simulate(&cfg(ratio)).unwrap();
        let odd = r.trajectory.observable("odd").unwrap().iter().cloned().fold(0.0, f64::max);
        assert!(odd < ratio * ratio + 0.01, "g0/δ = {ratio}: odd {odd}");
    }
}

#[test]
fn bell_state_at_quarter_period() {
    let c = cfg(0.05);
    let t = c.bell_time().unwrap();
    let b = bell_state_fidelity(&c, t).unwrap();
    assert!(b.fidelity >= 0.98, "F = {}", b.fidelity);
    assert!(b.purity > 0.98, "purity {}", b.purity);
    let f0 = bell_state_fidelity(&c, 0.0).unwrap().fidelity;
    assert!((f0 - FRAC_1_SQRT_2).abs() < 1e-12);
}

#[test]
fn fitted_rate_matches_formula() {
    for ratio in [0.05, 0.1] {
        let c = MSConfig { samples: 2001, ..cfg(ratio) };
        let r = simulate(&c).unwrap();
        let fit = fitted_rate(&r.trajectory.times, r.trajectory.observable("n_ee").unwrap()).unwrap();
        assert!((fit / r.g_ms - 1.0).abs() < 0.1, "g0/δ = {ratio}: {fit} vs {}", r.g_ms);
    }
}

#[test]
fn dephasing_reduces_bell_fidelity() {
    let c = cfg(0.1);
    let t = c.bell_time().unwrap();
    let clean = bell_state_fidelity(&c, t).unwrap().fidelity;
    let noisy = bell_state_fidelity(&MSConfig { gamma_e: 0.5, ..c.clone() }, t).unwrap().fidelity;
    assert!(noisy < clean - 0.01, "{noisy} vs {clean}");
}

#[test]
fn pre_rwa_agrees_with_rwa() {
    // Dropped sidebands sit ≳ 2ω_e − δ away and shift the rate by ~δ/(2ω_e), so
    // the carriers must stay in the GHz range.
    let base = cfg(0.1);
    let c = MSConfig { samples: 21, t_end: Some(base.bell_time().unwrap()), ..base };
    let rwa = simulate(&c).unwrap();
    let full = simulate(&MSConfig { pre_rwa: true, ..c }).unwrap();
    let a = rwa.trajectory.observable("n_ee").unwrap();
    let b = full.trajectory.observable("n_ee").unwrap();
    let worst = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(worst < 0.05, "pre-RWA deviation {worst}");
}

#[test]
fn rejects_zero_detuning() {
    assert!(g_ms(1.0, 0.0).is_err());
    assert!(simulate(&MSConfig { delta: 0.0, ..Default::default() }).is_err());
    assert!((ideal_gg(1.0, 0.0) - 1.0).abs() < 1e-15);
}
