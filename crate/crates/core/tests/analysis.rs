use lmg_otoc::analysis::{
    fit_power_law, microcanonical_scan, quench_sweep, AveragingConfig, DnDiagnostic, FitWindow,
    DN_ABOVE, DN_BELOW,
};
use lmg_otoc::lmg::LmgParams;

fn short() -> AveragingConfig {
    AveragingConfig {
        total_time: 200.0,
        dt: 0.5,
    }
}

#[test]
fn scan_without_coupling_gives_fourth_powers() {
    // alpha = 0: eigenstates |m_x>, F_n = (m/S)^4 at all times.
    let n = 40;
    let s = f64::from(n) / 2.0;
    let scan = microcanonical_scan(LmgParams::new(0.0, n).unwrap(), short()).unwrap();
    assert_eq!(scan.normalized[0], 1.0);
    // E_n = -2 m^2 / S, so levels pair up with |m| = S, S, S-1, S-1, ...
    let expect: Vec<f64> = (0..=n as usize)
        .map(|k| {
            let m = s - (k / 2) as f64;
            (m / s).powi(4)
        })
        .collect();
    for (got, want) in scan.normalized.iter().zip(&expect) {
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
    // n_c is the m = 0 level, the last one.
    assert_eq!(scan.critical_level, n as usize);
    let dn = scan.dn();
    let lo = n as usize - DN_BELOW;
    assert_eq!(dn.window, (lo, n as usize));
    let window = &expect[lo..=n as usize];
    let spread = window.iter().cloned().fold(f64::MIN, f64::max) - window.iter().cloned().fold(f64::MAX, f64::min);
    assert!((dn.value - spread).abs() < 1e-12);
}

#[test]
fn dn_window_at_small_sizes() {
    let scan = microcanonical_scan(LmgParams::new(0.4, 6).unwrap(), short()).unwrap();
    let dn = scan.dn();
    assert_eq!(dn.window.0, 0);
    assert!(dn.window.1 <= 6);
    assert!(dn.window.1 <= dn.critical_level + DN_ABOVE);
    let direct = DnDiagnostic::from_values(&scan.normalized, scan.critical_level);
    assert_eq!(direct, dn);
}

#[test]
fn ground_level_normalizes_to_one() {
    let scan = microcanonical_scan(LmgParams::new(0.4, 30).unwrap(), short()).unwrap();
    assert_eq!(scan.normalized[0], 1.0);
    assert!((scan.rescaled[0]).abs() < 1e-15);
    assert!((scan.rescaled[30] - 2.0).abs() < 1e-15);
    assert!(scan.critical_rescaled > 0.0 && scan.critical_rescaled < 2.0);
}

#[test]
fn sweep_flags_follow_halfwidth() {
    let g = quench_sweep(&[0.4], &[0.0, 0.3, 1.5], 20, short()).unwrap();
    let row = &g.rows[0];
    assert_eq!(row.cells[0].average.value, 1.0);
    for cell in &row.cells {
        let limit = 0.01 * row.reference.value.abs();
        assert_eq!(cell.flagged, cell.average.raw.estimator_halfwidth >= limit);
    }
}

#[test]
fn fit_invariant_under_rescaling() {
    let pts: Vec<(f64, f64)> = [0.03, 0.05, 0.11, 0.2, 0.27]
        .iter()
        .map(|&x: &f64| (x, 0.7 * x.powf(0.4) * (1.0 + 0.05 * (x * 91.0).sin())))
        .collect();
    let base = fit_power_law(&pts, FitWindow::ALL).unwrap();
    for (sx, sy) in [(1.0, 13.0), (7.0, 1.0), (0.1, 0.002)] {
        let scaled: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (sx * x, sy * y)).collect();
        let fit = fit_power_law(&scaled, FitWindow::ALL).unwrap();
        assert!((fit.exponent - base.exponent).abs() < 1e-12);
        assert!((fit.exponent_stderr - base.exponent_stderr).abs() < 1e-12);
    }
}
