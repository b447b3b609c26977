//! Order-parameter curves, microcanonical scans, the `D_n` diagnostic and
//! power-law fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lmg::{critical_lambda, EnergyScale, LmgParams, QuenchSpec, CRITICAL_ENERGY};
use crate::otoc::{
    quench_long_time_average, LongTimeAverage, MicrocanonicalEnsemble, TimeGrid, AVERAGE_DT,
    AVERAGE_T,
};

/// References with `|F| < REFERENCE_FLOOR` cannot normalize a curve.
pub const REFERENCE_FLOOR: f64 = 1e-12;

/// Cells whose halfwidth exceeds this fraction of `|reference|` are flagged.
pub const HALFWIDTH_FLAG_FRACTION: f64 = 0.01;

/// Default window on `|lambda - lambda_c|` and `|eps - eps_c|`.
pub const DEFAULT_FIT_WINDOW: FitWindow = FitWindow { min: 0.02, max: 0.3 };

/// Default system sizes for the finite-size exponent.
pub const DEFAULT_SIZES: [u32; 4] = [100, 200, 300, 400];

/// Levels below / above `n_c` covered by the `D_n` window.
pub const DN_BELOW: usize = 15;
pub const DN_ABOVE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragingConfig {
    pub total_time: f64,
    pub dt: f64,
}

impl Default for AveragingConfig {
    fn default() -> Self {
        Self {
            total_time: AVERAGE_T,
            dt: AVERAGE_DT,
        }
    }
}

impl AveragingConfig {
    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::uniform(self.total_time, self.dt)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedAverage {
    pub raw: LongTimeAverage,
    pub reference: f64,
    pub value: f64,
}

impl NormalizedAverage {
    pub fn new(raw: LongTimeAverage, reference: f64) -> Result<Self> {
        if !(reference.abs() >= REFERENCE_FLOOR) {
            return Err(Error::ReferenceTooSmall(reference));
        }
        Ok(Self {
            raw,
            reference,
            value: raw.value / reference,
        })
    }
}

// ---------------------------------------------------------------------------
// Quench sweeps

/// Identifies one long-time average so it can be cached between runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellKey {
    pub alpha: f64,
    pub lambda: f64,
    pub n_spins: u32,
    pub total_time: f64,
    pub dt: f64,
}

/// Persistence hook for sweep cells; lets interrupted sweeps resume.
pub trait CellStore: Sync {
    fn load(&self, key: &CellKey) -> Option<LongTimeAverage>;
    fn store(&self, key: &CellKey, value: &LongTimeAverage);
}

/// A store that remembers nothing.
pub struct NoStore;

impl CellStore for NoStore {
    fn load(&self, _key: &CellKey) -> Option<LongTimeAverage> {
        None
    }
    fn store(&self, _key: &CellKey, _value: &LongTimeAverage) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub lambda: f64,
    pub average: NormalizedAverage,
    /// Halfwidth at or above `HALFWIDTH_FLAG_FRACTION * |reference|`.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    /// `(4 - 5 alpha)/2`, absent outside its domain.
    pub critical_lambda: Option<f64>,
    pub reference: LongTimeAverage,
    pub cells: Vec<SweepCell>,
    /// Set when the row could not be normalized; `cells` is then empty.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    pub alphas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub n_spins: u32,
    pub config: AveragingConfig,
    pub rows: Vec<SweepRow>,
}

impl SweepGrid {
    pub fn row(&self, alpha: f64) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.alpha == alpha)
    }
}

#[cfg(feature = "parallel")]
fn map_jobs<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_jobs<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    F: Fn(T) -> R,
{
    items.into_iter().map(f).collect()
}

/// `F-bar` for one `(alpha, lambda, N)`, consulting `store` first.
pub fn quench_cell(key: CellKey, store: &dyn CellStore) -> Result<LongTimeAverage> {
    if let Some(hit) = store.load(&key) {
        return Ok(hit);
    }
    let params = LmgParams::new(key.alpha, key.n_spins)?;
    let spec = QuenchSpec::new(params, key.lambda)?;
    let grid = TimeGrid::uniform(key.total_time, key.dt)?;
    let avg = quench_long_time_average(spec, &grid)?;
    store.store(&key, &avg);
    Ok(avg)
}

/// Long-time averages for many cells, computed on the worker pool.
pub fn quench_cells(keys: Vec<CellKey>, store: &dyn CellStore) -> Vec<Result<LongTimeAverage>> {
    map_jobs(keys, |k| quench_cell(k, store))
}

pub fn quench_sweep(
    alphas: &[f64],
    lambdas: &[f64],
    n_spins: u32,
    config: AveragingConfig,
) -> Result<SweepGrid> {
    quench_sweep_with_store(alphas, lambdas, n_spins, config, &NoStore)
}

/// Normalized `F-bar(alpha, lambda) / F-bar(alpha, 0)` on a rectangular grid.
pub fn quench_sweep_with_store(
    alphas: &[f64],
    lambdas: &[f64],
    n_spins: u32,
    config: AveragingConfig,
    store: &dyn CellStore,
) -> Result<SweepGrid> {
    config.grid()?;
    for &a in alphas {
        LmgParams::new(a, n_spins)?;
    }
    for &l in lambdas {
        if !l.is_finite() || l < 0.0 {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: l,
                reason: "must be finite and non-negative",
            });
        }
    }

    let key = |alpha, lambda| CellKey {
        alpha,
        lambda,
        n_spins,
        total_time: config.total_time,
        dt: config.dt,
    };
    let mut keys = Vec::new();
    for &a in alphas {
        keys.push(key(a, 0.0));
        keys.extend(lambdas.iter().filter(|&&l| l != 0.0).map(|&l| key(a, l)));
    }
    let mut results = quench_cells(keys.clone(), store).into_iter();
    let mut keyed = keys.into_iter();

    let mut rows = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let _ = keyed.next();
        let reference = results.next().expect("one reference per alpha")?;
        let mut by_lambda = Vec::new();
        for _ in lambdas.iter().filter(|&&l| l != 0.0) {
            let k = keyed.next().expect("cell key");
            by_lambda.push((k.lambda, results.next().expect("cell result")?));
        }
        let critical = match critical_lambda(alpha) {
            Ok(v) => Some(v),
            Err(_) => {
                log::warn!("no critical field overlay for alpha = {alpha} (outside 0 <= alpha < 0.8)");
                None
            }
        };
        let mut row = SweepRow {
            alpha,
            critical_lambda: critical,
            reference,
            cells: Vec::new(),
            error: None,
        };
        if reference.value.abs() < REFERENCE_FLOOR {
            row.error = Some(Error::ReferenceTooSmall(reference.value).to_string());
            rows.push(row);
            continue;
        }
        for &lambda in lambdas {
            let raw = if lambda == 0.0 {
                reference
            } else {
                by_lambda
                    .iter()
                    .find(|(l, _)| *l == lambda)
                    .map(|(_, v)| *v)
                    .expect("every lambda was computed")
            };
            let average = NormalizedAverage::new(raw, reference.value)?;
            row.cells.push(SweepCell {
                lambda,
                average,
                flagged: raw.estimator_halfwidth >= HALFWIDTH_FLAG_FRACTION * reference.value.abs(),
            });
        }
        rows.push(row);
    }

    Ok(SweepGrid {
        alphas: alphas.to_vec(),
        lambdas: lambdas.to_vec(),
        n_spins,
        config,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Microcanonical scans

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicroScan {
    pub alpha: f64,
    pub n_spins: u32,
    pub config: AveragingConfig,
    pub energies: Vec<f64>,
    pub rescaled: Vec<f64>,
    pub averages: Vec<LongTimeAverage>,
    /// `F-bar_n / F-bar_0`.
    pub normalized: Vec<f64>,
    pub critical_rescaled: f64,
    /// Level closest to `E_c = 0`; the lower index wins a tie.
    pub critical_level: usize,
}

/// `F-bar_n / F-bar_0` for every eigenstate of `H(alpha)`.
pub fn microcanonical_scan(params: LmgParams, config: AveragingConfig) -> Result<MicroScan> {
    let grid = config.grid()?;
    let ensemble = MicrocanonicalEnsemble::new(params)?;
    let averages = ensemble.long_time_averages(&grid)?;
    let energies: Vec<f64> = ensemble.energies().to_vec();
    MicroScan::assemble(params, config, energies, averages)
}

impl MicroScan {
    pub fn assemble(
        params: LmgParams,
        config: AveragingConfig,
        energies: Vec<f64>,
        averages: Vec<LongTimeAverage>,
    ) -> Result<Self> {
        if energies.len() != averages.len() {
            return Err(Error::DimensionMismatch {
                expected: energies.len(),
                got: averages.len(),
            });
        }
        let scale = EnergyScale::from_spectrum(&energies)?;
        let reference = averages[0].value;
        if reference.abs() < REFERENCE_FLOOR {
            return Err(Error::ReferenceTooSmall(reference));
        }
        Ok(Self {
            alpha: params.alpha(),
            n_spins: params.n_spins(),
            config,
            rescaled: energies.iter().map(|&e| scale.rescale(e).0).collect(),
            normalized: averages.iter().map(|a| a.value / reference).collect(),
            critical_rescaled: scale.critical().0,
            critical_level: closest_level(&energies, CRITICAL_ENERGY),
            energies,
            averages,
        })
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn dn(&self) -> DnDiagnostic {
        DnDiagnostic::from_values(&self.normalized, self.critical_level)
    }

    /// Mean `F-bar_n` over `eps in [0, width)` versus over `(eps_c, eps_c + width]`.
    pub fn phase_separation(&self, width: f64) -> PhaseSeparation {
        let mean = |lo: f64, hi: f64, include_lo: bool| {
            let vals: Vec<f64> = self
                .rescaled
                .iter()
                .zip(&self.normalized)
                .filter(|(&e, _)| (if include_lo { e >= lo } else { e > lo }) && e <= hi)
                .map(|(_, &v)| v)
                .collect();
            let n = vals.len();
            (if n == 0 { f64::NAN } else { vals.iter().sum::<f64>() / n as f64 }, n)
        };
        let (low_mean, low_count) = mean(0.0, width * (1.0 - 1e-12), true);
        let (above_mean, above_count) =
            mean(self.critical_rescaled, self.critical_rescaled + width, false);
        PhaseSeparation {
            width,
            low_mean,
            low_count,
            above_mean,
            above_count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSeparation {
    pub width: f64,
    pub low_mean: f64,
    pub low_count: usize,
    pub above_mean: f64,
    pub above_count: usize,
}

impl PhaseSeparation {
    pub fn ratio(&self) -> f64 {
        self.low_mean / self.above_mean.abs()
    }
}

/// Index of the level closest to `target`; ties go to the lower index.
pub fn closest_level(energies: &[f64], target: f64) -> usize {
    let mut best = 0;
    for (k, &e) in energies.iter().enumerate() {
        if (e - target).abs() < (energies[best] - target).abs() {
            best = k;
        }
    }
    best
}

/// Spread `max - min` of `F-bar_n` over `n in [n_c - 15, n_c + 5]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DnDiagnostic {
    pub critical_level: usize,
    /// Inclusive level range after clipping to the spectrum.
    pub window: (usize, usize),
    pub value: f64,
}

impl DnDiagnostic {
    pub fn from_values(normalized: &[f64], critical_level: usize) -> Self {
        let last = normalized.len().saturating_sub(1);
        let lo = critical_level.saturating_sub(DN_BELOW);
        let hi = (critical_level + DN_ABOVE).min(last);
        let slice = &normalized[lo..=hi];
        let max = slice.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = slice.iter().copied().fold(f64::INFINITY, f64::min);
        Self {
            critical_level,
            window: (lo, hi),
            value: max - min,
        }
    }
}

pub fn dn_diagnostic(
    alpha: f64,
    sizes: &[u32],
    config: AveragingConfig,
) -> Result<Vec<(u32, DnDiagnostic)>> {
    sizes
        .iter()
        .map(|&n| {
            let scan = microcanonical_scan(LmgParams::new(alpha, n)?, config)?;
            Ok((n, scan.dn()))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Power laws

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub min: f64,
    pub max: f64,
}

impl FitWindow {
    pub const ALL: FitWindow = FitWindow {
        min: 0.0,
        max: f64::INFINITY,
    };

    pub fn contains(&self, x: f64) -> bool {
        let ax = x.abs();
        ax >= self.min && ax <= self.max
    }
}

/// Ordinary least squares of `ln y` on `ln |x|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Log-log slope.
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub amplitude: f64,
    /// `[min, max]` of the `|x|` values that entered the fit.
    pub window: (f64, f64),
    pub n_points: usize,
}

/// Fits `y = amplitude |x|^exponent` to the points with `|x|` inside
/// `window`, `x != 0` and `y > 0`. Non-positive `y` are skipped, not clamped.
pub fn fit_power_law(points: &[(f64, f64)], window: FitWindow) -> Result<FitResult> {
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x != 0.0 && x.is_finite() && y.is_finite() && *y > 0.0 && window.contains(*x))
        .map(|&(x, y)| (x.abs(), y))
        .collect();
    let n = used.len();
    if n < 3 {
        return Err(Error::InsufficientPoints { needed: 3, got: n });
    }
    let logs: Vec<(f64, f64)> = used.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let nf = n as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientPoints { needed: 3, got: 1 });
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = logs
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let stderr = (ssr / (nf - 2.0) / sxx).sqrt();
    let xmin = used.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let xmax = used.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(FitResult {
        exponent: slope,
        exponent_stderr: stderr,
        amplitude: intercept.exp(),
        window: (xmin, xmax),
        n_points: n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingKind {
    /// `F-bar(lambda_c) ~ N^-mu`
    Mu,
    /// `F-bar-norm ~ |lambda - lambda_c|^gamma_lambda`
    GammaLambda,
    /// `F-bar_n ~ |eps_n - eps_c|^gamma_eps`
    GammaEpsilon,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub kind: ScalingKind,
    pub alpha: f64,
    /// The exponent with its conventional sign (`mu` is minus the slope).
    pub exponent: f64,
    pub exponent_stderr: f64,
    pub fit: FitResult,
    /// All `(x, y)` candidates; the fit uses those inside its window.
    pub points: Vec<(f64, f64)>,
}

/// Finite-size exponent of the raw `F-bar` at `lambda = lambda_c(alpha)`.
pub fn scaling_mu(alpha: f64, sizes: &[u32], config: AveragingConfig) -> Result<ScalingResult> {
    scaling_mu_with_store(alpha, sizes, config, &NoStore)
}

pub fn scaling_mu_with_store(
    alpha: f64,
    sizes: &[u32],
    config: AveragingConfig,
    store: &dyn CellStore,
) -> Result<ScalingResult> {
    let lambda_c = critical_lambda(alpha)?;
    let mut distinct = sizes.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            got: distinct.len(),
        });
    }
    config.grid()?;
    let keys: Vec<CellKey> = distinct
        .iter()
        .map(|&n| CellKey {
            alpha,
            lambda: lambda_c,
            n_spins: n,
            total_time: config.total_time,
            dt: config.dt,
        })
        .collect();
    let values = quench_cells(keys, store);
    let mut points = Vec::with_capacity(distinct.len());
    for (&n, v) in distinct.iter().zip(values) {
        points.push((f64::from(n), v?.value));
    }
    let fit = fit_power_law(&points, FitWindow::ALL)?;
    Ok(ScalingResult {
        kind: ScalingKind::Mu,
        alpha,
        exponent: -fit.exponent,
        exponent_stderr: fit.exponent_stderr,
        fit,
        points,
    })
}

/// `count` offsets log-spaced over `window`, largest first.
pub fn log_spaced_offsets(window: FitWindow, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![window.max];
    }
    let (lo, hi) = (window.min.ln(), window.max.ln());
    (0..count)
        .map(|i| match i {
            0 => window.max,
            i if i == count - 1 => window.min,
            i => (hi - (hi - lo) * i as f64 / (count - 1) as f64).exp(),
        })
        .collect()
}

/// Exponent of `F-bar-norm` against `|lambda - lambda_c|`, approaching the
/// critical field from below at `lambda = lambda_c - offset`.
pub fn scaling_gamma_lambda(
    alpha: f64,
    n_spins: u32,
    offsets: &[f64],
    window: FitWindow,
    config: AveragingConfig,
) -> Result<ScalingResult> {
    scaling_gamma_lambda_with_store(alpha, n_spins, offsets, window, config, &NoStore)
}

pub fn scaling_gamma_lambda_with_store(
    alpha: f64,
    n_spins: u32,
    offsets: &[f64],
    window: FitWindow,
    config: AveragingConfig,
    store: &dyn CellStore,
) -> Result<ScalingResult> {
    let lambda_c = critical_lambda(alpha)?;
    if let Some(&bad) = offsets.iter().find(|&&d| !(d > 0.0 && d <= lambda_c)) {
        return Err(Error::InvalidParameter {
            name: "offset",
            value: bad,
            reason: "lambda grid must lie strictly below the critical field",
        });
    }
    let lambdas: Vec<f64> = offsets.iter().map(|d| lambda_c - d).collect();
    let sweep = quench_sweep_with_store(&[alpha], &lambdas, n_spins, config, store)?;
    let row = &sweep.rows[0];
    if let Some(e) = &row.error {
        return Err(Error::Domain(e.clone()));
    }
    // Use the requested offsets rather than recomputing lambda_c - lambda,
    // which can round an endpoint out of the window.
    let points: Vec<(f64, f64)> = offsets
        .iter()
        .zip(&row.cells)
        .map(|(&d, c)| (d, c.average.value))
        .collect();
    let fit = fit_power_law(&points, window)?;
    Ok(ScalingResult {
        kind: ScalingKind::GammaLambda,
        alpha,
        exponent: fit.exponent,
        exponent_stderr: fit.exponent_stderr,
        fit,
        points,
    })
}

/// Exponent of `F-bar_n` against `|eps_n - eps_c|` over levels below the
/// critical energy.
pub fn gamma_epsilon_from_scan(scan: &MicroScan, window: FitWindow) -> Result<ScalingResult> {
    let points: Vec<(f64, f64)> = scan
        .rescaled
        .iter()
        .zip(&scan.normalized)
        .filter(|(&e, _)| e < scan.critical_rescaled)
        .map(|(&e, &v)| ((e - scan.critical_rescaled).abs(), v))
        .collect();
    let fit = fit_power_law(&points, window)?;
    Ok(ScalingResult {
        kind: ScalingKind::GammaEpsilon,
        alpha: scan.alpha,
        exponent: fit.exponent,
        exponent_stderr: fit.exponent_stderr,
        fit,
        points,
    })
}

pub fn scaling_gamma_epsilon(
    alpha: f64,
    n_spins: u32,
    window: FitWindow,
    config: AveragingConfig,
) -> Result<ScalingResult> {
    let scan = microcanonical_scan(LmgParams::new(alpha, n_spins)?, config)?;
    gamma_epsilon_from_scan(&scan, window)
}
