//! Out-of-time-order correlators with `W = V = S_x / S`.
//!
//! Everything is evaluated in the eigenbasis of the evolution Hamiltonian,
//! where `W(t) = Phi W Phi*` with `Phi = diag(exp(i E_k t))`. For an initial
//! state `psi` with `phi = W psi`:
//!
//! * `a = W(t) psi`, `b = W(t) phi`
//! * `F(t) = <psi| W(t) W W(t) W |psi> = (W a)^dagger b`
//! * `A(t) = <phi| W(t)^2 |phi> = |b|^2`
//! * `C(t) = |[W(t), W] psi|^2 = |b - W a|^2`
//!
//! and the identity `C = A + B - 2 Re F` holds with `B = |W a|^2`. The
//! operators, eigenvectors and states are real; complex numbers only enter
//! through the phases.

use ndarray::linalg::general_mat_mul;
use ndarray::{Array1, Array2, Axis};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{eigh, EigenDecomposition};
use crate::error::{Error, Result};
use crate::lmg::{hamiltonian, postquench_hamiltonian, LmgParams, QuenchSpec};
use crate::spin::{sx, Basis};

/// Number of time points evaluated per matrix product.
const BATCH: usize = 32;

/// Default sampling step for plotted dynamics.
pub const DYNAMICS_DT: f64 = 0.05;

/// Default total time and step for long-time averages.
pub const AVERAGE_T: f64 = 1.0e4;
pub const AVERAGE_DT: f64 = 0.5;

/// Absolute tolerance on `E_a - E_b + E_c - E_d` below which a term of the
/// spectral expansion is treated as stationary.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Ascending sample times starting at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    /// `0, dt, 2 dt, ...` up to `t_max` (the last point is `round(t_max/dt) dt`).
    pub fn uniform(t_max: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidGrid(format!("step must be positive, got {dt}")));
        }
        if !(t_max >= 0.0) || !t_max.is_finite() {
            return Err(Error::InvalidGrid(format!("t_max must be non-negative, got {t_max}")));
        }
        let steps = (t_max / dt).round() as usize;
        Ok(Self {
            times: (0..=steps).map(|k| k as f64 * dt).collect(),
        })
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        match times.first() {
            None => return Err(Error::InvalidGrid("no time points".into())),
            Some(&t0) if t0 != 0.0 => {
                return Err(Error::InvalidGrid(format!("grid must start at t = 0, got {t0}")))
            }
            _ => {}
        }
        if times.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("non-finite time".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("times must be strictly ascending".into()));
        }
        Ok(Self { times })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_max(&self) -> f64 {
        *self.times.last().expect("grids are never empty")
    }
}

/// How the initial state and evolution were chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Protocol {
    /// Ground state of `H(alpha)` evolved with `H + lambda S_z`.
    Quench(QuenchSpec),
    /// Eigenstate `level` of `H(alpha)` evolved with `H(alpha)`.
    Microcanonical { params: LmgParams, level: usize },
}

impl Protocol {
    pub fn state_label(&self) -> String {
        match self {
            Protocol::Quench(spec) => format!(
                "ground state of H(alpha={}), N={}",
                spec.params().alpha(),
                spec.params().n_spins()
            ),
            Protocol::Microcanonical { params, level } => format!(
                "eigenstate n={} of H(alpha={}), N={}",
                level,
                params.alpha(),
                params.n_spins()
            ),
        }
    }
}

/// All correlators at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OtocPoint {
    pub t: f64,
    /// `F(t) = <W(t) V W(t) V>`
    pub f: Complex64,
    /// `A(t) = <V W(t) W(t) V>`
    pub a: Complex64,
    /// `B(t) = <W(t) V V W(t)>`
    pub b: f64,
    /// `C(t) = <|[W(t), V]|^2>`
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtocSeries {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
    pub protocol: Protocol,
    pub state_label: String,
}

impl OtocSeries {
    pub fn from_points(points: &[OtocPoint], protocol: Protocol) -> Self {
        Self {
            times: points.iter().map(|p| p.t).collect(),
            values: points.iter().map(|p| p.f).collect(),
            protocol,
            state_label: protocol.state_label(),
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_abs_re(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.re.abs()))
    }

    pub fn max_abs_im(&self) -> f64 {
        self.values.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorSeries {
    pub times: Vec<f64>,
    pub c_values: Vec<f64>,
    pub a_values: Vec<Complex64>,
    /// The reversed-order term `<W(t) V^2 W(t)>`; `C = A + B - 2 Re F`.
    pub b_values: Vec<f64>,
}

impl CommutatorSeries {
    pub fn from_points(points: &[OtocPoint]) -> Self {
        Self {
            times: points.iter().map(|p| p.t).collect(),
            c_values: points.iter().map(|p| p.c).collect(),
            a_values: points.iter().map(|p| p.a).collect(),
            b_values: points.iter().map(|p| p.b).collect(),
        }
    }
}

/// Trapezoidal mean of `Re F` with a convergence diagnostic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongTimeAverage {
    pub value: f64,
    pub total_time: f64,
    pub sample_count: usize,
    /// `|mean over [0, T] - mean over [0, T/2]|`.
    pub estimator_halfwidth: f64,
}

/// Streaming trapezoidal mean over `[t_start, t_end]`, also tracking the mean
/// over the first half of the span.
#[derive(Debug, Clone)]
pub struct TrapezoidMean {
    t_start: f64,
    half_limit: f64,
    prev: Option<(f64, f64)>,
    integral: f64,
    half_integral: f64,
    half_end: f64,
    count: usize,
}

impl TrapezoidMean {
    pub fn new(t_start: f64, t_end: f64) -> Self {
        Self {
            t_start,
            half_limit: t_start + 0.5 * (t_end - t_start) * (1.0 + 1e-12),
            prev: None,
            integral: 0.0,
            half_integral: 0.0,
            half_end: t_start,
            count: 0,
        }
    }

    pub fn push(&mut self, t: f64, value: f64) {
        if let Some((tp, vp)) = self.prev {
            let seg = 0.5 * (t - tp) * (value + vp);
            self.integral += seg;
            if t <= self.half_limit {
                self.half_integral += seg;
                self.half_end = t;
            }
        }
        self.prev = Some((t, value));
        self.count += 1;
    }

    pub fn finish(&self) -> Result<LongTimeAverage> {
        let (t_last, v_last) = self.prev.ok_or(Error::EmptySeries)?;
        let total = t_last - self.t_start;
        if total <= 0.0 {
            // A single sample: its value is the mean.
            return Ok(LongTimeAverage {
                value: v_last,
                total_time: 0.0,
                sample_count: self.count,
                estimator_halfwidth: 0.0,
            });
        }
        let value = self.integral / total;
        let half_span = self.half_end - self.t_start;
        let halfwidth = if half_span > 0.0 {
            (value - self.half_integral / half_span).abs()
        } else {
            0.0
        };
        Ok(LongTimeAverage {
            value,
            total_time: total,
            sample_count: self.count,
            estimator_halfwidth: halfwidth,
        })
    }
}

/// Trapezoidal mean of `Re F` over the whole series.
pub fn long_time_average(series: &OtocSeries) -> Result<LongTimeAverage> {
    let (&t0, &t1) = match (series.times.first(), series.times.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::EmptySeries),
    };
    if t1 <= t0 {
        return Err(Error::InvalidGrid("series must span a positive time".into()));
    }
    let mut acc = TrapezoidMean::new(t0, t1);
    for (&t, z) in series.times.iter().zip(&series.values) {
        acc.push(t, z.re);
    }
    acc.finish()
}

/// Trapezoidal mean of `Re F` over the samples with `t_start <= t <= t_end`.
pub fn window_average(series: &OtocSeries, t_start: f64, t_end: f64) -> Result<LongTimeAverage> {
    let picked: Vec<(f64, f64)> = series
        .times
        .iter()
        .zip(&series.values)
        .filter(|(&t, _)| t >= t_start && t <= t_end)
        .map(|(&t, z)| (t, z.re))
        .collect();
    let (first, last) = match (picked.first(), picked.last()) {
        (Some(a), Some(b)) if b.0 > a.0 => (a.0, b.0),
        _ => return Err(Error::EmptySeries),
    };
    let mut acc = TrapezoidMean::new(first, last);
    for (t, v) in picked {
        acc.push(t, v);
    }
    acc.finish()
}

/// `W = S_x / S` together with an initial state, both expressed in the
/// eigenbasis of the evolution Hamiltonian.
#[derive(Debug, Clone)]
pub struct OtocProbe {
    energies: Array1<f64>,
    w: Array2<f64>,
    psi: Array1<f64>,
    phi: Array1<f64>,
}

impl OtocProbe {
    /// Assembles a probe from an evolution spectrum, the operator and the
    /// initial state in that eigenbasis.
    pub fn from_parts(energies: Array1<f64>, w: Array2<f64>, psi: Array1<f64>) -> Result<Self> {
        let d = energies.len();
        if w.dim() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: w.nrows(),
            });
        }
        if psi.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: psi.len(),
            });
        }
        let phi = w.dot(&psi);
        Ok(Self {
            energies,
            w,
            psi,
            phi,
        })
    }

    /// Ground state of `H(alpha)` evolved under `H + lambda S_z`.
    pub fn quench(spec: QuenchSpec) -> Result<Self> {
        let params = spec.params();
        let pre = eigh(&hamiltonian(params, Basis::X))?;
        let post = eigh(&postquench_hamiltonian(spec, Basis::X))?;
        let w = scaled_sx_in(params, &post);
        let psi = post.state_to_eigenbasis(pre.vector(0));
        Self::from_parts(post.values().clone(), w, psi)
    }

    /// Eigenstate `level` of `H(alpha)` evolved under `H(alpha)`.
    pub fn microcanonical(params: LmgParams, level: usize) -> Result<Self> {
        let dim = params.dim();
        if level >= dim {
            return Err(Error::LevelOutOfRange { level, dim });
        }
        let dec = eigh(&hamiltonian(params, Basis::X))?;
        let w = scaled_sx_in(params, &dec);
        let mut psi = Array1::zeros(dim);
        psi[level] = 1.0;
        Self::from_parts(dec.values().clone(), w, psi)
    }

    pub fn energies(&self) -> &Array1<f64> {
        &self.energies
    }

    pub fn operator(&self) -> &Array2<f64> {
        &self.w
    }

    pub fn state(&self) -> &Array1<f64> {
        &self.psi
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn point(&self, t: f64) -> OtocPoint {
        self.evaluate_batch(&[t])[0]
    }

    /// Correlators at every time in `times` (any order, any sign).
    pub fn evaluate(&self, times: &[f64]) -> Vec<OtocPoint> {
        let mut out = Vec::with_capacity(times.len());
        for chunk in times.chunks(BATCH) {
            out.extend(self.evaluate_batch(chunk));
        }
        out
    }

    /// Streams `Re F` over `grid` into a trapezoidal mean without storing the series.
    pub fn long_time_average(&self, grid: &TimeGrid) -> Result<LongTimeAverage> {
        let times = grid.times();
        let mut acc = TrapezoidMean::new(times[0], grid.t_max());
        for chunk in times.chunks(BATCH) {
            for p in self.evaluate_batch(chunk) {
                acc.push(p.t, p.f.re);
            }
        }
        acc.finish()
    }

    fn evaluate_batch(&self, times: &[f64]) -> Vec<OtocPoint> {
        let d = self.dim();
        let nb = times.len();
        let phases: Vec<Vec<Complex64>> = times
            .iter()
            .map(|&t| {
                self.energies
                    .iter()
                    .map(|&e| Complex64::from_polar(1.0, e * t))
                    .collect()
            })
            .collect();

        // Columns per time: Re/Im of conj(z) psi and conj(z) phi.
        let mut x = Array2::<f64>::zeros((d, 4 * nb));
        for k in 0..d {
            let mut row = x.row_mut(k);
            for (j, z) in phases.iter().enumerate() {
                let zc = z[k].conj();
                let p = zc * self.psi[k];
                let q = zc * self.phi[k];
                row[4 * j] = p.re;
                row[4 * j + 1] = p.im;
                row[4 * j + 2] = q.re;
                row[4 * j + 3] = q.im;
            }
        }
        let mut y = Array2::<f64>::zeros((d, 4 * nb));
        general_mat_mul(1.0, &self.w, &x, 0.0, &mut y);

        // a = z (W conj(z) psi), b = z (W conj(z) phi)
        let mut a = vec![vec![Complex64::default(); d]; nb];
        let mut b = vec![vec![Complex64::default(); d]; nb];
        let mut xa = Array2::<f64>::zeros((d, 2 * nb));
        for k in 0..d {
            let row = y.row(k);
            for (j, z) in phases.iter().enumerate() {
                let ak = z[k] * Complex64::new(row[4 * j], row[4 * j + 1]);
                let bk = z[k] * Complex64::new(row[4 * j + 2], row[4 * j + 3]);
                a[j][k] = ak;
                b[j][k] = bk;
                xa[[k, 2 * j]] = ak.re;
                xa[[k, 2 * j + 1]] = ak.im;
            }
        }
        let mut wa = Array2::<f64>::zeros((d, 2 * nb));
        general_mat_mul(1.0, &self.w, &xa, 0.0, &mut wa);

        (0..nb)
            .map(|j| {
                let mut f = Complex64::default();
                let mut a_norm = 0.0;
                let mut b_norm = 0.0;
                let mut c = 0.0;
                for k in 0..d {
                    let wak = Complex64::new(wa[[k, 2 * j]], wa[[k, 2 * j + 1]]);
                    let bk = b[j][k];
                    f += wak.conj() * bk;
                    a_norm += bk.norm_sqr();
                    b_norm += wak.norm_sqr();
                    c += (bk - wak).norm_sqr();
                }
                OtocPoint {
                    t: times[j],
                    f,
                    a: Complex64::new(a_norm, 0.0),
                    b: b_norm,
                    c,
                }
            })
            .collect()
    }
}

fn scaled_sx_in(params: LmgParams, dec: &EigenDecomposition) -> Array2<f64> {
    let sector = params.sector();
    let w = sx(sector, Basis::X).scaled(1.0 / sector.spin());
    let t = dec.to_eigenbasis(w.matrix());
    (&t + &t.t()) * 0.5
}

fn check_grid(grid: &TimeGrid) -> Result<()> {
    if grid.times()[0] != 0.0 {
        return Err(Error::InvalidGrid("grid must start at t = 0".into()));
    }
    Ok(())
}

/// `F(t)` after the quench `H(alpha) -> H(alpha) + lambda S_z` from the ground state.
pub fn quench_otoc(spec: QuenchSpec, grid: &TimeGrid) -> Result<OtocSeries> {
    check_grid(grid)?;
    let probe = OtocProbe::quench(spec)?;
    Ok(OtocSeries::from_points(
        &probe.evaluate(grid.times()),
        Protocol::Quench(spec),
    ))
}

/// `C(t)` and `A(t)` for the quench protocol.
pub fn commutator_series(spec: QuenchSpec, grid: &TimeGrid) -> Result<CommutatorSeries> {
    check_grid(grid)?;
    let probe = OtocProbe::quench(spec)?;
    Ok(CommutatorSeries::from_points(&probe.evaluate(grid.times())))
}

/// Both the OTOC and the commutator series from one pass.
pub fn quench_trace(spec: QuenchSpec, grid: &TimeGrid) -> Result<(OtocSeries, CommutatorSeries)> {
    check_grid(grid)?;
    let probe = OtocProbe::quench(spec)?;
    let pts = probe.evaluate(grid.times());
    Ok((
        OtocSeries::from_points(&pts, Protocol::Quench(spec)),
        CommutatorSeries::from_points(&pts),
    ))
}

/// Microcanonical `F_n(t)` in eigenstate `level` of `H(alpha)`.
pub fn micro_otoc(params: LmgParams, level: usize, grid: &TimeGrid) -> Result<OtocSeries> {
    check_grid(grid)?;
    let probe = OtocProbe::microcanonical(params, level)?;
    Ok(OtocSeries::from_points(
        &probe.evaluate(grid.times()),
        Protocol::Microcanonical { params, level },
    ))
}

/// Long-time average after a quench, streamed.
pub fn quench_long_time_average(spec: QuenchSpec, grid: &TimeGrid) -> Result<LongTimeAverage> {
    check_grid(grid)?;
    OtocProbe::quench(spec)?.long_time_average(grid)
}

/// Evaluates `F_n(t)` for every level at once. Per time point this costs one
/// `(2D x D) (D x D)` product: with `Y = W Phi* W` (complex symmetric),
/// `F_n(t) = z_n sum_c z_c Y_nc^2`.
#[derive(Debug, Clone)]
pub struct MicrocanonicalEnsemble {
    params: LmgParams,
    energies: Array1<f64>,
    w: Array2<f64>,
}

impl MicrocanonicalEnsemble {
    pub fn new(params: LmgParams) -> Result<Self> {
        let dec = eigh(&hamiltonian(params, Basis::X))?;
        let w = scaled_sx_in(params, &dec);
        Ok(Self {
            params,
            energies: dec.values().clone(),
            w,
        })
    }

    pub fn params(&self) -> LmgParams {
        self.params
    }

    pub fn energies(&self) -> &Array1<f64> {
        &self.energies
    }

    pub fn operator(&self) -> &Array2<f64> {
        &self.w
    }

    /// `F_n(t)` for all `n`.
    pub fn values_at(&self, t: f64) -> Vec<Complex64> {
        let (mut stacked, mut product) = self.buffers();
        self.values_into(t, &mut stacked, &mut product)
    }

    fn values_into(&self, t: f64, stacked: &mut Array2<f64>, product: &mut Array2<f64>) -> Vec<Complex64> {
        let d = self.energies.len();
        let z: Vec<Complex64> = self
            .energies
            .iter()
            .map(|&e| Complex64::from_polar(1.0, e * t))
            .collect();
        // [W diag(cos); W diag(sin)]
        for n in 0..d {
            let wrow = self.w.row(n);
            let mut top = stacked.row_mut(n);
            for (b, (dst, &wv)) in top.iter_mut().zip(wrow.iter()).enumerate() {
                *dst = wv * z[b].re;
            }
            let mut bottom = stacked.row_mut(n + d);
            for (b, (dst, &wv)) in bottom.iter_mut().zip(wrow.iter()).enumerate() {
                *dst = wv * z[b].im;
            }
        }
        general_mat_mul(1.0, &*stacked, &self.w, 0.0, product);
        let (re, neg_im) = product.view().split_at(Axis(0), d);
        (0..d)
            .map(|n| {
                let mut acc = Complex64::default();
                for (c, (&yr, &yi)) in re.row(n).iter().zip(neg_im.row(n).iter()).enumerate() {
                    let y = Complex64::new(yr, -yi);
                    acc += z[c] * y * y;
                }
                z[n] * acc
            })
            .collect()
    }

    fn buffers(&self) -> (Array2<f64>, Array2<f64>) {
        let d = self.energies.len();
        (Array2::zeros((2 * d, d)), Array2::zeros((2 * d, d)))
    }

    /// Every level's series over `grid`.
    pub fn series(&self, grid: &TimeGrid) -> Result<Vec<OtocSeries>> {
        check_grid(grid)?;
        let d = self.energies.len();
        let (mut stacked, mut product) = self.buffers();
        let mut values = vec![Vec::with_capacity(grid.len()); d];
        for &t in grid.times() {
            for (n, f) in self.values_into(t, &mut stacked, &mut product).into_iter().enumerate() {
                values[n].push(f);
            }
        }
        Ok(values
            .into_iter()
            .enumerate()
            .map(|(level, values)| {
                let protocol = Protocol::Microcanonical {
                    params: self.params,
                    level,
                };
                OtocSeries {
                    times: grid.times().to_vec(),
                    values,
                    protocol,
                    state_label: protocol.state_label(),
                }
            })
            .collect())
    }

    /// Every level's long-time average over `grid`, streamed.
    pub fn long_time_averages(&self, grid: &TimeGrid) -> Result<Vec<LongTimeAverage>> {
        check_grid(grid)?;
        let d = self.energies.len();
        let (mut stacked, mut product) = self.buffers();
        let mut accs = vec![TrapezoidMean::new(0.0, grid.t_max()); d];
        for &t in grid.times() {
            for (acc, f) in accs.iter_mut().zip(self.values_into(t, &mut stacked, &mut product)) {
                acc.push(t, f.re);
            }
        }
        accs.iter().map(TrapezoidMean::finish).collect()
    }
}

/// `F_n(t)` for every level of `H(alpha)`.
pub fn micro_otoc_all(params: LmgParams, grid: &TimeGrid) -> Result<Vec<OtocSeries>> {
    MicrocanonicalEnsemble::new(params)?.series(grid)
}

/// Infinite-time average of `Re F` from the stationary terms of the spectral
/// expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalEnsemble {
    pub value: f64,
    /// Adjacent level pairs with `tol <= gap < 2 pi / reference_time`: a finite
    /// average over `reference_time` cannot resolve them, so it may differ from
    /// the infinite-time value.
    pub unresolved_gaps: usize,
    pub tolerance: f64,
    pub reference_time: f64,
}

/// Sum of `psi_a W_ab W_bc W_cd phi_d` over all index quadruples with
/// `|E_a - E_b + E_c - E_d| < tol`.
///
/// Pair frequencies are sorted once so that matching pairs are found by
/// binary search: the cost is `O(D^2 log D)` plus the number of stationary
/// terms, which is `O(D^2)` for a nondegenerate spectrum.
pub fn diagonal_ensemble_average(probe: &OtocProbe, tol: f64, reference_time: f64) -> DiagonalEnsemble {
    let e = probe.energies();
    let w = probe.operator();
    let psi = probe.state();
    let phi = &probe.phi;
    let d = e.len();

    // (omega_cd, c, d) with W_cd phi_d != 0
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(d * d);
    for c in 0..d {
        for dd in 0..d {
            if w[[c, dd]] != 0.0 && phi[dd] != 0.0 {
                pairs.push((e[c] - e[dd], c, dd));
            }
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    let mut total = 0.0;
    for a in 0..d {
        if psi[a] == 0.0 {
            continue;
        }
        for b in 0..d {
            let lead = psi[a] * w[[a, b]];
            if lead == 0.0 {
                continue;
            }
            let target = -(e[a] - e[b]);
            let lo = pairs.partition_point(|p| p.0 <= target - tol);
            let mut inner = 0.0;
            for &(omega, c, dd) in &pairs[lo..] {
                if omega >= target + tol {
                    break;
                }
                inner += w[[b, c]] * w[[c, dd]] * phi[dd];
            }
            total += lead * inner;
        }
    }

    let resolution = 2.0 * std::f64::consts::PI / reference_time;
    let unresolved = e
        .windows(2)
        .into_iter()
        .filter(|p| {
            let gap = p[1] - p[0];
            gap >= tol && gap < resolution
        })
        .count();
    if unresolved > 0 {
        log::warn!(
            "{unresolved} level gaps lie between {tol:e} and 2pi/T = {resolution:e}; \
             a finite-time average over T = {reference_time} may differ from the infinite-time value"
        );
    }
    DiagonalEnsemble {
        value: total,
        unresolved_gaps: unresolved,
        tolerance: tol,
        reference_time,
    }
}

/// Fourth moment `<psi| W^4 |psi>`, the `t = 0` value of `F`.
pub fn fourth_moment(probe: &OtocProbe) -> f64 {
    let w = probe.operator();
    let w2psi: Array1<f64> = w.dot(&probe.phi);
    w2psi.dot(&w2psi)
}

/// Re-expresses a probe in the basis `rotation^T (...) rotation`. With an
/// orthogonal `rotation` that only mixes degenerate levels the correlators
/// must not change.
pub fn rotate_eigenbasis(probe: &OtocProbe, rotation: &Array2<f64>) -> Result<OtocProbe> {
    let w = rotation.t().dot(probe.operator()).dot(rotation);
    let psi = rotation.t().dot(probe.state());
    OtocProbe::from_parts(probe.energies().clone(), (&w + &w.t()) * 0.5, psi)
}
