use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use lmg_otoc::analysis::{
    fit_power_law, gamma_epsilon_from_scan, log_spaced_offsets, microcanonical_scan,
    quench_sweep_with_store, scaling_gamma_lambda_with_store, scaling_mu_with_store, AveragingConfig,
    FitWindow, ScalingResult, DEFAULT_FIT_WINDOW,
};
use lmg_otoc::eigen::eigh;
use lmg_otoc::lmg::{
    critical_lambda, postquench_hamiltonian, EnergyScale, LmgParams, QuenchSpec, CRITICAL_ENERGY,
};
use lmg_otoc::otoc::{
    OtocPoint, OtocProbe, TimeGrid, AVERAGE_DT, AVERAGE_T, DYNAMICS_DT,
};
use lmg_otoc::spin::Basis;
use serde_json::json;

use crate::config::{ConfigFile, NumList, Resolver, Window};
use crate::run::{default_dir, Checkpoint, GridSpec, RunDir, CHECKPOINT};
use crate::table::{col, svg_plot, Cell, ResultTable};
use crate::UsageError;

/// Options shared by every subcommand.
pub struct Common {
    pub config: ConfigFile,
    pub out: Option<PathBuf>,
    pub svg: bool,
}

fn open_dir(common: &Common, command: &str, r: &Resolver) -> Result<RunDir> {
    let path = common.out.clone().unwrap_or_else(|| default_dir(command, &r.record));
    RunDir::create(path)
}

fn averaging(r: &mut Resolver, tavg: Option<f64>, dt: Option<f64>) -> Result<(AveragingConfig, GridSpec)> {
    let cfg = AveragingConfig {
        total_time: r.value("tavg", tavg, AVERAGE_T)?,
        dt: r.value("dt", dt, AVERAGE_DT)?,
    };
    let grid = cfg.grid()?;
    Ok((
        cfg,
        GridSpec {
            t_max: grid.t_max(),
            dt: cfg.dt,
            samples: grid.len(),
        },
    ))
}

fn sizes_from(list: &NumList) -> Result<Vec<u32>, UsageError> {
    list.0
        .iter()
        .map(|&v| {
            if v >= 1.0 && v.fract() == 0.0 && v <= f64::from(u32::MAX) {
                Ok(v as u32)
            } else {
                Err(UsageError(format!("system size {v} is not a positive integer")))
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Number of spins N (dimension N + 1).
    #[arg(long)]
    pub n: Option<u32>,
    /// Control parameter alpha in [0, 1].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Optional longitudinal field: diagonalize H + lambda S_z instead.
    #[arg(long)]
    pub lambda: Option<f64>,
}

pub fn spectrum(args: SpectrumArgs, common: &Common) -> Result<PathBuf> {
    let mut r = Resolver::new(&common.config);
    let n = r.required("n", args.n)?;
    let alpha = r.required("alpha", args.alpha)?;
    let lambda = r.value("lambda", args.lambda, 0.0)?;
    let spec = QuenchSpec::new(LmgParams::new(alpha, n)?, lambda)?;
    let dec = eigh(&postquench_hamiltonian(spec, Basis::X))?;
    let energies = dec.values().to_vec();
    let scale = EnergyScale::from_spectrum(&energies)?;

    let mut table = ResultTable::new(vec![
        col("n", "1"),
        col("energy", "J"),
        col("energy_per_spin", "J"),
        col("eps_rescaled", "1"),
    ]);
    let nf = f64::from(n);
    for (k, &e) in energies.iter().enumerate() {
        table.push(vec![k.into(), e.into(), (e / nf).into(), scale.rescale(e).0.into()]);
    }

    let mut dir = open_dir(common, "spectrum", &r)?;
    dir.write("spectrum.csv", &table.to_csv()?)?;
    dir.write("spectrum.dat", &table.line_dat("n", "energy_per_spin")?)?;
    if common.svg {
        let title = format!("Spectrum, N = {n}, alpha = {alpha}, lambda = {lambda}");
        dir.write("spectrum.svg", &table.line_svg("n", &["energy_per_spin"], &title)?)?;
    }
    let diagnostics = json!({
        "dimension": energies.len(),
        "ground_energy": scale.ground(),
        "max_energy": scale.max(),
        "critical_level": lmg_otoc::analysis::closest_level(&energies, CRITICAL_ENERGY),
        "critical_rescaled_energy": scale.critical().0,
        "orthonormality_error": dec.orthonormality_error(),
    });
    dir.finish("spectrum", &r.record, None, diagnostics)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    /// Ground state of H(alpha), evolved with H + lambda S_z.
    Ground,
    /// Eigenstate --level of H(alpha), evolved with H(alpha).
    Level,
}

impl std::fmt::Display for StateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StateKind::Ground => "ground",
            StateKind::Level => "level",
        })
    }
}

impl std::str::FromStr for StateKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <StateKind as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args)]
pub struct OtocArgs {
    /// Number of spins N.
    #[arg(long)]
    pub n: Option<u32>,
    /// Control parameter alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Quench strength (ground-state protocol only).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Last sample time.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Sampling step [default: 0.05].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Initial state [default: ground].
    #[arg(long, value_enum)]
    pub state: Option<StateKind>,
    /// Level index for --state level (0 = ground state of H(alpha)).
    #[arg(long)]
    pub level: Option<usize>,
}

fn otoc_table(points: &[OtocPoint]) -> ResultTable {
    let mut table = ResultTable::new(vec![
        col("t", "1/J"),
        col("re_f", "1"),
        col("im_f", "1"),
        col("c", "1"),
        col("re_a", "1"),
        col("b", "1"),
    ]);
    for p in points {
        table.push(vec![p.t.into(), p.f.re.into(), p.f.im.into(), p.c.into(), p.a.re.into(), p.b.into()]);
    }
    table
}

pub fn otoc(args: OtocArgs, common: &Common) -> Result<PathBuf> {
    let mut r = Resolver::new(&common.config);
    let n = r.required("n", args.n)?;
    let alpha = r.required("alpha", args.alpha)?;
    let tmax = r.required("tmax", args.tmax)?;
    let dt = r.value("dt", args.dt, DYNAMICS_DT)?;
    let state = r.value("state", args.state, StateKind::Ground)?;
    let params = LmgParams::new(alpha, n)?;
    let grid = TimeGrid::uniform(tmax, dt)?;

    let (probe, label) = match state {
        StateKind::Ground => {
            let lambda = r.required("lambda", args.lambda)?;
            if r.optional::<usize>("level", args.level)?.is_some() {
                return Err(UsageError("--level only applies to --state level".into()).into());
            }
            let spec = QuenchSpec::new(params, lambda)?;
            (OtocProbe::quench(spec)?, format!("quench lambda = {lambda}"))
        }
        StateKind::Level => {
            let level = r.required("level", args.level)?;
            if r.optional::<f64>("lambda", args.lambda)?.is_some_and(|l| l != 0.0) {
                return Err(UsageError("--lambda must be absent or 0 for --state level".into()).into());
            }
            (OtocProbe::microcanonical(params, level)?, format!("eigenstate n = {level}"))
        }
    };
    let points = probe.evaluate(grid.times());
    let table = otoc_table(&points);

    let mut dir = open_dir(common, "otoc", &r)?;
    dir.write("otoc.csv", &table.to_csv()?)?;
    dir.write("otoc.dat", &table.line_dat("t", "re_f")?)?;
    if common.svg {
        let title = format!("OTOC, N = {n}, alpha = {alpha}, {label}");
        dir.write("otoc.svg", &table.line_svg("t", &["re_f", "im_f"], &title)?)?;
        dir.write("commutator.svg", &table.line_svg("t", &["c"], &title)?)?;
    }
    let max_re = points.iter().fold(0.0f64, |m, p| m.max(p.f.re.abs()));
    let max_im = points.iter().fold(0.0f64, |m, p| m.max(p.f.im.abs()));
    let identity = points
        .iter()
        .fold(0.0f64, |m, p| m.max((p.c - (p.a.re + p.b - 2.0 * p.f.re)).abs()));
    let symmetric_identity = points
        .iter()
        .fold(0.0f64, |m, p| m.max((p.c - (2.0 * p.a.re - 2.0 * p.f.re)).abs()));
    let diagnostics = json!({
        "state": probe_label(state),
        "max_abs_re_f": max_re,
        "max_abs_im_f": max_im,
        "im_to_re_ratio": if max_re > 0.0 { max_im / max_re } else { 0.0 },
        "min_re_f": points.iter().map(|p| p.f.re).fold(f64::INFINITY, f64::min),
        "max_residual_c_eq_a_plus_b_minus_2re_f": identity,
        "max_residual_c_eq_2re_a_minus_2re_f": symmetric_identity,
    });
    let spec = GridSpec {
        t_max: grid.t_max(),
        dt,
        samples: grid.len(),
    };
    dir.finish("otoc", &r.record, Some(spec), diagnostics)
}

fn probe_label(state: StateKind) -> &'static str {
    match state {
        StateKind::Ground => "ground state of H(alpha) evolved with H + lambda S_z",
        StateKind::Level => "eigenstate of H(alpha) evolved with H(alpha)",
    }
}

// ---------------------------------------------------------------------------

#[derive(Debug, Args)]
pub struct MicroArgs {
    /// Number of spins N.
    #[arg(long)]
    pub n: Option<u32>,
    /// Control parameter alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Averaging time T [default: 10000].
    #[arg(long)]
    pub tavg: Option<f64>,
    /// Averaging step [default: 0.5].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Also compute D_n for these sizes, e.g. 100,200,300.
    #[arg(long)]
    pub sizes: Option<NumList>,
}

pub fn micro(args: MicroArgs, common: &Common) -> Result<PathBuf> {
    let mut r = Resolver::new(&common.config);
    let n = r.required("n", args.n)?;
    let alpha = r.required("alpha", args.alpha)?;
    let (cfg, grid) = averaging(&mut r, args.tavg, args.dt)?;
    let sizes = r.optional("sizes", args.sizes)?.map(|s| sizes_from(&s)).transpose()?;
    let params = LmgParams::new(alpha, n)?;

    let scan = microcanonical_scan(params, cfg)?;
    let mut table = ResultTable::new(vec![
        col("n", "1"),
        col("energy_per_spin", "J"),
        col("eps_rescaled", "1"),
        col("fbar_raw", "1"),
        col("fbar_norm", "1"),
        col("halfwidth", "1"),
    ]);
    let nf = f64::from(n);
    for k in 0..scan.len() {
        table.push(vec![
            k.into(),
            (scan.energies[k] / nf).into(),
            scan.rescaled[k].into(),
            scan.averages[k].value.into(),
            scan.normalized[k].into(),
            scan.averages[k].estimator_halfwidth.into(),
        ]);
    }

    let mut dir = open_dir(common, "micro", &r)?;
    dir.write("micro.csv", &table.to_csv()?)?;
    dir.write("micro.dat", &table.line_dat("eps_rescaled", "fbar_norm")?)?;
    if common.svg {
        let title = format!("Microcanonical long-time OTOC, N = {n}, alpha = {alpha}");
        dir.write("micro.svg", &table.line_svg("eps_rescaled", &["fbar_norm"], &title)?)?;
    }

    let mut dn_rows = Vec::new();
    if let Some(sizes) = sizes {
        let mut dn = ResultTable::new(vec![
            col("n_spins", "1"),
            col("critical_level", "1"),
            col("window_lo", "1"),
            col("window_hi", "1"),
            col("dn", "1"),
        ]);
        for size in sizes {
            let d = if size == n {
                scan.dn()
            } else {
                microcanonical_scan(LmgParams::new(alpha, size)?, cfg)?.dn()
            };
            dn.push(vec![size.into(), d.critical_level.into(), d.window.0.into(), d.window.1.into(), d.value.into()]);
            dn_rows.push(json!({ "n_spins": size, "dn": d.value }));
        }
        dir.write("dn.csv", &dn.to_csv()?)?;
    }

    let sep = scan.phase_separation(0.2);
    let max_hw = scan.averages.iter().fold(0.0f64, |m, a| m.max(a.estimator_halfwidth));
    let diagnostics = json!({
        "critical_level": scan.critical_level,
        "critical_rescaled_energy": scan.critical_rescaled,
        "ground_reference": scan.averages[0].value,
        "max_halfwidth": max_hw,
        "dn": scan.dn().value,
        "lowest_band_mean": sep.low_mean,
        "band_above_critical_mean": sep.above_mean,
        "dn_sizes": dn_rows,
    });
    dir.finish("micro", &r.record, Some(grid), diagnostics)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// 21 x 21 grid, alpha in [0.05, 0.75], lambda in [0, 2.5], N = 200.
    Heatmap,
    /// The same grid at N = 400 (slow: about 5 s per cell on one core).
    HeatmapN400,
    /// alpha = 0.2 and 0.4, 26 fields in [0, 2.5], N = 400.
    Cuts,
}

impl std::fmt::Display for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

impl std::str::FromStr for Preset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Preset as ValueEnum>::from_str(s, true)
    }
}

impl Preset {
    fn defaults(self) -> (NumList, NumList, u32) {
        let heat_alpha = NumList("0.05:0.75:21".parse::<NumList>().expect("literal").0);
        let heat_lambda = NumList("0:2.5:21".parse::<NumList>().expect("literal").0);
        match self {
            Preset::Heatmap => (heat_alpha, heat_lambda, 200),
            Preset::HeatmapN400 => (heat_alpha, heat_lambda, 400),
            Preset::Cuts => (NumList(vec![0.2, 0.4]), "0:2.5:26".parse().expect("literal"), 400),
        }
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// alpha values: a,b,c or start:stop:count.
    #[arg(long)]
    pub alphas: Option<NumList>,
    /// lambda values: a,b,c or start:stop:count.
    #[arg(long)]
    pub lambdas: Option<NumList>,
    /// Number of spins N.
    #[arg(long)]
    pub n: Option<u32>,
    /// Averaging time T.
    #[arg(long)]
    pub tavg: Option<f64>,
    /// Averaging step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Grid used for anything not set by flags or the config file.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
}

pub fn sweep(args: SweepArgs, common: &Common) -> Result<PathBuf> {
    let mut r = Resolver::new(&common.config);
    let preset = r.value("preset", args.preset, Preset::Heatmap)?;
    let (pa, pl, pn) = preset.defaults();
    let alphas = r.value("alphas", args.alphas, pa)?.0;
    let lambdas = r.value("lambdas", args.lambdas, pl)?.0;
    let n = r.value("n", args.n, pn)?;
    let (cfg, grid) = averaging(&mut r, args.tavg, args.dt)?;

    let mut dir = open_dir(common, "sweep", &r)?;
    let checkpoint = Checkpoint::open(&dir.path().join(CHECKPOINT))?;
    dir.note(CHECKPOINT);
    let result = quench_sweep_with_store(&alphas, &lambdas, n, cfg, &checkpoint)?;

    let mut table = ResultTable::new(vec![
        col("alpha", "1"),
        col("lambda", "J"),
        col("fbar_raw", "1"),
        col("fbar_norm", "1"),
        col("halfwidth", "1"),
        col("flagged", "bool"),
        col("lambda_c", "J"),
    ]);
    let mut curves = Vec::new();
    let mut failed = Vec::new();
    for row in &result.rows {
        if let Some(e) = &row.error {
            log::warn!("alpha = {}: {e}; row skipped", row.alpha);
            failed.push(json!({ "alpha": row.alpha, "error": e }));
            continue;
        }
        for c in &row.cells {
            table.push(vec![
                row.alpha.into(),
                c.lambda.into(),
                c.average.raw.value.into(),
                c.average.value.into(),
                c.average.raw.estimator_halfwidth.into(),
                c.flagged.into(),
                row.critical_lambda.into(),
            ]);
        }
        curves.push((
            format!("alpha={}", row.alpha),
            row.cells.iter().map(|c| (c.lambda, c.average.value)).collect::<Vec<_>>(),
        ));
    }
    dir.write("sweep.csv", &table.to_csv()?)?;
    dir.write("sweep.dat", &table.heatmap_dat("alpha", "lambda", "fbar_norm")?)?;
    if common.svg && lambdas.len() > 1 && !curves.is_empty() {
        let series: Vec<(&str, Vec<(f64, f64)>)> = curves.iter().map(|(l, p)| (l.as_str(), p.clone())).collect();
        let title = format!("Normalized long-time OTOC, N = {n}");
        dir.write("sweep.svg", &svg_plot(&series, "lambda [J]", "fbar_norm", &title))?;
    }
    let flagged = result.rows.iter().flat_map(|r| &r.cells).filter(|c| c.flagged).count();
    let diagnostics = json!({
        "cells": result.rows.iter().map(|r| r.cells.len()).sum::<usize>(),
        "flagged_cells": flagged,
        "resumed_cells": checkpoint.resumed,
        "failed_rows": failed,
        "max_halfwidth": result.rows.iter().flat_map(|r| &r.cells)
            .fold(0.0f64, |m, c| m.max(c.average.raw.estimator_halfwidth)),
    });
    drop(checkpoint);
    dir.finish("sweep", &r.record, Some(grid), diagnostics)
}

// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitKind {
    /// F-bar(lambda_c) against N.
    Mu,
    /// Normalized F-bar against |lambda - lambda_c| below lambda_c.
    GammaLambda,
    /// Normalized F-bar_n against |eps_n - eps_c| below eps_c.
    GammaEpsilon,
}

impl std::fmt::Display for FitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

impl std::str::FromStr for FitKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <FitKind as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Which exponent to fit.
    #[arg(long, value_enum)]
    pub kind: Option<FitKind>,
    /// Control parameter alpha.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// System size for the gamma fits [default: 400 for gamma-lambda, 300 for gamma-epsilon].
    #[arg(long)]
    pub n: Option<u32>,
    /// System sizes for mu [default: 100,200,300,400].
    #[arg(long)]
    pub sizes: Option<NumList>,
    /// Window min:max on |x| [default: 0.02:0.3; all points for mu].
    #[arg(long)]
    pub window: Option<Window>,
    /// Number of log-spaced offsets below lambda_c [default: 10].
    #[arg(long)]
    pub points: Option<usize>,
    /// Averaging time T.
    #[arg(long)]
    pub tavg: Option<f64>,
    /// Averaging step.
    #[arg(long)]
    pub dt: Option<f64>,
}

pub fn fit(args: FitArgs, common: &Common) -> Result<PathBuf> {
    let mut r = Resolver::new(&common.config);
    let kind = r.required("kind", args.kind)?;
    let alpha = r.required("alpha", args.alpha)?;
    let (cfg, grid) = averaging(&mut r, args.tavg, args.dt)?;
    let default_window = match kind {
        FitKind::Mu => Window(0.0, f64::INFINITY),
        _ => Window(DEFAULT_FIT_WINDOW.min, DEFAULT_FIT_WINDOW.max),
    };
    let w = r.value("window", args.window, default_window)?;
    let window = FitWindow { min: w.0, max: w.1 };

    let mut dir_pending = None;
    let result: ScalingResult = match kind {
        FitKind::Mu => {
            let sizes = r.value("sizes", args.sizes, NumList(vec![100.0, 200.0, 300.0, 400.0]))?;
            let sizes = sizes_from(&sizes)?;
            critical_lambda(alpha)?;
            let mut dir = open_dir(common, "fit", &r)?;
            let cp = Checkpoint::open(&dir.path().join(CHECKPOINT))?;
            dir.note(CHECKPOINT);
            let mut res = scaling_mu_with_store(alpha, &sizes, cfg, &cp)?;
            if window != FitWindow::ALL {
                let f = fit_power_law(&res.points, window)?;
                res.exponent = -f.exponent;
                res.exponent_stderr = f.exponent_stderr;
                res.fit = f;
            }
            dir_pending = Some(dir);
            res
        }
        FitKind::GammaLambda => {
            let n = r.value("n", args.n, 400)?;
            let count = r.value("points", args.points, 10)?;
            if count < 3 {
                return Err(UsageError("--points must be at least 3".into()).into());
            }
            critical_lambda(alpha)?;
            let mut dir = open_dir(common, "fit", &r)?;
            let cp = Checkpoint::open(&dir.path().join(CHECKPOINT))?;
            dir.note(CHECKPOINT);
            let sample = if window.max.is_finite() && window.min > 0.0 { window } else { DEFAULT_FIT_WINDOW };
            let offsets = log_spaced_offsets(sample, count);
            let res = scaling_gamma_lambda_with_store(alpha, n, &offsets, window, cfg, &cp)?;
            dir_pending = Some(dir);
            res
        }
        FitKind::GammaEpsilon => {
            let n = r.value("n", args.n, 300)?;
            let scan = microcanonical_scan(LmgParams::new(alpha, n)?, cfg)?;
            gamma_epsilon_from_scan(&scan, window)?
        }
    };
    let mut dir = match dir_pending {
        Some(d) => d,
        None => open_dir(common, "fit", &r)?,
    };

    let (xname, yname) = match kind {
        FitKind::Mu => ("n_spins", "fbar_raw"),
        FitKind::GammaLambda => ("abs_lambda_offset", "fbar_norm"),
        FitKind::GammaEpsilon => ("abs_eps_offset", "fbar_norm"),
    };
    let mut table = ResultTable::new(vec![col(xname, if kind == FitKind::GammaLambda { "J" } else { "1" }), col(yname, "1"), col("used", "bool")]);
    let mut used_pts = Vec::new();
    for &(x, y) in &result.points {
        let used = x != 0.0 && y > 0.0 && window.contains(x);
        if used {
            used_pts.push((x.abs().log10(), y.log10()));
        }
        table.push(vec![x.into(), y.into(), Cell::from(used)]);
    }
    dir.write("points.csv", &table.to_csv()?)?;
    dir.write("fit.json", &(serde_json::to_string_pretty(&result)? + "\n"))?;
    if common.svg && !used_pts.is_empty() {
        let f = result.fit;
        let (a, b) = (result.fit.window.0.log10(), result.fit.window.1.log10());
        let line = vec![
            (a, f.amplitude.log10() + f.exponent * a),
            (b, f.amplitude.log10() + f.exponent * b),
        ];
        let title = format!("{kind} fit, alpha = {alpha}: exponent {:.4} +- {:.4}", result.exponent, result.exponent_stderr);
        let svg = svg_plot(&[("data", used_pts), ("fit", line)], &format!("log10 {xname}"), &format!("log10 {yname}"), &title);
        dir.write("fit.svg", &svg)?;
    }
    let diagnostics = json!({
        "exponent": result.exponent,
        "exponent_stderr": result.exponent_stderr,
        "points_used": result.fit.n_points,
        "fit_window": [result.fit.window.0, result.fit.window.1],
    });
    dir.finish("fit", &r.record, Some(grid), diagnostics)
}
