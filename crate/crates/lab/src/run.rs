//! Experiment orchestration: one function per kind, all writing into the
//! output directory and returning an [`Outcome`].

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use kolmo_core::lab::{fit_spectral_constant, verify_interpolation, FitOptions, VerifyOptions};
use kolmo_core::propagator::{decay_bound, fd_solve, propagate_grid_with, tail_mass_mixture, DecayConstants, Guards};
use kolmo_core::telescope::{
    assemble_constants, cobs_scaling_audit, sequence_for, verify_observability, TimeQuadrature, TimeSet,
};
use kolmo_core::thickness::{check_thickness, grid_mask, minimal_delta};
use kolmo_core::{Complex64, FourierPlan, GaussianMixtureState, GaussianTerm, PhaseField, PhaseGrid};
use serde::Serialize;

use crate::config::{DataConfig, ExperimentConfig, ExperimentKind};
use crate::report::Table;
use crate::row;
use crate::snapshot::Snapshot;
use crate::svg::Chart;

/// Relative slack on norm monotonicity checks.
const MONOTONE_SLACK: f64 = 1e-12;
/// Absolute slack (relative to the initial spectral mass) on tail bounds.
const TAIL_SLACK: f64 = 1e-9;

#[derive(Debug)]
pub enum RunError {
    Io { path: PathBuf, source: std::io::Error },
    Config(String),
    Core(kolmo_core::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Io { .. } => 1,
            RunError::Config(_) => 2,
            RunError::Core(e) if e.is_numerical_guard() || matches!(e, kolmo_core::Error::ZeroRestrictedNorm) => 3,
            RunError::Core(_) => 2,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            RunError::Config(msg) => write!(f, "config error: {msg}"),
            RunError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<kolmo_core::Error> for RunError {
    fn from(e: kolmo_core::Error) -> Self {
        RunError::Core(e)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io { path: path.to_path_buf(), source }
}

/// What a finished run found.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Outcome {
    pub violations: usize,
    /// First violating instance, human readable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub outputs: Vec<String>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.violations > 0 {
            4
        } else {
            0
        }
    }

    fn flag(&mut self, witness: impl FnOnce() -> String) {
        if self.violations == 0 {
            self.witness = Some(witness());
        }
        self.violations += 1;
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    library: &'static str,
    version: &'static str,
    kind: &'static str,
    seed: u64,
    timestamp_unix: u64,
    operations: Vec<&'static str>,
    violations: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<&'a str>,
    outputs: &'a [String],
    constants: &'a BTreeMap<String, f64>,
    config: &'a ExperimentConfig,
}

struct Context<'a> {
    config: &'a ExperimentConfig,
    out: &'a Path,
    outcome: Outcome,
    operations: Vec<&'static str>,
    constants: BTreeMap<String, f64>,
}

impl Context<'_> {
    fn op(&mut self, name: &'static str) {
        if !self.operations.contains(&name) {
            self.operations.push(name);
        }
    }

    fn constant(&mut self, name: &str, value: f64) {
        self.constants.insert(name.to_string(), value);
    }

    fn write_table(&mut self, name: &str, table: &Table) -> Result<(), RunError> {
        let path = self.out.join(name);
        table.write(&path).map_err(io_err(&path))?;
        self.outcome.outputs.push(name.to_string());
        Ok(())
    }

    fn write_text(&mut self, name: &str, text: &str) -> Result<(), RunError> {
        let path = self.out.join(name);
        fs::write(&path, text).map_err(io_err(&path))?;
        self.outcome.outputs.push(name.to_string());
        Ok(())
    }

    fn write_snapshot(&mut self, name: &str, snapshot: &Snapshot) -> Result<(), RunError> {
        let path = self.out.join(name);
        snapshot.write(&path).map_err(io_err(&path))?;
        self.outcome.outputs.push(name.to_string());
        Ok(())
    }

    fn plot(&mut self, name: &str, chart: &Chart) -> Result<(), RunError> {
        if self.config.plots {
            self.write_text(name, &chart.render())?;
        }
        Ok(())
    }

    fn decay_constants(&mut self, d: usize) -> Result<DecayConstants, RunError> {
        let c = &self.config.constants;
        let explicit = DecayConstants::explicit(d);
        let k = DecayConstants::new(
            c.c_exponent.unwrap_or(explicit.c_exponent),
            c.c_pointwise.unwrap_or(explicit.c_pointwise),
            c.c3.unwrap_or(explicit.c3),
        )?;
        self.constant("c_exponent", k.c_exponent);
        self.constant("c_pointwise", k.c_pointwise);
        self.constant("C2", k.c2);
        self.constant("C3", k.c3);
        Ok(k)
    }

    fn verify_options(&self) -> VerifyOptions {
        let q = &self.config.quadrature;
        VerifyOptions { max_spacing: q.max_spacing, max_points: q.max_points, ..VerifyOptions::default() }
    }

    /// The configured `C1`, or a fit on the `[spectral]` grid.
    fn spectral_constant(&mut self, d: usize) -> Result<f64, RunError> {
        if let Some(c1) = self.config.constants.c1 {
            self.constant("C1", c1);
            return Ok(c1);
        }
        let report = self.fit(d)?;
        Ok(report.c1)
    }

    fn fit(&mut self, d: usize) -> Result<kolmo_core::lab::SpectralTestReport, RunError> {
        let s = &self.config.spectral;
        let grid = PhaseGrid::new(d, s.points, s.half_width)?;
        let plan = FourierPlan::new(grid);
        let options = FitOptions {
            random_samples: s.random_samples,
            random_bumps: s.random_bumps,
            lattice_spacing: s.lattice_spacing,
        };
        self.op("grid_mask");
        self.op("spectral_ratio");
        self.op("fit_spectral_constant");
        let report = fit_spectral_constant(&plan, &self.config.set, &s.n, &options, self.config.seed)?;
        self.constant("C1", report.c1);
        self.constant("fitted_C", report.fitted_c);
        self.constant("fitted_C_raw", report.fitted_c_raw);
        Ok(report)
    }
}

/// Initial data as closed-form mixtures.
pub fn mixtures(config: &ExperimentConfig) -> Result<Vec<GaussianMixtureState>, RunError> {
    match &config.data {
        DataConfig::Random { sets, terms, d } => (0..*sets)
            .map(|i| GaussianMixtureState::seeded(config.seed, i as u64 + 1, *d, *terms).map_err(RunError::from))
            .collect(),
        DataConfig::Mixture { d, terms } => {
            let n = 2 * d;
            let built = terms
                .iter()
                .map(|t| {
                    let amp = Complex64::new(t.amplitude[0], t.amplitude[1]);
                    let wave = t.wave.clone().unwrap_or_else(|| vec![0.0; n]);
                    let precision = match (&t.precision, t.width) {
                        (Some(p), _) => p.clone(),
                        (None, Some(w)) => {
                            let mut p = vec![0.0; n * n];
                            for a in 0..n {
                                p[a * n + a] = 1.0 / (w * w);
                            }
                            p
                        }
                        (None, None) => unreachable!("validated"),
                    };
                    GaussianTerm::from_phase_gaussian(amp, &t.center, &precision, &wave)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(vec![GaussianMixtureState::new(*d, built)?])
        }
        DataConfig::Snapshot { .. } => {
            Err(RunError::Config(format!("`{}` needs closed-form initial data, not a snapshot", config.kind.name())))
        }
    }
}

/// Run `config` into `out`, writing CSVs, optional plots and `manifest.toml`.
pub fn run(config: &ExperimentConfig, out: &Path) -> Result<Outcome, RunError> {
    config.validate().map_err(RunError::Config)?;
    fs::create_dir_all(out).map_err(io_err(out))?;
    let mut ctx =
        Context { config, out, outcome: Outcome::default(), operations: Vec::new(), constants: BTreeMap::new() };
    match config.kind {
        ExperimentKind::Propagate => propagate(&mut ctx)?,
        ExperimentKind::DecayCheck => decay_check(&mut ctx)?,
        ExperimentKind::Thickness => thickness(&mut ctx)?,
        ExperimentKind::SpectralFit => spectral_fit(&mut ctx)?,
        ExperimentKind::InterpVerify => interp_verify(&mut ctx)?,
        ExperimentKind::Telescope => telescope(&mut ctx)?,
    }
    let timestamp_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let mut outputs = ctx.outcome.outputs.clone();
    outputs.push("manifest.toml".into());
    let manifest = Manifest {
        library: "kolmo-core",
        version: env!("CARGO_PKG_VERSION"),
        kind: config.kind.name(),
        seed: config.seed,
        timestamp_unix,
        operations: ctx.operations.clone(),
        violations: ctx.outcome.violations,
        witness: ctx.outcome.witness.as_deref(),
        outputs: &outputs,
        constants: &ctx.constants,
        config,
    };
    let text = toml::to_string(&manifest).map_err(|e| RunError::Config(format!("manifest: {e}")))?;
    let path = out.join("manifest.toml");
    fs::write(&path, text).map_err(io_err(&path))?;
    ctx.outcome.outputs = outputs;
    Ok(ctx.outcome)
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

#[derive(Serialize)]
struct TrajectoryEntry {
    set: usize,
    t: f64,
    snapshot: Option<String>,
    norm: f64,
    boundary_fraction: f64,
}

#[derive(Serialize)]
struct Trajectory {
    grid: PhaseGrid,
    boundary_tolerance: Option<f64>,
    alias_tolerance: f64,
    entries: Vec<TrajectoryEntry>,
}

fn propagate(ctx: &mut Context) -> Result<(), RunError> {
    let config = ctx.config;
    let p = config.propagate;
    let guards = if p.periodic { Guards::periodic() } else { Guards::default() };
    let times = sorted(&config.time.t);
    let (grid, initial): (PhaseGrid, Vec<(PhaseField, Option<GaussianMixtureState>)>) = match &config.data {
        DataConfig::Snapshot { path } => {
            let snap = Snapshot::read(path).map_err(io_err(path))?;
            match snap {
                Snapshot::Phase(f) => (*f.grid(), vec![(f, None)]),
                _ => return Err(RunError::Config(format!("{}: expected a phase-field snapshot", path.display()))),
            }
        }
        _ => {
            let g = config.grid;
            let grid = PhaseGrid::new(g.d, g.points, g.half_width)?;
            let states = mixtures(config)?;
            if states[0].d() != grid.d() {
                return Err(RunError::Config(format!("data has d = {}, grid has d = {}", states[0].d(), grid.d())));
            }
            ctx.op("mixture_to_grid");
            let fields = states
                .into_iter()
                .map(|s| Ok((s.to_phase_field(&grid)?, Some(s))))
                .collect::<Result<Vec<_>, RunError>>()?;
            (grid, fields)
        }
    };
    let plan = FourierPlan::new(grid);
    let fine = if p.fd_steps > 0 && grid.d() == 1 {
        let g = PhaseGrid::new(1, 2 * grid.points_per_axis(), grid.half_width())?;
        Some(g)
    } else {
        None
    };
    let t_max = times.last().copied().unwrap_or(1.0);
    let mut table = Table::new(&[
        "set",
        "T",
        "norm",
        "grid_vs_mixture",
        "fd_error",
        "fd_error_refined",
        "fd_ratio",
        "boundary_fraction",
    ]);
    let mut entries = Vec::new();
    let mut chart = Chart::new("Propagated norm", "T", "‖g(T)‖");
    for (i, (f0, state)) in initial.iter().enumerate() {
        let mut previous = f0.l2_norm(None)?;
        let mut norms = vec![(0.0, previous)];
        if p.dump_snapshots {
            let name = format!("set{i}_t0.klfs");
            ctx.write_snapshot(&name, &Snapshot::Phase(f0.clone()))?;
            entries.push(TrajectoryEntry {
                set: i,
                t: 0.0,
                snapshot: Some(name),
                norm: previous,
                boundary_fraction: f0.boundary_energy_fraction(),
            });
        }
        for (k, &t) in times.iter().enumerate() {
            ctx.op("propagate_grid");
            let ft = propagate_grid_with(&plan, f0, t, &guards)?;
            let norm = ft.l2_norm(None)?;
            let mut vs_mixture = f64::NAN;
            let (mut fd_err, mut fd_fine, mut fd_ratio) = (f64::NAN, f64::NAN, f64::NAN);
            if let Some(s) = state {
                ctx.op("propagate_mixture");
                let exact = s.propagate(t)?;
                vs_mixture = ft.relative_error(&exact.to_phase_field(&grid)?)?;
                if let Some(fine_grid) = fine {
                    ctx.op("fd_solve");
                    let steps = ((p.fd_steps as f64 * t / t_max).ceil() as usize).max(1);
                    fd_err = fd_solve(f0, t, steps)?.relative_error(&exact.to_phase_field(&grid)?)?;
                    let f0_fine = s.to_phase_field(&fine_grid)?;
                    fd_fine = fd_solve(&f0_fine, t, 2 * steps)?.relative_error(&exact.to_phase_field(&fine_grid)?)?;
                    fd_ratio = fd_err / fd_fine;
                }
            }
            let boundary = ft.boundary_energy_fraction();
            if norm > previous * (1.0 + MONOTONE_SLACK) {
                ctx.outcome.flag(|| format!("set {i}: norm grows from {previous} to {norm} at T = {t}"));
            }
            previous = norm;
            norms.push((t, norm));
            table.push(row![i, t, norm, vs_mixture, fd_err, fd_fine, fd_ratio, boundary]);
            if p.dump_snapshots {
                let name = format!("set{i}_t{}.klfs", k + 1);
                ctx.write_snapshot(&name, &Snapshot::Phase(ft))?;
                entries.push(TrajectoryEntry { set: i, t, snapshot: Some(name), norm, boundary_fraction: boundary });
            }
        }
        chart.add(&format!("set {i}"), norms, true);
    }
    ctx.write_table("propagate.csv", &table)?;
    if p.dump_snapshots {
        let trajectory = Trajectory {
            grid,
            boundary_tolerance: guards.boundary_tolerance,
            alias_tolerance: guards.alias_tolerance,
            entries,
        };
        let text = toml::to_string(&trajectory).map_err(|e| RunError::Config(format!("trajectory: {e}")))?;
        ctx.write_text("trajectory.toml", &text)?;
    }
    ctx.plot("propagate.svg", &chart)
}

fn decay_check(ctx: &mut Context) -> Result<(), RunError> {
    let config = ctx.config;
    let states = mixtures(config)?;
    let k = ctx.decay_constants(states[0].d())?;
    let mut table = Table::new(&["set", "N", "T", "tail", "bound", "violation"]);
    let mut chart = Chart::new("Spectral tail vs bound (set 0)", "N", "tail / bound");
    for (i, g0) in states.iter().enumerate() {
        let mass0 = g0.spectral_mass();
        for &t in &config.time.t {
            ctx.op("propagate_mixture");
            let gt = g0.propagate(t)?;
            let mut ratio = Vec::new();
            for &n in &config.time.n {
                ctx.op("tail_mass");
                ctx.op("decay_bound");
                let tail = tail_mass_mixture(&gt, n)?;
                let bound = decay_bound(n, t, mass0, &k)?;
                let violation = tail > bound + TAIL_SLACK * mass0;
                if violation {
                    ctx.outcome.flag(|| format!("set {i}, N = {n}, T = {t}: tail {tail} > bound {bound}"));
                }
                table.push(row![i, n, t, tail, bound, violation]);
                ratio.push((n, tail / bound));
            }
            if i == 0 {
                chart.add(&format!("T = {t}"), ratio, true);
            }
        }
    }
    ctx.write_table("decay.csv", &table)?;
    ctx.plot("decay.svg", &chart)
}

fn thickness(ctx: &mut Context) -> Result<(), RunError> {
    let config = ctx.config;
    let th = config.thickness;
    let set = &config.set;
    ctx.op("minimal_delta");
    let delta_min = minimal_delta(set, th.r, th.sampling_step)?;
    let delta = th.delta.unwrap_or(if delta_min.is_finite() { delta_min } else { 1.0 });
    ctx.op("check_thickness");
    let verdict = check_thickness(set, delta, th.r, th.sampling_step)?;
    ctx.constant("minimal_delta", delta_min);
    let fmt_point = |p: &[f64]| p.iter().map(|x| crate::report::fmt_f64(*x)).collect::<Vec<_>>().join(" ");
    let (y, nearest, distance) = match &verdict.counterexample {
        Some(c) => (fmt_point(&c.y), fmt_point(&c.nearest), crate::report::fmt_f64(c.distance)),
        None => (String::new(), String::new(), String::new()),
    };
    let mut table = Table::new(&[
        "r",
        "delta",
        "sampling_step",
        "thick",
        "minimal_delta",
        "counterexample_y",
        "counterexample_nearest",
        "counterexample_distance",
    ]);
    table.push(row![th.r, delta, th.sampling_step, verdict.thick, delta_min, y, nearest, distance]);
    ctx.write_table("thickness.csv", &table)?;
    if th.export_mask {
        let g = config.grid;
        let grid = PhaseGrid::new(g.d, g.points, g.half_width)?;
        ctx.op("grid_mask");
        let mask = grid_mask(set, &grid)?;
        ctx.constant("mask_measure", mask.measure());
        ctx.write_snapshot("mask.klfs", &Snapshot::Mask(mask))?;
    }
    Ok(())
}

fn spectral_fit(ctx: &mut Context) -> Result<(), RunError> {
    let d = ctx.config.data_dimension().unwrap_or(ctx.config.grid.d);
    let report = ctx.fit(d)?;
    let mut table = Table::new(&["N", "samples", "ratio", "fitted_C", "norm_form_C"]);
    let mut chart = Chart::new("Spectral constant", "N", "C");
    let mut fitted = Vec::new();
    let mut norm_form = Vec::new();
    for r in &report.rows {
        table.push(row![r.n, r.samples, r.worst_ratio, r.fitted_c, r.norm_form_c]);
        fitted.push((r.n, r.fitted_c));
        norm_form.push((r.n, r.norm_form_c));
    }
    chart.add("fitted_C", fitted, true).add("norm_form_C", norm_form, true);
    ctx.write_table("spectral.csv", &table)?;
    ctx.plot("spectral.svg", &chart)
}

fn interp_verify(ctx: &mut Context) -> Result<(), RunError> {
    let config = ctx.config;
    let states = mixtures(config)?;
    let d = states[0].d();
    let k = ctx.decay_constants(d)?;
    let c1 = ctx.spectral_constant(d)?;
    let options = ctx.verify_options();
    let mut table = Table::new(&[
        "set",
        "T",
        "alpha",
        "C1",
        "lhs",
        "norm_gT_omega",
        "norm_g0",
        "rhs",
        "observed_constant",
        "envelope_constant",
        "shape",
        "holds",
    ]);
    let mut points = Vec::new();
    let mut envelope = f64::NAN;
    for (i, g0) in states.iter().enumerate() {
        for &t in &config.time.t {
            for &alpha in &config.time.alpha {
                ctx.op("propagate_mixture");
                ctx.op("epsilon_minimize");
                ctx.op("assemble_interpolation_bound");
                ctx.op("verify_interpolation");
                let r = verify_interpolation(g0, &config.set, t, alpha, c1, &k, &options)?;
                let ok = r.holds() && r.observed_constant <= r.envelope_constant;
                if !ok {
                    ctx.outcome.flag(|| {
                        format!(
                            "set {i}, T = {t}, alpha = {alpha}: lhs {} vs rhs {}, observed {} vs envelope {}",
                            r.lhs, r.rhs, r.observed_constant, r.envelope_constant
                        )
                    });
                }
                let shape = (1.0 + 1.0 / (t * t * t)) / alpha;
                envelope = r.envelope_constant;
                table.push(row![
                    i,
                    t,
                    alpha,
                    c1,
                    r.lhs,
                    r.norm_gt_omega,
                    r.norm_g0,
                    r.rhs,
                    r.observed_constant,
                    r.envelope_constant,
                    shape,
                    ok
                ]);
                points.push((shape, r.observed_constant));
            }
        }
    }
    ctx.constant("envelope_constant", envelope);
    ctx.write_table("interp.csv", &table)?;
    let mut chart = Chart::new("Observed interpolation constant", "(1/α)(1+1/T³)", "observed_constant");
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    chart.add("observed", points, false);
    if let (Some(lo), Some(hi)) = (xs.iter().copied().reduce(f64::min), xs.iter().copied().reduce(f64::max)) {
        chart.add("envelope", vec![(lo, envelope), (hi, envelope)], true);
    }
    ctx.plot("interp.svg", &chart)
}

fn telescope(ctx: &mut Context) -> Result<(), RunError> {
    let config = ctx.config;
    let time = &config.time;
    let intervals: Vec<(f64, f64)> = time.e.iter().map(|p| (p[0], p[1])).collect();
    ctx.op("time_set");
    let e = TimeSet::new(time.horizon, intervals)?;
    let states = mixtures(config)?;
    let d = states[0].d();
    let c1 = ctx.spectral_constant(d)?;
    ctx.op("find_density_point");
    ctx.op("build_sequence");
    let seq = sequence_for(&e, time.lambda)?;
    ctx.op("assemble_constants");
    let constants = assemble_constants(&seq, c1)?;
    ctx.constant("lambda", seq.lambda);
    ctx.constant("l", seq.l);
    ctx.constant("l1", seq.l1);
    ctx.constant("beta", constants.beta);
    ctx.constant("C2_obs", constants.c2);
    ctx.constant("ln_C_obs", constants.ln_c_obs);
    let q = config.quadrature;
    let quadrature = TimeQuadrature { panel_width: q.panel_width, order: q.order, tolerance: q.tolerance };
    let options = ctx.verify_options();

    let mut steps = Table::new(&["set", "m", "l_m", "interval_measure", "ln_lhs", "ln_rhs", "ln_epsilon", "holds"]);
    let mut summary = Table::new(&[
        "set",
        "beta",
        "C2",
        "ln_C_obs",
        "lhs",
        "integral",
        "ln_rhs",
        "ratio",
        "chain_violations",
        "monotone_violations",
        "auxiliary_violations",
        "telescoping_error",
        "telescoping_remainder",
        "telescoping_depth",
    ]);
    let mut chart = Chart::new("Chain steps (set 0)", "m", "log value");
    for (i, g0) in states.iter().enumerate() {
        ctx.op("verify_observability");
        let r = verify_observability(g0, &config.set, &e, &seq, &constants, &quadrature, &options)?;
        for s in &r.steps {
            steps.push(row![i, s.m, s.l_m, s.interval_measure, s.ln_lhs, s.ln_rhs, s.ln_epsilon, s.holds]);
        }
        let aux = r.auxiliary.violations.len();
        if r.ratio > 1.0 || r.chain_violations > 0 || r.monotone_violations > 0 || aux > 0 {
            ctx.outcome.flag(|| {
                format!(
                    "set {i}: ratio {}, chain violations {}, monotone violations {}, auxiliary violations {aux}",
                    r.ratio, r.chain_violations, r.monotone_violations
                )
            });
        }
        summary.push(row![
            i,
            constants.beta,
            constants.c2,
            constants.ln_c_obs,
            r.lhs,
            r.integral,
            r.ln_rhs,
            r.ratio,
            r.chain_violations,
            r.monotone_violations,
            aux,
            r.telescoping_error,
            r.telescoping_remainder,
            r.telescoping_depth
        ]);
        if i == 0 {
            let lhs: Vec<(f64, f64)> = r.steps.iter().map(|s| (s.m as f64, s.ln_lhs)).collect();
            let rhs: Vec<(f64, f64)> = r.steps.iter().map(|s| (s.m as f64, s.ln_rhs)).collect();
            chart.add("ln lhs", lhs, true).add("ln rhs", rhs, true);
        }
    }
    ctx.write_table("telescope.csv", &steps)?;
    ctx.write_table("telescope_summary.csv", &summary)?;
    ctx.plot("telescope.svg", &chart)?;

    if !time.audit_t.is_empty() {
        ctx.op("cobs_interval");
        let audit = cobs_scaling_audit(&time.audit_t, c1, time.lambda)?;
        let mut table =
            Table::new(&["T", "reading", "l1_minus_l2", "l1_minus_l3", "beta", "C2", "ln_C_obs", "exhibited_C"]);
        for p in &audit.points {
            for (name, r) in [("sequence", &p.sequence), ("literal", &p.literal)] {
                let c = &r.constants;
                table.push(row![p.t, name, r.l1_minus_l2, r.l1_minus_l3, c.beta, c.c2, c.ln_c_obs, r.exhibited_c]);
            }
        }
        ctx.write_table("cobs.csv", &table)?;
        let mut fits = Table::new(&["reading", "intercept", "slope", "max_relative_residual"]);
        for (name, f) in [("sequence", &audit.sequence), ("literal", &audit.literal)] {
            fits.push(row![name, f.intercept, f.slope, f.max_relative_residual]);
        }
        ctx.write_table("cobs_fit.csv", &fits)?;
        ctx.constant("cobs_fit_residual", audit.sequence.max_relative_residual);
        let mut chart = Chart::new("ln C_obs for E = (0, T)", "1/T³", "ln C_obs");
        let pts: Vec<(f64, f64)> =
            audit.points.iter().map(|p| (1.0 / (p.t * p.t * p.t), p.sequence.constants.ln_c_obs)).collect();
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        chart.add("sequence reading", pts, false);
        let f = audit.sequence;
        let line = [xs.iter().copied().fold(f64::INFINITY, f64::min), xs.iter().copied().fold(0.0, f64::max)]
            .map(|x| (x, f.intercept + f.slope * x))
            .to_vec();
        chart.add("fit", line, true);
        ctx.plot("cobs.svg", &chart)?;
    }
    Ok(())
}
