//! Identical-twin protocol: reference ramp-up, co-evolution of reference and
//! twin under a chosen assimilation scheme, error tracking, convergence-time
//! extraction, and parameter sweeps.

use crate::assim::{
    self, ActiveNudge, AssimilationConfig, InterpolantKind, ObservationRecord, Scheme,
};
use crate::dynamics::{clip_dt, Dynamics, SolverParams};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use crate::snapshot;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::sync::Arc;

/// Random-initial-state specification: seeded phases, spectrum peak `k0`,
/// and the equilibration time under the configured forcing.
#[derive(Debug, Clone, Copy)]
pub struct RampSpec {
    pub seed: u64,
    pub k0: f64,
    pub t_ramp: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub grid: Arc<Grid>,
    pub solver: SolverParams,
    pub assim: AssimilationConfig,
    pub ramp: RampSpec,
    /// Assimilation run length.
    pub run_time: f64,
    /// Error tolerance used for convergence-time extraction.
    pub tol: f64,
}

/// One recorded step of a twin run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub t: f64,
    pub err_l2: f64,
    pub err_h1: f64,
    pub energy_ref: f64,
    pub energy_twin: f64,
    pub nudge_active: bool,
}

/// Observation-instant diagnostics (post-replacement for the replacement
/// scheme); `low_mode_err` is populated for modal interpolants.
#[derive(Debug, Clone, Copy)]
pub struct ObsEvent {
    pub t_n: f64,
    pub low_mode_err: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TimeSeries {
    pub scheme: String,
    pub rows: Vec<Row>,
    pub obs_events: Vec<ObsEvent>,
    /// Set when a trajectory blew up; the rows collected so far are kept.
    pub failure: Option<String>,
}

/// Normalized target shell energies `E(s) = A s^4 exp(-2 (s/k0)^2)` on the
/// dealias-limited band `1 <= s <= n/3`, with `sum_s E(s) = 1`.
pub fn ramp_profile_target(grid: &Grid, k0: f64) -> Vec<f64> {
    let smax = grid.n() / 3;
    let mut target = vec![0.0; grid.max_shell_bin() + 1];
    let mut sum = 0.0;
    for (s, t) in target.iter_mut().enumerate().take(smax + 1).skip(1) {
        let x = s as f64;
        *t = x.powi(4) * (-2.0 * (x / k0) * (x / k0)).exp();
        sum += *t;
    }
    for t in &mut target {
        *t /= sum;
    }
    target
}

/// Draw the seeded random field and rescale its shell amplitudes to the
/// target profile; unit total energy, divergence-free, dealias-band-limited.
pub fn initial_profile_field(grid: &Arc<Grid>, ramp: &RampSpec) -> SpectralField {
    let mut rng = ChaCha8Rng::seed_from_u64(ramp.seed);
    let mut field = crate::field::random_solenoidal(grid, &mut rng, f64::INFINITY);
    // Restrict to whole shells inside the dealias band so every retained
    // shell can be matched to the target exactly.
    let smax = (grid.n() / 3) as u32;
    {
        let bins = grid.shell_bin().clone();
        let bins = bins.as_slice().expect("standard layout");
        for i in 0..field.ncomp() {
            let data = field.comp_mut(i).as_slice_mut().expect("standard layout");
            for (v, &b) in data.iter_mut().zip(bins) {
                if b == 0 || b > smax {
                    *v = num_complex::Complex64::new(0.0, 0.0);
                }
            }
        }
        field.set_solenoidal(true);
    }
    let current = field.energy_spectrum();
    let target = ramp_profile_target(grid, ramp.k0);
    let scale: Vec<f64> = current
        .iter()
        .zip(&target)
        .map(|(&cur, &tgt)| if cur > 0.0 { (tgt / cur).sqrt() } else { 0.0 })
        .collect();
    {
        let bins = grid.shell_bin().clone();
        let bins = bins.as_slice().expect("standard layout");
        for i in 0..field.ncomp() {
            let data = field.comp_mut(i).as_slice_mut().expect("standard layout");
            for (v, &b) in data.iter_mut().zip(bins) {
                *v *= scale[b as usize];
            }
        }
        field.set_solenoidal(true);
    }
    field
}

/// Prepare the reference state: build the profile field and evolve it for
/// `t_ramp` under the configured forcing.
pub fn ramp_up(cfg: &ExperimentConfig) -> Result<SpectralField> {
    let mut state = initial_profile_field(&cfg.grid, &cfg.ramp);
    if cfg.ramp.t_ramp <= 0.0 {
        return Ok(state);
    }
    let dynamics = Dynamics::new(cfg.grid.clone(), cfg.solver)?;
    let t_end = cfg.ramp.t_ramp;
    let mut t = 0.0;
    let eps = 1e-9 * t_end;
    while t < t_end - eps {
        let dt = dynamics.cfl_dt(&state);
        let (dt, snap) = clip_dt(t, dt, Some(t_end));
        state = dynamics.rk4_step(&state, t, dt, None).map_err(|e| match e {
            Error::BlowUp { t, .. } => Error::BlowUp {
                t,
                detail: "ramp-up diverged; reduce the time step or the initial energy".into(),
            },
            other => other,
        })?;
        t = snap.unwrap_or(t + dt);
    }
    Ok(state)
}

/// Checkpoint emission request: a file (re)written at every observation
/// instant, tagged with the hash of the run configuration.
#[derive(Debug, Clone)]
pub struct CheckpointSpec {
    pub path: PathBuf,
    pub config_hash: u64,
}

/// State loaded from a checkpoint; the run continues from `t` (an
/// observation instant) with a fresh observation.
#[derive(Debug, Clone)]
pub struct ResumePoint {
    pub t: f64,
    pub step: u64,
    pub reference: SpectralField,
    pub twin: SpectralField,
}

#[derive(Debug, Default)]
pub struct RunOptions {
    pub checkpoint: Option<CheckpointSpec>,
    pub resume: Option<ResumePoint>,
    /// Twin initial state override (defaults to the zero field).
    pub twin_initial: Option<SpectralField>,
}

/// A completed (or failed) twin run with its final states.
#[derive(Debug)]
pub struct RunOutcome {
    pub series: TimeSeries,
    pub reference: SpectralField,
    pub twin: SpectralField,
}

/// Co-evolve reference and twin on one grid, one forcing, and one dt
/// sequence (dictated by the reference's CFL). Observations are taken at
/// `t_n = n kappa`; errors are recorded at every accepted step. Blow-up in
/// either trajectory yields a partial series with a failure marker.
pub fn run_twin(cfg: &ExperimentConfig, reference_initial: &SpectralField) -> Result<TimeSeries> {
    run_twin_with_options(cfg, reference_initial, RunOptions::default())
}

pub fn run_twin_with_options(
    cfg: &ExperimentConfig,
    reference_initial: &SpectralField,
    opts: RunOptions,
) -> Result<TimeSeries> {
    Ok(run_twin_full(cfg, reference_initial, opts)?.series)
}

pub fn run_twin_full(
    cfg: &ExperimentConfig,
    reference_initial: &SpectralField,
    opts: RunOptions,
) -> Result<RunOutcome> {
    cfg.assim.validate(&cfg.grid)?;
    if !(cfg.run_time > 0.0) {
        return Err(Error::Config("run time must be positive".into()));
    }
    let dynamics = Dynamics::new(cfg.grid.clone(), cfg.solver)?;
    let scheme = cfg.assim.scheme;
    let kappa = cfg.assim.kappa;
    let tau = cfg.assim.tau;
    let t_end = cfg.run_time;
    let eps = 1e-9 * t_end.min(if kappa.is_finite() { kappa } else { t_end });

    let (mut reference, mut twin, mut t, mut step) = match opts.resume {
        Some(r) => (r.reference, r.twin, r.t, r.step),
        None => (
            reference_initial.clone(),
            opts.twin_initial
                .unwrap_or_else(|| SpectralField::zeros(&cfg.grid)),
            0.0,
            0u64,
        ),
    };

    let mut series = TimeSeries {
        scheme: scheme.tag().to_string(),
        rows: Vec::new(),
        obs_events: Vec::new(),
        failure: None,
    };
    let mut record: Option<ObservationRecord> = None;

    loop {
        // Observation instant handling (the first observation is available
        // immediately at the start of the run).
        if scheme != Scheme::None {
            let n_idx = (t / kappa).round();
            let t_obs = n_idx * kappa;
            let fresh = record
                .as_ref()
                .map(|r| r.t_n < t_obs - eps)
                .unwrap_or(true);
            if (t - t_obs).abs() <= eps && fresh {
                if let Some(ck) = &opts.checkpoint {
                    snapshot::write_checkpoint(
                        &ck.path,
                        ck.config_hash,
                        step,
                        t_obs,
                        &reference,
                        &twin,
                        cfg.solver.nu,
                    )?;
                }
                let rec = assim::observe(&reference, &twin, t_obs, &cfg.assim)?;
                if scheme == Scheme::Hot {
                    let m = match cfg.assim.interpolant.kind {
                        InterpolantKind::Modal { m } => m,
                        InterpolantKind::VolumeAverage { .. } => {
                            return Err(Error::Config(
                                "direct modal replacement requires a modal interpolant".into(),
                            ))
                        }
                    };
                    twin = assim::hot_replace(&twin, &rec, m)?;
                }
                let low_mode_err = match cfg.assim.interpolant.kind {
                    InterpolantKind::Modal { m } => Some(
                        twin.project_low_modes(m)
                            .error_norms(&reference.project_low_modes(m))
                            .l2,
                    ),
                    InterpolantKind::VolumeAverage { .. } => None,
                };
                series.obs_events.push(ObsEvent { t_n: t_obs, low_mode_err });
                record = Some(rec);
            }
        }

        let active = scheme == Scheme::NudgeWindow
            && record
                .as_ref()
                .map(|r| assim::in_window(t, r.t_n, tau))
                .unwrap_or(false);

        let err = twin.error_norms(&reference);
        series.rows.push(Row {
            t,
            err_l2: err.l2,
            err_h1: err.h1,
            energy_ref: reference.energy(),
            energy_twin: twin.energy(),
            nudge_active: active,
        });

        if t >= t_end - eps {
            break;
        }

        let dt_policy = dynamics.cfl_dt(&reference);
        let next_boundary = {
            let mut b = t_end;
            if scheme != Scheme::None {
                let next_obs = ((t + eps) / kappa).floor() * kappa + kappa;
                b = b.min(next_obs);
                if let Some(r) = &record {
                    let close = r.t_n + tau;
                    if close > t + eps {
                        b = b.min(close);
                    }
                }
            }
            b
        };
        let (dt, snap) = clip_dt(t, dt_policy, Some(next_boundary));
        if !(dt > 0.0) {
            return Err(Error::Config(format!("non-positive step dt = {dt} at t = {t}")));
        }

        let nudge = if active {
            Some(ActiveNudge::build(record.as_ref().unwrap(), &cfg.assim)?)
        } else {
            None
        };
        let stepped_ref = dynamics.rk4_step(&reference, t, dt, None);
        let stepped_twin = dynamics.rk4_step(&twin, t, dt, nudge.as_ref());
        match (stepped_ref, stepped_twin) {
            (Ok(r), Ok(v)) => {
                reference = r;
                twin = v;
            }
            (Err(e), _) | (_, Err(e)) => {
                series.failure = Some(e.to_string());
                break;
            }
        }
        t = snap.unwrap_or(t + dt);
        step += 1;
    }
    Ok(RunOutcome {
        series,
        reference,
        twin,
    })
}

/// First time at which `err_l2 <= tol` and stays there for the remainder of
/// the series; `None` when the series never settles below the tolerance.
pub fn convergence_time(series: &TimeSeries, tol: f64) -> Option<f64> {
    assert!(tol > 0.0, "tolerance must be positive");
    let rows = &series.rows;
    if rows.is_empty() {
        return None;
    }
    let mut last_exceed = None;
    for (i, r) in rows.iter().enumerate() {
        if r.err_l2 > tol {
            last_exceed = Some(i);
        }
    }
    match last_exceed {
        None => Some(rows[0].t),
        Some(i) if i + 1 < rows.len() => Some(rows[i + 1].t),
        Some(_) => None,
    }
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub scheme: String,
    pub mu: f64,
    pub tau: f64,
    pub convergence_time: Option<f64>,
    pub final_err: f64,
    pub failed: bool,
}

/// Run every (scheme, mu, tau) combination from one ramped reference and
/// seed, in deterministic row order. Schemes that ignore `mu` and `tau`
/// (`none`, `hot`) contribute a single row each, echoed with `mu = 0` /
/// `mu = inf` and `tau = 0`. Blow-ups are recorded per row and the sweep
/// continues.
pub fn sweep(
    cfg: &ExperimentConfig,
    mu_list: &[f64],
    tau_list: &[f64],
    schemes: &[Scheme],
) -> Result<Vec<SweepRow>> {
    if mu_list.is_empty() || tau_list.is_empty() || schemes.is_empty() {
        return Err(Error::Config("sweep lists must be nonempty".into()));
    }
    let reference = ramp_up(cfg)?;
    let mut rows = Vec::new();
    let mut run_one = |assim_cfg: AssimilationConfig, mu_echo: f64, tau_echo: f64| -> Result<()> {
        let mut run_cfg = cfg.clone();
        run_cfg.assim = assim_cfg;
        let series = run_twin(&run_cfg, &reference)?;
        rows.push(SweepRow {
            scheme: series.scheme.clone(),
            mu: mu_echo,
            tau: tau_echo,
            convergence_time: convergence_time(&series, cfg.tol),
            final_err: series.rows.last().map(|r| r.err_l2).unwrap_or(f64::NAN),
            failed: series.failure.is_some(),
        });
        Ok(())
    };
    for &scheme in schemes {
        match scheme {
            Scheme::None => {
                let mut a = cfg.assim.clone();
                a.scheme = Scheme::None;
                run_one(a, 0.0, 0.0)?;
            }
            Scheme::Hot => {
                let mut a = cfg.assim.clone();
                a.scheme = Scheme::Hot;
                run_one(a, f64::INFINITY, 0.0)?;
            }
            Scheme::NudgeWindow => {
                for &mu in mu_list {
                    for &tau in tau_list {
                        let mut a = cfg.assim.clone();
                        a.scheme = Scheme::NudgeWindow;
                        a.mu = mu;
                        a.tau = tau;
                        run_one(a, mu, tau)?;
                    }
                }
            }
        }
    }
    Ok(rows)
}
