//! Interpolant operators, observation capture, the windowed nudging feedback
//! term, and direct low-mode replacement.
//!
//! Observations of the reference trajectory are taken every `kappa` time
//! units; the nudging force `mu * I(u - v)` acts only on the assimilation
//! window `[t_n, t_n + tau)` of each observation interval. With `tau = kappa`
//! the force is active on every step (the classical always-on scheme); with
//! `tau` as short as a single step the observation is applied as one hard
//! kick and the system then relaxes freely until the next observation.

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::fft;
use crate::grid::Grid;
use ndarray::{ArrayD, IxDyn};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Default spatial interpolant constant: the sharp 1D Poincare constant for
/// piecewise-constant cell means, `1/pi^2`.
pub const DEFAULT_C0: f64 = 1.0 / (PI * PI);

/// Default temporal interpolant constant.
pub const DEFAULT_C1: f64 = 1.0;

/// Spatial coarse-graining operator used to form observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InterpolantKind {
    /// Projection onto the first `m` eigenvalue shells.
    Modal { m: usize },
    /// Piecewise-constant means over cubes of side `h` (`L/h` integer).
    VolumeAverage { h: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolantSpec {
    pub kind: InterpolantKind,
    /// Spatial constant of the interpolant inequality
    /// `||xi - I_h xi||^2 <= c0 h^2 ||xi||_{H1}^2`.
    pub c0: f64,
    /// Temporal constant of the piecewise-constant extrapolation bound.
    pub c1: f64,
}

impl InterpolantSpec {
    pub fn modal(m: usize) -> InterpolantSpec {
        InterpolantSpec {
            kind: InterpolantKind::Modal { m },
            c0: DEFAULT_C0,
            c1: DEFAULT_C1,
        }
    }

    pub fn volume_average(h: f64) -> InterpolantSpec {
        InterpolantSpec {
            kind: InterpolantKind::VolumeAverage { h },
            c0: DEFAULT_C0,
            c1: DEFAULT_C1,
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.c0 > 0.0) || !(self.c1 > 0.0) {
            return Err(Error::Config("interpolant constants must be positive".into()));
        }
        match self.kind {
            InterpolantKind::Modal { m } => {
                if m < 1 {
                    return Err(Error::Config("modal cutoff must be >= 1".into()));
                }
            }
            InterpolantKind::VolumeAverage { h } => {
                cells_per_axis(grid, h)?;
            }
        }
        Ok(())
    }
}

fn cells_per_axis(grid: &Grid, h: f64) -> Result<usize> {
    let l = grid.length();
    if !(h > 0.0) || h > l {
        return Err(Error::Config(format!("cell side h = {h} must lie in (0, L]")));
    }
    let ratio = l / h;
    let cells = ratio.round() as usize;
    if cells == 0 || (ratio - cells as f64).abs() > 1e-9 * ratio {
        return Err(Error::Config(format!("cell side {h} does not divide box side {l}")));
    }
    if grid.n() % cells != 0 {
        return Err(Error::Config(format!(
            "{cells} cells per axis do not divide n = {}",
            grid.n()
        )));
    }
    Ok(cells)
}

/// Assimilation scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    None,
    NudgeWindow,
    Hot,
}

impl Scheme {
    pub fn tag(&self) -> &'static str {
        match self {
            Scheme::None => "none",
            Scheme::NudgeWindow => "nudge_window",
            Scheme::Hot => "hot",
        }
    }
}

/// Feedback form: `frozen` nudges against the difference captured at the
/// observation instant (constant over the window); `tracking` nudges against
/// the current twin state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedbackForm {
    Frozen,
    Tracking,
}

#[derive(Debug, Clone)]
pub struct AssimilationConfig {
    pub scheme: Scheme,
    /// Nudging strength (1/time).
    pub mu: f64,
    /// Observation interval.
    pub kappa: f64,
    /// Assimilation window length, `0 < tau <= kappa` for nudging.
    pub tau: f64,
    pub interpolant: InterpolantSpec,
    pub feedback_form: FeedbackForm,
}

impl AssimilationConfig {
    pub fn none() -> AssimilationConfig {
        AssimilationConfig {
            scheme: Scheme::None,
            mu: 0.0,
            kappa: f64::INFINITY,
            tau: 0.0,
            interpolant: InterpolantSpec::modal(1),
            feedback_form: FeedbackForm::Frozen,
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        match self.scheme {
            Scheme::None => Ok(()),
            Scheme::NudgeWindow => {
                // mu = 0 is the degenerate zero-feedback case and must match
                // the unassimilated scheme exactly; negative strengths are
                // rejected.
                if !(self.mu >= 0.0) {
                    return Err(Error::Config("mu must be nonnegative for nudging".into()));
                }
                if !(self.kappa > 0.0) || !self.kappa.is_finite() {
                    return Err(Error::Config("kappa must be positive and finite".into()));
                }
                if !(self.tau > 0.0) || self.tau > self.kappa * (1.0 + 1e-12) {
                    return Err(Error::Config(format!(
                        "window tau = {} must satisfy 0 < tau <= kappa = {}",
                        self.tau, self.kappa
                    )));
                }
                self.interpolant.validate(grid)
            }
            Scheme::Hot => {
                if !(self.kappa > 0.0) || !self.kappa.is_finite() {
                    return Err(Error::Config("kappa must be positive and finite".into()));
                }
                match self.interpolant.kind {
                    InterpolantKind::Modal { .. } => self.interpolant.validate(grid),
                    InterpolantKind::VolumeAverage { .. } => Err(Error::Config(
                        "direct modal replacement requires a modal interpolant".into(),
                    )),
                }
            }
        }
    }
}

/// Apply the spatial interpolant to a field. Modal projection retains the
/// low eigenvalue shells; volume averaging replaces the field by its exact
/// cell means (integrals of the trigonometric interpolant over each cube),
/// re-expanded on the grid and mean-corrected.
pub fn interpolate(field: &SpectralField, spec: &InterpolantSpec) -> Result<SpectralField> {
    match spec.kind {
        InterpolantKind::Modal { m } => Ok(field.project_low_modes(m)),
        InterpolantKind::VolumeAverage { h } => volume_average(field, h),
    }
}

fn volume_average(field: &SpectralField, h: f64) -> Result<SpectralField> {
    let grid = field.grid().clone();
    let dim = grid.dim();
    let n = grid.n();
    let cells = cells_per_axis(&grid, h)?;
    let p = n / cells;

    // Per-axis averaging kernel: the mean of e^{i k x} over a cell of side h
    // is e^{i theta c} (e^{i theta} - 1)/(i theta) with theta = 2 pi f / C.
    let kernel: Vec<Complex64> = grid
        .frequencies()
        .iter()
        .map(|&f| {
            if f == 0 {
                Complex64::new(1.0, 0.0)
            } else if f.rem_euclid(cells as i64) == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                let theta = 2.0 * PI * f as f64 / cells as f64;
                (Complex64::new(theta.cos(), theta.sin()) - 1.0) / Complex64::new(0.0, theta)
            }
        })
        .collect();

    let cell_shape = IxDyn(&vec![cells; dim]);
    let total = grid.points();
    let scale = (cells.pow(dim as u32) as f64) / (total as f64);

    let mut phys_out: Vec<ArrayD<f64>> = Vec::with_capacity(field.ncomp());
    for comp_idx in 0..field.ncomp() {
        // Fold kernel-weighted coefficients onto the C^dim cell grid
        // (frequencies congruent mod C share a cell-space exponential).
        let mut folded = ArrayD::from_elem(cell_shape.clone(), Complex64::new(0.0, 0.0));
        {
            let fold = folded.as_slice_mut().expect("standard layout");
            let coeffs = field.comp(comp_idx).as_slice().expect("standard layout");
            let freqs = grid.frequencies();
            let mut idx = vec![0usize; dim];
            for (flat, &c) in coeffs.iter().enumerate() {
                let mut rem = flat;
                let mut weighted = c;
                let mut cell_flat = 0usize;
                for a in (0..dim).rev() {
                    idx[a] = rem % n;
                    rem /= n;
                }
                let mut zero = false;
                for &i in idx.iter() {
                    let w = kernel[i];
                    if w.re == 0.0 && w.im == 0.0 && freqs[i] != 0 {
                        zero = true;
                        break;
                    }
                    weighted *= w;
                    cell_flat = cell_flat * cells + freqs[i].rem_euclid(cells as i64) as usize;
                }
                if !zero {
                    fold[cell_flat] += weighted;
                }
            }
        }
        fft::inverse_nd(&mut folded);
        // Expand cell means back onto the grid.
        let cell_means = folded.as_slice().expect("standard layout");
        let mut out = vec![0.0f64; total];
        let mut idx = vec![0usize; dim];
        for (flat, o) in out.iter_mut().enumerate() {
            let mut rem = flat;
            for a in (0..dim).rev() {
                idx[a] = rem % n;
                rem /= n;
            }
            let mut cell_flat = 0usize;
            for &i in idx.iter() {
                cell_flat = cell_flat * cells + i / p;
            }
            *o = cell_means[cell_flat].re * scale;
        }
        phys_out.push(ArrayD::from_shape_vec(IxDyn(&vec![n; dim]), out).unwrap());
    }
    Ok(SpectralField::from_physical(&grid, &phys_out))
}

/// Interpolated reference (and, for the frozen feedback form, twin) data
/// captured at an observation instant. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ObservationRecord {
    pub t_n: f64,
    pub spec: InterpolantSpec,
    pub obs_u: SpectralField,
    pub obs_v: Option<SpectralField>,
}

/// Capture an observation at `t_n`. The twin snapshot is interpolated only
/// for the frozen feedback form of the nudging scheme.
pub fn observe(
    reference: &SpectralField,
    twin: &SpectralField,
    t_n: f64,
    cfg: &AssimilationConfig,
) -> Result<ObservationRecord> {
    let obs_u = interpolate(reference, &cfg.interpolant)?;
    let obs_v = if cfg.scheme == Scheme::NudgeWindow && cfg.feedback_form == FeedbackForm::Frozen {
        Some(interpolate(twin, &cfg.interpolant)?)
    } else {
        None
    };
    Ok(ObservationRecord {
        t_n,
        spec: cfg.interpolant,
        obs_u,
        obs_v,
    })
}

/// Whether `t` lies in the assimilation window `[t_n, t_n + tau)`.
///
/// Steps are clipped to land exactly on window boundaries, so plain
/// comparisons with a tiny slack are sufficient.
pub fn in_window(t: f64, t_n: f64, tau: f64) -> bool {
    let slack = 1e-9 * tau;
    t >= t_n - slack && t < t_n + tau - slack
}

/// Nudging contribution prepared for one step: the frozen form is a
/// precomputed constant field, the tracking form re-interpolates the current
/// stage state.
#[derive(Debug)]
pub enum ActiveNudge<'a> {
    Frozen(SpectralField),
    Tracking {
        obs_u: &'a SpectralField,
        mu: f64,
        spec: InterpolantSpec,
    },
}

impl<'a> ActiveNudge<'a> {
    pub fn build(record: &'a ObservationRecord, cfg: &AssimilationConfig) -> Result<ActiveNudge<'a>> {
        match cfg.feedback_form {
            FeedbackForm::Frozen => {
                let obs_v = record.obs_v.as_ref().ok_or_else(|| {
                    Error::Config("frozen feedback needs the twin observation".into())
                })?;
                let mut force = record.obs_u.difference(obs_v);
                force.scale(cfg.mu);
                force.leray_project();
                Ok(ActiveNudge::Frozen(force))
            }
            FeedbackForm::Tracking => Ok(ActiveNudge::Tracking {
                obs_u: &record.obs_u,
                mu: cfg.mu,
                spec: cfg.interpolant,
            }),
        }
    }

    /// Evaluate the force for a given stage state (Leray-projected).
    pub fn force(&self, stage: &SpectralField) -> Result<SpectralField> {
        match self {
            ActiveNudge::Frozen(f) => Ok(f.clone()),
            ActiveNudge::Tracking { obs_u, mu, spec } => {
                let interp = interpolate(stage, spec)?;
                let mut force = obs_u.difference(&interp);
                force.scale(*mu);
                force.leray_project();
                Ok(force)
            }
        }
    }
}

/// The nudging feedback term at time `t`: zero outside the window
/// `[t_n, t_n + tau)`, otherwise `mu I(u - v)` in the configured feedback
/// form, Leray-projected.
pub fn nudging_force(
    record: &ObservationRecord,
    twin_state: &SpectralField,
    t: f64,
    cfg: &AssimilationConfig,
) -> Result<SpectralField> {
    if cfg.scheme != Scheme::NudgeWindow {
        return Err(Error::Config("nudging force requires the nudge_window scheme".into()));
    }
    if !in_window(t, record.t_n, cfg.tau) {
        return Ok(SpectralField::zeros(twin_state.grid()));
    }
    ActiveNudge::build(record, cfg)?.force(twin_state)
}

/// Direct modal replacement: copy the observed low modes into the twin,
/// leaving high modes bit-identical. Requires a modal observation record
/// with the same cutoff.
pub fn hot_replace(
    twin_state: &SpectralField,
    record: &ObservationRecord,
    m: usize,
) -> Result<SpectralField> {
    match record.spec.kind {
        InterpolantKind::Modal { m: rm } if rm == m => {}
        InterpolantKind::Modal { m: rm } => {
            return Err(Error::Config(format!(
                "record cutoff {rm} does not match requested cutoff {m}"
            )));
        }
        InterpolantKind::VolumeAverage { .. } => {
            return Err(Error::Config(
                "direct modal replacement requires modal observations".into(),
            ));
        }
    }
    let mut out = twin_state.project_high_modes(m);
    out.add_scaled(&record.obs_u, 1.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::random_solenoidal;
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn grid2(n: usize) -> Arc<Grid> {
        Arc::new(Grid::new(2, n, 1.0).unwrap())
    }

    fn nudge_cfg(grid: &Grid, mu: f64, kappa: f64, tau: f64, spec: InterpolantSpec) -> AssimilationConfig {
        let cfg = AssimilationConfig {
            scheme: Scheme::NudgeWindow,
            mu,
            kappa,
            tau,
            interpolant: spec,
            feedback_form: FeedbackForm::Frozen,
        };
        cfg.validate(grid).unwrap();
        cfg
    }

    #[test]
    fn interpolate_zero_field_is_zero() {
        let g = grid2(16);
        let z = SpectralField::zeros(&g);
        for spec in [InterpolantSpec::modal(3), InterpolantSpec::volume_average(0.25)] {
            let out = interpolate(&z, &spec).unwrap();
            assert_eq!(out.max_coeff(), 0.0);
        }
    }

    #[test]
    fn volume_average_of_sine_matches_cell_integrals() {
        // Cell means of sin(2 pi x) with h = 1/4 are +-2/pi; derived from the
        // analytic cell integral 4 * int_0^{1/4} sin(2 pi x) dx = 2/pi.
        let g = grid2(16);
        let mut f = SpectralField::zeros(&g);
        f.add_conjugate_pair(&[1, 0], 0, Complex64::new(0.0, -0.5));
        let out = interpolate(&f, &InterpolantSpec::volume_average(0.25)).unwrap();
        let phys = out.to_physical(0);
        let expected = 2.0 / PI;
        let cell_sign = [1.0, 1.0, -1.0, -1.0];
        for (flat, v) in phys.as_slice().unwrap().iter().enumerate() {
            let i = flat / 16; // x index (axis 0 slowest)
            let cell = i / 4;
            let want = expected * cell_sign[cell];
            assert!(
                (v - want).abs() < 1e-12,
                "point {flat}: got {v}, want {want}"
            );
        }
        // Component 1 stays zero.
        assert!(out.to_physical(1).iter().all(|v| v.abs() < 1e-13));
    }

    #[test]
    fn volume_average_is_cellwise_constant() {
        let g = grid2(32);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random_solenoidal(&g, &mut rng, 6.0);
        let out = interpolate(&f, &InterpolantSpec::volume_average(0.125)).unwrap();
        let scale = f.norms().l2;
        for comp in 0..2 {
            let phys = out.to_physical(comp);
            let s = phys.as_slice().unwrap();
            let p = 32 / 8;
            for cx in 0..8 {
                for cy in 0..8 {
                    let v0 = s[(cx * p) * 32 + cy * p];
                    for ix in 0..p {
                        for iy in 0..p {
                            let v = s[(cx * p + ix) * 32 + cy * p + iy];
                            assert!(
                                (v - v0).abs() <= 1e-12 * scale,
                                "cell ({cx},{cy}) not constant"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn volume_average_rejects_bad_h() {
        let g = grid2(16);
        let f = SpectralField::zeros(&g);
        assert!(interpolate(&f, &InterpolantSpec::volume_average(0.3)).is_err());
        assert!(interpolate(&f, &InterpolantSpec::volume_average(1.5)).is_err());
        // 1/5 of the box divides L but 5 cells do not divide n = 16.
        assert!(interpolate(&f, &InterpolantSpec::volume_average(0.2)).is_err());
    }

    #[test]
    fn modal_interpolant_kills_high_modes() {
        let g = grid2(16);
        let mut f = SpectralField::zeros(&g);
        f.add_conjugate_pair(&[4, 3], 1, Complex64::new(0.2, 0.4));
        f.leray_project();
        let out = interpolate(&f, &InterpolantSpec::modal(2)).unwrap();
        assert_eq!(out.max_coeff(), 0.0);
    }

    #[test]
    fn interpolant_inequality_modal_is_sharp_shellwise() {
        let g = grid2(24);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let f = random_solenoidal(&g, &mut rng, 6.0);
        let m = 5;
        let diff = f.project_high_modes(m);
        let lhs = diff.norms().l2.powi(2);
        let rhs = f.norms().h1.powi(2) / g.next_lambda(m).unwrap();
        assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn interpolant_inequality_volume_average() {
        let g = grid2(32);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..5 {
            let f = random_solenoidal(&g, &mut rng, 5.0);
            for h in [0.25, 0.125] {
                let ih = interpolate(&f, &InterpolantSpec::volume_average(h)).unwrap();
                let lhs = f.error_norms(&ih).l2.powi(2);
                let rhs = DEFAULT_C0 * h * h * f.norms().h1.powi(2);
                assert!(lhs <= rhs, "h = {h}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn observe_identical_twin_gives_zero_frozen_force() {
        let g = grid2(16);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let u = random_solenoidal(&g, &mut rng, 4.0);
        let cfg = nudge_cfg(&g, 10.0, 0.1, 0.05, InterpolantSpec::modal(4));
        let rec = observe(&u, &u, 0.0, &cfg).unwrap();
        let force = nudging_force(&rec, &u, 0.02, &cfg).unwrap();
        assert!(force.max_coeff() < 1e-12 * u.max_coeff());
    }

    #[test]
    fn window_is_half_open() {
        let g = grid2(16);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let u = random_solenoidal(&g, &mut rng, 4.0);
        let v = SpectralField::zeros(&g);
        let cfg = nudge_cfg(&g, 10.0, 0.1, 0.05, InterpolantSpec::modal(4));
        let rec = observe(&u, &v, 1.0, &cfg).unwrap();
        assert!(nudging_force(&rec, &v, 1.0, &cfg).unwrap().max_coeff() > 0.0);
        assert!(nudging_force(&rec, &v, 1.0499, &cfg).unwrap().max_coeff() > 0.0);
        // Window just closed at t_n + tau.
        assert_eq!(nudging_force(&rec, &v, 1.05, &cfg).unwrap().max_coeff(), 0.0);
        assert_eq!(nudging_force(&rec, &v, 0.99, &cfg).unwrap().max_coeff(), 0.0);
    }

    #[test]
    fn tracking_invisible_difference_above_cutoff() {
        let g = grid2(16);
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let u = random_solenoidal(&g, &mut rng, 4.0);
        let m = 3;
        // Twin differs from the reference only above the cutoff.
        let mut v = u.clone();
        let mut bump = SpectralField::zeros(&g);
        bump.add_conjugate_pair(&[5, 1], 0, Complex64::new(0.1, 0.0));
        bump.leray_project();
        v.add_scaled(&bump, 1.0);
        let mut cfg = nudge_cfg(&g, 10.0, 0.1, 0.1, InterpolantSpec::modal(m));
        cfg.feedback_form = FeedbackForm::Tracking;
        let rec = observe(&u, &v, 0.0, &cfg).unwrap();
        let force = nudging_force(&rec, &v, 0.0, &cfg).unwrap();
        assert!(force.max_coeff() < 1e-12 * u.max_coeff());
    }

    #[test]
    fn modal_observation_has_no_coefficients_above_cutoff() {
        let g = grid2(16);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let u = random_solenoidal(&g, &mut rng, 6.0);
        let cfg = nudge_cfg(&g, 1.0, 0.1, 0.1, InterpolantSpec::modal(4));
        let rec = observe(&u, &u, 0.0, &cfg).unwrap();
        assert_eq!(rec.obs_u.project_high_modes(4).max_coeff(), 0.0);
    }

    #[test]
    fn hot_replace_semantics() {
        let g = grid2(16);
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let u = random_solenoidal(&g, &mut rng, 5.0);
        let v = random_solenoidal(&g, &mut rng, 5.0);
        let m = 4;
        let cfg = AssimilationConfig {
            scheme: Scheme::Hot,
            mu: 0.0,
            kappa: 0.1,
            tau: 0.0,
            interpolant: InterpolantSpec::modal(m),
            feedback_form: FeedbackForm::Frozen,
        };
        let rec = observe(&u, &v, 0.0, &cfg).unwrap();
        let replaced = hot_replace(&v, &rec, m).unwrap();
        // Low-mode error vanishes.
        let low_err = replaced
            .project_low_modes(m)
            .error_norms(&u.project_low_modes(m))
            .l2;
        assert!(low_err <= 1e-14 * u.norms().l2);
        // High modes bit-identical to the twin.
        let high_r = replaced.project_high_modes(m);
        let high_v = v.project_high_modes(m);
        for c in 0..2 {
            let a = high_r.comp(c).as_slice().unwrap();
            let b = high_v.comp(c).as_slice().unwrap();
            assert!(a.iter().zip(b).all(|(x, y)| x == y));
        }
        assert!(replaced.is_solenoidal());
        assert!(replaced.divergence_max() <= 1e-12 * replaced.max_coeff());
        // Identical states: replacement is the identity.
        let rec_same = observe(&u, &u, 0.0, &cfg).unwrap();
        let same = hot_replace(&u, &rec_same, m).unwrap();
        assert!(same.error_norms(&u).l2 <= 1e-14 * u.norms().l2);
    }

    #[test]
    fn hot_replace_rejects_volume_average_records() {
        let g = grid2(16);
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let u = random_solenoidal(&g, &mut rng, 5.0);
        let cfg = nudge_cfg(&g, 1.0, 0.1, 0.1, InterpolantSpec::volume_average(0.25));
        let rec = observe(&u, &u, 0.0, &cfg).unwrap();
        assert!(hot_replace(&u, &rec, 4).is_err());
    }

    #[test]
    fn config_validation() {
        let g = grid2(16);
        let bad_tau = AssimilationConfig {
            scheme: Scheme::NudgeWindow,
            mu: 1.0,
            kappa: 0.001,
            tau: 0.002,
            interpolant: InterpolantSpec::modal(2),
            feedback_form: FeedbackForm::Frozen,
        };
        assert!(bad_tau.validate(&g).is_err());
        let bad_mu = AssimilationConfig {
            mu: -1.0,
            tau: 0.001,
            ..bad_tau.clone()
        };
        assert!(bad_mu.validate(&g).is_err());
        let zero_mu = AssimilationConfig {
            mu: 0.0,
            tau: 0.001,
            ..bad_tau.clone()
        };
        assert!(zero_mu.validate(&g).is_ok());
        let hot_volume = AssimilationConfig {
            scheme: Scheme::Hot,
            mu: 1.0,
            kappa: 0.001,
            tau: 0.001,
            interpolant: InterpolantSpec::volume_average(0.25),
            feedback_form: FeedbackForm::Frozen,
        };
        assert!(hot_volume.validate(&g).is_err());
        assert!(AssimilationConfig::none().validate(&g).is_ok());
    }
}
