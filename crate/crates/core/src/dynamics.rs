//! Right-hand-side assembly, Taylor-Green forcing, explicit RK4 stepping,
//! and advective-CFL time-step selection.

use crate::assim::ActiveNudge;
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::Grid;
use num_complex::Complex64;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Forcing {
    None,
    TaylorGreen,
}

impl Forcing {
    pub fn tag(&self) -> &'static str {
        match self {
            Forcing::None => "none",
            Forcing::TaylorGreen => "taylor_green",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolverParams {
    /// Kinematic viscosity (box units).
    pub nu: f64,
    pub forcing: Forcing,
    /// Advective CFL number in (0, 1].
    pub cfl_number: f64,
    /// Fixed time step; overrides the CFL policy when set.
    pub dt_fixed: Option<f64>,
    /// Step cap, used in particular when the velocity is zero.
    pub dt_max: f64,
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0) {
            return Err(Error::Config(format!("viscosity must be positive, got {}", self.nu)));
        }
        if !(self.cfl_number > 0.0 && self.cfl_number <= 1.0) {
            return Err(Error::Config(format!(
                "CFL number must lie in (0, 1], got {}",
                self.cfl_number
            )));
        }
        if let Some(dt) = self.dt_fixed {
            if !(dt > 0.0) {
                return Err(Error::Config(format!("fixed dt must be positive, got {dt}")));
            }
        }
        if !(self.dt_max > 0.0) {
            return Err(Error::Config(format!("dt_max must be positive, got {}", self.dt_max)));
        }
        Ok(())
    }
}

/// Taylor-Green forcing on the box, divergence-free and zero-mean:
/// `f = (sin cos cos, -cos sin cos, 0)` in the fundamental modes. 2D grids
/// use the z-independent restriction `(sin cos, -cos sin)`.
pub fn taylor_green_forcing(grid: &Arc<Grid>) -> SpectralField {
    let mut f = SpectralField::zeros(grid);
    match grid.dim() {
        2 => {
            for s1 in [-1i64, 1] {
                for s2 in [-1i64, 1] {
                    f.add_amplitude(&[s1, s2], 0, Complex64::new(0.0, -(s1 as f64) / 4.0));
                    f.add_amplitude(&[s1, s2], 1, Complex64::new(0.0, s2 as f64 / 4.0));
                }
            }
        }
        3 => {
            for s1 in [-1i64, 1] {
                for s2 in [-1i64, 1] {
                    for s3 in [-1i64, 1] {
                        let fr = [s1, s2, s3];
                        f.add_amplitude(&fr, 0, Complex64::new(0.0, -(s1 as f64) / 8.0));
                        f.add_amplitude(&fr, 1, Complex64::new(0.0, s2 as f64 / 8.0));
                    }
                }
            }
        }
        _ => unreachable!("grid dim validated at construction"),
    }
    f.set_solenoidal(true);
    f
}

/// Stepping context owning the grid, parameters, and the precomputed forcing
/// field.
#[derive(Debug)]
pub struct Dynamics {
    grid: Arc<Grid>,
    params: SolverParams,
    forcing: Option<SpectralField>,
}

impl Dynamics {
    pub fn new(grid: Arc<Grid>, params: SolverParams) -> Result<Dynamics> {
        params.validate()?;
        let forcing = match params.forcing {
            Forcing::None => None,
            Forcing::TaylorGreen => Some(taylor_green_forcing(&grid)),
        };
        Ok(Dynamics { grid, params, forcing })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn params(&self) -> &SolverParams {
        &self.params
    }

    pub fn forcing(&self) -> Option<&SpectralField> {
        self.forcing.as_ref()
    }

    /// `-nu A u - B(u,u) + f + P_sigma(nudge)`; solenoidal for solenoidal
    /// input.
    pub fn rhs(&self, state: &SpectralField, nudge: Option<&SpectralField>) -> SpectralField {
        let mut out = state.nonlinear_term();
        out.scale(-1.0);
        out.add_scaled_stokes(state, -self.params.nu);
        if let Some(f) = &self.forcing {
            out.add_scaled(f, 1.0);
        }
        if let Some(nf) = nudge {
            out.add_scaled(nf, 1.0);
        }
        out
    }

    /// Classical four-stage RK4. The nudging contribution is treated
    /// explicitly; within a window the frozen observation data is constant,
    /// so every stage sees the same data (the window indicator is decided at
    /// the step's start by the caller, and steps are clipped to window
    /// boundaries so it cannot flip mid-step).
    pub fn rk4_step(
        &self,
        state: &SpectralField,
        t: f64,
        dt: f64,
        nudge: Option<&ActiveNudge>,
    ) -> Result<SpectralField> {
        debug_assert!(dt > 0.0);
        let eval = |stage: &SpectralField| -> Result<SpectralField> {
            match nudge {
                None => Ok(self.rhs(stage, None)),
                Some(ActiveNudge::Frozen(nf)) => Ok(self.rhs(stage, Some(nf))),
                Some(tracking) => {
                    let nf = tracking.force(stage)?;
                    Ok(self.rhs(stage, Some(&nf)))
                }
            }
        };
        let k1 = eval(state)?;
        let mut stage = state.clone();
        stage.add_scaled(&k1, 0.5 * dt);
        let k2 = eval(&stage)?;
        stage = state.clone();
        stage.add_scaled(&k2, 0.5 * dt);
        let k3 = eval(&stage)?;
        stage = state.clone();
        stage.add_scaled(&k3, dt);
        let k4 = eval(&stage)?;

        let mut out = state.clone();
        out.add_scaled(&k1, dt / 6.0);
        out.add_scaled(&k2, dt / 3.0);
        out.add_scaled(&k3, dt / 3.0);
        out.add_scaled(&k4, dt / 6.0);
        out.leray_project();
        if !out.is_finite() {
            return Err(Error::BlowUp {
                t,
                detail: "non-finite coefficients after RK4 step".into(),
            });
        }
        Ok(out)
    }

    /// Advective CFL step: `min(dt_max, cfl * dx / max|u|)`, or the fixed
    /// step when configured. Boundary clipping is applied separately via
    /// [`clip_dt`].
    pub fn cfl_dt(&self, state: &SpectralField) -> f64 {
        if let Some(dt) = self.params.dt_fixed {
            return dt;
        }
        let umax = state.max_velocity();
        if umax <= 0.0 {
            return self.params.dt_max;
        }
        let dx = self.grid.length() / self.grid.n() as f64;
        (self.params.cfl_number * dx / umax).min(self.params.dt_max)
    }
}

/// Clip a candidate step so it lands exactly on the next boundary
/// (observation instant, window close, or end time) when one falls inside
/// the step. Returns the step and the boundary value to snap to, if any.
pub fn clip_dt(t: f64, dt: f64, next_boundary: Option<f64>) -> (f64, Option<f64>) {
    if let Some(b) = next_boundary {
        let gap = b - t;
        if gap > 0.0 && gap <= dt * (1.0 + 1e-12) {
            return (gap, Some(b));
        }
    }
    (dt, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::random_solenoidal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(nu: f64, forcing: Forcing) -> SolverParams {
        SolverParams {
            nu,
            forcing,
            cfl_number: 0.5,
            dt_fixed: None,
            dt_max: 0.01,
        }
    }

    #[test]
    fn taylor_green_is_solenoidal_and_normed() {
        // 3D: ||f||^2 = 1/4; 2D restriction: ||f||^2 = 1/2. Checked against
        // trapezoidal quadrature of the analytic components, which is exact
        // for band-limited fields.
        let g3 = Arc::new(Grid::new(3, 8, 1.0).unwrap());
        let f3 = taylor_green_forcing(&g3);
        assert!(f3.divergence_max() <= 1e-13 * f3.max_coeff());
        let l2sq = f3.norms().l2.powi(2);
        assert!((l2sq - 0.25).abs() < 1e-13, "3D norm^2 = {l2sq}");
        let quad = quadrature_l2sq_3d(8);
        assert!((l2sq - quad).abs() < 1e-12, "norms {l2sq} vs quadrature {quad}");

        let g2 = Arc::new(Grid::new(2, 8, 1.0).unwrap());
        let f2 = taylor_green_forcing(&g2);
        assert!(f2.divergence_max() <= 1e-13 * f2.max_coeff());
        let l2sq2 = f2.norms().l2.powi(2);
        assert!((l2sq2 - 0.5).abs() < 1e-13, "2D norm^2 = {l2sq2}");
        let quad2 = quadrature_l2sq_2d(8);
        assert!((l2sq2 - quad2).abs() < 1e-12);
    }

    fn quadrature_l2sq_3d(n: usize) -> f64 {
        let mut sum = 0.0;
        let tp = 2.0 * std::f64::consts::PI;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (x, y, z) = (i as f64 / n as f64, j as f64 / n as f64, k as f64 / n as f64);
                    let f1 = (tp * x).sin() * (tp * y).cos() * (tp * z).cos();
                    let f2 = -(tp * x).cos() * (tp * y).sin() * (tp * z).cos();
                    sum += f1 * f1 + f2 * f2;
                }
            }
        }
        sum / (n * n * n) as f64
    }

    fn quadrature_l2sq_2d(n: usize) -> f64 {
        let mut sum = 0.0;
        let tp = 2.0 * std::f64::consts::PI;
        for i in 0..n {
            for j in 0..n {
                let (x, y) = (i as f64 / n as f64, j as f64 / n as f64);
                let f1 = (tp * x).sin() * (tp * y).cos();
                let f2 = -(tp * x).cos() * (tp * y).sin();
                sum += f1 * f1 + f2 * f2;
            }
        }
        sum / (n * n) as f64
    }

    #[test]
    fn rhs_zero_state_without_forcing() {
        let g = Arc::new(Grid::new(2, 8, 1.0).unwrap());
        let dyn_ = Dynamics::new(g.clone(), params(0.1, Forcing::None)).unwrap();
        let z = SpectralField::zeros(&g);
        assert_eq!(dyn_.rhs(&z, None).max_coeff(), 0.0);
    }

    #[test]
    fn rhs_single_mode_is_stokes_diagonal() {
        // Single solenoidal mode: B vanishes identically, so rhs = -nu|k|^2 u.
        let g = Arc::new(Grid::new(2, 16, 1.0).unwrap());
        let nu = 0.3;
        let dyn_ = Dynamics::new(g.clone(), params(nu, Forcing::None)).unwrap();
        let mut u = SpectralField::zeros(&g);
        u.add_conjugate_pair(&[2, 1], 0, Complex64::new(0.1, -0.2));
        u.leray_project();
        let r = dyn_.rhs(&u, None);
        let ksq = g.lambda1() * 5.0; // |f|^2 = 4 + 1
        let mut expected = u.clone();
        expected.scale(-nu * ksq);
        assert!(r.error_norms(&expected).l2 <= 1e-12 * expected.norms().l2);
    }

    #[test]
    fn nudge_equal_to_state_reduces_to_unforced() {
        // nudge = mu (obs - state) with obs == state is zero.
        let g = Arc::new(Grid::new(2, 16, 1.0).unwrap());
        let dyn_ = Dynamics::new(g.clone(), params(0.05, Forcing::None)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let u = random_solenoidal(&g, &mut rng, 4.0);
        let zero_nudge = SpectralField::zeros(&g);
        let a = dyn_.rhs(&u, Some(&zero_nudge));
        let b = dyn_.rhs(&u, None);
        assert_eq!(a.error_norms(&b).l2, 0.0);
    }

    #[test]
    fn rk4_matches_exact_stokes_decay() {
        // Box of side 2 pi so the first mode has |k| = 1; with nu = 1 and
        // dt = 1e-3 the RK4 truncation error sits far below 1e-12.
        let two_pi = 2.0 * std::f64::consts::PI;
        let g = Arc::new(Grid::new(2, 16, two_pi).unwrap());
        let nu = 1.0;
        let dyn_ = Dynamics::new(g.clone(), params(nu, Forcing::None)).unwrap();
        let mut u = SpectralField::zeros(&g);
        u.add_conjugate_pair(&[1, 0], 1, Complex64::new(0.7, 0.1));
        u.leray_project();
        let dt = 1e-3;
        let stepped = dyn_.rk4_step(&u, 0.0, dt, None).unwrap();
        let ratio = stepped.norms().l2 / u.norms().l2;
        let exact = (-nu * g.lambda1() * dt).exp(); // lambda1 = 1
        assert!(
            (ratio - exact).abs() <= 1e-12 * exact,
            "ratio {ratio} vs exact {exact}"
        );
    }

    #[test]
    fn steady_stokes_balance_is_fixed_point() {
        // nu A u = f for the Taylor-Green mode; B(u,u) vanishes there, so the
        // state is stationary.
        let g = Arc::new(Grid::new(2, 16, 1.0).unwrap());
        let nu = 0.2;
        let dyn_ = Dynamics::new(g.clone(), params(nu, Forcing::TaylorGreen)).unwrap();
        let lambda = g.lambda1() * 2.0; // forcing lives on |f|^2 = 2
        let mut u = taylor_green_forcing(&g);
        u.scale(1.0 / (nu * lambda));
        let stepped = dyn_.rk4_step(&u, 0.0, 1e-3, None).unwrap();
        let rel = stepped.error_norms(&u).l2 / u.norms().l2;
        assert!(rel <= 1e-12, "fixed point drift {rel}");
    }

    #[test]
    fn cfl_arithmetic() {
        let g = Arc::new(Grid::new(2, 64, 1.0).unwrap());
        let mut p = params(0.1, Forcing::None);
        p.dt_max = 1.0;
        let dyn_ = Dynamics::new(g.clone(), p).unwrap();
        // max |u| = 1 exactly: sin(2 pi x) hits 1 on the grid for n % 4 == 0.
        let mut u = SpectralField::zeros(&g);
        u.add_conjugate_pair(&[1, 0], 1, Complex64::new(0.0, -0.5));
        u.leray_project();
        let dt = dyn_.cfl_dt(&u);
        assert!((dt - 1.0 / 128.0).abs() < 1e-12, "dt = {dt}");
        // Zero velocity falls back to dt_max.
        let z = SpectralField::zeros(&g);
        assert_eq!(dyn_.cfl_dt(&z), 1.0);
        // Fixed dt short-circuits the policy.
        let mut pf = p;
        pf.dt_fixed = Some(2e-4);
        let dyn_f = Dynamics::new(g, pf).unwrap();
        assert_eq!(dyn_f.cfl_dt(&u), 2e-4);
    }

    #[test]
    fn boundary_clipping() {
        let (dt, snap) = clip_dt(0.00095, 1e-4, Some(0.001));
        assert!((dt - 5e-5).abs() < 1e-18);
        assert_eq!(snap, Some(0.001));
        // Boundary beyond the step: untouched.
        let (dt2, snap2) = clip_dt(0.0, 1e-4, Some(0.001));
        assert_eq!(dt2, 1e-4);
        assert_eq!(snap2, None);
        // Boundary exactly at the step end snaps.
        let (dt3, snap3) = clip_dt(0.0009, 1e-4, Some(0.001));
        assert!((dt3 - 1e-4).abs() < 1e-18);
        assert_eq!(snap3, Some(0.001));
    }

    #[test]
    fn blow_up_is_detected() {
        let g = Arc::new(Grid::new(2, 16, 1.0).unwrap());
        let dyn_ = Dynamics::new(g.clone(), params(1e-6, Forcing::None)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let mut u = random_solenoidal(&g, &mut rng, 4.0);
        u.scale(f64::MAX.sqrt());
        // A huge state with a huge dt overflows inside one step.
        let res = dyn_.rk4_step(&u, 0.0, 1e6, None);
        assert!(matches!(res, Err(Error::BlowUp { .. })));
    }

    #[test]
    fn solenoidality_preserved_over_steps() {
        let g = Arc::new(Grid::new(2, 32, 1.0).unwrap());
        let dyn_ = Dynamics::new(g.clone(), params(5e-3, Forcing::TaylorGreen)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let mut u = random_solenoidal(&g, &mut rng, 6.0);
        for step in 0..20 {
            u = dyn_.rk4_step(&u, step as f64 * 1e-3, 1e-3, None).unwrap();
            assert!(
                u.divergence_max() <= 1e-12 * u.max_coeff(),
                "divergence grew at step {step}"
            );
        }
    }
}
