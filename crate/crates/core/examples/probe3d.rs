use ndas::dynamics::{Dynamics, Forcing, SolverParams};
use ndas::experiment::{initial_profile_field, RampSpec};
use ndas::grid::Grid;
use std::sync::Arc;
use std::time::Instant;

fn main() {
    let g = Arc::new(Grid::new(3, 64, 1.0).unwrap());
    let ramp = RampSpec { seed: 7, k0: 8.0, t_ramp: 0.0 };
    let mut state = initial_profile_field(&g, &ramp);
    println!("3D 64^3 init: energy {:.4}, max|u| {:.3}, div {:.2e}", state.energy(), state.max_velocity(), state.divergence_max());
    let params = SolverParams { nu: 8e-3, forcing: Forcing::TaylorGreen, cfl_number: 0.5, dt_fixed: Some(2e-3), dt_max: 2e-3 };
    let dynamics = Dynamics::new(g.clone(), params).unwrap();
    let t0 = Instant::now();
    for i in 0..25 {
        state = dynamics.rk4_step(&state, i as f64 * 2e-3, 2e-3, None).unwrap();
    }
    let spec = state.energy_spectrum();
    let peak = spec.iter().cloned().fold(0.0_f64, f64::max);
    let tail = spec[19..=21].iter().cloned().fold(0.0_f64, f64::max);
    println!(
        "25 steps in {:?} ({:?}/step); energy {:.4}, decay {:.1} decades",
        t0.elapsed(), t0.elapsed() / 25, state.energy(), (peak / tail.max(1e-300)).log10()
    );
}
