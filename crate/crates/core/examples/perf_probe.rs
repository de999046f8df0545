use ndas::dynamics::{Dynamics, Forcing, SolverParams};
use ndas::experiment::{initial_profile_field, RampSpec};
use ndas::grid::Grid;
use std::sync::Arc;
use std::time::Instant;

fn spectrum_report(label: &str, f: &ndas::SpectralField) {
    let spec = f.energy_spectrum();
    let peak = spec.iter().cloned().fold(0.0_f64, f64::max);
    let n3 = f.grid().n() / 3;
    let tail = spec[n3.saturating_sub(2)..=n3].iter().cloned().fold(0.0_f64, f64::max);
    let decades = (peak / tail.max(1e-300)).log10();
    println!(
        "{label}: energy {:.4}, max|u| {:.3}, peak {:.3e}, tail@{} {:.3e}, decay {:.1} decades",
        f.energy(), f.max_velocity(), peak, n3, tail, decades
    );
}

fn main() {
    let nu: f64 = std::env::args().nth(1).map(|s| s.parse().unwrap()).unwrap_or(2.5e-3);
    let t_ramp: f64 = std::env::args().nth(2).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let n: usize = std::env::args().nth(3).map(|s| s.parse().unwrap()).unwrap_or(256);
    let dt: f64 = std::env::args().nth(4).map(|s| s.parse().unwrap()).unwrap_or(5e-4);
    let g = Arc::new(Grid::new(2, n, 1.0).unwrap());
    let ramp = RampSpec { seed: 7, k0: n as f64 / 8.0, t_ramp };
    let mut state = initial_profile_field(&g, &ramp);
    spectrum_report("t=0", &state);
    let params = SolverParams {
        nu,
        forcing: Forcing::TaylorGreen,
        cfl_number: 0.5,
        dt_fixed: Some(dt),
        dt_max: 1e-3,
    };
    let dynamics = Dynamics::new(g.clone(), params).unwrap();
    let steps = (t_ramp / dt).round() as usize;
    let t0 = Instant::now();
    let report_every = (steps / 4).max(1);
    for i in 0..steps {
        state = dynamics.rk4_step(&state, i as f64 * dt, dt, None).unwrap();
        if (i + 1) % report_every == 0 {
            spectrum_report(&format!("t={:.3}", (i + 1) as f64 * dt), &state);
        }
    }
    println!("{} steps in {:?}", steps, t0.elapsed());
}
