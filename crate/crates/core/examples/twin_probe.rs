use ndas::assim::{AssimilationConfig, FeedbackForm, InterpolantSpec, Scheme};
use ndas::dynamics::{Forcing, SolverParams};
use ndas::experiment::{convergence_time, ramp_up, run_twin, ExperimentConfig, RampSpec};
use ndas::grid::Grid;
use std::sync::Arc;
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let nu: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(5e-4);
    let mu: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(2000.0);
    let shell_frac: f64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(0.2);
    let run_t: f64 = args.get(4).map(|s| s.parse().unwrap()).unwrap_or(0.5);
    let n: usize = args.get(5).map(|s| s.parse().unwrap()).unwrap_or(256);
    let t_ramp: f64 = args.get(6).map(|s| s.parse().unwrap()).unwrap_or(0.5);
    let dt: f64 = args.get(7).map(|s| s.parse().unwrap()).unwrap_or(5e-4);

    let grid = Arc::new(Grid::new(2, n, 1.0).unwrap());
    let m = ((grid.shell_count() as f64) * shell_frac) as usize;
    let s_m = grid.shell_s(m);
    println!(
        "shells {} -> m = {} (|f| <= {:.1}), lambda_next*nu = {:.2}",
        grid.shell_count(), m, (s_m as f64).sqrt(),
        grid.next_lambda(m).unwrap() * nu
    );
    let kappa = 10.0 * dt;
    let cfg = ExperimentConfig {
        grid: grid.clone(),
        solver: SolverParams {
            nu,
            forcing: Forcing::TaylorGreen,
            cfl_number: 0.5,
            dt_fixed: Some(dt),
            dt_max: kappa / 10.0,
        },
        assim: AssimilationConfig {
            scheme: Scheme::NudgeWindow,
            mu,
            kappa,
            tau: dt,
            interpolant: InterpolantSpec::modal(m),
            feedback_form: FeedbackForm::Frozen,
        },
        ramp: RampSpec { seed: 7, k0: n as f64 / 8.0, t_ramp },
        run_time: run_t,
        tol: 1e-8,
    };
    let t0 = Instant::now();
    let reference = ramp_up(&cfg).unwrap();
    println!("ramp done in {:?}, energy {:.4}", t0.elapsed(), reference.energy());
    let t0 = Instant::now();
    let series = run_twin(&cfg, &reference).unwrap();
    println!("run done in {:?} ({} rows), failure: {:?}", t0.elapsed(), series.rows.len(), series.failure);
    let every = (series.rows.len() / 20).max(1);
    for (i, r) in series.rows.iter().enumerate() {
        if i % every == 0 || i + 1 == series.rows.len() {
            println!("  t={:.4} err_l2={:.3e} active={}", r.t, r.err_l2, u8::from(r.nudge_active));
        }
    }
    println!("convergence_time(1e-8) = {:?}", convergence_time(&series, 1e-8));
    println!("convergence_time(1e-6) = {:?}", convergence_time(&series, 1e-6));
}
