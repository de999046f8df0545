use ndas::assim::{AssimilationConfig, FeedbackForm, InterpolantSpec, Scheme};
use ndas::dynamics::{Forcing, SolverParams};
use ndas::experiment::{convergence_time, ramp_up, run_twin, ExperimentConfig, RampSpec};
use ndas::grid::Grid;
use std::sync::Arc;
use std::time::Instant;

fn main() {
    let n = 64;
    let nu = 4e-3;
    let dt = 2e-3;
    let kappa = 10.0 * dt;
    let grid = Arc::new(Grid::new(2, n, 1.0).unwrap());
    // observe |f| <= 18
    let m = grid.shell_index_of_s(18 * 18).unwrap();
    println!("m = {m} of {} shells, nu*lambda_next = {:.2}", grid.shell_count(), nu * grid.next_lambda(m).unwrap());
    let base = ExperimentConfig {
        grid: grid.clone(),
        solver: SolverParams { nu, forcing: Forcing::TaylorGreen, cfl_number: 0.5, dt_fixed: Some(dt), dt_max: kappa / 10.0 },
        assim: AssimilationConfig {
            scheme: Scheme::NudgeWindow, mu: 10.0, kappa, tau: kappa,
            interpolant: InterpolantSpec::modal(m), feedback_form: FeedbackForm::Frozen,
        },
        ramp: RampSpec { seed: 7, k0: 8.0, t_ramp: 1.0 },
        run_time: 2.4,
        tol: 1e-6,
    };
    let t0 = Instant::now();
    let reference = ramp_up(&base).unwrap();
    println!("ramp {:?}, energy {:.4}, err0 {:.3}", t0.elapsed(), reference.energy(), (2.0*reference.energy()).sqrt());

    let mut run = |label: &str, scheme: Scheme, mu: f64, tau: f64, t_run: f64| {
        let mut cfg = base.clone();
        cfg.assim.scheme = scheme;
        cfg.assim.mu = mu;
        cfg.assim.tau = tau;
        cfg.run_time = t_run;
        let t0 = Instant::now();
        let series = run_twin(&cfg, &reference).unwrap();
        let ct = convergence_time(&series, 1e-6);
        let final_err = series.rows.last().unwrap().err_l2;
        println!(
            "{label}: conv(1e-6) {:?}, final {:.3e}, fail {:?} [{:?}]",
            ct, final_err, series.failure, t0.elapsed()
        );
        (ct, final_err)
    };

    println!("--- criterion 7 pair ---");
    let (c_base, _) = run("tau=k,  mu=10 ", Scheme::NudgeWindow, 10.0, kappa, 2.4);
    let (c_imp, _) = run("tau=k/10,mu=100", Scheme::NudgeWindow, 100.0, dt, 2.4);
    if let (Some(a), Some(b)) = (c_base, c_imp) {
        println!("ratio {:.2}", a.max(b) / a.min(b));
    }
    println!("--- criterion 8 scan ---");
    let mut best = f64::INFINITY;
    for mu in [100.0, 250.0, 500.0] {
        let (ct, _) = run(&format!("tau=k/10,mu={mu}"), Scheme::NudgeWindow, mu, dt, 1.2);
        if let Some(c) = ct { best = best.min(c); }
    }
    if let Some(cb) = c_base {
        println!("speedup vs baseline: {:.2}x", cb / best);
    }
    println!("--- criterion 9 at T=0.4 ---");
    let (_, e_hot) = run("hot           ", Scheme::Hot, 0.0, dt, 0.4);
    let (_, e_mu2) = run("tau=k/10,mu=400", Scheme::NudgeWindow, 400.0, dt, 0.4);
    let (_, e_mu1) = run("tau=k/10,mu=100", Scheme::NudgeWindow, 100.0, dt, 0.4);
    println!("ordering: hot {:.3e} <= 1.5*mu2 {:.3e} <= 1.5^2*mu1 {:.3e}", e_hot, 1.5 * e_mu2, 1.5 * e_mu1);
}
