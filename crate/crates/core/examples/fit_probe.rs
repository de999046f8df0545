use ndas::assim::{AssimilationConfig, FeedbackForm, InterpolantSpec, Scheme};
use ndas::dynamics::{Forcing, SolverParams};
use ndas::experiment::{ramp_up, run_twin, ExperimentConfig, RampSpec};
use ndas::grid::Grid;
use std::sync::Arc;

fn fit_r2(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = pts.iter().map(|p| (p.1 - (slope * p.0 + intercept)).powi(2)).sum();
    (slope, 1.0 - ss_res / ss_tot)
}

fn main() {
    let n = 256;
    let nu = 5e-4;
    let dt = 5e-4;
    let kappa = 10.0 * dt;
    let grid = Arc::new(Grid::new(2, n, 1.0).unwrap());
    let m = grid.shell_count() / 5;
    let base = ExperimentConfig {
        grid: grid.clone(),
        solver: SolverParams {
            nu, forcing: Forcing::TaylorGreen, cfl_number: 0.5,
            dt_fixed: Some(dt), dt_max: kappa / 10.0,
        },
        assim: AssimilationConfig {
            scheme: Scheme::NudgeWindow, mu: 0.0, kappa, tau: dt,
            interpolant: InterpolantSpec::modal(m),
            feedback_form: FeedbackForm::Frozen,
        },
        ramp: RampSpec { seed: 7, k0: n as f64 / 8.0, t_ramp: 0.5 },
        run_time: 0.1,
        tol: 1e-8,
    };
    let reference = ramp_up(&base).unwrap();
    eprintln!("ramp done");
    for mu in [1000.0, 2000.0, 4000.0] {
        let mut cfg = base.clone();
        cfg.assim.mu = mu;
        let series = run_twin(&cfg, &reference).unwrap();
        // decaying segment: rows until first err <= 1e-8
        let mut pts = Vec::new();
        for r in &series.rows {
            pts.push((r.t, r.err_l2.log10()));
            if r.err_l2 <= 1e-8 { break; }
        }
        let (slope, r2) = fit_r2(&pts);
        // stair-step: err at window close vs window open, every cycle
        let mut stair_ok = 0;
        let mut stair_total = 0;
        let mut worst: f64 = 0.0;
        let rows = &series.rows;
        let idx_of = |t: f64| rows.iter().position(|r| (r.t - t).abs() < 1e-12);
        let ncycles = (cfg.run_time / kappa).round() as usize;
        for cyc in 0..ncycles {
            let t_open = cyc as f64 * kappa;
            let t_close = t_open + dt;
            if let (Some(i), Some(j)) = (idx_of(t_open), idx_of(t_close)) {
                stair_total += 1;
                let ratio = rows[j].err_l2 / rows[i].err_l2;
                if ratio < 1.0 { stair_ok += 1; }
                worst = worst.max(ratio);
            }
        }
        let final_err = rows.last().unwrap().err_l2;
        println!(
            "mu={mu}: segment {} rows, slope {:.1}, R2 {:.4}, stair {}/{} (worst ratio {:.3}), final {:.2e}, fail {:?}",
            pts.len(), slope, r2, stair_ok, stair_total, worst, final_err, series.failure
        );
    }
}
