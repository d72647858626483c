//! Structural timing claims measured on the build machine.

use std::sync::Mutex;

use sesim_bench::{
    backend_for, crossover_time, find_crossover, fit_line, time_ode, BenchConfig, Cell, RowStatus,
    TimingKind, Workload,
};

// timing cells must not overlap
static CLOCK: Mutex<()> = Mutex::new(());

fn cfg(t_qc_list: Vec<f64>) -> BenchConfig {
    let mut c = BenchConfig::new(vec![], t_qc_list);
    c.n_list = vec![2];
    c.repetitions = 5;
    c
}

fn ode(workload: &Workload, t_qc: f64) -> Cell<'_> {
    Cell {
        workload,
        kind: TimingKind::Ode,
        t_qc,
    }
}

fn diag(workload: &Workload, t_qc: f64) -> Cell<'_> {
    Cell {
        workload,
        kind: TimingKind::Diag,
        t_qc,
    }
}

/// Median seconds of cells timed together, so machine slowdowns hit them alike.
fn medians(c: &BenchConfig, cells: &[Cell]) -> Vec<f64> {
    let timed = backend_for(c).unwrap().time_cells(cells).unwrap();
    timed.iter().map(|t| t.median).collect()
}

#[test]
fn doubling_t_qc_doubles_ode_time() {
    let _g = CLOCK.lock().unwrap_or_else(|e| e.into_inner());
    let c = cfg(vec![1e-4, 1e-3]);
    let w = Workload::new(256, &c);
    let m = medians(&c, &[ode(&w, 2e-4), ode(&w, 4e-4)]);
    let ratio = m[1] / m[0];
    assert!((ratio - 2.0).abs() <= 0.15 * 2.0, "ratio {ratio}");
}

#[test]
fn tiny_run_costs_setup_only() {
    let _g = CLOCK.lock().unwrap_or_else(|e| e.into_inner());
    let c = cfg(vec![1e-4, 1e-3]);
    let w = Workload::new(64, &c);
    assert_eq!(w.ode_steps(1e-12), 1);
    let t = time_ode(64, 1e-12, &c).unwrap();
    assert!(t.median > 0.0);
    // sub-millisecond cells are batched
    assert!(t.batch > 1);
}

#[test]
fn per_step_cost_grows_as_n_squared() {
    let _g = CLOCK.lock().unwrap_or_else(|e| e.into_inner());
    let c = cfg(vec![1e-4, 1e-3]);
    let t = 5e-4;
    let ws: Vec<Workload> = [64, 128, 256]
        .iter()
        .map(|&n| Workload::new(n, &c))
        .collect();
    let cells: Vec<Cell> = ws.iter().map(|w| ode(w, t)).collect();
    let costs: Vec<f64> = medians(&c, &cells)
        .iter()
        .zip(&ws)
        .map(|(m, w)| m / w.ode_steps(t) as f64)
        .collect();
    for w in costs.windows(2) {
        let r = w[1] / w[0];
        assert!(
            (2.0..=8.0).contains(&r),
            "doubling n scaled per-step cost by {r}"
        );
    }
}

#[test]
fn diag_time_ignores_t_qc() {
    let _g = CLOCK.lock().unwrap_or_else(|e| e.into_inner());
    let c = cfg(vec![1.0, 1e3]);
    let w = Workload::new(128, &c);
    let timed = backend_for(&c)
        .unwrap()
        .time_cells(&[diag(&w, 1.0), diag(&w, 1e3)])
        .unwrap();
    let (a, b) = (&timed[0], &timed[1]);
    let spread = (a.max - a.min).max(b.max - b.min);
    let tol = spread.max(0.2 * a.median);
    assert!(
        (a.median - b.median).abs() <= tol,
        "{} vs {}",
        a.median,
        b.median
    );
}

#[test]
fn diag_time_grows_steeply() {
    let _g = CLOCK.lock().unwrap_or_else(|e| e.into_inner());
    let c = cfg(vec![1e-4, 1e-3]);
    let (ws, wl) = (Workload::new(100, &c), Workload::new(400, &c));
    let m = medians(&c, &[diag(&ws, 1e-4), diag(&wl, 1e-4)]);
    // cubic would be 64x
    assert!(m[1] / m[0] > 10.0, "{} -> {}", m[0], m[1]);
}

#[test]
fn crossover_at_n256_is_inside_sweep() {
    let _g = CLOCK.lock().unwrap_or_else(|e| e.into_inner());
    let mut c = cfg(vec![1e-4, 2e-4, 5e-4, 1e-3]);
    c.repetitions = 3;
    let (row, raw) = find_crossover(256, &c).unwrap();
    assert_eq!(row.status, RowStatus::Valid, "{:?}", row.notes);
    let t_star = row.t_star.expect("crossover");
    assert!(t_star > 0.0 && t_star < 1e-3, "t* = {t_star}");
    assert!(row.fit_r2 >= 0.99);
    assert_eq!(raw.len(), row.t_qc_list.len() * 2 * c.repetitions);
}

#[test]
fn halving_theta_halves_crossover() {
    let _g = CLOCK.lock().unwrap_or_else(|e| e.into_inner());
    let mut c = cfg(vec![1e-4, 2e-4, 5e-4, 1e-3]);
    c.repetitions = 3;
    let coarse = Workload::new(128, &c);
    c.theta_max /= 2.0;
    let fine = Workload::new(128, &c);
    let ts = c.t_qc_list.clone();
    let mut cells: Vec<Cell> = ts.iter().map(|&t| ode(&coarse, t)).collect();
    cells.extend(ts.iter().map(|&t| ode(&fine, t)));
    cells.push(diag(&coarse, ts[0]));
    let m = medians(&c, &cells);
    let k = ts.len();
    let (fc, ff) = (fit_line(&ts, &m[..k]), fit_line(&ts, &m[k..2 * k]));
    let slope_ratio = ff.slope / fc.slope;
    assert!(
        (1.6..=2.4).contains(&slope_ratio),
        "slope ratio {slope_ratio}"
    );
    let d = m[2 * k];
    let ratio = crossover_time(&fc, d).unwrap() / crossover_time(&ff, d).unwrap();
    assert!((1.5..=2.7).contains(&ratio), "t* ratio {ratio}");
}
