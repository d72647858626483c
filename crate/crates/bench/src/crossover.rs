use serde::{Deserialize, Serialize};

use crate::config::BenchConfig;
use crate::timing::{backend_for, Cell, TimingBackend, Workload};
use crate::BenchError;

/// Smallest accepted R^2 of the ODE-time fit.
pub const MIN_R2: f64 = 0.99;

/// Largest accepted coefficient of variation of diagonalization times across
/// the sweep.
pub const MAX_DIAG_CV: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
}

/// Ordinary least squares `y = a + b x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len());
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    LinearFit {
        intercept,
        slope,
        r2,
    }
}

fn coefficient_of_variation(v: &[f64]) -> f64 {
    let m = v.len() as f64;
    let mean = v.iter().sum::<f64>() / m;
    if mean == 0.0 {
        return 0.0;
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / m;
    var.sqrt() / mean
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Valid,
    Invalid,
}

/// One `n` of the crossover sweep. Times in seconds, run times in us.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossoverRow {
    pub n: usize,
    /// Seconds per us of `t_qc`.
    pub ode_slope: f64,
    pub ode_intercept: f64,
    pub diag_time: f64,
    pub diag_cv: f64,
    /// `(diag_time - ode_intercept) / ode_slope`; absent when not positive.
    pub t_star: Option<f64>,
    pub fit_r2: f64,
    pub status: RowStatus,
    pub notes: Vec<String>,
    pub t_qc_list: Vec<f64>,
    pub ode_times: Vec<f64>,
    pub diag_times: Vec<f64>,
    pub ode_steps: Vec<usize>,
    pub workload_hash: String,
}

/// `t*` from the fitted line, or `None` when the diagonalization is not
/// slower than the ODE setup cost.
pub fn crossover_time(fit: &LinearFit, diag_time: f64) -> Option<f64> {
    let t = (diag_time - fit.intercept) / fit.slope;
    (fit.slope > 0.0 && diag_time > fit.intercept && t.is_finite() && t > 0.0).then_some(t)
}

/// A raw timing sample, one CSV line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawTiming {
    pub n: usize,
    pub kind: TimingKind,
    pub t_qc: f64,
    pub repetition: usize,
    pub seconds: f64,
    pub batch: usize,
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimingKind {
    Ode,
    Diag,
}

fn sweep(
    backend: &mut dyn TimingBackend,
    w: &Workload,
    t_list: &[f64],
    raw: &mut Vec<RawTiming>,
) -> Result<(Vec<f64>, Vec<f64>), BenchError> {
    let cells: Vec<Cell> = [TimingKind::Ode, TimingKind::Diag]
        .iter()
        .flat_map(|&kind| {
            t_list.iter().map(move |&t_qc| Cell {
                workload: w,
                kind,
                t_qc,
            })
        })
        .collect();
    let timed = backend.time_cells(&cells)?;
    for (cell, timing) in cells.iter().zip(&timed) {
        let steps = match cell.kind {
            TimingKind::Ode => w.ode_steps(cell.t_qc),
            TimingKind::Diag => 0,
        };
        raw.extend(timing.samples.iter().enumerate().map(|(r, s)| RawTiming {
            n: w.n,
            kind: cell.kind,
            t_qc: cell.t_qc,
            repetition: r,
            seconds: *s,
            batch: timing.batch,
            steps,
        }));
    }
    let (ode, diag) = timed.split_at(t_list.len());
    Ok((
        ode.iter().map(|c| c.median).collect(),
        diag.iter().map(|c| c.median).collect(),
    ))
}

/// Times one row with `backend`, appending raw samples to `raw`.
///
/// If the linear fit falls short of [`MIN_R2`] the sweep is widened once by
/// two longer run times and refitted; a row that still falls short is
/// marked invalid.
pub fn find_crossover_with(
    backend: &mut dyn TimingBackend,
    n: usize,
    cfg: &BenchConfig,
    raw: &mut Vec<RawTiming>,
) -> Result<CrossoverRow, BenchError> {
    cfg.validate()?;
    let w = Workload::new(n, cfg);
    let mut t_list = cfg.t_qc_list.clone();
    let (mut ode, mut diag) = sweep(backend, &w, &t_list, raw)?;
    let mut notes = Vec::new();
    let mut fit = fit_line(&t_list, &ode);
    if fit.r2 < MIN_R2 {
        let hi = t_list.iter().cloned().fold(0.0, f64::max);
        let extra = [2.0 * hi, 4.0 * hi];
        notes.push(format!(
            "R^2 = {:.4} below {MIN_R2}; sweep widened to t_qc = {} and {} us",
            fit.r2, extra[0], extra[1]
        ));
        let (o, d) = sweep(backend, &w, &extra, raw)?;
        t_list.extend(extra);
        ode.extend(o);
        diag.extend(d);
        fit = fit_line(&t_list, &ode);
    }
    let mut status = RowStatus::Valid;
    if fit.r2 < MIN_R2 {
        status = RowStatus::Invalid;
        notes.push(format!(
            "ODE timing not linear in t_qc: R^2 = {:.4}",
            fit.r2
        ));
    }
    let diag_cv = coefficient_of_variation(&diag);
    if diag_cv > MAX_DIAG_CV {
        status = RowStatus::Invalid;
        notes.push(format!(
            "diagonalization time varies by CV = {diag_cv:.3} across t_qc"
        ));
    }
    let mut sorted = diag.clone();
    sorted.sort_by(f64::total_cmp);
    let diag_time = sorted[sorted.len() / 2];
    let t_star = crossover_time(&fit, diag_time);
    if t_star.is_none() {
        notes.push("no crossover in range: diagonalization faster than ODE setup".into());
    }
    Ok(CrossoverRow {
        n,
        ode_slope: fit.slope,
        ode_intercept: fit.intercept,
        diag_time,
        diag_cv,
        t_star,
        fit_r2: fit.r2,
        status,
        notes,
        ode_steps: t_list.iter().map(|&t| w.ode_steps(t)).collect(),
        workload_hash: w.hash(&t_list),
        t_qc_list: t_list,
        ode_times: ode,
        diag_times: diag,
    })
}

/// [`find_crossover_with`] on the backend `cfg` selects.
pub fn find_crossover(
    n: usize,
    cfg: &BenchConfig,
) -> Result<(CrossoverRow, Vec<RawTiming>), BenchError> {
    let mut raw = Vec::new();
    let row = find_crossover_with(backend_for(cfg)?.as_mut(), n, cfg, &mut raw)?;
    Ok((row, raw))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SyntheticTimings;

    #[test]
    fn exact_line() {
        let f = fit_line(&[1.0, 2.0, 4.0], &[3.0, 5.0, 9.0]);
        assert!((f.slope - 2.0).abs() < 1e-12 && (f.intercept - 1.0).abs() < 1e-12);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_line_r2() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [0.0, 1.0, 0.0, 1.0];
        let f = fit_line(&x, &y);
        // y_hat = 0.2 + 0.2 x
        assert!((f.slope - 0.2).abs() < 1e-12);
        assert!((f.r2 - 0.2).abs() < 1e-12);
    }

    #[test]
    fn synthetic_crossover_is_two() {
        let mut cfg = BenchConfig::new(vec![8], vec![0.1, 0.5, 1.0]);
        cfg.synthetic_timings = Some(SyntheticTimings {
            ode_intercept: 0.0,
            ode_slope: 1.0,
            diag_time: 2.0,
            ..Default::default()
        });
        let (row, raw) = find_crossover(8, &cfg).unwrap();
        assert_eq!(row.t_star, Some(2.0));
        assert_eq!(row.status, RowStatus::Valid);
        assert_eq!(raw.len(), 3 * 2 * cfg.repetitions);
    }

    #[test]
    fn curved_timings_flag_the_row() {
        let mut cfg = BenchConfig::new(vec![8], vec![0.1, 0.2, 0.5, 1.0]);
        cfg.synthetic_timings = Some(SyntheticTimings {
            ode_intercept: 1.0,
            ode_slope: -50.0,
            ode_curvature: 40.0,
            diag_time: 2.0,
        });
        let (row, _) = find_crossover(8, &cfg).unwrap();
        assert_eq!(row.status, RowStatus::Invalid);
        assert!(row.fit_r2 < MIN_R2);
        // widened once
        assert_eq!(row.t_qc_list, vec![0.1, 0.2, 0.5, 1.0, 2.0, 4.0]);
    }

    #[test]
    fn no_crossover_when_diag_is_cheap() {
        let fit = LinearFit {
            intercept: 1.0,
            slope: 1.0,
            r2: 1.0,
        };
        assert_eq!(crossover_time(&fit, 0.5), None);
        assert_eq!(crossover_time(&fit, 1.0), None);
        assert_eq!(crossover_time(&fit, 3.0), Some(2.0));
    }
}
