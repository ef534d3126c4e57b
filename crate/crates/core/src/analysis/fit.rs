//! Ordinary least squares for the scaling laws: linear in N, or linear in
//! log N with the base left open (the three common bases are all fitted,
//! since the family of models is the same and only the slope rescales).

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitForm {
    /// y = a*N + b
    Linear,
    /// y = a*log(N) + b
    LogLinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    Two,
    E,
    Ten,
}

impl LogBase {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            LogBase::Two => x.log2(),
            LogBase::E => x.ln(),
            LogBase::Ten => x.log10(),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            LogBase::Two => "log2",
            LogBase::E => "ln",
            LogBase::Ten => "log10",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub form: FitForm,
    pub base: Option<LogBase>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// The N values the fit was computed over.
    pub n_grid: Vec<f64>,
}

fn ols(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 * sxx.max(1.0) {
        return Err(Error::Fit("degenerate grid: all abscissae equal".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - slope * x - intercept;
            e * e
        })
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok((slope, intercept, r_squared))
}

/// Fits the requested form to (N, metric) points. The linear form yields
/// one result; the log form yields one per base so the caller can compare
/// coefficients across conventions.
pub fn fit_scaling(points: &[(f64, f64)], form: FitForm) -> Result<Vec<FitResult>> {
    if points.len() < 3 {
        return Err(Error::Fit(format!(
            "need at least 3 grid points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Fit("non-finite value in fit input".into()));
    }
    let n_grid: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    match form {
        FitForm::Linear => {
            let (slope, intercept, r_squared) = ols(&n_grid, &ys)?;
            Ok(vec![FitResult {
                form,
                base: None,
                slope,
                intercept,
                r_squared,
                n_grid,
            }])
        }
        FitForm::LogLinear => {
            if points.iter().any(|(x, _)| *x <= 0.0) {
                return Err(Error::Fit("log fit needs positive N".into()));
            }
            [LogBase::Two, LogBase::E, LogBase::Ten]
                .into_iter()
                .map(|base| {
                    let xs: Vec<f64> = n_grid.iter().map(|&x| base.apply(x)).collect();
                    let (slope, intercept, r_squared) = ols(&xs, &ys)?;
                    Ok(FitResult {
                        form,
                        base: Some(base),
                        slope,
                        intercept,
                        r_squared,
                        n_grid: n_grid.clone(),
                    })
                })
                .collect()
        }
    }
}
