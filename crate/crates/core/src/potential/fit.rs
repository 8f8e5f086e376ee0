use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// One telescoped term `|Ψ_{L_{i,m}}|` with its standard error (0 if exact).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QcdPoint {
    pub m: u32,
    pub value: f64,
    pub stderr: f64,
}

impl QcdPoint {
    pub fn exact(m: u32, value: f64) -> Self {
        QcdPoint { m, value, stderr: 0.0 }
    }
}

/// Fit of `|Ψ| ≤ C₁ 1_{m ≤ l} m + C₂ 1_{m > l} m e^{-λm}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QcdFit {
    pub c1: f64,
    pub c2: f64,
    pub lambda: f64,
    pub lambda_stderr: f64,
    pub knee: u32,
    /// Points beyond the knee that entered the fit.
    pub used: usize,
}

impl QcdFit {
    /// `λ > 0` and, when it has an error bar, `λ > z·stderr`.
    pub fn decays(&self, z: f64) -> bool {
        self.lambda > 1e-9 && self.lambda > z * self.lambda_stderr
    }
}

/// Least squares of `ln(|Ψ|/m)` against `m` over the points with `m > knee`
/// and `|Ψ| > 0`. Points with an error bar are weighted by
/// `(|Ψ| / stderr)^2`, the inverse variance of the logarithm; when no point
/// has one the fit is unweighted. The slope error uses the residual scatter.
pub fn qcd_fit(points: &[QcdPoint], knee: u32) -> Result<QcdFit> {
    let c1 = points
        .iter()
        .filter(|p| p.m <= knee && p.m > 0)
        .map(|p| math::abs(p.value) / p.m as f64)
        .fold(0.0, f64::max);
    let tail: Vec<&QcdPoint> = points
        .iter()
        .filter(|p| p.m > knee && p.m > 0 && math::abs(p.value) > 0.0)
        .collect();
    if tail.len() < 4 {
        return Err(Error::InsufficientPoints {
            have: tail.len(),
            need: 4,
        });
    }
    let weighted = tail.iter().any(|p| p.stderr > 0.0);
    let floor = 1e-300;
    let data: Vec<(f64, f64, f64)> = tail
        .iter()
        .map(|p| {
            let v = math::abs(p.value);
            let w = if weighted {
                let rel = (p.stderr / v).max(1e-6);
                1.0 / (rel * rel).max(floor)
            } else {
                1.0
            };
            (p.m as f64, math::ln(v / p.m as f64), w)
        })
        .collect();
    let sw: f64 = data.iter().map(|d| d.2).sum();
    let mx = data.iter().map(|d| d.2 * d.0).sum::<f64>() / sw;
    let my = data.iter().map(|d| d.2 * d.1).sum::<f64>() / sw;
    let sxx: f64 = data.iter().map(|d| d.2 * (d.0 - mx) * (d.0 - mx)).sum();
    let sxy: f64 = data.iter().map(|d| d.2 * (d.0 - mx) * (d.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::FitRefused("all points share one m".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let n = data.len() as f64;
    let rss: f64 = data
        .iter()
        .map(|d| {
            let r = d.1 - intercept - slope * d.0;
            d.2 * r * r
        })
        .sum();
    let scale = rss / (n - 2.0);
    Ok(QcdFit {
        c1,
        c2: math::exp(intercept),
        lambda: -slope,
        lambda_stderr: math::sqrt(scale / sxx),
        knee,
        used: data.len(),
    })
}
