use serde::Serialize;

use crate::error::{Error, Result};

/// A fitted growth rate of per-horizon values (log-counts or entropies).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyEstimate {
    pub horizons: Vec<f64>,
    pub values: Vec<f64>,
    /// Least-squares slope of value against horizon.
    pub slope: f64,
    pub intercept: f64,
    /// Slope between the last two points.
    pub last_difference: f64,
}

pub fn entropy_rate(points: &[(f64, f64)]) -> Result<EntropyEstimate> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints { need: 3, got: points.len() });
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("horizons must not all coincide".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let [.., a, b] = points else { unreachable!("at least three points") };
    Ok(EntropyEstimate {
        horizons: points.iter().map(|p| p.0).collect(),
        values: points.iter().map(|p| p.1).collect(),
        slope,
        intercept: my - slope * mx,
        last_difference: (b.1 - a.1) / (b.0 - a.0),
    })
}
