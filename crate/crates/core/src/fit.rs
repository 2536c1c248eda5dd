//! Small least-squares helpers shared by the extraction routines.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = slope x + intercept`.
pub fn linear(x: &[f64], y: &[f64]) -> Result<Line> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    let n = x.len() as f64;
    if x.len() < 2 {
        return Err(Error::InsufficientSignal("a line needs at least two points".into()));
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientSignal("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(Line { slope, intercept, r_squared })
}

/// Fits `|a(x)| ~ A exp(-|x - x0| / L)` through `ln|a|`; returns `(L, line)`.
pub fn decay_length(distance: &[f64], modulus: &[f64]) -> Result<(f64, Line)> {
    let y: Vec<f64> = modulus.iter().map(|m| m.ln()).collect();
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InsufficientSignal("zero amplitude inside the fit window".into()));
    }
    let line = linear(distance, &y)?;
    if line.slope >= 0.0 {
        return Err(Error::InsufficientSignal(format!("profile does not decay (slope {})", line.slope)));
    }
    Ok((-1.0 / line.slope, line))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let l = linear(&x, &y).unwrap();
        assert!((l.slope - 2.0).abs() < 1e-14 && (l.intercept + 1.0).abs() < 1e-14);
        assert!((l.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exponential_decay() {
        let d: Vec<f64> = (2..8).map(f64::from).collect();
        let m: Vec<f64> = d.iter().map(|x| 0.3 * (-x / 1.7).exp()).collect();
        let (l, _) = decay_length(&d, &m).unwrap();
        assert!((l - 1.7).abs() < 1e-12);
        assert!(decay_length(&d, &vec![1.0; 6]).is_err());
    }
}
