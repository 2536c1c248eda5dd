use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::WaveguideParams;

/// The two relative-motion channels: `0` couples through `cos(K/2)`,
/// `1` through `sin(K/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    Cos,
    Sin,
}

impl Channel {
    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            0 => Ok(Channel::Cos),
            1 => Ok(Channel::Sin),
            _ => Err(Error::param("branch", format!("channel index must be 0 or 1, got {i}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Channel::Cos => 0,
            Channel::Sin => 1,
        }
    }

    /// Signed coefficient `c` of the denominator `E + c cos q`.
    pub fn coefficient(self, k: f64, j: f64) -> f64 {
        match self {
            Channel::Cos => 4.0 * j * (k / 2.0).cos(),
            Channel::Sin => -4.0 * j * (k / 2.0).sin(),
        }
    }
}

/// Closed form of the channel propagator: `f(r) = prefactor * ratio^|r|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGreen {
    pub prefactor: f64,
    pub ratio: f64,
}

impl ChannelGreen {
    pub fn new(k: f64, e: f64, channel: Channel, j: f64) -> Result<Self> {
        let c = channel.coefficient(k, j);
        if !(e.abs() > c.abs()) {
            return Err(Error::InsideBand { energy: e, edge: c.abs(), branch: channel.index() });
        }
        let root = (e * e - c * c).sqrt();
        // (|E| - root)/|c| written without cancellation
        let ratio = -e.signum() * c / (e.abs() + root);
        Ok(Self { prefactor: e.signum() * TAU / root, ratio })
    }

    pub fn at(&self, r: i64) -> f64 {
        self.prefactor * self.ratio.powi(r.unsigned_abs() as i32)
    }

    /// `sqrt(E^2 - c^2)`, the effective interaction scale of the channel.
    pub fn scale(&self) -> f64 {
        TAU / self.prefactor.abs()
    }
}

/// `f(K, E, r) = \int_{-pi}^{pi} e^{iqr} / (E + c cos q) dq` for the chosen channel.
pub fn green_f(k: f64, e: f64, r: i64, channel: Channel, p: &WaveguideParams) -> Result<f64> {
    Ok(ChannelGreen::new(k, e, channel, p.j)?.at(r))
}

/// Correlation length of a bound pair at `(K, E)`: the slower of the two
/// channel decays, read off from the ratio `f(r+1)/f(r)`.
pub fn correlation_length(k: f64, e: f64, p: &WaveguideParams) -> Result<f64> {
    let z = [Channel::Cos, Channel::Sin]
        .iter()
        .map(|&c| ChannelGreen::new(k, e, c, p.j).map(|g| g.ratio.abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    Ok(if z == 0.0 { 0.0 } else { -1.0 / z.ln() })
}

/// The band-edge expression `1 / ln(2 sqrt2 J / (-E - sqrt(E^2 - 8 J^2)))`.
pub fn correlation_length_k0(e: f64, j: f64) -> f64 {
    1.0 / (2.0 * 2f64.sqrt() * j / (-e - (e * e - 8.0 * j * j).sqrt())).ln()
}

pub const K0: f64 = PI / 2.0;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Boundary;

    fn params() -> WaveguideParams {
        WaveguideParams::new(1.0, 4.0, 0.2, 40, Boundary::Periodic).unwrap()
    }

    #[test]
    fn band_edge_value() {
        let e = -(4.2f64.powi(2) + 8.0).sqrt();
        let f = green_f(K0, e, 0, Channel::Cos, &params()).unwrap();
        assert!((f + TAU / 4.2).abs() < 1e-12);
    }

    #[test]
    fn pole_inside_band() {
        assert!(matches!(green_f(0.3, -3.0, 0, Channel::Cos, &params()), Err(Error::InsideBand { .. })));
        assert!(green_f(0.3, -3.0, 0, Channel::Sin, &params()).is_ok());
    }

    #[test]
    fn k0_length_formula() {
        let e = -(4.2f64.powi(2) + 8.0).sqrt();
        let l = correlation_length(K0, e, &params()).unwrap();
        assert!((l - correlation_length_k0(e, 1.0)).abs() < 1e-12);
        assert!((l - 0.8429).abs() < 1e-3);
    }
}
