use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bands::{branch_energy, Branch};
use super::green::{Channel, ChannelGreen};
use crate::error::{Error, Result};
use crate::model::WaveguideParams;

/// Bloch doublon `Psi(m, n) = e^{iK x_c} [psi0(r) + e^{i pi x_c} psi1(r)] / sqrt(N)`
/// with `x_c = (m + n)/2`, `r = m - n`.
///
/// The channel amplitudes are normalized per two-site cell:
/// `sum_r psi0(r)^2 + psi1(r)^2 = 1`, which normalizes the ordered-pair sum of
/// `|Psi|^2` to one on any ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoublonWavefunction {
    pub k: f64,
    pub branch: Branch,
    pub energy: f64,
    /// `psi0(0) / psi1(0)`, infinite when the sin channel is empty.
    pub ratio: f64,
    r_max: usize,
    psi: [Vec<f64>; 2],
    zeta: [f64; 2],
}

impl DoublonWavefunction {
    pub fn new(k: f64, branch: Branch, p: &WaveguideParams) -> Result<Self> {
        let energy = branch_energy(k, branch, p).ok_or(Error::UnresolvedBranch { k, branch: branch.name() })?;
        let g0 = ChannelGreen::new(k, energy, Channel::Cos, p.j)?;
        let g1 = ChannelGreen::new(k, energy, Channel::Sin, p.j)?;
        let (uc, us) = (g0.scale(), g1.scale());
        let um = p.signed_u_m();
        // null vector of [[uc - U_c, -U_m], [-U_m, us - U_c]] from its larger row
        let r0 = (uc - p.u_c, -um);
        let r1 = (-um, us - p.u_c);
        let (a0, a1) = if r0.0.hypot(r0.1) >= r1.0.hypot(r1.1) { (-r0.1, r0.0) } else { (r1.1, -r1.0) };
        let zeta = [g0.ratio, g1.ratio];
        let zmax = zeta[0].abs().max(zeta[1].abs());
        // truncate where the amplitude has fallen below 1e-18 of its peak
        let r_max = if zmax < 1e-300 { 1 } else { ((18.0 * 10f64.ln() / -zmax.ln()).ceil() as usize).clamp(1, 4096) };
        let chan = |a: f64, z: f64| (0..=r_max).map(|r| a * z.powi(r as i32)).collect::<Vec<_>>();
        let mut psi = [chan(a0, zeta[0]), chan(a1, zeta[1])];
        let norm: f64 = psi
            .iter()
            .map(|c| c[0] * c[0] + 2.0 * c[1..].iter().map(|v| v * v).sum::<f64>())
            .sum::<f64>()
            .sqrt();
        // fix the overall sign so the dominant channel is positive at r = 0
        let s = if a0.abs() >= a1.abs() { a0.signum() } else { a1.signum() };
        for c in psi.iter_mut() {
            c.iter_mut().for_each(|v| *v *= s / norm);
        }
        let ratio = psi[0][0] / psi[1][0];
        Ok(Self { k, branch, energy, ratio, r_max, psi, zeta })
    }

    /// Channel amplitude `psi_c(r)`; zero beyond the stored cut-off.
    pub fn channel(&self, c: Channel, r: i64) -> f64 {
        let v = &self.psi[c.index() as usize];
        v.get(r.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }

    pub fn decay_ratios(&self) -> [f64; 2] {
        self.zeta
    }

    /// Largest `|r|` with a stored amplitude.
    pub fn r_max(&self) -> usize {
        self.r_max
    }

    /// `u(x_c, r)` for `x_c = n + r/2`; `two_xc = 2 x_c` keeps it integral.
    pub fn u(&self, two_xc: i64, r: i64) -> Complex64 {
        let phase = Complex64::from_polar(1.0, PI * two_xc as f64 / 2.0);
        self.channel(Channel::Cos, r) + phase * self.channel(Channel::Sin, r)
    }

    /// `e^{iK x_c} u(x_c, r)` at photon sites `(m, n)` on an infinite lattice.
    pub fn bloch(&self, m: i64, n: i64) -> Complex64 {
        let two_xc = m + n;
        Complex64::from_polar(1.0, self.k * two_xc as f64 / 2.0) * self.u(two_xc, m - n)
    }

    /// Double-occupancy weight per cell, `psi0(0)^2 + psi1(0)^2`.
    pub fn bunching(&self) -> f64 {
        self.psi[0][0].powi(2) + self.psi[1][0].powi(2)
    }

    /// Amplitude grid over lower sites `n in sites` and separations `0..=r_max`,
    /// normalized so the stored values have unit norm.
    pub fn grid(&self, sites: std::ops::Range<i64>, r_max: usize) -> AmplitudeGrid {
        let r: Vec<usize> = (0..=r_max).collect();
        let mut values: Vec<Complex64> = Vec::with_capacity(r.len() * sites.clone().count());
        for &dr in &r {
            for n in sites.clone() {
                values.push(self.bloch(n + dr as i64, n));
            }
        }
        let norm = values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        values.iter_mut().for_each(|v| *v /= norm);
        AmplitudeGrid { sites: sites.collect(), r, values, psi0: 1.0 / norm }
    }
}

/// Doublon amplitudes on a finite `(n, r)` window; `values[r_idx * sites.len() + site_idx]`
/// belongs to photons at `(n + r, n)`, centre of mass `x_c = n + r/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeGrid {
    pub sites: Vec<i64>,
    pub r: Vec<usize>,
    pub values: Vec<Complex64>,
    /// Factor that normalized the raw Bloch amplitudes on this grid.
    pub psi0: f64,
}

impl AmplitudeGrid {
    pub fn at(&self, site_idx: usize, r_idx: usize) -> Complex64 {
        self.values[r_idx * self.sites.len() + site_idx]
    }
}
