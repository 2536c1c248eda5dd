use serde::{Deserialize, Serialize};

use crate::dynamics::pair_lamb_shift;
use crate::error::Result;
use crate::model::{Emitter, EmitterSet};

/// Two emitters excited together; `first.site <= second.site` is not required.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmitterPair {
    pub first: Emitter,
    pub second: Emitter,
}

impl EmitterPair {
    pub fn new(first: Emitter, second: Emitter) -> Self {
        Self { first, second }
    }

    pub fn collocated(omega: f64, g: f64, site: usize) -> Self {
        let e = Emitter { omega, g, site };
        Self::new(e, e)
    }

    /// `x_m = (n_1 + n_2) / 2`.
    pub fn centre(&self) -> f64 {
        0.5 * (self.first.site + self.second.site) as f64
    }

    /// Intra-pair distance `d^e`.
    pub fn separation(&self) -> usize {
        self.first.site.abs_diff(self.second.site)
    }

    /// `omega_a + omega_b`.
    pub fn bare_energy(&self) -> f64 {
        self.first.omega + self.second.omega
    }

    /// Bare energy plus the single-photon Lamb shift of both emitters.
    pub fn energy(&self, j: f64) -> Result<f64> {
        Ok(self.bare_energy() + pair_lamb_shift(&self.first, &self.second, j)?)
    }

    pub fn emitters(pairs: &[EmitterPair]) -> EmitterSet {
        EmitterSet::new(pairs.iter().flat_map(|p| [p.first, p.second]).collect())
    }
}
