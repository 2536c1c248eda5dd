use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Periodic,
    Open,
}

/// Which site parity carries `U_c + U_m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Stagger {
    #[default]
    EvenPlus,
    OddPlus,
}

impl Stagger {
    pub fn flipped(self) -> Self {
        match self {
            Stagger::EvenPlus => Stagger::OddPlus,
            Stagger::OddPlus => Stagger::EvenPlus,
        }
    }

    /// Sign of `U_m` on even sites.
    pub fn even_sign(self) -> f64 {
        match self {
            Stagger::EvenPlus => 1.0,
            Stagger::OddPlus => -1.0,
        }
    }
}

/// Lattice couplings of the Kerr waveguide.
///
/// Energies are in units of the hopping `j`, which is kept explicit so that
/// scaling tests can run at `j != 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveguideParams {
    pub j: f64,
    pub u_c: f64,
    pub u_m: f64,
    pub n: usize,
    pub boundary: Boundary,
    pub stagger: Stagger,
}

impl WaveguideParams {
    pub fn new(j: f64, u_c: f64, u_m: f64, n: usize, boundary: Boundary) -> Result<Self> {
        let p = Self { j, u_c, u_m, n, boundary, stagger: Stagger::EvenPlus };
        p.validate()?;
        Ok(p)
    }

    pub fn with_stagger(mut self, stagger: Stagger) -> Self {
        self.stagger = stagger;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j > 0.0 && self.j.is_finite()) {
            return Err(Error::param("J", format!("must be positive and finite, got {}", self.j)));
        }
        if !self.u_c.is_finite() || !self.u_m.is_finite() {
            return Err(Error::param("U", "interaction energies must be finite"));
        }
        if self.n < 4 {
            return Err(Error::param("N", format!("need at least 4 sites, got {}", self.n)));
        }
        if self.boundary == Boundary::Periodic && self.n % 2 != 0 {
            return Err(Error::param("N", format!("periodic lattice needs even N for the period-2 staggering, got {}", self.n)));
        }
        Ok(())
    }

    /// On-site interaction `U_n`.
    pub fn u_at(&self, site: usize) -> f64 {
        let s = if site % 2 == 0 { 1.0 } else { -1.0 };
        self.u_c + s * self.stagger.even_sign() * self.u_m
    }

    /// `U_m` as seen from the even sublattice; negative under `OddPlus`.
    pub fn signed_u_m(&self) -> f64 {
        self.stagger.even_sign() * self.u_m
    }

    /// Neighbour of `site` in direction `+1`, if any.
    pub fn right(&self, site: usize) -> Option<usize> {
        if site + 1 < self.n {
            Some(site + 1)
        } else if self.boundary == Boundary::Periodic {
            Some(0)
        } else {
            None
        }
    }

    /// Parity of sites that carry `U_c + U_m` (0 for even).
    pub fn plus_parity(&self) -> usize {
        match self.stagger {
            Stagger::EvenPlus => 0,
            Stagger::OddPlus => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Emitter {
    pub omega: f64,
    pub g: f64,
    pub site: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EmitterSet {
    pub emitters: Vec<Emitter>,
}

impl EmitterSet {
    pub fn new(emitters: Vec<Emitter>) -> Self {
        Self { emitters }
    }

    pub fn len(&self) -> usize {
        self.emitters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.emitters.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Emitter> {
        self.emitters.iter()
    }

    pub fn validate(&self, p: &WaveguideParams) -> Result<()> {
        for (index, e) in self.emitters.iter().enumerate() {
            if e.site >= p.n {
                return Err(Error::SiteOutOfRange { index, site: e.site, n: p.n });
            }
            if !e.omega.is_finite() || !e.g.is_finite() {
                return Err(Error::param("emitter", format!("emitter {index} has non-finite omega or g")));
            }
        }
        Ok(())
    }

    /// Single-photon elimination guard: every emitter must sit at least
    /// `ratio * g` outside the band `[-2J, 2J]`.
    pub fn check_dispersive(&self, p: &WaveguideParams, ratio: f64) -> Result<()> {
        for e in &self.emitters {
            let delta = e.omega.abs() - 2.0 * p.j;
            if delta <= 0.0 {
                return Err(Error::Resonance { omega: e.omega, edge: 2.0 * p.j });
            }
            if delta < ratio * e.g.abs() {
                return Err(Error::Regime(format!(
                    "detuning {delta} from the single-photon band edge is below {ratio} g = {}",
                    ratio * e.g.abs()
                )));
            }
        }
        Ok(())
    }
}
