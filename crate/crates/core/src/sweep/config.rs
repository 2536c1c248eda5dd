//! Flat `key = value` run configuration shared by every subcommand.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{omega_for_delta, DetuningConvention, DbsWindow};
use crate::error::{Error, Result};
use crate::model::{Boundary, Stagger, WaveguideParams};
use crate::propagate::Integrator;
use crate::spectrum::HowMany;

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "DOUBLON_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Bands,
    Spectrum,
    Dynamics,
    #[serde(rename = "fourbody")]
    FourBody,
    SweepDq,
    SweepDetuning,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Bands => "bands",
            Self::Spectrum => "spectrum",
            Self::Dynamics => "dynamics",
            Self::FourBody => "fourbody",
            Self::SweepDq => "sweep-dq",
            Self::SweepDetuning => "sweep-detuning",
        }
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Self::Bands, Self::Spectrum, Self::Dynamics, Self::FourBody, Self::SweepDq, Self::SweepDetuning]
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment '{s}'")))
    }
}

/// `start:stop:count`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(start: f64, stop: f64, count: usize) -> Self {
        Self { start, stop, count }
    }

    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => vec![],
            1 => vec![self.start],
            n => (0..n).map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64).collect(),
        }
    }
}

impl FromStr for AxisSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || Error::Config(format!("axis '{s}' is not start:stop:count"));
        match parts.as_slice() {
            [a, b, c] => Ok(Self {
                start: a.parse().map_err(|_| bad())?,
                stop: b.parse().map_err(|_| bad())?,
                count: c.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for AxisSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

/// Units of the detuning axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetuningUnit {
    Absolute,
    /// Multiples of `|J_RS|` of the resonant reduced model.
    Jrs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub j: f64,
    pub u_c: f64,
    pub u_m: f64,
    /// Lattice size; `None` picks 60 for spectra and 401 otherwise.
    pub n: Option<usize>,
    /// `None` picks periodic for spectra and open otherwise.
    pub boundary: Option<Boundary>,
    pub stagger: Stagger,
    pub g: f64,
    pub delta_ii: f64,
    pub convention: DetuningConvention,
    pub t_end: f64,
    pub dt_store: f64,
    pub integrator: Integrator,
    pub spbs_window: usize,
    pub dbs_window: DbsWindow,
    pub g2_rmax: usize,
    pub snapshot: bool,
    pub k_count: usize,
    pub how: HowMany,
    pub bunching_threshold: f64,
    /// Distance between pair centres.
    pub d_q: f64,
    /// Intra-pair distances `d^e_1`, `d^e_2`.
    pub d1: usize,
    pub d2: usize,
    pub dq_axis: AxisSpec,
    pub delta3_axis: AxisSpec,
    pub delta4_axis: AxisSpec,
    pub detuning_unit: DetuningUnit,
    /// Four-body runs stop at `t_factor` times the reduced swap time...
    pub t_factor: f64,
    /// ...but never later than this.
    pub t_max: f64,
    pub output_dir: Option<PathBuf>,
    pub plot: bool,
    /// Worker threads for sweeps; 0 uses every core.
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            experiment: Experiment::Dynamics,
            j: 1.0,
            u_c: 4.0,
            u_m: 0.2,
            n: None,
            boundary: None,
            stagger: Stagger::EvenPlus,
            g: 0.1,
            delta_ii: 0.03,
            convention: DetuningConvention::Dressed,
            t_end: 1000.0,
            dt_store: 1.0,
            integrator: Integrator::default(),
            spbs_window: crate::dynamics::DEFAULT_SPBS_WINDOW,
            dbs_window: DbsWindow::default(),
            g2_rmax: 10,
            snapshot: true,
            k_count: 101,
            how: HowMany::All,
            bunching_threshold: crate::spectrum::DEFAULT_BUNCHING_THRESHOLD,
            d_q: 8.0,
            d1: 0,
            d2: 0,
            dq_axis: AxisSpec::new(4.0, 14.0, 6),
            delta3_axis: AxisSpec::new(-1.0, 1.0, 5),
            delta4_axis: AxisSpec::new(-1.0, 1.0, 5),
            detuning_unit: DetuningUnit::Jrs,
            t_factor: 3.0,
            t_max: 30000.0,
            output_dir: None,
            plot: false,
            threads: 0,
        }
    }
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::Config(format!("cannot parse '{v}' for key '{key}'")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("cannot parse '{v}' for key '{key}' as a boolean"))),
    }
}

impl RunConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self { experiment, ..Self::default() }
    }

    /// Applies `key=value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value, got '{line}'", lineno + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    /// One `--set key=value` override.
    pub fn set_pair(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("override '{kv}' is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        match key {
            "experiment" => self.experiment = v.parse()?,
            "j" => self.j = parse(key, v)?,
            "u_c" => self.u_c = parse(key, v)?,
            "u_m" => self.u_m = parse(key, v)?,
            "n" => self.n = Some(parse(key, v)?),
            "boundary" => {
                self.boundary = Some(match v {
                    "open" => Boundary::Open,
                    "periodic" => Boundary::Periodic,
                    _ => return Err(Error::Config(format!("boundary '{v}' (open|periodic)"))),
                })
            }
            "stagger" => {
                self.stagger = match v {
                    "even_plus" => Stagger::EvenPlus,
                    "odd_plus" => Stagger::OddPlus,
                    _ => return Err(Error::Config(format!("stagger '{v}' (even_plus|odd_plus)"))),
                }
            }
            "g" => self.g = parse(key, v)?,
            "delta_ii" => self.delta_ii = parse(key, v)?,
            "convention" => self.convention = v.parse()?,
            "t_end" => self.t_end = parse(key, v)?,
            "dt_store" => self.dt_store = parse(key, v)?,
            "integrator" => {
                self.integrator = match v {
                    "chebyshev" => Integrator::default(),
                    "rk4" => Integrator::Rk4 { dt: None },
                    _ => return Err(Error::Config(format!("integrator '{v}' (chebyshev|rk4)"))),
                }
            }
            "spbs_window" => self.spbs_window = parse(key, v)?,
            "dbs_start" => self.dbs_window.start = parse(key, v)?,
            "dbs_count" => self.dbs_window.count = parse(key, v)?,
            "g2_rmax" => self.g2_rmax = parse(key, v)?,
            "snapshot" => self.snapshot = parse_bool(key, v)?,
            "k_count" => self.k_count = parse(key, v)?,
            "how" => {
                self.how = match v.split_once(':') {
                    None if v == "all" => HowMany::All,
                    Some(("lowest", k)) => HowMany::Lowest(parse(key, k)?),
                    _ => return Err(Error::Config(format!("how '{v}' (all|lowest:K)"))),
                }
            }
            "bunching_threshold" => self.bunching_threshold = parse(key, v)?,
            "d_q" => self.d_q = parse(key, v)?,
            "d1" => self.d1 = parse(key, v)?,
            "d2" => self.d2 = parse(key, v)?,
            "dq_axis" => self.dq_axis = v.parse()?,
            "delta3_axis" => self.delta3_axis = v.parse()?,
            "delta4_axis" => self.delta4_axis = v.parse()?,
            "detuning_unit" => {
                self.detuning_unit = match v {
                    "absolute" => DetuningUnit::Absolute,
                    "jrs" => DetuningUnit::Jrs,
                    _ => return Err(Error::Config(format!("detuning_unit '{v}' (absolute|jrs)"))),
                }
            }
            "t_factor" => self.t_factor = parse(key, v)?,
            "t_max" => self.t_max = parse(key, v)?,
            "output_dir" => self.output_dir = Some(PathBuf::from(v)),
            "plot" => self.plot = parse_bool(key, v)?,
            "threads" => self.threads = parse(key, v)?,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn sites(&self) -> usize {
        self.n.unwrap_or(if self.experiment == Experiment::Spectrum { 60 } else { 401 })
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary.unwrap_or(if self.experiment == Experiment::Spectrum { Boundary::Periodic } else { Boundary::Open })
    }

    pub fn params(&self) -> Result<WaveguideParams> {
        Ok(WaveguideParams::new(self.j, self.u_c, self.u_m, self.sites(), self.boundary())?.with_stagger(self.stagger))
    }

    /// Output directory: config, then the environment, then `./out`.
    pub fn out_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    /// Checks every precondition the chosen experiment relies on, before any
    /// compute. The first violation is returned as a config error naming it.
    pub fn validate(&self) -> Result<()> {
        let fail = |what: &str, e: String| Err(Error::Config(format!("{what}: {e}")));
        let p = match self.params() {
            Ok(p) => p,
            Err(e) => return fail("waveguide parameters", e.to_string()),
        };
        if self.experiment == Experiment::Bands || self.experiment == Experiment::Spectrum {
            if !(self.u_c > 0.0) {
                return fail("doublon bands", "U_c must be positive".into());
            }
            if self.experiment == Experiment::Bands && self.k_count == 0 {
                return fail("momentum grid", "k_count must be at least 1".into());
            }
            if self.experiment == Experiment::Spectrum {
                if let HowMany::Lowest(0) = self.how {
                    return fail("spectrum", "lowest:K needs K >= 1".into());
                }
                if !(0.0..=1.0).contains(&self.bunching_threshold) {
                    return fail("doublon classification", "bunching_threshold must lie in [0, 1]".into());
                }
            }
            return Ok(());
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return fail("emitter coupling", "g must be positive".into());
        }
        if !(self.delta_ii > 0.0) {
            return fail("pair detuning", "delta_II must be positive (pair above the lower doublon band edge)".into());
        }
        let omega = match omega_for_delta(&p, self.g, self.delta_ii, self.convention) {
            Ok(w) => w,
            Err(e) => return fail("pair frequency", e.to_string()),
        };
        if !(self.dt_store > 0.0) {
            return fail("time grid", "dt_store must be positive".into());
        }
        match self.experiment {
            Experiment::Dynamics => {
                if !(self.t_end >= self.dt_store && self.t_end.is_finite()) {
                    return fail("time grid", "t_end must be finite and at least dt_store".into());
                }
                if self.d1 % 2 != 0 {
                    return fail("pair layout", "d1 must be even so both emitters sit on the U_c + U_m sublattice".into());
                }
                if crate::dynamics::centre_plus_site(&p) + self.d1 >= p.n {
                    return fail("pair layout", format!("d1 = {} does not fit on {} sites", self.d1, p.n));
                }
            }
            _ => {
                // the reduced swap time sets the observation window
                if omega.abs() - 2.0 * self.j < 5.0 * self.g {
                    return fail(
                        "dispersive single-photon regime",
                        format!("|omega| - 2J = {} is below 5 g", omega.abs() - 2.0 * self.j),
                    );
                }
                if !(self.t_factor > 0.0 && self.t_max >= self.dt_store) {
                    return fail("observation window", "t_factor must be positive and t_max at least dt_store".into());
                }
                let dqs = match self.experiment {
                    Experiment::SweepDq => self.dq_axis.values(),
                    _ => vec![self.d_q],
                };
                if dqs.is_empty() {
                    return fail("D_q axis", "count must be at least 1".into());
                }
                for d in dqs {
                    if let Err(e) = super::layout::two_pair_layout(&p, omega, self.g, d, self.d1, self.d2) {
                        return fail("two-pair layout", e.to_string());
                    }
                }
                if self.experiment == Experiment::SweepDetuning && (self.delta3_axis.count == 0 || self.delta4_axis.count == 0) {
                    return fail("detuning axes", "counts must be at least 1".into());
                }
            }
        }
        Ok(())
    }

    /// `key=value` text that [`RunConfig::apply_text`] reads back.
    pub fn to_text(&self) -> String {
        let boundary = match self.boundary() {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        };
        let stagger = match self.stagger {
            Stagger::EvenPlus => "even_plus",
            Stagger::OddPlus => "odd_plus",
        };
        let integrator = match self.integrator {
            Integrator::Chebyshev { .. } => "chebyshev",
            Integrator::Rk4 { .. } => "rk4",
        };
        let how = match self.how {
            HowMany::All => "all".to_string(),
            HowMany::Lowest(k) => format!("lowest:{k}"),
        };
        let convention = match self.convention {
            DetuningConvention::Dressed => "dressed",
            DetuningConvention::Bare => "bare",
        };
        let unit = match self.detuning_unit {
            DetuningUnit::Absolute => "absolute",
            DetuningUnit::Jrs => "jrs",
        };
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            s.push_str(k);
            s.push('=');
            s.push_str(&v);
            s.push('\n');
        };
        kv("experiment", self.experiment.name().into());
        kv("j", self.j.to_string());
        kv("u_c", self.u_c.to_string());
        kv("u_m", self.u_m.to_string());
        kv("n", self.sites().to_string());
        kv("boundary", boundary.into());
        kv("stagger", stagger.into());
        kv("g", self.g.to_string());
        kv("delta_ii", self.delta_ii.to_string());
        kv("convention", convention.into());
        kv("t_end", self.t_end.to_string());
        kv("dt_store", self.dt_store.to_string());
        kv("integrator", integrator.into());
        kv("spbs_window", self.spbs_window.to_string());
        kv("dbs_start", self.dbs_window.start.to_string());
        kv("dbs_count", self.dbs_window.count.to_string());
        kv("g2_rmax", self.g2_rmax.to_string());
        kv("snapshot", self.snapshot.to_string());
        kv("k_count", self.k_count.to_string());
        kv("how", how);
        kv("bunching_threshold", self.bunching_threshold.to_string());
        kv("d_q", self.d_q.to_string());
        kv("d1", self.d1.to_string());
        kv("d2", self.d2.to_string());
        kv("dq_axis", self.dq_axis.to_string());
        kv("delta3_axis", self.delta3_axis.to_string());
        kv("delta4_axis", self.delta4_axis.to_string());
        kv("detuning_unit", unit.into());
        kv("t_factor", self.t_factor.to_string());
        kv("t_max", self.t_max.to_string());
        if let Some(d) = &self.output_dir {
            kv("output_dir", d.display().to_string());
        }
        kv("plot", self.plot.to_string());
        kv("threads", self.threads.to_string());
        s
    }
}
