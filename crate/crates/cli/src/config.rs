//! Run configuration: JSON file plus command-line overrides.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wplab_core::wigner::default_negativity_tol;
use wplab_core::{OscillatorFrame, PolynomialPotential};

use crate::error::CliError;

/// A closed sampling range `[lo, hi]` with `points` nodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRange {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl SampleRange {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        Self { lo, hi, points }
    }

    pub fn coords(&self) -> Vec<f64> {
        wplab_core::wigner::linspace(self.lo, self.hi, self.points)
    }

    fn validate(&self, name: &str, min_points: usize) -> Result<(), CliError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.hi > self.lo) {
            return Err(CliError::Config(format!("{name}: need finite lo < hi")));
        }
        if self.points < min_points {
            return Err(CliError::Config(format!(
                "{name}: need at least {min_points} points"
            )));
        }
        Ok(())
    }
}

/// Ranges for the `x` and `p` axes, in physical units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRanges {
    pub x: SampleRange,
    pub p: SampleRange,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(CliError::Config(format!("unknown output format '{other}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[derive(Default)]
pub struct Tolerances {
    /// Slice negativity threshold; `null` selects `10⁻⁹/(πħ)`.
    pub negativity: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySettings {
    /// Largest basis index used by the closed-form suites.
    pub max_nk: usize,
    /// Relative perturbation applied to the G table (fault injection).
    pub perturb_g: f64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            max_nk: 12,
            perturb_g: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub frame: OscillatorFrame,
    /// `a_0, a_1, …, a_N` of `U(x) = Σ a_n xⁿ`.
    pub potential: Vec<f64>,
    pub basis_size: usize,
    pub states: Vec<usize>,
    pub wigner_grid: AxisRanges,
    pub profile: AxisRanges,
    pub out_dir: PathBuf,
    pub formats: Vec<Format>,
    pub tolerances: Tolerances,
    pub verify: VerifySettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            frame: OscillatorFrame::unit(),
            potential: vec![0.0, 0.0, 2.0, -0.2],
            basis_size: 50,
            states: vec![0, 1, 2, 3],
            wigner_grid: AxisRanges {
                x: SampleRange::new(-4.0, 6.0, 400),
                p: SampleRange::new(-5.0, 5.0, 400),
            },
            profile: AxisRanges {
                x: SampleRange::new(-3.0, 5.0, 2001),
                p: SampleRange::new(-4.0, 4.0, 2001),
            },
            out_dir: PathBuf::from("wplab-out"),
            formats: vec![Format::Csv, Format::Json, Format::Svg],
            tolerances: Tolerances::default(),
            verify: VerifySettings::default(),
        }
    }
}

/// Command-line values that override the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub states: Option<String>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
    pub frame: Option<String>,
    pub potential: Option<String>,
    pub basis_size: Option<usize>,
    pub grid_x: Option<String>,
    pub grid_p: Option<String>,
    pub profile_x: Option<String>,
    pub profile_p: Option<String>,
    pub negativity_tol: Option<f64>,
    pub max_nk: Option<usize>,
    pub perturb_g: Option<f64>,
}

fn parse_list<T: std::str::FromStr>(name: &str, s: &str) -> Result<Vec<T>, CliError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|_| CliError::Config(format!("{name}: cannot parse '{}'", t.trim())))
        })
        .collect()
}

fn parse_range(name: &str, s: &str) -> Result<SampleRange, CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(CliError::Config(format!("{name}: expected lo,hi,points")));
    }
    let num = |t: &str| {
        t.parse::<f64>()
            .map_err(|_| CliError::Config(format!("{name}: cannot parse '{t}'")))
    };
    let points = parts[2].parse::<usize>().map_err(|_| {
        CliError::Config(format!("{name}: cannot parse point count '{}'", parts[2]))
    })?;
    Ok(SampleRange::new(num(parts[0])?, num(parts[1])?, points))
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// File (or defaults) with overrides applied, validated and with every
    /// optional tolerance resolved.
    pub fn load(path: Option<&Path>, ov: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        cfg.apply(ov)?;
        cfg.validate()?;
        cfg.resolve();
        Ok(cfg)
    }

    pub fn apply(&mut self, ov: &Overrides) -> Result<(), CliError> {
        if let Some(s) = &ov.states {
            self.states = parse_list("--states", s)?;
        }
        if let Some(o) = &ov.out {
            self.out_dir = o.clone();
        }
        if let Some(f) = &ov.format {
            self.formats = parse_list("--format", f)?;
        }
        if let Some(f) = &ov.frame {
            let v: Vec<f64> = parse_list("--frame", f)?;
            if v.len() != 3 {
                return Err(CliError::Config("--frame: expected m,omega,hbar".into()));
            }
            self.frame = OscillatorFrame {
                mass: v[0],
                omega: v[1],
                hbar: v[2],
            };
        }
        if let Some(p) = &ov.potential {
            self.potential = parse_list("--potential", p)?;
        }
        if let Some(k) = ov.basis_size {
            self.basis_size = k;
        }
        for (src, dst, name) in [
            (&ov.grid_x, &mut self.wigner_grid.x, "--grid-x"),
            (&ov.grid_p, &mut self.wigner_grid.p, "--grid-p"),
            (&ov.profile_x, &mut self.profile.x, "--profile-x"),
            (&ov.profile_p, &mut self.profile.p, "--profile-p"),
        ] {
            if let Some(s) = src {
                *dst = parse_range(name, s)?;
            }
        }
        if let Some(t) = ov.negativity_tol {
            self.tolerances.negativity = Some(t);
        }
        if let Some(m) = ov.max_nk {
            self.verify.max_nk = m;
        }
        if let Some(e) = ov.perturb_g {
            self.verify.perturb_g = e;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        OscillatorFrame::new(self.frame.mass, self.frame.omega, self.frame.hbar)
            .map_err(|e| CliError::Config(e.to_string()))?;
        self.potential_model()?;
        if self.basis_size < 2 {
            return Err(CliError::Config("basis_size must be at least 2".into()));
        }
        if let Some(&s) = self.states.iter().max() {
            if s + 1 >= self.basis_size {
                return Err(CliError::Config(format!(
                    "state {s} needs basis_size > {}, got {}",
                    s + 1,
                    self.basis_size
                )));
            }
        }
        let mut sorted = self.states.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.states.len() {
            return Err(CliError::Config("states must not repeat".into()));
        }
        let max_size = wplab_core::moments::MAX_INDEX_SUM / 2 + 1;
        if self.basis_size > max_size {
            return Err(CliError::Config(format!(
                "basis_size must be at most {max_size} for the closed-form moments"
            )));
        }
        self.wigner_grid.x.validate("wigner_grid.x", 2)?;
        self.wigner_grid.p.validate("wigner_grid.p", 2)?;
        self.profile.x.validate("profile.x", 3)?;
        self.profile.p.validate("profile.p", 3)?;
        if let Some(t) = self.tolerances.negativity {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Config(
                    "tolerances.negativity must be positive".into(),
                ));
            }
        }
        if self.verify.max_nk > 40 {
            return Err(CliError::Config("verify.max_nk must be at most 40".into()));
        }
        if !self.verify.perturb_g.is_finite() {
            return Err(CliError::Config("verify.perturb_g must be finite".into()));
        }
        Ok(())
    }

    fn resolve(&mut self) {
        if self.tolerances.negativity.is_none() {
            self.tolerances.negativity = Some(default_negativity_tol(&self.frame));
        }
        self.formats.sort_unstable();
        self.formats.dedup();
    }

    pub fn potential_model(&self) -> Result<PolynomialPotential, CliError> {
        PolynomialPotential::new(self.potential.clone())
            .map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn negativity_tol(&self) -> f64 {
        self.tolerances
            .negativity
            .unwrap_or_else(|| default_negativity_tol(&self.frame))
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes") + "\n"
    }
}
