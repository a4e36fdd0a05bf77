use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radial::{RadialGrid, RadialProfile};
use crate::solver::{Nonlinearity, ScalarFn};

/// Radial profile of unit height.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataShape {
    /// `e^(-r^2 / w^2)`.
    Gaussian { width: f64 },
    /// `e^(1 - 1 / (1 - (r/R)^2))` inside `r < R`, zero outside.
    Bump { radius: f64 },
}

impl DataShape {
    pub fn eval(&self, r: f64) -> f64 {
        match *self {
            Self::Gaussian { width } => (-(r / width).powi(2)).exp(),
            Self::Bump { radius } => {
                let x = r / radius;
                if x < 1.0 {
                    (1.0 - 1.0 / (1.0 - x * x)).exp()
                } else {
                    0.0
                }
            }
        }
    }

    /// Width or radius.
    pub fn scale(&self) -> f64 {
        match *self {
            Self::Gaussian { width } => width,
            Self::Bump { radius } => radius,
        }
    }

    /// Same shape with width or radius `scale`.
    pub fn with_scale(&self, scale: f64) -> Self {
        match self {
            Self::Gaussian { .. } => Self::Gaussian { width: scale },
            Self::Bump { .. } => Self::Bump { radius: scale },
        }
    }

    fn validate(&self) -> Result<()> {
        let scale = self.scale();
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::validation("data shape scale must be positive"));
        }
        Ok(())
    }
}

/// Which data slot carries the profile.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSlot {
    #[default]
    Position,
    Velocity,
}

/// Initial data `amplitude * shape` in one slot, zero in the other.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataSpec {
    pub shape: DataShape,
    pub amplitude: f64,
    #[serde(default)]
    pub slot: DataSlot,
}

impl DataSpec {
    pub fn new(shape: DataShape, amplitude: f64) -> Self {
        Self { shape, amplitude, slot: DataSlot::Position }
    }

    /// Samples `(u0, u1)` on the grid.
    pub fn profiles(&self, grid: RadialGrid) -> Result<(RadialProfile, RadialProfile)> {
        self.shape.validate()?;
        if !self.amplitude.is_finite() {
            return Err(Error::validation("data amplitude must be finite"));
        }
        let p = RadialProfile::from_fn(grid, |r| self.amplitude * self.shape.eval(r))?;
        let z = RadialProfile::zeros(grid);
        Ok(match self.slot {
            DataSlot::Position => (p, z),
            DataSlot::Velocity => (z, p),
        })
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::validation(format!("{key}: cannot parse '{v}' as a number")))
}

/// `gaussian:amp=0.3,width=1` or `bump:amp=1,radius=2,slot=velocity`.
impl FromStr for DataSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut amplitude = 1.0;
        let mut scale = 1.0;
        let mut slot = DataSlot::Position;
        for item in rest.split(',').filter(|x| !x.trim().is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::validation(format!("data option '{item}' is not key=value")))?;
            match k.trim() {
                "amp" | "amplitude" => amplitude = parse_f64(k, v)?,
                "width" | "radius" => scale = parse_f64(k, v)?,
                "slot" => {
                    slot = match v.trim() {
                        "position" => DataSlot::Position,
                        "velocity" => DataSlot::Velocity,
                        other => return Err(Error::validation(format!("unknown data slot '{other}'"))),
                    }
                }
                other => return Err(Error::validation(format!("unknown data option '{other}'"))),
            }
        }
        let shape = match kind.trim() {
            "gaussian" => DataShape::Gaussian { width: scale },
            "bump" => DataShape::Bump { radius: scale },
            other => return Err(Error::validation(format!("unknown data shape '{other}'"))),
        };
        shape.validate()?;
        Ok(Self { shape, amplitude, slot })
    }
}

fn parse_scalar_fn(s: &str) -> Result<ScalarFn> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    let num = |name: &str| parse_f64(name, arg);
    Ok(match kind.trim() {
        "zero" => ScalarFn::Zero,
        "const" | "constant" => ScalarFn::Constant { value: num("const")? },
        "linear" => ScalarFn::Linear { k: num("linear")? },
        "quadratic" => ScalarFn::Quadratic { k: num("quadratic")? },
        "sine" => ScalarFn::Sine { k: num("sine")? },
        "poly" => ScalarFn::Poly {
            coeffs: arg.split('/').map(|c| parse_f64("poly", c)).collect::<Result<_>>()?,
        },
        other => return Err(Error::validation(format!("unknown function kind '{other}'"))),
    })
}

/// Parses `g=linear:0.2;a=const:-1;b=zero`; omitted entries are zero.
pub fn parse_nonlinearity(s: &str) -> Result<Nonlinearity> {
    let mut g = ScalarFn::Zero;
    let mut a = ScalarFn::Zero;
    let mut b = ScalarFn::Zero;
    for item in s.split(';').filter(|x| !x.trim().is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::validation(format!("nonlinearity entry '{item}' is not name=kind")))?;
        let f = parse_scalar_fn(v)?;
        match k.trim() {
            "g" => g = f,
            "a" => a = f,
            "b" => b = f,
            other => return Err(Error::validation(format!("unknown nonlinearity slot '{other}'"))),
        }
    }
    Nonlinearity::new(g, a, b)
}

impl fmt::Display for DataSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, key, scale) = match self.shape {
            DataShape::Gaussian { width } => ("gaussian", "width", width),
            DataShape::Bump { radius } => ("bump", "radius", radius),
        };
        let slot = match self.slot {
            DataSlot::Position => "position",
            DataSlot::Velocity => "velocity",
        };
        write!(f, "{kind}:amp={},{key}={scale},slot={slot}", self.amplitude)
    }
}
