//! Substrate materials, double-dot geometry and the compiled-in presets.

use std::fmt;
use std::str::FromStr;

use crate::error::{ensure_positive, Error, Result};
use crate::units::{
    convert_energy, convert_length_time, density_from_gcc, EnergyUnit, LengthTimeUnit, EPS0,
    E_CHARGE,
};

/// Acoustic-phonon parameters of a substrate. SI units throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub name: String,
    /// Deformation potential [J].
    pub xi: f64,
    /// Isotropic sound speed [m/s].
    pub s: f64,
    /// Mass density [kg/m³].
    pub rho: f64,
    /// Piezoelectric modulus [J/m]; `None` for crystals with inversion symmetry.
    pub piezo_m: Option<f64>,
}

impl Material {
    pub fn new(
        name: impl Into<String>,
        xi: f64,
        s: f64,
        rho: f64,
        piezo_m: Option<f64>,
    ) -> Result<Self> {
        let m = Material {
            name: name.into(),
            xi,
            s,
            rho,
            piezo_m,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.xi, "xi")?;
        ensure_positive(self.s, "s")?;
        ensure_positive(self.rho, "rho")?;
        if let Some(m) = self.piezo_m {
            ensure_positive(m, "piezo_m")?;
        }
        Ok(())
    }

    /// Piezo modulus `M = e·e14/(eps0·kappa)` from the piezoelectric constant
    /// `e14` [C/m²] and the relative permittivity `kappa`.
    pub fn piezo_modulus(e14: f64, kappa: f64) -> Result<f64> {
        ensure_positive(e14, "e14")?;
        ensure_positive(kappa, "kappa")?;
        Ok(E_CHARGE * e14 / (EPS0 * kappa))
    }

    pub(crate) fn require_piezo(&self) -> Result<f64> {
        self.piezo_m
            .ok_or_else(|| Error::MissingPiezoModulus(self.name.clone()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfinementShape {
    Gaussian,
    Hydrogenic,
}

impl ConfinementShape {
    pub fn as_str(self) -> &'static str {
        match self {
            ConfinementShape::Gaussian => "gaussian",
            ConfinementShape::Hydrogenic => "hydrogenic",
        }
    }
}

impl fmt::Display for ConfinementShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConfinementShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(ConfinementShape::Gaussian),
            "hydrogenic" => Ok(ConfinementShape::Hydrogenic),
            other => Err(Error::invalid(
                "shape",
                format!("expected gaussian or hydrogenic, got `{other}`"),
            )),
        }
    }
}

/// Dot size `a` and centre-to-centre distance `l`, both in metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitGeometry {
    pub a: f64,
    pub l: f64,
    pub shape: ConfinementShape,
}

impl QubitGeometry {
    pub fn new(a: f64, l: f64, shape: ConfinementShape) -> Result<Self> {
        let g = QubitGeometry { a, l, shape };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.a, "a")?;
        ensure_positive(self.l, "L")?;
        Ok(())
    }

    pub fn with_a(self, a: f64) -> Result<Self> {
        QubitGeometry::new(a, self.l, self.shape)
    }

    pub fn with_l(self, l: f64) -> Result<Self> {
        QubitGeometry::new(self.a, l, self.shape)
    }
}

/// Electron–phonon coupling mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CouplingChannel {
    DeformationGaussian,
    PiezoGaussian,
    DeformationHydrogenic,
}

impl CouplingChannel {
    pub const ALL: [CouplingChannel; 3] = [
        CouplingChannel::DeformationGaussian,
        CouplingChannel::PiezoGaussian,
        CouplingChannel::DeformationHydrogenic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CouplingChannel::DeformationGaussian => "deformation-gaussian",
            CouplingChannel::PiezoGaussian => "piezo-gaussian",
            CouplingChannel::DeformationHydrogenic => "deformation-hydrogenic",
        }
    }

    pub fn is_deformation(self) -> bool {
        !matches!(self, CouplingChannel::PiezoGaussian)
    }

    pub fn required_shape(self) -> ConfinementShape {
        match self {
            CouplingChannel::DeformationHydrogenic => ConfinementShape::Hydrogenic,
            _ => ConfinementShape::Gaussian,
        }
    }

    /// Checks that `material` and `geometry` admit this channel.
    pub fn check(self, material: &Material, geometry: &QubitGeometry) -> Result<()> {
        if geometry.shape != self.required_shape() {
            return Err(Error::ShapeMismatch {
                channel: self.as_str().to_string(),
                required: self.required_shape().to_string(),
                found: geometry.shape.to_string(),
            });
        }
        if self == CouplingChannel::PiezoGaussian {
            material.require_piezo()?;
        }
        Ok(())
    }
}

impl fmt::Display for CouplingChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CouplingChannel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CouplingChannel::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownChannel(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub material: Material,
    pub geometry: QubitGeometry,
    pub channels: Vec<CouplingChannel>,
}

pub const PRESET_NAMES: [&str; 3] = ["gaas-dots", "si-dots", "si-donors"];

/// GaAs piezoelectric constant e14 [C/m²] and dielectric constant.
pub const GAAS_E14: f64 = 0.16;
pub const GAAS_KAPPA: f64 = 12.8;

fn ev(x: f64) -> f64 {
    convert_energy(x, EnergyUnit::EV).expect("finite literal")
}

fn nm(x: f64) -> f64 {
    convert_length_time(x, LengthTimeUnit::Nm).expect("finite literal")
}

fn gcc(x: f64) -> f64 {
    density_from_gcc(x).expect("finite literal")
}

pub fn gaas() -> Material {
    Material {
        name: "GaAs".to_string(),
        xi: ev(7.0),
        s: 5.14e3,
        rho: gcc(5.31),
        piezo_m: Some(Material::piezo_modulus(GAAS_E14, GAAS_KAPPA).expect("positive literals")),
    }
}

pub fn silicon() -> Material {
    Material {
        name: "Si".to_string(),
        xi: ev(3.3),
        s: 9.0e3,
        rho: gcc(2.33),
        piezo_m: None,
    }
}

/// Looks up one of the compiled-in parameter sets.
pub fn preset(name: &str) -> Result<Preset> {
    let p = match name {
        "gaas-dots" => Preset {
            material: gaas(),
            geometry: QubitGeometry {
                a: nm(25.0),
                l: nm(50.0),
                shape: ConfinementShape::Gaussian,
            },
            channels: vec![
                CouplingChannel::DeformationGaussian,
                CouplingChannel::PiezoGaussian,
            ],
        },
        "si-dots" => Preset {
            material: silicon(),
            geometry: QubitGeometry {
                a: nm(25.0),
                l: nm(50.0),
                shape: ConfinementShape::Gaussian,
            },
            channels: vec![CouplingChannel::DeformationGaussian],
        },
        "si-donors" => Preset {
            material: silicon(),
            geometry: QubitGeometry {
                a: nm(3.0),
                l: nm(50.0),
                shape: ConfinementShape::Hydrogenic,
            },
            channels: vec![CouplingChannel::DeformationHydrogenic],
        },
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(p)
}
