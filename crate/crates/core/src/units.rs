//! Physical constants and unit conversion at the user-facing boundary.
//!
//! Everything inside the crate is SI. Inputs given in eV, nm, ps or g/cm³
//! are converted once, here.

use crate::error::{ensure_finite, Result};

/// CODATA 2018 exact/recommended values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant [J·s].
    pub hbar: f64,
    /// Elementary charge [C].
    pub e_charge: f64,
    /// Vacuum permittivity [F/m].
    pub eps0: f64,
}

pub const CONSTANTS: PhysicalConstants = PhysicalConstants {
    hbar: HBAR,
    e_charge: E_CHARGE,
    eps0: EPS0,
};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const E_CHARGE: f64 = 1.602_176_634e-19;
pub const EPS0: f64 = 8.854_187_812_8e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyUnit {
    J,
    EV,
    MeV,
}

impl EnergyUnit {
    fn joules_per_unit(self) -> f64 {
        match self {
            EnergyUnit::J => 1.0,
            EnergyUnit::EV => E_CHARGE,
            EnergyUnit::MeV => E_CHARGE * 1e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthTimeUnit {
    M,
    Nm,
    S,
    Ps,
    Ns,
}

impl LengthTimeUnit {
    /// Powers of ten as exact f64 divisors, so `50 nm` lands on the nearest
    /// double to `5e-8` rather than `50 * 1e-9`.
    fn divisor(self) -> f64 {
        match self {
            LengthTimeUnit::M | LengthTimeUnit::S => 1.0,
            LengthTimeUnit::Nm | LengthTimeUnit::Ns => 1e9,
            LengthTimeUnit::Ps => 1e12,
        }
    }
}

/// Energy in `unit` to joules.
pub fn convert_energy(value: f64, unit: EnergyUnit) -> Result<f64> {
    ensure_finite(value, "energy")?;
    Ok(value * unit.joules_per_unit())
}

/// Joules back to `unit`.
pub fn energy_in(value_j: f64, unit: EnergyUnit) -> Result<f64> {
    ensure_finite(value_j, "energy")?;
    Ok(value_j / unit.joules_per_unit())
}

/// Length or time in `unit` to metres or seconds.
pub fn convert_length_time(value: f64, unit: LengthTimeUnit) -> Result<f64> {
    ensure_finite(value, "length/time")?;
    Ok(value / unit.divisor())
}

/// SI length or time back to `unit`.
pub fn length_time_in(value_si: f64, unit: LengthTimeUnit) -> Result<f64> {
    ensure_finite(value_si, "length/time")?;
    Ok(value_si * unit.divisor())
}

/// g/cm³ to kg/m³.
pub fn density_from_gcc(value: f64) -> Result<f64> {
    ensure_finite(value, "density")?;
    Ok(value * 1000.0)
}
