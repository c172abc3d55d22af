//! Closed-form relaxation rates, their long-wavelength asymptotics and the
//! saturated dephasing exponents `B²`.
//!
//! All functions are zero-temperature, single-phonon emission results for
//! an isotropic linear acoustic branch with sound speed `s`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{ensure_nonnegative, ensure_positive, Result};
use crate::materials::{CouplingChannel, Material, QubitGeometry};
use crate::special::{exp_integral_e1, piezo_bracket_over_x5, sinc_deficit};
use crate::units::HBAR;

pub const DEFAULT_REGIME_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    /// `ε_A = ε`, `ε_P = 0`: relaxation in the energy basis.
    Not,
    /// `ε_A = 0`, `ε_P = ε`: pure dephasing in the position basis.
    Phase,
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateKind::Not => "NOT",
            GateKind::Phase => "PHASE",
        })
    }
}

/// One of the two single-qubit gates with level splitting `epsilon` [J].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateSpec {
    pub kind: GateKind,
    pub epsilon: f64,
}

impl GateSpec {
    pub fn new(kind: GateKind, epsilon: f64) -> Result<Self> {
        ensure_positive(epsilon, "epsilon")?;
        Ok(GateSpec { kind, epsilon })
    }

    /// Gate whose duration is `dt`, i.e. `ε = πħ/dt`.
    pub fn from_cycle_time(kind: GateKind, dt: f64) -> Result<Self> {
        ensure_positive(dt, "dt")?;
        GateSpec::new(kind, PI * HBAR / dt)
    }

    /// `Δt = πħ/ε`.
    pub fn cycle_time(&self) -> f64 {
        PI * HBAR / self.epsilon
    }

    /// `(ε_A, ε_P)` for this gate.
    pub fn control_amplitudes(&self) -> (f64, f64) {
        match self.kind {
            GateKind::Not => (self.epsilon, 0.0),
            GateKind::Phase => (0.0, self.epsilon),
        }
    }
}

/// Splitting for a given cycle time, `ε = πħ/Δt`.
pub fn splitting_for_cycle_time(dt: f64) -> Result<f64> {
    ensure_positive(dt, "dt")?;
    Ok(PI * HBAR / dt)
}

/// Wavenumber of the emitted phonon, `k = ε/(sħ)`.
pub fn wavevector_from_splitting(epsilon: f64, material: &Material) -> Result<f64> {
    ensure_nonnegative(epsilon, "epsilon")?;
    Ok(epsilon / (material.s * HBAR))
}

fn deformation_prefactor(material: &Material) -> f64 {
    material.xi * material.xi / (4.0 * PI * material.rho * material.s * material.s * HBAR)
}

/// Gaussian double dot, deformation-potential coupling.
pub fn gamma_deformation_gaussian(
    material: &Material,
    geometry: &QubitGeometry,
    epsilon: f64,
) -> Result<f64> {
    CouplingChannel::DeformationGaussian.check(material, geometry)?;
    let k = wavevector_from_splitting(epsilon, material)?;
    let a = geometry.a;
    Ok(deformation_prefactor(material)
        * k.powi(3)
        * (-0.5 * a * a * k * k).exp()
        * sinc_deficit(k * geometry.l))
}

/// Gaussian double dot, piezoelectric coupling with the dot axis along [001].
pub fn gamma_piezo_gaussian(
    material: &Material,
    geometry: &QubitGeometry,
    epsilon: f64,
) -> Result<f64> {
    CouplingChannel::PiezoGaussian.check(material, geometry)?;
    let m = material.require_piezo()?;
    let k = wavevector_from_splitting(epsilon, material)?;
    let a = geometry.a;
    // M²/(20πρs²ħ L⁵k⁴)·f(kL) rewritten as M²k/(20πρs²ħ)·f(kL)/(kL)⁵
    let prefactor = m * m / (20.0 * PI * material.rho * material.s * material.s * HBAR);
    Ok(prefactor * k * (-0.5 * a * a * k * k).exp() * piezo_bracket_over_x5(k * geometry.l))
}

/// Hydrogen-like donor pair, deformation-potential coupling.
pub fn gamma_deformation_hydrogenic(
    material: &Material,
    geometry: &QubitGeometry,
    epsilon: f64,
) -> Result<f64> {
    CouplingChannel::DeformationHydrogenic.check(material, geometry)?;
    let k = wavevector_from_splitting(epsilon, material)?;
    let a = geometry.a;
    let form = 1.0 + 0.25 * a * a * k * k;
    Ok(deformation_prefactor(material) * k.powi(3) / form.powi(4) * sinc_deficit(k * geometry.l))
}

pub fn gamma_closed_form(
    channel: CouplingChannel,
    material: &Material,
    geometry: &QubitGeometry,
    epsilon: f64,
) -> Result<f64> {
    match channel {
        CouplingChannel::DeformationGaussian => {
            gamma_deformation_gaussian(material, geometry, epsilon)
        }
        CouplingChannel::PiezoGaussian => gamma_piezo_gaussian(material, geometry, epsilon),
        CouplingChannel::DeformationHydrogenic => {
            gamma_deformation_hydrogenic(material, geometry, epsilon)
        }
    }
}

/// Long-wavelength (`ak, kL ≪ 1`) power laws. No regime check is made.
pub fn gamma_asymptotic(
    channel: CouplingChannel,
    material: &Material,
    geometry: &QubitGeometry,
    epsilon: f64,
) -> Result<f64> {
    ensure_nonnegative(epsilon, "epsilon")?;
    let (rho, s, l) = (material.rho, material.s, geometry.l);
    Ok(if channel.is_deformation() {
        let xi = material.xi;
        xi * xi * l * l * epsilon.powi(5) / (24.0 * PI * rho * s.powi(7) * HBAR.powi(6))
    } else {
        let m = material.require_piezo()?;
        m * m * l * l * epsilon.powi(3) / (120.0 * PI * rho * s.powi(5) * HBAR.powi(4))
    })
}

/// Dimensionless products `ak`, `Lk` and whether both sit below `threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeReport {
    pub ak: f64,
    pub lk: f64,
    pub long_wavelength: bool,
}

pub fn regime_check(geometry: &QubitGeometry, k: f64, threshold: f64) -> Result<RegimeReport> {
    ensure_nonnegative(k, "k")?;
    let ak = geometry.a * k;
    let lk = geometry.l * k;
    Ok(RegimeReport {
        ak,
        lk,
        long_wavelength: ak < threshold && lk < threshold,
    })
}

fn dephasing_denominator(material: &Material, geometry: &QubitGeometry) -> f64 {
    PI * PI * material.rho * material.s.powi(3) * geometry.a * geometry.a * HBAR
}

/// Saturated `B²` for Gaussian dots with deformation coupling.
pub fn b2_deformation_gaussian(material: &Material, geometry: &QubitGeometry) -> Result<f64> {
    CouplingChannel::DeformationGaussian.check(material, geometry)?;
    Ok(material.xi * material.xi / (2.0 * dephasing_denominator(material, geometry)))
}

/// Saturated `B²` for Gaussian dots with piezoelectric coupling.
pub fn b2_piezo_gaussian(material: &Material, geometry: &QubitGeometry) -> Result<f64> {
    CouplingChannel::PiezoGaussian.check(material, geometry)?;
    let m = material.require_piezo()?;
    let (a, l) = (geometry.a, geometry.l);
    let ratio = a * a / (l * l);
    let z = 0.5 * PI * PI * ratio;
    let bracket = -(-z).exp_m1() + 3.0 * ratio * exp_integral_e1(z)?;
    Ok(m * m * l * l * bracket / (60.0 * dephasing_denominator(material, geometry)))
}

/// Saturated `B²` for hydrogenic donor pairs with deformation coupling.
pub fn b2_deformation_hydrogenic(material: &Material, geometry: &QubitGeometry) -> Result<f64> {
    CouplingChannel::DeformationHydrogenic.check(material, geometry)?;
    Ok(material.xi * material.xi / (3.0 * dephasing_denominator(material, geometry)))
}

pub fn b2_closed_form(
    channel: CouplingChannel,
    material: &Material,
    geometry: &QubitGeometry,
) -> Result<f64> {
    match channel {
        CouplingChannel::DeformationGaussian => b2_deformation_gaussian(material, geometry),
        CouplingChannel::PiezoGaussian => b2_piezo_gaussian(material, geometry),
        CouplingChannel::DeformationHydrogenic => b2_deformation_hydrogenic(material, geometry),
    }
}
