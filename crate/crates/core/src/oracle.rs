//! Numerical reference values built directly from the squared electron–phonon
//! couplings, without any of the closed-form bracket identities.
//!
//! * [`gamma_golden_rule_oracle`]: zero-temperature single-phonon emission
//!   rate, `Γ = (2π/ħ) Σ_q |g_q|² δ(ε − ħsq)`, with the mode sum turned into
//!   `V/(2π)³ ∫d³q` and the angular integral done by quadrature.
//! * [`b2_time_dependent_oracle`]: the spectral function
//!   `B²(t) = (8/ħ²) Σ_q |g_q|²/(s²q²) · sin²(sqt/2)`.
//!
//! The inter-dot axis is taken along the [001] crystal axis. Only the piezo
//! channel is sensitive to that choice.

use std::cell::Cell;
use std::f64::consts::PI;

use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};
use crate::materials::{CouplingChannel, Material, QubitGeometry};
use crate::quadrature::{integrate_adaptive, integrate_panels, QuadratureSettings};
use crate::rates::wavevector_from_splitting;
use crate::special::sinc_deficit;
use crate::units::HBAR;

/// Unit vector along the line joining the two dot centres.
pub const DOT_AXIS: [f64; 3] = [0.0, 0.0, 1.0];

/// Normalisation volume used by the public oracles [m³]. Cancels exactly.
pub const NOMINAL_VOLUME: f64 = 1.0;

/// Polarisation-summed squared piezo anisotropy factor,
/// `Σ_λ (ξ₁e₂e₃ + ξ₂e₁e₃ + ξ₃e₁e₂)² = e₁²e₂² + e₂²e₃² + e₃²e₁²`.
pub fn piezo_angular_factor(e: [f64; 3]) -> Result<f64> {
    let norm2 = e[0] * e[0] + e[1] * e[1] + e[2] * e[2];
    if !norm2.is_finite() || (norm2.sqrt() - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(
            "direction",
            format!("expected a unit vector, |e| = {}", norm2.sqrt()),
        ));
    }
    Ok(angular_factor(e))
}

fn angular_factor(e: [f64; 3]) -> f64 {
    let (x2, y2, z2) = (e[0] * e[0], e[1] * e[1], e[2] * e[2]);
    x2 * y2 + y2 * z2 + z2 * x2
}

fn direction(u: f64, phi: f64) -> [f64; 3] {
    let sin_theta = (1.0 - u * u).max(0.0).sqrt();
    [sin_theta * phi.cos(), sin_theta * phi.sin(), u]
}

/// `|g_q|²` for one channel, split into a normalisation constant and a
/// dimensionless form factor.
///
/// `Σ_λ|g|² = ħ/(2ρsqV) · strength · q^p · F(q, q̂)` with `p = 2` for the
/// deformation channels and `p = 0` for piezo. `F` carries the dot form
/// factor, the `sin²(q·L/2)` interference term and, for piezo, the
/// anisotropy. The midpoint phase `e^{-iq·R}` has unit modulus and never
/// appears.
#[derive(Debug, Clone, Copy)]
pub struct CouplingEnvelope<'a> {
    pub channel: CouplingChannel,
    pub material: &'a Material,
    pub geometry: &'a QubitGeometry,
    pub volume: f64,
}

impl<'a> CouplingEnvelope<'a> {
    pub fn new(
        channel: CouplingChannel,
        material: &'a Material,
        geometry: &'a QubitGeometry,
    ) -> Result<Self> {
        channel.check(material, geometry)?;
        Ok(CouplingEnvelope {
            channel,
            material,
            geometry,
            volume: NOMINAL_VOLUME,
        })
    }

    pub fn with_volume(self, volume: f64) -> Result<Self> {
        ensure_positive(volume, "volume")?;
        Ok(CouplingEnvelope { volume, ..self })
    }

    /// `Ξ²` [J²] or `M²` [J²/m²].
    pub fn strength(&self) -> f64 {
        match self.channel {
            CouplingChannel::PiezoGaussian => {
                let m = self.material.piezo_m.unwrap_or(0.0);
                m * m
            }
            _ => self.material.xi * self.material.xi,
        }
    }

    pub fn radial_power(&self) -> i32 {
        if self.channel.is_deformation() {
            2
        } else {
            0
        }
    }

    /// Squared dot form factor, 1 at `q = 0`.
    pub fn radial_form_factor(&self, q: f64) -> f64 {
        let a = self.geometry.a;
        match self.channel {
            CouplingChannel::DeformationHydrogenic => (1.0 + 0.25 * a * a * q * q).powi(-4),
            _ => (-0.5 * a * a * q * q).exp(),
        }
    }

    /// Direction-dependent part of the form factor: inter-dot interference
    /// times the piezoelectric anisotropy.
    pub fn angular_form_factor(&self, q: f64, dir: [f64; 3]) -> f64 {
        let cos_axis = dir[0] * DOT_AXIS[0] + dir[1] * DOT_AXIS[1] + dir[2] * DOT_AXIS[2];
        let interference = (0.5 * q * self.geometry.l * cos_axis).sin().powi(2);
        let anisotropy = match self.channel {
            CouplingChannel::PiezoGaussian => angular_factor(dir),
            _ => 1.0,
        };
        interference * anisotropy
    }

    /// Dimensionless `F(q, q̂)`.
    pub fn form_factor(&self, q: f64, dir: [f64; 3]) -> f64 {
        self.radial_form_factor(q) * self.angular_form_factor(q, dir)
    }

    /// `Σ_λ |g_{q,λ}|²` [J²].
    pub fn squared_coupling(&self, q: f64, dir: [f64; 3]) -> f64 {
        if q == 0.0 {
            return 0.0;
        }
        self.coupling_scale(q) * self.form_factor(q, dir)
    }

    /// Density of modes per unit `d³q`.
    pub fn mode_density(&self) -> f64 {
        self.volume / (8.0 * PI * PI * PI)
    }

    /// Radius beyond which the squared form factor is below
    /// `cutoff` times its peak.
    pub fn radial_cutoff(&self, cutoff: f64) -> f64 {
        let a = self.geometry.a;
        match self.channel {
            CouplingChannel::DeformationHydrogenic => 2.0 / a * (cutoff.powf(-0.25) - 1.0).sqrt(),
            _ => (2.0 * (1.0 / cutoff).ln()).sqrt() / a,
        }
    }

    /// `∫dΩ F(q, Ω)` by quadrature over `cosθ` (and `φ` for piezo).
    ///
    /// The isotropic radial factor is taken outside the integral so that the
    /// quadrature tolerances apply to an O(1) integrand even when the form
    /// factor itself is vanishingly small.
    pub fn solid_angle_form_factor(&self, q: f64, settings: &QuadratureSettings) -> Result<f64> {
        Ok(self.radial_form_factor(q) * self.solid_angle_interference(q, settings)?)
    }

    fn solid_angle_interference(&self, q: f64, settings: &QuadratureSettings) -> Result<f64> {
        if self.channel.is_deformation() {
            let polar = integrate_adaptive(
                |u| self.angular_form_factor(q, direction(u, 0.0)),
                -1.0,
                1.0,
                settings,
            )?;
            return Ok(2.0 * PI * polar.value);
        }
        let failure = Cell::new(None);
        let polar = integrate_adaptive(
            |u| match integrate_adaptive(
                |phi| self.angular_form_factor(q, direction(u, phi)),
                0.0,
                2.0 * PI,
                settings,
            ) {
                Ok(r) => r.value,
                Err(e) => {
                    record(&failure, e);
                    0.0
                }
            },
            -1.0,
            1.0,
            settings,
        )?;
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(polar.value),
        }
    }

    /// `Σ_λ|g|² / F` at wavenumber `q`, i.e. everything but the form factor.
    fn coupling_scale(&self, q: f64) -> f64 {
        let m = self.material;
        HBAR / (2.0 * m.rho * m.s * q * self.volume) * self.strength() * q.powi(self.radial_power())
    }
}

fn record(slot: &Cell<Option<Error>>, e: Error) {
    let current = slot.take();
    slot.set(Some(current.unwrap_or(e)));
}

/// Golden-rule emission rate on the resonant shell `q = k = ε/(sħ)`.
pub fn gamma_golden_rule_oracle(
    channel: CouplingChannel,
    material: &Material,
    geometry: &QubitGeometry,
    epsilon: f64,
    settings: &QuadratureSettings,
) -> Result<f64> {
    let env = CouplingEnvelope::new(channel, material, geometry)?;
    gamma_golden_rule_with_envelope(&env, epsilon, settings)
}

pub fn gamma_golden_rule_with_envelope(
    env: &CouplingEnvelope<'_>,
    epsilon: f64,
    settings: &QuadratureSettings,
) -> Result<f64> {
    ensure_positive(epsilon, "epsilon")?;
    settings.validate()?;
    let k = wavevector_from_splitting(epsilon, env.material)?;
    let angular = env.coupling_scale(k) * env.solid_angle_form_factor(k, settings)?;
    // (2π/ħ) · V/(2π)³ · k² dk/dε · ∫dΩ Σ|g|²,  dk/dε = 1/(ħs)
    Ok(2.0 * PI / HBAR * env.mode_density() * k * k / (HBAR * env.material.s) * angular)
}

/// Time-dependent spectral function `B²(t)`.
///
/// The radial integral runs to the form-factor cutoff in panels no wider
/// than half an oscillation of either `sin²(sqt/2)` or the inter-dot
/// interference term. It is carried out in the dimensionless variable
/// `x = qa`.
pub fn b2_time_dependent_oracle(
    channel: CouplingChannel,
    material: &Material,
    geometry: &QubitGeometry,
    t: f64,
    settings: &QuadratureSettings,
) -> Result<f64> {
    let env = CouplingEnvelope::new(channel, material, geometry)?;
    b2_time_dependent_with_envelope(&env, t, settings)
}

pub fn b2_time_dependent_with_envelope(
    env: &CouplingEnvelope<'_>,
    t: f64,
    settings: &QuadratureSettings,
) -> Result<f64> {
    ensure_nonnegative(t, "t")?;
    settings.validate()?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let (a, l) = (env.geometry.a, env.geometry.l);
    let s = env.material.s;
    let x_max = a * env.radial_cutoff(settings.radial_cutoff_factor);
    let panel = PI * a / (s * t).max(l);
    let p = env.radial_power();

    let failure = Cell::new(None);
    let integrand = |x: f64| {
        if x == 0.0 {
            return 0.0;
        }
        let q = x / a;
        let angular = if env.channel.is_deformation() {
            // ∫dΩ sin²(qL·cosθ/2) = 2π(1 − sin(qL)/(qL))
            env.radial_form_factor(q) * 2.0 * PI * sinc_deficit(q * l)
        } else {
            match env.solid_angle_form_factor(q, settings) {
                Ok(v) => v,
                Err(e) => {
                    record(&failure, e);
                    0.0
                }
            }
        };
        x.powi(p - 1) * angular * (0.5 * s * q * t).sin().powi(2)
    };
    let radial = integrate_panels(integrand, 0.0, x_max, panel, settings)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    // Σ_q → V/(2π)³ ∫q²dq dΩ; q² cancels the 1/(s²q²) of the spectral density,
    // leaving ħ·strength/(2ρs³V) · a^{-p} ∫dx x^{p-1} ∫dΩ F
    let m = env.material;
    let scale = HBAR * env.strength() / (2.0 * m.rho * s * s * s * env.volume) * a.powi(-p);
    Ok(8.0 / (HBAR * HBAR) * env.mode_density() * scale * radial.value)
}
