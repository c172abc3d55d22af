//! Gate maps under phonon coupling and the resulting error measures.
//!
//! The NOT gate (`ε_A = ε`) acts in the energy basis and suffers relaxation
//! at rate `Γ`; the phase gate (`ε_P = ε`) acts in the position basis and
//! suffers pure dephasing with exponent `B²`. Both errors are measured as the
//! largest eigenvalue modulus of the deviation from the ideal map, maximised
//! over initial states.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::density::{require_basis, Basis, BlochVector, DensityMatrix2, Hermitian2, Matrix2};
use crate::error::{ensure_nonnegative, Error, Result};
use crate::materials::CouplingChannel;
use crate::optimize::{nelder_mead, Bounds, NelderMeadSettings};
use crate::rates::GateKind;
use crate::units::HBAR;

/// Smallest Bloch-sphere grid accepted by [`sup_deviation_oracle`].
pub const MIN_GRID_DENSITY: usize = 32;

impl GateKind {
    /// Basis in which the gate Hamiltonian is diagonal.
    pub fn natural_basis(self) -> Basis {
        match self {
            GateKind::Not => Basis::Energy,
            GateKind::Phase => Basis::Position,
        }
    }
}

fn rotating_phase(epsilon: f64, dt: f64) -> Complex64 {
    Complex64::from_polar(1.0, epsilon * dt / HBAR)
}

fn with_coherence(basis: Basis, p0: f64, p1: f64, c01: Complex64) -> DensityMatrix2 {
    let m: Matrix2 = [
        [Complex64::new(p0, 0.0), c01],
        [c01.conj(), Complex64::new(p1, 0.0)],
    ];
    DensityMatrix2::from_parts_unchecked(basis, m)
}

/// NOT gate with relaxation toward `|+⟩` at rate `gamma`.
pub fn evolve_not(
    rho0: &DensityMatrix2,
    gamma: f64,
    epsilon: f64,
    dt: f64,
) -> Result<DensityMatrix2> {
    require_basis(rho0.basis(), Basis::Energy)?;
    rho0.validate()?;
    ensure_nonnegative(gamma, "gamma")?;
    ensure_nonnegative(dt, "dt")?;
    let decay = (-gamma * dt).exp();
    let excited = rho0.entry(1, 1).re * decay;
    let c = rho0.entry(0, 1) * (-0.5 * gamma * dt).exp() * rotating_phase(epsilon, dt);
    Ok(with_coherence(Basis::Energy, 1.0 - excited, excited, c))
}

/// Phase gate with dephasing exponent `b2`.
pub fn evolve_phase(
    rho0: &DensityMatrix2,
    b2: f64,
    epsilon: f64,
    dt: f64,
) -> Result<DensityMatrix2> {
    require_basis(rho0.basis(), Basis::Position)?;
    rho0.validate()?;
    ensure_nonnegative(b2, "b2")?;
    let c = rho0.entry(0, 1) * (-b2).exp() * rotating_phase(epsilon, dt);
    Ok(with_coherence(
        Basis::Position,
        rho0.entry(0, 0).re,
        rho0.entry(1, 1).re,
        c,
    ))
}

/// Environment-free evolution, `ρ → U ρ U†` with `U = exp(−iH dt/ħ)`.
///
/// `rho0` must be given in the gate's natural basis, where
/// `H = diag(−ε/2, ε/2)`.
pub fn ideal_evolution(
    rho0: &DensityMatrix2,
    epsilon: f64,
    dt: f64,
    kind: GateKind,
) -> Result<DensityMatrix2> {
    let basis = kind.natural_basis();
    require_basis(rho0.basis(), basis)?;
    rho0.validate()?;
    let c = rho0.entry(0, 1) * rotating_phase(epsilon, dt);
    Ok(with_coherence(
        basis,
        rho0.entry(0, 0).re,
        rho0.entry(1, 1).re,
        c,
    ))
}

/// Applies the gate with its environment parameter: `Γ` for NOT, `B²` for
/// the phase gate.
pub fn evolve(
    rho0: &DensityMatrix2,
    kind: GateKind,
    gamma_or_b2: f64,
    epsilon: f64,
    dt: f64,
) -> Result<DensityMatrix2> {
    match kind {
        GateKind::Not => evolve_not(rho0, gamma_or_b2, epsilon, dt),
        GateKind::Phase => evolve_phase(rho0, gamma_or_b2, epsilon, dt),
    }
}

/// `ρ_actual − ρ_ideal`.
pub fn deviation(actual: &DensityMatrix2, ideal: &DensityMatrix2) -> Result<Hermitian2> {
    require_basis(actual.basis(), ideal.basis())?;
    let (a, b) = (actual.entries(), ideal.entries());
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][j] - b[i][j];
        }
    }
    Hermitian2::new(actual.basis(), m)
}

/// Largest eigenvalue modulus.
pub fn operator_norm(h: &Hermitian2) -> f64 {
    let (lo, hi) = h.eigenvalues();
    lo.abs().max(hi.abs())
}

/// `1 − e^{−Γdt}`.
pub fn error_not(gamma: f64, dt: f64) -> f64 {
    -(-gamma * dt).exp_m1()
}

/// `½(1 − e^{−B²})`.
pub fn error_phase(b2: f64) -> f64 {
    -0.5 * (-b2).exp_m1()
}

pub fn error_max(d_a: f64, d_p: f64) -> f64 {
    d_a.max(d_p)
}

/// Error budget of one coupling channel at one cycle time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    pub channel: CouplingChannel,
    /// [J]
    pub epsilon: f64,
    /// [s]
    pub dt: f64,
    /// [1/s]
    pub gamma: f64,
    pub b2: f64,
    pub d_a: f64,
    pub d_p: f64,
    pub d: f64,
}

impl ErrorReport {
    pub fn new(
        channel: CouplingChannel,
        epsilon: f64,
        dt: f64,
        gamma: f64,
        b2: f64,
    ) -> Result<Self> {
        ensure_nonnegative(gamma, "gamma")?;
        ensure_nonnegative(b2, "b2")?;
        ensure_nonnegative(dt, "dt")?;
        let d_a = error_not(gamma, dt);
        let d_p = error_phase(b2);
        Ok(ErrorReport {
            channel,
            epsilon,
            dt,
            gamma,
            b2,
            d_a,
            d_p,
            d: error_max(d_a, d_p),
        })
    }
}

/// `n` nearly uniform points on the unit sphere (golden-angle spiral).
pub fn fibonacci_sphere(n: usize) -> Vec<BlochVector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            BlochVector {
                x: r * phi.cos(),
                y: r * phi.sin(),
                z,
            }
        })
        .collect()
}

/// `‖actual(ρ) − ideal(ρ)‖` for the state with Bloch vector `v`, expressed
/// in the gate's natural basis.
pub fn deviation_norm_at(
    v: BlochVector,
    kind: GateKind,
    gamma_or_b2: f64,
    epsilon: f64,
    dt: f64,
) -> Result<f64> {
    let rho0 = DensityMatrix2::from_bloch(kind.natural_basis(), v)?;
    let actual = evolve(&rho0, kind, gamma_or_b2, epsilon, dt)?;
    let ideal = ideal_evolution(&rho0, epsilon, dt, kind)?;
    Ok(operator_norm(&deviation(&actual, &ideal)?))
}

/// Numerical `sup_ρ ‖actual(ρ) − ideal(ρ)‖` over pure initial states.
///
/// Scans a Fibonacci grid of `grid_density` points, then polishes the best
/// point with a simplex search in `(θ, φ)`.
pub fn sup_deviation_oracle(
    kind: GateKind,
    gamma_or_b2: f64,
    epsilon: f64,
    dt: f64,
    grid_density: usize,
) -> Result<f64> {
    if grid_density < MIN_GRID_DENSITY {
        return Err(Error::invalid(
            "grid_density",
            format!("must be >= {MIN_GRID_DENSITY}, got {grid_density}"),
        ));
    }
    ensure_nonnegative(gamma_or_b2, "gamma_or_b2")?;
    ensure_nonnegative(dt, "dt")?;
    let grid = fibonacci_sphere(grid_density);
    let values = grid
        .par_iter()
        .map(|&v| deviation_norm_at(v, kind, gamma_or_b2, epsilon, dt))
        .collect::<Result<Vec<f64>>>()?;
    // first maximum in grid order, so ties resolve the same way every run
    let (best_idx, best) =
        values
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );

    let seed = grid[best_idx];
    let theta0 = seed.z.clamp(-1.0, 1.0).acos();
    let phi0 = seed.y.atan2(seed.x);
    let step = 2.0 * (4.0 * std::f64::consts::PI / grid_density as f64).sqrt();
    let objective = |p: &[f64]| {
        deviation_norm_at(
            BlochVector::from_angles(p[0], p[1]),
            kind,
            gamma_or_b2,
            epsilon,
            dt,
        )
        .ok()
        .map(|v| -v)
    };
    let bounds = Bounds::new(
        vec![0.0, phi0 - std::f64::consts::PI],
        vec![std::f64::consts::PI, phi0 + std::f64::consts::PI],
    )?;
    let settings = NelderMeadSettings {
        max_evaluations: 400,
        x_tol: 1e-10,
        f_tol: 1e-15,
    };
    let refined = nelder_mead(
        objective,
        &[theta0, phi0],
        &[step, step],
        &bounds,
        &settings,
    )?;
    Ok(best.max(-refined.value))
}
