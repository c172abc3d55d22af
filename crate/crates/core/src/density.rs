//! Two-level density matrices with an explicit basis tag.
//!
//! The NOT gate is naturally described in the energy basis
//! `{|+⟩, |−⟩}`, `|±⟩ = (|0⟩ ± |1⟩)/√2`; the phase gate in the position basis
//! `{|0⟩, |1⟩}` (electron in the left or right dot). Mixing the two without a
//! conversion is a bug, so every matrix carries its basis.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-14;
pub const TRACE_TOL: f64 = 1e-14;
pub const POSITIVITY_TOL: f64 = 1e-12;

pub type Matrix2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    /// `{|+⟩, |−⟩}`; `|+⟩` is the ground state of `−(ε/2)σ_x`.
    Energy,
    /// `{|0⟩, |1⟩}`: left dot, right dot.
    Position,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Energy => "energy {+,-}",
            Basis::Position => "position {0,1}",
        })
    }
}

pub(crate) fn require_basis(found: Basis, expected: Basis) -> Result<()> {
    if found == expected {
        Ok(())
    } else {
        Err(Error::BasisMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        })
    }
}

/// Real Bloch vector, `ρ = (I + x σ_x + y σ_y + z σ_z)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let v = BlochVector { x, y, z };
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::NonFinite("Bloch vector".into()));
        }
        if v.norm() > 1.0 + 1e-12 {
            return Err(Error::InvalidDensityMatrix(format!(
                "Bloch vector norm {} exceeds 1",
                v.norm()
            )));
        }
        Ok(v)
    }

    /// Pure state at polar angle `theta`, azimuth `phi`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        BlochVector {
            x: theta.sin() * phi.cos(),
            y: theta.sin() * phi.sin(),
            z: theta.cos(),
        }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn scaled(&self, r: f64) -> Self {
        BlochVector {
            x: self.x * r,
            y: self.y * r,
            z: self.z * r,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    basis: Basis,
    m: Matrix2,
}

impl DensityMatrix2 {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(basis: Basis, m: Matrix2) -> Result<Self> {
        let rho = DensityMatrix2 { basis, m };
        rho.validate()?;
        Ok(rho)
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.m;
        if m.iter()
            .flatten()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite("density matrix entry".into()));
        }
        let asym = hermitian_asymmetry(m);
        if asym > HERMITIAN_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (asymmetry {asym:e})"
            )));
        }
        let tr = m[0][0] + m[1][1];
        if (tr - 1.0).norm() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr} != 1")));
        }
        let (lo, _) = self.eigenvalues();
        if lo < -POSITIVITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {lo:e}"
            )));
        }
        Ok(())
    }

    pub fn from_bloch(basis: Basis, v: BlochVector) -> Result<Self> {
        let v = BlochVector::new(v.x, v.y, v.z)?;
        let half = 0.5;
        DensityMatrix2::new(
            basis,
            [
                [
                    Complex64::new(half * (1.0 + v.z), 0.0),
                    Complex64::new(half * v.x, -half * v.y),
                ],
                [
                    Complex64::new(half * v.x, half * v.y),
                    Complex64::new(half * (1.0 - v.z), 0.0),
                ],
            ],
        )
    }

    /// Projector onto `α|first⟩ + β|second⟩` (normalised here).
    pub fn pure(basis: Basis, alpha: Complex64, beta: Complex64) -> Result<Self> {
        let n = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidDensityMatrix("zero state vector".into()));
        }
        let (a, b) = (alpha / n, beta / n);
        DensityMatrix2::new(
            basis,
            [
                [Complex64::new(a.norm_sqr(), 0.0), a * b.conj()],
                [b * a.conj(), Complex64::new(b.norm_sqr(), 0.0)],
            ],
        )
    }

    /// `|first⟩⟨first|` (index 0) or `|second⟩⟨second|` (index 1).
    pub fn basis_state(basis: Basis, index: usize) -> Self {
        let mut m = [[ZERO; 2]; 2];
        m[index.min(1)][index.min(1)] = Complex64::new(1.0, 0.0);
        DensityMatrix2 { basis, m }
    }

    pub(crate) fn from_parts_unchecked(basis: Basis, m: Matrix2) -> Self {
        DensityMatrix2 { basis, m }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn entries(&self) -> &Matrix2 {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.m[i][j]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn to_bloch(&self) -> BlochVector {
        let c = self.m[1][0];
        BlochVector {
            x: 2.0 * c.re,
            y: 2.0 * c.im,
            z: (self.m[0][0] - self.m[1][1]).re,
        }
    }

    pub fn purity(&self) -> f64 {
        self.m.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues(&self) -> (f64, f64) {
        hermitian_eigenvalues(&self.m)
    }

    /// Same state expressed in `target`. The change of basis is the
    /// Hadamard matrix, which is its own inverse.
    pub fn in_basis(&self, target: Basis) -> Self {
        if target == self.basis {
            return *self;
        }
        DensityMatrix2 {
            basis: target,
            m: hadamard_conjugate(&self.m),
        }
    }
}

fn hadamard_conjugate(m: &Matrix2) -> Matrix2 {
    // H m H with H = [[1, 1], [1, -1]]/√2
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    [
        [(a + b + c + d) * 0.5, (a - b + c - d) * 0.5],
        [(a + b - c - d) * 0.5, (a - b - c + d) * 0.5],
    ]
}

fn hermitian_asymmetry(m: &Matrix2) -> f64 {
    let off = (m[0][1] - m[1][0].conj()).norm();
    off.max(m[0][0].im.abs()).max(m[1][1].im.abs())
}

fn hermitian_eigenvalues(m: &Matrix2) -> (f64, f64) {
    let (a, d) = (m[0][0].re, m[1][1].re);
    let c = 0.5 * (m[0][1] + m[1][0].conj());
    let mean = 0.5 * (a + d);
    let radius = (0.5 * (a - d)).hypot(c.norm());
    (mean - radius, mean + radius)
}

/// A Hermitian 2×2 operator, e.g. the difference of two density matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hermitian2 {
    basis: Basis,
    m: Matrix2,
}

impl Hermitian2 {
    /// Accepts `m` if it is Hermitian to `1e-12` relative to its largest entry.
    pub fn new(basis: Basis, m: Matrix2) -> Result<Self> {
        let scale = m.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
        let asym = hermitian_asymmetry(&m);
        if !asym.is_finite() || asym > 1e-12 * scale {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Hermitian2 { basis, m })
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn entries(&self) -> &Matrix2 {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        (self.m[0][0] + self.m[1][1]).re
    }

    pub fn eigenvalues(&self) -> (f64, f64) {
        hermitian_eigenvalues(&self.m)
    }
}
