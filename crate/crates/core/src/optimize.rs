//! Box-constrained Nelder–Mead simplex search.
//!
//! Trial points are projected onto the box. The objective may decline a point
//! by returning `None`; such points are ranked worst and never accepted.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::invalid("bounds", "lower and upper differ in length"));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(Error::invalid(
                    "bounds",
                    format!("dimension {i}: [{lo}, {hi}] is not a finite ordered interval"),
                ));
            }
        }
        Ok(Bounds { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn project(&self, x: &mut [f64]) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = xi.clamp(self.lower[i], self.upper[i]);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadSettings {
    pub max_evaluations: usize,
    /// Stop once every vertex lies within `x_tol` of the best one (per axis).
    pub x_tol: f64,
    /// ... and the spread of objective values is below `f_tol`.
    pub f_tol: f64,
}

impl Default for NelderMeadSettings {
    fn default() -> Self {
        NelderMeadSettings {
            max_evaluations: 2000,
            x_tol: 1e-10,
            f_tol: 1e-14,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimises `f` starting from `x0` with initial simplex edge `step` per axis.
///
/// Deterministic: no randomness, ties resolved by vertex order. Axes whose
/// bounds coincide are held fixed.
pub fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    bounds: &Bounds,
    settings: &NelderMeadSettings,
) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> Option<f64>,
{
    let n = bounds.dim();
    if x0.len() != n || step.len() != n {
        return Err(Error::invalid("x0", "dimension does not match bounds"));
    }
    let evaluations = std::cell::Cell::new(0usize);
    let mut eval = |x: &[f64]| {
        evaluations.set(evaluations.get() + 1);
        match f(x) {
            Some(v) if v.is_finite() => v,
            _ => f64::INFINITY,
        }
    };

    let mut start = x0.to_vec();
    bounds.project(&mut start);
    let free: Vec<usize> = (0..n)
        .filter(|&i| bounds.lower[i] < bounds.upper[i])
        .collect();

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(free.len() + 1);
    let v0 = eval(&start);
    simplex.push((start.clone(), v0));
    for &i in &free {
        let mut x = start.clone();
        let h = if step[i] != 0.0 {
            step[i]
        } else {
            0.05 * (bounds.upper[i] - bounds.lower[i])
        };
        x[i] += h;
        if x[i] > bounds.upper[i] {
            x[i] = start[i] - h;
        }
        bounds.project(&mut x);
        let v = eval(&x);
        simplex.push((x, v));
    }
    if free.is_empty() {
        return Ok(Minimum {
            x: start,
            value: v0,
            evaluations: evaluations.get(),
            converged: true,
        });
    }

    let m = free.len();
    let mut converged = false;
    while evaluations.get() < settings.max_evaluations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = &simplex[0];
        let spread_x = simplex[1..].iter().all(|(x, _)| {
            free.iter()
                .all(|&i| (x[i] - best.0[i]).abs() <= settings.x_tol * (1.0 + best.0[i].abs()))
        });
        let spread_f = (simplex[m].1 - best.1).abs() <= settings.f_tol * (1.0 + best.1.abs());
        if spread_x && spread_f {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..m] {
            for i in 0..n {
                centroid[i] += x[i] / m as f64;
            }
        }
        let worst = simplex[m].clone();
        let along = |t: f64| {
            let mut x: Vec<f64> = (0..n)
                .map(|i| centroid[i] + t * (worst.0[i] - centroid[i]))
                .collect();
            bounds.project(&mut x);
            x
        };

        let xr = along(-1.0);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(-2.0);
            let fe = eval(&xe);
            simplex[m] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[m - 1].1 {
            simplex[m] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let x = along(-0.5);
            let v = eval(&x);
            (x, v)
        } else {
            let x = along(0.5);
            let v = eval(&x);
            (x, v)
        };
        if fc < worst.1.min(fr) {
            simplex[m] = (xc, fc);
            continue;
        }
        // shrink toward the best vertex
        let best_x = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let mut x: Vec<f64> = (0..n)
                .map(|i| best_x[i] + 0.5 * (vertex.0[i] - best_x[i]))
                .collect();
            bounds.project(&mut x);
            let v = eval(&x);
            *vertex = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Ok(Minimum {
        x,
        value,
        evaluations: evaluations.get(),
        converged,
    })
}
