//! Cycle-time sweeps, crossover search, geometry optimisation and the
//! closed-form versus oracle self-check.

use std::fmt;

use rayon::prelude::*;

use crate::error::{ensure_positive, Error, Result};
use crate::gates::{error_not, error_phase, ErrorReport};
use crate::materials::{preset, CouplingChannel, Material, QubitGeometry};
use crate::optimize::{nelder_mead, Bounds, NelderMeadSettings};
use crate::oracle::{b2_time_dependent_oracle, gamma_golden_rule_oracle};
use crate::quadrature::QuadratureSettings;
use crate::rates::{
    b2_closed_form, gamma_closed_form, regime_check, splitting_for_cycle_time,
    wavevector_from_splitting, DEFAULT_REGIME_THRESHOLD,
};

pub const DEFAULT_DT_MIN: f64 = 1e-12;
pub const DEFAULT_DT_MAX: f64 = 1e-8;
pub const DEFAULT_POINTS_PER_DECADE: usize = 20;
/// Time at which the `B²(t)` oracle is compared with the saturated value.
pub const DEFAULT_B2_CHECK_TIME: f64 = 100e-12;

/// Relative width of the final crossover bracket.
pub const CROSSOVER_REL_TOL: f64 = 1e-6;

pub const GAMMA_TOL_DEFORMATION: f64 = 1e-5;
pub const GAMMA_TOL_PIEZO: f64 = 1e-4;
pub const B2_TOL: f64 = 0.02;
/// `B²` is only held to [`B2_TOL`] for deformation channels with `L ≥ 10a`;
/// below that the finite-`a/L` correction is not small.
pub const B2_MIN_SEPARATION: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub material: Material,
    pub geometry: QubitGeometry,
    /// Evaluated in the order of [`CouplingChannel::ALL`].
    pub channels: Vec<CouplingChannel>,
    /// [s]
    pub dt_min: f64,
    /// [s]
    pub dt_max: f64,
    pub points_per_decade: usize,
    pub log_spaced: bool,
    pub quadrature: QuadratureSettings,
    pub regime_threshold: f64,
    /// Also emit a row with `Γ` and `B²` summed over channels.
    pub combined: bool,
    /// [s]
    pub b2_check_time: f64,
}

impl SweepConfig {
    /// Preset with the default grid.
    pub fn from_preset(name: &str) -> Result<Self> {
        let p = preset(name)?;
        let cfg = SweepConfig {
            material: p.material,
            geometry: p.geometry,
            channels: p.channels,
            dt_min: DEFAULT_DT_MIN,
            dt_max: DEFAULT_DT_MAX,
            points_per_decade: DEFAULT_POINTS_PER_DECADE,
            log_spaced: true,
            quadrature: QuadratureSettings::default(),
            regime_threshold: DEFAULT_REGIME_THRESHOLD,
            combined: false,
            b2_check_time: DEFAULT_B2_CHECK_TIME,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        self.geometry.validate()?;
        if self.channels.is_empty() {
            return Err(Error::invalid(
                "channels",
                "at least one channel is required",
            ));
        }
        for c in &self.channels {
            c.check(&self.material, &self.geometry)?;
        }
        ensure_positive(self.dt_min, "dt_min")?;
        ensure_positive(self.dt_max, "dt_max")?;
        if self.dt_min > self.dt_max {
            return Err(Error::invalid(
                "dt_max",
                format!(
                    "must be >= dt_min ({:e} s), got {:e} s",
                    self.dt_min, self.dt_max
                ),
            ));
        }
        if self.points_per_decade == 0 {
            return Err(Error::invalid("points_per_decade", "must be >= 1"));
        }
        self.quadrature.validate()?;
        ensure_positive(self.regime_threshold, "regime_threshold")?;
        ensure_positive(self.b2_check_time, "b2_time")?;
        Ok(())
    }

    /// Channels deduplicated, in canonical order.
    pub fn ordered_channels(&self) -> Vec<CouplingChannel> {
        CouplingChannel::ALL
            .into_iter()
            .filter(|c| self.channels.contains(c))
            .collect()
    }

    /// Ascending cycle times, both end points included exactly.
    pub fn grid(&self) -> Vec<f64> {
        if self.dt_min == self.dt_max {
            return vec![self.dt_min];
        }
        let decades = (self.dt_max / self.dt_min).log10();
        let n = ((decades * self.points_per_decade as f64).round() as usize).max(1);
        (0..=n)
            .map(|i| {
                if i == 0 {
                    self.dt_min
                } else if i == n {
                    self.dt_max
                } else {
                    let t = i as f64 / n as f64;
                    if self.log_spaced {
                        self.dt_min * 10f64.powf(decades * t)
                    } else {
                        self.dt_min + (self.dt_max - self.dt_min) * t
                    }
                }
            })
            .collect()
    }
}

/// Channel column of a sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowChannel {
    Single(CouplingChannel),
    /// Rates and exponents summed over the configured channels.
    Combined,
}

impl fmt::Display for RowChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowChannel::Single(c) => c.fmt(f),
            RowChannel::Combined => f.write_str("combined"),
        }
    }
}

/// One `(dt, channel)` point. Numeric fields are NaN when `error` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub dt: f64,
    pub epsilon: f64,
    pub channel: RowChannel,
    pub gamma: f64,
    pub b2: f64,
    pub d_a: f64,
    pub d_p: f64,
    pub d: f64,
    /// Both `ak` and `Lk` below the regime threshold.
    pub regime_ok: bool,
    pub error: Option<String>,
}

impl SweepRow {
    fn from_report(r: &ErrorReport, channel: RowChannel, regime_ok: bool) -> Self {
        SweepRow {
            dt: r.dt,
            epsilon: r.epsilon,
            channel,
            gamma: r.gamma,
            b2: r.b2,
            d_a: r.d_a,
            d_p: r.d_p,
            d: r.d,
            regime_ok,
            error: None,
        }
    }

    fn failed(dt: f64, epsilon: f64, channel: RowChannel, e: &Error) -> Self {
        SweepRow {
            dt,
            epsilon,
            channel,
            gamma: f64::NAN,
            b2: f64::NAN,
            d_a: f64::NAN,
            d_p: f64::NAN,
            d: f64::NAN,
            regime_ok: false,
            error: Some(e.to_string()),
        }
    }
}

fn channel_report(
    config: &SweepConfig,
    channel: CouplingChannel,
    b2: &Result<f64>,
    dt: f64,
) -> Result<ErrorReport> {
    let epsilon = splitting_for_cycle_time(dt)?;
    let gamma = gamma_closed_form(channel, &config.material, &config.geometry, epsilon)?;
    let b2 = b2.clone()?;
    ErrorReport::new(channel, epsilon, dt, gamma, b2)
}

fn rows_at(
    config: &SweepConfig,
    channels: &[(CouplingChannel, Result<f64>)],
    dt: f64,
) -> Vec<SweepRow> {
    let epsilon = splitting_for_cycle_time(dt).unwrap_or(f64::NAN);
    let regime_ok = wavevector_from_splitting(epsilon, &config.material)
        .and_then(|k| regime_check(&config.geometry, k, config.regime_threshold))
        .map(|r| r.long_wavelength)
        .unwrap_or(false);
    let mut rows = Vec::with_capacity(channels.len() + 1);
    let mut total: Result<(f64, f64)> = Ok((0.0, 0.0));
    for (channel, b2) in channels {
        let tag = RowChannel::Single(*channel);
        match channel_report(config, *channel, b2, dt) {
            Ok(r) => {
                if let Ok((g, b)) = &mut total {
                    *g += r.gamma;
                    *b += r.b2;
                }
                rows.push(SweepRow::from_report(&r, tag, regime_ok));
            }
            Err(e) => {
                log::warn!("dt = {dt:e} s, {channel}: {e}");
                rows.push(SweepRow::failed(dt, epsilon, tag, &e));
                total = Err(e);
            }
        }
    }
    if config.combined {
        let row = total.and_then(|(g, b)| {
            ErrorReport::new(CouplingChannel::ALL[0], epsilon, dt, g, b)
                .map(|r| SweepRow::from_report(&r, RowChannel::Combined, regime_ok))
        });
        rows.push(row.unwrap_or_else(|e| SweepRow::failed(dt, epsilon, RowChannel::Combined, &e)));
    }
    rows
}

/// Error budget over the cycle-time grid, ordered by `dt` then channel.
///
/// A failing point is reported in its row rather than aborting the sweep.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let channels: Vec<(CouplingChannel, Result<f64>)> = config
        .ordered_channels()
        .into_iter()
        .map(|c| (c, b2_closed_form(c, &config.material, &config.geometry)))
        .collect();
    let per_dt: Vec<Vec<SweepRow>> = config
        .grid()
        .par_iter()
        .map(|&dt| rows_at(config, &channels, dt))
        .collect();
    Ok(per_dt.into_iter().flatten().collect())
}

/// Per-channel error budget at a single cycle time.
pub fn error_reports_at(config: &SweepConfig, dt: f64) -> Result<Vec<ErrorReport>> {
    config.validate()?;
    ensure_positive(dt, "dt")?;
    config
        .ordered_channels()
        .into_iter()
        .map(|c| {
            let b2 = b2_closed_form(c, &config.material, &config.geometry);
            channel_report(config, c, &b2, dt)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Crossover {
    /// `D_A(dt) = D_P` at `dt`.
    Found { dt: f64, d_a: f64, d_p: f64 },
    /// `D_A` never drops through `D_P` on the grid.
    NotFound {
        dt_min: f64,
        dt_max: f64,
        d_a_at_min: f64,
        d_a_at_max: f64,
        d_p: f64,
    },
}

/// Root of a function that is positive at `lo` and non-positive at `hi`,
/// bisected in `ln dt` until the bracket is narrower than `rel_tol`.
pub fn bisect_crossing<F>(mut f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    ensure_positive(lo, "lo")?;
    ensure_positive(hi, "hi")?;
    ensure_positive(rel_tol, "rel_tol")?;
    let (mut lo, mut hi) = (lo, hi);
    if !(f(lo)? > 0.0 && f(hi)? <= 0.0) {
        return Err(Error::invalid(
            "bracket",
            format!("[{lo:e}, {hi:e}] does not bracket a sign change"),
        ));
    }
    while hi - lo > rel_tol * lo {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// Cycle time at which relaxation and dephasing errors are equal.
///
/// `D_A` is not monotone over the whole grid (it is exponentially small
/// when `ak ≫ 1`), so the grid is scanned for the last downward crossing and
/// only that bracket is bisected.
pub fn find_crossover(config: &SweepConfig, channel: CouplingChannel) -> Result<Crossover> {
    config.validate()?;
    channel.check(&config.material, &config.geometry)?;
    let d_p = error_phase(b2_closed_form(channel, &config.material, &config.geometry)?);
    let d_a = |dt: f64| -> Result<f64> {
        let eps = splitting_for_cycle_time(dt)?;
        Ok(error_not(
            gamma_closed_form(channel, &config.material, &config.geometry, eps)?,
            dt,
        ))
    };
    let mut grid = config.grid();
    if grid.len() == 1 {
        grid.push(grid[0]);
    }
    let values = grid
        .iter()
        .map(|&dt| d_a(dt))
        .collect::<Result<Vec<f64>>>()?;
    let bracket = (0..grid.len() - 1)
        .rev()
        .find(|&i| values[i] > d_p && values[i + 1] <= d_p);
    let Some(i) = bracket else {
        return Ok(Crossover::NotFound {
            dt_min: grid[0],
            dt_max: grid[grid.len() - 1],
            d_a_at_min: values[0],
            d_a_at_max: values[values.len() - 1],
            d_p,
        });
    };
    let dt = bisect_crossing(
        |t| Ok(d_a(t)? - d_p),
        grid[i],
        grid[i + 1],
        CROSSOVER_REL_TOL,
    )?;
    Ok(Crossover::Found {
        dt,
        d_a: d_a(dt)?,
        d_p,
    })
}

/// Search box for [`minimize_geometry`], in metres. Equal ends fix an axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryBounds {
    pub a: (f64, f64),
    pub l: (f64, f64),
}

impl GeometryBounds {
    pub fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("a", self.a), ("L", self.l)] {
            ensure_positive(lo, name)?;
            ensure_positive(hi, name)?;
            if lo > hi {
                return Err(Error::invalid(
                    name,
                    format!("bounds [{lo:e}, {hi:e}] are reversed"),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryOptimum {
    pub a: f64,
    pub l: f64,
    pub d: f64,
    pub d_a: f64,
    pub d_p: f64,
    /// Best value among the seed grid, for comparison.
    pub best_seed: f64,
    pub evaluations: usize,
    pub discarded: usize,
}

const SEEDS_PER_AXIS: usize = 9;

fn log_axis(lo: f64, hi: f64) -> Vec<f64> {
    if lo == hi {
        return vec![lo];
    }
    let n = SEEDS_PER_AXIS - 1;
    (0..=n)
        .map(|i| match i {
            0 => lo,
            i if i == n => hi,
            i => lo * (hi / lo).powf(i as f64 / n as f64),
        })
        .collect()
}

fn from_log(x: f64, lo: f64, hi: f64) -> f64 {
    if x <= lo.ln() {
        lo
    } else if x >= hi.ln() {
        hi
    } else {
        x.exp()
    }
}

/// Minimises `max(D_A, D_P)` for one channel at fixed `dt` over `(a, L)`.
///
/// A 9×9 logarithmic seed grid is followed by a simplex search in
/// `(ln a, ln L)`. Points where the objective cannot be evaluated are
/// skipped with a warning.
pub fn minimize_geometry(
    config: &SweepConfig,
    bounds: &GeometryBounds,
    channel: CouplingChannel,
    dt: f64,
) -> Result<GeometryOptimum> {
    bounds.validate()?;
    ensure_positive(dt, "dt")?;
    channel.check(&config.material, &config.geometry)?;
    let eps = splitting_for_cycle_time(dt)?;
    let shape = config.geometry.shape;
    let evaluate = |a: f64, l: f64| -> Result<ErrorReport> {
        let g = QubitGeometry::new(a, l, shape)?;
        let gamma = gamma_closed_form(channel, &config.material, &g, eps)?;
        let b2 = b2_closed_form(channel, &config.material, &g)?;
        ErrorReport::new(channel, eps, dt, gamma, b2)
    };
    let evaluations = std::cell::Cell::new(0usize);
    let discarded = std::cell::Cell::new(0usize);
    let objective = |a: f64, l: f64| -> Option<f64> {
        evaluations.set(evaluations.get() + 1);
        match evaluate(a, l) {
            Ok(r) if r.d.is_finite() => Some(r.d),
            Ok(r) => {
                log::warn!(
                    "probe a = {a:e} m, L = {l:e} m gave non-finite error {}",
                    r.d
                );
                discarded.set(discarded.get() + 1);
                None
            }
            Err(e) => {
                log::warn!("probe a = {a:e} m, L = {l:e} m discarded: {e}");
                discarded.set(discarded.get() + 1);
                None
            }
        }
    };

    let mut best: Option<(f64, f64, f64)> = None;
    for &a in &log_axis(bounds.a.0, bounds.a.1) {
        for &l in &log_axis(bounds.l.0, bounds.l.1) {
            if let Some(v) = objective(a, l) {
                if best.is_none_or(|b| v < b.2) {
                    best = Some((a, l, v));
                }
            }
        }
    }
    let (a0, l0, seed_value) = best.ok_or_else(|| {
        Error::invalid(
            "geometry bounds",
            "objective could not be evaluated at any seed point",
        )
    })?;

    let lo = vec![bounds.a.0.ln(), bounds.l.0.ln()];
    let hi = vec![bounds.a.1.ln(), bounds.l.1.ln()];
    let step: Vec<f64> = (0..2)
        .map(|i| (hi[i] - lo[i]) / (SEEDS_PER_AXIS - 1) as f64)
        .collect();
    let search_box = Bounds::new(lo, hi)?;
    let refined = nelder_mead(
        |p: &[f64]| {
            objective(
                from_log(p[0], bounds.a.0, bounds.a.1),
                from_log(p[1], bounds.l.0, bounds.l.1),
            )
        },
        &[a0.ln(), l0.ln()],
        &step,
        &search_box,
        &NelderMeadSettings::default(),
    )?;
    let (a, l) = if refined.value < seed_value {
        (
            from_log(refined.x[0], bounds.a.0, bounds.a.1),
            from_log(refined.x[1], bounds.l.0, bounds.l.1),
        )
    } else {
        (a0, l0)
    };
    let r = evaluate(a, l)?;
    Ok(GeometryOptimum {
        a,
        l,
        d: r.d,
        d_a: r.d_a,
        d_p: r.d_p,
        best_seed: seed_value,
        evaluations: evaluations.get(),
        discarded: discarded.get(),
    })
}

/// A point where the oracle could not be evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    /// `None` for the `B²` check.
    pub dt: Option<f64>,
    pub message: String,
    pub nonconvergence: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelCheck {
    pub channel: CouplingChannel,
    pub gamma_points: usize,
    pub gamma_max_rel_dev: f64,
    pub gamma_tol: f64,
    pub b2_closed: f64,
    pub b2_oracle: Option<f64>,
    pub b2_rel_dev: Option<f64>,
    /// `None` when the comparison is diagnostic only.
    pub b2_tol: Option<f64>,
    pub failures: Vec<PointFailure>,
}

impl ChannelCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
            && self.gamma_max_rel_dev <= self.gamma_tol
            && match (self.b2_tol, self.b2_rel_dev) {
                (Some(tol), Some(dev)) => dev <= tol,
                (Some(_), None) => false,
                (None, _) => true,
            }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub b2_time: f64,
    pub channels: Vec<ChannelCheck>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.channels.iter().all(ChannelCheck::passed)
    }

    pub fn nonconvergence(&self) -> bool {
        self.channels
            .iter()
            .flat_map(|c| &c.failures)
            .any(|f| f.nonconvergence)
    }
}

fn rel_dev(value: f64, reference: f64) -> f64 {
    if value == reference {
        0.0
    } else {
        (value / reference - 1.0).abs()
    }
}

fn failure(dt: Option<f64>, e: &Error) -> PointFailure {
    PointFailure {
        dt,
        message: e.to_string(),
        nonconvergence: e.is_nonconvergence(),
    }
}

/// Compares every closed form with its quadrature oracle: `Γ` at each grid
/// point, `B²` once at the configured check time.
pub fn oracle_check(config: &SweepConfig) -> Result<OracleReport> {
    config.validate()?;
    let grid = config.grid();
    let (m, g, q) = (&config.material, &config.geometry, &config.quadrature);
    let mut channels = Vec::new();
    for channel in config.ordered_channels() {
        let gamma_tol = if channel.is_deformation() {
            GAMMA_TOL_DEFORMATION
        } else {
            GAMMA_TOL_PIEZO
        };
        let points: Vec<Result<f64>> = grid
            .par_iter()
            .map(|&dt| {
                let eps = splitting_for_cycle_time(dt)?;
                let closed = gamma_closed_form(channel, m, g, eps)?;
                let oracle = gamma_golden_rule_oracle(channel, m, g, eps, q)?;
                Ok(rel_dev(oracle, closed))
            })
            .collect();
        let mut failures = Vec::new();
        let mut gamma_max_rel_dev: f64 = 0.0;
        for (dt, p) in grid.iter().zip(points) {
            match p {
                Ok(dev) => gamma_max_rel_dev = gamma_max_rel_dev.max(dev),
                Err(e) => failures.push(failure(Some(*dt), &e)),
            }
        }

        let b2_closed = b2_closed_form(channel, m, g)?;
        let b2_tol = (channel.is_deformation() && g.l >= B2_MIN_SEPARATION * g.a).then_some(B2_TOL);
        let (b2_oracle, b2_rel_dev) =
            match b2_time_dependent_oracle(channel, m, g, config.b2_check_time, q) {
                Ok(v) => (Some(v), Some(rel_dev(v, b2_closed))),
                Err(e) => {
                    failures.push(failure(None, &e));
                    (None, None)
                }
            };
        channels.push(ChannelCheck {
            channel,
            gamma_points: grid.len(),
            gamma_max_rel_dev,
            gamma_tol,
            b2_closed,
            b2_oracle,
            b2_rel_dev,
            b2_tol,
            failures,
        });
    }
    Ok(OracleReport {
        b2_time: config.b2_check_time,
        channels,
    })
}
