//! Roulettes traced by a point fixed to a unit circle rolling without
//! slipping: cycloids (line base) and epicycloids (exterior circle base),
//! their curvature, and the maximum radius of curvature along one arch.
//!
//! Everything is parametrized by the rolled arc length `t`, so cusps sit
//! at multiples of `2*pi` for both bases and the cycloid is the literal
//! `R -> infinity` limit of the epicycloid.

use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RouletteError {
    #[error("parameter t={0} is within the cusp exclusion zone (speed vanishes)")]
    CuspParameter(f64),
}

/// Parameters within this distance of a cusp are excluded from curvature
/// and normal-line evaluation.
pub const CUSP_EXCLUSION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixedCurve {
    Line,
    Circle { radius: f64 },
}

/// A unit circle rolling along `fixed`, tracing the point at distance
/// `offset` from the rolling center (`offset = 1` puts the generator on
/// the rim, giving cusps where it touches the base curve).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouletteTrace {
    pub fixed: FixedCurve,
    pub rolling_radius: f64,
    pub offset: f64,
}

impl RouletteTrace {
    pub fn cycloid() -> Self {
        RouletteTrace {
            fixed: FixedCurve::Line,
            rolling_radius: 1.0,
            offset: 1.0,
        }
    }

    pub fn epicycloid(radius: f64) -> Self {
        assert!(radius > 0.0);
        RouletteTrace {
            fixed: FixedCurve::Circle { radius },
            rolling_radius: 1.0,
            offset: 1.0,
        }
    }

    /// Traced point at rolled arc `t`. The cycloid starts at the contact
    /// point (a cusp for `offset = 1`); the epicycloid rolls outside the
    /// base circle starting from the cusp on the positive x-axis.
    pub fn trace_point(&self, t: f64) -> [f64; 2] {
        let d = self.offset;
        match self.fixed {
            FixedCurve::Line => [t - d * t.sin(), 1.0 - d * t.cos()],
            FixedCurve::Circle { radius: r } => {
                let phi = t / r;
                let b = (r + 1.0) / r;
                [
                    (r + 1.0) * phi.cos() - d * (b * t).cos(),
                    (r + 1.0) * phi.sin() - d * (b * t).sin(),
                ]
            }
        }
    }

    pub fn velocity(&self, t: f64) -> [f64; 2] {
        let d = self.offset;
        match self.fixed {
            FixedCurve::Line => [1.0 - d * t.cos(), d * t.sin()],
            FixedCurve::Circle { radius: r } => {
                let phi = t / r;
                let b = (r + 1.0) / r;
                [
                    -b * phi.sin() + d * b * (b * t).sin(),
                    b * phi.cos() - d * b * (b * t).cos(),
                ]
            }
        }
    }

    pub fn acceleration(&self, t: f64) -> [f64; 2] {
        let d = self.offset;
        match self.fixed {
            FixedCurve::Line => [d * t.sin(), d * t.cos()],
            FixedCurve::Circle { radius: r } => {
                let phi = t / r;
                let b = (r + 1.0) / r;
                [
                    -b / r * phi.cos() + d * b * b * (b * t).cos(),
                    -b / r * phi.sin() + d * b * b * (b * t).sin(),
                ]
            }
        }
    }

    /// Point of tangency between the rolling circle and the base at `t`.
    pub fn contact_point(&self, t: f64) -> [f64; 2] {
        match self.fixed {
            FixedCurve::Line => [t, 0.0],
            FixedCurve::Circle { radius: r } => {
                let phi = t / r;
                [r * phi.cos(), r * phi.sin()]
            }
        }
    }

    pub fn speed(&self, t: f64) -> f64 {
        let v = self.velocity(t);
        v[0].hypot(v[1])
    }

    /// Rolled arc distance to the nearest cusp parameter (`offset = 1`).
    pub fn distance_to_cusp(&self, t: f64) -> f64 {
        (t - TAU * (t / TAU).round()).abs()
    }

    /// Unsigned curvature from the analytic derivatives.
    pub fn curvature(&self, t: f64) -> Result<f64, RouletteError> {
        if self.offset == 1.0 && self.distance_to_cusp(t) < CUSP_EXCLUSION {
            return Err(RouletteError::CuspParameter(t));
        }
        let v = self.velocity(t);
        let a = self.acceleration(t);
        let cross = (v[0] * a[1] - v[1] * a[0]).abs();
        let sp = v[0].hypot(v[1]);
        Ok(cross / (sp * sp * sp))
    }

    pub fn radius_of_curvature(&self, t: f64) -> Result<f64, RouletteError> {
        Ok(1.0 / self.curvature(t)?)
    }

    /// Inner product of the unit tangent with the unit direction toward
    /// the contact point; 0 means the normal line passes through the point
    /// of tangency.
    pub fn normal_line_defect(&self, t: f64) -> Result<f64, RouletteError> {
        if self.offset == 1.0 && self.distance_to_cusp(t) < CUSP_EXCLUSION {
            return Err(RouletteError::CuspParameter(t));
        }
        let p = self.trace_point(t);
        let c = self.contact_point(t);
        let v = self.velocity(t);
        let sp = v[0].hypot(v[1]);
        if sp < 1e-12 {
            return Err(RouletteError::CuspParameter(t));
        }
        let dx = c[0] - p[0];
        let dy = c[1] - p[1];
        let dn = dx.hypot(dy);
        if dn < 1e-12 {
            return Err(RouletteError::CuspParameter(t));
        }
        Ok(((v[0] * dx + v[1] * dy) / (sp * dn)).abs())
    }
}

/// Maximum radius of curvature along one cusp-to-cusp arch of the
/// epicycloid generated by a rim point rolling outside a circle of radius
/// `radius`: dense grid over the arch, then golden-section refinement of
/// the best sample.
pub fn max_radius_of_curvature(radius: f64) -> f64 {
    let trace = RouletteTrace::epicycloid(radius);
    arch_max_radius(&trace)
}

/// Same search for an arbitrary rim-generated roulette (used by tests for
/// the cycloid limit).
pub fn arch_max_radius(trace: &RouletteTrace) -> f64 {
    const GRID: usize = 4096;
    let lo = CUSP_EXCLUSION;
    let hi = TAU - CUSP_EXCLUSION;
    let rho = |t: f64| trace.radius_of_curvature(t).unwrap_or(0.0);
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=GRID {
        let t = lo + (hi - lo) * i as f64 / GRID as f64;
        let v = rho(t);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let step = (hi - lo) / GRID as f64;
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    let (_, neg_max) = crate::solver::golden_section_min(|t| -rho(t), a, b, 1e-12);
    -neg_max
}
