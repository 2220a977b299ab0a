//! Critical configurations where competing path families tie: the diaxial
//! critical heights on a can, the three-path partner relation on a cup,
//! and the rim-chord transcendental equation with its associated height.

use crate::roulette::max_radius_of_curvature;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CriticalError {
    #[error("no admissible solution: {0}")]
    NoSolution(String),
    #[error("theorem hypothesis violated: need a >= s - r_max + 2 = {min_a}, got a = {a}")]
    HypothesisViolated { a: f64, min_a: f64 },
    #[error("partner distance b = {b} falls outside (0, s]")]
    PartnerOffSurface { b: f64 },
    #[error("no positive root of theta - sin(theta) = bp*(1 - cos(theta)) in (0, 2*pi)")]
    NoPositiveRoot,
}

/// A resolved critical configuration with its derived quantities.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CriticalConfig {
    /// Diaxial points on opposite rims tie four ways at this height.
    OppositeRims { h: f64 },
    /// Diaxial side points at depths `c` and `d = h - c` below the lid.
    SideDiaxial { c: f64, h: f64, d: f64 },
    /// Diaxial mid-circle points; the four-way tie at length pi.
    MidCircle { h: f64 },
    /// Cup side point at distance `a` from the apex and its diaxial
    /// three-path partner at distance `b`, common length `2s - a - b + 2`.
    CupThreePath { s: f64, a: f64, b: f64, length: f64 },
    /// Root of the rim-chord equation for a given chord distance `bp`,
    /// with the associated can height `h = 2 * bp * sin(theta)`.
    RimChord {
        bp: f64,
        theta: f64,
        residual: f64,
        h: Option<f64>,
        root_ge_pi: bool,
    },
}

/// Critical can height for diaxial side points whose distances from the
/// lid are `c` and `d = h - c`:
///
/// ```text
/// h = (pi^2 + 4c^2 - 4) / (4c + 4)
/// ```
///
/// At this height the two side geodesics tie with the over-lid and
/// over-base paths, giving exactly four minimal paths.
pub fn critical_height_side_diaxial(c: f64) -> Result<f64, CriticalError> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(CriticalError::NoSolution(format!(
            "depth c must be nonnegative, got {c}"
        )));
    }
    let h = (PI * PI + 4.0 * c * c - 4.0) / (4.0 * c + 4.0);
    if h - c < 0.0 {
        return Err(CriticalError::NoSolution(format!(
            "d = h - c = {} is negative at c = {c}",
            h - c
        )));
    }
    Ok(h)
}

pub fn opposite_rims_config() -> CriticalConfig {
    CriticalConfig::OppositeRims {
        h: critical_height_side_diaxial(0.0).expect("c = 0 is admissible"),
    }
}

/// The mid-circle configuration is the fixed point `c = h / 2`, where the
/// critical height collapses to `pi - 2`.
pub fn mid_circle_config() -> CriticalConfig {
    CriticalConfig::MidCircle { h: PI - 2.0 }
}

pub fn side_diaxial_config(c: f64) -> Result<CriticalConfig, CriticalError> {
    let h = critical_height_side_diaxial(c)?;
    Ok(CriticalConfig::SideDiaxial { c, h, d: h - c })
}

/// Distance from the apex of the diaxial partner joined to `a` by three
/// minimal paths on a cup of slant height `s`:
///
/// ```text
/// b = 2(s - a + 1)(s + 1) / (2s + 2 - a [1 + cos(pi / s)])
/// ```
///
/// Requires the curvature hypothesis `a >= s - r_max + 2`, where `r_max`
/// is the maximum radius of curvature of the rim-generated epicycloid.
pub fn cup_three_path_partner(s: f64, a: f64) -> Result<f64, CriticalError> {
    assert!(s > 1.0, "cup slant height must exceed 1");
    let r_max = max_radius_of_curvature(s);
    let min_a = s - r_max + 2.0;
    if a < min_a - 1e-12 {
        return Err(CriticalError::HypothesisViolated { a, min_a });
    }
    if !(a > 0.0 && a <= s) {
        return Err(CriticalError::HypothesisViolated { a, min_a });
    }
    let b = 2.0 * (s - a + 1.0) * (s + 1.0) / (2.0 * s + 2.0 - a * (1.0 + (PI / s).cos()));
    if !(b > 0.0 && b <= s + 1e-12) {
        return Err(CriticalError::PartnerOffSurface { b });
    }
    Ok(b.min(s))
}

/// Residual of the defining equation `(2s - a - b + 2)^2 =
/// a^2 - 2ab cos(pi/s) + b^2` (over-lid length squared against the direct
/// side chord squared).
pub fn cup_three_path_residual(s: f64, a: f64, b: f64) -> f64 {
    let lhs = (2.0 * s - a - b + 2.0) * (2.0 * s - a - b + 2.0);
    let rhs = a * a - 2.0 * a * b * (PI / s).cos() + b * b;
    lhs - rhs
}

pub fn cup_three_path_config(s: f64, a: f64) -> Result<CriticalConfig, CriticalError> {
    let b = cup_three_path_partner(s, a)?;
    Ok(CriticalConfig::CupThreePath {
        s,
        a,
        b,
        length: 2.0 * s - a - b + 2.0,
    })
}

/// Smallest positive root of the rim-chord equation
///
/// ```text
/// theta - sin(theta) = bp * (1 - cos(theta))
/// ```
///
/// found by sign-bracketing on a 1000-point scan of `(0, 2*pi)` followed
/// by bisection; `theta = 0` solves trivially and is rejected. Also
/// returns the associated can height `h = 2 * bp * sin(theta)` when
/// `sin(theta) > 0`, and flags roots at or beyond `pi`, where the chord
/// geometry stops being meaningful.
pub fn solve_rim_chord_theta(bp: f64) -> Result<CriticalConfig, CriticalError> {
    if !(bp > 0.0) || !bp.is_finite() {
        return Err(CriticalError::NoPositiveRoot);
    }
    let f = |theta: f64| theta - theta.sin() - bp * (1.0 - theta.cos());
    const SCAN: usize = 1000;
    let lo0 = 1e-6;
    let hi0 = TAU;
    let mut bracket = None;
    let mut prev_x = lo0;
    let mut prev_f = f(lo0);
    for i in 1..=SCAN {
        let x = lo0 + (hi0 - lo0) * i as f64 / SCAN as f64;
        let fx = f(x);
        if prev_f == 0.0 {
            bracket = Some((prev_x, prev_x));
            break;
        }
        if prev_f * fx <= 0.0 {
            bracket = Some((prev_x, x));
            break;
        }
        prev_x = x;
        prev_f = fx;
    }
    let (mut lo, mut hi) = bracket.ok_or(CriticalError::NoPositiveRoot)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    let theta = 0.5 * (lo + hi);
    let residual = f(theta);
    if theta <= 1e-6 {
        return Err(CriticalError::NoPositiveRoot);
    }
    let h = if theta.sin() > 0.0 {
        Some(2.0 * bp * theta.sin())
    } else {
        None
    };
    Ok(CriticalConfig::RimChord {
        bp,
        theta,
        residual,
        h,
        root_ge_pi: theta >= PI,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Surface, SurfacePoint};
    use crate::solver::{solve, FamilyOutcome, Multiplicity, SolveConfig};

    #[test]
    fn opposite_rims_height() {
        let h = critical_height_side_diaxial(0.0).unwrap();
        assert!((h - (PI * PI - 4.0) / 4.0).abs() < 1e-15);
        assert!((h - 1.467_401_100_272_339_7).abs() < 1e-15);
    }

    #[test]
    fn mid_circle_is_the_fixed_point() {
        // c = h/2 solves h(c) = 2c at h = pi - 2
        let h = PI - 2.0;
        let c = h / 2.0;
        let got = critical_height_side_diaxial(c).unwrap();
        assert!((got - h).abs() < 1e-14);
    }

    #[test]
    fn side_diaxial_formula_spot_value() {
        let h = critical_height_side_diaxial(0.5).unwrap();
        assert!((h - (PI * PI - 3.0) / 6.0).abs() < 1e-15);
    }

    #[test]
    fn inadmissible_depth_is_rejected() {
        assert!(matches!(
            critical_height_side_diaxial(2.0),
            Err(CriticalError::NoSolution(_))
        ));
        assert!(matches!(
            critical_height_side_diaxial(-0.1),
            Err(CriticalError::NoSolution(_))
        ));
    }

    #[test]
    fn side_diaxial_four_way_tie_via_solver() {
        let cfgs = [0.0, 0.5];
        for c in cfgs {
            let h = critical_height_side_diaxial(c).unwrap();
            let surface = Surface::can(h).unwrap();
            let a = SurfacePoint::side_can(0.0, h - c);
            let b = SurfacePoint::side_can(PI, c);
            let rep = solve(&surface, &a, &b, &SolveConfig::default()).unwrap();
            assert_eq!(rep.multiplicity, Multiplicity::Finite(4), "c = {c}");
            assert!((rep.min_length - (h + 2.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn tie_is_a_crossing_not_a_tangency() {
        let c = 0.25;
        let h = critical_height_side_diaxial(c).unwrap();
        let family_min = |h: f64, fam: crate::families::FamilyId| -> f64 {
            let surface = Surface::can(h).unwrap();
            let a = SurfacePoint::side_can(0.0, h - c);
            let b = SurfacePoint::side_can(PI, c.min(h));
            let rep = solve(&surface, &a, &b, &SolveConfig::default()).unwrap();
            rep.per_family
                .iter()
                .find(|o: &&FamilyOutcome| o.family == fam)
                .map(|o| o.min)
                .unwrap()
        };
        use crate::families::FamilyId::{CanSideDirect, CanSideOverLid};
        let at = |h: f64| family_min(h, CanSideDirect) - family_min(h, CanSideOverLid);
        assert!(at(h).abs() < 1e-9, "tie residual {}", at(h));
        let below = at(h * (1.0 - 1e-3));
        let above = at(h * (1.0 + 1e-3));
        assert!(
            below > 1e-6 && above < -1e-6,
            "expected a sign change: {below} / {above}"
        );
    }

    #[test]
    fn cup_partner_reference_instance() {
        let b = cup_three_path_partner(2.0, 1.5).unwrap();
        assert!((b - 2.0).abs() < 1e-12, "b = {b}");
        assert!(cup_three_path_residual(2.0, 1.5, b).abs() < 1e-12);
        let cfgv = cup_three_path_config(2.0, 1.5).unwrap();
        match cfgv {
            CriticalConfig::CupThreePath { length, .. } => {
                assert!((length - 2.5).abs() < 1e-12)
            }
            _ => panic!("wrong variant"),
        }
    }

    #[test]
    fn cup_partner_hypothesis_boundary() {
        let s = 2.0;
        let r_max = crate::roulette::max_radius_of_curvature(s);
        let min_a = s - r_max + 2.0;
        // the precondition gate accepts the boundary (the partner may still
        // land off-surface, which is a different error)
        assert!(!matches!(
            cup_three_path_partner(s, min_a + 1e-9),
            Err(CriticalError::HypothesisViolated { .. })
        ));
        assert!(matches!(
            cup_three_path_partner(s, min_a - 1e-6),
            Err(CriticalError::HypothesisViolated { .. })
        ));
        // small a: curvature bound fails before anything else
        assert!(matches!(
            cup_three_path_partner(s, 0.2),
            Err(CriticalError::HypothesisViolated { .. })
        ));
    }

    #[test]
    fn cup_partner_defining_equation_residuals() {
        let mut state = 17u64;
        let mut rnd = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 100 {
            attempts += 1;
            assert!(attempts < 20_000, "admissible instances too rare");
            let s = 1.3 + rnd() * 6.0;
            let r_max = max_radius_of_curvature(s);
            let min_a = (s - r_max + 2.0).max(0.05);
            if min_a > s {
                continue;
            }
            let a = min_a + rnd() * (s - min_a);
            if let Ok(b) = cup_three_path_partner(s, a) {
                let res = cup_three_path_residual(s, a, b);
                assert!(res.abs() < 1e-10, "s={s} a={a} b={b}: residual {res}");
                checked += 1;
            }
        }
    }

    #[test]
    fn cup_partner_three_way_tie_via_solver() {
        let (s, a) = (2.0, 1.5);
        let b = cup_three_path_partner(s, a).unwrap();
        let surface = Surface::cup(s).unwrap();
        let pa = SurfacePoint::side_cup(0.0, a);
        let pb = SurfacePoint::side_cup(PI, b);
        let rep = solve(&surface, &pa, &pb, &SolveConfig::default()).unwrap();
        assert_eq!(rep.multiplicity, Multiplicity::Finite(3));
        for p in &rep.paths {
            assert!((p.length - rep.min_length).abs() < 1e-9);
        }
    }

    #[test]
    fn tall_cup_partner_reproduces_can_corollary() {
        let s = 1e6;
        for c in [0.0, 0.25, 0.5, 1.0] {
            let a = s - c;
            let b = 2.0 * (s - a + 1.0) * (s + 1.0)
                / (2.0 * s + 2.0 - a * (1.0 + (PI / s).cos()));
            let d_cup = s - b;
            let d_can = critical_height_side_diaxial(c).unwrap() - c;
            assert!(
                (d_cup - d_can).abs() < 1e-3,
                "c={c}: cup {d_cup} vs can {d_can}"
            );
        }
    }

    #[test]
    fn rim_chord_reference_bracket() {
        // bp = 1: direct evaluation brackets the root inside (2.0, 2.5)
        let f = |theta: f64, bp: f64| theta - theta.sin() - bp * (1.0 - theta.cos());
        assert!(f(2.0, 1.0) < 0.0 && f(2.5, 1.0) > 0.0);
        match solve_rim_chord_theta(1.0).unwrap() {
            CriticalConfig::RimChord {
                theta,
                residual,
                h,
                root_ge_pi,
                ..
            } => {
                assert!((2.0..2.5).contains(&theta), "theta = {theta}");
                assert!(residual.abs() < 1e-10);
                assert!(!root_ge_pi);
                let h = h.unwrap();
                assert!((h - 2.0 * theta.sin()).abs() < 1e-12);
            }
            _ => panic!("wrong variant"),
        }
    }

    #[test]
    fn rim_chord_small_bp_continuation() {
        // the root continues smoothly to small bp; check residuals only
        for bp in [1.5, 1.0, 0.5, 0.1, 0.01] {
            match solve_rim_chord_theta(bp).unwrap() {
                CriticalConfig::RimChord {
                    theta, residual, ..
                } => {
                    assert!(theta > 1e-6);
                    assert!(residual.abs() < 1e-10, "bp={bp}: residual {residual}");
                }
                _ => panic!("wrong variant"),
            }
        }
    }

    #[test]
    fn rim_chord_rejects_trivial_zero() {
        // f(0) = 0 identically, but the solver must return a genuine root
        for bp in [0.5, 1.0, 1.5] {
            match solve_rim_chord_theta(bp).unwrap() {
                CriticalConfig::RimChord { theta, .. } => assert!(theta > 1e-3),
                _ => panic!("wrong variant"),
            }
        }
        assert!(matches!(
            solve_rim_chord_theta(0.0),
            Err(CriticalError::NoPositiveRoot)
        ));
    }
}
