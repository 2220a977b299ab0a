//! Candidate-path families: every minimal path between two points is
//! contained in a small set of piecewise-straight shapes, each with a
//! closed-form length over a parameter box `[0, theta]^dim` (the crossing
//! angles). Soundness is the load-bearing property: every member of every
//! family is a genuine surface path, so family minima upper-bound the true
//! distance, and the enumeration is guaranteed to contain a minimizer.
//!
//! All functionals use the cancellation-free law-of-cosines form so the
//! tall-cone limit (`s ~ 1e6`) keeps full precision.

use crate::flatmodel::{side_coord, GeodesicPath, PathSegment, RimCrossing};
use crate::geometry::{
    angle_gap, law_of_cosines, unit_chord, Face, Surface, SurfaceKind, SurfacePoint,
};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FamilyError {
    #[error("parameter {index} = {value} outside box [0, {hi}]")]
    ParamOutOfBox { index: usize, value: f64, hi: f64 },
    #[error("wrong parameter count: family needs {expected}, got {got}")]
    ParamCount { expected: usize, got: usize },
    #[error("point on face {0:?} does not fit this operation")]
    FaceMismatch(Face),
}

/// Which reading of the lid-to-base functional's angle convention to use.
/// Both describe the same set of paths (substitute `t -> theta - t`,
/// `u -> theta - u`), so minima agree; only the reported argmin differs.
/// `CrossingAngles` reports the actual lid / base crossing offsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LidBaseConvention {
    #[default]
    CrossingAngles,
    PaperLiteral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyId {
    HalfPlane,
    CanSideDirect,
    CanSideOverLid,
    CanSideOverBase,
    CanSideToLid,
    CanSideToLidViaBase,
    CanLidToBase,
    CupSideDirect,
    CupSideOverLid,
    CupSideToLid,
    LidChord,
    BaseChord,
    CupLidChord,
}

const BOX_EPS: f64 = 1e-12;

fn check_param(index: usize, value: f64, hi: f64) -> Result<f64, FamilyError> {
    if value < -BOX_EPS || value > hi + BOX_EPS {
        return Err(FamilyError::ParamOutOfBox { index, value, hi });
    }
    Ok(value.clamp(0.0, hi.max(0.0)))
}

// ---------------------------------------------------------------------------
// The closed-form length functionals.
// ---------------------------------------------------------------------------

/// Side-to-lid on a can: side geodesic from A (distance `a` below the lid
/// rim) to the rim at angle `t`, then the lid chord to B (distance `b`
/// from the axis, angle `theta`).
pub fn can_side_to_lid_length(a: f64, b: f64, theta: f64, t: f64) -> Result<f64, FamilyError> {
    let t = check_param(0, t, theta)?;
    Ok((a * a + t * t).sqrt() + law_of_cosines(b, 1.0, theta - t))
}

/// Side-to-lid on a cup with slant height `s`; `a` is A's distance from
/// the apex.
pub fn cup_side_to_lid_length(
    a: f64,
    b: f64,
    s: f64,
    theta: f64,
    t: f64,
) -> Result<f64, FamilyError> {
    let t = check_param(0, t, theta)?;
    Ok(law_of_cosines(a, s, t / s) + law_of_cosines(b, 1.0, theta - t))
}

/// Side-over-lid on a can: side, lid chord, side. `a`, `b` are the
/// distances from A and B to the lid rim.
pub fn can_side_over_lid_length(
    a: f64,
    b: f64,
    theta: f64,
    t: f64,
    u: f64,
) -> Result<f64, FamilyError> {
    let t = check_param(0, t, theta)?;
    let u = check_param(1, u, theta)?;
    Ok((a * a + t * t).sqrt() + (b * b + u * u).sqrt() + unit_chord(theta - t - u))
}

/// Side-over-base on a can; `a`, `b` are still the distances to the lid
/// rim, so the drops to the base rim are `h - a` and `h - b`.
pub fn can_side_over_base_length(
    a: f64,
    b: f64,
    h: f64,
    theta: f64,
    t: f64,
    u: f64,
) -> Result<f64, FamilyError> {
    can_side_over_lid_length(h - a, h - b, theta, t, u)
}

/// Side-over-lid on a cup; `a`, `b` are distances from the apex.
pub fn cup_side_over_lid_length(
    a: f64,
    b: f64,
    s: f64,
    theta: f64,
    t: f64,
    u: f64,
) -> Result<f64, FamilyError> {
    let t = check_param(0, t, theta)?;
    let u = check_param(1, u, theta)?;
    Ok(law_of_cosines(a, s, t / s)
        + law_of_cosines(b, s, u / s)
        + unit_chord(theta - t - u))
}

/// Lid-to-base on a can: lid chord from A (distance `a` from the axis) to
/// the lid rim, side geodesic, base chord to B (distance `b` from the
/// axis). Under `CrossingAngles` the lid crossing sits at angle `t` and
/// the base crossing at `theta - u`.
pub fn can_lid_to_base_length(
    a: f64,
    b: f64,
    h: f64,
    theta: f64,
    t: f64,
    u: f64,
    convention: LidBaseConvention,
) -> Result<f64, FamilyError> {
    let t = check_param(0, t, theta)?;
    let u = check_param(1, u, theta)?;
    let (t, u) = match convention {
        LidBaseConvention::CrossingAngles => (t, u),
        LidBaseConvention::PaperLiteral => (theta - t, theta - u),
    };
    Ok(law_of_cosines(a, 1.0, t)
        + (h * h + (theta - t - u) * (theta - t - u)).sqrt()
        + law_of_cosines(b, 1.0, u))
}

/// Side-to-lid via a base detour on a can: down the side to the base rim
/// at `p`, base chord to `q`, up the side to the lid rim at `r`, lid chord
/// to B. `za` is A's height above the base; `b` is B's distance from the
/// axis.
pub fn can_side_to_lid_via_base_length(
    za: f64,
    b: f64,
    h: f64,
    theta: f64,
    p: f64,
    q: f64,
    r: f64,
) -> Result<f64, FamilyError> {
    let p = check_param(0, p, theta)?;
    let q = check_param(1, q, theta)?;
    let r = check_param(2, r, theta)?;
    Ok((za * za + p * p).sqrt()
        + unit_chord(q - p)
        + (h * h + (r - q) * (r - q)).sqrt()
        + law_of_cosines(b, 1.0, theta - r))
}

/// Direct on-side geodesic between two side (or rim) points: the unrolled
/// straight chord. On a can this is `sqrt(dz^2 + theta^2)`; on a cup the
/// sector chord subtending plane angle `theta / s`.
pub fn direct_side_length(
    a: &SurfacePoint,
    b: &SurfacePoint,
    surface: &Surface,
) -> Result<f64, FamilyError> {
    for p in [a, b] {
        if !matches!(p.face, Face::Side | Face::Rim1 | Face::Rim2) {
            return Err(FamilyError::FaceMismatch(p.face));
        }
    }
    let theta = angle_gap(a, b).theta;
    match surface.kind() {
        SurfaceKind::Can => {
            let dz = side_coord(a, surface) - side_coord(b, surface);
            Ok((dz * dz + theta * theta).sqrt())
        }
        SurfaceKind::Cup => Ok(law_of_cosines(
            side_coord(a, surface),
            side_coord(b, surface),
            theta / surface.slant(),
        )),
    }
}

// ---------------------------------------------------------------------------
// Families bound to a normalized instance.
// ---------------------------------------------------------------------------

/// A candidate family bound to a normalized endpoint pair: A at angle 0,
/// B at angle `theta` in `[0, pi]`, both canonical. The parameter box is
/// `[0, theta]^dim()`.
#[derive(Debug, Clone)]
pub struct CandidateFamily {
    pub id: FamilyId,
    pub surface: Surface,
    pub a: SurfacePoint,
    pub b: SurfacePoint,
    pub theta: f64,
    pub convention: LidBaseConvention,
}

impl CandidateFamily {
    pub fn dim(&self) -> usize {
        match self.id {
            FamilyId::HalfPlane
            | FamilyId::CanSideDirect
            | FamilyId::CupSideDirect
            | FamilyId::LidChord
            | FamilyId::BaseChord
            | FamilyId::CupLidChord => 0,
            FamilyId::CanSideToLid | FamilyId::CupSideToLid => 1,
            FamilyId::CanSideOverLid
            | FamilyId::CanSideOverBase
            | FamilyId::CupSideOverLid
            | FamilyId::CanLidToBase => 2,
            FamilyId::CanSideToLidViaBase => 3,
        }
    }

    fn check_arity(&self, params: &[f64]) -> Result<(), FamilyError> {
        if params.len() != self.dim() {
            return Err(FamilyError::ParamCount {
                expected: self.dim(),
                got: params.len(),
            });
        }
        Ok(())
    }

    /// Distance from a side/rim point up to the lid rim (can only).
    fn to_rim1(&self, p: &SurfacePoint) -> f64 {
        self.surface.height() - side_coord(p, &self.surface)
    }

    pub fn length(&self, params: &[f64]) -> Result<f64, FamilyError> {
        self.check_arity(params)?;
        let th = self.theta;
        let sf = &self.surface;
        match self.id {
            FamilyId::HalfPlane => Ok(half_plane_path(sf, &self.a, &self.b).total_length),
            FamilyId::CanSideDirect | FamilyId::CupSideDirect => {
                direct_side_length(&self.a, &self.b, sf)
            }
            FamilyId::LidChord | FamilyId::BaseChord | FamilyId::CupLidChord => Ok(
                law_of_cosines(disk_r(&self.a), disk_r(&self.b), th),
            ),
            FamilyId::CanSideToLid => {
                can_side_to_lid_length(self.to_rim1(&self.a), disk_r(&self.b), th, params[0])
            }
            FamilyId::CupSideToLid => cup_side_to_lid_length(
                side_coord(&self.a, sf),
                disk_r(&self.b),
                sf.slant(),
                th,
                params[0],
            ),
            FamilyId::CanSideOverLid => can_side_over_lid_length(
                self.to_rim1(&self.a),
                self.to_rim1(&self.b),
                th,
                params[0],
                params[1],
            ),
            FamilyId::CanSideOverBase => can_side_over_base_length(
                self.to_rim1(&self.a),
                self.to_rim1(&self.b),
                sf.height(),
                th,
                params[0],
                params[1],
            ),
            FamilyId::CupSideOverLid => cup_side_over_lid_length(
                side_coord(&self.a, sf),
                side_coord(&self.b, sf),
                sf.slant(),
                th,
                params[0],
                params[1],
            ),
            FamilyId::CanLidToBase => can_lid_to_base_length(
                disk_r(&self.a),
                disk_r(&self.b),
                sf.height(),
                th,
                params[0],
                params[1],
                self.convention,
            ),
            FamilyId::CanSideToLidViaBase => can_side_to_lid_via_base_length(
                side_coord(&self.a, sf),
                disk_r(&self.b),
                sf.height(),
                th,
                params[0],
                params[1],
                params[2],
            ),
        }
    }

    /// Analytic gradient of `length` where it is differentiable. Returns
    /// `None` for 0-dimensional families and within 1e-12 of the chord
    /// kinks (`t + u = theta`, `p = q`), where the one-sided derivatives
    /// disagree. Used by the solver to polish minima beyond the resolution
    /// of value-only search.
    pub fn gradient(&self, params: &[f64]) -> Option<Vec<f64>> {
        self.check_arity(params).ok()?;
        let th = self.theta;
        let sf = &self.surface;
        // d/dpsi of law_of_cosines(x, y, psi)
        let dlc = |x: f64, y: f64, psi: f64| -> Option<f64> {
            let l = law_of_cosines(x, y, psi);
            if l < 1e-12 {
                return None;
            }
            Some(x * y * psi.sin() / l)
        };
        // d/dw of the unit chord 2*|sin(w/2)|
        let dchord = |w: f64| -> Option<f64> {
            if w.abs() < 1e-12 {
                return None;
            }
            Some(w.signum() * (0.5 * w).cos())
        };
        let hyp_d = |leg: f64, w: f64| w / (leg * leg + w * w).sqrt();
        match self.id {
            FamilyId::CanSideToLid => {
                let (a, b) = (self.to_rim1(&self.a), disk_r(&self.b));
                let t = params[0];
                Some(vec![hyp_d(a, t) - dlc(b, 1.0, th - t)?])
            }
            FamilyId::CupSideToLid => {
                let (a, b, s) = (side_coord(&self.a, sf), disk_r(&self.b), sf.slant());
                let t = params[0];
                let l1 = law_of_cosines(a, s, t / s);
                if l1 < 1e-12 {
                    return None;
                }
                Some(vec![a * (t / s).sin() / l1 - dlc(b, 1.0, th - t)?])
            }
            FamilyId::CanSideOverLid | FamilyId::CanSideOverBase => {
                let (mut a, mut b) = (self.to_rim1(&self.a), self.to_rim1(&self.b));
                if self.id == FamilyId::CanSideOverBase {
                    a = sf.height() - a;
                    b = sf.height() - b;
                }
                let (t, u) = (params[0], params[1]);
                let c = dchord(th - t - u)?;
                Some(vec![hyp_d(a, t) - c, hyp_d(b, u) - c])
            }
            FamilyId::CupSideOverLid => {
                let (a, b, s) = (
                    side_coord(&self.a, sf),
                    side_coord(&self.b, sf),
                    sf.slant(),
                );
                let (t, u) = (params[0], params[1]);
                let (l1, l2) = (law_of_cosines(a, s, t / s), law_of_cosines(b, s, u / s));
                if l1 < 1e-12 || l2 < 1e-12 {
                    return None;
                }
                let c = dchord(th - t - u)?;
                Some(vec![
                    a * (t / s).sin() / l1 - c,
                    b * (u / s).sin() / l2 - c,
                ])
            }
            FamilyId::CanLidToBase => {
                let (a, b, h) = (disk_r(&self.a), disk_r(&self.b), sf.height());
                let (t, u) = match self.convention {
                    LidBaseConvention::CrossingAngles => (params[0], params[1]),
                    LidBaseConvention::PaperLiteral => (th - params[0], th - params[1]),
                };
                let w = th - t - u;
                let g_t = dlc(a, 1.0, t)? - hyp_d(h, w);
                let g_u = dlc(b, 1.0, u)? - hyp_d(h, w);
                Some(match self.convention {
                    LidBaseConvention::CrossingAngles => vec![g_t, g_u],
                    LidBaseConvention::PaperLiteral => vec![-g_t, -g_u],
                })
            }
            FamilyId::CanSideToLidViaBase => {
                let (za, b, h) = (
                    side_coord(&self.a, sf),
                    disk_r(&self.b),
                    sf.height(),
                );
                let (p, q, r) = (params[0], params[1], params[2]);
                let c = dchord(q - p)?;
                let climb = hyp_d(h, r - q);
                Some(vec![
                    hyp_d(za, p) - c,
                    c - climb,
                    climb - dlc(b, 1.0, th - r)?,
                ])
            }
            _ => None,
        }
    }

    /// Reconstruct the geometric path at the given parameters. The result's
    /// `total_length` matches `length(params)` to within 1e-12 and its
    /// endpoints are `a` and `b`.
    pub fn rebuild(&self, params: &[f64]) -> Result<GeodesicPath, FamilyError> {
        self.check_arity(params)?;
        let th = self.theta;
        let sf = &self.surface;
        let a = self.a;
        let b = self.b;
        let clamp = |i: usize, v: f64| check_param(i, v, th);
        let chain = |pieces: Vec<(Face, SurfacePoint, SurfacePoint, f64)>,
                     crossings: Vec<RimCrossing>|
         -> GeodesicPath { assemble(sf, pieces, crossings) };
        let path = match self.id {
            FamilyId::HalfPlane => half_plane_path(sf, &a, &b),
            FamilyId::CanSideDirect | FamilyId::CupSideDirect => chain(
                vec![(Face::Side, a, b, th)],
                vec![],
            ),
            FamilyId::LidChord | FamilyId::CupLidChord => {
                chain(vec![(Face::Lid, a, b, th)], vec![])
            }
            FamilyId::BaseChord => chain(vec![(Face::Base, a, b, th)], vec![]),
            FamilyId::CanSideToLid | FamilyId::CupSideToLid => {
                let t = clamp(0, params[0])?;
                let p1 = SurfacePoint::rim1(t);
                chain(
                    vec![
                        (Face::Side, a, p1, t),
                        (Face::Lid, p1, b, th - t),
                    ],
                    vec![RimCrossing {
                        rim: Face::Rim1,
                        angle: t,
                    }],
                )
            }
            FamilyId::CanSideOverLid | FamilyId::CupSideOverLid => {
                let t = clamp(0, params[0])?;
                let u = clamp(1, params[1])?;
                let p1 = SurfacePoint::rim1(t);
                let p2 = SurfacePoint::rim1(th - u);
                chain(
                    vec![
                        (Face::Side, a, p1, t),
                        (Face::Lid, p1, p2, th - u - t),
                        (Face::Side, p2, b, u),
                    ],
                    vec![
                        RimCrossing {
                            rim: Face::Rim1,
                            angle: t,
                        },
                        RimCrossing {
                            rim: Face::Rim1,
                            angle: th - u,
                        },
                    ],
                )
            }
            FamilyId::CanSideOverBase => {
                let t = clamp(0, params[0])?;
                let u = clamp(1, params[1])?;
                let p1 = SurfacePoint::rim2(t);
                let p2 = SurfacePoint::rim2(th - u);
                chain(
                    vec![
                        (Face::Side, a, p1, t),
                        (Face::Base, p1, p2, th - u - t),
                        (Face::Side, p2, b, u),
                    ],
                    vec![
                        RimCrossing {
                            rim: Face::Rim2,
                            angle: t,
                        },
                        RimCrossing {
                            rim: Face::Rim2,
                            angle: th - u,
                        },
                    ],
                )
            }
            FamilyId::CanLidToBase => {
                let (mut t, mut u) = (clamp(0, params[0])?, clamp(1, params[1])?);
                if self.convention == LidBaseConvention::PaperLiteral {
                    t = th - t;
                    u = th - u;
                }
                let p1 = SurfacePoint::rim1(t);
                let p2 = SurfacePoint::rim2(th - u);
                chain(
                    vec![
                        (Face::Lid, a, p1, t),
                        (Face::Side, p1, p2, th - u - t),
                        (Face::Base, p2, b, u),
                    ],
                    vec![
                        RimCrossing {
                            rim: Face::Rim1,
                            angle: t,
                        },
                        RimCrossing {
                            rim: Face::Rim2,
                            angle: th - u,
                        },
                    ],
                )
            }
            FamilyId::CanSideToLidViaBase => {
                let p = clamp(0, params[0])?;
                let q = clamp(1, params[1])?;
                let r = clamp(2, params[2])?;
                let q1 = SurfacePoint::rim2(p);
                let q2 = SurfacePoint::rim2(q);
                let p1 = SurfacePoint::rim1(r);
                chain(
                    vec![
                        (Face::Side, a, q1, p),
                        (Face::Base, q1, q2, q - p),
                        (Face::Side, q2, p1, r - q),
                        (Face::Lid, p1, b, th - r),
                    ],
                    vec![
                        RimCrossing {
                            rim: Face::Rim2,
                            angle: p,
                        },
                        RimCrossing {
                            rim: Face::Rim2,
                            angle: q,
                        },
                        RimCrossing {
                            rim: Face::Rim1,
                            angle: r,
                        },
                    ],
                )
            }
        };
        Ok(path)
    }
}

fn disk_r(p: &SurfacePoint) -> f64 {
    crate::flatmodel::disk_radius(p)
}

/// Assemble a path, dropping zero-length pieces (and the crossings they
/// collapse) so degenerate boundary parameters produce clean geometry.
fn assemble(
    surface: &Surface,
    pieces: Vec<(Face, SurfacePoint, SurfacePoint, f64)>,
    crossings: Vec<RimCrossing>,
) -> GeodesicPath {
    let mut segs: Vec<PathSegment> = Vec::new();
    let mut kept_crossings: Vec<RimCrossing> = Vec::new();
    for (i, (face, start, end, sweep)) in pieces.iter().enumerate() {
        let seg = PathSegment::new(*face, *start, *end, *sweep);
        if seg.length(surface) < 1e-13 && pieces.len() > 1 {
            continue;
        }
        if !segs.is_empty() {
            kept_crossings.push(crossings[i - 1]);
        }
        segs.push(seg);
    }
    if segs.is_empty() {
        // fully degenerate chain; keep the least degenerate piece
        let (face, start, end, sweep) = pieces[0];
        segs.push(PathSegment::new(face, start, end, sweep));
    }
    GeodesicPath::new(surface, segs, kept_crossings)
}

/// The unique in-half-plane path between two canonical points that share a
/// half-plane (or involve axial points): the shortest arc along the
/// profile curve lid-radius / side / base-radius.
pub fn half_plane_path(surface: &Surface, a: &SurfacePoint, b: &SurfacePoint) -> GeodesicPath {
    // the common angle of the half-plane: prefer a non-axial endpoint
    let ang = if !a.is_axial() { a.angle } else { b.angle };
    // profile coordinate: arc position along lid-center .. rim1 .. rim2/apex
    // .. base-center, chosen so consecutive faces share rim points
    match surface.kind() {
        SurfaceKind::Can => {
            let h = surface.height();
            // positions along the profile: 0 at lid center, 1 at rim1,
            // 1 + h at rim2, 2 + h at base center
            let pos = |p: &SurfacePoint| -> f64 {
                match p.face {
                    Face::LidCenter => 0.0,
                    Face::Lid => 1.0 - p.radial,
                    Face::Rim1 => 1.0,
                    Face::Side => 1.0 + (h - p.height_or_slant),
                    Face::Rim2 => 1.0 + h,
                    Face::Base => 1.0 + h + (1.0 - p.radial),
                    Face::BaseCenter => 2.0 + h,
                    Face::Apex => unreachable!("apex on a can"),
                }
            };
            build_profile_path(surface, a, b, ang, pos(a), pos(b), 1.0, 1.0 + h)
        }
        SurfaceKind::Cup => {
            let s = surface.slant();
            // 0 at lid center, 1 at rim, 1 + s at apex
            let pos = |p: &SurfacePoint| -> f64 {
                match p.face {
                    Face::LidCenter => 0.0,
                    Face::Lid => 1.0 - p.radial,
                    Face::Rim1 => 1.0,
                    Face::Side => 1.0 + (s - p.height_or_slant),
                    Face::Apex => 1.0 + s,
                    _ => unreachable!("no such face on a cup"),
                }
            };
            build_profile_path(surface, a, b, ang, pos(a), pos(b), 1.0, 1.0 + s)
        }
    }
}

/// Cut the profile arc between positions `pa < pb` at the rim positions it
/// passes and emit one segment per face stretch.
fn build_profile_path(
    surface: &Surface,
    a: &SurfacePoint,
    b: &SurfacePoint,
    ang: f64,
    pa: f64,
    pb: f64,
    rim1_pos: f64,
    rim2_pos: f64,
) -> GeodesicPath {
    let reversed = pa > pb;
    let (lo, hi, first, last) = if reversed {
        (pb, pa, *b, *a)
    } else {
        (pa, pb, *a, *b)
    };
    // breakpoints strictly inside (lo, hi)
    let mut cut_positions: Vec<(f64, Face)> = Vec::new();
    for (pos, rim) in [(rim1_pos, Face::Rim1), (rim2_pos, Face::Rim2)] {
        if pos > lo + 1e-13 && pos < hi - 1e-13 {
            cut_positions.push((pos, rim));
        }
    }
    // face of the stretch between two profile positions
    let face_between = |x: f64, y: f64| -> Face {
        let mid = 0.5 * (x + y);
        if mid < rim1_pos {
            Face::Lid
        } else if mid < rim2_pos {
            Face::Side
        } else {
            Face::Base
        }
    };
    let cutpoint = |rim: Face| -> SurfacePoint {
        match rim {
            Face::Rim1 => SurfacePoint::rim1(ang),
            _ => SurfacePoint::rim2(ang),
        }
    };
    let mut pts: Vec<(f64, SurfacePoint)> = vec![(lo, first)];
    for (pos, rim) in &cut_positions {
        pts.push((*pos, cutpoint(*rim)));
    }
    pts.push((hi, last));
    let mut pieces = Vec::new();
    let mut crossings = Vec::new();
    for w in pts.windows(2) {
        let (x, p) = w[0];
        let (y, q) = w[1];
        pieces.push((face_between(x, y), p, q, 0.0));
    }
    for (_, rim) in &cut_positions {
        crossings.push(RimCrossing {
            rim: if surface.kind() == SurfaceKind::Cup {
                Face::Rim1
            } else {
                *rim
            },
            angle: ang,
        });
    }
    let path = assemble(surface, pieces, crossings);
    if reversed {
        path.reversed(surface)
    } else {
        path
    }
}

/// Enumerate the applicable families for a normalized canonical pair
/// (A at angle 0, B at angle `theta`, neither axial, `0 < theta <= pi`).
/// Rim endpoints must already be folded onto the side (`Rim1 -> z = h` /
/// `slant = s`, `Rim2 -> z = 0`) except for disk-vs-disk pairs.
pub fn enumerate_families(
    surface: &Surface,
    a: &SurfacePoint,
    b: &SurfacePoint,
    theta: f64,
    convention: LidBaseConvention,
) -> Vec<CandidateFamily> {
    let mk = |id: FamilyId, a: SurfacePoint, b: SurfacePoint| CandidateFamily {
        id,
        surface: *surface,
        a,
        b,
        theta,
        convention,
    };
    let ids: Vec<FamilyId> = match (surface.kind(), a.face, b.face) {
        (SurfaceKind::Can, Face::Side, Face::Side) => vec![
            FamilyId::CanSideDirect,
            FamilyId::CanSideOverLid,
            FamilyId::CanSideOverBase,
        ],
        (SurfaceKind::Can, Face::Side, Face::Lid) => vec![
            FamilyId::CanSideToLid,
            FamilyId::CanSideToLidViaBase,
        ],
        (SurfaceKind::Can, Face::Lid, Face::Base) => vec![FamilyId::CanLidToBase],
        (SurfaceKind::Can, Face::Lid, Face::Lid) => vec![FamilyId::LidChord],
        (SurfaceKind::Can, Face::Base, Face::Base) => vec![FamilyId::BaseChord],
        (SurfaceKind::Cup, Face::Side, Face::Side) => vec![
            FamilyId::CupSideDirect,
            FamilyId::CupSideOverLid,
        ],
        (SurfaceKind::Cup, Face::Side, Face::Lid) => vec![FamilyId::CupSideToLid],
        (SurfaceKind::Cup, Face::Lid, Face::Lid) => vec![FamilyId::CupLidChord],
        (k, fa, fb) => panic!("unnormalized face pair {fa:?}/{fb:?} on {k:?}"),
    };
    ids.into_iter().map(|id| mk(id, *a, *b)).collect()
}
