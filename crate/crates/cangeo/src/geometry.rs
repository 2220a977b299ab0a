//! Surfaces, surface points, canonical face tags, and the angular
//! normalization used by every candidate family.
//!
//! Lengths are in rim-radius units throughout: the rims are unit circles,
//! a can has height `h > 0`, a cup has slant height `s > 1` (cone angle
//! `phi` with `sin phi = 1/s`). The cup is oriented lid-down: rim and lid
//! at `z = 0`, apex at `z = sqrt(s^2 - 1)`.

use serde::Serialize;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("coordinate out of range: {0}")]
    OutOfRange(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("face {0:?} does not exist on this surface")]
    FaceMismatch(Face),
    #[error("cannot parse {what} spec `{input}`: {reason}")]
    Parse {
        what: &'static str,
        input: String,
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Can,
    Cup,
}

/// A soup can (`Can`, height `h`) or conical cup (`Cup`, slant height `s`),
/// always with unit rim radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Surface {
    kind: SurfaceKind,
    /// `h` for a can, `s` for a cup.
    size: f64,
}

impl Surface {
    pub fn can(h: f64) -> Result<Self, GeometryError> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(GeometryError::InvalidSurface(format!(
                "can height must be positive and finite, got {h}"
            )));
        }
        Ok(Surface {
            kind: SurfaceKind::Can,
            size: h,
        })
    }

    pub fn cup(s: f64) -> Result<Self, GeometryError> {
        if !(s > 1.0) || !s.is_finite() {
            return Err(GeometryError::InvalidSurface(format!(
                "cup slant height must exceed the rim radius 1, got {s}"
            )));
        }
        Ok(Surface {
            kind: SurfaceKind::Cup,
            size: s,
        })
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    /// Can height `h`. Panics on a cup.
    pub fn height(&self) -> f64 {
        assert_eq!(self.kind, SurfaceKind::Can, "height() is a can quantity");
        self.size
    }

    /// Cup slant height `s`. Panics on a can.
    pub fn slant(&self) -> f64 {
        assert_eq!(self.kind, SurfaceKind::Cup, "slant() is a cup quantity");
        self.size
    }

    /// `h` for a can, `s` for a cup, whichever the surface carries.
    pub fn size(&self) -> f64 {
        self.size
    }

    /// Vertical extent: `h` for a can, `sqrt(s^2 - 1)` for a cup.
    pub fn axis_height(&self) -> f64 {
        match self.kind {
            SurfaceKind::Can => self.size,
            SurfaceKind::Cup => (self.size * self.size - 1.0).sqrt(),
        }
    }

    /// Maximum extent of the side coordinate: `h` (can z) or `s` (cup slant).
    pub fn side_span(&self) -> f64 {
        self.size
    }
}

/// Canonical face tags. `Rim1` is the lid rim of a can and the single rim
/// of a cup; `Rim2`, `Base` and `BaseCenter` exist only on a can, `Apex`
/// only on a cup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Face {
    Side,
    Lid,
    Base,
    Rim1,
    Rim2,
    Apex,
    LidCenter,
    BaseCenter,
}

impl Face {
    pub fn is_axial(self) -> bool {
        matches!(self, Face::Apex | Face::LidCenter | Face::BaseCenter)
    }

    pub fn is_rim(self) -> bool {
        matches!(self, Face::Rim1 | Face::Rim2)
    }

    /// Input/output label; the cup's rim is spelled plain `rim`.
    pub fn label(self, kind: SurfaceKind) -> &'static str {
        match (self, kind) {
            (Face::Side, _) => "side",
            (Face::Lid, _) => "lid",
            (Face::Base, _) => "base",
            (Face::Rim1, SurfaceKind::Can) => "rim1",
            (Face::Rim1, SurfaceKind::Cup) => "rim",
            (Face::Rim2, _) => "rim2",
            (Face::Apex, _) => "apex",
            (Face::LidCenter, _) => "lidcenter",
            (Face::BaseCenter, _) => "basecenter",
        }
    }
}

/// A point on a surface: a face tag plus the coordinates that face uses.
/// Unused coordinates are normalized to zero, so equal points compare equal.
///
/// * `angle` — cylindrical angle in `[0, 2*pi)`, zero for axial points;
/// * `radial` — distance from the axis, for lid/base points only;
/// * `height_or_slant` — `z` on a can side, slant distance from the apex
///   on a cup side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfacePoint {
    pub face: Face,
    pub angle: f64,
    pub radial: f64,
    pub height_or_slant: f64,
}

pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    // rem_euclid can return TAU when a is a tiny negative number
    if r >= TAU {
        r - TAU
    } else {
        r
    }
}

impl SurfacePoint {
    pub fn side_can(angle: f64, z: f64) -> Self {
        SurfacePoint {
            face: Face::Side,
            angle: normalize_angle(angle),
            radial: 0.0,
            height_or_slant: z,
        }
    }

    pub fn side_cup(angle: f64, slant: f64) -> Self {
        SurfacePoint {
            face: Face::Side,
            angle: normalize_angle(angle),
            radial: 0.0,
            height_or_slant: slant,
        }
    }

    pub fn lid(angle: f64, radial: f64) -> Self {
        SurfacePoint {
            face: Face::Lid,
            angle: normalize_angle(angle),
            radial,
            height_or_slant: 0.0,
        }
    }

    pub fn base(angle: f64, radial: f64) -> Self {
        SurfacePoint {
            face: Face::Base,
            angle: normalize_angle(angle),
            radial,
            height_or_slant: 0.0,
        }
    }

    pub fn rim1(angle: f64) -> Self {
        SurfacePoint {
            face: Face::Rim1,
            angle: normalize_angle(angle),
            radial: 1.0,
            height_or_slant: 0.0,
        }
    }

    pub fn rim2(angle: f64) -> Self {
        SurfacePoint {
            face: Face::Rim2,
            angle: normalize_angle(angle),
            radial: 1.0,
            height_or_slant: 0.0,
        }
    }

    pub fn apex() -> Self {
        SurfacePoint {
            face: Face::Apex,
            angle: 0.0,
            radial: 0.0,
            height_or_slant: 0.0,
        }
    }

    pub fn lid_center() -> Self {
        SurfacePoint {
            face: Face::LidCenter,
            angle: 0.0,
            radial: 0.0,
            height_or_slant: 0.0,
        }
    }

    pub fn base_center() -> Self {
        SurfacePoint {
            face: Face::BaseCenter,
            angle: 0.0,
            radial: 0.0,
            height_or_slant: 0.0,
        }
    }

    pub fn is_axial(&self) -> bool {
        self.face.is_axial()
    }

    pub fn rotated(&self, delta: f64) -> Self {
        let mut p = *self;
        if !p.is_axial() {
            p.angle = normalize_angle(p.angle + delta);
        }
        p
    }

    pub fn mirrored(&self) -> Self {
        let mut p = *self;
        if !p.is_axial() {
            p.angle = normalize_angle(-p.angle);
        }
        p
    }
}

/// Snap tolerance for boundary coordinates (a lid point with radial within
/// this of 1 counts as a rim point, etc.).
const CANON_EPS: f64 = 1e-12;

/// Canonicalize a point's face tag and validate its coordinates against
/// the surface. Lid/base points on the boundary circle become rim points,
/// side points at the extreme coordinate become rim points, disk centers
/// become their axial tags, and a cup side point at slant `s` becomes the
/// rim. A cup side point at slant 0 is rejected: the apex has its own tag.
pub fn classify(point: &SurfacePoint, surface: &Surface) -> Result<SurfacePoint, GeometryError> {
    let kind = surface.kind();
    let check = |ok: bool, msg: String| {
        if ok {
            Ok(())
        } else {
            Err(GeometryError::OutOfRange(msg))
        }
    };
    match (point.face, kind) {
        (Face::Side, SurfaceKind::Can) => {
            let z = point.height_or_slant;
            let h = surface.height();
            check(
                z.is_finite() && (-CANON_EPS..=h + CANON_EPS).contains(&z),
                format!("can side z={z} outside [0, {h}]"),
            )?;
            if (z - h).abs() <= CANON_EPS {
                Ok(SurfacePoint::rim1(point.angle))
            } else if z.abs() <= CANON_EPS {
                Ok(SurfacePoint::rim2(point.angle))
            } else {
                Ok(SurfacePoint::side_can(point.angle, z))
            }
        }
        (Face::Side, SurfaceKind::Cup) => {
            let sl = point.height_or_slant;
            let s = surface.slant();
            check(
                sl.is_finite() && sl > CANON_EPS && sl <= s + CANON_EPS,
                format!("cup side slant={sl} outside (0, {s}] (the apex has its own tag)"),
            )?;
            if (sl - s).abs() <= CANON_EPS {
                Ok(SurfacePoint::rim1(point.angle))
            } else {
                Ok(SurfacePoint::side_cup(point.angle, sl))
            }
        }
        (Face::Lid, _) => {
            let r = point.radial;
            check(
                r.is_finite() && (-CANON_EPS..=1.0 + CANON_EPS).contains(&r),
                format!("lid radial={r} outside [0, 1]"),
            )?;
            if (r - 1.0).abs() <= CANON_EPS {
                Ok(SurfacePoint::rim1(point.angle))
            } else if r.abs() <= CANON_EPS {
                Ok(SurfacePoint::lid_center())
            } else {
                Ok(SurfacePoint::lid(point.angle, r))
            }
        }
        (Face::Base, SurfaceKind::Can) => {
            let r = point.radial;
            check(
                r.is_finite() && (-CANON_EPS..=1.0 + CANON_EPS).contains(&r),
                format!("base radial={r} outside [0, 1]"),
            )?;
            if (r - 1.0).abs() <= CANON_EPS {
                Ok(SurfacePoint::rim2(point.angle))
            } else if r.abs() <= CANON_EPS {
                Ok(SurfacePoint::base_center())
            } else {
                Ok(SurfacePoint::base(point.angle, r))
            }
        }
        (Face::Rim1, _) => Ok(SurfacePoint::rim1(point.angle)),
        (Face::Rim2, SurfaceKind::Can) => Ok(SurfacePoint::rim2(point.angle)),
        (Face::Apex, SurfaceKind::Cup) => Ok(SurfacePoint::apex()),
        (Face::LidCenter, _) => Ok(SurfacePoint::lid_center()),
        (Face::BaseCenter, SurfaceKind::Can) => Ok(SurfacePoint::base_center()),
        (face, _) => Err(GeometryError::FaceMismatch(face)),
    }
}

/// Subtended angle between the half-planes of two points, folded into
/// `[0, pi]`. `mirror_flag` records whether B had to be reflected across
/// A's half-plane to land in `[0, pi]`; axial points contribute angle 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleGap {
    pub theta: f64,
    pub mirror_flag: bool,
}

pub fn angle_gap(a: &SurfacePoint, b: &SurfacePoint) -> AngleGap {
    let d = normalize_angle(b.angle - a.angle);
    if d <= PI {
        AngleGap {
            theta: d,
            mirror_flag: false,
        }
    } else {
        AngleGap {
            theta: TAU - d,
            mirror_flag: true,
        }
    }
}

/// Embed a canonical point on the surface of revolution.
pub fn embed3d(point: &SurfacePoint, surface: &Surface) -> [f64; 3] {
    let (c, sn) = (point.angle.cos(), point.angle.sin());
    match (point.face, surface.kind()) {
        (Face::Side, SurfaceKind::Can) => [c, sn, point.height_or_slant],
        (Face::Side, SurfaceKind::Cup) => {
            let s = surface.slant();
            let r = point.height_or_slant / s;
            let z = surface.axis_height() * (1.0 - point.height_or_slant / s);
            [r * c, r * sn, z]
        }
        (Face::Lid, SurfaceKind::Can) => [point.radial * c, point.radial * sn, surface.height()],
        (Face::Lid, SurfaceKind::Cup) => [point.radial * c, point.radial * sn, 0.0],
        (Face::Base, _) => [point.radial * c, point.radial * sn, 0.0],
        (Face::Rim1, SurfaceKind::Can) => [c, sn, surface.height()],
        (Face::Rim1, SurfaceKind::Cup) => [c, sn, 0.0],
        (Face::Rim2, _) => [c, sn, 0.0],
        (Face::Apex, _) => [0.0, 0.0, surface.axis_height()],
        (Face::LidCenter, SurfaceKind::Can) => [0.0, 0.0, surface.height()],
        (Face::LidCenter, SurfaceKind::Cup) => [0.0, 0.0, 0.0],
        (Face::BaseCenter, _) => [0.0, 0.0, 0.0],
    }
}

pub fn dist3(p: &[f64; 3], q: &[f64; 3]) -> f64 {
    let dx = p[0] - q[0];
    let dy = p[1] - q[1];
    let dz = p[2] - q[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

/// Law of cosines `sqrt(x^2 + y^2 - 2*x*y*cos(phi))` in the
/// cancellation-free form `sqrt((x-y)^2 + 4*x*y*sin^2(phi/2))`, which
/// stays accurate when `phi` is tiny and `x, y` are huge (the tall-cone
/// limit drives `phi ~ 1e-6` with `x ~ 1e6`).
pub fn law_of_cosines(x: f64, y: f64, phi: f64) -> f64 {
    let d = x - y;
    let s = (0.5 * phi).sin();
    (d * d + 4.0 * x * y * s * s).sqrt()
}

/// Chord of the unit circle subtending `phi`.
pub fn unit_chord(phi: f64) -> f64 {
    2.0 * (0.5 * phi).sin().abs()
}

// ---------------------------------------------------------------------------
// Spec parsing shared by the CLI and the Python bindings.
// ---------------------------------------------------------------------------

/// Parse `can:h=<f>` or `cup:s=<f>`.
pub fn parse_surface_spec(input: &str) -> Result<Surface, GeometryError> {
    let err = |reason: String| GeometryError::Parse {
        what: "surface",
        input: input.to_string(),
        reason,
    };
    let (kind, rest) = input
        .split_once(':')
        .ok_or_else(|| err("expected `can:h=<f>` or `cup:s=<f>`".into()))?;
    let (key, val) = rest
        .split_once('=')
        .ok_or_else(|| err("expected `<key>=<value>` after `:`".into()))?;
    let value: f64 = val
        .parse()
        .map_err(|e| err(format!("bad number `{val}`: {e}")))?;
    match (kind, key) {
        ("can", "h") => Surface::can(value),
        ("cup", "s") => Surface::cup(value),
        _ => Err(err(format!("unknown surface `{kind}:{key}=`"))),
    }
}

/// Parse a point spec against a surface. Grammar:
///
/// ```text
/// side:angle=<rad>,z=<len>       (can)
/// side:angle=<rad>,slant=<len>   (cup)
/// lid:angle=<rad>,r=<len>
/// base:angle=<rad>,r=<len>       (can)
/// rim1:angle=<rad>  rim2:angle=<rad>   (can)
/// rim:angle=<rad>                      (cup)
/// apex  lidcenter  basecenter
/// ```
///
/// With `degrees` set, angle values are converted from degrees.
pub fn parse_point_spec(
    input: &str,
    surface: &Surface,
    degrees: bool,
) -> Result<SurfacePoint, GeometryError> {
    let err = |reason: String| GeometryError::Parse {
        what: "point",
        input: input.to_string(),
        reason,
    };
    let (face, args) = match input.split_once(':') {
        Some((f, a)) => (f, a),
        None => (input, ""),
    };
    let mut angle = None;
    let mut z = None;
    let mut slant = None;
    let mut r = None;
    if !args.is_empty() {
        for kv in args.split(',') {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| err(format!("expected key=value, got `{kv}`")))?;
            let value: f64 = v
                .parse()
                .map_err(|e| err(format!("bad number `{v}`: {e}")))?;
            match k {
                "angle" => angle = Some(if degrees { value.to_radians() } else { value }),
                "z" => z = Some(value),
                "slant" => slant = Some(value),
                "r" => r = Some(value),
                _ => return Err(err(format!("unknown key `{k}`"))),
            }
        }
    }
    let need_angle = || angle.ok_or_else(|| err("missing angle=".into()));
    let raw = match (face, surface.kind()) {
        ("side", SurfaceKind::Can) => SurfacePoint::side_can(
            need_angle()?,
            z.ok_or_else(|| err("can side needs z=".into()))?,
        ),
        ("side", SurfaceKind::Cup) => SurfacePoint::side_cup(
            need_angle()?,
            slant.ok_or_else(|| err("cup side needs slant=".into()))?,
        ),
        ("lid", _) => SurfacePoint::lid(need_angle()?, r.ok_or_else(|| err("lid needs r=".into()))?),
        ("base", _) => SurfacePoint::base(
            need_angle()?,
            r.ok_or_else(|| err("base needs r=".into()))?,
        ),
        ("rim1", _) => SurfacePoint::rim1(need_angle()?),
        ("rim2", _) => SurfacePoint::rim2(need_angle()?),
        ("rim", SurfaceKind::Cup) => SurfacePoint::rim1(need_angle()?),
        ("rim", SurfaceKind::Can) => {
            return Err(err("a can has two rims: use rim1: or rim2:".into()))
        }
        ("apex", _) => SurfacePoint::apex(),
        ("lidcenter", _) => SurfacePoint::lid_center(),
        ("basecenter", _) => SurfacePoint::base_center(),
        _ => return Err(err(format!("unknown face `{face}`"))),
    };
    classify(&raw, surface)
}
