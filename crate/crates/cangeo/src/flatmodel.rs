//! Planar layouts of the faces ("flat models"), piecewise-straight paths,
//! the collinearity straightness test, 3-D polyline export, and SVG
//! rendering.
//!
//! Every face is intrinsically flat, so it carries an isometric chart:
//!
//! * can side — arc length x height: `(lifted angle, z)`;
//! * cup side — polar about the apex, plane angle = surface angle / s:
//!   `(slant * cos(angle/s), slant * sin(angle/s))`;
//! * lid/base — their own Euclidean disks.
//!
//! A flat model places these charts rigidly in one shared plane with the
//! disk(s) externally tangent to the unrolled side at chosen rim angles.
//! A path is straight at a rim crossing exactly when its neighbors are
//! collinear in the model tangent at that crossing.

use crate::geometry::{
    dist3, embed3d, law_of_cosines, normalize_angle, Face, Surface, SurfaceKind, SurfacePoint,
};
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FlatModelError {
    #[error("path has a single segment; straightness defect is trivially 0")]
    SingleSegment,
    #[error("malformed path: {0}")]
    MalformedPath(String),
}

/// Wrap an angle difference into `(-pi, pi]`.
pub fn wrap_pm_pi(a: f64) -> f64 {
    let r = normalize_angle(a);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Side coordinate of a point usable on the side chart: `z` on a can,
/// slant from apex on a cup. Rim points sit on the side boundary.
pub fn side_coord(p: &SurfacePoint, surface: &Surface) -> f64 {
    match (p.face, surface.kind()) {
        (Face::Side, _) => p.height_or_slant,
        (Face::Rim1, SurfaceKind::Can) => surface.height(),
        (Face::Rim1, SurfaceKind::Cup) => surface.slant(),
        (Face::Rim2, _) => 0.0,
        (Face::Apex, _) => 0.0,
        _ => panic!("{:?} is not on the side", p.face),
    }
}

/// Disk radius of a point usable on a lid/base chart.
pub fn disk_radius(p: &SurfacePoint) -> f64 {
    match p.face {
        Face::Lid | Face::Base => p.radial,
        Face::Rim1 | Face::Rim2 => 1.0,
        Face::LidCenter | Face::BaseCenter => 0.0,
        _ => panic!("{:?} is not on a disk", p.face),
    }
}

/// One straight piece of a path, living on a single face chart.
///
/// `sweep` is the signed angular displacement from `start` to `end` along
/// the segment (`|sweep| <= pi`); it disambiguates the two lifts of a
/// half-turn and survives rotation, mirroring and reversal exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathSegment {
    pub face: Face,
    pub start: SurfacePoint,
    pub end: SurfacePoint,
    pub sweep: f64,
}

impl PathSegment {
    pub fn new(face: Face, start: SurfacePoint, end: SurfacePoint, sweep: f64) -> Self {
        PathSegment {
            face,
            start,
            end,
            sweep,
        }
    }

    /// Chart (hence geodesic) length of the segment.
    pub fn length(&self, surface: &Surface) -> f64 {
        match (self.face, surface.kind()) {
            (Face::Side, SurfaceKind::Can) => {
                let dz = side_coord(&self.end, surface) - side_coord(&self.start, surface);
                (self.sweep * self.sweep + dz * dz).sqrt()
            }
            (Face::Side, SurfaceKind::Cup) => law_of_cosines(
                side_coord(&self.start, surface),
                side_coord(&self.end, surface),
                self.sweep / surface.slant(),
            ),
            (Face::Lid | Face::Base, _) => {
                law_of_cosines(disk_radius(&self.start), disk_radius(&self.end), self.sweep)
            }
            _ => panic!("segment on non-chart face {:?}", self.face),
        }
    }

    /// Sample the segment at `n + 1` evenly spaced chart parameters and
    /// return the surface points.
    pub fn sample(&self, surface: &Surface, n: usize) -> Vec<SurfacePoint> {
        let n = n.max(1);
        // local chart anchored at the start point
        let (p0, p1): ([f64; 2], [f64; 2]) = match (self.face, surface.kind()) {
            (Face::Side, SurfaceKind::Can) => (
                [0.0, side_coord(&self.start, surface)],
                [self.sweep, side_coord(&self.end, surface)],
            ),
            (Face::Side, SurfaceKind::Cup) => {
                let eta = self.sweep / surface.slant();
                (
                    [side_coord(&self.start, surface), 0.0],
                    [
                        side_coord(&self.end, surface) * eta.cos(),
                        side_coord(&self.end, surface) * eta.sin(),
                    ],
                )
            }
            (Face::Lid | Face::Base, _) => (
                [disk_radius(&self.start), 0.0],
                [
                    disk_radius(&self.end) * self.sweep.cos(),
                    disk_radius(&self.end) * self.sweep.sin(),
                ],
            ),
            _ => panic!("segment on non-chart face {:?}", self.face),
        };
        let base_angle = self.start.angle;
        (0..=n)
            .map(|i| {
                let t = i as f64 / n as f64;
                let x = p0[0] + t * (p1[0] - p0[0]);
                let y = p0[1] + t * (p1[1] - p0[1]);
                match (self.face, surface.kind()) {
                    (Face::Side, SurfaceKind::Can) => SurfacePoint::side_can(base_angle + x, y),
                    (Face::Side, SurfaceKind::Cup) => {
                        let sl = (x * x + y * y).sqrt();
                        let eta = y.atan2(x);
                        if sl <= 1e-15 {
                            SurfacePoint::apex()
                        } else {
                            SurfacePoint::side_cup(base_angle + eta * surface.slant(), sl)
                        }
                    }
                    (Face::Lid, _) => {
                        let r = (x * x + y * y).sqrt();
                        let beta = y.atan2(x);
                        SurfacePoint::lid(base_angle + beta, r)
                    }
                    (Face::Base, _) => {
                        let r = (x * x + y * y).sqrt();
                        let beta = y.atan2(x);
                        SurfacePoint::base(base_angle + beta, r)
                    }
                    _ => unreachable!(),
                }
            })
            .collect()
    }

    pub fn rotated(&self, delta: f64) -> Self {
        PathSegment {
            face: self.face,
            start: self.start.rotated(delta),
            end: self.end.rotated(delta),
            sweep: self.sweep,
        }
    }

    pub fn mirrored(&self) -> Self {
        PathSegment {
            face: self.face,
            start: self.start.mirrored(),
            end: self.end.mirrored(),
            sweep: -self.sweep,
        }
    }

    pub fn reversed(&self) -> Self {
        PathSegment {
            face: self.face,
            start: self.end,
            end: self.start,
            sweep: -self.sweep,
        }
    }

    /// Reflect a can upside down (z -> h - z, lid <-> base).
    pub fn flipped_can(&self, h: f64) -> Self {
        let flip_face = |f: Face| match f {
            Face::Lid => Face::Base,
            Face::Base => Face::Lid,
            Face::Rim1 => Face::Rim2,
            Face::Rim2 => Face::Rim1,
            Face::LidCenter => Face::BaseCenter,
            Face::BaseCenter => Face::LidCenter,
            other => other,
        };
        let flip_point = |p: &SurfacePoint| {
            let mut q = *p;
            q.face = flip_face(p.face);
            if p.face == Face::Side {
                q.height_or_slant = h - p.height_or_slant;
            }
            q
        };
        PathSegment {
            face: flip_face(self.face),
            start: flip_point(&self.start),
            end: flip_point(&self.end),
            sweep: self.sweep,
        }
    }
}

/// A rim crossing between two consecutive path segments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RimCrossing {
    pub rim: Face,
    pub angle: f64,
}

/// An ordered chain of straight chart segments joined at rim crossings.
/// `crossings[k]` sits between `segments[k]` and `segments[k + 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicPath {
    pub segments: Vec<PathSegment>,
    pub crossings: Vec<RimCrossing>,
    pub total_length: f64,
}

impl GeodesicPath {
    pub fn new(
        surface: &Surface,
        segments: Vec<PathSegment>,
        crossings: Vec<RimCrossing>,
    ) -> Self {
        debug_assert_eq!(crossings.len() + 1, segments.len().max(1));
        let total_length = segments.iter().map(|s| s.length(surface)).sum();
        GeodesicPath {
            segments,
            crossings,
            total_length,
        }
    }

    pub fn start(&self) -> SurfacePoint {
        self.segments.first().expect("non-empty path").start
    }

    pub fn end(&self) -> SurfacePoint {
        self.segments.last().expect("non-empty path").end
    }

    pub fn rotated(&self, surface: &Surface, delta: f64) -> Self {
        GeodesicPath {
            segments: self.segments.iter().map(|s| s.rotated(delta)).collect(),
            crossings: self
                .crossings
                .iter()
                .map(|c| RimCrossing {
                    rim: c.rim,
                    angle: normalize_angle(c.angle + delta),
                })
                .collect(),
            total_length: self.total_length,
        }
        .with_recomputed_length(surface)
    }

    pub fn mirrored(&self, surface: &Surface) -> Self {
        GeodesicPath {
            segments: self.segments.iter().map(|s| s.mirrored()).collect(),
            crossings: self
                .crossings
                .iter()
                .map(|c| RimCrossing {
                    rim: c.rim,
                    angle: normalize_angle(-c.angle),
                })
                .collect(),
            total_length: self.total_length,
        }
        .with_recomputed_length(surface)
    }

    pub fn reversed(&self, surface: &Surface) -> Self {
        GeodesicPath {
            segments: self.segments.iter().rev().map(|s| s.reversed()).collect(),
            crossings: self.crossings.iter().rev().copied().collect(),
            total_length: self.total_length,
        }
        .with_recomputed_length(surface)
    }

    pub fn flipped_can(&self, surface: &Surface) -> Self {
        let h = surface.height();
        let flip_rim = |f: Face| if f == Face::Rim1 { Face::Rim2 } else { Face::Rim1 };
        GeodesicPath {
            segments: self.segments.iter().map(|s| s.flipped_can(h)).collect(),
            crossings: self
                .crossings
                .iter()
                .map(|c| RimCrossing {
                    rim: flip_rim(c.rim),
                    angle: c.angle,
                })
                .collect(),
            total_length: self.total_length,
        }
        .with_recomputed_length(surface)
    }

    fn with_recomputed_length(mut self, surface: &Surface) -> Self {
        self.total_length = self.segments.iter().map(|s| s.length(surface)).sum();
        self
    }

    /// Distinct points where the path meets the given rim, counting interior
    /// crossings and endpoint contacts once each.
    pub fn rim_contacts(&self, rim: Face) -> Vec<f64> {
        let mut angles: Vec<f64> = self
            .crossings
            .iter()
            .filter(|c| c.rim == rim)
            .map(|c| c.angle)
            .collect();
        for p in [self.start(), self.end()] {
            if p.face == rim {
                angles.push(p.angle);
            }
        }
        angles.sort_by(f64::total_cmp);
        angles.dedup_by(|a, b| wrap_pm_pi(*a - *b).abs() < 1e-9);
        angles
    }
}

/// Polyline of 3-D points along the path; chordal length converges to
/// `total_length` as `samples_per_unit` grows.
pub fn path_to_polyline(
    path: &GeodesicPath,
    surface: &Surface,
    samples_per_unit: usize,
) -> Vec<[f64; 3]> {
    let mut out: Vec<[f64; 3]> = Vec::new();
    for seg in &path.segments {
        let n = ((seg.length(surface) * samples_per_unit as f64).ceil() as usize).max(1);
        for (i, sp) in seg.sample(surface, n).iter().enumerate() {
            if i == 0 && !out.is_empty() {
                continue; // joint shared with the previous segment
            }
            out.push(embed3d(sp, surface));
        }
    }
    out
}

pub fn polyline_length(poly: &[[f64; 3]]) -> f64 {
    poly.windows(2).map(|w| dist3(&w[0], &w[1])).sum()
}

// ---------------------------------------------------------------------------
// Flat models
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RimTangency {
    pub rim: Face,
    pub angle: f64,
}

/// A rigid placement of the face charts in one shared plane, glued at the
/// given tangency rim points.
///
/// Can layout: side rectangle with `x = angle - reference`, `y = z`; the
/// lid disk hangs above the top edge (center `(x_t, h + 1)`), the base disk
/// below the bottom edge (center `(x_t, -1)`). Cup layout: sector with the
/// apex at the origin and the tangency ray along +x; the lid disk is
/// externally tangent to the sector arc, centered at `(s + 1, 0)`.
#[derive(Debug, Clone)]
pub struct FlatModel {
    pub surface: Surface,
    pub tangencies: Vec<RimTangency>,
    /// Angle mapped to x = 0 (can) or to the +x ray (cup).
    reference: f64,
}

/// Unroll the surface about the given tangency angles, one per rim the
/// paths of interest cross. A can accepts `(Rim1, tau)` and/or
/// `(Rim2, tau)`; a cup accepts a single `(Rim1, tau)`.
pub fn unroll(surface: &Surface, tangencies: &[RimTangency]) -> FlatModel {
    let reference = tangencies.first().map(|t| t.angle).unwrap_or(0.0);
    FlatModel {
        surface: *surface,
        tangencies: tangencies.to_vec(),
        reference,
    }
}

impl FlatModel {
    fn tangency_for(&self, rim: Face) -> Option<&RimTangency> {
        self.tangencies.iter().find(|t| t.rim == rim)
    }

    /// Lift of a surface angle relative to the model reference, in
    /// `(-pi, pi]` plus the reference.
    pub fn lift(&self, angle: f64) -> f64 {
        wrap_pm_pi(angle - self.reference)
    }

    /// Plane position of a side-chart point given a lifted angle.
    pub fn place_side_raw(&self, angle_lift: f64, coord: f64) -> [f64; 2] {
        match self.surface.kind() {
            SurfaceKind::Can => [angle_lift, coord],
            SurfaceKind::Cup => {
                let eta = angle_lift / self.surface.slant();
                [coord * eta.cos(), coord * eta.sin()]
            }
        }
    }

    /// Plane position of a disk-chart point given a lifted angle, for the
    /// disk glued at `rim`. The lift is relative to the model reference.
    pub fn place_disk_raw(&self, rim: Face, angle_lift: f64, r: f64) -> [f64; 2] {
        let t = self
            .tangency_for(rim)
            .unwrap_or_else(|| panic!("flat model has no tangency on {rim:?}"));
        let tau_lift = self.lift(t.angle);
        let psi = angle_lift - tau_lift;
        match (self.surface.kind(), rim) {
            (SurfaceKind::Can, Face::Rim1) => {
                let h = self.surface.height();
                let cx = tau_lift;
                [cx + r * psi.sin(), h + 1.0 - r * psi.cos()]
            }
            (SurfaceKind::Can, Face::Rim2) => {
                let cx = tau_lift;
                [cx + r * psi.sin(), -1.0 + r * psi.cos()]
            }
            (SurfaceKind::Cup, Face::Rim1) => {
                let s = self.surface.slant();
                // rotate the whole gluing with the tangency ray
                let eta = tau_lift / s;
                let cx = (s + 1.0) * eta.cos();
                let cy = (s + 1.0) * eta.sin();
                // local frame: contact direction -x, rim tangent +y at psi=0
                let (lx, ly) = (-psi.cos(), psi.sin());
                [
                    cx + r * (lx * eta.cos() - ly * eta.sin()),
                    cy + r * (lx * eta.sin() + ly * eta.cos()),
                ]
            }
            _ => panic!("no disk glued on {rim:?}"),
        }
    }

    /// Plane position of a canonical surface point, on the given chart
    /// face, using the shortest lift relative to the model reference.
    pub fn place_point(&self, chart: Face, p: &SurfacePoint) -> [f64; 2] {
        let lift = self.lift(p.angle);
        match chart {
            Face::Side => self.place_side_raw(lift, side_coord(p, &self.surface)),
            Face::Lid => self.place_disk_raw(Face::Rim1, lift, disk_radius(p)),
            Face::Base => self.place_disk_raw(Face::Rim2, lift, disk_radius(p)),
            _ => panic!("{chart:?} is not a chart face"),
        }
    }
}

// ---------------------------------------------------------------------------
// Straightness
// ---------------------------------------------------------------------------

fn perp_distance(origin: [f64; 2], through: [f64; 2], q: [f64; 2]) -> Option<f64> {
    let dx = through[0] - origin[0];
    let dy = through[1] - origin[1];
    let len = (dx * dx + dy * dy).sqrt();
    if len < 1e-14 {
        return None;
    }
    let qx = q[0] - origin[0];
    let qy = q[1] - origin[1];
    Some((dx * qy - dy * qx).abs() / len)
}

/// Maximum collinearity defect over the path's interior rim crossings.
///
/// For each crossing, the surface is re-unrolled with the tangency at that
/// crossing and the adjacent segment endpoints are mapped into the plane;
/// the defect is the perpendicular deviation of each endpoint from the
/// straight line through the crossing along the opposite segment. A
/// geodesic scores 0 up to floating point.
pub fn straightness_defect(path: &GeodesicPath, surface: &Surface) -> Result<f64, FlatModelError> {
    if path.segments.len() < 2 {
        return Err(FlatModelError::SingleSegment);
    }
    if path.crossings.len() + 1 != path.segments.len() {
        return Err(FlatModelError::MalformedPath(format!(
            "{} segments need {} crossings, found {}",
            path.segments.len(),
            path.segments.len() - 1,
            path.crossings.len()
        )));
    }
    let mut worst: f64 = 0.0;
    for (k, crossing) in path.crossings.iter().enumerate() {
        let prev = &path.segments[k];
        let next = &path.segments[k + 1];
        let model = unroll(
            surface,
            &[RimTangency {
                rim: crossing.rim,
                angle: crossing.angle,
            }],
        );
        // angle lifts relative to the crossing, exact from the stored sweeps
        let place = |seg: &PathSegment, point: &SurfacePoint, lift: f64| -> [f64; 2] {
            match seg.face {
                Face::Side => model.place_side_raw(lift, side_coord(point, surface)),
                Face::Lid => model.place_disk_raw(Face::Rim1, lift, disk_radius(point)),
                Face::Base => model.place_disk_raw(Face::Rim2, lift, disk_radius(point)),
                _ => unreachable!(),
            }
        };
        let p = place(prev, &prev.start, -prev.sweep);
        let n = place(next, &next.end, next.sweep);
        let c = model.place_side_raw(0.0, side_coord_of_rim(crossing.rim, surface));
        let d1 = perp_distance(p, c, n);
        let d2 = perp_distance(n, c, p);
        let defect = match (d1, d2) {
            (Some(a), Some(b)) => a.max(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => 0.0,
        };
        worst = worst.max(defect);
    }
    Ok(worst)
}

fn side_coord_of_rim(rim: Face, surface: &Surface) -> f64 {
    match (rim, surface.kind()) {
        (Face::Rim1, SurfaceKind::Can) => surface.height(),
        (Face::Rim1, SurfaceKind::Cup) => surface.slant(),
        (Face::Rim2, _) => 0.0,
        _ => panic!("{rim:?} is not a rim"),
    }
}

// ---------------------------------------------------------------------------
// SVG export
// ---------------------------------------------------------------------------

const PATH_COLORS: [&str; 6] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Render the flat model with paths overlaid. One group per face region,
/// one group per path; 1 SVG user unit = 1 rim radius; every stroke
/// carries a `data-face` attribute.
pub fn render_svg(model: &FlatModel, paths: &[&GeodesicPath]) -> String {
    let mut shapes: Vec<String> = Vec::new();
    let mut bbox = BBox::new();
    let surface = &model.surface;

    match surface.kind() {
        SurfaceKind::Can => {
            let h = surface.height();
            // rectangle spanning one full turn, centered on the reference lift
            shapes.push(format!(
                r##"  <g id="side" data-face="side"><rect x="{:.6}" y="0" width="{:.6}" height="{:.6}" fill="none" stroke="#333" stroke-width="0.02"/></g>"##,
                -PI, TAU, h
            ));
            bbox.add([-PI, 0.0]);
            bbox.add([PI, h]);
            for t in &model.tangencies {
                let (cy, name) = match t.rim {
                    Face::Rim1 => (h + 1.0, "lid"),
                    _ => (-1.0, "base"),
                };
                let cx = model.lift(t.angle);
                shapes.push(format!(
                    r##"  <g id="{name}" data-face="{name}"><circle cx="{cx:.6}" cy="{cy:.6}" r="1" fill="none" stroke="#333" stroke-width="0.02"/></g>"##,
                ));
                bbox.add([cx - 1.0, cy - 1.0]);
                bbox.add([cx + 1.0, cy + 1.0]);
            }
        }
        SurfaceKind::Cup => {
            let s = surface.slant();
            let half = PI / s; // half the sector angle
            let (x0, y0) = ((s * half.cos()), (s * half.sin()));
            // sector outline: two radii plus the arc, large-arc when > half turn
            let large = if 2.0 * half > PI { 1 } else { 0 };
            shapes.push(format!(
                r##"  <g id="side" data-face="side"><path d="M 0 0 L {x0:.6} {y0neg:.6} A {s:.6} {s:.6} 0 {large} 1 {x0:.6} {y0:.6} Z" fill="none" stroke="#333" stroke-width="0.02"/></g>"##,
                y0neg = -y0,
            ));
            bbox.add([-s, -s]);
            bbox.add([s, s]);
            if model.tangency_for(Face::Rim1).is_some() {
                shapes.push(format!(
                    r##"  <g id="lid" data-face="lid"><circle cx="{:.6}" cy="0" r="1" fill="none" stroke="#333" stroke-width="0.02"/></g>"##,
                    s + 1.0
                ));
                bbox.add([s + 2.0, -1.0]);
                bbox.add([s + 2.0, 1.0]);
            }
        }
    }

    for (i, path) in paths.iter().enumerate() {
        let color = PATH_COLORS[i % PATH_COLORS.len()];
        let mut lines = Vec::new();
        for seg in &path.segments {
            let a = model.place_point(seg.face, &seg.start);
            // keep the end on the same lift as the start
            let lift = model.lift(seg.start.angle) + seg.sweep;
            let b = match seg.face {
                Face::Side => model.place_side_raw(lift, side_coord(&seg.end, surface)),
                Face::Lid => model.place_disk_raw(Face::Rim1, lift, disk_radius(&seg.end)),
                Face::Base => model.place_disk_raw(Face::Rim2, lift, disk_radius(&seg.end)),
                _ => unreachable!(),
            };
            bbox.add(a);
            bbox.add(b);
            lines.push(format!(
                r##"    <line x1="{:.6}" y1="{:.6}" x2="{:.6}" y2="{:.6}" stroke="{color}" stroke-width="0.03" data-face="{}"/>"##,
                a[0],
                a[1],
                b[0],
                b[1],
                seg.face.label(surface.kind()),
            ));
        }
        shapes.push(format!(
            "  <g id=\"path{}\" data-length=\"{:.12}\">\n{}\n  </g>",
            i,
            path.total_length,
            lines.join("\n")
        ));
    }

    let pad = 0.25;
    let (minx, miny, w, hgt) = bbox.padded(pad);
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{minx:.4} {miny:.4} {w:.4} {hgt:.4}\" width=\"{w_px:.0}\" height=\"{h_px:.0}\">\n<g transform=\"scale(1,-1)\">\n{}\n</g>\n</svg>\n",
        shapes.join("\n"),
        w_px = w * 80.0,
        h_px = hgt * 80.0,
    )
}

struct BBox {
    min: [f64; 2],
    max: [f64; 2],
}

impl BBox {
    fn new() -> Self {
        BBox {
            min: [f64::INFINITY; 2],
            max: [f64::NEG_INFINITY; 2],
        }
    }
    fn add(&mut self, p: [f64; 2]) {
        for k in 0..2 {
            self.min[k] = self.min[k].min(p[k]);
            self.max[k] = self.max[k].max(p[k]);
        }
    }
    /// y is emitted under a scale(1,-1) flip, so the viewBox flips too.
    fn padded(&self, pad: f64) -> (f64, f64, f64, f64) {
        let minx = self.min[0] - pad;
        let miny = -(self.max[1] + pad);
        let w = self.max[0] - self.min[0] + 2.0 * pad;
        let h = self.max[1] - self.min[1] + 2.0 * pad;
        (minx, miny, w, h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::angle_gap;

    fn can(h: f64) -> Surface {
        Surface::can(h).unwrap()
    }
    fn cup(s: f64) -> Surface {
        Surface::cup(s).unwrap()
    }

    /// An over-the-top diaxial path on a can: up the side at angle 0,
    /// straight across the lid, down at angle pi.
    fn over_lid_diaxial(surface: &Surface, za: f64, zb: f64) -> GeodesicPath {
        let a = SurfacePoint::side_can(0.0, za);
        let b = SurfacePoint::side_can(PI, zb);
        let segs = vec![
            PathSegment::new(Face::Side, a, SurfacePoint::rim1(0.0), 0.0),
            PathSegment::new(Face::Lid, SurfacePoint::rim1(0.0), SurfacePoint::rim1(PI), PI),
            PathSegment::new(Face::Side, SurfacePoint::rim1(PI), b, 0.0),
        ];
        let crossings = vec![
            RimCrossing {
                rim: Face::Rim1,
                angle: 0.0,
            },
            RimCrossing {
                rim: Face::Rim1,
                angle: PI,
            },
        ];
        GeodesicPath::new(surface, segs, crossings)
    }

    #[test]
    fn straight_over_the_top_is_geodesic() {
        for h in [0.5, 1.0, 2.0, 5.0] {
            let s = can(h);
            let p = over_lid_diaxial(&s, 0.25 * h, 0.25 * h);
            let d = straightness_defect(&p, &s).unwrap();
            assert!(d < 1e-12, "h={h}: defect {d}");
            assert!((p.total_length - (1.5 * h + 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn bent_crossing_has_positive_defect() {
        let s = can(2.0);
        // crossing at angle 0.6 but endpoints placed for a crossing near 0.3
        let a = SurfacePoint::side_can(0.0, 1.0);
        let b = SurfacePoint::lid(1.4, 0.5);
        let t = 0.6;
        let segs = vec![
            PathSegment::new(Face::Side, a, SurfacePoint::rim1(t), t),
            PathSegment::new(Face::Lid, SurfacePoint::rim1(t), b, wrap_pm_pi(b.angle - t)),
        ];
        let crossings = vec![RimCrossing {
            rim: Face::Rim1,
            angle: t,
        }];
        let p = GeodesicPath::new(&s, segs, crossings);
        let d = straightness_defect(&p, &s).unwrap();
        assert!(d > 1e-3, "expected a visible bend, got {d}");
    }

    #[test]
    fn single_segment_defect_is_an_error() {
        let s = can(1.0);
        let seg = PathSegment::new(
            Face::Side,
            SurfacePoint::side_can(0.0, 0.2),
            SurfacePoint::side_can(1.0, 0.8),
            1.0,
        );
        let p = GeodesicPath::new(&s, vec![seg], vec![]);
        assert_eq!(
            straightness_defect(&p, &s),
            Err(FlatModelError::SingleSegment)
        );
    }

    #[test]
    fn polyline_length_converges_to_total_length() {
        let s = can(2.0);
        let p = over_lid_diaxial(&s, 0.5, 1.0);
        let poly = path_to_polyline(&p, &s, 1000);
        let len = polyline_length(&poly);
        assert!(len <= p.total_length + 1e-12);
        assert!((p.total_length - len).abs() < 1e-5);
        // every vertex on the surface
        for q in &poly {
            let r = (q[0] * q[0] + q[1] * q[1]).sqrt();
            assert!(r <= 1.0 + 1e-12);
            assert!(q[2] >= -1e-12 && q[2] <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn cup_ruling_polyline_is_straight_in_space() {
        let s = cup(2.0);
        let seg = PathSegment::new(
            Face::Side,
            SurfacePoint::side_cup(1.0, 0.4),
            SurfacePoint::side_cup(1.0, 1.8),
            0.0,
        );
        let p = GeodesicPath::new(&s, vec![seg], vec![]);
        let poly = path_to_polyline(&p, &s, 500);
        let len = polyline_length(&poly);
        // a ruling is straight in 3-D, so chords are exact
        assert!((len - p.total_length).abs() < 1e-12);
        assert!((p.total_length - 1.4).abs() < 1e-12);
    }

    #[test]
    fn chart_roundtrip_is_isometric() {
        // midpoint sampling of random segments reproduces chart lengths
        let surfaces = [can(1.7), cup(2.3)];
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for surface in &surfaces {
            for _ in 0..1000 {
                let ang = rnd() * TAU;
                let p = match surface.kind() {
                    SurfaceKind::Can => SurfacePoint::side_can(ang, rnd() * surface.height()),
                    SurfaceKind::Cup => {
                        SurfacePoint::side_cup(ang, 0.05 + rnd() * (surface.slant() - 0.05))
                    }
                };
                // chart -> surface -> embed along a degenerate segment
                let seg = PathSegment::new(Face::Side, p, p, 0.0);
                let back = seg.sample(surface, 1);
                let d = dist3(&embed3d(&p, surface), &embed3d(&back[0], surface));
                assert!(d < 1e-12, "roundtrip error {d}");
            }
        }
    }

    #[test]
    fn rolling_correspondence_preserves_rim_arcs() {
        let mut state = 7u64;
        let mut rnd = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for surface in [can(1.2), cup(3.0)] {
            for _ in 0..200 {
                let t1 = rnd() * TAU;
                let dt = (rnd() - 0.5) * PI;
                let m = unroll(
                    &surface,
                    &[RimTangency {
                        rim: Face::Rim1,
                        angle: t1,
                    }],
                );
                let top = side_coord_of_rim(Face::Rim1, &surface);
                // arc along the unrolled side edge between the two lifts
                let p1 = m.place_side_raw(m.lift(t1), top);
                let p2 = m.place_side_raw(m.lift(t1) + dt, top);
                let side_arc = match surface.kind() {
                    SurfaceKind::Can => (p2[0] - p1[0]).abs(),
                    SurfaceKind::Cup => {
                        // arc of the sector circle of radius s
                        let a1 = p1[1].atan2(p1[0]);
                        let a2 = p2[1].atan2(p2[0]);
                        surface.slant() * wrap_pm_pi(a2 - a1).abs()
                    }
                };
                assert!((side_arc - dt.abs()).abs() < 1e-12);
                // and along the glued disk boundary
                let q1 = m.place_disk_raw(Face::Rim1, m.lift(t1), 1.0);
                let q2 = m.place_disk_raw(Face::Rim1, m.lift(t1) + dt, 1.0);
                let (c1, c2) = match surface.kind() {
                    SurfaceKind::Can => {
                        let c = [m.lift(t1), top + 1.0];
                        (c, c)
                    }
                    SurfaceKind::Cup => {
                        let c = [surface.slant() + 1.0, 0.0];
                        (c, c)
                    }
                };
                let b1 = (q1[1] - c1[1]).atan2(q1[0] - c1[0]);
                let b2 = (q2[1] - c2[1]).atan2(q2[0] - c2[0]);
                let disk_arc = wrap_pm_pi(b2 - b1).abs();
                assert!((disk_arc - dt.abs()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unroll_matches_reference_layouts() {
        let s = can(2.0);
        let m = unroll(
            &s,
            &[RimTangency {
                rim: Face::Rim1,
                angle: 0.0,
            }],
        );
        // tangency image on the top edge
        assert_eq!(m.place_side_raw(0.0, 2.0), [0.0, 2.0]);
        // disk boundary point at the tangency coincides
        let q = m.place_disk_raw(Face::Rim1, 0.0, 1.0);
        assert!((q[0] - 0.0).abs() < 1e-15 && (q[1] - 2.0).abs() < 1e-15);

        let s = cup(2.0);
        let m = unroll(
            &s,
            &[RimTangency {
                rim: Face::Rim1,
                angle: 0.0,
            }],
        );
        let q = m.place_disk_raw(Face::Rim1, 0.0, 0.0);
        assert!((q[0] - 3.0).abs() < 1e-15 && q[1].abs() < 1e-15);
        let q = m.place_disk_raw(Face::Rim1, 0.0, 1.0);
        assert!((q[0] - 2.0).abs() < 1e-15 && q[1].abs() < 1e-15);
    }

    #[test]
    fn mirror_flips_sweep_and_angles() {
        let s = can(2.0);
        let p = over_lid_diaxial(&s, 0.5, 0.7);
        let g = angle_gap(&p.start(), &p.end());
        assert!((g.theta - PI).abs() < 1e-15);
        let m = p.mirrored(&s);
        assert!((m.total_length - p.total_length).abs() < 1e-12);
        assert!((m.segments[1].sweep + PI).abs() < 1e-15);
        let mm = m.mirrored(&s);
        assert_eq!(mm.segments.len(), p.segments.len());
        assert!((mm.total_length - p.total_length).abs() < 1e-12);
    }

    #[test]
    fn svg_has_groups_and_metadata() {
        let s = cup(2.0);
        let m = unroll(
            &s,
            &[RimTangency {
                rim: Face::Rim1,
                angle: 0.0,
            }],
        );
        let seg = PathSegment::new(
            Face::Side,
            SurfacePoint::side_cup(0.0, 1.5),
            SurfacePoint::rim1(0.0),
            0.0,
        );
        let p = GeodesicPath::new(&s, vec![seg], vec![]);
        let svg = render_svg(&m, &[&p]);
        assert!(svg.contains("data-face=\"side\""));
        assert!(svg.contains("data-face=\"lid\""));
        assert!(svg.contains("<svg"));
        assert!(svg.contains("path0"));
    }
}
