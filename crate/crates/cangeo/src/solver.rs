//! Global minimization over the candidate families, tie detection, and
//! multiplicity classification.
//!
//! The solve pipeline: canonicalize the endpoints, peel off the axial and
//! shared-half-plane cases (where the profile path is provably minimal and
//! unique unless both endpoints are axial), then rotate/mirror/flip the
//! instance into a normalized frame (A at angle 0, B at angle
//! `theta in (0, pi]`, canonical face order), minimize every applicable
//! family over its `[0, theta]^dim` box by grid scan plus golden-section
//! coordinate descent, collect everything within the tie tolerance of the
//! least minimum, rebuild the geometry, and map it back to the original
//! frame. Diaxial instances (`theta = pi`) duplicate non-planar minimizers
//! by mirror reflection.

use crate::families::{
    enumerate_families, half_plane_path, CandidateFamily, FamilyError, FamilyId,
    LidBaseConvention,
};
use crate::flatmodel::{straightness_defect, FlatModelError, GeodesicPath};
use crate::geometry::{
    angle_gap, classify, dist3, embed3d, Face, GeometryError, Surface, SurfaceKind, SurfacePoint,
};
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("A and B are the same point after canonicalization")]
    SamePoint,
    #[error("invalid point: {0}")]
    InvalidPoint(#[from] GeometryError),
    #[error("empty parameter box: [{0}, {1}]")]
    EmptyBox(f64, f64),
    #[error("family evaluation failed: {0}")]
    Family(#[from] FamilyError),
}

/// Solver knobs. The defaults pin the documented tolerances: 512 grid
/// points per dimension, golden-section refinement to 1e-12 in the
/// parameters, absolute tie detection at 1e-9 in length.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SolveConfig {
    pub grid_n: usize,
    pub grid_n_3d: usize,
    pub param_tol: f64,
    pub tie_tol: f64,
    pub straightness_tol: f64,
    pub lid_base_convention: LidBaseConvention,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            grid_n: 512,
            grid_n_3d: 48,
            param_tol: 1e-12,
            tie_tol: 1e-9,
            straightness_tol: 1e-8,
            lid_base_convention: LidBaseConvention::CrossingAngles,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplicity {
    Finite(usize),
    InfiniteFamily(String),
}

/// Per-family minimization outcome. The argmin lives in the normalized
/// frame (A rotated to angle 0, B mirrored into `[0, pi]`).
#[derive(Debug, Clone, Serialize)]
pub struct FamilyOutcome {
    pub family: FamilyId,
    pub min: f64,
    pub argmin: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportedPath {
    pub family: FamilyId,
    pub length: f64,
    pub straightness_defect: f64,
    pub path: GeodesicPath,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub min_length: f64,
    pub multiplicity: Multiplicity,
    pub paths: Vec<ReportedPath>,
    pub per_family: Vec<FamilyOutcome>,
    /// Families whose minimum lands in `(min + tie_tol, min + 10*tie_tol]`:
    /// close enough that the multiplicity answer is tolerance-sensitive.
    pub near_tie: Vec<FamilyId>,
    /// Post-hoc invariant violations (count bounds, straightness); empty on
    /// a healthy solve.
    pub diagnostics: Vec<String>,
}

// ---------------------------------------------------------------------------
// 1-D / n-D minimization: grid scan + golden-section refinement.
// ---------------------------------------------------------------------------

/// Golden-section search for a minimum of `f` on `[a, b]`, to interval
/// width `tol`. Returns the best evaluated point.
pub fn golden_section_min<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    if hi - lo < tol {
        let m = 0.5 * (lo + hi);
        return (m, f(m));
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    // track endpoints as well so boundary minima are exact
    let (mut bx, mut bf) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    for &(x, fx) in &[(lo, f(lo)), (hi, f(hi))] {
        if fx < bf {
            bx = x;
            bf = fx;
        }
    }
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
        let (x, fx) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
        if fx < bf {
            bx = x;
            bf = fx;
        }
    }
    (bx, bf)
}

#[derive(Debug, Clone, Serialize)]
pub struct Minimum {
    pub params: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizeOutcome {
    /// Distinct local minima found, best first.
    pub minima: Vec<Minimum>,
    /// Index of the global minimum in `minima` (always 0 after sorting).
    pub global: usize,
}

/// Grid scan of `grid_n + 1` points per axis over `boxes`, then
/// golden-section coordinate descent from every grid-local minimum until
/// the parameter change drops below `tol`. Distinct refined minima
/// (separation above `10 * tol` in any coordinate) are all returned.
fn minimize_grid<F: Fn(&[f64]) -> f64>(
    f: F,
    boxes: &[[f64; 2]],
    grid_n: usize,
    tol: f64,
) -> Result<MinimizeOutcome, SolveError> {
    let dim = boxes.len();
    assert!(dim >= 1);
    for b in boxes {
        if b[1] < b[0] {
            return Err(SolveError::EmptyBox(b[0], b[1]));
        }
    }
    let degenerate: Vec<bool> = boxes.iter().map(|b| b[1] - b[0] < tol).collect();
    let n_per_axis: Vec<usize> = degenerate
        .iter()
        .map(|&d| if d { 0 } else { grid_n })
        .collect();
    let coord = |axis: usize, i: usize| -> f64 {
        if n_per_axis[axis] == 0 {
            0.5 * (boxes[axis][0] + boxes[axis][1])
        } else {
            boxes[axis][0] + (boxes[axis][1] - boxes[axis][0]) * i as f64 / n_per_axis[axis] as f64
        }
    };
    // dense scan
    let stride: Vec<usize> = {
        let mut s = vec![1usize; dim];
        for k in 1..dim {
            s[k] = s[k - 1] * (n_per_axis[k - 1] + 1);
        }
        s
    };
    let total: usize = n_per_axis.iter().map(|n| n + 1).product();
    let mut values = vec![0.0f64; total];
    let mut idx = vec![0usize; dim];
    let mut params = vec![0.0f64; dim];
    for (flat, value) in values.iter_mut().enumerate() {
        let mut rem = flat;
        for k in 0..dim {
            idx[k] = rem % (n_per_axis[k] + 1);
            rem /= n_per_axis[k] + 1;
            params[k] = coord(k, idx[k]);
        }
        *value = f(&params);
    }
    // grid-local minima: no neighbor in the Moore neighborhood is smaller
    let mut seeds: Vec<(usize, f64)> = Vec::new();
    'outer: for flat in 0..total {
        let mut rem = flat;
        for k in 0..dim {
            idx[k] = rem % (n_per_axis[k] + 1);
            rem /= n_per_axis[k] + 1;
        }
        let v = values[flat];
        let mut offs = vec![-1i64; dim];
        loop {
            let mut nflat = 0usize;
            let mut ok = true;
            for k in 0..dim {
                let j = idx[k] as i64 + offs[k];
                if j < 0 || j > n_per_axis[k] as i64 {
                    ok = false;
                    break;
                }
                nflat += j as usize * stride[k];
            }
            if ok && nflat != flat && values[nflat] < v {
                continue 'outer;
            }
            // advance the offset odometer
            let mut k = 0;
            loop {
                if k == dim {
                    break;
                }
                offs[k] += 1;
                if offs[k] <= 1 {
                    break;
                }
                offs[k] = -1;
                k += 1;
            }
            if k == dim {
                break;
            }
        }
        seeds.push((flat, v));
    }
    seeds.sort_by(|a, b| a.1.total_cmp(&b.1));
    seeds.truncate(64);

    // coordinate-descent refinement
    let mut minima: Vec<Minimum> = Vec::new();
    for (flat, _) in seeds {
        let mut rem = flat;
        let mut x = vec![0.0f64; dim];
        for k in 0..dim {
            let i = rem % (n_per_axis[k] + 1);
            rem /= n_per_axis[k] + 1;
            x[k] = coord(k, i);
        }
        let mut fx = f(&x);
        for _sweep in 0..300 {
            let mut moved: f64 = 0.0;
            for k in 0..dim {
                if degenerate[k] {
                    continue;
                }
                let cell = (boxes[k][1] - boxes[k][0]) / n_per_axis[k].max(1) as f64;
                let mut half = cell.max(tol);
                let (bx, bf);
                loop {
                    let lo = (x[k] - half).max(boxes[k][0]);
                    let hi = (x[k] + half).min(boxes[k][1]);
                    let mut trial = x.clone();
                    let g = |v: f64| {
                        let mut t = trial.clone();
                        t[k] = v;
                        f(&t)
                    };
                    let (gx, gf) = golden_section_min(g, lo, hi, tol);
                    // expand the bracket while the minimizer pins to an
                    // interior bracket edge (long valley along this axis)
                    let at_edge = (gx - lo).abs() < 2.0 * tol && lo > boxes[k][0] + tol
                        || (hi - gx).abs() < 2.0 * tol && hi < boxes[k][1] - tol;
                    if at_edge && half < (boxes[k][1] - boxes[k][0]) {
                        half *= 2.0;
                        trial[k] = gx;
                        continue;
                    }
                    bx = gx;
                    bf = gf;
                    break;
                }
                if bf < fx {
                    moved = moved.max((bx - x[k]).abs());
                    x[k] = bx;
                    fx = bf;
                }
            }
            if moved < tol {
                break;
            }
        }
        // merge with an existing minimum if indistinguishable
        let sep = (10.0 * tol).max(1e-10);
        match minima
            .iter_mut()
            .find(|m| m.params.iter().zip(&x).all(|(p, q)| (p - q).abs() <= sep))
        {
            Some(m) => {
                if fx < m.value {
                    m.params = x;
                    m.value = fx;
                }
            }
            None => minima.push(Minimum { params: x, value: fx }),
        }
    }
    minima.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(MinimizeOutcome { minima, global: 0 })
}

/// Minimize a 1-D functional on `[lo, hi]`.
pub fn minimize_1d<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    grid_n: usize,
    tol: f64,
) -> Result<MinimizeOutcome, SolveError> {
    minimize_grid(|p| f(p[0]), &[[lo, hi]], grid_n, tol)
}

/// Minimize a 2-D functional on a rectangle.
pub fn minimize_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    boxes: [[f64; 2]; 2],
    grid_n: usize,
    tol: f64,
) -> Result<MinimizeOutcome, SolveError> {
    minimize_grid(|p| f(p[0], p[1]), &boxes, grid_n, tol)
}

// ---------------------------------------------------------------------------
// solve()
// ---------------------------------------------------------------------------

/// Instance normalization bookkeeping: the transforms applied to reach the
/// canonical frame, undone on every output path.
#[derive(Debug, Clone, Copy)]
struct Frame {
    swapped: bool,
    flipped: bool,
    rotation: f64,
    mirrored: bool,
}

impl Frame {
    fn restore(&self, path: GeodesicPath, surface: &Surface) -> GeodesicPath {
        let mut p = path;
        if self.mirrored {
            p = p.mirrored(surface);
        }
        p = p.rotated(surface, self.rotation);
        if self.flipped {
            p = p.flipped_can(surface);
        }
        if self.swapped {
            p = p.reversed(surface);
        }
        p
    }
}

/// Fold rim points onto the side chart so family enumeration sees only
/// Side / Lid / Base faces.
fn fold_rim(p: &SurfacePoint, surface: &Surface) -> SurfacePoint {
    match (p.face, surface.kind()) {
        (Face::Rim1, SurfaceKind::Can) => SurfacePoint::side_can(p.angle, surface.height()),
        (Face::Rim2, SurfaceKind::Can) => SurfacePoint::side_can(p.angle, 0.0),
        (Face::Rim1, SurfaceKind::Cup) => SurfacePoint::side_cup(p.angle, surface.slant()),
        _ => *p,
    }
}

fn flip_point_can(p: &SurfacePoint, h: f64) -> SurfacePoint {
    match p.face {
        Face::Side => SurfacePoint::side_can(p.angle, h - p.height_or_slant),
        Face::Lid => SurfacePoint::base(p.angle, p.radial),
        Face::Base => SurfacePoint::lid(p.angle, p.radial),
        Face::Rim1 => SurfacePoint::rim2(p.angle),
        Face::Rim2 => SurfacePoint::rim1(p.angle),
        Face::LidCenter => SurfacePoint::base_center(),
        Face::BaseCenter => SurfacePoint::lid_center(),
        Face::Apex => unreachable!("apex on a can"),
    }
}

/// Canonical ordering of a folded face pair; returns (swap, flip).
fn pair_order(fa: Face, fb: Face) -> (bool, bool) {
    match (fa, fb) {
        (Face::Side, Face::Side) => (false, false),
        (Face::Side, Face::Lid) => (false, false),
        (Face::Lid, Face::Side) => (true, false),
        (Face::Side, Face::Base) => (false, true),
        (Face::Base, Face::Side) => (true, true),
        (Face::Lid, Face::Lid) => (false, false),
        (Face::Base, Face::Base) => (false, false),
        (Face::Lid, Face::Base) => (false, false),
        (Face::Base, Face::Lid) => (true, false),
        (a, b) => panic!("unexpected folded pair {a:?}/{b:?}"),
    }
}

/// A minimal-path key for deduplication: segments compared by face,
/// 3-D endpoints, and (on side charts, where winding matters) the sweep.
fn paths_equal(p: &GeodesicPath, q: &GeodesicPath, surface: &Surface, eps: f64) -> bool {
    if p.segments.len() != q.segments.len() {
        return false;
    }
    p.segments.iter().zip(&q.segments).all(|(s, t)| {
        s.face == t.face
            && dist3(&embed3d(&s.start, surface), &embed3d(&t.start, surface)) <= eps
            && dist3(&embed3d(&s.end, surface), &embed3d(&t.end, surface)) <= eps
            && (s.face != Face::Side || (s.sweep - t.sweep).abs() <= eps)
    })
}

fn defect_of(path: &GeodesicPath, surface: &Surface) -> f64 {
    match straightness_defect(path, surface) {
        Ok(d) => d,
        Err(FlatModelError::SingleSegment) => 0.0,
        Err(_) => f64::NAN,
    }
}

/// Find all minimal paths between two points on the surface.
pub fn solve(
    surface: &Surface,
    a_raw: &SurfacePoint,
    b_raw: &SurfacePoint,
    config: &SolveConfig,
) -> Result<SolveReport, SolveError> {
    let a0 = classify(a_raw, surface)?;
    let b0 = classify(b_raw, surface)?;
    if dist3(&embed3d(&a0, surface), &embed3d(&b0, surface)) < 1e-13 {
        return Err(SolveError::SamePoint);
    }

    // Axial endpoints: the profile path in any half-plane is minimal. With
    // both endpoints axial there is one such path per half-plane.
    if a0.is_axial() && b0.is_axial() {
        let path = half_plane_path(surface, &a0, &b0);
        let len = path.total_length;
        let defect = defect_of(&path, surface);
        return Ok(SolveReport {
            min_length: len,
            multiplicity: Multiplicity::InfiniteFamily(
                "both endpoints are axial: one minimal path in every half-plane".into(),
            ),
            paths: vec![ReportedPath {
                family: FamilyId::HalfPlane,
                length: len,
                straightness_defect: defect,
                path,
            }],
            per_family: vec![FamilyOutcome {
                family: FamilyId::HalfPlane,
                min: len,
                argmin: vec![],
            }],
            near_tie: vec![],
            diagnostics: vec![],
        });
    }

    let gap = angle_gap(&a0, &b0);
    let one_axial = a0.is_axial() || b0.is_axial();
    if one_axial || gap.theta <= 0.0 {
        // shared half-plane: the profile path is the unique minimal path
        let path = half_plane_path(surface, &a0, &b0);
        let len = path.total_length;
        let defect = defect_of(&path, surface);
        let diagnostics = if defect.is_nan() || defect > config.straightness_tol {
            vec![format!("half-plane path straightness defect {defect}")]
        } else {
            vec![]
        };
        return Ok(SolveReport {
            min_length: len,
            multiplicity: Multiplicity::Finite(1),
            paths: vec![ReportedPath {
                family: FamilyId::HalfPlane,
                length: len,
                straightness_defect: defect,
                path,
            }],
            per_family: vec![FamilyOutcome {
                family: FamilyId::HalfPlane,
                min: len,
                argmin: vec![],
            }],
            near_tie: vec![],
            diagnostics,
        });
    }

    // ---- normalized frame -------------------------------------------------
    let mut a1 = fold_rim(&a0, surface);
    let mut b1 = fold_rim(&b0, surface);
    let (swapped, flipped) = pair_order(a1.face, b1.face);
    if swapped {
        std::mem::swap(&mut a1, &mut b1);
    }
    if flipped {
        let h = surface.height();
        a1 = flip_point_can(&a1, h);
        b1 = flip_point_can(&b1, h);
    }
    let rotation = a1.angle;
    let a2 = a1.rotated(-rotation);
    let mut b2 = b1.rotated(-rotation);
    let g2 = angle_gap(&a2, &b2);
    if g2.mirror_flag {
        b2 = b2.mirrored();
    }
    let theta = g2.theta;
    let frame = Frame {
        swapped,
        flipped,
        rotation,
        mirrored: g2.mirror_flag,
    };
    let diaxial = (PI - theta).abs() <= config.tie_tol;

    // ---- minimize every applicable family ---------------------------------
    let mut families = enumerate_families(surface, &a2, &b2, theta, config.lid_base_convention);
    families.sort_by_key(|f| f.id);
    let mut per_family: Vec<FamilyOutcome> = Vec::new();
    let mut candidates: Vec<(FamilyId, Minimum)> = Vec::new();
    for fam in &families {
        let outcome = minimize_family(fam, config)?;
        per_family.push(FamilyOutcome {
            family: fam.id,
            min: outcome.minima[0].value,
            argmin: outcome.minima[0].params.clone(),
        });
        for m in outcome.minima {
            candidates.push((fam.id, m));
        }
    }
    let min_length = per_family
        .iter()
        .map(|o| o.min)
        .fold(f64::INFINITY, f64::min);

    // ---- collect, rebuild, mirror-double, dedupe ---------------------------
    let mut paths: Vec<ReportedPath> = Vec::new();
    let dedupe_eps = (10.0 * config.param_tol).max(1e-8);
    for (id, m) in candidates
        .iter()
        .filter(|(_, m)| m.value <= min_length + config.tie_tol)
    {
        let fam = families.iter().find(|f| f.id == *id).unwrap();
        let built = fam.rebuild(&m.params)?;
        let mut variants = vec![built.clone()];
        if diaxial {
            let mirrored = built.mirrored(surface);
            if !paths_equal(&built, &mirrored, surface, dedupe_eps) {
                variants.push(mirrored);
            }
        }
        for v in variants {
            if paths
                .iter()
                .any(|rp| paths_equal(&rp.path, &v, surface, dedupe_eps))
            {
                continue;
            }
            paths.push(ReportedPath {
                family: *id,
                length: v.total_length,
                straightness_defect: f64::NAN, // filled after restore
                path: v,
            });
        }
    }

    // ---- restore original coordinates --------------------------------------
    for rp in &mut paths {
        let restored = frame.restore(rp.path.clone(), surface);
        rp.length = restored.total_length;
        rp.straightness_defect = defect_of(&restored, surface);
        rp.path = restored;
    }
    paths.sort_by(|x, y| {
        x.family
            .cmp(&y.family)
            .then(x.path.segments.len().cmp(&y.path.segments.len()))
            .then_with(|| {
                let kx = x.path.crossings.first().map(|c| c.angle).unwrap_or(-1.0);
                let ky = y.path.crossings.first().map(|c| c.angle).unwrap_or(-1.0);
                kx.total_cmp(&ky)
            })
    });

    let near_tie: Vec<FamilyId> = per_family
        .iter()
        .filter(|o| o.min > min_length + config.tie_tol && o.min <= min_length + 10.0 * config.tie_tol)
        .map(|o| o.family)
        .collect();

    // ---- post-hoc invariants ------------------------------------------------
    let mut diagnostics = Vec::new();
    let bound = match surface.kind() {
        SurfaceKind::Can => 4,
        SurfaceKind::Cup => 3,
    };
    if paths.len() > bound {
        diagnostics.push(format!(
            "{} minimal paths exceed the {} bound for this surface",
            paths.len(),
            bound
        ));
    }
    for rp in &paths {
        if rp.straightness_defect.is_nan() || rp.straightness_defect > config.straightness_tol {
            diagnostics.push(format!(
                "path in family {:?} has straightness defect {}",
                rp.family, rp.straightness_defect
            ));
        }
        if (rp.length - min_length).abs() > config.tie_tol {
            diagnostics.push(format!(
                "path in family {:?} length {} drifts from min {}",
                rp.family, rp.length, min_length
            ));
        }
    }

    Ok(SolveReport {
        min_length,
        multiplicity: Multiplicity::Finite(paths.len()),
        paths,
        per_family,
        near_tie,
        diagnostics,
    })
}

fn minimize_family(
    fam: &CandidateFamily,
    config: &SolveConfig,
) -> Result<MinimizeOutcome, SolveError> {
    let dim = fam.dim();
    if dim == 0 {
        let value = fam.length(&[])?;
        return Ok(MinimizeOutcome {
            minima: vec![Minimum {
                params: vec![],
                value,
            }],
            global: 0,
        });
    }
    let boxes: Vec<[f64; 2]> = (0..dim).map(|_| [0.0, fam.theta]).collect();
    let grid_n = if dim >= 3 {
        config.grid_n_3d
    } else {
        config.grid_n
    };
    let f = |p: &[f64]| fam.length(p).expect("family evaluation inside its box");
    let mut out = minimize_grid(f, &boxes, grid_n, config.param_tol)?;
    for m in &mut out.minima {
        polish_minimum(fam, m);
    }
    out.minima.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(out)
}

/// Value-only search cannot resolve an argmin past `sqrt(eps * f / f'')`
/// (about 1e-7 here), which leaves rebuilt paths visibly bent at the
/// crossings. This projected-Newton polish drives the analytic gradient to
/// ~1e-13 and snaps parameters onto the box boundary where that does not
/// cost length, so boundary optima (and hence planar paths) come out exact.
fn polish_minimum(fam: &CandidateFamily, m: &mut Minimum) {
    let dim = fam.dim();
    if dim == 0 {
        return;
    }
    let hi = fam.theta;
    let eval = |p: &[f64]| fam.length(p).unwrap_or(f64::INFINITY);
    let mut p = m.params.clone();
    let mut fp = m.value;
    'newton: for _ in 0..40 {
        let g = match fam.gradient(&p) {
            Some(g) => g,
            None => break,
        };
        let mut projected = g.clone();
        for k in 0..dim {
            if (p[k] <= 1e-14 && g[k] > 0.0) || (p[k] >= hi - 1e-14 && g[k] < 0.0) {
                projected[k] = 0.0;
            }
        }
        let gnorm = projected.iter().map(|x| x * x).sum::<f64>().sqrt();
        if gnorm < 1e-13 {
            break;
        }
        // Hessian by central differences of the analytic gradient
        let fd = 1e-6;
        let mut hess = [[0.0f64; 3]; 3];
        for i in 0..dim {
            let mut pp = p.clone();
            let mut pm = p.clone();
            pp[i] = (pp[i] + fd).min(hi);
            pm[i] = (pm[i] - fd).max(0.0);
            let span = pp[i] - pm[i];
            if span < 1e-9 {
                break 'newton;
            }
            let (gp, gm) = match (fam.gradient(&pp), fam.gradient(&pm)) {
                (Some(a), Some(b)) => (a, b),
                _ => break 'newton,
            };
            for j in 0..dim {
                hess[i][j] = (gp[j] - gm[j]) / span;
            }
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let s = 0.5 * (hess[i][j] + hess[j][i]);
                hess[i][j] = s;
                hess[j][i] = s;
            }
        }
        let mut lambda = 0.0f64;
        let mut stepped = false;
        for _attempt in 0..10 {
            let mut a = hess;
            for (i, row) in a.iter_mut().enumerate().take(dim) {
                row[i] += lambda;
            }
            if let Some(d) = solve_small(&mut a, &g, dim) {
                let mut alpha = 1.0f64;
                for _bt in 0..25 {
                    let mut cand = p.clone();
                    for k in 0..dim {
                        cand[k] = (p[k] - alpha * d[k]).clamp(0.0, hi);
                    }
                    let fc = eval(&cand);
                    // flat-bottom tolerance: accept non-increase up to noise
                    if fc <= fp + 4.0 * f64::EPSILON * fp.abs() {
                        let moved: f64 = cand
                            .iter()
                            .zip(&p)
                            .map(|(x, y)| (x - y).abs())
                            .fold(0.0, f64::max);
                        p = cand;
                        fp = fc.min(fp);
                        stepped = true;
                        if moved < 1e-14 {
                            break 'newton;
                        }
                        break;
                    }
                    alpha *= 0.5;
                }
                if stepped {
                    break;
                }
            }
            lambda = if lambda == 0.0 { 1e-8 } else { lambda * 100.0 };
        }
        if !stepped {
            break;
        }
    }
    // boundary snap: a parameter within 1e-6 of the box edge that can sit
    // on the edge at no cost belongs on the edge
    for k in 0..dim {
        for bnd in [0.0, hi] {
            if p[k] != bnd && (p[k] - bnd).abs() < 1e-6 {
                let mut cand = p.clone();
                cand[k] = bnd;
                let fc = eval(&cand);
                if fc <= fp + 1e-13 {
                    p = cand;
                    fp = fc.min(fp);
                }
            }
        }
    }
    let refreshed = eval(&p);
    m.params = p;
    m.value = refreshed.min(fp);
}

/// Gaussian elimination with partial pivoting for n <= 3; solves `a x = b`.
fn solve_small(a: &mut [[f64; 3]; 3], b: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut x = [0.0f64; 3];
    x[..n].copy_from_slice(&b[..n]);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        x.swap(col, piv);
        for row in (col + 1)..n {
            let m = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= m * a[col][k];
            }
            x[row] -= m * x[col];
        }
    }
    for col in (0..n).rev() {
        for k in (col + 1)..n {
            x[col] -= a[col][k] * x[k];
        }
        x[col] /= a[col][col];
        if !x[col].is_finite() {
            return None;
        }
    }
    Some(x[..n].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn can(h: f64) -> Surface {
        Surface::can(h).unwrap()
    }
    fn cup(s: f64) -> Surface {
        Surface::cup(s).unwrap()
    }
    fn cfg() -> SolveConfig {
        SolveConfig::default()
    }

    #[test]
    fn golden_finds_quadratic_minimum() {
        let (x, v) = golden_section_min(|x| (x - 0.2) * (x - 0.2), -1.0, 1.0, 1e-12);
        assert!((x - 0.2).abs() < 1e-10);
        assert!(v < 1e-18);
    }

    #[test]
    fn minimize_1d_known_functions() {
        let out = minimize_1d(|t| t * t, 0.0, 1.0, 128, 1e-12).unwrap();
        assert!(out.minima[0].params[0].abs() < 1e-10);
        let out = minimize_1d(|t| t.cos(), 0.0, PI, 128, 1e-12).unwrap();
        assert!((out.minima[0].params[0] - PI).abs() < 1e-9);
        assert!((out.minima[0].value + 1.0).abs() < 1e-12);
        assert!(matches!(
            minimize_1d(|t| t, 1.0, 0.0, 16, 1e-12),
            Err(SolveError::EmptyBox(_, _))
        ));
    }

    #[test]
    fn minimize_1d_matches_dense_scan_on_side_to_lid() {
        let (a, b, theta) = (1.0, 0.5, PI / 2.0);
        let f = |t: f64| crate::families::can_side_to_lid_length(a, b, theta, t).unwrap();
        let out = minimize_1d(f, 0.0, theta, 512, 1e-12).unwrap();
        let n = 10_000_000usize;
        let mut best = f64::INFINITY;
        for i in 0..=n {
            let t = theta * i as f64 / n as f64;
            best = best.min(f(t));
        }
        assert!((out.minima[0].value - best).abs() < 1e-6);
        assert!(out.minima[0].value <= best + 1e-12);
    }

    #[test]
    fn minimize_2d_quadratic_and_symmetry() {
        let out = minimize_2d(
            |t, u| (t - 1.0) * (t - 1.0) + (u - 2.0) * (u - 2.0),
            [[0.0, 3.0], [0.0, 3.0]],
            64,
            1e-12,
        )
        .unwrap();
        assert!((out.minima[0].params[0] - 1.0).abs() < 1e-9);
        assert!((out.minima[0].params[1] - 2.0).abs() < 1e-9);

        // swap symmetry pins the argmin to the diagonal when a = b
        let (a, theta) = (0.8, 2.8);
        let f = |t: f64, u: f64| {
            crate::families::can_side_over_lid_length(a, a, theta, t, u).unwrap()
        };
        let out = minimize_2d(f, [[0.0, theta], [0.0, theta]], 256, 1e-12).unwrap();
        let m = &out.minima[0];
        assert!(
            (m.params[0] - m.params[1]).abs() < 1e-6,
            "asymmetric argmin {:?}",
            m.params
        );
    }

    #[test]
    fn mid_circle_over_lid_min_equals_side_direct() {
        // at the mid-circle critical height the over-lid minimum ties the
        // straight side geodesic of length pi
        let h = PI - 2.0;
        let a = h / 2.0;
        let f = |t: f64, u: f64| {
            crate::families::can_side_over_lid_length(a, a, PI, t, u).unwrap()
        };
        let out = minimize_2d(f, [[0.0, PI], [0.0, PI]], 512, 1e-12).unwrap();
        assert!(
            (out.minima[0].value - PI).abs() < 1e-9,
            "over-lid min {}",
            out.minima[0].value
        );
    }

    #[test]
    fn opposite_rims_critical_multiplicity() {
        let h = (PI * PI - 4.0) / 4.0;
        let a = SurfacePoint::rim1(0.0);
        let b = SurfacePoint::rim2(PI);
        let rep = solve(&can(h), &a, &b, &cfg()).unwrap();
        assert!((rep.min_length - (PI * PI + 4.0) / 4.0).abs() < 1e-9);
        assert_eq!(rep.multiplicity, Multiplicity::Finite(4));
        assert!(rep.diagnostics.is_empty(), "{:?}", rep.diagnostics);

        // slightly short can: over-lid and over-base only
        let rep = solve(&can(h * (1.0 - 1e-3)), &a, &b, &cfg()).unwrap();
        assert_eq!(rep.multiplicity, Multiplicity::Finite(2));
        for p in &rep.paths {
            assert!(p.path.segments.iter().any(|s| s.face != Face::Side));
        }
        // slightly tall can: two side helices
        let rep = solve(&can(h * (1.0 + 1e-3)), &a, &b, &cfg()).unwrap();
        assert_eq!(rep.multiplicity, Multiplicity::Finite(2));
        for p in &rep.paths {
            assert!(p.path.segments.iter().all(|s| s.face == Face::Side));
        }
    }

    #[test]
    fn tall_can_two_side_paths() {
        let rep = solve(
            &can(2.0),
            &SurfacePoint::rim1(0.0),
            &SurfacePoint::rim2(PI),
            &cfg(),
        )
        .unwrap();
        assert_eq!(rep.multiplicity, Multiplicity::Finite(2));
        assert!((rep.min_length - (4.0 + PI * PI).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn cup_three_path_instance() {
        // s=2, a=1.5 pairs with b=2 (the rim) at common length 2.5
        let rep = solve(
            &cup(2.0),
            &SurfacePoint::side_cup(0.0, 1.5),
            &SurfacePoint::rim1(PI),
            &cfg(),
        )
        .unwrap();
        assert!((rep.min_length - 2.5).abs() < 1e-9, "{}", rep.min_length);
        assert_eq!(rep.multiplicity, Multiplicity::Finite(3));
        assert!(rep.diagnostics.is_empty(), "{:?}", rep.diagnostics);
    }

    #[test]
    fn axial_pair_reports_infinite_family() {
        let rep = solve(
            &can(1.3),
            &SurfacePoint::lid_center(),
            &SurfacePoint::base_center(),
            &cfg(),
        )
        .unwrap();
        assert!((rep.min_length - 3.3).abs() < 1e-12);
        assert!(matches!(rep.multiplicity, Multiplicity::InfiniteFamily(_)));
        assert_eq!(rep.paths.len(), 1);

        let rep = solve(
            &cup(2.0),
            &SurfacePoint::apex(),
            &SurfacePoint::lid_center(),
            &cfg(),
        )
        .unwrap();
        assert!((rep.min_length - 3.0).abs() < 1e-12);
        assert!(matches!(rep.multiplicity, Multiplicity::InfiniteFamily(_)));
    }

    #[test]
    fn half_plane_unique_path() {
        // same half-plane, one non-axial: exactly one path
        let rep = solve(
            &can(2.0),
            &SurfacePoint::side_can(1.0, 0.3),
            &SurfacePoint::lid(1.0, 0.4),
            &cfg(),
        )
        .unwrap();
        assert_eq!(rep.multiplicity, Multiplicity::Finite(1));
        assert!((rep.min_length - (1.7 + 0.6)).abs() < 1e-12);

        let rep = solve(
            &cup(2.0),
            &SurfacePoint::apex(),
            &SurfacePoint::side_cup(2.7, 1.1),
            &cfg(),
        )
        .unwrap();
        assert_eq!(rep.multiplicity, Multiplicity::Finite(1));
        assert!((rep.min_length - 1.1).abs() < 1e-12);
    }

    #[test]
    fn same_point_rejected() {
        assert!(matches!(
            solve(
                &can(1.0),
                &SurfacePoint::lid(0.3, 1.0),
                &SurfacePoint::rim1(0.3),
                &cfg()
            ),
            Err(SolveError::SamePoint)
        ));
    }

    #[test]
    fn exchange_invariance() {
        let surface = can(1.4);
        let a = SurfacePoint::side_can(0.5, 0.2);
        let b = SurfacePoint::lid(2.9, 0.55);
        let r1 = solve(&surface, &a, &b, &cfg()).unwrap();
        let r2 = solve(&surface, &b, &a, &cfg()).unwrap();
        assert!((r1.min_length - r2.min_length).abs() < 1e-12);
        assert_eq!(r1.paths.len(), r2.paths.len());
    }

    #[test]
    fn mirror_invariance() {
        let surface = cup(1.8);
        let a = SurfacePoint::side_cup(1.0, 0.9);
        let b = SurfacePoint::side_cup(1.0 + 2.2, 1.5);
        let b_reflected = SurfacePoint::side_cup(1.0 - 2.2, 1.5);
        let r1 = solve(&surface, &a, &b, &cfg()).unwrap();
        let r2 = solve(&surface, &a, &b_reflected, &cfg()).unwrap();
        assert!((r1.min_length - r2.min_length).abs() < 1e-12);
    }

    #[test]
    fn lid_to_base_solve_is_sane() {
        let surface = can(1.5);
        let a = SurfacePoint::lid(0.0, 0.7);
        let b = SurfacePoint::base(2.0, 0.4);
        let rep = solve(&surface, &a, &b, &cfg()).unwrap();
        assert!(rep.diagnostics.is_empty(), "{:?}", rep.diagnostics);
        assert_eq!(rep.per_family.len(), 1);
        assert_eq!(rep.per_family[0].family, FamilyId::CanLidToBase);
        // the paper-literal convention reaches the same minimum
        let mut c2 = cfg();
        c2.lid_base_convention = LidBaseConvention::PaperLiteral;
        let rep2 = solve(&surface, &a, &b, &c2).unwrap();
        assert!((rep.min_length - rep2.min_length).abs() < 1e-9);
    }

    #[test]
    fn rim_endpoint_chord_beats_side() {
        // two rim points: the lid chord always beats the rim arc
        let rep = solve(
            &can(3.0),
            &SurfacePoint::rim1(0.0),
            &SurfacePoint::rim1(2.0),
            &cfg(),
        )
        .unwrap();
        assert!((rep.min_length - 2.0 * f64::sin(1.0)).abs() < 1e-9);
        assert_eq!(rep.multiplicity, Multiplicity::Finite(1));
    }
}
