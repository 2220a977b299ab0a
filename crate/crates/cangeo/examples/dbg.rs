use cangeo::geometry::*;
use cangeo::oracle::*;
use std::f64::consts::PI;
use std::time::Instant;
fn main() {
    let surface = Surface::can(1.3).unwrap();
    let coarse = build_mesh(&surface, 64);
    let mesh = build_mesh(&surface, 512);
    let queries = [
        (SurfacePoint::rim1(0.0), SurfacePoint::rim2(PI)),
        (SurfacePoint::side_can(0.3, 0.2), SurfacePoint::lid(2.0, 0.5)),
        (SurfacePoint::side_can(1.0, 1.1), SurfacePoint::side_can(4.0, 0.1)),
        (SurfacePoint::lid(0.0, 0.55), SurfacePoint::base(2.9, 0.8)),
    ];
    for (a, b) in queries {
        let t = Instant::now();
        let u = mesh_distance(&coarse, &a, &b).unwrap();
        let tc = t.elapsed();
        let t = Instant::now();
        let d = mesh_distance_bounded(&mesh, &a, &b, Some(u)).unwrap();
        println!("coarse {:?} (u={:.9}) fine {:?}: d = {:.9}", tc, u, t.elapsed(), d);
    }
}
