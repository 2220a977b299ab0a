//! Shortest paths on a closed cylinder ("soup can") and a closed cone
//! ("conical cup"), both with unit rim radius.
//!
//! The surfaces are flat away from their rims (and the cup apex), so every
//! minimal path unrolls to straight segments in a planar layout of the
//! faces. This crate enumerates the closed-form candidate families for a
//! pair of points, minimizes each family over its parameter box, detects
//! ties, and classifies how many distinct minimal paths exist. A
//! triangulated-mesh Dijkstra engine provides an independent upper-bound
//! cross-check, and the flat-model module renders layouts and paths as SVG.

pub mod cli;
pub mod critical;
pub mod families;
pub mod flatmodel;
pub mod geometry;
pub mod oracle;
pub mod roulette;
pub mod solver;

pub use geometry::{AngleGap, Face, Surface, SurfaceKind, SurfacePoint};
pub use solver::{Multiplicity, SolveConfig, SolveReport};
