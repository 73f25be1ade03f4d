//! Discrete Plateau problem for Finsler area on disk-type surfaces.

pub mod curve;
pub mod energy;
pub mod io;
pub mod mesh;
pub mod solver;

pub use curve::{finsler_length, BoundaryCurve, CurveShape, PeriodicSpline};
pub use energy::{
    conformality_defect, discrete_dirichlet, discrete_finsler_area, finsler_area_gradient,
};
pub use io::{read_obj_vertices, read_points, save_obj, write_obj};
pub use mesh::{generate_disk_mesh, DiskMesh};
pub use solver::{
    initial_surface, isoperimetric_check, solve, IsoperimetricVerdict, SolveConfig, SolveResult,
    StageTrace,
};
