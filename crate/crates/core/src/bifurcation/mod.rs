//! Local bifurcations: the fold of interior equilibria at `lam = lam_SN`
//! (with its cusp point at `s = s0`) and Hopf bifurcations on the interior
//! branches as `s` varies.

mod hopf;
mod saddle_node;
mod taylor;

pub use hopf::{
    first_lyapunov, first_lyapunov_at, hopf_analysis, hopf_detect, hopf_detect_at, mu,
    planar_lyapunov, rotated_coefficient, HopfDirection, HopfReport, LyapunovResult, L1_TOL,
};
pub use saddle_node::{
    cusp_check, saddle_node_type, sotomayor_saddle_node, CuspReport, CuspVerdict, SaddleNodeReport,
    SaddleNodeType, SotomayorCheck, NONDEGENERACY_TOL,
};
pub use taylor::{taylor_at, PlanarPoly, Poly3, TaylorCoeffs};
