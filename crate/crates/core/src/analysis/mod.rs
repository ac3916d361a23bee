//! Stationary points of the mean field: location, classification, spectral
//! stability, and the structural conditions the convergence results rely on.

mod bipartite;
mod stationary;
mod structure;
mod zeros;

pub use bipartite::{is_bipartite, Bipartition};
pub use stationary::{
    classify_zero, jacobian_f, noise_excitation, residual, stability_of, Stability, StationaryPoint, ZeroClass,
    SPEC_TOL, SUPPORT_TOL, ZERO_TOL,
};
pub use structure::{
    check_lopg, check_rosen, exact_potential, local_max_check, rosen_matrix, FnPotential, LopgReport,
    PotentialFunction, QuadraticPublicGoodPotential, RosenDecomposition, RosenReport, RosenWitness, SearchPotential,
};
pub use zeros::{find_zeros, find_zeros_with, ZeroCatalog, ZeroCluster, ZeroSearchConfig};
