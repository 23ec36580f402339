//! Exact Betti numbers for point clouds, and a desk-scale classical
//! simulation of a continuous-variable quantum algorithm that estimates them.
//!
//! The crate is layered bottom-up:
//!
//! - [`geometry`]: point clouds and squared-distance tables.
//! - [`complex`]: simplices as bit words, Vietoris-Rips enumeration.
//! - [`homology`]: boundary maps, Dirac operator, Laplacians, exact Betti numbers.
//! - [`statevector`]: `n`-qubit states, the membership oracle, Grover
//!   amplification, sector tagging, and the distance-operator protocol.
//! - [`cvsim`]: homodyne phase estimation on the Dirac operator and the
//!   exponential-swap operator exponentiation.
//! - [`fockgates`]: dual-rail gate identities in a truncated Fock space.

pub mod complex;
pub mod error;
pub mod geometry;
pub mod fockgates;
pub mod homology;
pub mod cvsim;
pub mod statevector;

pub use complex::{
    enumerate_vr, membership, scale_from_index, FiltrationScale, SimplexBits, VietorisRipsComplex,
};
pub use error::{Error, Result};
pub use geometry::{
    load_point_cloud, normalize_to_unit_sphere, pairwise_sq_distances, simplex_diameter,
    CloudFormat, DistanceMatrix, PointCloud,
};
pub use homology::{
    betti_exact, betti_vector, boundary_matrix, dirac_operator, laplacian, BettiVector,
    BoundaryMatrix, DiracOperator, LaplacianBlock,
};
pub use cvsim::{
    eigendecompose, estimate_betti, sample_homodyne, spectral_distribution, trotterized_evolution,
    BettiEstimate, EigenDecomposition, EstimationMode, PhaseEstimationParams, SpectralDistribution,
    TrotterParams,
};
pub use fockgates::{appendix_sweep, AppendixReport, DualRailQubit, FockSpace, GateMatrix, SweepConfig};
pub use statevector::{
    build_initial_state, derive_distance_operator, grover_amplify, tag_sectors, Iterations,
    QuantumState, TaggedState,
};
