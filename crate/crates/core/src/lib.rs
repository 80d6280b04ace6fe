//! Quantum state tomography on a truncated Fock space from rotated-quadrature
//! statistics.
//!
//! The reconstruction is driven by the Dawson-integral pattern functions
//! `f^(m) = 2·daw^(m+1)`: angular Fourier coefficients of the expectations
//! `E_θ[f^(k+2l)]` form, for every off-diagonal offset `k`, a lower-triangular
//! system whose forward substitution yields `⟨l|ρ|l+k⟩`.
//!
//! Module map:
//!
//! * [`fock`]: Hermite functions, Gauss–Hermite quadrature, ladder operators,
//!   density matrices and exact quadrature densities.
//! * [`special`]: Dawson's integral, its derivative ladder, pattern functions
//!   and the closed-form integrals behind the matrix-element identities.
//! * [`tomography`]: angular coefficients, pattern systems and reconstruction.
//! * [`sim`]: state constructors, inverse-CDF sampling, expectation tables.
//! * [`phase_space`]: Wigner (direct and filtered back-projection), Husimi and
//!   the Weyl-operator zero scan.
//! * [`verify`]: the matrix-element identity suites shared by the CLI and tests.
//! * [`cli`]: reproducible command runs.

pub mod cli;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod phase_space;
pub mod sim;
pub mod special;
pub mod tomography;
pub mod verify;

pub use error::{Error, Result, Warning};
pub use fock::{
    hermite_function, matrix_element, operator_matrix, quadrature_pdf, DensityMatrix, FockConfig,
    HermiteTable, LadderOperators, QuadratureDistribution,
};
pub use special::{dawson, dawson_derivative, pattern_function, DawsonEvaluator};
pub use tomography::{reconstruct, AngleGrid, PatternSystem, QuadratureData, ReconstructionResult};

pub use num_complex::Complex64;
