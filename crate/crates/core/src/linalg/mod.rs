//! Dense complex linear algebra and reference oracles.

pub mod cartesian;
pub mod eigen;
pub mod expm;
pub mod io;
pub mod matrix;
pub mod schur;
pub mod testmat;

pub use cartesian::{cartesian_decompose, dissipativity_check, CartesianParts, Dissipativity};
pub use eigen::{hermitian_eigen, hermitian_evolution, spectral_norm, HermitianEigenSystem};
pub use expm::general_expm;
pub use matrix::{inner, vec_norm, vec_sub, ComplexMatrix};
pub use testmat::{matrix_function_oracle, DiagonalizableTestMatrix};
