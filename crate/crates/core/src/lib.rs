//! Spherical Clifford analysis at desk scale.
//!
//! The crate builds the Clifford algebra `Cl_n` (negative-definite signature),
//! polynomials over it, truncated harmonic bases of `L^2(S^n)`, and dense
//! matrix realizations of the spherical Dirac-type operators together with
//! their Cauchy transforms and Pi-operators.  A quadrature layer realizes the
//! same transforms as singular integrals on `S^2`, and a fixed-point solver
//! drives the spherical Beltrami equations in either representation.
//!
//! Numerical policy: everything that can be exact is exact.  Basis
//! construction, differential operators and sphere integrals run over
//! arbitrary-precision rationals; floating point enters only when matrices
//! are assembled for eigen/SVD work.

pub mod basis;
pub mod beltrami;
pub mod clifford;
pub mod error;
pub mod fischer;
pub mod identities;
pub mod integrals;
pub mod mesh;
pub mod norms;
pub mod operators;
pub mod poly;
pub mod quadrature;
pub mod report;
pub mod scalar;
pub mod spaces;
pub mod spectra;

pub use basis::{BasisDescriptor, BasisElement, SphericalFunction, SubspaceTag};
pub use beltrami::{BeltramiMode, BeltramiProblem, BeltramiResult, BeltramiVariant};
pub use clifford::Multivector;
pub use error::CoreError;
pub use mesh::{CapMesh, MeshFunction};
pub use operators::{OperatorMatrix, OperatorTag};
pub use poly::{CliffordPolynomial, DiffOp};
pub use scalar::{Coeff, Q};
pub use spectra::SpectrumReport;
