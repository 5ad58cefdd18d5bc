//! Exact-arithmetic non-commutative rank for matrix spaces and quiver
//! representations: tensor blow-ups, Wong sequences, minimal shrunk
//! subspaces, optimal semistability witnesses, and non-commutative hom/ext.
//!
//! Everything runs over a prime field with a runtime modulus or over the
//! rationals; all results come with certificates that are re-checkable by
//! independent code paths.

pub mod error;
pub mod field;
pub mod homext;
pub mod matrix;
pub mod matspace;
pub mod oracle;
pub mod quiver;
pub mod reduction;
pub mod rep;
pub mod rng;
pub mod subspace;

pub use error::{Error, Result};
pub use field::{Field, FieldSpec, PrimeField, Rationals};
pub use homext::{
    build_hom_space, generic_hom_sample, hom_ext_target, ncext, ncext_fixed_source, nchom,
    HomMapSpace,
};
pub use matrix::Matrix;
pub use matspace::{MatrixSpace, NcrkConfig, ShrunkCertificate};
pub use quiver::{euler_form, sigma_value, DimensionVector, Path, Quiver, Weight};
pub use reduction::{
    augmented_witness, build_sigma_space, optimal_witness, saturate_shrunk, witness_lattice_ops,
    BlockStructure, WitnessReport,
};
pub use rep::{factor_dims, is_subrep, subrep_closure, Representation, Subrep};
pub use subspace::{apply_image, preimage, Subspace};
