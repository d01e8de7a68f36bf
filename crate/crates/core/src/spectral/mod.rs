//! Eigenstructure and Jordan structure of real matrices.

pub mod charpoly;
mod eigen;
mod jordan;

pub use eigen::{
    compute_eigenstructure, describe, geometric_multiplicity, left_eigenbasis, EigenKind, EigenStructure,
    EigenvalueGroup, RawSpectrum, Spectral,
};
pub use jordan::{
    block_sizes_from_weyr, jordan_block, jordan_structure, weyr_characteristic, JordanStructure,
};
