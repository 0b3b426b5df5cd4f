//! Spatial discretization: grids, the fractional Laplacian as a Fourier
//! multiplier, fractional Sobolev norms and the Hˢ ⊂ C⁰ embedding constant.

mod domain;
pub mod embedding;
mod field;
mod operator;

pub use domain::{BoundaryMode, Domain};
pub use embedding::{
    embedding_constant, embedding_constant_detailed, verify_embedding, EmbeddingConstant,
    EmbeddingReport,
};
pub use field::{inner, l2_norm, mask_exterior, mask_exterior_in_place, Field};
pub use operator::{
    apply_fractional_laplacian, apply_power, bilinear_s, build_operator, hs_norm, seminorm_s,
    wavenumber, SpectralOperator,
};
