//! Exact lognormal field sampling on uniform grids by circulant embedding,
//! with multilinear interpolation and nested coarse-grid restriction.

mod embedding;
mod grid;
mod realization;

pub use embedding::{build_embedding, sample_field, CirculantEmbedding, EmbeddingOptions};
pub use grid::UniformGrid;
pub use realization::FieldRealization;
