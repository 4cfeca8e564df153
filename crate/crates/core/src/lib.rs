//! Sparse word embeddings with inherently labeled dimensions.
//!
//! Pretrained dense embeddings are re-expressed as sparse linear
//! combinations of a basis drawn from the embeddings themselves: 11
//! orthonormalized grammatical direction vectors (principal component,
//! capitalization and part-of-speech means, inflection differences) plus a
//! few thousand greedily selected word vectors. Every sparse dimension
//! therefore carries a natural-language or grammatical label.
//!
//! Pipeline: [`grammar::GrammarBasis::build`] constructs and orthonormalizes
//! the grammatical block; [`basis::BasisSet::build`] filters, deflates, and
//! greedily selects the word block; [`encode::encode`] projects a word onto
//! the grammatical basis, solves the L1-regularized fit over the word basis
//! with FISTA, clamps, and renormalizes. [`eval`] holds the
//! sparsity/reconstruction tradeoff, 3CosAdd analogies, intrusion question
//! generation, and bag-of-words logistic regression.

pub mod basis;
pub mod cli;
pub mod embedding;
pub mod encode;
pub mod error;
pub mod eval;
pub mod grammar;
pub mod lexicon;
pub mod math;
pub mod selection;
pub mod solver;
pub mod sparse_io;

pub use basis::{BasisSet, Manifest};
pub use embedding::EmbeddingSpace;
pub use encode::SparseEmbedding;
pub use error::{Error, Result};
pub use grammar::GrammarBasis;
pub use lexicon::Lexicon;
pub use solver::SolverConfig;
pub use sparse_io::SparseCollection;
