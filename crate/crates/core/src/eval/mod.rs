//! Evaluations over encoded vectors: sparsity/reconstruction tradeoff,
//! 3CosAdd analogies, word intrusion question generation, and bag-of-words
//! logistic regression.

pub mod analogy;
pub mod classify;
pub mod intrusion;
pub mod tradeoff;

pub use analogy::{analogy_eval, AnalogyQuestion, AnalogyReport, AnalogyVectors};
pub use classify::{
    bow_features, load_documents, train_logreg, BowClassifier, Dataset, FeatureSpace, LogRegConfig,
};
pub use intrusion::{generate_intrusion_questions, IntrusionQuestion};
pub use tradeoff::{tradeoff_curve, TradeoffPoint};
