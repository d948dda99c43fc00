//! Elastic inner product vector spaces for time series and sequences.
//!
//! Non-uniformly sampled, variable-length multivariate time series form a
//! vector space under timestamp-merging addition and elementwise scaling.
//! This crate equips that space with a recursively defined *elastic inner
//! product* whose stiffness parameter interpolates between order-insensitive
//! matching (stiffness 0) and rigid Euclidean matching (large stiffness),
//! and builds on it:
//!
//! - norm and metric induced by the inner product ([`eip_norm`],
//!   [`eip_distance`]);
//! - a precomputed elastic-matrix index that answers inner-product queries
//!   over a corpus in linear time per item ([`index::ElasticIndex`]);
//! - positive definite kernels and an empirical PSD checker
//!   ([`kernels`]);
//! - Gram-Schmidt orthogonalization inside the elastic space ([`ortho`]);
//! - an elastic cosine similarity for symbolic sequences that degenerates to
//!   tf / tf-idf cosine at stiffness 0 ([`seq`]);
//! - a classification and timing benchmark harness ([`eval`]).

pub mod eigen;
pub mod elastic;
pub mod error;
pub mod eval;
pub mod index;
pub mod io;
pub mod kernels;
pub mod matrix;
pub mod nested;
pub mod ortho;
pub mod seq;
pub mod series;

pub use elastic::{
    eip, eip_distance, eip_distance_direct, eip_norm, elastic_product, find_additivity_violation,
    ElasticParams, SpatialProduct, TimeKernel,
};
pub use error::{Error, Result};
pub use series::{validate, LabeledDataset, Membership, MembershipReport, Sample, Split, TimeSeries};
