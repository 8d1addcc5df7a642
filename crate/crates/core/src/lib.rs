//! Word-similarity relevance ranking toolkit.
//!
//! The crate ties together record ingestion, per-field weighted inverted
//! indexes, boolean field-query parsing and two interchangeable ranking
//! engines behind one bridge:
//!
//! - [`rank_vsm`] evaluates the whole weighted query against a shared set of
//!   field indexes and scores matches with a tf-idf cosine (vector space
//!   model).
//! - [`rank_prob`] runs every query unit against its own field index,
//!   aggregates unit results with OR semantics, honours exclusions and keeps
//!   the greatest score per record (probabilistic model).
//!
//! Both engines feed the same post-processing pipeline in [`bridge`]:
//! normalize scores to `[0, 100]`, merge unranked hitset members at score 0
//! and sort ascending by score. [`bench`] reproduces the scalability
//! procedure at desk scale.

pub mod analysis;
pub mod bench;
pub mod bridge;
pub mod corpus;
pub mod error;
pub mod idset;
pub mod index;
pub mod indexer_task;
pub mod query;
pub mod rank_prob;
pub mod rank_vsm;

pub use error::{Error, Result};
pub use idset::{IdSet, RecordId};
