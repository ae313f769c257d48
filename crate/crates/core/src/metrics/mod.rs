//! Persistence scores, the temporal gap ratio, and the auxiliary identity metrics.

mod gap;
mod persistence;
mod scores;
mod streaming;

pub use gap::{gap_ratio, median, GapResult, GapTerm, Ratio};
pub use persistence::{persistence, PersistenceResult, WindowOutcome};
pub use scores::{
    consistency, continuity, identifiability, morphospace, recovery, recovery_bound, recovery_unregularized,
    ConsistencyScore, Continuity, MetricParams, MorphospacePoint, Similarity, TokenJaccard,
};
pub use streaming::{persistence_streaming, PersistenceStream};
