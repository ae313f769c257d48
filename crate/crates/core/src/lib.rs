//! Trace analysis for agent identity: ingredient-wise occurrence versus
//! co-instantiation over windows of objective time, the persistence scores
//! and gap ratio built on them, the auxiliary identity metrics, and a
//! deterministic scaffold simulator that constructs the separating traces.

pub mod activation;
pub mod analysis;
pub mod bundle;
pub mod error;
pub mod format;
pub mod grounding;
pub mod identity;
pub mod metrics;
pub mod simulator;
pub mod window;

pub use activation::{state_distance, ActivationSet, IngredientSet};
pub use analysis::{analyze, AnalysisConfig};
pub use error::{Error, Result};
pub use identity::{GroundedIdentity, IngredientKind, IngredientSpec, ScaffoldState};
pub use window::{EvalSelector, Horizon, WindowConfig};
