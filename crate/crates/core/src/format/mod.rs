//! On-disk formats: identity specs, traces, reports and scenario sidecars.

pub mod identity;
pub mod report;
pub mod sidecar;
pub mod trace;

pub use identity::{parse_identity, write_identity, IdentityFile};
pub use report::{MetricsReport, ReportFormat, WindowRow};
pub use trace::{parse_trace, read_trace, write_activations, write_states, Trace, TraceForm};
