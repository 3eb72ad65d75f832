//! Convergence oracles, algebraic criteria and retractions.

pub mod criteria;
pub mod finite;
pub mod oracle;
pub mod retraction;
pub mod sequence;

pub use finite::{finite_audit, AuditReport, FiniteSystem};
pub use oracle::{oracle_decide, Target, TopologyOracle, Verdict};
pub use sequence::SequenceSpec;
