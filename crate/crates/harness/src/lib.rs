//! Deterministic in-process simulation of the full protocol: KGC, Alice,
//! the proxy group, the clerk and both designated verifiers, talking over
//! mailboxes and a public registry, with optional fault injection.

mod audit;
mod config;
mod registry;
mod sim;
mod transcript;

pub use audit::{confinement_audit, Violation};
pub use config::{default_proxy, ProtocolConfig};
pub use registry::Registry;
pub use sim::{run, run_detailed, FaultKind, FaultSpec, RunOutcome};
pub use transcript::{Event, PartyId, Payload, SecretKind, Stage, Transcript};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error("{party} already published {label}")]
    Republish { party: PartyId, label: String },
    #[error("registry has no {label} from {party}")]
    Missing { party: PartyId, label: String },
    #[error("cannot decode registry entry: {0}")]
    Decode(String),
    #[error(transparent)]
    Core(#[from] tproxy_core::Error),
}

impl HarnessError {
    fn missing(party: PartyId, label: &str) -> Self {
        HarnessError::Missing { party, label: label.into() }
    }
}
