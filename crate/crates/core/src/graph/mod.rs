//! Social network and interaction log.
//!
//! External user ids are arbitrary strings; they are remapped to dense
//! indices `0..n` in first-appearance order and the mapping travels with the
//! network so every file written back out uses the original ids.

mod interactions;
pub mod io;
mod network;

pub use interactions::{InteractionEvent, InteractionKind, InteractionLog, RawInteraction};
pub use network::{
    build_network, BuildMode, BuildReport, DegreeStats, IdMap, NetworkBuilder, SocialNetwork,
};

/// Dense node index.
pub type NodeId = usize;
