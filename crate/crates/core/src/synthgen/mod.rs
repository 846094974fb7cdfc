//! Planted worlds: community-structured networks with planted simple and
//! complex memes and interaction logs whose ground truth is known.

mod cascades;
mod network;

pub use cascades::{gen_cascades, Contagion, PlantedCascadeSpec, PlantedMeme, PlantedWorld};
pub use network::{gen_network, PlantedNetwork, PlantedPartitionSpec};
