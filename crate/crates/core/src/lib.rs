pub mod cover;
pub mod dihedral;
pub mod graph;
pub mod linalg;
pub mod pipeline;
mod poly;
pub mod rep;
pub mod scalar;
pub mod verify;
