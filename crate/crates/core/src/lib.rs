//! Short-range molecular dynamics with runtime selection of the force
//! calculation configuration.

pub mod config;
pub mod container;
pub mod dynamics;
pub mod error;
pub mod force;
pub mod forest;
pub mod fuzzy;
pub mod harness;
pub mod lj;
pub mod parallel;
pub mod params;
pub mod particles;
pub mod sim;
pub mod stats;
pub mod tuning;
pub mod vec3;

pub use config::{enumerate_configurations, Configuration};
pub use error::{Error, Result};
pub use particles::{Layout, Particle, ParticleSet, ParticleTypeInfo};
pub use vec3::Vec3;
