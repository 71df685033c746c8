//! Home-MEG: a Markovian evolving graph in which every pair of nodes runs an
//! independent four-state chain (Home/Non-Home crossed with Connected/Disconnected).
//!
//! Numerics are generic over [`Real`] (`f32` or `f64`); the aliases below fix `f64`.

pub mod bounds;
pub mod coupling;
pub mod error;
pub mod fitting;
pub mod flooding;
pub mod graph;
pub mod intercontact;
pub mod model;
pub mod presets;
pub mod scalar;
pub mod stats;
pub mod uniforms;

pub use error::{Error, Result};
pub use flooding::Completion;
pub use graph::{GraphSnapshot, InitMode};
pub use model::{EdgeState, Location};
pub use scalar::Real;
pub use uniforms::EdgeUniforms;

/// Version of the JSON layouts written by the command line tool.
pub const SCHEMA_VERSION: u32 = 1;

pub type Params = model::HomeMegParams<f64>;
pub type ParamsF32 = model::HomeMegParams<f32>;
pub type Link = model::LinkParams<f64>;
pub type LinkF32 = model::LinkParams<f32>;
pub type Stationary = model::StationaryDist<f64>;
pub type IcDist = intercontact::IcDistribution<f64>;
pub type Report = bounds::BoundReport<f64>;
pub type Schedule = bounds::PhaseSchedule<f64>;
