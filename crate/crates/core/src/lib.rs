//! Bipartite quadrangulations of arbitrary genus: exact enumeration, uniform
//! sampling through labeled unicellular maps, cut-and-glue surgery and
//! geometric observables.

pub mod campaign;
pub mod cms;
pub mod codec;
pub mod enumerate;
pub mod error;
pub mod geometry;
pub mod map;
pub mod oracle;
pub mod sampler;
pub mod surgery;
pub mod unicellular;
pub mod verify;

pub use error::{Error, MapError, Result};
pub use map::{CanonicalCode, Color, CombinatorialMap, Dart, Profile};
