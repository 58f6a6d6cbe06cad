//! Harmonic Magnus expansion of pointed flat tori: spectral Green operator,
//! the connection-form recursion with its tagged singular models, Chen
//! iterated integrals along tangential loops, quadratic differentials, and
//! the first-order quasiconformal variation harness.

pub mod acceptance;
pub mod connection;
pub mod error;
pub mod expansion;
pub mod geometry;
pub mod grid;
pub mod integrate;
pub mod loops;
pub mod quaddiff;
pub mod theta;
pub mod variation;

pub use connection::{ConnectionForm, SingularModel};
pub use error::TorusError;
pub use expansion::harmonic_expansion;
pub use geometry::TorusGeometry;
pub use grid::GridField;
pub use integrate::{iterated, transport, SampledForm, TransportOpts};
pub use loops::TangentialLoop;

pub type Result<T> = std::result::Result<T, TorusError>;
