//! Stabilizer simulation of the time-dependent transverse-field Ising model
//! (TFIM) error-correcting code.

pub mod cli;
pub mod code;
pub mod decode;
pub mod error;
pub mod experiments;
pub mod frame;
pub mod gate;
pub mod gf2;
pub mod majorana;
pub mod oracle;
pub mod pauli;

pub use code::{CodeInstance, CodeSpec, Variant};
pub use error::{Error, Result};
pub use frame::{Measurement, MeasurementKind, StabilizerFrame};
pub use gate::CliffordGate;
pub use majorana::{MajoranaMode, MajoranaMonomial, SitePermutation};
pub use pauli::{Pauli, PauliString};
