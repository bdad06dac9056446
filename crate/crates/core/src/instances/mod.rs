//! Templates, generators and the class-specific verifiers.

pub mod catalog;
pub mod generators;
pub mod verify;
