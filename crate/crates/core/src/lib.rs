//! Linked systems of symmetric designs: exact construction and verification.

pub mod designs;
pub mod exact;
pub mod feasibility;
pub mod geometry;
pub mod gf2kerdock;
pub mod golden;
pub mod hadamard_oa;
pub mod lssd;
pub mod scheme;
