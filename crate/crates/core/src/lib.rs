//! Memory-based shallow parsing: IB1-IG and IGTree classifiers, a
//! baseNP/baseVP chunker, and subject/object detection over chunk heads.

pub mod chunker;
pub mod cli;
pub mod corpus;
pub mod mbl;
pub mod metrics;
pub mod relations;
