//! Co-ownership network analysis: rebuild investor networks from subsidiary
//! ownership records, detect communities, and test whether they line up
//! with declared keiretsu memberships against degree-preserving nulls.

pub mod community;
pub mod graph;
pub mod ingest;
pub mod nullmodel;
pub mod pipeline;
pub mod seed;
pub mod stats;
pub mod synth;
