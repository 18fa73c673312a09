//! Opinion-mining pipeline for binary depression screening over short Bangla
//! survey texts, plus a comparative-study harness.

pub mod classical;
pub mod corpus;
pub mod harness;
pub mod metrics;
pub mod neural;
pub mod preprocess;
pub mod rng;
pub mod vectorize;
