//! Gallery condensation for open-set identification over embedding vectors.
//!
//! Enrolled vectors of each identity are optionally pruned with flat-kernel
//! mean-shift (small clusters are treated as outliers) and then replaced by
//! the centers of a greedy hypersphere covering. The [`eval`] module measures
//! the result as FNIR at fixed FPIR against the Raw and single-aggregate
//! baselines, and [`synth`] provides seeded datasets to run it on.

pub mod cli;
pub mod config;
pub mod error;
pub mod eval;
pub mod gallery;
pub mod generate;
pub mod identify;
pub mod io;
pub mod mahalanobis;
pub mod meanshift;
pub mod report;
pub mod split;
pub mod synth;
pub mod vector;

pub use error::{Error, Result};
pub use eval::{evaluate_method, run_sweep, EvalReport, SweepGrid, SweepResult};
pub use gallery::{CondensedGallery, Gallery, ProbeSet, Provenance, SampleSet};
pub use generate::{condense_gallery, generate_samples, GenerationParams};
pub use identify::{accept, build_gallery, identify_top1, IdentificationResult, MethodParams};
pub use meanshift::{mean_shift, prune_identity, PruningParams};
pub use vector::{l2_distance, mean_vector, normalize, FeatureVector, IdentityId};
