//! Grammar-driven engine for the automated multi-label-classification
//! (AutoML-MLC) configuration space.
//!
//! The crate represents the MEKA/WEKA pipeline search space as a BNF grammar
//! with dataset-dependent numeric bounds, and builds everything else on top
//! of it:
//!
//! - [`grammar`]: parse, print and interrogate the BNF dialect.
//! - [`tiering`]: the Small/Medium/Large tiers and the mechanical filter that
//!   derives the smaller grammars from the Large one.
//! - [`sampling`]: seeded derivation-tree sampling, either naive
//!   uniform-per-choice or weighted so every headline algorithm is equally
//!   likely, plus empirical frequency reports.
//! - [`config`]: lowering of derivation trees into typed pipeline
//!   configurations, and the per-algorithm hyper-parameter registry.
//! - [`constraints`]: the rule catalog validating configurations (hard codes
//!   `H1`..`H14`, warnings `W1`..`W4`).
//! - [`codec`]: canonical JSON and MEKA-style command serialization.
//! - [`evolution`]: grammar-guided genetic programming over derivation trees
//!   with a deterministic surrogate landscape and a random-search baseline.
//!
//! Each major capability also has a runnable example under `examples/`; the
//! `mlcspace` binary exposes the same operations as subcommands.

pub mod bounds;
pub mod catalog;
pub mod codec;
pub mod config;
pub mod constraints;
pub mod evolution;
pub mod grammar;
pub mod sampling;
pub mod tiering;

pub use bounds::{BoundExpr, DatasetContext};
pub use grammar::{parse_grammar, print_grammar, grammar_stats, Grammar, GrammarStats};
pub use sampling::{sample_tree, DerivationTree, Sampler, SamplingMode};
pub use tiering::{restrict_to_tier, tier_membership, Tier};
