//! Learning small, balanced DNF classification rule sets by compiling the
//! training problem to weighted partial MaxSAT.
//!
//! The crate is organized around the pipeline:
//!
//! 1. [`dataset`] — binarize raw tabular data into Boolean feature columns,
//!    split train/test, and build class-balanced partitions for incremental
//!    training.
//! 2. [`proplogic`] — propositional formulas, clause normalization, cardinality
//!    helpers, and Tseitin conversion into weighted CNF instances.
//! 3. [`maxsat`] — optimal weighted partial MaxSAT solving via the embedded
//!    [`sat`] engine (or an external solver process), plus WCNF text I/O.
//! 4. [`imli`] / [`imlib`] — the two rule learners: per-partition encodings,
//!    the incremental training loops, and model decoding. [`imlib`] also hosts
//!    the all-hard exact mode.
//! 5. [`rules`] — the learned model: rule application, redundancy reduction,
//!    metrics, and human-readable formatting.
//!
//! The crate is `no_std`-compatible (with `alloc`) when built without the
//! `std` feature; that drops wall-clock timing and the external solver bridge.
#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_debug_implementations)]

extern crate alloc;

pub mod dataset;
pub mod imli;
pub mod imlib;
pub mod maxsat;
pub mod proplogic;
pub mod rules;
pub mod sat;
