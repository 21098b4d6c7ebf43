//! CLI, file formats, and the experiment harness around `rulesat-core`.
//!
//! The library surface exists so integration tests can drive the same code
//! paths as the `rulesat` binary: [`io`] for CSV/JSON ingestion and dumps,
//! [`harness`] for the grid/realization evaluation protocol, [`synth`] for
//! seeded benchmark-scale fixtures, and [`cli`] for the command surface.

pub mod cli;
pub mod harness;
pub mod io;
pub mod synth;
