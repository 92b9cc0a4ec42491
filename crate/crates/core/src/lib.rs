//! TREND temporal conceptual data models: text syntax, legality of finite
//! temporal database states, DLR_US translation, bounded reasoning,
//! verbalization and diagram output.

pub mod cli;
pub mod diagnostics;
pub mod dlr;
pub mod model;
pub mod reason;
pub mod render;
pub mod semantics;
pub mod text;
pub mod verbal;
