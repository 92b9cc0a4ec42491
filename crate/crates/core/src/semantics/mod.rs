//! Finite temporal database states and their legality.

mod check;
pub mod ground;
mod state;

pub use check::{
    check_state, check_state_with, mandatory_obligation_met, state_assignment, state_universe,
    transition_holds, SemanticsError, Violation,
};
pub use ground::{FutureWindow, Instance, PastTrigger, SemanticsOptions, TimeFlow};
pub use state::{StateError, TemporalState, Timeline, Tuple};
