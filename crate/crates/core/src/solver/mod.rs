//! Strategy computation: fixed baseline agents, external-sampling MCCFR,
//! exact best response, and the value functions used by the estimators.

mod agents;
mod best_response;
mod mccfr;
mod values;

pub use agents::{fixed_agent, AgentKind};
pub use best_response::{best_response_value, exploitability};
pub use mccfr::{mccfr_train, Mccfr, SolveOutput, SolveReport};
pub use values::{exact_values, ExactValues, ValueFunction};
