//! States on the universal enveloping algebra of `gl(∞)` induced by the
//! one-sided Plancherel character.

pub mod algebra;
pub mod casimir;
pub mod state;
pub mod wick;

pub use algebra::{Generator, NcPolynomial, StateValue, TPoly, Word};
pub use casimir::{
    casimir_eigenvalue, express_p_in_casimirs, gelfand_invariant, ordered_centered_polynomial,
    ordered_centered_state, shifted_power_element, CasimirExpansion, OrderedState, PowerSumFactor,
};
pub use state::{state_eval, StateEvaluator, DEFAULT_DEGREE_BOUND};
pub use wick::wick_moment;
