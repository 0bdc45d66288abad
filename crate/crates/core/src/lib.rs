//! Front speeds and interface shapes for cut-off KPP fronts in channel shear flows.
//!
//! The crate covers the advectionless travelling wave ([`ptw1d`]), the two
//! principal eigenvalue problems behind the weak-advection and `u_c → 1`
//! limits ([`spectral`]), the asymptotic speed formulas across parameter
//! regimes ([`regimes`]) and a direct 2D simulator used to check them
//! ([`sim2d`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod flows;
pub mod ptw1d;
pub mod quad;
pub mod reaction;
pub mod regimes;
pub mod sim2d;
pub mod spectral;
pub mod spline;

pub use error::{Error, Result};
pub use flows::{FlowExtrema, FlowIntegrals, FlowKind, FlowProfile};
pub use reaction::{KppReport, ReactionKind, ReactionSpec};
pub use ptw1d::{decay_rate_lambda_plus, solve_vstar, vstar_asymptotic, Ptw1dSolution, UcRegime};
pub use spectral::{h_function, BoundsReport, EigenProblem, EigenSolution};
pub use regimes::{FrontResult, Interface, RegimeBands, RegimeSelection, RegimeTag};
pub use sim2d::{InterfaceSample, SimHistory, SimOutcome, SimParams, SimState};
