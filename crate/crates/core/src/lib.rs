//! Dynamics of the logistic map `x -> a x (1 - x)` and of the continuous
//! logistic equation `dP/dt = r (M - P) P`, tied together by Picard
//! successive approximation.
//!
//! * [`map`]: the map itself, orbits, fixed points and their stability.
//! * [`cycles`]: periodic orbits, superstable parameters, the Feigenbaum ratio.
//! * [`ergodic`]: Lyapunov exponents and bifurcation-diagram sampling.
//! * [`continuous`]: closed form, RK4 and Lipschitz bounds for the ODE.
//! * [`picard`]: function-space Picard iteration and the scalar recurrence
//!   `x_{n+1} = F(x_n)` it reduces to.

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod continuous;
pub mod cycles;
pub mod ergodic;
mod error;
pub mod map;
pub mod picard;

pub use continuous::{OdeParams, OdeSolution};
pub use cycles::{Cycle, SuperstableSequence};
pub use ergodic::{BifurcationData, Exponent, InitialState, LyapunovResult};
pub use error::{Error, Result};
pub use map::{FixedPointClass, MapParams, Orbit, RawQuadraticParams};
pub use picard::{BridgeClass, BridgeOutcome, GridFunction, PicardRun};
