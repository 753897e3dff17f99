//! Data generating processes for the Monte Carlo designs.

pub mod brownian;
pub mod continuous;
pub mod discrete;
pub mod volatility;

pub use brownian::{abs_functionals_from_path, gen_brownian_abs_functionals, AbsFunctionals};
pub use continuous::{simulate_continuous, simulate_continuous_path, ContinuousPath, DgpContinuousConfig, JumpSpec};
pub use discrete::{ma_weights, simulate_discrete, simulate_discrete_with_weights, CorrTarget, DgpDiscreteConfig, SlopeScale};
pub use volatility::{gen_volatility, GbmDiffusion, RsStepping, VolModel, VolParams, VolatilityPath};
