//! Step-factorial products `a (a+b) (a+2b) ...` and their two companions
//! `a (a+2b) (a+4b) ...` and `(a+b) (a+3b) ...`, evaluated at integer and real
//! indices.
//!
//! * [`stepproducts`]: finite and infinite products, duplication, shift limits.
//! * [`bernoulli`]: exact Bernoulli numbers.
//! * [`eulermaclaurin`]: log-products at real index, asymptotic constants.
//! * [`quadrature`]: tanh-sinh rule for the Beta-type integrals.
//! * [`interpolation`]: half-index values by three independent routes.
//! * [`identities`]: residual reports for every relation between them.
//! * [`cli`]: the `stepfact` command.
//!
//! Numerical code is generic over [`Real`] (`f32`, `f64`); the aliases below
//! fix the scalar to `f64`.
//!
//! ```
//! use stepfact::{interpolation::half_index_k, FormKind};
//!
//! let k = half_index_k(1.0_f64, 1.0).unwrap();
//! assert!((k.consensus - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
//! let v = stepfact::interpolation::value_at(FormKind::Gamma, 1.0_f64, 1.0, 5.0).unwrap();
//! assert!((v - 120.0).abs() < 1e-9);
//! ```

pub mod bernoulli;
pub mod cli;
pub mod error;
pub mod eulermaclaurin;
pub mod identities;
pub mod interpolation;
pub mod quadrature;
pub mod real;
pub mod stepproducts;

pub use bernoulli::BernoulliTable;
pub use error::{Error, Result};
pub use eulermaclaurin::{AsymptoticConstants, EmExpansion};
pub use identities::{IdentityReport, SuiteConfig, SuiteReport};
pub use interpolation::HalfIndexResult;
pub use quadrature::{BetaIntegralSpec, QuadratureResult};
pub use real::Real;
pub use stepproducts::{BetaRatioSpec, FormKind, PartialProductTrace, StepSequence};

pub type StepSequenceF64 = StepSequence<f64>;
pub type BetaRatioSpecF64 = BetaRatioSpec<f64>;
pub type PartialProductTraceF64 = PartialProductTrace<f64>;
pub type EmExpansionF64 = EmExpansion<f64>;
pub type AsymptoticConstantsF64 = AsymptoticConstants<f64>;
pub type BetaIntegralSpecF64 = BetaIntegralSpec<f64>;
pub type QuadratureResultF64 = QuadratureResult<f64>;
pub type HalfIndexResultF64 = HalfIndexResult<f64>;
