//! Minkowski's question mark function `?` and its singular Stieltjes
//! measure mu, computed exactly where exactness is possible and with
//! certified error bounds where it is not.
//!
//! * [`contfrac`]: exact rationals, dyadics, continued fraction words,
//!   and the Stern-Brocot (Farey) cell tree.
//! * [`qmark`]: `?` and its inverse, exact on rationals and dyadics,
//!   tolerance-controlled on doubles.
//! * [`measure`]: interval masses of mu, adaptive quadrature with
//!   certified error bounds, the Hausdorff dimension integral, Bernoulli
//!   sampling, and the Gauss map.
//! * [`fourier`]: Fourier-Stieltjes coefficients of mu and the empirical
//!   decay exponent fit.

pub mod contfrac;
pub mod error;
pub mod fourier;
mod front;
pub mod measure;
mod nufft;
pub mod qmark;
mod quad;

pub use contfrac::{CFWord, Dyadic, FareyCell, Rational};
pub use error::{Error, Result};
pub use fourier::{DecayEstimate, FourierCoefficient};
pub use measure::{DimensionEstimate, MuSampler, QuadratureResult, DEFAULT_CELL_BUDGET};
pub use qmark::ApproxReal;
