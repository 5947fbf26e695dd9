//! Exact-arithmetic toolkit for non-archimedean dynamical systems over
//! unramified p-adic coefficient rings.
//!
//! The crate is organized bottom-up:
//! - [`zq`]: the coefficient ring `O_E mod p^N` with Frobenius and
//!   Teichmuller lifts
//! - [`series`]: truncated univariate and bivariate power series,
//!   logarithm-type series with bounded denominators, Newton polygons
//! - [`formal_group`]: Lubin-Tate formal group laws (classical and
//!   Frobenius-twisted) and their endomorphism series
//! - [`dynamics`]: Lubin logarithms, commutant solving, fixed-point
//!   normalization, lift-datum verification, root-valuation profiles
//! - [`condense`]: norm series and the condensed family `Gamma_a`
//! - [`semiconj`]: semi-conjugacy verification/solving and order-1 dual
//!   isogenies
//! - [`json`]: the serialization formats shared with the command-line tool
//!
//! Everything is computed exactly modulo `(p^N, T^M)` with explicit precision
//! bookkeeping; no floating point is used anywhere.
//!
//! ```
//! use padic_dynamics::formal_group::{build_formal_group, FrobeniusSeries};
//! use padic_dynamics::series::Series;
//! use padic_dynamics::zq::Ring;
//!
//! // the multiplicative formal group over Z_3: f = (1+T)^3 - 1
//! let m = 8;
//! let ring = Ring::unramified(3, 1, 6 + m as u32 - 1).unwrap();
//! let f = Series::from_integers(&ring, &[0, 3, 3, 1], m);
//! let group = build_formal_group(&FrobeniusSeries::new(f, 1).unwrap(), m).unwrap();
//!
//! // the unique law with S^phi(f(X), f(Y)) = f(S(X, Y)) is X + Y + XY
//! let stamp = group.stamp_ring();
//! assert_eq!(*group.law().coeff(1, 1), stamp.one());
//! assert!(group.functional_equation_residual().is_zero());
//!
//! // and its doubling endomorphism is (1+T)^2 - 1
//! let two = group.endomorphism(&ring.integer(2)).unwrap();
//! assert_eq!(two, Series::from_integers(stamp, &[0, 2, 1], m));
//! ```

pub mod condense;
pub mod dynamics;
pub mod formal_group;
pub mod json;
pub mod semiconj;
pub mod series;
pub mod zq;

pub use series::{BiSeries, LogCoeff, LogSeries, NewtonPolygon, Ratio, Segment, Series, SeriesError};
pub use zq::{Ring, ZqElement, ZqError};
