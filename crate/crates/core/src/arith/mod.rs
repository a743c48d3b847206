//! Exact rational arithmetic with p-adic valuations.
//!
//! Everything here is computed over Q with arbitrary-precision integers;
//! no p-adic approximation is ever made.

mod divisors;
mod matrix;
mod newton;
mod poly;
mod rational;

pub use divisors::{elementary_divisor_valuations, lattice_coindex, ElementaryDivisors};
pub use matrix::Matrix;
pub use newton::{newton_polygon, NewtonPolygon, Segment};
pub use poly::{char_poly, RationalPolynomial};
pub use rational::{
    abs_p, biguint_str, format_rational, int_valuation, log_p, p_power, padic_fraction, parse_rational,
    rational_str, rational_vec_str, reduce_mod_power, valuation, valuation_checked, Prime, Rational, Valuation,
};
