//! Arithmetic in `o_L / pi^N` for a small local field `L`, and the
//! coefficient ring extensions built on it.

mod coeff;
mod field;
mod funcs;
mod ring;
mod scalar;

pub use coeff::{CoeffRing, Coefficient};
pub use field::{Field, FieldSpec};
pub use funcs::{exp_field, log_field, teichmueller, ExpLog};
pub use ring::Ring;
pub use scalar::Scalar;

/// Exact rationals used for valuations, radii and weights.
pub type Q = num_rational::Ratio<i64>;

/// Stand-in for an infinite precision or valuation, in pi-adic digits.
pub const INF: i32 = 1 << 28;

pub(crate) fn sat(x: i64) -> i32 {
    if x >= INF as i64 {
        INF
    } else if x <= -(INF as i64) {
        -INF
    } else {
        x as i32
    }
}

/// Rational `n / d` shorthand.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}
