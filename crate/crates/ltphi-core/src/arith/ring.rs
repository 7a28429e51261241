use core::fmt::Debug;

use super::field::Field;
use super::scalar::Scalar;
use super::Q;
use crate::error::Result;

/// Coefficient rings usable in series.
pub trait Ring: Clone + Debug + Send + Sync {
    fn field(&self) -> &'static Field;
    /// Exact zero of the same ring.
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_scalar_like(&self, s: Scalar) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul_scalar(&self, s: &Scalar) -> Self;
    fn is_zero(&self) -> bool;
    /// Zero with unbounded precision.
    fn is_exact_zero(&self) -> bool;
    /// Lower bound for the valuation, exact when nonzero.
    fn val(&self) -> Q;
    /// Absolute precision as a rational valuation.
    fn prec_q(&self) -> Q;
    fn inv(&self) -> Result<Self>;
    /// Lowers the absolute precision to at most `prec`.
    fn cap_prec(&self, prec: Q) -> Self;

    fn from_int_like(&self, n: i64) -> Self {
        self.from_scalar_like(self.field().from_i64(n))
    }
}

impl Ring for Scalar {
    fn field(&self) -> &'static Field {
        Scalar::field(self)
    }
    fn zero_like(&self) -> Self {
        Scalar::field(self).zero()
    }
    fn one_like(&self) -> Self {
        Scalar::field(self).one()
    }
    fn from_scalar_like(&self, s: Scalar) -> Self {
        s
    }
    fn add(&self, o: &Self) -> Self {
        *self + *o
    }
    fn sub(&self, o: &Self) -> Self {
        *self - *o
    }
    fn mul(&self, o: &Self) -> Self {
        *self * *o
    }
    fn neg(&self) -> Self {
        -*self
    }
    fn mul_scalar(&self, s: &Scalar) -> Self {
        *self * *s
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn is_exact_zero(&self) -> bool {
        Scalar::is_exact_zero(self)
    }
    fn val(&self) -> Q {
        Scalar::val(self)
    }
    fn prec_q(&self) -> Q {
        Scalar::prec_q(self)
    }
    fn inv(&self) -> Result<Self> {
        Scalar::inv(self)
    }
    fn cap_prec(&self, prec: Q) -> Self {
        let digits = (prec * Q::from_integer(Scalar::field(self).e as i64)).floor().to_integer();
        self.with_prec(crate::arith::sat(digits))
    }
}
