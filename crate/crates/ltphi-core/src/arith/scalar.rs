use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use super::field::Field;
use super::{sat, Q, INF};
use crate::error::{Error, Result};

/// Element `pi^v * u` of `L`, with `u` a lattice unit, known modulo
/// `pi^prec`. A zero is stored with `v == prec`.
///
/// Precision follows the absolute rule: sums keep the smaller precision,
/// products keep `min(prec_a + v_b, prec_b + v_a)`, and nothing is ever
/// claimed beyond `v + cap`.
#[derive(Clone, Copy)]
pub struct Scalar {
    fld: &'static Field,
    u: [u64; 4],
    v: i32,
    prec: i32,
}

impl Scalar {
    pub(crate) fn zero_at(fld: &'static Field, prec: i32) -> Scalar {
        Scalar { fld, u: [0; 4], v: prec, prec }
    }

    pub(crate) fn from_lattice(fld: &'static Field, x: [u64; 4], v0: i32, prec: i32) -> Scalar {
        let prec = prec.min(sat(v0 as i64 + fld.cap as i64));
        let k = fld.lat_val(&x);
        if k >= fld.cap || sat(v0 as i64 + k as i64) >= prec {
            return Scalar::zero_at(fld, prec);
        }
        Scalar { fld, u: fld.lat_div_pi(&x, k), v: v0 + k, prec }
    }

    pub(crate) fn from_i128(fld: &'static Field, n: i128) -> Scalar {
        if n == 0 {
            return Scalar::zero_at(fld, INF);
        }
        let p = fld.p as i128;
        let mut k = 0u32;
        let mut r = n;
        while r % p == 0 {
            r /= p;
            k += 1;
        }
        let mut lat = [0u64; 4];
        lat[0] = fld.reduce_i128(r);
        let lat = fld.lat_mul(&lat, &fld.p_unit_pow(k));
        let v = (fld.e * k) as i32;
        Scalar { fld, u: lat, v, prec: v + fld.cap }
    }

    pub fn field(&self) -> &'static Field {
        self.fld
    }

    /// Valuation in pi-adic digits; for a zero this is its precision.
    pub fn v(&self) -> i32 {
        self.v
    }

    /// Absolute precision in pi-adic digits.
    pub fn prec(&self) -> i32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.v >= self.prec
    }

    pub fn is_exact_zero(&self) -> bool {
        self.is_zero() && self.prec >= INF
    }

    /// Valuation with `v(p) = 1`; for zeros the precision bound.
    pub fn val(&self) -> Q {
        self.fld.to_q(self.v)
    }

    pub fn prec_q(&self) -> Q {
        self.fld.to_q(self.prec)
    }

    pub fn is_unit(&self) -> bool {
        !self.is_zero() && self.v == 0
    }

    pub fn is_integral(&self) -> bool {
        self.v >= 0
    }

    /// Lowers the precision to at most `prec` digits.
    pub fn with_prec(&self, prec: i32) -> Scalar {
        if prec >= self.prec {
            return *self;
        }
        if self.v >= prec {
            return Scalar::zero_at(self.fld, prec);
        }
        Scalar { prec, ..*self }
    }

    /// Same digits claimed to the full relative capacity. Used by solvers
    /// that bound their error separately and then call `with_prec`.
    pub(crate) fn relax(&self) -> Scalar {
        if self.is_zero() {
            return Scalar::zero_at(self.fld, INF);
        }
        Scalar { prec: self.v + self.fld.cap, ..*self }
    }

    /// Multiplication by `pi^k` for any integer `k`; exact.
    pub fn mul_pi_pow(&self, k: i32) -> Scalar {
        Scalar {
            v: sat(self.v as i64 + k as i64),
            prec: sat(self.prec as i64 + k as i64),
            ..*self
        }
    }

    /// Field inverse of a nonzero element.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::NonUnit);
        }
        let u = self.fld.lat_inv_unit(&self.u);
        Ok(Scalar { fld: self.fld, u, v: -self.v, prec: self.prec - 2 * self.v })
    }

    /// Inverse in `o_L`; fails unless the element is a unit.
    pub fn invert(&self) -> Result<Scalar> {
        if !self.is_unit() {
            return Err(Error::NonUnit);
        }
        self.inv()
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(*self * other.inv()?)
    }

    pub fn pow(&self, mut k: u64) -> Scalar {
        let mut base = *self;
        let mut acc = self.fld.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    pub fn scale_i64(&self, n: i64) -> Scalar {
        *self * self.fld.from_i64(n)
    }

    /// Residue class in `F_q` as coordinates mod `p`; zero when `v > 0`.
    pub fn residue(&self) -> [u64; 4] {
        let mut r = [0u64; 4];
        if self.v == 0 && !self.is_zero() {
            for i in 0..self.fld.d {
                r[i] = self.u[i] % self.fld.p;
            }
            if self.fld.e > 1 {
                r[1..].iter_mut().for_each(|c| *c = 0);
            }
        }
        r
    }

    /// Scalar from a residue given in the power basis mod `p`.
    pub fn from_residue(fld: &'static Field, r: &[u64]) -> Scalar {
        let mut lat = [0u64; 4];
        for (i, c) in r.iter().enumerate().take(fld.d) {
            lat[i] = c % fld.p;
        }
        Scalar::from_lattice(fld, lat, 0, fld.cap)
    }

    /// Canonical lattice coordinates of the value modulo `pi^k`, `k >= 0`,
    /// for integral elements. Coordinates refer to the power basis of `x`.
    pub fn coords_mod(&self, k: i32) -> [u64; 4] {
        let fld = self.fld;
        let mut r = [0u64; 4];
        if self.is_zero() || self.v >= k || self.v < 0 {
            return r;
        }
        let x = fld.lat_mul_pi(&self.u, self.v);
        for i in 0..fld.d {
            let digits = if fld.e > 1 {
                (k - i as i32 + fld.e as i32 - 1).div_euclid(fld.e as i32)
            } else {
                k
            };
            let digits = digits.clamp(0, fld.m as i32) as u32;
            r[i] = x[i] % fld.p.pow(digits);
        }
        r
    }

    /// Unit part coordinates modulo `p^m`.
    pub fn unit_coords(&self) -> [u64; 4] {
        self.u
    }

    /// Signed integer representative of an integral element of `Q_p`,
    /// reduced modulo `p^k` into the symmetric range.
    pub fn to_i128_mod(&self, k: i32) -> i128 {
        let c = self.coords_mod(k)[0] as i128;
        let md = (self.fld.p as i128).pow(k.clamp(0, self.fld.m as i32) as u32);
        if c > md / 2 {
            c - md
        } else {
            c
        }
    }

    /// `self == other` modulo `pi^k` (both precisions permitting).
    pub fn eq_to(&self, other: &Scalar, k: i32) -> bool {
        (*self - *other).v() >= k
    }

    fn add_impl(&self, o: &Scalar) -> Scalar {
        let fld = self.fld;
        let prec = self.prec.min(o.prec);
        let v0 = self.v.min(o.v);
        if v0 >= prec {
            return Scalar::zero_at(fld, prec);
        }
        let mut x = [0u64; 4];
        for s in [self, o] {
            if !s.is_zero() {
                let k = s.v - v0;
                if k < fld.cap {
                    x = fld.lat_add(&x, &fld.lat_mul_pi(&s.u, k));
                }
            }
        }
        Scalar::from_lattice(fld, x, v0, prec)
    }

    fn mul_impl(&self, o: &Scalar) -> Scalar {
        let fld = self.fld;
        let prec = sat(self.prec as i64 + o.v as i64).min(sat(o.prec as i64 + self.v as i64));
        if self.is_zero() || o.is_zero() {
            return Scalar::zero_at(fld, prec);
        }
        let v = self.v + o.v;
        let prec = prec.min(v + fld.cap);
        if v >= prec {
            return Scalar::zero_at(fld, prec);
        }
        Scalar { fld, u: fld.lat_mul(&self.u, &o.u), v, prec }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        self.add_impl(&o)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        self.add_impl(&-o)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { u: self.fld.lat_neg(&self.u), ..self }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        self.mul_impl(&o)
    }
}

impl PartialEq for Scalar {
    /// Equality as far as both precisions allow.
    fn eq(&self, other: &Scalar) -> bool {
        (*self - *other).is_zero()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact_zero() {
            return write!(f, "0");
        }
        if self.is_zero() {
            return write!(f, "O(pi^{})", self.prec);
        }
        let fld = self.fld;
        write!(f, "pi^{}*[", self.v)?;
        let rel = (self.prec - self.v).min(fld.cap);
        let shown = Scalar { v: 0, prec: rel, ..*self }.coords_mod(rel);
        for i in 0..fld.d {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", shown[i])?;
        }
        write!(f, "]+O(pi^{})", self.prec)
    }
}
