use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use core::fmt;

use super::field::Field;
use super::ring::Ring;
use super::scalar::Scalar;
use super::{q, Q, INF};
use crate::error::{Error, Result};

/// Configuration of the extended coefficient ring
/// `L[Omega, Omega^-1] (window-truncated) [eps] / (eps^m)`.
#[derive(Debug, Clone)]
pub struct CoeffRing {
    pub fld: &'static Field,
    /// Valuation weight assigned to `Omega`.
    pub v_omega: Q,
    pub omega_min: i32,
    pub omega_max: i32,
    /// Nilpotency order: `eps^eps_m = 0`.
    pub eps_m: u32,
}

impl CoeffRing {
    pub fn new(fld: &'static Field, v_omega: Q, omega: (i32, i32), eps_m: u32) -> Result<&'static CoeffRing> {
        if omega.0 > 0 || omega.1 < 0 || eps_m == 0 {
            return Err(Error::ConfigMismatch("Omega window must contain 0 and eps order must be positive".into()));
        }
        Ok(Box::leak(Box::new(CoeffRing { fld, v_omega, omega_min: omega.0, omega_max: omega.1, eps_m })))
    }

    /// Ring without `Omega`: `L[eps]/(eps^m)`.
    pub fn artinian(fld: &'static Field, eps_m: u32) -> Result<&'static CoeffRing> {
        CoeffRing::new(fld, Q::from_integer(0), (0, 0), eps_m)
    }

    /// Default weight `1/(p-1) - 1/(e(q-1))`.
    pub fn default_v_omega(fld: &Field) -> Q {
        q(1, fld.p as i64 - 1) - q(1, fld.e as i64 * (fld.q as i64 - 1))
    }

    pub fn has_omega(&self) -> bool {
        self.omega_min != 0 || self.omega_max != 0
    }

    pub fn scalar(&'static self, s: Scalar) -> Coefficient {
        let mut terms = BTreeMap::new();
        if !s.is_exact_zero() {
            terms.insert((0, 0), s);
        }
        Coefficient { ring: self, terms }
    }

    pub fn monomial(&'static self, s: Scalar, omega: i32, eps: u32) -> Coefficient {
        let mut c = Coefficient { ring: self, terms: BTreeMap::new() };
        c.push(omega, eps, s);
        c
    }

    pub fn omega(&'static self) -> Coefficient {
        self.monomial(self.fld.one(), 1, 0)
    }

    pub fn eps(&'static self) -> Coefficient {
        self.monomial(self.fld.one(), 0, 1)
    }
}

/// Finite sum `sum c_ij Omega^i eps^j` with `c_ij` scalars.
#[derive(Clone)]
pub struct Coefficient {
    ring: &'static CoeffRing,
    terms: BTreeMap<(i32, u32), Scalar>,
}

impl Coefficient {
    pub fn ring(&self) -> &'static CoeffRing {
        self.ring
    }

    fn push(&mut self, i: i32, j: u32, s: Scalar) {
        if i < self.ring.omega_min || i > self.ring.omega_max || j >= self.ring.eps_m || s.is_exact_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(|| s.field().zero());
        *e = *e + s;
    }

    /// Scalar coefficient of `Omega^i eps^j`.
    pub fn coeff(&self, i: i32, j: u32) -> Scalar {
        self.terms.get(&(i, j)).copied().unwrap_or_else(|| self.ring.fld.zero())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, u32), &Scalar)> {
        self.terms.iter()
    }

    /// Image under `eps -> eps` in `eps^m'` with `m' <= m` (`m' = 1` kills eps).
    pub fn truncate_eps(&self, target: &'static CoeffRing) -> Coefficient {
        let mut c = Coefficient { ring: target, terms: BTreeMap::new() };
        for (&(i, j), s) in &self.terms {
            c.push(i, j, *s);
        }
        c
    }

    /// Substitutes a scalar value for `Omega`.
    pub fn evaluate_omega(&self, omega: &Scalar, target: &'static CoeffRing) -> Result<Coefficient> {
        let mut c = Coefficient { ring: target, terms: BTreeMap::new() };
        let oinv = if self.terms.keys().any(|k| k.0 < 0) { Some(omega.inv()?) } else { None };
        for (&(i, j), s) in &self.terms {
            let w = if i >= 0 { omega.pow(i as u64) } else { oinv.unwrap_or(*omega).pow((-i) as u64) };
            c.push(0, j, *s * w);
        }
        Ok(c)
    }

    fn weight(&self, i: i32, s: &Scalar) -> Q {
        s.val() + self.ring.v_omega * Q::from_integer(i as i64)
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((i, j), s) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{s:?}")?;
            if *i != 0 {
                write!(f, "*W^{i}")?;
            }
            if *j != 0 {
                write!(f, "*eps^{j}")?;
            }
        }
        Ok(())
    }
}

impl PartialEq for Coefficient {
    fn eq(&self, other: &Coefficient) -> bool {
        Ring::sub(self, other).is_zero()
    }
}

impl Ring for Coefficient {
    fn field(&self) -> &'static Field {
        self.ring.fld
    }

    fn zero_like(&self) -> Self {
        Coefficient { ring: self.ring, terms: BTreeMap::new() }
    }

    fn one_like(&self) -> Self {
        self.ring.scalar(self.ring.fld.one())
    }

    fn from_scalar_like(&self, s: Scalar) -> Self {
        self.ring.scalar(s)
    }

    fn add(&self, o: &Self) -> Self {
        let mut c = self.clone();
        for (&(i, j), s) in &o.terms {
            c.push(i, j, *s);
        }
        c
    }

    fn sub(&self, o: &Self) -> Self {
        Ring::add(self, &Ring::neg(o))
    }

    fn mul(&self, o: &Self) -> Self {
        let mut c = self.zero_like();
        for (&(i1, j1), s1) in &self.terms {
            for (&(i2, j2), s2) in &o.terms {
                c.push(i1 + i2, j1 + j2, *s1 * *s2);
            }
        }
        c
    }

    fn neg(&self) -> Self {
        let mut c = self.clone();
        for s in c.terms.values_mut() {
            *s = -*s;
        }
        c
    }

    fn mul_scalar(&self, s: &Scalar) -> Self {
        let mut c = self.clone();
        for t in c.terms.values_mut() {
            *t = *t * *s;
        }
        c
    }

    fn is_zero(&self) -> bool {
        self.terms.values().all(|s| s.is_zero())
    }

    fn is_exact_zero(&self) -> bool {
        self.terms.values().all(|s| s.is_exact_zero())
    }

    fn val(&self) -> Q {
        self.terms
            .iter()
            .map(|(&(i, _), s)| self.weight(i, s))
            .min()
            .unwrap_or(Q::from_integer(INF as i64))
    }

    fn prec_q(&self) -> Q {
        self.terms
            .iter()
            .map(|(&(i, _), s)| s.prec_q() + self.ring.v_omega * Q::from_integer(i as i64))
            .min()
            .unwrap_or(Q::from_integer(INF as i64))
    }

    fn cap_prec(&self, prec: Q) -> Self {
        let mut c = self.clone();
        for (&(i, _), t) in c.terms.iter_mut() {
            *t = Ring::cap_prec(t, prec - self.ring.v_omega * Q::from_integer(i as i64));
        }
        c
    }

    /// Inverse when a single `eps`-free monomial strictly dominates; the
    /// remainder is inverted by a geometric series.
    fn inv(&self) -> Result<Self> {
        let lead = self
            .terms
            .iter()
            .filter(|(&(_, j), s)| j == 0 && !s.is_zero())
            .map(|(&(i, _), s)| (self.weight(i, s), i, *s))
            .min_by(|a, b| a.0.cmp(&b.0))
            .ok_or(Error::NonUnit)?;
        let (w0, i0, s0) = lead;
        let ties = self
            .terms
            .iter()
            .filter(|(&(i, j), s)| j == 0 && i != i0 && !s.is_zero() && self.weight(i, s) == w0)
            .count();
        if ties > 0 {
            return Err(Error::NonUnit);
        }
        let dinv = self.ring.monomial(s0.inv()?, -i0, 0);
        let r = Ring::sub(&Ring::mul(self, &dinv), &self.one_like());
        let mut acc = self.one_like();
        let mut pw = self.one_like();
        let mr = Ring::neg(&r);
        for _ in 0..(4 * self.ring.fld.cap as usize + 4 * self.ring.eps_m as usize + 64) {
            pw = Ring::mul(&pw, &mr);
            if pw.terms.is_empty() || pw.is_zero() {
                return Ok(Ring::mul(&acc, &dinv));
            }
            acc = Ring::add(&acc, &pw);
        }
        Err(Error::NonUnit)
    }
}
