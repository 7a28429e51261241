//! Truncated Laurent series over a coefficient ring.
//!
//! A series is known on a degree window `[dmin, dmax]`. Degrees below `dmin`
//! vanish; degrees above `dmax` are unknown unless the series is exact (a
//! Laurent polynomial). Reading an unknown coefficient is an error.
//!
//! Window rules, with `low(f)` the first coefficient that is not an exact
//! zero and `top(f)` equal to `dmax` for a truncated series and unbounded
//! for an exact one:
//!
//! * `f + g` is known up to `min(top(f), top(g))`.
//! * `f * g` is known up to `min(top(f) + low(g), top(g) + low(f))`.
//! * `f(g)` with `g` of T-adic order `v` is known up to `v(top(f) + 1) - 1`,
//!   further limited by the products used to evaluate it.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::arith::{Q, Ring, Scalar, INF};
use crate::error::{Error, Result};

const UNBOUNDED: i32 = i32::MAX / 4;

fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

pub(crate) fn exact_zero<C: Ring>(c: &C) -> bool {
    c.is_exact_zero()
}

/// Degree window of a truncated series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub dmin: i32,
    pub dmax: i32,
}

/// Closed annulus `p^-t_r <= |T| <= p^-t_s`; `t_r = None` is the closed
/// disk of radius `p^-t_s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Interval {
    pub t_s: Q,
    pub t_r: Option<Q>,
}

impl Interval {
    pub fn new(t_s: Q, t_r: Q) -> Result<Interval> {
        if t_s < qi(0) || t_r < t_s {
            return Err(Error::ConfigMismatch(format!("invalid interval ({t_s}, {t_r})")));
        }
        Ok(Interval { t_s, t_r: Some(t_r) })
    }

    pub fn disk(t_s: Q) -> Result<Interval> {
        if t_s < qi(0) {
            return Err(Error::ConfigMismatch(format!("invalid disk radius {t_s}")));
        }
        Ok(Interval { t_s, t_r: None })
    }

    /// Image of the radii under `r -> r^(1/k)`.
    pub fn root(&self, k: u64) -> Interval {
        let k = qi(k as i64);
        Interval { t_s: self.t_s / k, t_r: self.t_r.map(|t| t / k) }
    }

    /// Image of the radii under `r -> r^k`.
    pub fn power(&self, k: u64) -> Interval {
        let k = qi(k as i64);
        Interval { t_s: self.t_s * k, t_r: self.t_r.map(|t| t * k) }
    }

    /// `r > |u|^q` for a Frobenius series over `L` with `e`, `q`; disks always pass.
    pub fn is_phi_admissible(&self, e: u32, q: u64) -> bool {
        match self.t_r {
            None => true,
            Some(t) => t < Q::new(q as i64, e as i64 * (q as i64 - 1)),
        }
    }

    /// `I'` is contained in `I`.
    pub fn contains(&self, other: &Interval) -> bool {
        let lower = other.t_s >= self.t_s;
        let upper = match (self.t_r, other.t_r) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => b <= a,
        };
        lower && upper
    }
}

/// Gauss valuation value; `boundary` marks a minimum attained at the top of
/// a truncated window, where the value is only an upper bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaussValuation {
    pub value: Q,
    pub boundary: bool,
}

#[derive(Clone)]
pub struct LaurentSeries<C: Ring = Scalar> {
    zero: C,
    dmin: i32,
    c: Vec<C>,
    exact: bool,
}

impl<C: Ring> fmt::Debug for LaurentSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.c.iter().enumerate() {
            if exact_zero(c) {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c:?})*T^{}", self.dmin + i as i32)?;
        }
        if first {
            write!(f, "0")?;
        }
        if !self.exact {
            write!(f, " + O(T^{})", self.dmax() + 1)?;
        }
        Ok(())
    }
}

impl<C: Ring> LaurentSeries<C> {
    pub fn new(zero: &C, dmin: i32, coeffs: Vec<C>, exact: bool) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyWindow);
        }
        Ok(LaurentSeries { zero: zero.zero_like(), dmin, c: coeffs, exact })
    }

    /// Exact Laurent polynomial.
    pub fn polynomial(zero: &C, dmin: i32, coeffs: Vec<C>) -> Self {
        let coeffs = if coeffs.is_empty() { vec![zero.zero_like()] } else { coeffs };
        LaurentSeries { zero: zero.zero_like(), dmin, c: coeffs, exact: true }
    }

    pub fn from_ints(zero: &C, dmin: i32, ints: &[i64], exact: bool) -> Result<Self> {
        Self::new(zero, dmin, ints.iter().map(|&n| zero.from_int_like(n)).collect(), exact)
    }

    pub fn zero_on(zero: &C, w: Window) -> Result<Self> {
        if w.dmax < w.dmin {
            return Err(Error::EmptyWindow);
        }
        let n = (w.dmax - w.dmin + 1) as usize;
        Ok(LaurentSeries { zero: zero.zero_like(), dmin: w.dmin, c: vec![zero.zero_like(); n], exact: false })
    }

    pub fn exact_zero(zero: &C) -> Self {
        Self::polynomial(zero, 0, Vec::new())
    }

    pub fn one(zero: &C) -> Self {
        Self::polynomial(zero, 0, vec![zero.one_like()])
    }

    /// The variable `T`.
    pub fn var(zero: &C) -> Self {
        Self::monomial(zero.one_like(), 1)
    }

    pub fn monomial(c: C, k: i32) -> Self {
        LaurentSeries { zero: c.zero_like(), dmin: k, c: vec![c], exact: true }
    }

    pub fn ring_zero(&self) -> &C {
        &self.zero
    }

    pub fn dmin(&self) -> i32 {
        self.dmin
    }

    pub fn dmax(&self) -> i32 {
        self.dmin + self.c.len() as i32 - 1
    }

    pub fn window(&self) -> Window {
        Window { dmin: self.dmin, dmax: self.dmax() }
    }

    /// True when all coefficients above `dmax` vanish.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn is_power_series(&self) -> bool {
        self.dmin >= 0 || self.c[..(-self.dmin) as usize].iter().all(exact_zero)
    }

    /// Highest known degree; unbounded for exact series.
    pub fn top(&self) -> i32 {
        if self.exact {
            UNBOUNDED
        } else {
            self.dmax()
        }
    }

    /// First degree whose coefficient is not an exact zero.
    pub fn low(&self) -> i32 {
        match self.c.iter().position(|c| !exact_zero(c)) {
            Some(i) => self.dmin + i as i32,
            None => {
                if self.exact {
                    UNBOUNDED
                } else {
                    self.dmax() + 1
                }
            }
        }
    }

    /// T-adic order: first coefficient that is nonzero to its precision.
    pub fn t_order(&self) -> Option<i32> {
        self.c.iter().position(|c| !c.is_zero()).map(|i| self.dmin + i as i32)
    }

    pub fn coeffs(&self) -> &[C] {
        &self.c
    }

    /// Known coefficient of `T^k`.
    pub fn coeff(&self, k: i32) -> Result<C> {
        if k < self.dmin {
            return Ok(self.zero.clone());
        }
        if k > self.dmax() {
            if self.exact {
                return Ok(self.zero.clone());
            }
            return Err(Error::WindowUnderflow(format!("degree {k} above known window {}", self.dmax())));
        }
        Ok(self.c[(k - self.dmin) as usize].clone())
    }

    fn at(&self, k: i32) -> Option<&C> {
        if k < self.dmin || k > self.dmax() {
            None
        } else {
            Some(&self.c[(k - self.dmin) as usize])
        }
    }

    /// Coefficients `dmin..=d` (zeros where exactly known to vanish).
    fn dense_to(&self, lo: i32, d: i32) -> Vec<C> {
        (lo..=d).map(|k| self.at(k).cloned().unwrap_or_else(|| self.zero.clone())).collect()
    }

    fn build(&self, dmin: i32, c: Vec<C>, exact: bool) -> Self {
        LaurentSeries { zero: self.zero.clone(), dmin, c, exact }
    }

    fn check_field(&self, o: &Self) -> Result<()> {
        if core::ptr::eq(self.zero.field(), o.zero.field()) || self.zero.field().same(o.zero.field()) {
            Ok(())
        } else {
            Err(Error::ConfigMismatch("series over different fields".into()))
        }
    }

    /// Forgets all coefficients above `d`.
    pub fn truncate(&self, d: i32) -> Result<Self> {
        if d < self.dmin {
            return Err(Error::EmptyWindow);
        }
        let d = d.min(self.top());
        Ok(self.build(self.dmin, self.dense_to(self.dmin, d), false))
    }

    /// Same series marked exact: coefficients above `dmax` declared zero.
    pub fn as_polynomial(&self) -> Self {
        self.build(self.dmin, self.c.clone(), true)
    }

    /// Drops exact zeros at both ends of an exact series.
    pub fn trimmed(&self) -> Self {
        let first = self.c.iter().position(|c| !exact_zero(c));
        let Some(first) = first else {
            return if self.exact { Self::exact_zero(&self.zero) } else { self.clone() };
        };
        let last = if self.exact { self.c.iter().rposition(|c| !exact_zero(c)).unwrap() } else { self.c.len() - 1 };
        self.build(self.dmin + first as i32, self.c[first..=last].to_vec(), self.exact)
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_field(o)?;
        let dmin = self.dmin.min(o.dmin);
        let exact = self.exact && o.exact;
        let top = if exact { self.dmax().max(o.dmax()) } else { self.top().min(o.top()) };
        if top < dmin {
            return Err(Error::EmptyWindow);
        }
        let c = (dmin..=top)
            .map(|k| match (self.at(k), o.at(k)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => self.zero.clone(),
            })
            .collect();
        Ok(self.build(dmin, c, exact))
    }

    pub fn neg(&self) -> Self {
        self.build(self.dmin, self.c.iter().map(|c| c.neg()).collect(), self.exact)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &C) -> Self {
        self.build(self.dmin, self.c.iter().map(|c| c.mul(s)).collect(), self.exact)
    }

    pub fn mul_scalar(&self, s: &Scalar) -> Self {
        self.build(self.dmin, self.c.iter().map(|c| c.mul_scalar(s)).collect(), self.exact)
    }

    /// Multiplication by `T^k`.
    pub fn shift(&self, k: i32) -> Self {
        self.build(self.dmin + k, self.c.clone(), self.exact)
    }

    /// Applies `f` to each coefficient.
    pub fn map(&self, f: impl Fn(&C) -> C) -> Self {
        self.build(self.dmin, self.c.iter().map(f).collect(), self.exact)
    }

    /// Lowers the absolute precision of every coefficient to `prec`.
    pub fn cap_prec(&self, prec: Q) -> Self {
        self.map(|c| c.cap_prec(prec))
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.mul_trunc(o, UNBOUNDED)
    }

    /// Product known up to `min(d, natural window)`.
    pub fn mul_trunc(&self, o: &Self, d: i32) -> Result<Self> {
        self.check_field(o)?;
        let dmin = self.dmin + o.dmin;
        let (la, lb) = (self.low(), o.low());
        let exact = self.exact && o.exact;
        if (self.exact && la >= UNBOUNDED) || (o.exact && lb >= UNBOUNDED) {
            return Ok(Self::exact_zero(&self.zero));
        }
        let natural = if exact {
            self.dmax() + o.dmax()
        } else {
            let a = if self.exact { UNBOUNDED } else { self.dmax().saturating_add(lb.min(UNBOUNDED)) };
            let b = if o.exact { UNBOUNDED } else { o.dmax().saturating_add(la.min(UNBOUNDED)) };
            a.min(b)
        };
        let top = natural.min(d);
        let exact = exact && natural <= d;
        if top < dmin {
            if la >= UNBOUNDED || lb >= UNBOUNDED {
                return Ok(Self::exact_zero(&self.zero));
            }
            return Err(Error::EmptyWindow);
        }
        let mut acc = vec![self.zero.clone(); (top - dmin + 1) as usize];
        for (i, a) in self.c.iter().enumerate() {
            if exact_zero(a) {
                continue;
            }
            let di = self.dmin + i as i32;
            for (j, b) in o.c.iter().enumerate() {
                let k = di + o.dmin + j as i32;
                if k > top {
                    break;
                }
                if exact_zero(b) {
                    continue;
                }
                let slot = &mut acc[(k - dmin) as usize];
                *slot = slot.add(&a.mul(b));
            }
        }
        Ok(self.build(dmin, acc, exact))
    }

    /// `f^k` for `k >= 0`, truncated at `d`.
    pub fn pow_trunc(&self, k: u32, d: i32) -> Result<Self> {
        let mut acc = Self::one(&self.zero);
        for _ in 0..k {
            acc = acc.mul_trunc(self, d)?;
        }
        Ok(acc)
    }

    /// Multiplicative inverse, using the natural window of a truncated input.
    /// An exact input with more than one term is treated as truncated.
    pub fn inverse(&self) -> Result<Self> {
        let t = self.trimmed();
        if t.exact && t.c.len() == 1 {
            let c = t.c[0].inv().map_err(|_| Error::NonUnit)?;
            return Ok(Self::monomial(c, -t.dmin));
        }
        let k = self.t_order().ok_or(Error::NonUnit)?;
        self.inverse_to(-k + (self.dmax() - k))
    }

    /// Multiplicative inverse known up to degree `d`. Coefficients below the
    /// leading term must vanish to their precision.
    pub fn inverse_to(&self, d: i32) -> Result<Self> {
        let k = self.t_order().ok_or(Error::NonUnit)?;
        let lead = self.at(k).unwrap().inv().map_err(|_| Error::NonUnit)?;
        let n_known = if self.exact { UNBOUNDED } else { self.dmax() - k };
        let n = (d + k).min(n_known);
        if n < 0 {
            return Err(Error::EmptyWindow);
        }
        let u = |j: i32| -> C { self.at(k + j).cloned().unwrap_or_else(|| self.zero.clone()) };
        let mut h: Vec<C> = Vec::with_capacity(n as usize + 1);
        h.push(lead.clone());
        let neg_lead = lead.neg();
        for m in 1..=n {
            let mut s = self.zero.clone();
            for j in 1..=m {
                let uj = u(j);
                if exact_zero(&uj) {
                    continue;
                }
                s = s.add(&uj.mul(&h[(m - j) as usize]));
            }
            h.push(s.mul(&neg_lead));
        }
        Ok(self.build(-k, h, false))
    }

    pub fn derivative(&self) -> Result<Self> {
        let mut c = Vec::new();
        let start = if self.dmin == 0 { 1 } else { self.dmin };
        for k in start..=self.dmax() {
            c.push(self.at(k).unwrap().mul_scalar(&self.zero.field().from_i64(k as i64)));
        }
        if c.is_empty() {
            if self.exact {
                return Ok(Self::exact_zero(&self.zero));
            }
            return Err(Error::EmptyWindow);
        }
        Ok(self.build(start - 1, c, self.exact))
    }

    fn check_no_constant(g: &Self) -> Result<()> {
        for k in g.dmin..=0.min(g.dmax()) {
            if !g.at(k).unwrap().is_zero() {
                return Err(Error::NonvanishingConstantTerm);
            }
        }
        Ok(())
    }

    /// `f(g)` with `g(0) = 0`.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        self.compose_trunc(g, UNBOUNDED)
    }

    /// `f(g)` known up to at most degree `d`.
    pub fn compose_trunc(&self, g: &Self, d: i32) -> Result<Self> {
        self.check_field(g)?;
        Self::check_no_constant(g)?;
        let g = g.positive_part()?;
        let v = match g.t_order() {
            Some(v) => v,
            None => {
                // g vanishes on its whole window.
                if self.dmax() <= 0 && self.dmin >= 0 || g.exact {
                    return self.coeff(0).map(|c| self.build(0, vec![c], self.exact));
                }
                g.dmax() + 1
            }
        };
        let f_cap = if self.exact { UNBOUNDED } else { v.saturating_mul(self.dmax() + 1) - 1 };
        let mut dout = d.min(f_cap);
        if self.exact && g.exact && self.dmin < 0 && g.trimmed().c.len() > 1 {
            dout = dout.min(v.saturating_mul(self.dmax().max(0) + 1) - 1);
        }
        let dlo = self.dmin.saturating_mul(v).min(0);
        if dout < dlo {
            return Err(Error::EmptyWindow);
        }
        let konst = |k: i32| -> Self { self.build(0, vec![self.at(k).cloned().unwrap_or_else(|| self.zero.clone())], true) };

        // Nonnegative degrees by Horner in g.
        let lo_pos = self.dmin.max(0);
        let mut pos = if self.dmax() >= lo_pos {
            let mut acc = konst(self.dmax());
            for k in (lo_pos..self.dmax()).rev() {
                acc = acc.mul_trunc(&g, dout)?.add(&konst(k))?;
            }
            for _ in 0..lo_pos {
                acc = acc.mul_trunc(&g, dout)?;
            }
            acc
        } else {
            Self::exact_zero(&self.zero)
        };
        // Negative degrees by Horner in 1/g.
        if self.dmin < 0 {
            let h = if g.exact && g.trimmed().c.len() == 1 { g.inverse()? } else { g.inverse_to(dout)? };
            let hi = (-1).min(self.dmax());
            let mut acc = konst(self.dmin);
            for k in (self.dmin + 1)..=hi {
                acc = acc.mul_trunc(&h, dout)?.add(&konst(k))?;
            }
            acc = acc.mul_trunc(&h, dout)?;
            for _ in hi..-1 {
                acc = acc.mul_trunc(&h, dout)?;
            }
            pos = pos.add(&acc)?;
        }
        if pos.top() > dout {
            pos = pos.truncate(dout)?;
        }
        Ok(pos)
    }

    /// Drops the (vanishing) nonpositive-degree part of a series with `g(0) = 0`.
    fn positive_part(&self) -> Result<Self> {
        if self.dmin >= 1 {
            return Ok(self.clone());
        }
        if self.dmax() < 1 {
            return if self.exact { Ok(Self::exact_zero(&self.zero)) } else { Err(Error::EmptyWindow) };
        }
        Ok(self.build(1, self.c[(1 - self.dmin) as usize..].to_vec(), self.exact))
    }

    /// Replaces the coefficients below degree `k`, which must vanish to their
    /// precision, by exact zeros; the precision they carried is transferred
    /// to the remaining coefficients.
    pub fn drop_below(&self, k: i32) -> Result<Self> {
        if k <= self.dmin {
            return Ok(self.clone());
        }
        let mut floor: Option<Q> = None;
        for j in self.dmin..k.min(self.dmax() + 1) {
            let c = self.at(j).unwrap();
            if !c.is_zero() {
                return Err(Error::NotDivisible { residual: c.val() });
            }
            if !exact_zero(c) {
                floor = Some(floor.map_or(c.prec_q(), |f| f.min(c.prec_q())));
            }
        }
        if k > self.dmax() {
            return if self.exact { Ok(Self::exact_zero(&self.zero)) } else { Err(Error::EmptyWindow) };
        }
        let rest = self.build(k, self.dense_to(k, self.dmax()), self.exact);
        Ok(match floor {
            Some(p) => rest.cap_prec(p),
            None => rest,
        })
    }

    /// Compositional inverse on the natural window of `f`.
    pub fn comp_inverse(&self) -> Result<Self> {
        let t = self.trimmed();
        if t.exact && t.dmin == 1 && t.c.len() == 1 {
            let c = t.c[0].inv().map_err(|_| Error::NonUnitLinearTerm)?;
            return Ok(Self::monomial(c, 1));
        }
        self.comp_inverse_to(self.dmax())
    }

    /// Compositional inverse known up to degree `d`, by Newton iteration.
    pub fn comp_inverse_to(&self, d: i32) -> Result<Self> {
        Self::check_no_constant(self)?;
        let c1 = self.coeff(1)?;
        let c1inv = c1.inv().map_err(|_| Error::NonUnitLinearTerm)?;
        let d = d.min(self.top());
        if d < 1 {
            return Err(Error::EmptyWindow);
        }
        let fprime = self.derivative()?;
        let tvar = Self::var(&self.zero);
        let mut g = Self::monomial(c1inv, 1);
        let mut k = 1;
        while k < d {
            let k2 = (2 * k).min(d);
            let gp = g.as_polynomial();
            let err = self.compose_trunc(&gp, k2)?.sub(&tvar)?.drop_below(k + 1)?;
            let der = fprime.compose_trunc(&gp, k2)?;
            let corr = err.mul_trunc(&der.inverse_to(k2)?, k2)?;
            g = gp.sub(&corr)?.truncate(k2)?;
            k = k2;
        }
        if g.exact {
            g = g.truncate(d)?;
        }
        Ok(g)
    }

    /// `exp(f) - 1` style ODE solve: `exp(f)` for `f(0) = 0`, up to degree `d`.
    pub fn exp_to(&self, d: i32) -> Result<Self> {
        Self::check_no_constant(self)?;
        let fld = self.zero.field();
        let d = d.min(self.top());
        let mut h = vec![self.zero.one_like()];
        for k in 1..=d {
            let mut s = self.zero.clone();
            for j in 1..=k {
                let gj = self.coeff(j)?;
                if exact_zero(&gj) {
                    continue;
                }
                s = s.add(&gj.mul(&h[(k - j) as usize]).mul_scalar(&fld.from_i64(j as i64)));
            }
            h.push(s.mul_scalar(&fld.from_i64(k as i64).inv()?));
        }
        Ok(self.build(0, h, false))
    }

    pub fn exp(&self) -> Result<Self> {
        self.exp_to(self.dmax())
    }

    /// `log(1 + f)` for `f(0) = 0`, up to degree `d`.
    pub fn log1p_to(&self, d: i32) -> Result<Self> {
        Self::check_no_constant(self)?;
        let fld = self.zero.field();
        let d = d.min(self.top());
        let mut l = vec![self.zero.clone()];
        for k in 1..=d {
            let mut s = self.coeff(k)?.mul_scalar(&fld.from_i64(k as i64));
            for j in 1..k {
                let gj = self.coeff(k - j)?;
                if exact_zero(&gj) {
                    continue;
                }
                s = s.sub(&l[j as usize].mul(&gj).mul_scalar(&fld.from_i64(j as i64)));
            }
            l.push(s.mul_scalar(&fld.from_i64(k as i64).inv()?));
        }
        Ok(self.build(0, l, false))
    }

    pub fn log1p(&self) -> Result<Self> {
        self.log1p_to(self.dmax())
    }

    /// `min_i (v(c_i) + i t)` over the known window.
    pub fn gauss_valuation(&self, t: Q) -> GaussValuation {
        let mut best: Option<(Q, i32)> = None;
        for (i, c) in self.c.iter().enumerate() {
            if exact_zero(c) {
                continue;
            }
            let k = self.dmin + i as i32;
            let w = c.val() + t * qi(k as i64);
            match best {
                Some((b, _)) if b < w => {}
                Some((b, _)) if b == w => best = Some((b, k)),
                _ => best = Some((w, k)),
            }
        }
        match best {
            None => GaussValuation { value: qi(INF as i64), boundary: !self.exact },
            Some((value, k)) => GaussValuation { value, boundary: !self.exact && k == self.dmax() },
        }
    }

    /// `min(w_{t_s}, w_{t_r})`.
    pub fn annulus_valuation(&self, i: &Interval) -> GaussValuation {
        let a = self.gauss_valuation(i.t_s);
        let Some(tr) = i.t_r else {
            return a;
        };
        let b = self.gauss_valuation(tr);
        match a.value.cmp(&b.value) {
            core::cmp::Ordering::Less => a,
            core::cmp::Ordering::Greater => b,
            core::cmp::Ordering::Equal => GaussValuation { value: a.value, boundary: a.boundary || b.boundary },
        }
    }

    /// Degree `d` with `f = unit * T^d mod pi`.
    pub fn weierstrass_degree(&self) -> Result<i32> {
        if !self.is_power_series() {
            return Err(Error::NoWeierstrassDegree);
        }
        let zero = qi(0);
        for (i, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = c.val();
            if v < zero {
                return Err(Error::NoWeierstrassDegree);
            }
            if v == zero {
                let d = self.dmin + i as i32;
                let rest_ok = self.c[i..].iter().all(|c| c.is_zero() || c.val() >= zero);
                return if rest_ok { Ok(d) } else { Err(Error::NoWeierstrassDegree) };
            }
        }
        Err(Error::NoWeierstrassDegree)
    }

    /// Division with remainder `g = q f + r`, `deg r < d`, where `f = self`
    /// has Weierstrass degree `d`. Unknown tails are assumed integral for `f`
    /// and bounded by the known minimum for `g`; the precision of `q` and `r`
    /// is lowered accordingly.
    pub fn weierstrass_divide(&self, g: &Self) -> Result<(Self, Self)> {
        self.check_field(g)?;
        let d = self.weierstrass_degree()?;
        if !g.is_power_series() {
            return Err(Error::Unsupported("Weierstrass division of a Laurent series".into()));
        }
        let both_exact = self.exact && g.exact;
        let (q, r) = if self.exact && self.trimmed().dmax() == d {
            self.poly_divide(g, d)?
        } else {
            self.series_divide(g, d, both_exact)?
        };
        if both_exact {
            return Ok((q, r));
        }
        let lambda = (0..d).filter_map(|j| self.at(j)).filter(|c| !exact_zero(*c)).map(|c| c.val()).min();
        let Some(lambda) = lambda else {
            return Ok((q, r));
        };
        // A tail term of degree j reaches degree < d only after about j/d
        // multiplications by the low part, each gaining `lambda`.
        let dw = self.top().min(g.top());
        let base = g.c.iter().filter(|c| !exact_zero(*c)).map(|c| c.val()).min().unwrap_or(qi(0)).min(qi(0));
        let dd = d.max(1);
        let cap_r = base + lambda * qi(((dw + 1) / dd) as i64);
        let r = r.cap_prec(cap_r);
        let qc = q
            .c
            .iter()
            .enumerate()
            .map(|(k, c)| c.cap_prec(base + lambda * qi(((dw - k as i32) / dd) as i64)))
            .collect();
        Ok((q.build(q.dmin, qc, q.exact), r))
    }

    fn series_divide(&self, g: &Self, d: i32, both_exact: bool) -> Result<(Self, Self)> {
        let fld = self.zero.field();
        let dw = if both_exact { self.dmax().max(g.dmax()) } else { self.top().min(g.top()) };
        if dw < d {
            return Err(Error::EmptyWindow);
        }
        let f_low = LaurentSeries::polynomial(&self.zero, 0, self.dense_to(0, d - 1));
        let f_high = self.build(0, self.dense_to(d, dw), false);
        let fh_inv = f_high.inverse_to(dw - d)?;
        let mut r = g.build(0, g.dense_to(0, dw), false);
        let mut q_acc = LaurentSeries::polynomial(&self.zero, 0, vec![self.zero.clone(); (dw - d + 1) as usize]);
        let mut r_acc = LaurentSeries::polynomial(&self.zero, 0, vec![self.zero.clone(); d.max(1) as usize]);
        let max_iter = 8 * fld.cap as usize * fld.e as usize + 64;
        for _ in 0..max_iter {
            let lo = LaurentSeries::polynomial(&self.zero, 0, r.dense_to(0, d - 1));
            r_acc = r_acc.add(&lo)?;
            let hi_top = r.dmax();
            if hi_top < d {
                return Ok((q_acc.truncate(dw - d)?, r_acc));
            }
            let hi = r.build(0, r.dense_to(d, hi_top), false);
            let qs = hi.mul_trunc(&fh_inv, dw - d)?.as_polynomial();
            q_acc = q_acc.add(&qs)?;
            if qs.c.iter().all(|c| c.is_zero()) {
                return Ok((q_acc.truncate(dw - d)?, r_acc));
            }
            let next = qs.mul_trunc(&f_low, dw - 1)?.neg();
            r = next.build(0, next.dense_to(0, next.dmax().min(dw - 1)), false);
        }
        Err(Error::SolverStall("Weierstrass division did not converge".into()))
    }

    fn poly_divide(&self, g: &Self, d: i32) -> Result<(Self, Self)> {
        let lead_inv = self.at(d).unwrap().inv().map_err(|_| Error::NoWeierstrassDegree)?;
        let top = g.dmax();
        let mut r = g.dense_to(0, top.max(d - 1));
        let qlen = (top - d + 1).max(1) as usize;
        let mut q = vec![self.zero.clone(); qlen];
        for k in (d..=top).rev() {
            let c = r[k as usize].mul(&lead_inv);
            if exact_zero(&c) {
                continue;
            }
            for j in 0..=d {
                let Some(fj) = self.at(j) else { continue };
                if exact_zero(fj) {
                    continue;
                }
                let idx = (k - d + j) as usize;
                r[idx] = r[idx].sub(&c.mul(fj));
            }
            q[(k - d) as usize] = c;
        }
        let rem = if d == 0 { vec![self.zero.clone()] } else { r[..d as usize].to_vec() };
        let qs = self.build(0, q, g.exact);
        let qs = if g.exact { qs } else { qs.truncate(top - d)? };
        Ok((qs, LaurentSeries::polynomial(&self.zero, 0, rem)))
    }

    /// `f = U W` with `U` a unit and `W` monic of degree `d`, `W = T^d mod pi`.
    pub fn weierstrass_prepare(&self) -> Result<(Self, Self)> {
        let d = self.weierstrass_degree()?;
        let td = Self::monomial(self.zero.one_like(), d);
        let (q, r) = self.weierstrass_divide(&td)?;
        let mut w = r.neg().dense_to(0, d);
        w[d as usize] = self.zero.one_like();
        let w = LaurentSeries::polynomial(&self.zero, 0, w);
        let u = if q.exact { q.inverse_to(self.dmax() - d)? } else { q.inverse()? };
        let u = if self.exact && self.trimmed().dmax() == d { u.trimmed() } else { u };
        Ok((u, w))
    }

    /// Exact quotient `f / g`; fails with the remainder's valuation when `g`
    /// does not divide `f` to precision.
    pub fn divide_exact(&self, g: &Self) -> Result<Self> {
        self.check_field(g)?;
        let gt = g.trimmed();
        if gt.exact && gt.c.len() == 1 {
            let k = gt.dmin;
            let cinv = gt.c[0].inv().map_err(|_| Error::NonUnit)?;
            if self.is_power_series() && k > 0 {
                let below: Vec<C> = (self.dmin.min(0)..k).filter_map(|j| self.at(j).cloned()).collect();
                if let Some(c) = below.iter().find(|c| !c.is_zero()) {
                    let residual = below.iter().filter(|c| !c.is_zero()).map(|c| c.val()).min().unwrap_or(c.val());
                    return Err(Error::NotDivisible { residual });
                }
                let hi = self.dmax();
                if hi < k {
                    return if self.exact { Ok(Self::exact_zero(&self.zero)) } else { Err(Error::EmptyWindow) };
                }
                return Ok(self.build(0, self.dense_to(k, hi), self.exact).scale(&cinv));
            }
            return Ok(self.shift(-k).scale(&cinv));
        }
        let (q, r) = g.weierstrass_divide(self)?;
        if let Some(res) = r.c.iter().filter(|c| !c.is_zero()).map(|c| c.val()).min() {
            return Err(Error::NotDivisible { residual: res });
        }
        Ok(q)
    }

    /// Coefficientwise agreement to valuation `prec` over the common window.
    pub fn eq_to(&self, o: &Self, prec: Q) -> bool {
        let Ok(diff) = self.sub(o) else { return false };
        diff.c.iter().all(|c| c.is_zero() || c.val() >= prec)
    }
}

impl LaurentSeries<Scalar> {
    /// Exact polynomial with integer coefficients.
    pub fn int_poly(fld: &'static crate::arith::Field, dmin: i32, ints: &[i64]) -> Self {
        let z = fld.zero();
        Self::polynomial(&z, dmin, ints.iter().map(|&n| fld.from_i64(n)).collect())
    }

    /// Image under a coefficient embedding `L -> C`.
    pub fn lift<C: Ring>(&self, zero: &C) -> LaurentSeries<C> {
        LaurentSeries {
            zero: zero.zero_like(),
            dmin: self.dmin,
            c: self.c.iter().map(|s| zero.from_scalar_like(*s)).collect(),
            exact: self.exact,
        }
    }

    /// Minimal absolute precision over the window.
    pub fn min_prec(&self) -> Q {
        self.c.iter().map(|c| c.prec_q()).min().unwrap_or(qi(INF as i64))
    }
}
