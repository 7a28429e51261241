use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use super::scalar::Scalar;
use super::{q, Q};
use crate::error::{Error, Result};

/// User-facing description of a local field `L` and the working precision.
///
/// `poly` lists the coefficients `c0..cd` of the monic defining polynomial of
/// degree `d = e * f`. For `L = Q_p` use `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub poly: Vec<i64>,
    pub precision: i32,
}

impl FieldSpec {
    pub fn qp(p: u64, precision: i32) -> Self {
        FieldSpec { p, e: 1, f: 1, poly: alloc::vec![0, 1], precision }
    }

    /// `Q_p(pi)` with `pi^e = p`.
    pub fn ramified_root(p: u64, e: u32, precision: i32) -> Self {
        let mut poly = alloc::vec![0i64; e as usize + 1];
        poly[0] = -(p as i64);
        poly[e as usize] = 1;
        FieldSpec { p, e, f: 1, poly, precision }
    }

    /// Validates the spec and returns the shared field context. The context
    /// is leaked so that scalars can hold a `'static` reference to it.
    pub fn build(&self) -> Result<&'static Field> {
        Field::new(self.clone()).map(|f| &*Box::leak(Box::new(f)))
    }
}

/// Validated field context: lattice representation `Z_p[x]/g(x)` truncated
/// mod `p^m`, with `m` the largest exponent fitting the 64-bit modulus.
#[derive(Debug)]
pub struct Field {
    pub spec: FieldSpec,
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub d: usize,
    pub q: u64,
    /// p-adic digits of the lattice modulus.
    pub m: u32,
    pub pm: u64,
    /// Relative capacity in pi-adic digits (`e * m`).
    pub cap: i32,
    /// Configured precision `N` in pi-adic digits.
    pub n: i32,
    red: [[u64; 4]; 3],
    pi_pow: Vec<[u64; 4]>,
    p_pow: Vec<u64>,
    winv: [u64; 4],
    winv_pow: Vec<[u64; 4]>,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= p {
        if p % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

fn vp_i64(mut c: i64, p: i64) -> u32 {
    if c == 0 {
        return u32::MAX;
    }
    let mut k = 0;
    while c % p == 0 {
        c /= p;
        k += 1;
    }
    k
}

/// Polynomial over F_p (low degree first) is divisible by a monic factor.
fn divisible_mod_p(g: &[i64], h: &[i64], p: i64) -> bool {
    let mut r: Vec<i64> = g.iter().map(|c| c.rem_euclid(p)).collect();
    let dh = h.len() - 1;
    while r.len() > dh {
        let lead = *r.last().unwrap_or(&0);
        let shift = r.len() - 1 - dh;
        for (i, hc) in h.iter().enumerate() {
            r[shift + i] = (r[shift + i] - lead * hc).rem_euclid(p);
        }
        r.pop();
    }
    r.iter().all(|c| *c == 0)
}

fn irreducible_mod_p(g: &[i64], p: i64) -> bool {
    let d = g.len() - 1;
    for a in 0..p {
        if divisible_mod_p(g, &[a, 1], p) {
            return false;
        }
    }
    if d >= 4 {
        for a in 0..p {
            for b in 0..p {
                if divisible_mod_p(g, &[a, b, 1], p) {
                    return false;
                }
            }
        }
    }
    true
}

impl Field {
    fn new(spec: FieldSpec) -> Result<Field> {
        let p = spec.p;
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if spec.e == 0 || spec.f == 0 {
            return Err(Error::InvalidField("e and f must be positive".into()));
        }
        let d = (spec.e * spec.f) as usize;
        if d > 4 {
            return Err(Error::InvalidField("e * f must be at most 4".into()));
        }
        if spec.e > 1 && spec.f > 1 {
            return Err(Error::Unsupported(
                "fields with both e > 1 and f > 1".into(),
            ));
        }
        let poly: Vec<i64> = if d == 1 && spec.poly.len() <= 2 {
            alloc::vec![0, 1]
        } else {
            spec.poly.clone()
        };
        if poly.len() != d + 1 || poly[d] != 1 {
            return Err(Error::InvalidField(format!(
                "defining polynomial must be monic of degree {d}"
            )));
        }
        let pi = p as i64;
        if spec.e > 1 {
            let eis = (0..d).all(|i| vp_i64(poly[i], pi) >= 1) && vp_i64(poly[0], pi) == 1;
            if !eis {
                return Err(Error::InvalidField("polynomial is not Eisenstein".into()));
            }
        }
        if spec.f > 1 && !irreducible_mod_p(&poly, pi) {
            return Err(Error::InvalidField(
                "polynomial is not irreducible mod p".into(),
            ));
        }
        let mut m = 0u32;
        let mut pm: u64 = 1;
        while (pm as u128) * (p as u128) < (1u128 << 62) {
            pm *= p;
            m += 1;
        }
        let cap = (spec.e * m) as i32;
        if spec.precision < 1 || spec.precision > cap {
            return Err(Error::InvalidField(format!(
                "precision must lie in 1..={cap}"
            )));
        }
        let mut p_pow = alloc::vec![1u64; m as usize + 1];
        for k in 1..=m as usize {
            p_pow[k] = p_pow[k - 1].wrapping_mul(p);
        }
        let q = p.pow(spec.f);
        let mut fld = Field {
            n: spec.precision,
            spec,
            p,
            e: 0,
            f: 0,
            d,
            q,
            m,
            pm,
            cap,
            red: [[0; 4]; 3],
            pi_pow: Vec::new(),
            p_pow,
            winv: [0; 4],
            winv_pow: Vec::new(),
        };
        fld.e = fld.spec.e;
        fld.f = fld.spec.f;
        // x^d = -sum g_i x^i, then x^(d+k) by repeated shifting.
        if d > 1 {
            let mut cur = [0u64; 4];
            for i in 0..d {
                cur[i] = fld.reduce_i128(-(poly[i] as i128));
            }
            for k in 0..(d - 1) {
                fld.red[k] = cur;
                let mut next = [0u64; 4];
                let top = cur[d - 1];
                for i in (1..d).rev() {
                    next[i] = cur[i - 1];
                }
                for i in 0..d {
                    next[i] = fld.addm(next[i], fld.mulm(top, fld.red[0][i]));
                }
                cur = next;
            }
        }
        if fld.e > 1 {
            let mut pw = alloc::vec![[0u64; 4]; cap as usize + 1];
            pw[0][0] = 1;
            let mut x = [0u64; 4];
            x[1] = 1;
            for k in 1..=cap as usize {
                pw[k] = fld.lat_mul(&pw[k - 1], &x);
            }
            fld.pi_pow = pw;
            let e = fld.e as usize;
            let mut w = [0u64; 4];
            for i in 0..e {
                w[i] = fld.reduce_i128((-(poly[i] as i128)) / (p as i128));
            }
            fld.winv = fld.lat_inv_unit(&w);
            let mut wp = alloc::vec![[0u64; 4]; m as usize + 2];
            wp[0][0] = 1;
            for k in 1..wp.len() {
                wp[k] = fld.lat_mul(&wp[k - 1], &fld.winv);
            }
            fld.winv_pow = wp;
        }
        Ok(fld)
    }

    pub fn same(&self, other: &Field) -> bool {
        core::ptr::eq(self, other)
            || (self.p == other.p
                && self.e == other.e
                && self.f == other.f
                && self.spec.poly == other.spec.poly)
    }

    pub fn ramified(&self) -> bool {
        self.e > 1
    }

    /// Valuation of the uniformizer in the normalisation `v(p) = 1`.
    pub fn v_pi(&self) -> Q {
        q(1, self.e as i64)
    }

    /// Digits (pi-adic) to a rational valuation.
    pub fn to_q(&self, digits: i32) -> Q {
        q(digits as i64, self.e as i64)
    }

    /// `N` in rational form.
    pub fn n_q(&self) -> Q {
        self.to_q(self.n)
    }

    // ---- modular helpers on Z/p^m ----

    #[inline]
    pub(crate) fn addm(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.pm {
            s - self.pm
        } else {
            s
        }
    }

    #[inline]
    pub(crate) fn subm(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.pm - b
        }
    }

    #[inline]
    pub(crate) fn mulm(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.pm as u128) as u64
    }

    pub(crate) fn reduce_i128(&self, x: i128) -> u64 {
        x.rem_euclid(self.pm as i128) as u64
    }

    pub(crate) fn vp(&self, mut c: u64) -> u32 {
        if c == 0 {
            return self.m;
        }
        let mut k = 0;
        while c % self.p == 0 {
            c /= self.p;
            k += 1;
        }
        k
    }

    // ---- lattice elements of o_L / p^m in the power basis of x ----

    pub(crate) fn lat_add(&self, a: &[u64; 4], b: &[u64; 4]) -> [u64; 4] {
        let mut r = [0u64; 4];
        for i in 0..self.d {
            r[i] = self.addm(a[i], b[i]);
        }
        r
    }

    pub(crate) fn lat_neg(&self, a: &[u64; 4]) -> [u64; 4] {
        let mut r = [0u64; 4];
        for i in 0..self.d {
            r[i] = self.subm(0, a[i]);
        }
        r
    }

    pub(crate) fn lat_mul(&self, a: &[u64; 4], b: &[u64; 4]) -> [u64; 4] {
        let d = self.d;
        if d == 1 {
            return [self.mulm(a[0], b[0]), 0, 0, 0];
        }
        let mut prod = [0u64; 7];
        for i in 0..d {
            if a[i] == 0 {
                continue;
            }
            for j in 0..d {
                prod[i + j] = self.addm(prod[i + j], self.mulm(a[i], b[j]));
            }
        }
        let mut r = [0u64; 4];
        r[..d].copy_from_slice(&prod[..d]);
        for k in 0..(d - 1) {
            let c = prod[d + k];
            if c == 0 {
                continue;
            }
            for i in 0..d {
                r[i] = self.addm(r[i], self.mulm(c, self.red[k][i]));
            }
        }
        r
    }

    pub(crate) fn lat_scale(&self, a: &[u64; 4], c: u64) -> [u64; 4] {
        let mut r = [0u64; 4];
        for i in 0..self.d {
            r[i] = self.mulm(a[i], c);
        }
        r
    }

    pub(crate) fn lat_pow(&self, a: &[u64; 4], mut k: u64) -> [u64; 4] {
        let mut base = *a;
        let mut acc = [0u64; 4];
        acc[0] = 1;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.lat_mul(&acc, &base);
            }
            base = self.lat_mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// pi-adic valuation of a lattice element; `cap` or more means zero.
    pub(crate) fn lat_val(&self, x: &[u64; 4]) -> i32 {
        let mut best = i32::MAX;
        for i in 0..self.d {
            let v = if self.e > 1 {
                self.e as i32 * self.vp(x[i]) as i32 + i as i32
            } else {
                self.vp(x[i]) as i32
            };
            best = best.min(v);
        }
        best
    }

    pub(crate) fn lat_mul_pi(&self, x: &[u64; 4], k: i32) -> [u64; 4] {
        if k <= 0 {
            return *x;
        }
        if k >= self.cap {
            return [0; 4];
        }
        if self.e > 1 {
            self.lat_mul(x, &self.pi_pow[k as usize])
        } else {
            self.lat_scale(x, self.p_pow[k as usize])
        }
    }

    /// Exact division by `pi^k` of an element known to be divisible by it.
    pub(crate) fn lat_div_pi(&self, x: &[u64; 4], k: i32) -> [u64; 4] {
        if k <= 0 {
            return *x;
        }
        if self.e == 1 {
            let pk = self.p_pow[k as usize];
            let mut r = [0u64; 4];
            for i in 0..self.d {
                r[i] = x[i] / pk;
            }
            return r;
        }
        let e = self.e as i32;
        let (a, b) = (k / e, k % e);
        let (y, a2) = if b > 0 {
            (self.lat_mul(x, &self.pi_pow[(e - b) as usize]), a + 1)
        } else {
            (*x, a)
        };
        let pk = self.p_pow[a2 as usize];
        let mut z = [0u64; 4];
        for i in 0..self.d {
            z[i] = y[i] / pk;
        }
        self.lat_mul(&z, &self.winv_pow[a2 as usize])
    }

    /// Inverse of a lattice unit by Newton iteration from a residue inverse.
    pub(crate) fn lat_inv_unit(&self, x: &[u64; 4]) -> [u64; 4] {
        let mut y = self.lat_pow(x, self.q - 2);
        let mut two = [0u64; 4];
        two[0] = 2 % self.pm;
        let mut digits = 1u32;
        while digits < self.cap as u32 {
            let xy = self.lat_mul(x, &y);
            y = self.lat_mul(&y, &self.lat_add(&two, &self.lat_neg(&xy)));
            digits *= 2;
        }
        y
    }

    /// `p^k` expressed as `pi^(e k)` times the returned lattice unit.
    pub(crate) fn p_unit_pow(&self, k: u32) -> [u64; 4] {
        let mut one = [0u64; 4];
        one[0] = 1;
        if self.e == 1 {
            return one;
        }
        self.lat_pow(&self.winv, k as u64)
    }

    // ---- constructors for scalars ----

    pub fn zero(&'static self) -> Scalar {
        Scalar::zero_at(self, super::INF)
    }

    pub fn one(&'static self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(&'static self, n: i64) -> Scalar {
        Scalar::from_i128(self, n as i128)
    }

    /// The uniformizer `pi`.
    pub fn pi(&'static self) -> Scalar {
        self.one().mul_pi_pow(1)
    }

    /// Element with the given coordinates in the power basis of `x`.
    pub fn from_coords(&'static self, c: &[i64]) -> Scalar {
        let mut lat = [0u64; 4];
        for (i, ci) in c.iter().enumerate().take(self.d) {
            lat[i] = self.reduce_i128(*ci as i128);
        }
        Scalar::from_lattice(self, lat, 0, self.cap)
    }

    /// `n / d` as a scalar of `L`.
    pub fn from_ratio(&'static self, n: i64, d: i64) -> Result<Scalar> {
        let num = self.from_i64(n);
        let den = self.from_i64(d);
        Ok(num * den.inv()?)
    }
}
