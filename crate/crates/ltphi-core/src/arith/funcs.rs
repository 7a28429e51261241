use super::field::Field;
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Direction selector for [`exp_log_field`](super::exp_field).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpLog {
    Exp,
    Log,
}

/// Teichmueller lift of a nonzero residue given in the power basis mod `p`.
pub fn teichmueller(fld: &'static Field, residue: &[u64]) -> Result<Scalar> {
    let y0 = Scalar::from_residue(fld, residue);
    if y0.is_zero() {
        return Err(Error::ZeroResidue);
    }
    let mut y = y0;
    for _ in 0..=fld.cap {
        let next = y.pow(fld.q);
        if next.eq_to(&y, fld.cap) {
            return Ok(next);
        }
        y = next;
    }
    Ok(y)
}

/// `exp(x)` for `v(x) > 1/(p-1)`. The tail after the last summed term is
/// bounded by `k v(x) - e (k-1)/(p-1)`, and the result precision is capped by it.
pub fn exp_field(x: &Scalar) -> Result<Scalar> {
    let fld = x.field();
    let e = fld.e as i64;
    let pm1 = fld.p as i64 - 1;
    if x.is_zero() {
        return Ok(fld.one().with_prec(x.prec().max(0)));
    }
    if (x.v() as i64) * pm1 <= e {
        return Err(Error::ConvergenceDomain("exp needs v(x) > 1/(p-1)".into()));
    }
    let target = x.prec();
    let bound = |k: i64| k * x.v() as i64 - (e * (k - 1)) / pm1 - 1;
    let mut acc = fld.one();
    let mut term = fld.one();
    let mut k: i64 = 1;
    loop {
        term = term * *x * fld.from_i64(k).inv()?;
        acc = acc + term;
        k += 1;
        if bound(k) >= target as i64 {
            break;
        }
    }
    Ok(acc.with_prec(target.min(bound(k).min(i32::MAX as i64) as i32)))
}

/// `log(x)` for `v(x - 1) > 0`.
pub fn log_field(x: &Scalar) -> Result<Scalar> {
    let fld = x.field();
    let y = *x - fld.one();
    if y.is_zero() {
        return Ok(fld.zero().with_prec(y.prec()));
    }
    if y.v() <= 0 {
        return Err(Error::ConvergenceDomain("log needs v(x - 1) > 0".into()));
    }
    let e = fld.e as i64;
    let target = y.prec() as i64;
    let logp = |k: u64| -> i64 {
        let mut t = 0;
        let mut pk = 1u64;
        while pk.saturating_mul(fld.p) <= k {
            pk *= fld.p;
            t += 1;
        }
        t
    };
    let mut acc = fld.zero();
    let mut pw = fld.one();
    let mut k: u64 = 1;
    loop {
        pw = pw * y;
        let mut t = pw * fld.from_i64(k as i64).inv()?;
        if k % 2 == 0 {
            t = -t;
        }
        acc = acc + t;
        k += 1;
        let b = k as i64 * y.v() as i64 - e * (logp(k) + 1);
        if b >= target {
            return Ok(acc.with_prec(target.min(b) as i32));
        }
    }
}
