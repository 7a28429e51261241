//! Lubin-Tate formal group attached to a Frobenius series `phi`.
//!
//! The inductive solvers ([a], the group law) run in fixed-point mode: each
//! coefficient is computed from full-capacity digits and its precision is
//! then set from an a priori error bound. The bound uses that the
//! linearized recursion is divisible by `pi` except along degrees `k = q*j`,
//! where one digit is lost.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{Field, Q, Ring, Scalar, INF};
use crate::error::{Error, Result};
use crate::series::{exact_zero, LaurentSeries};

type S = LaurentSeries<Scalar>;

fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiKind {
    /// `(1+X)^p - 1` over `Q_p`.
    Cyclotomic,
    /// `pi X + X^q`.
    Special,
    Custom,
}

/// Result of an inductive solve: the value, the smallest pivot valuation
/// met, and the guaranteed pi-adic precision of every coefficient.
#[derive(Clone, Debug)]
pub struct Solved<T> {
    pub value: T,
    pub min_pivot: Q,
    pub digits: i32,
}

/// Truncated bivariate power series `sum c_ab X^a Y^b`, `a + b <= d`.
#[derive(Clone, Debug)]
pub struct Bivariate {
    zero: Scalar,
    d: i32,
    c: Vec<Scalar>,
}

fn bidx(a: i32, b: i32) -> usize {
    let n = (a + b) as usize;
    n * (n + 1) / 2 + b as usize
}

impl Bivariate {
    pub fn zero(fld: &'static Field, d: i32) -> Bivariate {
        let n = bidx(0, d) + 1;
        Bivariate { zero: fld.zero(), d, c: vec![fld.zero(); n] }
    }

    pub fn degree(&self) -> i32 {
        self.d
    }

    pub fn coeff(&self, a: i32, b: i32) -> Scalar {
        if a < 0 || b < 0 || a + b > self.d {
            return self.zero;
        }
        self.c[bidx(a, b)]
    }

    pub fn set(&mut self, a: i32, b: i32, v: Scalar) {
        let i = bidx(a, b);
        self.c[i] = v;
    }

    fn add_at(&mut self, a: i32, b: i32, v: Scalar) {
        let i = bidx(a, b);
        self.c[i] = self.c[i] + v;
    }

    pub fn swap(&self) -> Bivariate {
        let mut r = Bivariate { zero: self.zero, d: self.d, c: self.c.clone() };
        for n in 0..=self.d {
            for b in 0..=n {
                r.set(n - b, b, self.coeff(b, n - b));
            }
        }
        r
    }

    pub fn sub(&self, o: &Bivariate) -> Bivariate {
        let d = self.d.min(o.d);
        let mut r = Bivariate { zero: self.zero, d, c: Vec::new() };
        for n in 0..=d {
            for b in 0..=n {
                r.c.push(self.coeff(n - b, b) - o.coeff(n - b, b));
            }
        }
        r
    }

    pub fn mul(&self, o: &Bivariate) -> Bivariate {
        let d = self.d.min(o.d);
        let mut r = Bivariate::zero(self.zero.field(), d);
        for n1 in 0..=d {
            for b1 in 0..=n1 {
                let x = self.coeff(n1 - b1, b1);
                if exact_zero(&x) {
                    continue;
                }
                for n2 in 0..=(d - n1) {
                    for b2 in 0..=n2 {
                        let y = o.coeff(n2 - b2, b2);
                        if exact_zero(&y) {
                            continue;
                        }
                        r.add_at(n1 - b1 + n2 - b2, b1 + b2, x * y);
                    }
                }
            }
        }
        r
    }

    /// `f(X) g(Y)` truncated at total degree `d`.
    pub fn outer(f: &S, g: &S, d: i32) -> Result<Bivariate> {
        let mut r = Bivariate::zero(f.ring_zero().field(), d);
        for a in f.dmin().max(0)..=d.min(f.dmax()) {
            let x = f.coeff(a)?;
            if exact_zero(&x) {
                continue;
            }
            for b in g.dmin().max(0)..=(d - a).min(g.dmax()) {
                let y = g.coeff(b)?;
                if !exact_zero(&y) {
                    r.add_at(a, b, x * y);
                }
            }
        }
        Ok(r)
    }

    /// `F(X, 0)`.
    pub fn at_y_zero(&self) -> S {
        S::new(&self.zero, 0, (0..=self.d).map(|a| self.coeff(a, 0)).collect(), false).unwrap()
    }

    /// Smallest valuation among the coefficients (infinite when all vanish).
    pub fn min_val(&self) -> Q {
        self.c.iter().filter(|c| !c.is_zero()).map(|c| c.val()).min().unwrap_or(qi(INF as i64))
    }

    /// `F(f, g)` for univariate series without constant term, truncated at `d`.
    pub fn eval(&self, f: &S, g: &S, d: i32) -> Result<S> {
        let d = d.min(self.d);
        let zero = self.zero;
        let mut fp = vec![S::one(&zero)];
        for i in 1..=d {
            fp.push(fp[i as usize - 1].mul_trunc(f, d)?);
        }
        // h_j = sum_i c_ij f^i, then Horner in g.
        let mut acc = S::zero_on(&zero, crate::series::Window { dmin: 0, dmax: d })?;
        for j in (0..=d).rev() {
            let mut h = S::zero_on(&zero, crate::series::Window { dmin: 0, dmax: d })?;
            for i in 0..=(d - j) {
                let c = self.coeff(i, j);
                if exact_zero(&c) {
                    continue;
                }
                h = h.add(&fp[i as usize].mul_scalar(&c))?;
            }
            acc = acc.mul_trunc(g, d)?.add(&h)?;
        }
        let mut acc = acc.truncate(d)?;
        if acc.dmax() > d {
            acc = acc.truncate(d)?;
        }
        Ok(acc)
    }
}

/// Frobenius series with derived Lubin-Tate objects on the window `[0, d]`.
#[derive(Clone, Debug)]
pub struct LTData {
    fld: &'static Field,
    phi: S,
    d: i32,
    kind: PhiKind,
    /// `phi^j` modulo `T^(d+1)` for `j <= d`.
    powers: Vec<S>,
}

impl LTData {
    pub fn new(fld: &'static Field, phi: S, d: i32, kind: PhiKind) -> Result<LTData> {
        if d < 2 {
            return Err(Error::EmptyWindow);
        }
        let phi = phi.trimmed();
        Self::validate(fld, &phi)?;
        let mut powers = vec![S::one(&fld.zero())];
        for j in 1..=d as usize {
            powers.push(powers[j - 1].mul_trunc(&phi, d)?);
        }
        Ok(LTData { fld, phi, d, kind, powers })
    }

    /// `(1+X)^p - 1`; requires `L = Q_p`.
    pub fn cyclotomic(fld: &'static Field, d: i32) -> Result<LTData> {
        if fld.e != 1 || fld.f != 1 {
            return Err(Error::ConfigMismatch("the cyclotomic series needs L = Q_p".into()));
        }
        let p = fld.p as i64;
        let mut c = vec![0i64; p as usize + 1];
        let mut b = 1i64;
        for (k, slot) in c.iter_mut().enumerate().skip(1) {
            b = b * (p - k as i64 + 1) / k as i64;
            *slot = b;
        }
        Self::new(fld, S::int_poly(fld, 0, &c), d, PhiKind::Cyclotomic)
    }

    /// `pi X + X^q`.
    pub fn special(fld: &'static Field, d: i32) -> Result<LTData> {
        let mut c = vec![fld.zero(); fld.q as usize + 1];
        c[1] = fld.pi();
        c[fld.q as usize] = fld.one();
        Self::new(fld, S::polynomial(&fld.zero(), 0, c), d, PhiKind::Special)
    }

    fn validate(fld: &'static Field, phi: &S) -> Result<()> {
        let bad = |m: &str| Err(Error::ConfigMismatch(format!("not a Frobenius series: {m}")));
        if !phi.is_exact() || !phi.is_power_series() {
            return bad("expected a polynomial in X");
        }
        if !phi.coeff(0)?.is_zero() {
            return bad("nonzero constant term");
        }
        if !(phi.coeff(1)? - fld.pi()).is_zero() {
            return bad("linear coefficient differs from pi");
        }
        let q = fld.q as i32;
        if phi.dmax() < q {
            return bad("degree below q");
        }
        for k in 2..=phi.dmax() {
            let c = phi.coeff(k)?;
            let reduced = if k == q { c - fld.one() } else { c };
            if !reduced.is_zero() && reduced.v() <= 0 {
                return bad("not congruent to X^q modulo pi");
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &'static Field {
        self.fld
    }

    pub fn phi(&self) -> &S {
        &self.phi
    }

    pub fn window(&self) -> i32 {
        self.d
    }

    pub fn kind(&self) -> PhiKind {
        self.kind
    }

    pub fn q(&self) -> u64 {
        self.fld.q
    }

    /// `phi(X)^j` modulo `X^(d+1)`.
    pub fn phi_pow(&self, j: usize) -> &S {
        &self.powers[j]
    }

    fn zero(&self) -> Scalar {
        self.fld.zero()
    }

    /// `[a](X)` by the degree-wise solve `e_k (pi - pi^k) = [X^k](E(phi) - phi(E))`.
    pub fn build_endomorphism(&self, a: &Scalar) -> Result<Solved<S>> {
        let fld = self.fld;
        if !a.is_integral() {
            return Err(Error::NonUnit);
        }
        let d = self.d as usize;
        let qd = fld.q as usize;
        let deg_phi = self.phi.dmax() as usize;
        let phic: Vec<Scalar> = (0..=deg_phi).map(|i| self.phi.coeff(i as i32).unwrap()).collect();
        let mut work = vec![self.zero(); d + 1];
        let mut bound = vec![INF; d + 1];
        work[1] = a.relax();
        bound[1] = a.prec().min(fld.cap);
        // pw[i][k] = [X^k] E^i over the solved part.
        let mut pw = vec![vec![self.zero(); d + 1]; deg_phi + 1];
        pw[1][1] = work[1];
        let pi = fld.pi();
        let mut bcur = bound[1];
        let mut min_pivot = qi(INF as i64);
        for k in 2..=d {
            for i in 2..=deg_phi.min(k) {
                let mut s = self.zero();
                for m in 1..=(k + 1 - i) {
                    if work[m].is_zero() || pw[i - 1][k - m].is_zero() {
                        continue;
                    }
                    s = s + work[m] * pw[i - 1][k - m];
                }
                pw[i][k] = s;
            }
            let mut r = self.zero();
            for (j, wj) in work.iter().enumerate().take(k).skip(1) {
                if wj.is_zero() {
                    continue;
                }
                let c = self.powers[j].coeff(k as i32)?;
                if !c.is_zero() {
                    r = r + *wj * c;
                }
            }
            for i in 2..=deg_phi.min(k) {
                if !phic[i].is_zero() && !pw[i][k].is_zero() {
                    r = r - phic[i] * pw[i][k];
                }
            }
            let pivot = pi - pi.pow(k as u64);
            min_pivot = min_pivot.min(pivot.val());
            let e = r * pivot.inv()?;
            let mut b = bcur.min(fld.cap - pivot.v());
            if k % qd == 0 {
                b = b.min(bound[k / qd] - pivot.v());
            }
            if b <= 0 {
                return Err(Error::PivotLoss { degree: k, valuation: pivot.val() });
            }
            bound[k] = b;
            bcur = bcur.min(b);
            work[k] = e.relax();
            pw[1][k] = work[k];
        }
        let coeffs: Vec<Scalar> = (0..=d).map(|k| if k == 0 { self.zero() } else { work[k].with_prec(bound[k]) }).collect();
        Ok(Solved { value: S::new(&self.zero(), 0, coeffs, false)?, min_pivot, digits: bcur })
    }

    /// Lubin-Tate group law `F` with `phi(F(X,Y)) = F(phi X, phi Y)`.
    pub fn build_group_law(&self) -> Result<Solved<Bivariate>> {
        self.build_group_law_to(self.d)
    }

    pub fn build_group_law_to(&self, d: i32) -> Result<Solved<Bivariate>> {
        let fld = self.fld;
        let d = d.min(self.d);
        let du = d as usize;
        let qd = fld.q as i32;
        let deg_phi = (self.phi.dmax() as usize).min(du);
        let phic: Vec<Scalar> = (0..=deg_phi).map(|i| self.phi.coeff(i as i32).unwrap()).collect();
        // hp[n][b] = coefficient of X^(n-b) Y^b; pw[i][n] the same for F^i.
        let mut hp: Vec<Vec<Scalar>> = vec![Vec::new(); du + 1];
        hp[1] = vec![fld.one(), fld.one()];
        let mut bound: Vec<Vec<i32>> = vec![Vec::new(); du + 1];
        bound[1] = vec![fld.cap, fld.cap];
        let mut pw: Vec<Vec<Vec<Scalar>>> = vec![vec![Vec::new(); du + 1]; deg_phi + 1];
        pw[1][1] = hp[1].clone();
        let mut acc = Bivariate::zero(fld, d);
        let add_part = |acc: &mut Bivariate, a: i32, b: i32, c: Scalar| -> Result<()> {
            let (pa, pb) = (&self.powers[a as usize], &self.powers[b as usize]);
            for i in a..=d - b {
                let x = pa.coeff(i)?;
                if x.is_zero() {
                    continue;
                }
                let xc = c * x;
                for j in b..=(d - i) {
                    let y = pb.coeff(j)?;
                    if !y.is_zero() {
                        acc.add_at(i, j, xc * y);
                    }
                }
            }
            Ok(())
        };
        add_part(&mut acc, 1, 0, fld.one())?;
        add_part(&mut acc, 0, 1, fld.one())?;
        let pi = fld.pi();
        let mut bcur = fld.cap;
        let mut min_pivot = qi(INF as i64);
        for n in 2..=du {
            for i in 2..=deg_phi.min(n) {
                let mut part = vec![fld.zero(); n + 1];
                for m in 1..=(n + 1 - i) {
                    let (x, y) = (&hp[m], &pw[i - 1][n - m]);
                    if y.is_empty() {
                        continue;
                    }
                    for (b1, xv) in x.iter().enumerate() {
                        if xv.is_zero() {
                            continue;
                        }
                        for (b2, yv) in y.iter().enumerate() {
                            if !yv.is_zero() {
                                part[b1 + b2] = part[b1 + b2] + *xv * *yv;
                            }
                        }
                    }
                }
                pw[i][n] = part;
            }
            let pivot = pi - pi.pow(n as u64);
            min_pivot = min_pivot.min(pivot.val());
            let pinv = pivot.inv()?;
            let mut part = Vec::with_capacity(n + 1);
            let mut bpart = Vec::with_capacity(n + 1);
            for b in 0..=n {
                let a = n - b;
                let mut r = acc.coeff(a as i32, b as i32);
                for i in 2..=deg_phi.min(n) {
                    if !phic[i].is_zero() {
                        r = r - phic[i] * pw[i][n][b];
                    }
                }
                let mut bb = bcur.min(fld.cap - pivot.v());
                if a as i32 % qd == 0 && b as i32 % qd == 0 {
                    let (a0, b0) = (a / qd as usize, b / qd as usize);
                    bb = bb.min(bound[a0 + b0][b0] - pivot.v());
                }
                if bb <= 0 {
                    return Err(Error::PivotLoss { degree: n, valuation: pivot.val() });
                }
                part.push((r * pinv).relax());
                bpart.push(bb);
            }
            for (b, c) in part.iter().enumerate() {
                if !c.is_zero() {
                    add_part(&mut acc, (n - b) as i32, b as i32, *c)?;
                }
            }
            bcur = bcur.min(*bpart.iter().min().unwrap());
            pw[1][n] = part.clone();
            hp[n] = part;
            bound[n] = bpart;
        }
        let mut f = Bivariate::zero(fld, d);
        for n in 1..=du {
            for b in 0..=n {
                f.set((n - b) as i32, b as i32, hp[n][b].with_prec(bound[n][b]));
            }
        }
        Ok(Solved { value: f, min_pivot, digits: bcur })
    }

    /// Residual valuation of `phi(F(X,Y)) - F(phi X, phi Y)`.
    pub fn equivariance_residual(&self, f: &Bivariate) -> Result<Q> {
        let d = f.degree();
        let mut lhs = Bivariate::zero(self.fld, d);
        let mut fpow = f.clone();
        for i in 1..=self.phi.dmax().min(d) {
            let c = self.phi.coeff(i)?;
            if !c.is_zero() {
                for (slot, v) in lhs.c.iter_mut().zip(fpow.c.iter()) {
                    *slot = *slot + c * *v;
                }
            }
            if i < self.phi.dmax().min(d) {
                fpow = fpow.mul(f);
            }
        }
        let mut rhs = Bivariate::zero(self.fld, d);
        for n in 1..=d {
            for b in 0..=n {
                let c = f.coeff(n - b, b);
                if c.is_zero() {
                    continue;
                }
                let part = Bivariate::outer(&self.powers[(n - b) as usize], &self.powers[b as usize], d)?;
                for (slot, v) in rhs.c.iter_mut().zip(part.c.iter()) {
                    *slot = *slot + c * *v;
                }
            }
        }
        Ok(lhs.sub(&rhs).min_val())
    }

    /// Residual valuation of `F(F(X,Y),Z) - F(X,F(Y,Z))` up to total degree `k`.
    pub fn associativity_residual(&self, f: &Bivariate, k: i32) -> Result<Q> {
        let k = k.min(f.degree());
        let f = {
            let mut g = Bivariate::zero(self.fld, k);
            for n in 0..=k {
                for b in 0..=n {
                    g.set(n - b, b, f.coeff(n - b, b));
                }
            }
            g
        };
        let tri = Tri::new(self.fld, k);
        // Left: sum_ij c_ij F(X,Y)^i Z^j with F(X,Y) embedded in (X,Y).
        let fxy = tri.from_bi(&f, 0, 1);
        let fyz = tri.from_bi(&f, 1, 2);
        let x = tri.var(0);
        let z = tri.var(2);
        let lhs = tri.compose(&f, &fxy, &z);
        let rhs = tri.compose(&f, &x, &fyz);
        Ok(tri.min_val_diff(&lhs, &rhs))
    }

    /// `F([a], [b])`, the formal sum of two endomorphisms.
    pub fn formal_sum(&self, f_law: &Bivariate, x: &S, y: &S) -> Result<S> {
        f_law.eval(x, y, self.d)
    }

    /// `log_LT` as the stable limit of `pi^-n phi^n(T)`. Coefficient
    /// precision is the agreement of consecutive iterates, capped by the
    /// tracked precision; the best iterate is returned.
    pub fn log_lt(&self) -> Result<S> {
        let fld = self.fld;
        let zero = self.zero();
        let mut iter = S::var(&zero).truncate(self.d)?;
        let pinv = fld.pi().inv()?;
        let mut scale = fld.one();
        let mut prev: Option<S> = None;
        let mut best: Option<(i32, S)> = None;
        for _ in 0..fld.cap {
            iter = self.phi.compose_trunc(&iter, self.d)?;
            scale = scale * pinv;
            let cur = iter.mul_scalar(&scale);
            if let Some(p) = &prev {
                let mut coeffs = Vec::with_capacity(self.d as usize + 1);
                let mut claim = INF;
                for k in 0..=self.d {
                    let c = p.coeff(k)?;
                    let digits = (cur.coeff(k)? - c).v().min(c.prec());
                    claim = claim.min(digits);
                    coeffs.push(c.with_prec(digits));
                }
                match &best {
                    Some((b, _)) if *b >= claim => {
                        if claim + 2 < *b {
                            break;
                        }
                    }
                    _ => best = Some((claim, S::new(&zero, 0, coeffs, false)?)),
                }
            }
            prev = Some(cur);
        }
        match best {
            Some((b, s)) if b >= fld.n => Ok(s),
            Some((b, _)) => Err(Error::StabilizationFailure(format!("log_LT stable to {b} digits only"))),
            None => Err(Error::StabilizationFailure("no iterates".into())),
        }
    }

    /// `exp_LT` as the compositional inverse of `log_LT` on `[0, d]`.
    pub fn exp_lt(&self, log: &S, d: i32) -> Result<S> {
        log.truncate(d)?.comp_inverse()
    }

    /// `phi^k(T)` modulo `T^(d+1)`; exact while the degree fits.
    pub fn phi_iterate(&self, k: u32, d: i32) -> Result<S> {
        let mut r = S::var(&self.zero());
        for _ in 0..k {
            let exact_deg = r.dmax() as i64 * self.phi.dmax() as i64;
            r = if r.is_exact() && exact_deg <= d as i64 {
                self.phi.compose(&r)?
            } else {
                self.phi.compose_trunc(&r, d)?
            };
        }
        Ok(r)
    }

    /// `Q_a = phi^a(T) / T`.
    pub fn q_factor(&self, a: u32, d: i32) -> Result<S> {
        self.phi_iterate(a, d + 1)?.divide_exact(&S::var(&self.zero()))
    }

    /// `f(phi(T))` for a power series `f`.
    pub fn phi_apply<C: Ring>(&self, f: &LaurentSeries<C>) -> Result<LaurentSeries<C>> {
        if !f.is_power_series() {
            return Err(Error::Unsupported("phi of a series with a principal part".into()));
        }
        let phi = self.phi.lift(f.ring_zero());
        let exact_deg = f.dmax() as i64 * self.phi.dmax() as i64;
        if f.is_exact() && exact_deg > 4 * self.d as i64 {
            return f.compose_trunc(&phi, 4 * self.d);
        }
        f.compose(&phi)
    }

    /// `f(phi^n(T))`.
    pub fn phi_apply_n<C: Ring>(&self, f: &LaurentSeries<C>, n: u32) -> Result<LaurentSeries<C>> {
        let mut r = f.clone();
        for _ in 0..n {
            r = self.phi_apply(&r)?;
        }
        Ok(r)
    }

    fn require_trace_route(&self) -> Result<Scalar> {
        let q = self.fld.q as i32;
        if self.phi.dmax() != q {
            return Err(Error::Unsupported("psi needs phi of degree q".into()));
        }
        self.phi.coeff(q)?.invert()
    }

    /// Power sums `s_i(u) = sum y^i` over the roots of `phi(Y) = u`, for `i <= n`.
    pub fn psi_tables(&self, n: usize) -> Result<Vec<S>> {
        let lead_inv = self.require_trace_route()?;
        let fld = self.fld;
        let q = fld.q as usize;
        let zero = self.zero();
        // Monic W = Y^q + sum_{j<q} w_j Y^j with w_0 = -u / lead.
        let mut w: Vec<S> = Vec::with_capacity(q);
        w.push(S::monomial(-lead_inv, 1));
        for j in 1..q {
            let c = self.phi.coeff(j as i32)? * lead_inv;
            w.push(S::polynomial(&zero, 0, vec![c]));
        }
        let mut s: Vec<S> = vec![S::polynomial(&zero, 0, vec![fld.from_i64(q as i64)])];
        for i in 1..=n {
            // s_i = -(sum_{j=1}^{min(i,q)} w_{q-j} s_{i-j}) - [i <= q] i w_{q-i}.
            let mut acc = S::exact_zero(&zero);
            for j in 1..=i.min(q) {
                let term = if j == i { w[q - j].mul_scalar(&fld.from_i64(i as i64)) } else { w[q - j].mul(&s[i - j])? };
                acc = acc.add(&term)?;
            }
            s.push(acc.neg().trimmed());
        }
        Ok(s)
    }

    /// `psi_col` by the trace formula `psi_col(sum f_i T^i) = sum f_i s_i`.
    ///
    /// For truncated input the unknown tail is assumed bounded below by the
    /// smallest known valuation (or 0), which with
    /// `v([T^k] s_i) >= (i - q k) / (e (q - 1))` caps the output precision.
    pub fn psi_col<C: Ring>(&self, f: &LaurentSeries<C>) -> Result<LaurentSeries<C>> {
        if f.dmin() < 0 && !f.is_power_series() {
            let s = -f.dmin();
            let phis = self.phi.lift(f.ring_zero()).pow_trunc(s as u32, i32::MAX / 4)?;
            let g = f.mul(&phis)?;
            return Ok(self.psi_col(&g)?.shift(-s));
        }
        let zero = f.ring_zero().clone();
        let q = self.fld.q as i32;
        let top = f.dmax();
        let tables = self.psi_tables(top.max(0) as usize)?;
        let kmax = top.div_euclid(q);
        let mut out = vec![zero.zero_like(); (kmax + 1).max(1) as usize];
        for i in f.dmin().max(0)..=top {
            let fi = f.coeff(i)?;
            if exact_zero(&fi) {
                continue;
            }
            let si = &tables[i as usize];
            for k in 0..=si.dmax().min(kmax) {
                let c = si.coeff(k)?;
                if !exact_zero(&c) {
                    let slot = &mut out[k as usize];
                    *slot = slot.add(&fi.mul_scalar(&c));
                }
            }
        }
        if f.is_exact() {
            return Ok(LaurentSeries::polynomial(&zero, 0, out));
        }
        let base = f.coeffs().iter().filter(|c| !exact_zero(*c)).map(|c| c.val()).min().unwrap_or(qi(0)).min(qi(0));
        let lambda = Q::new(1, self.fld.e as i64 * (q as i64 - 1));
        for (k, c) in out.iter_mut().enumerate() {
            *c = c.cap_prec(base + lambda * qi((top + 1 - q * k as i32) as i64));
        }
        LaurentSeries::new(&zero, 0, out, false)
    }

    /// `psi_LT = pi^-1 psi_col`.
    pub fn psi_lt<C: Ring>(&self, f: &LaurentSeries<C>) -> Result<LaurentSeries<C>> {
        Ok(self.psi_col(f)?.mul_scalar(&self.fld.pi().inv()?))
    }

    /// `Psi = (pi/q) psi_LT = psi_col / q`, a left inverse of `phi`.
    pub fn big_psi<C: Ring>(&self, f: &LaurentSeries<C>) -> Result<LaurentSeries<C>> {
        Ok(self.psi_col(f)?.mul_scalar(&self.fld.from_i64(self.fld.q as i64).inv()?))
    }

    /// `psi_col` through the decomposition `f = sum_{i<q} phi(f_i) T^i` and
    /// the projection formula.
    pub fn psi_col_decompose<C: Ring>(&self, f: &LaurentSeries<C>) -> Result<LaurentSeries<C>> {
        let parts = self.phi_decompose_tpowers(f, 1)?;
        let tables = self.psi_tables(self.fld.q as usize)?;
        let zero = f.ring_zero();
        let mut acc: Option<LaurentSeries<C>> = None;
        for (i, fi) in parts.iter().enumerate() {
            let term = fi.mul(&tables[i].lift(zero))?;
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        acc.ok_or(Error::EmptyWindow)
    }

    /// Components `f_i`, `i < q^n`, with `f = sum phi^n(f_i) T^i`, by
    /// repeated Weierstrass division by `phi^n(T)`.
    pub fn phi_decompose_tpowers<C: Ring>(&self, f: &LaurentSeries<C>, n: u32) -> Result<Vec<LaurentSeries<C>>> {
        if !f.is_power_series() {
            return Err(Error::Unsupported("T-power decomposition of a series with a principal part".into()));
        }
        let zero = f.ring_zero().clone();
        let qn = (self.fld.q as usize).pow(n);
        let phin = self.phi_iterate(n, i32::MAX / 8)?;
        if !phin.is_exact() {
            return Err(Error::Unsupported("phi^n is not a polynomial".into()));
        }
        let phin = phin.lift(&zero);
        let d = qn as i32;
        let mut digits: Vec<LaurentSeries<C>> = Vec::new();
        let mut rem = f.clone();
        let mut exact = false;
        loop {
            if rem.is_exact() && rem.coeffs().iter().all(exact_zero) {
                exact = true;
                break;
            }
            if !rem.is_exact() && rem.dmax() < d {
                break;
            }
            let (qs, r) = phin.weierstrass_divide(&rem)?;
            digits.push(r);
            rem = qs;
        }
        let k = digits.len();
        if k == 0 && !exact {
            return Err(Error::EmptyWindow);
        }
        let mut out = Vec::with_capacity(qn);
        for i in 0..qn {
            let c: Vec<C> = digits.iter().map(|r| r.coeff(i as i32).unwrap_or_else(|_| zero.zero_like())).collect();
            let c = if c.is_empty() { vec![zero.zero_like()] } else { c };
            out.push(LaurentSeries::new(&zero, 0, c, exact)?);
        }
        Ok(out)
    }

    /// `sum phi^n(f_i) T^i`.
    pub fn recompose_tpowers<C: Ring>(&self, parts: &[LaurentSeries<C>], n: u32) -> Result<LaurentSeries<C>> {
        let mut acc: Option<LaurentSeries<C>> = None;
        for (i, fi) in parts.iter().enumerate() {
            let term = self.phi_apply_n(fi, n)?.shift(i as i32);
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        acc.ok_or(Error::EmptyWindow)
    }
}

/// Dense trivariate truncation used for the associativity check.
struct Tri {
    fld: &'static Field,
    k: i32,
}

type TriSeries = Vec<Scalar>;

impl Tri {
    fn new(fld: &'static Field, k: i32) -> Tri {
        Tri { fld, k }
    }

    fn len(&self) -> usize {
        let n = self.k as usize + 1;
        n * n * n
    }

    fn idx(&self, i: i32, j: i32, l: i32) -> usize {
        let n = self.k as usize + 1;
        (i as usize * n + j as usize) * n + l as usize
    }

    fn zero(&self) -> TriSeries {
        vec![self.fld.zero(); self.len()]
    }

    fn var(&self, which: usize) -> TriSeries {
        let mut t = self.zero();
        let e = [(which == 0) as i32, (which == 1) as i32, (which == 2) as i32];
        t[self.idx(e[0], e[1], e[2])] = self.fld.one();
        t
    }

    fn from_bi(&self, f: &Bivariate, v1: usize, v2: usize) -> TriSeries {
        let mut t = self.zero();
        for n in 0..=self.k {
            for b in 0..=n {
                let mut e = [0i32; 3];
                e[v1] = n - b;
                e[v2] = b;
                let i = self.idx(e[0], e[1], e[2]);
                t[i] = f.coeff(n - b, b);
            }
        }
        t
    }

    fn mul(&self, x: &TriSeries, y: &TriSeries) -> TriSeries {
        let mut r = self.zero();
        let k = self.k;
        for i1 in 0..=k {
            for j1 in 0..=(k - i1) {
                for l1 in 0..=(k - i1 - j1) {
                    let a = x[self.idx(i1, j1, l1)];
                    if a.is_zero() {
                        continue;
                    }
                    for i2 in 0..=(k - i1 - j1 - l1) {
                        for j2 in 0..=(k - i1 - j1 - l1 - i2) {
                            for l2 in 0..=(k - i1 - j1 - l1 - i2 - j2) {
                                let b = y[self.idx(i2, j2, l2)];
                                if b.is_zero() {
                                    continue;
                                }
                                let t = self.idx(i1 + i2, j1 + j2, l1 + l2);
                                r[t] = r[t] + a * b;
                            }
                        }
                    }
                }
            }
        }
        r
    }

    /// `F(x, y)` for trivariate `x`, `y` without constant term.
    fn compose(&self, f: &Bivariate, x: &TriSeries, y: &TriSeries) -> TriSeries {
        let k = self.k;
        let mut xp = vec![self.var_one()];
        let mut yp = vec![self.var_one()];
        for i in 1..=k as usize {
            xp.push(self.mul(&xp[i - 1], x));
            yp.push(self.mul(&yp[i - 1], y));
        }
        let mut r = self.zero();
        for n in 1..=k {
            for b in 0..=n {
                let c = f.coeff(n - b, b);
                if c.is_zero() {
                    continue;
                }
                let t = self.mul(&xp[(n - b) as usize], &yp[b as usize]);
                for (slot, v) in r.iter_mut().zip(t.iter()) {
                    *slot = *slot + c * *v;
                }
            }
        }
        r
    }

    fn var_one(&self) -> TriSeries {
        let mut t = self.zero();
        t[0] = self.fld.one();
        t
    }

    fn min_val_diff(&self, a: &TriSeries, b: &TriSeries) -> Q {
        let mut m = qi(INF as i64);
        for i in 0..=self.k {
            for j in 0..=(self.k - i) {
                for l in 0..=(self.k - i - j) {
                    let t = self.idx(i, j, l);
                    let dlt = a[t] - b[t];
                    if !dlt.is_zero() {
                        m = m.min(dlt.val());
                    }
                }
            }
        }
        m
    }
}
