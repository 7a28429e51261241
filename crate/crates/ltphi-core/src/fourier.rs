//! Characters `eta(a, T) = exp(a Omega log_LT(T))`, the Fourier chart of
//! distributions on `o_L`, and level-`n` charts of `Gamma_L`.
//!
//! `eta` is built as `exp(a Omega int(g))` where `g = 1 / dF/dY(T, 0)` is
//! the invariant differential; `g` is integral, so no denominators enter
//! before the exponential.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{exp_field, log_field, CoeffRing, Coefficient, Field, Q, Ring, Scalar, INF};
use crate::error::{Error, Result};
use crate::lt::{LTData, PhiKind};
use crate::series::{Interval, LaurentSeries};

type S = LaurentSeries<Scalar>;

/// How the period enters `eta`.
#[derive(Clone, Debug)]
pub enum OmegaConfig {
    /// A numerical period in `o_L`; meaningful when `L = Q_p`.
    ExactPeriod(Scalar),
    /// `Omega` kept as the formal generator of a coefficient ring.
    Symbolic(&'static CoeffRing),
}

/// Antiderivative with zero constant term.
fn integrate<C: Ring>(g: &LaurentSeries<C>) -> Result<LaurentSeries<C>> {
    if !g.is_power_series() {
        return Err(Error::Unsupported("integral of a principal part".into()));
    }
    let zero = g.ring_zero().zero_like();
    let fld = zero.field();
    let mut c = vec![zero.clone()];
    for k in 0..=g.dmax() {
        c.push(g.coeff(k)?.mul_scalar(&fld.from_i64(k as i64 + 1).inv()?));
    }
    LaurentSeries::new(&zero, 0, c, g.is_exact())
}

/// Invariant differential `1 / dF/dY(T, 0)` on `[0, d]`.
pub fn invariant_differential(lt: &LTData, d: i32) -> Result<S> {
    let fld = lt.field();
    if lt.kind() == PhiKind::Cyclotomic {
        return S::int_poly(fld, 0, &[1, 1]).inverse_to(d);
    }
    let law = lt.build_group_law_to(d + 1)?.value;
    let c: Vec<Scalar> = (0..=d).map(|a| law.coeff(a, 1)).collect();
    S::new(&fld.zero(), 0, c, false)?.inverse_to(d)
}

/// Fourier data for one Frobenius series and one period.
#[derive(Clone, Debug)]
pub struct Fourier {
    lt: LTData,
    omega: Scalar,
    /// `Omega * int(g)` on the window.
    omega_log: S,
    kappa: S,
}

impl Fourier {
    pub fn new(lt: LTData, omega: &OmegaConfig) -> Result<Fourier> {
        let OmegaConfig::ExactPeriod(om) = omega else {
            return Err(Error::Unsupported("symbolic period: use eta_symbolic".into()));
        };
        let fld = lt.field();
        if fld.e != 1 || fld.f != 1 {
            return Err(Error::ConfigMismatch("a numerical period needs L = Q_p".into()));
        }
        if !om.is_unit() {
            return Err(Error::NonUnit);
        }
        let d = lt.window();
        let g = invariant_differential(&lt, d - 1)?;
        let omega_log = integrate(&g)?.mul_scalar(om);
        let kappa = if lt.kind() == PhiKind::Cyclotomic && (*om - fld.one()).is_zero() {
            S::var(&fld.zero())
        } else {
            let eta1 = omega_log.exp_to(d)?;
            check_integral(&eta1)?;
            eta1.sub(&S::one(&fld.zero()))?.comp_inverse()?
        };
        Ok(Fourier { lt, omega: *om, omega_log, kappa })
    }

    pub fn lt(&self) -> &LTData {
        &self.lt
    }

    pub fn omega(&self) -> Scalar {
        self.omega
    }

    pub fn window(&self) -> i32 {
        self.lt.window()
    }

    /// `eta(a, T)` on `[0, d]`; `a` must be integral.
    pub fn eta(&self, a: &Scalar) -> Result<S> {
        if !a.is_integral() {
            return Err(Error::NonUnit);
        }
        let fld = self.lt.field();
        if a.is_zero() && a.is_exact_zero() {
            return Ok(S::one(&fld.zero()));
        }
        let r = self.omega_log.mul_scalar(a).exp_to(self.window())?;
        check_integral(&r)?;
        Ok(r)
    }

    /// `eta(a, T)` for an integer `a`; exact `(1+T)^a` in the cyclotomic
    /// case with `Omega = 1`.
    pub fn eta_int(&self, a: i64) -> Result<S> {
        let fld = self.lt.field();
        let cyc1 = self.lt.kind() == PhiKind::Cyclotomic && (self.omega - fld.one()).is_zero();
        if !cyc1 {
            return self.eta(&fld.from_i64(a));
        }
        let base = S::int_poly(fld, 0, &[1, 1]);
        if a >= 0 {
            return base.pow_trunc(a as u32, i32::MAX / 8);
        }
        base.pow_trunc((-a) as u32, i32::MAX / 8)?.inverse_to(self.window())
    }

    /// `kappa = (eta(1, T) - 1)^(-1)` under composition: the Fourier image
    /// of the variable of the chart.
    pub fn kappa(&self) -> &S {
        &self.kappa
    }

    /// Dirac distribution at `a` as a series in the chart variable `Z`.
    pub fn dirac(&self, a: &Scalar) -> Result<S> {
        self.eta(a)
    }

    /// Total mass.
    pub fn augmentation(&self, lambda: &S) -> Result<Scalar> {
        lambda.coeff(0)
    }

    /// `lambda` lies in the ideal generated by `phi^n(Z)`.
    pub fn in_zn_ideal(&self, lambda: &S, n: u32) -> Result<bool> {
        let zn = self.lt.phi_iterate(n, self.window())?;
        let (_, r) = zn.weierstrass_divide(lambda)?;
        Ok(r.coeffs().iter().all(|c| c.is_zero()))
    }

    /// Rank of `o_L[[Z]] / phi^n(Z)` over `o_L`.
    pub fn quotient_rank(&self, n: u32) -> Result<i32> {
        self.lt.phi_iterate(n, self.window())?.weierstrass_degree()
    }

    /// Coordinates `f = sum_a phi^n(f_a) eta(a, T)` over `a < q^n`.
    pub fn decompose_eta(&self, f: &S, n: u32) -> Result<Vec<S>> {
        let fld = self.lt.field();
        let m = self.lt.q().pow(n) as usize;
        let g = self.lt.phi_decompose_tpowers(f, n)?;
        let mut h = Vec::with_capacity(m);
        for a in 0..m {
            h.push(self.lt.phi_decompose_tpowers(&self.eta_int(a as i64)?, n)?);
        }
        let k = g.iter().map(|s| s.dmax()).min().ok_or(Error::EmptyWindow)?;
        // Solve sum_a f_a h[a][b] = g[b] degree by degree in X.
        let h0 = crate::linalg::Mat::from_cols(
            fld,
            m,
            &(0..m).map(|a| (0..m).map(|b| h[a][b].coeff(0)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?,
        );
        // h0[b][a] = constant term of h[a][b]; rows b, columns a.
        let inv = invert(&h0)?;
        let mut fa: Vec<Vec<Scalar>> = vec![Vec::new(); m];
        for deg in 0..=k {
            let mut rhs = Vec::with_capacity(m);
            for b in 0..m {
                let mut s = g[b].coeff(deg)?;
                for (a, fa_a) in fa.iter().enumerate() {
                    for (i, c) in fa_a.iter().enumerate() {
                        let j = deg - i as i32;
                        if j >= 1 {
                            s = s - *c * h[a][b].coeff(j)?;
                        }
                    }
                }
                rhs.push(s);
            }
            let sol = inv.apply(&rhs);
            for a in 0..m {
                fa[a].push(sol[a]);
            }
        }
        fa.into_iter().map(|c| S::new(&fld.zero(), 0, c, false)).collect()
    }

    pub fn recompose_eta(&self, parts: &[S], n: u32) -> Result<S> {
        let mut acc = S::exact_zero(&self.lt.field().zero());
        for (a, fa) in parts.iter().enumerate() {
            let t = self.lt.phi_apply_n(fa, n)?.mul(&self.eta_int(a as i64)?)?;
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }
}

fn invert(m: &crate::linalg::Mat) -> Result<crate::linalg::Mat> {
    let n = m.rows();
    let s = crate::linalg::snf(m, INF)?;
    if s.rank < n {
        return Err(Error::NoSolution("singular coefficient matrix".into()));
    }
    let fld = m.field();
    let mut dinv = crate::linalg::Mat::zeros(fld, n, n);
    for i in 0..n {
        dinv.set(i, i, s.diag[i].inv()?);
    }
    Ok(s.v.mul(&dinv).mul(&s.u))
}

fn check_integral(s: &S) -> Result<()> {
    for (i, c) in s.coeffs().iter().enumerate() {
        if !c.is_zero() && c.v() < 0 {
            return Err(Error::IntegralityViolation { degree: (s.dmin() + i as i32) as i64 });
        }
    }
    Ok(())
}

/// `eta(a, T)` with `Omega` the formal generator of `ring`.
pub fn eta_symbolic(lt: &LTData, ring: &'static CoeffRing, a: &Scalar) -> Result<LaurentSeries<Coefficient>> {
    let g = invariant_differential(lt, lt.window() - 1)?;
    let w = ring.omega().mul_scalar(a);
    integrate(&g)?.lift(&ring.scalar(lt.field().zero())).scale(&w).exp_to(lt.window())
}

/// Outcome of the digit search for a period.
#[derive(Clone, Debug)]
pub struct PeriodSolution {
    pub omega: Scalar,
    /// `eta(1) eta(2) = eta(3)` residual valuation on the prefix carrying
    /// the requested digits.
    pub multiplicativity: Q,
    /// `(pi/q) psi_LT(eta(pi a)) = eta(a)` residual valuation at `a = 1`.
    pub psi_compat: Q,
    /// Integrality floor of `eta(1)` on that prefix.
    pub integrality: Q,
}

/// Digit search for `Omega` in `o_L^x` with `Omega = 1 mod pi`, keeping
/// `exp(Omega log_LT)` integral.
pub fn solve_period(lt: &LTData, n_digits: i32) -> Result<PeriodSolution> {
    let fld = lt.field();
    if fld.e != 1 || fld.f != 1 {
        return Err(Error::NoSolution("the period does not lie in L".into()));
    }
    let d = lt.window();
    let g = invariant_differential(lt, d - 1)?;
    let ig = integrate(&g)?;
    let p = fld.p as i64;
    // The integrality test needs a prefix reaching past degree q.
    let min_deg = (lt.q() as i32 + 1).min(d);
    let mut omega = fld.one();
    let mut pk = fld.pi();
    for _ in 1..n_digits {
        let mut found = None;
        for digit in 0..p {
            let cand = omega + pk.scale_i64(digit);
            let eta = reliable_prefix(&ig.mul_scalar(&cand).exp_to(d)?, n_digits)?;
            if check_integral(&eta).is_ok() && eta.dmax() >= min_deg {
                found = Some(cand);
                break;
            }
        }
        omega = found.ok_or_else(|| Error::NoSolution(format!("no digit keeps eta integral at precision {}", fld.n)))?;
        pk = pk * fld.pi();
    }
    let four = Fourier::new(lt.clone(), &OmegaConfig::ExactPeriod(omega))?;
    let (e1, e2, e3) = (four.eta_int(1)?, four.eta_int(2)?, four.eta_int(3)?);
    let mult = e1.mul(&e2)?.sub(&e3)?;
    let e_pi = four.eta(&fld.pi())?;
    let back = reliable_prefix(&lt.big_psi(&e_pi)?, fld.n)?.sub(&e1)?;
    let e1p = reliable_prefix(&four.eta(&fld.one())?, n_digits)?;
    if e1p.dmax() < min_deg {
        return Err(Error::NoSolution(format!("eta carries {} digits only below degree {}", n_digits, e1p.dmax() + 1)));
    }
    Ok(PeriodSolution {
        omega,
        multiplicativity: floor_of(&reliable_prefix(&mult, n_digits)?),
        psi_compat: floor_of(&back),
        integrality: e1p.coeffs().iter().map(|c| if c.is_zero() { c.prec_q() } else { c.val() }).min().unwrap_or(Q::from_integer(0)),
    })
}

/// Longest initial window whose coefficients all carry `n` pi-digits.
pub fn reliable_prefix(s: &S, n: i32) -> Result<S> {
    let k = s.coeffs().iter().position(|c| c.prec() < n).map_or(s.dmax(), |i| s.dmin() + i as i32 - 1);
    s.truncate(k)
}

/// `min` over coefficients of the valuation, zeros counted at their precision.
pub fn floor_of<C: Ring>(s: &LaurentSeries<C>) -> Q {
    s.coeffs().iter().map(|c| if c.is_zero() { c.prec_q() } else { c.val() }).min().unwrap_or(Q::from_integer(INF as i64))
}

/// Level-`n` chart of `Gamma_L`: `gamma <-> alpha(gamma) = log chi(gamma) / pi^n`.
#[derive(Clone, Copy, Debug)]
pub struct GammaChart {
    fld: &'static Field,
    n: u32,
    u: Scalar,
}

impl GammaChart {
    /// Smallest level where `exp` and `log` are inverse bijections.
    pub fn n0(fld: &Field) -> u32 {
        fld.e / (fld.p as u32 - 1) + 1
    }

    pub fn new(fld: &'static Field, n: u32) -> Result<GammaChart> {
        if n < Self::n0(fld) {
            return Err(Error::ConvergenceDomain(format!("level {n} below {}", Self::n0(fld))));
        }
        let u = exp_field(&fld.pi().pow(n as u64))?;
        Ok(GammaChart { fld, n, u })
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    /// `chi(gamma_n) = exp(pi^n)`.
    pub fn generator(&self) -> Scalar {
        self.u
    }

    pub fn chi(&self, alpha: &Scalar) -> Result<Scalar> {
        exp_field(&(*alpha * self.fld.pi().pow(self.n as u64)))
    }

    pub fn alpha(&self, chi: &Scalar) -> Result<Scalar> {
        let y = *chi - self.fld.one();
        if !y.is_zero() && y.v() < self.n as i32 {
            return Err(Error::ConvergenceDomain(format!("character not in Gamma_{}", self.n)));
        }
        Ok(log_field(chi)? * self.fld.pi().pow(self.n as u64).inv()?)
    }

    /// `(chi - 1) / pi^n`.
    pub fn beta(&self, chi: &Scalar) -> Result<Scalar> {
        Ok((*chi - self.fld.one()) * self.fld.pi().pow(self.n as u64).inv()?)
    }
}

/// `f([chi](T))`.
pub fn act_gamma_series(lt: &LTData, chi: &Scalar, f: &S) -> Result<S> {
    let e = lt.build_endomorphism(chi)?.value;
    f.compose_trunc(&e, lt.window().max(f.dmax()))
}

/// `sum_k lambda_k A^k f` with the constant term of `lambda` acting as
/// the identity.
pub fn apply_dist(lambda: &S, a: &dyn Fn(&S) -> Result<S>, f: &S) -> Result<S> {
    let mut acc = f.mul_scalar(&lambda.coeff(0)?);
    let mut term = f.clone();
    for k in 1..=lambda.dmax() {
        term = a(&term)?;
        let c = lambda.coeff(k)?;
        if !c.is_exact_zero() {
            acc = acc.add(&term.mul_scalar(&c))?;
        }
    }
    Ok(acc)
}

/// `H_n(Z_n) m = kappa(H_n(gamma_n) - 1) m` with
/// `H_n(gamma) m = eta((chi(gamma) - 1)/pi^n, T) gamma(m)`.
pub fn h_n_operator(four: &Fourier, chart: &GammaChart, m: &S) -> Result<S> {
    let lt = four.lt();
    let chi = chart.generator();
    let eta = four.eta(&chart.beta(&chi)?)?;
    let endo = lt.build_endomorphism(&chi)?.value;
    let d = lt.window();
    let a = |x: &S| -> Result<S> {
        let top = d.max(x.dmax());
        x.compose_trunc(&endo, top)?.mul(&eta)?.sub(x)
    };
    apply_dist(four.kappa(), &a, m)
}

/// Operator gap on monomials `T^j`, `j` in a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorGap {
    pub gap: Q,
    /// Columns used.
    pub interior: (i32, i32),
    /// Columns whose image valuation was attained at a truncation boundary,
    /// or whose image is known on no window.
    pub excluded: Vec<i32>,
}

/// `min_j (w_I(O T^j) - w_I(T^j))` over `j` in `[lo + margin, hi - margin]`.
pub fn operator_valuation(
    op: &dyn Fn(&S) -> Result<S>,
    fld: &'static Field,
    lo: i32,
    hi: i32,
    margin: i32,
    interval: &Interval,
) -> Result<OperatorGap> {
    let (a, b) = (lo + margin, hi - margin);
    if a > b {
        return Err(Error::EmptyInterior);
    }
    let mut gap: Option<Q> = None;
    let mut excluded = Vec::new();
    for j in a..=b {
        let e = S::monomial(fld.one(), j);
        let img = match op(&e) {
            Ok(img) => img,
            Err(Error::EmptyWindow) => {
                excluded.push(j);
                continue;
            }
            Err(e) => return Err(e),
        };
        let w = img.annulus_valuation(interval);
        if w.boundary {
            excluded.push(j);
            continue;
        }
        let g = w.value - e.annulus_valuation(interval).value;
        gap = Some(gap.map_or(g, |x: Q| x.min(g)));
    }
    let gap = gap.ok_or(Error::EmptyInterior)?;
    Ok(OperatorGap { gap, interior: (a, b), excluded })
}
