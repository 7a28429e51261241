//! Free (phi, Gamma)-modules with constant phi-matrix.
//!
//! Elements are vectors of Laurent series in a basis `e_1..e_d` with
//! `phi(e_j) = sum_i P_ij e_i`. Artinian coefficients `K[eps]/eps^m` are
//! handled by restriction of scalars: basis `eps^k e_i`, index `i*m + k`.
//!
//! Operators are also assembled as matrices on the truncation
//! `M_W = (o[[T]] / T^W)^d`, coordinate `c*W + j` for `T^j e_c`. `phi`,
//! `gamma` and `Z` are well defined there; `Psi` is not, and its matrix
//! `M_W -> M_W'` is only reliable for `W' <= (W - N e (q-1)) / q`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{teichmueller, Coefficient, Field, Q, Scalar};
use crate::error::{Error, Result};
use crate::fourier::{Fourier, GammaChart};
use crate::linalg::{kernel, saturate, snf, Lattice, Mat};
use crate::lt::LTData;
use crate::series::{Interval, LaurentSeries};

type S = LaurentSeries<Scalar>;

/// Vector of components in the module basis.
#[derive(Clone, Debug)]
pub struct ModuleElement {
    pub comps: Vec<S>,
}

impl ModuleElement {
    pub fn new(comps: Vec<S>) -> ModuleElement {
        ModuleElement { comps }
    }

    pub fn basis(fld: &'static Field, d: usize, i: usize, deg: i32) -> ModuleElement {
        let comps = (0..d).map(|c| if c == i { S::monomial(fld.one(), deg) } else { S::exact_zero(&fld.zero()) }).collect();
        ModuleElement { comps }
    }

    pub fn sub(&self, o: &ModuleElement) -> Result<ModuleElement> {
        Ok(ModuleElement { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.sub(b)).collect::<Result<_>>()? })
    }

    pub fn add(&self, o: &ModuleElement) -> Result<ModuleElement> {
        Ok(ModuleElement { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect::<Result<_>>()? })
    }

    /// Multiplication by a ring element.
    pub fn scale(&self, f: &S) -> Result<ModuleElement> {
        Ok(ModuleElement { comps: self.comps.iter().map(|a| a.mul(f)).collect::<Result<_>>()? })
    }

    /// Smallest valuation over all components, zeros counted at their precision.
    pub fn floor(&self) -> Q {
        self.comps.iter().map(crate::fourier::floor_of).min().unwrap_or(Q::from_integer(crate::arith::INF as i64))
    }

    /// Coordinates on `M_W`.
    pub fn to_coords(&self, w: usize) -> Result<Vec<Scalar>> {
        let mut out = Vec::with_capacity(self.comps.len() * w);
        for c in &self.comps {
            for j in 0..w {
                out.push(c.coeff(j as i32)?);
            }
        }
        Ok(out)
    }

    pub fn from_coords(fld: &'static Field, x: &[Scalar], w: usize) -> ModuleElement {
        let comps = x.chunks(w).map(|c| S::new(&fld.zero(), 0, c.to_vec(), false).expect("nonempty window")).collect();
        ModuleElement { comps }
    }
}

/// Action of `Gamma_L` on the basis.
#[derive(Clone, Debug)]
pub enum GammaData {
    /// `gamma(e) = chi(gamma)^weight e` on every basis vector.
    Character { weight: i64 },
    /// `gamma_n(e_j) = sum_i G_ij e_i` for the chart generator; powers
    /// `gamma_n^k` with small integer `k` only.
    Matrices { level: u32, generator: Mat },
}

#[derive(Clone, Debug)]
pub struct PhiGammaModule {
    four: Fourier,
    p: Mat,
    p_inv: Mat,
    gamma: GammaData,
    eps_m: u32,
    interval: Interval,
}

fn invert(m: &Mat) -> Result<Mat> {
    let n = m.rows();
    let s = snf(m, crate::arith::INF)?;
    if s.rank < n {
        return Err(Error::NonUnitDet);
    }
    let mut dinv = Mat::zeros(m.field(), n, n);
    for i in 0..n {
        dinv.set(i, i, s.diag[i].inv()?);
    }
    Ok(s.v.mul(&dinv).mul(&s.u))
}

impl PhiGammaModule {
    pub fn new(four: Fourier, p: Mat, gamma: GammaData, eps_m: u32, interval: Interval) -> Result<PhiGammaModule> {
        if p.rows() != p.cols() || p.rows() == 0 {
            return Err(Error::ConfigMismatch("phi-matrix must be square".into()));
        }
        let p_inv = invert(&p)?;
        if let GammaData::Matrices { generator, .. } = &gamma {
            if generator.rows() != p.rows() || generator.cols() != p.cols() {
                return Err(Error::ConfigMismatch("gamma matrix shape".into()));
            }
            // Constant matrices: phi gamma = gamma phi iff P G = G P.
            let r = p.mul(generator).sub(&generator.mul(&p)).residual();
            if r < p.field().n_q() {
                return Err(Error::ConfigMismatch(format!("phi and gamma do not commute (residual {r})")));
            }
        }
        Ok(PhiGammaModule { four, p, p_inv, gamma, eps_m, interval })
    }

    /// `R` itself.
    pub fn trivial(four: Fourier, interval: Interval) -> Result<PhiGammaModule> {
        let fld = four.lt().field();
        Self::new(four, Mat::identity(fld, 1), GammaData::Character { weight: 0 }, 1, interval)
    }

    /// `R(delta)` over `K[eps]/eps^m` with `delta(pi) = delta_pi`, restricted
    /// to a rank-`m` module over `R`.
    pub fn twist(four: Fourier, delta_pi: &Coefficient, weight: i64, interval: Interval) -> Result<PhiGammaModule> {
        let fld = four.lt().field();
        let ring = delta_pi.ring();
        if ring.has_omega() {
            return Err(Error::Unsupported("twist by a coefficient involving Omega".into()));
        }
        let m = ring.eps_m.max(1);
        let mut p = Mat::zeros(fld, m as usize, m as usize);
        for (&(i, k), c) in delta_pi.terms() {
            if i != 0 {
                return Err(Error::Unsupported("twist by a coefficient involving Omega".into()));
            }
            for j in 0..(m - k) {
                p.set((j + k) as usize, j as usize, *c);
            }
        }
        Self::new(four, p, GammaData::Character { weight }, m, interval)
    }

    pub fn four(&self) -> &Fourier {
        &self.four
    }

    pub fn lt(&self) -> &LTData {
        self.four.lt()
    }

    pub fn field(&self) -> &'static Field {
        self.lt().field()
    }

    pub fn rank(&self) -> usize {
        self.p.rows()
    }

    pub fn eps_m(&self) -> u32 {
        self.eps_m
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn phi_matrix(&self) -> &Mat {
        &self.p
    }

    pub fn gamma_data(&self) -> &GammaData {
        &self.gamma
    }

    /// Same data over `K[eps]/eps^m2`, `m2 <= m`: basis vectors with
    /// `eps` power below `m2`.
    pub fn base_change(&self, m2: u32) -> Result<PhiGammaModule> {
        if m2 == 0 || m2 > self.eps_m {
            return Err(Error::ConfigMismatch(format!("cannot map eps^{} to eps^{m2}", self.eps_m)));
        }
        let idx = self.eps_indices(m2);
        let p = self.p.select_rows(&idx).select_cols(&idx);
        let gamma = match &self.gamma {
            GammaData::Character { weight } => GammaData::Character { weight: *weight },
            GammaData::Matrices { level, generator } => {
                GammaData::Matrices { level: *level, generator: generator.select_rows(&idx).select_cols(&idx) }
            }
        };
        Self::new(self.four.clone(), p, gamma, m2, self.interval)
    }

    /// Basis indices `i*m + k` with `k < m2`.
    pub fn eps_indices(&self, m2: u32) -> Vec<usize> {
        let m = self.eps_m as usize;
        (0..self.rank()).filter(|c| ((c % m) as u32) < m2).collect()
    }

    /// Matrix of `gamma` on the basis for `chi(gamma) = chi`.
    pub fn gamma_basis_matrix(&self, chi: &Scalar) -> Result<Mat> {
        let fld = self.field();
        match &self.gamma {
            GammaData::Character { weight } => {
                let c = if *weight >= 0 { chi.pow(*weight as u64) } else { chi.inv()?.pow((-*weight) as u64) };
                Ok(Mat::scalar(fld, self.rank(), c))
            }
            GammaData::Matrices { level, generator } => {
                let chart = GammaChart::new(fld, *level)?;
                let a = chart.alpha(chi)?;
                let k = (-8i64..=8)
                    .find(|k| a.eq_to(&fld.from_i64(*k), fld.n))
                    .ok_or_else(|| Error::Unsupported("explicit gamma matrices act through integer powers only".into()))?;
                let base = if k >= 0 { generator.clone() } else { invert(generator)? };
                let mut r = Mat::identity(fld, self.rank());
                for _ in 0..k.unsigned_abs() {
                    r = r.mul(&base);
                }
                Ok(r)
            }
        }
    }

    fn combine(&self, m: &Mat, x: &[S]) -> Result<ModuleElement> {
        let zero = self.field().zero();
        let mut comps = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let mut acc = S::exact_zero(&zero);
            for (j, xj) in x.iter().enumerate() {
                let c = m.get(i, j);
                if !c.is_exact_zero() {
                    acc = acc.add(&xj.mul_scalar(&c))?;
                }
            }
            comps.push(acc);
        }
        Ok(ModuleElement { comps })
    }

    pub fn act_phi(&self, m: &ModuleElement) -> Result<ModuleElement> {
        let lt = self.lt();
        let x: Vec<S> = m.comps.iter().map(|c| lt.phi_apply(c)).collect::<Result<_>>()?;
        self.combine(&self.p, &x)
    }

    pub fn act_gamma(&self, chi: &Scalar, m: &ModuleElement) -> Result<ModuleElement> {
        let lt = self.lt();
        let e = lt.build_endomorphism(chi)?.value;
        let x: Vec<S> = m.comps.iter().map(|c| c.compose_trunc(&e, lt.window().max(c.dmax()))).collect::<Result<_>>()?;
        self.combine(&self.gamma_basis_matrix(chi)?, &x)
    }

    /// `Psi(x) = psi_col(P^-1 x) / q` entrywise.
    pub fn act_psi(&self, m: &ModuleElement) -> Result<ModuleElement> {
        let y = self.combine(&self.p_inv, &m.comps)?;
        let lt = self.lt();
        Ok(ModuleElement { comps: y.comps.iter().map(|c| lt.big_psi(c)).collect::<Result<_>>()? })
    }

    fn dim(&self, w: usize) -> usize {
        self.rank() * w
    }

    /// Block matrix `B (x) S` with `S` the `w_out x w_in` series-level matrix.
    fn kron(&self, b: &Mat, s: &Mat) -> Mat {
        let (d, wi, wo) = (self.rank(), s.cols(), s.rows());
        let mut r = Mat::zeros(self.field(), d * wo, d * wi);
        for i in 0..d {
            for j in 0..d {
                let c = b.get(i, j);
                if c.is_exact_zero() {
                    continue;
                }
                for a in 0..wo {
                    for k in 0..wi {
                        let x = s.get(a, k);
                        if !x.is_exact_zero() {
                            r.set(i * wo + a, j * wi + k, c * x);
                        }
                    }
                }
            }
        }
        r
    }

    /// `w_out x w_in` matrix whose column `k` is `images[k]` truncated.
    fn series_matrix(&self, images: &[S], w_out: usize) -> Result<Mat> {
        let fld = self.field();
        let mut m = Mat::zeros(fld, w_out, images.len());
        for (k, s) in images.iter().enumerate() {
            for a in 0..w_out {
                m.set(a, k, s.coeff(a as i32)?);
            }
        }
        Ok(m)
    }

    /// Substitution matrix `T^k -> g^k` on `o[[T]]/T^w`.
    fn substitution(&self, g: &S, w: usize) -> Result<Mat> {
        let top = w as i32 - 1;
        let mut pw = S::one(&self.field().zero());
        let mut imgs = Vec::with_capacity(w);
        for _ in 0..w {
            imgs.push(pw.clone());
            pw = trunc_mul(&pw, g, top)?;
        }
        self.series_matrix(&imgs, w)
    }

    pub fn identity_mat(&self, w: usize) -> Mat {
        Mat::identity(self.field(), self.dim(w))
    }

    /// `phi` on `M_w`.
    pub fn phi_mat(&self, w: usize) -> Result<Mat> {
        let s = self.substitution(self.lt().phi(), w)?;
        Ok(self.kron(&self.p, &s))
    }

    /// `gamma` with `chi(gamma) = chi` on `M_w`.
    pub fn gamma_mat(&self, chi: &Scalar, w: usize) -> Result<Mat> {
        let e = self.lt().build_endomorphism(chi)?.value;
        if (e.dmax() as usize) + 1 < w {
            return Err(Error::WindowUnderflow(format!("endomorphism known to degree {} < {}", e.dmax(), w - 1)));
        }
        let s = self.substitution(&e, w)?;
        Ok(self.kron(&self.gamma_basis_matrix(chi)?, &s))
    }

    /// `Psi : M_w_in -> M_w_out`.
    pub fn psi_mat(&self, w_in: usize, w_out: usize) -> Result<Mat> {
        let lt = self.lt();
        let tables = lt.psi_tables(w_in.saturating_sub(1))?;
        let fld = self.field();
        let qinv = fld.from_i64(fld.q as i64).inv()?;
        let imgs: Vec<S> = tables.iter().map(|t| t.mul_scalar(&qinv)).collect();
        let s = self.series_matrix(&imgs, w_out)?;
        Ok(self.kron(&self.p_inv, &s))
    }

    /// Truncation `M_w_in -> M_w_out`, `w_out <= w_in`.
    pub fn restrict_mat(&self, w_in: usize, w_out: usize) -> Mat {
        let fld = self.field();
        let mut s = Mat::zeros(fld, w_out, w_in);
        for a in 0..w_out.min(w_in) {
            s.set(a, a, fld.one());
        }
        self.kron(&Mat::identity(fld, self.rank()), &s)
    }

    /// `Z_n = kappa(gamma_n - 1)` on `M_w`.
    pub fn z_mat(&self, chart: &GammaChart, w: usize) -> Result<Mat> {
        let a = self.gamma_mat(&chart.generator(), w)?.sub(&self.identity_mat(w));
        dist_of_matrix(self.four.kappa(), &a, self.field().n)
    }

    /// `f(A) = sum_k f_k A^k` for a series `f` in the chart variable.
    pub fn series_of_mat(&self, f: &S, a: &Mat) -> Result<Mat> {
        dist_of_matrix(f, a, self.field().n)
    }

    /// Polynomials `c_i = T^i - phi(Psi(T^i))`, `1 <= i < q`; `ker Psi` on
    /// `o[[T]]` has basis `c_i phi(T)^k`.
    pub fn psi_kernel_generators(&self) -> Result<Vec<S>> {
        let lt = self.lt();
        let fld = self.field();
        (1..fld.q as i32)
            .map(|i| {
                let t = S::monomial(fld.one(), i);
                t.sub(&lt.phi_apply(&lt.big_psi(&t)?)?)
            })
            .collect()
    }

    /// Saturated image of `ker Psi` in `M_w`, from the generators
    /// `c_i phi(T)^k e_c` with `i + qk < top`.
    fn psi_kernel_span(&self, w: usize, top: usize) -> Result<Mat> {
        let fld = self.field();
        let gens = self.psi_kernel_generators()?;
        let q = fld.q as usize;
        let cut = w as i32 - 1;
        let mut cols = Vec::new();
        for (i0, c) in gens.iter().enumerate() {
            let i = i0 + 1;
            let mut pw = c.truncate(cut)?;
            let mut k = 0;
            while i + q * k < top {
                for comp in 0..self.rank() {
                    let mut e = vec![S::exact_zero(&fld.zero()); self.rank()];
                    e[comp] = pw.clone();
                    cols.push(ModuleElement::new(e).to_coords(w)?);
                }
                pw = trunc_mul(&pw, self.lt().phi(), cut)?;
                k += 1;
            }
        }
        let b = Mat::from_cols(fld, self.dim(w), &cols);
        saturate(&b, fld.n)
    }

    /// `ker Psi` on `M_w`, including generators whose leading term lies
    /// past `w` but which survive mod `pi^N`.
    pub fn psi_kernel_basis(&self, w: usize) -> Result<PsiKernel> {
        let fld = self.field();
        let extra = (fld.n as usize) * (fld.q as usize - 1);
        let basis = self.psi_kernel_span(w, w + extra)?;
        let expected = self.rank() * (fld.q as usize - 1) * (w / fld.q as usize);
        let slack = basis.cols() as i64 - expected as i64;
        Ok(PsiKernel { basis, w, slack })
    }

    /// Checks `Psi` kills the basis on a reliable window.
    pub fn psi_kernel_residual(&self, k: &PsiKernel) -> Result<Q> {
        let w_out = psi_window(self.field(), k.w);
        if w_out == 0 {
            return Err(Error::EmptyInterior);
        }
        Ok(self.psi_mat(k.w, w_out)?.mul(&k.basis).residual())
    }

    /// `Z_n` on the interior part of `ker Psi` (generators with
    /// `i + qk + margin < w`), written in coordinates of `ker Psi` on `M_w`.
    pub fn z_on_psi_kernel(&self, chart: &GammaChart, w: usize, margin: usize) -> Result<ZCertificate> {
        let fld = self.field();
        let tol = fld.n;
        if margin >= w {
            return Err(Error::EmptyInterior);
        }
        let full = self.psi_kernel_basis(w)?;
        let inner = self.psi_kernel_span(w, w - margin)?;
        if inner.cols() == 0 {
            return Err(Error::EmptyInterior);
        }
        let z = self.z_mat(chart, w)?;
        let lat = Lattice::new(full.basis.clone(), tol)?;
        let (y, leak) = lat.coords(&z.mul(&inner))?;
        let s = snf(&y, tol)?;
        let divisors = s.divisors();
        let rank_deficit = inner.cols() - s.rank;
        let invertible = rank_deficit == 0 && s.all_units() && leak >= fld.n_q();
        Ok(ZCertificate {
            level: chart.level(),
            kernel_dim: full.basis.cols(),
            interior_dim: inner.cols(),
            divisors,
            rank_deficit,
            leak,
            slack: (full.basis.cols() - inner.cols()) as i64,
            invertible,
        })
    }

    /// `M` over `[r, s]` reread over `[r, s^(1/q)]`.
    pub fn extend_model(&self) -> Result<PhiGammaModule> {
        let i = self.interval;
        let Some(t_r) = i.t_r else {
            return Ok(self.clone());
        };
        let q = Q::from_integer(self.field().q as i64);
        // s >= r^(1/q) in radii is t_s <= t_r / q.
        if i.t_s > t_r / q {
            return Err(Error::IntervalOverlapViolation);
        }
        let mut m = self.clone();
        m.interval = Interval::new(i.t_s / q, t_r)?;
        Ok(m)
    }

    /// Back to a sub-interval; data unchanged.
    pub fn restrict_model(&self, to: Interval) -> Result<PhiGammaModule> {
        if !self.interval.contains(&to) {
            return Err(Error::IntervalOverlapViolation);
        }
        let mut m = self.clone();
        m.interval = to;
        Ok(m)
    }

    /// Image of the averaging idempotent over `Delta = mu_(q-1)` on `M_w`.
    pub fn delta_invariants(&self, w: usize) -> Result<DeltaInvariants> {
        let fld = self.field();
        if fld.e as u64 >= fld.p - 1 {
            return Err(Error::TorsionNotSplit);
        }
        let group = teichmueller_group(fld)?;
        let n = self.dim(w);
        let mut avg = Mat::zeros(fld, n, n);
        for z in &group {
            avg = avg.add(&self.gamma_mat(z, w)?);
        }
        let avg = avg.scale(&fld.from_i64(group.len() as i64).inv()?);
        let idem = avg.mul(&avg).sub(&avg).residual();
        let tol = fld.n;
        let basis = kernel(&self.identity_mat(w).sub(&avg), tol)?;
        Ok(DeltaInvariants { averaging: avg, basis, idempotent_residual: idem, order: group.len() })
    }
}

/// `sum_k f_k A^k`, stopping once `A^k` vanishes to the precision the
/// remaining coefficients require.
pub fn dist_of_matrix(f: &S, a: &Mat, n_digits: i32) -> Result<Mat> {
    let fld = a.field();
    let tol = fld.to_q(n_digits + 2);
    let zero = Q::from_integer(0);
    let floor_from = |k: i32| -> Q {
        (k..=f.dmax()).filter_map(|j| f.coeff(j).ok()).filter(|c| !c.is_zero()).map(|c| c.val()).min().unwrap_or(zero).min(zero)
    };
    let mut acc = Mat::scalar(fld, a.rows(), f.coeff(0)?);
    let mut pw = Mat::identity(fld, a.rows());
    for k in 1..=f.dmax() {
        pw = pw.mul(a);
        if pw.residual() + floor_from(k) >= tol {
            return Ok(acc);
        }
        let c = f.coeff(k)?;
        if !c.is_exact_zero() {
            acc = acc.add(&pw.scale(&c));
        }
    }
    if f.is_exact() {
        return Ok(acc);
    }
    let gap = pw.residual() / Q::from_integer(f.dmax().max(1) as i64);
    Err(Error::NotNilpotent { gap })
}

/// Product mod `T^(top+1)` of power series; zero once the valuation
/// passes `top`.
pub fn trunc_mul(a: &S, b: &S, top: i32) -> Result<S> {
    if a.dmin() + b.dmin() > top {
        return Ok(S::exact_zero(a.ring_zero()));
    }
    a.mul_trunc(b, top)
}

/// Largest `w'` with `Psi : M_w -> M_w'` reliable to `N` digits.
pub fn psi_window(fld: &Field, w: usize) -> usize {
    let loss = (fld.n as i64 * (fld.q as i64 - 1)).max(0);
    let top = w as i64 - loss;
    if top <= 0 {
        0
    } else {
        (top / fld.q as i64) as usize
    }
}

/// Teichmueller representatives of the residue field units.
pub fn teichmueller_group(fld: &'static Field) -> Result<Vec<Scalar>> {
    let f = fld.f as usize;
    let p = fld.p;
    let mut out = Vec::new();
    let total = p.pow(f as u32);
    for idx in 1..total {
        let mut r = vec![0u64; f];
        let mut x = idx;
        for slot in r.iter_mut() {
            *slot = x % p;
            x /= p;
        }
        out.push(teichmueller(fld, &r)?);
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct PsiKernel {
    pub basis: Mat,
    pub w: usize,
    /// Kernel dimension minus `d (q-1) floor(w/q)`.
    pub slack: i64,
}

#[derive(Clone, Debug)]
pub struct ZCertificate {
    pub level: u32,
    pub kernel_dim: usize,
    pub interior_dim: usize,
    pub divisors: Vec<Q>,
    pub rank_deficit: usize,
    /// Residual valuation of images outside the kernel lattice.
    pub leak: Q,
    pub slack: i64,
    pub invertible: bool,
}

#[derive(Clone, Debug)]
pub struct DeltaInvariants {
    pub averaging: Mat,
    pub basis: Mat,
    pub idempotent_residual: Q,
    pub order: usize,
}

/// Outcome of the restriction bound on one sample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionCheck {
    pub lhs: Q,
    pub rhs: Q,
    pub ok: bool,
}

/// `w_{I'}(f mod N_i) >= w_I(f) + (i+1) g` with `N_i = span(T^-i..T^i)`
/// and `g = min(t_s' - t_s, t_r - t_r')`.
pub fn restriction_norm_check(outer: &Interval, inner: &Interval, i: i32, f: &S) -> Result<RestrictionCheck> {
    let (Some(tr), Some(tr2)) = (outer.t_r, inner.t_r) else {
        return Err(Error::IntervalOverlapViolation);
    };
    if !(inner.t_s > outer.t_s && tr2 < tr && outer.contains(inner)) {
        return Err(Error::IntervalOverlapViolation);
    }
    let g = (inner.t_s - outer.t_s).min(tr - tr2);
    let zero = f.ring_zero().clone();
    let mut c = Vec::new();
    for k in f.dmin()..=f.dmax() {
        c.push(if k.abs() <= i { zero } else { f.coeff(k)? });
    }
    let tail = S::new(&zero, f.dmin(), c, f.is_exact())?;
    let lhs = tail.annulus_valuation(inner).value;
    let rhs = f.annulus_valuation(outer).value + Q::from_integer(i as i64 + 1) * g;
    Ok(RestrictionCheck { lhs, rhs, ok: lhs >= rhs })
}
