//! Herr complexes on power-series truncations and the checks built on them.
//!
//! phi-variant on `M_w`:
//! `C0 = M_w -> C1 = M_w + M_w -> C2 = M_w`, `d1 = (phi - 1, Z)`,
//! `d2 = (Z, 1 - phi)`. Both are well defined mod `T^w`.
//!
//! Psi-variant on `M_w -> M_w1 + M_w1 -> M_w2` with reliable Psi windows,
//! `d1 = (Psi - 1, Z)`, `d2 = (Z, 1 - Psi)`. `H^0` is computed on unknowns of
//! degree `< w1` only; the dropped top degrees are reported as slack.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{Q, Scalar};
use crate::error::{Error, Result};
use crate::fourier::GammaChart;
use crate::linalg::{kernel, saturate, snf, subquotient, Lattice, Mat};
use crate::module::{dist_of_matrix, trunc_mul, psi_window, teichmueller_group, ModuleElement, PhiGammaModule};
use crate::series::LaurentSeries;

type S = LaurentSeries<Scalar>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Phi,
    Psi,
}

#[derive(Clone, Debug)]
pub struct HerrComplex {
    pub module: PhiGammaModule,
    pub variant: Variant,
    pub level: u32,
    pub windows: [usize; 3],
    pub d1: Mat,
    pub d2: Mat,
    /// `Z_n` on `M_w0`.
    pub z: Mat,
}

fn block_diag(a: &Mat, b: &Mat) -> Mat {
    let fld = a.field();
    let top = a.hstack(&Mat::zeros(fld, a.rows(), b.cols()));
    let bot = Mat::zeros(fld, b.rows(), a.cols()).hstack(b);
    top.vstack(&bot)
}

pub fn build_herr(module: &PhiGammaModule, variant: Variant, level: u32, w: usize) -> Result<HerrComplex> {
    let fld = module.field();
    let chart = GammaChart::new(fld, level)?;
    let z = module.z_mat(&chart, w)?;
    let (windows, d1, d2) = match variant {
        Variant::Phi => {
            let f = module.phi_mat(w)?;
            let one = module.identity_mat(w);
            (
                [w, w, w],
                f.sub(&one).vstack(&z),
                z.hstack(&one.sub(&f)),
            )
        }
        Variant::Psi => {
            let w1 = psi_window(fld, w);
            let w2 = psi_window(fld, w1);
            if w2 == 0 {
                return Err(Error::WindowUnderflow(alloc::format!("Psi windows {w} -> {w1} -> {w2}")));
            }
            let r01 = module.restrict_mat(w, w1);
            let r12 = module.restrict_mat(w1, w2);
            let z01 = r01.mul(&z);
            let z1 = z01.mul(&r01.transpose());
            let psi01 = module.psi_mat(w, w1)?;
            let psi12 = module.psi_mat(w1, w2)?;
            ([w, w1, w2], psi01.sub(&r01).vstack(&z01), r12.mul(&z1).hstack(&r12.sub(&psi12)))
        }
    };
    Ok(HerrComplex { module: module.clone(), variant, level, windows, d1, d2, z })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeReport {
    /// Valuations of the non-unit elementary divisors.
    pub elementary_divisors: Vec<Q>,
    pub rank: usize,
    /// Coordinates excluded from the computation for window reasons.
    pub slack: usize,
    /// Number of generators (free plus torsion).
    pub generators: usize,
}

#[derive(Clone, Debug)]
pub struct CohomologyReport {
    pub variant: Variant,
    pub level: u32,
    pub windows: [usize; 3],
    pub precision: i32,
    pub degrees: [DegreeReport; 3],
    /// Basis of `H^0` as columns on `M_w0`.
    pub h0_basis: Mat,
    /// Rank over `K[eps]/eps^m` when `H^0` is free over it.
    pub h0_eps_rank: Option<usize>,
    /// Residual valuation of `d2 d1`.
    pub d2d1_residual: Q,
    /// Residual valuation of coboundaries outside the cocycles.
    pub leak: Q,
}

impl HerrComplex {
    pub fn cohomology(&self) -> Result<CohomologyReport> {
        let m = &self.module;
        let fld = m.field();
        let tol = fld.n;
        let [w0, w1, w2] = self.windows;
        let d = m.rank();

        let (h0_basis, slack0) = match self.variant {
            Variant::Phi => (kernel(&self.d1, tol)?, 0),
            Variant::Psi => {
                let emb = m.restrict_mat(w0, w1).transpose();
                (emb.mul(&kernel(&self.d1.mul(&emb), tol)?), d * (w0 - w1))
            }
        };
        let h0 = DegreeReport { elementary_divisors: vec![], rank: h0_basis.cols(), slack: slack0, generators: h0_basis.cols() };

        let z1 = kernel(&self.d2, tol)?;
        let lat1 = Lattice::new(z1, tol)?;
        let sq1 = subquotient(&lat1, &self.d1)?;
        let slack1 = match self.variant {
            Variant::Phi => 0,
            Variant::Psi => 2 * d * (w0 - w1),
        };
        let h1 = DegreeReport {
            generators: sq1.free_rank + sq1.torsion.len(),
            elementary_divisors: sq1.torsion,
            rank: sq1.free_rank,
            slack: slack1,
        };

        let lat2 = Lattice::new(Mat::identity(fld, d * w2), tol)?;
        let sq2 = subquotient(&lat2, &self.d2)?;
        let slack2 = match self.variant {
            Variant::Phi => 0,
            Variant::Psi => d * (w1 - w2),
        };
        let h2 = DegreeReport {
            generators: sq2.free_rank + sq2.torsion.len(),
            elementary_divisors: sq2.torsion,
            rank: sq2.free_rank,
            slack: slack2,
        };

        let h0_eps_rank = eps_rank(m, &h0_basis, w0)?;
        Ok(CohomologyReport {
            variant: self.variant,
            level: self.level,
            windows: self.windows,
            precision: fld.n,
            degrees: [h0, h1, h2],
            h0_basis,
            h0_eps_rank,
            d2d1_residual: self.d2.mul(&self.d1).residual(),
            leak: sq1.leak.min(sq2.leak),
        })
    }
}

/// Multiplication by `eps` on `M_w` in the restricted basis.
fn eps_mat(m: &PhiGammaModule, w: usize) -> Mat {
    let fld = m.field();
    let em = m.eps_m() as usize;
    let n = m.rank() * w;
    let mut e = Mat::zeros(fld, n, n);
    for c in 0..m.rank() {
        if c % em + 1 < em {
            for j in 0..w {
                e.set((c + 1) * w + j, c * w + j, fld.one());
            }
        }
    }
    e
}

fn eps_rank(m: &PhiGammaModule, basis: &Mat, w: usize) -> Result<Option<usize>> {
    let em = m.eps_m() as usize;
    if em == 1 {
        return Ok(Some(basis.cols()));
    }
    let e = eps_mat(m, w);
    let mut top = basis.clone();
    for _ in 1..em {
        top = e.mul(&top);
    }
    let r = snf(&top, m.field().n)?.rank;
    Ok((r * em == basis.cols()).then_some(r))
}

fn same_lattice(a: &Mat, b: &Mat, tol: i32) -> Result<bool> {
    if a.cols() != b.cols() {
        return Ok(false);
    }
    if a.cols() == 0 {
        return Ok(true);
    }
    let n = a.field().n_q();
    let la = Lattice::new(a.clone(), tol)?;
    let lb = Lattice::new(b.clone(), tol)?;
    let sa = subquotient(&la, b)?;
    let sb = subquotient(&lb, a)?;
    Ok(sa.torsion.is_empty() && sb.torsion.is_empty() && sa.free_rank == 0 && sb.free_rank == 0 && sa.leak >= n && sb.leak >= n)
}

fn same_degree(a: &DegreeReport, b: &DegreeReport) -> bool {
    a.rank == b.rank && a.elementary_divisors == b.elementary_divisors
}

#[derive(Clone, Debug)]
pub struct PhiPsiComparison {
    pub phi: CohomologyReport,
    pub psi: CohomologyReport,
    /// Residual valuations of the two chain-map squares.
    pub square_residuals: [Q; 2],
    pub h0_match: bool,
    pub h1_match: bool,
    pub h2_match: bool,
}

/// Compares both variants through `(1, -Psi + truncation, -Psi)`.
pub fn compare_phi_psi(module: &PhiGammaModule, level: u32, w: usize) -> Result<PhiPsiComparison> {
    let cp = build_herr(module, Variant::Phi, level, w)?;
    let cq = build_herr(module, Variant::Psi, level, w)?;
    let [_, w1, w2] = cq.windows;
    let psi01 = module.psi_mat(w, w1)?;
    let psi02 = module.psi_mat(w, w2)?;
    let c0 = module.identity_mat(w);
    let c1 = block_diag(&psi01.scale(&module.field().from_i64(-1)), &module.restrict_mat(w, w1));
    let c2 = psi02.scale(&module.field().from_i64(-1));
    let sq1 = cq.d1.mul(&c0).sub(&c1.mul(&cp.d1)).residual();
    let sq2 = cq.d2.mul(&c1).sub(&c2.mul(&cp.d2)).residual();
    let phi = cp.cohomology()?;
    let psi = cq.cohomology()?;
    let h0_match = same_degree(&phi.degrees[0], &psi.degrees[0]) && same_lattice(&phi.h0_basis, &psi.h0_basis, module.field().n)?;
    let h1_match = same_degree(&phi.degrees[1], &psi.degrees[1]);
    let h2_match = same_degree(&phi.degrees[2], &psi.degrees[2]);
    Ok(PhiPsiComparison { phi, psi, square_residuals: [sq1, sq2], h0_match, h1_match, h2_match })
}

/// `f(A)` for an exact polynomial `f`.
fn poly_of_mat(f: &S, a: &Mat) -> Result<Mat> {
    let fld = a.field();
    let mut acc = Mat::zeros(fld, a.rows(), a.cols());
    for k in (f.dmin().min(0)..=f.dmax()).rev() {
        acc = acc.mul(a).add(&Mat::scalar(fld, a.rows(), f.coeff(k)?));
    }
    Ok(acc)
}

/// `phi^k(X) / X` as an exact polynomial.
fn q_poly(module: &PhiGammaModule, k: u32) -> Result<S> {
    let lt = module.lt();
    let mut f = S::var(&module.field().zero());
    for _ in 0..k {
        f = lt.phi_apply(&f)?;
    }
    Ok(f.shift(-1))
}

#[derive(Clone, Debug)]
pub struct RestrictionReport {
    pub from: u32,
    pub to: u32,
    /// Residual valuations of the two squares against the independently
    /// built level-`to` complex.
    pub square_residuals: [Q; 2],
    /// `Q` has full rank over `K`.
    pub q_invertible: bool,
    pub source: CohomologyReport,
    pub target: CohomologyReport,
}

/// `res_{n,m} = (1, 1 + Q, Q)` with `Q = (phi^(m-n)(X)/X)(Z_n)`.
pub fn restriction_map(module: &PhiGammaModule, n: u32, m: u32, w: usize) -> Result<(Mat, RestrictionReport)> {
    if m < n {
        return Err(Error::ConfigMismatch("restriction goes up in level".into()));
    }
    let cn = build_herr(module, Variant::Phi, n, w)?;
    let cm = build_herr(module, Variant::Phi, m, w)?;
    let q = poly_of_mat(&q_poly(module, m - n)?, &cn.z)?;
    let one = module.identity_mat(w);
    let r1 = block_diag(&one, &q);
    let sq1 = cm.d1.sub(&r1.mul(&cn.d1)).residual();
    let sq2 = cm.d2.mul(&r1).sub(&q.mul(&cn.d2)).residual();
    let q_invertible = snf(&q, module.field().n)?.rank == q.rows();
    let report = RestrictionReport {
        from: n,
        to: m,
        square_residuals: [sq1, sq2],
        q_invertible,
        source: cn.cohomology()?,
        target: cm.cohomology()?,
    };
    Ok((q, report))
}

#[derive(Clone, Debug)]
pub struct IndependenceReport {
    pub restrictions: Vec<RestrictionReport>,
    /// `res_{m',m} res_{n,m'} - res_{n,m}` on `C2`.
    pub composition_residual: Q,
    /// `H^0` lattices agree at every level.
    pub h0_equal: bool,
    /// Elementary divisors and ranks agree at every level in degrees 1, 2.
    pub higher_equal: bool,
}

/// Levels `n < n+1 < n+2`: chain-map squares, composition law and
/// agreement of the cohomology.
pub fn indep_check(module: &PhiGammaModule, n: u32, w: usize) -> Result<IndependenceReport> {
    let (q01, r01) = restriction_map(module, n, n + 1, w)?;
    let (q12, r12) = restriction_map(module, n + 1, n + 2, w)?;
    let (q02, r02) = restriction_map(module, n, n + 2, w)?;
    let composition_residual = q12.mul(&q01).sub(&q02).residual();
    let tol = module.field().n;
    let reports = [&r01.source, &r01.target, &r12.target];
    let mut h0_equal = true;
    let mut higher_equal = true;
    for r in &reports[1..] {
        h0_equal &= same_lattice(&reports[0].h0_basis, &r.h0_basis, tol)?;
        higher_equal &= same_degree(&reports[0].degrees[1], &r.degrees[1]) && same_degree(&reports[0].degrees[2], &r.degrees[2]);
    }
    Ok(IndependenceReport { restrictions: vec![r01, r12, r02], composition_residual, h0_equal, higher_equal })
}

#[derive(Clone, Debug)]
pub struct HomotopyReport {
    pub alpha: Scalar,
    /// Residual valuations of `h d + d h - (gamma - 1)` in degrees 0, 1, 2.
    pub residuals: [Q; 3],
}

/// Homotopy `h1 = (0, H)`, `h2 = (H, 0)` with `H = (eta(a, X) - 1)/X` at
/// `Z_n`, against `gamma` with `alpha_n(gamma) = a` built independently.
pub fn gamma_homotopy_check(c: &HerrComplex, a: &Scalar) -> Result<HomotopyReport> {
    if c.variant != Variant::Phi {
        return Err(Error::Unsupported("homotopy check on the Psi-variant".into()));
    }
    let m = &c.module;
    let fld = m.field();
    let w = c.windows[0];
    let chart = GammaChart::new(fld, c.level)?;
    let g = m.gamma_mat(&chart.chi(a)?, w)?;
    let hs = m.four().eta(a)?.sub(&S::one(&fld.zero()))?.shift(-1);
    let h = dist_of_matrix(&hs, &c.z, fld.n)?;
    let zero = Mat::zeros(fld, m.rank() * w, m.rank() * w);
    let h1 = zero.hstack(&h);
    let h2 = h.vstack(&zero);
    let one = m.identity_mat(w);
    let gm1 = g.sub(&one);
    let r0 = h1.mul(&c.d1).sub(&gm1).residual();
    let r1 = c.d1.mul(&h1).add(&h2.mul(&c.d2)).sub(&block_diag(&gm1, &gm1)).residual();
    let r2 = c.d2.mul(&h2).sub(&gm1).residual();
    Ok(HomotopyReport { alpha: *a, residuals: [r0, r1, r2] })
}

#[derive(Clone, Debug)]
pub struct InvariantsReport {
    pub order: usize,
    /// Computed by averaging; otherwise as a joint kernel.
    pub averaged: bool,
    pub basis: Mat,
    /// Residual valuation of group images outside `H^0`.
    pub leak: Q,
}

/// Representatives of `(o/pi^n)^x` as Teichmueller digit expansions.
fn unit_representatives(fld: &'static crate::arith::Field, n: u32) -> Result<Vec<Scalar>> {
    let mut reps = teichmueller_group(fld)?;
    let digits: Vec<Scalar> = core::iter::once(fld.zero()).chain(teichmueller_group(fld)?).collect();
    let mut pk = fld.one();
    for _ in 1..n {
        pk = pk * fld.pi();
        let mut next = Vec::with_capacity(reps.len() * digits.len());
        for r in &reps {
            for t in &digits {
                next.push(*r + *t * pk);
            }
        }
        reps = next;
    }
    Ok(reps)
}

/// `Gamma / Gamma_n`-invariants of `H^0` at level `n`.
pub fn full_invariants(module: &PhiGammaModule, h0: &CohomologyReport) -> Result<InvariantsReport> {
    let fld = module.field();
    let n = h0.level;
    let w = h0.windows[0];
    let tol = fld.n;
    let reps = unit_representatives(fld, n)?;
    let order = reps.len();
    let averaged = (order as u64) % fld.p != 0;
    let basis = &h0.h0_basis;
    if basis.cols() == 0 {
        return Ok(InvariantsReport { order, averaged, basis: basis.clone(), leak: Q::from_integer(crate::arith::INF as i64) });
    }
    let lat = Lattice::new(basis.clone(), tol)?;
    let mut leak = Q::from_integer(crate::arith::INF as i64);
    let mut actions = Vec::with_capacity(order);
    for u in &reps {
        let (y, l) = lat.coords(&module.gamma_mat(u, w)?.mul(basis))?;
        leak = leak.min(l);
        actions.push(y);
    }
    let k = basis.cols();
    let inv = if averaged {
        let mut avg = Mat::zeros(fld, k, k);
        for a in &actions {
            avg = avg.add(a);
        }
        saturate(&avg.scale(&fld.from_i64(order as i64).inv()?), tol)?
    } else {
        let one = Mat::identity(fld, k);
        let mut stack = actions[0].sub(&one);
        for a in &actions[1..] {
            stack = stack.vstack(&a.sub(&one));
        }
        kernel(&stack, tol)?
    };
    Ok(InvariantsReport { order, averaged, basis: basis.mul(&inv), leak })
}

/// `Delta`-route to `(H^0)^Gamma` at level 1: `ker d1` on `M^Delta`.
pub fn delta_route_invariants(c: &HerrComplex) -> Result<Mat> {
    let m = &c.module;
    let di = m.delta_invariants(c.windows[0])?;
    let k = kernel(&c.d1.mul(&di.basis), m.field().n)?;
    Ok(di.basis.mul(&k))
}

/// Extension `0 -> M -> E -> R -> 0` with `phi_E(e) = e + v`.
#[derive(Clone, Debug)]
pub struct Extension {
    pub base: PhiGammaModule,
    pub v: ModuleElement,
}

pub fn ext_phi_class(base: &PhiGammaModule, v: ModuleElement) -> Extension {
    Extension { base: base.clone(), v }
}

impl Extension {
    /// Same extension presented with the lift `e + w` of the generator.
    pub fn with_section(&self, w: &ModuleElement) -> Result<Extension> {
        let v = self.v.add(&self.base.act_phi(w)?.sub(w)?)?;
        Ok(Extension { base: self.base.clone(), v })
    }

    /// `phi_E` on `M_w + R_w`.
    pub fn phi_mat(&self, w: usize) -> Result<Mat> {
        let m = &self.base;
        let fm = m.phi_mat(w)?;
        let triv = PhiGammaModule::trivial(m.four().clone(), m.interval())?;
        let fr = triv.phi_mat(w)?;
        let a = mult_mat(m, &self.v, w)?.mul(&fr);
        let top = fm.hstack(&a);
        let bot = Mat::zeros(m.field(), w, m.rank() * w).hstack(&fr);
        Ok(top.vstack(&bot))
    }
}

/// Class of `E` read from its phi-matrix.
pub fn ext_phi_of(e: &Extension) -> ModuleElement {
    e.v.clone()
}

#[derive(Clone, Debug)]
pub struct ExtReport {
    /// `v' - v - (phi - 1) w` on `M_w`.
    pub witness_residual: Q,
}

/// Class changes by the coboundary of the section change, checked with
/// matrices on `M_window`.
pub fn ext_roundtrip_check(base: &PhiGammaModule, v: &ModuleElement, w: &ModuleElement, window: usize) -> Result<ExtReport> {
    let e = ext_phi_class(base, v.clone()).with_section(w)?;
    let v2 = ext_phi_of(&e);
    let f = base.phi_mat(window)?.sub(&base.identity_mat(window));
    let dv: Vec<Scalar> = v2.sub(v)?.to_coords(window)?;
    let fw = f.apply(&w.to_coords(window)?);
    let diff: Vec<Scalar> = dv.iter().zip(&fw).map(|(a, b)| *a - *b).collect();
    Ok(ExtReport { witness_residual: Mat::from_cols(base.field(), diff.len(), &[diff]).residual() })
}

/// For `v = (phi - 1) w` the section `(-w, 1)` is phi-fixed; residual of
/// `phi_E(s) - s` on `M_window + R_window`.
pub fn split_section_residual(e: &Extension, w: &ModuleElement, window: usize) -> Result<Q> {
    let m = &e.base;
    let fld = m.field();
    let mut s: Vec<Scalar> = w.to_coords(window)?.into_iter().map(|x| -x).collect();
    s.push(fld.one());
    s.extend(core::iter::repeat_n(fld.zero(), window - 1));
    let img = e.phi_mat(window)?.apply(&s);
    let diff: Vec<Scalar> = img.iter().zip(&s).map(|(a, b)| *a - *b).collect();
    Ok(Mat::from_cols(fld, diff.len(), &[diff]).residual())
}

/// `R_w -> M_w`, `r -> r x`.
fn mult_mat(m: &PhiGammaModule, x: &ModuleElement, w: usize) -> Result<Mat> {
    let fld = m.field();
    let top = w as i32 - 1;
    let mut cols = Vec::with_capacity(w);
    for k in 0..w {
        let t = S::monomial(fld.one(), k as i32);
        let y = ModuleElement::new(x.comps.iter().map(|c| trunc_mul(c, &t, top)).collect::<Result<_>>()?);
        cols.push(y.to_coords(w)?);
    }
    Ok(Mat::from_cols(fld, m.rank() * w, &cols))
}

#[derive(Clone, Debug)]
pub struct ThetaReport {
    pub cocycle_residual: Q,
    /// `phi_E gamma_E - gamma_E phi_E`.
    pub commute_residual: Q,
    /// `(phi_E - 1) e - (a, 0)`.
    pub a_residual: Q,
    /// `Z_E e - (b, 0)`.
    pub b_residual: Q,
}

/// Builds `E` from a cocycle `(a, b)` with `gamma_E(e) = e + G(Z) b`,
/// `G = (eta(1, X) - 1)/X`, and reads `(a, b)` back from `E`.
pub fn theta_roundtrip(c: &HerrComplex, x: &[Scalar]) -> Result<ThetaReport> {
    if c.variant != Variant::Phi {
        return Err(Error::Unsupported("extension classes on the Psi-variant".into()));
    }
    let m = &c.module;
    let fld = m.field();
    let w = c.windows[0];
    let dm = m.rank() * w;
    let cres = {
        let r = c.d2.apply(x);
        Mat::from_cols(fld, r.len(), &[r]).residual()
    };
    if cres < fld.n_q() {
        return Err(Error::NotACocycle { residual: cres });
    }
    let (a, b) = x.split_at(dm);
    let chart = GammaChart::new(fld, c.level)?;
    let gs = m.four().eta(&fld.one())?.sub(&S::one(&fld.zero()))?.shift(-1);
    let gz = dist_of_matrix(&gs, &c.z, fld.n)?;
    let cvec = gz.apply(b);

    let triv = PhiGammaModule::trivial(m.four().clone(), m.interval())?;
    let fr = triv.phi_mat(w)?;
    let gr = triv.gamma_mat(&chart.generator(), w)?;
    let av = ModuleElement::from_coords(fld, a, w);
    let cv = ModuleElement::from_coords(fld, &cvec, w);
    let zero_bl = Mat::zeros(fld, w, dm);
    let fe = m.phi_mat(w)?.hstack(&mult_mat(m, &av, w)?.mul(&fr)).vstack(&zero_bl.hstack(&fr));
    let ge = m.gamma_mat(&chart.generator(), w)?.hstack(&mult_mat(m, &cv, w)?.mul(&gr)).vstack(&zero_bl.hstack(&gr));
    let commute_residual = fe.mul(&ge).sub(&ge.mul(&fe)).residual();
    let one = Mat::identity(fld, dm + w);
    let ze = dist_of_matrix(m.four().kappa(), &ge.sub(&one), fld.n)?;

    let mut e = vec![fld.zero(); dm + w];
    e[dm] = fld.one();
    let resid = |img: Vec<Scalar>, target: &[Scalar]| -> Q {
        let mut diff: Vec<Scalar> = img[..dm].iter().zip(target).map(|(p, q)| *p - *q).collect();
        diff.extend_from_slice(&img[dm..]);
        Mat::from_cols(fld, diff.len(), &[diff]).residual()
    };
    let fe_e: Vec<Scalar> = fe.apply(&e).iter().zip(&e).map(|(p, q)| *p - *q).collect();
    let a_residual = resid(fe_e, a);
    let b_residual = resid(ze.apply(&e), b);
    Ok(ThetaReport { cocycle_residual: cres, commute_residual, a_residual, b_residual })
}

#[derive(Clone, Debug)]
pub struct BaseChangeReport {
    pub m_from: u32,
    pub m_to: u32,
    /// Residual valuations of the projected differentials against the
    /// complex of the base-changed module.
    pub d_residuals: [Q; 2],
    pub full: CohomologyReport,
    /// Cohomology of `C(M) (x)_A A'`.
    pub mapped: CohomologyReport,
    pub changed: CohomologyReport,
    /// Flat case: `H^0(M) (x)_A A'` has the rank of `H^0` of the base change.
    pub h0_flat_match: bool,
    pub h0_match: bool,
    pub h1_match: bool,
    pub h2_match: bool,
}

/// `C(M) (x)_A A'` for `A = K[eps]/eps^m -> A' = K[eps]/eps^m2` against
/// `C(M (x)_A A')`.
pub fn base_change_compare(module: &PhiGammaModule, m2: u32, level: u32, w: usize) -> Result<BaseChangeReport> {
    let bc = module.base_change(m2)?;
    let c = build_herr(module, Variant::Phi, level, w)?;
    let cb = build_herr(&bc, Variant::Phi, level, w)?;
    let comps = module.eps_indices(m2);
    let n0 = module.rank() * w;
    let i0: Vec<usize> = comps.iter().flat_map(|c| (0..w).map(move |j| c * w + j)).collect();
    let i1: Vec<usize> = i0.iter().copied().chain(i0.iter().map(|k| k + n0)).collect();
    let d1p = c.d1.select_rows(&i1).select_cols(&i0);
    let d2p = c.d2.select_rows(&i0).select_cols(&i1);
    let d_residuals = [d1p.sub(&cb.d1).residual(), d2p.sub(&cb.d2).residual()];
    let full = c.cohomology()?;
    let mapped = HerrComplex { d1: d1p, d2: d2p, z: c.z.select_rows(&i0).select_cols(&i0), ..cb.clone() }.cohomology()?;
    let changed = cb.cohomology()?;
    // Free H^0 of A-rank r base-changes to A'-rank r.
    let h0_flat_match = match (full.h0_eps_rank, changed.h0_eps_rank) {
        (Some(r), Some(r2)) => r == r2 && changed.degrees[0].rank == r2 * m2 as usize,
        _ => false,
    };
    let [h0_match, h1_match, h2_match] = [0, 1, 2].map(|i| same_degree(&mapped.degrees[i], &changed.degrees[i]));
    Ok(BaseChangeReport { m_from: module.eps_m(), m_to: m2, d_residuals, full, mapped, changed, h0_flat_match, h0_match, h1_match, h2_match })
}
