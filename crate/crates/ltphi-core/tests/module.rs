use std::sync::LazyLock;

use ltphi_core::arith::{q, FieldSpec};
use ltphi_core::fourier::*;
use ltphi_core::linalg::{kernel, saturate, Lattice, Mat};
use ltphi_core::lt::LTData;
use ltphi_core::module::*;
use ltphi_core::{CoeffRing, Error, Field, Interval, LaurentSeries, Ring, Scalar, Q};
use proptest::prelude::*;

type S = LaurentSeries<Scalar>;

fn q3() -> &'static Field {
    FieldSpec::qp(3, 6).build().unwrap()
}

static CYC: LazyLock<Fourier> =
    LazyLock::new(|| Fourier::new(LTData::cyclotomic(q3(), 80).unwrap(), &OmegaConfig::ExactPeriod(q3().one())).unwrap());

fn interval() -> Interval {
    Interval::new(q(0, 1), q(1, 2)).unwrap()
}

fn trivial() -> PhiGammaModule {
    PhiGammaModule::trivial(CYC.clone(), interval()).unwrap()
}

fn twist(delta: i64, weight: i64) -> PhiGammaModule {
    let ring = CoeffRing::artinian(q3(), 1).unwrap();
    PhiGammaModule::twist(CYC.clone(), &ring.scalar(q3().from_i64(delta)), weight, interval()).unwrap()
}

fn elem(ints: &[&[i64]]) -> ModuleElement {
    ModuleElement::new(ints.iter().map(|c| S::int_poly(q3(), 0, c)).collect())
}

fn coords_residual(a: &[Scalar], b: &[Scalar]) -> Q {
    let d: Vec<Scalar> = a.iter().zip(b).map(|(x, y)| *x - *y).collect();
    Mat::from_cols(q3(), d.len(), &[d]).residual()
}

#[test]
fn psi_of_characters() {
    let f = q3();
    let m = trivial();
    let e1 = ModuleElement::new(vec![CYC.eta(&f.one()).unwrap()]);
    let img = reliable_prefix(&m.act_psi(&e1).unwrap().comps[0], 6).unwrap();
    assert!(img.dmax() >= 10 && floor_of(&img) >= f.n_q());
    let epi = ModuleElement::new(vec![CYC.eta(&f.pi()).unwrap()]);
    let img = reliable_prefix(&m.act_psi(&epi).unwrap().comps[0], 6).unwrap();
    assert!(floor_of(&img.sub(&CYC.eta(&f.one()).unwrap()).unwrap()) >= f.n_q());
}

#[test]
fn twists_restrict_scalars() {
    let f = q3();
    let r2 = CoeffRing::artinian(f, 2).unwrap();
    let d = r2.scalar(f.from_i64(3)).mul(&r2.scalar(f.one()).add(&r2.eps()));
    let m = PhiGammaModule::twist(CYC.clone(), &d, 0, interval()).unwrap();
    assert_eq!((m.rank(), m.eps_m()), (2, 2));
    let p = m.phi_matrix();
    let three = f.from_i64(3);
    assert!(p.get(0, 0).eq_to(&three, 30) && p.get(1, 0).eq_to(&three, 30) && p.get(1, 1).eq_to(&three, 30));
    assert!(p.get(0, 1).is_exact_zero());
    let b = m.base_change(1).unwrap();
    assert_eq!(b.rank(), 1);
    assert!(b.phi_matrix().get(0, 0).eq_to(&three, 30));
    assert!(m.base_change(3).is_err());

    let sing = Mat::zeros(f, 1, 1);
    let r = PhiGammaModule::new(CYC.clone(), sing, GammaData::Character { weight: 0 }, 1, interval());
    assert_eq!(r.unwrap_err(), Error::NonUnitDet);
}

#[test]
fn phi_and_gamma_commute_on_elements() {
    let f = q3();
    let m = twist(1, 1);
    let x = elem(&[&[2, -1, 0, 4, 1]]);
    let chi = GammaChart::new(f, 1).unwrap().chi(&f.from_i64(2)).unwrap();
    let a = m.act_phi(&m.act_gamma(&chi, &x).unwrap()).unwrap();
    let b = m.act_gamma(&chi, &m.act_phi(&x).unwrap()).unwrap();
    let d = reliable_prefix(&a.sub(&b).unwrap().comps[0], 6).unwrap();
    assert!(d.dmax() >= 20 && floor_of(&d) >= f.n_q());
}

#[test]
fn matrices_agree_with_series_actions() {
    let f = q3();
    let w = 20;
    let m = twist(1, 1);
    let x = elem(&[&[1, 5, -2, 0, 3, 1]]);
    let xc = x.to_coords(w).unwrap();
    let fx = m.act_phi(&x).unwrap().to_coords(w).unwrap();
    assert!(coords_residual(&m.phi_mat(w).unwrap().apply(&xc), &fx) >= f.n_q());
    let chi = GammaChart::new(f, 1).unwrap().generator();
    let gx = m.act_gamma(&chi, &x).unwrap().to_coords(w).unwrap();
    assert!(coords_residual(&m.gamma_mat(&chi, w).unwrap().apply(&xc), &gx) >= f.n_q());

    // Psi phi = 1 on the reliable output window.
    let w = 30;
    let wo = psi_window(f, w);
    let pf = m.psi_mat(w, wo).unwrap().mul(&m.phi_mat(w).unwrap());
    assert!(pf.sub(&m.restrict_mat(w, wo)).residual() >= f.n_q());
}

#[test]
fn psi_kernel_matches_a_wide_window_solve() {
    let f = q3();
    let m = trivial();
    for (w, dim) in [(24usize, 18usize), (30, 22)] {
        let k = m.psi_kernel_basis(w).unwrap();
        assert_eq!(k.basis.cols(), dim);
        assert_eq!(k.slack, dim as i64 - 2 * (w / 3) as i64);
        assert!(m.psi_kernel_residual(&k).unwrap() >= f.n_q());

        // Oracle: kernel of the Psi matrix on a window wide enough that the
        // spurious solutions phi(T)^k M vanish mod (T^w, pi^N), cut to M_w.
        let out = (w + 12).div_ceil(3);
        let wide = 3 * out + 12;
        assert!(psi_window(f, wide) >= out);
        let kw = kernel(&m.psi_mat(wide, out).unwrap(), f.n).unwrap();
        let cut = saturate(&m.restrict_mat(wide, w).mul(&kw), f.n).unwrap();
        assert_eq!(cut.cols(), dim);
        let lat = Lattice::new(cut, f.n).unwrap();
        assert!(lat.coords(&k.basis).unwrap().1 >= f.n_q());
    }
}

#[test]
fn z_is_invertible_on_the_psi_kernel_interior() {
    let f = q3();
    let one = GammaChart::new(f, 1).unwrap();
    let two = GammaChart::new(f, 2).unwrap();
    for m in [trivial(), twist(1, 1)] {
        let c = m.z_on_psi_kernel(&one, 30, 3).unwrap();
        assert!(c.invertible, "{c:?}");
        assert_eq!((c.kernel_dim, c.interior_dim), (22, 18));
        // Level 2 needs the wider margin q^2.
        assert!(!m.z_on_psi_kernel(&two, 30, 3).unwrap().invertible);
        assert!(m.z_on_psi_kernel(&two, 36, 9).unwrap().invertible);
    }
    assert_eq!(trivial().z_on_psi_kernel(&one, 30, 30).unwrap_err(), Error::EmptyInterior);
}

#[test]
fn model_extension() {
    let m = PhiGammaModule::trivial(CYC.clone(), Interval::new(q(1, 27), q(1, 2)).unwrap()).unwrap();
    let once = m.extend_model().unwrap();
    assert_eq!(once.interval(), Interval::new(q(1, 81), q(1, 2)).unwrap());
    let twice = once.extend_model().unwrap();
    assert_eq!(twice.interval(), Interval::new(q(1, 243), q(1, 2)).unwrap());
    let back = twice.restrict_model(m.interval()).unwrap();
    assert_eq!(back.interval(), m.interval());
    assert!(back.phi_matrix().sub(m.phi_matrix()).residual() >= q(30, 1));

    let tight = PhiGammaModule::trivial(CYC.clone(), Interval::new(q(1, 3), q(1, 2)).unwrap()).unwrap();
    assert_eq!(tight.extend_model().unwrap_err(), Error::IntervalOverlapViolation);
    assert_eq!(once.restrict_model(Interval::new(q(0, 1), q(1, 2)).unwrap()).unwrap_err(), Error::IntervalOverlapViolation);
}

#[test]
fn restriction_bound_is_tight_on_monomials() {
    let f = q3();
    let outer = Interval::new(q(1, 6), q(1, 2)).unwrap();
    let inner = Interval::new(q(1, 3), q(1, 3)).unwrap();
    for i in 0..4 {
        for k in [i + 1, -(i + 1)] {
            let t = S::monomial(f.one(), k);
            let r = restriction_norm_check(&outer, &inner, i, &t).unwrap();
            assert!(r.ok);
            // Both gaps are 1/6, so both monomials attain the bound.
            assert_eq!(r.lhs, r.rhs);
        }
    }
    assert_eq!(restriction_norm_check(&inner, &outer, 1, &S::var(&f.zero())).unwrap_err(), Error::IntervalOverlapViolation);
}

#[test]
fn delta_averaging() {
    let f = q3();
    let w = 16;
    let m = trivial();
    let di = m.delta_invariants(w).unwrap();
    assert_eq!(di.order, 2);
    assert!(di.idempotent_residual >= f.n_q());
    let minus = m.gamma_mat(&f.from_i64(-1), w).unwrap();
    assert!(minus.mul(&di.basis).sub(&di.basis).residual() >= f.n_q());
    // Rank of the idempotent: invariants of T -> (1+T)^-1 - 1 on o[[T]]/T^w.
    assert_eq!(di.basis.cols(), w / 2);
    let r = FieldSpec::ramified_root(3, 2, 6).build().unwrap();
    assert_eq!(teichmueller_group(r).unwrap().len(), 2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn restriction_bound_holds(c in proptest::collection::vec(-40i64..40, 1..12), lo in -5i32..0, i in 0i32..=8) {
        let f = q3();
        let outer = Interval::new(q(1, 9), q(2, 3)).unwrap();
        let inner = Interval::new(q(1, 6), q(1, 2)).unwrap();
        let g = S::int_poly(f, lo, &c);
        let r = restriction_norm_check(&outer, &inner, i, &g).unwrap();
        prop_assert!(r.ok, "{:?}", r);
    }
}
