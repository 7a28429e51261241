use std::sync::LazyLock;

use ltphi_core::arith::{q, FieldSpec};
use ltphi_core::fourier::*;
use ltphi_core::herr::*;
use ltphi_core::linalg::kernel;
use ltphi_core::lt::LTData;
use ltphi_core::module::*;
use ltphi_core::{CoeffRing, Error, Field, Interval, LaurentSeries, Ring, Scalar, Q};
use proptest::prelude::*;

type S = LaurentSeries<Scalar>;

const GUARD: i64 = 1;

fn q3() -> &'static Field {
    FieldSpec::qp(3, 6).build().unwrap()
}

fn threshold() -> Q {
    q(6 - GUARD, 1)
}

static CYC: LazyLock<Fourier> =
    LazyLock::new(|| Fourier::new(LTData::cyclotomic(q3(), 80).unwrap(), &OmegaConfig::ExactPeriod(q3().one())).unwrap());

fn interval() -> Interval {
    Interval::new(q(0, 1), q(1, 2)).unwrap()
}

fn trivial() -> PhiGammaModule {
    PhiGammaModule::trivial(CYC.clone(), interval()).unwrap()
}

fn twist(delta: &[i64], weight: i64) -> PhiGammaModule {
    let f = q3();
    let ring = CoeffRing::artinian(f, delta.len() as u32).unwrap();
    let mut c = ring.scalar(f.zero());
    let mut e = ring.scalar(f.one());
    for d in delta {
        c = c.add(&e.mul_scalar(&f.from_i64(*d)));
        e = e.mul(&ring.eps());
    }
    PhiGammaModule::twist(CYC.clone(), &c, weight, interval()).unwrap()
}

fn h(m: &PhiGammaModule, v: Variant, w: usize) -> CohomologyReport {
    build_herr(m, v, 1, w).unwrap().cohomology().unwrap()
}

fn ranks(r: &CohomologyReport) -> [usize; 3] {
    [0, 1, 2].map(|i| r.degrees[i].rank)
}

#[test]
fn differentials_compose_to_zero() {
    for m in [trivial(), twist(&[3], 0), twist(&[1], 1), twist(&[1, 0], 0)] {
        for (v, w) in [(Variant::Phi, 15), (Variant::Psi, 60)] {
            let r = h(&m, v, w);
            assert!(r.d2d1_residual >= threshold(), "{v:?}: {}", r.d2d1_residual);
        }
    }
}

#[test]
fn h0_oracles() {
    // Oracle: phi-fixed, Z-killed constants are 1 for R and none for R(delta), delta(pi) = 3.
    for (m, want) in [(trivial(), 1), (twist(&[3], 0), 0)] {
        for w in [15, 30] {
            assert_eq!(h(&m, Variant::Phi, w).degrees[0].rank, want);
        }
        assert_eq!(h(&m, Variant::Psi, 60).degrees[0].rank, want);
    }
    let e = h(&twist(&[1, 0], 0), Variant::Phi, 15);
    assert_eq!(e.degrees[0].rank, 2);
    assert_eq!(e.h0_eps_rank, Some(1));
}

#[test]
fn power_series_model_fixtures() {
    // Regression values for the o[[T]] model: constants survive in H^2.
    assert_eq!(ranks(&h(&trivial(), Variant::Phi, 15)), [1, 2, 1]);
    assert_eq!(ranks(&h(&trivial(), Variant::Phi, 30)), [1, 2, 1]);
    let chi = h(&twist(&[1], 1), Variant::Phi, 15);
    assert_eq!(ranks(&chi), [0, 0, 0]);
    assert_eq!(chi.degrees[1].elementary_divisors, vec![q(1, 1)]);
    assert_eq!(chi.degrees[2].elementary_divisors, vec![q(1, 1)]);
}

#[test]
fn phi_and_psi_variants() {
    for m in [trivial(), twist(&[3], 0)] {
        let c = compare_phi_psi(&m, 1, 60).unwrap();
        assert!(c.square_residuals.iter().all(|r| *r >= threshold()), "{:?}", c.square_residuals);
        assert!(c.h0_match);
        assert_eq!(c.psi.degrees[0].slack, 60 - c.psi.windows[1]);
    }
    assert!(matches!(build_herr(&trivial(), Variant::Psi, 1, 30), Err(Error::WindowUnderflow(_))));
}

#[test]
fn gamma_acts_trivially_up_to_homotopy() {
    let f = q3();
    for m in [trivial(), twist(&[1], 1)] {
        for n in [1, 2] {
            let c = build_herr(&m, Variant::Phi, n, 15).unwrap();
            for a in [1, 2, -1] {
                let r = gamma_homotopy_check(&c, &f.from_i64(a)).unwrap();
                assert!(r.residuals.iter().all(|x| *x >= threshold()), "n={n} a={a}: {:?}", r.residuals);
            }
        }
    }
    let c = build_herr(&trivial(), Variant::Psi, 1, 60).unwrap();
    assert!(matches!(gamma_homotopy_check(&c, &f.one()), Err(Error::Unsupported(_))));
}

#[test]
fn restriction_between_levels() {
    for m in [trivial(), twist(&[3], 0), twist(&[1], 1)] {
        let r = indep_check(&m, 1, 15).unwrap();
        assert!(r.composition_residual >= threshold());
        for s in &r.restrictions {
            assert!(s.square_residuals.iter().all(|x| *x >= threshold()));
            assert!(s.q_invertible);
        }
        assert!(r.h0_equal);
    }
    assert!(restriction_map(&trivial(), 2, 1, 15).is_err());
}

#[test]
fn invariants_of_the_finite_quotient() {
    for m in [trivial(), twist(&[1], 1), twist(&[1, 0], 0)] {
        let c = build_herr(&m, Variant::Phi, 1, 15).unwrap();
        let one = full_invariants(&m, &c.cohomology().unwrap()).unwrap();
        assert_eq!(one.order, 2);
        assert!(one.averaged);
        assert!(one.leak >= threshold());
        assert_eq!(one.basis.cols(), delta_route_invariants(&c).unwrap().cols());

        let two = full_invariants(&m, &build_herr(&m, Variant::Phi, 2, 15).unwrap().cohomology().unwrap()).unwrap();
        assert_eq!(two.order, 6);
        assert!(!two.averaged);
        assert_eq!(two.basis.cols(), one.basis.cols());
    }
}

#[test]
fn split_extensions() {
    let m = trivial();
    let w = ModuleElement::new(vec![S::int_poly(q3(), 0, &[2, 1, 0, -1])]);
    let v = m.act_phi(&w).unwrap().sub(&w).unwrap();
    let e = ext_phi_class(&m, v);
    assert!(split_section_residual(&e, &w, 20).unwrap() >= threshold());
}

fn cocycle_from(c: &HerrComplex, coeffs: &[i64]) -> Vec<Scalar> {
    let f = q3();
    let k = kernel(&c.d2, f.n).unwrap();
    let mut x = vec![f.zero(); k.rows()];
    for (j, a) in coeffs.iter().enumerate().take(k.cols()) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = *xi + k.get(i, j) * f.from_i64(*a);
        }
    }
    x
}

#[test]
fn theta_on_distinguished_classes() {
    let f = q3();
    let m = trivial();
    let w = 15;
    let c = build_herr(&m, Variant::Phi, 1, w).unwrap();
    // (1, 0): phi(e) = e + 1, Z e = 0.
    let mut x = vec![f.zero(); 2 * w];
    x[0] = f.one();
    let r = theta_roundtrip(&c, &x).unwrap();
    assert!(r.a_residual >= q(30, 1) && r.b_residual >= q(30, 1));
    // Coboundary of y = 1 + T.
    let y = ModuleElement::new(vec![S::int_poly(f, 0, &[1, 1])]).to_coords(w).unwrap();
    let r = theta_roundtrip(&c, &c.d1.apply(&y)).unwrap();
    assert!(r.b_residual >= threshold() && r.commute_residual >= threshold());
    // Not a cocycle.
    let mut bad = vec![f.zero(); 2 * w];
    bad[w + 1] = f.one();
    assert!(matches!(theta_roundtrip(&c, &bad), Err(Error::NotACocycle { .. })));
}

#[test]
fn base_change_to_the_residue_field() {
    for m in [twist(&[1, 0], 0), twist(&[3, 3], 0)] {
        let r = base_change_compare(&m, 1, 1, 15).unwrap();
        assert!(r.d_residuals.iter().all(|x| *x >= threshold()));
        assert!(r.h0_match && r.h1_match && r.h2_match && r.h0_flat_match);
    }
    let r = base_change_compare(&twist(&[1, 0], 0), 1, 1, 15).unwrap();
    assert_eq!((r.full.degrees[0].rank, r.changed.degrees[0].rank), (2, 1));
    let same = base_change_compare(&twist(&[1, 0], 0), 2, 1, 15).unwrap();
    assert!(same.h0_match && same.h2_match);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn ext_phi_round_trip(v in proptest::collection::vec(-9i64..9, 1..8), w in proptest::collection::vec(-9i64..9, 1..8)) {
        let f = q3();
        let m = twist(&[1], 1);
        let v = ModuleElement::new(vec![S::int_poly(f, 0, &v)]);
        let w = ModuleElement::new(vec![S::int_poly(f, 0, &w)]);
        let r = ext_roundtrip_check(&m, &v, &w, 20).unwrap();
        prop_assert!(r.witness_residual >= threshold());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn theta_on_random_cocycles(coeffs in proptest::collection::vec(-5i64..5, 6)) {
        let m = trivial();
        let c = build_herr(&m, Variant::Phi, 1, 15).unwrap();
        let r = theta_roundtrip(&c, &cocycle_from(&c, &coeffs)).unwrap();
        prop_assert!(r.b_residual >= threshold() && r.a_residual >= threshold());
        prop_assert!(r.commute_residual >= threshold());
    }
}
