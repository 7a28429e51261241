use ltphi_core::arith::{q, FieldSpec, Scalar};
use ltphi_core::lt::{LTData, PhiKind};
use ltphi_core::{Error, Field, LaurentSeries, Q};
use proptest::prelude::*;

type S = LaurentSeries<Scalar>;

fn q3() -> &'static Field {
    FieldSpec::qp(3, 12).build().unwrap()
}

fn q3_ramified() -> &'static Field {
    FieldSpec::ramified_root(3, 2, 12).build().unwrap()
}

fn poly(fld: &'static Field, dmin: i32, c: &[i64]) -> S {
    S::int_poly(fld, dmin, c)
}

fn trunc(fld: &'static Field, c: &[i64]) -> S {
    S::from_ints(&fld.zero(), 0, c, false).unwrap()
}

/// Agreement to `k` with at least `k` claimed on both sides.
fn close(a: &S, b: &S, k: Q) -> bool {
    a.eq_to(b, k) && a.sub(b).unwrap().min_prec() >= k
}

/// Agreement to whatever precision the operands claim.
fn consistent(a: &S, b: &S) -> bool {
    a.eq_to(b, q(1 << 20, 1))
}

#[test]
fn endomorphism_examples() {
    let f = q3();
    let lt = LTData::cyclotomic(f, 20).unwrap();
    let two = lt.build_endomorphism(&f.from_i64(2)).unwrap();
    assert!(two.digits >= f.n);
    assert!(close(&two.value, &poly(f, 0, &[0, 2, 1]), f.n_q()));
    let one = lt.build_endomorphism(&f.one()).unwrap();
    assert!(close(&one.value, &poly(f, 1, &[1]), f.n_q()));
    let three = lt.build_endomorphism(&f.pi()).unwrap();
    assert!(close(&three.value, lt.phi(), f.n_q()));
    assert_eq!(three.min_pivot, q(1, 1));
}

#[test]
fn minus_one_is_an_involution() {
    for f in [q3(), q3_ramified()] {
        let lt = LTData::special(f, 24).unwrap();
        let m = lt.build_endomorphism(&f.from_i64(-1)).unwrap();
        let back = m.value.compose(&m.value).unwrap();
        let x = S::var(&f.zero()).truncate(24).unwrap();
        assert!(close(&back, &x, f.n_q()));
    }
}

#[test]
fn pi_endomorphism_reduces_to_frobenius() {
    let f = q3_ramified();
    let lt = LTData::special(f, 20).unwrap();
    let p = lt.build_endomorphism(&f.pi()).unwrap().value;
    // [pi] = X^q mod pi, coefficientwise.
    for k in 0..=20 {
        let c = p.coeff(k).unwrap() - if k == 3 { f.one() } else { f.zero() };
        assert!(c.v() >= 1, "degree {k}");
    }
}

#[test]
fn group_law_examples() {
    let f = q3();
    let lt = LTData::cyclotomic(f, 16).unwrap();
    let law = lt.build_group_law().unwrap();
    let fl = &law.value;
    for n in 0..=16 {
        for b in 0..=n {
            let want = match (n - b, b) {
                (1, 0) | (0, 1) | (1, 1) => f.one(),
                _ => f.zero(),
            };
            assert!(fl.coeff(n - b, b).eq_to(&want, f.n), "coefficient ({}, {b})", n - b);
        }
    }
    assert!(close(&fl.at_y_zero(), &S::var(&f.zero()).truncate(16).unwrap(), f.n_q()));

    let lt = LTData::special(f, 12).unwrap();
    let law = lt.build_group_law().unwrap();
    assert!(law.digits >= f.n);
    assert!(law.value.sub(&law.value.swap()).min_val() >= f.n_q());
    assert!(lt.equivariance_residual(&law.value).unwrap() >= f.n_q());
    assert!(lt.associativity_residual(&law.value, 8).unwrap() >= f.n_q());
}

#[test]
fn group_law_over_ramified_field() {
    let f = q3_ramified();
    let lt = LTData::special(f, 10).unwrap();
    let law = lt.build_group_law().unwrap().value;
    assert!(law.sub(&law.swap()).min_val() >= f.n_q());
    assert!(lt.associativity_residual(&law, 7).unwrap() >= f.n_q());
    assert!(lt.equivariance_residual(&law).unwrap() >= f.n_q());
}

fn log_oracle(lt: &LTData, d: i32) -> S {
    // l(phi(T)) = pi l(T), l_1 = 1, solved degree by degree.
    let f = lt.field();
    let pi = f.pi();
    let mut l = vec![f.zero(), f.one()];
    for k in 2..=d {
        let mut r = f.zero();
        for (j, lj) in l.iter().enumerate().skip(1) {
            r = r - *lj * lt.phi_pow(j).coeff(k).unwrap();
        }
        l.push(r * (pi.pow(k as u64) - pi).inv().unwrap());
    }
    S::new(&f.zero(), 0, l, false).unwrap()
}

#[test]
fn log_examples() {
    let f = q3();
    let lt = LTData::cyclotomic(f, 20).unwrap();
    let log = lt.log_lt().unwrap();
    let mut oracle = vec![f.zero()];
    for k in 1..=20i64 {
        oracle.push(f.from_ratio(if k % 2 == 1 { 1 } else { -1 }, k).unwrap());
    }
    let oracle = S::new(&f.zero(), 0, oracle, false).unwrap();
    assert!(consistent(&log, &oracle));
    assert!(log.min_prec() >= f.n_q());

    // log(F(X, Y)) = log X + log Y along X = T, Y = T + T^2.
    let law = lt.build_group_law().unwrap().value;
    let x = S::var(&f.zero());
    let y = poly(f, 1, &[1, 1]);
    let lhs = log.compose(&lt.formal_sum(&law, &x.truncate(20).unwrap(), &y.truncate(20).unwrap()).unwrap()).unwrap();
    let rhs = log.add(&log.compose(&y).unwrap()).unwrap();
    assert!(consistent(&lhs, &rhs));
    assert!(lhs.truncate(12).unwrap().min_prec() >= q(6, 1));
}

#[test]
fn special_log_and_exp() {
    for f in [q3(), q3_ramified()] {
        let lt = LTData::special(f, 24).unwrap();
        let log = lt.log_lt().unwrap();
        assert!(consistent(&log, &log_oracle(&lt, 24)));
        // log([a]) = a log.
        let a = f.from_i64(4);
        let ea = lt.build_endomorphism(&a).unwrap().value;
        assert!(consistent(&log.compose(&ea).unwrap(), &log.mul_scalar(&a)));

        let exp = lt.exp_lt(&log, 20).unwrap();
        let round = exp.compose(&log.truncate(20).unwrap()).unwrap();
        let x = S::var(&f.zero()).truncate(20).unwrap();
        assert!(consistent(&round, &x));
        assert!(round.truncate(8).unwrap().min_prec() >= q(3, 1));
    }
}

#[test]
fn rejects_non_frobenius_series() {
    let f = q3();
    let bad = [poly(f, 0, &[0, 3, 0, 2]), poly(f, 0, &[0, 1, 0, 1]), poly(f, 0, &[1, 3, 0, 1]), poly(f, 0, &[0, 3, 1])];
    for phi in bad {
        assert!(matches!(LTData::new(f, phi, 10, PhiKind::Custom), Err(Error::ConfigMismatch(_))));
    }
    let q5 = FieldSpec::ramified_root(3, 2, 6).build().unwrap();
    assert!(LTData::cyclotomic(q5, 10).is_err());
}

#[test]
fn psi_examples() {
    let f = q3();
    let cyc = LTData::cyclotomic(f, 30).unwrap();
    let one = S::one(&f.zero());
    assert!(close(&cyc.psi_col(&one).unwrap(), &poly(f, 0, &[3]), f.n_q()));
    assert!(close(&cyc.psi_col(&S::var(&f.zero())).unwrap(), &poly(f, 0, &[-3]), f.n_q()));
    let sp = LTData::special(q3_ramified(), 20).unwrap();
    let fr = sp.field();
    assert!(close(&sp.psi_col(&S::one(&fr.zero())).unwrap(), &poly(fr, 0, &[3]), fr.n_q()));

    // Laurent input through the projection formula.
    let tinv = poly(f, -1, &[1]);
    let g = poly(f, 0, &[1, 2, 0, 5]);
    let lhs = cyc.psi_col(&cyc.phi_apply(&poly(f, 0, &[2, 1])).unwrap().mul(&tinv.mul(&g).unwrap()).unwrap());
    let lhs = lhs.unwrap();
    let rhs = poly(f, 0, &[2, 1]).mul(&cyc.psi_col(&tinv.mul(&g).unwrap()).unwrap()).unwrap();
    assert!(close(&lhs, &rhs, f.n_q()));
}

#[test]
fn psi_tables_respect_tail_bound() {
    for f in [q3(), q3_ramified()] {
        let lt = LTData::special(f, 40).unwrap();
        let tables = lt.psi_tables(40).unwrap();
        let lambda = q(1, f.e as i64 * 2);
        for (i, s) in tables.iter().enumerate() {
            for k in 0..=s.dmax() {
                let c = s.coeff(k).unwrap();
                if !c.is_zero() {
                    assert!(c.val() >= lambda * Q::from_integer(i as i64 - 3 * k as i64), "s_{i} at {k}");
                }
            }
        }
    }
}

#[test]
fn decomposition_examples() {
    let f = q3();
    let lt = LTData::cyclotomic(f, 30).unwrap();
    let g = poly(f, 0, &[1, -2, 4]);
    let parts = lt.phi_decompose_tpowers(&lt.phi_apply(&g).unwrap(), 1).unwrap();
    assert!(close(&parts[0], &g, f.n_q()));
    assert!(close(&parts[1], &S::exact_zero(&f.zero()), f.n_q()));
    assert!(close(&parts[2], &S::exact_zero(&f.zero()), f.n_q()));

    let t = S::var(&f.zero());
    let parts = lt.phi_decompose_tpowers(&t, 1).unwrap();
    let back = lt.recompose_tpowers(&parts, 1).unwrap();
    assert!(close(&back, &t, f.n_q()));

    let parts = lt.phi_decompose_tpowers(&poly(f, 0, &[3, 0, 7, 1, 0, 0, 0, 0, 0, 0, 2]), 2).unwrap();
    assert_eq!(parts.len(), 9);
    let back = lt.recompose_tpowers(&parts, 2).unwrap();
    assert!(close(&back, &poly(f, 0, &[3, 0, 7, 1, 0, 0, 0, 0, 0, 0, 2]), f.n_q()));
}

#[test]
fn q_factor_examples() {
    let f = q3();
    let lt = LTData::cyclotomic(f, 20).unwrap();
    assert!(close(&lt.q_factor(0, 20).unwrap(), &S::one(&f.zero()), f.n_q()));
    assert!(close(&lt.q_factor(1, 20).unwrap(), &poly(f, 0, &[3, 3, 1]), f.n_q()));
    let t = S::var(&f.zero());
    assert!(close(&lt.q_factor(2, 20).unwrap().mul(&t).unwrap(), &lt.phi_iterate(2, 20).unwrap(), f.n_q()));
    for (a, b) in [(1u32, 1u32), (2, 1), (1, 2)] {
        let pb = lt.phi_iterate(b, 30).unwrap();
        let lhs = lt.q_factor(a, 30).unwrap().compose(&pb).unwrap().mul(&pb).unwrap();
        assert!(close(&lhs.truncate(30).unwrap(), &lt.phi_iterate(a + b, 30).unwrap().truncate(30).unwrap(), f.n_q()));
    }
}

#[test]
fn phi_powers_shrink_on_disks() {
    for f in [q3(), q3_ramified()] {
        let lt = LTData::special(f, 40).unwrap();
        for k in 0..8u32 {
            let pk = lt.phi_iterate(k, 40).unwrap();
            let h = (k / 2) as i64;
            for tn in 1..12 {
                let t = q(tn, 12);
                let bound = (f.v_pi() * Q::from_integer(h) + t).min(t * Q::from_integer(h));
                assert!(pk.gauss_valuation(t).value >= bound, "k = {k}, t = {t}");
            }
        }
    }
}

fn small_series(len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-20i64..20, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn endomorphisms_compose_and_add(a in -12i64..12, b in -12i64..12) {
        let f = q3();
        let lt = LTData::special(f, 14).unwrap();
        let e = |n: i64| lt.build_endomorphism(&f.from_i64(n)).unwrap().value;
        let (ea, eb) = (e(a), e(b));
        prop_assert!(consistent(&ea.compose(&eb).unwrap(), &e(a * b)));
        let law = lt.build_group_law().unwrap().value;
        let sum = lt.formal_sum(&law, &ea, &eb).unwrap();
        prop_assert!(close(&sum, &e(a + b), f.n_q()));
    }

    #[test]
    fn big_psi_is_left_inverse_of_phi(c in small_series(16)) {
        let f = q3();
        let lt = LTData::cyclotomic(f, 30).unwrap();
        let g = trunc(f, &c);
        let back = lt.big_psi(&lt.phi_apply(&g).unwrap()).unwrap();
        prop_assert!(consistent(&back, &g));
        prop_assert!(back.coeff(0).unwrap().prec() >= 6);
    }

    #[test]
    fn projection_formula(a in small_series(5), b in small_series(12)) {
        let f = q3_ramified();
        let lt = LTData::special(f, 30).unwrap();
        let (fa, gb) = (poly(f, 0, &a), trunc(f, &b));
        let lhs = lt.psi_col(&lt.phi_apply(&fa).unwrap().mul(&gb).unwrap()).unwrap();
        let rhs = fa.mul(&lt.psi_col(&gb).unwrap()).unwrap();
        prop_assert!(consistent(&lhs, &rhs));
        let exact = lt.psi_col(&lt.phi_apply(&fa).unwrap()).unwrap();
        prop_assert!(close(&exact, &fa.mul_scalar(&f.from_i64(3)), f.n_q()));
    }

    #[test]
    fn psi_routes_agree(c in small_series(18), ramified in any::<bool>()) {
        let f = if ramified { q3_ramified() } else { q3() };
        let lt = LTData::special(f, 30).unwrap();
        let g = trunc(f, &c);
        let a = lt.psi_col(&g).unwrap();
        let b = lt.psi_col_decompose(&g).unwrap();
        prop_assert!(consistent(&a, &b));
        let ge = poly(f, 0, &c);
        prop_assert!(close(&lt.psi_col(&ge).unwrap(), &lt.psi_col_decompose(&ge).unwrap(), f.n_q()));
    }
}
