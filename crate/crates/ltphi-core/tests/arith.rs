use ltphi_core::arith::{exp_field, log_field, q, teichmueller, CoeffRing, FieldSpec, Ring, Scalar};
use ltphi_core::Error;
use proptest::prelude::*;

fn q3(n: i32) -> &'static ltphi_core::Field {
    FieldSpec::qp(3, n).build().unwrap()
}

#[test]
fn pi_squared_in_ramified_field() {
    let fld = FieldSpec::ramified_root(3, 2, 8).build().unwrap();
    let pi = fld.pi();
    let sq = pi * pi;
    assert!(sq.eq_to(&fld.from_i64(3), fld.cap));
    assert_eq!(sq.val(), q(1, 1));
    assert_eq!(pi.val(), q(1, 2));
}

#[test]
fn eps_and_omega_cancellation() {
    let fld = q3(8);
    let r = CoeffRing::artinian(fld, 2).unwrap();
    let one = r.scalar(fld.one());
    let a = one.add(&r.eps());
    let b = one.sub(&r.eps());
    assert!(a.mul(&b).sub(&one).is_zero());
    let ro = CoeffRing::new(fld, CoeffRing::default_v_omega(fld), (-3, 3), 1).unwrap();
    let w = ro.omega();
    let winv = w.inv().unwrap();
    assert!(w.mul(&winv).sub(&ro.scalar(fld.one())).is_zero());
}

#[test]
fn invert_examples() {
    let fld = q3(4);
    let inv2 = fld.from_i64(2).invert().unwrap();
    assert_eq!(inv2.coords_mod(4)[0], 41);
    assert_eq!(fld.from_i64(3).invert().unwrap_err(), Error::NonUnit);
    let r = CoeffRing::artinian(fld, 2).unwrap();
    let a = r.scalar(fld.one()).add(&r.eps());
    let expect = r.scalar(fld.one()).sub(&r.eps());
    assert!(a.inv().unwrap().sub(&expect).is_zero());
}

#[test]
fn teichmueller_examples() {
    let fld = q3(4);
    assert_eq!(teichmueller(fld, &[2]).unwrap().coords_mod(4)[0], 80);
    assert_eq!(teichmueller(fld, &[1]).unwrap().coords_mod(4)[0], 1);
    assert_eq!(teichmueller(fld, &[0]).unwrap_err(), Error::ZeroResidue);
    // Oracle: iterate y -> y^5 on plain integers mod 5^4 until stable.
    let m = 625i64;
    let mut y = 2i64;
    loop {
        let n = (1..=5).fold(1i64, |acc, _| acc * y % m);
        if n == y {
            break;
        }
        y = n;
    }
    let f5 = FieldSpec::qp(5, 4).build().unwrap();
    let t = teichmueller(f5, &[2]).unwrap();
    assert_eq!(t.coords_mod(4)[0] as i64, y);
    assert!(t.pow(4).eq_to(&f5.one(), 4));
}

#[test]
fn exp_log_examples() {
    let fld = q3(10);
    assert!(exp_field(&fld.zero()).unwrap().eq_to(&fld.one(), fld.cap));
    assert!(log_field(&fld.one()).unwrap().is_zero());
    let three = fld.from_i64(3);
    let back = log_field(&exp_field(&three).unwrap()).unwrap();
    assert!(back.eq_to(&three, fld.n));
    assert!(matches!(exp_field(&fld.one()), Err(Error::ConvergenceDomain(_))));
}

#[test]
fn unramified_quadratic_field() {
    // Q_9 = Q_3[x]/(x^2 + 1).
    let spec = FieldSpec { p: 3, e: 1, f: 2, poly: vec![1, 0, 1], precision: 6 };
    let fld = spec.build().unwrap();
    let x = fld.from_coords(&[0, 1]);
    assert!((x * x).eq_to(&-fld.one(), fld.cap));
    let t = teichmueller(fld, &[1, 1]).unwrap();
    assert!(t.pow(8).eq_to(&fld.one(), fld.cap));
    let u = fld.from_coords(&[2, 5]);
    assert!((u * u.invert().unwrap()).eq_to(&fld.one(), fld.cap));
}

#[test]
fn rejects_bad_polynomials() {
    let bad = FieldSpec { p: 3, e: 2, f: 1, poly: vec![-9, 0, 1], precision: 4 };
    assert!(matches!(bad.build(), Err(Error::InvalidField(_))));
    let red = FieldSpec { p: 3, e: 1, f: 2, poly: vec![-1, 0, 1], precision: 4 };
    assert!(matches!(red.build(), Err(Error::InvalidField(_))));
}

fn arb_scalar(fld: &'static ltphi_core::Field) -> impl Strategy<Value = Scalar> {
    (proptest::collection::vec(-1000i64..1000, fld.d), 0i32..4)
        .prop_map(move |(c, s)| fld.from_coords(&c).mul_pi_pow(s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms_ramified(a in arb_scalar(FieldSpec::ramified_root(3, 2, 8).build().unwrap()),
                            b in arb_scalar(FieldSpec::ramified_root(3, 2, 8).build().unwrap()),
                            c in arb_scalar(FieldSpec::ramified_root(3, 2, 8).build().unwrap())) {
        let n = 20;
        prop_assert!(((a * b) * c).eq_to(&(a * (b * c)), n));
        prop_assert!((a * (b + c)).eq_to(&(a * b + a * c), n));
        prop_assert!(((a + b) - b).eq_to(&a, n));
    }

    #[test]
    fn valuation_multiplicative(x in 1i64..100000, y in 1i64..100000) {
        let fld = FieldSpec::qp(3, 8).build().unwrap();
        let (a, b) = (fld.from_i64(x), fld.from_i64(y));
        prop_assert_eq!((a * b).val(), a.val() + b.val());
    }

    #[test]
    fn teichmueller_multiplicative(x in 1u64..5, y in 1u64..5) {
        let fld = FieldSpec::qp(5, 8).build().unwrap();
        let tx = teichmueller(fld, &[x]).unwrap();
        let ty = teichmueller(fld, &[y]).unwrap();
        let txy = teichmueller(fld, &[(x * y) % 5]).unwrap();
        prop_assert!((tx * ty).eq_to(&txy, fld.cap));
    }

    #[test]
    fn exp_is_additive(x in -500i64..500, y in -500i64..500, k in 1i32..3) {
        let fld = FieldSpec::qp(3, 8).build().unwrap();
        let a = fld.from_i64(x).mul_pi_pow(k);
        let b = fld.from_i64(y).mul_pi_pow(k);
        let lhs = exp_field(&(a + b)).unwrap();
        let rhs = exp_field(&a).unwrap() * exp_field(&b).unwrap();
        prop_assert!(lhs.eq_to(&rhs, fld.n));
    }
}
