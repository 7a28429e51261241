use ltphi_core::arith::{q, FieldSpec, Scalar};
use ltphi_core::fourier::*;
use ltphi_core::lt::LTData;
use ltphi_core::{Error, Field, Interval, LaurentSeries, Result};
use proptest::prelude::*;

type S = LaurentSeries<Scalar>;

fn q3() -> &'static Field {
    FieldSpec::qp(3, 12).build().unwrap()
}

fn cyclotomic(d: i32) -> Fourier {
    let f = q3();
    Fourier::new(LTData::cyclotomic(f, d).unwrap(), &OmegaConfig::ExactPeriod(f.one())).unwrap()
}

fn special(d: i32) -> Fourier {
    let f = q3();
    Fourier::new(LTData::special(f, d).unwrap(), &OmegaConfig::ExactPeriod(f.one())).unwrap()
}

fn agree(a: &S, b: &S) -> Q {
    floor_of(&a.sub(b).unwrap())
}

use ltphi_core::Q;

#[test]
fn cyclotomic_eta_matches_binomial_series() {
    let four = cyclotomic(20);
    let f = q3();
    // a = 1/2 in Z_3: oracle by the product formula for binomial coefficients.
    let a = f.from_ratio(1, 2).unwrap();
    let eta = four.eta(&a).unwrap();
    let mut c = vec![f.one()];
    let mut b = f.one();
    for k in 1..=20i64 {
        b = b * (a - f.from_i64(k - 1)) * f.from_i64(k).inv().unwrap();
        c.push(b);
    }
    let oracle = S::new(&f.zero(), 0, c, false).unwrap();
    assert!(agree(&eta, &oracle) >= q(20, 1));
    assert!(agree(&four.eta_int(2).unwrap(), &S::int_poly(f, 0, &[1, 2, 1])) >= q(30, 1));
    assert!(four.kappa().is_exact() && four.kappa().eq_to(&S::var(&f.zero()), q(1 << 20, 1)));
}

#[test]
fn special_period_search() {
    let f = q3();
    let lt = LTData::special(f, 30).unwrap();
    let sol = solve_period(&lt, 6).unwrap();
    assert!((sol.omega - f.one()).is_zero());
    assert!(sol.multiplicativity >= q(6, 1));
    assert!(sol.psi_compat >= q(6, 1));
    assert!(sol.integrality >= q(0, 1));
}

#[test]
fn period_outside_l_is_rejected() {
    let f = FieldSpec::ramified_root(3, 2, 12).build().unwrap();
    let lt = LTData::special(f, 20).unwrap();
    assert!(matches!(solve_period(&lt, 6), Err(Error::NoSolution(_))));
    assert!(matches!(Fourier::new(lt, &OmegaConfig::ExactPeriod(f.one())), Err(Error::ConfigMismatch(_))));
}

#[test]
fn kappa_inverts_the_chart() {
    let four = special(24);
    let f = q3();
    let eta1 = four.eta(&f.one()).unwrap().sub(&S::one(&f.zero())).unwrap();
    let id = eta1.compose(four.kappa()).unwrap();
    assert!(agree(&id, &S::var(&f.zero()).truncate(id.dmax()).unwrap()) >= q(8, 1));
}

#[test]
fn dirac_calculus() {
    let four = special(24);
    let f = q3();
    let (a, b) = (f.from_i64(4), f.from_i64(-7));
    let prod = four.dirac(&a).unwrap().mul(&four.dirac(&b).unwrap()).unwrap();
    assert!(agree(&prod, &four.dirac(&(a + b)).unwrap()) >= q(8, 1));
    assert!(four.augmentation(&four.dirac(&a).unwrap()).unwrap().eq_to(&f.one(), 30));

    // delta_{pi a} - 1 = eta(a, phi(Z)) - 1 lies in the ideal of phi(Z); Z does not.
    let d = four.dirac(&f.pi()).unwrap().sub(&S::one(&f.zero())).unwrap();
    assert!(four.in_zn_ideal(&d, 1).unwrap());
    assert!(!four.in_zn_ideal(&S::var(&f.zero()).truncate(20).unwrap(), 1).unwrap());
    assert_eq!(four.quotient_rank(1).unwrap(), 3);
    assert_eq!(four.quotient_rank(2).unwrap(), 9);
}

#[test]
fn gamma_charts() {
    let f = q3();
    let r = FieldSpec::ramified_root(3, 2, 12).build().unwrap();
    assert_eq!(GammaChart::n0(f), 1);
    assert_eq!(GammaChart::n0(r), 2);
    assert!(matches!(GammaChart::new(r, 1), Err(Error::ConvergenceDomain(_))));
    for (fld, n) in [(f, 1), (f, 3), (r, 2)] {
        let ch = GammaChart::new(fld, n).unwrap();
        let a = fld.from_i64(5);
        let back = ch.alpha(&ch.chi(&a).unwrap()).unwrap();
        assert!(back.eq_to(&a, fld.n));
        assert!(ch.alpha(&ch.generator()).unwrap().eq_to(&fld.one(), fld.n));
    }
    let ch = GammaChart::new(f, 2).unwrap();
    assert!(ch.alpha(&f.from_i64(4)).is_err());
}

#[test]
fn eta_decomposition() {
    let four = cyclotomic(30);
    let f = q3();
    let parts = four.decompose_eta(&four.eta_int(1).unwrap(), 1).unwrap();
    assert_eq!(parts.len(), 3);
    assert!(agree(&parts[1], &S::one(&f.zero()).truncate(parts[1].dmax()).unwrap()) >= q(30, 1));
    assert!(floor_of(&parts[0]) >= q(30, 1));
    assert!(floor_of(&parts[2]) >= q(30, 1));

    let g = S::int_poly(f, 0, &[2, -1, 0, 5, 7, 1, 0, 3, 1, 1, 4]);
    for n in [1, 2] {
        let parts = four.decompose_eta(&g, n).unwrap();
        assert_eq!(parts.len(), 3usize.pow(n));
        let back = four.recompose_eta(&parts, n).unwrap();
        assert!(agree(&back, &g) >= q(20, 1));
    }

    // Truncated input: agreement on the part of the window carrying N digits.
    let g = g.truncate(30).unwrap();
    let back = four.recompose_eta(&four.decompose_eta(&g, 1).unwrap(), 1).unwrap();
    let back = reliable_prefix(&back, 6).unwrap();
    assert!(back.dmax() >= 3);
    assert!(agree(&back, &g) >= q(6, 1));
}

fn h_gap(four: &Fourier, n: u32) -> OperatorGap {
    let f = q3();
    let ch = GammaChart::new(f, n).unwrap();
    let i = Interval::new(q(1, 9), q(1, 3)).unwrap();
    let op = |m: &S| -> Result<S> { h_n_operator(four, &ch, m)?.sub(&m.shift(1)) };
    operator_valuation(&op, f, -10, 10, 0, &i).unwrap()
}

#[test]
fn h_n_approaches_multiplication_by_t() {
    let four = cyclotomic(60);
    assert_eq!(h_gap(&four, 1).gap, q(2, 9));
    let g2 = h_gap(&four, 2);
    assert_eq!(g2.gap, q(8, 9));
    assert!(g2.excluded.is_empty());
    assert!(h_gap(&four, 3).gap > g2.gap);
}

#[test]
fn operator_valuation_examples() {
    let f = q3();
    let i = Interval::new(q(1, 4), q(1, 2)).unwrap();
    let by_pi = |m: &S| -> Result<S> { Ok(m.mul_scalar(&f.pi())) };
    assert_eq!(operator_valuation(&by_pi, f, -3, 5, 1, &i).unwrap().gap, q(1, 1));
    let by_t = |m: &S| -> Result<S> { Ok(m.shift(1)) };
    let g = operator_valuation(&by_t, f, -3, 5, 1, &i).unwrap();
    assert_eq!(g.gap, q(1, 4));
    assert_eq!(g.interior, (-2, 4));
    assert_eq!(operator_valuation(&by_t, f, 0, 1, 1, &i).unwrap_err(), Error::EmptyInterior);
}

#[test]
fn level_variables_nest() {
    // Z_2 and phi(Z_1) agree as operators on power series.
    let four = cyclotomic(40);
    let f = q3();
    let lt = four.lt();
    let z = |n: u32, m: &S| -> Result<S> {
        let ch = GammaChart::new(f, n).unwrap();
        let e = lt.build_endomorphism(&ch.generator())?.value;
        let a = |x: &S| -> Result<S> { x.compose_trunc(&e, 40)?.sub(x) };
        apply_dist(four.kappa(), &a, m)
    };
    let m = S::int_poly(f, 0, &[1, 2, 0, 1, 4]);
    let z1 = |x: &S| z(1, x);
    let lhs = z(2, &m).unwrap();
    let rhs = apply_dist(lt.phi(), &z1, &m).unwrap();
    assert!(agree(&lhs, &rhs) >= q(10, 1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn eta_is_a_character(a in -30i64..30, b in -30i64..30) {
        let four = special(20);
        let f = q3();
        let (sa, sb) = (f.from_i64(a), f.from_i64(b));
        let prod = four.eta(&sa).unwrap().mul(&four.eta(&sb).unwrap()).unwrap();
        prop_assert!(agree(&prod, &four.eta(&(sa + sb)).unwrap()) >= q(8, 1));
    }

    #[test]
    fn psi_lowers_eta_arguments(a in -30i64..30) {
        let four = special(30);
        let f = q3();
        let sa = f.from_i64(a);
        let lt = four.lt();
        let img = reliable_prefix(&lt.big_psi(&four.eta(&(sa * f.pi())).unwrap()).unwrap(), 6).unwrap();
        prop_assert!(img.is_exact() || img.dmax() >= 4);
        prop_assert!(agree(&img, &four.eta(&sa).unwrap()) >= q(6, 1));
    }
}
