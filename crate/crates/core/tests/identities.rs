//! Property tests for the algebraic identities: ring axioms, the Leibniz
//! rule, basis-conversion round trips, the Fourier homomorphism, and the
//! translate/convolution agreement.

use proptest::prelude::*;

use polyhg::functions::Term;
use polyhg::measures::inverse_fourier;
use polyhg::multiindex::MultiIndex;
use polyhg::{HFunction, Hypergroup, Measure, MultiPoly, Rational, Scalar};

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(p, q)| Rational::new(p.into(), q.into()))
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (rational(), rational()).prop_map(|(re, im)| Scalar::from_parts(re, im))
}

fn real_scalar() -> impl Strategy<Value = Scalar> {
    rational().prop_map(Scalar::from_rational)
}

fn multi_index(dim: usize, max_entry: u32) -> impl Strategy<Value = MultiIndex> {
    prop::collection::vec(0..=max_entry, dim).prop_map(MultiIndex::new)
}

fn poly(dim: usize) -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((multi_index(dim, 3), scalar()), 0..5).prop_map(move |terms| {
        let mut p = MultiPoly::zero(dim);
        for (alpha, c) in terms {
            p.add_term(alpha, c);
        }
        p
    })
}

fn measure(dim: usize) -> impl Strategy<Value = (Vec<(MultiIndex, Scalar)>, ())> {
    (
        prop::collection::vec((multi_index(dim, 6), scalar()), 0..4),
        Just(()),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn poly_ring_axioms(a in poly(2), b in poly(2), c in poly(2)) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
    }

    #[test]
    fn leibniz_rule(a in poly(2), b in poly(2), alpha in multi_index(2, 2)) {
        // ∂^α(ab) = Σ_{β≤α} binom(α,β) ∂^β a · ∂^{α−β} b
        let lhs = (&a * &b).derive(&alpha);
        let mut rhs = MultiPoly::zero(2);
        for beta in alpha.downset() {
            let gamma = alpha.checked_sub(&beta).unwrap();
            let binom = Scalar::from_rational(Rational::from_integer(alpha.binomial(&beta)));
            rhs = &rhs + &(&a.derive(&beta) * &b.derive(&gamma)).scale(&binom);
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn expansion_recombines_to_the_same_polynomial(p in poly(2), lambda in prop::collection::vec(real_scalar(), 2)) {
        let hg = Hypergroup::chebyshev(2);
        let mu = hg.expand_in_basis(&p).unwrap();
        // Σ_x c_x Q_x must evaluate like p everywhere
        let recombined = mu.fourier().unwrap();
        prop_assert_eq!(recombined.eval(&lambda), p.eval(&lambda));
    }

    #[test]
    fn fourier_is_an_algebra_homomorphism(a in measure(1), b in measure(1)) {
        let hg = Hypergroup::chebyshev(1);
        let mu = Measure::from_weights(hg.clone(), a.0);
        let nu = Measure::from_weights(hg.clone(), b.0);
        let lhs = mu.convolve(&nu).unwrap().fourier().unwrap();
        let rhs = &mu.fourier().unwrap() * &nu.fourier().unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn fourier_round_trip_and_injectivity(a in measure(2)) {
        let hg = Hypergroup::chebyshev(2);
        let mu = Measure::from_weights(hg.clone(), a.0);
        let back = inverse_fourier(&mu.fourier().unwrap(), &hg).unwrap();
        prop_assert_eq!(back, mu.clone());
        // injectivity: a nonzero measure has a nonzero transform
        if !mu.is_zero() {
            prop_assert!(!mu.fourier().unwrap().is_zero());
        }
    }

    #[test]
    fn measure_algebra_is_commutative_and_associative(
        a in measure(1), b in measure(1), c in measure(1)
    ) {
        let hg = Hypergroup::chebyshev(1);
        let mu = Measure::from_weights(hg.clone(), a.0);
        let nu = Measure::from_weights(hg.clone(), b.0);
        let pi = Measure::from_weights(hg.clone(), c.0);
        prop_assert_eq!(mu.convolve(&nu).unwrap(), nu.convolve(&mu).unwrap());
        let left = mu.convolve(&nu).unwrap().convolve(&pi).unwrap();
        let right = mu.convolve(&nu.convolve(&pi).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn translate_agrees_with_convolution_pairing(
        coeffs in prop::collection::vec(real_scalar(), 2),
        orders in prop::collection::vec(multi_index(2, 2), 2),
        lambda in prop::collection::vec(real_scalar(), 2),
        x in multi_index(2, 5),
        y in multi_index(2, 5),
    ) {
        let hg = Hypergroup::chebyshev(2);
        let terms: Vec<Term> = coeffs
            .into_iter()
            .zip(orders)
            .map(|(c, alpha)| Term { coeff: c, order: alpha, point: lambda.clone() })
            .collect();
        let f = HFunction::from_terms(hg.clone(), terms);
        let lhs = f.translate(&y).unwrap().evaluate(&x).unwrap();
        let rhs = hg.linearization(&x, &y).unwrap().pair(&f).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn pairing_respects_translation_of_measures(
        a in measure(1),
        lambda in prop::collection::vec(real_scalar(), 1),
        alpha in multi_index(1, 2),
        y in multi_index(1, 4),
    ) {
        // pair(translate(f,y), μ) == pair(f, μ * δ_y)
        let hg = Hypergroup::chebyshev(1);
        let mu = Measure::from_weights(hg.clone(), a.0);
        let f = HFunction::from_terms(
            hg.clone(),
            [Term { coeff: Scalar::one(), order: alpha, point: lambda }],
        );
        let lhs = mu.pair(&f.translate(&y).unwrap()).unwrap();
        let shifted = mu.convolve(&Measure::dirac(hg.clone(), y)).unwrap();
        let rhs = shifted.pair(&f).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exponential_multiplicativity(lambda in prop::collection::vec(scalar(), 2), x in multi_index(2, 6), y in multi_index(2, 6)) {
        let hg = Hypergroup::chebyshev(2);
        let m = HFunction::exponential(hg.clone(), lambda);
        let lhs = hg.linearization(&x, &y).unwrap().pair(&m).unwrap();
        let rhs = &m.evaluate(&x).unwrap() * &m.evaluate(&y).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert!(m.evaluate(&hg.identity()).unwrap().is_one());
    }

    #[test]
    fn sine_equation(a in prop::collection::vec(real_scalar(), 2), lambda in prop::collection::vec(real_scalar(), 2), x in multi_index(2, 5), y in multi_index(2, 5)) {
        let hg = Hypergroup::chebyshev(2);
        let s = HFunction::sine(hg.clone(), &a, lambda.clone());
        let m = HFunction::exponential(hg.clone(), lambda);
        let lhs = hg.linearization(&x, &y).unwrap().pair(&s).unwrap();
        let rhs = &(&s.evaluate(&x).unwrap() * &m.evaluate(&y).unwrap())
            + &(&s.evaluate(&y).unwrap() * &m.evaluate(&x).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn symbolic_and_polynomial_evaluation_agree(
        alpha in multi_index(2, 3),
        lambda in prop::collection::vec(real_scalar(), 2),
        x in multi_index(2, 6),
    ) {
        // [∂^α Q_x](λ) through the derivative chains vs through the
        // explicit polynomial
        let hg = Hypergroup::chebyshev(2);
        let via_chain = hg.basis_deriv_eval(&x, &alpha, &lambda).unwrap();
        let via_poly = hg.basis_poly(&x).unwrap().derive(&alpha).eval(&lambda);
        prop_assert_eq!(via_chain, via_poly);
    }
}

#[test]
fn moment_nilpotency_of_iterated_differences() {
    // (|α|+1)-fold modified differences annihilate the member f_α
    let hg = Hypergroup::chebyshev(2);
    let point = vec![Scalar::from_ratio(2, 9), Scalar::from_ratio(-1, 3)];
    let fam = polyhg::MomentFamily::new(hg.clone(), point, MultiIndex::new(vec![2, 1]));
    let m = fam.exponential().clone();
    let ys = [
        MultiIndex::new(vec![1, 2]),
        MultiIndex::new(vec![3, 0]),
        MultiIndex::new(vec![2, 2]),
        MultiIndex::new(vec![0, 1]),
    ];
    for (alpha, member) in fam.members() {
        let k = alpha.total() as usize + 1;
        let diff = member.mod_diff(&m, &ys[..k]).unwrap();
        assert!(diff.is_zero_symbol(), "α = {alpha}");
    }
}

#[test]
fn sine_generators_in_two_dims_are_independent() {
    // a·T_x'(λ)T_y(μ) + b·T_x(λ)T_y'(μ) = 0 forces a = b = 0, witnessed at
    // (0,1) and (1,0)
    let hg = Hypergroup::chebyshev(2);
    let lambda = vec![Scalar::from_ratio(1, 2), Scalar::from_ratio(1, 3)];
    let s1 = HFunction::sine(hg.clone(), &[Scalar::one(), Scalar::zero()], lambda.clone());
    let s2 = HFunction::sine(hg.clone(), &[Scalar::zero(), Scalar::one()], lambda.clone());
    let x01 = MultiIndex::new(vec![0, 1]);
    let x10 = MultiIndex::new(vec![1, 0]);
    // s1 vanishes at (0,1) but not (1,0); s2 the other way around
    assert!(s1.evaluate(&x01).unwrap().is_zero());
    assert!(!s1.evaluate(&x10).unwrap().is_zero());
    assert!(s2.evaluate(&x10).unwrap().is_zero());
    assert!(!s2.evaluate(&x01).unwrap().is_zero());
}

#[test]
fn distinct_rational_points_give_distinct_exponentials() {
    let hg = Hypergroup::chebyshev(2);
    let points: Vec<Vec<Scalar>> = vec![
        vec![Scalar::from_ratio(1, 2), Scalar::from_ratio(1, 3)],
        vec![Scalar::from_ratio(1, 2), Scalar::from_ratio(2, 3)],
        vec![Scalar::from_ratio(-1, 2), Scalar::from_ratio(1, 3)],
        vec![Scalar::from_ratio(3, 4), Scalar::from_ratio(5, 7)],
    ];
    let box_elems: Vec<MultiIndex> = (0..=4u32)
        .flat_map(|a| (0..=4u32).map(move |b| MultiIndex::new(vec![a, b])))
        .collect();
    for (i, p) in points.iter().enumerate() {
        for q in points.iter().skip(i + 1) {
            let mp = HFunction::exponential(hg.clone(), p.clone());
            let mq = HFunction::exponential(hg.clone(), q.clone());
            let distinct = box_elems
                .iter()
                .any(|x| mp.evaluate(x).unwrap() != mq.evaluate(x).unwrap());
            assert!(distinct, "{p:?} vs {q:?}");
        }
    }
}
