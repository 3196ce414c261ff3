use num_rational::BigRational;
use proptest::prelude::*;

use jaf::cns::{self, check_cns_axioms};
use jaf::compalg;
use jaf::jordan::JordanAlgebra;
use jaf::picmod::{self, Context, Symbol, VBundle};
use jaf::rat::Rat;
use jaf::report::SampleConfig;
use jaf::scalars::{Ring, Scalar};

fn rat_strategy() -> impl Strategy<Value = (i64, i64)> {
    (any::<i64>(), prop_oneof![Just(1i64), 1..i64::MAX, Just(i64::MAX)])
}

fn big(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn rat(n: i64, d: i64) -> Rat {
    Rat::from_big(big(n, d))
}

proptest! {
    #[test]
    fn rat_matches_bigrational((a, b) in rat_strategy(), (c, d) in rat_strategy()) {
        let (x, y) = (rat(a, b), rat(c, d));
        let (bx, by) = (big(a, b), big(c, d));
        prop_assert_eq!(x.add(&y).to_big(), &bx + &by);
        prop_assert_eq!(x.sub(&y).to_big(), &bx - &by);
        prop_assert_eq!(x.mul(&y).to_big(), &bx * &by);
        prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
        if !y.is_zero() {
            prop_assert_eq!(y.recip().unwrap().to_big(), num_traits::Inv::inv(by));
        }
    }
}

fn symbol_strategy() -> impl Strategy<Value = Symbol> {
    prop_oneof![
        (-20i64..20).prop_map(Symbol::line),
        (-20i64..20).prop_map(|n| Symbol::Trace { ext_deg: 3, degree: n }),
        (1u32..5, -5i64..5, -5i64..5).prop_map(|(rank, det, twist)| Symbol::Indec {
            base: picmod::Base::X,
            rank,
            det,
            tag: "G".into(),
            twist
        }),
    ]
}

fn bundle_strategy() -> impl Strategy<Value = VBundle> {
    (any::<bool>(), prop::collection::vec(symbol_strategy(), 0..8))
        .prop_map(|(split, s)| VBundle::from_symbols(Context { split }, s))
}

fn degree(l: &Symbol) -> i64 {
    match l {
        Symbol::Line { degree, .. } => *degree,
        _ => panic!("determinant is a line"),
    }
}

proptest! {
    #[test]
    fn bundle_calculus(a in bundle_strategy(), b in bundle_strategy(), m in -10i64..10) {
        let b = VBundle { context: a.context, ..b };
        let mut sum = a.clone();
        sum.extend(&b);
        prop_assert_eq!(sum.rank(), a.rank() + b.rank());

        let line = VBundle::lines(a.context, &[m]);
        let twisted = picmod::vb_tensor(&line, &a).unwrap();
        prop_assert_eq!(twisted.rank(), a.rank());
        // det(L(m) (x) a) = det(a) + rank(a) m, traces included.
        let shift = a.rank() as i64 * m;
        prop_assert_eq!(degree(&picmod::vb_det(&twisted).unwrap()), degree(&picmod::vb_det(&a).unwrap()) + shift);

        let det = picmod::vb_det(&a).unwrap();
        let lhs = picmod::base_change_line(a.context, &det).unwrap();
        let rhs = picmod::vb_det(&picmod::vb_base_change(&a).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);

        prop_assert_eq!(a.dual().dual(), a.clone());
        prop_assert_eq!(degree(&picmod::vb_det(&a.dual()).unwrap()), -degree(&det));

        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<VBundle>(&json).unwrap(), a);
    }
}

fn small_rationals(n: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-30i64..30, 1i64..6), n)
}

fn to_vec(ring: &Ring, v: &[(i64, i64)]) -> Vec<Scalar> {
    v.iter().map(|&(a, b)| ring.from_ratio(a, b).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn twisted_hermitian_adjoint_identity(
        d in prop_oneof![-7i64..-1, 2i64..7],
        g in prop::collection::vec(prop_oneof![-4i64..-1, 1i64..4], 3),
        x in small_rationals(9),
    ) {
        let q = Ring::rational();
        let comp = compalg::etale2(&q, &q.from_int(d)).unwrap();
        let c = cns::h3(&comp, &[q.from_int(g[0]), q.from_int(g[1]), q.from_int(g[2])]).unwrap();
        let x = to_vec(&q, &x);
        let lhs = c.sharp(&c.sharp(&x));
        let rhs: Vec<Scalar> = x.iter().map(|v| &c.norm(&x) * v).collect();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn spin_fundamental_formula(x in small_rationals(3), y in small_rationals(3), z in small_rationals(3)) {
        let q = Ring::rational();
        let j = JordanAlgebra::from_cns(&cns::hyperbolic_spin(&q));
        let (x, y, z) = (to_vec(&q, &x), to_vec(&q, &y), to_vec(&q, &z));
        prop_assert_eq!(j.u(j.unit(), &y), y.clone());
        let uxy = j.u(&x, &y);
        prop_assert_eq!(j.u(&uxy, &z), j.u(&x, &j.u(&y, &j.u(&x, &z))));
    }

    #[test]
    fn jordan_json_round_trip(x in small_rationals(9), y in small_rationals(9)) {
        let q = Ring::rational();
        let c = cns::h3(&compalg::etale2(&q, &q.from_int(-1)).unwrap(), &[q.one(), q.from_int(2), q.one()]).unwrap();
        let j = JordanAlgebra::from_cns(&c);
        let back = JordanAlgebra::from_json(&j.to_json()).unwrap();
        let (x, y) = (to_vec(&q, &x), to_vec(&q, &y));
        prop_assert_eq!(back.u(&x, &y), j.u(&x, &y));
        prop_assert_eq!(back.norm(&x).unwrap(), j.norm(&x).unwrap());
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let q = Ring::rational();
    let single = || rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let cfg = SampleConfig { samples: 60, seed: 9, bound: 5 };
    let c = cns::h3(&compalg::split_quaternion(&q), &[q.one(), q.one(), q.one()]).unwrap();
    assert_eq!(check_cns_axioms(&c, &cfg), single().install(|| check_cns_axioms(&c, &cfg)));

    // A broken structure fails at the same lowest sample index either way.
    let broken = cns::CubicNormStructure::from_functions(
        &q,
        3,
        vec![q.one(), q.zero(), q.zero()],
        |x| x[0].pow(3),
        |x| vec![&x[0] * &x[0], x[1].clone(), q.zero()],
    )
    .unwrap();
    let wide = check_cns_axioms(&broken, &cfg);
    assert!(!wide.passed());
    assert_eq!(wide, single().install(|| check_cns_axioms(&broken, &cfg)));
}
