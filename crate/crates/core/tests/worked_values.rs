//! Small values worked out by hand, one module at a time.

use std::sync::Arc;

use hallq::dh::DoubleHall;
use hallq::hall::{HallAlgebra, HallElement, TensorElement};
use hallq::quiver::zoo;
use hallq::scalar::{rational, Exponent, Scalar, ScalarRing};
use hallq::uq::{self, XiConfig};
use hallq::{ClassId, HallError, KVector, Quiver, RepCategory};

fn cat(q: Quiver, p: u32) -> Arc<RepCategory> {
    Arc::new(RepCategory::new(q, p).unwrap())
}

fn ex(n: i64) -> Exponent {
    Exponent::from_integer(n)
}

/// The indecomposable of dimension `(1, 1)` on `A₂`.
fn a2_classes(c: &RepCategory) -> (ClassId, ClassId, ClassId, ClassId) {
    let s1 = c.simple(0, &[]).unwrap();
    let s2 = c.simple(1, &[]).unwrap();
    let split = c.direct_sum(s1, s2).unwrap();
    let m = c.classify(&[1, 1]).unwrap().iter().map(|x| x.id).find(|&x| x != split).unwrap();
    (s1, s2, split, m)
}

#[test]
fn scalar_evaluation() {
    let half = ScalarRing::new(2).unwrap().v_pow(Exponent::new(1, 2)).unwrap();
    assert!((half.evaluate(4) - 2f64.sqrt()).abs() < 1e-12);
    assert!(ScalarRing::new(1).unwrap().v_pow(Exponent::new(1, 2)).is_err());
    assert_eq!(Scalar::v_int(0), Scalar::one());
    assert_eq!(Scalar::v_int(2).evaluate(2), 2.0);
    assert_eq!(Scalar::one().evaluate(2), 1.0);
    assert_eq!((&Scalar::v_int(1) - &Scalar::v_int(-1)).evaluate(4), 1.5);
    assert_eq!((&Scalar::v_int(2) - &Scalar::one()).evaluate(3), 2.0);
}

#[test]
fn quiver_validation() {
    assert!(Quiver::parse("vertex x loops=2\n").is_ok());
    assert_eq!(Quiver::parse("vertex x loops=1\n").unwrap_err(), HallError::ConditionB("x".into()));
    let cyc = Quiver::parse("vertex a loops=0\nvertex b loops=0\nedge a b\nedge b a\n");
    assert!(matches!(cyc, Err(HallError::ConditionA(_))));
}

#[test]
fn classes_and_forms() {
    let l2 = zoo::l2(1, 2);
    let a2 = zoo::a2(2);
    assert_eq!(l2.class_of_dimvec(&[1]), KVector(vec![-1]));
    assert_eq!(a2.class_of_dimvec(&[1, 0]), KVector(vec![1, -1]));
    assert_eq!(a2.class_of_dimvec(&[0, 0]), KVector::zero(2));

    let s = |q: &Quiver, i| q.simple_class(i);
    assert_eq!(l2.euler_form(&s(&l2, 0), &s(&l2, 0)), ex(-1));
    assert_eq!(a2.euler_form(&s(&a2, 0), &s(&a2, 1)), ex(-1));
    assert_eq!(a2.euler_form(&s(&a2, 1), &s(&a2, 0)), ex(0));
    for q in [&l2, &a2, &zoo::kronecker(2)] {
        for i in 0..q.num_vertices() {
            for j in 0..q.num_vertices() {
                let want = ex(i64::from(i == j));
                assert_eq!(q.euler_form(&q.projective_class(i), &s(q, j)), want);
            }
        }
    }
    assert_eq!(l2.sym_form(&s(&l2, 0), &s(&l2, 0)), ex(-2));
    assert_eq!(a2.sym_form(&s(&a2, 0), &s(&a2, 1)), ex(-1));
    assert_eq!(a2.sym_form(&s(&a2, 0), &KVector::zero(2)), ex(0));

    assert_eq!(l2.borcherds_cartan().matrix, vec![vec![-2]]);
    assert_eq!(a2.borcherds_cartan().matrix, vec![vec![2, -1], vec![-1, 2]]);
    let both = Quiver::parse("vertex x loops=2\nvertex a loops=0\n").unwrap();
    assert_eq!(both.borcherds_cartan().matrix, vec![vec![-2, 0], vec![0, 2]]);
}

#[test]
fn hom_ext_and_automorphisms() {
    let a1 = cat(zoo::a1(2), 2);
    let s = a1.simple(0, &[]).unwrap();
    let ss = a1.direct_sum(s, s).unwrap();
    assert_eq!(a1.hom_dim(s, s), 1);
    assert_eq!(a1.aut(s), 1);
    assert_eq!(a1.aut(ss), 6);
    assert_eq!(a1.classify(&[2]).unwrap().len(), 1);
    let a1_3 = cat(zoo::a1(3), 3);
    assert_eq!(a1_3.aut(a1_3.simple(0, &[]).unwrap()), 2);

    let l2 = cat(zoo::l2(1, 2), 2);
    let (s00, s01) = (l2.simple(0, &[0, 0]).unwrap(), l2.simple(0, &[0, 1]).unwrap());
    assert_eq!(l2.hom_dim(s00, s01), 0);
    assert_eq!(l2.ext_dim(s00, s00).unwrap(), 2);
    assert_eq!(l2.ext_dim(s00, s01).unwrap(), 1);
    assert_eq!(l2.classify(&[1]).unwrap().len(), 4);

    let a2 = cat(zoo::a2(2), 2);
    let (s1, s2, _, _) = a2_classes(&a2);
    assert_eq!(a2.hom_dim(s1, s2), 0);
    assert_eq!(a2.ext_dim(s2, s1).unwrap(), 0);
    assert_eq!(a2.classify(&[1, 1]).unwrap().len(), 2);
}

#[test]
fn hall_numbers_and_extension_counts() {
    let a1 = cat(zoo::a1(2), 2);
    let s = a1.simple(0, &[]).unwrap();
    let ss = a1.direct_sum(s, s).unwrap();
    assert_eq!(a1.hall_number(s, s, ss).unwrap(), 3);
    assert_eq!(a1.hall_number(s, ClassId::ZERO, ss).unwrap(), 0);
    assert_eq!(a1.ext_count_with_middle(s, s, ss).unwrap(), 1);

    let a2 = cat(zoo::a2(2), 2);
    let (s1, s2, split, m) = a2_classes(&a2);
    assert_eq!(a2.hall_number(s1, s2, m).unwrap(), 1);
    assert_eq!(a2.hall_number(s2, s1, m).unwrap(), 0);
    assert_eq!(a2.ext_count_with_middle(s1, s2, m).unwrap(), 1);
    assert_eq!(a2.ext_count_with_middle(s1, s2, split).unwrap(), 1);
}

#[test]
fn twisted_hall_products() {
    let a1 = cat(zoo::a1(2), 2);
    let h = HallAlgebra::new(a1.clone());
    let s = a1.simple(0, &[]).unwrap();
    let ss = a1.direct_sum(s, s).unwrap();
    let got = h.product(&h.class(s), &h.class(s)).unwrap();
    assert_eq!(got, HallElement::term(ss, KVector::zero(1), Scalar::v_int(-1)).normalize(2));

    let a2 = cat(zoo::a2(2), 2);
    let h = HallAlgebra::new(a2.clone());
    let (s1, s2, split, m) = a2_classes(&a2);
    let got = h.product(&h.class(s1), &h.class(s2)).unwrap();
    let want = HallElement::term(split, KVector::zero(2), Scalar::v_int(-1))
        .add(&HallElement::term(m, KVector::zero(2), Scalar::v_int(-1)))
        .normalize(2);
    assert_eq!(got, want);

    // K_α ⟨A⟩ K_{−α} = v^{(α, Â)} ⟨A⟩
    let q = a2.quiver();
    for alpha in [q.simple_class(0), q.simple_class(1), q.projective_class(0)] {
        for a in [s1, s2, m] {
            let lhs = h.product(&h.product(&h.k(alpha.clone()), &h.class(a)).unwrap(), &h.k(-&alpha)).unwrap();
            let rhs = h.class(a).scale(&Scalar::v_pow(q.sym_form(&alpha, &a2.kclass(a)))).normalize(2);
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn coproduct_counit_and_pairing() {
    let a1 = cat(zoo::a1(2), 2);
    let h = HallAlgebra::new(a1.clone());
    let s = a1.simple(0, &[]).unwrap();
    let ss = a1.direct_sum(s, s).unwrap();
    let zero = KVector::zero(1);
    let mut want = TensorElement::zero();
    want.add_term(vec![(s, zero.clone()), (ClassId::ZERO, zero.clone())], &Scalar::one());
    want.add_term(vec![(ClassId::ZERO, a1.kclass(s)), (s, zero.clone())], &Scalar::one());
    assert_eq!(h.coproduct(&h.class(s)).unwrap(), want);
    assert!(h.counit(&h.class(s)).is_zero());
    assert_eq!(h.counit(&h.k(zero.clone())), Scalar::one());

    assert_eq!(h.pair(&h.class(s), &h.class(s)), Scalar::one());
    assert!(h.pair(&h.class(s), &h.class(ss)).is_zero());
    let (x, y) = (KVector(vec![1]), KVector(vec![2]));
    assert_eq!(h.pair(&h.k(x.clone()), &h.k(y.clone())), Scalar::v_pow(a1.quiver().sym_form(&x, &y)).reduce_mod_q(2));
    for z in [h.class(s), h.class(ss), h.k(x)] {
        assert_eq!(h.pair(&h.one(), &z), h.counit(&z));
    }

    let a1_3 = cat(zoo::a1(3), 3);
    let h3 = HallAlgebra::new(a1_3.clone());
    let s3 = a1_3.simple(0, &[]).unwrap();
    assert_eq!(h3.pair(&h3.class(s3), &h3.class(s3)), Scalar::from_int(2));
}

#[test]
fn double_commutators() {
    for p in [2, 3] {
        let c = cat(zoo::a1(p), p);
        let dh = DoubleHall::new(c.clone(), false);
        let s = c.simple(0, &[]).unwrap();
        let sh = c.kclass(s);
        let got = dh.commutator(&dh.e(s), &dh.f(s)).unwrap();
        let want = dh.kd(sh.clone()).sub(&dh.k(sh.clone())).scale(&Scalar::from_int(p as i64 - 1));
        assert!(dh.equal(&got, &want));
        assert_eq!(dh.dagger(&dh.e(s)).unwrap(), dh.f(s));
        let (a, b) = (KVector(vec![1]), KVector(vec![-2]));
        let kk = dh.product(&dh.k(a.clone()), &dh.kd(b.clone())).unwrap();
        assert_eq!(dh.dagger(&kk).unwrap(), dh.product(&dh.k(b), &dh.kd(a)).unwrap());
        let kkd = dh.product(&dh.k(sh.clone()), &dh.kd(sh.clone())).unwrap();
        assert_eq!(dh.reduce(&kkd), dh.reduce(&dh.one()));
        let red = DoubleHall::new(c.clone(), true);
        let want = red.k(-&sh).sub(&red.k(sh.clone())).scale(&Scalar::from_int(p as i64 - 1));
        assert!(red.equal(&dh.reduce(&got), &want));
        assert!(red.equal(&red.commutator(&red.e(s), &red.f(s)).unwrap(), &want));
    }

    let l2 = cat(zoo::l2(2, 2), 2);
    let dh = DoubleHall::new(l2.clone(), false);
    let (a, b) = (l2.simple(0, &[0, 0]).unwrap(), l2.simple(0, &[1, 0]).unwrap());
    assert!(dh.commutator(&dh.e(a), &dh.f(b)).unwrap().is_empty());
}

#[test]
fn generators_of_the_quantum_group() {
    let l2 = cat(zoo::l2(4, 2), 2);
    let dh = DoubleHall::new(l2.clone(), true);
    let t = uq::build_generators(&dh, &XiConfig::default()).unwrap();
    let lambdas: Vec<Vec<u32>> = t.generators.iter().map(|g| g.lambda.clone()).collect();
    assert_eq!(lambdas, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    let too_many = cat(zoo::l2(5, 2), 2);
    let err = uq::build_generators(&DoubleHall::new(too_many, true), &XiConfig::default()).unwrap_err();
    assert!(matches!(err, HallError::ChargeTooLarge { .. }));

    let a1 = cat(zoo::a1(5), 5);
    let t = uq::build_generators(&DoubleHall::new(a1, true), &XiConfig::default()).unwrap();
    assert_eq!(t.generators.len(), 1);
}

#[test]
fn q_minus_one_is_the_rational_it_should_be() {
    // (q - 1)^{-1} scales Ξ(E) at q = 3
    let c = cat(zoo::a1(3), 3);
    let dh = DoubleHall::new(c.clone(), true);
    let t = uq::build_generators(&dh, &XiConfig::default()).unwrap();
    let s = c.simple(0, &[]).unwrap();
    assert_eq!(t.generators[0].e, dh.e(s).scale(&Scalar::from_rational(rational(1, 2))));
}
