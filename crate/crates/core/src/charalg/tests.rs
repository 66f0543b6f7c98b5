//! Example and property tests for smooth characters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::padic::PrimeContext;

fn base(p: u64) -> LocalField {
    LocalField::base(PrimeContext::new(p, 8).unwrap())
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn random_nonzero(e: &LocalField, rng: &mut ChaCha8Rng) -> FieldElement {
    loop {
        let coords: Vec<i64> = (0..e.degree()).map(|_| rng.gen_range(-100..100)).collect();
        let x = e.element_from_ints(&coords).unwrap();
        if x.valuation().is_ok() {
            return x.mul(&e.uniformizer().pow(rng.gen_range(-2..3)).unwrap());
        }
    }
}

fn random_value(rng: &mut ChaCha8Rng) -> ExactValue {
    ExactValue::new(q(rng.gen_range(0..8), 8), q(rng.gen_range(-4..5), 2))
}

/// Unramified, ramified and ramified-by-`u p` quadratic extensions.
fn quadratics(f: &LocalField) -> Vec<LocalField> {
    let [_, u, pi, upi] = f.square_class_reps().unwrap();
    [u, pi, upi].iter().map(|d| f.make_extension(d).unwrap()).collect()
}

fn assert_agree(a: &SmoothChar, b: &SmoothChar, rng: &mut ChaCha8Rng) {
    for _ in 0..20 {
        let x = random_nonzero(a.field(), rng);
        assert_eq!(a.eval(&x).unwrap(), b.eval(&x).unwrap());
    }
}

#[test]
fn characters_are_homomorphisms() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for p in [3, 5, 7] {
        let f = base(p);
        for e in std::iter::once(f.clone()).chain(quadratics(&f)) {
            for level in 0..3 {
                let uv = random_value(&mut rng);
                let chi = SmoothChar::random(&e, level, uv, &mut rng).unwrap();
                assert!(chi.level() <= level);
                for _ in 0..20 {
                    let x = random_nonzero(&e, &mut rng);
                    let y = random_nonzero(&e, &mut rng);
                    let lhs = chi.eval(&x.mul(&y)).unwrap();
                    let rhs = chi.eval(&x).unwrap().mul(&chi.eval(&y).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn mul_inv_pow_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = base(5);
    let k = &quadratics(&f)[0];
    let chi = SmoothChar::random(k, 2, random_value(&mut rng), &mut rng).unwrap();
    let psi = SmoothChar::random(k, 1, random_value(&mut rng), &mut rng).unwrap();
    assert!(chi.mul(&chi.inv()).unwrap().is_trivial());
    let sq = chi.pow(2).unwrap();
    for _ in 0..20 {
        let x = random_nonzero(k, &mut rng);
        assert_eq!(sq.eval(&x).unwrap(), chi.eval(&x).unwrap().pow(2));
    }
    let prod = chi.mul(&psi).unwrap();
    assert!(prod.level() <= chi.level().max(psi.level()));
    if chi.level() != psi.level() {
        assert_eq!(prod.level(), chi.level().max(psi.level()));
    }
}

#[test]
fn inconsistent_generators_are_rejected() {
    let f = base(3);
    // -1 has order 2 in (Z/9)^*, so sending it to 1/3 is not a homomorphism
    let res = SmoothChar::from_generators(&f, 2, &[(f.int(-1), q(1, 3)), (f.int(4), q(0, 1))], ExactValue::ONE);
    assert!(matches!(res, Err(Error::NotHomomorphism(_))));
    // 4 alone does not generate (Z/9)^*
    let res = SmoothChar::from_generators(&f, 2, &[(f.int(4), q(1, 3))], ExactValue::ONE);
    assert!(matches!(res, Err(Error::NotHomomorphism(_))));
    let ok = SmoothChar::from_generators(&f, 2, &[(f.int(2), q(1, 6))], ExactValue::ONE).unwrap();
    assert_eq!(ok.level(), 2);
    assert_eq!(ok.eval(&f.int(4)).unwrap(), ExactValue::root_of_unity(q(1, 3)));
}

#[test]
fn restriction_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let f = base(3);
    let u = f.nonsquare_unit().unwrap();
    let k = f.make_extension(&u).unwrap();
    let b = k.make_extension(&k.int(3)).unwrap();
    assert!(SmoothChar::trivial(&b).unwrap().restrict(&k).unwrap().is_trivial());
    // |.|_B^a restricted to K is |.|_K^{a [B:K]}
    let a = q(1, 3);
    let abs_b = SmoothChar::absvalue(&b, a).unwrap();
    let abs_k = SmoothChar::absvalue(&k, a * 2).unwrap();
    assert_agree(&abs_b.restrict(&k).unwrap(), &abs_k, &mut rng);
    // restriction along K' = F(sqrt 3) -> B by the generator
    let kp = f.make_extension(&f.int(3)).unwrap();
    let emb = Embedding::new(&kp, &b, &[b.generator()]).unwrap();
    assert_agree(
        &abs_b.restrict_along(&emb).unwrap(),
        &SmoothChar::absvalue(&kp, a * 2).unwrap(),
        &mut rng,
    );
    // functoriality: B -> K -> F equals B -> F
    let omega = SmoothChar::random(&b, 2, random_value(&mut rng), &mut rng).unwrap();
    let two_step = omega.restrict(&k).unwrap().restrict(&f).unwrap();
    let direct = omega.restrict(&f).unwrap();
    assert_eq!(two_step, direct);
}

#[test]
fn compose_norm_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for p in [3, 5] {
        let f = base(p);
        for k in quadratics(&f) {
            assert!(SmoothChar::trivial(&f).unwrap().compose_norm(&k).unwrap().is_trivial());
            let a = q(rng.gen_range(-3..4), 2);
            let lifted = SmoothChar::absvalue(&f, a).unwrap().compose_norm(&k).unwrap();
            assert_eq!(lifted, SmoothChar::absvalue(&k, a).unwrap());
            let chi = SmoothChar::random(&f, 2, random_value(&mut rng), &mut rng).unwrap();
            let c = chi.compose_norm(&k).unwrap();
            let s = GaloisElement::top(&k).unwrap();
            for _ in 0..20 {
                let x = random_nonzero(&k, &mut rng);
                let n = norm_to(&x, &f).unwrap();
                assert_eq!(c.eval(&x).unwrap(), chi.eval(&n).unwrap());
                assert!(n.embed_into(&k).unwrap().approx_eq(&x.mul(&s.apply(&x).unwrap())));
            }
            assert!(!c.is_regular(&s).unwrap());
        }
    }
}

#[test]
fn conjugation_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let f = base(5);
    for k in quadratics(&f) {
        let s = GaloisElement::top(&k).unwrap();
        let chi = SmoothChar::random(&k, 2, random_value(&mut rng), &mut rng).unwrap();
        assert_eq!(chi.conj(&GaloisElement::identity(&k)).unwrap(), chi);
        assert_eq!(chi.conj(&s).unwrap().conj(&s).unwrap(), chi);
        // chi * chi^sigma = (chi|F) o N
        let prod = chi.mul(&chi.conj(&s).unwrap()).unwrap();
        let via_norm = chi.restrict(&f).unwrap().compose_norm(&k).unwrap();
        assert_eq!(prod, via_norm);
    }
}

#[test]
fn regularity_matches_hilbert_90_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let f = base(3);
    for k in quadratics(&f) {
        let s = GaloisElement::top(&k).unwrap();
        for _ in 0..10 {
            let chi = SmoothChar::random(&k, 2, random_value(&mut rng), &mut rng).unwrap();
            let group = k.unit_group(2).unwrap();
            let mut gens: Vec<FieldElement> = group.elements().to_vec();
            gens.push(k.uniformizer());
            let brute = gens.iter().any(|x| {
                let y = x.div(&s.apply(x).unwrap()).unwrap();
                !chi.eval(&y).unwrap().is_one()
            });
            assert_eq!(chi.is_regular(&s).unwrap(), brute);
        }
    }
}

#[test]
fn unramified_detection() {
    let f = base(3);
    let t = SmoothChar::trivial(&f).unwrap();
    assert_eq!(t.unramified_value(), Some(ExactValue::ONE));
    for k in quadratics(&f) {
        let a = q(3, 2);
        let c = SmoothChar::absvalue(&k, a).unwrap();
        assert_eq!(c.unramified_value(), Some(ExactValue::q_power(-a * k.f() as i64)));
    }
    assert_eq!(SmoothChar::absvalue(&f, q(1, 1)).unwrap().eval(&f.int(3)).unwrap(), ExactValue::q_power(q(-1, 1)));
    assert!(SmoothChar::absvalue(&f, q(0, 1)).unwrap().is_trivial());
    let h = SmoothChar::absvalue(&f, q(1, 2)).unwrap();
    assert_eq!(h.mul(&h).unwrap(), SmoothChar::absvalue(&f, q(1, 1)).unwrap());
    let ram = SmoothChar::from_generators(&f, 1, &[(f.int(2), q(1, 2))], ExactValue::ONE).unwrap();
    assert!(!ram.is_unramified());
    assert_eq!(ram.unramified_value(), None);
}

#[test]
fn eta_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for p in [3, 5, 7] {
        let f = base(p);
        for (i, k) in quadratics(&f).into_iter().enumerate() {
            let eta = SmoothChar::eta_char(&k).unwrap();
            assert!(eta.pow(2).unwrap().is_trivial());
            assert!(!eta.is_trivial());
            if i == 0 {
                assert!(eta.is_unramified());
                assert_eq!(eta.uniformizer_value(), ExactValue::root_of_unity(q(1, 2)));
            } else {
                assert_eq!(eta.level(), 1);
            }
            for _ in 0..20 {
                let y = random_nonzero(&k, &mut rng);
                assert!(eta.eval(&norm_to(&y, &f).unwrap()).unwrap().is_one());
            }
        }
    }
}

#[test]
fn descend_through_norm_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for p in [3, 5] {
        let f = base(p);
        for k in quadratics(&f) {
            let emb = Embedding::chain(&f, &k).unwrap();
            let s = GaloisElement::top(&k).unwrap();
            let eta = SmoothChar::eta_char(&k).unwrap();
            for level in 0..3 {
                let mu0 = SmoothChar::random(&f, level, random_value(&mut rng), &mut rng).unwrap();
                let chi = mu0.compose_norm(&k).unwrap();
                let [a, b] = chi.descend_through_norm(&emb, &s).unwrap().expect("norm character descends");
                assert!(a == mu0 || b == mu0, "{mu0:?} not among {a:?}, {b:?}");
                assert_eq!(a.mul(&eta).unwrap(), b);
            }
            let [a, b] = SmoothChar::trivial(&k).unwrap().descend_through_norm(&emb, &s).unwrap().unwrap();
            assert!(a.is_trivial() || b.is_trivial());
            assert!(a == eta || b == eta);
            // a regular character is obstructed on the kernel
            loop {
                let chi = SmoothChar::random(&k, 2, random_value(&mut rng), &mut rng).unwrap();
                if chi.is_regular(&s).unwrap() {
                    assert!(chi.descend_through_norm(&emb, &s).unwrap().is_none());
                    break;
                }
            }
        }
    }
}

#[test]
fn exact_value_roots_have_full_fibers() {
    let v = ExactValue::new(q(1, 3), q(-1, 2));
    for f in 1..5 {
        let r = v.roots(f);
        assert_eq!(r.len(), f as usize);
        for x in &r {
            assert_eq!(x.pow(f as i64), v);
        }
        let mut s = r.clone();
        s.dedup();
        assert_eq!(s.len(), r.len());
    }
}
