use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ltlab::arith::WittCtx;
use ltlab::parse::parse_elt;
use ltlab::poly::PolyRing;
use ltlab::ring::Ring;
use ltlab::stabilizer::StabElt;

fn ctx(which: usize, k: u32) -> WittCtx {
    let (p, n) = [(3, 1), (3, 2), (5, 2), (3, 3), (2, 2)][which];
    WittCtx::new(p, n, k).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn witt_ring_laws(which in 0usize..5, seed in any::<u64>()) {
        let w = ctx(which, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b, c) = (w.random(&mut rng), w.random(&mut rng), w.random(&mut rng));
        prop_assert_eq!(w.mul(&w.mul(&a, &b), &c), w.mul(&a, &w.mul(&b, &c)));
        prop_assert_eq!(w.mul(&a, &w.add(&b, &c)), w.add(&w.mul(&a, &b), &w.mul(&a, &c)));
        prop_assert_eq!(w.frobenius(&w.mul(&a, &b)), w.mul(&w.frobenius(&a), &w.frobenius(&b)));
        prop_assert_eq!(w.frobenius_pow(&a, w.n()), a);
        if let Some(ai) = w.inv(&a) {
            prop_assert_eq!(w.mul(&a, &ai), w.one());
        }
    }

    #[test]
    fn teichmuller_is_multiplicative(which in 0usize..5, seed in any::<u64>()) {
        let w = ctx(which, 4);
        let f = w.residue_field();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = (f.random(&mut rng), f.random(&mut rng));
        prop_assert_eq!(w.teichmuller(&f.mul(&x, &y)), w.mul(&w.teichmuller(&x), &w.teichmuller(&y)));
        prop_assert_eq!(w.residue(&w.teichmuller(&x)), x);
    }

    #[test]
    fn stabilizer_group_laws(which in 0usize..5, s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let w = ctx(which, 4);
        let (g, h, e) = (StabElt::from_seed(w, s1, true), StabElt::from_seed(w, s2, true), StabElt::from_seed(w, s3, false));
        let gh = g.mul(&h).unwrap();
        prop_assert_eq!(gh.mul(&e).unwrap(), g.mul(&h.mul(&e).unwrap()).unwrap());
        prop_assert_eq!(g.mul(&g.inv().unwrap()).unwrap(), StabElt::one(w));
        prop_assert_eq!(gh.det().unwrap(), w.mul(&g.det().unwrap(), &h.det().unwrap()));
        prop_assert_eq!(StabElt::parse(w, &e.to_string()).unwrap(), e);
    }

    #[test]
    fn zeta_is_additive(which in 1usize..4, s1 in any::<u64>(), s2 in any::<u64>()) {
        let w = ctx(which, 5);
        let (g, h) = (StabElt::from_seed(w, s1, true), StabElt::from_seed(w, s2, true));
        let zgh = g.mul(&h).unwrap().zeta().unwrap();
        prop_assert_eq!(zgh, g.zeta().unwrap().add(&h.zeta().unwrap()));
    }

    #[test]
    fn deformation_ring_elements_roundtrip(p in prop::sample::select(vec![3u64, 5]), n in 2usize..4, seed in any::<u64>()) {
        let r = PolyRing::deformation(p, n, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = r.add(&r.random_in_m(&mut rng), &r.from_i64(1 + seed as i64 % 7));
        prop_assert_eq!(parse_elt(&r, &r.format(&x)).unwrap(), x);
    }
}
