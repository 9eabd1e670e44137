//! Exact forms of two identities whose commonly quoted versions fail at
//! desk scale: the meeting degree of a slice, and the group generated by the
//! two-matrix pair at `p = 5`.

use markoff_core::counting::{generator_closure, generator_pair, sl2_order};
use markoff_core::ff::{is_prime, FactorCache, Fp, PrimeContext};
use markoff_core::incidence::{expected_meeting_count, meeting_count};
use markoff_core::surface::{classify, ConicClass};

#[test]
fn meeting_degree_depends_on_minus_one() {
    for p in (11..200u64).filter(|&p| is_prime(p)) {
        let c = PrimeContext::new(p).unwrap();
        let want = if p % 4 == 1 { (p - 1) / 2 } else { p.div_ceil(2) };
        assert_eq!(expected_meeting_count(&c), want);
        for v in 1..p {
            let sec = classify(Fp(v), &c);
            let got = meeting_count(Fp(v), &c);
            match sec.class {
                ConicClass::Parabolic if p % 4 == 1 => assert_eq!(got, p - 1, "p={p} ξ={v}"),
                ConicClass::Parabolic => {}
                _ => assert_eq!(got, want, "p={p} ξ={v}"),
            }
        }
    }
}

#[test]
fn pair_generates_sl2_up_to_scalars() {
    for p in [5u64, 7, 11, 13] {
        let c = PrimeContext::new(p).unwrap();
        let mut admissible = 0;
        for s in 2..p {
            for eps in [1i8, -1] {
                let Some(pair) = generator_pair(Fp(s), eps, &c).unwrap() else { continue };
                admissible += 1;
                let r = generator_closure(&pair, &c).unwrap();
                assert_eq!(r.derived_order, sl2_order(p), "p={p} σ={s} ε={eps}");
                assert_eq!(r.order % sl2_order(p), 0);
                if r.eta_rational && eps == -1 {
                    assert!(r.equals_sl2, "p={p} σ={s}");
                }
            }
        }
        assert!(admissible > 0);
    }
}

#[test]
fn p5_pair_has_order_240() {
    let c = PrimeContext::new(5).unwrap();
    let pair = generator_pair(Fp(2), 1, &c).unwrap().unwrap();
    let r = generator_closure(&pair, &c).unwrap();
    assert!(!r.eta_rational);
    assert_eq!((r.order, r.scalars, r.derived_order), (240, 2, 120));
    assert!(!r.equals_sl2);
}

#[test]
fn factor_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("factors.txt");
    let mut cache = FactorCache::new();
    let ctx = PrimeContext::with_cache(1009, &mut cache).unwrap();
    assert_eq!(ctx.fact_pm1(), &vec![(2, 4), (3, 2), (7, 1)]);
    cache.save(&path).unwrap();
    let loaded = FactorCache::load(&path).unwrap();
    assert_eq!(loaded.len(), cache.len());
    let mut loaded = loaded;
    assert_eq!(loaded.get_or_compute(1008), vec![(2, 4), (3, 2), (7, 1)]);
}
