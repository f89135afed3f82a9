use defk::k1::k1_invariant;
use defk::modules::{ModuleDescriptor, Rank};
use defk::oracle::{check_count, check_parity, check_support};
use defk::rings::{DivisionRing, RingDescriptor};
use defk::sample::{random_automorphism, random_set};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn omega(r: DivisionRing) -> ModuleDescriptor {
    ModuleDescriptor::uniform(RingDescriptor::simple(1, r), Rank::Omega)
}

#[test]
fn engine_parity_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (p, n, cases) in [(3u64, 1usize, 25usize), (5, 1, 25), (3, 2, 15)] {
        let m = omega(DivisionRing::gf(p));
        for case in 0..cases {
            let f = random_automorphism(&m, n, &mut rng);
            let c = k1_invariant(&m, &f).unwrap();
            for r in [3, 4] {
                let a = check_parity(&m, &f, &c, r).unwrap();
                assert!(a.ok(), "GF({p}) n={n} case {case}: {:?}; class {c}", a.mismatches);
            }
            let s = check_support(&m, &f, 3).unwrap();
            assert!(s.ok(), "{:?}", s.mismatches);
        }
    }
}

#[test]
fn k0_counts_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let m = omega(DivisionRing::gf(3));
    for _ in 0..20 {
        let d = random_set(&m, 2, &mut rng);
        for r in [3, 4] {
            let a = check_count(&m, &d, r).unwrap();
            assert!(a.ok(), "{:?}", a.mismatches);
        }
    }
}
