use defk::defmaps::compose;
use defk::k1::{k1_add, k1_invariant};
use defk::modules::{ModuleDescriptor, Rank};
use defk::rings::{DivisionRing, RingDescriptor};
use defk::sample::random_automorphism;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn omega(r: DivisionRing) -> ModuleDescriptor {
    ModuleDescriptor::uniform(RingDescriptor::simple(1, r), Rank::Omega)
}

fn homomorphism_cases(r: DivisionRing, n: usize, cases: usize, seed: u64) {
    let m = omega(r);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..cases {
        let f = random_automorphism(&m, n, &mut rng);
        let g = random_automorphism(&m, n, &mut rng);
        let fg = compose(&m, &f, &g).unwrap();
        let (kf, kg, kfg) = (k1_invariant(&m, &f).unwrap(), k1_invariant(&m, &g).unwrap(), k1_invariant(&m, &fg).unwrap());
        assert_eq!(kfg, k1_add(&kf, &kg).unwrap(), "case {case}: k1(f) = {kf}, k1(g) = {kg}, k1(fg) = {kfg}");
    }
}

#[test]
fn homomorphism_f5_m1() {
    homomorphism_cases(DivisionRing::gf(5), 1, 30, 1);
}

#[test]
fn homomorphism_f5_m2() {
    homomorphism_cases(DivisionRing::gf(5), 2, 30, 2);
}

#[test]
fn homomorphism_q_m1() {
    homomorphism_cases(DivisionRing::Rationals, 1, 30, 3);
}

#[test]
fn homomorphism_q_m2() {
    homomorphism_cases(DivisionRing::Rationals, 2, 30, 4);
}

mod crossing {
    use defk::defmaps::{compose, Piece, PiecewiseBijection};
    use defk::defsets::Block;
    use defk::k1::{k1_add, k1_invariant};
    use defk::modules::Vector;
    use defk::ppsets::{AffineMap, Coset, Subspace};
    use defk::rings::{DivisionRing, Mat, UnitClass};

    /// Scaling by `u` along a line through the origin, identity elsewhere.
    fn scale_line(m: &defk::modules::ModuleDescriptor, dir: Vec<i64>, u: i64) -> PiecewiseBijection {
        let r = m.field(0);
        let row: Vec<_> = dir.iter().map(|&x| r.from_int(x)).collect();
        let line = Coset::new(m, vec![Subspace::span(r, 2, std::slice::from_ref(&row)).unwrap()], Vector::zero(m, 2)).unwrap();
        // a matrix fixing a complement and scaling the line direction
        let other = if row[0] == r.zero() { vec![r.one(), r.zero()] } else { vec![r.zero(), r.one()] };
        let basis = Mat::from_rows(vec![row, other], 2).unwrap();
        let d = Mat::diag(r, &[r.from_int(u), r.one()]);
        let a = basis.inverse(r).unwrap().mul(r, &d).unwrap().mul(r, &basis).unwrap();
        let f = AffineMap::new(m, vec![a], Vector::zero(m, 2)).unwrap();
        PiecewiseBijection::from_pieces(2, vec![Piece::new(m, Block::from_coset(line), f).unwrap()]).globalized(m)
    }

    #[test]
    fn crossing_lines() {
        let r = DivisionRing::gf(5);
        let m = super::omega(r.clone());
        let a = scale_line(&m, vec![1, 0], 2);
        let b = scale_line(&m, vec![1, 1], 3);
        let ab = compose(&m, &a, &b).unwrap();
        let (ka, kb, kab) = (k1_invariant(&m, &a).unwrap(), k1_invariant(&m, &b).unwrap(), k1_invariant(&m, &ab).unwrap());
        assert_eq!(ka.component(0).level(1).det, UnitClass::of(&r, &r.from_int(2)).unwrap());
        assert_eq!(kab, k1_add(&ka, &kb).unwrap());
        assert_eq!(kab.component(0).level(1).det, UnitClass::of(&r, &r.from_int(1)).unwrap());
    }
}

mod product_and_transport {
    use defk::defsets::DefinableSet;
    use defk::k1::{componentwise, k1_invariant, transport_automorphism_group};
    use defk::modules::{ModuleDescriptor, Rank};
    use defk::rings::{Component, DivisionRing, RingDescriptor};
    use defk::sample::random_automorphism;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn componentwise_factorizes() {
        let s = RingDescriptor::new(vec![
            Component { q: 1, ring: DivisionRing::gf(5) },
            Component { q: 1, ring: DivisionRing::Rationals },
        ])
        .unwrap();
        let m = ModuleDescriptor::uniform(s, Rank::Omega);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for case in 0..20 {
            let n = 1 + case % 2;
            let fs: Vec<_> = (0..2).map(|i| random_automorphism(&m.restrict(i), n, &mut rng)).collect();
            let f = componentwise(&m, &fs).unwrap();
            assert!(f.validate(&m).is_empty());
            let c = k1_invariant(&m, &f).unwrap();
            for i in 0..2 {
                let ci = k1_invariant(&m.restrict(i), &fs[i]).unwrap();
                assert_eq!(c.component(i), ci.component(0), "case {case} component {i}");
            }
        }
    }

    #[test]
    fn transport_preserves_k1() {
        let m = super::omega(DivisionRing::gf(5));
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let e1 = DefinableSet::full(&m, 1);
        let e2 = DefinableSet::full(&m, 2);
        let t = transport_automorphism_group(&m, &e1, &e2, &[0]).unwrap();
        let mut done = 0;
        for _ in 0..60 {
            let f = random_automorphism(&m, 1, &mut rng);
            if defk::defmaps::dim_of_map(&m, &f).unwrap().exceeds(&[0]) {
                continue;
            }
            let g = t.transport(&m, &f).unwrap();
            assert!(g.validate(&m).is_empty());
            assert_eq!(k1_invariant(&m, &g).unwrap(), k1_invariant(&m, &f).unwrap());
            done += 1;
        }
        assert!(done > 5, "only {done} samples of dimension 0");
    }
}

mod slide {
    use defk::defmaps::dim_of_map;
    use defk::defsets::DefinableSet;
    use defk::k1::{k1_invariant, transport_automorphism_group};
    use defk::modules::Vector;
    use defk::ppsets::{Coset, Subspace};
    use defk::rings::DivisionRing;
    use defk::sample::random_point_cycle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn points_slide_onto_a_line() {
        for r in [DivisionRing::gf(5), DivisionRing::Rationals] {
            let m = super::omega(r.clone());
            let line = Coset::new(&m, vec![Subspace::span(&r, 2, &[vec![r.one(), r.from_int(2)]]).unwrap()], Vector::zero(&m, 2)).unwrap();
            let e1 = DefinableSet::full(&m, 2);
            let e2 = DefinableSet::from_coset(line);
            let t = transport_automorphism_group(&m, &e1, &e2, &[0]).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(8);
            for _ in 0..20 {
                let f = random_point_cycle(&m, 2, &mut rng);
                assert!(!dim_of_map(&m, &f).unwrap().exceeds(&[0]));
                let g = t.transport(&m, &f).unwrap();
                assert!(g.validate(&m).is_empty());
                assert!(g.source().same_set(&m, &e2));
                assert_eq!(k1_invariant(&m, &g).unwrap(), k1_invariant(&m, &f).unwrap());
            }
        }
    }
}
