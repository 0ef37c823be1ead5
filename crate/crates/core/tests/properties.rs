mod common;

use num_bigint::BigInt;
use proptest::prelude::*;
use rand::Rng;
use sheafkit::algebra::{CombInterval, ElementaryAlgebra};
use sheafkit::etheory::{
    delta_matrices, e1_group, e_subinterval, gamma_realize, hom, hom_sheaf, hom_sheaf_via_delta,
    is_member, predicted_corank, pullback_check, restrict_hom, skyscraper_e,
    skyscraper_e_via_tower, HomGroup, HomTuple, Location,
};
use sheafkit::linalg::{image, preimage, IntMatrix};
use sheafkit::towers::{Lim1Status, Tower};

use common::*;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

fn sign_diag(rng: &mut rand::rngs::StdRng, n: usize) -> IntMatrix {
    let mut s = IntMatrix::identity(n);
    for i in 0..n {
        if rng.gen_bool(0.5) {
            s.set(i, i, BigInt::from(-1));
        }
    }
    s
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn routes_agree_and_ranks_add_up(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (a, b) = random_pair(&mut rng, 3, 2, 3);
        let g = hom_sheaf(&a, &b).unwrap();
        let via = hom_sheaf_via_delta(&a, &b).unwrap();
        prop_assert_eq!(g.lattice(), via.lattice());
        prop_assert_eq!(g.rank() + predicted_corank(&a, &b).unwrap(), g.ambient_rank());
    }

    #[test]
    fn members_satisfy_relations(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (a, b) = random_pair(&mut rng, 3, 2, 3);
        let g = hom(&a, &b).unwrap();
        for t in g.basis().into_iter().chain([random_member(&mut rng, &g)]) {
            let betas: Vec<Mat> = t.betas.iter().map(to_i64).collect();
            prop_assert!(relation_holds(&a, &b, &betas));
            prop_assert!(is_member(&a, &b, &t).unwrap());
        }
    }

    #[test]
    fn non_members_rejected(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (a, b) = random_pair(&mut rng, 3, 2, 3);
        let sh = shapes(&a, &b);
        let dim: usize = sh.iter().map(|(r, c)| r * c).sum();
        let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-3..=3)).collect();
        let t = HomTuple::from_vector("A", "B", &sh, &sheafkit::linalg::vec_from_i64(&v)).unwrap();
        prop_assert_eq!(is_member(&a, &b, &t).unwrap(), relation_holds(&a, &b, &split(&v, &sh)));
    }

    #[test]
    fn delta_signs_do_not_matter(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (a, b) = random_pair(&mut rng, 3, 2, 3);
        let (da, db) = delta_matrices(&a, &b).unwrap();
        let s = sign_diag(&mut rng, da.rows());
        let flipped = preimage(&(&s * &da), &image(&(&s * &db))).unwrap();
        let negated = preimage(&da, &image(&-&db)).unwrap();
        let g = hom(&a, &b).unwrap();
        prop_assert_eq!(&flipped, g.lattice());
        prop_assert_eq!(&negated, g.lattice());
    }

    #[test]
    fn restriction_lands_in_subinterval(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (a, b) = random_pair(&mut rng, 3, 2, 3);
        let full = a.full_interval();
        let g = hom(&a, &b).unwrap();
        for j in a.intervals() {
            let sub = e_subinterval(&a, &b, &j).unwrap();
            for t in g.basis() {
                let r = restrict_hom(&a, &b, &full, &j, &t).unwrap();
                prop_assert!(sub.contains(&r).unwrap());
            }
        }
    }

    #[test]
    fn gamma_is_injective_and_natural(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(0..=3);
        let a = random_strict(&mut rng, "A", n, 2, 3);
        let b = random_strict(&mut rng, "B", n, 2, 3);
        let g = hom(&a, &b).unwrap();
        let s = random_member(&mut rng, &g);
        let t = random_member(&mut rng, &g);
        let (gs, gt) = (gamma_realize(&a, &b, &s).unwrap(), gamma_realize(&a, &b, &t).unwrap());
        prop_assert!(gs.failing_square(&a, &b).unwrap().is_none());
        prop_assert_eq!(gs.nu(), s.betas.clone());
        prop_assert_eq!(gs == gt, s == t);
    }

    #[test]
    fn skyscraper_routes_agree(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.gen_range(0..=3);
        let b = random_strict(&mut rng, "B", n, 2, 3);
        let d = rng.gen_range(1..=3);
        let mut locs = vec![Location::Start, Location::End];
        locs.extend((1..=n).map(Location::Singular));
        locs.extend((1..=n + 1).map(Location::Segment));
        for loc in locs {
            let closed = skyscraper_e(d, loc, &b).unwrap();
            prop_assert_eq!(&closed, &skyscraper_e_via_tower(d, loc, &b).unwrap());
            prop_assert!(closed.e0.is_trivial());
        }
    }

    #[test]
    fn pullback_holds(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (a, b) = random_pair(&mut rng, 3, 2, 3);
        let iv = a.intervals();
        let y = iv[rng.gen_range(0..iv.len())];
        let z = iv[rng.gen_range(0..iv.len())];
        let r = pullback_check(&a, &b, &y, &z).unwrap();
        prop_assert!(r.holds, "{:?}", r);
        prop_assert_eq!(r.union_rank, r.fiber_product_rank);
    }

    #[test]
    fn refinement_preserves_groups(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (a, b) = random_pair(&mut rng, 3, 2, 3);
        let k = rng.gen_range(1..=a.n + 1);
        let (ra, rb) = (a.refine(k).unwrap(), b.refine(k).unwrap());
        prop_assert_eq!(hom(&a, &b).unwrap().rank(), hom(&ra, &rb).unwrap().rank());
        prop_assert_eq!(e1_group(&a, &b).unwrap(), e1_group(&ra, &rb).unwrap());
    }

    #[test]
    fn serde_round_trips(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (a, b) = random_pair(&mut rng, 3, 2, 3);
        let json = serde_json::to_string(&a).unwrap();
        prop_assert_eq!(serde_json::from_str::<ElementaryAlgebra>(&json).unwrap(), a.clone());
        let g = hom(&a, &b).unwrap();
        let json = serde_json::to_string(&g).unwrap();
        prop_assert_eq!(serde_json::from_str::<HomGroup>(&json).unwrap(), g.clone());
        let t = random_member(&mut rng, &g);
        let json = serde_json::to_string(&t).unwrap();
        prop_assert_eq!(serde_json::from_str::<HomTuple>(&json).unwrap(), t);
        let iv = a.full_interval();
        prop_assert_eq!(iv.to_string().parse::<CombInterval>().unwrap(), iv);
    }

    #[test]
    fn unimodular_self_maps_are_mittag_leffler(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let r = rng.gen_range(1..=3);
        let mut f = IntMatrix::identity(r);
        for _ in 0..4 {
            let mut e = IntMatrix::identity(r);
            let (i, j) = (rng.gen_range(0..r), rng.gen_range(0..r));
            if i != j {
                e.set(i, j, BigInt::from(rng.gen_range(-2i64..=2)));
            } else {
                e.set(i, i, BigInt::from(-1));
            }
            f = &f * &e;
        }
        let t = Tower::iterated(f).unwrap();
        prop_assert!(t.mittag_leffler().unwrap());
        prop_assert_eq!(t.lim1_status().unwrap(), Lim1Status::Zero);
        prop_assert_eq!(t.inverse_limit().unwrap().group.free_rank(), r);
    }

    #[test]
    fn limit_projections_are_compatible(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let m = rng.gen_range(1..=4);
        let ranks: Vec<usize> = (0..=m).map(|_| rng.gen_range(0..=3)).collect();
        let maps: Vec<IntMatrix> =
            (1..=m).map(|k| random_matrix(&mut rng, ranks[k - 1], ranks[k], 3)).collect();
        let t = Tower::new(ranks.clone(), maps.clone()).unwrap();
        let lim = t.inverse_limit().unwrap();
        prop_assert_eq!(lim.group.free_rank(), ranks[m]);
        for k in 1..=m {
            prop_assert_eq!(&(&maps[k - 1] * &lim.projections[k]), &lim.projections[k - 1]);
        }
    }
}
