use std::sync::Arc;

use findeg::catalog::resolve_crew;
use findeg::complex::random_complex;
use findeg::group_ring::*;
use findeg::invariants::{Context, InvariantTable, ZeroChain};
use findeg::keys::run_key_trials;
use findeg::simplicial::*;
use findeg::Fp;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fp(p: u32) -> Fp {
    Fp::new(p).unwrap()
}

fn orders() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(prop::sample::select(vec![2u32, 3, 4]), 1..=3)
        .prop_filter("at most 36 elements", |o| o.iter().product::<u32>() <= 36)
}

fn elt(g: &Arc<FinGroup>, f: Fp, v: &[u32]) -> GroupRingElt {
    GroupRingElt::from_coeffs(g.clone(), f, v.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn augmentation_powers_descend_and_absorb(orders in orders(), p in prop::sample::select(vec![2u32, 3])) {
        let f = fp(p);
        let g = Arc::new(FinGroup::abelian(&orders).unwrap());
        let filt = AugFiltration::compute(g.clone(), f, PowerLimit::Stabilize);
        let last = filt.computed();
        for s in 1..=last {
            let ps = filt.power(s).unwrap();
            if s > 1 {
                prop_assert!(ps.leq(&filt.power(s - 1).unwrap()).unwrap().holds());
            }
            let next = filt.power(s + 1);
            for v in ps.basis() {
                let x = elt(&g, f, v);
                prop_assert_eq!(x.augmentation(), 0);
                for h in 0..g.order() {
                    let moved = x.mul(&GroupRingElt::basic(g.clone(), f, h));
                    prop_assert!(ps.contains(moved.coeffs()));
                    if let Some(next) = &next {
                        let deeper = x.mul(&GroupRingElt::one_minus(g.clone(), f, h));
                        prop_assert!(next.contains(deeper.coeffs()));
                    }
                }
            }
        }
    }

    #[test]
    fn gentleness_is_monotone(seed in any::<u64>(), n in prop::sample::select(vec![2u32, 3, 4, 9]), p in prop::sample::select(vec![2u32, 3])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = GroupFunction::random(&mut rng, Arc::new(FinGroup::cyclic(n).unwrap()), fp(p));
        let filt = AugFiltration::compute(f.domain().clone(), fp(p), PowerLimit::Stabilize);
        let verdicts: Vec<bool> = (0..6).map(|r| gentle_defect(&f, r).holds()).collect();
        for w in verdicts.windows(2) {
            prop_assert!(!w[0] || w[1]);
        }
        prop_assert_eq!(verdicts[0], f.is_constant());
        match gentle_degree_in(&filt, &f).unwrap() {
            Some(d) if d < 6 => prop_assert!(verdicts[d] && (d == 0 || !verdicts[d - 1])),
            Some(_) => prop_assert!(!verdicts[5]),
            None => prop_assert!(verdicts.iter().all(|v| !v)),
        }
    }

    #[test]
    fn homomorphisms_are_one_gentle(p in prop::sample::select(vec![2u32, 3, 5]), a in 0u32..5, b in 0u32..5) {
        // x ↦ a·x on Z_p, and (x, y) ↦ a·x + b·y on Z_p^2
        let f = GroupFunction::from_fn(Arc::new(FinGroup::cyclic(p).unwrap()), fp(p), |x| (a as usize * x) as i64);
        prop_assert!(gentle_defect(&f, 1).holds());
        let g2 = Arc::new(FinGroup::abelian(&[p, p]).unwrap());
        let t = g2.clone();
        let h = GroupFunction::from_fn(g2, fp(p), move |x| {
            let v = t.tuple(x).unwrap();
            (a * v[0] + b * v[1]) as i64
        });
        prop_assert!(gentle_defect(&h, 1).holds());
        let c = GroupFunction::constant(f.domain().clone(), fp(p), a % p);
        prop_assert_eq!(gentle_degree(&c), Some(0));
    }

    #[test]
    fn pushforward_respects_the_filtration(seed in any::<u64>(), m in 1u32..=2, p in prop::sample::select(vec![2u32, 3]), s in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let domain = Arc::new(FinGroup::abelian(&vec![p; m as usize]).unwrap());
        let f = GroupFunction::random(&mut rng, domain, fp(p));
        let r = gentle_degree(&f).unwrap();
        let map = f.as_group_map().unwrap();
        prop_assert!(check_pushforward_containment(&map, r, s, fp(p)).unwrap());
    }

    #[test]
    fn dold_kan_round_trip(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3]), top in 0usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_complex(&mut rng, fp(p), top, 2);
        let m = SimplicialModule::dold_kan(c);
        prop_assert!(m.round_trip(top + 1).is_ok());
        prop_assert!(m.check_identities(top + 1).is_empty());
    }
}

/// Every function on `Z_p^m` with `p^m <= 9` has gentle degree at most
/// `(p-1)m`.
#[test]
fn elementary_abelian_degree_bound() {
    for (p, m) in [(2u32, 1u32), (2, 2), (2, 3), (3, 1), (3, 2)] {
        let g = Arc::new(FinGroup::abelian(&vec![p; m as usize]).unwrap());
        let filt = AugFiltration::compute(g.clone(), fp(p), PowerLimit::Stabilize);
        let mut worst = 0;
        for f in GroupFunction::all(g, fp(p)).unwrap() {
            let d = gentle_degree_in(&filt, &f).unwrap().expect("p-groups make every function gentle");
            worst = worst.max(d);
        }
        assert_eq!(worst, ((p - 1) * m) as usize, "p={p} m={m}");
    }
}

const CREWS: [&str; 4] = ["sphere:1", "sphere:1:2", "wedge:(sphere:1,sphere:1)", "power:(sphere:1,2)"];

fn crew(s: &str) -> Crew {
    resolve_crew(s, &Caps::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn chains_are_functorial(a in 0usize..4, b in 0usize..4, c in 0usize..4, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let (k, l, m) = (crew(CREWS[a]), crew(CREWS[b]), crew(CREWS[c]));
        let caps = Caps::default();
        let fs = enumerate_maps(&k, &l, &caps).unwrap();
        let gs = enumerate_maps(&l, &m, &caps).unwrap();
        let (f, g) = (i.get(&fs), j.get(&gs));
        let field = fp(3);
        let whole = f.then(g, &m).chain_map(&k, &m, field);
        let parts = g.chain_map(&l, &m, field).compose(&f.chain_map(&k, &l, field)).unwrap();
        prop_assert!(whole.agrees_with(&parts));
        prop_assert!(normalized_chains(&k, field).is_complex());
    }

    #[test]
    fn vertices_of_powers_are_tuples(a in 0usize..4, r in 1usize..=3) {
        let k = crew(CREWS[a]);
        let pk = power(&k, r, DEFAULT_CELL_CAP).unwrap();
        let n = k.cells(0).len();
        prop_assert_eq!(normalized_chains(pk.crew(), fp(2)).rank(0), n.pow(r as u32));
        prop_assert!(normalized_chains(pk.crew(), fp(2)).is_complex());
    }

    #[test]
    fn mu_is_linear(seed in any::<u64>(), r in 0usize..=2, which in 0usize..3) {
        let (src, p) = [("wedge:(sphere:1,sphere:1)", 3), ("power:(sphere:1,2)", 2), ("sphere:1:2", 3)][which];
        let target = SimplicialModule::eilenberg_maclane(p, 1).unwrap();
        let ctx = Context::module(&crew(src), &target, Caps::default()).unwrap();
        let n = ctx.vertices().len();
        let f = fp(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<u32> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, 0..p)).collect();
        let y: Vec<u32> = (0..n).map(|_| rand::Rng::gen_range(&mut rng, 0..p)).collect();
        let sum: Vec<u32> = x.iter().zip(&y).map(|(&a, &b)| f.add(a, b)).collect();
        let (mx, my, ms) = (
            ctx.mu(r, &ZeroChain::from_dense(&x)).unwrap(),
            ctx.mu(r, &ZeroChain::from_dense(&y)).unwrap(),
            ctx.mu(r, &ZeroChain::from_dense(&sum)).unwrap(),
        );
        for (q, level) in ms.images.iter().enumerate() {
            for (cell, image) in level.iter().enumerate() {
                let mut expected = mx.images[q][cell].clone();
                for (key, &c) in &my.images[q][cell] {
                    let e = expected.entry(key.clone()).or_insert(0);
                    *e = f.add(*e, c);
                }
                expected.retain(|_, c| *c != 0);
                prop_assert_eq!(image, &expected);
            }
        }
    }

    #[test]
    fn factorizations_evaluate_back(seed in any::<u64>(), which in 0usize..3) {
        let (src, p) = [("wedge:(sphere:1,sphere:1)", 3), ("power:(sphere:1,2)", 2), ("sphere:1", 3)][which];
        let target = SimplicialModule::eilenberg_maclane(p, 1).unwrap();
        let ctx = Context::module(&crew(src), &target, Caps::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let classes = ctx.pi0().class_count();
        let table = InvariantTable { p, values: (0..classes).map(|_| rand::Rng::gen_range(&mut rng, 0..p)).collect() };
        let stab = ctx.stabilization_r(4).unwrap().unwrap();
        let rep = ctx.simp_degree(&table, 4).unwrap();
        let d = rep.degree.unwrap();
        prop_assert!(d <= stab);
        let l = rep.factorization.unwrap();
        prop_assert_eq!(l.r, d);
        let n = ctx.vertices().len();
        let f = fp(p);
        for b in 0..n {
            let mu_b = ctx.mu(d, &ZeroChain::vertex(n, b)).unwrap();
            let mut value = 0;
            for (coord, x) in &l.terms {
                let via = ctx.mu(d, &ZeroChain::vertex(n, coord.via)).unwrap();
                let key = via.images[coord.degree][coord.cell].keys().next().expect("coordinate is nondegenerate");
                let c = mu_b.images[coord.degree][coord.cell].get(key).copied().unwrap_or(0);
                value = f.add(value, f.mul(c, *x));
            }
            prop_assert_eq!(value, table.values[ctx.pi0().class_of[b]]);
        }
        prop_assert!(ctx.nu_kills_homotopies());
    }

    #[test]
    fn random_key_trials_hold(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rep = run_key_trials(&mut rng, fp(p), 3, 2, 3).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep);
    }
}
