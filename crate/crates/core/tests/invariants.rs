use findeg::invariants::*;
use findeg::simplicial::{Caps, Crew, SimplicialModule, Wedge};
use findeg::{Error, Fp};
use rand::{Rng, SeedableRng};

fn em(p: u32, n: usize) -> SimplicialModule {
    SimplicialModule::eilenberg_maclane(p, n).unwrap()
}

fn circle() -> Crew {
    Crew::sphere(1).unwrap()
}

fn circle_ctx() -> Context<SimplicialModule> {
    Context::module(&circle(), &em(2, 1), Caps::default()).unwrap()
}

/// Brute-force kernel of `μ_r`: every zero-chain whose transform vanishes.
fn brute_kernel<T: findeg::simplicial::Simplicial>(ctx: &Context<T>, r: usize) -> Vec<Vec<u32>> {
    let n = ctx.vertices().len();
    let p = ctx.field().p();
    let total = (p as usize).pow(n as u32);
    (0..total)
        .map(|mut i| {
            let mut v = vec![0; n];
            for x in v.iter_mut() {
                *x = (i % p as usize) as u32;
                i /= p as usize;
            }
            v
        })
        .filter(|v| ctx.mu(r, &ZeroChain::from_dense(v)).unwrap().is_zero())
        .collect()
}

#[test]
fn mu_small_cases() {
    let ctx = circle_ctx();
    assert_eq!(ctx.vertices().len(), 2);
    // vertex 0 is the constant map
    let t = ctx.mu(0, &ZeroChain::from_dense(&[1, 1])).unwrap();
    assert!(t.is_zero(), "augmentation 2 = 0 in F_2");
    let t = ctx.mu(0, &ZeroChain::vertex(2, 1)).unwrap();
    assert_eq!(t.images[0][0].values().copied().collect::<Vec<_>>(), vec![1]);
    let t = ctx.mu(1, &ZeroChain::vertex(2, 1)).unwrap();
    let edge = &t.images[1][0];
    assert_eq!(edge.len(), 1);
    let (simplex, c) = edge.iter().next().unwrap();
    assert_eq!(*c, 1);
    assert_eq!(simplex[0].v, vec![1]);
    assert!(ctx.mu(1, &ZeroChain::from_dense(&[0, 0])).unwrap().is_zero());
}

#[test]
fn mu_kernels_on_circle() {
    let ctx = circle_ctx();
    let k0 = ctx.mu_kernel(0).unwrap();
    assert_eq!(k0.rank(), 1);
    assert!(k0.contains(&[1, 1]));
    assert_eq!(ctx.mu_kernel(1).unwrap().rank(), 0);
    assert!(ctx.kernels_decrease(0).unwrap());
    for r in 0..3 {
        let brute = brute_kernel(&ctx, r);
        let k = ctx.mu_kernel(r).unwrap();
        assert_eq!(brute.len(), 2usize.pow(k.rank() as u32));
        assert!(brute.iter().all(|v| k.contains(v)));
    }
}

#[test]
fn nu_examples() {
    let ctx = circle_ctx();
    assert_eq!(ctx.nu(&ZeroChain::vertex(2, 1)), vec![0, 1]);
    assert_eq!(ctx.pi0().class_count(), 2);
    assert_eq!(ctx.nu_kernel().rank(), 0);
    assert!(ctx.nu_kills_homotopies());
    // S^1 -> K(Z/2, 2) has one class; differences of its maps die under ν.
    let ctx = Context::module(&circle(), &em(2, 2), Caps::default()).unwrap();
    let n = ctx.vertices().len();
    let mut v = vec![0; n];
    v[0] = 1;
    v[n - 1] = 1;
    assert!(ctx.nu(&ZeroChain::from_dense(&v)).iter().all(|&x| x == 0) || n == 1);
}

#[test]
fn stabilization_examples() {
    assert_eq!(circle_ctx().stabilization_r(4).unwrap(), Some(1));
    let f2 = Fp::new(2).unwrap();
    let point = Context::crew(&circle(), &Crew::point(), f2, Caps::default()).unwrap();
    assert_eq!(point.stabilization_r(4).unwrap(), Some(0));
    let s2 = Context::module(&Crew::sphere(2).unwrap(), &em(2, 2), Caps::default()).unwrap();
    let r = s2.stabilization_r(4).unwrap();
    assert!(matches!(r, Some(x) if x <= 4), "{r:?}");
}

#[test]
fn simp_degree_examples() {
    let ctx = circle_ctx();
    for c in 0..2 {
        let d = ctx.simp_degree(&InvariantTable::constant(2, 2, c), 4).unwrap();
        assert_eq!(d.degree, Some(0));
    }
    let id = InvariantTable { p: 2, values: vec![0, 1] };
    let d = ctx.simp_degree(&id, 4).unwrap();
    assert_eq!(d.degree, Some(1));
    assert!(d.factorization.unwrap().terms.len() >= 1);
    let shifted = InvariantTable { p: 2, values: vec![1, 0] };
    assert_eq!(ctx.simp_degree(&shifted, 4).unwrap().degree, Some(1));
    // kernels of μ_r contain no augmentation-1 elements
    for r in 0..3 {
        for v in brute_kernel(&ctx, r) {
            assert_eq!(v.iter().sum::<u32>() % 2, 0);
        }
    }
    assert!(matches!(ctx.simp_degree(&InvariantTable { p: 3, values: vec![0, 1] }, 4), Err(Error::Argument(_))));
}

#[test]
fn degree_shift_invariance_on_z3() {
    let ctx = Context::module(&circle(), &em(3, 1), Caps::default()).unwrap();
    assert_eq!(ctx.pi0().class_count(), 3);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let values: Vec<u32> = (0..3).map(|_| rng.gen_range(0..3)).collect();
        let c = rng.gen_range(0..3);
        let a = ctx.simp_degree(&InvariantTable { p: 3, values: values.clone() }, 4).unwrap();
        let shifted = values.iter().map(|v| (v + c) % 3).collect();
        let b = ctx.simp_degree(&InvariantTable { p: 3, values: shifted }, 4).unwrap();
        assert_eq!(a.degree, b.degree);
    }
}

#[test]
fn separation() {
    let ctx = circle_ctx();
    let s = ctx.separate(0, 1, 4).unwrap().unwrap();
    assert_eq!(s.r, 1);
    assert_eq!(s.table.values, vec![0, 1]);
    assert!(matches!(ctx.separate(1, 1, 4), Err(Error::Argument(_))));
    for (p, n) in [(3, 1), (2, 2)] {
        let ctx = Context::module(&Crew::sphere(n).unwrap(), &em(p, n), Caps::default()).unwrap();
        let stab = ctx.stabilization_r(4).unwrap().unwrap();
        let k = ctx.pi0().class_count();
        for a in 0..k {
            for b in 0..k {
                if a != b {
                    let s = ctx.separate(a, b, 4).unwrap().unwrap();
                    assert!(s.r <= stab);
                }
            }
        }
    }
}

#[test]
fn every_table_has_degree_at_most_stabilization() {
    let ctx = Context::module(&circle(), &em(3, 1), Caps::default()).unwrap();
    let stab = ctx.stabilization_r(4).unwrap().unwrap();
    for code in 0..27u32 {
        let values = vec![code % 3, code / 3 % 3, code / 9];
        let d = ctx.simp_degree(&InvariantTable { p: 3, values }, 4).unwrap();
        assert!(d.degree.unwrap() <= stab);
    }
}

#[test]
fn mu_is_linear() {
    let w = Wedge::new(vec![circle(), circle()]).unwrap();
    let ctx = Context::module(w.crew(), &em(3, 1), Caps::default()).unwrap();
    let n = ctx.vertices().len();
    assert_eq!(n, 9);
    let f = ctx.field();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    for r in 0..3 {
        for _ in 0..5 {
            let a: Vec<u32> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let b: Vec<u32> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let s: Vec<u32> = a.iter().zip(&b).map(|(x, y)| f.add(*x, *y)).collect();
            let ma = ctx.mu(r, &ZeroChain::from_dense(&a)).unwrap();
            let mb = ctx.mu(r, &ZeroChain::from_dense(&b)).unwrap();
            let ms = ctx.mu(r, &ZeroChain::from_dense(&s)).unwrap();
            for (q, level) in ms.images.iter().enumerate() {
                for (i, chain) in level.iter().enumerate() {
                    let mut sum = ma.images[q][i].clone();
                    for (k, c) in &mb.images[q][i] {
                        let e = sum.entry(k.clone()).or_insert(0);
                        *e = f.add(*e, *c);
                    }
                    sum.retain(|_, c| *c != 0);
                    assert_eq!(&sum, chain);
                }
            }
        }
        assert!(ctx.kernels_decrease(r).unwrap());
    }
}

#[test]
fn kernel_inside_augmentation_power() {
    let ctx = circle_ctx();
    let r0 = check_kernel_in_power(&ctx, 0).unwrap();
    assert!(r0.holds);
    assert_eq!((r0.kernel_dim, r0.power_dim), (1, 1));
    let r1 = check_kernel_in_power(&ctx, 1).unwrap();
    assert!(r1.holds);
    assert_eq!(r1.kernel_dim, 0);
    let point = Context::module(&Crew::point(), &em(2, 1), Caps::default()).unwrap();
    assert!(check_kernel_in_power(&point, 0).unwrap().holds);
    let w = Wedge::new(vec![circle(), circle()]).unwrap();
    for (k, u) in [(w.crew().clone(), em(2, 1)), (circle(), em(3, 1)), (w.crew().clone(), em(3, 1))] {
        let ctx = Context::module(&k, &u, Caps::default()).unwrap();
        for r in 0..3 {
            assert!(check_kernel_in_power(&ctx, r).unwrap().holds, "r = {r}");
        }
    }
}

#[test]
fn wedge_alternating_sums() {
    let caps = Caps::default();
    let r = check_wedge_alternating_sum(vec![circle(), circle()], 1, 0, &caps).unwrap();
    assert!(r.holds());
    assert_eq!(r.simplices_checked, 1);
    assert!(check_wedge_alternating_sum(vec![circle(), circle()], 1, 1, &caps).unwrap().holds());
    let r = check_wedge_alternating_sum(vec![circle(), circle(), circle()], 2, 2, &caps).unwrap();
    assert!(r.holds());
    assert!(check_wedge_alternating_sum(vec![circle()], 1, 1, &caps).is_err());
}

#[test]
fn gentle_degree_below_simplicial_degree() {
    let r = check_gentle_below_simplicial(2, 1, 4, Caps::default()).unwrap();
    assert_eq!(r.tables, 4);
    assert!(r.failures.is_empty());
    let r = check_gentle_below_simplicial(3, 1, 4, Caps::default()).unwrap();
    assert_eq!(r.tables, 27);
    assert!(r.failures.is_empty(), "{:?}", r.failures);
    assert_eq!(r.max_simplicial, Some(2));
    let r = check_gentle_below_simplicial(2, 2, 4, Caps::default()).unwrap();
    assert!(r.failures.is_empty());
}

#[test]
fn one_top_simplex_hides_degree() {
    // With the minimal circle, μ_1 is already injective on 3 maps, so the
    // quadratic tables on Z_3 get simplicial degree 1.
    let ctx = Context::module(&circle(), &em(3, 1), Caps::default()).unwrap();
    assert_eq!(ctx.mu_kernel(1).unwrap().rank(), 0);
    let chain = Context::module(&Crew::sphere_chain(1, 3).unwrap(), &em(3, 1), Caps::default()).unwrap();
    assert_eq!(chain.pi0().class_count(), 3);
    assert_eq!(chain.stabilization_r(4).unwrap(), Some(2));
}

#[test]
fn pullback_degrees() {
    let ctx = circle_ctx();
    let id = InvariantTable { p: 2, values: vec![0, 1] };
    let k = findeg::simplicial::CrewMap::identity(&circle());
    let same = check_pullback_degree(&ctx, &ctx, &k, |x| x.clone(), &id, 4).unwrap();
    assert!(same.holds);
    assert_eq!(same.pulled_degree, same.degree);
    let zero = em(2, 1);
    let constant = check_pullback_degree(&ctx, &ctx, &k, |x| findeg::simplicial::Simplicial::base_simplex(&zero, x.q), &id, 4).unwrap();
    assert_eq!(constant.pulled_degree, Some(0));
    for k in crew_maps(&circle(), &circle(), &Caps::default()).unwrap() {
        assert!(check_pullback_degree(&ctx, &ctx, &k, |x| x.clone(), &id, 4).unwrap().holds);
    }
}
