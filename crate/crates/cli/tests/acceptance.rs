//! One pass/fail line per acceptance criterion, each with its time budget.
//! Run with `cargo test -p findeg-cli --test acceptance -- --nocapture`.

use std::process::Command;
use std::time::{Duration, Instant};

use findeg::catalog::{resolve, resolve_crew, Object, DEFAULT_SOURCES, DEFAULT_TARGETS};
use findeg::group_ring::{check_elementary_nilpotency, check_projection_filtration};
use findeg::invariants::{Context, InvariantTable};
use findeg::simplicial::{normalized_chains, Caps, Crew, SimplicialModule};
use findeg::suites::{run_suite, stream, SuiteConfig, SuiteReport, Verdict};
use findeg::Fp;

type Outcome = Result<(), String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite(name: &str, config: &SuiteConfig) -> Result<SuiteReport, String> {
    let report = run_suite(name, config).map_err(|e| e.to_string())?;
    if let Some(c) = report.checks.iter().find(|c| c.verdict != Verdict::Pass) {
        return Err(format!("{}: {}", c.name, c.detail));
    }
    Ok(report)
}

fn detail<'a>(report: &'a SuiteReport, prefix: &str) -> Result<&'a serde_json::Value, String> {
    report
        .checks
        .iter()
        .find(|c| c.name.starts_with(prefix))
        .map(|c| &c.detail)
        .ok_or_else(|| format!("no check named `{prefix}…`"))
}

fn nilpotency() -> Outcome {
    for (p, m) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)] {
        let r = check_elementary_nilpotency(p, m).map_err(|e| e.to_string())?;
        ensure(r.vanishes, || format!("I^{} != 0 for p={p}, m={m}", (p - 1) * m + 1))?;
        ensure(r.sharp, || format!("I^{} = 0 for p={p}, m={m}", (p - 1) * m))?;
        // the powers of F_p[Z_p^m] have the dimensions of the truncated
        // polynomial ring F_p[x_1..x_m]/(x_i^p) graded by total degree
        let mut graded = vec![1u64];
        for _ in 0..m {
            let mut next = vec![0u64; graded.len() + p as usize - 1];
            for (i, &g) in graded.iter().enumerate() {
                for j in 0..p as usize {
                    next[i + j] += g;
                }
            }
            graded = next;
        }
        let expected: Vec<usize> = (1..graded.len()).map(|s| graded[s..].iter().sum::<u64>() as usize).collect();
        let mut dims = r.dims.clone();
        while dims.last() == Some(&0) {
            dims.pop();
        }
        ensure(dims == expected, || format!("dim I^s for p={p}, m={m}: {dims:?}, expected {expected:?}"))?;
    }
    Ok(())
}

fn projections() -> Outcome {
    let mut trials = 0;
    for k in [2usize, 3] {
        for r in [1, 2] {
            for p in [2, 3] {
                for mask in 0..1u32 << k {
                    let orders: Vec<u32> = (0..k).map(|i| if mask >> i & 1 == 1 { 3 } else { 2 }).collect();
                    let mut rng = stream(7, &format!("acceptance/{orders:?}/{r}/{p}"));
                    let rep = check_projection_filtration(&orders, p, r, 100, &mut rng).map_err(|e| e.to_string())?;
                    ensure(rep.passed(), || format!("{orders:?} r={r} p={p}: {rep:?}"))?;
                    trials += rep.trials;
                }
            }
        }
    }
    ensure(trials >= 100, || "too few membership trials".into())
}

fn gentle_bounds() -> Outcome {
    let report = suite("lemma-3", &SuiteConfig { seed: 7, ..SuiteConfig::default() })?;
    let pairs = detail(&report, "composites of functions")?;
    ensure(pairs["pairs"] == 729, || format!("composites: {pairs}"))?;
    let products = detail(&report, "products of r-gentle")?;
    ensure(products["pairs"] == 20, || format!("products: {products}"))?;
    let fails = detail(&report, "q^3 fails")?;
    ensure(fails["failing"].is_array(), || "q^3 at r = 2 has no failing tuple".into())?;
    for p in [2, 3, 5] {
        let a5 = detail(&report, &format!("A_5 has I^2 = I over F_{p}"))?;
        ensure(a5["ideal_dim"] == 59 && a5["square_dim"] == 59, || format!("A_5 over F_{p}: {a5}"))?;
    }
    let coprime = report.checks.iter().filter(|c| c.name.starts_with("coprime relation")).count();
    ensure(coprime == 4, || format!("{coprime} coprime checks"))
}

fn module(t: &str) -> SimplicialModule {
    match resolve(t, &Caps::default()).unwrap() {
        Object::Module(m) => m,
        Object::Crew(_) => panic!("{t} is a crew"),
    }
}

/// `[K, K(Z/p, n)] = H^n(K; F_p)`, whose size is read off the Betti numbers
/// of the normalized chains.
fn expected_classes(k: &Crew, p: u32, n: usize) -> usize {
    let c = normalized_chains(k, Fp::new(p).unwrap());
    (p as usize).pow(c.betti(n) as u32)
}

fn simplicial_core() -> Outcome {
    let caps = Caps::default();
    for t in DEFAULT_TARGETS {
        let m = module(t);
        m.round_trip(4).map_err(|e| format!("{t}: {e}"))?;
        let broken = m.check_identities(4);
        ensure(broken.is_empty(), || format!("{t}: {broken:?}"))?;
    }
    for s in DEFAULT_SOURCES {
        let k = resolve_crew(s, &caps).map_err(|e| e.to_string())?;
        for p in [2, 3] {
            ensure(normalized_chains(&k, Fp::new(p).unwrap()).is_complex(), || format!("dd != 0 on {s}"))?;
        }
        for (t, p, n) in [("em:2,1", 2, 1), ("em:3,1", 3, 1), ("em:2,2", 2, 2)] {
            let ctx = Context::module(&k, &module(t), caps).map_err(|e| format!("{s} -> {t}: {e}"))?;
            let want = expected_classes(&k, p, n);
            let got = ctx.pi0().class_count();
            ensure(got == want, || format!("{s} -> {t}: {got} classes, expected {want}"))?;
            let structure = ctx.pi0().module.as_ref().ok_or("no module structure")?;
            ensure((p as usize).pow(structure.h0_dim as u32) == got, || format!("{s} -> {t}: H_0 disagrees"))?;
        }
    }
    Ok(())
}

fn contexts() -> Result<Vec<(String, Context<SimplicialModule>)>, String> {
    let caps = Caps::default();
    let mut out = Vec::new();
    for s in DEFAULT_SOURCES {
        let k = resolve_crew(s, &caps).map_err(|e| e.to_string())?;
        for t in DEFAULT_TARGETS {
            let ctx = Context::module(&k, &module(t), caps).map_err(|e| format!("{s} -> {t}: {e}"))?;
            out.push((format!("{s} -> {t}"), ctx));
        }
    }
    Ok(out)
}

fn stabilization(pairs: &[(String, Context<SimplicialModule>)]) -> Outcome {
    let circle = &pairs.iter().find(|(n, _)| n == "sphere:1 -> em:2,1").ok_or("missing pair")?.1;
    let err = |e: findeg::Error| e.to_string();
    ensure(circle.stabilization_r(4).map_err(err)? == Some(1), || "sphere:1 -> em:2,1 does not stabilize at 1".into())?;
    let k0 = circle.mu_kernel(0).map_err(err)?;
    // the augmentation ideal of F_2[two maps] is spanned by their difference
    ensure(k0.rank() == 1 && k0.contains(&[1, 1]), || format!("ker mu_0 = {:?}", k0.basis()))?;
    ensure(!k0.leq(&circle.nu_kernel()).map_err(err)?.holds(), || "ker mu_0 inside ker nu".into())?;
    ensure(circle.mu_kernel(1).map_err(err)?.is_zero(), || "ker mu_1 != 0".into())?;

    let mut radii = Vec::new();
    for (name, ctx) in pairs {
        let r = ctx.stabilization_r(4).map_err(err)?.ok_or_else(|| format!("{name}: no radius within 4"))?;
        radii.push(format!("{name}: {r}"));
        let n = ctx.pi0().class_count();
        let p = ctx.field().p();
        // degree at most r is a linear condition on tables, so indicator
        // tables plus random ones cover it
        let mut rng = stream(7, name);
        let mut tables: Vec<Vec<u32>> = (0..n).map(|c| (0..n).map(|i| u32::from(i == c)).collect()).collect();
        for _ in 0..20 {
            tables.push((0..n).map(|_| rand::Rng::gen_range(&mut rng, 0..p)).collect());
        }
        for values in tables {
            let table = InvariantTable { p, values };
            let d = ctx.simp_degree(&table, r).map_err(err)?.degree;
            ensure(d.is_some(), || format!("{name}: table {:?} has degree above {r}", table.values))?;
        }
    }
    println!("    stabilization radii: {}", radii.join(", "));
    Ok(())
}

fn monotone_kernels(pairs: &[(String, Context<SimplicialModule>)]) -> Outcome {
    for (name, ctx) in pairs {
        for r in 0..3 {
            let ok = ctx.kernels_decrease(r).map_err(|e| e.to_string())?;
            ensure(ok, || format!("{name}: ker mu_{} not inside ker mu_{r}", r + 1))?;
        }
    }
    Ok(())
}

fn wedge_and_degree_bounds() -> Outcome {
    let report = suite("lemma-12", &SuiteConfig { seed: 7, ..SuiteConfig::default() })?;
    for (p, tables) in [(2, 4), (3, 27)] {
        let d = detail(&report, &format!("gentle degree is at most simplicial degree on [S^1, K(Z/{p},1)]"))?;
        ensure(d["tables"] == tables, || format!("p = {p}: {d}"))?;
    }
    let sums = report.checks.iter().filter(|c| c.name.starts_with("alternating sum")).count();
    let pullbacks = report.checks.iter().filter(|c| c.name.starts_with("pulled-back")).count();
    ensure(sums == 2 && pullbacks == 10, || format!("{sums} wedge checks, {pullbacks} pullback trials"))
}

fn keys() -> Outcome {
    let report = suite("lemma-4", &SuiteConfig { seed: 1, trials: 50, ..SuiteConfig::default() })?;
    let d = detail(&report, "50 seeded split-row keys")?;
    ensure(
        d["trials"] == 50 && d["identity_failures"] == 0 && d["lift_failures"] == 0 && d["sector_failures"] == 0,
        || format!("{d}"),
    )?;
    detail(&report, "key for the end inclusion").map(|_| ())
}

fn determinism() -> Outcome {
    let run = |threads: &str| {
        let o = Command::new(env!("CARGO_BIN_EXE_findeg"))
            .args(["suite", "all", "--seed", "7", "--format", "json", "--threads", threads])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(o.status.code() == Some(0), || {
            format!("exit {:?}: {}", o.status.code(), String::from_utf8_lossy(&o.stderr))
        })?;
        Ok::<_, String>(o.stdout)
    };
    let (a, b) = (run("1")?, run("4")?);
    ensure(!a.is_empty() && a == b, || "reports differ between 1 and 4 threads".into())
}

struct Criterion {
    id: usize,
    what: &'static str,
    budget: Duration,
}

#[test]
fn acceptance() {
    let secs = Duration::from_secs;
    let mut failures = Vec::new();
    let mut record = |c: Criterion, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let result = f();
        let elapsed = t.elapsed();
        let result = result.and_then(|()| {
            ensure(elapsed <= c.budget, || format!("took {elapsed:.1?}, budget {:?}", c.budget))
        });
        match &result {
            Ok(()) => println!("criterion {}: PASS  {} ({elapsed:.2?})", c.id, c.what),
            Err(e) => {
                println!("criterion {}: FAIL  {} ({elapsed:.2?}): {e}", c.id, c.what);
                failures.push(c.id);
            }
        }
    };
    record(
        Criterion { id: 1, what: "augmentation ideal of F_p[Z_p^m] is nilpotent of the exact order", budget: secs(10) },
        &mut nilpotency,
    );
    record(
        Criterion { id: 2, what: "retraction identity and kernel-intersection membership", budget: secs(30) },
        &mut projections,
    );
    record(
        Criterion { id: 3, what: "composition, pushforward, product, coprime, polynomial and A_5 checks", budget: secs(60) },
        &mut gentle_bounds,
    );
    record(
        Criterion { id: 4, what: "boundaries, Dold-Kan round trip and pi_0 cross-check on the catalog", budget: secs(60) },
        &mut simplicial_core,
    );
    let t = Instant::now();
    let pairs = contexts();
    let setup = t.elapsed();
    record(
        Criterion { id: 5, what: "stabilization radii and degrees of all tables", budget: secs(300) - setup },
        &mut || stabilization(pairs.as_ref().map_err(Clone::clone)?),
    );
    record(
        Criterion { id: 6, what: "ker mu_(r+1) inside ker mu_r on the catalog, r < 3", budget: secs(300) },
        &mut || monotone_kernels(pairs.as_ref().map_err(Clone::clone)?),
    );
    record(
        Criterion { id: 7, what: "wedge alternating sums, gentle vs simplicial degree, pullbacks", budget: secs(300) },
        &mut wedge_and_degree_bounds,
    );
    record(
        Criterion { id: 8, what: "key identity, half-key lifts, sectors and the function-square key", budget: secs(60) },
        &mut keys,
    );
    record(
        Criterion { id: 9, what: "`suite all --seed 7` is byte-identical on 1 and 4 threads", budget: secs(600) },
        &mut determinism,
    );
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
