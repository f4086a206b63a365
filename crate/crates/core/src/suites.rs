//! Verification suites. Each suite runs a fixed list of checks and collects
//! one verdict per check into a report that is byte-for-byte reproducible
//! from the seed and caps.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::catalog::{map_label, resolve, resolve_crew, Object, DEFAULT_SOURCES, DEFAULT_TARGETS};
use crate::complex::ChainComplex;
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::group_ring::{
    check_composition_bound, check_coprime_relation, check_elementary_nilpotency, check_integer_polynomial,
    check_perfect_stability, check_product_gentle, check_projection_filtration, check_pushforward_containment,
    gentle_degree, Defect, FinGroup, GroupFunction,
};
use crate::invariants::{
    check_gentle_below_simplicial, check_kernel_in_power, check_pullback_degree, check_wedge_alternating_sum,
    crew_maps, Context, InvariantTable,
};
use crate::keys::{key_for_function_square, run_key_trials};
use crate::linalg::Matrix;
use crate::simplicial::{normalized_chains, reduced_cylinder, Caps, Crew, ModElem, SimplicialModule};

pub const SUITES: [&str; 5] = ["lemma-3", "lemma-4", "lemma-7", "lemma-12", "theorem-1-2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    CapExceeded,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub verdict: Verdict,
    pub detail: Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub caps: Caps,
    /// Seeded key trials in the keys suite.
    pub trials: usize,
    pub r_max: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 0,
            caps: Caps::default(),
            trials: 50,
            r_max: crate::invariants::DEFAULT_R_MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub config: SuiteConfig,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub capped: usize,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.capped == 0
    }

    /// 0 when everything passed, 2 on any failure, otherwise 3 when a cap
    /// stopped some check.
    pub fn exit_code(&self) -> i32 {
        if self.failed > 0 {
            2
        } else if self.capped > 0 {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Runs `name` (one of [`SUITES`] or `all`).
pub fn run_suite(name: &str, config: &SuiteConfig) -> Result<SuiteReport> {
    let names: Vec<&str> = match name {
        "all" => SUITES.to_vec(),
        n if SUITES.contains(&n) => vec![n],
        n => return Err(Error::validation(format!("unknown suite `{n}`; expected one of {SUITES:?} or all"))),
    };
    let mut checks = Vec::new();
    for n in names {
        let mut run = Runner {
            suite: n,
            config,
            checks: &mut checks,
        };
        match n {
            "lemma-3" => group_ring_suite(&mut run),
            "lemma-4" => keys_suite(&mut run),
            "lemma-7" => projection_suite(&mut run),
            "lemma-12" => wedge_suite(&mut run),
            _ => stabilization_suite(&mut run),
        }
    }
    let count = |v| checks.iter().filter(|c| c.verdict == v).count();
    Ok(SuiteReport {
        suite: name.to_string(),
        config: *config,
        passed: count(Verdict::Pass),
        failed: count(Verdict::Fail),
        capped: count(Verdict::CapExceeded),
        checks,
    })
}

/// An RNG for one named stream, derived from the run seed.
pub fn stream(seed: u64, tag: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(tag.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

struct Runner<'a> {
    suite: &'a str,
    config: &'a SuiteConfig,
    checks: &'a mut Vec<Check>,
}

impl Runner<'_> {
    fn check(&mut self, name: impl Into<String>, body: impl FnOnce() -> Result<(bool, Value)>) {
        let (verdict, detail) = match body() {
            Ok((true, d)) => (Verdict::Pass, d),
            Ok((false, d)) => (Verdict::Fail, d),
            Err(e @ Error::CapExceeded(_)) => (Verdict::CapExceeded, json!({ "error": e.to_string() })),
            Err(e) => (Verdict::Fail, json!({ "error": e.to_string() })),
        };
        self.checks.push(Check {
            suite: self.suite.to_string(),
            name: name.into(),
            verdict,
            detail,
        });
    }

    fn rng(&self, tag: &str) -> ChaCha8Rng {
        stream(self.config.seed, &format!("{}/{tag}", self.suite))
    }
}

fn fp(p: u32) -> Result<Fp> {
    Fp::new(p)
}

fn cyclic(n: u32) -> Result<Arc<FinGroup>> {
    Ok(Arc::new(FinGroup::cyclic(n)?))
}

fn group_ring_suite(run: &mut Runner) {
    for (p, m) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)] {
        run.check(format!("augmentation ideal of F_{p}[Z_{p}^{m}] vanishes at power {}", (p - 1) * m + 1), || {
            let r = check_elementary_nilpotency(p, m)?;
            Ok((r.vanishes && r.sharp, serde_json::to_value(&r).unwrap()))
        });
    }

    run.check("composites of functions Z_3 -> Z_3 -> Z_3 are rs-gentle", || {
        let fs = GroupFunction::all(cyclic(3)?, fp(3)?)?;
        let mut failing = Vec::new();
        let mut pairs = 0;
        for f in &fs {
            for g in &fs {
                pairs += 1;
                let r = check_composition_bound(f, g)?;
                if r.holds != Some(true) {
                    failing.push((f.values().to_vec(), g.values().to_vec()));
                }
            }
        }
        Ok((failing.is_empty(), json!({ "pairs": pairs, "failing": failing })))
    });

    run.check("pushforwards along functions Z_3 -> Z_3 map I^(rs+1) into I^(s+1)", || {
        let fs = GroupFunction::all(cyclic(3)?, fp(3)?)?;
        let mut failing = Vec::new();
        let mut checked = 0;
        for f in &fs {
            let map = f.as_group_map()?;
            let r = gentle_degree(f).ok_or_else(|| Error::structural("function on Z_3 is not gentle"))?;
            for ring in [2, 3] {
                for s in 1..=2 {
                    checked += 1;
                    if !check_pushforward_containment(&map, r, s, fp(ring)?)? {
                        failing.push(json!({ "f": f.values(), "ring": ring, "r": r, "s": s }));
                    }
                }
            }
        }
        Ok((failing.is_empty(), json!({ "checked": checked, "failing": failing })))
    });

    let mut rng = run.rng("products");
    run.check("products of r-gentle functions are r-gentle (20 seeded pairs)", || {
        let mut failing = Vec::new();
        for _ in 0..20 {
            let p = *[2u32, 3].choose(&mut rng).unwrap();
            // p-groups, so every F_p-valued function is gentle
            let (n1, n2) = (p.pow(rng.gen_range(1..=2)), p.pow(rng.gen_range(1..=2)));
            let f1 = GroupFunction::random(&mut rng, cyclic(n1)?, fp(p)?);
            let f2 = GroupFunction::random(&mut rng, cyclic(n2)?, fp(p)?);
            let (Some(a), Some(b)) = (gentle_degree(&f1), gentle_degree(&f2)) else {
                return Err(Error::structural("function on a p-group is not gentle"));
            };
            let r = a.max(b);
            if check_product_gentle(&[f1.clone(), f2.clone()], r)? != Defect::Vanishes {
                failing.push(json!({ "p": p, "f1": f1.values(), "f2": f2.values(), "r": r }));
            }
        }
        Ok((failing.is_empty(), json!({ "pairs": 20, "failing": failing })))
    });

    for p in [2, 3] {
        run.check(format!("coprime relation in Z_2+Z_3 over F_{p}"), || {
            let g = Arc::new(FinGroup::abelian(&[2, 3])?);
            let (u1, u2) = (g.from_tuple(&[1, 0]).unwrap(), g.from_tuple(&[0, 1]).unwrap());
            let ok = check_coprime_relation(g, u1, u2, p)?;
            Ok((ok, json!({ "u1": [1, 0], "u2": [0, 1] })))
        });
        run.check(format!("coprime relation in Z_6 over F_{p}"), || {
            let g = cyclic(6)?;
            let ok = check_coprime_relation(g, 3, 2, p)?;
            Ok((ok, json!({ "u1": 3, "u2": 2 })))
        });
    }

    run.check("q^3 passes the 4-fold difference test on [-20, 20]", || {
        let r = check_integer_polynomial(&cube(), 3, -20..=20)?;
        Ok((r.passed(), serde_json::to_value(&r).unwrap()))
    });
    run.check("q^3 fails the 3-fold difference test on [-20, 20]", || {
        let r = check_integer_polynomial(&cube(), 2, -20..=20)?;
        Ok((!r.passed(), serde_json::to_value(&r).unwrap()))
    });

    for p in [2, 3, 5] {
        run.check(format!("A_5 has I^2 = I over F_{p}"), || {
            let r = check_perfect_stability(Arc::new(FinGroup::a5()), p)?;
            let ok = r.square_equals_ideal && r.differences_in_square == Some(true);
            Ok((ok, serde_json::to_value(&r).unwrap()))
        });
    }
}

fn cube() -> Vec<num_rational::Ratio<i64>> {
    [0, 0, 0, 1].into_iter().map(num_rational::Ratio::from_integer).collect()
}

fn projection_suite(run: &mut Runner) {
    for k in [2usize, 3] {
        for r in [1, 2] {
            for p in [2, 3] {
                for mask in 0..1u32 << k {
                    let orders: Vec<u32> = (0..k).map(|i| if mask >> i & 1 == 1 { 3 } else { 2 }).collect();
                    let group = orders.iter().map(|n| format!("Z_{n}")).collect::<Vec<_>>().join("+");
                    let tag = format!("{group} r={r} p={p}");
                    let mut rng = run.rng(&tag);
                    run.check(format!("retraction identity and kernel intersection for {tag}"), || {
                        let rep = check_projection_filtration(&orders, p, r, 100, &mut rng)?;
                        Ok((rep.passed(), serde_json::to_value(&rep).unwrap()))
                    });
                }
            }
        }
    }
    let caps = run.config.caps;
    for target in DEFAULT_TARGETS {
        for source in ["sphere:1", "wedge:(sphere:1,sphere:1)"] {
            run.check(format!("ker mu_r lies in I^(r+1) for {source} -> {target}"), || {
                let ctx = module_context(source, target, &caps)?;
                let mut reports = Vec::new();
                for r in 0..=2 {
                    reports.push(check_kernel_in_power(&ctx, r)?);
                }
                let ok = reports.iter().all(|x| x.holds);
                Ok((ok, serde_json::to_value(&reports).unwrap()))
            });
        }
    }
}

fn module_context(source: &str, target: &str, caps: &Caps) -> Result<Context<SimplicialModule>> {
    let k = resolve_crew(source, caps)?;
    let Object::Module(t) = resolve(target, caps)? else {
        return Err(Error::validation(format!("`{target}` is not a module")));
    };
    Context::module(&k, &t, *caps)
}

fn wedge_suite(run: &mut Runner) {
    let caps = run.config.caps;
    let r_max = run.config.r_max;
    for r in [1, 2] {
        run.check(format!("alternating sum over a wedge of {} circles vanishes", r + 1), || {
            let circles = vec![Crew::sphere(1)?; r + 1];
            let rep = check_wedge_alternating_sum(circles, r, 2, &caps)?;
            Ok((rep.holds(), serde_json::to_value(&rep).unwrap()))
        });
    }
    for p in [2, 3] {
        run.check(format!("gentle degree is at most simplicial degree on [S^1, K(Z/{p},1)]"), || {
            let rep = check_gentle_below_simplicial(p, 1, r_max, caps)?;
            let ok = rep.failures.is_empty() && rep.tables == (p as usize).pow(p) && rep.max_simplicial.is_some();
            Ok((ok, serde_json::to_value(&rep).unwrap()))
        });
    }
    let mut rng = run.rng("pullbacks");
    for trial in 0..10 {
        run.check(format!("pulled-back invariant has no larger degree (trial {trial})"), || {
            pullback_trial(&mut rng, &caps, r_max)
        });
    }
}

fn pullback_trial(rng: &mut ChaCha8Rng, caps: &Caps, r_max: usize) -> Result<(bool, Value)> {
    let p = *[2u32, 3].choose(rng).unwrap();
    let small = *["sphere:1", "sphere:1:2"].choose(rng).unwrap();
    let big = *["sphere:1", "sphere:1:2", "wedge:(sphere:1,sphere:1)"].choose(rng).unwrap();
    let (k_src, k_dst) = (resolve_crew(small, caps)?, resolve_crew(big, caps)?);
    let target = SimplicialModule::eilenberg_maclane(p, 1)?;
    let base = Context::module(&k_src, &target, *caps)?;
    let pulled = Context::module(&k_dst, &target, *caps)?;
    let maps = crew_maps(&k_src, &k_dst, caps)?;
    let k = maps.choose(rng).ok_or_else(|| Error::structural("no maps between crews"))?;
    let f = fp(p)?;
    let scalar = rng.gen_range(0..p);
    let table = InvariantTable {
        p,
        values: (0..base.pi0().class_count()).map(|_| rng.gen_range(0..p)).collect(),
    };
    let h = |x: &ModElem| ModElem {
        q: x.q,
        v: x.v.iter().map(|&a| f.mul(a, scalar)).collect(),
    };
    let rep = check_pullback_degree(&base, &pulled, k, h, &table, r_max)?;
    let detail = json!({
        "p": p,
        "source": small,
        "pulled_source": big,
        "k": map_label(&k_src, &k_dst, k),
        "h": format!("multiplication by {scalar}"),
        "table": table.values,
        "report": rep,
    });
    Ok((rep.holds, detail))
}

fn keys_suite(run: &mut Runner) {
    let trials = run.config.trials;
    let mut rng = run.rng("trials");
    run.check(format!("{trials} seeded split-row keys satisfy the key identity"), || {
        let rep = run_key_trials(&mut rng, fp(2)?, trials, 2, 4)?;
        Ok((rep.passed(), serde_json::to_value(&rep).unwrap()))
    });
    let mut rng = run.rng("function-square");
    let cells = run.config.caps.cells;
    run.check("key for the end inclusion of the circle cylinder", || {
        let f2 = fp(2)?;
        let circle = Crew::sphere(1)?;
        let cyl = reduced_cylinder(&circle, cells)?;
        let q = ChainComplex::cone_of_point(f2, 1);
        let r = ChainComplex::concentrated(f2, 2, 1);
        let maps = vec![Matrix::zeros(f2, 0, 0), Matrix::zeros(f2, 0, 1), Matrix::identity(f2, 1)];
        let c = crate::complex::ComplexMap::new(q, r, maps)?;
        let out = key_for_function_square(&cyl.ends[0], &circle, &cyl.crew, &c, Some(&mut rng))?;
        out.key.check(&out.square)?;
        Ok((true, json!({ "quotient_ranks": out.quotient_ranks, "digest": out.key.digest() })))
    });
}

fn stabilization_suite(run: &mut Runner) {
    let caps = run.config.caps;
    let r_max = run.config.r_max;
    let mut sources = Vec::new();
    for s in DEFAULT_SOURCES {
        run.check(format!("boundary squares to zero on {s}"), || {
            let k = resolve_crew(s, &caps)?;
            sources.push((s, k.clone()));
            let c = normalized_chains(&k, fp(2)?);
            Ok((c.is_complex(), json!({ "ranks": c.ranks() })))
        });
    }
    for t in DEFAULT_TARGETS {
        run.check(format!("normalized chains of the Dold-Kan module {t} round-trip"), || {
            let Object::Module(m) = resolve(t, &caps)? else {
                return Err(Error::validation("not a module"));
            };
            m.round_trip(4)?;
            Ok((true, json!({ "up_to": 4 })))
        });
    }

    run.check("sphere:1 -> em:2,1 stabilizes at r = 1", || {
        let ctx = module_context("sphere:1", "em:2,1", &caps)?;
        let (k0, k1, nu) = (ctx.mu_kernel(0)?, ctx.mu_kernel(1)?, ctx.nu_kernel());
        let n = ctx.vertices().len();
        let augmentation_ideal = k0.rank() + 1 == n && k0.basis().iter().all(|v| v.iter().fold(0, |a, &x| (a + x) % 2) == 0);
        let ok = ctx.stabilization_r(r_max)? == Some(1) && augmentation_ideal && !k0.leq(&nu)?.holds() && k1.is_zero();
        Ok((ok, json!({ "ker_mu_0": k0.rank(), "ker_mu_1": k1.rank(), "ker_nu": nu.rank() })))
    });

    for (s, _) in &sources {
        for t in DEFAULT_TARGETS {
            let pair = format!("{s} -> {t}");
            let ctx = module_context(s, t, &caps);
            let ctx = match ctx {
                Ok(c) => Arc::new(c),
                Err(e) => {
                    run.check(format!("function complex of {pair}"), || Err(e));
                    continue;
                }
            };
            run.check(format!("enumeration and chain-level pi_0 agree for {pair}"), || {
                let pi0 = ctx.pi0();
                Ok((
                    true,
                    json!({ "maps": pi0.vertex_count, "classes": pi0.class_count(), "module": pi0.module }),
                ))
            });
            let mut radius = None;
            run.check(format!("stabilization radius of {pair}"), || {
                radius = ctx.stabilization_r(r_max)?;
                Ok((radius.is_some(), json!({ "r": radius, "r_max": r_max })))
            });
            if let Some(r) = radius {
                run.check(format!("every table on {pair} has degree at most {r}"), || every_table_within(&ctx, r));
            }
            run.check(format!("ker mu_(r+1) lies in ker mu_r for {pair}, r < 3"), || {
                let mut holds = Vec::new();
                for r in 0..3 {
                    holds.push(ctx.kernels_decrease(r)?);
                }
                Ok((holds.iter().all(|&h| h), json!({ "holds": holds })))
            });
        }
    }
}

/// Degree is linear in the table, so the indicator tables decide the
/// question; all tables are also run when there are at most 3^9.
fn every_table_within(ctx: &Context<SimplicialModule>, r: usize) -> Result<(bool, Value)> {
    let p = ctx.field().p();
    let n = ctx.pi0().class_count();
    let mut tables: Vec<Vec<u32>> = (0..n)
        .map(|c| (0..n).map(|i| u32::from(i == c)).collect())
        .collect();
    let exhaustive = (p as u64).checked_pow(n as u32).is_some_and(|t| t <= 19_683);
    if exhaustive {
        tables = (0..(p as usize).pow(n as u32))
            .map(|mut code| {
                (0..n)
                    .map(|_| {
                        let v = (code % p as usize) as u32;
                        code /= p as usize;
                        v
                    })
                    .collect()
            })
            .collect();
    }
    let mut failing = Vec::new();
    let mut max_degree = 0;
    for values in &tables {
        let table = InvariantTable { p, values: values.clone() };
        match ctx.simp_degree(&table, r)?.degree {
            Some(d) => max_degree = max_degree.max(d),
            None => failing.push(values.clone()),
        }
    }
    Ok((
        failing.is_empty(),
        json!({ "tables": tables.len(), "exhaustive": exhaustive, "max_degree": max_degree, "failing": failing }),
    ))
}
