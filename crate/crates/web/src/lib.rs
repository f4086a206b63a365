//! wasm-bindgen bindings behind `www/index.html`. Every entry point takes
//! plain strings and returns a JSON string, or throws the error message.

use findeg::catalog::{class_labels, resolve, resolve_crew, Describe, Object};
use findeg::invariants::{Context, InvariantTable};
use findeg::simplicial::Caps;
use findeg::suites::{run_suite, SuiteConfig};
use findeg::Fp;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn fail(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn with_pair(source: &str, target: &str, prime: u32, f: impl Fn(Summary) -> Result<Value, String>) -> Result<String, JsValue> {
    let caps = Caps::default();
    let src = resolve_crew(source, &caps).map_err(fail)?;
    let value = match resolve(target, &caps).map_err(fail)? {
        Object::Module(m) => f(summarize(&Context::module(&src, &m, caps).map_err(fail)?)),
        Object::Crew(t) => {
            let field = Fp::new(prime).map_err(fail)?;
            f(summarize(&Context::crew(&src, &t, field, caps).map_err(fail)?))
        }
    };
    value.map(|v| v.to_string()).map_err(fail)
}

/// What the page needs from a function complex, detached from its target type.
struct Summary<'a> {
    labels: Vec<String>,
    sizes: Vec<usize>,
    maps: usize,
    p: u32,
    degree: Box<dyn Fn(&InvariantTable, usize) -> findeg::Result<Option<usize>> + 'a>,
    radius: Box<dyn Fn(usize) -> findeg::Result<Option<usize>> + 'a>,
}

fn summarize<T: Describe>(ctx: &Context<T>) -> Summary<'_> {
    let pi0 = ctx.pi0();
    Summary {
        labels: class_labels(ctx.source(), ctx.target(), ctx.vertices(), pi0),
        sizes: pi0.classes.iter().map(Vec::len).collect(),
        maps: pi0.vertex_count,
        p: ctx.field().p(),
        degree: Box::new(move |t, r| Ok(ctx.simp_degree(t, r)?.degree)),
        radius: Box::new(move |r| ctx.stabilization_r(r)),
    }
}

/// Path components of the function complex `map(source, target)`.
#[wasm_bindgen]
pub fn components(source: &str, target: &str, prime: u32) -> Result<String, JsValue> {
    with_pair(source, target, prime, |s| {
        Ok(json!({ "maps": s.maps, "classes": s.labels, "sizes": s.sizes, "p": s.p }))
    })
}

/// Degree of the invariant given by comma-separated values, one per class
/// in the order `components` lists them.
#[wasm_bindgen]
pub fn degree(source: &str, target: &str, prime: u32, values: &str, r_max: usize) -> Result<String, JsValue> {
    with_pair(source, target, prime, |s| {
        let values = values
            .split(',')
            .map(|v| v.trim().parse::<i64>().map_err(|e| format!("`{}`: {e}", v.trim())))
            .collect::<Result<Vec<_>, _>>()?;
        if values.len() != s.labels.len() {
            return Err(format!("expected {} values, got {}", s.labels.len(), values.len()));
        }
        let p = s.p as i64;
        let table = InvariantTable {
            p: s.p,
            values: values.iter().map(|v| v.rem_euclid(p) as u32).collect(),
        };
        let d = (s.degree)(&table, r_max).map_err(|e| e.to_string())?;
        let radius = (s.radius)(r_max).map_err(|e| e.to_string())?;
        Ok(json!({ "degree": d, "radius": radius, "r_max": r_max }))
    })
}

/// Runs one named check suite and returns its report.
#[wasm_bindgen]
pub fn suite(name: &str, seed: u64, trials: usize) -> Result<String, JsValue> {
    let config = SuiteConfig {
        seed,
        trials,
        ..SuiteConfig::default()
    };
    let report = run_suite(name, &config).map_err(fail)?;
    Ok(report.to_json())
}
