//! Object references and JSON file formats.
//!
//! Reference grammar:
//!
//! ```text
//! ref   := point | interval | sphere:N | sphere:N:M | em:P,N
//!        | wedge:(ref,ref,...) | power:(ref,R) | cyl:ref | file:PATH
//! group := a5 | z:N,N,...
//! ```
//!
//! `sphere:N:M` is the `N`-sphere built from a chain of `M` top simplices.
//! `em:P,N` is the Eilenberg–MacLane module `K(Z/P, N)`. A file holds either
//! a crew (`{"basepoint", "simplices"}`) or a chain complex
//! (`{"p", "ranks", "d"}`), which is read as its Dold–Kan module.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::ChainComplex;
use crate::error::{Error, Result};
use crate::field::Fp;
use crate::group_ring::FinGroup;
use crate::invariants::InvariantTable;
use crate::linalg::Matrix;
use crate::simplicial::{
    power, reduced_cylinder, simplex_name, Caps, Crew, CrewFile, ModElem, Pi0, Simplex, Simplicial, SimplicialMap,
    SimplicialModule, Wedge,
};

/// A parsed reference.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ref {
    Point,
    Interval,
    Sphere { n: usize, chain: usize },
    Em { p: u32, n: usize },
    Wedge(Vec<Ref>),
    Power(Box<Ref>, usize),
    Cylinder(Box<Ref>),
    File(String),
}

/// Something a reference resolves to.
#[derive(Debug, Clone)]
pub enum Object {
    Crew(Crew),
    Module(SimplicialModule),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Crew(_) => "crew",
            Object::Module(_) => "module",
        }
    }
}

fn unresolved(s: &str, why: impl std::fmt::Display) -> Error {
    Error::validation(format!("cannot resolve reference `{s}`: {why}"))
}

pub fn parse_ref(s: &str) -> Result<Ref> {
    let mut p = Parser { src: s, pos: 0 };
    let r = p.reference()?;
    if p.pos != s.len() {
        return Err(unresolved(s, format!("trailing input at byte {}", p.pos)));
    }
    Ok(r)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn fail(&self, why: &str) -> Error {
        unresolved(self.src, why)
    }

    fn eat(&mut self, tok: &str) -> bool {
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.fail(&format!("expected `{tok}` at byte {}", self.pos)))
        }
    }

    fn number(&mut self) -> Result<usize> {
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.fail(&format!("expected a number at byte {}", self.pos)));
        }
        let n = self.rest()[..digits].parse().map_err(|_| self.fail("number too large"))?;
        self.pos += digits;
        Ok(n)
    }

    fn reference(&mut self) -> Result<Ref> {
        if self.eat("file:") {
            // a path runs to the end of the reference or the enclosing list
            let len = self.rest().find([',', ')']).unwrap_or(self.rest().len());
            let path = self.rest()[..len].to_string();
            self.pos += len;
            return Ok(Ref::File(path));
        }
        if self.eat("sphere:") {
            let n = self.number()?;
            let chain = if self.eat(":") { self.number()? } else { 1 };
            return Ok(Ref::Sphere { n, chain });
        }
        if self.eat("em:") {
            let p = self.number()?;
            self.expect(",")?;
            let n = self.number()?;
            let p = u32::try_from(p).map_err(|_| self.fail("prime too large"))?;
            return Ok(Ref::Em { p, n });
        }
        if self.eat("wedge:(") {
            let mut parts = vec![self.reference()?];
            while self.eat(",") {
                parts.push(self.reference()?);
            }
            self.expect(")")?;
            return Ok(Ref::Wedge(parts));
        }
        if self.eat("power:(") {
            let inner = self.reference()?;
            self.expect(",")?;
            let r = self.number()?;
            self.expect(")")?;
            return Ok(Ref::Power(Box::new(inner), r));
        }
        if self.eat("cyl:") {
            return Ok(Ref::Cylinder(Box::new(self.reference()?)));
        }
        if self.eat("point") {
            return Ok(Ref::Point);
        }
        if self.eat("interval") {
            return Ok(Ref::Interval);
        }
        Err(self.fail(&format!("unknown object at byte {}", self.pos)))
    }
}

/// Resolves a reference string.
pub fn resolve(s: &str, caps: &Caps) -> Result<Object> {
    let r = parse_ref(s)?;
    build(&r, s, caps)
}

/// Resolves a reference that must denote a crew.
pub fn resolve_crew(s: &str, caps: &Caps) -> Result<Crew> {
    match resolve(s, caps)? {
        Object::Crew(k) => Ok(k),
        Object::Module(_) => Err(unresolved(s, "expected a crew, found a module")),
    }
}

fn build(r: &Ref, src: &str, caps: &Caps) -> Result<Object> {
    let crew_of = |r: &Ref| match build(r, src, caps)? {
        Object::Crew(k) => Ok(k),
        Object::Module(_) => Err(unresolved(src, "modules cannot be wedged, multiplied or cylindered")),
    };
    Ok(match r {
        Ref::Point => Object::Crew(Crew::point()),
        Ref::Interval => Object::Crew(Crew::interval()),
        Ref::Sphere { n, chain } => Object::Crew(Crew::sphere_chain(*n, *chain).map_err(|e| unresolved(src, e))?),
        Ref::Em { p, n } => {
            Object::Module(SimplicialModule::eilenberg_maclane(*p, *n).map_err(|e| unresolved(src, e))?)
        }
        Ref::Wedge(parts) => {
            let summands = parts.iter().map(crew_of).collect::<Result<Vec<_>>>()?;
            Object::Crew(Wedge::new(summands)?.crew().clone())
        }
        Ref::Power(inner, r) => Object::Crew(power(&crew_of(inner)?, *r, caps.cells)?.into_crew()),
        Ref::Cylinder(inner) => Object::Crew(reduced_cylinder(&crew_of(inner)?, caps.cells)?.crew),
        Ref::File(path) => load_object(Path::new(path))?,
    })
}

/// Either file format, told apart by its keys.
pub fn load_object(path: &Path) -> Result<Object> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::validation(format!("cannot read {}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::validation(format!("{}: {e}", path.display())))?;
    let bad = |e: serde_json::Error| Error::validation(format!("{}: {e}", path.display()));
    if value.get("simplices").is_some() {
        let file: CrewFile = serde_json::from_value(value).map_err(bad)?;
        Ok(Object::Crew(Crew::from_file(&file)?))
    } else if value.get("ranks").is_some() {
        let file: ComplexFile = serde_json::from_value(value).map_err(bad)?;
        Ok(Object::Module(SimplicialModule::dold_kan(file.to_complex()?)))
    } else {
        Err(Error::validation(format!("{}: neither a crew nor a chain complex", path.display())))
    }
}

/// `a5` or `z:n_1,n_2,...`.
pub fn resolve_group(s: &str) -> Result<Arc<FinGroup>> {
    if s == "a5" {
        return Ok(Arc::new(FinGroup::a5()));
    }
    let orders = s
        .strip_prefix("z:")
        .ok_or_else(|| Error::validation(format!("unknown group `{s}`")))?
        .split(',')
        .map(|t| t.parse::<u32>().map_err(|_| Error::validation(format!("bad cyclic order `{t}` in `{s}`"))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Arc::new(FinGroup::abelian(&orders)?))
}

/// JSON form of a chain complex: `d[q]` is `C_q -> C_{q-1}` as a row-major
/// `rank(q-1) x rank(q)` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexFile {
    pub p: u32,
    pub ranks: BTreeMap<String, usize>,
    #[serde(default)]
    pub d: BTreeMap<String, Vec<Vec<u32>>>,
}

fn degree_key(q: &str) -> Result<usize> {
    q.parse().map_err(|_| Error::validation(format!("degree key {q:?} is not a number")))
}

impl ComplexFile {
    pub fn from_complex(c: &ChainComplex) -> Self {
        let mut ranks = BTreeMap::new();
        let mut d = BTreeMap::new();
        for q in 0..=c.top() {
            ranks.insert(q.to_string(), c.rank(q));
            if q > 0 {
                d.insert(q.to_string(), c.differential(q).to_rows());
            }
        }
        ComplexFile { p: c.field().p(), ranks, d }
    }

    pub fn to_complex(&self) -> Result<ChainComplex> {
        let field = Fp::new(self.p).map_err(|e| Error::validation(e.to_string()))?;
        let mut ranks = Vec::new();
        for (q, &n) in &self.ranks {
            let q = degree_key(q)?;
            if ranks.len() <= q {
                ranks.resize(q + 1, 0);
            }
            ranks[q] = n;
        }
        let ranks = if ranks.is_empty() { vec![0] } else { ranks };
        let mut d: Vec<Matrix> = (1..ranks.len()).map(|q| Matrix::zeros(field, ranks[q - 1], ranks[q])).collect();
        for (q, rows) in &self.d {
            let q = degree_key(q)?;
            if q == 0 || q >= ranks.len() {
                return Err(Error::validation(format!("differential in degree {q} has no source or target")));
            }
            if rows.len() != ranks[q - 1] || rows.iter().any(|r| r.len() != ranks[q]) {
                return Err(Error::validation(format!(
                    "d[{q}] must be {} x {}",
                    ranks[q - 1],
                    ranks[q]
                )));
            }
            let reduced: Vec<Vec<u32>> = rows.iter().map(|r| r.iter().map(|&x| x % self.p).collect()).collect();
            d[q - 1] = if rows.is_empty() {
                Matrix::zeros(field, 0, ranks[q])
            } else {
                Matrix::from_rows(field, ranks[q], &reduced)?
            };
        }
        ChainComplex::new(field, ranks, d).map_err(|e| Error::validation(e.to_string()))
    }
}

/// JSON form of an invariant: class representative label to value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantFile {
    pub values: BTreeMap<String, i64>,
}

impl InvariantFile {
    pub fn from_table(table: &InvariantTable, labels: &[String]) -> Self {
        InvariantFile {
            values: labels.iter().cloned().zip(table.values.iter().map(|&v| v as i64)).collect(),
        }
    }

    /// Orders values by class. Fails listing every class without a value
    /// and every key that names no class.
    pub fn to_table(&self, p: u32, labels: &[String]) -> Result<InvariantTable> {
        let unknown: Vec<&String> = self.values.keys().filter(|k| !labels.contains(k)).collect();
        if !unknown.is_empty() {
            return Err(Error::validation(format!("invariant names unknown classes: {unknown:?}")));
        }
        let missing: Vec<&String> = labels.iter().filter(|l| !self.values.contains_key(*l)).collect();
        if !missing.is_empty() {
            return Err(Error::validation(format!("invariant is missing classes: {missing:?}")));
        }
        let f = Fp::new(p)?;
        Ok(InvariantTable {
            p,
            values: labels.iter().map(|l| f.from_i64(self.values[l])).collect(),
        })
    }
}

/// Rendering of target simplices in map labels.
pub trait Describe: Simplicial {
    fn describe(&self, x: &Self::Elem) -> String;
}

impl Describe for Crew {
    fn describe(&self, x: &Simplex) -> String {
        simplex_name(self, x)
    }
}

impl Describe for SimplicialModule {
    fn describe(&self, x: &ModElem) -> String {
        x.v.iter().map(u32::to_string).collect::<Vec<_>>().join("")
    }
}

/// A readable name for a map: `cell=image` for every nondegenerate cell of
/// positive dimension whose image is not the basepoint, joined by `;`. The
/// constant map is `*`.
pub fn map_label<T>(source: &Crew, target: &T, m: &SimplicialMap<T::Elem>) -> String
where
    T: Describe,
{
    let mut parts = Vec::new();
    for q in 0..=source.dim() {
        for (i, cell) in source.cells(q).iter().enumerate() {
            let y = &m.images[q][i];
            if *y != target.base_simplex(q) {
                parts.push(format!("{}={}", cell.name, target.describe(y)));
            }
        }
    }
    if parts.is_empty() {
        "*".to_string()
    } else {
        parts.join(";")
    }
}

/// Labels of the class representatives.
pub fn class_labels<T>(source: &Crew, target: &T, vertices: &[SimplicialMap<T::Elem>], pi0: &Pi0) -> Vec<String>
where
    T: Describe,
{
    (0..pi0.class_count())
        .map(|c| map_label(source, target, &vertices[pi0.representative(c)]))
        .collect()
}

/// A class given either by its representative label or by `#index`.
pub fn find_class(labels: &[String], key: &str) -> Result<usize> {
    if let Some(i) = key.strip_prefix('#') {
        let i: usize = i.parse().map_err(|_| Error::validation(format!("bad class index `{key}`")))?;
        return if i < labels.len() {
            Ok(i)
        } else {
            Err(Error::validation(format!("class index {i} out of range ({} classes)", labels.len())))
        };
    }
    labels
        .iter()
        .position(|l| l == key)
        .ok_or_else(|| Error::validation(format!("no class is represented by `{key}`")))
}

/// The pairs `(K, T)` the suites run over.
pub const DEFAULT_SOURCES: [&str; 4] = ["sphere:1", "sphere:2", "wedge:(sphere:1,sphere:1)", "power:(sphere:1,2)"];
pub const DEFAULT_TARGETS: [&str; 3] = ["em:2,1", "em:3,1", "em:2,2"];
