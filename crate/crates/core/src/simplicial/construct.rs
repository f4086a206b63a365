use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::parallel::par_map;

use super::crew::{Cell, Crew, Simplex};
use super::maps::CrewMap;
use super::operators::{compose, first_section, repeats, surjection_from_word};
use super::target::Simplicial;

/// Default bound on the number of nondegenerate simplices a construction
/// may produce.
pub const DEFAULT_CELL_CAP: usize = 500_000;

/// Readable name of a normal-form simplex, e.g. `s0.e` for `s_0 e`.
pub fn simplex_name(k: &Crew, x: &Simplex) -> String {
    let base = &k.cell(x.base_dim(), x.base).name;
    let word = x.word();
    if word.is_empty() {
        base.clone()
    } else {
        let w: Vec<String> = word.iter().rev().map(|j| j.to_string()).collect();
        format!("s{}.{base}", w.join("s"))
    }
}

/// A finite product of crews with the factor decomposition of every
/// nondegenerate simplex.
#[derive(Debug, Clone)]
pub struct Product {
    factors: Vec<Crew>,
    crew: Crew,
    /// `components[q][i][k]`: factor `k` of cell `i` in dimension `q`.
    components: Vec<Vec<Vec<Simplex>>>,
    index: Vec<HashMap<Vec<Simplex>, usize>>,
}

impl Product {
    /// `K_1 × … × K_r`; the empty product is the point. Nondegenerate
    /// simplices are the tuples whose degeneracy words have empty
    /// intersection (shuffles).
    pub fn new(factors: Vec<Crew>, cap: usize) -> Result<Self> {
        // tuples of normal forms, grouped by dimension
        let mut levels: Vec<Vec<Vec<Simplex>>> = vec![vec![vec![]]];
        for f in &factors {
            let mut next: Vec<Vec<Vec<Simplex>>> = Vec::new();
            let mut total = 0usize;
            for (m1, level) in levels.iter().enumerate() {
                for z in level {
                    for m2 in 0..=f.dim() {
                        for y in 0..f.cells(m2).len() {
                            for q in m1.max(m2)..=m1 + m2 {
                                for (s1, s2) in shuffle_pairs(q, q - m1, q - m2) {
                                    total += 1;
                                    if total > cap {
                                        return Err(Error::cap(format!("product has more than {cap} simplices")));
                                    }
                                    let mut t: Vec<Simplex> = z
                                        .iter()
                                        .map(|c| Simplex {
                                            sigma: compose(&c.sigma, &s1),
                                            base: c.base,
                                        })
                                        .collect();
                                    t.push(Simplex { sigma: s2, base: y });
                                    if next.len() <= q {
                                        next.resize(q + 1, Vec::new());
                                    }
                                    next[q].push(t);
                                }
                            }
                        }
                    }
                }
            }
            levels = next;
        }
        for level in &mut levels {
            level.sort();
        }
        let index: Vec<HashMap<Vec<Simplex>, usize>> = levels
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect())
            .collect();
        let mut prod = Product {
            factors,
            crew: Crew::point(),
            components: levels,
            index,
        };
        let mut cells = Vec::new();
        for q in 0..prod.components.len() {
            let level = &prod.components[q];
            let built: Vec<Cell> = par_map(level, |t| Cell {
                name: prod.tuple_name(t),
                faces: if q == 0 {
                    vec![]
                } else {
                    (0..=q)
                        .map(|i| {
                            let face: Vec<Simplex> =
                                t.iter().zip(&prod.factors).map(|(c, f)| f.face(c, i)).collect();
                            prod.normalize(&face)
                        })
                        .collect()
                },
            });
            cells.push(built);
        }
        let base: Vec<Simplex> = prod.factors.iter().map(|f| f.base_simplex(0)).collect();
        let basepoint = prod.index[0][&base];
        prod.crew = Crew::new(cells, basepoint)?;
        Ok(prod)
    }

    fn tuple_name(&self, t: &[Simplex]) -> String {
        if t.is_empty() {
            return "*".into();
        }
        let parts: Vec<String> = t.iter().zip(&self.factors).map(|(x, f)| simplex_name(f, x)).collect();
        format!("({})", parts.join(","))
    }

    pub fn crew(&self) -> &Crew {
        &self.crew
    }

    pub fn into_crew(self) -> Crew {
        self.crew
    }

    pub fn factors(&self) -> &[Crew] {
        &self.factors
    }

    /// Factor decomposition of cell `i` in dimension `q`.
    pub fn components(&self, q: usize, i: usize) -> &[Simplex] {
        &self.components[q][i]
    }

    /// The product simplex with the given components (all of one dimension),
    /// in normal form.
    pub fn normalize(&self, t: &[Simplex]) -> Simplex {
        let q = t.first().map_or(0, Simplex::dim);
        if t.is_empty() {
            return Simplex::nondegenerate(0, 0);
        }
        let mut common = repeats(&t[0].sigma);
        for x in &t[1..] {
            let r = repeats(&x.sigma);
            common.retain(|j| r.contains(j));
        }
        let sigma = surjection_from_word(q, &common).expect("repeat positions are a word");
        let section = first_section(&sigma);
        let nd: Vec<Simplex> = t.iter().zip(&self.factors).map(|(x, f)| f.restrict(x, &section)).collect();
        let m = sigma[q];
        Simplex {
            base: self.index[m][&nd],
            sigma,
        }
    }

    pub fn projection(&self, k: usize) -> CrewMap {
        CrewMap {
            images: self
                .components
                .iter()
                .map(|level| level.iter().map(|t| t[k].clone()).collect())
                .collect(),
        }
    }

    /// The map `K -> K_1 × … × K_r` with components `maps[k] : K -> K_k`.
    pub fn pairing(&self, source: &Crew, maps: &[CrewMap]) -> CrewMap {
        CrewMap {
            images: (0..=source.dim())
                .map(|q| {
                    (0..source.cells(q).len())
                        .map(|i| {
                            let x = Simplex::nondegenerate(q, i);
                            let t: Vec<Simplex> =
                                maps.iter().zip(&self.factors).map(|(m, f)| m.eval(f, &x)).collect();
                            self.normalize(&t)
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

/// Pairs `(σ_1, σ_2)` of surjections out of `[q]` with disjoint degeneracy
/// words of sizes `k1`, `k2`.
fn shuffle_pairs(q: usize, k1: usize, k2: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    for w1 in subsets(q, k1) {
        let rest: Vec<usize> = (0..q).filter(|j| !w1.contains(j)).collect();
        for pick in subsets(rest.len(), k2) {
            let w2: Vec<usize> = pick.iter().map(|&i| rest[i]).collect();
            out.push((
                surjection_from_word(q, &w1).unwrap(),
                surjection_from_word(q, &w2).unwrap(),
            ));
        }
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(n, k, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// `K^r`; `K^0` is the point.
pub fn power(k: &Crew, r: usize, cap: usize) -> Result<Product> {
    Product::new(vec![k.clone(); r], cap)
}

/// A wedge of crews with its summand inclusions.
#[derive(Debug, Clone)]
pub struct Wedge {
    crew: Crew,
    summands: Vec<Crew>,
    /// Summand owning each cell (`None` for the basepoint).
    owner: Vec<Vec<Option<usize>>>,
    inclusions: Vec<CrewMap>,
}

impl Wedge {
    pub fn new(summands: Vec<Crew>) -> Result<Self> {
        let top = summands.iter().map(Crew::dim).max().unwrap_or(0);
        let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); top + 1];
        let mut owner: Vec<Vec<Option<usize>>> = vec![Vec::new(); top + 1];
        cells[0].push(Cell {
            name: "*".into(),
            faces: vec![],
        });
        owner[0].push(None);
        // new index of every cell of every summand
        let mut renumber: Vec<Vec<Vec<usize>>> = Vec::new();
        for (k, s) in summands.iter().enumerate() {
            let mut map = Vec::new();
            for q in 0..=s.dim() {
                let mut level = Vec::new();
                for (i, c) in s.cells(q).iter().enumerate() {
                    if q == 0 && i == s.basepoint() {
                        level.push(0);
                        continue;
                    }
                    level.push(cells[q].len());
                    cells[q].push(Cell {
                        name: format!("{}_{}", c.name, k + 1),
                        faces: vec![],
                    });
                    owner[q].push(Some(k));
                }
                map.push(level);
            }
            renumber.push(map);
        }
        let mut inclusions = Vec::new();
        for (k, s) in summands.iter().enumerate() {
            let remap = |x: &Simplex| Simplex {
                sigma: x.sigma.clone(),
                base: renumber[k][x.base_dim()][x.base],
            };
            for q in 1..=s.dim() {
                for (i, c) in s.cells(q).iter().enumerate() {
                    let at = renumber[k][q][i];
                    cells[q][at].faces = c.faces.iter().map(remap).collect();
                }
            }
            inclusions.push(CrewMap {
                images: (0..=s.dim())
                    .map(|q| (0..s.cells(q).len()).map(|i| remap(&Simplex::nondegenerate(q, i))).collect())
                    .collect(),
            });
        }
        Ok(Wedge {
            crew: Crew::new(cells, 0)?,
            summands,
            owner,
            inclusions,
        })
    }

    pub fn crew(&self) -> &Crew {
        &self.crew
    }

    pub fn summands(&self) -> &[Crew] {
        &self.summands
    }

    pub fn inclusion(&self, k: usize) -> &CrewMap {
        &self.inclusions[k]
    }

    pub fn owner(&self, q: usize, i: usize) -> Option<usize> {
        self.owner[q][i]
    }

    /// Identity on summands with `e_k = 1`, constant on the others.
    pub fn me_operator(&self, e: &[bool]) -> Result<CrewMap> {
        if e.len() != self.summands.len() {
            return Err(Error::argument(format!(
                "selector has length {}, wedge has {} summands",
                e.len(),
                self.summands.len()
            )));
        }
        Ok(CrewMap {
            images: (0..=self.crew.dim())
                .map(|q| {
                    (0..self.crew.cells(q).len())
                        .map(|i| match self.owner[q][i] {
                            Some(k) if e[k] => Simplex::nondegenerate(q, i),
                            _ => self.crew.base_simplex(q),
                        })
                        .collect()
                })
                .collect(),
        })
    }

    /// The map out of the wedge given by one map per summand.
    pub fn copairing<E: Clone, T: Simplicial<Elem = E>>(
        &self,
        maps: &[super::maps::SimplicialMap<E>],
        target: &T,
    ) -> super::maps::SimplicialMap<E> {
        let mut images: Vec<Vec<E>> = (0..=self.crew.dim())
            .map(|q| vec![target.base_simplex(q); self.crew.cells(q).len()])
            .collect();
        for (k, s) in self.summands.iter().enumerate() {
            for q in 0..=s.dim() {
                for i in 0..s.cells(q).len() {
                    let at = &self.inclusions[k].images[q][i];
                    if at.is_nondegenerate() && self.owner[q][at.base].is_some() {
                        images[q][at.base] = maps[k].images[q][i].clone();
                    }
                }
            }
        }
        super::maps::SimplicialMap { images }
    }
}

/// `K / A` for a subcomplex `A` containing the basepoint, given by a
/// predicate on nondegenerate cells. Returns the quotient and the projection.
pub fn quotient(k: &Crew, in_sub: impl Fn(usize, usize) -> bool) -> Result<(Crew, CrewMap)> {
    if !in_sub(0, k.basepoint()) {
        return Err(Error::argument("subcomplex must contain the basepoint"));
    }
    let mut renumber: Vec<Vec<Option<usize>>> = Vec::new();
    let mut cells: Vec<Vec<Cell>> = Vec::new();
    for q in 0..=k.dim() {
        let mut level = Vec::new();
        let mut out = Vec::new();
        if q == 0 {
            out.push(Cell {
                name: "*".into(),
                faces: vec![],
            });
        }
        for (i, c) in k.cells(q).iter().enumerate() {
            if in_sub(q, i) {
                for f in &c.faces {
                    if !in_sub(f.base_dim(), f.base) {
                        return Err(Error::argument(format!("subcomplex is not closed under faces at {}", c.name)));
                    }
                }
                level.push(None);
            } else {
                level.push(Some(out.len()));
                out.push(Cell {
                    name: c.name.clone(),
                    faces: vec![],
                });
            }
        }
        renumber.push(level);
        cells.push(out);
    }
    let image = |x: &Simplex| match renumber[x.base_dim()][x.base] {
        Some(b) => Simplex {
            sigma: x.sigma.clone(),
            base: b,
        },
        None => Simplex {
            sigma: vec![0; x.sigma.len()],
            base: 0,
        },
    };
    for q in 1..=k.dim() {
        for (i, c) in k.cells(q).iter().enumerate() {
            if let Some(b) = renumber[q][i] {
                cells[q][b].faces = c.faces.iter().map(image).collect();
            }
        }
    }
    let proj = CrewMap {
        images: (0..=k.dim())
            .map(|q| (0..k.cells(q).len()).map(|i| image(&Simplex::nondegenerate(q, i))).collect())
            .collect(),
    };
    Ok((Crew::new(cells, 0)?, proj))
}

/// The reduced cylinder `K ∧ Δ[1]_+ = (K × Δ[1]) / (* × Δ[1])` with its
/// two end inclusions and the collapse back to `K`.
#[derive(Debug, Clone)]
pub struct Cylinder {
    pub crew: Crew,
    pub ends: [CrewMap; 2],
    pub collapse: CrewMap,
}

pub fn reduced_cylinder(k: &Crew, cap: usize) -> Result<Cylinder> {
    let prod = Product::new(vec![k.clone(), Crew::interval()], cap)?;
    let pc = prod.crew();
    let (crew, proj) = quotient(pc, |q, i| k.is_base(&prod.components(q, i)[0]))?;
    let end = |e: usize| -> CrewMap {
        let vertex = CrewMap {
            images: (0..=k.dim())
                .map(|q| vec![Simplex { sigma: vec![0; q + 1], base: e }; k.cells(q).len()])
                .collect(),
        };
        let into_prod = prod.pairing(k, &[CrewMap::identity(k), vertex]);
        into_prod.then(&proj, &crew)
    };
    let ends = [end(0), end(1)];
    // collapse: (a, t) ↦ a, which kills * × Δ[1]
    let first = prod.projection(0);
    let mut images: Vec<Vec<Simplex>> = (0..=crew.dim())
        .map(|q| vec![k.base_simplex(q); crew.cells(q).len()])
        .collect();
    for q in 0..=pc.dim() {
        for i in 0..pc.cells(q).len() {
            let x = &proj.images[q][i];
            if x.is_nondegenerate() && !(q == 0 && x.base == crew.basepoint()) {
                images[q][x.base] = first.images[q][i].clone();
            }
        }
    }
    let collapse = CrewMap { images };
    Ok(Cylinder { crew, ends, collapse })
}
