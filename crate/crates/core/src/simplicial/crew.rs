use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::operators::{coface, compose, epi_mono, first_missed, identity, repeats, surjection_from_word, surjections_onto};
use super::target::Simplicial;

/// A simplex in Eilenberg–Zilber normal form: `σ^*(y)` for a surjection
/// `σ : [q] ->> [m]` and the nondegenerate `m`-simplex `y` with index `base`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Simplex {
    pub sigma: Vec<usize>,
    pub base: usize,
}

impl Simplex {
    pub fn nondegenerate(dim: usize, base: usize) -> Self {
        Simplex {
            sigma: identity(dim),
            base,
        }
    }

    pub fn dim(&self) -> usize {
        self.sigma.len() - 1
    }

    pub fn base_dim(&self) -> usize {
        *self.sigma.last().expect("nonempty")
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.dim() == self.base_dim()
    }

    /// The degeneracy word: positions `j` with `σ(j) = σ(j+1)`.
    pub fn word(&self) -> Vec<usize> {
        repeats(&self.sigma)
    }
}

/// A nondegenerate simplex with its faces `d_0, …, d_q`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub name: String,
    pub faces: Vec<Simplex>,
}

/// A pointed simplicial set presented by its nondegenerate simplices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Crew {
    cells: Vec<Vec<Cell>>,
    basepoint: usize,
}

/// A failed simplicial identity `d_i d_j = d_{j-1} d_i` on a named simplex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub simplex: String,
    pub i: usize,
    pub j: usize,
}

impl Crew {
    /// Builds a crew after checking that every face encoding is well formed:
    /// right dimension, valid degeneracy word, existing target.
    pub fn new(cells: Vec<Vec<Cell>>, basepoint: usize) -> Result<Self> {
        if cells.is_empty() || basepoint >= cells[0].len() {
            return Err(Error::validation("basepoint vertex does not exist"));
        }
        for (q, level) in cells.iter().enumerate() {
            for cell in level {
                let expected = if q == 0 { 0 } else { q + 1 };
                if cell.faces.len() != expected {
                    return Err(Error::validation(format!(
                        "simplex {} of dimension {q} has {} faces",
                        cell.name,
                        cell.faces.len()
                    )));
                }
                for (i, f) in cell.faces.iter().enumerate() {
                    let ok = f.sigma.len() == q
                        && f.sigma[0] == 0
                        && f.sigma.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1)
                        && cells.get(f.base_dim()).map_or(false, |l| f.base < l.len());
                    if !ok {
                        return Err(Error::validation(format!(
                            "simplex {}: face d_{i} has an invalid degeneracy word or target",
                            cell.name
                        )));
                    }
                }
            }
        }
        let mut names = HashMap::new();
        for cell in cells.iter().flatten() {
            if names.insert(cell.name.as_str(), ()).is_some() {
                return Err(Error::validation(format!("duplicate simplex name {}", cell.name)));
            }
        }
        let mut cells = cells;
        while cells.len() > 1 && cells.last().map_or(false, Vec::is_empty) {
            cells.pop();
        }
        Ok(Crew { cells, basepoint })
    }

    pub fn point() -> Self {
        Crew {
            cells: vec![vec![Cell {
                name: "*".into(),
                faces: vec![],
            }]],
            basepoint: 0,
        }
    }

    /// One vertex and one `n`-simplex with all faces at the vertex.
    pub fn sphere(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::argument("sphere dimension must be at least 1"));
        }
        let collapsed = Simplex {
            sigma: vec![0; n],
            base: 0,
        };
        let mut cells = vec![Vec::new(); n + 1];
        cells[0].push(Cell {
            name: "*".into(),
            faces: vec![],
        });
        cells[n].push(Cell {
            name: format!("s{n}"),
            faces: vec![collapsed; n + 1],
        });
        Crew::new(cells, 0)
    }

    /// A sphere built from a chain of `m` top simplices `s{n}.1 … s{n}.m`:
    /// `d_0` of the `i`-th and `d_1` of the next meet in an `(n-1)`-cell
    /// `t{i}`, every other face is at the basepoint. Its fundamental class
    /// is the sum of the top simplices. `m = 1` gives [`Crew::sphere`].
    pub fn sphere_chain(n: usize, m: usize) -> Result<Self> {
        match (n, m) {
            (0, _) => return Err(Error::argument("sphere dimension must be at least 1")),
            (_, 0) => return Err(Error::argument("need at least one top simplex")),
            (_, 1) => return Self::sphere(n),
            _ => {}
        }
        let collapsed = Simplex {
            sigma: vec![0; n],
            base: 0,
        };
        let mut cells = vec![Vec::new(); n + 1];
        cells[0].push(Cell {
            name: "*".into(),
            faces: vec![],
        });
        let below_collapsed = Simplex {
            sigma: vec![0; n.saturating_sub(1)],
            base: 0,
        };
        let first_joint = usize::from(n == 1);
        for i in 1..m {
            cells[n - 1].push(Cell {
                name: format!("t{i}"),
                faces: if n == 1 { vec![] } else { vec![below_collapsed.clone(); n] },
            });
        }
        let joint = |i: usize| Simplex::nondegenerate(n - 1, first_joint + i - 1);
        for i in 1..=m {
            let mut faces = vec![collapsed.clone(); n + 1];
            if i < m {
                faces[0] = joint(i);
            }
            if i > 1 {
                faces[1] = joint(i - 1);
            }
            cells[n].push(Cell {
                name: format!("s{n}.{i}"),
                faces,
            });
        }
        Crew::new(cells, 0)
    }

    /// The standard 1-simplex, pointed at vertex 0.
    pub fn interval() -> Self {
        let v = |b| Simplex::nondegenerate(0, b);
        Crew {
            cells: vec![
                vec![
                    Cell {
                        name: "0".into(),
                        faces: vec![],
                    },
                    Cell {
                        name: "1".into(),
                        faces: vec![],
                    },
                ],
                vec![Cell {
                    name: "01".into(),
                    faces: vec![v(1), v(0)],
                }],
            ],
            basepoint: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn cells(&self, q: usize) -> &[Cell] {
        self.cells.get(q).map_or(&[], Vec::as_slice)
    }

    pub fn cell(&self, q: usize, i: usize) -> &Cell {
        &self.cells[q][i]
    }

    /// Nondegenerate simplex counts per dimension.
    pub fn counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn total_cells(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    pub fn find(&self, name: &str) -> Option<(usize, usize)> {
        self.cells
            .iter()
            .enumerate()
            .find_map(|(q, l)| l.iter().position(|c| c.name == name).map(|i| (q, i)))
    }

    /// Whether the simplex is a degeneracy of the basepoint.
    pub fn is_base(&self, x: &Simplex) -> bool {
        x.base_dim() == 0 && x.base == self.basepoint
    }

    fn restrict_mono(&self, k: usize, base: usize, delta: &[usize]) -> Simplex {
        if delta.len() == k + 1 {
            return Simplex::nondegenerate(k, base);
        }
        let v = first_missed(delta, k).expect("proper mono misses a vertex");
        let rest: Vec<usize> = delta.iter().map(|&x| if x < v { x } else { x - 1 }).collect();
        let face = &self.cells[k][base].faces[v];
        self.restrict(face, &rest)
    }

    /// Checks `d_i d_j y = d_{j-1} d_i y` for every nondegenerate `y` and
    /// `i < j`, comparing normal forms.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for q in 2..=self.dim() {
            for (b, cell) in self.cells[q].iter().enumerate() {
                let y = Simplex::nondegenerate(q, b);
                for j in 1..=q {
                    for i in 0..j {
                        let lhs = self.restrict(&y, &compose(&coface(q, j), &coface(q - 1, i)));
                        let a = self.restrict(&self.face(&y, j), &coface(q - 1, i));
                        let b2 = self.restrict(&self.face(&y, i), &coface(q - 1, j - 1));
                        if a != b2 || lhs != a {
                            out.push(Violation {
                                simplex: cell.name.clone(),
                                i,
                                j,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    pub fn validated(self) -> Result<Self> {
        match self.validate().first() {
            None => Ok(self),
            Some(v) => Err(Error::validation(format!(
                "simplicial identity d_{}d_{} = d_{}d_{} fails on {}",
                v.i,
                v.j,
                v.j - 1,
                v.i,
                v.simplex
            ))),
        }
    }

    pub fn to_file(&self) -> CrewFile {
        let mut simplices = BTreeMap::new();
        for (q, level) in self.cells.iter().enumerate() {
            let cells = level
                .iter()
                .map(|c| CellFile {
                    name: c.name.clone(),
                    faces: c
                        .faces
                        .iter()
                        .map(|f| FaceFile {
                            word: f.word(),
                            target: self.cells[f.base_dim()][f.base].name.clone(),
                        })
                        .collect(),
                })
                .collect();
            simplices.insert(q.to_string(), cells);
        }
        CrewFile {
            basepoint: self.cells[0][self.basepoint].name.clone(),
            simplices,
        }
    }

    pub fn from_file(file: &CrewFile) -> Result<Self> {
        let mut levels: BTreeMap<usize, &Vec<CellFile>> = BTreeMap::new();
        for (q, cells) in &file.simplices {
            let q: usize = q
                .parse()
                .map_err(|_| Error::validation(format!("dimension key {q:?} is not a number")))?;
            levels.insert(q, cells);
        }
        let top = levels.keys().next_back().copied().unwrap_or(0);
        let mut index: HashMap<(usize, &str), usize> = HashMap::new();
        for (&q, cells) in &levels {
            for (i, c) in cells.iter().enumerate() {
                index.insert((q, c.name.as_str()), i);
            }
        }
        let mut cells = vec![Vec::new(); top + 1];
        for (&q, level) in &levels {
            for c in level.iter() {
                let mut faces = Vec::new();
                for (i, f) in c.faces.iter().enumerate() {
                    let bad = || Error::validation(format!("simplex {}: face d_{i} is malformed", c.name));
                    if q == 0 {
                        return Err(bad());
                    }
                    let sigma = surjection_from_word(q - 1, &f.word).ok_or_else(bad)?;
                    let m = *sigma.last().unwrap();
                    let base = *index.get(&(m, f.target.as_str())).ok_or_else(bad)?;
                    faces.push(Simplex { sigma, base });
                }
                cells[q].push(Cell {
                    name: c.name.clone(),
                    faces,
                });
            }
        }
        let basepoint = *index
            .get(&(0, file.basepoint.as_str()))
            .ok_or_else(|| Error::validation(format!("basepoint {} is not a vertex", file.basepoint)))?;
        Crew::new(cells, basepoint)?.validated()
    }
}

impl Simplicial for Crew {
    type Elem = Simplex;

    fn dim_of(&self, x: &Simplex) -> usize {
        x.dim()
    }

    fn restrict(&self, x: &Simplex, theta: &[usize]) -> Simplex {
        let st = compose(&x.sigma, theta);
        let (eps, delta) = epi_mono(&st);
        let y = self.restrict_mono(x.base_dim(), x.base, &delta);
        Simplex {
            sigma: compose(&y.sigma, &eps),
            base: y.base,
        }
    }

    fn base_simplex(&self, q: usize) -> Simplex {
        Simplex {
            sigma: vec![0; q + 1],
            base: self.basepoint,
        }
    }

    fn elements(&self, q: usize, cap: usize) -> Result<Vec<Simplex>> {
        let mut out = Vec::new();
        for m in 0..=q.min(self.dim()) {
            for sigma in surjections_onto(q, m) {
                for base in 0..self.cells[m].len() {
                    if out.len() == cap {
                        return Err(Error::cap(format!("more than {cap} simplices in dimension {q}")));
                    }
                    out.push(Simplex {
                        sigma: sigma.clone(),
                        base,
                    });
                }
            }
        }
        out.sort();
        Ok(out)
    }

    fn degenerate_at(&self, x: &Simplex, j: usize) -> bool {
        x.sigma[j] == x.sigma[j + 1]
    }

    fn is_degenerate(&self, x: &Simplex) -> bool {
        !x.is_nondegenerate()
    }
}

/// JSON form of a crew.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrewFile {
    pub basepoint: String,
    pub simplices: BTreeMap<String, Vec<CellFile>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellFile {
    pub name: String,
    #[serde(default)]
    pub faces: Vec<FaceFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceFile {
    #[serde(default)]
    pub word: Vec<usize>,
    pub target: String,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_crews_validate() {
        assert!(Crew::point().validate().is_empty());
        for n in 1..=4 {
            let s = Crew::sphere(n).unwrap();
            assert!(s.validate().is_empty());
            assert_eq!(s.counts().iter().sum::<usize>(), 2);
            assert_eq!(s.counts()[n], 1);
        }
        assert_eq!(Crew::sphere(2).unwrap().counts(), vec![1, 0, 1]);
        assert!(Crew::interval().validate().is_empty());
    }

    #[test]
    fn sphere_chains_are_spheres() {
        use crate::field::Fp;
        use crate::simplicial::chains::normalized_chains;
        let f = Fp::new(3).unwrap();
        for n in 1..=3 {
            for m in 1..=4 {
                let s = Crew::sphere_chain(n, m).unwrap();
                assert!(s.validate().is_empty(), "n = {n}, m = {m}");
                assert_eq!(s.counts()[n], m);
                let c = normalized_chains(&s, f);
                let betti: Vec<usize> = (0..=n).map(|q| c.betti(q)).collect();
                let mut expected = vec![0; n + 1];
                expected[0] = 1;
                expected[n] = 1;
                assert_eq!(betti, expected, "n = {n}, m = {m}");
            }
        }
        assert_eq!(Crew::sphere_chain(2, 1).unwrap(), Crew::sphere(2).unwrap());
        assert!(Crew::sphere_chain(1, 0).is_err());
    }

    #[test]
    fn restriction_of_degenerate_simplices() {
        let s = Crew::sphere(2).unwrap();
        let t = Simplex::nondegenerate(2, 0);
        // s_1 t then d_1 gives back t
        let st = s.degeneracy(&t, 1);
        assert_eq!(st.sigma, vec![0, 1, 1, 2]);
        assert_eq!(s.face(&st, 1), t);
        assert_eq!(s.face(&st, 2), t);
        // every face of t is the degenerate edge on the vertex
        assert_eq!(s.face(&t, 0), s.base_simplex(1));
    }

    #[test]
    fn json_round_trip() {
        let s = Crew::sphere(3).unwrap();
        let file = s.to_file();
        let text = serde_json::to_string(&file).unwrap();
        let back: CrewFile = serde_json::from_str(&text).unwrap();
        assert_eq!(Crew::from_file(&back).unwrap(), s);
    }

    #[test]
    fn malformed_face_is_named() {
        let text = r#"{"basepoint": "v", "simplices": {
            "0": [{"name": "v"}],
            "1": [{"name": "e", "faces": [{"word": [3], "target": "v"}, {"word": [], "target": "v"}]}]}}"#;
        let file: CrewFile = serde_json::from_str(text).unwrap();
        let err = Crew::from_file(&file).unwrap_err();
        assert!(err.to_string().contains("simplex e"), "{err}");
    }

    #[test]
    fn broken_identity_is_reported() {
        // a triangle whose faces are three distinct edges that do not close up
        let v = |b| Simplex::nondegenerate(0, b);
        let e = |b| Simplex::nondegenerate(1, b);
        let cells = vec![
            vec![
                Cell { name: "a".into(), faces: vec![] },
                Cell { name: "b".into(), faces: vec![] },
            ],
            vec![
                Cell { name: "ab".into(), faces: vec![v(1), v(0)] },
                Cell { name: "ba".into(), faces: vec![v(0), v(1)] },
            ],
            vec![Cell { name: "t".into(), faces: vec![e(0), e(0), e(0)] }],
        ];
        let k = Crew::new(cells, 0).unwrap();
        let bad = k.validate();
        assert!(!bad.is_empty());
        assert!(bad.iter().all(|v| v.simplex == "t"));
    }
}
