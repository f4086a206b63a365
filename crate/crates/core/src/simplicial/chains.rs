use crate::complex::{ChainComplex, ComplexMap};
use crate::field::Fp;
use crate::linalg::Matrix;

use super::crew::Crew;
use super::maps::CrewMap;

/// Unreduced normalized chains: basis in degree `q` is the nondegenerate
/// `q`-simplices, `∂ = Σ (-1)^i d_i` with degenerate faces dropped.
pub fn normalized_chains(k: &Crew, field: Fp) -> ChainComplex {
    normalized_chains_up_to(k, field, k.dim())
}

pub fn normalized_chains_up_to(k: &Crew, field: Fp, up_to: usize) -> ChainComplex {
    let top = up_to.min(k.dim());
    let ranks: Vec<usize> = (0..=top).map(|q| k.cells(q).len()).collect();
    let d = (1..=top)
        .map(|q| {
            let mut m = Matrix::zeros(field, ranks[q - 1], ranks[q]);
            for (c, cell) in k.cells(q).iter().enumerate() {
                for (i, f) in cell.faces.iter().enumerate() {
                    if f.is_nondegenerate() {
                        m.add_at(f.base, c, field.sign(i % 2 == 1));
                    }
                }
            }
            m
        })
        .collect();
    ChainComplex::new(field, ranks, d).expect("faces of a crew give a chain complex")
}

/// Reduced chains: the unreduced complex modulo the basepoint vertex.
/// Degree-0 basis is the non-basepoint vertices in their original order.
pub fn reduced_chains(k: &Crew, field: Fp) -> ChainComplex {
    let full = normalized_chains(k, field);
    let keep: Vec<usize> = (0..k.cells(0).len()).filter(|&v| v != k.basepoint()).collect();
    let mut ranks = full.ranks().to_vec();
    ranks[0] = keep.len();
    let d = (1..=full.top())
        .map(|q| {
            let dq = full.differential(q);
            if q == 1 {
                let rows: Vec<Vec<u32>> = keep.iter().map(|&v| dq.row(v).to_vec()).collect();
                Matrix::from_rows(field, dq.cols(), &rows).unwrap()
            } else {
                dq
            }
        })
        .collect();
    ChainComplex::new(field, ranks, d).expect("quotient of a complex")
}

/// Position of a non-basepoint vertex in the reduced degree-0 basis.
pub fn reduced_index(k: &Crew, q: usize, i: usize) -> Option<usize> {
    if q > 0 {
        return Some(i);
    }
    match i.cmp(&k.basepoint()) {
        std::cmp::Ordering::Less => Some(i),
        std::cmp::Ordering::Equal => None,
        std::cmp::Ordering::Greater => Some(i - 1),
    }
}

/// The map induced by `f : K -> L` on reduced chains.
pub fn reduced_chain_map(f: &CrewMap, source: &Crew, target: &Crew, field: Fp) -> ComplexMap {
    let full = f.chain_map(source, target, field);
    let (a, b) = (reduced_chains(source, field), reduced_chains(target, field));
    let maps = (0..=source.dim())
        .map(|q| {
            let m = full.component(q);
            if q > 0 {
                return m;
            }
            let mut out = Matrix::zeros(field, b.rank(0), a.rank(0));
            for c in 0..m.cols() {
                for r in 0..m.rows() {
                    if let (Some(rr), Some(cc)) = (reduced_index(target, 0, r), reduced_index(source, 0, c)) {
                        out.set(rr, cc, m.get(r, c));
                    }
                }
            }
            out
        })
        .collect();
    ComplexMap::new(a, b, maps).expect("simplicial maps induce chain maps on reduced chains")
}
