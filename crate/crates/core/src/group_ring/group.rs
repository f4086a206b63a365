use std::collections::HashMap;

use crate::error::{Error, Result};

/// Largest group order accepted by the constructors.
pub const MAX_GROUP_ORDER: usize = 256;

/// A finite group given by its full multiplication table. Element 0 is not
/// assumed to be the identity; see [`FinGroup::identity`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinGroup {
    labels: Vec<String>,
    table: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
    /// Cyclic orders when the group is `Z_{n_1} ⊕ … ⊕ Z_{n_k}` with
    /// elements in mixed-radix order (first coordinate most significant).
    orders: Option<Vec<u32>>,
}

impl FinGroup {
    /// Builds a group from a table `table[a][b] = a·b` and checks the group
    /// axioms exhaustively.
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::validation("a group needs at least one element"));
        }
        if n > MAX_GROUP_ORDER {
            return Err(Error::cap(format!("group order {n} exceeds {MAX_GROUP_ORDER}")));
        }
        let mut seen = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if seen.insert(l.clone(), i).is_some() {
                return Err(Error::validation(format!("duplicate element label {l:?}")));
            }
        }
        if table.len() != n || table.iter().any(|row| row.len() != n) {
            return Err(Error::validation(format!("multiplication table must be {n}x{n}")));
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(Error::validation("table entry out of range"));
        }
        let flat: Vec<usize> = table.into_iter().flatten().collect();
        Self::checked(labels, flat, None)
    }

    fn checked(labels: Vec<String>, table: Vec<usize>, orders: Option<Vec<u32>>) -> Result<Self> {
        let n = labels.len();
        let m = |a: usize, b: usize| table[a * n + b];
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| m(e, a) == a && m(a, e) == a))
            .ok_or_else(|| Error::validation("table has no identity element"))?;
        let mut inverses = vec![usize::MAX; n];
        for a in 0..n {
            let inv = (0..n)
                .find(|&b| m(a, b) == identity && m(b, a) == identity)
                .ok_or_else(|| Error::validation(format!("{} has no inverse", labels[a])))?;
            inverses[a] = inv;
        }
        for a in 0..n {
            for b in 0..n {
                let ab = m(a, b);
                for c in 0..n {
                    if m(ab, c) != m(a, m(b, c)) {
                        return Err(Error::validation(format!(
                            "associativity fails on ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        )));
                    }
                }
            }
        }
        Ok(FinGroup {
            labels,
            table,
            identity,
            inverses,
            orders,
        })
    }

    /// `Z_{n_1} ⊕ … ⊕ Z_{n_k}`; the empty list gives the trivial group.
    pub fn abelian(orders: &[u32]) -> Result<Self> {
        if orders.iter().any(|&n| n == 0) {
            return Err(Error::argument("cyclic orders must be positive"));
        }
        let size = orders
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n as usize))
            .filter(|&s| s <= MAX_GROUP_ORDER)
            .ok_or_else(|| Error::cap(format!("group {orders:?} exceeds order {MAX_GROUP_ORDER}")))?;
        let tuples: Vec<Vec<u32>> = (0..size).map(|i| decode(orders, i)).collect();
        let labels = tuples.iter().map(|t| tuple_label(t)).collect();
        let mut table = Vec::with_capacity(size * size);
        for a in &tuples {
            for b in &tuples {
                let sum: Vec<u32> = a.iter().zip(b).zip(orders).map(|((x, y), n)| (x + y) % n).collect();
                table.push(encode(orders, &sum));
            }
        }
        Self::checked(labels, table, Some(orders.to_vec()))
    }

    pub fn cyclic(n: u32) -> Result<Self> {
        Self::abelian(&[n])
    }

    pub fn trivial() -> Self {
        Self::abelian(&[]).expect("trivial group")
    }

    /// The alternating group on five letters, elements in one-line notation
    /// sorted lexicographically.
    pub fn a5() -> Self {
        let mut perms: Vec<[u8; 5]> = Vec::new();
        permutations(&mut [0, 1, 2, 3, 4], 0, &mut perms);
        perms.retain(|p| is_even(p));
        perms.sort();
        let index: HashMap<[u8; 5], usize> = perms.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        let labels = perms.iter().map(|p| p.iter().map(|d| char::from(b'0' + d)).collect()).collect();
        let mut table = Vec::with_capacity(60 * 60);
        for a in &perms {
            for b in &perms {
                let mut c = [0u8; 5];
                for i in 0..5 {
                    c[i] = a[b[i] as usize];
                }
                table.push(index[&c]);
            }
        }
        Self::checked(labels, table, None).expect("A_5 table is a group")
    }

    /// `G × H` with elements ordered lexicographically.
    pub fn direct_product(g: &FinGroup, h: &FinGroup) -> Result<Self> {
        let (n, m) = (g.order(), h.order());
        if n * m > MAX_GROUP_ORDER {
            return Err(Error::cap(format!("product order {} exceeds {MAX_GROUP_ORDER}", n * m)));
        }
        let orders: Option<Vec<u32>> = match (&g.orders, &h.orders) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).copied().collect()),
            _ => None,
        };
        let labels = (0..n * m)
            .map(|i| format!("({},{})", g.label(i / m), h.label(i % m)))
            .collect::<Vec<_>>();
        let labels = match &orders {
            Some(o) => (0..n * m).map(|i| tuple_label(&decode(o, i))).collect(),
            None => labels,
        };
        let mut table = Vec::with_capacity(n * m * n * m);
        for a in 0..n * m {
            for b in 0..n * m {
                table.push(g.mul(a / m, b / m) * m + h.mul(a % m, b % m));
            }
        }
        Self::checked(labels, table, orders)
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn cyclic_orders(&self) -> Option<&[u32]> {
        self.orders.as_deref()
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Residue tuple of an element of an abelian presentation.
    pub fn tuple(&self, a: usize) -> Option<Vec<u32>> {
        self.orders.as_ref().map(|o| decode(o, a))
    }

    pub fn from_tuple(&self, t: &[u32]) -> Option<usize> {
        let o = self.orders.as_ref()?;
        (t.len() == o.len() && t.iter().zip(o).all(|(x, n)| x < n)).then(|| encode(o, t))
    }

    /// Whether every element is a product of commutators, i.e. `G = [G, G]`.
    pub fn is_perfect(&self) -> bool {
        let n = self.order();
        let mut inside = vec![false; n];
        inside[self.identity] = true;
        let comms: Vec<usize> = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b))))
            .collect();
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &c in &comms {
                let y = self.mul(x, c);
                if !inside[y] {
                    inside[y] = true;
                    frontier.push(y);
                }
            }
        }
        inside.into_iter().all(|b| b)
    }
}

fn decode(orders: &[u32], mut i: usize) -> Vec<u32> {
    let mut t = vec![0; orders.len()];
    for k in (0..orders.len()).rev() {
        t[k] = (i % orders[k] as usize) as u32;
        i /= orders[k] as usize;
    }
    t
}

fn encode(orders: &[u32], t: &[u32]) -> usize {
    t.iter().zip(orders).fold(0, |acc, (&x, &n)| acc * n as usize + x as usize)
}

fn tuple_label(t: &[u32]) -> String {
    match t {
        [x] => x.to_string(),
        _ => format!("({})", t.iter().map(u32::to_string).collect::<Vec<_>>().join(",")),
    }
}

fn permutations(a: &mut [u8; 5], k: usize, out: &mut Vec<[u8; 5]>) {
    if k == a.len() {
        out.push(*a);
        return;
    }
    for i in k..a.len() {
        a.swap(k, i);
        permutations(a, k + 1, out);
        a.swap(k, i);
    }
}

fn is_even(p: &[u8; 5]) -> bool {
    let mut inversions = 0;
    for i in 0..5 {
        for j in i + 1..5 {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}
