//! Monotone maps `[m] -> [n]` stored as image arrays of length `m + 1`.

/// `δ^i : [n-1] -> [n]`, skipping `i`.
pub fn coface(n: usize, i: usize) -> Vec<usize> {
    (0..n).map(|k| if k < i { k } else { k + 1 }).collect()
}

/// `σ^j : [n+1] -> [n]`, hitting `j` twice.
pub fn codegeneracy(n: usize, j: usize) -> Vec<usize> {
    (0..=n + 1).map(|k| if k <= j { k } else { k - 1 }).collect()
}

pub fn identity(n: usize) -> Vec<usize> {
    (0..=n).collect()
}

/// `a ∘ b` (apply `b` first).
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

pub fn is_identity(a: &[usize]) -> bool {
    a.iter().enumerate().all(|(i, &x)| i == x)
}

pub fn is_monotone(a: &[usize]) -> bool {
    a.windows(2).all(|w| w[0] <= w[1])
}

/// Epi-mono factorization `θ = δ ∘ ε` with `ε` surjective onto `[j]` and
/// `δ : [j] -> [n]` injective.
pub fn epi_mono(theta: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut image: Vec<usize> = theta.to_vec();
    image.dedup();
    let mut eps = Vec::with_capacity(theta.len());
    let mut k = 0;
    for &x in theta {
        while image[k] != x {
            k += 1;
        }
        eps.push(k);
    }
    (eps, image)
}

/// First value in `0..=n` missed by an injective `δ : [j] -> [n]`.
pub fn first_missed(delta: &[usize], n: usize) -> Option<usize> {
    (0..=n).find(|v| delta.binary_search(v).is_err())
}

/// Positions `j` with `σ(j) = σ(j+1)`; the degeneracy word of a surjection.
pub fn repeats(sigma: &[usize]) -> Vec<usize> {
    sigma.windows(2).enumerate().filter(|(_, w)| w[0] == w[1]).map(|(j, _)| j).collect()
}

/// The surjection `[q] -> [q - |word|]` with the given repeat positions.
/// Returns `None` if the word is not strictly increasing within `0..q`.
pub fn surjection_from_word(q: usize, word: &[usize]) -> Option<Vec<usize>> {
    if word.windows(2).any(|w| w[0] >= w[1]) || word.iter().any(|&j| j >= q) {
        return None;
    }
    let mut sigma = Vec::with_capacity(q + 1);
    let mut v = 0;
    for i in 0..=q {
        if i > 0 && word.binary_search(&(i - 1)).is_err() {
            v += 1;
        }
        sigma.push(v);
    }
    Some(sigma)
}

/// All surjections `[q] ->> [k]` for `k = q, q-1, …, 0`, each group in
/// lexicographic order. The identity comes first.
pub fn surjections(q: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in (0..=q).rev() {
        out.extend(surjections_onto(q, k));
    }
    out
}

/// Surjections `[q] ->> [k]` in lexicographic order; there are `C(q, k)`.
pub fn surjections_onto(q: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > q {
        return out;
    }
    // choose which q-k of the q gaps are repeats
    let mut word = Vec::new();
    fn rec(q: usize, need: usize, start: usize, word: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if need == 0 {
            out.push(surjection_from_word(q, word).expect("valid word"));
            return;
        }
        for j in start..q {
            if q - j < need {
                break;
            }
            word.push(j);
            rec(q, need - 1, j + 1, word, out);
            word.pop();
        }
    }
    rec(q, q - k, 0, &mut word, &mut out);
    out.sort();
    out
}

/// The section of a surjection picking the first element of each fibre.
pub fn first_section(sigma: &[usize]) -> Vec<usize> {
    let k = sigma.last().copied().unwrap_or(0);
    let mut out = vec![0; k + 1];
    for (i, &v) in sigma.iter().enumerate().rev() {
        out[v] = i;
    }
    out
}
