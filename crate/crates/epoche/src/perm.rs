//! Finite permutations, their enumeration, and block-monotone shuffles.

use std::fmt;

/// A permutation of `{0, ..., n-1}` stored as its image array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation { images: (0..n).collect() }
    }

    /// Builds a permutation from its image list; rejects non-bijections.
    pub fn from_images(images: Vec<usize>) -> Option<Permutation> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Permutation { images })
    }

    /// The transposition of positions `i` and `j` in `S_n`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Permutation {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(i, j);
        Permutation { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0usize; self.len()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    /// Function composition: `(self ∘ other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "degree mismatch");
        Permutation { images: (0..self.len()).map(|i| self.apply(other.apply(i))).collect() }
    }

    /// Reindexes a slice: `result[i] = items[self(i)]`.
    pub fn permute<T: Clone>(&self, items: &[T]) -> Vec<T> {
        assert_eq!(self.len(), items.len(), "degree mismatch");
        self.images.iter().map(|&i| items[i].clone()).collect()
    }

    /// All elements of `S_n` in lexicographic order of image arrays.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(n);
        let mut used = vec![false; n];
        fill(n, &mut current, &mut used, &mut out);
        out
    }
}

fn fill(n: usize, current: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Permutation>) {
    if current.len() == n {
        out.push(Permutation { images: current.clone() });
        return;
    }
    for i in 0..n {
        if !used[i] {
            used[i] = true;
            current.push(i);
            fill(n, current, used, out);
            current.pop();
            used[i] = false;
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based: Vec<String> = self.images.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "({})", one_based.join(","))
    }
}

/// Permutations of `S_n` that are increasing on each consecutive block of the
/// given sizes; `parts` must be positive and sum to `n`.
pub fn shuffles(parts: &[usize]) -> Vec<Permutation> {
    assert!(!parts.is_empty() && parts.iter().all(|&m| m >= 1), "parts must be positive");
    let n: usize = parts.iter().sum();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut remaining: Vec<usize> = (0..n).collect();
    pick_blocks(parts, 0, &mut chosen, &mut remaining, &mut out);
    out
}

fn pick_blocks(
    parts: &[usize],
    block: usize,
    chosen: &mut Vec<usize>,
    remaining: &mut Vec<usize>,
    out: &mut Vec<Permutation>,
) {
    if block == parts.len() {
        out.push(Permutation { images: chosen.clone() });
        return;
    }
    let size = parts[block];
    let pool = remaining.clone();
    let mut subset = Vec::with_capacity(size);
    pick_subset(&pool, 0, size, &mut subset, parts, block, chosen, remaining, out);
}

#[allow(clippy::too_many_arguments)]
fn pick_subset(
    pool: &[usize],
    start: usize,
    size: usize,
    subset: &mut Vec<usize>,
    parts: &[usize],
    block: usize,
    chosen: &mut Vec<usize>,
    remaining: &mut Vec<usize>,
    out: &mut Vec<Permutation>,
) {
    if subset.len() == size {
        chosen.extend_from_slice(subset);
        remaining.retain(|x| !subset.contains(x));
        pick_blocks(parts, block + 1, chosen, remaining, out);
        for x in subset.iter() {
            let pos = remaining.binary_search(x).unwrap_err();
            remaining.insert(pos, *x);
        }
        chosen.truncate(chosen.len() - size);
        return;
    }
    for i in start..pool.len() {
        subset.push(pool[i]);
        pick_subset(pool, i + 1, size, subset, parts, block, chosen, remaining, out);
        subset.pop();
    }
}
