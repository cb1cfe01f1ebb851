//! Planar binary trees, leaf labellings, the total order on them, and the
//! order-preserving ranking.
//!
//! A [`Shape`] is a planar binary tree without labels; a [`LabelledTree`]
//! carries one letter from the alphabet `[2d] = {1, ..., 2d}` per leaf.
//! Labelled trees index the generators of the bracketing algebra, and the
//! total order defined here ([`LabelledTree::cmp`]) fixes the normal form of
//! every monomial, so everything downstream leans on this module.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::perm::Permutation;

/// An unlabelled planar binary tree: a leaf, or an ordered pair of subtrees.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Shape {
    Leaf,
    Node(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn node(left: Shape, right: Shape) -> Shape {
        Shape::Node(Box::new(left), Box::new(right))
    }

    /// Number of leaves `|T|`.
    pub fn leaf_count(&self) -> usize {
        match self {
            Shape::Leaf => 1,
            Shape::Node(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }
}

impl Ord for Shape {
    /// Fewer leaves first; on equal leaf count compare left branches, then
    /// right branches, recursively.
    fn cmp(&self, other: &Self) -> Ordering {
        self.leaf_count()
            .cmp(&other.leaf_count())
            .then_with(|| match (self, other) {
                (Shape::Leaf, Shape::Leaf) => Ordering::Equal,
                (Shape::Node(a, b), Shape::Node(c, d)) => a.cmp(c).then_with(|| b.cmp(d)),
                // equal leaf counts rule out leaf-vs-node
                _ => unreachable!("equal leaf count implies equal arity"),
            })
    }
}

impl PartialOrd for Shape {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A leaf-labelled planar binary tree over the alphabet `[2d]`.
///
/// Labels are positive integers; the bound `2d` is supplied by the operations
/// that need it rather than stored in the tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LabelledTree {
    Leaf(u32),
    Node(Box<LabelledTree>, Box<LabelledTree>),
}

/// Errors from tree construction, ranking, and parsing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeError {
    LabelOutOfRange { label: u32, max: u32 },
    RankOutOfRange,
    ArityMismatch { expected: usize, got: usize },
    Parse { pos: usize, msg: String },
}

impl fmt::Display for TreeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeError::LabelOutOfRange { label, max } => {
                write!(f, "label {label} out of range 1..={max}")
            }
            TreeError::RankOutOfRange => write!(f, "rank must be >= 1"),
            TreeError::ArityMismatch { expected, got } => {
                write!(f, "arity mismatch: expected {expected}, got {got}")
            }
            TreeError::Parse { pos, msg } => write!(f, "parse error at byte {pos}: {msg}"),
        }
    }
}

impl std::error::Error for TreeError {}

impl LabelledTree {
    pub fn leaf(label: u32) -> LabelledTree {
        LabelledTree::Leaf(label)
    }

    pub fn node(left: LabelledTree, right: LabelledTree) -> LabelledTree {
        LabelledTree::Node(Box::new(left), Box::new(right))
    }

    /// Number of leaves `|Γ|`.
    pub fn leaf_count(&self) -> usize {
        match self {
            LabelledTree::Leaf(_) => 1,
            LabelledTree::Node(l, r) => l.leaf_count() + r.leaf_count(),
        }
    }

    /// Generator degree `|Γ| - 1` (the number of internal vertices).
    pub fn degree(&self) -> usize {
        self.leaf_count() - 1
    }

    pub fn left(&self) -> Option<&LabelledTree> {
        match self {
            LabelledTree::Leaf(_) => None,
            LabelledTree::Node(l, _) => Some(l),
        }
    }

    pub fn right(&self) -> Option<&LabelledTree> {
        match self {
            LabelledTree::Leaf(_) => None,
            LabelledTree::Node(_, r) => Some(r),
        }
    }

    /// The underlying unlabelled shape.
    pub fn shape(&self) -> Shape {
        match self {
            LabelledTree::Leaf(_) => Shape::Leaf,
            LabelledTree::Node(l, r) => Shape::node(l.shape(), r.shape()),
        }
    }

    /// Leaf labels in left-to-right order.
    pub fn labels(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.leaf_count());
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels(&self, out: &mut Vec<u32>) {
        match self {
            LabelledTree::Leaf(x) => out.push(*x),
            LabelledTree::Node(l, r) => {
                l.collect_labels(out);
                r.collect_labels(out);
            }
        }
    }

    /// Checks that every label lies in `1..=2d`.
    pub fn validate_labels(&self, d: u32) -> Result<(), TreeError> {
        let max = 2 * d;
        for label in self.labels() {
            if label == 0 || label > max {
                return Err(TreeError::LabelOutOfRange { label, max });
            }
        }
        Ok(())
    }

    /// Membership in the positive generator set: a single leaf, or a node
    /// whose branches are both positive with left strictly below right.
    pub fn is_positive(&self) -> bool {
        match self {
            LabelledTree::Leaf(_) => true,
            LabelledTree::Node(l, r) => l.is_positive() && r.is_positive() && l.as_ref() < r.as_ref(),
        }
    }

    /// Concatenation: a new root with `self` on the left and `other` on the
    /// right; the label word is the concatenation of the two words.
    pub fn concat(&self, other: &LabelledTree) -> LabelledTree {
        LabelledTree::node(self.clone(), other.clone())
    }

    /// GraphViz DOT rendering of the tree.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tree {\n  node [shape=circle];\n");
        let mut counter = 0usize;
        self.dot_node(&mut out, &mut counter);
        out.push_str("}\n");
        out
    }

    fn dot_node(&self, out: &mut String, counter: &mut usize) -> usize {
        let id = *counter;
        *counter += 1;
        match self {
            LabelledTree::Leaf(x) => {
                out.push_str(&format!("  n{id} [label=\"{x}\", shape=plaintext];\n"));
            }
            LabelledTree::Node(l, r) => {
                out.push_str(&format!("  n{id} [label=\"\"];\n"));
                let lid = l.dot_node(out, counter);
                let rid = r.dot_node(out, counter);
                out.push_str(&format!("  n{id} -> n{lid};\n  n{id} -> n{rid};\n"));
            }
        }
        id
    }
}

impl Ord for LabelledTree {
    /// The total order on labelled trees: compare shapes first, break ties
    /// lexicographically on the label words.
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_shapes(self, other).then_with(|| self.labels().cmp(&other.labels()))
    }
}

impl PartialOrd for LabelledTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn cmp_shapes(a: &LabelledTree, b: &LabelledTree) -> Ordering {
    a.leaf_count()
        .cmp(&b.leaf_count())
        .then_with(|| match (a, b) {
            (LabelledTree::Leaf(_), LabelledTree::Leaf(_)) => Ordering::Equal,
            (LabelledTree::Node(al, ar), LabelledTree::Node(bl, br)) => {
                cmp_shapes(al, bl).then_with(|| cmp_shapes(ar, br))
            }
            _ => unreachable!("equal leaf count implies equal arity"),
        })
}

/// Substitutes `args[perm(i)]` for the `i`-th leaf of `t`.
///
/// With the identity permutation and two arguments this is [`LabelledTree::concat`].
pub fn compose(
    t: &Shape,
    perm: &Permutation,
    args: &[LabelledTree],
) -> Result<LabelledTree, TreeError> {
    let n = t.leaf_count();
    if args.len() != n {
        return Err(TreeError::ArityMismatch { expected: n, got: args.len() });
    }
    if perm.len() != n {
        return Err(TreeError::ArityMismatch { expected: n, got: perm.len() });
    }
    let mut next_leaf = 0usize;
    Ok(compose_walk(t, perm, args, &mut next_leaf))
}

fn compose_walk(
    t: &Shape,
    perm: &Permutation,
    args: &[LabelledTree],
    next_leaf: &mut usize,
) -> LabelledTree {
    match t {
        Shape::Leaf => {
            let i = *next_leaf;
            *next_leaf += 1;
            args[perm.apply(i)].clone()
        }
        Shape::Node(l, r) => {
            let left = compose_walk(l, perm, args, next_leaf);
            let right = compose_walk(r, perm, args, next_leaf);
            LabelledTree::node(left, right)
        }
    }
}

/// The `m`-th Catalan number `(2m)! / ((m+1)! m!)`, memoized.
pub fn catalan(m: usize) -> BigUint {
    static CACHE: OnceLock<Mutex<Vec<BigUint>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(vec![BigUint::one()]));
    let mut cache = cache.lock().unwrap();
    while cache.len() <= m {
        // C_{k+1} = C_k * 2(2k+1) / (k+2)
        let k = cache.len() - 1;
        let next = (&cache[k] * BigUint::from(2 * (2 * k + 1))) / BigUint::from(k + 2);
        cache.push(next);
    }
    cache[m].clone()
}

/// All shapes with exactly `n` leaves, in increasing order.
pub fn shapes(n: usize) -> Vec<Shape> {
    assert!(n >= 1, "shapes are indexed by leaf count >= 1");
    if n == 1 {
        return vec![Shape::Leaf];
    }
    let mut out = Vec::new();
    for p in 1..n {
        for l in shapes(p) {
            for r in shapes(n - p) {
                out.push(Shape::node(l.clone(), r));
            }
        }
    }
    out
}

/// Position of `t` within the shapes of its own leaf count, zero-based,
/// consistent with the shape order.
pub fn shape_rank(t: &Shape) -> BigUint {
    match t {
        Shape::Leaf => BigUint::zero(),
        Shape::Node(l, r) => {
            let n = t.leaf_count();
            let p = l.leaf_count();
            let mut rank = BigUint::zero();
            for q in 1..p {
                rank += catalan(q - 1) * catalan(n - q - 1);
            }
            rank += shape_rank(l) * catalan(n - p - 1);
            rank += shape_rank(r);
            rank
        }
    }
}

/// Inverse of [`shape_rank`] within the shapes of `n` leaves.
pub fn shape_unrank(n: usize, k: &BigUint) -> Option<Shape> {
    if n == 1 {
        return if k.is_zero() { Some(Shape::Leaf) } else { None };
    }
    let mut k = k.clone();
    for p in 1..n {
        let block = catalan(p - 1) * catalan(n - p - 1);
        if k < block {
            let right_count = catalan(n - p - 1);
            let l_rank = &k / &right_count;
            let r_rank = &k % &right_count;
            let l = shape_unrank(p, &l_rank)?;
            let r = shape_unrank(n - p, &r_rank)?;
            return Some(Shape::node(l, r));
        }
        k -= block;
    }
    None
}

/// Number of labelled trees over `[2d]` with at most `n_max` leaves.
pub fn count_labelled(d: u32, n_max: usize) -> BigUint {
    let base = BigUint::from(2 * d);
    let mut total = BigUint::zero();
    for n in 1..=n_max {
        total += catalan(n - 1) * base.pow(n as u32);
    }
    total
}

/// The order-preserving bijection from labelled trees to positive integers.
///
/// All trees with fewer leaves come first; within a fixed leaf count the
/// shape is the major key and the label word (base `2d`) the minor key.
pub fn rank(g: &LabelledTree, d: u32) -> Result<BigUint, TreeError> {
    g.validate_labels(d)?;
    let n = g.leaf_count();
    let base = BigUint::from(2 * d);
    let mut value = BigUint::zero();
    for m in 1..n {
        value += catalan(m - 1) * base.pow(m as u32);
    }
    value += shape_rank(&g.shape()) * base.pow(n as u32);
    let mut word = BigUint::zero();
    for label in g.labels() {
        word = word * &base + BigUint::from(label - 1);
    }
    value += word;
    Ok(value + BigUint::one())
}

/// Inverse of [`rank`].
pub fn unrank(k: &BigUint, d: u32) -> Result<LabelledTree, TreeError> {
    if k.is_zero() {
        return Err(TreeError::RankOutOfRange);
    }
    let base = BigUint::from(2 * d);
    let mut k0 = k - BigUint::one();
    let mut n = 1usize;
    loop {
        let tier = catalan(n - 1) * base.pow(n as u32);
        if k0 < tier {
            break;
        }
        k0 -= tier;
        n += 1;
    }
    let words = base.pow(n as u32);
    let sr = &k0 / &words;
    let mut wr = &k0 % &words;
    let shape = shape_unrank(n, &sr).expect("shape rank in range by construction");
    let mut labels = vec![0u32; n];
    for i in (0..n).rev() {
        let digit = &wr % &base;
        labels[i] = digit_to_u32(&digit) + 1;
        wr /= &base;
    }
    let mut next = 0usize;
    Ok(attach_labels(&shape, &labels, &mut next))
}

fn digit_to_u32(x: &BigUint) -> u32 {
    let digits = x.to_u32_digits();
    if digits.is_empty() {
        0
    } else {
        digits[0]
    }
}

fn attach_labels(t: &Shape, labels: &[u32], next: &mut usize) -> LabelledTree {
    match t {
        Shape::Leaf => {
            let i = *next;
            *next += 1;
            LabelledTree::Leaf(labels[i])
        }
        Shape::Node(l, r) => {
            let left = attach_labels(l, labels, next);
            let right = attach_labels(r, labels, next);
            LabelledTree::node(left, right)
        }
    }
}

/// All positive trees over `[2d]` with at most `n_max` leaves, sorted.
pub fn enumerate_positive(d: u32, n_max: usize) -> Vec<LabelledTree> {
    let mut tiers: Vec<Vec<LabelledTree>> = vec![Vec::new(); n_max + 1];
    if n_max >= 1 {
        tiers[1] = (1..=2 * d).map(LabelledTree::Leaf).collect();
    }
    for n in 2..=n_max {
        let mut tier = Vec::new();
        for p in 1..n {
            for a in &tiers[p] {
                for b in &tiers[n - p] {
                    if a < b {
                        tier.push(a.concat(b));
                    }
                }
            }
        }
        tier.sort();
        tiers[n] = tier;
    }
    let mut out: Vec<LabelledTree> = tiers.into_iter().flatten().collect();
    out.sort();
    out
}

impl fmt::Display for LabelledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelledTree::Leaf(x) => write!(f, "{x}"),
            LabelledTree::Node(l, r) => write!(f, "[{l},{r}]"),
        }
    }
}

impl FromStr for LabelledTree {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        let mut pos = 0usize;
        let tree = parse_tree(bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(TreeError::Parse { pos, msg: "trailing input".into() });
        }
        Ok(tree)
    }
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

pub(crate) fn parse_tree(bytes: &[u8], pos: &mut usize) -> Result<LabelledTree, TreeError> {
    skip_ws(bytes, pos);
    if *pos >= bytes.len() {
        return Err(TreeError::Parse { pos: *pos, msg: "expected tree".into() });
    }
    if bytes[*pos] == b'[' {
        *pos += 1;
        let left = parse_tree(bytes, pos)?;
        skip_ws(bytes, pos);
        if *pos >= bytes.len() || bytes[*pos] != b',' {
            return Err(TreeError::Parse { pos: *pos, msg: "expected ','".into() });
        }
        *pos += 1;
        let right = parse_tree(bytes, pos)?;
        skip_ws(bytes, pos);
        if *pos >= bytes.len() || bytes[*pos] != b']' {
            return Err(TreeError::Parse { pos: *pos, msg: "expected ']'".into() });
        }
        *pos += 1;
        Ok(LabelledTree::node(left, right))
    } else {
        parse_label(bytes, pos).map(LabelledTree::Leaf)
    }
}

pub(crate) fn parse_label(bytes: &[u8], pos: &mut usize) -> Result<u32, TreeError> {
    skip_ws(bytes, pos);
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if start == *pos {
        return Err(TreeError::Parse { pos: start, msg: "expected label".into() });
    }
    let text = std::str::from_utf8(&bytes[start..*pos]).unwrap();
    if text.starts_with('0') {
        return Err(TreeError::Parse { pos: start, msg: "labels start at 1".into() });
    }
    text.parse::<u32>()
        .map_err(|_| TreeError::Parse { pos: start, msg: "label too large".into() })
}
