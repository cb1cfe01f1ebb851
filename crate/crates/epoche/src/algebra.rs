//! The truncated bracketing algebra and its classical shadow.
//!
//! Both algebras share one representation: finitely supported maps from
//! basis monomials (non-increasing words of positive trees) to coefficients.
//! [`ShadowElement`] multiplies q-commutatively; [`EnvelopeElement`]
//! multiplies by running the confluent normal-ordering rewriter, which
//! replaces an ascending adjacent pair of generators by the swapped pair
//! plus the concatenated-tree generator.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::coeffs::{q_pair, q_perm, partition_z, LaurentPolynomial, RationalFunction, Specialization};
use crate::perm::Permutation;
use crate::trees::{LabelledTree, TreeError};

/// Whether coefficients stay symbolic or collapse to rationals at a point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffMode {
    Symbolic,
    Specialized(Specialization),
}

/// Ambient parameters: alphabet size `2d`, truncation level, coefficient mode.
///
/// Trees with more than `trunc` leaves are zero in this context.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    d: u32,
    trunc: usize,
    mode: CoeffMode,
}

impl Context {
    pub fn symbolic(d: u32, trunc: usize) -> Context {
        assert!(d >= 1 && trunc >= 1);
        Context { d, trunc, mode: CoeffMode::Symbolic }
    }

    pub fn specialized(d: u32, trunc: usize, spec: Specialization) -> Context {
        assert!(d >= 1 && trunc >= 1);
        Context { d, trunc, mode: CoeffMode::Specialized(spec) }
    }

    pub fn all_ones(d: u32, trunc: usize) -> Context {
        Context::specialized(d, trunc, Specialization::all_ones(d))
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn mode(&self) -> &CoeffMode {
        &self.mode
    }

    /// Injects a symbolic polynomial, evaluating it first in specialized mode.
    pub fn lift(&self, p: LaurentPolynomial) -> RationalFunction {
        match &self.mode {
            CoeffMode::Symbolic => RationalFunction::from_poly(p),
            CoeffMode::Specialized(spec) => RationalFunction::from_rational(p.evaluate(spec)),
        }
    }

    pub fn q_pair(&self, a: &LabelledTree, b: &LabelledTree) -> RationalFunction {
        self.lift(q_pair(a, b))
    }

    pub fn q_perm(&self, gs: &[LabelledTree], s: &Permutation) -> RationalFunction {
        self.lift(q_perm(gs, s))
    }

    pub fn partition_z(&self, gs: &[LabelledTree]) -> RationalFunction {
        self.lift(partition_z(gs))
    }

    pub fn weyl_coeff(&self, gs: &[LabelledTree], s: &Permutation) -> RationalFunction {
        self.q_perm(gs, s).div(&self.partition_z(gs))
    }

    /// Expresses the generator of an arbitrary labelled tree in terms of a
    /// positive one: trees with equal canonical branches (or beyond the
    /// truncation) are zero, and branch swaps contribute `-q_{Γ',Γ}`.
    pub fn canonicalize(&self, g: &LabelledTree) -> CanonicalTree {
        if g.leaf_count() > self.trunc {
            return CanonicalTree::zero();
        }
        self.canonicalize_inner(g)
    }

    fn canonicalize_inner(&self, g: &LabelledTree) -> CanonicalTree {
        match g {
            LabelledTree::Leaf(_) => CanonicalTree {
                coeff: RationalFunction::one(),
                tree: Some(g.clone()),
            },
            LabelledTree::Node(l, r) => {
                let cl = self.canonicalize_inner(l);
                let cr = self.canonicalize_inner(r);
                let (lt, rt) = match (cl.tree, cr.tree) {
                    (Some(lt), Some(rt)) => (lt, rt),
                    _ => return CanonicalTree::zero(),
                };
                let coeff = cl.coeff.mul(&cr.coeff);
                match lt.cmp(&rt) {
                    std::cmp::Ordering::Equal => CanonicalTree::zero(),
                    std::cmp::Ordering::Less => CanonicalTree {
                        coeff,
                        tree: Some(lt.concat(&rt)),
                    },
                    std::cmp::Ordering::Greater => CanonicalTree {
                        coeff: coeff.mul(&self.q_pair(&rt, &lt)).neg(),
                        tree: Some(rt.concat(&lt)),
                    },
                }
            }
        }
    }
}

/// Result of canonicalizing a tree: zero, or a coefficient times a positive
/// tree within the truncation.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalTree {
    pub coeff: RationalFunction,
    pub tree: Option<LabelledTree>,
}

impl CanonicalTree {
    pub fn zero() -> CanonicalTree {
        CanonicalTree { coeff: RationalFunction::zero(), tree: None }
    }

    pub fn is_zero(&self) -> bool {
        self.tree.is_none()
    }
}

/// A basis monomial: a non-increasing word of positive trees. The empty word
/// is the unit.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    factors: Vec<LabelledTree>,
}

impl Monomial {
    pub fn unit() -> Monomial {
        Monomial { factors: Vec::new() }
    }

    pub fn generator(tree: LabelledTree) -> Monomial {
        debug_assert!(tree.is_positive());
        Monomial { factors: vec![tree] }
    }

    /// Wraps an already sorted word; debug-checks the basis invariants.
    pub fn from_sorted(factors: Vec<LabelledTree>) -> Monomial {
        debug_assert!(factors.windows(2).all(|w| w[0] >= w[1]), "factors must be non-increasing");
        debug_assert!(factors.iter().all(|f| f.is_positive()), "factors must be positive trees");
        Monomial { factors }
    }

    pub fn factors(&self) -> &[LabelledTree] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    /// Total grading degree `Σ (|Γ_i| - 1)`.
    pub fn degree(&self) -> usize {
        self.factors.iter().map(|f| f.degree()).sum()
    }

    pub fn total_leaves(&self) -> usize {
        self.factors.iter().map(|f| f.leaf_count()).sum()
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let gens: Vec<String> = self.factors.iter().map(format_generator).collect();
        write!(f, "{}", gens.join(" "))
    }
}

/// A generator is printed `h[...]` with the tree's outermost brackets fused
/// into the marker: `h[1]`, `h[1,2]`, `h[[1,2],3]`.
pub fn format_generator(tree: &LabelledTree) -> String {
    match tree {
        LabelledTree::Leaf(x) => format!("h[{x}]"),
        LabelledTree::Node(l, r) => format!("h[{l},{r}]"),
    }
}

/// Sorts a word of positive trees into a basis monomial, collecting one
/// `q`-factor per transposition.
pub fn shadow_sort(ctx: &Context, word: &[LabelledTree]) -> (RationalFunction, Monomial) {
    let mut coeff = RationalFunction::one();
    for i in 0..word.len() {
        for j in (i + 1)..word.len() {
            if word[i] < word[j] {
                coeff = coeff.mul(&ctx.q_pair(&word[j], &word[i]));
            }
        }
    }
    let mut sorted = word.to_vec();
    sorted.sort_by(|a, b| b.cmp(a));
    (coeff, Monomial::from_sorted(sorted))
}

/// The coefficient `q(a, b)` defined by `b · a = q(a, b) · a · b` in the
/// shadow; multiplicative in both arguments.
pub fn swap_coeff(ctx: &Context, a: &Monomial, b: &Monomial) -> RationalFunction {
    let mut coeff = RationalFunction::one();
    for x in a.factors() {
        for y in b.factors() {
            coeff = coeff.mul(&ctx.q_pair(x, y));
        }
    }
    coeff
}

/// Marker for the q-commutative multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShadowKind {}

/// Marker for the normal-ordered multiplication.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnvelopeKind {}

/// An algebra element: finitely supported coefficients on basis monomials.
///
/// The kind parameter selects the multiplication; the data layout is shared,
/// which is what makes the quantization maps plain reinterpretations.
pub struct Element<K> {
    ctx: Context,
    terms: BTreeMap<Monomial, RationalFunction>,
    _kind: PhantomData<K>,
}

impl<K> Clone for Element<K> {
    fn clone(&self) -> Self {
        Element { ctx: self.ctx.clone(), terms: self.terms.clone(), _kind: PhantomData }
    }
}

impl<K> fmt::Debug for Element<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({self})")
    }
}

impl<K> PartialEq for Element<K> {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.terms == other.terms
    }
}

pub type ShadowElement = Element<ShadowKind>;
pub type EnvelopeElement = Element<EnvelopeKind>;

impl<K> Element<K> {
    pub fn zero(ctx: &Context) -> Element<K> {
        Element { ctx: ctx.clone(), terms: BTreeMap::new(), _kind: PhantomData }
    }

    pub fn unit(ctx: &Context) -> Element<K> {
        let mut e = Element::zero(ctx);
        e.add_term(Monomial::unit(), RationalFunction::one());
        e
    }

    pub fn from_term(ctx: &Context, mono: Monomial, coeff: RationalFunction) -> Element<K> {
        let mut e = Element::zero(ctx);
        e.add_term(mono, coeff);
        e
    }

    /// The generator of an arbitrary labelled tree, canonicalized (may be zero).
    pub fn generator(ctx: &Context, tree: &LabelledTree) -> Element<K> {
        let canon = ctx.canonicalize(tree);
        match canon.tree {
            None => Element::zero(ctx),
            Some(t) => Element::from_term(ctx, Monomial::generator(t), canon.coeff),
        }
    }

    pub fn ctx(&self) -> &Context {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> RationalFunction {
        self.terms.get(mono).cloned().unwrap_or_else(RationalFunction::zero)
    }

    pub(crate) fn add_term(&mut self, mono: Monomial, coeff: RationalFunction) {
        if coeff.is_zero() {
            return;
        }
        debug_assert!(
            mono.factors().iter().all(|f| f.leaf_count() <= self.ctx.trunc()),
            "monomial beyond truncation"
        );
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&coeff);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Element<K>) -> Element<K> {
        assert_eq!(self.ctx, other.ctx, "context mismatch");
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Element<K> {
        let mut out = Element::zero(&self.ctx);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.neg());
        }
        out
    }

    pub fn sub(&self, other: &Element<K>) -> Element<K> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &RationalFunction) -> Element<K> {
        let mut out = Element::zero(&self.ctx);
        if c.is_zero() {
            return out;
        }
        for (m, k) in &self.terms {
            out.add_term(m.clone(), k.mul(c));
        }
        out
    }

    /// Restriction of the support to monomials of degree exactly `m`.
    pub fn graded_component(&self, m: usize) -> Element<K> {
        let mut out = Element::zero(&self.ctx);
        for (mono, c) in &self.terms {
            if mono.degree() == m {
                out.add_term(mono.clone(), c.clone());
            }
        }
        out
    }

    /// Restriction to degrees `>= m` (the filtration component).
    pub fn filtration_part(&self, m: usize) -> Element<K> {
        let mut out = Element::zero(&self.ctx);
        for (mono, c) in &self.terms {
            if mono.degree() >= m {
                out.add_term(mono.clone(), c.clone());
            }
        }
        out
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).min()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// `true` when every monomial has the same degree.
    pub fn is_homogeneous(&self) -> bool {
        match (self.min_degree(), self.max_degree()) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        }
    }

    /// Maximum over monomials of the total leaf count; bounds the degrees
    /// reachable from this element by normal ordering.
    pub fn max_total_leaves(&self) -> usize {
        self.terms.keys().map(|m| m.total_leaves()).max().unwrap_or(0)
    }

    /// Evaluates every coefficient at a specialization, producing an element
    /// of the corresponding specialized context.
    pub fn specialize(&self, spec: &Specialization) -> Element<K> {
        let ctx = Context::specialized(self.ctx.d(), self.ctx.trunc(), spec.clone());
        let mut out = Element::zero(&ctx);
        for (m, c) in &self.terms {
            let v = c.evaluate(spec).expect("positive specialization cannot vanish on a denominator");
            out.add_term(m.clone(), RationalFunction::from_rational(v));
        }
        out
    }

    pub fn to_json(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(m, c)| TermJson {
                coeff_num: c.numerator().to_string(),
                coeff_den: c.denominator().to_string(),
                monomial: m.factors().iter().map(|t| t.to_string()).collect(),
            })
            .collect()
    }

    /// Reinterprets the same terms in another algebra (the underlying vector
    /// space identification).
    pub(crate) fn reinterpret<L>(&self) -> Element<L> {
        Element { ctx: self.ctx.clone(), terms: self.terms.clone(), _kind: PhantomData }
    }
}

/// One serialized term of an element.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermJson {
    pub coeff_num: String,
    pub coeff_den: String,
    pub monomial: Vec<String>,
}

impl ShadowElement {
    /// q-commutative product.
    pub fn mul(&self, other: &ShadowElement) -> ShadowElement {
        assert_eq!(self.ctx, other.ctx, "context mismatch");
        let mut out = ShadowElement::zero(&self.ctx);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut word: Vec<LabelledTree> = ma.factors().to_vec();
                word.extend_from_slice(mb.factors());
                let (swap, mono) = shadow_sort(&self.ctx, &word);
                out.add_term(mono, ca.mul(cb).mul(&swap));
            }
        }
        out
    }
}

/// Reduction strategies for the rewriter; results must agree (confluence).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReductionStrategy {
    LeftmostPair,
    RightmostPair,
}

/// Normal-orders `coeff · ħ_{w_1} ... ħ_{w_k}` into the monomial basis.
///
/// Factors must be positive trees. Every rewrite either swaps one ascending
/// adjacent pair (emitting a `q`-factor) or contracts it to the concatenated
/// tree, so the pair (length, ascents) drops lexicographically; both facts
/// are asserted.
pub fn normal_order(ctx: &Context, word: &[LabelledTree], coeff: RationalFunction) -> EnvelopeElement {
    normal_order_with(ctx, word, coeff, ReductionStrategy::LeftmostPair)
}

pub fn normal_order_with(
    ctx: &Context,
    word: &[LabelledTree],
    coeff: RationalFunction,
    strategy: ReductionStrategy,
) -> EnvelopeElement {
    debug_assert!(word.iter().all(|t| t.is_positive()), "factors must be positive trees");
    let mut out = EnvelopeElement::zero(ctx);
    if coeff.is_zero() {
        return out;
    }
    if word.iter().any(|t| t.leaf_count() > ctx.trunc()) {
        return out;
    }
    let len0 = word.len();
    let max_swaps = len0 * len0.saturating_sub(1) / 2;
    let step_bound = len0 + len0 * len0 * max_swaps;

    // worklist items: (coefficient, word, rewrites applied along this path)
    let mut work: Vec<(RationalFunction, Vec<LabelledTree>, usize)> =
        vec![(coeff, word.to_vec(), 0)];
    while let Some((c, w, steps)) = work.pop() {
        let reducible = match strategy {
            ReductionStrategy::LeftmostPair => (0..w.len().saturating_sub(1)).find(|&i| w[i] < w[i + 1]),
            ReductionStrategy::RightmostPair => {
                (0..w.len().saturating_sub(1)).rev().find(|&i| w[i] < w[i + 1])
            }
        };
        match reducible {
            None => out.add_term(Monomial::from_sorted(w), c),
            Some(i) => {
                assert!(steps < step_bound, "rewrite chain exceeded its termination bound");
                let measure = (w.len(), ascent_count(&w));
                // swap branch
                let mut swapped = w.clone();
                swapped.swap(i, i + 1);
                let swap_c = c.mul(&ctx.q_pair(&w[i + 1], &w[i]));
                debug_assert!((swapped.len(), ascent_count(&swapped)) < measure);
                work.push((swap_c, swapped, steps + 1));
                // contraction branch
                let canon = ctx.canonicalize(&w[i].concat(&w[i + 1]));
                if let Some(tree) = canon.tree {
                    let mut contracted = Vec::with_capacity(w.len() - 1);
                    contracted.extend_from_slice(&w[..i]);
                    contracted.push(tree);
                    contracted.extend_from_slice(&w[i + 2..]);
                    debug_assert!((contracted.len(), ascent_count(&contracted)) < measure);
                    work.push((c.mul(&canon.coeff), contracted, steps + 1));
                }
            }
        }
    }
    out
}

fn ascent_count(word: &[LabelledTree]) -> usize {
    let mut count = 0;
    for i in 0..word.len() {
        for j in (i + 1)..word.len() {
            if word[i] < word[j] {
                count += 1;
            }
        }
    }
    count
}

impl EnvelopeElement {
    /// Normal-ordered product: concatenate factor words, then rewrite.
    pub fn mul(&self, other: &EnvelopeElement) -> EnvelopeElement {
        assert_eq!(self.ctx, other.ctx, "context mismatch");
        let mut out = EnvelopeElement::zero(&self.ctx);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut word: Vec<LabelledTree> = ma.factors().to_vec();
                word.extend_from_slice(mb.factors());
                let product = normal_order(&self.ctx, &word, ca.mul(cb));
                out = out.add(&product);
            }
        }
        out
    }
}

fn display_element<K>(e: &Element<K>, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if e.is_zero() {
        return write!(f, "0");
    }
    let mut first = true;
    for (mono, coeff) in e.terms() {
        // pull out a leading sign when the coefficient is a plain term
        let (neg, abs) = match coeff.as_monomial_poly() {
            Some(p) => {
                let (_, c) = p.as_monomial().expect("single term");
                if c < &BigRational::zero() {
                    (true, coeff.neg())
                } else {
                    (false, coeff.clone())
                }
            }
            None => (false, coeff.clone()),
        };
        if first {
            if neg {
                write!(f, "-")?;
            }
            first = false;
        } else if neg {
            write!(f, " - ")?;
        } else {
            write!(f, " + ")?;
        }
        if mono.is_unit() {
            write!(f, "{abs}")?;
        } else if abs.is_one() {
            write!(f, "{mono}")?;
        } else {
            write!(f, "{abs} * {mono}")?;
        }
    }
    Ok(())
}

impl<K> fmt::Display for Element<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        display_element(self, f)
    }
}

/// Rebuilds an element from its JSON term list.
pub fn element_from_json<K>(ctx: &Context, terms: &[TermJson]) -> Result<Element<K>, TreeError> {
    let mut out = Element::zero(ctx);
    for term in terms {
        let num: LaurentPolynomial = crate::parse::parse_poly_text(&term.coeff_num)?;
        let den: LaurentPolynomial = crate::parse::parse_poly_text(&term.coeff_den)?;
        if den.is_zero() {
            return Err(TreeError::Parse { pos: 0, msg: "zero denominator".into() });
        }
        let mut coeff = RationalFunction::new(num, den);
        if let CoeffMode::Specialized(spec) = ctx.mode() {
            let v = coeff
                .evaluate(spec)
                .ok_or_else(|| TreeError::Parse { pos: 0, msg: "denominator vanishes".into() })?;
            coeff = RationalFunction::from_rational(v);
        }
        let mut word = Vec::new();
        let mut extra = RationalFunction::one();
        let mut zero = false;
        for t in &term.monomial {
            let tree: LabelledTree = t.parse()?;
            tree.validate_labels(ctx.d())?;
            let canon = ctx.canonicalize(&tree);
            match canon.tree {
                None => {
                    zero = true;
                    break;
                }
                Some(tr) => {
                    extra = extra.mul(&canon.coeff);
                    word.push(tr);
                }
            }
        }
        if zero {
            continue;
        }
        let (swap, mono) = shadow_sort(ctx, &word);
        out.add_term(mono, coeff.mul(&extra).mul(&swap));
    }
    Ok(out)
}
