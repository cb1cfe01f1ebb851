//! Quantization maps and the structures they induce on the classical shadow:
//! the normal star product (rewriting-based and closed-form), the q-Weyl map
//! with its triangular inverse, the q-Weyl star product (direct and via the
//! graded recursion), and the three brackets.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::algebra::{
    normal_order, swap_coeff, Context, EnvelopeElement, Monomial, ShadowElement,
};
use crate::coeffs::{q_perm, RationalFunction, Specialization};
use crate::perm::Permutation;
use crate::trees::{compose, shapes, LabelledTree};

/// The normal quantization: reinterpret a sorted shadow monomial as the
/// identically ordered word of the bracketing algebra. Linear, basis-wise
/// the identity on the shared representation.
pub fn normal_q(a: &ShadowElement) -> EnvelopeElement {
    a.reinterpret()
}

/// The underlying vector-space identification in the other direction.
pub fn phi_inv(x: &EnvelopeElement) -> ShadowElement {
    x.reinterpret()
}

/// The star product transported from the bracketing algebra through the
/// normal quantization. This is the rewriting-based route, the ground truth
/// for the closed formula.
pub fn star_normal(a: &ShadowElement, b: &ShadowElement) -> ShadowElement {
    phi_inv(&normal_q(a).mul(&normal_q(b)))
}

/// Closed combinatorial formula for the normal star product of two basis
/// monomials: sum over ordered partitions of the combined factor list into
/// blocks, each spanned by a shape; a term survives when every composed tree
/// is a positive generator within the truncation and the composed trees are
/// non-increasing. The coefficient is the inverse reordering statistic of
/// the partition's shuffle.
///
/// Tied adjacent blocks (equal composed trees) are counted once, in the
/// arrangement with block position lists increasing; dropping that tie rule
/// gives [`star_normal_closed_literal`], which overcounts repeated factors.
pub fn star_normal_closed(ctx: &Context, a: &Monomial, b: &Monomial) -> ShadowElement {
    closed_formula(ctx, a, b, true)
}

/// The closed formula with no tie rule for equal adjacent blocks. Disagrees
/// with [`star_normal`] on repeated factors (minimal case: a generator
/// starred with itself); kept as a diagnostic.
pub fn star_normal_closed_literal(ctx: &Context, a: &Monomial, b: &Monomial) -> ShadowElement {
    closed_formula(ctx, a, b, false)
}

fn closed_formula(ctx: &Context, a: &Monomial, b: &Monomial, dedup_ties: bool) -> ShadowElement {
    let mut gamma: Vec<LabelledTree> = a.factors().to_vec();
    gamma.extend_from_slice(b.factors());
    if gamma.is_empty() {
        return ShadowElement::unit(ctx);
    }
    let mut out = ShadowElement::zero(ctx);
    let all: Vec<usize> = (0..gamma.len()).collect();
    let mut blocks: Vec<(Vec<usize>, LabelledTree)> = Vec::new();
    partition_terms(ctx, &gamma, &all, &mut blocks, dedup_ties, &mut out);
    out
}

/// Recursively extends the ordered partition by one block and accumulates
/// completed partitions into `out`.
fn partition_terms(
    ctx: &Context,
    gamma: &[LabelledTree],
    remaining: &[usize],
    blocks: &mut Vec<(Vec<usize>, LabelledTree)>,
    dedup_ties: bool,
    out: &mut ShadowElement,
) {
    if remaining.is_empty() {
        let sigma = Permutation::from_images(
            blocks.iter().flat_map(|(positions, _)| positions.iter().copied()).collect(),
        )
        .expect("blocks partition the positions");
        let coeff = ctx.lift(
            q_perm(gamma, &sigma)
                .invert_monomial()
                .expect("reordering statistic is a monomial"),
        );
        let mono = Monomial::from_sorted(blocks.iter().map(|(_, g)| g.clone()).collect());
        out.add_term(mono, coeff);
        return;
    }
    // next block: a nonempty subset of the remaining positions
    let k = remaining.len();
    for mask in 1u64..(1u64 << k) {
        let positions: Vec<usize> =
            (0..k).filter(|i| mask & (1 << i) != 0).map(|i| remaining[i]).collect();
        let values: Vec<LabelledTree> = positions.iter().map(|&p| gamma[p].clone()).collect();
        let id = Permutation::identity(values.len());
        for shape in shapes(values.len()) {
            let g = compose(&shape, &id, &values).expect("arity matches by construction");
            // the positivity zeroing and the truncation
            if !g.is_positive() || g.leaf_count() > ctx.trunc() {
                continue;
            }
            // composed trees must be non-increasing across blocks
            if let Some((prev_pos, prev_g)) = blocks.last() {
                match g.cmp(prev_g) {
                    std::cmp::Ordering::Greater => continue,
                    std::cmp::Ordering::Equal if dedup_ties && *prev_pos > positions => continue,
                    _ => {}
                }
            }
            let rest: Vec<usize> =
                remaining.iter().copied().filter(|p| !positions.contains(p)).collect();
            blocks.push((positions.clone(), g));
            partition_terms(ctx, gamma, &rest, blocks, dedup_ties, out);
            blocks.pop();
        }
    }
}

/// Bilinear extension of the closed formula to whole elements.
pub fn star_normal_closed_elements(a: &ShadowElement, b: &ShadowElement) -> ShadowElement {
    assert_eq!(a.ctx(), b.ctx(), "context mismatch");
    let mut out = ShadowElement::zero(a.ctx());
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            out = out.add(&star_normal_closed(a.ctx(), ma, mb).scale(&ca.mul(cb)));
        }
    }
    out
}

/// The normal q-Poisson bracket: for basis monomials, the degree
/// `|a| + |b| + 1` component of `a ⋆ b - q(b,a) b ⋆ a`, extended bilinearly.
pub fn bracket_normal(a: &ShadowElement, b: &ShadowElement) -> ShadowElement {
    assert_eq!(a.ctx(), b.ctx(), "context mismatch");
    let ctx = a.ctx();
    let mut out = ShadowElement::zero(ctx);
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let wa = ShadowElement::from_term(ctx, ma.clone(), RationalFunction::one());
            let wb = ShadowElement::from_term(ctx, mb.clone(), RationalFunction::one());
            let forward = star_normal(&wa, &wb);
            let backward = star_normal(&wb, &wa);
            let q = swap_coeff(ctx, mb, ma);
            let commutator = forward.sub(&backward.scale(&q));
            let part = commutator.graded_component(ma.degree() + mb.degree() + 1);
            out = out.add(&part.scale(&ca.mul(cb)));
        }
    }
    out
}

/// The q-Weyl quantization: a basis monomial with factor tuple `Γ̃` maps to
/// `Σ_σ q(Γ̃,σ)/Z · (word Γ_{σ(1)} ... Γ_{σ(n)})`, normal-ordered. Reduces
/// to the `1/n!` symmetrization when every variable specializes to one.
pub fn weyl_w(a: &ShadowElement) -> EnvelopeElement {
    let ctx = a.ctx();
    let mut out = EnvelopeElement::zero(ctx);
    for (mono, c) in a.terms() {
        if mono.is_unit() {
            out = out.add(&EnvelopeElement::unit(ctx).scale(c));
            continue;
        }
        let gs = mono.factors();
        let z = ctx.partition_z(gs);
        for sigma in Permutation::all(gs.len()) {
            let coeff = ctx.q_perm(gs, &sigma).div(&z).mul(c);
            let word = sigma.permute(gs);
            out = out.add(&normal_order(ctx, &word, coeff));
        }
    }
    out
}

/// Inverse of [`weyl_w`] by triangular degree-ascending correction: read off
/// the lowest graded component, subtract its image, repeat. Terminates
/// because `weyl_w` raises nothing below its argument's degree and the
/// reachable degrees are bounded by the total leaf count.
pub fn weyl_w_inverse(x: &EnvelopeElement) -> ShadowElement {
    let ctx = x.ctx();
    let bound = x.max_total_leaves();
    let mut residual = x.clone();
    let mut out = ShadowElement::zero(ctx);
    while !residual.is_zero() {
        let m = residual.min_degree().expect("nonzero element has a minimal degree");
        assert!(m <= bound, "inversion left the reachable degree range");
        let layer = phi_inv(&residual).graded_component(m);
        out = out.add(&layer);
        residual = residual.sub(&weyl_w(&layer));
        debug_assert!(residual.min_degree().map(|next| next > m).unwrap_or(true));
    }
    out
}

/// The q-Weyl star product, computed by direct triangular inversion of the
/// product of images.
pub fn star_weyl(a: &ShadowElement, b: &ShadowElement) -> ShadowElement {
    assert_eq!(a.ctx(), b.ctx(), "context mismatch");
    weyl_w_inverse(&weyl_w(a).mul(&weyl_w(b)))
}

/// The q-Weyl star product assembled from the graded alternating-sum
/// expansion: for every degree `m`, sum over subsets `l_1 < ... < l_r < m`
/// of chained project-and-requantize operators applied to the product of
/// images, with sign `(-1)^r`. Must agree with [`star_weyl`].
pub fn star_weyl_recursive(a: &ShadowElement, b: &ShadowElement) -> ShadowElement {
    assert_eq!(a.ctx(), b.ctx(), "context mismatch");
    let ctx = a.ctx();
    let x = weyl_w(a).mul(&weyl_w(b));
    let mut out = ShadowElement::zero(ctx);
    if x.is_zero() {
        return out;
    }
    let max_m = x.max_total_leaves();
    for m in 0..=max_m {
        let mut component = ShadowElement::zero(ctx);
        for mask in 0u64..(1u64 << m) {
            let mut y = x.clone();
            for l in 0..m {
                if mask & (1 << l) != 0 {
                    y = weyl_w(&phi_inv(&y).graded_component(l));
                }
            }
            let term = phi_inv(&y).graded_component(m);
            if mask.count_ones() % 2 == 0 {
                component = component.add(&term);
            } else {
                component = component.sub(&term);
            }
        }
        out = out.add(&component);
    }
    out
}

/// The canonical distortion bracket: the degree `|a| + |b| + 1` component of
/// `a ⊛ b`, extended bilinearly over basis monomials.
pub fn bracket_weyl(a: &ShadowElement, b: &ShadowElement) -> ShadowElement {
    assert_eq!(a.ctx(), b.ctx(), "context mismatch");
    let ctx = a.ctx();
    let mut out = ShadowElement::zero(ctx);
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let wa = ShadowElement::from_term(ctx, ma.clone(), RationalFunction::one());
            let wb = ShadowElement::from_term(ctx, mb.clone(), RationalFunction::one());
            let star = star_weyl(&wa, &wb);
            let part = star.graded_component(ma.degree() + mb.degree() + 1);
            out = out.add(&part.scale(&ca.mul(cb)));
        }
    }
    out
}

/// The q-antisymmetrized distortion bracket
/// `⟨a,b⟩ - q(b,a) ⟨b,a⟩`, with `q(b,a)` defined by `a·b = q(b,a)·b·a`.
pub fn bracket_weyl_antisym(a: &ShadowElement, b: &ShadowElement) -> ShadowElement {
    assert_eq!(a.ctx(), b.ctx(), "context mismatch");
    let ctx = a.ctx();
    let mut out = ShadowElement::zero(ctx);
    for (ma, ca) in a.terms() {
        for (mb, cb) in b.terms() {
            let wa = ShadowElement::from_term(ctx, ma.clone(), RationalFunction::one());
            let wb = ShadowElement::from_term(ctx, mb.clone(), RationalFunction::one());
            let fwd = bracket_weyl(&wa, &wb);
            let bwd = bracket_weyl(&wb, &wa);
            let q = swap_coeff(ctx, mb, ma);
            out = out.add(&fwd.sub(&bwd.scale(&q)).scale(&ca.mul(cb)));
        }
    }
    out
}

/// Groups a star product of homogeneous elements by degree jump: component
/// `k` collects the terms of degree `|a| + |b| + k`. This is the bookkeeping
/// view of the central deformation parameter (the coefficient of its `k`-th
/// power). Arguments must be homogeneous.
pub fn star_degree_jumps(
    a: &ShadowElement,
    b: &ShadowElement,
    star: fn(&ShadowElement, &ShadowElement) -> ShadowElement,
) -> Vec<(usize, ShadowElement)> {
    assert!(a.is_homogeneous() && b.is_homogeneous(), "inputs must be homogeneous");
    let base = a.max_degree().unwrap_or(0) + b.max_degree().unwrap_or(0);
    let product = star(a, b);
    let mut out = Vec::new();
    if let Some(max) = product.max_degree() {
        for m in base..=max {
            let part = product.graded_component(m);
            if !part.is_zero() {
                out.push((m - base, part));
            }
        }
    }
    out
}

/// One witness that quantizing after multiplying by a composite generator
/// differs from multiplying the quantization by its image.
#[derive(Clone, Debug, Serialize)]
pub struct DistortionWitness {
    pub generator: String,
    pub monomial: Vec<String>,
    pub lhs: String,
    pub rhs: String,
    pub specializations_checked: usize,
}

/// Outcome of the scale-factor comparison between the antisymmetrized and
/// the one-sided distortion bracket on two probe pairs.
#[derive(Clone, Debug, Serialize)]
pub struct LambdaReport {
    pub pair_one: String,
    pub pair_two: String,
    pub ratio_one: Option<String>,
    pub ratio_two: Option<String>,
    pub uniform_lambda_exists: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistortionReport {
    pub witness: Option<DistortionWitness>,
    pub lambda: LambdaReport,
    pub pass: bool,
}

/// Searches for the quantization-distortion witness and the two-pair
/// scale-factor obstruction.
///
/// Scans monomials `u` in single-leaf generators and composite generators
/// `ħ_{[i,j]}`, comparing `W(ħ_{[i,j]} · u)` against `ħ̂_{[i,j]} · W(u)`
/// symbolically and at `n_specs` random positive points. A context with
/// truncation level at least 3 is needed for a witness to exist.
pub fn distortion_witness<R: rand::Rng>(
    ctx: &Context,
    n_specs: usize,
    rng: &mut R,
) -> DistortionReport {
    let witness = find_witness(ctx, n_specs, rng);
    let lambda = lambda_obstruction(ctx);
    let pass = witness.is_some() && !lambda.uniform_lambda_exists;
    DistortionReport { witness, lambda, pass }
}

fn find_witness<R: rand::Rng>(
    ctx: &Context,
    n_specs: usize,
    rng: &mut R,
) -> Option<DistortionWitness> {
    let leaves: Vec<LabelledTree> = (1..=2 * ctx.d()).map(LabelledTree::Leaf).collect();
    let mut pairs = Vec::new();
    for i in 1..=2 * ctx.d() {
        for j in (i + 1)..=2 * ctx.d() {
            pairs.push(LabelledTree::leaf(i).concat(&LabelledTree::leaf(j)));
        }
    }
    // candidate u: words of 2..=3 single-leaf generators
    let mut candidates: Vec<Vec<LabelledTree>> = Vec::new();
    for a in &leaves {
        for b in &leaves {
            candidates.push(vec![a.clone(), b.clone()]);
        }
    }
    for a in &leaves {
        for b in &leaves {
            for c in &leaves {
                candidates.push(vec![a.clone(), b.clone(), c.clone()]);
            }
        }
    }
    for gen in &pairs {
        for word in &candidates {
            let gen_shadow = ShadowElement::generator(ctx, gen);
            let gen_env = EnvelopeElement::generator(ctx, gen);
            let mut u = ShadowElement::unit(ctx);
            for t in word {
                u = u.mul(&ShadowElement::generator(ctx, t));
            }
            let lhs = weyl_w(&gen_shadow.mul(&u));
            let rhs = gen_env.mul(&weyl_w(&u));
            let diff = lhs.sub(&rhs);
            if diff.is_zero() {
                continue;
            }
            // confirm the difference survives at random positive points
            let mut robust = true;
            for _ in 0..n_specs {
                let spec = Specialization::random(ctx.d(), rng);
                let nonzero = diff.terms().any(|(_, c)| {
                    c.evaluate(&spec).map(|v| !num_traits::Zero::is_zero(&v)).unwrap_or(false)
                });
                if !nonzero {
                    robust = false;
                    break;
                }
            }
            if !robust {
                continue;
            }
            return Some(DistortionWitness {
                generator: gen.to_string(),
                monomial: word.iter().map(|t| t.to_string()).collect(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
                specializations_checked: n_specs,
            });
        }
    }
    None
}

/// `Some(λ)` when `x = λ · y` for a single coefficient ratio λ.
fn proportionality_ratio(x: &ShadowElement, y: &ShadowElement) -> Option<RationalFunction> {
    if y.is_zero() {
        return if x.is_zero() { Some(RationalFunction::zero()) } else { None };
    }
    let (m0, c0) = y.terms().next().expect("nonzero");
    let lambda = x.coeff(m0).div(c0);
    if *x == y.scale(&lambda) {
        Some(lambda)
    } else {
        None
    }
}

fn lambda_obstruction(ctx: &Context) -> LambdaReport {
    let h1 = ShadowElement::generator(ctx, &LabelledTree::leaf(1));
    let h2 = ShadowElement::generator(ctx, &LabelledTree::leaf(2));
    let h11 = h1.mul(&h1);

    let describe = |a: &ShadowElement, b: &ShadowElement| -> Option<RationalFunction> {
        let anti = bracket_weyl_antisym(a, b);
        let one_sided = bracket_weyl(a, b);
        proportionality_ratio(&anti, &one_sided)
    };
    let r1 = describe(&h1, &h2);
    let r2 = describe(&h11, &h2);
    let uniform = match (&r1, &r2) {
        (Some(a), Some(b)) => a == b,
        // a non-proportional pair already rules out any uniform factor
        _ => false,
    };
    LambdaReport {
        pair_one: "(h[1], h[2])".into(),
        pair_two: "(h[1] h[1], h[2])".into(),
        ratio_one: r1.map(|r| r.to_string()),
        ratio_two: r2.map(|r| r.to_string()),
        uniform_lambda_exists: uniform,
    }
}

/// Convenience: the integer rational `n`.
pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::enumerate_positive;
    use rand::seq::SliceRandom;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lt(s: &str) -> LabelledTree {
        s.parse().unwrap()
    }

    fn gen_e(ctx: &Context, s: &str) -> ShadowElement {
        ShadowElement::generator(ctx, &lt(s))
    }

    fn monomials_up_to(ctx: &Context, max_factors: usize) -> Vec<Monomial> {
        let gens = enumerate_positive(ctx.d(), ctx.trunc());
        let mut out = vec![Monomial::unit()];
        let mut layer: Vec<Vec<LabelledTree>> = vec![Vec::new()];
        for _ in 0..max_factors {
            let mut next = Vec::new();
            for word in &layer {
                for g in &gens {
                    if word.last().map(|l| g <= l).unwrap_or(true) {
                        let mut w = word.clone();
                        w.push(g.clone());
                        out.push(Monomial::from_sorted(w.clone()));
                        next.push(w);
                    }
                }
            }
            layer = next;
        }
        out.sort();
        out.dedup();
        out
    }

    #[test]
    fn star_normal_examples() {
        let ctx = Context::symbolic(1, 3);
        let prod = star_normal(&gen_e(&ctx, "1"), &gen_e(&ctx, "2"));
        let mut expected = ShadowElement::zero(&ctx);
        expected.add_term(
            Monomial::from_sorted(vec![lt("2"), lt("1")]),
            ctx.q_pair(&lt("2"), &lt("1")),
        );
        expected.add_term(Monomial::generator(lt("[1,2]")), RationalFunction::one());
        assert_eq!(prod, expected);

        // leading term is the shadow product
        let shadow = gen_e(&ctx, "1").mul(&gen_e(&ctx, "2"));
        assert_eq!(prod.graded_component(0), shadow);

        // N = 1: only the shadow term survives
        let ctx1 = Context::symbolic(1, 1);
        let prod = star_normal(&gen_e(&ctx1, "1"), &gen_e(&ctx1, "2"));
        assert_eq!(prod, gen_e(&ctx1, "1").mul(&gen_e(&ctx1, "2")));
    }

    #[test]
    fn star_normal_is_associative_and_factorizes() {
        let ctx = Context::symbolic(1, 3);
        let pool = monomials_up_to(&ctx, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let pick = |rng: &mut ChaCha8Rng| {
                ShadowElement::from_term(
                    &ctx,
                    pool.choose(rng).unwrap().clone(),
                    RationalFunction::one(),
                )
            };
            let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            assert_eq!(star_normal(&star_normal(&a, &b), &c), star_normal(&a, &star_normal(&b, &c)));
        }
        // w ⋆ w' = ħ_{Γ1} ⋆ ħ_{Γ2} ⋆ ... over the combined factor list
        for _ in 0..10 {
            let ma = pool.choose(&mut rng).unwrap();
            let mb = pool.choose(&mut rng).unwrap();
            let a = ShadowElement::from_term(&ctx, ma.clone(), RationalFunction::one());
            let b = ShadowElement::from_term(&ctx, mb.clone(), RationalFunction::one());
            let mut factors: Vec<LabelledTree> = ma.factors().to_vec();
            factors.extend_from_slice(mb.factors());
            let mut prod = ShadowElement::unit(&ctx);
            for g in &factors {
                prod = star_normal(&prod, &ShadowElement::generator(&ctx, g));
            }
            assert_eq!(star_normal(&a, &b), prod);
        }
    }

    #[test]
    fn closed_formula_matches_rewriter_exhaustively() {
        for trunc in 1..=3usize {
            let ctx = Context::symbolic(1, trunc);
            let monos = monomials_up_to(&ctx, 2);
            for ma in &monos {
                for mb in &monos {
                    let a = ShadowElement::from_term(&ctx, ma.clone(), RationalFunction::one());
                    let b = ShadowElement::from_term(&ctx, mb.clone(), RationalFunction::one());
                    let direct = star_normal(&a, &b);
                    let closed = star_normal_closed(&ctx, ma, mb);
                    assert_eq!(closed, direct, "N={trunc} {ma} ⋆ {mb}");
                }
            }
        }
    }

    #[test]
    fn literal_formula_overcounts_repeated_factors() {
        let ctx = Context::symbolic(1, 2);
        let m = Monomial::generator(lt("1"));
        let literal = star_normal_closed_literal(&ctx, &m, &m);
        let truth = star_normal(
            &ShadowElement::from_term(&ctx, m.clone(), RationalFunction::one()),
            &ShadowElement::from_term(&ctx, m.clone(), RationalFunction::one()),
        );
        // minimal counterexample: h[1] ⋆ h[1] doubles
        assert_eq!(literal, truth.scale(&RationalFunction::from_int(2)));
        // and the tie-aware formula agrees
        assert_eq!(star_normal_closed(&ctx, &m, &m), truth);
    }

    #[test]
    fn bracket_normal_on_generators_is_concatenation() {
        let ctx = Context::symbolic(1, 4);
        let gens = enumerate_positive(1, 2);
        for a in &gens {
            for b in &gens {
                let lhs = bracket_normal(
                    &ShadowElement::generator(&ctx, a),
                    &ShadowElement::generator(&ctx, b),
                );
                let rhs = ShadowElement::generator(&ctx, &a.concat(b));
                assert_eq!(lhs, rhs, "bracket of {a},{b}");
            }
        }
        // unit kills the bracket
        let one = ShadowElement::unit(&ctx);
        assert!(bracket_normal(&gen_e(&ctx, "1"), &one).is_zero());
        assert!(bracket_normal(&gen_e(&ctx, "1"), &gen_e(&ctx, "1")).is_zero());
    }

    #[test]
    fn bracket_normal_axioms_smoke() {
        let ctx = Context::symbolic(1, 3);
        let pool = monomials_up_to(&ctx, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..6 {
            let w = |rng: &mut ChaCha8Rng| {
                let m = pool.choose(rng).unwrap().clone();
                let e = ShadowElement::from_term(&ctx, m.clone(), RationalFunction::one());
                (m, e)
            };
            let (ma, a) = w(&mut rng);
            let (mb, b) = w(&mut rng);
            let (mc, c) = w(&mut rng);
            // q-antisymmetry: ⟨a,b⟩ = -q(b,a) ⟨b,a⟩
            let q_ba = swap_coeff(&ctx, &mb, &ma);
            assert_eq!(bracket_normal(&a, &b), bracket_normal(&b, &a).scale(&q_ba).neg());
            // q-Leibniz: ⟨a, b c⟩ = ⟨a,b⟩ c + q(a,b) b ⟨a,c⟩
            let q_ab = swap_coeff(&ctx, &ma, &mb);
            let lhs = bracket_normal(&a, &b.mul(&c));
            let rhs = bracket_normal(&a, &b).mul(&c).add(&b.mul(&bracket_normal(&a, &c)).scale(&q_ab));
            assert_eq!(lhs, rhs);
            // q-Jacobi: ⟨a,⟨b,c⟩⟩ = ⟨⟨a,b⟩,c⟩ + q(a,b) ⟨b,⟨a,c⟩⟩
            let lhs = bracket_normal(&a, &bracket_normal(&b, &c));
            let rhs = bracket_normal(&bracket_normal(&a, &b), &c)
                .add(&bracket_normal(&b, &bracket_normal(&a, &c)).scale(&q_ab));
            assert_eq!(lhs, rhs, "a={ma} b={mb} c={mc}");
        }
    }

    #[test]
    fn weyl_map_examples() {
        let ctx = Context::symbolic(1, 3);
        // single generators map to themselves
        for g in enumerate_positive(1, 3) {
            let w = weyl_w(&ShadowElement::generator(&ctx, &g));
            assert_eq!(w, EnvelopeElement::generator(&ctx, &g));
        }
        // two-factor expansion: mono + (q_c/Z) h[1,2], with q_c = q(Γ̃, swap)
        let a = lt("2");
        let b = lt("1");
        let mono = Monomial::from_sorted(vec![a.clone(), b.clone()]);
        let w = weyl_w(&ShadowElement::from_term(&ctx, mono.clone(), RationalFunction::one()));
        let qc = ctx.q_pair(&a, &b);
        let z = RationalFunction::one().add(&qc.mul(&qc));
        let mut direct = EnvelopeElement::from_term(&ctx, mono, RationalFunction::one());
        direct.add_term(Monomial::generator(lt("[1,2]")), qc.div(&z));
        assert_eq!(w, direct);
    }

    #[test]
    fn weyl_all_ones_is_symmetrization() {
        let ctx = Context::all_ones(1, 2);
        let mono = Monomial::from_sorted(vec![lt("2"), lt("1")]);
        let w = weyl_w(&ShadowElement::from_term(&ctx, mono.clone(), RationalFunction::one()));
        let half = RationalFunction::from_rational(BigRational::new(1.into(), 2.into()));
        let mut expected = EnvelopeElement::zero(&ctx);
        expected = expected.add(&normal_order(&ctx, &[lt("2"), lt("1")], half.clone()));
        expected = expected.add(&normal_order(&ctx, &[lt("1"), lt("2")], half));
        assert_eq!(w, expected);
    }

    #[test]
    fn weyl_leading_term_property() {
        let ctx = Context::symbolic(2, 3);
        let pool = monomials_up_to(&ctx, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let m = pool.choose(&mut rng).unwrap();
            let e = ShadowElement::from_term(&ctx, m.clone(), RationalFunction::one());
            let diff = weyl_w(&e).sub(&normal_q(&e));
            if let Some(min) = diff.min_degree() {
                assert!(min >= m.degree() + 1, "W(w) - Q(w) must lie above deg(w)");
            }
        }
    }

    #[test]
    fn weyl_inverse_roundtrip_and_formula() {
        let ctx = Context::symbolic(1, 3);
        let pool = monomials_up_to(&ctx, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..15 {
            let mut f = ShadowElement::zero(&ctx);
            for _ in 0..rng.gen_range(1..=3) {
                f = f.add(&ShadowElement::from_term(
                    &ctx,
                    pool.choose(&mut rng).unwrap().clone(),
                    RationalFunction::from_int(rng.gen_range(-3..=3)),
                ));
            }
            assert_eq!(weyl_w_inverse(&weyl_w(&f)), f);
        }
        // frozen two-factor inversion: Γ ≻ Γ' gives mono - q_c/(1+q_c²) ħ_{Γ'∨Γ}
        let gamma = lt("2");
        let gamma_p = lt("1");
        let word = EnvelopeElement::from_term(
            &ctx,
            Monomial::from_sorted(vec![gamma.clone(), gamma_p.clone()]),
            RationalFunction::one(),
        );
        let qc = ctx.q_pair(&gamma, &gamma_p);
        let z = RationalFunction::one().add(&qc.mul(&qc));
        let mut expected = ShadowElement::from_term(
            &ctx,
            Monomial::from_sorted(vec![gamma.clone(), gamma_p.clone()]),
            RationalFunction::one(),
        );
        expected.add_term(Monomial::generator(lt("[1,2]")), qc.div(&z).neg());
        assert_eq!(weyl_w_inverse(&word), expected);
        // single generators invert trivially
        assert_eq!(
            weyl_w_inverse(&EnvelopeElement::generator(&ctx, &lt("[1,2]"))),
            ShadowElement::generator(&ctx, &lt("[1,2]"))
        );
    }

    #[test]
    fn star_weyl_example_and_recursive_agreement() {
        let ctx = Context::symbolic(1, 3);
        // ħ_Γ ⊛ ħ_{Γ'} with Γ ≻ Γ'
        let prod = star_weyl(&gen_e(&ctx, "2"), &gen_e(&ctx, "1"));
        let qc = ctx.q_pair(&lt("2"), &lt("1"));
        let z = RationalFunction::one().add(&qc.mul(&qc));
        let mut expected = ShadowElement::from_term(
            &ctx,
            Monomial::from_sorted(vec![lt("2"), lt("1")]),
            RationalFunction::one(),
        );
        expected.add_term(Monomial::generator(lt("[1,2]")), qc.div(&z).neg());
        assert_eq!(prod, expected);

        let pool = monomials_up_to(&ctx, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..6 {
            let a = ShadowElement::from_term(&ctx, pool.choose(&mut rng).unwrap().clone(), RationalFunction::one());
            let b = ShadowElement::from_term(&ctx, pool.choose(&mut rng).unwrap().clone(), RationalFunction::one());
            assert_eq!(star_weyl(&a, &b), star_weyl_recursive(&a, &b));
        }
    }

    #[test]
    fn star_weyl_associativity_smoke() {
        let ctx = Context::symbolic(1, 3);
        let pool = monomials_up_to(&ctx, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..4 {
            let pick = |rng: &mut ChaCha8Rng| {
                ShadowElement::from_term(&ctx, pool.choose(rng).unwrap().clone(), RationalFunction::one())
            };
            let (a, b, c) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            assert_eq!(star_weyl(&star_weyl(&a, &b), &c), star_weyl(&a, &star_weyl(&b, &c)));
        }
    }

    #[test]
    fn bracket_weyl_examples() {
        let ctx = Context::symbolic(1, 3);
        // Γ ≻ Γ': ⟨ħ_Γ, ħ_{Γ'}⟩ = -q_c/(1+q_c²) ħ_{Γ'∨Γ}
        let br = bracket_weyl(&gen_e(&ctx, "2"), &gen_e(&ctx, "1"));
        let qc = ctx.q_pair(&lt("2"), &lt("1"));
        let z = RationalFunction::one().add(&qc.mul(&qc));
        let expected =
            ShadowElement::from_term(&ctx, Monomial::generator(lt("[1,2]")), qc.div(&z).neg());
        assert_eq!(br, expected);

        // all-ones specialization: coefficient -1/2
        let ones = Context::all_ones(1, 3);
        let br = bracket_weyl(&gen_e(&ones, "2"), &gen_e(&ones, "1"));
        let expected = ShadowElement::from_term(
            &ones,
            Monomial::generator(lt("[1,2]")),
            RationalFunction::from_rational(BigRational::new((-1).into(), 2.into())),
        );
        assert_eq!(br, expected);

        // unit is neutral for the star, so it brackets to zero
        assert!(bracket_weyl(&ShadowElement::unit(&ctx), &gen_e(&ctx, "1")).is_zero());
    }

    #[test]
    fn antisymmetrized_bracket_on_generators() {
        let ctx = Context::symbolic(2, 3);
        let gens = enumerate_positive(2, 2);
        for a in &gens {
            for b in &gens {
                if a >= b {
                    continue;
                }
                // Γ' ≺ Γ: the antisymmetrized bracket recovers concatenation
                let anti = bracket_weyl_antisym(
                    &ShadowElement::generator(&ctx, a),
                    &ShadowElement::generator(&ctx, b),
                );
                assert_eq!(anti, ShadowElement::generator(&ctx, &a.concat(b)), "{a},{b}");
            }
        }
        // built-in antisymmetry: ⟨a,b⟩₋ + q(b,a)⟨b,a⟩₋ = 0
        let a = gen_e(&ctx, "1").mul(&gen_e(&ctx, "3"));
        let b = gen_e(&ctx, "2");
        let q = swap_coeff(
            &ctx,
            &Monomial::generator(lt("2")),
            &Monomial::from_sorted(vec![lt("3"), lt("1")]),
        );
        let lhs = bracket_weyl_antisym(&a, &b);
        let rhs = bracket_weyl_antisym(&b, &a).scale(&q);
        assert!(lhs.add(&rhs).is_zero());
        // ⟨a,a⟩₋ = 0
        assert!(bracket_weyl_antisym(&a, &a).is_zero());
    }

    #[test]
    fn cocycle_identity_smoke() {
        let ctx = Context::symbolic(1, 3);
        let pool = monomials_up_to(&ctx, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..5 {
            let pick = |rng: &mut ChaCha8Rng| {
                ShadowElement::from_term(&ctx, pool.choose(rng).unwrap().clone(), RationalFunction::one())
            };
            let (u, v, w) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let lhs = u
                .mul(&bracket_weyl(&v, &w))
                .sub(&bracket_weyl(&u.mul(&v), &w))
                .add(&bracket_weyl(&u, &v.mul(&w)))
                .sub(&bracket_weyl(&u, &v).mul(&w));
            assert!(lhs.is_zero());
        }
    }

    #[test]
    fn degree_jump_annotation_sums_to_product() {
        let ctx = Context::symbolic(1, 3);
        let a = gen_e(&ctx, "1");
        let b = gen_e(&ctx, "2");
        let jumps = star_degree_jumps(&a, &b, star_normal);
        let total = jumps
            .iter()
            .fold(ShadowElement::zero(&ctx), |acc, (_, part)| acc.add(part));
        assert_eq!(total, star_normal(&a, &b));
        assert_eq!(jumps.len(), 2);
        assert_eq!(jumps[0].0, 0);
        assert_eq!(jumps[1].0, 1);
    }

    #[test]
    fn distortion_witness_found_at_trunc_three() {
        let ctx = Context::symbolic(1, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let report = distortion_witness(&ctx, 3, &mut rng);
        assert!(report.pass);
        let witness = report.witness.expect("witness must exist for N = 3");
        assert_eq!(witness.generator, "[1,2]");
        assert!(!report.lambda.uniform_lambda_exists);
    }

    #[test]
    fn distortion_vanishes_for_the_small_truncation_instance() {
        // at N = 2 the claim is out of regime: for u = h1 h2 the two sides agree
        let ctx = Context::symbolic(1, 2);
        let gen = lt("[1,2]");
        let u = gen_e(&ctx, "1").mul(&gen_e(&ctx, "2"));
        let lhs = weyl_w(&ShadowElement::generator(&ctx, &gen).mul(&u));
        let rhs = EnvelopeElement::generator(&ctx, &gen).mul(&weyl_w(&u));
        assert_eq!(lhs, rhs);
    }
}
