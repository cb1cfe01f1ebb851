//! Exact coefficient arithmetic: sparse Laurent polynomials in the variables
//! `q[i,j]` (one per pair `i < j` of letters), their fraction field, numeric
//! specializations, and the q-statistics attached to tree tuples and
//! permutations.
//!
//! Only `q[i,j]` with `i < j` is ever stored: `q[i,i] = 1` and
//! `q[j,i] = q[i,j]^-1` are folded in at construction.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::perm::Permutation;
use crate::trees::LabelledTree;

pub use crate::perm::shuffles;

/// Exponent vector of a Laurent monomial: sorted, no zero exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QExp {
    exps: Vec<((u32, u32), i64)>,
}

impl QExp {
    pub fn one() -> QExp {
        QExp::default()
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Single-variable exponent; `i` and `j` may come in either order.
    /// Returns the empty exponent for `i == j`.
    pub fn var(i: u32, j: u32, e: i64) -> QExp {
        assert!(i >= 1 && j >= 1, "letters start at 1");
        let mut exps = Vec::new();
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => {}
            std::cmp::Ordering::Less => exps.push(((i, j), e)),
            std::cmp::Ordering::Greater => exps.push(((j, i), -e)),
        }
        QExp { exps }.normalized()
    }

    fn normalized(mut self) -> QExp {
        self.exps.retain(|&(_, e)| e != 0);
        self
    }

    pub fn mul(&self, other: &QExp) -> QExp {
        let mut map: BTreeMap<(u32, u32), i64> = self.exps.iter().cloned().collect();
        for &(key, e) in &other.exps {
            *map.entry(key).or_insert(0) += e;
        }
        QExp { exps: map.into_iter().filter(|&(_, e)| e != 0).collect() }
    }

    pub fn inv(&self) -> QExp {
        QExp { exps: self.exps.iter().map(|&(k, e)| (k, -e)).collect() }
    }

    pub fn pow(&self, n: i64) -> QExp {
        QExp { exps: self.exps.iter().map(|&(k, e)| (k, e * n)).collect() }.normalized()
    }

    pub fn iter(&self) -> impl Iterator<Item = &((u32, u32), i64)> {
        self.exps.iter()
    }
}

/// A sparse Laurent polynomial with exact rational coefficients.
///
/// Zero coefficients are never stored, so derived equality is semantic.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPolynomial {
    terms: BTreeMap<QExp, BigRational>,
}

impl LaurentPolynomial {
    pub fn zero() -> LaurentPolynomial {
        LaurentPolynomial::default()
    }

    pub fn one() -> LaurentPolynomial {
        LaurentPolynomial::from_rational(BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> LaurentPolynomial {
        let mut terms = BTreeMap::new();
        if !r.is_zero() {
            terms.insert(QExp::one(), r);
        }
        LaurentPolynomial { terms }
    }

    pub fn from_int(n: i64) -> LaurentPolynomial {
        LaurentPolynomial::from_rational(BigRational::from(BigInt::from(n)))
    }

    /// The variable `q[i,j]`; arguments in either order, `q[i,i] = 1`.
    pub fn var(i: u32, j: u32) -> LaurentPolynomial {
        LaurentPolynomial::monomial(QExp::var(i, j, 1), BigRational::one())
    }

    pub fn monomial(exp: QExp, coeff: BigRational) -> LaurentPolynomial {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(exp, coeff);
        }
        LaurentPolynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().map(|r| r.is_one()).unwrap_or(false)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&QExp::one()) {
                return Some(c.clone());
            }
        }
        None
    }

    /// `Some((exp, coeff))` when the polynomial has exactly one term.
    pub fn as_monomial(&self) -> Option<(&QExp, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Largest exponent vector with its coefficient.
    pub fn leading_term(&self) -> Option<(&QExp, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn add(&self, other: &LaurentPolynomial) -> LaurentPolynomial {
        let mut terms = self.terms.clone();
        for (exp, c) in &other.terms {
            let entry = terms.entry(exp.clone()).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(exp);
            }
        }
        LaurentPolynomial { terms }
    }

    pub fn neg(&self) -> LaurentPolynomial {
        LaurentPolynomial { terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }

    pub fn sub(&self, other: &LaurentPolynomial) -> LaurentPolynomial {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &LaurentPolynomial) -> LaurentPolynomial {
        let mut terms: BTreeMap<QExp, BigRational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exp = ea.mul(eb);
                let entry = terms.entry(exp.clone()).or_insert_with(BigRational::zero);
                *entry += ca * cb;
                if entry.is_zero() {
                    terms.remove(&exp);
                }
            }
        }
        LaurentPolynomial { terms }
    }

    pub fn scale(&self, c: &BigRational) -> LaurentPolynomial {
        if c.is_zero() {
            return LaurentPolynomial::zero();
        }
        LaurentPolynomial { terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect() }
    }

    /// Exact division by a single term.
    pub fn div_monomial(&self, exp: &QExp, coeff: &BigRational) -> LaurentPolynomial {
        assert!(!coeff.is_zero(), "division by zero monomial");
        let inv = exp.inv();
        LaurentPolynomial { terms: self.terms.iter().map(|(e, c)| (e.mul(&inv), c / coeff)).collect() }
    }

    /// Inverse of a one-term polynomial.
    pub fn invert_monomial(&self) -> Option<LaurentPolynomial> {
        let (exp, coeff) = self.as_monomial()?;
        Some(LaurentPolynomial::monomial(exp.inv(), coeff.recip()))
    }

    /// Ring homomorphism into the rationals given by a specialization.
    pub fn evaluate(&self, spec: &Specialization) -> BigRational {
        let mut total = BigRational::zero();
        for (exp, c) in &self.terms {
            let mut term = c.clone();
            for &((i, j), e) in exp.iter() {
                term *= rational_pow(spec.value(i, j), e);
            }
            total += term;
        }
        total
    }
}

fn rational_pow(base: BigRational, e: i64) -> BigRational {
    base.pow(e as i32)
}

/// Componentwise minimum exponent across every term of both polynomials;
/// dividing by it removes their common monomial factor canonically.
fn common_min_exponent(a: &LaurentPolynomial, b: &LaurentPolynomial) -> QExp {
    let mut vars: Vec<(u32, u32)> = Vec::new();
    for poly in [a, b] {
        for (exp, _) in &poly.terms {
            for &(key, _) in exp.iter() {
                if !vars.contains(&key) {
                    vars.push(key);
                }
            }
        }
    }
    let mut mins: BTreeMap<(u32, u32), i64> = vars.iter().map(|&k| (k, i64::MAX)).collect();
    for poly in [a, b] {
        for (exp, _) in &poly.terms {
            for &key in &vars {
                let e = exp.iter().find(|&&(k, _)| k == key).map(|&(_, e)| e).unwrap_or(0);
                let entry = mins.get_mut(&key).unwrap();
                *entry = (*entry).min(e);
            }
        }
    }
    let mut out = QExp::one();
    for (key, e) in mins {
        if e != 0 {
            out = out.mul(&QExp { exps: vec![(key, e)] });
        }
    }
    out
}

fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (exp, coeff) in &self.terms {
            let negative = coeff.is_negative();
            let abs = coeff.abs();
            if first {
                if negative {
                    write!(f, "-")?;
                }
                first = false;
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut printed = false;
            if !abs.is_one() || exp.is_one() {
                write!(f, "{}", format_rational(&abs))?;
                printed = true;
            }
            for &((i, j), e) in exp.iter() {
                if printed {
                    write!(f, " ")?;
                }
                if e == 1 {
                    write!(f, "q[{i},{j}]")?;
                } else {
                    write!(f, "q[{i},{j}]^{e}")?;
                }
                printed = true;
            }
        }
        Ok(())
    }
}

/// An element of the fraction field, kept as a numerator/denominator pair.
///
/// The denominator is normalized so its leading term is 1; equality is
/// decided by cross-multiplication, so no polynomial gcd is needed.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: LaurentPolynomial,
    den: LaurentPolynomial,
}

impl RationalFunction {
    pub fn new(num: LaurentPolynomial, den: LaurentPolynomial) -> RationalFunction {
        assert!(!den.is_zero(), "zero denominator");
        let mut rf = RationalFunction { num, den };
        rf.normalize();
        rf
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = LaurentPolynomial::one();
            return;
        }
        let lcoeff = self.den.leading_term().expect("nonzero denominator").1.clone();
        if !lcoeff.is_one() {
            self.num = self.num.div_monomial(&QExp::one(), &lcoeff);
            self.den = self.den.div_monomial(&QExp::one(), &lcoeff);
        }
        let shift = common_min_exponent(&self.num, &self.den);
        if !shift.is_one() {
            self.num = self.num.div_monomial(&shift, &BigRational::one());
            self.den = self.den.div_monomial(&shift, &BigRational::one());
        }
        // cheap reduction: numerator a term-multiple of the denominator
        if self.num.num_terms() == self.den.num_terms() {
            let ratio = {
                let (ne, nc) = self.num.leading_term().expect("nonzero numerator");
                let (de, dc) = self.den.leading_term().expect("nonzero denominator");
                LaurentPolynomial::monomial(ne.mul(&de.inv()), nc / dc)
            };
            if self.den.mul(&ratio) == self.num {
                self.num = ratio;
                self.den = LaurentPolynomial::one();
            }
        }
    }

    pub fn zero() -> RationalFunction {
        RationalFunction { num: LaurentPolynomial::zero(), den: LaurentPolynomial::one() }
    }

    pub fn one() -> RationalFunction {
        RationalFunction { num: LaurentPolynomial::one(), den: LaurentPolynomial::one() }
    }

    pub fn from_poly(p: LaurentPolynomial) -> RationalFunction {
        RationalFunction { num: p, den: LaurentPolynomial::one() }
    }

    pub fn from_rational(r: BigRational) -> RationalFunction {
        RationalFunction::from_poly(LaurentPolynomial::from_rational(r))
    }

    pub fn from_int(n: i64) -> RationalFunction {
        RationalFunction::from_poly(LaurentPolynomial::from_int(n))
    }

    pub fn numerator(&self) -> &LaurentPolynomial {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPolynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// `Some(c)` when the fraction is a constant.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        if self.den.is_one() {
            return self.num.as_rational();
        }
        None
    }

    /// `Some(monomial)` when the fraction reduces to a single Laurent term.
    pub fn as_monomial_poly(&self) -> Option<LaurentPolynomial> {
        let num_mono = self.num.as_monomial()?;
        let den_mono = self.den.as_monomial()?;
        let exp = num_mono.0.mul(&den_mono.0.inv());
        Some(LaurentPolynomial::monomial(exp, num_mono.1 / den_mono.1))
    }

    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        if self.den == other.den {
            return RationalFunction::new(self.num.add(&other.num), self.den.clone());
        }
        RationalFunction::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &RationalFunction) -> RationalFunction {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        RationalFunction::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn invert(&self) -> RationalFunction {
        assert!(!self.is_zero(), "division by zero");
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RationalFunction) -> RationalFunction {
        self.mul(&other.invert())
    }

    pub fn scale(&self, c: &BigRational) -> RationalFunction {
        RationalFunction::new(self.num.scale(c), self.den.clone())
    }

    pub fn evaluate(&self, spec: &Specialization) -> Option<BigRational> {
        let den = self.den.evaluate(spec);
        if den.is_zero() {
            return None;
        }
        Some(self.num.evaluate(spec) / den)
    }
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }
}

impl Eq for RationalFunction {}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

/// Evaluation point assigning a positive rational to every `q[i,j]`, `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Specialization {
    values: BTreeMap<(u32, u32), BigRational>,
}

impl Specialization {
    pub fn new(values: BTreeMap<(u32, u32), BigRational>) -> Specialization {
        for ((i, j), v) in &values {
            assert!(i < j, "specialization keys must have i < j");
            assert!(v.is_positive(), "specialization values must be positive");
        }
        Specialization { values }
    }

    /// Every variable set to 1: the classical (undeformed) point.
    pub fn all_ones(d: u32) -> Specialization {
        let mut values = BTreeMap::new();
        for i in 1..=2 * d {
            for j in (i + 1)..=2 * d {
                values.insert((i, j), BigRational::one());
            }
        }
        Specialization { values }
    }

    /// Independent positive rationals with numerator and denominator in `1..=9`.
    pub fn random<R: rand::Rng>(d: u32, rng: &mut R) -> Specialization {
        let mut values = BTreeMap::new();
        for i in 1..=2 * d {
            for j in (i + 1)..=2 * d {
                let numer = rng.gen_range(1..=9i64);
                let denom = rng.gen_range(1..=9i64);
                values.insert((i, j), BigRational::new(BigInt::from(numer), BigInt::from(denom)));
            }
        }
        Specialization { values }
    }

    /// Value of `q[i,j]` for arbitrary letter order.
    pub fn value(&self, i: u32, j: u32) -> BigRational {
        match i.cmp(&j) {
            std::cmp::Ordering::Equal => BigRational::one(),
            std::cmp::Ordering::Less => self
                .values
                .get(&(i, j))
                .unwrap_or_else(|| panic!("specialization missing q[{i},{j}]"))
                .clone(),
            std::cmp::Ordering::Greater => self.value(j, i).recip(),
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.values.iter()
    }
}

/// The pairing `q_{Γ,Γ'}`: product of `q[a,b]` over all leaf-label pairs
/// `(a, b)` with `a` from the first tree and `b` from the second.
pub fn q_pair(a: &LabelledTree, b: &LabelledTree) -> LaurentPolynomial {
    let mut exp = QExp::one();
    for la in a.labels() {
        for lb in b.labels() {
            exp = exp.mul(&QExp::var(la, lb, 1));
        }
    }
    LaurentPolynomial::monomial(exp, BigRational::one())
}

/// The reordering coefficient `q(Γ̃, σ)`: the unique monomial making the
/// permuted generator product equal to this multiple of the unpermuted one.
///
/// Computed as the product of `q_{Γ_i, Γ_j}` over position pairs `i < j`
/// inverted by `σ` (this orientation is the one validated against the
/// sorting oracle; see the tests).
pub fn q_perm(gs: &[LabelledTree], s: &Permutation) -> LaurentPolynomial {
    assert_eq!(gs.len(), s.len(), "tuple and permutation sizes differ");
    let inv = s.inverse();
    let mut exp = QExp::one();
    for i in 0..gs.len() {
        for j in (i + 1)..gs.len() {
            if inv.apply(i) > inv.apply(j) {
                if let Some((pair_exp, _)) = q_pair(&gs[i], &gs[j]).as_monomial() {
                    exp = exp.mul(pair_exp);
                }
            }
        }
    }
    LaurentPolynomial::monomial(exp, BigRational::one())
}

/// The normalizer `Z_n(Γ̃) = Σ_σ q(Γ̃, σ)^2`; strictly positive under any
/// positive specialization.
pub fn partition_z(gs: &[LabelledTree]) -> LaurentPolynomial {
    let mut total = LaurentPolynomial::zero();
    for s in Permutation::all(gs.len()) {
        let qp = q_perm(gs, &s);
        let (exp, _) = qp.as_monomial().expect("q_perm is a monomial");
        let sq = LaurentPolynomial::monomial(exp.pow(2), BigRational::one());
        total = total.add(&sq);
    }
    total
}

/// The symmetrization coefficient `q(Γ̃, σ) / Z_n(Γ̃)`.
pub fn weyl_coeff(gs: &[LabelledTree], s: &Permutation) -> RationalFunction {
    RationalFunction::new(q_perm(gs, s), partition_z(gs))
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

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Sorting oracle: the coefficient relating the permuted word to the
    /// base word, computed by bubbling factors with the two-generator swap
    /// relation only. Independent of the closed inversion formula.
    fn sort_oracle(gs: &[LabelledTree], s: &Permutation) -> LaurentPolynomial {
        let mut word: Vec<LabelledTree> = s.permute(gs);
        let mut coeff = LaurentPolynomial::one();
        // transform `word` back into `gs`, front to back
        for target in 0..gs.len() {
            let found = (target..word.len())
                .find(|&k| word[k] == gs[target])
                .expect("same multiset");
            for k in (target + 1..=found).rev() {
                // word[k] moves left past word[k-1]:
                // h_x h_y = q_pair(y, x) h_y h_x with x = word[k-1], y = word[k]
                coeff = coeff.mul(&q_pair(&word[k], &word[k - 1]));
                word.swap(k - 1, k);
            }
        }
        assert_eq!(word, gs);
        coeff
    }

    #[test]
    fn q_pair_examples() {
        assert_eq!(q_pair(&lt("1"), &lt("2")), LaurentPolynomial::var(1, 2));
        assert!(q_pair(&lt("[1,2]"), &lt("[1,2]")).is_one());
        let expected = LaurentPolynomial::var(1, 3).mul(&LaurentPolynomial::var(2, 3));
        assert_eq!(q_pair(&lt("[1,2]"), &lt("3")), expected);
        // inverse law
        for a in enumerate_positive(2, 2) {
            for b in enumerate_positive(2, 2) {
                assert!(q_pair(&a, &b).mul(&q_pair(&b, &a)).is_one());
            }
        }
    }

    #[test]
    fn q_perm_matches_sorting_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pool = enumerate_positive(2, 3);
        for n in 1..=4usize {
            for _ in 0..10 {
                let gs: Vec<LabelledTree> =
                    (0..n).map(|_| pool.choose(&mut rng).unwrap().clone()).collect();
                for s in Permutation::all(n) {
                    assert_eq!(q_perm(&gs, &s), sort_oracle(&gs, &s), "gs={gs:?} s={s}");
                }
            }
        }
    }

    #[test]
    fn q_perm_examples() {
        let gs = vec![lt("1"), lt("[1,2]")];
        assert!(q_perm(&gs, &Permutation::identity(2)).is_one());
        let swap = Permutation::transposition(2, 0, 1);
        let ij = vec![lt("3"), lt("4")];
        assert_eq!(q_perm(&ij, &swap), LaurentPolynomial::var(3, 4));
    }

    #[test]
    fn q_perm_cocycle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let pool = enumerate_positive(2, 2);
        for n in 2..=5usize {
            for _ in 0..8 {
                let gs: Vec<LabelledTree> =
                    (0..n).map(|_| pool.choose(&mut rng).unwrap().clone()).collect();
                let perms = Permutation::all(n);
                let sigma = perms.choose(&mut rng).unwrap();
                let tau = perms.choose(&mut rng).unwrap();
                let lhs = q_perm(&gs, &sigma.compose(tau));
                let rhs = q_perm(&gs, sigma).mul(&q_perm(&sigma.permute(&gs), tau));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn partition_z_examples() {
        // two distinct leaves: 1 + q[i,j]^2
        let z = partition_z(&[lt("1"), lt("2")]);
        let expected = LaurentPolynomial::one()
            .add(&LaurentPolynomial::monomial(QExp::var(1, 2, 2), BigRational::one()));
        assert_eq!(z, expected);
        // all factors equal: n!
        let z = partition_z(&[lt("1"), lt("1"), lt("1")]);
        assert_eq!(z, LaurentPolynomial::from_int(6));
        // all-ones specialization: n!
        let z = partition_z(&[lt("1"), lt("2"), lt("[1,2]")]);
        assert_eq!(z.evaluate(&Specialization::all_ones(1)), rat(6, 1));
    }

    #[test]
    fn weyl_coeff_classical_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let pool = enumerate_positive(2, 2);
        for n in 1..=4usize {
            let gs: Vec<LabelledTree> =
                (0..n).map(|_| pool.choose(&mut rng).unwrap().clone()).collect();
            let mut total = RationalFunction::zero();
            for s in Permutation::all(n) {
                total = total.add(&weyl_coeff(&gs, &s).mul(&RationalFunction::from_poly(q_perm(&gs, &s))));
            }
            assert!(total.is_one(), "n = {n}");
        }
    }

    #[test]
    fn weyl_coeff_all_ones_is_uniform() {
        let spec = Specialization::all_ones(1);
        let gs = vec![lt("2"), lt("1"), lt("[1,2]")];
        for s in Permutation::all(3) {
            let c = weyl_coeff(&gs, &s).evaluate(&spec).unwrap();
            assert_eq!(c, rat(1, 6));
        }
    }

    #[test]
    fn weyl_coeff_transform_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let pool = enumerate_positive(1, 2);
        for n in 2..=4usize {
            let gs: Vec<LabelledTree> =
                (0..n).map(|_| pool.choose(&mut rng).unwrap().clone()).collect();
            let perms = Permutation::all(n);
            let tau = perms.choose(&mut rng).unwrap();
            let sigma = perms.choose(&mut rng).unwrap();
            let lhs = weyl_coeff(&tau.permute(&gs), &tau.inverse().compose(sigma));
            let rhs = weyl_coeff(&gs, sigma).mul(&RationalFunction::from_poly(q_perm(&gs, tau)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn arithmetic_basics() {
        let q = LaurentPolynomial::var(1, 2);
        let qinv = q.invert_monomial().unwrap();
        assert!(q.mul(&qinv).is_one());
        assert_eq!(LaurentPolynomial::var(2, 1), qinv);

        let p = LaurentPolynomial::one().add(&q.mul(&q));
        let spec = Specialization::new([((1, 2), rat(2, 1))].into_iter().collect());
        assert_eq!(p.evaluate(&spec), rat(5, 1));
    }

    #[test]
    fn evaluate_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = Specialization::random(2, &mut rng);
        let pool = enumerate_positive(2, 2);
        for _ in 0..20 {
            let a = q_pair(pool.choose(&mut rng).unwrap(), pool.choose(&mut rng).unwrap())
                .add(&LaurentPolynomial::from_int(rng.gen_range(-3..=3)));
            let b = q_pair(pool.choose(&mut rng).unwrap(), pool.choose(&mut rng).unwrap())
                .sub(&LaurentPolynomial::from_int(rng.gen_range(0..=2)));
            assert_eq!(a.mul(&b).evaluate(&spec), a.evaluate(&spec) * b.evaluate(&spec));
            assert_eq!(a.add(&b).evaluate(&spec), a.evaluate(&spec) + b.evaluate(&spec));
        }
    }

    #[test]
    fn fraction_field_laws() {
        let q12 = LaurentPolynomial::var(1, 2);
        let q13 = LaurentPolynomial::var(1, 3);
        let a = RationalFunction::new(q12.add(&LaurentPolynomial::one()), q13.clone());
        let b = RationalFunction::new(
            q12.add(&LaurentPolynomial::one()).mul(&q12),
            q13.mul(&q12),
        );
        // a/b = c/d iff ad = cb: here the two should be equal
        assert_eq!(a, b);
        assert!(a.sub(&b).is_zero());
        assert!(a.mul(&a.invert()).is_one());
        let sum = a.add(&b);
        assert_eq!(sum, a.scale(&rat(2, 1)));
    }

    #[test]
    fn display_formats() {
        let q12 = LaurentPolynomial::var(1, 2);
        let m = LaurentPolynomial::monomial(
            QExp::var(1, 2, -1).mul(&QExp::var(1, 3, 2)),
            rat(3, 2),
        );
        assert_eq!(m.to_string(), "3/2 q[1,2]^-1 q[1,3]^2");
        assert_eq!(q12.to_string(), "q[1,2]");
        assert_eq!(LaurentPolynomial::one().to_string(), "1");
        assert_eq!(LaurentPolynomial::zero().to_string(), "0");
        assert_eq!(q12.neg().sub(&LaurentPolynomial::one()).to_string(), "-1 - q[1,2]");
        let rf = RationalFunction::new(LaurentPolynomial::one(), LaurentPolynomial::one().add(&q12));
        assert_eq!(rf.to_string(), "(1)/(1 + q[1,2])");
    }
}
