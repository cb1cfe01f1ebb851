//! Text grammar for algebra elements.
//!
//! ```text
//! element := ['-'] term (('+' | '-') term)*
//! term    := coeff ['*' gens] | gens
//! gens    := gen+
//! gen     := 'h' '[' guts ']'        guts := label | tree ',' tree
//! coeff   := [rational] qfactor* | '(' poly ')' '/' '(' poly ')'
//! qfactor := 'q' '[' label ',' label ']' ['^' int]
//! poly    := ['-'] pterm (('+' | '-') pterm)*     pterm := [rational] qfactor*
//! tree    := label | '[' tree ',' tree ']'
//! ```
//!
//! Parsing canonicalizes every generator: trees with equal branches become
//! zero and trees beyond the truncation are dropped, both with a warning.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::algebra::{
    normal_order, shadow_sort, CoeffMode, Context, Element, EnvelopeElement, ShadowElement,
};
use crate::coeffs::{LaurentPolynomial, QExp, RationalFunction};
use crate::trees::{parse_label, parse_tree, LabelledTree, TreeError};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Cursor<'a> {
        Cursor { bytes: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn peek2(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos + 1).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.bytes.get(self.pos).copied();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    fn expect(&mut self, b: u8) -> Result<(), TreeError> {
        self.skip_ws();
        if self.bytes.get(self.pos) == Some(&b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", b as char)))
        }
    }

    fn error(&self, msg: &str) -> TreeError {
        TreeError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.bytes.len()
    }
}

fn parse_integer(cur: &mut Cursor) -> Result<BigInt, TreeError> {
    cur.skip_ws();
    let mut negative = false;
    if cur.peek() == Some(b'-') {
        negative = true;
        cur.bump();
    }
    let start = cur.pos;
    while cur.pos < cur.bytes.len() && cur.bytes[cur.pos].is_ascii_digit() {
        cur.pos += 1;
    }
    if start == cur.pos {
        return Err(cur.error("expected integer"));
    }
    let text = std::str::from_utf8(&cur.bytes[start..cur.pos]).unwrap();
    let mut value: BigInt = text.parse().map_err(|_| cur.error("bad integer"))?;
    if negative {
        value = -value;
    }
    Ok(value)
}

fn parse_rational(cur: &mut Cursor) -> Result<BigRational, TreeError> {
    let numer = parse_integer(cur)?;
    if cur.peek() == Some(b'/') {
        cur.bump();
        let denom = parse_integer(cur)?;
        if denom == BigInt::from(0) {
            return Err(cur.error("zero denominator"));
        }
        Ok(BigRational::new(numer, denom))
    } else {
        Ok(BigRational::from_integer(numer))
    }
}

/// `q [ i , j ] [^ e]`; assumes the caller saw `q [`.
fn parse_qfactor(cur: &mut Cursor) -> Result<QExp, TreeError> {
    cur.expect(b'q')?;
    cur.expect(b'[')?;
    cur.skip_ws();
    let i = parse_label(cur.bytes, &mut cur.pos)?;
    cur.expect(b',')?;
    cur.skip_ws();
    let j = parse_label(cur.bytes, &mut cur.pos)?;
    cur.expect(b']')?;
    let mut exp = 1i64;
    if cur.peek() == Some(b'^') {
        cur.bump();
        let e = parse_integer(cur)?;
        exp = i64::try_from(e).map_err(|_| cur.error("exponent too large"))?;
    }
    if i == j {
        return Ok(QExp::one());
    }
    Ok(QExp::var(i, j, exp))
}

fn at_qfactor(cur: &mut Cursor) -> bool {
    cur.peek() == Some(b'q') && cur.peek2() == Some(b'[')
}

/// One product `[rational] qfactor*` with an optional leading sign already
/// consumed by the caller.
fn parse_poly_term(cur: &mut Cursor) -> Result<LaurentPolynomial, TreeError> {
    let mut coeff = BigRational::one();
    let mut saw_anything = false;
    if matches!(cur.peek(), Some(b'0'..=b'9') | Some(b'-')) {
        coeff = parse_rational(cur)?;
        saw_anything = true;
    }
    let mut exp = QExp::one();
    while at_qfactor(cur) {
        exp = exp.mul(&parse_qfactor(cur)?);
        saw_anything = true;
        cur.skip_ws();
    }
    if !saw_anything {
        return Err(cur.error("expected coefficient"));
    }
    Ok(LaurentPolynomial::monomial(exp, coeff))
}

fn parse_poly(cur: &mut Cursor) -> Result<LaurentPolynomial, TreeError> {
    let mut total = LaurentPolynomial::zero();
    let mut negate = false;
    if cur.peek() == Some(b'-') {
        // leading sign folds into the first term's rational if present;
        // handled here so `-q[1,2]` parses too
        negate = true;
        cur.bump();
    }
    loop {
        let mut term = parse_poly_term(cur)?;
        if negate {
            term = term.neg();
        }
        total = total.add(&term);
        match cur.peek() {
            Some(b'+') => {
                cur.bump();
                negate = false;
            }
            Some(b'-') => {
                cur.bump();
                negate = true;
            }
            _ => break,
        }
    }
    Ok(total)
}

/// Parses a standalone polynomial (the JSON coefficient encoding).
pub fn parse_poly_text(src: &str) -> Result<LaurentPolynomial, TreeError> {
    let mut cur = Cursor::new(src);
    let poly = parse_poly(&mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("trailing input"));
    }
    Ok(poly)
}

/// `( poly ) / ( poly )` or `[rational] qfactor*`.
fn parse_coeff(cur: &mut Cursor) -> Result<RationalFunction, TreeError> {
    if cur.peek() == Some(b'(') {
        cur.bump();
        let num = parse_poly(cur)?;
        cur.expect(b')')?;
        cur.expect(b'/')?;
        cur.expect(b'(')?;
        let den = parse_poly(cur)?;
        cur.expect(b')')?;
        if den.is_zero() {
            return Err(cur.error("zero denominator"));
        }
        return Ok(RationalFunction::new(num, den));
    }
    parse_poly_term(cur).map(RationalFunction::from_poly)
}

/// `h[ guts ]` with `guts := label | tree ',' tree`.
fn parse_generator(cur: &mut Cursor) -> Result<LabelledTree, TreeError> {
    cur.expect(b'h')?;
    cur.expect(b'[')?;
    cur.skip_ws();
    let first = parse_tree(cur.bytes, &mut cur.pos)?;
    cur.skip_ws();
    if cur.peek() == Some(b',') {
        cur.bump();
        let second = parse_tree(cur.bytes, &mut cur.pos)?;
        cur.expect(b']')?;
        Ok(LabelledTree::node(first, second))
    } else {
        cur.expect(b']')?;
        match first {
            LabelledTree::Leaf(_) => Ok(first),
            _ => Err(cur.error("composite generator needs two subtrees")),
        }
    }
}

fn at_generator(cur: &mut Cursor) -> bool {
    cur.peek() == Some(b'h') && cur.peek2() == Some(b'[')
}

struct RawTerm {
    coeff: RationalFunction,
    gens: Vec<LabelledTree>,
}

fn parse_term(cur: &mut Cursor) -> Result<RawTerm, TreeError> {
    let mut coeff = RationalFunction::one();
    if !at_generator(cur) {
        coeff = parse_coeff(cur)?;
        if cur.peek() == Some(b'*') {
            cur.bump();
        }
    }
    let mut gens = Vec::new();
    while at_generator(cur) {
        gens.push(parse_generator(cur)?);
        cur.skip_ws();
    }
    Ok(RawTerm { coeff, gens })
}

fn parse_raw_element(src: &str) -> Result<Vec<(bool, RawTerm)>, TreeError> {
    let mut cur = Cursor::new(src);
    let mut out = Vec::new();
    let mut negate = false;
    if cur.peek() == Some(b'-') {
        negate = true;
        cur.bump();
    }
    if cur.at_end() {
        return Err(cur.error("empty element"));
    }
    // the literal "0"
    if cur.peek() == Some(b'0') {
        let save = cur.pos;
        cur.bump();
        if cur.at_end() {
            return Ok(Vec::new());
        }
        cur.pos = save;
    }
    loop {
        let term = parse_term(&mut cur)?;
        out.push((negate, term));
        match cur.peek() {
            Some(b'+') => {
                cur.bump();
                negate = false;
            }
            Some(b'-') => {
                cur.bump();
                negate = true;
            }
            None => break,
            _ => return Err(cur.error("expected '+', '-', or end of input")),
        }
    }
    Ok(out)
}

fn assemble<K, F>(
    ctx: &Context,
    src: &str,
    mut combine: F,
) -> Result<(Element<K>, Vec<String>), TreeError>
where
    F: FnMut(&Context, &[LabelledTree], RationalFunction) -> Element<K>,
{
    let raw = parse_raw_element(src)?;
    let mut warnings = Vec::new();
    let mut out = Element::zero(ctx);
    for (negate, term) in raw {
        let mut coeff = term.coeff;
        if negate {
            coeff = coeff.neg();
        }
        if let CoeffMode::Specialized(spec) = ctx.mode() {
            let v = coeff
                .evaluate(spec)
                .ok_or_else(|| TreeError::Parse { pos: 0, msg: "denominator vanishes at specialization".into() })?;
            coeff = RationalFunction::from_rational(v);
        }
        let mut word = Vec::new();
        let mut dropped = false;
        for gen in &term.gens {
            gen.validate_labels(ctx.d())?;
            if gen.leaf_count() > ctx.trunc() {
                warnings.push(format!(
                    "generator {} exceeds truncation level {} and was truncated to zero",
                    crate::algebra::format_generator(gen),
                    ctx.trunc()
                ));
                dropped = true;
                break;
            }
            let canon = ctx.canonicalize(gen);
            match canon.tree {
                None => {
                    warnings.push(format!(
                        "generator {} is zero (equal canonical branches)",
                        crate::algebra::format_generator(gen)
                    ));
                    dropped = true;
                    break;
                }
                Some(tree) => {
                    coeff = coeff.mul(&canon.coeff);
                    word.push(tree);
                }
            }
        }
        if dropped {
            continue;
        }
        out = out.add(&combine(ctx, &word, coeff));
    }
    Ok((out, warnings))
}

/// Parses into the classical shadow (q-commutative sort).
pub fn parse_shadow(src: &str, ctx: &Context) -> Result<(ShadowElement, Vec<String>), TreeError> {
    assemble(ctx, src, |ctx, word, coeff| {
        let (swap, mono) = shadow_sort(ctx, word);
        ShadowElement::from_term(ctx, mono, coeff.mul(&swap))
    })
}

/// Parses into the bracketing algebra (normal ordering).
pub fn parse_envelope(src: &str, ctx: &Context) -> Result<(EnvelopeElement, Vec<String>), TreeError> {
    assemble(ctx, src, |ctx, word, coeff| normal_order(ctx, word, coeff))
}
