//! Multivariate polynomials with exact rational coefficients: canonical
//! term maps, graded-lex ordering, a small expression parser, and exact
//! division by a single divisor (all we need to certify factorizations).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{schema, Result};

/// Exponent map, no zero entries; the empty map is the constant monomial.
pub type Monomial = BTreeMap<String, u32>;

fn mono_degree(m: &Monomial) -> u32 {
    m.values().sum()
}

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = a.clone();
    for (v, e) in b {
        *out.entry(v.clone()).or_insert(0) += e;
    }
    out
}

fn mono_div(a: &Monomial, b: &Monomial) -> Option<Monomial> {
    let mut out = a.clone();
    for (v, e) in b {
        let have = out.get_mut(v)?;
        if *have < *e {
            return None;
        }
        *have -= e;
        if *have == 0 {
            out.remove(v);
        }
    }
    Some(out)
}

/// Graded lexicographic order: total degree first, then alphabetically
/// earlier variables with higher exponents come first. Multiplicative, so
/// leading terms multiply, which is what exact division leans on.
fn mono_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    match mono_degree(a).cmp(&mono_degree(b)) {
        Ordering::Equal => {}
        o => return o,
    }
    let vars: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    for v in vars {
        let ea = a.get(v).copied().unwrap_or(0);
        let eb = b.get(v).copied().unwrap_or(0);
        match ea.cmp(&eb) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::new(), c);
        }
        Poly { terms }
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(BigRational::from(BigInt::from(n)))
    }

    pub fn var(name: &str) -> Self {
        let mut m = Monomial::new();
        m.insert(name.to_string(), 1);
        let mut terms = BTreeMap::new();
        terms.insert(m, BigRational::one());
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Total degree; None for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(mono_degree).max()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.terms.keys().flat_map(|m| m.keys().cloned()).collect()
    }

    /// The constant this polynomial is, if it is one.
    pub fn as_constant(&self) -> Option<BigRational> {
        if self.terms.is_empty() {
            return Some(BigRational::zero());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&Monomial::new()) {
                return Some(c.clone());
            }
        }
        None
    }

    fn insert_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().max_by(|a, b| mono_cmp(a.0, b.0))
    }

    /// The exact quotient self / d, or None when d is zero or does not
    /// divide. Exactness makes single-divisor division decisive: under a
    /// multiplicative monomial order the leading term of a product is the
    /// product of leading terms, so a non-dividing leading term settles it.
    pub fn divide_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading_term()?;
        let mut rem = self.clone();
        let mut q = Poly::zero();
        while let Some((rm, rc)) = rem.leading_term() {
            let m = mono_div(rm, dm)?;
            let c = rc / dc;
            let mut t = Poly::zero();
            t.insert_term(m, c);
            rem = &rem - &(&t * d);
            q = &q + &t;
        }
        Some(q)
    }

    pub fn divisible_by(&self, d: &Poly) -> bool {
        self.divide_exact(d).is_some()
    }

    /// Normal form modulo a single nonzero divisor: repeatedly cancels the
    /// largest term divisible by the divisor's leading term. A single
    /// polynomial generates a principal ideal whose leading-term ideal is
    /// generated by its own leading term, so this remainder is zero exactly
    /// when the divisor divides.
    pub fn rem_mod(&self, d: &Poly) -> Poly {
        let Some((dm, dc)) = d.leading_term() else {
            return self.clone();
        };
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        loop {
            let target = rem
                .terms
                .iter()
                .filter(|(m, _)| mono_div(m, &dm).is_some())
                .max_by(|a, b| mono_cmp(a.0, b.0))
                .map(|(m, c)| (m.clone(), c.clone()));
            match target {
                None => return rem,
                Some((m, c)) => {
                    let mut t = Poly::zero();
                    t.insert_term(mono_div(&m, &dm).unwrap(), &c / &dc);
                    rem = &rem - &(&t * d);
                }
            }
        }
    }

    /// Parses expressions like "x^2 + 2*x*y - 1/3" (sums, products, powers,
    /// parentheses, integer and rational constants).
    pub fn parse(input: &str) -> Result<Poly> {
        let tokens = tokenize(input)?;
        let mut p = Parser { tokens, pos: 0, input };
        let poly = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(schema(format!(
                "unexpected trailing input in polynomial \"{input}\""
            )));
        }
        Ok(poly)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert_term(mono_mul(ma, mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<(&Monomial, &BigRational)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| mono_cmp(b.0, a.0));
        for (i, (m, c)) in ordered.iter().enumerate() {
            let negative = c.is_negative();
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let abs = c.abs();
            let mono = m
                .iter()
                .map(|(v, e)| if *e == 1 { v.clone() } else { format!("{v}^{e}") })
                .collect::<Vec<_>>()
                .join("*");
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{abs}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Poly::parse(&s).map_err(|e| D::Error::custom(format!("{e}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Var(String),
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(input: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = input.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let numer: String = chars[start..i].iter().collect();
                let mut denom = String::from("1");
                if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                    i += 1;
                    let dstart = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    denom = chars[dstart..i].iter().collect();
                }
                let n = BigInt::from_str(&numer)
                    .map_err(|e| schema(format!("bad integer \"{numer}\": {e}")))?;
                let d = BigInt::from_str(&denom)
                    .map_err(|e| schema(format!("bad integer \"{denom}\": {e}")))?;
                if d.is_zero() {
                    return Err(schema(format!("zero denominator in \"{input}\"")));
                }
                out.push(Tok::Num(BigRational::new(n, d)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                {
                    i += 1;
                }
                out.push(Tok::Var(chars[start..i].iter().collect()));
            }
            other => {
                return Err(schema(format!(
                    "unexpected character '{other}' in polynomial \"{input}\""
                )))
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    input: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        while let Some(tok) = self.peek() {
            match tok {
                Tok::Plus => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.factor()?;
        while let Some(Tok::Star) = self.peek() {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly> {
        let base = self.base()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.tokens.get(self.pos) {
                Some(Tok::Num(r)) if r.is_integer() && !r.is_negative() => {
                    self.pos += 1;
                    let e: u32 = r.to_integer().try_into().map_err(|_| {
                        schema(format!("exponent too large in \"{}\"", self.input))
                    })?;
                    return Ok(base.pow(e));
                }
                _ => {
                    return Err(schema(format!(
                        "expected a nonnegative integer exponent in \"{}\"",
                        self.input
                    )))
                }
            }
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Poly> {
        match self.tokens.get(self.pos).cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(Poly::constant(r))
            }
            Some(Tok::Var(v)) => {
                self.pos += 1;
                Ok(Poly::var(&v))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(schema(format!("missing ')' in \"{}\"", self.input))),
                }
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-&self.factor()?)
            }
            _ => Err(schema(format!(
                "expected a number, variable, or '(' in \"{}\"",
                self.input
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(p("x^2 + 2*x*y - 1/3").to_string(), "x^2 + 2*x*y - 1/3");
        assert_eq!(p("0").to_string(), "0");
        assert_eq!(p("-x").to_string(), "-x");
        assert_eq!(p("y + x").to_string(), "x + y");
        assert_eq!(p("(x + 1)*(x - 1)").to_string(), "x^2 - 1");
        assert_eq!(p("2^3").to_string(), "8");
        assert_eq!(p("x - x").to_string(), "0");
        assert_eq!(p("3/6").to_string(), "1/2");
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Poly::parse("x +").is_err());
        assert!(Poly::parse("x^y").is_err());
        assert!(Poly::parse("(x").is_err());
        assert!(Poly::parse("x$").is_err());
        assert!(Poly::parse("1/0").is_err());
    }

    #[test]
    fn arithmetic_identities() {
        let x = Poly::var("x");
        let y = Poly::var("y");
        let lhs = &(&x + &y) * &(&x - &y);
        let rhs = &(&x * &x) - &(&y * &y);
        assert_eq!(lhs, rhs);
        assert_eq!((&x - &x), Poly::zero());
        assert_eq!(x.pow(0), Poly::one());
        assert_eq!(p("x + y").pow(2).to_string(), "x^2 + 2*x*y + y^2");
    }

    #[test]
    fn degrees_and_variables() {
        assert_eq!(Poly::zero().degree(), None);
        assert_eq!(Poly::one().degree(), Some(0));
        assert_eq!(p("x^2*y + z").degree(), Some(3));
        let vars = p("x^2*y + z").variables();
        assert_eq!(vars.into_iter().collect::<Vec<_>>(), vec!["x", "y", "z"]);
    }

    #[test]
    fn exact_division() {
        let q = p("x^2 - y^2").divide_exact(&p("x - y")).unwrap();
        assert_eq!(q, p("x + y"));
        assert!(p("x^2 + y^2").divide_exact(&p("x - y")).is_none());
        assert!(p("x").divide_exact(&Poly::zero()).is_none());
        assert_eq!(Poly::zero().divide_exact(&p("x")).unwrap(), Poly::zero());
        // Constants divide everything.
        assert_eq!(p("x + 1").divide_exact(&p("2")).unwrap(), p("1/2*x + 1/2"));
    }

    #[test]
    fn remainders() {
        assert_eq!(p("x^2 + y^2").rem_mod(&p("x^2")), p("y^2"));
        assert_eq!(p("x^2*y").rem_mod(&p("x - y")), p("y^3"));
        assert_eq!(p("x^2 - y^2").rem_mod(&p("x - y")), Poly::zero());
        assert_eq!(p("x").rem_mod(&Poly::zero()), p("x"));
    }

    #[test]
    fn as_constant() {
        assert_eq!(Poly::zero().as_constant(), Some(BigRational::zero()));
        assert_eq!(p("5/3").as_constant(), Some(BigRational::new(5.into(), 3.into())));
        assert_eq!(p("x").as_constant(), None);
    }

    fn small_poly() -> impl Strategy<Value = Poly> {
        proptest::collection::vec(((0u32..3, 0u32..3), -4i64..5), 0..5).prop_map(|terms| {
            let mut out = Poly::zero();
            for ((ex, ey), c) in terms {
                let mono = &Poly::var("x").pow(ex) * &Poly::var("y").pow(ey);
                out = &out + &mono.scale(&BigRational::from(BigInt::from(c)));
            }
            out
        })
    }

    proptest! {
        #[test]
        fn display_parse_round_trip(a in small_poly()) {
            let back = Poly::parse(&a.to_string()).unwrap();
            prop_assert_eq!(a, back);
        }

        #[test]
        fn products_divide_exactly(a in small_poly(), b in small_poly()) {
            prop_assume!(!a.is_zero());
            let prod = &a * &b;
            let q = prod.divide_exact(&a).unwrap();
            prop_assert_eq!(q, b);
        }

        #[test]
        fn ring_laws(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        }
    }
}
