//! Formal extension chains and their splicing. A chain of degree n from A
//! to B is a walk A → ... → B through n+1 arrow words; splicing drops the
//! shared endpoint and composes the two bridging words, so degrees add.
//! Degree-0 chains are plain morphisms and splicing with them is the module
//! action of the hom sets; the contravariant pullback twists by the usual
//! Koszul sign.

use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};

/// A composite of named generator arrows in diagrammatic order (the first
/// arrow is applied first); the empty word is an identity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArrowWord(pub Vec<String>);

impl ArrowWord {
    pub fn identity() -> Self {
        ArrowWord(Vec::new())
    }

    pub fn of(arrows: &[&str]) -> Self {
        ArrowWord(arrows.iter().map(|s| s.to_string()).collect())
    }

    pub fn then(&self, next: &ArrowWord) -> ArrowWord {
        ArrowWord(self.0.iter().chain(next.0.iter()).cloned().collect())
    }
}

impl std::fmt::Display for ArrowWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            f.write_str("id")
        } else {
            f.write_str(&self.0.join("."))
        }
    }
}

/// A degree-n extension chain: n+2 vertices joined by n+1 arrow words, with
/// a global sign.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtensionChain {
    pub vertices: Vec<String>,
    pub words: Vec<ArrowWord>,
    pub sign: i8,
}

impl ExtensionChain {
    pub fn new(vertices: Vec<String>, words: Vec<ArrowWord>, sign: i8) -> Result<Self> {
        if vertices.len() != words.len() + 1 || words.is_empty() {
            return Err(precondition(format!(
                "a chain needs one more vertex than words; got {} vertices, {} words",
                vertices.len(),
                words.len()
            )));
        }
        if sign != 1 && sign != -1 {
            return Err(precondition(format!("sign must be 1 or -1, got {sign}")));
        }
        if vertices.iter().any(|v| v.is_empty()) {
            return Err(precondition("vertex names must be nonempty"));
        }
        if words.iter().flat_map(|w| w.0.iter()).any(|a| a.is_empty()) {
            return Err(precondition("arrow names must be nonempty"));
        }
        Ok(ExtensionChain { vertices, words, sign })
    }

    /// The degree-0 identity at a vertex: one empty word.
    pub fn identity(v: &str) -> Self {
        ExtensionChain {
            vertices: vec![v.to_string(), v.to_string()],
            words: vec![ArrowWord::identity()],
            sign: 1,
        }
    }

    /// A degree-0 chain: a single arrow word between two vertices.
    pub fn morphism(from: &str, to: &str, word: ArrowWord) -> Self {
        ExtensionChain {
            vertices: vec![from.to_string(), to.to_string()],
            words: vec![word],
            sign: 1,
        }
    }

    pub fn degree(&self) -> usize {
        self.words.len() - 1
    }

    pub fn source(&self) -> &str {
        self.vertices.first().expect("chains are nonempty")
    }

    pub fn target(&self) -> &str {
        self.vertices.last().expect("chains are nonempty")
    }

    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.sign = -out.sign;
        out
    }
}

impl std::fmt::Display for ExtensionChain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}) {}", if self.sign >= 0 { "+" } else { "-" }, self.vertices[0])?;
        for (w, v) in self.words.iter().zip(&self.vertices[1..]) {
            write!(f, " --{w}--> {v}")?;
        }
        Ok(())
    }
}

/// Yoneda splice: c from A to B followed by d from B to C gives a chain
/// from A to C of degree deg c + deg d. The shared vertex disappears and
/// the word leaving it composes with the word entering it; signs multiply.
pub fn splice(c: &ExtensionChain, d: &ExtensionChain) -> Result<ExtensionChain> {
    if c.target() != d.source() {
        return Err(precondition(format!(
            "cannot splice: first chain ends at {} but second starts at {}",
            c.target(),
            d.source()
        )));
    }
    let mut vertices = c.vertices[..c.vertices.len() - 1].to_vec();
    vertices.extend(d.vertices[1..].iter().cloned());
    let mut words = c.words[..c.words.len() - 1].to_vec();
    words.push(c.words.last().unwrap().then(&d.words[0]));
    words.extend(d.words[1..].iter().cloned());
    Ok(ExtensionChain { vertices, words, sign: c.sign * d.sign })
}

/// Which end of a chain a morphism acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Postcompose at the target: a morphism out of the chain's last vertex.
    Left,
    /// Precompose at the source: a morphism into the chain's first vertex.
    Right,
}

/// The hom-set action on chains: splicing with a degree-0 chain on the
/// chosen side. The morphism must actually have degree 0.
pub fn hom_action(
    side: Side,
    morphism: &ExtensionChain,
    chain: &ExtensionChain,
) -> Result<ExtensionChain> {
    if morphism.degree() != 0 {
        return Err(precondition(format!(
            "hom action needs a degree-0 chain, got degree {}",
            morphism.degree()
        )));
    }
    match side {
        Side::Left => splice(chain, morphism),
        Side::Right => splice(morphism, chain),
    }
}

/// Contravariant pullback of d along e: the splice e then d, twisted by
/// (-1)^(deg d · deg e).
pub fn koszul_pullback(d: &ExtensionChain, e: &ExtensionChain) -> Result<ExtensionChain> {
    let mut out = splice(e, d)?;
    if d.degree() % 2 == 1 && e.degree() % 2 == 1 {
        out.sign = -out.sign;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A deterministic chain of the given degree starting at alphabet slot
    /// `start`: vertex t is V(start+t), and word t is empty or the single
    /// arrow named after its endpoints, per the bits of `pattern`.
    fn sample(start: usize, degree: usize, pattern: u32, sign: i8) -> ExtensionChain {
        let name = |i: usize| format!("V{}", i % 5);
        let vertices: Vec<String> = (0..=degree + 1).map(|t| name(start + t)).collect();
        let words: Vec<ArrowWord> = (0..=degree)
            .map(|t| {
                if pattern >> t & 1 == 1 {
                    ArrowWord(vec![format!("a{}_{}", (start + t) % 5, (start + t + 1) % 5)])
                } else {
                    ArrowWord::identity()
                }
            })
            .collect();
        ExtensionChain::new(vertices, words, sign).unwrap()
    }

    #[test]
    fn construction_guards() {
        assert!(ExtensionChain::new(vec!["A".into()], vec![], 1).is_err());
        assert!(ExtensionChain::new(
            vec!["A".into(), "B".into()],
            vec![ArrowWord::identity()],
            0
        )
        .is_err());
        assert!(ExtensionChain::new(
            vec!["A".into(), "".into()],
            vec![ArrowWord::identity()],
            1
        )
        .is_err());
    }

    #[test]
    fn splice_drops_the_shared_vertex_and_merges_words() {
        let c = ExtensionChain::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![ArrowWord::of(&["p"]), ArrowWord::of(&["q"])],
            1,
        )
        .unwrap();
        let d = ExtensionChain::morphism("C", "D", ArrowWord::of(&["r"]));
        let s = splice(&c, &d).unwrap();
        assert_eq!(s.degree(), 1);
        assert_eq!(s.vertices, vec!["A", "B", "D"]);
        assert_eq!(s.words, vec![ArrowWord::of(&["p"]), ArrowWord::of(&["q", "r"])]);
        assert_eq!(s.sign, 1);
    }

    #[test]
    fn splice_requires_matching_endpoints() {
        let c = ExtensionChain::identity("A");
        let d = ExtensionChain::identity("B");
        assert!(splice(&c, &d).is_err());
    }

    #[test]
    fn signs_multiply() {
        let c = ExtensionChain::identity("A").negated();
        let d = ExtensionChain::identity("A").negated();
        assert_eq!(splice(&c, &d).unwrap().sign, 1);
        assert_eq!(splice(&c, &ExtensionChain::identity("A")).unwrap().sign, -1);
    }

    #[test]
    fn degrees_add_and_associativity_holds() {
        for d1 in 0..=3usize {
            for d2 in 0..=3usize {
                for d3 in 0..=2usize {
                    for pattern in [0u32, 0b1111111, 0b1010101, 0b0110011] {
                        let c1 = sample(0, d1, pattern, 1);
                        let c2 = sample(d1 + 1, d2, pattern >> 1, -1);
                        let c3 = sample(d1 + d2 + 2, d3, pattern >> 2, 1);
                        let left = splice(&splice(&c1, &c2).unwrap(), &c3).unwrap();
                        let right = splice(&c1, &splice(&c2, &c3).unwrap()).unwrap();
                        assert_eq!(left, right);
                        assert_eq!(left.degree(), d1 + d2 + d3);
                    }
                }
            }
        }
    }

    #[test]
    fn identities_are_units() {
        for degree in 0..=3usize {
            for pattern in 0u32..8 {
                for sign in [1, -1] {
                    let c = sample(1, degree, pattern, sign);
                    let idl = ExtensionChain::identity(c.source());
                    let idr = ExtensionChain::identity(c.target());
                    assert_eq!(splice(&idl, &c).unwrap(), c);
                    assert_eq!(splice(&c, &idr).unwrap(), c);
                }
            }
        }
    }

    #[test]
    fn hom_action_is_degree_zero_splicing() {
        let chain = ExtensionChain::new(
            vec!["A".into(), "B".into(), "C".into()],
            vec![ArrowWord::of(&["p"]), ArrowWord::of(&["q"])],
            1,
        )
        .unwrap();
        let g = ExtensionChain::morphism("C", "D", ArrowWord::of(&["g"]));
        let f = ExtensionChain::morphism("Z", "A", ArrowWord::of(&["f"]));
        let after = hom_action(Side::Left, &g, &chain).unwrap();
        assert_eq!(after.target(), "D");
        assert_eq!(after.words[1], ArrowWord::of(&["q", "g"]));
        let before = hom_action(Side::Right, &f, &chain).unwrap();
        assert_eq!(before.source(), "Z");
        assert_eq!(before.words[0], ArrowWord::of(&["f", "p"]));
        // A degree-1 chain is not a morphism.
        assert!(hom_action(Side::Left, &chain, &g).is_err());
    }

    #[test]
    fn koszul_sign_table() {
        // Loops at a single vertex compose in both orders; the pullback
        // twists by (-1)^(ij).
        let loop_of = |degree: usize| {
            let vertices = vec!["A".to_string(); degree + 2];
            let words = vec![ArrowWord::identity(); degree + 1];
            ExtensionChain::new(vertices, words, 1).unwrap()
        };
        for i in 0..=4usize {
            for j in 0..=4usize {
                let d = loop_of(i);
                let e = loop_of(j);
                let pulled = koszul_pullback(&d, &e).unwrap();
                let plain = splice(&e, &d).unwrap();
                let expected = if i % 2 == 1 && j % 2 == 1 { -1 } else { 1 };
                assert_eq!(pulled.sign, plain.sign * expected, "i={i} j={j}");
                assert_eq!(pulled.degree(), i + j);
            }
        }
    }

    #[test]
    fn koszul_sign_is_coherent_with_splicing() {
        // Iterating pullbacks is pulling back along the splice, up to the
        // graded interchange of the two chains being pulled along:
        // g*(e*(d)) = (-1)^(jk) (splice(g, e))*(d).
        let loop_of = |degree: usize, sign: i8| {
            let vertices = vec!["A".to_string(); degree + 2];
            let words = vec![ArrowWord::identity(); degree + 1];
            ExtensionChain::new(vertices, words, sign).unwrap()
        };
        for i in 0..=3usize {
            for j in 0..=3usize {
                for k in 0..=3usize {
                    let d = loop_of(i, 1);
                    let e = loop_of(j, -1);
                    let g = loop_of(k, 1);
                    let via_splice = koszul_pullback(&d, &splice(&g, &e).unwrap()).unwrap();
                    let iterated =
                        koszul_pullback(&koszul_pullback(&d, &e).unwrap(), &g).unwrap();
                    let expected = if j % 2 == 1 && k % 2 == 1 {
                        via_splice.negated()
                    } else {
                        via_splice
                    };
                    assert_eq!(expected, iterated, "i={i} j={j} k={k}");
                }
            }
        }
    }
}
