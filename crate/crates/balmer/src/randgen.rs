//! Deterministic random instances for stress tests.
//!
//! Random presentations are assembled from families that satisfy the monoid
//! laws by construction (so a generator bug cannot masquerade as an engine
//! bug), and random matrix factorizations start from diagonal ones and are
//! conjugated by invertible elementary operations, which preserves both
//! defining products exactly.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mf::{mf_tensor_hat, MatrixFactorization, PolyMatrix};
use crate::poly::Poly;
use crate::presentation::{
    CategoryPresentation, ExtriangleGen, FusionTable, Label, Multiplicity, ObjectClass,
};

fn lab(s: &str) -> Label {
    Label::new(s).expect("generated label")
}

/// One label `u`, fusion `u*u = u`, unit `u`.
fn point_atom() -> CategoryPresentation {
    let u = lab("u");
    let mut fusion = FusionTable::new();
    fusion.insert(u.clone(), u.clone(), ObjectClass::of_label(u.clone()));
    CategoryPresentation {
        labels: [u.clone()].into_iter().collect(),
        unit: ObjectClass::of_label(u),
        fusion,
        extriangles: Vec::new(),
        proj_injectives: BTreeSet::new(),
        symmetric: true,
    }
}

/// `k` orthogonal idempotent labels whose sum is the unit; the tensor
/// structure of a product of `k` one-label pieces.
fn split_atom(k: usize) -> CategoryPresentation {
    let names = ["p", "q", "r"];
    let labels: Vec<Label> = names[..k].iter().map(|s| lab(s)).collect();
    let mut fusion = FusionTable::new();
    for a in &labels {
        for b in &labels {
            let value =
                if a == b { ObjectClass::of_label(a.clone()) } else { ObjectClass::zero() };
            fusion.insert(a.clone(), b.clone(), value);
        }
    }
    CategoryPresentation {
        labels: labels.iter().cloned().collect(),
        unit: ObjectClass::from_entries(labels.iter().map(|l| (l.clone(), 1))),
        fusion,
        extriangles: Vec::new(),
        proj_injectives: BTreeSet::new(),
        symmetric: true,
    }
}

/// Labels `e, g` with `g*g = a.e + b.g`. Associative for every choice of
/// `a, b`: the only nontrivial triple is (g,g,g), and both bracketings give
/// `ab.e + (a + b^2).g`.
fn two_label_atom(a: Multiplicity, b: Multiplicity) -> CategoryPresentation {
    let e = lab("e");
    let g = lab("g");
    let mut fusion = FusionTable::new();
    fusion.insert(e.clone(), e.clone(), ObjectClass::of_label(e.clone()));
    fusion.insert(e.clone(), g.clone(), ObjectClass::of_label(g.clone()));
    fusion.insert(g.clone(), e.clone(), ObjectClass::of_label(g.clone()));
    fusion.insert(
        g.clone(),
        g.clone(),
        ObjectClass::from_entries([(e.clone(), a), (g.clone(), b)]),
    );
    CategoryPresentation {
        labels: [e.clone(), g].into_iter().collect(),
        unit: ObjectClass::of_label(e),
        fusion,
        extriangles: Vec::new(),
        proj_injectives: BTreeSet::new(),
        symmetric: true,
    }
}

/// Product presentation on pair labels `a.b`, with componentwise fusion.
/// Inherits the monoid laws from the factors.
fn product(p: &CategoryPresentation, q: &CategoryPresentation) -> CategoryPresentation {
    let pair = |a: &Label, b: &Label| lab(&format!("{a}.{b}"));
    let cls = |x: &ObjectClass, y: &ObjectClass| -> ObjectClass {
        let mut out = ObjectClass::zero();
        for (a, m) in x.iter() {
            for (b, n) in y.iter() {
                out.add_label(pair(a, b), m * n);
            }
        }
        out
    };
    let labels: BTreeSet<Label> =
        p.labels.iter().flat_map(|a| q.labels.iter().map(move |b| pair(a, b))).collect();
    let mut fusion = FusionTable::new();
    for a in &p.labels {
        for b in &q.labels {
            for c in &p.labels {
                for d in &q.labels {
                    fusion.insert(
                        pair(a, b),
                        pair(c, d),
                        cls(p.fusion.get(a, c).unwrap(), q.fusion.get(b, d).unwrap()),
                    );
                }
            }
        }
    }
    CategoryPresentation {
        labels,
        unit: cls(&p.unit, &q.unit),
        fusion,
        extriangles: Vec::new(),
        proj_injectives: BTreeSet::new(),
        symmetric: p.symmetric && q.symmetric,
    }
}

fn random_atom(rng: &mut ChaCha8Rng) -> CategoryPresentation {
    match rng.gen_range(0u8..5) {
        0 => point_atom(),
        1 => split_atom(2),
        2 => split_atom(3),
        _ => two_label_atom(rng.gen_range(0..=3), rng.gen_range(0..=2)),
    }
}

fn random_class(rng: &mut ChaCha8Rng, labels: &[Label]) -> ObjectClass {
    ObjectClass::from_entries(labels.iter().filter_map(|l| {
        if rng.gen_bool(0.5) {
            Some((l.clone(), rng.gen_range(1..=2)))
        } else {
            None
        }
    }))
}

/// A random presentation with at most 4 labels and at most 3 generating
/// extriangles. Always passes validation: the fusion structure is a product
/// of law-abiding atoms, extriangle generators are unconstrained, and no
/// projective-injectives are declared.
pub fn random_presentation(seed: u64) -> CategoryPresentation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = random_atom(&mut rng);
    if rng.gen_bool(0.5) {
        let q = random_atom(&mut rng);
        if p.labels.len() * q.labels.len() <= 4 {
            p = product(&p, &q);
        }
    }
    let labels = p.label_vec();
    for _ in 0..rng.gen_range(0..=3) {
        let left = random_class(&mut rng, &labels);
        let right = random_class(&mut rng, &labels);
        let middle = if rng.gen_bool(0.4) {
            left.plus(&right)
        } else {
            random_class(&mut rng, &labels)
        };
        p.extriangles.push(ExtriangleGen::new(left, middle, right));
    }
    p
}

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Small random polynomial in one variable, degree at most 1.
fn small_poly(rng: &mut ChaCha8Rng, var: &str) -> Poly {
    let c0 = Poly::int(rng.gen_range(-2..=2));
    let c1 = Poly::int(rng.gen_range(-2..=2));
    &c0 + &(&c1 * &Poly::var(var))
}

/// Matrix factorization of `var^d`: a diagonal one, `phi = diag(var^{e_i})`
/// and `psi = diag(var^{d-e_i})`, conjugated by a few elementary operations.
/// Each operation replaces (phi, psi) by (E.phi, psi.E^{-1}) or
/// (phi.E, E^{-1}.psi), so both products stay `var^d . id` on the nose.
pub fn random_mf_single_var(seed: u64, var: &str) -> MatrixFactorization {
    let mut mixed = seed ^ 0x9e37_79b9_7f4a_7c15;
    for b in var.bytes() {
        mixed = mixed.wrapping_mul(0x0000_0100_0000_01b3).wrapping_add(u64::from(b));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mixed);
    let n = rng.gen_range(1..=3);
    let d: u32 = rng.gen_range(1..=3);
    let v = Poly::var(var);
    let f = v.pow(d);
    let mut phi = PolyMatrix::zero(n, n);
    let mut psi = PolyMatrix::zero(n, n);
    for i in 0..n {
        let e: u32 = rng.gen_range(0..=d);
        *phi.get_mut(i, i) = v.pow(e);
        *psi.get_mut(i, i) = v.pow(d - e);
    }
    for _ in 0..rng.gen_range(0..=3) {
        match rng.gen_range(0u8..3) {
            // Add a polynomial multiple of one row/column to another.
            0 if n > 1 => {
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                let p = small_poly(&mut rng, var);
                let mut fwd = PolyMatrix::identity(n);
                *fwd.get_mut(i, j) = p.clone();
                let mut back = PolyMatrix::identity(n);
                *back.get_mut(i, j) = -&p;
                if rng.gen_bool(0.5) {
                    phi = fwd.mul(&phi);
                    psi = psi.mul(&back);
                } else {
                    phi = phi.mul(&fwd);
                    psi = back.mul(&psi);
                }
            }
            // Swap two rows of phi and the matching columns of psi.
            1 if n > 1 => {
                let i = rng.gen_range(0..n);
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                let mut perm = PolyMatrix::identity(n);
                *perm.get_mut(i, i) = Poly::zero();
                *perm.get_mut(j, j) = Poly::zero();
                *perm.get_mut(i, j) = Poly::one();
                *perm.get_mut(j, i) = Poly::one();
                if rng.gen_bool(0.5) {
                    phi = perm.mul(&phi);
                    psi = psi.mul(&perm);
                } else {
                    phi = phi.mul(&perm);
                    psi = perm.mul(&psi);
                }
            }
            // Rescale phi by a nonzero constant and psi by its inverse.
            _ => {
                let choices = [rational(2, 1), rational(-1, 1), rational(1, 2), rational(-2, 1)];
                let c = choices[rng.gen_range(0..choices.len())].clone();
                let inv = rational(1, 1) / c.clone();
                phi = phi.scale(&Poly::constant(c));
                psi = psi.scale(&Poly::constant(inv));
            }
        }
    }
    MatrixFactorization::new(f, phi, psi)
}

/// A random matrix factorization: usually a one-variable instance in `x`,
/// sometimes a tensor product of instances in `x` and `y`.
pub fn random_mf(seed: u64) -> MatrixFactorization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if rng.gen_bool(0.7) {
        random_mf_single_var(rng.gen(), "x")
    } else {
        let a = random_mf_single_var(rng.gen(), "x");
        let b = random_mf_single_var(rng.gen(), "y");
        mf_tensor_hat(&a, &b).expect("distinct variables by construction")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mf::mf_validate;

    #[test]
    fn presentations_are_deterministic() {
        for seed in 0..10 {
            assert_eq!(random_presentation(seed), random_presentation(seed));
        }
    }

    #[test]
    fn presentations_vary_with_seed() {
        let distinct: BTreeSet<String> =
            (0..30).map(|s| format!("{:?}", random_presentation(s))).collect();
        assert!(distinct.len() > 10, "only {} distinct presentations", distinct.len());
    }

    #[test]
    fn presentations_always_validate() {
        for seed in 0..120 {
            let p = random_presentation(seed);
            assert!(p.labels.len() <= 4);
            assert!(p.extriangles.len() <= 3);
            let report = p.validate().expect("validate");
            assert!(report.passed(), "seed {seed}: {report}");
        }
    }

    #[test]
    fn presentations_cover_sizes_and_extriangles() {
        let sizes: BTreeSet<usize> = (0..200).map(|s| random_presentation(s).labels.len()).collect();
        assert!(sizes.contains(&1) && sizes.contains(&2) && sizes.contains(&3) && sizes.contains(&4));
        assert!((0..200).any(|s| !random_presentation(s).extriangles.is_empty()));
    }

    #[test]
    fn factorizations_are_deterministic() {
        for seed in 0..10 {
            assert_eq!(
                format!("{:?}", random_mf(seed)),
                format!("{:?}", random_mf(seed))
            );
        }
    }

    #[test]
    fn factorizations_always_validate() {
        for seed in 0..60 {
            let m = random_mf(seed);
            let report = mf_validate(&m);
            assert!(report.passed(), "seed {seed}: {report}");
        }
    }

    #[test]
    fn single_variable_instances_stay_in_their_variable() {
        for seed in 0..20 {
            let m = random_mf_single_var(seed, "z");
            assert!(m.variables().iter().all(|v| v == "z"));
            assert!(mf_validate(&m).passed());
        }
    }

    #[test]
    fn some_instance_is_not_diagonal() {
        let found = (0..60).any(|seed| {
            let m = random_mf_single_var(seed, "x");
            (0..m.phi.rows()).any(|i| {
                (0..m.phi.cols()).any(|j| i != j && !m.phi.get(i, j).is_zero())
            })
        });
        assert!(found, "elementary operations never left the diagonal");
    }
}
