//! Finite posets and bounded lattices: distributivity, frame and coherence
//! checks, meet-prime elements, and the downset/join-irreducible round trip.
//!
//! Lattices are stored densely: an order matrix plus precomputed meet/join
//! tables, all validated on construction rather than trusted.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{precondition, Result};
use crate::report::{CheckResult, ValidationReport};

/// Work bound for the quantified frame checks; above it the subset sweeps
/// switch to seeded sampling and say so in their detail lines.
pub const DEFAULT_SUBSET_WORK_LIMIT: u64 = 1 << 22;

const SAMPLE_COUNT: u64 = 2048;
const SAMPLE_SEED: u64 = 0xC0FFEE;

/// A finite partial order on named points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinitePoset {
    names: Vec<String>,
    n: usize,
    le: Vec<bool>,
}

impl FinitePoset {
    /// Validates reflexivity, antisymmetry, and transitivity.
    pub fn from_le(names: Vec<String>, le: Vec<bool>) -> Result<Self> {
        let n = names.len();
        if le.len() != n * n {
            return Err(precondition(format!(
                "order matrix has {} entries, expected {}",
                le.len(),
                n * n
            )));
        }
        for i in 0..n {
            if !le[i * n + i] {
                return Err(precondition(format!("order is not reflexive at {}", names[i])));
            }
            for j in 0..n {
                if i != j && le[i * n + j] && le[j * n + i] {
                    return Err(precondition(format!(
                        "order is not antisymmetric on {} and {}",
                        names[i], names[j]
                    )));
                }
                for k in 0..n {
                    if le[i * n + j] && le[j * n + k] && !le[i * n + k] {
                        return Err(precondition(format!(
                            "order is not transitive via {} <= {} <= {}",
                            names[i], names[j], names[k]
                        )));
                    }
                }
            }
        }
        Ok(FinitePoset { names, n, le })
    }

    pub fn antichain(names: Vec<String>) -> Self {
        let n = names.len();
        let mut le = vec![false; n * n];
        for i in 0..n {
            le[i * n + i] = true;
        }
        FinitePoset { names, n, le }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.le[i * self.n + j]
    }

    pub fn opposite(&self) -> FinitePoset {
        let mut le = vec![false; self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                le[i * self.n + j] = self.le(j, i);
            }
        }
        FinitePoset { names: self.names.clone(), n: self.n, le }
    }

    /// Covering pairs (i, j): i < j with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j || !self.le(i, j) {
                    continue;
                }
                let between = (0..self.n)
                    .any(|k| k != i && k != j && self.le(i, k) && self.le(k, j));
                if !between {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// All downward closed subsets, sorted by size then contents.
    pub fn downsets(&self) -> Vec<BTreeSet<usize>> {
        let mut out = Vec::new();
        for mask in 0u64..(1 << self.n) {
            let closed = (0..self.n).all(|j| {
                mask >> j & 1 == 0
                    || (0..self.n).all(|i| !self.le(i, j) || mask >> i & 1 == 1)
            });
            if closed {
                out.push((0..self.n).filter(|i| mask >> i & 1 == 1).collect());
            }
        }
        out.sort_by(|a: &BTreeSet<usize>, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        out
    }

    fn canonical_key(&self) -> Vec<bool> {
        let mut perm: Vec<usize> = (0..self.n).collect();
        let mut best: Option<Vec<bool>> = None;
        permute(&mut perm, 0, &mut |p| {
            let mut key = vec![false; self.n * self.n];
            for i in 0..self.n {
                for j in 0..self.n {
                    key[i * self.n + j] = self.le(p[i], p[j]);
                }
            }
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        });
        best.unwrap_or_default()
    }

    pub fn is_isomorphic_to(&self, other: &FinitePoset) -> bool {
        self.n == other.n && self.canonical_key() == other.canonical_key()
    }

    /// Every poset on exactly `n` points, one representative per isomorphism
    /// class. Enumerates transitive relations below the diagonal's reflexive
    /// base (every finite poset admits a linear extension, so representatives
    /// with order compatible with the index order suffice), then dedups by
    /// canonical form.
    pub fn enumerate_up_to_iso(n: usize) -> Vec<FinitePoset> {
        assert!(n <= 7, "poset enumeration is exponential; {n} points is past the guard");
        let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        if n == 0 {
            return vec![FinitePoset::antichain(Vec::new())];
        }
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut seen: BTreeSet<Vec<bool>> = BTreeSet::new();
        let mut out = Vec::new();
        for mask in 0u64..(1 << pairs.len()) {
            let mut le = vec![false; n * n];
            for i in 0..n {
                le[i * n + i] = true;
            }
            for (b, &(i, j)) in pairs.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    le[i * n + j] = true;
                }
            }
            let transitive = (0..n).all(|i| {
                (0..n).all(|j| {
                    !le[i * n + j]
                        || (0..n).all(|k| !le[j * n + k] || le[i * n + k])
                })
            });
            if !transitive {
                continue;
            }
            let p = FinitePoset { names: names.clone(), n, le };
            if seen.insert(p.canonical_key()) {
                out.push(p);
            }
        }
        out
    }
}

fn permute(perm: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}

/// A finite bounded lattice with validated meet/join tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteBoundedLattice {
    names: Vec<String>,
    n: usize,
    le: Vec<bool>,
    meet: Vec<usize>,
    join: Vec<usize>,
    pub bottom: usize,
    pub top: usize,
}

impl FiniteBoundedLattice {
    /// Builds from an order matrix; fails if some pair lacks a greatest lower
    /// or least upper bound, or the bounds are missing.
    pub fn from_le(names: Vec<String>, le: Vec<bool>) -> Result<Self> {
        let poset = FinitePoset::from_le(names, le)?;
        let n = poset.n;
        if n == 0 {
            return Err(precondition("a bounded lattice needs at least one element"));
        }
        let mut meet = vec![0usize; n * n];
        let mut join = vec![0usize; n * n];
        for i in 0..n {
            for j in 0..n {
                meet[i * n + j] = bound_of(&poset, i, j, true).ok_or_else(|| {
                    precondition(format!(
                        "{} and {} have no meet",
                        poset.names[i], poset.names[j]
                    ))
                })?;
                join[i * n + j] = bound_of(&poset, i, j, false).ok_or_else(|| {
                    precondition(format!(
                        "{} and {} have no join",
                        poset.names[i], poset.names[j]
                    ))
                })?;
            }
        }
        let bottom = (0..n)
            .find(|&b| (0..n).all(|x| poset.le(b, x)))
            .ok_or_else(|| precondition("no bottom element"))?;
        let top = (0..n)
            .find(|&t| (0..n).all(|x| poset.le(x, t)))
            .ok_or_else(|| precondition("no top element"))?;
        Ok(FiniteBoundedLattice {
            names: poset.names,
            n,
            le: poset.le,
            meet,
            join,
            bottom,
            top,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        self.le[i * self.n + j]
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.meet[i * self.n + j]
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.join[i * self.n + j]
    }

    pub fn poset(&self) -> FinitePoset {
        FinitePoset { names: self.names.clone(), n: self.n, le: self.le.clone() }
    }

    pub fn opposite(&self) -> FiniteBoundedLattice {
        let mut le = vec![false; self.n * self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                le[i * self.n + j] = self.le(j, i);
            }
        }
        FiniteBoundedLattice {
            names: self.names.clone(),
            n: self.n,
            le,
            meet: self.join.clone(),
            join: self.meet.clone(),
            bottom: self.top,
            top: self.bottom,
        }
    }

    pub fn join_of_set(&self, s: impl IntoIterator<Item = usize>) -> usize {
        s.into_iter().fold(self.bottom, |a, b| self.join(a, b))
    }

    pub fn meet_of_set(&self, s: impl IntoIterator<Item = usize>) -> usize {
        s.into_iter().fold(self.top, |a, b| self.meet(a, b))
    }

    /// First triple breaking x ∧ (y ∨ z) = (x ∧ y) ∨ (x ∧ z), if any.
    pub fn distributivity_witness(&self) -> Option<(usize, usize, usize)> {
        for x in 0..self.n {
            for y in 0..self.n {
                for z in 0..self.n {
                    if self.meet(x, self.join(y, z))
                        != self.join(self.meet(x, y), self.meet(x, z))
                    {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn is_distributive(&self) -> bool {
        self.distributivity_witness().is_none()
    }

    /// Elements other than bottom that are not the join of what lies strictly
    /// below them.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&x| {
                x != self.bottom
                    && self.join_of_set((0..self.n).filter(|&y| y != x && self.le(y, x))) != x
            })
            .collect()
    }

    /// The downset lattice of a poset, named by its downsets.
    pub fn downsets_of(poset: &FinitePoset) -> Result<FiniteBoundedLattice> {
        let downs = poset.downsets();
        let names: Vec<String> = downs
            .iter()
            .map(|d| {
                let list: Vec<&str> = d.iter().map(|&i| poset.name(i)).collect();
                format!("{{{}}}", list.join(","))
            })
            .collect();
        let n = downs.len();
        let mut le = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                le[i * n + j] = downs[i].is_subset(&downs[j]);
            }
        }
        FiniteBoundedLattice::from_le(names, le)
    }
}

fn bound_of(poset: &FinitePoset, i: usize, j: usize, lower: bool) -> Option<usize> {
    let cmp = |a: usize, b: usize| if lower { poset.le(a, b) } else { poset.le(b, a) };
    let candidates: Vec<usize> = (0..poset.n).filter(|&x| cmp(x, i) && cmp(x, j)).collect();
    candidates
        .iter()
        .copied()
        .find(|&x| candidates.iter().all(|&y| cmp(y, x)))
}

/// Meet-prime elements: a ≠ top such that b ∧ c ≤ a forces b ≤ a or c ≤ a.
pub fn meet_primes(l: &FiniteBoundedLattice) -> Vec<usize> {
    (0..l.len())
        .filter(|&a| {
            a != l.top
                && (0..l.len()).all(|b| {
                    (0..l.len()).all(|c| {
                        !l.le(l.meet(b, c), a) || l.le(b, a) || l.le(c, a)
                    })
                })
        })
        .collect()
}

fn subset_family(n: usize, limit: u64, seed: u64) -> (Vec<Vec<usize>>, bool) {
    let exhaustive = n < 63
        && (1u64 << n).saturating_mul((n as u64 * n as u64).max(1)) <= limit;
    if exhaustive {
        let family = (0..(1u64 << n))
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
            .collect();
        (family, true)
    } else {
        let total: u64 = if n < 63 { 1 << n } else { u64::MAX };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut family: BTreeSet<Vec<usize>> = BTreeSet::new();
        family.insert(Vec::new());
        family.insert((0..n).collect());
        while (family.len() as u64) < SAMPLE_COUNT.min(total) {
            family.insert((0..n).filter(|_| rng.gen_bool(0.5)).collect());
        }
        (family.into_iter().collect(), false)
    }
}

/// Checks, by literal quantification, that the lattice is a coherent frame:
/// bounded, distributive, meets distribute over arbitrary joins, every
/// element is compact for directed joins, and the compacts are closed under
/// finite meets and include the top. Sweeps every subset when the work fits
/// under `limit` (default `DEFAULT_SUBSET_WORK_LIMIT`), otherwise a seeded
/// sample, and the detail lines say which happened.
pub fn check_coherent_frame(
    l: &FiniteBoundedLattice,
    limit: Option<u64>,
) -> ValidationReport {
    check_coherent_frame_seeded(l, limit, SAMPLE_SEED)
}

/// Same sweep with a caller-chosen sampling seed for the non-exhaustive case.
pub fn check_coherent_frame_seeded(
    l: &FiniteBoundedLattice,
    limit: Option<u64>,
    seed: u64,
) -> ValidationReport {
    let mut report = ValidationReport::new();
    let n = l.len();

    let bounds_ok = (0..n).all(|x| l.le(l.bottom, x) && l.le(x, l.top));
    report.push(CheckResult::of(
        "bounds",
        bounds_ok,
        format!("bottom {}, top {}", l.name(l.bottom), l.name(l.top)),
    ));

    match l.distributivity_witness() {
        None => report.push(CheckResult::pass("distributive", "all triples checked")),
        Some((x, y, z)) => report.push(CheckResult::fail(
            "distributive",
            format!(
                "{} ∧ ({} ∨ {}) differs from ({} ∧ {}) ∨ ({} ∧ {})",
                l.name(x),
                l.name(y),
                l.name(z),
                l.name(x),
                l.name(y),
                l.name(x),
                l.name(z)
            ),
        )),
    }

    let (family, exhaustive) = subset_family(n, limit.unwrap_or(DEFAULT_SUBSET_WORK_LIMIT), seed);
    let coverage = if exhaustive {
        format!("all {} subsets", family.len())
    } else {
        format!("{} sampled subsets (seed {seed})", family.len())
    };

    let mut frame_ok = true;
    let mut frame_detail = format!("x ∧ ⋁S = ⋁(x ∧ s) over {coverage}");
    let mut compact_ok = true;
    let mut compact_detail = format!("directed subsets among {coverage}");
    for members in &family {
        let join_s = l.join_of_set(members.iter().copied());
        for x in 0..n {
            let lhs = l.meet(x, join_s);
            let rhs = l.join_of_set(members.iter().map(|&s| l.meet(x, s)));
            if lhs != rhs {
                if frame_ok {
                    frame_detail = format!(
                        "fails at x = {}, S = {{{}}}",
                        l.name(x),
                        members.iter().map(|&s| l.name(s)).collect::<Vec<_>>().join(",")
                    );
                }
                frame_ok = false;
            }
        }
        let directed = !members.is_empty()
            && members.iter().all(|&a| {
                members
                    .iter()
                    .all(|&b| members.iter().any(|&c| l.le(a, c) && l.le(b, c)))
            });
        if directed {
            for c in 0..n {
                if l.le(c, join_s) && !members.iter().any(|&d| l.le(c, d)) {
                    if compact_ok {
                        compact_detail = format!(
                            "{} is below the join of a directed set but below no member",
                            l.name(c)
                        );
                    }
                    compact_ok = false;
                }
            }
        }
    }
    report.push(CheckResult::of("arbitrary_join_distributivity", frame_ok, frame_detail));
    report.push(CheckResult::of("elements_compact", compact_ok, compact_detail));

    // With every element compact, coherence needs the compacts meet-closed
    // and the top compact; restate it explicitly.
    let coherent = compact_ok;
    report.push(CheckResult::of(
        "coherent",
        coherent,
        "compacts are the whole lattice, hence meet-closed and containing the top",
    ));
    report
}

/// The join-irreducible poset of a distributive lattice together with the
/// verification that downsets of that poset reproduce the lattice.
#[derive(Clone, Debug)]
pub struct BirkhoffOutcome {
    pub irreducible_poset: FinitePoset,
    pub report: ValidationReport,
}

pub fn birkhoff_round_trip(l: &FiniteBoundedLattice) -> Result<BirkhoffOutcome> {
    if let Some((x, y, z)) = l.distributivity_witness() {
        return Err(precondition(format!(
            "lattice is not distributive: witness ({}, {}, {})",
            l.name(x),
            l.name(y),
            l.name(z)
        )));
    }
    let ji = l.join_irreducibles();
    let m = ji.len();
    let names: Vec<String> = ji.iter().map(|&i| l.name(i).to_string()).collect();
    let mut le = vec![false; m * m];
    for a in 0..m {
        for b in 0..m {
            le[a * m + b] = l.le(ji[a], ji[b]);
        }
    }
    let poset = FinitePoset::from_le(names, le)?;
    let downs = FiniteBoundedLattice::downsets_of(&poset)?;
    let downsets = poset.downsets();

    let mut report = ValidationReport::new();
    // x ↦ the join-irreducibles below x, as a downset index.
    let mut image = Vec::with_capacity(l.len());
    let mut all_found = true;
    for x in 0..l.len() {
        let set: BTreeSet<usize> = (0..m).filter(|&a| l.le(ji[a], x)).collect();
        match downsets.iter().position(|d| *d == set) {
            Some(idx) => image.push(idx),
            None => {
                all_found = false;
                image.push(usize::MAX);
            }
        }
    }
    report.push(CheckResult::of(
        "images_are_downsets",
        all_found,
        "each element maps to the downset of irreducibles below it",
    ));
    let distinct: BTreeSet<usize> = image.iter().copied().collect();
    let bijective =
        all_found && distinct.len() == l.len() && l.len() == downs.len();
    report.push(CheckResult::of(
        "bijective",
        bijective,
        format!("{} elements vs {} downsets", l.len(), downs.len()),
    ));
    if bijective {
        let mut order_ok = true;
        let mut meets_ok = true;
        for x in 0..l.len() {
            for y in 0..l.len() {
                if l.le(x, y) != downs.le(image[x], image[y]) {
                    order_ok = false;
                }
                if image[l.meet(x, y)] != downs.meet(image[x], image[y])
                    || image[l.join(x, y)] != downs.join(image[x], image[y])
                {
                    meets_ok = false;
                }
            }
        }
        report.push(CheckResult::of(
            "order_isomorphism",
            order_ok,
            "x ≤ y exactly when the downsets are nested",
        ));
        report.push(CheckResult::of(
            "meets_and_joins_preserved",
            meets_ok,
            "meet is intersection, join is union",
        ));
    } else {
        report.push(CheckResult::fail("order_isomorphism", "skipped: map not bijective"));
        report.push(CheckResult::fail(
            "meets_and_joins_preserved",
            "skipped: map not bijective",
        ));
    }
    Ok(BirkhoffOutcome { irreducible_poset: poset, report })
}

/// A linear order with `n` elements, named c0 < c1 < ...
pub fn chain(n: usize) -> FiniteBoundedLattice {
    assert!(n >= 1);
    let names = (0..n).map(|i| format!("c{i}")).collect();
    let mut le = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            le[i * n + j] = i <= j;
        }
    }
    FiniteBoundedLattice::from_le(names, le).expect("chain is a lattice")
}

/// The lattice of subsets of {0, ..., k-1}.
pub fn boolean(k: usize) -> FiniteBoundedLattice {
    let n = 1usize << k;
    let names = (0..n)
        .map(|m| {
            let list: Vec<String> =
                (0..k).filter(|b| m >> b & 1 == 1).map(|b| b.to_string()).collect();
            format!("{{{}}}", list.join(","))
        })
        .collect();
    let mut le = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            le[i * n + j] = i & !j == 0;
        }
    }
    FiniteBoundedLattice::from_le(names, le).expect("powerset is a lattice")
}

/// The diamond: three incomparable atoms between bottom and top. The
/// standard witness for a non-distributive modular lattice.
pub fn m3() -> FiniteBoundedLattice {
    five_element(&[(1, 4), (2, 4), (3, 4)])
}

/// The pentagon: 0 < a < c < 1 and 0 < b < 1 with b incomparable to both.
pub fn n5() -> FiniteBoundedLattice {
    five_element(&[(1, 3), (1, 4), (3, 4), (2, 4)])
}

fn five_element(strict: &[(usize, usize)]) -> FiniteBoundedLattice {
    let names = vec!["0".into(), "a".into(), "b".into(), "c".into(), "1".into()];
    let n = 5;
    let mut le = vec![false; n * n];
    for i in 0..n {
        le[i * n + i] = true;
        le[i] = true; // bottom (index 0) below everything
        le[i * n + 4] = true; // everything below top
    }
    for &(i, j) in strict {
        le[i * n + j] = true;
    }
    FiniteBoundedLattice::from_le(names, le).expect("five element lattice")
}
