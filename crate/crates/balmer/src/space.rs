//! Finite topological spaces as explicit closed-set families, the bridge to
//! specialization posets, the opens lattice, and the Stone/Hochster dualities
//! computed literally: points of the opens lattice, points of its opposite.

use std::collections::BTreeSet;

use crate::error::{internal, precondition, resource, Result};
use crate::lattice::{meet_primes, FiniteBoundedLattice, FinitePoset};
use crate::report::{CheckResult, ValidationReport};

/// Closes a family of point sets under pairwise union and intersection and
/// adds the empty set and the whole space.
pub(crate) fn close_family(
    point_count: usize,
    basis: impl IntoIterator<Item = BTreeSet<usize>>,
) -> BTreeSet<BTreeSet<usize>> {
    let whole: BTreeSet<usize> = (0..point_count).collect();
    let mut family: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    family.insert(BTreeSet::new());
    family.insert(whole);
    for b in basis {
        family.insert(b);
    }
    loop {
        let mut fresh: Vec<BTreeSet<usize>> = Vec::new();
        let items: Vec<&BTreeSet<usize>> = family.iter().collect();
        for (i, a) in items.iter().enumerate() {
            for b in items.iter().skip(i + 1) {
                let union: BTreeSet<usize> = a.union(b).copied().collect();
                if !family.contains(&union) {
                    fresh.push(union);
                }
                let inter: BTreeSet<usize> = a.intersection(b).copied().collect();
                if !family.contains(&inter) {
                    fresh.push(inter);
                }
            }
        }
        if fresh.is_empty() {
            return family;
        }
        family.extend(fresh);
    }
}

/// A finite topological space, stored as its full closed-set family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTopSpace {
    names: Vec<String>,
    n: usize,
    closed: BTreeSet<BTreeSet<usize>>,
}

impl FiniteTopSpace {
    /// Validates that the family is a topology: contains the empty set and
    /// the whole space and is closed under pairwise union and intersection.
    pub fn new(names: Vec<String>, closed: BTreeSet<BTreeSet<usize>>) -> Result<Self> {
        let n = names.len();
        let whole: BTreeSet<usize> = (0..n).collect();
        for c in &closed {
            if let Some(&p) = c.iter().find(|&&p| p >= n) {
                return Err(precondition(format!("closed set mentions unknown point {p}")));
            }
        }
        if !closed.contains(&BTreeSet::new()) || !closed.contains(&whole) {
            return Err(precondition(
                "closed family must contain the empty set and the whole space",
            ));
        }
        for a in &closed {
            for b in &closed {
                let union: BTreeSet<usize> = a.union(b).copied().collect();
                if !closed.contains(&union) {
                    return Err(precondition("closed family is not closed under union"));
                }
                let inter: BTreeSet<usize> = a.intersection(b).copied().collect();
                if !closed.contains(&inter) {
                    return Err(precondition(
                        "closed family is not closed under intersection",
                    ));
                }
            }
        }
        Ok(FiniteTopSpace { names, n, closed })
    }

    /// The Alexandrov space of a poset: closed sets are the downsets, so
    /// the closure of a point is everything below it.
    pub fn from_specialization_poset(p: &FinitePoset) -> Self {
        let names = p.names().to_vec();
        let closed = p.downsets().into_iter().collect();
        FiniteTopSpace { names, n: p.len(), closed }
    }

    pub fn discrete(n: usize) -> Self {
        FiniteTopSpace::from_specialization_poset(&FinitePoset::antichain(
            (0..n).map(|i| format!("x{i}")).collect(),
        ))
    }

    pub fn indiscrete(n: usize) -> Self {
        let names = (0..n).map(|i| format!("x{i}")).collect();
        let mut closed = BTreeSet::new();
        closed.insert(BTreeSet::new());
        closed.insert((0..n).collect());
        FiniteTopSpace { names, n, closed }
    }

    /// Two points: 0 closed, 1 generic.
    pub fn sierpinski() -> Self {
        let closed = [
            BTreeSet::new(),
            [0usize].into_iter().collect(),
            [0usize, 1].into_iter().collect(),
        ]
        .into_iter()
        .collect();
        FiniteTopSpace { names: vec!["0".into(), "1".into()], n: 2, closed }
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

    pub fn closed_sets(&self) -> &BTreeSet<BTreeSet<usize>> {
        &self.closed
    }

    /// Open sets sorted by size then contents; the order used by `omega`.
    pub fn open_sets_ordered(&self) -> Vec<BTreeSet<usize>> {
        let whole: BTreeSet<usize> = (0..self.n).collect();
        let mut opens: Vec<BTreeSet<usize>> = self
            .closed
            .iter()
            .map(|c| whole.difference(c).copied().collect())
            .collect();
        opens.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        opens
    }

    pub fn closure_of(&self, s: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut best: Option<&BTreeSet<usize>> = None;
        for c in &self.closed {
            if s.is_subset(c) && best.is_none_or(|b| c.len() < b.len()) {
                best = Some(c);
            }
        }
        best.cloned().unwrap_or_default()
    }

    pub fn closure_of_point(&self, i: usize) -> BTreeSet<usize> {
        self.closure_of(&[i].into_iter().collect())
    }

    /// Does j lie in the closure of i?
    pub fn specializes(&self, i: usize, j: usize) -> bool {
        self.closure_of_point(i).contains(&j)
    }

    pub fn is_t0(&self) -> bool {
        (0..self.n).all(|i| {
            (i + 1..self.n).all(|j| self.closure_of_point(i) != self.closure_of_point(j))
        })
    }

    /// Nonempty closed sets that are not the union of two proper closed
    /// subsets.
    pub fn irreducible_closed_sets(&self) -> Vec<BTreeSet<usize>> {
        self.closed
            .iter()
            .filter(|c| !c.is_empty())
            .filter(|c| {
                !self.closed.iter().any(|a| {
                    a.is_subset(c) && a != *c && {
                        self.closed.iter().any(|b| {
                            b.is_subset(c)
                                && b != *c
                                && a.union(b).copied().collect::<BTreeSet<usize>>() == **c
                        })
                    }
                })
            })
            .cloned()
            .collect()
    }

    /// Every irreducible closed set is the closure of exactly one point.
    pub fn is_sober(&self) -> bool {
        self.irreducible_closed_sets().iter().all(|c| {
            let generics = (0..self.n).filter(|&x| self.closure_of_point(x) == *c).count();
            generics == 1
        })
    }

    /// The specialization order: y below x when y lies in the closure of x.
    /// Needs T0, otherwise the relation is not antisymmetric.
    pub fn specialization_poset(&self) -> Result<FinitePoset> {
        if !self.is_t0() {
            return Err(precondition(
                "specialization is only a partial order on T0 spaces",
            ));
        }
        let mut le = vec![false; self.n * self.n];
        for x in 0..self.n {
            for y in 0..self.n {
                le[y * self.n + x] = self.specializes(x, y);
            }
        }
        FinitePoset::from_le(self.names.clone(), le)
    }

    /// The lattice of open sets under inclusion, elements ordered as in
    /// `open_sets_ordered`.
    pub fn omega(&self) -> FiniteBoundedLattice {
        let opens = self.open_sets_ordered();
        let names: Vec<String> = opens
            .iter()
            .map(|u| {
                let list: Vec<&str> = u.iter().map(|&i| self.name(i)).collect();
                format!("{{{}}}", list.join(","))
            })
            .collect();
        let m = opens.len();
        let mut le = vec![false; m * m];
        for i in 0..m {
            for j in 0..m {
                le[i * m + j] = opens[i].is_subset(&opens[j]);
            }
        }
        FiniteBoundedLattice::from_le(names, le)
            .expect("open sets form a lattice under inclusion")
    }
}

/// The point space of a distributive lattice: points are the meet-prime
/// elements, closed sets are V(a) = the meet-primes above a.
pub fn pt_of_lattice(l: &FiniteBoundedLattice) -> Result<FiniteTopSpace> {
    if let Some((x, y, z)) = l.distributivity_witness() {
        return Err(precondition(format!(
            "point space needs a distributive lattice; witness ({}, {}, {})",
            l.name(x),
            l.name(y),
            l.name(z)
        )));
    }
    let mp = meet_primes(l);
    let names: Vec<String> = mp.iter().map(|&p| l.name(p).to_string()).collect();
    let mut closed: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for a in 0..l.len() {
        closed.insert(
            mp.iter()
                .enumerate()
                .filter(|&(_, &p)| l.le(a, p))
                .map(|(i, _)| i)
                .collect(),
        );
    }
    FiniteTopSpace::new(names, closed)
}

/// Checks pt(Ω(X)) ≅ X along the canonical map sending a point to the
/// complement of its closure. Needs X sober and T0.
pub fn stone_round_trip(x: &FiniteTopSpace) -> Result<ValidationReport> {
    if !x.is_t0() {
        return Err(precondition("space is not T0"));
    }
    if !x.is_sober() {
        return Err(precondition("space is not sober"));
    }
    let opens = x.open_sets_ordered();
    let omega = x.omega();
    let pt = pt_of_lattice(&omega)?;
    let mp = meet_primes(&omega);

    let mut report = ValidationReport::new();
    let whole: BTreeSet<usize> = (0..x.len()).collect();
    let mut map: Vec<Option<usize>> = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        let complement: BTreeSet<usize> =
            whole.difference(&x.closure_of_point(i)).copied().collect();
        map.push(mp.iter().position(|&p| opens[p] == complement));
    }
    let all_found = map.iter().all(|m| m.is_some());
    report.push(CheckResult::of(
        "points_map_to_meet_primes",
        all_found,
        "the complement of each point closure is meet-prime among opens",
    ));
    let distinct: BTreeSet<usize> = map.iter().flatten().copied().collect();
    let bijective = all_found && distinct.len() == x.len() && pt.len() == x.len();
    report.push(CheckResult::of(
        "bijective",
        bijective,
        format!("{} points vs {} lattice points", x.len(), pt.len()),
    ));
    if bijective {
        let translated: BTreeSet<BTreeSet<usize>> = x
            .closed_sets()
            .iter()
            .map(|c| c.iter().map(|&i| map[i].unwrap()).collect())
            .collect();
        report.push(CheckResult::of(
            "closed_sets_correspond",
            &translated == pt.closed_sets(),
            format!(
                "{} closed sets on both sides",
                x.closed_sets().len()
            ),
        ));
    } else {
        report.push(CheckResult::fail("closed_sets_correspond", "skipped: map not bijective"));
    }
    Ok(report)
}

/// A Hochster dual together with the canonical identification of points:
/// `point_map[i]` is the dual index of original point i.
#[derive(Clone, Debug)]
pub struct HochsterOutcome {
    pub dual: FiniteTopSpace,
    pub point_map: Vec<usize>,
}

/// The Hochster dual, computed as the point space of the opposite of the
/// opens lattice. The meet-primes of that opposite are exactly the minimal
/// open neighborhoods, which pins each dual point to an original point; the
/// dual's closed sets are then checked to be precisely the original opens.
pub fn hochster_dual(x: &FiniteTopSpace) -> Result<HochsterOutcome> {
    if !x.is_t0() || !x.is_sober() {
        return Err(precondition(
            "Hochster duality needs a T0 sober space",
        ));
    }
    let opens = x.open_sets_ordered();
    let omega = x.omega();
    let op = omega.opposite();
    let mp_op = meet_primes(&op);

    let minimal_nbhd: Vec<BTreeSet<usize>> = (0..x.len())
        .map(|i| {
            let mut out: BTreeSet<usize> = (0..x.len()).collect();
            for u in &opens {
                if u.contains(&i) && u.len() < out.len() {
                    out = u.clone();
                }
            }
            out
        })
        .collect();

    let mut owner: Vec<usize> = Vec::with_capacity(mp_op.len());
    for &m in &mp_op {
        let holders: Vec<usize> =
            (0..x.len()).filter(|&i| minimal_nbhd[i] == opens[m]).collect();
        match holders.as_slice() {
            [single] => owner.push(*single),
            _ => {
                return Err(internal(format!(
                    "a join-prime open belongs to {} points instead of one",
                    holders.len()
                )))
            }
        }
    }
    if owner.len() != x.len() {
        return Err(internal(format!(
            "{} dual points for {} original points",
            owner.len(),
            x.len()
        )));
    }

    let names: Vec<String> = owner.iter().map(|&i| x.name(i).to_string()).collect();
    let mut closed: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for a in 0..op.len() {
        closed.insert(
            mp_op
                .iter()
                .enumerate()
                .filter(|&(_, &p)| op.le(a, p))
                .map(|(j, _)| j)
                .collect(),
        );
    }
    let dual = FiniteTopSpace::new(names, closed)?;

    // The dual closed sets, read through the point identification, must be
    // the original open sets.
    let translated: BTreeSet<BTreeSet<usize>> = dual
        .closed_sets()
        .iter()
        .map(|c| c.iter().map(|&j| owner[j]).collect())
        .collect();
    let original_opens: BTreeSet<BTreeSet<usize>> = opens.iter().cloned().collect();
    if translated != original_opens {
        return Err(internal("dual closed sets are not the original opens"));
    }
    let mut point_map = vec![usize::MAX; x.len()];
    for (j, &i) in owner.iter().enumerate() {
        point_map[i] = j;
    }
    // Specialization must flip.
    for i in 0..x.len() {
        for j in 0..x.len() {
            if x.specializes(i, j) != dual.specializes(point_map[j], point_map[i]) {
                return Err(internal("dual does not reverse specialization"));
            }
        }
    }
    Ok(HochsterOutcome { dual, point_map })
}

/// Brute-force homeomorphism search; only intended for small spaces.
pub fn are_homeomorphic(a: &FiniteTopSpace, b: &FiniteTopSpace) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    if a.closed_sets().len() != b.closed_sets().len() {
        return Ok(false);
    }
    let n = a.len();
    if n > 8 {
        return Err(resource(format!(
            "homeomorphism search over {n} points is past the 8-point guard"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    fn search(
        perm: &mut Vec<usize>,
        k: usize,
        a: &FiniteTopSpace,
        b: &FiniteTopSpace,
    ) -> bool {
        if k == perm.len() {
            return a
                .closed_sets()
                .iter()
                .all(|c| b.closed_sets().contains(&c.iter().map(|&i| perm[i]).collect()));
        }
        for i in k..perm.len() {
            perm.swap(k, i);
            if search(perm, k + 1, a, b) {
                perm.swap(k, i);
                return true;
            }
            perm.swap(k, i);
        }
        false
    }
    Ok(search(&mut perm, 0, a, b))
}
