//! Radical thick tensor ideals of a presentation, their lattice, and the
//! spectrum of prime ideals with its supports topology.
//!
//! Everything here works on label sets: object classes are multisets of
//! labels, so membership of a class in a thick subcategory only depends on
//! its support, and every thick subcategory is determined by the labels it
//! contains.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{internal, precondition, resource, Result};
use crate::lattice::FiniteBoundedLattice;
use crate::presentation::{CategoryPresentation, Ctx, Label, ObjectClass};
use crate::report::CheckResult;
use crate::space::FiniteTopSpace;

/// Default bound on the label count for the exhaustive enumerations.
pub const DEFAULT_LABEL_CAP: usize = 20;

/// A radical thick tensor ideal, stored as its label set.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct TensorIdeal {
    pub labels: BTreeSet<Label>,
}

impl TensorIdeal {
    pub fn new(labels: BTreeSet<Label>) -> Self {
        TensorIdeal { labels }
    }

    pub fn contains(&self, l: &Label) -> bool {
        self.labels.contains(l)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

impl fmt::Display for TensorIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{{{}}}",
            self.labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
        )
    }
}

fn subset(x: u64, of: u64) -> bool {
    x & !of == 0
}

/// Smallest label set containing `seed` that absorbs tensoring on both sides
/// and is closed under two-out-of-three over the derived extriangles.
fn thick_closure_mask(ctx: &Ctx, seed: u64, mut trace: Option<&mut Vec<String>>) -> u64 {
    let mut m = seed;
    loop {
        let before = m;
        for i in 0..ctx.n {
            if m >> i & 1 == 0 {
                continue;
            }
            for z in 0..ctx.n {
                for s in [ctx.supp(i, z), ctx.supp(z, i)] {
                    if !subset(s, m) {
                        if let Some(t) = trace.as_deref_mut() {
                            t.push(format!(
                                "absorb: {} joins via {} ⊗ {}",
                                names(ctx, s & !m),
                                ctx.labels[i],
                                ctx.labels[z]
                            ));
                        }
                        m |= s;
                    }
                }
            }
        }
        for &[l, mid, r] in &ctx.derived_supp {
            let inside = [subset(l, m), subset(mid, m), subset(r, m)];
            let third = match inside {
                [true, true, false] => Some(r),
                [true, false, true] => Some(mid),
                [false, true, true] => Some(l),
                _ => None,
            };
            if let Some(t3) = third {
                if !subset(t3, m) {
                    if let Some(t) = trace.as_deref_mut() {
                        t.push(format!(
                            "two-of-three: {} joins via ({} -> {} -> {})",
                            names(ctx, t3 & !m),
                            names(ctx, l),
                            names(ctx, mid),
                            names(ctx, r)
                        ));
                    }
                    m |= t3;
                }
            }
        }
        if m == before {
            return m;
        }
    }
}

fn names(ctx: &Ctx, mask: u64) -> String {
    let list =
        (0..ctx.n).filter(|i| mask >> i & 1 == 1).map(|i| ctx.labels[i].to_string());
    format!("{{{}}}", list.collect::<Vec<_>>().join(","))
}

/// Supports of the tensor powers x, x⊗x, x⊗x⊗x, ... for a single label,
/// up to (and excluding) the first repeated support. The sequence of supports
/// is a deterministic dynamical system on label subsets, so it is eventually
/// periodic and the returned prefix covers every support it ever visits.
fn power_supports(ctx: &Ctx, x: usize) -> Vec<u64> {
    let mut seen: BTreeSet<u64> = BTreeSet::new();
    let mut out = Vec::new();
    let mut s = 1u64 << x;
    while seen.insert(s) {
        out.push(s);
        s = ctx.supp_class_label(s, x);
    }
    out
}

fn radical_closure_mask(ctx: &Ctx, seed: u64) -> u64 {
    let mut s = seed;
    loop {
        let t = thick_closure_mask(ctx, s, None);
        let mut next = t;
        for x in 0..ctx.n {
            if next >> x & 1 == 1 {
                continue;
            }
            if power_supports(ctx, x).iter().any(|&pw| subset(pw, t)) {
                next |= 1 << x;
            }
        }
        if next == s {
            return s;
        }
        s = next;
    }
}

/// Thick tensor closure of a label set.
pub fn thick_tensor_closure(
    p: &CategoryPresentation,
    seed: &BTreeSet<Label>,
) -> Result<TensorIdeal> {
    let ctx = Ctx::new(p)?;
    let m = thick_closure_mask(&ctx, ctx.mask_of_set(seed)?, None);
    Ok(TensorIdeal::new(ctx.set_of_mask(m)))
}

/// Thick tensor closure with a log of the inference steps that grew the set.
pub fn thick_tensor_closure_traced(
    p: &CategoryPresentation,
    seed: &BTreeSet<Label>,
) -> Result<(TensorIdeal, Vec<String>)> {
    let ctx = Ctx::new(p)?;
    let mut trace = Vec::new();
    let m = thick_closure_mask(&ctx, ctx.mask_of_set(seed)?, Some(&mut trace));
    Ok((TensorIdeal::new(ctx.set_of_mask(m)), trace))
}

/// Radical closure: alternately take the thick tensor closure and adjoin
/// every label some tensor power of which already lies inside, until the set
/// stabilizes. Power supports are followed to their first repeat, never to a
/// fixed iteration count.
pub fn radical_closure(p: &CategoryPresentation, seed: &BTreeSet<Label>) -> Result<TensorIdeal> {
    let ctx = Ctx::new(p)?;
    let m = radical_closure_mask(&ctx, ctx.mask_of_set(seed)?);
    Ok(TensorIdeal::new(ctx.set_of_mask(m)))
}

/// Direct definition check, used as an independent route in tests: is this
/// exact label set tensor-absorbing, two-out-of-three closed, and radical?
pub fn is_radical_thick_ideal(p: &CategoryPresentation, set: &BTreeSet<Label>) -> Result<bool> {
    let ctx = Ctx::new(p)?;
    let m = ctx.mask_of_set(set)?;
    for i in 0..ctx.n {
        if m >> i & 1 == 0 {
            continue;
        }
        for z in 0..ctx.n {
            if !subset(ctx.supp(i, z), m) || !subset(ctx.supp(z, i), m) {
                return Ok(false);
            }
        }
    }
    for &[l, mid, r] in &ctx.derived_supp {
        let count = [l, mid, r].iter().filter(|&&x| subset(x, m)).count();
        if count == 2 {
            return Ok(false);
        }
    }
    for x in 0..ctx.n {
        if m >> x & 1 == 1 {
            continue;
        }
        if power_supports(&ctx, x).iter().any(|&pw| subset(pw, m)) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn check_cap(n: usize, cap: Option<usize>) -> Result<()> {
    let cap = cap.unwrap_or(DEFAULT_LABEL_CAP);
    if n > cap {
        return Err(resource(format!(
            "{n} labels exceed the enumeration cap {cap}; raise the cap to proceed"
        )));
    }
    Ok(())
}

/// The lattice of all radical thick tensor ideals: meet is intersection,
/// join is the radical closure of the union.
#[derive(Clone, Debug)]
pub struct RadicalIdealLattice {
    pub elements: Vec<TensorIdeal>,
    masks: Vec<u64>,
    meet: Vec<usize>,
    join: Vec<usize>,
    pub bottom: usize,
    pub top: usize,
}

impl RadicalIdealLattice {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn le(&self, i: usize, j: usize) -> bool {
        subset(self.masks[i], self.masks[j])
    }

    pub fn meet_of(&self, i: usize, j: usize) -> usize {
        self.meet[i * self.elements.len() + j]
    }

    pub fn join_of(&self, i: usize, j: usize) -> usize {
        self.join[i * self.elements.len() + j]
    }

    pub fn index_of(&self, ideal: &TensorIdeal) -> Option<usize> {
        self.elements.iter().position(|e| e == ideal)
    }

    /// View as a plain bounded lattice; the constructor revalidates that the
    /// inclusion order really has all binary meets and joins.
    pub fn to_bounded_lattice(&self) -> Result<FiniteBoundedLattice> {
        let names: Vec<String> = self.elements.iter().map(|e| e.to_string()).collect();
        let n = self.elements.len();
        let mut le = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                le[i * n + j] = self.le(i, j);
            }
        }
        let l = FiniteBoundedLattice::from_le(names, le)?;
        for i in 0..n {
            for j in 0..n {
                if l.meet(i, j) != self.meet_of(i, j) || l.join(i, j) != self.join_of(i, j) {
                    return Err(internal(
                        "ideal lattice tables disagree with order-theoretic meet/join",
                    ));
                }
            }
        }
        Ok(l)
    }
}

/// All radical thick tensor ideals, found by closing every label subset.
pub fn enumerate_radical_ideals(
    p: &CategoryPresentation,
    cap: Option<usize>,
) -> Result<RadicalIdealLattice> {
    let ctx = Ctx::new(p)?;
    check_cap(ctx.n, cap)?;
    let full = ctx.full_mask();
    let mut fixed: BTreeSet<u64> = BTreeSet::new();
    for seed in 0..=full {
        fixed.insert(radical_closure_mask(&ctx, seed));
    }
    let mut masks: Vec<u64> = fixed.into_iter().collect();
    masks.sort_by_key(|m| (m.count_ones(), *m));
    let n = masks.len();
    let pos: BTreeMap<u64, usize> = masks.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut meet = vec![0usize; n * n];
    let mut join = vec![0usize; n * n];
    for i in 0..n {
        for j in 0..n {
            let m = masks[i] & masks[j];
            meet[i * n + j] = *pos
                .get(&m)
                .ok_or_else(|| internal("intersection of radical ideals is not radical"))?;
            let u = radical_closure_mask(&ctx, masks[i] | masks[j]);
            join[i * n + j] =
                *pos.get(&u).ok_or_else(|| internal("join closure left the ideal set"))?;
        }
    }
    let bottom = *pos.get(&radical_closure_mask(&ctx, 0)).ok_or_else(|| internal("no bottom"))?;
    let top = *pos.get(&full).ok_or_else(|| internal("no top"))?;
    let elements = masks.iter().map(|&m| TensorIdeal::new(ctx.set_of_mask(m))).collect();
    Ok(RadicalIdealLattice { elements, masks, meet, join, bottom, top })
}

/// Tensor support of two support masks, by bilinearity. Multiplicities never
/// matter here: with nonnegative coefficients nothing can cancel, so the
/// support of a tensor product of classes is the union over support pairs.
/// `supp_bilinearity_matches_tensor_obj` in the tests pins this to the
/// multiplicity-carrying product.
fn tensor_supp(ctx: &Ctx, xs: u64, ys: u64) -> u64 {
    let mut out = 0;
    for i in 0..ctx.n {
        if xs >> i & 1 == 0 {
            continue;
        }
        for j in 0..ctx.n {
            if ys >> j & 1 == 1 {
                out |= ctx.supp(i, j);
            }
        }
    }
    out
}

/// Class-route quantifier bound: supports of more than this many labels are
/// not enumerated (complete whenever the presentation has at most 5 labels).
const CLASS_ROUTE_SUPPORT_BOUND: u32 = 5;

fn prime_routes(ctx: &Ctx, m: u64) -> (bool, bool) {
    // Label route: every product of two outside labels keeps a summand outside.
    let mut label_route = true;
    'label: for a in 0..ctx.n {
        if m >> a & 1 == 1 {
            continue;
        }
        for b in 0..ctx.n {
            if m >> b & 1 == 1 {
                continue;
            }
            if subset(ctx.supp(a, b), m) {
                label_route = false;
                break 'label;
            }
        }
    }
    // Class route: for classes X, Y (ranged by support), X⊗Y inside forces
    // X or Y inside.
    let full = ctx.full_mask();
    let mut class_route = true;
    'class: for xs in 1..=full {
        if xs.count_ones() > CLASS_ROUTE_SUPPORT_BOUND {
            continue;
        }
        for ys in 1..=full {
            if ys.count_ones() > CLASS_ROUTE_SUPPORT_BOUND {
                continue;
            }
            if subset(tensor_supp(ctx, xs, ys), m) && !subset(xs, m) && !subset(ys, m) {
                class_route = false;
                break 'class;
            }
            if ys == full {
                break;
            }
        }
        if xs == full {
            break;
        }
    }
    (label_route, class_route)
}

/// Is this proper radical ideal prime? Runs the label-pair criterion and the
/// object-class criterion and insists they agree.
pub fn is_prime(p: &CategoryPresentation, ideal: &TensorIdeal) -> Result<bool> {
    let ctx = Ctx::new(p)?;
    let m = ctx.mask_of_set(&ideal.labels)?;
    if radical_closure_mask(&ctx, m) != m {
        return Err(precondition(format!("{ideal} is not a radical thick tensor ideal")));
    }
    if m == ctx.full_mask() {
        return Err(precondition(format!("{ideal} is not proper")));
    }
    let (label_route, class_route) = prime_routes(&ctx, m);
    if label_route != class_route {
        return Err(internal(format!(
            "primality routes disagree on {ideal}: labels say {label_route}, classes say {class_route}"
        )));
    }
    Ok(label_route)
}

/// The spectrum: proper prime radical thick tensor ideals, topologized by
/// the closed sets the label supports generate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiniteSpectralSpace {
    pub points: Vec<TensorIdeal>,
    /// supp(x) = set of point indices whose ideal does not contain x.
    pub closed_basis: BTreeMap<Label, BTreeSet<usize>>,
    /// Every closed set: the basis closed under finite union and intersection,
    /// with the empty set and the whole space.
    pub closed_sets: BTreeSet<BTreeSet<usize>>,
    /// Pairs (p, q) with q in the closure of {p}.
    pub specialization: Vec<(usize, usize)>,
    /// How the computed specialization relates to ideal inclusion; computed,
    /// never assumed.
    pub specialization_direction: String,
}

impl FiniteSpectralSpace {
    pub fn supp_label(&self, l: &Label) -> Option<&BTreeSet<usize>> {
        self.closed_basis.get(l)
    }

    pub fn supp_class(&self, c: &ObjectClass) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for l in c.support() {
            if let Some(s) = self.closed_basis.get(l) {
                out.extend(s.iter().copied());
            }
        }
        out
    }

    pub fn closure_of_point(&self, i: usize) -> BTreeSet<usize> {
        let mut cl: BTreeSet<usize> = (0..self.points.len()).collect();
        for c in &self.closed_sets {
            if c.contains(&i) && c.len() < cl.len() {
                cl = c.clone();
            }
        }
        cl
    }

    pub fn to_top_space(&self) -> FiniteTopSpace {
        FiniteTopSpace::new(
            self.points.iter().map(|p| p.to_string()).collect(),
            self.closed_sets.clone(),
        )
        .expect("spectrum closed sets form a topology")
    }
}

fn build_spectral_space(
    ctx: &Ctx,
    prime_masks: &[u64],
    label_mask_filter: u64,
) -> FiniteSpectralSpace {
    let points: Vec<TensorIdeal> =
        prime_masks.iter().map(|&m| TensorIdeal::new(ctx.set_of_mask(m))).collect();
    let mut closed_basis: BTreeMap<Label, BTreeSet<usize>> = BTreeMap::new();
    for x in 0..ctx.n {
        if label_mask_filter >> x & 1 == 0 {
            continue;
        }
        let supp: BTreeSet<usize> = prime_masks
            .iter()
            .enumerate()
            .filter(|(_, &m)| m >> x & 1 == 0)
            .map(|(i, _)| i)
            .collect();
        closed_basis.insert(ctx.labels[x].clone(), supp);
    }
    let closed_sets =
        crate::space::close_family(points.len(), closed_basis.values().cloned());

    let mut specialization = Vec::new();
    let mut closures = Vec::new();
    for i in 0..points.len() {
        let mut cl: BTreeSet<usize> = (0..points.len()).collect();
        for c in &closed_sets {
            if c.contains(&i) && c.len() < cl.len() {
                cl = c.clone();
            }
        }
        closures.push(cl);
    }
    for (p, cl) in closures.iter().enumerate() {
        for &q in cl {
            specialization.push((p, q));
        }
    }
    specialization.sort_unstable();

    let smaller = specialization
        .iter()
        .all(|&(p, q)| subset(prime_masks[q], prime_masks[p]))
        && prime_masks.iter().enumerate().all(|(p, &pm)| {
            prime_masks
                .iter()
                .enumerate()
                .all(|(q, &qm)| !subset(qm, pm) || closures[p].contains(&q))
        });
    let larger = specialization
        .iter()
        .all(|&(p, q)| subset(prime_masks[p], prime_masks[q]))
        && prime_masks.iter().enumerate().all(|(p, &pm)| {
            prime_masks
                .iter()
                .enumerate()
                .all(|(q, &qm)| !subset(pm, qm) || closures[p].contains(&q))
        });
    let specialization_direction = if smaller {
        "closure_contains_smaller_ideals".to_string()
    } else if larger {
        "closure_contains_larger_ideals".to_string()
    } else {
        "mixed".to_string()
    };

    FiniteSpectralSpace {
        points,
        closed_basis,
        closed_sets,
        specialization,
        specialization_direction,
    }
}

fn prime_masks_of(ctx: &Ctx, lattice_masks: &[u64]) -> Result<Vec<u64>> {
    let full = ctx.full_mask();
    let mut primes = Vec::new();
    for &m in lattice_masks {
        if m == full {
            continue;
        }
        let (label_route, class_route) = prime_routes(ctx, m);
        if label_route != class_route {
            return Err(internal(format!(
                "primality routes disagree on {}",
                names(ctx, m)
            )));
        }
        if label_route {
            primes.push(m);
        }
    }
    Ok(primes)
}

/// The spectrum of prime radical thick tensor ideals with its topology.
pub fn balmer_spectrum(
    p: &CategoryPresentation,
    cap: Option<usize>,
) -> Result<FiniteSpectralSpace> {
    let ctx = Ctx::new(p)?;
    check_cap(ctx.n, cap)?;
    let lattice = enumerate_radical_ideals(p, cap)?;
    let primes = prime_masks_of(&ctx, &lattice.masks)?;
    Ok(build_spectral_space(&ctx, &primes, ctx.full_mask()))
}

/// Outcome of the classification check between radical ideals and Thomason
/// subsets of the spectrum.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BijectionReport {
    pub ideal_count: usize,
    pub thomason_count: usize,
    /// ideal display -> the point set it supports.
    pub pairs: Vec<(String, String)>,
    pub checks: Vec<CheckResult>,
}

impl BijectionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn point_set_name(points: &[TensorIdeal], s: &BTreeSet<usize>) -> String {
    let list: Vec<String> = s.iter().map(|&i| points[i].to_string()).collect();
    format!("[{}]", list.join(" | "))
}

/// Checks that radical ideals and Thomason subsets of the spectrum are in
/// mutually inverse bijection via I -> supp(I) and V -> { x : supp(x) ⊆ V }.
pub fn thomason_bijection_check(
    p: &CategoryPresentation,
    cap: Option<usize>,
) -> Result<BijectionReport> {
    let ctx = Ctx::new(p)?;
    check_cap(ctx.n, cap)?;
    let lattice = enumerate_radical_ideals(p, cap)?;
    let space = balmer_spectrum(p, cap)?;
    let npts = space.points.len();
    if npts > 20 {
        return Err(resource(format!(
            "{npts} spectrum points make the Thomason enumeration too large"
        )));
    }
    let mut checks = Vec::new();

    // Thomason subsets as unions of label supports.
    let label_supps: Vec<BTreeSet<usize>> = ctx
        .labels
        .iter()
        .map(|l| space.closed_basis.get(l).cloned().unwrap_or_default())
        .collect();
    let mut thomason: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    let full = ctx.full_mask();
    let mut pick = 0u64;
    loop {
        let mut v: BTreeSet<usize> = BTreeSet::new();
        for x in 0..ctx.n {
            if pick >> x & 1 == 1 {
                v.extend(label_supps[x].iter().copied());
            }
        }
        thomason.insert(v);
        if pick == full {
            break;
        }
        pick += 1;
    }

    // Cross-check: the same family must be exactly the specialization-closed
    // point sets.
    let closures: Vec<BTreeSet<usize>> = (0..npts).map(|i| space.closure_of_point(i)).collect();
    let mut spec_closed: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for sub in 0..(1u64 << npts) {
        let set: BTreeSet<usize> = (0..npts).filter(|i| sub >> i & 1 == 1).collect();
        if set.iter().all(|&i| closures[i].is_subset(&set)) {
            spec_closed.insert(set);
        }
    }
    checks.push(CheckResult::of(
        "thomason_equals_specialization_closed",
        thomason == spec_closed,
        format!("{} union-of-supports sets, {} specialization-closed sets", thomason.len(), spec_closed.len()),
    ));

    // Forward map I -> supp(I), backward V -> { x : supp(x) ⊆ V }.
    let ideal_to_supp = |mask: u64| -> BTreeSet<usize> {
        let mut v = BTreeSet::new();
        for x in 0..ctx.n {
            if mask >> x & 1 == 1 {
                v.extend(label_supps[x].iter().copied());
            }
        }
        v
    };
    let supp_to_ideal = |v: &BTreeSet<usize>| -> u64 {
        let mut m = 0;
        for x in 0..ctx.n {
            if label_supps[x].is_subset(v) {
                m |= 1 << x;
            }
        }
        m
    };

    let mut pairs = Vec::new();
    let mut forward_ok = true;
    let mut forward_detail = String::from("every ideal round-trips");
    let mut images: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for (i, &mask) in lattice.masks.iter().enumerate() {
        let v = ideal_to_supp(mask);
        if !thomason.contains(&v) {
            forward_ok = false;
            forward_detail =
                format!("supp({}) is not a Thomason subset", lattice.elements[i]);
        }
        let back = supp_to_ideal(&v);
        if back != mask {
            forward_ok = false;
            forward_detail = format!(
                "{} maps to {} which pulls back to {}",
                lattice.elements[i],
                point_set_name(&space.points, &v),
                names(&ctx, back)
            );
        }
        images.insert(v.clone());
        pairs.push((lattice.elements[i].to_string(), point_set_name(&space.points, &v)));
    }
    checks.push(CheckResult::of("ideal_round_trip", forward_ok, forward_detail));

    let mut backward_ok = true;
    let mut backward_detail = String::from("every Thomason subset round-trips");
    for v in &thomason {
        let m = supp_to_ideal(v);
        if !lattice.masks.contains(&m) {
            backward_ok = false;
            backward_detail = format!(
                "{} pulls back to the non-radical set {}",
                point_set_name(&space.points, v),
                names(&ctx, m)
            );
            continue;
        }
        let forward = ideal_to_supp(m);
        if &forward != v {
            backward_ok = false;
            backward_detail = format!(
                "{} pulls back to {} whose support is {}",
                point_set_name(&space.points, v),
                names(&ctx, m),
                point_set_name(&space.points, &forward)
            );
        }
    }
    checks.push(CheckResult::of("thomason_round_trip", backward_ok, backward_detail));

    checks.push(CheckResult::of(
        "cardinalities_match",
        lattice.len() == thomason.len() && images.len() == lattice.len(),
        format!("{} ideals, {} Thomason subsets, {} distinct images", lattice.len(), thomason.len(), images.len()),
    ));

    Ok(BijectionReport {
        ideal_count: lattice.len(),
        thomason_count: thomason.len(),
        pairs,
        checks,
    })
}

/// The subspace of the spectrum supported on primes containing `ideal`,
/// cross-checked against the spectrum of the stabilized presentation via the
/// label-deletion bijection.
pub fn spectrum_of_stabilization(
    p: &CategoryPresentation,
    ideal: &BTreeSet<Label>,
    cap: Option<usize>,
) -> Result<FiniteSpectralSpace> {
    let ctx = Ctx::new(p)?;
    check_cap(ctx.n, cap)?;
    let ideal_mask = ctx.mask_of_set(ideal)?;
    let stab = p.stabilize(ideal)?;

    let lattice = enumerate_radical_ideals(p, cap)?;
    let primes = prime_masks_of(&ctx, &lattice.masks)?;
    let sub_primes: Vec<u64> =
        primes.iter().copied().filter(|&m| subset(ideal_mask, m)).collect();
    let subspace = build_spectral_space(&ctx, &sub_primes, ctx.full_mask());

    let quotient_spectrum = balmer_spectrum(&stab, cap)?;

    // The deletion map P -> P \ ideal must be a bijection of point sets that
    // identifies the two closed-set families.
    let stab_ctx = Ctx::new(&stab)?;
    let mut mapped: Vec<usize> = Vec::new();
    for (i, pt) in subspace.points.iter().enumerate() {
        let deleted: BTreeSet<Label> =
            pt.labels.iter().filter(|l| !ideal.contains(*l)).cloned().collect();
        let target = TensorIdeal::new(deleted);
        match quotient_spectrum.points.iter().position(|q| *q == target) {
            Some(j) => mapped.push(j),
            None => {
                return Err(internal(format!(
                    "prime {} of the subspace has no image {} in the stabilized spectrum",
                    subspace.points[i], target
                )))
            }
        }
    }
    let distinct: BTreeSet<usize> = mapped.iter().copied().collect();
    if distinct.len() != mapped.len() || mapped.len() != quotient_spectrum.points.len() {
        return Err(internal(
            "label deletion is not a bijection between subspace and stabilized spectrum",
        ));
    }
    let translated: BTreeSet<BTreeSet<usize>> = subspace
        .closed_sets
        .iter()
        .map(|c| c.iter().map(|&i| mapped[i]).collect())
        .collect();
    if translated != quotient_spectrum.closed_sets {
        return Err(internal(
            "subspace topology does not match the stabilized spectrum topology",
        ));
    }
    let _ = stab_ctx;
    Ok(subspace)
}

/// Recomputes the spectrum along the lattice route — radical ideal lattice,
/// its point space, the Hochster dual of that — and checks the canonical
/// identification with the directly computed spectrum: the meet-prime ideals
/// are exactly the prime ideals, and the two topologies agree point for
/// point.
pub fn verify_spc_identity(
    p: &CategoryPresentation,
    cap: Option<usize>,
) -> Result<crate::report::ValidationReport> {
    use crate::lattice::meet_primes;
    use crate::space::{hochster_dual, pt_of_lattice};

    let spectrum = balmer_spectrum(p, cap)?;
    let lattice = enumerate_radical_ideals(p, cap)?;
    let bounded = lattice.to_bounded_lattice()?;
    let pt = pt_of_lattice(&bounded)?;
    let dual = hochster_dual(&pt)?;

    let mut report = crate::report::ValidationReport::new();
    let mp = meet_primes(&bounded);
    let mp_ideals: BTreeSet<&TensorIdeal> =
        mp.iter().map(|&i| &lattice.elements[i]).collect();
    let prime_ideals: BTreeSet<&TensorIdeal> = spectrum.points.iter().collect();
    report.push(CheckResult::of(
        "meet_primes_are_the_prime_ideals",
        mp_ideals == prime_ideals,
        format!("{} meet-primes, {} primes", mp_ideals.len(), prime_ideals.len()),
    ));
    if mp_ideals != prime_ideals {
        return Ok(report);
    }

    // Spectrum point s -> lattice meet-prime position -> dual point.
    let mut to_dual = Vec::with_capacity(spectrum.points.len());
    for pt_ideal in &spectrum.points {
        let pos = mp
            .iter()
            .position(|&i| &lattice.elements[i] == pt_ideal)
            .expect("prime is a meet-prime");
        to_dual.push(dual.point_map[pos]);
    }
    let translated: BTreeSet<BTreeSet<usize>> = spectrum
        .closed_sets
        .iter()
        .map(|c| c.iter().map(|&s| to_dual[s]).collect())
        .collect();
    report.push(CheckResult::of(
        "topologies_match",
        &translated == dual.dual.closed_sets(),
        format!(
            "{} closed sets directly, {} through the lattice",
            spectrum.closed_sets.len(),
            dual.dual.closed_sets().len()
        ),
    ));

    let mut spec_ok = true;
    for a in 0..spectrum.points.len() {
        for b in 0..spectrum.points.len() {
            let direct = spectrum.specialization.contains(&(a, b));
            let routed = dual.dual.specializes(to_dual[a], to_dual[b]);
            if direct != routed {
                spec_ok = false;
            }
        }
    }
    report.push(CheckResult::of(
        "specialization_matches",
        spec_ok,
        "closure membership agrees along the identification",
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn lab(s: &str) -> Label {
        Label::new(s).unwrap()
    }

    fn set(labels: &[&str]) -> BTreeSet<Label> {
        labels.iter().map(|l| lab(l)).collect()
    }

    fn ideal(labels: &[&str]) -> TensorIdeal {
        TensorIdeal::new(set(labels))
    }

    #[test]
    fn thick_closure_frozen_values() {
        let p = presets::mod_kc2();
        assert_eq!(thick_tensor_closure(&p, &set(&["k"])).unwrap(), ideal(&["k", "kC2"]));
        assert_eq!(thick_tensor_closure(&p, &set(&[])).unwrap(), ideal(&[]));

        let p = presets::proj_k_x_k();
        assert_eq!(thick_tensor_closure(&p, &set(&["S"])).unwrap(), ideal(&["S"]));

        for (_, p) in presets::all() {
            assert_eq!(thick_tensor_closure(&p, &set(&[])).unwrap(), ideal(&[]));
        }
    }

    #[test]
    fn thick_closure_trace_names_inference_steps() {
        let p = presets::mod_kc2();
        let (closure, trace) = thick_tensor_closure_traced(&p, &set(&["k"])).unwrap();
        assert_eq!(closure, ideal(&["k", "kC2"]));
        assert!(!trace.is_empty());
        assert!(trace.iter().any(|s| s.contains("kC2")), "{trace:?}");
    }

    #[test]
    fn radical_closure_frozen_values() {
        let p = presets::dedekind_cl2();
        assert_eq!(radical_closure(&p, &set(&["I"])).unwrap(), ideal(&["I", "R"]));

        let p = presets::mod_kc2();
        assert_eq!(radical_closure(&p, &set(&["kC2"])).unwrap(), ideal(&["kC2"]));

        // A tensor-nilpotent label falls into the radical of the empty set.
        let p = presets::nilpotent_toy();
        assert_eq!(radical_closure(&p, &set(&[])).unwrap(), ideal(&["n"]));
    }

    #[test]
    fn closure_is_a_closure_operator() {
        for (name, p) in presets::all() {
            let labels = p.label_vec();
            let n = labels.len();
            for a in 0..(1u32 << n) {
                let sa: BTreeSet<Label> = labels
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| a >> i & 1 == 1)
                    .map(|(_, l)| l.clone())
                    .collect();
                let ca = radical_closure(&p, &sa).unwrap();
                // extensive
                assert!(sa.is_subset(&ca.labels), "{name}");
                // idempotent
                assert_eq!(radical_closure(&p, &ca.labels).unwrap(), ca, "{name}");
                // monotone
                for b in 0..(1u32 << n) {
                    if a & b != a {
                        continue;
                    }
                    let sb: BTreeSet<Label> = labels
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| b >> i & 1 == 1)
                        .map(|(_, l)| l.clone())
                        .collect();
                    let cb = radical_closure(&p, &sb).unwrap();
                    assert!(ca.labels.is_subset(&cb.labels), "{name}");
                }
            }
        }
    }

    #[test]
    fn enumerate_matches_direct_definition_check() {
        for (name, p) in presets::all() {
            let lattice = enumerate_radical_ideals(&p, None).unwrap();
            let labels = p.label_vec();
            let n = labels.len();
            let mut direct = Vec::new();
            for mask in 0..(1u32 << n) {
                let s: BTreeSet<Label> = labels
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, l)| l.clone())
                    .collect();
                if is_radical_thick_ideal(&p, &s).unwrap() {
                    direct.push(TensorIdeal::new(s));
                }
            }
            direct.sort_by_key(|i| (i.len(), i.to_string()));
            let mut listed = lattice.elements.clone();
            listed.sort_by_key(|i| (i.len(), i.to_string()));
            assert_eq!(listed, direct, "{name}");
        }
    }

    #[test]
    fn enumerate_frozen_counts() {
        assert_eq!(enumerate_radical_ideals(&presets::proj_field(), None).unwrap().len(), 2);
        assert_eq!(enumerate_radical_ideals(&presets::proj_k_x_k(), None).unwrap().len(), 4);
        let lattice = enumerate_radical_ideals(&presets::mod_kc2(), None).unwrap();
        assert_eq!(
            lattice.elements,
            vec![ideal(&[]), ideal(&["kC2"]), ideal(&["k", "kC2"])]
        );
        assert_eq!(enumerate_radical_ideals(&presets::stmod_kc2(), None).unwrap().len(), 2);
        assert_eq!(enumerate_radical_ideals(&presets::cc_split(), None).unwrap().len(), 3);
        assert_eq!(enumerate_radical_ideals(&presets::dedekind_cl2(), None).unwrap().len(), 2);
    }

    #[test]
    fn enumerate_respects_cap() {
        let p = presets::proj_k_pow(4);
        assert!(matches!(
            enumerate_radical_ideals(&p, Some(3)),
            Err(crate::error::EngineError::Resource(_))
        ));
        assert!(enumerate_radical_ideals(&p, Some(4)).is_ok());
    }

    #[test]
    fn prime_frozen_values() {
        let p = presets::proj_k_x_k();
        // S ⊗ T = 0 lands in the empty ideal while S and T stay outside.
        assert!(!is_prime(&p, &ideal(&[])).unwrap());
        assert!(is_prime(&p, &ideal(&["S"])).unwrap());
        assert!(is_prime(&p, &ideal(&["T"])).unwrap());

        let p = presets::mod_kc2();
        assert!(is_prime(&p, &ideal(&[])).unwrap());
        assert!(is_prime(&p, &ideal(&["kC2"])).unwrap());
    }

    #[test]
    fn prime_preconditions() {
        let p = presets::mod_kc2();
        // {k} is not radical (its closure adds kC2).
        assert!(matches!(
            is_prime(&p, &ideal(&["k"])),
            Err(crate::error::EngineError::Precondition(_))
        ));
        // The improper ideal is rejected.
        assert!(matches!(
            is_prime(&p, &ideal(&["k", "kC2"])),
            Err(crate::error::EngineError::Precondition(_))
        ));
    }

    #[test]
    fn spectrum_point_counts() {
        assert_eq!(balmer_spectrum(&presets::proj_field(), None).unwrap().points.len(), 1);
        assert_eq!(balmer_spectrum(&presets::dedekind_cl2(), None).unwrap().points.len(), 1);
        assert_eq!(balmer_spectrum(&presets::stmod_kc2(), None).unwrap().points.len(), 1);
        assert_eq!(balmer_spectrum(&presets::proj_k_x_k(), None).unwrap().points.len(), 2);
        assert_eq!(balmer_spectrum(&presets::mod_kc2(), None).unwrap().points.len(), 2);
    }

    #[test]
    fn product_presets_are_discrete() {
        for n in 1..=4 {
            let p = presets::proj_k_pow(n);
            let s = balmer_spectrum(&p, None).unwrap();
            assert_eq!(s.points.len(), n);
            // Discrete: every subset of points is closed.
            assert_eq!(s.closed_sets.len(), 1 << n);
        }
    }

    #[test]
    fn mod_kc2_spectrum_is_sierpinski() {
        let s = balmer_spectrum(&presets::mod_kc2(), None).unwrap();
        assert_eq!(s.points, vec![ideal(&[]), ideal(&["kC2"])]);
        let expected: BTreeSet<BTreeSet<usize>> = [
            BTreeSet::new(),
            [0usize].into_iter().collect(),
            [0usize, 1].into_iter().collect(),
        ]
        .into_iter()
        .collect();
        assert_eq!(s.closed_sets, expected);
        // The closed point is the zero ideal; the big prime is generic.
        assert_eq!(s.specialization, vec![(0, 0), (1, 0), (1, 1)]);
        assert_eq!(s.specialization_direction, "closure_contains_smaller_ideals");
    }

    #[test]
    fn supports_multiply_into_intersections() {
        for (name, p) in presets::all() {
            let s = balmer_spectrum(&p, None).unwrap();
            for a in &p.labels {
                for b in &p.labels {
                    let ab = p.fusion.get(a, b).unwrap();
                    let lhs = s.supp_class(ab);
                    let rhs: BTreeSet<usize> = s
                        .supp_label(a)
                        .unwrap()
                        .intersection(s.supp_label(b).unwrap())
                        .copied()
                        .collect();
                    assert_eq!(lhs, rhs, "{name}: supp({a}*{b})");
                }
            }
        }
    }

    #[test]
    fn radical_of_tensor_is_meet() {
        for (name, p) in presets::all() {
            let lattice = enumerate_radical_ideals(&p, None).unwrap();
            for a in &p.labels {
                for b in &p.labels {
                    let ab = p.fusion.get(a, b).unwrap();
                    let rad_ab =
                        radical_closure(&p, &ab.support().cloned().collect()).unwrap();
                    let ra = radical_closure(&p, &set(&[a.as_str()])).unwrap();
                    let rb = radical_closure(&p, &set(&[b.as_str()])).unwrap();
                    let meet: BTreeSet<Label> =
                        ra.labels.intersection(&rb.labels).cloned().collect();
                    assert_eq!(rad_ab.labels, meet, "{name}: rad({a}⊗{b})");
                    assert!(lattice.index_of(&rad_ab).is_some(), "{name}");
                }
            }
        }
    }

    #[test]
    fn supp_bilinearity_matches_tensor_obj() {
        // The support of a multiplicity-carrying tensor product equals the
        // union of supports of label products; this backs the class-level
        // primality route.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (name, p) in presets::all() {
            let s = balmer_spectrum(&p, None).unwrap();
            let labels = p.label_vec();
            for _ in 0..50 {
                let x = ObjectClass::from_entries(
                    labels.iter().map(|l| (l.clone(), rng.gen_range(0..3u64))),
                );
                let y = ObjectClass::from_entries(
                    labels.iter().map(|l| (l.clone(), rng.gen_range(0..3u64))),
                );
                let t = p.tensor_obj(&x, &y).unwrap();
                let mut expected: BTreeSet<usize> = BTreeSet::new();
                for (a, _) in x.iter() {
                    for (b, _) in y.iter() {
                        expected
                            .extend(s.supp_class(p.fusion.get(a, b).unwrap()).iter().copied());
                    }
                }
                assert_eq!(s.supp_class(&t), expected, "{name}");
            }
        }
    }

    #[test]
    fn bijection_passes_on_presets() {
        for (name, p) in presets::all() {
            let report = thomason_bijection_check(&p, None).unwrap();
            assert!(report.passed(), "{name}: {:?}", report.checks);
            let ideals = enumerate_radical_ideals(&p, None).unwrap().len();
            assert_eq!(report.ideal_count, ideals, "{name}");
            assert_eq!(report.thomason_count, ideals, "{name}");
        }
    }

    #[test]
    fn stabilization_spectrum_is_the_subspace() {
        let p = presets::mod_kc2();
        let sub = spectrum_of_stabilization(&p, &set(&["kC2"]), None).unwrap();
        assert_eq!(sub.points, vec![ideal(&["kC2"])]);
        assert_eq!(sub.closed_sets.len(), 2);

        let c = presets::cc_split();
        let sub = spectrum_of_stabilization(&c, &set(&["c"]), None).unwrap();
        assert_eq!(sub.points, vec![ideal(&["c"])]);

        // Empty ideal: the subspace is the whole spectrum.
        let sub = spectrum_of_stabilization(&p, &set(&[]), None).unwrap();
        assert_eq!(sub.points.len(), 2);
    }

    #[test]
    fn lattice_tables_agree_with_order_theory() {
        for (name, p) in presets::all() {
            let lattice = enumerate_radical_ideals(&p, None).unwrap();
            lattice.to_bounded_lattice().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn spectrum_agrees_with_lattice_route() {
        for (name, p) in presets::all() {
            let report = verify_spc_identity(&p, None).unwrap();
            assert!(report.passed(), "{name}: {report}");
        }
        let report = verify_spc_identity(&presets::nilpotent_toy(), None).unwrap();
        assert!(report.passed(), "{report}");
    }
}
