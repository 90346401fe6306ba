//! Matrix factorizations of polynomials: validation, the tensor product
//! that factors the sum of the two potentials, and isomorphism witnesses
//! found by exact linear algebra.
//!
//! An isomorphism search only has to solve for one of the two components:
//! given a candidate α on the odd side, β := Φ_b · α · Ψ_a / f is forced,
//! and both intertwining equations follow identically. That turns the
//! search into a rational nullspace computation plus a scan for a
//! unimodular combination.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{internal, precondition, resource, Result};
use crate::poly::Poly;
use crate::report::{CheckResult, ValidationReport};

/// Dense row-major matrix of polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<Poly>>", into = "Vec<Vec<Poly>>")]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Poly>,
}

impl TryFrom<Vec<Vec<Poly>>> for PolyMatrix {
    type Error = String;
    fn try_from(rows: Vec<Vec<Poly>>) -> std::result::Result<Self, String> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err("ragged matrix rows".into());
        }
        Ok(PolyMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }
}

impl From<PolyMatrix> for Vec<Vec<Poly>> {
    fn from(m: PolyMatrix) -> Self {
        m.entries
            .chunks(m.cols.max(1))
            .map(|chunk| chunk.to_vec())
            .take(m.rows)
            .collect()
    }
}

impl PolyMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, entries: vec![Poly::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = PolyMatrix::zero(n, n);
        for i in 0..n {
            *m.get_mut(i, i) = Poly::one();
        }
        m
    }

    pub fn scalar(n: usize, f: &Poly) -> Self {
        let mut m = PolyMatrix::zero(n, n);
        for i in 0..n {
            *m.get_mut(i, i) = f.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Poly>>) -> Result<Self> {
        PolyMatrix::try_from(rows).map_err(precondition)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Poly {
        &mut self.entries[i * self.cols + j]
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.entries.iter().flat_map(|p| p.variables()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn add(&self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn neg(&self) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|p| -p).collect(),
        }
    }

    pub fn sub(&self, rhs: &PolyMatrix) -> PolyMatrix {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &Poly) -> PolyMatrix {
        PolyMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|p| p * c).collect(),
        }
    }

    pub fn mul(&self, rhs: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions must agree");
        let mut out = PolyMatrix::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = Poly::zero();
                for k in 0..self.cols {
                    acc = &acc + &(self.get(i, k) * rhs.get(k, j));
                }
                *out.get_mut(i, j) = acc;
            }
        }
        out
    }

    /// Kronecker product, row-major with the left factor outermost: entry
    /// ((i·p + k), (j·q + l)) = a[i][j] · b[k][l] for b of shape p×q.
    pub fn kron(&self, rhs: &PolyMatrix) -> PolyMatrix {
        let (p, q) = (rhs.rows, rhs.cols);
        let mut out = PolyMatrix::zero(self.rows * p, self.cols * q);
        for i in 0..self.rows {
            for j in 0..self.cols {
                for k in 0..p {
                    for l in 0..q {
                        *out.get_mut(i * p + k, j * q + l) =
                            self.get(i, j) * rhs.get(k, l);
                    }
                }
            }
        }
        out
    }

    pub fn from_blocks(
        tl: &PolyMatrix,
        tr: &PolyMatrix,
        bl: &PolyMatrix,
        br: &PolyMatrix,
    ) -> Result<PolyMatrix> {
        if tl.rows != tr.rows || bl.rows != br.rows || tl.cols != bl.cols || tr.cols != br.cols
        {
            return Err(precondition("block shapes do not fit together"));
        }
        let rows = tl.rows + bl.rows;
        let cols = tl.cols + tr.cols;
        let mut out = PolyMatrix::zero(rows, cols);
        for (block, roff, coff) in [
            (tl, 0, 0),
            (tr, 0, tl.cols),
            (bl, tl.rows, 0),
            (br, tl.rows, tl.cols),
        ] {
            for i in 0..block.rows {
                for j in 0..block.cols {
                    *out.get_mut(roff + i, coff + j) = block.get(i, j).clone();
                }
            }
        }
        Ok(out)
    }

    pub fn block_diag(blocks: &[&PolyMatrix]) -> PolyMatrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = PolyMatrix::zero(rows, cols);
        let (mut r, mut c) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    *out.get_mut(r + i, c + j) = b.get(i, j).clone();
                }
            }
            r += b.rows;
            c += b.cols;
        }
        out
    }

    /// Determinant by minor expansion along successive rows, memoized on the
    /// set of still-available columns.
    pub fn det(&self) -> Result<Poly> {
        if self.rows != self.cols {
            return Err(precondition("determinant of a non-square matrix"));
        }
        let n = self.rows;
        if n > 12 {
            return Err(resource(format!(
                "determinant of a {n}x{n} matrix is past the expansion guard"
            )));
        }
        if n == 0 {
            return Ok(Poly::one());
        }
        let mut memo: BTreeMap<u64, Poly> = BTreeMap::new();
        fn go(m: &PolyMatrix, cols: u64, memo: &mut BTreeMap<u64, Poly>) -> Poly {
            if cols == 0 {
                return Poly::one();
            }
            if let Some(hit) = memo.get(&cols) {
                return hit.clone();
            }
            let n = m.rows;
            let row = n - cols.count_ones() as usize;
            let mut acc = Poly::zero();
            let mut sign = false;
            for j in 0..n {
                if cols >> j & 1 == 0 {
                    continue;
                }
                let e = m.get(row, j);
                if !e.is_zero() {
                    let sub = go(m, cols & !(1 << j), memo);
                    let term = e * &sub;
                    acc = if sign { &acc - &term } else { &acc + &term };
                }
                sign = !sign;
            }
            memo.insert(cols, acc.clone());
            acc
        }
        Ok(go(self, (1u64 << n) - 1, &mut memo))
    }

    /// Is the determinant a nonzero constant (a unit over the polynomial
    /// ring with rational coefficients)?
    pub fn is_unimodular(&self) -> Result<bool> {
        let d = self.det()?;
        Ok(d.as_constant().is_some_and(|c| !c.is_zero()))
    }
}

/// A matrix factorization of `f`: a pair of square matrices composing to
/// f times the identity in both orders.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFactorization {
    pub f: Poly,
    pub phi: PolyMatrix,
    pub psi: PolyMatrix,
}

impl MatrixFactorization {
    pub fn new(f: Poly, phi: PolyMatrix, psi: PolyMatrix) -> Self {
        MatrixFactorization { f, phi, psi }
    }

    pub fn size(&self) -> usize {
        self.phi.rows()
    }

    /// (1, f): the identity followed by multiplication by f.
    pub fn trivial_one(f: &Poly) -> Self {
        MatrixFactorization {
            f: f.clone(),
            phi: PolyMatrix::identity(1),
            psi: PolyMatrix::scalar(1, f),
        }
    }

    /// (f, 1): multiplication by f followed by the identity.
    pub fn trivial_two(f: &Poly) -> Self {
        MatrixFactorization {
            f: f.clone(),
            phi: PolyMatrix::scalar(1, f),
            psi: PolyMatrix::identity(1),
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut vars = self.f.variables();
        vars.extend(self.phi.variables());
        vars.extend(self.psi.variables());
        vars
    }
}

/// Both composites must be f times the identity, on square matrices of
/// matching size.
pub fn mf_validate(mf: &MatrixFactorization) -> ValidationReport {
    let mut report = ValidationReport::new();
    let square = mf.phi.rows() == mf.phi.cols()
        && mf.psi.rows() == mf.psi.cols()
        && mf.phi.rows() == mf.psi.rows();
    report.push(CheckResult::of(
        "shapes",
        square,
        format!(
            "phi is {}x{}, psi is {}x{}",
            mf.phi.rows(),
            mf.phi.cols(),
            mf.psi.rows(),
            mf.psi.cols()
        ),
    ));
    if !square {
        report.push(CheckResult::fail("phi_psi", "skipped: shapes are off"));
        report.push(CheckResult::fail("psi_phi", "skipped: shapes are off"));
        return report;
    }
    let n = mf.phi.rows();
    let target = PolyMatrix::scalar(n, &mf.f);
    let describe = |law: &str, product: &PolyMatrix| {
        let off = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .find(|&(i, j)| product.get(i, j) != target.get(i, j));
        match off {
            None => format!("{law} = f · id"),
            Some((i, j)) => format!(
                "{law} has entry {} at ({i}, {j}), expected {}",
                product.get(i, j),
                target.get(i, j)
            ),
        }
    };
    let phi_psi = mf.phi.mul(&mf.psi);
    report.push(CheckResult::of(
        "phi_psi",
        phi_psi == target,
        describe("phi · psi", &phi_psi),
    ));
    let psi_phi = mf.psi.mul(&mf.phi);
    report.push(CheckResult::of(
        "psi_phi",
        psi_phi == target,
        describe("psi · phi", &psi_phi),
    ));
    report
}

/// The tensor product of factorizations of f and g over disjoint variables:
/// a factorization of f + g of twice the product size, assembled from the
/// four Kronecker blocks and revalidated before being returned.
pub fn mf_tensor_hat(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
) -> Result<MatrixFactorization> {
    let shared: Vec<String> =
        a.variables().intersection(&b.variables()).cloned().collect();
    if !shared.is_empty() {
        return Err(precondition(format!(
            "tensor factors must use disjoint variables; both use {}",
            shared.join(", ")
        )));
    }
    for (name, mf) in [("left", a), ("right", b)] {
        if !mf_validate(mf).passed() {
            return Err(precondition(format!(
                "{name} factor is not a matrix factorization"
            )));
        }
    }
    let i_a = PolyMatrix::identity(a.size());
    let i_b = PolyMatrix::identity(b.size());
    let phi = PolyMatrix::from_blocks(
        &a.phi.kron(&i_b),
        &i_a.kron(&b.phi),
        &i_a.kron(&b.psi).neg(),
        &a.psi.kron(&i_b),
    )?;
    let psi = PolyMatrix::from_blocks(
        &a.psi.kron(&i_b),
        &i_a.kron(&b.phi).neg(),
        &i_a.kron(&b.psi),
        &a.phi.kron(&i_b),
    )?;
    let out = MatrixFactorization::new(&a.f + &b.f, phi, psi);
    if !mf_validate(&out).passed() {
        return Err(internal("tensor product failed to factor the sum"));
    }
    Ok(out)
}

/// Direct sum of factorizations of the same polynomial.
pub fn mf_direct_sum(parts: &[MatrixFactorization]) -> Result<MatrixFactorization> {
    let first = parts
        .first()
        .ok_or_else(|| precondition("direct sum of no factorizations"))?;
    if parts.iter().any(|p| p.f != first.f) {
        return Err(precondition("direct summands factor different polynomials"));
    }
    let phis: Vec<&PolyMatrix> = parts.iter().map(|p| &p.phi).collect();
    let psis: Vec<&PolyMatrix> = parts.iter().map(|p| &p.psi).collect();
    Ok(MatrixFactorization::new(
        first.f.clone(),
        PolyMatrix::block_diag(&phis),
        PolyMatrix::block_diag(&psis),
    ))
}

/// An isomorphism witness: invertible matrices intertwining the two
/// factorizations, alpha1 on the odd side and alpha0 on the even side.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MfIsoWitness {
    pub alpha0: PolyMatrix,
    pub alpha1: PolyMatrix,
}

/// Does the witness really carry `a` to `b`? Checks both intertwining
/// squares and that both components are unimodular.
pub fn verify_mf_iso(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
    w: &MfIsoWitness,
) -> Result<bool> {
    if a.size() != b.size() {
        return Ok(false);
    }
    let n = a.size();
    if w.alpha0.rows() != n || w.alpha0.cols() != n || w.alpha1.rows() != n
        || w.alpha1.cols() != n
    {
        return Ok(false);
    }
    let square_one = b.phi.mul(&w.alpha1) == w.alpha0.mul(&a.phi);
    let square_two = b.psi.mul(&w.alpha0) == w.alpha1.mul(&a.psi);
    Ok(square_one
        && square_two
        && w.alpha0.is_unimodular()?
        && w.alpha1.is_unimodular()?)
}

/// All monomials in `vars` of total degree at most `d`, in a fixed order.
fn monomials_up_to(vars: &[String], d: u32) -> Vec<Poly> {
    let mut out = vec![Poly::one()];
    for _ in 0..d {
        let mut next = Vec::new();
        for m in &out {
            for v in vars {
                let candidate = m * &Poly::var(v);
                if !next.contains(&candidate) && !out.contains(&candidate) {
                    next.push(candidate);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        out.extend(next);
    }
    out.sort_by_key(|p| p.to_string());
    out.dedup();
    out
}

/// Exact rational nullspace: returns a basis of solutions of M x = 0, where
/// M has `rows` x `cols` entries in row-major order.
fn nullspace(rows: usize, cols: usize, mut m: Vec<BigRational>) -> Vec<Vec<BigRational>> {
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; cols];
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let pivot = (r..rows).find(|&i| !m[i * cols + c].is_zero());
        let Some(p) = pivot else { continue };
        for j in 0..cols {
            m.swap(r * cols + j, p * cols + j);
        }
        let inv = m[r * cols + c].clone();
        for j in 0..cols {
            let v = &m[r * cols + j] / &inv;
            m[r * cols + j] = v;
        }
        for i in 0..rows {
            if i == r || m[i * cols + c].is_zero() {
                continue;
            }
            let factor = m[i * cols + c].clone();
            for j in 0..cols {
                let v = &m[i * cols + j] - &(&factor * &m[r * cols + j]);
                m[i * cols + j] = v;
            }
        }
        pivot_of_col[c] = Some(r);
        r += 1;
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for c in 0..cols {
            if let Some(pr) = pivot_of_col[c] {
                v[c] = -m[pr * cols + free].clone();
            }
        }
        basis.push(v);
    }
    basis
}

/// Searches for an isomorphism witness between factorizations of the same
/// polynomial. The odd component alpha1 ranges over matrices with entries of
/// total degree at most `max_degree`; the divisibility of
/// Φ_b · alpha1 · Ψ_a by f is a linear condition on its coefficients, so the
/// candidates form a rational nullspace, which is then scanned for a
/// combination with unimodular components. `Ok(None)` means no witness was
/// found within these bounds, not a proof that none exists.
pub fn mf_iso_check(
    a: &MatrixFactorization,
    b: &MatrixFactorization,
    max_degree: u32,
) -> Result<Option<MfIsoWitness>> {
    if a.f != b.f {
        return Err(precondition(
            "isomorphism check needs factorizations of the same polynomial",
        ));
    }
    if a.size() != b.size() {
        return Ok(None);
    }
    let n = a.size();
    if n == 0 {
        return Ok(Some(MfIsoWitness {
            alpha0: PolyMatrix::zero(0, 0),
            alpha1: PolyMatrix::zero(0, 0),
        }));
    }
    let vars: Vec<String> = a.variables().union(&b.variables()).cloned().collect();
    let monos = monomials_up_to(&vars, max_degree);
    let t = monos.len();
    let unknowns = n * n * t;
    if unknowns > 600 {
        return Err(resource(format!(
            "{unknowns} unknowns in the isomorphism search exceed the guard"
        )));
    }

    // Residue of Φ_b · E_{kl}·mono · Ψ_a modulo f, per unknown.
    let mut residues: Vec<Vec<Poly>> = Vec::with_capacity(unknowns);
    for k in 0..n {
        for l in 0..n {
            for mono in &monos {
                let mut entry_residues = Vec::with_capacity(n * n);
                for i in 0..n {
                    for j in 0..n {
                        let contrib = &(b.phi.get(i, k) * mono) * a.psi.get(l, j);
                        entry_residues.push(contrib.rem_mod(&a.f));
                    }
                }
                residues.push(entry_residues);
            }
        }
    }
    // One equation per (matrix entry, residue monomial).
    let mut residue_monos: BTreeSet<crate::poly::Monomial> = BTreeSet::new();
    for r in &residues {
        for p in r {
            residue_monos.extend(p.terms().map(|(m, _)| m.clone()));
        }
    }
    let residue_monos: Vec<crate::poly::Monomial> = residue_monos.into_iter().collect();
    let eq_rows = n * n * residue_monos.len();
    let mut mat = vec![BigRational::zero(); eq_rows * unknowns];
    for (u, r) in residues.iter().enumerate() {
        for (e, p) in r.iter().enumerate() {
            for (m, c) in p.terms() {
                let mi = residue_monos.binary_search(m).expect("known monomial");
                let row = e * residue_monos.len() + mi;
                mat[row * unknowns + u] = c.clone();
            }
        }
    }
    let basis = nullspace(eq_rows, unknowns, mat);
    if basis.is_empty() {
        return Ok(None);
    }

    let build_alpha1 = |coeffs: &[(usize, i64)]| -> PolyMatrix {
        let mut alpha = PolyMatrix::zero(n, n);
        for &(bi, w) in coeffs {
            if w == 0 {
                continue;
            }
            let weight = Poly::int(w);
            for k in 0..n {
                for l in 0..n {
                    let mut cell = Poly::zero();
                    for (mi, mono) in monos.iter().enumerate() {
                        let c = &basis[bi][(k * n + l) * t + mi];
                        if !c.is_zero() {
                            cell = &cell + &mono.scale(c);
                        }
                    }
                    *alpha.get_mut(k, l) =
                        alpha.get(k, l) + &(&cell * &weight);
                }
            }
        }
        alpha
    };

    const CANDIDATE_CAP: usize = 4000;
    let k = basis.len();
    let mut candidates: Vec<Vec<(usize, i64)>> = Vec::new();
    for i in 0..k.min(CANDIDATE_CAP) {
        candidates.push(vec![(i, 1)]);
    }
    candidates.push((0..k).map(|i| (i, 1)).collect());
    candidates.push((0..k).map(|i| (i, if i % 2 == 0 { 1 } else { -1 })).collect());
    'pairs: for i in 0..k {
        for j in i + 1..k {
            for (wi, wj) in [(1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1)] {
                if candidates.len() >= CANDIDATE_CAP {
                    break 'pairs;
                }
                candidates.push(vec![(i, wi), (j, wj)]);
            }
        }
    }
    'triples: for i in 0..k {
        for j in i + 1..k {
            for l in j + 1..k {
                for (wj, wl) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                    if candidates.len() >= CANDIDATE_CAP {
                        break 'triples;
                    }
                    candidates.push(vec![(i, 1), (j, wj), (l, wl)]);
                }
            }
        }
    }

    for coeffs in &candidates {
        let alpha1 = build_alpha1(coeffs);
        if alpha1.is_zero() {
            continue;
        }
        let m = b.phi.mul(&alpha1).mul(&a.psi);
        let mut alpha0 = PolyMatrix::zero(n, n);
        let mut divisible = true;
        'fill: for i in 0..n {
            for j in 0..n {
                match m.get(i, j).divide_exact(&a.f) {
                    Some(q) => *alpha0.get_mut(i, j) = q,
                    None => {
                        divisible = false;
                        break 'fill;
                    }
                }
            }
        }
        if !divisible {
            continue;
        }
        let w = MfIsoWitness { alpha0, alpha1 };
        if verify_mf_iso(a, b, &w)? {
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Outcome of the absorption test: tensoring with the trivial factorization
/// of g must turn any factorization of f into a sum of trivial
/// factorizations of f + g.
#[derive(Clone, Debug)]
pub struct AbsorptionOutcome {
    pub product: MatrixFactorization,
    pub target: MatrixFactorization,
    pub witness: Option<MfIsoWitness>,
    pub report: ValidationReport,
}

pub fn absorption_check(
    a: &MatrixFactorization,
    g: &Poly,
    max_degree: u32,
) -> Result<AbsorptionOutcome> {
    let product = mf_tensor_hat(a, &MatrixFactorization::trivial_one(g))?;
    let total = &a.f + g;
    let n = a.size();
    let mut parts = Vec::with_capacity(2 * n);
    for _ in 0..n {
        parts.push(MatrixFactorization::trivial_one(&total));
    }
    for _ in 0..n {
        parts.push(MatrixFactorization::trivial_two(&total));
    }
    let target = mf_direct_sum(&parts)?;

    let mut report = ValidationReport::new();
    report.push(CheckResult::of(
        "product_is_factorization",
        mf_validate(&product).passed(),
        format!("size {} factorization of {}", product.size(), product.f),
    ));
    report.push(CheckResult::of(
        "target_is_factorization",
        mf_validate(&target).passed(),
        format!("{n} trivial pairs of {total}"),
    ));
    let witness = mf_iso_check(&product, &target, max_degree)?;
    match &witness {
        Some(w) => {
            let ok = verify_mf_iso(&product, &target, w)?;
            report.push(CheckResult::of(
                "isomorphism_found",
                ok,
                format!("witness verified at degree ≤ {max_degree}"),
            ));
        }
        None => report.push(CheckResult::fail(
            "isomorphism_found",
            format!("no witness within degree {max_degree}"),
        )),
    }
    Ok(AbsorptionOutcome { product, target, witness, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Poly {
        Poly::parse(s).unwrap()
    }

    fn mat(rows: &[&[&str]]) -> PolyMatrix {
        PolyMatrix::from_rows(
            rows.iter().map(|r| r.iter().map(|s| p(s)).collect()).collect(),
        )
        .unwrap()
    }

    fn mf(f: &str, phi: &[&[&str]], psi: &[&[&str]]) -> MatrixFactorization {
        MatrixFactorization::new(p(f), mat(phi), mat(psi))
    }

    #[test]
    fn validation_passes_and_fails() {
        let good = mf("x^2", &[&["x"]], &[&["x"]]);
        assert!(mf_validate(&good).passed());
        let bad = mf("x^2", &[&["x"]], &[&["x + 1"]]);
        assert!(!mf_validate(&bad).passed());
        let ragged = MatrixFactorization::new(
            p("x"),
            PolyMatrix::zero(1, 2),
            PolyMatrix::zero(2, 1),
        );
        assert!(!mf_validate(&ragged).passed());
    }

    #[test]
    fn kron_is_row_major_left_outer() {
        let a = mat(&[&["1", "2"], &["3", "4"]]);
        let b = mat(&[&["0", "5"], &["6", "7"]]);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        // Entry (0,1) = a[0][0]*b[0][1] = 5; entry (0,3) = a[0][1]*b[0][1] = 10.
        assert_eq!(k.get(0, 1), &p("5"));
        assert_eq!(k.get(0, 3), &p("10"));
        assert_eq!(k.get(2, 0), &Poly::zero());
        assert_eq!(k.get(3, 3), &p("28"));
    }

    #[test]
    fn determinants() {
        let m = mat(&[&["x", "1"], &["1", "0"]]);
        assert_eq!(m.det().unwrap(), p("-1"));
        assert!(m.is_unimodular().unwrap());
        let s = mat(&[&["x", "y"], &["-y", "x"]]);
        assert_eq!(s.det().unwrap(), p("x^2 + y^2"));
        assert!(!s.is_unimodular().unwrap());
        assert_eq!(PolyMatrix::identity(3).det().unwrap(), Poly::one());
        assert!(PolyMatrix::zero(2, 3).det().is_err());
    }

    #[test]
    fn tensor_of_two_linear_factorizations() {
        let a = mf("x^2", &[&["x"]], &[&["x"]]);
        let b = mf("y^2", &[&["y"]], &[&["y"]]);
        let t = mf_tensor_hat(&a, &b).unwrap();
        assert_eq!(t.f, p("x^2 + y^2"));
        assert_eq!(t.phi, mat(&[&["x", "y"], &["-y", "x"]]));
        assert_eq!(t.psi, mat(&[&["x", "-y"], &["y", "x"]]));
        assert!(mf_validate(&t).passed());
    }

    #[test]
    fn tensor_with_trivial_factor() {
        let a = mf("x^2", &[&["x"]], &[&["x"]]);
        let t = mf_tensor_hat(&a, &MatrixFactorization::trivial_one(&p("y^2"))).unwrap();
        assert_eq!(t.phi, mat(&[&["x", "1"], &["-y^2", "x"]]));
        assert_eq!(t.psi, mat(&[&["x", "-1"], &["y^2", "x"]]));
    }

    #[test]
    fn tensor_rejects_shared_variables() {
        let a = mf("x^2", &[&["x"]], &[&["x"]]);
        assert!(matches!(
            mf_tensor_hat(&a, &a),
            Err(crate::error::EngineError::Precondition(_))
        ));
    }

    #[test]
    fn absorption_fixture() {
        let a = mf("x^2", &[&["x"]], &[&["x"]]);
        let out = absorption_check(&a, &p("y^2"), 1).unwrap();
        assert!(out.report.passed(), "{}", out.report);
        let w = out.witness.unwrap();
        assert!(verify_mf_iso(&out.product, &out.target, &w).unwrap());

        // The known hand witness: alpha1 = [[x,1],[1,0]] with forced even
        // component [[1,0],[x,-1]]; both have determinant -1. Check it is
        // accepted by the verifier (the search may find another).
        let hand = MfIsoWitness {
            alpha0: mat(&[&["1", "0"], &["x", "-1"]]),
            alpha1: mat(&[&["x", "1"], &["1", "0"]]),
        };
        assert!(verify_mf_iso(&out.product, &out.target, &hand).unwrap());
    }

    #[test]
    fn absorption_needs_degree_one() {
        let a = mf("x^2", &[&["x"]], &[&["x"]]);
        let out = absorption_check(&a, &p("y^2"), 0).unwrap();
        assert!(out.witness.is_none());
        assert!(!out.report.passed());
    }

    #[test]
    fn iso_check_requires_same_polynomial() {
        let a = mf("x^2", &[&["x"]], &[&["x"]]);
        let b = mf("y^2", &[&["y"]], &[&["y"]]);
        assert!(mf_iso_check(&a, &b, 1).is_err());
    }

    #[test]
    fn iso_of_identical_factorizations() {
        let a = mf("x^2", &[&["x"]], &[&["x"]]);
        let w = mf_iso_check(&a, &a, 0).unwrap().unwrap();
        assert!(verify_mf_iso(&a, &a, &w).unwrap());
    }

    #[test]
    fn direct_sum_shapes() {
        let a = MatrixFactorization::trivial_one(&p("x^3"));
        let b = MatrixFactorization::trivial_two(&p("x^3"));
        let s = mf_direct_sum(&[a, b]).unwrap();
        assert_eq!(s.size(), 2);
        assert!(mf_validate(&s).passed());
        let c = MatrixFactorization::trivial_one(&p("y"));
        assert!(mf_direct_sum(&[s, c]).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let a = mf("x^2 + y^2", &[&["x", "y"], &["-y", "x"]], &[&["x", "-y"], &["y", "x"]]);
        let json = serde_json::to_string(&a).unwrap();
        let back: MatrixFactorization = serde_json::from_str(&json).unwrap();
        assert_eq!(a, back);
        // Ragged matrices are rejected at the serde boundary.
        let bad = r#"{"f":"x","phi":[["x"],["x","1"]],"psi":[["1"]]}"#;
        assert!(serde_json::from_str::<MatrixFactorization>(bad).is_err());
    }
}
