//! JSON file formats and the report document the CLI emits.
//!
//! Every document type here is strict: unknown fields are rejected, zero
//! multiplicities are rejected, and every referenced name must be declared.
//! Fusion tables are keyed by `"a*b"` strings; a symmetric presentation may
//! list each unordered pair once and the missing mirror is filled in, while an
//! asymmetric one must list both orders. Serialization is deterministic, so
//! identical inputs produce byte-identical documents.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{schema, Result};
use crate::ideal::{
    balmer_spectrum, enumerate_radical_ideals, thomason_bijection_check, FiniteSpectralSpace,
};
use crate::lattice::FiniteBoundedLattice;
use crate::mf::{MatrixFactorization, PolyMatrix};
use crate::poly::Poly;
use crate::presentation::{
    CategoryPresentation, ExtriangleGen, FusionTable, Label, Multiplicity, ObjectClass,
};
use crate::report::CheckResult;
use crate::space::FiniteTopSpace;
use crate::splice::{ArrowWord, ExtensionChain};

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut out = serde_json::to_string_pretty(value)?;
    out.push('\n');
    Ok(out)
}

pub fn from_json_str<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| schema(format!("{what}: {e}")))
}

fn class_of_map(map: &BTreeMap<String, Multiplicity>, what: &str) -> Result<ObjectClass> {
    let mut out = ObjectClass::zero();
    for (name, &mult) in map {
        if mult == 0 {
            return Err(schema(format!("{what}: label {name} has zero multiplicity")));
        }
        out.add_label(Label::new(name)?, mult);
    }
    Ok(out)
}

fn map_of_class(c: &ObjectClass) -> BTreeMap<String, Multiplicity> {
    c.iter().map(|(l, m)| (l.to_string(), m)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtriangleFile {
    pub left: BTreeMap<String, Multiplicity>,
    pub middle: BTreeMap<String, Multiplicity>,
    pub right: BTreeMap<String, Multiplicity>,
}

/// On-disk presentation document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationFile {
    pub labels: Vec<String>,
    pub unit: BTreeMap<String, Multiplicity>,
    pub symmetric: bool,
    pub fusion: BTreeMap<String, BTreeMap<String, Multiplicity>>,
    #[serde(default)]
    pub extriangles: Vec<ExtriangleFile>,
    #[serde(default)]
    pub proj_injectives: Vec<String>,
}

impl PresentationFile {
    pub fn to_presentation(&self) -> Result<CategoryPresentation> {
        let mut labels: BTreeSet<Label> = BTreeSet::new();
        for name in &self.labels {
            if !labels.insert(Label::new(name)?) {
                return Err(schema(format!("label {name} is declared twice")));
            }
        }
        let unit = class_of_map(&self.unit, "unit")?;

        let mut entries: BTreeMap<(Label, Label), ObjectClass> = BTreeMap::new();
        for (key, value) in &self.fusion {
            let (a, b) = match key.split_once('*') {
                Some(parts) if key.matches('*').count() == 1 => parts,
                _ => return Err(schema(format!("fusion key {key:?} is not of the form a*b"))),
            };
            let value = class_of_map(value, &format!("fusion entry {key}"))?;
            entries.insert((Label::new(a)?, Label::new(b)?), value);
        }
        if self.symmetric {
            for ((a, b), v) in entries.clone() {
                match entries.get(&(b.clone(), a.clone())) {
                    None => {
                        entries.insert((b, a), v);
                    }
                    Some(w) if *w != v => {
                        return Err(schema(format!(
                            "symmetric table disagrees with itself: {a}*{b} = {v} but {b}*{a} = {w}"
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
        let mut fusion = FusionTable::new();
        for ((a, b), v) in entries {
            fusion.insert(a, b, v);
        }

        let mut extriangles = Vec::new();
        for (i, t) in self.extriangles.iter().enumerate() {
            extriangles.push(ExtriangleGen::new(
                class_of_map(&t.left, &format!("extriangle {i} left"))?,
                class_of_map(&t.middle, &format!("extriangle {i} middle"))?,
                class_of_map(&t.right, &format!("extriangle {i} right"))?,
            ));
        }
        let mut proj_injectives = BTreeSet::new();
        for name in &self.proj_injectives {
            proj_injectives.insert(Label::new(name)?);
        }

        let p = CategoryPresentation {
            labels,
            unit,
            fusion,
            extriangles,
            proj_injectives,
            symmetric: self.symmetric,
        };
        // Totality and declaredness; a symmetric=false file missing a mirror
        // entry fails here with the missing pair named.
        p.check_schema()?;
        Ok(p)
    }

    pub fn from_presentation(p: &CategoryPresentation) -> PresentationFile {
        let mut fusion = BTreeMap::new();
        for ((a, b), v) in p.fusion.iter() {
            // One order per unordered pair when the mirror carries no extra
            // information.
            if p.symmetric && a > b && p.fusion.get(b, a) == Some(v) {
                continue;
            }
            fusion.insert(format!("{a}*{b}"), map_of_class(v));
        }
        PresentationFile {
            labels: p.labels.iter().map(|l| l.to_string()).collect(),
            unit: map_of_class(&p.unit),
            symmetric: p.symmetric,
            fusion,
            extriangles: p
                .extriangles
                .iter()
                .map(|g| ExtriangleFile {
                    left: map_of_class(&g.left),
                    middle: map_of_class(&g.middle),
                    right: map_of_class(&g.right),
                })
                .collect(),
            proj_injectives: p.proj_injectives.iter().map(|l| l.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumSection {
    pub points: Vec<String>,
    pub closed_sets: Vec<Vec<String>>,
    pub specialization_edges: Vec<(String, String)>,
    pub specialization_direction: String,
}

impl SpectrumSection {
    pub fn of(space: &FiniteSpectralSpace) -> SpectrumSection {
        let name = |i: usize| space.points[i].to_string();
        SpectrumSection {
            points: space.points.iter().map(|p| p.to_string()).collect(),
            closed_sets: space
                .closed_sets
                .iter()
                .map(|c| c.iter().map(|&i| name(i)).collect())
                .collect(),
            specialization_edges: space
                .specialization
                .iter()
                .map(|&(p, q)| (name(p), name(q)))
                .collect(),
            specialization_direction: space.specialization_direction.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BijectionSection {
    pub ideal_count: usize,
    pub thomason_count: usize,
    pub pairs: Vec<(String, String)>,
}

/// The full analysis document: every radical thick tensor ideal, the prime
/// ones, the spectrum they form, and the ideal/support correspondence, plus
/// every check that ran along the way.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub ideals: Vec<String>,
    pub primes: Vec<String>,
    pub spectrum: SpectrumSection,
    pub bijection: BijectionSection,
    pub checks: Vec<CheckResult>,
}

pub fn full_report(p: &CategoryPresentation, cap: Option<usize>) -> Result<ReportFile> {
    let lattice = enumerate_radical_ideals(p, cap)?;
    let space = balmer_spectrum(p, cap)?;
    let bijection = thomason_bijection_check(p, cap)?;
    let mut checks = p.validate()?.checks;
    checks.extend(bijection.checks.clone());
    Ok(ReportFile {
        ideals: lattice.elements.iter().map(|e| e.to_string()).collect(),
        primes: space.points.iter().map(|p| p.to_string()).collect(),
        spectrum: SpectrumSection::of(&space),
        bijection: BijectionSection {
            ideal_count: bijection.ideal_count,
            thomason_count: bijection.thomason_count,
            pairs: bijection.pairs,
        },
        checks,
    })
}

/// A finite topological space, written by point names and closed sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub points: Vec<String>,
    pub closed_sets: Vec<Vec<String>>,
}

impl SpaceFile {
    pub fn to_space(&self) -> Result<FiniteTopSpace> {
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, name) in self.points.iter().enumerate() {
            if index.insert(name, i).is_some() {
                return Err(schema(format!("point {name} is declared twice")));
            }
        }
        let mut closed: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        for set in &self.closed_sets {
            let mut c = BTreeSet::new();
            for name in set {
                match index.get(name.as_str()) {
                    Some(&i) => {
                        c.insert(i);
                    }
                    None => {
                        return Err(schema(format!("closed set mentions unknown point {name}")))
                    }
                }
            }
            closed.insert(c);
        }
        FiniteTopSpace::new(self.points.clone(), closed)
    }

    pub fn from_space(x: &FiniteTopSpace) -> SpaceFile {
        SpaceFile {
            points: x.names().to_vec(),
            closed_sets: x
                .closed_sets()
                .iter()
                .map(|c| c.iter().map(|&i| x.names()[i].clone()).collect())
                .collect(),
        }
    }
}

/// A finite lattice, written as names plus order pairs. Reflexivity and
/// transitivity are completed automatically, so Hasse-style files work;
/// antisymmetry violations and missing bounds are reported by construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub names: Vec<String>,
    pub le: Vec<(String, String)>,
}

impl LatticeFile {
    pub fn to_lattice(&self) -> Result<FiniteBoundedLattice> {
        let n = self.names.len();
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, name) in self.names.iter().enumerate() {
            if index.insert(name, i).is_some() {
                return Err(schema(format!("lattice element {name} is declared twice")));
            }
        }
        let mut le = vec![false; n * n];
        for i in 0..n {
            le[i * n + i] = true;
        }
        for (a, b) in &self.le {
            let ia = *index
                .get(a.as_str())
                .ok_or_else(|| schema(format!("order pair mentions unknown element {a}")))?;
            let ib = *index
                .get(b.as_str())
                .ok_or_else(|| schema(format!("order pair mentions unknown element {b}")))?;
            le[ia * n + ib] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if le[i * n + k] {
                    for j in 0..n {
                        if le[k * n + j] {
                            le[i * n + j] = true;
                        }
                    }
                }
            }
        }
        FiniteBoundedLattice::from_le(self.names.clone(), le)
    }

    pub fn from_lattice(l: &FiniteBoundedLattice) -> LatticeFile {
        let mut pairs = Vec::new();
        for i in 0..l.len() {
            for j in 0..l.len() {
                if i != j && l.le(i, j) {
                    pairs.push((l.names()[i].clone(), l.names()[j].clone()));
                }
            }
        }
        LatticeFile { names: l.names().to_vec(), le: pairs }
    }
}

/// A matrix factorization document. Entries are polynomial strings; the
/// declared variable list is a contract, not a convenience — undeclared
/// variables in any entry are rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MfFile {
    pub variables: Vec<String>,
    pub potential: Poly,
    pub phi: PolyMatrix,
    pub psi: PolyMatrix,
}

impl MfFile {
    pub fn to_mf(&self) -> Result<MatrixFactorization> {
        let n = self.phi.rows();
        if self.phi.cols() != n || self.psi.rows() != n || self.psi.cols() != n {
            return Err(schema(format!(
                "factor matrices must be square and of equal size; got {}x{} and {}x{}",
                self.phi.rows(),
                self.phi.cols(),
                self.psi.rows(),
                self.psi.cols()
            )));
        }
        let declared: BTreeSet<&str> = self.variables.iter().map(|v| v.as_str()).collect();
        let mf = MatrixFactorization::new(self.potential.clone(), self.phi.clone(), self.psi.clone());
        for v in mf.variables() {
            if !declared.contains(v.as_str()) {
                return Err(schema(format!("variable {v} is used but not declared")));
            }
        }
        Ok(mf)
    }

    pub fn from_mf(m: &MatrixFactorization) -> MfFile {
        MfFile {
            variables: m.variables().into_iter().collect(),
            potential: m.f.clone(),
            phi: m.phi.clone(),
            psi: m.psi.clone(),
        }
    }
}

/// One extension chain, written as vertex names, arrow words, and a sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub vertices: Vec<String>,
    pub words: Vec<Vec<String>>,
    pub sign: i8,
}

impl ChainFile {
    pub fn to_chain(&self) -> Result<ExtensionChain> {
        ExtensionChain::new(
            self.vertices.clone(),
            self.words.iter().map(|w| ArrowWord(w.clone())).collect(),
            self.sign,
        )
    }

    pub fn from_chain(c: &ExtensionChain) -> ChainFile {
        ChainFile {
            vertices: c.vertices.clone(),
            words: c.words.iter().map(|w| w.0.clone()).collect(),
            sign: c.sign,
        }
    }
}

/// Input for the splice demonstration: two chains, first then second.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpliceFile {
    pub first: ChainFile,
    pub second: ChainFile,
}
