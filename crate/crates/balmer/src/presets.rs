//! Built-in presentation corpus. The same data ships as JSON under
//! `presets/`; a test pins the two representations to each other.

use std::collections::BTreeSet;

use crate::presentation::{
    CategoryPresentation, ExtriangleGen, FusionTable, Label, Multiplicity, ObjectClass,
};

fn lab(s: &str) -> Label {
    Label::new(s).expect("preset label")
}

fn class(entries: &[(&str, Multiplicity)]) -> ObjectClass {
    ObjectClass::from_entries(entries.iter().map(|(l, m)| (lab(l), *m)))
}

struct Builder {
    p: CategoryPresentation,
}

impl Builder {
    fn new(labels: &[&str], unit: &[(&str, Multiplicity)]) -> Builder {
        Builder {
            p: CategoryPresentation {
                labels: labels.iter().map(|l| lab(l)).collect(),
                unit: class(unit),
                fusion: FusionTable::new(),
                extriangles: Vec::new(),
                proj_injectives: BTreeSet::new(),
                symmetric: true,
            },
        }
    }

    /// Insert a*b and, since every preset is symmetric, b*a.
    fn fuse(mut self, a: &str, b: &str, value: &[(&str, Multiplicity)]) -> Builder {
        self.p.fusion.insert(lab(a), lab(b), class(value));
        self.p.fusion.insert(lab(b), lab(a), class(value));
        self
    }

    fn extriangle(
        mut self,
        left: &[(&str, Multiplicity)],
        middle: &[(&str, Multiplicity)],
        right: &[(&str, Multiplicity)],
    ) -> Builder {
        self.p.extriangles.push(ExtriangleGen::new(class(left), class(middle), class(right)));
        self
    }

    fn proj_injective(mut self, l: &str) -> Builder {
        self.p.proj_injectives.insert(lab(l));
        self
    }

    fn build(self) -> CategoryPresentation {
        self.p
    }
}

/// Finitely generated projectives over a field: one label, trivial fusion.
pub fn proj_field() -> CategoryPresentation {
    Builder::new(&["1"], &[("1", 1)]).fuse("1", "1", &[("1", 1)]).build()
}

/// Projectives over a product of two fields. The unit is the sum of the two
/// idempotent summands and the cross products vanish.
pub fn proj_k_x_k() -> CategoryPresentation {
    Builder::new(&["S", "T"], &[("S", 1), ("T", 1)])
        .fuse("S", "S", &[("S", 1)])
        .fuse("S", "T", &[])
        .fuse("T", "T", &[("T", 1)])
        .build()
}

/// Projectives over a product of n fields, one idempotent label per factor.
pub fn proj_k_pow(n: usize) -> CategoryPresentation {
    assert!(n >= 1, "need at least one factor");
    let names: Vec<String> = (1..=n).map(|i| format!("S{i}")).collect();
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let unit: Vec<(&str, Multiplicity)> = refs.iter().map(|l| (*l, 1)).collect();
    let mut b = Builder::new(&refs, &unit);
    for i in 0..n {
        for j in i..n {
            if i == j {
                b = b.fuse(refs[i], refs[j], &[(refs[i], 1)]);
            } else {
                b = b.fuse(refs[i], refs[j], &[]);
            }
        }
    }
    b.build()
}

/// Projectives over a Dedekind domain with class group of order two: the
/// ring label R, one non-principal ideal class I with I*I = R, and a split
/// generator recording I ⊕ I = R ⊕ R at the level of classes.
pub fn dedekind_cl2() -> CategoryPresentation {
    Builder::new(&["R", "I"], &[("R", 1)])
        .fuse("R", "R", &[("R", 1)])
        .fuse("R", "I", &[("I", 1)])
        .fuse("I", "I", &[("R", 1)])
        .extriangle(&[("I", 1)], &[("R", 2)], &[("I", 1)])
        .build()
}

/// Finite-dimensional modules over the group algebra of the order-2 group in
/// characteristic 2: trivial module k, free module kC2, the non-split
/// extension k -> kC2 -> k, and kC2 projective-injective.
pub fn mod_kc2() -> CategoryPresentation {
    Builder::new(&["k", "kC2"], &[("k", 1)])
        .fuse("k", "k", &[("k", 1)])
        .fuse("k", "kC2", &[("kC2", 1)])
        .fuse("kC2", "kC2", &[("kC2", 2)])
        .extriangle(&[("k", 1)], &[("kC2", 1)], &[("k", 1)])
        .proj_injective("kC2")
        .build()
}

/// The stable module category of the order-2 group algebra: one label whose
/// suspension is itself, recorded by the generator k -> 0 -> k.
pub fn stmod_kc2() -> CategoryPresentation {
    Builder::new(&["k"], &[("k", 1)])
        .fuse("k", "k", &[("k", 1)])
        .extriangle(&[("k", 1)], &[], &[("k", 1)])
        .build()
}

/// Chain-complex toy: the unit complex u and one contractible label c (the
/// cone on the identity, shifts conflated), sitting in the degreewise split
/// generator u -> c -> u. Contractibles are the projective-injectives.
pub fn cc_split() -> CategoryPresentation {
    Builder::new(&["u", "c"], &[("u", 1)])
        .fuse("u", "u", &[("u", 1)])
        .fuse("u", "c", &[("c", 1)])
        .fuse("c", "c", &[("c", 2)])
        .extriangle(&[("u", 1)], &[("c", 1)], &[("u", 1)])
        .proj_injective("c")
        .build()
}

/// Not part of the shipped corpus: a toy with a tensor-nilpotent label, so
/// the least radical ideal is nonempty. Used by tests.
pub fn nilpotent_toy() -> CategoryPresentation {
    Builder::new(&["1", "n"], &[("1", 1)])
        .fuse("1", "1", &[("1", 1)])
        .fuse("1", "n", &[("n", 1)])
        .fuse("n", "n", &[])
        .build()
}

/// The shipped corpus, in canonical order. Names match `presets/<name>.json`.
pub fn all() -> Vec<(&'static str, CategoryPresentation)> {
    vec![
        ("proj_field", proj_field()),
        ("proj_k_x_k", proj_k_x_k()),
        ("dedekind_cl2", dedekind_cl2()),
        ("mod_kC2", mod_kc2()),
        ("stmod_kC2", stmod_kc2()),
        ("cc_split", cc_split()),
    ]
}

pub fn by_name(name: &str) -> Option<CategoryPresentation> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, p)| p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schema::{from_json_str, to_json_pretty, PresentationFile};
    use std::path::PathBuf;

    #[test]
    fn every_preset_validates() {
        for (name, p) in all() {
            let report = p.validate().expect("validate");
            assert!(report.passed(), "{name}: {report}");
        }
        assert!(nilpotent_toy().validate().unwrap().passed());
        for n in 1..=5 {
            assert!(proj_k_pow(n).validate().unwrap().passed());
        }
    }

    #[test]
    fn shipped_files_match_the_code_byte_for_byte() {
        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../presets");
        for (name, p) in all() {
            let path = dir.join(format!("{name}.json"));
            let on_disk = std::fs::read_to_string(&path)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            let from_code = to_json_pretty(&PresentationFile::from_presentation(&p)).unwrap();
            assert_eq!(on_disk, from_code, "{name}.json drifted from the code corpus");
            let reread = from_json_str::<PresentationFile>(&on_disk, name)
                .unwrap()
                .to_presentation()
                .unwrap();
            assert_eq!(reread, p, "{name}.json does not parse back to the code preset");
        }
    }

    #[test]
    fn by_name_finds_each_corpus_entry() {
        for (name, p) in all() {
            assert_eq!(by_name(name), Some(p));
        }
        assert_eq!(by_name("missing"), None);
    }
}
