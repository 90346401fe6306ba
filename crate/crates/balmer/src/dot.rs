//! Deterministic DOT diagrams: Hasse edges for posets and lattices,
//! specialization edges for finite spaces. Node order is index order and edge
//! lists are sorted, so identical structures render to identical bytes.

use crate::error::Result;
use crate::lattice::{FiniteBoundedLattice, FinitePoset};
use crate::space::FiniteTopSpace;

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn render(graph_name: &str, names: &[String], edges: &[(usize, usize)]) -> String {
    let mut out = String::new();
    out.push_str(&format!("digraph {graph_name} {{\n"));
    out.push_str("  rankdir=BT;\n");
    out.push_str("  node [shape=box];\n");
    for (i, name) in names.iter().enumerate() {
        out.push_str(&format!("  n{i} [label=\"{}\"];\n", escape(name)));
    }
    let mut edges = edges.to_vec();
    edges.sort_unstable();
    for (i, j) in edges {
        out.push_str(&format!("  n{i} -> n{j};\n"));
    }
    out.push_str("}\n");
    out
}

/// Hasse diagram: one edge per cover pair, drawn upward.
pub fn dot_of_poset(p: &FinitePoset, graph_name: &str) -> String {
    render(graph_name, p.names(), &p.covers())
}

pub fn dot_of_lattice(l: &FiniteBoundedLattice, graph_name: &str) -> String {
    dot_of_poset(&l.poset(), graph_name)
}

/// Specialization diagram: cover edges of the specialization order, closure
/// points drawn below the points they specialize from.
pub fn dot_of_space(x: &FiniteTopSpace, graph_name: &str) -> Result<String> {
    let poset = x.specialization_poset()?;
    Ok(dot_of_poset(&poset, graph_name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideal::balmer_spectrum;
    use crate::lattice::boolean;
    use crate::presets;

    fn edge_count(dot: &str) -> usize {
        dot.matches(" -> ").count()
    }

    #[test]
    fn discrete_two_point_spectrum_has_no_edges() {
        let space = balmer_spectrum(&presets::proj_k_x_k(), None).unwrap().to_top_space();
        let dot = dot_of_space(&space, "spectrum").unwrap();
        assert_eq!(dot.matches("label=").count(), 2);
        assert_eq!(edge_count(&dot), 0);
    }

    #[test]
    fn sierpinski_has_one_edge() {
        let dot = dot_of_space(&FiniteTopSpace::sierpinski(), "spectrum").unwrap();
        assert_eq!(dot.matches("label=").count(), 2);
        assert_eq!(edge_count(&dot), 1);
    }

    #[test]
    fn boolean_square_hasse_has_four_nodes_and_four_edges() {
        let ideals = crate::ideal::enumerate_radical_ideals(&presets::proj_k_x_k(), None).unwrap();
        let dot = dot_of_lattice(&ideals.to_bounded_lattice().unwrap(), "ideals");
        assert_eq!(dot.matches("label=").count(), 4);
        assert_eq!(edge_count(&dot), 4);
        let again = dot_of_lattice(&boolean(2), "ideals");
        assert_eq!(edge_count(&again), 4);
    }

    #[test]
    fn output_is_deterministic_and_escaped() {
        let dot = dot_of_lattice(&boolean(2), "g");
        assert_eq!(dot, dot_of_lattice(&boolean(2), "g"));
        let p = FinitePoset::antichain(vec!["say \"hi\"".into()]);
        let rendered = dot_of_poset(&p, "g");
        assert!(rendered.contains("say \\\"hi\\\""), "{rendered}");
    }
}
