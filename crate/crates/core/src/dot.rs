//! Graphviz export of 1-skeletons.

use std::fmt::Write;

use crate::complex::TwoComplex;
use crate::walls::WallSet;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// Multigraph of the 1-skeleton with generator labels (1-based). With
/// `walls`, each edge is coloured by its dual wall and tagged `w<id>`.
pub fn to_dot(k: &TwoComplex, walls: Option<&WallSet>) -> String {
    let mut s = String::from("graph skeleton {\n  node [shape=point];\n");
    for v in 0..k.zero_cell_count() {
        writeln!(s, "  v{v} [xlabel=\"{v}\"];").unwrap();
    }
    for (e, c) in k.one_cells().iter().enumerate() {
        let mut attrs = vec![format!("id=\"e{e}\"")];
        let mut label = c.label.map(|l| format!("a{}", l + 1)).unwrap_or_default();
        if let Some(ws) = walls {
            let w = ws.wall_of(e);
            if !label.is_empty() {
                label.push(' ');
            }
            write!(label, "w{w}").unwrap();
            attrs.push(format!("color=\"{}\"", PALETTE[w % PALETTE.len()]));
        }
        if !label.is_empty() {
            attrs.push(format!("label=\"{label}\""));
        }
        writeln!(s, "  v{} -- v{} [{}];", c.tail, c.head, attrs.join(", ")).unwrap();
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Step;
    use crate::walls::extract_walls;

    #[test]
    fn square_export() {
        let mut k = TwoComplex::new(4);
        let e: Vec<usize> = (0..4).map(|i| k.add_labelled_edge(i, (i + 1) % 4, Some(i % 2)).unwrap()).collect();
        k.add_cell(e.iter().map(|&x| Step::fwd(x)).collect(), None).unwrap();
        let plain = to_dot(&k, None);
        assert!(plain.contains("v0 -- v1 [id=\"e0\", label=\"a1\"];"));
        let ws = extract_walls(&k).unwrap();
        let coloured = to_dot(&k, Some(&ws));
        assert!(coloured.contains("label=\"a1 w0\""));
        assert!(coloured.contains("v2 -- v3 [id=\"e2\", color=\"#1f77b4\", label=\"a1 w0\"];"));
        assert_eq!(coloured, to_dot(&k, Some(&ws)));
    }
}
