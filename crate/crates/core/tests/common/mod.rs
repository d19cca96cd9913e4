//! Fixtures and brute-force oracles shared by the integration tests. The
//! oracles recompute walls, links and ascending links from the raw cell
//! structure without going through the library's own wall or link code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use coxwalls_core::cover::{compress, regular_cover, PermutationQuotient};
use coxwalls_core::{CoxeterPresentation, Sign, Step, TwoComplex};

pub fn compressed_uniform(r: usize, m: u32) -> (TwoComplex, usize) {
    let p = CoxeterPresentation::uniform(r, m).unwrap();
    let q = PermutationQuotient::star_transpositions(r);
    let cover = regular_cover(&p, &q, 1_000_000).unwrap();
    let k = compress(&cover.complex, &p).unwrap();
    (k, cover.degree)
}

/// Compressed cover of the rank 2, exponent 3 group over the symmetric group
/// on 3 points: a single hexagon on six vertices.
pub fn hexagon_complex() -> TwoComplex {
    compressed_uniform(2, 3).0
}

/// One square with boundary `e f e f`.
pub fn efef_square() -> TwoComplex {
    let mut k = TwoComplex::new(2);
    let e = k.add_edge(0, 1).unwrap();
    let f = k.add_edge(1, 0).unwrap();
    k.add_cell(vec![Step::fwd(e), Step::fwd(f), Step::fwd(e), Step::fwd(f)], None)
        .unwrap();
    k
}

/// Two hexagons sharing the edge A0A1 and the opposite vertex A3:
/// A = A0..A5 and B = A0 A1 B2 A3 B4 B5. The wall through A0A1 crosses
/// both hexagons and comes back to A3 along two different 1-cells.
pub fn osculating_hexagons() -> TwoComplex {
    // A0..A5 = 0..5, B2 = 6, B4 = 7, B5 = 8
    let mut k = TwoComplex::new(9);
    let a: Vec<usize> = (0..6).map(|i| k.add_edge(i, (i + 1) % 6).unwrap()).collect();
    k.add_cell(a.iter().map(|&e| Step::fwd(e)).collect(), None).unwrap();
    let b1 = k.add_edge(1, 6).unwrap();
    let b2 = k.add_edge(6, 3).unwrap();
    let b3 = k.add_edge(3, 7).unwrap();
    let b4 = k.add_edge(7, 8).unwrap();
    let b5 = k.add_edge(8, 0).unwrap();
    k.add_cell(
        [a[0], b1, b2, b3, b4, b5].iter().map(|&e| Step::fwd(e)).collect(),
        None,
    )
    .unwrap();
    k
}

/// Two squares glued along `a` and `c` with a twist.
pub fn mobius_squares() -> TwoComplex {
    let mut k = TwoComplex::new(4);
    let a = k.add_edge(0, 1).unwrap();
    let c = k.add_edge(2, 3).unwrap();
    let y = k.add_edge(1, 3).unwrap();
    let x = k.add_edge(0, 2).unwrap();
    let u = k.add_edge(1, 2).unwrap();
    let v = k.add_edge(3, 0).unwrap();
    k.add_cell(vec![Step::fwd(a), Step::fwd(y), Step::back(c), Step::back(x)], None)
        .unwrap();
    k.add_cell(vec![Step::fwd(a), Step::fwd(u), Step::fwd(c), Step::fwd(v)], None)
        .unwrap();
    k
}

/// Two vertices joined by `n` parallel 1-cells, no 2-cells.
pub fn parallel_edges(n: usize) -> TwoComplex {
    let mut k = TwoComplex::new(2);
    for _ in 0..n {
        k.add_edge(0, 1).unwrap();
    }
    k
}

/// Every fixture with its name, for suites that sweep all of them.
pub fn all_fixtures() -> Vec<(&'static str, TwoComplex)> {
    vec![
        ("hexagon", hexagon_complex()),
        ("efef-square", efef_square()),
        ("osculating-hexagons", osculating_hexagons()),
        ("mobius-squares", mobius_squares()),
        ("theta", parallel_edges(3)),
        ("uniform-3-3", compressed_uniform(3, 3).0),
        ("uniform-4-3", compressed_uniform(4, 3).0),
    ]
}

fn start_of(k: &TwoComplex, s: Step) -> usize {
    let e = k.edge(s.edge);
    if s.sign == Sign::Plus { e.tail } else { e.head }
}

fn end_of(k: &TwoComplex, s: Step) -> usize {
    let e = k.edge(s.edge);
    if s.sign == Sign::Plus { e.head } else { e.tail }
}

/// Wall classes by repeated relabelling to the minimum over opposite pairs
/// until nothing changes. Each 1-cell maps to the smallest 1-cell of its class.
pub fn oracle_wall_labels(k: &TwoComplex) -> Vec<usize> {
    let mut label: Vec<usize> = (0..k.one_cells().len()).collect();
    loop {
        let mut changed = false;
        for c in k.two_cells() {
            let n = c.boundary.len() / 2;
            for j in 0..n {
                let (a, b) = (c.boundary[j].edge, c.boundary[j + n].edge);
                let m = label[a].min(label[b]);
                for e in [a, b] {
                    if label[e] != m {
                        label[e] = m;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return label;
        }
    }
}

/// A link vertex as `(edge, is_tail)` and a corner as `(cell, position)`.
pub struct OracleLink {
    pub vertices: Vec<(usize, bool)>,
    pub corners: Vec<(usize, usize, usize, usize)>,
}

pub fn oracle_link(k: &TwoComplex, x: usize) -> OracleLink {
    let mut vertices = Vec::new();
    for (e, c) in k.one_cells().iter().enumerate() {
        if c.tail == x {
            vertices.push((e, true));
        }
        if c.head == x {
            vertices.push((e, false));
        }
    }
    let find = |v: (usize, bool)| vertices.iter().position(|&w| w == v).unwrap();
    let mut corners = Vec::new();
    for (f, c) in k.two_cells().iter().enumerate() {
        let len = c.boundary.len();
        for pos in 0..len {
            let s = c.boundary[pos];
            if start_of(k, s) != x {
                continue;
            }
            let prev = c.boundary[(pos + len - 1) % len];
            debug_assert_eq!(end_of(k, prev), x);
            // the previous step arrives at its head iff it is traversed forward
            let a = find((prev.edge, prev.sign == Sign::Minus));
            let b = find((s.edge, s.sign == Sign::Plus));
            corners.push((f, pos, a, b));
        }
    }
    OracleLink { vertices, corners }
}

/// `(wall label, vertex) -> number of adjacencies` for every pair with two or
/// more, straight from the definition.
pub fn oracle_osculations(k: &TwoComplex) -> BTreeMap<(usize, usize), usize> {
    let label = oracle_wall_labels(k);
    let mut out = BTreeMap::new();
    for x in 0..k.zero_cell_count() {
        let link = oracle_link(k, x);
        let mut count: BTreeMap<usize, usize> = BTreeMap::new();
        for &(e, _) in &link.vertices {
            *count.entry(label[e]).or_default() += 1;
        }
        for &(f, _, a, b) in &link.corners {
            let c = k.cell(f);
            let n = c.boundary.len() / 2;
            let walls: BTreeSet<usize> = (0..n).map(|j| label[c.boundary[j].edge]).collect();
            let wa = label[link.vertices[a].0];
            let wb = label[link.vertices[b].0];
            for w in walls {
                if w != wa && w != wb {
                    *count.entry(w).or_default() += 1;
                }
            }
        }
        for (w, n) in count {
            if n >= 2 {
                out.insert((w, x), n);
            }
        }
    }
    out
}

/// Ascending and descending subgraphs of the lawful subcomplex at `x`,
/// computed from heights: a corner is ascending iff its cell is lawful and
/// the corner is the cell's unique lowest point.
pub struct OracleAscDesc {
    pub ascending_vertices: Vec<usize>,
    pub descending_vertices: Vec<usize>,
    pub ascending_edges: Vec<usize>,
    pub descending_edges: Vec<usize>,
    pub ascending_ok: bool,
    pub descending_ok: bool,
}

pub fn traversal(k: &TwoComplex, dirs: &[Sign], f: usize) -> Vec<i64> {
    k.cell(f)
        .boundary
        .iter()
        .map(|s| {
            let d = if dirs[s.edge] == Sign::Plus { 1 } else { -1 };
            let t = if s.sign == Sign::Plus { 1 } else { -1 };
            d * t
        })
        .collect()
}

pub fn sign_changes(t: &[i64]) -> usize {
    (0..t.len()).filter(|&i| t[i] != t[(i + 1) % t.len()]).count()
}

fn connected(n_vertices: &[usize], edges: &[(usize, usize)]) -> bool {
    let Some(&start) = n_vertices.first() else {
        return false;
    };
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (p, q) in [(a, b), (b, a)] {
                if p == v && seen.insert(q) {
                    stack.push(q);
                }
            }
        }
    }
    n_vertices.iter().all(|v| seen.contains(v))
}

pub fn oracle_asc_desc(k: &TwoComplex, dirs: &[Sign], x: usize) -> OracleAscDesc {
    let link = oracle_link(k, x);
    let mut av = Vec::new();
    let mut dv = Vec::new();
    for (i, &(e, is_tail)) in link.vertices.iter().enumerate() {
        let leaves = (dirs[e] == Sign::Plus) == is_tail;
        if leaves { av.push(i) } else { dv.push(i) }
    }
    let mut ae = Vec::new();
    let mut de = Vec::new();
    for (i, &(f, pos, _, _)) in link.corners.iter().enumerate() {
        let t = traversal(k, dirs, f);
        if sign_changes(&t) != 2 {
            continue;
        }
        let mut h = vec![0i64; t.len()];
        for j in 1..t.len() {
            h[j] = h[j - 1] + t[j - 1];
        }
        let lo = *h.iter().min().unwrap();
        let hi = *h.iter().max().unwrap();
        if h[pos] == lo && h.iter().filter(|&&y| y == lo).count() == 1 {
            ae.push(i);
        }
        if h[pos] == hi && h.iter().filter(|&&y| y == hi).count() == 1 {
            de.push(i);
        }
    }
    let pairs = |es: &[usize]| -> Vec<(usize, usize)> {
        es.iter().map(|&i| (link.corners[i].2, link.corners[i].3)).collect()
    };
    OracleAscDesc {
        ascending_ok: connected(&av, &pairs(&ae)),
        descending_ok: connected(&dv, &pairs(&de)),
        ascending_vertices: av,
        descending_vertices: dv,
        ascending_edges: ae,
        descending_edges: de,
    }
}

/// Number of separating partitions of a fixed quadruple among all `4^r`.
pub fn count_separating(r: usize) -> usize {
    (0..4usize.pow(r as u32))
        .filter(|&i| {
            let v: Vec<usize> = (0..r).map(|j| i / 4usize.pow(j as u32) % 4).collect();
            let s: BTreeSet<usize> = v[..4].iter().copied().collect();
            s.len() == 4
        })
        .count()
}
