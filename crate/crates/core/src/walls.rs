//! Walls of a 2-complex whose 2-cells have even boundary length.
//!
//! Two 1-cells are parallel when they occupy opposite boundary positions `j`
//! and `j + n` of a `2n`-gon. Walls are the classes of the equivalence
//! relation generated by parallelism. A wall's graph has one vertex per dual
//! 1-cell and one arc per opposite pair of positions.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::complex::{Sign, TwoComplex};
use crate::dsu::DisjointSets;
use crate::error::{Error, Result};

/// The segment of a wall crossing 2-cell `cell` between boundary positions
/// `positions.0 < positions.1`, which are half the boundary length apart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Arc {
    pub cell: usize,
    pub positions: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Wall {
    pub id: usize,
    pub dual_edges: Vec<usize>,
    pub arcs: Vec<Arc>,
}

impl Wall {
    /// Wall graph edges as pairs of dual 1-cells.
    pub fn graph_edges(&self, k: &TwoComplex) -> Vec<(usize, usize)> {
        self.arcs
            .iter()
            .map(|a| {
                let b = &k.cell(a.cell).boundary;
                (b[a.positions.0].edge, b[a.positions.1].edge)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallSet {
    pub walls: Vec<Wall>,
    pub edge_to_wall: Vec<usize>,
}

impl WallSet {
    pub fn len(&self) -> usize {
        self.walls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walls.is_empty()
    }

    pub fn wall_of(&self, edge: usize) -> usize {
        self.edge_to_wall[edge]
    }

    /// Distinct walls crossing each 2-cell, sorted.
    pub fn walls_through_cells(&self, n_cells: usize) -> Vec<Vec<usize>> {
        let mut through = vec![Vec::new(); n_cells];
        for w in &self.walls {
            for a in &w.arcs {
                if through[a.cell].last() != Some(&w.id) {
                    through[a.cell].push(w.id);
                }
            }
        }
        for t in &mut through {
            t.sort_unstable();
            t.dedup();
        }
        through
    }
}

pub fn extract_walls(k: &TwoComplex) -> Result<WallSet> {
    let n_edges = k.one_cells().len();
    let mut dsu = DisjointSets::new(n_edges);
    for (c, cell) in k.two_cells().iter().enumerate() {
        let len = cell.len();
        if len % 2 != 0 {
            return Err(Error::MalformedComplex(format!(
                "2-cell {c} has odd boundary length {len}"
            )));
        }
        let half = len / 2;
        for j in 0..half {
            dsu.union(cell.boundary[j].edge, cell.boundary[j + half].edge);
        }
    }
    let (edge_to_wall, n_walls) = dsu.classes();
    let mut walls: Vec<Wall> = (0..n_walls)
        .map(|id| Wall {
            id,
            dual_edges: Vec::new(),
            arcs: Vec::new(),
        })
        .collect();
    for (e, &w) in edge_to_wall.iter().enumerate() {
        walls[w].dual_edges.push(e);
    }
    for (c, cell) in k.two_cells().iter().enumerate() {
        let half = cell.len() / 2;
        for j in 0..half {
            let w = edge_to_wall[cell.boundary[j].edge];
            walls[w].arcs.push(Arc {
                cell: c,
                positions: (j, j + half),
            });
        }
    }
    Ok(WallSet {
        walls,
        edge_to_wall,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EmbeddingWitness {
    /// Two arcs of the wall cross inside one 2-cell.
    SharedCell { cell: usize, arcs: [Arc; 2] },
    /// An arc whose two ends lie on the same 1-cell.
    ArcOnOneEdge { edge: usize, arc: Arc },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingCheck {
    pub wall: usize,
    pub embedded: bool,
    pub witness: Option<EmbeddingWitness>,
}

/// A wall fails to embed when two of its arcs lie in one 2-cell or when one
/// arc starts and ends on the same 1-cell.
pub fn embeddedness(k: &TwoComplex, ws: &WallSet) -> Vec<EmbeddingCheck> {
    ws.walls
        .iter()
        .map(|w| {
            let mut witness = None;
            for pair in w.arcs.windows(2) {
                if pair[0].cell == pair[1].cell {
                    witness = Some(EmbeddingWitness::SharedCell {
                        cell: pair[0].cell,
                        arcs: [pair[0], pair[1]],
                    });
                    break;
                }
            }
            if witness.is_none() {
                for a in &w.arcs {
                    let b = &k.cell(a.cell).boundary;
                    if b[a.positions.0].edge == b[a.positions.1].edge {
                        witness = Some(EmbeddingWitness::ArcOnOneEdge {
                            edge: b[a.positions.0].edge,
                            arc: *a,
                        });
                        break;
                    }
                }
            }
            EmbeddingCheck {
                wall: w.id,
                embedded: witness.is_none(),
                witness,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Sidedness {
    /// Orientation of each dual 1-cell relative to its stored direction.
    TwoSided { orientation: Vec<(usize, Sign)> },
    /// Arcs whose constraints cannot be satisfied together.
    OneSided { cycle: Vec<Arc> },
}

impl Sidedness {
    pub fn is_two_sided(&self) -> bool {
        matches!(self, Sidedness::TwoSided { .. })
    }
}

/// Solves, per wall, for orientations `s(e)` of the dual 1-cells such that
/// within every 2-cell the two parallel 1-cells of an arc are traversed in
/// opposite directions around the boundary: `s(e1) d1 = -s(e2) d2`.
pub fn two_sidedness(k: &TwoComplex, ws: &WallSet) -> Vec<Sidedness> {
    let mut local = vec![usize::MAX; k.one_cells().len()];
    ws.walls
        .iter()
        .map(|w| {
            for (i, &e) in w.dual_edges.iter().enumerate() {
                local[e] = i;
            }
            let n = w.dual_edges.len();
            // (neighbour, relation, arc index)
            let mut adj: Vec<Vec<(usize, Sign, usize)>> = vec![Vec::new(); n];
            for (ai, a) in w.arcs.iter().enumerate() {
                let b = &k.cell(a.cell).boundary;
                let (s1, s2) = (b[a.positions.0], b[a.positions.1]);
                let rel = -(s1.sign * s2.sign);
                let (u, v) = (local[s1.edge], local[s2.edge]);
                adj[u].push((v, rel, ai));
                if u != v {
                    adj[v].push((u, rel, ai));
                }
            }
            let mut sign: Vec<Option<Sign>> = vec![None; n];
            let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
            let mut queue = VecDeque::new();
            for root in 0..n {
                if sign[root].is_some() {
                    continue;
                }
                sign[root] = Some(Sign::Plus);
                queue.push_back(root);
                while let Some(u) = queue.pop_front() {
                    let su = sign[u].unwrap();
                    for &(v, rel, ai) in &adj[u] {
                        let want = su * rel;
                        match sign[v] {
                            None => {
                                sign[v] = Some(want);
                                parent[v] = Some((u, ai));
                                queue.push_back(v);
                            }
                            Some(sv) if sv != want => {
                                let cycle = conflict_cycle(&parent, u, v, ai)
                                    .into_iter()
                                    .map(|i| w.arcs[i])
                                    .collect();
                                return Sidedness::OneSided { cycle };
                            }
                            Some(_) => {}
                        }
                    }
                }
            }
            Sidedness::TwoSided {
                orientation: w
                    .dual_edges
                    .iter()
                    .zip(sign)
                    .map(|(&e, s)| (e, s.unwrap()))
                    .collect(),
            }
        })
        .collect()
}

fn conflict_cycle(parent: &[Option<(usize, usize)>], u: usize, v: usize, closing: usize) -> Vec<usize> {
    let path = |mut x: usize| {
        let mut nodes = vec![x];
        let mut arcs = Vec::new();
        while let Some((p, a)) = parent[x] {
            arcs.push(a);
            nodes.push(p);
            x = p;
        }
        (nodes, arcs)
    };
    let (nu, mut au) = path(u);
    let (nv, mut av) = path(v);
    // strip the shared tail down to the lowest common ancestor
    let (mut i, mut j) = (nu.len(), nv.len());
    while i > 1 && j > 1 && nu[i - 2] == nv[j - 2] {
        i -= 1;
        j -= 1;
    }
    au.truncate(i - 1);
    av.truncate(j - 1);
    let mut cycle = au;
    cycle.push(closing);
    av.reverse();
    cycle.extend(av);
    cycle
}

/// How a wall touches the link of a 0-cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Adjacency {
    /// At link vertex `link_vertex`, the end of 1-cell `edge`.
    Vertex { link_vertex: usize, edge: usize },
    /// At the link edge for the corner at `position` of `cell`.
    Edge { cell: usize, position: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Osculation {
    pub wall: usize,
    pub vertex: usize,
    pub adjacencies: Vec<Adjacency>,
}

/// Every `(wall, 0-cell)` where the wall is adjacent to the link at two or
/// more vertices or edges, sorted by wall then 0-cell.
pub fn self_osculations(k: &TwoComplex, ws: &WallSet) -> Vec<Osculation> {
    let through = ws.walls_through_cells(k.two_cells().len());
    let mut out = Vec::new();
    for link in k.links() {
        let mut adj: BTreeMap<usize, Vec<Adjacency>> = BTreeMap::new();
        for (i, lv) in link.vertices.iter().enumerate() {
            adj.entry(ws.wall_of(lv.edge)).or_default().push(Adjacency::Vertex {
                link_vertex: i,
                edge: lv.edge,
            });
        }
        for le in &link.edges {
            let w_from = ws.wall_of(link.vertices[le.from].edge);
            let w_to = ws.wall_of(link.vertices[le.to].edge);
            for &w in &through[le.cell] {
                if w != w_from && w != w_to {
                    adj.entry(w).or_default().push(Adjacency::Edge {
                        cell: le.cell,
                        position: le.position,
                    });
                }
            }
        }
        for (wall, adjacencies) in adj {
            if adjacencies.len() >= 2 {
                out.push(Osculation {
                    wall,
                    vertex: link.vertex,
                    adjacencies,
                });
            }
        }
    }
    out.sort_by_key(|o| (o.wall, o.vertex));
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OsculationPoint {
    pub vertex: usize,
    pub adjacencies: Vec<Adjacency>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallPathology {
    pub wall: usize,
    pub dual_edges: usize,
    pub arcs: usize,
    pub embedded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedding_witness: Option<EmbeddingWitness>,
    pub two_sided: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub one_sided_cycle: Option<Vec<Arc>>,
    pub self_osculations: Vec<OsculationPoint>,
}

impl WallPathology {
    pub fn is_good(&self) -> bool {
        self.embedded && self.two_sided && self.self_osculations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathologyReport {
    pub good_walls: bool,
    pub walls: Vec<WallPathology>,
}

impl PathologyReport {
    pub fn bad_walls(&self) -> impl Iterator<Item = &WallPathology> {
        self.walls.iter().filter(|w| !w.is_good())
    }

    pub fn summary(&self) -> String {
        let count = |f: fn(&WallPathology) -> bool| self.walls.iter().filter(|w| f(w)).count();
        format!(
            "{} walls: {} not embedded, {} one-sided, {} self-osculating",
            self.walls.len(),
            count(|w| !w.embedded),
            count(|w| !w.two_sided),
            count(|w| !w.self_osculations.is_empty()),
        )
    }
}

pub fn pathology_report(k: &TwoComplex) -> Result<PathologyReport> {
    let ws = extract_walls(k)?;
    Ok(pathology_report_for(k, &ws))
}

pub fn pathology_report_for(k: &TwoComplex, ws: &WallSet) -> PathologyReport {
    let emb = embeddedness(k, ws);
    let sides = two_sidedness(k, ws);
    let mut osc: Vec<Vec<OsculationPoint>> = vec![Vec::new(); ws.len()];
    for o in self_osculations(k, ws) {
        osc[o.wall].push(OsculationPoint {
            vertex: o.vertex,
            adjacencies: o.adjacencies,
        });
    }
    let walls: Vec<WallPathology> = ws
        .walls
        .iter()
        .zip(emb)
        .zip(sides)
        .zip(osc)
        .map(|(((w, e), s), o)| WallPathology {
            wall: w.id,
            dual_edges: w.dual_edges.len(),
            arcs: w.arcs.len(),
            embedded: e.embedded,
            embedding_witness: e.witness,
            two_sided: s.is_two_sided(),
            one_sided_cycle: match s {
                Sidedness::OneSided { cycle } => Some(cycle),
                Sidedness::TwoSided { .. } => None,
            },
            self_osculations: o,
        })
        .collect();
    PathologyReport {
        good_walls: walls.iter().all(WallPathology::is_good),
        walls,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Step;

    fn square_efef() -> TwoComplex {
        let mut k = TwoComplex::new(2);
        let e = k.add_edge(0, 1).unwrap();
        let f = k.add_edge(1, 0).unwrap();
        k.add_cell(vec![Step::fwd(e), Step::fwd(f), Step::fwd(e), Step::fwd(f)], None)
            .unwrap();
        k
    }

    #[test]
    fn odd_boundaries_rejected() {
        let mut k = TwoComplex::new(3);
        let a = k.add_edge(0, 1).unwrap();
        let b = k.add_edge(1, 2).unwrap();
        let c = k.add_edge(2, 0).unwrap();
        k.add_cell(vec![Step::fwd(a), Step::fwd(b), Step::fwd(c)], None).unwrap();
        assert!(extract_walls(&k).is_err());
    }

    #[test]
    fn edges_only_give_singleton_walls() {
        let mut k = TwoComplex::new(3);
        k.add_edge(0, 1).unwrap();
        k.add_edge(1, 2).unwrap();
        let ws = extract_walls(&k).unwrap();
        assert_eq!(ws.len(), 2);
        assert!(ws.walls.iter().all(|w| w.arcs.is_empty() && w.dual_edges.len() == 1));
        let r = pathology_report_for(&k, &ws);
        assert!(r.good_walls);
    }

    #[test]
    fn projective_square_is_one_sided_and_not_embedded() {
        let k = square_efef();
        let ws = extract_walls(&k).unwrap();
        assert_eq!(ws.len(), 2);
        let emb = embeddedness(&k, &ws);
        assert!(emb.iter().all(|c| !c.embedded));
        assert!(matches!(
            emb[0].witness,
            Some(EmbeddingWitness::ArcOnOneEdge { edge: 0, .. })
        ));
        let sides = two_sidedness(&k, &ws);
        match &sides[0] {
            Sidedness::OneSided { cycle } => {
                assert_eq!(cycle, &vec![Arc { cell: 0, positions: (0, 2) }])
            }
            other => panic!("expected one-sided, got {other:?}"),
        }
    }

    #[test]
    fn two_arcs_in_one_cell() {
        // octagon e f g h e' f g h' with f, g traversed twice: the wall of f
        // meets the cell in two arcs
        let mut k = TwoComplex::new(1);
        let e: Vec<usize> = (0..4).map(|_| k.add_edge(0, 0).unwrap()).collect();
        let b = vec![
            Step::fwd(e[0]),
            Step::fwd(e[1]),
            Step::fwd(e[2]),
            Step::fwd(e[3]),
            Step::back(e[1]),
            Step::fwd(e[0]),
            Step::back(e[3]),
            Step::fwd(e[2]),
        ];
        k.add_cell(b, None).unwrap();
        let ws = extract_walls(&k).unwrap();
        let emb = embeddedness(&k, &ws);
        assert!(emb
            .iter()
            .any(|c| matches!(c.witness, Some(EmbeddingWitness::SharedCell { cell: 0, .. }))));
    }

    #[test]
    fn inconsistent_cycle_through_two_cells() {
        // annulus-free Moebius strip: two squares glued with a twist
        let mut k = TwoComplex::new(4);
        let a = k.add_edge(0, 1).unwrap();
        let b = k.add_edge(1, 2).unwrap();
        let c = k.add_edge(2, 3).unwrap();
        let d = k.add_edge(3, 0).unwrap();
        let x = k.add_edge(0, 2).unwrap();
        let y = k.add_edge(1, 3).unwrap();
        // square a, b, x^-1 ... build two squares sharing the walls of a and c
        k.add_cell(vec![Step::fwd(a), Step::fwd(y), Step::back(c), Step::back(x)], None)
            .unwrap();
        k.add_cell(vec![Step::fwd(a), Step::fwd(b), Step::fwd(c), Step::fwd(d)], None)
            .unwrap();
        let ws = extract_walls(&k).unwrap();
        let sides = two_sidedness(&k, &ws);
        let wa = ws.wall_of(a);
        match &sides[wa] {
            Sidedness::OneSided { cycle } => assert_eq!(cycle.len(), 2),
            other => panic!("expected one-sided, got {other:?}"),
        }
    }
}
