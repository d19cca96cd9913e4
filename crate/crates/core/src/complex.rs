//! Combinatorial 2-complexes and vertex links.
//!
//! A 1-cell carries a stored orientation `tail -> head`. A 2-cell boundary is
//! a cyclic sequence of steps; a step traverses a 1-cell forward (`Plus`,
//! tail to head) or backward (`Minus`). Boundary position `k` of a 2-cell
//! starts at the vertex `p_k` and ends at `p_{k+1}`.

use std::collections::HashMap;
use std::ops::{Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_bool(up: bool) -> Self {
        if up {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.as_i64() as i8
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            _ => Err(format!("sign must be 1 or -1, got {v}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Step {
    pub edge: usize,
    pub sign: Sign,
}

impl Step {
    pub fn new(edge: usize, sign: Sign) -> Self {
        Self { edge, sign }
    }

    pub fn fwd(edge: usize) -> Self {
        Self::new(edge, Sign::Plus)
    }

    pub fn back(edge: usize) -> Self {
        Self::new(edge, Sign::Minus)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OneCell {
    pub tail: usize,
    pub head: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<usize>,
}

/// Which relator of a presentation a 2-cell comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellTag {
    /// `a_i^2`
    Square(usize),
    /// `(a_i a_j)^m_ij`, `i < j`
    Pair(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoCell {
    pub boundary: Vec<Step>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<CellTag>,
}

impl TwoCell {
    pub fn len(&self) -> usize {
        self.boundary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ComplexJson")]
pub struct TwoComplex {
    zero_cells: usize,
    one_cells: Vec<OneCell>,
    two_cells: Vec<TwoCell>,
}

#[derive(Deserialize)]
struct ComplexJson {
    zero_cells: usize,
    one_cells: Vec<OneCell>,
    two_cells: Vec<TwoCell>,
}

impl TryFrom<ComplexJson> for TwoComplex {
    type Error = Error;
    fn try_from(j: ComplexJson) -> Result<Self> {
        let mut k = TwoComplex::new(j.zero_cells);
        for e in j.one_cells {
            k.add_labelled_edge(e.tail, e.head, e.label)?;
        }
        for c in j.two_cells {
            k.add_cell(c.boundary, c.tag)?;
        }
        Ok(k)
    }
}

impl TwoComplex {
    pub fn new(zero_cells: usize) -> Self {
        Self {
            zero_cells,
            one_cells: Vec::new(),
            two_cells: Vec::new(),
        }
    }

    pub fn add_edge(&mut self, tail: usize, head: usize) -> Result<usize> {
        self.add_labelled_edge(tail, head, None)
    }

    pub fn add_labelled_edge(&mut self, tail: usize, head: usize, label: Option<usize>) -> Result<usize> {
        if tail >= self.zero_cells || head >= self.zero_cells {
            return Err(Error::MalformedComplex(format!(
                "edge {tail}->{head} references a missing 0-cell"
            )));
        }
        self.one_cells.push(OneCell { tail, head, label });
        Ok(self.one_cells.len() - 1)
    }

    /// Adds a 2-cell after checking that its boundary is a closed edge path.
    pub fn add_cell(&mut self, boundary: Vec<Step>, tag: Option<CellTag>) -> Result<usize> {
        if boundary.is_empty() {
            return Err(Error::MalformedComplex("empty 2-cell boundary".into()));
        }
        if let Some(s) = boundary.iter().find(|s| s.edge >= self.one_cells.len()) {
            return Err(Error::MalformedComplex(format!(
                "boundary references missing 1-cell {}",
                s.edge
            )));
        }
        let n = boundary.len();
        for k in 0..n {
            let (_, end) = self.step_endpoints(boundary[k]);
            let (start, _) = self.step_endpoints(boundary[(k + 1) % n]);
            if end != start {
                return Err(Error::MalformedComplex(format!(
                    "boundary is not closed between positions {k} and {}",
                    (k + 1) % n
                )));
            }
        }
        self.two_cells.push(TwoCell { boundary, tag });
        Ok(self.two_cells.len() - 1)
    }

    pub fn zero_cell_count(&self) -> usize {
        self.zero_cells
    }

    pub fn one_cells(&self) -> &[OneCell] {
        &self.one_cells
    }

    pub fn two_cells(&self) -> &[TwoCell] {
        &self.two_cells
    }

    pub fn edge(&self, e: usize) -> &OneCell {
        &self.one_cells[e]
    }

    pub fn cell(&self, c: usize) -> &TwoCell {
        &self.two_cells[c]
    }

    pub fn cell_counts(&self) -> (usize, usize, usize) {
        (self.zero_cells, self.one_cells.len(), self.two_cells.len())
    }

    pub fn euler_characteristic(&self) -> i64 {
        let (v, e, f) = self.cell_counts();
        v as i64 - e as i64 + f as i64
    }

    /// `(start, end)` vertices of a traversal.
    pub fn step_endpoints(&self, s: Step) -> (usize, usize) {
        let e = &self.one_cells[s.edge];
        match s.sign {
            Sign::Plus => (e.tail, e.head),
            Sign::Minus => (e.head, e.tail),
        }
    }

    /// Boundary vertices `p_0, .., p_{n-1}` of a 2-cell.
    pub fn cell_vertices(&self, c: usize) -> Vec<usize> {
        self.two_cells[c]
            .boundary
            .iter()
            .map(|&s| self.step_endpoints(s).0)
            .collect()
    }

    /// The subcomplex on all 0- and 1-cells and the listed 2-cells.
    pub fn with_cells(&self, keep: &[usize]) -> TwoComplex {
        TwoComplex {
            zero_cells: self.zero_cells,
            one_cells: self.one_cells.clone(),
            two_cells: keep.iter().map(|&c| self.two_cells[c].clone()).collect(),
        }
    }

    pub fn link(&self, x: usize) -> Result<LinkGraph> {
        if x >= self.zero_cells {
            return Err(Error::InvalidArgument(format!("0-cell {x} does not exist")));
        }
        let mut link = LinkGraph {
            vertex: x,
            vertices: Vec::new(),
            edges: Vec::new(),
        };
        let mut index: HashMap<(usize, End), usize> = HashMap::new();
        for (e, cell) in self.one_cells.iter().enumerate() {
            for (end, y) in [(End::Tail, cell.tail), (End::Head, cell.head)] {
                if y == x {
                    index.insert((e, end), link.vertices.len());
                    link.vertices.push(LinkVertex { edge: e, end });
                }
            }
        }
        for (c, cell) in self.two_cells.iter().enumerate() {
            let n = cell.boundary.len();
            for k in 0..n {
                let out = cell.boundary[k];
                if self.step_endpoints(out).0 != x {
                    continue;
                }
                let into = cell.boundary[(k + n - 1) % n];
                link.edges.push(LinkEdge {
                    cell: c,
                    position: k,
                    from: index[&(into.edge, End::arriving(into.sign))],
                    to: index[&(out.edge, End::leaving(out.sign))],
                });
            }
        }
        Ok(link)
    }

    /// Links of every 0-cell, indexed by 0-cell.
    pub fn links(&self) -> Vec<LinkGraph> {
        let mut links: Vec<LinkGraph> = (0..self.zero_cells)
            .map(|x| LinkGraph {
                vertex: x,
                vertices: Vec::new(),
                edges: Vec::new(),
            })
            .collect();
        let mut index: HashMap<(usize, End), usize> = HashMap::new();
        for (e, cell) in self.one_cells.iter().enumerate() {
            for (end, x) in [(End::Tail, cell.tail), (End::Head, cell.head)] {
                let l = &mut links[x];
                index.insert((e, end), l.vertices.len());
                l.vertices.push(LinkVertex { edge: e, end });
            }
        }
        for (c, cell) in self.two_cells.iter().enumerate() {
            let n = cell.boundary.len();
            for k in 0..n {
                let into = cell.boundary[(k + n - 1) % n];
                let out = cell.boundary[k];
                let x = self.step_endpoints(out).0;
                let from = index[&(into.edge, End::arriving(into.sign))];
                let to = index[&(out.edge, End::leaving(out.sign))];
                links[x].edges.push(LinkEdge {
                    cell: c,
                    position: k,
                    from,
                    to,
                });
            }
        }
        links
    }
}

/// An end of a 1-cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum End {
    Tail,
    Head,
}

impl End {
    /// End at which a traversal with this sign starts.
    pub fn leaving(sign: Sign) -> End {
        match sign {
            Sign::Plus => End::Tail,
            Sign::Minus => End::Head,
        }
    }

    /// End at which a traversal with this sign finishes.
    pub fn arriving(sign: Sign) -> End {
        match sign {
            Sign::Plus => End::Head,
            Sign::Minus => End::Tail,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkVertex {
    pub edge: usize,
    pub end: End,
}

/// A corner of a 2-cell: the corner at boundary position `k` sits at `p_k`
/// between the steps at `k-1` and `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkEdge {
    pub cell: usize,
    pub position: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkGraph {
    pub vertex: usize,
    pub vertices: Vec<LinkVertex>,
    pub edges: Vec<LinkEdge>,
}

impl LinkGraph {
    /// True iff the link is the simple complete graph on its vertices.
    pub fn is_complete_simple(&self) -> bool {
        let v = self.vertices.len();
        let mut seen = std::collections::HashSet::new();
        for e in &self.edges {
            if e.from == e.to || !seen.insert((e.from.min(e.to), e.from.max(e.to))) {
                return false;
            }
        }
        seen.len() == v * v.saturating_sub(1) / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hexagon_loop() -> TwoComplex {
        // six vertices on a cycle, one hexagon
        let mut k = TwoComplex::new(6);
        let edges: Vec<usize> = (0..6).map(|i| k.add_edge(i, (i + 1) % 6).unwrap()).collect();
        k.add_cell(edges.iter().map(|&e| Step::fwd(e)).collect(), None).unwrap();
        k
    }

    #[test]
    fn rejects_open_boundary() {
        let mut k = TwoComplex::new(3);
        let a = k.add_edge(0, 1).unwrap();
        let b = k.add_edge(1, 2).unwrap();
        assert!(k.add_cell(vec![Step::fwd(a), Step::fwd(b)], None).is_err());
        assert!(k.add_cell(vec![Step::fwd(a), Step::back(a)], None).is_ok());
        assert!(k.add_edge(0, 5).is_err());
    }

    #[test]
    fn hexagon_links() {
        let k = hexagon_loop();
        for x in 0..6 {
            let l = k.link(x).unwrap();
            assert_eq!(l.vertices.len(), 2);
            assert_eq!(l.edges.len(), 1);
            let e = l.edges[0];
            assert_ne!(e.from, e.to);
        }
        assert_eq!(k.euler_characteristic(), 1);
    }

    #[test]
    fn links_without_two_cells() {
        let mut k = TwoComplex::new(2);
        for _ in 0..3 {
            k.add_edge(0, 1).unwrap();
        }
        let l = k.link(0).unwrap();
        assert_eq!(l.vertices.len(), 3);
        assert!(l.edges.is_empty());
        assert!(k.link(2).is_err());
    }

    #[test]
    fn loops_contribute_two_link_vertices() {
        let mut k = TwoComplex::new(1);
        let a = k.add_edge(0, 0).unwrap();
        k.add_cell(vec![Step::fwd(a), Step::fwd(a)], None).unwrap();
        let l = k.link(0).unwrap();
        assert_eq!(l.vertices.len(), 2);
        assert_eq!(l.edges.len(), 2);
    }

    #[test]
    fn single_link_matches_all_links() {
        let mut k = hexagon_loop();
        let a = k.add_edge(2, 2).unwrap();
        k.add_cell(vec![Step::fwd(a), Step::back(a)], None).unwrap();
        let all = k.links();
        for x in 0..6 {
            assert_eq!(k.link(x).unwrap(), all[x]);
        }
    }

    #[test]
    fn json_round_trip() {
        let k = hexagon_loop();
        let s = serde_json::to_string(&k).unwrap();
        let back: TwoComplex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, k);
        let broken = s.replace("\"tail\":0", "\"tail\":3");
        assert!(serde_json::from_str::<TwoComplex>(&broken).is_err());
    }
}
