//! Angled 2-complexes and combinatorial curvature.
//!
//! Angles are stored as rational multiples of pi and every curvature is
//! returned in the same units, so `1/3` means `pi/3`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::{LinkGraph, TwoComplex};
use crate::coxeter::CoxeterPresentation;
use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AngledComplex {
    pub base: TwoComplex,
    /// `angles[f][k]` is the angle at the corner at position `k` of cell `f`.
    pub angles: Vec<Vec<Rational>>,
}

impl AngledComplex {
    pub fn new(base: TwoComplex, angles: Vec<Vec<Rational>>) -> Result<Self> {
        if angles.len() != base.two_cells().len() {
            return Err(Error::InvalidArgument(format!(
                "{} angle lists for {} cells",
                angles.len(),
                base.two_cells().len()
            )));
        }
        for (f, (a, c)) in angles.iter().zip(base.two_cells()).enumerate() {
            if a.len() != c.len() {
                return Err(Error::InvalidArgument(format!(
                    "cell {f} has {} corners but {} angles",
                    c.len(),
                    a.len()
                )));
            }
        }
        Ok(Self { base, angles })
    }

    pub fn angle(&self, cell: usize, position: usize) -> &Rational {
        &self.angles[cell][position]
    }

    pub fn deficiency(&self, cell: usize, position: usize) -> Rational {
        rational::one() - self.angle(cell, position)
    }
}

/// Every corner of an `n`-gon gets `(n - 2)/n`.
pub fn regular_euclidean_angles(k: &TwoComplex) -> Result<AngledComplex> {
    let mut angles = Vec::with_capacity(k.two_cells().len());
    for (f, c) in k.two_cells().iter().enumerate() {
        let n = c.len() as i64;
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "cell {f} has {n} sides; regular polygons need at least 3"
            )));
        }
        angles.push(vec![rational::frac(n - 2, n); n as usize]);
    }
    AngledComplex::new(k.clone(), angles)
}

/// `2 - sum of deficiencies` over the corners of `f`.
pub fn cell_curvature(ac: &AngledComplex, f: usize) -> Rational {
    let mut kappa = rational::int(2);
    for k in 0..ac.angles[f].len() {
        kappa -= ac.deficiency(f, k);
    }
    kappa
}

/// `(2 - v) + sum of deficiencies` over a set of link edges.
fn section_value(ac: &AngledComplex, link: &LinkGraph, n_vertices: usize, edges: &[usize]) -> Rational {
    let mut kappa = rational::int(2 - n_vertices as i64);
    for &e in edges {
        let le = &link.edges[e];
        kappa += ac.deficiency(le.cell, le.position);
    }
    kappa
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexCurvature {
    pub vertex: usize,
    /// `(2 - v) + sum of deficiencies`.
    #[serde(with = "rational::serde_str")]
    pub deficiency_form: Rational,
    /// `2 - chi(link) - sum of angles`.
    #[serde(with = "rational::serde_str")]
    pub angle_form: Rational,
}

pub fn vertex_curvature_forms(ac: &AngledComplex, x: usize) -> Result<VertexCurvature> {
    let link = ac.base.link(x)?;
    let all: Vec<usize> = (0..link.edges.len()).collect();
    let deficiency_form = section_value(ac, &link, link.vertices.len(), &all);
    let chi_link = link.vertices.len() as i64 - link.edges.len() as i64;
    let mut angle_form = rational::int(2 - chi_link);
    for le in &link.edges {
        angle_form -= ac.angle(le.cell, le.position);
    }
    Ok(VertexCurvature {
        vertex: x,
        deficiency_form,
        angle_form,
    })
}

pub fn vertex_curvature(ac: &AngledComplex, x: usize) -> Result<Rational> {
    let v = vertex_curvature_forms(ac, x)?;
    assert_eq!(v.deficiency_form, v.angle_form, "curvature forms disagree at vertex {x}");
    Ok(v.deficiency_form)
}

/// A subgraph of `link(vertex)` given by link vertex and link edge indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionSpec {
    pub vertex: usize,
    pub link_vertices: Vec<usize>,
    pub link_edges: Vec<usize>,
}

impl SectionSpec {
    pub fn full(link: &LinkGraph) -> Self {
        Self {
            vertex: link.vertex,
            link_vertices: (0..link.vertices.len()).collect(),
            link_edges: (0..link.edges.len()).collect(),
        }
    }

    /// Nonempty, connected, every vertex of valence at least 2.
    pub fn check_regular(&self, link: &LinkGraph) -> Result<()> {
        let n = link.vertices.len();
        let bad = |msg: String| Err(Error::InvalidArgument(format!("irregular section: {msg}")));
        if self.link_vertices.is_empty() {
            return bad("empty".into());
        }
        let mut local = vec![usize::MAX; n];
        for (i, &v) in self.link_vertices.iter().enumerate() {
            if v >= n {
                return bad(format!("link vertex {v} out of range"));
            }
            if local[v] != usize::MAX {
                return bad(format!("link vertex {v} repeated"));
            }
            local[v] = i;
        }
        let mut valence = vec![0usize; self.link_vertices.len()];
        let mut dsu = DisjointSets::new(self.link_vertices.len());
        let mut seen = vec![false; link.edges.len()];
        for &e in &self.link_edges {
            if e >= link.edges.len() || seen[e] {
                return bad(format!("link edge {e} out of range or repeated"));
            }
            seen[e] = true;
            let le = &link.edges[e];
            let (a, b) = (local[le.from], local[le.to]);
            if a == usize::MAX || b == usize::MAX {
                return bad(format!("link edge {e} leaves the vertex set"));
            }
            valence[a] += 1;
            valence[b] += 1;
            dsu.union(a, b);
        }
        if let Some(i) = valence.iter().position(|&d| d <= 1) {
            return bad(format!("link vertex {} has valence {}", self.link_vertices[i], valence[i]));
        }
        let root = dsu.find(0);
        if (1..valence.len()).any(|i| dsu.find(i) != root) {
            return bad("disconnected".into());
        }
        Ok(())
    }
}

pub fn section_curvature(ac: &AngledComplex, s: &SectionSpec) -> Result<Rational> {
    let link = ac.base.link(s.vertex)?;
    s.check_regular(&link)?;
    Ok(section_value(ac, &link, s.link_vertices.len(), &s.link_edges))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionalVerdict {
    pub nonpositive: bool,
    /// Generators (0-based) of the first qualifying subgroup with positive
    /// Euler characteristic, by size then lexicographically.
    pub witness: Option<Vec<usize>>,
    #[serde(with = "rational::serde_str::option")]
    pub witness_chi: Option<Rational>,
    /// The criterion is meant for presentations of dimension at most 2.
    pub dimension_at_most_2: bool,
    pub subgroups_checked: usize,
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

pub const SUBSET_RANK_LIMIT: usize = 22;

/// Checks `chi(H) <= 0` for every Coxeter subgroup `H` whose diagram is
/// connected and not a tree.
pub fn has_nonpositive_sectional(p: &CoxeterPresentation) -> Result<SectionalVerdict> {
    let r = p.rank();
    if r > SUBSET_RANK_LIMIT {
        return Err(Error::SizeCap { cap: SUBSET_RANK_LIMIT });
    }
    let mut checked = 0;
    for size in 3..=r {
        let subsets = combinations(r, size);
        let found = subsets
            .par_iter()
            .map(|s| {
                let h = p.subgroup(s).expect("valid subset");
                let d = h.diagram();
                let qualifies = d.is_connected() && !d.is_tree();
                let chi = h.euler_characteristic();
                (qualifies, chi)
            })
            .collect::<Vec<_>>();
        for (s, (qualifies, chi)) in subsets.into_iter().zip(found) {
            if !qualifies {
                continue;
            }
            checked += 1;
            if chi > rational::zero() {
                return Ok(SectionalVerdict {
                    nonpositive: false,
                    witness: Some(s),
                    witness_chi: Some(chi),
                    dimension_at_most_2: p.has_dimension_at_most_2(),
                    subgroups_checked: checked,
                });
            }
        }
    }
    Ok(SectionalVerdict {
        nonpositive: true,
        witness: None,
        witness_chi: None,
        dimension_at_most_2: p.has_dimension_at_most_2(),
        subgroups_checked: checked,
    })
}

pub const BRUTE_FORCE_MAX_LINK_VERTICES: usize = 7;
pub const BRUTE_FORCE_MAX_LINK_EDGES: usize = 24;

/// Maximum curvature over all regular subgraphs of `link(x)`, or `None` when
/// the link has none.
pub fn brute_force_sectional_at(ac: &AngledComplex, x: usize) -> Result<Option<Rational>> {
    let link = ac.base.link(x)?;
    if link.vertices.len() > BRUTE_FORCE_MAX_LINK_VERTICES {
        return Err(Error::SizeCap {
            cap: BRUTE_FORCE_MAX_LINK_VERTICES,
        });
    }
    if link.edges.len() > BRUTE_FORCE_MAX_LINK_EDGES {
        return Err(Error::SizeCap {
            cap: BRUTE_FORCE_MAX_LINK_EDGES,
        });
    }
    let ne = link.edges.len();
    let best = (1u64..1 << ne)
        .into_par_iter()
        .filter_map(|mask| {
            let edges: Vec<usize> = (0..ne).filter(|&e| mask >> e & 1 == 1).collect();
            let mut verts: Vec<usize> = edges
                .iter()
                .flat_map(|&e| [link.edges[e].from, link.edges[e].to])
                .collect();
            verts.sort_unstable();
            verts.dedup();
            let s = SectionSpec {
                vertex: x,
                link_vertices: verts,
                link_edges: edges,
            };
            s.check_regular(&link).ok()?;
            Some(section_value(ac, &link, s.link_vertices.len(), &s.link_edges))
        })
        .max();
    Ok(best)
}

/// Every finite exponent exceeds `r(r-1) / (2(r-2))`.
pub fn negative_sectional_sufficient(p: &CoxeterPresentation) -> Result<bool> {
    let r = p.rank() as i64;
    if r < 3 {
        return Err(Error::InvalidArgument(format!("rank {r} is below 3")));
    }
    let bound = rational::frac(r * (r - 1), 2 * (r - 2));
    Ok(p.finite_pairs().all(|(_, _, m)| rational::int(m as i64) > bound))
}

/// `m >= 3r/2` for a uniform exponent `m`.
pub fn locally_quasiconvex_sufficient(p: &CoxeterPresentation) -> Result<bool> {
    let m = p.uniform_exponent().ok_or_else(|| {
        Error::InvalidPresentation("criterion stated for uniform exponent only".into())
    })?;
    Ok(2 * m as u64 >= 3 * p.rank() as u64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub units: String,
    /// Distinct cell curvatures with multiplicities.
    pub cell_curvatures: BTreeMap<String, usize>,
    /// Distinct vertex curvatures with multiplicities.
    pub vertex_curvatures: BTreeMap<String, usize>,
    /// Full-link section curvature at vertex 0, when regular.
    pub full_link_section: Option<String>,
    /// `2 chi(G)`, the expected full-link value for compressed covers.
    pub two_chi: String,
    pub sectional: SectionalVerdict,
    pub negative_sectional_sufficient: Option<bool>,
    pub locally_quasiconvex_sufficient: Option<bool>,
}

pub fn curvature_report(p: &CoxeterPresentation, ac: &AngledComplex) -> Result<CurvatureReport> {
    let mut cells = BTreeMap::new();
    for f in 0..ac.base.two_cells().len() {
        *cells.entry(cell_curvature(ac, f).to_string()).or_insert(0) += 1;
    }
    let mut verts = BTreeMap::new();
    for x in 0..ac.base.zero_cell_count() {
        *verts.entry(vertex_curvature(ac, x)?.to_string()).or_insert(0) += 1;
    }
    let full_link_section = if ac.base.zero_cell_count() > 0 {
        let link = ac.base.link(0)?;
        section_curvature(ac, &SectionSpec::full(&link)).ok().map(|k| k.to_string())
    } else {
        None
    };
    Ok(CurvatureReport {
        units: "pi".into(),
        cell_curvatures: cells,
        vertex_curvatures: verts,
        full_link_section,
        two_chi: (rational::int(2) * p.euler_characteristic()).to_string(),
        sectional: has_nonpositive_sectional(p)?,
        negative_sectional_sufficient: negative_sectional_sufficient(p).ok(),
        locally_quasiconvex_sufficient: locally_quasiconvex_sufficient(p).ok(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Step;

    fn polygon(n: usize) -> TwoComplex {
        let mut k = TwoComplex::new(n);
        let edges: Vec<usize> = (0..n).map(|i| k.add_edge(i, (i + 1) % n).unwrap()).collect();
        k.add_cell(edges.into_iter().map(Step::fwd).collect(), None).unwrap();
        k
    }

    #[test]
    fn regular_polygons_are_flat() {
        for n in 3..9 {
            let ac = regular_euclidean_angles(&polygon(n)).unwrap();
            assert_eq!(ac.angles[0][0], rational::frac(n as i64 - 2, n as i64));
            assert_eq!(cell_curvature(&ac, 0), rational::zero());
        }
        let mut k = TwoComplex::new(2);
        let a = k.add_edge(0, 1).unwrap();
        let b = k.add_edge(1, 0).unwrap();
        k.add_cell(vec![Step::fwd(a), Step::fwd(b)], None).unwrap();
        assert!(regular_euclidean_angles(&k).is_err());
    }

    #[test]
    fn right_angled_hexagon() {
        let k = polygon(6);
        let ac = AngledComplex::new(k, vec![vec![rational::frac(1, 2); 6]]).unwrap();
        assert_eq!(cell_curvature(&ac, 0), rational::int(-1));
    }

    #[test]
    fn isolated_vertex() {
        let ac = AngledComplex::new(TwoComplex::new(1), vec![]).unwrap();
        assert_eq!(vertex_curvature(&ac, 0).unwrap(), rational::int(2));
    }

    #[test]
    fn sufficient_conditions() {
        let u = |r, m| CoxeterPresentation::uniform(r, m).unwrap();
        assert!(negative_sectional_sufficient(&u(4, 4)).unwrap());
        assert!(!negative_sectional_sufficient(&u(4, 3)).unwrap());
        assert!(negative_sectional_sufficient(&u(3, 4)).unwrap());
        assert!(negative_sectional_sufficient(&u(2, 4)).is_err());
        assert!(locally_quasiconvex_sufficient(&u(4, 6)).unwrap());
        assert!(!locally_quasiconvex_sufficient(&u(4, 5)).unwrap());
        assert!(locally_quasiconvex_sufficient(&u(3, 5)).unwrap());
        let mut mixed = u(3, 5);
        mixed.set(0, 1, crate::Exponent::Finite(6)).unwrap();
        assert!(locally_quasiconvex_sufficient(&mixed).is_err());
    }

    #[test]
    fn sectional_verdicts() {
        let u = |r, m| CoxeterPresentation::uniform(r, m).unwrap();
        assert!(has_nonpositive_sectional(&u(4, 3)).unwrap().nonpositive);
        let v = has_nonpositive_sectional(&u(5, 3)).unwrap();
        assert!(!v.nonpositive);
        assert_eq!(v.witness, Some(vec![0, 1, 2, 3, 4]));
        assert_eq!(v.witness_chi, Some(rational::frac(1, 6)));
        // path diagram: a tree, vacuously nonpositive
        let path = CoxeterPresentation::from_pairs(
            4,
            &[(0, 1, crate::Exponent::Finite(3)), (1, 2, crate::Exponent::Finite(3)), (2, 3, crate::Exponent::Finite(3))],
        )
        .unwrap();
        let v = has_nonpositive_sectional(&path).unwrap();
        assert!(v.nonpositive && v.subgroups_checked == 0);
    }

    #[test]
    fn combinations_in_order() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(4, 2)[0], vec![0, 1]);
        assert_eq!(combinations(4, 2)[5], vec![2, 3]);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
    }
}
