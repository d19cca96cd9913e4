//! Coxeter presentations, their diagrams, and the Euler characteristic.
//!
//! Generators are indexed from 0 in the Rust API. The JSON format uses
//! 1-based indices to match the conventional `a_1, ..., a_r` labelling.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Off-diagonal entry of a Coxeter matrix. `Infinite` means there is no
/// relator for that pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Exponent {
    Finite(u32),
    Infinite,
}

impl Exponent {
    pub fn finite(self) -> Option<u32> {
        match self {
            Exponent::Finite(m) => Some(m),
            Exponent::Infinite => None,
        }
    }

    /// `1/m`, with `1/inf = 0`.
    pub fn reciprocal(self) -> Rational {
        match self {
            Exponent::Finite(m) => rational::frac(1, m as i64),
            Exponent::Infinite => rational::zero(),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(m) => write!(f, "{m}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PresentationJson", into = "PresentationJson")]
pub struct CoxeterPresentation {
    rank: usize,
    // row-major rank x rank; the diagonal is unused and holds Finite(1)
    exponents: Vec<Exponent>,
}

impl CoxeterPresentation {
    /// Presentation of the given rank with every pair at infinity.
    pub fn free(rank: usize) -> Result<Self> {
        if rank == 0 {
            return Err(Error::InvalidPresentation("rank must be positive".into()));
        }
        let mut exponents = vec![Exponent::Infinite; rank * rank];
        for i in 0..rank {
            exponents[i * rank + i] = Exponent::Finite(1);
        }
        Ok(Self { rank, exponents })
    }

    /// The uniform presentation `G_(r,m)`: every pair has exponent `m`.
    pub fn uniform(rank: usize, m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidPresentation(format!(
                "uniform exponent must be at least 2, got {m}"
            )));
        }
        let mut p = Self::free(rank)?;
        for i in 0..rank {
            for j in i + 1..rank {
                p.set(i, j, Exponent::Finite(m))?;
            }
        }
        Ok(p)
    }

    /// Builds a presentation from `(i, j, m)` triples; omitted pairs are infinite.
    pub fn from_pairs(rank: usize, pairs: &[(usize, usize, Exponent)]) -> Result<Self> {
        let mut p = Self::free(rank)?;
        for &(i, j, m) in pairs {
            p.set(i, j, m)?;
        }
        Ok(p)
    }

    pub fn set(&mut self, i: usize, j: usize, m: Exponent) -> Result<()> {
        if i >= self.rank || j >= self.rank || i == j {
            return Err(Error::InvalidPresentation(format!(
                "pair ({i}, {j}) is not an off-diagonal index pair for rank {}",
                self.rank
            )));
        }
        if let Exponent::Finite(v) = m {
            if v < 2 {
                return Err(Error::InvalidPresentation(format!(
                    "exponent for ({i}, {j}) must be at least 2, got {v}"
                )));
            }
        }
        self.exponents[i * self.rank + j] = m;
        self.exponents[j * self.rank + i] = m;
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn exponent(&self, i: usize, j: usize) -> Exponent {
        self.exponents[i * self.rank + j]
    }

    /// Pairs `i < j` with a finite exponent, in lexicographic order.
    pub fn finite_pairs(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.rank).flat_map(move |i| {
            (i + 1..self.rank).filter_map(move |j| self.exponent(i, j).finite().map(|m| (i, j, m)))
        })
    }

    /// The common exponent when every pair shares one finite value.
    /// Rank 1 presentations have no pairs and report `None`.
    pub fn uniform_exponent(&self) -> Option<u32> {
        let mut common = None;
        for i in 0..self.rank {
            for j in i + 1..self.rank {
                let m = self.exponent(i, j).finite()?;
                match common {
                    None => common = Some(m),
                    Some(c) if c != m => return None,
                    _ => {}
                }
            }
        }
        common
    }

    /// `1 - r/2 + sum over finite pairs of 1/(2 m_ij)`.
    pub fn euler_characteristic(&self) -> Rational {
        let mut chi = rational::one() - rational::frac(self.rank as i64, 2);
        for (_, _, m) in self.finite_pairs() {
            chi += rational::frac(1, 2 * m as i64);
        }
        chi
    }

    /// The Coxeter subgroup on `subset`, relabelled in increasing index order.
    pub fn subgroup(&self, subset: &[usize]) -> Result<Self> {
        let mut idx: Vec<usize> = subset.to_vec();
        idx.sort_unstable();
        idx.dedup();
        if idx.is_empty() {
            return Err(Error::InvalidArgument("generator subset is empty".into()));
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= self.rank) {
            return Err(Error::InvalidArgument(format!(
                "generator {bad} out of range for rank {}",
                self.rank
            )));
        }
        let mut sub = Self::free(idx.len())?;
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate().skip(a + 1) {
                sub.set(a, b, self.exponent(i, j))?;
            }
        }
        Ok(sub)
    }

    /// True iff `1/m_ij + 1/m_jk + 1/m_ki <= 1` for every triple.
    pub fn has_dimension_at_most_2(&self) -> bool {
        self.first_spherical_triple().is_none()
    }

    /// First triple `i < j < k` (lexicographic) whose reciprocal sum exceeds 1.
    pub fn first_spherical_triple(&self) -> Option<(usize, usize, usize)> {
        let r = self.rank;
        let one = rational::one();
        for i in 0..r {
            for j in i + 1..r {
                for k in j + 1..r {
                    let s = self.exponent(i, j).reciprocal()
                        + self.exponent(j, k).reciprocal()
                        + self.exponent(i, k).reciprocal();
                    if s > one {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }

    pub fn diagram(&self) -> CoxeterDiagram {
        CoxeterDiagram {
            vertices: self.rank,
            edges: self.finite_pairs().collect(),
        }
    }
}

/// Labelled graph on the generators with an edge for each finite exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxeterDiagram {
    pub vertices: usize,
    pub edges: Vec<(usize, usize, u32)>,
}

impl CoxeterDiagram {
    pub fn is_connected(&self) -> bool {
        if self.vertices == 0 {
            return false;
        }
        let mut dsu = crate::dsu::DisjointSets::new(self.vertices);
        let mut components = self.vertices;
        for &(i, j, _) in &self.edges {
            if dsu.union(i, j) {
                components -= 1;
            }
        }
        components == 1
    }

    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.edges.len() + 1 == self.vertices
    }
}

#[derive(Serialize, Deserialize)]
struct PresentationJson {
    rank: usize,
    exponents: Vec<ExponentEntry>,
}

#[derive(Serialize, Deserialize)]
struct ExponentEntry {
    i: usize,
    j: usize,
    m: ExponentJson,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExponentJson {
    Int(u32),
    Word(String),
}

impl TryFrom<PresentationJson> for CoxeterPresentation {
    type Error = Error;

    fn try_from(json: PresentationJson) -> Result<Self> {
        let mut p = Self::free(json.rank)?;
        for e in json.exponents {
            if e.i == 0 || e.j == 0 {
                return Err(Error::InvalidPresentation(
                    "generator indices are 1-based".into(),
                ));
            }
            let m = match e.m {
                ExponentJson::Int(m) => Exponent::Finite(m),
                ExponentJson::Word(w) if w == "inf" => Exponent::Infinite,
                ExponentJson::Word(w) => {
                    return Err(Error::InvalidPresentation(format!(
                        "exponent must be an integer or \"inf\", got {w:?}"
                    )))
                }
            };
            p.set(e.i - 1, e.j - 1, m)?;
        }
        Ok(p)
    }
}

impl From<CoxeterPresentation> for PresentationJson {
    fn from(p: CoxeterPresentation) -> Self {
        let exponents = p
            .finite_pairs()
            .map(|(i, j, m)| ExponentEntry {
                i: i + 1,
                j: j + 1,
                m: ExponentJson::Int(m),
            })
            .collect();
        PresentationJson {
            rank: p.rank,
            exponents,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use proptest::prelude::*;

    #[test]
    fn uniform_constructor() {
        let p = CoxeterPresentation::uniform(4, 3).unwrap();
        let pairs: Vec<_> = p.finite_pairs().collect();
        assert_eq!(pairs.len(), 6);
        assert!(pairs.iter().all(|&(_, _, m)| m == 3));

        let p = CoxeterPresentation::uniform(1, 3).unwrap();
        assert_eq!(p.finite_pairs().count(), 0);

        let p = CoxeterPresentation::uniform(2, 5).unwrap();
        assert_eq!(p.exponent(0, 1), Exponent::Finite(5));
        assert_eq!(p.exponent(1, 0), Exponent::Finite(5));

        assert!(CoxeterPresentation::uniform(3, 1).is_err());
        assert!(CoxeterPresentation::uniform(0, 3).is_err());
    }

    #[test]
    fn euler_characteristic_examples() {
        let chi = |r, m| CoxeterPresentation::uniform(r, m).unwrap().euler_characteristic();
        assert_eq!(chi(4, 3), frac(0, 1));
        // 1 - 5/2 + 10/6
        assert_eq!(chi(5, 3), frac(1, 6));
        assert_eq!(chi(2, 3), frac(1, 6));
        for r in 1..6 {
            let p = CoxeterPresentation::free(r).unwrap();
            assert_eq!(p.euler_characteristic(), frac(2 - r as i64, 2));
        }
    }

    #[test]
    fn subgroup_restricts_and_relabels() {
        let p = CoxeterPresentation::uniform(5, 3).unwrap();
        assert_eq!(p.subgroup(&[0, 1, 2]).unwrap(), CoxeterPresentation::uniform(3, 3).unwrap());
        assert_eq!(p.subgroup(&[0, 1, 2, 3, 4]).unwrap(), p);

        let mixed = CoxeterPresentation::from_pairs(
            3,
            &[(0, 1, Exponent::Finite(3)), (1, 2, Exponent::Finite(4))],
        )
        .unwrap();
        let sub = mixed.subgroup(&[2, 0]).unwrap();
        assert_eq!(sub.rank(), 2);
        assert_eq!(sub.exponent(0, 1), Exponent::Infinite);
        assert!(p.subgroup(&[]).is_err());
        assert!(p.subgroup(&[7]).is_err());
    }

    #[test]
    fn dimension_predicate() {
        assert!(CoxeterPresentation::uniform(4, 3).unwrap().has_dimension_at_most_2());
        let t = CoxeterPresentation::from_pairs(
            3,
            &[(0, 1, Exponent::Finite(2)), (1, 2, Exponent::Finite(3)), (0, 2, Exponent::Finite(5))],
        )
        .unwrap();
        assert!(!t.has_dimension_at_most_2());
        assert_eq!(t.first_spherical_triple(), Some((0, 1, 2)));
        assert!(CoxeterPresentation::uniform(2, 2).unwrap().has_dimension_at_most_2());
        assert!(!CoxeterPresentation::uniform(3, 2).unwrap().has_dimension_at_most_2());
    }

    #[test]
    fn diagram_shape() {
        let path = CoxeterPresentation::from_pairs(
            3,
            &[(0, 1, Exponent::Finite(3)), (1, 2, Exponent::Finite(3))],
        )
        .unwrap();
        assert!(path.diagram().is_tree());
        let tri = CoxeterPresentation::uniform(3, 3).unwrap();
        assert!(tri.diagram().is_connected());
        assert!(!tri.diagram().is_tree());
        assert!(!CoxeterPresentation::free(2).unwrap().diagram().is_connected());
    }

    #[test]
    fn json_round_trip_and_format() {
        let p = CoxeterPresentation::from_pairs(
            3,
            &[(0, 1, Exponent::Finite(3)), (1, 2, Exponent::Finite(4))],
        )
        .unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(
            s,
            r#"{"rank":3,"exponents":[{"i":1,"j":2,"m":3},{"i":2,"j":3,"m":4}]}"#
        );
        let back: CoxeterPresentation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);

        let with_inf: CoxeterPresentation = serde_json::from_str(
            r#"{"rank":2,"exponents":[{"i":1,"j":2,"m":"inf"}]}"#,
        )
        .unwrap();
        assert_eq!(with_inf.exponent(0, 1), Exponent::Infinite);
        assert!(serde_json::from_str::<CoxeterPresentation>(
            r#"{"rank":2,"exponents":[{"i":1,"j":2,"m":1}]}"#
        )
        .is_err());
        assert!(serde_json::from_str::<CoxeterPresentation>(
            r#"{"rank":2,"exponents":[{"i":0,"j":2,"m":3}]}"#
        )
        .is_err());
    }

    fn arb_presentation() -> impl Strategy<Value = CoxeterPresentation> {
        (1usize..7).prop_flat_map(|r| {
            let n = r * (r - 1) / 2;
            proptest::collection::vec(prop_oneof![Just(None), (2u32..9).prop_map(Some)], n).prop_map(
                move |ms| {
                    let mut p = CoxeterPresentation::free(r).unwrap();
                    let mut it = ms.into_iter();
                    for i in 0..r {
                        for j in i + 1..r {
                            let m = it.next().unwrap().map_or(Exponent::Infinite, Exponent::Finite);
                            p.set(i, j, m).unwrap();
                        }
                    }
                    p
                },
            )
        })
    }

    #[test]
    fn uniform_closed_form() {
        for r in 1..=12usize {
            for m in 2..=12u32 {
                let chi = CoxeterPresentation::uniform(r, m).unwrap().euler_characteristic();
                let r_ = r as i64;
                let expected = frac(1, 1) - frac(r_, 2) + frac(r_ * (r_ - 1), 4 * m as i64);
                assert_eq!(chi, expected, "r={r} m={m}");
            }
        }
    }

    proptest! {
        #[test]
        fn removing_a_generator_shifts_chi(p in arb_presentation(), pick in 0usize..6) {
            prop_assume!(p.rank() >= 2);
            let i = pick % p.rank();
            let rest: Vec<usize> = (0..p.rank()).filter(|&j| j != i).collect();
            let sub = p.subgroup(&rest).unwrap();
            let mut expected = p.euler_characteristic() + frac(1, 2);
            for j in 0..p.rank() {
                if j != i {
                    if let Some(m) = p.exponent(i, j).finite() {
                        expected -= frac(1, 2 * m as i64);
                    }
                }
            }
            prop_assert_eq!(sub.euler_characteristic(), expected);
        }

        #[test]
        fn increasing_an_exponent(p in arb_presentation(), a in 0usize..6, b in 0usize..6) {
            let (i, j) = (a % p.rank(), b % p.rank());
            prop_assume!(i != j);
            let mut q = p.clone();
            let bigger = match p.exponent(i, j) {
                Exponent::Finite(m) => Exponent::Finite(m + 1),
                Exponent::Infinite => return Ok(()),
            };
            q.set(i, j, bigger).unwrap();
            prop_assert!(q.euler_characteristic() < p.euler_characteristic());
            if p.has_dimension_at_most_2() {
                prop_assert!(q.has_dimension_at_most_2());
            }
        }

        #[test]
        fn json_round_trip(p in arb_presentation()) {
            let s = serde_json::to_string(&p).unwrap();
            let back: CoxeterPresentation = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
