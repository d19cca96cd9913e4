//! Standard presentation complexes, regular covers from permutation
//! quotients, and compression.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::complex::{CellTag, Sign, Step, TwoComplex};
use crate::coxeter::{CoxeterPresentation, Exponent};
use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::perm::{GeneratedGroup, Perm};

pub const DEFAULT_SIZE_CAP: usize = 1_000_000;

/// Images of the Coxeter generators in a finite permutation group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "QuotientJson", into = "QuotientJson")]
pub struct PermutationQuotient {
    degree: usize,
    generators: Vec<Perm>,
}

#[derive(Serialize, Deserialize)]
struct QuotientJson {
    degree: usize,
    generators: Vec<Vec<u32>>,
}

impl TryFrom<QuotientJson> for PermutationQuotient {
    type Error = Error;
    fn try_from(j: QuotientJson) -> Result<Self> {
        let gens = j
            .generators
            .iter()
            .map(|g| Perm::from_one_based(g))
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.degree, gens)
    }
}

impl From<PermutationQuotient> for QuotientJson {
    fn from(q: PermutationQuotient) -> Self {
        QuotientJson {
            degree: q.degree,
            generators: q.generators.iter().map(Perm::to_one_based).collect(),
        }
    }
}

impl PermutationQuotient {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidArgument("quotient degree must be positive".into()));
        }
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(Error::InvalidPermutation(format!(
                "{g:?} does not act on {degree} points"
            )));
        }
        Ok(Self { degree, generators })
    }

    /// `a_i -> (1, i+1)` on `rank + 1` points.
    pub fn star_transpositions(rank: usize) -> Self {
        let n = rank + 1;
        Self {
            degree: n,
            generators: (1..n).map(|i| Perm::transposition(n, 0, i)).collect(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn generated_group(&self, cap: usize) -> Result<GeneratedGroup> {
        GeneratedGroup::enumerate(&self.generators, self.degree, cap)
    }
}

/// Where the torsion-freeness criterion first fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TorsionViolation {
    Generator { i: usize, order: u64 },
    Pair { i: usize, j: usize, order: u64, expected: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionVerdict {
    pub torsion_free: bool,
    pub violation: Option<TorsionViolation>,
}

/// Checks that `q` is a homomorphism from the Coxeter group and that it is
/// injective on every finite standard parabolic of rank at most 2: each
/// generator image has order exactly 2 and each product of images with a
/// finite exponent has order exactly `m_ij`.
pub fn check_torsion_free_kernel(
    p: &CoxeterPresentation,
    q: &PermutationQuotient,
) -> Result<TorsionVerdict> {
    if q.generators.len() != p.rank() {
        return Err(Error::InvalidArgument(format!(
            "quotient has {} generator images, presentation has rank {}",
            q.generators.len(),
            p.rank()
        )));
    }
    let mut violation = None;
    for (i, g) in q.generators.iter().enumerate() {
        let order = g.order();
        if 2 % order != 0 {
            return Err(Error::NotHomomorphism(format!(
                "image of generator {} has order {order}",
                i + 1
            )));
        }
        if order != 2 && violation.is_none() {
            violation = Some(TorsionViolation::Generator { i, order });
        }
    }
    for (i, j, m) in p.finite_pairs() {
        let order = q.generators[i].then(&q.generators[j]).order();
        if !(m as u64).is_multiple_of(order) {
            return Err(Error::NotHomomorphism(format!(
                "product of images of generators {} and {} has order {order}, which does not divide {m}",
                i + 1,
                j + 1
            )));
        }
        if order != m as u64 && violation.is_none() {
            violation = Some(TorsionViolation::Pair {
                i,
                j,
                order,
                expected: m,
            });
        }
    }
    Ok(TorsionVerdict {
        torsion_free: violation.is_none(),
        violation,
    })
}

/// Standard 2-complex: one vertex, a loop per generator, a digon per
/// `a_i^2` and a `2 m_ij`-gon per finite pair.
pub fn presentation_complex(p: &CoxeterPresentation) -> TwoComplex {
    let mut k = TwoComplex::new(1);
    for i in 0..p.rank() {
        k.add_labelled_edge(0, 0, Some(i)).expect("vertex 0 exists");
    }
    for i in 0..p.rank() {
        k.add_cell(vec![Step::fwd(i), Step::fwd(i)], Some(CellTag::Square(i)))
            .expect("loop boundary is closed");
    }
    for (i, j, m) in p.finite_pairs() {
        let boundary = (0..m).flat_map(|_| [Step::fwd(i), Step::fwd(j)]).collect();
        k.add_cell(boundary, Some(CellTag::Pair(i, j)))
            .expect("loop boundary is closed");
    }
    k
}

/// The cover of the standard complex corresponding to `ker(q)`. Vertices are
/// the elements of the image group (vertex 0 is the identity), acting on
/// itself by right multiplication.
#[derive(Clone, Debug)]
pub struct RegularCover {
    pub degree: usize,
    pub complex: TwoComplex,
}

pub fn regular_cover(
    p: &CoxeterPresentation,
    q: &PermutationQuotient,
    cap: usize,
) -> Result<RegularCover> {
    let verdict = check_torsion_free_kernel(p, q)?;
    if let Some(v) = verdict.violation {
        return Err(Error::TorsionCheck(format!("{v:?}")));
    }
    let group = q.generated_group(cap)?;
    let d = group.order();
    let r = p.rank();
    let mult = &group.right_mult;
    let mut k = TwoComplex::new(d);
    // edge g*r + i runs from g to g*s_i
    for (g, row) in mult.iter().enumerate() {
        for (i, &h) in row.iter().enumerate() {
            k.add_labelled_edge(g, h, Some(i))?;
        }
    }
    for g in 0..d {
        for i in 0..r {
            let h = mult[g][i];
            k.add_cell(
                vec![Step::fwd(g * r + i), Step::fwd(h * r + i)],
                Some(CellTag::Square(i)),
            )?;
        }
    }
    for (i, j, m) in p.finite_pairs() {
        for g in 0..d {
            let mut boundary = Vec::with_capacity(2 * m as usize);
            let mut cur = g;
            for step in 0..2 * m as usize {
                let gen = if step % 2 == 0 { i } else { j };
                boundary.push(Step::fwd(cur * r + gen));
                cur = mult[cur][gen];
            }
            k.add_cell(boundary, Some(CellTag::Pair(i, j)))?;
        }
    }
    Ok(RegularCover { degree: d, complex: k })
}

/// Collapses each `a_i^2` digon to a single 1-cell and identifies the
/// `2 m_ij` lifts of each polygon relator that share a boundary cycle.
pub fn compress(cover: &TwoComplex, p: &CoxeterPresentation) -> Result<TwoComplex> {
    let n_edges = cover.one_cells().len();
    let mut dsu = DisjointSets::new(n_edges);
    for (c, cell) in cover.two_cells().iter().enumerate() {
        match cell.tag {
            Some(CellTag::Square(_)) => {
                let [a, b] = cell.boundary[..] else {
                    return Err(Error::MalformedComplex(format!(
                        "square relator cell {c} has boundary length {}",
                        cell.len()
                    )));
                };
                let (sa, ea) = cover.step_endpoints(a);
                let (sb, eb) = cover.step_endpoints(b);
                if sa == ea || sb == eb {
                    return Err(Error::TorsionCheck(format!(
                        "square relator cell {c} contains a loop"
                    )));
                }
                debug_assert!(ea == sb && eb == sa);
                dsu.union(a.edge, b.edge);
            }
            Some(CellTag::Pair(..)) => {}
            None => {
                return Err(Error::MalformedComplex(format!(
                    "cell {c} carries no relator tag"
                )))
            }
        }
    }
    let (class_of, n_classes) = dsu.classes();
    let mut out = TwoComplex::new(cover.zero_cell_count());
    let mut representative = vec![usize::MAX; n_classes];
    for e in 0..n_edges {
        let cls = class_of[e];
        if representative[cls] == usize::MAX {
            representative[cls] = e;
            let src = cover.edge(e);
            out.add_labelled_edge(src.tail, src.head, src.label)?;
        }
    }

    let mut groups: Vec<(usize, CellTag, usize)> = Vec::new();
    let mut by_key: HashMap<Vec<usize>, usize> = HashMap::new();
    for (c, cell) in cover.two_cells().iter().enumerate() {
        let Some(tag @ CellTag::Pair(..)) = cell.tag else {
            continue;
        };
        let mut key: Vec<usize> = cell.boundary.iter().map(|s| class_of[s.edge]).collect();
        key.sort_unstable();
        match by_key.get(&key) {
            Some(&g) => groups[g].2 += 1,
            None => {
                by_key.insert(key, groups.len());
                groups.push((c, tag, 1));
            }
        }
    }
    for (first, tag, count) in groups {
        let CellTag::Pair(i, j) = tag else { unreachable!() };
        let m = match p.exponent(i, j) {
            Exponent::Finite(m) => m as usize,
            Exponent::Infinite => {
                return Err(Error::MalformedComplex(format!(
                    "cell {first} is tagged with pair ({i}, {j}) which has no relator"
                )))
            }
        };
        if count != 2 * m {
            return Err(Error::TorsionCheck(format!(
                "polygon orbit of cell {first} has {count} lifts, expected {}",
                2 * m
            )));
        }
        let boundary = cover
            .cell(first)
            .boundary
            .iter()
            .map(|&s| {
                let e = class_of[s.edge];
                let (start, _) = cover.step_endpoints(s);
                let sign = if out.edge(e).tail == start { Sign::Plus } else { Sign::Minus };
                Step::new(e, sign)
            })
            .collect();
        out.add_cell(boundary, Some(tag))?;
    }
    Ok(out)
}
