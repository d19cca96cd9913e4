//! Wall orientations and the link conditions they induce.
//!
//! An orientation picks one of the two consistent orientations of every
//! (two-sided) wall. Each 1-cell then inherits a direction from its dual wall,
//! giving a map of the 1-skeleton to the circle. At a 0-cell `x`, a link
//! vertex is ascending when its 1-cell points away from `x`, and a link edge
//! (a corner of a 2-cell at `x`) is ascending when every wall crossing that
//! 2-cell points away from `x`.

use std::collections::BTreeMap;
use std::ops::AddAssign;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{End, LinkGraph, Sign, TwoComplex};
use crate::coxeter::CoxeterPresentation;
use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::walls::{self, PathologyReport, Sidedness, WallSet};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WallOrientation {
    pub signs: Vec<Sign>,
}

impl WallOrientation {
    pub fn all(n_walls: usize, sign: Sign) -> Self {
        Self {
            signs: vec![sign; n_walls],
        }
    }

    /// Bit `w` of `bits` set means wall `w` gets `Plus`.
    pub fn from_bits(n_walls: usize, bits: u64) -> Self {
        Self {
            signs: (0..n_walls).map(|w| Sign::from_bool(bits >> w & 1 == 1)).collect(),
        }
    }

    /// One fair bit per wall from stream `attempt` of the generator seeded
    /// with `seed`.
    pub fn sample(n_walls: usize, seed: u64, attempt: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        Self {
            signs: (0..n_walls).map(|_| Sign::from_bool(rng.random::<bool>())).collect(),
        }
    }

    pub fn flipped(&self) -> Self {
        Self {
            signs: self.signs.iter().map(|&s| -s).collect(),
        }
    }

    pub fn to_map(&self) -> BTreeMap<usize, i8> {
        self.signs.iter().enumerate().map(|(w, &s)| (w, s.into())).collect()
    }
}

/// A direction per 1-cell; `Plus` means the 1-cell points tail to head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedSkeleton {
    pub n_vertices: usize,
    pub directions: Vec<Sign>,
    /// `(from, to)` per 1-cell after applying its direction.
    pub arcs: Vec<(usize, usize)>,
}

impl DirectedSkeleton {
    pub fn from_directions(k: &TwoComplex, directions: Vec<Sign>) -> Self {
        let arcs = k
            .one_cells()
            .iter()
            .zip(&directions)
            .map(|(e, &d)| match d {
                Sign::Plus => (e.tail, e.head),
                Sign::Minus => (e.head, e.tail),
            })
            .collect();
        Self {
            n_vertices: k.zero_cell_count(),
            directions,
            arcs,
        }
    }

    /// Direction of each boundary step relative to the direction of travel.
    pub fn traversal(&self, k: &TwoComplex, cell: usize) -> Vec<Sign> {
        k.cell(cell)
            .boundary
            .iter()
            .map(|s| self.directions[s.edge] * s.sign)
            .collect()
    }

    pub fn boundary_sum(&self, k: &TwoComplex, cell: usize) -> i64 {
        self.traversal(k, cell).iter().map(|s| s.as_i64()).sum()
    }

    /// Is a link vertex (an end of a 1-cell) pointing away from its 0-cell?
    pub fn points_away(&self, edge: usize, end: End) -> bool {
        matches!(
            (end, self.directions[edge]),
            (End::Tail, Sign::Plus) | (End::Head, Sign::Minus)
        )
    }
}

/// True iff the directed 1-skeleton contains a directed cycle.
pub fn has_positive_closed_path(ds: &DirectedSkeleton) -> bool {
    let n = ds.n_vertices;
    let mut indeg = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &ds.arcs {
        out[a].push(b);
        indeg[b] += 1;
    }
    let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
    let mut removed = 0;
    while let Some(v) = stack.pop() {
        removed += 1;
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    removed < n
}

/// Exactly two cyclic sign changes: one positive run followed by one
/// negative run.
pub fn is_lawful(traversal: &[Sign]) -> bool {
    let n = traversal.len();
    (0..n).filter(|&i| traversal[i] != traversal[(i + 1) % n]).count() == 2
}

pub fn lawful_cells(k: &TwoComplex, ds: &DirectedSkeleton) -> Vec<usize> {
    (0..k.two_cells().len())
        .filter(|&c| is_lawful(&ds.traversal(k, c)))
        .collect()
}

pub fn lawful_subcomplex(k: &TwoComplex, ds: &DirectedSkeleton) -> TwoComplex {
    k.with_cells(&lawful_cells(k, ds))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sublink {
    /// Indices into the link's vertex list.
    pub vertices: Vec<usize>,
    /// Indices into the link's edge list.
    pub edges: Vec<usize>,
    pub nonempty: bool,
    pub connected: bool,
}

impl Sublink {
    fn new(link: &LinkGraph, vertices: Vec<usize>, edges: Vec<usize>) -> Self {
        let mut local = vec![usize::MAX; link.vertices.len()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let mut dsu = DisjointSets::new(vertices.len());
        let mut components = vertices.len();
        for &e in &edges {
            let le = &link.edges[e];
            let (a, b) = (local[le.from], local[le.to]);
            debug_assert!(a != usize::MAX && b != usize::MAX);
            if dsu.union(a, b) {
                components -= 1;
            }
        }
        Self {
            nonempty: !vertices.is_empty(),
            connected: components == 1,
            vertices,
            edges,
        }
    }

    pub fn passes(&self) -> bool {
        self.nonempty && self.connected
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexLinks {
    pub vertex: usize,
    pub ascending: Sublink,
    pub descending: Sublink,
}

impl VertexLinks {
    pub fn passes(&self) -> bool {
        self.ascending.passes() && self.descending.passes()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AscDescReport {
    pub vertices: Vec<VertexLinks>,
}

impl AscDescReport {
    pub fn failing_vertices(&self) -> Vec<usize> {
        self.vertices.iter().filter(|v| !v.passes()).map(|v| v.vertex).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.vertices.iter().all(VertexLinks::passes)
    }

    pub fn failure_counts(&self) -> FailureCounts {
        let mut f = FailureCounts::default();
        for v in &self.vertices {
            f.ascending_empty += !v.ascending.nonempty as u64;
            f.ascending_disconnected += (v.ascending.nonempty && !v.ascending.connected) as u64;
            f.descending_empty += !v.descending.nonempty as u64;
            f.descending_disconnected += (v.descending.nonempty && !v.descending.connected) as u64;
        }
        f
    }
}

/// Walls, base orientations and links of a complex whose walls are all
/// two-sided, ready for evaluating orientations.
#[derive(Clone, Debug)]
pub struct MorseFrame<'a> {
    complex: &'a TwoComplex,
    walls: &'a WallSet,
    base: Vec<Sign>,
    links: Vec<LinkGraph>,
}

impl<'a> MorseFrame<'a> {
    pub fn new(k: &'a TwoComplex, ws: &'a WallSet) -> Result<Self> {
        let mut base = vec![Sign::Plus; k.one_cells().len()];
        for (w, s) in walls::two_sidedness(k, ws).into_iter().enumerate() {
            match s {
                Sidedness::TwoSided { orientation } => {
                    for (e, sign) in orientation {
                        base[e] = sign;
                    }
                }
                Sidedness::OneSided { .. } => return Err(Error::OneSidedWall(w)),
            }
        }
        Ok(Self {
            complex: k,
            walls: ws,
            base,
            links: k.links(),
        })
    }

    pub fn complex(&self) -> &TwoComplex {
        self.complex
    }

    pub fn walls(&self) -> &WallSet {
        self.walls
    }

    pub fn links(&self) -> &[LinkGraph] {
        &self.links
    }

    pub fn induce_directions(&self, o: &WallOrientation) -> Result<DirectedSkeleton> {
        if o.signs.len() != self.walls.len() {
            return Err(Error::InvalidArgument(format!(
                "orientation has {} signs for {} walls",
                o.signs.len(),
                self.walls.len()
            )));
        }
        let dirs = self
            .base
            .iter()
            .enumerate()
            .map(|(e, &b)| o.signs[self.walls.wall_of(e)] * b)
            .collect();
        Ok(DirectedSkeleton::from_directions(self.complex, dirs))
    }

    /// `(ascending, descending)` for the corner at `position` of `cell`:
    /// every arc of the cell must point away from (toward) that corner.
    pub fn classify_corner(&self, ds: &DirectedSkeleton, cell: usize, position: usize) -> (bool, bool) {
        let t = ds.traversal(self.complex, cell);
        let len = t.len();
        let half = len / 2;
        let (mut asc, mut desc) = (true, true);
        for j in 0..half {
            // side j runs p_j -> p_{j+1}; the arc splits the corners into
            // {p_{j+1}, .., p_{j+half}} and the rest
            let on_far_side = (position + len - j - 1) % len < half;
            let away = (t[j] == Sign::Plus) != on_far_side;
            asc &= away;
            desc &= !away;
        }
        (asc, desc)
    }

    pub fn asc_desc_links(&self, ds: &DirectedSkeleton) -> AscDescReport {
        let vertices = self
            .links
            .iter()
            .map(|link| {
                let (mut av, mut dv) = (Vec::new(), Vec::new());
                for (i, lv) in link.vertices.iter().enumerate() {
                    if ds.points_away(lv.edge, lv.end) {
                        av.push(i);
                    } else {
                        dv.push(i);
                    }
                }
                let (mut ae, mut de) = (Vec::new(), Vec::new());
                for (i, le) in link.edges.iter().enumerate() {
                    let (asc, desc) = self.classify_corner(ds, le.cell, le.position);
                    if asc {
                        ae.push(i);
                    }
                    if desc {
                        de.push(i);
                    }
                }
                VertexLinks {
                    vertex: link.vertex,
                    ascending: Sublink::new(link, av, ae),
                    descending: Sublink::new(link, dv, de),
                }
            })
            .collect();
        AscDescReport { vertices }
    }
}

pub fn induce_directions(k: &TwoComplex, ws: &WallSet, o: &WallOrientation) -> Result<DirectedSkeleton> {
    MorseFrame::new(k, ws)?.induce_directions(o)
}

pub fn asc_desc_links(k: &TwoComplex, ws: &WallSet, o: &WallOrientation) -> Result<AscDescReport> {
    let frame = MorseFrame::new(k, ws)?;
    let ds = frame.induce_directions(o)?;
    Ok(frame.asc_desc_links(&ds))
}

/// Per-condition failure tallies. A vertex with an empty sublink is counted
/// as empty only, not also as disconnected.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureCounts {
    pub ascending_empty: u64,
    pub ascending_disconnected: u64,
    pub descending_empty: u64,
    pub descending_disconnected: u64,
}

impl FailureCounts {
    pub fn any(&self) -> bool {
        self.ascending_empty + self.ascending_disconnected + self.descending_empty + self.descending_disconnected
            > 0
    }

    fn indicator(&self) -> Self {
        Self {
            ascending_empty: (self.ascending_empty > 0) as u64,
            ascending_disconnected: (self.ascending_disconnected > 0) as u64,
            descending_empty: (self.descending_empty > 0) as u64,
            descending_disconnected: (self.descending_disconnected > 0) as u64,
        }
    }
}

impl AddAssign for FailureCounts {
    fn add_assign(&mut self, o: Self) {
        self.ascending_empty += o.ascending_empty;
        self.ascending_disconnected += o.ascending_disconnected;
        self.descending_empty += o.descending_empty;
        self.descending_disconnected += o.descending_disconnected;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttemptSummary {
    pub attempt: u64,
    pub failing_vertices: Vec<usize>,
    pub failures: FailureCounts,
    pub orientation: BTreeMap<usize, i8>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchOutcome {
    pub seed: u64,
    pub attempts: u64,
    pub success: bool,
    /// The successful attempt, or the attempt with the fewest failing 0-cells.
    pub best: AttemptSummary,
    /// Failing 0-cells summed over attempts, per condition.
    pub vertex_failures: FailureCounts,
    /// Attempts in which each condition failed somewhere.
    pub attempt_failures: FailureCounts,
}

impl SearchOutcome {
    pub fn orientation(&self) -> WallOrientation {
        WallOrientation {
            signs: self
                .best
                .orientation
                .values()
                .map(|&s| Sign::try_from(s).expect("stored signs are +-1"))
                .collect(),
        }
    }
}

/// Samples uniform orientations until one has nonempty connected ascending
/// and descending links at every 0-cell. Refuses to run unless every wall is
/// embedded, two-sided and free of self-osculation.
pub fn random_orientation_search(
    k: &TwoComplex,
    ws: &WallSet,
    seed: u64,
    max_attempts: u64,
) -> Result<SearchOutcome> {
    let report = walls::pathology_report_for(k, ws);
    if !report.good_walls {
        return Err(Error::BadWalls(report.summary()));
    }
    if max_attempts == 0 {
        return Err(Error::InvalidArgument("max_attempts must be positive".into()));
    }
    let frame = MorseFrame::new(k, ws)?;
    let mut vertex_failures = FailureCounts::default();
    let mut attempt_failures = FailureCounts::default();
    let mut best: Option<AttemptSummary> = None;
    let mut attempts = 0;
    for attempt in 0..max_attempts {
        attempts += 1;
        let o = WallOrientation::sample(ws.len(), seed, attempt);
        let ds = frame.induce_directions(&o)?;
        let links = frame.asc_desc_links(&ds);
        let failures = links.failure_counts();
        vertex_failures += failures;
        attempt_failures += failures.indicator();
        let failing = links.failing_vertices();
        let better = best.as_ref().is_none_or(|b| failing.len() < b.failing_vertices.len());
        if better {
            best = Some(AttemptSummary {
                attempt,
                failing_vertices: failing,
                failures,
                orientation: o.to_map(),
            });
        }
        if !failures.any() {
            break;
        }
    }
    let best = best.expect("at least one attempt");
    Ok(SearchOutcome {
        seed,
        attempts,
        success: best.failing_vertices.is_empty(),
        best,
        vertex_failures,
        attempt_failures,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateStatus {
    /// Finitely generated kernel and positive Euler characteristic.
    Full,
    /// Finitely generated kernel; incoherence not concluded.
    KernelFinitelyGeneratedOnly,
    /// Some hypothesis of the pipeline failed.
    Partial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexVerdict {
    pub vertex: usize,
    pub ascending_nonempty: bool,
    pub ascending_connected: bool,
    pub descending_nonempty: bool,
    pub descending_connected: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub status: CertificateStatus,
    pub presentation: CoxeterPresentation,
    pub degree: usize,
    #[serde(with = "rational::serde_str")]
    pub euler_characteristic: Rational,
    pub dimension_at_most_2: bool,
    pub cells: (usize, usize, usize),
    pub walls: usize,
    pub good_walls: bool,
    pub wall_summary: String,
    pub search: Option<SearchSummary>,
    pub orientation: Option<BTreeMap<usize, i8>>,
    pub failing_vertices: Vec<usize>,
    pub vertex_verdicts: Vec<VertexVerdict>,
    pub positive_closed_path: Option<bool>,
    pub lawful_cells: Option<usize>,
    pub conclusions: Vec<String>,
    pub missing: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub seed: u64,
    pub attempts: u64,
    pub success: bool,
    pub vertex_failures: FailureCounts,
    pub attempt_failures: FailureCounts,
}

/// Assembles the certificate for a compressed cover `k` of degree `degree`.
/// The group-theoretic implications are stated, not re-derived.
pub fn incoherence_certificate(
    p: &CoxeterPresentation,
    degree: usize,
    k: &TwoComplex,
    ws: &WallSet,
    pathology: &PathologyReport,
    search: Option<&SearchOutcome>,
) -> Result<Certificate> {
    let chi = p.euler_characteristic();
    let dim2 = p.has_dimension_at_most_2();
    let mut conclusions = Vec::new();
    let mut missing = Vec::new();
    let mut orientation = None;
    let mut failing_vertices = Vec::new();
    let mut vertex_verdicts = Vec::new();
    let mut positive_closed_path = None;
    let mut lawful = None;

    if pathology.good_walls {
        conclusions.push(format!(
            "all {} walls are embedded, two-sided and without self-osculation",
            ws.len()
        ));
    } else {
        missing.push(format!("wall pathologies present ({})", pathology.summary()));
    }

    if let Some(s) = search {
        let o = s.orientation();
        let frame = MorseFrame::new(k, ws)?;
        let ds = frame.induce_directions(&o)?;
        let links = frame.asc_desc_links(&ds);
        failing_vertices = links.failing_vertices();
        vertex_verdicts = links
            .vertices
            .iter()
            .map(|v| VertexVerdict {
                vertex: v.vertex,
                ascending_nonempty: v.ascending.nonempty,
                ascending_connected: v.ascending.connected,
                descending_nonempty: v.descending.nonempty,
                descending_connected: v.descending.connected,
            })
            .collect();
        lawful = Some(lawful_cells(k, &ds).len());
        let cycle = has_positive_closed_path(&ds);
        positive_closed_path = Some(cycle);
        orientation = Some(o.to_map());
        if s.success {
            conclusions.push(format!(
                "orientation from attempt {} has nonempty connected ascending and descending links at all {} vertices; by the Bestvina-Brady criterion the kernel N of the induced map to Z is finitely generated",
                s.best.attempt,
                k.zero_cell_count()
            ));
        } else {
            missing.push(format!(
                "no orientation found in {} attempts; best attempt {} fails at {} of {} vertices",
                s.attempts,
                s.best.attempt,
                failing_vertices.len(),
                k.zero_cell_count()
            ));
        }
        if cycle {
            conclusions.push("the directed 1-skeleton has a positively directed closed path, so the map to Z is nontrivial".into());
        } else if s.success {
            missing.push("no positively directed closed path: the map to Z may be trivial".into());
        }
    } else {
        missing.push("orientation search not run".into());
    }

    let kernel_ok = missing.is_empty();
    let status = if !kernel_ok {
        CertificateStatus::Partial
    } else if chi > rational::zero() && dim2 {
        conclusions.push(format!(
            "chi(G) = {chi} > 0, so chi(G') != 0 and N is not free; as cd(G') <= 2, Bieri's theorem leaves N finitely generated but not finitely presented: G is incoherent"
        ));
        CertificateStatus::Full
    } else {
        if chi <= rational::zero() {
            conclusions.push(format!("chi(G) = {chi} <= 0: kernel finitely generated only; incoherence not concluded"));
        }
        if !dim2 {
            conclusions.push("G has a spherical triple (dimension > 2): incoherence not concluded".into());
        }
        CertificateStatus::KernelFinitelyGeneratedOnly
    };

    Ok(Certificate {
        status,
        presentation: p.clone(),
        degree,
        euler_characteristic: chi,
        dimension_at_most_2: dim2,
        cells: k.cell_counts(),
        walls: ws.len(),
        good_walls: pathology.good_walls,
        wall_summary: pathology.summary(),
        search: search.map(|s| SearchSummary {
            seed: s.seed,
            attempts: s.attempts,
            success: s.success,
            vertex_failures: s.vertex_failures,
            attempt_failures: s.attempt_failures,
        }),
        orientation,
        failing_vertices,
        vertex_verdicts,
        positive_closed_path,
        lawful_cells: lawful,
        conclusions,
        missing,
    })
}

/// Cover, compress, analyze walls, search, and certify.
pub fn certify(
    p: &CoxeterPresentation,
    q: &crate::cover::PermutationQuotient,
    seed: u64,
    max_attempts: u64,
    cap: usize,
) -> Result<Certificate> {
    let cover = crate::cover::regular_cover(p, q, cap)?;
    let k = crate::cover::compress(&cover.complex, p)?;
    let ws = walls::extract_walls(&k)?;
    let pathology = walls::pathology_report_for(&k, &ws);
    let search = if pathology.good_walls {
        Some(random_orientation_search(&k, &ws, seed, max_attempts)?)
    } else {
        None
    };
    incoherence_certificate(p, cover.degree, &k, &ws, &pathology, search.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::Step;

    #[test]
    fn lawful_sign_patterns() {
        use Sign::{Minus as M, Plus as P};
        assert!(is_lawful(&[P, P, P, M, M, M]));
        assert!(is_lawful(&[M, P, P, P, M, M]));
        assert!(!is_lawful(&[P, M, P, M, P, M]));
        assert!(!is_lawful(&[P, P, M, P, M, M]));
    }

    #[test]
    fn closed_paths() {
        let mut k = TwoComplex::new(2);
        k.add_edge(0, 1).unwrap();
        let ds = DirectedSkeleton::from_directions(&k, vec![Sign::Plus]);
        assert!(!has_positive_closed_path(&ds));
        k.add_edge(0, 1).unwrap();
        let ds = DirectedSkeleton::from_directions(&k, vec![Sign::Plus, Sign::Minus]);
        assert!(has_positive_closed_path(&ds));
        let ds = DirectedSkeleton::from_directions(&k, vec![Sign::Plus, Sign::Plus]);
        assert!(!has_positive_closed_path(&ds));
    }

    #[test]
    fn every_vertex_with_out_edge_has_cycle() {
        // functional graph on 7 vertices
        let mut k = TwoComplex::new(7);
        for v in 0..7 {
            k.add_edge(v, (v * 3 + 1) % 7).unwrap();
        }
        let ds = DirectedSkeleton::from_directions(&k, vec![Sign::Plus; 7]);
        assert!(has_positive_closed_path(&ds));
    }

    #[test]
    fn one_sided_walls_abort() {
        let mut k = TwoComplex::new(2);
        let e = k.add_edge(0, 1).unwrap();
        let f = k.add_edge(1, 0).unwrap();
        k.add_cell(vec![Step::fwd(e), Step::fwd(f), Step::fwd(e), Step::fwd(f)], None)
            .unwrap();
        let ws = walls::extract_walls(&k).unwrap();
        assert!(matches!(MorseFrame::new(&k, &ws), Err(Error::OneSidedWall(0))));
        assert!(matches!(
            random_orientation_search(&k, &ws, 1, 10),
            Err(Error::BadWalls(_))
        ));
    }

    #[test]
    fn sampling_is_deterministic() {
        let a: Vec<_> = (0..5).map(|i| WallOrientation::sample(40, 9, i)).collect();
        let b: Vec<_> = (0..5).map(|i| WallOrientation::sample(40, 9, i)).collect();
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
        assert_ne!(WallOrientation::sample(40, 10, 0), a[0]);
    }
}
