//! Failure probabilities for ascending and descending links in the uniform
//! link model: exact formulas, a coupled per-wall sampler, an exhaustive
//! enumerator for small cases, the rank threshold, and a Ramsey bound.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::rational::{self, Rational};

/// `2^-r`.
pub fn p1(r: u32) -> Result<Rational> {
    if r < 1 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    Ok(rational::pow(&rational::frac(1, 2), r as u64))
}

fn check_rm(r: u32, m: u32) -> Result<()> {
    if r < 2 {
        return Err(Error::InvalidArgument(format!("r = {r} is below 2")));
    }
    if m < 3 {
        return Err(Error::InvalidArgument(format!("m = {m} is below 3")));
    }
    Ok(())
}

fn pairs(r: u32) -> i64 {
    r as i64 * (r as i64 - 1) / 2
}

/// `(1 - 2^(3-2m))^(r-2)`.
fn miss_factor(r: u32, m: u32) -> Rational {
    let eps = rational::pow(&rational::frac(1, 2), 2 * m as u64 - 3);
    rational::pow(&(rational::one() - eps), r as u64 - 2)
}

/// `C(r,2) / 4 * (1 - 2^(3-2m))^(r-2)`.
pub fn p2_bound(r: u32, m: u32) -> Result<Rational> {
    check_rm(r, m)?;
    Ok(rational::frac(pairs(r), 4) * miss_factor(r, m))
}

/// `2^(1-r) + C(r,2) / 2 * (1 - 2^(3-2m))^(r-2)`.
pub fn total_failure_bound(r: u32, m: u32) -> Result<Rational> {
    check_rm(r, m)?;
    Ok(rational::pow(&rational::frac(1, 2), r as u64 - 1) + rational::frac(pairs(r), 2) * miss_factor(r, m))
}

/// Link of a vertex in a compressed uniform cover: a complete graph on `r`
/// vertices whose edges each come from a `2m`-gon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkModel {
    pub r: u32,
    pub m: u32,
}

impl LinkModel {
    pub fn new(r: u32, m: u32) -> Result<Self> {
        if r < 1 {
            return Err(Error::InvalidArgument("r must be at least 1".into()));
        }
        if m < 3 {
            return Err(Error::InvalidArgument(format!("m = {m} is below 3")));
        }
        Ok(Self { r, m })
    }

    pub fn edges(&self) -> usize {
        pairs(self.r) as usize
    }

    pub fn bits_per_edge(&self) -> u32 {
        self.m - 2
    }

    pub fn total_bits(&self) -> u64 {
        self.r as u64 + self.bits_per_edge() as u64 * self.edges() as u64
    }

    fn edge_list(&self) -> Vec<(usize, usize)> {
        let r = self.r as usize;
        (0..r).flat_map(|a| (a + 1..r).map(move |b| (a, b))).collect()
    }
}

/// One fair bit per wall meeting the link. `true` means the wall points away
/// from the vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallBits {
    pub vertex_bits: Vec<bool>,
    /// Per edge in lexicographic pair order, `m - 2` bits.
    pub edge_bits: Vec<Vec<bool>>,
}

impl WallBits {
    pub fn constant(model: &LinkModel, up: bool) -> Self {
        Self {
            vertex_bits: vec![up; model.r as usize],
            edge_bits: vec![vec![up; model.bits_per_edge() as usize]; model.edges()],
        }
    }

    pub fn sample<R: RngCore>(model: &LinkModel, rng: &mut R) -> Self {
        let mut src = BitSource::new(rng);
        Self {
            vertex_bits: (0..model.r).map(|_| src.bit()).collect(),
            edge_bits: (0..model.edges())
                .map(|_| (0..model.bits_per_edge()).map(|_| src.bit()).collect())
                .collect(),
        }
    }

    /// Bit `i` of `word` in the order vertices first, then edges.
    fn from_word(model: &LinkModel, word: u64) -> Self {
        let r = model.r as usize;
        let b = model.bits_per_edge() as usize;
        Self {
            vertex_bits: (0..r).map(|i| word >> i & 1 == 1).collect(),
            edge_bits: (0..model.edges())
                .map(|e| (0..b).map(|j| word >> (r + e * b + j) & 1 == 1).collect())
                .collect(),
        }
    }
}

struct BitSource<'a, R: RngCore> {
    rng: &'a mut R,
    word: u64,
    left: u32,
}

impl<'a, R: RngCore> BitSource<'a, R> {
    fn new(rng: &'a mut R) -> Self {
        Self { rng, word: 0, left: 0 }
    }

    fn bit(&mut self) -> bool {
        if self.left == 0 {
            self.word = self.rng.next_u64();
            self.left = 64;
        }
        let b = self.word & 1 == 1;
        self.word >>= 1;
        self.left -= 1;
        b
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgraphState {
    pub nonempty: bool,
    pub connected: bool,
    /// Conditions (1) some vertex and (2) every two vertices have a common
    /// third neighbour.
    pub sufficient: bool,
}

impl SubgraphState {
    pub fn fails(&self) -> bool {
        !(self.nonempty && self.connected)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkOutcome {
    pub ascending: SubgraphState,
    pub descending: SubgraphState,
}

fn subgraph_state(model: &LinkModel, edges: &[(usize, usize)], inside: &[bool], edge_in: &[bool]) -> SubgraphState {
    let r = model.r as usize;
    let verts: Vec<usize> = (0..r).filter(|&v| inside[v]).collect();
    let mut adj = vec![vec![false; r]; r];
    let mut dsu = DisjointSets::new(r);
    let mut components = verts.len();
    for (e, &(a, b)) in edges.iter().enumerate() {
        if edge_in[e] {
            adj[a][b] = true;
            adj[b][a] = true;
            if dsu.union(a, b) {
                components -= 1;
            }
        }
    }
    let nonempty = !verts.is_empty();
    let common = verts.iter().enumerate().all(|(i, &a)| {
        verts[i + 1..]
            .iter()
            .all(|&b| verts.iter().any(|&c| c != a && c != b && adj[a][c] && adj[b][c]))
    });
    let state = SubgraphState {
        nonempty,
        connected: components == 1,
        sufficient: nonempty && common,
    };
    debug_assert!(!state.sufficient || !state.fails());
    state
}

/// Vertices are ascending iff their bit is up; an edge is ascending iff both
/// endpoints and all of its own bits are up, descending iff all are down.
pub fn link_outcome(model: &LinkModel, bits: &WallBits) -> LinkOutcome {
    let edges = model.edge_list();
    let up = &bits.vertex_bits;
    let down: Vec<bool> = up.iter().map(|b| !b).collect();
    let e_up: Vec<bool> = edges
        .iter()
        .zip(&bits.edge_bits)
        .map(|(&(a, b), w)| up[a] && up[b] && w.iter().all(|&x| x))
        .collect();
    let e_down: Vec<bool> = edges
        .iter()
        .zip(&bits.edge_bits)
        .map(|(&(a, b), w)| down[a] && down[b] && w.iter().all(|&x| !x))
        .collect();
    LinkOutcome {
        ascending: subgraph_state(model, &edges, up, &e_up),
        descending: subgraph_state(model, &edges, &down, &e_down),
    }
}

pub fn sample_link_model<R: RngCore>(model: &LinkModel, rng: &mut R) -> LinkOutcome {
    link_outcome(model, &WallBits::sample(model, rng))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureTally {
    pub ascending_fails: u64,
    pub descending_fails: u64,
    pub either_fails: u64,
    pub no_ascending_vertex: u64,
    pub no_descending_vertex: u64,
}

impl FailureTally {
    fn record(&mut self, o: &LinkOutcome) {
        let (a, d) = (o.ascending.fails(), o.descending.fails());
        self.ascending_fails += a as u64;
        self.descending_fails += d as u64;
        self.either_fails += (a || d) as u64;
        self.no_ascending_vertex += !o.ascending.nonempty as u64;
        self.no_descending_vertex += !o.descending.nonempty as u64;
    }

    fn merge(mut self, o: Self) -> Self {
        self.ascending_fails += o.ascending_fails;
        self.descending_fails += o.descending_fails;
        self.either_fails += o.either_fails;
        self.no_ascending_vertex += o.no_ascending_vertex;
        self.no_descending_vertex += o.no_descending_vertex;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub count: u64,
    pub p: f64,
    pub std_err: f64,
}

impl Estimate {
    fn new(count: u64, trials: u64) -> Self {
        let p = count as f64 / trials as f64;
        Self {
            count,
            p,
            std_err: (p * (1.0 - p) / trials as f64).sqrt(),
        }
    }

    /// `|p - target|` in units of the standard error, using the standard
    /// error of the target itself when the sample one vanishes.
    pub fn sigmas_from(&self, target: f64, trials: u64) -> f64 {
        let se = if self.std_err > 0.0 {
            self.std_err
        } else {
            (target * (1.0 - target) / trials as f64).sqrt()
        };
        if se == 0.0 {
            if self.p == target { 0.0 } else { f64::INFINITY }
        } else {
            (self.p - target).abs() / se
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloResult {
    pub model: LinkModel,
    pub trials: u64,
    pub seed: u64,
    pub counts: FailureTally,
    pub ascending_fails: Estimate,
    pub descending_fails: Estimate,
    pub either_fails: Estimate,
    pub no_ascending_vertex: Estimate,
    pub no_descending_vertex: Estimate,
}

/// Trials per RNG stream. Fixed so results do not depend on thread count.
pub const BLOCK: u64 = 1 << 14;

pub fn monte_carlo_failure(model: &LinkModel, trials: u64, seed: u64) -> Result<MonteCarloResult> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let blocks = trials.div_ceil(BLOCK);
    let counts = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let n = BLOCK.min(trials - b * BLOCK);
            let mut t = FailureTally::default();
            for _ in 0..n {
                t.record(&sample_link_model(model, &mut rng));
            }
            t
        })
        .reduce(FailureTally::default, FailureTally::merge);
    Ok(MonteCarloResult {
        model: *model,
        trials,
        seed,
        counts,
        ascending_fails: Estimate::new(counts.ascending_fails, trials),
        descending_fails: Estimate::new(counts.descending_fails, trials),
        either_fails: Estimate::new(counts.either_fails, trials),
        no_ascending_vertex: Estimate::new(counts.no_ascending_vertex, trials),
        no_descending_vertex: Estimate::new(counts.no_descending_vertex, trials),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactFailure {
    pub model: LinkModel,
    #[serde(with = "rational::serde_str")]
    pub ascending_fails: Rational,
    #[serde(with = "rational::serde_str")]
    pub descending_fails: Rational,
    #[serde(with = "rational::serde_str")]
    pub either_fails: Rational,
    #[serde(with = "rational::serde_str")]
    pub no_ascending_vertex: Rational,
    #[serde(with = "rational::serde_str")]
    pub no_descending_vertex: Rational,
}

pub const EXACT_BIT_BUDGET: u64 = 24;

/// Enumerates all `2^(r + (m-2) C(r,2))` wall-bit assignments.
pub fn exact_failure_small(model: &LinkModel) -> Result<ExactFailure> {
    let bits = model.total_bits();
    if bits > EXACT_BIT_BUDGET {
        return Err(Error::InvalidArgument(format!(
            "{bits} wall bits exceed the enumeration budget of {EXACT_BIT_BUDGET}"
        )));
    }
    let total = 1u64 << bits;
    let t = (0..total)
        .into_par_iter()
        .fold(FailureTally::default, |mut t, w| {
            t.record(&link_outcome(model, &WallBits::from_word(model, w)));
            t
        })
        .reduce(FailureTally::default, FailureTally::merge);
    let q = |c: u64| Rational::new(c.into(), total.into());
    Ok(ExactFailure {
        model: *model,
        ascending_fails: q(t.ascending_fails),
        descending_fails: q(t.descending_fails),
        either_fails: q(t.either_fails),
        no_ascending_vertex: q(t.no_ascending_vertex),
        no_descending_vertex: q(t.no_descending_vertex),
    })
}

/// Largest rank the threshold scan will try.
pub const THRESHOLD_SCAN_LIMIT: u64 = 50_000_000;

/// Interval enclosures of `ln total_failure_bound(r, m)` and of
/// `ln(1 / (q r^(4 ln q / ln(32/29))))`.
fn threshold_sides(r: u64, m: u32, q: u64) -> (Interval, Interval) {
    let ln2 = Interval::ln_u64(2);
    let eps = Interval::point(2f64.powi(3 - 2 * m as i32));
    let a = Interval::point(1.0 - r as f64) * ln2;
    let b = Interval::ln_u64(r) + Interval::ln_u64(r - 1) - Interval::ln_u64(4)
        + Interval::point(r as f64 - 2.0) * (-eps).ln_1p();
    let lhs = Interval::log_sum_exp(a, b);
    let ln_q = Interval::ln_u64(q);
    let decay = Interval::ln_u64(32) - Interval::ln_u64(29);
    let rhs = -ln_q - (Interval::point(4.0) * ln_q * Interval::ln_u64(r)).div(decay);
    (lhs, rhs)
}

/// Decides `total_failure_bound(r, m) < 1 / (q r^(4 ln q / ln(32/29)))`.
pub fn threshold_holds(r: u64, m: u32, q: u64) -> Result<bool> {
    let (lhs, rhs) = threshold_sides(r, m, q);
    if lhs.certainly_lt(rhs) {
        Ok(true)
    } else if lhs.certainly_ge(rhs) {
        Ok(false)
    } else {
        Err(Error::Precision(format!(
            "cannot separate the two sides at r = {r}, m = {m}, |Q| = {q}"
        )))
    }
}

/// Smallest `r >= 4` at which the failure bound beats the reciprocal of the
/// cover degree bound.
pub fn threshold_rank(m: u32, q_size: u64) -> Result<u64> {
    if m < 3 {
        return Err(Error::InvalidArgument(format!("m = {m} is below 3")));
    }
    if q_size < 2 {
        return Err(Error::InvalidArgument(format!("|Q| = {q_size} is below 2")));
    }
    // 2^(3-2m) underflows or rounds 1 - eps to 1 well before this
    if m > 500 {
        return Err(Error::InvalidArgument(format!("m = {m} is too large to scan")));
    }
    let mut r = 4;
    while !threshold_holds(r, m, q_size)? {
        r += 1;
        if r > THRESHOLD_SCAN_LIMIT {
            return Err(Error::InvalidArgument(format!(
                "threshold exceeds the scan limit {THRESHOLD_SCAN_LIMIT}"
            )));
        }
    }
    debug_assert!(r == 4 || !threshold_holds(r - 1, m, q_size)?);
    Ok(r)
}

/// Upper bound on the multicolour Ramsey number via
/// `R(n_1..n_c) <= 2 - c + sum_i R(.., n_i - 1, ..)`.
pub fn ramsey_upper_bound(orders: &[u32]) -> Result<BigUint> {
    if orders.is_empty() {
        return Err(Error::InvalidArgument("need at least one colour".into()));
    }
    if let Some(&n) = orders.iter().find(|&&n| n < 2) {
        return Err(Error::InvalidArgument(format!("order {n} is below 2")));
    }
    let states: f64 = orders.iter().map(|&n| (n - 1) as f64).product();
    if states > 5e6 {
        return Err(Error::InvalidArgument(format!(
            "about {states:.0} recursion states; refusing"
        )));
    }
    let mut memo = HashMap::new();
    Ok(ramsey_rec(orders.to_vec(), &mut memo))
}

fn ramsey_rec(mut ns: Vec<u32>, memo: &mut HashMap<Vec<u32>, BigUint>) -> BigUint {
    ns.retain(|&n| n > 2);
    ns.sort_unstable();
    match ns.len() {
        0 => return BigUint::from(2u32),
        1 => return BigUint::from(ns[0]),
        _ => {}
    }
    if let Some(v) = memo.get(&ns) {
        return v.clone();
    }
    let c = ns.len();
    let mut sum = BigUint::from(0u32);
    for i in 0..c {
        let mut next = ns.clone();
        next[i] -= 1;
        sum += ramsey_rec(next, memo);
    }
    // every term is at least 2, so the sum covers the c - 2 subtracted
    let v = sum + 2u32 - BigUint::from(c);
    memo.insert(ns, v.clone());
    v
}

pub fn ratio_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}
