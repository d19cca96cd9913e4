//! Separating families of 4-part partitions and the homomorphisms they
//! induce from rank `r` uniform Coxeter groups to rank 4.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coxeter::CoxeterPresentation;
use crate::cover::{self, PermutationQuotient};
use crate::error::{Error, Result};
use crate::perm::Perm;

/// A map from `{0, .., r-1}` to `{1, 2, 3, 4}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Partition(Vec<u8>);

impl Partition {
    pub fn new(values: Vec<u8>) -> Result<Self> {
        if let Some(v) = values.iter().find(|v| !(1..=4).contains(*v)) {
            return Err(Error::InvalidArgument(format!("partition value {v} not in 1..4")));
        }
        Ok(Self(values))
    }

    pub fn constant(r: usize, v: u8) -> Result<Self> {
        Self::new(vec![v; r])
    }

    /// The `index`-th partition in base-4 order, least significant first.
    pub fn from_index(r: usize, mut index: u64) -> Self {
        let mut v = Vec::with_capacity(r);
        for _ in 0..r {
            v.push((index % 4) as u8 + 1);
            index /= 4;
        }
        Self(v)
    }

    pub fn random<R: Rng>(r: usize, rng: &mut R) -> Self {
        Self((0..r).map(|_| rng.random_range(1..=4u8)).collect())
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[u8] {
        &self.0
    }

    pub fn value(&self, i: usize) -> u8 {
        self.0[i]
    }

    fn separates_unchecked(&self, q: &[usize; 4]) -> bool {
        let mut seen = 0u8;
        for &i in q {
            seen |= 1 << self.0[i];
        }
        seen.count_ones() == 4
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<u8>::deserialize(d)?;
        Partition::new(v).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionFamily {
    pub r: usize,
    pub partitions: Vec<Partition>,
}

impl<'de> Deserialize<'de> for PartitionFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            r: usize,
            partitions: Vec<Partition>,
        }
        let raw = Raw::deserialize(d)?;
        PartitionFamily::new(raw.r, raw.partitions).map_err(serde::de::Error::custom)
    }
}

impl PartitionFamily {
    pub fn new(r: usize, partitions: Vec<Partition>) -> Result<Self> {
        if let Some(p) = partitions.iter().find(|p| p.rank() != r) {
            return Err(Error::InvalidArgument(format!(
                "partition of size {} in a family over {r} elements",
                p.rank()
            )));
        }
        Ok(Self { r, partitions })
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }
}

pub fn separates(p: &Partition, quad: [usize; 4]) -> Result<bool> {
    for a in 0..4 {
        if quad[a] >= p.rank() {
            return Err(Error::InvalidArgument(format!(
                "index {} out of range for a partition of {} elements",
                quad[a],
                p.rank()
            )));
        }
        if quad[a + 1..].contains(&quad[a]) {
            return Err(Error::InvalidArgument(format!("repeated index in {quad:?}")));
        }
    }
    Ok(p.separates_unchecked(&quad))
}

/// All 4-subsets of `{0, .., r-1}` in lexicographic order.
pub fn quadruples(r: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..r {
        for b in a + 1..r {
            for c in b + 1..r {
                for d in c + 1..r {
                    out.push([a, b, c, d]);
                }
            }
        }
    }
    out
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Smallest `k >= 1` with `(32/29)^k >= C(r, 4)`, decided in integers.
pub fn k_required(r: usize) -> Result<u32> {
    if r < 4 {
        return Err(Error::InvalidArgument(format!("rank {r} is below 4")));
    }
    let c = binomial(r as u64, 4);
    let (mut lhs, mut rhs) = (BigUint::from(1u32), c);
    let mut k = 0u32;
    while lhs < rhs {
        lhs *= 32u32;
        rhs *= 29u32;
        k += 1;
    }
    Ok(k.max(1))
}

/// Quadruples separated by no member of the family.
pub fn verify_family(f: &PartitionFamily) -> Vec<[usize; 4]> {
    quadruples(f.r)
        .into_par_iter()
        .filter(|q| !f.partitions.iter().any(|p| p.separates_unchecked(q)))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum FamilySearch {
    Found { family: PartitionFamily, attempt: u64 },
    Exhausted { attempts: u64, best_unseparated: usize },
}

/// Draws `k` uniform partitions per attempt (attempt `t` uses stream `t`)
/// until one family separates every quadruple.
pub fn random_family(r: usize, k: usize, seed: u64, max_attempts: u64) -> Result<FamilySearch> {
    if k == 0 {
        return Err(Error::InvalidArgument("family size must be positive".into()));
    }
    let mut best = usize::MAX;
    for attempt in 0..max_attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let partitions = (0..k).map(|_| Partition::random(r, &mut rng)).collect();
        let family = PartitionFamily { r, partitions };
        let left = verify_family(&family).len();
        if left == 0 {
            return Ok(FamilySearch::Found { family, attempt });
        }
        best = best.min(left);
    }
    Ok(FamilySearch::Exhausted {
        attempts: max_attempts,
        best_unseparated: if max_attempts == 0 { binomial(r as u64, 4).try_into().unwrap_or(usize::MAX) } else { best },
    })
}

#[derive(Clone, Debug)]
pub struct GreedyConfig {
    pub seed: u64,
    /// Random candidates per step when `r > EXHAUSTIVE_MAX_RANK`.
    pub pool_size: usize,
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            pool_size: 2048,
        }
    }
}

pub const EXHAUSTIVE_MAX_RANK: usize = 8;

fn gain(p: &Partition, open: &[[usize; 4]]) -> usize {
    open.iter().filter(|q| p.separates_unchecked(q)).count()
}

/// Single-coordinate hill climbing on the number of newly separated quadruples.
fn improve(mut p: Partition, open: &[[usize; 4]]) -> (Partition, usize) {
    let mut score = gain(&p, open);
    loop {
        let mut moved = false;
        for i in 0..p.rank() {
            let keep = p.0[i];
            for v in 1..=4u8 {
                if v == keep {
                    continue;
                }
                p.0[i] = v;
                let s = gain(&p, open);
                if s > score {
                    score = s;
                    moved = true;
                    break;
                }
                p.0[i] = keep;
            }
        }
        if !moved {
            return (p, score);
        }
    }
}

/// Greedy derandomization: each step adds the candidate separating the most
/// still-open quadruples. Candidates are all `4^r` partitions for small `r`,
/// otherwise a seeded random pool refined by hill climbing.
pub fn greedy_family(r: usize, cfg: &GreedyConfig) -> Result<PartitionFamily> {
    if r < 4 {
        return Err(Error::InvalidArgument(format!("rank {r} is below 4")));
    }
    let mut open = quadruples(r);
    let mut partitions = Vec::new();
    let mut step = 0u64;
    while !open.is_empty() {
        let (mut pick, mut score) = if r <= EXHAUSTIVE_MAX_RANK {
            (0..4u64.pow(r as u32))
                .into_par_iter()
                .map(|i| {
                    let p = Partition::from_index(r, i);
                    (gain(&p, &open), std::cmp::Reverse(i))
                })
                .max()
                .map(|(s, std::cmp::Reverse(i))| (Partition::from_index(r, i), s))
                .expect("pool is nonempty")
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(step);
            let pool: Vec<Partition> = (0..cfg.pool_size.max(1))
                .map(|_| Partition::random(r, &mut rng))
                .collect();
            let (idx, _) = pool
                .par_iter()
                .enumerate()
                .map(|(i, p)| (gain(p, &open), std::cmp::Reverse(i)))
                .max()
                .map(|(s, std::cmp::Reverse(i))| (i, s))
                .expect("pool is nonempty");
            improve(pool[idx].clone(), &open)
        };
        if score == 0 {
            // separate the first open quadruple outright
            let mut v = vec![1u8; r];
            for (slot, &i) in open[0].iter().enumerate() {
                v[i] = slot as u8 + 1;
            }
            pick = Partition(v);
            score = gain(&pick, &open);
        }
        debug_assert!(score > 0);
        open.retain(|q| !pick.separates_unchecked(q));
        partitions.push(pick);
        step += 1;
    }
    Ok(PartitionFamily { r, partitions })
}

/// Generator map `a_i -> a_{p(i)}` into the rank 4 group, as 0-based indices.
pub fn phi_p(p: &CoxeterPresentation, part: &Partition) -> Result<Vec<usize>> {
    if p.rank() != part.rank() {
        return Err(Error::InvalidArgument(format!(
            "partition over {} elements for a rank {} presentation",
            part.rank(),
            p.rank()
        )));
    }
    if p.rank() > 1 && p.uniform_exponent().is_none() {
        return Err(Error::InvalidPresentation(
            "partition homomorphisms need a uniform presentation".into(),
        ));
    }
    Ok(part.values().iter().map(|&v| v as usize - 1).collect())
}

/// The product of the maps `psi . phi_p` over the family, acting on `k`
/// disjoint copies of the points of `q4`. The action is faithful on the
/// generated subgroup of `Q^k`, so element orders are those of the product.
pub fn product_homomorphism(
    r: usize,
    m: u32,
    f: &PartitionFamily,
    q4: &PermutationQuotient,
) -> Result<PermutationQuotient> {
    if f.r != r {
        return Err(Error::InvalidArgument(format!("family is over {} elements, not {r}", f.r)));
    }
    if f.is_empty() {
        return Err(Error::InvalidArgument("family is empty".into()));
    }
    let p4 = CoxeterPresentation::uniform(4, m)?;
    let verdict = cover::check_torsion_free_kernel(&p4, q4)?;
    if let Some(v) = verdict.violation {
        return Err(Error::TorsionCheck(format!("rank 4 quotient: {v:?}")));
    }
    let open = verify_family(f);
    if !open.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "family leaves {} quadruples unseparated, first {:?}",
            open.len(),
            open[0]
        )));
    }
    let n = q4.degree();
    let k = f.len();
    let mut gens = Vec::with_capacity(r);
    for i in 0..r {
        let mut images = Vec::with_capacity(k * n);
        for (c, part) in f.partitions.iter().enumerate() {
            let psi = &q4.generators()[part.value(i) as usize - 1];
            images.extend((0..n).map(|x| (c * n + psi.apply(x)) as u32));
        }
        gens.push(Perm::from_images(images)?);
    }
    let q = PermutationQuotient::new(k * n, gens)?;
    let pr = CoxeterPresentation::uniform(r, m)?;
    let verdict = cover::check_torsion_free_kernel(&pr, &q)?;
    if let Some(v) = verdict.violation {
        return Err(Error::TorsionCheck(format!("product quotient: {v:?}")));
    }
    Ok(q)
}

/// Both sides of `|Q|^k <= |Q| * r^(4 log|Q| / log(32/29))`, in logs, with
/// the comparison itself decided exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeBound {
    pub r: usize,
    pub k: u32,
    pub quotient_order: u64,
    pub ln_lhs: f64,
    pub ln_rhs: f64,
    pub holds: bool,
}

pub fn degree_bound(r: usize, k: u32, quotient_order: u64) -> DegreeBound {
    let lq = (quotient_order as f64).ln();
    let ln_lhs = k as f64 * lq;
    let ln_rhs = lq + 4.0 * (r as f64).ln() * lq / (32f64 / 29.0).ln();
    // |Q|^(k-1) <= r^(4 log|Q| / log(32/29))  <=>  32^(k-1) <= r^4 29^(k-1)
    let holds = quotient_order <= 1 || k == 0 || {
        let e = k - 1;
        BigUint::from(32u32).pow(e) <= BigUint::from(r).pow(4) * BigUint::from(29u32).pow(e)
    };
    DegreeBound {
        r,
        k,
        quotient_order,
        ln_lhs,
        ln_rhs,
        holds,
    }
}
