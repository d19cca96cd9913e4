//! Permutations of `{0, .., n-1}` and enumeration of the groups they generate.
//!
//! Permutations act on the right: `x.then(y)` applies `x` first, so products
//! read in the same order as words in the generators.

use std::collections::HashMap;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a permutation of 0..{n}"
                )));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    pub fn from_one_based(images: &[u32]) -> Result<Self> {
        if images.contains(&0) {
            return Err(Error::InvalidPermutation(
                "1-based image list contains 0".into(),
            ));
        }
        Self::from_images(images.iter().map(|&x| x - 1).collect())
    }

    pub fn to_one_based(&self) -> Vec<u32> {
        self.0.iter().map(|&x| x + 1).collect()
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut v: Vec<u32> = (0..n as u32).collect();
        v.swap(a, b);
        Perm(v)
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut v = vec![0u32; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            v[x as usize] = i as u32;
        }
        Perm(v)
    }

    /// Order as the lcm of cycle lengths.
    pub fn order(&self) -> u64 {
        let n = self.0.len();
        let mut seen = vec![false; n];
        let mut order = 1u64;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x] as usize;
                len += 1;
            }
            order = order.lcm(&len);
        }
        order
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

/// A finite permutation group given by generators, with its elements listed
/// in breadth-first order from the identity and a right-multiplication table
/// for the generators.
#[derive(Clone, Debug)]
pub struct GeneratedGroup {
    pub elements: Vec<Perm>,
    /// `right_mult[g][i]` is the index of `elements[g] * gens[i]`.
    pub right_mult: Vec<Vec<usize>>,
}

impl GeneratedGroup {
    /// Enumerates `<gens>`, failing once more than `cap` elements are found.
    pub fn enumerate(gens: &[Perm], degree: usize, cap: usize) -> Result<Self> {
        let id = Perm::identity(degree);
        let mut index: HashMap<Perm, usize> = HashMap::new();
        let mut elements = vec![id.clone()];
        index.insert(id, 0);
        let mut right_mult: Vec<Vec<usize>> = Vec::new();
        let mut head = 0;
        while head < elements.len() {
            let mut row = Vec::with_capacity(gens.len());
            for s in gens {
                let prod = elements[head].then(s);
                let next = elements.len();
                let idx = *index.entry(prod.clone()).or_insert(next);
                if idx == next {
                    if elements.len() >= cap {
                        return Err(Error::SizeCap { cap });
                    }
                    elements.push(prod);
                }
                row.push(idx);
            }
            right_mult.push(row);
            head += 1;
        }
        Ok(Self {
            elements,
            right_mult,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    #[test]
    fn orders_by_direct_multiplication() {
        let a = Perm::transposition(5, 0, 1);
        let b = Perm::transposition(5, 0, 2);
        assert_eq!(a.order(), 2);
        let ab = a.then(&b);
        assert_eq!(ab.order(), 3);
        assert!(ab.then(&ab).then(&ab).is_identity());
        assert!(!ab.then(&ab).is_identity());
        assert!(a.then(&a).is_identity());
        assert_eq!(Perm::identity(4).order(), 1);
    }

    #[test]
    fn star_transpositions_generate_symmetric_groups() {
        for n in 3..=6 {
            let gens: Vec<Perm> = (1..n).map(|i| Perm::transposition(n, 0, i)).collect();
            let g = GeneratedGroup::enumerate(&gens, n, 1_000_000).unwrap();
            assert_eq!(g.order(), factorial(n));
        }
    }

    #[test]
    fn dihedral_of_order_six() {
        let gens = vec![Perm::transposition(3, 0, 1), Perm::transposition(3, 0, 2)];
        let g = GeneratedGroup::enumerate(&gens, 3, 100).unwrap();
        assert_eq!(g.order(), 6);
        for (x, row) in g.right_mult.iter().enumerate() {
            for (i, &y) in row.iter().enumerate() {
                assert_eq!(g.elements[x].then(&gens[i]), g.elements[y]);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let gens: Vec<Perm> = (1..5).map(|i| Perm::transposition(5, 0, i)).collect();
        assert!(matches!(
            GeneratedGroup::enumerate(&gens, 5, 100),
            Err(Error::SizeCap { cap: 100 })
        ));
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(Perm::from_images(vec![0, 0, 1]).is_err());
        assert!(Perm::from_images(vec![0, 3]).is_err());
        assert!(Perm::from_one_based(&[0, 1]).is_err());
        let p = Perm::from_one_based(&[2, 3, 1]).unwrap();
        assert_eq!(p.images(), &[1, 2, 0]);
        assert_eq!(p.to_one_based(), vec![2, 3, 1]);
        assert!(p.then(&p.inverse()).is_identity());
    }
}
