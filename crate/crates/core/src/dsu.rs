/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(len: usize) -> Self {
        Self {
            parent: (0..len).collect(),
            size: vec![1; len],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    /// Class index per element, classes numbered by their smallest member.
    pub fn classes(&mut self) -> (Vec<usize>, usize) {
        let n = self.parent.len();
        let mut root_class = vec![usize::MAX; n];
        let mut class_of = vec![0; n];
        let mut count = 0;
        for x in 0..n {
            let r = self.find(x);
            if root_class[r] == usize::MAX {
                root_class[r] = count;
                count += 1;
            }
            class_of[x] = root_class[r];
        }
        (class_of, count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classes_numbered_by_first_member() {
        let mut d = DisjointSets::new(6);
        d.union(4, 1);
        d.union(5, 3);
        d.union(3, 4);
        let (cls, n) = d.classes();
        assert_eq!(n, 3);
        assert_eq!(cls, vec![0, 1, 2, 1, 1, 1]);
        assert!(!d.union(1, 5));
    }
}
