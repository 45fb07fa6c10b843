use std::collections::HashMap;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

/// Assignment of `len()` elements to clusters `0..k`.
///
/// Cluster ids are canonical: numbered by first appearance in element order,
/// so two partitions describing the same grouping compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    assignment: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Canonicalizes arbitrary cluster labels.
    pub fn new(labels: &[usize]) -> Self {
        Self::from_labels(labels)
    }

    pub fn from_labels<T: Hash + Eq>(labels: &[T]) -> Self {
        let mut ids: HashMap<&T, usize> = HashMap::new();
        let assignment = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l).or_insert(next)
            })
            .collect();
        Partition {
            assignment,
            k: ids.len(),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            assignment: (0..n).collect(),
            k: n,
        }
    }

    pub fn single_cluster(n: usize) -> Self {
        Partition {
            assignment: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Number of clusters.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn cluster_of(&self, element: usize) -> usize {
        self.assignment[element]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Members of each cluster, ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (e, &c) in self.assignment.iter().enumerate() {
            out[c].push(e);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for &c in &self.assignment {
            out[c] += 1;
        }
        out
    }

    /// True when every cluster of `self` lies inside one cluster of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.len() != coarser.len() {
            return false;
        }
        let mut parent = vec![usize::MAX; self.k];
        self.assignment
            .iter()
            .zip(&coarser.assignment)
            .all(|(&fine, &coarse)| match parent[fine] {
                usize::MAX => {
                    parent[fine] = coarse;
                    true
                }
                p => p == coarse,
            })
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = std::convert::Infallible;

    fn try_from(labels: Vec<usize>) -> Result<Self, Self::Error> {
        Ok(Partition::new(&labels))
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.assignment
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_labels() {
        let p = Partition::new(&[7, 7, 3, 9, 3]);
        assert_eq!(p.assignment(), &[0, 0, 1, 2, 1]);
        assert_eq!(p.k(), 3);
        assert_eq!(p, Partition::from_labels(&["b", "b", "a", "c", "a"]));
        assert_eq!(p.clusters(), vec![vec![0, 1], vec![2, 4], vec![3]]);
        assert_eq!(p.sizes(), vec![2, 2, 1]);
    }

    #[test]
    fn refinement() {
        let coarse = Partition::new(&[0, 0, 0, 1, 1]);
        let fine = Partition::new(&[0, 0, 2, 1, 1]);
        assert!(fine.refines(&coarse));
        assert!(!coarse.refines(&fine));
        assert!(Partition::singletons(5).refines(&coarse));
        assert!(coarse.refines(&Partition::single_cluster(5)));
    }

    #[test]
    fn serde_canonicalizes() {
        let p: Partition = serde_json::from_str("[4,4,1]").unwrap();
        assert_eq!(p.assignment(), &[0, 0, 1]);
        assert_eq!(serde_json::to_string(&p).unwrap(), "[0,0,1]");
    }
}
