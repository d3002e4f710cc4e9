use crate::error::{Error, Result};
use crate::pointcloud::Labeling;

/// Parent pointers of a mode-seeking forest; `parent[i] == i` marks a root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParentForest {
    parent: Vec<u32>,
}

impl ParentForest {
    /// Wraps a parent array; every entry must be a valid point index.
    pub fn new(parent: Vec<u32>) -> Result<Self> {
        let n = parent.len();
        if let Some(i) = parent.iter().position(|&p| p as usize >= n) {
            return Err(Error::Contract(format!(
                "parent of point {i} is {} but the forest has {n} points",
                parent[i]
            )));
        }
        Ok(Self { parent })
    }

    pub(crate) fn from_parents(parent: Vec<u32>) -> Self {
        debug_assert!(parent.iter().all(|&p| (p as usize) < parent.len()));
        Self { parent }
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn parent(&self, i: usize) -> usize {
        self.parent[i] as usize
    }

    pub fn parents(&self) -> &[u32] {
        &self.parent
    }

    pub fn is_root(&self, i: usize) -> bool {
        self.parent[i] as usize == i
    }

    pub fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.is_root(i))
    }
}

/// Labels every point with the tree it belongs to. Trees are numbered from 1
/// in order of the first point index that reaches them.
pub fn forest_to_labels(forest: &ParentForest) -> Result<Labeling> {
    const UNKNOWN: u32 = u32::MAX;
    let n = forest.len();
    let mut root_of = vec![UNKNOWN; n];
    let mut label_of_root = vec![0u32; n];
    let mut next_label = 1;
    let mut path = Vec::new();
    let mut labels = Vec::with_capacity(n);

    for i in 0..n {
        let mut cur = i;
        path.clear();
        let root = loop {
            if root_of[cur] != UNKNOWN {
                break root_of[cur] as usize;
            }
            if forest.is_root(cur) {
                break cur;
            }
            path.push(cur);
            if path.len() > n {
                return Err(Error::Contract(format!(
                    "parent chain from point {i} does not reach a root"
                )));
            }
            cur = forest.parent(cur);
        };
        root_of[root] = root as u32;
        for &p in &path {
            root_of[p] = root as u32;
        }
        if label_of_root[root] == 0 {
            label_of_root[root] = next_label;
            next_label += 1;
        }
        labels.push(label_of_root[root]);
    }
    Ok(Labeling::new(labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(parent: Vec<u32>) -> Vec<u32> {
        forest_to_labels(&ParentForest::new(parent).unwrap())
            .unwrap()
            .into_inner()
    }

    #[test]
    fn two_trees() {
        assert_eq!(labels(vec![0, 0, 1, 3]), vec![1, 1, 1, 2]);
    }

    #[test]
    fn all_roots() {
        assert_eq!(labels(vec![0, 1, 2, 3]), vec![1, 2, 3, 4]);
    }

    #[test]
    fn chain() {
        assert_eq!(labels(vec![0, 0, 1, 2, 3]), vec![1; 5]);
        // Root at the end still gets label 1: point 0 reaches it first.
        assert_eq!(labels(vec![1, 2, 3, 3]), vec![1; 4]);
    }

    #[test]
    fn cycle_is_contract_violation() {
        let f = ParentForest::new(vec![1, 2, 0, 3]).unwrap();
        assert!(matches!(forest_to_labels(&f), Err(Error::Contract(_))));
    }

    #[test]
    fn out_of_range_parent() {
        assert!(ParentForest::new(vec![0, 5]).is_err());
    }
}
