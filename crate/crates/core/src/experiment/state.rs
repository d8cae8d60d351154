use crate::error::{invalid, Error, Result};

/// Source of labels for queried nodes.
pub trait Oracle {
    fn label(&mut self, node: usize) -> Result<usize>;
}

/// Answers queries from the ground-truth labeling.
#[derive(Debug, Clone)]
pub struct GroundTruthOracle<'a> {
    truth: &'a [usize],
    calls: usize,
}

impl<'a> GroundTruthOracle<'a> {
    pub fn new(truth: &'a [usize]) -> Self {
        GroundTruthOracle { truth, calls: 0 }
    }

    pub fn calls(&self) -> usize {
        self.calls
    }
}

impl Oracle for GroundTruthOracle<'_> {
    fn label(&mut self, node: usize) -> Result<usize> {
        self.calls += 1;
        self.truth.get(node).copied().ok_or(Error::MissingLabel(node))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Pool,
    Labeled,
    Test,
    Validation,
}

/// Labeled set, candidate pool and reserved evaluation sets of one run.
#[derive(Debug, Clone)]
pub struct ALState {
    slots: Vec<Slot>,
    /// `(node, iteration)` in query order.
    labeled: Vec<(usize, usize)>,
    known: Vec<Option<usize>>,
    /// Sorted ascending.
    pool: Vec<usize>,
    test: Vec<usize>,
    validation: Vec<usize>,
}

impl ALState {
    /// Every node not in `test` or `validation` starts in the pool.
    pub fn new(n: usize, test: &[usize], validation: &[usize]) -> Result<Self> {
        let mut slots = vec![Slot::Pool; n];
        for (set, slot) in [(test, Slot::Test), (validation, Slot::Validation)] {
            for &i in set {
                if i >= n {
                    return Err(Error::NodeOutOfRange { index: i, n });
                }
                if slots[i] != Slot::Pool {
                    return Err(invalid("split", format!("node {i} is in more than one reserved set")));
                }
                slots[i] = slot;
            }
        }
        let collect = |want: Slot| -> Vec<usize> { (0..n).filter(|&i| slots[i] == want).collect() };
        Ok(ALState {
            pool: collect(Slot::Pool),
            test: collect(Slot::Test),
            validation: collect(Slot::Validation),
            slots,
            labeled: Vec::new(),
            known: vec![None; n],
        })
    }

    pub fn node_count(&self) -> usize {
        self.slots.len()
    }

    pub fn pool(&self) -> &[usize] {
        &self.pool
    }

    pub fn test(&self) -> &[usize] {
        &self.test
    }

    pub fn validation(&self) -> &[usize] {
        &self.validation
    }

    /// `(node, iteration)` pairs in query order.
    pub fn history(&self) -> &[(usize, usize)] {
        &self.labeled
    }

    pub fn labeled_count(&self) -> usize {
        self.labeled.len()
    }

    pub fn labeled_nodes(&self) -> Vec<usize> {
        self.labeled.iter().map(|&(i, _)| i).collect()
    }

    /// Oracle answers indexed by node; `None` outside the labeled set.
    pub fn known_labels(&self) -> &[Option<usize>] {
        &self.known
    }

    /// `(node, class)` pairs in query order.
    pub fn training_pairs(&self) -> Vec<(usize, usize)> {
        self.labeled
            .iter()
            .map(|&(i, _)| (i, self.known[i].expect("labeled nodes have an answer")))
            .collect()
    }

    /// Asks the oracle for `node` and moves it from the pool to the
    /// labeled set. Only pool nodes may be queried.
    pub fn query(&mut self, node: usize, iteration: usize, oracle: &mut dyn Oracle) -> Result<usize> {
        let slot = *self
            .slots
            .get(node)
            .ok_or(Error::NodeOutOfRange { index: node, n: self.slots.len() })?;
        if slot != Slot::Pool {
            return Err(invalid("query", format!("node {node} is not in the pool ({slot:?})")));
        }
        let class = oracle.label(node)?;
        let pos = self.pool.binary_search(&node).expect("pool slot and pool list agree");
        self.pool.remove(pos);
        self.slots[node] = Slot::Labeled;
        self.known[node] = Some(class);
        self.labeled.push((node, iteration));
        Ok(class)
    }

    /// Checks that labeled, pool, test and validation partition the nodes
    /// and agree with the per-node bookkeeping.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.slots.len();
        let total = self.labeled.len() + self.pool.len() + self.test.len() + self.validation.len();
        if total != n {
            return Err(invalid("state", format!("sets cover {total} of {n} nodes")));
        }
        let broken = |what: &str| Err(invalid("state", format!("{what} out of sync")));
        if self.labeled.iter().any(|&(i, _)| self.slots[i] != Slot::Labeled || self.known[i].is_none()) {
            return broken("labeled set");
        }
        if self.pool.iter().any(|&i| self.slots[i] != Slot::Pool) || !self.pool.windows(2).all(|w| w[0] < w[1]) {
            return broken("pool");
        }
        if self.test.iter().any(|&i| self.slots[i] != Slot::Test) {
            return broken("test set");
        }
        if self.validation.iter().any(|&i| self.slots[i] != Slot::Validation) {
            return broken("validation set");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn query_moves_pool_to_labeled() {
        let truth = [0, 1, 1, 0, 2];
        let mut oracle = GroundTruthOracle::new(&truth);
        let mut s = ALState::new(5, &[4], &[3]).unwrap();
        assert_eq!(s.pool(), &[0, 1, 2]);
        assert_eq!(s.query(2, 0, &mut oracle).unwrap(), 1);
        assert_eq!(s.pool(), &[0, 1]);
        assert_eq!(s.training_pairs(), vec![(2, 1)]);
        s.check_invariants().unwrap();
        assert_eq!(oracle.calls(), 1);
    }

    #[test]
    fn reserved_and_repeated_queries_never_reach_the_oracle() {
        let truth = [0, 1, 1, 0, 2];
        let mut oracle = GroundTruthOracle::new(&truth);
        let mut s = ALState::new(5, &[4], &[3]).unwrap();
        assert!(s.query(4, 0, &mut oracle).is_err());
        assert!(s.query(3, 0, &mut oracle).is_err());
        s.query(0, 0, &mut oracle).unwrap();
        assert!(s.query(0, 1, &mut oracle).is_err());
        assert_eq!(oracle.calls(), 1);
    }

    #[test]
    fn overlapping_reserved_sets_are_rejected() {
        assert!(ALState::new(4, &[1, 2], &[2]).is_err());
        assert!(ALState::new(4, &[7], &[]).is_err());
    }
}
