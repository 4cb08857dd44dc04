use crate::error::{Error, Result};

/// Explicit limits for exhaustive searches. A search that would exceed either
/// limit refuses with [`Error::Budget`] instead of truncating.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Largest group (or candidate set) the search may enumerate.
    pub order: u64,
    /// Largest number of backtracking nodes the search may visit.
    pub nodes: u64,
}

impl Budget {
    pub const DEFAULT_NODES: u64 = 5_000_000;

    pub fn new(order: u64) -> Self {
        Budget {
            order,
            nodes: Self::DEFAULT_NODES,
        }
    }

    pub fn with_nodes(mut self, nodes: u64) -> Self {
        self.nodes = nodes;
        self
    }

    pub(crate) fn check_order(&self, what: &str, needed: u64) -> Result<()> {
        if needed > self.order {
            return Err(Error::Budget {
                what: what.to_string(),
                needed,
                budget: self.order,
            });
        }
        Ok(())
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(4096)
    }
}

/// Node counter shared by a backtracking search.
pub(crate) struct NodeCounter {
    what: &'static str,
    limit: u64,
    count: u64,
}

impl NodeCounter {
    pub(crate) fn new(what: &'static str, budget: &Budget) -> Self {
        NodeCounter {
            what,
            limit: budget.nodes,
            count: 0,
        }
    }

    pub(crate) fn tick(&mut self) -> Result<()> {
        self.count += 1;
        if self.count > self.limit {
            return Err(Error::Budget {
                what: format!("{} (search nodes)", self.what),
                needed: self.count,
                budget: self.limit,
            });
        }
        Ok(())
    }
}
