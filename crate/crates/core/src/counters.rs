use std::ops::AddAssign;

/// Per-query work counters. They stand in for running time: every index
/// charges node visits, sub-structure probes and touched candidates here.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Counters {
    pub nodes_visited: u64,
    pub structures_probed: u64,
    pub candidates_examined: u64,
    pub reported_k: u64,
    /// Outputs before de-duplication across overlapping sub-queries.
    pub raw_multiplicity: u64,
}

impl AddAssign for Counters {
    fn add_assign(&mut self, rhs: Self) {
        self.nodes_visited += rhs.nodes_visited;
        self.structures_probed += rhs.structures_probed;
        self.candidates_examined += rhs.candidates_examined;
        self.reported_k += rhs.reported_k;
        self.raw_multiplicity += rhs.raw_multiplicity;
    }
}
