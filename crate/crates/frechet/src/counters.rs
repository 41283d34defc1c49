/// Work counters threaded through the decision pipelines. Cell counts are the
/// primary cost proxy: every dynamic-programming cell relaxation increments
/// `wavefront_cells`, every coverage-index merge step `cover_steps`.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct WorkCounters {
    pub wavefront_cells: u64,
    pub cover_queries: u64,
    pub cover_steps: u64,
    pub surrogate_tests: u64,
    pub samples_drawn: u64,
    pub fallbacks_triggered: u64,
}

impl WorkCounters {
    pub fn add(&mut self, other: &WorkCounters) {
        self.wavefront_cells += other.wavefront_cells;
        self.cover_queries += other.cover_queries;
        self.cover_steps += other.cover_steps;
        self.surrogate_tests += other.surrogate_tests;
        self.samples_drawn += other.samples_drawn;
        self.fallbacks_triggered += other.fallbacks_triggered;
    }

    /// Combined propagation work: the quantity benchmarks fit slopes on.
    pub fn propagation_work(&self) -> u64 {
        self.wavefront_cells + self.cover_steps
    }
}
