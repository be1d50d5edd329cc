//! Multi-threaded stepping. Branches are expanded in parallel and the
//! contributions concatenated in canonical branch order before the merge,
//! so the result is bit-identical to `evolution::step_with`.

use qgol_core::evolution::{expand_branch, merge_contributions, Parity, SimClock, StepOptions};
use qgol_core::rule::ScatteringRule;
use qgol_core::state::Superposition;
use rayon::prelude::*;

/// Below this many branches the step runs on the calling thread.
const PARALLEL_MIN_BRANCHES: usize = 64;

pub struct Driver {
    pub rule: ScatteringRule,
    pub options: StepOptions,
    pool: rayon::ThreadPool,
}

/// Worker cap from `QGOL_THREADS`; unset, empty or zero means rayon's default.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("QGOL_THREADS").ok()?.trim().parse().ok().filter(|n: &usize| *n > 0)
}

impl Driver {
    pub fn new(rule: ScatteringRule, prune: f64) -> Self {
        Self::with_threads(rule, prune, threads_from_env())
    }

    pub fn with_threads(rule: ScatteringRule, prune: f64, threads: Option<usize>) -> Self {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            b = b.num_threads(n);
        }
        let pool = b.build().expect("thread pool");
        Driver { rule, options: StepOptions { prune, ..StepOptions::default() }, pool }
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    pub fn step(&self, s: &Superposition, parity: Parity) -> Superposition {
        let branches: Vec<_> = s.iter().collect();
        let expand = |(conf, amp): &(&_, &_)| {
            let mut out = Vec::new();
            expand_branch(conf, **amp, parity, &self.rule, &mut out);
            out
        };
        let parts: Vec<Vec<_>> = if branches.len() < PARALLEL_MIN_BRANCHES || self.threads() == 1 {
            branches.iter().map(expand).collect()
        } else {
            self.pool.install(|| branches.par_iter().map(expand).collect())
        };
        merge_contributions(parts.into_iter().flatten(), &self.options)
    }

    pub fn run(&self, s: &Superposition, n: u64, clock: &mut SimClock) -> Superposition {
        let mut cur = s.clone();
        for _ in 0..n {
            cur = self.step(&cur, clock.parity());
            clock.t += 1;
        }
        cur
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::snapshot::write_snapshot;
    use qgol_core::evolution::step_with;
    use qgol_core::gadgets::{hadamard_gadget, Placement};
    use qgol_core::state::{make_superposition, Configuration};
    use qgol_core::Complex64;

    #[test]
    fn parallel_matches_serial_bit_for_bit() {
        // Eight Hadamard gadgets in superposition blow up to 256 branches.
        let confs: Vec<Configuration> = (0..8)
            .map(|k| hadamard_gadget(&Placement::translation([0, 40 * k, 0]).unwrap()).prepare(0))
            .collect();
        let all = confs.iter().fold(Configuration::empty(), |a, c| a.union(c));
        let s0 = make_superposition([(all, Complex64::new(1.0, 0.0))]).unwrap();
        let rule = ScatteringRule::standard();
        let serial = Driver::with_threads(rule.clone(), 1e-12, Some(1));
        let parallel = Driver::with_threads(rule.clone(), 1e-12, Some(4));
        let (mut c1, mut c2) = (SimClock::default(), SimClock::default());
        let a = serial.run(&s0, 20, &mut c1);
        let b = parallel.run(&s0, 20, &mut c2);
        assert_eq!(a.len(), 256);
        assert_eq!(write_snapshot(&a), write_snapshot(&b));
        let mut c = SimClock::default();
        let mut reference = s0.clone();
        for _ in 0..20 {
            reference = step_with(&reference, c.parity(), &rule, &serial.options);
            c.t += 1;
        }
        assert_eq!(write_snapshot(&reference), write_snapshot(&b));
    }
}
