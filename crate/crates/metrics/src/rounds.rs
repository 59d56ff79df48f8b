//! Round accounting over an issue trace.
//!
//! A *round relative to a block b* is a minimal fragment of the run,
//! after b's issue, in which every correct agent issues at least one
//! block. Finality latency in rounds is one plus the number of such
//! complete fragments that fit strictly between b's issue and b's first
//! finality: a block that turns final before one full fragment has passed
//! has latency 1 ("final within a round"), slipping past one fragment
//! makes it 2, and so on. Fragments are closed greedily (a fragment ends
//! the moment the last missing correct agent issues), which yields the
//! earliest boundaries and therefore the largest—most conservative—
//! latency figure.

use std::collections::BTreeSet;

use blocklace_core::AgentId;

/// The issue history of a run: every block issue in trace order.
#[derive(Clone, Debug, Default)]
pub struct IssueLog {
    issues: Vec<(u64, AgentId)>,
    correct: BTreeSet<AgentId>,
}

impl IssueLog {
    pub fn new(correct: BTreeSet<AgentId>) -> IssueLog {
        IssueLog {
            issues: Vec::new(),
            correct,
        }
    }

    /// Record an issue; returns its index for later latency queries.
    pub fn push(&mut self, t: u64, agent: AgentId) -> usize {
        self.issues.push((t, agent));
        self.issues.len() - 1
    }

    pub fn len(&self) -> usize {
        self.issues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }

    /// Complete rounds in the whole trace (fragments from the start).
    pub fn total_rounds(&self) -> u32 {
        self.rounds_in(0, u64::MAX)
    }

    /// Latency in rounds for the block issued at index `issue_idx` whose
    /// first finality happened at `final_t`.
    pub fn latency(&self, issue_idx: usize, final_t: u64) -> u32 {
        self.rounds_in(issue_idx + 1, final_t) + 1
    }

    /// Greedy count of complete correct-agent fragments among issues at
    /// position ≥ `from` with time strictly below `before_t`.
    fn rounds_in(&self, from: usize, before_t: u64) -> u32 {
        if self.correct.is_empty() {
            return 0;
        }
        let mut rounds = 0;
        let mut seen: BTreeSet<AgentId> = BTreeSet::new();
        for &(t, agent) in self.issues.iter().skip(from) {
            if t >= before_t {
                break;
            }
            if self.correct.contains(&agent) {
                seen.insert(agent);
                if seen.len() == self.correct.len() {
                    rounds += 1;
                    seen.clear();
                }
            }
        }
        rounds
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn agents(ids: &[u32]) -> BTreeSet<AgentId> {
        ids.iter().map(|&i| AgentId(i)).collect()
    }

    fn log(correct: &[u32], issues: &[(u64, u32)]) -> IssueLog {
        let mut l = IssueLog::new(agents(correct));
        for &(t, a) in issues {
            l.push(t, AgentId(a));
        }
        l
    }

    #[test]
    fn lockstep_latency_counts_waves_after_the_issue() {
        // Two waves of four agents, one issue per tick-decade.
        let issues: Vec<(u64, u32)> = (0..8u64).map(|i| (10 * (i + 1), (i % 4) as u32)).collect();
        let l = log(&[0, 1, 2, 3], &issues);
        assert_eq!(l.total_rounds(), 2);
        // Block 0 (t=10): the wave after it closes at t=50 (agents 1,2,3,0).
        // Final before that close → one round; after it → two.
        assert_eq!(l.latency(0, 45), 1);
        assert_eq!(l.latency(0, 55), 2);
        // The last block of a wave gets the same treatment.
        assert_eq!(l.latency(3, 75), 1);
        assert_eq!(l.latency(3, 85), 2);
    }

    #[test]
    fn rounds_are_defined_over_correct_agents_only() {
        let issues = [(1, 0), (2, 1), (3, 2), (4, 0), (5, 2), (6, 1)];
        assert_eq!(log(&[0, 1, 2], &issues).total_rounds(), 2);
        // Against four agents the silent fourth blocks every close.
        assert_eq!(log(&[0, 1, 2, 3], &issues).total_rounds(), 0);
    }

    /// Definitional oracle: repeatedly strip the shortest prefix that
    /// contains every correct agent, counting strips — computed by a
    /// from-scratch coverage re-scan per strip.
    fn strip_oracle(correct: &BTreeSet<AgentId>, issues: &[(u64, AgentId)]) -> u32 {
        let mut rest = issues;
        let mut rounds = 0;
        'outer: loop {
            for cut in 1..=rest.len() {
                let covered: BTreeSet<AgentId> = rest[..cut]
                    .iter()
                    .map(|&(_, a)| a)
                    .filter(|a| correct.contains(a))
                    .collect();
                if covered.len() == correct.len() {
                    rounds += 1;
                    rest = &rest[cut..];
                    continue 'outer;
                }
            }
            return rounds;
        }
    }

    #[test]
    fn greedy_count_matches_the_strip_oracle_on_random_traces() {
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            state >> 33
        };
        for case in 0..300 {
            let n = 2 + (next() % 5) as u32;
            let correct = agents(&(0..n).collect::<Vec<_>>());
            let len = (next() % 60) as usize;
            let issues: Vec<(u64, AgentId)> = (0..len)
                .map(|i| (i as u64, AgentId((next() % (n as u64 + 1)) as u32)))
                .collect();
            let mut l = IssueLog::new(correct.clone());
            for &(t, a) in &issues {
                l.push(t, a);
            }
            assert_eq!(l.total_rounds(), strip_oracle(&correct, &issues), "case {case}");
            // Sanity: rounds can never exceed any single agent's issues.
            let cap = (0..n)
                .map(|q| issues.iter().filter(|(_, a)| a.0 == q).count() as u32)
                .min()
                .unwrap();
            assert!(l.total_rounds() <= cap, "case {case}");
        }
    }
}
