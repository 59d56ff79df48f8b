//! Cross-checks the blocklace's incremental reachability indices against a
//! plain breadth-first search over the raw block pointers. The oracle knows
//! nothing about the container's bitsets — it re-derives everything from the
//! blocks alone — so agreement here pins the index maintenance.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use blocklace_core::lacegen::{generate, GenConfig};
use blocklace_core::{Block, BlockHash};

fn block_map(blocks: &[Block]) -> BTreeMap<BlockHash, Block> {
    blocks.iter().map(|b| (b.hash, b.clone())).collect()
}

/// Reflexive reachability by BFS, over all pointers or input pointers only.
fn bfs(
    blocks: &BTreeMap<BlockHash, Block>,
    from: &BlockHash,
    inputs_only: bool,
) -> BTreeSet<BlockHash> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(*from);
    queue.push_back(*from);
    while let Some(h) = queue.pop_front() {
        for p in &blocks[&h].pointers {
            if inputs_only && !p.input {
                continue;
            }
            if seen.insert(p.target) {
                queue.push_back(p.target);
            }
        }
    }
    seen
}

fn configs() -> Vec<GenConfig> {
    vec![
        GenConfig::honest(4, 1, 40),
        GenConfig::honest(6, 1, 50),
        GenConfig::adversarial(4, 1, 40),
        GenConfig::adversarial(7, 2, 60),
    ]
}

#[test]
fn observes_and_depends_match_brute_force_search() {
    for cfg in configs() {
        for seed in 0..6u64 {
            let generated = generate(seed, &cfg);
            let map = block_map(&generated.blocks);
            let lace = &generated.lace;
            for a in &generated.blocks {
                let reach = bfs(&map, &a.hash, false);
                let input_reach = bfs(&map, &a.hash, true);
                for b in &generated.blocks {
                    assert_eq!(
                        lace.observes(&a.hash, &b.hash).unwrap(),
                        reach.contains(&b.hash),
                        "observes mismatch seed={seed}"
                    );
                    assert_eq!(
                        lace.depends_on(&a.hash, &b.hash).unwrap(),
                        input_reach.contains(&b.hash),
                        "depends mismatch seed={seed}"
                    );
                }
                let closure: BTreeSet<BlockHash> =
                    lace.closure(&a.hash).unwrap().into_iter().collect();
                assert_eq!(closure, reach, "closure mismatch seed={seed}");
            }
        }
    }
}

#[test]
fn input_closure_matches_definition() {
    // Input closure: everything reached through input pointers, plus every
    // same-creator block the block observes.
    for cfg in configs() {
        for seed in 0..4u64 {
            let generated = generate(seed, &cfg);
            let map = block_map(&generated.blocks);
            let lace = &generated.lace;
            for a in &generated.blocks {
                let mut expect = bfs(&map, &a.hash, true);
                for h in bfs(&map, &a.hash, false) {
                    if map[&h].creator == a.creator {
                        expect.insert(h);
                    }
                }
                let got: BTreeSet<BlockHash> =
                    lace.input_closure(&a.hash).unwrap().into_iter().collect();
                assert_eq!(got, expect, "input closure mismatch seed={seed}");
            }
        }
    }
}

#[test]
fn roots_are_exactly_the_untargeted_blocks() {
    for cfg in configs() {
        for seed in 0..6u64 {
            let generated = generate(seed, &cfg);
            let mut targeted: BTreeSet<BlockHash> = BTreeSet::new();
            for b in &generated.blocks {
                for p in &b.pointers {
                    targeted.insert(p.target);
                }
            }
            let expect: BTreeSet<BlockHash> = generated
                .blocks
                .iter()
                .map(|b| b.hash)
                .filter(|h| !targeted.contains(h))
                .collect();
            let got: BTreeSet<BlockHash> = generated.lace.roots().into_iter().collect();
            assert_eq!(got, expect, "roots mismatch seed={seed}");
        }
    }
}

#[test]
fn heights_match_longest_path_recurrence() {
    for cfg in configs() {
        for seed in 0..6u64 {
            let generated = generate(seed, &cfg);
            // Blocks arrive in causal order, so one forward pass suffices.
            let mut heights: BTreeMap<BlockHash, u32> = BTreeMap::new();
            for b in &generated.blocks {
                let h = if b.pointers.is_empty() {
                    1
                } else {
                    1 + b.pointers.iter().map(|p| heights[&p.target]).max().unwrap()
                };
                heights.insert(b.hash, h);
                assert_eq!(
                    generated.lace.height(&b.hash).unwrap(),
                    h,
                    "height mismatch seed={seed}"
                );
            }
        }
    }
}

#[test]
fn tips_are_the_blocks_unobserved_by_own_later_blocks() {
    for cfg in configs() {
        for seed in 0..6u64 {
            let generated = generate(seed, &cfg);
            let map = block_map(&generated.blocks);
            let lace = &generated.lace;
            for agent in 0..cfg.n {
                let agent = blocklace_core::AgentId(agent);
                let own: Vec<&Block> = generated
                    .blocks
                    .iter()
                    .filter(|b| b.creator == agent)
                    .collect();
                let expect: BTreeSet<BlockHash> = own
                    .iter()
                    .filter(|b| {
                        own.iter().all(|other| {
                            other.hash == b.hash || !bfs(&map, &other.hash, false).contains(&b.hash)
                        })
                    })
                    .map(|b| b.hash)
                    .collect();
                let got: BTreeSet<BlockHash> = lace.tips(agent).into_iter().collect();
                assert_eq!(got, expect, "tips mismatch seed={seed} agent={agent}");
                // last_block is one of the tips (the latest accepted).
                if let Some(last) = lace.last_block(agent) {
                    assert!(got.contains(&last.hash));
                }
            }
        }
    }
}
