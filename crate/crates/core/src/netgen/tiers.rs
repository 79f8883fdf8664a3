//! Provider-hierarchy tiers.

use std::collections::BTreeMap;

use crate::model::Tier;

use super::graph::{AsGraph, AsId};

/// Tier 1: no provider. Tier 2: only tier-1 providers. Tier 3: only tier-1
/// or tier-2 providers. Everything else is `Other`.
pub fn tier_classify(graph: &AsGraph) -> BTreeMap<AsId, Tier> {
    let providers = graph.providers();
    let mut tiers: BTreeMap<AsId, Tier> = providers.keys().map(|&id| (id, Tier::Other)).collect();
    let levels = [Tier::T1, Tier::T2, Tier::T3];
    for (depth, &tier) in levels.iter().enumerate() {
        let allowed = &levels[..depth];
        let assign: Vec<AsId> = providers
            .iter()
            .filter(|(id, _)| tiers[*id] == Tier::Other)
            .filter(|(_, ps)| {
                if depth == 0 {
                    ps.is_empty()
                } else {
                    !ps.is_empty() && ps.iter().all(|p| allowed.contains(&tiers[p]))
                }
            })
            .map(|(&id, _)| id)
            .collect();
        for id in assign {
            tiers.insert(id, tier);
        }
    }
    tiers
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::graph::parse_as_graph;

    #[test]
    fn toy_hierarchy() {
        // 1 is the core, 2 buys from 1, 3 buys from 2, 4 buys from 2 and 3,
        // 5 buys from 4.
        let g = parse_as_graph("1 2 p2c\n2 3 p2c\n2 4 p2c\n3 4 p2c\n4 5 p2c").unwrap();
        let t = tier_classify(&g);
        assert_eq!(t[&1], Tier::T1);
        assert_eq!(t[&2], Tier::T2);
        assert_eq!(t[&3], Tier::T3);
        assert_eq!(t[&4], Tier::Other);
        assert_eq!(t[&5], Tier::Other);
    }

    #[test]
    fn peers_do_not_count_as_providers() {
        let g = parse_as_graph("1 2 p2p\n1 3 p2c\n2 3 p2c").unwrap();
        let t = tier_classify(&g);
        assert_eq!((t[&1], t[&2], t[&3]), (Tier::T1, Tier::T1, Tier::T2));
    }
}
