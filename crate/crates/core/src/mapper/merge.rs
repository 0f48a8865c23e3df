use std::collections::{BTreeMap, HashMap, VecDeque};

use super::{MapGraph, NodeId};

impl MapGraph {
    /// Recursively merges `a` and `b` in place. Call this on a scratch
    /// copy: on `false` the graph is left half-merged and must be dropped.
    pub fn merge_nodes(&mut self, a: NodeId, b: NodeId) -> bool {
        let a = self.resolve(a);
        let b = self.resolve(b);
        if a == b {
            return true;
        }
        let (Some(na), Some(nb)) = (self.nodes.get(&a), self.nodes.get(&b)) else {
            return false;
        };
        if na.label != nb.label {
            return false;
        }
        let pending: Vec<(NodeId, NodeId)> = na
            .outgoing
            .iter()
            .filter_map(|(mv, &x)| nb.outgoing.get(mv).map(|&y| (x, y)))
            .collect();
        self.join(a, b);
        pending.into_iter().all(|(x, y)| self.merge_nodes(x, y))
    }

    /// Folds `b` into `a`: incoming edges of `b` are redirected, outgoing
    /// edges of `b` are kept where `a` has none for that move.
    fn join(&mut self, a: NodeId, b: NodeId) {
        let nb = self.nodes.remove(&b).expect("node to join exists");
        for node in self.nodes.values_mut() {
            for target in node.outgoing.values_mut() {
                if *target == b {
                    *target = a;
                }
            }
        }
        let na = self.nodes.get_mut(&a).expect("node to join exists");
        for (mv, target) in nb.outgoing {
            let target = if target == b { a } else { target };
            na.outgoing.entry(mv).or_insert(target);
        }
        na.untested_moves = na.untested_moves.intersection(&nb.untested_moves).cloned().collect();
        let explored: Vec<String> = na.outgoing.keys().cloned().collect();
        for mv in explored {
            na.untested_moves.remove(&mv);
        }
        na.tested_commands = na.tested_commands.max(nb.tested_commands);
        na.command_score = na.command_score.max(nb.command_score);
        self.merged_into.insert(b, a);
        if self.current == b {
            self.current = a;
        }
        if self.start == b {
            self.start = a;
        }
    }

    /// Same-label pairs, older discoveries first, nearer pairs before
    /// farther ones.
    fn candidate_pairs(&self) -> Vec<(NodeId, NodeId)> {
        let mut by_label: BTreeMap<&str, Vec<NodeId>> = BTreeMap::new();
        for node in self.nodes.values() {
            by_label.entry(node.label.as_str()).or_default().push(node.id);
        }
        let mut pairs = Vec::new();
        for ids in by_label.values() {
            for (i, &a) in ids.iter().enumerate() {
                for &b in &ids[i + 1..] {
                    pairs.push((a.min(b), a.max(b)));
                }
            }
        }
        if pairs.is_empty() {
            return pairs;
        }
        let mut dist_cache: HashMap<NodeId, HashMap<NodeId, usize>> = HashMap::new();
        let mut keyed: Vec<(NodeId, usize, NodeId)> = pairs
            .into_iter()
            .map(|(a, b)| {
                let d = dist_cache
                    .entry(a)
                    .or_insert_with(|| self.undirected_distances(a))
                    .get(&b)
                    .copied()
                    .unwrap_or(usize::MAX);
                (a, d, b)
            })
            .collect();
        keyed.sort_unstable();
        keyed.into_iter().map(|(a, _, b)| (a, b)).collect()
    }

    fn undirected_distances(&self, from: NodeId) -> HashMap<NodeId, usize> {
        let mut adjacency: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for node in self.nodes.values() {
            for &t in node.outgoing.values() {
                adjacency.entry(node.id).or_default().push(t);
                adjacency.entry(t).or_default().push(node.id);
            }
        }
        let mut dist = HashMap::from([(from, 0usize)]);
        let mut queue = VecDeque::from([from]);
        while let Some(n) = queue.pop_front() {
            let d = dist[&n];
            for &m in adjacency.get(&n).map(Vec::as_slice).unwrap_or(&[]) {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(m) {
                    e.insert(d + 1);
                    queue.push_back(m);
                }
            }
        }
        dist
    }

    /// Tries every same-label pair on a scratch copy, committing successful
    /// merges, until no pair merges.
    pub fn minimize(&self) -> MapGraph {
        let mut g = self.clone();
        'outer: loop {
            for (a, b) in g.candidate_pairs() {
                let mut scratch = g.clone();
                if scratch.merge_nodes(a, b) {
                    g = scratch;
                    continue 'outer;
                }
            }
            return g;
        }
    }

    /// In-place form of [`MapGraph::minimize`]. Returns the number of
    /// nodes removed.
    pub fn minimize_in_place(&mut self) -> usize {
        let before = self.len();
        *self = self.minimize();
        before - self.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(labels: &[&str], mv: &str) -> MapGraph {
        let mut g = MapGraph::new(labels[0]);
        for l in &labels[1..] {
            g.record_transition(mv, l);
        }
        g
    }

    #[test]
    fn self_merge_is_a_no_op() {
        let g = chain(&["A.", "B."], "north");
        let mut s = g.clone();
        assert!(s.merge_nodes(1, 1));
        assert_eq!(s, g);
    }

    #[test]
    fn different_labels_do_not_merge() {
        let mut g = chain(&["A.", "B."], "north");
        assert!(!g.merge_nodes(0, 1));
    }

    #[test]
    fn parallel_chains_collapse() {
        // Two A -north-> B chains hanging off a shared root.
        let mut g = MapGraph::new("R.");
        g.record_transition("east", "A.");
        g.record_transition("north", "B.");
        g.reset_to_start();
        g.record_transition("west", "A.");
        g.record_transition("north", "B.");
        assert_eq!(g.len(), 5);
        let mut s = g.clone();
        assert!(s.merge_nodes(1, 3));
        assert_eq!(s.len(), 3);
        assert_eq!(s.move_by(0, "east"), s.move_by(0, "west"));
    }

    #[test]
    fn revisit_becomes_a_cycle() {
        let g = {
            let mut g = MapGraph::new("A.");
            g.record_transition("north", "B.");
            g.record_transition("south", "A.");
            g
        };
        let m = g.minimize();
        assert_eq!(m.len(), 2);
        assert_eq!(m.move_by(0, "north"), Some(1));
        assert_eq!(m.move_by(1, "south"), Some(0));
        assert_eq!(m.current(), 0);
    }

    #[test]
    fn conflicting_successors_block_a_merge() {
        let mut g = MapGraph::new("A.");
        g.record_transition("north", "B.");
        g.reset_to_start();
        g.record_transition("east", "A.");
        g.record_transition("north", "C.");
        let m = g.minimize();
        assert_eq!(m.len(), g.len());
    }

    #[test]
    fn distinct_labels_are_unchanged() {
        let g = chain(&["A.", "B.", "C."], "up");
        assert_eq!(g.minimize(), g);
    }

    #[test]
    fn merge_is_symmetric_on_outcome() {
        let mut g = MapGraph::new("A.");
        g.record_transition("north", "B.");
        g.reset_to_start();
        g.record_transition("east", "A.");
        g.record_transition("north", "C.");
        assert_eq!(g.clone().merge_nodes(0, 2), g.clone().merge_nodes(2, 0));
    }
}
