use std::collections::{HashMap, VecDeque};

use super::{MapGraph, MapNode, NodeId};

/// A destination picked by [`MapGraph::choose_destination`].
#[derive(Debug, Clone, PartialEq)]
pub struct Destination {
    pub node: NodeId,
    pub path: Vec<String>,
    pub objective: f64,
}

impl MapNode {
    pub fn curiosity(&self, c_mv: f64) -> f64 {
        self.command_score + c_mv * self.untested_moves.len() as f64
    }
}

impl MapGraph {
    /// Breadth-first search along recorded edges. Returns, for every
    /// reachable node, its distance and the move path to it. Moves are
    /// expanded in map order, so ties resolve the same way every time.
    fn bfs(&self, from: NodeId) -> HashMap<NodeId, Vec<String>> {
        let from = self.resolve(from);
        let mut paths = HashMap::new();
        if !self.nodes.contains_key(&from) {
            return paths;
        }
        paths.insert(from, Vec::new());
        let mut queue = VecDeque::from([from]);
        while let Some(n) = queue.pop_front() {
            let node = &self.nodes[&n];
            for mv in &self.moves {
                let Some(&t) = node.outgoing.get(mv) else { continue };
                if paths.contains_key(&t) {
                    continue;
                }
                let mut p = paths[&n].clone();
                p.push(mv.clone());
                paths.insert(t, p);
                queue.push_back(t);
            }
        }
        paths
    }

    pub fn shortest_path(&self, from: NodeId, to: NodeId) -> Option<Vec<String>> {
        self.bfs(from).remove(&self.resolve(to))
    }

    pub fn distance(&self, from: NodeId, to: NodeId) -> Option<usize> {
        self.shortest_path(from, to).map(|p| p.len())
    }

    /// The node minimizing `distance + tested_commands / curiosity` among
    /// nodes reachable from the current one with positive curiosity. Ties
    /// go to the nearer node, then the lower id.
    pub fn choose_destination(&self, c_mv: f64) -> Option<Destination> {
        self.choose_destination_excluding(c_mv, None)
    }

    pub fn choose_destination_excluding(&self, c_mv: f64, exclude: Option<NodeId>) -> Option<Destination> {
        let exclude = exclude.map(|e| self.resolve(e));
        let mut best: Option<Destination> = None;
        let mut reachable: Vec<(NodeId, Vec<String>)> = self.bfs(self.current).into_iter().collect();
        reachable.sort_by_key(|(id, _)| *id);
        for (id, path) in reachable {
            if Some(id) == exclude {
                continue;
            }
            let node = &self.nodes[&id];
            let curiosity = node.curiosity(c_mv);
            if !(curiosity > 0.0) {
                continue;
            }
            let objective = path.len() as f64 + node.tested_commands as f64 / curiosity;
            let better = match &best {
                None => true,
                Some(b) => objective < b.objective || (objective == b.objective && path.len() < b.path.len()),
            };
            if better {
                best = Some(Destination { node: id, path, objective });
            }
        }
        best
    }
}
