//! The location map.
//!
//! Nodes are labelled with the first sentence of the area description and
//! edges with the move command that led from one area to the next. Fresh
//! nodes are created for every transition; [`MapGraph::minimize`] later folds
//! together same-label nodes whose futures agree.

mod explore;
pub use explore::Destination;
mod merge;

use std::collections::{BTreeMap, BTreeSet, HashMap};

/// The movement commands the agent knows about.
pub const MOVE_WORDS: [&str; 16] = [
    "south", "north", "east", "west", "northeast", "northwest", "southeast", "southwest", "up", "down", "left",
    "right", "enter", "exit", "in", "out",
];

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct MapNode {
    pub id: NodeId,
    pub label: String,
    /// Move command to destination. At most one target per move.
    pub outgoing: BTreeMap<String, NodeId>,
    /// Commands already tried in this area.
    pub tested_commands: u32,
    pub untested_moves: BTreeSet<String>,
    /// Sum of the scores of the commands available here, as of the last visit.
    pub command_score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapGraph {
    nodes: BTreeMap<NodeId, MapNode>,
    current: NodeId,
    start: NodeId,
    next_id: NodeId,
    moves: Vec<String>,
    /// Where merged-away nodes went.
    merged_into: HashMap<NodeId, NodeId>,
}

/// The first sentence of `description`: everything up to and including the
/// first `.`, `!` or `?` that is followed by whitespace or the end of text.
pub fn label_of(description: &str) -> String {
    let text = description.trim();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            match chars.peek() {
                None => return text.to_string(),
                Some((_, next)) if next.is_whitespace() => return text[..i + c.len_utf8()].to_string(),
                _ => {}
            }
        }
    }
    text.to_string()
}

impl MapGraph {
    /// A one-node map rooted at the area described by `description`.
    pub fn new(description: &str) -> Self {
        Self::with_moves(description, MOVE_WORDS.iter().map(|m| m.to_string()).collect())
    }

    pub fn with_moves(description: &str, moves: Vec<String>) -> Self {
        let mut g = MapGraph {
            nodes: BTreeMap::new(),
            current: 0,
            start: 0,
            next_id: 0,
            moves,
            merged_into: HashMap::new(),
        };
        let root = g.add_node(label_of(description));
        g.current = root;
        g.start = root;
        g
    }

    fn add_node(&mut self, label: String) -> NodeId {
        let id = self.next_id;
        self.next_id += 1;
        let label = if label.is_empty() { "(empty)".to_string() } else { label };
        self.nodes.insert(
            id,
            MapNode {
                id,
                label,
                outgoing: BTreeMap::new(),
                tested_commands: 0,
                untested_moves: self.moves.iter().cloned().collect(),
                command_score: 0.0,
            },
        );
        id
    }

    /// A map with nodes `0..labels.len()` and the given `(from, move, to)`
    /// edges, rooted and positioned at node 0. Moves used by the edges are
    /// added to the default move words. Later edges for the same move
    /// replace earlier ones.
    pub fn from_edges<'a>(
        labels: &[&str],
        edges: impl IntoIterator<Item = (NodeId, &'a str, NodeId)>,
    ) -> crate::Result<Self> {
        let (first, rest) = labels
            .split_first()
            .ok_or_else(|| crate::Error::Usage("a map needs at least one node".into()))?;
        let edges: Vec<(NodeId, &str, NodeId)> = edges.into_iter().collect();
        let mut moves: Vec<String> = MOVE_WORDS.iter().map(|m| m.to_string()).collect();
        for (_, mv, _) in &edges {
            if !moves.iter().any(|m| m == mv) {
                moves.push(mv.to_string());
            }
        }
        let mut g = MapGraph::with_moves(first, moves);
        g.nodes.get_mut(&0).expect("root exists").label = first.to_string();
        for label in rest {
            g.add_node(label.to_string());
        }
        for (from, mv, to) in edges {
            if from >= labels.len() || to >= labels.len() {
                return Err(crate::Error::Usage(format!("edge {from} -{mv}-> {to} leaves the map")));
            }
            let node = g.nodes.get_mut(&from).expect("node exists");
            node.outgoing.insert(mv.to_string(), to);
            node.untested_moves.remove(mv);
        }
        Ok(g)
    }

    pub fn moves(&self) -> &[String] {
        &self.moves
    }

    pub fn is_move(&self, word: &str) -> bool {
        self.moves.iter().any(|m| m == word)
    }

    pub fn current(&self) -> NodeId {
        self.current
    }

    pub fn start(&self) -> NodeId {
        self.start
    }

    pub fn current_node(&self) -> &MapNode {
        &self.nodes[&self.current]
    }

    pub fn node(&self, id: NodeId) -> Option<&MapNode> {
        self.nodes.get(&self.resolve(id))
    }

    pub fn nodes(&self) -> impl Iterator<Item = &MapNode> {
        self.nodes.values()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.nodes.values().map(|n| n.outgoing.len()).sum()
    }

    /// Follows merge redirections to the node that now stands for `id`.
    pub fn resolve(&self, mut id: NodeId) -> NodeId {
        while let Some(&next) = self.merged_into.get(&id) {
            id = next;
        }
        id
    }

    /// Target of `mv` from `id`, if recorded.
    pub fn move_by(&self, id: NodeId, mv: &str) -> Option<NodeId> {
        self.node(id).and_then(|n| n.outgoing.get(mv).copied())
    }

    /// Puts the agent back at the root, e.g. after a restart.
    pub fn reset_to_start(&mut self) {
        self.current = self.start;
    }

    /// Records a successful `mv` from the current node into the area
    /// described by `new_description`, and makes the target current.
    ///
    /// A fresh node is created unless the current node already has an edge
    /// for `mv` leading to a node with the same label, in which case that
    /// edge is followed.
    pub fn record_transition(&mut self, mv: &str, new_description: &str) -> NodeId {
        let label = label_of(new_description);
        let from = self.current;
        if let Some(node) = self.nodes.get_mut(&from) {
            node.untested_moves.remove(mv);
        }
        if let Some(existing) = self.move_by(from, mv) {
            if self.nodes[&existing].label == label {
                self.current = existing;
                return existing;
            }
        }
        let to = self.add_node(label);
        self.nodes
            .get_mut(&from)
            .expect("current node exists")
            .outgoing
            .insert(mv.to_string(), to);
        self.current = to;
        to
    }

    /// A move that led nowhere counts as tested.
    pub fn mark_move_tested(&mut self, mv: &str) {
        if let Some(node) = self.nodes.get_mut(&self.current) {
            node.untested_moves.remove(mv);
        }
    }

    /// A move that used to work but now fails: the recorded edge is dropped.
    pub fn mark_move_failed(&mut self, mv: &str) {
        if let Some(node) = self.nodes.get_mut(&self.current) {
            node.untested_moves.remove(mv);
            node.outgoing.remove(mv);
        }
    }

    /// Makes every move without a recorded edge at the current node
    /// untested again, e.g. after something in the area changed.
    pub fn reopen_moves(&mut self) {
        let moves = self.moves.clone();
        if let Some(node) = self.nodes.get_mut(&self.current) {
            for mv in moves {
                if !node.outgoing.contains_key(&mv) {
                    node.untested_moves.insert(mv);
                }
            }
        }
    }

    /// [`MapGraph::reopen_moves`] for every node.
    pub fn reopen_all_moves(&mut self) {
        for node in self.nodes.values_mut() {
            for mv in &self.moves {
                if !node.outgoing.contains_key(mv) {
                    node.untested_moves.insert(mv.clone());
                }
            }
        }
    }

    /// Nothing more to explore here, e.g. the area kills on entry.
    pub fn mark_exhausted(&mut self) {
        if let Some(node) = self.nodes.get_mut(&self.current) {
            node.untested_moves.clear();
            node.command_score = 0.0;
        }
    }

    /// Whether some node other than `except` carries `label`.
    pub fn has_label(&self, label: &str, except: NodeId) -> bool {
        self.nodes.values().any(|n| n.id != except && n.label == label)
    }

    pub fn note_command_tried(&mut self) {
        if let Some(node) = self.nodes.get_mut(&self.current) {
            node.tested_commands += 1;
        }
    }

    pub fn set_command_score(&mut self, score: f64) {
        if let Some(node) = self.nodes.get_mut(&self.current) {
            node.command_score = score;
        }
    }

    /// Edge list, `node-id<TAB>label<TAB>move<TAB>target-id` per edge. Nodes
    /// without outgoing edges get one line with the last two fields empty.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for node in self.nodes.values() {
            if node.outgoing.is_empty() {
                out.push_str(&format!("{}\t{}\t\t\n", node.id, node.label));
            }
            for (mv, target) in &node.outgoing {
                out.push_str(&format!("{}\t{}\t{}\t{}\n", node.id, node.label, mv, target));
            }
        }
        out
    }
}
