//! Independent reference implementations shared by the test targets.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use ifagent::mapper::{MapGraph, NodeId};
use rand::{Rng, RngExt};

pub const LABELS: [&str; 3] = ["A.", "B.", "C."];
pub const MOVES: [&str; 4] = ["north", "south", "east", "west"];

/// A deterministic labelled graph: `succ[node][move]`.
#[derive(Debug, Clone)]
pub struct RawGraph {
    pub labels: Vec<&'static str>,
    pub succ: Vec<Vec<Option<NodeId>>>,
}

impl RawGraph {
    pub fn random<R: Rng>(rng: &mut R) -> Self {
        let n = rng.random_range(1..=8);
        let k = rng.random_range(1..=4);
        let alphabet = rng.random_range(1..=3);
        let density: f64 = rng.random_range(0.3..0.9);
        let labels = (0..n).map(|_| LABELS[rng.random_range(0..alphabet)]).collect();
        let succ = (0..n)
            .map(|_| {
                (0..k)
                    .map(|_| rng.random_bool(density).then(|| rng.random_range(0..n)))
                    .collect()
            })
            .collect();
        RawGraph { labels, succ }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn edges(&self) -> Vec<(NodeId, &'static str, NodeId)> {
        let mut out = Vec::new();
        for (from, row) in self.succ.iter().enumerate() {
            for (m, t) in row.iter().enumerate() {
                if let Some(t) = t {
                    out.push((from, MOVES[m], *t));
                }
            }
        }
        out
    }

    pub fn to_map(&self) -> MapGraph {
        MapGraph::from_edges(&self.labels, self.edges()).unwrap()
    }

    /// Random move sequences that stay on recorded edges, starting at node 0.
    pub fn walks<R: Rng>(&self, rng: &mut R, count: usize, max_len: usize) -> Vec<Vec<&'static str>> {
        (0..count)
            .map(|_| {
                let mut at = 0;
                let mut walk = Vec::new();
                for _ in 0..rng.random_range(0..=max_len) {
                    let options: Vec<(usize, NodeId)> = self.succ[at]
                        .iter()
                        .enumerate()
                        .filter_map(|(m, t)| t.map(|t| (m, t)))
                        .collect();
                    if options.is_empty() {
                        break;
                    }
                    let (m, t) = options[rng.random_range(0..options.len())];
                    walk.push(MOVES[m]);
                    at = t;
                }
                walk
            })
            .collect()
    }

    pub fn label_sequence(&self, walk: &[&str]) -> Vec<&'static str> {
        let mut at = 0;
        let mut out = vec![self.labels[0]];
        for mv in walk {
            let m = MOVES.iter().position(|x| x == mv).unwrap();
            at = self.succ[at][m].unwrap();
            out.push(self.labels[at]);
        }
        out
    }
}

/// Partition of nodes, each node mapped to the smallest member of its class.
pub type Partition = Vec<NodeId>;

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn canonical(parent: &mut [usize]) -> Partition {
    let n = parent.len();
    let roots: Vec<usize> = (0..n).map(|i| find(parent, i)).collect();
    (0..n).map(|i| (0..n).find(|&j| roots[j] == roots[i]).unwrap()).collect()
}

/// Smallest equivalence containing `start` and `(a, b)` in which members of
/// a class move into a common class under every move they share, found by
/// naive fixpoint iteration. `None` if that equivalence mixes labels.
pub fn congruence(g: &RawGraph, start: &Partition, a: NodeId, b: NodeId) -> Option<Partition> {
    let n = g.len();
    let mut parent: Vec<usize> = start.clone();
    let union = |parent: &mut Vec<usize>, x: usize, y: usize| {
        let (rx, ry) = (find(parent, x), find(parent, y));
        if rx != ry {
            parent[rx.max(ry)] = rx.min(ry);
            true
        } else {
            false
        }
    };
    union(&mut parent, a, b);
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if find(&mut parent, i) != find(&mut parent, j) {
                    continue;
                }
                for m in 0..g.succ[i].len() {
                    if let (Some(x), Some(y)) = (g.succ[i][m], g.succ[j][m]) {
                        changed |= union(&mut parent, x, y);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let p = canonical(&mut parent);
    (0..n).all(|i| g.labels[i] == g.labels[p[i]]).then_some(p)
}

pub fn identity(n: usize) -> Partition {
    (0..n).collect()
}

/// Every partition in which no further merge succeeds, over all orders in
/// which successful merges can be applied.
pub fn terminal_partitions(g: &RawGraph) -> HashSet<Partition> {
    let mut seen = HashSet::new();
    let mut terminal = HashSet::new();
    let mut stack = vec![identity(g.len())];
    while let Some(p) = stack.pop() {
        if !seen.insert(p.clone()) {
            continue;
        }
        let reps: BTreeSet<NodeId> = p.iter().copied().collect();
        let mut any = false;
        for &a in &reps {
            for &b in reps.range(a + 1..) {
                if g.labels[a] != g.labels[b] {
                    continue;
                }
                if let Some(next) = congruence(g, &p, a, b) {
                    any = true;
                    stack.push(next);
                }
            }
        }
        if !any {
            terminal.insert(p);
        }
    }
    terminal
}

/// The partition a merged map induces on the original node ids.
pub fn partition_of(map: &MapGraph, n: usize) -> Partition {
    let reps: Vec<NodeId> = (0..n).map(|i| map.resolve(i)).collect();
    (0..n).map(|i| (0..n).find(|&j| reps[j] == reps[i]).unwrap()).collect()
}

/// Checks that `map` is exactly the quotient of `g` by `p`.
pub fn check_quotient(g: &RawGraph, map: &MapGraph, p: &Partition) -> Result<(), String> {
    let classes: BTreeSet<NodeId> = p.iter().copied().collect();
    if map.len() != classes.len() {
        return Err(format!("{} nodes, expected {}", map.len(), classes.len()));
    }
    for i in 0..g.len() {
        let node = map.node(i).ok_or(format!("node {i} vanished"))?;
        if node.label != g.labels[i] {
            return Err(format!("node {i} relabelled {}", node.label));
        }
        for (m, t) in g.succ[i].iter().enumerate() {
            if let Some(t) = t {
                let got = map.move_by(i, MOVES[m]).ok_or(format!("edge {i} {} lost", MOVES[m]))?;
                if map.resolve(got) != map.resolve(*t) {
                    return Err(format!("edge {i} {} leads to {got}, expected class of {t}", MOVES[m]));
                }
            }
        }
    }
    for node in map.nodes() {
        for mv in node.outgoing.keys() {
            let m = MOVES.iter().position(|x| x == mv).unwrap();
            let backed = (0..g.len()).any(|i| map.resolve(i) == node.id && g.succ[i][m].is_some());
            if !backed {
                return Err(format!("edge {} {mv} has no original", node.id));
            }
        }
    }
    Ok(())
}

pub fn replay_labels(map: &MapGraph, walk: &[&str]) -> Option<Vec<String>> {
    let mut at = map.start();
    let mut out = vec![map.node(at)?.label.clone()];
    for mv in walk {
        at = map.move_by(at, mv)?;
        out.push(map.node(at)?.label.clone());
    }
    Some(out)
}

/// Runs every oracle comparison on one graph. Returns the first mismatch.
pub fn check_graph<R: Rng>(g: &RawGraph, rng: &mut R) -> Result<(), String> {
    let map = g.to_map();
    let n = g.len();
    for a in 0..n {
        for b in 0..n {
            if a == b || g.labels[a] != g.labels[b] {
                continue;
            }
            let expected = congruence(g, &identity(n), a, b);
            let mut scratch = map.clone();
            let ok = scratch.merge_nodes(a, b);
            match (&expected, ok) {
                (None, false) => {}
                (Some(p), true) => {
                    if partition_of(&scratch, n) != *p {
                        return Err(format!("merge({a},{b}) gave a different partition"));
                    }
                    check_quotient(g, &scratch, p).map_err(|e| format!("merge({a},{b}): {e}"))?;
                }
                _ => return Err(format!("merge({a},{b}) returned {ok}, oracle {}", expected.is_some())),
            }
        }
    }

    let min = map.minimize();
    let p = partition_of(&min, n);
    if !(0..n).all(|i| g.labels[i] == g.labels[p[i]]) {
        return Err("minimize mixed labels".into());
    }
    if !terminal_partitions(g).contains(&p) {
        return Err(format!("minimize stopped at {p:?}, not a reachable fixpoint"));
    }
    check_quotient(g, &min, &p).map_err(|e| format!("minimize: {e}"))?;
    for walk in g.walks(rng, 20, 12) {
        let expected: Vec<String> = g.label_sequence(&walk).into_iter().map(String::from).collect();
        if replay_labels(&min, &walk).as_ref() != Some(&expected) {
            return Err(format!("walk {walk:?} replays differently"));
        }
    }
    Ok(())
}
