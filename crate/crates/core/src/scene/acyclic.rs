use std::collections::VecDeque;

use super::types::{Axis, RelationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingCheck {
    NoRing,
    Ring,
}

/// Directed edge `from -> to` on `axis` meaning "from is left of / above to",
/// or `None` when the relation lies on the other axis.
pub fn axis_edge(
    subject: usize,
    object: usize,
    kind: RelationKind,
    axis: Axis,
) -> Option<(usize, usize)> {
    if kind.axis() != axis {
        return None;
    }
    match kind {
        RelationKind::Left | RelationKind::Above => Some((subject, object)),
        RelationKind::Right | RelationKind::Below => Some((object, subject)),
    }
}

/// Kahn-style topological sort over the relations of one axis.
///
/// `relations` holds `(subject, object, kind)` with indices in `0..n`.
/// Relations of the other axis are ignored. Returns `NoRing` iff every
/// instance is eventually emitted with zero in-degree.
pub fn check_acyclic(n: usize, relations: &[(usize, usize, RelationKind)], axis: Axis) -> RingCheck {
    let mut in_degree = vec![0usize; n];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(s, o, kind) in relations {
        if let Some((from, to)) = axis_edge(s, o, kind, axis) {
            in_degree[to] += 1;
            out[from].push(to);
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| in_degree[i] == 0).collect();
    let mut emitted = queue.len();
    while let Some(q) = queue.pop_front() {
        for &to in &out[q] {
            in_degree[to] -= 1;
            if in_degree[to] == 0 {
                queue.push_back(to);
                emitted += 1;
            }
        }
    }
    if emitted == n {
        RingCheck::NoRing
    } else {
        RingCheck::Ring
    }
}

/// Indices into `relations` of edges lying on some cycle of `axis`.
pub fn cyclic_relations(
    n: usize,
    relations: &[(usize, usize, RelationKind)],
    axis: Axis,
) -> Vec<usize> {
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let edges: Vec<Option<(usize, usize)>> = relations
        .iter()
        .map(|&(s, o, k)| axis_edge(s, o, k, axis))
        .collect();
    for &(from, to) in edges.iter().flatten() {
        adj[from].push(to);
    }
    let reaches = |start: usize, goal: usize| {
        let mut seen = vec![false; n];
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            if v == goal {
                return true;
            }
            if std::mem::replace(&mut seen[v], true) {
                continue;
            }
            stack.extend(adj[v].iter().copied());
        }
        false
    };
    edges
        .iter()
        .enumerate()
        .filter_map(|(i, e)| e.and_then(|(from, to)| reaches(to, from).then_some(i)))
        .collect()
}
