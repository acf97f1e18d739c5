//! Shortest isogeny paths between vertices.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::richelot::{all_splittings, richelot_image, richelot_step, FactorList, StepOutcome};

use super::state::state_key;
use super::{apply_kernel, GraphError, GraphSnapshot, KernelDescriptor, Model, Vertex};

/// `Edge` leaves the representative model of the current vertex. `Digit`
/// continues from the model produced by the previous step, through the hash
/// step table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStep {
    Edge(KernelDescriptor),
    Digit(u8),
}

/// Breadth-first shortest path. With `good_only` every step after the first
/// is a good extension of the one before and all intermediate vertices are
/// jacobians; this needs both endpoints to be jacobians.
pub fn find_path(
    g: &GraphSnapshot,
    from: &Vertex,
    to: &Vertex,
    good_only: bool,
) -> Result<Option<Vec<PathStep>>, GraphError> {
    let src = g.index_of(from).ok_or(GraphError::UnknownVertex)?;
    let dst = g.index_of(to).ok_or(GraphError::UnknownVertex)?;
    if src == dst {
        return Ok(Some(Vec::new()));
    }
    if good_only {
        if !from.is_jacobian() || !to.is_jacobian() {
            return Ok(None);
        }
        return good_path(g, src, to);
    }
    let mut parent: Vec<Option<(usize, KernelDescriptor)>> = vec![None; g.vertices().len()];
    let mut seen = vec![false; g.vertices().len()];
    seen[src] = true;
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        for e in g.out_edges(v) {
            if seen[e.to] {
                continue;
            }
            seen[e.to] = true;
            parent[e.to] = Some((v, e.kernel));
            if e.to == dst {
                let mut path = Vec::new();
                let mut cur = dst;
                while let Some((prev, k)) = parent[cur] {
                    path.push(PathStep::Edge(k));
                    cur = prev;
                }
                path.reverse();
                return Ok(Some(path));
            }
            queue.push_back(e.to);
        }
    }
    Ok(None)
}

fn good_path(g: &GraphSnapshot, src: usize, to: &Vertex) -> Result<Option<Vec<PathStep>>, GraphError> {
    let Model::Jacobian(rep) = &g.models()[src] else {
        return Ok(None);
    };
    let reaches = |l: &FactorList<u64>| -> Result<bool, GraphError> { Ok(Model::Jacobian(l.clone()).vertex()? == *to) };
    // state index -> (parent state, step taken)
    let mut nodes: Vec<(FactorList<u64>, Option<usize>, PathStep)> = Vec::new();
    let mut seen = HashMap::new();
    let unwind = |nodes: &[(FactorList<u64>, Option<usize>, PathStep)], mut i: usize| {
        let mut path = vec![nodes[i].2];
        while let Some(p) = nodes[i].1 {
            path.push(nodes[p].2);
            i = p;
        }
        path.reverse();
        path
    };
    let mut queue = VecDeque::new();
    for (k, s) in all_splittings(rep).iter().enumerate() {
        if let StepOutcome::Jacobian(l) = richelot_image(s, false)?.0 {
            let key = state_key(&l);
            if seen.contains_key(&key) {
                continue;
            }
            let hit = reaches(&l)?;
            seen.insert(key, nodes.len());
            nodes.push((l, None, PathStep::Edge(KernelDescriptor::Splitting(k as u8))));
            if hit {
                return Ok(Some(unwind(&nodes, nodes.len() - 1)));
            }
            queue.push_back(nodes.len() - 1);
        }
    }
    while let Some(i) = queue.pop_front() {
        for d in 0..8u8 {
            let StepOutcome::Jacobian(l) = richelot_step(&nodes[i].0, d)? else {
                continue;
            };
            let key = state_key(&l);
            if seen.contains_key(&key) {
                continue;
            }
            let hit = reaches(&l)?;
            seen.insert(key, nodes.len());
            nodes.push((l, Some(i), PathStep::Digit(d)));
            if hit {
                return Ok(Some(unwind(&nodes, nodes.len() - 1)));
            }
            queue.push_back(nodes.len() - 1);
        }
    }
    Ok(None)
}

/// Follows a path from `from` and returns the vertex it ends at.
pub fn replay_path(g: &GraphSnapshot, from: &Vertex, path: &[PathStep]) -> Result<Vertex, GraphError> {
    Ok(replay_trace(g, from, path)?.pop().expect("nonempty"))
}

/// Every vertex visited by `path`, starting with `from`.
pub fn replay_trace(g: &GraphSnapshot, from: &Vertex, path: &[PathStep]) -> Result<Vec<Vertex>, GraphError> {
    let i = g.index_of(from).ok_or(GraphError::UnknownVertex)?;
    let mut seen = vec![from.clone()];
    let mut vertex = from.clone();
    let mut model = g.models()[i].clone();
    for step in path {
        let (v, m) = match *step {
            PathStep::Edge(k) => {
                let i = g.index_of(&vertex).ok_or(GraphError::UnknownVertex)?;
                apply_kernel(&g.models()[i], k)?
            }
            PathStep::Digit(d) => {
                let Model::Jacobian(l) = &model else {
                    return Err(GraphError::BadPath("digit step on a product".into()));
                };
                match richelot_step(l, d)? {
                    StepOutcome::Jacobian(next) => {
                        let m = Model::Jacobian(next);
                        (m.vertex()?, m)
                    }
                    StepOutcome::Split => return Err(GraphError::BadPath(format!("digit {d} splits"))),
                }
            }
        };
        seen.push(v.clone());
        vertex = v;
        model = m;
    }
    Ok(seen)
}
