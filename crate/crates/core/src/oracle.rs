//! Plain sequential DFS and BFS that scan adjacency arrays forwards and test a
//! visited mark per arc. They only look at the input [`Graph`], never at the
//! elimination structure, and serve as ground truth in tests.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::traversal::TraversalResult;

fn check_start(g: &Graph, s: usize) -> Result<()> {
    if s < g.num_vertices() {
        Ok(())
    } else {
        Err(Error::InvalidStart(s))
    }
}

/// Textbook ordered DFS from `s`, numbering from `a`.
pub fn seq_dfs(g: &Graph, s: usize, a: usize) -> Result<TraversalResult> {
    check_start(g, s)?;
    let n = g.num_vertices();
    let mut traversal = vec![None; n];
    let mut parent = vec![None; n];
    let mut number = a;

    traversal[s] = Some(number);
    number += 1;
    // (vertex, index of the next arc to scan)
    let mut stack = vec![(s, 0usize)];
    while let Some(top) = stack.last_mut() {
        let (u, i) = *top;
        match g.out(u).get(i) {
            Some(&v) => {
                top.1 += 1;
                if traversal[v].is_none() {
                    traversal[v] = Some(number);
                    number += 1;
                    parent[v] = Some(u);
                    stack.push((v, 0));
                }
            }
            None => {
                stack.pop();
            }
        }
    }

    Ok(TraversalResult {
        traversal,
        parent,
        distance: vec![None; n],
        visited_count: number - a,
        next_number: number,
    })
}

/// Textbook FIFO BFS from `s`, numbering from `a` in discovery order.
pub fn seq_bfs(g: &Graph, s: usize, a: usize) -> Result<TraversalResult> {
    check_start(g, s)?;
    let n = g.num_vertices();
    let mut traversal = vec![None; n];
    let mut parent = vec![None; n];
    let mut distance = vec![None; n];
    let mut number = a;

    traversal[s] = Some(number);
    distance[s] = Some(0);
    number += 1;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        let du = distance[u].unwrap();
        for &v in g.out(u) {
            if traversal[v].is_none() {
                traversal[v] = Some(number);
                number += 1;
                distance[v] = Some(du + 1);
                parent[v] = Some(u);
                queue.push_back(v);
            }
        }
    }

    Ok(TraversalResult {
        traversal,
        parent,
        distance,
        visited_count: number - a,
        next_number: number,
    })
}
