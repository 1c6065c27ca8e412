//! Maximum bipartite matching (Hopcroft-Karp) and bottleneck matching of
//! grid point sets under Manhattan distance.

use std::collections::{HashMap, VecDeque};

use crate::grid::Pos;

const NIL: u32 = u32::MAX;

/// Maximum matching; `adj[u]` lists right vertices of left vertex `u`.
/// Returns the right partner of every left vertex.
pub(crate) fn hopcroft_karp(adj: &[Vec<u32>], n_right: usize) -> Vec<Option<usize>> {
    let n = adj.len();
    let mut ml = vec![NIL; n];
    let mut mr = vec![NIL; n_right];
    let mut dist = vec![0u32; n];
    loop {
        // Layered BFS from free left vertices.
        let mut q = VecDeque::new();
        let mut found = false;
        for u in 0..n {
            if ml[u] == NIL {
                dist[u] = 0;
                q.push_back(u);
            } else {
                dist[u] = u32::MAX;
            }
        }
        while let Some(u) = q.pop_front() {
            for &v in &adj[u] {
                let w = mr[v as usize];
                if w == NIL {
                    found = true;
                } else if dist[w as usize] == u32::MAX {
                    dist[w as usize] = dist[u] + 1;
                    q.push_back(w as usize);
                }
            }
        }
        if !found {
            break;
        }
        // Iterative DFS along the layers.
        let mut it = vec![0usize; n];
        for s in 0..n {
            if ml[s] != NIL {
                continue;
            }
            let mut stack = vec![s];
            while let Some(&u) = stack.last() {
                if it[u] == adj[u].len() {
                    dist[u] = u32::MAX;
                    stack.pop();
                    continue;
                }
                let v = adj[u][it[u]];
                it[u] += 1;
                let w = mr[v as usize];
                if w == NIL {
                    // Augment along the stack.
                    let mut v = v;
                    while let Some(u) = stack.pop() {
                        let prev = ml[u];
                        ml[u] = v;
                        mr[v as usize] = u as u32;
                        v = prev;
                    }
                    break;
                }
                if dist[w as usize] == dist[u] + 1 {
                    stack.push(w as usize);
                }
            }
        }
    }
    ml.into_iter().map(|v| (v != NIL).then_some(v as usize)).collect()
}

/// Right vertices within Manhattan distance `limit` of each left point.
fn threshold_graph(a: &[Pos], b: &[Pos], index: &HashMap<Pos, Vec<u32>>, limit: u32) -> Vec<Vec<u32>> {
    let lim = limit as i32;
    a.iter()
        .map(|&p| {
            if (2 * lim as usize + 1).pow(2) / 2 > b.len() {
                return (0..b.len() as u32).filter(|&j| p.manhattan(b[j as usize]) <= limit).collect();
            }
            let mut v = Vec::new();
            for dy in -lim..=lim {
                let r = lim - dy.abs();
                for dx in -r..=r {
                    if let Some(js) = index.get(&Pos::new(p.x + dx, p.y + dy)) {
                        v.extend_from_slice(js);
                    }
                }
            }
            v
        })
        .collect()
}

/// Perfect matching of `a` onto `b` minimizing the largest distance.
/// Returns the bottleneck value and `b`-index for each point of `a`.
pub(crate) fn bottleneck(a: &[Pos], b: &[Pos]) -> (u32, Vec<usize>) {
    assert_eq!(a.len(), b.len());
    if a.is_empty() {
        return (0, Vec::new());
    }
    let mut index: HashMap<Pos, Vec<u32>> = HashMap::new();
    for (j, &q) in b.iter().enumerate() {
        index.entry(q).or_default().push(j as u32);
    }
    let full = |limit: u32| -> Option<Vec<usize>> {
        let adj = threshold_graph(a, b, &index, limit);
        let m = hopcroft_karp(&adj, b.len());
        m.into_iter().collect()
    };
    // Largest single-point lower bound: every point needs some partner.
    let lo_bound = a
        .iter()
        .map(|p| b.iter().map(|q| p.manhattan(*q)).min().unwrap())
        .max()
        .unwrap();
    let mut hi = lo_bound.max(1);
    let mut best = loop {
        if let Some(m) = full(hi) {
            break (hi, m);
        }
        hi *= 2;
    };
    let mut lo = lo_bound;
    // Invariant: best.0 feasible, every value below lo infeasible.
    while lo < best.0 {
        let mid = lo + (best.0 - lo) / 2;
        match full(mid) {
            Some(m) => best = (mid, m),
            None => lo = mid + 1,
        }
    }
    let value = a.iter().zip(&best.1).map(|(p, &j)| p.manhattan(b[j])).max().unwrap();
    (value, best.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bottleneck() {
        let a = [Pos::new(0, 0), Pos::new(10, 0)];
        let b = [Pos::new(1, 0), Pos::new(9, 0)];
        assert_eq!(bottleneck(&a, &b), (1, vec![0, 1]));
        assert_eq!(bottleneck(&a, &a).0, 0);
    }

    #[test]
    fn hk_complete_bipartite() {
        let adj = vec![vec![0, 1, 2]; 3];
        let m = hopcroft_karp(&adj, 3);
        let mut got: Vec<usize> = m.into_iter().map(Option::unwrap).collect();
        got.sort();
        assert_eq!(got, vec![0, 1, 2]);
    }
}
