//! Maximum bipartite matching (Hopcroft–Karp).

use std::collections::VecDeque;

const FREE: usize = usize::MAX;

/// Size of a maximum matching between `left` and `right` vertices, where
/// `adj[u]` lists the right neighbours of left vertex `u`.
pub fn max_matching(adj: &[Vec<usize>], right: usize) -> usize {
    let left = adj.len();
    let mut match_l = vec![FREE; left];
    let mut match_r = vec![FREE; right];
    let mut dist = vec![0usize; left];
    let mut size = 0;
    loop {
        // Layer free left vertices.
        let mut queue = VecDeque::new();
        for u in 0..left {
            if match_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return size;
        }
        let mut next = vec![0usize; left];
        for u in 0..left {
            if match_l[u] == FREE
                && augment(u, adj, &mut match_l, &mut match_r, &mut dist, &mut next)
            {
                size += 1;
            }
        }
    }
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    next: &mut [usize],
) -> bool {
    while next[u] < adj[u].len() {
        let v = adj[u][next[u]];
        next[u] += 1;
        let w = match_r[v];
        if w == FREE || (dist[w] == dist[u] + 1 && augment(w, adj, match_l, match_r, dist, next)) {
            match_l[u] = v;
            match_r[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}
