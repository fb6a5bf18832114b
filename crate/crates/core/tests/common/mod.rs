#![allow(dead_code)]

use std::collections::BTreeSet;

use biasgraph::propagation::{bellman_residual, fp_components, propagate_values, Direction, Solution};
use biasgraph::{
    build_graph, normalize_domain, EdgeRecord, Label, LabeledDataset, MediaGraph, PropagationConfig, SourceId,
    Strategy, Task,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn id(s: &str) -> SourceId {
    normalize_domain(s).unwrap()
}

/// a.com -> b.com -> c.com with unit weights; rewards {0, +1, -1}.
pub fn g1() -> (MediaGraph, Vec<f64>) {
    let g = build_graph(&[EdgeRecord::count("a.com", "b.com", 1), EdgeRecord::count("b.com", "c.com", 1)]).unwrap();
    (g, vec![0.0, 1.0, -1.0])
}

/// Random graph on up to `max_nodes` nodes with random hyperlink counts.
/// Some nodes end up dangling.
pub fn random_graph(rng: &mut ChaCha8Rng, max_nodes: usize) -> MediaGraph {
    loop {
        let n = rng.gen_range(2..=max_nodes);
        let mut records = Vec::new();
        for s in 0..n {
            let degree = rng.gen_range(0..=4usize);
            for _ in 0..degree {
                let d = rng.gen_range(0..n);
                records.push(EdgeRecord::count(format!("n{s}.test"), format!("n{d}.test"), rng.gen_range(1..10)));
            }
        }
        if let Ok(g) = build_graph(&records) {
            return g;
        }
    }
}

pub fn random_rewards(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| f64::from(rng.gen_range(-1i8..=1))).collect()
}

/// Propagate and check the Bellman residual of every converged F/P
/// solve (both FP components included).
pub fn certified(g: &MediaGraph, rewards: &[f64], strategy: Strategy, cfg: &PropagationConfig) -> Solution {
    let sol = propagate_values(g, rewards, strategy, cfg).unwrap();
    let check = |values: &[f64], r: &[f64], dir| {
        let res = bellman_residual(g, r, cfg.gamma, values, dir);
        assert!(res < cfg.tolerance, "{strategy} residual {res:e} >= {:e}", cfg.tolerance);
    };
    match strategy {
        Strategy::F if sol.converged => check(&sol.values, rewards, Direction::Forward),
        Strategy::P if sol.converged => check(&sol.values, rewards, Direction::Reverse),
        Strategy::FP => {
            let (f, p) = fp_components(g, rewards, cfg).unwrap();
            let neg: Vec<f64> = rewards.iter().map(|r| r.min(0.0)).collect();
            let pos: Vec<f64> = rewards.iter().map(|r| r.max(0.0)).collect();
            if f.converged {
                check(&f.values, &neg, Direction::Forward);
            }
            if p.converged {
                check(&p.values, &pos, Direction::Reverse);
            }
        }
        _ => {}
    }
    sol
}

pub fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Two blocks (+ and -). Labeled nodes of a block link to each other in a
/// cycle and to the block's unlabeled nodes; each unlabeled node links back
/// to labeled nodes of its own block. Unlabeled nodes therefore receive
/// in-links only from same-sign labeled nodes.
pub struct Planted {
    pub graph: MediaGraph,
    pub rewards: Vec<f64>,
    /// `(node index, expected sign)` of unlabeled nodes.
    pub unlabeled: Vec<(usize, f64)>,
}

pub fn planted_two_block(seed: u64, labeled: usize, unlabeled: usize) -> Planted {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    for block in ["pos", "neg"] {
        let lab = |i: usize| format!("{block}-lab{i}.test");
        let unl = |i: usize| format!("{block}-unl{i}.test");
        for i in 0..labeled {
            records.push(EdgeRecord::count(lab(i), lab((i + 1) % labeled), rng.gen_range(1..5)));
            for _ in 0..2 {
                records.push(EdgeRecord::count(lab(i), unl(rng.gen_range(0..unlabeled)), rng.gen_range(1..5)));
            }
        }
        for u in 0..unlabeled {
            records.push(EdgeRecord::count(lab(u % labeled), unl(u), 1));
            records.push(EdgeRecord::count(unl(u), lab(rng.gen_range(0..labeled)), rng.gen_range(1..5)));
        }
    }
    let graph = build_graph(&records).unwrap();
    let sign = |name: &str| if name.starts_with("pos") { 1.0 } else { -1.0 };
    let rewards = graph
        .nodes()
        .iter()
        .map(|n| if n.as_str().contains("-lab") { sign(n.as_str()) } else { 0.0 })
        .collect();
    let unlabeled = graph
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, n)| n.as_str().contains("-unl"))
        .map(|(i, n)| (i, sign(n.as_str())))
        .collect();
    Planted {
        graph,
        rewards,
        unlabeled,
    }
}

/// Synthetic labeled population over a homophilous random graph: sources
/// mostly link to others with the same label.
pub fn homophilous_world(seed: u64, task: Task, counts: [usize; 3], out_degree: usize) -> (MediaGraph, LabeledDataset) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members: Vec<(String, u8)> = Vec::new();
    for (code, &n) in counts.iter().enumerate() {
        for i in 0..n {
            members.push((format!("src{code}-{i}.example"), code as u8));
        }
    }
    let mut records = Vec::new();
    for (name, code) in &members {
        for _ in 0..out_degree {
            let same = rng.gen_bool(0.85);
            let candidates: Vec<&(String, u8)> = members
                .iter()
                .filter(|(n, c)| n != name && ((*c == *code) == same))
                .collect();
            if candidates.is_empty() {
                continue;
            }
            let (target, _) = candidates[rng.gen_range(0..candidates.len())];
            records.push(EdgeRecord::count(name.clone(), target.clone(), rng.gen_range(1..20)));
        }
    }
    let g = build_graph(&records).unwrap();
    let ds = LabeledDataset::from_labels(
        task,
        members.iter().map(|(n, c)| (id(n), Label::from_ordinal(task, *c).unwrap())),
    )
    .unwrap();
    (g, ds)
}

/// Undirected hop distance from any source in `from` (usize::MAX if unreachable).
pub fn undirected_distance(g: &MediaGraph, from: &BTreeSet<usize>) -> Vec<usize> {
    let mut dist = vec![usize::MAX; g.len()];
    let mut queue: std::collections::VecDeque<usize> = from.iter().copied().collect();
    for &s in from {
        dist[s] = 0;
    }
    while let Some(u) = queue.pop_front() {
        for &(v, _) in g.out_edges(u).iter().chain(g.in_edges(u)) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}
