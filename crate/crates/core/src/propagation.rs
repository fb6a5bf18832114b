//! Reward propagation over the source graph.
//!
//! With a single "move to another source" action the transition matrix is
//! the weight matrix itself, `P(s, s') = w(s, s')`. Four strategies turn a
//! reward vector `r` into scores `rho`:
//!
//! ```text
//! F   rho(s) = sum_s' P(s, s') [r(s') + gamma rho(s')]      (rho_0 = 0)
//! P   rho(s) = r(s) + gamma sum_s' P(s', s) rho(s')          (rho_0 = r)
//! FP  rho    = F(min(r, 0)) + P(max(r, 0))
//! I   n rounds of
//!       credits(s) = sum_s' w(s', s) rho(s')
//!       rho(s)    += sum_s' w(s, s') credits(s')            (rho_0 = r)
//! ```
//!
//! F and P are solved by synchronous sweeps until the sup-norm change drops
//! below the tolerance. The iterate returned is the one whose residual was
//! measured, so `converged = true` certifies `|rho - T(rho)|_inf < tolerance`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::MediaGraph;
use crate::labels::RewardVector;
use crate::scores::{ScoreVector, SolveInfo};

/// Largest graph the dense oracle will factorize.
pub const ORACLE_MAX_NODES: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Strategy {
    F,
    P,
    FP,
    I,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Strategy::F, Strategy::P, Strategy::FP, Strategy::I];

    /// Whether the discount factor affects this strategy.
    pub fn uses_gamma(self) -> bool {
        self != Strategy::I
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::F => "F",
            Strategy::P => "P",
            Strategy::FP => "FP",
            Strategy::I => "I",
        })
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "F" => Ok(Strategy::F),
            "P" => Ok(Strategy::P),
            "FP" => Ok(Strategy::FP),
            "I" => Ok(Strategy::I),
            other => Err(Error::InvalidConfig(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropagationConfig {
    /// Discount factor in `[0, 1)`.
    pub gamma: f64,
    /// Invest/collect rounds for the I strategy.
    pub n: usize,
    /// Sup-norm fixed-point residual at which F/P iteration stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// P iteration aborts once `|rho|_inf` exceeds this.
    pub divergence_ceiling: f64,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            gamma: 0.15,
            n: 2,
            tolerance: 1e-8,
            max_iterations: 1000,
            divergence_ceiling: 1e12,
        }
    }
}

impl PropagationConfig {
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::InvalidConfig(format!("gamma {} outside [0, 1)", self.gamma)));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerance must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be positive".into()));
        }
        if !(self.divergence_ceiling > 0.0) {
            return Err(Error::InvalidConfig("divergence ceiling must be positive".into()));
        }
        Ok(())
    }
}

/// Dense result of one solver run, aligned with the graph's node order.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn forward_sweep(g: &MediaGraph, rewards: &[f64], gamma: f64, rho: &[f64], out: &mut [f64]) {
    for (s, slot) in out.iter_mut().enumerate() {
        *slot = g
            .out_edges(s)
            .iter()
            .map(|&(t, w)| w * (rewards[t] + gamma * rho[t]))
            .sum();
    }
}

fn reverse_sweep(g: &MediaGraph, rewards: &[f64], gamma: f64, rho: &[f64], out: &mut [f64]) {
    for (s, slot) in out.iter_mut().enumerate() {
        let inflow: f64 = g.in_edges(s).iter().map(|&(t, w)| w * rho[t]).sum();
        *slot = rewards[s] + gamma * inflow;
    }
}

fn fixed_point(
    init: Vec<f64>,
    cfg: &PropagationConfig,
    ceiling: Option<f64>,
    sweep: impl Fn(&[f64], &mut [f64]),
) -> Result<Solution> {
    let mut cur = init;
    let mut next = vec![0.0; cur.len()];
    let mut residual = f64::INFINITY;
    for it in 1..=cfg.max_iterations {
        sweep(&cur, &mut next);
        let norm = sup_norm(&next);
        if let Some(limit) = ceiling {
            if !(norm <= limit) {
                return Err(Error::Diverged { iterations: it, norm });
            }
        }
        if !norm.is_finite() {
            return Err(Error::NonFinite);
        }
        residual = sup_diff(&next, &cur);
        if residual < cfg.tolerance {
            return Ok(Solution {
                values: cur,
                iterations: it,
                converged: true,
                residual,
            });
        }
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(Solution {
        values: cur,
        iterations: cfg.max_iterations,
        converged: false,
        residual,
    })
}

fn check_len(g: &MediaGraph, rewards: &[f64]) -> Result<()> {
    if rewards.len() != g.len() {
        return Err(Error::InvalidConfig(format!(
            "{} rewards for {} nodes",
            rewards.len(),
            g.len()
        )));
    }
    if rewards.iter().any(|r| !r.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// F strategy on arbitrary real rewards.
pub fn f_values(g: &MediaGraph, rewards: &[f64], cfg: &PropagationConfig) -> Result<Solution> {
    cfg.validate()?;
    check_len(g, rewards)?;
    fixed_point(vec![0.0; g.len()], cfg, None, |rho, out| {
        forward_sweep(g, rewards, cfg.gamma, rho, out)
    })
}

/// P strategy on arbitrary real rewards.
pub fn p_values(g: &MediaGraph, rewards: &[f64], cfg: &PropagationConfig) -> Result<Solution> {
    cfg.validate()?;
    check_len(g, rewards)?;
    fixed_point(rewards.to_vec(), cfg, Some(cfg.divergence_ceiling), |rho, out| {
        reverse_sweep(g, rewards, cfg.gamma, rho, out)
    })
}

/// The two clamped components of FP: `(F on min(r, 0), P on max(r, 0))`.
pub fn fp_components(g: &MediaGraph, rewards: &[f64], cfg: &PropagationConfig) -> Result<(Solution, Solution)> {
    let negative: Vec<f64> = rewards.iter().map(|&r| r.min(0.0)).collect();
    let positive: Vec<f64> = rewards.iter().map(|&r| r.max(0.0)).collect();
    Ok((f_values(g, &negative, cfg)?, p_values(g, &positive, cfg)?))
}

pub fn fp_values(g: &MediaGraph, rewards: &[f64], cfg: &PropagationConfig) -> Result<Solution> {
    let (f, p) = fp_components(g, rewards, cfg)?;
    Ok(Solution {
        values: f.values.iter().zip(&p.values).map(|(a, b)| a + b).collect(),
        iterations: f.iterations.max(p.iterations),
        converged: f.converged && p.converged,
        residual: f.residual.max(p.residual),
    })
}

/// I strategy: `rounds` invest/collect rounds starting from `rho = r`.
pub fn i_values(g: &MediaGraph, rewards: &[f64], rounds: usize) -> Result<Vec<f64>> {
    check_len(g, rewards)?;
    let mut rho = rewards.to_vec();
    let mut credits = vec![0.0; g.len()];
    for _ in 0..rounds {
        for (s, c) in credits.iter_mut().enumerate() {
            *c = g.in_edges(s).iter().map(|&(t, w)| w * rho[t]).sum();
        }
        // Each rho(s) reads only its own old value and the credits.
        for (s, r) in rho.iter_mut().enumerate() {
            *r += g.out_edges(s).iter().map(|&(t, w)| w * credits[t]).sum::<f64>();
        }
        if !sup_norm(&rho).is_finite() {
            return Err(Error::NonFinite);
        }
    }
    Ok(rho)
}

/// Run `strategy` on dense rewards.
pub fn propagate_values(
    g: &MediaGraph,
    rewards: &[f64],
    strategy: Strategy,
    cfg: &PropagationConfig,
) -> Result<Solution> {
    match strategy {
        Strategy::F => f_values(g, rewards, cfg),
        Strategy::P => p_values(g, rewards, cfg),
        Strategy::FP => fp_values(g, rewards, cfg),
        Strategy::I => Ok(Solution {
            values: i_values(g, rewards, cfg.n)?,
            iterations: cfg.n,
            converged: true,
            residual: 0.0,
        }),
    }
}

/// Run `strategy` and attach node ids. A non-converged F/P/FP run is still
/// returned, with `converged = false` in its [`SolveInfo`].
pub fn propagate(
    g: &MediaGraph,
    r: &RewardVector,
    strategy: Strategy,
    cfg: &PropagationConfig,
) -> Result<ScoreVector> {
    let sol = propagate_values(g, &r.dense(g), strategy, cfg)?;
    let info = SolveInfo {
        gamma: cfg.gamma,
        n: cfg.n,
        tolerance: cfg.tolerance,
        iterations: sol.iterations,
        converged: sol.converged,
        residual: sol.residual,
    };
    ScoreVector::from_parts(g.nodes().to_vec(), sol.values, strategy, info)
}

pub fn f_propagate(g: &MediaGraph, r: &RewardVector, cfg: &PropagationConfig) -> Result<ScoreVector> {
    propagate(g, r, Strategy::F, cfg)
}

pub fn p_propagate(g: &MediaGraph, r: &RewardVector, cfg: &PropagationConfig) -> Result<ScoreVector> {
    propagate(g, r, Strategy::P, cfg)
}

pub fn fp_propagate(g: &MediaGraph, r: &RewardVector, cfg: &PropagationConfig) -> Result<ScoreVector> {
    propagate(g, r, Strategy::FP, cfg)
}

pub fn i_propagate(g: &MediaGraph, r: &RewardVector, cfg: &PropagationConfig) -> Result<ScoreVector> {
    propagate(g, r, Strategy::I, cfg)
}

/// Which Bellman form a residual or oracle solve refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `rho = P (r + gamma rho)`
    Forward,
    /// `rho = r + gamma P^T rho`
    Reverse,
}

/// Sup-norm residual `|rho - T(rho)|_inf` of the chosen Bellman operator.
pub fn bellman_residual(g: &MediaGraph, rewards: &[f64], gamma: f64, rho: &[f64], dir: Direction) -> f64 {
    let mut image = vec![0.0; g.len()];
    match dir {
        Direction::Forward => forward_sweep(g, rewards, gamma, rho, &mut image),
        Direction::Reverse => reverse_sweep(g, rewards, gamma, rho, &mut image),
    }
    sup_diff(&image, rho)
}

/// Exact fixed point by dense Gaussian elimination:
/// `(I - gamma P) rho = P r` (forward) or `(I - gamma P^T) rho = r` (reverse).
pub fn solve_linear_values(g: &MediaGraph, rewards: &[f64], gamma: f64, dir: Direction) -> Result<Vec<f64>> {
    let n = g.len();
    if n > ORACLE_MAX_NODES {
        return Err(Error::TooLarge {
            nodes: n,
            limit: ORACLE_MAX_NODES,
        });
    }
    check_len(g, rewards)?;

    let mut a = vec![vec![0.0; n + 1]; n];
    for (s, row) in a.iter_mut().enumerate() {
        row[s] = 1.0;
    }
    for s in 0..n {
        for &(t, w) in g.out_edges(s) {
            match dir {
                Direction::Forward => {
                    a[s][t] -= gamma * w;
                    a[s][n] += w * rewards[t];
                }
                Direction::Reverse => a[t][s] -= gamma * w,
            }
        }
        if dir == Direction::Reverse {
            a[s][n] = rewards[s];
        }
    }

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty range");
        if a[pivot][col].abs() < 1e-12 {
            return Err(Error::Singular);
        }
        a.swap(col, pivot);
        let (upper, lower) = a.split_at_mut(col + 1);
        let prow = &upper[col];
        for row in lower.iter_mut() {
            let factor = row[col] / prow[col];
            if factor != 0.0 {
                for k in col..=n {
                    row[k] -= factor * prow[k];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let tail: f64 = ((i + 1)..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (a[i][n] - tail) / a[i][i];
    }
    Ok(x)
}

/// Direct-solve counterpart of [`f_propagate`] / [`p_propagate`], for testing.
pub fn solve_linear_oracle(g: &MediaGraph, r: &RewardVector, gamma: f64, dir: Direction) -> Result<ScoreVector> {
    let values = solve_linear_values(g, &r.dense(g), gamma, dir)?;
    let strategy = match dir {
        Direction::Forward => Strategy::F,
        Direction::Reverse => Strategy::P,
    };
    let info = SolveInfo {
        gamma,
        n: 0,
        tolerance: 0.0,
        iterations: 0,
        converged: true,
        residual: 0.0,
    };
    ScoreVector::from_parts(g.nodes().to_vec(), values, strategy, info)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{g1, id};
    use crate::graph::{build_graph, EdgeRecord};

    const G1_REWARDS: [f64; 3] = [0.0, 1.0, -1.0];

    fn cfg(gamma: f64) -> PropagationConfig {
        PropagationConfig::default().with_gamma(gamma)
    }

    fn assert_close(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn forward_on_g1() {
        let g = g1();
        let sol = f_values(&g, &G1_REWARDS, &cfg(0.5)).unwrap();
        assert!(sol.converged);
        assert_close(&sol.values, &[0.5, -1.0, 0.0], 1e-9);
        assert_eq!(f_values(&g, &G1_REWARDS, &cfg(0.0)).unwrap().values, [1.0, -1.0, 0.0]);
        assert_eq!(f_values(&g, &[0.0; 3], &cfg(0.9)).unwrap().values, [0.0; 3]);
    }

    #[test]
    fn reverse_on_g1() {
        let g = g1();
        let sol = p_values(&g, &G1_REWARDS, &cfg(0.5)).unwrap();
        assert_close(&sol.values, &[0.0, 1.0, -0.5], 1e-9);
        assert_eq!(p_values(&g, &G1_REWARDS, &cfg(0.0)).unwrap().values, G1_REWARDS);
    }

    #[test]
    fn reverse_star_hub() {
        let g = build_graph(&[
            EdgeRecord::count("a.com", "hub.com", 1),
            EdgeRecord::count("b.com", "hub.com", 1),
            EdgeRecord::count("c.com", "hub.com", 1),
        ])
        .unwrap();
        let hub = g.index_of(&id("hub.com")).unwrap();
        let rewards: Vec<f64> = (0..4).map(|i| if i == hub { 0.0 } else { 1.0 }).collect();
        let sol = p_values(&g, &rewards, &cfg(0.15)).unwrap();
        assert!((sol.values[hub] - 0.45).abs() < 1e-12);
    }

    #[test]
    fn fp_on_g1() {
        let g = g1();
        let (f, p) = fp_components(&g, &G1_REWARDS, &cfg(0.5)).unwrap();
        assert_close(&f.values, &[-0.5, -1.0, 0.0], 1e-9);
        assert_close(&p.values, &[0.0, 1.0, 0.5], 1e-9);
        let sol = fp_values(&g, &G1_REWARDS, &cfg(0.5)).unwrap();
        assert_close(&sol.values, &[-0.5, 0.0, 0.5], 1e-9);

        let nonneg = [0.0, 1.0, 1.0];
        assert_eq!(
            fp_values(&g, &nonneg, &cfg(0.5)).unwrap().values,
            p_values(&g, &nonneg, &cfg(0.5)).unwrap().values
        );
    }

    #[test]
    fn invest_collect_on_g1() {
        let g = g1();
        assert_eq!(i_values(&g, &G1_REWARDS, 1).unwrap(), [0.0, 2.0, -1.0]);
        assert_eq!(i_values(&g, &G1_REWARDS, 0).unwrap(), G1_REWARDS);
    }

    #[test]
    fn isolated_component_keeps_reward() {
        let g = build_graph(&[
            EdgeRecord::count("a.com", "b.com", 1),
            EdgeRecord::count("x.com", "y.com", 1),
        ])
        .unwrap();
        let mut rewards = vec![0.0; 4];
        rewards[g.index_of(&id("a.com")).unwrap()] = 1.0;
        let rho = i_values(&g, &rewards, 5).unwrap();
        assert_eq!(rho[g.index_of(&id("x.com")).unwrap()], 0.0);
        assert_eq!(rho[g.index_of(&id("y.com")).unwrap()], 0.0);
    }

    #[test]
    fn oracle_on_g1() {
        let g = g1();
        assert_close(
            &solve_linear_values(&g, &G1_REWARDS, 0.5, Direction::Forward).unwrap(),
            &[0.5, -1.0, 0.0],
            1e-12,
        );
        assert_eq!(solve_linear_values(&g, &G1_REWARDS, 0.0, Direction::Reverse).unwrap(), G1_REWARDS);
    }

    #[test]
    fn residual_certificate_and_non_convergence() {
        let g = build_graph(&[
            EdgeRecord::count("a.com", "b.com", 1),
            EdgeRecord::count("b.com", "a.com", 1),
        ])
        .unwrap();
        let r = [1.0, -0.5];
        let c = cfg(0.9);
        let sol = f_values(&g, &r, &c).unwrap();
        assert!(sol.converged);
        assert!(bellman_residual(&g, &r, 0.9, &sol.values, Direction::Forward) < c.tolerance);

        let tight = PropagationConfig {
            max_iterations: 3,
            ..c
        };
        let sol = f_values(&g, &r, &tight).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.iterations, 3);
    }

    #[test]
    fn divergence_ceiling_trips() {
        // gamma * in-weight sum of 3 amplifies transiently; a tiny ceiling trips.
        let g = build_graph(&[
            EdgeRecord::count("a.com", "hub.com", 1),
            EdgeRecord::count("b.com", "hub.com", 1),
            EdgeRecord::count("c.com", "hub.com", 1),
        ])
        .unwrap();
        let c = PropagationConfig {
            divergence_ceiling: 1.2,
            ..cfg(0.5)
        };
        assert!(matches!(p_values(&g, &[1.0, 1.0, 1.0, 0.0], &c), Err(Error::Diverged { .. })));
    }

    #[test]
    fn invalid_configs() {
        let g = g1();
        assert!(f_values(&g, &G1_REWARDS, &cfg(1.0)).is_err());
        assert!(f_values(&g, &G1_REWARDS, &cfg(-0.1)).is_err());
        assert!(f_values(&g, &[0.0; 2], &cfg(0.1)).is_err());
        let c = PropagationConfig {
            tolerance: 0.0,
            ..cfg(0.1)
        };
        assert!(p_values(&g, &G1_REWARDS, &c).is_err());
        assert!(matches!("Q".parse::<Strategy>(), Err(Error::InvalidConfig(_))));
        assert_eq!("fp".parse::<Strategy>().unwrap(), Strategy::FP);
    }
}
