//! Finite-horizon tabular MDPs, their linear-mixture and linear encodings,
//! and exact dynamic-programming oracles.
//!
//! Stages are 0-based internally: `h ∈ 0..H`, with `V_H ≡ 0` as terminal.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::Vector;
use crate::rng::{stream, Role};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("invalid MDP shape: {0}")]
    Shape(String),
    #[error("transition row (h={h}, s={s}, a={a}) sums to {sum}, not 1")]
    NotStochastic { h: usize, s: usize, a: usize, sum: f64 },
    #[error("reward r_{h}({s},{a}) = {r} outside [0, 1]")]
    RewardRange { h: usize, s: usize, a: usize, r: f64 },
}

/// Values per stage: `values[h][s]` for `h ∈ 0..=H` with `values[H] ≡ 0`.
pub type Values = Vec<Vec<f64>>;

/// Deterministic non-stationary policy: `policy[h][s]` is an action.
pub type Policy = Vec<Vec<usize>>;

/// Time-inhomogeneous finite MDP with known deterministic rewards.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularMdp {
    s: usize,
    a: usize,
    h: usize,
    rewards: Vec<f64>,
    trans: Vec<f64>,
    init: Vec<f64>,
}

impl TabularMdp {
    /// `rewards[(h·S + s)·A + a]`, `trans[((h·S + s)·A + a)·S + s']`.
    pub fn new(
        s: usize,
        a: usize,
        h: usize,
        rewards: Vec<f64>,
        trans: Vec<f64>,
        init: Vec<f64>,
    ) -> Result<Self, EnvError> {
        if s == 0 || a == 0 || h == 0 {
            return Err(EnvError::Shape(format!("S={s}, A={a}, H={h} must all be positive")));
        }
        if rewards.len() != h * s * a {
            return Err(EnvError::Shape(format!("expected {} rewards, got {}", h * s * a, rewards.len())));
        }
        if trans.len() != h * s * a * s {
            return Err(EnvError::Shape(format!("expected {} transitions, got {}", h * s * a * s, trans.len())));
        }
        if init.len() != s {
            return Err(EnvError::Shape(format!("expected {s} initial probabilities, got {}", init.len())));
        }
        let mdp = Self { s, a, h, rewards, trans, init };
        for hh in 0..h {
            for ss in 0..s {
                for aa in 0..a {
                    let r = mdp.reward(hh, ss, aa);
                    if !(0.0..=1.0).contains(&r) {
                        return Err(EnvError::RewardRange { h: hh, s: ss, a: aa, r });
                    }
                    let row = mdp.row(hh, ss, aa);
                    let sum: f64 = row.iter().sum();
                    if row.iter().any(|p| p.is_nan() || *p < 0.0) || (sum - 1.0).abs() > 1e-12 {
                        return Err(EnvError::NotStochastic { h: hh, s: ss, a: aa, sum });
                    }
                }
            }
        }
        let isum: f64 = mdp.init.iter().sum();
        if mdp.init.iter().any(|p| p.is_nan() || *p < 0.0) || (isum - 1.0).abs() > 1e-12 {
            return Err(EnvError::Shape(format!("initial distribution sums to {isum}")));
        }
        Ok(mdp)
    }

    pub fn num_states(&self) -> usize {
        self.s
    }

    pub fn num_actions(&self) -> usize {
        self.a
    }

    pub fn horizon(&self) -> usize {
        self.h
    }

    pub fn reward(&self, h: usize, s: usize, a: usize) -> f64 {
        self.rewards[(h * self.s + s) * self.a + a]
    }

    pub fn row(&self, h: usize, s: usize, a: usize) -> &[f64] {
        let start = ((h * self.s + s) * self.a + a) * self.s;
        &self.trans[start..start + self.s]
    }

    pub fn prob(&self, h: usize, s: usize, a: usize, next: usize) -> f64 {
        self.row(h, s, a)[next]
    }

    pub fn initial_distribution(&self) -> &[f64] {
        &self.init
    }

    /// Draw an initial state.
    pub fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        inverse_cdf(&self.init, rng.gen::<f64>())
    }

    /// One transition: `s' ~ p_h(·|s,a)` by inverse CDF on a single uniform,
    /// and the known reward `r_h(s,a)`.
    pub fn step<R: Rng + ?Sized>(&self, s: usize, a: usize, h: usize, rng: &mut R) -> (usize, f64) {
        let next = inverse_cdf(self.row(h, s, a), rng.gen::<f64>());
        (next, self.reward(h, s, a))
    }

    /// `E_{s'~p_h(·|s,a)}[v(s')]`.
    pub fn expect(&self, h: usize, s: usize, a: usize, v: &[f64]) -> f64 {
        self.row(h, s, a).iter().zip(v).map(|(p, x)| p * x).sum()
    }

    /// Known rewards per stage: `table[h][s·A + a]`.
    pub fn reward_table(&self) -> RewardTable {
        self.rewards.chunks(self.s * self.a).map(|c| c.to_vec()).collect()
    }
}

/// Rewards per stage, `table[h][s·A + a]`.
pub type RewardTable = Vec<Vec<f64>>;

fn inverse_cdf(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // u landed in the round-off gap above the last partial sum
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(probs.len() - 1)
}

/// Index and value of the largest entry, ties to the lowest index.
pub fn argmax(values: &[f64]) -> (usize, f64) {
    let mut arg = 0;
    let mut best = values[0];
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > best {
            best = *v;
            arg = i;
        }
    }
    (arg, best)
}

/// `V*` by backward induction, with the greedy optimal policy (ties to the
/// lowest action index).
pub fn optimal_values(mdp: &TabularMdp) -> (Values, Policy) {
    let (s_n, a_n, h_n) = (mdp.s, mdp.a, mdp.h);
    let mut v = vec![vec![0.0; s_n]; h_n + 1];
    let mut pi = vec![vec![0; s_n]; h_n];
    for h in (0..h_n).rev() {
        for s in 0..s_n {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0;
            for a in 0..a_n {
                let q = mdp.reward(h, s, a) + mdp.expect(h, s, a, &v[h + 1]);
                if q > best {
                    best = q;
                    arg = a;
                }
            }
            v[h][s] = best;
            pi[h][s] = arg;
        }
    }
    (v, pi)
}

/// Exact `V^π` by backward evaluation.
pub fn policy_value(mdp: &TabularMdp, policy: &Policy) -> Values {
    let (s_n, h_n) = (mdp.s, mdp.h);
    let mut v = vec![vec![0.0; s_n]; h_n + 1];
    for h in (0..h_n).rev() {
        for s in 0..s_n {
            let a = policy[h][s];
            v[h][s] = mdp.reward(h, s, a) + mdp.expect(h, s, a, &v[h + 1]);
        }
    }
    v
}

/// Built-in environment families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Chain with a small reward at the left end and a large one at the right
    /// end, reachable only through a stochastic "swim upstream" action.
    RiverSwim,
    /// Seeded dense MDP: Dirichlet(1) transition rows, uniform rewards and a
    /// uniform initial distribution.
    RandomDense,
}

/// Environment block of an experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvSpec {
    pub family: Family,
    #[serde(rename = "S")]
    pub s: usize,
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "H")]
    pub h: usize,
    #[serde(default)]
    pub seed: u64,
}

impl EnvSpec {
    pub fn build(&self) -> Result<TabularMdp, EnvError> {
        match self.family {
            Family::RiverSwim => river_swim(self.s, self.a, self.h),
            Family::RandomDense => random_dense(self.s, self.a, self.h, self.seed),
        }
    }
}

/// RiverSwim-like chain. Action 1 swims right (0.6 forward, 0.35 stay,
/// 0.05 back); every other action moves left deterministically. Reward 0.05
/// for moving left at state 0 and 1 for swimming at the last state.
pub fn river_swim(s: usize, a: usize, h: usize) -> Result<TabularMdp, EnvError> {
    if s < 2 || a < 2 {
        return Err(EnvError::Shape(format!("river swim needs S ≥ 2 and A ≥ 2, got S={s}, A={a}")));
    }
    let mut rewards = vec![0.0; h * s * a];
    let mut trans = vec![0.0; h * s * a * s];
    for hh in 0..h {
        for ss in 0..s {
            for aa in 0..a {
                let row = &mut trans[((hh * s + ss) * a + aa) * s..][..s];
                if aa == 1 {
                    // edge rows set directly: 0.35 + 0.05 is not 0.4 in f64
                    if ss == 0 {
                        row[0] = 0.4;
                        row[1] = 0.6;
                    } else if ss == s - 1 {
                        row[ss - 1] = 0.05;
                        row[ss] = 0.95;
                        rewards[(hh * s + ss) * a + aa] = 1.0;
                    } else {
                        row[ss - 1] = 0.05;
                        row[ss] = 0.35;
                        row[ss + 1] = 0.6;
                    }
                } else {
                    row[ss.saturating_sub(1)] = 1.0;
                    if ss == 0 {
                        rewards[(hh * s + ss) * a + aa] = 0.05;
                    }
                }
            }
        }
    }
    let mut init = vec![0.0; s];
    init[0] = 1.0;
    TabularMdp::new(s, a, h, rewards, trans, init)
}

/// Seeded dense MDP.
pub fn random_dense(s: usize, a: usize, h: usize, seed: u64) -> Result<TabularMdp, EnvError> {
    if s == 0 || a == 0 || h == 0 {
        return Err(EnvError::Shape(format!("S={s}, A={a}, H={h} must all be positive")));
    }
    let mut rng = stream(seed, Role::EnvBuild, 0, 0);
    let mut rewards = Vec::with_capacity(h * s * a);
    let mut trans = Vec::with_capacity(h * s * a * s);
    for _ in 0..h * s * a {
        rewards.push(rng.gen::<f64>());
        let raw: Vec<f64> = (0..s).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = raw.iter().sum();
        trans.extend(raw.iter().map(|x| x / total));
    }
    let init = vec![1.0 / s as f64; s];
    TabularMdp::new(s, a, h, rewards, trans, init)
}

/// Known feature map of the linear-mixture encoding: `φ(s'|s,a) = ρ·e_{(s,a,s')}`
/// with `ρ = 1/√S`, so `d = S²A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureFeatures {
    pub s: usize,
    pub a: usize,
    pub rho: f64,
}

impl MixtureFeatures {
    pub fn new(s: usize, a: usize) -> Self {
        Self { s, a, rho: 1.0 / (s as f64).sqrt() }
    }

    pub fn dim(&self) -> usize {
        self.s * self.s * self.a
    }

    pub fn index(&self, s: usize, a: usize, next: usize) -> usize {
        (s * self.a + a) * self.s + next
    }

    /// First coordinate of the `(s, a, ·)` block.
    pub fn block(&self, s: usize, a: usize) -> usize {
        (s * self.a + a) * self.s
    }

    /// `φ(s'|s,a)`.
    pub fn phi(&self, s: usize, a: usize, next: usize) -> Vector {
        let mut x = Vector::zeros(self.dim());
        x[self.index(s, a, next)] = self.rho;
        x
    }

    /// `φ_v(s,a) = Σ_{s'} φ(s'|s,a) v(s')`.
    pub fn phi_v(&self, v: &[f64], s: usize, a: usize) -> Vector {
        let mut x = Vector::zeros(self.dim());
        let b = self.block(s, a);
        for (j, vj) in v.iter().enumerate() {
            x[b + j] = self.rho * vj;
        }
        x
    }
}

/// Linear-mixture encoding of a tabular MDP: `w_h[(s,a,s')] = p_h(s'|s,a)/ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureEncoding {
    pub features: MixtureFeatures,
    pub w: Vec<Vector>,
    pub c_w: f64,
}

impl MixtureEncoding {
    pub fn from_mdp(mdp: &TabularMdp) -> Self {
        let f = MixtureFeatures::new(mdp.s, mdp.a);
        let w = (0..mdp.h)
            .map(|h| {
                let mut w = Vector::zeros(f.dim());
                for s in 0..mdp.s {
                    for a in 0..mdp.a {
                        for n in 0..mdp.s {
                            w[f.index(s, a, n)] = mdp.prob(h, s, a, n) / f.rho;
                        }
                    }
                }
                w
            })
            .collect();
        Self { features: f, w, c_w: mdp.s as f64 * (mdp.a as f64).sqrt() }
    }

    pub fn dim(&self) -> usize {
        self.features.dim()
    }

    pub fn phi_v(&self, v: &[f64], s: usize, a: usize) -> Vector {
        self.features.phi_v(v, s, a)
    }

    /// `⟨φ(s'|s,a), w_h⟩`.
    pub fn transition(&self, h: usize, s: usize, a: usize, next: usize) -> f64 {
        self.features.phi(s, a, next).dot(&self.w[h])
    }
}

/// Known feature map of the linear encoding: one-hot `φ(s,a) = e_{(s,a)}`, `d = SA`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFeatures {
    pub s: usize,
    pub a: usize,
}

impl LinearFeatures {
    pub fn new(s: usize, a: usize) -> Self {
        Self { s, a }
    }

    pub fn dim(&self) -> usize {
        self.s * self.a
    }

    pub fn index(&self, s: usize, a: usize) -> usize {
        s * self.a + a
    }

    pub fn phi(&self, s: usize, a: usize) -> Vector {
        let mut x = Vector::zeros(self.dim());
        x[self.index(s, a)] = 1.0;
        x
    }
}

/// Linear encoding: `θ_h[(s,a)] = r_h(s,a)`, `μ_h(s')[(s,a)] = p_h(s'|s,a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEncoding {
    pub features: LinearFeatures,
    pub theta: Vec<Vector>,
    /// `mu[h][s']`.
    pub mu: Vec<Vec<Vector>>,
}

impl LinearEncoding {
    pub fn from_mdp(mdp: &TabularMdp) -> Self {
        let f = LinearFeatures::new(mdp.s, mdp.a);
        let theta = (0..mdp.h)
            .map(|h| {
                Vector::from_iterator(f.dim(), (0..mdp.s).flat_map(|s| (0..mdp.a).map(move |a| (s, a))).map(|(s, a)| mdp.reward(h, s, a)))
            })
            .collect();
        let mu = (0..mdp.h)
            .map(|h| {
                (0..mdp.s)
                    .map(|n| {
                        let mut m = Vector::zeros(f.dim());
                        for s in 0..mdp.s {
                            for a in 0..mdp.a {
                                m[f.index(s, a)] = mdp.prob(h, s, a, n);
                            }
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        Self { features: f, theta, mu }
    }

    pub fn dim(&self) -> usize {
        self.features.dim()
    }

    /// `φ(s,a)ᵀ Σ_{s'} μ_h(s') v(s')`.
    pub fn expect(&self, h: usize, s: usize, a: usize, v: &[f64]) -> f64 {
        self.integrate(h, v)[self.features.index(s, a)]
    }

    /// `Σ_{s'} μ_h(s') v(s')`.
    pub fn integrate(&self, h: usize, v: &[f64]) -> Vector {
        let mut acc = Vector::zeros(self.dim());
        for (n, vn) in v.iter().enumerate() {
            acc.axpy(*vn, &self.mu[h][n], 1.0);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn river_rows_are_stochastic() {
        let m = river_swim(5, 2, 4).unwrap();
        assert_eq!(m.row(0, 4, 1), &[0.0, 0.0, 0.0, 0.05, 0.95]);
        assert_eq!(m.row(0, 0, 1), &[0.4, 0.6, 0.0, 0.0, 0.0]);
        assert_eq!(m.reward(2, 4, 1), 1.0);
        assert_eq!(m.reward(2, 0, 0), 0.05);
    }

    #[test]
    fn random_dense_is_seeded() {
        assert_eq!(random_dense(3, 2, 2, 5).unwrap(), random_dense(3, 2, 2, 5).unwrap());
        assert_ne!(random_dense(3, 2, 2, 5).unwrap(), random_dense(3, 2, 2, 6).unwrap());
    }

    #[test]
    fn rejects_bad_rows() {
        let err = TabularMdp::new(1, 1, 1, vec![0.5], vec![0.9], vec![1.0]).unwrap_err();
        assert!(matches!(err, EnvError::NotStochastic { .. }));
    }
}
