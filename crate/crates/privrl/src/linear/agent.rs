use serde::{Deserialize, Serialize};

use super::{LinearError, LsviParams};
use crate::envs::{argmax, LinearFeatures, Policy, TabularMdp, Values};
use crate::linalg::{min_eigenvalue, PsdFactor, SymmetricMatrix, Vector};
use crate::privacy::{sample_vector, NoiseTree, Regime};
use crate::rng::{stream, Role};

/// One transition of a stored trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub s: usize,
    pub a: usize,
    pub r: f64,
    pub next: usize,
}

/// An episode played by one user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsviEpisode {
    pub steps: Vec<Step>,
    /// `Σ_h min{H, 2β‖φ(s_h, a_h)‖_{Λ̃⁻¹}}` along the trajectory.
    pub bonus_sum: f64,
}

/// Noise diagnostics of one released batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchRecord {
    /// Batch index `b ≥ 1` of the release.
    pub batch: usize,
    /// Episode after which the release happened.
    pub episode: usize,
    /// `max_h ‖H^b_h‖` (operator norm of the tree prefix).
    pub tree_norm: f64,
    /// `max_h ‖η^b_h‖₂`.
    pub eta_norm: f64,
    /// `max_h ‖w̃_{b,h}‖₂`.
    pub w_norm: f64,
    /// `min_h λ_min(Λ̃_{b,h})`.
    pub min_eigen: f64,
    /// `max_i ‖φ_i (r_i + V(s'_i))‖₂` over the regression targets.
    pub max_summand: f64,
}

impl BatchRecord {
    /// Both noise draws lie within the bounds `Υ` and `C` of `params`.
    pub fn noise_bounded(&self, params: &LsviParams) -> bool {
        self.tree_norm <= params.upsilon && self.eta_norm <= params.c_j
    }
}

/// Batched privacy-preserving LSVI-UCB.
///
/// The policy is greedy with respect to
/// `Π_{[0,H]}[w̃_{b,h}ᵀφ(s,a) + β‖φ(s,a)‖_{Λ̃⁻¹_{b,h}}]` and is refreshed only
/// at the static batch boundaries of `params`.
#[derive(Debug, Clone)]
pub struct LsviAgent {
    params: LsviParams,
    features: LinearFeatures,
    phis: Vec<Vector>,
    batch: usize,
    episodes: usize,
    gram: Vec<SymmetricMatrix>,
    history: Vec<Vec<Step>>,
    lambda_tilde: Vec<SymmetricMatrix>,
    u_tilde: Vec<Vector>,
    w_tilde: Vec<Vector>,
    factors: Vec<PsdFactor>,
    scores: Vec<Vec<f64>>,
    policy: Policy,
    values: Values,
    trees: Vec<NoiseTree<SymmetricMatrix>>,
    /// `eta[i - 1][h] = η^i_h` for `i ∈ 1..=B`.
    eta: Vec<Vec<Vector>>,
    records: Vec<BatchRecord>,
    seed: u64,
}

impl LsviAgent {
    pub fn new(mdp: &TabularMdp, params: LsviParams, seed: u64) -> Result<Self, LinearError> {
        let features = LinearFeatures::new(mdp.num_states(), mdp.num_actions());
        let (d, h_n) = (features.dim(), mdp.horizon());
        if params.d != d || params.h != h_n {
            return Err(LinearError::Config(format!(
                "parameters for d={}, H={} do not match the environment (d={d}, H={h_n})",
                params.d, params.h
            )));
        }
        let phis = (0..mdp.num_states())
            .flat_map(|s| (0..mdp.num_actions()).map(move |a| (s, a)))
            .map(|(s, a)| features.phi(s, a))
            .collect();
        let jdp = params.regime == Regime::Jdp;
        let trees = if jdp {
            (0..h_n)
                .map(|h| NoiseTree::new(params.b, d, params.effective_sigma_lambda(), params.dist, seed, h as u64))
                .collect()
        } else {
            Vec::new()
        };
        let eta = if jdp {
            (1..=params.b)
                .map(|i| {
                    (0..h_n)
                        .map(|h| {
                            let mut rng = stream(seed, Role::ServerNoise, i as u64, h as u64);
                            sample_vector(d, params.effective_sigma_u(), params.dist, &mut rng)
                        })
                        .collect()
                })
                .collect()
        } else {
            Vec::new()
        };
        let gram = vec![SymmetricMatrix::scaled_identity(d, params.lambda); h_n];
        let factors = gram.iter().map(PsdFactor::new).collect::<Result<Vec<_>, _>>()?;
        let mut agent = Self {
            params,
            features,
            phis,
            batch: 0,
            episodes: 0,
            lambda_tilde: gram.clone(),
            gram,
            history: Vec::new(),
            u_tilde: vec![Vector::zeros(d); h_n],
            w_tilde: vec![Vector::zeros(d); h_n],
            factors,
            scores: Vec::new(),
            policy: Vec::new(),
            values: Vec::new(),
            trees,
            eta,
            records: Vec::new(),
            seed,
        };
        agent.refresh_all()?;
        Ok(agent)
    }

    pub fn params(&self) -> &LsviParams {
        &self.params
    }

    pub fn features(&self) -> &LinearFeatures {
        &self.features
    }

    /// Index `b` of the currently released output.
    pub fn batch(&self) -> usize {
        self.batch
    }

    pub fn episodes(&self) -> usize {
        self.episodes
    }

    pub fn beta(&self) -> f64 {
        self.params.beta
    }

    pub fn lambda_tilde(&self, h: usize) -> &SymmetricMatrix {
        &self.lambda_tilde[h]
    }

    pub fn u_tilde(&self, h: usize) -> &Vector {
        &self.u_tilde[h]
    }

    pub fn w_tilde(&self, h: usize) -> &Vector {
        &self.w_tilde[h]
    }

    /// Greedy policy of the current output.
    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    /// Clipped optimistic scores `scores[h][s·A + a]` of the current output.
    pub fn scores(&self) -> &[Vec<f64>] {
        &self.scores
    }

    /// `V_h(s) = max_a scores[h][s·A + a]`, with `V_H ≡ 0`.
    pub fn values(&self) -> &Values {
        &self.values
    }

    pub fn batch_records(&self) -> &[BatchRecord] {
        &self.records
    }

    /// Greedy action at `(s, h)`.
    pub fn act(&self, s: usize, h: usize) -> usize {
        self.policy[h][s]
    }

    /// Play episode `k` (1-based) with the current output.
    pub fn play(&self, mdp: &TabularMdp, k: usize) -> Result<LsviEpisode, LinearError> {
        let mut env = stream(self.seed, Role::Env, k as u64, 0);
        let cap = self.params.h as f64;
        let mut s = mdp.sample_initial(&mut env);
        let mut steps = Vec::with_capacity(self.params.h);
        let mut bonus_sum = 0.0;
        for h in 0..self.params.h {
            let a = self.act(s, h);
            let phi = &self.phis[self.features.index(s, a)];
            bonus_sum += (2.0 * self.params.beta * self.factors[h].inv_norm(phi)?).min(cap);
            let (next, r) = mdp.step(s, a, h, &mut env);
            steps.push(Step { s, a, r, next });
            s = next;
        }
        Ok(LsviEpisode { steps, bonus_sum })
    }

    /// Store episode `k`'s trajectory; at a batch boundary, release the next
    /// output and return its batch index.
    pub fn observe(&mut self, episode: &LsviEpisode) -> Result<Option<usize>, LinearError> {
        if episode.steps.len() != self.params.h {
            return Err(LinearError::Config(format!(
                "expected {} steps, got {}",
                self.params.h,
                episode.steps.len()
            )));
        }
        self.episodes += 1;
        for (h, st) in episode.steps.iter().enumerate() {
            let phi = &self.phis[self.features.index(st.s, st.a)];
            self.gram[h].rank1_update(phi, 1.0);
        }
        self.history.push(episode.steps.clone());
        match self.params.boundary_after(self.episodes) {
            Some(next) => {
                self.release(next)?;
                Ok(Some(next))
            }
            None => Ok(None),
        }
    }

    /// Backward pass producing output `next`: the targets use the value
    /// function of the new output at stage `h + 1`.
    fn release(&mut self, next: usize) -> Result<(), LinearError> {
        let h_n = self.params.h;
        let d = self.features.dim();
        let shift = self.params.shift();
        let jdp = self.params.regime == Regime::Jdp;
        let mut rec = BatchRecord {
            batch: next,
            episode: self.episodes,
            tree_norm: 0.0,
            eta_norm: 0.0,
            w_norm: 0.0,
            min_eigen: f64::INFINITY,
            max_summand: 0.0,
        };
        let mut v_next = vec![0.0; self.features.s];
        let mut values = vec![vec![0.0; self.features.s]; h_n + 1];
        for h in (0..h_n).rev() {
            let mut lt = self.gram[h].clone();
            let mut u = Vector::zeros(d);
            for steps in &self.history {
                let st = steps[h];
                let target = st.r + v_next[st.next];
                let phi = &self.phis[self.features.index(st.s, st.a)];
                u.axpy(target, phi, 1.0);
                rec.max_summand = rec.max_summand.max(phi.norm() * target.abs());
            }
            if jdp {
                let noise = self.trees[h].prefix(next)?;
                rec.tree_norm = rec.tree_norm.max(noise.operator_norm());
                lt.add_diagonal(shift);
                lt.add_assign(&noise);
                let eta = &self.eta[next - 1][h];
                rec.eta_norm = rec.eta_norm.max(eta.norm());
                u += eta;
            }
            let factor = PsdFactor::new(&lt)?;
            let w = factor.solve(&u)?;
            rec.w_norm = rec.w_norm.max(w.norm());
            rec.min_eigen = rec.min_eigen.min(min_eigenvalue(&lt));
            self.factors[h] = factor;
            self.lambda_tilde[h] = lt;
            self.u_tilde[h] = u;
            self.w_tilde[h] = w;
            self.refresh_stage(h)?;
            v_next = self.values_of(h);
            values[h] = v_next.clone();
        }
        self.values = values;
        self.batch = next;
        self.records.push(rec);
        Ok(())
    }

    fn refresh_all(&mut self) -> Result<(), LinearError> {
        let (h_n, s_n, a_n) = (self.params.h, self.features.s, self.features.a);
        self.scores = vec![vec![0.0; s_n * a_n]; h_n];
        self.policy = vec![vec![0; s_n]; h_n];
        self.values = vec![vec![0.0; s_n]; h_n + 1];
        for h in 0..h_n {
            self.refresh_stage(h)?;
            self.values[h] = self.values_of(h);
        }
        Ok(())
    }

    fn refresh_stage(&mut self, h: usize) -> Result<(), LinearError> {
        let (s_n, a_n) = (self.features.s, self.features.a);
        let cap = self.params.h as f64;
        for s in 0..s_n {
            for a in 0..a_n {
                let phi = &self.phis[self.features.index(s, a)];
                let raw = self.w_tilde[h].dot(phi) + self.params.beta * self.factors[h].inv_norm(phi)?;
                self.scores[h][s * a_n + a] = raw.clamp(0.0, cap);
            }
            self.policy[h][s] = argmax(&self.scores[h][s * a_n..(s + 1) * a_n]).0;
        }
        Ok(())
    }

    fn values_of(&self, h: usize) -> Vec<f64> {
        let a_n = self.features.a;
        (0..self.features.s).map(|s| self.scores[h][s * a_n + self.policy[h][s]]).collect()
    }
}
