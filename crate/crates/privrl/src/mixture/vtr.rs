use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{MixtureError, MixtureSettings, VtrCalibration};
use crate::envs::{argmax, MixtureFeatures, Policy, RewardTable, TabularMdp, Values};
use crate::linalg::{mahalanobis_norm, PsdFactor, SymmetricMatrix, Vector};
use crate::privacy::{sample_symmetric, sample_vector, NoiseProfile, NoiseTree, Regime};
use crate::rng::{stream, Role};

/// Optimistic tables of one episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    /// `q[h][s·A + a]`, clamped to `[0, H]`.
    pub q: Vec<Vec<f64>>,
    /// `v[h][s]` for `h ∈ 0..=H`, with `v[H] ≡ 0`.
    pub v: Values,
    pub policy: Policy,
}

/// Backward induction of
/// `Q_h(s,a) = Π_{[0,H]}[r_h(s,a) + ⟨φ_{V_{h+1}}(s,a), w_h⟩ + β‖φ_{V_{h+1}}(s,a)‖_{Λ_h⁻¹}]`,
/// where `factors[h]` factors `Λ_h`.
pub fn plan_values(
    features: &MixtureFeatures,
    rewards: &RewardTable,
    w: &[Vector],
    factors: &[PsdFactor],
    beta: f64,
) -> Result<Plan, MixtureError> {
    let (s_n, a_n, h_n) = (features.s, features.a, w.len());
    let cap = h_n as f64;
    let mut v = vec![vec![0.0; s_n]; h_n + 1];
    let mut q = vec![vec![0.0; s_n * a_n]; h_n];
    let mut policy = vec![vec![0; s_n]; h_n];
    for h in (0..h_n).rev() {
        for s in 0..s_n {
            for a in 0..a_n {
                let phi = features.phi_v(&v[h + 1], s, a);
                let bonus = beta * factors[h].inv_norm(&phi)?;
                q[h][s * a_n + a] = (rewards[h][s * a_n + a] + phi.dot(&w[h]) + bonus).clamp(0.0, cap);
            }
            let (arg, best) = argmax(&q[h][s * a_n..(s + 1) * a_n]);
            v[h][s] = best;
            policy[h][s] = arg;
        }
    }
    Ok(Plan { q, v, policy })
}

/// Statistics a user sends for one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Payload {
    pub xx: SymmetricMatrix,
    pub xy: Vector,
}

impl Payload {
    /// `(c·X Xᵀ, c·X y)`.
    pub fn raw(x: &Vector, y: f64, weight: f64) -> Self {
        let mut xx = SymmetricMatrix::zeros(x.len());
        xx.rank1_update(x, weight);
        Self { xx, xy: x * (weight * y) }
    }

    /// Add user-side noise `(B¹, g¹)`; a no-op outside the LDP regime.
    pub fn privatize<R: Rng + ?Sized>(mut self, profile: &NoiseProfile, rng: &mut R) -> Self {
        if profile.regime == Regime::Ldp {
            let d = self.xy.len();
            self.xx.add_assign(&sample_symmetric(d, profile.effective_sigma_matrix(), profile.dist, rng));
            self.xy += sample_vector(d, profile.effective_sigma_vector(), profile.dist, rng);
        }
        self
    }
}

/// `(X Xᵀ + B¹, X y + g¹)`: the noise is drawn only under the LDP regime.
pub fn ldp_payload<R: Rng + ?Sized>(x: &Vector, y: f64, profile: &NoiseProfile, rng: &mut R) -> Payload {
    Payload::raw(x, y, 1.0).privatize(profile, rng)
}

/// One user's episode.
#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    /// `H + 1` visited states.
    pub states: Vec<usize>,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    /// Regression inputs `X_h = φ_{V_{h+1}}(s_h, a_h)`.
    pub x: Vec<Vector>,
    /// Targets `y_h = V_{h+1}(s_{h+1})`.
    pub y: Vec<f64>,
    pub payloads: Vec<Payload>,
}

/// Privacy-preserving UCRL-VTR.
///
/// Stage `h` keeps `gram = λI + Σ (X Xᵀ + B¹)` and `raw_u = Σ (X y + g¹)`;
/// the released design is `Λ̃ = gram + B²` and `ũ = raw_u + g²`, where
/// `B²`, `g²` are tree prefixes plus a shift (JDP) or a shift only (LDP).
#[derive(Debug, Clone)]
pub struct VtrAgent {
    features: MixtureFeatures,
    rewards: RewardTable,
    calib: VtrCalibration,
    seed: u64,
    episodes: usize,
    beta: f64,
    gram: Vec<SymmetricMatrix>,
    raw_u: Vec<Vector>,
    lambda_tilde: Vec<SymmetricMatrix>,
    u_tilde: Vec<Vector>,
    w_tilde: Vec<Vector>,
    factors: Vec<PsdFactor>,
    matrix_trees: Vec<NoiseTree<SymmetricMatrix>>,
    vector_trees: Vec<NoiseTree<Vector>>,
}

impl VtrAgent {
    pub fn new(mdp: &TabularMdp, calib: VtrCalibration, seed: u64) -> Result<Self, MixtureError> {
        let features = MixtureFeatures::new(mdp.num_states(), mdp.num_actions());
        let (d, h_n) = (features.dim(), mdp.horizon());
        if calib.d != d || calib.h != h_n {
            return Err(MixtureError::Config(format!(
                "calibration for d={}, H={} does not match the environment (d={d}, H={h_n})",
                calib.d, calib.h
            )));
        }
        let gram = vec![SymmetricMatrix::scaled_identity(d, calib.lambda); h_n];
        let factors = gram.iter().map(PsdFactor::new).collect::<Result<Vec<_>, _>>()?;
        let profile = calib.profile;
        let (matrix_trees, vector_trees) = if profile.regime == Regime::Jdp {
            let m = (0..h_n)
                .map(|h| NoiseTree::new(calib.k, d, profile.effective_sigma_matrix(), profile.dist, seed, h as u64))
                .collect();
            let v = (0..h_n)
                .map(|h| {
                    NoiseTree::new(calib.k, d, profile.effective_sigma_vector(), profile.dist, seed, (h_n + h) as u64)
                })
                .collect();
            (m, v)
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(Self {
            features,
            rewards: mdp.reward_table(),
            calib,
            seed,
            episodes: 0,
            beta: calib.beta,
            lambda_tilde: gram.clone(),
            gram,
            raw_u: vec![Vector::zeros(d); h_n],
            u_tilde: vec![Vector::zeros(d); h_n],
            w_tilde: vec![Vector::zeros(d); h_n],
            factors,
            matrix_trees,
            vector_trees,
        })
    }

    /// Calibrate for `mdp` under its mixture encoding and `k` episodes.
    pub fn from_settings(mdp: &TabularMdp, settings: MixtureSettings, k: usize, seed: u64) -> Result<Self, MixtureError> {
        let (s, a) = (mdp.num_states(), mdp.num_actions());
        let c_w = s as f64 * (a as f64).sqrt();
        let calib = VtrCalibration::new(settings, s * s * a, mdp.horizon(), k, c_w)?;
        Self::new(mdp, calib, seed)
    }

    pub fn calibration(&self) -> &VtrCalibration {
        &self.calib
    }

    pub fn features(&self) -> &MixtureFeatures {
        &self.features
    }

    /// Number of completed server updates.
    pub fn episodes(&self) -> usize {
        self.episodes
    }

    /// Width used for the next plan (running maximum of the schedule).
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gram(&self, h: usize) -> &SymmetricMatrix {
        &self.gram[h]
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

    pub fn plan(&self) -> Result<Plan, MixtureError> {
        plan_values(&self.features, &self.rewards, &self.w_tilde, &self.factors, self.beta)
    }

    /// `‖w_h − w̃_h‖_{Λ̃_h}` for every stage.
    pub fn confidence_radii(&self, w: &[Vector]) -> Vec<f64> {
        w.iter()
            .zip(&self.w_tilde)
            .zip(&self.lambda_tilde)
            .map(|((wh, wt), lt)| mahalanobis_norm(lt, &(wh - wt)))
            .collect()
    }

    /// Play episode `k` (1-based) greedily with respect to `plan`.
    pub fn user_round(&self, mdp: &TabularMdp, plan: &Plan, k: usize) -> Transcript {
        let h_n = mdp.horizon();
        let mut env = stream(self.seed, Role::Env, k as u64, 0);
        let mut states = Vec::with_capacity(h_n + 1);
        let mut actions = Vec::with_capacity(h_n);
        let mut rewards = Vec::with_capacity(h_n);
        let mut xs = Vec::with_capacity(h_n);
        let mut ys = Vec::with_capacity(h_n);
        let mut payloads = Vec::with_capacity(h_n);
        let mut s = mdp.sample_initial(&mut env);
        states.push(s);
        for h in 0..h_n {
            let a = plan.policy[h][s];
            let (next, r) = mdp.step(s, a, h, &mut env);
            let x = self.features.phi_v(&plan.v[h + 1], s, a);
            let y = plan.v[h + 1][next];
            let mut user = stream(self.seed, Role::UserNoise, k as u64, h as u64);
            payloads.push(ldp_payload(&x, y, &self.calib.profile, &mut user));
            xs.push(x);
            ys.push(y);
            actions.push(a);
            rewards.push(r);
            states.push(next);
            s = next;
        }
        Transcript { states, actions, rewards, x: xs, y: ys, payloads }
    }

    /// Fold one episode's payloads into the statistics and release
    /// `(Λ̃, ũ, w̃)` for the next episode.
    pub fn server_update(&mut self, payloads: &[Payload]) -> Result<(), MixtureError> {
        if payloads.len() != self.gram.len() {
            return Err(MixtureError::Config(format!(
                "expected {} payloads, got {}",
                self.gram.len(),
                payloads.len()
            )));
        }
        self.episodes += 1;
        let k = self.episodes;
        let shift = self.calib.shift;
        for (h, p) in payloads.iter().enumerate() {
            self.gram[h].add_assign(&p.xx);
            self.raw_u[h] += &p.xy;
            let mut lt = self.gram[h].clone();
            let mut ut = self.raw_u[h].clone();
            match self.calib.profile.regime {
                Regime::None => {}
                Regime::Jdp => {
                    lt.add_assign(&self.matrix_trees[h].prefix(k)?);
                    lt.add_diagonal(shift);
                    ut += self.vector_trees[h].prefix(k)?;
                }
                Regime::Ldp => lt.add_diagonal(shift),
            }
            let factor = PsdFactor::new(&lt)?;
            self.w_tilde[h] = factor.solve(&ut)?;
            self.factors[h] = factor;
            self.lambda_tilde[h] = lt;
            self.u_tilde[h] = ut;
        }
        self.beta = self.beta.max(self.calib.beta);
        Ok(())
    }
}
