use serde::{Deserialize, Serialize};

use super::{ldp_payload, plan_values, MixtureError, MixtureSettings, Payload, Plan, VtrPlusCalibration};
use crate::envs::{MixtureFeatures, RewardTable, TabularMdp};
use crate::linalg::{mahalanobis_norm, PsdFactor, SymmetricMatrix, Vector};
use crate::privacy::{NoiseTree, Regime};
use crate::rng::{stream, Role};

/// Variance estimate of one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceTerms {
    /// `V̄ = Π_{[0,H²]}⟨φ_{V²}, w̃⟩ − (Π_{[0,H]}⟨φ_V, ŵ⟩)²`.
    pub v_bar: f64,
    /// `E = min{H², 2Hβ̌‖φ_V‖_{Λ̂⁻¹}} + min{H², β̃‖φ_{V²}‖_{Λ̃⁻¹}}`.
    pub e: f64,
    /// `σ̄² = max{H²/d, V̄ + E}`.
    pub sigma2: f64,
}

/// Variance-aware weight of the first-moment regression.
#[allow(clippy::too_many_arguments)]
pub fn vtrplus_variance(
    phi_v: &Vector,
    phi_v2: &Vector,
    w_hat: &Vector,
    w_tilde: &Vector,
    factor_hat: &PsdFactor,
    factor_tilde: &PsdFactor,
    beta_check: f64,
    beta_tilde: f64,
    horizon: usize,
) -> Result<VarianceTerms, MixtureError> {
    let hf = horizon as f64;
    let h2 = hf * hf;
    let first = phi_v.dot(w_hat).clamp(0.0, hf);
    let v_bar = phi_v2.dot(w_tilde).clamp(0.0, h2) - first * first;
    let e = (2.0 * hf * beta_check * factor_hat.inv_norm(phi_v)?).min(h2)
        + (beta_tilde * factor_tilde.inv_norm(phi_v2)?).min(h2);
    let sigma2 = (h2 / phi_v.len() as f64).max(v_bar + e);
    Ok(VarianceTerms { v_bar, e, sigma2 })
}

/// The two payloads of one stage.
#[derive(Debug, Clone, PartialEq)]
pub struct VtrPlusPayload {
    /// `(σ̄⁻² φ_V φ_Vᵀ + B¹, σ̄⁻² φ_V V(s') + f¹)`.
    pub first: Payload,
    /// `(φ_{V²} φ_{V²}ᵀ + B², φ_{V²} V²(s') + g¹)`.
    pub second: Payload,
    pub variance: VarianceTerms,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VtrPlusTranscript {
    pub states: Vec<usize>,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    pub payloads: Vec<VtrPlusPayload>,
}

#[derive(Debug, Clone)]
struct Stack {
    gram: SymmetricMatrix,
    raw_u: Vector,
    lambda: SymmetricMatrix,
    u: Vector,
    w: Vector,
    factor: PsdFactor,
}

impl Stack {
    fn new(d: usize, lambda: f64) -> Result<Self, MixtureError> {
        let gram = SymmetricMatrix::scaled_identity(d, lambda);
        Ok(Self {
            factor: PsdFactor::new(&gram)?,
            lambda: gram.clone(),
            gram,
            raw_u: Vector::zeros(d),
            u: Vector::zeros(d),
            w: Vector::zeros(d),
        })
    }
}

/// Privacy-preserving UCRL-VTR+: a variance-weighted first-moment regression
/// (`Λ̂`, `ŵ`) drives planning, a second-moment regression (`Λ̃`, `w̃`) feeds
/// the variance estimate.
#[derive(Debug, Clone)]
pub struct VtrPlusAgent {
    features: MixtureFeatures,
    rewards: RewardTable,
    calib: VtrPlusCalibration,
    seed: u64,
    episodes: usize,
    betas: [f64; 3],
    first: Vec<Stack>,
    second: Vec<Stack>,
    matrix_trees: Vec<NoiseTree<SymmetricMatrix>>,
    vector_trees: Vec<NoiseTree<Vector>>,
}

impl VtrPlusAgent {
    pub fn new(mdp: &TabularMdp, calib: VtrPlusCalibration, seed: u64) -> Result<Self, MixtureError> {
        let features = MixtureFeatures::new(mdp.num_states(), mdp.num_actions());
        let (d, h_n) = (features.dim(), mdp.horizon());
        if calib.d != d || calib.h != h_n {
            return Err(MixtureError::Config(format!(
                "calibration for d={}, H={} does not match the environment (d={d}, H={h_n})",
                calib.d, calib.h
            )));
        }
        let first = (0..h_n).map(|_| Stack::new(d, calib.lambda)).collect::<Result<Vec<_>, _>>()?;
        let second = first.clone();
        let mut matrix_trees = Vec::new();
        let mut vector_trees = Vec::new();
        if calib.settings.regime == Regime::Jdp {
            // tree ids: [0, H) and [2H, 3H) matrices, [H, 2H) and [3H, 4H) vectors
            for (i, profile) in calib.profiles.iter().enumerate() {
                for h in 0..h_n {
                    let base = (2 * i * h_n + h) as u64;
                    matrix_trees.push(NoiseTree::new(calib.k, d, profile.effective_sigma_matrix(), profile.dist, seed, base));
                    vector_trees.push(NoiseTree::new(
                        calib.k,
                        d,
                        profile.effective_sigma_vector(),
                        profile.dist,
                        seed,
                        base + h_n as u64,
                    ));
                }
            }
        }
        Ok(Self {
            features,
            rewards: mdp.reward_table(),
            betas: [calib.beta_hat(1), calib.beta_check(1), calib.beta_tilde(1)],
            calib,
            seed,
            episodes: 0,
            first,
            second,
            matrix_trees,
            vector_trees,
        })
    }

    pub fn from_settings(mdp: &TabularMdp, settings: MixtureSettings, k: usize, seed: u64) -> Result<Self, MixtureError> {
        let (s, a) = (mdp.num_states(), mdp.num_actions());
        let c_w = s as f64 * (a as f64).sqrt();
        let calib = VtrPlusCalibration::new(settings, s * s * a, mdp.horizon(), k, c_w)?;
        Self::new(mdp, calib, seed)
    }

    pub fn calibration(&self) -> &VtrPlusCalibration {
        &self.calib
    }

    pub fn episodes(&self) -> usize {
        self.episodes
    }

    /// Widths `(β̂, β̌, β̃)` for the next episode.
    pub fn betas(&self) -> [f64; 3] {
        self.betas
    }

    /// `(Λ̂_h, ŵ_h)`.
    pub fn first_moment(&self, h: usize) -> (&SymmetricMatrix, &Vector) {
        (&self.first[h].lambda, &self.first[h].w)
    }

    /// `(Λ̃_h, w̃_h)`.
    pub fn second_moment(&self, h: usize) -> (&SymmetricMatrix, &Vector) {
        (&self.second[h].lambda, &self.second[h].w)
    }

    pub fn plan(&self) -> Result<Plan, MixtureError> {
        let w: Vec<Vector> = self.first.iter().map(|s| s.w.clone()).collect();
        let factors: Vec<PsdFactor> = self.first.iter().map(|s| s.factor.clone()).collect();
        plan_values(&self.features, &self.rewards, &w, &factors, self.betas[0])
    }

    /// `‖w_h − ŵ_h‖_{Λ̂_h}` for every stage.
    pub fn confidence_radii(&self, w: &[Vector]) -> Vec<f64> {
        w.iter().zip(&self.first).map(|(wh, st)| mahalanobis_norm(&st.lambda, &(wh - &st.w))).collect()
    }

    /// Play episode `k` (1-based) and build the user's payloads.
    pub fn user_round(&self, mdp: &TabularMdp, plan: &Plan, k: usize) -> Result<VtrPlusTranscript, MixtureError> {
        let h_n = mdp.horizon();
        let mut env = stream(self.seed, Role::Env, k as u64, 0);
        let mut s = mdp.sample_initial(&mut env);
        let mut states = vec![s];
        let mut actions = Vec::with_capacity(h_n);
        let mut rewards = Vec::with_capacity(h_n);
        let mut payloads = Vec::with_capacity(h_n);
        for h in 0..h_n {
            let a = plan.policy[h][s];
            let (next, r) = mdp.step(s, a, h, &mut env);
            let v_next = &plan.v[h + 1];
            let v2_next: Vec<f64> = v_next.iter().map(|x| x * x).collect();
            let x1 = self.features.phi_v(v_next, s, a);
            let x2 = self.features.phi_v(&v2_next, s, a);
            let (f, g) = (&self.first[h], &self.second[h]);
            let variance = vtrplus_variance(
                &x1,
                &x2,
                &f.w,
                &g.w,
                &f.factor,
                &g.factor,
                self.betas[1],
                self.betas[2],
                h_n,
            )?;
            let weight = 1.0 / variance.sigma2;
            let mut u1 = stream(self.seed, Role::UserNoise, k as u64, 2 * h as u64);
            let mut u2 = stream(self.seed, Role::UserNoise, k as u64, 2 * h as u64 + 1);
            let first = Payload::raw(&x1, v_next[next], weight).privatize(&self.calib.profiles[0], &mut u1);
            let second = ldp_payload(&x2, v2_next[next], &self.calib.profiles[1], &mut u2);
            payloads.push(VtrPlusPayload { first, second, variance });
            actions.push(a);
            rewards.push(r);
            states.push(next);
            s = next;
        }
        Ok(VtrPlusTranscript { states, actions, rewards, payloads })
    }

    pub fn server_update(&mut self, payloads: &[VtrPlusPayload]) -> Result<(), MixtureError> {
        let h_n = self.first.len();
        if payloads.len() != h_n {
            return Err(MixtureError::Config(format!("expected {h_n} payloads, got {}", payloads.len())));
        }
        self.episodes += 1;
        let k = self.episodes;
        let regime = self.calib.settings.regime;
        for (h, p) in payloads.iter().enumerate() {
            for (i, (stack, payload)) in [(&mut self.first[h], &p.first), (&mut self.second[h], &p.second)]
                .into_iter()
                .enumerate()
            {
                stack.gram.add_assign(&payload.xx);
                stack.raw_u += &payload.xy;
                let mut lt = stack.gram.clone();
                let mut ut = stack.raw_u.clone();
                let shift = self.calib.profiles[i].effective_shift();
                match regime {
                    Regime::None => {}
                    Regime::Jdp => {
                        let t = i * h_n + h;
                        lt.add_assign(&self.matrix_trees[t].prefix(k)?);
                        lt.add_diagonal(shift);
                        ut += self.vector_trees[t].prefix(k)?;
                    }
                    Regime::Ldp => lt.add_diagonal(shift),
                }
                let factor = PsdFactor::new(&lt)?;
                stack.w = factor.solve(&ut)?;
                stack.factor = factor;
                stack.lambda = lt;
                stack.u = ut;
            }
        }
        let next = k + 1;
        let fresh = [self.calib.beta_hat(next), self.calib.beta_check(next), self.calib.beta_tilde(next)];
        for (b, f) in self.betas.iter_mut().zip(fresh) {
            *b = b.max(f);
        }
        Ok(())
    }
}
