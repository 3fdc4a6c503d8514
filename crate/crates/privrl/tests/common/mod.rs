//! Straightforward non-private reference implementations used to check the
//! agents' zero-noise reduction, plus small statistical helpers.

#![allow(dead_code)]

use nalgebra::{Cholesky, DMatrix, DVector};
use privrl::envs::{optimal_values, policy_value, TabularMdp};
use privrl::rng::{stream, Role};

pub type Trace = Vec<f64>;

/// `√(xᵀ A⁻¹ x)` from the lower Cholesky factor, by forward substitution.
pub fn inv_norm(chol: &Cholesky<f64, nalgebra::Dyn>, x: &DVector<f64>) -> f64 {
    let l = chol.l_dirty();
    let n = x.len();
    let mut y = vec![0.0; n];
    let mut acc = 0.0;
    for i in 0..n {
        let mut s = x[i];
        for j in 0..i {
            s -= l[(i, j)] * y[j];
        }
        y[i] = s / l[(i, i)];
        acc += y[i] * y[i];
    }
    acc.sqrt()
}

fn best(q: &[f64]) -> (usize, f64) {
    let mut arg = 0;
    for a in 1..q.len() {
        if q[a] > q[arg] {
            arg = a;
        }
    }
    (arg, q[arg])
}

/// Width of non-private UCRL-VTR: `3(C_w+1)√λ + √(2H²[ln(3H/p) + (d/2) ln(1+KH)])`.
pub fn vtr_reference_beta(s: usize, a: usize, h: usize, k: usize, p: f64) -> f64 {
    let (hf, d) = (h as f64, (s * s * a) as f64);
    let c_w = s as f64 * (a as f64).sqrt();
    3.0 * (c_w + 1.0) * hf + (2.0 * hf * hf * ((3.0 * hf / p).ln() + d / 2.0 * (1.0 + k as f64 * hf).ln())).sqrt()
}

/// Non-private UCRL-VTR with `λ = H²` on the mixture encoding
/// `φ(s'|s,a) = e_{(s,a,s')}/√S`. Returns the per-episode instantaneous regret.
pub fn reference_vtr(mdp: &TabularMdp, k_total: usize, beta: f64, seed: u64) -> Trace {
    let (s_n, a_n, h_n) = (mdp.num_states(), mdp.num_actions(), mdp.horizon());
    let d = s_n * s_n * a_n;
    let rho = 1.0 / (s_n as f64).sqrt();
    let cap = h_n as f64;
    let (v_star, _) = optimal_values(mdp);
    let mut gram: Vec<DMatrix<f64>> = vec![DMatrix::identity(d, d) * (cap * cap); h_n];
    let mut u: Vec<DVector<f64>> = vec![DVector::zeros(d); h_n];
    let mut w: Vec<DVector<f64>> = vec![DVector::zeros(d); h_n];
    let mut chol: Vec<_> = gram.iter().map(|g| Cholesky::new(g.clone()).unwrap()).collect();
    let phi_v = |v: &[f64], s: usize, a: usize| {
        let mut x = DVector::zeros(d);
        for n in 0..s_n {
            x[(s * a_n + a) * s_n + n] = rho * v[n];
        }
        x
    };
    let mut trace = Vec::with_capacity(k_total);
    for k in 1..=k_total {
        let mut v = vec![vec![0.0; s_n]; h_n + 1];
        let mut pi = vec![vec![0; s_n]; h_n];
        for h in (0..h_n).rev() {
            for s in 0..s_n {
                let q: Vec<f64> = (0..a_n)
                    .map(|a| {
                        let x = phi_v(&v[h + 1], s, a);
                        (mdp.reward(h, s, a) + x.dot(&w[h]) + beta * inv_norm(&chol[h], &x)).clamp(0.0, cap)
                    })
                    .collect();
                let (arg, val) = best(&q);
                pi[h][s] = arg;
                v[h][s] = val;
            }
        }
        let mut env = stream(seed, Role::Env, k as u64, 0);
        let mut s = mdp.sample_initial(&mut env);
        let s1 = s;
        for h in 0..h_n {
            let a = pi[h][s];
            let (next, _) = mdp.step(s, a, h, &mut env);
            let x = phi_v(&v[h + 1], s, a);
            let y = v[h + 1][next];
            gram[h] += &x * x.transpose();
            u[h] += &x * y;
            s = next;
        }
        for h in 0..h_n {
            chol[h] = Cholesky::new(gram[h].clone()).unwrap();
            w[h] = chol[h].solve(&u[h]);
        }
        trace.push((v_star[0][s1] - policy_value(mdp, &pi)[0][s1]).max(0.0));
    }
    trace
}

/// Width of non-private batched LSVI-UCB with `λ = d`.
pub fn lsvi_reference_beta(d: usize, h: usize, k: usize, p: f64) -> f64 {
    let (df, hf, kf) = (d as f64, h as f64, k as f64);
    let u_k = (2.0 * hf * kf.sqrt()).max(1.0);
    let chi = 576.0 * 18.0 * kf * kf * df * u_k * hf / p;
    24.0 * hf * df * chi.ln()
}

/// Non-private LSVI-UCB on one-hot features `e_{(s,a)}` with `λ = d`, whose
/// greedy policy is recomputed only after episodes `k = i·⌈K/B⌉`, `i < B`.
pub fn reference_lsvi(mdp: &TabularMdp, k_total: usize, batches: usize, beta: f64, seed: u64) -> Trace {
    let (s_n, a_n, h_n) = (mdp.num_states(), mdp.num_actions(), mdp.horizon());
    let d = s_n * a_n;
    let cap = h_n as f64;
    let batch_len = k_total.div_ceil(batches);
    let (v_star, _) = optimal_values(mdp);
    let e = |s: usize, a: usize| {
        let mut x = DVector::zeros(d);
        x[s * a_n + a] = 1.0;
        x
    };
    let mut gram: Vec<DMatrix<f64>> = vec![DMatrix::identity(d, d) * d as f64; h_n];
    let mut w: Vec<DVector<f64>> = vec![DVector::zeros(d); h_n];
    let mut chol: Vec<_> = gram.iter().map(|g| Cholesky::new(g.clone()).unwrap()).collect();
    let mut history: Vec<Vec<(usize, usize, f64, usize)>> = Vec::new();
    let greedy = |w: &[DVector<f64>], chol: &[Cholesky<f64, nalgebra::Dyn>], h: usize| {
        (0..s_n)
            .map(|s| {
                let q: Vec<f64> = (0..a_n)
                    .map(|a| {
                        let x = e(s, a);
                        (w[h].dot(&x) + beta * inv_norm(&chol[h], &x)).clamp(0.0, cap)
                    })
                    .collect();
                best(&q)
            })
            .collect::<Vec<_>>()
    };
    let mut pi: Vec<Vec<usize>> = (0..h_n).map(|h| greedy(&w, &chol, h).iter().map(|x| x.0).collect()).collect();
    let mut trace = Vec::with_capacity(k_total);
    for k in 1..=k_total {
        let mut env = stream(seed, Role::Env, k as u64, 0);
        let mut s = mdp.sample_initial(&mut env);
        let s1 = s;
        let mut steps = Vec::with_capacity(h_n);
        for h in 0..h_n {
            let a = pi[h][s];
            let (next, r) = mdp.step(s, a, h, &mut env);
            steps.push((s, a, r, next));
            s = next;
        }
        trace.push((v_star[0][s1] - policy_value(mdp, &pi)[0][s1]).max(0.0));
        for (h, st) in steps.iter().enumerate() {
            let x = e(st.0, st.1);
            gram[h] += &x * x.transpose();
        }
        history.push(steps);
        if k % batch_len == 0 && k / batch_len < batches {
            let mut v_next = vec![0.0; s_n];
            for h in (0..h_n).rev() {
                let mut u = DVector::zeros(d);
                for ep in &history {
                    let (s, a, r, next) = ep[h];
                    u += e(s, a) * (r + v_next[next]);
                }
                chol[h] = Cholesky::new(gram[h].clone()).unwrap();
                w[h] = chol[h].solve(&u);
                let g = greedy(&w, &chol, h);
                pi[h] = g.iter().map(|x| x.0).collect();
                v_next = g.iter().map(|x| x.1).collect();
            }
        }
    }
    trace
}

/// One-sample Kolmogorov–Smirnov statistic of `xs` against `cdf`.
pub fn ks_statistic(xs: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    xs.iter().enumerate().fold(0.0, |d, (i, x)| {
        let f = cdf(*x);
        d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    })
}

/// Asymptotic Kolmogorov p-value `P(√n D > t)`.
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let t = d * (n as f64).sqrt();
    let mut p = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = 2.0 * (-2.0 * jf * jf * t * t).exp();
        p += if j % 2 == 1 { term } else { -term };
    }
    p.clamp(0.0, 1.0)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt()
}

/// Two-sided paired t-test p-value for the differences `b − a`.
pub fn paired_t_p_value(a: &[f64], b: &[f64]) -> f64 {
    use statrs::distribution::{ContinuousCDF, StudentsT};
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let n = diffs.len() as f64;
    let sd = std_dev(&diffs);
    if sd == 0.0 {
        return if mean(&diffs) == 0.0 { 1.0 } else { 0.0 };
    }
    let t = mean(&diffs) / (sd / n.sqrt());
    let dist = StudentsT::new(0.0, 1.0, n - 1.0).unwrap();
    2.0 * (1.0 - dist.cdf(t.abs()))
}
