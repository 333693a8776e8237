//! Exact-tier evaluation of the label-smoothed objective on finite supports:
//! the value function, the closed-form optimal discriminator, the guide
//! wrapper with its optimal solution, and a best-response minimax solver that
//! verifies the optimal generator is the restricted data distribution.

use crate::distributions::{restrict, uniform_on, DiscreteDistribution, RedactionSpec};
use crate::divergence::SmoothingParams;
use crate::error::{Error, Result};

/// Discriminator values on a finite support, one entry in [0, 1] per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminatorTable {
    values: Vec<f64>,
}

impl DiscriminatorTable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for &v in &values {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter {
                    name: "discriminator value",
                    value: v,
                    constraint: "in [0, 1]",
                });
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Closed-form optimal discriminator plus the atoms where the defining ratio
/// was 0/0 (no mass anywhere) and a neutral value was substituted.
#[derive(Debug, Clone)]
pub struct OptimalDiscriminator {
    pub table: DiscriminatorTable,
    pub undefined_atoms: Vec<usize>,
}

/// Value of the smoothed objective
/// E_real[a+ log D + (1-a+) log(1-D)] + E_fake[a- log D + (1-a-) log(1-D)].
///
/// Errors when D is exactly 0 or 1 on an atom carrying mass.
pub fn loss_value(
    p_real: &DiscreteDistribution,
    p_fake: &DiscreteDistribution,
    d: &DiscriminatorTable,
    params: &SmoothingParams,
) -> Result<f64> {
    let n = p_real.support_size();
    if p_fake.support_size() != n {
        return Err(Error::SupportMismatch {
            left: n,
            right: p_fake.support_size(),
        });
    }
    if d.len() != n {
        return Err(Error::SupportMismatch {
            left: n,
            right: d.len(),
        });
    }
    let (ap, am) = (params.alpha_plus(), params.alpha_minus());
    let mut total = 0.0;
    for (atom, ((&pr, &pf), &dv)) in p_real
        .probs()
        .iter()
        .zip(p_fake.probs())
        .zip(d.values())
        .enumerate()
    {
        if pr == 0.0 && pf == 0.0 {
            continue;
        }
        if dv == 0.0 || dv == 1.0 {
            return Err(Error::LogDomain { atom, value: dv });
        }
        let log_d = dv.ln();
        let log_1md = (-dv).ln_1p();
        if pr > 0.0 {
            total += pr * (ap * log_d + (1.0 - ap) * log_1md);
        }
        if pf > 0.0 {
            total += pf * (am * log_d + (1.0 - am) * log_1md);
        }
    }
    Ok(total)
}

fn fake_prob(g: f64, w: Option<f64>, lambda: f64) -> f64 {
    match w {
        Some(w) => lambda * g + (1.0 - lambda) * w,
        // empty redaction set: the fake distribution is the generator itself
        None => g,
    }
}

/// The maximizer of the objective for fixed distributions:
/// D* = (a+ p_real + a- p_fake) / (p_real + p_fake), entries in [a-, a+].
///
/// `p_omega = None` means the redaction set is empty and the fake
/// distribution is the generator alone. Atoms with no mass in either
/// distribution get the neutral value (a+ + a-)/2 and are flagged.
pub fn optimal_discriminator(
    p_restricted: &DiscreteDistribution,
    p_g: &DiscreteDistribution,
    p_omega: Option<&DiscreteDistribution>,
    params: &SmoothingParams,
) -> Result<OptimalDiscriminator> {
    let n = p_restricted.support_size();
    if p_g.support_size() != n {
        return Err(Error::SupportMismatch {
            left: n,
            right: p_g.support_size(),
        });
    }
    if let Some(w) = p_omega {
        if w.support_size() != n {
            return Err(Error::SupportMismatch {
                left: n,
                right: w.support_size(),
            });
        }
    }
    let (ap, am, lambda) = (params.alpha_plus(), params.alpha_minus(), params.lambda());
    let mut values = Vec::with_capacity(n);
    let mut undefined = Vec::new();
    for i in 0..n {
        let pr = p_restricted.prob(i);
        let pf = fake_prob(p_g.prob(i), p_omega.map(|w| w.prob(i)), lambda);
        let den = pr + pf;
        if den == 0.0 {
            undefined.push(i);
            values.push(0.5 * (ap + am));
        } else {
            values.push((ap * pr + am * pf) / den);
        }
    }
    Ok(OptimalDiscriminator {
        table: DiscriminatorTable::new(values)?,
        undefined_atoms: undefined,
    })
}

/// The guide wrapper: leaves D untouched where the classifier clears the
/// threshold and pulls it toward the negative target elsewhere,
/// guide(D, f)(x) = a- + (D(x) - a-) f(x) when f(x) < tau.
pub fn guide(
    d: &DiscriminatorTable,
    f_scores: &[f64],
    params: &SmoothingParams,
) -> Result<DiscriminatorTable> {
    if f_scores.len() != d.len() {
        return Err(Error::SupportMismatch {
            left: d.len(),
            right: f_scores.len(),
        });
    }
    for &f in f_scores {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::InvalidParameter {
                name: "classifier score",
                value: f,
                constraint: "in [0, 1]",
            });
        }
    }
    let (am, tau) = (params.alpha_minus(), params.tau());
    let values = d
        .values()
        .iter()
        .zip(f_scores)
        .map(|(&dv, &f)| if f >= tau { dv } else { am + (dv - am) * f })
        .collect();
    DiscriminatorTable::new(values)
}

/// Optimal discriminator under the guide wrapper: the closed form where
/// f >= tau, the negative target where f < tau. The output always lies in
/// [0, 1], which is what makes the guided fixed-point equation solvable.
pub fn optimal_guided_discriminator(
    p_restricted: &DiscreteDistribution,
    p_g: &DiscreteDistribution,
    p_omega: Option<&DiscreteDistribution>,
    f_scores: &[f64],
    params: &SmoothingParams,
) -> Result<OptimalDiscriminator> {
    let unguided = optimal_discriminator(p_restricted, p_g, p_omega, params)?;
    if f_scores.len() != unguided.table.len() {
        return Err(Error::SupportMismatch {
            left: unguided.table.len(),
            right: f_scores.len(),
        });
    }
    let (am, tau) = (params.alpha_minus(), params.tau());
    let values: Vec<f64> = unguided
        .table
        .values()
        .iter()
        .zip(f_scores)
        .map(|(&dv, &f)| if f >= tau { dv } else { am })
        .collect();
    let undefined = unguided
        .undefined_atoms
        .into_iter()
        .filter(|&i| f_scores[i] >= tau)
        .collect();
    Ok(OptimalDiscriminator {
        table: DiscriminatorTable::new(values)?,
        undefined_atoms: undefined,
    })
}

/// Multiplicative-weights configuration for the outer minimization.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    pub step_size: f64,
    pub max_iters: usize,
    /// Stop when the L1 norm of the simplex step falls below this.
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            step_size: 0.5,
            max_iters: 10_000,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinimaxSolution {
    pub p_g_star: DiscreteDistribution,
    pub d_star: DiscriminatorTable,
    /// max_D L(G, D) at the start of each outer iteration.
    pub objective_trace: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Solves min_G max_D L(G, D) on the simplex by best response: the inner
/// maximization is the closed form, the outer step is multiplicative weights
/// on p_G against the resulting objective max_D L = D_phi(P‖Q) + C.
///
/// Non-convergence within the iteration budget is flagged, not fatal.
pub fn solve_minimax(
    p_data: &DiscreteDistribution,
    omega: &RedactionSpec<usize>,
    params: &SmoothingParams,
    cfg: &SolverConfig,
) -> Result<MinimaxSolution> {
    let n = p_data.support_size();
    let p_restricted = restrict(p_data, omega)?;
    let members = omega.member_indices(n)?;
    let p_omega = if members.is_empty() {
        None
    } else {
        Some(uniform_on(omega, n)?)
    };

    let coeffs = params.mixture_coefficients();
    // With an empty redaction set the fake distribution collapses onto the
    // generator, which folds the third mixture component into the second.
    let (beta_g, gamma_g) = if p_omega.is_some() {
        (coeffs.beta[1], coeffs.gamma[1])
    } else {
        (coeffs.beta[1] + coeffs.beta[2], coeffs.gamma[1] + coeffs.gamma[2])
    };
    let c_offset = params.loss_offset();

    let mut p_g: Vec<f64> = vec![1.0 / n as f64; n];
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    let mut grad = vec![0.0; n];
    for iter in 0..cfg.max_iters {
        iterations = iter + 1;
        // objective and gradient of D_phi(P‖Q) in the generator coordinates
        let mut objective = c_offset;
        for i in 0..n {
            let r = p_restricted.prob(i);
            let w = p_omega.as_ref().map_or(0.0, |d| d.prob(i));
            let p_mix = coeffs.beta[0] * r + beta_g * p_g[i] + coeffs.beta[2] * w;
            let q_mix = coeffs.gamma[0] * r + gamma_g * p_g[i] + coeffs.gamma[2] * w;
            debug_assert!(q_mix > 0.0, "interior iterates keep Q positive");
            let ratio = p_mix / q_mix;
            let phi_r = crate::divergence::phi(ratio.max(f64::MIN_POSITIVE), params)?;
            let phi_p = crate::divergence::phi_prime(ratio.max(f64::MIN_POSITIVE), params)?;
            objective += q_mix * phi_r;
            grad[i] = gamma_g * phi_r + phi_p * (beta_g - gamma_g * ratio);
        }
        trace.push(objective);

        // multiplicative-weights step; shifting the exponent by the minimum
        // gradient keeps every factor <= 1
        let gmin = grad.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut znorm = 0.0;
        let weights: Vec<f64> = p_g
            .iter()
            .zip(grad.iter())
            .map(|(&p, &g)| {
                let w = p * (-cfg.step_size * (g - gmin)).exp();
                znorm += w;
                w
            })
            .collect();
        let mut step_norm = 0.0;
        for i in 0..n {
            let next = weights[i] / znorm;
            step_norm += (next - p_g[i]).abs();
            p_g[i] = next;
        }
        if step_norm < cfg.tol {
            converged = true;
            break;
        }
    }

    if !converged {
        log::warn!(
            "solve_minimax hit the iteration cap ({}) with the step norm above tol",
            cfg.max_iters
        );
    }
    let p_g_star = DiscreteDistribution::new(normalize(p_g))?;
    let d_star = optimal_discriminator(&p_restricted, &p_g_star, p_omega.as_ref(), params)?;
    Ok(MinimaxSolution {
        p_g_star,
        d_star: d_star.table,
        objective_trace: trace,
        converged,
        iterations,
    })
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let sum: f64 = v.iter().sum();
    for x in &mut v {
        *x /= sum;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::fake_mixture;
    use crate::divergence::f_divergence;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn params() -> SmoothingParams {
        SmoothingParams::new(0.9, 0.1, 0.8, 0.5).unwrap()
    }

    fn random_simplex(n: usize, rng: &mut ChaCha8Rng) -> DiscreteDistribution {
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        DiscreteDistribution::from_weights(&w).unwrap()
    }

    #[test]
    fn loss_at_one_half_collapses() {
        let p = params();
        let real = DiscreteDistribution::uniform(4);
        let fake = DiscreteDistribution::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let d = DiscriminatorTable::new(vec![0.5; 4]).unwrap();
        let expected = 2.0 * (0.5f64).ln();
        assert_relative_eq!(
            loss_value(&real, &fake, &d, &p).unwrap(),
            expected,
            max_relative = 1e-12
        );
    }

    #[test]
    fn loss_without_smoothing_recovers_plain_objective() {
        let p = SmoothingParams::new(1.0, 0.0, 0.8, 0.5).unwrap();
        let real = DiscreteDistribution::new(vec![0.6, 0.4]).unwrap();
        let fake = DiscreteDistribution::new(vec![0.3, 0.7]).unwrap();
        let d = DiscriminatorTable::new(vec![0.8, 0.4]).unwrap();
        let expected: f64 = 0.6 * 0.8f64.ln() + 0.4 * 0.4f64.ln()
            + 0.3 * (1.0f64 - 0.8).ln()
            + 0.7 * (1.0f64 - 0.4).ln();
        assert_relative_eq!(
            loss_value(&real, &fake, &d, &p).unwrap(),
            expected,
            max_relative = 1e-12
        );
    }

    #[test]
    fn loss_matches_independent_per_atom_summation() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let real = random_simplex(4, &mut rng);
        let fake = random_simplex(4, &mut rng);
        let d = DiscriminatorTable::new((0..4).map(|_| rng.random_range(0.05..0.95)).collect())
            .unwrap();
        // oracle: accumulate the four expectation terms separately
        let (ap, am) = (p.alpha_plus(), p.alpha_minus());
        let mut e_r_logd = 0.0;
        let mut e_r_log1md = 0.0;
        let mut e_f_logd = 0.0;
        let mut e_f_log1md = 0.0;
        for i in 0..4 {
            e_r_logd += real.prob(i) * d.values()[i].ln();
            e_r_log1md += real.prob(i) * (1.0 - d.values()[i]).ln();
            e_f_logd += fake.prob(i) * d.values()[i].ln();
            e_f_log1md += fake.prob(i) * (1.0 - d.values()[i]).ln();
        }
        let oracle =
            ap * e_r_logd + (1.0 - ap) * e_r_log1md + am * e_f_logd + (1.0 - am) * e_f_log1md;
        assert!((loss_value(&real, &fake, &d, &p).unwrap() - oracle).abs() <= 1e-12);
    }

    #[test]
    fn loss_rejects_saturated_discriminator_on_massed_atom() {
        let p = params();
        let real = DiscreteDistribution::new(vec![1.0, 0.0]).unwrap();
        let fake = DiscreteDistribution::new(vec![0.5, 0.5]).unwrap();
        let d = DiscriminatorTable::new(vec![1.0, 0.5]).unwrap();
        assert!(matches!(
            loss_value(&real, &fake, &d, &p),
            Err(Error::LogDomain { atom: 0, .. })
        ));
        // a saturated value on a zero-mass atom is harmless
        let d = DiscriminatorTable::new(vec![0.5, 0.5, 1.0]).unwrap();
        let real = DiscreteDistribution::new(vec![1.0, 0.0, 0.0]).unwrap();
        let fake = DiscreteDistribution::new(vec![0.5, 0.5, 0.0]).unwrap();
        assert!(loss_value(&real, &fake, &d, &p).is_ok());
    }

    #[test]
    fn optimal_discriminator_hits_targets_on_pure_atoms() {
        let p = params();
        // atom 0 carries only real mass, atom 2 only redaction mass
        let real = DiscreteDistribution::new(vec![1.0, 0.0, 0.0]).unwrap();
        let g = DiscreteDistribution::new(vec![0.0, 1.0, 0.0]).unwrap();
        let w = DiscreteDistribution::new(vec![0.0, 0.0, 1.0]).unwrap();
        let opt = optimal_discriminator(&real, &g, Some(&w), &p).unwrap();
        assert_relative_eq!(opt.table.values()[0], 0.9, max_relative = 1e-12);
        assert_relative_eq!(opt.table.values()[2], 0.1, max_relative = 1e-12);
        assert!(opt.undefined_atoms.is_empty());
    }

    #[test]
    fn optimal_discriminator_flags_empty_atoms() {
        let p = params();
        let real = DiscreteDistribution::new(vec![1.0, 0.0]).unwrap();
        let g = DiscreteDistribution::new(vec![1.0, 0.0]).unwrap();
        let opt = optimal_discriminator(&real, &g, None, &p).unwrap();
        assert_eq!(opt.undefined_atoms, vec![1]);
        assert_relative_eq!(opt.table.values()[1], 0.5, max_relative = 1e-12);
    }

    /// Brute-force oracle: maximize the per-atom integrand of the loss over a
    /// dense grid of discriminator values.
    fn grid_argmax(w_real: f64, w_fake: f64, ap: f64, am: f64, points: usize) -> f64 {
        let mut best = f64::NEG_INFINITY;
        let mut best_d = 0.5;
        for k in 0..points {
            let d = (k as f64 + 0.5) / points as f64;
            let val = w_real * (ap * d.ln() + (1.0 - ap) * (1.0 - d).ln())
                + w_fake * (am * d.ln() + (1.0 - am) * (1.0 - d).ln());
            if val > best {
                best = val;
                best_d = d;
            }
        }
        best_d
    }

    #[test]
    fn optimal_discriminator_matches_grid_search() {
        let p = params();
        let p_data = DiscreteDistribution::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let omega = RedactionSpec::ExplicitSet(vec![3]);
        let real = restrict(&p_data, &omega).unwrap();
        let g = DiscreteDistribution::uniform(4);
        let w = uniform_on(&omega, 4).unwrap();
        let ps = SmoothingParams::new(0.9, 0.1, 0.5, 0.5).unwrap();
        let opt = optimal_discriminator(&real, &g, Some(&w), &ps).unwrap();
        for i in 0..4 {
            let fake = 0.5 * g.prob(i) + 0.5 * w.prob(i);
            let oracle = grid_argmax(real.prob(i), fake, 0.9, 0.1, 100_000);
            assert!(
                (opt.table.values()[i] - oracle).abs() <= 1e-4,
                "atom {i}: {} vs {}",
                opt.table.values()[i],
                oracle
            );
        }
    }

    #[test]
    fn optimal_discriminator_beats_random_perturbations() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let real = random_simplex(6, &mut rng);
        let g = random_simplex(6, &mut rng);
        let w = random_simplex(6, &mut rng);
        let fake = fake_mixture(&g, &w, p.lambda()).unwrap();
        let opt = optimal_discriminator(&real, &g, Some(&w), &p).unwrap();
        let best = loss_value(&real, &fake, &opt.table, &p).unwrap();
        for _ in 0..1000 {
            let candidate: Vec<f64> = opt
                .table
                .values()
                .iter()
                .map(|&v| (v + rng.random_range(-0.2..0.2)).clamp(1e-6, 1.0 - 1e-6))
                .collect();
            let candidate = DiscriminatorTable::new(candidate).unwrap();
            let val = loss_value(&real, &fake, &candidate, &p).unwrap();
            assert!(val <= best + 1e-12);
        }
    }

    #[test]
    fn guide_examples() {
        let p = params();
        let d = DiscriminatorTable::new(vec![0.8, 0.8, 0.8]).unwrap();
        // at the threshold the untouched branch applies
        let out = guide(&d, &[0.5, 0.0, 0.2], &p).unwrap();
        assert_eq!(out.values()[0], 0.8);
        // f = 0 collapses to the negative target
        assert_relative_eq!(out.values()[1], 0.1, max_relative = 1e-12);
        // 0.1 + 0.7 * 0.2
        assert_relative_eq!(out.values()[2], 0.24, max_relative = 1e-12);
        assert!(guide(&d, &[0.5, 1.5, 0.2], &p).is_err());
    }

    #[test]
    fn optimal_guided_discriminator_branches() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let real = random_simplex(5, &mut rng);
        let g = random_simplex(5, &mut rng);
        let w = random_simplex(5, &mut rng);

        let all_valid = vec![0.9; 5];
        let guided = optimal_guided_discriminator(&real, &g, Some(&w), &all_valid, &p).unwrap();
        let plain = optimal_discriminator(&real, &g, Some(&w), &p).unwrap();
        assert_eq!(guided.table, plain.table);

        let all_invalid = vec![0.1; 5];
        let guided = optimal_guided_discriminator(&real, &g, Some(&w), &all_invalid, &p).unwrap();
        assert!(guided.table.values().iter().all(|&v| v == 0.1));
    }

    #[test]
    fn guided_optimum_satisfies_fixed_point_on_valid_atoms() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..1000 {
            let n = rng.random_range(2..8);
            let real = random_simplex(n, &mut rng);
            let g = random_simplex(n, &mut rng);
            let w = random_simplex(n, &mut rng);
            let f: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let opt = optimal_guided_discriminator(&real, &g, Some(&w), &f, &p).unwrap();
            // feasibility: always a valid discriminator table
            assert!(opt.table.values().iter().all(|&v| (0.0..=1.0).contains(&v)));
            // wrapping the solution reproduces the closed form where f >= tau
            let wrapped = guide(&opt.table, &f, &p).unwrap();
            let plain = optimal_discriminator(&real, &g, Some(&w), &p).unwrap();
            for i in 0..n {
                if f[i] >= p.tau() {
                    assert!(
                        (wrapped.values()[i] - plain.table.values()[i]).abs() <= 1e-12,
                        "atom {i}"
                    );
                }
            }
        }
    }

    #[test]
    fn minimax_without_redaction_recovers_data() {
        let p = params();
        let p_data = DiscreteDistribution::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let sol = solve_minimax(&p_data, &RedactionSpec::empty(), &p, &SolverConfig::default())
            .unwrap();
        assert!(sol.p_g_star.tv_distance(&p_data).unwrap() <= 1e-3);
    }

    #[test]
    fn minimax_recovers_restricted_data() {
        let p = params();
        let p_data = DiscreteDistribution::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let omega = RedactionSpec::ExplicitSet(vec![3]);
        let sol = solve_minimax(&p_data, &omega, &p, &SolverConfig::default()).unwrap();
        let target =
            DiscreteDistribution::new(vec![4.0 / 9.0, 3.0 / 9.0, 2.0 / 9.0, 0.0]).unwrap();
        assert!(
            sol.p_g_star.tv_distance(&target).unwrap() <= 1e-3,
            "tv = {}",
            sol.p_g_star.tv_distance(&target).unwrap()
        );
        // the converged generator has essentially no mass on the region
        assert!(sol.p_g_star.prob(3) <= 1e-6);
    }

    #[test]
    fn minimax_random_instances_reach_restricted_target() {
        let p = params();
        for seed in 0..5 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let p_data = random_simplex(16, &mut rng);
            let mut indices: Vec<usize> = (0..16).collect();
            indices.shuffle(&mut rng);
            let omega = RedactionSpec::ExplicitSet(indices[..4].to_vec());
            let target = restrict(&p_data, &omega).unwrap();
            let sol = solve_minimax(&p_data, &omega, &p, &SolverConfig::default()).unwrap();
            let tv = sol.p_g_star.tv_distance(&target).unwrap();
            assert!(tv <= 1e-3, "seed {seed}: tv = {tv}");
        }
    }

    #[test]
    fn minimax_trace_is_monotone() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let p_data = random_simplex(8, &mut rng);
        let omega = RedactionSpec::ExplicitSet(vec![1, 5]);
        let sol = solve_minimax(&p_data, &omega, &p, &SolverConfig::default()).unwrap();
        for pair in sol.objective_trace.windows(2) {
            assert!(pair[1] <= pair[0] + 1e-9, "{} -> {}", pair[0], pair[1]);
        }
    }

    #[test]
    fn inner_maximum_equals_divergence_plus_offset() {
        // max_D L(G, D) - C = D_phi(P‖Q) with P, Q the mixture-coefficient blends
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let real = random_simplex(6, &mut rng);
        let g = random_simplex(6, &mut rng);
        let w = random_simplex(6, &mut rng);
        let fake = fake_mixture(&g, &w, p.lambda()).unwrap();
        let opt = optimal_discriminator(&real, &g, Some(&w), &p).unwrap();
        let max_loss = loss_value(&real, &fake, &opt.table, &p).unwrap();

        let c = p.mixture_coefficients();
        let p_mix: Vec<f64> = (0..6)
            .map(|i| c.beta[0] * real.prob(i) + c.beta[1] * g.prob(i) + c.beta[2] * w.prob(i))
            .collect();
        let q_mix: Vec<f64> = (0..6)
            .map(|i| c.gamma[0] * real.prob(i) + c.gamma[1] * g.prob(i) + c.gamma[2] * w.prob(i))
            .collect();
        let div = f_divergence(
            &DiscreteDistribution::new(p_mix).unwrap(),
            &DiscreteDistribution::new(q_mix).unwrap(),
            &p,
        )
        .unwrap();
        assert!(
            (max_loss - p.loss_offset() - div).abs() <= 1e-9,
            "{} vs {}",
            max_loss - p.loss_offset(),
            div
        );
    }
}
