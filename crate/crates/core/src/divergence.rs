//! Convex-analysis machinery behind the label-smoothed redaction objective.
//!
//! With soft targets `alpha_plus` for real and `alpha_minus` for fake samples,
//! the two-player value function collapses (up to an additive constant C) to an
//! f-divergence D_phi(P‖Q) between two fixed mixtures of the real, generator
//! and redaction distributions. This module houses the generator phi of that
//! divergence, its convex conjugate phi*, the derivative phi', the divergence
//! on finite supports, the psi-gap that drives the optimal-generator argument,
//! and the mixture coefficients (beta_i, gamma_i).
//!
//! With alpha = alpha_minus + alpha_plus:
//!
//! ```text
//! phi(u)  = (a u) ln(a u) - (a u - a + 2) ln(a u - a + 2) + (2-a) ln(2-a) - C
//! phi*(t) = -(2-a) ln(1 - e^(t/a)) + C            (t < 0)
//! phi'(u) = a ln( a u / (a u - a + 2) )
//! C       = a ln a + (2-a) ln(2-a) - 2 ln 2
//! ```

use crate::error::{Error, Result};

const LN_2: f64 = std::f64::consts::LN_2;

/// Hyperparameters of the label-smoothed redaction objective.
///
/// `alpha_plus` is the soft target for real samples, `alpha_minus` the soft
/// target for fake samples, `lambda` the generator share of the fake mixture,
/// and `tau` the classifier threshold used by the guide wrapper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingParams {
    alpha_plus: f64,
    alpha_minus: f64,
    lambda: f64,
    tau: f64,
}

impl SmoothingParams {
    /// Validating constructor. The inequalities on the targets are strict:
    /// `alpha_plus` must exceed 1/2 and `alpha_minus` must stay below it.
    pub fn new(alpha_plus: f64, alpha_minus: f64, lambda: f64, tau: f64) -> Result<Self> {
        if !(alpha_plus > 0.5 && alpha_plus <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha_plus",
                value: alpha_plus,
                constraint: "alpha_plus in (1/2, 1]",
            });
        }
        if !(alpha_minus >= 0.0 && alpha_minus < 0.5) {
            return Err(Error::InvalidParameter {
                name: "alpha_minus",
                value: alpha_minus,
                constraint: "alpha_minus in [0, 1/2)",
            });
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
                constraint: "lambda in (0, 1)",
            });
        }
        if !(tau > 0.0 && tau < 1.0) {
            return Err(Error::InvalidParameter {
                name: "tau",
                value: tau,
                constraint: "tau in (0, 1)",
            });
        }
        Ok(Self {
            alpha_plus,
            alpha_minus,
            lambda,
            tau,
        })
    }

    /// Skips validation. Exists so tests can reach the degenerate boundary
    /// alpha_plus = alpha_minus = 1/2, where the psi-gap attains zero; the
    /// public constructor rejects it on purpose.
    #[allow(dead_code)]
    pub(crate) fn new_unchecked(alpha_plus: f64, alpha_minus: f64, lambda: f64, tau: f64) -> Self {
        Self {
            alpha_plus,
            alpha_minus,
            lambda,
            tau,
        }
    }

    /// The stated defaults: targets 0.9/0.1, generator share 0.8, threshold 0.5.
    pub fn defaults() -> Self {
        Self::new(0.9, 0.1, 0.8, 0.5).expect("defaults are valid")
    }

    pub fn alpha_plus(&self) -> f64 {
        self.alpha_plus
    }

    pub fn alpha_minus(&self) -> f64 {
        self.alpha_minus
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// alpha = alpha_minus + alpha_plus, always in (1/2, 3/2).
    pub fn alpha(&self) -> f64 {
        self.alpha_minus + self.alpha_plus
    }

    /// The additive constant C between the discriminator-optimal loss and the
    /// divergence: max_D L(G, D) = D_phi(P‖Q) + C.
    pub fn loss_offset(&self) -> f64 {
        let a = self.alpha();
        a * a.ln() + (2.0 - a) * (2.0 - a).ln() - 2.0 * LN_2
    }
}

/// Weights of the three-component mixtures P = sum beta_i P_i and
/// Q = sum gamma_i P_i with P_1 the restricted data distribution,
/// P_2 the generator and P_3 the redaction distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureCoefficients {
    pub beta: [f64; 3],
    pub gamma: [f64; 3],
}

impl MixtureCoefficients {
    /// Both triples sum to one and the ratios are ordered
    /// beta1/gamma1 > beta2/gamma2 = beta3/gamma3.
    fn check(&self) -> Result<()> {
        let bsum: f64 = self.beta.iter().sum();
        let gsum: f64 = self.gamma.iter().sum();
        if (bsum - 1.0).abs() > 1e-12 || (gsum - 1.0).abs() > 1e-12 {
            return Err(Error::NotADistribution {
                sum: if (bsum - 1.0).abs() > (gsum - 1.0).abs() {
                    bsum
                } else {
                    gsum
                },
            });
        }
        let r1 = self.beta[0] / self.gamma[0]; // +inf when gamma1 = 0 (alpha_plus = 1)
        let r2 = self.beta[1] / self.gamma[1];
        let r3 = self.beta[2] / self.gamma[2];
        let scale = r2.abs().max(1.0);
        if (r2 - r3).abs() > 1e-9 * scale || !(r1 > r2) {
            return Err(Error::InvalidParameter {
                name: "mixture ratio ordering",
                value: r1,
                constraint: "beta1/gamma1 > beta2/gamma2 = beta3/gamma3",
            });
        }
        Ok(())
    }
}

/// phi evaluated without domain checks; `a` is alpha. Near u = 1 the direct
/// form loses digits to cancellation between the two x·ln(x) terms, so the
/// expansion in d = u - 1 is used there:
/// phi(1+d) = a d ln(a/2) + a(1+d) ln1p(d) - (a d + 2) ln1p(a d / 2).
fn phi_raw(u: f64, a: f64) -> f64 {
    let d = u - 1.0;
    if d.abs() < 0.5 {
        a * d * (a / 2.0).ln() + a * (1.0 + d) * d.ln_1p() - (a * d + 2.0) * (a * d / 2.0).ln_1p()
    } else {
        let p = a * u;
        let q = a * u - a + 2.0;
        p * p.ln() - q * q.ln() - a * a.ln() + 2.0 * LN_2
    }
}

/// Continuous extension phi(0+) = -C, used for atoms with p = 0 < q.
fn phi_at_zero(a: f64) -> f64 {
    -(a * a.ln() + (2.0 - a) * (2.0 - a).ln() - 2.0 * LN_2)
}

/// The convex generator of the smoothed objective's divergence. phi(1) = 0.
pub fn phi(u: f64, params: &SmoothingParams) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::OutOfDomain {
            func: "phi",
            value: u,
            domain: "u > 0",
        });
    }
    Ok(phi_raw(u, params.alpha()))
}

/// Convex conjugate phi*(t) = sup_u (u t - phi(u)), finite for t < 0.
pub fn phi_conjugate(t: f64, params: &SmoothingParams) -> Result<f64> {
    if !(t < 0.0) {
        return Err(Error::OutOfDomain {
            func: "phi_conjugate",
            value: t,
            domain: "t < 0",
        });
    }
    let a = params.alpha();
    let x = t / a; // < 0
    // ln(1 - e^x) for x < 0, split to dodge cancellation on both ends.
    let log1mexp = if x > -LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    };
    Ok(-(2.0 - a) * log1mexp + params.loss_offset())
}

/// phi'(u) = a ln(a u / (a u - a + 2)); negative for every u > 0 since a < 2.
pub fn phi_prime(u: f64, params: &SmoothingParams) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::OutOfDomain {
            func: "phi_prime",
            value: u,
            domain: "u > 0",
        });
    }
    let a = params.alpha();
    Ok(a * ((a * u).ln() - (a * u - a + 2.0).ln()))
}

/// phi''(u) = a(2-a) / (u (a u - a + 2)), strictly positive: phi is convex.
pub fn phi_second(u: f64, params: &SmoothingParams) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::OutOfDomain {
            func: "phi_second",
            value: u,
            domain: "u > 0",
        });
    }
    let a = params.alpha();
    Ok(a * (2.0 - a) / (u * (a * u - a + 2.0)))
}

/// D_phi(P‖Q) = sum_x Q(x) phi(P(x)/Q(x)) on a shared finite support.
///
/// Atoms with p = q = 0 contribute zero; atoms with q = 0 < p violate
/// absolute continuity and are an error.
pub fn f_divergence(
    p: &crate::distributions::DiscreteDistribution,
    q: &crate::distributions::DiscreteDistribution,
    params: &SmoothingParams,
) -> Result<f64> {
    let (pp, qq) = (p.probs(), q.probs());
    if pp.len() != qq.len() {
        return Err(Error::SupportMismatch {
            left: pp.len(),
            right: qq.len(),
        });
    }
    let a = params.alpha();
    let mut total = 0.0;
    for (atom, (&pi, &qi)) in pp.iter().zip(qq.iter()).enumerate() {
        if qi == 0.0 {
            if pi > 0.0 {
                return Err(Error::AbsoluteContinuity { atom, p: pi });
            }
            continue;
        }
        total += if pi == 0.0 {
            qi * phi_at_zero(a)
        } else {
            qi * phi_raw(pi / qi, a)
        };
    }
    Ok(total)
}

/// psi(u) = phi(u)/u evaluated at beta3/gamma3 minus psi at
/// (1-beta3)/(1-gamma3). Nonnegative for all admissible parameters; this is
/// the inequality that forces the optimal generator onto the restricted data
/// distribution. Returns +inf when alpha_minus = 0 (beta3 = 0, and
/// phi(0+) > 0 so psi blows up), which keeps the inequality trivially true.
pub fn psi_gap(params: &SmoothingParams) -> f64 {
    let a = params.alpha();
    // computed directly so the degenerate corner (which breaks the strict
    // ratio ordering of MixtureCoefficients) stays evaluable
    let beta3 = params.alpha_minus * (1.0 - params.lambda) / a;
    let gamma3 = (1.0 - params.alpha_minus) * (1.0 - params.lambda) / (2.0 - a);
    let u1 = beta3 / gamma3;
    let u2 = (1.0 - beta3) / (1.0 - gamma3);
    if u1 == 0.0 {
        return f64::INFINITY;
    }
    phi_raw(u1, a) / u1 - phi_raw(u2, a) / u2
}

/// The triple weights beta_i, gamma_i of the mixtures P and Q.
pub fn mixture_coefficients(params: &SmoothingParams) -> MixtureCoefficients {
    params.mixture_coefficients()
}

impl SmoothingParams {
    pub fn mixture_coefficients(&self) -> MixtureCoefficients {
        let a = self.alpha();
        let (ap, am, l) = (self.alpha_plus, self.alpha_minus, self.lambda);
        let coeffs = MixtureCoefficients {
            beta: [ap / a, am * l / a, am * (1.0 - l) / a],
            gamma: [
                (1.0 - ap) / (2.0 - a),
                (1.0 - am) * l / (2.0 - a),
                (1.0 - am) * (1.0 - l) / (2.0 - a),
            ],
        };
        debug_assert!(coeffs.check().is_ok());
        coeffs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DiscreteDistribution;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn params(ap: f64, am: f64) -> SmoothingParams {
        SmoothingParams::new(ap, am, 0.8, 0.5).unwrap()
    }

    fn random_simplex(n: usize, rng: &mut ChaCha8Rng) -> DiscreteDistribution {
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        DiscreteDistribution::from_weights(&w).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(SmoothingParams::new(0.5, 0.1, 0.8, 0.5).is_err());
        assert!(SmoothingParams::new(1.01, 0.1, 0.8, 0.5).is_err());
        assert!(SmoothingParams::new(0.9, 0.5, 0.8, 0.5).is_err());
        assert!(SmoothingParams::new(0.9, -0.1, 0.8, 0.5).is_err());
        assert!(SmoothingParams::new(0.9, 0.1, 0.0, 0.5).is_err());
        assert!(SmoothingParams::new(0.9, 0.1, 1.0, 0.5).is_err());
        assert!(SmoothingParams::new(0.9, 0.1, 0.8, 1.0).is_err());
        let p = SmoothingParams::new(1.0, 0.0, 0.8, 0.5).unwrap();
        assert!(p.alpha() > 0.5 && p.alpha() < 1.5);
    }

    #[test]
    fn phi_at_one_is_zero() {
        for &(ap, am) in &[(0.9, 0.1), (1.0, 0.0), (0.95, 0.05), (0.6, 0.4), (0.51, 0.49)] {
            let p = params(ap, am);
            assert!(phi(1.0, &p).unwrap().abs() <= 1e-12, "ap={ap} am={am}");
        }
    }

    #[test]
    fn phi_convexity_spot_check() {
        let p = params(0.9, 0.1);
        let lhs = phi(0.5, &p).unwrap() + phi(1.5, &p).unwrap();
        assert!(lhs >= 2.0 * phi(1.0, &p).unwrap());
    }

    #[test]
    fn phi_matches_frozen_high_precision_value() {
        // Reference values from a 50-digit evaluation of the closed form.
        let p = params(0.95, 0.05);
        assert_relative_eq!(
            phi(2.0, &p).unwrap(),
            -0.52324814376454783652,
            max_relative = 1e-14
        );
        let p2 = params(0.9, 0.1);
        assert_relative_eq!(
            phi(0.5, &p2).unwrap(),
            0.43152310867767139116,
            max_relative = 1e-14
        );
    }

    #[test]
    fn phi_domain_errors() {
        let p = params(0.9, 0.1);
        assert!(phi(0.0, &p).is_err());
        assert!(phi(-1.0, &p).is_err());
        assert!(phi(f64::NAN, &p).is_err());
        assert!(phi_prime(0.0, &p).is_err());
        assert!(phi_conjugate(0.0, &p).is_err());
        assert!(phi_conjugate(1.0, &p).is_err());
    }

    #[test]
    fn phi_stable_and_direct_branches_agree() {
        let p = params(0.9, 0.1);
        for &u in &[0.5000001, 0.6, 1.4999999, 1.49, 0.51] {
            // straddle the branch cut at |u-1| = 0.5 by comparing both forms
            let a = p.alpha();
            let big = a * u;
            let small = a * u - a + 2.0;
            let direct = big * big.ln() - small * small.ln() - a * a.ln() + 2.0 * LN_2;
            assert_relative_eq!(phi(u, &p).unwrap(), direct, max_relative = 1e-11);
        }
    }

    #[test]
    fn conjugate_matches_frozen_high_precision_value() {
        let p = params(0.95, 0.05);
        assert_relative_eq!(
            phi_conjugate(-1.0, &p).unwrap(),
            -0.92761921573280872781,
            max_relative = 1e-14
        );
    }

    #[test]
    fn fenchel_identity() {
        let p = params(0.9, 0.1);
        for &u in &[0.25, 1.0, 4.0] {
            let t = phi_prime(u, &p).unwrap();
            let lhs = phi_conjugate(t, &p).unwrap();
            let rhs = u * t - phi(u, &p).unwrap();
            assert!((lhs - rhs).abs() <= 1e-9, "u={u}: {lhs} vs {rhs}");
        }
        // dense sweep over [0.1, 10]
        for i in 0..=200 {
            let u = 0.1 + i as f64 * (10.0 - 0.1) / 200.0;
            let t = phi_prime(u, &p).unwrap();
            let lhs = phi_conjugate(t, &p).unwrap() + phi(u, &p).unwrap();
            let rhs = u * t;
            assert!((lhs - rhs).abs() <= 1e-9, "u={u}");
        }
    }

    #[test]
    fn conjugate_at_phi_prime_of_one() {
        // phi*(phi'(1)) = 1*phi'(1) - phi(1) = phi'(1)
        let p = params(0.9, 0.1);
        let t = phi_prime(1.0, &p).unwrap();
        assert_relative_eq!(phi_conjugate(t, &p).unwrap(), t, max_relative = 1e-12);
    }

    #[test]
    fn phi_prime_at_one_and_monotone() {
        let p = params(0.9, 0.1);
        let a = p.alpha();
        assert_relative_eq!(
            phi_prime(1.0, &p).unwrap(),
            a * (a / 2.0).ln(),
            max_relative = 1e-14
        );
        assert!(phi_prime(2.0, &p).unwrap() > phi_prime(0.5, &p).unwrap());
        assert!(phi_prime(3.0, &p).unwrap() < 0.0);
    }

    #[test]
    fn phi_prime_matches_central_difference() {
        let p = params(0.9, 0.1);
        let h = 1e-5;
        for &u in &[0.5, 1.0, 2.0] {
            let fd = (phi(u + h, &p).unwrap() - phi(u - h, &p).unwrap()) / (2.0 * h);
            assert!((fd - phi_prime(u, &p).unwrap()).abs() <= 1e-6, "u={u}");
        }
    }

    #[test]
    fn phi_second_positive_and_matches_second_difference() {
        let p = params(0.9, 0.1);
        let h = 1e-4;
        for i in 1..40 {
            let u = 0.25 * i as f64;
            let analytic = phi_second(u, &p).unwrap();
            assert!(analytic > 0.0);
            let fd = (phi(u + h, &p).unwrap() - 2.0 * phi(u, &p).unwrap()
                + phi(u - h, &p).unwrap())
                / (h * h);
            assert!(
                (fd - analytic).abs() / analytic.abs() <= 1e-4,
                "u={u}: fd={fd} analytic={analytic}"
            );
        }
    }

    #[test]
    fn divergence_of_distribution_with_itself_is_zero() {
        let p = params(0.9, 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let d = random_simplex(6, &mut rng);
            assert!(f_divergence(&d, &d, &p).unwrap().abs() <= 1e-12);
        }
    }

    #[test]
    fn divergence_nonnegative_on_random_pairs() {
        let p = params(0.9, 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = random_simplex(8, &mut rng);
            let b = random_simplex(8, &mut rng);
            assert!(f_divergence(&a, &b, &p).unwrap() >= 0.0);
        }
    }

    #[test]
    fn divergence_zero_mass_atom_conventions() {
        let p = params(0.9, 0.1);
        // p = q = 0 on atom 2 contributes nothing
        let a = DiscreteDistribution::new(vec![0.5, 0.5, 0.0]).unwrap();
        let b = DiscreteDistribution::new(vec![0.25, 0.75, 0.0]).unwrap();
        assert!(f_divergence(&a, &b, &p).unwrap().is_finite());
        // q = 0 < p is an absolute-continuity error
        let c = DiscreteDistribution::new(vec![0.5, 0.25, 0.25]).unwrap();
        assert!(matches!(
            f_divergence(&c, &b, &p),
            Err(Error::AbsoluteContinuity { atom: 2, .. })
        ));
        // support mismatch
        let d = DiscreteDistribution::new(vec![0.5, 0.5]).unwrap();
        assert!(matches!(
            f_divergence(&d, &b, &p),
            Err(Error::SupportMismatch { .. })
        ));
    }

    #[test]
    fn variational_lower_bound_and_tightness() {
        let p = params(0.9, 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let dp = random_simplex(6, &mut rng);
            let dq = random_simplex(6, &mut rng);
            let div = f_divergence(&dp, &dq, &p).unwrap();

            // any bounded negative witness lower-bounds the divergence
            let t: Vec<f64> = (0..6).map(|_| -rng.random_range(0.01..3.0)).collect();
            let bound: f64 = dp
                .probs()
                .iter()
                .zip(t.iter())
                .map(|(&pi, &ti)| pi * ti)
                .sum::<f64>()
                - dq.probs()
                    .iter()
                    .zip(t.iter())
                    .map(|(&qi, &ti)| qi * phi_conjugate(ti, &p).unwrap())
                    .sum::<f64>();
            assert!(bound <= div + 1e-12);

            // equality at the optimal witness t = phi'(p/q)
            let tstar: Vec<f64> = dp
                .probs()
                .iter()
                .zip(dq.probs())
                .map(|(&pi, &qi)| phi_prime(pi / qi, &p).unwrap())
                .collect();
            let tight: f64 = dp
                .probs()
                .iter()
                .zip(tstar.iter())
                .map(|(&pi, &ti)| pi * ti)
                .sum::<f64>()
                - dq.probs()
                    .iter()
                    .zip(tstar.iter())
                    .map(|(&qi, &ti)| qi * phi_conjugate(ti, &p).unwrap())
                    .sum::<f64>();
            assert!((tight - div).abs() <= 1e-6, "tight={tight} div={div}");
        }
    }

    #[test]
    fn psi_gap_near_degenerate_corner() {
        let p = SmoothingParams::new(0.5 + 1e-9, 0.5 - 1e-9, 0.5, 0.5).unwrap();
        let gap = psi_gap(&p);
        assert!(gap.abs() <= 1e-6, "gap={gap}");
        // exactly at the corner (test-only constructor) the gap vanishes
        let corner = SmoothingParams::new_unchecked(0.5, 0.5, 0.5, 0.5);
        assert!(psi_gap(&corner).abs() <= 1e-12);
    }

    #[test]
    fn psi_gap_positive_in_interior() {
        let p = SmoothingParams::new(0.9, 0.1, 0.8, 0.5).unwrap();
        assert!(psi_gap(&p) > 0.0);
    }

    #[test]
    fn psi_gap_grid_sweep() {
        let mut checked = 0usize;
        for am10 in 0..=4u32 {
            for ap10 in 6..=10u32 {
                for l10 in 1..=9u32 {
                    let p = SmoothingParams::new(
                        ap10 as f64 / 10.0,
                        am10 as f64 / 10.0,
                        l10 as f64 / 10.0,
                        0.5,
                    )
                    .unwrap();
                    assert!(psi_gap(&p) >= -1e-9, "{p:?}");
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 5 * 5 * 9);
    }

    #[test]
    fn mixture_coefficients_examples() {
        // no smoothing puts all P-mass on data
        let p = SmoothingParams::new(1.0, 0.0, 0.5, 0.5).unwrap();
        let c = mixture_coefficients(&p);
        assert_eq!(c.beta, [1.0, 0.0, 0.0]);

        let p = SmoothingParams::new(0.9, 0.1, 0.5, 0.5).unwrap();
        let c = mixture_coefficients(&p);
        assert_relative_eq!(c.beta[0], 0.9, max_relative = 1e-12);
        assert_relative_eq!(c.beta[1], 0.05, max_relative = 1e-12);
        assert_relative_eq!(c.beta[2], 0.05, max_relative = 1e-12);
    }

    #[test]
    fn mixture_coefficients_sum_and_ordering_on_random_params() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let p = SmoothingParams::new(
                rng.random_range(0.50001..=1.0),
                rng.random_range(0.0..0.49999),
                rng.random_range(0.001..0.999),
                0.5,
            )
            .unwrap();
            let c = mixture_coefficients(&p);
            assert!((c.beta.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            assert!((c.gamma.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            assert!(c.check().is_ok());
        }
    }
}
