//! Simplified dynamical system for the per-round decay of invalid mass under
//! a fixed query budget.
//!
//! The invalid mass splits into an easy part and a hard part, and each round
//! with T queries multiplies them by
//!
//! ```text
//! m_easy' = m_easy * (1 - xi_easy(T) * m_ratio)
//! m_hard' = m_hard * (1 - xi_hard(T) * (1 - m_ratio))
//! ```
//!
//! with m_ratio = m_easy / (m_easy + m_hard). The per-round total-mass ratio
//! is sandwiched between 1 - xi_easy(T) and 1 - xi_e xi_h / (xi_e + xi_h),
//! and with R = budget / T rounds the best T per query budget solves a
//! stationarity equation for either bound; both are found here by bisection.

use crate::error::{Error, Result};

/// A saturating response curve: the fraction of a mass class that one round
/// of T queries removes. Must start at zero, increase, and flatten.
pub trait XiCurve {
    fn value(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;
}

/// xi(T) = c * tanh(T / tau0) with c in (0, 1], tau0 > 0.
///
/// Satisfies xi(0) = 0, xi' > 0, and xi'' < 0 for T > 0, while keeping the
/// early response steep enough that the per-query decay-rate objectives below
/// have interior optima (a pure exponential saturation does not: its
/// stationarity function is positive everywhere, pushing the optimum to
/// T -> 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saturating {
    scale: f64,
    timescale: f64,
}

impl Saturating {
    pub fn new(scale: f64, timescale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale <= 1.0) {
            return Err(Error::InvalidParameter {
                name: "scale",
                value: scale,
                constraint: "c in (0, 1]",
            });
        }
        if !(timescale > 0.0) {
            return Err(Error::InvalidParameter {
                name: "timescale",
                value: timescale,
                constraint: "tau0 > 0",
            });
        }
        Ok(Self { scale, timescale })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn timescale(&self) -> f64 {
        self.timescale
    }
}

impl XiCurve for Saturating {
    fn value(&self, t: f64) -> f64 {
        self.scale * (t / self.timescale).tanh()
    }

    fn derivative(&self, t: f64) -> f64 {
        let sech = 1.0 / (t / self.timescale).cosh();
        self.scale / self.timescale * sech * sech
    }
}

/// The easy/hard pair of response curves. Construction enforces
/// c_e/tau_e >= c_h/tau_h and tau_e >= tau_h, which for this family is
/// equivalent to xi_easy'(T) >= xi_hard'(T) for all T >= 0 (and hence
/// xi_easy >= xi_hard). Equality is allowed; the sandwich bounds then
/// coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiFamily {
    pub easy: Saturating,
    pub hard: Saturating,
}

impl XiFamily {
    pub fn new(easy: Saturating, hard: Saturating) -> Result<Self> {
        let slope_e = easy.scale / easy.timescale;
        let slope_h = hard.scale / hard.timescale;
        if slope_e < slope_h || easy.timescale < hard.timescale {
            return Err(Error::InvalidParameter {
                name: "xi family",
                value: slope_e - slope_h,
                constraint: "c_e/tau_e >= c_h/tau_h and tau_e >= tau_h",
            });
        }
        Ok(Self { easy, hard })
    }

    /// Defaults used by the demo sweeps.
    pub fn defaults() -> Self {
        Self::new(
            Saturating::new(0.9, 500.0).expect("valid"),
            Saturating::new(0.45, 400.0).expect("valid"),
        )
        .expect("defaults satisfy the ordering")
    }

    /// The harmonic combination xi_e xi_h / (xi_e + xi_h) of the upper bound.
    pub fn upper_combination(&self, t: f64) -> f64 {
        let xe = self.easy.value(t);
        let xh = self.hard.value(t);
        if xe + xh == 0.0 {
            return 0.0;
        }
        xe * xh / (xe + xh)
    }

    /// d/dT of the harmonic combination:
    /// (xi_e' xi_h^2 + xi_h' xi_e^2) / (xi_e + xi_h)^2.
    pub fn upper_combination_derivative(&self, t: f64) -> f64 {
        let xe = self.easy.value(t);
        let xh = self.hard.value(t);
        let s = xe + xh;
        if s == 0.0 {
            // limit T -> 0: harmonic mean of the slopes over two
            let de = self.easy.derivative(t);
            let dh = self.hard.derivative(t);
            return de * dh / (de + dh);
        }
        (self.easy.derivative(t) * xh * xh + self.hard.derivative(t) * xe * xe) / (s * s)
    }
}

/// Checks the response-curve conditions for an arbitrary curve by closed-form
/// derivative agreement with central differences, positivity of the slope and
/// concavity via second differences, on a log-spaced grid up to `t_max`.
pub fn check_xi_conditions(curve: &dyn XiCurve, t_max: f64, n_grid: usize) -> Result<()> {
    if curve.value(0.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter {
            name: "xi(0)",
            value: curve.value(0.0),
            constraint: "xi(0) = 0",
        });
    }
    let lo = (t_max * 1e-6).max(1e-9);
    for k in 0..n_grid {
        let t = lo * (t_max / lo).powf(k as f64 / (n_grid - 1) as f64);
        let v = curve.value(t);
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter {
                name: "xi",
                value: v,
                constraint: "xi in [0, 1]",
            });
        }
        let d = curve.derivative(t);
        if !(d > 0.0) {
            return Err(Error::InvalidParameter {
                name: "xi'",
                value: d,
                constraint: "xi' > 0",
            });
        }
        // finite differences cannot resolve slopes deep in saturation, where
        // the curve is flat to machine precision
        if d > 1e-8 {
            let h = (t * 1e-5).max(1e-9);
            let fd = (curve.value(t + h) - curve.value(t - h)) / (2.0 * h);
            if (fd - d).abs() > 1e-4 * d.abs() {
                return Err(Error::InvalidParameter {
                    name: "xi' (finite difference)",
                    value: fd,
                    constraint: "matches the closed-form derivative",
                });
            }
        }
        let h2 = (t * 1e-3).max(1e-6);
        let second =
            (curve.value(t + h2) - 2.0 * curve.value(t) + curve.value(t - h2)) / (h2 * h2);
        if second > 1e-7 {
            return Err(Error::InvalidParameter {
                name: "xi''",
                value: second,
                constraint: "xi'' < 0 for T > 0",
            });
        }
    }
    Ok(())
}

/// Easy/hard invalid masses. Both lie in [0, 1] with sum at most 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsState {
    m_easy: f64,
    m_hard: f64,
}

impl DynamicsState {
    /// Initial states additionally require m_easy > m_hard (the boundary
    /// condition of the system); later iterates may cross.
    pub fn new(m_easy: f64, m_hard: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m_easy) || !(0.0..=1.0).contains(&m_hard) {
            return Err(Error::InvalidParameter {
                name: "mass",
                value: if (0.0..=1.0).contains(&m_easy) {
                    m_hard
                } else {
                    m_easy
                },
                constraint: "in [0, 1]",
            });
        }
        if m_easy + m_hard > 1.0 {
            return Err(Error::InvalidParameter {
                name: "m_easy + m_hard",
                value: m_easy + m_hard,
                constraint: "<= 1",
            });
        }
        if !(m_easy > m_hard) {
            return Err(Error::InvalidParameter {
                name: "m_easy",
                value: m_easy,
                constraint: "m_easy > m_hard at initialization",
            });
        }
        Ok(Self { m_easy, m_hard })
    }

    fn raw(m_easy: f64, m_hard: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&m_easy) && (0.0..=1.0).contains(&m_hard));
        Self { m_easy, m_hard }
    }

    pub fn m_easy(&self) -> f64 {
        self.m_easy
    }

    pub fn m_hard(&self) -> f64 {
        self.m_hard
    }

    /// Total invalid mass.
    pub fn invalidity(&self) -> f64 {
        self.m_easy + self.m_hard
    }
}

/// One round with T queries.
pub fn step(state: &DynamicsState, xi: &XiFamily, t: f64) -> Result<DynamicsState> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            constraint: "T >= 0",
        });
    }
    let total = state.invalidity();
    if total == 0.0 {
        return Ok(*state);
    }
    let ratio = state.m_easy / total;
    let eta_easy = 1.0 - xi.easy.value(t) * ratio;
    let eta_hard = 1.0 - xi.hard.value(t) * (1.0 - ratio);
    Ok(DynamicsState::raw(
        state.m_easy * eta_easy,
        state.m_hard * eta_hard,
    ))
}

/// Runs `rounds` steps and returns the full trajectory (length rounds + 1).
pub fn simulate(
    state0: &DynamicsState,
    xi: &XiFamily,
    t: f64,
    rounds: usize,
) -> Result<Vec<DynamicsState>> {
    let mut out = Vec::with_capacity(rounds + 1);
    out.push(*state0);
    let mut state = *state0;
    for _ in 0..rounds {
        state = step(&state, xi, t)?;
        out.push(state);
    }
    Ok(out)
}

/// A stationarity root T* with its residual and the per-query objective.
#[derive(Debug, Clone, Copy)]
pub struct OptimalT {
    pub t_star: f64,
    /// |g(T*)| of the stationarity function.
    pub residual: f64,
    /// (1/T*) log(1 - curve(T*)): per-query decay-rate bound at the root.
    pub objective: f64,
    /// budget / T*, the matching number of rounds.
    pub rounds: f64,
}

/// Per-query decay exponent of the lower bound, (1/T) log(1 - xi_easy(T)).
pub fn lower_objective(curve: &dyn XiCurve, t: f64) -> f64 {
    (1.0 - curve.value(t)).ln() / t
}

/// Per-query decay exponent of the upper bound.
pub fn upper_objective(xi: &XiFamily, t: f64) -> f64 {
    (1.0 - xi.upper_combination(t)).ln() / t
}

/// Stationarity function g(T) = -T v'(T) - (1 - v(T)) log(1 - v(T)) for a
/// decay curve v; its root is the interior optimum of log(1 - v(T))/T.
fn stationarity<V, D>(value: &V, deriv: &D, t: f64) -> f64
where
    V: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let v = value(t);
    -t * deriv(t) - (1.0 - v) * (-v).ln_1p()
}

fn bisect_stationarity<V, D>(value: V, deriv: D, budget: f64) -> Result<OptimalT>
where
    V: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if !(budget > 0.0) {
        return Err(Error::InvalidParameter {
            name: "budget",
            value: budget,
            constraint: "budget > 0",
        });
    }
    let t_max = budget;
    let t_min = (budget * 1e-6).max(1e-9);
    let g = |t: f64| stationarity(&value, &deriv, t);

    // scan a log-spaced grid for the sign change (negative -> nonnegative)
    const SCAN: usize = 400;
    let mut lo = t_min;
    let mut g_lo = g(lo);
    let mut bracket = None;
    for k in 1..=SCAN {
        let hi = t_min * (t_max / t_min).powf(k as f64 / SCAN as f64);
        let g_hi = g(hi);
        if g_lo < 0.0 && g_hi >= 0.0 {
            bracket = Some((lo, hi, g_lo, g_hi));
            break;
        }
        lo = hi;
        g_lo = g_hi;
    }
    let (mut lo, mut hi, g_lo, g_hi) = bracket.ok_or(Error::NoRootInBracket {
        lo: t_min,
        hi: t_max,
        g_lo: g(t_min),
        g_hi: g(t_max),
    })?;
    debug_assert!(g_lo < 0.0 && g_hi >= 0.0);

    // bisection down to f64 resolution
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_star = if g(lo).abs() < g(hi).abs() { lo } else { hi };
    Ok(OptimalT {
        t_star,
        residual: g(t_star).abs(),
        objective: (1.0 - value(t_star)).ln() / t_star,
        rounds: budget / t_star,
    })
}

/// Optimal queries-per-round from the lower (fastest-decay) bound:
/// argmin over (0, budget] of (1/T) log(1 - xi_easy(T)).
pub fn optimal_t_lower(curve: &dyn XiCurve, budget: f64) -> Result<OptimalT> {
    bisect_stationarity(|t| curve.value(t), |t| curve.derivative(t), budget)
}

/// Optimal queries-per-round from the upper (worst-case) bound, with the
/// harmonic combination in place of xi_easy.
pub fn optimal_t_upper(xi: &XiFamily, budget: f64) -> Result<OptimalT> {
    bisect_stationarity(
        |t| xi.upper_combination(t),
        |t| xi.upper_combination_derivative(t),
        budget,
    )
}
