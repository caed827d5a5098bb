//! Tanh-sinh quadrature for Beta-type integrals on `[0, 1]`.
//!
//! The integrand is `x^(p-1) (1 - x^n)^(m/n - 1)`, which has algebraic
//! singularities at `x = 0` when `p < 1` and at `x = 1` when `m < n`. With the
//! map `x = (1 + tanh(pi/2 sinh t)) / 2` both endpoint singularities are
//! flattened into double-exponentially decaying tails.
//!
//! Every node carries `log x` and `log(1 - x)` computed directly from `t`, so
//! the distance to either endpoint is known to full relative precision even
//! when it is far below machine epsilon. The integrand and the weight are
//! combined in the log domain.
//!
//! Reduction identity, checked numerically by [`reduction_check`]:
//!
//! ```text
//! int_0^1 x^(a+2b-1) / sqrt(1 - x^(2b)) dx = a/(a+b) int_0^1 x^(a-1) / sqrt(1 - x^(2b)) dx
//! ```
//!
//! For `a = b = 1` both sides equal `pi/4` (left: `int x^2 / sqrt(1-x^2)`).

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::identities::IdentityReport;
use crate::real::Real;
use crate::stepproducts::check_positive;

/// Default relative tolerance.
pub const DEFAULT_REL_TOL: f64 = 1e-11;

/// Tightest accepted relative tolerance.
pub const MIN_REL_TOL: f64 = 1e-14;

/// Default number of step-halving levels after the first.
pub const DEFAULT_MAX_LEVELS: usize = 12;

/// Levels that must be completed before the convergence test is trusted.
const MIN_LEVELS: usize = 3;

/// Largest `pi/2 sinh t` covered by the node tables.
const MAX_INNER_ARGUMENT: f64 = 1.0e5;

/// Integrand-times-weight magnitude (log) at which the tails are cut.
const TAIL_LOG_DECAY: f64 = 50.0;

/// `int_0^1 x^(p-1) (1 - x^n)^(m/n - 1) dx` with `p, m, n > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaIntegralSpec<T> {
    pub p: T,
    pub m: T,
    pub n: T,
}

impl<T: Real> BetaIntegralSpec<T> {
    pub fn new(p: T, m: T, n: T) -> Result<Self> {
        check_positive("p", p)?;
        check_positive("m", m)?;
        check_positive("n", n)?;
        Ok(Self { p, m, n })
    }

    /// `int x^(s-1) / sqrt(1 - x^(2b))`.
    pub fn half_power(s: T, b: T) -> Result<Self> {
        Self::new(s, b, T::lit(2.0) * b)
    }

    /// The same integral after `t = x^n`, i.e. `(1/n) int t^(p/n-1) (1-t)^(m/n-1)`.
    pub fn substituted(&self) -> Self {
        Self {
            p: self.p / self.n,
            m: self.m / self.n,
            n: T::one(),
        }
    }

    /// `log` of the integrand given `log x` and `log(1-x)`.
    fn log_integrand(&self, node: &Side<T>) -> T {
        let one = T::one();
        let log_one_minus_xn = if node.x <= T::lit(0.5) {
            (-(self.n * node.ln_x).exp_m1()).ln()
        } else if node.c < T::min_positive_value().sqrt() {
            // 1 - x^n = n c (1 + O(c))
            self.n.ln() + node.ln_c
        } else {
            (-(self.n * (-node.c).ln_1p()).exp_m1()).ln()
        };
        let mut acc = T::zero();
        if self.p != one {
            acc = acc + (self.p - one) * node.ln_x;
        }
        let q = self.m / self.n - one;
        if q != T::zero() {
            acc = acc + q * log_one_minus_xn;
        }
        acc
    }

    /// Largest `t` whose nodes can still contribute.
    fn tail_cut(&self) -> T {
        let decay = (self.p).min(self.m / self.n);
        let u = T::lit(TAIL_LOG_DECAY) / (T::lit(2.0) * decay);
        let u = u.min(T::lit(MAX_INNER_ARGUMENT));
        (T::lit(2.0) * u / T::PI()).asinh()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub levels_used: usize,
    pub node_count: usize,
}

/// One abscissa seen from one side: `x`, `c = 1 - x` and their logs.
#[derive(Debug, Clone, Copy)]
struct Side<T> {
    x: T,
    c: T,
    ln_x: T,
    ln_c: T,
}

#[derive(Debug, Clone, Copy)]
struct Node<T> {
    t: T,
    /// Abscissa for `+t`; the mirror `-t` swaps `x` and `c`.
    right: Side<T>,
    /// `log(pi cosh t x c)`, the log of `dx/dt`.
    ln_weight: T,
}

impl<T: Real> Node<T> {
    fn at(t: T) -> Self {
        let u = T::FRAC_PI_2() * t.sinh();
        let e = (-(u + u)).exp();
        let l = e.ln_1p();
        let ln_x = -l;
        let ln_c = -(u + u) - l;
        let right = Side {
            x: ln_x.exp(),
            c: ln_c.exp(),
            ln_x,
            ln_c,
        };
        Self {
            t,
            right,
            ln_weight: (T::PI() * t.cosh()).ln() + ln_x + ln_c,
        }
    }

    fn left(&self) -> Side<T> {
        Side {
            x: self.right.c,
            c: self.right.x,
            ln_x: self.right.ln_c,
            ln_c: self.right.ln_x,
        }
    }
}

/// Tanh-sinh rule with lazily built, immutable node tables per level.
///
/// Level 0 has step 1 and nodes `0, 1, 2, ...`; level `l` adds the odd
/// multiples of `2^-l`.
#[derive(Debug)]
pub struct TanhSinh<T> {
    levels: Vec<OnceLock<Vec<Node<T>>>>,
    t_max: T,
}

impl<T: Real> Default for TanhSinh<T> {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_LEVELS)
    }
}

impl<T: Real> TanhSinh<T> {
    pub fn new(max_levels: usize) -> Self {
        Self {
            levels: (0..=max_levels).map(|_| OnceLock::new()).collect(),
            t_max: (T::lit(2.0 * MAX_INNER_ARGUMENT) / T::PI()).asinh(),
        }
    }

    pub fn max_levels(&self) -> usize {
        self.levels.len() - 1
    }

    fn level(&self, l: usize) -> &[Node<T>] {
        self.levels[l].get_or_init(|| {
            let h = T::lit(0.5).powi(l as i32);
            let (first, stride) = if l == 0 { (0usize, 1usize) } else { (1, 2) };
            (first..)
                .step_by(stride)
                .map(|i| T::of_usize(i) * h)
                .take_while(|&t| t <= self.t_max)
                .map(Node::at)
                .collect()
        })
    }

    /// Integrates a Beta-type spec to relative tolerance `rel_tol`.
    pub fn integrate(&self, spec: &BetaIntegralSpec<T>, rel_tol: T) -> Result<QuadratureResult<T>> {
        if rel_tol.is_nan() || rel_tol < T::lit(MIN_REL_TOL) {
            return Err(Error::invalid(
                "rel_tol",
                format!("must be >= {MIN_REL_TOL:e}, got {rel_tol}"),
            ));
        }
        let t_cut = spec.tail_cut();
        let eps = T::epsilon();

        let mut sum = T::zero();
        let mut abs_sum = T::zero();
        let mut nodes = 0usize;
        let mut previous: Option<T> = None;
        let mut estimate = T::zero();
        let mut error = T::infinity();

        for l in 0..self.levels.len() {
            let h = T::lit(0.5).powi(l as i32);
            for node in self.level(l) {
                if node.t > t_cut {
                    break;
                }
                let sides: &[Side<T>] = if node.t == T::zero() {
                    &[node.right][..]
                } else {
                    &[node.right, node.left()][..]
                };
                for side in sides {
                    let contrib = (node.ln_weight + spec.log_integrand(side)).exp();
                    if contrib.is_finite() {
                        sum = sum + contrib;
                        abs_sum = abs_sum + contrib.abs();
                    }
                    nodes += 1;
                }
            }
            estimate = h * sum;
            if let Some(prev) = previous {
                error = (estimate - prev).abs();
                let floor = T::lit(16.0) * eps * h * abs_sum;
                if l >= MIN_LEVELS && error <= (rel_tol * estimate.abs()).max(floor) {
                    return Ok(QuadratureResult {
                        value: estimate,
                        error_estimate: error,
                        levels_used: l + 1,
                        node_count: nodes,
                    });
                }
            }
            previous = Some(estimate);
        }
        Err(Error::NonConvergence {
            levels: self.levels.len(),
            estimate: estimate.as_f64(),
            error_estimate: error.as_f64(),
        })
    }
}

/// Process-wide rule for the scalar `T`; its tables are built once and shared.
pub fn rule_for<T: Real>() -> &'static TanhSinh<T> {
    static RULES: OnceLock<Mutex<HashMap<TypeId, &'static (dyn Any + Send + Sync)>>> = OnceLock::new();
    let mut map = RULES
        .get_or_init(|| Mutex::new(HashMap::new()))
        .lock()
        .unwrap_or_else(|e| e.into_inner());
    let entry = *map
        .entry(TypeId::of::<T>())
        .or_insert_with(|| Box::leak(Box::new(TanhSinh::<T>::default())));
    entry.downcast_ref().expect("rule stored under its own type id")
}

/// Shared `f64` rule.
pub fn shared_rule() -> &'static TanhSinh<f64> {
    static RULE: OnceLock<&'static TanhSinh<f64>> = OnceLock::new();
    RULE.get_or_init(rule_for::<f64>)
}

pub fn tanh_sinh_integrate<T: Real>(spec: &BetaIntegralSpec<T>, rel_tol: T) -> Result<QuadratureResult<T>> {
    rule_for::<T>().integrate(spec, rel_tol)
}

/// Same integral through the substitution `t = x^n`: an independent route.
pub fn tanh_sinh_integrate_substituted<T: Real>(
    spec: &BetaIntegralSpec<T>,
    rel_tol: T,
) -> Result<QuadratureResult<T>> {
    let mut r = rule_for::<T>().integrate(&spec.substituted(), rel_tol)?;
    r.value = r.value / spec.n;
    r.error_estimate = r.error_estimate / spec.n;
    Ok(r)
}

/// `P = int x^(a+b-1)/sqrt(1-x^(2b))` and `Q = int x^(a-1)/sqrt(1-x^(2b))`.
pub fn pq_pair<T: Real>(a: T, b: T, rel_tol: T) -> Result<(QuadratureResult<T>, QuadratureResult<T>)> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    let rule = rule_for::<T>();
    let p = rule.integrate(&BetaIntegralSpec::half_power(a + b, b)?, rel_tol)?;
    let q = rule.integrate(&BetaIntegralSpec::half_power(a, b)?, rel_tol)?;
    Ok((p, q))
}

/// Checks `int x^(a+2b-1)/sqrt(1-x^(2b)) = a/(a+b) int x^(a-1)/sqrt(1-x^(2b))`
/// by quadrature on both sides. Passes at relative residual
/// `max(10 rel_tol, 1e-10)`.
pub fn reduction_check(a: f64, b: f64, rel_tol: f64) -> IdentityReport {
    let name = "reduction I(a+2b) = a/(a+b) I(a)";
    let tolerance = (10.0 * rel_tol).max(1e-10);
    let sides = || -> Result<(f64, f64)> {
        check_positive("a", a)?;
        check_positive("b", b)?;
        let rule = shared_rule();
        let lhs = rule.integrate(&BetaIntegralSpec::half_power(a + 2.0 * b, b)?, rel_tol)?;
        let q = rule.integrate(&BetaIntegralSpec::half_power(a, b)?, rel_tol)?;
        Ok((lhs.value, a / (a + b) * q.value))
    };
    let report = match sides() {
        Ok((lhs, rhs)) => IdentityReport::compare(name, lhs, rhs, tolerance),
        Err(e) => IdentityReport::failed(name, tolerance, e.to_string()),
    };
    report
        .with_meta("a", a)
        .with_meta("b", b)
        .with_meta("rel_tol", rel_tol)
        .with_meta("form", "int x^(a+2b-1)/sqrt(1-x^(2b)) = a/(a+b) int x^(a-1)/sqrt(1-x^(2b))")
}
