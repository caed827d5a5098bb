//! Step-factorial products at half-integer and general real indices.
//!
//! The half-index value of the Delta form, `k = Delta(1/2)`, is available by
//! three independent routes:
//!
//! * quadrature: `k = sqrt(a P / Q)` with the Beta-type integrals of
//!   [`crate::quadrature::pq_pair`];
//! * product: the Wallis-type product for `k^2`, extrapolated;
//! * Euler-Maclaurin: the closed form of [`crate::eulermaclaurin`] at `x = 1/2`.
//!
//! The quadrature route is exact up to integration error and serves as the
//! reference value. From `k` the whole family follows:
//! `Delta(n + 1/2) = k (a+b)(a+3b)...(a+(2n-1)b)`, and `Delta(1/2) Theta(1/2) = a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eulermaclaurin::{EmExpansion, EmSettings, DEFAULT_MAX_ORDER};
use crate::quadrature::{rule_for, BetaIntegralSpec, TanhSinh, DEFAULT_REL_TOL};
use crate::real::{compensated_sum, Real};
use crate::stepproducts::{check_positive, k_squared_product, FormKind, StepSequence, DEFAULT_PRODUCT_TERMS};

/// Tunables shared by the half-index routes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfIndexSettings<T> {
    pub rel_tol: T,
    pub product_terms: usize,
    pub max_order: usize,
}

impl<T: Real> Default for HalfIndexSettings<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(DEFAULT_REL_TOL),
            product_terms: DEFAULT_PRODUCT_TERMS,
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    Quadrature,
    Product,
    Em,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteError {
    pub route: Route,
    pub message: String,
}

/// `Delta(1/2)` from the three routes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfIndexResult<T> {
    pub a: T,
    pub b: T,
    pub k_quadrature: Option<T>,
    pub k_product: Option<T>,
    pub k_em: Option<T>,
    /// Reference value: quadrature when available, else product, else EM.
    pub consensus: T,
    /// Largest pairwise relative difference among the available routes.
    pub max_spread: T,
    pub errors: Vec<RouteError>,
}

impl<T: Real> HalfIndexResult<T> {
    pub fn routes(&self) -> impl Iterator<Item = (Route, T)> + '_ {
        [
            (Route::Quadrature, self.k_quadrature),
            (Route::Product, self.k_product),
            (Route::Em, self.k_em),
        ]
        .into_iter()
        .filter_map(|(r, v)| v.map(|v| (r, v)))
    }
}

fn sqrt_ratio<T: Real>(
    rule: &TanhSinh<T>,
    scale: T,
    numer: BetaIntegralSpec<T>,
    denom: BetaIntegralSpec<T>,
    rel_tol: T,
) -> Result<T> {
    let n = rule.integrate(&numer, rel_tol)?;
    let d = rule.integrate(&denom, rel_tol)?;
    Ok((scale * n.value / d.value).sqrt())
}

/// `k = sqrt(a P / Q)` by quadrature.
pub fn k_by_quadrature<T: Real>(a: T, b: T, rel_tol: T) -> Result<T> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    sqrt_ratio(
        rule_for::<T>(),
        a,
        BetaIntegralSpec::half_power(a + b, b)?,
        BetaIntegralSpec::half_power(a, b)?,
        rel_tol,
    )
}

pub fn half_index_k<T: Real>(a: T, b: T) -> Result<HalfIndexResult<T>> {
    half_index_k_with(a, b, &HalfIndexSettings::default())
}

pub fn half_index_k_with<T: Real>(a: T, b: T, settings: &HalfIndexSettings<T>) -> Result<HalfIndexResult<T>> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    let half = T::lit(0.5);

    let quadrature = k_by_quadrature(a, b, settings.rel_tol);
    let product = k_squared_product(a, b, settings.product_terms).map(|t| t.accelerated_value.sqrt());
    let em = FormKind::Delta
        .sequence(a, b)
        .and_then(|s| EmExpansion::with_settings(s, EmSettings::default().with_max_order(settings.max_order)))
        .and_then(|e| e.log_interpolated(half))
        .map(T::exp);

    let mut errors = Vec::new();
    let mut keep = |route: Route, r: Result<T>| match r {
        Ok(v) => Some(v),
        Err(e) => {
            errors.push(RouteError {
                route,
                message: e.to_string(),
            });
            None
        }
    };
    let k_quadrature = keep(Route::Quadrature, quadrature);
    let k_product = keep(Route::Product, product);
    let k_em = keep(Route::Em, em);

    let consensus = k_quadrature
        .or(k_product)
        .or(k_em)
        .ok_or_else(|| Error::invalid("a, b", format!("every route failed: {errors:?}")))?;
    let values: Vec<T> = [k_quadrature, k_product, k_em].into_iter().flatten().collect();
    let mut max_spread = T::zero();
    for (i, &u) in values.iter().enumerate() {
        for &v in &values[i + 1..] {
            max_spread = max_spread.max((u - v).abs() / u.abs().max(v.abs()));
        }
    }
    Ok(HalfIndexResult {
        a,
        b,
        k_quadrature,
        k_product,
        k_em,
        consensus,
        max_spread,
        errors,
    })
}

/// `Delta(n + 1/2) = k (a+b)(a+3b)...(a+(2n-1)b)` with `k` from quadrature.
pub fn half_shifted_delta<T: Real>(a: T, b: T, n: u32) -> Result<T> {
    Ok(log_half_shifted_delta(a, b, n)?.exp())
}

pub fn log_half_shifted_delta<T: Real>(a: T, b: T, n: u32) -> Result<T> {
    let k = k_by_quadrature(a, b, T::lit(DEFAULT_REL_TOL))?;
    let factors = compensated_sum((1..=n).map(|j| (a + T::from_u32(2 * j - 1).unwrap() * b).ln()));
    Ok(k.ln() + factors)
}

/// `Gamma(1/2) = sqrt(a int x^(a+b/2-1)/sqrt(1-x^b) / int x^(a-1)/sqrt(1-x^b))`.
pub fn gamma_half<T: Real>(a: T, b: T) -> Result<T> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    let half_b = T::lit(0.5) * b;
    sqrt_ratio(
        rule_for::<T>(),
        a,
        BetaIntegralSpec::half_power(a + half_b, half_b)?,
        BetaIntegralSpec::half_power(a, half_b)?,
        T::lit(DEFAULT_REL_TOL),
    )
}

/// `Theta(1/2) = sqrt((a+b) int x^(a+2b-1)/sqrt(1-x^(2b)) / int x^(a+b-1)/sqrt(1-x^(2b)))`.
pub fn theta_half<T: Real>(a: T, b: T) -> Result<T> {
    check_positive("a", a)?;
    check_positive("b", b)?;
    let two = T::lit(2.0);
    sqrt_ratio(
        rule_for::<T>(),
        a + b,
        BetaIntegralSpec::half_power(a + two * b, b)?,
        BetaIntegralSpec::half_power(a + b, b)?,
        T::lit(DEFAULT_REL_TOL),
    )
}

/// `log` of the selected form at real index `x > 0`.
pub fn log_value_at<T: Real>(form: FormKind, a: T, b: T, x: T) -> Result<T> {
    let seq = form.sequence(a, b)?;
    EmExpansion::new(seq)?.log_interpolated(x)
}

/// Value of the selected form at real index `x > 0`.
pub fn value_at<T: Real>(form: FormKind, a: T, b: T, x: T) -> Result<T> {
    Ok(log_value_at(form, a, b, x)?.exp())
}

/// Gauss-type limit
/// `Pi(N) z(N)^x / prod_{j<N} (start + (x+j) step)`, `z(N) = start - step + step N`,
/// as an independent definition of the interpolated value. Converges `O(1/N)`.
/// Returned in the log domain.
pub fn gauss_limit_oracle_log<T: Real>(seq: &StepSequence<T>, x: T, big_n: u64) -> Result<T> {
    if !(x.is_finite() && x > T::zero()) {
        return Err(Error::invalid("x", format!("must be finite and > 0, got {x}")));
    }
    if big_n == 0 {
        return Err(Error::invalid("big_n", "must be >= 1"));
    }
    let n = T::from_u64(big_n).unwrap();
    let xs = x * seq.step();
    // log(start + j step) - log(start + (x+j) step) = -ln_1p(x step / (start + j step))
    let ratio = compensated_sum((0..big_n).map(|j| -(xs / seq.term(T::from_u64(j).unwrap())).ln_1p()));
    let z = seq.start() - seq.step() + seq.step() * n;
    Ok(ratio + x * z.ln())
}

pub fn gauss_limit_oracle<T: Real>(seq: &StepSequence<T>, x: T, big_n: u64) -> Result<T> {
    Ok(gauss_limit_oracle_log(seq, x, big_n)?.exp())
}
