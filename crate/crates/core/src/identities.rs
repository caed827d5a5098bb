//! Numerical verification of the step-product identities, as structured
//! residual reports.
//!
//! Every check yields an [`IdentityReport`]; a sub-computation that fails
//! (for example a quadrature that does not converge) produces a failed report
//! carrying a `cause` entry instead of aborting.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;
use crate::eulermaclaurin::{constants_abc, em_log_sum_with_threshold, EmExpansion};
use crate::interpolation::{gamma_half, half_index_k, k_by_quadrature, theta_half, value_at};
use crate::quadrature::{pq_pair, reduction_check, rule_for, BetaIntegralSpec, DEFAULT_REL_TOL};
use crate::stepproducts::{
    duplication_split, k_squared_product, log_finite_product, pq_partial_product, shift_ratio, BetaRatioSpec,
    FormKind, DEFAULT_PRODUCT_TERMS,
};

/// Version tag of the JSON report layout.
pub const SCHEMA: &str = "stepfact/1";

/// Magnitude above which both sides are compared through their logarithms.
pub const LOG_DOMAIN_THRESHOLD: f64 = 1e30;

pub const DUPLICATION_TOL: f64 = 1e-12;
/// Duplication tolerance for more than [`DUPLICATION_TIGHT_COUNT`] factors.
pub const DUPLICATION_LONG_TOL: f64 = 1e-11;
pub const DUPLICATION_TIGHT_COUNT: u64 = 100;
pub const MAX_DUPLICATION_COUNT: u64 = 10_000;
pub const CONSTANT_RELATION_TOL: f64 = 1e-8;
pub const HALF_PRODUCT_TOL: f64 = 1e-9;
pub const PRODUCT_TOL: f64 = 1e-8;
pub const ROUTE_TOL: f64 = 1e-8;
pub const EM_TOL: f64 = 1e-11;
/// Integer indices at which the expansion is compared with direct sums.
pub const EM_CHECK_POINTS: [u64; 3] = [10, 20, 40];
/// Smallest `z/step` accepted by the direct closed-form comparison. The
/// truncation error there is still far below [`EM_TOL`].
pub const EM_CHECK_THRESHOLD: f64 = 8.0;
/// Slack applied to the constant fitted at the smallest `N` of a shift-limit run.
pub const SHIFT_FIT_SLACK: f64 = 2.0;
/// Bound `ALPHA_SPREAD_CONSTANT / N` on the spread of shift ratios across `alpha`.
pub const ALPHA_SPREAD_CONSTANT: f64 = 10.0;

/// One identity evaluated numerically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default)]
    pub metadata: BTreeMap<String, Value>,
}

fn within(abs: f64, lhs: f64, rhs: f64, tolerance: f64) -> bool {
    abs <= tolerance * lhs.abs().max(rhs.abs()).max(1.0)
}

impl IdentityReport {
    /// Compares two values. When both exceed [`LOG_DOMAIN_THRESHOLD`] in
    /// magnitude the residuals are those of their logarithms.
    pub fn compare(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        if lhs.abs() > LOG_DOMAIN_THRESHOLD && rhs.abs() > LOG_DOMAIN_THRESHOLD {
            let d = (lhs.abs().ln() - rhs.abs().ln()).abs();
            let same_sign = lhs.signum() == rhs.signum();
            return Self {
                name: name.into(),
                lhs,
                rhs,
                abs_residual: d,
                rel_residual: d,
                tolerance,
                pass: same_sign && d <= tolerance,
                metadata: BTreeMap::new(),
            }
            .with_meta("domain", "log");
        }
        let abs = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs());
        let rel = if scale > 0.0 { abs / scale } else { 0.0 };
        Self {
            name: name.into(),
            lhs,
            rhs,
            abs_residual: abs,
            rel_residual: rel,
            tolerance,
            pass: within(abs, lhs, rhs, tolerance),
            metadata: BTreeMap::new(),
        }
    }

    /// Compares two logarithms; both sides are stored as given.
    pub fn compare_log(name: impl Into<String>, log_lhs: f64, log_rhs: f64, tolerance: f64) -> Self {
        Self::compare_unscaled(name, log_lhs, log_rhs, tolerance).with_meta("domain", "log")
    }

    fn compare_unscaled(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let abs = (lhs - rhs).abs();
        let scale = lhs.abs().max(rhs.abs());
        Self {
            name: name.into(),
            lhs,
            rhs,
            abs_residual: abs,
            rel_residual: if scale > 0.0 { abs / scale } else { 0.0 },
            tolerance,
            pass: within(abs, lhs, rhs, tolerance),
            metadata: BTreeMap::new(),
        }
    }

    /// A report for a check whose inputs could not be computed.
    pub fn failed(name: impl Into<String>, tolerance: f64, cause: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            lhs: f64::NAN,
            rhs: f64::NAN,
            abs_residual: f64::INFINITY,
            rel_residual: f64::INFINITY,
            tolerance,
            pass: false,
            metadata: BTreeMap::new(),
        }
        .with_meta("cause", cause.into())
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_owned(), value.into());
        self
    }

    fn from_result(name: &str, tolerance: f64, r: Result<Self>) -> Self {
        r.unwrap_or_else(|e| Self::failed(name, tolerance, e.to_string()))
    }

    fn sort_key(&self) -> (String, String) {
        (self.name.clone(), serde_json::to_string(&self.metadata).unwrap_or_default())
    }
}

fn with_ab(r: IdentityReport, a: f64, b: f64) -> IdentityReport {
    r.with_meta("a", a).with_meta("b", b)
}

/// `Gamma(2N) = Delta(N) Theta(N)`, compared in the log domain.
pub fn verify_duplication(a: f64, b: f64, count: u64) -> IdentityReport {
    let name = "duplication Gamma(2N) = Delta(N) Theta(N)";
    let tol = if count <= DUPLICATION_TIGHT_COUNT {
        DUPLICATION_TOL
    } else {
        DUPLICATION_LONG_TOL
    };
    let r = (|| {
        if count > MAX_DUPLICATION_COUNT {
            return Err(crate::error::Error::invalid(
                "count",
                format!("must be <= {MAX_DUPLICATION_COUNT}, got {count}"),
            ));
        }
        let s = duplication_split(a, b, count)?;
        Ok(IdentityReport::compare_log(name, s.log_gamma_2n, s.log_delta_n + s.log_theta_n, tol))
    })();
    with_ab(IdentityReport::from_result(name, tol, r), a, b).with_meta("count", count)
}

/// The four relations between `A`, `B`, `C` and `k`:
/// `A sqrt(e) = B C`, `B = C k sqrt(e)`, `C = sqrt(A/k)`, `B = sqrt(k A e)`.
pub fn verify_constant_relations(a: f64, b: f64) -> Vec<IdentityReport> {
    let names = [
        "constants A sqrt(e) = B C",
        "constants B = C k sqrt(e)",
        "constants C = sqrt(A/k)",
        "constants B = sqrt(k A e)",
    ];
    let tol = CONSTANT_RELATION_TOL;
    let reports: Vec<IdentityReport> = match constants_abc(a, b).and_then(|c| Ok((c, k_by_quadrature(a, b, DEFAULT_REL_TOL)?))) {
        Ok((c, k)) => {
            let (ca, cb, cc) = (c.a_const(), c.b_const(), c.c_const());
            let se = 0.5_f64.exp();
            vec![
                IdentityReport::compare(names[0], ca * se, cb * cc, tol),
                IdentityReport::compare(names[1], cb, cc * k * se, tol),
                IdentityReport::compare(names[2], cc, (ca / k).sqrt(), tol),
                IdentityReport::compare(names[3], cb, (k * ca * se * se).sqrt(), tol),
            ]
            .into_iter()
            .map(|r| {
                r.with_meta("A", ca)
                    .with_meta("B", cb)
                    .with_meta("C", cc)
                    .with_meta("k", k)
                    .with_meta("precision_warning", c.precision_warning)
            })
            .collect()
        }
        Err(e) => names
            .iter()
            .map(|n| IdentityReport::failed(*n, tol, e.to_string()))
            .collect(),
    };
    reports.into_iter().map(|r| with_ab(r, a, b)).collect()
}

/// `Delta(1/2) Theta(1/2) = a`, both half-index values by quadrature.
pub fn verify_half_product(a: f64, b: f64) -> IdentityReport {
    let name = "half index Delta(1/2) Theta(1/2) = a";
    let r = (|| {
        let k = k_by_quadrature(a, b, DEFAULT_REL_TOL)?;
        let t = theta_half(a, b)?;
        Ok(IdentityReport::compare(name, k * t, a, HALF_PRODUCT_TOL)
            .with_meta("delta_half", k)
            .with_meta("theta_half", t))
    })();
    with_ab(IdentityReport::from_result(name, HALF_PRODUCT_TOL, r), a, b)
}

/// Accelerated Beta-ratio product against the quadrature ratio `P/Q` with
/// `P = int x^(p-1)(1-x^n)^(m/n-1)`, `Q` likewise with `q`.
pub fn verify_pq_product(spec: &BetaRatioSpec<f64>) -> IdentityReport {
    let name = "product P/Q = prod (q+jn)(m+p+jn)/((p+jn)(m+q+jn))";
    let r = (|| {
        let trace = pq_partial_product(spec, DEFAULT_PRODUCT_TERMS)?;
        let rule = rule_for::<f64>();
        let p = rule.integrate(&BetaIntegralSpec::new(spec.p, spec.m, spec.n)?, DEFAULT_REL_TOL)?;
        let q = rule.integrate(&BetaIntegralSpec::new(spec.q, spec.m, spec.n)?, DEFAULT_REL_TOL)?;
        Ok(
            IdentityReport::compare(name, trace.accelerated_value, p.value / q.value, PRODUCT_TOL)
                .with_meta("terms", trace.terms_used)
                .with_meta("tail_estimate", trace.tail_estimate),
        )
    })();
    IdentityReport::from_result(name, PRODUCT_TOL, r)
        .with_meta("p", spec.p)
        .with_meta("q", spec.q)
        .with_meta("m", spec.m)
        .with_meta("n", spec.n)
}

/// `k^2` as a Wallis-type product against `a P / Q`.
pub fn verify_k_squared(a: f64, b: f64) -> IdentityReport {
    let name = "k squared product = a P/Q";
    let r = (|| {
        let trace = k_squared_product(a, b, DEFAULT_PRODUCT_TERMS)?;
        let (p, q) = pq_pair(a, b, DEFAULT_REL_TOL)?;
        Ok(
            IdentityReport::compare(name, trace.accelerated_value, a * p.value / q.value, PRODUCT_TOL)
                .with_meta("tail_estimate", trace.tail_estimate),
        )
    })();
    with_ab(IdentityReport::from_result(name, PRODUCT_TOL, r), a, b)
}

/// Product and Euler-Maclaurin values of `k` against the quadrature value.
pub fn verify_half_index_routes(a: f64, b: f64) -> Vec<IdentityReport> {
    let names = ["half index k product route", "half index k em route"];
    let reports = match half_index_k(a, b) {
        Ok(r) => {
            let reference = r.k_quadrature;
            [r.k_product, r.k_em]
                .into_iter()
                .zip(names)
                .map(|(v, name)| match (v, reference) {
                    (Some(v), Some(k)) => IdentityReport::compare(name, v, k, ROUTE_TOL),
                    _ => IdentityReport::failed(name, ROUTE_TOL, format!("{:?}", r.errors)),
                })
                .map(|rep| rep.with_meta("max_spread", r.max_spread))
                .collect()
        }
        Err(e) => names
            .iter()
            .map(|n| IdentityReport::failed(*n, ROUTE_TOL, e.to_string()))
            .collect::<Vec<_>>(),
    };
    reports.into_iter().map(|r| with_ab(r, a, b)).collect()
}

/// `Gamma(1/2)` by quadrature against the Euler-Maclaurin value.
pub fn verify_gamma_half(a: f64, b: f64) -> IdentityReport {
    let name = "half index Gamma(1/2) quadrature = em";
    let r = (|| {
        let q = gamma_half(a, b)?;
        let e = value_at(FormKind::Gamma, a, b, 0.5)?;
        Ok(IdentityReport::compare(name, q, e, ROUTE_TOL))
    })();
    with_ab(IdentityReport::from_result(name, ROUTE_TOL, r), a, b)
}

/// Closed form plus extracted constant against direct log sums at
/// [`EM_CHECK_POINTS`], for all three forms.
pub fn verify_em(a: f64, b: f64) -> Vec<IdentityReport> {
    let mut out = Vec::new();
    for form in FormKind::ALL {
        let name = format!("euler-maclaurin {form} closed form = log sum");
        let expansion = form.sequence(a, b).and_then(EmExpansion::new);
        for &x in &EM_CHECK_POINTS {
            let r = expansion.as_ref().map_err(Clone::clone).and_then(|e| {
                let s = em_log_sum_with_threshold(e.sequence(), x as f64, e.settings().max_order, EM_CHECK_THRESHOLD)?;
                let direct = log_finite_product(e.sequence(), x);
                Ok(IdentityReport::compare_log(&name, s.value + e.log_constant(), direct, EM_TOL)
                    .with_meta("truncation_error_estimate", s.truncation_error_estimate))
            });
            out.push(with_ab(IdentityReport::from_result(&name, EM_TOL, r), a, b).with_meta("x", x));
        }
        let name = format!("euler-maclaurin {form} x = 1 gives first factor");
        let r = expansion.as_ref().map_err(Clone::clone).and_then(|e| {
            let v = e.log_interpolated(1.0)?;
            Ok(IdentityReport::compare_log(&name, v, e.sequence().start().ln(), 1e-10))
        });
        out.push(with_ab(IdentityReport::from_result(&name, 1e-10, r), a, b));
    }
    out
}

/// `Delta(N + n) / (Delta(N) (alpha + 2bN)^n) -> 1` with residual `<= C/N`.
///
/// `C` is fitted per `alpha` at the smallest `N` and widened by
/// [`SHIFT_FIT_SLACK`]; the fitted value is recorded as `fitted_c`.
pub fn verify_shift_limit(a: f64, b: f64, n: u32, alphas: &[f64], big_ns: &[u64]) -> Vec<IdentityReport> {
    let name = "shift limit Delta(N+n) = (alpha + 2bN)^n Delta(N)";
    let seq = match FormKind::Delta.sequence(a, b) {
        Ok(s) => s,
        Err(e) => return vec![with_ab(IdentityReport::failed(name, 0.0, e.to_string()), a, b)],
    };
    let Some(&n_min) = big_ns.iter().min() else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for &alpha in alphas {
        let residual = |big_n: u64| shift_ratio(&seq, big_n, f64::from(n), alpha).map(|r| (r - 1.0).abs());
        let fitted_c = match residual(n_min) {
            Ok(r0) => SHIFT_FIT_SLACK * r0 * n_min as f64,
            Err(e) => {
                out.push(with_ab(IdentityReport::failed(name, 0.0, e.to_string()), a, b).with_meta("alpha", alpha));
                continue;
            }
        };
        for &big_n in big_ns {
            let tol = fitted_c / big_n as f64;
            let rep = match residual(big_n) {
                Ok(r) => IdentityReport::compare_unscaled(name, r, 0.0, tol),
                Err(e) => IdentityReport::failed(name, tol, e.to_string()),
            };
            out.push(
                with_ab(rep, a, b)
                    .with_meta("alpha", alpha)
                    .with_meta("N", big_n)
                    .with_meta("shift", n)
                    .with_meta("fitted_c", fitted_c),
            );
        }
    }
    out
}

/// Shift ratios for different `alpha` agree within
/// `ALPHA_SPREAD_CONSTANT / N` relative. The spread scales like
/// `n (max alpha - min alpha) / (2bN)`, so this holds only for moderate
/// parameter ratios.
pub fn verify_alpha_independence(a: f64, b: f64, n: u32, alphas: &[f64], big_n: u64) -> IdentityReport {
    let name = "shift limit independent of alpha";
    let tol = ALPHA_SPREAD_CONSTANT / big_n as f64;
    let r = (|| {
        let seq = FormKind::Delta.sequence(a, b)?;
        let ratios = alphas
            .iter()
            .map(|&al| shift_ratio(&seq, big_n, f64::from(n), al))
            .collect::<Result<Vec<_>>>()?;
        let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(IdentityReport::compare(name, hi, lo, tol))
    })();
    with_ab(IdentityReport::from_result(name, tol, r), a, b)
        .with_meta("N", big_n)
        .with_meta("shift", n)
}

/// Parameters of a verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub name: String,
    /// Points per axis of the log-spaced `(a, b)` grid.
    pub grid_points: usize,
    pub lo: f64,
    pub hi: f64,
    pub duplication_counts: Vec<u64>,
    pub shift: u32,
    pub shift_ns: Vec<u64>,
    /// Parameter pairs for the alpha-independence check.
    pub alpha_pairs: Vec<(f64, f64)>,
    pub include_reduction: bool,
    pub rel_tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            name: "default".into(),
            grid_points: 6,
            lo: 0.25,
            hi: 8.0,
            duplication_counts: vec![5, 25, 100],
            shift: 3,
            shift_ns: vec![1_000, 10_000, 100_000],
            alpha_pairs: vec![(1.0, 1.0), (2.0, 1.0)],
            include_reduction: true,
            rel_tol: DEFAULT_REL_TOL,
        }
    }
}

impl SuiteConfig {
    /// Log-spaced grid values; endpoints exact.
    pub fn axis(&self) -> Vec<f64> {
        log_grid(self.lo, self.hi, self.grid_points)
    }

    pub fn grid(&self) -> Vec<(f64, f64)> {
        let axis = self.axis();
        axis.iter().flat_map(|&a| axis.iter().map(move |&b| (a, b))).collect()
    }
}

/// `points` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi / lo).ln() / (points - 1) as f64;
            (0..points)
                .map(|i| if i + 1 == points { hi } else { lo * (step * i as f64).exp() })
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub pass: usize,
    pub fail: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub suite: String,
    pub reports: Vec<IdentityReport>,
    pub summary: SuiteSummary,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityReport> {
        self.reports.iter().filter(|r| !r.pass)
    }
}

fn grid_point_reports(config: &SuiteConfig, a: f64, b: f64) -> Vec<IdentityReport> {
    let mut out: Vec<IdentityReport> = config
        .duplication_counts
        .iter()
        .map(|&c| verify_duplication(a, b, c))
        .collect();
    out.extend(verify_constant_relations(a, b));
    out.push(verify_half_product(a, b));
    out.extend(verify_half_index_routes(a, b));
    out.push(verify_gamma_half(a, b));
    out.push(verify_k_squared(a, b));
    match BetaRatioSpec::from_step_pair(a, b) {
        Ok(spec) => out.push(with_ab(verify_pq_product(&spec), a, b)),
        Err(e) => out.push(IdentityReport::failed("product P/Q", PRODUCT_TOL, e.to_string())),
    }
    out.extend(verify_em(a, b));
    out.extend(verify_shift_limit(a, b, config.shift, &[0.0, a, a + b], &config.shift_ns));
    if config.include_reduction {
        out.push(reduction_check(a, b, config.rel_tol));
    }
    out
}

/// Runs every check over the grid. Reports are sorted by name and metadata, so
/// the output does not depend on scheduling.
pub fn run_suite(config: &SuiteConfig) -> SuiteReport {
    let mut reports: Vec<IdentityReport> = config
        .grid()
        .par_iter()
        .flat_map_iter(|&(a, b)| grid_point_reports(config, a, b))
        .collect();
    if let Some(&big_n) = config.shift_ns.iter().max() {
        for &(a, b) in &config.alpha_pairs {
            reports.push(verify_alpha_independence(a, b, config.shift, &[0.0, a, a + b], big_n));
        }
    }
    reports.sort_by_cached_key(IdentityReport::sort_key);
    let pass = reports.iter().filter(|r| r.pass).count();
    SuiteReport {
        schema: SCHEMA.into(),
        suite: config.name.clone(),
        summary: SuiteSummary {
            pass,
            fail: reports.len() - pass,
        },
        reports,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn report_rules() {
        let r = IdentityReport::compare("x", 1.0, 1.0 + 1e-10, 1e-9);
        assert!(r.pass);
        assert!((r.rel_residual - 1e-10).abs() < 1e-15);
        assert!(!IdentityReport::compare("x", 100.0, 100.1, 1e-6).pass);
        // small magnitudes fall back to the absolute residual
        assert!(IdentityReport::compare("x", 1e-12, 2e-12, 1e-9).pass);
        let big = IdentityReport::compare("x", 1e40, 1e40 * (1.0 + 1e-13), 1e-12);
        assert!(big.pass);
        assert_eq!(big.metadata["domain"], "log");
        let f = IdentityReport::failed("x", 1e-9, "boom");
        assert!(!f.pass && f.metadata["cause"] == "boom");
    }

    #[test]
    fn duplication_examples() {
        let r = verify_duplication(1.0, 1.0, 2);
        assert!(r.pass);
        assert!((r.lhs - 24f64.ln()).abs() < 1e-14);
        assert!(verify_duplication(0.7, 2.2, 25).pass);
        let r = verify_duplication(5.0, 0.3, 1000);
        assert!(r.pass && r.tolerance == DUPLICATION_LONG_TOL);
        assert!(!verify_duplication(1.0, 1.0, MAX_DUPLICATION_COUNT + 1).pass);
    }

    #[test]
    fn constant_relations_at_unit_parameters() {
        let rs = verify_constant_relations(1.0, 1.0);
        assert_eq!(rs.len(), 4);
        for r in &rs {
            assert!(r.pass, "{r:?}");
            assert!(r.rel_residual < 1e-9);
        }
        let a = rs[0].metadata["A"].as_f64().unwrap();
        assert!((a - (2.0 * PI).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn half_product_examples() {
        let r = verify_half_product(1.0, 1.0);
        assert!(r.pass && (r.lhs - 1.0).abs() < 1e-12);
        let r = verify_half_product(3.0, 0.5);
        assert!(r.pass && (r.lhs - 3.0).abs() < 3e-9);
        assert!(!verify_half_product(-1.0, 1.0).pass);
    }

    #[test]
    fn pq_product_examples() {
        let r = verify_pq_product(&BetaRatioSpec::new(2.0, 1.0, 1.0, 2.0).unwrap());
        assert!(r.pass, "{r:?}");
        assert!((r.rhs - 2.0 / PI).abs() < 1e-12);
        assert!(verify_pq_product(&BetaRatioSpec::new(3.0, 2.0, 1.0, 2.0).unwrap()).pass);
        // m = n: regular integrand, P/Q = q/p
        let r = verify_pq_product(&BetaRatioSpec::new(1.5, 0.5, 2.0, 2.0).unwrap());
        assert!(r.pass && (r.rhs - 0.5 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn route_and_em_reports() {
        for r in verify_half_index_routes(1.0, 1.0) {
            assert!(r.pass, "{r:?}");
        }
        assert!(verify_gamma_half(1.0, 1.0).pass);
        assert!(verify_k_squared(2.0, 1.0).pass);
        let em = verify_em(0.5, 2.0);
        assert_eq!(em.len(), 12);
        assert!(em.iter().all(|r| r.pass), "{em:?}");
    }

    #[test]
    fn shift_limit_reports() {
        let rs = verify_shift_limit(1.0, 1.0, 3, &[0.0, 1.0, 2.0], &[1_000, 10_000, 100_000]);
        assert_eq!(rs.len(), 9);
        assert!(rs.iter().all(|r| r.pass), "{rs:?}");
        assert!(rs.iter().all(|r| r.metadata.contains_key("fitted_c")));
        assert!(verify_alpha_independence(1.0, 1.0, 3, &[0.0, 1.0, 2.0], 100_000).pass);
        // the spread grows with a/b
        assert!(!verify_alpha_independence(8.0, 0.25, 3, &[0.0, 8.0, 8.25], 100_000).pass);
    }

    #[test]
    fn small_suite_is_sorted_and_deterministic() {
        let config = SuiteConfig {
            name: "small".into(),
            grid_points: 2,
            lo: 0.5,
            hi: 2.0,
            ..SuiteConfig::default()
        };
        let r1 = run_suite(&config);
        let r2 = run_suite(&config);
        assert_eq!(serde_json::to_string(&r1).unwrap(), serde_json::to_string(&r2).unwrap());
        assert!(r1.all_pass(), "{:?}", r1.failures().collect::<Vec<_>>());
        assert_eq!(r1.summary.pass, r1.reports.len());
        let keys: Vec<_> = r1.reports.iter().map(IdentityReport::sort_key).collect();
        assert!(keys.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn grid_axis() {
        let g = log_grid(0.25, 8.0, 6);
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], 0.25);
        assert_eq!(g[5], 8.0);
        assert!((g[1] / g[0] - 32f64.powf(0.2)).abs() < 1e-12);
    }
}
