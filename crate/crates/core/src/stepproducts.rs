//! Finite step-factorial products and Wallis-type infinite products.
//!
//! Three product families are built from a pair `(a, b)`:
//!
//! | form  | factors                         | sequence        |
//! |-------|---------------------------------|-----------------|
//! | Gamma | `a (a+b) (a+2b) ...`            | `(a, b)`        |
//! | Delta | `a (a+2b) (a+4b) ...`           | `(a, 2b)`       |
//! | Theta | `(a+b) (a+3b) (a+5b) ...`       | `(a+b, 2b)`     |
//!
//! Regrouping the even and odd positioned factors gives the exact duplication
//! identity `Gamma(2N) = Delta(N) * Theta(N)`.
//!
//! Long products are evaluated in the log domain. Infinite products whose
//! factors behave like `1 + c/j^2` converge at `O(1/N)`; their log partial
//! products have a smooth expansion in `1/N`, so iterated Richardson
//! extrapolation over step-doubled term counts recovers the limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{compensated_sum, NeumaierSum, Real};

/// Default number of factors used for accelerated infinite products.
pub const DEFAULT_PRODUCT_TERMS: usize = 1 << 16;

/// Smallest term count that enters Richardson extrapolation.
pub const MIN_ACCELERATION_TERMS: usize = 4;

/// Maximum number of doubling levels combined by [`accelerate`] in a trace.
pub const MAX_ACCELERATION_LEVELS: usize = 6;

/// Arithmetic factor family `start, start + step, start + 2 step, ...`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSequence<T> {
    start: T,
    step: T,
}

impl<T: Real> StepSequence<T> {
    pub fn new(start: T, step: T) -> Result<Self> {
        check_positive("start", start)?;
        check_positive("step", step)?;
        Ok(Self { start, step })
    }

    pub fn start(&self) -> T {
        self.start
    }

    pub fn step(&self) -> T {
        self.step
    }

    /// Factor with zero-based (possibly fractional) position `m`.
    #[inline]
    pub fn term(&self, m: T) -> T {
        self.start + m * self.step
    }

    /// `start / step`, the offset of the equivalent Pochhammer symbol.
    pub fn offset(&self) -> T {
        self.start / self.step
    }
}

pub(crate) fn check_positive<T: Real>(name: &'static str, v: T) -> Result<()> {
    if !(v.is_finite() && v > T::zero()) {
        return Err(Error::invalid(name, format!("must be finite and > 0, got {v}")));
    }
    Ok(())
}

/// The three product forms generated by `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormKind {
    Gamma,
    Delta,
    Theta,
}

impl FormKind {
    pub const ALL: [FormKind; 3] = [FormKind::Gamma, FormKind::Delta, FormKind::Theta];

    pub fn sequence<T: Real>(self, a: T, b: T) -> Result<StepSequence<T>> {
        check_positive("a", a)?;
        check_positive("b", b)?;
        let two = T::lit(2.0);
        match self {
            FormKind::Gamma => StepSequence::new(a, b),
            FormKind::Delta => StepSequence::new(a, two * b),
            FormKind::Theta => StepSequence::new(a + b, two * b),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FormKind::Gamma => "gamma",
            FormKind::Delta => "delta",
            FormKind::Theta => "theta",
        }
    }
}

impl std::fmt::Display for FormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameters of the Beta-ratio product
/// `prod_j (q+jn)(m+p+jn) / ((p+jn)(m+q+jn))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaRatioSpec<T> {
    pub p: T,
    pub q: T,
    pub m: T,
    pub n: T,
}

impl<T: Real> BetaRatioSpec<T> {
    pub fn new(p: T, q: T, m: T, n: T) -> Result<Self> {
        check_positive("p", p)?;
        check_positive("q", q)?;
        check_positive("m", m)?;
        check_positive("n", n)?;
        Ok(Self { p, q, m, n })
    }

    /// The instance `q = a, p = a+b, m = b, n = 2b` whose limit is `P/Q` for
    /// the step pair `(a, b)`.
    pub fn from_step_pair(a: T, b: T) -> Result<Self> {
        check_positive("a", a)?;
        check_positive("b", b)?;
        Self::new(a + b, a, b, T::lit(2.0) * b)
    }

    /// Factor with index `j` (zero based).
    pub fn factor(&self, j: usize) -> T {
        self.log_factor(j).exp()
    }

    /// `log` of the factor with index `j`, written as a sum of `ln_1p` terms so
    /// that factors close to one keep full relative precision.
    pub fn log_factor(&self, j: usize) -> T {
        let pj = self.p + T::of_usize(j) * self.n;
        // (q+jn)/(p+jn) = 1 + d/(p+jn) and (m+p+jn)/(m+q+jn) = 1 / (1 + d/(m+p+jn))
        let d = self.q - self.p;
        (d / pj).ln_1p() - (d / (self.m + pj)).ln_1p()
    }
}

/// Partial products of an infinite product together with the extrapolated limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialProductTrace<T> {
    pub terms_used: usize,
    /// Term counts at which `raw_partials` were recorded (ascending, each the
    /// double of the previous).
    pub checkpoints: Vec<usize>,
    /// Log partial products at `checkpoints`.
    pub raw_partials: Vec<T>,
    /// Extrapolated limit (linear domain).
    pub accelerated_value: T,
    /// Extrapolated limit (log domain).
    pub accelerated_log: T,
    /// Estimated error of `accelerated_log`, i.e. a relative error bound on
    /// `accelerated_value`.
    pub tail_estimate: T,
}

impl<T: Real> PartialProductTrace<T> {
    /// Raw partial product after `terms_used` factors (linear domain).
    pub fn raw_value(&self) -> T {
        self.raw_partials
            .last()
            .copied()
            .map(T::exp)
            .unwrap_or_else(T::one)
    }

    /// Multiplies every value in the trace by `factor > 0`.
    fn scaled(mut self, factor: T) -> Self {
        let lf = factor.ln();
        for v in &mut self.raw_partials {
            *v = *v + lf;
        }
        self.accelerated_log = self.accelerated_log + lf;
        self.accelerated_value = self.accelerated_log.exp();
        self
    }
}

/// `prod_{m=0}^{count-1} (start + m step)` in the linear domain.
///
/// Returns [`Error::Overflow`] when the running product leaves the finite range.
pub fn finite_product<T: Real>(seq: &StepSequence<T>, count: u64) -> Result<T> {
    let mut acc = T::one();
    for m in 0..count {
        acc = acc * seq.term(T::from_u64(m).unwrap());
        if !acc.is_finite() {
            return Err(Error::Overflow { count });
        }
    }
    Ok(acc)
}

/// `sum_{m=0}^{count-1} log(start + m step)` with compensated summation.
pub fn log_finite_product<T: Real>(seq: &StepSequence<T>, count: u64) -> T {
    compensated_sum((0..count).map(|m| seq.term(T::from_u64(m).unwrap()).ln()))
}

/// Log values of `Gamma(2N)`, `Delta(N)` and `Theta(N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DuplicationSplit<T> {
    pub count: u64,
    pub log_gamma_2n: T,
    pub log_delta_n: T,
    pub log_theta_n: T,
}

impl<T: Real> DuplicationSplit<T> {
    /// `log Gamma(2N) - log Delta(N) - log Theta(N)`.
    pub fn residual(&self) -> T {
        self.log_gamma_2n - self.log_delta_n - self.log_theta_n
    }
}

pub fn duplication_split<T: Real>(a: T, b: T, count: u64) -> Result<DuplicationSplit<T>> {
    let gamma = FormKind::Gamma.sequence(a, b)?;
    let delta = FormKind::Delta.sequence(a, b)?;
    let theta = FormKind::Theta.sequence(a, b)?;
    Ok(DuplicationSplit {
        count,
        log_gamma_2n: log_finite_product(&gamma, 2 * count),
        log_delta_n: log_finite_product(&delta, count),
        log_theta_n: log_finite_product(&theta, count),
    })
}

/// `Pi(N + shift) / (Pi(N) (alpha + step N)^shift)` for an integer `shift`.
///
/// Tends to one like `O(1/N)` for every finite `alpha`.
pub fn shift_ratio<T: Real>(seq: &StepSequence<T>, big_n: u64, shift: T, alpha: T) -> Result<T> {
    if big_n == 0 {
        return Err(Error::invalid("big_n", "must be >= 1"));
    }
    if !(shift.is_finite() && shift >= T::zero() && shift.fract() == T::zero()) {
        return Err(Error::invalid(
            "shift",
            format!("must be a non-negative integer, got {shift}; fractional shifts belong to interpolation"),
        ));
    }
    if !(alpha.is_finite() && alpha >= T::zero()) {
        return Err(Error::invalid("alpha", format!("must be finite and >= 0, got {alpha}")));
    }
    let n = T::from_u64(big_n).ok_or_else(|| Error::invalid("big_n", "not representable"))?;
    let base = alpha + seq.step() * n;
    let count = shift.to_u64().unwrap_or(0);
    // term(N + j) / base = 1 + (start - alpha + j step) / base
    let log_ratio = compensated_sum((0..count).map(|j| {
        let excess = seq.start() - alpha + T::from_u64(j).unwrap() * seq.step();
        (excess / base).ln_1p()
    }));
    Ok(log_ratio.exp())
}

/// Iterated Richardson extrapolation of log partials taken at step-doubled
/// term counts (`N, 2N, 4N, ...`), assuming an error expansion in powers of
/// `1/N`.
///
/// Returns `(limit, tail_estimate)`; the estimate is the distance between the
/// two highest-order diagonal entries of the tableau.
pub fn accelerate<T: Real>(log_partials: &[T]) -> Result<(T, T)> {
    if log_partials.len() < 4 {
        return Err(Error::invalid(
            "log_partials",
            format!("need at least 4 partials, got {}", log_partials.len()),
        ));
    }
    let two = T::lit(2.0);
    let mut prev: Vec<T> = log_partials.to_vec();
    let mut diagonal = vec![prev[prev.len() - 1]];
    let mut factor = T::one();
    while prev.len() > 1 {
        factor = factor * two;
        let next: Vec<T> = prev
            .windows(2)
            .map(|w| (factor * w[1] - w[0]) / (factor - T::one()))
            .collect();
        diagonal.push(next[next.len() - 1]);
        prev = next;
    }
    let value = diagonal[diagonal.len() - 1];
    let tail = (value - diagonal[diagonal.len() - 2]).abs();
    Ok((value, tail))
}

fn checkpoints(terms: usize) -> Vec<usize> {
    let mut out = vec![terms];
    let mut n = terms;
    while n.is_multiple_of(2) && n > 1 {
        n /= 2;
        out.push(n);
    }
    out.reverse();
    out
}

fn trace_from_log_factors<T: Real>(terms: usize, log_factor: impl Fn(usize) -> T) -> PartialProductTrace<T> {
    let marks = checkpoints(terms);
    let mut raw = Vec::with_capacity(marks.len());
    let mut acc = NeumaierSum::new();
    let mut next = 0;
    for j in 0..terms {
        acc.add(log_factor(j));
        if j + 1 == marks[next] {
            raw.push(acc.total());
            next += 1;
        }
    }

    let usable: Vec<T> = marks
        .iter()
        .zip(&raw)
        .filter(|(&n, _)| n >= MIN_ACCELERATION_TERMS)
        .map(|(_, &v)| v)
        .collect();
    let usable = &usable[usable.len().saturating_sub(MAX_ACCELERATION_LEVELS)..];

    let last = raw[raw.len() - 1];
    let (accelerated_log, tail_estimate) = match accelerate(usable) {
        Ok(r) => r,
        // Too few doubling levels: single Richardson step if possible.
        Err(_) if raw.len() >= 2 => {
            let prev = raw[raw.len() - 2];
            (T::lit(2.0) * last - prev, (last - prev).abs())
        }
        Err(_) => (last, log_factor(0).abs()),
    };
    PartialProductTrace {
        terms_used: terms,
        checkpoints: marks,
        raw_partials: raw,
        accelerated_value: accelerated_log.exp(),
        accelerated_log,
        tail_estimate,
    }
}

/// Partial products of the Beta-ratio product with an extrapolated limit.
///
/// Use a power of two for `terms` to get the full set of doubling checkpoints.
pub fn pq_partial_product<T: Real>(spec: &BetaRatioSpec<T>, terms: usize) -> Result<PartialProductTrace<T>> {
    if terms == 0 {
        return Err(Error::invalid("terms", "must be >= 1"));
    }
    Ok(trace_from_log_factors(terms, |j| spec.log_factor(j)))
}

/// Wallis-type product for `k^2 = a * P/Q`.
pub fn k_squared_product<T: Real>(a: T, b: T, terms: usize) -> Result<PartialProductTrace<T>> {
    let spec = BetaRatioSpec::from_step_pair(a, b)?;
    Ok(pq_partial_product(&spec, terms)?.scaled(a))
}
