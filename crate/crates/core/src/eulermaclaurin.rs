//! Euler-Maclaurin evaluation of log step-products at real indices.
//!
//! For a sequence with factors `start + m step`, summing
//! `X(x) = log(start - step + step x)` over `x = 1..N` gives
//!
//! ```text
//! log Pi(x) = log K + (start/step - 1/2 + x) log z - x
//!           + sum_k B_2k / (2k (2k-1)) * (step / z)^(2k-1),     z = start - step + step x
//! ```
//!
//! where the integration constant `log K` (A, B or C for the three forms)
//! absorbs every term that does not depend on `x`. The constant is extracted
//! at a moderate `N` with the Bernoulli corrections applied, which converges
//! far faster than reading it off the bare leading asymptotic.
//!
//! The closed form with the extracted constant defines the product at
//! non-integer indices. Arguments with `z / step` below the shift threshold
//! are moved upward with the recurrence `Pi(x+1) = Pi(x) (start + x step)`.
//!
//! The Bernoulli tail is a divergent asymptotic series; it is cut at its
//! smallest term (or after `max_order` terms), and the first omitted term is
//! reported as the truncation error.

use serde::{Deserialize, Serialize};

use crate::bernoulli::{shared_table, DEFAULT_ORDER_CAP};
use crate::error::{Error, Result};
use crate::real::{compensated_sum, Real};
use crate::stepproducts::{check_positive, log_finite_product, FormKind, StepSequence};

/// Default number of Bernoulli tail terms.
pub const DEFAULT_MAX_ORDER: usize = 10;

/// Largest admissible number of tail terms: the first omitted term needs
/// `B_{2 max_order + 2}` from the shared table.
pub const MAX_ORDER_LIMIT: usize = DEFAULT_ORDER_CAP / 2 - 1;

/// Default minimum of `z / step` for direct evaluation of the closed form.
pub const DEFAULT_SHIFT_THRESHOLD: f64 = 15.0;

/// Default index at which the constant is extracted.
pub const DEFAULT_EXTRACTION_N: u64 = 40;

/// The summand `X(x) = log(start - step + step x)` and its odd derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmSummand<T> {
    seq: StepSequence<T>,
}

impl<T: Real> EmSummand<T> {
    pub fn new(seq: StepSequence<T>) -> Self {
        Self { seq }
    }

    /// `z(x) = start - step + step x`.
    #[inline]
    pub fn argument(&self, x: T) -> T {
        self.seq.start() - self.seq.step() + self.seq.step() * x
    }

    pub fn value(&self, x: T) -> T {
        self.argument(x).ln()
    }

    /// `X^(2k-1)(x) = (2k-2)! step^(2k-1) / z^(2k-1)` for `k >= 1`.
    pub fn odd_derivative(&self, k: usize, x: T) -> T {
        assert!(k >= 1, "derivative order index starts at 1");
        let factorial: T = (1..=2 * k - 2).fold(T::one(), |acc, i| acc * T::of_usize(i));
        let ratio = self.seq.step() / self.argument(x);
        factorial * ratio.powi((2 * k - 1) as i32)
    }
}

/// Result of the constant-free closed form at one argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmSum<T> {
    pub value: T,
    pub truncation_error_estimate: T,
    pub tail_terms: usize,
}

/// Tunables of an expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmSettings<T> {
    pub max_order: usize,
    pub shift_threshold: T,
    pub extraction_n: u64,
}

impl<T: Real> Default for EmSettings<T> {
    fn default() -> Self {
        Self {
            max_order: DEFAULT_MAX_ORDER,
            shift_threshold: T::lit(DEFAULT_SHIFT_THRESHOLD),
            extraction_n: DEFAULT_EXTRACTION_N,
        }
    }
}

impl<T: Real> EmSettings<T> {
    pub fn with_max_order(mut self, max_order: usize) -> Self {
        self.max_order = max_order;
        self
    }

    fn validate(&self) -> Result<()> {
        check_max_order(self.max_order)?;
        check_positive("shift_threshold", self.shift_threshold)?;
        if self.extraction_n == 0 {
            return Err(Error::invalid("extraction_n", "must be >= 1"));
        }
        Ok(())
    }
}

fn check_max_order(max_order: usize) -> Result<()> {
    if max_order == 0 || max_order > MAX_ORDER_LIMIT {
        return Err(Error::invalid(
            "max_order",
            format!("must lie in 1..={MAX_ORDER_LIMIT}, got {max_order}"),
        ));
    }
    Ok(())
}

/// Bernoulli tail at argument ratio `step / z`, cut at the smallest term.
fn bernoulli_tail<T: Real>(ratio: T, max_order: usize) -> (T, T, usize) {
    let table = shared_table();
    let coeff = |k: usize| -> T {
        let b: T = table.even_as(k).expect("order within table");
        b / T::of_usize(2 * k * (2 * k - 1))
    };
    let r2 = ratio * ratio;
    let mut power = ratio;
    let mut terms = Vec::with_capacity(max_order);
    let mut omitted = None;
    for k in 1..=max_order + 1 {
        let term = coeff(k) * power;
        power = power * r2;
        if k > max_order {
            omitted = Some(term);
            break;
        }
        if let Some(prev) = terms.last() {
            let prev: &T = prev;
            if term.abs() >= prev.abs() {
                omitted = Some(term);
                break;
            }
        }
        terms.push(term);
    }
    let used = terms.len();
    let sum = compensated_sum(terms.into_iter().rev());
    (sum, omitted.map(T::abs).unwrap_or_else(T::zero), used)
}

/// Constant-free closed form `(start/step - 1/2 + x) log z - x + tail(z)`.
fn closed_form<T: Real>(seq: &StepSequence<T>, x: T, max_order: usize) -> EmSum<T> {
    let z = EmSummand::new(*seq).argument(x);
    let lead = (seq.offset() - T::lit(0.5) + x) * z.ln() - x;
    let (tail, err, used) = bernoulli_tail(seq.step() / z, max_order);
    EmSum {
        value: lead + tail,
        truncation_error_estimate: err,
        tail_terms: used,
    }
}

/// Constant-free Euler-Maclaurin sum at `x`, using the default shift threshold.
///
/// Adding the sequence's log constant gives `log Pi(x)`.
pub fn em_log_sum<T: Real>(seq: &StepSequence<T>, x: T, max_order: usize) -> Result<EmSum<T>> {
    em_log_sum_with_threshold(seq, x, max_order, T::lit(DEFAULT_SHIFT_THRESHOLD))
}

pub fn em_log_sum_with_threshold<T: Real>(
    seq: &StepSequence<T>,
    x: T,
    max_order: usize,
    shift_threshold: T,
) -> Result<EmSum<T>> {
    check_max_order(max_order)?;
    let ratio = EmSummand::new(*seq).argument(x) / seq.step();
    if ratio.is_nan() || ratio < shift_threshold {
        return Err(Error::ShiftRequired {
            ratio: ratio.as_f64(),
            threshold: shift_threshold.as_f64(),
        });
    }
    Ok(closed_form(seq, x, max_order))
}

/// Extracted log constant of a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate<T> {
    pub log_constant: T,
    pub big_n: u64,
    pub truncation_error_estimate: T,
    /// Set when `z(big_n)` was below the shift threshold, so the tail may not
    /// have reached full precision.
    pub precision_warning: bool,
}

/// `log Pi(N)` minus the constant-free closed form at `N`.
pub fn extract_constant<T: Real>(seq: &StepSequence<T>, big_n: u64, max_order: usize) -> Result<ConstantEstimate<T>> {
    extract_constant_with_threshold(seq, big_n, max_order, T::lit(DEFAULT_SHIFT_THRESHOLD))
}

fn extract_constant_with_threshold<T: Real>(
    seq: &StepSequence<T>,
    big_n: u64,
    max_order: usize,
    shift_threshold: T,
) -> Result<ConstantEstimate<T>> {
    check_max_order(max_order)?;
    if big_n == 0 {
        return Err(Error::invalid("big_n", "must be >= 1"));
    }
    let n = T::from_u64(big_n).ok_or_else(|| Error::invalid("big_n", "not representable"))?;
    let ratio = EmSummand::new(*seq).argument(n) / seq.step();
    let form = closed_form(seq, n, max_order);
    Ok(ConstantEstimate {
        log_constant: log_finite_product(seq, big_n) - form.value,
        big_n,
        truncation_error_estimate: form.truncation_error_estimate,
        precision_warning: ratio < shift_threshold,
    })
}

/// A sequence together with its extracted constant; evaluates `log Pi(x)` for
/// any real `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmExpansion<T> {
    seq: StepSequence<T>,
    settings: EmSettings<T>,
    constant: ConstantEstimate<T>,
}

impl<T: Real> EmExpansion<T> {
    pub fn new(seq: StepSequence<T>) -> Result<Self> {
        Self::with_settings(seq, EmSettings::default())
    }

    pub fn with_settings(seq: StepSequence<T>, settings: EmSettings<T>) -> Result<Self> {
        settings.validate()?;
        let constant =
            extract_constant_with_threshold(&seq, settings.extraction_n, settings.max_order, settings.shift_threshold)?;
        Ok(Self {
            seq,
            settings,
            constant,
        })
    }

    pub fn sequence(&self) -> &StepSequence<T> {
        &self.seq
    }

    pub fn settings(&self) -> &EmSettings<T> {
        &self.settings
    }

    pub fn constant_estimate(&self) -> &ConstantEstimate<T> {
        &self.constant
    }

    pub fn log_constant(&self) -> T {
        self.constant.log_constant
    }

    pub fn em_log_sum(&self, x: T) -> Result<EmSum<T>> {
        em_log_sum_with_threshold(&self.seq, x, self.settings.max_order, self.settings.shift_threshold)
    }

    /// Number of unit shifts needed to bring `x` above the threshold.
    fn shifts_needed(&self, x: T) -> u64 {
        let ratio = EmSummand::new(self.seq).argument(x) / self.seq.step();
        let gap = self.settings.shift_threshold - ratio;
        if gap > T::zero() {
            gap.ceil().to_u64().unwrap_or(u64::MAX)
        } else {
            0
        }
    }

    /// `log Pi(x)` for real `x > 0`.
    pub fn log_interpolated(&self, x: T) -> Result<T> {
        if !(x.is_finite() && x > T::zero()) {
            return Err(Error::invalid("x", format!("must be finite and > 0, got {x}")));
        }
        let shifts = self.shifts_needed(x);
        let shift = T::from_u64(shifts).unwrap();
        let form = closed_form(&self.seq, x + shift, self.settings.max_order);
        // Pi(x + M) = Pi(x) prod_{j<M} (start + (x + j) step)
        let climbed = compensated_sum((0..shifts).map(|j| self.seq.term(x + T::from_u64(j).unwrap()).ln()));
        Ok(self.constant.log_constant + form.value - climbed)
    }
}

/// `log Pi(x)` for real `x > 0` with default settings except `max_order`.
pub fn log_interpolated<T: Real>(seq: &StepSequence<T>, x: T, max_order: usize) -> Result<T> {
    EmExpansion::with_settings(*seq, EmSettings::default().with_max_order(max_order))?.log_interpolated(x)
}

/// Asymptotic constants A, B, C of the Gamma, Delta and Theta forms of `(a, b)`,
/// stored as logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstants<T> {
    pub a: T,
    pub b: T,
    pub log_a_const: T,
    pub log_b_const: T,
    pub log_c_const: T,
    pub precision_warning: bool,
}

impl<T: Real> AsymptoticConstants<T> {
    /// Constant of the Gamma form.
    pub fn a_const(&self) -> T {
        self.log_a_const.exp()
    }

    /// Constant of the Delta form.
    pub fn b_const(&self) -> T {
        self.log_b_const.exp()
    }

    /// Constant of the Theta form.
    pub fn c_const(&self) -> T {
        self.log_c_const.exp()
    }
}

pub fn constants_abc<T: Real>(a: T, b: T) -> Result<AsymptoticConstants<T>> {
    constants_abc_with(a, b, EmSettings::default())
}

pub fn constants_abc_with<T: Real>(a: T, b: T, settings: EmSettings<T>) -> Result<AsymptoticConstants<T>> {
    settings.validate()?;
    let extract = |form: FormKind| -> Result<ConstantEstimate<T>> {
        extract_constant_with_threshold(
            &form.sequence(a, b)?,
            settings.extraction_n,
            settings.max_order,
            settings.shift_threshold,
        )
    };
    let ca = extract(FormKind::Gamma)?;
    let cb = extract(FormKind::Delta)?;
    let cc = extract(FormKind::Theta)?;
    Ok(AsymptoticConstants {
        a,
        b,
        log_a_const: ca.log_constant,
        log_b_const: cb.log_constant,
        log_c_const: cc.log_constant,
        precision_warning: ca.precision_warning || cb.precision_warning || cc.precision_warning,
    })
}
