//! Truncated summation of infinite series with convergence acceleration.
//!
//! Every series in the crate, whether a special-function expansion or one of
//! the multi-index expansions of the series engine, is reduced to a sequence of
//! complex terms and summed here. Summation stops when three consecutive terms
//! fall below the tolerance. Slowly convergent sequences are handed to iterated
//! Aitken extrapolation when the terms alternate and to the Levin u-transform
//! otherwise.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerances shared by series summation, quadrature and finite differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracyPolicy {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_terms: usize,
    pub fd_step: f64,
}

impl Default for AccuracyPolicy {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_terms: 100_000,
            fd_step: 1e-3,
        }
    }
}

impl AccuracyPolicy {
    /// Default policy with `max_terms` taken from `INTEGRA_MAX_TERMS` when set.
    pub fn from_env() -> Self {
        let mut policy = Self::default();
        if let Some(n) = std::env::var("INTEGRA_MAX_TERMS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
        {
            policy.max_terms = n;
        }
        policy
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    fn accepts(&self, term: C64, sum: C64) -> bool {
        term.norm() <= self.rel_tol * sum.norm() + self.abs_tol
    }
}

/// Outcome of summing a series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub value: C64,
    pub terms_used: usize,
    pub tail_estimate: f64,
    pub accelerated: bool,
}

/// Relative error an extrapolated value must reach before it is accepted.
const ACCELERATED_REL_TOL: f64 = 1e-10;

/// Relative error below which an extrapolated value is still reported, with
/// its estimate, once the term budget is exhausted.
const EXHAUSTED_REL_TOL: f64 = 1e-7;

/// First index at which extrapolation is attempted; later attempts double it.
const FIRST_CHECKPOINT: usize = 24;

/// Sum `Σ_{n≥0} term(n)`.
///
/// `term(n)` returns the n-th term together with the number of elementary
/// terms it stands for (a diagonal of a multiple sum counts every summand).
pub fn sum_series<F>(mut term: F, policy: &AccuracyPolicy, context: &str) -> Result<SeriesSum>
where
    F: FnMut(usize) -> Result<(C64, usize)>,
{
    let mut terms: Vec<C64> = Vec::new();
    let mut partial: Vec<C64> = Vec::new();
    let mut sum = C64::new(0.0, 0.0);
    let mut small_run = 0usize;
    let mut used = 0usize;
    let mut checkpoint = FIRST_CHECKPOINT;
    let mut best: Option<(C64, f64)> = None;

    for n in 0.. {
        if used >= policy.max_terms {
            break;
        }
        let (t, count) = term(n)?;
        if !(t.re.is_finite() && t.im.is_finite()) {
            return Err(Error::domain(format!("non-finite term {n} in {context}")));
        }
        used += count;
        sum += t;
        terms.push(t);
        partial.push(sum);

        if policy.accepts(t, sum) {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 {
            let tail = tail_bound(&terms);
            if tail > policy.rel_tol * sum.norm() + policy.abs_tol {
                // Algebraic decay: the neglected tail is far larger than the
                // last term, so prefer an extrapolation that beats it.
                if let Some((value, err)) = extrapolate(&terms, &partial).filter(|&(_, e)| e < tail) {
                    return Ok(SeriesSum {
                        value,
                        terms_used: used,
                        tail_estimate: err,
                        accelerated: true,
                    });
                }
            }
            return Ok(SeriesSum {
                value: sum,
                terms_used: used,
                tail_estimate: tail,
                accelerated: false,
            });
        }

        if n + 1 == checkpoint {
            checkpoint *= 2;
            if geometric_rate(&terms) < FAST_RATE {
                continue;
            }
            if let Some((value, err)) = extrapolate(&terms, &partial) {
                let threshold = policy.rel_tol.max(ACCELERATED_REL_TOL) * value.norm() + policy.abs_tol;
                if err <= threshold {
                    return Ok(SeriesSum {
                        value,
                        terms_used: used,
                        tail_estimate: err,
                        accelerated: true,
                    });
                }
                if best.map_or(true, |(_, e)| err < e) {
                    best = Some((value, err));
                }
            }
        }
    }

    if let Some((value, err)) = extrapolate(&terms, &partial) {
        if best.map_or(true, |(_, e)| err < e) {
            best = Some((value, err));
        }
    }
    match best {
        Some((value, err)) if err <= EXHAUSTED_REL_TOL * value.norm() + policy.abs_tol => Ok(SeriesSum {
            value,
            terms_used: used,
            tail_estimate: err,
            accelerated: true,
        }),
        _ => Err(Error::non_convergence(context, used)),
    }
}

/// Per-term contraction below which plain truncation is left to finish.
const FAST_RATE: f64 = 0.9;

/// Average per-term contraction over the last eight terms.
fn geometric_rate(terms: &[C64]) -> f64 {
    let n = terms.len();
    if n < 9 {
        return 1.0;
    }
    let last = terms[n - 1].norm();
    let earlier = terms[n - 9].norm();
    if earlier == 0.0 {
        return 1.0;
    }
    (last / earlier).powf(1.0 / 8.0)
}

/// Estimate of the neglected tail: the larger of a geometric bound from the
/// last two nonzero terms and, when the last terms decay like n^{-p}, the
/// algebraic tail n |t_n| / (p - 1). Alternating tails are bounded by the
/// last term.
fn tail_bound(terms: &[C64]) -> f64 {
    let geometric = geometric_tail(terms);
    if is_alternating(terms) {
        return geometric;
    }
    let n = terms.len();
    if n < 9 {
        return geometric;
    }
    let (last, earlier) = (terms[n - 1].norm(), terms[n - 9].norm());
    if last == 0.0 || earlier == 0.0 {
        return geometric;
    }
    let p = (earlier / last).ln() / (n as f64 / (n - 8) as f64).ln();
    if p <= 1.0 {
        return geometric.max(n as f64 * last);
    }
    geometric.max(n as f64 * last / (p - 1.0))
}

fn geometric_tail(terms: &[C64]) -> f64 {
    let last = terms.last().map_or(0.0, |t| t.norm());
    if last == 0.0 {
        return 0.0;
    }
    let prev = terms
        .iter()
        .rev()
        .skip(1)
        .map(|t| t.norm())
        .find(|&m| m > 0.0)
        .unwrap_or(last);
    let ratio = (last / prev).min(0.99);
    last / (1.0 - ratio)
}

fn is_alternating(terms: &[C64]) -> bool {
    let window = &terms[terms.len().saturating_sub(12)..];
    if window.len() < 4 {
        return false;
    }
    let flips = window
        .windows(2)
        .filter(|w| (w[1] * w[0].conj()).re < 0.0)
        .count();
    flips + 1 >= window.len()
}

fn extrapolate(terms: &[C64], partial: &[C64]) -> Option<(C64, f64)> {
    if terms.len() < 6 {
        return None;
    }
    if is_alternating(terms) {
        let window = &partial[partial.len().saturating_sub(40)..];
        aitken_iterated(window)
    } else {
        levin_u(terms)
    }
}

/// Accelerate an alternating series given its terms, by iterated Aitken Δ²
/// applied to the partial sums. Returns the extrapolated value and an error
/// estimate taken from the agreement of successive Aitken levels.
pub fn accelerate_alternating(terms: &[C64]) -> Result<(C64, f64)> {
    if terms.len() < 4 {
        return Err(Error::InsufficientTerms {
            needed: 4,
            got: terms.len(),
        });
    }
    let partial: Vec<C64> = terms
        .iter()
        .scan(C64::new(0.0, 0.0), |s, t| {
            *s += t;
            Some(*s)
        })
        .collect();
    Ok(aitken_iterated(&partial).unwrap_or((partial[partial.len() - 1], 0.0)))
}

/// Iterated Aitken Δ² over a sequence of partial sums.
pub(crate) fn aitken_iterated(sums: &[C64]) -> Option<(C64, f64)> {
    if sums.len() < 3 {
        return None;
    }
    let mut level = sums.to_vec();
    let mut lasts = vec![level[level.len() - 1]];
    while level.len() >= 3 {
        level = level
            .windows(3)
            .map(|w| {
                let d1 = w[1] - w[0];
                let d2 = w[2] - w[1];
                let den = d2 - d1;
                if den.norm() == 0.0 {
                    w[2]
                } else {
                    w[2] - d2 * d2 / den
                }
            })
            .collect();
        if level.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            break;
        }
        lasts.push(level[level.len() - 1]);
    }
    lasts
        .windows(2)
        .map(|w| (w[1], (w[1] - w[0]).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

/// Levin u-transform, scanning the transformation order and returning the
/// order whose two successive differences are smallest. Multiple sums
/// enumerated by diagonals only settle into their asymptotic regime after a
/// few terms, so the transform is also restarted at later offsets n0 (with
/// β = n0 + 1, preceded by the plain partial sum) and the best estimate kept.
pub(crate) fn levin_u(terms: &[C64]) -> Option<(C64, f64)> {
    let mut head = C64::new(0.0, 0.0);
    let mut best: Option<(C64, f64)> = None;
    let mut consumed = 0;
    for start in [0usize, 4, 8, 16] {
        if terms.len() < start + 12 {
            break;
        }
        head += terms[consumed..start].iter().sum::<C64>();
        consumed = start;
        if let Some((value, err)) = levin_from(&terms[start..], (start + 1) as f64) {
            let candidate = (head + value, err);
            if best.map_or(true, |(_, e)| err < e) {
                best = Some(candidate);
            }
        }
    }
    best
}

/// One Levin u-transform of `terms` with shift β. The alternating binomial
/// weights cancel heavily, so each estimate also carries the rounding error
/// of its numerator, which limits the attainable accuracy on logarithmically
/// convergent sequences to about 1e-11.
fn levin_from(terms: &[C64], beta: f64) -> Option<(C64, f64)> {
    let max_order = (terms.len() - 1).min(40);
    if max_order < 4 || terms[..=max_order].iter().any(|t| t.norm() == 0.0) {
        return None;
    }
    let partial: Vec<C64> = terms
        .iter()
        .scan(C64::new(0.0, 0.0), |s, t| {
            *s += t;
            Some(*s)
        })
        .collect();
    let mut estimates: Vec<(C64, f64)> = Vec::with_capacity(max_order);
    for k in 1..=max_order {
        let kf = k as f64;
        let mut num = C64::new(0.0, 0.0);
        let mut den = C64::new(0.0, 0.0);
        let mut magnitude = 0.0;
        let mut binom = 1.0;
        for j in 0..=k {
            let jf = j as f64;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let c = sign * binom * ((beta + jf) / (beta + kf)).powi(k as i32 - 1);
            let omega = terms[j] * (beta + jf);
            let w = partial[j] * c / omega;
            num += w;
            magnitude += w.norm();
            den += c / omega;
            binom = binom * (kf - jf) / (jf + 1.0);
        }
        let value = num / den;
        if !(value.re.is_finite() && value.im.is_finite()) {
            break;
        }
        let rounding = 4.0 * f64::EPSILON * magnitude / den.norm();
        estimates.push((value, rounding));
    }
    estimates
        .windows(3)
        .map(|w| {
            let drift = (w[2].0 - w[1].0).norm().max((w[1].0 - w[0].0).norm());
            (w[2].0, drift.max(w[2].1))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
}
