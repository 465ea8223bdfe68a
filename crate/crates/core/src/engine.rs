//! Bisection on the slope `a` of a uniform comparison map.
//!
//! Each pass picks `a = (a1 + a2) / 2` and asks whether the address spaces of
//! `T` embed in those of some `U±_{a,p}`. If they do, `h(T) <= ln a` and the
//! upper end moves down; otherwise the lower end moves up.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kneading::{compare_at, critical_itineraries, CriticalItineraries};
use crate::map_model::{validate_lorenz, LorenzMapSpec, Orientation, DEFAULT_GRID, DEFAULT_VALIDATION_TOL};
use crate::precise::FixedSlope;
use crate::symbolic::{compare_symbols, WordOrder};

pub const DEFAULT_N: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `t1 >= t2`: no admissible `p`, raise `a1`.
    #[serde(rename = "STEP7")]
    Step7,
    /// Both kneading comparisons strict: lower `a2`.
    #[serde(rename = "STEP10a")]
    Step10a,
    /// Some comparison not strict: raise `a1`.
    #[serde(rename = "STEP10b")]
    Step10b,
    /// `α = 0 1̄`: compare `μ⁺_{a,1/a}(1/a)` with `β`.
    #[serde(rename = "STEP11")]
    Step11,
    /// `β = 1 0̄`: compare `α` with `μ⁻_{a,1-1/a}(1-1/a)`.
    #[serde(rename = "STEP12")]
    Step12,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub a: f64,
    pub branch: Branch,
    /// Whether `a2` moved down to `a`.
    pub lowered_upper: bool,
    pub undetermined_comparisons: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Bracket after this pass.
    pub a1: f64,
    pub a2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyResult {
    /// `ln(m - ε/4)` with `m = (a1 + a2)/2` of the final bracket.
    pub log_lo: f64,
    /// `ln(m + ε/4)`.
    pub log_hi: f64,
    pub midpoint_a: f64,
    /// Slope probed in the last pass.
    pub estimate_a: f64,
    /// `ln(estimate_a)`; the value reported in tables.
    pub log_estimate: f64,
    pub a1: f64,
    pub a2: f64,
    pub iterations: usize,
    pub epsilon: f64,
    pub truncation_n: usize,
    pub undetermined_total: u32,
    pub trace: Vec<TraceStep>,
}

impl EntropyResult {
    pub fn contains_log(&self, h: f64) -> bool {
        self.log_lo <= h && h <= self.log_hi
    }
}

/// Number of passes the bisection makes for tolerance `epsilon`.
pub fn expected_iterations(epsilon: f64) -> usize {
    let mut width = 1.0;
    let mut k = 0;
    while width >= epsilon / 2.0 {
        width /= 2.0;
        k += 1;
    }
    k
}

/// Validates `spec`, then runs the bisection.
pub fn estimate_entropy(spec: &LorenzMapSpec, epsilon: f64, n: usize) -> Result<EntropyResult> {
    let report = validate_lorenz(spec, DEFAULT_GRID, DEFAULT_VALIDATION_TOL);
    if !report.passed() {
        return Err(Error::InvalidMap(Box::new(report)));
    }
    if n < 3 {
        return Err(Error::TruncationTooShort { n, min: 3 });
    }
    let crit = critical_itineraries(spec, n)?;
    estimate_from_critical(&crit, epsilon)
}

/// The bisection itself, starting from precomputed critical itineraries.
pub fn estimate_from_critical(crit: &CriticalItineraries, epsilon: f64) -> Result<EntropyResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    let n = crit.n;
    if n < 3 {
        return Err(Error::TruncationTooShort { n, min: 3 });
    }
    if crit.alpha_is_0_1bar && crit.beta_is_1_0bar {
        return Err(Error::DegenerateCritical);
    }
    let (alpha, beta) = (crit.alpha.symbols(), crit.beta.symbols());

    let (mut a1, mut a2) = (1.0f64, 2.0f64);
    let mut a = 1.5;
    let mut trace = Vec::new();
    let mut undetermined_total = 0;
    while a2 - a1 >= epsilon / 2.0 {
        a = 0.5 * (a1 + a2);
        let ctx = FixedSlope::new(a, n)?;
        let mut step = TraceStep {
            a,
            branch: Branch::Step7,
            lowered_upper: false,
            undetermined_comparisons: 0,
            t1: None,
            t2: None,
            p: None,
            a1,
            a2,
        };

        if crit.alpha_is_0_1bar {
            let mu_plus = ctx.critical_itinerary(&ctx.inverse(), Orientation::Upper, n);
            let order = compare_symbols(mu_plus.symbols(), beta);
            step.branch = Branch::Step11;
            step.lowered_upper = order == WordOrder::Less;
            step.undetermined_comparisons = u32::from(order == WordOrder::EqualPrefix);
        } else if crit.beta_is_1_0bar {
            let mu_minus = ctx.critical_itinerary(&ctx.one_minus_inverse(), Orientation::Lower, n);
            let order = compare_symbols(alpha, mu_minus.symbols());
            step.branch = Branch::Step12;
            step.lowered_upper = order == WordOrder::Less;
            step.undetermined_comparisons = u32::from(order == WordOrder::EqualPrefix);
        } else {
            let t1 = ctx.cylinder_midpoint(alpha).max(ctx.one_minus_inverse());
            let t2 = ctx.cylinder_midpoint(beta).min(ctx.inverse());
            step.t1 = Some(ctx.to_f64(&t1));
            step.t2 = Some(ctx.to_f64(&t2));
            if t1 < t2 {
                let p = (&t1 + &t2) >> 1u32;
                let cmp = compare_at(crit, &ctx, &p, n);
                step.p = Some(ctx.to_f64(&p));
                step.lowered_upper = cmp.both_less();
                step.branch = if step.lowered_upper { Branch::Step10a } else { Branch::Step10b };
                if !step.lowered_upper && !cmp.any_greater() {
                    step.undetermined_comparisons = [cmp.alpha_vs_mu_minus, cmp.mu_plus_vs_beta]
                        .iter()
                        .filter(|&&o| o == WordOrder::EqualPrefix)
                        .count() as u32;
                }
            }
        }

        if step.lowered_upper {
            a2 = a;
        } else {
            a1 = a;
        }
        step.a1 = a1;
        step.a2 = a2;
        undetermined_total += step.undetermined_comparisons;
        trace.push(step);
    }

    let m = 0.5 * (a1 + a2);
    Ok(EntropyResult {
        log_lo: (m - epsilon / 4.0).ln(),
        log_hi: (m + epsilon / 4.0).ln(),
        midpoint_a: m,
        estimate_a: a,
        log_estimate: a.ln(),
        a1,
        a2,
        iterations: trace.len(),
        epsilon,
        truncation_n: n,
        undetermined_total,
        trace,
    })
}

/// Replays a trace and checks `ln a1 <= h <= ln a2` after every pass.
pub fn entropy_bracket_invariant_check(trace: &[TraceStep], oracle_value: f64) -> bool {
    trace.iter().all(|s| s.a1.ln() <= oracle_value && oracle_value <= s.a2.ln())
}
