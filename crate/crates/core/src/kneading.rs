//! Critical itineraries, the Hubbard-Sparrow address-space test, admissible
//! word counts, and the kneading comparisons against uniform maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map_model::{itinerary, AdmissiblePair, IntervalMap, LorenzMapSpec, Orientation, BOUNDARY_TOL};
use crate::precise::FixedSlope;
use crate::symbolic::{compare_symbols, SymbolWord, WordOrder};

/// Largest word length [`count_words`] will enumerate.
pub const ENUMERATION_GUARD: usize = 26;

/// `α = τ⁻_q(q)` and `β = τ⁺_q(q)` truncated to `n` symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalItineraries {
    pub alpha: SymbolWord,
    pub beta: SymbolWord,
    pub n: usize,
    /// `f0(q) = 1`, so `α = 0 1̄` exactly.
    pub alpha_is_0_1bar: bool,
    /// `f1(q) = 0`, so `β = 1 0̄` exactly.
    pub beta_is_1_0bar: bool,
}

impl CriticalItineraries {
    /// Builds from explicit words; boundary flags are left unset.
    pub fn from_words(alpha: SymbolWord, beta: SymbolWord) -> Result<Self> {
        if alpha.get(0) != Some(0) || beta.get(0) != Some(1) {
            return Err(Error::MapFile("alpha must start with 0 and beta with 1".into()));
        }
        let n = alpha.len().min(beta.len());
        Ok(CriticalItineraries { alpha, beta, n, alpha_is_0_1bar: false, beta_is_1_0bar: false })
    }

    pub fn with_flags(mut self, alpha_is_0_1bar: bool, beta_is_1_0bar: bool) -> Result<Self> {
        if alpha_is_0_1bar && beta_is_1_0bar {
            return Err(Error::DegenerateCritical);
        }
        self.alpha_is_0_1bar = alpha_is_0_1bar;
        self.beta_is_1_0bar = beta_is_1_0bar;
        Ok(self)
    }
}

pub fn critical_itineraries<M: IntervalMap + ?Sized>(map: &M, n: usize) -> Result<CriticalItineraries> {
    if n == 0 {
        return Err(Error::TruncationTooShort { n, min: 1 });
    }
    let q = map.critical_point();
    let alpha_is_0_1bar = map.branch(0, q)? >= 1.0 - BOUNDARY_TOL;
    let beta_is_1_0bar = map.branch(1, q)? <= BOUNDARY_TOL;
    if alpha_is_0_1bar && beta_is_1_0bar {
        return Err(Error::DegenerateCritical);
    }
    Ok(CriticalItineraries {
        alpha: itinerary(map, Orientation::Lower, q, n)?,
        beta: itinerary(map, Orientation::Upper, q, n)?,
        n,
        alpha_is_0_1bar,
        beta_is_1_0bar,
    })
}

/// Convenience wrapper for specs.
pub fn critical_itineraries_of(spec: &LorenzMapSpec, n: usize) -> Result<CriticalItineraries> {
    critical_itineraries(spec, n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Membership {
    Admitted,
    Rejected,
    /// No shift is decisively excluded, but some shift is still a prefix of
    /// `α` or `β`, so the verdict depends on symbols past the truncation.
    Undetermined,
}

/// Incremental scan of the shifts of a growing word.
///
/// A shift starting with 0 already sits below `β`, so only its comparison
/// with `α` matters; a shift starting with 1 sits above `α` and only its
/// comparison with `β` matters. Each open shift is tracked by its start index
/// until the first symbol that settles it. A shift that still agrees with `α`
/// (or `β`) can be continued along it, so it is not a violation; it only
/// becomes undecidable once it outruns the stored critical word.
#[derive(Debug, Clone, Default)]
struct ShiftScan {
    len: usize,
    tracking_alpha: Vec<usize>,
    tracking_beta: Vec<usize>,
    outran: bool,
}

impl ShiftScan {
    /// Appends `s`; returns false once some shift is strictly between `α` and `β`.
    fn push(&mut self, s: u8, alpha: &[u8], beta: &[u8]) -> bool {
        let pos = self.len;
        self.len += 1;
        let mut rejected = false;
        let mut outran = false;
        self.tracking_alpha.retain(|&k| {
            let Some(&c) = alpha.get(pos - k) else {
                outran = true;
                return false;
            };
            if s > c {
                rejected = true;
            }
            s == c
        });
        self.tracking_beta.retain(|&k| {
            let Some(&c) = beta.get(pos - k) else {
                outran = true;
                return false;
            };
            if s < c {
                rejected = true;
            }
            s == c
        });
        if s == 0 {
            self.tracking_alpha.push(pos);
        } else {
            self.tracking_beta.push(pos);
        }
        self.outran |= outran;
        !rejected
    }
}

/// Tests every shift of `word` against `α` and `β`.
///
/// `Rejected` means some shift lies strictly between `α` and `β`. A shift
/// that agrees with `α` or `β` on all of its symbols is allowed, since the
/// word can be continued along that critical itinerary. Words longer than the
/// stored critical itineraries may need symbols that are not available; those
/// come back `Undetermined` unless a violation shows up first.
///
/// The upper and lower spaces differ only in whether a shift may equal `α`
/// or `β` exactly, which a finite word can never decide, so both orientations
/// give the same verdict on truncations.
pub fn hs_member(word: &SymbolWord, crit: &CriticalItineraries, _orientation: Orientation) -> Membership {
    let (alpha, beta) = (crit.alpha.symbols(), crit.beta.symbols());
    let mut scan = ShiftScan::default();
    for &s in word.symbols() {
        if !scan.push(s, alpha, beta) {
            return Membership::Rejected;
        }
    }
    if scan.outran {
        Membership::Undetermined
    } else {
        Membership::Admitted
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct WordCounts {
    pub admitted: u64,
    pub undetermined: u64,
}

impl WordCounts {
    /// Upper count: undetermined words are included.
    pub fn total(&self) -> u64 {
        self.admitted + self.undetermined
    }
}

fn check_enumerable(crit: &CriticalItineraries, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::TruncationTooShort { n, min: 1 });
    }
    if n > ENUMERATION_GUARD {
        return Err(Error::EnumerationGuard(n));
    }
    if n > crit.n {
        return Err(Error::WordLongerThanCritical { len: n, crit_len: crit.n });
    }
    Ok(())
}

/// Counts length-`n` words by verdict, pruning rejected prefixes.
pub fn classify_words(crit: &CriticalItineraries, n: usize) -> Result<WordCounts> {
    check_enumerable(crit, n)?;
    let (alpha, beta) = (crit.alpha.symbols(), crit.beta.symbols());

    fn walk(scan: &ShiftScan, depth: usize, n: usize, alpha: &[u8], beta: &[u8], out: &mut WordCounts) {
        if depth == n {
            if scan.outran {
                out.undetermined += 1;
            } else {
                out.admitted += 1;
            }
            return;
        }
        for s in [0u8, 1] {
            let mut next = scan.clone();
            if next.push(s, alpha, beta) {
                walk(&next, depth + 1, n, alpha, beta, out);
            }
        }
    }

    // split on the first few symbols and count the subtrees in parallel
    let split = n.min(4);
    let prefixes: Vec<(ShiftScan, usize)> = (0..1usize << split)
        .filter_map(|bits| {
            let mut scan = ShiftScan::default();
            for i in (0..split).rev() {
                if !scan.push(((bits >> i) & 1) as u8, alpha, beta) {
                    return None;
                }
            }
            Some((scan, split))
        })
        .collect();
    let counts = std::thread::scope(|scope| {
        let handles: Vec<_> = prefixes
            .iter()
            .map(|(scan, depth)| {
                scope.spawn(move || {
                    let mut out = WordCounts::default();
                    walk(scan, *depth, n, alpha, beta, &mut out);
                    out
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("word count worker panicked")).collect::<Vec<_>>()
    });
    Ok(counts.into_iter().fold(WordCounts::default(), |acc, c| WordCounts {
        admitted: acc.admitted + c.admitted,
        undetermined: acc.undetermined + c.undetermined,
    }))
}

/// Number of length-`n` words not rejected by [`hs_member`].
pub fn count_words(crit: &CriticalItineraries, n: usize) -> Result<u64> {
    classify_words(crit, n).map(|c| c.total())
}

/// `(1/n) ln |Ω_n|`.
pub fn entropy_estimate_wordcount(crit: &CriticalItineraries, n: usize) -> Result<f64> {
    let count = count_words(crit, n)?;
    Ok((count as f64).ln() / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KneadingComparison {
    /// `α` against `μ⁻_{a,p}(p)`.
    pub alpha_vs_mu_minus: WordOrder,
    /// `μ⁺_{a,p}(p)` against `β`.
    pub mu_plus_vs_beta: WordOrder,
}

impl KneadingComparison {
    pub fn both_less(&self) -> bool {
        self.alpha_vs_mu_minus.is_less() && self.mu_plus_vs_beta.is_less()
    }

    pub fn any_greater(&self) -> bool {
        self.alpha_vs_mu_minus == WordOrder::Greater || self.mu_plus_vs_beta == WordOrder::Greater
    }
}

pub fn kneading_compare(crit: &CriticalItineraries, pair: &AdmissiblePair, n: usize) -> Result<KneadingComparison> {
    if n < 3 {
        return Err(Error::TruncationTooShort { n, min: 3 });
    }
    let ctx = FixedSlope::new(pair.a(), n)?;
    let p = ctx.from_f64(pair.p());
    Ok(compare_at(crit, &ctx, &p, n))
}

/// `μ±_{a,p}(p)` truncated to `n` symbols, computed in fixed point.
pub fn uniform_critical_itinerary(pair: &AdmissiblePair, orientation: Orientation, n: usize) -> Result<SymbolWord> {
    let ctx = FixedSlope::new(pair.a(), n)?;
    Ok(ctx.critical_itinerary(&ctx.from_f64(pair.p()), orientation, n))
}

pub(crate) fn compare_at(
    crit: &CriticalItineraries,
    ctx: &FixedSlope,
    p: &crate::precise::Fixed,
    n: usize,
) -> KneadingComparison {
    let mu_minus = ctx.critical_itinerary(p, Orientation::Lower, n);
    let mu_plus = ctx.critical_itinerary(p, Orientation::Upper, n);
    KneadingComparison {
        alpha_vs_mu_minus: compare_symbols(crit.alpha.symbols(), mu_minus.symbols()),
        mu_plus_vs_beta: compare_symbols(mu_plus.symbols(), crit.beta.symbols()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EmbeddingStatus {
    /// Every `p` in `(t1, t2)` gives an embedding.
    EmbedsAllP,
    /// Exactly one `p` works (a boundary critical value).
    EmbedsUniqueP,
    No,
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingCheck {
    pub a: f64,
    pub status: EmbeddingStatus,
    pub interval: Option<(f64, f64)>,
    pub unique_p: Option<f64>,
    /// The `p` whose uniform critical itineraries were compared.
    pub p_tested: Option<f64>,
    pub pi_alpha: Option<f64>,
    pub pi_beta: Option<f64>,
    /// `π_a(α) < 1 - 1/a`, so `t1` was clamped to `1 - 1/a`.
    pub alpha_below_lower_bound: bool,
    /// `π_a(β) > 1/a`, so `t2` was clamped to `1/a`.
    pub beta_above_upper_bound: bool,
    pub comparison: Option<KneadingComparison>,
}

/// Decides whether the address spaces of the map embed in those of some
/// `U±_{a,p}`, working at truncation `n`.
pub fn check_embedding(crit: &CriticalItineraries, a: f64, n: usize) -> Result<EmbeddingCheck> {
    if n < 3 {
        return Err(Error::TruncationTooShort { n, min: 3 });
    }
    let n = n.min(crit.n);
    let ctx = FixedSlope::new(a, n)?;
    let mut check = EmbeddingCheck {
        a,
        status: EmbeddingStatus::Undetermined,
        interval: None,
        unique_p: None,
        p_tested: None,
        pi_alpha: None,
        pi_beta: None,
        alpha_below_lower_bound: false,
        beta_above_upper_bound: false,
        comparison: None,
    };

    let unique = |order: WordOrder| match order {
        WordOrder::Less => EmbeddingStatus::EmbedsUniqueP,
        WordOrder::Greater => EmbeddingStatus::No,
        WordOrder::EqualPrefix => EmbeddingStatus::Undetermined,
    };
    if crit.alpha_is_0_1bar && !crit.beta_is_1_0bar {
        let p = ctx.inverse();
        let mu_plus = ctx.critical_itinerary(&p, Orientation::Upper, n);
        check.status = unique(compare_symbols(mu_plus.symbols(), crit.beta.symbols()));
        check.p_tested = Some(ctx.to_f64(&p));
    } else if crit.beta_is_1_0bar {
        let p = ctx.one_minus_inverse();
        let mu_minus = ctx.critical_itinerary(&p, Orientation::Lower, n);
        check.status = unique(compare_symbols(crit.alpha.symbols(), mu_minus.symbols()));
        check.p_tested = Some(ctx.to_f64(&p));
    } else {
        let lower = ctx.one_minus_inverse();
        let upper = ctx.inverse();
        let pi_alpha = ctx.cylinder_midpoint(&crit.alpha.symbols()[..n]);
        let pi_beta = ctx.cylinder_midpoint(&crit.beta.symbols()[..n]);
        check.alpha_below_lower_bound = pi_alpha < lower;
        check.beta_above_upper_bound = pi_beta > upper;
        check.pi_alpha = Some(ctx.to_f64(&pi_alpha));
        check.pi_beta = Some(ctx.to_f64(&pi_beta));
        let t1 = pi_alpha.max(lower);
        let t2 = pi_beta.min(upper);
        check.interval = Some((ctx.to_f64(&t1), ctx.to_f64(&t2)));
        if t1 >= t2 {
            check.status = EmbeddingStatus::No;
            return Ok(check);
        }
        let p = (&t1 + &t2) >> 1u32;
        let cmp = compare_at(crit, &ctx, &p, n);
        check.p_tested = Some(ctx.to_f64(&p));
        check.comparison = Some(cmp);
        check.status = if cmp.both_less() {
            EmbeddingStatus::EmbedsAllP
        } else if cmp.any_greater() {
            EmbeddingStatus::No
        } else {
            EmbeddingStatus::Undetermined
        };
        return Ok(check);
    }
    if check.status == EmbeddingStatus::EmbedsUniqueP {
        check.unique_p = check.p_tested;
    }
    Ok(check)
}
