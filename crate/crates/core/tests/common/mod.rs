//! Checks shared by the property suites and the acceptance run.
#![allow(dead_code)]

use std::collections::HashSet;

use lorenz_entropy::kneading::classify_words;
use lorenz_entropy::symbolic::coding_map;
use lorenz_entropy::{
    critical_itineraries, eval_uniform, hs_member, itinerary, lex_compare, metric_d, uniform_critical_itinerary,
    AdmissiblePair, LorenzMapSpec, Membership, Orientation, SymbolWord, WordOrder,
};

pub type Check = Result<(), String>;

pub const GOLDEN_LOG: f64 = 0.481_211_825_059_603_4;

pub fn sqrt_map() -> LorenzMapSpec {
    LorenzMapSpec::new("1.25*sqrt(x)", "2.0496*x + 1 - 2.0496", 0.64).unwrap()
}

pub fn slow_map() -> LorenzMapSpec {
    LorenzMapSpec::new("1.001*x", "exp(x + ln(2) - 1) - 1", 0.5).unwrap()
}

pub fn root_two(p: f64) -> LorenzMapSpec {
    LorenzMapSpec::uniform(AdmissiblePair::new(2f64.sqrt(), p).unwrap())
}

/// Maps unit-interval draws onto an admissible pair with `a` in `[lo, hi]`.
pub fn pair_from_unit(ua: f64, up: f64, lo: f64, hi: f64) -> AdmissiblePair {
    let a = lo + (hi - lo) * ua;
    let (pmin, pmax) = (1.0 - 1.0 / a, 1.0 / a);
    AdmissiblePair::new(a, pmin + (pmax - pmin) * up).unwrap()
}

pub fn orientation(upper: bool) -> Orientation {
    if upper {
        Orientation::Upper
    } else {
        Orientation::Lower
    }
}

pub fn word(bits: &[bool]) -> SymbolWord {
    SymbolWord::new(bits.iter().map(|&b| u8::from(b)).collect()).unwrap()
}

pub fn ultrametric(u: &SymbolWord, v: &SymbolWord, w: &SymbolWord) -> Check {
    let (uv, uw, wv) = (metric_d(u, v).unwrap(), metric_d(u, w).unwrap(), metric_d(w, v).unwrap());
    if uv <= uw.max(wv) {
        Ok(())
    } else {
        Err(format!("d({u},{v}) = {uv} > max({uw}, {wv})"))
    }
}

pub fn round_trip(pair: &AdmissiblePair, o: Orientation, x: f64, n: usize) -> Check {
    let w = itinerary(pair, o, x, n).unwrap();
    let value = coding_map(pair.a(), &w).unwrap().value;
    let bound = pair.a().powi(-(n as i32 - 1)) + 1e-9;
    if (value - x).abs() <= bound {
        Ok(())
    } else {
        Err(format!("{pair:?} {o} x = {x}: pi(mu(x)) = {value}, bound {bound}"))
    }
}

/// `π_a(S w)` against `U(π_a(w))`. Right at the cut the truncated value can
/// fall on the other side of `p`; there the branch is taken from the word.
pub fn commuting_diagram(pair: &AdmissiblePair, o: Orientation, x: f64, n: usize) -> Check {
    let a = pair.a();
    let w = itinerary(pair, o, x, n).unwrap();
    let pw = coding_map(a, &w).unwrap().value;
    let shifted = coding_map(a, &w.shift().unwrap()).unwrap().value;
    let side = o.symbol(pw, pair.p());
    let image = if side == w.get(0).unwrap() {
        eval_uniform(pair, o, pw)
    } else if w.get(0) == Some(0) {
        a * pw
    } else {
        a * pw + 1.0 - a
    };
    let bound = 2.0 * a.powi(-(n as i32 - 2)) + 1e-12;
    if (shifted - image).abs() <= bound {
        Ok(())
    } else {
        Err(format!("{pair:?} {o} x = {x}: {shifted} vs {image}, bound {bound}"))
    }
}

pub fn monotone_in_x(pair: &AdmissiblePair, o: Orientation, x: f64, y: f64, n: usize) -> Check {
    let (x, y) = if x <= y { (x, y) } else { (y, x) };
    let (wx, wy) = (itinerary(pair, o, x, n).unwrap(), itinerary(pair, o, y, n).unwrap());
    if lex_compare(&wx, &wy) != WordOrder::Greater {
        Ok(())
    } else {
        Err(format!("{pair:?} {o}: mu({x}) = {wx} > mu({y}) = {wy}"))
    }
}

pub fn monotone_in_p(a: f64, p: f64, p2: f64, o: Orientation, n: usize) -> Check {
    let (p, p2) = if p <= p2 { (p, p2) } else { (p2, p) };
    let lo = uniform_critical_itinerary(&AdmissiblePair::new(a, p).unwrap(), o, n).unwrap();
    let hi = uniform_critical_itinerary(&AdmissiblePair::new(a, p2).unwrap(), o, n).unwrap();
    if lex_compare(&lo, &hi) != WordOrder::Greater {
        Ok(())
    } else {
        Err(format!("a = {a} {o}: mu at p = {p} is {lo}, at p = {p2} is {hi}"))
    }
}

/// Builds a word that is usually admitted: a realized itinerary prefix with
/// a few flipped symbols at the end.
pub fn shift_sub_invariance(pair: &AdmissiblePair, x: f64, len: usize, flips: &[usize]) -> Check {
    let crit = critical_itineraries(pair, 64).unwrap();
    let mut symbols = itinerary(pair, Orientation::Upper, x, len).unwrap().symbols().to_vec();
    for &i in flips {
        let i = i % len;
        symbols[i] ^= 1;
    }
    let w = SymbolWord::new(symbols).unwrap();
    if hs_member(&w, &crit, Orientation::Upper) != Membership::Admitted {
        return Ok(());
    }
    let mut u = w.clone();
    while !u.is_empty() {
        u = u.shift().unwrap();
        if hs_member(&u, &crit, Orientation::Upper) == Membership::Rejected {
            return Err(format!("{w} admitted but its shift {u} is rejected"));
        }
    }
    Ok(())
}

/// Admitted length-`n` words against itineraries sampled on a grid.
pub struct EnumerationSummary {
    pub admitted: u64,
    pub undetermined: u64,
    pub sampled: usize,
    pub sampled_rejected: usize,
    pub admitted_unsampled: usize,
}

pub fn enumeration_vs_sampling(pair: &AdmissiblePair, o: Orientation, n: usize, grid: usize) -> EnumerationSummary {
    let crit = critical_itineraries(pair, 64).unwrap();
    let counts = classify_words(&crit, n).unwrap();
    let sampled: HashSet<SymbolWord> =
        (0..=grid).map(|i| itinerary(pair, o, i as f64 / grid as f64, n).unwrap()).collect();
    let sampled_rejected = sampled.iter().filter(|w| hs_member(w, &crit, o) == Membership::Rejected).count();
    let admitted_unsampled = (0..1u32 << n)
        .map(|bits| SymbolWord::new((0..n).map(|i| ((bits >> (n - 1 - i)) & 1) as u8).collect()).unwrap())
        .filter(|w| hs_member(w, &crit, o) == Membership::Admitted && !sampled.contains(w))
        .count();
    EnumerationSummary {
        admitted: counts.admitted,
        undetermined: counts.undetermined,
        sampled: sampled.len(),
        sampled_rejected,
        admitted_unsampled,
    }
}
