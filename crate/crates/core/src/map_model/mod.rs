//! Lorenz maps on [0, 1]: two increasing expanding branches glued at a
//! critical point `q`, plus the affine normal forms `U±_{a,p}`.

mod expr;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use expr::{parse_expression, BinOp, Func, MapExpression};

use crate::error::{Error, Result};
use crate::symbolic::{check_slope, SymbolWord};

/// Iterates that overshoot [0, 1] by at most this much are snapped back.
pub const BOUNDARY_TOL: f64 = 1e-12;

pub const DEFAULT_GRID: usize = 10_000;
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-9;

/// Which branch owns the critical point: `Upper` sends `q` through `f1`,
/// `Lower` through `f0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    #[default]
    Upper,
    Lower,
}

impl Orientation {
    /// Symbol of `x` relative to the critical point `q`.
    #[inline]
    pub fn symbol(self, x: f64, q: f64) -> u8 {
        let left = match self {
            Orientation::Upper => x < q,
            Orientation::Lower => x <= q,
        };
        u8::from(!left)
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Upper => "upper",
            Orientation::Lower => "lower",
        })
    }
}

impl std::str::FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "upper" | "+" => Ok(Orientation::Upper),
            "lower" | "-" => Ok(Orientation::Lower),
            other => Err(Error::MapFile(format!("orientation must be \"upper\" or \"lower\", got {other:?}"))),
        }
    }
}

/// Slope and critical point of a uniform Lorenz map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPair")]
pub struct AdmissiblePair {
    a: f64,
    p: f64,
}

#[derive(Deserialize)]
struct RawPair {
    a: f64,
    p: f64,
}

impl TryFrom<RawPair> for AdmissiblePair {
    type Error = Error;

    fn try_from(raw: RawPair) -> Result<Self> {
        AdmissiblePair::new(raw.a, raw.p)
    }
}

impl AdmissiblePair {
    /// Accepts `1 - 1/a <= p <= 1/a`, with a rounding allowance at both ends.
    pub fn new(a: f64, p: f64) -> Result<Self> {
        check_slope(a)?;
        let inv = a.recip();
        if !p.is_finite() || p < 1.0 - inv - BOUNDARY_TOL || p > inv + BOUNDARY_TOL {
            return Err(Error::NotAdmissible { a, p });
        }
        Ok(AdmissiblePair { a, p })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn eval(&self, orientation: Orientation, x: f64) -> f64 {
        eval_uniform(self, orientation, x)
    }
}

/// `U±_{a,p}(x)`: `a x` left of `p`, `a x + 1 - a` right of it.
pub fn eval_uniform(pair: &AdmissiblePair, orientation: Orientation, x: f64) -> f64 {
    let a = pair.a;
    let y = if orientation.symbol(x, pair.p) == 0 { a * x } else { a * x + 1.0 - a };
    y.clamp(0.0, 1.0)
}

/// Anything with a left and a right branch and a cut point between them.
pub trait IntervalMap {
    fn critical_point(&self) -> f64;

    /// Applies branch `symbol` (0 = left, 1 = right) to `x`.
    fn branch(&self, symbol: u8, x: f64) -> Result<f64>;

    fn step(&self, orientation: Orientation, x: f64) -> Result<(u8, f64)> {
        let s = orientation.symbol(x, self.critical_point());
        Ok((s, self.branch(s, x)?))
    }
}

impl IntervalMap for AdmissiblePair {
    fn critical_point(&self) -> f64 {
        self.p
    }

    fn branch(&self, symbol: u8, x: f64) -> Result<f64> {
        let a = self.a;
        let y = if symbol == 0 { a * x } else { a * x + 1.0 - a };
        settle(x, y)
    }
}

/// Snaps a value that left [0, 1] by rounding; anything further out is an error.
fn settle(x: f64, y: f64) -> Result<f64> {
    if !y.is_finite() {
        Err(Error::NonFinite { x })
    } else if (0.0..=1.0).contains(&y) {
        Ok(y)
    } else if (-BOUNDARY_TOL..=1.0 + BOUNDARY_TOL).contains(&y) {
        Ok(y.clamp(0.0, 1.0))
    } else {
        Err(Error::LeftUnitInterval { x, value: y })
    }
}

/// First `n` symbols of the orbit of `x`.
pub fn itinerary<M: IntervalMap + ?Sized>(map: &M, orientation: Orientation, x: f64, n: usize) -> Result<SymbolWord> {
    let mut symbols = Vec::with_capacity(n);
    let mut x = x;
    for _ in 0..n {
        let (s, next) = map.step(orientation, x)?;
        symbols.push(s);
        x = next;
    }
    Ok(SymbolWord::from_bits_unchecked(symbols))
}

/// A Lorenz map given by expressions for its two branches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MapFile", try_from = "MapFile")]
pub struct LorenzMapSpec {
    f0: MapExpression,
    f1: MapExpression,
    f0_text: String,
    f1_text: String,
    q: f64,
    orientation: Orientation,
    uniform: Option<AdmissiblePair>,
}

impl LorenzMapSpec {
    pub fn new(f0: &str, f1: &str, q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::CriticalPointOutOfRange(q));
        }
        Ok(LorenzMapSpec {
            f0: parse_expression(f0)?,
            f1: parse_expression(f1)?,
            f0_text: f0.to_string(),
            f1_text: f1.to_string(),
            q,
            orientation: Orientation::Upper,
            uniform: None,
        })
    }

    /// `U_{a,p}` written out as branch expressions.
    pub fn uniform(pair: AdmissiblePair) -> Self {
        let a = pair.a;
        let mut spec = LorenzMapSpec::new(&format!("{a}*x"), &format!("{a}*x + 1 - {a}"), pair.p)
            .expect("uniform branches always parse");
        spec.uniform = Some(pair);
        spec
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn f0(&self) -> &MapExpression {
        &self.f0
    }

    pub fn f1(&self) -> &MapExpression {
        &self.f1
    }

    pub fn f0_text(&self) -> &str {
        &self.f0_text
    }

    pub fn f1_text(&self) -> &str {
        &self.f1_text
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn uniform_pair(&self) -> Option<AdmissiblePair> {
        self.uniform
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MapFile = serde_json::from_str(text)?;
        file.try_into()
    }
}

impl IntervalMap for LorenzMapSpec {
    fn critical_point(&self) -> f64 {
        self.q
    }

    fn branch(&self, symbol: u8, x: f64) -> Result<f64> {
        let f = if symbol == 0 { &self.f0 } else { &self.f1 };
        settle(x, f.eval(x)?)
    }
}

/// `T±(x)` using the map's own orientation.
pub fn eval_map(spec: &LorenzMapSpec, x: f64) -> Result<f64> {
    spec.step(spec.orientation, x).map(|(_, y)| y)
}

/// On-disk form of a map.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f0: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default)]
    pub orientation: Orientation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<AdmissiblePair>,
}

impl From<LorenzMapSpec> for MapFile {
    fn from(spec: LorenzMapSpec) -> Self {
        match spec.uniform {
            Some(pair) => MapFile { orientation: spec.orientation, uniform: Some(pair), ..MapFile::default() },
            None => MapFile {
                f0: Some(spec.f0_text),
                f1: Some(spec.f1_text),
                q: Some(spec.q),
                orientation: spec.orientation,
                uniform: None,
            },
        }
    }
}

impl TryFrom<MapFile> for LorenzMapSpec {
    type Error = Error;

    fn try_from(file: MapFile) -> Result<Self> {
        let spec = match (file.uniform, file.f0, file.f1, file.q) {
            (Some(pair), None, None, None) => LorenzMapSpec::uniform(pair),
            (Some(_), ..) => {
                return Err(Error::MapFile("give either \"uniform\" or \"f0\"/\"f1\"/\"q\", not both".into()))
            }
            (None, Some(f0), Some(f1), Some(q)) => LorenzMapSpec::new(&f0, &f1, q)?,
            (None, ..) => return Err(Error::MapFile("\"f0\", \"f1\" and \"q\" are all required".into())),
        };
        Ok(spec.with_orientation(file.orientation))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    /// The sampled condition fails but a weaker branch-level version holds.
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    /// Smallest difference quotient between adjacent grid points.
    pub expansivity_estimate: f64,
    pub f0_at_q: f64,
    pub f1_at_q: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect()
    }

    pub fn status_of(&self, name: &str) -> Option<CheckStatus> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.status)
    }

    fn push(&mut self, name: &str, status: CheckStatus, detail: String) {
        self.checks.push(Check { name: name.to_string(), status, detail });
    }

    fn pass_or_fail(&mut self, name: &str, ok: bool, detail: String) {
        self.push(name, if ok { CheckStatus::Pass } else { CheckStatus::Fail }, detail);
    }
}

/// Samples `grid_size` points on each branch.
struct BranchSamples {
    xs: Vec<f64>,
    ys: Vec<f64>,
    non_finite: Option<f64>,
}

fn sample(f: &MapExpression, lo: f64, hi: f64, grid_size: usize) -> BranchSamples {
    let mut xs = Vec::with_capacity(grid_size);
    let mut ys = Vec::with_capacity(grid_size);
    let mut non_finite = None;
    for i in 0..grid_size {
        let t = i as f64 / (grid_size - 1) as f64;
        let x = if i == grid_size - 1 { hi } else { lo + (hi - lo) * t };
        let y = f.eval_raw(x);
        if !y.is_finite() {
            non_finite.get_or_insert(x);
            continue;
        }
        xs.push(x);
        ys.push(y);
    }
    BranchSamples { xs, ys, non_finite }
}

/// Sampled check of the Lorenz-map conditions.
///
/// Expansivity is judged on adjacent grid points. A branch whose local
/// quotients dip to 1 or below but whose chord slope exceeds 1 gets a
/// warning rather than a failure; such maps (e.g. a square-root left branch)
/// still have well-defined critical itineraries and entropy.
pub fn validate_lorenz(spec: &LorenzMapSpec, grid_size: usize, tol: f64) -> ValidationReport {
    let grid_size = grid_size.max(2);
    let q = spec.q;
    let f0q = spec.f0.eval_raw(q);
    let f1q = spec.f1.eval_raw(q);
    let mut report =
        ValidationReport { checks: Vec::new(), expansivity_estimate: f64::NAN, f0_at_q: f0q, f1_at_q: f1q };

    report.pass_or_fail("critical point", q > 0.0 && q < 1.0, format!("q = {q}"));

    let f00 = spec.f0.eval_raw(0.0);
    report.pass_or_fail("f0(0) = 0", (f00 - 0.0).abs() <= tol, format!("f0(0) = {f00}"));
    let f11 = spec.f1.eval_raw(1.0);
    report.pass_or_fail("f1(1) = 1", (f11 - 1.0).abs() <= tol, format!("f1(1) = {f11}"));

    let branches = [("f0", sample(&spec.f0, 0.0, q, grid_size)), ("f1", sample(&spec.f1, q, 1.0, grid_size))];

    let mut finite = true;
    for (name, s) in &branches {
        if let Some(x) = s.non_finite {
            finite = false;
            report.push("finite", CheckStatus::Fail, format!("{name} is not finite at x = {x}"));
        }
    }
    if finite {
        report.push("finite", CheckStatus::Pass, "all samples finite".into());
    }

    let mut increasing = true;
    let mut in_range = true;
    let mut min_quotient = f64::INFINITY;
    let mut expansive = CheckStatus::Pass;
    let mut expansive_detail = Vec::new();
    for (name, s) in &branches {
        let mut branch_min = f64::INFINITY;
        for i in 1..s.xs.len() {
            let (dx, dy) = (s.xs[i] - s.xs[i - 1], s.ys[i] - s.ys[i - 1]);
            if dy <= 0.0 {
                if increasing {
                    report.push(
                        "strictly increasing",
                        CheckStatus::Fail,
                        format!("{name} fails to increase near x = {}", s.xs[i]),
                    );
                }
                increasing = false;
            }
            if dx > 0.0 {
                branch_min = branch_min.min(dy / dx);
            }
        }
        if let Some(y) = s.ys.iter().find(|&&y| y < -tol || y > 1.0 + tol) {
            in_range = false;
            report.push("maps into [0, 1]", CheckStatus::Fail, format!("{name} takes the value {y}"));
        }
        min_quotient = min_quotient.min(branch_min);
        if branch_min <= 1.0 {
            let (x0, x1) = (s.xs.first().copied().unwrap_or(0.0), s.xs.last().copied().unwrap_or(0.0));
            let (y0, y1) = (s.ys.first().copied().unwrap_or(0.0), s.ys.last().copied().unwrap_or(0.0));
            let chord = (y1 - y0) / (x1 - x0);
            if chord > 1.0 {
                expansive = expansive.max_severity(CheckStatus::Warn);
                expansive_detail
                    .push(format!("{name}: local quotient {branch_min:.6} <= 1, chord slope {chord:.6} > 1"));
            } else {
                expansive = CheckStatus::Fail;
                expansive_detail.push(format!("{name}: local quotient {branch_min:.6}, chord slope {chord:.6}"));
            }
        }
    }
    if increasing {
        report.push("strictly increasing", CheckStatus::Pass, "both branches increase on the grid".into());
    }
    if in_range {
        report.push("maps into [0, 1]", CheckStatus::Pass, "all samples in range".into());
    }
    report.expansivity_estimate = min_quotient;
    let detail =
        if expansive_detail.is_empty() { format!("s >= {min_quotient:.6}") } else { expansive_detail.join("; ") };
    report.push("expansive", expansive, detail);

    // 1 > f0(q) > f1(q) >= 0  or  1 >= f0(q) > f1(q) > 0
    let top = f0q >= 1.0 - tol;
    let bottom = f1q <= tol;
    let ordered = f0q <= 1.0 + tol && f1q >= -tol && f0q > f1q;
    report.pass_or_fail("critical values", ordered && !(top && bottom), {
        if top && bottom {
            format!("f0(q) = {f0q} and f1(q) = {f1q} hit both ends")
        } else {
            format!("f0(q) = {f0q}, f1(q) = {f1q}")
        }
    });

    report
}

impl CheckStatus {
    fn max_severity(self, other: CheckStatus) -> CheckStatus {
        match (self, other) {
            (CheckStatus::Fail, _) | (_, CheckStatus::Fail) => CheckStatus::Fail,
            (CheckStatus::Warn, _) | (_, CheckStatus::Warn) => CheckStatus::Warn,
            _ => CheckStatus::Pass,
        }
    }
}
