//! Symbolic expected workcurve of the Archer–Tardos binning rule.
//!
//! With the other bids fixed, every quantity in the `T_LB` max-min-max formula
//! and in the pour is a linear-fractional function `(p + qx)/(r + sx)` of the
//! varying bid `x`. On each interval the same terms win every comparison, so
//! the expected workload is one such function there. Intervals are split at
//! the roots of the compared differences until no compared pair crosses.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::allocations::{AllocationRule, Rule};
use crate::error::{Error, Result};
use crate::rational::{exact_sqrt, int, ln_enclosure, midpoint, sign_of, Interval, Rational};

/// `(p + q·x) / (r + s·x)`, with a denominator positive on `x > 0`.
#[derive(Debug, Clone)]
pub struct LinearFractional {
    pub p: Rational,
    pub q: Rational,
    pub r: Rational,
    pub s: Rational,
}

impl PartialEq for LinearFractional {
    fn eq(&self, other: &Self) -> bool {
        // equal as functions: cross-multiplied polynomials agree
        let [c0, c1, c2] = cross_difference(self, other);
        c0.is_zero() && c1.is_zero() && c2.is_zero()
    }
}

impl Eq for LinearFractional {}

/// Coefficients of `numA·denB − numB·denA` in increasing degree.
fn cross_difference(a: &LinearFractional, b: &LinearFractional) -> [Rational; 3] {
    [
        &a.p * &b.r - &b.p * &a.r,
        &a.p * &b.s + &a.q * &b.r - &b.p * &a.s - &b.q * &a.r,
        &a.q * &b.s - &b.q * &a.s,
    ]
}

impl LinearFractional {
    pub fn new(p: Rational, q: Rational, r: Rational, s: Rational) -> Self {
        LinearFractional { p, q, r, s }.normalized()
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(c, Rational::zero(), Rational::one(), Rational::zero())
    }

    /// `c·x`
    pub fn linear(c: Rational) -> Self {
        Self::new(Rational::zero(), c, Rational::one(), Rational::zero())
    }

    fn normalized(self) -> Self {
        let lead = if !self.s.is_zero() { self.s.clone() } else { self.r.clone() };
        debug_assert!(!lead.is_zero(), "zero denominator");
        LinearFractional { p: self.p / &lead, q: self.q / &lead, r: self.r / &lead, s: self.s / lead }
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        (&self.p + &self.q * x) / (&self.r + &self.s * x)
    }

    /// `self / x`; defined when the result stays linear-fractional.
    fn over_x(&self) -> Result<Self> {
        if self.p.is_zero() {
            Ok(Self::new(self.q.clone(), Rational::zero(), self.r.clone(), self.s.clone()))
        } else if self.s.is_zero() {
            Ok(Self::new(self.p.clone(), self.q.clone(), Rational::zero(), self.r.clone()))
        } else {
            Err(Error::Internal(format!("{self:?} / x is not linear-fractional")))
        }
    }

    /// `c − k·self`
    fn subtracted_from(&self, c: &Rational, k: &Rational) -> Self {
        Self::new(c * &self.r - k * &self.p, c * &self.s - k * &self.q, self.r.clone(), self.s.clone())
    }

    pub fn form(&self) -> PieceForm {
        let LinearFractional { p, q, r, s } = self;
        if s.is_zero() {
            if q.is_zero() {
                PieceForm::Constant(p / r)
            } else {
                PieceForm::Affine { intercept: p / r, slope: q / r }
            }
        } else if r.is_zero() && q.is_zero() {
            PieceForm::Reciprocal(p / s)
        } else {
            PieceForm::Fractional(self.clone())
        }
    }

    /// Exact integral over `[lo, hi]`, `0 < lo` required when a logarithm
    /// appears at the origin.
    pub fn integrate(&self, lo: &Rational, hi: &Rational) -> Result<LogIntegral> {
        let LinearFractional { p, q, r, s } = self;
        if s.is_zero() {
            let two = int(2);
            let value = (p * (hi - lo) + q * (hi * hi - lo * lo) / two) / r;
            return Ok(LogIntegral::rational(value));
        }
        // (p + qx)/(r + sx) = q/s + (ps − qr)/s² · 1/(r/s + x)
        let quotient = q / s;
        let remainder = (p * s - q * r) / (s * s);
        let mut out = LogIntegral::rational(&quotient * (hi - lo));
        if !remainder.is_zero() {
            let den_lo = r + s * lo;
            let den_hi = r + s * hi;
            if !den_lo.is_positive() || !den_hi.is_positive() {
                return Err(Error::Divergent);
            }
            // ∫ (ps−qr)/s / (r + sx) dx = (ps−qr)/s² · ln(r + sx)
            out.add_log(remainder, den_hi / den_lo);
        }
        Ok(out)
    }
}

/// The shape of one piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PieceForm {
    Constant(Rational),
    /// `c / x`
    Reciprocal(Rational),
    /// `intercept + slope·x`
    Affine { intercept: Rational, slope: Rational },
    Fractional(LinearFractional),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedPiece {
    pub lo: Rational,
    /// `None` for the unbounded last piece.
    pub hi: Option<Rational>,
    pub function: LinearFractional,
}

impl ExpectedPiece {
    pub fn form(&self) -> PieceForm {
        self.function.form()
    }
}

/// `rational + Σ coeff·ln(arg)`, with distinct arguments and no zero terms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LogIntegral {
    pub rational: Rational,
    pub logs: Vec<(Rational, Rational)>,
}

impl LogIntegral {
    pub fn rational(value: Rational) -> Self {
        LogIntegral { rational: value, logs: Vec::new() }
    }

    fn add_log(&mut self, coeff: Rational, arg: Rational) {
        if coeff.is_zero() || arg.is_one() {
            return;
        }
        match self.logs.iter_mut().find(|(_, a)| *a == arg) {
            Some((c, _)) => *c += coeff,
            None => self.logs.push((coeff, arg)),
        }
        self.logs.retain(|(c, _)| !c.is_zero());
        self.logs.sort_by(|a, b| a.1.cmp(&b.1));
    }

    pub fn add(&mut self, other: &LogIntegral) {
        self.rational += &other.rational;
        for (c, a) in &other.logs {
            self.add_log(c.clone(), a.clone());
        }
    }

    /// Single `coeff·ln(arg)` term with every coefficient equal folded into
    /// one logarithm of the product.
    pub fn folded_log(&self) -> Option<(Rational, Rational)> {
        let (c0, _) = self.logs.first()?;
        if self.logs.iter().all(|(c, _)| c == c0) {
            let product = self.logs.iter().fold(Rational::one(), |acc, (_, a)| acc * a);
            Some((c0.clone(), product))
        } else {
            None
        }
    }

    /// Rational enclosure of the value, width below `tolerance`.
    pub fn enclosure(&self, tolerance: &Rational) -> Result<Interval> {
        let mut total = Interval::point(self.rational.clone());
        if self.logs.is_empty() {
            return Ok(total);
        }
        let weight: Rational = self.logs.iter().map(|(c, _)| c.abs()).sum();
        let per_term = tolerance / (weight * int(2 * self.logs.len() as i64));
        for (c, a) in &self.logs {
            total = total.add(&ln_enclosure(a, &per_term)?.scale(c));
        }
        Ok(total)
    }

    pub fn render(&self) -> String {
        let mut out = format!("{}", self.rational);
        for (c, a) in &self.logs {
            out.push_str(&format!(" + {c}*ln({a})"));
        }
        out
    }
}

/// Piecewise linear-fractional curve on `(0, ∞)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedCurve {
    pieces: Vec<ExpectedPiece>,
}

impl ExpectedCurve {
    pub fn pieces(&self) -> &[ExpectedPiece] {
        &self.pieces
    }

    /// Value at `x`, right-continuous at boundaries.
    pub fn value_at(&self, x: &Rational) -> Rational {
        let k = self.pieces.partition_point(|p| p.hi.as_ref().is_some_and(|h| h <= x));
        self.pieces[k.min(self.pieces.len() - 1)].function.eval(x)
    }

    pub fn boundaries(&self) -> Vec<Rational> {
        self.pieces.iter().filter_map(|p| p.hi.clone()).collect()
    }

    /// `∫_0^∞`; divergent unless the last piece is identically zero.
    pub fn integrate_all(&self) -> Result<LogIntegral> {
        let mut total = LogIntegral::default();
        for piece in &self.pieces {
            match &piece.hi {
                Some(hi) => total.add(&piece.function.integrate(&piece.lo, hi)?),
                None => {
                    if piece.function != LinearFractional::constant(Rational::zero()) {
                        return Err(Error::Divergent);
                    }
                }
            }
        }
        Ok(total)
    }
}

/// Records every comparison made while evaluating at a probe point.
struct Tracer {
    probe: Rational,
    compared: Vec<(LinearFractional, LinearFractional)>,
}

impl Tracer {
    fn pick(&mut self, a: LinearFractional, b: LinearFractional, keep: Ordering) -> LinearFractional {
        let order = a.eval(&self.probe).cmp(&b.eval(&self.probe));
        let winner = if order == keep || order == Ordering::Equal { a.clone() } else { b.clone() };
        if a != b {
            self.compared.push((a, b));
        }
        winner
    }

    fn max(&mut self, a: LinearFractional, b: LinearFractional) -> LinearFractional {
        self.pick(a, b, Ordering::Greater)
    }

    fn min(&mut self, a: LinearFractional, b: LinearFractional) -> LinearFractional {
        self.pick(a, b, Ordering::Less)
    }
}

struct Setup {
    jobs: Vec<Rational>,
    /// other bids, ascending
    others: Vec<Rational>,
    total: Rational,
}

impl Setup {
    /// Expected workload of the varying machine when exactly `pos` other bids
    /// are below it, as the expression active at `tracer.probe`.
    fn content(&self, pos: usize, tracer: &mut Tracer) -> Result<LinearFractional> {
        let m = self.others.len() + 1;
        let mut bound: Option<LinearFractional> = None;
        let mut prefix = Rational::zero();
        for l in &self.jobs {
            prefix += l;
            let mut best: Option<LinearFractional> = None;
            let mut inverse = Rational::zero();
            for i in 0..m {
                let single = if i == pos {
                    LinearFractional::linear(l.clone())
                } else {
                    let b = &self.others[if i < pos { i } else { i - 1 }];
                    inverse += b.recip();
                    LinearFractional::constant(b * l)
                };
                // prefix / (inverse + [1/x if x already counted])
                let share = if i >= pos {
                    LinearFractional::new(Rational::zero(), prefix.clone(), Rational::one(), inverse.clone())
                } else {
                    LinearFractional::constant(&prefix / &inverse)
                };
                let term = tracer.max(single, share);
                best = Some(match best {
                    None => term,
                    Some(b) => tracer.min(b, term),
                });
            }
            let best = best.expect("machines");
            bound = Some(match bound {
                None => best,
                Some(b) => tracer.max(b, best),
            });
        }
        let bound = bound.expect("jobs");
        let before: Rational = self.others[..pos].iter().map(|b| b.recip()).sum();
        let room = bound.over_x()?;
        let left = bound.subtracted_from(&self.total, &before);
        let left = tracer.max(LinearFractional::constant(Rational::zero()), left);
        Ok(tracer.min(room, left))
    }
}

/// Roots of `c0 + c1 x + c2 x²` strictly inside `(lo, hi)`.
fn roots_inside(c: &[Rational; 3], lo: &Rational, hi: Option<&Rational>) -> Result<Vec<Rational>> {
    let inside = |x: &Rational| x > lo && hi.is_none_or(|h| x < h);
    let [c0, c1, c2] = c;
    if c2.is_zero() {
        if c1.is_zero() {
            return Ok(Vec::new());
        }
        let x = -c0 / c1;
        return Ok(if inside(&x) { alloc::vec![x] } else { Vec::new() });
    }
    let disc = c1 * c1 - int(4) * c2 * c0;
    if disc.is_negative() {
        return Ok(Vec::new());
    }
    if let Some(root) = exact_sqrt(&disc) {
        let two_a = int(2) * c2;
        let mut xs: Vec<Rational> = [(-c1 + &root) / &two_a, (-c1 - &root) / &two_a].into_iter().filter(inside).collect();
        xs.sort();
        xs.dedup();
        return Ok(xs);
    }
    // irrational roots: refuse only when one falls inside the interval
    let poly = |x: &Rational| c0 + c1 * x + c2 * x * x;
    let mut signs = alloc::vec![sign_of(&poly(lo))];
    let vertex = -c1 / (int(2) * c2);
    if inside(&vertex) {
        signs.push(sign_of(&poly(&vertex)));
    }
    signs.push(match hi {
        Some(h) => sign_of(&poly(h)),
        None => sign_of(c2),
    });
    if signs.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Resolution(format!(
            "regime boundary in ({lo}, {}) is irrational",
            hi.map(|h| format!("{h}")).unwrap_or_else(|| String::from("inf"))
        )));
    }
    Ok(Vec::new())
}

fn resolve(setup: &Setup, pos: usize, lo: &Rational, hi: Option<&Rational>, out: &mut Vec<ExpectedPiece>, depth: u32) -> Result<()> {
    if depth > 256 {
        return Err(Error::Resolution("regime splitting did not terminate".into()));
    }
    let probe = match hi {
        Some(h) => midpoint(lo, h),
        None => lo + int(1),
    };
    let mut tracer = Tracer { probe, compared: Vec::new() };
    let function = setup.content(pos, &mut tracer)?;
    let mut cuts: Vec<Rational> = Vec::new();
    for (a, b) in &tracer.compared {
        cuts.extend(roots_inside(&cross_difference(a, b), lo, hi)?);
    }
    cuts.sort();
    cuts.dedup();
    if cuts.is_empty() {
        out.push(ExpectedPiece { lo: lo.clone(), hi: hi.cloned(), function });
        return Ok(());
    }
    let mut start = lo.clone();
    for cut in cuts {
        resolve(setup, pos, &start, Some(&cut), out, depth + 1)?;
        start = cut;
    }
    resolve(setup, pos, &start, hi, out, depth + 1)
}

/// Expected workload of machine 0 as a function of its own bid against
/// `others`, for the binning rule.
pub fn expected_workcurve(rule: &Rule, others: &[Rational], jobs: &[Rational]) -> Result<ExpectedCurve> {
    if *rule != Rule::AtExpected {
        return Err(Error::Domain(format!("no symbolic expected curve for {}", rule.name())));
    }
    if others.iter().any(|b| !b.is_positive()) || jobs.iter().any(|l| !l.is_positive()) || jobs.is_empty() {
        return Err(Error::InvalidInstance("bids and job lengths must be positive".into()));
    }
    let mut sorted_jobs = jobs.to_vec();
    sorted_jobs.sort_by(|a, b| b.cmp(a));
    let mut sorted_others = others.to_vec();
    sorted_others.sort();
    let setup = Setup { total: sorted_jobs.iter().sum(), jobs: sorted_jobs, others: sorted_others };

    let mut cuts = setup.others.clone();
    cuts.dedup();
    let mut raw = Vec::new();
    let mut lo = Rational::zero();
    for (pos, cut) in cuts.iter().enumerate() {
        let below = setup.others.iter().filter(|b| *b < cut).count();
        debug_assert!(below >= pos);
        resolve(&setup, below, &lo, Some(cut), &mut raw, 0)?;
        lo = cut.clone();
    }
    resolve(&setup, setup.others.len(), &lo, None, &mut raw, 0)?;

    let mut pieces: Vec<ExpectedPiece> = Vec::with_capacity(raw.len());
    for piece in raw {
        match pieces.last_mut() {
            Some(prev) if prev.function == piece.function => prev.hi = piece.hi,
            _ => pieces.push(piece),
        }
    }
    Ok(ExpectedCurve { pieces })
}
