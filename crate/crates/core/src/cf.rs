//! Continued-fraction digit streams, convergents, and certified brackets.
//!
//! A slope is an `alpha` in `(0,1)` described by its regular continued
//! fraction `[0; a_1, a_2, ...]`. The digits may come from a finite prefix
//! (certified answers degrade to "insufficient digits" when the prefix runs
//! out), an eventually periodic stream (quadratic irrationals), an exact
//! rational (geometry-only), or an on-demand generator. Convergents
//! `p_k/q_k` bracket `alpha`, and every derived real is an interval or a
//! linear form refined from that bracket.

use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{LinForm, KEY_FRAC_BITS};

/// Digit generator callback: `f(i)` returns `a_i` for `i >= 1`, or `None`
/// when the stream is exhausted.
pub type DigitFn = Arc<dyn Fn(usize) -> Option<u64> + Send + Sync>;

#[derive(Clone)]
enum DigitSource {
    /// Finite known prefix `[a_0; a_1, ..., a_L]`; the tail is unknown.
    Finite(Vec<u64>),
    /// `prefix` then `period` repeated forever (`prefix[0] = a_0 = 0`).
    Periodic { prefix: Vec<u64>, period: Vec<u64> },
    /// Exact rational value with its full canonical digit list.
    Rational { value: BigRational, digits: Vec<u64> },
    /// Digits pulled on demand.
    Generator(DigitFn),
}

struct Cache {
    /// Digits pulled so far, `digits[i] = a_i` (only used for generators).
    pulled: Vec<Option<u64>>,
    /// Convergent rows `(p_k, q_k)` for `k = 0, 1, ...`.
    pq: Vec<(BigInt, BigInt)>,
    /// `floor(alpha * 2^120)`, certified to within 2 units.
    key_alpha: Option<u128>,
    /// `alpha` as f64 (rendering only).
    alpha_f64: Option<f64>,
}

/// A slope `alpha` in (0,1) given by its continued-fraction digits.
pub struct Slope {
    source: DigitSource,
    digit_bound: Option<u64>,
    cache: RwLock<Cache>,
}

impl Clone for Slope {
    fn clone(&self) -> Self {
        Slope {
            source: self.source.clone(),
            digit_bound: self.digit_bound,
            cache: RwLock::new(Cache {
                pulled: Vec::new(),
                pq: Vec::new(),
                key_alpha: None,
                alpha_f64: None,
            }),
        }
    }
}

impl fmt::Debug for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            DigitSource::Finite(d) => write!(f, "Slope::finite({d:?})"),
            DigitSource::Periodic { prefix, period } => {
                write!(f, "Slope::periodic({prefix:?}, {period:?})")
            }
            DigitSource::Rational { value, .. } => write!(f, "Slope::rational({value})"),
            DigitSource::Generator(_) => write!(f, "Slope::generator"),
        }
    }
}

fn check_digits(digits: &[u64], first_is_a0: bool) -> Result<()> {
    for (i, &d) in digits.iter().enumerate() {
        if first_is_a0 && i == 0 {
            if d != 0 {
                return Err(Error::SlopeRange);
            }
        } else if d == 0 {
            return Err(Error::Parse(format!("digit a_{i} must be >= 1")));
        }
    }
    Ok(())
}

impl Slope {
    fn with_source(source: DigitSource) -> Self {
        Slope {
            source,
            digit_bound: None,
            cache: RwLock::new(Cache {
                pulled: Vec::new(),
                pq: Vec::new(),
                key_alpha: None,
                alpha_f64: None,
            }),
        }
    }

    /// Slope from a finite digit prefix `[a_0; a_1, ..., a_L]` with unknown
    /// irrational tail. `digits[0]` must be 0.
    pub fn from_prefix(digits: Vec<u64>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::Parse("empty digit list".into()));
        }
        check_digits(&digits, true)?;
        Ok(Slope::with_source(DigitSource::Finite(digits)))
    }

    /// Eventually periodic slope: `prefix` (starting with `a_0 = 0`) followed
    /// by `period` repeated forever.
    pub fn periodic(prefix: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::Parse("periodic slope needs a_0 = 0 prefix".into()));
        }
        if period.is_empty() {
            return Err(Error::Parse("empty period".into()));
        }
        check_digits(&prefix, true)?;
        check_digits(&period, false)?;
        Ok(Slope::with_source(DigitSource::Periodic { prefix, period }))
    }

    /// Exact rational slope `num/den` in (0,1); geometry-only.
    pub fn from_rational(num: i64, den: i64) -> Result<Self> {
        Slope::from_big_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big_rational(value: BigRational) -> Result<Self> {
        if !value.is_positive() || value >= BigRational::one() {
            return Err(Error::SlopeRange);
        }
        let digits_big = expand_rational(value.numer(), value.denom());
        let digits: Vec<u64> = digits_big
            .iter()
            .map(|d| d.to_u64().ok_or(Error::Parse("digit overflow".into())))
            .collect::<Result<_>>()?;
        Ok(Slope::with_source(DigitSource::Rational { value, digits }))
    }

    /// Slope with digits pulled from a generator; `f(i)` yields `a_i`, i >= 1.
    pub fn from_generator(f: DigitFn) -> Self {
        Slope::with_source(DigitSource::Generator(f))
    }

    /// Attach a digit bound `A`; all known digits must satisfy `a_i <= A`.
    pub fn with_digit_bound(mut self, a: u64) -> Result<Self> {
        if a == 0 {
            return Err(Error::Parse("digit bound must be positive".into()));
        }
        let known: Vec<u64> = match &self.source {
            DigitSource::Finite(d) => d.clone(),
            DigitSource::Periodic { prefix, period } => {
                prefix.iter().chain(period.iter()).copied().collect()
            }
            DigitSource::Rational { digits, .. } => digits.clone(),
            DigitSource::Generator(_) => Vec::new(),
        };
        if known.iter().skip(1).any(|&d| d > a) {
            return Err(Error::Precondition(format!(
                "declared digit bound {a} violated by a known digit"
            )));
        }
        self.digit_bound = Some(a);
        Ok(self)
    }

    /// Parse the CLI slope grammar: `cf:0;2,2,2` (finite prefix),
    /// `cf:0;(1)` or `cf:0;2,(1,2)` (periodic tail), `rat:5/12` (rational).
    pub fn parse(spec: &str) -> Result<Self> {
        if let Some(body) = spec.strip_prefix("rat:") {
            let (num, den) = body
                .split_once('/')
                .ok_or_else(|| Error::Parse(format!("bad rational slope: {spec}")))?;
            let n: i64 = num
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in {spec}")))?;
            let d: i64 = den
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in {spec}")))?;
            if d < 1 {
                return Err(Error::Parse("denominator must be >= 1".into()));
            }
            return Slope::from_rational(n, d);
        }
        let body = spec
            .strip_prefix("cf:")
            .ok_or_else(|| Error::Parse(format!("slope spec must start with cf: or rat: ({spec})")))?;
        let (a0_str, rest) = body
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("missing ';' in slope spec {spec}")))?;
        let a0: u64 = a0_str
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad a_0 in {spec}")))?;
        if a0 != 0 {
            return Err(Error::SlopeRange);
        }
        let rest = rest.trim();
        let parse_list = |s: &str| -> Result<Vec<u64>> {
            if s.is_empty() {
                return Ok(Vec::new());
            }
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::Parse(format!("bad digit '{t}' in {spec}")))
                })
                .collect()
        };
        if let Some(open) = rest.find('(') {
            let close = rest
                .rfind(')')
                .ok_or_else(|| Error::Parse(format!("unclosed '(' in {spec}")))?;
            let head = rest[..open].trim().trim_end_matches(',');
            let tail = &rest[open + 1..close];
            let mut prefix = vec![0u64];
            prefix.extend(parse_list(head)?);
            let period = parse_list(tail)?;
            Slope::periodic(prefix, period)
        } else {
            let mut digits = vec![0u64];
            digits.extend(parse_list(rest)?);
            Slope::from_prefix(digits)
        }
    }

    pub fn digit_bound(&self) -> Option<u64> {
        self.digit_bound
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.source, DigitSource::Rational { .. })
    }

    pub fn exact_value(&self) -> Option<BigRational> {
        match &self.source {
            DigitSource::Rational { value, .. } => Some(value.clone()),
            _ => None,
        }
    }

    /// Digit `a_i`, or `InsufficientDigits` past the end of the stream.
    pub fn digit(&self, i: usize) -> Result<u64> {
        if i == 0 {
            return Ok(0);
        }
        match &self.source {
            DigitSource::Finite(d) | DigitSource::Rational { digits: d, .. } => d
                .get(i)
                .copied()
                .ok_or(Error::InsufficientDigits { needed: i }),
            DigitSource::Periodic { prefix, period } => {
                if i < prefix.len() {
                    Ok(prefix[i])
                } else {
                    Ok(period[(i - prefix.len()) % period.len()])
                }
            }
            DigitSource::Generator(f) => {
                {
                    let cache = self.cache.read().unwrap();
                    if let Some(slot) = cache.pulled.get(i) {
                        return slot.ok_or(Error::InsufficientDigits { needed: i });
                    }
                }
                let mut cache = self.cache.write().unwrap();
                while cache.pulled.len() <= i {
                    let idx = cache.pulled.len();
                    let d = if idx == 0 { Some(0) } else { f(idx) };
                    if let (Some(v), Some(bound)) = (d, self.digit_bound) {
                        if idx >= 1 && (v == 0 || v > bound) {
                            return Err(Error::Precondition(format!(
                                "generator digit a_{idx} = {v} violates bound {bound}"
                            )));
                        }
                    } else if let Some(0) = d {
                        if idx >= 1 {
                            return Err(Error::Parse(format!("generator digit a_{idx} = 0")));
                        }
                    }
                    cache.pulled.push(d);
                }
                cache.pulled[i].ok_or(Error::InsufficientDigits { needed: i })
            }
        }
    }

    /// The digits `a_0..a_{k_max}` inclusive.
    pub fn digits_prefix(&self, k_max: usize) -> Result<Vec<u64>> {
        (0..=k_max).map(|i| self.digit(i)).collect()
    }

    /// Index after which no further digits exist, if the stream is finite.
    fn terminal_index(&self) -> Option<usize> {
        match &self.source {
            DigitSource::Finite(d) | DigitSource::Rational { digits: d, .. } => Some(d.len() - 1),
            DigitSource::Periodic { .. } => None,
            DigitSource::Generator(_) => {
                let cache = self.cache.read().unwrap();
                cache
                    .pulled
                    .iter()
                    .position(|d| d.is_none())
                    .map(|i| i - 1)
            }
        }
    }

    /// True when `bracket_at_least(depth)` cannot improve further.
    pub(crate) fn is_exhausted_at(&self, depth: usize) -> bool {
        match self.terminal_index() {
            Some(t) => depth >= t,
            None => false,
        }
    }

    pub(crate) fn cached_depth(&self) -> usize {
        self.cache.read().unwrap().pq.len().saturating_sub(1)
    }

    fn extend_pq(&self, k: usize) -> Result<()> {
        let mut cache = self.cache.write().unwrap();
        while cache.pq.len() <= k {
            let next = cache.pq.len();
            let a = match self.digit(next) {
                Ok(a) => a,
                Err(e) => return Err(e),
            };
            let a = BigInt::from(a);
            let row = if next == 0 {
                (BigInt::zero(), BigInt::one())
            } else if next == 1 {
                (BigInt::one(), a)
            } else {
                let (p1, q1) = cache.pq[next - 1].clone();
                let (p0, q0) = cache.pq[next - 2].clone();
                (&a * p1 + p0, &a * q1 + q0)
            };
            cache.pq.push(row);
        }
        Ok(())
    }

    /// Convergent `(p_k, q_k)`; `k = -1` gives the conventional `(1, 0)`.
    pub fn convergent(&self, k: i64) -> Result<(BigInt, BigInt)> {
        if k == -1 {
            return Ok((BigInt::one(), BigInt::zero()));
        }
        assert!(k >= 0);
        let k = k as usize;
        self.extend_pq(k)?;
        Ok(self.cache.read().unwrap().pq[k].clone())
    }

    pub fn q(&self, k: i64) -> Result<BigInt> {
        Ok(self.convergent(k)?.1)
    }

    pub fn p(&self, k: i64) -> Result<BigInt> {
        Ok(self.convergent(k)?.0)
    }

    /// `eps_k = |q_k alpha - p_k|` as an exact linear form
    /// `(-1)^k (q_k alpha - p_k)`; `eps_{-1} = 1`, `eps_0 = alpha`.
    pub fn eps(&self, k: i64) -> Result<LinForm> {
        let (p, q) = self.convergent(k)?;
        if k % 2 == 0 {
            Ok(LinForm::new(BigRational::from_integer(-p), q))
        } else {
            Ok(LinForm::new(BigRational::from_integer(p), -q))
        }
    }

    /// A rational bracket `(lo, hi)` with `lo < alpha < hi`, built from
    /// convergents of index at least `depth`. For finite digit streams the
    /// final bracket spans every possible completion of the prefix.
    pub fn bracket_at_least(&self, depth: usize) -> Result<(BigRational, BigRational)> {
        if let Some(v) = self.exact_value() {
            return Ok((v.clone(), v));
        }
        let depth = match self.terminal_index() {
            Some(t) if depth >= t => {
                // Terminal bracket: completions [a_0; ..., a_L, tail] with
                // tail value in (1, inf) sweep the open interval between
                // p_L/q_L and (p_L + p_{L-1})/(q_L + q_{L-1}).
                let (pl, ql) = self.convergent(t as i64)?;
                let (pl1, ql1) = self.convergent(t as i64 - 1)?;
                let end_inf = BigRational::new(pl.clone(), ql.clone());
                let end_one = BigRational::new(&pl + &pl1, &ql + &ql1);
                return Ok(if end_inf < end_one {
                    (end_inf, end_one)
                } else {
                    (end_one, end_inf)
                });
            }
            _ => depth.max(1),
        };
        let pair = self
            .convergent(depth as i64)
            .and_then(|c0| self.convergent(depth as i64 + 1).map(|c1| (c0, c1)));
        let ((p0, q0), (p1, q1)) = match pair {
            Ok(x) => x,
            // A generator stream may only now reveal its end; retry with the
            // terminal bracket.
            Err(Error::InsufficientDigits { .. }) if self.terminal_index().is_some() => {
                return self.bracket_at_least(depth);
            }
            Err(e) => return Err(e),
        };
        let r0 = BigRational::new(p0, q0);
        let r1 = BigRational::new(p1, q1);
        Ok(if r0 < r1 { (r0, r1) } else { (r1, r0) })
    }

    /// Refine the bracket until its width is at most `width`.
    pub fn refine_to_width(&self, width: &BigRational) -> Result<(BigRational, BigRational)> {
        if let Some(v) = self.exact_value() {
            return Ok((v.clone(), v));
        }
        let mut depth = self.cached_depth().max(4);
        loop {
            let (lo, hi) = self.bracket_at_least(depth)?;
            if &(&hi - &lo) <= width {
                return Ok((lo, hi));
            }
            if self.is_exhausted_at(depth) {
                return Err(Error::InsufficientDigits { needed: depth + 1 });
            }
            depth = depth.saturating_mul(2);
        }
    }

    /// `floor(alpha * 2^120)` certified to within 2 units; cached.
    pub fn key_alpha(&self) -> Result<u128> {
        if let Some(k) = self.cache.read().unwrap().key_alpha {
            return Ok(k);
        }
        let width = BigRational::new(BigInt::one(), BigInt::one() << (KEY_FRAC_BITS + 2));
        let (lo, _hi) = self.refine_to_width(&width)?;
        let scaled = (lo.numer() << KEY_FRAC_BITS).div_floor(lo.denom());
        let key = scaled
            .to_u128()
            .ok_or_else(|| Error::Precondition("slope outside (0,1)".into()))?;
        self.cache.write().unwrap().key_alpha = Some(key);
        Ok(key)
    }

    /// `alpha` as an f64 (rendering and diagnostics only); cached.
    pub fn alpha_f64(&self) -> Result<f64> {
        if let Some(v) = self.cache.read().unwrap().alpha_f64 {
            return Ok(v);
        }
        let width = BigRational::new(BigInt::one(), BigInt::one() << 64);
        let (lo, hi) = match self.refine_to_width(&width) {
            Ok(b) => b,
            // A short finite prefix still has a usable midpoint.
            Err(Error::InsufficientDigits { .. }) => self.bracket_at_least(usize::MAX - 1)?,
            Err(e) => return Err(e),
        };
        let mid = (lo + hi) / BigRational::from_integer(BigInt::from(2));
        let v = mid.to_f64().unwrap_or(f64::NAN);
        self.cache.write().unwrap().alpha_f64 = Some(v);
        Ok(v)
    }

    /// Convergent table through index `k_max` (plus the conventional row -1).
    pub fn convergents(&self, k_max: usize) -> Result<ConvergentTable> {
        let mut rows = Vec::with_capacity(k_max + 2);
        rows.push(ConvergentRow {
            k: -1,
            digit: None,
            p: BigInt::one(),
            q: BigInt::zero(),
            eps: LinForm::one(),
        });
        for k in 0..=k_max {
            let (p, q) = self.convergent(k as i64)?;
            rows.push(ConvergentRow {
                k: k as i64,
                digit: Some(self.digit(k)?),
                p,
                q,
                eps: self.eps(k as i64)?,
            });
        }
        Ok(ConvergentTable { rows })
    }

    /// The digit bound used by certificates: the declared bound if present,
    /// otherwise the exact maximum digit for periodic/rational streams.
    pub fn certified_digit_bound(&self) -> Result<u64> {
        if let Some(a) = self.digit_bound {
            return Ok(a);
        }
        match &self.source {
            DigitSource::Periodic { prefix, period } => Ok(prefix
                .iter()
                .skip(1)
                .chain(period.iter())
                .copied()
                .max()
                .unwrap_or(1)),
            DigitSource::Rational { digits, .. } => {
                Ok(digits.iter().skip(1).copied().max().unwrap_or(1))
            }
            _ => Err(Error::Precondition(
                "digit bound unknown: declare one with a digit bound or use a periodic slope"
                    .into(),
            )),
        }
    }
}

/// One row of a convergent table.
#[derive(Clone, Debug)]
pub struct ConvergentRow {
    pub k: i64,
    pub digit: Option<u64>,
    pub p: BigInt,
    pub q: BigInt,
    /// `|q_k alpha - p_k|` as an exact linear form.
    pub eps: LinForm,
}

/// Convergents `p_k/q_k` with their certified `eps_k` values.
#[derive(Clone, Debug)]
pub struct ConvergentTable {
    pub rows: Vec<ConvergentRow>,
}

impl ConvergentTable {
    /// Row for index `k >= -1`.
    pub fn row(&self, k: i64) -> &ConvergentRow {
        &self.rows[(k + 1) as usize]
    }

    pub fn k_max(&self) -> i64 {
        self.rows.last().map(|r| r.k).unwrap_or(-1)
    }
}

/// Canonical continued fraction of `num/den` by the floor-based Euclidean
/// algorithm; the last digit is >= 2 whenever the expansion has length > 1.
pub fn expand_rational(num: &BigInt, den: &BigInt) -> Vec<BigInt> {
    assert!(den.is_positive(), "denominator must be >= 1");
    let mut digits = Vec::new();
    let mut n = num.clone();
    let mut d = den.clone();
    loop {
        let (q, r) = n.div_mod_floor(&d);
        digits.push(q);
        if r.is_zero() {
            break;
        }
        n = d;
        d = r;
    }
    digits
}

/// Evaluate a finite continued fraction exactly.
pub fn eval_cf(digits: &[BigInt]) -> BigRational {
    assert!(!digits.is_empty());
    let mut value = BigRational::from_integer(digits.last().unwrap().clone());
    for d in digits.iter().rev().skip(1) {
        value = BigRational::from_integer(d.clone()) + value.recip();
    }
    value
}

/// True iff `a_i <= bound` for all `1 <= i <= k_max`.
pub fn is_badly_approximable_prefix(slope: &Slope, bound: u64, k_max: usize) -> Result<bool> {
    for i in 1..=k_max {
        if slope.digit(i)? > bound {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Certified interval of width at most `precision` containing `||q alpha||`,
/// the distance from `q*alpha` to the nearest integer.
pub fn norm_dist(
    q: u64,
    slope: &Slope,
    precision: &BigRational,
) -> Result<(BigRational, BigRational)> {
    assert!(q >= 1);
    assert!(precision.is_positive());
    let form = LinForm::new(BigRational::zero(), BigInt::from(q));
    let fl = form.floor(slope)?;
    let frac = form.add_int(&-fl); // {q alpha} in [0,1)
    let half = LinForm::from_ratio(1, 2);
    // A fractional part of exactly 1/2 only happens for rational slopes and
    // is its own nearest-integer distance.
    let dist = match frac.cmp_form(&half, slope)? {
        std::cmp::Ordering::Greater => LinForm::one().sub(&frac),
        _ => frac,
    };
    if let Some(v) = slope.exact_value() {
        let val = &dist.a + BigRational::from_integer(dist.b.clone()) * v;
        return Ok((val.clone(), val));
    }
    let scale = BigRational::from_integer(dist.b.abs().max(BigInt::one()));
    let width = precision / scale;
    let (lo, hi) = slope.refine_to_width(&width)?;
    let b_rat = BigRational::from_integer(dist.b.clone());
    let (vlo, vhi) = if dist.b.is_positive() {
        (&dist.a + &b_rat * lo, &dist.a + &b_rat * hi)
    } else {
        (&dist.a + &b_rat * hi, &dist.a + &b_rat * lo)
    };
    Ok((vlo, vhi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    // Independent oracle: re-evaluate the expansion and compare exactly.
    fn euclid_roundtrip(num: i64, den: i64) -> bool {
        let digits = expand_rational(&big(num), &big(den));
        eval_cf(&digits) == BigRational::new(big(num), big(den))
    }

    #[test]
    fn expand_rational_examples() {
        assert_eq!(expand_rational(&big(1), &big(1)), vec![big(1)]);
        assert_eq!(
            expand_rational(&big(5), &big(12)),
            vec![big(0), big(2), big(2), big(2)]
        );
        assert_eq!(expand_rational(&big(7), &big(3)), vec![big(2), big(3)]);
        for (n, d) in [(1, 1), (5, 12), (7, 3), (355, 113), (-7, 5), (0, 9)] {
            assert!(euclid_roundtrip(n, d), "roundtrip failed for {n}/{d}");
        }
    }

    #[test]
    fn canonical_last_digit() {
        // Canonical expansions never end in 1 (length > 1).
        for n in 1..60i64 {
            for d in (n + 1)..60 {
                let digits = expand_rational(&big(n), &big(d));
                if digits.len() > 1 {
                    assert!(digits.last().unwrap() >= &big(2), "{n}/{d}: {digits:?}");
                }
            }
        }
    }

    #[test]
    fn fibonacci_convergents() {
        let s = Slope::periodic(vec![0], vec![1]).unwrap();
        let t = s.convergents(5).unwrap();
        let qs: Vec<i64> = (0..=5).map(|k| t.row(k).q.to_i64().unwrap()).collect();
        assert_eq!(qs, vec![1, 1, 2, 3, 5, 8]);
        assert_eq!(t.row(0).p, big(0));
        assert_eq!(t.row(0).q, big(1));
        assert_eq!(t.row(-1).q, big(0));
    }

    #[test]
    fn sqrt2_convergents() {
        let s = Slope::periodic(vec![0], vec![2]).unwrap();
        let t = s.convergents(3).unwrap();
        let qs: Vec<i64> = (0..=3).map(|k| t.row(k).q.to_i64().unwrap()).collect();
        assert_eq!(qs, vec![1, 2, 5, 12]);
    }

    #[test]
    fn convergent_identities() {
        // Determinant, interleaving, eps recurrence, and the (2.8)-style
        // bounds for a couple of digit patterns.
        for slope in [
            Slope::periodic(vec![0], vec![1]).unwrap(),
            Slope::periodic(vec![0], vec![2, 1, 3]).unwrap(),
        ] {
            let t = slope.convergents(12).unwrap();
            for k in 1..=12i64 {
                let det = &t.row(k - 1).p * &t.row(k).q - &t.row(k - 1).q * &t.row(k).p;
                assert_eq!(det, big((-1i64).pow(k as u32)));
            }
            for k in 1..=11i64 {
                // eps_{k+1} + a_{k+1} eps_k = eps_{k-1} exactly as forms.
                let a = big(t.row(k + 1).digit.unwrap() as i64);
                let lhs = t.row(k + 1).eps.add(&t.row(k).eps.scale_int(&a));
                assert_eq!(lhs, t.row(k - 1).eps);
            }
            for k in 0..=11i64 {
                // 1/(q_{k+1}+q_k) <= eps_k <= 1/q_{k+1}, certified.
                let lo = LinForm::from_rational(BigRational::new(
                    BigInt::one(),
                    &t.row(k + 1).q + &t.row(k).q,
                ));
                let hi =
                    LinForm::from_rational(BigRational::new(BigInt::one(), t.row(k + 1).q.clone()));
                assert_ne!(t.row(k).eps.cmp_form(&lo, &slope).unwrap(), Ordering::Less);
                assert_ne!(
                    t.row(k).eps.cmp_form(&hi, &slope).unwrap(),
                    Ordering::Greater
                );
                // Strict decrease.
                assert_eq!(
                    t.row(k + 1).eps.cmp_form(&t.row(k).eps, &slope).unwrap(),
                    Ordering::Less
                );
            }
        }
    }

    #[test]
    fn eps_identity_holds_at_k1_with_unit_digit() {
        // Golden-type digits: eps_0 = alpha (not ||alpha||) makes the
        // three-term identity work at k = 1: eps_2 + a_2 eps_1 = eps_0.
        let s = Slope::periodic(vec![0], vec![1]).unwrap();
        let t = s.convergents(2).unwrap();
        let lhs = t.row(2).eps.add(&t.row(1).eps);
        assert_eq!(lhs, t.row(0).eps);
        assert_eq!(t.row(0).eps, LinForm::alpha());
    }

    #[test]
    fn insufficient_digits_from_prefix() {
        let s = Slope::from_prefix(vec![0, 2, 2]).unwrap();
        assert!(s.convergents(2).is_ok());
        assert!(matches!(
            s.convergents(3),
            Err(Error::InsufficientDigits { .. })
        ));
    }

    #[test]
    fn norm_dist_examples() {
        let golden = Slope::periodic(vec![0], vec![1]).unwrap();
        let prec = BigRational::new(BigInt::one(), big(10_000_000));
        let (lo, hi) = norm_dist(2, &golden, &prec).unwrap();
        // ||2 alpha|| = 2 alpha - 1 = sqrt(5) - 2 = 0.2360679...
        let v = 0.236_067_977_499_789_7;
        assert!(lo.to_f64().unwrap() <= v && v <= hi.to_f64().unwrap());
        assert!((&hi - &lo) <= prec);

        let sqrt2 = Slope::periodic(vec![0], vec![2]).unwrap();
        let (lo, hi) = norm_dist(5, &sqrt2, &prec).unwrap();
        // ||5 alpha|| = 5 sqrt(2) - 7 = 0.0710678...
        let v = 0.071_067_811_865_475_24;
        assert!(lo.to_f64().unwrap() <= v && v <= hi.to_f64().unwrap());

        // For q = q_k the distance lands in the (2.8)-style window.
        let t = sqrt2.convergents(6).unwrap();
        for k in 0..=5i64 {
            let qk = t.row(k).q.to_u64().unwrap();
            let (lo, hi) = norm_dist(qk, &sqrt2, &prec).unwrap();
            let bound_lo = BigRational::new(BigInt::one(), &t.row(k + 1).q + &t.row(k).q);
            let bound_hi = BigRational::new(BigInt::one(), t.row(k + 1).q.clone());
            assert!(hi >= bound_lo && lo <= bound_hi);
        }
    }

    #[test]
    fn minimality_exhaustive_small() {
        // ||q alpha|| >= eps_k for all 1 <= q < q_{k+1}.
        let s = Slope::periodic(vec![0], vec![1]).unwrap();
        let t = s.convergents(10).unwrap();
        for k in 0..=9i64 {
            let qk1 = t.row(k + 1).q.to_u64().unwrap();
            if qk1 > 200 {
                break;
            }
            for q in 1..qk1 {
                let form = LinForm::new(BigRational::zero(), big(q as i64));
                let fl = form.floor(&s).unwrap();
                let frac = form.add_int(&-fl);
                let dist = if frac.cmp_form(&LinForm::from_ratio(1, 2), &s).unwrap()
                    == Ordering::Greater
                {
                    LinForm::one().sub(&frac)
                } else {
                    frac
                };
                assert_ne!(
                    dist.cmp_form(&t.row(k).eps, &s).unwrap(),
                    Ordering::Less,
                    "q={q} k={k}"
                );
            }
        }
    }

    #[test]
    fn badly_approximable_prefix() {
        let s = Slope::from_prefix(vec![0, 1, 1, 1]).unwrap();
        assert!(is_badly_approximable_prefix(&s, 1, 3).unwrap());
        let s2 = Slope::from_prefix(vec![0, 1, 5, 1]).unwrap();
        assert!(!is_badly_approximable_prefix(&s2, 4, 3).unwrap());
        let s3 = Slope::periodic(vec![0], vec![2]).unwrap();
        assert!(is_badly_approximable_prefix(&s3, 2, 20).unwrap());
    }

    #[test]
    fn parse_slope_specs() {
        assert!(Slope::parse("cf:0;2,2,2").is_ok());
        assert!(Slope::parse("cf:0;(1)").is_ok());
        assert!(Slope::parse("cf:0;2,(1,2)").is_ok());
        assert!(Slope::parse("rat:5/12").is_ok());
        assert!(Slope::parse("rat:12/5").is_err());
        assert!(Slope::parse("cf:1;2").is_err());
        assert!(Slope::parse("nonsense").is_err());
        // Parsed periodic slope agrees with the directly constructed one.
        let a = Slope::parse("cf:0;2,(1,2)").unwrap();
        for i in 1..10 {
            assert_eq!(
                a.digit(i).unwrap(),
                [2, 1, 2, 1, 2, 1, 2, 1, 2][i - 1],
                "digit {i}"
            );
        }
    }

    #[test]
    fn generator_source() {
        let gen: DigitFn = Arc::new(|i| if i <= 6 { Some(i as u64) } else { None });
        let s = Slope::from_generator(gen);
        assert_eq!(s.digit(3).unwrap(), 3);
        assert!(matches!(
            s.digit(7),
            Err(Error::InsufficientDigits { .. })
        ));
    }

    #[test]
    fn rational_slope_digits() {
        let s = Slope::from_rational(5, 12).unwrap();
        assert_eq!(s.digits_prefix(3).unwrap(), vec![0, 2, 2, 2]);
        assert!(s.is_rational());
    }
}
