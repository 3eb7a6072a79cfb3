//! Exact linear forms `a + b*alpha` with certified sign computation.
//!
//! Every real quantity in this crate that depends on the slope is either a
//! rational number or a linear form `a + b*alpha` with rational `a` and
//! integer `b`. Signs and comparisons are decided by refining a rational
//! bracket of `alpha` obtained from its continued-fraction convergents; for
//! an irrational slope a nonzero form has a nonzero value, so the refinement
//! terminates. The slope itself is never materialized as a float.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cf::Slope;
use crate::error::{Error, Result};

/// Fixed-point scale for fast comparison keys: values are mapped to
/// `x * 2^120 mod 2^128`, which is injective for `|x| < 2^7`.
pub const KEY_FRAC_BITS: u32 = 120;

/// A linear form `a + b*alpha` with `a` rational and `b` an integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinForm {
    pub a: BigRational,
    pub b: BigInt,
}

impl LinForm {
    pub fn new(a: BigRational, b: BigInt) -> Self {
        LinForm { a, b }
    }

    pub fn zero() -> Self {
        LinForm {
            a: BigRational::zero(),
            b: BigInt::zero(),
        }
    }

    pub fn one() -> Self {
        LinForm::from_int(1)
    }

    /// The form `alpha` itself.
    pub fn alpha() -> Self {
        LinForm {
            a: BigRational::zero(),
            b: BigInt::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        LinForm {
            a: BigRational::from_integer(BigInt::from(n)),
            b: BigInt::zero(),
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        LinForm {
            a: r,
            b: BigInt::zero(),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        LinForm::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `a + b*alpha` with small integer inputs.
    pub fn with_alpha(a: i64, b: i64) -> Self {
        LinForm {
            a: BigRational::from_integer(BigInt::from(a)),
            b: BigInt::from(b),
        }
    }

    pub fn is_zero_form(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, other: &LinForm) -> LinForm {
        LinForm {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
        }
    }

    pub fn sub(&self, other: &LinForm) -> LinForm {
        LinForm {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
        }
    }

    pub fn neg(&self) -> LinForm {
        LinForm {
            a: -self.a.clone(),
            b: -self.b.clone(),
        }
    }

    pub fn add_int(&self, n: &BigInt) -> LinForm {
        LinForm {
            a: &self.a + BigRational::from_integer(n.clone()),
            b: self.b.clone(),
        }
    }

    pub fn add_i64(&self, n: i64) -> LinForm {
        self.add_int(&BigInt::from(n))
    }

    pub fn scale_int(&self, n: &BigInt) -> LinForm {
        LinForm {
            a: &self.a * BigRational::from_integer(n.clone()),
            b: &self.b * n,
        }
    }

    /// Certified sign of the form's value.
    ///
    /// For a rational slope the sign is computed exactly. Otherwise the
    /// convergent bracket of `alpha` is refined (doubling depth) until it
    /// separates the value from zero; a nonzero form always separates.
    pub fn sign(&self, slope: &Slope) -> Result<Ordering> {
        if self.b.is_zero() {
            return Ok(sign_of_rational(&self.a));
        }
        if let Some(v) = slope.exact_value() {
            let val = &self.a + BigRational::from_integer(self.b.clone()) * v;
            return Ok(sign_of_rational(&val));
        }
        // Irrational slope: zero iff the form is identically zero.
        if self.is_zero_form() {
            return Ok(Ordering::Equal);
        }
        let mut depth = slope.cached_depth().max(4);
        loop {
            let (lo, hi) = slope.bracket_at_least(depth)?;
            let b_rat = BigRational::from_integer(self.b.clone());
            let (vlo, vhi) = if self.b.is_positive() {
                (&self.a + &b_rat * lo, &self.a + &b_rat * hi)
            } else {
                (&self.a + &b_rat * hi, &self.a + &b_rat * lo)
            };
            if vlo.is_positive() {
                return Ok(Ordering::Greater);
            }
            if vhi.is_negative() {
                return Ok(Ordering::Less);
            }
            if slope.is_exhausted_at(depth) {
                return Err(Error::InsufficientDigits { needed: depth + 1 });
            }
            depth = depth.saturating_mul(2);
        }
    }

    pub fn cmp_form(&self, other: &LinForm, slope: &Slope) -> Result<Ordering> {
        self.sub(other).sign(slope)
    }

    pub fn is_positive_form(&self, slope: &Slope) -> Result<bool> {
        Ok(self.sign(slope)? == Ordering::Greater)
    }

    /// Certified floor of the form's value.
    pub fn floor(&self, slope: &Slope) -> Result<BigInt> {
        if self.b.is_zero() {
            return Ok(self.a.floor().to_integer());
        }
        if let Some(v) = slope.exact_value() {
            let val = &self.a + BigRational::from_integer(self.b.clone()) * v;
            return Ok(val.floor().to_integer());
        }
        let mut depth = slope.cached_depth().max(4);
        loop {
            let (lo, hi) = slope.bracket_at_least(depth)?;
            let b_rat = BigRational::from_integer(self.b.clone());
            let (vlo, vhi) = if self.b.is_positive() {
                (&self.a + &b_rat * lo, &self.a + &b_rat * hi)
            } else {
                (&self.a + &b_rat * hi, &self.a + &b_rat * lo)
            };
            let flo = vlo.floor().to_integer();
            let fhi = vhi.floor().to_integer();
            if flo == fhi {
                return Ok(flo);
            }
            if slope.is_exhausted_at(depth) {
                return Err(Error::InsufficientDigits { needed: depth + 1 });
            }
            depth = depth.saturating_mul(2);
        }
    }

    /// Approximate value as `f64` (for rendering and diagnostics only).
    pub fn to_f64(&self, slope: &Slope) -> Result<f64> {
        if self.b.is_zero() {
            return Ok(self.a.to_f64().unwrap_or(f64::NAN));
        }
        let alpha = slope.alpha_f64()?;
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        Ok(a + b * alpha)
    }

    /// Fast comparison key: `value * 2^120 mod 2^128` plus an error margin
    /// in key units. Valid for values in `(-2^7, 2^7)`.
    pub fn key(&self, slope: &Slope) -> Result<Key128> {
        let alpha_key = slope.key_alpha()?;
        let b = self.b.to_i128().ok_or_else(|| {
            Error::Precondition("linear-form coefficient too large for key path".into())
        })?;
        let a_scaled = (self.a.numer() << KEY_FRAC_BITS).div_floor(self.a.denom());
        let a_key = bigint_to_u128_wrapping(&a_scaled);
        let val = a_key.wrapping_add((b as u128).wrapping_mul(alpha_key));
        let margin = 2u128 * (b.unsigned_abs() + 2);
        Ok(Key128 { val, margin })
    }

    /// Exact-form rendering, e.g. `-2+5*alpha` or `1/4`.
    pub fn form_string(&self) -> String {
        if self.b.is_zero() {
            return format_rational(&self.a);
        }
        let b_part = if self.b == BigInt::one() {
            "alpha".to_string()
        } else if self.b == -BigInt::one() {
            "-alpha".to_string()
        } else {
            format!("{}*alpha", self.b)
        };
        if self.a.is_zero() {
            b_part
        } else if self.b.is_positive() {
            format!("{}+{}", format_rational(&self.a), b_part)
        } else {
            format!("{}{}", format_rational(&self.a), b_part)
        }
    }

    /// Certified decimal rendering with `sig` significant digits
    /// (round-half-up on the scaled integer).
    pub fn decimal(&self, slope: &Slope, sig: usize) -> Result<String> {
        decimal_string(self, slope, sig)
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.form_string())
    }
}

fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn sign_of_rational(r: &BigRational) -> Ordering {
    if r.is_positive() {
        Ordering::Greater
    } else if r.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

pub(crate) fn bigint_to_u128_wrapping(n: &BigInt) -> u128 {
    // Two's-complement truncation to 128 bits.
    let mask = (BigInt::one() << 128) - 1;
    let reduced = ((n % &mask) + &mask) % &mask;
    let m = reduced & mask;
    let (_, bytes) = m.to_bytes_le();
    let mut out = [0u8; 16];
    for (i, byte) in bytes.iter().take(16).enumerate() {
        out[i] = *byte;
    }
    u128::from_le_bytes(out)
}

/// A 128-bit wrapping fixed-point key with a rigorous error margin.
#[derive(Clone, Copy, Debug)]
pub struct Key128 {
    pub val: u128,
    pub margin: u128,
}

impl Key128 {
    /// Compare two keyed values. Returns `None` when the margins overlap and
    /// the caller must fall back to an exact comparison.
    pub fn fast_cmp(&self, other: &Key128) -> Option<Ordering> {
        let d1 = self.val.wrapping_sub(other.val);
        let d2 = other.val.wrapping_sub(self.val);
        let m = self.margin + other.margin;
        if d1 <= m || d2 <= m {
            return None;
        }
        // True difference times 2^120 lies in (-2^127, 2^127), so the
        // smaller wrapped distance identifies the sign.
        if d1 < d2 {
            Some(Ordering::Greater)
        } else {
            Some(Ordering::Less)
        }
    }
}

/// Certified comparison that uses the key fast path when available.
pub fn cmp_certified(x: &LinForm, y: &LinForm, slope: &Slope) -> Result<Ordering> {
    if let (Ok(kx), Ok(ky)) = (x.key(slope), y.key(slope)) {
        if let Some(ord) = kx.fast_cmp(&ky) {
            return Ok(ord);
        }
    }
    x.cmp_form(y, slope)
}

/// Sort indices of `forms` into increasing value order.
///
/// Uses the fixed-point keys for the bulk of the work and certifies every
/// adjacent pair exactly when margins overlap. Equal values are reported as
/// an error carrying the colliding pair (possible only for rational slopes).
pub fn sort_indices(forms: &[LinForm], slope: &Slope) -> Result<Vec<usize>> {
    let mut keyed: Vec<(u128, u128, usize)> = Vec::with_capacity(forms.len());
    let mut have_keys = true;
    for (i, f) in forms.iter().enumerate() {
        match f.key(slope) {
            Ok(k) => keyed.push((k.val, k.margin, i)),
            Err(_) => {
                have_keys = false;
                break;
            }
        }
    }
    let mut order: Vec<usize>;
    if have_keys {
        keyed.sort_unstable_by_key(|t| t.0);
        order = keyed.iter().map(|t| t.2).collect();
        // Certify adjacent pairs whose key intervals touch.
        for w in 0..order.len().saturating_sub(1) {
            let (k1, m1, i1) = keyed[w];
            let (k2, m2, i2) = keyed[w + 1];
            if k2.wrapping_sub(k1) <= m1 + m2 {
                match forms[i1].cmp_form(&forms[i2], slope)? {
                    Ordering::Less => {}
                    Ordering::Equal => {
                        return Err(Error::RationalTie(format!(
                            "values at indices {i1} and {i2} coincide"
                        )))
                    }
                    Ordering::Greater => {
                        // Key order was wrong within margin; fall back to a
                        // full certified sort.
                        return sort_indices_exact(forms, slope);
                    }
                }
            }
        }
    } else {
        order = sort_indices_exact(forms, slope)?;
    }
    Ok(order)
}

fn sort_indices_exact(forms: &[LinForm], slope: &Slope) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..forms.len()).collect();
    let mut err: Option<Error> = None;
    order.sort_by(|&i, &j| match forms[i].cmp_form(&forms[j], slope) {
        Ok(o) => o,
        Err(e) => {
            err.get_or_insert(e);
            Ordering::Equal
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    for w in 0..order.len().saturating_sub(1) {
        if forms[order[w]].cmp_form(&forms[order[w + 1]], slope)? == Ordering::Equal {
            return Err(Error::RationalTie(format!(
                "values at indices {} and {} coincide",
                order[w],
                order[w + 1]
            )));
        }
    }
    Ok(order)
}

/// Certified decimal string with `sig` significant digits.
pub fn decimal_string(form: &LinForm, slope: &Slope, sig: usize) -> Result<String> {
    assert!(sig >= 1);
    let sign = form.sign(slope)?;
    if sign == Ordering::Equal {
        return Ok("0".to_string());
    }
    let negative = sign == Ordering::Less;
    let magnitude = if negative { form.neg() } else { form.clone() };

    // Find the decimal exponent: 10^e <= value < 10^(e+1).
    let mut e: i64 = 0;
    let ten = BigRational::from_integer(BigInt::from(10));
    loop {
        let pow = pow10(e);
        let ge_low = magnitude.sub(&LinForm::from_rational(pow.clone())).sign(slope)?
            != Ordering::Less;
        let lt_high = magnitude
            .sub(&LinForm::from_rational(&pow * &ten))
            .sign(slope)?
            == Ordering::Less;
        if ge_low && lt_high {
            break;
        }
        if ge_low {
            e += 1;
        } else {
            e -= 1;
        }
        if e.abs() > 64 {
            return Err(Error::Precondition(
                "decimal rendering out of supported magnitude range".into(),
            ));
        }
    }

    // Scaled integer N = round(value * 10^(sig-1-e)), certified by bracketing.
    let shift = sig as i64 - 1 - e;
    let scale = pow10(shift);
    let n = scaled_round(&magnitude, &scale, slope)?;
    let digits = n.to_string();
    let mut s = String::new();
    if negative {
        s.push('-');
    }
    if e >= 0 {
        let int_len = (e + 1) as usize;
        if digits.len() <= int_len {
            s.push_str(&digits);
            for _ in 0..int_len - digits.len() {
                s.push('0');
            }
        } else {
            s.push_str(&digits[..int_len]);
            s.push('.');
            s.push_str(&digits[int_len..]);
        }
    } else {
        s.push_str("0.");
        for _ in 0..(-e - 1) {
            s.push('0');
        }
        s.push_str(&digits);
    }
    Ok(s)
}

fn pow10(e: i64) -> BigRational {
    let base = BigInt::from(10);
    if e >= 0 {
        BigRational::from_integer(base.pow(e as u32))
    } else {
        BigRational::new(BigInt::one(), base.pow((-e) as u32))
    }
}

/// round(value * scale) with certified bracketing (round-half-up).
fn scaled_round(value: &LinForm, scale: &BigRational, slope: &Slope) -> Result<BigInt> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    if let Some(v) = slope.exact_value() {
        let val = (&value.a + BigRational::from_integer(value.b.clone()) * v) * scale + &half;
        return Ok(val.floor().to_integer());
    }
    if value.b.is_zero() {
        let val = &value.a * scale + &half;
        return Ok(val.floor().to_integer());
    }
    let mut depth = slope.cached_depth().max(4);
    let b_rat = BigRational::from_integer(value.b.clone());
    loop {
        let (lo, hi) = slope.bracket_at_least(depth)?;
        let (vlo, vhi) = if value.b.is_positive() {
            (&value.a + &b_rat * lo, &value.a + &b_rat * hi)
        } else {
            (&value.a + &b_rat * hi, &value.a + &b_rat * lo)
        };
        let flo = (vlo * scale + &half).floor().to_integer();
        let fhi = (vhi * scale + &half).floor().to_integer();
        if flo == fhi {
            return Ok(flo);
        }
        if slope.is_exhausted_at(depth) {
            return Err(Error::InsufficientDigits { needed: depth + 1 });
        }
        depth = depth.saturating_mul(2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::Slope;

    fn golden() -> Slope {
        Slope::periodic(vec![0], vec![1]).unwrap()
    }

    fn sqrt2m1() -> Slope {
        Slope::periodic(vec![0], vec![2]).unwrap()
    }

    #[test]
    fn sign_of_simple_forms() {
        let s = golden();
        // 2*alpha - 1 > 0 for alpha = 0.618...
        assert_eq!(
            LinForm::with_alpha(-1, 2).sign(&s).unwrap(),
            Ordering::Greater
        );
        // 3*alpha vs 1 + alpha reduces to 2*alpha vs 1.
        let x = LinForm::with_alpha(0, 3);
        let y = LinForm::with_alpha(1, 1);
        assert_eq!(x.cmp_form(&y, &s).unwrap(), Ordering::Greater);
        assert_eq!(
            LinForm::with_alpha(0, 1).sign(&s).unwrap(),
            Ordering::Greater
        );
        assert_eq!(
            LinForm::with_alpha(-1, 1).sign(&s).unwrap(),
            Ordering::Less
        );
        assert_eq!(LinForm::zero().sign(&s).unwrap(), Ordering::Equal);
    }

    #[test]
    fn sign_for_rational_slope() {
        let s = Slope::from_rational(3, 10).unwrap();
        // 10*alpha - 3 == 0 exactly.
        assert_eq!(
            LinForm::with_alpha(-3, 10).sign(&s).unwrap(),
            Ordering::Equal
        );
        assert_eq!(
            LinForm::with_alpha(-3, 11).sign(&s).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn floor_certified() {
        let s = sqrt2m1(); // alpha = sqrt(2) - 1 = 0.4142...
        assert_eq!(LinForm::with_alpha(0, 5).floor(&s).unwrap(), BigInt::from(2));
        assert_eq!(
            LinForm::with_alpha(-2, 5).floor(&s).unwrap(),
            BigInt::from(0)
        );
        assert_eq!(
            LinForm::with_alpha(0, -1).floor(&s).unwrap(),
            BigInt::from(-1)
        );
    }

    #[test]
    fn finite_prefix_runs_out_of_digits() {
        let s = Slope::from_prefix(vec![0, 2, 2]).unwrap();
        // Knowing [0;2,2,...] to two digits cannot separate alpha from 5/12.
        let err = LinForm::with_alpha(-5, 12).sign(&s).unwrap_err();
        matches!(err, Error::InsufficientDigits { .. });
        // But coarse comparisons succeed.
        assert_eq!(
            LinForm::with_alpha(-1, 1).sign(&s).unwrap(),
            Ordering::Less
        );
    }

    #[test]
    fn key_ordering_matches_exact() {
        let s = sqrt2m1();
        let forms: Vec<LinForm> = (0..50).map(|q| frac_point(q, &s)).collect();
        let order = sort_indices(&forms, &s).unwrap();
        for w in 0..order.len() - 1 {
            assert_eq!(
                forms[order[w]].cmp_form(&forms[order[w + 1]], &s).unwrap(),
                Ordering::Less
            );
        }
    }

    // {q*alpha} as a form, for the sort test.
    fn frac_point(q: i64, slope: &Slope) -> LinForm {
        let f = LinForm::with_alpha(0, q);
        let fl = f.floor(slope).unwrap();
        f.add_int(&-fl)
    }

    #[test]
    fn decimal_rendering() {
        let s = golden();
        // alpha = (sqrt(5)-1)/2 = 0.6180339887498948(48...)
        let d = LinForm::alpha().decimal(&s, 16).unwrap();
        assert_eq!(d, "0.6180339887498948");
        // 2*alpha - 1 = 0.2360679...
        let d2 = LinForm::with_alpha(-1, 2).decimal(&s, 7).unwrap();
        assert_eq!(d2, "0.2360680");
        let d3 = LinForm::from_ratio(-5, 4).decimal(&s, 3).unwrap();
        assert_eq!(d3, "-1.25");
        assert_eq!(LinForm::from_int(3).decimal(&s, 4).unwrap(), "3.000");
    }

    #[test]
    fn form_strings() {
        assert_eq!(LinForm::with_alpha(-2, 5).form_string(), "-2+5*alpha");
        assert_eq!(LinForm::with_alpha(0, 1).form_string(), "alpha");
        assert_eq!(LinForm::with_alpha(3, -1).form_string(), "3-alpha");
        assert_eq!(LinForm::from_ratio(1, 4).form_string(), "1/4");
    }
}
