//! Exact scalars: arbitrary-precision rationals and Gaussian rationals.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Arbitrary-precision rational, always in lowest terms with positive
/// denominator (maintained by `BigRational` itself).
pub type Rat = BigRational;

pub fn rat_i64(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Parse "p/q" or "p" (optional sign, arbitrary precision).
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| format!("bad rational numerator {num:?}"))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| format!("bad rational denominator {den:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in rational {s:?}"));
    }
    Ok(Rat::new(n, d))
}

/// Canonical "p/q" rendering (denominator always present).
pub fn format_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Human rendering: integers without "/1".
pub fn format_rat_short(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back on a quotient of f64s for magnitudes outside range.
        r.numer().to_f64().unwrap_or(f64::MAX) / r.denom().to_f64().unwrap_or(1.0)
    })
}

/// Exact conversion: every finite f64 is a dyadic rational.
pub fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float")
}

/// Gaussian rational: exact complex scalar `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CRat {
    pub re: Rat,
    pub im: Rat,
}

impl CRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        CRat { re, im }
    }

    pub fn from_rat(re: Rat) -> Self {
        CRat { re, im: Rat::zero() }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_rat(rat_i64(n))
    }

    /// Exact conversion from a complex float.
    pub fn from_c64(z: Complex64) -> Self {
        CRat { re: rat_from_f64(z.re), im: rat_from_f64(z.im) }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    pub fn zero() -> Self {
        CRat { re: Rat::zero(), im: Rat::zero() }
    }

    pub fn one() -> Self {
        CRat { re: Rat::one(), im: Rat::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        CRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Self) -> Self {
        CRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn neg(&self) -> Self {
        CRat { re: -self.re.clone(), im: -self.im.clone() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        CRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        CRat { re: &self.re * r, im: &self.im * r }
    }

    pub fn inv(&self) -> Option<Self> {
        let n = &self.re * &self.re + &self.im * &self.im;
        if n.is_zero() {
            return None;
        }
        Some(CRat { re: &self.re / &n, im: -(&self.im / &n) })
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", format_rat_short(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", format_rat_short(&self.im))
        } else if self.im.is_negative() {
            write!(f, "{}{}i", format_rat_short(&self.re), format_rat_short(&self.im))
        } else {
            write!(f, "{}+{}i", format_rat_short(&self.re), format_rat_short(&self.im))
        }
    }
}

/// Format a float with the given number of significant digits (deterministic,
/// used for all human-facing numeric output).
pub fn format_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{:.*e}", sig.saturating_sub(1), x);
    // Normalize "1.500000000000e0"-style exponents for readability.
    s
}

pub fn format_c64(z: Complex64, sig: usize) -> String {
    if z.im == 0.0 {
        format_sig(z.re, sig)
    } else if z.im < 0.0 {
        format!("{}{}i", format_sig(z.re, sig), format_sig(z.im, sig))
    } else {
        format!("{}+{}i", format_sig(z.re, sig), format_sig(z.im, sig))
    }
}
