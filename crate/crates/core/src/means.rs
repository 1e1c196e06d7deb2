//! Extended non-negative values and two-point power means.
//!
//! `M_p(a, b, λ)` is the weighted power mean `((1-λ)a^p + λb^p)^(1/p)`,
//! with the geometric mean at `p = 0`, `max` at `+inf` and `min` at `-inf`.
//! Whenever `a * b = 0` the mean is defined to be 0 for every `p`.
//! Infinite arguments follow the limit of the formula.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A value in `[0, +inf]`. Never NaN.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct ExtNonNeg(f64);

impl ExtNonNeg {
    pub const ZERO: ExtNonNeg = ExtNonNeg(0.0);
    pub const ONE: ExtNonNeg = ExtNonNeg(1.0);
    pub const INFINITY: ExtNonNeg = ExtNonNeg(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::InvalidValue(value));
        }
        // normalise -0.0
        Ok(ExtNonNeg(value + 0.0))
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Product, rejecting the undefined `0 * inf`.
    pub fn checked_mul(self, other: Self) -> Result<Self> {
        if (self.is_zero() && other.is_infinite()) || (self.is_infinite() && other.is_zero()) {
            return Err(Error::ZeroTimesInfinity);
        }
        Ok(ExtNonNeg(self.0 * other.0))
    }
}

impl Eq for ExtNonNeg {}

impl Ord for ExtNonNeg {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl PartialOrd for ExtNonNeg {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Add for ExtNonNeg {
    type Output = ExtNonNeg;
    fn add(self, rhs: Self) -> Self {
        ExtNonNeg(self.0 + rhs.0)
    }
}

impl fmt::Display for ExtNonNeg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl TryFrom<f64> for ExtNonNeg {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        ExtNonNeg::new(v)
    }
}

/// Exponent selecting the mean `M_p` and the convolution `⋆_p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PParam {
    Finite(f64),
    PlusInfinity,
    MinusInfinity,
}

impl PParam {
    pub fn finite(p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::InvalidExponent(format!("{p}")));
        }
        Ok(PParam::Finite(p + 0.0))
    }

    /// Real value, with the infinities mapped to `±f64::INFINITY`.
    pub fn value(self) -> f64 {
        match self {
            PParam::Finite(p) => p,
            PParam::PlusInfinity => f64::INFINITY,
            PParam::MinusInfinity => f64::NEG_INFINITY,
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, PParam::Finite(p) if p == 0.0)
    }

    /// True when `self >= -1/n`, the range of the Borell-Brascamp-Lieb inequality.
    pub fn in_bbl_range(self, n: usize) -> bool {
        match self {
            PParam::PlusInfinity => true,
            PParam::MinusInfinity => false,
            PParam::Finite(p) => n as f64 * p + 1.0 >= -DUAL_EPS,
        }
    }
}

impl PartialOrd for PParam {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value().partial_cmp(&other.value())
    }
}

impl fmt::Display for PParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PParam::Finite(p) => write!(f, "{p}"),
            PParam::PlusInfinity => f.write_str("inf"),
            PParam::MinusInfinity => f.write_str("-inf"),
        }
    }
}

impl FromStr for PParam {
    type Err = Error;

    /// Accepts `inf`, `+inf`, `-inf`, decimals and fractions such as `-1/2`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => return Ok(PParam::PlusInfinity),
            "-inf" | "-infinity" => return Ok(PParam::MinusInfinity),
            _ => {}
        }
        let bad = || Error::InvalidExponent(s.to_string());
        let value = if let Some((num, den)) = t.split_once('/') {
            let num: f64 = num.trim().parse().map_err(|_| bad())?;
            let den: f64 = den.trim().parse().map_err(|_| bad())?;
            if den == 0.0 {
                return Err(bad());
            }
            num / den
        } else {
            t.parse::<f64>().map_err(|_| bad())?
        };
        PParam::finite(value)
    }
}

impl Serialize for PParam {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PParam {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => PParam::finite(v).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A rational weight `λ = k/m` in `(0, 1)`, stored in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lambda {
    num: u32,
    den: u32,
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Lambda {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || num >= den {
            return Err(Error::InvalidLambda(format!("{num}/{den} is not in (0,1)")));
        }
        let g = gcd(num, den);
        Ok(Lambda {
            num: num / g,
            den: den / g,
        })
    }

    pub fn half() -> Self {
        Lambda { num: 1, den: 2 }
    }

    pub fn num(self) -> u32 {
        self.num
    }

    pub fn den(self) -> u32 {
        self.den
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `1 - λ`, computed from the exact rational.
    pub fn complement(self) -> f64 {
        (self.den - self.num) as f64 / self.den as f64
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Lambda {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidLambda(s.to_string());
        let (k, m) = s.trim().split_once('/').ok_or_else(bad)?;
        let k: u32 = k.trim().parse().map_err(|_| bad())?;
        let m: u32 = m.trim().parse().map_err(|_| bad())?;
        Lambda::new(k, m)
    }
}

impl Serialize for Lambda {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Lambda {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Below this `|p|` the mean is evaluated in the log domain.
const LOG_DOMAIN_EPS: f64 = 1e-12;
/// Slack on `np + 1 = 0` when deciding whether `p` sits on `-1/n`.
const DUAL_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
enum KernelKind {
    Max,
    Min,
    Log,
    PowPos(f64),
    PowNeg(f64),
}

/// The mean split into a per-argument transform, a combination key and a
/// monotone finaliser, so that `sup_x M_p(a_x, b_x)` can be found by
/// comparing keys only.
///
/// `mp_mean` is exactly `finalize(combine(pre0(a), pre1(b)))`, which is what
/// lets the fast convolution reproduce the brute-force result bit for bit.
#[derive(Clone, Copy, Debug)]
pub(crate) struct MeanKernel {
    kind: KernelKind,
    w0: f64,
    w1: f64,
}

impl MeanKernel {
    pub(crate) fn new(lambda: Lambda, p: PParam) -> Self {
        let kind = match p {
            PParam::PlusInfinity => KernelKind::Max,
            PParam::MinusInfinity => KernelKind::Min,
            PParam::Finite(p) if p.abs() < LOG_DOMAIN_EPS => KernelKind::Log,
            PParam::Finite(p) if p > 0.0 => KernelKind::PowPos(p),
            PParam::Finite(p) => KernelKind::PowNeg(p),
        };
        MeanKernel {
            kind,
            w0: lambda.complement(),
            w1: lambda.value(),
        }
    }

    /// Key of any pair with a zero argument; also the neutral element of `better`.
    #[inline]
    pub(crate) fn zero_key(&self) -> f64 {
        match self.kind {
            KernelKind::Max | KernelKind::Min => 0.0,
            KernelKind::Log | KernelKind::PowPos(_) => f64::NEG_INFINITY,
            KernelKind::PowNeg(_) => f64::INFINITY,
        }
    }

    /// Transformed first argument (assumed positive).
    #[inline]
    pub(crate) fn pre0(&self, a: f64) -> f64 {
        match self.kind {
            KernelKind::Max | KernelKind::Min => a,
            KernelKind::Log => self.w0 * a.ln(),
            KernelKind::PowPos(p) | KernelKind::PowNeg(p) => self.w0 * a.powf(p),
        }
    }

    /// Transformed second argument (assumed positive).
    #[inline]
    pub(crate) fn pre1(&self, b: f64) -> f64 {
        match self.kind {
            KernelKind::Max | KernelKind::Min => b,
            KernelKind::Log => self.w1 * b.ln(),
            KernelKind::PowPos(p) | KernelKind::PowNeg(p) => self.w1 * b.powf(p),
        }
    }

    #[inline]
    pub(crate) fn combine(&self, x: f64, y: f64) -> f64 {
        match self.kind {
            KernelKind::Max => x.max(y),
            KernelKind::Min => x.min(y),
            _ => x + y,
        }
    }

    /// Whether key `x` gives a strictly larger mean than key `y`.
    #[inline]
    pub(crate) fn better(&self, x: f64, y: f64) -> bool {
        match self.kind {
            KernelKind::PowNeg(_) => x < y,
            _ => x > y,
        }
    }

    #[inline]
    pub(crate) fn finalize(&self, key: f64) -> f64 {
        match self.kind {
            KernelKind::Max | KernelKind::Min => key,
            KernelKind::Log => key.exp(),
            KernelKind::PowPos(p) => {
                if key == f64::NEG_INFINITY {
                    0.0
                } else {
                    key.powf(1.0 / p)
                }
            }
            // inf^(1/p) = 0 and 0^(1/p) = inf cover both conventions
            KernelKind::PowNeg(p) => key.powf(1.0 / p),
        }
    }

    #[inline]
    pub(crate) fn key(&self, a: f64, b: f64) -> f64 {
        if a == 0.0 || b == 0.0 {
            self.zero_key()
        } else {
            self.combine(self.pre0(a), self.pre1(b))
        }
    }
}

/// The two-point power mean `M_p(a, b, λ)`.
pub fn mp_mean(a: ExtNonNeg, b: ExtNonNeg, lambda: Lambda, p: PParam) -> ExtNonNeg {
    let kernel = MeanKernel::new(lambda, p);
    ExtNonNeg(kernel.finalize(kernel.key(a.get(), b.get())) + 0.0)
}

/// `p / (np + 1)`, the mean index on the right-hand side of the
/// Borell-Brascamp-Lieb inequality.
pub fn dual_exponent(p: PParam, n: usize) -> Result<PParam> {
    if n == 0 {
        return Err(Error::InvalidExponent("dimension must be positive".into()));
    }
    let nf = n as f64;
    match p {
        PParam::PlusInfinity => Ok(PParam::Finite(1.0 / nf)),
        PParam::MinusInfinity => Err(Error::ExponentOutOfRange { p: p.to_string(), n }),
        PParam::Finite(p) => {
            let denom = nf * p + 1.0;
            if denom.abs() <= DUAL_EPS {
                Ok(PParam::MinusInfinity)
            } else if denom < 0.0 {
                Err(Error::ExponentOutOfRange { p: p.to_string(), n })
            } else {
                Ok(PParam::Finite(p / denom + 0.0))
            }
        }
    }
}
