//! Exact univariate polynomials over the integers and rational functions
//! built from them.
//!
//! Coefficients are arbitrary-precision and stored in ascending degree
//! order. [`RationalFunction`] keeps a canonical form (common polynomial
//! factors removed, integer contents coprime, first nonzero denominator
//! coefficient positive), so equality of values is plain structural
//! equality. Power-series expansion is exact.

use std::fmt;

use num::bigint::Sign;
use num::{BigInt, BigRational, Integer, One, Signed, Zero};
use thiserror::Error;

/// Errors from rational-function construction and series expansion.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    /// Denominator polynomial is identically zero.
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    /// A power series needs a unit constant term in the denominator.
    #[error("denominator has zero constant term: no power series at 0")]
    ZeroConstantTerm,
    /// The Taylor coefficients are not all integers.
    #[error("series coefficient at degree {k} is not an integer")]
    NonIntegerSeries {
        /// First offending degree.
        k: usize,
    },
}

/// A polynomial with integer coefficients, ascending degree order.
///
/// The zero polynomial has an empty coefficient vector; otherwise the
/// top coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<BigInt>,
}

impl Poly {
    /// The zero polynomial.
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    /// The constant polynomial 1.
    pub fn one() -> Self {
        Poly { coeffs: vec![BigInt::one()] }
    }

    /// Builds from ascending coefficients, trimming leading zeros.
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    /// Builds from machine integers (convenience, mostly for tests).
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    /// Ascending coefficients (empty for zero).
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// True for the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `z^k` (zero beyond the stored degree).
    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Evaluation at an integer point.
    pub fn eval(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Sum.
    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Poly::new(coeffs)
    }

    /// Difference.
    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        Poly::new(coeffs)
    }

    /// Negation.
    pub fn neg(&self) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    /// Product (schoolbook; degrees here are tiny).
    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Poly::new(coeffs)
    }

    /// Greatest common divisor of the coefficients (positive; 0 for zero).
    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Exact division by a nonzero integer constant.
    fn div_int(&self, c: &BigInt) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .map(|a| {
                    let (q, r) = a.div_rem(c);
                    debug_assert!(r.is_zero());
                    q
                })
                .collect(),
        )
    }

    /// Exact division by a polynomial known to divide `self` over Q.
    ///
    /// Panics (debug) if the division leaves a remainder or a non-integer
    /// quotient; callers only divide by a gcd of `self`.
    fn div_exact(&self, g: &Poly) -> Poly {
        let (q, r) = rational_divrem(&to_rational(self), &to_rational(g));
        debug_assert!(r.iter().all(Zero::is_zero), "exact division had a remainder");
        from_rational(&q).expect("quotient of integer poly by its primitive divisor is integral")
    }
}

impl fmt::Display for Poly {
    /// Human form, lowest degree first: `1 - 16z^4`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
                first = false;
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let unit_coeff = mag.is_one() && k > 0;
            if !unit_coeff {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => f.write_str("z")?,
                _ => write!(f, "z^{k}")?,
            }
        }
        Ok(())
    }
}

fn to_rational(p: &Poly) -> Vec<BigRational> {
    p.coeffs.iter().map(|c| BigRational::from(c.clone())).collect()
}

fn from_rational(coeffs: &[BigRational]) -> Option<Poly> {
    let mut out = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        if !c.is_integer() {
            return None;
        }
        out.push(c.to_integer());
    }
    Some(Poly::new(out))
}

fn rational_trim(p: &mut Vec<BigRational>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

/// Division with remainder over Q.
fn rational_divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut rem = a.to_vec();
    rational_trim(&mut rem);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if rem.len() <= db {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigRational::zero(); rem.len() - db];
    while rem.len() > db {
        let dr = rem.len() - 1;
        let q = &rem[dr] / &lead;
        quot[dr - db] = q.clone();
        for i in 0..=db {
            let t = &q * &b[i];
            rem[dr - db + i] -= t;
        }
        rational_trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    (quot, rem)
}

/// Primitive gcd of two integer polynomials (Euclid over Q, then the
/// primitive integral part with positive leading coefficient). The gcd of
/// anything with zero is the other argument made primitive.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() && b.is_zero() {
        return Poly::zero();
    }
    let mut r0 = to_rational(a);
    let mut r1 = to_rational(b);
    rational_trim(&mut r0);
    rational_trim(&mut r1);
    while !r1.is_empty() {
        let (_, r2) = rational_divrem(&r0, &r1);
        r0 = r1;
        r1 = r2;
    }
    // Clear denominators, strip content, fix the sign.
    let lcm_den = r0
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints = Poly::new(
        r0.iter()
            .map(|c| (c * BigRational::from(lcm_den.clone())).to_integer())
            .collect(),
    );
    let content = ints.content();
    let mut g = ints.div_int(&content);
    if g.coeffs.last().is_some_and(Signed::is_negative) {
        g = g.neg();
    }
    g
}

/// Determinant of an integer matrix by fraction-free (Bareiss)
/// elimination. Exact; empty matrix has determinant 1.
pub fn det_bigint(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                let (q, r) = t.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division is exact");
                m[i][j] = q;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Interpolates the unique integer polynomial of degree < `xs.len()`
/// through the points `(xs[i], ys[i])` (xs pairwise distinct).
///
/// Panics if the interpolant is not integral — callers interpolate
/// determinants of integer polynomial matrices, which always are.
pub fn interpolate(xs: &[BigInt], ys: &[BigInt]) -> Poly {
    assert_eq!(xs.len(), ys.len());
    // Newton's divided differences over Q.
    let n = xs.len();
    let mut diffs: Vec<BigRational> = ys.iter().map(|y| BigRational::from(y.clone())).collect();
    let mut coeffs_newton = Vec::with_capacity(n);
    for level in 0..n {
        coeffs_newton.push(diffs[0].clone());
        if level + 1 == n {
            break;
        }
        for i in 0..n - level - 1 {
            let dx = BigRational::from(&xs[i + level + 1] - &xs[i]);
            diffs[i] = (&diffs[i + 1] - &diffs[i]) / dx;
        }
        diffs.truncate(n - level - 1);
    }
    // Expand the Newton form into monomial coefficients:
    // p = sum_level c_level * prod_{j < level} (z - xs[j]).
    let mut acc = vec![BigRational::zero(); n];
    let mut basis = vec![BigRational::one()];
    for (level, c) in coeffs_newton.iter().enumerate() {
        for (i, b) in basis.iter().enumerate() {
            acc[i] += c * b;
        }
        if level + 1 < n {
            let x = BigRational::from(xs[level].clone());
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (i, b) in basis.iter().enumerate() {
                next[i + 1] += b;
                next[i] -= &x * b;
            }
            basis = next;
        }
    }
    from_rational(&acc).expect("interpolant of integer data on integer nodes is integral here")
}

/// A quotient of integer polynomials in canonical form.
///
/// Canonical means: denominator nonzero, no common polynomial factor over
/// Q, the two integer contents are coprime, and the first nonzero
/// denominator coefficient (ascending order) is positive. Zero is `0/1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    den: Poly,
}

impl RationalFunction {
    /// Builds and canonicalizes `num / den`.
    pub fn new(num: Poly, den: Poly) -> Result<Self, SeriesError> {
        if den.is_zero() {
            return Err(SeriesError::ZeroDenominator);
        }
        if num.is_zero() {
            return Ok(RationalFunction { num: Poly::zero(), den: Poly::one() });
        }
        let g = poly_gcd(&num, &den);
        let mut num = num.div_exact(&g);
        let mut den = den.div_exact(&g);
        let c = num.content().gcd(&den.content());
        if !c.is_one() {
            num = num.div_int(&c);
            den = den.div_int(&c);
        }
        let lead_sign = den
            .coeffs
            .iter()
            .find(|c| !c.is_zero())
            .map(BigInt::sign)
            .unwrap_or(Sign::Plus);
        if lead_sign == Sign::Minus {
            num = num.neg();
            den = den.neg();
        }
        Ok(RationalFunction { num, den })
    }

    /// The zero function `0/1`.
    pub fn zero() -> Self {
        RationalFunction { num: Poly::zero(), den: Poly::one() }
    }

    /// The geometric series `1 / (1 - n z)`.
    pub fn geometric(n: u64) -> Self {
        RationalFunction {
            num: Poly::one(),
            den: Poly::new(vec![BigInt::one(), -BigInt::from(n)]),
        }
    }

    /// Numerator (canonical).
    pub fn num(&self) -> &Poly {
        &self.num
    }

    /// Denominator (canonical).
    pub fn den(&self) -> &Poly {
        &self.den
    }

    /// Sum, canonicalized.
    pub fn add(&self, other: &RationalFunction) -> RationalFunction {
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RationalFunction::new(num, den).expect("denominators are nonzero")
    }

    /// Value-equality via cross multiplication (equivalent to `==` given
    /// the canonical form, kept as an independent exact check).
    pub fn equivalent(&self, other: &RationalFunction) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    /// The first `k + 1` Taylor coefficients at 0, exactly.
    ///
    /// Requires a nonzero constant term in the denominator. Errors if any
    /// coefficient is non-integral (cannot happen for word-counting
    /// functions).
    pub fn series(&self, k: usize) -> Result<Vec<BigInt>, SeriesError> {
        let b0 = self.den.coeff(0);
        if b0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let b0 = BigRational::from(b0);
        let mut out: Vec<BigRational> = Vec::with_capacity(k + 1);
        for j in 0..=k {
            let mut t = BigRational::from(self.num.coeff(j));
            for i in 1..=j.min(self.den.coeffs.len().saturating_sub(1)) {
                t -= BigRational::from(self.den.coeff(i)) * &out[j - i];
            }
            out.push(t / &b0);
        }
        let mut ints = Vec::with_capacity(out.len());
        for (j, c) in out.iter().enumerate() {
            if !c.is_integer() {
                return Err(SeriesError::NonIntegerSeries { k: j });
            }
            ints.push(c.to_integer());
        }
        Ok(ints)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == Poly::one() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / ({})", self.num, self.den)
    }
}
