//! Exact rational scalars and the small amount of linear algebra the rest of
//! the crate needs: rank, affine dimension and solving `M x = b`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use core::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Errors raised by the numeric layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NumError {
    /// Two operands (vectors, matrix and right-hand side, ...) disagree in length.
    DimensionMismatch { expected: usize, found: usize },
    /// `-inf + +inf` has no value.
    IndeterminateSum,
    /// Division by zero.
    DivisionByZero,
    /// A string could not be parsed as `num/den`.
    Parse(String),
}

impl fmt::Display for NumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            NumError::IndeterminateSum => f.write_str("indeterminate sum -inf + +inf"),
            NumError::DivisionByZero => f.write_str("division by zero"),
            NumError::Parse(s) => write!(f, "cannot parse rational from {s:?}"),
        }
    }
}

impl core::error::Error for NumError {}

/// An exact fraction, always kept in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `numer / denom`, reduced. Fails on a zero denominator.
    pub fn new(numer: i64, denom: i64) -> Result<Self, NumError> {
        if denom == 0 {
            return Err(NumError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom))))
    }

    pub fn from_bigints(numer: BigInt, denom: BigInt) -> Result<Self, NumError> {
        if denom.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Rational(BigRational::from_integer(n))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn signum(&self) -> Ordering {
        self.0.numer().sign().cmp(&num_bigint::Sign::NoSign)
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self, NumError> {
        if self.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, other: &Rational) -> Result<Self, NumError> {
        if other.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &other.0))
    }

    pub fn min_of<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
        if a <= b {
            a
        } else {
            b
        }
    }

    pub fn max_of<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
        if a >= b {
            a
        } else {
            b
        }
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_int(n)
    }
}

impl From<BigRational> for Rational {
    fn from(r: BigRational) -> Self {
        Rational(r)
    }
}

/// Always `num/den`, also for integers (`2/1`, `0/1`).
impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Accepts `n`, `n/d` and surrounding whitespace.
impl FromStr for Rational {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || NumError::Parse(String::from(s));
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| err())?;
        let d: BigInt = d.parse().map_err(|_| err())?;
        Rational::from_bigints(n, d).map_err(|_| err())
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
// Panics on a zero divisor, like the integer types; use `checked_div` otherwise.
forward_binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl core::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> core::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

/// A rational number or one of the two infinities, as used for arc capacities.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ExtendedRational {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl ExtendedRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedRational::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedRational::Finite(_))
    }

    pub fn zero() -> Self {
        ExtendedRational::Finite(Rational::zero())
    }

    pub fn checked_add(&self, other: &ExtendedRational) -> Result<ExtendedRational, NumError> {
        use ExtendedRational::*;
        match (self, other) {
            (NegInf, PosInf) | (PosInf, NegInf) => Err(NumError::IndeterminateSum),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
        }
    }

    pub fn checked_sum<'a, I>(iter: I) -> Result<ExtendedRational, NumError>
    where
        I: IntoIterator<Item = &'a ExtendedRational>,
    {
        iter.into_iter().try_fold(ExtendedRational::zero(), |acc, x| acc.checked_add(x))
    }

    pub fn neg(&self) -> ExtendedRational {
        match self {
            ExtendedRational::NegInf => ExtendedRational::PosInf,
            ExtendedRational::PosInf => ExtendedRational::NegInf,
            ExtendedRational::Finite(r) => ExtendedRational::Finite(-r),
        }
    }
}

impl From<Rational> for ExtendedRational {
    fn from(r: Rational) -> Self {
        ExtendedRational::Finite(r)
    }
}

impl PartialOrd for ExtendedRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedRational {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtendedRational::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRational::NegInf => f.write_str("-inf"),
            ExtendedRational::PosInf => f.write_str("+inf"),
            ExtendedRational::Finite(r) => r.fmt(f),
        }
    }
}

impl FromStr for ExtendedRational {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "-inf" => Ok(ExtendedRational::NegInf),
            "+inf" | "inf" => Ok(ExtendedRational::PosInf),
            t => t.parse().map(ExtendedRational::Finite),
        }
    }
}

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RatMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    /// Builds a matrix from rows; `cols` is needed to give a row-less matrix a width.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rational>>) -> Result<Self, NumError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        let n = rows.len();
        for row in rows {
            if row.len() != cols {
                return Err(NumError::DimensionMismatch { expected: cols, found: row.len() });
            }
            data.extend(row);
        }
        Ok(RatMatrix { rows: n, cols, data })
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let rows = rows.iter().map(|r| r.iter().map(|&v| Rational::from_int(v)).collect()).collect();
        RatMatrix::from_rows(cols, rows).expect("rows of equal length")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut t = RatMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.get(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self.get(r, c).recip().expect("pivot is nonzero");
            for j in c..self.cols {
                let v = self.get(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i == r || self.get(i, c).is_zero() {
                    continue;
                }
                let factor = self.get(i, c).clone();
                for j in c..self.cols {
                    let v = self.get(i, j) - &factor * self.get(r, j);
                    self.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

/// Linear rank by exact Gaussian elimination.
pub fn rank(m: &RatMatrix) -> usize {
    let mut work = m.clone();
    // Eliminating along the shorter side is cheaper and gives the same rank.
    if work.rows > work.cols {
        work = work.transpose();
    }
    work.rref().len()
}

/// Dimension of the affine hull of `points`; `-1` for no points.
pub fn affine_dimension(points: &[Vec<Rational>]) -> Result<isize, NumError> {
    let Some(first) = points.first() else {
        return Ok(-1);
    };
    let n = first.len();
    let mut diffs = Vec::with_capacity(points.len().saturating_sub(1));
    for p in &points[1..] {
        if p.len() != n {
            return Err(NumError::DimensionMismatch { expected: n, found: p.len() });
        }
        diffs.push(p.iter().zip(first).map(|(a, b)| a - b).collect());
    }
    let m = RatMatrix::from_rows(n, diffs)?;
    Ok(rank(&m) as isize)
}

/// Some exact solution of `m x = rhs`, or `None` when the system is inconsistent.
pub fn solve_linear(m: &RatMatrix, rhs: &[Rational]) -> Result<Option<Vec<Rational>>, NumError> {
    if rhs.len() != m.rows {
        return Err(NumError::DimensionMismatch { expected: m.rows, found: rhs.len() });
    }
    let mut aug = RatMatrix::zeros(m.rows, m.cols + 1);
    for (r, b) in rhs.iter().enumerate() {
        for c in 0..m.cols {
            aug.set(r, c, m.get(r, c).clone());
        }
        aug.set(r, m.cols, b.clone());
    }
    let pivots = aug.rref();
    if pivots.last() == Some(&m.cols) {
        return Ok(None);
    }
    // Free variables are set to zero.
    let mut x = vec![Rational::zero(); m.cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug.get(r, m.cols).clone();
    }
    Ok(Some(x))
}

/// `sum_i a_i b_i`; the slices must have equal length.
pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Convenience for tests and fixtures.
pub fn rat_vec(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| Rational::from_int(v)).collect()
}
