//! Integer model of the Picard lattice of a Del Pezzo surface.
//!
//! `S_n` is the plane blown up at `n <= 8` general points. Its Picard group is
//! `Z l + Z e_1 + ... + Z e_n` with `l^2 = 1`, `e_i . e_j = -delta_ij` and
//! `l . e_i = 0`. A class is stored as `(a; b_1, ..., b_n)` and stands for
//! `a l - sum b_i e_i`, so the anticanonical class `-K = 3l - sum e_i` is
//! `(3; 1, ..., 1)`.
//!
//! The text form of a class is `n:a;b1,...,bn` (for `n = 0` simply `0:a;`).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Largest number of blown-up points.
pub const MAX_POINTS: usize = 8;

/// Coefficients are kept below this magnitude so that every intersection
/// number of two stored classes fits comfortably in an `i64`.
pub const MAX_COEFF: i64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("surface index {0} out of range (expected 0..=8)")]
    SurfaceOutOfRange(i64),
    #[error("expected {expected} b-coefficients for S_{expected}, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("coefficient {0} exceeds the supported magnitude")]
    CoefficientOutOfRange(i64),
    #[error("classes live on different surfaces (S_{0} and S_{1})")]
    SurfaceMismatch(usize, usize),
    #[error("malformed class string: unexpected token `{token}`")]
    Parse { token: String },
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
    #[error("the Weyl move needs at least three blown-up points (surface is S_{0})")]
    WeylMoveUnavailable(usize),
}

/// Which Del Pezzo surface `S_n` a class lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SurfaceId(u8);

impl SurfaceId {
    pub fn new(n: usize) -> Result<Self, LatticeError> {
        if n > MAX_POINTS {
            return Err(LatticeError::SurfaceOutOfRange(n as i64));
        }
        Ok(SurfaceId(n as u8))
    }

    /// Number of blown-up points.
    pub fn n(self) -> usize {
        self.0 as usize
    }

    /// `K^2 = 9 - n`.
    pub fn degree(self) -> i64 {
        9 - self.0 as i64
    }

    pub fn all() -> impl Iterator<Item = SurfaceId> {
        (0..=MAX_POINTS as u8).map(SurfaceId)
    }
}

impl fmt::Display for SurfaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S_{}", self.0)
    }
}

impl Serialize for SurfaceId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.n() as u64)
    }
}

impl<'de> Deserialize<'de> for SurfaceId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let n = usize::deserialize(deserializer)?;
        SurfaceId::new(n).map_err(serde::de::Error::custom)
    }
}

/// A class `a l - sum b_i e_i` in `Pic S_n`.
///
/// Unused trailing slots of `b` are always zero, so the derived ordering is
/// lexicographic on `(n, a, b_1, ..., b_n)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DivisorClass {
    surface: SurfaceId,
    a: i64,
    b: [i64; MAX_POINTS],
}

fn check_coeff(c: i64) -> Result<i64, LatticeError> {
    if c.abs() >= MAX_COEFF {
        Err(LatticeError::CoefficientOutOfRange(c))
    } else {
        Ok(c)
    }
}

impl DivisorClass {
    pub fn new(surface: SurfaceId, a: i64, b: &[i64]) -> Result<Self, LatticeError> {
        if b.len() != surface.n() {
            return Err(LatticeError::WrongLength {
                expected: surface.n(),
                got: b.len(),
            });
        }
        let mut coeffs = [0i64; MAX_POINTS];
        for (slot, &c) in coeffs.iter_mut().zip(b) {
            *slot = check_coeff(c)?;
        }
        Ok(DivisorClass {
            surface,
            a: check_coeff(a)?,
            b: coeffs,
        })
    }

    /// Internal constructor for values produced by in-range arithmetic.
    pub(crate) fn from_parts(surface: SurfaceId, a: i64, b: [i64; MAX_POINTS]) -> Self {
        debug_assert!(b[surface.n()..].iter().all(|&c| c == 0));
        DivisorClass { surface, a, b }
    }

    pub fn zero(surface: SurfaceId) -> Self {
        Self::from_parts(surface, 0, [0; MAX_POINTS])
    }

    /// Pullback of a line.
    pub fn line(surface: SurfaceId) -> Self {
        Self::from_parts(surface, 1, [0; MAX_POINTS])
    }

    /// The exceptional curve over the `i`-th point (1-based).
    pub fn exceptional(surface: SurfaceId, i: usize) -> Self {
        assert!(i >= 1 && i <= surface.n(), "e_{i} does not exist on {surface}");
        let mut b = [0; MAX_POINTS];
        b[i - 1] = -1;
        Self::from_parts(surface, 0, b)
    }

    /// `K = -3l + sum e_i`.
    pub fn canonical(surface: SurfaceId) -> Self {
        let mut b = [0; MAX_POINTS];
        b[..surface.n()].iter_mut().for_each(|c| *c = -1);
        Self::from_parts(surface, -3, b)
    }

    pub fn anticanonical(surface: SurfaceId) -> Self {
        -Self::canonical(surface)
    }

    pub fn surface(&self) -> SurfaceId {
        self.surface
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> &[i64] {
        &self.b[..self.surface.n()]
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b.iter().all(|&c| c == 0)
    }

    /// Intersection number. Panics if the classes live on different surfaces
    /// or the result overflows; use [`intersect`] for a fallible version.
    pub fn dot(&self, other: &Self) -> i64 {
        intersect(self, other).unwrap_or_else(|e| panic!("{e}"))
    }

    pub fn self_intersection(&self) -> i64 {
        self.dot(self)
    }

    /// `-K . D = 3a - sum b_i`.
    pub fn kdeg(&self) -> i64 {
        3 * self.a - self.b().iter().sum::<i64>()
    }

    /// `g(D) = D.(D+K)/2 + 1`.
    pub fn sectional_genus(&self) -> i64 {
        let twice = self.self_intersection() - self.kdeg();
        assert!(twice % 2 == 0, "adjunction parity violated for {self}");
        twice / 2 + 1
    }

    /// `chi(D) = D.(D-K)/2 + 1`.
    pub fn euler_characteristic(&self) -> i64 {
        let twice = self.self_intersection() + self.kdeg();
        assert!(twice % 2 == 0, "adjunction parity violated for {self}");
        twice / 2 + 1
    }

    /// Applies `b_i -> b_{perm[i]}`; `perm` must be a permutation of `0..n`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.surface.n();
        assert_eq!(perm.len(), n, "permutation length must equal n");
        let mut b = [0; MAX_POINTS];
        for (i, &p) in perm.iter().enumerate() {
            b[i] = self.b[p];
        }
        Self::from_parts(self.surface, self.a, b)
    }

    /// The reflection in `l - e_1 - e_2 - e_3` (quadratic Cremona move on the
    /// first three points).
    pub fn weyl_move(&self) -> Result<Self, LatticeError> {
        if self.surface.n() < 3 {
            return Err(LatticeError::WeylMoveUnavailable(self.surface.n()));
        }
        let [b1, b2, b3] = [self.b[0], self.b[1], self.b[2]];
        let a = self.a;
        let mut b = self.b;
        b[0] = a - b2 - b3;
        b[1] = a - b1 - b3;
        b[2] = a - b1 - b2;
        Ok(Self::from_parts(self.surface, 2 * a - b1 - b2 - b3, b))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(i64, i64) -> Option<i64>) -> Self {
        assert_eq!(self.surface, other.surface, "classes on different surfaces");
        let mut b = [0; MAX_POINTS];
        let n = self.surface.n();
        for (slot, (x, y)) in b.iter_mut().zip(self.b[..n].iter().zip(&other.b[..n])) {
            *slot = f(*x, *y).expect("lattice overflow");
        }
        Self::from_parts(self.surface, f(self.a, other.a).expect("lattice overflow"), b)
    }
}

/// `D1 . D2 = a1 a2 - sum b1_i b2_i`.
pub fn intersect(d1: &DivisorClass, d2: &DivisorClass) -> Result<i64, LatticeError> {
    if d1.surface != d2.surface {
        return Err(LatticeError::SurfaceMismatch(d1.surface.n(), d2.surface.n()));
    }
    let mut acc = d1.a.checked_mul(d2.a).ok_or(LatticeError::Overflow)?;
    for (x, y) in d1.b().iter().zip(d2.b()) {
        let p = x.checked_mul(*y).ok_or(LatticeError::Overflow)?;
        acc = acc.checked_sub(p).ok_or(LatticeError::Overflow)?;
    }
    Ok(acc)
}

pub fn canonical_class(surface: SurfaceId) -> DivisorClass {
    DivisorClass::canonical(surface)
}

pub fn sectional_genus(l: &DivisorClass) -> i64 {
    l.sectional_genus()
}

pub fn euler_characteristic(d: &DivisorClass) -> i64 {
    d.euler_characteristic()
}

impl Add for DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: Self) -> Self {
        self.zip_with(&rhs, i64::checked_add)
    }
}

impl Sub for DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: Self) -> Self {
        self.zip_with(&rhs, i64::checked_sub)
    }
}

impl Neg for DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> Self {
        let mut b = self.b;
        b.iter_mut().for_each(|c| *c = -*c);
        Self::from_parts(self.surface, -self.a, b)
    }
}

impl Mul<DivisorClass> for i64 {
    type Output = DivisorClass;
    fn mul(self, rhs: DivisorClass) -> DivisorClass {
        let mut b = rhs.b;
        for c in b.iter_mut() {
            *c = c.checked_mul(self).expect("lattice overflow");
        }
        DivisorClass::from_parts(rhs.surface, rhs.a.checked_mul(self).expect("lattice overflow"), b)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{};", self.surface.n(), self.a)?;
        for (i, c) in self.b().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(token: &str) -> Result<i64, LatticeError> {
    // Reject forms like "+3" or " 3" so that parsing round-trips with printing.
    let digits = token.strip_prefix('-').unwrap_or(token);
    if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
        return Err(LatticeError::Parse {
            token: token.to_string(),
        });
    }
    if digits.len() > 1 && digits.starts_with('0') || token == "-0" {
        return Err(LatticeError::Parse {
            token: token.to_string(),
        });
    }
    let v: i64 = token.parse().map_err(|_| LatticeError::Parse {
        token: token.to_string(),
    })?;
    check_coeff(v)
}

impl FromStr for DivisorClass {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n_tok, rest) = s
            .split_once(':')
            .ok_or_else(|| LatticeError::Parse { token: s.to_string() })?;
        let n = parse_int(n_tok)?;
        if !(0..=MAX_POINTS as i64).contains(&n) {
            return Err(LatticeError::SurfaceOutOfRange(n));
        }
        let surface = SurfaceId(n as u8);
        let (a_tok, b_part) = rest.split_once(';').ok_or_else(|| LatticeError::Parse {
            token: rest.to_string(),
        })?;
        let a = parse_int(a_tok)?;
        let b: Vec<i64> = if b_part.is_empty() {
            Vec::new()
        } else {
            b_part.split(',').map(parse_int).collect::<Result<_, _>>()?
        };
        DivisorClass::new(surface, a, &b)
    }
}

impl Serialize for DivisorClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DivisorClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
