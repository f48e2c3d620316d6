//! Exact arithmetic for sparse multivariate Laurent polynomials over
//! arbitrary-precision integers.
//!
//! Every field element the engine manipulates is either a [`LaurentPoly`]
//! in a fixed base cluster or a [`LaurentFraction`] of two of them.
//! Coefficients are `BigInt`: numerators on Euclidean types overflow 64-bit
//! machine integers quickly.
//!
//! Equality of fractions is decided by cross-multiplication; no multivariate
//! gcd is ever computed.

use num_bigint::BigInt;
use num_traits_shim::{is_one, is_zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Thin helpers so we do not pull `num-traits` in just for two predicates.
mod num_traits_shim {
    use num_bigint::BigInt;

    pub fn is_zero(x: &BigInt) -> bool {
        x.sign() == num_bigint::Sign::NoSign
    }

    pub fn is_one(x: &BigInt) -> bool {
        x.sign() == num_bigint::Sign::Plus && x.magnitude().to_u32_digits() == [1]
    }
}

/// Exponent vector of a single Laurent monomial.
///
/// The ordering is the canonical term order used everywhere a term sequence
/// must be deterministic (comparison, display, serialization): at the first
/// index where two vectors differ, the one with the *larger* exponent sorts
/// first. This is the order in which one customarily writes a polynomial,
/// highest powers of the earliest variable leading, and it makes the
/// monomial `x1` sort before `x2`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExponentVec(Vec<i32>);

impl ExponentVec {
    pub fn new(entries: Vec<i32>) -> Self {
        ExponentVec(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[i32] {
        &self.0
    }

    fn unit(rank: usize, i: usize) -> Self {
        let mut e = vec![0; rank];
        e[i] = 1;
        ExponentVec(e)
    }

    fn sum(&self, other: &Self) -> Self {
        ExponentVec(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }
}

impl Ord for ExponentVec {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            if a != b {
                // Larger exponent first.
                return b.cmp(a);
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for ExponentVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Denominator vector of a nonzero Laurent polynomial: entry `d_i` is the
/// negated minimum exponent of variable `i` over all terms, so `d_i > 0`
/// exactly when `x_i` appears in the denominator of the reduced fraction.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct DenVector(pub Vec<i32>);

impl DenVector {
    pub fn entries(&self) -> &[i32] {
        &self.0
    }
}

impl fmt::Display for DenVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{d}")?;
        }
        write!(f, ")")
    }
}

/// A sparse Laurent polynomial in `rank` variables with `BigInt`
/// coefficients. The zero polynomial is the empty term map; stored
/// coefficients are never zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LaurentPoly {
    rank: usize,
    terms: BTreeMap<ExponentVec, BigInt>,
}

impl LaurentPoly {
    pub fn zero(rank: usize) -> Self {
        LaurentPoly {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(rank: usize) -> Self {
        Self::constant(rank, 1)
    }

    pub fn constant(rank: usize, c: impl Into<BigInt>) -> Self {
        Self::monomial(rank, &vec![0; rank], c)
    }

    /// The coordinate monomial `x_i` (0-based index).
    pub fn variable(rank: usize, i: usize) -> Self {
        assert!(i < rank, "variable index {i} out of range for rank {rank}");
        let mut terms = BTreeMap::new();
        terms.insert(ExponentVec::unit(rank, i), BigInt::from(1));
        LaurentPoly { rank, terms }
    }

    pub fn monomial(rank: usize, exponents: &[i32], c: impl Into<BigInt>) -> Self {
        assert_eq!(exponents.len(), rank, "exponent vector length != rank");
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !is_zero(&c) {
            terms.insert(ExponentVec::new(exponents.to_vec()), c);
        }
        LaurentPoly { rank, terms }
    }

    /// Builds a polynomial from raw terms, merging duplicates and dropping
    /// zero coefficients.
    pub fn from_terms<I>(rank: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i32>, BigInt)>,
    {
        let mut map: BTreeMap<ExponentVec, BigInt> = BTreeMap::new();
        for (exps, c) in terms {
            assert_eq!(exps.len(), rank, "exponent vector length != rank");
            let entry = map.entry(ExponentVec::new(exps)).or_default();
            *entry += c;
        }
        map.retain(|_, c| !is_zero(c));
        LaurentPoly { rank, terms: map }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(e, c)| e.entries().iter().all(|&x| x == 0) && is_one(c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in the canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVec, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficients_all_positive(&self) -> bool {
        self.terms.values().all(|c| c.sign() == num_bigint::Sign::Plus)
    }

    fn assert_same_rank(&self, other: &Self) {
        assert_eq!(
            self.rank, other.rank,
            "rank mismatch: {} vs {}",
            self.rank, other.rank
        );
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            rank: self.rank,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_rank(other);
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            let entry = terms.entry(e.clone()).or_default();
            *entry += c;
        }
        terms.retain(|_, c| !is_zero(c));
        LaurentPoly {
            rank: self.rank,
            terms,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_rank(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.rank);
        }
        // Cluster-variable numerators fill compact boxes of exponents, so
        // for large products a dense accumulation grid beats the term map
        // by a wide margin. Fall back to the map when the support is
        // genuinely sparse.
        let pairs = self.terms.len().saturating_mul(other.terms.len());
        if pairs > 2048
            && let Some(grid) = DenseGrid::for_product(self, other)
        {
            return grid.into_poly(self.rank);
        }
        let mut terms: BTreeMap<ExponentVec, BigInt> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let entry = terms.entry(ea.sum(eb)).or_default();
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| !is_zero(c));
        LaurentPoly {
            rank: self.rank,
            terms,
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.rank);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplies by the monomial `x^shift`.
    pub fn shift(&self, shift: &[i32]) -> Self {
        assert_eq!(shift.len(), self.rank);
        LaurentPoly {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    (
                        ExponentVec::new(
                            e.entries().iter().zip(shift).map(|(a, b)| a + b).collect(),
                        ),
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    /// Entrywise minimum exponent over all terms; `None` for the zero
    /// polynomial.
    pub fn min_exponents(&self) -> Option<Vec<i32>> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let mut min = first.entries().to_vec();
        for e in it {
            for (m, &x) in min.iter_mut().zip(e.entries()) {
                if x < *m {
                    *m = x;
                }
            }
        }
        Some(min)
    }

    /// The denominator vector `d` with `self = p(x) / prod x_i^{d_i}` in
    /// reduced form.
    ///
    /// Panics on the zero polynomial, which has no denominator vector.
    pub fn den_vector(&self) -> DenVector {
        let min = self
            .min_exponents()
            .expect("the zero polynomial has no denominator vector");
        DenVector(min.into_iter().map(|m| -m).collect())
    }

    /// True iff `x_i` (0-based) appears in the denominator of the reduced
    /// fraction, i.e. the i-th denominator-vector entry is positive.
    pub fn has_var_in_denominator(&self, i: usize) -> bool {
        assert!(!self.is_zero(), "the zero polynomial has no denominator");
        assert!(i < self.rank, "variable index {i} out of range");
        self.den_vector().0[i] > 0
    }

    /// Exact division in the Laurent ring: returns `q` with `q * divisor ==
    /// self` when such a Laurent polynomial exists, `None` otherwise.
    ///
    /// Both operands are shifted by monomials into the polynomial subring
    /// (monomials are units here, so the full min-exponent shift is taken),
    /// then reduced against the single divisor under a graded lexicographic
    /// term order; the division is exact iff the remainder reaches zero.
    ///
    /// Panics if `divisor` is zero.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        self.assert_same_rank(divisor);
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Self::zero(self.rank));
        }

        let min_a = self.min_exponents().expect("nonzero");
        let min_b = divisor.min_exponents().expect("nonzero");
        let neg = |v: &[i32]| v.iter().map(|&x| -x).collect::<Vec<_>>();
        let a = self.shift(&neg(&min_a));
        let b = divisor.shift(&neg(&min_b));

        let quotient = poly_div_exact(&a, &b)?;

        // self = a * x^min_a, divisor = b * x^min_b, a = q * b
        // => self / divisor = q * x^(min_a - min_b).
        let back: Vec<i32> = min_a.iter().zip(&min_b).map(|(x, y)| x - y).collect();
        Some(quotient.shift(&back))
    }

    /// Evaluates the polynomial at the given images, one per variable, over
    /// a single common denominator built from positive powers of the image
    /// numerators and denominators. No gcd reduction is performed.
    pub fn substitute(&self, images: &[LaurentFraction]) -> LaurentFraction {
        assert_eq!(
            images.len(),
            self.rank,
            "need one image per variable ({} given for rank {})",
            images.len(),
            self.rank
        );
        let target_rank = if let Some(first) = images.first() {
            first.numerator().rank()
        } else {
            0
        };
        for img in images {
            assert_eq!(img.numerator().rank(), target_rank, "image rank mismatch");
            assert!(!img.denominator().is_zero(), "zero denominator among images");
        }
        if self.is_zero() {
            return LaurentFraction::from_poly(LaurentPoly::zero(target_rank));
        }

        // pos[i] / neg[i]: largest positive / negative exponent of x_i seen.
        let mut pos = vec![0i32; self.rank];
        let mut neg = vec![0i32; self.rank];
        for e in self.terms.keys() {
            for (i, &x) in e.entries().iter().enumerate() {
                pos[i] = pos[i].max(x);
                neg[i] = neg[i].max(-x);
            }
        }

        // Power tables: num_pows[i][k] = images[i].num^k, similarly den_pows.
        let num_pows: Vec<Vec<LaurentPoly>> = images
            .iter()
            .enumerate()
            .map(|(i, img)| power_table(img.numerator(), (pos[i] + neg[i]) as u32))
            .collect();
        let den_pows: Vec<Vec<LaurentPoly>> = images
            .iter()
            .enumerate()
            .map(|(i, img)| power_table(img.denominator(), (pos[i] + neg[i]) as u32))
            .collect();

        // Common denominator D = prod_i den_i^pos[i] * num_i^neg[i].
        let mut common_den = LaurentPoly::one(target_rank);
        for i in 0..self.rank {
            common_den = common_den.mul(&den_pows[i][pos[i] as usize]);
            common_den = common_den.mul(&num_pows[i][neg[i] as usize]);
        }

        let mut numerator = LaurentPoly::zero(target_rank);
        for (e, c) in &self.terms {
            let mut term = LaurentPoly::constant(target_rank, c.clone());
            for (i, &x) in e.entries().iter().enumerate() {
                let up = x.max(0);
                let down = (-x).max(0);
                // image^x scaled by D restricted to variable i.
                term = term.mul(&num_pows[i][(up + neg[i] - down) as usize]);
                term = term.mul(&den_pows[i][(down + pos[i] - up) as usize]);
            }
            numerator = numerator.add(&term);
        }

        LaurentFraction::new(numerator, common_den)
    }

    /// Canonical JSON form, bit-exact across platforms.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("laurent polynomial serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}

/// Total order on Laurent polynomials of equal rank: term lists in
/// canonical order are compared lexicographically by (exponent vector,
/// coefficient). Equality coincides with identity of term maps.
impl Ord for LaurentPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank
            .cmp(&other.rank)
            .then_with(|| self.terms.iter().cmp(other.terms.iter()))
    }
}

impl PartialOrd for LaurentPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let negative = c.sign() == num_bigint::Sign::Minus;
            let mag = c.magnitude();
            if idx == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let vars: Vec<String> = e
                .entries()
                .iter()
                .enumerate()
                .filter(|&(_, &x)| x != 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        format!("x{}", i + 1)
                    } else {
                        format!("x{}^{}", i + 1, x)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.to_u32_digits() == [1] {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    exp: Vec<i32>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    rank: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for LaurentPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = PolyRepr {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| TermRepr {
                    exp: e.entries().to_vec(),
                    coeff: c.to_string(),
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(deserializer)?;
        let mut terms = BTreeMap::new();
        for t in repr.terms {
            if t.exp.len() != repr.rank {
                return Err(D::Error::custom(format!(
                    "exponent vector of length {} in a polynomial of rank {}",
                    t.exp.len(),
                    repr.rank
                )));
            }
            let coeff: BigInt = t
                .coeff
                .parse()
                .map_err(|e| D::Error::custom(format!("bad coefficient {:?}: {e}", t.coeff)))?;
            if is_zero(&coeff) {
                return Err(D::Error::custom("explicit zero coefficient"));
            }
            if terms.insert(ExponentVec::new(t.exp), coeff).is_some() {
                return Err(D::Error::custom("duplicate exponent vector"));
            }
        }
        Ok(LaurentPoly {
            rank: repr.rank,
            terms,
        })
    }
}

/// An unreduced quotient of two Laurent polynomials with nonzero
/// denominator. Equality is decided by cross-multiplication, which avoids
/// any gcd computation and stays correct for elements that are not Laurent
/// polynomials themselves.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LaurentFraction {
    num: LaurentPoly,
    den: LaurentPoly,
}

impl LaurentFraction {
    pub fn new(num: LaurentPoly, den: LaurentPoly) -> Self {
        assert_eq!(num.rank(), den.rank(), "fraction rank mismatch");
        assert!(!den.is_zero(), "fraction with zero denominator");
        LaurentFraction { num, den }
    }

    pub fn from_poly(p: LaurentPoly) -> Self {
        let one = LaurentPoly::one(p.rank());
        LaurentFraction { num: p, den: one }
    }

    pub fn numerator(&self) -> &LaurentPoly {
        &self.num
    }

    pub fn denominator(&self) -> &LaurentPoly {
        &self.den
    }

    pub fn rank(&self) -> usize {
        self.num.rank()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, other: &Self) -> Self {
        LaurentFraction::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn add(&self, other: &Self) -> Self {
        LaurentFraction::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    /// True iff the two fractions represent the same field element:
    /// `a.num * b.den == b.num * a.den`.
    pub fn equals(&self, other: &Self) -> bool {
        self.num.mul(&other.den) == other.num.mul(&self.den)
    }

    /// True iff the fraction equals the given Laurent polynomial.
    pub fn equals_poly(&self, p: &LaurentPoly) -> bool {
        self.num == p.mul(&self.den)
    }
}

impl PartialEq for LaurentFraction {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl Eq for LaurentFraction {}

impl fmt::Display for LaurentFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

/// Dense accumulation grid over a bounding box of exponent vectors, laid
/// out row-major with the first variable slowest. Flat index order is
/// therefore ascending lexicographic order of exponent vectors.
struct DenseGrid {
    mins: Vec<i32>,
    strides: Vec<usize>,
    dims: Vec<usize>,
    cells: Vec<BigInt>,
}

/// Largest box a dense computation may allocate, in cells.
const DENSE_CELL_CAP: usize = 16_000_000;

impl DenseGrid {
    fn layout(mins: Vec<i32>, maxs: &[i32], budget: usize) -> Option<DenseGrid> {
        let mut dims = Vec::with_capacity(mins.len());
        let mut volume = 1usize;
        for (&lo, &hi) in mins.iter().zip(maxs) {
            let d = usize::try_from(i64::from(hi) - i64::from(lo) + 1).ok()?;
            dims.push(d);
            volume = volume.checked_mul(d)?;
            if volume > budget {
                return None;
            }
        }
        let mut strides = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Some(DenseGrid {
            mins,
            strides,
            dims,
            cells: vec![BigInt::default(); volume],
        })
    }

    fn flat(&self, exps: &[i32]) -> usize {
        exps.iter()
            .zip(&self.mins)
            .zip(&self.strides)
            .map(|((&e, &lo), &s)| (e - lo) as usize * s)
            .sum()
    }

    /// Offset of an exponent vector relative to the origin of the grid's
    /// coordinate system, ignoring `mins`. Offsets of two operand terms
    /// add up to the flat index of their product term when the grid mins
    /// are the sums of the operand mins.
    fn raw_offset(&self, exps: &[i32]) -> i64 {
        exps.iter()
            .zip(&self.strides)
            .map(|(&e, &s)| i64::from(e) * s as i64)
            .sum()
    }

    fn exps_of(&self, mut idx: usize) -> Vec<i32> {
        let mut exps = Vec::with_capacity(self.dims.len());
        for (&s, &lo) in self.strides.iter().zip(&self.mins) {
            exps.push((idx / s) as i32 + lo);
            idx %= s;
        }
        exps
    }

    /// Grid sized for `a * b`, already holding the product, or `None`
    /// when the bounding box is too large to be worthwhile.
    fn for_product(a: &LaurentPoly, b: &LaurentPoly) -> Option<DenseGrid> {
        let (min_a, max_a) = support_box(a)?;
        let (min_b, max_b) = support_box(b)?;
        let mins: Vec<i32> = min_a.iter().zip(&min_b).map(|(x, y)| x + y).collect();
        let maxs: Vec<i32> = max_a.iter().zip(&max_b).map(|(x, y)| x + y).collect();
        let pairs = a.terms.len().saturating_mul(b.terms.len());
        let budget = DENSE_CELL_CAP.min(pairs.saturating_mul(4).max(4096));
        let mut grid = Self::layout(mins, &maxs, budget)?;

        let origin = grid.mins.clone();
        let base = grid.raw_offset(&origin);
        let offs_a: Vec<(i64, &BigInt)> = a
            .terms
            .iter()
            .map(|(e, c)| (grid.raw_offset(e.entries()), c))
            .collect();
        let offs_b: Vec<(i64, &BigInt)> = b
            .terms
            .iter()
            .map(|(e, c)| (grid.raw_offset(e.entries()), c))
            .collect();
        for (ia, ca) in &offs_a {
            for (ib, cb) in &offs_b {
                let idx = (ia + ib - base) as usize;
                grid.cells[idx] += *ca * *cb;
            }
        }
        Some(grid)
    }

    fn into_poly(self, rank: usize) -> LaurentPoly {
        let mut terms = BTreeMap::new();
        for (idx, c) in self.cells.iter().enumerate() {
            if !is_zero(c) {
                terms.insert(ExponentVec::new(self.exps_of(idx)), c.clone());
            }
        }
        LaurentPoly { rank, terms }
    }
}

fn support_box(p: &LaurentPoly) -> Option<(Vec<i32>, Vec<i32>)> {
    let mut it = p.terms.keys();
    let first = it.next()?;
    let mut mins = first.entries().to_vec();
    let mut maxs = mins.clone();
    for e in it {
        for ((lo, hi), &x) in mins.iter_mut().zip(maxs.iter_mut()).zip(e.entries()) {
            if x < *lo {
                *lo = x;
            }
            if x > *hi {
                *hi = x;
            }
        }
    }
    Some((mins, maxs))
}

fn power_table(base: &LaurentPoly, max: u32) -> Vec<LaurentPoly> {
    let mut table = Vec::with_capacity(max as usize + 1);
    table.push(LaurentPoly::one(base.rank()));
    for k in 1..=max {
        let prev = &table[(k - 1) as usize];
        table.push(prev.mul(base));
    }
    table
}

/// Graded lexicographic key: higher total degree wins, ties broken by the
/// exponent of `x1` first, then `x2`, and so on. Used only to pick leading
/// terms during exact division; the outcome of an exact division does not
/// depend on this choice.
#[derive(PartialEq, Eq, Clone)]
struct GrlexKey(Vec<i32>);

impl Ord for GrlexKey {
    fn cmp(&self, other: &Self) -> Ordering {
        let da: i64 = self.0.iter().map(|&e| i64::from(e)).sum();
        let db: i64 = other.0.iter().map(|&e| i64::from(e)).sum();
        da.cmp(&db).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for GrlexKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact division of genuine polynomials (all exponents nonnegative).
/// Single-divisor reduction: if `a = q*b` then at every step the leading
/// term of the divisor divides the leading term of the remainder, both as a
/// monomial and as an integer coefficient, so any failure is a proof of
/// non-divisibility.
fn poly_div_exact(a: &LaurentPoly, b: &LaurentPoly) -> Option<LaurentPoly> {
    if a.terms.len() > 4096
        && let Some(result) = dense_div_exact(a, b)
    {
        return result;
    }
    let rank = a.rank();
    let mut rem: BTreeMap<GrlexKey, BigInt> = a
        .terms()
        .map(|(e, c)| (GrlexKey(e.entries().to_vec()), c.clone()))
        .collect();
    let b_terms: Vec<(GrlexKey, BigInt)> = b
        .terms()
        .map(|(e, c)| (GrlexKey(e.entries().to_vec()), c.clone()))
        .collect();
    let (lead_b, lead_b_coeff) = b_terms
        .iter()
        .max_by(|(e1, _), (e2, _)| e1.cmp(e2))
        .expect("divisor is nonzero")
        .clone();

    let mut quotient: Vec<(Vec<i32>, BigInt)> = Vec::new();
    while let Some((lead, coeff)) = rem.last_key_value() {
        let exps: Vec<i32> = lead.0.iter().zip(&lead_b.0).map(|(x, y)| x - y).collect();
        if exps.iter().any(|&e| e < 0) {
            return None;
        }
        let (q, r) = num_integer_div_rem(coeff, &lead_b_coeff);
        if !is_zero(&r) {
            return None;
        }
        for (e, c) in &b_terms {
            let target: Vec<i32> = e.0.iter().zip(&exps).map(|(x, y)| x + y).collect();
            match rem.entry(GrlexKey(target)) {
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    *o.get_mut() -= &q * c;
                    if is_zero(o.get()) {
                        o.remove();
                    }
                }
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(-(&q * c));
                }
            }
        }
        quotient.push((exps, q));
    }
    Some(LaurentPoly::from_terms(rank, quotient))
}

fn num_integer_div_rem(a: &BigInt, b: &BigInt) -> (BigInt, BigInt) {
    let q = a / b;
    let r = a - &q * b;
    (q, r)
}

/// Dense-grid variant of the exact division, used when the dividend is
/// large. Returns `None` when the dividend's bounding box is too big for a
/// grid (caller falls back to the sparse loop); `Some(verdict)` otherwise.
///
/// If `a = q*b`, the quotient support fits the componentwise box
/// `[min(a) - min(b), max(a) - max(b)]` and every intermediate remainder
/// stays inside `a`'s box, so a quotient term escaping its box doubles as
/// a proof of non-divisibility.
fn dense_div_exact(a: &LaurentPoly, b: &LaurentPoly) -> Option<Option<LaurentPoly>> {
    let rank = a.rank();
    let (min_a, max_a) = support_box(a)?;
    let (min_b, max_b) = support_box(b)?;
    let mut grid = DenseGrid::layout(min_a.clone(), &max_a, DENSE_CELL_CAP)?;
    for (e, c) in &a.terms {
        let idx = grid.flat(e.entries());
        grid.cells[idx] = c.clone();
    }

    // Divisor terms sorted leading-first under grlex, as raw offsets.
    let mut b_terms: Vec<(Vec<i32>, BigInt)> = b
        .terms
        .iter()
        .map(|(e, c)| (e.entries().to_vec(), c.clone()))
        .collect();
    b_terms.sort_by_key(|(e, _)| std::cmp::Reverse(GrlexKey(e.clone())));
    let (lead_b, lead_b_coeff) = b_terms[0].clone();
    let b_offsets: Vec<(i64, BigInt)> = b_terms
        .into_iter()
        .map(|(e, c)| (grid.raw_offset(&e), c))
        .collect();
    let lead_b_offset = b_offsets[0].0;

    let q_min: Vec<i32> = min_a.iter().zip(&min_b).map(|(x, y)| x - y).collect();
    let q_max: Vec<i32> = max_a.iter().zip(&max_b).map(|(x, y)| x - y).collect();
    if q_min.iter().zip(&q_max).any(|(lo, hi)| lo > hi) {
        return Some(None);
    }

    // Cells in grlex-descending order: flat index order is ascending lex,
    // so (total degree, flat index) descending is exactly grlex.
    let mut order: Vec<(i64, usize)> = Vec::with_capacity(grid.cells.len());
    {
        let mut exps = grid.mins.clone();
        let mut degree: i64 = exps.iter().map(|&e| i64::from(e)).sum();
        for idx in 0..grid.cells.len() {
            order.push((degree, idx));
            // Odometer step: increment the last dimension, carrying.
            for d in (0..rank).rev() {
                exps[d] += 1;
                degree += 1;
                let hi = grid.mins[d] + grid.dims[d] as i32 - 1;
                if exps[d] <= hi {
                    break;
                }
                degree -= i64::from(exps[d] - grid.mins[d]);
                exps[d] = grid.mins[d];
            }
        }
    }
    order.sort_unstable_by(|x, y| y.cmp(x));

    let mut quotient: Vec<(Vec<i32>, BigInt)> = Vec::new();
    for &(_, idx) in &order {
        if is_zero(&grid.cells[idx]) {
            continue;
        }
        let exps = grid.exps_of(idx);
        let q_exps: Vec<i32> = exps.iter().zip(&lead_b).map(|(x, y)| x - y).collect();
        if q_exps
            .iter()
            .zip(q_min.iter().zip(&q_max))
            .any(|(&e, (&lo, &hi))| e < lo || e > hi)
        {
            return Some(None);
        }
        let (q, r) = num_integer_div_rem(&grid.cells[idx], &lead_b_coeff);
        if !is_zero(&r) {
            return Some(None);
        }
        let q_offset = idx as i64 - lead_b_offset;
        for (off, c) in &b_offsets {
            let target = (q_offset + off) as usize;
            let cell = &mut grid.cells[target];
            *cell -= &q * c;
        }
        quotient.push((q_exps, q));
    }
    Some(Some(LaurentPoly::from_terms(rank, quotient)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(rank: usize, terms: &[(&[i32], i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(
            rank,
            terms
                .iter()
                .map(|(e, c)| (e.to_vec(), BigInt::from(*c))),
        )
    }

    #[test]
    fn add_cancels_to_zero() {
        let x1 = LaurentPoly::variable(2, 0);
        assert!(x1.add(&x1.neg()).is_zero());
    }

    #[test]
    fn add_disjoint_supports() {
        let lhs = p(2, &[(&[0, 1], 1), (&[0, 0], 1)]);
        let rhs = LaurentPoly::variable(2, 0);
        assert_eq!(
            lhs.add(&rhs),
            p(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[0, 0], 1)])
        );
    }

    #[test]
    fn add_merges_coefficients() {
        // (x1^-1 x2 + x1^-1) + x1^-1 = x1^-1 x2 + 2 x1^-1
        let lhs = p(2, &[(&[-1, 1], 1), (&[-1, 0], 1)]);
        let rhs = p(2, &[(&[-1, 0], 1)]);
        assert_eq!(lhs.add(&rhs), p(2, &[(&[-1, 1], 1), (&[-1, 0], 2)]));
    }

    #[test]
    fn mul_identity() {
        let q = p(2, &[(&[-1, 2], 3), (&[0, 0], -1)]);
        assert_eq!(q.mul(&LaurentPoly::one(2)), q);
    }

    #[test]
    fn mul_by_monomial() {
        let q = p(2, &[(&[0, 1], 1), (&[0, 0], 1)]);
        let m = p(2, &[(&[-1, 0], 1)]);
        assert_eq!(q.mul(&m), p(2, &[(&[-1, 1], 1), (&[-1, 0], 1)]));
    }

    #[test]
    fn mul_difference_of_squares() {
        let a = p(1, &[(&[1], 1), (&[0], 1)]);
        let b = p(1, &[(&[1], 1), (&[0], -1)]);
        assert_eq!(a.mul(&b), p(1, &[(&[2], 1), (&[0], -1)]));
    }

    #[test]
    fn div_exact_difference_of_squares() {
        let a = p(1, &[(&[2], 1), (&[0], -1)]);
        let b = p(1, &[(&[1], 1), (&[0], -1)]);
        assert_eq!(a.div_exact(&b), Some(p(1, &[(&[1], 1), (&[0], 1)])));
    }

    #[test]
    fn div_exact_monomial_always_divides() {
        let a = p(2, &[(&[1, 0], 1), (&[0, 1], 1), (&[0, 0], 1)]);
        let b = LaurentPoly::variable(2, 1);
        assert_eq!(
            a.div_exact(&b),
            Some(p(2, &[(&[1, -1], 1), (&[0, 0], 1), (&[0, -1], 1)]))
        );
    }

    #[test]
    fn div_exact_detects_non_divisibility() {
        let a = p(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        let b = p(2, &[(&[1, 0], 1), (&[0, 0], 1)]);
        assert_eq!(a.div_exact(&b), None);
    }

    #[test]
    fn div_exact_into_negative_exponents() {
        // x1 / x1^2 = x1^-1: monomials are units in the Laurent ring.
        let a = LaurentPoly::variable(1, 0);
        let b = p(1, &[(&[2], 1)]);
        assert_eq!(a.div_exact(&b), Some(p(1, &[(&[-1], 1)])));
    }

    #[test]
    fn div_exact_coefficient_failure() {
        // (x1 + 1) is not divisible by 2 over the integers.
        let a = p(1, &[(&[1], 1), (&[0], 1)]);
        let b = LaurentPoly::constant(1, 2);
        assert_eq!(a.div_exact(&b), None);
        let c = p(1, &[(&[1], 2), (&[0], 4)]);
        assert_eq!(c.div_exact(&b), Some(p(1, &[(&[1], 1), (&[0], 2)])));
    }

    #[test]
    fn den_vector_initial_variable() {
        assert_eq!(
            LaurentPoly::variable(2, 0).den_vector(),
            DenVector(vec![-1, 0])
        );
    }

    #[test]
    fn den_vector_simple_fraction() {
        // (x2 + 1)/x1
        let q = p(2, &[(&[-1, 1], 1), (&[-1, 0], 1)]);
        assert_eq!(q.den_vector(), DenVector(vec![1, 0]));
    }

    #[test]
    fn den_vector_rank_three_example() {
        // (2 x1 x3 + x3^2 + x2 + x1^2) / (x1 x2 x3)
        let q = p(
            3,
            &[
                (&[0, -1, 0], 2),
                (&[-1, -1, 1], 1),
                (&[-1, 0, -1], 1),
                (&[1, -1, -1], 1),
            ],
        );
        assert_eq!(q.den_vector(), DenVector(vec![1, 1, 1]));
    }

    #[test]
    #[should_panic(expected = "zero polynomial")]
    fn den_vector_of_zero_panics() {
        LaurentPoly::zero(2).den_vector();
    }

    #[test]
    fn var_in_denominator() {
        let q = p(2, &[(&[-1, 1], 1), (&[-1, 0], 1)]); // (x2+1)/x1
        assert!(q.has_var_in_denominator(0));
        assert!(!q.has_var_in_denominator(1));
        assert!(!LaurentPoly::variable(2, 0).has_var_in_denominator(0));
        let w = p(2, &[(&[1, -1], 1), (&[0, -1], 1)]); // (x1+1)/x2
        assert!(!w.has_var_in_denominator(0));
    }

    #[test]
    fn compare_is_reflexive_and_orders_variables() {
        let x1 = LaurentPoly::variable(2, 0);
        let x2 = LaurentPoly::variable(2, 1);
        assert_eq!(x1.cmp(&x1), Ordering::Equal);
        assert_eq!(x1.cmp(&x2), Ordering::Less);
        assert_eq!(x2.cmp(&x1), Ordering::Greater);
    }

    #[test]
    fn sorting_pentagon_variables_is_stable_and_duplicate_free() {
        let mut vars = [
            p(2, &[(&[0, -1], 1), (&[-1, 0], 1), (&[-1, -1], 1)]),
            LaurentPoly::variable(2, 1),
            p(2, &[(&[-1, 1], 1), (&[-1, 0], 1)]),
            LaurentPoly::variable(2, 0),
            p(2, &[(&[1, -1], 1), (&[0, -1], 1)]),
        ];
        vars.sort();
        for w in vars.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn substitute_projects_coordinates() {
        let x1 = LaurentPoly::variable(2, 0);
        let images = vec![
            LaurentFraction::from_poly(LaurentPoly::variable(2, 1)),
            LaurentFraction::from_poly(LaurentPoly::variable(2, 0)),
        ];
        let out = x1.substitute(&images);
        assert!(out.equals_poly(&LaurentPoly::variable(2, 1)));
    }

    #[test]
    fn substitute_swaps_variables_in_cluster_variable() {
        // ((x2+1)/x1)[x1 -> x2, x2 -> x1] = (x1+1)/x2
        let u = p(2, &[(&[-1, 1], 1), (&[-1, 0], 1)]);
        let images = vec![
            LaurentFraction::from_poly(LaurentPoly::variable(2, 1)),
            LaurentFraction::from_poly(LaurentPoly::variable(2, 0)),
        ];
        let expected = p(2, &[(&[1, -1], 1), (&[0, -1], 1)]);
        assert!(u.substitute(&images).equals_poly(&expected));
    }

    #[test]
    fn substitute_inverse_pair_gives_one() {
        let prod = LaurentPoly::variable(2, 0).mul(&LaurentPoly::variable(2, 1));
        let q = p(2, &[(&[1, 1], 1), (&[0, 0], 3)]);
        let r = p(2, &[(&[0, 2], 5), (&[1, 0], -1)]);
        let images = vec![
            LaurentFraction::new(q.clone(), r.clone()),
            LaurentFraction::new(r, q),
        ];
        assert!(prod.substitute(&images).equals_poly(&LaurentPoly::one(2)));
    }

    #[test]
    fn fraction_equality_ignores_common_factors() {
        let x1 = LaurentPoly::variable(1, 0);
        let two_x1 = p(1, &[(&[1], 2)]);
        let two = LaurentPoly::constant(1, 2);
        let a = LaurentFraction::new(two_x1, two);
        let b = LaurentFraction::from_poly(x1);
        assert_eq!(a, b);
    }

    #[test]
    fn fraction_equality_matches_laurent_representation() {
        // (x2+1)/x1 as a fraction vs x1^-1 x2 + x1^-1 over 1.
        let frac = LaurentFraction::new(
            p(2, &[(&[0, 1], 1), (&[0, 0], 1)]),
            LaurentPoly::variable(2, 0),
        );
        let laurent = p(2, &[(&[-1, 1], 1), (&[-1, 0], 1)]);
        assert!(frac.equals_poly(&laurent));
        assert_eq!(frac, LaurentFraction::from_poly(laurent));
    }

    #[test]
    fn json_round_trip_and_canonical_form() {
        let q = p(2, &[(&[-1, 1], 1), (&[2, 0], -3), (&[0, 0], 12)]);
        let json = q.to_json();
        assert_eq!(
            json,
            r#"{"rank":2,"terms":[{"exp":[2,0],"coeff":"-3"},{"exp":[0,0],"coeff":"12"},{"exp":[-1,1],"coeff":"1"}]}"#
        );
        assert_eq!(LaurentPoly::from_json(&json).unwrap(), q);
    }

    #[test]
    fn json_rejects_malformed_input() {
        assert!(LaurentPoly::from_json(r#"{"rank":2,"terms":[{"exp":[1],"coeff":"1"}]}"#).is_err());
        assert!(
            LaurentPoly::from_json(r#"{"rank":1,"terms":[{"exp":[1],"coeff":"0"}]}"#).is_err()
        );
        assert!(
            LaurentPoly::from_json(
                r#"{"rank":1,"terms":[{"exp":[1],"coeff":"1"},{"exp":[1],"coeff":"2"}]}"#
            )
            .is_err()
        );
    }

    #[test]
    fn display_is_readable() {
        let q = p(2, &[(&[2, 0], 1), (&[-1, 1], 2), (&[0, 0], -1)]);
        assert_eq!(q.to_string(), "x1^2 - 1 + 2*x1^-1*x2");
    }
}
