use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use super::{format_rational, Rational, ScalarError};

/// Ordered list of parameter names shared by a polynomial's exponent vectors.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Params(Arc<[String]>);

impl Params {
    pub fn new<I, S>(names: I) -> Result<Self, ScalarError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(ScalarError::DuplicateParam(n.clone()));
            }
        }
        Ok(Params(names.into()))
    }

    pub fn empty() -> Self {
        Params::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    pub fn contains_all(&self, other: &Params) -> bool {
        other.0.iter().all(|n| self.index_of(n).is_some())
    }

    /// `self` followed by the names of `other` not already present.
    pub fn union(&self, other: &Params) -> Params {
        if self == other || self.contains_all(other) {
            return self.clone();
        }
        if other.contains_all(self) && self.is_empty() {
            return other.clone();
        }
        let mut names: Vec<String> = self.0.to_vec();
        for n in other.0.iter() {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
        Params(names.into())
    }

    /// Position of each of `self`'s names inside `target`.
    fn embedding(&self, target: &Params) -> Option<Vec<usize>> {
        self.0.iter().map(|n| target.index_of(n)).collect()
    }
}

impl fmt::Debug for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.join(", "))
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(", "))
    }
}

/// Exponent vector, ordered graded-lexicographically (total degree first,
/// ties broken by the earliest parameter carrying the larger exponent).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(e: Vec<u32>) -> Self {
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    fn min(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    fn remap(&self, map: &[usize], nvars: usize) -> Monomial {
        let mut e = vec![0; nvars];
        for (i, &x) in self.0.iter().enumerate() {
            e[map[i]] = x;
        }
        Monomial(e)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial over the rationals in named parameters.
///
/// No zero coefficients are stored. Binary operations on polynomials with
/// different parameter lists first embed both into the union list.
#[derive(Clone, Debug)]
pub struct ParamPoly {
    params: Params,
    terms: BTreeMap<Monomial, Rational>,
}

impl ParamPoly {
    pub fn zero(params: Params) -> Self {
        ParamPoly {
            params,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(params: Params, c: Rational) -> Self {
        let n = params.len();
        Self::from_terms(params, [(Monomial::one(n), c)])
    }

    pub fn var(params: Params, name: &str) -> Option<Self> {
        let i = params.index_of(name)?;
        let n = params.len();
        Some(Self::from_terms(params, [(Monomial::var(n, i), Rational::one())]))
    }

    pub fn from_terms<I>(params: Params, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.0.len(), params.len());
            let entry = map.entry(m).or_insert_with(Rational::zero);
            *entry += c;
        }
        map.retain(|_, c| !c.is_zero());
        ParamPoly { params, terms: map }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_value(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next()?;
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// Largest term in graded-lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Indices of parameters that occur with a nonzero exponent.
    pub fn used_vars(&self) -> Vec<usize> {
        (0..self.params.len())
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .collect()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Re-expresses the polynomial over `target`, which must contain every
    /// parameter of `self`.
    pub fn with_params(&self, target: &Params) -> Option<ParamPoly> {
        if &self.params == target {
            return Some(self.clone());
        }
        let map = self.params.embedding(target)?;
        let n = target.len();
        Some(ParamPoly {
            params: target.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.remap(&map, n), c.clone()))
                .collect(),
        })
    }

    pub(crate) fn unify(a: &ParamPoly, b: &ParamPoly) -> (ParamPoly, ParamPoly) {
        if a.params == b.params {
            return (a.clone(), b.clone());
        }
        let p = a.params.union(&b.params);
        (
            a.with_params(&p).expect("union contains a"),
            b.with_params(&p).expect("union contains b"),
        )
    }

    pub fn scale(&self, c: &Rational) -> ParamPoly {
        if c.is_zero() {
            return ParamPoly::zero(self.params.clone());
        }
        ParamPoly {
            params: self.params.clone(),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    fn mul_term(&self, m: &Monomial, c: &Rational) -> ParamPoly {
        ParamPoly {
            params: self.params.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, x)| (k.mul(m), x * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> ParamPoly {
        let mut acc = ParamPoly::constant(self.params.clone(), Rational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates with `values[i]` bound to the i-th parameter.
    pub fn eval(&self, values: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &values[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Drops every term of total degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> ParamPoly {
        ParamPoly {
            params: self.params.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() <= max_degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Part of total degree exactly `degree`.
    pub fn homogeneous_part(&self, degree: u32) -> ParamPoly {
        ParamPoly {
            params: self.params.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Largest monomial dividing every term (the zero polynomial yields 1).
    pub(crate) fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(self.params.len()),
            Some(first) => it.fold(first.clone(), |acc, m| Monomial::min(&acc, m)),
        }
    }

    pub(crate) fn div_monomial(&self, m: &Monomial) -> ParamPoly {
        ParamPoly {
            params: self.params.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.div(m), c.clone()))
                .collect(),
        }
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder. A single polynomial is a Gröbner basis of the ideal it
    /// generates, so the division algorithm decides divisibility.
    pub fn div_exact(&self, divisor: &ParamPoly) -> Option<ParamPoly> {
        let (mut rem, d) = ParamPoly::unify(self, divisor);
        let (lm, lc) = {
            let (m, c) = d.leading()?;
            (m.clone(), c.clone())
        };
        let mut quot = ParamPoly::zero(rem.params.clone());
        while let Some((m, c)) = rem.leading() {
            if !lm.divides(m) {
                return None;
            }
            let qm = m.div(&lm);
            let qc = c / &lc;
            rem = &rem - &d.mul_term(&qm, &qc);
            quot = &quot + &ParamPoly::from_terms(quot.params.clone(), [(qm, qc)]);
        }
        Some(quot)
    }

    fn write_monomial(&self, m: &Monomial, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str(&self.params.names()[i])?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl PartialEq for ParamPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.params == other.params {
            return self.terms == other.terms;
        }
        let (a, b) = ParamPoly::unify(self, other);
        a.terms == b.terms
    }
}

impl<'a> Add<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &'a ParamPoly) -> ParamPoly {
        let (a, b) = ParamPoly::unify(self, rhs);
        let mut terms = a.terms;
        for (m, c) in b.terms {
            let e = terms.entry(m).or_insert_with(Rational::zero);
            *e += c;
        }
        terms.retain(|_, c| !c.is_zero());
        ParamPoly {
            params: a.params,
            terms,
        }
    }
}

impl<'a> Sub<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &'a ParamPoly) -> ParamPoly {
        self + &(-rhs)
    }
}

impl<'a> Neg for &'a ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        ParamPoly {
            params: self.params.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl<'a> Mul<&'a ParamPoly> for &'a ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &'a ParamPoly) -> ParamPoly {
        let (a, b) = ParamPoly::unify(self, rhs);
        let mut terms: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let e = terms.entry(ma.mul(mb)).or_insert_with(Rational::zero);
                *e += ca * cb;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        ParamPoly {
            params: a.params,
            terms,
        }
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (idx, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if neg {
                f.write_str("-")?;
            } else if idx > 0 {
                f.write_str("+")?;
            }
            if m.is_one() {
                f.write_str(&format_rational(&abs))?;
            } else {
                if !abs.is_one() {
                    write!(f, "{}*", format_rational(&abs))?;
                }
                self.write_monomial(m, f)?;
            }
        }
        Ok(())
    }
}
