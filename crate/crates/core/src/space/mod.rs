//! Graded spaces, the multi-index cochain basis and coderivation containers.

mod grammar;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalars::{format_rational, RatFun, Rational, Scalar};

pub use grammar::{parse_cochain, print_cochain, CochainJson, TermJson};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("a graded space needs at least one basis element")]
    Empty,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("cochain has {got} exponents but the space has dimension {dim}")]
    Arity { got: usize, dim: usize },
    #[error("target index {0} out of range")]
    Target(usize),
    #[error("`{written}` used for a cochain of the other parity ({cochain})")]
    ParityTag { written: String, cochain: String },
    #[error("cochain {0} vanishes: an odd basis element appears squared")]
    OddSquare(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Grading {
    Z,
    Z2,
}

impl fmt::Display for Grading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Grading::Z => "Z",
            Grading::Z2 => "Z2",
        })
    }
}

/// Basis degrees of W together with the grading mode. In mode Z2 degrees are
/// stored reduced mod 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradedSpace {
    degrees: Vec<i64>,
    mode: Grading,
}

impl GradedSpace {
    pub fn new(degrees: Vec<i64>, mode: Grading) -> Result<Self, SpaceError> {
        if degrees.is_empty() {
            return Err(SpaceError::Empty);
        }
        let degrees = match mode {
            Grading::Z => degrees,
            Grading::Z2 => degrees.into_iter().map(|d| d.rem_euclid(2)).collect(),
        };
        Ok(GradedSpace { degrees, mode })
    }

    pub fn z(degrees: &[i64]) -> Self {
        Self::new(degrees.to_vec(), Grading::Z).expect("nonempty")
    }

    pub fn z2(degrees: &[i64]) -> Self {
        Self::new(degrees.to_vec(), Grading::Z2).expect("nonempty")
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn mode(&self) -> Grading {
        self.mode
    }

    pub fn parity(&self, i: usize) -> u8 {
        self.degrees[i].rem_euclid(2) as u8
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.parity(i) == 1
    }

    /// Same degrees viewed in the other grading mode.
    pub fn with_mode(&self, mode: Grading) -> Self {
        Self::new(self.degrees.clone(), mode).expect("nonempty")
    }

    /// `W_i = V_{i+1}`: degrees drop by one, or parities flip in mode Z2.
    pub fn desuspend(&self) -> Self {
        self.shift(-1)
    }

    pub fn suspend(&self) -> Self {
        self.shift(1)
    }

    fn shift(&self, by: i64) -> Self {
        Self::new(self.degrees.iter().map(|d| d + by).collect(), self.mode).expect("nonempty")
    }
}

impl fmt::Display for GradedSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.degrees.iter().map(ToString::to_string).collect();
        write!(f, "({}) [{}]", d.join(","), self.mode)
    }
}

/// φ^I_k: the map sending the monomial e^I to I!·e_k and every other monomial
/// of the same length to zero. `target` is 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisCochain {
    pub exponents: Vec<u32>,
    pub target: usize,
}

impl BasisCochain {
    pub fn new(exponents: Vec<u32>, target: usize) -> Self {
        BasisCochain { exponents, target }
    }

    /// Number of inputs.
    pub fn exterior_degree(&self) -> u32 {
        self.exponents.iter().sum()
    }

    pub fn input_degree(&self, sp: &GradedSpace) -> i64 {
        self.exponents
            .iter()
            .enumerate()
            .map(|(j, &e)| e as i64 * sp.degree(j))
            .sum()
    }

    /// Output degree minus total input degree.
    pub fn internal_degree(&self, sp: &GradedSpace) -> i64 {
        sp.degree(self.target) - self.input_degree(sp)
    }

    pub fn parity(&self, sp: &GradedSpace) -> u8 {
        (sp.degree(self.target) + self.input_degree(sp)).rem_euclid(2) as u8
    }

    pub fn is_odd(&self, sp: &GradedSpace) -> bool {
        self.parity(sp) == 1
    }

    /// False when an odd basis element occurs with exponent above one, in
    /// which case the input monomial is zero in the symmetric algebra.
    pub fn is_nonvanishing(&self, sp: &GradedSpace) -> bool {
        self.exponents
            .iter()
            .enumerate()
            .all(|(j, &e)| e <= 1 || !sp.is_odd(j))
    }

    /// `ps[i1,...;k]` or `ph[...]` depending on parity.
    pub fn label(&self, sp: &GradedSpace) -> String {
        let e: Vec<String> = self.exponents.iter().map(ToString::to_string).collect();
        let tag = if self.is_odd(sp) { "ps" } else { "ph" };
        format!("{tag}[{};{}]", e.join(","), self.target + 1)
    }
}

/// Canonical order: by target, then exponent vectors in decreasing
/// lexicographic order, so `e1^r` comes first.
impl Ord for BasisCochain {
    fn cmp(&self, other: &Self) -> Ordering {
        self.target
            .cmp(&other.target)
            .then_with(|| other.exponents.cmp(&self.exponents))
    }
}

impl PartialOrd for BasisCochain {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All exponent vectors of length `dim` summing to `r`, in decreasing
/// lexicographic order.
pub fn exponent_vectors(dim: usize, r: u32) -> Vec<Vec<u32>> {
    fn rec(dim: usize, r: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == dim {
            prefix.push(r);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=r).rev() {
            prefix.push(e);
            rec(dim, r - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, r, &mut Vec::with_capacity(dim), &mut out);
    out
}

/// Nonvanishing monomials of length `r` (odd elements appear at most once),
/// in decreasing lexicographic order.
pub fn word_exponents(sp: &GradedSpace, r: u32) -> Vec<Vec<u32>> {
    exponent_vectors(sp.dim(), r)
        .into_iter()
        .filter(|e| e.iter().enumerate().all(|(j, &x)| x <= 1 || !sp.is_odd(j)))
        .collect()
}

/// Basis of C^r_s: cochains with `r` inputs and internal degree `s` (mode Z)
/// or parity `s mod 2` (mode Z2), in canonical order.
pub fn enumerate_cochain_basis(sp: &GradedSpace, r: u32, s: i64) -> Vec<BasisCochain> {
    let words = word_exponents(sp, r);
    let mut out = Vec::new();
    for t in 0..sp.dim() {
        for w in &words {
            let c = BasisCochain::new(w.clone(), t);
            let keep = match sp.mode() {
                Grading::Z => c.internal_degree(sp) == s,
                Grading::Z2 => c.parity(sp) as i64 == s.rem_euclid(2),
            };
            if keep {
                out.push(c);
            }
        }
    }
    out
}

/// Every distinct grading value occurring among cochains with `r` inputs.
pub fn internal_degrees(sp: &GradedSpace, r: u32) -> Vec<i64> {
    let mut s: Vec<i64> = match sp.mode() {
        Grading::Z => word_exponents(sp, r)
            .iter()
            .flat_map(|w| {
                (0..sp.dim()).map(move |t| BasisCochain::new(w.clone(), t).internal_degree(sp))
            })
            .collect(),
        Grading::Z2 => vec![0, 1],
    };
    s.sort_unstable();
    s.dedup();
    s
}

/// Finite sum of basis cochains with scalar coefficients.
#[derive(Clone, Debug)]
pub struct Coderivation<S> {
    space: GradedSpace,
    terms: BTreeMap<BasisCochain, S>,
}

impl<S: Scalar> PartialEq for Coderivation<S> {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.terms == other.terms
    }
}

impl<S: Scalar> Coderivation<S> {
    pub fn zero(space: &GradedSpace) -> Self {
        Coderivation {
            space: space.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms<I>(space: &GradedSpace, terms: I) -> Self
    where
        I: IntoIterator<Item = (BasisCochain, S)>,
    {
        let mut d = Self::zero(space);
        for (c, v) in terms {
            d.add_term(c, v);
        }
        d
    }

    pub fn basis(space: &GradedSpace, c: BasisCochain) -> Self {
        Self::from_terms(space, [(c, S::one())])
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisCochain, &S)> {
        self.terms.iter()
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, c: &BasisCochain) -> S {
        self.terms.get(c).cloned().unwrap_or_else(S::zero)
    }

    /// Adds `v·c`; terms that cancel and cochains vanishing on the symmetric
    /// algebra are dropped.
    pub fn add_term(&mut self, c: BasisCochain, v: S) {
        if v.is_zero() || !c.is_nonvanishing(&self.space) {
            return;
        }
        assert_eq!(c.exponents.len(), self.space.dim(), "arity");
        match self.terms.get_mut(&c) {
            Some(x) => {
                let s = x.add(&v);
                if s.is_zero() {
                    self.terms.remove(&c);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(c, v);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (c, v) in &other.terms {
            out.add_term(c.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|v| v.neg())
    }

    pub fn scale(&self, s: &S) -> Self {
        if s.is_zero() {
            return Self::zero(&self.space);
        }
        self.map(|v| v.mul(s))
    }

    pub fn scale_rational(&self, r: &Rational) -> Self {
        self.map(|v| v.scale(r))
    }

    /// Coefficientwise map; zero results are dropped.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Coderivation<T> {
        let mut out = Coderivation::zero(&self.space);
        for (c, v) in &self.terms {
            out.add_term(c.clone(), f(v));
        }
        out
    }

    pub fn try_map<T: Scalar, E>(
        &self,
        f: impl Fn(&S) -> Result<T, E>,
    ) -> Result<Coderivation<T>, E> {
        let mut out = Coderivation::zero(&self.space);
        for (c, v) in &self.terms {
            out.add_term(c.clone(), f(v)?);
        }
        Ok(out)
    }

    pub fn filter(&self, keep: impl Fn(&BasisCochain) -> bool) -> Self {
        Coderivation {
            space: self.space.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(c, _)| keep(c))
                .map(|(c, v)| (c.clone(), v.clone()))
                .collect(),
        }
    }

    /// Sorted distinct exterior degrees.
    pub fn exterior_degrees(&self) -> Vec<u32> {
        let mut r: Vec<u32> = self.terms.keys().map(BasisCochain::exterior_degree).collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    /// Lowest exterior degree present.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(BasisCochain::exterior_degree).min()
    }

    pub fn max_exterior_degree(&self) -> Option<u32> {
        self.terms.keys().map(BasisCochain::exterior_degree).max()
    }

    /// Component with exactly `r` inputs.
    pub fn part(&self, r: u32) -> Self {
        self.filter(|c| c.exterior_degree() == r)
    }

    /// Drops components with more than `r` inputs.
    pub fn truncate(&self, r: u32) -> Self {
        self.filter(|c| c.exterior_degree() <= r)
    }

    /// Leading term: the component of lowest exterior degree.
    pub fn leading(&self) -> Self {
        match self.order() {
            Some(k) => self.part(k),
            None => self.clone(),
        }
    }

    pub fn is_pure(&self) -> bool {
        self.exterior_degrees().len() <= 1
    }

    /// Every term odd (mode Z2) or of internal degree 1 (mode Z).
    pub fn is_odd_of_degree_one(&self) -> bool {
        self.terms.keys().all(|c| match self.space.mode() {
            Grading::Z => c.internal_degree(&self.space) == 1,
            Grading::Z2 => c.is_odd(&self.space),
        })
    }

    /// Parity shared by all terms, or `None` for mixed or zero.
    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(|c| c.parity(&self.space));
        let p = it.next()?;
        it.all(|q| q == p).then_some(p)
    }

    /// Reinterprets the same terms over a space with the same dimension.
    pub fn with_space(&self, space: &GradedSpace) -> Self {
        assert_eq!(space.dim(), self.space.dim());
        Coderivation {
            space: space.clone(),
            terms: self.terms.clone(),
        }
    }

    /// Coefficient vector in the given ordered basis.
    pub fn coords(&self, basis: &[BasisCochain]) -> Vec<S> {
        basis.iter().map(|c| self.coeff(c)).collect()
    }

    pub fn from_coords(space: &GradedSpace, basis: &[BasisCochain], v: &[S]) -> Self {
        Self::from_terms(space, basis.iter().cloned().zip(v.iter().cloned()))
    }

    /// Terms not contained in `basis`.
    pub fn outside(&self, basis: &[BasisCochain]) -> Self {
        self.filter(|c| !basis.contains(c))
    }
}

impl Coderivation<Rational> {
    pub fn to_ratfun(&self) -> Coderivation<RatFun> {
        self.map(|v| RatFun::constant(v.clone()))
    }
}

impl Coderivation<RatFun> {
    /// Coefficients as rational constants, if none is symbolic.
    pub fn to_rational(&self) -> Option<Coderivation<Rational>> {
        let mut out = Coderivation::zero(&self.space);
        for (c, v) in &self.terms {
            out.add_term(c.clone(), v.to_rational()?);
        }
        Some(out)
    }

    /// Parameter names occurring in some coefficient.
    pub fn used_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.terms.values().flat_map(RatFun::used_names).collect();
        names.sort();
        names.dedup();
        names
    }
}

impl<S: Scalar> fmt::Display for Coderivation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_cochain(self))
    }
}

pub(crate) fn coefficient_text<S: Scalar>(v: &S) -> String {
    if let Some(r) = v.to_rational() {
        return format_rational(&r);
    }
    v.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bc(e: &[u32], t: usize) -> BasisCochain {
        BasisCochain::new(e.to_vec(), t - 1)
    }

    #[test]
    fn internal_degrees_of_listed_cochains() {
        let sp = GradedSpace::z(&[0, -1, 1]);
        assert_eq!(bc(&[1, 1, 0], 3).internal_degree(&sp), 2);
        assert_eq!(bc(&[4, 0, 0], 3).internal_degree(&sp), 1);
        assert_eq!(bc(&[1, 0, 0], 1).internal_degree(&sp), 0);
    }

    #[test]
    fn standard_bases() {
        let sp = GradedSpace::z(&[0, -1, 1]);
        assert_eq!(
            enumerate_cochain_basis(&sp, 3, 1),
            vec![bc(&[2, 1, 0], 1), bc(&[3, 0, 0], 3), bc(&[1, 1, 1], 3)]
        );
        assert_eq!(
            enumerate_cochain_basis(&sp, 1, 1),
            vec![bc(&[0, 1, 0], 1), bc(&[1, 0, 0], 3)]
        );
        let sp = GradedSpace::z(&[0, 2, 1]);
        assert_eq!(
            enumerate_cochain_basis(&sp, 2, 1),
            vec![bc(&[1, 0, 1], 2), bc(&[2, 0, 0], 3)]
        );
    }

    #[test]
    fn suspension() {
        let sp = GradedSpace::z(&[0, 1, 2]);
        assert_eq!(sp.desuspend().degrees(), &[-1, 0, 1]);
        assert_eq!(sp.desuspend().suspend(), sp);
        let sp = GradedSpace::z2(&[0, 0, 1]);
        assert_eq!(sp.desuspend().degrees(), &[1, 1, 0]);
    }
}
