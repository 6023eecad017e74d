//! The coderivation algebra on S(W).
//!
//! Sign conventions. Words e^J = e_1^{J_1}⋯e_n^{J_n} are kept in canonical
//! order e_1 < e_2 < …. Signs only arise from odd factors passing each other.
//! The extension of f: S^k(W) → W to a coderivation is
//!
//! ```text
//! f̂(e^J) = Σ_{I ≤ J} C(J,I) · ε(J,I) · f(e^I) · e^{J-I}
//! ```
//!
//! where C(J,I) = Π binom(J_i, I_i) counts the ways of selecting the even
//! factors, ε(J,I) is the sign of moving the selected odd factors to the front
//! past the unselected ones, and the output f(e^I) is multiplied on the left
//! of the remaining word. With φ^I_a(e^I) = I!·e_a this gives, for basis
//! cochains,
//!
//! ```text
//! φ^I_a ∘ φ̂^J_b = ε · I_b · φ^{I - e_b + J}_a
//! ```
//!
//! with ε the product of ε(K,J) for K = I - e_b + J and the sign of moving e_b
//! into place inside e^{I-e_b}. The bracket is
//! [f,g] = f∘ĝ - (-1)^{|f||g|} g∘f̂.

mod linear;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use thiserror::Error;

use crate::scalars::{int, Rational, Scalar};
use crate::space::{BasisCochain, Coderivation, GradedSpace, Grading};

pub use linear::{linear_action, linear_matrix_on_sk, matrix_of_part, part_from_matrix, LinearAuto};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoderError {
    #[error("cutoff {cutoff} is below the order {order} of the coderivation")]
    CutoffTooSmall { cutoff: u32, order: u32 },
    #[error("exp(ad) generator must be even with exterior degree at least 2: {0}")]
    BadGenerator(String),
    #[error("automorphism matrix must be {dim}x{dim}")]
    Shape { dim: usize },
    #[error("automorphism is singular")]
    Singular,
    #[error("automorphism mixes basis elements of different {0}")]
    NotGraded(&'static str),
    #[error("coefficients must be numeric: {0}")]
    Symbolic(String),
}

/// Monomial e^J of S(W), ordered so that `e_1^k` comes first.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymWord(pub Vec<u32>);

impl SymWord {
    pub fn rank(&self) -> u32 {
        self.0.iter().sum()
    }

    /// J! = Π J_i!.
    pub fn factorial(&self) -> Rational {
        factorial_of(&self.0)
    }

    /// Canonical text: `e1^2*e3`.
    pub fn label(&self) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    format!("e{}", i + 1)
                } else {
                    format!("e{}^{}", i + 1, e)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl Ord for SymWord {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }
}

impl PartialOrd for SymWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) fn factorial_of(e: &[u32]) -> Rational {
    let mut acc = num_bigint::BigInt::from(1);
    for &x in e {
        for i in 2..=x {
            acc *= i;
        }
    }
    Rational::from_integer(acc)
}

fn binomial(n: u32, k: u32) -> num_bigint::BigInt {
    let mut acc = num_bigint::BigInt::from(1);
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Element of S(W): finite sum of words with coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct SymElement<S> {
    terms: BTreeMap<SymWord, S>,
}

impl<S: Scalar> SymElement<S> {
    pub fn zero() -> Self {
        SymElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn word(w: SymWord) -> Self {
        let mut e = Self::zero();
        e.add_term(w, S::one());
        e
    }

    pub fn add_term(&mut self, w: SymWord, v: S) {
        if v.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                let s = x.add(&v);
                if s.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(w, v);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SymWord, &S)> {
        self.terms.iter()
    }

    pub fn coeff(&self, w: &SymWord) -> S {
        self.terms.get(w).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Graded-commutative product.
    pub fn mul(&self, other: &Self, sp: &GradedSpace) -> Self {
        let mut out = Self::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if let Some((sign, w)) = mul_words(sp, &a.0, &b.0) {
                    out.add_term(SymWord(w), x.mul(y).scale(&int(sign)));
                }
            }
        }
        out
    }
}

/// e^A · e^B in canonical order, with the Koszul sign, or `None` when an odd
/// element would appear squared.
pub fn mul_words(sp: &GradedSpace, a: &[u32], b: &[u32]) -> Option<(i64, Vec<u32>)> {
    let mut sign = 1;
    for i in 0..sp.dim() {
        if !sp.is_odd(i) || b[i] == 0 {
            continue;
        }
        if a[i] > 0 {
            return None;
        }
        let later: u32 = (i + 1..sp.dim()).filter(|&j| sp.is_odd(j)).map(|j| a[j]).sum();
        if later % 2 == 1 {
            sign = -sign;
        }
    }
    Some((sign, a.iter().zip(b).map(|(x, y)| x + y).collect()))
}

/// Sign of moving the odd factors selected by `sel` to the front of the word
/// e^J, past the unselected odd factors that precede them.
pub fn koszul_select(sp: &GradedSpace, j: &[u32], sel: &[u32]) -> i64 {
    let mut sign = 1;
    let mut unselected_before = 0;
    for i in 0..sp.dim() {
        if !sp.is_odd(i) {
            continue;
        }
        if sel[i] == 1 {
            if unselected_before % 2 == 1 {
                sign = -sign;
            }
        } else if j[i] == 1 {
            unselected_before += 1;
        }
    }
    sign
}

/// e_t · e^R as a canonical word with its sign.
fn prepend(sp: &GradedSpace, t: usize, rest: &[u32]) -> Option<(i64, Vec<u32>)> {
    let mut unit = vec![0; sp.dim()];
    unit[t] = 1;
    mul_words(sp, &unit, rest)
}

/// The coderivation extension of the pure-degree map `f`, evaluated on the
/// word `w`.
pub fn extend_eval<S: Scalar>(f: &Coderivation<S>, w: &SymWord) -> SymElement<S> {
    let sp = f.space();
    let mut out = SymElement::zero();
    if w.0.iter().enumerate().any(|(i, &e)| e > 1 && sp.is_odd(i)) {
        return out;
    }
    for (c, v) in f.terms() {
        let i = &c.exponents;
        if i.iter().zip(&w.0).any(|(a, b)| a > b) {
            continue;
        }
        let mult = i
            .iter()
            .zip(&w.0)
            .fold(num_bigint::BigInt::from(1), |acc, (&a, &b)| acc * binomial(b, a));
        let sign = koszul_select(sp, &w.0, i);
        let rest: Vec<u32> = w.0.iter().zip(i).map(|(b, a)| b - a).collect();
        let Some((s2, word)) = prepend(sp, c.target, &rest) else {
            continue;
        };
        let factor = Rational::from_integer(mult) * factorial_of(i) * int(sign * s2);
        out.add_term(SymWord(word), v.scale(&factor));
    }
    out
}

/// f applied (not extended) to an element of S(W); returns coefficients per
/// basis vector of W.
pub fn apply_map<S: Scalar>(f: &Coderivation<S>, x: &SymElement<S>) -> Vec<S> {
    let sp = f.space();
    let mut out = vec![S::zero(); sp.dim()];
    for (c, v) in f.terms() {
        let a = x.coeff(&SymWord(c.exponents.clone()));
        if a.is_zero() {
            continue;
        }
        let val = a.mul(v).scale(&factorial_of(&c.exponents));
        out[c.target] = out[c.target].add(&val);
    }
    out
}

fn sign_pow(p: u8, q: u8) -> i64 {
    if p & q == 1 {
        -1
    } else {
        1
    }
}

/// φ^I_a ∘ φ̂^J_b as (sign·multiplicity, cochain), or `None` when it vanishes.
fn compose_basis(sp: &GradedSpace, f: &BasisCochain, g: &BasisCochain) -> Option<(i64, BasisCochain)> {
    let b = g.target;
    let ib = f.exponents[b];
    if ib == 0 {
        return None;
    }
    let mut i_minus = f.exponents.clone();
    i_minus[b] -= 1;
    let k: Vec<u32> = i_minus.iter().zip(&g.exponents).map(|(x, y)| x + y).collect();
    if k.iter().enumerate().any(|(i, &e)| e > 1 && sp.is_odd(i)) {
        return None;
    }
    let eps = koszul_select(sp, &k, &g.exponents);
    let (s2, _) = prepend(sp, b, &i_minus)?;
    Some((eps * s2 * ib as i64, BasisCochain::new(k, f.target)))
}

/// The graded bracket [f,g] = f∘ĝ - (-1)^{|f||g|} g∘f̂, computed term by term
/// from the closed form for basis cochains.
pub fn bracket<S: Scalar>(f: &Coderivation<S>, g: &Coderivation<S>) -> Coderivation<S> {
    let sp = f.space();
    assert_eq!(sp, g.space(), "bracket of coderivations on different spaces");
    let mut acc: BTreeMap<BasisCochain, S> = BTreeMap::new();
    let mut push = |c: BasisCochain, v: S| {
        if v.is_zero() {
            return;
        }
        match acc.get_mut(&c) {
            Some(x) => *x = x.add(&v),
            None => {
                acc.insert(c, v);
            }
        }
    };
    for (cf, vf) in f.terms() {
        let pf = cf.parity(sp);
        for (cg, vg) in g.terms() {
            let pg = cg.parity(sp);
            let prod = vf.mul(vg);
            if let Some((s, c)) = compose_basis(sp, cf, cg) {
                push(c, prod.scale(&int(s)));
            }
            if let Some((s, c)) = compose_basis(sp, cg, cf) {
                push(c, prod.scale(&int(-sign_pow(pf, pg) * s)));
            }
        }
    }
    Coderivation::from_terms(sp, acc)
}

/// The same bracket computed by evaluating both compositions on every word
/// of the relevant rank through [`extend_eval`].
pub fn bracket_via_words<S: Scalar>(f: &Coderivation<S>, g: &Coderivation<S>) -> Coderivation<S> {
    let sp = f.space().clone();
    let mut out = Coderivation::zero(&sp);
    let pieces = |h: &Coderivation<S>| {
        let mut m: BTreeMap<(u32, u8), Coderivation<S>> = BTreeMap::new();
        for (c, v) in h.terms() {
            m.entry((c.exterior_degree(), c.parity(&sp)))
                .or_insert_with(|| Coderivation::zero(&sp))
                .add_term(c.clone(), v.clone());
        }
        m
    };
    let fp = pieces(f);
    let gp = pieces(g);
    for (&(k, pf), fk) in &fp {
        for (&(l, pg), gl) in &gp {
            let r = k + l - 1;
            let sgn = int(-sign_pow(pf, pg));
            for w in crate::space::word_exponents(&sp, r) {
                let word = SymWord(w.clone());
                let a = apply_map(fk, &extend_eval(gl, &word));
                let b = apply_map(gl, &extend_eval(fk, &word));
                let nf = factorial_of(&w);
                for t in 0..sp.dim() {
                    let v = a[t].add(&b[t].scale(&sgn));
                    if !v.is_zero() {
                        out.add_term(BasisCochain::new(w.clone(), t), v.scale(&nf.recip()));
                    }
                }
            }
        }
    }
    out
}

/// Checks that `phi` can generate an automorphism exp(ad φ).
pub fn check_generator<S: Scalar>(phi: &Coderivation<S>) -> Result<(), CoderError> {
    let sp = phi.space();
    for (c, _) in phi.terms() {
        let even = match sp.mode() {
            Grading::Z => c.internal_degree(sp) == 0,
            Grading::Z2 => !c.is_odd(sp),
        };
        if !even || c.exterior_degree() < 2 {
            return Err(CoderError::BadGenerator(c.label(sp)));
        }
    }
    Ok(())
}

/// Σ_i (-ad_φ)^i(d)/i!, discarding terms with more than `cutoff` inputs.
pub fn exp_ad<S: Scalar>(
    phi: &Coderivation<S>,
    d: &Coderivation<S>,
    cutoff: u32,
) -> Result<Coderivation<S>, CoderError> {
    check_generator(phi)?;
    if let Some(order) = d.order() {
        if cutoff < order {
            return Err(CoderError::CutoffTooSmall { cutoff, order });
        }
    }
    let mut term = d.truncate(cutoff);
    let mut total = term.clone();
    let mut i = 1i64;
    while !term.is_zero() {
        term = bracket(phi, &term)
            .truncate(cutoff)
            .scale_rational(&Rational::new((-1).into(), i.into()));
        total = total.add(&term);
        i += 1;
    }
    Ok(total)
}

/// Sum of the terms of `d` with exactly `r` inputs, as a map on words of
/// rank `r`: (word, target) ↦ value of d on the word. Used by tests and the
/// block analysis.
pub fn values_on_words<S: Scalar>(d: &Coderivation<S>, r: u32) -> BTreeMap<(SymWord, usize), S> {
    let mut out = BTreeMap::new();
    for (c, v) in d.part(r).terms() {
        out.insert(
            (SymWord(c.exponents.clone()), c.target),
            v.scale(&factorial_of(&c.exponents)),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{parse_scalar, RatFun};
    use crate::space::parse_cochain;

    fn sp() -> GradedSpace {
        GradedSpace::z(&[0, -1, 1])
    }

    #[test]
    fn extension_examples() {
        let f = parse_cochain("ph[1,0,1;2]", &sp()).unwrap();
        let out = extend_eval(&f, &SymWord(vec![1, 0, 1]));
        assert_eq!(out.coeff(&SymWord(vec![0, 1, 0])), RatFun::one());
        let sp2 = GradedSpace::z(&[0, 1, 2]);
        let f = parse_cochain("ph[2,0,0;1]", &sp2).unwrap();
        let out = extend_eval(&f, &SymWord(vec![2, 0, 0]));
        assert_eq!(out.coeff(&SymWord(vec![1, 0, 0])), RatFun::from_i64(2));
    }

    #[test]
    fn self_bracket_at_order_two() {
        let d = parse_cochain("ps[1,1,0;1]*a + ps[2,0,0;3]*b + ps[0,1,1;3]*c", &sp()).unwrap();
        let dd = bracket(&d, &d);
        let expected = parse_cochain("ph[2,1,0;3]*(2*b*(2*a-c))", &sp()).unwrap();
        assert_eq!(dd, expected);
        assert_eq!(bracket_via_words(&d, &d), expected);
    }

    #[test]
    fn first_kind_is_codifferential() {
        let s = GradedSpace::z(&[0, 2, 1]);
        for k in 1..5 {
            let d = parse_cochain(&format!("ps[{},0,1;2]", k - 1), &s).unwrap();
            assert!(bracket(&d, &d).is_zero());
        }
    }

    #[test]
    fn expad_of_commuting_generator() {
        let d = parse_cochain("ps[2,0,0;3]", &sp()).unwrap();
        let phi = parse_cochain("ph[2,0,0;1]*0", &sp()).unwrap();
        assert_eq!(exp_ad(&phi, &d, 5).unwrap(), d);
        let bad = parse_cochain("ph[1,0,0;1]", &sp()).unwrap();
        assert!(exp_ad(&bad, &d, 5).is_err());
        let gen = parse_cochain("ph[2,0,0;1]*t", &sp()).unwrap();
        let _ = parse_scalar("t").unwrap();
        assert!(matches!(
            exp_ad(&gen, &d, 1),
            Err(CoderError::CutoffTooSmall { .. })
        ));
    }
}
