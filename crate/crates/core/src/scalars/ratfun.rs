use std::collections::BTreeMap;
use std::fmt;

use super::{ParamPoly, Params, Rational, Scalar, ScalarError};

/// Quotient of two parameter polynomials.
///
/// Normal form: the numerator and denominator share a parameter list, the
/// denominator's leading coefficient is 1, common monomial factors are
/// cancelled, and a denominator that divides the numerator exactly is removed.
/// No multivariate gcd is taken, so equal functions may have different
/// representations; equality cross-multiplies.
#[derive(Clone, Debug)]
pub struct RatFun {
    num: ParamPoly,
    den: ParamPoly,
}

impl RatFun {
    pub fn new(num: ParamPoly, den: ParamPoly) -> Result<Self, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Self::normalized(num, den))
    }

    pub fn from_poly(p: ParamPoly) -> Self {
        let den = ParamPoly::constant(p.params().clone(), Rational::one());
        RatFun { num: p, den }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(ParamPoly::constant(Params::empty(), c))
    }

    pub fn var(name: &str) -> Self {
        let ps = Params::new([name]).expect("single name");
        Self::from_poly(ParamPoly::var(ps, name).expect("declared"))
    }

    pub fn num(&self) -> &ParamPoly {
        &self.num
    }

    pub fn den(&self) -> &ParamPoly {
        &self.den
    }

    pub fn params(&self) -> &Params {
        self.num.params()
    }

    pub fn with_params(&self, target: &Params) -> Option<RatFun> {
        Some(RatFun {
            num: self.num.with_params(target)?,
            den: self.den.with_params(target)?,
        })
    }

    /// Names of parameters actually occurring in numerator or denominator.
    pub fn used_names(&self) -> Vec<String> {
        let mut idx = self.num.used_vars();
        idx.extend(self.den.used_vars());
        idx.sort_unstable();
        idx.dedup();
        idx.into_iter()
            .map(|i| self.params().names()[i].clone())
            .collect()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    fn normalized(num: ParamPoly, den: ParamPoly) -> Self {
        let (mut num, mut den) = ParamPoly::unify(&num, &den);
        let params = num.params().clone();
        if num.is_zero() {
            return RatFun {
                num,
                den: ParamPoly::constant(params, Rational::one()),
            };
        }
        let g = {
            let a = num.monomial_content();
            let b = den.monomial_content();
            crate::scalars::Monomial::from_exponents(
                a.exponents()
                    .iter()
                    .zip(b.exponents())
                    .map(|(x, y)| *x.min(y))
                    .collect(),
            )
        };
        if !g.is_one() {
            num = num.div_monomial(&g);
            den = den.div_monomial(&g);
        }
        if den.constant_value().is_none() {
            if let Some(q) = num.div_exact(&den) {
                num = q;
                den = ParamPoly::constant(params.clone(), Rational::one());
            } else if num.nterms() > 1 || num.constant_value().is_none() {
                if let Some(q) = den.div_exact(&num) {
                    let lc = q.leading().map(|(_, c)| c.clone()).unwrap_or_else(Rational::one);
                    let inv = lc.recip();
                    return RatFun {
                        num: ParamPoly::constant(params, inv.clone()),
                        den: q.scale(&inv),
                    };
                }
            }
        }
        let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero den");
        if !lc.is_one() {
            let inv = lc.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        RatFun { num, den }
    }

    /// Cross-multiplication test; the parameter lists must agree.
    pub fn rf_equals(&self, other: &RatFun) -> Result<bool, ScalarError> {
        if self.params() != other.params() {
            return Err(ScalarError::ParamMismatch {
                left: self.params().to_string(),
                right: other.params().to_string(),
            });
        }
        Ok(self.cross_equal(other))
    }

    fn cross_equal(&self, other: &RatFun) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }

    /// Exact value at a point binding every parameter that occurs.
    pub fn substitute(&self, bindings: &BTreeMap<String, Rational>) -> Result<Rational, ScalarError> {
        let values = self.point(bindings)?;
        let d = self.den.eval(&values);
        if d.is_zero() {
            return Err(ScalarError::Pole);
        }
        Ok(self.num.eval(&values) / d)
    }

    fn point(&self, bindings: &BTreeMap<String, Rational>) -> Result<Vec<Rational>, ScalarError> {
        let used = self.used_names();
        self.params()
            .names()
            .iter()
            .map(|n| match bindings.get(n) {
                Some(v) => Ok(v.clone()),
                None if used.contains(n) => Err(ScalarError::MissingBinding(n.clone())),
                None => Ok(Rational::zero()),
            })
            .collect()
    }

    /// Replaces the named parameters by rational values, keeping the rest
    /// symbolic.
    pub fn partial_substitute(
        &self,
        bindings: &BTreeMap<String, Rational>,
    ) -> Result<RatFun, ScalarError> {
        let mut out = RatFun::from_poly(ParamPoly::zero(self.params().clone()));
        let mut den = RatFun::from_poly(ParamPoly::zero(self.params().clone()));
        for (target, poly) in [(&mut out, &self.num), (&mut den, &self.den)] {
            for (m, c) in poly.terms() {
                let mut t = RatFun::constant(c.clone());
                for (i, &e) in m.exponents().iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    let name = &self.params().names()[i];
                    let base = match bindings.get(name) {
                        Some(v) => RatFun::constant(v.clone()),
                        None => RatFun::var(name),
                    };
                    for _ in 0..e {
                        t = Scalar::mul(&t, &base);
                    }
                }
                *target = Scalar::add(target, &t);
            }
        }
        let r = Scalar::div(&out, &den).ok_or(ScalarError::Pole)?;
        Ok(r.with_params(self.params()).unwrap_or(r))
    }

    /// Replaces parameter `name` by the rational function `value`.
    pub fn substitute_ratfun(&self, name: &str, value: &RatFun) -> Result<RatFun, ScalarError> {
        let Some(idx) = self.params().index_of(name) else {
            return Ok(self.clone());
        };
        let eval = |poly: &ParamPoly| -> RatFun {
            let mut acc = RatFun::zero();
            for (m, c) in poly.terms() {
                let mut t = RatFun::constant(c.clone());
                for (i, &e) in m.exponents().iter().enumerate() {
                    let base = if i == idx {
                        value.clone()
                    } else {
                        RatFun::var(&self.params().names()[i])
                    };
                    for _ in 0..e {
                        t = Scalar::mul(&t, &base);
                    }
                }
                acc = Scalar::add(&acc, &t);
            }
            acc
        };
        Scalar::div(&eval(&self.num), &eval(&self.den)).ok_or(ScalarError::Pole)
    }

    /// Drops parameter-polynomial terms of total degree above `order` from a
    /// polynomial value. Rational functions with nonconstant denominators are
    /// returned unchanged.
    pub fn truncate(&self, order: u32) -> RatFun {
        if self.den.constant_value().is_some() {
            RatFun::normalized(self.num.truncate(order), self.den.clone())
        } else {
            self.clone()
        }
    }

    /// Lowest total degree of a numerator term (the order of vanishing at the
    /// origin for polynomial values); `None` for zero.
    pub fn low_degree(&self) -> Option<u32> {
        self.num.terms().map(|(m, _)| m.degree()).min()
    }
}

impl PartialEq for RatFun {
    fn eq(&self, other: &Self) -> bool {
        if self.params() == other.params() {
            return self.cross_equal(other);
        }
        let p = self.params().union(other.params());
        let a = self.with_params(&p).expect("union");
        let b = other.with_params(&p).expect("union");
        a.cross_equal(&b)
    }
}

impl fmt::Display for RatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let wrap = |p: &ParamPoly| {
            let s = p.to_string();
            if p.nterms() > 1 || s.contains('/') || s.starts_with('-') {
                format!("({s})")
            } else {
                s
            }
        };
        write!(f, "{}/{}", wrap(&self.num), wrap(&self.den))
    }
}

impl Scalar for RatFun {
    fn zero() -> Self {
        RatFun::constant(Rational::zero())
    }
    fn one() -> Self {
        RatFun::constant(Rational::one())
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let (an, ad) = ParamPoly::unify(&self.num, &self.den);
        let (bn, bd) = (
            other.num.with_params(an.params()),
            other.den.with_params(an.params()),
        );
        if let (Some(bn), Some(bd)) = (bn, bd) {
            if ad == bd {
                return RatFun::normalized(&an + &bn, ad);
            }
        }
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        RatFun::normalized(num, &self.den * &other.den)
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            let p = self.params().union(other.params());
            return RatFun::from_poly(ParamPoly::zero(p));
        }
        let (mut a, mut d) = (self.num.clone(), other.den.clone());
        if d.constant_value().is_none() {
            if let Some(q) = a.div_exact(&d) {
                a = q;
                d = ParamPoly::constant(d.params().clone(), Rational::one());
            }
        }
        let (mut c, mut b) = (other.num.clone(), self.den.clone());
        if b.constant_value().is_none() {
            if let Some(q) = c.div_exact(&b) {
                c = q;
                b = ParamPoly::constant(b.params().clone(), Rational::one());
            }
        }
        RatFun::normalized(&a * &c, &b * &d)
    }
    fn neg(&self) -> Self {
        RatFun {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
    fn inv(&self) -> Option<Self> {
        if self.num.is_zero() {
            None
        } else {
            Some(RatFun::normalized(self.den.clone(), self.num.clone()))
        }
    }
    fn from_rational(r: Rational) -> Self {
        RatFun::constant(r)
    }
    fn to_rational(&self) -> Option<Rational> {
        let n = self.num.constant_value()?;
        let d = self.den.constant_value()?;
        Some(n / d)
    }
    fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return RatFun::from_poly(ParamPoly::zero(self.params().clone()));
        }
        RatFun {
            num: self.num.scale(r),
            den: self.den.clone(),
        }
    }
}

impl From<Rational> for RatFun {
    fn from(r: Rational) -> Self {
        RatFun::constant(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{int, parse_scalar, rat};

    fn rf(s: &str) -> RatFun {
        parse_scalar(s).unwrap()
    }

    #[test]
    fn cancels_denominator() {
        let x1 = rf("r*(2*s2-t2)/(1+t3)");
        let prod = Scalar::mul(&x1, &rf("1+t3"));
        assert!(prod.is_polynomial());
        assert_eq!(prod, rf("2*r*s2-r*t2"));
    }

    #[test]
    fn inverse_of_zero_is_error() {
        assert!(Scalar::inv(&RatFun::zero()).is_none());
        assert_eq!(Scalar::inv(&rf("t1")).unwrap().to_string(), "1/t1");
    }

    #[test]
    fn monomial_factors_cancel() {
        let a = rf("t/t^2");
        assert_eq!(a.to_string(), "1/t");
    }

    #[test]
    fn strict_equality_checks_params() {
        let a = rf("s2-t2");
        let b = rf("2*s2-t2");
        assert_eq!(a.rf_equals(&b), Ok(false));
        let c = rf("x");
        assert!(a.rf_equals(&c).is_err());
    }

    #[test]
    fn pole_and_value() {
        let f = rf("1/(1+t3)");
        let mut b = BTreeMap::new();
        b.insert("t3".to_string(), int(-1));
        assert_eq!(f.substitute(&b), Err(ScalarError::Pole));
        b.insert("t3".to_string(), int(1));
        assert_eq!(f.substitute(&b), Ok(rat(1, 2)));
    }

    #[test]
    fn substitute_a_function() {
        let f = rf("a*b+a");
        let g = f.substitute_ratfun("a", &rf("1/b")).unwrap();
        assert_eq!(g, rf("(b+1)/b"));
    }
}
