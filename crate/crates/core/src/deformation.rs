//! Infinitesimal and miniversal deformations, extension obstructions and
//! reduction to standard form.
//!
//! The miniversal deformation is built as d^∞ = d + δ_i t^i + γ_j x^j where
//! δ_i represent odd cohomology classes and γ_j are preimages of the even
//! coboundaries β_j. Writing ½[d^∞, d^∞] = α_i r^i + β_j s^j + τ y, the
//! equations s^j = 0 determine the x^j and the r^i are the relations on the
//! base.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::coder::{bracket, exp_ad, CoderError};
use crate::cohomology::{
    cohomology_basis_with_cutoff, filtered_boundaries, is_coboundary, CohomologyBasis,
    CohomologyError,
};
use crate::linalg::Matrix;
use crate::scalars::{rat, RatFun, Rational, Scalar, ScalarError};
use crate::space::{enumerate_cochain_basis, BasisCochain, Coderivation, GradedSpace, Grading};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DeformationError {
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Coder(#[from] CoderError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("duplicate parameter name `{0}`")]
    DuplicateName(String),
    #[error("relation fails at exterior degree {degree}: [d,d] has a nonzero component there")]
    RelationFails { degree: u32 },
    #[error("leading term of order {0} is not followed by a cocycle")]
    NotCocycle(u32),
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("relation violated: coefficient of {class} (exterior degree {degree}) is {value}")]
    RelationViolated {
        degree: u32,
        class: String,
        value: String,
    },
    #[error("correction equations are not uniquely solvable at this point")]
    SingularPoint,
}

/// Grading value of odd cochains (degree 1, or parity 1).
pub fn odd_grade(_sp: &GradedSpace) -> i64 {
    1
}

/// Grading value of self-brackets of odd cochains.
pub fn even_grade(sp: &GradedSpace) -> i64 {
    match sp.mode() {
        Grading::Z => 2,
        Grading::Z2 => 0,
    }
}

/// What a namer sees about a cohomology representative.
#[derive(Debug, Clone)]
pub struct RepInfo {
    pub n: u32,
    /// Position of the representative among those in degree n.
    pub index: usize,
    /// First basis cochain with a nonzero coefficient in the leading term.
    pub pivot: BasisCochain,
    /// Column of `pivot` in the standard basis of C^n.
    pub column: usize,
}

pub type Namer<'a> = &'a dyn Fn(&RepInfo) -> String;

/// Names parameters by the column of the representative's pivot:
/// s, r, t for the first three columns, then u, v, w.
pub fn column_namer(info: &RepInfo) -> String {
    const LETTERS: [&str; 6] = ["s", "r", "t", "u", "v", "w"];
    match LETTERS.get(info.column) {
        Some(l) => format!("{l}{}", info.n),
        None => format!("p{}_{}", info.n, info.column),
    }
}

#[derive(Debug, Clone)]
pub struct DeformationParam {
    pub name: String,
    /// Exterior degree of the leading term of the cochain it multiplies.
    pub degree: u32,
    pub cochain: Coderivation<Rational>,
}

#[derive(Debug, Clone, Default)]
pub struct DeformationParams {
    pub params: Vec<DeformationParam>,
}

impl DeformationParams {
    pub fn names(&self) -> Vec<String> {
        self.params.iter().map(|p| p.name.clone()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&DeformationParam> {
        self.params.iter().find(|p| p.name == name)
    }

    fn push(&mut self, p: DeformationParam) -> Result<(), DeformationError> {
        if self.get(&p.name).is_some() {
            return Err(DeformationError::DuplicateName(p.name));
        }
        self.params.push(p);
        Ok(())
    }
}

fn lift(c: &Coderivation<Rational>, v: &RatFun) -> Coderivation<RatFun> {
    c.to_ratfun().scale(v)
}

fn first_nonzero(c: &Coderivation<Rational>, n: u32, basis: &[BasisCochain]) -> (BasisCochain, usize) {
    let lead = c.part(n);
    basis
        .iter()
        .enumerate()
        .find(|(_, b)| !Scalar::is_zero(&lead.coeff(b)))
        .map(|(i, b)| (b.clone(), i))
        .expect("nonzero leading term")
}

/// d + Σ δ_i t^i over the odd cohomology in exterior degrees 1..=cutoff.
pub fn infinitesimal_deformation(
    d: &Coderivation<Rational>,
    cutoff: u32,
    namer: Namer,
) -> Result<(Coderivation<RatFun>, DeformationParams), DeformationError> {
    let sp = d.space();
    let mut params = DeformationParams::default();
    let mut out = d.to_ratfun();
    for n in 1..=cutoff {
        let h = cohomology_basis_with_cutoff(d, n, odd_grade(sp), cutoff)?;
        for (i, rep) in h.representatives.iter().enumerate() {
            let (pivot, column) = first_nonzero(rep, n, &h.basis);
            let name = namer(&RepInfo {
                n,
                index: i,
                pivot,
                column,
            });
            let rep = rep.truncate(cutoff);
            out = out.add(&lift(&rep, &RatFun::var(&name)));
            params.push(DeformationParam {
                name,
                degree: n,
                cochain: rep,
            })?;
        }
    }
    Ok((out, params))
}

/// A correction term γ x added to cancel a coboundary in the self-bracket.
#[derive(Debug, Clone)]
pub struct Correction {
    pub name: String,
    pub preimage: Coderivation<Rational>,
    pub value: RatFun,
}

#[derive(Debug, Clone)]
pub struct Relation {
    /// Exterior degree of the cohomology class.
    pub degree: u32,
    pub class: Coderivation<Rational>,
    /// Coefficient with the corrections left as symbols x_j.
    pub mixed: RatFun,
    /// Coefficient in the original parameters.
    pub value: RatFun,
}

#[derive(Debug, Clone)]
pub struct DeformationResult {
    pub d_infinity: Coderivation<RatFun>,
    pub d_infinity_mixed: Coderivation<RatFun>,
    pub params: DeformationParams,
    /// Corrections with nonzero value.
    pub corrections: Vec<Correction>,
    /// Nonzero relations on the base.
    pub relations: Vec<Relation>,
    /// Components outside cocycles; they vanish modulo the relations.
    pub residuals: Vec<RatFun>,
    pub order_reached: u32,
    pub converged: bool,
}

impl DeformationResult {
    pub fn relation_values(&self) -> Vec<RatFun> {
        self.relations.iter().map(|r| r.value.clone()).collect()
    }

    pub fn relation_mixed(&self) -> Vec<RatFun> {
        self.relations.iter().map(|r| r.mixed.clone()).collect()
    }
}

struct EvenData {
    coh: Vec<CohomologyBasis>,
}

impl EvenData {
    fn new(d: &Coderivation<Rational>, cutoff: u32) -> Result<Self, DeformationError> {
        let sp = d.space();
        let coh = (1..=cutoff)
            .map(|n| cohomology_basis_with_cutoff(d, n, even_grade(sp), cutoff))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EvenData { coh })
    }
}

/// Splits ½[e, e] degree by degree into class coefficients, coboundary
/// coefficients and the rest. Returns (per-degree α coefficients, β
/// coefficients in the order of `even.coh[n].coboundaries`, residuals).
#[allow(clippy::type_complexity)]
fn split_bracket(
    e: &Coderivation<RatFun>,
    even: &EvenData,
    cutoff: u32,
) -> (Vec<(u32, Coderivation<Rational>, RatFun)>, Vec<RatFun>, Vec<RatFun>) {
    let mut rest = bracket(e, e).truncate(cutoff).scale_rational(&rat(1, 2));
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut taus = Vec::new();
    for (idx, h) in even.coh.iter().enumerate() {
        let n = idx as u32 + 1;
        let v = rest.part(n).coords(&h.basis);
        let (a, b, c) = h.decompose(&v);
        let comp = h.complement();
        for (rep, ai) in h.representatives.iter().zip(&a) {
            rest = rest.sub(&lift(rep, ai));
            alphas.push((n, rep.clone(), ai.clone()));
        }
        for ((_, img), bi) in h.coboundaries.iter().zip(&b) {
            rest = rest.sub(&lift(img, bi));
            betas.push(bi.clone());
        }
        for (t, ci) in comp.iter().zip(&c) {
            let tc = Coderivation::from_coords(e.space(), &h.basis, t);
            rest = rest.sub(&lift(&tc, ci));
            taus.push(ci.clone());
        }
    }
    (alphas, betas, taus)
}

/// Total degree of `f`'s numerator in the variables `names`, or `None` when
/// the denominator involves them.
fn degree_in_names(f: &RatFun, names: &[String]) -> Option<u32> {
    let idx = |p: &crate::scalars::ParamPoly| -> Vec<usize> {
        names.iter().filter_map(|n| p.params().index_of(n)).collect()
    };
    let den_idx = idx(f.den());
    if den_idx.iter().any(|&i| f.den().degree_in(i) > 0) {
        return None;
    }
    let num_idx = idx(f.num());
    Some(
        f.num()
            .terms()
            .map(|(m, _)| num_idx.iter().map(|&i| m.exponents()[i]).sum::<u32>())
            .max()
            .unwrap_or(0),
    )
}

fn subst_all(f: &RatFun, vals: &[(String, RatFun)]) -> Result<RatFun, ScalarError> {
    let mut g = f.clone();
    for (name, v) in vals {
        g = g.substitute_ratfun(name, v)?;
    }
    Ok(g)
}

fn subst_coder(d: &Coderivation<RatFun>, vals: &[(String, RatFun)]) -> Result<Coderivation<RatFun>, ScalarError> {
    d.try_map(|v| subst_all(v, vals))
}

/// Miniversal deformation of `d`, keeping terms with at most `cutoff`
/// inputs. Corrections are solved exactly when the coboundary equations are
/// linear in them; otherwise order by order in the parameters up to
/// `max_order`.
pub fn miniversal(
    d: &Coderivation<Rational>,
    max_order: u32,
    cutoff: u32,
    namer: Namer,
) -> Result<DeformationResult, DeformationError> {
    let (dinf, params) = infinitesimal_deformation(d, cutoff, namer)?;
    let even = EvenData::new(d, cutoff)?;

    let gammas = correction_unknowns(&even, &params)?;
    let xnames: Vec<String> = gammas.iter().map(|(n, _)| n.clone()).collect();
    let mut mixed = dinf.clone();
    for (name, g) in &gammas {
        mixed = mixed.add(&lift(g, &RatFun::var(name)));
    }

    let (alphas, betas, taus) = split_bracket(&mixed, &even, cutoff);
    let solved = solve_exact(&betas, &xnames)?;

    let (values, order_reached, converged) = match solved {
        Some(v) => (v, max_order, true),
        None => iterate_corrections(&dinf, &gammas, &even, max_order, cutoff)?,
    };
    let vals: Vec<(String, RatFun)> = xnames.iter().cloned().zip(values.iter().cloned()).collect();

    let d_infinity = subst_coder(&mixed, &vals)?;
    // Corrections that vanish are dropped from the mixed form as well.
    let zeros: Vec<(String, RatFun)> = vals.iter().filter(|(_, v)| v.is_zero()).cloned().collect();
    let mixed = subst_coder(&mixed, &zeros)?;
    let mut relations = Vec::new();
    for (n, class, a) in alphas {
        let value = subst_all(&a, &vals)?;
        let a = subst_all(&a, &zeros)?;
        let value = if converged { value } else { value.truncate(max_order) };
        if !value.is_zero() || !a.is_zero() {
            relations.push(Relation {
                degree: n,
                class,
                mixed: a,
                value,
            });
        }
    }
    relations.retain(|r| !r.value.is_zero());
    let residuals = taus
        .iter()
        .map(|c| subst_all(c, &vals))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|c| !c.is_zero())
        .collect();
    let corrections = gammas
        .into_iter()
        .zip(values)
        .filter(|(_, v)| !v.is_zero())
        .map(|((name, preimage), value)| Correction {
            name,
            preimage,
            value,
        })
        .collect();
    Ok(DeformationResult {
        d_infinity,
        d_infinity_mixed: mixed,
        params,
        corrections,
        relations,
        residuals,
        order_reached,
        converged,
    })
}

/// One unknown per even coboundary, named by the degree of its preimage.
fn correction_unknowns(
    even: &EvenData,
    params: &DeformationParams,
) -> Result<Vec<(String, Coderivation<Rational>)>, DeformationError> {
    let mut per_degree: BTreeMap<u32, usize> = BTreeMap::new();
    for h in &even.coh {
        for (pre, _) in &h.coboundaries {
            let deg = pre.order().expect("nonzero preimage");
            *per_degree.entry(deg).or_default() += 1;
        }
    }
    let mut gammas = Vec::new();
    let mut seen: BTreeMap<u32, usize> = BTreeMap::new();
    for h in &even.coh {
        for (pre, _) in &h.coboundaries {
            let deg = pre.order().expect("nonzero preimage");
            let i = seen.entry(deg).or_default();
            *i += 1;
            let name = if per_degree[&deg] == 1 {
                format!("x{deg}")
            } else {
                format!("x{deg}_{i}")
            };
            if params.get(&name).is_some() {
                return Err(DeformationError::DuplicateName(name));
            }
            gammas.push((name, pre.clone()));
        }
    }
    Ok(gammas)
}

/// The codifferential d^∞(p) at a single point p of the base, with unbound
/// parameters set to zero. The correction equations are solved with the
/// parameters already substituted, which agrees with substituting into
/// [`miniversal`] wherever the correction system stays uniquely solvable;
/// elsewhere this returns `SingularPoint`.
pub fn miniversal_at(
    d: &Coderivation<Rational>,
    bindings: &BTreeMap<String, Rational>,
    cutoff: u32,
    namer: Namer,
) -> Result<(DeformationParams, Coderivation<Rational>), DeformationError> {
    let (dinf, params) = infinitesimal_deformation(d, cutoff, namer)?;
    if let Some(bad) = bindings.keys().find(|n| params.get(n).is_none()) {
        return Err(DeformationError::UnknownParam(bad.clone()));
    }
    let mut full: BTreeMap<String, Rational> =
        params.names().into_iter().map(|n| (n, rat(0, 1))).collect();
    full.extend(bindings.clone());
    let point = dinf.try_map(|c| c.substitute(&full).map(RatFun::constant))?;
    let even = EvenData::new(d, cutoff)?;
    let gammas = correction_unknowns(&even, &params)?;
    let xnames: Vec<String> = gammas.iter().map(|(n, _)| n.clone()).collect();
    let mut mixed = point;
    for (name, g) in &gammas {
        mixed = mixed.add(&lift(g, &RatFun::var(name)));
    }
    let (alphas, betas, taus) = split_bracket(&mixed, &even, cutoff);
    let values = solve_exact(&betas, &xnames)?.ok_or(DeformationError::SingularPoint)?;
    let vals: Vec<(String, RatFun)> = xnames.into_iter().zip(values).collect();
    for (n, class, a) in alphas {
        let v = subst_all(&a, &vals)?;
        if !v.is_zero() {
            return Err(DeformationError::RelationViolated {
                degree: n,
                class: class.to_string(),
                value: v.to_string(),
            });
        }
    }
    if let Some(t) = taus.iter().map(|t| subst_all(t, &vals)).find(|t| !matches!(t, Ok(v) if v.is_zero())) {
        return Err(DeformationError::RelationViolated {
            degree: 0,
            class: "off-cocycle component".into(),
            value: t?.to_string(),
        });
    }
    let out = subst_coder(&mixed, &vals)?
        .to_rational()
        .ok_or(DeformationError::SingularPoint)?;
    Ok((params, out))
}

/// Solves the coboundary equations exactly when they can be peeled into
/// blocks that are affine in the unknowns still open: solve every equation
/// of degree at most one, substitute, repeat.
fn solve_exact(eqs: &[RatFun], xs: &[String]) -> Result<Option<Vec<RatFun>>, DeformationError> {
    let mut eqs: Vec<RatFun> = eqs.to_vec();
    let mut known: Vec<(String, RatFun)> = Vec::new();
    loop {
        let open: Vec<String> = xs
            .iter()
            .filter(|x| !known.iter().any(|(k, _)| k == *x))
            .cloned()
            .collect();
        eqs.retain(|e| !e.is_zero());
        if open.is_empty() {
            if !eqs.is_empty() {
                return Ok(None);
            }
            break;
        }
        let (lin, rest): (Vec<RatFun>, Vec<RatFun>) = eqs
            .iter()
            .cloned()
            .partition(|e| degree_in_names(e, &open).is_some_and(|deg| deg <= 1));
        if lin.is_empty() {
            return Ok(None);
        }
        let used: Vec<String> = open
            .iter()
            .filter(|x| lin.iter().any(|e| e.used_names().contains(x)))
            .cloned()
            .collect();
        let Some(vals) = solve_affine(&lin, &used)? else {
            return Ok(None);
        };
        let vals: Vec<(String, RatFun)> = used.into_iter().zip(vals).collect();
        eqs = rest
            .iter()
            .map(|e| subst_all(e, &vals))
            .collect::<Result<_, _>>()?;
        for (_, v) in known.iter_mut() {
            *v = subst_all(v, &vals)?;
        }
        known.extend(vals);
        // Unknowns absent from every equation are free; set them to zero.
        if eqs.iter().all(|e| e.is_zero()) {
            for x in xs {
                if !known.iter().any(|(k, _)| k == x) {
                    known.push((x.clone(), RatFun::zero()));
                }
            }
        }
    }
    Ok(Some(
        xs.iter()
            .map(|x| known.iter().find(|(k, _)| k == x).map(|(_, v)| v.clone()).unwrap_or_else(RatFun::zero))
            .collect(),
    ))
}

/// Unique solution of affine equations in `xs`, if there is one.
fn solve_affine(eqs: &[RatFun], xs: &[String]) -> Result<Option<Vec<RatFun>>, DeformationError> {
    let zero_all: Vec<(String, RatFun)> = xs.iter().map(|x| (x.clone(), RatFun::zero())).collect();
    let mut m = Matrix::zeros(eqs.len(), xs.len());
    let mut rhs = Vec::with_capacity(eqs.len());
    for (i, e) in eqs.iter().enumerate() {
        let c0 = subst_all(e, &zero_all)?;
        for (j, x) in xs.iter().enumerate() {
            let unit: Vec<(String, RatFun)> = xs
                .iter()
                .map(|y| (y.clone(), if y == x { RatFun::one() } else { RatFun::zero() }))
                .collect();
            m.set(i, j, subst_all(e, &unit)?.sub(&c0));
        }
        rhs.push(c0.neg());
    }
    if m.rank() < xs.len() {
        return Ok(None);
    }
    Ok(m.solve(&rhs))
}

/// x ← x − s(x), keeping parameter orders up to m, for m = 2..=max_order.
#[allow(clippy::type_complexity)]
fn iterate_corrections(
    dinf: &Coderivation<RatFun>,
    gammas: &[(String, Coderivation<Rational>)],
    even: &EvenData,
    max_order: u32,
    cutoff: u32,
) -> Result<(Vec<RatFun>, u32, bool), DeformationError> {
    let mut xs = vec![RatFun::zero(); gammas.len()];
    let mut quiet = 0;
    let mut reached = 1;
    for m in 2..=max_order {
        let mut e = dinf.clone();
        for ((_, g), x) in gammas.iter().zip(&xs) {
            e = e.add(&lift(g, x));
        }
        let (_, betas, _) = split_bracket(&e, even, cutoff);
        if betas.iter().all(|b| b.is_zero()) {
            return Ok((xs, m - 1, true));
        }
        let next: Vec<RatFun> = xs.iter().zip(&betas).map(|(x, b)| x.sub(b).truncate(m)).collect();
        quiet = if next == xs { quiet + 1 } else { 0 };
        xs = next;
        reached = m;
        if quiet >= 2 {
            return Ok((xs, reached, true));
        }
    }
    Ok((xs, reached, false))
}

/// The cocycle −½ Σ_{r=k+1}^{n} [d_r, d_{k+n+1-r}] whose vanishing class
/// lets `d` extend by a term with n+1 inputs, and such a term when it
/// exists. `d` must satisfy the codifferential equations through exterior
/// degree n+k-1.
pub fn extend_obstruction(
    d: &Coderivation<Rational>,
    n: u32,
) -> Result<(Coderivation<Rational>, Option<Coderivation<Rational>>), DeformationError> {
    let sp = d.space();
    let Some(k) = d.order() else {
        return Ok((Coderivation::zero(sp), Some(Coderivation::zero(sp))));
    };
    let d = d.truncate(n);
    let sq = bracket(&d, &d);
    for m in 1..n + k {
        if !sq.part(m).is_zero() {
            return Err(DeformationError::RelationFails { degree: m });
        }
    }
    let c = sq.part(n + k).scale_rational(&rat(-1, 2));
    let dk = d.part(k);
    let pre = is_coboundary(&dk, &c)?.map(|x| x.part(n + 1));
    Ok((c, pre))
}

/// Result of a reduction: the reduced codifferential and the generators γ
/// applied in order, each as exp(-ad_γ) in the convention of [`exp_ad`].
#[derive(Debug, Clone)]
pub struct Reduction {
    pub reduced: Coderivation<Rational>,
    pub chain: Vec<Coderivation<Rational>>,
}

impl Reduction {
    /// Replays the chain on `d`.
    pub fn replay(&self, d: &Coderivation<Rational>, cutoff: u32) -> Result<Coderivation<Rational>, CoderError> {
        let mut cur = d.truncate(cutoff);
        for g in &self.chain {
            cur = exp_ad(g, &cur, cutoff)?;
        }
        Ok(cur)
    }
}

/// Repeatedly removes a second term that is a coboundary for the leading
/// term, stopping at the first nontrivial second term or past `cutoff`.
pub fn standard_form_reduce(
    d: &Coderivation<Rational>,
    cutoff: u32,
) -> Result<Reduction, DeformationError> {
    let mut cur = d.truncate(cutoff);
    let mut chain = Vec::new();
    let Some(k) = cur.order() else {
        return Ok(Reduction { reduced: cur, chain });
    };
    let dk = cur.part(k);
    loop {
        let Some(l) = cur.exterior_degrees().into_iter().find(|&l| l > k) else {
            break;
        };
        let dl = cur.part(l);
        match is_coboundary(&dk, &dl) {
            Ok(Some(x)) => {
                let g = x.part(l + 1 - k).neg();
                if g.is_zero() {
                    break;
                }
                cur = exp_ad(&g, &cur, cutoff)?;
                chain.push(g);
            }
            Ok(None) => break,
            Err(CohomologyError::NotCocycle) => return Err(DeformationError::NotCocycle(k)),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Reduction { reduced: cur, chain })
}

/// Reduces every term above the leading one modulo coboundaries of the
/// terms below it, degree by degree. Among coboundary directions the later
/// basis cochains are eliminated first, so the result keeps the earliest
/// basis cochain of each class.
pub fn reduce_filtered(
    d: &Coderivation<Rational>,
    cutoff: u32,
) -> Result<Reduction, DeformationError> {
    let sp = d.space().clone();
    let mut cur = d.truncate(cutoff);
    let mut chain = Vec::new();
    let Some(k) = cur.order() else {
        return Ok(Reduction { reduced: cur, chain });
    };
    for n in (k + 1)..=cutoff {
        let s = odd_grade(&sp);
        let basis = enumerate_cochain_basis(&sp, n, s);
        let bds = filtered_boundaries(&cur, n, s, 2, cutoff);
        if bds.is_empty() {
            continue;
        }
        let v = cur.part(n).coords(&basis);
        if v.iter().all(Scalar::is_zero) {
            continue;
        }
        // Eliminate trailing coordinates first: work with reversed columns.
        let rev = |x: &[Rational]| x.iter().rev().cloned().collect::<Vec<_>>();
        let leads: Vec<Vec<Rational>> = bds
            .iter()
            .map(|b| rev(&b.image.part(n).coords(&basis)))
            .collect();
        let ech = Matrix::from_rows(leads.clone()).rref();
        let rv = rev(&v);
        let kept = ech.reduce(&rv);
        let removed: Vec<Rational> = rv.iter().zip(&kept).map(|(a, b)| a - b).collect();
        if removed.iter().all(Scalar::is_zero) {
            continue;
        }
        // removed = Σ c_i lead_i; the generator is -Σ c_i x_i.
        let coeffs = Matrix::from_rows(leads)
            .transpose()
            .solve(&removed)
            .expect("in span");
        let mut g = Coderivation::zero(&sp);
        for (b, c) in bds.iter().zip(&coeffs) {
            g = g.add(&b.preimage.scale(c));
        }
        let g = g.neg();
        cur = exp_ad(&g, &cur, cutoff)?;
        chain.push(g);
    }
    Ok(Reduction { reduced: cur, chain })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::parse_cochain;

    fn q(text: &str, sp: &GradedSpace) -> Coderivation<Rational> {
        parse_cochain(text, sp).unwrap().to_rational().unwrap()
    }

    fn sp() -> GradedSpace {
        GradedSpace::z(&[0, -1, 1])
    }

    #[test]
    fn generic_is_its_own_miniversal() {
        let d = q("ps[2,1,0;1] + ps[1,1,1;3]*(1/2)", &sp());
        let res = miniversal(&d, 4, 3, &column_namer).unwrap();
        assert!(res.relations.is_empty());
        assert!(res.corrections.is_empty());
        assert!(res.converged);
        assert_eq!(res.params.names(), vec!["s1", "s2", "t2", "t3"]);
    }

    #[test]
    fn pure_term_has_no_obstruction() {
        let d = q("ps[2,1,0;1] + ps[1,1,1;3]*(1/2)", &sp());
        for n in 3..6 {
            let (c, pre) = extend_obstruction(&d, n).unwrap();
            assert!(c.is_zero());
            assert!(pre.unwrap().is_zero());
        }
    }

    #[test]
    fn coboundary_second_term_is_pushed_up() {
        let d2 = q("ps[1,1,0;1] + ps[0,1,1;3]*(1/2)", &sp());
        let gamma = q("ph[2,0,0;1]", &sp());
        let d = exp_ad(&gamma, &d2, 6).unwrap();
        assert!(!d.part(3).is_zero());
        let red = standard_form_reduce(&d, 6).unwrap();
        assert_eq!(red.reduced.part(2), d2);
        assert!(red.reduced.part(3).is_zero());
        assert_eq!(red.replay(&d, 6).unwrap(), red.reduced);
    }

    #[test]
    fn nontrivial_second_term_is_kept() {
        let d = q("ps[1,1,1;3] + ps[3,1,0;1]*5", &sp());
        let red = standard_form_reduce(&d, 8).unwrap();
        assert_eq!(red.reduced, d);
        assert!(red.chain.is_empty());
    }
}
