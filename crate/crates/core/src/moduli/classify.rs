use std::collections::BTreeMap;

use crate::coder::{bracket, linear_action, LinearAuto};
use crate::deformation::{
    column_namer, miniversal, miniversal_at, reduce_filtered, DeformationError, DeformationResult,
    RepInfo,
};
use crate::linalg::Matrix;
use crate::scalars::{format_rational, int, Rational, Scalar};
use crate::space::{BasisCochain, Coderivation, GradedSpace, Grading};

use super::equiv::{rational_root, EquivWitness, WitnessStep};
use super::{ClassLabel, ModuliError, SpaceProfile};

fn coeff(d: &Coderivation<Rational>, e: [i64; 3], t: usize) -> Rational {
    if e.iter().any(|&x| x < 0) {
        return int(0);
    }
    d.coeff(&BasisCochain::new(e.iter().map(|&x| x as u32).collect(), t))
}

fn only(d: &Coderivation<Rational>, e: [i64; 3], t: usize) -> Option<Rational> {
    let v = coeff(d, e, t);
    (d.nterms() == 1 && !v.is_zero()).then_some(v)
}

fn diag(sp: &GradedSpace, p: Rational, q: Rational, r: Rational) -> LinearAuto<Rational> {
    LinearAuto::diagonal(sp, &[p, q, r]).expect("nonzero diagonal")
}

fn check_codifferential(d: &Coderivation<Rational>) -> Result<(), ModuliError> {
    if d.is_zero() {
        return Err(ModuliError::Zero);
    }
    if !d.is_odd_of_degree_one() {
        return Err(ModuliError::NotOdd);
    }
    if !bracket(d, d).is_zero() {
        return Err(ModuliError::NotCodifferential);
    }
    Ok(())
}

/// Class and normalizing automorphism of a single-degree codifferential.
/// On twobar1 spaces in ℤ₂ mode only the kind is determined and the witness
/// is empty and unverified.
pub fn normal_form_leading(
    profile: SpaceProfile,
    d: &Coderivation<Rational>,
) -> Result<(ClassLabel, EquivWitness), ModuliError> {
    let sp = d.space().clone();
    profile.check(&sp)?;
    if !d.is_pure() {
        return Err(ModuliError::NotPure);
    }
    check_codifferential(d)?;
    let k = d.order().expect("nonzero");
    let ki = k as i64;
    let one = int(1);
    let (label, g) = match (profile, sp.mode()) {
        (SpaceProfile::Onebar2X0, mode) => {
            let (pre, dz) = match mode {
                Grading::Z => (LinearAuto::identity(&sp), d.clone()),
                Grading::Z2 => z2_to_z_onebar2(d, k)?,
            };
            let a = coeff(&dz, [ki - 1, 1, 0], 0);
            let b = coeff(&dz, [ki, 0, 0], 2);
            let c = coeff(&dz, [ki - 2, 1, 1], 2);
            let (label, h) = if b.is_zero() {
                if !a.is_zero() {
                    let q = a.recip();
                    (ClassLabel::dk(k, one.clone(), &c * &q)?, (one.clone(), q, one.clone()))
                } else {
                    (ClassLabel::dk(k, int(0), one.clone())?, (one.clone(), c.recip(), one.clone()))
                }
            } else if a.is_zero() {
                (ClassLabel::DkStar { k }, (one.clone(), one.clone(), b))
            } else {
                (ClassLabel::DkSharp { k }, (one.clone(), a.recip(), b))
            };
            let h = LinearAuto::new(&sp, diag(&sp, h.0, h.1, h.2).matrix().clone())?;
            (label, pre.compose(&h))
        }
        (SpaceProfile::Twobar1_012, Grading::Z) => {
            let a = coeff(d, [ki - 1, 0, 1], 1);
            let b = coeff(d, [ki, 0, 0], 2);
            if b.is_zero() {
                (ClassLabel::FirstKind { k }, diag(&sp, one.clone(), a, one.clone()))
            } else {
                (ClassLabel::SecondKind { k }, diag(&sp, one.clone(), one.clone(), b))
            }
        }
        (SpaceProfile::Twobar1M2m10, Grading::Z) => {
            let l = coeff(d, [1, ki - 2, 1], 0);
            let m = coeff(d, [0, ki - 1, 1], 1);
            let n = coeff(d, [1, ki - 1, 0], 2);
            if n.is_zero() {
                let lead = if l.is_zero() { m.clone() } else { l.clone() };
                (
                    ClassLabel::dk(k, l, m)?,
                    diag(&sp, one.clone(), one.clone(), lead.recip()),
                )
            } else {
                (ClassLabel::SecondKind { k }, diag(&sp, one.clone(), one.clone(), n))
            }
        }
        (_, Grading::Z2) => {
            let (a1, a2) = block_parts(d, k);
            let label = if a2.is_zero() {
                ClassLabel::FirstKind { k }
            } else if a1.is_zero() {
                ClassLabel::SecondKind { k }
            } else {
                return Err(ModuliError::NotCodifferential);
            };
            return Ok((label, EquivWitness::unverified(k)));
        }
    };
    let mut w = EquivWitness::new(vec![WitnessStep::Linear(g)], k);
    let target = label.codifferential(profile, sp.mode())?;
    w.verified = w.apply(d)? == target;
    if !w.verified {
        return Err(ModuliError::Unrecognized(format!("normalization of {label} failed")));
    }
    Ok((label, w))
}

/// Splits the matrix of an odd map S^k(W) → W into the part sending odd
/// words to even targets and the part sending even words to odd targets.
pub(super) fn block_parts(
    d: &Coderivation<Rational>,
    k: u32,
) -> (Coderivation<Rational>, Coderivation<Rational>) {
    let sp = d.space().clone();
    let part = d.part(k);
    let a1 = part.filter(|c| !sp.is_odd(c.target));
    let a2 = part.filter(|c| sp.is_odd(c.target));
    (a1, a2)
}

/// On the ℤ₂ version of (−1,0,1), finds a lower-triangular map after which
/// the order-k codifferential has only ℤ-degree-1 terms.
fn z2_to_z_onebar2(
    d: &Coderivation<Rational>,
    k: u32,
) -> Result<(LinearAuto<Rational>, Coderivation<Rational>), ModuliError> {
    let sp = d.space().clone();
    let ki = k as i64;
    let a1 = coeff(d, [ki - 1, 1, 0], 0);
    let a2 = coeff(d, [ki - 1, 0, 1], 0);
    let b1 = coeff(d, [ki, 0, 0], 2);
    let b2 = coeff(d, [ki, 0, 0], 1);
    let c1 = coeff(d, [ki - 2, 1, 1], 2);
    let c2 = coeff(d, [ki - 2, 1, 1], 1);
    // g(e3) = s e2 + u e3 must satisfy these three conditions.
    let m = Matrix::from_rows(vec![
        vec![a1, a2],
        vec![-b1, b2],
        vec![-c1, c2],
    ]);
    let ker = m.kernel();
    let Some(v) = ker.first() else {
        return Err(ModuliError::Unrecognized(
            "no homogeneous form under lower-triangular maps".into(),
        ));
    };
    let (s, u) = (v[0].clone(), v[1].clone());
    let (r, t) = if u.is_zero() { (int(0), int(1)) } else { (int(1), int(0)) };
    let g = LinearAuto::new(
        &sp,
        Matrix::from_rows(vec![
            vec![int(1), int(0), int(0)],
            vec![int(0), r, s],
            vec![int(0), t, u],
        ]),
    )?;
    let dz = linear_action(&g, d);
    let zsp = SpaceProfile::Onebar2X0.space(Grading::Z);
    if !dz.with_space(&zsp).is_odd_of_degree_one() {
        return Err(ModuliError::Unrecognized("lower-triangular reduction failed".into()));
    }
    Ok((g, dz))
}

/// Classifies a (possibly non-pure) ℤ-graded codifferential by its leading
/// term and the reduced higher terms through `cutoff`. The witness maps `d`
/// to the reduced form; it is marked verified when that form equals the
/// catalog representative.
pub fn classify_point(
    profile: SpaceProfile,
    d: &Coderivation<Rational>,
    cutoff: u32,
) -> Result<(ClassLabel, EquivWitness, Coderivation<Rational>), ModuliError> {
    let sp = d.space().clone();
    profile.check(&sp)?;
    if sp.mode() != Grading::Z {
        return Err(ModuliError::WrongSpace(profile.tag()));
    }
    let k = d.order().ok_or(ModuliError::Zero)?;
    let cutoff = cutoff.max(d.max_exterior_degree().unwrap_or(k));
    let (lead_label, lead_w) = normal_form_leading(profile, &d.leading())?;
    let mut steps = lead_w.steps;
    let moved = {
        let WitnessStep::Linear(g) = &steps[0] else { unreachable!() };
        linear_action(g, &d.truncate(cutoff))
    };
    let sq = bracket(&moved, &moved).truncate(cutoff + k - 1);
    if !sq.is_zero() {
        return Err(ModuliError::NotCodifferential);
    }
    let red = reduce_filtered(&moved, cutoff)?;
    steps.extend(red.chain.iter().cloned().map(WitnessStep::Exp));
    let nf = red.reduced;
    let higher: Vec<u32> = nf.exterior_degrees().into_iter().filter(|&n| n > k).collect();
    let unrec = |what: String| Err(ModuliError::Unrecognized(what));
    let ki = k as i64;
    let label = match (&lead_label, profile) {
        (_, _) if higher.is_empty() => lead_label.clone(),
        (ClassLabel::Dk { lambda, mu, .. }, SpaceProfile::Onebar2X0) => {
            let m = higher[0];
            let mi = m as i64;
            let pm = nf.part(m);
            if lambda.is_zero() {
                let (b, c) = extension_terms(&nf, &higher, k, cutoff, |n| ([n - 1, 1, 0], 0))?;
                // a = 1 after the leading normalization
                let alpha = &c / (&b * &b);
                // Torus p^(m-k) = 1/b keeps a = 1 and sets b = 1 when rational.
                if let Some(p) = rational_root(&b.recip(), m - k) {
                    let q = p.pow(-(ki - 2) as i32);
                    steps.push(WitnessStep::Linear(diag(&sp, p, q, int(1))));
                }
                ClassLabel::DklAlpha { k, l: m, alpha }
            } else {
                let Some(b) = only(&pm, [mi, 0, 0], 2) else {
                    return unrec(format!("unexpected term of order {m} over {lead_label}"));
                };
                if mu != &int(mi) || higher.len() > 1 {
                    return unrec(format!("unexpected terms over {lead_label}"));
                }
                steps.push(WitnessStep::Linear(diag(&sp, int(1), int(1), b)));
                ClassLabel::sharp(k, m)
            }
        }
        (ClassLabel::Dk { mu, .. }, SpaceProfile::Twobar1M2m10) if mu.is_zero() => {
            let m = higher[0];
            let (b, c) = extension_terms(&nf, &higher, k, cutoff, |n| ([0, n - 1, 1], 1))?;
            let alpha = &c / (&b * &b);
            // q^(m-k) = 1/b keeps the leading coefficient when r = q^(2-k).
            if let Some(q) = rational_root(&b.recip(), m - k) {
                let r = q.pow(-(ki - 2) as i32);
                steps.push(WitnessStep::Linear(diag(&sp, int(1), q, r)));
            }
            if alpha.is_zero() {
                ClassLabel::Dkl { k, l: m }
            } else {
                ClassLabel::DklAlpha { k, l: m, alpha }
            }
        }
        _ => {
            return unrec(format!(
                "nonvanishing reduced terms of orders {higher:?} over {lead_label}"
            ))
        }
    };
    let mut w = EquivWitness::new(steps, cutoff);
    let image = w.apply(d)?;
    let target = label.codifferential(profile, Grading::Z)?;
    w.verified = image == target;
    Ok((label, w, nf))
}

/// Reads an extension of d_k by b·term(m) at the first higher order m and
/// c·term(2m−k); every other reduced term must vanish.
fn extension_terms(
    nf: &Coderivation<Rational>,
    higher: &[u32],
    k: u32,
    cutoff: u32,
    term: impl Fn(i64) -> ([i64; 3], usize),
) -> Result<(Rational, Rational), ModuliError> {
    let m = higher[0];
    let at = |n: u32| {
        let (e, t) = term(n as i64);
        only(&nf.part(n), e, t)
    };
    let Some(b) = at(m) else {
        return Err(ModuliError::Unrecognized(format!("unexpected term of order {m} over d_{k}")));
    };
    let n2 = 2 * m - k;
    if n2 > cutoff {
        return Err(ModuliError::Unrecognized(format!(
            "cutoff {cutoff} below order {n2} needed for the invariant"
        )));
    }
    let mut c = int(0);
    for &n in &higher[1..] {
        match at(n) {
            Some(v) if n == n2 => c = v,
            _ => {
                return Err(ModuliError::Unrecognized(format!(
                    "unexpected term of order {n} over d_{{{k},{m}}}"
                )))
            }
        }
    }
    Ok((b, c))
}

/// Parameter namer matching the catalog conventions of each family.
pub fn label_namer(profile: SpaceProfile, label: &ClassLabel) -> Box<dyn Fn(&RepInfo) -> String> {
    match (profile, label) {
        (SpaceProfile::Onebar2X0, ClassLabel::Dk { lambda, .. }) if !lambda.is_zero() => {
            Box::new(|i: &RepInfo| {
                if i.column == 1 {
                    "r".to_string()
                } else {
                    column_namer(i)
                }
            })
        }
        (SpaceProfile::Onebar2X0, ClassLabel::DkSharp { .. } | ClassLabel::DklSharp { .. }) => {
            Box::new(|i: &RepInfo| {
                if i.n == 1 {
                    "r".to_string()
                } else {
                    column_namer(i)
                }
            })
        }
        (SpaceProfile::Onebar2X0, _) => Box::new(column_namer),
        _ => Box::new(|i: &RepInfo| {
            if i.index == 0 {
                format!("t{}", i.n)
            } else {
                format!("t{}_{}", i.n, i.index)
            }
        }),
    }
}

#[derive(Debug, Clone)]
pub struct IdentifyOptions {
    /// Largest number of inputs kept in the miniversal deformation; defaults
    /// to one more than the base's largest.
    pub cutoff: Option<u32>,
    pub max_order: u32,
}

impl Default for IdentifyOptions {
    fn default() -> Self {
        IdentifyOptions { cutoff: None, max_order: 4 }
    }
}

/// Class of the codifferential obtained by substituting `bindings` (unbound
/// parameters are 0) into the miniversal deformation of `base`.
pub fn identify_deformation_point(
    profile: SpaceProfile,
    base: &ClassLabel,
    bindings: &BTreeMap<String, Rational>,
    opts: &IdentifyOptions,
) -> Result<(ClassLabel, EquivWitness), ModuliError> {
    let d = base.codifferential(profile, Grading::Z)?;
    let top = d.max_exterior_degree().expect("nonzero");
    let cutoff = opts.cutoff.unwrap_or_else(|| (top + 1).max(binding_degree(bindings)));
    let namer = label_namer(profile, base);
    let point = match miniversal_at(&d, bindings, cutoff, namer.as_ref()) {
        Ok((_, p)) => p,
        Err(DeformationError::SingularPoint) => {
            let mv = miniversal(&d, opts.max_order, cutoff, namer.as_ref())?;
            deformation_point(&mv, bindings)?
        }
        Err(DeformationError::UnknownParam(n)) => return Err(ModuliError::UnknownParam(n)),
        Err(DeformationError::RelationViolated { class, value, .. }) => {
            return Err(ModuliError::RelationViolated {
                relation: format!("coefficient of {class}"),
                value,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let exact = bracket(&point, &point).is_zero();
    let id_cutoff = if exact {
        2 * point.max_exterior_degree().unwrap_or(top) + 2
    } else {
        cutoff
    };
    let (label, w, _) = classify_point(profile, &point, id_cutoff)?;
    Ok((label, w))
}

/// Largest exterior degree named by a parameter (`s10` → 10, `t2_1` → 2).
fn binding_degree(bindings: &BTreeMap<String, Rational>) -> u32 {
    bindings
        .keys()
        .filter_map(|n| {
            let digits: String = n
                .chars()
                .skip_while(|c| !c.is_ascii_digit())
                .take_while(|c| c.is_ascii_digit())
                .collect();
            digits.parse().ok()
        })
        .max()
        .unwrap_or(0)
}

/// Substitutes a point into d^∞ after checking the relations and residuals.
pub fn deformation_point(
    mv: &DeformationResult,
    bindings: &BTreeMap<String, Rational>,
) -> Result<Coderivation<Rational>, ModuliError> {
    let names = mv.params.names();
    if let Some(bad) = bindings.keys().find(|n| !names.contains(n)) {
        return Err(ModuliError::UnknownParam(bad.clone()));
    }
    let mut full: BTreeMap<String, Rational> = names.iter().map(|n| (n.clone(), int(0))).collect();
    full.extend(bindings.clone());
    let eval = |f: &crate::scalars::RatFun| {
        f.substitute(&full).map_err(|e| ModuliError::Deformation(e.into()))
    };
    for r in &mv.relations {
        let v = eval(&r.value)?;
        if !v.is_zero() {
            return Err(ModuliError::RelationViolated {
                relation: r.mixed.to_string(),
                value: format_rational(&v),
            });
        }
    }
    for r in &mv.residuals {
        let v = eval(r)?;
        if !v.is_zero() {
            return Err(ModuliError::RelationViolated {
                relation: r.to_string(),
                value: format_rational(&v),
            });
        }
    }
    Ok(mv.d_infinity.try_map(|c| eval(c))?)
}
