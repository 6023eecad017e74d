use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::coder::{exp_ad, linear_action, CoderError, LinearAuto};
use crate::linalg::smith_normal_form;
use crate::scalars::{format_rational, int, Rational};
use crate::space::{print_cochain, Coderivation, GradedSpace, Grading};

use super::classify::{classify_point, normal_form_leading};
use super::SpaceProfile;

/// One automorphism in a witness chain.
#[derive(Debug, Clone)]
pub enum WitnessStep {
    /// d ↦ g*(d).
    Linear(LinearAuto<Rational>),
    /// d ↦ exp_ad(γ, d).
    Exp(Coderivation<Rational>),
}

impl WitnessStep {
    pub fn describe(&self) -> String {
        match self {
            WitnessStep::Linear(g) => {
                let rows: Vec<String> = g
                    .matrix()
                    .to_rows()
                    .iter()
                    .map(|r| r.iter().map(format_rational).collect::<Vec<_>>().join(","))
                    .collect();
                format!("linear [{}]", rows.join("; "))
            }
            WitnessStep::Exp(g) => format!("exp_ad {}", print_cochain(g)),
        }
    }
}

/// A chain of automorphisms taking a source codifferential to a target,
/// with terms above `cutoff` inputs discarded.
#[derive(Debug, Clone)]
pub struct EquivWitness {
    pub steps: Vec<WitnessStep>,
    pub cutoff: u32,
    pub verified: bool,
}

impl EquivWitness {
    pub fn new(steps: Vec<WitnessStep>, cutoff: u32) -> Self {
        EquivWitness { steps, cutoff, verified: false }
    }

    pub fn identity(cutoff: u32) -> Self {
        EquivWitness { steps: vec![], cutoff, verified: true }
    }

    pub(super) fn unverified(cutoff: u32) -> Self {
        EquivWitness { steps: vec![], cutoff, verified: false }
    }

    pub fn apply(&self, d: &Coderivation<Rational>) -> Result<Coderivation<Rational>, CoderError> {
        let mut cur = d.truncate(self.cutoff);
        for s in &self.steps {
            cur = match s {
                WitnessStep::Linear(g) => linear_action(g, &cur),
                WitnessStep::Exp(x) => exp_ad(x, &cur, self.cutoff)?,
            };
        }
        Ok(cur)
    }

    /// The chain undoing this one.
    pub fn inverse(&self) -> EquivWitness {
        let steps = self
            .steps
            .iter()
            .rev()
            .map(|s| match s {
                WitnessStep::Linear(g) => WitnessStep::Linear(g.inverse()),
                WitnessStep::Exp(x) => WitnessStep::Exp(x.neg()),
            })
            .collect();
        EquivWitness { steps, cutoff: self.cutoff, verified: self.verified }
    }

    /// This chain followed by `other`.
    pub fn then(&self, other: &EquivWitness) -> EquivWitness {
        let mut steps = self.steps.clone();
        steps.extend(other.steps.iter().cloned());
        EquivWitness {
            steps,
            cutoff: self.cutoff.min(other.cutoff),
            verified: false,
        }
    }

    /// Marks the witness verified iff it maps `src` to `dst` up to cutoff.
    pub fn verify(&mut self, src: &Coderivation<Rational>, dst: &Coderivation<Rational>) -> bool {
        self.verified = self
            .apply(src)
            .map(|x| x == dst.truncate(self.cutoff))
            .unwrap_or(false);
        self.verified
    }

    pub fn describe(&self) -> Vec<String> {
        self.steps.iter().map(WitnessStep::describe).collect()
    }
}

/// Exact n-th root of a rational, if one exists.
pub fn rational_root(x: &Rational, n: u32) -> Option<Rational> {
    if n == 0 {
        return x.is_one().then(|| int(1));
    }
    if x.is_zero() {
        return Some(int(0));
    }
    if x.is_negative() && n % 2 == 0 {
        return None;
    }
    let root = |v: &BigInt| -> Option<BigInt> {
        let r = v.abs().nth_root(n);
        (num_traits::pow(r.clone(), n as usize) == v.abs()).then_some(r)
    };
    let num = root(x.numer())?;
    let den = root(x.denom())?;
    let r = Rational::new(num, den);
    Some(if x.is_negative() { -r } else { r })
}

fn rpow(x: &Rational, e: &BigInt) -> Rational {
    let e = e.to_i32().expect("small exponent");
    x.pow(e)
}

/// Outcome of solving g*(d1) = d2 for a diagonal g.
#[derive(Debug, Clone, PartialEq)]
pub enum TorusSolution {
    /// Diagonal entries.
    Solved(Vec<Rational>),
    /// The supports differ; diagonal maps preserve supports.
    SupportMismatch,
    /// An integer relation Σ n_i χ_i = 0 among the term characters whose
    /// coefficient ratios give Π ρ_i^{n_i} = value ≠ 1.
    Obstructed { relation: Vec<i64>, value: Rational },
    /// Solvable over ℂ but the needed root is irrational.
    IrrationalRoot { value: Rational, degree: u64 },
}

/// Solves for p with Π_j p_j^{w_ij} = ρ_i, where w_i is the torus character
/// of the i-th term (exponents minus target) and ρ_i the ratio of the
/// coefficients in `d2` and `d1`.
pub fn torus_solve(d1: &Coderivation<Rational>, d2: &Coderivation<Rational>) -> TorusSolution {
    let n = d1.space().dim();
    let t1: Vec<_> = d1.terms().collect();
    let t2: Vec<_> = d2.terms().collect();
    if t1.len() != t2.len() || t1.iter().zip(&t2).any(|(a, b)| a.0 != b.0) {
        return TorusSolution::SupportMismatch;
    }
    if t1.is_empty() {
        return TorusSolution::Solved(vec![int(1); n]);
    }
    let chars: Vec<Vec<BigInt>> = t1
        .iter()
        .map(|(c, _)| {
            (0..n)
                .map(|j| BigInt::from(c.exponents[j] as i64 - (c.target == j) as i64))
                .collect()
        })
        .collect();
    let rho: Vec<Rational> = t1.iter().zip(&t2).map(|(a, b)| b.1 / a.1).collect();
    let (u, dd, v) = smith_normal_form(&chars);
    let m = chars.len();
    let mut y = vec![int(1); n];
    for i in 0..m {
        let sigma = (0..m).fold(int(1), |acc, j| acc * rpow(&rho[j], &u[i][j]));
        let di = if i < n { dd[i][i].clone() } else { BigInt::zero() };
        if di.is_zero() {
            if !sigma.is_one() {
                return TorusSolution::Obstructed {
                    relation: u[i].iter().map(|x| x.to_i64().expect("small")).collect(),
                    value: sigma,
                };
            }
            continue;
        }
        let deg = di.to_u32().expect("small");
        match rational_root(&sigma, deg) {
            Some(r) => y[i] = r,
            None => {
                return TorusSolution::IrrationalRoot {
                    value: sigma,
                    degree: deg as u64,
                }
            }
        }
    }
    let p: Vec<Rational> = (0..n)
        .map(|j| (0..n).fold(int(1), |acc, l| acc * rpow(&y[l], &v[j][l])))
        .collect();
    TorusSolution::Solved(p)
}

/// Proof that no automorphism exists.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub reason: String,
}

#[derive(Debug, Clone)]
pub enum EquivOutcome {
    Witness(EquivWitness),
    /// Inequivalent, with an argument covering the whole automorphism group.
    Inequivalent(Certificate),
    /// Nothing found in the searched family; not a proof.
    NoneFound { note: String },
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn grading_permutations(sp: &GradedSpace) -> Vec<Vec<usize>> {
    permutations(sp.dim())
        .into_iter()
        .filter(|p| {
            p.iter().enumerate().all(|(j, &i)| match sp.mode() {
                Grading::Z => sp.degree(i) == sp.degree(j),
                Grading::Z2 => sp.parity(i) == sp.parity(j),
            })
        })
        .collect()
}

fn distinct_degrees(sp: &GradedSpace) -> bool {
    let mut d = sp.degrees().to_vec();
    d.sort();
    d.dedup();
    d.len() == sp.dim()
}

/// Searches for an automorphism taking `d1` to `d2` in the given grading:
/// grading-preserving permutations composed with diagonal maps, then for
/// the catalog spaces the normal-form chains of both sides. The inputs
/// carry integer degrees unless `mode` is ℤ₂.
pub fn equivalence_witness(
    d1: &Coderivation<Rational>,
    d2: &Coderivation<Rational>,
    mode: Grading,
    cutoff: u32,
) -> EquivOutcome {
    if mode == Grading::Z && d1.space().mode() == Grading::Z2 {
        return EquivOutcome::NoneFound {
            note: "Z-graded comparison needs a space with integer degrees".into(),
        };
    }
    let sp = d1.space().with_mode(mode);
    let d1 = d1.with_space(&sp).truncate(cutoff);
    let d2 = d2.with_space(&sp).truncate(cutoff);
    if d1 == d2 {
        return EquivOutcome::Witness(EquivWitness::identity(cutoff));
    }
    if d1.order() != d2.order() {
        return EquivOutcome::Inequivalent(Certificate {
            reason: "leading orders differ; automorphisms preserve the order".into(),
        });
    }
    for perm in grading_permutations(&sp) {
        let p = LinearAuto::permutation(&sp, &perm).expect("grading permutation");
        let moved = linear_action(&p, &d1);
        if let TorusSolution::Solved(diag) = torus_solve(&moved, &d2) {
            let mut steps = Vec::new();
            if perm.iter().enumerate().any(|(j, &i)| i != j) {
                steps.push(WitnessStep::Linear(p));
            }
            if diag.iter().any(|x| !x.is_one()) {
                let g = LinearAuto::diagonal(&sp, &diag).expect("nonzero diagonal");
                steps.push(WitnessStep::Linear(g));
            }
            let mut w = EquivWitness::new(steps, cutoff);
            if w.verify(&d1, &d2) {
                return EquivOutcome::Witness(w);
            }
        }
    }
    if let Some(profile) = SpaceProfile::from_space(&sp) {
        if let Some(w) = normal_form_route(profile, &d1, &d2, cutoff) {
            return EquivOutcome::Witness(w);
        }
    }
    // With one-dimensional graded pieces, ℤ-graded linear maps are diagonal;
    // leading terms of equivalent codifferentials are linearly equivalent.
    if mode == Grading::Z && distinct_degrees(&sp) {
        let (l1, l2) = (d1.leading(), d2.leading());
        let reason = match torus_solve(&l1, &l2) {
            TorusSolution::SupportMismatch => Some(
                "degree-0 maps are diagonal and preserve the support of the leading term".into(),
            ),
            TorusSolution::Obstructed { relation, value } => Some(format!(
                "degree-0 maps are diagonal; the leading-term invariant with exponents {relation:?} \
                 takes the value {} instead of 1, so the orbit consists of rescalings that \
                 cannot reach the target",
                format_rational(&value)
            )),
            _ => None,
        };
        if let Some(reason) = reason {
            return EquivOutcome::Inequivalent(Certificate { reason });
        }
        if d1.is_pure() && d2.is_pure() {
            if let TorusSolution::IrrationalRoot { value, degree } = torus_solve(&l1, &l2) {
                return EquivOutcome::NoneFound {
                    note: format!(
                        "equivalent over the complex numbers; the diagonal map needs a root of \
                         degree {degree} of {}",
                        format_rational(&value)
                    ),
                };
            }
        }
    }
    EquivOutcome::NoneFound {
        note: "no automorphism in the searched family".into(),
    }
}

fn normal_form_route(
    profile: SpaceProfile,
    d1: &Coderivation<Rational>,
    d2: &Coderivation<Rational>,
    cutoff: u32,
) -> Option<EquivWitness> {
    let (w1, w2) = if d1.is_pure() && d2.is_pure() {
        let (a, w1) = normal_form_leading(profile, d1).ok()?;
        let (b, w2) = normal_form_leading(profile, d2).ok()?;
        if a != b || !w1.verified || !w2.verified {
            return None;
        }
        (w1, w2)
    } else {
        if d1.space().mode() != Grading::Z {
            return None;
        }
        let (a, w1, _) = classify_point(profile, d1, cutoff).ok()?;
        let (b, w2, _) = classify_point(profile, d2, cutoff).ok()?;
        if a != b {
            return None;
        }
        (w1, w2)
    };
    let mut w = w1.then(&w2.inverse());
    w.cutoff = cutoff;
    w.verify(d1, d2).then_some(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::rat;
    use crate::space::parse_cochain;

    fn q(text: &str, sp: &GradedSpace) -> Coderivation<Rational> {
        parse_cochain(text, sp).unwrap().to_rational().unwrap()
    }

    #[test]
    fn roots() {
        assert_eq!(rational_root(&rat(8, 27), 3), Some(rat(2, 3)));
        assert_eq!(rational_root(&rat(-8, 1), 3), Some(int(-2)));
        assert_eq!(rational_root(&int(2), 2), None);
        assert_eq!(rational_root(&int(-4), 2), None);
    }

    #[test]
    fn torus_rescales() {
        let sp = GradedSpace::z(&[0, -1, 1]);
        let a = q("ps[1,1,0;1] + ps[2,0,0;3]*2 + ps[0,1,1;3]*2", &sp);
        let b = q("ps[1,1,0;1]*3 + ps[2,0,0;3]*5 + ps[0,1,1;3]*6", &sp);
        let TorusSolution::Solved(p) = torus_solve(&a, &b) else { panic!() };
        let g = LinearAuto::diagonal(&sp, &p).unwrap();
        assert_eq!(linear_action(&g, &a), b);
    }

    #[test]
    fn swap_in_z2_only() {
        let z = GradedSpace::z(&[-2, 0, -1]);
        let a = q("ps[1,0,1;1] + ps[0,1,1;2]*2", &z);
        let b = q("ps[1,0,1;1]*2 + ps[0,1,1;2]", &z);
        let EquivOutcome::Witness(w) = equivalence_witness(&a, &b, Grading::Z2, 2) else {
            panic!()
        };
        assert!(w.verified);
        assert_eq!(w.steps.len(), 1);
        assert!(matches!(
            equivalence_witness(&a, &b, Grading::Z, 2),
            EquivOutcome::Inequivalent(_)
        ));
        let c = q("ps[1,0,1;1]*3 + ps[0,1,1;2]*6", &z);
        assert!(matches!(equivalence_witness(&a, &c, Grading::Z, 2), EquivOutcome::Witness(_)));
    }
}
