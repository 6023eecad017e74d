//! Classification of codifferentials on the three studied 3-dimensional
//! spaces, equivalence witnesses, and the moduli report.

mod classify;
mod equiv;
mod report;

pub use classify::{
    classify_point, identify_deformation_point, label_namer, normal_form_leading, IdentifyOptions,
};
pub use equiv::{
    equivalence_witness, torus_solve, Certificate, EquivOutcome, EquivWitness, TorusSolution,
    WitnessStep,
};
pub use report::{
    block_matrices, block_dichotomy_sample, moduli_report, Adjacency, BlockSample, CatalogEntry,
    MapVerdict, ModuliReport,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coder::CoderError;
use crate::cohomology::CohomologyError;
use crate::deformation::DeformationError;
use crate::scalars::{format_rational, int, parse_rational_expr, Rational, Scalar};
use crate::space::{BasisCochain, Coderivation, GradedSpace, Grading};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModuliError {
    #[error("[d,d] does not vanish; not a codifferential")]
    NotCodifferential,
    #[error("expected a single-degree codifferential")]
    NotPure,
    #[error("the zero coderivation has no class")]
    Zero,
    #[error("codifferential is not of degree 1 / odd")]
    NotOdd,
    #[error("space does not match profile {0}")]
    WrongSpace(&'static str),
    #[error("label {0} is not defined on profile {1}")]
    LabelProfile(String, &'static str),
    #[error("cannot parse class label `{0}`")]
    LabelSyntax(String),
    #[error("invalid indices for {0}")]
    Indices(String),
    #[error("unknown parameter `{0}`")]
    UnknownParam(String),
    #[error("relation {relation} = {value} does not vanish at the given point")]
    RelationViolated { relation: String, value: String },
    #[error("unrecognized normal form: {0}")]
    Unrecognized(String),
    #[error(transparent)]
    Deformation(#[from] DeformationError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Coder(#[from] CoderError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceProfile {
    /// Degrees (−1, 0, 1), listed as |e1| = 0, |e2| = −1, |e3| = 1.
    #[serde(rename = "onebar2_x0")]
    Onebar2X0,
    /// Degrees (0, 1, 2), listed as |e1| = 0, |e2| = 2, |e3| = 1.
    #[serde(rename = "twobar1_012")]
    Twobar1_012,
    /// Degrees (−2, −1, 0), listed as |e1| = −2, |e2| = 0, |e3| = −1.
    #[serde(rename = "twobar1_m2m10")]
    Twobar1M2m10,
}

impl SpaceProfile {
    pub const ALL: [SpaceProfile; 3] = [
        SpaceProfile::Onebar2X0,
        SpaceProfile::Twobar1_012,
        SpaceProfile::Twobar1M2m10,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            SpaceProfile::Onebar2X0 => "onebar2_x0",
            SpaceProfile::Twobar1_012 => "twobar1_012",
            SpaceProfile::Twobar1M2m10 => "twobar1_m2m10",
        }
    }

    pub fn degrees(self) -> [i64; 3] {
        match self {
            SpaceProfile::Onebar2X0 => [0, -1, 1],
            SpaceProfile::Twobar1_012 => [0, 2, 1],
            SpaceProfile::Twobar1M2m10 => [-2, 0, -1],
        }
    }

    pub fn space(self, mode: Grading) -> GradedSpace {
        match mode {
            Grading::Z => GradedSpace::z(&self.degrees()),
            Grading::Z2 => GradedSpace::z2(&self.degrees()),
        }
    }

    /// Checks that `sp` is this profile's space in either grading.
    pub fn check(self, sp: &GradedSpace) -> Result<(), ModuliError> {
        if sp == &self.space(sp.mode()) {
            Ok(())
        } else {
            Err(ModuliError::WrongSpace(self.tag()))
        }
    }

    pub fn from_space(sp: &GradedSpace) -> Option<SpaceProfile> {
        Self::ALL.into_iter().find(|p| p.check(sp).is_ok())
    }
}

impl FromStr for SpaceProfile {
    type Err = ModuliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|p| p.tag() == s)
            .ok_or_else(|| ModuliError::LabelSyntax(s.to_string()))
    }
}

impl fmt::Display for SpaceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Class of a codifferential in one of the catalogs.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ClassLabel {
    /// d_k(λ:μ), stored with the first nonzero coordinate equal to 1.
    Dk { k: u32, lambda: Rational, mu: Rational },
    DkStar { k: u32 },
    /// d_k^♯, the same as d^♯_{k,k}.
    DkSharp { k: u32 },
    /// d_{k,l}; on (−1,0,1) the same as d_{k,l}(0).
    Dkl { k: u32, l: u32 },
    /// d_{k,l}(α): adds α times the cocycle of order 2l−k to d_{k,l}. On
    /// (−2,−1,0) classification reports α = 0 as d_{k,l}.
    DklAlpha { k: u32, l: u32, alpha: Rational },
    /// d^♯_{k,l} with k < l.
    DklSharp { k: u32, l: u32 },
    FirstKind { k: u32 },
    SecondKind { k: u32 },
}

impl ClassLabel {
    /// d_k(λ:μ) with projective normalization.
    pub fn dk(k: u32, lambda: Rational, mu: Rational) -> Result<ClassLabel, ModuliError> {
        if lambda.is_zero() && mu.is_zero() {
            return Err(ModuliError::Indices("d_k(0:0)".into()));
        }
        let (lambda, mu) = if !lambda.is_zero() {
            (int(1), mu / lambda)
        } else {
            (int(0), int(1))
        };
        Ok(ClassLabel::Dk { k, lambda, mu })
    }

    pub fn sharp(k: u32, l: u32) -> ClassLabel {
        if k == l {
            ClassLabel::DkSharp { k }
        } else {
            ClassLabel::DklSharp { k, l }
        }
    }

    pub fn order(&self) -> u32 {
        match self {
            ClassLabel::Dk { k, .. }
            | ClassLabel::DkStar { k }
            | ClassLabel::DkSharp { k }
            | ClassLabel::Dkl { k, .. }
            | ClassLabel::DklAlpha { k, .. }
            | ClassLabel::DklSharp { k, .. }
            | ClassLabel::FirstKind { k }
            | ClassLabel::SecondKind { k } => *k,
        }
    }

    /// Family name without parameters.
    pub fn family(&self) -> &'static str {
        match self {
            ClassLabel::Dk { .. } => "d_k(lambda:mu)",
            ClassLabel::DkStar { .. } => "d_k*",
            ClassLabel::DkSharp { .. } => "d_k^#",
            ClassLabel::Dkl { .. } => "d_{k,l}",
            ClassLabel::DklAlpha { .. } => "d_{k,l}(alpha)",
            ClassLabel::DklSharp { .. } => "d^#_{k,l}",
            ClassLabel::FirstKind { .. } => "first_kind",
            ClassLabel::SecondKind { .. } => "second_kind",
        }
    }

    /// The catalog codifferential for this label on `profile`, in grading
    /// `mode`.
    pub fn codifferential(
        &self,
        profile: SpaceProfile,
        mode: Grading,
    ) -> Result<Coderivation<Rational>, ModuliError> {
        let sp = profile.space(mode);
        let bad = || ModuliError::LabelProfile(self.to_string(), profile.tag());
        let idx = |s: &str| ModuliError::Indices(s.to_string());
        let mut d = Coderivation::zero(&sp);
        let mut put = |e: [i64; 3], t: usize, v: Rational| -> Result<(), ModuliError> {
            if e.iter().any(|&x| x < 0) {
                return Ok(());
            }
            d.add_term(
                BasisCochain::new(e.iter().map(|&x| x as u32).collect(), t),
                v,
            );
            Ok(())
        };
        use ClassLabel::*;
        use SpaceProfile::*;
        match (profile, self) {
            (Onebar2X0, Dk { k, lambda, mu }) => {
                let k = *k as i64;
                if k < 1 {
                    return Err(idx("k >= 1"));
                }
                put([k - 1, 1, 0], 0, lambda.clone())?;
                put([k - 2, 1, 1], 2, mu.clone())?;
            }
            (Onebar2X0, DkStar { k }) => {
                put([*k as i64, 0, 0], 2, int(1))?;
            }
            (Onebar2X0, DkSharp { k }) => {
                let k = *k as i64;
                put([k - 1, 1, 0], 0, int(1))?;
                put([k, 0, 0], 2, int(1))?;
                put([k - 2, 1, 1], 2, int(k))?;
            }
            (Onebar2X0, DklAlpha { k, l, alpha }) => {
                if k >= l || *k < 2 {
                    return Err(idx("2 <= k < l"));
                }
                let (k, l) = (*k as i64, *l as i64);
                put([k - 2, 1, 1], 2, int(1))?;
                put([l - 1, 1, 0], 0, int(1))?;
                put([2 * l - k - 1, 1, 0], 0, alpha.clone())?;
            }
            (Onebar2X0, DklSharp { k, l }) => {
                if k > l {
                    return Err(idx("k <= l"));
                }
                let (k, l) = (*k as i64, *l as i64);
                put([k - 1, 1, 0], 0, int(1))?;
                put([k - 2, 1, 1], 2, int(l))?;
                put([l, 0, 0], 2, int(1))?;
            }
            (Twobar1_012, FirstKind { k }) => {
                put([*k as i64 - 1, 0, 1], 1, int(1))?;
            }
            (Twobar1_012, SecondKind { k }) => {
                put([*k as i64, 0, 0], 2, int(1))?;
            }
            (Twobar1M2m10, Dk { k, lambda, mu }) => {
                let k = *k as i64;
                put([1, k - 2, 1], 0, lambda.clone())?;
                put([0, k - 1, 1], 1, mu.clone())?;
            }
            (Twobar1M2m10, Dkl { k, l }) => {
                return ClassLabel::DklAlpha { k: *k, l: *l, alpha: int(0) }
                    .codifferential(profile, mode);
            }
            (Twobar1M2m10, DklAlpha { k, l, alpha }) => {
                if k >= l || *k < 2 {
                    return Err(idx("2 <= k < l"));
                }
                let (k, l) = (*k as i64, *l as i64);
                put([1, k - 2, 1], 0, int(1))?;
                put([0, l - 1, 1], 1, int(1))?;
                put([0, 2 * l - k - 1, 1], 1, alpha.clone())?;
            }
            (Onebar2X0, Dkl { k, l }) => {
                return ClassLabel::DklAlpha { k: *k, l: *l, alpha: int(0) }
                    .codifferential(profile, mode);
            }
            (Twobar1M2m10, SecondKind { k }) => {
                put([1, *k as i64 - 1, 0], 2, int(1))?;
            }
            (Twobar1M2m10, FirstKind { k }) => {
                return ClassLabel::dk(*k, int(0), int(1))?.codifferential(profile, mode);
            }
            _ => return Err(bad()),
        }
        if d.is_zero() {
            return Err(bad());
        }
        Ok(d)
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::Dk { k, lambda, mu } => write!(
                f,
                "d_{k}({}:{})",
                format_rational(lambda),
                format_rational(mu)
            ),
            ClassLabel::DkStar { k } => write!(f, "d_{k}*"),
            ClassLabel::DkSharp { k } => write!(f, "d_{k}^#"),
            ClassLabel::Dkl { k, l } => write!(f, "d_{{{k},{l}}}"),
            ClassLabel::DklAlpha { k, l, alpha } => {
                write!(f, "d_{{{k},{l}}}({})", format_rational(alpha))
            }
            ClassLabel::DklSharp { k, l } => write!(f, "d^#_{{{k},{l}}}"),
            ClassLabel::FirstKind { k } => write!(f, "first_kind({k})"),
            ClassLabel::SecondKind { k } => write!(f, "second_kind({k})"),
        }
    }
}

fn parse_u32(s: &str, whole: &str) -> Result<u32, ModuliError> {
    s.trim()
        .parse()
        .map_err(|_| ModuliError::LabelSyntax(whole.to_string()))
}

fn parse_q(s: &str, whole: &str) -> Result<Rational, ModuliError> {
    parse_rational_expr(s.trim()).map_err(|_| ModuliError::LabelSyntax(whole.to_string()))
}

fn pair(s: &str, whole: &str) -> Result<(u32, u32), ModuliError> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| ModuliError::LabelSyntax(whole.to_string()))?;
    Ok((parse_u32(a, whole)?, parse_u32(b, whole)?))
}

impl FromStr for ClassLabel {
    type Err = ModuliError;

    /// Accepts the printed forms: `d_3(1:1/2)`, `d_3*`, `d_3^#`, `d_{2,3}`,
    /// `d_{3,5}(-1/8)`, `d^#_{3,4}`, `first_kind(2)`, `second_kind(2)`.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || ModuliError::LabelSyntax(text.to_string());
        let inner = |s: &str, open: &str| -> Option<String> {
            s.strip_prefix(open)?.strip_suffix(')').map(str::to_string)
        };
        if let Some(v) = inner(&s, "first_kind(") {
            return Ok(ClassLabel::FirstKind { k: parse_u32(&v, text)? });
        }
        if let Some(v) = inner(&s, "second_kind(") {
            return Ok(ClassLabel::SecondKind { k: parse_u32(&v, text)? });
        }
        if let Some(rest) = s.strip_prefix("d^#_{") {
            let body = rest.strip_suffix('}').ok_or_else(err)?;
            let (k, l) = pair(body, text)?;
            return Ok(ClassLabel::sharp(k, l));
        }
        let rest = s.strip_prefix("d_").ok_or_else(err)?;
        if let Some(rest) = rest.strip_prefix('{') {
            let (body, tail) = rest.split_once('}').ok_or_else(err)?;
            let (k, l) = pair(body, text)?;
            if tail.is_empty() {
                return Ok(ClassLabel::Dkl { k, l });
            }
            let a = tail
                .strip_prefix('(')
                .and_then(|t| t.strip_suffix(')'))
                .ok_or_else(err)?;
            return Ok(ClassLabel::DklAlpha {
                k,
                l,
                alpha: parse_q(a, text)?,
            });
        }
        if let Some(k) = rest.strip_suffix('*') {
            return Ok(ClassLabel::DkStar { k: parse_u32(k, text)? });
        }
        if let Some(k) = rest.strip_suffix("^#") {
            return Ok(ClassLabel::DkSharp { k: parse_u32(k, text)? });
        }
        let (k, args) = rest.split_once('(').ok_or_else(err)?;
        let args = args.strip_suffix(')').ok_or_else(err)?;
        let (a, b) = args.split_once(':').ok_or_else(err)?;
        ClassLabel::dk(parse_u32(k, text)?, parse_q(a, text)?, parse_q(b, text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coder::bracket;
    use crate::scalars::rat;

    #[test]
    fn labels_round_trip() {
        for s in [
            "d_3(1:1/2)",
            "d_4(0:1)",
            "d_3*",
            "d_2^#",
            "d_{2,3}",
            "d_{3,5}(-1/8)",
            "d^#_{3,4}",
            "first_kind(2)",
            "second_kind(3)",
        ] {
            let l: ClassLabel = s.parse().unwrap();
            assert_eq!(l.to_string(), s);
        }
        assert_eq!("d^#_{3,3}".parse::<ClassLabel>().unwrap(), ClassLabel::DkSharp { k: 3 });
        assert_eq!(
            "d_2(3:5)".parse::<ClassLabel>().unwrap(),
            ClassLabel::Dk { k: 2, lambda: int(1), mu: rat(5, 3) }
        );
        assert!("d_(1:2)".parse::<ClassLabel>().is_err());
    }

    #[test]
    fn catalog_entries_are_codifferentials() {
        let cases: Vec<(SpaceProfile, &str)> = vec![
            (SpaceProfile::Onebar2X0, "d_3(1:1/2)"),
            (SpaceProfile::Onebar2X0, "d_1(1:0)"),
            (SpaceProfile::Onebar2X0, "d_3*"),
            (SpaceProfile::Onebar2X0, "d_3^#"),
            (SpaceProfile::Onebar2X0, "d_{2,4}(3)"),
            (SpaceProfile::Onebar2X0, "d^#_{3,4}"),
            (SpaceProfile::Twobar1_012, "first_kind(3)"),
            (SpaceProfile::Twobar1_012, "second_kind(3)"),
            (SpaceProfile::Twobar1M2m10, "d_3(1:2)"),
            (SpaceProfile::Twobar1M2m10, "d_{2,4}"),
            (SpaceProfile::Twobar1M2m10, "second_kind(2)"),
        ];
        for (p, s) in cases {
            let d = s.parse::<ClassLabel>().unwrap().codifferential(p, Grading::Z).unwrap();
            assert!(bracket(&d, &d).is_zero(), "{s}");
        }
        assert!(ClassLabel::DkStar { k: 2 }
            .codifferential(SpaceProfile::Twobar1_012, Grading::Z)
            .is_err());
    }
}
