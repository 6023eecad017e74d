use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coder::{bracket, linear_action, matrix_of_part, LinearAuto, SymWord};
use crate::deformation::miniversal;
use crate::linalg::Matrix;
use crate::scalars::{int, rat, Rational};
use crate::space::{enumerate_cochain_basis, parse_cochain, print_cochain, Coderivation, GradedSpace, Grading};

use super::classify::{classify_point, deformation_point, label_namer, normal_form_leading};
use super::equiv::{equivalence_witness, EquivOutcome};
use super::{ClassLabel, ModuliError, SpaceProfile};

/// The two off-diagonal blocks of the matrix of an odd map S^k(W) → W in
/// the word basis: A1 sends odd words to even targets, A2 even words to odd
/// targets.
#[derive(Debug, Clone)]
pub struct BlockSplit {
    pub a1: Matrix<Rational>,
    pub a2: Matrix<Rational>,
    pub a1_rows: Vec<usize>,
    pub a1_cols: Vec<SymWord>,
    pub a2_rows: Vec<usize>,
    pub a2_cols: Vec<SymWord>,
}

fn word_is_odd(sp: &GradedSpace, w: &SymWord) -> bool {
    w.0.iter()
        .enumerate()
        .map(|(i, &e)| e as u8 * sp.parity(i))
        .sum::<u8>()
        % 2
        == 1
}

pub fn block_matrices(d: &Coderivation<Rational>, k: u32) -> BlockSplit {
    let sp = d.space();
    let (words, a) = matrix_of_part(d, k);
    let even_t: Vec<usize> = (0..sp.dim()).filter(|&i| !sp.is_odd(i)).collect();
    let odd_t: Vec<usize> = (0..sp.dim()).filter(|&i| sp.is_odd(i)).collect();
    let odd_w: Vec<usize> = (0..words.len()).filter(|&j| word_is_odd(sp, &words[j])).collect();
    let even_w: Vec<usize> = (0..words.len()).filter(|&j| !word_is_odd(sp, &words[j])).collect();
    let sub = |rows: &[usize], cols: &[usize]| {
        Matrix::from_rows(
            rows.iter()
                .map(|&i| cols.iter().map(|&j| a.get(i, j).clone()).collect())
                .collect(),
        )
    };
    BlockSplit {
        a1: sub(&even_t, &odd_w),
        a2: sub(&odd_t, &even_w),
        a1_rows: even_t.clone(),
        a1_cols: odd_w.iter().map(|&j| words[j].clone()).collect(),
        a2_rows: odd_t.clone(),
        a2_cols: even_w.iter().map(|&j| words[j].clone()).collect(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockSample {
    pub k: u32,
    pub cochain: String,
    pub bracket_zero: bool,
    pub a1_zero: bool,
    pub a2_zero: bool,
}

impl BlockSample {
    /// [d,d] = 0 exactly when one block vanishes.
    pub fn holds(&self) -> bool {
        self.bracket_zero == (self.a1_zero || self.a2_zero)
    }
}

/// Random odd single-degree coderivations on the ℤ₂-graded (0,1,2) space
/// with k ≤ `k_max`. A third keep only the A1 block, a third only A2, and
/// the rest both, with sparse small entries so near-misses occur.
pub fn block_dichotomy_sample(count: usize, k_max: u32, seed: u64) -> Vec<BlockSample> {
    let sp = SpaceProfile::Twobar1_012.space(Grading::Z2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let k = rng.gen_range(1..=k_max);
        let basis = enumerate_cochain_basis(&sp, k, 1);
        let shape = i % 3;
        let mut d = Coderivation::zero(&sp);
        for c in basis {
            let in_a1 = !sp.is_odd(c.target);
            if (shape == 0 && !in_a1) || (shape == 1 && in_a1) {
                continue;
            }
            if rng.gen_bool(0.5) {
                d.add_term(c, int(rng.gen_range(-2..=2)));
            }
        }
        let blocks = block_matrices(&d, k);
        out.push(BlockSample {
            k,
            cochain: print_cochain(&d),
            bracket_zero: bracket(&d, &d).is_zero(),
            a1_zero: blocks.a1.is_zero(),
            a2_zero: blocks.a2.is_zero(),
        });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MapVerdict {
    #[serde(rename = "bijective")]
    Bijective,
    #[serde(rename = "injective-not-surjective")]
    InjectiveNotSurjective,
    #[serde(rename = "non-injective")]
    NonInjective,
}

impl MapVerdict {
    pub fn tag(self) -> &'static str {
        match self {
            MapVerdict::Bijective => "bijective",
            MapVerdict::InjectiveNotSurjective => "injective-not-surjective",
            MapVerdict::NonInjective => "non-injective",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub label: String,
    pub family: String,
    pub order: u32,
    pub representative: String,
}

/// A deformation observed at sampled parameter values.
#[derive(Debug, Clone, Serialize)]
pub struct Adjacency {
    pub from: String,
    pub to: String,
    pub parameter: String,
    /// "jump" when the class is the same at both sampled nonzero values of
    /// the parameter, "smooth" when it moves.
    pub kind: String,
    pub samples: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModuliReport {
    pub profile: SpaceProfile,
    pub k_max: u32,
    pub catalog: Vec<CatalogEntry>,
    pub adjacencies: Vec<Adjacency>,
    pub verdict: MapVerdict,
    /// Checks behind the verdict; each entry is (claim, passed).
    pub evidence: Vec<(String, bool)>,
}

fn catalog_labels(profile: SpaceProfile, k_max: u32) -> Vec<ClassLabel> {
    let mut out = Vec::new();
    let half = rat(1, 2);
    for k in 1..=k_max {
        match profile {
            SpaceProfile::Onebar2X0 => {
                let mu = if k == 1 { int(0) } else { half.clone() };
                out.push(ClassLabel::Dk { k, lambda: int(1), mu });
                out.push(ClassLabel::DkStar { k });
                if k >= 2 {
                    out.push(ClassLabel::DkSharp { k });
                }
                for l in k + 1..=k_max {
                    if k >= 2 {
                        out.push(ClassLabel::DklAlpha { k, l, alpha: int(1) });
                    }
                    out.push(ClassLabel::DklSharp { k, l });
                }
            }
            SpaceProfile::Twobar1_012 => {
                out.push(ClassLabel::FirstKind { k });
                out.push(ClassLabel::SecondKind { k });
            }
            SpaceProfile::Twobar1M2m10 => {
                let lambda = if k == 1 { int(0) } else { int(1) };
                out.push(ClassLabel::Dk { k, lambda, mu: int(2) });
                out.push(ClassLabel::SecondKind { k });
                for l in k + 1..=k_max {
                    if k >= 2 {
                        out.push(ClassLabel::DklAlpha { k, l, alpha: int(1) });
                    }
                }
            }
        }
    }
    out
}

fn family_pattern(label: &ClassLabel) -> String {
    match label {
        ClassLabel::Dk { k, .. } => format!("d_{k}(lambda:mu)"),
        ClassLabel::DklAlpha { k, l, .. } => format!("d_{{{k},{l}}}(alpha)"),
        other => other.to_string(),
    }
}

/// Labels identified at the points p = t for each sampled t.
fn sweep(
    profile: SpaceProfile,
    base: &ClassLabel,
) -> Result<Vec<Adjacency>, ModuliError> {
    let d = base.codifferential(profile, Grading::Z)?;
    let top = d.max_exterior_degree().expect("nonzero");
    let namer = label_namer(profile, base);
    let mv = miniversal(&d, 3, top + 1, namer.as_ref())?;
    let mut out = Vec::new();
    for p in mv.params.names() {
        let mut samples = Vec::new();
        for t in [int(1), int(2)] {
            let bind: BTreeMap<String, Rational> = [(p.clone(), t.clone())].into();
            let Ok(point) = deformation_point(&mv, &bind) else { break };
            let exact = bracket(&point, &point).is_zero();
            let cutoff = if exact {
                2 * point.max_exterior_degree().unwrap_or(top) + 2
            } else {
                top + 1
            };
            let label = match classify_point(profile, &point, cutoff) {
                Ok((l, _, _)) => l.to_string(),
                Err(e) => format!("unidentified ({e})"),
            };
            samples.push((crate::scalars::format_rational(&t), label));
        }
        if samples.len() < 2 || samples[0].1 == base.to_string() {
            continue;
        }
        let kind = if samples[0].1 == samples[1].1 { "jump" } else { "smooth" };
        out.push(Adjacency {
            from: base.to_string(),
            to: samples[0].1.clone(),
            parameter: p,
            kind: kind.into(),
            samples,
        });
    }
    Ok(out)
}

fn verdict_evidence(profile: SpaceProfile, k_max: u32) -> Result<(MapVerdict, Vec<(String, bool)>), ModuliError> {
    let mut ev = Vec::new();
    let verdict = match profile {
        SpaceProfile::Onebar2X0 => {
            // Random even maps applied to catalog leading terms must be
            // brought back to the same label by the ℤ₂ normal form.
            let z2 = profile.space(Grading::Z2);
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for k in 2..=k_max.min(4) {
                for label in [
                    ClassLabel::Dk { k, lambda: int(1), mu: rat(1, 2) },
                    ClassLabel::DkStar { k },
                    ClassLabel::DkSharp { k },
                ] {
                    let d = label.codifferential(profile, Grading::Z2)?;
                    let g = loop {
                        let v: Vec<Rational> = (0..4).map(|_| int(rng.gen_range(-3..=3))).collect();
                        let m = Matrix::from_rows(vec![
                            vec![int(rng.gen_range(1..=3)), int(0), int(0)],
                            vec![int(0), v[0].clone(), v[1].clone()],
                            vec![int(0), v[2].clone(), v[3].clone()],
                        ]);
                        if let Ok(g) = LinearAuto::new(&z2, m) {
                            break g;
                        }
                    };
                    let moved = linear_action(&g, &d);
                    let ok = normal_form_leading(profile, &moved)
                        .map(|(l, _)| l == label)
                        .unwrap_or(false);
                    ev.push((format!("Z2 image of {label} under a random even map normalizes back"), ok));
                }
            }
            MapVerdict::Bijective
        }
        SpaceProfile::Twobar1_012 => {
            let z2 = profile.space(Grading::Z2);
            // A1 of rank 2: every ℤ-graded order-2 codifferential has rank ≤ 1.
            let d = parse_cochain("ps[1,0,1;1] + ps[0,1,1;2]", &z2)
                .expect("literal")
                .to_rational()
                .expect("numeric");
            let rank = block_matrices(&d, 2).a1.rank();
            ev.push((
                format!(
                    "{} is a Z2 codifferential whose A1 block has rank {rank}, an invariant of even maps; \
                     Z-graded order-2 codifferentials have rank at most 1",
                    print_cochain(&d)
                ),
                bracket(&d, &d).is_zero() && rank == 2,
            ));
            let labels = catalog_labels(profile, k_max);
            let distinct = labels.iter().all(|a| {
                labels.iter().filter(|b| b.order() == a.order() && b.family() == a.family()).count() == 1
            });
            ev.push((
                "catalog classes differ in order or in which block vanishes, both invariant in Z2".into(),
                distinct,
            ));
            MapVerdict::InjectiveNotSurjective
        }
        SpaceProfile::Twobar1M2m10 => {
            let a = ClassLabel::dk(2, int(1), int(2))?.codifferential(profile, Grading::Z)?;
            let b = ClassLabel::dk(2, int(2), int(1))?.codifferential(profile, Grading::Z)?;
            let z2 = matches!(equivalence_witness(&a, &b, Grading::Z2, 2), EquivOutcome::Witness(ref w) if w.verified);
            let z = matches!(equivalence_witness(&a, &b, Grading::Z, 2), EquivOutcome::Inequivalent(_));
            ev.push(("d_2(1:2) ~ d_2(2:1) in Z2 by a verified witness".into(), z2));
            ev.push(("d_2(1:2), d_2(2:1) certified inequivalent in Z".into(), z));
            MapVerdict::NonInjective
        }
    };
    Ok((verdict, ev))
}

/// Catalog through order `k_max`, pointwise adjacencies from single-parameter
/// sweeps of the miniversal deformations, and the ℤ → ℤ₂ map verdict.
pub fn moduli_report(profile: SpaceProfile, k_max: u32) -> Result<ModuliReport, ModuliError> {
    let labels = catalog_labels(profile, k_max);
    let mut catalog = Vec::new();
    let mut adjacencies = Vec::new();
    for label in &labels {
        let d = label.codifferential(profile, Grading::Z)?;
        catalog.push(CatalogEntry {
            label: family_pattern(label),
            family: label.family().to_string(),
            order: label.order(),
            representative: print_cochain(&d),
        });
        if d.is_pure() {
            adjacencies.extend(sweep(profile, label)?);
        }
    }
    let (verdict, evidence) = verdict_evidence(profile, k_max)?;
    Ok(ModuliReport {
        profile,
        k_max,
        catalog,
        adjacencies,
        verdict,
        evidence,
    })
}
