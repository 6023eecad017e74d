//! Golden-file reproduction suites. Fixtures under `fixtures/v1` hold the
//! expected values; each suite recomputes them with the engine.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use linfty_core::coder::{bracket, linear_action, linear_matrix_on_sk, matrix_of_part, LinearAuto};
use linfty_core::cohomology::{cohomology_basis, coboundary_matrix, CohomologyBasis};
use linfty_core::deformation::miniversal;
use linfty_core::linalg::Matrix;
use linfty_core::moduli::{
    block_dichotomy_sample, equivalence_witness, identify_deformation_point, label_namer, moduli_report,
    ClassLabel, EquivOutcome, IdentifyOptions, ModuliError, SpaceProfile,
};
use linfty_core::scalars::{format_rational, parse_rational_expr, parse_scalar, rat, RatFun, Rational, Scalar, ScalarError};
use linfty_core::space::{parse_cochain, Coderivation, GradedSpace, Grading};

pub const SUITES: [&str; 6] = ["matrices", "cohomology-tables", "miniversal", "identify", "z2map", "blocks"];

const MATRICES: &str = include_str!("../fixtures/v1/matrices.json");
const COHOMOLOGY: &str = include_str!("../fixtures/v1/cohomology_tables.json");
const MINIVERSAL: &str = include_str!("../fixtures/v1/miniversal.json");
const IDENTIFY: &str = include_str!("../fixtures/v1/identify.json");
const Z2MAP: &str = include_str!("../fixtures/v1/z2map.json");
const BLOCKS: &str = include_str!("../fixtures/v1/blocks.json");

#[derive(Debug, Clone)]
pub struct CaseResult {
    pub case: String,
    pub passed: bool,
    /// Machine-readable description of the first mismatch.
    pub diff: Option<Value>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn failed(&self) -> usize {
        self.cases.iter().filter(|c| !c.passed).count()
    }

    pub fn passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "cases": self.cases.len(),
            "failed": self.failed(),
            "failures": self.cases.iter().filter(|c| !c.passed).map(|c| json!({
                "case": c.case, "diff": c.diff,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Runs one suite; `seed` replaces the fixture seeds of randomized suites.
pub fn run_suite(name: &str, seed: Option<u64>) -> Result<SuiteReport> {
    let cases = match name {
        "matrices" => matrices()?,
        "cohomology-tables" => cohomology_tables()?,
        "miniversal" => miniversal_suite(seed)?,
        "identify" => identify(seed)?,
        "z2map" => z2map()?,
        "blocks" => blocks(seed)?,
        other => bail!("unknown suite `{other}`"),
    };
    Ok(SuiteReport { suite: name.to_string(), cases })
}

/// Outcome of one case: `Err` carries the diff.
type Check = std::result::Result<(), Value>;

fn record(case: String, check: Result<Check>) -> CaseResult {
    match check {
        Ok(Ok(())) => CaseResult { case, passed: true, diff: None },
        Ok(Err(diff)) => CaseResult { case, passed: false, diff: Some(diff) },
        Err(e) => CaseResult { case, passed: false, diff: Some(json!({ "error": format!("{e:#}") })) },
    }
}

fn f(text: &str) -> Result<RatFun> {
    parse_scalar(text).map_err(|e| anyhow!("`{text}`: {e}"))
}

fn q(text: &str) -> Result<Rational> {
    parse_rational_expr(text).map_err(|e| anyhow!("`{text}`: {e}"))
}

fn numeric(text: &str, sp: &GradedSpace) -> Result<Coderivation<Rational>> {
    parse_cochain(text, sp)
        .map_err(|e| anyhow!("`{text}`: {e}"))?
        .to_rational()
        .ok_or_else(|| anyhow!("`{text}` is not numeric"))
}

fn symbolic(text: &str, sp: &GradedSpace) -> Result<Coderivation<RatFun>> {
    parse_cochain(text, sp).map_err(|e| anyhow!("`{text}`: {e}"))
}

fn same(a: &RatFun, b: &RatFun) -> Result<bool> {
    let p = a.params().union(b.params());
    let (a, b) = (a.with_params(&p), b.with_params(&p));
    match (a, b) {
        (Some(a), Some(b)) => Ok(a.rf_equals(&b)?),
        _ => bail!("cannot align parameter lists"),
    }
}

fn rationals(m: &BTreeMap<String, String>) -> Result<BTreeMap<String, Rational>> {
    m.iter().map(|(k, v)| Ok((k.clone(), q(v)?))).collect()
}

/// Entrywise comparison: symbolic equality and agreement at each point.
fn compare_matrix(got: &Matrix<RatFun>, want: &[Vec<String>], points: &[BTreeMap<String, String>]) -> Result<Check> {
    if got.nrows() != want.len() || want.iter().any(|r| r.len() != got.ncols()) {
        return Ok(Err(json!({ "shape": [got.nrows(), got.ncols()], "want_rows": want.len() })));
    }
    let points: Vec<BTreeMap<String, Rational>> = points.iter().map(rationals).collect::<Result<_>>()?;
    for (i, row) in want.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            let w = f(w)?;
            let g = got.get(i, j);
            if !same(g, &w)? {
                return Ok(Err(json!({ "entry": [i, j], "got": g.to_string(), "want": w.to_string() })));
            }
            for p in &points {
                let (gv, wv) = (g.substitute(p)?, w.substitute(p)?);
                if gv != wv {
                    return Ok(Err(json!({
                        "entry": [i, j], "point": p.iter().map(|(k, v)| (k.clone(), format_rational(v))).collect::<BTreeMap<_, _>>(),
                        "got": format_rational(&gv), "want": format_rational(&wv),
                    })));
                }
            }
        }
    }
    Ok(Ok(()))
}

#[derive(Deserialize)]
struct CoboundaryCase {
    name: String,
    degrees: Vec<i64>,
    d: String,
    l: u32,
    s: i64,
    cols: Option<Vec<String>>,
    rows: Option<Vec<String>>,
    /// Printed column j is `sign` times engine column `src`.
    column_map: Option<Vec<(usize, i64)>>,
    matrix: Vec<Vec<String>>,
    points: Vec<BTreeMap<String, String>>,
}

#[derive(Deserialize)]
struct ConjugationCase {
    name: String,
    k: u32,
    degrees: Vec<i64>,
    d: String,
    g: Vec<Vec<String>>,
    words: Vec<Vec<u32>>,
    a: Vec<Vec<String>>,
    q: Vec<Vec<String>>,
    a_prime: Vec<Vec<String>>,
    points: Vec<BTreeMap<String, String>>,
}

#[derive(Deserialize)]
struct MatricesFixture {
    coboundary: Vec<CoboundaryCase>,
    conjugation: Vec<ConjugationCase>,
}

fn coboundary_case(c: &CoboundaryCase) -> Result<Check> {
    let sp = GradedSpace::z(&c.degrees);
    let d = symbolic(&c.d, &sp)?;
    let m = coboundary_matrix(&d, c.l, c.s)?;
    let labels = |v: &[linfty_core::space::BasisCochain]| v.iter().map(|b| b.label(&sp)).collect::<Vec<_>>();
    if let Some(cols) = &c.cols {
        if &labels(&m.cols) != cols {
            return Ok(Err(json!({ "cols": labels(&m.cols), "want": cols })));
        }
    }
    if let Some(rows) = &c.rows {
        if &labels(&m.rows) != rows {
            return Ok(Err(json!({ "rows": labels(&m.rows), "want": rows })));
        }
    }
    let printed = match &c.column_map {
        None => m.matrix,
        Some(map) => {
            let mut p = Matrix::zeros(m.matrix.nrows(), map.len());
            for i in 0..m.matrix.nrows() {
                for (j, &(src, sign)) in map.iter().enumerate() {
                    p.set(i, j, m.matrix.get(i, src).scale(&rat(sign, 1)));
                }
            }
            p
        }
    };
    compare_matrix(&printed, &c.matrix, &c.points)
}

fn conjugation_case(c: &ConjugationCase) -> Result<Check> {
    let sp = GradedSpace::z2(&c.degrees);
    let d = symbolic(&c.d, &sp)?;
    let g = Matrix::from_rows(c.g.iter().map(|r| r.iter().map(|e| f(e)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?);
    let g = LinearAuto::new(&sp, g)?;
    let (words, a) = matrix_of_part(&d, c.k);
    let cols: Vec<usize> = c
        .words
        .iter()
        .map(|w| words.iter().position(|x| &x.0 == w).ok_or_else(|| anyhow!("word {w:?} missing")))
        .collect::<Result<_>>()?;
    let pick = |m: &Matrix<RatFun>| {
        let mut out = Matrix::zeros(m.nrows(), cols.len());
        for i in 0..m.nrows() {
            for (j, &cj) in cols.iter().enumerate() {
                out.set(i, j, m.get(i, cj).clone());
            }
        }
        out
    };
    if let Err(d) = compare_matrix(&pick(&a), &c.a, &c.points)? {
        return Ok(Err(json!({ "matrix": "A", "diff": d })));
    }
    let (_, qm) = linear_matrix_on_sk(&g, c.k);
    let mut q4 = Matrix::zeros(cols.len(), cols.len());
    for (i, &ri) in cols.iter().enumerate() {
        for (j, &cj) in cols.iter().enumerate() {
            q4.set(i, j, qm.get(ri, cj).clone());
        }
    }
    if let Err(d) = compare_matrix(&q4, &c.q, &c.points)? {
        return Ok(Err(json!({ "matrix": "Q", "diff": d })));
    }
    let (_, a2) = matrix_of_part(&linear_action(&g, &d), c.k);
    if let Err(d) = compare_matrix(&pick(&a2), &c.a_prime, &c.points)? {
        return Ok(Err(json!({ "matrix": "A'", "diff": d })));
    }
    // The identity itself at rational points.
    for p in &c.points {
        let p = rationals(p)?;
        let ev = |m: &Matrix<RatFun>| -> Result<Matrix<Rational>> {
            let rows = m
                .to_rows()
                .iter()
                .map(|r| r.iter().map(|x| Ok(x.substitute(&p)?)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            Ok(Matrix::from_rows(rows))
        };
        let ginv = ev(g.matrix())?.inverse().ok_or_else(|| anyhow!("singular sample"))?;
        let rhs = ginv.mul(&ev(&pick(&a))?).mul(&ev(&q4)?);
        if ev(&pick(&a2))? != rhs {
            return Ok(Err(json!({ "identity": "A' != G^-1 A Q", "point": format!("{p:?}") })));
        }
    }
    Ok(Ok(()))
}

fn matrices() -> Result<Vec<CaseResult>> {
    let fx: MatricesFixture = serde_json::from_str(MATRICES).context("matrices fixture")?;
    let mut out: Vec<CaseResult> = fx.coboundary.iter().map(|c| record(c.name.clone(), coboundary_case(c))).collect();
    out.extend(fx.conjugation.iter().map(|c| record(c.name.clone(), conjugation_case(c))));
    Ok(out)
}

#[derive(Deserialize)]
struct CohomologyCase {
    name: String,
    degrees: Vec<i64>,
    d: String,
    dims: Vec<usize>,
    spans: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    closed: Vec<String>,
    #[serde(default)]
    not_closed: Vec<String>,
}

#[derive(Deserialize)]
struct CohomologyFixture {
    cases: Vec<CohomologyCase>,
}

fn rank(rows: Vec<Vec<Rational>>) -> usize {
    if rows.is_empty() {
        0
    } else {
        Matrix::from_rows(rows).rank()
    }
}

/// Whether `expected` (by leading parts) is a basis of H^n.
fn spans(h: &CohomologyBasis, expected: &[Coderivation<Rational>]) -> bool {
    let exp: Vec<Vec<Rational>> = expected.iter().map(|e| e.part(h.n).coords(&h.basis)).collect();
    let z = h.cocycle_leads.clone();
    let zr = rank(z.clone());
    let all_cocycles = exp.iter().all(|v| {
        let mut rows = z.clone();
        rows.push(v.clone());
        rank(rows) == zr
    });
    let b = h.boundary_leads();
    let br = rank(b.clone());
    let mut rows = b;
    rows.extend(exp.clone());
    all_cocycles && rank(rows) == br + exp.len() && h.dimension() == exp.len()
}

fn cohomology_case(c: &CohomologyCase) -> Result<Check> {
    let sp = GradedSpace::z(&c.degrees);
    let d = numeric(&c.d, &sp)?;
    let mut dims = Vec::new();
    for n in 1..=c.dims.len() as u32 {
        dims.push(cohomology_basis(&d, n, 1)?.dimension());
    }
    if dims != c.dims {
        return Ok(Err(json!({ "dims": dims, "want": c.dims })));
    }
    for (n, reps) in &c.spans {
        let n: u32 = n.parse()?;
        let h = cohomology_basis(&d, n, 1)?;
        let exp: Vec<Coderivation<Rational>> = reps.iter().map(|r| numeric(r, &sp)).collect::<Result<_>>()?;
        if !spans(&h, &exp) {
            return Ok(Err(json!({ "degree": n, "representatives": reps, "reason": "do not span H^n" })));
        }
    }
    for z in &c.closed {
        if !bracket(&d, &numeric(z, &sp)?).is_zero() {
            return Ok(Err(json!({ "not closed": z })));
        }
    }
    for z in &c.not_closed {
        if bracket(&d, &numeric(z, &sp)?).is_zero() {
            return Ok(Err(json!({ "unexpectedly closed": z })));
        }
    }
    Ok(Ok(()))
}

fn cohomology_tables() -> Result<Vec<CaseResult>> {
    let fx: CohomologyFixture = serde_json::from_str(COHOMOLOGY).context("cohomology fixture")?;
    Ok(fx.cases.iter().map(|c| record(c.name.clone(), cohomology_case(c))).collect())
}

#[derive(Deserialize)]
struct NamedValue {
    name: String,
    value: String,
}

#[derive(Deserialize)]
struct MiniversalCase {
    name: String,
    profile: String,
    base: String,
    max_order: u32,
    params: Vec<String>,
    corrections: Vec<NamedValue>,
    relations: Vec<String>,
    random_points: usize,
    seed: u64,
    /// Each branch fixes some parameters (as expressions in the others) to
    /// land on the zero set of the relations.
    branches: Vec<BTreeMap<String, String>>,
}

#[derive(Deserialize)]
struct MiniversalFixture {
    cases: Vec<MiniversalCase>,
}

fn small(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.gen_range(-6i64..=6), rng.gen_range(1i64..=3))
}

fn nonzero(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let v = small(rng);
        if !v.is_zero() {
            return v;
        }
    }
}

fn miniversal_case(c: &MiniversalCase, seed: Option<u64>) -> Result<Check> {
    let p: SpaceProfile = c.profile.parse()?;
    let l: ClassLabel = c.base.parse()?;
    let d = l.codifferential(p, Grading::Z)?;
    let cutoff = d.max_exterior_degree().unwrap_or(1) + 1;
    let namer = label_namer(p, &l);
    let mv = miniversal(&d, c.max_order, cutoff, namer.as_ref())?;
    if mv.params.names() != c.params {
        return Ok(Err(json!({ "params": mv.params.names(), "want": c.params })));
    }
    if mv.corrections.len() != c.corrections.len() {
        return Ok(Err(json!({ "corrections": mv.corrections.len(), "want": c.corrections.len() })));
    }
    for w in &c.corrections {
        let Some(got) = mv.corrections.iter().find(|x| x.name == w.name) else {
            return Ok(Err(json!({ "missing correction": w.name })));
        };
        if !same(&got.value, &f(&w.value)?)? {
            return Ok(Err(json!({ "correction": w.name, "got": got.value.to_string(), "want": w.value })));
        }
    }
    let got = mv.relation_mixed();
    if got.len() != c.relations.len() {
        return Ok(Err(json!({
            "relations": got.iter().map(|r| r.to_string()).collect::<Vec<_>>(), "want": c.relations,
        })));
    }
    // Relations are equations = 0, so each is matched up to sign.
    for w in &c.relations {
        let w = f(w)?;
        let mut hit = false;
        for g in &got {
            if same(g, &w)? || same(&g.neg(), &w)? {
                hit = true;
            }
        }
        if !hit {
            return Ok(Err(json!({ "missing relation": w.to_string() })));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(c.seed));
    let mut hits = 0;
    let mut tries = 0;
    while hits < c.random_points {
        tries += 1;
        if tries > 100 * c.random_points {
            return Ok(Err(json!({ "sampling": "too many poles" })));
        }
        let mut point: BTreeMap<String, Rational> = c.params.iter().map(|n| (n.clone(), small(&mut rng))).collect();
        let branch = &c.branches[rng.gen_range(0..c.branches.len())];
        for (name, expr) in branch {
            let v = f(expr)?.substitute(&point)?;
            point.insert(name.clone(), v);
        }
        let Ok(dp) = mv.d_infinity.try_map(|x| x.substitute(&point)) else {
            continue;
        };
        for r in &mv.relations {
            if !r.value.substitute(&point)?.is_zero() {
                return Ok(Err(json!({ "sampler misses relation": r.mixed.to_string() })));
            }
        }
        if !bracket(&dp, &dp).truncate(cutoff).is_zero() {
            let shown: BTreeMap<_, _> = point.iter().map(|(k, v)| (k.clone(), format_rational(v))).collect();
            return Ok(Err(json!({ "not a codifferential at": shown })));
        }
        hits += 1;
    }
    Ok(Ok(()))
}

fn miniversal_suite(seed: Option<u64>) -> Result<Vec<CaseResult>> {
    let fx: MiniversalFixture = serde_json::from_str(MINIVERSAL).context("miniversal fixture")?;
    Ok(fx.cases.iter().map(|c| record(c.name.clone(), miniversal_case(c, seed))).collect())
}

#[derive(Deserialize)]
struct RandomSpec {
    count: usize,
    nonzero: Vec<String>,
    free: Vec<String>,
    base_values: Vec<String>,
}

#[derive(Deserialize)]
struct Expect {
    k: u32,
    l: u32,
}

#[derive(Deserialize)]
struct IdentifyCase {
    name: String,
    profile: String,
    base: String,
    #[serde(default)]
    bindings: Option<BTreeMap<String, String>>,
    #[serde(default)]
    random: Option<RandomSpec>,
    #[serde(default)]
    oracle: Option<String>,
    #[serde(default)]
    oracle_values: BTreeMap<String, String>,
    #[serde(default)]
    expect: Option<Expect>,
    #[serde(default)]
    expect_alpha: Option<String>,
    #[serde(default)]
    expect_label: Option<String>,
    #[serde(default)]
    expect_error: Option<String>,
    #[serde(default)]
    expect_error_kind: Option<String>,
}

#[derive(Deserialize)]
struct IdentifyFixture {
    seed: u64,
    cases: Vec<IdentifyCase>,
}

fn shown(m: &BTreeMap<String, Rational>) -> Value {
    json!(m.iter().map(|(k, v)| (k.clone(), format_rational(v))).collect::<BTreeMap<_, _>>())
}

/// One identification at a point, checked against the case's expectation.
/// `None` means the point is a pole of the family.
fn identify_at(
    c: &IdentifyCase,
    p: SpaceProfile,
    base: &str,
    bindings: &BTreeMap<String, Rational>,
    extra: &BTreeMap<String, Rational>,
) -> Result<Option<Check>> {
    let label: ClassLabel = base.parse()?;
    let got = identify_deformation_point(p, &label, bindings, &IdentifyOptions::default());
    if let Err(e) = &got {
        if e.to_string() == ScalarError::Pole.to_string() {
            return Ok(None);
        }
    }
    check_identified(c, got, bindings, extra).map(Some)
}

fn check_identified(
    c: &IdentifyCase,
    got: std::result::Result<(ClassLabel, impl std::fmt::Debug), ModuliError>,
    bindings: &BTreeMap<String, Rational>,
    extra: &BTreeMap<String, Rational>,
) -> Result<Check> {
    let at = shown(bindings);
    if let Some(msg) = &c.expect_error {
        return Ok(match got {
            Err(e) if &e.to_string() == msg => Ok(()),
            other => Err(json!({ "at": at, "got": format!("{other:?}"), "want error": msg })),
        });
    }
    if c.expect_error_kind.as_deref() == Some("relation") {
        return Ok(match got {
            Err(ModuliError::RelationViolated { .. }) => Ok(()),
            other => Err(json!({ "at": at, "got": format!("{other:?}"), "want": "relation violated" })),
        });
    }
    let (got, _) = match got {
        Ok(x) => x,
        Err(e) => return Ok(Err(json!({ "at": at, "error": e.to_string() }))),
    };
    let want = if let Some(l) = &c.expect_label {
        l.parse::<ClassLabel>()?
    } else {
        let (Some(oracle), Some(e)) = (&c.oracle, &c.expect) else {
            bail!("case needs an oracle or an expected label");
        };
        let mut values = bindings.clone();
        values.extend(extra.clone());
        let alpha = f(oracle)?.substitute(&values)?;
        if let Some(a) = &c.expect_alpha {
            if alpha != q(a)? {
                return Ok(Err(json!({ "oracle": format_rational(&alpha), "frozen": a })));
            }
        }
        ClassLabel::DklAlpha { k: e.k, l: e.l, alpha }
    };
    if got.to_string() != want.to_string() {
        return Ok(Err(json!({ "at": at, "got": got.to_string(), "want": want.to_string() })));
    }
    Ok(Ok(()))
}

fn identify_case(c: &IdentifyCase, rng: &mut ChaCha8Rng) -> Result<Check> {
    let p: SpaceProfile = c.profile.parse()?;
    let mut extra = rationals(&c.oracle_values)?;
    if let Some(b) = &c.bindings {
        let b = rationals(b)?;
        return Ok(identify_at(c, p, &c.base, &b, &extra)?
            .unwrap_or_else(|| Err(json!({ "at": shown(&b), "error": "pole of the family" }))));
    }
    let spec = c.random.as_ref().ok_or_else(|| anyhow!("case has neither bindings nor a sampler"))?;
    let mut done = 0;
    let mut tries = 0;
    while done < spec.count {
        tries += 1;
        if tries > 20 * spec.count {
            return Ok(Err(json!({ "sampling": "too many poles" })));
        }
        let mut base = c.base.clone();
        for name in &spec.base_values {
            let v = small(rng);
            base = base.replace(&format!("{{{name}}}"), &format_rational(&v));
            extra.insert(name.clone(), v);
        }
        let mut b = BTreeMap::new();
        for n in &spec.nonzero {
            b.insert(n.clone(), nonzero(rng));
        }
        for n in &spec.free {
            b.insert(n.clone(), small(rng));
        }
        match identify_at(c, p, &base, &b, &extra)? {
            None => continue,
            Some(Err(d)) => return Ok(Err(json!({ "base": base, "diff": d }))),
            Some(Ok(())) => done += 1,
        }
    }
    Ok(Ok(()))
}

fn identify(seed: Option<u64>) -> Result<Vec<CaseResult>> {
    let fx: IdentifyFixture = serde_json::from_str(IDENTIFY).context("identify fixture")?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(fx.seed));
    Ok(fx.cases.iter().map(|c| record(c.name.clone(), identify_case(c, &mut rng))).collect())
}

#[derive(Deserialize)]
struct EquivCase {
    name: String,
    profile: String,
    d1: String,
    d2: String,
    grading: String,
    expect: String,
    cutoff: u32,
}

#[derive(Deserialize)]
struct VerdictCase {
    profile: String,
    kmax: u32,
    verdict: String,
    #[serde(default)]
    jumps: Vec<(String, String)>,
}

#[derive(Deserialize)]
struct Z2Fixture {
    equivalence: Vec<EquivCase>,
    verdicts: Vec<VerdictCase>,
}

fn equiv_case(c: &EquivCase) -> Result<Check> {
    let p: SpaceProfile = c.profile.parse()?;
    let mode = match c.grading.as_str() {
        "Z" => Grading::Z,
        "Z2" => Grading::Z2,
        g => bail!("unknown grading {g}"),
    };
    let sp = p.space(Grading::Z);
    let (a, b) = (numeric(&c.d1, &sp)?, numeric(&c.d2, &sp)?);
    let outcome = equivalence_witness(&a, &b, mode, c.cutoff);
    Ok(match (c.expect.as_str(), outcome) {
        ("witness", EquivOutcome::Witness(mut w)) => {
            let sm = sp.with_mode(mode);
            if w.verify(&a.with_space(&sm), &b.with_space(&sm)) {
                Ok(())
            } else {
                Err(json!({ "witness does not re-verify": w.describe() }))
            }
        }
        ("inequivalent", EquivOutcome::Inequivalent(_)) => Ok(()),
        (want, other) => Err(json!({ "got": format!("{other:?}"), "want": want })),
    })
}

fn verdict_case(c: &VerdictCase) -> Result<Check> {
    let p: SpaceProfile = c.profile.parse()?;
    let r = moduli_report(p, c.kmax)?;
    if r.verdict.tag() != c.verdict {
        return Ok(Err(json!({ "verdict": r.verdict.tag(), "want": c.verdict })));
    }
    if let Some((claim, _)) = r.evidence.iter().find(|(_, ok)| !ok) {
        return Ok(Err(json!({ "failed evidence": claim })));
    }
    for (from, to) in &c.jumps {
        if !r.adjacencies.iter().any(|a| &a.from == from && &a.to == to && a.kind == "jump") {
            return Ok(Err(json!({ "missing jump": [from, to] })));
        }
    }
    Ok(Ok(()))
}

fn z2map() -> Result<Vec<CaseResult>> {
    let fx: Z2Fixture = serde_json::from_str(Z2MAP).context("z2map fixture")?;
    let mut out: Vec<CaseResult> = fx.equivalence.iter().map(|c| record(c.name.clone(), equiv_case(c))).collect();
    out.extend(
        fx.verdicts
            .iter()
            .map(|c| record(format!("{} verdict {}", c.profile, c.verdict), verdict_case(c))),
    );
    Ok(out)
}

#[derive(Deserialize)]
struct BlocksFixture {
    count: usize,
    k_max: u32,
    seed: u64,
}

fn blocks(seed: Option<u64>) -> Result<Vec<CaseResult>> {
    let fx: BlocksFixture = serde_json::from_str(BLOCKS).context("blocks fixture")?;
    let samples = block_dichotomy_sample(fx.count, fx.k_max, seed.unwrap_or(fx.seed));
    let bad: Vec<&str> = samples.iter().filter(|s| !s.holds()).map(|s| s.cochain.as_str()).collect();
    let zero = samples.iter().filter(|s| s.bracket_zero).count();
    let check = if !bad.is_empty() {
        Err(json!({ "counterexamples": bad }))
    } else if zero == 0 || zero == samples.len() {
        Err(json!({ "degenerate sample": { "closed": zero, "total": samples.len() } }))
    } else {
        Ok(())
    };
    Ok(vec![record(
        format!("{} random odd coderivations, k <= {}", fx.count, fx.k_max),
        Ok(check),
    )])
}
