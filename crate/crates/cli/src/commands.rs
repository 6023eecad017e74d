//! Command implementations. Each returns its name, its answer and the exit
//! status.

use std::collections::BTreeMap;

use anyhow::{anyhow, Context};
use serde_json::{json, Value};

use linfty_core::coder::{bracket, check_generator, exp_ad, linear_action, LinearAuto};
use linfty_core::cohomology::{cohomology_basis_symbolic, cohomology_basis_with_cutoff, coboundary_matrix};
use linfty_core::deformation::{column_namer, extend_obstruction, miniversal, DeformationResult};
use linfty_core::linalg::Matrix;
use linfty_core::moduli::{
    classify_point, equivalence_witness, identify_deformation_point, label_namer, moduli_report,
    normal_form_leading, ClassLabel, EquivOutcome, EquivWitness, IdentifyOptions, SpaceProfile,
};
use linfty_core::scalars::{parse_rational_expr, parse_scalar, RatFun, Rational};
use linfty_core::space::{parse_cochain, print_cochain, CochainJson, Coderivation, GradedSpace, Grading};

use crate::output::{pass_fail, paint, Answer};
use crate::suites;
use crate::{Cli, Command, RunError, SpaceArgs};

type Outcome = Result<(&'static str, Answer, i32), RunError>;

fn usage(msg: impl Into<String>) -> RunError {
    RunError::Usage(msg.into())
}

fn profile_of(name: &str) -> Result<SpaceProfile, RunError> {
    name.parse()
        .map_err(|_| usage(format!("unknown profile `{name}` (expected onebar2_x0, twobar1_012 or twobar1_m2m10)")))
}

fn space_of(args: &SpaceArgs) -> Result<GradedSpace, RunError> {
    let mode: Grading = args.grading.into();
    match (&args.degrees, &args.profile) {
        (Some(d), None) => {
            GradedSpace::new(d.clone(), mode).map_err(|e| usage(e.to_string()))
        }
        (None, Some(p)) => Ok(profile_of(p)?.space(mode)),
        (Some(_), Some(_)) => Err(usage("give either --degrees or --profile, not both")),
        (None, None) => Err(usage("a space is required: --degrees D1,D2,... or --profile P")),
    }
}

fn symbolic(text: &str, sp: &GradedSpace) -> Result<Coderivation<RatFun>, RunError> {
    parse_cochain(text, sp).map_err(|e| usage(format!("cannot parse `{text}`: {e}")))
}

fn numeric(text: &str, sp: &GradedSpace) -> Result<Coderivation<Rational>, RunError> {
    let d = symbolic(text, sp)?;
    d.to_rational().ok_or_else(|| {
        RunError::Domain(anyhow!(
            "this command needs numeric coefficients; `{text}` uses {}",
            d.used_names().join(", ")
        ))
    })
}

fn cochain_json<S: linfty_core::scalars::Scalar>(d: &Coderivation<S>) -> Value {
    json!({ "text": print_cochain(d), "cochain": CochainJson::from_coderivation(d) })
}

fn witness_json(w: &EquivWitness) -> Value {
    json!({ "verified": w.verified, "cutoff": w.cutoff, "steps": w.describe() })
}

fn witness_text(w: &EquivWitness) -> String {
    let mut s = format!("witness verified: {}", w.verified);
    for step in w.describe() {
        s.push_str(&format!("\n  {step}"));
    }
    s
}

pub fn dispatch(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Bracket { space, f, g } => cmd_bracket(space, f, g),
        Command::Act { space, auto, d } => cmd_act(space, auto, d),
        Command::Expad { space, gen, cutoff, d } => cmd_expad(space, gen, *cutoff, d),
        Command::Cohomology { space, d, n, s, range, cutoff } => {
            cmd_cohomology(space, d, *n, *s, range.as_deref(), *cutoff)
        }
        Command::Cobmatrix { space, d, l, s } => cmd_cobmatrix(space, d, *l, *s),
        Command::Deform { space, d, base, max_order, cutoff } => {
            cmd_deform(space, d.as_deref(), base.as_deref(), *max_order, *cutoff)
        }
        Command::Obstruction { space, d, n } => cmd_obstruction(space, d, *n),
        Command::Classify { space, cutoff, d } => cmd_classify(space, *cutoff, d),
        Command::Identify { space, base, bind, cutoff, max_order } => {
            cmd_identify(space, base, bind, *cutoff, *max_order)
        }
        Command::Equiv { space, cutoff, d1, d2 } => cmd_equiv(space, *cutoff, d1, d2),
        Command::Report { profile, kmax } => cmd_report(profile, *kmax),
        Command::Reproduce { suite } => cmd_reproduce(suite, cli.seed),
    }
}

fn cmd_bracket(space: &SpaceArgs, f: &str, g: &str) -> Outcome {
    let sp = space_of(space)?;
    let f = symbolic(f, &sp)?;
    let g = if g == "same" { f.clone() } else { symbolic(g, &sp)? };
    let b = bracket(&f, &g);
    Ok(("bracket", Answer::new(cochain_json(&b), print_cochain(&b)), 0))
}

fn parse_matrix(text: &str) -> Result<Matrix<RatFun>, RunError> {
    let rows: Result<Vec<Vec<RatFun>>, RunError> = text
        .split(';')
        .map(|r| {
            r.split(',')
                .map(|e| parse_scalar(e.trim()).map_err(|err| usage(format!("matrix entry `{e}`: {err}"))))
                .collect()
        })
        .collect();
    let rows = rows?;
    if rows.is_empty() || rows.iter().any(|r| r.len() != rows.len()) {
        return Err(usage("--auto must be a square matrix, rows separated by ';'"));
    }
    Ok(Matrix::from_rows(rows))
}

fn cmd_act(space: &SpaceArgs, auto: &str, d: &str) -> Outcome {
    let sp = space_of(space)?;
    let g = LinearAuto::new(&sp, parse_matrix(auto)?).context("invalid automorphism")?;
    let d = symbolic(d, &sp)?;
    let moved = linear_action(&g, &d);
    Ok(("act", Answer::new(cochain_json(&moved), print_cochain(&moved)), 0))
}

fn cmd_expad(space: &SpaceArgs, gen: &str, cutoff: u32, d: &str) -> Outcome {
    let sp = space_of(space)?;
    let phi = symbolic(gen, &sp)?;
    check_generator(&phi).context("invalid generator")?;
    let d = symbolic(d, &sp)?;
    let e = exp_ad(&phi, &d, cutoff).context("exp_ad")?;
    Ok(("expad", Answer::new(cochain_json(&e), print_cochain(&e)), 0))
}

fn parse_range(text: &str) -> Result<(u32, u32), RunError> {
    let bad = || usage(format!("range `{text}` should look like 1..5"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let a: u32 = a.trim().parse().map_err(|_| bad())?;
    let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn cmd_cohomology(
    space: &SpaceArgs,
    d: &str,
    n: Option<u32>,
    s: i64,
    range: Option<&str>,
    cutoff: Option<u32>,
) -> Outcome {
    let sp = space_of(space)?;
    let (lo, hi) = match (n, range) {
        (Some(n), None) => (n, n),
        (None, Some(r)) => parse_range(r)?,
        _ => return Err(usage("give exactly one of --n and --range")),
    };
    let d = symbolic(d, &sp)?;
    let mut docs = Vec::new();
    let mut text = Vec::new();
    for n in lo..=hi {
        let h = match cutoff {
            Some(c) => {
                let q = d.to_rational().ok_or_else(|| {
                    anyhow!("cohomology needs numeric coefficients; got {}", d.used_names().join(", "))
                })?;
                cohomology_basis_with_cutoff(&q, n, s, c)
            }
            None => cohomology_basis_symbolic(&d, n, s),
        }
        .with_context(|| format!("cohomology in degree {n}"))?;
        let reps: Vec<String> = h.representatives.iter().map(print_cochain).collect();
        text.push(format!("H^{n}_{s}: dim {}", h.dimension()));
        for r in &reps {
            text.push(format!("  {r}"));
        }
        docs.push(json!({ "n": n, "s": s, "dimension": h.dimension(), "representatives": reps }));
    }
    let result = if lo == hi { docs.remove(0) } else { json!({ "degrees": docs }) };
    Ok(("cohomology", Answer::new(result, text.join("\n")), 0))
}

fn cmd_cobmatrix(space: &SpaceArgs, d: &str, l: u32, s: i64) -> Outcome {
    let sp = space_of(space)?;
    let d = symbolic(d, &sp)?;
    let m = coboundary_matrix(&d, l, s).context("coboundary matrix")?;
    let cols: Vec<String> = m.cols.iter().map(|c| c.label(&sp)).collect();
    let rows: Vec<String> = m.rows.iter().map(|c| c.label(&sp)).collect();
    let entries: Vec<Vec<String>> =
        m.matrix.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
    let mut text = vec![format!("columns: {}", cols.join(", ")), format!("rows: {}", rows.join(", "))];
    for r in &entries {
        text.push(format!("[{}]", r.join(", ")));
    }
    let result = json!({ "cols": cols, "rows": rows, "matrix": entries });
    Ok(("cobmatrix", Answer::new(result, text.join("\n")), 0))
}

fn deformation_json(mv: &DeformationResult) -> Value {
    json!({
        "params": mv.params.names(),
        "d_infinity": print_cochain(&mv.d_infinity),
        "corrections": mv.corrections.iter().map(|c| json!({
            "name": c.name, "value": c.value.to_string(), "preimage": print_cochain(&c.preimage),
        })).collect::<Vec<_>>(),
        "relations": mv.relations.iter().map(|r| json!({
            "degree": r.degree, "class": print_cochain(&r.class),
            "mixed": r.mixed.to_string(), "value": r.value.to_string(),
        })).collect::<Vec<_>>(),
        "residuals": mv.residuals.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "order_reached": mv.order_reached,
        "converged": mv.converged,
    })
}

fn deformation_text(mv: &DeformationResult) -> String {
    let mut t = vec![
        format!("parameters: {}", mv.params.names().join(", ")),
        format!("d_infinity = {}", print_cochain(&mv.d_infinity)),
    ];
    for c in &mv.corrections {
        t.push(format!("{} = {}  (preimage {})", c.name, c.value, print_cochain(&c.preimage)));
    }
    for r in &mv.relations {
        t.push(format!("relation on {}: {} = 0", print_cochain(&r.class), r.mixed));
    }
    t.push(format!("converged: {} (order {})", mv.converged, mv.order_reached));
    t.join("\n")
}

fn cmd_deform(
    space: &SpaceArgs,
    d: Option<&str>,
    base: Option<&str>,
    max_order: u32,
    cutoff: Option<u32>,
) -> Outcome {
    let (d, label, profile) = match (d, base) {
        (Some(text), None) => {
            let sp = space_of(space)?;
            (numeric(text, &sp)?, None, None)
        }
        (None, Some(b)) => {
            let p = profile_of(space.profile.as_deref().ok_or_else(|| usage("--base needs --profile"))?)?;
            let l: ClassLabel = b.parse().map_err(|e| usage(format!("{e}")))?;
            (l.codifferential(p, Grading::Z).context("catalog class")?, Some(l), Some(p))
        }
        _ => return Err(usage("give exactly one of --d and --base")),
    };
    let top = d.max_exterior_degree().ok_or_else(|| anyhow!("the zero coderivation has no deformations"))?;
    let cutoff = cutoff.unwrap_or(top + 1);
    let mv = match (label, profile) {
        (Some(l), Some(p)) => {
            let namer = label_namer(p, &l);
            miniversal(&d, max_order, cutoff, namer.as_ref())
        }
        _ => miniversal(&d, max_order, cutoff, &column_namer),
    }
    .context("miniversal deformation")?;
    Ok(("deform", Answer::new(deformation_json(&mv), deformation_text(&mv)), 0))
}

fn cmd_obstruction(space: &SpaceArgs, d: &str, n: u32) -> Outcome {
    let sp = space_of(space)?;
    let d = numeric(d, &sp)?;
    let (c, ext) = extend_obstruction(&d, n).context("obstruction")?;
    let ext_text = ext.as_ref().map(print_cochain);
    let text = format!(
        "cocycle: {}\n{}",
        print_cochain(&c),
        match &ext_text {
            Some(e) => format!("extends by: {e}"),
            None => "obstructed: the cocycle is not a coboundary".into(),
        }
    );
    let result = json!({ "cocycle": print_cochain(&c), "extendable": ext.is_some(), "extension": ext_text });
    Ok(("obstruction", Answer::new(result, text), 0))
}

fn label_json(l: &ClassLabel, w: &EquivWitness) -> Value {
    json!({ "label": l.to_string(), "family": l.family(), "order": l.order(), "witness": witness_json(w) })
}

fn cmd_classify(space: &SpaceArgs, cutoff: Option<u32>, d: &str) -> Outcome {
    let p = profile_of(space.profile.as_deref().ok_or_else(|| usage("classify needs --profile"))?)?;
    let sp = p.space(space.grading.into());
    let d = numeric(d, &sp)?;
    let (label, w) = if d.is_pure() {
        normal_form_leading(p, &d).context("classification")?
    } else {
        let c = cutoff.unwrap_or_else(|| 2 * d.max_exterior_degree().unwrap_or(1) + 2);
        let (l, w, _) = classify_point(p, &d, c).context("classification")?;
        (l, w)
    };
    let text = format!("{}\n{}", paint(&label.to_string(), "1"), witness_text(&w));
    Ok(("classify", Answer::new(label_json(&label, &w), text), 0))
}

fn parse_bindings(bind: &[String]) -> Result<BTreeMap<String, Rational>, RunError> {
    bind.iter()
        .filter(|b| !b.trim().is_empty())
        .map(|b| {
            let (k, v) = b.split_once('=').ok_or_else(|| usage(format!("binding `{b}` should be name=value")))?;
            let v = parse_rational_expr(v.trim()).map_err(|e| usage(format!("binding `{b}`: {e}")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn cmd_identify(space: &SpaceArgs, base: &str, bind: &[String], cutoff: Option<u32>, max_order: u32) -> Outcome {
    let p = profile_of(space.profile.as_deref().ok_or_else(|| usage("identify needs --profile"))?)?;
    let base: ClassLabel = base.parse().map_err(|e| usage(format!("{e}")))?;
    let bindings = parse_bindings(bind)?;
    let opts = IdentifyOptions { cutoff, max_order };
    let (label, w) = identify_deformation_point(p, &base, &bindings, &opts).context("identification")?;
    let text = format!("{}\n{}", paint(&label.to_string(), "1"), witness_text(&w));
    Ok(("identify", Answer::new(label_json(&label, &w), text), 0))
}

fn cmd_equiv(space: &SpaceArgs, cutoff: Option<u32>, d1: &str, d2: &str) -> Outcome {
    let mode: Grading = space.grading.into();
    // Work with integer degrees; the search itself runs in `mode`.
    let z = SpaceArgs { grading: crate::GradingArg::Z, ..space.clone() };
    let sp = space_of(&z)?;
    let a = numeric(d1, &sp)?;
    let b = numeric(d2, &sp)?;
    let top = a.max_exterior_degree().max(b.max_exterior_degree()).unwrap_or(1);
    let cutoff = cutoff.unwrap_or(top + 1);
    let (result, text) = match equivalence_witness(&a, &b, mode, cutoff) {
        EquivOutcome::Witness(w) => (
            json!({ "outcome": "witness", "witness": witness_json(&w) }),
            format!("equivalent in {mode}\n{}", witness_text(&w)),
        ),
        EquivOutcome::Inequivalent(c) => (
            json!({ "outcome": "inequivalent", "reason": c.reason }),
            format!("inequivalent in {mode}: {}", c.reason),
        ),
        EquivOutcome::NoneFound { note } => (
            json!({ "outcome": "none-found", "note": note }),
            format!("no automorphism found in the searched family: {note}"),
        ),
    };
    Ok(("equiv", Answer::new(result, text), 0))
}

fn cmd_report(profile: &str, kmax: u32) -> Outcome {
    let p = profile_of(profile)?;
    if kmax == 0 || kmax > 6 {
        return Err(usage("--kmax must be between 1 and 6"));
    }
    let r = moduli_report(p, kmax).context("moduli report")?;
    let mut t = vec![format!("profile {} (k <= {kmax})", r.profile), "catalog:".into()];
    for c in &r.catalog {
        t.push(format!("  {:<16} {}", c.label, c.representative));
    }
    t.push("adjacencies:".into());
    for a in &r.adjacencies {
        t.push(format!("  {} -> {} via {} [{}]", a.from, a.to, a.parameter, a.kind));
    }
    t.push(format!("Z -> Z2 map: {}", paint(r.verdict.tag(), "1")));
    for (claim, ok) in &r.evidence {
        t.push(format!("  {} {claim}", pass_fail(*ok)));
    }
    let json = serde_json::to_value(&r).context("serializing report")?;
    Ok(("report", Answer::new(json, t.join("\n")), 0))
}

fn cmd_reproduce(suite: &str, seed: Option<u64>) -> Outcome {
    let names: Vec<&str> = if suite == "all" {
        suites::SUITES.to_vec()
    } else if suites::SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(usage(format!("unknown suite `{suite}` (expected one of {}, all)", suites::SUITES.join(", "))));
    };
    let mut docs = Vec::new();
    let mut text = Vec::new();
    let mut failed = 0;
    for name in names {
        let report = suites::run_suite(name, seed).map_err(RunError::Domain)?;
        for c in &report.cases {
            text.push(format!("{} {name}: {}", pass_fail(c.passed), c.case));
            if let Some(d) = &c.diff {
                text.push(format!("  diff: {d}"));
            }
        }
        failed += report.failed();
        docs.push(report.to_json());
    }
    text.push(format!("{} failure(s)", failed));
    let result = json!({ "suites": docs, "failed": failed });
    Ok(("reproduce", Answer::new(result, text.join("\n")), i32::from(failed > 0)))
}
