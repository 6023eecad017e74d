//! Miniversal deformations, obstructions and reductions on catalog cases.

use std::collections::BTreeMap;

use linfty_core::coder::{bracket, exp_ad};
use linfty_core::deformation::{
    infinitesimal_deformation, miniversal, reduce_filtered, standard_form_reduce, DeformationResult,
};
use linfty_core::moduli::{label_namer, ClassLabel, SpaceProfile};
use linfty_core::scalars::{int, parse_scalar, rat, RatFun, Rational, Scalar};
use linfty_core::space::{enumerate_cochain_basis, parse_cochain, Coderivation, GradedSpace, Grading};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(text: &str, sp: &GradedSpace) -> Coderivation<Rational> {
    parse_cochain(text, sp).unwrap().to_rational().unwrap()
}

fn f(text: &str) -> RatFun {
    parse_scalar(text).unwrap()
}

fn same(a: &RatFun, b: &RatFun) -> bool {
    let p = a.params().union(b.params());
    a.with_params(&p).unwrap().rf_equals(&b.with_params(&p).unwrap()).unwrap()
}

fn catalog(profile: SpaceProfile, label: &str) -> (Coderivation<Rational>, DeformationResult, u32) {
    let l: ClassLabel = label.parse().unwrap();
    let d = l.codifferential(profile, Grading::Z).unwrap();
    let cutoff = d.max_exterior_degree().unwrap() + 1;
    let namer = label_namer(profile, &l);
    let mv = miniversal(&d, 4, cutoff, namer.as_ref()).unwrap();
    (d, mv, cutoff)
}

#[test]
fn sharp_candidate_relations() {
    let (_, mv, _) = catalog(SpaceProfile::Onebar2X0, "d_3(1:2)");
    assert!(mv.converged);
    assert_eq!(mv.corrections.len(), 1);
    let x = &mv.corrections[0];
    assert_eq!(x.name, "x1");
    assert!(same(&x.value, &f("r*(2*s2 - t2)/(1 + t3)")));
    let want = [f("r*t3"), f("2*r*s1 + x1*(s2 - t2)"), f("x1*s1")];
    let got = mv.relation_mixed();
    assert_eq!(got.len(), want.len());
    // Relations are equations = 0, so each matches up to sign.
    for w in &want {
        assert!(
            got.iter().any(|g| same(g, w) || same(&g.neg(), w)),
            "missing relation {w}"
        );
    }
}

#[test]
fn obstruction_of_the_h1_direction() {
    let sp = GradedSpace::z(&[0, -1, 1]);
    for (k, l) in [(3i64, 4i64), (2, 3), (3, 5), (4, 5)] {
        let text = format!(
            "ps[{},1,0;1] + ps[{},1,1;3]*{l} + ps[{l},0,0;3] + ps[0,1,0;1]*({})*r + ps[{},0,0;3]*{l}*r",
            k - 1,
            k - 2,
            k - 1,
            l - k + 1
        );
        let d = parse_cochain(&text, &sp).unwrap();
        let sq = bracket(&d, &d);
        let low = sq.order().unwrap();
        let part = sq.part(low);
        let (c, v) = part.terms().next().unwrap();
        assert_eq!(part.terms().count(), 1);
        assert_eq!(c.label(&sp), format!("ph[{},1,0;3]", l - k));
        let want = f(&format!("2*{l}*r^2*({})*({})", k - 1, l - k + 1));
        assert!(same(v, &want), "{v} vs {want}");
    }
}

#[test]
fn self_bracket_equals_relations_on_classes() {
    let cases = [
        (SpaceProfile::Onebar2X0, "d_3(1:2)"),
        (SpaceProfile::Onebar2X0, "d_2*"),
        (SpaceProfile::Onebar2X0, "d_2^#"),
        (SpaceProfile::Onebar2X0, "d^#_{2,3}"),
        (SpaceProfile::Onebar2X0, "d_3(1:1/2)"),
        (SpaceProfile::Twobar1_012, "first_kind(3)"),
    ];
    for (p, label) in cases {
        let (_, mv, cutoff) = catalog(p, label);
        let half = bracket(&mv.d_infinity, &mv.d_infinity)
            .truncate(cutoff)
            .scale_rational(&rat(1, 2));
        let mut expect = Coderivation::zero(half.space());
        for r in &mv.relations {
            expect = expect.add(&r.class.to_ratfun().scale(&r.value));
        }
        assert_eq!(half, expect, "{label}");
    }
}

#[test]
fn infinitesimal_deformation_is_closed_to_first_order() {
    for (p, label) in [
        (SpaceProfile::Onebar2X0, "d_3(1:2)"),
        (SpaceProfile::Onebar2X0, "d_3^#"),
        (SpaceProfile::Twobar1M2m10, "d_3(1:2)"),
    ] {
        let l: ClassLabel = label.parse().unwrap();
        let d = l.codifferential(p, Grading::Z).unwrap();
        let namer = label_namer(p, &l);
        let (dinf, _) = infinitesimal_deformation(&d, d.max_exterior_degree().unwrap() + 1, namer.as_ref()).unwrap();
        let sq = bracket(&dinf, &dinf);
        for (_, v) in sq.terms() {
            assert!(v.truncate(1).is_zero(), "{label}: {v}");
        }
    }
}

fn small(rng: &mut ChaCha8Rng) -> Rational {
    let n = rng.gen_range(-5i64..=5);
    let d = rng.gen_range(1i64..=4);
    rat(n, d)
}

fn nonzero(rng: &mut ChaCha8Rng) -> Rational {
    loop {
        let v = small(rng);
        if !v.is_zero() {
            return v;
        }
    }
}

/// Random points on the zero set of the relations, one sampler per case.
fn sample(label: &str, rng: &mut ChaCha8Rng, names: &[String]) -> BTreeMap<String, Rational> {
    let mut p: BTreeMap<String, Rational> = names.iter().map(|n| (n.clone(), small(rng))).collect();
    let mut set = |n: &str, v: Rational| {
        p.insert(n.to_string(), v);
    };
    match label {
        "d_3(1:2)" => match rng.gen_range(0..3) {
            0 => set("r", int(0)),
            branch => {
                let s2 = small(rng);
                set("r", nonzero(rng));
                set("t3", int(0));
                set("s1", int(0));
                set("s2", s2.clone());
                set("t2", if branch == 1 { s2 } else { &s2 * int(2) });
            }
        },
        "d_2*" => {
            if rng.gen_bool(0.5) {
                set("r1", int(0))
            } else {
                set("s2", int(0))
            }
        }
        "d_2^#" | "d^#_{2,3}" => set("r", int(0)),
        _ => {}
    }
    p
}

#[test]
fn random_points_on_the_base_give_codifferentials() {
    let cases = [
        (SpaceProfile::Onebar2X0, "d_3(1:1/2)"),
        (SpaceProfile::Onebar2X0, "d_3(1:2)"),
        (SpaceProfile::Onebar2X0, "d_3(0:1)"),
        (SpaceProfile::Onebar2X0, "d_2*"),
        (SpaceProfile::Onebar2X0, "d_2^#"),
        (SpaceProfile::Onebar2X0, "d^#_{2,3}"),
        (SpaceProfile::Onebar2X0, "d_{2,3}(1)"),
        (SpaceProfile::Twobar1_012, "first_kind(3)"),
        (SpaceProfile::Twobar1_012, "second_kind(3)"),
        (SpaceProfile::Twobar1M2m10, "d_2(1:2)"),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (p, label) in cases {
        let (_, mv, cutoff) = catalog(p, label);
        let names = mv.params.names();
        let mut hits = 0;
        while hits < 10 {
            let point = sample(label, &mut rng, &names);
            let Ok(d) = mv.d_infinity.try_map(|c| c.substitute(&point)) else {
                continue; // pole of a correction
            };
            for r in &mv.relations {
                assert!(r.value.substitute(&point).unwrap().is_zero(), "{label}: sampler misses {}", r.mixed);
            }
            assert!(bracket(&d, &d).truncate(cutoff).is_zero(), "{label} at {point:?}");
            hits += 1;
        }
    }
}

#[test]
fn violating_points_are_not_codifferentials() {
    let (_, mv, cutoff) = catalog(SpaceProfile::Onebar2X0, "d_3(1:2)");
    let point: BTreeMap<String, Rational> =
        [("r", int(1)), ("t3", int(1)), ("s1", int(0)), ("s2", int(0)), ("t2", int(0))]
            .iter()
            .map(|(n, v)| (n.to_string(), v.clone()))
            .collect();
    let d = mv.d_infinity.try_map(|c| c.substitute(&point)).unwrap();
    assert!(!bracket(&d, &d).truncate(cutoff).is_zero());
}

#[test]
fn reductions_replay() {
    let sp = GradedSpace::z(&[0, -1, 1]);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 2..=4u32 {
        let base = q(&format!("ps[{},1,0;1] + ps[{},1,1;3]*(1/3)", k - 1, k - 2), &sp);
        for _ in 0..5 {
            // A random degree-0 generator with at least two inputs.
            let mut g = Coderivation::zero(&sp);
            for r in 2..=3u32 {
                for c in enumerate_cochain_basis(&sp, r, 0) {
                    g.add_term(c, small(&mut rng));
                }
            }
            let cutoff = k + 4;
            let d = exp_ad(&g, &base, cutoff).unwrap();
            for red in [standard_form_reduce(&d, cutoff).unwrap(), reduce_filtered(&d, cutoff).unwrap()] {
                assert_eq!(red.replay(&d, cutoff).unwrap(), red.reduced);
                assert_eq!(red.reduced.part(k), base);
            }
            let red = reduce_filtered(&d, cutoff).unwrap();
            assert_eq!(red.reduced, base, "k={k}");
        }
    }
}

#[test]
fn standard_form_examples() {
    let sp = GradedSpace::z(&[0, -1, 1]);
    // A nontrivial second term over d_k(0:1) stays.
    for (k, l) in [(2u32, 3u32), (2, 4), (3, 5)] {
        let d = q(&format!("ps[{},1,1;3] + ps[{},1,0;1]*(-3/2)", k - 2, l - 1), &sp);
        let red = standard_form_reduce(&d, l + 2).unwrap();
        assert_eq!(red.reduced, d);
    }
    // A coboundary second term is pushed past the cutoff.
    let d2 = q("ps[1,1,0;1] + ps[0,1,1;3]*(1/2)", &sp);
    let g = q("ph[2,0,0;1]*3", &sp);
    let d = exp_ad(&g, &d2, 5).unwrap();
    let red = standard_form_reduce(&d, 5).unwrap();
    assert_eq!(red.reduced, d2);
}
