//! Coboundary matrices and the conjugation identity, compared entrywise
//! against the closed forms with symbolic coefficients and at rational points.

use std::collections::BTreeMap;

use linfty_core::coder::{linear_action, linear_matrix_on_sk, matrix_of_part, LinearAuto};
use linfty_core::cohomology::coboundary_matrix;
use linfty_core::linalg::Matrix;
use linfty_core::scalars::{int, parse_scalar, rat, RatFun, Rational, Scalar};
use linfty_core::space::{parse_cochain, BasisCochain, Coderivation, GradedSpace};

fn f(text: &str) -> RatFun {
    parse_scalar(text).unwrap()
}

fn grid(rows: &[&[String]]) -> Vec<Vec<RatFun>> {
    rows.iter().map(|r| r.iter().map(|e| f(e)).collect()).collect()
}

fn at(v: &RatFun, point: &BTreeMap<String, Rational>) -> Rational {
    v.substitute(point).unwrap()
}

fn points(names: &[&str]) -> Vec<BTreeMap<String, Rational>> {
    let values = [
        [rat(3, 2), int(-2), rat(5, 7), int(4), rat(-1, 3), int(2), rat(7, 5), int(-3), int(5), rat(2, 9), int(3)],
        [int(2), rat(1, 4), int(-3), rat(2, 3), int(5), rat(-4, 5), int(1), rat(3, 8), int(-2), int(7), rat(1, 2)],
        [rat(-5, 3), int(7), rat(1, 6), int(-1), rat(9, 4), int(3), rat(-2, 7), int(6), rat(5, 3), int(-4), int(2)],
    ];
    values
        .iter()
        .map(|vals| names.iter().map(|n| n.to_string()).zip(vals.iter().cloned()).collect())
        .collect()
}

/// rf_equals after moving both sides onto a common parameter list.
fn same(a: &RatFun, b: &RatFun) -> bool {
    let p = a.params().union(b.params());
    a.with_params(&p).unwrap().rf_equals(&b.with_params(&p).unwrap()).unwrap()
}

/// Symbolic equality plus agreement at three rational points.
fn assert_matrix(got: &Matrix<RatFun>, want: &[Vec<RatFun>], names: &[&str]) {
    assert_eq!(got.nrows(), want.len());
    for (i, row) in want.iter().enumerate() {
        assert_eq!(got.ncols(), row.len());
        for (j, w) in row.iter().enumerate() {
            assert!(same(got.get(i, j), w), "entry ({i},{j}): {} vs {}", got.get(i, j), w);
            for p in points(names) {
                assert_eq!(at(got.get(i, j), &p), at(w, &p), "entry ({i},{j}) at {p:?}");
            }
        }
    }
}

fn onebar2() -> GradedSpace {
    GradedSpace::z(&[0, -1, 1])
}

fn labels(sp: &GradedSpace, cs: &[BasisCochain]) -> Vec<String> {
    cs.iter().map(|c| c.label(sp)).collect()
}

#[test]
fn generic_family_coboundary_on_odd_cochains() {
    let sp = onebar2();
    for k in 2..=5u32 {
        let d = parse_cochain(&format!("ps[{},1,0;1]*l + ps[{},1,1;3]*m", k - 1, k - 2), &sp).unwrap();
        for l in 2..=4u32 {
            let m = coboundary_matrix(&d, l, 1).unwrap();
            assert_eq!(
                labels(&sp, &m.cols),
                vec![format!("ps[{},1,0;1]", l - 1), format!("ps[{l},0,0;3]"), format!("ps[{},1,1;3]", l - 2)]
            );
            let want = grid(&[&["0".into(), format!("{l}*l - m"), "0".into()]]);
            assert_matrix(&m.matrix, &want, &["l", "m"]);
        }
    }
}

#[test]
fn generic_family_coboundary_on_even_cochains() {
    let sp = onebar2();
    for k in 2..=5u32 {
        let d = parse_cochain(&format!("ps[{},1,0;1]*l + ps[{},1,1;3]*m", k - 1, k - 2), &sp).unwrap();
        for l in 2..=4u32 {
            let m = coboundary_matrix(&d, l, 0).unwrap();
            let r = k + l - 1;
            assert_eq!(
                labels(&sp, &m.cols),
                vec![
                    format!("ph[{l},0,0;1]"),
                    format!("ph[{},1,1;1]", l - 2),
                    format!("ph[{},1,0;2]", l - 1),
                    format!("ph[{},0,1;3]", l - 1)
                ]
            );
            assert_eq!(
                labels(&sp, &m.rows),
                vec![format!("ps[{},1,0;1]", r - 1), format!("ps[{r},0,0;3]"), format!("ps[{},1,1;3]", r - 2)]
            );
            let (ki, li) = (k as i64, l as i64);
            let want = grid(&[
                &[format!("l*({})", ki - li - 1), "0".into(), "l".into(), "0".into()],
                &["0".into(), "0".into(), "0".into(), "0".into()],
                &[format!("m*({})", ki - 2), "0".into(), "m".into(), format!("-l*({})", li - 1)],
            ]);
            assert_matrix(&m.matrix, &want, &["l", "m"]);
        }
    }
}

#[test]
fn ad_of_the_sharp_term() {
    let sp = onebar2();
    for l in 1..=5u32 {
        let e = parse_cochain(&format!("ps[{l},0,0;3]"), &sp).unwrap();
        for n in 2..=4u32 {
            let even = coboundary_matrix(&e, n, 0).unwrap();
            let want = grid(&[
                &["0".into(), "1".into(), "0".into(), "0".into()],
                &[format!("{l}"), "0".into(), "0".into(), "-1".into()],
                &["0".into(), format!("{l}"), "0".into(), "0".into()],
            ]);
            assert_matrix(&even.matrix, &want, &[]);
            let odd = coboundary_matrix(&e, n, 1).unwrap();
            let want = grid(&[&[format!("{l}"), "0".into(), "-1".into()]]);
            assert_matrix(&odd.matrix, &want, &[]);
        }
    }
}

/// On (-2,0,-1) the printed matrix uses the columns
/// (φ^{0,l-1,1}_3, φ^{0,l,0}_2, -φ^{1,l-1,0}_1).
#[test]
fn m2m10_family_coboundary() {
    let sp = GradedSpace::z(&[-2, 0, -1]);
    for k in 2..=5u32 {
        let d = parse_cochain(&format!("ps[1,{},1;1]*l + ps[0,{},1;2]*m", k - 2, k - 1), &sp).unwrap();
        for l in 2..=4u32 {
            let m = coboundary_matrix(&d, l, 0).unwrap();
            assert_eq!(
                labels(&sp, &m.cols),
                vec![format!("ph[1,{},0;1]", l - 1), format!("ph[0,{l},0;2]"), format!("ph[0,{},1;3]", l - 1)]
            );
            let mut printed = Matrix::zeros(3, 3);
            for i in 0..3 {
                printed.set(i, 0, m.matrix.get(i, 2).clone());
                printed.set(i, 1, m.matrix.get(i, 1).clone());
                printed.set(i, 2, m.matrix.get(i, 0).neg());
            }
            let (ki, li) = (k as i64, l as i64);
            let want = grid(&[
                &["l".into(), format!("l*({})", ki - 2), format!("m*({})", li - 1)],
                &["m".into(), format!("m*({})", ki - li - 1), "0".into()],
                &["0".into(), "0".into(), "0".into()],
            ]);
            assert_matrix(&printed, &want, &["l", "m"]);
        }
    }
}

fn conjugation_case(k: u32) {
    let sp = GradedSpace::z2(&[0, 1, 1]);
    let d: Coderivation<RatFun> = parse_cochain(
        &format!(
            "ps[{a},1,0;1]*a1 + ps[{k},0,0;3]*b1 + ps[{c},1,1;3]*c1 + ps[{a},0,1;1]*a2 + ps[{k},0,0;2]*b2 + ps[{c},1,1;2]*c2",
            a = k - 1,
            c = k - 2
        ),
        &sp,
    )
    .unwrap();
    let g = Matrix::from_rows(grid(&[
        &["q".into(), "0".into(), "0".into()],
        &["0".into(), "r".into(), "s".into()],
        &["0".into(), "t".into(), "u".into()],
    ]));
    let g = LinearAuto::new(&sp, g).unwrap();

    let (words, a) = matrix_of_part(&d, k);
    let col = |e: [u32; 3]| words.iter().position(|w| w.0 == e).unwrap();
    let cols = [col([k, 0, 0]), col([k - 1, 1, 0]), col([k - 1, 0, 1]), col([k - 2, 1, 1])];
    let pick = |m: &Matrix<RatFun>, rows: usize| -> Matrix<RatFun> {
        let mut out = Matrix::zeros(rows, 4);
        for i in 0..rows {
            for (j, &c) in cols.iter().enumerate() {
                out.set(i, j, m.get(i, c).clone());
            }
        }
        out
    };
    // Printed d-matrix: rows e1, e2, e3.
    let fact = |n: u32| (1..=n as i64).product::<i64>();
    let (fk, fk1, fk2) = (fact(k), fact(k - 1), fact(k - 2));
    let want_a = grid(&[
        &["0".into(), format!("{fk1}*a1"), format!("{fk1}*a2"), "0".into()],
        &[format!("{fk}*b2"), "0".into(), "0".into(), format!("{fk2}*c2")],
        &[format!("{fk}*b1"), "0".into(), "0".into(), format!("{fk2}*c1")],
    ]);
    let names = ["a1", "b1", "c1", "a2", "b2", "c2", "q", "r", "s", "t", "u"];
    assert_matrix(&pick(&a, 3), &want_a, &names);

    // Q on the four words.
    let (qwords, q) = linear_matrix_on_sk(&g, k);
    assert_eq!(qwords, words);
    let mut q4 = Matrix::zeros(4, 4);
    for (i, &ri) in cols.iter().enumerate() {
        for (j, &cj) in cols.iter().enumerate() {
            q4.set(i, j, q.get(ri, cj).clone());
        }
    }
    let (k1, k2) = (k - 1, k - 2);
    let want_q = grid(&[
        &[format!("q^{k}"), "0".into(), "0".into(), "0".into()],
        &["0".into(), format!("r*q^{k1}"), format!("s*q^{k1}"), "0".into()],
        &["0".into(), format!("t*q^{k1}"), format!("u*q^{k1}"), "0".into()],
        &["0".into(), "0".into(), "0".into(), format!("(u*r - s*t)*q^{k2}")],
    ]);
    assert_matrix(&q4, &want_q, &names);

    // A' = G⁻¹ A Q, with the factorials of the basis words carried along.
    let moved = linear_action(&g, &d);
    let (_, a2) = matrix_of_part(&moved, k);
    let want_a2 = grid(&[
        &[
            "0".into(),
            format!("{fk1}*q^{k2}*(a1*r + t*a2)"),
            format!("{fk1}*q^{k2}*(s*a1 + a2*u)"),
            "0".into(),
        ],
        &[
            format!("{fk}*(u*b2 - s*b1)*q^{k}/(u*r - s*t)"),
            "0".into(),
            "0".into(),
            format!("{fk2}*q^{k2}*(u*c2 - s*c1)"),
        ],
        &[
            format!("{fk}*(-t*b2 + r*b1)*q^{k}/(u*r - s*t)"),
            "0".into(),
            "0".into(),
            format!("{fk2}*q^{k2}*(-t*c2 + r*c1)"),
        ],
    ]);
    assert_matrix(&pick(&a2, 3), &want_a2, &names);

    // Rational evaluation of the same identity.
    for p in points(&names) {
        let ev = |m: &Matrix<RatFun>| m.map(|x| at(x, &p));
        let gq = ev(g.matrix());
        let lhs = ev(&pick(&a2, 3));
        let rhs = gq.inverse().unwrap().mul(&ev(&pick(&a, 3))).mul(&ev(&q4));
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn conjugation_identity_order_two() {
    conjugation_case(2);
}

#[test]
fn conjugation_identity_order_three() {
    conjugation_case(3);
}

#[test]
fn lower_triangular_maps_preserving_odd_part() {
    // With d in C^k_1, g*(d) stays there exactly when s = 0.
    let sp = GradedSpace::z2(&[0, 1, 1]);
    let d: Coderivation<Rational> = parse_cochain("ps[1,1,0;1]*2 + ps[2,0,0;3]*3 + ps[0,1,1;3]*5", &sp)
        .unwrap()
        .to_rational()
        .unwrap();
    let in_c1 = |c: &Coderivation<Rational>| {
        c.terms()
            .all(|(b, _)| !(b.target == 1 || (b.target == 0 && b.exponents[2] == 1)))
    };
    let map = |s: i64| {
        let m = Matrix::from_rows(vec![
            vec![int(2), int(0), int(0)],
            vec![int(0), int(3), int(s)],
            vec![int(0), int(7), int(1)],
        ]);
        LinearAuto::new(&sp, m).unwrap()
    };
    assert!(in_c1(&linear_action(&map(0), &d)));
    assert!(!in_c1(&linear_action(&map(1), &d)));
}
