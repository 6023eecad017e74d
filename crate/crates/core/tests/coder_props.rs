//! Bracket properties, plus an independent oracle that expands words into
//! ordered factor lists and sums over position subsets with explicit
//! permutation signs.

use std::collections::BTreeMap;

use linfty_core::coder::{
    bracket, bracket_via_words, exp_ad, extend_eval, linear_action, LinearAuto, SymWord,
};
use linfty_core::linalg::Matrix;
use linfty_core::scalars::{int, Rational, Scalar};
use linfty_core::space::{
    enumerate_cochain_basis, internal_degrees, word_exponents, BasisCochain, Coderivation,
    GradedSpace,
};
use proptest::prelude::*;

fn spaces() -> Vec<GradedSpace> {
    vec![
        GradedSpace::z(&[0, -1, 1]),
        GradedSpace::z(&[0, 2, 1]),
        GradedSpace::z(&[-2, 0, -1]),
        GradedSpace::z2(&[0, 1, 1]),
        GradedSpace::z2(&[0, 0, 1]),
    ]
}

fn fact(n: u32) -> i64 {
    (1..=n as i64).product()
}

/// Factor list of e^J in canonical order.
fn factors(j: &[u32]) -> Vec<usize> {
    j.iter()
        .enumerate()
        .flat_map(|(i, &e)| std::iter::repeat(i).take(e as usize))
        .collect()
}

/// Sorts a factor sequence by bubble sort, flipping the sign whenever two odd
/// factors are exchanged. `None` if an odd factor repeats.
fn canonicalize(sp: &GradedSpace, seq: &[usize]) -> Option<(i64, Vec<u32>)> {
    let mut v = seq.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                if sp.is_odd(v[j]) && sp.is_odd(v[j + 1]) {
                    sign = -sign;
                }
                v.swap(j, j + 1);
            }
        }
    }
    let mut e = vec![0u32; sp.dim()];
    for &x in &v {
        e[x] += 1;
        if sp.is_odd(x) && e[x] > 1 {
            return None;
        }
    }
    Some((sign, e))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// f̂(e^J) by summing over every choice of input positions.
fn oracle_extend(
    sp: &GradedSpace,
    f: &Coderivation<Rational>,
    j: &[u32],
) -> BTreeMap<Vec<u32>, Rational> {
    let fs = factors(j);
    let mut out: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    let Some(k) = f.order() else { return out };
    for sel in subsets(fs.len(), k as usize) {
        let mut perm: Vec<usize> = sel.clone();
        perm.extend((0..fs.len()).filter(|p| !sel.contains(p)));
        // sign of the reordering, counting only odd-odd inversions
        let mut sign = 1;
        for a in 0..perm.len() {
            for b in a + 1..perm.len() {
                if perm[a] > perm[b] && sp.is_odd(fs[perm[a]]) && sp.is_odd(fs[perm[b]]) {
                    sign = -sign;
                }
            }
        }
        let mut input = vec![0u32; sp.dim()];
        for &p in &sel {
            input[fs[p]] += 1;
        }
        for (c, v) in f.terms() {
            if c.exponents != input {
                continue;
            }
            let weight: i64 = input.iter().map(|&e| fact(e)).product();
            let mut seq = vec![c.target];
            seq.extend(perm[sel.len()..].iter().map(|&p| fs[p]));
            if let Some((s2, w)) = canonicalize(sp, &seq) {
                *out.entry(w).or_insert_with(|| int(0)) += v * int(sign * s2 * weight);
            }
        }
    }
    out.retain(|_, v| !Scalar::is_zero(v));
    out
}

fn oracle_apply(f: &Coderivation<Rational>, x: &BTreeMap<Vec<u32>, Rational>, t: usize) -> Rational {
    let mut acc = int(0);
    for (c, v) in f.terms() {
        if c.target != t {
            continue;
        }
        if let Some(a) = x.get(&c.exponents) {
            let weight: i64 = c.exponents.iter().map(|&e| fact(e)).product();
            acc += a * v * int(weight);
        }
    }
    acc
}

fn oracle_bracket(
    sp: &GradedSpace,
    f: &Coderivation<Rational>,
    g: &Coderivation<Rational>,
) -> Coderivation<Rational> {
    let (k, l) = (f.order().unwrap(), g.order().unwrap());
    let pf = f.parity().unwrap();
    let pg = g.parity().unwrap();
    let sgn = if pf & pg == 1 { -1 } else { 1 };
    let mut out = Coderivation::zero(sp);
    for w in word_exponents(sp, k + l - 1) {
        let a = oracle_extend(sp, g, &w);
        let b = oracle_extend(sp, f, &w);
        let nf: i64 = w.iter().map(|&e| fact(e)).product();
        for t in 0..sp.dim() {
            let v = oracle_apply(f, &a, t) - oracle_apply(g, &b, t) * int(sgn);
            out.add_term(BasisCochain::new(w.clone(), t), v / int(nf));
        }
    }
    out
}

/// Random homogeneous cochain with `r` inputs and grading value index `s_pick`.
fn cochain(sp: &GradedSpace, r: u32, s_pick: usize, coeffs: &[i64]) -> Coderivation<Rational> {
    let ss = internal_degrees(sp, r);
    let s = ss[s_pick % ss.len()];
    let basis = enumerate_cochain_basis(sp, r, s);
    Coderivation::from_terms(
        sp,
        basis.into_iter().zip(coeffs.iter().map(|&c| int(c))),
    )
}

fn spec() -> impl Strategy<Value = (u32, usize, Vec<i64>)> {
    (1u32..=3, 0usize..8, prop::collection::vec(-3i64..=3, 12))
}

fn sign(f: &Coderivation<Rational>, g: &Coderivation<Rational>) -> Rational {
    match (f.parity(), g.parity()) {
        (Some(1), Some(1)) => int(-1),
        _ => int(1),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extension_matches_position_oracle(sp_i in 0usize..5, a in spec(), n in 1u32..=4, wpick in 0usize..64) {
        let sp = &spaces()[sp_i];
        let f = cochain(sp, a.0, a.1, &a.2);
        let words = word_exponents(sp, n);
        let w = &words[wpick % words.len()];
        let got = extend_eval(&f, &SymWord(w.clone()));
        let want = oracle_extend(sp, &f, w);
        let got: BTreeMap<Vec<u32>, Rational> = got.terms().map(|(k, v)| (k.0.clone(), v.clone())).collect();
        prop_assert_eq!(got, want);
    }

    #[test]
    fn bracket_matches_oracle(sp_i in 0usize..5, a in spec(), b in spec()) {
        let sp = &spaces()[sp_i];
        let f = cochain(sp, a.0, a.1, &a.2);
        let g = cochain(sp, b.0, b.1, &b.2);
        prop_assume!(!f.is_zero() && !g.is_zero());
        prop_assume!(f.order().unwrap() + g.order().unwrap() - 1 <= 4);
        let closed = bracket(&f, &g);
        prop_assert_eq!(&closed, &bracket_via_words(&f, &g));
        prop_assert_eq!(&closed, &oracle_bracket(sp, &f, &g));
    }

    #[test]
    fn graded_antisymmetry(sp_i in 0usize..5, a in spec(), b in spec()) {
        let sp = &spaces()[sp_i];
        let f = cochain(sp, a.0, a.1, &a.2);
        let g = cochain(sp, b.0, b.1, &b.2);
        let lhs = bracket(&f, &g);
        let rhs = bracket(&g, &f).scale(&sign(&f, &g)).neg();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bidegree_closure(sp_i in 0usize..3, a in spec(), b in spec()) {
        let sp = &spaces()[sp_i];
        let f = cochain(sp, a.0, a.1, &a.2);
        let g = cochain(sp, b.0, b.1, &b.2);
        prop_assume!(!f.is_zero() && !g.is_zero());
        let (cf, _) = f.terms().next().unwrap();
        let (cg, _) = g.terms().next().unwrap();
        let r = cf.exterior_degree() + cg.exterior_degree() - 1;
        let s = cf.internal_degree(sp) + cg.internal_degree(sp);
        for (c, _) in bracket(&f, &g).terms() {
            prop_assert_eq!(c.exterior_degree(), r);
            prop_assert_eq!(c.internal_degree(sp), s);
        }
    }

    #[test]
    fn jacobi(sp_i in 0usize..5, a in spec(), b in spec(), c in spec()) {
        let sp = &spaces()[sp_i];
        let f = cochain(sp, a.0, a.1, &a.2);
        let g = cochain(sp, b.0, b.1, &b.2);
        let h = cochain(sp, c.0, c.1, &c.2);
        let lhs = bracket(&f, &bracket(&g, &h));
        let rhs = bracket(&bracket(&f, &g), &h)
            .add(&bracket(&g, &bracket(&f, &h)).scale(&sign(&f, &g)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn exp_ad_inverts(coeffs in prop::collection::vec(-3i64..=3, 12), dc in prop::collection::vec(-3i64..=3, 12)) {
        let sp = GradedSpace::z(&[0, -1, 1]);
        let phi = Coderivation::from_terms(&sp, enumerate_cochain_basis(&sp, 2, 0).into_iter().zip(coeffs.iter().map(|&c| int(c))));
        let d = Coderivation::from_terms(&sp, enumerate_cochain_basis(&sp, 2, 1).into_iter().zip(dc.iter().map(|&c| int(c))));
        let there = exp_ad(&phi, &d, 5).unwrap();
        let back = exp_ad(&phi.neg(), &there, 5).unwrap();
        prop_assert_eq!(back, d);
    }

    #[test]
    fn pullback_is_contravariant(p in prop::collection::vec(1i64..=4, 6), a in spec()) {
        let sp = GradedSpace::z2(&[0, 1, 1]);
        let mk = |x: &[i64]| {
            LinearAuto::new(&sp, Matrix::from_rows(vec![
                vec![int(x[0]), int(0), int(0)],
                vec![int(0), int(x[1]), int(x[2])],
                vec![int(0), int(x[3]), int(x[4] + x[1] * x[3] * x[2])],
            ]))
        };
        let (Ok(g), Ok(h)) = (mk(&p[..5]), mk(&[p[5], p[4], p[3], p[2], p[1]])) else {
            return Ok(());
        };
        let d = cochain(&sp, a.0, a.1, &a.2);
        let lhs = linear_action(&g.compose(&h), &d);
        let rhs = linear_action(&h, &linear_action(&g, &d));
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn exp_ad_pushes_coboundary_term_up() {
    // d = d_2 + d_3 with d_3 = -D(γ); one exp(ad) removes it.
    let sp = GradedSpace::z(&[0, -1, 1]);
    let d2 = Coderivation::from_terms(
        &sp,
        [
            (BasisCochain::new(vec![1, 1, 0], 0), int(1)),
            (BasisCochain::new(vec![2, 0, 0], 2), int(3)),
        ],
    );
    let gamma = Coderivation::from_terms(&sp, [(BasisCochain::new(vec![2, 0, 0], 0), int(1))]);
    let d3 = bracket(&d2, &gamma).neg();
    assert!(!d3.is_zero());
    let d = d2.add(&d3);
    let e = exp_ad(&gamma, &d, 6).unwrap();
    assert_eq!(e.part(2), d2);
    assert!(e.part(3).is_zero());
}
