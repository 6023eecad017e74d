use crate::linalg::Matrix;
use crate::scalars::Scalar;
use crate::space::{word_exponents, BasisCochain, Coderivation, GradedSpace, Grading};

use super::{factorial_of, CoderError, SymElement, SymWord};

/// Invertible grading-preserving linear map of W; column j is the image of
/// e_j.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearAuto<S: Scalar> {
    space: GradedSpace,
    matrix: Matrix<S>,
    inverse: Matrix<S>,
}

impl<S: Scalar> LinearAuto<S> {
    pub fn new(sp: &GradedSpace, matrix: Matrix<S>) -> Result<Self, CoderError> {
        let n = sp.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(CoderError::Shape { dim: n });
        }
        for i in 0..n {
            for j in 0..n {
                if matrix.get(i, j).is_zero() {
                    continue;
                }
                match sp.mode() {
                    Grading::Z if sp.degree(i) != sp.degree(j) => {
                        return Err(CoderError::NotGraded("degree"))
                    }
                    Grading::Z2 if sp.parity(i) != sp.parity(j) => {
                        return Err(CoderError::NotGraded("parity"))
                    }
                    _ => {}
                }
            }
        }
        let inverse = matrix.inverse().ok_or(CoderError::Singular)?;
        Ok(LinearAuto {
            space: sp.clone(),
            matrix,
            inverse,
        })
    }

    pub fn identity(sp: &GradedSpace) -> Self {
        Self::new(sp, Matrix::identity(sp.dim())).expect("identity")
    }

    pub fn diagonal(sp: &GradedSpace, entries: &[S]) -> Result<Self, CoderError> {
        let n = sp.dim();
        let mut m = Matrix::zeros(n, n);
        for (i, v) in entries.iter().enumerate() {
            m.set(i, i, v.clone());
        }
        Self::new(sp, m)
    }

    /// e_j ↦ e_{perm[j]}.
    pub fn permutation(sp: &GradedSpace, perm: &[usize]) -> Result<Self, CoderError> {
        let n = sp.dim();
        let mut m = Matrix::zeros(n, n);
        for (j, &i) in perm.iter().enumerate() {
            m.set(i, j, S::one());
        }
        Self::new(sp, m)
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn inverse(&self) -> LinearAuto<S> {
        LinearAuto {
            space: self.space.clone(),
            matrix: self.inverse.clone(),
            inverse: self.matrix.clone(),
        }
    }

    /// self ∘ other.
    pub fn compose(&self, other: &LinearAuto<S>) -> LinearAuto<S> {
        LinearAuto {
            space: self.space.clone(),
            matrix: self.matrix.mul(&other.matrix),
            inverse: other.inverse.mul(&self.inverse),
        }
    }

    fn image(&self, j: usize) -> SymElement<S> {
        let mut e = SymElement::zero();
        for i in 0..self.space.dim() {
            let mut w = vec![0; self.space.dim()];
            w[i] = 1;
            e.add_term(SymWord(w), self.matrix.get(i, j).clone());
        }
        e
    }
}

/// Matrix of the multiplicative extension of `g` on S^k(W) in the canonical
/// word basis (columns are images of basis words).
pub fn linear_matrix_on_sk<S: Scalar>(g: &LinearAuto<S>, k: u32) -> (Vec<SymWord>, Matrix<S>) {
    let sp = g.space();
    let words: Vec<SymWord> = word_exponents(sp, k).into_iter().map(SymWord).collect();
    let mut m = Matrix::zeros(words.len(), words.len());
    for (col, w) in words.iter().enumerate() {
        let mut img = SymElement::word(SymWord(vec![0; sp.dim()]));
        for (j, &e) in w.0.iter().enumerate() {
            let gj = g.image(j);
            for _ in 0..e {
                img = img.mul(&gj, sp);
            }
        }
        for (row, v) in words.iter().enumerate() {
            m.set(row, col, img.coeff(v));
        }
    }
    (words, m)
}

/// Matrix of the degree-`k` part of `d` as a map S^k(W) → W: entry (t, w) is
/// the e_t coefficient of d(e^w).
pub fn matrix_of_part<S: Scalar>(d: &Coderivation<S>, k: u32) -> (Vec<SymWord>, Matrix<S>) {
    let sp = d.space();
    let words: Vec<SymWord> = word_exponents(sp, k).into_iter().map(SymWord).collect();
    let mut m = Matrix::zeros(sp.dim(), words.len());
    for (c, v) in d.part(k).terms() {
        let col = words
            .iter()
            .position(|w| w.0 == c.exponents)
            .expect("nonvanishing word");
        m.set(c.target, col, v.scale(&factorial_of(&c.exponents)));
    }
    (words, m)
}

/// Inverse of [`matrix_of_part`].
pub fn part_from_matrix<S: Scalar>(sp: &GradedSpace, words: &[SymWord], m: &Matrix<S>) -> Coderivation<S> {
    let mut d = Coderivation::zero(sp);
    for t in 0..sp.dim() {
        for (col, w) in words.iter().enumerate() {
            let v = m.get(t, col);
            if !v.is_zero() {
                d.add_term(
                    BasisCochain::new(w.0.clone(), t),
                    v.scale(&factorial_of(&w.0).recip()),
                );
            }
        }
    }
    d
}

/// g*(d) = g⁻¹ ∘ d ∘ ĝ, computed degree by degree as A' = G⁻¹ A Q.
pub fn linear_action<S: Scalar>(g: &LinearAuto<S>, d: &Coderivation<S>) -> Coderivation<S> {
    let sp = d.space();
    let mut out = Coderivation::zero(sp);
    for k in d.exterior_degrees() {
        let (words, a) = matrix_of_part(d, k);
        let (_, q) = linear_matrix_on_sk(g, k);
        let a2 = g.inverse.mul(&a).mul(&q);
        out = out.add(&part_from_matrix(sp, &words, &a2));
    }
    out
}
