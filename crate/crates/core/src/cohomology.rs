//! Coboundary operators D = [d, ·] and cohomology representatives.
//!
//! For a codifferential d = d_k + … + d_L with several terms the coboundary
//! operator is not homogeneous. Cohomology at exterior degree n is then taken
//! on leading terms: H^n = lead(Z ∩ F^n) / lead(B ∩ F^n), where F^n holds the
//! cochains whose terms have at least n inputs. Cocycles are computed
//! modulo terms with more than `cutoff` inputs. For d = d_k this is the usual
//! ker/im quotient.

use thiserror::Error;

use crate::linalg::Matrix;
use crate::scalars::{Rational, Scalar};
use crate::space::{enumerate_cochain_basis, BasisCochain, Coderivation, GradedSpace, Grading};
use crate::coder::bracket;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("[d,d] does not vanish; not a codifferential")]
    NotCodifferential,
    #[error("coboundary matrices need a single-degree codifferential")]
    NotPure,
    #[error("the zero coderivation has no coboundary operator")]
    Zero,
    #[error("cohomology needs numeric coefficients; substitute values for {0}")]
    Symbolic(String),
    #[error("cochain is not homogeneous of one exterior degree and grading")]
    NotHomogeneous,
    #[error("cochain is not a cocycle")]
    NotCocycle,
}

/// Matrix of φ ↦ [d, φ] between standard bases.
#[derive(Debug, Clone)]
pub struct CobMatrix<S: Scalar> {
    pub cols: Vec<BasisCochain>,
    pub rows: Vec<BasisCochain>,
    pub matrix: Matrix<S>,
}

fn shift(sp: &GradedSpace, s: i64, by: i64) -> i64 {
    match sp.mode() {
        Grading::Z => s + by,
        Grading::Z2 => (s + by).rem_euclid(2),
    }
}

/// D: C^l_s → C^{k+l-1}_{s+1} for a pure codifferential d of order k.
pub fn coboundary_matrix<S: Scalar>(
    d: &Coderivation<S>,
    l: u32,
    s: i64,
) -> Result<CobMatrix<S>, CohomologyError> {
    let k = d.order().ok_or(CohomologyError::Zero)?;
    if !d.is_pure() {
        return Err(CohomologyError::NotPure);
    }
    if !bracket(d, d).is_zero() {
        return Err(CohomologyError::NotCodifferential);
    }
    Ok(raw_matrix(d, l, s, k + l - 1))
}

fn raw_matrix<S: Scalar>(d: &Coderivation<S>, l: u32, s: i64, r: u32) -> CobMatrix<S> {
    let sp = d.space();
    let cols = enumerate_cochain_basis(sp, l, s);
    let rows = enumerate_cochain_basis(sp, r, shift(sp, s, 1));
    let mut m = Matrix::zeros(rows.len(), cols.len());
    for (j, c) in cols.iter().enumerate() {
        let img = bracket(d, &Coderivation::basis(sp, c.clone()));
        for (i, rc) in rows.iter().enumerate() {
            m.set(i, j, img.coeff(rc));
        }
    }
    CobMatrix {
        cols,
        rows,
        matrix: m,
    }
}

/// Cohomology data in one bidegree.
#[derive(Debug, Clone)]
pub struct CohomologyBasis {
    pub n: u32,
    pub s: i64,
    pub cutoff: u32,
    /// Standard basis of C^n_s; lead vectors are coordinates in it.
    pub basis: Vec<BasisCochain>,
    /// Cocycles whose leading terms represent a basis of H^n_s.
    pub representatives: Vec<Coderivation<Rational>>,
    /// Pairs (γ, D(γ)) whose images have leading terms spanning the
    /// coboundaries in C^n_s, in reduced echelon form.
    pub coboundaries: Vec<(Coderivation<Rational>, Coderivation<Rational>)>,
    /// Echelon basis of lead(Z ∩ F^n).
    pub cocycle_leads: Vec<Vec<Rational>>,
}

impl CohomologyBasis {
    pub fn dimension(&self) -> usize {
        self.representatives.len()
    }

    pub fn rep_leads(&self) -> Vec<Vec<Rational>> {
        self.representatives
            .iter()
            .map(|r| r.part(self.n).coords(&self.basis))
            .collect()
    }

    pub fn boundary_leads(&self) -> Vec<Vec<Rational>> {
        self.coboundaries
            .iter()
            .map(|(_, img)| img.part(self.n).coords(&self.basis))
            .collect()
    }

    /// Unit vectors completing representatives and coboundary leads to a
    /// basis of C^n_s.
    pub fn complement(&self) -> Vec<Vec<Rational>> {
        let dim = self.basis.len();
        let mut rows = self.rep_leads();
        rows.extend(self.boundary_leads());
        let pivots = if rows.is_empty() {
            vec![]
        } else {
            Matrix::from_rows(rows).rref().pivots
        };
        (0..dim)
            .filter(|c| !pivots.contains(c))
            .map(|c| {
                let mut v = vec![qz(); dim];
                v[c] = qo();
                v
            })
            .collect()
    }

    /// Splits a vector of C^n_s into coordinates along the representatives,
    /// the coboundary leads and the complement.
    pub fn decompose<S: Scalar>(&self, v: &[S]) -> (Vec<S>, Vec<S>, Vec<S>) {
        let reps = self.rep_leads();
        let bnds = self.boundary_leads();
        let comp = self.complement();
        let all: Vec<Vec<Rational>> = reps.iter().chain(&bnds).chain(&comp).cloned().collect();
        let dim = self.basis.len();
        if dim == 0 {
            return (vec![], vec![], vec![]);
        }
        // Columns of `m` are the basis vectors; coordinates are m⁻¹ v.
        let m = Matrix::from_rows(all).transpose();
        let inv = m.inverse().expect("basis of C^n_s");
        let inv_s = inv.map(|x| S::from_rational(x.clone()));
        let coords = inv_s.mul_vec(v);
        let (a, rest) = coords.split_at(reps.len());
        let (b, c) = rest.split_at(bnds.len());
        (a.to_vec(), b.to_vec(), c.to_vec())
    }
}

fn qz() -> Rational {
    <Rational as Scalar>::zero()
}

fn qo() -> Rational {
    <Rational as Scalar>::one()
}

/// Basis of ⊕_{m ∈ degrees} C^m_s, by degree then canonical order.
fn graded_basis(sp: &GradedSpace, degrees: impl Iterator<Item = u32>, s: i64) -> Vec<BasisCochain> {
    degrees.flat_map(|m| enumerate_cochain_basis(sp, m, s)).collect()
}

/// Rows `[lead | tail]` reduced to echelon form; returns only rows with a
/// nonzero lead part. The lead parts form the reduced echelon basis of the
/// span of the input leads.
fn augmented_leads(rows: Vec<Vec<Rational>>, lead_len: usize) -> Vec<Vec<Rational>> {
    if rows.is_empty() || lead_len == 0 {
        return vec![];
    }
    let red = Matrix::from_rows(rows).rref();
    red.pivots
        .iter()
        .enumerate()
        .filter(|(_, &p)| p < lead_len)
        .map(|(i, _)| red.matrix.row(i).to_vec())
        .collect()
}

fn numeric_order(d: &Coderivation<Rational>) -> Result<(u32, u32), CohomologyError> {
    let k = d.order().ok_or(CohomologyError::Zero)?;
    let l = d.max_exterior_degree().unwrap_or(k);
    Ok((k, l))
}

/// Default truncation used when none is given: n for a single-degree d,
/// larger when d has higher terms.
pub fn default_cutoff(d: &Coderivation<Rational>, n: u32) -> u32 {
    match (d.order(), d.max_exterior_degree()) {
        (Some(k), Some(l)) => n + 3 * (l - k),
        _ => n,
    }
}

pub fn cohomology_basis(
    d: &Coderivation<Rational>,
    n: u32,
    s: i64,
) -> Result<CohomologyBasis, CohomologyError> {
    cohomology_basis_with_cutoff(d, n, s, default_cutoff(d, n))
}

/// Symbolic front door: rejects coefficients that are not constants.
pub fn cohomology_basis_symbolic(
    d: &Coderivation<crate::scalars::RatFun>,
    n: u32,
    s: i64,
) -> Result<CohomologyBasis, CohomologyError> {
    let q = d
        .to_rational()
        .ok_or_else(|| CohomologyError::Symbolic(d.used_names().join(", ")))?;
    cohomology_basis(&q, n, s)
}

pub fn cohomology_basis_with_cutoff(
    d: &Coderivation<Rational>,
    n: u32,
    s: i64,
    cutoff: u32,
) -> Result<CohomologyBasis, CohomologyError> {
    let (k, _) = numeric_order(d)?;
    if !bracket(d, d).is_zero() {
        return Err(CohomologyError::NotCodifferential);
    }
    let sp = d.space();
    let cutoff = cutoff.max(n);
    let basis = enumerate_cochain_basis(sp, n, s);
    let nb = basis.len();

    // Z ∩ F^n: c in degrees n..=cutoff with D(c) vanishing through cutoff+k-1.
    let zdom = graded_basis(sp, n..=cutoff, s);
    let zcod = graded_basis(sp, (n + k - 1)..=(cutoff + k - 1), shift(sp, s, 1));
    let zmap = image_matrix(d, &zdom, &zcod, cutoff + k - 1);
    let zrows = augmented_leads(zmap.kernel(), nb);
    let cocycle_leads: Vec<Vec<Rational>> = zrows.iter().map(|r| r[..nb].to_vec()).collect();

    let coboundaries = filtered_boundaries(d, n, s, 1, cutoff)
        .into_iter()
        .map(|b| (b.preimage, b.image))
        .collect::<Vec<_>>();

    // Representatives: cocycle leads reduced modulo boundary leads.
    let bleads: Vec<Vec<Rational>> = coboundaries
        .iter()
        .map(|(_, img)| img.part(n).coords(&basis))
        .collect();
    let reduced: Vec<Vec<Rational>> = if bleads.is_empty() {
        cocycle_leads.clone()
    } else {
        let rb = Matrix::from_rows(bleads).rref();
        cocycle_leads.iter().map(|v| rb.reduce(v)).collect()
    };
    let mut representatives = Vec::new();
    if !reduced.is_empty() && nb > 0 {
        let red = Matrix::from_rows(reduced).rref();
        let zpiv: Vec<usize> = zrows
            .iter()
            .map(|r| r.iter().position(|x| !Scalar::is_zero(x)).expect("nonzero"))
            .collect();
        for i in 0..red.rank() {
            let lead = red.matrix.row(i);
            // Lift through the echelon cocycle rows: coefficient of row j is
            // the lead's entry at that row's pivot.
            let mut full = vec![qz(); zdom.len()];
            for (j, zr) in zrows.iter().enumerate() {
                let a = &lead[zpiv[j]];
                if Scalar::is_zero(a) {
                    continue;
                }
                for (f, z) in full.iter_mut().zip(zr) {
                    *f += a * z;
                }
            }
            representatives.push(Coderivation::from_coords(sp, &zdom, &full));
        }
    }

    Ok(CohomologyBasis {
        n,
        s,
        cutoff,
        basis,
        representatives,
        coboundaries,
        cocycle_leads,
    })
}

/// A generator x with D(x) vanishing below exterior degree n.
#[derive(Debug, Clone)]
pub struct Boundary {
    pub preimage: Coderivation<Rational>,
    /// D(preimage), dropping terms with more than `cutoff` inputs.
    pub image: Coderivation<Rational>,
}

/// Generators x with terms in exterior degrees `min_deg..=n-k+1` and
/// D(x) vanishing below n, chosen so that the degree-n parts of the images
/// are independent and span lead(B ∩ F^n). Each preimage is scaled so that
/// its first nonzero coefficient (by degree, then canonical order) is 1.
pub fn filtered_boundaries(
    d: &Coderivation<Rational>,
    n: u32,
    s: i64,
    min_deg: u32,
    cutoff: u32,
) -> Vec<Boundary> {
    let sp = d.space();
    let Some(k) = d.order() else { return vec![] };
    if n < k || min_deg > n + 1 - k {
        return vec![];
    }
    let basis = enumerate_cochain_basis(sp, n, s);
    let nb = basis.len();
    let xdom = graded_basis(sp, min_deg..=(n + 1 - k), shift(sp, s, -1));
    let low = graded_basis(sp, k..n, s);
    let ker = if low.is_empty() {
        identity_rows(xdom.len())
    } else {
        image_matrix(d, &xdom, &low, n - 1).kernel()
    };
    let mut rows = Vec::new();
    for x in ker {
        let xc = Coderivation::from_coords(sp, &xdom, &x);
        let mut row = bracket(d, &xc).part(n).coords(&basis);
        row.extend(x);
        rows.push(row);
    }
    augmented_leads(rows, nb)
        .into_iter()
        .map(|row| {
            let x = &row[nb..];
            let first = x.iter().find(|v| !Scalar::is_zero(*v)).cloned().unwrap_or_else(qo);
            let x: Vec<Rational> = x.iter().map(|v| v / &first).collect();
            let pre = Coderivation::from_coords(sp, &xdom, &x);
            let image = bracket(d, &pre).truncate(cutoff);
            Boundary {
                preimage: pre,
                image,
            }
        })
        .collect()
}

fn identity_rows(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { qo() } else { qz() })
                .collect()
        })
        .collect()
}

/// Matrix of x ↦ [d, x] restricted to the codomain basis, dropping terms with
/// more than `max_r` inputs.
fn image_matrix(
    d: &Coderivation<Rational>,
    dom: &[BasisCochain],
    cod: &[BasisCochain],
    max_r: u32,
) -> Matrix<Rational> {
    let sp = d.space();
    let mut m = Matrix::zeros(cod.len(), dom.len());
    for (j, c) in dom.iter().enumerate() {
        let img = bracket(d, &Coderivation::basis(sp, c.clone())).truncate(max_r);
        for (i, rc) in cod.iter().enumerate() {
            m.set(i, j, img.coeff(rc));
        }
    }
    m
}

/// Preimage γ with lead(D(γ)) = c, or `None` when the leading cocycle `c`
/// is not a coboundary. For single-degree d this is D(γ) = c exactly.
pub fn is_coboundary(
    d: &Coderivation<Rational>,
    c: &Coderivation<Rational>,
) -> Result<Option<Coderivation<Rational>>, CohomologyError> {
    let sp = d.space();
    let (k, _) = numeric_order(d)?;
    if c.is_zero() {
        return Ok(Some(Coderivation::zero(sp)));
    }
    let n = c.order().expect("nonzero");
    let s = {
        let (bc, _) = c.terms().next().expect("nonzero");
        match sp.mode() {
            Grading::Z => bc.internal_degree(sp),
            Grading::Z2 => bc.parity(sp) as i64,
        }
    };
    let basis = enumerate_cochain_basis(sp, n, s);
    if !c.is_pure() || !c.outside(&basis).is_zero() {
        return Err(CohomologyError::NotHomogeneous);
    }
    if !bracket(&d.leading(), c).is_zero() {
        return Err(CohomologyError::NotCocycle);
    }
    if n < k {
        return Ok(None);
    }
    let xs = shift(sp, s, -1);
    let xdom = graded_basis(sp, 1..=(n + 1 - k), xs);
    let cod = graded_basis(sp, k..=n, s);
    let m = image_matrix(d, &xdom, &cod, n);
    let target = c.coords(&cod);
    Ok(m.solve(&target)
        .map(|x| Coderivation::from_coords(sp, &xdom, &x)))
}

/// Dimensions of H^n_s for n in a range.
pub fn cohomology_dimensions(
    d: &Coderivation<Rational>,
    ns: impl Iterator<Item = u32>,
    s: i64,
) -> Result<Vec<(u32, usize)>, CohomologyError> {
    ns.map(|n| cohomology_basis(d, n, s).map(|h| (n, h.dimension())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{int, rat};
    use crate::space::parse_cochain;

    fn q(text: &str, sp: &GradedSpace) -> Coderivation<Rational> {
        parse_cochain(text, sp).unwrap().to_rational().unwrap()
    }

    #[test]
    fn generic_table_order_three() {
        let sp = GradedSpace::z(&[0, -1, 1]);
        let d = q("ps[2,1,0;1] + ps[1,1,1;3]*(1/2)", &sp);
        let dims: Vec<usize> = (1..=5).map(|n| cohomology_basis(&d, n, 1).unwrap().dimension()).collect();
        assert_eq!(dims, vec![1, 2, 1, 0, 0]);
    }

    #[test]
    fn not_a_coboundary_at_order() {
        let sp = GradedSpace::z(&[0, -1, 1]);
        let d = q("ps[2,1,0;1] + ps[1,1,1;3]*(1/2)", &sp);
        let c = q("ps[2,1,0;1]", &sp);
        assert_eq!(is_coboundary(&d, &c).unwrap(), None);
        assert_eq!(
            is_coboundary(&d, &Coderivation::zero(&sp)).unwrap(),
            Some(Coderivation::zero(&sp))
        );
    }

    #[test]
    fn symbolic_rejected() {
        let sp = GradedSpace::z(&[0, -1, 1]);
        let d = parse_cochain("ps[2,1,0;1]*l", &sp).unwrap();
        assert!(matches!(
            cohomology_basis_symbolic(&d, 2, 1),
            Err(CohomologyError::Symbolic(_))
        ));
        let _ = (int(0), rat(1, 2));
    }
}
