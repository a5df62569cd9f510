//! The two fibrations over ordinary projective spaces and the rank-one
//! matrix picture of the total space.
//!
//! A point [v, w] projects to the line through v and to the line through w;
//! both are constant on orbits because scaling moves v and w inside their
//! lines. Sending [v, w] to the outer product v (x) w identifies the
//! quotient with the nonzero rank-one n x m matrices, and the dominant
//! singular pair inverts that identification.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hvec::{ComplexVec, HomPoint};
use crate::tolerances::EPS_NONZERO;

/// A point of a projective space by its canonical representative: unit
/// Hermitian norm, first nonzero component rotated to the positive real
/// axis. Line equality becomes componentwise comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjPoint {
    rep: ComplexVec,
}

impl ProjPoint {
    /// Normalize a nonzero vector onto its canonical representative.
    pub fn from_vector(vec: &ComplexVec) -> Result<ProjPoint> {
        let pivot = vec
            .iter()
            .find(|z| z.norm() > EPS_NONZERO)
            .ok_or_else(|| {
                Error::DomainViolation(format!(
                    "cannot projectivize a numerically zero vector (max modulus {:e})",
                    vec.max_modulus()
                ))
            })?;
        // Dividing by pivot/|pivot| rotates the pivot onto the positive real
        // axis; dividing by the norm afterwards fixes the scale.
        let phase = pivot / pivot.norm();
        let norm = vec.norm_sq().sqrt();
        let scale = (phase * norm).inv();
        Ok(ProjPoint {
            rep: vec.scaled(scale),
        })
    }

    pub fn rep(&self) -> &ComplexVec {
        &self.rep
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    pub fn max_abs_diff(&self, other: &ProjPoint) -> f64 {
        self.rep.max_abs_diff(&other.rep)
    }
}

/// A rank-one matrix tagged with the line its columns live on.
#[derive(Debug, Clone)]
pub struct TautVector {
    pub base: ProjPoint,
    pub vec: DMatrix<Complex64>,
}

/// The line through the first block. Constant on orbits.
pub fn project_v(p: &HomPoint) -> ProjPoint {
    ProjPoint::from_vector(p.v()).expect("point blocks are nonzero by construction")
}

/// The line through the second block. Constant on orbits.
pub fn project_w(p: &HomPoint) -> ProjPoint {
    ProjPoint::from_vector(p.w()).expect("point blocks are nonzero by construction")
}

/// The rank-one picture of a point: its base line in P(V) together with the
/// canonical matrix, whose columns all lie on that line.
pub fn embed_tautological(p: &HomPoint) -> TautVector {
    TautVector {
        base: project_v(p),
        vec: p.canonical_matrix(),
    }
}

/// Upper bound on power-iteration sweeps; near-rank-one input converges in
/// one or two.
const POWER_STEPS: usize = 100;

/// Iterate displacement below which the dominant eigenvector has settled.
const POWER_SETTLED: f64 = 1e-15;

/// Invert the rank-one picture: recover a point whose canonical matrix is M,
/// unique up to the scaling action. The dominant singular pair is found by
/// power iteration on M^H M; the accept test bounds the relative Frobenius
/// distance between M and the recovered factorization, so acceptance itself
/// guarantees the reconstruction accuracy. By Eckart-Young that distance is
/// at least sigma2/sigma1, so a matrix that is genuinely not rank one is
/// always rejected even if the iteration has not converged.
pub fn decompose_rank1(m: &DMatrix<Complex64>, rtol: f64) -> Result<HomPoint> {
    let max_modulus = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max_modulus <= EPS_NONZERO {
        return Err(Error::ZeroMatrix { max_modulus });
    }
    let gram = m.adjoint() * m;
    // Start from the conjugate of the largest row: every row of a
    // near-rank-one matrix is nearly parallel to the dominant right
    // singular vector, so the starting overlap cannot be small.
    let start = (0..m.nrows())
        .max_by(|&a, &b| {
            m.row(a)
                .norm()
                .partial_cmp(&m.row(b).norm())
                .expect("row norms are finite")
        })
        .expect("nonzero matrix has a row");
    let mut y: DVector<Complex64> = m.row(start).adjoint();
    y /= Complex64::from(y.norm());
    for _ in 0..POWER_STEPS {
        let mut next = &gram * &y;
        let norm = next.norm();
        if norm <= 0.0 {
            break; // annihilated; the residual test below rejects
        }
        next /= Complex64::from(norm);
        let step = (&next - &y).norm();
        y = next;
        if step <= POWER_SETTLED {
            break;
        }
    }
    let image = m * &y;
    let s1 = image.norm();
    let u1 = image / Complex64::from(s1);
    let residual = m - &u1 * y.adjoint() * Complex64::from(s1);
    let ratio = residual.norm() / s1;
    // NaN-safe: anything that fails to certify closeness is rejected.
    if ratio.is_nan() || ratio > rtol {
        return Err(Error::NotRankOne { ratio, rtol });
    }
    // M = s1 * u1 * y^H within ratio, so (v, w) = (u1, s1 conj(y))
    // reproduces M entrywise: v^a w^k = s1 u1[a] conj(y[k]).
    let w: Vec<Complex64> = y.iter().map(|z| Complex64::from(s1) * z.conj()).collect();
    HomPoint::new(
        ComplexVec::new(u1.iter().copied().collect()),
        ComplexVec::new(w),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn point(v: &[Complex64], w: &[Complex64]) -> HomPoint {
        HomPoint::new(ComplexVec::new(v.to_vec()), ComplexVec::new(w.to_vec())).unwrap()
    }

    #[test]
    fn projection_normalizes_scale() {
        let p = point(&[c(2.0, 0.0), c(0.0, 0.0)], &[c(1.0, 0.0)]);
        let line = project_v(&p);
        assert!(line.rep().max_abs_diff(&ComplexVec::from_reals(&[1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn projection_rotates_phase_away() {
        let p = point(&[c(0.0, 0.0), c(0.0, 3.0)], &[c(1.0, 0.0)]);
        let line = project_v(&p);
        assert!(line.rep().max_abs_diff(&ComplexVec::from_reals(&[0.0, 1.0])) < 1e-15);

        let q = point(&[c(1.0, 0.0)], &[c(0.0, 0.0), c(-2.0, 0.0)]);
        let line_w = project_w(&q);
        assert!(line_w.rep().max_abs_diff(&ComplexVec::from_reals(&[0.0, 1.0])) < 1e-15);
    }

    #[test]
    fn projections_are_orbit_invariant() {
        let p = point(&[c(0.5, -1.2), c(0.8, 0.3)], &[c(1.4, 0.2), c(-0.6, 0.9)]);
        let lam = c(0.7, -1.1);
        let q = p.act(lam).unwrap();
        assert!(project_v(&p).max_abs_diff(&project_v(&q)) < 1e-12);
        assert!(project_w(&p).max_abs_diff(&project_w(&q)) < 1e-12);
    }

    #[test]
    fn embedding_carries_the_canonical_matrix() {
        let p = point(&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(3.0, 0.0)]);
        let t = embed_tautological(&p);
        assert_eq!(t.vec[(0, 1)], c(3.0, 0.0));
        assert_eq!(t.vec[(1, 1)], c(0.0, 0.0));
        assert!(t.base.rep().max_abs_diff(&ComplexVec::from_reals(&[1.0, 0.0])) < 1e-15);

        let single = point(&[c(2.0, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0)]);
        let ts = embed_tautological(&single);
        assert_eq!(ts.vec[(0, 0)], c(2.0, 0.0));
        assert_eq!(ts.vec[(0, 1)], c(2.0, 0.0));
        assert!(ts.base.rep().max_abs_diff(&ComplexVec::from_reals(&[1.0])) < 1e-15);
    }

    #[test]
    fn embedding_is_orbit_invariant() {
        let p = point(&[c(0.9, 0.4)], &[c(-1.3, 0.7), c(0.2, 0.5)]);
        let q = p.act(c(1.7, -0.3)).unwrap();
        let (tp, tq) = (embed_tautological(&p), embed_tautological(&q));
        assert!((tp.vec - tq.vec).norm() < 1e-14);
        assert!(tp.base.max_abs_diff(&tq.base) < 1e-14);
    }

    #[test]
    fn decompose_inverts_the_embedding() {
        let m = DMatrix::from_row_slice(2, 1, &[c(3.0, 0.0), c(6.0, 0.0)]);
        let p = decompose_rank1(&m, 1e-9).unwrap();
        let expect = point(&[c(1.0, 0.0), c(2.0, 0.0)], &[c(3.0, 0.0)]);
        assert!(p.equivalent(&expect, 1e-10).unwrap());

        let m2 = DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        );
        let p2 = decompose_rank1(&m2, 1e-9).unwrap();
        let expect2 = point(&[c(1.0, 0.0), c(0.0, 0.0)], &[c(0.0, 0.0), c(3.0, 0.0)]);
        assert!(p2.equivalent(&expect2, 1e-10).unwrap());
    }

    #[test]
    fn decompose_rejects_rank_two() {
        let eye = DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        );
        assert!(matches!(
            decompose_rank1(&eye, 1e-9),
            Err(Error::NotRankOne { .. })
        ));
    }

    #[test]
    fn decompose_rejects_zero() {
        let z = DMatrix::from_element(2, 2, c(0.0, 0.0));
        assert!(matches!(
            decompose_rank1(&z, 1e-9),
            Err(Error::ZeroMatrix { .. })
        ));
    }

    #[test]
    fn tiny_off_rank_perturbation_is_absorbed() {
        // A near-rank-one matrix on which bidiagonalization-based
        // factorization loses four digits; the power iteration must not.
        let p = point(
            &[
                c(-1.939042794751613, -0.47088462045214347),
                c(-1.0700432475726231, -1.7434674549757654),
            ],
            &[c(-0.1, -1.0541606325333512), c(-0.1, -0.1)],
        );
        let mut m = p.canonical_matrix();
        m[(0, 0)] += c(-1.9880200331382516, -0.8941335964847249) * 1e-12;
        let recovered = decompose_rank1(&m, 1e-6).unwrap();
        assert!(p.matrix_distance(&recovered).unwrap() <= 1e-9);
    }

    #[test]
    fn roundtrip_through_the_matrix_picture() {
        let p = point(
            &[c(0.4, -0.9), c(1.3, 0.2), c(-0.5, 0.6)],
            &[c(0.8, 0.8), c(-1.1, 0.3)],
        );
        let back = decompose_rank1(&p.canonical_matrix(), 1e-9).unwrap();
        assert!(p.equivalent(&back, 1e-10).unwrap());
    }
}
