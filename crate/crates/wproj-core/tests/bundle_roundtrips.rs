//! Property tests for the tautological embedding and rank-one splitting.

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use wproj_core::bundle::{decompose_rank1, embed_tautological, project_v, project_w};
use wproj_core::{ComplexVec, Error, HomPoint};

fn entry() -> impl Strategy<Value = Complex64> {
    let part = prop_oneof![-2.0..=-0.1f64, 0.1..=2.0f64];
    (part.clone(), part).prop_map(|(re, im)| Complex64::new(re, im))
}

fn cvec(dim: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = ComplexVec> {
    prop::collection::vec(entry(), dim).prop_map(ComplexVec::new)
}

fn hom_point(
    n: std::ops::RangeInclusive<usize>,
    m: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = HomPoint> {
    (cvec(n), cvec(m)).prop_map(|(v, w)| HomPoint::new(v, w).unwrap())
}

/// Remove u's component along r, then check what is left is not tiny.
fn orthogonalized(u: &ComplexVec, r: &ComplexVec) -> Option<ComplexVec> {
    let dot: Complex64 = (0..u.dim()).map(|i| r[i].conj() * u[i]).sum();
    let nrm: f64 = r.norm_sq();
    let out: Vec<Complex64> = (0..u.dim()).map(|i| u[i] - r[i] * (dot / nrm)).collect();
    let size: f64 = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if size < 0.05 {
        None
    } else {
        Some(ComplexVec::new(out))
    }
}

proptest! {
    /// decompose(embed(p)) recovers the orbit of p.
    #[test]
    fn embedding_roundtrip(p in hom_point(1..=4, 1..=4)) {
        let taut = embed_tautological(&p);
        let recovered = decompose_rank1(&taut.vec, 1e-9).unwrap();
        prop_assert!(p.matrix_distance(&recovered).unwrap() <= 1e-8);
        prop_assert!(p.equivalent(&recovered, 1e-8).unwrap());
    }

    /// The embedded matrix never depends on the representative.
    #[test]
    fn embedding_is_orbit_constant(p in hom_point(1..=3, 1..=3), lam in entry()) {
        let a = embed_tautological(&p);
        let b = embed_tautological(&p.act(lam).unwrap());
        let diff = (&a.vec - &b.vec).norm();
        prop_assert!(diff <= 1e-9 * a.vec.norm().max(1.0));
        prop_assert!(a.base.max_abs_diff(&b.base) <= 1e-9);
    }

    /// Every column of the embedded matrix is a multiple of the base
    /// representative: the fiber lies in (line) x C^m.
    #[test]
    fn fiber_columns_span_the_base_line(p in hom_point(2..=4, 1..=4)) {
        let taut = embed_tautological(&p);
        let v = p.v();
        let vv = v.norm_sq();
        for k in 0..p.m() {
            let col = taut.vec.column(k);
            // Projection coefficient of the column onto v.
            let coeff: Complex64 =
                (0..p.n()).map(|a| v[a].conj() * col[a]).sum::<Complex64>() / vv;
            for a in 0..p.n() {
                prop_assert!((col[a] - v[a] * coeff).norm() <= 1e-10 * col[a].norm().max(1.0));
            }
        }
    }

    /// Two-term sums with orthogonalized factors are honest rank-2 matrices
    /// and must be rejected.
    #[test]
    fn rank_two_rejected(
        v1 in cvec(2..=4),
        w1 in cvec(2..=4),
        raw_v2 in cvec(4..=4),
        raw_w2 in cvec(4..=4),
    ) {
        let n = v1.dim();
        let m = w1.dim();
        let v2 = orthogonalized(&ComplexVec::new(raw_v2.entries()[..n].to_vec()), &v1);
        let w2 = orthogonalized(&ComplexVec::new(raw_w2.entries()[..m].to_vec()), &w1);
        prop_assume!(v2.is_some() && w2.is_some());
        let (v2, w2) = (v2.unwrap(), w2.unwrap());
        let matrix = DMatrix::from_fn(n, m, |a, k| v1[a] * w1[k] + v2[a] * w2[k]);
        let res = decompose_rank1(&matrix, 1e-6);
        prop_assert!(matches!(res, Err(Error::NotRankOne { .. })), "got {res:?}");
    }

    /// A rank-1 matrix with noise below the tolerance still decomposes, and
    /// lands near the original orbit.
    #[test]
    fn near_rank_one_accepted(p in hom_point(2..=3, 2..=3), noise in entry()) {
        let mut matrix = p.canonical_matrix();
        matrix[(0, 0)] += noise * Complex64::new(1e-12, 0.0);
        let recovered = decompose_rank1(&matrix, 1e-6).unwrap();
        prop_assert!(p.matrix_distance(&recovered).unwrap() <= 1e-6);
    }

    /// The two projections return the right lines: scaling-invariant and
    /// proportional to the blocks.
    #[test]
    fn projections_are_lines(p in hom_point(1..=4, 1..=4), lam in entry()) {
        let q = p.act(lam).unwrap();
        prop_assert!(project_v(&p).max_abs_diff(&project_v(&q)) <= 1e-9);
        prop_assert!(project_w(&p).max_abs_diff(&project_w(&q)) <= 1e-9);
    }
}
