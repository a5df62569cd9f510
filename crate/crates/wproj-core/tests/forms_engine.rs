//! Integration tests of the differential-forms engine on nontrivial maps:
//! chain rule, nilpotency of d, and finite differences against hand
//! Jacobians.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use wproj_core::forms::{
    differential, exterior_derivative, exterior_derivative_one_form, pullback_two_form,
    wirtinger_jacobian, Frame, FramePoint, SmoothMap, TwoForm,
};
use wproj_core::tolerances::{DEFAULT_STEP, SECOND_ORDER_STEP};
use wproj_core::ComplexVec;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn fp(first: &[Complex64], second: &[Complex64]) -> FramePoint {
    FramePoint::new(
        ComplexVec::new(first.to_vec()),
        ComplexVec::new(second.to_vec()),
    )
}

/// (v, w) -> (v^2, v w): polynomial, holomorphic, nonlinear.
fn square_map() -> SmoothMap {
    let frame = Frame::new(1, 1);
    SmoothMap::new(frame, frame, |p: &FramePoint| {
        let v = p.first()[0];
        let w = p.second()[0];
        Ok(fp(&[v * v], &[v * w]))
    })
}

/// The same map with its exact slot Jacobian.
fn square_map_analytic() -> SmoothMap {
    square_map().with_jacobian(move |p: &FramePoint| {
        let v = p.first()[0];
        let w = p.second()[0];
        let z = c(0.0, 0.0);
        let rows = [
            [2.0 * v, z, z, z],
            [z, 2.0 * v.conj(), z, z],
            [w, z, v, z],
            [z, w.conj(), z, v.conj()],
        ];
        Ok(DMatrix::from_fn(4, 4, |r, cidx| rows[r][cidx]))
    })
}

/// A nonholomorphic map mixing conjugates: (v, w) -> (v vbar, w + vbar^2).
fn mixed_map() -> SmoothMap {
    let frame = Frame::new(1, 1);
    SmoothMap::new(frame, frame, |p: &FramePoint| {
        let v = p.first()[0];
        let w = p.second()[0];
        Ok(fp(&[v * v.conj()], &[w + v.conj() * v.conj()]))
    })
}

/// A curved two-form field to pull back: coefficients depend on the point.
fn curved_form(q: &FramePoint) -> wproj_core::error::Result<TwoForm> {
    let frame = q.frame();
    let v = q.first()[0];
    let w = q.second()[0];
    let mut coeff = DMatrix::zeros(4, 4);
    // (v vbar) dv ^ dvbar + Re(w) dv ^ dw + dw ^ dwbar, antisymmetrized.
    let e01 = c(v.norm_sqr(), 0.0);
    let e02 = c(w.re, 0.0);
    let e23 = c(1.0, 0.0);
    coeff[(0, 1)] = e01;
    coeff[(1, 0)] = -e01;
    coeff[(0, 2)] = e02;
    coeff[(2, 0)] = -e02;
    coeff[(2, 3)] = e23;
    coeff[(3, 2)] = -e23;
    TwoForm::new(frame, coeff)
}

#[test]
fn analytic_jacobian_matches_finite_differences() {
    let p = fp(&[c(1.2, -0.7)], &[c(0.4, 0.9)]);
    let exact = wirtinger_jacobian(&square_map_analytic(), &p, DEFAULT_STEP).unwrap();
    let fd = wirtinger_jacobian(&square_map(), &p, DEFAULT_STEP).unwrap();
    let diff = (&exact - &fd).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(diff <= 1e-6, "jacobian mismatch {diff:e}");
}

#[test]
fn pullback_chain_rule() {
    // (g o f)^* omega = f^* (g^* omega) for nonlinear f, g.
    let f = mixed_map();
    let g = square_map();
    let p = fp(&[c(0.8, 0.5)], &[c(-0.6, 1.1)]);
    let composed = SmoothMap::compose(square_map(), mixed_map()).unwrap();
    let lhs = pullback_two_form(&composed, &curved_form, &p, DEFAULT_STEP).unwrap();
    let inner = move |q: &FramePoint| pullback_two_form(&g, &curved_form, q, DEFAULT_STEP);
    let rhs = pullback_two_form(&f, &inner, &p, DEFAULT_STEP).unwrap();
    let rel = lhs.rel_distance(&rhs).unwrap();
    assert!(rel <= 1e-6, "chain rule defect {rel:e}");
}

#[test]
fn pullback_with_exact_jacobians_composes_exactly() {
    let frame = Frame::new(2, 1);
    let a = SmoothMap::block_scaling(frame, c(0.0, 1.0), c(0.0, -1.0));
    let b = SmoothMap::block_scaling(frame, c(0.6, 0.8), c(0.6, -0.8).inv());
    let composed = SmoothMap::compose(b, a).unwrap();
    assert!(composed.has_analytic_jacobian());
    let p = fp(&[c(1.0, 2.0), c(-0.5, 0.3)], &[c(0.7, -0.2)]);
    // dv^0 ^ dvbar^0 + dw ^ dwbar: each pair sees conjugate unit factors,
    // so both scalings preserve it exactly.
    let paired = {
        let mut coeff = DMatrix::zeros(6, 6);
        coeff[(0, 2)] = c(0.0, 0.5);
        coeff[(2, 0)] = c(0.0, -0.5);
        coeff[(4, 5)] = c(0.0, 0.5);
        coeff[(5, 4)] = c(0.0, -0.5);
        TwoForm::new(frame, coeff).unwrap()
    };
    let reference = paired.clone();
    let pulled = pullback_two_form(
        &composed,
        &move |_q: &FramePoint| Ok(paired.clone()),
        &p,
        DEFAULT_STEP,
    )
    .unwrap();
    assert!(pulled.max_abs_diff(&reference).unwrap() <= 1e-14);
}

/// A real-valued but nonholomorphic scalar field.
fn scalar_field(q: &FramePoint) -> wproj_core::error::Result<Complex64> {
    let v = q.first()[0];
    let w = q.second()[0];
    Ok(v * v * w.conj() + c(v.norm_sqr() * w.norm_sqr(), 0.0) + w * w)
}

#[test]
fn d_squared_vanishes_on_scalars() {
    let p = fp(&[c(0.9, -0.4)], &[c(1.3, 0.6)]);
    let ddf = exterior_derivative_one_form(
        &|q: &FramePoint| differential(&scalar_field, q, DEFAULT_STEP),
        &p,
        SECOND_ORDER_STEP,
    )
    .unwrap();
    assert!(ddf.max_abs() <= 1e-5, "d(df) = {:e}", ddf.max_abs());
}

#[test]
fn d_squared_vanishes_on_one_forms_with_curved_coefficients() {
    // alpha = (v vbar w) dv + (w wbar) dwbar, a 1-form with nonconstant
    // coefficients; d(d alpha) must vanish within nested-FD noise.
    let alpha = |q: &FramePoint| {
        let frame = q.frame();
        let v = q.first()[0];
        let w = q.second()[0];
        let mut coeff = DVector::zeros(4);
        coeff[0] = v * v.conj() * w;
        coeff[3] = c(w.norm_sqr(), 0.0);
        wproj_core::forms::OneForm::new(frame, coeff)
    };
    let p = fp(&[c(0.9, -0.4)], &[c(1.3, 0.6)]);
    let d_alpha = move |q: &FramePoint| exterior_derivative_one_form(&alpha, q, DEFAULT_STEP);
    let dd_alpha = exterior_derivative(&d_alpha, &p, SECOND_ORDER_STEP).unwrap();
    assert!(dd_alpha.max_abs() <= 1e-4, "d(d alpha) = {:e}", dd_alpha.max_abs());
}

#[test]
fn constant_form_is_closed_to_machine_precision() {
    let frame = Frame::new(1, 1);
    let constant = {
        let mut coeff = DMatrix::zeros(4, 4);
        coeff[(0, 1)] = c(0.0, 0.5);
        coeff[(1, 0)] = c(0.0, -0.5);
        TwoForm::new(frame, coeff).unwrap()
    };
    let p = fp(&[c(0.3, 0.8)], &[c(-1.1, 0.2)]);
    let d = exterior_derivative(
        &move |_q: &FramePoint| Ok(constant.clone()),
        &p,
        SECOND_ORDER_STEP,
    )
    .unwrap();
    assert!(d.max_abs() <= 1e-12);
}

#[test]
fn pullback_respects_linearity_in_the_form() {
    // f^*(a omega1 + omega2) = a f^*omega1 + f^*omega2, exercised through
    // the FD path on a nonlinear map.
    let p = fp(&[c(1.1, 0.2)], &[c(0.5, -0.9)]);
    let f = mixed_map();
    let second = |q: &FramePoint| {
        let frame = q.frame();
        let v = q.first()[0];
        let mut coeff = DMatrix::zeros(4, 4);
        coeff[(1, 2)] = v;
        coeff[(2, 1)] = -v;
        TwoForm::new(frame, coeff)
    };
    let sum = |q: &FramePoint| {
        let a = curved_form(q)?;
        let b = second(q)?;
        TwoForm::new(a.frame(), a.coeff() * c(2.0, 0.0) + b.coeff())
    };
    let lhs = pullback_two_form(&f, &sum, &p, DEFAULT_STEP).unwrap();
    let p1 = pullback_two_form(&f, &curved_form, &p, DEFAULT_STEP).unwrap();
    let p2 = pullback_two_form(&f, &second, &p, DEFAULT_STEP).unwrap();
    let combined = TwoForm::new(p1.frame(), p1.coeff() * c(2.0, 0.0) + p2.coeff()).unwrap();
    assert!(lhs.max_abs_diff(&combined).unwrap() <= 1e-9);
}
