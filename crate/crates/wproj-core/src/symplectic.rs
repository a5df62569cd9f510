//! The Hamiltonian-reduction pipeline.
//!
//! On the flat space of pairs (v, w) sits the constant Kaehler form
//! omega0 = (i/2)(sum dv^a ^ dvbar^a + alpha sum dw^k ^ dwbar^k) and the
//! circle action (v, w) -> (e^{it} v, e^{-it} w), generated by the vector
//! field X with Hamiltonian H = (|v|^2 - alpha |w|^2)/2, so that
//! iota_X omega0 = -dH. For alpha > 0 every scaling orbit meets the level
//! set {H = beta} in a circle; scaling any point onto that level and pulling
//! omega0 back produces a two-form that descends to the quotient. At
//! alpha = 1, beta = 0 that pullback has the closed form implemented by
//! [`omega_formula`]; the finite-difference pullback [`omega_oracle`] serves
//! as its independent ground truth and covers general beta.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{Frame, FramePoint, SmoothMap, TwoForm, OneForm, VectorFieldValue};
use crate::hvec::{Atlas, ChartCoords, ChartId, HomPoint};

/// The pair (alpha, beta): alpha scales the w-part of the Kaehler form,
/// beta picks the level {H = beta}. alpha must be nonzero for level
/// operations and positive for them to succeed on every point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSpec {
    pub alpha: f64,
    pub beta: f64,
}

impl LevelSpec {
    pub fn new(alpha: f64, beta: f64) -> LevelSpec {
        LevelSpec { alpha, beta }
    }

    /// The reduction the closed-form expression is stated for.
    pub fn standard() -> LevelSpec {
        LevelSpec {
            alpha: 1.0,
            beta: 0.0,
        }
    }
}

/// A frame plus a level choice: everything the reduction operations need.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionContext {
    frame: Frame,
    spec: LevelSpec,
}

impl ReductionContext {
    pub fn new(frame: Frame, spec: LevelSpec) -> Result<ReductionContext> {
        if frame.n() == 0 || frame.m() == 0 {
            return Err(Error::InvalidConfig(format!(
                "reduction frame needs positive block dims, got ({}, {})",
                frame.n(),
                frame.m()
            )));
        }
        Ok(ReductionContext { frame, spec })
    }

    pub fn for_point(p: &HomPoint, spec: LevelSpec) -> ReductionContext {
        // Point blocks are nonempty by construction.
        ReductionContext {
            frame: Frame::new(p.n(), p.m()),
            spec,
        }
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn spec(&self) -> LevelSpec {
        self.spec
    }

    fn check_point(&self, p: &HomPoint) -> Result<()> {
        if p.n() != self.frame.n() || p.m() != self.frame.m() {
            return Err(Error::DimMismatch(format!(
                "point dims ({}, {}) vs context frame ({}, {})",
                p.n(),
                p.m(),
                self.frame.n(),
                self.frame.m()
            )));
        }
        Ok(())
    }
}

/// The constant Kaehler form (i/2)(sum dv^dvbar + alpha sum dw^dwbar).
pub fn omega0(ctx: &ReductionContext) -> TwoForm {
    let frame = ctx.frame();
    let (n, m) = (frame.n(), frame.m());
    let half_i = Complex64::new(0.0, 0.5);
    let alpha_half_i = Complex64::new(0.0, 0.5 * ctx.spec().alpha);
    let mut coeff = DMatrix::zeros(frame.dim(), frame.dim());
    for a in 0..n {
        coeff[(a, n + a)] = half_i;
        coeff[(n + a, a)] = -half_i;
    }
    for k in 0..m {
        coeff[(2 * n + k, 2 * n + m + k)] = alpha_half_i;
        coeff[(2 * n + m + k, 2 * n + k)] = -alpha_half_i;
    }
    TwoForm::new(frame, coeff).expect("constant coefficients are antisymmetric")
}

/// H = (sum |v|^2 - alpha sum |w|^2)/2, the moment map of the circle action.
pub fn hamiltonian(ctx: &ReductionContext, p: &HomPoint) -> Result<f64> {
    ctx.check_point(p)?;
    Ok(0.5 * (p.v().norm_sq() - ctx.spec().alpha * p.w().norm_sq()))
}

/// The exact differential of H at p: (vbar, v, -alpha wbar, -alpha w)/2 in
/// slot order.
pub fn hamiltonian_differential(ctx: &ReductionContext, p: &HomPoint) -> Result<OneForm> {
    ctx.check_point(p)?;
    let alpha = ctx.spec().alpha;
    let mut coeff = Vec::with_capacity(ctx.frame().dim());
    coeff.extend(p.v().iter().map(|z| 0.5 * z.conj()));
    coeff.extend(p.v().iter().map(|z| 0.5 * z));
    coeff.extend(p.w().iter().map(|z| -0.5 * alpha * z.conj()));
    coeff.extend(p.w().iter().map(|z| -0.5 * alpha * z));
    OneForm::new(ctx.frame(), DVector::from_vec(coeff))
}

/// Infinitesimal generator of (v, w) -> (e^{it} v, e^{-it} w): slot
/// components (i v, -i vbar, -i w, i wbar).
pub fn circle_generator(p: &HomPoint) -> VectorFieldValue {
    let i = Complex64::new(0.0, 1.0);
    let first: Vec<Complex64> = p.v().iter().map(|z| i * z).collect();
    let second: Vec<Complex64> = p.w().iter().map(|z| -i * z).collect();
    VectorFieldValue::from_holomorphic(&first, &second)
}

/// Infinitesimal generator of real scaling (v, w) -> (e^s v, e^{-s} w):
/// slot components (v, vbar, -w, -wbar). Together with the circle generator
/// it spans the orbit directions of the full scaling action.
pub fn radial_generator(p: &HomPoint) -> VectorFieldValue {
    let first: Vec<Complex64> = p.v().iter().copied().collect();
    let second: Vec<Complex64> = p.w().iter().map(|z| -z).collect();
    VectorFieldValue::from_holomorphic(&first, &second)
}

/// The time-t circle flow as a map, with its exact (diagonal) Jacobian.
pub fn phase_flow(frame: Frame, t: f64) -> SmoothMap {
    let phase = Complex64::new(0.0, t).exp();
    SmoothMap::block_scaling(frame, phase, phase.inv())
}

/// The scaling action by a fixed lambda as a map with exact Jacobian.
pub fn scaling_action(frame: Frame, lambda: Complex64) -> Result<SmoothMap> {
    let modulus = lambda.norm();
    if modulus <= crate::tolerances::EPS_NONZERO {
        return Err(Error::ZeroScalar { modulus });
    }
    Ok(SmoothMap::block_scaling(frame, lambda, lambda.inv()))
}

/// Intermediate quantities of the level normalization, shared by the value
/// and the Jacobian of the retraction.
struct LevelRoot {
    rho: f64,
    sigma: f64,
    half_disc_sqrt: f64, // sqrt(beta^2 + alpha rho sigma)
    lambda_sq: f64,
    lambda: f64,
}

fn level_root(spec: LevelSpec, rho: f64, sigma: f64) -> Result<LevelRoot> {
    let LevelSpec { alpha, beta } = spec;
    if alpha == 0.0 {
        return Err(Error::DomainViolation(
            "alpha = 0 admits no level normalization".into(),
        ));
    }
    // H(act(lambda, p)) = beta with x = |lambda|^2 reads
    //   rho x^2 - 2 beta x - alpha sigma = 0,
    // whose roots multiply to -alpha sigma / rho: negative for alpha > 0, so
    // exactly one positive root exists there. For alpha < 0 both roots can
    // leave the positive axis; that is the NoRealRoot branch.
    let quarter_disc = beta * beta + alpha * rho * sigma;
    if quarter_disc < 0.0 {
        return Err(Error::NoRealRoot {
            alpha,
            discriminant: 4.0 * quarter_disc,
        });
    }
    let half_disc_sqrt = quarter_disc.sqrt();
    let numerator = beta + half_disc_sqrt;
    if numerator <= 0.0 {
        return Err(Error::NoRealRoot {
            alpha,
            discriminant: 4.0 * quarter_disc,
        });
    }
    let lambda_sq = numerator / rho;
    Ok(LevelRoot {
        rho,
        sigma,
        half_disc_sqrt,
        lambda_sq,
        lambda: lambda_sq.sqrt(),
    })
}

/// The positive scale lambda with H(act(lambda, p)) = beta exactly. For
/// alpha > 0 it exists for every point; for alpha < 0 expect NoRealRoot.
/// At beta = 0 it reduces to (|w|^2 alpha / |v|^2)^{1/4}.
pub fn normalize_to_level(ctx: &ReductionContext, p: &HomPoint) -> Result<f64> {
    ctx.check_point(p)?;
    Ok(level_root(ctx.spec(), p.v().norm_sq(), p.w().norm_sq())?.lambda)
}

/// Slot Jacobian of the retraction at a point, from the closed-form
/// derivatives of lambda(rho, sigma).
fn retraction_jacobian(ctx: ReductionContext, fp: &FramePoint) -> Result<DMatrix<Complex64>> {
    let frame = fp.frame();
    let (n, m) = (frame.n(), frame.m());
    let root = level_root(
        ctx.spec(),
        fp.first().norm_sq(),
        fp.second().norm_sq(),
    )?;
    let alpha = ctx.spec().alpha;
    let LevelRoot {
        rho,
        sigma,
        half_disc_sqrt: d,
        lambda_sq: x,
        lambda: lam,
    } = root;
    // x = (beta + d)/rho with d = sqrt(beta^2 + alpha rho sigma):
    let x_rho = alpha * sigma / (2.0 * d * rho) - x / rho;
    let x_sigma = alpha / (2.0 * d);
    let l_rho = Complex64::new(x_rho / (2.0 * lam), 0.0);
    let l_sigma = Complex64::new(x_sigma / (2.0 * lam), 0.0);
    let lam_c = Complex64::new(lam, 0.0);
    let lam_inv = lam_c.inv();
    let neg_inv_sq = -lam_inv * lam_inv; // d(lambda^{-1}) = -lambda^{-2} d(lambda)
    let v = fp.first();
    let w = fp.second();
    let dim = frame.dim();
    let mut jac = DMatrix::zeros(dim, dim);
    // Holomorphic target rows; rho pulls vbar^b against dv^b and v^b against
    // dvbar^b, sigma likewise in w.
    for a in 0..n {
        let row = a;
        for b in 0..n {
            let delta = if a == b { lam_c } else { Complex64::default() };
            jac[(row, b)] = delta + v[a] * l_rho * v[b].conj();
            jac[(row, n + b)] = v[a] * l_rho * v[b];
        }
        for l in 0..m {
            jac[(row, 2 * n + l)] = v[a] * l_sigma * w[l].conj();
            jac[(row, 2 * n + m + l)] = v[a] * l_sigma * w[l];
        }
    }
    for k in 0..m {
        let row = 2 * n + k;
        for b in 0..n {
            jac[(row, b)] = neg_inv_sq * l_rho * v[b].conj() * w[k];
            jac[(row, n + b)] = neg_inv_sq * l_rho * v[b] * w[k];
        }
        for l in 0..m {
            let delta = if k == l { lam_inv } else { Complex64::default() };
            jac[(row, 2 * n + l)] = delta + neg_inv_sq * l_sigma * w[l].conj() * w[k];
            jac[(row, 2 * n + m + l)] = neg_inv_sq * l_sigma * w[l] * w[k];
        }
    }
    // Conjugate rows mirror holomorphic ones with swapped column blocks.
    for j in 0..frame.complex_dim() {
        let (hr, ar) = (frame.holo_slot(j), frame.anti_slot(j));
        for c in 0..dim {
            jac[(ar, c)] = jac[(hr, frame.conjugate_slot(c))].conj();
        }
    }
    Ok(jac)
}

fn retraction_map(ctx: ReductionContext, analytic: bool) -> SmoothMap {
    let frame = ctx.frame();
    let map = SmoothMap::new(frame, frame, move |fp: &FramePoint| {
        let p = fp.to_point()?;
        let lam = normalize_to_level(&ctx, &p)?;
        let q = p.act(Complex64::new(lam, 0.0))?;
        Ok(FramePoint::from_point(&q))
    });
    if analytic {
        map.with_jacobian(move |fp: &FramePoint| retraction_jacobian(ctx, fp))
    } else {
        map
    }
}

/// The retraction s(p) = act(normalize_to_level(p), p): idempotent, lands on
/// the level set, carries an exact Jacobian.
pub fn retraction(ctx: &ReductionContext) -> SmoothMap {
    retraction_map(*ctx, true)
}

/// The same map without its analytic Jacobian, so pullbacks through it are
/// pure central differences. Used as the independent oracle.
pub fn retraction_fd(ctx: &ReductionContext) -> SmoothMap {
    retraction_map(*ctx, false)
}

/// The closed-form reduced two-form at alpha = 1, beta = 0, expressed in
/// homogeneous coordinates. With rho = |v|^2, sigma = |w|^2 and the
/// contracted 1-forms
///   a1 = sum vbar^a dv^a,  a2 = sum v^a dvbar^a,
///   b1 = sum wbar^k dw^k,  b2 = sum w^k dwbar^k,
/// it reads
///   (i/2) rho^{-3/2} sigma^{-3/2} [ rho sigma^2 sum dv^dvbar
///     + rho^2 sigma sum dw^dwbar - (sigma^2/2) a1^a2 - (rho^2/2) b1^b2
///     + (rho sigma/2) b1^a2 + (rho sigma/2) a1^b2 ].
/// It equals the pullback of omega0 along the retraction; [`omega_oracle`]
/// checks that numerically.
pub fn omega_formula(p: &HomPoint) -> TwoForm {
    let (n, m) = (p.n(), p.m());
    let frame = Frame::new(n, m);
    let dim = frame.dim();
    let rho = p.v().norm_sq();
    let sigma = p.w().norm_sq();

    let mut a1 = DVector::<Complex64>::zeros(dim);
    let mut a2 = DVector::<Complex64>::zeros(dim);
    let mut b1 = DVector::<Complex64>::zeros(dim);
    let mut b2 = DVector::<Complex64>::zeros(dim);
    for a in 0..n {
        a1[a] = p.v()[a].conj();
        a2[n + a] = p.v()[a];
    }
    for k in 0..m {
        b1[2 * n + k] = p.w()[k].conj();
        b2[2 * n + m + k] = p.w()[k];
    }

    let wedge = |u: &DVector<Complex64>, t: &DVector<Complex64>| u * t.transpose() - t * u.transpose();

    let mut coeff = DMatrix::<Complex64>::zeros(dim, dim);
    let c = |x: f64| Complex64::new(x, 0.0);
    for a in 0..n {
        coeff[(a, n + a)] += c(rho * sigma * sigma);
        coeff[(n + a, a)] -= c(rho * sigma * sigma);
    }
    for k in 0..m {
        coeff[(2 * n + k, 2 * n + m + k)] += c(rho * rho * sigma);
        coeff[(2 * n + m + k, 2 * n + k)] -= c(rho * rho * sigma);
    }
    coeff += wedge(&a1, &a2) * c(-0.5 * sigma * sigma);
    coeff += wedge(&b1, &b2) * c(-0.5 * rho * rho);
    coeff += wedge(&b1, &a2) * c(0.5 * rho * sigma);
    coeff += wedge(&a1, &b2) * c(0.5 * rho * sigma);
    coeff *= Complex64::new(0.0, 0.5) * c(rho.powf(-1.5) * sigma.powf(-1.5));
    TwoForm::new(frame, coeff).expect("assembled from wedges, antisymmetric")
}

/// Ground truth for the reduced form: pull omega0 back along the retraction
/// by central differences only. Works for any alpha > 0 and any beta; at
/// the standard level it must agree with [`omega_formula`].
pub fn omega_oracle(ctx: &ReductionContext, p: &HomPoint, h: f64) -> Result<TwoForm> {
    ctx.check_point(p)?;
    if ctx.spec().alpha <= 0.0 {
        return Err(Error::DomainViolation(format!(
            "the reduced form needs alpha > 0, got {}",
            ctx.spec().alpha
        )));
    }
    let s = retraction_fd(ctx);
    let constant = omega0(ctx);
    crate::forms::pullback_two_form(
        &s,
        &move |_q: &FramePoint| Ok(constant.clone()),
        &FramePoint::from_point(p),
        h,
    )
}

/// The frame of a chart's coordinate system: the pivot's two slots are gone.
/// V charts keep blocks (u, fiber), W charts keep (fiber, u).
pub fn chart_frame(chart: ChartId, n: usize, m: usize) -> Frame {
    match chart.atlas {
        Atlas::V => Frame::new(n - 1, m),
        Atlas::W => Frame::new(n, m - 1),
    }
}

/// Chart coordinates as a frame point, in the block order of [`chart_frame`].
pub fn chart_frame_point(c: &ChartCoords) -> FramePoint {
    match c.chart().atlas {
        Atlas::V => FramePoint::new(c.u().clone(), c.fiber().clone()),
        Atlas::W => FramePoint::new(c.fiber().clone(), c.u().clone()),
    }
}

/// Inverse of [`chart_frame_point`] for a known chart.
pub fn chart_coords_from_frame(chart: ChartId, fp: &FramePoint) -> Result<ChartCoords> {
    match chart.atlas {
        Atlas::V => ChartCoords::new(chart, fp.first().clone(), fp.second().clone()),
        Atlas::W => ChartCoords::new(chart, fp.second().clone(), fp.first().clone()),
    }
}

/// The reduced form in one chart: evaluate the homogeneous expression on the
/// pivot-1 representative and delete the pivot's differential and its
/// conjugate. This is the substitution "pivot = 1, d(pivot) = 0".
pub fn omega_in_chart(c: &ChartCoords) -> TwoForm {
    let p = c.to_point();
    let full = omega_formula(&p);
    let (n, m) = (p.n(), p.m());
    let killed = match c.chart().atlas {
        Atlas::V => [c.chart().index, n + c.chart().index],
        Atlas::W => [2 * n + c.chart().index, 2 * n + m + c.chart().index],
    };
    let kept: Vec<usize> = (0..2 * (n + m)).filter(|s| !killed.contains(s)).collect();
    let small = DMatrix::from_fn(kept.len(), kept.len(), |i, j| {
        full.coeff()[(kept[i], kept[j])]
    });
    TwoForm::new(chart_frame(c.chart(), n, m), small)
        .expect("a principal submatrix of an antisymmetric matrix is antisymmetric")
}

/// The transition between two charts as a map between their frames, for
/// pulling chart forms back. Differentiated by central differences; the
/// map is rational, so that is accurate wherever pivots stay away from zero.
pub fn transition_map(from: ChartId, to: ChartId, n: usize, m: usize) -> SmoothMap {
    SmoothMap::new(
        chart_frame(from, n, m),
        chart_frame(to, n, m),
        move |fp: &FramePoint| {
            let coords = chart_coords_from_frame(from, fp)?;
            Ok(chart_frame_point(&coords.transition(to)?))
        },
    )
}
