//! A small numerical exterior-calculus engine in Wirtinger coordinates.
//!
//! Every object lives over a [`Frame`]: two holomorphic blocks of sizes n and
//! m together with their conjugates, in the fixed slot order
//! (dz1_1..dz1_n, dz1bar_1..dz1bar_n, dz2_1..dz2_m, dz2bar_1..dz2bar_m),
//! N = 2(n+m) slots total. Derivatives are Wirtinger derivatives,
//! d/dz = (d/dx - i d/dy)/2 and d/dzbar = (d/dx + i d/dy)/2, realized by
//! central differences in the underlying real coordinates. Maps are assumed
//! to commute with conjugation (real maps in complex notation), so barred
//! rows of a Jacobian are conjugated copies of unbarred ones.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hvec::{ComplexVec, HomPoint};
use crate::tolerances::MIN_STEP;

/// Block sizes of a coordinate system; slot count is 2(n+m). Zero-size
/// blocks occur in chart frames over one-dimensional factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frame {
    n: usize,
    m: usize,
}

impl Frame {
    pub fn new(n: usize, m: usize) -> Frame {
        Frame { n, m }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Total slot count including conjugates.
    pub fn dim(&self) -> usize {
        2 * (self.n + self.m)
    }

    /// Number of independent complex coordinates, n + m.
    pub fn complex_dim(&self) -> usize {
        self.n + self.m
    }

    /// Slot of the holomorphic differential of complex coordinate j.
    pub fn holo_slot(&self, j: usize) -> usize {
        debug_assert!(j < self.complex_dim());
        if j < self.n {
            j
        } else {
            self.n + j
        }
    }

    /// Slot of the conjugate differential of complex coordinate j.
    pub fn anti_slot(&self, j: usize) -> usize {
        self.holo_slot(j) + if j < self.n { self.n } else { self.m }
    }

    /// The conjugation involution on slots.
    pub fn conjugate_slot(&self, mu: usize) -> usize {
        debug_assert!(mu < self.dim());
        if mu < self.n {
            mu + self.n
        } else if mu < 2 * self.n {
            mu - self.n
        } else if mu < 2 * self.n + self.m {
            mu + self.m
        } else {
            mu - self.m
        }
    }

    /// True for slots in a conjugate block.
    pub fn is_barred(&self, mu: usize) -> bool {
        (self.n..2 * self.n).contains(&mu) || mu >= 2 * self.n + self.m
    }

    /// Complex coordinate index underlying a slot.
    pub fn complex_index(&self, mu: usize) -> usize {
        if mu < 2 * self.n {
            mu % self.n.max(1)
        } else {
            self.n + (mu - 2 * self.n) % self.m.max(1)
        }
    }

    fn require_eq(self, other: Frame, what: &str) -> Result<()> {
        if self != other {
            return Err(Error::FrameMismatch(format!(
                "{what}: ({}, {}) vs ({}, {})",
                self.n, self.m, other.n, other.m
            )));
        }
        Ok(())
    }
}

/// A point expressed by its two holomorphic blocks; conjugate coordinates
/// are implied. Unlike a homogeneous point, no nonzero-ness is required.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePoint {
    first: ComplexVec,
    second: ComplexVec,
}

impl FramePoint {
    pub fn new(first: ComplexVec, second: ComplexVec) -> FramePoint {
        FramePoint { first, second }
    }

    pub fn from_point(p: &HomPoint) -> FramePoint {
        FramePoint {
            first: p.v().clone(),
            second: p.w().clone(),
        }
    }

    /// Back to a homogeneous point; fails if a block degenerated to zero.
    pub fn to_point(&self) -> Result<HomPoint> {
        HomPoint::new(self.first.clone(), self.second.clone())
    }

    pub fn frame(&self) -> Frame {
        Frame::new(self.first.dim(), self.second.dim())
    }

    pub fn first(&self) -> &ComplexVec {
        &self.first
    }

    pub fn second(&self) -> &ComplexVec {
        &self.second
    }

    /// The j-th complex coordinate, running over the first block then the
    /// second.
    pub fn complex_coord(&self, j: usize) -> Complex64 {
        let n = self.first.dim();
        if j < n {
            self.first[j]
        } else {
            self.second[j - n]
        }
    }

    /// Copy with `delta` added to complex coordinate j.
    pub fn with_offset(&self, j: usize, delta: Complex64) -> FramePoint {
        let n = self.first.dim();
        let mut first: Vec<Complex64> = self.first.entries().to_vec();
        let mut second: Vec<Complex64> = self.second.entries().to_vec();
        if j < n {
            first[j] += delta;
        } else {
            second[j - n] += delta;
        }
        FramePoint {
            first: ComplexVec::new(first),
            second: ComplexVec::new(second),
        }
    }

    /// The full slot vector (z1, z1bar, z2, z2bar) of length frame().dim().
    pub fn frame_vector(&self) -> DVector<Complex64> {
        let mut out = Vec::with_capacity(self.frame().dim());
        out.extend(self.first.iter().copied());
        out.extend(self.first.iter().map(|z| z.conj()));
        out.extend(self.second.iter().copied());
        out.extend(self.second.iter().map(|z| z.conj()));
        DVector::from_vec(out)
    }

    /// Holomorphic coordinates only, length frame().complex_dim().
    pub fn holomorphic_vector(&self) -> DVector<Complex64> {
        let mut out = Vec::with_capacity(self.frame().complex_dim());
        out.extend(self.first.iter().copied());
        out.extend(self.second.iter().copied());
        DVector::from_vec(out)
    }

    pub fn max_abs_diff(&self, other: &FramePoint) -> f64 {
        self.first
            .max_abs_diff(&other.first)
            .max(self.second.max_abs_diff(&other.second))
    }
}

type EvalFn = dyn Fn(&FramePoint) -> Result<FramePoint> + Send + Sync;
type JacobianFn = dyn Fn(&FramePoint) -> Result<DMatrix<Complex64>> + Send + Sync;

/// An evaluable map between frame domains. The evaluator must commute with
/// conjugation of blocks; everything downstream relies on that symmetry.
/// An analytic Jacobian is optional; absent one, derivatives fall back to
/// central differences.
pub struct SmoothMap {
    domain: Frame,
    codomain: Frame,
    eval: Box<EvalFn>,
    jacobian: Option<Box<JacobianFn>>,
}

impl SmoothMap {
    pub fn new(
        domain: Frame,
        codomain: Frame,
        eval: impl Fn(&FramePoint) -> Result<FramePoint> + Send + Sync + 'static,
    ) -> SmoothMap {
        SmoothMap {
            domain,
            codomain,
            eval: Box::new(eval),
            jacobian: None,
        }
    }

    /// Attach an exact Jacobian: a full dim x dim slot matrix including the
    /// conjugate rows and columns.
    pub fn with_jacobian(
        mut self,
        jacobian: impl Fn(&FramePoint) -> Result<DMatrix<Complex64>> + Send + Sync + 'static,
    ) -> SmoothMap {
        self.jacobian = Some(Box::new(jacobian));
        self
    }

    pub fn domain(&self) -> Frame {
        self.domain
    }

    pub fn codomain(&self) -> Frame {
        self.codomain
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn eval(&self, p: &FramePoint) -> Result<FramePoint> {
        p.frame().require_eq(self.domain, "map argument")?;
        let out = (self.eval)(p)?;
        out.frame().require_eq(self.codomain, "map output")?;
        Ok(out)
    }

    pub fn identity(frame: Frame) -> SmoothMap {
        SmoothMap::new(frame, frame, |p: &FramePoint| Ok(p.clone())).with_jacobian(
            move |_p: &FramePoint| Ok(DMatrix::identity(frame.dim(), frame.dim())),
        )
    }

    /// The linear map (z1, z2) -> (c1 z1, c2 z2). Its slot Jacobian is the
    /// constant diagonal (c1, c1bar, c2, c2bar) repeated blockwise.
    pub fn block_scaling(frame: Frame, c1: Complex64, c2: Complex64) -> SmoothMap {
        let eval = move |p: &FramePoint| {
            Ok(FramePoint::new(
                p.first().scaled(c1),
                p.second().scaled(c2),
            ))
        };
        let jac = move |_p: &FramePoint| {
            let mut d = Vec::with_capacity(frame.dim());
            d.extend(std::iter::repeat_n(c1, frame.n()));
            d.extend(std::iter::repeat_n(c1.conj(), frame.n()));
            d.extend(std::iter::repeat_n(c2, frame.m()));
            d.extend(std::iter::repeat_n(c2.conj(), frame.m()));
            Ok(DMatrix::from_diagonal(&DVector::from_vec(d)))
        };
        SmoothMap::new(frame, frame, eval).with_jacobian(jac)
    }

    /// Composition outer after inner. The analytic Jacobian survives only
    /// if both factors carry one.
    pub fn compose(outer: SmoothMap, inner: SmoothMap) -> Result<SmoothMap> {
        inner
            .codomain
            .require_eq(outer.domain, "composition interface")?;
        let domain = inner.domain;
        let codomain = outer.codomain;
        let both_analytic = outer.jacobian.is_some() && inner.jacobian.is_some();
        let outer = std::sync::Arc::new(outer);
        let inner = std::sync::Arc::new(inner);
        let (oe, ie) = (outer.clone(), inner.clone());
        let mut map = SmoothMap::new(domain, codomain, move |p: &FramePoint| {
            oe.eval(&ie.eval(p)?)
        });
        if both_analytic {
            map = map.with_jacobian(move |p: &FramePoint| {
                let mid = inner.eval(p)?;
                let jo = (outer.jacobian.as_ref().unwrap())(&mid)?;
                let ji = (inner.jacobian.as_ref().unwrap())(p)?;
                Ok(jo * ji)
            });
        }
        Ok(map)
    }
}

/// A 1-form value: one coefficient per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct OneForm {
    frame: Frame,
    coeff: DVector<Complex64>,
}

impl OneForm {
    pub fn new(frame: Frame, coeff: DVector<Complex64>) -> Result<OneForm> {
        if coeff.len() != frame.dim() {
            return Err(Error::DimMismatch(format!(
                "one-form coefficient length {} vs frame dimension {}",
                coeff.len(),
                frame.dim()
            )));
        }
        Ok(OneForm { frame, coeff })
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn coeff(&self) -> &DVector<Complex64> {
        &self.coeff
    }

    pub fn get(&self, mu: usize) -> Complex64 {
        self.coeff[mu]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Pairing with a vector field value at the same point.
    pub fn pair(&self, x: &VectorFieldValue) -> Result<Complex64> {
        self.frame.require_eq(x.frame(), "one-form pairing")?;
        // nalgebra's dot is the plain bilinear sum; no conjugation.
        Ok(self.coeff.dot(x.comp()))
    }

    pub fn add(&self, other: &OneForm) -> Result<OneForm> {
        self.frame.require_eq(other.frame, "one-form sum")?;
        Ok(OneForm {
            frame: self.frame,
            coeff: &self.coeff + &other.coeff,
        })
    }
}

/// A 2-form value: an antisymmetric slot matrix A, representing
/// sum_{mu<nu} A[mu][nu] e^mu wedge e^nu.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoForm {
    frame: Frame,
    coeff: DMatrix<Complex64>,
}

impl TwoForm {
    /// Accepts any matrix that is antisymmetric up to roundoff and stores
    /// its exact antisymmetrization (A - A^T)/2. Gross asymmetry is a caller
    /// bug and is rejected.
    pub fn new(frame: Frame, coeff: DMatrix<Complex64>) -> Result<TwoForm> {
        let d = frame.dim();
        if coeff.nrows() != d || coeff.ncols() != d {
            return Err(Error::DimMismatch(format!(
                "two-form coefficient shape {}x{} vs frame dimension {}",
                coeff.nrows(),
                coeff.ncols(),
                d
            )));
        }
        let asym = (&coeff + coeff.transpose()).norm();
        let scale = coeff.norm().max(1.0);
        if asym > 1e-6 * scale {
            return Err(Error::DomainViolation(format!(
                "two-form coefficients are not antisymmetric (defect {:e})",
                asym / scale
            )));
        }
        let anti = (&coeff - coeff.transpose()) * Complex64::new(0.5, 0.0);
        Ok(TwoForm { frame, coeff: anti })
    }

    pub fn zero(frame: Frame) -> TwoForm {
        TwoForm {
            frame,
            coeff: DMatrix::zeros(frame.dim(), frame.dim()),
        }
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn coeff(&self) -> &DMatrix<Complex64> {
        &self.coeff
    }

    pub fn get(&self, mu: usize, nu: usize) -> Complex64 {
        self.coeff[(mu, nu)]
    }

    pub fn max_abs(&self) -> f64 {
        self.coeff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &TwoForm) -> Result<f64> {
        self.frame.require_eq(other.frame, "two-form difference")?;
        Ok((&self.coeff - &other.coeff)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }

    /// Frobenius distance scaled by the larger Frobenius norm.
    pub fn rel_distance(&self, other: &TwoForm) -> Result<f64> {
        self.frame.require_eq(other.frame, "two-form distance")?;
        let scale = self.coeff.norm().max(other.coeff.norm());
        if scale == 0.0 {
            return Ok(0.0);
        }
        Ok((&self.coeff - &other.coeff).norm() / scale)
    }

    /// Bilinear evaluation on two slot vectors, xi^T A eta.
    pub fn eval_on(&self, xi: &DVector<Complex64>, eta: &DVector<Complex64>) -> Result<Complex64> {
        let d = self.frame.dim();
        if xi.len() != d || eta.len() != d {
            return Err(Error::DimMismatch(format!(
                "vector lengths {} and {} vs frame dimension {d}",
                xi.len(),
                eta.len()
            )));
        }
        Ok((xi.transpose() * &self.coeff * eta)[(0, 0)])
    }
}

/// Fully antisymmetric degree-3 coefficients, stored on strictly increasing
/// triples in lexicographic order.
#[derive(Debug, Clone)]
pub struct ThreeTensor {
    frame: Frame,
    coeff: Vec<Complex64>,
}

impl ThreeTensor {
    fn triple_index(dim: usize, mu: usize, nu: usize, rho: usize) -> usize {
        // Position of (mu, nu, rho), mu < nu < rho, among ordered triples.
        let c3 = |x: usize| if x < 3 { 0 } else { x * (x - 1) * (x - 2) / 6 };
        let c2 = |x: usize| if x < 2 { 0 } else { x * (x - 1) / 2 };
        c3(dim) - c3(dim - mu) + c2(dim - 1 - mu) - c2(dim - nu) + (rho - nu - 1)
    }

    pub fn from_fn(
        frame: Frame,
        mut f: impl FnMut(usize, usize, usize) -> Complex64,
    ) -> ThreeTensor {
        let d = frame.dim();
        let mut coeff = Vec::new();
        for mu in 0..d {
            for nu in (mu + 1)..d {
                for rho in (nu + 1)..d {
                    coeff.push(f(mu, nu, rho));
                }
            }
        }
        ThreeTensor { frame, coeff }
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    /// Coefficient on an arbitrary index triple, with the antisymmetric sign;
    /// zero when indices repeat.
    pub fn get(&self, mu: usize, nu: usize, rho: usize) -> Complex64 {
        if mu == nu || nu == rho || mu == rho {
            return Complex64::new(0.0, 0.0);
        }
        let mut idx = [mu, nu, rho];
        let mut sign = 1.0;
        // Three-element bubble sort tracks the permutation parity.
        for i in 0..2 {
            for j in 0..2 - i {
                if idx[j] > idx[j + 1] {
                    idx.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        let i = Self::triple_index(self.frame.dim(), idx[0], idx[1], idx[2]);
        self.coeff[i] * sign
    }

    pub fn max_abs(&self) -> f64 {
        self.coeff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// A tangent vector in slot components. Real flows force the conjugate
/// blocks to be conjugates of the unbarred ones; the constructor checks it.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorFieldValue {
    frame: Frame,
    comp: DVector<Complex64>,
}

impl VectorFieldValue {
    pub fn new(frame: Frame, comp: DVector<Complex64>) -> Result<VectorFieldValue> {
        if comp.len() != frame.dim() {
            return Err(Error::DimMismatch(format!(
                "vector field length {} vs frame dimension {}",
                comp.len(),
                frame.dim()
            )));
        }
        let scale = comp.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for mu in 0..frame.dim() {
            if frame.is_barred(mu) {
                continue;
            }
            let defect = (comp[frame.conjugate_slot(mu)] - comp[mu].conj()).norm();
            if defect > 1e-9 * scale {
                return Err(Error::DomainViolation(format!(
                    "vector field violates reality at slot {mu} (defect {defect:e})"
                )));
            }
        }
        Ok(VectorFieldValue { frame, comp })
    }

    /// Build from holomorphic block components; conjugates are filled in.
    pub fn from_holomorphic(first: &[Complex64], second: &[Complex64]) -> VectorFieldValue {
        let frame = Frame::new(first.len(), second.len());
        let mut comp = Vec::with_capacity(frame.dim());
        comp.extend_from_slice(first);
        comp.extend(first.iter().map(|z| z.conj()));
        comp.extend_from_slice(second);
        comp.extend(second.iter().map(|z| z.conj()));
        VectorFieldValue {
            frame,
            comp: DVector::from_vec(comp),
        }
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn comp(&self) -> &DVector<Complex64> {
        &self.comp
    }
}

fn check_step(h: f64) -> Result<f64> {
    if h < MIN_STEP {
        return Err(Error::StepTooSmall { h });
    }
    Ok(h)
}

/// Central-difference Wirtinger partials of a vector-valued function: for
/// each complex coordinate j of p's frame, the pair
/// (d/dz_j, d/dzbar_j) applied to every output component. Steps scale with
/// max(1, |coordinate|) so large coordinates do not starve the difference.
fn wirtinger_partials(
    eval: &dyn Fn(&FramePoint) -> Result<DVector<Complex64>>,
    p: &FramePoint,
    h: f64,
) -> Result<Vec<(DVector<Complex64>, DVector<Complex64>)>> {
    let h = check_step(h)?;
    let i = Complex64::new(0.0, 1.0);
    let half = Complex64::new(0.5, 0.0);
    let mut out = Vec::with_capacity(p.frame().complex_dim());
    for j in 0..p.frame().complex_dim() {
        let hj = h * p.complex_coord(j).norm().max(1.0);
        let re = Complex64::new(hj, 0.0);
        let im = Complex64::new(0.0, hj);
        let fxp = eval(&p.with_offset(j, re))?;
        let fxm = eval(&p.with_offset(j, -re))?;
        let fyp = eval(&p.with_offset(j, im))?;
        let fym = eval(&p.with_offset(j, -im))?;
        let scale = Complex64::new(1.0 / (2.0 * hj), 0.0);
        let dx = (fxp - fxm) * scale;
        let dy = (fyp - fym) * scale;
        let d_holo = (&dx - &dy * i) * half;
        let d_anti = (dx + dy * i) * half;
        out.push((d_holo, d_anti));
    }
    Ok(out)
}

/// The slot Jacobian of f at p: exact when f carries an analytic Jacobian,
/// otherwise by central differences. Rows and columns run over all slots of
/// the codomain and domain frames; conjugate rows are conjugated copies of
/// unbarred rows with swapped column blocks.
pub fn wirtinger_jacobian(f: &SmoothMap, p: &FramePoint, h: f64) -> Result<DMatrix<Complex64>> {
    check_step(h)?;
    p.frame().require_eq(f.domain(), "jacobian base point")?;
    if let Some(jac) = &f.jacobian {
        let j = jac(p)?;
        let (rows, cols) = (f.codomain().dim(), f.domain().dim());
        if j.nrows() != rows || j.ncols() != cols {
            return Err(Error::DimMismatch(format!(
                "analytic jacobian shape {}x{}, expected {rows}x{cols}",
                j.nrows(),
                j.ncols()
            )));
        }
        return Ok(j);
    }
    let dom = f.domain();
    let cod = f.codomain();
    let eval = |q: &FramePoint| Ok(f.eval(q)?.holomorphic_vector());
    let partials = wirtinger_partials(&eval, p, h)?;
    let mut jac = DMatrix::zeros(cod.dim(), dom.dim());
    for (j, (d_holo, d_anti)) in partials.iter().enumerate() {
        for r in 0..cod.complex_dim() {
            let (hr, ar) = (cod.holo_slot(r), cod.anti_slot(r));
            let (hc, ac) = (dom.holo_slot(j), dom.anti_slot(j));
            jac[(hr, hc)] = d_holo[r];
            jac[(hr, ac)] = d_anti[r];
            jac[(ar, hc)] = d_anti[r].conj();
            jac[(ar, ac)] = d_holo[r].conj();
        }
    }
    Ok(jac)
}

/// Pullback (f^* omega)(p) = J^T omega(f(p)) J with the plain transpose:
/// forms are bilinear, no conjugation is involved.
pub fn pullback_two_form(
    f: &SmoothMap,
    omega_at: &dyn Fn(&FramePoint) -> Result<TwoForm>,
    p: &FramePoint,
    h: f64,
) -> Result<TwoForm> {
    let jac = wirtinger_jacobian(f, p, h)?;
    let image = f.eval(p)?;
    let omega = omega_at(&image)?;
    omega
        .frame()
        .require_eq(f.codomain(), "pulled-back two-form")?;
    let coeff = jac.transpose() * omega.coeff() * &jac;
    TwoForm::new(f.domain(), coeff)
}

/// d(omega) at p by central differences of the coefficient functions:
/// (d omega)_{mu nu rho} = d_mu A_{nu rho} - d_nu A_{mu rho} + d_rho A_{mu nu}.
pub fn exterior_derivative(
    omega_at: &dyn Fn(&FramePoint) -> Result<TwoForm>,
    p: &FramePoint,
    h: f64,
) -> Result<ThreeTensor> {
    let frame = omega_at(p)?.frame();
    frame.require_eq(p.frame(), "two-form field base")?;
    let d = frame.dim();
    let eval = |q: &FramePoint| {
        let form = omega_at(q)?;
        Ok(DVector::from_iterator(d * d, form.coeff().iter().copied()))
    };
    let partials = wirtinger_partials(&eval, p, h)?;
    // slot_partials[mu] is the matrix d_mu A, flattened column-major.
    let mut slot_partials: Vec<&DVector<Complex64>> = Vec::with_capacity(d);
    for mu in 0..d {
        let j = frame.complex_index(mu);
        let (d_holo, d_anti) = &partials[j];
        slot_partials.push(if frame.is_barred(mu) { d_anti } else { d_holo });
    }
    let at = |vec: &DVector<Complex64>, r: usize, c: usize| vec[c * d + r];
    Ok(ThreeTensor::from_fn(frame, |mu, nu, rho| {
        at(slot_partials[mu], nu, rho) - at(slot_partials[nu], mu, rho)
            + at(slot_partials[rho], mu, nu)
    }))
}

/// d(alpha) at p for a 1-form field: (d alpha)_{mu nu} = d_mu a_nu - d_nu a_mu.
pub fn exterior_derivative_one_form(
    alpha_at: &dyn Fn(&FramePoint) -> Result<OneForm>,
    p: &FramePoint,
    h: f64,
) -> Result<TwoForm> {
    let frame = alpha_at(p)?.frame();
    frame.require_eq(p.frame(), "one-form field base")?;
    let d = frame.dim();
    let eval = |q: &FramePoint| Ok(alpha_at(q)?.coeff().clone());
    let partials = wirtinger_partials(&eval, p, h)?;
    let mut coeff = DMatrix::zeros(d, d);
    for mu in 0..d {
        let j = frame.complex_index(mu);
        let (d_holo, d_anti) = &partials[j];
        let row = if frame.is_barred(mu) { d_anti } else { d_holo };
        for nu in 0..d {
            coeff[(mu, nu)] += row[nu];
            coeff[(nu, mu)] -= row[nu];
        }
    }
    TwoForm::new(frame, coeff)
}

/// Interior product (iota_X omega)_nu = sum_mu X^mu A_{mu nu}.
pub fn interior_product(x: &VectorFieldValue, omega: &TwoForm) -> Result<OneForm> {
    x.frame()
        .require_eq(omega.frame(), "interior product")?;
    let coeff = (x.comp().transpose() * omega.coeff()).transpose();
    OneForm::new(omega.frame(), coeff)
}

/// The Wirtinger differential of a scalar function as a 1-form at p.
pub fn differential(
    f: &dyn Fn(&FramePoint) -> Result<Complex64>,
    p: &FramePoint,
    h: f64,
) -> Result<OneForm> {
    let frame = p.frame();
    let eval = |q: &FramePoint| Ok(DVector::from_element(1, f(q)?));
    let partials = wirtinger_partials(&eval, p, h)?;
    let mut coeff = DVector::zeros(frame.dim());
    for (j, (d_holo, d_anti)) in partials.iter().enumerate() {
        coeff[frame.holo_slot(j)] = d_holo[0];
        coeff[frame.anti_slot(j)] = d_anti[0];
    }
    OneForm::new(frame, coeff)
}
