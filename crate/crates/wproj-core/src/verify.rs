//! Named, seeded property checks over the whole library, packaged as
//! machine-readable pass/fail results.
//!
//! Every check follows one pattern: a sampler draws random cases from an RNG
//! stream derived from `(seed, check name)`, a pure evaluator turns one case
//! into a scalar error, and the worst case is kept together with its inputs
//! as a JSON witness. Evaluators never touch the RNG, so a stored witness
//! replays to the same error via [`replay_witness`] and checks may run in
//! any order, or in parallel, without changing results.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bundle::{decompose_rank1, embed_tautological};
use crate::error::{Error, Result};
use crate::forms::{
    exterior_derivative, interior_product, pullback_two_form, wirtinger_jacobian, FramePoint,
    VectorFieldValue,
};
use crate::hvec::{ChartId, ComplexVec, HomPoint};
use crate::symplectic::{
    chart_coords_from_frame, chart_frame_point, circle_generator, hamiltonian,
    hamiltonian_differential, normalize_to_level, omega0, omega_formula, omega_in_chart,
    omega_oracle, phase_flow, radial_generator, retraction, transition_map, LevelSpec,
    ReductionContext,
};
use crate::tolerances::{
    DEFAULT_STEP, MIN_CHART_DET, SECOND_ORDER_STEP, TOL_ANALYTIC, TOL_FD_FIRST, TOL_FD_SECOND,
};

/// The registry, in report order.
pub const CHECK_NAMES: [&str; 14] = [
    "moment_map",
    "level_section",
    "proposition_negative_alpha",
    "retraction_idempotent",
    "s1_invariance_on_level",
    "phase_invariance_global",
    "formula_vs_oracle",
    "basicness",
    "closedness",
    "chart_nondegeneracy",
    "chart_consistency",
    "bundle_roundtrip",
    "orbit_equality",
    "example_W_is_scalar",
];

/// Dimensions, sample count, seed, finite-difference step, and per-check
/// tolerance overrides keyed by check name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub h: f64,
    #[serde(default)]
    pub tol_overrides: BTreeMap<String, f64>,
}

impl Default for CheckConfig {
    fn default() -> CheckConfig {
        CheckConfig {
            n: 2,
            m: 2,
            trials: 200,
            seed: 42,
            h: DEFAULT_STEP,
            tol_overrides: BTreeMap::new(),
        }
    }
}

impl CheckConfig {
    fn validate(&self) -> Result<()> {
        if !(1..=8).contains(&self.n) || !(1..=8).contains(&self.m) {
            return Err(Error::InvalidConfig(format!(
                "dims must lie in 1..=8, got ({}, {})",
                self.n, self.m
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("trials must be at least 1".into()));
        }
        if self.h.is_nan() || self.h <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "step must be positive, got {}",
                self.h
            )));
        }
        Ok(())
    }

    /// The tolerance that will be applied to a check: the override if one is
    /// set, the registry default otherwise.
    pub fn tolerance_for(&self, name: &str) -> Result<f64> {
        let default = default_tolerance(name)?;
        Ok(self.tol_overrides.get(name).copied().unwrap_or(default))
    }
}

/// One check's outcome. `passed` is exactly `max_abs_err <= tol`; `witness`
/// holds the worst sampled case, sufficient to replay the error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub max_abs_err: f64,
    pub tol: f64,
    pub trials: usize,
    pub passed: bool,
    pub witness: Value,
}

/// Registry default tolerance: 0 for indicator checks, analytic/first-order/
/// second-order finite-difference floors otherwise.
pub fn default_tolerance(name: &str) -> Result<f64> {
    Ok(match name {
        "moment_map" => TOL_FD_FIRST,
        "level_section" => 1e-10,
        "proposition_negative_alpha" => 0.0,
        "retraction_idempotent" => 1e-10,
        "s1_invariance_on_level" => TOL_ANALYTIC,
        "phase_invariance_global" => 1e-12,
        "formula_vs_oracle" => TOL_FD_FIRST,
        "basicness" => 1e-7,
        "closedness" => TOL_FD_SECOND,
        "chart_nondegeneracy" => 0.0,
        "chart_consistency" => TOL_FD_FIRST,
        "bundle_roundtrip" => 1e-8,
        "orbit_equality" => TOL_ANALYTIC,
        "example_W_is_scalar" => TOL_ANALYTIC,
        other => return Err(Error::UnknownCheck(other.into())),
    })
}

/// Run one named check.
pub fn run_check(name: &str, cfg: &CheckConfig) -> Result<CheckResult> {
    cfg.validate()?;
    let tol = cfg.tolerance_for(name)?;
    let (max_abs_err, witness) = dispatch(name, cfg)?;
    Ok(CheckResult {
        name: name.to_owned(),
        max_abs_err,
        tol,
        trials: cfg.trials,
        passed: max_abs_err <= tol,
        witness,
    })
}

/// Run the whole registry in order. Failures are data in the results, not
/// errors.
pub fn run_all(cfg: &CheckConfig) -> Result<Vec<CheckResult>> {
    CHECK_NAMES
        .iter()
        .map(|name| run_check(name, cfg))
        .collect()
}

/// Re-evaluate a stored witness: same error, no sampling. Useful to confirm
/// a reported failure from its report alone.
pub fn replay_witness(name: &str, cfg: &CheckConfig, witness: &Value) -> Result<f64> {
    cfg.validate()?;
    match name {
        "moment_map" => eval_moment_map(cfg, &parse(name, witness)?),
        "level_section" => eval_level_section(&parse(name, witness)?),
        "proposition_negative_alpha" => eval_proposition(&parse(name, witness)?),
        "retraction_idempotent" => eval_retraction_idempotent(&parse(name, witness)?),
        "s1_invariance_on_level" => eval_s1_invariance(cfg, &parse(name, witness)?),
        "phase_invariance_global" => eval_phase_invariance(cfg, &parse(name, witness)?),
        "formula_vs_oracle" => eval_formula_vs_oracle(cfg, &parse(name, witness)?),
        "basicness" => eval_basicness(&parse(name, witness)?),
        "closedness" => eval_closedness(&parse(name, witness)?),
        "chart_nondegeneracy" => Ok(eval_chart_nondegeneracy(&parse(name, witness)?)?.0),
        "chart_consistency" => eval_chart_consistency(cfg, &parse(name, witness)?),
        "bundle_roundtrip" => eval_bundle_roundtrip(&parse(name, witness)?),
        "orbit_equality" => eval_orbit_equality(&parse(name, witness)?),
        "example_W_is_scalar" => eval_example_scalar(&parse(name, witness)?),
        other => Err(Error::UnknownCheck(other.into())),
    }
}

fn parse<W: DeserializeOwned>(check: &str, witness: &Value) -> Result<W> {
    serde_json::from_value(witness.clone()).map_err(|e| Error::BadWitness {
        check: check.to_owned(),
        reason: e.to_string(),
    })
}

fn to_witness<W: Serialize>(w: &W) -> Value {
    serde_json::to_value(w).expect("witness fields are finite numbers and strings")
}

// ---- deterministic sampling ------------------------------------------------

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-check RNG stream: mixing the check name into the seed decouples the
/// checks from each other and from their execution order.
struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    fn new(seed: u64, name: &str) -> Sampler {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(splitmix64(seed ^ fnv1a(name.as_bytes()))),
        }
    }

    fn u01(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.u01()
    }

    /// One real component: magnitude in [0.1, 2], either sign. The gap
    /// around zero keeps pivots and finite-difference steps well away from
    /// degeneracy; zero-adjacent behavior gets explicit tests instead.
    fn component(&mut self) -> f64 {
        let negative = self.rng.next_u64() & 1 == 1;
        let magnitude = 0.1 + 1.9 * self.u01();
        if negative {
            -magnitude
        } else {
            magnitude
        }
    }

    fn complex(&mut self) -> Complex64 {
        let re = self.component();
        let im = self.component();
        Complex64::new(re, im)
    }

    fn vec(&mut self, dim: usize) -> ComplexVec {
        ComplexVec::new((0..dim).map(|_| self.complex()).collect())
    }

    fn point(&mut self, n: usize, m: usize) -> HomPoint {
        HomPoint::new(self.vec(n), self.vec(m)).expect("sampled entries are nonzero")
    }
}

fn pair(re_im: [f64; 2]) -> Complex64 {
    Complex64::new(re_im[0], re_im[1])
}

const ALPHA_CYCLE: [f64; 3] = [1.0, 2.0, -1.0];
const LEVEL_ALPHA_CYCLE: [f64; 3] = [1.0, 2.0, 0.5];
const BETA_CYCLE: [f64; 3] = [0.0, -1.0, 1.0];

/// Generic worst-case loop: sample, evaluate, keep the largest error with
/// its witness.
fn worst_case<W: Serialize>(
    cfg: &CheckConfig,
    mut sample: impl FnMut(usize, &mut Sampler) -> W,
    eval: impl Fn(&W) -> Result<f64>,
    name: &str,
) -> Result<(f64, Value)> {
    let mut sampler = Sampler::new(cfg.seed, name);
    let mut worst = (f64::NEG_INFINITY, Value::Null);
    for trial in 0..cfg.trials {
        let case = sample(trial, &mut sampler);
        let err = eval(&case)?;
        if err > worst.0 {
            worst = (err, to_witness(&case));
        }
    }
    Ok(worst)
}

fn dispatch(name: &str, cfg: &CheckConfig) -> Result<(f64, Value)> {
    match name {
        "moment_map" => check_moment_map(cfg),
        "level_section" => check_level_section(cfg),
        "proposition_negative_alpha" => check_proposition(cfg),
        "retraction_idempotent" => check_retraction_idempotent(cfg),
        "s1_invariance_on_level" => check_s1_invariance(cfg),
        "phase_invariance_global" => check_phase_invariance(cfg),
        "formula_vs_oracle" => check_formula_vs_oracle(cfg),
        "basicness" => check_basicness(cfg),
        "closedness" => check_closedness(cfg),
        "chart_nondegeneracy" => check_chart_nondegeneracy(cfg),
        "chart_consistency" => check_chart_consistency(cfg),
        "bundle_roundtrip" => check_bundle_roundtrip(cfg),
        "orbit_equality" => check_orbit_equality(cfg),
        "example_W_is_scalar" => check_example_scalar(cfg),
        other => Err(Error::UnknownCheck(other.into())),
    }
}

// ---- individual checks -----------------------------------------------------

#[derive(Serialize, Deserialize)]
struct MomentWitness {
    v: ComplexVec,
    w: ComplexVec,
    alpha: f64,
}

/// iota_X omega0 = -dH, against both the analytic and the finite-difference
/// differential of H.
fn check_moment_map(cfg: &CheckConfig) -> Result<(f64, Value)> {
    worst_case(
        cfg,
        |trial, s| MomentWitness {
            v: s.vec(cfg.n),
            w: s.vec(cfg.m),
            alpha: ALPHA_CYCLE[trial % ALPHA_CYCLE.len()],
        },
        |case| eval_moment_map(cfg, case),
        "moment_map",
    )
}

fn eval_moment_map(cfg: &CheckConfig, case: &MomentWitness) -> Result<f64> {
    let p = HomPoint::new(case.v.clone(), case.w.clone())?;
    let ctx = ReductionContext::for_point(&p, LevelSpec::new(case.alpha, 0.0));
    let contraction = interior_product(&circle_generator(&p), &omega0(&ctx))?;
    let analytic = hamiltonian_differential(&ctx, &p)?;
    let fp = FramePoint::from_point(&p);
    let fd = crate::forms::differential(
        &|q: &FramePoint| {
            let hp = q.to_point()?;
            Ok(Complex64::new(hamiltonian(&ctx, &hp)?, 0.0))
        },
        &fp,
        cfg.h,
    )?;
    let err_analytic = contraction.add(&analytic)?.max_abs();
    let err_fd = contraction.add(&fd)?.max_abs();
    Ok(err_analytic.max(err_fd))
}

#[derive(Serialize, Deserialize)]
struct LevelWitness {
    v: ComplexVec,
    w: ComplexVec,
    alpha: f64,
    beta: f64,
}

/// normalize_to_level followed by the Hamiltonian hits beta on the nose for
/// alpha > 0, at any beta.
fn check_level_section(cfg: &CheckConfig) -> Result<(f64, Value)> {
    worst_case(
        cfg,
        |trial, s| {
            let v = s.vec(cfg.n);
            let w = s.vec(cfg.m);
            let beta = s.uniform(-2.0, 2.0);
            LevelWitness {
                v,
                w,
                alpha: LEVEL_ALPHA_CYCLE[trial % LEVEL_ALPHA_CYCLE.len()],
                beta,
            }
        },
        eval_level_section,
        "level_section",
    )
}

fn eval_level_section(case: &LevelWitness) -> Result<f64> {
    let p = HomPoint::new(case.v.clone(), case.w.clone())?;
    let ctx = ReductionContext::for_point(&p, LevelSpec::new(case.alpha, case.beta));
    let lambda = normalize_to_level(&ctx, &p)?;
    let moved = p.act(Complex64::new(lambda, 0.0))?;
    Ok((hamiltonian(&ctx, &moved)? - case.beta).abs())
}

#[derive(Serialize, Deserialize)]
struct PointWitness {
    v: ComplexVec,
    w: ComplexVec,
}

/// At alpha = -1 the level quadratic has negative discriminant at every
/// sampled point: the indicator is 0 when NoRealRoot comes back, 1 otherwise.
fn check_proposition(cfg: &CheckConfig) -> Result<(f64, Value)> {
    worst_case(
        cfg,
        |_, s| PointWitness {
            v: s.vec(cfg.n),
            w: s.vec(cfg.m),
        },
        eval_proposition,
        "proposition_negative_alpha",
    )
}

fn eval_proposition(case: &PointWitness) -> Result<f64> {
    let p = HomPoint::new(case.v.clone(), case.w.clone())?;
    let ctx = ReductionContext::for_point(&p, LevelSpec::new(-1.0, 0.0));
    Ok(match normalize_to_level(&ctx, &p) {
        Err(Error::NoRealRoot { .. }) => 0.0,
        _ => 1.0,
    })
}

#[derive(Serialize, Deserialize)]
struct RetractWitness {
    v: ComplexVec,
    w: ComplexVec,
    beta: f64,
}

fn check_retraction_idempotent(cfg: &CheckConfig) -> Result<(f64, Value)> {
    worst_case(
        cfg,
        |trial, s| RetractWitness {
            v: s.vec(cfg.n),
            w: s.vec(cfg.m),
            beta: BETA_CYCLE[trial % BETA_CYCLE.len()],
        },
        eval_retraction_idempotent,
        "retraction_idempotent",
    )
}

fn eval_retraction_idempotent(case: &RetractWitness) -> Result<f64> {
    let p = HomPoint::new(case.v.clone(), case.w.clone())?;
    let ctx = ReductionContext::for_point(&p, LevelSpec::new(1.0, case.beta));
    let s = retraction(&ctx);
    let once = s.eval(&FramePoint::from_point(&p))?;
    let twice = s.eval(&once)?;
    Ok(twice.max_abs_diff(&once))
}

#[derive(Serialize, Deserialize)]
struct TangentWitness {
    v: ComplexVec,
    w: ComplexVec,
    xi_v: ComplexVec,
    xi_w: ComplexVec,
    eta_v: ComplexVec,
    eta_w: ComplexVec,
}

/// Project a raw tangent direction into ker dH by removing its radial
/// component; the radial generator is transverse to the level sets since
/// dH(radial) = rho + alpha sigma > 0 at alpha = 1.
fn level_tangent(
    ctx: &ReductionContext,
    p: &HomPoint,
    raw: &VectorFieldValue,
) -> Result<VectorFieldValue> {
    let dh = hamiltonian_differential(ctx, p)?;
    let radial = radial_generator(p);
    let ratio = dh.pair(raw)? / dh.pair(&radial)?;
    let comp = raw.comp() - radial.comp() * ratio;
    VectorFieldValue::new(raw.frame(), comp)
}

fn holomorphic_blocks(x: &VectorFieldValue) -> (ComplexVec, ComplexVec) {
    let frame = x.frame();
    let (n, m) = (frame.n(), frame.m());
    let first = (0..n).map(|a| x.comp()[a]).collect();
    let second = (0..m).map(|k| x.comp()[2 * n + k]).collect();
    (ComplexVec::new(first), ComplexVec::new(second))
}

/// On its own level set, omega0 evaluated on level-tangent pairs is
/// unchanged by the circle flow; the witness stores the projected pair.
fn check_s1_invariance(cfg: &CheckConfig) -> Result<(f64, Value)> {
    let sample = |_: usize, s: &mut Sampler| -> Result<TangentWitness> {
        let p = s.point(cfg.n, cfg.m);
        let ctx = ReductionContext::for_point(&p, LevelSpec::standard());
        let raw_xi = VectorFieldValue::from_holomorphic(
            s.vec(cfg.n).entries(),
            s.vec(cfg.m).entries(),
        );
        let raw_eta = VectorFieldValue::from_holomorphic(
            s.vec(cfg.n).entries(),
            s.vec(cfg.m).entries(),
        );
        let (xi_v, xi_w) = holomorphic_blocks(&level_tangent(&ctx, &p, &raw_xi)?);
        let (eta_v, eta_w) = holomorphic_blocks(&level_tangent(&ctx, &p, &raw_eta)?);
        Ok(TangentWitness {
            v: p.v().clone(),
            w: p.w().clone(),
            xi_v,
            xi_w,
            eta_v,
            eta_w,
        })
    };
    let mut sampler = Sampler::new(cfg.seed, "s1_invariance_on_level");
    let mut worst = (f64::NEG_INFINITY, Value::Null);
    for trial in 0..cfg.trials {
        let case = sample(trial, &mut sampler)?;
        let err = eval_s1_invariance(cfg, &case)?;
        if err > worst.0 {
            worst = (err, to_witness(&case));
        }
    }
    Ok(worst)
}

fn eval_s1_invariance(cfg: &CheckConfig, case: &TangentWitness) -> Result<f64> {
    let p = HomPoint::new(case.v.clone(), case.w.clone())?;
    let ctx = ReductionContext::for_point(&p, LevelSpec::standard());
    let form = omega0(&ctx);
    let xi = VectorFieldValue::from_holomorphic(case.xi_v.entries(), case.xi_w.entries());
    let eta = VectorFieldValue::from_holomorphic(case.eta_v.entries(), case.eta_w.entries());
    let reference = form.eval_on(xi.comp(), eta.comp())?;
    let fp = FramePoint::from_point(&p);
    let mut err: f64 = 0.0;
    for j in 0..10 {
        let t = (j as f64 + 0.5) * std::f64::consts::TAU / 10.0;
        let flow = phase_flow(ctx.frame(), t);
        let jac = wirtinger_jacobian(&flow, &fp, cfg.h)?;
        let moved = form.eval_on(&(&jac * xi.comp()), &(&jac * eta.comp()))?;
        err = err.max((moved - reference).norm());
    }
    Ok(err)
}

#[derive(Serialize, Deserialize)]
struct PhaseWitness {
    v: ComplexVec,
    w: ComplexVec,
    alpha: f64,
    t: f64,
}

/// The circle flow preserves omega0 globally, not just on level sets: the
/// phases cancel blockwise, for either sign of alpha.
fn check_phase_invariance(cfg: &CheckConfig) -> Result<(f64, Value)> {
    worst_case(
        cfg,
        |trial, s| {
            let v = s.vec(cfg.n);
            let w = s.vec(cfg.m);
            let t = s.uniform(0.0, std::f64::consts::TAU);
            PhaseWitness {
                v,
                w,
                alpha: ALPHA_CYCLE[trial % ALPHA_CYCLE.len()],
                t,
            }
        },
        |case| eval_phase_invariance(cfg, case),
        "phase_invariance_global",
    )
}

fn eval_phase_invariance(cfg: &CheckConfig, case: &PhaseWitness) -> Result<f64> {
    let p = HomPoint::new(case.v.clone(), case.w.clone())?;
    let ctx = ReductionContext::for_point(&p, LevelSpec::new(case.alpha, 0.0));
    let form = omega0(&ctx);
    let flow = phase_flow(ctx.frame(), case.t);
    let constant = form.clone();
    let pulled = pullback_two_form(
        &flow,
        &move |_q: &FramePoint| Ok(constant.clone()),
        &FramePoint::from_point(&p),
        cfg.h,
    )?;
    pulled.max_abs_diff(&form)
}

fn check_formula_vs_oracle(cfg: &CheckConfig) -> Result<(f64, Value)> {
    worst_case(
        cfg,
        |_, s| PointWitness {
            v: s.vec(cfg.n),
            w: s.vec(cfg.m),
        },
        |case| eval_formula_vs_oracle(cfg, case),
        "formula_vs_oracle",
    )
}

fn eval_formula_vs_oracle(cfg: &CheckConfig, case: &PointWitness) -> Result<f64> {
    let p = HomPoint::new(case.v.clone(), case.w.clone())?;
    let ctx = ReductionContext::for_point(&p, LevelSpec::standard());
    let oracle = omega_oracle(&ctx, &p, cfg.h)?;
    omega_formula(&p).rel_distance(&oracle)
}

/// Both scaling generators annihilate the reduced form, so it descends to
/// the quotient.
fn check_basicness(cfg: &CheckConfig) -> Result<(f64, Value)> {
    worst_case(
        cfg,
        |_, s| PointWitness {
            v: s.vec(cfg.n),
            w: s.vec(cfg.m),
        },
        eval_basicness,
        "basicness",
    )
}

fn eval_basicness(case: &PointWitness) -> Result<f64> {
    let p = HomPoint::new(case.v.clone(), case.w.clone())?;
    let form = omega_formula(&p);
    let circle = interior_product(&circle_generator(&p), &form)?.max_abs();
    let radial = interior_product(&radial_generator(&p), &form)?.max_abs();
    Ok(circle.max(radial))
}

/// d(omega_formula) vanishes. Second derivatives of the coefficients need a
/// coarser step than first-order work, so this check pins its own step
/// rather than using the configured one.
fn check_closedness(cfg: &CheckConfig) -> Result<(f64, Value)> {
    worst_case(
        cfg,
        |_, s| PointWitness {
            v: s.vec(cfg.n),
            w: s.vec(cfg.m),
        },
        eval_closedness,
        "closedness",
    )
}

fn eval_closedness(case: &PointWitness) -> Result<f64> {
    let p = HomPoint::new(case.v.clone(), case.w.clone())?;
    let d_omega = exterior_derivative(
        &|q: &FramePoint| Ok(omega_formula(&q.to_point()?)),
        &FramePoint::from_point(&p),
        SECOND_ORDER_STEP,
    )?;
    Ok(d_omega.max_abs())
}

#[derive(Serialize, Deserialize)]
struct ChartDetWitness {
    v: ComplexVec,
    w: ComplexVec,
    chart: ChartId,
    det: [f64; 2],
}

/// The chart form has nonvanishing determinant at every sampled point. The
/// witness keeps the smallest determinant encountered, pass or fail.
fn check_chart_nondegeneracy(cfg: &CheckConfig) -> Result<(f64, Value)> {
    let mut sampler = Sampler::new(cfg.seed, "chart_nondegeneracy");
    let mut max_err: f64 = f64::NEG_INFINITY;
    let mut min_det = f64::INFINITY;
    let mut witness = Value::Null;
    for _ in 0..cfg.trials {
        let p = sampler.point(cfg.n, cfg.m);
        let mut case = ChartDetWitness {
            v: p.v().clone(),
            w: p.w().clone(),
            chart: p.best_chart(),
            det: [0.0, 0.0],
        };
        let (err, det) = eval_chart_nondegeneracy(&case)?;
        max_err = max_err.max(err);
        if det.norm() < min_det {
            min_det = det.norm();
            case.det = [det.re, det.im];
            witness = to_witness(&case);
        }
    }
    Ok((max_err, witness))
}

fn eval_chart_nondegeneracy(case: &ChartDetWitness) -> Result<(f64, Complex64)> {
    let p = HomPoint::new(case.v.clone(), case.w.clone())?;
    let coords = p.to_chart(case.chart)?;
    let det = omega_in_chart(&coords).coeff().clone().determinant();
    let err = if det.norm() > MIN_CHART_DET { 0.0 } else { 1.0 };
    Ok((err, det))
}

#[derive(Serialize, Deserialize)]
struct ConsistencyWitness {
    v: ComplexVec,
    w: ComplexVec,
    to_chart: ChartId,
}

/// Pulling the target chart's form back along a transition reproduces the
/// source chart's form: the chart forms glue to one global form.
fn check_chart_consistency(cfg: &CheckConfig) -> Result<(f64, Value)> {
    worst_case(
        cfg,
        |trial, s| {
            let p = s.point(cfg.n, cfg.m);
            let from = p.best_chart();
            let mut others: Vec<ChartId> = (0..cfg.n)
                .map(ChartId::v)
                .chain((0..cfg.m).map(ChartId::w))
                .collect();
            others.retain(|c| *c != from);
            ConsistencyWitness {
                v: p.v().clone(),
                w: p.w().clone(),
                to_chart: others[trial % others.len()],
            }
        },
        |case| eval_chart_consistency(cfg, case),
        "chart_consistency",
    )
}

fn eval_chart_consistency(cfg: &CheckConfig, case: &ConsistencyWitness) -> Result<f64> {
    let p = HomPoint::new(case.v.clone(), case.w.clone())?;
    let from = p.best_chart();
    let coords = p.to_chart(from)?;
    let to = case.to_chart;
    let trans = transition_map(from, to, cfg.n, cfg.m);
    let pulled = pullback_two_form(
        &trans,
        &move |fp: &FramePoint| Ok(omega_in_chart(&chart_coords_from_frame(to, fp)?)),
        &chart_frame_point(&coords),
        cfg.h,
    )?;
    omega_in_chart(&coords).rel_distance(&pulled)
}

/// decompose(embed(p)) returns a point on p's orbit.
fn check_bundle_roundtrip(cfg: &CheckConfig) -> Result<(f64, Value)> {
    worst_case(
        cfg,
        |_, s| PointWitness {
            v: s.vec(cfg.n),
            w: s.vec(cfg.m),
        },
        eval_bundle_roundtrip,
        "bundle_roundtrip",
    )
}

fn eval_bundle_roundtrip(case: &PointWitness) -> Result<f64> {
    let p = HomPoint::new(case.v.clone(), case.w.clone())?;
    let recovered = decompose_rank1(&embed_tautological(&p).vec, 1e-9)?;
    p.matrix_distance(&recovered)
}

#[derive(Serialize, Deserialize)]
struct OrbitWitness {
    v: ComplexVec,
    w: ComplexVec,
    lambda: [f64; 2],
}

/// The canonical matrix is constant along orbits, and moving lambda across
/// the separator changes nothing: [lambda v | w] = [v | lambda w].
fn check_orbit_equality(cfg: &CheckConfig) -> Result<(f64, Value)> {
    worst_case(
        cfg,
        |_, s| {
            let v = s.vec(cfg.n);
            let w = s.vec(cfg.m);
            let lambda = s.complex();
            OrbitWitness {
                v,
                w,
                lambda: [lambda.re, lambda.im],
            }
        },
        eval_orbit_equality,
        "orbit_equality",
    )
}

fn eval_orbit_equality(case: &OrbitWitness) -> Result<f64> {
    let p = HomPoint::new(case.v.clone(), case.w.clone())?;
    let lambda = pair(case.lambda);
    let moved = p.act(lambda)?;
    let err_orbit = p.matrix_distance(&moved)?;
    let left = HomPoint::new(p.v().scaled(lambda), p.w().clone())?;
    let right = HomPoint::new(p.v().clone(), p.w().scaled(lambda))?;
    let err_sides = left.matrix_distance(&right)?;
    Ok(err_orbit.max(err_sides))
}

#[derive(Serialize, Deserialize)]
struct ScalarWitness {
    v: ComplexVec,
    w: ComplexVec,
    lambda: [f64; 2],
    u: ComplexVec,
}

/// With a one-dimensional second block the quotient collapses onto the
/// nonzero vectors of the first: p -> w^0 v is orbit-invariant and onto.
/// The check forces m = 1 whatever the configured dims.
fn check_example_scalar(cfg: &CheckConfig) -> Result<(f64, Value)> {
    worst_case(
        cfg,
        |_, s| {
            let v = s.vec(cfg.n);
            let w = s.vec(1);
            let lambda = s.complex();
            let u = s.vec(cfg.n);
            ScalarWitness {
                v,
                w,
                lambda: [lambda.re, lambda.im],
                u,
            }
        },
        eval_example_scalar,
        "example_W_is_scalar",
    )
}

fn eval_example_scalar(case: &ScalarWitness) -> Result<f64> {
    let p = HomPoint::new(case.v.clone(), case.w.clone())?;
    let collapse = |q: &HomPoint| q.v().scaled(q.w()[0]);
    let moved = p.act(pair(case.lambda))?;
    let err_invariant = collapse(&p).max_abs_diff(&collapse(&moved));
    // Surjectivity: u has the explicit preimage (u, 1).
    let preimage = HomPoint::new(case.u.clone(), ComplexVec::from_reals(&[1.0]))?;
    let err_onto = collapse(&preimage).max_abs_diff(&case.u);
    Ok(err_invariant.max(err_onto))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_defaults_pass() {
        // Small but real run of every check through one config.
        let cfg = CheckConfig {
            trials: 25,
            ..CheckConfig::default()
        };
        let results = run_all(&cfg).unwrap();
        assert_eq!(results.len(), CHECK_NAMES.len());
        for r in &results {
            assert!(r.passed, "{} failed: {:e} > {:e}", r.name, r.max_abs_err, r.tol);
            assert_eq!(r.trials, 25);
        }
    }

    #[test]
    fn moment_map_documented_config() {
        let cfg = CheckConfig {
            n: 2,
            m: 2,
            trials: 100,
            seed: 7,
            ..CheckConfig::default()
        };
        let r = run_check("moment_map", &cfg).unwrap();
        assert!(r.passed);
        assert!(r.max_abs_err <= 1e-6);
    }

    #[test]
    fn proposition_all_points_rejected() {
        let r = run_check("proposition_negative_alpha", &CheckConfig::default()).unwrap();
        assert!(r.passed);
        assert_eq!(r.max_abs_err, 0.0);
    }

    #[test]
    fn formula_vs_oracle_small_dims() {
        let cfg = CheckConfig {
            n: 1,
            m: 1,
            trials: 1,
            ..CheckConfig::default()
        };
        let r = run_check("formula_vs_oracle", &cfg).unwrap();
        assert!(r.passed);
        assert!(r.max_abs_err <= 1e-6);
    }

    #[test]
    fn unknown_check_rejected() {
        assert!(matches!(
            run_check("no_such_check", &CheckConfig::default()),
            Err(Error::UnknownCheck(_))
        ));
        assert!(matches!(
            default_tolerance("bogus"),
            Err(Error::UnknownCheck(_))
        ));
    }

    #[test]
    fn config_bounds_enforced() {
        for bad in [
            CheckConfig {
                n: 0,
                ..CheckConfig::default()
            },
            CheckConfig {
                m: 9,
                ..CheckConfig::default()
            },
            CheckConfig {
                trials: 0,
                ..CheckConfig::default()
            },
            CheckConfig {
                h: 0.0,
                ..CheckConfig::default()
            },
        ] {
            assert!(matches!(
                run_check("moment_map", &bad),
                Err(Error::InvalidConfig(_))
            ));
        }
    }

    #[test]
    fn tolerance_override_applies() {
        let mut cfg = CheckConfig {
            trials: 5,
            ..CheckConfig::default()
        };
        cfg.tol_overrides.insert("closedness".into(), 1e-14);
        let r = run_check("closedness", &cfg).unwrap();
        assert_eq!(r.tol, 1e-14);
        assert!(!r.passed, "finite differences cannot reach 1e-14");
    }

    #[test]
    fn witness_replays_to_same_error() {
        let cfg = CheckConfig {
            trials: 10,
            ..CheckConfig::default()
        };
        for name in CHECK_NAMES {
            let r = run_check(name, &cfg).unwrap();
            let replayed = replay_witness(name, &cfg, &r.witness).unwrap();
            let scale = r.max_abs_err.abs().max(1e-300);
            assert!(
                (replayed - r.max_abs_err).abs() <= 0.1 * scale,
                "{name}: replay {replayed:e} vs reported {:e}",
                r.max_abs_err
            );
        }
    }

    #[test]
    fn bad_witness_rejected() {
        let cfg = CheckConfig::default();
        let err = replay_witness("moment_map", &cfg, &serde_json::json!({"v": 3})).unwrap_err();
        assert!(matches!(err, Error::BadWitness { .. }));
    }

    #[test]
    fn deterministic_across_runs() {
        let cfg = CheckConfig {
            trials: 8,
            ..CheckConfig::default()
        };
        let a = run_all(&cfg).unwrap();
        let b = run_all(&cfg).unwrap();
        let (ja, jb) = (
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap(),
        );
        assert_eq!(ja, jb);
    }

    #[test]
    fn run_check_matches_run_all_entry() {
        let cfg = CheckConfig {
            trials: 6,
            ..CheckConfig::default()
        };
        let all = run_all(&cfg).unwrap();
        let single = run_check("basicness", &cfg).unwrap();
        let from_all = all.iter().find(|r| r.name == "basicness").unwrap();
        assert_eq!(&single, from_all);
    }

    #[test]
    fn nondegeneracy_witness_reports_determinant() {
        let cfg = CheckConfig {
            trials: 20,
            ..CheckConfig::default()
        };
        let r = run_check("chart_nondegeneracy", &cfg).unwrap();
        assert!(r.passed);
        let det = r.witness.get("det").and_then(Value::as_array).unwrap();
        let norm = (det[0].as_f64().unwrap().powi(2) + det[1].as_f64().unwrap().powi(2)).sqrt();
        assert!(norm > MIN_CHART_DET);
    }
}
