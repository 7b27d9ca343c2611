// Copyright 2026 hadamult Contributors
// SPDX-License-Identifier: Apache-2.0

//! Maximal output p-norm and minimal output entropy by multi-start ascent on
//! the unit sphere of pure input states.
//!
//! `rho -> ||Phi(rho)||_p` is convex and `rho -> S(Phi(rho))` is concave, so the
//! supremum (resp. infimum) over states is attained on pure states and it is
//! enough to search over unit vectors. The objective is not concave on the
//! sphere, so every value returned here is an estimate (a lower bound for
//! `nu_p`, an upper bound for `S_min`).

use nalgebra::DVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{self, Channel};
use crate::error::{Error, Result};
use crate::linalg::{self, c64, ComplexMatrix, EigenDecomposition, HermitianMatrix, C64};
use crate::random;
use crate::state::PureState;

/// Output eigenvalues below this are treated as zero in gradients.
pub const GRADIENT_EIG_CLAMP: f64 = 1e-12;

const MIN_STEP: f64 = 1e-18;
const MAX_STEP: f64 = 1e12;

/// Gains below this (relative) are round-off; the run counts as converged.
const STALL_TOL: f64 = 1e-15;

/// Sufficient-increase constant of the backtracking test.
const ARMIJO: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub grad_tol: f64,
    pub step_init: f64,
    pub backtrack_factor: f64,
    pub seed: u64,
    /// Also start from every computational basis state.
    pub basis_starts: bool,
    /// Keep the objective sequence of every restart.
    pub record_trajectories: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 20,
            max_iters: 2000,
            grad_tol: 1e-9,
            step_init: 1.0,
            backtrack_factor: 0.5,
            seed: 0,
            basis_starts: true,
            record_trajectories: false,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::invalid("restarts must be at least 1"));
        }
        if !(self.grad_tol > 0.0) {
            return Err(Error::invalid("grad_tol must be positive"));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(Error::invalid("backtrack_factor must lie in (0, 1)"));
        }
        if !(self.step_init > 0.0) || !self.step_init.is_finite() {
            return Err(Error::invalid("step_init must be positive and finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityEstimate {
    pub p: f64,
    /// Estimate of `nu_p`, the largest of `per_restart_values`.
    pub value: f64,
    #[serde(with = "pure_state_serde")]
    pub maximizer: PureState,
    pub per_restart_values: Vec<f64>,
    pub iterations_used: Vec<usize>,
    /// Whether the winning restart met the gradient tolerance before `max_iters`.
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trajectories: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    /// Estimate of `S_min`, the smallest of `per_restart_values`.
    pub value: f64,
    #[serde(with = "pure_state_serde")]
    pub minimizer: PureState,
    pub per_restart_values: Vec<f64>,
    pub iterations_used: Vec<usize>,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trajectories: Option<Vec<Vec<f64>>>,
}

/// Pure states serialize as `[[re, im], ...]`.
pub mod pure_state_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: &PureState, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<[f64; 2]> = s.amplitudes().iter().map(|z| [z.re, z.im]).collect();
        v.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> std::result::Result<PureState, D::Error> {
        let v: Vec<[f64; 2]> = Vec::deserialize(de)?;
        let amps = DVector::from_iterator(v.len(), v.iter().map(|&[re, im]| c64(re, im)));
        PureState::normalized(amps).map_err(serde::de::Error::custom)
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::domain(format!("p must be finite and >= 1, got {p}")));
    }
    Ok(())
}

fn check_input(ch: &Channel, v: &DVector<C64>) -> Result<()> {
    if v.len() != ch.dim_in() {
        return Err(Error::dim(format!(
            "state of dimension {} for a channel on dimension {}",
            v.len(),
            ch.dim_in()
        )));
    }
    Ok(())
}

fn output(ch: &Channel, v: &DVector<C64>) -> Result<EigenDecomposition> {
    let sigma = ch.apply_hermitian(&HermitianMatrix::outer(v))?;
    linalg::herm_eig(&sigma)
}

fn power_sum(eig: &EigenDecomposition, p: f64) -> f64 {
    eig.eigenvalues.iter().map(|&x| x.max(0.0).powf(p)).sum()
}

fn entropy_sum(eig: &EigenDecomposition) -> f64 {
    let clamped: Vec<f64> = eig.eigenvalues.iter().map(|&x| x.max(0.0)).collect();
    linalg::entropy_of_spectrum(&clamped)
}

/// `Tr Phi(psi psi*)^p` over clamped eigenvalues.
pub fn objective(ch: &Channel, psi: &PureState, p: f64) -> Result<f64> {
    objective_unnormalized(ch, psi.amplitudes(), p)
}

/// [`objective`] for an arbitrary (not necessarily unit) vector.
pub fn objective_unnormalized(ch: &Channel, v: &DVector<C64>, p: f64) -> Result<f64> {
    check_p(p)?;
    check_input(ch, v)?;
    Ok(power_sum(&output(ch, v)?, p))
}

fn gradient_from_eig(ch: &Channel, v: &DVector<C64>, eig: &EigenDecomposition, weight: impl Fn(f64) -> f64, scale: f64) -> Result<DVector<C64>> {
    let w = eig.map(weight);
    let pulled: ComplexMatrix = ch.apply_adjoint(w.as_matrix())?;
    Ok(pulled * v * c64(scale, 0.0))
}

/// Euclidean gradient of [`objective`] in the real coordinates of `psi`,
/// packed as a complex vector: `2p Phi^dagger(sigma^(p-1)) psi`.
pub fn objective_gradient(ch: &Channel, psi: &PureState, p: f64) -> Result<DVector<C64>> {
    objective_gradient_unnormalized(ch, psi.amplitudes(), p)
}

pub fn objective_gradient_unnormalized(ch: &Channel, v: &DVector<C64>, p: f64) -> Result<DVector<C64>> {
    check_p(p)?;
    check_input(ch, v)?;
    let eig = output(ch, v)?;
    gradient_from_eig(ch, v, &eig, |x| p_weight(x, p), 2.0 * p)
}

fn p_weight(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        1.0
    } else if x < GRADIENT_EIG_CLAMP {
        0.0
    } else {
        x.powf(p - 1.0)
    }
}

fn log_weight(x: f64) -> f64 {
    x.max(GRADIENT_EIG_CLAMP).ln() + 1.0
}

/// `S(Phi(v v*))` for an arbitrary vector.
pub fn entropy_objective_unnormalized(ch: &Channel, v: &DVector<C64>) -> Result<f64> {
    check_input(ch, v)?;
    Ok(entropy_sum(&output(ch, v)?))
}

/// Euclidean gradient of the output entropy: `-2 Phi^dagger(log sigma + I) v`.
pub fn entropy_gradient_unnormalized(ch: &Channel, v: &DVector<C64>) -> Result<DVector<C64>> {
    check_input(ch, v)?;
    let eig = output(ch, v)?;
    gradient_from_eig(ch, v, &eig, log_weight, -2.0)
}

/// The quantity being maximized on the sphere.
trait SphereObjective: Sync {
    fn value_and_eig(&self, v: &DVector<C64>) -> Result<(f64, EigenDecomposition)>;
    fn gradient(&self, v: &DVector<C64>, eig: &EigenDecomposition) -> Result<DVector<C64>>;
}

struct PowerTrace<'a> {
    ch: &'a Channel,
    p: f64,
}

impl SphereObjective for PowerTrace<'_> {
    fn value_and_eig(&self, v: &DVector<C64>) -> Result<(f64, EigenDecomposition)> {
        let eig = output(self.ch, v)?;
        Ok((power_sum(&eig, self.p), eig))
    }

    fn gradient(&self, v: &DVector<C64>, eig: &EigenDecomposition) -> Result<DVector<C64>> {
        let p = self.p;
        gradient_from_eig(self.ch, v, eig, |x| p_weight(x, p), 2.0 * p)
    }
}

/// Negated output entropy, so that ascent minimizes entropy.
struct NegEntropy<'a> {
    ch: &'a Channel,
}

impl SphereObjective for NegEntropy<'_> {
    fn value_and_eig(&self, v: &DVector<C64>) -> Result<(f64, EigenDecomposition)> {
        let eig = output(self.ch, v)?;
        Ok((-entropy_sum(&eig), eig))
    }

    fn gradient(&self, v: &DVector<C64>, eig: &EigenDecomposition) -> Result<DVector<C64>> {
        gradient_from_eig(self.ch, v, eig, log_weight, 2.0)
    }
}

#[derive(Debug, Clone)]
struct Run {
    value: f64,
    state: DVector<C64>,
    iterations: usize,
    converged: bool,
    trajectory: Vec<f64>,
}

fn normalize(v: DVector<C64>) -> DVector<C64> {
    let n = v.norm();
    v / c64(n, 0.0)
}

/// Projected gradient ascent with Armijo backtracking. Each accepted step
/// satisfies `f(new) >= f(old) + c t |g|^2`, so the recorded trajectory is
/// non-decreasing. A bare `f(new) >= f(old)` test is not enough: near a
/// symmetric maximum the half step lands on the mirror image of the current
/// point and the iteration oscillates in place.
fn ascend(obj: &dyn SphereObjective, start: DVector<C64>, cfg: &OptimizerConfig) -> Result<Run> {
    let mut x = normalize(start);
    let (mut f, mut eig) = obj.value_and_eig(&x)?;
    let mut trajectory = vec![f];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        let g = obj.gradient(&x, &eig)?;
        let radial = x.dotc(&g).re;
        let tangent = &g - &x * c64(radial, 0.0);
        if tangent.norm() < cfg.grad_tol {
            converged = true;
            break;
        }
        iterations += 1;
        let slope = tangent.norm_squared();
        let accepted = line_search(obj, &x, &tangent, f, slope, cfg)?;
        match accepted {
            Some(Step { state: cand, value: fc, eig: ec }) => {
                let gain = fc - f;
                x = cand;
                f = fc;
                eig = ec;
                trajectory.push(f);
                if gain <= STALL_TOL * f.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            // No ascent direction resolvable in floating point.
            None => {
                converged = true;
                break;
            }
        }
    }
    Ok(Run {
        value: f,
        state: x,
        iterations,
        converged,
        trajectory,
    })
}

struct Step {
    state: DVector<C64>,
    value: f64,
    eig: EigenDecomposition,
}

/// Backtracks from `step_init` by `backtrack_factor` until the Armijo test
/// passes, then keeps moving along the same geometric grid of step sizes
/// (down, or up if the initial step was accepted) while the objective improves.
///
/// Taking the first acceptable step is not enough here: near a symmetric
/// maximum the half step lands almost on the mirror image of the current point
/// and the iterates contract very slowly.
fn line_search(
    obj: &dyn SphereObjective,
    x: &DVector<C64>,
    tangent: &DVector<C64>,
    f: f64,
    slope: f64,
    cfg: &OptimizerConfig,
) -> Result<Option<Step>> {
    let eval = |t: f64| -> Result<Step> {
        let state = normalize(x + tangent * c64(t, 0.0));
        let (value, eig) = obj.value_and_eig(&state)?;
        Ok(Step { state, value, eig })
    };
    let mut t = cfg.step_init;
    let mut best = loop {
        if t < MIN_STEP {
            return Ok(None);
        }
        let step = eval(t)?;
        if step.value >= f + ARMIJO * t * slope {
            break step;
        }
        t *= cfg.backtrack_factor;
    };
    let factor = if t == cfg.step_init {
        1.0 / cfg.backtrack_factor
    } else {
        cfg.backtrack_factor
    };
    loop {
        let next_t = t * factor;
        if !(MIN_STEP..=MAX_STEP).contains(&next_t) {
            break;
        }
        let next = eval(next_t)?;
        if next.value > best.value {
            best = next;
            t = next_t;
        } else if factor > 1.0 && t == cfg.step_init {
            // Growing did not help; try shrinking instead.
            return shrink_from(eval, best, t, cfg.backtrack_factor).map(Some);
        } else {
            break;
        }
    }
    Ok(Some(best))
}

fn shrink_from(eval: impl Fn(f64) -> Result<Step>, mut best: Step, mut t: f64, factor: f64) -> Result<Step> {
    loop {
        let next_t = t * factor;
        if next_t < MIN_STEP {
            return Ok(best);
        }
        let next = eval(next_t)?;
        if next.value > best.value {
            best = next;
            t = next_t;
        } else {
            return Ok(best);
        }
    }
}

fn starting_points(dim: usize, cfg: &OptimizerConfig, warm: &[PureState]) -> Vec<DVector<C64>> {
    let mut starts: Vec<DVector<C64>> = warm.iter().map(|s| s.amplitudes().clone()).collect();
    if cfg.basis_starts {
        starts.extend((0..dim).map(|i| PureState::basis(dim, i).amplitudes().clone()));
    }
    starts.extend((0..cfg.restarts).map(|r| {
        let mut rng = random::stream_rng(cfg.seed, r as u64);
        random::random_unit_vector(dim, &mut rng)
    }));
    starts
}

fn multi_start(obj: &dyn SphereObjective, dim: usize, cfg: &OptimizerConfig, warm: &[PureState]) -> Result<Vec<Run>> {
    cfg.validate()?;
    if let Some(w) = warm.iter().find(|w| w.dim() != dim) {
        return Err(Error::dim(format!("warm start of dimension {} for input dimension {dim}", w.dim())));
    }
    starting_points(dim, cfg, warm)
        .into_par_iter()
        .map(|s| ascend(obj, s, cfg))
        .collect()
}

/// Index of the first maximal value.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn estimate_nu_p(ch: &Channel, p: f64, cfg: &OptimizerConfig) -> Result<PurityEstimate> {
    estimate_nu_p_with_starts(ch, p, cfg, &[])
}

/// [`estimate_nu_p`] with extra starting states run ahead of the structured and random ones.
pub fn estimate_nu_p_with_starts(ch: &Channel, p: f64, cfg: &OptimizerConfig, warm: &[PureState]) -> Result<PurityEstimate> {
    check_p(p)?;
    cfg.validate()?;
    let dim = ch.dim_in();
    if p == 1.0 && ch.is_trace_preserving() {
        let maximizer = warm.first().cloned().unwrap_or_else(|| PureState::basis(dim, 0));
        return Ok(PurityEstimate {
            p,
            value: 1.0,
            maximizer,
            per_restart_values: vec![1.0],
            iterations_used: vec![0],
            converged: true,
            trajectories: cfg.record_trajectories.then(|| vec![vec![1.0]]),
        });
    }
    let runs = multi_start(&PowerTrace { ch, p }, dim, cfg, warm)?;
    let per_restart_values: Vec<f64> = runs.iter().map(|r| r.value.powf(1.0 / p)).collect();
    let best = argmax(&per_restart_values);
    Ok(PurityEstimate {
        p,
        value: per_restart_values[best],
        maximizer: PureState::new(runs[best].state.clone())?,
        per_restart_values,
        iterations_used: runs.iter().map(|r| r.iterations).collect(),
        converged: runs[best].converged,
        trajectories: cfg
            .record_trajectories
            .then(|| runs.iter().map(|r| r.trajectory.clone()).collect()),
    })
}

pub fn estimate_s_min(ch: &Channel, cfg: &OptimizerConfig) -> Result<EntropyEstimate> {
    estimate_s_min_with_starts(ch, cfg, &[])
}

pub fn estimate_s_min_with_starts(ch: &Channel, cfg: &OptimizerConfig, warm: &[PureState]) -> Result<EntropyEstimate> {
    if !ch.is_trace_preserving() {
        return Err(Error::domain("minimal output entropy needs a trace-preserving channel"));
    }
    let runs = multi_start(&NegEntropy { ch }, ch.dim_in(), cfg, warm)?;
    let negated: Vec<f64> = runs.iter().map(|r| r.value).collect();
    let best = argmax(&negated);
    Ok(EntropyEstimate {
        value: (-negated[best]).max(0.0),
        minimizer: PureState::new(runs[best].state.clone())?,
        per_restart_values: negated.iter().map(|v| (-v).max(0.0)).collect(),
        iterations_used: runs.iter().map(|r| r.iterations).collect(),
        converged: runs[best].converged,
        trajectories: cfg
            .record_trajectories
            .then(|| runs.iter().map(|r| r.trajectory.iter().map(|v| -v).collect()).collect()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductBound {
    /// `nu_p(phi) * nu_p(psi)` as estimated.
    pub value: f64,
    #[serde(with = "pure_state_serde")]
    pub witness: PureState,
    pub phi: PurityEstimate,
    pub psi: PurityEstimate,
}

/// Lower bound on `nu_p(phi (x) psi)` from product inputs, with its witness.
pub fn product_state_lower_bound(phi: &Channel, psi: &Channel, p: f64, cfg: &OptimizerConfig) -> Result<ProductBound> {
    let a = estimate_nu_p(phi, p, cfg)?;
    // Independent streams for the second factor.
    let b = estimate_nu_p(psi, p, &cfg.clone().with_seed(cfg.seed ^ 0x9E37_79B9_7F4A_7C15))?;
    Ok(ProductBound {
        value: a.value * b.value,
        witness: PureState::product(&a.maximizer, &b.maximizer),
        phi: a,
        psi: b,
    })
}

/// Estimate of `nu_p(phi (x) psi)` on the product channel, with the product
/// witness of `bound` injected as the first start.
pub fn estimate_nu_p_product(phi: &Channel, psi: &Channel, p: f64, cfg: &OptimizerConfig, bound: &ProductBound) -> Result<PurityEstimate> {
    let both = Channel::from(channel::tensor(phi, psi)?);
    estimate_nu_p_with_starts(&both, p, cfg, std::slice::from_ref(&bound.witness))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{completely_depolarizing, random_channel_from_rng, random_diagonal_from_rng, werner_holevo, DiagonalChannel};
    use crate::random::random_unit_vector;
    use rand::Rng;

    fn quick() -> OptimizerConfig {
        OptimizerConfig {
            restarts: 6,
            ..OptimizerConfig::default()
        }
    }

    /// Central differences on the real and imaginary parts, packed as `d/dx + i d/dy`.
    fn finite_difference(f: impl Fn(&DVector<C64>) -> f64, v: &DVector<C64>, h: f64) -> DVector<C64> {
        DVector::from_fn(v.len(), |j, _| {
            let mut plus = v.clone();
            let mut minus = v.clone();
            plus[j] += c64(h, 0.0);
            minus[j] -= c64(h, 0.0);
            let dx = (f(&plus) - f(&minus)) / (2.0 * h);
            let mut plus = v.clone();
            let mut minus = v.clone();
            plus[j] += c64(0.0, h);
            minus[j] -= c64(0.0, h);
            let dy = (f(&plus) - f(&minus)) / (2.0 * h);
            c64(dx, dy)
        })
    }

    fn tangent(v: &DVector<C64>, g: &DVector<C64>) -> DVector<C64> {
        g - v * c64(v.dotc(g).re, 0.0)
    }

    #[test]
    fn objective_values() {
        let mut rng = random::stream_rng(1, 0);
        let psi = PureState::new(random_unit_vector(3, &mut rng)).unwrap();
        let id = Channel::identity(3);
        for p in [1.0, 2.0, 4.5] {
            assert!((objective(&id, &psi, p).unwrap() - 1.0).abs() < 1e-12);
        }
        let wh = Channel::from(werner_holevo(3).unwrap());
        assert!((objective(&wh, &psi, 5.0).unwrap() - 1.0 / 16.0).abs() < 1e-14);
        let deph = Channel::from(DiagonalChannel::dephasing(3));
        for p in [1.0, 3.0] {
            assert!((objective(&deph, &PureState::basis(3, 0), p).unwrap() - 1.0).abs() < 1e-15);
        }
        assert!(matches!(objective(&id, &psi, 0.9), Err(Error::Domain(_))));
        assert!(matches!(objective(&Channel::identity(2), &psi, 2.0), Err(Error::Dimension(_))));
    }

    #[test]
    fn identity_gradient_is_radial() {
        let mut rng = random::stream_rng(2, 0);
        let id = Channel::identity(4);
        for p in [1.0, 2.0] {
            let psi = PureState::new(random_unit_vector(4, &mut rng)).unwrap();
            let g = objective_gradient(&id, &psi, p).unwrap();
            assert!(tangent(psi.amplitudes(), &g).norm() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = random::stream_rng(3, 0);
        for _ in 0..10 {
            let ch = Channel::from(random_channel_from_rng(3, 3, 2, &mut rng).unwrap());
            let v = random_unit_vector(3, &mut rng);
            for p in [1.0, 1.3, 2.5, 4.0] {
                let g = objective_gradient_unnormalized(&ch, &v, p).unwrap();
                let fd = finite_difference(|x| objective_unnormalized(&ch, x, p).unwrap(), &v, 1e-6);
                assert!((&g - &fd).norm() <= 1e-5 * g.norm().max(1e-300), "p={p}");
            }
            let g = entropy_gradient_unnormalized(&ch, &v).unwrap();
            let fd = finite_difference(|x| entropy_objective_unnormalized(&ch, x).unwrap(), &v, 1e-6);
            assert!((&g - &fd).norm() <= 1e-5 * g.norm(), "entropy");
        }
        let d = Channel::from(random_diagonal_from_rng(4, 2, true, &mut rng).unwrap());
        let v = random_unit_vector(4, &mut rng);
        let g = objective_gradient_unnormalized(&d, &v, 3.0).unwrap();
        let fd = finite_difference(|x| objective_unnormalized(&d, x, 3.0).unwrap(), &v, 1e-6);
        assert!((&g - &fd).norm() <= 1e-5 * g.norm());
    }

    #[test]
    fn nu_p_identity_and_werner_holevo() {
        let est = estimate_nu_p(&Channel::identity(3), 3.0, &quick()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-10);
        let wh = Channel::from(werner_holevo(3).unwrap());
        let est = estimate_nu_p(&wh, 5.0, &quick()).unwrap();
        assert!((est.value - 2f64.powf(-0.8)).abs() < 1e-6);
        for d in [2usize, 4] {
            let wh = Channel::from(werner_holevo(d).unwrap());
            let p = 2.5;
            let est = estimate_nu_p(&wh, p, &quick()).unwrap();
            assert!((est.value - ((d - 1) as f64).powf((1.0 - p) / p)).abs() < 1e-6);
        }
    }

    #[test]
    fn nu_p_self_consistency_and_monotone_trajectories() {
        let mut rng = random::stream_rng(4, 0);
        let cfg = OptimizerConfig {
            record_trajectories: true,
            ..quick()
        };
        for _ in 0..4 {
            let ch = Channel::from(random_channel_from_rng(3, 2, 2, &mut rng).unwrap());
            let p = rng.random_range(1.1..5.0);
            let est = estimate_nu_p(&ch, p, &cfg).unwrap();
            let again = objective(&ch, &est.maximizer, p).unwrap().powf(1.0 / p);
            assert!((est.value - again).abs() <= 1e-12 * est.value);
            assert_eq!(est.value, est.per_restart_values.iter().cloned().fold(f64::MIN, f64::max));
            for t in est.trajectories.as_ref().unwrap() {
                assert!(t.windows(2).all(|w| w[1] >= w[0]));
            }
            let lo = 2f64.powf((1.0 - p) / p);
            assert!(est.value >= lo - 1e-12 && est.value <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn tp_diagonal_reaches_one() {
        let mut rng = random::stream_rng(5, 0);
        let d = Channel::from(random_diagonal_from_rng(3, 2, true, &mut rng).unwrap());
        let est = estimate_nu_p(&d, 2.0, &quick()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-10);
        let no_basis = OptimizerConfig {
            basis_starts: false,
            ..quick()
        };
        let deph = Channel::from(DiagonalChannel::dephasing(3));
        let est = estimate_nu_p(&deph, 2.0, &no_basis).unwrap();
        assert!((est.value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn p_one_short_circuit() {
        let wh = Channel::from(werner_holevo(3).unwrap());
        let est = estimate_nu_p(&wh, 1.0, &quick()).unwrap();
        assert_eq!(est.value, 1.0);
        assert_eq!(est.iterations_used, vec![0]);
    }

    #[test]
    fn deterministic_in_seed() {
        let ch = Channel::from(crate::channel::random_channel(3, 3, 2, 8).unwrap());
        let a = estimate_nu_p(&ch, 2.5, &quick().with_seed(3)).unwrap();
        let b = estimate_nu_p(&ch, 2.5, &quick().with_seed(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn s_min_cases() {
        let cfg = quick();
        assert!(estimate_s_min(&Channel::identity(3), &cfg).unwrap().value.abs() < 1e-12);
        let wh = Channel::from(werner_holevo(3).unwrap());
        assert!((estimate_s_min(&wh, &cfg).unwrap().value - 2f64.ln()).abs() < 1e-6);
        let dep = Channel::from(completely_depolarizing(3));
        assert!((estimate_s_min(&dep, &cfg).unwrap().value - 3f64.ln()).abs() < 1e-10);
        let non_tp = Channel::from(DiagonalChannel::new(HermitianMatrix::from_real_diagonal(&[2.0, 1.0])).unwrap());
        assert!(matches!(estimate_s_min(&non_tp, &cfg), Err(Error::Domain(_))));
    }

    #[test]
    fn product_bound_cases() {
        let cfg = quick();
        let id = Channel::identity(2);
        let b = product_state_lower_bound(&id, &id, 2.0, &cfg).unwrap();
        assert!((b.value - 1.0).abs() < 1e-10);

        let wh = Channel::from(werner_holevo(3).unwrap());
        let b = product_state_lower_bound(&wh, &wh, 5.0, &cfg).unwrap();
        assert!((b.value - 2f64.powf(-1.6)).abs() < 1e-6);
        let both = Channel::from(channel::tensor(&wh, &wh).unwrap());
        let re = objective(&both, &b.witness, 5.0).unwrap().powf(0.2);
        assert!((re - b.value).abs() <= 1e-10 * b.value);

        let ones = Channel::from(DiagonalChannel::new(HermitianMatrix::symmetrize(linalg::ones(2, 2))).unwrap());
        let b = product_state_lower_bound(&ones, &Channel::identity(2), 3.0, &cfg).unwrap();
        assert!((b.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn product_run_never_drops_below_witness() {
        let mut rng = random::stream_rng(6, 0);
        let cfg = quick();
        for _ in 0..3 {
            let phi = Channel::from(random_diagonal_from_rng(2, 2, false, &mut rng).unwrap());
            let psi = Channel::from(random_channel_from_rng(2, 2, 2, &mut rng).unwrap());
            let p = 2.0;
            let b = product_state_lower_bound(&phi, &psi, p, &cfg).unwrap();
            let est = estimate_nu_p_product(&phi, &psi, p, &cfg, &b).unwrap();
            assert!(est.value >= b.value - 1e-8);
        }
    }

    #[test]
    fn config_validation() {
        let bad = OptimizerConfig { restarts: 0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = OptimizerConfig { backtrack_factor: 1.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = OptimizerConfig { grad_tol: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
