//! Synthetic-data generation and nonlinear least-squares fitting for the four
//! model families: flux curve, loss-rate curve, avoided crossings, and
//! number-splitting spectra.
//!
//! The solver is a damped (Levenberg-Marquardt style) iteration on a
//! central-difference Jacobian. All parameters are normalized to O(1) by
//! their bounds before differentiation, and every step is clamped back into
//! the bounds. The whole pipeline is deterministic: identical problems give
//! bit-identical results, and all randomness in data synthesis flows from an
//! explicit seed.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::idt::{self, IdtParams, QubitEnvironment};
use crate::jc;
use crate::mirror::ModeTable;
use crate::spectra::{self, NumberSplitParams};
use crate::transmon::{freq_vs_current, TransmonParams};

const MAX_ITERATIONS: usize = 500;
const RESIDUAL_TOL: f64 = 1e-10;
const STEP_TOL: f64 = 1e-12;

/// Forward model attached to a fit problem. Payload carries whatever fixed
/// structure the model needs beyond the fitted parameter vector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ModelKind {
    /// y = p0·x + p1.
    Linear,
    /// Flux curve; params [f₀, a, I_c, I₀].
    FluxCurve,
    /// Loss-rate curve; params [Q_i, Γ₀, f_c, τ]. N_q is fixed geometry.
    T1Curve { n_periods: u32 },
    /// Avoided-crossing branches; params [f_1..f_M, g_1..g_M]. Each current
    /// appears (M+1) times in x, matched against sorted eigenfrequencies.
    Crossings {
        transmon: TransmonParams,
        n_modes: usize,
    },
    /// Joint number-splitting fit; params [χ, κ, γ] shared, then
    /// [n̄, C₀, C₁] per trace. x is the concatenation of the trace grids.
    NumberSplit {
        qubit_freq: f64,
        n_max: u32,
        trace_lens: Vec<usize>,
        pull_per_phonon: f64,
    },
}

impl ModelKind {
    pub fn n_params(&self) -> usize {
        match self {
            ModelKind::Linear => 2,
            ModelKind::FluxCurve => 4,
            ModelKind::T1Curve { .. } => 4,
            ModelKind::Crossings { n_modes, .. } => 2 * n_modes,
            ModelKind::NumberSplit { trace_lens, .. } => 3 + 3 * trace_lens.len(),
        }
    }

    /// Evaluate the forward model on the full abscissa vector.
    pub fn eval(&self, params: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        if params.len() != self.n_params() {
            return Err(Error::FitSetup(format!(
                "expected {} parameters, got {}",
                self.n_params(),
                params.len()
            )));
        }
        match self {
            ModelKind::Linear => Ok(x.iter().map(|&v| params[0] * v + params[1]).collect()),
            ModelKind::FluxCurve => {
                let p = TransmonParams {
                    zero_field_freq: params[0],
                    asymmetry: params[1],
                    half_quantum_current: params[2],
                    offset_current: params[3],
                    anharmonicity: -190e6,
                    q_internal: 1.0,
                    pure_dephasing: 0.0,
                };
                Ok(x.iter().map(|&i| freq_vs_current(i, &p)).collect())
            }
            ModelKind::T1Curve { n_periods } => {
                let idt = IdtParams {
                    n_periods: *n_periods,
                    center_freq: params[2],
                    delay: params[3],
                    max_emission: params[1].max(f64::MIN_POSITIVE),
                    max_coupling: 1.0,
                    sound_speed: 2880.0,
                    pitch: None,
                    half_length: None,
                    separation: None,
                };
                let env = QubitEnvironment {
                    q_internal: params[0],
                    lamb_variant: Default::default(),
                };
                x.iter()
                    .map(|&f| idt::emission_rate(f, &idt, &env))
                    .collect()
            }
            ModelKind::Crossings { transmon, n_modes } => {
                let m = *n_modes;
                let rows = m + 1;
                if x.len() % rows != 0 {
                    return Err(Error::FitSetup(
                        "crossings abscissa length must be a multiple of M+1".into(),
                    ));
                }
                let mut out = Vec::with_capacity(x.len());
                for group in x.chunks(rows) {
                    let current = group[0];
                    let f_q = freq_vs_current(current, transmon);
                    let mut h = DMatrix::<f64>::zeros(rows, rows);
                    for k in 0..m {
                        h[(k, k)] = params[k];
                        h[(k, m)] = params[m + k];
                        h[(m, k)] = params[m + k];
                    }
                    h[(m, m)] = f_q;
                    out.extend(jc::eigenfrequencies(&h)?);
                }
                Ok(out)
            }
            ModelKind::NumberSplit {
                qubit_freq,
                n_max,
                trace_lens,
                pull_per_phonon,
            } => {
                let total: usize = trace_lens.iter().sum();
                if x.len() != total {
                    return Err(Error::FitSetup(
                        "number-split abscissa length must match trace_lens".into(),
                    ));
                }
                let mut out = Vec::with_capacity(total);
                let mut offset = 0;
                for (t, &len) in trace_lens.iter().enumerate() {
                    let n_bar = params[3 + 3 * t].max(0.0);
                    let p = NumberSplitParams {
                        qubit_freq: *qubit_freq,
                        qubit_linewidth: params[2].max(1.0),
                        mode_loss: params[1].max(0.0),
                        half_shift: params[0],
                        n_max: *n_max,
                        offset: params[3 + 3 * t + 1],
                        amplitude: params[3 + 3 * t + 2].max(f64::MIN_POSITIVE),
                        pull_per_phonon: *pull_per_phonon,
                    };
                    let trace =
                        spectra::number_split_spectrum(&x[offset..offset + len], &p, n_bar)?;
                    out.extend(trace.values);
                    offset += len;
                }
                Ok(out)
            }
        }
    }
}

/// A nonlinear least-squares problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitProblem {
    pub model: ModelKind,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Per-point noise scale; residuals are divided by it.
    pub sigma: Vec<f64>,
    pub init: Vec<f64>,
    /// Per-parameter (low, high) intervals, also used to normalize scales.
    pub bounds: Vec<(f64, f64)>,
    /// Optional exclusion list; `true` removes the point from the fit.
    pub mask: Option<Vec<bool>>,
}

impl FitProblem {
    fn validate(&self) -> Result<()> {
        let n = self.x.len();
        if self.y.len() != n || self.sigma.len() != n {
            return Err(Error::FitSetup("x/y/sigma lengths differ".into()));
        }
        if let Some(mask) = &self.mask {
            if mask.len() != n {
                return Err(Error::FitSetup("mask length differs from x".into()));
            }
        }
        let p = self.model.n_params();
        if self.init.len() != p || self.bounds.len() != p {
            return Err(Error::FitSetup(format!(
                "init/bounds must have {p} entries"
            )));
        }
        for (k, (&v, &(lo, hi))) in self.init.iter().zip(&self.bounds).enumerate() {
            if !(lo < hi) {
                return Err(Error::FitSetup(format!("bounds[{k}] empty: [{lo}, {hi}]")));
            }
            if v < lo || v > hi {
                return Err(Error::FitSetup(format!(
                    "init[{k}] = {v} outside bounds [{lo}, {hi}]"
                )));
            }
        }
        let unmasked = match &self.mask {
            Some(m) => m.iter().filter(|&&b| !b).count(),
            None => n,
        };
        if unmasked < p {
            return Err(Error::FitSetup(format!(
                "{unmasked} unmasked points for {p} parameters"
            )));
        }
        Ok(())
    }
}

/// Fit outcome. Covariance is in natural (unscaled) parameter units.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub params: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Deterministic synthetic dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticDataset {
    pub x: Vec<f64>,
    pub y_true: Vec<f64>,
    pub y_noisy: Vec<f64>,
    pub noise_sigma: f64,
    pub seed: u64,
}

/// Generate data from a forward model and perturb it with seeded noise.
///
/// Noise is additive Gaussian for every model except the loss-rate curve,
/// where it is multiplicative log-normal (decay-rate measurements carry
/// relative error and stay positive). For the multiplicative model
/// `noise_sigma` is the fractional scale.
pub fn synth_dataset(
    model: &ModelKind,
    params: &[f64],
    x: &[f64],
    noise_sigma: f64,
    seed: u64,
) -> Result<SyntheticDataset> {
    let y_true = model.eval(params, x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let multiplicative = matches!(model, ModelKind::T1Curve { .. });
    let y_noisy = y_true
        .iter()
        .map(|&y| {
            let z: f64 = StandardNormal.sample(&mut rng);
            if noise_sigma == 0.0 {
                y
            } else if multiplicative {
                y * (noise_sigma * z).exp()
            } else {
                y + noise_sigma * z
            }
        })
        .collect();
    Ok(SyntheticDataset {
        x: x.to_vec(),
        y_true,
        y_noisy,
        noise_sigma,
        seed,
    })
}

/// Derive a per-dataset seed from a run seed so adding a dataset never
/// perturbs earlier ones.
pub fn derived_seed(run_seed: u64, dataset_index: u64) -> u64 {
    run_seed
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(dataset_index)
}

struct Workspace<'a> {
    model: &'a ModelKind,
    x: Vec<f64>,
    y: Vec<f64>,
    inv_sigma: Vec<f64>,
    lo: Vec<f64>,
    span: Vec<f64>,
}

impl<'a> Workspace<'a> {
    fn unscale(&self, scaled: &[f64]) -> Vec<f64> {
        scaled
            .iter()
            .zip(&self.lo)
            .zip(&self.span)
            .map(|((s, lo), span)| lo + s * span)
            .collect()
    }

    fn residual(&self, scaled: &[f64]) -> Result<DVector<f64>> {
        let params = self.unscale(scaled);
        let y_model = self.model.eval(&params, &self.x)?;
        Ok(DVector::from_iterator(
            self.y.len(),
            y_model
                .iter()
                .zip(&self.y)
                .zip(&self.inv_sigma)
                .map(|((m, y), w)| (m - y) * w),
        ))
    }

    fn jacobian(&self, scaled: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.y.len();
        let p = scaled.len();
        let mut jac = DMatrix::<f64>::zeros(n, p);
        for k in 0..p {
            let step = (1e-6 * scaled[k].abs()).max(1e-9);
            let mut plus = scaled.to_vec();
            let mut minus = scaled.to_vec();
            plus[k] = (scaled[k] + step).min(1.0);
            minus[k] = (scaled[k] - step).max(0.0);
            let denom = plus[k] - minus[k];
            let r_plus = self.residual(&plus)?;
            let r_minus = self.residual(&minus)?;
            for i in 0..n {
                jac[(i, k)] = (r_plus[i] - r_minus[i]) / denom;
            }
        }
        Ok(jac)
    }
}

/// Iterative damped least-squares with a numerically estimated Jacobian.
///
/// Converges when the relative residual change drops below 1e-10 or the
/// scaled step norm below 1e-12; hitting the 500-iteration cap returns a
/// result with `converged = false` rather than an error.
pub fn least_squares_fit(problem: &FitProblem) -> Result<FitResult> {
    problem.validate()?;
    let keep: Vec<usize> = match &problem.mask {
        Some(mask) => (0..problem.x.len()).filter(|&i| !mask[i]).collect(),
        None => (0..problem.x.len()).collect(),
    };
    // For grouped models the mask must not break group structure; points are
    // masked by zero weight instead of removal.
    let grouped = matches!(
        problem.model,
        ModelKind::Crossings { .. } | ModelKind::NumberSplit { .. }
    );
    let (x, y, inv_sigma): (Vec<f64>, Vec<f64>, Vec<f64>) = if grouped {
        let weights = (0..problem.x.len())
            .map(|i| {
                if keep.binary_search(&i).is_ok() {
                    1.0 / problem.sigma[i]
                } else {
                    0.0
                }
            })
            .collect();
        (problem.x.clone(), problem.y.clone(), weights)
    } else {
        (
            keep.iter().map(|&i| problem.x[i]).collect(),
            keep.iter().map(|&i| problem.y[i]).collect(),
            keep.iter().map(|&i| 1.0 / problem.sigma[i]).collect(),
        )
    };
    let lo: Vec<f64> = problem.bounds.iter().map(|b| b.0).collect();
    let span: Vec<f64> = problem.bounds.iter().map(|b| b.1 - b.0).collect();
    let ws = Workspace {
        model: &problem.model,
        x,
        y,
        inv_sigma,
        lo,
        span,
    };
    let mut scaled: Vec<f64> = problem
        .init
        .iter()
        .zip(&ws.lo)
        .zip(&ws.span)
        .map(|((v, lo), span)| (v - lo) / span)
        .collect();

    let mut residual = ws.residual(&scaled)?;
    let mut cost = residual.norm_squared();
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    let mut jac = ws.jacobian(&scaled)?;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let g = &jt * &residual;
        // Damped normal equations with diagonal (Marquardt) scaling. A zero
        // diagonal entry means the parameter has no local influence; it gets
        // a floor so the solve stays regular and the parameter simply does
        // not move (the degeneracy surfaces in the covariance instead).
        let max_diag = (0..jtj.nrows())
            .map(|k| jtj[(k, k)])
            .fold(0.0_f64, f64::max);
        if max_diag == 0.0 {
            return Err(Error::RankDeficient);
        }
        let mut damped = jtj.clone();
        for k in 0..damped.nrows() {
            damped[(k, k)] += lambda * damped[(k, k)].max(1e-12 * max_diag);
        }
        let step = match damped.clone().lu().solve(&(-&g)) {
            Some(s) => s,
            None => return Err(Error::RankDeficient),
        };
        let mut trial: Vec<f64> = scaled
            .iter()
            .zip(step.iter())
            .map(|(s, d)| (s + d).clamp(0.0, 1.0))
            .collect();
        let trial_residual = ws.residual(&trial)?;
        let trial_cost = trial_residual.norm_squared();
        if trial_cost <= cost {
            let step_norm: f64 = scaled
                .iter()
                .zip(&trial)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let rel_change = if cost > 0.0 {
                (cost - trial_cost) / cost
            } else {
                0.0
            };
            std::mem::swap(&mut scaled, &mut trial);
            residual = trial_residual;
            cost = trial_cost;
            lambda = (lambda * 0.25).max(1e-12);
            if rel_change < RESIDUAL_TOL || step_norm < STEP_TOL {
                converged = true;
                break;
            }
            jac = ws.jacobian(&scaled)?;
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                // Stuck: damping saturated without progress.
                converged = true;
                break;
            }
        }
    }

    // Covariance in natural units: invert JᵀJ through its eigenbasis, scaled
    // by the residual variance and the bound spans. Near-null directions are
    // clamped to a finite but enormous variance so unidentifiable parameters
    // are flagged rather than silently reported as exact. The Jacobian is
    // refreshed at the final point so the covariance reflects the returned
    // parameters rather than the last intermediate iterate.
    let jac = ws.jacobian(&scaled)?;
    let jt = jac.transpose();
    let jtj = &jt * &jac;
    let p = scaled.len();
    let n_eff = ws.inv_sigma.iter().filter(|&&w| w != 0.0).count();
    let dof = n_eff.saturating_sub(p).max(1) as f64;
    let s2 = cost / dof;
    let eig = nalgebra::linalg::SymmetricEigen::new(jtj);
    let lam_max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let floor = (1e-12 * lam_max).max(f64::MIN_POSITIVE);
    let mut inv = DMatrix::<f64>::zeros(p, p);
    for k in 0..p {
        let lam = eig.eigenvalues[k].max(floor);
        let v = eig.eigenvectors.column(k);
        inv += v * v.transpose() / lam;
    }
    let mut covariance = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..p {
            covariance[i][j] = inv[(i, j)] * s2 * ws.span[i] * ws.span[j];
        }
    }
    // A parameter whose Jacobian column vanishes identically has no influence
    // on the data at the solution. Report an uncertainty a million times the
    // allowed range so the degeneracy is unmistakable regardless of how the
    // eigen clamp interacted with the other columns' scales.
    for k in 0..p {
        if jac.column(k).amax() == 0.0 {
            for j in 0..p {
                covariance[k][j] = 0.0;
                covariance[j][k] = 0.0;
            }
            covariance[k][k] = (1e6 * ws.span[k]).powi(2);
        }
    }

    Ok(FitResult {
        params: ws.unscale(&scaled),
        covariance,
        residual_norm: cost.sqrt(),
        iterations,
        converged,
    })
}

/// Fit the loss-rate curve Γ₁(f). Returns params [Q_i, Γ₀, f_c, τ].
///
/// The delay τ is initialized from a correlation scan of the oscillatory
/// residual against sin²(πfτ′) over τ′ ∈ 1–20 ns; the least-squares
/// landscape in τ is multimodal and a scan beats descent from a guess.
pub fn fit_t1_curve(data: &SyntheticDataset, n_periods: u32) -> Result<FitResult> {
    let x = &data.x;
    let y = &data.y_noisy;
    if x.len() < 8 {
        return Err(Error::FitSetup("too few points for a loss-rate fit".into()));
    }
    let y_min = y.iter().cloned().fold(f64::INFINITY, f64::min);
    let y_max = y.iter().cloned().fold(0.0_f64, f64::max);

    // Delay scan: maximize correlation with the interference pattern.
    // Linear detrend plus a Hann window suppress the response envelope's
    // spectral leakage, which otherwise dominates the scan at small τ′.
    let (slope, intercept, _) = crate::math::linear_regression(x, y);
    let centered: Vec<f64> = x
        .iter()
        .zip(y)
        .enumerate()
        .map(|(i, (&f, &v))| {
            let hann = 0.5
                - 0.5
                    * (2.0 * std::f64::consts::PI * i as f64 / (y.len() - 1) as f64).cos();
            (v - slope * f - intercept) * hann
        })
        .collect();
    let mut best_tau = 1e-9;
    let mut best_corr = f64::NEG_INFINITY;
    let mut tau = 1e-9;
    while tau <= 20e-9 {
        let corr: f64 = x
            .iter()
            .zip(&centered)
            .map(|(&f, &c)| {
                let s = (std::f64::consts::PI * f * tau).sin();
                c * (s * s - 0.5)
            })
            .sum();
        if corr > best_corr {
            best_corr = corr;
            best_tau = tau;
        }
        tau += 0.002e-9;
    }

    // Center frequency from the amplitude-weighted centroid of the excess
    // loss; quality factor from the floor.
    let floor = y_min.max(f64::MIN_POSITIVE);
    let weight_sum: f64 = y.iter().map(|v| (v - y_min).max(0.0)).sum();
    let f_c_init = if weight_sum > 0.0 {
        x.iter()
            .zip(y)
            .map(|(&f, &v)| f * (v - y_min).max(0.0))
            .sum::<f64>()
            / weight_sum
    } else {
        x[x.len() / 2]
    };
    let f_mid = x[x.len() / 2];
    let q_init = f_mid / floor;
    let gamma0_init = (y_max - y_min).max(1e3);

    let problem = FitProblem {
        model: ModelKind::T1Curve { n_periods },
        x: x.clone(),
        y: y.clone(),
        sigma: y.iter().map(|v| v.abs().max(1.0)).collect(),
        init: vec![q_init, gamma0_init, f_c_init, best_tau],
        bounds: vec![
            (q_init / 10.0, q_init * 10.0),
            (gamma0_init / 10.0, gamma0_init * 10.0),
            (f_c_init - 1e9, f_c_init + 1e9),
            (best_tau * 0.9, best_tau * 1.1),
        ],
        mask: None,
    };
    least_squares_fit(&problem)
}

/// Fit mode frequencies and couplings to avoided-crossing branch data.
///
/// `branches[i]` holds the sorted branch frequencies measured at
/// `currents[i]`; the transmon flux parameters are taken as known from the
/// skeleton and only (f_m, g_m) per mode are free.
pub fn fit_crossings(
    currents: &[f64],
    branches: &[Vec<f64>],
    skeleton: &jc::SystemModel,
    sigma: f64,
) -> Result<FitResult> {
    let m = skeleton.modes.modes.len();
    if currents.len() != branches.len() {
        return Err(Error::FitSetup("currents/branches lengths differ".into()));
    }
    let rows = m + 1;
    let mut x = Vec::with_capacity(currents.len() * rows);
    let mut y = Vec::with_capacity(currents.len() * rows);
    for (&i, row) in currents.iter().zip(branches) {
        if row.len() != rows {
            return Err(Error::FitSetup(format!(
                "each crossing row must list {rows} branches"
            )));
        }
        for &b in row {
            x.push(i);
            y.push(b);
        }
    }
    let mut init = Vec::with_capacity(2 * m);
    let mut bounds = Vec::with_capacity(2 * m);
    for mode in &skeleton.modes.modes {
        init.push(mode.freq);
        bounds.push((mode.freq - 5e6, mode.freq + 5e6));
    }
    for mode in &skeleton.modes.modes {
        init.push(mode.coupling);
        bounds.push((mode.coupling - 3e6, mode.coupling + 3e6));
    }
    let n = x.len();
    let problem = FitProblem {
        model: ModelKind::Crossings {
            transmon: skeleton.transmon.clone(),
            n_modes: m,
        },
        x,
        y,
        sigma: vec![sigma.max(f64::MIN_POSITIVE); n],
        init,
        bounds,
        mask: None,
    };
    least_squares_fit(&problem)
}

/// Joint fit of several Stark-driven traces sharing {χ, κ, γ}, with
/// per-trace {n̄, C₀, C₁}. Returns params
/// [χ, κ, γ, n̄₁, C₀₁, C₁₁, n̄₂, ...].
pub fn fit_number_splitting(
    traces: &[spectra::SpectrumTrace],
    qubit_freq: f64,
    n_max: u32,
    pull_per_phonon: f64,
    init: &[f64],
    bounds: &[(f64, f64)],
    sigma: f64,
) -> Result<FitResult> {
    if traces.len() < 2 {
        return Err(Error::FitSetup(
            "joint number-splitting fit needs >= 2 traces at distinct powers".into(),
        ));
    }
    for t in traces {
        t.validate()?;
    }
    let trace_lens: Vec<usize> = traces.iter().map(|t| t.freqs.len()).collect();
    let x: Vec<f64> = traces.iter().flat_map(|t| t.freqs.clone()).collect();
    let y: Vec<f64> = traces.iter().flat_map(|t| t.values.clone()).collect();
    let n = x.len();
    let problem = FitProblem {
        model: ModelKind::NumberSplit {
            qubit_freq,
            n_max,
            trace_lens,
            pull_per_phonon,
        },
        x,
        y,
        sigma: vec![sigma.max(f64::MIN_POSITIVE); n],
        init: init.to_vec(),
        bounds: bounds.to_vec(),
        mask: None,
    };
    least_squares_fit(&problem)
}

/// Single-trace variant used for degeneracy diagnostics; same layout with
/// one per-trace block.
pub fn fit_number_splitting_single(
    trace: &spectra::SpectrumTrace,
    qubit_freq: f64,
    n_max: u32,
    init: &[f64],
    bounds: &[(f64, f64)],
    sigma: f64,
) -> Result<FitResult> {
    trace.validate()?;
    let n = trace.freqs.len();
    let problem = FitProblem {
        model: ModelKind::NumberSplit {
            qubit_freq,
            n_max,
            trace_lens: vec![n],
            pull_per_phonon: 0.0,
        },
        x: trace.freqs.clone(),
        y: trace.values.clone(),
        sigma: vec![sigma.max(f64::MIN_POSITIVE); n],
        init: init.to_vec(),
        bounds: bounds.to_vec(),
        mask: None,
    };
    least_squares_fit(&problem)
}

/// Convenience: build the current grid and branch rows for a crossing fit
/// from a model (synthetic "measurement").
pub fn synth_crossing_branches(
    currents: &[f64],
    model: &jc::SystemModel,
) -> Result<Vec<Vec<f64>>> {
    Ok(jc::crossing_spectrum(currents, model)?.branches)
}

/// Skeleton with perturbed mode parameters, for basin-of-attraction tests.
pub fn perturb_skeleton(model: &jc::SystemModel, df: f64, dg: f64, seed: u64) -> jc::SystemModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = model.clone();
    let table = ModeTable {
        modes: out
            .modes
            .modes
            .iter()
            .map(|m| {
                let zf: f64 = StandardNormal.sample(&mut rng);
                let zg: f64 = StandardNormal.sample(&mut rng);
                let mut m = m.clone();
                m.freq += df * zf;
                m.coupling += dg * zg;
                m
            })
            .collect(),
    };
    out.modes = table;
    out
}
