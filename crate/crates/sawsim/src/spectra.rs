//! Stark-driven qubit spectroscopy: Poisson-weighted Lorentzian combs, the
//! drive-power to mean-phonon-number map, and strong-dispersive
//! resolvability checks.
//!
//! The comb places the n-phonon peak at f_q − 2χ_m·n, following the sign of
//! the line-shape expression; the upward pull of the zero-phonon line with
//! drive power is carried entirely by the optional `pull_per_phonon` term
//! (0 for clean simulations, 150 kHz/phonon when replicating the measured
//! traces).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Parameters of one Stark-driven spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumberSplitParams {
    /// Zero-phonon qubit frequency f_q, Hz.
    pub qubit_freq: f64,
    /// Zero-phonon qubit linewidth γ, Hz.
    pub qubit_linewidth: f64,
    /// Mode loss rate κ_m, Hz.
    pub mode_loss: f64,
    /// Half the single-phonon Stark shift, χ_m, Hz.
    pub half_shift: f64,
    /// Poisson truncation, phonon numbers 0..=n_max.
    pub n_max: u32,
    /// Trace offset C₀.
    #[serde(default)]
    pub offset: f64,
    /// Overall amplitude C₁.
    pub amplitude: f64,
    /// Linear pull of the bare qubit frequency with n̄, Hz per phonon.
    #[serde(default)]
    pub pull_per_phonon: f64,
}

impl NumberSplitParams {
    /// Mode-7 operating point of the measured device (pull disabled).
    pub fn reference_mode7() -> Self {
        NumberSplitParams {
            qubit_freq: 4.318e9,
            qubit_linewidth: 550e3,
            mode_loss: 275e3,
            half_shift: 445e3,
            n_max: 6,
            offset: 0.0,
            amplitude: 1.0,
            pull_per_phonon: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.qubit_linewidth > 0.0) {
            return Err(Error::InvalidParams("γ must be > 0".into()));
        }
        if self.mode_loss < 0.0 {
            return Err(Error::InvalidParams("κ_m must be >= 0".into()));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidParams("n_max must be >= 1".into()));
        }
        if !(self.amplitude > 0.0) {
            return Err(Error::InvalidParams("amplitude must be > 0".into()));
        }
        Ok(())
    }
}

/// Excited-state signal sampled on a frequency grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumTrace {
    pub freqs: Vec<f64>,
    pub values: Vec<f64>,
}

impl SpectrumTrace {
    pub fn validate(&self) -> Result<()> {
        if self.freqs.len() != self.values.len() {
            return Err(Error::InvalidParams(
                "freqs and values must have equal length".into(),
            ));
        }
        if self.freqs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParams(
                "freqs must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

/// Drive power and its phonon conversion.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    /// Applied power, linear arbitrary units.
    pub power: f64,
    /// Phonons per power unit, η.
    pub conversion: f64,
}

impl DriveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.power < 0.0 {
            return Err(Error::InvalidParams("power must be >= 0".into()));
        }
        if !(self.conversion > 0.0) {
            return Err(Error::InvalidParams("conversion must be > 0".into()));
        }
        Ok(())
    }
}

/// Truncated Poisson distribution P_n = e^(−n̄)·n̄ⁿ/n! for n = 0..=n_max,
/// evaluated in log space.
pub fn poisson_weights(n_bar: f64, n_max: u32) -> Result<Vec<f64>> {
    if n_bar < 0.0 {
        return Err(Error::Domain(format!("n̄ must be >= 0, got {n_bar}")));
    }
    if n_bar == 0.0 {
        let mut w = vec![0.0; n_max as usize + 1];
        w[0] = 1.0;
        return Ok(w);
    }
    let mut log_factorial = 0.0;
    let mut weights = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        if n > 0 {
            log_factorial += (n as f64).ln();
        }
        weights.push((-n_bar + n as f64 * n_bar.ln() - log_factorial).exp());
    }
    Ok(weights)
}

/// Unit-area Lorentzian of full width `width` centered at `center`.
fn lorentzian(f: f64, center: f64, width: f64) -> f64 {
    let d = f - center;
    (1.0 / (2.0 * PI)) * width / (d * d + 0.25 * width * width)
}

/// Excited-state spectrum with `n_bar` mean phonons:
/// P_e(f) = C₀ + C₁·Σₙ Pₙ(n̄)·S(f, n̄, n), where S is a unit-area Lorentzian
/// at f_q − 2χ·n + pull·n̄ with full width γ + κ·(n + n̄).
pub fn number_split_spectrum(
    freqs: &[f64],
    p: &NumberSplitParams,
    n_bar: f64,
) -> Result<SpectrumTrace> {
    p.validate()?;
    let weights = poisson_weights(n_bar, p.n_max)?;
    let values = freqs
        .iter()
        .map(|&f| {
            let comb: f64 = weights
                .iter()
                .enumerate()
                .map(|(n, w)| {
                    let center =
                        p.qubit_freq - 2.0 * p.half_shift * n as f64 + p.pull_per_phonon * n_bar;
                    let width = p.qubit_linewidth + p.mode_loss * (n as f64 + n_bar);
                    w * lorentzian(f, center, width)
                })
                .sum();
            p.offset + p.amplitude * comb
        })
        .collect();
    let trace = SpectrumTrace {
        freqs: freqs.to_vec(),
        values,
    };
    trace.validate()?;
    Ok(trace)
}

/// Mean phonon number from drive power, n̄ = η·power.
pub fn power_to_mean_phonon(d: &DriveConfig) -> Result<f64> {
    d.validate()?;
    Ok(d.conversion * d.power)
}

/// Strong-dispersive check: single-phonon shift 2χ against both linewidths.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Resolvability {
    pub resolvable: bool,
    /// 2χ − γ, Hz.
    pub qubit_margin: f64,
    /// 2χ − κ, Hz.
    pub mode_margin: f64,
}

/// True iff 2χ exceeds both the qubit linewidth γ and the mode linewidth κ.
pub fn resolvability(chi: f64, gamma: f64, kappa: f64) -> Result<Resolvability> {
    if chi < 0.0 || gamma < 0.0 || kappa < 0.0 {
        return Err(Error::Domain("χ, γ, κ must all be >= 0".into()));
    }
    let two_chi = 2.0 * chi;
    Ok(Resolvability {
        resolvable: two_chi > gamma && two_chi > kappa,
        qubit_margin: two_chi - gamma,
        mode_margin: two_chi - kappa,
    })
}
