//! Frequency-domain model of the split interdigitated transducer.
//!
//! The transducer is bisected into two finger arrays separated by a long
//! acoustic travel time τ, so its response interferes with itself like a
//! double slit: a slow sinc envelope set by the array length multiplied by a
//! fast sinusoid set by the delay. Everything downstream (coupling to cavity
//! modes, emission into unconfined phonons, the reactive frequency pull)
//! inherits this interference pattern.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::sinc;

/// Geometry and strength of the split transducer.
///
/// Frequencies and rates are in Hz, times in seconds, lengths in meters.
/// `pitch`, `half_length` and `separation` are redundant with the other
/// fields and may be omitted; when supplied they are cross-checked.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdtParams {
    /// Finger periods per transducer half, N_q.
    pub n_periods: u32,
    /// Center frequency f_c (Hz).
    pub center_freq: f64,
    /// Travel time between the two halves, τ (s).
    pub delay: f64,
    /// Maximal phonon emission rate Γ₀ (Hz).
    pub max_emission: f64,
    /// Maximal qubit-cavity coupling g₀ (Hz).
    pub max_coupling: f64,
    /// Surface wave speed v (m/s).
    pub sound_speed: f64,
    /// Finger period λ_c (m); defaults to v / f_c.
    #[serde(default)]
    pub pitch: Option<f64>,
    /// Length of one transducer half D (m); defaults to N_q · λ_c.
    #[serde(default)]
    pub half_length: Option<f64>,
    /// Separation between the halves S (m); defaults to v · τ.
    #[serde(default)]
    pub separation: Option<f64>,
}

impl IdtParams {
    /// Parameters fitted to the measured device.
    pub fn reference() -> Self {
        IdtParams {
            n_periods: 8,
            center_freq: 4.24e9,
            delay: 9.04e-9,
            max_emission: 11.0e6,
            max_coupling: 5.1e6,
            sound_speed: 2880.0,
            pitch: None,
            half_length: None,
            separation: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_periods < 1 {
            return Err(Error::InvalidParams("n_periods must be >= 1".into()));
        }
        for (name, v) in [
            ("center_freq", self.center_freq),
            ("delay", self.delay),
            ("sound_speed", self.sound_speed),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidParams(format!("{name} must be > 0")));
            }
        }
        if !(self.max_emission > 0.0) || !(self.max_coupling > 0.0) {
            return Err(Error::InvalidParams("Γ₀ and g₀ must be > 0".into()));
        }
        if let Some(p) = self.pitch {
            let implied = self.sound_speed / p;
            if rel_err(self.center_freq, implied) > 1e-6 {
                return Err(Error::InvalidParams(format!(
                    "f_c = {:.6e} inconsistent with v/λ_c = {:.6e}",
                    self.center_freq, implied
                )));
            }
        }
        if let Some(d) = self.half_length {
            let implied = self.n_periods as f64 * self.wavelength();
            if rel_err(d, implied) > 1e-6 {
                return Err(Error::InvalidParams(format!(
                    "D = {:.6e} inconsistent with N_q·λ_c = {:.6e}",
                    d, implied
                )));
            }
        }
        if let Some(s) = self.separation {
            let implied_tau = s / self.sound_speed;
            if rel_err(self.delay, implied_tau) > 1e-6 {
                return Err(Error::InvalidParams(format!(
                    "τ = {:.6e} inconsistent with S/v = {:.6e}",
                    self.delay, implied_tau
                )));
            }
        }
        Ok(())
    }

    /// Finger period λ_c (m).
    pub fn wavelength(&self) -> f64 {
        self.pitch.unwrap_or(self.sound_speed / self.center_freq)
    }

    /// Length of one transducer half D (m).
    pub fn half_length(&self) -> f64 {
        self.half_length
            .unwrap_or(self.n_periods as f64 * self.wavelength())
    }
}

/// Which form of the reactive frequency pull to evaluate.
///
/// `AsWritten` follows the sin(πfτ) form; `KramersKronig` (default) uses
/// sin(2πfτ) so the pull is the causal partner of the sin²(πfτ) emission
/// modulation and oscillates with the measured 1/τ periodicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambVariant {
    AsWritten,
    #[default]
    KramersKronig,
}

/// Dissipative environment of the qubit away from the transducer.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitEnvironment {
    /// Internal quality factor Q_i.
    pub q_internal: f64,
    #[serde(default)]
    pub lamb_variant: LambVariant,
}

impl QubitEnvironment {
    pub fn reference() -> Self {
        QubitEnvironment {
            q_internal: 1.2e4,
            lamb_variant: LambVariant::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q_internal > 0.0) {
            return Err(Error::InvalidParams("Q_i must be > 0".into()));
        }
        Ok(())
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn check_freq(f: f64) -> Result<()> {
    if !(f > 0.0) {
        return Err(Error::Domain(format!("frequency must be > 0, got {f}")));
    }
    Ok(())
}

/// Double-slit response amplitude A(f) = sinc[π(f−f_c)D/v]·sin(πfτ).
///
/// Dimensionless, bounded in [−1, 1]. The full sinc envelope is always
/// evaluated; the approximation A ≈ sin(πfτ) near f_c is never taken.
pub fn response_amplitude(f: f64, p: &IdtParams) -> Result<f64> {
    check_freq(f)?;
    let envelope = sinc(PI * (f - p.center_freq) * p.half_length() / p.sound_speed);
    Ok(envelope * (PI * f * p.delay).sin())
}

/// Coupling rate to a cavity mode at f_m: g_m = g₀·A(f_m)·parity_factor.
///
/// `parity_factor` in [0, 1] accounts for the spatial-symmetry overlap of the
/// mode with the transducer (1 for even longitudinal modes, small for odd or
/// transverse ones).
pub fn coupling_strength(f_m: f64, p: &IdtParams, parity_factor: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&parity_factor) {
        return Err(Error::Domain(format!(
            "parity_factor must be in [0, 1], got {parity_factor}"
        )));
    }
    Ok(p.max_coupling * response_amplitude(f_m, p)? * parity_factor)
}

/// Slope figure of merit g₀·A′(f_z) ≈ πg₀τ at a coupling zero.
pub fn coupling_slope_at_zero(p: &IdtParams) -> f64 {
    PI * p.max_coupling * p.delay
}

/// Qubit energy loss rate vs frequency:
/// Γ₁ = f_q/Q_i + (Γ₀/2)·sinc²[πN_q(f_q−f_c)/f_c]·[1 − cos(2πf_qτ)].
///
/// The interference term vanishes exactly at f_q = k/τ, leaving the
/// frequency-proportional internal loss floor.
pub fn emission_rate(f_q: f64, p: &IdtParams, env: &QubitEnvironment) -> Result<f64> {
    check_freq(f_q)?;
    let s = sinc(PI * p.n_periods as f64 * (f_q - p.center_freq) / p.center_freq);
    let interference = 1.0 - (2.0 * PI * f_q * p.delay).cos();
    Ok(f_q / env.q_internal + 0.5 * p.max_emission * s * s * interference)
}

/// Reactive frequency pull from phonon emission (phononic Lamb shift):
/// δ = (Γ₀/4)·sinc²[πN_q(f_q−f_c)/f_c]·sin(k·πf_qτ), k = 1 or 2 per variant.
pub fn lamb_shift(f_q: f64, p: &IdtParams, env: &QubitEnvironment) -> Result<f64> {
    check_freq(f_q)?;
    let osc = match env.lamb_variant {
        LambVariant::AsWritten => (PI * f_q * p.delay).sin(),
        LambVariant::KramersKronig => (2.0 * PI * f_q * p.delay).sin(),
    };
    Ok(lamb_envelope(f_q, p) * osc)
}

// Envelope (Γ₀/4)·sinc² shared by both variants.
fn lamb_envelope(f_q: f64, p: &IdtParams) -> f64 {
    let s = sinc(PI * p.n_periods as f64 * (f_q - p.center_freq) / p.center_freq);
    0.25 * p.max_emission * s * s
}

/// Peak magnitude of the Lamb shift: the envelope maximum Γ₀/4 at f_c.
pub fn lamb_shift_peak(p: &IdtParams) -> f64 {
    0.25 * p.max_emission
}

/// Giant-atom figure of merit πτΓ₀; self-interference effects such as
/// nonexponential decay onset near 1.
pub fn giant_atom_parameter(p: &IdtParams) -> f64 {
    PI * p.delay * p.max_emission
}
