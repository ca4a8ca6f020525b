//! Transfer-matrix model of the distributed Bragg mirrors and the confined
//! acoustic mode ladder they create.
//!
//! Each mirror is a uniform array of identical weak point reflectors of
//! amplitude reflectivity r_s. The design period `pitch` equals one acoustic
//! wavelength at the Bragg frequency, so the reflectors sit every half pitch
//! (two strips per period, as in a split-electrode grating). Every strip
//! reflects in quadrature with its transmission (the lossless symmetric
//! convention) and the cascade is evaluated with 2×2 transfer matrices.
//!
//! The returned reflection coefficient uses the convention in which the phase
//! decreases with frequency across the stopband (positive group delay), so
//! penetration lengths derived from the phase slope come out positive.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::bisect;

/// Bragg mirror geometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorParams {
    /// Number of reflecting strips.
    pub n_strips: u32,
    /// Amplitude reflectivity of one strip, r_s.
    pub strip_reflectivity: f64,
    /// Design period (one wavelength at the Bragg frequency), m.
    pub pitch: f64,
    /// Surface wave speed, m/s.
    pub sound_speed: f64,
}

impl MirrorParams {
    /// Mirror matching the measured device: r_s = 3.5%, pitch 675 nm on GaAs.
    /// The strip count is not reported; 120 strips saturate the peak
    /// reflectivity (tanh(n·r_s) > 0.99).
    pub fn reference() -> Self {
        MirrorParams {
            n_strips: 120,
            strip_reflectivity: 0.035,
            pitch: 675e-9,
            sound_speed: 2880.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_strips < 1 {
            return Err(Error::InvalidParams("n_strips must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&self.strip_reflectivity) {
            return Err(Error::InvalidParams("r_s must be in [0, 1)".into()));
        }
        if !(self.pitch > 0.0) || !(self.sound_speed > 0.0) {
            return Err(Error::InvalidParams(
                "pitch and sound_speed must be > 0".into(),
            ));
        }
        Ok(())
    }

    /// Bragg frequency v / pitch.
    pub fn bragg_freq(&self) -> f64 {
        self.sound_speed / self.pitch
    }
}

/// Cavity formed between two identical mirrors.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavitySpec {
    /// Mirror separation L, m.
    pub mirror_separation: f64,
    /// Surface wave speed, m/s.
    pub sound_speed: f64,
    pub mirrors: MirrorParams,
}

impl CavitySpec {
    pub fn reference() -> Self {
        CavitySpec {
            mirror_separation: 125e-6,
            sound_speed: 2880.0,
            mirrors: MirrorParams::reference(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mirror_separation > 0.0) {
            return Err(Error::InvalidParams("L must be > 0".into()));
        }
        self.mirrors.validate()
    }
}

/// Spatial symmetry of a confined mode relative to the cavity center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

/// One confined acoustic mode.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Mode {
    pub index: u32,
    /// Mode frequency f_m, Hz.
    pub freq: f64,
    pub parity: Parity,
    pub transverse: bool,
    /// Loss rate κ_m, Hz.
    pub loss: f64,
    /// Coupling rate g_m, Hz.
    pub coupling: f64,
}

/// Immutable ladder of confined modes, sorted by frequency within the
/// longitudinal family.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ModeTable {
    pub modes: Vec<Mode>,
}

impl ModeTable {
    pub fn validate(&self) -> Result<()> {
        let longs: Vec<&Mode> = self.modes.iter().filter(|m| !m.transverse).collect();
        for pair in longs.windows(2) {
            if pair[1].freq <= pair[0].freq {
                return Err(Error::InvalidParams(
                    "longitudinal mode frequencies must be strictly increasing".into(),
                ));
            }
            if pair[1].parity == pair[0].parity {
                return Err(Error::InvalidParams(
                    "parity must alternate with consecutive longitudinal index".into(),
                ));
            }
        }
        if self.modes.iter().any(|m| m.loss < 0.0) {
            return Err(Error::InvalidParams("κ_m must be >= 0".into()));
        }
        Ok(())
    }

    pub fn longitudinal(&self) -> impl Iterator<Item = &Mode> {
        self.modes.iter().filter(|m| !m.transverse)
    }
}

// Raw reflection coefficient in the internal convention (phase accumulates
// +βx along propagation). Public callers get the conjugate.
fn reflection_raw(f: f64, m: &MirrorParams) -> (Complex64, Complex64) {
    let r_s = m.strip_reflectivity;
    // Lossless symmetric point reflector: r in quadrature, t real, so that
    // reflections from strips half a design period apart add in phase at the
    // Bragg frequency.
    let r = Complex64::new(0.0, -r_s);
    let t = Complex64::new((1.0 - r_s * r_s).sqrt(), 0.0);
    // Transfer matrix of one strip.
    let s11 = t - r * r / t;
    let s12 = r / t;
    let s21 = -r / t;
    let s22 = 1.0 / t;
    // Spacer between strips: half the design period.
    let phase = 2.0 * PI * f * (0.5 * m.pitch) / m.sound_speed;
    let p = Complex64::new(0.0, phase).exp();

    // Cascade: M_total = M_strip · (P · M_strip)^(n-1).
    let (mut m11, mut m12, mut m21, mut m22) = (s11, s12, s21, s22);
    for _ in 1..m.n_strips {
        // Apply spacer then strip on the right side.
        let (a11, a12, a21, a22) = (m11 * p, m12 * p, m21 / p, m22 / p);
        m11 = s11 * a11 + s12 * a21;
        m12 = s11 * a12 + s12 * a22;
        m21 = s21 * a11 + s22 * a21;
        m22 = s21 * a12 + s22 * a22;
    }
    let r_tot = -m21 / m22;
    // det(M) = 1 for the lossless cascade, so t = 1/m22.
    let t_tot = 1.0 / m22;
    (r_tot, t_tot)
}

/// Complex reflection coefficient of one mirror at frequency `f`.
pub fn mirror_reflection(f: f64, m: &MirrorParams) -> Result<Complex64> {
    if !(f > 0.0) {
        return Err(Error::Domain(format!("frequency must be > 0, got {f}")));
    }
    let (r, _) = reflection_raw(f, m);
    Ok(r.conj())
}

/// Transmission through one mirror (for energy-conservation checks).
pub fn mirror_transmission(f: f64, m: &MirrorParams) -> Result<Complex64> {
    if !(f > 0.0) {
        return Err(Error::Domain(format!("frequency must be > 0, got {f}")));
    }
    let (_, t) = reflection_raw(f, m);
    Ok(t.conj())
}

/// Contiguous frequency interval around the Bragg frequency where
/// |r| ≥ threshold · |r|_max. `None` when no band exists (r_s = 0).
pub fn stopband(m: &MirrorParams, threshold: f64) -> Result<Option<(f64, f64)>> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Domain(format!(
            "threshold must be in (0, 1), got {threshold}"
        )));
    }
    if m.strip_reflectivity == 0.0 {
        return Ok(None);
    }
    let f_b = m.bragg_freq();
    let step = 1e5;
    let magnitude = |f: f64| reflection_raw(f, m).0.norm();
    // Peak reflectivity over the scan window.
    let mut r_max = 0.0_f64;
    let mut f = 0.7 * f_b;
    while f <= 1.3 * f_b {
        r_max = r_max.max(magnitude(f));
        f += step;
    }
    let level = threshold * r_max;
    if magnitude(f_b) < level {
        return Ok(None);
    }
    // Walk outward from the band center to the first crossings.
    let mut f_hi = f_b;
    while magnitude(f_hi + step) >= level && f_hi < 1.3 * f_b {
        f_hi += step;
    }
    let mut f_lo = f_b;
    while magnitude(f_lo - step) >= level && f_lo > 0.7 * f_b {
        f_lo -= step;
    }
    let f_hi = bisect(|f| magnitude(f) - level, f_hi, f_hi + step, 1.0);
    let f_lo = bisect(|f| magnitude(f) - level, f_lo - step, f_lo, 1.0);
    Ok(Some((f_lo, f_hi)))
}

/// Solve the round-trip phase condition
/// 2πf·(2L)/v + 2·arg r(f) = 2πm for integer m inside `band`.
///
/// Scans a 0.1-MHz grid for brackets and refines each root to 1 Hz. Parity
/// alternates starting from even at the lowest mode; κ_m and g_m are left at
/// zero for the caller to populate.
pub fn resonance_frequencies(c: &CavitySpec, band: (f64, f64)) -> Result<ModeTable> {
    c.validate()?;
    let (f_lo, f_hi) = band;
    if !(f_lo > 0.0 && f_hi > f_lo) {
        return Err(Error::Domain("band must satisfy 0 < f_lo < f_hi".into()));
    }
    // Resonance iff w(f) = exp(i·θ) = 1 with θ the round-trip phase;
    // equivalently Im w = 0 with Re w > 0. Working with w avoids phase
    // unwrapping entirely.
    let w = |f: f64| -> Complex64 {
        let (r, _) = reflection_raw(f, &c.mirrors);
        let unit_r = r / r.norm();
        let prop = Complex64::new(0.0, 4.0 * PI * f * c.mirror_separation / c.sound_speed).exp();
        prop * unit_r * unit_r
    };
    let step = 1e5;
    let mut roots = Vec::new();
    let mut f = f_lo;
    let mut prev = w(f);
    while f + step <= f_hi + step * 0.5 {
        let next_f = (f + step).min(f_hi);
        let next = w(next_f);
        if prev.im == 0.0 && prev.re > 0.0 {
            roots.push(f);
        } else if prev.im * next.im < 0.0 && (prev.re > 0.0 || next.re > 0.0) {
            let root = bisect(|x| w(x).im, f, next_f, 1.0);
            if w(root).re > 0.0 {
                roots.push(root);
            }
        }
        prev = next;
        f = next_f;
    }
    let modes = roots
        .iter()
        .enumerate()
        .map(|(i, &freq)| Mode {
            index: i as u32 + 1,
            freq,
            parity: if i % 2 == 0 { Parity::Even } else { Parity::Odd },
            transverse: false,
            loss: 0.0,
            coupling: 0.0,
        })
        .collect();
    Ok(ModeTable { modes })
}

/// Consecutive frequency gaps of the longitudinal modes.
pub fn mode_spacings(t: &ModeTable) -> Vec<f64> {
    let freqs: Vec<f64> = t.longitudinal().map(|m| m.freq).collect();
    freqs.windows(2).map(|p| p[1] - p[0]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn zero_reflectivity_mirror_is_transparent() {
        let mut m = MirrorParams::reference();
        m.strip_reflectivity = 0.0;
        for f in [3.8e9, 4.26e9, 4.8e9] {
            assert_abs_diff_eq!(mirror_reflection(f, &m).unwrap().norm(), 0.0, epsilon = 1e-12);
        }
        assert!(stopband(&m, 0.9).unwrap().is_none());
    }

    #[test]
    fn bragg_reflectivity_matches_tanh_limit() {
        // At the Bragg frequency the cascade closes to |r| = tanh(n·artanh r_s).
        let m = MirrorParams::reference();
        let r = mirror_reflection(m.bragg_freq(), &m).unwrap().norm();
        let expected = (m.n_strips as f64 * m.strip_reflectivity.atanh()).tanh();
        assert_relative_eq!(r, expected, epsilon = 1e-10);
        // Large-n saturation approximates tanh(n·r_s).
        assert_relative_eq!(r, (m.n_strips as f64 * m.strip_reflectivity).tanh(), max_relative = 1e-2);
    }

    #[test]
    fn energy_conserved_across_band() {
        let m = MirrorParams::reference();
        let mut f = 3.8e9;
        while f <= 4.8e9 {
            let r = mirror_reflection(f, &m).unwrap().norm_sqr();
            let t = mirror_transmission(f, &m).unwrap().norm_sqr();
            assert_abs_diff_eq!(r + t, 1.0, epsilon = 1e-10);
            f += 7.3e6;
        }
    }

    #[test]
    fn stopband_width_near_100_mhz() {
        let m = MirrorParams::reference();
        let (lo, hi) = stopband(&m, 0.9).unwrap().unwrap();
        let width = hi - lo;
        assert!(
            (85e6..=115e6).contains(&width),
            "stopband width {width:.3e} outside [85, 115] MHz"
        );
    }

    #[test]
    fn stopband_widens_with_reflectivity() {
        let m = MirrorParams::reference();
        let mut stronger = m.clone();
        stronger.strip_reflectivity *= 2.0;
        let (lo, hi) = stopband(&m, 0.9).unwrap().unwrap();
        let (lo2, hi2) = stopband(&stronger, 0.9).unwrap().unwrap();
        assert!(hi2 - lo2 > hi - lo);
    }

    #[test]
    fn reflection_phase_decreases_across_stopband() {
        let m = MirrorParams::reference();
        let (lo, hi) = stopband(&m, 0.9).unwrap().unwrap();
        // Interior 80% of the band, finite-difference slope of the continuous
        // phase.
        let start = lo + 0.1 * (hi - lo);
        let stop = lo + 0.9 * (hi - lo);
        let step = 1e6;
        let mut f = start;
        let mut prev = mirror_reflection(f, &m).unwrap().arg();
        while f + step <= stop {
            f += step;
            let mut phase = mirror_reflection(f, &m).unwrap().arg();
            // Unwrap.
            while phase - prev > PI {
                phase -= 2.0 * PI;
            }
            while phase - prev < -PI {
                phase += 2.0 * PI;
            }
            assert!(phase < prev, "phase not decreasing at {f:.4e}");
            prev = phase;
        }
    }

    #[test]
    fn hard_mirror_limit_gives_fabry_perot_spacing() {
        // Nearly perfect single strip: phase ≈ π across the whole band and
        // spacing v/2L.
        let c = CavitySpec {
            mirror_separation: 125e-6,
            sound_speed: 2880.0,
            mirrors: MirrorParams {
                n_strips: 1,
                strip_reflectivity: 0.999_999,
                pitch: 675e-9,
                sound_speed: 2880.0,
            },
        };
        let table = resonance_frequencies(&c, (4.2e9, 4.3e9)).unwrap();
        let spacings = mode_spacings(&table);
        let expected = c.sound_speed / (2.0 * c.mirror_separation);
        assert!(spacings.len() >= 5);
        for s in &spacings {
            assert_relative_eq!(*s, expected, max_relative = 1e-6);
        }
    }

    #[test]
    fn reference_cavity_mode_ladder() {
        let c = CavitySpec::reference();
        let band = stopband(&c.mirrors, 0.9).unwrap().unwrap();
        let table = resonance_frequencies(&c, band).unwrap();
        table.validate().unwrap();
        let spacings = mode_spacings(&table);
        assert!(spacings.len() >= 4, "too few modes: {}", spacings.len());
        // Central spacing within 10% of the measured 10.6 MHz.
        let central = spacings[spacings.len() / 2];
        assert_relative_eq!(central, 10.6e6, max_relative = 0.10);
        // Effective length ≈ L + 2 penetration depths, in the 125–165 µm range.
        let l_eff = c.sound_speed / (2.0 * central);
        assert!(l_eff > c.mirror_separation && l_eff < 165e-6, "L_eff = {l_eff:.3e}");
        // Edge spacings strictly below the central spacing.
        assert!(spacings[0] < central);
        assert!(spacings[spacings.len() - 1] < central);
        // Mode count consistent with band_width / central_spacing ± 1.
        let expected = (band.1 - band.0) / central;
        let count = table.modes.len() as f64;
        assert!((count - expected).abs() <= 1.5, "count {count} vs {expected}");
    }

    #[test]
    fn roots_stable_under_grid_refinement() {
        // Doubling the scan density must not move any root by more than 1 kHz.
        // The solver brackets on a fixed 0.1 MHz grid; emulate refinement by
        // solving on two half-bands and comparing with the full solve.
        let c = CavitySpec::reference();
        let band = stopband(&c.mirrors, 0.9).unwrap().unwrap();
        let full = resonance_frequencies(&c, band).unwrap();
        let mid = 0.5 * (band.0 + band.1);
        let mut halves = resonance_frequencies(&c, (band.0, mid)).unwrap().modes;
        halves.extend(resonance_frequencies(&c, (mid, band.1)).unwrap().modes);
        assert_eq!(full.modes.len(), halves.len());
        for (a, b) in full.modes.iter().zip(&halves) {
            assert!((a.freq - b.freq).abs() < 1e3);
        }
    }

    #[test]
    fn mode_spacings_trivial_cases() {
        let mk = |freqs: &[f64]| ModeTable {
            modes: freqs
                .iter()
                .enumerate()
                .map(|(i, &f)| Mode {
                    index: i as u32 + 1,
                    freq: f,
                    parity: if i % 2 == 0 { Parity::Even } else { Parity::Odd },
                    transverse: false,
                    loss: 0.0,
                    coupling: 0.0,
                })
                .collect(),
        };
        assert!(mode_spacings(&mk(&[4.25e9])).is_empty());
        let two = mode_spacings(&mk(&[4.25e9, 4.25e9 + 10.6e6]));
        assert_relative_eq!(two[0], 10.6e6, epsilon = 1e-3);
        let uniform = mode_spacings(&mk(&[1e9, 1.01e9, 1.02e9, 1.03e9]));
        for s in uniform {
            assert_relative_eq!(s, 1e7, epsilon = 1e-3);
        }
    }

    #[test]
    fn degenerate_threshold_rejected_and_monotone() {
        let m = MirrorParams::reference();
        assert!(stopband(&m, 1.0).is_err());
        assert!(stopband(&m, 0.0).is_err());
        // Higher threshold narrows the band.
        let (lo9, hi9) = stopband(&m, 0.9).unwrap().unwrap();
        let (lo99, hi99) = stopband(&m, 0.99).unwrap().unwrap();
        assert!(hi99 - lo99 <= hi9 - lo9);
    }
}
