//! Transmon frequency-vs-flux model, anharmonicity bookkeeping, and
//! coherence / linewidth arithmetic.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::bisect;

/// Flux-tuning constants of the asymmetric-junction transmon.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmonParams {
    /// Zero-field qubit frequency f₀, Hz.
    pub zero_field_freq: f64,
    /// Normalized junction critical-current difference a, in [0, 1].
    pub asymmetry: f64,
    /// Coil current for half a flux quantum, I_c (A).
    pub half_quantum_current: f64,
    /// Ambient-field offset current I₀ (A).
    pub offset_current: f64,
    /// Anharmonicity α, Hz (negative).
    pub anharmonicity: f64,
    /// Internal quality factor Q_i.
    pub q_internal: f64,
    /// Pure dephasing rate, Hz.
    #[serde(default)]
    pub pure_dephasing: f64,
}

impl TransmonParams {
    /// Values fitted to the measured device.
    pub fn reference() -> Self {
        TransmonParams {
            zero_field_freq: 5.718e9,
            asymmetry: 0.14,
            half_quantum_current: 1.168e-3,
            offset_current: 79.2e-6,
            anharmonicity: -190e6,
            q_internal: 1.2e4,
            pure_dephasing: 30e3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zero_field_freq > 0.0) {
            return Err(Error::InvalidParams("f₀ must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.asymmetry) {
            return Err(Error::InvalidParams("asymmetry must be in [0, 1]".into()));
        }
        if !(self.half_quantum_current > 0.0) {
            return Err(Error::InvalidParams("I_c must be > 0".into()));
        }
        if !(self.anharmonicity < 0.0) {
            return Err(Error::InvalidParams("α must be negative".into()));
        }
        Ok(())
    }

    /// Lowest reachable frequency, f₀·√a.
    pub fn min_freq(&self) -> f64 {
        self.zero_field_freq * self.asymmetry.sqrt()
    }
}

/// Measured relaxation and Ramsey decay times.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherenceSet {
    /// Energy relaxation time T₁, s.
    pub t1: f64,
    /// Ramsey decay time T₂*, s.
    pub t2_star: f64,
}

impl CoherenceSet {
    pub fn validate(&self) -> Result<()> {
        if !(self.t1 > 0.0 && self.t2_star > 0.0) {
            return Err(Error::InvalidParams("T₁ and T₂* must be > 0".into()));
        }
        if self.t2_star > 2.0 * self.t1 {
            return Err(Error::InvalidParams(format!(
                "T₂* = {:.3e} exceeds physical bound 2·T₁ = {:.3e}",
                self.t2_star,
                2.0 * self.t1
            )));
        }
        Ok(())
    }
}

/// Qubit frequency vs coil current:
/// f_q(I) = f₀·[a² + (1−a²)·cos²(π(I−I₀)/I_c)]^(1/4).
pub fn freq_vs_current(current: f64, p: &TransmonParams) -> f64 {
    let a2 = p.asymmetry * p.asymmetry;
    let c = (PI * (current - p.offset_current) / p.half_quantum_current).cos();
    p.zero_field_freq * (a2 + (1.0 - a2) * c * c).powf(0.25)
}

/// Smallest current at or above I₀ that tunes the qubit to `f_target`,
/// accurate to 1 kHz in frequency. Uses the principal branch
/// I ∈ [I₀, I₀ + I_c/2] where the flux curve is monotonically decreasing.
pub fn current_for_freq(f_target: f64, p: &TransmonParams) -> Result<f64> {
    let lo = p.min_freq();
    let hi = p.zero_field_freq;
    if !(lo..=hi).contains(&f_target) {
        return Err(Error::OutOfRange {
            requested: f_target,
            lo,
            hi,
        });
    }
    // Closed-form inversion of the quartic-root expression.
    let a2 = p.asymmetry * p.asymmetry;
    let ratio = (f_target / p.zero_field_freq).powi(4);
    let cos2 = ((ratio - a2) / (1.0 - a2)).clamp(0.0, 1.0);
    let i_closed = p.offset_current + p.half_quantum_current / PI * cos2.sqrt().acos();
    // Polish by bisection so the round trip holds to 1 kHz even when the
    // closed form sits on a flat region of the curve.
    let half = p.half_quantum_current / 2.0;
    let f_err = |i: f64| freq_vs_current(i, p) - f_target;
    let bracket = 1e-9 * p.half_quantum_current;
    let (a, b) = (
        (i_closed - bracket).max(p.offset_current),
        (i_closed + bracket).min(p.offset_current + half),
    );
    let current = if f_err(a) * f_err(b) <= 0.0 {
        bisect(f_err, a, b, 1e-15)
    } else {
        i_closed
    };
    Ok(current)
}

/// Intrinsic dephasing rate from measured coherence times:
/// (1/T₂* − 1/(2T₁)) / 2π.
pub fn dephasing_from_coherence(c: &CoherenceSet) -> Result<f64> {
    c.validate()?;
    Ok((1.0 / c.t2_star - 1.0 / (2.0 * c.t1)) / (2.0 * PI))
}

/// Arithmetic sum of named linewidth contributions with the breakdown kept
/// for reporting.
#[derive(Debug, Clone)]
pub struct LinewidthBudget {
    pub components: Vec<(String, f64)>,
    pub total: f64,
}

pub fn linewidth_budget(components: &[(&str, f64)]) -> Result<LinewidthBudget> {
    for (name, rate) in components {
        if *rate < 0.0 {
            return Err(Error::Domain(format!(
                "linewidth component {name} is negative: {rate}"
            )));
        }
    }
    Ok(LinewidthBudget {
        components: components
            .iter()
            .map(|(n, r)| (n.to_string(), *r))
            .collect(),
        total: components.iter().map(|(_, r)| r).sum(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn p() -> TransmonParams {
        TransmonParams::reference()
    }

    #[test]
    fn sweet_spots() {
        let q = p();
        assert_relative_eq!(freq_vs_current(q.offset_current, &q), 5.718e9, epsilon = 1.0);
        let f_min = freq_vs_current(q.offset_current + q.half_quantum_current / 2.0, &q);
        assert_relative_eq!(f_min, q.zero_field_freq * q.asymmetry.sqrt(), epsilon = 1.0);
        assert_relative_eq!(f_min, 2.139e9, max_relative = 1e-3);
    }

    #[test]
    fn symmetric_junctions_do_not_tune() {
        let mut q = p();
        q.asymmetry = 1.0;
        for i in [-1e-3, 0.0, 0.5e-3, 2e-3] {
            assert_relative_eq!(freq_vs_current(i, &q), q.zero_field_freq, epsilon = 1e-3);
        }
    }

    #[test]
    fn periodic_in_half_quantum_current() {
        let q = p();
        for i in [0.0, 1e-4, 7e-4] {
            assert_relative_eq!(
                freq_vs_current(i, &q),
                freq_vs_current(i + q.half_quantum_current, &q),
                epsilon = 1e-3
            );
        }
    }

    #[test]
    fn inverse_at_extremes_and_out_of_range() {
        let q = p();
        let i = current_for_freq(q.zero_field_freq, &q).unwrap();
        assert_relative_eq!(i, q.offset_current, epsilon = 1e-12);
        assert!(matches!(
            current_for_freq(6e9, &q),
            Err(Error::OutOfRange { .. })
        ));
        assert!(current_for_freq(1e9, &q).is_err());
    }

    #[test]
    fn inverse_round_trips_at_operating_point() {
        let q = p();
        let i = current_for_freq(4.318e9, &q).unwrap();
        assert_abs_diff_eq!(freq_vs_current(i, &q), 4.318e9, epsilon = 1e3);
    }

    #[test]
    fn dephasing_matches_quoted_value() {
        let c = CoherenceSet {
            t1: 415e-9,
            t2_star: 705e-9,
        };
        let rate = dephasing_from_coherence(&c).unwrap();
        assert_relative_eq!(rate, 34e3, max_relative = 0.01);
        // Consistent with the quoted 30 kHz at 15% tolerance.
        assert!((rate - 30e3).abs() / 30e3 < 0.15);
    }

    #[test]
    fn dephasing_limits() {
        // Lifetime-limited: T₂* = 2T₁ gives zero.
        let c = CoherenceSet {
            t1: 500e-9,
            t2_star: 1000e-9,
        };
        assert_abs_diff_eq!(dephasing_from_coherence(&c).unwrap(), 0.0, epsilon = 1e-9);
        // Pure-dephasing limit: T₁ → ∞, T₂* = 1 µs gives 1/(2πT₂*) ≈ 159 kHz.
        let c = CoherenceSet {
            t1: 1.0,
            t2_star: 1e-6,
        };
        assert_relative_eq!(
            dephasing_from_coherence(&c).unwrap(),
            159.15e3,
            max_relative = 1e-3
        );
        // Unphysical input rejected.
        let c = CoherenceSet {
            t1: 100e-9,
            t2_star: 300e-9,
        };
        assert!(dephasing_from_coherence(&c).is_err());
    }

    #[test]
    fn budget_sums_to_540_khz() {
        let b = linewidth_budget(&[
            ("loss", 360e3),
            ("dephasing", 30e3),
            ("rabi", 100e3),
            ("pulse", 50e3),
        ])
        .unwrap();
        assert_eq!(b.total, 540e3);
        assert_eq!(b.components.len(), 4);
        assert_eq!(linewidth_budget(&[]).unwrap().total, 0.0);
        assert_eq!(linewidth_budget(&[("x", 7.0)]).unwrap().total, 7.0);
        assert!(linewidth_budget(&[("bad", -1.0)]).is_err());
    }

    proptest! {
        #[test]
        fn flux_curve_even_about_sweet_spots(di in 0.0f64..5e-4) {
            let q = p();
            let f_plus = freq_vs_current(q.offset_current + di, &q);
            let f_minus = freq_vs_current(q.offset_current - di, &q);
            prop_assert!((f_plus - f_minus).abs() < 1e-3);
            let half = q.offset_current + q.half_quantum_current / 2.0;
            let g_plus = freq_vs_current(half + di, &q);
            let g_minus = freq_vs_current(half - di, &q);
            prop_assert!((g_plus - g_minus).abs() < 1e-3);
        }

        #[test]
        fn flux_curve_monotone_on_principal_branch(t in 0.0f64..1.0) {
            let q = p();
            let half = q.half_quantum_current / 2.0;
            let i1 = q.offset_current + t * half * 0.999;
            let i2 = i1 + 1e-3 * half;
            prop_assert!(freq_vs_current(i2, &q) <= freq_vs_current(i1, &q) + 1e-6);
        }

        #[test]
        fn inverse_round_trip_on_principal_branch(t in 0.001f64..0.999) {
            let q = p();
            let f = q.min_freq() + t * (q.zero_field_freq - q.min_freq());
            let i = current_for_freq(f, &q).unwrap();
            prop_assert!(i >= q.offset_current - 1e-15);
            prop_assert!(i <= q.offset_current + q.half_quantum_current / 2.0 + 1e-15);
            prop_assert!((freq_vs_current(i, &q) - f).abs() <= 1e3);
        }
    }
}
