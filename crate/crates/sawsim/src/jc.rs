//! Multimode Jaynes-Cummings system: flux-swept avoided-crossing spectra from
//! the single-excitation matrix, and dispersive shifts both perturbative and
//! numerically exact.
//!
//! The single-excitation matrix treats the qubit as two-level; the multilevel
//! transmon enters only through the numeric dispersive oracle.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::idt::{self, IdtParams};
use crate::mirror::{self, CavitySpec, Mode, ModeTable, Parity};
use crate::transmon::{freq_vs_current, TransmonParams};

/// Coupled qubit + mode ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemModel {
    pub transmon: TransmonParams,
    pub modes: ModeTable,
}

/// Default loss rate assigned to confined modes, Hz.
pub const DEFAULT_MODE_LOSS: f64 = 250e3;

/// Parity overlap factors used when populating couplings from the transducer
/// response: even longitudinal modes couple fully, odd ones weakly, and
/// transverse modes at a fifth of the longitudinal strength.
pub const EVEN_PARITY_FACTOR: f64 = 1.0;
pub const ODD_PARITY_FACTOR: f64 = 0.1;
pub const TRANSVERSE_FACTOR: f64 = 0.2;

impl SystemModel {
    /// Reference model assembled from the mirror ladder and transducer
    /// response: 9 longitudinal modes plus 5 transverse satellites on the
    /// even-mode shoulders. Mode frequencies and couplings are a
    /// figure-derived approximation, not tabulated ground truth.
    pub fn reference() -> Result<Self> {
        let cavity = CavitySpec::reference();
        let idt = IdtParams::reference();
        let band = mirror::stopband(&cavity.mirrors, 0.9)?
            .ok_or_else(|| Error::InvalidParams("reference mirror has no stopband".into()))?;
        let ladder = mirror::resonance_frequencies(&cavity, band)?;
        // Keep the central 9 longitudinal modes.
        let longs: Vec<Mode> = ladder.longitudinal().cloned().collect();
        if longs.len() < 9 {
            return Err(Error::InvalidParams(format!(
                "reference ladder has only {} modes",
                longs.len()
            )));
        }
        let start = (longs.len() - 9) / 2;
        let mut modes = Vec::new();
        let mut transverse = Vec::new();
        for (i, mode) in longs[start..start + 9].iter().enumerate() {
            let parity = if i % 2 == 0 { Parity::Even } else { Parity::Odd };
            let factor = match parity {
                Parity::Even => EVEN_PARITY_FACTOR,
                Parity::Odd => ODD_PARITY_FACTOR,
            };
            let g = idt::coupling_strength(mode.freq, &idt, factor)?;
            modes.push(Mode {
                index: i as u32 + 1,
                freq: mode.freq,
                parity,
                transverse: false,
                loss: DEFAULT_MODE_LOSS,
                coupling: g,
            });
            // Spurious satellite on the high-frequency shoulder of each
            // even (strongly coupled) mode.
            if parity == Parity::Even {
                transverse.push(Mode {
                    index: 10 + transverse.len() as u32,
                    freq: mode.freq + 3.0e6,
                    parity: Parity::Even,
                    transverse: true,
                    loss: DEFAULT_MODE_LOSS,
                    coupling: idt::coupling_strength(
                        mode.freq + 3.0e6,
                        &idt,
                        TRANSVERSE_FACTOR,
                    )?,
                });
            }
        }
        modes.extend(transverse);
        let model = SystemModel {
            transmon: TransmonParams::reference(),
            modes: ModeTable { modes },
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        self.transmon.validate()?;
        self.modes.validate()?;
        let mut freqs: Vec<f64> = self.modes.modes.iter().map(|m| m.freq).collect();
        freqs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for pair in freqs.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::InvalidParams(
                    "mode frequencies must be distinct".into(),
                ));
            }
        }
        if self.modes.modes.iter().any(|m| !m.coupling.is_finite()) {
            return Err(Error::InvalidParams("couplings must be finite".into()));
        }
        Ok(())
    }
}

/// Eigenfrequency branches over a current sweep; one ascending row per
/// current, each of length mode count + 1.
#[derive(Debug, Clone)]
pub struct CrossingSpectrum {
    pub currents: Vec<f64>,
    pub branches: Vec<Vec<f64>>,
}

/// Per-mode dispersive shift record. Detuning follows the Δ_m = f_q − f_m
/// convention.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DispersiveShift {
    pub mode_index: u32,
    /// Half Stark shift χ_m, Hz; one phonon shifts the qubit by 2χ_m.
    pub chi: f64,
    pub detuning: f64,
    pub coupling: f64,
}

/// (M+1)×(M+1) single-excitation matrix: mode frequencies on the diagonal,
/// the qubit frequency in the last slot, couplings in the last row/column.
pub fn build_single_excitation_matrix(f_q: f64, modes: &ModeTable) -> DMatrix<f64> {
    let m = modes.modes.len();
    let mut h = DMatrix::<f64>::zeros(m + 1, m + 1);
    for (i, mode) in modes.modes.iter().enumerate() {
        h[(i, i)] = mode.freq;
        h[(i, m)] = mode.coupling;
        h[(m, i)] = mode.coupling;
    }
    h[(m, m)] = f_q;
    h
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn eigenfrequencies(matrix: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(Error::Contract("matrix must be square".into()));
    }
    let scale = matrix.amax().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::Contract(format!(
                    "matrix asymmetric at ({i}, {j})"
                )));
            }
        }
    }
    let mut vals: Vec<f64> = nalgebra::linalg::SymmetricEigen::new(matrix.clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(vals)
}

/// Sweep the coil current, diagonalizing the single-excitation matrix at the
/// flux-tuned qubit frequency of each point.
pub fn crossing_spectrum(currents: &[f64], model: &SystemModel) -> Result<CrossingSpectrum> {
    if currents.is_empty() {
        return Err(Error::Domain("current list must be nonempty".into()));
    }
    let mut branches = Vec::with_capacity(currents.len());
    for &i in currents {
        let f_q = freq_vs_current(i, &model.transmon);
        let h = build_single_excitation_matrix(f_q, &model.modes);
        branches.push(eigenfrequencies(&h)?);
    }
    Ok(CrossingSpectrum {
        currents: currents.to_vec(),
        branches,
    })
}

/// Second-order dispersive shift including the second transmon level:
/// χ = g²·(1/Δ − 1/(Δ+α)).
pub fn dispersive_shift_perturbative(g: f64, delta: f64, alpha: f64) -> Result<f64> {
    if delta == 0.0 || delta + alpha == 0.0 {
        return Err(Error::Pole(format!(
            "Δ = {delta:.3e}, Δ+α = {:.3e}",
            delta + alpha
        )));
    }
    Ok(g * g * (1.0 / delta - 1.0 / (delta + alpha)))
}

/// Brute-force dispersive shift: diagonalize the truncated multilevel
/// transmon ⊗ single mode Hamiltonian and read the Stark shift off the
/// dressed energies, χ = [E(e,1) − E(e,0) − E(g,1) + E(g,0)] / 2.
///
/// Transmon level j→j+1 couples with √(j+1)·g and the level spacing is
/// f_q + j·α; dressed states are identified by maximal overlap with the bare
/// labels.
pub fn dispersive_shift_numeric(
    g: f64,
    delta: f64,
    alpha: f64,
    transmon_levels: usize,
    fock_cutoff: usize,
) -> Result<f64> {
    if transmon_levels < 3 {
        return Err(Error::Domain("transmon_levels must be >= 3".into()));
    }
    if fock_cutoff < 10 {
        return Err(Error::Domain("fock_cutoff must be >= 10".into()));
    }
    if delta == 0.0 || delta + alpha == 0.0 {
        return Err(Error::Pole(format!(
            "Δ = {delta:.3e}, Δ+α = {:.3e}",
            delta + alpha
        )));
    }
    let n_fock = fock_cutoff + 1;
    let dim = transmon_levels * n_fock;
    let idx = |j: usize, n: usize| j * n_fock + n;
    // Energies relative to the bare qubit frequency: f_q = 0, mode at −Δ.
    let f_mode = -delta;
    let level_energy = |j: usize| -> f64 { 0.5 * (j * (j.max(1) - 1)) as f64 * alpha };
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..transmon_levels {
        for n in 0..n_fock {
            h[(idx(j, n), idx(j, n))] = level_energy(j) + n as f64 * f_mode;
            if j + 1 < transmon_levels && n >= 1 {
                let coupling = g * ((j + 1) as f64).sqrt() * (n as f64).sqrt();
                h[(idx(j + 1, n - 1), idx(j, n))] = coupling;
                h[(idx(j, n), idx(j + 1, n - 1))] = coupling;
            }
        }
    }
    let eig = nalgebra::linalg::SymmetricEigen::new(h);
    // Dressed energies labeled by maximal bare-state overlap; ties broken by
    // lower bare energy (columns are visited in eigenvalue order).
    let dressed_energy = |j: usize, n: usize| -> Result<f64> {
        let bare = idx(j, n);
        let mut best = 0;
        let mut best_overlap = -1.0;
        for k in 0..dim {
            let overlap = eig.eigenvectors[(bare, k)].abs();
            if overlap > best_overlap {
                best_overlap = overlap;
                best = k;
            }
        }
        // Cutoff sanity: the used eigenvector must not populate the last
        // Fock level.
        let mut edge = 0.0;
        for jj in 0..transmon_levels {
            edge += eig.eigenvectors[(idx(jj, fock_cutoff), best)].powi(2);
        }
        if edge > 1e-6 {
            return Err(Error::CutoffTooSmall { population: edge });
        }
        Ok(eig.eigenvalues[best])
    };
    let e_g0 = dressed_energy(0, 0)?;
    let e_g1 = dressed_energy(0, 1)?;
    let e_e0 = dressed_energy(1, 0)?;
    let e_e1 = dressed_energy(1, 1)?;
    Ok(0.5 * (e_e1 - e_e0 - e_g1 + e_g0))
}

/// Outcome of the multimode dispersive evaluation.
#[derive(Debug, Clone)]
pub struct StarkShifts {
    pub shifts: Vec<DispersiveShift>,
    /// Modes with 3 ≤ |Δ|/g < 8, where the perturbative formula starts to
    /// strain.
    pub warnings: Vec<String>,
}

/// Per-mode χ_m with the qubit at `f_q`. Errors if any mode violates
/// |Δ_m| > 3·g_m; modes below |Δ_m|/g_m = 8 are flagged as warnings.
pub fn total_stark_hamiltonian_shifts(model: &SystemModel, f_q: f64) -> Result<StarkShifts> {
    let alpha = model.transmon.anharmonicity;
    let mut shifts = Vec::new();
    let mut warnings = Vec::new();
    for mode in &model.modes.modes {
        let delta = f_q - mode.freq;
        let g = mode.coupling;
        if g != 0.0 {
            let ratio = delta.abs() / g.abs();
            if ratio < 3.0 {
                return Err(Error::DispersiveViolation {
                    mode: mode.index as usize,
                    ratio,
                });
            }
            if ratio < 8.0 {
                warnings.push(format!(
                    "mode {}: |Δ|/g = {ratio:.1} below 8, dispersive formula strained",
                    mode.index
                ));
            }
        }
        let chi = if g == 0.0 {
            0.0
        } else {
            dispersive_shift_perturbative(g, delta, alpha)?
        };
        shifts.push(DispersiveShift {
            mode_index: mode.index,
            chi,
            detuning: delta,
            coupling: g,
        });
    }
    Ok(StarkShifts { shifts, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn single_mode_table(f: f64, g: f64) -> ModeTable {
        ModeTable {
            modes: vec![Mode {
                index: 1,
                freq: f,
                parity: Parity::Even,
                transverse: false,
                loss: 250e3,
                coupling: g,
            }],
        }
    }

    #[test]
    fn uncoupled_matrix_is_diagonal() {
        let h = build_single_excitation_matrix(4.3e9, &single_mode_table(4.25e9, 0.0));
        let vals = eigenfrequencies(&h).unwrap();
        assert_eq!(vals, vec![4.25e9, 4.3e9]);
    }

    #[test]
    fn resonant_two_by_two_splits_by_2g() {
        let f = 4.25e9;
        let g = 5.1e6;
        let h = build_single_excitation_matrix(f, &single_mode_table(f, g));
        let vals = eigenfrequencies(&h).unwrap();
        assert_relative_eq!(vals[0], f - g, epsilon = 1e-3);
        assert_relative_eq!(vals[1], f + g, epsilon = 1e-3);
    }

    #[test]
    fn reference_matrix_is_15_by_15() {
        let model = SystemModel::reference().unwrap();
        assert_eq!(model.modes.modes.len(), 14);
        assert_eq!(
            model.modes.modes.iter().filter(|m| m.transverse).count(),
            5
        );
        let h = build_single_excitation_matrix(4.318e9, &model.modes);
        assert_eq!(h.nrows(), 15);
        let vals = eigenfrequencies(&h).unwrap();
        // Trace preserved to 1 Hz.
        let trace: f64 = (0..15).map(|i| h[(i, i)]).sum();
        assert_abs_diff_eq!(vals.iter().sum::<f64>(), trace, epsilon = 1.0);
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let mut h = DMatrix::<f64>::zeros(2, 2);
        h[(0, 1)] = 1.0;
        assert!(matches!(eigenfrequencies(&h), Err(Error::Contract(_))));
    }

    #[test]
    fn eigen_residual_within_tolerance() {
        let model = SystemModel::reference().unwrap();
        let h = build_single_excitation_matrix(4.318e9, &model.modes);
        let eig = nalgebra::linalg::SymmetricEigen::new(h.clone());
        let norm = h.norm();
        for k in 0..h.nrows() {
            let v = eig.eigenvectors.column(k);
            let resid = (&h * v - eig.eigenvalues[k] * v).norm();
            assert!(resid <= 1e-9 * norm, "residual {resid:.3e}");
        }
    }

    #[test]
    fn minimum_gap_across_isolated_crossing_is_2g() {
        let g = 5.1e6;
        let f_m = 4.25e9;
        let mut min_gap = f64::INFINITY;
        let mut f_q = f_m - 3.0 * g;
        while f_q <= f_m + 3.0 * g {
            let h = build_single_excitation_matrix(f_q, &single_mode_table(f_m, g));
            let vals = eigenfrequencies(&h).unwrap();
            min_gap = min_gap.min(vals[1] - vals[0]);
            f_q += 1e3;
        }
        assert_relative_eq!(min_gap, 2.0 * g, max_relative = 1e-3);
    }

    #[test]
    fn crossing_spectrum_rows_sorted_and_continuous() {
        let model = SystemModel::reference().unwrap();
        // Sweep the flux so f_q crosses the whole mirror band.
        let i_lo = crate::transmon::current_for_freq(4.32e9, &model.transmon).unwrap();
        let i_hi = crate::transmon::current_for_freq(4.18e9, &model.transmon).unwrap();
        let n = 400;
        let currents: Vec<f64> = (0..n)
            .map(|k| i_lo + (i_hi - i_lo) * k as f64 / (n - 1) as f64)
            .collect();
        let spec = crossing_spectrum(&currents, &model).unwrap();
        assert_eq!(spec.branches.len(), n);
        let di = (i_hi - i_lo) / (n - 1) as f64;
        // |df_q/dI| bound by finite differences on the bare flux curve.
        let mut max_slope = 0.0_f64;
        for w in currents.windows(2) {
            let d = (freq_vs_current(w[1], &model.transmon)
                - freq_vs_current(w[0], &model.transmon))
            .abs();
            max_slope = max_slope.max(d / di);
        }
        for row in &spec.branches {
            assert_eq!(row.len(), model.modes.modes.len() + 1);
            for p in row.windows(2) {
                assert!(p[1] >= p[0]);
            }
        }
        for rows in spec.branches.windows(2) {
            for (a, b) in rows[0].iter().zip(&rows[1]) {
                assert!((b - a).abs() < 5.0 * di * max_slope);
            }
        }
    }

    #[test]
    fn zero_coupling_spectrum_is_flat_lines_plus_flux_curve() {
        let mut model = SystemModel::reference().unwrap();
        for m in &mut model.modes.modes {
            m.coupling = 0.0;
        }
        let i = crate::transmon::current_for_freq(4.4e9, &model.transmon).unwrap();
        let spec = crossing_spectrum(&[i], &model).unwrap();
        let mut expected: Vec<f64> = model.modes.modes.iter().map(|m| m.freq).collect();
        expected.push(4.4e9);
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in spec.branches[0].iter().zip(&expected) {
            assert_abs_diff_eq!(a, b, epsilon = 1e3);
        }
    }

    #[test]
    fn perturbative_shift_signs_and_zero() {
        assert_eq!(dispersive_shift_perturbative(0.0, 50e6, -190e6).unwrap(), 0.0);
        // Straddling level ordering (Δ > 0 > Δ+α) adds both terms: χ > 0.
        assert!(dispersive_shift_perturbative(4e6, 50e6, -190e6).unwrap() > 0.0);
        // Poles rejected.
        assert!(dispersive_shift_perturbative(4e6, 0.0, -190e6).is_err());
        assert!(dispersive_shift_perturbative(4e6, 190e6, -190e6).is_err());
    }

    #[test]
    fn sign_rule_on_detuning_grid() {
        let alpha = -190e6;
        for delta in [10e6, 50e6, 150e6, 250e6] {
            let chi = dispersive_shift_perturbative(4e6, delta, alpha).unwrap();
            let expected_sign = if delta + alpha < 0.0 { 1.0 } else { -1.0 };
            assert_eq!(chi.signum(), expected_sign, "Δ = {delta:.2e}");
        }
    }

    #[test]
    fn numeric_oracle_zero_coupling() {
        let chi = dispersive_shift_numeric(0.0, 40e6, -190e6, 3, 12).unwrap();
        assert_eq!(chi, 0.0);
    }

    #[test]
    fn numeric_oracle_matches_perturbative_at_ratio_10() {
        let g = 4e6;
        let delta = 10.0 * g;
        let alpha = -190e6;
        let numeric = dispersive_shift_numeric(g, delta, alpha, 3, 15).unwrap();
        let pert = dispersive_shift_perturbative(g, delta, alpha).unwrap();
        assert!(
            ((numeric - pert) / numeric).abs() < 0.05,
            "pert {pert:.4e} vs numeric {numeric:.4e}"
        );
    }

    #[test]
    fn numeric_oracle_two_level_limit() {
        let g = 1e6;
        let delta = 20e6;
        // Push the second level far away: χ → g²/Δ.
        let alpha = -1e6 * g;
        let numeric = dispersive_shift_numeric(g, delta, alpha, 3, 12).unwrap();
        let expected = g * g / delta;
        assert_relative_eq!(numeric, expected, max_relative = 0.01);
    }

    #[test]
    fn oracle_agreement_improves_with_detuning() {
        let g = 4e6;
        let alpha = -190e6;
        let rel_err = |ratio: f64| {
            let delta = ratio * g;
            let numeric = dispersive_shift_numeric(g, delta, alpha, 4, 20).unwrap();
            let pert = dispersive_shift_perturbative(g, delta, alpha).unwrap();
            ((numeric - pert) / numeric).abs()
        };
        assert!(rel_err(20.0) < rel_err(8.0));
    }

    #[test]
    fn stark_shifts_validate_dispersive_regime() {
        let model = SystemModel::reference().unwrap();
        // Tune near a mode so |Δ|/g < 3 somewhere.
        let strong = model
            .modes
            .modes
            .iter()
            .filter(|m| !m.transverse)
            .max_by(|a, b| a.coupling.abs().partial_cmp(&b.coupling.abs()).unwrap())
            .unwrap();
        let err = total_stark_hamiltonian_shifts(&model, strong.freq + strong.coupling.abs());
        assert!(matches!(err, Err(Error::DispersiveViolation { .. })));
    }

    #[test]
    fn stark_shifts_zero_for_uncoupled_modes() {
        let mut model = SystemModel::reference().unwrap();
        for m in &mut model.modes.modes {
            m.coupling = 0.0;
        }
        let shifts = total_stark_hamiltonian_shifts(&model, 4.318e9).unwrap();
        assert!(shifts.shifts.iter().all(|s| s.chi == 0.0));
        assert!(shifts.warnings.is_empty());
    }

    #[test]
    fn reference_detuning_ratios_pass_dispersive_check() {
        // Δ/g = 18, 11, 8.5 at g tuned to reproduce 2χ = 500, 1050, 890 kHz.
        let alpha = -190e6_f64;
        for (ratio, two_chi) in [(18.0_f64, 500e3_f64), (11.0, 1050e3), (8.5, 890e3)] {
            // Solve 2·g²(1/Δ − 1/(Δ+α)) = 2χ with Δ = ratio·g.
            let chi = 0.5 * two_chi;
            let g = chi * ratio * alpha / (alpha - chi * ratio * ratio);
            let delta = ratio * g;
            assert!(delta.abs() / g.abs() >= 8.0);
            let check = dispersive_shift_perturbative(g, delta, alpha).unwrap();
            assert_relative_eq!(2.0 * check, two_chi, max_relative = 1e-9);
        }
    }
}
