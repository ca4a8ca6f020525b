//! Strict JSON configuration for the command-line tool.
//!
//! Every section is optional and falls back to the reference device values,
//! so `sawsim papercheck` needs no input file at all. Unknown keys are
//! rejected. Numeric fields accept either plain numbers in base SI units
//! (Hz, s, m, A) or strings with a unit suffix such as `"4.24 GHz"`,
//! `"9.04 ns"`, `"675 nm"`, or `"1.168 mA"`.

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::idt::{IdtParams, LambVariant, QubitEnvironment};
use crate::jc::SystemModel;
use crate::mirror::{CavitySpec, MirrorParams, Mode, ModeTable, Parity};
use crate::spectra::NumberSplitParams;
use crate::transmon::TransmonParams;

/// Scalar in base SI units, deserialized from a number or a suffixed string.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Qty(pub f64);

pub fn parse_quantity(s: &str) -> Result<f64> {
    let s = s.trim();
    let split = s
        .find(|c: char| c.is_ascii_alphabetic() || c == 'µ')
        .unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid number in quantity {s:?}")))?;
    let scale = match unit.trim() {
        "" => 1.0,
        "Hz" => 1.0,
        "kHz" => 1e3,
        "MHz" => 1e6,
        "GHz" => 1e9,
        "s" => 1.0,
        "ms" => 1e-3,
        "us" | "µs" => 1e-6,
        "ns" => 1e-9,
        "m" => 1.0,
        "mm" => 1e-3,
        "um" | "µm" => 1e-6,
        "nm" => 1e-9,
        "A" => 1.0,
        "mA" => 1e-3,
        "uA" | "µA" => 1e-6,
        other => {
            return Err(Error::Config(format!(
                "unknown unit suffix {other:?} in quantity {s:?}"
            )))
        }
    };
    Ok(value * scale)
}

impl<'de> Deserialize<'de> for Qty {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(x) => Ok(Qty(x)),
            Raw::Text(s) => parse_quantity(&s).map(Qty).map_err(de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdtSection {
    pub n_periods: u32,
    pub center_freq: Qty,
    pub delay: Qty,
    pub max_emission: Qty,
    pub max_coupling: Qty,
    pub sound_speed: Qty,
    #[serde(default)]
    pub pitch: Option<Qty>,
    #[serde(default)]
    pub half_length: Option<Qty>,
    #[serde(default)]
    pub separation: Option<Qty>,
}

impl IdtSection {
    pub fn to_params(&self) -> Result<IdtParams> {
        let p = IdtParams {
            n_periods: self.n_periods,
            center_freq: self.center_freq.0,
            delay: self.delay.0,
            max_emission: self.max_emission.0,
            max_coupling: self.max_coupling.0,
            sound_speed: self.sound_speed.0,
            pitch: self.pitch.map(|q| q.0),
            half_length: self.half_length.map(|q| q.0),
            separation: self.separation.map(|q| q.0),
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSection {
    pub q_internal: f64,
    #[serde(default)]
    pub lamb_variant: LambVariant,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MirrorSection {
    pub n_strips: u32,
    pub strip_reflectivity: f64,
    pub pitch: Qty,
    pub sound_speed: Qty,
    pub mirror_separation: Qty,
}

impl MirrorSection {
    pub fn to_cavity(&self) -> Result<CavitySpec> {
        let c = CavitySpec {
            mirror_separation: self.mirror_separation.0,
            sound_speed: self.sound_speed.0,
            mirrors: MirrorParams {
                n_strips: self.n_strips,
                strip_reflectivity: self.strip_reflectivity,
                pitch: self.pitch.0,
                sound_speed: self.sound_speed.0,
            },
        };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmonSection {
    pub zero_field_freq: Qty,
    pub asymmetry: f64,
    pub half_quantum_current: Qty,
    pub offset_current: Qty,
    pub anharmonicity: Qty,
    pub q_internal: f64,
    #[serde(default)]
    pub pure_dephasing: Option<Qty>,
}

impl TransmonSection {
    pub fn to_params(&self) -> Result<TransmonParams> {
        let p = TransmonParams {
            zero_field_freq: self.zero_field_freq.0,
            asymmetry: self.asymmetry,
            half_quantum_current: self.half_quantum_current.0,
            offset_current: self.offset_current.0,
            anharmonicity: self.anharmonicity.0,
            q_internal: self.q_internal,
            pure_dephasing: self.pure_dephasing.map_or(0.0, |q| q.0),
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSection {
    pub index: u32,
    pub freq: Qty,
    pub parity: Parity,
    #[serde(default)]
    pub transverse: bool,
    pub loss: Qty,
    pub coupling: Qty,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumberSplitSection {
    pub qubit_freq: Qty,
    pub qubit_linewidth: Qty,
    pub mode_loss: Qty,
    pub half_shift: Qty,
    pub n_max: u32,
    #[serde(default)]
    pub offset: f64,
    pub amplitude: f64,
    #[serde(default)]
    pub pull_per_phonon: Option<Qty>,
}

impl NumberSplitSection {
    pub fn to_params(&self) -> Result<NumberSplitParams> {
        let p = NumberSplitParams {
            qubit_freq: self.qubit_freq.0,
            qubit_linewidth: self.qubit_linewidth.0,
            mode_loss: self.mode_loss.0,
            half_shift: self.half_shift.0,
            n_max: self.n_max,
            offset: self.offset,
            amplitude: self.amplitude,
            pull_per_phonon: self.pull_per_phonon.map_or(0.0, |q| q.0),
        };
        p.validate()?;
        Ok(p)
    }
}

/// Frequency grid for the transducer-response sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreqSweepSection {
    pub start: Qty,
    pub stop: Qty,
    pub step: Qty,
}

impl FreqSweepSection {
    pub fn grid(&self) -> Result<Vec<f64>> {
        let (start, stop, step) = (self.start.0, self.stop.0, self.step.0);
        if !(step > 0.0) || stop < start {
            return Err(Error::Config("sweep needs stop >= start and step > 0".into()));
        }
        let n = ((stop - start) / step).round() as usize + 1;
        if n > 50_000_000 {
            return Err(Error::Config(format!("sweep grid too large ({n} points)")));
        }
        Ok((0..n).map(|k| start + k as f64 * step).collect())
    }
}

/// Flux sweep expressed as a qubit-frequency window.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingSweepSection {
    pub freq_start: Qty,
    pub freq_stop: Qty,
    pub points: usize,
}

/// Drive powers and grid for the number-splitting sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub powers: Vec<f64>,
    /// Phonons per power unit, η.
    pub conversion: f64,
    /// Half-width of the spectroscopy window around the qubit.
    pub span: Qty,
    pub points: usize,
}

/// Top-level params file. Sections absent from the JSON fall back to the
/// reference device.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    #[serde(default)]
    pub idt: Option<IdtSection>,
    #[serde(default)]
    pub environment: Option<EnvironmentSection>,
    #[serde(default)]
    pub mirror: Option<MirrorSection>,
    #[serde(default)]
    pub transmon: Option<TransmonSection>,
    #[serde(default)]
    pub modes: Option<Vec<ModeSection>>,
    #[serde(default)]
    pub numbersplit: Option<NumberSplitSection>,
    #[serde(default)]
    pub idt_sweep: Option<FreqSweepSection>,
    #[serde(default)]
    pub crossing_sweep: Option<CrossingSweepSection>,
    #[serde(default)]
    pub drive: Option<DriveSection>,
}

/// Fully resolved run parameters, with defaults applied.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub idt: IdtParams,
    pub environment: QubitEnvironment,
    pub cavity: CavitySpec,
    pub transmon: TransmonParams,
    pub system: SystemModel,
    pub numbersplit: NumberSplitParams,
    pub idt_sweep: (f64, f64, f64),
    pub crossing_sweep: (f64, f64, usize),
    pub drive_powers: Vec<f64>,
    pub drive_conversion: f64,
    pub drive_span: f64,
    pub drive_points: usize,
}

impl ParamsFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("invalid config {}: {e}", path.display())))
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let idt = match &self.idt {
            Some(s) => s.to_params()?,
            None => IdtParams::reference(),
        };
        let environment = match &self.environment {
            Some(s) => QubitEnvironment {
                q_internal: s.q_internal,
                lamb_variant: s.lamb_variant,
            },
            None => QubitEnvironment::reference(),
        };
        environment.validate()?;
        let cavity = match &self.mirror {
            Some(s) => s.to_cavity()?,
            None => CavitySpec::reference(),
        };
        let transmon = match &self.transmon {
            Some(s) => s.to_params()?,
            None => TransmonParams::reference(),
        };
        let system = match &self.modes {
            Some(sections) => {
                let modes = sections
                    .iter()
                    .map(|m| Mode {
                        index: m.index,
                        freq: m.freq.0,
                        parity: m.parity,
                        transverse: m.transverse,
                        loss: m.loss.0,
                        coupling: m.coupling.0,
                    })
                    .collect();
                let model = SystemModel {
                    transmon: transmon.clone(),
                    modes: ModeTable { modes },
                };
                model.validate()?;
                model
            }
            None => {
                let mut model = SystemModel::reference()
                    .map_err(|e| Error::Config(format!("reference model failed: {e}")))?;
                model.transmon = transmon.clone();
                model
            }
        };
        let numbersplit = match &self.numbersplit {
            Some(s) => s.to_params()?,
            None => NumberSplitParams::reference_mode7(),
        };
        let idt_sweep = match &self.idt_sweep {
            Some(s) => {
                s.grid()?;
                (s.start.0, s.stop.0, s.step.0)
            }
            None => (3.8e9, 4.8e9, 0.1e6),
        };
        let crossing_sweep = match &self.crossing_sweep {
            Some(s) => {
                if s.points < 2 {
                    return Err(Error::Config("crossing sweep needs >= 2 points".into()));
                }
                (s.freq_start.0, s.freq_stop.0, s.points)
            }
            None => (4.19e9, 4.35e9, 321),
        };
        let (drive_powers, drive_conversion, drive_span, drive_points) = match &self.drive {
            Some(d) => {
                if d.powers.is_empty() || d.powers.iter().any(|&p| p < 0.0) {
                    return Err(Error::Config("drive powers must be nonempty, >= 0".into()));
                }
                if !(d.conversion > 0.0) || d.points < 2 {
                    return Err(Error::Config(
                        "drive conversion must be > 0 and points >= 2".into(),
                    ));
                }
                (d.powers.clone(), d.conversion, d.span.0, d.points)
            }
            None => (
                vec![0.0, 0.405, 0.811, 1.622, 2.703, 4.054, 5.405],
                0.37,
                8e6,
                1601,
            ),
        };
        Ok(Resolved {
            idt,
            environment,
            cavity,
            transmon,
            system,
            numbersplit,
            idt_sweep,
            crossing_sweep,
            drive_powers,
            drive_conversion,
            drive_span,
            drive_points,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantity_suffixes() {
        assert_eq!(parse_quantity("4.24 GHz").unwrap(), 4.24e9);
        assert_eq!(parse_quantity("0.1MHz").unwrap(), 0.1e6);
        assert_eq!(parse_quantity("9.04 ns").unwrap(), 9.04e-9);
        assert_eq!(parse_quantity("675 nm").unwrap(), 675e-9);
        assert_eq!(parse_quantity("1.168 mA").unwrap(), 1.168e-3);
        assert_eq!(parse_quantity("79.2 uA").unwrap(), 79.2e-6);
        assert_eq!(parse_quantity("125 um").unwrap(), 125e-6);
        assert_eq!(parse_quantity("42").unwrap(), 42.0);
        assert!(parse_quantity("3 parsec").is_err());
        assert!(parse_quantity("GHz").is_err());
    }

    #[test]
    fn qty_accepts_numbers_and_strings() {
        let q: Qty = serde_json::from_str("5718000000.0").unwrap();
        assert_eq!(q.0, 5.718e9);
        let q: Qty = serde_json::from_str("\"5.718 GHz\"").unwrap();
        assert_eq!(q.0, 5.718e9);
        assert!(serde_json::from_str::<Qty>("\"fast\"").is_err());
    }

    #[test]
    fn empty_config_resolves_to_reference() {
        let p: ParamsFile = serde_json::from_str("{}").unwrap();
        let r = p.resolve().unwrap();
        assert_eq!(r.idt.center_freq, 4.24e9);
        assert_eq!(r.transmon.zero_field_freq, 5.718e9);
        assert_eq!(r.numbersplit.half_shift, 445e3);
        assert_eq!(r.idt_sweep, (3.8e9, 4.8e9, 0.1e6));
        assert_eq!(r.system.modes.modes.len(), 14);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<ParamsFile>("{\"idtt\": {}}").is_err());
        let bad = r#"{"transmon": {"zero_field_freq": "5.718 GHz", "asymmetry": 0.14,
            "half_quantum_current": "1.168 mA", "offset_current": "79.2 uA",
            "anharmonicity": -190e6, "q_internal": 1.2e4, "extra": 1}}"#;
        assert!(serde_json::from_str::<ParamsFile>(bad).is_err());
    }

    #[test]
    fn sweep_grid_row_count() {
        let s = FreqSweepSection {
            start: Qty(3.8e9),
            stop: Qty(4.8e9),
            step: Qty(0.1e6),
        };
        assert_eq!(s.grid().unwrap().len(), 10001);
        let bad = FreqSweepSection {
            start: Qty(4.8e9),
            stop: Qty(3.8e9),
            step: Qty(0.1e6),
        };
        assert!(bad.grid().is_err());
    }

    #[test]
    fn partial_section_with_units_round_trips() {
        let text = r#"{
            "numbersplit": {
                "qubit_freq": "4.318 GHz",
                "qubit_linewidth": "550 kHz",
                "mode_loss": "275 kHz",
                "half_shift": "445 kHz",
                "n_max": 6,
                "amplitude": 1.0
            }
        }"#;
        let p: ParamsFile = serde_json::from_str(text).unwrap();
        let r = p.resolve().unwrap();
        assert_eq!(r.numbersplit.qubit_freq, 4.318e9);
        assert_eq!(r.numbersplit.pull_per_phonon, 0.0);
    }
}
