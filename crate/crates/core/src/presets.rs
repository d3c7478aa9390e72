//! Figure presets.
//!
//! Every preset starts from the caption circuit (C_j = 0.03 pF,
//! C_jk = 0.05 pF, L_k = 5 nH, C_k over [0.18, 2.02] pF, 10 mK, coupling
//! scale 0.1) with `ω_q` at the midpoint mode frequency and the
//! spontaneous-emission time pinned to 0.7 μs at C_jk = 0.05 pF, ω_q = ω_k.
//!
//! Each grid cell is the qubit coupled to a single mode whose `C_k` is set by
//! the `c_k_pF` axis, so the axis traces the per-mode curve across the bank.

use crate::config::{auto_omega_q, sweep_spec, ConfigDocument};
use crate::sweep::{SweepError, SweepSpec};
use crate::units::angular_to_ghz;

pub const PRESET_IDS: [&str; 12] = [
    "fig2a", "fig2b", "fig3a", "fig3b", "fig3b-text", "fig4a", "fig4b", "fig5a", "fig5b", "fig5c", "fig5d", "figB1",
];

/// Reference spontaneous-emission time at the calibration point (μs).
pub const CALIBRATION_T_S_US: &str = "0.7";

const C_K_AXIS: [(&str, &str); 4] = [("param", "c_k_pF"), ("min", "0.18"), ("max", "2.02"), ("count", "201")];
const DETUNING_AXIS: [(&str, &str); 4] = [("param", "detuning_GHz"), ("min", "-1"), ("max", "1"), ("count", "201")];
const TIME_AXIS: [(&str, &str); 4] = [("param", "time_ns"), ("min", "0"), ("max", "50"), ("count", "101")];
const C_J_FAMILY: [(&str, &str); 2] = [("param", "c_j_pF"), ("values", "0.03, 0.06, 0.12")];
const C_JK_PAIR: [(&str, &str); 2] = [("param", "c_jk_pF"), ("values", "0.01, 0.05")];

/// Configuration document of a preset.
pub fn preset_document(id: &str) -> Result<ConfigDocument, SweepError> {
    if !PRESET_IDS.contains(&id) {
        return Err(SweepError::UnknownPreset(id.to_string()));
    }
    let mut doc = ConfigDocument::new();
    let mut set = |section: &str, key: &str, value: &str| {
        doc.set(section, key, value).expect("preset values are valid");
    };
    set("reservoir", "n_modes", "1");
    set("rates", "calibration_t_s_us", CALIBRATION_T_S_US);
    set("sweep", "preset", id);

    let mut axes: Vec<Vec<(&str, String)>> = Vec::new();
    let observables = match id {
        "fig2a" => {
            axes.push(own(&C_K_AXIS));
            "n_q, n_k"
        }
        "fig2b" => {
            axes.extend([own(&C_J_FAMILY), own(&C_K_AXIS)]);
            "n_q"
        }
        "fig3a" | "fig3b" | "fig3b-text" => {
            let n_q = match id {
                "fig3a" => "0.005",
                "fig3b" => "0.4",
                _ => "0.2",
            };
            set("sweep", "n_q", n_q);
            set("circuit", "e_j_GHz", "0");
            axes.extend([own(&DETUNING_AXIS), own(&TIME_AXIS)]);
            "rho11, rho22"
        }
        "fig4a" => {
            axes.push(own(&C_K_AXIS));
            set("sweep", "aggregate", "on");
            "gamma_1, gamma_purcell, gamma_phi, t_s, t_phi"
        }
        "fig4b" => {
            axes.extend([own(&C_J_FAMILY), own(&C_K_AXIS)]);
            "gamma_1, t_s"
        }
        "fig5a" => {
            axes.extend([own(&C_JK_PAIR), own(&C_K_AXIS)]);
            "n_q"
        }
        "fig5b" => {
            set("sweep", "n_q", "0.005");
            set("circuit", "e_j_GHz", "0");
            axes.extend([own(&C_JK_PAIR), own(&DETUNING_AXIS), own(&TIME_AXIS)]);
            "rho11, rho22"
        }
        "fig5c" => {
            axes.extend([own(&C_JK_PAIR), own(&C_K_AXIS)]);
            "t_s, gamma_1"
        }
        "fig5d" => {
            axes.extend([own(&C_JK_PAIR), own(&C_K_AXIS)]);
            "t_phi"
        }
        "figB1" => {
            let f_q = angular_to_ghz(auto_omega_q(&ConfigDocument::new()));
            let omega = vec![
                ("param", "omega_GHz".to_string()),
                ("min", format!("{:?}", 0.5 * f_q)),
                ("max", format!("{:?}", 1.5 * f_q)),
                ("count", "201".to_string()),
            ];
            axes.extend([vec![("param", "coupling_scale".into()), ("values", "0.1, 1".into())], omega, own(&C_K_AXIS)]);
            "n_q, n_k"
        }
        _ => unreachable!(),
    };
    set("sweep", "observables", observables);
    for (n, axis) in axes.iter().enumerate() {
        for (field, value) in axis {
            set("sweep", &format!("axis{}_{field}", n + 1), value);
        }
    }
    Ok(doc)
}

fn own(a: &[(&'static str, &str)]) -> Vec<(&'static str, String)> {
    a.iter().map(|&(k, v)| (k, v.to_string())).collect()
}

pub fn figure_preset(id: &str) -> Result<SweepSpec, SweepError> {
    let doc = preset_document(id)?;
    Ok(sweep_spec(&doc).expect("preset documents build"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_builds() {
        for id in PRESET_IDS {
            let spec = figure_preset(id).unwrap();
            assert_eq!(spec.preset.as_deref(), Some(id));
        }
        assert_eq!(figure_preset("fig9").unwrap_err(), SweepError::UnknownPreset("fig9".into()));
    }
}
