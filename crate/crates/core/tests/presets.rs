//! Every preset must carry the caption parameters of its figure.

use decoherence_lab::sweep::AxisValues;
use decoherence_lab::units::{angular_to_ghz, MICRO, NANO, PICO};
use decoherence_lab::{figure_preset, rates, run_sweep, Observable, SweepParam, PRESET_IDS};

struct Expected {
    id: &'static str,
    axes: &'static [SweepParam],
    observables: &'static [&'static str],
    n_q: Option<f64>,
    first_axis_values: Option<&'static [f64]>,
}

const CASES: &[Expected] = &[
    Expected { id: "fig2a", axes: &[SweepParam::CK], observables: &["n_q", "n_k"], n_q: None, first_axis_values: None },
    Expected {
        id: "fig2b",
        axes: &[SweepParam::CJ, SweepParam::CK],
        observables: &["n_q"],
        n_q: None,
        first_axis_values: Some(&[0.03, 0.06, 0.12]),
    },
    Expected {
        id: "fig3a",
        axes: &[SweepParam::Detuning, SweepParam::Time],
        observables: &["rho11", "rho22"],
        n_q: Some(0.005),
        first_axis_values: None,
    },
    Expected {
        id: "fig3b",
        axes: &[SweepParam::Detuning, SweepParam::Time],
        observables: &["rho11", "rho22"],
        n_q: Some(0.4),
        first_axis_values: None,
    },
    Expected {
        id: "fig3b-text",
        axes: &[SweepParam::Detuning, SweepParam::Time],
        observables: &["rho11", "rho22"],
        n_q: Some(0.2),
        first_axis_values: None,
    },
    Expected {
        id: "fig4a",
        axes: &[SweepParam::CK],
        observables: &["gamma_1", "gamma_purcell", "gamma_phi", "t_s", "t_phi"],
        n_q: None,
        first_axis_values: None,
    },
    Expected {
        id: "fig4b",
        axes: &[SweepParam::CJ, SweepParam::CK],
        observables: &["gamma_1", "t_s"],
        n_q: None,
        first_axis_values: Some(&[0.03, 0.06, 0.12]),
    },
    Expected {
        id: "fig5a",
        axes: &[SweepParam::CJk, SweepParam::CK],
        observables: &["n_q"],
        n_q: None,
        first_axis_values: Some(&[0.01, 0.05]),
    },
    Expected {
        id: "fig5b",
        axes: &[SweepParam::CJk, SweepParam::Detuning, SweepParam::Time],
        observables: &["rho11", "rho22"],
        n_q: Some(0.005),
        first_axis_values: Some(&[0.01, 0.05]),
    },
    Expected {
        id: "fig5c",
        axes: &[SweepParam::CJk, SweepParam::CK],
        observables: &["t_s", "gamma_1"],
        n_q: None,
        first_axis_values: Some(&[0.01, 0.05]),
    },
    Expected {
        id: "fig5d",
        axes: &[SweepParam::CJk, SweepParam::CK],
        observables: &["t_phi"],
        n_q: None,
        first_axis_values: Some(&[0.01, 0.05]),
    },
    Expected {
        id: "figB1",
        axes: &[SweepParam::CouplingScale, SweepParam::Omega, SweepParam::CK],
        observables: &["n_q", "n_k"],
        n_q: None,
        first_axis_values: Some(&[0.1, 1.0]),
    },
];

#[test]
fn table_covers_every_preset() {
    let ids: Vec<&str> = CASES.iter().map(|c| c.id).collect();
    assert_eq!(ids, PRESET_IDS);
}

#[test]
fn presets_carry_caption_parameters() {
    for case in CASES {
        let spec = figure_preset(case.id).unwrap();
        let c = &spec.base.circuit;
        assert_eq!(spec.preset.as_deref(), Some(case.id));
        assert_eq!(c.modes.len(), 1, "{}", case.id);
        assert!((c.c_j / PICO - 0.03).abs() < 1e-12, "{}", case.id);
        assert!((c.modes[0].c_jk / PICO - 0.05).abs() < 1e-12, "{}", case.id);
        assert!((c.modes[0].l_k / NANO - 5.0).abs() < 1e-12, "{}", case.id);
        assert!((c.temperature - 0.01).abs() < 1e-15, "{}", case.id);
        assert_eq!(c.coupling_scale, 0.1, "{}", case.id);
        assert!((angular_to_ghz(c.omega_q) - 2.1459).abs() < 1e-3, "{}", case.id);

        let params: Vec<SweepParam> = spec.axes.iter().map(|a| a.param).collect();
        assert_eq!(params, case.axes, "{}", case.id);
        let names: Vec<&str> = spec.observables.iter().map(|o| o.name()).collect();
        assert_eq!(names, case.observables, "{}", case.id);
        assert_eq!(spec.base.n_q, case.n_q, "{}", case.id);
        if let Some(values) = case.first_axis_values {
            assert_eq!(spec.axes[0].values, AxisValues::Values(values.to_vec()), "{}", case.id);
        }
        for axis in &spec.axes {
            match axis.param {
                SweepParam::CK => assert_eq!(axis.values, AxisValues::Linear { min: 0.18, max: 2.02, count: 201 }),
                SweepParam::Detuning => assert_eq!(axis.values, AxisValues::Linear { min: -1.0, max: 1.0, count: 201 }),
                SweepParam::Time => assert_eq!(axis.values, AxisValues::Linear { min: 0.0, max: 50.0, count: 101 }),
                _ => {}
            }
        }
        if case.axes.contains(&SweepParam::Detuning) {
            assert_eq!(c.e_j, 0.0, "{}", case.id);
        }
        assert_eq!(spec.aggregate, case.id == "fig4a");
    }
}

#[test]
fn presets_share_the_calibration_anchor() {
    let spec = figure_preset("fig4a").unwrap();
    let cal = spec.base.rates.calibration.as_ref().expect("presets are calibrated");
    assert!((cal.target_t_s / MICRO - 0.7).abs() < 1e-12);
    let r = rates(&cal.reference, &spec.base.rates);
    assert!((1.0 / r.gamma_1 / (0.7 * MICRO) - 1.0).abs() < 1e-12);
}

#[test]
fn photon_curves_cross_where_mode_meets_qubit() {
    let result = run_sweep(&figure_preset("fig2a").unwrap()).unwrap();
    let n_q = result.column(Observable::NQ).unwrap();
    let n_k = result.column(Observable::NK).unwrap();
    let diff: Vec<f64> = n_q.iter().zip(&n_k).map(|(a, b)| a.unwrap() - b.unwrap()).collect();
    let crossings: Vec<usize> = (1..diff.len()).filter(|&i| diff[i - 1].signum() != diff[i].signum()).collect();
    // Cell 100 is the C_k midpoint, resonant with the qubit.
    assert_eq!(crossings.len(), 1, "{crossings:?}");
    assert!((99..=101).contains(&crossings[0]), "{crossings:?}");
}

#[test]
fn figure_b1_frequency_axis_spans_half_to_one_and_a_half_qubit_frequency() {
    let spec = figure_preset("figB1").unwrap();
    let f_q = angular_to_ghz(spec.base.circuit.omega_q);
    let AxisValues::Linear { min, max, count } = spec.axes[1].values else { panic!("linear axis expected") };
    assert!((min / f_q - 0.5).abs() < 1e-12 && (max / f_q - 1.5).abs() < 1e-12);
    assert_eq!(count, 201);
}
