//! Scenario dispatch. Every scenario returns one [`ResultTable`]; sweep
//! points may be computed concurrently but rows keep sweep order.

use gravlab_core::gedanken::{evaluate, no_paradox_scan, GedankenParams};
use gravlab_core::gie::{simulate, GravcatConfig, MediatorModel};
use gravlab_core::ging::{evolve_coherent, non_gaussianity};
use gravlab_core::newtoncartan::three_way_comparison;
use gravlab_core::nogo::{quantum_counterexample, verify_classical_separability, zeno_counterexample};
use gravlab_core::precursors::{
    emission_time_identity, mannheim_analysis, ow_phase, pg_scg_prediction, pg_simulate, DecayBit,
};
use rayon::prelude::*;

use crate::config::{
    CavendishParams, GieParams, GingParams, NcParams, NogoParams, Params, ScanParams, Scenario,
    ScenarioConfig, SweepSpec,
};
use crate::error::{CliError, Result};
use crate::table::{Format, ResultTable, Value};

pub fn default_format(scenario: Scenario) -> Format {
    match scenario {
        Scenario::NogoVerify => Format::Json,
        _ => Format::Csv,
    }
}

/// Validates `cfg` and runs its scenario.
pub fn run(cfg: &ScenarioConfig) -> Result<ResultTable> {
    cfg.validate()?;
    let mut table = match &cfg.params {
        Params::Gie(p) if cfg.scenario == Scenario::GieState => gie_state(p)?,
        Params::Gie(p) => gie_sweep(p, sweep_of(cfg)?)?,
        Params::Nogo(p) => nogo_verify(p, seed_of(cfg)?)?,
        Params::Scan(p) => gedanken_scan(p)?,
        Params::Cow(p) => cow(p)?,
        Params::Cavendish(p) => cavendish(p, seed_of(cfg)?)?,
        Params::Ging(p) => ging_evolve(p, cfg.sweep.as_ref())?,
        Params::Nc(p) => nc_check(p)?,
    };
    table.meta.scenario = cfg.scenario.name().to_string();
    table.meta.config_hash = cfg.hash()?;
    log::info!("{}: {} rows", cfg.scenario, table.rows().len());
    Ok(table)
}

fn seed_of(cfg: &ScenarioConfig) -> Result<u64> {
    cfg.seed
        .ok_or_else(|| CliError::schema(format!("seed: required for scenario `{}`", cfg.scenario)))
}

fn sweep_of(cfg: &ScenarioConfig) -> Result<&SweepSpec> {
    cfg.sweep
        .as_ref()
        .ok_or_else(|| CliError::schema(format!("sweep: required for scenario `{}`", cfg.scenario)))
}

fn model_eta(m: &MediatorModel) -> Value {
    match m {
        MediatorModel::QuantumMediator(eta) => Value::Float(*eta),
        _ => Value::Null,
    }
}

fn gie_state(p: &GieParams) -> Result<ResultTable> {
    let cfg = p.gravcat();
    let results: Vec<_> = p
        .models
        .par_iter()
        .map(|&m| simulate(&cfg, m, p.chsh))
        .collect::<std::result::Result<_, _>>()?;
    let mut t = ResultTable::new(["model", "eta", "theta", "negativity", "chsh", "entangled"]);
    for r in results {
        t.push_row(vec![
            r.model.name().into(),
            model_eta(&r.model),
            r.theta.into(),
            r.negativity.into(),
            Value::opt_float(r.chsh),
            (r.negativity > gravlab_core::quantum::SEPARABILITY_TOL).into(),
        ])?;
    }
    t.summarize("closest_separation", cfg.delta());
    t.summarize("phase_rate", gravlab_core::gie::phase_rate(&cfg));
    Ok(t)
}

fn sweep_point(base: &GravcatConfig, axis: &str, x: f64) -> GravcatConfig {
    let mut c = *base;
    match axis {
        "t" => c.duration = x,
        "m" => c.mass = x,
        "D" => c.half_separation = x,
        "Delta" => c.packet_offset = x,
        _ => unreachable!("axis checked by SweepSpec::validate"),
    }
    c
}

fn gie_sweep(p: &GieParams, sweep: &SweepSpec) -> Result<ResultTable> {
    let base = p.gravcat();
    let points: Vec<GravcatConfig> = sweep
        .values()
        .into_iter()
        .map(|x| sweep_point(&base, &sweep.axis, x))
        .collect();
    for c in &points {
        c.validate().map_err(CliError::Invalid)?;
    }
    let jobs: Vec<(usize, MediatorModel)> = (0..points.len())
        .flat_map(|i| p.models.iter().map(move |&m| (i, m)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(i, m)| simulate(&points[i], m, p.chsh))
        .collect::<std::result::Result<_, _>>()?;
    let multi = p.models.len() > 1;
    let mut cols = vec![sweep.axis.clone()];
    if multi {
        cols.push("model".into());
    }
    cols.extend(["theta", "negativity", "chsh"].map(String::from));
    let mut t = ResultTable::new(cols);
    let xs = sweep.values();
    for (&(i, _), r) in jobs.iter().zip(results) {
        let mut row = vec![Value::Float(xs[i])];
        if multi {
            row.push(r.model.name().into());
        }
        row.extend([r.theta.into(), r.negativity.into(), Value::opt_float(r.chsh)]);
        t.push_row(row)?;
    }
    Ok(t)
}

fn nogo_verify(p: &NogoParams, seed: u64) -> Result<ResultTable> {
    let r = verify_classical_separability(p.trials, seed)?;
    let counter = quantum_counterexample(p.coupling, p.time)?;
    let zeno = zeno_counterexample(p.coupling, p.time, p.zeno_steps)?;
    let mut t = ResultTable::new([
        "trials",
        "seed",
        "times_per_trial",
        "worst_min_pt_eigenvalue",
        "max_bit_drift",
        "max_split_commutator",
        "max_bit_commutator",
        "max_factorization_error",
        "separability_violations",
        "drift_violations",
        "separable",
        "counterexample_negativity",
        "zeno_negativity",
    ]);
    t.push_row(vec![
        r.trials.into(),
        Value::Text(r.seed.to_string()),
        r.times_per_trial.into(),
        r.worst_min_pt_eigenvalue.into(),
        r.max_bit_drift.into(),
        r.max_split_commutator.into(),
        r.max_bit_commutator.into(),
        r.max_factorization_error.into(),
        r.separability_violations.into(),
        r.drift_violations.into(),
        r.separable.into(),
        counter.into(),
        zeno.into(),
    ])?;
    Ok(t)
}

fn gedanken_scan(p: &ScanParams) -> Result<ResultTable> {
    let cert = no_paradox_scan(&p.grid)?;
    let mut t = if p.emit_points {
        let points: Vec<GedankenParams> = p.grid.points().collect();
        let reports: Vec<_> = points
            .par_iter()
            .map(|q| evaluate(q, p.crr_margin))
            .collect::<std::result::Result<_, _>>()?;
        let mut t = ResultTable::new([
            "Q_A",
            "T_A",
            "T_B",
            "D",
            "mlr",
            "qrr",
            "crr",
            "n_quanta",
            "displacement",
            "spacelike",
            "case_label",
        ]);
        for (q, r) in points.iter().zip(reports) {
            t.push_row(vec![
                q.q_a.into(),
                q.t_a.into(),
                q.t_b.into(),
                q.d.into(),
                r.mlr.into(),
                r.qrr.into(),
                r.crr.into(),
                r.n_quanta.into(),
                r.displacement.into(),
                r.spacelike.into(),
                r.case_label.as_str().into(),
            ])?;
        }
        t
    } else {
        let mut t = ResultTable::new([
            "points_scanned",
            "violations",
            "feasibility_violations",
            "non_spacelike_coexistence",
            "max_displacement_qrr_spacelike",
            "witness_chain",
        ]);
        t.push_row(vec![
            cert.points_scanned.into(),
            cert.violations.into(),
            cert.feasibility_violations.into(),
            cert.non_spacelike_coexistence.into(),
            cert.max_displacement_qrr_spacelike.into(),
            cert.witness_chain.into(),
        ])?;
        t
    };
    t.summarize("points_scanned", cert.points_scanned);
    t.summarize("violations", cert.violations);
    t.summarize("feasibility_violations", cert.feasibility_violations);
    Ok(t)
}

fn cow(p: &gravlab_core::precursors::CowConfig) -> Result<ResultTable> {
    let m = mannheim_analysis(p)?;
    let e = emission_time_identity(p)?;
    let ow = ow_phase(p);
    let mut t = ResultTable::new(["segment", "phase"]);
    for (name, phase) in [
        ("AB1", m.phi_ab1),
        ("AC", m.phi_ac),
        ("CD1", m.phi_cd1),
        ("B1D2", m.phi_b1d2),
        ("loop", m.loop_phase),
        ("offset", m.offset_phase),
        ("total", m.total),
        ("ow", ow),
    ] {
        t.push_row(vec![name.into(), phase.into()])?;
    }
    t.summarize("delta", m.delta);
    t.summarize("expansion_parameter", p.expansion_parameter());
    t.summarize("first_order_valid", m.first_order_valid);
    t.summarize("total_vs_ow_relative", (m.total - ow).abs() / ow.abs());
    t.summarize("emission_time_residual", e.residual);
    Ok(t)
}

fn cavendish(p: &CavendishParams, seed: u64) -> Result<ResultTable> {
    let s = pg_simulate(p.runs, seed)?;
    let mut t = ResultTable::new(["run", "decay_bit", "deflection"]);
    for (k, r) in s.runs.iter().enumerate() {
        let bit = match r.decay_bit {
            DecayBit::A => "A",
            DecayBit::B => "B",
        };
        t.push_row(vec![k.into(), bit.into(), Value::Int(r.deflection.into())])?;
    }
    t.summarize("mean_deflection", s.mean);
    t.summarize("min_abs_deflection", Value::Int(s.min_abs_deflection.into()));
    t.summarize("scg_prediction", pg_scg_prediction());
    Ok(t)
}

fn ging_evolve(p: &GingParams, sweep: Option<&SweepSpec>) -> Result<ResultTable> {
    let lambda = p.bec.lambda().map_err(CliError::Invalid)?;
    let times = match sweep {
        Some(s) => s.values(),
        None => SweepSpec::linear("t", 0.0, p.bec.duration, p.samples).values(),
    };
    let alpha = p.bec.alpha();
    let rows: Vec<_> = times
        .par_iter()
        .map(|&time| {
            let state = evolve_coherent(alpha, p.bec.cutoff, lambda, time, p.dynamics)?;
            let ng = non_gaussianity(&state);
            Ok::<_, gravlab_core::Error>(vec![
                time.into(),
                (lambda * time).into(),
                ng.delta_g.into(),
                ng.nu.into(),
                state.leakage().into(),
            ])
        })
        .collect::<std::result::Result<_, _>>()?;
    let mut t = ResultTable::new(["t", "lambda_t", "delta_G", "nu", "leakage"]);
    for row in rows {
        t.push_row(row)?;
    }
    t.summarize("lambda", lambda);
    t.summarize(
        "dynamics",
        match p.dynamics {
            gravlab_core::ging::Dynamics::Qg => "qg",
            gravlab_core::ging::Dynamics::Cg => "cg",
        },
    );
    Ok(t)
}

fn nc_check(p: &NcParams) -> Result<ResultTable> {
    let radius = p
        .body_radius
        .ok_or_else(|| CliError::schema("params.body_radius: missing"))?;
    let c = three_way_comparison(&p.gravcat(), radius)?;
    let mut t = ResultTable::new(["method", "phase", "relative_deviation"]);
    for (name, phase) in [
        ("newtonian", c.newtonian),
        ("redshift", c.redshift),
        ("newton_cartan", c.newton_cartan),
    ] {
        t.push_row(vec![
            name.into(),
            phase.into(),
            ((phase - c.newtonian) / c.newtonian).into(),
        ])?;
    }
    t.summarize("max_relative_spread", c.max_relative_spread);
    Ok(t)
}
