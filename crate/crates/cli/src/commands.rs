use std::fs;

use heunrwe::oracle::SolverConfig;
use heunrwe::reduction::{default_grid, laurent_coefficients, log_grid};
use heunrwe::{
    assemble_wavefunction, ground_state_index, isr_energy_dirichlet, isr_entry, isr_scalar_potentials,
    isr_spec_from_length, ode_residual, quasipoly_oracle_energy, quasipoly_q_values, reduce_to_bch, rwe_isr_spectrum,
    rwe_to_schrodinger, scalar_potential, schrodinger_to_rwe, solve_bound_states, vector_potential_sq, Bch, Boundary,
    BranchPolicy, Potential, ScalarVectorPair, Solver, Units, Wavefunction,
};
use serde_json::{json, Map, Value};

use crate::args::*;
use crate::report::{validate, Failure, Outcome, SCHEMA};

type CmdResult = Result<Outcome, Failure>;

/// Eigenfunction samples kept per level with `--wavefunctions`.
const MAX_SAMPLES: usize = 500;

fn obj(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("object literal"),
    }
}

pub fn run(cmd: &Command, units: &Units) -> CmdResult {
    match cmd {
        Command::BchEval(a) => bch_eval(a),
        Command::BchCoefficients(a) => bch_coefficients(a),
        Command::QValues(a) => q_values(a),
        Command::Spectrum(s) => spectrum(s, units),
        Command::Oracle(a) => oracle(a, units),
        Command::Reduce(a) => reduce(a, units),
        Command::Potential(p) => potential(p, units),
        Command::Schema => schema(),
        Command::Validate { file } => validate_file(file),
    }
}

fn bch(p: &BchParamArgs) -> Result<Bch, Failure> {
    Ok(Bch::new(p.gamma, p.delta, p.epsilon, p.alpha, p.q)?)
}

fn bch_inputs(p: &BchParamArgs) -> Map<String, Value> {
    obj(json!({
        "gamma": p.gamma, "delta": p.delta, "epsilon": p.epsilon, "alpha": p.alpha, "q": p.q,
    }))
}

fn bch_eval(a: &BchEvalArgs) -> CmdResult {
    let b = bch(&a.params)?;
    let mut table = Vec::with_capacity(a.z.len());
    let mut max_terms_used = 0;
    for &z in &a.z {
        let v = b.eval(z, a.rel_tol, a.max_terms)?;
        max_terms_used = max_terms_used.max(v.terms);
        table.push(obj(
            json!({ "z": z, "value": v.value, "derivative": v.derivative, "terms": v.terms }),
        ));
    }
    let mut inputs = bch_inputs(&a.params);
    inputs.insert("z".into(), json!(a.z));
    Ok(Outcome {
        inputs,
        results: Map::new(),
        metadata: obj(json!({
            "rel_tol": a.rel_tol, "max_terms": a.max_terms, "max_terms_used": max_terms_used,
        })),
        table,
    })
}

fn bch_coefficients(a: &BchCoefficientsArgs) -> CmdResult {
    let c = bch(&a.params)?.coefficients(a.count)?;
    let mut inputs = bch_inputs(&a.params);
    inputs.insert("count".into(), json!(a.count));
    Ok(Outcome {
        inputs,
        table: c
            .iter()
            .enumerate()
            .map(|(k, ck)| obj(json!({ "k": k, "c": ck })))
            .collect(),
        ..Outcome::default()
    })
}

fn q_values(a: &QValuesArgs) -> CmdResult {
    let qs = quasipoly_q_values(a.gamma, a.delta, a.epsilon, a.n)?;
    let alpha = -a.epsilon * a.n as f64;
    Ok(Outcome {
        inputs: obj(json!({ "gamma": a.gamma, "delta": a.delta, "epsilon": a.epsilon, "n": a.n })),
        results: obj(json!({ "alpha": alpha })),
        table: qs
            .iter()
            .enumerate()
            .map(|(i, q)| obj(json!({ "index": i, "q": q, "alpha": alpha })))
            .collect(),
        ..Outcome::default()
    })
}

fn boundary(b: &BcArgs) -> Result<Boundary, Failure> {
    match (b.bc, b.maslov) {
        (BcChoice::Quasipoly, None) => Ok(Boundary::quasipoly()),
        (BcChoice::Dirichlet, None) => Ok(Boundary::dirichlet()),
        (BcChoice::Custom, Some(m)) => Ok(Boundary::custom(m)?),
        (BcChoice::Custom, None) => Err(Failure::input("--bc custom needs --maslov")),
        (_, Some(_)) => Err(Failure::input("--maslov is only accepted with --bc custom")),
    }
}

fn bc_inputs(b: &BcArgs, bc: &Boundary) -> Map<String, Value> {
    obj(json!({ "bc": bc.kind.to_string(), "maslov_index": b.maslov.unwrap_or(bc.maslov_index) }))
}

fn entry_row(e: &heunrwe::Entry) -> Map<String, Value> {
    obj(serde_json::to_value(e).expect("entry serializes"))
}

fn spectrum(cmd: &SpectrumCommand, units: &Units) -> CmdResult {
    match cmd {
        SpectrumCommand::Isr { v0, n, bc: b, check } => {
            let bc = boundary(b)?;
            if *check && bc.kind != heunrwe::BcKind::Quasipoly {
                return Err(Failure::input(
                    "--check compares against polynomial termination and needs --bc quasipoly",
                ));
            }
            let mut table = Vec::new();
            let mut worst: f64 = 0.0;
            for level in n.iter() {
                let e = isr_entry(level, *v0, units, &bc)?;
                let mut row = entry_row(&e);
                if *check {
                    let oracle = quasipoly_oracle_energy(level, *v0, units)?;
                    let dev = (e.energy - oracle).abs() / oracle.abs();
                    worst = worst.max(dev);
                    row.insert("termination_energy".into(), json!(oracle));
                    row.insert("termination_deviation".into(), json!(dev));
                }
                table.push(row);
            }
            let d = Potential::inverse_sqrt(*v0).isr_length(units)?;
            let ratio = units.lambda_bar() / d;
            let mut results = obj(json!({ "d": d, "lambda_over_d": ratio, "n0": ground_state_index(ratio, &bc)? }));
            if *check {
                results.insert("max_termination_deviation".into(), json!(worst));
            }
            let mut inputs = bc_inputs(b, &bc);
            inputs.extend(obj(json!({ "v0": v0, "n": n.to_string() })));
            Ok(Outcome {
                inputs,
                results,
                table,
                ..Outcome::default()
            })
        }
        SpectrumCommand::Rwe { d, n, bc: b } => {
            let bc = boundary(b)?;
            let table = n
                .iter()
                .map(|level| Ok(entry_row(&rwe_isr_spectrum(level, *d, units, &bc)?)))
                .collect::<Result<Vec<_>, Failure>>()?;
            let ratio = units.lambda_bar() / d;
            let v0 = isr_spec_from_length(units, *d)?.v[1];
            let mut inputs = bc_inputs(b, &bc);
            inputs.extend(obj(json!({ "d": d, "n": n.to_string() })));
            Ok(Outcome {
                inputs,
                results: obj(json!({ "v0": v0, "lambda_over_d": ratio, "n0": ground_state_index(ratio, &bc)? })),
                table,
                ..Outcome::default()
            })
        }
        SpectrumCommand::N0 { ratio, bc: b } => {
            let bc = boundary(b)?;
            let mut inputs = bc_inputs(b, &bc);
            inputs.insert("lambda_over_d".into(), json!(ratio));
            Ok(Outcome {
                inputs,
                results: obj(json!({ "n0": ground_state_index(*ratio, &bc)? })),
                ..Outcome::default()
            })
        }
        SpectrumCommand::ToRwe { energy, branch } => {
            let w = schrodinger_to_rwe(*energy, units, (*branch).into())?;
            Ok(Outcome {
                inputs: obj(json!({ "energy": energy, "branch": branch_name(*branch) })),
                results: obj(json!({ "w": w })),
                ..Outcome::default()
            })
        }
        SpectrumCommand::ToSchrodinger { w } => Ok(Outcome {
            inputs: obj(json!({ "w": w })),
            results: obj(json!({ "energy": rwe_to_schrodinger(*w, units) })),
            ..Outcome::default()
        }),
    }
}

fn branch_name(b: BranchChoice) -> &'static str {
    match b {
        BranchChoice::Plus => "plus",
        BranchChoice::Minus => "minus",
    }
}

/// Solver box for `mω²x²/2` on a symmetric interval reaching past the
/// turning point of level `n_max` by ten oscillator lengths.
fn harmonic_config(omega: f64, n_max: usize, units: &Units) -> Result<Solver, Failure> {
    if omega.is_nan() || omega <= 0.0 || omega.is_infinite() {
        return Err(Failure::input(format!("--omega must be positive, got {omega}")));
    }
    let quantum = units.hbar() * omega;
    let length = (units.hbar() / (units.mass() * omega)).sqrt();
    let turning = (2.0 * n_max as f64 - 1.0).sqrt() * length;
    let half = turning + 10.0 * length;
    let points = ((2.0 * half / (2e-3 * length)).ceil() as usize + 1).max(20_001);
    Ok(SolverConfig::on_interval(
        -half,
        half,
        points,
        (0.0, (n_max as f64 + 0.5) * quantum),
        1e-11 * quantum,
    )?)
}

fn oracle(a: &OracleArgs, units: &Units) -> CmdResult {
    if a.n_max == 0 {
        return Err(Failure::input("--n-max must be at least 1"));
    }
    let defaults = match a.potential {
        OraclePotential::Isr => Solver::for_isr(a.v0, a.n_max, units)?,
        OraclePotential::Harmonic => harmonic_config(a.omega, a.n_max, units)?,
    };
    let reference = |n: usize| -> Result<f64, Failure> {
        match a.potential {
            OraclePotential::Isr => Ok(isr_energy_dirichlet(n, a.v0, units)?),
            OraclePotential::Harmonic => Ok((n as f64 - 0.5) * units.hbar() * a.omega),
        }
    };
    let cfg = SolverConfig::on_interval(
        defaults.x_min,
        a.x_max.unwrap_or(defaults.x_max),
        a.grid_points.unwrap_or(defaults.grid_points),
        (
            a.e_lo.unwrap_or(defaults.energy_bracket.0),
            a.e_hi.unwrap_or(defaults.energy_bracket.1),
        ),
        a.tol.unwrap_or(defaults.bisection_tol),
    )?;
    let (v0, k) = (a.v0, units.mass() * a.omega * a.omega);
    let states = match a.potential {
        OraclePotential::Isr => solve_bound_states(&|x: f64| v0 / x.sqrt(), a.n_max, &cfg, units)?,
        OraclePotential::Harmonic => solve_bound_states(&|x: f64| 0.5 * k * x * x, a.n_max, &cfg, units)?,
    };
    let grid = cfg.grid();
    let stride = grid.len().div_ceil(MAX_SAMPLES);
    let mut table = Vec::with_capacity(states.len());
    let mut wavefunctions = Vec::new();
    let mut worst: f64 = 0.0;
    for s in &states {
        let r = reference(s.n)?;
        let dev = (s.energy - r).abs() / r.abs();
        worst = worst.max(dev);
        table.push(obj(json!({
            "n": s.n, "energy": s.energy, "nodes": s.nodes, "tail_ratio": s.tail_ratio,
            "reference": r, "deviation": dev,
        })));
        if a.wavefunctions {
            let (x, psi): (Vec<f64>, Vec<f64>) = grid
                .iter()
                .zip(&s.samples)
                .step_by(stride)
                .map(|(x, p)| (*x, *p))
                .unzip();
            wavefunctions.push(json!({ "n": s.n, "x": x, "psi": psi }));
        }
    }
    let (potential, reference_name) = match a.potential {
        OraclePotential::Isr => ("isr", "closed-form Dirichlet level"),
        OraclePotential::Harmonic => ("harmonic", "(n - 1/2) hbar omega"),
    };
    let mut inputs = obj(json!({ "potential": potential, "n_max": a.n_max }));
    match a.potential {
        OraclePotential::Isr => inputs.insert("v0".into(), json!(a.v0)),
        OraclePotential::Harmonic => inputs.insert("omega".into(), json!(a.omega)),
    };
    let mut results = obj(json!({ "reference": reference_name, "max_deviation": worst }));
    if a.wavefunctions {
        results.insert("wavefunctions".into(), Value::Array(wavefunctions));
    }
    Ok(Outcome {
        inputs,
        results,
        metadata: obj(json!({ "solver": serde_json::to_value(cfg).expect("config serializes") })),
        table,
    })
}

fn spec(s: &SpecArgs) -> Result<Potential, Failure> {
    Ok(Potential::new(s.family, [s.v0, s.v1, s.v2, s.v3, s.v4], s.x0)?)
}

fn spec_inputs(s: &SpecArgs) -> Map<String, Value> {
    obj(json!({
        "family": s.family.to_string(), "v0": s.v0, "v1": s.v1, "v2": s.v2, "v3": s.v3, "v4": s.v4, "x0": s.x0,
    }))
}

fn reduce(a: &ReduceArgs, units: &Units) -> CmdResult {
    let p = spec(&a.spec)?;
    let policy = BranchPolicy {
        origin: a.origin.into(),
        infinity: a.infinity.into(),
    };
    if a.grid_points < 1 {
        return Err(Failure::input("--grid-points must be at least 1"));
    }
    let grid = match (a.x_lo, a.x_hi) {
        (None, None) => default_grid(&p, a.grid_points),
        (Some(lo), Some(hi)) if lo > 0.0 && hi > lo => {
            log_grid(lo, hi, a.grid_points).into_iter().map(|u| u + p.x0).collect()
        }
        (Some(_), Some(_)) => return Err(Failure::input("residual grid needs 0 < --x-lo < --x-hi")),
        _ => return Err(Failure::input("--x-lo and --x-hi go together")),
    };
    let (b, ansatz) = reduce_to_bch(&p, a.energy, units, policy)?;
    let psi = assemble_wavefunction(b, ansatz, &p, a.energy, units)?;
    let residual = ode_residual(&psi, &p, a.energy, units, &grid)?;
    let table =
        a.x.iter()
            .map(|&x| {
                let (value, derivative) = psi.eval(x)?;
                Ok(obj(json!({ "x": x, "psi": value, "dpsi": derivative })))
            })
            .collect::<Result<Vec<_>, Failure>>()?;
    let mut inputs = spec_inputs(&a.spec);
    inputs.extend(obj(json!({
        "energy": a.energy, "origin": policy.origin, "infinity": policy.infinity, "x": a.x,
    })));
    Ok(Outcome {
        inputs,
        results: obj(json!({
            "bch": b,
            "ansatz": ansatz,
            "laurent": laurent_coefficients(&p, a.energy, units),
            "residual": residual,
        })),
        metadata: obj(json!({
            "residual_grid": { "lo": grid[0], "hi": grid[grid.len() - 1], "points": grid.len() },
            "rel_tol": psi.rel_tol,
            "max_terms": psi.max_terms,
        })),
        table,
    })
}

fn potential(cmd: &PotentialCommand, units: &Units) -> CmdResult {
    match cmd {
        PotentialCommand::Eval { spec: s, x } => {
            let p = spec(s)?;
            let table = x
                .iter()
                .map(|&x| Ok(obj(json!({ "x": x, "v": p.eval(x)? }))))
                .collect::<Result<Vec<_>, Failure>>()?;
            Ok(Outcome {
                inputs: spec_inputs(s),
                table,
                ..Outcome::default()
            })
        }
        PotentialCommand::Transform { family, x } => {
            let table = x
                .iter()
                .map(|&x| {
                    let z: f64 = family.transform(x)?;
                    Ok(obj(json!({ "x": x, "z": z, "dz_dx": family.transform_derivative(z) })))
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            Ok(Outcome {
                inputs: obj(json!({ "family": family.to_string() })),
                table,
                ..Outcome::default()
            })
        }
        PotentialCommand::Scalar { v, a2, branch } => Ok(Outcome {
            inputs: obj(json!({ "v": v, "a2": a2, "branch": branch_name(*branch) })),
            results: obj(json!({ "phi": scalar_potential(*v, *a2, (*branch).into(), units)? })),
            ..Outcome::default()
        }),
        PotentialCommand::FromScalar { phi, a2 } => Ok(Outcome {
            inputs: obj(json!({ "phi": phi, "a2": a2 })),
            results: obj(json!({ "v": ScalarVectorPair::new(*phi, *a2)?.schrodinger_potential(units) })),
            ..Outcome::default()
        }),
        PotentialCommand::Vector { v } => Ok(Outcome {
            inputs: obj(json!({ "v": v })),
            results: obj(json!({ "a2": vector_potential_sq(*v, units)? })),
            ..Outcome::default()
        }),
        PotentialCommand::IsrScalar { d, x, branch } => {
            let table = x
                .iter()
                .map(|&x| {
                    Ok(obj(
                        json!({ "x": x, "phi": isr_scalar_potentials(x, *d, (*branch).into(), units)? }),
                    ))
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            Ok(Outcome {
                inputs: obj(json!({ "d": d, "branch": branch_name(*branch) })),
                table,
                ..Outcome::default()
            })
        }
        PotentialCommand::IsrSpec { d } => Ok(Outcome {
            inputs: obj(json!({ "d": d })),
            results: obj(json!({ "v0": isr_spec_from_length(units, *d)?.v[1] })),
            ..Outcome::default()
        }),
        PotentialCommand::IsrLength { v0 } => Ok(Outcome {
            inputs: obj(json!({ "v0": v0 })),
            results: obj(json!({ "d": Potential::inverse_sqrt(*v0).isr_length(units)? })),
            ..Outcome::default()
        }),
    }
}

fn schema() -> CmdResult {
    Ok(Outcome {
        results: obj(json!({ "schema": serde_json::from_str::<Value>(SCHEMA).expect("bundled schema parses") })),
        ..Outcome::default()
    })
}

fn validate_file(path: &std::path::Path) -> CmdResult {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let doc: Value =
        serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: not JSON: {e}", path.display())))?;
    let problems = validate(&doc);
    if let Some(first) = problems.first() {
        return Err(Failure::input(format!(
            "{}: {} schema violation(s), first: {first}",
            path.display(),
            problems.len()
        )));
    }
    Ok(Outcome {
        inputs: obj(json!({ "file": path.display().to_string() })),
        results: obj(json!({ "valid": true })),
        ..Outcome::default()
    })
}
