use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sesim_bench::{run_bench, write_raw_csv, BenchConfig, CrossoverReport};
use sesim_core::algorithms::{grover_success_probability, SolveOutcome};
use sesim_core::compiler::EvolutionPhase;
use sesim_core::evolution::{leakage_scan, LeakageProtocol, LeakageRow, LeakageSetup};
use sesim_core::types::units;
use sesim_core::{
    compile, decompile_evolution, fidelity, grover_search, measure, prep_uniform, schrodinger_solve,
    ses_basis_state, uniform_state, CompileOptions, CompiledProgram, GroverMode, GroverRun,
    HardwareBounds, MeasurementRecord, Method, Propagator, SesError, SesState,
};

use crate::args::{
    BenchArgs, CompileArgs, EvolveArgs, GroverArgs, HardwareArgs, LeakageArgs, MethodArg, PrepArgs,
    SolveArgs,
};
use crate::error::CliError;
use crate::manifest::RunContext;
use crate::matrix_file::MatrixFile;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompileOutput {
    pub program: CompiledProgram,
    pub phase: EvolutionPhase,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub reference: Method,
    pub fidelity: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveOutput {
    pub n: usize,
    /// us.
    pub t: f64,
    pub method: Method,
    pub initial: SesState,
    pub state: SesState,
    pub norm_drift: f64,
    pub steps: usize,
    pub wall_time_s: f64,
    /// Fidelity to the other propagation method, with `--compare`.
    pub comparison: Option<Comparison>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrepOutput {
    pub n: usize,
    /// rad/us.
    pub g: f64,
    /// us.
    pub t_qu: f64,
    pub state: SesState,
    pub fidelity_to_uniform: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeCheck {
    pub other: GroverMode,
    pub max_amplitude_diff: f64,
    pub max_probability_diff: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroverOutput {
    pub run: GroverRun,
    pub probabilities: Vec<f64>,
    pub marked_probability: f64,
    /// `sin^2((2K + 1) asin(1/sqrt(n)))`.
    pub predicted_probability: f64,
    pub measurement: MeasurementRecord,
    pub mode_check: ModeCheck,
}

fn bounds(h: &HardwareArgs) -> Result<HardwareBounds, CliError> {
    HardwareBounds::from_mhz(h.g_max, h.eps_range).map_err(|e| CliError::BadArgument(e.to_string()))
}

fn read_matrix(path: &Path, ctx: &mut RunContext) -> Result<MatrixFile, CliError> {
    let (file, bytes) = MatrixFile::read(path)?;
    ctx.record_input(path, &bytes);
    Ok(file)
}

/// `basis:<i>`, `uniform`, or a JSON state file.
pub fn load_state(spec: &str, n: usize, ctx: &mut RunContext) -> Result<SesState, CliError> {
    if spec == "uniform" {
        return Ok(uniform_state(n)?);
    }
    if let Some(i) = spec.strip_prefix("basis:") {
        let i: usize = i
            .parse()
            .map_err(|_| CliError::BadArgument(format!("bad basis index `{i}`")))?;
        return ses_basis_state(n, i).map_err(|e| CliError::BadArgument(e.to_string()));
    }
    let path = Path::new(spec);
    let bytes = ctx.read_input(path)?;
    let state: SesState = serde_json::from_slice(&bytes).map_err(|e| CliError::Parse {
        path: spec.to_string(),
        line: e.line(),
        message: e.to_string(),
    })?;
    if state.dim() != n {
        return Err(SesError::DimensionMismatch {
            expected: n,
            found: state.dim(),
        }
        .into());
    }
    Ok(state)
}

pub fn compile_cmd(a: &CompileArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let target = read_matrix(&a.matrix, ctx)?.target()?;
    let options = CompileOptions {
        auto_relax: a.hardware.auto_relax,
    };
    let program = compile(&target, &bounds(&a.hardware)?, a.t_sim, a.hardware.t_meas, options)?;
    let phase = decompile_evolution(&program);
    eprintln!(
        "compiled n = {}: lambda {:.6}, shift {:.6} rad/us, t_qc {:.6e} us{}",
        program.dim(),
        program.lambda,
        program.shift,
        program.t_qc,
        if program.relaxed { " (relaxed)" } else { "" }
    );
    ctx.write_json("compile.json", &CompileOutput { program, phase })?;
    Ok(())
}

fn method_of(a: MethodArg, theta_max: f64) -> Method {
    match a {
        MethodArg::Eigen => Method::EigenExact,
        MethodArg::Ode => Method::OdeRk4 { theta_max },
    }
}

pub fn evolve_cmd(a: &EvolveArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let h = read_matrix(&a.matrix, ctx)?.target()?.hamiltonian().clone();
    let psi = load_state(&a.state, h.dim(), ctx)?;
    let method = method_of(a.method, a.theta_max);

    let start = Instant::now();
    let prop = Propagator::new(h.clone(), method)?;
    let out = prop.evolve(&psi, a.t)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    eprintln!(
        "evolved n = {} for t = {} us: {} steps, norm drift {:.3e}, {:.3e} s",
        h.dim(),
        a.t,
        out.steps,
        out.norm_drift,
        wall_time_s
    );

    let comparison = if a.compare {
        let other = match a.method {
            MethodArg::Eigen => method_of(MethodArg::Ode, a.theta_max),
            MethodArg::Ode => Method::EigenExact,
        };
        let reference = Propagator::new(h.clone(), other)?.evolve(&psi, a.t)?;
        Some(Comparison {
            reference: other,
            fidelity: fidelity(&out.state, &reference.state)?,
        })
    } else {
        None
    };

    ctx.write_json(
        "evolve.json",
        &EvolveOutput {
            n: h.dim(),
            t: a.t,
            method,
            initial: psi,
            state: out.state,
            norm_drift: out.norm_drift,
            steps: out.steps,
            wall_time_s,
            comparison,
        },
    )?;
    Ok(())
}

pub fn prep_cmd(a: &PrepArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let g = units::mhz(a.g);
    let prep = prep_uniform(a.n, g)?;
    let f = fidelity(&prep.state, &uniform_state(a.n)?)?;
    eprintln!("prepared uniform n = {} in {:.6e} us, fidelity {f}", a.n, prep.t_qu);
    ctx.write_json(
        "prep-unif.json",
        &PrepOutput {
            n: a.n,
            g,
            t_qu: prep.t_qu,
            state: prep.state,
            fidelity_to_uniform: f,
        },
    )?;
    Ok(())
}

pub fn grover_cmd(a: &GroverArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let g = units::mhz(a.g);
    let mode: GroverMode = a.mode.into();
    let other = match mode {
        GroverMode::Device => GroverMode::Math,
        GroverMode::Math => GroverMode::Device,
    };
    let search = |m| grover_search(a.n, a.marked, g, a.iterations, m, None).map_err(CliError::GroverRange);
    let run = search(mode)?;
    let check = search(other)?;

    let probabilities = run.probabilities();
    let mut max_amplitude_diff = 0.0f64;
    let mut max_probability_diff = 0.0f64;
    for (x, y) in run.final_state.amplitudes().iter().zip(check.final_state.amplitudes()) {
        max_amplitude_diff = max_amplitude_diff.max((x - y).norm());
        max_probability_diff = max_probability_diff.max((x.norm_sqr() - y.norm_sqr()).abs());
    }
    let measurement = measure(&run.final_state, a.seed);
    eprintln!(
        "grover n = {}, K = {}: P(marked) = {:.12}, sampled |{})",
        a.n,
        run.iterations,
        run.marked_probability(),
        measurement.outcome
    );
    let out = GroverOutput {
        marked_probability: run.marked_probability(),
        predicted_probability: grover_success_probability(a.n, run.iterations),
        probabilities,
        measurement,
        mode_check: ModeCheck {
            other,
            max_amplitude_diff,
            max_probability_diff,
        },
        run,
    };
    ctx.write_json("grover.json", &out)?;
    Ok(())
}

pub fn solve_cmd(a: &SolveArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let target = read_matrix(&a.matrix, ctx)?.target()?;
    let psi = load_state(&a.state, target.dim(), ctx)?;
    let options = CompileOptions {
        auto_relax: a.hardware.auto_relax,
    };
    let out: SolveOutcome = schrodinger_solve(
        &target,
        &psi,
        a.t_sim,
        &bounds(&a.hardware)?,
        a.hardware.t_meas,
        options,
        a.seed,
    )?;
    eprintln!(
        "solved n = {}: lambda {:.6}, t_qu {:.6e} us, sampled |{})",
        target.dim(),
        out.program.lambda,
        out.program.t_qu,
        out.measurement.outcome
    );
    ctx.write_json("solve.json", &out)?;
    Ok(())
}

/// CSV text of a leakage table, header comments included.
pub fn leakage_csv(setup: &LeakageSetup, protocol: LeakageProtocol, rows: &[LeakageRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# sesim leakage: protocol={} n={} epsilon={:?} rad/us seed={}",
        serde_json::to_value(protocol).map_or(String::new(), |v| v.as_str().unwrap_or("").to_string()),
        setup.n,
        setup.epsilon,
        setup.seed
    );
    s.push_str("# ratio: coupling strength over qubit frequency, g/epsilon\n");
    s.push_str("# leakage: probability outside the single-excitation subspace after full-space evolution\n");
    s.push_str("# ses_fidelity: fidelity of the renormalized SES projection to the ideal SES evolution\n");
    s.push_str("ratio,leakage,ses_fidelity\n");
    for r in rows {
        let _ = writeln!(s, "{:?},{:?},{:?}", r.ratio, r.leakage, r.ses_fidelity);
    }
    s
}

pub fn leakage_cmd(a: &LeakageArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let setup = LeakageSetup {
        epsilon: units::mhz(a.epsilon),
        seed: a.seed,
        ..LeakageSetup::new(a.n)
    };
    let protocol: LeakageProtocol = a.protocol.into();
    // size check up front, before any row is computed
    leakage_scan(&setup, protocol, &[])?;
    let mut rows = Vec::with_capacity(a.ratio_list.len());
    for (k, &ratio) in a.ratio_list.iter().enumerate() {
        let row = leakage_scan(&setup, protocol, &[ratio])?.remove(0);
        eprintln!(
            "[{}/{}] ratio {ratio}: leakage {:.6e}",
            k + 1,
            a.ratio_list.len(),
            row.leakage
        );
        rows.push(row);
    }
    ctx.write_output("leakage.csv", leakage_csv(&setup, protocol, &rows).as_bytes())?;
    Ok(())
}

pub fn bench_cmd(a: &BenchArgs, ctx: &mut RunContext) -> Result<(), CliError> {
    let bytes = ctx.read_input(&a.config)?;
    let text = String::from_utf8_lossy(&bytes);
    let cfg = BenchConfig::from_json(&text)?;
    eprintln!(
        "bench: n = {:?}, t_qc = {:?} us, {} repetitions",
        cfg.n_list, cfg.t_qc_list, cfg.repetitions
    );
    let out = run_bench(&cfg)?;
    let report: &CrossoverReport = &out.report;
    for line in report.comparison_lines() {
        eprintln!("{line}");
    }
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    ctx.write_json("bench.json", report)?;
    let mut csv = Vec::new();
    write_raw_csv(&out.raw, &mut csv)?;
    ctx.write_output("bench.csv", &csv)?;
    Ok(())
}
