//! Dispatch of one experiment to the library and writing of its artifacts.

use crate::config::{parse_config, Command, ConfigError, ExperimentSpec};
use fpet_core::averages::{
    convergence_diagnostic, furstenberg_moment, partially_characteristic_check, symbolic_limit,
    vdc_bound_check, weyl_limit, AverageConfig, ConvergenceReport, DiagnosticConfig, MomentQuery,
    Shift, Verdict,
};
use fpet_core::fpoly::FPolyFamily;
use fpet_core::interval::{tempered_family, time_change_weights, time_changed_average, PhaseCurve};
use fpet_core::order::induction_dag;
use fpet_core::rational::{format_q, parse_q, to_f64, Q};
use fpet_core::torus::{Phasor, TorusSystem, TrigPoly};
use fpet_core::{Error, Exec};
use log::{debug, info};
use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    /// 3 for exhausted numeric budgets, 2 for every input problem.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(Error::Quadrature(_) | Error::NodeBudget { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Artifacts were written but a numeric budget ran out.
    Budget,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Budget => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub status: Status,
    pub artifacts: Vec<PathBuf>,
    pub summary: String,
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub exec: Exec,
    pub out_dir: PathBuf,
    /// Overrides the interval family of the config.
    pub intervals: Option<String>,
}

/// Where an experiment reads its inputs and names its outputs.
#[derive(Clone, Debug)]
pub struct Context {
    pub base_dir: PathBuf,
    pub stem: String,
    pub opts: RunOptions,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, bytes).map_err(io)
}

/// Parses the config at `path` and runs it.
pub fn run_file(path: &Path, opts: RunOptions) -> Result<Outcome, CliError> {
    let text = read(path)?;
    let spec = parse_config(&text, &path.display().to_string())?;
    let stem = spec
        .name
        .clone()
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "experiment".into());
    let ctx = Context {
        base_dir: path.parent().map(Path::to_path_buf).unwrap_or_default(),
        stem,
        opts,
    };
    run(&spec, &ctx)
}

struct Inputs {
    sys: Option<TorusSystem>,
    fam: Option<FPolyFamily>,
    fs: Vec<TrigPoly>,
}

fn load(spec: &ExperimentSpec, ctx: &Context) -> Result<Inputs, CliError> {
    let resolve = |p: &Path| ctx.base_dir.join(p);
    let sys = match &spec.system {
        Some(p) => {
            let p = resolve(p);
            Some(TorusSystem::from_toml(
                &read(&p)?,
                &p.display().to_string(),
            )?)
        }
        None => None,
    };
    let fam = match &spec.family {
        Some(p) => {
            let p = resolve(p);
            Some(FPolyFamily::from_toml(
                &read(&p)?,
                &p.display().to_string(),
            )?)
        }
        None => None,
    };
    let fs = spec
        .observables
        .iter()
        .map(|p| {
            let p = resolve(p);
            Ok(TrigPoly::from_toml(&read(&p)?, &p.display().to_string())?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Inputs { sys, fam, fs })
}

fn rationals(xs: &[String], key: &str) -> Result<Vec<Q>, CliError> {
    xs.iter()
        .map(|s| parse_q(s).map_err(|e| Error::Domain(format!("`{key}` entry {s:?}: {e}")).into()))
        .collect()
}

fn jsonl(lines: &[Value]) -> Vec<u8> {
    let mut out = String::new();
    for l in lines {
        out.push_str(&l.to_string());
        out.push('\n');
    }
    out.into_bytes()
}

/// Runs one experiment and writes its artifacts under `ctx.opts.out_dir`.
pub fn run(spec: &ExperimentSpec, ctx: &Context) -> Result<Outcome, CliError> {
    let intervals = ctx
        .opts
        .intervals
        .clone()
        .unwrap_or_else(|| spec.intervals.clone());
    let inputs = load(spec, ctx)?;
    info!(
        "{} `{}` ({:?})",
        spec.command.name(),
        ctx.stem,
        ctx.opts.exec
    );
    let avg = AverageConfig {
        tol: spec.tol,
        budget: spec.budget,
    };
    let need = |what: &str| Error::Domain(format!("{} needs `{what}`", spec.command.name()));
    let out = |ext: &str| ctx.opts.out_dir.join(format!("{}.{ext}", ctx.stem));
    match spec.command {
        Command::RunConvergence => {
            let (sys, fam) = (
                inputs.sys.ok_or_else(|| need("system"))?,
                inputs.fam.ok_or_else(|| need("family"))?,
            );
            let seq = tempered_family(&intervals)?;
            let cfg = DiagnosticConfig {
                average: avg,
                threshold: spec.threshold,
            };
            let report = convergence_diagnostic(
                &sys,
                &fam,
                &inputs.fs,
                &seq,
                spec.n_max,
                cfg,
                ctx.opts.exec,
            )?;
            let path = out("csv");
            write(&path, &convergence_csv(&report))?;
            let status = if report.truncation.is_some() {
                Status::Budget
            } else if report.passed {
                Status::Pass
            } else {
                Status::Fail
            };
            let summary = format!(
                "{} rows along {intervals}; final distance {}; Cauchy differences monotone after n = 3: {}",
                report.rows.len(),
                report.final_distance().map_or("n/a".into(), |d| format!("{d:e}")),
                report.cauchy_monotone_after(3),
            );
            Ok(Outcome {
                status,
                artifacts: vec![path],
                summary,
            })
        }
        Command::CheckInvariance => {
            let (sys, fam) = (
                inputs.sys.ok_or_else(|| need("system"))?,
                inputs.fam.ok_or_else(|| need("family"))?,
            );
            let f0 = match &spec.f0 {
                Some(p) => {
                    let p = ctx.base_dir.join(p);
                    TrigPoly::from_toml(&read(&p)?, &p.display().to_string())?
                }
                None => conjugate(&symbolic_limit(&sys, &fam, &inputs.fs)?)?,
            };
            let lines = invariance_lines(
                &sys,
                &fam,
                &inputs.fs,
                &f0,
                &rationals(&spec.shifts, "shifts")?,
            )?;
            let passed = lines.iter().all(|l| l["equal"] == Value::Bool(true));
            let path = out("jsonl");
            write(&path, &jsonl(&lines))?;
            Ok(Outcome {
                status: if passed { Status::Pass } else { Status::Fail },
                artifacts: vec![path],
                summary: format!("{} exact moment checks, all equal: {passed}", lines.len()),
            })
        }
        Command::CheckCharacteristic => {
            let (sys, fam) = (
                inputs.sys.ok_or_else(|| need("system"))?,
                inputs.fam.ok_or_else(|| need("family"))?,
            );
            let report = partially_characteristic_check(&sys, &fam, &inputs.fs)?;
            let verdict = match report.verdict {
                Verdict::Agree => "AGREE",
                Verdict::Disagree => "DISAGREE",
            };
            let xi: Vec<Vec<String>> = report
                .xi
                .basis()
                .iter()
                .map(|r| r.iter().map(ToString::to_string).collect())
                .collect();
            let line = json!({
                "check": "partially-characteristic",
                "verdict": verdict,
                "distance": report.distance,
                "xi": xi,
                "xi_saturated": report.xi.is_saturated(),
                "witnesses": report.witnesses,
            });
            let path = out("jsonl");
            write(&path, &jsonl(&[line]))?;
            Ok(Outcome {
                status: if report.verdict == Verdict::Agree {
                    Status::Pass
                } else {
                    Status::Fail
                },
                artifacts: vec![path],
                summary: format!(
                    "{verdict} (distance {:e}, {} witnesses)",
                    report.distance,
                    report.witnesses.len()
                ),
            })
        }
        Command::CheckVdc => {
            let (sys, fam) = (
                inputs.sys.ok_or_else(|| need("system"))?,
                inputs.fam.ok_or_else(|| need("family"))?,
            );
            let r = vdc_bound_check(
                &sys,
                &fam,
                &inputs.fs,
                spec.t_max,
                spec.h_max,
                avg,
                ctx.opts.exec,
            )?;
            let line = json!({
                "check": "van-der-corput",
                "t_max": spec.t_max,
                "h_max": spec.h_max,
                "lhs": r.lhs,
                "rhs": r.rhs,
                "slack": r.slack,
                "margin": r.margin,
                "passed": r.passed,
            });
            let path = out("jsonl");
            write(&path, &jsonl(&[line]))?;
            Ok(Outcome {
                status: if r.passed { Status::Pass } else { Status::Fail },
                artifacts: vec![path],
                summary: format!(
                    "lhs {:e} <= rhs {:e} + slack {:e}: {}",
                    r.lhs, r.rhs, r.slack, r.passed
                ),
            })
        }
        Command::EnumeratePrecedents => {
            let fam = inputs.fam.ok_or_else(|| need("family"))?;
            let path = out("dag.txt");
            match induction_dag(&fam, spec.max_nodes, ctx.opts.exec) {
                Ok(dag) => {
                    write(&path, dag.to_text().as_bytes())?;
                    Ok(Outcome {
                        status: Status::Pass,
                        artifacts: vec![path],
                        summary: format!(
                            "{} nodes, {} edges, depth {}",
                            dag.nodes.len(),
                            dag.edges.len(),
                            dag.depth()
                        ),
                    })
                }
                Err(Error::NodeBudget { limit, partial }) => {
                    let text = format!(
                        "# truncated: node budget {limit} exhausted\n{}",
                        partial.to_text()
                    );
                    write(&path, text.as_bytes())?;
                    Ok(Outcome {
                        status: Status::Budget,
                        artifacts: vec![path],
                        summary: format!("node budget {limit} exhausted; partial DAG written"),
                    })
                }
                Err(e) => Err(e.into()),
            }
        }
        Command::VerifyTimechange => {
            let coeffs = rationals(&spec.phase, "phase")?;
            let oracle = weyl_limit(&coeffs);
            let curve = PhaseCurve::fractional(
                &coeffs.iter().map(to_f64).collect::<Vec<_>>(),
                coeffs.len() as u32,
            );
            let seq = tempered_family(&intervals)?;
            let mut lines = Vec::new();
            let mut passed = true;
            for (i, &alpha) in spec.alphas.iter().enumerate() {
                let n = spec.indices.get(i).copied().unwrap_or(spec.n_max);
                let interval = seq.interval(n)?;
                let mass = time_change_weights(alpha, interval)
                    .ok()
                    .map(|w| w.total_mass());
                let r = time_changed_average(
                    &curve,
                    alpha,
                    interval,
                    spec.tol,
                    spec.budget,
                    ctx.opts.exec,
                )?;
                let value = r.direct[0];
                let error = (value - num_complex::Complex64::new(to_f64(&oracle), 0.0)).norm();
                let mass_ok = mass.is_none_or(|m| (m - 1.0).abs() <= 1e-8);
                let ok = mass_ok && r.consistent && error < spec.threshold;
                debug!("α = {alpha}: value {value}, error {error:e}, mass {mass:?}");
                passed &= ok;
                lines.push(json!({
                    "check": "time-change",
                    "alpha": alpha,
                    "n": n,
                    "interval": [interval.0, interval.1],
                    "mass": mass,
                    "re": value.re,
                    "im": value.im,
                    "oracle": format_q(&oracle),
                    "error": error,
                    "route_discrepancy": r.discrepancy,
                    "passed": ok,
                }));
            }
            let path = out("jsonl");
            write(&path, &jsonl(&lines))?;
            Ok(Outcome {
                status: if passed { Status::Pass } else { Status::Fail },
                artifacts: vec![path],
                summary: format!(
                    "{} exponents along {intervals}, all within threshold: {passed}",
                    lines.len()
                ),
            })
        }
    }
}

/// `x ↦ conj(L(x))`: coefficient `conj(c_χ)` at `−χ`.
fn conjugate(l: &TrigPoly) -> Result<TrigPoly, Error> {
    TrigPoly::from_terms(
        l.m(),
        l.terms()
            .iter()
            .map(|(chi, c)| (chi.iter().map(|x| -x).collect(), c.conj())),
    )
}

fn invariance_lines(
    sys: &TorusSystem,
    fam: &FPolyFamily,
    fs: &[TrigPoly],
    f0: &TrigPoly,
    shifts: &[Q],
) -> Result<Vec<Value>, Error> {
    let base = MomentQuery {
        f0: f0.clone(),
        fs: fs.to_vec(),
        fam: fam.clone(),
        shift: None,
    };
    let plain = furstenberg_moment(sys, &base)?;
    let mut lines = Vec::new();
    for j in 1..=fam.height() {
        for t in shifts {
            let q = MomentQuery {
                shift: Some(Shift { j, t: t.clone() }),
                ..base.clone()
            };
            let shifted = furstenberg_moment(sys, &q)?;
            lines.push(json!({
                "check": "off-diagonal",
                "j": j,
                "t": format_q(t),
                "unshifted": plain.to_string(),
                "shifted": shifted.to_string(),
                "equal": shifted == plain,
            }));
        }
    }
    let one = TrigPoly::constant(sys.m(), Phasor::one());
    for slot in 0..=fs.len() {
        let observable = if slot == 0 { f0 } else { &fs[slot - 1] };
        let mut others = vec![one.clone(); fs.len()];
        let f0 = if slot == 0 {
            observable.clone()
        } else {
            others[slot - 1] = observable.clone();
            one.clone()
        };
        let moment = furstenberg_moment(
            sys,
            &MomentQuery {
                f0,
                fs: others,
                fam: fam.clone(),
                shift: None,
            },
        )?;
        let haar = observable.coeff(&vec![0; sys.m()]);
        lines.push(json!({
            "check": "marginal",
            "slot": slot,
            "moment": moment.to_string(),
            "haar": haar.to_string(),
            "equal": moment == haar,
        }));
    }
    Ok(lines)
}

/// Header, one row per computed `n`, and a notice row when truncated.
pub fn convergence_csv(report: &ConvergenceReport) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n",
        "a_n",
        "b_n",
        "l2_distance_to_oracle",
        "cauchy_diff",
        "max_coeff_err",
    ])
    .expect("in-memory write");
    for r in &report.rows {
        w.write_record([
            r.n.to_string(),
            r.a.to_string(),
            r.b.to_string(),
            format!("{:e}", r.distance),
            r.cauchy_diff.map_or(String::new(), |c| format!("{c:e}")),
            format!("{:e}", r.max_coeff_err),
        ])
        .expect("in-memory write");
    }
    if let Some(msg) = &report.truncation {
        w.write_record(["truncated", "", "", "", "", msg.as_str()])
            .expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}
