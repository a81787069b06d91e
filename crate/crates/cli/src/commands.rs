use crate::config::{load, FileConfig};
use clap::{Parser, Subcommand};
use nalgebra::DVector;
use sclifford::basis::SphericalFunction;
use sclifford::beltrami::{
    contraction_precheck, pi_norm_for, solve_fixed_point, BeltramiMode, BeltramiProblem,
    BeltramiResult, BeltramiSolution, BeltramiStart, BeltramiVariant, PhiSpec, QCoeff,
};
use sclifford::clifford::{Multivector, MvJson};
use sclifford::error::CoreError;
use sclifford::identities::{verify_all, verify_identity, IdentityReport, IdentityTag};
use sclifford::mesh::{CapMesh, MeshFunction};
use sclifford::norms::{norms_report, theoretical_bounds};
use sclifford::operators::{OperatorEngine, OperatorTag};
use sclifford::poly::{CliffordPolynomial, PolyJson};
use sclifford::quadrature::{borel_pompeiu_study, pi_s0_quad, ConvergenceRow, PiQuadScheme};
use sclifford::report::{canonical_json, convergence_csv};
use sclifford::scalar::Q;
use sclifford::spectra::spectrum;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "sclifford",
    about = "Spherical Clifford analysis: spectra, identities, norms, quadrature checks, Beltrami runs",
    version
)]
pub struct Cli {
    /// Seed for randomized suites (embedded in reports).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON config file with defaults; flags override.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Eigen/singular spectrum of an operator per degree block.
    Spectrum {
        #[arg(long)]
        n: Option<usize>,
        /// Operator tag: gamma0, gamma0_bar, ds, ds_bar, t, t_bar, delta_s, delta_s_gamma.
        #[arg(long)]
        op: String,
        /// Truncation degree of the basis.
        #[arg(long = "max-degree")]
        max_degree: Option<usize>,
    },
    /// Verify operator identities; exit 2 on any residual above tolerance.
    Verify {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "N")]
        trunc: Option<usize>,
        /// Check all identities.
        #[arg(long, conflicts_with = "identity")]
        all: bool,
        /// Check a single identity by tag.
        #[arg(long)]
        identity: Option<String>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Measured operator norms against the closed-form bounds.
    Norms {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long = "N")]
        trunc: Option<usize>,
    },
    /// Borel-Pompeiu residual ladder on a cap.
    BpCheck {
        /// Cap opening angle in radians.
        #[arg(long = "theta-c")]
        theta_c: Option<f64>,
        /// Comma-separated mesh spacings, e.g. 0.08,0.04,0.02.
        #[arg(long, value_delimiter = ',')]
        h: Option<Vec<f64>>,
        #[arg(long)]
        tolerance: Option<f64>,
        /// Emit CSV instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Quadrature Pi_{s,0} against the spectral assembly on the whole sphere.
    PiQuadCheck {
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Solve a Beltrami problem described by a JSON file.
    Beltrami {
        /// Problem specification JSON.
        #[arg(long)]
        problem: PathBuf,
    },
    /// Evaluate the closed-form L^p bound expressions.
    Bounds {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long = "Bp")]
        b_p: Option<f64>,
    },
}

fn write_output(out: &Option<PathBuf>, bytes: &[u8]) -> Result<(), String> {
    match out {
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| format!("stdout: {e}"))
        }
        Some(p) => std::fs::write(p, bytes).map_err(|e| format!("cannot write {}: {e}", p.display())),
    }
}

pub fn run(cli: Cli) -> Result<i32, String> {
    let cfg = load(cli.config.as_deref())?;
    let seed = cli.seed.or(cfg.seed).unwrap_or(0);
    match cli.cmd {
        Cmd::Spectrum { n, op, max_degree } => spectrum_cmd(&cli.out, &cfg, n, &op, max_degree),
        Cmd::Verify {
            n,
            trunc,
            all,
            identity,
            tolerance,
        } => verify_cmd(&cli.out, &cfg, n, trunc, all, identity, tolerance),
        Cmd::Norms { n, trunc } => norms_cmd(&cli.out, &cfg, n, trunc),
        Cmd::BpCheck {
            theta_c,
            h,
            tolerance,
            csv,
        } => bp_check_cmd(&cli.out, &cfg, theta_c, h, tolerance, csv),
        Cmd::PiQuadCheck { h, tolerance } => pi_quad_cmd(&cli.out, &cfg, h, tolerance),
        Cmd::Beltrami { problem } => beltrami_cmd(&cli.out, &problem, seed),
        Cmd::Bounds { n, p, b_p } => bounds_cmd(&cli.out, &cfg, n, p, b_p),
    }
}

fn engine(n: usize, trunc: usize) -> Result<OperatorEngine, String> {
    OperatorEngine::new(n, trunc).map_err(|e| e.to_string())
}

fn spectrum_cmd(
    out: &Option<PathBuf>,
    cfg: &FileConfig,
    n: Option<usize>,
    op: &str,
    max_degree: Option<usize>,
) -> Result<i32, String> {
    let n = n.or(cfg.n).unwrap_or(2);
    let trunc = max_degree.or(cfg.trunc).unwrap_or(4);
    let tag = OperatorTag::parse(op).ok_or_else(|| format!("unknown operator tag '{op}'"))?;
    let eng = engine(n, trunc)?;
    let report = spectrum(&eng, tag).map_err(|e| e.to_string())?;
    write_output(out, &canonical_json(&report))?;
    Ok(if report.max_residual < 1e-8 { 0 } else { 2 })
}

#[derive(Serialize)]
struct VerifyReport {
    n: usize,
    #[serde(rename = "N")]
    trunc: usize,
    tolerance: f64,
    identities: Vec<IdentityReport>,
    pass: bool,
}

fn verify_cmd(
    out: &Option<PathBuf>,
    cfg: &FileConfig,
    n: Option<usize>,
    trunc: Option<usize>,
    all: bool,
    identity: Option<String>,
    tolerance: Option<f64>,
) -> Result<i32, String> {
    let n = n.or(cfg.n).unwrap_or(2);
    let trunc = trunc.or(cfg.trunc).unwrap_or(5);
    let tolerance = tolerance.or(cfg.tolerance).unwrap_or(1e-10);
    if trunc < 4 {
        return Err("identity verification needs N >= 4".into());
    }
    let eng = engine(n, trunc)?;
    let reports = if all || identity.is_none() {
        verify_all(&eng).map_err(|e| e.to_string())?
    } else {
        let name = identity.unwrap();
        let tag =
            IdentityTag::parse(&name).ok_or_else(|| format!("unknown identity tag '{name}'"))?;
        vec![verify_identity(&eng, tag).map_err(|e| e.to_string())?]
    };
    let pass = reports
        .iter()
        .all(|r| matches!(r.residual, Some(res) if res < tolerance));
    let report = VerifyReport {
        n,
        trunc,
        tolerance,
        identities: reports,
        pass,
    };
    write_output(out, &canonical_json(&report))?;
    Ok(if pass { 0 } else { 2 })
}

fn norms_cmd(
    out: &Option<PathBuf>,
    cfg: &FileConfig,
    n: Option<usize>,
    trunc: Option<usize>,
) -> Result<i32, String> {
    let n = n.or(cfg.n).unwrap_or(2);
    let trunc = trunc.or(cfg.trunc).unwrap_or(6);
    let eng = engine(n, trunc)?;
    let report = norms_report(&eng).map_err(|e| e.to_string())?;
    let bound = report.pi_s0_bound_square.max(report.pi_s0_bound_triangle);
    let pass = (report.t_norm - report.t_expected).abs() < 1e-8
        && report.t_norm <= report.t_lp_bound
        && report.pi_s0_norm <= bound + 1e-9;
    write_output(out, &canonical_json(&report))?;
    Ok(if pass { 0 } else { 2 })
}

#[derive(Serialize)]
struct BpReport {
    theta_c: f64,
    tolerance: f64,
    cases: Vec<BpCase>,
    pass: bool,
}

#[derive(Serialize)]
struct BpCase {
    label: String,
    rows: Vec<ConvergenceRow>,
}

/// The fixed test inputs: a constant, a degree-1 and a degree-2 restriction.
fn bp_inputs() -> Vec<(String, CliffordPolynomial<Q>)> {
    type P = CliffordPolynomial<Q>;
    let n = 2;
    let e1 = Multivector::basis_vector(n, 1);
    let e12 = Multivector::basis_vector(n, 1).product(&Multivector::basis_vector(n, 2));
    let deg1 = &P::variable(n, 0) + &P::variable(n, 1).mul_const_left(&e1);
    let deg2 = &(&P::variable(n, 0) * &P::variable(n, 1))
        + &(&P::variable(n, 2) * &P::variable(n, 2)).mul_const_left(&e12);
    vec![
        ("constant".into(), P::one(n)),
        ("degree1".into(), deg1),
        ("degree2".into(), deg2),
    ]
}

fn bp_check_cmd(
    out: &Option<PathBuf>,
    cfg: &FileConfig,
    theta_c: Option<f64>,
    h: Option<Vec<f64>>,
    tolerance: Option<f64>,
    csv: bool,
) -> Result<i32, String> {
    let theta_c = theta_c
        .or(cfg.theta_c)
        .unwrap_or(std::f64::consts::PI / 3.0);
    let spacings = h.or_else(|| cfg.h.clone()).unwrap_or(vec![0.08, 0.04, 0.02]);
    let tolerance = tolerance.or(cfg.tolerance).unwrap_or(1e-2);
    let axis = [1.0, 0.0, 0.0];
    let mut cases = Vec::new();
    let mut pass = true;
    for (label, f) in bp_inputs() {
        let rows =
            borel_pompeiu_study(&f, axis, theta_c, &spacings).map_err(|e| e.to_string())?;
        if let Some(last) = rows.last() {
            if !(last.residual <= tolerance) {
                pass = false;
            }
        }
        // order observed across the whole ladder
        if rows.len() >= 2 {
            let first = &rows[0];
            let last = rows.last().unwrap();
            let order = (first.residual / last.residual).ln() / (first.h / last.h).ln();
            if !(order >= 1.0) {
                pass = false;
            }
        }
        cases.push(BpCase { label, rows });
    }
    if csv {
        let mut text = String::new();
        for c in &cases {
            text.push_str(&format!("# {}\n", c.label));
            text.push_str(&convergence_csv(&c.rows));
        }
        write_output(out, text.as_bytes())?;
    } else {
        let report = BpReport {
            theta_c,
            tolerance,
            cases,
            pass,
        };
        write_output(out, &canonical_json(&report))?;
    }
    Ok(if pass { 0 } else { 2 })
}

#[derive(Serialize)]
struct PiQuadReport {
    h: f64,
    tolerance: f64,
    cases: Vec<PiQuadCase>,
    /// Max over cases of the principal-value (stabilized) deviation, the
    /// number the tolerance applies to.
    max_relative_deviation: f64,
    pass: bool,
}

#[derive(Serialize)]
struct PiQuadCase {
    label: String,
    /// Stabilized principal-value evaluation of the kernel expression.
    relative_deviation: f64,
    /// Plain excluded-node sum with the pointwise term as stated.
    plain_stated_deviation: f64,
    /// Plain sum with the tangentially projected jump term.
    plain_jump_deviation: f64,
}

pub struct PiQuadOutcome {
    pub cases: Vec<(String, f64, f64, f64)>,
    pub worst_stabilized: f64,
}

pub fn pi_quad_compare(h: f64) -> Result<PiQuadOutcome, String> {
    type P = CliffordPolynomial<Q>;
    let n = 2;
    let eng = engine(n, 4)?;
    let pi0 = eng.operator(OperatorTag::Pi0).map_err(|e| e.to_string())?;
    let mesh = CapMesh::whole_sphere(h).map_err(|e| e.to_string())?;
    // deterministic subsample of targets
    let stride = (mesh.interior.len() / 150).max(1);
    let targets: Vec<Multivector<f64>> = mesh
        .interior
        .iter()
        .step_by(stride)
        .map(|nd| nd.point.clone())
        .collect();

    let e1 = Multivector::basis_vector(n, 1);
    let e12 = Multivector::basis_vector(n, 1).product(&Multivector::basis_vector(n, 2));
    let inputs: Vec<(String, P)> = vec![
        ("one".into(), P::one(n)),
        ("e12".into(), P::constant(e12)),
        ("x0".into(), P::variable(n, 0)),
        ("x1_e1".into(), P::variable(n, 1).mul_const_left(&e1)),
        ("x2".into(), P::variable(n, 2)),
    ];
    let mut cases = Vec::new();
    let mut worst = 0.0f64;
    for (label, f) in inputs {
        let ff = f.to_f64();
        // spectral route
        let coords = eng
            .basis()
            .expand_exact(&f)
            .map_err(|e| e.to_string())?
            .coords;
        let spec_coords = pi0.apply(&coords);
        let spec_fun: SphericalFunction = eng.basis().synth(&spec_coords);
        // quadrature route, all three schemes
        let f_nodes = MeshFunction::sample(mesh.interior.iter().map(|nd| nd.point.clone()), |p| {
            ff.evaluate(p)
        });
        let f_targets = MeshFunction::sample(targets.iter().cloned(), |p| ff.evaluate(p));
        let rel_of = |scheme: PiQuadScheme| {
            let quad = pi_s0_quad(&mesh, &f_nodes, &targets, scheme, &f_targets);
            let mut diff = 0.0f64;
            let mut scale = 0.0f64;
            for (w, qv) in targets.iter().zip(&quad.values) {
                let sv = spec_fun.evaluate(w);
                diff = diff.max((&sv - qv).norm());
                scale = scale.max(sv.norm()).max(ff.evaluate(w).norm());
            }
            diff / scale.max(1e-12)
        };
        let stabilized = rel_of(PiQuadScheme::Stabilized);
        let stated = rel_of(PiQuadScheme::Stated);
        let jump = rel_of(PiQuadScheme::JumpCorrected);
        worst = worst.max(stabilized);
        cases.push((label, stabilized, stated, jump));
    }
    Ok(PiQuadOutcome {
        cases,
        worst_stabilized: worst,
    })
}

fn pi_quad_cmd(
    out: &Option<PathBuf>,
    cfg: &FileConfig,
    h: Option<f64>,
    tolerance: Option<f64>,
) -> Result<i32, String> {
    let h = h.or_else(|| cfg.h.as_ref().and_then(|v| v.first().copied())).unwrap_or(0.02);
    let tolerance = tolerance.or(cfg.tolerance).unwrap_or(5e-2);
    let outcome = pi_quad_compare(h)?;
    let report = PiQuadReport {
        h,
        tolerance,
        cases: outcome
            .cases
            .into_iter()
            .map(|(label, stabilized, stated, jump)| PiQuadCase {
                label,
                relative_deviation: stabilized,
                plain_stated_deviation: stated,
                plain_jump_deviation: jump,
            })
            .collect(),
        max_relative_deviation: outcome.worst_stabilized,
        pass: outcome.worst_stabilized <= tolerance,
    };
    let pass = report.pass;
    write_output(out, &canonical_json(&report))?;
    Ok(if pass { 0 } else { 2 })
}

// ---------------------------------------------------------------------------
// Beltrami problem JSON
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
struct ProblemJson {
    variant: String,
    mode: ModeJson,
    q: QJson,
    phi: PhiJson,
    tolerance: f64,
    max_iterations: usize,
    #[serde(default)]
    random_start: bool,
}

#[derive(Deserialize)]
enum ModeJson {
    #[serde(rename = "spectral")]
    Spectral {
        n: usize,
        #[serde(rename = "N")]
        trunc: usize,
    },
    #[serde(rename = "quadrature")]
    Quadrature {
        theta_c: f64,
        h: f64,
        #[serde(default = "default_axis")]
        axis: [f64; 3],
    },
}

fn default_axis() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

#[derive(Deserialize)]
enum QJson {
    #[serde(rename = "constant")]
    Constant(MvJson),
    #[serde(rename = "poly")]
    Poly(PolyJson),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PhiJson {
    Zero(String),
    Pole { pole: [f64; 3] },
}

#[derive(Serialize)]
struct BeltramiReport {
    variant: String,
    mode: String,
    seed: u64,
    precheck: sclifford::beltrami::PrecheckReport,
    converged: bool,
    iterations: usize,
    residual_history: Vec<f64>,
    observed_rate: Option<f64>,
    final_fixed_point_residual: f64,
    warnings: Vec<String>,
    h_norm: f64,
    f_norm: f64,
}

fn beltrami_cmd(out: &Option<PathBuf>, path: &PathBuf, seed: u64) -> Result<i32, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read problem {}: {e}", path.display()))?;
    let spec: ProblemJson =
        serde_json::from_str(&text).map_err(|e| format!("bad problem JSON: {e}"))?;
    let variant = match spec.variant.as_str() {
        "s0" => BeltramiVariant::S0,
        "s1" => BeltramiVariant::S1,
        other => return Err(format!("unknown variant '{other}'")),
    };
    let q = match &spec.q {
        QJson::Constant(mv) => QCoeff::Constant(
            Multivector::<f64>::from_json(mv).map_err(|e| e.to_string())?,
        ),
        QJson::Poly(p) => QCoeff::Poly(
            CliffordPolynomial::<Q>::from_json(p)
                .map_err(|e| e.to_string())?
                .to_f64(),
        ),
    };
    let phi = match &spec.phi {
        PhiJson::Zero(s) if s == "zero" => PhiSpec::Zero,
        PhiJson::Zero(s) => return Err(format!("bad phi spec '{s}'")),
        PhiJson::Pole { pole } => PhiSpec::CauchyKernel {
            pole: Multivector::paravector(2, &[pole[0], pole[1], pole[2]]),
        },
    };

    // Build mode resources, then run.
    let (eng, mesh, mode_name): (Option<OperatorEngine>, Option<CapMesh>, String) = match spec.mode
    {
        ModeJson::Spectral { n, trunc } => (
            Some(engine(n, trunc)?),
            None,
            format!("spectral(n={n},N={trunc})"),
        ),
        ModeJson::Quadrature { theta_c, h, axis } => (
            None,
            Some(CapMesh::build(axis, theta_c, h).map_err(|e| e.to_string())?),
            format!("quadrature(theta_c={theta_c},h={h})"),
        ),
    };
    let mode = match (&eng, &mesh) {
        (Some(e), None) => BeltramiMode::Spectral { engine: e },
        (None, Some(m)) => BeltramiMode::Quadrature { mesh: m },
        _ => unreachable!(),
    };
    let problem = BeltramiProblem {
        variant,
        mode,
        q,
        phi,
        tolerance: spec.tolerance,
        max_iterations: spec.max_iterations,
    };
    let pi_norm = pi_norm_for(&problem).map_err(|e| e.to_string())?;
    let precheck = contraction_precheck(&problem, pi_norm);
    if !precheck.pass {
        let report = BeltramiReport {
            variant: spec.variant.clone(),
            mode: mode_name,
            seed,
            precheck,
            converged: false,
            iterations: 0,
            residual_history: vec![],
            observed_rate: None,
            final_fixed_point_residual: f64::NAN,
            warnings: vec!["contraction precheck failed".into()],
            h_norm: f64::NAN,
            f_norm: f64::NAN,
        };
        write_output(out, &canonical_json(&report))?;
        return Ok(2);
    }
    let start = if spec.random_start {
        Some(random_start(&problem, seed))
    } else {
        None
    };
    match solve_fixed_point(&problem, start.as_ref()) {
        Ok(result) => {
            let (h_norm, f_norm) = solution_norms(&problem, &result);
            let report = BeltramiReport {
                variant: spec.variant.clone(),
                mode: mode_name,
                seed,
                precheck,
                converged: true,
                iterations: result.iterations,
                residual_history: result.residual_history.clone(),
                observed_rate: result.observed_rate,
                final_fixed_point_residual: result.final_fixed_point_residual,
                warnings: result.warnings.clone(),
                h_norm,
                f_norm,
            };
            write_output(out, &canonical_json(&report))?;
            Ok(0)
        }
        Err(CoreError::NonConvergence {
            iterations,
            residual,
            history,
        }) => {
            let report = BeltramiReport {
                variant: spec.variant.clone(),
                mode: mode_name,
                seed,
                precheck,
                converged: false,
                iterations,
                residual_history: history,
                observed_rate: None,
                final_fixed_point_residual: residual,
                warnings: vec!["did not converge".into()],
                h_norm: f64::NAN,
                f_norm: f64::NAN,
            };
            write_output(out, &canonical_json(&report))?;
            Ok(2)
        }
        Err(e) => Err(e.to_string()),
    }
}

fn random_start(problem: &BeltramiProblem, seed: u64) -> BeltramiStart {
    // deterministic pseudo-random start derived from the seed
    let mix = |i: usize| {
        let x = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add((i as u64).wrapping_mul(1442695040888963407)) as f64;
        ((x / u64::MAX as f64) * 2.0 - 1.0) * 0.1
    };
    match &problem.mode {
        BeltramiMode::Spectral { engine } => {
            let dim = engine.basis().dim();
            BeltramiStart::Spectral(DVector::from_fn(dim, |i, _| mix(i)))
        }
        BeltramiMode::Quadrature { mesh } => {
            let values = (0..mesh.interior.len())
                .map(|i| Multivector::from_terms(2, [(0u16, mix(i)), (1u16, mix(i + 7919))]))
                .collect();
            BeltramiStart::Quadrature(MeshFunction { values })
        }
    }
}

fn solution_norms(problem: &BeltramiProblem, result: &BeltramiResult) -> (f64, f64) {
    match (&problem.mode, &result.solution) {
        (BeltramiMode::Spectral { engine }, BeltramiSolution::Spectral { h, f }) => {
            (engine.basis().norm(h), engine.basis().norm(f))
        }
        (BeltramiMode::Quadrature { mesh }, BeltramiSolution::Quadrature { h, f }) => {
            (h.lp_norm(mesh, 2.0), f.lp_norm(mesh, 2.0))
        }
        _ => (f64::NAN, f64::NAN),
    }
}

fn bounds_cmd(
    out: &Option<PathBuf>,
    cfg: &FileConfig,
    n: Option<usize>,
    p: Option<f64>,
    b_p: Option<f64>,
) -> Result<i32, String> {
    let n = n.or(cfg.n).unwrap_or(2);
    let p = p.or(cfg.p).unwrap_or(2.0);
    let b_p = b_p.or(cfg.b_p).unwrap_or(1.0);
    let report = theoretical_bounds(n, p, b_p).map_err(|e| e.to_string())?;
    write_output(out, &canonical_json(&report))?;
    Ok(0)
}
