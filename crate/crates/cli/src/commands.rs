//! Subcommand implementations. Each returns the process exit code.

use serde::Serialize;
use std::fs;
use std::io::BufReader;
use std::path::Path;

use multitime::flrw::{flrw_solve, ConformalInfo, FLRWProblem, ScaleFactor};
use multitime::kernels::{kernel_norm, KernelDomain, KernelNormReport, KernelSpec};
use multitime::operator::QuadratureConfig;
use multitime::solver::{contraction_certificate, solve, Certificate, SolveConfig, SolveFailure, SolveReport, SolveStatus};
use multitime::specialfun::WeightSpec;
use multitime::spinor::io::read_field;
use multitime::spinor::norms::slice_l2_table;
use multitime::spinor::{bracket_table, weighted_norm, GridSpec, MultiTimeField};
use multitime::Error;

use crate::config::RunConfig;
use crate::report::{ensure_dir, write_snapshot, write_text, Envelope, HISTORY_FILE, REPORT_FILE};
use crate::selftest::{self, SelftestOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SUITE_FAILURE: i32 = 1;
pub const EXIT_CONVERGENCE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_CONDITION: i32 = 4;

/// Smallest ‖K‖ used for the weight when the kernel vanishes.
const MIN_NORM_K: f64 = 1e-6;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Divergence(_) | Error::SweepNonConvergence { .. } => EXIT_CONVERGENCE,
        Error::Condition(_) | Error::KernelUnresolved(_) | Error::Singularity(_) => EXIT_CONDITION,
        Error::Domain(_)
        | Error::WeightSaturated { .. }
        | Error::Config(_)
        | Error::OutOfDomain(_)
        | Error::Kernel { .. }
        | Error::Io(_) => EXIT_CONFIG,
    }
}

fn status_code(status: SolveStatus) -> i32 {
    match status {
        SolveStatus::Converged => EXIT_OK,
        SolveStatus::MaxIterations | SolveStatus::Diverged | SolveStatus::SweepFailure => EXIT_CONVERGENCE,
    }
}

pub fn cmd_certify(norm_k: f64, mu: f64) -> (i32, String) {
    let mut env: Envelope<Certificate> = Envelope::new("certify", None);
    match contraction_certificate(norm_k, mu) {
        Ok(c) => env.result = Some(c),
        Err(e) => {
            env.exit_code = exit_code(&e);
            env.error = Some(e.to_string());
        }
    }
    (env.exit_code, env.to_json())
}

pub fn cmd_selftest(opts: &SelftestOptions, out_dir: Option<&Path>) -> (i32, Vec<String>) {
    let mut env = Envelope::new("selftest", None);
    let mut lines = Vec::new();
    match selftest::run(opts) {
        Ok(rep) => {
            lines.extend(rep.checks.iter().map(|c| c.line()));
            lines.push(format!(
                "selftest: {} passed, {} failed, {} inconclusive",
                rep.passed, rep.failed, rep.inconclusive
            ));
            env.exit_code = if rep.success() { EXIT_OK } else { EXIT_SUITE_FAILURE };
            env.result = Some(rep);
        }
        Err(e) => {
            lines.push(format!("selftest aborted: {e}"));
            env.exit_code = exit_code(&e);
            env.error = Some(e.to_string());
        }
    }
    if let Some(dir) = out_dir {
        if let Err(e) = ensure_dir(dir).and_then(|_| write_text(dir, REPORT_FILE, &env.to_json())) {
            lines.push(format!("cannot write report: {e}"));
            return (EXIT_CONFIG, lines);
        }
    }
    (env.exit_code, lines)
}

/// Everything a solve run records besides the artifacts themselves.
#[derive(Debug, Clone, Serialize)]
pub struct SolveRun {
    pub grid: GridSpec,
    pub masses: (f64, f64),
    pub seed: u64,
    pub quadrature: QuadratureConfig,
    pub kernel_norm: Option<KernelNormReport>,
    pub weight: WeightSpec,
    pub report: Option<SolveReport>,
    pub conformal: Option<ConformalInfo>,
}

/// Weight from the configured override or the sampled kernel norm.
fn weight_for(cfg: &RunConfig, k: &KernelSpec, grid: &GridSpec) -> Result<(WeightSpec, Option<KernelNormReport>), Error> {
    let mu = cfg.weight.mu.unwrap_or(cfg.masses.m1.max(cfg.masses.m2));
    if let Some(nk) = cfg.weight.norm_k {
        return Ok((WeightSpec::new(nk, mu)?, None));
    }
    let domain = KernelDomain {
        time_extent: grid.time_extent,
        half_width: grid.spatial_half_width,
    };
    let norm = kernel_norm(k, &domain, &cfg.norm_sampling)?;
    if norm.inflated >= 1.0 {
        return Err(Error::Condition(format!(
            "kernel norm estimate {:.4} (sampled {:.4} x {}) is not below 1",
            norm.inflated, norm.norm_k, norm.inflation
        )));
    }
    Ok((WeightSpec::new(norm.inflated.max(MIN_NORM_K), mu)?, Some(norm)))
}

fn install_threads(threads: usize) {
    if threads > 0 {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
}

struct Prepared {
    grid: GridSpec,
    kernel: KernelSpec,
    free: MultiTimeField,
    scale: Option<ScaleFactor>,
}

fn prepare(cfg: &RunConfig, flrw: bool) -> Result<Prepared, Error> {
    let grid = cfg.grid.build()?;
    let scale = match (&cfg.flrw, flrw) {
        (Some(f), _) => Some(ScaleFactor::from_family(f.scale)?),
        (None, true) => return Err(Error::Config("flrw-solve needs an [flrw] section".into())),
        (None, false) => None,
    };
    let kernel = cfg.kernel.build(scale.as_ref())?;
    let free = cfg.free.build(grid, cfg.masses())?;
    Ok(Prepared {
        grid,
        kernel,
        free,
        scale,
    })
}

fn finish(
    env: &mut Envelope<SolveRun>,
    dir: &Path,
    outcome: Result<(MultiTimeField, SolveReport), SolveFailure>,
    conformal: Option<ConformalInfo>,
) -> Result<(), Error> {
    let run = env.result.as_mut().expect("run metadata set before solving");
    match outcome {
        Ok((psi, report)) => {
            env.exit_code = status_code(report.status);
            write_snapshot(dir, &psi)?;
            write_text(dir, HISTORY_FILE, &report.history_csv())?;
            run.report = Some(report);
            run.conformal = conformal;
        }
        Err(f) => {
            env.exit_code = exit_code(&f.error);
            env.error = Some(f.error.to_string());
            if let Some(r) = f.report {
                write_text(dir, HISTORY_FILE, &r.history_csv())?;
                run.report = Some(*r);
            }
        }
    }
    Ok(())
}

fn run_solve(cfg: &RunConfig, flrw: bool) -> (i32, String) {
    let command = if flrw { "flrw-solve" } else { "solve" };
    let mut env: Envelope<SolveRun> = Envelope::new(command, Some(cfg.hash()));
    install_threads(cfg.threads);
    let dir = cfg.output_dir.as_path();
    let result = (|| -> Result<(), Error> {
        ensure_dir(dir)?;
        let p = prepare(cfg, flrw)?;
        let problem = match (&p.scale, &cfg.flrw, flrw) {
            (Some(a), Some(f), true) => Some(FLRWProblem::new(a.clone(), f.alpha, p.kernel.clone(), p.free.clone())?),
            _ => None,
        };
        let effective = match &problem {
            Some(pr) => pr.effective_kernel()?,
            None => p.kernel.clone(),
        };
        let (weight, norm) = weight_for(cfg, &effective, &p.grid)?;
        let s = &cfg.solve;
        let scfg = SolveConfig::new(s.mode, s.max_iterations, s.residual_tolerance, weight)?.with_quadrature(cfg.quadrature);
        scfg.validate()?;
        env.result = Some(SolveRun {
            grid: p.grid,
            masses: cfg.masses(),
            seed: cfg.seed,
            quadrature: cfg.quadrature,
            kernel_norm: norm,
            weight,
            report: None,
            conformal: None,
        });
        match problem {
            Some(pr) => match flrw_solve(&pr, &scfg, &cfg.norm_sampling) {
                Ok((chi, rep)) => finish(&mut env, dir, Ok((chi, rep.solve)), Some(rep.conformal)),
                Err(f) => finish(&mut env, dir, Err(f), None),
            },
            None => {
                let outcome = solve(&p.free, &p.kernel, &scfg);
                finish(&mut env, dir, outcome, None)
            }
        }
    })();
    if let Err(e) = result {
        env.exit_code = exit_code(&e);
        env.error = Some(e.to_string());
    }
    let json = env.to_json();
    if let Err(e) = write_text(dir, REPORT_FILE, &json) {
        eprintln!("cannot write report: {e}");
    }
    (env.exit_code, json)
}

pub fn cmd_solve(cfg: &RunConfig) -> (i32, String) {
    run_solve(cfg, false)
}

pub fn cmd_flrw_solve(cfg: &RunConfig) -> (i32, String) {
    run_solve(cfg, true)
}

/// Norm tables of a stored field.
#[derive(Debug, Clone, Serialize)]
pub struct NormTables {
    pub grid: GridSpec,
    pub masses: (f64, f64),
    pub max_bracket: f64,
    pub weighted_norm: Option<f64>,
    pub weight: Option<WeightSpec>,
}

/// CSV `n1,t1,n2,t2,bracket,l2` over all time pairs.
pub fn norms_csv(field: &MultiTimeField) -> Result<String, Error> {
    let g = field.grid;
    let br = bracket_table(field)?;
    let l2 = slice_l2_table(field);
    let mut s = String::from("n1,t1,n2,t2,bracket,l2\n");
    for n1 in 0..g.time_steps {
        for n2 in 0..g.time_steps {
            s.push_str(&format!(
                "{n1},{},{n2},{},{:.12e},{:.12e}\n",
                g.time(n1),
                g.time(n2),
                br.get(n1, n2),
                l2[n1 * g.time_steps + n2].sqrt()
            ));
        }
    }
    Ok(s)
}

pub fn cmd_norms(path: &Path, weight: Option<(f64, f64)>, csv: Option<&Path>) -> (i32, String) {
    let mut env: Envelope<NormTables> = Envelope::new("norms", None);
    let result = (|| -> Result<NormTables, Error> {
        let file = fs::File::open(path).map_err(|e| Error::Io(format!("cannot open {}: {e}", path.display())))?;
        let field = read_field(BufReader::new(file))?;
        let spec = weight.map(|(nk, mu)| WeightSpec::new(nk, mu)).transpose()?;
        let table = bracket_table(&field)?;
        let weighted = spec.as_ref().map(|s| weighted_norm(&field, s)).transpose()?;
        if let Some(p) = csv {
            fs::write(p, norms_csv(&field)?).map_err(|e| Error::Io(format!("cannot write {}: {e}", p.display())))?;
        }
        Ok(NormTables {
            grid: field.grid,
            masses: field.masses,
            max_bracket: table.max_sq().sqrt(),
            weighted_norm: weighted,
            weight: spec,
        })
    })();
    match result {
        Ok(t) => env.result = Some(t),
        Err(e) => {
            env.exit_code = exit_code(&e);
            env.error = Some(e.to_string());
        }
    }
    (env.exit_code, env.to_json())
}
