use std::fs;
use std::path::{Path, PathBuf};

use kprab::kspecial::{k_gamma, ml_k, prabhakar_kernel, HilferParams};
use kprab::operators::{
    hilfer_prabhakar_derivative, k_rl_integral, prabhakar_derivative, prabhakar_integral,
    regularized_hilfer_prabhakar_derivative, regularized_prabhakar_derivative, Grid1D, SampledFunction,
};
use kprab::solvers::{
    diffusion_residual, relaxation_residual, solve_diffusion, solve_relaxation, DiffusionProblem, RelaxationProblem,
};
use kprab::transforms::{
    laplace_kernel_closed, laplace_operator_closed, sumudu_kernel_closed, sumudu_operator_closed, BoundaryData,
    OperatorParams, TransformKind, TransformQuery,
};
use kprab::verify::{default_grid, default_suite, reports_to_json, run_suite};
use kprab::{Control, Samples};

use crate::config::{ApplyOperator, EvalFunction, Job, JobConfig, Operand, Profile, TransformTarget};
use crate::csvio::{read_samples, write_samples, write_table};
use crate::error::{CliError, CliResult};

const DEFAULT_CELLS: usize = 1024;
const DEFAULT_DIFFUSION_CELLS: usize = 600;
const RESIDUAL_TIME_CELLS: usize = 256;

/// Runs a job, writing its files under `out`. Returns the paths written.
pub fn execute(cfg: &JobConfig, out: &Path) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let ctrl = &cfg.ctrl;
    let cells = cfg.grid_n;
    match &cfg.job {
        Job::Eval { function, params, k, z } => {
            let rows = z
                .iter()
                .map(|&z| {
                    let v = match (function, params) {
                        (EvalFunction::KGamma, _) => k_gamma(z, *k)?,
                        (EvalFunction::MittagLeffler, Some(p)) => ml_k(z, p, ctrl)?,
                        (EvalFunction::Kernel, Some(p)) => prabhakar_kernel(z, p, ctrl)?,
                        _ => unreachable!("parameters are parsed for series functions"),
                    };
                    Ok((z, v))
                })
                .collect::<CliResult<Vec<_>>>()?;
            let path = out.join("eval.csv");
            write_table(&path, ["x", "value"], &rows)?;
            Ok(vec![path])
        }
        Job::Apply {
            operator,
            params,
            nu,
            operand,
        } => {
            let f = load_operand(operand, cells)?;
            let hp = || HilferParams::new(*params, nu.expect("nu parsed for Hilfer operators"));
            let g = match operator {
                ApplyOperator::Integral => prabhakar_integral(&f, params, ctrl)?,
                ApplyOperator::RlIntegral => k_rl_integral(&f, params.mu, params.k)?,
                ApplyOperator::Derivative => prabhakar_derivative(&f, params, ctrl)?,
                ApplyOperator::RegularizedDerivative => regularized_prabhakar_derivative(&f, params, ctrl)?,
                ApplyOperator::Hilfer => hilfer_prabhakar_derivative(&f, &hp()?, ctrl)?,
                ApplyOperator::RegularizedHilfer => regularized_hilfer_prabhakar_derivative(&f, &hp()?, ctrl)?,
            };
            let path = out.join("apply.csv");
            write_samples(&path, &g, "value")?;
            Ok(vec![path])
        }
        Job::Transform {
            kind,
            params,
            nu,
            u,
            target,
        } => {
            let op_params = match nu {
                Some(nu) => OperatorParams::Hilfer(HilferParams::new(*params, *nu)?),
                None => OperatorParams::Prabhakar(*params),
            };
            let rows = u
                .iter()
                .map(|&u| {
                    let q = TransformQuery::new(u, *kind)?;
                    let v = match (target, kind) {
                        (TransformTarget::Kernel, TransformKind::Laplace) => laplace_kernel_closed(&q, params)?,
                        (TransformTarget::Kernel, TransformKind::Sumudu) => sumudu_kernel_closed(&q, params)?,
                        (
                            TransformTarget::Operator {
                                op,
                                f_of_u,
                                initial_values,
                                frozen_terms,
                            },
                            _,
                        ) => {
                            let bd = BoundaryData {
                                initial_values: initial_values.clone(),
                                frozen_integral_terms: frozen_terms.clone(),
                            };
                            match kind {
                                TransformKind::Laplace => laplace_operator_closed(*op, &q, &op_params, *f_of_u, &bd)?,
                                TransformKind::Sumudu => sumudu_operator_closed(*op, &q, &op_params, *f_of_u, &bd)?,
                            }
                        }
                    };
                    Ok((u, v))
                })
                .collect::<CliResult<Vec<_>>>()?;
            let path = out.join("transform.csv");
            write_table(&path, ["x", "value"], &rows)?;
            Ok(vec![path])
        }
        Job::SolveRelaxation {
            hp,
            lambda,
            delta,
            k_init,
            t_end,
            forcing,
            residual,
        } => {
            let grid = match forcing {
                Some(_) => None,
                None => Some(Grid1D::uniform(*t_end, cells.unwrap_or(DEFAULT_CELLS))?),
            };
            let forcing = forcing.as_deref().map(read_samples).transpose()?;
            let grid = match (&forcing, grid) {
                (Some(f), _) => {
                    if (f.grid.end() - t_end).abs() > 1e-9 * t_end.abs().max(1.0) {
                        return Err(CliError::Config(format!(
                            "forcing grid ends at {} but t_end is {t_end}",
                            f.grid.end()
                        )));
                    }
                    f.grid
                }
                (None, Some(g)) => g,
                (None, None) => unreachable!(),
            };
            let prob = RelaxationProblem {
                hp: *hp,
                lambda: *lambda,
                delta: *delta,
                k_init: *k_init,
                forcing,
            };
            let sol = solve_relaxation(&prob, &grid, ctrl)?;
            let path = out.join("relaxation.csv");
            write_samples(&path, &sol.values, "value")?;
            println!("terms_used = {}", sol.terms_used);
            println!("tail_estimate = {:e}", sol.tail_estimate);
            if *residual {
                println!("residual = {:e}", relaxation_residual(&prob, &sol, ctrl)?);
            }
            Ok(vec![path])
        }
        Job::SolveDiffusion {
            hp,
            k_diff,
            profile,
            time_points,
            p_max,
            residual,
        } => {
            let initial_profile = match profile {
                Profile::File(p) => read_samples(p)?,
                Profile::Gaussian { sigma, x_max } => {
                    gaussian(*sigma, *x_max, cells.unwrap_or(DEFAULT_DIFFUSION_CELLS))?
                }
            };
            let prob = DiffusionProblem {
                hp: *hp,
                k_diff: *k_diff,
                initial_profile,
                time_points: time_points.clone(),
            };
            prob.validate()?;
            let p_grid = prob.matched_p_grid(*p_max)?;
            let sols = solve_diffusion(&prob, &p_grid, ctrl)?;
            let mut written = Vec::with_capacity(sols.len());
            for (t, sol) in time_points.iter().zip(&sols) {
                let path = out.join(format!("u_t{t}.csv"));
                write_samples(&path, &sol.values, "u")?;
                written.push(path);
            }
            if *residual {
                let r = diffusion_residual(&prob, &p_grid, &sols, ctrl, RESIDUAL_TIME_CELLS)?;
                println!("residual = {r:e}");
            }
            Ok(written)
        }
        Job::Verify { identities } => {
            let mut cases = default_suite();
            if let Some(ids) = identities {
                cases.retain(|c| ids.contains(&c.identity_id));
            }
            let grid = match cells {
                Some(n) => Grid1D::uniform(default_grid().end(), n)?,
                None => default_grid(),
            };
            let reports = run_suite(&cases, &grid, ctrl);
            let path = out.join("verify_report.json");
            fs::write(&path, reports_to_json(&reports))?;
            let failed = reports.iter().filter(|r| !r.passed).count();
            for r in &reports {
                println!(
                    "{} {:<28} {:<20} rel_err={:.3e} threshold={:.1e}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.case.identity_id.name(),
                    r.case.test_function_id.name(),
                    r.max_rel_err,
                    r.threshold
                );
            }
            if failed > 0 {
                return Err(CliError::Verification {
                    failed,
                    total: reports.len(),
                });
            }
            Ok(vec![path])
        }
    }
}

fn load_operand(op: &Operand, cells: Option<usize>) -> CliResult<Samples> {
    match op {
        Operand::File(p) => read_samples(p),
        Operand::Builtin { function, t_end } => {
            let grid = Grid1D::uniform(*t_end, cells.unwrap_or(DEFAULT_CELLS))?;
            let f = *function;
            Ok(SampledFunction::from_fn(grid, |t| f.value(t)).with_derivative_fn(|t| f.derivative(t)))
        }
    }
}

fn gaussian(sigma: f64, x_max: f64, cells: usize) -> CliResult<Samples> {
    if !(sigma > 0.0 && x_max > 0.0) {
        return Err(CliError::Config("`gaussian_sigma` and `x_max` must be > 0".into()));
    }
    let step = 2.0 * x_max / cells as f64;
    let grid = Grid1D::new(-x_max, step, cells + 1)?;
    Ok(SampledFunction::from_fn(grid, |x| (-0.5 * (x / sigma).powi(2)).exp()))
}

/// Applies command-line overrides on top of the parsed file.
pub fn apply_overrides(cfg: &mut JobConfig, grid_n: Option<usize>, tol: Option<f64>) -> CliResult<()> {
    if let Some(n) = grid_n {
        if n < 4 {
            return Err(CliError::Config("--grid-n must be >= 4".into()));
        }
        cfg.grid_n = Some(n);
    }
    if let Some(t) = tol {
        cfg.ctrl = Control::new(t, cfg.ctrl.max_terms)?;
    }
    Ok(())
}
