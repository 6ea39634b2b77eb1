use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use cardylab_core::cardy::{rectangle_prediction, triangle_prediction, TrianglePosition};
use cardylab_core::harness::{
    resolve_workers, run_convergence, run_exact_suite, run_rsw, shapes, with_workers,
    ExactSuiteOptions, ExperimentConfig, ShapeParams,
};
use cardylab_core::hexlattice::DomainFile;
use cardylab_core::loops::{
    loop_checks, sample_loop_config, uniformity_check, LoopBasis, DEFAULT_ENUMERATION_CAP,
};
use cardylab_core::observable::{
    holomorphicity_residual_approx, holomorphicity_sweep, observable_backends, BackendParams,
    ObservableField,
};
use cardylab_core::percolation::{
    crossing_detectors, crossing_probability_mc_with, sample_coloring,
};
use cardylab_core::rng::SampleRng;
use cardylab_core::spinor::{build_cover_with, count_spinor_configs, equivalence_check};
use cardylab_core::{Error, Result};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "cardylab",
    version,
    about = "Critical percolation on the hexagonal lattice: exact checks and crossing Monte Carlo"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Discretize a shape and write the marked domain as JSON.
    Domain {
        #[arg(long, default_value = "triangle")]
        shape: String,
        #[arg(long)]
        mesh: f64,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long, default_value_t = 1.0)]
        aspect: f64,
        #[arg(long, default_value_t = 1.0)]
        size: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Estimate the crossing probability of a 4-marked domain, or draw one
    /// coloring and its loop configuration with --show.
    Sample {
        #[arg(long)]
        domain: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value = "union-find")]
        detector: String,
        #[arg(long)]
        show: bool,
        /// Also write the estimate as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Enumerate all colorings: counting, injectivity and crossing ↔ link pattern.
    Enumerate {
        #[arg(long)]
        domain: PathBuf,
        /// Comma-separated boundary mid-edge ids; defaults to the domain's marks.
        #[arg(long, value_delimiter = ',')]
        marks: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value_t = EnumCheck::Crossing)]
        check: EnumCheck,
        /// Samples for the uniformity check.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Build the double cover for a branch set and check its configurations.
    Spinor {
        #[arg(long)]
        domain: PathBuf,
        /// Comma-separated mid-edge ids; defaults to the domain's marks.
        #[arg(long, value_delimiter = ',')]
        branch: Vec<usize>,
        #[arg(long, default_value = "shortest-pairs")]
        strategy: String,
        #[arg(long, value_enum, default_value_t = SpinorCheck::Equivalence)]
        check: SpinorCheck,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
    },
    /// Evaluate the observable on a 3-marked domain.
    Observe {
        #[arg(long)]
        domain: PathBuf,
        /// Comma-separated boundary mid-edge ids; defaults to the domain's marks.
        #[arg(long, value_delimiter = ',')]
        marks: Option<Vec<usize>>,
        #[arg(long, default_value = "exact")]
        backend: String,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Discrete holomorphicity at every admissible vertex of a saved field.
    HoloCheck {
        #[arg(long)]
        field: PathBuf,
    },
    /// Continuum crossing probability.
    Predict {
        #[arg(long)]
        shape: String,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        aspect: Option<f64>,
    },
    /// Crossing probability against the prediction over decreasing meshes.
    Converge {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Annulus crossing decay and power-law fit.
    Rsw {
        #[arg(long)]
        r: f64,
        #[arg(long = "Rs", value_delimiter = ',', required = true)]
        outers: Vec<f64>,
        #[arg(long)]
        mesh: f64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive identity checks over all domains up to a size.
    ExactSuite {
        #[arg(long, default_value_t = 6)]
        max_faces: usize,
        /// Flip this half-edge in every configuration; the suite must fail.
        #[arg(long)]
        inject_fault: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum EnumCheck {
    /// Counting plus, with 4 marks, crossing ↔ link pattern.
    Crossing,
    Count,
    /// χ² test of the loop sampler against the enumerated set.
    Uniformity,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpinorCheck {
    Count,
    /// Counting plus the spinor ↔ loop correspondence.
    Equivalence,
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    println!(
        "{}",
        serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))?
    );
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn run(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::Domain {
            shape,
            mesh,
            t,
            aspect,
            size,
            out,
        } => {
            let params = ShapeParams {
                t,
                aspect,
                size,
                polygon: None,
            };
            let md = shapes().get(&shape)?.build(&params, mesh)?;
            DomainFile::from_marked(&md).write(&out)?;
            println!("{} faces, marks {:?}", md.domain().num_faces(), md.marks());
            Ok(true)
        }
        Cmd::Sample {
            domain,
            trials,
            seed,
            detector,
            show,
            out,
        } => {
            let md = DomainFile::read(&domain)?.build_marked()?;
            if show {
                let mut rng = SampleRng::new(seed, 0, 0);
                let c = sample_coloring(md.domain(), &mut rng);
                let blue: Vec<usize> = (0..c.len()).filter(|&f| c.is_blue(f)).collect();
                println!("blue faces: {blue:?}");
                let mut rng = SampleRng::new(seed, 0, 0);
                let xi = sample_loop_config(&md, &mut rng)?;
                println!(
                    "half-edges: {:?}",
                    xi.half_edges().iter().collect::<Vec<_>>()
                );
                return Ok(true);
            }
            let workers = resolve_workers(None)?;
            let detectors = crossing_detectors();
            let det = detectors.get(&detector)?;
            let est = with_workers(workers, || {
                crossing_probability_mc_with(&md, trials, seed, det)
            })??;
            print_json(&est)?;
            if let Some(path) = out {
                std::fs::write(path, serde_json::to_string_pretty(&est)? + "\n")?;
            }
            Ok(true)
        }
        Cmd::Enumerate {
            domain,
            marks,
            check,
            samples,
            seed,
            cap,
        } => {
            let mut file = DomainFile::read(&domain)?;
            if let Some(m) = marks {
                file.marks = m;
            }
            let md = file.build_marked()?;
            if let EnumCheck::Uniformity = check {
                let rep = uniformity_check(&md, samples, seed, cap)?;
                print_json(&rep)?;
                println!("{}", verdict(rep.pass));
                return Ok(rep.pass);
            }
            let rep = loop_checks(&LoopBasis::new(md.shared_domain().clone()), &md, cap)?;
            print_json(&rep)?;
            let crossing = matches!(check, EnumCheck::Crossing) && md.num_marks() == 4;
            let ok = rep.count_ok() && (!crossing || rep.equivalence_ok());
            println!("{}", verdict(ok));
            Ok(ok)
        }
        Cmd::Spinor {
            domain,
            branch,
            strategy,
            check,
            cap,
        } => {
            let file = DomainFile::read(&domain)?;
            let d = Arc::new(file.build_domain()?);
            let branch = if branch.is_empty() {
                file.marks.clone()
            } else {
                branch
            };
            let strategies = cardylab_core::spinor::cut_strategies();
            let cover = build_cover_with(d, &branch, strategies.get(&strategy)?)?;
            let count = count_spinor_configs(&cover, cap)?;
            let ok = match check {
                SpinorCheck::Count => {
                    print_json(&(&count, cover.sheets()))?;
                    count.ok()
                }
                SpinorCheck::Equivalence => {
                    let eq = equivalence_check(&cover, cap)?;
                    print_json(&(&count, &eq, cover.sheets()))?;
                    count.ok() && eq.ok()
                }
            };
            println!("{}", verdict(ok));
            Ok(ok)
        }
        Cmd::Observe {
            domain,
            marks,
            backend,
            trials,
            seed,
            cap,
            out,
        } => {
            let mut file = DomainFile::read(&domain)?;
            if let Some(m) = marks {
                file.marks = m;
            }
            let md = file.build_marked()?;
            let backends = observable_backends();
            let zs = cardylab_core::observable::field_mid_edges(&md);
            let workers = resolve_workers(None)?;
            let params = BackendParams { trials, seed, cap };
            let field = with_workers(workers, || {
                backends.get(&backend)?.evaluate(&md, &zs, &params)
            })??;
            field.write(&out)?;
            println!("{} values written to {}", zs.len(), out.display());
            Ok(true)
        }
        Cmd::HoloCheck { field } => {
            let field = ObservableField::read(&field)?;
            if field.is_exact() {
                let rep = holomorphicity_sweep(&field)?;
                print_json(&rep)?;
                println!("{}", verdict(rep.ok()));
                return Ok(rep.ok());
            }
            let d = field.marked_domain().domain();
            let mut ok = true;
            for v in 0..d.num_vertices() {
                match holomorphicity_residual_approx(&field, v) {
                    Ok((res, half)) => {
                        let pass = res <= 5.0 * half;
                        ok &= pass;
                        println!(
                            "vertex {v}: |residual| {res:.3e}, CI half-width {half:.3e} {}",
                            verdict(pass)
                        );
                    }
                    Err(Error::BoundaryVertex(_) | Error::MarkAtVertex { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            println!("{}", verdict(ok));
            Ok(ok)
        }
        Cmd::Predict { shape, t, aspect } => {
            let p = match shape.as_str() {
                "triangle" => {
                    let t = t.ok_or_else(|| Error::InvalidParameter("--t is required".into()))?;
                    triangle_prediction(TrianglePosition::new(t)?)
                }
                "rectangle" => {
                    let a = aspect
                        .ok_or_else(|| Error::InvalidParameter("--aspect is required".into()))?;
                    rectangle_prediction(a)?
                }
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown shape {other}; use triangle or rectangle"
                    )))
                }
            };
            println!("{p:.12}");
            Ok(true)
        }
        Cmd::Converge { config, out } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = ExperimentConfig::from_toml(&text)?;
            let start = Instant::now();
            let rep = run_convergence(&cfg)?;
            println!("mesh        faces    p_hat     95% CI                 prediction  abs_error");
            for r in &rep.rows {
                println!(
                    "{:<10.6}  {:<7}  {:.5}  [{:.5}, {:.5}]     {:.6}    {:.5}",
                    r.mesh, r.faces, r.p_hat, r.ci_low, r.ci_high, r.prediction, r.abs_error
                );
            }
            println!("error monotone: {}", rep.error_monotone);
            println!("{}: {}", verdict(rep.passed), rep.check);
            if let Some(path) = out.or_else(|| cfg.output.clone()) {
                rep.write(&cfg, &path, start.elapsed().as_secs_f64())?;
            }
            Ok(rep.passed)
        }
        Cmd::Rsw {
            r,
            outers,
            mesh,
            trials,
            seed,
            out,
        } => {
            let workers = resolve_workers(None)?;
            let start = Instant::now();
            let rep = with_workers(workers, || run_rsw(r, &outers, mesh, trials, seed))??;
            for row in &rep.rows {
                println!(
                    "R/r = {:<6} p = {:.5} [{:.5}, {:.5}]",
                    row.ratio, row.p_hat, row.ci_low, row.ci_high
                );
            }
            println!(
                "eta = {:.4}, R^2 = {:.4}, monotone: {}",
                rep.eta, rep.r_squared, rep.monotone
            );
            println!("advisory (eta in [0.07, 0.14]): {}", rep.advisory_in_range);
            println!("{}", verdict(rep.passed));
            if let Some(path) = out {
                let cmdline =
                    format!("r={r} Rs={outers:?} mesh={mesh} trials={trials} seed={seed}");
                rep.write(&path, &cmdline, workers, start.elapsed().as_secs_f64())?;
            }
            Ok(rep.passed)
        }
        Cmd::ExactSuite {
            max_faces,
            inject_fault,
            json,
        } => {
            let opts = ExactSuiteOptions {
                max_faces,
                fault: inject_fault,
                ..Default::default()
            };
            let workers = resolve_workers(None)?;
            let start = Instant::now();
            let rep = with_workers(workers, || run_exact_suite(&opts))??;
            if json {
                print_json(&rep)?;
            } else {
                println!(
                    "{} domains, {} triples, {} four-mark sets, {} vertices, {} contours",
                    rep.domains,
                    rep.triples,
                    rep.four_mark_sets,
                    rep.vertices_checked,
                    rep.contours_checked
                );
                for c in &rep.checks {
                    println!(
                        "{:<22} {} ({} cases, {} failures)",
                        c.name,
                        verdict(c.passed()),
                        c.cases,
                        c.failures
                    );
                    for e in &c.examples {
                        println!("    {e}");
                    }
                }
                println!("{:.1} s", start.elapsed().as_secs_f64());
            }
            Ok(rep.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
