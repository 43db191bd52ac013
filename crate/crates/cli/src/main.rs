//! Batch front door for the toolkit: fixture management, JSON in/out,
//! report tables and the acceptance suite, with deterministic seeded
//! sampling and a tolerance-aware exit status.

mod io;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;

use gl2flat::acceptance;
use gl2flat::hflat::{recover_connection, torsion_residual};
use gl2flat::jets::FieldJet;
use gl2flat::lax::{commutator_from_jet, flow_trace, trace_polyline};
use gl2flat::pde::{
    c_equations, principal_symbol, residuals, spencer_bridge, structure_constants, xi_cubic,
};
use gl2flat::sampling;
use gl2flat::taylor::{prolong, verify_series, Seed};

#[derive(Parser)]
#[command(
    name = "gl2flat",
    about = "Verification and solving toolkit for torsion-free GL(2)-structures in dimension four",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Pointwise Spencer torsion test on a jet bundle {h, dh, g_basis}.
    Spencer {
        /// Inline JSON or @file with {"h": 4x4 rows, "dh": [4 matrices], "g_basis": [matrices]}.
        #[arg(long)]
        input: String,
        /// Also recover and print the compatible connection when torsion-free.
        #[arg(long)]
        connection: bool,
        /// Exit nonzero unless the residual is within --tol.
        #[arg(long)]
        expect_zero: bool,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// The four quasi-linear residuals on a fixture or an explicit jet.
    Residuals {
        /// Fixture name, inline JSON, or @file.
        #[arg(long, conflicts_with = "jet")]
        fixture: Option<String>,
        /// Field-jet JSON (inline or @file).
        #[arg(long)]
        jet: Option<String>,
        /// Evaluation point x0,x1,x2,x3 (fixtures only; default samples).
        #[arg(long)]
        point: Option<String>,
        /// Sample count when no point is given.
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        expect_zero: bool,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Write the table as CSV here.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Structure-constant combinations on a fixture or jet.
    CCheck {
        #[arg(long, conflicts_with = "jet")]
        fixture: Option<String>,
        #[arg(long)]
        jet: Option<String>,
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        expect_zero: bool,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Write the table as CSV here.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Spencer residual and system residual side by side.
    Bridge {
        #[arg(long, conflicts_with = "jet")]
        fixture: Option<String>,
        #[arg(long)]
        jet: Option<String>,
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        expect_zero: bool,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Write the table as CSV here.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Principal symbol determinant against the cubic discriminant.
    Symbol {
        /// Field values A,B,C,D.
        #[arg(long)]
        values: String,
        /// Covector x0,x1,x2,x3.
        #[arg(long)]
        xi: String,
    },
    /// Lax commutator coefficient norms over sampled points of a fixture.
    LaxCheck {
        #[arg(long)]
        fixture: String,
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Spectral-degree cap for the reported commutator.
        #[arg(long, default_value_t = 6)]
        cap: usize,
        #[arg(long)]
        expect_zero: bool,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Write the table as CSV here.
        #[arg(long)]
        csv: Option<String>,
    },
    /// Composed flows of the Lax fields; emits the polyline and endpoints.
    SurfaceTrace {
        #[arg(long)]
        fixture: String,
        /// Start state x0,x1,x2,x3,lambda.
        #[arg(long)]
        start: String,
        /// Flow times s,t (first leg, second leg).
        #[arg(long)]
        times: String,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        /// Write the polyline JSON here instead of stdout.
        #[arg(long)]
        out: Option<String>,
    },
    /// Order-by-order series solve from an order-one seed.
    TaylorSolve {
        #[arg(long)]
        order: usize,
        /// JSON {"values":[4], "gradients":[[4];4]} (inline or @file).
        #[arg(long)]
        seed_file: String,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Write the series JSON here.
        #[arg(long)]
        out: Option<String>,
    },
    /// Normalises a fixture description and samples its jet.
    Fixture {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        point: Option<String>,
    },
    /// Runs the whole criterion suite; exit status reflects the outcome.
    Acceptance {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the machine-readable report here.
        #[arg(long)]
        json: Option<String>,
        /// Write the per-part table as CSV here.
        #[arg(long)]
        csv: Option<String>,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

/// Jets to evaluate: an explicit one, or fixture samples.
fn collect_jets(
    fixture: &Option<String>,
    jet: &Option<String>,
    point: &Option<String>,
    points: usize,
    seed: u64,
    need_hessians: bool,
) -> Result<Vec<FieldJet>> {
    match (fixture, jet) {
        (Some(fx), None) => {
            let fixture = io::parse_fixture(fx)?;
            let pts: Vec<[f64; 4]> = match point {
                Some(p) => vec![io::parse_reals::<4>(p)?],
                None => {
                    println!("# sampling {points} points in [-1,1]^4 with seed {seed}");
                    let mut rng = sampling::rng(seed);
                    (0..points)
                        .map(|_| sampling::point_in_cube(&mut rng, 1.0))
                        .collect()
                }
            };
            Ok(pts.into_iter().map(|p| fixture.jet(p)).collect())
        }
        (None, Some(j)) => {
            let (jet, has_hessians) = io::parse_field_jet(j)?;
            if need_hessians && !has_hessians {
                bail!("this operation differentiates first-derivative coefficients; the jet JSON must carry `hess` for all four fields");
            }
            Ok(vec![jet])
        }
        _ => bail!("exactly one of --fixture or --jet is required"),
    }
}

fn csv_row(point: &[f64; 4], values: &[f64]) -> Vec<String> {
    point
        .iter()
        .chain(values)
        .map(|v| format!("{v:.12e}"))
        .collect()
}

fn point_label(jet: &FieldJet) -> String {
    format!(
        "({:+.4}, {:+.4}, {:+.4}, {:+.4})",
        jet.base_point[0], jet.base_point[1], jet.base_point[2], jet.base_point[3]
    )
}

fn run(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::Spencer {
            input,
            connection,
            expect_zero,
            tol,
        } => {
            let (jet, g) = io::parse_spencer_bundle(&input)?;
            let report = torsion_residual(&jet, &g).context("torsion test")?;
            println!("torsion candidate norm  {:.12e}", report.tau.norm());
            println!("residual norm           {:.12e}", report.norm);
            println!(
                "torsion-free            {}",
                if report.is_torsion_free() { "yes" } else { "no" }
            );
            if connection {
                if report.is_torsion_free() {
                    let alpha = recover_connection(&jet, &g).context("connection recovery")?;
                    for (i, m) in alpha.components().iter().enumerate() {
                        println!("alpha[{i}] = {}", serde_json::to_string(m)?);
                    }
                } else {
                    println!("connection              not recoverable (torsion present)");
                }
            }
            Ok(!expect_zero || report.norm <= tol)
        }

        Cmd::Residuals {
            fixture,
            jet,
            point,
            points,
            seed,
            expect_zero,
            tol,
            csv,
        } => {
            let jets = collect_jets(&fixture, &jet, &point, points, seed, false)?;
            let mut worst = 0.0f64;
            let mut rows = Vec::new();
            println!(
                "{:<44}  {:>14} {:>14} {:>14} {:>14}",
                "point", "eq1", "eq2", "eq3", "eq4"
            );
            for j in &jets {
                let r = residuals(j);
                worst = worst.max(r.max_abs());
                println!(
                    "{:<44}  {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}",
                    point_label(j),
                    r.0[0],
                    r.0[1],
                    r.0[2],
                    r.0[3]
                );
                rows.push(csv_row(&j.base_point, &r.0));
            }
            println!("max |residual| = {worst:.12e}");
            if let Some(path) = &csv {
                io::write_csv(path, &["x0", "x1", "x2", "x3", "eq1", "eq2", "eq3", "eq4"], &rows)?;
                println!("table written to {path}");
            }
            if expect_zero && worst > tol {
                println!("TOLERANCE VIOLATED: {worst:.6e} > {tol:.1e}");
                return Ok(false);
            }
            Ok(true)
        }

        Cmd::CCheck {
            fixture,
            jet,
            point,
            points,
            seed,
            expect_zero,
            tol,
            csv,
        } => {
            let jets = collect_jets(&fixture, &jet, &point, points, seed, false)?;
            let mut worst = 0.0f64;
            let mut rows = Vec::new();
            println!(
                "{:<44}  {:>14} {:>14} {:>14} {:>14}",
                "point", "c-eq1", "c-eq2", "c-eq3", "c-eq4"
            );
            for j in &jets {
                let e = c_equations(&structure_constants(j));
                worst = worst.max(e.iter().fold(0.0f64, |a, x| a.max(x.abs())));
                println!(
                    "{:<44}  {:>14.6e} {:>14.6e} {:>14.6e} {:>14.6e}",
                    point_label(j),
                    e[0],
                    e[1],
                    e[2],
                    e[3]
                );
                rows.push(csv_row(&j.base_point, &e));
            }
            println!("max |c-equation| = {worst:.12e}");
            if let Some(path) = &csv {
                io::write_csv(path, &["x0", "x1", "x2", "x3", "ceq1", "ceq2", "ceq3", "ceq4"], &rows)?;
                println!("table written to {path}");
            }
            if expect_zero && worst > tol {
                println!("TOLERANCE VIOLATED: {worst:.6e} > {tol:.1e}");
                return Ok(false);
            }
            Ok(true)
        }

        Cmd::Bridge {
            fixture,
            jet,
            point,
            points,
            seed,
            expect_zero,
            tol,
            csv,
        } => {
            let jets = collect_jets(&fixture, &jet, &point, points, seed, false)?;
            let mut worst = 0.0f64;
            let mut rows = Vec::new();
            println!(
                "{:<44}  {:>16} {:>16}",
                "point", "spencer norm", "residual norm"
            );
            for j in &jets {
                let b = spencer_bridge(j).context("bridge")?;
                worst = worst.max(b.spencer_norm).max(b.residual_norm);
                println!(
                    "{:<44}  {:>16.6e} {:>16.6e}",
                    point_label(j),
                    b.spencer_norm,
                    b.residual_norm
                );
                rows.push(csv_row(&j.base_point, &[b.spencer_norm, b.residual_norm]));
            }
            println!("max norm = {worst:.12e}");
            if let Some(path) = &csv {
                io::write_csv(path, &["x0", "x1", "x2", "x3", "spencer", "residual"], &rows)?;
                println!("table written to {path}");
            }
            if expect_zero && worst > tol {
                println!("TOLERANCE VIOLATED: {worst:.6e} > {tol:.1e}");
                return Ok(false);
            }
            Ok(true)
        }

        Cmd::Symbol { values, xi } => {
            let values = io::parse_reals::<4>(&values)?;
            let xi = io::parse_reals::<4>(&xi)?;
            let sigma = principal_symbol(values, xi);
            let det = sigma.determinant();
            let cubic = xi_cubic(values, xi);
            let disc = cubic.discriminant();
            let norm = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
            println!("symbol matrix        {}", serde_json::to_string(&sigma)?);
            println!("det sigma            {det:.12e}");
            println!("paired cubic         {}", serde_json::to_string(&cubic.p)?);
            println!("discriminant         {disc:.12e}");
            if disc.abs() > 1e-12 {
                println!("det/disc ratio       {:.12e}", det / disc);
            }
            // Scale-free test on the unit sphere: both quantities are
            // quartic in the covector.
            let characteristic = norm > 0.0 && (disc / norm.powi(4)).abs() <= 1e-9;
            println!(
                "characteristic       {}",
                if characteristic {
                    "yes (characteristic covector)"
                } else {
                    "no"
                }
            );
            Ok(true)
        }

        Cmd::LaxCheck {
            fixture,
            points,
            seed,
            cap,
            expect_zero,
            tol,
            csv,
        } => {
            let fx = io::parse_fixture(&fixture)?;
            println!(
                "# fixture {} sampled at {points} points with seed {seed}",
                fx.name()
            );
            let mut rng = sampling::rng(seed);
            let mut worst = 0.0f64;
            let mut rows = Vec::new();
            println!("{:<44}  {:>16}", "point", "max |[L0,L1]|");
            for _ in 0..points {
                let p = sampling::point_in_cube(&mut rng, 1.0);
                let jet = fx.jet(p);
                let comm = commutator_from_jet(&jet, cap).max_abs_coeff();
                worst = worst.max(comm);
                println!("{:<44}  {:>16.6e}", point_label(&jet), comm);
                rows.push(csv_row(&p, &[comm]));
            }
            println!("max commutator coefficient = {worst:.12e}");
            if let Some(path) = &csv {
                io::write_csv(path, &["x0", "x1", "x2", "x3", "commutator"], &rows)?;
                println!("table written to {path}");
            }
            if expect_zero && worst > tol {
                println!("TOLERANCE VIOLATED: {worst:.6e} > {tol:.1e}");
                return Ok(false);
            }
            Ok(true)
        }

        Cmd::SurfaceTrace {
            fixture,
            start,
            times,
            step,
            out,
        } => {
            let fx = io::parse_fixture(&fixture)?;
            let s = io::parse_reals::<5>(&start)?;
            let t = io::parse_reals::<2>(&times)?;
            let start_state = ([s[0], s[1], s[2], s[3]], s[4]);
            let trace = flow_trace(&fx, start_state, (t[0], t[1]), step).context("flow")?;
            println!(
                "forward endpoint     {}",
                serde_json::to_string(&trace.forward)?
            );
            println!(
                "reversed endpoint    {}",
                serde_json::to_string(&trace.reversed)?
            );
            println!("discrepancy          {:.12e}", trace.discrepancy);
            let rows = trace_polyline(&fx, start_state, (t[0], t[1]), step)?;
            match out {
                Some(path) => {
                    io::write_json(&path, &rows)?;
                    println!("polyline ({} rows) written to {path}", rows.len());
                }
                None => println!("{}", serde_json::to_string(&rows)?),
            }
            Ok(true)
        }

        Cmd::TaylorSolve {
            order,
            seed_file,
            tol,
            out,
        } => {
            let text = io::read_spec_arg(&seed_file)?;
            let seed: Seed = serde_json::from_str(&text).context("parsing seed JSON")?;
            let (sol, report) = prolong(&seed, order, tol).context("prolongation")?;
            println!(
                "seed residual        {}",
                serde_json::to_string(&report.seed_residual)?
            );
            println!(
                "{:>6} {:>9} {:>12} {:>6} {:>14}",
                "degree", "unknowns", "independent", "dof", "residual"
            );
            for o in &report.orders {
                println!(
                    "{:>6} {:>9} {:>12} {:>6} {:>14.6e}",
                    o.degree, o.unknowns, o.independent, o.dof, o.residual_after
                );
            }
            println!(
                "verified residual through order {} = {:.12e}",
                order - 1,
                verify_series(&sol)
            );
            if let Some(path) = out {
                io::write_json(&path, &io::SeriesDto::from_solution(&sol))?;
                println!("series written to {path}");
            }
            Ok(true)
        }

        Cmd::Fixture { spec, point } => {
            let fx = io::parse_fixture(&spec)?;
            println!("{}", serde_json::to_string(&fx)?);
            if let Some(p) = point {
                let p = io::parse_reals::<4>(&p)?;
                let jet = fx.jet(p);
                println!("{}", serde_json::to_string_pretty(&jet)?);
            }
            Ok(true)
        }

        Cmd::Acceptance { seed, json, csv } => {
            println!("# acceptance suite, seed {seed}");
            let reports = acceptance::run_all(seed);
            for r in &reports {
                println!("{}", r.summary_line());
                for p in &r.parts {
                    println!(
                        "    {:<36} {:>12.4e} <= {:>9.1e}  {}",
                        p.label,
                        p.value,
                        p.tol,
                        if p.pass() { "ok" } else { "VIOLATED" }
                    );
                }
            }
            let all = reports.iter().all(|r| r.pass());
            println!("overall: {}", if all { "PASS" } else { "FAIL" });
            if let Some(path) = &csv {
                let rows: Vec<Vec<String>> = reports
                    .iter()
                    .flat_map(|r| {
                        r.parts.iter().map(|p| {
                            vec![
                                r.id.to_string(),
                                r.name.to_string(),
                                p.label.clone(),
                                format!("{:.12e}", p.value),
                                format!("{:.3e}", p.tol),
                                p.pass().to_string(),
                            ]
                        })
                    })
                    .collect();
                io::write_csv(path, &["criterion", "name", "part", "value", "tol", "pass"], &rows)?;
                println!("table written to {path}");
            }
            if let Some(path) = json {
                #[derive(Serialize)]
                struct PartDto {
                    label: String,
                    value: f64,
                    tol: f64,
                    pass: bool,
                }
                #[derive(Serialize)]
                struct CriterionDto {
                    id: usize,
                    name: String,
                    pass: bool,
                    elapsed_s: f64,
                    parts: Vec<PartDto>,
                }
                #[derive(Serialize)]
                struct ReportDto {
                    seed: u64,
                    all_pass: bool,
                    criteria: Vec<CriterionDto>,
                }
                let dto = ReportDto {
                    seed,
                    all_pass: all,
                    criteria: reports
                        .iter()
                        .map(|r| CriterionDto {
                            id: r.id,
                            name: r.name.to_string(),
                            pass: r.pass(),
                            elapsed_s: r.elapsed_s,
                            parts: r
                                .parts
                                .iter()
                                .map(|p| PartDto {
                                    label: p.label.clone(),
                                    value: p.value,
                                    tol: p.tol,
                                    pass: p.pass(),
                                })
                                .collect(),
                        })
                        .collect(),
                };
                io::write_json(&path, &dto)?;
                println!("report written to {path}");
            }
            Ok(all)
        }
    }
}
