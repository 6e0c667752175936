//! Command-line surface of the verification workbench.

use clap::{Parser, Subcommand};
use rotsym::catalog::{build_case, list_cases, Overrides, Verdict, VerificationCase};
use rotsym::dsl::profile_from_expr;
use rotsym::geometry::{f_bitension_excl, ConformalFactor, RotSymMap, WarpedSurface};
use rotsym::ode::{reduction_of_order_factor, solve_ivp, LinearODE2};
use rotsym::profile::Interval;
use rotsym::report::{
    compare_oracle, emit_report, sweep, Grid, ReportFormat, ResidualReport, DEFAULT_GRID_N,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rotsym", about = "Residual verification for rotationally symmetric maps between surfaces of revolution", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Catalog inspection
    Catalog {
        #[command(subcommand)]
        sub: CatalogCmd,
    },
    /// Run the residual sweep for one catalog case
    Verify {
        case: String,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_GRID_N)]
        grid_n: usize,
        #[arg(long)]
        exclusion: Option<f64>,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// parameter override key=value; repeatable
        #[arg(long = "set")]
        set: Vec<String>,
    },
    /// Run every catalog case plus oracle comparisons
    VerifyAll {
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Compare reduced formulas against the first-principles oracle
    Oracle { case: String },
    /// Build a conformal factor by reduction of order and verify it
    ConstructF {
        case: String,
        #[arg(long)]
        c1: f64,
        #[arg(long)]
        c2: f64,
        #[arg(long)]
        basepoint: Option<f64>,
    },
    /// Solve y'' + p(r) y' + q(r) y = 0 and print a dense-output table
    SolveOde {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long)]
        r0: f64,
        #[arg(long)]
        y0: f64,
        #[arg(long)]
        dy0: f64,
        #[arg(long)]
        to: f64,
    },
    /// Ad-hoc residual sweep for a map given by expressions
    Residual {
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        lambda: String,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        k: f64,
        #[arg(long)]
        f: Option<String>,
        #[arg(long)]
        lo: f64,
        #[arg(long)]
        hi: f64,
    },
    /// Emit r, rho, f, x, residual columns for external plotting
    Plot {
        case: String,
        #[arg(long)]
        csv: PathBuf,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// Table of case names, modes, and anchors
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}

fn verdict_line(rep: &ResidualReport, expected: Verdict) -> bool {
    let matched = rep.verdict == expected;
    println!(
        "{:<28} {:<22} sup {:.3e} (normalized {:.3e}) tol {:.1e} -> {:?} (expected {:?}){}",
        rep.case,
        rep.mode,
        rep.sup_raw,
        rep.sup_normalized,
        rep.tol,
        rep.verdict,
        expected,
        if matched { "" } else { "  MISMATCH" }
    );
    matched
}

fn shrunk(case: &VerificationCase, exclusion: Option<f64>) -> Vec<Interval> {
    match exclusion {
        None => case.working_intervals.clone(),
        Some(e) => case
            .working_intervals
            .iter()
            .filter_map(|iv| Interval::new(iv.lo + e, iv.hi - e).ok())
            .collect(),
    }
}

fn run(cli: Cli) -> rotsym::Result<ExitCode> {
    match cli.cmd {
        Cmd::Catalog { sub: CatalogCmd::List } => {
            println!("{:<28} {:<22} {:<10} anchor", "name", "mode", "expected");
            for c in list_cases() {
                println!(
                    "{:<28} {:<22} {:<10} {}",
                    c.name,
                    c.mode.to_string(),
                    format!("{:?}", c.expected).to_lowercase(),
                    c.anchor
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify {
            case,
            tol,
            grid_n,
            exclusion,
            json,
            csv,
            set,
        } => {
            let ov = Overrides::parse(&set)?;
            let c = build_case(&case, &ov)?;
            let intervals = shrunk(&c, exclusion);
            let mut grid = Grid::chebyshev(&intervals, grid_n);
            if let Some(e) = exclusion {
                grid.exclusion = e;
            }
            grid.excluded = c.factor.f.singularities().to_vec();
            let rep = sweep(&c, &grid, tol.unwrap_or(c.tol));
            let ok = verdict_line(&rep, c.expected);
            if let Some(p) = &json {
                emit_report(&rep, ReportFormat::Json, p)?;
            }
            if let Some(p) = &csv {
                emit_report(&rep, ReportFormat::Csv, p)?;
            }
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::VerifyAll { json } => {
            let mut all_ok = true;
            let mut reports = Vec::new();
            for c in list_cases() {
                let grid = Grid::for_case(&c, DEFAULT_GRID_N);
                let rep = sweep(&c, &grid, c.tol);
                all_ok &= verdict_line(&rep, c.expected);
                reports.push(rep);
                let thin = Grid::chebyshev(&c.working_intervals, 16);
                let orep = compare_oracle(&c, &thin)?;
                all_ok &= verdict_line(&orep, Verdict::Pass);
                reports.push(orep);
            }
            if let Some(p) = &json {
                let out = std::fs::File::create(p)?;
                serde_json::to_writer_pretty(out, &reports)?;
            }
            Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Oracle { case } => {
            let c = build_case(&case, &Overrides::default())?;
            let grid = Grid::chebyshev(&c.working_intervals, 32);
            let rep = compare_oracle(&c, &grid)?;
            let ok = verdict_line(&rep, Verdict::Pass);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::ConstructF {
            case,
            c1,
            c2,
            basepoint,
        } => {
            let c = build_case(&case, &Overrides::default())?;
            let span = Interval::of(
                c.working_intervals.first().unwrap().lo,
                c.working_intervals.last().unwrap().hi,
            );
            let bp = basepoint.unwrap_or(span.midpoint());
            let factor = reduction_of_order_factor(&c.map, c1, c2, span, bp)?;
            println!("constructed f on {:?} (basepoint {bp}):", (span.lo, span.hi));
            let mut sup = 0.0f64;
            for j in 0..16 {
                let r = span.lo + (j as f64 + 0.5) / 16.0 * (span.hi - span.lo);
                let fv = factor.f.value(r)?;
                let res = f_bitension_excl(&c.map, &factor, r, 0.0)
                    .map(|v| v.radial)
                    .unwrap_or(f64::NAN);
                if res.is_finite() {
                    sup = sup.max(res.abs());
                }
                println!("  r = {r:>10.6}   f = {fv:>14.8}   f-bitension = {res:+.3e}");
            }
            println!("sup |f-bitension| at printed points: {sup:.3e}");
            Ok(ExitCode::SUCCESS)
        }
        Cmd::SolveOde {
            p,
            q,
            r0,
            y0,
            dy0,
            to,
        } => {
            let (lo, hi) = if r0 < to { (r0, to) } else { (to, r0) };
            let dom = Interval::of(lo - 1e-9, hi + 1e-9);
            let sys = LinearODE2::new(
                profile_from_expr(&p, "r", dom, vec![])?,
                profile_from_expr(&q, "r", dom, vec![])?,
                dom,
            );
            let sol = solve_ivp(&sys, r0, y0, dy0, Interval::of(lo, hi))?;
            println!("{:>12}  {:>18}  {:>18}", "r", "y", "y'");
            for j in 0..=32 {
                let r = lo + j as f64 / 32.0 * (hi - lo);
                let (y, dy) = sol.value_pair(r)?;
                println!("{r:>12.6}  {y:>18.12}  {dy:>18.12}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Residual {
            sigma,
            lambda,
            rho,
            k,
            f,
            lo,
            hi,
        } => {
            let dom = Interval::of(lo, hi);
            let tdom = Interval::of(-1e9, 1e9);
            let map = RotSymMap {
                source: WarpedSurface::new(dom, profile_from_expr(&sigma, "r", dom, vec![])?, "ad-hoc source"),
                target: WarpedSurface::new(tdom, profile_from_expr(&lambda, "rho", tdom, vec![])?, "ad-hoc target"),
                rho: profile_from_expr(&rho, "r", dom, vec![])?,
                k,
            };
            let (mode, factor) = match &f {
                Some(expr) => (
                    rotsym::catalog::Mode::FBiharmonic,
                    ConformalFactor::positive(profile_from_expr(expr, "r", dom, vec![])?),
                ),
                None => (rotsym::catalog::Mode::Biharmonic, ConformalFactor::one(dom)),
            };
            let shrink = 1e-6 * (hi - lo);
            let working = Interval::of(lo + shrink, hi - shrink);
            let case = VerificationCase {
                name: "ad-hoc".into(),
                map,
                factor,
                mode,
                expected: Verdict::Pass,
                working_intervals: vec![working],
                anchor: format!("sigma={sigma} lambda={lambda} rho={rho} k={k} f={f:?}"),
                tol: 1e-8,
                beta: None,
            };
            let grid = Grid::chebyshev(&[working], DEFAULT_GRID_N);
            let rep = sweep(&case, &grid, case.tol);
            let ok = verdict_line(&rep, Verdict::Pass);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Cmd::Plot { case, csv } => {
            let c = build_case(&case, &Overrides::default())?;
            let grid = Grid::for_case(&c, DEFAULT_GRID_N);
            let rep = sweep(&c, &grid, c.tol);
            emit_report(&rep, ReportFormat::Csv, &csv)?;
            println!("wrote {} rows to {}", rep.samples.len(), csv.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
