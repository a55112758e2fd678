//! `heun` command-line front end. [`run`] is the whole program; `main` only
//! wires it to the process streams.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure.

mod args;

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use clap::Parser;
use heun_core::connection::connection_matrix;
use heun_core::continuation::{
    continue_with_report, monodromy_with_report, ContinuationOptions, ContinuationPath, StatePair, DEFAULT_MAX_STEPS,
};
use heun_core::frobenius::{local_series, Branch, FrobeniusSolution, SingularPoint, DEFAULT_TERMS, DISC_FRACTION};
use heun_core::oracles::{leaver_continued_fraction, leaver_qnm};
use heun_core::spectral::{find_modes_with, ModeSearch, RWProblem, Region, SearchOptions, Surface};
use heun_core::{ConfluentParams, EquationParams, HeunError, HeunParams, Mat2, C64};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

pub use args::{parse_complex, Cli, Command, Format};
use args::{ConfluentArgs, EitherArgs, EvalArgs, GeneralArgs, QnmArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

const TOL_RANGE: (f64, f64) = (1e-14, 1e-3);
const LEAVER_DEPTH: usize = 300;
/// Direction of the default monodromy base point from the expansion point.
const LOOP_BASE_DIR: C64 = C64::new(0.6, 0.8);

#[derive(Debug)]
enum Failure {
    Input(String),
    Heun(HeunError),
}

impl From<HeunError> for Failure {
    fn from(e: HeunError) -> Self {
        Failure::Heun(e)
    }
}

type Out<T> = std::result::Result<T, Failure>;

/// Results in both output formats.
struct Report {
    json: Value,
    csv: String,
}

/// Parses `args` (including the program name), runs the command, writes the
/// result to `out` and diagnostics to `err`, and returns the exit code.
pub fn run<W: Write, E: Write>(args: &[String], out: &mut W, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return if e.use_stderr() {
                let _ = write!(err, "{e}");
                EXIT_INPUT
            } else {
                let _ = write!(out, "{e}");
                EXIT_OK
            };
        }
    };
    match execute(&cli, err) {
        Ok(r) => {
            let text = match cli.format {
                Format::Json => serde_json::to_string_pretty(&r.json).unwrap() + "\n",
                Format::Csv => r.csv,
            };
            if out.write_all(text.as_bytes()).and_then(|_| out.flush()).is_err() {
                let _ = writeln!(err, "error [cli]: could not write output");
                return EXIT_NUMERICAL;
            }
            EXIT_OK
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(err, "error [input]: {msg}");
            EXIT_INPUT
        }
        Err(Failure::Heun(e)) => {
            let _ = writeln!(err, "error [{}]: {e}", e.module());
            if e.is_input_error() {
                EXIT_INPUT
            } else {
                EXIT_NUMERICAL
            }
        }
    }
}

fn execute<E: Write>(cli: &Cli, err: &mut E) -> Out<Report> {
    let tol = cli.tol;
    if !(tol >= TOL_RANGE.0 && tol <= TOL_RANGE.1) {
        return Err(Failure::Input(format!("--tol {tol} outside [{:e}, {:e}]", TOL_RANGE.0, TOL_RANGE.1)));
    }
    let opts = ContinuationOptions::new(tol).with_max_steps(max_steps()?);
    match &cli.command {
        Command::Eval { params, target } => {
            let p = general_params(params)?;
            eval(&EquationParams::General(p), target, &opts, "eval", err)
        }
        Command::Ceval { params, target } => {
            let p = confluent_params(params)?;
            eval(&EquationParams::Confluent(p), target, &opts, "ceval", err)
        }
        Command::Connect { params, from, to, path, clearance } => {
            let eq = either_params(params)?;
            connect(&eq, *from, *to, path.as_deref(), *clearance, tol, err)
        }
        Command::Monodromy { params, around, basis, base, path, clearance } => {
            let eq = either_params(params)?;
            monodromy(&eq, *around, basis.unwrap_or(*around), *base, path.as_deref(), *clearance, &opts, err)
        }
        Command::Qnm(q) => qnm(q, tol, opts.max_steps, err),
    }
}

fn max_steps() -> Out<usize> {
    match std::env::var("HEUN_MAX_STEPS") {
        Err(_) => Ok(DEFAULT_MAX_STEPS),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Failure::Input(format!("HEUN_MAX_STEPS must be a positive integer, got `{v}`"))),
        },
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Out<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn need(v: Option<C64>, name: &str) -> Out<C64> {
    v.ok_or_else(|| Failure::Input(format!("missing --{name} (or pass --params FILE)")))
}

fn general_params(a: &GeneralArgs) -> Out<HeunParams> {
    if let Some(f) = &a.params {
        return read_json(f);
    }
    Ok(HeunParams::new(
        need(a.a, "a")?,
        need(a.q, "q")?,
        need(a.alpha, "alpha")?,
        need(a.beta, "beta")?,
        need(a.gamma, "gamma")?,
        need(a.epsilon, "epsilon")?,
    )?)
}

fn confluent_params(a: &ConfluentArgs) -> Out<ConfluentParams> {
    if let Some(f) = &a.params {
        return read_json(f);
    }
    Ok(ConfluentParams::new(
        need(a.alpha, "alpha")?,
        need(a.beta, "beta")?,
        need(a.gamma, "gamma")?,
        need(a.mu, "mu")?,
        need(a.nu, "nu")?,
    )?)
}

fn either_params(a: &EitherArgs) -> Out<EquationParams> {
    if let Some(f) = &a.params {
        return read_json(f);
    }
    if a.mu.is_some() || a.nu.is_some() {
        return Ok(EquationParams::Confluent(confluent_params(&ConfluentArgs {
            params: None,
            alpha: a.alpha,
            beta: a.beta,
            gamma: a.gamma,
            mu: a.mu,
            nu: a.nu,
        })?));
    }
    Ok(EquationParams::General(general_params(&GeneralArgs {
        params: None,
        a: a.a,
        q: a.q,
        alpha: a.alpha,
        beta: a.beta,
        gamma: a.gamma,
        epsilon: a.epsilon,
    })?))
}

/// Shortest round-trip text; scientific notation away from unit scale.
fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn cjson(z: C64) -> Value {
    json!([z.re, z.im])
}

fn params_json(eq: &EquationParams) -> Value {
    serde_json::to_value(eq).unwrap()
}

fn class(eq: &EquationParams) -> &'static str {
    match eq {
        EquationParams::General(_) => "general",
        EquationParams::Confluent(_) => "confluent",
    }
}

fn inside_disc(sol: &FrobeniusSolution, z: C64) -> bool {
    (z - sol.expansion_point()).norm() <= DISC_FRACTION * sol.radius()
}

fn eval<E: Write>(eq: &EquationParams, t: &EvalArgs, opts: &ContinuationOptions, name: &str, err: &mut E) -> Out<Report> {
    let sol = local_series(eq, t.point, t.branch, DEFAULT_TERMS)?;
    let given = match &t.path {
        Some(f) => {
            let p: ContinuationPath = read_json(f)?;
            if t.z.iter().any(|z| *z != p.end()) {
                return Err(Failure::Input("with --path the value is reported at the path end; drop --z or make it match".into()));
            }
            Some(p)
        }
        None if t.z.is_empty() => return Err(Failure::Input("give at least one --z or a --path".into())),
        None => None,
    };
    let targets: Vec<C64> = match &given {
        Some(p) => vec![p.end()],
        None => t.z.clone(),
    };
    let mut rows = Vec::new();
    let mut csv = String::from("z_re,z_im,value_re,value_im,derivative_re,derivative_im,est_error,method\n");
    for z in targets {
        let row = if given.is_none() && inside_disc(&sol, z) {
            let e = sol.eval_series(z, opts.tol)?;
            csv_row(&mut csv, &[z.re, z.im, e.value.re, e.value.im, e.derivative.re, e.derivative.im, e.est_error], "series");
            json!({
                "z": cjson(z), "value": cjson(e.value), "derivative": cjson(e.derivative),
                "est_error": e.est_error, "method": "series", "n_terms": e.n_terms_used,
            })
        } else {
            let path = match &given {
                Some(p) => p.clone(),
                None => {
                    let seed = sol.seed_point(0.5, z - sol.expansion_point());
                    let p = ContinuationPath::straight(eq, seed, z, t.clearance)?;
                    let _ = writeln!(
                        err,
                        "note [continuation]: default path from {seed} to {z} ({} waypoints); singular points are passed on the upper-half-plane side",
                        p.waypoints().len()
                    );
                    p
                }
            };
            if !inside_disc(&sol, path.start()) {
                return Err(Failure::Heun(HeunError::OutsideDisc {
                    distance: (path.start() - sol.expansion_point()).norm(),
                    cap: DISC_FRACTION * sol.radius(),
                }));
            }
            let seed = sol.eval_series(path.start(), opts.tol)?;
            let start = StatePair::new(path.start(), seed.value, seed.derivative);
            let (end, rep) = continue_with_report(eq, start, &path, opts)?;
            let est = seed.est_error + rep.err_estimate * (1.0 + end.magnitude());
            csv_row(&mut csv, &[z.re, z.im, end.h.re, end.h.im, end.hp.re, end.hp.im, est], "continuation");
            json!({
                "z": cjson(z), "value": cjson(end.h), "derivative": cjson(end.hp),
                "est_error": est, "method": "continuation", "steps": rep.steps, "rejected": rep.rejected,
                "path": serde_json::to_value(&path).unwrap(),
            })
        };
        rows.push(row);
    }
    Ok(Report {
        json: json!({
            "command": name, "equation": class(eq), "params": params_json(eq),
            "point": t.point, "branch": t.branch, "exponent": cjson(sol.exponent()), "tol": opts.tol,
            "results": rows,
        }),
        csv,
    })
}

fn csv_row(out: &mut String, values: &[f64], tail: &str) {
    let cells: Vec<String> = values.iter().map(|v| num(*v)).collect();
    let _ = writeln!(out, "{},{tail}", cells.join(","));
}

fn matrix_csv(m: &Mat2) -> String {
    let mut s = String::from("row,col,re,im\n");
    for (i, r) in m.0.iter().enumerate() {
        for (j, v) in r.iter().enumerate() {
            let _ = writeln!(s, "{i},{j},{},{}", num(v.re), num(v.im));
        }
    }
    s
}

fn connect<E: Write>(
    eq: &EquationParams,
    from: SingularPoint,
    to: SingularPoint,
    path: Option<&Path>,
    clearance: f64,
    tol: f64,
    err: &mut E,
) -> Out<Report> {
    let path = match path {
        Some(f) => read_json(f)?,
        None => {
            let a = local_series(eq, from, Branch::First, 2)?;
            let b = local_series(eq, to, Branch::First, 2)?;
            let (za, zb) = (a.expansion_point(), b.expansion_point());
            if za == zb {
                return Err(Failure::Input("--from and --to name the same point; pass a --path".into()));
            }
            let p = ContinuationPath::straight(eq, a.seed_point(0.5, zb - za), b.seed_point(0.5, za - zb), clearance)?;
            let _ = writeln!(
                err,
                "note [connection]: default path {} -> {} ({} waypoints); singular points are passed on the upper-half-plane side",
                p.start(),
                p.end(),
                p.waypoints().len()
            );
            p
        }
    };
    let cm = connection_matrix(eq, from, to, &path, tol)?;
    let mismatch = (cm.matrix.det() - cm.abel_det).norm();
    Ok(Report {
        csv: matrix_csv(&cm.matrix),
        json: json!({
            "command": "connect", "equation": class(eq), "params": params_json(eq), "tol": tol,
            "connection": serde_json::to_value(&cm).unwrap(), "abel_mismatch": mismatch,
        }),
    })
}

#[allow(clippy::too_many_arguments)]
fn monodromy<E: Write>(
    eq: &EquationParams,
    around: SingularPoint,
    basis_at: SingularPoint,
    base: Option<C64>,
    path: Option<&Path>,
    clearance: f64,
    opts: &ContinuationOptions,
    err: &mut E,
) -> Out<Report> {
    let basis = [
        local_series(eq, basis_at, Branch::First, DEFAULT_TERMS)?,
        local_series(eq, basis_at, Branch::Second, DEFAULT_TERMS)?,
    ];
    let centre = local_series(eq, around, Branch::First, 2)?.expansion_point();
    let lp = match path {
        Some(f) => read_json(f)?,
        None => {
            let z0 = basis[0].expansion_point();
            let dir = if around == basis_at { LOOP_BASE_DIR } else { centre - z0 };
            let base = base.unwrap_or_else(|| basis[0].seed_point(0.5, dir));
            let p = ContinuationPath::loop_around(eq, base, centre, clearance)?;
            let _ = writeln!(err, "note [continuation]: counter-clockwise loop around {centre} based at {base}");
            p
        }
    };
    let m = monodromy_with_report(eq, &basis, &lp, opts)?;
    let ev = m.matrix.eigenvalues();
    Ok(Report {
        csv: matrix_csv(&m.matrix),
        json: json!({
            "command": "monodromy", "equation": class(eq), "params": params_json(eq), "tol": opts.tol,
            "around": around, "basis": basis_at, "loop": serde_json::to_value(&lp).unwrap(),
            "monodromy": serde_json::to_value(m).unwrap(),
            "eigenvalues": [cjson(ev[0]), cjson(ev[1])],
            "exponents": [cjson(basis[0].exponent()), cjson(basis[1].exponent())],
        }),
    })
}

fn mode_csv(p: &RWProblem, rows: &[(usize, C64, f64)]) -> String {
    let mut s = String::from("ell,s,rho_re,rho_im,n,omega_re,omega_im,residual\n");
    for (n, w, r) in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{n},{},{},{}",
            p.ell(),
            p.s(),
            num(p.rho().re),
            num(p.rho().im),
            num(w.re),
            num(w.im),
            num(*r)
        );
    }
    s
}

fn qnm<E: Write>(q: &QnmArgs, tol: f64, max_steps: usize, err: &mut E) -> Out<Report> {
    let surface = q.r_surface.map_or(Surface::Horizon, Surface::Radius);
    let prob = RWProblem::new(q.mass, q.ell, q.s, q.rho, surface)?;
    if q.oracle.is_some() {
        if prob.rho() != C64::new(0.0, 0.0) || surface != Surface::Horizon {
            return Err(Failure::Input("the Leaver oracle covers the black-hole case only (rho = 0, no surface)".into()));
        }
        let mut rows = Vec::new();
        for n in 0..q.overtones {
            let w = leaver_qnm(q.mass, q.ell, q.s, n, LEAVER_DEPTH)?;
            let r = leaver_continued_fraction(2.0 * q.mass * w, q.ell, q.s, n, LEAVER_DEPTH).norm();
            rows.push((n, w, r));
        }
        let modes: Vec<Value> = rows.iter().map(|(n, w, r)| json!({"n": n, "omega": cjson(*w), "residual": r})).collect();
        return Ok(Report {
            csv: mode_csv(&prob, &rows),
            json: json!({"command": "qnm", "method": "leaver", "problem": prob, "depth": LEAVER_DEPTH, "modes": modes}),
        });
    }
    let region: Region = q
        .region
        .as_deref()
        .ok_or_else(|| Failure::Input("--region is required".into()))?
        .parse()?;
    let grid = args::parse_grid(&q.grid).map_err(Failure::Input)?;
    if !(q.root_tol > 0.0 && q.root_tol.is_finite()) {
        return Err(Failure::Input(format!("--root-tol must be positive, got {}", q.root_tol)));
    }
    let mut opts = SearchOptions::new(q.root_tol);
    opts.cont_tol = Some(tol);
    opts.matching.z_match = q.z_match;
    opts.matching.max_steps = max_steps;
    let search = find_modes_with(&prob, region, grid, &opts)?;
    if let Some(f) = &q.emit_grid {
        std::fs::write(f, grid_csv(&search)).map_err(|e| Failure::Input(format!("{}: {e}", f.display())))?;
    }
    let d = &search.diagnostics;
    if search.modes.is_empty() {
        let _ = writeln!(err, "note [spectral]: {}", HeunError::NoRootsFound);
    }
    if d.winding_number.is_some_and(|w| w != search.modes.len() as i64) {
        let _ = writeln!(
            err,
            "warning [spectral]: winding number {} but {} modes returned; refine the grid",
            d.winding_number.unwrap(),
            search.modes.len()
        );
    }
    if d.nonconverged > 0 {
        let _ = writeln!(err, "note [spectral]: {} of {} seeds did not converge", d.nonconverged, d.seeds);
    }
    let rows: Vec<(usize, C64, f64)> = search.modes.iter().map(|m| (m.overtone_hint, m.omega, m.residual)).collect();
    Ok(Report {
        csv: mode_csv(&prob, &rows),
        json: json!({
            "command": "qnm", "method": "heun", "problem": prob, "region": region, "tol": tol, "root_tol": q.root_tol,
            "modes": search.modes, "diagnostics": search.diagnostics,
        }),
    })
}

fn grid_csv(s: &ModeSearch) -> String {
    let mut out = String::from("omega_re,omega_im,abs_d\n");
    for (j, row) in s.grid.abs_d.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", num(s.grid.re[i]), num(s.grid.im[j]), num(*v));
        }
    }
    out
}
