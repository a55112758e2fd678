use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use heun_core::frobenius::{Branch, SingularPoint};
use heun_core::C64;

#[derive(Parser, Debug)]
#[command(name = "heun", version, about = "Heun and confluent Heun functions from the command line")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Solver tolerance, between 1e-14 and 1e-3.
    #[arg(long, default_value_t = 1e-12, global = true)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a local solution of the general Heun equation.
    Eval {
        #[command(flatten)]
        params: GeneralArgs,
        #[command(flatten)]
        target: EvalArgs,
    },
    /// Evaluate a local solution of the confluent Heun equation.
    Ceval {
        #[command(flatten)]
        params: ConfluentArgs,
        #[command(flatten)]
        target: EvalArgs,
    },
    /// Connection matrix between the Frobenius bases at two singular points.
    Connect {
        #[command(flatten)]
        params: EitherArgs,
        #[arg(long, value_parser = parse_point)]
        from: SingularPoint,
        #[arg(long, value_parser = parse_point)]
        to: SingularPoint,
        /// Path JSON file: {"waypoints": [[re, im], ...], "clearance": c}.
        #[arg(long)]
        path: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        clearance: f64,
    },
    /// Monodromy matrix of a Frobenius basis around a singular point.
    Monodromy {
        #[command(flatten)]
        params: EitherArgs,
        /// Singular point encircled by the loop.
        #[arg(long, value_parser = parse_point)]
        around: SingularPoint,
        /// Point whose Frobenius basis is used (defaults to --around).
        #[arg(long, value_parser = parse_point)]
        basis: Option<SingularPoint>,
        /// Base point of the loop, `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        base: Option<C64>,
        /// Closed loop as a path JSON file.
        #[arg(long)]
        path: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        clearance: f64,
    },
    /// Schwarzschild quasinormal modes with an optional reflecting surface.
    Qnm(QnmArgs),
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Evaluation point(s), `re,im`; repeat for a table.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Vec<C64>,
    /// Singular point the local solution belongs to: 0, 1 or a.
    #[arg(long, value_parser = parse_point, default_value = "0")]
    pub point: SingularPoint,
    #[arg(long, value_parser = parse_branch, default_value = "first")]
    pub branch: Branch,
    /// Continuation path JSON file; the value is reported at its end point.
    #[arg(long)]
    pub path: Option<PathBuf>,
    /// Clearance of the default path from singular points.
    #[arg(long, default_value_t = 0.05)]
    pub clearance: f64,
}

#[derive(Args, Debug)]
pub struct GeneralArgs {
    /// Parameter JSON file (overrides the individual flags).
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub a: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub q: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub gamma: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub epsilon: Option<C64>,
}

#[derive(Args, Debug)]
pub struct ConfluentArgs {
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub gamma: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub mu: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub nu: Option<C64>,
}

/// Parameters of either class; `--mu`/`--nu` select the confluent equation.
#[derive(Args, Debug)]
pub struct EitherArgs {
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub a: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub q: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub beta: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub gamma: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub epsilon: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub mu: Option<C64>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub nu: Option<C64>,
}

#[derive(Args, Debug)]
pub struct QnmArgs {
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long)]
    pub ell: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub s: i32,
    /// Surface reflection coefficient, `re,im`.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
    pub rho: C64,
    /// Areal radius of the reflecting surface (default: at the horizon).
    #[arg(long)]
    pub r_surface: Option<f64>,
    /// Scan rectangle `re_min,re_max,im_min,im_max` in units of 1/M.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "oracle")]
    pub region: Option<String>,
    /// Scan grid `NXxNY`.
    #[arg(long, default_value = "16x16")]
    pub grid: String,
    /// Acceptance bound on |D| at a root.
    #[arg(long, default_value_t = 1e-9)]
    pub root_tol: f64,
    /// Matching point in z = r/2M.
    #[arg(long, default_value_t = 5.0)]
    pub z_match: f64,
    /// Write the |D| scan as CSV (omega_re,omega_im,abs_d) to this file.
    #[arg(long)]
    pub emit_grid: Option<PathBuf>,
    #[arg(long, default_value_t = 2, hide = true)]
    pub overtones: usize,
    #[arg(long, hide = true, value_parser = ["leaver"])]
    pub oracle: Option<String>,
}

pub fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
    let z = match parts[..] {
        [re] => C64::new(num(re)?, 0.0),
        [re, im] => C64::new(num(re)?, num(im)?),
        _ => return Err(format!("expected `re,im`, got `{s}`")),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(format!("non-finite value `{s}`"));
    }
    Ok(z)
}

fn parse_point(s: &str) -> Result<SingularPoint, String> {
    s.parse().map_err(|e: heun_core::HeunError| e.to_string())
}

fn parse_branch(s: &str) -> Result<Branch, String> {
    s.parse().map_err(|e: heun_core::HeunError| e.to_string())
}

pub fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X', ',']).ok_or_else(|| format!("grid `{s}` must look like 16x16"))?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("grid `{s}`: {e}"));
    Ok((n(a)?, n(b)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_syntax() {
        assert_eq!(parse_complex("1.5,-2").unwrap(), C64::new(1.5, -2.0));
        assert_eq!(parse_complex("3").unwrap(), C64::new(3.0, 0.0));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("nan,0").is_err());
        assert!(parse_complex("x").is_err());
    }

    #[test]
    fn grid_syntax() {
        assert_eq!(parse_grid("16x12").unwrap(), (16, 12));
        assert!(parse_grid("16").is_err());
    }
}
