//! Command-line front end.

use crate::error::ZError;
use crate::funcspace::{battery_fn, battery_names, LogGrid};
use crate::operators::parse_sexpr;
use crate::verify::{check_op, run_all, CheckReport, VerifyConfig};
use crate::zeta_xi::{equisym_roots, find_critical_zeros, weil_sum, xi, HeatVariant, XiEngine, ZeroList};
use crate::{c, C64};
use clap::{Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Direct,
    Integral,
    Ibp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Plain,
    Tilde,
}

#[derive(Parser, Debug)]
#[command(name = "zetaops", version, about = "Zeta operator workbench: Xi engines, zeros, identity checks")]
pub struct Cli {
    /// Flat `key = value` configuration file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Quadrature accuracy target.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Evaluate Xi(s) = pi^{-s/2} Gamma(s/2) zeta(s).
    Xi {
        /// Argument as `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: C64,
        #[arg(long, value_enum, default_value = "direct")]
        engine: EngineArg,
        /// Integration-by-parts order for the ibp engine.
        #[arg(long, default_value_t = 0)]
        n: usize,
    },
    /// Ordinates of zeros on the critical line up to t_max, as CSV.
    Zeros {
        #[arg(long = "t-max")]
        t_max: f64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the identity-check suite and print the reports.
    Check {
        /// Glob on check names; repeatable.
        #[arg(long)]
        filter: Vec<String>,
        /// Check the adjoint rule of an operator expression instead.
        #[arg(long)]
        op: Option<String>,
        /// Perturb the involution exponent (fault injection).
        #[arg(long = "tau-shift", allow_hyphen_values = true)]
        tau_shift: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Roots of the heat-flow symmetry defect against the predicted lattice, as CSV.
    Heat {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        #[arg(long = "k-max")]
        k_max: usize,
        #[arg(long, value_enum, default_value = "plain")]
        variant: VariantArg,
    },
    /// Weil sum of a battery function over zeros read from CSV.
    Weil {
        #[arg(long)]
        function: String,
        #[arg(long)]
        zeros: PathBuf,
    },
}

fn parse_complex(s: &str) -> std::result::Result<C64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |p: &str| p.trim().parse::<f64>().map_err(|_| format!("'{}' is not a number", p));
    match parts.as_slice() {
        [re] => Ok(c(num(re)?, 0.0)),
        [re, im] => Ok(c(num(re)?, num(im)?)),
        _ => Err(format!("expected re,im, got '{}'", s)),
    }
}

/// Settings merged from defaults, the config file and flags.
#[derive(Clone, Debug, PartialEq)]
pub struct CliConfig {
    pub grid_l: f64,
    pub n_points: usize,
    pub eps: f64,
    pub zero_tol: f64,
    pub t_max_cap: f64,
    pub format: OutputFormat,
    pub seed: u64,
    pub verify: VerifyConfig,
}

impl Default for CliConfig {
    fn default() -> Self {
        let v = VerifyConfig::default();
        CliConfig {
            grid_l: v.grid.x_max,
            n_points: v.grid.n_points,
            eps: v.eps,
            zero_tol: 1e-10,
            t_max_cap: crate::zeta_xi::ENVELOPE,
            format: OutputFormat::Json,
            seed: v.seed,
            verify: v,
        }
    }
}

/// Problems with the invocation rather than the computation.
#[derive(Debug)]
pub struct UsageError(pub String);

impl CliConfig {
    pub fn from_str(text: &str) -> std::result::Result<Self, UsageError> {
        let mut cfg = CliConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| UsageError(format!("line {}: expected key = value", i + 1)))?;
            cfg.set(k.trim(), v.trim()).map_err(|e| UsageError(format!("line {}: {}", i + 1, e)))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, val: &str) -> std::result::Result<(), String> {
        let f = || val.parse::<f64>().map_err(|_| format!("{} = '{}' is not a number", key, val));
        let t = &mut self.verify.tol;
        match key {
            "grid_l" => self.grid_l = f()?,
            "n_points" => self.n_points = val.parse().map_err(|_| format!("n_points = '{}'", val))?,
            "eps" => self.eps = f()?,
            "zero_tol" => self.zero_tol = f()?,
            "t_max_cap" => self.t_max_cap = f()?,
            "seed" => self.seed = val.parse().map_err(|_| format!("seed = '{}'", val))?,
            "format" => {
                self.format = match val {
                    "json" => OutputFormat::Json,
                    "csv" => OutputFormat::Csv,
                    _ => return Err(format!("format = '{}' (json or csv)", val)),
                }
            }
            "tau_shift" => self.verify.tau_shift = f()?,
            "hbars" => {
                self.verify.hbars =
                    val.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| format!("hbars entry '{}'", p))).collect::<Result<_, _>>()?
            }
            "tol_adjoint" => t.adjoint = f()?,
            "tol_commute" => t.commute = f()?,
            "tol_psc" => t.psc = f()?,
            "tol_polyi" => t.polyi = f()?,
            "tol_iteration" => t.iteration = f()?,
            "tol_funci" => t.funci = f()?,
            "tol_rota_baxter" => t.rota_baxter = f()?,
            "tol_cohomology" => t.cohomology = f()?,
            "tol_orthogonality" => t.orthogonality = f()?,
            "tol_variance" => t.variance = f()?,
            "tol_mellin" => t.mellin = f()?,
            "tol_xi" => t.xi = f()?,
            "tol_equisym" => t.equisym = f()?,
            _ => return Err(format!("unknown key '{}'", key)),
        }
        Ok(())
    }

    pub fn validate(&self) -> std::result::Result<(), UsageError> {
        if !self.n_points.is_power_of_two() || self.n_points < 16 {
            return Err(UsageError(format!("n_points = {} must be a power of two >= 16", self.n_points)));
        }
        if !(self.grid_l > 0.0) {
            return Err(UsageError(format!("grid_l = {} must be positive", self.grid_l)));
        }
        let t = &self.verify.tol;
        let tols = [
            self.eps,
            self.zero_tol,
            t.adjoint,
            t.commute,
            t.psc,
            t.polyi,
            t.iteration,
            t.funci,
            t.rota_baxter,
            t.cohomology,
            t.orthogonality,
            t.variance,
            t.mellin,
            t.xi,
            t.equisym,
        ];
        if tols.iter().any(|x| !(*x > 0.0)) {
            return Err(UsageError("tolerances must be positive".into()));
        }
        Ok(())
    }

    fn verify_config(&self) -> VerifyConfig {
        let mut v = self.verify.clone();
        v.eps = self.eps;
        v.seed = self.seed;
        v.grid = LogGrid { x_min: -self.grid_l, x_max: self.grid_l, n_points: self.n_points };
        v
    }
}

/// Locale-independent decimal text with 15 significant digits.
pub fn fmt15(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{}", x);
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..15).contains(&e) {
        let digits = (14 - e).max(0) as usize;
        let s = format!("{:.*}", digits, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{:.14e}", x)
    }
}

enum Failure {
    Usage(String),
    Compute(String),
}

impl From<ZError> for Failure {
    fn from(e: ZError) -> Self {
        Failure::Compute(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

/// Run with explicit arguments (including the program name) and sinks;
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{}", text) } else { write!(err, "{}", text) };
            return code;
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "usage error: {}", m);
            2
        }
        Err(Failure::Compute(m)) => {
            let _ = writeln!(err, "error: {}", m);
            1
        }
    }
}

fn load_config(cli: &Cli) -> Result<CliConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {}", p.display(), e)))?;
            CliConfig::from_str(&text).map_err(|e| Failure::Usage(e.0))?
        }
        None => CliConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(e) = cli.eps {
        cfg.eps = e;
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    cfg.validate().map_err(|e| Failure::Usage(e.0))?;
    Ok(cfg)
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn reports_text(reports: &[CheckReport], format: OutputFormat) -> Result<String, Failure> {
    Ok(match format {
        OutputFormat::Json => serde_json::to_string_pretty(reports).map_err(|e| Failure::Compute(e.to_string()))? + "\n",
        OutputFormat::Csv => {
            let mut s = String::from("name,residual,tolerance,passed\n");
            for r in reports {
                s.push_str(&format!("{},{},{},{}\n", r.name, fmt15(r.residual), fmt15(r.tolerance), r.passed));
            }
            s
        }
    })
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = load_config(cli)?;
    match &cli.cmd {
        Cmd::Xi { s, engine, n } => {
            let e = match engine {
                EngineArg::Direct => XiEngine::Direct,
                EngineArg::Integral => XiEngine::Integral,
                EngineArg::Ibp => XiEngine::Ibp(*n),
            };
            let v = xi(*s, e, cfg.eps)?;
            writeln!(out, "{} {}", fmt15(v.re), fmt15(v.im))?;
            Ok(0)
        }
        Cmd::Zeros { t_max, tol, out: path } => {
            if !(*t_max >= 0.0) {
                return Err(Failure::Usage(format!("t-max = {} must be nonnegative", t_max)));
            }
            if *t_max > cfg.t_max_cap {
                return Err(Failure::Compute(format!("t-max = {} exceeds the configured cap {}", t_max, cfg.t_max_cap)));
            }
            let z = find_critical_zeros(*t_max, tol.unwrap_or(cfg.zero_tol))?;
            emit(&z.to_csv_string()?, path.as_deref(), out)?;
            Ok(0)
        }
        Cmd::Check { filter, op, tau_shift, out: path } => {
            let mut vc = cfg.verify_config();
            if let Some(d) = tau_shift {
                vc.tau_shift = *d;
            }
            vc.filters = if filter.is_empty() { vec!["*".into()] } else { filter.clone() };
            for p in &vc.filters {
                glob::Pattern::new(p).map_err(|e| Failure::Usage(format!("bad filter '{}': {}", p, e)))?;
            }
            let reports = match op {
                Some(text) => check_op(&parse_sexpr(text).map_err(|e| Failure::Usage(e.to_string()))?, &vc),
                None => run_all(&vc),
            };
            if reports.is_empty() {
                writeln!(err, "warning: no checks match {:?}", vc.filters)?;
            }
            emit(&reports_text(&reports, cfg.format)?, path.as_deref(), out)?;
            let failed = reports.iter().filter(|r| !r.passed).count();
            if failed > 0 {
                writeln!(err, "{} of {} checks failed", failed, reports.len())?;
                return Ok(1);
            }
            Ok(0)
        }
        Cmd::Heat { m, rho, k_max, variant } => {
            if !(*rho > 0.0) {
                return Err(Failure::Usage(format!("rho = {} must be positive", rho)));
            }
            if !(1..=4).contains(m) {
                return Err(Failure::Usage(format!("m = {} outside 1..=4", m)));
            }
            if *k_max > 10 {
                return Err(Failure::Usage(format!("k-max = {} exceeds 10", k_max)));
            }
            let v = match variant {
                VariantArg::Plain => HeatVariant::Plain,
                VariantArg::Tilde => HeatVariant::Tilde,
            };
            let roots = equisym_roots(*m, *rho, *k_max, v)?;
            let mut s = String::from("k,predicted_re,predicted_im,located_re,located_im,distance,residual\n");
            for r in roots {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    r.k,
                    fmt15(r.predicted.re),
                    fmt15(r.predicted.im),
                    fmt15(r.located.re),
                    fmt15(r.located.im),
                    fmt15((r.located - r.predicted).norm()),
                    fmt15(r.residual)
                ));
            }
            out.write_all(s.as_bytes())?;
            Ok(0)
        }
        Cmd::Weil { function, zeros } => {
            let f = battery_fn(function)
                .ok_or_else(|| Failure::Usage(format!("unknown function '{}'; battery: {}", function, battery_names().join(", "))))?;
            let z = ZeroList::read_csv(zeros)?;
            let v = weil_sum(&f, &z)?;
            writeln!(out, "{}", fmt15(v))?;
            Ok(0)
        }
    }
}

/// Entry point of the binary.
pub fn main_entry() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let mut out = stdout.lock();
    let mut err = stderr.lock();
    run(std::env::args_os(), &mut out, &mut err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifteen_digits() {
        assert_eq!(fmt15(1.0), "1");
        assert_eq!(fmt15(-3.976900254908620), "-3.97690025490862");
        assert_eq!(fmt15(1.5e-9), "1.50000000000000e-9");
    }

    #[test]
    fn config_file_parses() {
        let c = CliConfig::from_str("# comment\nseed = 7\nn_points = 1024\ntol_psc = 1e-7\nhbars = 0, 1\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.n_points, 1024);
        assert_eq!(c.verify.tol.psc, 1e-7);
        assert_eq!(c.verify.hbars, vec![0.0, 1.0]);
        assert!(CliConfig::from_str("n_points = 1000").is_err());
        assert!(CliConfig::from_str("bogus = 1").is_err());
    }

    #[test]
    fn complex_argument() {
        assert_eq!(parse_complex("0.5,14").unwrap(), c(0.5, 14.0));
        assert!(parse_complex("a,b").is_err());
    }
}
