use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use super::config::{parse_grid, parse_list, PlantConfig, RatSpec};
use super::report;
use crate::error::{Error, Result};
use crate::interp::NormalizationNode;
use crate::pipeline::{self, PipelineOptions, SigmaSpec};
use crate::poly::{RatFun, RealPoly};
use crate::synth::ClosedLoopReport;

#[derive(Debug, Parser)]
#[command(name = "simstab", version, about = "Simultaneous stabilization of a plant pencil via interpolation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eta zeros, interpolation constraints and the Pick verdict.
    Analyze {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Solve for R and the compensator k, then check the closed loop.
    Synthesize {
        config: PathBuf,
        /// sigma coefficients (normalized disc coordinates), comma separated.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "sigma_zeros")]
        sigma: Option<String>,
        /// sigma zeros, comma separated; must list n values.
        #[arg(long, allow_hyphen_values = true)]
        sigma_zeros: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// One synthesis per sigma = (z - z0)^n.
    Sweep {
        config: PathBuf,
        #[arg(long, required = true, allow_hyphen_values = true)]
        sigma_zeros: String,
        #[command(flatten)]
        common: Common,
    },
    /// Closed-loop check of a given compensator.
    Verify {
        config: PathBuf,
        /// Compensator file: a factored/coefficients spec or a synthesize report.
        #[arg(long)]
        k: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// `start:step:stop` or a comma separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_grid: Option<String>,
    /// Tolerance for cancelling common numerator/denominator roots.
    #[arg(long)]
    pub tol_coprime: Option<f64>,
    /// Zeros of eta with |Re s| below this are boundary nodes.
    #[arg(long)]
    pub tol_boundary: Option<f64>,
    /// Relative tolerance for y0(s) = 0 when choosing the target ratio.
    #[arg(long)]
    pub tol_zero: Option<f64>,
    /// Index of the real node sent to the origin.
    #[arg(long)]
    pub normalize_node: Option<usize>,
    /// Output directory for report.json, poles.csv and poles.svg.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON report (stdout, or report.json with --out).
    #[arg(long)]
    pub json: bool,
    /// Pole table (stdout, or poles.csv with --out).
    #[arg(long)]
    pub csv: bool,
    /// Pole scatter (stdout, or poles.svg with --out).
    #[arg(long)]
    pub svg: bool,
}

impl Common {
    fn options(&self, cfg: &PlantConfig) -> Result<PipelineOptions> {
        let mut opts = cfg.options()?;
        if let Some(g) = &self.lambda_grid {
            opts.lambda_grid = parse_grid(g)?;
        }
        if let Some(x) = self.tol_coprime {
            opts.problem.coprime_tol = x;
        }
        if let Some(x) = self.tol_boundary {
            opts.problem.boundary_tol = x;
        }
        if let Some(x) = self.tol_zero {
            opts.problem.zero_tol = x;
        }
        if let Some(i) = self.normalize_node {
            opts.normalization = NormalizationNode::Index(i);
        }
        if opts.lambda_grid.is_empty() || opts.lambda_grid.iter().any(|l| !l.is_finite()) {
            return Err(Error::Input("lambda grid must be a nonempty list of finite values".into()));
        }
        Ok(opts)
    }
}

/// What a command produced, before it is written anywhere.
pub struct Output {
    pub json: Value,
    pub csv: Option<String>,
    pub svg: Option<String>,
    pub summary: String,
    pub code: i32,
}

fn emit(out: &Output, common: &Common, stdout: &mut dyn Write) -> Result<()> {
    let io = |e: std::io::Error| Error::Input(format!("write failed: {e}"));
    let json_text = report::to_json_string(&out.json);
    match &common.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(io)?;
            let any = common.json || common.csv || common.svg;
            let write = |name: &str, text: &str| -> Result<()> {
                std::fs::write(dir.join(name), text).map_err(io)
            };
            if common.json || !any {
                write("report.json", &json_text)?;
            }
            if let Some(csv) = &out.csv {
                if common.csv || !any {
                    write("poles.csv", csv)?;
                }
            }
            if let Some(svg) = &out.svg {
                if common.svg {
                    write("poles.svg", svg)?;
                }
            }
            stdout.write_all(out.summary.as_bytes()).map_err(io)?;
        }
        None => {
            let picked = [common.json, common.csv, common.svg].iter().filter(|&&b| b).count();
            if picked > 1 {
                return Err(Error::Input("more than one of --json/--csv/--svg needs --out".into()));
            }
            let text = if common.json {
                json_text
            } else if common.csv {
                out.csv.clone().ok_or_else(|| Error::Input("no CSV for this command".into()))?
            } else if common.svg {
                out.svg.clone().ok_or_else(|| Error::Input("no SVG for this command".into()))?
            } else {
                out.summary.clone()
            };
            stdout.write_all(text.as_bytes()).map_err(io)?;
        }
    }
    Ok(())
}

fn fmt_c(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{:.10}", z.re)
    } else {
        format!("{:.10}{:+.10}i", z.re, z.im)
    }
}

fn fmt_poly(p: &RealPoly) -> String {
    let c: Vec<String> = p.coeffs().iter().map(|x| format!("{x:.10}")).collect();
    format!("[{}]", c.join(", "))
}

fn closed_loop_summary(s: &mut String, c: &ClosedLoopReport) {
    for r in &c.results {
        let _ = writeln!(
            s,
            "  lambda {:.4}: {} {}, {} poles",
            r.lambda,
            if r.stable { "stable" } else { "UNSTABLE" },
            if r.proper { "proper" } else { "improper" },
            r.s_poles.len()
        );
    }
    let _ = writeln!(s, "all stable: {}, all proper: {}", c.all_stable, c.all_proper);
}

fn analyze_cmd(cfg: &PlantConfig, opts: &PipelineOptions) -> Result<Output> {
    let a = pipeline::analyze(&cfg.plant_pair()?, opts)?;
    let solvable = a.is_solvable();
    let mut body = report::analysis(&a);
    body["warnings"] = json!(a.warnings);
    let mut s = String::new();
    let an = &a.problem.analysis;
    let _ = writeln!(s, "eta zeros in Re s > 0:");
    for z in &an.rhp_zeros {
        let _ = writeln!(s, "  s = {} (multiplicity {})", fmt_c(z.s), z.multiplicity);
    }
    let _ = writeln!(s, "m_inf = {}", an.m_infinity);
    let _ = writeln!(s, "constraints:");
    for c in &a.problem.constraints {
        let jet: Vec<String> = c.target.coeffs.iter().map(|&w| fmt_c(w)).collect();
        let _ = writeln!(s, "  node {} order {}: [{}]", fmt_c(c.node), c.order, jet.join(", "));
    }
    let _ = writeln!(s, "degree bound n = {}", a.degree_bound());
    let _ = writeln!(s, "pick: {}", report::pick_summary(&a.pick));
    for w in &a.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    Ok(Output {
        json: report::with_header("analyze", body),
        csv: None,
        svg: None,
        summary: s,
        code: if solvable { 0 } else { 2 },
    })
}

fn sigma_from_flags(
    cfg: &PlantConfig,
    sigma: &Option<String>,
    sigma_zeros: &Option<String>,
) -> Result<SigmaSpec> {
    if let Some(c) = sigma {
        return Ok(SigmaSpec::Coefficients(parse_list(c)?));
    }
    if let Some(z) = sigma_zeros {
        return Ok(SigmaSpec::Zeros(
            parse_list(z)?.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        ));
    }
    cfg.sigma_spec()
}

fn synthesize_cmd(cfg: &PlantConfig, spec: &SigmaSpec, opts: &PipelineOptions) -> Result<Output> {
    let d = pipeline::synthesize(&cfg.plant_pair()?, spec, opts)?;
    let rows = [(None, &d.closed_loop)];
    let mut s = String::new();
    let _ = writeln!(s, "pick: {}", report::pick_summary(&d.analysis.pick));
    let _ = writeln!(
        s,
        "sigma = {}{}",
        fmt_poly(d.sigma.poly()),
        if d.sigma_defaulted { " (default z^n)" } else { "" }
    );
    if let Some(sol) = &d.solution {
        let _ = writeln!(s, "a = {}", fmt_poly(&sol.a));
        let _ = writeln!(s, "b = {}", fmt_poly(&sol.b));
        let _ = writeln!(s, "rho = {:.10}, rank P = {}", sol.rho, sol.rank_p);
    }
    let _ = writeln!(s, "R: num {} den {}", fmt_poly(d.r().num()), fmt_poly(d.r().den()));
    let _ = writeln!(s, "k: num {} den {}", fmt_poly(d.k().num()), fmt_poly(d.k().den()));
    let _ = writeln!(
        s,
        "condition (iii) margin {:.6e}, max arg {:.4} deg",
        d.condition_iii.margin, d.condition_iii.max_arg_deg
    );
    closed_loop_summary(&mut s, &d.closed_loop);
    for w in &d.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    Ok(Output {
        json: report::with_header("synthesize", report::design(&d)),
        csv: Some(report::poles_csv(&rows)),
        svg: Some(report::poles_svg(&rows)),
        summary: s,
        code: 0,
    })
}

fn sweep_cmd(cfg: &PlantConfig, zeros: &[f64], opts: &PipelineOptions) -> Result<Output> {
    let sw = pipeline::sweep(&cfg.plant_pair()?, zeros, opts)?;
    let rows: Vec<(Option<f64>, &ClosedLoopReport)> = sw
        .entries
        .iter()
        .filter_map(|e| e.outcome.as_ref().ok().map(|d| (Some(e.zero), &d.closed_loop)))
        .collect();
    let mut s = String::new();
    for e in &sw.entries {
        match &e.outcome {
            Ok(d) => {
                let _ = writeln!(
                    s,
                    "z0 = {}: all stable {}, all proper {}",
                    e.zero, d.closed_loop.all_stable, d.closed_loop.all_proper
                );
            }
            Err(err) => {
                let _ = writeln!(s, "z0 = {}: failed: {err}", e.zero);
            }
        }
    }
    if let Some(m) = sw.min_pair_distance {
        let _ = writeln!(s, "min pairwise (a, b) distance {m:.6e}");
    }
    for w in &sw.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    let code = if !sw.entries.is_empty() && sw.entries.iter().all(|e| e.outcome.is_err()) {
        sw.entries[0].outcome.as_ref().err().map_or(3, Error::exit_code)
    } else {
        0
    };
    Ok(Output {
        json: report::with_header("sweep", report::sweep(&sw)),
        csv: Some(report::poles_csv(&rows)),
        svg: Some(report::poles_svg(&rows)),
        summary: s,
        code,
    })
}

fn coeff_array(v: &Value) -> Option<Vec<f64>> {
    v.as_array()?.iter().map(Value::as_f64).collect()
}

/// Reads a compensator: a `factored`/`coefficients` spec, a `{num, den}`
/// object, or a synthesize report carrying `k`.
pub fn load_compensator(path: &Path) -> Result<RatFun> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Error::Input(format!("compensator: {e}")))?;
    if let Ok(spec) = serde_json::from_value::<RatSpec>(value.clone()) {
        return spec.to_ratfun();
    }
    let obj = if value.get("k").is_some() { &value["k"] } else { &value };
    match (coeff_array(&obj["num"]), coeff_array(&obj["den"])) {
        (Some(n), Some(d)) => {
            RatFun::new(RealPoly::new(n), RealPoly::new(d)).map_err(|e| Error::Input(e.to_string()))
        }
        _ => Err(Error::Input(format!(
            "{}: expected a factored/coefficients spec or num/den lists",
            path.display()
        ))),
    }
}

fn verify_cmd(cfg: &PlantConfig, k: &RatFun, opts: &PipelineOptions) -> Result<Output> {
    let c = pipeline::verify_compensator(&cfg.plant_pair()?, k, opts)?;
    let rows = [(None, &c)];
    let mut s = String::new();
    let _ = writeln!(s, "k: num {} den {}", fmt_poly(k.num()), fmt_poly(k.den()));
    closed_loop_summary(&mut s, &c);
    for w in &c.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    let body = json!({
        "k": report::ratfun(k),
        "closed_loop": report::closed_loop(&c),
        "warnings": c.warnings,
    });
    Ok(Output {
        json: report::with_header("verify", body),
        csv: Some(report::poles_csv(&rows)),
        svg: Some(report::poles_svg(&rows)),
        summary: s,
        code: 0,
    })
}

pub fn execute(cli: &Cli) -> Result<(Output, Common)> {
    let (config, common) = match &cli.command {
        Command::Analyze { config, common }
        | Command::Synthesize { config, common, .. }
        | Command::Sweep { config, common, .. }
        | Command::Verify { config, common, .. } => (config, common),
    };
    let cfg = PlantConfig::load(config)?;
    let opts = common.options(&cfg)?;
    let out = match &cli.command {
        Command::Analyze { .. } => analyze_cmd(&cfg, &opts)?,
        Command::Synthesize {
            sigma, sigma_zeros, ..
        } => synthesize_cmd(&cfg, &sigma_from_flags(&cfg, sigma, sigma_zeros)?, &opts)?,
        Command::Sweep { sigma_zeros, .. } => sweep_cmd(&cfg, &parse_list(sigma_zeros)?, &opts)?,
        Command::Verify { k, .. } => verify_cmd(&cfg, &load_compensator(k)?, &opts)?,
    };
    Ok((out, common.clone()))
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = execute(&cli).and_then(|(out, common)| {
        emit(&out, &common, stdout)?;
        Ok(out.code)
    });
    match result {
        Ok(code) => {
            if code == 2 {
                let _ = writeln!(stderr, "error: interpolation data fails the Pick test");
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
