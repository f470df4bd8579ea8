//! Command implementations and option plumbing shared by the subcommands.

use crate::{plot, table};
use clap::{Args, ValueEnum};
use dp3::asymptotics;
use dp3::dynamics;
use dp3::gamma;
use dp3::integrate::{integrate, IntegrateError, IntegratorConfig, Trajectory};
use dp3::model::{make_params, ModelError, Params};
use dp3::series::{build_series, OriginSeries, SeriesError, DEFAULT_N_TERMS};
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Numeric(m) => write!(f, "numeric: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<IntegrateError> for CliError {
    fn from(e: IntegrateError) -> Self {
        match e {
            IntegrateError::BadRange { .. }
            | IntegrateError::BadConfig(_)
            | IntegrateError::NotSpecialMode
            | IntegrateError::BadSeed(_) => CliError::Usage(e.to_string()),
            IntegrateError::Series(s) => CliError::from(s),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Parses a decimal or an exact fraction such as `-1/8`.
pub fn parse_number(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| CliError::Usage(format!("cannot parse number '{t}'")))
    };
    match s.split_once('/') {
        Some((num, den)) => {
            let d = parse(den)?;
            if d == 0.0 {
                return Err(CliError::Usage(format!("zero denominator in '{s}'")));
            }
            Ok(parse(num)? / d)
        }
        None => parse(s),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Csv,
    Svg,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputKind {
    Solution,
    I1,
    ReI2,
    ImI2,
}

impl OutputKind {
    fn name(self) -> &'static str {
        match self {
            OutputKind::Solution => "solution",
            OutputKind::I1 => "i1",
            OutputKind::ReI2 => "re_i2",
            OutputKind::ImI2 => "im_i2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

/// Flags shared by `solve` and `compare`. Every value can also come from a
/// `key = value` config file; explicit flags win.
#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// Equation parameter a (< 0); decimals and fractions like -1/8 accepted
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Equation parameter b (> 0); decimals and fractions accepted
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Series/integrator handoff point (default 0.1, shrunk automatically
    /// if the series cannot deliver full accuracy there)
    #[arg(long)]
    pub tau0: Option<f64>,
    /// Right end of the integration range (default 40)
    #[arg(long = "tau-max")]
    pub tau_max: Option<f64>,
    /// Relative step tolerance (default 1e-10)
    #[arg(long)]
    pub rtol: Option<f64>,
    /// Absolute step tolerance (default 1e-12)
    #[arg(long)]
    pub atol: Option<f64>,
    /// Output grid spacing (default 0.05)
    #[arg(long)]
    pub stride: Option<f64>,
    /// Output path prefix (writes PREFIX.csv / PREFIX.svg)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// What to write: csv, svg, or both (default both)
    #[arg(long, value_enum)]
    pub format: Option<OutFormat>,
    /// Config file with `key = value` lines mirroring the flags
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Quantity to compare (repeatable; default i1)
    #[arg(long, value_enum)]
    pub output: Vec<OutputKind>,
    /// Use the oscillatory correction term as the reference line
    #[arg(long, value_enum)]
    pub correction: Option<Switch>,
}

#[derive(Args, Debug, Clone)]
pub struct FigureArgs {
    /// Figure number (1-7)
    pub n: Option<u8>,
    /// Produce all seven figures
    #[arg(long)]
    pub all: bool,
    /// Output directory (default: current directory)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// What to write: csv, svg, or both (default both)
    #[arg(long, value_enum)]
    pub format: Option<OutFormat>,
}

#[derive(Args, Debug, Clone)]
pub struct SelftestArgs {
    /// Harness hook: perturb b inside one identity check to verify the
    /// suite actually detects violations
    #[arg(long, hide = true, default_value_t = 0.0, allow_hyphen_values = true)]
    pub perturb_b: f64,
}

fn load_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("config {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "config {}:{}: expected 'key = value', got '{raw}'",
                path.display(),
                ln + 1
            ))
        })?;
        map.insert(
            key.trim().replace('-', "_").to_ascii_lowercase(),
            value.trim().to_string(),
        );
    }
    Ok(map)
}

/// Fully resolved run options: flag > config file > built-in default.
pub struct Resolved {
    pub params: Params,
    pub series: OriginSeries,
    pub cfg: IntegratorConfig,
    pub tau0: f64,
    pub tau_max: f64,
    pub out: PathBuf,
    pub format: OutFormat,
    pub config: BTreeMap<String, String>,
}

impl Resolved {
    pub fn from_common(c: &CommonArgs, default_out: &str) -> Result<Resolved, CliError> {
        let config = match &c.config {
            Some(p) => load_config(p)?,
            None => BTreeMap::new(),
        };
        let text = |flag: &Option<String>, key: &str| -> Option<String> {
            flag.clone().or_else(|| config.get(key).cloned())
        };
        let numeric = |flag: &Option<f64>, key: &str| -> Result<Option<f64>, CliError> {
            match flag {
                Some(v) => Ok(Some(*v)),
                None => config.get(key).map(|s| parse_number(s)).transpose(),
            }
        };

        let a = match text(&c.a, "a") {
            Some(s) => parse_number(&s)?,
            None => return Err(CliError::Usage("--a is required".into())),
        };
        let b = match text(&c.b, "b") {
            Some(s) => parse_number(&s)?,
            None => return Err(CliError::Usage("--b is required".into())),
        };
        let params = make_params(a, b, 1, true)?;
        let series = build_series(&params, DEFAULT_N_TERMS)?;

        let tau0 = numeric(&c.tau0, "tau0")?.unwrap_or(0.1);
        let tau0 = series.recommended_tau0(tau0);
        let tau_max = numeric(&c.tau_max, "tau_max")?.unwrap_or(40.0);
        let cfg = IntegratorConfig {
            rtol: numeric(&c.rtol, "rtol")?.unwrap_or(1e-10),
            atol: numeric(&c.atol, "atol")?.unwrap_or(1e-12),
            stride: numeric(&c.stride, "stride")?.unwrap_or(0.05),
            ..IntegratorConfig::default()
        };
        let out = c
            .out
            .clone()
            .or_else(|| config.get("out").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(default_out));
        let format = match &c.format {
            Some(f) => *f,
            None => match config.get("format").map(String::as_str) {
                Some("csv") => OutFormat::Csv,
                Some("svg") => OutFormat::Svg,
                Some("both") | None => OutFormat::Both,
                Some(other) => {
                    return Err(CliError::Usage(format!("unknown format '{other}'")))
                }
            },
        };
        Ok(Resolved {
            params,
            series,
            cfg,
            tau0,
            tau_max,
            out,
            format,
            config,
        })
    }

    fn integrate(&self) -> Result<Trajectory, CliError> {
        Ok(integrate(
            &self.params,
            &self.series,
            self.tau0,
            self.tau_max,
            &self.cfg,
        )?)
    }

    fn param_label(&self) -> String {
        format!("a={}, b={}", self.params.a(), self.params.b())
    }
}

fn out_paths(prefix: &Path, format: OutFormat) -> (Option<PathBuf>, Option<PathBuf>) {
    let with_ext = |ext: &str| {
        let mut p = prefix.as_os_str().to_owned();
        p.push(".");
        p.push(ext);
        PathBuf::from(p)
    };
    match format {
        OutFormat::Csv => (Some(with_ext("csv")), None),
        OutFormat::Svg => (None, Some(with_ext("svg"))),
        OutFormat::Both => (Some(with_ext("csv")), Some(with_ext("svg"))),
    }
}

/// Creates (truncates) every output file up front so an unwritable path
/// fails before the integration runs, not after.
fn check_writable(paths: &[&Option<PathBuf>]) -> Result<(), CliError> {
    for p in paths.iter().filter_map(|p| p.as_ref()) {
        fs::File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

pub fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let r = Resolved::from_common(&args.common, "solution")?;
    let (csv, svg) = out_paths(&r.out, r.format);
    check_writable(&[&csv, &svg])?;
    let tr = r.integrate()?;

    if let Some(path) = csv {
        let rows: Vec<Vec<f64>> = tr
            .samples()
            .iter()
            .map(|s| vec![s.point.tau, s.point.u, s.point.du])
            .collect();
        table::write_csv(&path, "tau,u,du", &rows)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = svg {
        let pts: Vec<(f64, f64)> = tr.samples().iter().map(|s| (s.point.tau, s.point.u)).collect();
        let svg_text = plot::render(
            &format!("u(tau), {}", r.param_label()),
            "tau",
            "u",
            &[plot::Series {
                label: "numeric",
                color: "#1f77b4",
                points: &pts,
            }],
        );
        fs::write(&path, svg_text)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

struct CompareTable {
    rows: Vec<Vec<f64>>,
    numeric: Vec<(f64, f64)>,
    leading: Vec<(f64, f64)>,
    corrected: Vec<(f64, f64)>,
}

fn compare_table(
    r: &Resolved,
    tr: &Trajectory,
    kind: OutputKind,
    with_correction: bool,
) -> CompareTable {
    let p = &r.params;
    let mut t = CompareTable {
        rows: Vec::new(),
        numeric: Vec::new(),
        leading: Vec::new(),
        corrected: Vec::new(),
    };
    for s in tr.samples() {
        let tau = s.point.tau;
        let numeric = match kind {
            OutputKind::Solution => s.point.u,
            OutputKind::I1 => s.i1,
            OutputKind::ReI2 => s.i2.re,
            OutputKind::ImI2 => s.i2.im,
        };
        let (lead, corr) = match kind {
            OutputKind::Solution => (
                asymptotics::u_asymptotic(p, tau, false),
                asymptotics::u_asymptotic(p, tau, true),
            ),
            OutputKind::I1 => {
                let v = asymptotics::i1_asymptotic(p, tau);
                (v, v)
            }
            OutputKind::ReI2 => {
                let v = asymptotics::re_i2_asymptotic(p, tau);
                (v, v)
            }
            OutputKind::ImI2 => (
                asymptotics::im_i2_asymptotic(p, tau, false),
                asymptotics::im_i2_asymptotic(p, tau, true),
            ),
        };
        let reference = if with_correction { corr } else { lead };
        let abs_diff = (numeric - reference).abs();
        let rel_diff = abs_diff / reference.abs();
        t.rows.push(vec![tau, numeric, lead, corr, abs_diff, rel_diff]);
        t.numeric.push((tau, numeric));
        t.leading.push((tau, lead));
        t.corrected.push((tau, corr));
    }
    t
}

pub fn cmd_compare(args: &CompareArgs) -> Result<(), CliError> {
    let r = Resolved::from_common(&args.common, "compare")?;
    let outputs: Vec<OutputKind> = if !args.output.is_empty() {
        args.output.clone()
    } else {
        match r.config.get("output").map(String::as_str) {
            Some("solution") => vec![OutputKind::Solution],
            Some("i1") => vec![OutputKind::I1],
            Some("re_i2") => vec![OutputKind::ReI2],
            Some("im_i2") => vec![OutputKind::ImI2],
            Some(other) => return Err(CliError::Usage(format!("unknown output '{other}'"))),
            None => vec![OutputKind::I1],
        }
    };
    let with_correction = match args.correction {
        Some(s) => s == Switch::On,
        None => matches!(r.config.get("correction").map(String::as_str), Some("on")),
    };

    // One file (pair) per requested quantity; suffix the prefix when more
    // than one was asked for.
    let mut planned = Vec::new();
    for kind in &outputs {
        let prefix = if outputs.len() == 1 {
            r.out.clone()
        } else {
            let mut p = r.out.as_os_str().to_owned();
            p.push("_");
            p.push(kind.name());
            PathBuf::from(p)
        };
        let (csv, svg) = out_paths(&prefix, r.format);
        planned.push((*kind, csv, svg));
    }
    {
        let refs: Vec<&Option<PathBuf>> = planned
            .iter()
            .flat_map(|(_, c, s)| [c, s])
            .collect();
        check_writable(&refs)?;
    }

    let tr = r.integrate()?;
    for (kind, csv, svg) in planned {
        let t = compare_table(&r, &tr, kind, with_correction);
        if let Some(path) = csv {
            table::write_csv(
                &path,
                "tau,numeric,asymptotic,asymptotic_corrected,abs_diff,rel_diff",
                &t.rows,
            )?;
            println!("wrote {}", path.display());
        }
        if let Some(path) = svg {
            let mut series = vec![
                plot::Series {
                    label: "numeric",
                    color: "#1f77b4",
                    points: &t.numeric,
                },
                plot::Series {
                    label: "asymptotic",
                    color: "#d62728",
                    points: &t.leading,
                },
            ];
            if with_correction {
                series.push(plot::Series {
                    label: "asymptotic+corr",
                    color: "#2ca02c",
                    points: &t.corrected,
                });
            }
            let svg_text = plot::render(
                &format!("{}: numeric vs asymptotic, {}", kind.name(), r.param_label()),
                "tau",
                kind.name(),
                &series,
            );
            fs::write(&path, svg_text)?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}

/// Preset runs matching the seven reference figures: the steep well
/// a = −8 (1: u, 2: I₁, 3: Im I₂) and the shallow well a = −1/8
/// (4: u, 5: I₁, 6: Im I₂ without correction, 7: with correction),
/// all at b = 1/100 over τ ∈ [0.1, 40].
pub fn cmd_figure(args: &FigureArgs) -> Result<(), CliError> {
    let numbers: Vec<u8> = if args.all {
        (1..=7).collect()
    } else {
        match args.n {
            Some(n) if (1..=7).contains(&n) => vec![n],
            Some(n) => return Err(CliError::Usage(format!("unknown figure {n} (expected 1-7)"))),
            None => return Err(CliError::Usage("give a figure number (1-7) or --all".into())),
        }
    };
    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    for n in numbers {
        figure(n, &dir, args.format.unwrap_or(OutFormat::Both))?;
    }
    Ok(())
}

fn figure(n: u8, dir: &Path, format: OutFormat) -> Result<(), CliError> {
    let steep = "-8";
    let shallow = "-1/8";
    let common = |a: &str| CommonArgs {
        a: Some(a.to_string()),
        b: Some("0.01".to_string()),
        out: Some(dir.join(format!("fig{n}"))),
        format: Some(format),
        ..CommonArgs::default()
    };
    let compare = |a: &str, kind: OutputKind, corr: Switch| CompareArgs {
        common: common(a),
        output: vec![kind],
        correction: Some(corr),
    };
    match n {
        1 => cmd_solve(&SolveArgs { common: common(steep) }),
        2 => cmd_compare(&compare(steep, OutputKind::I1, Switch::Off)),
        3 => cmd_compare(&compare(steep, OutputKind::ImI2, Switch::Off)),
        4 => cmd_solve(&SolveArgs { common: common(shallow) }),
        5 => cmd_compare(&compare(shallow, OutputKind::I1, Switch::Off)),
        6 => cmd_compare(&compare(shallow, OutputKind::ImI2, Switch::Off)),
        7 => cmd_compare(&compare(shallow, OutputKind::ImI2, Switch::On)),
        _ => unreachable!(),
    }
}

pub fn cmd_selftest(args: &SelftestArgs) -> Result<(), CliError> {
    let mut failures = 0_usize;
    let mut check = |name: &str, result: Result<String, String>| match result {
        Ok(detail) => println!("PASS {name}: {detail}"),
        Err(detail) => {
            failures += 1;
            println!("FAIL {name}: {detail}");
        }
    };

    let sets = [(-8.0, 0.01), (-0.125, 0.01)];

    check("seed slope is exact", (|| {
        let mut worst = 0.0_f64;
        for (a, b) in sets {
            let p = make_params(a, b, 1, true).map_err(|e| e.to_string())?;
            let s = build_series(&p, DEFAULT_N_TERMS).map_err(|e| e.to_string())?;
            worst = worst.max((s.coeffs()[0] - p.c1()).abs());
        }
        if worst == 0.0 {
            Ok("u'(0) = -b/(2a) bit-exact for both parameter sets".into())
        } else {
            Err(format!("seed slope off by {worst:e}"))
        }
    })());

    let mut trajectories = Vec::new();
    for (a, b) in sets {
        let p = make_params(a, b, 1, true).expect("reference parameters are valid");
        let s = build_series(&p, DEFAULT_N_TERMS).expect("reference series builds");
        match integrate(&p, &s, 0.1, 10.0, &IntegratorConfig::default()) {
            Ok(tr) => trajectories.push((p, tr)),
            Err(e) => check("integration reaches tau = 10", Err(format!("a={a}: {e}"))),
        }
    }
    if trajectories.len() == sets.len() {
        check(
            "integration reaches tau = 10",
            Ok("both parameter sets, no pole or underflow".into()),
        );
    }

    check("Re I2 stays proportional to I1", {
        let mut worst = 0.0_f64;
        for (p, tr) in &trajectories {
            let b_eff = p.b() + args.perturb_b;
            for s in tr.samples() {
                let defect = (s.i2.re - b_eff / 8.0 * s.i1).abs() / (1.0 + s.i1.abs());
                worst = worst.max(defect);
            }
        }
        if worst <= 1e-9 {
            Ok(format!("max scaled defect {worst:.3e}"))
        } else {
            Err(format!("max scaled defect {worst:.3e} exceeds 1e-9"))
        }
    });

    check("Im I2 matches the log identity", {
        let mut worst = 0.0_f64;
        for (p, tr) in &trajectories {
            let s = tr.end();
            let exact =
                -p.b() / 8.0 * ((s.point.u / s.point.tau).ln() - p.c1().ln());
            worst = worst.max((s.i2.im - exact).abs());
        }
        if worst <= 1e-8 {
            Ok(format!("max defect {worst:.3e} at tau = 10"))
        } else {
            Err(format!("max defect {worst:.3e} exceeds 1e-8"))
        }
    });

    check("product form satisfies its second-order relation", (|| {
        let mut worst = 0.0_f64;
        for (p, tr) in &trajectories {
            for tau in [2.0, 5.0, 8.0] {
                let s = tr.sample_at(tau).ok_or("sample missing")?;
                let t = dynamics::transform(p, &s.point).map_err(|e| e.to_string())?;
                let res = dynamics::residual_f_form(p, t.f, t.df, t.ddf, tau).relative();
                worst = worst.max(res);
            }
        }
        if worst <= 1e-6 {
            Ok(format!("max relative residual {worst:.3e}"))
        } else {
            Err(format!("max relative residual {worst:.3e} exceeds 1e-6"))
        }
    })());

    check("gamma modulus identity", (|| {
        let mut worst = 0.0_f64;
        for a in [-8.0, -2.5, -0.125] {
            let lg = gamma::log_gamma(num_complex::Complex64::new(1.0, a))
                .map_err(|e| e.to_string())?;
            let got = (2.0 * lg.re).exp();
            let pa = std::f64::consts::PI * a;
            let want = pa / pa.sinh();
            worst = worst.max(((got - want) / want).abs());
        }
        if worst <= 1e-12 {
            Ok(format!("max relative error {worst:.3e}"))
        } else {
            Err(format!("max relative error {worst:.3e} exceeds 1e-12"))
        }
    })());

    check("continuous gamma argument at a = -8", {
        let principal = -3.12732307313202127551_f64;
        let got = gamma::arg_gamma_continuous(-8.0);
        let want = principal - 2.0 * std::f64::consts::PI;
        let err = (got - want).abs();
        if err <= 1e-10 {
            Ok(format!("|got - (principal - 2pi)| = {err:.3e}"))
        } else {
            Err(format!("off by {err:.3e}"))
        }
    });

    if failures == 0 {
        Ok(())
    } else {
        Err(CliError::Numeric(format!(
            "selftest: {failures} check(s) failed"
        )))
    }
}
