use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use langford_mrf::algebra::{int, to_f64};
use langford_mrf::dynamics::{
    check_integral_condition, floquet, lyapunov_spectrum, orbit_residual, shift_operator_compare, ClosedFormOrbit,
    FloquetReport, IntegralConditionReport, IntegralTheorem, LyapunovSpectrum, ShiftComparison,
};
use langford_mrf::langford::{build_family, Family, ParamClass, Params, ParamsDescription};
use langford_mrf::ode::{flow, integrate, IntegratorConfig};
use langford_mrf::perturbation::{admissibility_residual, find_admissible_basis, spans, PerturbationAnsatz};
use langford_mrf::signal::Signal;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{
    model_error, parse_json, parse_system, require_finite, require_positive, resolve_seed, CompareSection,
    LoadedConfig, LyapunovSection, SimulateSection, SystemInput, MAX_DEGREE,
};
use crate::output::{projection_svg, to_json, trajectory_csv, write_file};
use crate::{Cli, CliError, Command};

/// A finished command: summary lines for stdout, files to write, and an
/// optional threshold failure that turns into exit code 4.
#[derive(Debug, Default)]
pub struct Outcome {
    pub summary: Vec<String>,
    pub files: Vec<(String, String)>,
    pub failure: Option<String>,
}

impl Outcome {
    fn report<T: Serialize>(name: &str, report: &T) -> Self {
        Self { files: vec![(format!("{name}.json"), to_json(report))], ..Self::default() }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.summary.push(s.into());
    }
}

pub type Failure = (Vec<String>, CliError);

/// Runs one command line. On a threshold failure the report is still
/// written and the summary still returned alongside the error.
pub fn execute(cli: Cli) -> Result<Vec<String>, Failure> {
    let loaded = LoadedConfig::load(cli.config.as_deref()).map_err(|e| (vec![], e))?;
    let out_dir = cli
        .out
        .clone()
        .or_else(|| loaded.config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    let mut outcome = dispatch(&loaded, cli.command).map_err(|e| (vec![], e))?;
    for (name, contents) in &outcome.files {
        let path = out_dir.join(name);
        write_file(&path, contents).map_err(|e| (outcome.summary.clone(), e))?;
        outcome.summary.push(format!("wrote {}", path.display()));
    }
    match outcome.failure {
        Some(msg) => Err((outcome.summary, CliError::Threshold(msg))),
        None => Ok(outcome.summary),
    }
}

fn dispatch(loaded: &LoadedConfig, command: Command) -> Result<Outcome, CliError> {
    let cfg = &loaded.config;
    cfg.integrator.validate()?;
    match command {
        Command::Verify { system } => {
            let input = system_from(loaded, system.as_deref(), false)?;
            verify(&input)
        }
        Command::Find { params, degree } => {
            let params = match params {
                Some(path) => params_file(&path)?,
                None => match &cfg.params {
                    Some(p) => p.parse().map_err(model_error)?,
                    None => loaded
                        .system()?
                        .params()?
                        .ok_or_else(|| CliError::Validation("find needs `params` or a parameterized system".into()))?,
                },
            };
            find(&params, degree.unwrap_or(cfg.find.degree))
        }
        Command::Simulate { system, t0, t1, x0, samples, no_svg } => {
            let input = system_from(loaded, system.as_deref(), false)?;
            let mut s = cfg.simulate.clone();
            s.t0 = t0.unwrap_or(s.t0);
            s.t1 = t1.unwrap_or(s.t1);
            s.x0 = x0.unwrap_or(s.x0);
            s.samples = samples.unwrap_or(s.samples);
            s.svg &= !no_svg;
            simulate(&input, &s, &cfg.integrator)
        }
        Command::Lyapunov { system, x0, transient, total, renorm } => {
            let input = system_from(loaded, system.as_deref(), false)?;
            let mut s = cfg.lyapunov.clone();
            s.x0 = x0.unwrap_or(s.x0);
            s.transient = transient.unwrap_or(s.transient);
            s.total = total.unwrap_or(s.total);
            s.renorm = renorm.unwrap_or(s.renorm);
            lyapunov(&input, &s, &cfg.integrator)
        }
        Command::Compare { system_a, system_b, half_width, points, seed, threshold } => {
            let a = system_from(loaded, system_a.as_deref(), false)?;
            let b = system_from(loaded, system_b.as_deref(), true)?;
            let mut s = cfg.compare.clone();
            s.half_width = half_width.unwrap_or(s.half_width);
            s.points = points.unwrap_or(s.points);
            s.threshold = threshold.unwrap_or(s.threshold);
            let seed = resolve_seed(seed, cfg.seed)?;
            compare(&a, &b, &s, seed, &cfg.integrator)
        }
        Command::Periodic { system, theorem, omega, floquet } => {
            let input = system_from(loaded, system.as_deref(), false)?;
            let mut s = cfg.periodic.clone();
            s.theorem = theorem.or(s.theorem);
            s.omega = omega.or(s.omega);
            s.floquet |= floquet;
            let theorem = s.theorem.as_deref().map(str::parse).transpose().map_err(CliError::Validation)?;
            periodic(&input, theorem, s.omega, s.floquet, s.samples.unwrap_or(100), &cfg.integrator)
        }
    }
}

fn system_from(loaded: &LoadedConfig, path: Option<&Path>, second: bool) -> Result<SystemInput, CliError> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", p.display())))?;
            parse_system(&text, &p.display().to_string())
        }
        None if second => loaded.system_b(),
        None => loaded.system(),
    }
}

/// A params file holds either bare parameters or a system description.
fn params_file(path: &Path) -> Result<Params, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    let origin = path.display().to_string();
    let probe: serde_json::Value = parse_json(&text, &origin)?;
    if probe.get("family").is_some() {
        parse_system(&text, &origin)?
            .params()?
            .ok_or_else(|| CliError::Validation(format!("{origin}: system has no parameters")))
    } else {
        parse_json::<ParamsDescription>(&text, &origin)?.parse().map_err(model_error)
    }
}

/// The constraint class each family is built on.
pub fn class_of(family: Family) -> Option<ParamClass> {
    match family {
        Family::Base => Some(ParamClass::Generic),
        Family::Eq5 => Some(ParamClass::Rotational),
        Family::Eq6 => Some(ParamClass::Heteroclinic),
        Family::Eq7 => Some(ParamClass::Diagonal),
        Family::Custom => None,
    }
}

/// Names of the perturbations listed for `class`, in listing order.
pub fn term_names(class: ParamClass) -> &'static [&'static str] {
    match class {
        ParamClass::Generic => &["X"],
        ParamClass::Rotational => &["X", "radial", "rotation"],
        ParamClass::Heteroclinic => &["X", "radial", "rotation", "quintic"],
        ParamClass::Diagonal => &["X", "rotation", "quintic_xx", "quintic_xy", "quintic_yy"],
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TermVerdict {
    pub index: usize,
    pub name: String,
    pub field: String,
    pub admissible: bool,
    /// Number of nonzero terms in the residual polynomials.
    pub residual_terms: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub system: SystemInput,
    pub class: Option<ParamClass>,
    pub terms: Vec<TermVerdict>,
    pub all_admissible: bool,
}

/// Residual check of every listed term of `input`, after its family
/// constraints.
pub fn verify_report(input: &SystemInput) -> Result<VerifyReport, CliError> {
    let system = match input {
        SystemInput::Field(_) => input.build()?,
        SystemInput::Family(d) => {
            let p = d.params.parse().map_err(model_error)?;
            let class = class_of(d.family).expect("described families have a class");
            let zeros = vec![Signal::zero(); term_names(class).len()];
            let zeros = if d.family == Family::Base { vec![] } else { zeros };
            build_family(d.family, &p, zeros).map_err(model_error)?;
            input.build()?
        }
    };
    let base = system.base().clone();
    let (class, listed) = match system.params().zip(class_of(system.family())) {
        Some((p, class)) => (Some(class), class.listed_perturbations(p)),
        None => (None, vec![base.clone()]),
    };
    let names = class.map_or(&["X"][..], term_names);
    let terms: Vec<TermVerdict> = listed
        .iter()
        .zip(names)
        .enumerate()
        .map(|(i, (delta, name))| {
            let r = admissibility_residual(&base, delta);
            let residual_terms = r.components().iter().map(|c| c.len()).sum();
            TermVerdict {
                index: i + 1,
                name: name.to_string(),
                field: delta.to_string(),
                admissible: residual_terms == 0,
                residual_terms,
            }
        })
        .collect();
    let all_admissible = terms.iter().all(|t| t.admissible);
    Ok(VerifyReport { command: "verify", system: input.clone(), class, terms, all_admissible })
}

fn verify(input: &SystemInput) -> Result<Outcome, CliError> {
    let report = verify_report(input)?;
    let mut out = Outcome::report("verify", &report);
    for t in &report.terms {
        let verdict = if t.admissible { "admissible" } else { "NOT admissible" };
        out.line(format!("Δ{} ({}): {verdict}", t.index, t.name));
    }
    if !report.all_admissible {
        out.failure = Some("some perturbation terms are not admissible".into());
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorCheck {
    pub name: String,
    pub class: ParamClass,
    pub in_span: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FindReport {
    pub command: &'static str,
    pub params: ParamsDescription,
    pub degree: u32,
    pub unknowns: usize,
    pub dimension: usize,
    pub basis: Vec<String>,
    /// Span membership of every listed generator whose class constraints
    /// the parameters satisfy.
    pub generators: Vec<GeneratorCheck>,
}

impl FindReport {
    pub fn contains(&self, name: &str) -> bool {
        self.generators.iter().any(|g| g.name == name && g.in_span)
    }
}

pub fn find_report(p: &Params, degree: u32) -> Result<FindReport, CliError> {
    if degree > MAX_DEGREE {
        return Err(CliError::Validation(format!("degree {degree} exceeds the limit of {MAX_DEGREE}")));
    }
    let x = langford_mrf::langford::build_base(p);
    let basis = find_admissible_basis(&x, degree);
    let mut generators: Vec<GeneratorCheck> = Vec::new();
    for class in ParamClass::ALL.into_iter().filter(|c| c.holds(p)) {
        for (name, field) in term_names(class).iter().zip(class.listed_perturbations(p)) {
            if generators.iter().all(|g| g.name != *name) {
                generators.push(GeneratorCheck { name: name.to_string(), class, in_span: spans(&basis, &field) });
            }
        }
    }
    Ok(FindReport {
        command: "find",
        params: ParamsDescription::from_params(p),
        degree,
        unknowns: PerturbationAnsatz::new(degree).len(),
        dimension: basis.len(),
        basis: basis.iter().map(ToString::to_string).collect(),
        generators,
    })
}

fn find(p: &Params, degree: u32) -> Result<Outcome, CliError> {
    let report = find_report(p, degree)?;
    let mut out = Outcome::report("find", &report);
    out.line(format!("degree {degree}: {} unknowns, basis dimension {}", report.unknowns, report.dimension));
    for (i, f) in report.basis.iter().enumerate() {
        out.line(format!("  B{}: {f}", i + 1));
    }
    for g in &report.generators {
        let verdict = if g.in_span { "in span" } else { "not in span" };
        out.line(format!("{} ({:?}): {verdict}", g.name, g.class));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
struct SimulateReport<'a> {
    command: &'static str,
    system: &'a SystemInput,
    integrator: &'a IntegratorConfig,
    settings: &'a SimulateSection,
    accepted_steps: usize,
    final_state: [f64; 3],
    min: [f64; 3],
    max: [f64; 3],
    max_norm: f64,
    files: Vec<String>,
}

fn simulate(input: &SystemInput, s: &SimulateSection, cfg: &IntegratorConfig) -> Result<Outcome, CliError> {
    require_finite("t0/t1", &[s.t0, s.t1])?;
    require_finite("x0", &s.x0)?;
    if s.t1 <= s.t0 {
        return Err(CliError::Validation(format!("t1 must exceed t0, got {} and {}", s.t0, s.t1)));
    }
    if s.samples < 2 {
        return Err(CliError::Validation(format!("need at least 2 samples, got {}", s.samples)));
    }
    let system = input.build()?;
    let traj = integrate(&system, s.x0, s.t0, s.t1, cfg)?;
    let rows = traj.resample(s.samples);
    let mut min = [f64::INFINITY; 3];
    let mut max = [f64::NEG_INFINITY; 3];
    let mut max_norm: f64 = 0.0;
    for (_, p) in &rows {
        for i in 0..3 {
            min[i] = min[i].min(p[i]);
            max[i] = max[i].max(p[i]);
        }
        max_norm = max_norm.max(p.iter().map(|v| v * v).sum::<f64>().sqrt());
    }
    let mut files = vec![("trajectory.csv".to_string(), trajectory_csv(&rows))];
    if s.svg {
        for (name, u, v) in [("xy", 0, 1), ("xz", 0, 2), ("yz", 1, 2)] {
            files.push((format!("trajectory_{name}.svg"), projection_svg(&rows, u, v)));
        }
    }
    let report = SimulateReport {
        command: "simulate",
        system: input,
        integrator: cfg,
        settings: s,
        accepted_steps: traj.len() - 1,
        final_state: traj.final_state(),
        min,
        max,
        max_norm,
        files: files.iter().map(|f| f.0.clone()).collect(),
    };
    let mut out = Outcome::report("simulate", &report);
    out.files.extend(files);
    out.line(format!("{} samples on [{}, {}], {} steps", s.samples, s.t0, s.t1, report.accepted_steps));
    out.line(format!("final state {:?}, max |x| {max_norm}", report.final_state));
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
struct LyapunovReport<'a> {
    command: &'static str,
    system: &'a SystemInput,
    integrator: &'a IntegratorConfig,
    spectrum: LyapunovSpectrum,
}

fn lyapunov(input: &SystemInput, s: &LyapunovSection, cfg: &IntegratorConfig) -> Result<Outcome, CliError> {
    require_finite("x0", &s.x0)?;
    require_positive("renorm", s.renorm)?;
    let system = input.build()?;
    let spectrum = lyapunov_spectrum(&system, s.x0, s.transient, s.total, s.renorm, cfg)?;
    let mut out = Outcome::default();
    for (i, l) in spectrum.exponents.iter().enumerate() {
        out.line(format!("lambda_{} = {l}", i + 1));
    }
    out.line(format!("sum = {}", spectrum.sum));
    let report = LyapunovReport { command: "lyapunov", system: input, integrator: cfg, spectrum };
    out.files = Outcome::report("lyapunov", &report).files;
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
struct CompareReport<'a> {
    command: &'static str,
    seed: u64,
    system_a: &'a SystemInput,
    system_b: &'a SystemInput,
    integrator: &'a IntegratorConfig,
    settings: &'a CompareSection,
    comparison: ShiftComparison,
    passed: bool,
}

/// `n` points uniform in `[-h, h]^3` from a ChaCha8 stream seeded with `seed`.
pub fn seeded_points(seed: u64, n: usize, h: f64) -> Vec<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| std::array::from_fn(|_| rng.gen_range(-h..=h))).collect()
}

fn compare(
    a: &SystemInput,
    b: &SystemInput,
    s: &CompareSection,
    seed: u64,
    cfg: &IntegratorConfig,
) -> Result<Outcome, CliError> {
    require_positive("threshold", s.threshold)?;
    require_positive("box", s.box_half)?;
    if s.points == 0 {
        return Err(CliError::Validation("need at least one point".into()));
    }
    let (sa, sb) = (a.build()?, b.build()?);
    let points = seeded_points(seed, s.points, s.box_half);
    let comparison = shift_operator_compare(&sa, &sb, s.half_width, &points, cfg)?;
    let passed = comparison.max_distance <= s.threshold;
    let max = comparison.max_distance;
    let report = CompareReport {
        command: "compare",
        seed,
        system_a: a,
        system_b: b,
        integrator: cfg,
        settings: s,
        comparison,
        passed,
    };
    let mut out = Outcome::report("compare", &report);
    out.line(format!("max shift-operator distance over {} points, T = {}: {max:e}", s.points, s.half_width));
    if !passed {
        out.failure = Some(format!("max distance {max:e} exceeds threshold {:e}", s.threshold));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
struct PeriodicReport<'a> {
    command: &'static str,
    system: &'a SystemInput,
    integrator: &'a IntegratorConfig,
    condition: IntegralConditionReport,
    period: f64,
    radius: f64,
    orbit_residual: f64,
    residual_samples: usize,
    return_gap: f64,
    return_tol: f64,
    /// Condition satisfied and the numerical return map closes.
    periodic: bool,
    floquet: Option<FloquetReport>,
}

/// Bound on `|phi(T) - phi(0)|` for the numerical return-map check.
pub const RETURN_TOL: f64 = 1e-7;

/// Default condition for a family: the `2 pi k` form, with the `b = 0`
/// variant when `b` vanishes.
fn default_theorem(family: Family, b_zero: bool) -> IntegralTheorem {
    match (family == Family::Eq6, b_zero) {
        (false, false) => IntegralTheorem::T4i,
        (false, true) => IntegralTheorem::T6i,
        (true, false) => IntegralTheorem::T4ii,
        (true, true) => IntegralTheorem::T6ii,
    }
}

fn periodic(
    input: &SystemInput,
    theorem: Option<IntegralTheorem>,
    omega: Option<f64>,
    want_floquet: bool,
    samples: usize,
    cfg: &IntegratorConfig,
) -> Result<Outcome, CliError> {
    let system = input.build()?;
    let family = system.family();
    let p = system
        .params()
        .ok_or_else(|| CliError::Validation("periodic needs a parameterized system".into()))?
        .clone();
    if !matches!(family, Family::Base | Family::Eq5 | Family::Eq6) {
        return Err(CliError::Validation(format!("no periodicity condition for family {family}")));
    }
    let b_zero = p.b == int(0);
    let theorem = theorem.unwrap_or_else(|| default_theorem(family, b_zero));
    if (theorem.signal_count() == 4) != (family == Family::Eq6) {
        return Err(CliError::Validation(format!("condition {theorem:?} does not apply to family {family}")));
    }
    let mut signals: Vec<Signal> = system.signals().into_iter().cloned().collect();
    signals.resize(theorem.signal_count(), Signal::zero());
    let condition = check_integral_condition(theorem, &p, &signals, omega)?;
    let period = match theorem {
        IntegralTheorem::T6i | IntegralTheorem::T6ii => condition.upper_limit,
        _ => 2.0 * PI / to_f64(&p.b).abs(),
    };
    let orbit = ClosedFormOrbit::for_system(&system)?;
    let residual = orbit_residual(&system, &orbit, samples, (0.0, period))?;
    let start = orbit.point(0.0);
    let end = flow(&system, start, 0.0, period, cfg)?;
    let return_gap = start.iter().zip(&end).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
    let floquet = if want_floquet { Some(floquet(&system, &orbit, period, cfg)?) } else { None };

    let periodic_ok = condition.satisfied && return_gap <= RETURN_TOL;
    let mut out = Outcome::default();
    out.line(format!(
        "{theorem:?}: integral {} over [0, {}], target {}, residual {:e}, {}",
        condition.value,
        condition.upper_limit,
        condition.target,
        condition.residual,
        if condition.satisfied { "satisfied" } else { "not satisfied" }
    ));
    out.line(format!("orbit residual {residual:e} over {samples} samples, return gap {return_gap:e}"));
    out.line(format!("periodic: {}", if periodic_ok { "confirmed" } else { "not confirmed" }));
    if let Some(f) = &floquet {
        let moduli: Vec<String> = f.multipliers.iter().map(|m| format!("{:.6}", m.modulus())).collect();
        out.line(format!("Floquet multipliers |mu| = [{}], {:?}", moduli.join(", "), f.classification));
    }
    let report = PeriodicReport {
        command: "periodic",
        system: input,
        integrator: cfg,
        condition,
        period,
        radius: orbit.radius,
        orbit_residual: residual,
        residual_samples: samples,
        return_gap,
        return_tol: RETURN_TOL,
        periodic: periodic_ok,
        floquet,
    };
    out.files = Outcome::report("periodic", &report).files;
    Ok(out)
}
