//! One function per command. Each returns the report files it wants written
//! and the invariant violations it observed; nothing touches the disk here.

use std::fmt::Write as _;

use ltsharp::corpus::{corpus, CorpusEntry};
use ltsharp::linalg::c;
use ltsharp::ltbounds::{self, lt_ratio_with_spacing, phase_space_constant};
use ltsharp::scattering::{bound_states_from_det_a, default_kappa_max, resonance_screen};
use ltsharp::spectrum::{fd_eigensolve_1d_resolved, fd_eigensolve_1d_spacing};
use ltsharp::sumrules::sum_rule_report_with;
use ltsharp::{
    build_potential, classical_constant, fd_eigensolve_2d, lifting_chain_check, lt_ratio_2d, pauli_rhs, scattering_scan,
    Error, Field3d, LtReport, MatrixPotential, SpectrumResult,
};
use serde::Serialize;

use crate::config::{CommandKind, Format, RunConfig};

/// Largest accepted gap between det A zeros and finite-difference κ.
pub const KAPPA_AGREEMENT: f64 = 1e-4;

#[derive(Debug, Default)]
pub struct Outcome {
    /// `(file stem, format, contents)`.
    pub files: Vec<(String, Format, String)>,
    pub stdout: String,
    pub violations: Vec<String>,
}

impl Outcome {
    fn file(&mut self, stem: &str, format: Format, contents: String) {
        self.files.push((stem.to_string(), format, contents));
    }

    fn text<T: Serialize>(&mut self, stem: &str, value: &T) -> Result<(), CommandError> {
        let body = toml::to_string(value).map_err(|e| CommandError::Input(format!("cannot render report: {e}")))?;
        self.file(stem, Format::Text, body);
        Ok(())
    }

    fn violate(&mut self, msg: impl Into<String>) {
        self.violations.push(msg.into());
    }
}

#[derive(Debug)]
pub enum CommandError {
    Input(String),
    Numerics(Error),
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        CommandError::Numerics(e)
    }
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CommandError::Input(s) => write!(f, "{s}"),
            CommandError::Numerics(e) => write!(f, "{e}"),
        }
    }
}

type Res<T> = Result<T, CommandError>;

fn need_1d(cfg: &RunConfig) -> Res<MatrixPotential> {
    let spec = cfg
        .potential_1d()
        .ok_or_else(|| CommandError::Input("this command needs a potential (--potential or [potential])".into()))?;
    Ok(build_potential(&spec)?)
}

fn need_2d(cfg: &RunConfig) -> Res<(ltsharp::Potential2dSpec, ltsharp::Box2d)> {
    let v = cfg
        .potential_2d
        .clone()
        .ok_or_else(|| CommandError::Input("this command needs a 2D potential ([potential_2d])".into()))?;
    v.validate()?;
    let bx = cfg.box_for(&v);
    Ok((v, bx))
}

pub fn run_command(kind: CommandKind, cfg: &RunConfig) -> Res<Outcome> {
    match kind {
        CommandKind::Eig => eig(cfg),
        CommandKind::Scatter => scatter(cfg),
        CommandKind::Sumrules => sumrules(cfg),
        CommandKind::Ltcheck => ltcheck(cfg),
        CommandKind::Weyl => weyl(cfg),
        CommandKind::Lift => lift(cfg),
        CommandKind::Constants => constants(cfg),
        CommandKind::PauliRhs => pauli(cfg),
    }
}

fn spectrum_1d(v: &MatrixPotential, cfg: &RunConfig) -> Res<SpectrumResult> {
    let n = &cfg.numerics;
    Ok(match n.pad {
        Some(pad) => fd_eigensolve_1d_spacing(v, pad, n.spacing)?,
        None => fd_eigensolve_1d_resolved(v, n.spacing)?,
    })
}

/// Compares finite-difference levels with det A zeros; `None` when the
/// potential fails the resonance screen.
fn kappa_comparison(v: &MatrixPotential, s: &SpectrumResult) -> Res<Option<(f64, bool)>> {
    if let Err(e) = resonance_screen(v) {
        log::warn!("skipping the det A cross-check: {e}");
        return Ok(None);
    }
    let zeros = bound_states_from_det_a(v, default_kappa_max(v), 1e-12)?;
    let fd = s.kappas();
    let mults_match = zeros.kappas.len() == fd.len()
        && zeros.multiplicities.iter().zip(&s.multiplicities).all(|(a, b)| a == b)
        && zeros.unresolved.is_empty();
    let gap = zeros
        .kappas
        .iter()
        .zip(&fd)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(Some((if mults_match { gap } else { f64::INFINITY }, mults_match)))
}

fn eig(cfg: &RunConfig) -> Res<Outcome> {
    let mut out = Outcome::default();
    let s = if cfg.numerics.d == 2 {
        let (v, bx) = need_2d(cfg)?;
        fd_eigensolve_2d(&v, &bx, cfg.numerics.grid_points)?
    } else {
        let v = need_1d(cfg)?;
        let s = spectrum_1d(&v, cfg)?;
        if let Some((gap, ok)) = kappa_comparison(&v, &s)? {
            if !ok || gap > KAPPA_AGREEMENT {
                out.violate(format!("det A zeros and finite-difference levels disagree (gap {gap:.3e})"));
            }
        }
        s
    };
    let _ = writeln!(out.stdout, "{} negative level(s)", s.len());
    for (l, m) in s.richardson_estimate.iter().zip(&s.multiplicities) {
        let _ = writeln!(out.stdout, "  lambda = {l:.10}  multiplicity {m}");
    }
    out.file("spectrum", Format::Csv, s.to_csv());
    out.text("spectrum", &s)?;
    Ok(out)
}

#[derive(Serialize)]
struct ScatterSummary {
    points: usize,
    failures: usize,
    max_res_d: f64,
    max_res_d1: f64,
    max_res_e: f64,
}

fn scatter(cfg: &RunConfig) -> Res<Outcome> {
    let n = &cfg.numerics;
    if !(n.k_min > 0.0 && n.k_max > n.k_min && n.k_points >= 2) {
        return Err(CommandError::Input("need 0 < k_min < k_max and k_points >= 2".into()));
    }
    let v = need_1d(cfg)?;
    let step = (n.k_max - n.k_min) / (n.k_points - 1) as f64;
    let grid: Vec<_> = (0..n.k_points).map(|i| c(n.k_min + i as f64 * step, 0.0)).collect();
    let data = scattering_scan(&v, &grid)?;
    let r = data.max_residuals();
    let summary = ScatterSummary {
        points: grid.len(),
        failures: data.failures().count(),
        max_res_d: r.d,
        max_res_d1: r.d1,
        max_res_e: r.e,
    };
    let mut out = Outcome::default();
    for (k, e) in data.failures() {
        out.violate(format!("scattering data failed at k = {k}: {e}"));
    }
    if r.d.max(r.d1).max(r.e) > n.residual_tol {
        out.violate(format!(
            "scattering relations violated: D {:.2e}, D1 {:.2e}, E {:.2e} > {:.1e}",
            r.d, r.d1, r.e, n.residual_tol
        ));
    }
    let _ = writeln!(out.stdout, "max residuals: D {:.3e}  D1 {:.3e}  E {:.3e}", r.d, r.d1, r.e);
    out.file("scattering", Format::Csv, data.to_csv());
    out.text("scattering", &summary)?;
    Ok(out)
}

fn sumrules(cfg: &RunConfig) -> Res<Outcome> {
    let v = need_1d(cfg)?;
    let rep = sum_rule_report_with(&v, cfg.numerics.quadrature_tol)?;
    let mut out = Outcome::default();
    for (i, r) in rep.residuals.iter().enumerate() {
        if *r > cfg.numerics.sumrule_tol {
            out.violate(format!("sum rule {} residual {r:.3e} > {:.1e}", i + 1, cfg.numerics.sumrule_tol));
        }
    }
    for (name, value) in [("I0", rep.i0), ("I2", rep.i2), ("I4", rep.i4)] {
        if value < 0.0 {
            out.violate(format!("{name} = {value:.3e} is negative"));
        }
    }
    out.stdout = rep.to_text();
    out.file("sumrules", Format::Csv, rep.to_csv());
    out.file("sumrules", Format::Text, rep.to_text());
    Ok(out)
}

fn lt_csv(rows: &[(Option<f64>, &LtReport)]) -> String {
    let with_alpha = rows.iter().any(|r| r.0.is_some());
    let mut s = String::new();
    if with_alpha {
        s.push_str("alpha,");
    }
    s.push_str(LtReport::CSV_HEADER);
    s.push('\n');
    for (alpha, r) in rows {
        if let Some(a) = alpha {
            let _ = write!(s, "{a},");
        }
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

fn check_lt(out: &mut Outcome, r: &LtReport, label: &str) {
    if r.sharp_claim && !r.within_bound() {
        out.violate(format!(
            "{label}: Lieb-Thirring ratio {:.8} exceeds 1 + slack ({:.2e})",
            r.ratio, r.slack
        ));
    }
}

fn ltcheck(cfg: &RunConfig) -> Res<Outcome> {
    let n = &cfg.numerics;
    let r = match n.d {
        1 => lt_ratio_with_spacing(&need_1d(cfg)?, n.gamma, n.spacing)?,
        2 => {
            let (v, bx) = need_2d(cfg)?;
            lt_ratio_2d(&v, &bx, n.grid_points, n.gamma)?
        }
        d => return Err(CommandError::Input(format!("ltcheck supports d = 1 or 2 (got {d})"))),
    };
    let mut out = Outcome::default();
    check_lt(&mut out, &r, "ltcheck");
    if !r.sharp_claim {
        let _ = writeln!(out.stdout, "note: gamma < 3/2, no sharp-constant claim");
    }
    let _ = writeln!(out.stdout, "ratio = {:.10} (slack {:.2e})", r.ratio, r.slack);
    out.file("lt", Format::Csv, lt_csv(&[(None, &r)]));
    out.text("lt", &r)?;
    Ok(out)
}

fn weyl(cfg: &RunConfig) -> Res<Outcome> {
    let n = &cfg.numerics;
    let spec = cfg.potential_1d().unwrap_or_else(ltbounds::weyl_well);
    let scan = ltbounds::weyl_scan(&spec, n.gamma, &n.alphas)?;
    let mut out = Outcome::default();
    if !scan.is_nondecreasing(1e-3) {
        out.violate(format!("Weyl ratios decrease: {:?}", scan.ratios()));
    }
    let is_well = matches!(spec, ltsharp::PotentialSpec::SquareWell { .. });
    let last = scan.ratios().last().copied().unwrap_or(0.0);
    if is_well && n.alphas.last().is_some_and(|&a| a >= 400.0) && last < 0.9 {
        out.violate(format!("Weyl ratio at the largest coupling is {last:.4} < 0.9"));
    }
    for r in &scan.reports {
        check_lt(&mut out, r, "weyl");
    }
    for (a, r) in scan.alphas.iter().zip(&scan.reports) {
        let _ = writeln!(out.stdout, "alpha = {a:>8}  ratio = {:.6}", r.ratio);
    }
    let rows: Vec<_> = scan.alphas.iter().zip(&scan.reports).map(|(&a, r)| (Some(a), r)).collect();
    out.file("weyl", Format::Csv, lt_csv(&rows));
    out.text("weyl", &scan)?;
    Ok(out)
}

fn lift(cfg: &RunConfig) -> Res<Outcome> {
    let (v, bx) = need_2d(cfg)?;
    let ch = lifting_chain_check(&v, &bx, cfg.numerics.grid_points, cfg.numerics.gamma)?;
    let mut out = Outcome::default();
    for link in ch.failing_links() {
        out.violate(format!("lifting chain broken at {link:?}"));
    }
    let names = ["full", "operator_valued", "slice_bound", "classical"];
    let coarse = [ch.full.coarse, ch.operator_valued.coarse, ch.slice_bound.coarse, ch.classical];
    let mut csv = String::from("quantity,coarse,fine,link_slack\n");
    let slacks = ch.slacks();
    for (i, (name, value)) in names.iter().zip(ch.values()).enumerate() {
        let slack = slacks.get(i).map_or(String::new(), |s| s.to_string());
        let _ = writeln!(csv, "{name},{},{value},{slack}", coarse[i]);
        let _ = writeln!(out.stdout, "{name:>16}: {value:.10}");
    }
    out.file("lift", Format::Csv, csv);
    out.text("lift", &ch)?;
    Ok(out)
}

#[derive(Serialize)]
struct ConstantRow {
    gamma: f64,
    d: u32,
    lcl: f64,
    phase_space: f64,
    residual: f64,
}

fn constants(cfg: &RunConfig) -> Res<Outcome> {
    let (gamma, d) = (cfg.numerics.gamma, cfg.numerics.d);
    let lcl = classical_constant(gamma, d)?;
    let phase_space = phase_space_constant(gamma, d)?;
    let row = ConstantRow {
        gamma,
        d,
        lcl,
        phase_space,
        residual: (lcl - phase_space).abs() / lcl,
    };
    let mut out = Outcome::default();
    if row.residual > 1e-8 {
        out.violate(format!("phase-space quadrature differs by {:.2e}", row.residual));
    }
    let _ = writeln!(out.stdout, "{lcl}");
    out.file(
        "constants",
        Format::Csv,
        format!("gamma,d,Lcl,phase_space,residual\n{},{},{},{},{}\n", gamma, d, lcl, phase_space, row.residual),
    );
    out.text("constants", &row)?;
    Ok(out)
}

fn pauli(cfg: &RunConfig) -> Res<Outcome> {
    let p = &cfg.pauli;
    if p.nodes < 2 || !(p.side > 0.0) {
        return Err(CommandError::Input("pauli needs nodes >= 2 and side > 0".into()));
    }
    let h = p.side / (p.nodes - 1) as f64;
    let shape = [p.nodes; 3];
    let v = Field3d::from_fn(shape, [0.0; 3], [h; 3], |_, _, _| p.v);
    let b = Field3d::from_fn(shape, [0.0; 3], [h; 3], |_, _, _| p.b);
    let value = pauli_rhs(&v, &b, cfg.numerics.gamma)?;
    let mut out = Outcome::default();
    let _ = writeln!(out.stdout, "{value}");
    out.file("pauli", Format::Csv, format!("gamma,value\n{},{}\n", cfg.numerics.gamma, value));
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct CorpusRow {
    pub name: String,
    pub n: usize,
    pub smooth: bool,
    pub levels: usize,
    pub total_multiplicity: usize,
    pub kappa_gap: f64,
    pub multiplicity_match: bool,
    pub max_res_d: f64,
    pub max_res_d1: f64,
    pub max_res_e: f64,
    pub sumrule_residual: f64,
    pub lt_ratio: f64,
    pub lt_within_bound: bool,
}

const CORPUS_HEADER: &str = "name,n,smooth,levels,total_multiplicity,kappa_gap,multiplicity_match,\
max_res_D,max_res_D1,max_res_E,sumrule_residual,lt_ratio,lt_within_bound";

fn corpus_row(e: &CorpusEntry, cfg: &RunConfig, out: &mut Outcome) -> Res<CorpusRow> {
    let v = build_potential(&e.spec)?;
    let s = fd_eigensolve_1d_resolved(&v, cfg.numerics.spacing)?;
    let (gap, mult_ok) = kappa_comparison(&v, &s)?.unwrap_or((f64::NAN, false));
    if !mult_ok || !(gap <= KAPPA_AGREEMENT) {
        out.violate(format!("{}: bound-state correspondence fails (gap {gap:.2e})", e.name));
    }
    let n = &cfg.numerics;
    let grid: Vec<_> = (0..64).map(|i| c(0.25 + i as f64 * (32.0 - 0.25) / 63.0, 0.0)).collect();
    let res = scattering_scan(&v, &grid)?.max_residuals();
    if e.is_smooth() && res.d.max(res.d1).max(res.e) > n.residual_tol {
        out.violate(format!("{}: scattering relations above tolerance", e.name));
    }
    let sumrule_residual = if e.is_smooth() && e.spec.dim() <= 2 {
        let r = sum_rule_report_with(&v, n.quadrature_tol)?.max_residual();
        if r > n.sumrule_tol {
            out.violate(format!("{}: sum rule residual {r:.2e}", e.name));
        }
        r
    } else {
        f64::NAN
    };
    let lt = lt_ratio_with_spacing(&v, n.gamma, n.spacing)?;
    check_lt(out, &lt, &e.name);
    Ok(CorpusRow {
        name: e.name.clone(),
        n: e.spec.dim(),
        smooth: e.is_smooth(),
        levels: s.len(),
        total_multiplicity: s.total_multiplicity(),
        kappa_gap: gap,
        multiplicity_match: mult_ok,
        max_res_d: res.d,
        max_res_d1: res.d1,
        max_res_e: res.e,
        sumrule_residual,
        lt_ratio: lt.ratio,
        lt_within_bound: lt.within_bound(),
    })
}

/// The built-in corpus end to end, one summary row per potential.
pub fn run_corpus(cfg: &RunConfig) -> Res<Outcome> {
    let mut out = Outcome::default();
    let mut csv = format!("{CORPUS_HEADER}\n");
    let _ = writeln!(
        out.stdout,
        "{:<18} {:>2} {:>6} {:>10} {:>5} {:>10} {:>10} {:>8}",
        "name", "n", "levels", "kappa_gap", "mult", "max_res", "sumrule", "lt_ratio"
    );
    for e in corpus() {
        let r = corpus_row(&e, cfg, &mut out)?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.name,
            r.n,
            r.smooth,
            r.levels,
            r.total_multiplicity,
            r.kappa_gap,
            r.multiplicity_match,
            r.max_res_d,
            r.max_res_d1,
            r.max_res_e,
            r.sumrule_residual,
            r.lt_ratio,
            r.lt_within_bound
        );
        let _ = writeln!(
            out.stdout,
            "{:<18} {:>2} {:>6} {:>10.2e} {:>5} {:>10.2e} {:>10} {:>8.5}",
            r.name,
            r.n,
            r.levels,
            r.kappa_gap,
            r.multiplicity_match,
            r.max_res_d.max(r.max_res_d1).max(r.max_res_e),
            if r.sumrule_residual.is_nan() {
                "-".to_string()
            } else {
                format!("{:.2e}", r.sumrule_residual)
            },
            r.lt_ratio
        );
    }
    out.file("corpus", Format::Csv, csv);
    Ok(out)
}
