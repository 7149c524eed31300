//! `secant` command-line front-end.
//!
//! Exit codes: 0 when the analysis completes (whatever its verdict), 1 for
//! input errors, 2 for internal numerical failures.

pub mod format;
pub mod nyquist;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use secant_core::cascade::{
    check_secant_condition, closed_loop_stable, cyclic_char_poly, cyclic_matrix_hurwitz, secant_threshold,
    CascadeError, CascadeSpec, SecantVerdict, BOUNDARY_REL_TOL,
};
use secant_core::passivity::{
    circle_certificate, hinf_gain, iqc_matrix, is_osp, is_spr, secant_gain, GainCertificate, PassivityError,
};
use secant_core::poly::{PolyError, Polynomial, RationalTransfer, StabilityVerdict};
use secant_core::simulate::{gain_ratio_of, loop_diagnostics, simulate_closed_loop, Scenario, SimError};

use format::{json_list, json_num, json_opt, num};

#[derive(Debug, Parser)]
#[command(
    name = "secant",
    version,
    about = "Secant-gain and cyclic-feedback stability analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Secant and H∞ gains of p(s)/q(s)
    Gain {
        #[arg(long, allow_hyphen_values = true)]
        num: String,
        #[arg(long, allow_hyphen_values = true)]
        den: String,
        #[arg(long)]
        json: bool,
        /// Also report OSP, SPR, the circle check and the IQC multiplier
        #[arg(long)]
        full: bool,
    },
    /// Strict positive realness of p(s)/q(s)
    Spr {
        #[arg(long, allow_hyphen_values = true)]
        num: String,
        #[arg(long, allow_hyphen_values = true)]
        den: String,
        #[arg(long)]
        json: bool,
    },
    /// Secant condition for a cascade under unity negative feedback
    Cascade {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Hurwitz test of the cyclic matrix with the given α and β
    Matrix {
        #[arg(long, allow_hyphen_values = true)]
        alphas: String,
        #[arg(long, allow_hyphen_values = true)]
        betas: String,
        #[arg(long)]
        json: bool,
    },
    /// Closed-loop simulation of a scenario file
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Nyquist curve CSV and SVG with the secant circle
    Nyquist {
        #[arg(long, allow_hyphen_values = true)]
        num: String,
        #[arg(long, allow_hyphen_values = true)]
        den: String,
        #[arg(long, allow_hyphen_values = true)]
        gamma: Option<f64>,
        /// Output path; `.csv` and `.svg` files are written next to it
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::Degenerate(_) => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<PassivityError> for CliError {
    fn from(e: PassivityError) -> Self {
        match e {
            PassivityError::Poly(p) => p.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<CascadeError> for CliError {
    fn from(e: CascadeError) -> Self {
        match e {
            CascadeError::Poly(p) => p.into(),
            CascadeError::Block {
                source: PassivityError::Poly(PolyError::Degenerate(_)),
                ..
            } => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Cascade(c) => c.into(),
            SimError::BlowUp { .. } | SimError::Domain { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

type CliResult = Result<(), CliError>;

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> CliResult {
    match cmd {
        Command::Gain { num, den, json, full } => gain(&num, &den, json, full, out),
        Command::Spr { num, den, json } => spr(&num, &den, json, out),
        Command::Cascade { spec, json } => cascade(&spec, json, out),
        Command::Matrix { alphas, betas, json } => matrix(&alphas, &betas, json, out),
        Command::Simulate {
            scenario,
            out: dir,
            json,
        } => simulate(&scenario, &dir, json, out),
        Command::Nyquist {
            num,
            den,
            gamma,
            out: path,
        } => nyquist_cmd(&num, &den, gamma, &path, out),
    }
}

fn emit(out: &mut dyn Write, text: &str) -> CliResult {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Input(format!("cannot write output: {e}")))
}

fn emit_json(out: &mut dyn Write, v: &Value) -> CliResult {
    emit(
        out,
        &format!("{}\n", serde_json::to_string_pretty(v).expect("JSON value")),
    )
}

fn parse_transfer(num: &str, den: &str) -> Result<RationalTransfer, CliError> {
    let p: Polynomial = num.parse().map_err(|e| CliError::Input(format!("--num: {e}")))?;
    let q: Polynomial = den.parse().map_err(|e| CliError::Input(format!("--den: {e}")))?;
    Ok(RationalTransfer::new(p, q)?)
}

fn parse_list(name: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| CliError::Input(format!("{name}: bad number {t:?}")))
        })
        .collect()
}

fn echo_transfer(raw_num: &str, raw_den: &str) -> Result<Value, CliError> {
    let p: Polynomial = raw_num.parse().map_err(|e| CliError::Input(format!("--num: {e}")))?;
    let q: Polynomial = raw_den.parse().map_err(|e| CliError::Input(format!("--den: {e}")))?;
    Ok(json!({"num": json_list(p.coeffs()), "den": json_list(q.coeffs())}))
}

fn cert_json(c: &GainCertificate) -> Value {
    json!({
        "gamma": json_num(c.gamma),
        "witness_omega": json_opt(c.witness_omega),
        "attained_at_infinity": c.attained_at_infinity,
        "degenerate": c.degenerate,
        "unbounded": c.unbounded.map(|r| format!("{r:?}")),
        "candidates": c.candidates.iter().map(|&(w, v)| json!([json_num(w), json_num(v)])).collect::<Vec<_>>(),
    })
}

fn where_attained(c: &GainCertificate) -> String {
    if let Some(r) = c.unbounded {
        format!(" ({})", unbounded_text(r))
    } else if c.degenerate {
        " (zero system)".into()
    } else if c.attained_at_infinity {
        " (approached as omega -> inf)".into()
    } else if let Some(w) = c.witness_omega {
        format!(" at omega = {}", num(w))
    } else {
        String::new()
    }
}

fn unbounded_text(r: secant_core::passivity::UnboundedReason) -> &'static str {
    use secant_core::passivity::UnboundedReason::*;
    match r {
        NotPassive => "Re G(i omega) <= 0 somewhere",
        RelativeDegree => "relative degree exceeds one",
        HighFrequencyRolloff => "Re G(i omega) decays faster than |G(i omega)|^2",
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn gain(raw_num: &str, raw_den: &str, as_json: bool, full: bool, out: &mut dyn Write) -> CliResult {
    let g = parse_transfer(raw_num, raw_den)?;
    let inputs = echo_transfer(raw_num, raw_den)?;
    let sec = secant_gain(&g)?;
    let hinf = hinf_gain(&g)?;
    let osp = is_osp(&g);
    let spr_status = is_spr(&g);
    let circle = if full && sec.is_finite() && sec.gamma > 0.0 {
        Some(circle_certificate(&g, sec.gamma, 4000)?)
    } else {
        None
    };
    let iqc = if full && sec.is_finite() && sec.gamma > 0.0 {
        Some(iqc_matrix(sec.gamma)?)
    } else {
        None
    };
    if as_json {
        let mut v = json!({
            "inputs": inputs,
            "secant_gain": cert_json(&sec),
            "hinf_gain": cert_json(&hinf),
        });
        if full {
            let o = v.as_object_mut().expect("object");
            o.insert("relative_degree".into(), json!(g.relative_degree()));
            o.insert("stable".into(), json!(g.is_stable()));
            o.insert(
                "osp".into(),
                json!({"is_osp": osp.is_osp, "reason": format!("{:?}", osp.reason)}),
            );
            o.insert(
                "spr".into(),
                json!({"is_spr": spr_status.is_spr, "failed_condition": spr_status.failed_condition.map(|f| format!("{f:?}"))}),
            );
            o.insert(
                "circle".into(),
                circle.as_ref().map_or(Value::Null, |c| {
                    json!({"passes": c.passes, "max_violation": json_num(c.max_violation),
                           "worst_omega": json_num(c.worst_omega), "samples": c.samples})
                }),
            );
            o.insert(
                "iqc_matrix".into(),
                iqc.map_or(Value::Null, |m| json!([json_list(&m[0]), json_list(&m[1])])),
            );
        }
        return emit_json(out, &v);
    }
    let mut s = format!(
        "num: {}\nden: {}\nsecant gain: {}{}\nhinf gain: {}{}\n",
        format::list(g.num().coeffs()),
        format::list(g.den().coeffs()),
        num(sec.gamma),
        where_attained(&sec),
        num(hinf.gamma),
        where_attained(&hinf)
    );
    if full {
        s += &format!(
            "relative degree: {}\nstable: {}\nOSP: {} ({:?})\nSPR: {}{}\n",
            g.relative_degree().map_or("none".to_string(), |d| d.to_string()),
            yes(g.is_stable()),
            yes(osp.is_osp),
            osp.reason,
            yes(spr_status.is_spr),
            spr_status
                .failed_condition
                .map_or(String::new(), |f| format!(" ({f:?})"))
        );
        match &circle {
            Some(c) => {
                s += &format!(
                    "circle |G - {}| <= {}: {} (max excess {} at omega = {}, {} samples)\n",
                    num(sec.gamma / 2.0),
                    num(sec.gamma / 2.0),
                    if c.passes { "holds" } else { "violated" },
                    num(c.max_violation),
                    num(c.worst_omega),
                    c.samples
                );
            }
            None => s += "circle: none (secant gain is not finite and positive)\n",
        }
        if let Some(m) = iqc {
            s += &format!(
                "IQC matrix: [[{}, {}], [{}, {}]]\n",
                num(m[0][0]),
                num(m[0][1]),
                num(m[1][0]),
                num(m[1][1])
            );
        }
    }
    emit(out, &s)
}

fn spr(raw_num: &str, raw_den: &str, as_json: bool, out: &mut dyn Write) -> CliResult {
    let g = parse_transfer(raw_num, raw_den)?;
    let st = is_spr(&g);
    if as_json {
        return emit_json(
            out,
            &json!({
                "inputs": echo_transfer(raw_num, raw_den)?,
                "is_spr": st.is_spr,
                "failed_condition": st.failed_condition.map(|f| format!("{f:?}")),
            }),
        );
    }
    emit(
        out,
        &format!(
            "num: {}\nden: {}\nSPR: {}{}\n",
            format::list(g.num().coeffs()),
            format::list(g.den().coeffs()),
            yes(st.is_spr),
            st.failed_condition.map_or(String::new(), |f| format!(" ({f:?})"))
        ),
    )
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn verdict_line(v: &SecantVerdict) -> String {
    let fmt3 = |x: f64| if x.is_finite() { format!("{x:.3}") } else { num(x) };
    let base = if v.passes {
        format!(
            "PASS: product {} < threshold {}",
            fmt3(v.product_gain),
            fmt3(v.threshold)
        )
    } else {
        format!(
            "FAIL: product {} >= threshold {}",
            fmt3(v.product_gain),
            fmt3(v.threshold)
        )
    };
    if v.boundary {
        base + " (at secant boundary)"
    } else {
        base
    }
}

fn verdict_json(v: &SecantVerdict) -> Value {
    json!({
        "gains": json_list(&v.gains),
        "product_gain": json_num(v.product_gain),
        "threshold": json_num(v.threshold),
        "passes": v.passes,
        "boundary": v.boundary,
        "margin": json_num(v.margin),
    })
}

fn stability_json(v: &StabilityVerdict) -> Value {
    json!({"stable": v.stable, "marginal": v.marginal, "sign_changes": v.sign_changes})
}

fn stability_text(v: &StabilityVerdict, at_boundary: bool) -> String {
    if v.stable {
        "stable".into()
    } else if v.marginal {
        if at_boundary {
            "marginal (at secant boundary)".into()
        } else {
            "marginal".into()
        }
    } else {
        format!("unstable ({} sign changes)", v.sign_changes)
    }
}

fn cascade(path: &Path, as_json: bool, out: &mut dyn Write) -> CliResult {
    let text = read_file(path)?;
    let spec = CascadeSpec::from_json(&text)?;
    let v = check_secant_condition(&spec)?;
    let closed = match spec.linear_blocks() {
        Some(tfs) => Some(closed_loop_stable(&tfs)?),
        None => None,
    };
    if as_json {
        let inputs: Value = serde_json::from_str(&spec.to_json()).expect("spec JSON");
        return emit_json(
            out,
            &json!({
                "inputs": inputs,
                "secant": verdict_json(&v),
                "closed_loop": closed.as_ref().map(stability_json),
            }),
        );
    }
    let mut s = verdict_line(&v) + "\n";
    s += &format!("blocks: {}\ngains: {}\n", spec.len(), format::list(&v.gains));
    s += &format!(
        "product: {}\nthreshold: {}\nmargin: {}\n",
        num(v.product_gain),
        num(v.threshold),
        num(v.margin)
    );
    if let Some(c) = &closed {
        s += &format!("closed-loop poles: {}\n", stability_text(c, v.boundary));
    }
    emit(out, &s)
}

fn matrix(raw_a: &str, raw_b: &str, as_json: bool, out: &mut dyn Write) -> CliResult {
    let alphas = parse_list("--alphas", raw_a)?;
    let betas = parse_list("--betas", raw_b)?;
    let verdict = cyclic_matrix_hurwitz(&alphas, &betas)?;
    let poly = cyclic_char_poly(&alphas, &betas)?;
    let threshold = secant_threshold(alphas.len())?;
    let ratio = betas.iter().product::<f64>() / alphas.iter().product::<f64>();
    let equal = alphas.iter().all(|a| (a - alphas[0]).abs() <= 1e-12 * alphas[0]);
    let at_boundary = equal && threshold.is_finite() && (ratio - threshold).abs() <= BOUNDARY_REL_TOL * threshold;
    if as_json {
        return emit_json(
            out,
            &json!({
                "inputs": {"alphas": json_list(&alphas), "betas": json_list(&betas)},
                "char_poly": json_list(poly.coeffs()),
                "hurwitz": stability_json(&verdict),
                "ratio": json_num(ratio),
                "threshold": json_num(threshold),
                "at_secant_boundary": at_boundary,
                "verdict": stability_text(&verdict, at_boundary),
            }),
        );
    }
    emit(
        out,
        &format!(
            "alphas: {}\nbetas: {}\nchar poly: {}\nprod beta / prod alpha: {}\nthreshold: {}\nverdict: {}\n",
            format::list(&alphas),
            format::list(&betas),
            format::list(poly.coeffs()),
            num(ratio),
            num(threshold),
            stability_text(&verdict, at_boundary)
        ),
    )
}

fn simulate(path: &Path, dir: &Path, as_json: bool, out: &mut dyn Write) -> CliResult {
    let sc = Scenario::from_json(&read_file(path)?)?;
    let u = sc.input_signal()?;
    let blocks = sc.blocks();
    let secant = check_secant_condition(&sc.spec);
    let closed = match sc.spec.linear_blocks() {
        Some(tfs) => Some(closed_loop_stable(&tfs)?),
        None => None,
    };
    fs::create_dir_all(dir).map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
    let write = |name: &str, body: &str| -> CliResult {
        let p = dir.join(name);
        fs::write(&p, body).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))
    };
    write("u.csv", &u.to_csv())?;

    let mut summary = json!({
        "inputs": serde_json::from_str::<Value>(&sc.to_json()).expect("scenario JSON"),
        "secant": match &secant {
            Ok(v) => verdict_json(v),
            Err(e) => json!({"error": e.to_string()}),
        },
        "closed_loop": closed.as_ref().map(stability_json),
        "assumption": "closed-loop well-posedness is assumed; blow-up is detected but boundedness is not certified",
    });
    let obj = summary.as_object_mut().expect("object");
    let mut text = match &secant {
        Ok(v) => verdict_line(v) + "\n",
        Err(e) => format!("secant condition: not applicable ({e})\n"),
    };
    if let Some(c) = &closed {
        text += &format!("closed-loop poles: {}\n", stability_text(c, false));
    }

    match simulate_closed_loop(&blocks, &u, true) {
        Ok(ys) => {
            for (i, y) in ys.iter().enumerate() {
                write(&format!("y{}.csv", i + 1), &y.to_csv())?;
            }
            let yn = ys.last().expect("nonempty cascade");
            let grid: Vec<f64> = (1..=10).map(|k| u.duration() * k as f64 / 10.0).collect();
            let ratio = gain_ratio_of(yn, &u, &grid)?;
            let diag = secant
                .as_ref()
                .ok()
                .and_then(|v| loop_diagnostics(&v.gains, &ys, u.duration()).ok());
            obj.insert("diverged".into(), json!(false));
            obj.insert("final_abs_yn".into(), json_num(yn.last().abs()));
            obj.insert("max_abs_yn".into(), json_num(yn.max_abs()));
            obj.insert("gain_ratio".into(), json_opt(ratio));
            obj.insert(
                "diagnostics".into(),
                diag.as_ref().map_or(Value::Null, |d| {
                    json!({"t": json_num(d.t), "angles": json_list(&d.angles), "alpha": json_num(d.alpha),
                           "kappa": json_num(d.kappa), "bound": json_opt(d.bound)})
                }),
            );
            text += &format!(
                "simulated {} s at dt = {}: final |y{}| = {}, max |y{}| = {}\n",
                num(u.duration()),
                num(u.dt()),
                ys.len(),
                num(yn.last().abs()),
                ys.len(),
                num(yn.max_abs())
            );
            if let Some(r) = ratio {
                text += &format!("max ||y_n||_T / ||u||_T: {}\n", num(r));
            }
            if let Some(d) = &diag {
                text += &format!("realized alpha = {}, kappa = {}\n", num(d.alpha), num(d.kappa));
            }
        }
        Err(SimError::BlowUp { time, max_abs }) => {
            obj.insert("diverged".into(), json!(true));
            obj.insert("blow_up_time".into(), json_num(time));
            obj.insert("blow_up_state".into(), json_num(max_abs));
            text += &format!("diverged: state magnitude {} at t = {}\n", num(max_abs), num(time));
        }
        Err(e) => return Err(e.into()),
    }
    let body = serde_json::to_string_pretty(&summary).expect("summary JSON") + "\n";
    write("summary.json", &body)?;
    text += &format!("wrote {}\n", dir.display());
    if as_json {
        emit(out, &body)
    } else {
        emit(out, &text)
    }
}

fn nyquist_cmd(raw_num: &str, raw_den: &str, gamma: Option<f64>, path: &Path, out: &mut dyn Write) -> CliResult {
    let g = parse_transfer(raw_num, raw_den)?;
    if let Some(gm) = gamma {
        if !(gm.is_finite() && gm > 0.0) {
            return Err(CliError::Input(format!(
                "--gamma must be positive and finite, got {gm}"
            )));
        }
    }
    let data = nyquist::nyquist_data(&g, gamma)?;
    let csv = path.with_extension("csv");
    let svg = path.with_extension("svg");
    for (p, body) in [(&csv, data.to_csv()), (&svg, data.to_svg())] {
        fs::write(p, body).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))?;
    }
    let circle = match data.gamma {
        Some(gm) => format!(
            "circle |s - {}| <= {}: {} of {} points outside\n",
            num(gm / 2.0),
            num(gm / 2.0),
            data.outside.len(),
            data.points.len()
        ),
        None => "circle: none (secant gain is infinite)\n".into(),
    };
    emit(
        out,
        &format!("{circle}wrote {}\nwrote {}\n", csv.display(), svg.display()),
    )
}
