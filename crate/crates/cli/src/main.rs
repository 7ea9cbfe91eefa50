use std::ffi::OsString;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qpainleve::hamiltonians::{build_hamiltonian_matrix, invariance_condition, verify_symmetry};
use qpainleve::hypergeom::{
    determinant_residual, determinant_solution, orthogonality_check, phi_m, phi_m_time_derivative,
    schrodinger_residual, verify_lemma_recurrences,
};
use qpainleve::kz::verify_theorem;
use qpainleve::ode::{integrate_segment, LinearSystem, Options};
use qpainleve::scalar::{gq, gq_to_complex, parse_gq};
use qpainleve::weights::{cjson, moments};
use qpainleve::{Error, Gq, PainleveKind, ParamSet, Params, C64};

const MAX_M: usize = 64;

#[derive(Parser)]
#[command(name = "qpl", version, about = "Quantum Painlevé Hamiltonians, integral solutions and KZ checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

/// Parameters as exact strings: "p/q", "p/q+r/s*i", decimals.
#[derive(Args, Clone, Debug)]
struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    d: Option<String>,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    hbar: String,
}

#[derive(Args, Clone, Debug)]
struct Quad {
    #[arg(long, allow_hyphen_values = true)]
    t: String,
    #[arg(long, default_value_t = 64)]
    nodes: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Source {
    Phi,
    Det,
}

#[derive(Subcommand)]
enum Cmd {
    /// Matrix of Ĥ_J on polynomials of degree ≤ m
    Matrix {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        p: ParamArgs,
    },
    /// Whether Ĥ_J preserves polynomials of degree ≤ m
    Invariance {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        p: ParamArgs,
    },
    /// Integrate ℏφ′ = M(t)φ from t0 to t1
    Integrate {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        p: ParamArgs,
        #[arg(long, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, allow_hyphen_values = true)]
        t1: f64,
        /// Initial coefficients, comma separated; seeded by quadrature when absent
        #[arg(long, allow_hyphen_values = true)]
        phi0: Option<String>,
        #[arg(long, default_value_t = 64)]
        nodes: usize,
        #[arg(long, default_value_t = 1e-10)]
        rtol: f64,
        #[arg(long, default_value_t = 1e-12)]
        atol: f64,
        #[arg(long, default_value_t = qpainleve::ode::DEFAULT_MARGIN)]
        margin: f64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Moments of the master function on its default contour
    Moments {
        #[arg(long)]
        kind: String,
        #[command(flatten)]
        p: ParamArgs,
        #[command(flatten)]
        q: Quad,
        #[arg(long, default_value_t = 8)]
        kmax: usize,
    },
    /// Coefficients of the integral solution Φ_m
    Phi {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        p: ParamArgs,
        #[command(flatten)]
        q: Quad,
        /// Report ∂ₜΦ_m instead
        #[arg(long)]
        derivative: bool,
    },
    /// Bordered Hankel determinant P_m (ℏ = 1)
    Det {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        p: ParamArgs,
        #[command(flatten)]
        q: Quad,
    },
    /// Schrödinger residual of Φ_m or P_m
    Residual {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        p: ParamArgs,
        #[command(flatten)]
        q: Quad,
        #[arg(long, value_enum, default_value_t = Source::Phi)]
        source: Source,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Normalized ∫P_m P_n ρ (ℏ = 1)
    Ortho {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        p: ParamArgs,
        #[command(flatten)]
        q: Quad,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Exact KZ correspondence check
    VerifyKz {
        #[arg(long)]
        case: String,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        p: ParamArgs,
    },
    /// Exact ℏ → −ℏ symmetry check (parameters are those of Ĥ′)
    VerifySymmetry {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        p: ParamArgs,
    },
    /// Quadrature check of the VI bracket recurrences
    VerifyLemma {
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        p: ParamArgs,
        #[command(flatten)]
        q: Quad,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::IdentityFailed(_) | Error::GaugeNotScalar(_) | Error::NotInSpan(_) => 1,
        Error::NoConvergentContour(_)
        | Error::NotConverged(_)
        | Error::BudgetExceeded { .. }
        | Error::StepUnderflow(_)
        | Error::SingularPoint(_)
        | Error::EliminationSingular => 3,
        Error::InvarianceViolated(_)
        | Error::BadParamShape(_)
        | Error::PoleAtT(_)
        | Error::SingularityInInterval(_)
        | Error::Parse(_)
        | Error::InvalidArgument(_) => 2,
    }
}

fn kind_of(s: &str) -> Result<PainleveKind, Error> {
    s.parse()
}

fn check_m(m: usize) -> Result<usize, Error> {
    if m > MAX_M {
        return Err(usage(format!("m must be at most {MAX_M}")));
    }
    Ok(m)
}

/// Exact parameters; `a` defaults to `default_a(ℏ)` when not given.
fn exact_params(kind: PainleveKind, p: &ParamArgs, default_a: impl Fn(&Gq) -> Gq) -> Result<Params, Error> {
    let hbar = parse_gq(&p.hbar)?;
    let parse = |v: &Option<String>| v.as_deref().map(parse_gq).transpose();
    let (a, b, c, d) = (parse(&p.a)?, parse(&p.b)?, parse(&p.c)?, parse(&p.d)?);
    let names = ["a", "b", "c", "d"];
    let given = [a.is_some(), b.is_some(), c.is_some(), d.is_some()];
    for (i, used) in kind.slots().iter().enumerate() {
        if !used && given[i] {
            return Err(Error::BadParamShape(format!("{kind} takes no parameter {}", names[i])));
        }
        if *used && i > 0 && !given[i] {
            return Err(usage(format!("{kind} needs --{}", names[i])));
        }
    }
    let a = a.unwrap_or_else(|| default_a(&hbar));
    let params = ParamSet { a: Some(a), b, c, d, hbar };
    params.validate(kind)?;
    Ok(params)
}

fn m_hbar(m: usize) -> impl Fn(&Gq) -> Gq {
    move |h: &Gq| h * gq(m as i64, 0)
}

fn float_params(p: &Params) -> ParamSet<C64> {
    p.map(gq_to_complex::<f64>)
}

fn positive_hbar(p: &Params) -> Result<u32, Error> {
    let h = &p.hbar;
    let v = (1..=16u32).find(|&k| *h == gq(k as i64, 0));
    v.ok_or_else(|| usage("quadrature needs hbar to be a positive integer (≤ 16)"))
}

fn unit_hbar(p: &Params) -> Result<(), Error> {
    if positive_hbar(p)? != 1 {
        return Err(usage("determinant formulas need hbar = 1"));
    }
    Ok(())
}

fn complex_arg(s: &str) -> Result<C64, Error> {
    Ok(gq_to_complex(&parse_gq(s)?))
}

fn emit(v: &Value) {
    println!("{}", serde_json::to_string(v).expect("JSON values serialize"));
}

fn verdict(pass: bool) -> u8 {
    if pass {
        0
    } else {
        1
    }
}

fn dispatch(cmd: Cmd) -> Result<u8, Error> {
    match cmd {
        Cmd::Matrix { kind, m, p } => {
            let kind = kind_of(&kind)?;
            let m = check_m(m)?;
            let params = exact_params(kind, &p, m_hbar(m))?;
            emit(&build_hamiltonian_matrix(kind, &params, m)?.to_json());
            Ok(0)
        }
        Cmd::Invariance { kind, m, p } => {
            let kind = kind_of(&kind)?;
            let m = check_m(m)?;
            let params = exact_params(kind, &p, m_hbar(m))?;
            let rep = invariance_condition(kind, &params, m)?;
            emit(&rep.to_json());
            Ok(verdict(rep.holds))
        }
        Cmd::Integrate { kind, m, p, t0, t1, phi0, nodes, rtol, atol, margin, format } => {
            let kind = kind_of(&kind)?;
            let m = check_m(m)?;
            if !(t0.is_finite() && t1.is_finite() && rtol > 0.0 && atol > 0.0 && margin >= 0.0) {
                return Err(usage("t0, t1 must be finite and rtol, atol positive"));
            }
            let params = exact_params(kind, &p, m_hbar(m))?;
            let pf = float_params(&params);
            let sys = LinearSystem::for_kind(kind, &pf, m)?;
            let start = match phi0 {
                Some(s) => {
                    let v = s.split(',').map(complex_arg).collect::<Result<Vec<_>, _>>()?;
                    if v.len() != m + 1 {
                        return Err(usage(format!("--phi0 needs {} entries", m + 1)));
                    }
                    v
                }
                None => phi_m(kind, &pf, positive_hbar(&params)?, m, C64::new(t0, 0.0), nodes)?.coeffs,
            };
            let opts = Options { margin, ..Options::new(rtol, atol) };
            let traj = integrate_segment(&sys, C64::new(t0, 0.0), C64::new(t1, 0.0), &start, &opts)?;
            match format {
                Format::Csv => print!("{}", traj.to_csv()),
                Format::Json => emit(&traj.to_json()),
            }
            Ok(0)
        }
        Cmd::Moments { kind, p, q, kmax } => {
            let kind = kind_of(&kind)?;
            if kmax > 4 * MAX_M {
                return Err(usage("kmax too large"));
            }
            let params = exact_params(kind, &p, |_| gq(0, 0))?;
            let tab = moments(kind, &float_params(&params), complex_arg(&q.t)?, kmax, q.nodes)?;
            emit(&tab.to_json());
            Ok(0)
        }
        Cmd::Phi { kind, m, p, q, derivative } => {
            let kind = kind_of(&kind)?;
            let m = check_m(m)?;
            let params = exact_params(kind, &p, m_hbar(m))?;
            let h = positive_hbar(&params)?;
            let (pf, t) = (float_params(&params), complex_arg(&q.t)?);
            let v = if derivative {
                phi_m_time_derivative(kind, &pf, h, m, t, q.nodes)?
            } else {
                phi_m(kind, &pf, h, m, t, q.nodes)?
            };
            emit(&v.to_json());
            Ok(0)
        }
        Cmd::Det { kind, m, p, q } => {
            let kind = kind_of(&kind)?;
            let m = check_m(m)?;
            let params = exact_params(kind, &p, m_hbar(m))?;
            unit_hbar(&params)?;
            let det = determinant_solution(kind, &float_params(&params), m, complex_arg(&q.t)?, q.nodes)?;
            emit(&det.to_json());
            Ok(0)
        }
        Cmd::Residual { kind, m, p, q, source, tol } => {
            let kind = kind_of(&kind)?;
            let m = check_m(m)?;
            let params = exact_params(kind, &p, m_hbar(m))?;
            let (pf, t) = (float_params(&params), complex_arg(&q.t)?);
            let r = match source {
                Source::Phi => schrodinger_residual(kind, &pf, positive_hbar(&params)?, m, t, q.nodes)?,
                Source::Det => {
                    unit_hbar(&params)?;
                    determinant_residual(kind, &pf, m, t, q.nodes)?
                }
            };
            let pass = r <= tol;
            emit(&json!({"kind": kind.to_string(), "m": m, "residual": r, "tol": tol, "pass": pass}));
            Ok(verdict(pass))
        }
        Cmd::Ortho { kind, m, n, p, q, tol } => {
            let kind = kind_of(&kind)?;
            let (m, n) = (check_m(m)?, check_m(n)?);
            let params = exact_params(kind, &p, |_| gq(0, 0))?;
            unit_hbar(&params)?;
            let v = orthogonality_check(kind, &float_params(&params), m, n, complex_arg(&q.t)?, q.nodes)?;
            let pass = v.norm() <= tol;
            emit(&json!({"kind": kind.to_string(), "m": m, "n": n, "value": cjson(&v), "abs": v.norm(), "tol": tol, "pass": pass}));
            Ok(verdict(pass))
        }
        Cmd::VerifyKz { case, m, p } => {
            let case = kind_of(&case)?;
            let m = check_m(m)?;
            let params = exact_params(case, &p, m_hbar(m))?;
            let rep = verify_theorem(case, &params, m)?;
            emit(&rep.to_json());
            Ok(verdict(rep.pass))
        }
        Cmd::VerifySymmetry { kind, m, p } => {
            let kind = kind_of(&kind)?;
            let m = check_m(m)?;
            let params = exact_params(kind, &p, |h| -m_hbar(m)(h))?;
            let rep = verify_symmetry(kind, &params, m)?;
            emit(&rep.to_json());
            Ok(verdict(rep.pass))
        }
        Cmd::VerifyLemma { m, p, q, tol } => {
            let m = check_m(m)?;
            let kind = PainleveKind::VI;
            let params = exact_params(kind, &p, m_hbar(m))?;
            let h = positive_hbar(&params)?;
            let rep = verify_lemma_recurrences(&float_params(&params), h, m, complex_arg(&q.t)?, q.nodes)?;
            let pass = rep.max_residual <= tol;
            let mut v = rep.to_json();
            v["pass"] = json!(pass);
            emit(&v);
            Ok(verdict(pass))
        }
    }
}

fn run(argv: Vec<OsString>) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match std::panic::catch_unwind(|| dispatch(cli.cmd)) {
        Ok(Ok(code)) => code,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            3
        }
    }
}

fn main() -> ExitCode {
    std::panic::set_hook(Box::new(|info| eprintln!("internal error: {info}")));
    ExitCode::from(run(std::env::args_os().collect()))
}
