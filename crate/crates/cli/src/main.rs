//! Command-line front end: one subcommand per library operation, JSON on
//! stdout, and a JSON error object on stderr with a nonzero exit code.

use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use tubular::algebra::{build_c4, euler_data, validate_spec, AlgebraSpec, PathAlgebra};
use tubular::error::{Error, Result};
use tubular::irrational::QuadIrrational;
use tubular::lattice::{DimVector, K0Lattice};
use tubular::omega::enumerate_omega;
use tubular::pp::{free_realisation, pair_open_on, PpFormula, PpPair};
use tubular::rational::{format_q, parse_q, Q};
use tubular::rep::{ext2_dim, ext_dim, hom_dim, module_slope, validate, Representation};
use tubular::search::{
    delta_for, gap_vector, p_bound, quasisimple_bounds, tube_parameters, verify_gap_certificate, GapCertificate,
};

/// Environment variable naming a directory that receives a copy of each
/// result as `<subcommand>.json`.
const OUTPUT_DIR_ENV: &str = "TUBULAR_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "tubular", version, about = "Exact computations for the tubular algebra C(4, λ)")]
struct Cli {
    /// Algebra spec file; defaults to the built-in C(4, λ).
    #[arg(long, global = true)]
    algebra: Option<PathBuf>,
    /// λ for the built-in algebra, as "p/q".
    #[arg(long, global = true, default_value = "2")]
    lambda: String,
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the consistency checks on the algebra.
    ValidateAlgebra,
    /// ⟨x, y⟩, or χ(x) when `--y` is omitted.
    Euler {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: Option<String>,
    },
    /// Slope of a dimension vector or of a representation file.
    Slope {
        #[arg(long, conflicts_with = "module")]
        vec: Option<String>,
        module: Option<PathBuf>,
    },
    /// Enumerate Ω.
    Omega,
    /// Write x = a·h0 + b·h∞ + y with y ∈ Ω.
    Decompose {
        #[arg(long)]
        vec: String,
    },
    /// Certified gap vector below r.
    GapSearch {
        #[arg(long)]
        r: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        k: i64,
    },
    /// δ for which perturbed radical slopes near r force b/a near r.
    Delta {
        #[arg(long)]
        r: String,
        #[arg(long)]
        eps: String,
    },
    /// The constant p; with `--a --b --n-rho`, also the quasisimple bounds.
    PBound {
        #[arg(long, requires_all = ["b", "n_rho"])]
        a: Option<i64>,
        #[arg(long)]
        b: Option<i64>,
        #[arg(long)]
        n_rho: Option<i64>,
    },
    /// Tube parameters for slope just below r.
    TubeParams {
        #[arg(long)]
        r: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        d: i64,
    },
    /// dim Hom(M, N).
    Hom { m: PathBuf, n: PathBuf },
    /// dim Ext¹(M, N) and dim Ext²(M, N).
    Ext { m: PathBuf, n: PathBuf },
    /// Solution space φ(M).
    PpEval { phi: PathBuf, module: PathBuf },
    /// Free realisation of φ.
    PpFree { phi: PathBuf },
    /// Whether the pair φ/ψ is open on M.
    PpPair { phi: PathBuf, psi: PathBuf, module: PathBuf },
    /// Revalidate a stored gap certificate.
    Certify { certificate: PathBuf },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::ValidateAlgebra => "validate-algebra",
            Command::Euler { .. } => "euler",
            Command::Slope { .. } => "slope",
            Command::Omega => "omega",
            Command::Decompose { .. } => "decompose",
            Command::GapSearch { .. } => "gap-search",
            Command::Delta { .. } => "delta",
            Command::PBound { .. } => "p-bound",
            Command::TubeParams { .. } => "tube-params",
            Command::Hom { .. } => "hom",
            Command::Ext { .. } => "ext",
            Command::PpEval { .. } => "pp-eval",
            Command::PpFree { .. } => "pp-free",
            Command::PpPair { .. } => "pp-pair",
            Command::Certify { .. } => "certify",
        }
    }
}

fn read(path: &FsPath) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_algebra(cli: &Cli) -> Result<AlgebraSpec> {
    let lambda = parse_q(&cli.lambda)?;
    match &cli.algebra {
        Some(path) => {
            let mut spec = AlgebraSpec::from_json(&read(path)?)?;
            if spec.lambda.is_some() {
                spec.lambda = Some(lambda);
            }
            Ok(spec)
        }
        None => build_c4(lambda),
    }
}

/// `h0`, `hinf`, `e1`..`en`, or a JSON integer array.
fn parse_vector(lat: &K0Lattice, text: &str) -> Result<DimVector> {
    let t = text.trim();
    let n = lat.rank();
    let v = match t {
        "h0" => lat.h0().clone(),
        "hinf" => lat.hinf().clone(),
        _ if t.starts_with('e') => {
            let i: usize = t[1..].parse().map_err(|_| Error::Parse(format!("unknown vector name {t:?}")))?;
            if i == 0 || i > n {
                return Err(Error::Domain(format!("{t} is not a vertex of a rank-{n} lattice")));
            }
            DimVector::unit(n, i - 1)
        }
        _ => DimVector(serde_json::from_str(t).map_err(|e| Error::Parse(format!("vector {t:?}: {e}")))?),
    };
    if v.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: v.len() });
    }
    Ok(v)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("output values serialize")
}

fn q_strings(vs: &[Vec<Q>]) -> Value {
    Value::Array(vs.iter().map(|v| Value::Array(v.iter().map(|x| Value::String(format_q(x))).collect())).collect())
}

fn run(cli: &Cli) -> Result<Value> {
    let spec = load_algebra(cli)?;
    let out = match &cli.command {
        Command::ValidateAlgebra => {
            let report = validate_spec(&spec);
            if !report.passed() {
                return report.into_result().map(|_| Value::Null);
            }
            to_value(&report)
        }
        Command::Euler { x, y } => {
            let lat = spec.lattice()?;
            let x = parse_vector(&lat, x)?;
            match y {
                Some(y) => json!(lat.bilinear(&x, &parse_vector(&lat, y)?)?),
                None => json!(lat.quadratic(&x)?),
            }
        }
        Command::Slope { vec, module } => {
            let lat = spec.lattice()?;
            let slope = match (vec, module) {
                (Some(v), None) => lat.slope(&parse_vector(&lat, v)?)?,
                (None, Some(path)) => {
                    let rep = Representation::from_json(&spec, &read(path)?)?;
                    validate(&spec, &rep)?;
                    module_slope(&lat, &rep)?
                }
                _ => return Err(Error::Parse("give either --vec or a representation file".into())),
            };
            to_value(&slope)
        }
        Command::Omega => to_value(&enumerate_omega(&spec)?),
        Command::Decompose { vec } => {
            let lat = spec.lattice()?;
            let omega = enumerate_omega(&spec)?;
            let (a, b, y) = omega.unit_decompose(&lat, &parse_vector(&lat, vec)?)?;
            json!({ "a": a, "b": b, "y": y })
        }
        Command::GapSearch { r, eps, k } => {
            let lat = spec.lattice()?;
            to_value(&gap_vector(&lat, &QuadIrrational::parse(r)?, &parse_q(eps)?, *k)?)
        }
        Command::Delta { r, eps } => {
            let lat = spec.lattice()?;
            let omega = enumerate_omega(&spec)?;
            to_value(&delta_for(&lat, &omega, &QuadIrrational::parse(r)?, &parse_q(eps)?)?)
        }
        Command::PBound { a, b, n_rho } => {
            let lat = spec.lattice()?;
            let omega = enumerate_omega(&spec)?;
            let pb = p_bound(&lat, &omega)?;
            match (a, b, n_rho) {
                (Some(a), Some(b), Some(n)) => {
                    let bounds = quasisimple_bounds(&lat, &omega, pb.p, *a, *b, *n)?;
                    json!({ "p_bound": to_value(&pb), "quasisimple": to_value(&bounds) })
                }
                _ => to_value(&pb),
            }
        }
        Command::TubeParams { r, eps, d } => {
            let lat = spec.lattice()?;
            let omega = enumerate_omega(&spec)?;
            to_value(&tube_parameters(&lat, &omega, &QuadIrrational::parse(r)?, &parse_q(eps)?, *d)?)
        }
        Command::Hom { m, n } => {
            let (m, n) = two_modules(&spec, m, n)?;
            json!({ "hom": hom_dim(&spec, &m, &n)? })
        }
        Command::Ext { m, n } => {
            let alg = PathAlgebra::new(&spec)?;
            let (m, n) = two_modules(&spec, m, n)?;
            let e = euler_data(&spec)?.euler_matrix;
            let euler: i64 = (0..m.dims.len())
                .flat_map(|i| (0..n.dims.len()).map(move |j| (i, j)))
                .map(|(i, j)| m.dims[i] as i64 * e[i][j] * n.dims[j] as i64)
                .sum();
            json!({
                "hom": hom_dim(&spec, &m, &n)?,
                "ext1": ext_dim(&alg, &m, &n)?,
                "ext2": ext2_dim(&alg, &m, &n)?,
                "euler": euler,
            })
        }
        Command::PpEval { phi, module } => {
            let phi = PpFormula::from_json(&spec, &read(phi)?)?;
            let m = load_module(&spec, module)?;
            let basis = phi.solution_space(&spec, &m)?;
            json!({ "dimension": basis.len(), "ambient": phi.free_dim(&m), "basis": q_strings(&basis) })
        }
        Command::PpFree { phi } => {
            let alg = PathAlgebra::new(&spec)?;
            let phi = PpFormula::from_json(&spec, &read(phi)?)?;
            let pm = free_realisation(&alg, &phi)?;
            json!({
                "module": to_value(&pm.module.to_file(&spec)),
                "vertex": pm.vertex + 1,
                "point": q_strings(std::slice::from_ref(&pm.point))[0].clone(),
            })
        }
        Command::PpPair { phi, psi, module } => {
            let pair = PpPair {
                phi: PpFormula::from_json(&spec, &read(phi)?)?,
                psi: PpFormula::from_json(&spec, &read(psi)?)?,
            };
            let m = load_module(&spec, module)?;
            let open = pair_open_on(&spec, &pair, &m)?;
            json!({
                "open": open,
                "phi_dimension": pair.phi.solution_space(&spec, &m)?.len(),
                "psi_dimension": pair.psi.solution_space(&spec, &m)?.len(),
            })
        }
        Command::Certify { certificate } => {
            let lat = spec.lattice()?;
            let cert: GapCertificate =
                serde_json::from_str(&read(certificate)?).map_err(|e| Error::Parse(format!("certificate: {e}")))?;
            verify_gap_certificate(&lat, &cert)?;
            json!({ "accepted": true, "a": cert.a, "b": cert.b, "slope": to_value(&cert.slope) })
        }
    };
    Ok(out)
}

fn load_module(spec: &AlgebraSpec, path: &FsPath) -> Result<Representation> {
    let rep = Representation::from_json(spec, &read(path)?)?;
    validate(spec, &rep)?;
    Ok(rep)
}

fn two_modules(spec: &AlgebraSpec, m: &FsPath, n: &FsPath) -> Result<(Representation, Representation)> {
    Ok((load_module(spec, m)?, load_module(spec, n)?))
}

fn render(v: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(v).expect("json renders")
    } else {
        serde_json::to_string(v).expect("json renders")
    }
}

fn fail(kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({ "error": { "kind": kind, "message": message } }));
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim()),
    };
    match run(&cli) {
        Ok(v) => {
            let text = render(&v, cli.pretty);
            if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
                let path = PathBuf::from(dir).join(format!("{}.json", cli.command.name()));
                if let Err(e) = std::fs::write(&path, format!("{text}\n")) {
                    return fail("io", &format!("{}: {e}", path.display()));
                }
            }
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.kind(), &e.to_string()),
    }
}
