use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qdm_core::equivalence::{equivalence_verdict, DEFAULT_MAX_LEN, DEFAULT_TOL};
use qdm_core::gauge::{apply_gauge, eta_kraus, is_hptp, max_depolarizing_f, GaugeTransform};
use qdm_core::io;
use qdm_core::model::{check_physical_with, DensityMatrix, Effect, ModelRepresentation};
use qdm_core::probability::{probability_table_with, DEFAULT_TABLE_CAP};
use qdm_core::projections::{projection_set_pi, projection_set_pi_qpt};
use qdm_core::random::{random_channel, random_model, rng_from_seed, RandomModelOptions};
use qdm_core::tol::Tolerances;
use qdm_core::tomography::{collect_dataset, gauge_to_prior, lgst_reconstruct, FiducialFrame, GstDataset};
use qdm_core::uniqueness::{assess, counterexample};
use qdm_core::{classify_transform, linalg, Error};

const EXIT_FALSE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser)]
#[command(name = "qdm", version, about = "Quantum device models: physicality, gauge freedom, uniqueness and LGST")]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args)]
#[command(next_help_heading = "Tolerances")]
struct TolArgs {
    #[arg(long, global = true)]
    tol_herm: Option<f64>,
    #[arg(long, global = true)]
    tol_trace: Option<f64>,
    #[arg(long, global = true)]
    tol_psd: Option<f64>,
    #[arg(long, global = true)]
    tol_prob: Option<f64>,
    #[arg(long, global = true)]
    tol_unitary: Option<f64>,
    /// Fail instead of clamping when a probability leaves [0, 1]
    #[arg(long, global = true)]
    strict: bool,
}

impl TolArgs {
    fn resolve(&self) -> Result<Tolerances, Error> {
        let mut t = Tolerances::default();
        for (slot, v) in [
            (&mut t.herm, self.tol_herm),
            (&mut t.trace, self.tol_trace),
            (&mut t.psd, self.tol_psd),
            (&mut t.prob, self.tol_prob),
            (&mut t.unitary, self.tol_unitary),
        ] {
            if let Some(v) = v {
                if !(v >= 0.0 && v.is_finite()) {
                    return Err(Error::InvalidArgument(format!("tolerance {v} must be finite and >= 0")));
                }
                *slot = v;
            }
        }
        t.strict = self.strict;
        Ok(t)
    }
}

#[derive(Args)]
struct OutArgs {
    /// Write to a file instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random physical model, or one built on the projection sets
    Gen {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        states: Option<usize>,
        #[arg(long, default_value_t = 2)]
        maps: usize,
        #[arg(long)]
        effects: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// States and effects are the d^2 pair projections
        #[arg(long, conflicts_with = "pi")]
        pi_qpt: bool,
        /// States and effects are the full projection set
        #[arg(long)]
        pi: bool,
        #[arg(long)]
        pure_first_state: bool,
        #[arg(long)]
        singular_first_effect: bool,
        #[arg(long)]
        state_rank: Option<usize>,
        #[arg(long)]
        kraus_count: Option<usize>,
        #[arg(long)]
        unitary_complete: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Physicality report and uniqueness verdict; exit 1 if not physical
    Check {
        model: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Probability table up to sequence length N (CSV by default)
    Prob {
        model: PathBuf,
        #[arg(short = 'n', long, default_value_t = 1)]
        max_len: usize,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TABLE_CAP)]
        cap: usize,
        #[arg(long, conflicts_with = "json")]
        csv: bool,
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Apply a gauge to a model, or describe the gauge
    Gauge {
        model: Option<PathBuf>,
        /// Gauge JSON file
        #[arg(long, group = "which")]
        file: Option<PathBuf>,
        /// Depolarizing gauge D_F
        #[arg(long, group = "which", allow_hyphen_values = true)]
        depolarizing: Option<f64>,
        /// Haar-random unitary conjugation with this seed
        #[arg(long, group = "which")]
        unitary_seed: Option<u64>,
        /// Haar-random unitary followed by the transpose
        #[arg(long, group = "which")]
        antiunitary_seed: Option<u64>,
        #[arg(long, group = "which")]
        transpose: bool,
        /// Dimension for gauges built from flags when no model is given
        #[arg(long)]
        dim: Option<usize>,
        /// Print the gauge (matrix, class, HPTP check, eta-Kraus weights) instead of the transformed model
        #[arg(long)]
        describe: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Distribution-equivalent model with different spectra, D_{1/F}(model)
    Counterexample {
        model: PathBuf,
        /// Defaults to the midpoint of (1, F_max], capped at 2
        #[arg(long)]
        f: Option<f64>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Compare outcome distributions and classify the relating gauge; exit 1 if different
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(short = 'n', long, default_value_t = DEFAULT_MAX_LEN)]
        max_len: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Print the projection set (or its d^2 pair subset)
    PiSet {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        qpt: bool,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Linear-inversion tomography from a model (exact or sampled) or a dataset file
    Gst {
        #[arg(long, group = "input", required = true)]
        model: Option<PathBuf>,
        #[arg(long, group = "input")]
        dataset: Option<PathBuf>,
        /// Fiducial state indices, comma separated (default: first d^2 independent)
        #[arg(long, value_delimiter = ',')]
        fid_states: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        fid_effects: Option<Vec<usize>>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Model whose fiducial states fix the gauge of the reconstruction
        #[arg(long)]
        prior: Option<PathBuf>,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Tomography dataset of a model: exact, or binomial frequencies with --shots
    Sample {
        model: PathBuf,
        #[arg(long, value_delimiter = ',')]
        fid_states: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        fid_effects: Option<Vec<usize>>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArgs,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::IllConditioned(_)
        | Error::SingularTransform
        | Error::InconsistentGauge(_)
        | Error::NotComplete { .. }
        | Error::GramMismatch(_) => EXIT_NUMERIC,
        _ => EXIT_INPUT,
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: EXIT_INPUT, message: e.to_string() }
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure { code: EXIT_INPUT, message: format!("{}: {e}", path.display()) })
}

fn read_model(path: &PathBuf) -> Result<ModelRepresentation, Failure> {
    io::model_from_json(&read(path)?).map_err(|e| Failure {
        code: exit_code(&e),
        message: format!("{}: {e}", path.display()),
    })
}

fn emit(out: &OutArgs, text: &str) -> Result<(), Failure> {
    match &out.output {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json(out: &OutArgs, v: &Value) -> Result<(), Failure> {
    emit(out, &io::pretty(v))
}

fn projection_model(dim: usize, full: bool, maps: usize, seed: u64) -> Result<ModelRepresentation, Error> {
    let set = if full { projection_set_pi(dim)? } else { projection_set_pi_qpt(dim)? };
    let states = set.projections.iter().map(|p| DensityMatrix::new(p.mat.clone(), p.label.clone())).collect();
    let effects = set.projections.iter().map(|p| Effect::new(p.mat.clone(), p.label.clone())).collect();
    let mut rng = rng_from_seed(seed);
    let maps = (0..maps)
        .map(|j| random_channel(&mut rng, dim, dim * dim).map(|m| m.with_label(format!("M{j}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let label = if full { "pi" } else { "pi-qpt" };
    Ok(ModelRepresentation::new(dim, states, maps, effects)?.with_label(format!("{label}(d={dim}, seed={seed})")))
}

fn fiducials(
    rep: &ModelRepresentation,
    states: &Option<Vec<usize>>,
    effects: &Option<Vec<usize>>,
) -> Result<(Vec<usize>, Vec<usize>), Error> {
    match (states, effects) {
        (Some(s), Some(e)) => Ok((s.clone(), e.clone())),
        (None, None) => {
            let f = FiducialFrame::auto(rep)?;
            Ok((f.state_indices, f.effect_indices))
        }
        (Some(s), None) => Ok((s.clone(), FiducialFrame::auto(rep)?.effect_indices)),
        (None, Some(e)) => Ok((FiducialFrame::auto(rep)?.state_indices, e.clone())),
    }
}

fn build_gauge(
    dim: usize,
    file: &Option<PathBuf>,
    depolarizing: Option<f64>,
    unitary_seed: Option<u64>,
    antiunitary_seed: Option<u64>,
    transpose: bool,
) -> Result<GaugeTransform, Failure> {
    if let Some(p) = file {
        return Ok(io::gauge_from_json(&read(p)?)?);
    }
    if let Some(f) = depolarizing {
        return Ok(GaugeTransform::depolarizing(f, dim)?);
    }
    if let Some(s) = unitary_seed {
        return Ok(GaugeTransform::unitary(&linalg::random_unitary(&mut rng_from_seed(s), dim))?);
    }
    if let Some(s) = antiunitary_seed {
        return Ok(GaugeTransform::antiunitary(&linalg::random_unitary(&mut rng_from_seed(s), dim))?);
    }
    if transpose {
        return Ok(GaugeTransform::transpose(dim));
    }
    Err(Failure { code: EXIT_INPUT, message: "no gauge given (use --file, --depolarizing, --unitary-seed, --antiunitary-seed or --transpose)".into() })
}

fn describe_gauge(t: &GaugeTransform) -> Value {
    let class = classify_transform(t);
    let eta = eta_kraus(t).ok().map(|d| d.weights());
    json!({
        "dim": t.dim(),
        "class": class.name(),
        "condition_number": t.condition_number(),
        "hptp": is_hptp(t),
        "eta_weights": eta,
        "superop": io::matrix_to_value(t.superop()),
    })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let tol = cli.tol.resolve()?;
    match cli.cmd {
        Command::Gen {
            dim,
            states,
            maps,
            effects,
            seed,
            pi_qpt,
            pi,
            pure_first_state,
            singular_first_effect,
            state_rank,
            kraus_count,
            unitary_complete,
            out,
        } => {
            let rep = if pi || pi_qpt {
                projection_model(dim, pi, maps, seed)?
            } else {
                let opts = RandomModelOptions { state_rank, pure_first_state, singular_first_effect, kraus_count };
                let n = dim * dim;
                random_model(dim, states.unwrap_or(n), maps, effects.unwrap_or(n), seed, &opts)?
            };
            emit(&out, &io::model_to_json(&rep.with_unitary_complete(unitary_complete)))?;
            Ok(0)
        }
        Command::Check { model, out } => {
            let rep = read_model(&model)?;
            let report = check_physical_with(&rep, &tol);
            let mut v = json!({ "physical": report.pass, "physicality": io::physicality_to_value(&report) });
            if report.pass {
                let verdict = assess(&rep)?;
                v["uniqueness"] = io::verdict_to_value(&verdict);
                v["f_max"] = io::f_max_to_value(max_depolarizing_f(&rep)?.0);
            } else {
                v["uniqueness"] = Value::Null;
            }
            emit_json(&out, &v)?;
            Ok(if report.pass { 0 } else { EXIT_FALSE })
        }
        Command::Prob { model, max_len, shots, seed, cap, csv: _, json, out } => {
            let rep = read_model(&model)?;
            let mut table = probability_table_with(&rep, max_len, cap, &tol)?;
            if let Some(s) = shots {
                table = table.sampled(s, seed)?;
            }
            if json {
                emit_json(&out, &serde_json::to_value(&table).expect("table serializes"))?;
            } else {
                emit(&out, &table.to_csv())?;
            }
            Ok(0)
        }
        Command::Gauge { model, file, depolarizing, unitary_seed, antiunitary_seed, transpose, dim, describe, out } => {
            let rep = model.as_ref().map(read_model).transpose()?;
            let d = match (&rep, dim) {
                (Some(r), _) => r.dim,
                (None, Some(d)) => d,
                (None, None) if file.is_some() => 0,
                (None, None) => {
                    return Err(Failure { code: EXIT_INPUT, message: "give a model or --dim".into() });
                }
            };
            let t = build_gauge(d, &file, depolarizing, unitary_seed, antiunitary_seed, transpose)?;
            match rep {
                Some(r) if !describe => emit(&out, &io::model_to_json(&apply_gauge(&r, &t)?))?,
                _ => emit_json(&out, &describe_gauge(&t))?,
            }
            Ok(0)
        }
        Command::Counterexample { model, f, out } => {
            let rep = read_model(&model)?;
            let f = match f {
                Some(f) => f,
                None => ((1.0 + max_depolarizing_f(&rep)?.0.value()) / 2.0).min(2.0),
            };
            emit(&out, &io::model_to_json(&counterexample(&rep, f)?))?;
            Ok(0)
        }
        Command::Equiv { a, b, max_len, tol: eq_tol, out } => {
            let ra = read_model(&a)?;
            let rb = read_model(&b)?;
            let v = equivalence_verdict(&ra, &rb, max_len, eq_tol)?;
            emit_json(&out, &serde_json::to_value(&v).expect("verdict serializes"))?;
            Ok(if v.equal { 0 } else { EXIT_FALSE })
        }
        Command::PiSet { dim, qpt, out } => {
            let set = if qpt { projection_set_pi_qpt(dim)? } else { projection_set_pi(dim)? };
            let items: Vec<Value> = set
                .projections
                .iter()
                .map(|p| {
                    let mut m = io::matrix_to_value(&p.mat);
                    m["label"] = json!(p.label);
                    m
                })
                .collect();
            emit_json(&out, &json!({ "dim": dim, "count": set.len(), "span_rank": set.span_rank(), "projections": items }))?;
            Ok(0)
        }
        Command::Gst { model, dataset, fid_states, fid_effects, shots, seed, prior, out } => {
            let (ds, hidden): (GstDataset, Option<ModelRepresentation>) = match (model, dataset) {
                (Some(m), _) => {
                    let rep = read_model(&m)?;
                    let (s, e) = fiducials(&rep, &fid_states, &fid_effects)?;
                    let exact = collect_dataset(&rep, &s, &e)?;
                    let ds = match shots {
                        Some(n) => exact.sampled(n, seed)?,
                        None => exact,
                    };
                    (ds, Some(rep))
                }
                (None, Some(p)) => (io::dataset_from_json(&read(&p)?)?, None),
                (None, None) => unreachable!("clap requires an input"),
            };
            let lgst = lgst_reconstruct(&ds)?;
            let mut v = json!({ "condition_number": lgst.condition_number, "dataset_kind": serde_json::to_value(ds.kind).expect("kind") });
            let mut recon = lgst.model;
            if let Some(p) = prior {
                let prior_rep = read_model(&p)?;
                let frame = FiducialFrame::from_model(&prior_rep, &ds.fiducial_states, &ds.fiducial_effects)?;
                let t = gauge_to_prior(&recon, &frame)?;
                recon = apply_gauge(&recon, &t)?.with_label("lgst|fixed");
                v["gauge"] = io::matrix_to_value(t.superop());
                v["gauge_condition_number"] = json!(t.condition_number());
            }
            if let Some(h) = hidden {
                let frame = FiducialFrame::from_model(&h, &ds.fiducial_states, &ds.fiducial_effects)?;
                v["m_in"] = io::matrix_to_value(&frame.m_in);
            }
            v["model"] = io::model_to_value(&recon);
            emit_json(&out, &v)?;
            Ok(0)
        }
        Command::Sample { model, fid_states, fid_effects, shots, seed, out } => {
            let rep = read_model(&model)?;
            let (s, e) = fiducials(&rep, &fid_states, &fid_effects)?;
            let exact = collect_dataset(&rep, &s, &e)?;
            let ds = match shots {
                Some(n) => exact.sampled(n, seed)?,
                None => exact,
            };
            emit(&out, &io::dataset_to_json(&ds))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
