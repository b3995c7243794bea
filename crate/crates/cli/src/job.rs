use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use coulomb_core::affine::{orbit_representative, AffineType};
use coulomb_core::engine::{
    character_zastava_eq3, hilbert_affine_slice, hilbert_slice_eq2, leaf_interval, monopole_sum, slice_theory,
    theory_to_slice, Evaluation, LeafInterval, SliceLabel, ENERGY_CONVENTION,
};
use coulomb_core::enumeration::{properness_check_with, EnumerationConfig};
use coulomb_core::gauge::{DetSign, ExponentConfig, Grading};
use coulomb_core::quiver::{cartan_matrix, fold, orbits};
use coulomb_core::series::Units;
use coulomb_core::weights::WeightVector;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result, EXIT_DOMAIN, EXIT_IO, EXIT_OK};
use crate::expr;
use crate::json::{self, to_text};
use crate::schema::{Schema, VERSION};

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "COULOMB_THREADS";

const ORBIT_CONVENTION: &str =
    "translations t_nu act by (lambda + k nu, n - <lambda, nu> - k (nu, nu)/2); delta has energy +1";

/// Where a slice label comes from: a slice document, a theory document, or
/// a quiver plus weight expressions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SliceInput {
    pub slice: Option<PathBuf>,
    pub theory: Option<PathBuf>,
    pub quiver: Option<PathBuf>,
    pub node: Option<String>,
    pub lambda: Option<String>,
    pub mu: Option<String>,
    pub alpha: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Hilbert {
        theory: PathBuf,
        grading: String,
        alpha: Option<String>,
    },
    Slice(SliceInput),
    AffineSlice(SliceInput),
    Zastava {
        quiver: PathBuf,
        alpha: Option<String>,
    },
    Properness {
        theory: PathBuf,
        grading: String,
        alpha: Option<String>,
    },
    OrbitRep {
        quiver: PathBuf,
        node: Option<String>,
        weight: String,
    },
    Fold {
        quiver: PathBuf,
        automorphism: String,
    },
    LeafInterval {
        input: SliceInput,
        affine: bool,
        energy_bound: Option<u64>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Hilbert { .. } => "hilbert",
            Command::Slice(_) => "slice",
            Command::AffineSlice(_) => "affine-slice",
            Command::Zastava { .. } => "zastava",
            Command::Properness { .. } => "properness",
            Command::OrbitRep { .. } => "orbit-rep",
            Command::Fold { .. } => "fold",
            Command::LeafInterval { .. } => "leaf-interval",
        }
    }

    /// Whether the job writes a series file next to its envelope.
    pub fn emits_series(&self) -> bool {
        matches!(
            self,
            Command::Hilbert { .. } | Command::Slice(_) | Command::AffineSlice(_) | Command::Zastava { .. }
        )
    }

    fn input_paths(&self) -> Vec<(&'static str, &Path)> {
        match self {
            Command::Hilbert { theory, .. } | Command::Properness { theory, .. } => vec![("theory", theory.as_path())],
            Command::Zastava { quiver, .. } | Command::OrbitRep { quiver, .. } | Command::Fold { quiver, .. } => {
                vec![("quiver", quiver.as_path())]
            }
            Command::Slice(s) | Command::AffineSlice(s) | Command::LeafInterval { input: s, .. } => {
                let mut out = Vec::new();
                if let Some(p) = &s.slice {
                    out.push(("slice", p.as_path()));
                }
                if let Some(p) = &s.theory {
                    out.push(("theory", p.as_path()));
                }
                if let Some(p) = &s.quiver {
                    out.push(("quiver", p.as_path()));
                }
                out
            }
        }
    }

    fn params(&self) -> Value {
        let slice_params = |s: &SliceInput| {
            json!({
                "node": s.node,
                "lambda": s.lambda.as_deref().map(expr::echo),
                "mu": s.mu.as_deref().map(expr::echo),
                "alpha": s.alpha.as_deref().map(expr::echo),
            })
        };
        match self {
            Command::Hilbert { grading, alpha, .. } | Command::Properness { grading, alpha, .. } => {
                json!({ "grading": grading, "alpha": alpha.as_deref().map(expr::echo) })
            }
            Command::Slice(s) | Command::AffineSlice(s) => slice_params(s),
            Command::Zastava { alpha, .. } => json!({ "alpha": alpha.as_deref().map(expr::echo) }),
            Command::OrbitRep { node, weight, .. } => json!({ "node": node, "weight": expr::echo(weight) }),
            Command::Fold { automorphism, .. } => json!({ "automorphism": expr::echo(automorphism) }),
            Command::LeafInterval {
                input,
                affine,
                energy_bound,
            } => {
                let mut p = slice_params(input);
                p["affine"] = json!(affine);
                p["energy_bound"] = json!(energy_bound);
                p
            }
        }
    }
}

/// Everything that determines a job's output, plus where to put it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JobSpec {
    pub command: Command,
    /// Truncation order in powers of `t`.
    pub order: Option<u32>,
    pub units: Units,
    pub radius_override: Option<u64>,
    pub cone_cap: u64,
    pub radius_cap: u64,
    pub det_sign: DetSign,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub omit_timing: bool,
}

impl JobSpec {
    pub fn new(command: Command) -> Self {
        let defaults = EnumerationConfig::default();
        JobSpec {
            command,
            order: None,
            units: Units::default(),
            radius_override: None,
            cone_cap: defaults.cone_cap,
            radius_cap: defaults.radius_cap,
            det_sign: DetSign::default(),
            threads: None,
            output: None,
            cache_dir: None,
            omit_timing: false,
        }
    }

    fn config(&self) -> EnumerationConfig {
        EnumerationConfig {
            cone_cap: self.cone_cap,
            radius_cap: self.radius_cap,
            radius_override: self.radius_override,
            exponent: ExponentConfig {
                det_sign: self.det_sign,
            },
        }
    }

    fn order(&self) -> Result<u32> {
        self.order
            .ok_or_else(|| CliError::Input(format!("`{}` needs --order", self.command.name())))
    }

    /// Parameters echoed into the envelope and hashed into the cache key.
    fn params(&self) -> Value {
        json!({
            "command": self.command.name(),
            "arguments": self.command.params(),
            "order": self.order,
            "units": self.units.name(),
            "radius_override": self.radius_override,
            "cone_cap": self.cone_cap,
            "radius_cap": self.radius_cap,
            "det_sign": self.det_sign.name(),
        })
    }
}

/// The text a job produces: an optional series file and a JSON document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifacts {
    pub series: Option<String>,
    pub document: String,
}

struct Inputs {
    docs: BTreeMap<&'static str, (Vec<u8>, Value)>,
}

impl Inputs {
    fn load(command: &Command) -> Result<Self> {
        let mut docs = BTreeMap::new();
        for (role, path) in command.input_paths() {
            let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
            let text = std::str::from_utf8(&bytes)
                .map_err(|_| CliError::Input(format!("{}: not UTF-8", path.display())))?;
            let value = json::parse_text(text, &path.display().to_string())?;
            docs.insert(role, (bytes, value));
        }
        Ok(Inputs { docs })
    }

    fn get(&self, role: &str) -> &Value {
        &self.docs[role].1
    }

    fn echo(&self) -> Value {
        Value::Object(self.docs.iter().map(|(k, (_, v))| (k.to_string(), v.clone())).collect())
    }

    fn digests(&self) -> Value {
        Value::Object(
            self.docs
                .iter()
                .map(|(k, (bytes, _))| (k.to_string(), json!(hex::encode(Sha256::digest(bytes)))))
                .collect(),
        )
    }
}

fn cache_key(job: &JobSpec, inputs: &Inputs) -> String {
    let key = json!({
        "tool": env!("CARGO_PKG_VERSION"),
        "schemas": VERSION,
        "job": job.params(),
        "omit_timing": job.omit_timing,
        "inputs": inputs.digests(),
    });
    hex::encode(Sha256::digest(json::to_canonical(&key).as_bytes()))
}

fn cache_paths(dir: &Path, key: &str) -> (PathBuf, PathBuf) {
    (dir.join(format!("{key}.series")), dir.join(format!("{key}.json")))
}

fn cache_load(dir: &Path, key: &str, series: bool) -> Option<Artifacts> {
    let (sp, jp) = cache_paths(dir, key);
    let document = fs::read_to_string(jp).ok()?;
    let series = if series { Some(fs::read_to_string(sp).ok()?) } else { None };
    Some(Artifacts { series, document })
}

fn cache_store(dir: &Path, key: &str, a: &Artifacts) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let (sp, jp) = cache_paths(dir, key);
    if let Some(s) = &a.series {
        write_atomic(&sp, s)?;
    }
    write_atomic(&jp, &a.document)
}

fn write_atomic(path: &Path, text: &str) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, text).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

fn thread_count(job: &JobSpec) -> Result<Option<usize>> {
    if let Some(n) = job.threads {
        return Ok(Some(n));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::Input(format!("{THREADS_ENV}=`{v}` is not a thread count"))),
        Err(_) => Ok(None),
    }
}

/// Computes (or fetches from the cache) the artifacts of a job.
pub fn execute(job: &JobSpec) -> Result<Artifacts> {
    let inputs = Inputs::load(&job.command)?;
    let key = cache_key(job, &inputs);
    if let Some(dir) = &job.cache_dir {
        if let Some(hit) = cache_load(dir, &key, job.command.emits_series()) {
            return Ok(hit);
        }
    }
    let artifacts = match thread_count(job)? {
        Some(0) => return Err(CliError::Input("thread count must be positive".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Input(format!("cannot start {n} threads: {e}")))?
            .install(|| compute(job, &inputs))?,
        None => compute(job, &inputs)?,
    };
    if let Some(dir) = &job.cache_dir {
        cache_store(dir, &key, &artifacts)?;
    }
    Ok(artifacts)
}

/// `name.ext` becomes `name.ext.json`.
pub fn envelope_path(output: &Path) -> PathBuf {
    let mut p = output.as_os_str().to_owned();
    p.push(".json");
    PathBuf::from(p)
}

fn emit(job: &JobSpec, a: &Artifacts) -> Result<()> {
    match (&job.output, &a.series) {
        (Some(out), Some(series)) => {
            write_atomic(out, series)?;
            write_atomic(&envelope_path(out), &a.document)
        }
        (Some(out), None) => write_atomic(out, &a.document),
        (None, series) => {
            let text = series.as_ref().unwrap_or(&a.document);
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io("<stdout>", e))
        }
    }
}

/// Prints a failure and returns its exit status.
pub fn report_error(e: &CliError) -> i32 {
    let code = e.exit_code();
    if code == EXIT_DOMAIN {
        print!("{}", to_text(&e.to_json()));
    }
    eprintln!("error: {e}");
    code
}

/// Runs a job end to end and returns the process exit status: 0 on success,
/// 2 on domain errors (with an error object on stdout), 1 on I/O or input
/// errors. Nothing is written to the output path unless the job succeeds.
pub fn run(job: &JobSpec) -> i32 {
    match execute(job).and_then(|a| emit(job, &a)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let code = report_error(&e);
            debug_assert!(code == EXIT_DOMAIN || code == EXIT_IO);
            code
        }
    }
}

fn grading_of(name: &str, alpha: &Option<String>, ids: &[String], dim_v: &[i64]) -> Result<Grading> {
    let alpha = match (name, alpha) {
        ("homological", Some(_)) => {
            return Err(CliError::Input("--alpha does not apply to the homological grading".into()))
        }
        (_, Some(text)) => Some(expr::vertex_vector(text, ids)?),
        (_, None) => Some(dim_v.to_vec()),
    };
    Ok(Grading::from_name(name, alpha)?)
}

fn slice_label(input: &SliceInput, inputs: &Inputs, affine: bool) -> Result<SliceLabel> {
    let sources = [&input.slice, &input.theory, &input.quiver]
        .iter()
        .filter(|s| s.is_some())
        .count();
    if sources != 1 {
        return Err(CliError::Input("give exactly one of --slice, --theory, --quiver".into()));
    }
    let no_labels = input.lambda.is_none() && input.mu.is_none() && input.alpha.is_none();
    if input.slice.is_some() {
        if !no_labels || input.node.is_some() {
            return Err(CliError::Input("--slice already fixes the quiver and weights".into()));
        }
        return slice_from_doc(inputs.get("slice"), affine);
    }
    if input.theory.is_some() {
        if !no_labels {
            return Err(CliError::Input("--theory already fixes the weights".into()));
        }
        let (t, node) = json::parse_theory(inputs.get("theory"))?;
        return Ok(theory_to_slice(&t, affine, input.node.clone().or(node))?);
    }
    let doc = inputs.get("quiver");
    let q = json::parse_quiver(doc)?;
    let lambda = input
        .lambda
        .as_deref()
        .ok_or_else(|| CliError::Input("--lambda is required with --quiver".into()))?;
    if input.mu.is_some() == input.alpha.is_some() {
        return Err(CliError::Input("give exactly one of --mu, --alpha".into()));
    }
    let ids = q.vertices().to_vec();
    if affine {
        let node = match &input.node {
            Some(n) => Some(n.clone()),
            None => doc.get("affine_node").map(json::vertex_id).transpose()?,
        };
        let ty = AffineType::from_quiver(&q, node.as_deref())?;
        let lambda = expr::affine_weight(lambda, &ids, &ty)?;
        if let Some(alpha) = &input.alpha {
            let alpha = expr::vertex_vector(alpha, &ids)?;
            return Ok(SliceLabel::affine_from_alpha(q, node, lambda, &alpha)?);
        }
        let mu = expr::affine_weight(input.mu.as_deref().unwrap(), &ids, &ty)?;
        Ok(SliceLabel::Affine {
            quiver: q,
            node,
            lambda,
            mu,
        })
    } else {
        if input.node.is_some() {
            return Err(CliError::Input("--node only applies to affine slices".into()));
        }
        let c = cartan_matrix(&q);
        let lambda = expr::finite_weight(lambda, &ids, &c)?;
        let mu = match &input.alpha {
            Some(alpha) => {
                let alpha = expr::vertex_vector(alpha, &ids)?;
                let shift = c.apply(&alpha);
                let l = lambda.to_fundamental(&c)?;
                WeightVector::Fundamental(l.iter().zip(&shift).map(|(a, b)| a - b).collect())
            }
            None => expr::finite_weight(input.mu.as_deref().unwrap(), &ids, &c)?,
        };
        Ok(SliceLabel::finite(q, lambda, mu))
    }
}

fn slice_from_doc(doc: &Value, affine: bool) -> Result<SliceLabel> {
    Schema::Slice.validate(doc)?;
    let q = json::parse_quiver(&doc["quiver"])?;
    let is_affine = doc["lambda"].get("level").is_some();
    if is_affine != affine {
        let kind = if is_affine { "an affine" } else { "a finite" };
        return Err(CliError::Input(format!("the slice document describes {kind} slice")));
    }
    if is_affine {
        let node = doc.get("affine_node").map(json::vertex_id).transpose()?;
        let lambda = json::affine_weight_from(&doc["lambda"])?;
        if let Some(alpha) = doc.get("alpha") {
            let alpha: Vec<i64> = alpha.as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
            return Ok(SliceLabel::affine_from_alpha(q, node, lambda, &alpha)?);
        }
        let mu = json::affine_weight_from(&doc["mu"])?;
        Ok(SliceLabel::Affine {
            quiver: q,
            node,
            lambda,
            mu,
        })
    } else {
        let lambda_parts = match doc.get("lambda_parts") {
            None => None,
            Some(parts) => Some(
                parts
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(json::weight_from)
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(SliceLabel::Finite {
            quiver: q,
            lambda: json::weight_from(&doc["lambda"])?,
            mu: json::weight_from(&doc["mu"])?,
            lambda_parts,
        })
    }
}

fn slice_json(s: &SliceLabel) -> Value {
    match s {
        SliceLabel::Finite {
            quiver,
            lambda,
            mu,
            lambda_parts,
        } => {
            let mut doc = json!({
                "kind": "finite",
                "quiver": json::quiver_json(quiver),
                "lambda": json::weight_json(lambda),
                "mu": json::weight_json(mu),
            });
            if let Some(parts) = lambda_parts {
                doc["lambda_parts"] = parts.iter().map(json::weight_json).collect();
            }
            doc
        }
        SliceLabel::Affine {
            quiver,
            node,
            lambda,
            mu,
        } => json!({
            "kind": "affine",
            "quiver": json::quiver_json(quiver),
            "affine_node": node,
            "lambda": json::affine_weight_json(lambda),
            "mu": json::affine_weight_json(mu),
        }),
    }
}

struct Envelope {
    doc: Value,
    started: Instant,
}

impl Envelope {
    fn new(job: &JobSpec, inputs: &Inputs) -> Self {
        Envelope {
            doc: json!({
                "format": "coulomb-envelope/1",
                "command": job.command.name(),
                "input": { "documents": inputs.echo(), "parameters": job.params() },
                "exponent": { "det_sign": job.det_sign.name(), "units": "half" },
            }),
            started: Instant::now(),
        }
    }

    fn finish(mut self, job: &JobSpec, series: Option<String>) -> Artifacts {
        if !job.omit_timing {
            self.doc["wall_time_ms"] = json!(self.started.elapsed().as_millis() as u64);
        }
        Artifacts {
            series,
            document: to_text(&self.doc),
        }
    }
}

fn series_artifacts(job: &JobSpec, mut env: Envelope, eval: Evaluation, result: Value) -> Result<Artifacts> {
    let text = eval.series.to_file_string(job.units)?;
    let mut vars = vec!["t".to_string()];
    vars.extend((1..=eval.series.z_vars()).map(|i| format!("z{i}")));
    let d = &mut env.doc;
    d["units"] = json!(job.units.name());
    d["order"] = json!(job.order);
    d["grading"] = json::grading_json(&eval.grading);
    d["properness"] = json::report_json(&eval.report);
    d["enumeration"] = json!({
        "coweights": eval.coweights,
        "radius": eval.radius,
        "radius_overridden": eval.radius_overridden,
    });
    d["series"] = json!({ "terms": eval.series.len(), "vars": vars });
    d["notes"] = json!(eval.notes);
    d["result"] = result;
    Ok(env.finish(job, Some(text)))
}

fn compute(job: &JobSpec, inputs: &Inputs) -> Result<Artifacts> {
    let mut env = Envelope::new(job, inputs);
    let config = job.config();
    match &job.command {
        Command::Hilbert { grading, alpha, .. } => {
            let order = job.order()?;
            let (t, _) = json::parse_theory(inputs.get("theory"))?;
            let g = grading_of(grading, alpha, t.quiver().vertices(), t.dim_v())?;
            let eval = monopole_sum(&t, &g, order, false, &config)?;
            series_artifacts(job, env, eval, json!({ "theory": json::theory_json(&t) }))
        }
        Command::Slice(input) | Command::AffineSlice(input) => {
            let order = job.order()?;
            let affine = matches!(job.command, Command::AffineSlice(_));
            let s = slice_label(input, inputs, affine)?;
            let st = slice_theory(&s)?;
            let eval = if affine {
                hilbert_affine_slice(&s, order, &config)?
            } else {
                hilbert_slice_eq2(&s, order, &config)?
            };
            let result = json!({ "slice": slice_json(&s), "theory": json::theory_json(&st.theory) });
            series_artifacts(job, env, eval, result)
        }
        Command::Zastava { alpha, .. } => {
            let order = job.order()?;
            let doc = inputs.get("quiver");
            let q = json::parse_quiver(doc)?;
            let alpha = match (alpha, json::dim_v_of(doc)?) {
                (Some(text), _) => expr::vertex_vector(text, q.vertices())?,
                (None, Some(dim_v)) => dim_v,
                (None, None) => return Err(CliError::Input("`zastava` needs --alpha or a dimV in the input".into())),
            };
            let eval = character_zastava_eq3(&q, &alpha, order, &config)?;
            series_artifacts(job, env, eval, json!({ "alpha": alpha }))
        }
        Command::Properness { grading, alpha, .. } => {
            let (t, _) = json::parse_theory(inputs.get("theory"))?;
            let g = grading_of(grading, alpha, t.quiver().vertices(), t.dim_v())?;
            let report = properness_check_with(&t, &g, &config)?;
            env.doc["grading"] = json::grading_json(&g);
            env.doc["properness"] = json::report_json(&report);
            Ok(env.finish(job, None))
        }
        Command::OrbitRep { node, weight, .. } => {
            let doc = inputs.get("quiver");
            let q = json::parse_quiver(doc)?;
            let node = match node {
                Some(n) => Some(n.clone()),
                None => doc.get("affine_node").map(json::vertex_id).transpose()?,
            };
            let ty = AffineType::from_quiver(&q, node.as_deref())?;
            let w = expr::affine_weight(weight, q.vertices(), &ty)?;
            let rep = orbit_representative(&ty, &w)?;
            env.doc["result"] = json!({
                "node": q.vertices()[ty.node()],
                "weight": json::affine_weight_json(&w),
                "representative": json::affine_weight_json(&rep),
                "representative_affine_fundamental": ty.to_affine_fundamental(&rep)?,
            });
            env.doc["notes"] = json!([ORBIT_CONVENTION]);
            Ok(env.finish(job, None))
        }
        Command::Fold { automorphism, .. } => {
            let q = json::parse_quiver(inputs.get("quiver"))?;
            let sigma = expr::automorphism(automorphism, q.vertices())?;
            let c = fold(&q, &sigma)?;
            let ids = q.vertices();
            let orbit_ids: Vec<Vec<&String>> = orbits(&sigma)
                .iter()
                .map(|o| o.iter().map(|&i| &ids[i]).collect())
                .collect();
            env.doc["result"] = json!({
                "orbits": orbit_ids,
                "cartan": c.entries(),
                "symmetrizer": c.symmetrizer(),
                "symmetrized": c.symmetrized(),
            });
            Ok(env.finish(job, None))
        }
        Command::LeafInterval {
            input,
            affine,
            energy_bound,
        } => {
            let affine = *affine
                || input
                    .slice
                    .as_ref()
                    .is_some_and(|_| inputs.get("slice")["lambda"].get("level").is_some());
            let s = slice_label(input, inputs, affine)?;
            let result = match leaf_interval(&s, *energy_bound)? {
                LeafInterval::Finite(ws) => json!({
                    "kind": "finite",
                    "weights": ws.iter().map(json::weight_json).collect::<Vec<_>>(),
                }),
                LeafInterval::Affine { weights, truncated } => {
                    env.doc["notes"] = json!([ENERGY_CONVENTION]);
                    json!({
                        "kind": "affine",
                        "weights": weights.iter().map(json::affine_weight_json).collect::<Vec<_>>(),
                        "truncated": truncated,
                        "energy_bound": energy_bound,
                    })
                }
            };
            env.doc["result"] = json!({ "slice": slice_json(&s), "interval": result });
            Ok(env.finish(job, None))
        }
    }
}
