use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use obliq::cavity::{
    build_cavity_with_threads, contraction_check, div_orthogonality_probe, identity_check, korn_measure,
    korn_rayleigh_max, CavityConfig,
};
use obliq::decompose::{decompose_with_report, sum_dense_check};
use obliq::functional::{degeneracy_probe, extend_with_report, in_fq, Functional, ProbeTable};
use obliq::hilbert::{distance, HilbertSpace, DEFAULT_RANK_TOL};
use obliq::l2model::{self, L2ModelConfig, ThetaFamily};
use obliq::report::{DecompositionJson, ExtensionJson, InclinationJson};
use obliq::subspace::{inclination, inclination_oracle, Containment, Subspace, DEFAULT_INTERSECT_TOL};
use obliq::{io, Error, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{digest_bytes, digest_file, Timer};

/// What a command hands back to the dispatcher.
pub struct Outcome {
    pub inputs: BTreeMap<String, String>,
    pub tolerances: BTreeMap<String, f64>,
    pub outputs: Value,
    pub exit: i32,
    pub csv: Option<String>,
}

impl Outcome {
    fn new(inputs: BTreeMap<String, String>, tolerances: BTreeMap<String, f64>, outputs: Value) -> Self {
        Self { inputs, tolerances, outputs, exit: 0, csv: None }
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Gram matrix of the metric (MatrixMarket or CSV); Euclidean if omitted.
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// Generator columns of L.
    #[arg(long)]
    pub l: PathBuf,
    /// Generator columns of M.
    #[arg(long)]
    pub m: PathBuf,
    /// Principal cosines within this of one count as shared directions.
    #[arg(long, default_value_t = DEFAULT_INTERSECT_TOL)]
    pub tol: f64,
    /// Relative singular value cutoff when spanning generators.
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    pub rank_tol: f64,
}

struct Pair {
    space: Arc<HilbertSpace>,
    l: Subspace,
    m: Subspace,
    inputs: BTreeMap<String, String>,
}

impl PairArgs {
    fn tolerances(&self) -> BTreeMap<String, f64> {
        BTreeMap::from([("rank_tol".to_string(), self.rank_tol), ("tol".to_string(), self.tol)])
    }

    fn load(&self, timer: &mut Timer) -> Result<Pair, Error> {
        let mut inputs = BTreeMap::new();
        timer.time("load", || {
            let l_gens = io::read_matrix(&self.l)?;
            let space = match &self.space {
                Some(p) => {
                    inputs.insert("space".into(), digest_file(p).map_err(|e| io_err(p, e))?);
                    let label = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    Arc::new(HilbertSpace::new(io::read_matrix(p)?)?.with_label(label))
                }
                None => HilbertSpace::euclidean(l_gens.nrows()).shared(),
            };
            for (key, path) in [("l", &self.l), ("m", &self.m)] {
                inputs.insert(key.into(), digest_file(path).map_err(|e| io_err(path, e))?);
            }
            let l = io::read_subspace(&space, &self.l, self.rank_tol)?;
            let m = io::read_subspace(&space, &self.m, self.rank_tol)?;
            Ok(Pair { space, l, m, inputs })
        })
    }
}

pub fn incline(args: &PairArgs, timer: &mut Timer) -> Result<Outcome, Error> {
    let pair = args.load(timer)?;
    let report = timer.time("inclination", || inclination(&pair.l, &pair.m, args.tol))?;
    let oracle = timer.time("oracle", || inclination_oracle(&pair.l, &pair.m, args.tol))?;
    let density = sum_dense_check(&pair.l, &pair.m)?;
    let outputs = json!({
        "dim": pair.space.dim(),
        "l_dim": pair.l.dim(),
        "m_dim": pair.m.dim(),
        "inclination": to_value(&InclinationJson::from(&report)),
        "oracle_c": oracle,
        "sum_density": to_value(&density),
    });
    let mut out = Outcome::new(pair.inputs, args.tolerances(), outputs);
    if report.containment != Containment::None {
        out.exit = 2;
    }
    Ok(out)
}

fn read_vector_in(space: &Arc<HilbertSpace>, path: &Path) -> Result<Vector, Error> {
    let v = io::read_vector(path)?;
    Vector::new(Arc::clone(space), v)
}

pub fn decompose(args: &PairArgs, x: &Path, a1: f64, timer: &mut Timer) -> Result<Outcome, Error> {
    let mut pair = args.load(timer)?;
    pair.inputs.insert("x".into(), digest_file(x).map_err(|e| io_err(x, e))?);
    let xv = read_vector_in(&pair.space, x)?;
    let report = timer.time("inclination", || inclination(&pair.l, &pair.m, args.tol))?;
    let d = timer.time("decompose", || decompose_with_report(&report, &xv, a1, args.tol))?;
    let dj = DecompositionJson::from(&d);
    let outputs = json!({
        "inclination": to_value(&InclinationJson::from(&report)),
        "decomposition": to_value(&dj),
    });
    let mut tol = args.tolerances();
    tol.insert("bound_slack".into(), obliq::decompose::BOUND_SLACK);
    tol.insert("residual_rel".into(), args.tol);
    let mut out = Outcome::new(pair.inputs, tol, outputs);
    if !dj.bounds.all_ok {
        out.exit = 1;
    }
    Ok(out)
}

pub fn extend(args: &PairArgs, w: &Path, timer: &mut Timer) -> Result<Outcome, Error> {
    let mut pair = args.load(timer)?;
    pair.inputs.insert("w".into(), digest_file(w).map_err(|e| io_err(w, e))?);
    let f = Functional::new(read_vector_in(&pair.space, w)?);
    let member = in_fq(&f, &pair.l, &pair.m, args.tol)?;
    let report = timer.time("inclination", || inclination(&pair.l, &pair.m, args.tol))?;
    let ext = timer.time("extend", || extend_with_report(&f, &pair.l, &pair.m, &report, args.tol))?;
    let outputs = json!({
        "in_fq": member,
        "inclination": to_value(&InclinationJson::from(&report)),
        "extension": to_value(&ExtensionJson::from(&ext)),
    });
    Ok(Outcome::new(pair.inputs, args.tolerances(), outputs))
}

#[derive(Debug, Args)]
pub struct L2Args {
    /// Number of coordinate pairs N.
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Explicit θ values, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub thetas: Option<Vec<f64>>,
    /// θ family: "1/n", "n" or a constant; also used by --probe.
    #[arg(long)]
    pub theta_family: Option<ThetaFamily>,
    /// Model configuration file (JSON or TOML with n_pairs, thetas).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Truncation sizes for the degeneracy probe, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub probe: Option<Vec<usize>>,
    /// Write the probe table (or the agreement row) as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write the model's Gram, L and M bases as MatrixMarket files here.
    #[arg(long)]
    pub export: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_INTERSECT_TOL)]
    pub tol: f64,
    /// Seed for the cross-check vectors.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Agreement between the engine and the closed forms must hold to this.
pub const L2_AGREEMENT_TOL: f64 = 1e-10;

fn l2_config(args: &L2Args, inputs: &mut BTreeMap<String, String>) -> Result<L2ModelConfig, Error> {
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        inputs.insert("config".into(), digest_bytes(text.as_bytes()));
        let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        return if is_toml { L2ModelConfig::from_toml(&text) } else { L2ModelConfig::from_json(&text) };
    }
    let cfg = match (&args.thetas, args.theta_family, args.pairs) {
        (Some(t), _, pairs) => {
            if let Some(n) = pairs.filter(|&n| n != t.len()) {
                return Err(Error::InvalidConfig(format!("--pairs {n} but {} thetas given", t.len())));
            }
            L2ModelConfig::new(t.clone())?
        }
        (None, Some(family), Some(n)) => L2ModelConfig::from_family(n, family)?,
        (None, Some(_), None) => return Err(Error::InvalidConfig("--theta-family needs --pairs".into())),
        (None, None, _) => return Err(Error::InvalidConfig("give --thetas, --theta-family or --config".into())),
    };
    let canonical = serde_json::to_string(&cfg).expect("config serializes");
    inputs.insert("config".into(), digest_bytes(canonical.as_bytes()));
    Ok(cfg)
}

pub fn l2(args: &L2Args, timer: &mut Timer) -> Result<Outcome, Error> {
    let mut inputs = BTreeMap::new();
    let cfg = l2_config(args, &mut inputs)?;
    let model = timer.time("build", || l2model::build(&cfg))?;
    if let Some(dir) = &args.export {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        io::write_matrix(&dir.join("space.mtx"), model.space.gram())?;
        io::write_matrix(&dir.join("l.mtx"), model.l.basis())?;
        io::write_matrix(&dir.join("m.mtx"), model.m.basis())?;
    }

    let report = timer.time("inclination", || inclination(&model.l, &model.m, args.tol))?;
    let oracle = timer.time("oracle", || inclination_oracle(&model.l, &model.m, args.tol))?;
    let c_analytic = l2model::analytic_inclination(&cfg);
    let bound_analytic = l2model::analytic_bound(&cfg);

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let n = cfg.n_pairs;
    let u: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let a: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();

    let (dec_diff, ext_diff, ext_norm) = timer.time("cross_check", || -> Result<_, Error> {
        let x = Vector::from_real(Arc::clone(&model.space), &u)?;
        let d = decompose_with_report(&report, &x, 0.5, args.tol)?;
        let (v, w) = l2model::analytic_decompose(&cfg, &x)?;
        let dec_diff = distance(&d.xl, &v)?.max(distance(&d.xm, &w)?);
        let f = Functional::new(Vector::new(Arc::clone(&model.space), l2model::riesz_in_l(&cfg, &a)?)?);
        let ext = extend_with_report(&f, &model.l, &model.m, &report, args.tol)?;
        let want = Vector::new(Arc::clone(&model.space), l2model::analytic_extend(&cfg, &a)?)?;
        Ok((dec_diff, distance(ext.f_tilde.riesz(), &want)?, ext.norm_f_tilde))
    })?;

    let c_diff = (report.c - c_analytic).abs();
    let bound_engine = report.amplification();
    let agreement = c_diff <= L2_AGREEMENT_TOL && dec_diff <= 1e-9 && ext_diff <= 1e-9;

    let probe = match &args.probe {
        Some(sizes) => {
            let family = args.theta_family.unwrap_or(ThetaFamily::Reciprocal);
            let members = l2model::family_members(family, sizes)?;
            let table = timer.time("probe", || degeneracy_probe(members, args.tol)).map_err(|a| a.error)?;
            Some(table)
        }
        None => None,
    };

    let outputs = json!({
        "config": to_value(&cfg),
        "c_engine": report.c,
        "c_analytic": c_analytic,
        "c_oracle": oracle,
        "c_diff": c_diff,
        "bound_engine": bound_engine,
        "bound_analytic": bound_analytic,
        "decompose_diff": dec_diff,
        "extend_diff": ext_diff,
        "extension_norm": ext_norm,
        "agreement": agreement,
        "probe": probe.as_ref().map(to_value),
        "probe_attained_increasing": probe.as_ref().map(ProbeTable::attained_increasing),
    });
    let tolerances = BTreeMap::from([
        ("agreement".to_string(), L2_AGREEMENT_TOL),
        ("cross_check".to_string(), 1e-9),
        ("tol".to_string(), args.tol),
    ]);
    let mut out = Outcome::new(inputs, tolerances, outputs);
    out.csv = Some(match &probe {
        Some(t) => t.to_csv(),
        None => format!(
            "n_pairs,c_engine,c_analytic,bound_engine,bound_analytic\n{},{:?},{:?},{:?},{:?}\n",
            n, report.c, c_analytic, bound_engine, bound_analytic
        ),
    });
    if !agreement {
        out.exit = 1;
    }
    Ok(out)
}

#[derive(Debug, Args)]
pub struct CavityArgs {
    /// Spatial dimension, 2 or 3.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    /// Mode cutoff N, or an inclusive range "a..b".
    #[arg(long, default_value = "1")]
    pub modes: String,
    /// Model configuration file (JSON or TOML with d, n_modes, korn_samples).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Run the Korn measurement.
    #[arg(long)]
    pub korn: bool,
    /// Random fields per sweep (identity, contraction, Korn spot checks).
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the per-configuration table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn parse_modes(s: &str) -> Result<Vec<usize>, Error> {
    let bad = || Error::InvalidConfig(format!("--modes expects N or a..b, got {s:?}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).collect())
        }
        None => Ok(vec![num(s)?]),
    }
}

#[derive(Debug, Serialize)]
struct CavityRow {
    summary: obliq::cavity::CavitySummary,
    identity: SweepStat,
    contraction: SweepStat,
    div_probe: obliq::cavity::DivProbe,
    korn: Option<KornRow>,
}

#[derive(Debug, Serialize)]
struct SweepStat {
    samples: usize,
    /// Identity: largest `|slack|/q_grad`. Contraction: smallest `slack/‖u‖`.
    worst: f64,
    ok: bool,
}

#[derive(Debug, Serialize)]
struct KornRow {
    kappa: f64,
    kappa_rayleigh: f64,
    agree: bool,
    bound: f64,
    margin: f64,
    sample_max: f64,
}

/// Agreement demanded between the two Korn maximizers, relative to kappa.
pub const KORN_AGREEMENT_TOL: f64 = 1e-6;

pub fn cavity(args: &CavityArgs, threads: usize, timer: &mut Timer) -> Result<Outcome, Error> {
    let mut inputs = BTreeMap::new();
    let configs: Vec<CavityConfig> = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            inputs.insert("config".into(), digest_bytes(text.as_bytes()));
            let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
            vec![if is_toml { CavityConfig::from_toml(&text)? } else { CavityConfig::from_json(&text)? }]
        }
        None => parse_modes(&args.modes)?
            .into_iter()
            .map(|n| {
                let cfg = CavityConfig { d: args.dim, n_modes: n, korn_samples: args.samples };
                cfg.validate()?;
                Ok(cfg)
            })
            .collect::<Result<_, Error>>()?,
    };
    if args.config.is_none() {
        let canonical = serde_json::to_string(&configs).expect("configs serialize");
        inputs.insert("config".into(), digest_bytes(canonical.as_bytes()));
    }

    let mut rows = Vec::new();
    let mut all_ok = true;
    for cfg in &configs {
        let tag = format!("d{}n{}", cfg.d, cfg.n_modes);
        let model = timer.time(format!("build_{tag}"), || build_cavity_with_threads(cfg, threads))?;
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed ^ ((cfg.d as u64) << 32 | cfg.n_modes as u64));

        let identity = timer.time(format!("identity_{tag}"), || -> Result<_, Error> {
            let mut worst: f64 = 0.0;
            let mut ok = true;
            for _ in 0..args.samples {
                let r = identity_check(&model, &model.random_l_field(&mut rng))?;
                ok &= r.ok;
                if r.q_grad > 0.0 {
                    worst = worst.max(r.slack.abs() / r.q_grad);
                }
            }
            Ok(SweepStat { samples: args.samples, worst, ok })
        })?;

        let contraction = timer.time(format!("contraction_{tag}"), || -> Result<_, Error> {
            let mut worst = f64::INFINITY;
            let mut ok = true;
            for _ in 0..args.samples {
                let r = contraction_check(&model, &model.random_lhat_field(&mut rng)?)?;
                ok &= r.ok;
                if r.norm_u > 0.0 {
                    worst = worst.min(r.slack / r.norm_u);
                }
            }
            Ok(SweepStat { samples: args.samples, worst: if worst.is_finite() { worst } else { 0.0 }, ok })
        })?;

        let probe_field = model.random_lhat_field(&mut rng)?;
        let div_probe = timer.time(format!("div_probe_{tag}"), || div_orthogonality_probe(&model, &probe_field))?;

        let korn = if args.korn {
            let k = timer.time(format!("korn_{tag}"), || korn_measure(&model, args.seed))?;
            let r = timer.time(format!("korn_rayleigh_{tag}"), || korn_rayleigh_max(&model, 20, args.seed.wrapping_add(1)))?;
            let agree = (k.kappa - r).abs() <= KORN_AGREEMENT_TOL * k.kappa;
            all_ok &= agree && k.kappa >= 1.0;
            Some(KornRow { kappa: k.kappa, kappa_rayleigh: r, agree, bound: k.bound, margin: k.margin, sample_max: k.sample_max })
        } else {
            None
        };
        all_ok &= identity.ok && contraction.ok && div_probe.ok && model.summary().energy_split_defect <= 1e-12;
        rows.push(CavityRow { summary: model.summary(), identity, contraction, div_probe, korn });
    }

    let c_values: Vec<f64> = rows.iter().map(|r| r.summary.c).collect();
    let nondecreasing = c_values.windows(2).all(|w| w[1] >= w[0] - 1e-12);
    let mut csv = String::from("d,n_modes,ambient_dim,c,identity_worst,contraction_worst,div_norm,kappa,bound,margin\n");
    for r in &rows {
        let s = &r.summary;
        let (kappa, bound, margin) = match &r.korn {
            Some(k) => (format!("{:?}", k.kappa), format!("{:?}", k.bound), format!("{:?}", k.margin)),
            None => (String::new(), String::new(), String::new()),
        };
        csv.push_str(&format!(
            "{},{},{},{:?},{:?},{:?},{:?},{kappa},{bound},{margin}\n",
            s.d, s.n_modes, s.ambient_dim, s.c, r.identity.worst, r.contraction.worst, r.div_probe.div_norm
        ));
    }
    let outputs = json!({
        "configs": to_value(&rows),
        "c_nondecreasing": nondecreasing,
        "all_ok": all_ok,
    });
    let tolerances = BTreeMap::from([
        ("contraction_rel".to_string(), 1e-10),
        ("energy_split".to_string(), 1e-12),
        ("identity_rel".to_string(), 1e-10),
        ("intersect_tol".to_string(), DEFAULT_INTERSECT_TOL),
        ("korn_agreement_rel".to_string(), KORN_AGREEMENT_TOL),
        ("sine_orthogonality".to_string(), 1e-10),
    ]);
    let mut out = Outcome::new(inputs, tolerances, outputs);
    out.csv = Some(csv);
    if !all_ok {
        out.exit = 1;
    }
    Ok(out)
}
