use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use standwave_core::design::{
    build_distributed, build_salisbury, deposition_sweep, optimal_thickness_with, solve_filling_factor, spectrum,
    target_coefficients, uniformity, SpectrumMode, SpectrumResponse, SublayerGeometry, ThicknessObjective,
    ThicknessSearch,
};
use standwave_core::optics::{
    best_coherent_response, best_phase, per_layer_absorption, traveling_response, Illumination, Layer, Material,
    MeanderSpec, Stack,
};
use standwave_core::photon::{
    resolution_probability, source_click_distribution, ArrayMode, DetectorArraySpec, PhotonSource,
};
use standwave_core::tolerance::{run_ensemble, PerturbationSpec, PerturbedLayers};

use crate::error::{CliError, CliResult};
use crate::output::{emit, fmt_num, Table};
use crate::stack_file::{parse_stack_file, LoadedStack};

#[derive(Debug, Parser)]
#[command(name = "standwave", version, about = "Standing-wave detector stacks: optics, design, photon counting and tolerances")]
pub struct Cli {
    /// Write `<command>.csv` and a `<command>.json` summary into this directory
    /// instead of printing CSV to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Response while the stack is deposited layer by layer.
    #[command(after_help = "CSV columns: thickness_nm,layer,t_re,t_im,r_re,r_im,T,R,A,A_coh\n\
        A_coh (best-phase coherent absorption) is empty for mirror-terminated stacks.")]
    Sweep(SweepArgs),

    /// Traveling-wave or coherent response over a wavelength range.
    #[command(after_help = "CSV columns, traveling: wavelength_nm,t_re,t_im,r_re,r_im,T,R,A,energy_residual\n\
        CSV columns, coherent: wavelength_nm,theta,A_coh,energy_residual,A_1..A_L (one per layer)\n\
        energy_residual = 1 - (outgoing + absorbed + mirror leakage).")]
    Spectrum(SpectrumArgs),

    /// Optimal single-film thickness, or the filling factor for a sublayer stack.
    #[command(after_help = "CSV columns: quantity,value\n\
        --fill: D_opt_nm, absorption, traveling_absorption (cp) or reflectance (salisbury)\n\
        --sublayer-nm: filling_factor, sublayer_nm, layers, total_nm, target_absorption,\n\
        sublayer_absorption, and for cp also stack_absorption, delta_norm")]
    Design(DesignArgs),

    /// Per-detector absorption and its non-uniformity.
    #[command(after_help = "CSV columns: quantity,value\n\
        rows A_1..A_N (detector layers in stack order), A_total, delta, delta_max, delta_norm, theta\n\
        Two-port stacks use best-phase coherent illumination; mirror stacks a wave from the ambient.")]
    Uniformity(UniformityArgs),

    /// Click-number distribution of a detector array for a given source.
    #[command(after_help = "CSV columns: k,probability")]
    Pnr(PnrArgs),

    /// Probability of resolving an m-photon Fock state versus array size.
    #[command(name = "pnr-curve", after_help = "CSV columns: detectors,probability")]
    PnrCurve(PnrCurveArgs),

    /// Monte Carlo ensemble of stacks with random thickness errors.
    #[command(after_help = "CSV columns: index,A_coh,delta_norm,t_re,t_im,r_re,r_im,r_right_re,r_right_im,A_det1..A_detN\n\
        Failed samples are listed in the JSON summary only.")]
    Montecarlo(MonteCarloArgs),
}

#[derive(Debug, Args)]
pub struct StackArg {
    /// Stack specification (JSON).
    #[arg(long, value_name = "FILE")]
    pub stack: PathBuf,
    /// Wavelength in nm; defaults to the stack's design wavelength.
    #[arg(long)]
    pub lambda: Option<f64>,
}

impl StackArg {
    fn load(&self) -> CliResult<(LoadedStack, f64)> {
        let loaded = parse_stack_file(&self.stack)?;
        let lambda = self.lambda.unwrap_or(loaded.design_wavelength_nm);
        Ok((loaded, lambda))
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub stack: StackArg,
    /// Thickness step for detector layers in nm (spacers use at least 1 nm).
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Traveling,
    Coherent,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub stack: StackArg,
    #[arg(long, value_name = "NM")]
    pub from: f64,
    #[arg(long, value_name = "NM")]
    pub to: f64,
    #[arg(long, default_value_t = 500)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Traveling)]
    pub mode: ModeArg,
    /// Input phase for coherent mode; defaults to the best phase at the design wavelength.
    #[arg(long, conflicts_with = "best_phase_each")]
    pub theta: Option<f64>,
    /// Re-optimise the input phase at every wavelength.
    #[arg(long)]
    pub best_phase_each: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryArg {
    Cp,
    Salisbury,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long, value_enum, default_value_t = GeometryArg::Cp)]
    pub geometry: GeometryArg,
    /// Filling factor of a single film whose optimal thickness is wanted.
    #[arg(long, required_unless_present = "sublayer_nm", conflicts_with_all = ["sublayer_nm", "layers"])]
    pub fill: Option<f64>,
    /// Sublayer thickness in nm; solves for the filling factor.
    #[arg(long, requires = "layers")]
    pub sublayer_nm: Option<f64>,
    /// Number of detector sublayers.
    #[arg(long, requires = "sublayer_nm")]
    pub layers: Option<usize>,
    #[arg(long, default_value_t = 1550.0)]
    pub lambda: f64,
    /// Spacer refractive index.
    #[arg(long, default_value_t = 1.5)]
    pub spacer_n: f64,
    /// Mirror intensity reflectivity (salisbury).
    #[arg(long, default_value_t = 0.999)]
    pub mirror_r: f64,
    /// Refractive index between the wires; defaults to 1 with --fill and to
    /// the spacer index with --sublayer-nm.
    #[arg(long)]
    pub slit_n: Option<f64>,
    /// Upper end of the thickness search in nm.
    #[arg(long, default_value_t = 100.0)]
    pub max_nm: f64,
}

#[derive(Debug, Args)]
pub struct UniformityArgs {
    #[command(flatten)]
    pub stack: StackArg,
}

/// `fock:<m>` or `sq:<xi>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceArg {
    Fock(usize),
    Squeezed(f64),
}

impl FromStr for SourceArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, value) = s.split_once(':').ok_or("expected fock:<m> or sq:<xi>")?;
        match kind {
            "fock" => value.parse().map(SourceArg::Fock).map_err(|_| format!("bad photon number `{value}`")),
            "sq" => match value.parse::<f64>() {
                Ok(xi) if xi.is_finite() && xi >= 0.0 => Ok(SourceArg::Squeezed(xi)),
                _ => Err(format!("bad squeezing parameter `{value}`")),
            },
            _ => Err(format!("unknown source `{kind}` (expected fock or sq)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArrayArg {
    /// Detectors in one standing wave; each photon is absorbed (efficiency 1).
    Coherent,
    /// Independent detectors, each with efficiency --eta.
    Multiplexed,
}

#[derive(Debug, Args)]
pub struct PnrArgs {
    #[arg(long)]
    pub source: SourceArg,
    /// Number of detectors.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, value_enum, default_value_t = ArrayArg::Multiplexed)]
    pub array: ArrayArg,
}

#[derive(Debug, Args)]
pub struct PnrCurveArgs {
    /// Photon number of the Fock input.
    #[arg(long)]
    pub m: usize,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 1)]
    pub n_min: usize,
    #[arg(long)]
    pub n_max: usize,
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    #[command(flatten)]
    pub stack: StackArg,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Fractional thickness error bound (0.05 = ±5 %).
    #[arg(long, default_value_t = 0.05)]
    pub bound: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Leave spacer thicknesses at their nominal values.
    #[arg(long)]
    pub detectors_only: bool,
}

pub fn run(cli: Cli) -> CliResult<()> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Sweep(a) => sweep(&a, out),
        Command::Spectrum(a) => spectrum_cmd(&a, out),
        Command::Design(a) => design(&a, out),
        Command::Uniformity(a) => uniformity_cmd(&a, out),
        Command::Pnr(a) => pnr(&a, out),
        Command::PnrCurve(a) => pnr_curve(&a, out),
        Command::Montecarlo(a) => montecarlo(&a, out),
    }
}

fn complex_cells(z: num_complex::Complex64) -> [String; 2] {
    [fmt_num(z.re), fmt_num(z.im)]
}

#[derive(Serialize)]
struct Peak {
    at: f64,
    value: f64,
}

fn peak(points: impl Iterator<Item = (f64, f64)>) -> Option<Peak> {
    points
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(at, value)| Peak { at, value })
}

fn sweep(a: &SweepArgs, out: Option<&Path>) -> CliResult<()> {
    let (loaded, lambda) = a.stack.load()?;
    let traj = deposition_sweep(&loaded.stack, lambda, a.step)?;
    let mut table = Table::new(["thickness_nm", "layer", "t_re", "t_im", "r_re", "r_im", "T", "R", "A", "A_coh"]);
    for s in &traj.samples {
        let mut row = vec![fmt_num(s.thickness_nm), s.label.clone()];
        row.extend(complex_cells(s.t));
        row.extend(complex_cells(s.r));
        row.extend([fmt_num(s.transmittance), fmt_num(s.reflectance), fmt_num(s.absorptance)]);
        row.push(s.coherent_absorption.map(fmt_num).unwrap_or_default());
        table.push(row);
    }
    let summary = json!({
        "wavelength_nm": lambda,
        "samples": traj.samples.len(),
        "peak_absorptance": peak(traj.samples.iter().map(|s| (s.thickness_nm, s.absorptance))),
        "peak_coherent_absorption": peak(traj.samples.iter().filter_map(|s| s.coherent_absorption.map(|c| (s.thickness_nm, c)))),
    });
    emit("sweep", &table, &summary, out)
}

fn spectrum_cmd(a: &SpectrumArgs, out: Option<&Path>) -> CliResult<()> {
    let (loaded, design_lambda) = a.stack.load()?;
    let stack = &loaded.stack;
    let mode = match a.mode {
        ModeArg::Traveling => SpectrumMode::Traveling,
        ModeArg::Coherent if a.best_phase_each => SpectrumMode::Coherent { theta: None },
        ModeArg::Coherent => SpectrumMode::Coherent {
            theta: Some(match a.theta {
                Some(theta) => theta,
                None => best_phase(stack, design_lambda)?,
            }),
        },
    };
    let points = spectrum(stack, a.from, a.to, a.points, mode)?;

    let mut table = match mode {
        SpectrumMode::Traveling => Table::new(["wavelength_nm", "t_re", "t_im", "r_re", "r_im", "T", "R", "A", "energy_residual"]),
        SpectrumMode::Coherent { .. } => {
            let mut header: Vec<String> = ["wavelength_nm", "theta", "A_coh", "energy_residual"].map(String::from).into();
            header.extend((1..=stack.layers().len()).map(|i| format!("A_{i}")));
            Table::new(header)
        }
    };
    let mut max_residual: f64 = 0.0;
    let mut absorption = Vec::with_capacity(points.len());
    for p in &points {
        let lambda = p.wavelength_nm;
        match &p.response {
            SpectrumResponse::Traveling(r) => {
                let residual = 1.0 - per_layer_absorption(stack, lambda, Illumination::TravelingLeft)?.balance();
                max_residual = max_residual.max(residual.abs());
                absorption.push((lambda, r.absorptance));
                let mut row = vec![fmt_num(lambda)];
                row.extend(complex_cells(r.t));
                row.extend(complex_cells(r.r));
                row.extend([r.transmittance, r.reflectance, r.absorptance, residual].map(fmt_num));
                table.push(row);
            }
            SpectrumResponse::Coherent(c) => {
                let budget = per_layer_absorption(stack, lambda, Illumination::Coherent { theta: c.theta })?;
                let residual = 1.0 - budget.balance();
                max_residual = max_residual.max(residual.abs());
                absorption.push((lambda, c.absorption));
                let mut row = vec![fmt_num(lambda), fmt_num(c.theta), fmt_num(c.absorption), fmt_num(residual)];
                row.extend(c.per_layer.iter().copied().map(fmt_num));
                table.push(row);
            }
        }
    }
    let summary = json!({
        "mode": match a.mode { ModeArg::Traveling => "traveling", ModeArg::Coherent => "coherent" },
        "theta": match mode { SpectrumMode::Coherent { theta } => theta, SpectrumMode::Traveling => None },
        "points": points.len(),
        "max_energy_residual": max_residual,
        "peak_absorption": peak(absorption.into_iter()),
    });
    emit("spectrum", &table, &summary, out)
}

fn design(a: &DesignArgs, out: Option<&Path>) -> CliResult<()> {
    let objective = match a.geometry {
        GeometryArg::Cp => ThicknessObjective::CounterPropagating,
        GeometryArg::Salisbury => ThicknessObjective::Salisbury {
            spacer_n: a.spacer_n,
            mirror_reflectivity: a.mirror_r,
        },
    };
    let slit = |default_n: f64| Material::dielectric("slit", a.slit_n.unwrap_or(default_n));
    let mut rows: Vec<(String, f64)> = Vec::new();

    if let Some(fill) = a.fill {
        let meander = MeanderSpec::new(Material::nbtin(), slit(1.0)?, fill, 0.0)?;
        let search = ThicknessSearch {
            max_nm: a.max_nm,
            ..ThicknessSearch::default()
        };
        let opt = optimal_thickness_with(&meander, a.lambda, objective, search)?;
        rows.push(("D_opt_nm".into(), opt.thickness_nm));
        rows.push(("absorption".into(), opt.absorption));
        let film = meander.with_thickness(opt.thickness_nm);
        match a.geometry {
            GeometryArg::Cp => {
                let stack = Stack::free_standing(vec![Layer::Detector(film)])?;
                rows.push(("traveling_absorption".into(), traveling_response(&stack, a.lambda)?.absorptance));
            }
            GeometryArg::Salisbury => {
                let stack = build_salisbury(&film, a.spacer_n, a.mirror_r, a.lambda)?;
                rows.push(("reflectance".into(), traveling_response(&stack, a.lambda)?.reflectance));
            }
        }
    } else {
        let (Some(d), Some(layers)) = (a.sublayer_nm, a.layers) else {
            return Err(CliError::Argument("--sublayer-nm and --layers go together".into()));
        };
        let sublayers = u32::try_from(layers).map_err(|_| CliError::Argument("--layers too large".into()))?;
        let geometry = match a.geometry {
            GeometryArg::Cp => SublayerGeometry::CounterPropagating { sublayers },
            GeometryArg::Salisbury => SublayerGeometry::Salisbury { sublayers },
        };
        let targets = target_coefficients(geometry)?;
        let template = MeanderSpec::new(Material::nbtin(), slit(a.spacer_n)?, 1.0, d)?;
        let f = solve_filling_factor(&template, d, layers, a.lambda, objective)?;
        let sublayer = template.with_filling_factor(f);
        let single = Stack::free_standing(vec![Layer::Detector(sublayer.clone())])?;
        rows.push(("filling_factor".into(), f));
        rows.push(("sublayer_nm".into(), d));
        rows.push(("layers".into(), layers as f64));
        rows.push(("total_nm".into(), d * layers as f64));
        rows.push(("target_absorption".into(), targets.absorption));
        rows.push(("sublayer_absorption".into(), traveling_response(&single, a.lambda)?.absorptance));
        if a.geometry == GeometryArg::Cp {
            let stack = build_distributed(&sublayer, layers, a.spacer_n, a.lambda)?;
            let resp = best_coherent_response(&stack, a.lambda)?;
            rows.push(("stack_absorption".into(), resp.absorption));
            if layers >= 2 {
                let per: Vec<f64> = stack.detector_indices().into_iter().map(|i| resp.per_layer[i]).collect();
                rows.push(("delta_norm".into(), uniformity(&per)?.delta_norm));
            }
        }
    }
    let summary: serde_json::Map<String, serde_json::Value> =
        rows.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    emit("design", &Table::key_values(&rows), &summary, out)
}

fn uniformity_cmd(a: &UniformityArgs, out: Option<&Path>) -> CliResult<()> {
    let (loaded, lambda) = a.stack.load()?;
    let stack = &loaded.stack;
    let (per_layer, theta) = if stack.is_two_port() {
        let resp = best_coherent_response(stack, lambda)?;
        (resp.per_layer, Some(resp.theta))
    } else {
        (per_layer_absorption(stack, lambda, Illumination::TravelingLeft)?.per_layer, None)
    };
    let detectors: Vec<f64> = stack.detector_indices().into_iter().map(|i| per_layer[i]).collect();
    let report = uniformity(&detectors)?;
    let total: f64 = detectors.iter().sum();
    let mut rows: Vec<(String, f64)> = detectors.iter().enumerate().map(|(i, &v)| (format!("A_{}", i + 1), v)).collect();
    rows.extend([
        ("A_total".to_string(), total),
        ("delta".into(), report.delta),
        ("delta_max".into(), report.delta_max),
        ("delta_norm".into(), report.delta_norm),
    ]);
    if let Some(theta) = theta {
        rows.push(("theta".into(), theta));
    }
    let summary = json!({
        "wavelength_nm": lambda,
        "illumination": if theta.is_some() { "coherent-best-phase" } else { "traveling-left" },
        "theta": theta,
        "absorption_total": total,
        "report": report,
    });
    emit("uniformity", &Table::key_values(&rows), &summary, out)
}

fn pnr(a: &PnrArgs, out: Option<&Path>) -> CliResult<()> {
    let source = match a.source {
        SourceArg::Fock(m) => PhotonSource::fock(m),
        SourceArg::Squeezed(xi) => PhotonSource::squeezed_vacuum(xi)?,
    };
    let mode = match a.array {
        ArrayArg::Coherent => ArrayMode::CoherentDistributed,
        ArrayArg::Multiplexed => ArrayMode::IncoherentMultiplexed,
    };
    let array = DetectorArraySpec::new(a.n, a.eta, mode)?;
    let dist = source_click_distribution(&source, &array)?;
    let mut table = Table::new(["k", "probability"]);
    for (k, p) in dist.probabilities.iter().enumerate() {
        table.push(vec![k.to_string(), fmt_num(*p)]);
    }
    emit("pnr", &table, &dist, out)
}

fn pnr_curve(a: &PnrCurveArgs, out: Option<&Path>) -> CliResult<()> {
    if a.n_min == 0 || a.n_min > a.n_max {
        return Err(CliError::Argument("need 1 <= --n-min <= --n-max".into()));
    }
    let mut table = Table::new(["detectors", "probability"]);
    let mut points = Vec::new();
    for n in a.n_min..=a.n_max {
        let p = resolution_probability(a.m, n, a.eta)?;
        table.push(vec![n.to_string(), fmt_num(p)]);
        points.push(json!({ "detectors": n, "probability": p }));
    }
    let summary = json!({ "m": a.m, "eta": a.eta, "points": points });
    emit("pnr-curve", &table, &summary, out)
}

fn montecarlo(a: &MonteCarloArgs, out: Option<&Path>) -> CliResult<()> {
    let (loaded, lambda) = a.stack.load()?;
    let layers = if a.detectors_only {
        PerturbedLayers::DetectorsOnly
    } else {
        PerturbedLayers::DetectorsAndSpacers
    };
    let spec = PerturbationSpec::new(a.bound, layers)?;
    let report = run_ensemble(&loaded.stack, &spec, a.samples, a.seed, lambda)?;
    let detectors = loaded.stack.detector_indices().len();
    let mut header: Vec<String> = [
        "index", "A_coh", "delta_norm", "t_re", "t_im", "r_re", "r_im", "r_right_re", "r_right_im",
    ]
    .map(String::from)
    .into();
    header.extend((1..=detectors).map(|i| format!("A_det{i}")));
    let mut table = Table::new(header);
    for r in &report.records {
        let mut row = vec![r.index.to_string(), fmt_num(r.absorption), fmt_num(r.delta_norm)];
        row.extend(complex_cells(r.t));
        row.extend(complex_cells(r.r));
        row.extend(complex_cells(r.r_right));
        row.extend(r.detector_absorption.iter().copied().map(fmt_num));
        table.push(row);
    }
    emit("montecarlo", &table, &report, out)
}
