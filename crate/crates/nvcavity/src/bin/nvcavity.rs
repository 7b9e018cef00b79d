//! Batch front-end: parse a TOML run configuration, orchestrate one pipeline
//! stage, and emit CSV tables with full provenance headers.
//!
//! Exit codes: 0 success, 2 validation failure, 3 computation failure,
//! 4 I/O failure. `NVCAVITY_THREADS` caps the worker-thread count.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use nvcavity::config::{RunConfig, Violation};
use nvcavity::coupling::{coupling_rate, coupling_sweep};
use nvcavity::emitter::{purcell_simple, CrystalFrame};
use nvcavity::ensemble::{
    decay_curve, fit_single_exponential, purcell_distribution, sample_ensemble, Collection,
    DecayCurve, FitResult, PurcellDistribution,
};
use nvcavity::fiber::{solve_fiber_mode, v_number, ModeLabel};
use nvcavity::grid::FieldGrid;
use nvcavity::surrogate::{surrogate_wgm, C_NM_PER_NS};
use nvcavity::vec3::cnorm_sq;

#[derive(Parser)]
#[command(
    name = "nvcavity",
    version,
    about = "Emitter-ensemble / whispering-gallery microcavity simulation pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; omitted = bundled ring-device defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override `ensemble.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Suppress progress output on stdout.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the guided modes of the tapered-fiber cross-section.
    FiberMode(Common),
    /// Fiber-cavity coupling rate for one device and contact geometry.
    Couple(Common),
    /// Coupling-rate sweep over device diameters (disk/ring, TE/TM, top/side).
    Sweep(Common),
    /// Lateral map of the best-aligned Purcell factor at fixed depth.
    PurcellMap(Common),
    /// Full ensemble pipeline: sample, weight, histogram, decay, fit.
    Ensemble(Common),
    /// Decay curves and fits from a previously written distribution table.
    Decay(Common),
    /// Check a configuration file and report every violation.
    Validate(Common),
}

/// Application error with its process exit code.
enum AppError {
    Validation(Vec<Violation>),
    ValidationMsg(String),
    Compute(String),
    Io(String),
}

impl AppError {
    fn code(&self) -> u8 {
        match self {
            AppError::Validation(_) | AppError::ValidationMsg(_) => 2,
            AppError::Compute(_) => 3,
            AppError::Io(_) => 4,
        }
    }

    fn report(&self) {
        match self {
            AppError::Validation(v) => {
                eprintln!("configuration invalid: {} violation(s)", v.len());
                for x in v {
                    eprintln!("  {x}");
                }
            }
            AppError::ValidationMsg(m) => eprintln!("configuration invalid: {m}"),
            AppError::Compute(m) => eprintln!("computation failed: {m}"),
            AppError::Io(m) => eprintln!("I/O failed: {m}"),
        }
    }
}

fn compute<E: std::fmt::Display>(e: E) -> AppError {
    AppError::Compute(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("NVCAVITY_THREADS") {
        if let Ok(n) = threads.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    let result = match &cli.command {
        Command::FiberMode(c) => run_stage(c, "fiber-mode", cmd_fiber_mode),
        Command::Couple(c) => run_stage(c, "couple", cmd_couple),
        Command::Sweep(c) => run_stage(c, "sweep", cmd_sweep),
        Command::PurcellMap(c) => run_stage(c, "purcell-map", cmd_purcell_map),
        Command::Ensemble(c) => run_stage(c, "ensemble", cmd_ensemble),
        Command::Decay(c) => run_stage(c, "decay", cmd_decay),
        Command::Validate(c) => cmd_validate(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            e.report();
            ExitCode::from(e.code())
        }
    }
}

/// Load + validate the config, prepare the output directory, run the stage,
/// then write the timestamped metadata file (kept out of the data files so
/// reruns are byte-identical).
fn run_stage(
    common: &Common,
    name: &str,
    stage: fn(&RunConfig, &Emitter) -> Result<(), AppError>,
) -> Result<(), AppError> {
    let cfg = load_config(common)?;
    std::fs::create_dir_all(&common.out)
        .map_err(|e| AppError::Io(format!("cannot create {}: {e}", common.out.display())))?;
    let emitter = Emitter {
        dir: common.out.clone(),
        header: provenance_header(name, &cfg),
        quiet: common.quiet,
    };
    stage(&cfg, &emitter)?;
    let meta = format!(
        "command: {name}\nlibrary_version: {}\nunix_time_s: {}\n",
        env!("CARGO_PKG_VERSION"),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    );
    emitter.write_atomic("run_metadata.txt", &meta)?;
    Ok(())
}

fn load_config(common: &Common) -> Result<RunConfig, AppError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path).map_err(|e| match e {
            nvcavity::config::ConfigError::Io { path, source } => {
                AppError::Io(format!("cannot read config file {}: {source}", path.display()))
            }
            other => AppError::ValidationMsg(other.to_string()),
        })?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.ensemble.seed = seed;
    }
    let violations = cfg.validate();
    if !violations.is_empty() {
        return Err(AppError::Validation(violations));
    }
    Ok(cfg)
}

/// Atomic file emitter with a fixed provenance header.
struct Emitter {
    dir: PathBuf,
    header: String,
    quiet: bool,
}

impl Emitter {
    fn write_atomic(&self, name: &str, content: &str) -> Result<(), AppError> {
        let target = self.dir.join(name);
        let tmp = self.dir.join(format!(".{name}.tmp-{}", std::process::id()));
        std::fs::write(&tmp, content)
            .map_err(|e| AppError::Io(format!("cannot write {}: {e}", tmp.display())))?;
        std::fs::rename(&tmp, &target)
            .map_err(|e| AppError::Io(format!("cannot rename to {}: {e}", target.display())))?;
        if !self.quiet {
            println!("wrote {}", target.display());
        }
        Ok(())
    }

    /// Header + body, atomically.
    fn emit(&self, name: &str, body: &str) -> Result<(), AppError> {
        self.write_atomic(name, &format!("{}{}", self.header, body))
    }
}

/// Provenance block: library version, command, and the fully resolved
/// configuration. No timestamps here by contract.
fn provenance_header(command: &str, cfg: &RunConfig) -> String {
    let mut out = String::new();
    out.push_str(&format!("# nvcavity {} :: {command}\n", env!("CARGO_PKG_VERSION")));
    out.push_str("# resolved configuration:\n");
    for line in cfg.to_toml_string().lines() {
        out.push_str("#   ");
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// 17-significant-digit float formatting for CSV payloads.
fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

fn cmd_validate(common: &Common) -> Result<(), AppError> {
    let path = common
        .config
        .as_ref()
        .ok_or_else(|| AppError::ValidationMsg("validate requires --config <path>".into()))?;
    let cfg = RunConfig::load(path).map_err(|e| match e {
        nvcavity::config::ConfigError::Io { path, source } => {
            AppError::Io(format!("cannot read config file {}: {source}", path.display()))
        }
        other => AppError::ValidationMsg(other.to_string()),
    })?;
    let violations = cfg.validate();
    if violations.is_empty() {
        if !common.quiet {
            println!("OK: {} is valid", path.display());
        }
        Ok(())
    } else {
        Err(AppError::Validation(violations))
    }
}

fn cmd_fiber_mode(cfg: &RunConfig, out: &Emitter) -> Result<(), AppError> {
    let f = &cfg.fiber;
    let lam = cfg.cavity.wavelength_nm;
    let v = v_number(f.diameter_nm, f.n_fiber, f.n_ambient, lam);
    let mut body = String::from("mode,n_eff,beta_rad_per_nm,v_number,residual\n");
    let mut he11 = None;
    for label in [ModeLabel::He11, ModeLabel::Te01, ModeLabel::Tm01, ModeLabel::He21] {
        match solve_fiber_mode(f.diameter_nm, f.n_fiber, f.n_ambient, lam, label) {
            Ok(mode) => {
                body.push_str(&format!(
                    "{label},{},{},{},{}\n",
                    f17(mode.n_eff()),
                    f17(mode.beta),
                    f17(v),
                    f17(mode.residual)
                ));
                if label == ModeLabel::He11 {
                    he11 = Some(mode);
                }
            }
            Err(nvcavity::fiber::FiberError::ModeCutoff { .. }) => {
                body.push_str(&format!("{label},below_cutoff,,{},\n", f17(v)));
            }
            Err(e) => return Err(compute(e)),
        }
    }
    out.emit("fiber_modes.csv", &body)?;

    if let Some(mode) = he11 {
        let mode = mode.normalize_unit_power();
        let a = mode.core_radius_nm();
        let mut profile = String::from("r_nm,e_magnitude\n");
        let n = 300;
        for i in 0..=n {
            let r = 3.0 * a * i as f64 / n as f64;
            let (e, _h) = mode.evaluate([r, 0.0, 0.0]);
            profile.push_str(&format!("{},{}\n", f17(r), f17(cnorm_sq(&e).sqrt())));
        }
        out.emit("fiber_profile_he11.csv", &profile)?;
    }
    Ok(())
}

/// Build the cavity grid for ensemble-type commands: from the configured
/// field file when present, otherwise from the analytic surrogate.
fn build_cavity(cfg: &RunConfig) -> Result<FieldGrid, AppError> {
    let grid = match &cfg.cavity.field_file {
        Some(path) => FieldGrid::load(path)
            .map_err(|e| AppError::Io(format!("cannot load field file {}: {e}", path.display())))?,
        None => surrogate_wgm(&cfg.cavity_spec(), &cfg.grid_geometry()).map_err(compute)?,
    };
    grid.normalize_unit_energy().map_err(compute)
}

fn cmd_couple(cfg: &RunConfig, out: &Emitter) -> Result<(), AppError> {
    let spec = cfg.cavity_spec();
    // the coupling grid must enclose the fiber contact volume, not the
    // excitation spot
    let lateral = cfg.fiber.diameter_nm + 650.0;
    let above = cfg.fiber.diameter_nm + 150.0;
    let geometry = nvcavity::surrogate::GridGeometry::enclosing(
        &spec,
        lateral,
        500.0,
        above,
        cfg.sweep.grid_spacing_nm,
    );
    let cavity = surrogate_wgm(&spec, &geometry)
        .map_err(compute)?
        .normalize_unit_energy()
        .map_err(compute)?;
    let fiber = solve_fiber_mode(
        cfg.fiber.diameter_nm,
        cfg.fiber.n_fiber,
        cfg.fiber.n_ambient,
        cfg.cavity.wavelength_nm,
        ModeLabel::He11,
    )
    .map_err(compute)?
    .normalize_unit_power();
    let geom = cfg.contact_geometry();
    let omega0 = 2.0 * std::f64::consts::PI * C_NM_PER_NS / cfg.cavity.wavelength_nm;
    let gamma_e = coupling_rate(&cavity, &fiber, &geom, omega0).map_err(compute)?;
    let mut body = String::from(
        "device,polarization,contact,azimuthal_order,gamma_e_per_ns,q_e_equivalent\n",
    );
    body.push_str(&format!(
        "{},{},{},{},{},{}\n",
        cfg.cavity.device,
        cfg.cavity.polarization,
        cfg.contact.contact,
        spec.azimuthal_order,
        f17(gamma_e),
        f17(omega0 / gamma_e)
    ));
    out.emit("couple.csv", &body)
}

fn cmd_sweep(cfg: &RunConfig, out: &Emitter) -> Result<(), AppError> {
    let rows = coupling_sweep(&cfg.sweep_config()).map_err(compute)?;
    let mut body = String::from(
        "diameter_nm,device,polarization,contact,azimuthal_order,gamma_e_per_ns,q_e_equivalent\n",
    );
    for r in &rows {
        body.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            f17(r.diameter_nm),
            r.device,
            r.polarization,
            r.contact,
            r.azimuthal_order,
            f17(r.gamma_e_per_ns),
            f17(r.q_e_equivalent)
        ));
    }
    out.emit("sweep.csv", &body)?;
    out.emit(
        "sweep.gp",
        "# gnuplot stub: coupling rate vs device diameter\n\
         set datafile separator ','\n\
         set logscale y\n\
         set xlabel 'device diameter (nm)'\n\
         set ylabel 'gamma_e (1/ns)'\n\
         plot '< grep TE,side sweep.csv' using 1:6 with linespoints title 'TE side'\n",
    )
}

fn cmd_purcell_map(cfg: &RunConfig, out: &Emitter) -> Result<(), AppError> {
    let cavity = build_cavity(cfg)?;
    let mv = cavity.mode_volume().map_err(compute)?;
    let params = cfg.cavity_params(mv.volume_nm3).map_err(compute)?;
    let peak = purcell_simple(&params, 1.0) * (params.n_cavity / params.n_diamond);
    let spec = cfg.cavity_spec();
    let half = spec.outer_radius_nm + 2.0 * cfg.purcell_map.step_nm
        + cfg.grid.lateral_margin_nm.min(200.0);
    let z = -cfg.purcell_map.depth_nm;
    let step = cfg.purcell_map.step_nm;
    let n = (2.0 * half / step).ceil() as usize;
    let mut body = String::from("x_nm,y_nm,f_p_best_aligned\n");
    for iy in 0..=n {
        let y = -half + iy as f64 * step;
        for ix in 0..=n {
            let x = -half + ix as f64 * step;
            let e = cavity.field_at([x, y, z]).map_err(compute)?;
            let ratio2 = cnorm_sq(&e) / (mv.e_max * mv.e_max);
            body.push_str(&format!("{},{},{}\n", f17(x), f17(y), f17(peak * ratio2)));
        }
    }
    out.emit("purcell_map.csv", &body)
}

/// Weighted histogram CSV over deterministic equal-width bins.
fn histogram_csv(dist: &PurcellDistribution, channel: Collection) -> String {
    let max = dist.entries.iter().map(|e| e.f_p).fold(0.0f64, f64::max);
    let width = 0.25;
    let nbins = ((max / width).floor() as usize + 1).max(1);
    let edges: Vec<f64> = (0..=nbins).map(|i| i as f64 * width).collect();
    let bins = dist.histogram(&edges, channel);
    let total: f64 = bins.iter().sum();
    let mut body = String::from("f_p_low,f_p_high,weight,weight_normalized\n");
    for (i, w) in bins.iter().enumerate() {
        body.push_str(&format!(
            "{},{},{},{}\n",
            f17(edges[i]),
            f17(edges[i + 1]),
            f17(*w),
            f17(if total > 0.0 { w / total } else { 0.0 })
        ));
    }
    body
}

fn decay_csv(curve: &DecayCurve) -> String {
    let mut body = String::from("t_ns,intensity\n");
    for (t, i) in curve.times_ns.iter().zip(&curve.intensities) {
        body.push_str(&format!("{},{}\n", f17(*t), f17(*i)));
    }
    body
}

fn fit_report(
    label: &str,
    mean: f64,
    fit: &FitResult,
    report: &mut String,
) {
    report.push_str(&format!(
        "[{label}]\nmean_purcell = {}\ntau_ns = {}\ngamma_per_ns = {}\nrms_log_residual = {}\n\n",
        f17(mean),
        f17(fit.tau_ns),
        f17(fit.gamma_per_ns),
        f17(fit.rms_log_residual)
    ));
}

fn cmd_ensemble(cfg: &RunConfig, out: &Emitter) -> Result<(), AppError> {
    let cavity = build_cavity(cfg)?;
    let mv = cavity.mode_volume().map_err(compute)?;
    let params = cfg.cavity_params(mv.volume_nm3).map_err(compute)?;
    let ens = cfg.ensemble_spec();
    let frame = CrystalFrame::chip_110(cfg.ensemble.crystal_azimuth_rad);
    let samples = sample_ensemble(&ens).map_err(compute)?;
    let dist = purcell_distribution(&samples, &cavity, &params, &mv, &frame).map_err(compute)?;

    let mut table = String::from("f_p,weight_freespace,weight_waveguide\n");
    for e in &dist.entries {
        table.push_str(&format!(
            "{},{},{}\n",
            f17(e.f_p),
            f17(e.weight_freespace),
            f17(e.weight_waveguide)
        ));
    }
    out.emit("distribution.csv", &table)?;
    out.emit("G_freespace.csv", &histogram_csv(&dist, Collection::FreeSpace))?;
    out.emit("G_waveguide.csv", &histogram_csv(&dist, Collection::Waveguide))?;

    let mut report = String::new();
    report.push_str(&out.header);
    report.push_str(&format!(
        "mode_volume_nm3 = {}\nper_mode_volume_nm3 = {}\nazimuthal_order = {}\n\n",
        f17(mv.volume_nm3),
        f17(params.volume_nm3),
        cfg.cavity_spec().azimuthal_order
    ));
    for (channel, name) in [
        (Collection::FreeSpace, "freespace"),
        (Collection::Waveguide, "waveguide"),
    ] {
        let curve = decay_curve(&dist, channel, cfg.fit.window_ns, cfg.fit.dt_ns).map_err(compute)?;
        let fit = fit_single_exponential(&curve, cfg.fit.window_ns).map_err(compute)?;
        out.emit(&format!("decay_{name}.csv"), &decay_csv(&curve))?;
        fit_report(name, dist.mean_purcell(channel), &fit, &mut report);
    }
    out.write_atomic("fit_report.txt", &report)?;
    if cfg.emit_all {
        out.emit(
            "decay.gp",
            "# gnuplot stub: ensemble decay curves\n\
             set datafile separator ','\n\
             set logscale y\n\
             set xlabel 't (ns)'\n\
             set ylabel 'normalized intensity'\n\
             plot 'decay_freespace.csv' using 1:2 with lines title 'free space', \\\n\
                  'decay_waveguide.csv' using 1:2 with lines title 'waveguide'\n",
        )?;
    }
    Ok(())
}

fn cmd_decay(cfg: &RunConfig, out: &Emitter) -> Result<(), AppError> {
    let path = cfg.decay.distribution_file.as_ref().ok_or_else(|| {
        AppError::ValidationMsg("decay.distribution_file must name a distribution CSV".into())
    })?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Io(format!("cannot read input file {}: {e}", path.display())))?;
    let mut factors = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("f_p") {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() < 2 {
            return Err(AppError::ValidationMsg(format!(
                "{}:{}: expected `f_p,weight[,weight_waveguide]`",
                path.display(),
                lineno + 1
            )));
        }
        let f_p: f64 = cols[0].trim().parse().map_err(|e| {
            AppError::ValidationMsg(format!("{}:{}: bad f_p: {e}", path.display(), lineno + 1))
        })?;
        let w: f64 = cols[1].trim().parse().map_err(|e| {
            AppError::ValidationMsg(format!("{}:{}: bad weight: {e}", path.display(), lineno + 1))
        })?;
        factors.push((f_p, w));
    }
    if factors.is_empty() {
        return Err(AppError::ValidationMsg(format!(
            "{}: no distribution rows found",
            path.display()
        )));
    }
    let dist = PurcellDistribution::from_factors(
        &factors,
        1.0 / cfg.ensemble.lifetime0_ns,
        cfg.ensemble.gamma0_zpl_per_ns,
    );
    let mut report = String::new();
    report.push_str(&out.header);
    for (channel, name) in [
        (Collection::FreeSpace, "freespace"),
        (Collection::Waveguide, "waveguide"),
    ] {
        let curve = decay_curve(&dist, channel, cfg.fit.window_ns, cfg.fit.dt_ns).map_err(compute)?;
        let fit = fit_single_exponential(&curve, cfg.fit.window_ns).map_err(compute)?;
        out.emit(&format!("decay_{name}.csv"), &decay_csv(&curve))?;
        fit_report(name, dist.mean_purcell(channel), &fit, &mut report);
    }
    out.write_atomic("fit_report.txt", &report)
}
