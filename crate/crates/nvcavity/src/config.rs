//! Run configuration: a TOML file with one section per module, defaults
//! matching the bundled ring-device scenario, and a validator that reports
//! every violation (not just the first) with its `section.key` path.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coupling::{Contact, ContactGeometry, SweepConfig};
use crate::emitter::CavityParams;
use crate::ensemble::EnsembleSpec;
use crate::surrogate::{GridGeometry, Polarization, SurrogateWgmSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
}

/// A single validation finding, keyed by its TOML path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Dotted key path, e.g. `cavity.Q`.
    pub key: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

fn default_true() -> bool {
    true
}

/// `[cavity]` section: device geometry and resonator figure of merit.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CavitySection {
    /// Design vacuum wavelength, nm.
    pub wavelength_nm: f64,
    /// Loaded quality factor.
    #[serde(rename = "Q")]
    pub q: f64,
    /// `disk` or `ring`.
    pub device: String,
    pub outer_diameter_nm: f64,
    /// Radial width of the ring annulus, nm (ignored for disks).
    pub ring_width_nm: f64,
    pub slab_thickness_nm: f64,
    /// Refractive index of the resonator material.
    pub n_cavity: f64,
    /// Refractive index of the emitter host below the device.
    pub n_diamond: f64,
    pub n_ambient: f64,
    /// `TE` or `TM`.
    pub polarization: String,
    /// `true` pins a single standing-wave mode `cos(m phi)`; `false` models
    /// the degenerate doublet (phi-uniform response, per-mode volume = half
    /// the doublet-envelope volume).
    pub standing_wave: bool,
    /// Azimuthal antinode phase of a standing-wave mode, rad.
    pub standing_wave_phase: f64,
    /// 0 selects the order resonant closest to `wavelength_nm`.
    pub azimuthal_order: u32,
    /// Optional pre-computed field grid; when set it replaces the analytic
    /// surrogate mode.
    pub field_file: Option<PathBuf>,
}

impl Default for CavitySection {
    fn default() -> Self {
        Self {
            wavelength_nm: 637.0,
            q: 3500.0,
            device: "ring".into(),
            outer_diameter_nm: 1800.0,
            ring_width_nm: 280.0,
            slab_thickness_nm: 150.0,
            n_cavity: 3.3,
            n_diamond: 2.4,
            n_ambient: 1.0,
            polarization: "TE".into(),
            standing_wave: false,
            standing_wave_phase: 0.0,
            azimuthal_order: 0,
            field_file: None,
        }
    }
}

/// `[fiber]` section: tapered-fiber cross-section.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FiberSection {
    pub diameter_nm: f64,
    pub n_fiber: f64,
    pub n_ambient: f64,
}

impl Default for FiberSection {
    fn default() -> Self {
        Self {
            diameter_nm: 550.0,
            n_fiber: 1.45,
            n_ambient: 1.0,
        }
    }
}

/// `[contact]` section: fiber placement for the `couple` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContactSection {
    /// `top` or `side`.
    pub contact: String,
    pub gap_nm: f64,
    /// 0 selects `outer_diameter / 2 + 500 nm`.
    pub half_length_nm: f64,
}

impl Default for ContactSection {
    fn default() -> Self {
        Self {
            contact: "side".into(),
            gap_nm: 0.0,
            half_length_nm: 0.0,
        }
    }
}

/// `[ensemble]` section: implanted-layer statistics and excitation spot.
/// Lengths in nm, rates in 1/ns.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleSection {
    pub sample_count: usize,
    pub seed: u64,
    /// Mean implantation depth below the surface, nm.
    pub depth_mean: f64,
    /// Implantation straggle (depth standard deviation), nm.
    pub depth_sigma: f64,
    /// Excitation-spot intensity FWHM, nm.
    pub spot_fwhm: f64,
    /// Spot center in the device plane, nm; `[]` centers it on the ring
    /// (between inner and outer edges) on the +x axis.
    pub spot_center_nm: Vec<f64>,
    /// Excitation polarization axis in crystal coordinates.
    pub excitation_axis: [f64; 3],
    /// Rotation of the crystal frame about the surface normal, rad.
    pub crystal_azimuth_rad: f64,
    /// Unmodified emitter lifetime, ns.
    pub lifetime0_ns: f64,
    /// Unmodified decay rate of the cavity-enhanced line, 1/ns.
    pub gamma0_zpl_per_ns: f64,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        Self {
            sample_count: 100_000,
            seed: 12345,
            depth_mean: 15.0,
            depth_sigma: 5.0,
            spot_fwhm: 500.0,
            spot_center_nm: vec![],
            excitation_axis: [1.0, 0.0, 0.0],
            crystal_azimuth_rad: 0.0,
            lifetime0_ns: 8.4,
            gamma0_zpl_per_ns: 0.0025,
        }
    }
}

/// `[fit]` section: decay-curve grid and fit window.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    pub window_ns: f64,
    pub dt_ns: f64,
}

impl Default for FitSection {
    fn default() -> Self {
        Self {
            window_ns: 40.0,
            dt_ns: 0.1,
        }
    }
}

/// `[grid]` section: surrogate sampling grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    /// Node spacing for ensemble/purcell-map grids, nm.
    pub spacing_nm: f64,
    /// Extra lateral margin beyond what the excitation spot requires, nm.
    pub lateral_margin_nm: f64,
    /// Grid depth below the device, nm.
    pub below_nm: f64,
    /// Grid height above the slab top, nm.
    pub above_nm: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            spacing_nm: 10.0,
            lateral_margin_nm: 30.0,
            below_nm: 320.0,
            above_nm: 250.0,
        }
    }
}

/// `[sweep]` section: diameter scan for the coupling-rate sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub diameter_min_nm: f64,
    pub diameter_max_nm: f64,
    pub diameter_step_nm: f64,
    /// Node spacing of the (coarser) sweep grids, nm.
    pub grid_spacing_nm: f64,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            diameter_min_nm: 800.0,
            diameter_max_nm: 3000.0,
            diameter_step_nm: 100.0,
            grid_spacing_nm: 20.0,
        }
    }
}

/// `[purcell_map]` section: lateral map of the Purcell factor at fixed depth.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PurcellMapSection {
    /// Emitter depth below the surface, nm.
    pub depth_nm: f64,
    /// Lateral sample step, nm.
    pub step_nm: f64,
}

impl Default for PurcellMapSection {
    fn default() -> Self {
        Self {
            depth_nm: 15.0,
            step_nm: 20.0,
        }
    }
}

/// `[decay]` section: input table for the standalone decay/fit command.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecaySection {
    /// CSV of `f_p, weight_freespace, weight_waveguide` rows, as written by
    /// the `ensemble` command's distribution output.
    pub distribution_file: Option<PathBuf>,
}

/// Whole run configuration. Every field has a default; an empty file is the
/// bundled ring-device scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub cavity: CavitySection,
    pub fiber: FiberSection,
    pub contact: ContactSection,
    pub ensemble: EnsembleSection,
    pub fit: FitSection,
    pub grid: GridSection,
    pub sweep: SweepSection,
    pub purcell_map: PurcellMapSection,
    pub decay: DecaySection,
    /// `true` keeps side outputs (decay curves for both channels etc.).
    #[serde(default = "default_true")]
    pub emit_all: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            cavity: CavitySection::default(),
            fiber: FiberSection::default(),
            contact: ContactSection::default(),
            ensemble: EnsembleSection::default(),
            fit: FitSection::default(),
            grid: GridSection::default(),
            sweep: SweepSection::default(),
            purcell_map: PurcellMapSection::default(),
            decay: DecaySection::default(),
            emit_all: true,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(toml::from_str(&text)?)
    }

    /// Check ranges and cross-field constraints; returns every violation.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        let mut fail = |key: &str, message: String| {
            v.push(Violation {
                key: key.into(),
                message,
            })
        };

        let c = &self.cavity;
        if !(c.wavelength_nm > 0.0) {
            fail("cavity.wavelength_nm", format!("must be > 0, got {}", c.wavelength_nm));
        }
        if !(c.q > 0.0) {
            fail("cavity.Q", format!("must be > 0, got {}", c.q));
        }
        if c.device != "disk" && c.device != "ring" {
            fail("cavity.device", format!("must be `disk` or `ring`, got `{}`", c.device));
        }
        if !(c.outer_diameter_nm > 0.0) {
            fail("cavity.outer_diameter_nm", format!("must be > 0, got {}", c.outer_diameter_nm));
        }
        if c.device == "ring" {
            if !(c.ring_width_nm > 0.0) {
                fail("cavity.ring_width_nm", format!("must be > 0, got {}", c.ring_width_nm));
            } else if c.ring_width_nm * 2.0 >= c.outer_diameter_nm {
                fail(
                    "cavity.ring_width_nm",
                    format!(
                        "width {} leaves no inner hole at outer diameter {}",
                        c.ring_width_nm, c.outer_diameter_nm
                    ),
                );
            }
        }
        if !(c.slab_thickness_nm > 0.0) {
            fail("cavity.slab_thickness_nm", format!("must be > 0, got {}", c.slab_thickness_nm));
        }
        if !(c.n_cavity > c.n_diamond && c.n_diamond > c.n_ambient && c.n_ambient > 0.0) {
            fail(
                "cavity.n_cavity",
                format!(
                    "index ordering n_cavity > n_diamond > n_ambient > 0 violated: {} / {} / {}",
                    c.n_cavity, c.n_diamond, c.n_ambient
                ),
            );
        }
        if c.polarization != "TE" && c.polarization != "TM" {
            fail("cavity.polarization", format!("must be `TE` or `TM`, got `{}`", c.polarization));
        }
        if let Some(p) = &c.field_file {
            if !p.exists() {
                fail("cavity.field_file", format!("file not found: {}", p.display()));
            }
        }

        let f = &self.fiber;
        if !(f.diameter_nm > 0.0) {
            fail("fiber.diameter_nm", format!("must be > 0, got {}", f.diameter_nm));
        }
        if !(f.n_fiber > f.n_ambient && f.n_ambient > 0.0) {
            fail(
                "fiber.n_fiber",
                format!("must exceed fiber.n_ambient > 0, got {} / {}", f.n_fiber, f.n_ambient),
            );
        }

        let t = &self.contact;
        if t.contact != "top" && t.contact != "side" {
            fail("contact.contact", format!("must be `top` or `side`, got `{}`", t.contact));
        }
        if t.gap_nm < 0.0 {
            fail("contact.gap_nm", format!("must be >= 0, got {}", t.gap_nm));
        }
        if t.half_length_nm < 0.0 {
            fail("contact.half_length_nm", format!("must be >= 0 (0 = auto), got {}", t.half_length_nm));
        }

        let e = &self.ensemble;
        if e.sample_count == 0 {
            fail("ensemble.sample_count", "must be >= 1".into());
        }
        if !(e.depth_mean > 0.0) {
            fail("ensemble.depth_mean", format!("must be > 0, got {}", e.depth_mean));
        }
        if !(e.depth_sigma > 0.0) {
            fail("ensemble.depth_sigma", format!("must be > 0, got {}", e.depth_sigma));
        }
        if !(e.spot_fwhm > 0.0) {
            fail("ensemble.spot_fwhm", format!("must be > 0, got {}", e.spot_fwhm));
        }
        if !(e.spot_center_nm.is_empty() || e.spot_center_nm.len() == 2) {
            fail(
                "ensemble.spot_center_nm",
                format!("must be [] (auto) or [x, y], got {} entries", e.spot_center_nm.len()),
            );
        }
        if e.excitation_axis.iter().all(|x| *x == 0.0) {
            fail("ensemble.excitation_axis", "must be a nonzero vector".into());
        }
        if !(e.lifetime0_ns > 0.0) {
            fail("ensemble.lifetime0_ns", format!("must be > 0, got {}", e.lifetime0_ns));
        }
        if !(e.gamma0_zpl_per_ns >= 0.0) {
            fail("ensemble.gamma0_zpl_per_ns", format!("must be >= 0, got {}", e.gamma0_zpl_per_ns));
        }

        if !(self.fit.window_ns > 0.0) {
            fail("fit.window_ns", format!("must be > 0, got {}", self.fit.window_ns));
        }
        if !(self.fit.dt_ns > 0.0 && self.fit.dt_ns <= self.fit.window_ns.max(f64::MIN_POSITIVE)) {
            fail(
                "fit.dt_ns",
                format!("must satisfy 0 < dt <= window, got dt = {}, window = {}", self.fit.dt_ns, self.fit.window_ns),
            );
        }

        let g = &self.grid;
        if !(g.spacing_nm > 0.0) {
            fail("grid.spacing_nm", format!("must be > 0, got {}", g.spacing_nm));
        }
        if g.lateral_margin_nm < 0.0 {
            fail("grid.lateral_margin_nm", format!("must be >= 0, got {}", g.lateral_margin_nm));
        }
        if !(g.below_nm >= 300.0) {
            fail(
                "grid.below_nm",
                format!("grid must reach at least 300 nm below the device (emitter layer), got {}", g.below_nm),
            );
        }
        if !(g.above_nm >= 0.0) {
            fail("grid.above_nm", format!("must be >= 0, got {}", g.above_nm));
        }
        // cross-field: a side-contact fiber must fit inside the grid height
        if t.contact == "top" && g.above_nm < f.diameter_nm + 50.0 && c.field_file.is_none() {
            fail(
                "grid.above_nm",
                format!(
                    "top-contact fiber (diameter {}) leaves the grid; need above_nm >= {}",
                    f.diameter_nm,
                    f.diameter_nm + 50.0
                ),
            );
        }

        let s = &self.sweep;
        if !(s.diameter_min_nm > 0.0) {
            fail("sweep.diameter_min_nm", format!("must be > 0, got {}", s.diameter_min_nm));
        }
        if s.diameter_max_nm < s.diameter_min_nm {
            fail(
                "sweep.diameter_max_nm",
                format!("must be >= diameter_min_nm, got {} < {}", s.diameter_max_nm, s.diameter_min_nm),
            );
        }
        if !(s.diameter_step_nm > 0.0) {
            fail("sweep.diameter_step_nm", format!("must be > 0, got {}", s.diameter_step_nm));
        }
        if !(s.grid_spacing_nm > 0.0) {
            fail("sweep.grid_spacing_nm", format!("must be > 0, got {}", s.grid_spacing_nm));
        }

        let pm = &self.purcell_map;
        if !(pm.depth_nm > 0.0) {
            fail("purcell_map.depth_nm", format!("must be > 0, got {}", pm.depth_nm));
        }
        if !(pm.step_nm > 0.0) {
            fail("purcell_map.step_nm", format!("must be > 0, got {}", pm.step_nm));
        }
        v
    }

    /// Device specification for the configured cavity.
    pub fn cavity_spec(&self) -> SurrogateWgmSpec {
        let outer = self.cavity.outer_diameter_nm / 2.0;
        let inner = if self.cavity.device == "ring" {
            (outer - self.cavity.ring_width_nm).max(0.0)
        } else {
            0.0
        };
        let mut spec = SurrogateWgmSpec {
            polarization: if self.cavity.polarization == "TM" {
                Polarization::Tm
            } else {
                Polarization::Te
            },
            azimuthal_order: self.cavity.azimuthal_order.max(1),
            outer_radius_nm: outer,
            inner_radius_nm: inner,
            slab_thickness_nm: self.cavity.slab_thickness_nm,
            n_core: self.cavity.n_cavity,
            n_substrate: self.cavity.n_diamond,
            n_ambient: self.cavity.n_ambient,
            wavelength_nm: self.cavity.wavelength_nm,
            standing_wave: self.cavity.standing_wave,
            standing_wave_phase: self.cavity.standing_wave_phase,
        };
        if self.cavity.azimuthal_order == 0 {
            spec.azimuthal_order = spec.resonant_azimuthal_order().unwrap_or(1);
        }
        spec
    }

    /// Spot center: configured, or mid-ring on the +x axis.
    pub fn spot_center(&self) -> [f64; 2] {
        if self.ensemble.spot_center_nm.len() == 2 {
            [self.ensemble.spot_center_nm[0], self.ensemble.spot_center_nm[1]]
        } else {
            [self.cavity_spec().peak_radius_nm(), 0.0]
        }
    }

    /// Ensemble sampling specification.
    pub fn ensemble_spec(&self) -> EnsembleSpec {
        let e = &self.ensemble;
        EnsembleSpec {
            sample_count: e.sample_count,
            seed: e.seed,
            depth_mean_nm: e.depth_mean,
            depth_sigma_nm: e.depth_sigma,
            spot_fwhm_nm: e.spot_fwhm,
            spot_center_nm: self.spot_center(),
            excitation_axis_crystal: e.excitation_axis,
            crystal_azimuth: e.crystal_azimuth_rad,
            gamma0: 1.0 / e.lifetime0_ns,
            gamma0_zpl: e.gamma0_zpl_per_ns,
        }
    }

    /// Grid geometry enclosing the device and the whole excitation spot.
    pub fn grid_geometry(&self) -> GridGeometry {
        let spec = self.cavity_spec();
        let ens = self.ensemble_spec();
        let spot_reach = ens.spot_center_nm[0].hypot(ens.spot_center_nm[1]) + ens.sampling_radius_nm();
        let lateral = (spot_reach - spec.outer_radius_nm).max(0.0) + self.grid.lateral_margin_nm;
        GridGeometry::enclosing(&spec, lateral, self.grid.below_nm, self.grid.above_nm, self.grid.spacing_nm)
    }

    /// Per-mode cavity parameters given the measured grid mode volume.
    ///
    /// A phi-uniform doublet envelope (standing_wave = false) carries twice
    /// the per-mode volume, so it is halved here; the enhancement then sums
    /// both degenerate modes.
    pub fn cavity_params(&self, grid_volume_nm3: f64) -> Result<CavityParams, crate::emitter::EmitterError> {
        let volume = if self.cavity.standing_wave {
            grid_volume_nm3
        } else {
            grid_volume_nm3 / 2.0
        };
        CavityParams::new(
            self.cavity.wavelength_nm,
            self.cavity.q,
            volume,
            self.cavity.n_cavity,
            self.cavity.n_diamond,
        )
    }

    /// Contact geometry for the `couple` command.
    pub fn contact_geometry(&self) -> ContactGeometry {
        let spec = self.cavity_spec();
        let half = if self.contact.half_length_nm > 0.0 {
            self.contact.half_length_nm
        } else {
            self.cavity.outer_diameter_nm / 2.0 + 500.0
        };
        let contact = if self.contact.contact == "top" {
            Contact::Top
        } else {
            Contact::Side
        };
        ContactGeometry::touching(contact, &spec, self.fiber.diameter_nm / 2.0, self.contact.gap_nm, half)
    }

    /// Diameter list of the configured sweep.
    pub fn sweep_diameters(&self) -> Vec<f64> {
        let s = &self.sweep;
        let mut out = Vec::new();
        let mut d = s.diameter_min_nm;
        while d <= s.diameter_max_nm + 1e-9 {
            out.push(d);
            d += s.diameter_step_nm;
        }
        out
    }

    /// Sweep configuration mirroring the device family of this config
    /// (matched disk/ring pairs over the diameter list).
    pub fn sweep_config(&self) -> SweepConfig {
        let mut cfg = SweepConfig::d1_d2_family(self.sweep_diameters());
        cfg.grid_spacing_nm = self.sweep.grid_spacing_nm;
        cfg.fiber_diameter_nm = self.fiber.diameter_nm;
        cfg.n_fiber = self.fiber.n_fiber;
        cfg.wavelength_nm = self.cavity.wavelength_nm;
        cfg
    }

    /// Resolved config as TOML, for provenance headers.
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).unwrap_or_else(|e| format!("# serialization failed: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        let cfg = RunConfig::default();
        assert!(cfg.validate().is_empty(), "{:?}", cfg.validate());
    }

    #[test]
    fn empty_toml_is_the_default_scenario() {
        let cfg: RunConfig = toml::from_str("").unwrap();
        assert_eq!(cfg.cavity.q, 3500.0);
        assert_eq!(cfg.cavity.wavelength_nm, 637.0);
        assert_eq!(cfg.ensemble.depth_mean, 15.0);
        assert_eq!(cfg.ensemble.depth_sigma, 5.0);
        assert_eq!(cfg.ensemble.spot_fwhm, 500.0);
        assert_eq!(cfg.fiber.diameter_nm, 550.0);
        assert_eq!(cfg.fit.window_ns, 40.0);
        assert!(cfg.validate().is_empty());
    }

    #[test]
    fn violations_are_collected_with_key_paths() {
        let cfg: RunConfig = toml::from_str(
            "[cavity]\nQ = 0.0\n[ensemble]\ndepth_sigma = -1.0\n[fiber]\ndiameter_nm = -5.0\n",
        )
        .unwrap();
        let v = cfg.validate();
        let keys: Vec<&str> = v.iter().map(|x| x.key.as_str()).collect();
        assert!(keys.contains(&"cavity.Q"), "{keys:?}");
        assert!(keys.contains(&"ensemble.depth_sigma"), "{keys:?}");
        assert!(keys.contains(&"fiber.diameter_nm"), "{keys:?}");
        assert!(v.len() >= 3);
    }

    #[test]
    fn unknown_keys_are_parse_errors() {
        let err = toml::from_str::<RunConfig>("[cavity]\nquality = 1\n");
        assert!(err.is_err());
    }

    #[test]
    fn spot_defaults_to_mid_ring() {
        let cfg = RunConfig::default();
        let spec = cfg.cavity_spec();
        let center = cfg.spot_center();
        assert_eq!(center[1], 0.0);
        assert!((center[0] - 0.5 * (spec.inner_radius_nm + spec.outer_radius_nm)).abs() < 1e-12);
    }

    #[test]
    fn doublet_halves_the_mode_volume() {
        let cfg = RunConfig::default();
        assert!(!cfg.cavity.standing_wave);
        let p = cfg.cavity_params(2.0e8).unwrap();
        assert_eq!(p.volume_nm3, 1.0e8);
        let mut single = cfg.clone();
        single.cavity.standing_wave = true;
        assert_eq!(single.cavity_params(2.0e8).unwrap().volume_nm3, 2.0e8);
    }

    #[test]
    fn sweep_diameter_list_covers_range() {
        let cfg = RunConfig::default();
        let d = cfg.sweep_diameters();
        assert_eq!(d.first().copied(), Some(800.0));
        assert_eq!(d.last().copied(), Some(3000.0));
        assert_eq!(d.len(), 23);
    }

    #[test]
    fn round_trip_through_toml() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml_string();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.cavity.q, cfg.cavity.q);
        assert_eq!(back.ensemble.seed, cfg.ensemble.seed);
    }
}
