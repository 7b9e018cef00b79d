//! Weighted emitter ensembles: sampling, Purcell distributions, decay curves
//! and single-exponential lifetime fits.
//!
//! Each physical emitter contributes two entries (one per orthogonal
//! transition dipole). Free-space detection weights an entry by its
//! excitation probability — the diffraction-limited spot profile times the
//! projection of the pump polarization onto the dipole. Waveguide detection
//! additionally weights by the collection efficiency into the cavity-fiber
//! channel, which is proportional to the entry's own Purcell factor; this
//! size bias is why waveguide-collected lifetimes are shorter than
//! free-space ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::emitter::{
    decay_rate, dipole_axes, nv_axes, purcell_simple, CavityParams, CrystalFrame, EmitterError,
    EmitterSample,
};
use crate::grid::{FieldError, FieldGrid, ModeVolume};
use crate::specfun::{airy_intensity, AIRY_FIRST_ZERO_X, AIRY_HALF_MAX_X};
use crate::vec3::{dot, norm, normalize, project, Vec3};

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("ensemble spec invalid: {0}")]
    InvalidSpec(String),
    #[error("decay curve has no usable points in the fit window")]
    EmptyFitWindow,
    #[error(transparent)]
    Emitter(#[from] EmitterError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Detection channel for weighted ensemble statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Collection {
    FreeSpace,
    Waveguide,
}

impl std::fmt::Display for Collection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Collection::FreeSpace => write!(f, "freespace"),
            Collection::Waveguide => write!(f, "waveguide"),
        }
    }
}

/// Monte-Carlo ensemble description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleSpec {
    /// Number of physical emitters (each yields two transition entries).
    pub sample_count: usize,
    pub seed: u64,
    /// Implantation depth distribution below the slab, nm (normal truncated
    /// at zero).
    pub depth_mean_nm: f64,
    pub depth_sigma_nm: f64,
    /// FWHM of the diffraction-limited excitation spot intensity, nm.
    pub spot_fwhm_nm: f64,
    /// Spot center in the device plane, nm.
    pub spot_center_nm: [f64; 2],
    /// Pump polarization direction in the crystal frame.
    pub excitation_axis_crystal: Vec3,
    /// In-plane azimuth of the crystal about the chip normal, radians.
    pub crystal_azimuth: f64,
    /// Total uncoupled decay rate, 1/ns.
    pub gamma0: f64,
    /// Bulk zero-phonon emission rate, 1/ns.
    pub gamma0_zpl: f64,
}

impl EnsembleSpec {
    /// Defaults for the shallow-implant ensemble under a ring device:
    /// 15 +- 5 nm depth, 500 nm spot, 8.4 ns bulk lifetime.
    pub fn shallow_implant(spot_center_nm: [f64; 2], sample_count: usize, seed: u64) -> Self {
        Self {
            sample_count,
            seed,
            depth_mean_nm: 15.0,
            depth_sigma_nm: 5.0,
            spot_fwhm_nm: 500.0,
            spot_center_nm,
            excitation_axis_crystal: [1.0, 0.0, 0.0],
            crystal_azimuth: 0.0,
            gamma0: 1.0 / 8.4,
            gamma0_zpl: 0.0025,
        }
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        if self.sample_count == 0 {
            return Err(EnsembleError::InvalidSpec("sample_count must be > 0".into()));
        }
        if self.depth_sigma_nm < 0.0 || self.depth_mean_nm < 0.0 {
            return Err(EnsembleError::InvalidSpec(format!(
                "depth distribution must be non-negative, got {} +- {} nm",
                self.depth_mean_nm, self.depth_sigma_nm
            )));
        }
        if self.spot_fwhm_nm <= 0.0 {
            return Err(EnsembleError::InvalidSpec("spot_fwhm_nm must be > 0".into()));
        }
        if norm(self.excitation_axis_crystal) == 0.0 {
            return Err(EnsembleError::InvalidSpec("excitation axis must be nonzero".into()));
        }
        if self.gamma0 <= 0.0 || self.gamma0_zpl < 0.0 {
            return Err(EnsembleError::InvalidSpec(format!(
                "rates must be positive, got gamma0 = {}, gamma0_zpl = {}",
                self.gamma0, self.gamma0_zpl
            )));
        }
        Ok(())
    }

    /// Radius of the first zero of the spot intensity pattern, nm.
    pub fn spot_first_zero_nm(&self) -> f64 {
        self.spot_fwhm_nm * AIRY_FIRST_ZERO_X / (2.0 * AIRY_HALF_MAX_X)
    }

    /// Lateral sampling radius: the first dark ring of the spot.  Emitters
    /// outside it receive under a few percent of the excitation power and
    /// contribute negligibly to either weighted distribution.
    pub fn sampling_radius_nm(&self) -> f64 {
        self.spot_first_zero_nm()
    }
}

/// Excitation-spot intensity weight at lateral distance `rho_nm` from the
/// spot center (peak-normalized Airy pattern with the given intensity FWHM).
pub fn spot_weight(fwhm_nm: f64, rho_nm: f64) -> f64 {
    airy_intensity(2.0 * AIRY_HALF_MAX_X * rho_nm / fwhm_nm)
}

/// One transition entry with its excitation weight.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WeightedTransition {
    pub sample: EmitterSample,
    /// Excitation probability weight (spot profile x pump-dipole projection).
    pub weight: f64,
}

/// Draw the ensemble. Deterministic for a given spec (including seed):
/// sampling is strictly sequential so the result is bit-exact across
/// machines and thread counts.
pub fn sample_ensemble(spec: &EnsembleSpec) -> Result<Vec<WeightedTransition>, EnsembleError> {
    spec.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let e_exc = normalize(spec.excitation_axis_crystal);
    let r_sample = spec.sampling_radius_nm();
    let mut out = Vec::with_capacity(2 * spec.sample_count);
    for _ in 0..spec.sample_count {
        // uniform in the sampling disk
        let r = r_sample * rng.gen::<f64>().sqrt();
        let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
        let x = spec.spot_center_nm[0] + r * phi.cos();
        let y = spec.spot_center_nm[1] + r * phi.sin();
        // truncated-normal depth (Box-Muller + rejection of negative draws)
        let depth = loop {
            let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
            let u2: f64 = rng.gen();
            let g = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            let d = spec.depth_mean_nm + spec.depth_sigma_nm * g;
            if d >= 0.0 {
                break d;
            }
        };
        let axis = nv_axes()[rng.gen_range(0..4)];
        let beta = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
        let spot = spot_weight(spec.spot_fwhm_nm, r);
        let (mu1, mu2) = dipole_axes(axis, beta)?;
        let base = EmitterSample {
            position: [x, y, -depth],
            nv_axis: axis,
            beta,
            excited_state: 1,
            detuning: 0.0,
            gamma0: spec.gamma0,
            gamma0_zpl: spec.gamma0_zpl,
        };
        for (state, mu) in [(1u8, mu1), (2u8, mu2)] {
            let align = dot(mu, e_exc);
            out.push(WeightedTransition {
                sample: EmitterSample { excited_state: state, ..base },
                weight: spot * align * align,
            });
        }
    }
    Ok(out)
}

/// One entry of a Purcell distribution.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DistributionEntry {
    pub f_p: f64,
    /// Total decay rate gamma0 + F_p gamma0_zpl, 1/ns.
    pub gamma_per_ns: f64,
    pub weight_freespace: f64,
    /// Free-space weight times the waveguide collection factor (prop. F_p).
    pub weight_waveguide: f64,
}

/// Weighted Purcell-factor distribution of an ensemble under a cavity field.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PurcellDistribution {
    pub entries: Vec<DistributionEntry>,
}

impl PurcellDistribution {
    pub fn from_factors(factors: &[(f64, f64)], gamma0: f64, gamma0_zpl: f64) -> Self {
        let entries = factors
            .iter()
            .map(|&(f_p, w)| DistributionEntry {
                f_p,
                gamma_per_ns: decay_rate(gamma0, f_p, gamma0_zpl),
                weight_freespace: w,
                weight_waveguide: w * f_p,
            })
            .collect();
        Self { entries }
    }

    fn weight(e: &DistributionEntry, channel: Collection) -> f64 {
        match channel {
            Collection::FreeSpace => e.weight_freespace,
            Collection::Waveguide => e.weight_waveguide,
        }
    }

    /// Weighted mean Purcell factor for a detection channel.
    pub fn mean_purcell(&self, channel: Collection) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for e in &self.entries {
            let w = Self::weight(e, channel);
            num += w * e.f_p;
            den += w;
        }
        if den > 0.0 {
            num / den
        } else {
            0.0
        }
    }

    /// Weighted histogram over the given bin edges (len = edges.len() - 1;
    /// entries outside the edges are dropped).
    pub fn histogram(&self, edges: &[f64], channel: Collection) -> Vec<f64> {
        let mut bins = vec![0.0; edges.len().saturating_sub(1)];
        for e in &self.entries {
            for b in 0..bins.len() {
                let last = b == bins.len() - 1;
                if e.f_p >= edges[b] && (e.f_p < edges[b + 1] || (last && e.f_p <= edges[b + 1])) {
                    bins[b] += Self::weight(e, channel);
                    break;
                }
            }
        }
        bins
    }
}

/// Evaluate the Purcell factor of every transition entry on a normalized
/// cavity grid. The entry order follows the input; the parallel map is
/// deterministic.
///
/// `params.volume_nm3` sets the per-mode volume of the Purcell prefactor
/// (callers modelling a degenerate doublet pass half the grid's volume);
/// `mv` supplies the peak-field normalization `e_max`.
pub fn purcell_distribution(
    transitions: &[WeightedTransition],
    cavity: &FieldGrid,
    params: &CavityParams,
    mv: &ModeVolume,
    frame: &CrystalFrame,
) -> Result<PurcellDistribution, EnsembleError> {
    let peak = purcell_simple(params, 1.0) * (params.n_cavity / params.n_diamond);
    let entries: Result<Vec<DistributionEntry>, EnsembleError> = transitions
        .par_iter()
        .map(|t| {
            let mu_lab = frame.to_lab(t.sample.dipole_crystal()?);
            let e = cavity.field_at(t.sample.position)?;
            let overlap = project(&e, normalize(mu_lab)).norm() / mv.e_max;
            let k = params.kappa;
            let lorentz = k * k / (k * k + 4.0 * t.sample.detuning * t.sample.detuning);
            let f_p = peak * overlap * overlap * lorentz;
            Ok(DistributionEntry {
                f_p,
                gamma_per_ns: decay_rate(t.sample.gamma0, f_p, t.sample.gamma0_zpl),
                weight_freespace: t.weight,
                weight_waveguide: t.weight * f_p,
            })
        })
        .collect();
    Ok(PurcellDistribution { entries: entries? })
}

/// Normalized ensemble decay curve, I(0) = 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayCurve {
    pub times_ns: Vec<f64>,
    pub intensities: Vec<f64>,
}

/// Weighted multi-exponential decay `I(t) = sum w_i exp(-gamma_i t) / sum w_i`
/// on a uniform time grid.
pub fn decay_curve(
    dist: &PurcellDistribution,
    channel: Collection,
    t_max_ns: f64,
    dt_ns: f64,
) -> Result<DecayCurve, EnsembleError> {
    if !(t_max_ns > 0.0) || !(dt_ns > 0.0) {
        return Err(EnsembleError::InvalidSpec(format!(
            "time grid must be positive, got t_max = {t_max_ns}, dt = {dt_ns}"
        )));
    }
    let n = (t_max_ns / dt_ns).round() as usize;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * dt_ns).collect();
    let total: f64 = dist
        .entries
        .iter()
        .map(|e| PurcellDistribution::weight(e, channel))
        .sum();
    if total <= 0.0 {
        return Err(EnsembleError::InvalidSpec(
            "all weights vanish for the requested channel".into(),
        ));
    }
    let intensities: Vec<f64> = times
        .par_iter()
        .map(|&t| {
            dist.entries
                .iter()
                .map(|e| PurcellDistribution::weight(e, channel) * (-e.gamma_per_ns * t).exp())
                .sum::<f64>()
                / total
        })
        .collect();
    Ok(DecayCurve { times_ns: times, intensities })
}

/// Single-exponential fit result.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FitResult {
    pub tau_ns: f64,
    pub gamma_per_ns: f64,
    /// Fitted intensity at t = 0.
    pub intercept: f64,
    /// RMS residual of ln I over the fit window.
    pub rms_log_residual: f64,
}

/// Unweighted least-squares line through `ln I(t)` on `t <= window_ns`.
pub fn fit_single_exponential(curve: &DecayCurve, window_ns: f64) -> Result<FitResult, EnsembleError> {
    let pts: Vec<(f64, f64)> = curve
        .times_ns
        .iter()
        .zip(&curve.intensities)
        .filter(|&(&t, &i)| t <= window_ns && i > 0.0)
        .map(|(&t, &i)| (t, i.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(EnsembleError::EmptyFitWindow);
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let rms = (pts
        .iter()
        .map(|&(t, y)| {
            let r = y - (intercept + slope * t);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    if !(slope < 0.0) {
        return Err(EnsembleError::InvalidSpec(format!(
            "decay fit produced non-decaying slope {slope}"
        )));
    }
    Ok(FitResult {
        tau_ns: -1.0 / slope,
        gamma_per_ns: -slope,
        intercept: intercept.exp(),
        rms_log_residual: rms,
    })
}

/// Resolution of the deterministic quadrature oracle.
#[derive(Debug, Clone, Copy)]
pub struct QuadratureResolution {
    pub n_radial: usize,
    pub n_azimuthal: usize,
    pub n_depth: usize,
    pub n_beta: usize,
}

impl Default for QuadratureResolution {
    fn default() -> Self {
        Self { n_radial: 48, n_azimuthal: 512, n_depth: 24, n_beta: 16 }
    }
}

/// Deterministic tensor-grid evaluation of the channel-weighted mean Purcell
/// factors `(freespace, waveguide)`; independent cross-check for the
/// Monte-Carlo pipeline.
///
/// Integrates spot-weighted lateral position (midpoint polar grid over the
/// sampling disk), truncated-normal depth, the four symmetry axes and a
/// uniform strain-angle grid, both transitions per point.
pub fn mean_purcell_quadrature(
    spec: &EnsembleSpec,
    cavity: &FieldGrid,
    params: &CavityParams,
    mv: &ModeVolume,
    frame: &CrystalFrame,
    res: &QuadratureResolution,
) -> Result<(f64, f64), EnsembleError> {
    spec.validate()?;
    let e_exc = normalize(spec.excitation_axis_crystal);
    // same prefactor convention as `purcell_distribution`: the per-mode
    // volume comes from `params`, the field normalization from `mv`
    let peak = purcell_simple(params, 1.0) * (params.n_cavity / params.n_diamond);
    let r_max = spec.sampling_radius_nm();

    // positional weight and cavity field, cached per lateral x depth node
    struct PosNode {
        e: crate::vec3::CVec3,
        w: f64,
    }
    let mut depth_nodes = Vec::with_capacity(res.n_depth);
    let d_max = spec.depth_mean_nm + 5.0 * spec.depth_sigma_nm;
    for id in 0..res.n_depth {
        let d = d_max * (id as f64 + 0.5) / res.n_depth as f64;
        let z = (d - spec.depth_mean_nm) / spec.depth_sigma_nm.max(f64::MIN_POSITIVE);
        depth_nodes.push((d, (-0.5 * z * z).exp()));
    }
    let mut positions: Vec<PosNode> = Vec::new();
    for ir in 0..res.n_radial {
        let r = r_max * (ir as f64 + 0.5) / res.n_radial as f64;
        let spot = spot_weight(spec.spot_fwhm_nm, r);
        for ip in 0..res.n_azimuthal {
            let phi = 2.0 * std::f64::consts::PI * (ip as f64 + 0.5) / res.n_azimuthal as f64;
            let x = spec.spot_center_nm[0] + r * phi.cos();
            let y = spec.spot_center_nm[1] + r * phi.sin();
            for &(d, wd) in &depth_nodes {
                let e = cavity.field_at([x, y, -d])?;
                positions.push(PosNode { e, w: spot * r * wd });
            }
        }
    }

    let sums: [f64; 4] = nv_axes()
        .into_par_iter()
        .flat_map_iter(|axis| {
            (0..res.n_beta).map(move |ib| (axis, ib))
        })
        .map(|(axis, ib)| {
            let beta = 2.0 * std::f64::consts::PI * (ib as f64 + 0.5) / res.n_beta as f64;
            let (mu1, mu2) = dipole_axes(axis, beta).expect("tetrahedral axes are nonzero");
            let mut local = [0.0; 4];
            for mu in [mu1, mu2] {
                let wexc = {
                    let c = dot(mu, e_exc);
                    c * c
                };
                if wexc == 0.0 {
                    continue;
                }
                let mu_lab = frame.to_lab(mu);
                for p in &positions {
                    // all entries are on resonance: no Lorentzian factor
                    let overlap = project(&p.e, mu_lab).norm() / mv.e_max;
                    let f_p = peak * overlap * overlap;
                    let w = p.w * wexc;
                    local[0] += w * f_p;
                    local[1] += w;
                    local[2] += w * f_p * f_p;
                    local[3] += w * f_p;
                }
            }
            local
        })
        .reduce(
            || [0.0; 4],
            |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]],
        );
    Ok((sums[0] / sums[1], sums[2] / sums[3]))
}
