//! Single-emitter physics: dipole geometry of the diamond color center,
//! Purcell factors, decay rates and lifetime ratios.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{FieldError, FieldGrid, ModeVolume};
use crate::surrogate::C_NM_PER_NS;
use crate::vec3::{cross, dot, norm, normalize, project, scale, sub, Vec3};

#[derive(Debug, Error)]
pub enum EmitterError {
    #[error("cavity params invalid: {0}")]
    InvalidParams(String),
    #[error("zero vector cannot define a dipole axis")]
    ZeroAxis,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Scalar cavity descriptors.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CavityParams {
    pub lambda0_nm: f64,
    /// Resonance frequency, rad/ns (= 2 pi c / lambda0).
    pub omega0: f64,
    pub q: f64,
    /// Cavity linewidth kappa = omega0 / Q, rad/ns.
    pub kappa: f64,
    /// Mode volume, nm^3.
    pub volume_nm3: f64,
    /// Cavity material index.
    pub n_cavity: f64,
    /// Diamond index.
    pub n_diamond: f64,
}

impl CavityParams {
    pub fn new(lambda0_nm: f64, q: f64, volume_nm3: f64, n_cavity: f64, n_diamond: f64) -> Result<Self, EmitterError> {
        if lambda0_nm <= 0.0 || q <= 0.0 || volume_nm3 <= 0.0 {
            return Err(EmitterError::InvalidParams(format!(
                "lambda0 = {lambda0_nm}, Q = {q}, V = {volume_nm3} must all be positive"
            )));
        }
        let omega0 = 2.0 * std::f64::consts::PI * C_NM_PER_NS / lambda0_nm;
        Ok(Self {
            lambda0_nm,
            omega0,
            q,
            kappa: omega0 / q,
            volume_nm3,
            n_cavity,
            n_diamond,
        })
    }
}

/// The four tetrahedral <111> axes (crystal frame, unit length).
pub fn nv_axes() -> [Vec3; 4] {
    let s = 1.0 / 3f64.sqrt();
    [
        [s, s, s],
        [s, -s, -s],
        [-s, s, -s],
        [-s, -s, s],
    ]
}

/// Canonical in-plane basis (u1, u2) perpendicular to a <111> axis.
///
/// For the [1,1,1] axis this is the conventional pair
/// u1 = [-1,-1,2]/sqrt(6), u2 = [1,-1,0]/sqrt(2); the other tetrahedral axes
/// use the point-group rotation (a sign flip on two coordinates) that maps
/// [1,1,1] onto them. Arbitrary axes fall back to the minimal rotation from
/// [1,1,1].
pub fn canonical_perp_basis(axis: Vec3) -> Result<(Vec3, Vec3), EmitterError> {
    let n = norm(axis);
    if n == 0.0 {
        return Err(EmitterError::ZeroAxis);
    }
    let axis = scale(axis, 1.0 / n);
    let u1_111: Vec3 = [-1.0 / 6f64.sqrt(), -1.0 / 6f64.sqrt(), 2.0 / 6f64.sqrt()];
    let u2_111: Vec3 = [1.0 / 2f64.sqrt(), -1.0 / 2f64.sqrt(), 0.0];
    let s = 1.0 / 3f64.sqrt();
    // the four diag(+-1) point-group elements mapping [111] to each axis
    let signs: [[f64; 3]; 4] = [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    for sg in signs {
        let target = [s * sg[0], s * sg[1], s * sg[2]];
        if norm(sub(axis, target)) < 1e-9 {
            let u1 = [u1_111[0] * sg[0], u1_111[1] * sg[1], u1_111[2] * sg[2]];
            let u2 = [u2_111[0] * sg[0], u2_111[1] * sg[1], u2_111[2] * sg[2]];
            return Ok((u1, u2));
        }
    }
    // minimal rotation from [1,1,1]/sqrt(3) to the requested axis
    let from: Vec3 = [s, s, s];
    let c = dot(from, axis);
    if c < -1.0 + 1e-12 {
        // antipodal: rotate u's by pi about any perpendicular axis
        return Ok((scale(u1_111, -1.0), u2_111));
    }
    let v = cross(from, axis);
    let rotate = |p: Vec3| -> Vec3 {
        // Rodrigues with angle implied by (c, |v|)
        let vxp = cross(v, p);
        let vvp = cross(v, vxp);
        [
            p[0] + vxp[0] + vvp[0] / (1.0 + c),
            p[1] + vxp[1] + vvp[1] / (1.0 + c),
            p[2] + vxp[2] + vvp[2] / (1.0 + c),
        ]
    };
    Ok((rotate(u1_111), rotate(u2_111)))
}

/// The two orthogonal transition-dipole directions of an emitter with the
/// given symmetry axis and strain angle beta:
/// `mu1 = u1 cos(beta) + u2 sin(beta)`, `mu2 = -u1 sin(beta) + u2 cos(beta)`.
pub fn dipole_axes(nv_axis: Vec3, beta: f64) -> Result<(Vec3, Vec3), EmitterError> {
    let (u1, u2) = canonical_perp_basis(nv_axis)?;
    let (sb, cb) = beta.sin_cos();
    let mu1 = [
        u1[0] * cb + u2[0] * sb,
        u1[1] * cb + u2[1] * sb,
        u1[2] * cb + u2[2] * sb,
    ];
    let mu2 = [
        -u1[0] * sb + u2[0] * cb,
        -u1[1] * sb + u2[1] * cb,
        -u1[2] * sb + u2[2] * cb,
    ];
    Ok((mu1, mu2))
}

/// One emitter transition: position and dipole geometry plus rates.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EmitterSample {
    /// Position in the device frame, nm.
    pub position: Vec3,
    /// Symmetry axis (crystal frame, unit).
    pub nv_axis: Vec3,
    /// Strain angle, radians.
    pub beta: f64,
    /// Which orbital excited state this transition belongs to (1 or 2).
    pub excited_state: u8,
    /// Detuning from the cavity resonance, rad/ns.
    pub detuning: f64,
    /// Total uncoupled decay rate, 1/ns.
    pub gamma0: f64,
    /// Bulk zero-phonon spontaneous emission rate, 1/ns.
    pub gamma0_zpl: f64,
}

impl EmitterSample {
    /// Transition dipole direction in the crystal frame.
    pub fn dipole_crystal(&self) -> Result<Vec3, EmitterError> {
        let (mu1, mu2) = dipole_axes(self.nv_axis, self.beta)?;
        Ok(if self.excited_state <= 1 { mu1 } else { mu2 })
    }
}

/// Crystal-to-device frame rotation for a (110)-oriented chip.
///
/// The device normal (lab z) is the crystal [1,1,0] direction; the in-plane
/// azimuth of the crystal about that normal is configurable and defaults to 0
/// (lab x along crystal [0,0,1]).
#[derive(Debug, Clone, Copy)]
pub struct CrystalFrame {
    /// Rows are the lab axes expressed in crystal coordinates.
    rows: [Vec3; 3],
}

impl CrystalFrame {
    pub fn chip_110(azimuth: f64) -> Self {
        let r = 1.0 / 2f64.sqrt();
        let x0: Vec3 = [0.0, 0.0, 1.0];
        let y0: Vec3 = [r, -r, 0.0];
        let z: Vec3 = [r, r, 0.0];
        let (sa, ca) = azimuth.sin_cos();
        // rotate the in-plane pair about the normal
        let x = [
            x0[0] * ca + y0[0] * sa,
            x0[1] * ca + y0[1] * sa,
            x0[2] * ca + y0[2] * sa,
        ];
        let y = [
            -x0[0] * sa + y0[0] * ca,
            -x0[1] * sa + y0[1] * ca,
            -x0[2] * sa + y0[2] * ca,
        ];
        Self { rows: [x, y, z] }
    }

    /// Map a crystal-frame vector into the device (lab) frame.
    pub fn to_lab(&self, v: Vec3) -> Vec3 {
        [dot(self.rows[0], v), dot(self.rows[1], v), dot(self.rows[2], v)]
    }
}

/// On-resonance monolithic Purcell factor
/// `(3 / 4 pi^2) (lambda0/n_c)^3 (Q/V) field_ratio^2`.
pub fn purcell_simple(params: &CavityParams, field_ratio: f64) -> f64 {
    let lam_over_n = params.lambda0_nm / params.n_cavity;
    3.0 / (4.0 * std::f64::consts::PI * std::f64::consts::PI)
        * lam_over_n.powi(3)
        * params.q
        / params.volume_nm3
        * field_ratio
        * field_ratio
}

/// Hybrid-geometry Purcell factor with dipole alignment and spectral
/// detuning:
/// `purcell_simple * (n_c/n_d) * |mu . E(r)|^2 / E_max^2 * kappa^2/(kappa^2 + 4 delta^2)`.
///
/// `mv` must come from `cavity.mode_volume()` on the same normalized grid;
/// it supplies the peak-field normalization `e_max`. `params.volume_nm3` sets
/// the per-mode volume (callers modelling a degenerate doublet pass half the
/// grid's volume).
pub fn purcell_factor(
    sample: &EmitterSample,
    dipole_lab: Vec3,
    cavity: &FieldGrid,
    params: &CavityParams,
    mv: &ModeVolume,
) -> Result<f64, EmitterError> {
    let e = cavity.field_at(sample.position)?;
    let mu = normalize(dipole_lab);
    let overlap = project(&e, mu).norm() / mv.e_max;
    let lorentz = params.kappa * params.kappa
        / (params.kappa * params.kappa + 4.0 * sample.detuning * sample.detuning);
    Ok(purcell_simple(params, overlap) * (params.n_cavity / params.n_diamond) * lorentz)
}

/// Total decay rate `gamma0 + F_p * gamma0_zpl`.
pub fn decay_rate(gamma0: f64, f_p: f64, gamma0_zpl: f64) -> f64 {
    gamma0 + f_p * gamma0_zpl
}

/// On-resonance to uncoupled lifetime ratio `1 / (1 + F_p * delta)`.
pub fn lifetime_ratio(f_p: f64, delta: f64) -> f64 {
    1.0 / (1.0 + f_p * delta)
}
