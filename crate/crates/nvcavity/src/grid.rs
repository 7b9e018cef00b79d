//! Discretized cavity fields on regular 3-D grids.
//!
//! A [`FieldGrid`] stores a complex vector electric field together with the
//! relative-permittivity map on a regular grid. Fields either come from an
//! external solver through the line-oriented text format implemented by
//! [`FieldGrid::load`] / [`FieldGrid::write`], or from the analytic
//! whispering-gallery surrogate in [`crate::surrogate`].
//!
//! Energy normalization uses the equipartition form `2 * integral(eps |E|^2) = 1`
//! so that magnetic-field data is never required; for true eigenmodes this is
//! equal to the full electric-plus-magnetic energy normalization.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use num_complex::Complex64;
use thiserror::Error;

use crate::vec3::{cnorm_sq, CVec3, Vec3};

/// Relative tolerance on the unit-energy invariant of a normalized grid.
pub const ENERGY_NORM_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("i/o error reading field file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed header at line {line}: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("malformed node row at line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error("node count mismatch: header declares {expected} nodes, file has {found} (line {line})")]
    NodeCountMismatch { expected: usize, found: usize, line: usize },
    #[error("epsilon {value} < 1 at line {line}")]
    EpsilonBelowOne { value: f64, line: usize },
    #[error("non-monotonic grid: {0}")]
    NonMonotonicGrid(String),
    #[error("point ({0}, {1}, {2}) nm lies outside the grid bounding box")]
    OutOfBounds(f64, f64, f64),
    #[error("degenerate field: total electric energy is zero")]
    DegenerateField,
    #[error("invalid grid geometry: {0}")]
    InvalidGeometry(String),
}

/// Complex vector E-field plus dielectric map on a regular 3-D grid.
///
/// Node `(ix, iy, iz)` sits at `origin + (ix*dx, iy*dy, iz*dz)`; storage is
/// x-fastest. Immutable after construction.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    origin: Vec3,
    spacing: Vec3,
    dims: [usize; 3],
    e_field: Vec<CVec3>,
    epsilon: Vec<f64>,
    wavelength_nm: f64,
    normalized: bool,
}

/// Result of the mode-volume quadrature.
#[derive(Debug, Clone, Copy)]
pub struct ModeVolume {
    /// V = integral(eps |E|^2) / max(eps |E|^2), in nm^3.
    pub volume_nm3: f64,
    /// Location of the arg-max node of eps |E|^2.
    pub r_max: Vec3,
    /// |E| at the arg-max node.
    pub e_max: f64,
    /// Relative permittivity at the arg-max node.
    pub eps_max: f64,
}

impl FieldGrid {
    /// Assemble a grid from raw node data (x-fastest order).
    pub fn from_parts(
        origin: Vec3,
        spacing: Vec3,
        dims: [usize; 3],
        wavelength_nm: f64,
        e_field: Vec<CVec3>,
        epsilon: Vec<f64>,
    ) -> Result<Self, FieldError> {
        if dims.iter().any(|&d| d < 2) {
            return Err(FieldError::InvalidGeometry(format!(
                "dims must be >= 2 along every axis, got {dims:?}"
            )));
        }
        if spacing.iter().any(|&s| s <= 0.0) {
            return Err(FieldError::InvalidGeometry(format!(
                "spacing must be positive, got {spacing:?}"
            )));
        }
        let n = dims[0] * dims[1] * dims[2];
        if e_field.len() != n || epsilon.len() != n {
            return Err(FieldError::InvalidGeometry(format!(
                "node data length {} / {} does not match dims product {n}",
                e_field.len(),
                epsilon.len()
            )));
        }
        if let Some(&bad) = epsilon.iter().find(|&&e| e < 1.0) {
            return Err(FieldError::InvalidGeometry(format!("epsilon {bad} < 1")));
        }
        Ok(Self { origin, spacing, dims, e_field, epsilon, wavelength_nm, normalized: false })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn spacing(&self) -> Vec3 {
        self.spacing
    }

    pub fn wavelength_nm(&self) -> f64 {
        self.wavelength_nm
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Upper corner of the bounding box.
    pub fn upper_corner(&self) -> Vec3 {
        [
            self.origin[0] + self.spacing[0] * (self.dims[0] - 1) as f64,
            self.origin[1] + self.spacing[1] * (self.dims[1] - 1) as f64,
            self.origin[2] + self.spacing[2] * (self.dims[2] - 1) as f64,
        ]
    }

    #[inline]
    fn index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        ix + self.dims[0] * (iy + self.dims[1] * iz)
    }

    pub fn node_position(&self, ix: usize, iy: usize, iz: usize) -> Vec3 {
        [
            self.origin[0] + self.spacing[0] * ix as f64,
            self.origin[1] + self.spacing[1] * iy as f64,
            self.origin[2] + self.spacing[2] * iz as f64,
        ]
    }

    pub fn e_at_node(&self, ix: usize, iy: usize, iz: usize) -> CVec3 {
        self.e_field[self.index(ix, iy, iz)]
    }

    pub fn eps_at_node(&self, ix: usize, iy: usize, iz: usize) -> f64 {
        self.epsilon[self.index(ix, iy, iz)]
    }

    /// Node-weight quadrature of `2 * eps * |E|^2` over the grid.
    pub fn energy_integral(&self) -> f64 {
        let dv = self.spacing[0] * self.spacing[1] * self.spacing[2];
        let mut acc = 0.0;
        for (e, &eps) in self.e_field.iter().zip(&self.epsilon) {
            acc += eps * cnorm_sq(e);
        }
        2.0 * acc * dv
    }

    /// Rescale the field so the discrete unit-energy integral equals 1.
    pub fn normalize_unit_energy(mut self) -> Result<Self, FieldError> {
        let u = self.energy_integral();
        if u <= 0.0 || !u.is_finite() {
            return Err(FieldError::DegenerateField);
        }
        let s = 1.0 / u.sqrt();
        for e in &mut self.e_field {
            e[0] *= s;
            e[1] *= s;
            e[2] *= s;
        }
        self.normalized = true;
        Ok(self)
    }

    /// Mode volume `integral(eps |E|^2) / max(eps |E|^2)` plus the arg-max node.
    ///
    /// Invariant under rescaling of the field amplitude.
    pub fn mode_volume(&self) -> Result<ModeVolume, FieldError> {
        let dv = self.spacing[0] * self.spacing[1] * self.spacing[2];
        let mut num = 0.0;
        let mut best = f64::NEG_INFINITY;
        let mut best_idx = 0usize;
        for (i, (e, &eps)) in self.e_field.iter().zip(&self.epsilon).enumerate() {
            let d = eps * cnorm_sq(e);
            num += d;
            if d > best {
                best = d;
                best_idx = i;
            }
        }
        if best <= 0.0 {
            return Err(FieldError::DegenerateField);
        }
        let nx = self.dims[0];
        let ny = self.dims[1];
        let ix = best_idx % nx;
        let iy = (best_idx / nx) % ny;
        let iz = best_idx / (nx * ny);
        Ok(ModeVolume {
            volume_nm3: num * dv / best,
            r_max: self.node_position(ix, iy, iz),
            e_max: cnorm_sq(&self.e_field[best_idx]).sqrt(),
            eps_max: self.epsilon[best_idx],
        })
    }

    /// Trilinear interpolation of each complex component at `point` (nm).
    ///
    /// Points outside the bounding box are an error, never silently zero.
    pub fn field_at(&self, point: Vec3) -> Result<CVec3, FieldError> {
        let mut frac = [0.0_f64; 3];
        let mut cell = [0usize; 3];
        for a in 0..3 {
            let t = (point[a] - self.origin[a]) / self.spacing[a];
            // tolerate round-off on the boundary faces
            let max_t = (self.dims[a] - 1) as f64;
            if t < -1e-9 || t > max_t + 1e-9 {
                return Err(FieldError::OutOfBounds(point[0], point[1], point[2]));
            }
            let t = t.clamp(0.0, max_t);
            let i = (t.floor() as usize).min(self.dims[a] - 2);
            cell[a] = i;
            frac[a] = t - i as f64;
        }
        let mut out: CVec3 = [Complex64::new(0.0, 0.0); 3];
        for dz in 0..2 {
            for dy in 0..2 {
                for dx in 0..2 {
                    let w = (if dx == 1 { frac[0] } else { 1.0 - frac[0] })
                        * (if dy == 1 { frac[1] } else { 1.0 - frac[1] })
                        * (if dz == 1 { frac[2] } else { 1.0 - frac[2] });
                    if w == 0.0 {
                        continue;
                    }
                    let v = &self.e_field[self.index(cell[0] + dx, cell[1] + dy, cell[2] + dz)];
                    out[0] += v[0] * w;
                    out[1] += v[1] * w;
                    out[2] += v[2] * w;
                }
            }
        }
        Ok(out)
    }

    /// Trilinear interpolation of the permittivity map.
    pub fn eps_at(&self, point: Vec3) -> Result<f64, FieldError> {
        let mut frac = [0.0_f64; 3];
        let mut cell = [0usize; 3];
        for a in 0..3 {
            let t = (point[a] - self.origin[a]) / self.spacing[a];
            let max_t = (self.dims[a] - 1) as f64;
            if t < -1e-9 || t > max_t + 1e-9 {
                return Err(FieldError::OutOfBounds(point[0], point[1], point[2]));
            }
            let t = t.clamp(0.0, max_t);
            let i = (t.floor() as usize).min(self.dims[a] - 2);
            cell[a] = i;
            frac[a] = t - i as f64;
        }
        let mut out = 0.0;
        for dz in 0..2 {
            for dy in 0..2 {
                for dx in 0..2 {
                    let w = (if dx == 1 { frac[0] } else { 1.0 - frac[0] })
                        * (if dy == 1 { frac[1] } else { 1.0 - frac[1] })
                        * (if dz == 1 { frac[2] } else { 1.0 - frac[2] });
                    out += w * self.epsilon[self.index(cell[0] + dx, cell[1] + dy, cell[2] + dz)];
                }
            }
        }
        Ok(out)
    }

    /// Parse the line-oriented field file format.
    pub fn load(path: &Path) -> Result<Self, FieldError> {
        let file = std::fs::File::open(path)?;
        let reader = BufReader::new(file);
        let mut wavelength = None;
        let mut dims: Option<[usize; 3]> = None;
        let mut origin: Option<Vec3> = None;
        let mut spacing: Option<Vec3> = None;
        let mut e_field: Vec<CVec3> = Vec::new();
        let mut epsilon: Vec<f64> = Vec::new();
        let mut expected_next = 0usize;
        let mut last_line = 0usize;

        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = lineno + 1;
            last_line = lineno;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                let mut parts = rest.split_whitespace();
                let key = parts.next().unwrap_or("");
                let vals: Vec<&str> = parts.collect();
                let parse_f = |s: &str| -> Result<f64, FieldError> {
                    s.parse().map_err(|_| FieldError::MalformedHeader {
                        line: lineno,
                        reason: format!("cannot parse float `{s}`"),
                    })
                };
                match key {
                    "wavelength_nm" => {
                        if vals.len() != 1 {
                            return Err(FieldError::MalformedHeader {
                                line: lineno,
                                reason: "wavelength_nm expects one value".into(),
                            });
                        }
                        wavelength = Some(parse_f(vals[0])?);
                    }
                    "dims" => {
                        if vals.len() != 3 {
                            return Err(FieldError::MalformedHeader {
                                line: lineno,
                                reason: "dims expects three integers".into(),
                            });
                        }
                        let mut d = [0usize; 3];
                        for (slot, s) in d.iter_mut().zip(&vals) {
                            *slot = s.parse().map_err(|_| FieldError::MalformedHeader {
                                line: lineno,
                                reason: format!("cannot parse integer `{s}`"),
                            })?;
                        }
                        if d.iter().any(|&x| x < 2) {
                            return Err(FieldError::MalformedHeader {
                                line: lineno,
                                reason: format!("dims must be >= 2 along every axis, got {d:?}"),
                            });
                        }
                        dims = Some(d);
                    }
                    "origin_nm" | "spacing_nm" => {
                        if vals.len() != 3 {
                            return Err(FieldError::MalformedHeader {
                                line: lineno,
                                reason: format!("{key} expects three floats"),
                            });
                        }
                        let v = [parse_f(vals[0])?, parse_f(vals[1])?, parse_f(vals[2])?];
                        if key == "origin_nm" {
                            origin = Some(v);
                        } else {
                            if v.iter().any(|&s| s <= 0.0) {
                                return Err(FieldError::NonMonotonicGrid(format!(
                                    "spacing must be positive, got {v:?} (line {lineno})"
                                )));
                            }
                            spacing = Some(v);
                        }
                    }
                    // unknown header keys (e.g. polarization labels) are preserved-by-ignoring
                    _ => {}
                }
                continue;
            }
            // node row
            let dims = dims.ok_or(FieldError::MalformedRow {
                line: lineno,
                reason: "node row before `# dims` header".into(),
            })?;
            let total = dims[0] * dims[1] * dims[2];
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 10 {
                return Err(FieldError::MalformedRow {
                    line: lineno,
                    reason: format!("expected 10 columns, found {}", fields.len()),
                });
            }
            let idx: Vec<usize> = fields[..3]
                .iter()
                .map(|s| {
                    s.parse().map_err(|_| FieldError::MalformedRow {
                        line: lineno,
                        reason: format!("cannot parse index `{s}`"),
                    })
                })
                .collect::<Result<_, _>>()?;
            let nums: Vec<f64> = fields[3..]
                .iter()
                .map(|s| {
                    s.parse().map_err(|_| FieldError::MalformedRow {
                        line: lineno,
                        reason: format!("cannot parse float `{s}`"),
                    })
                })
                .collect::<Result<_, _>>()?;
            let linear = idx[0] + dims[0] * (idx[1] + dims[1] * idx[2]);
            if idx[0] >= dims[0] || idx[1] >= dims[1] || idx[2] >= dims[2] {
                return Err(FieldError::MalformedRow {
                    line: lineno,
                    reason: format!("index {:?} outside dims {:?}", &idx, dims),
                });
            }
            if linear != expected_next {
                return Err(FieldError::NonMonotonicGrid(format!(
                    "node rows must be in x-fastest order; line {lineno} has index {:?}",
                    &idx
                )));
            }
            if expected_next >= total {
                return Err(FieldError::NodeCountMismatch {
                    expected: total,
                    found: expected_next + 1,
                    line: lineno,
                });
            }
            let eps = nums[0];
            if eps < 1.0 {
                return Err(FieldError::EpsilonBelowOne { value: eps, line: lineno });
            }
            epsilon.push(eps);
            e_field.push([
                Complex64::new(nums[1], nums[2]),
                Complex64::new(nums[3], nums[4]),
                Complex64::new(nums[5], nums[6]),
            ]);
            expected_next += 1;
        }

        let dims = dims.ok_or(FieldError::MalformedHeader {
            line: last_line,
            reason: "missing `# dims` header".into(),
        })?;
        let total = dims[0] * dims[1] * dims[2];
        if e_field.len() != total {
            return Err(FieldError::NodeCountMismatch {
                expected: total,
                found: e_field.len(),
                line: last_line,
            });
        }
        let origin = origin.ok_or(FieldError::MalformedHeader {
            line: last_line,
            reason: "missing `# origin_nm` header".into(),
        })?;
        let spacing = spacing.ok_or(FieldError::MalformedHeader {
            line: last_line,
            reason: "missing `# spacing_nm` header".into(),
        })?;
        let wavelength = wavelength.ok_or(FieldError::MalformedHeader {
            line: last_line,
            reason: "missing `# wavelength_nm` header".into(),
        })?;
        Self::from_parts(origin, spacing, dims, wavelength, e_field, epsilon)
    }

    /// Write the grid in the same text format `load` parses (17 significant
    /// digits, so numeric content round-trips exactly).
    pub fn write(&self, path: &Path) -> Result<(), FieldError> {
        let mut out = String::new();
        writeln!(out, "# wavelength_nm {:.16e}", self.wavelength_nm).unwrap();
        writeln!(out, "# dims {} {} {}", self.dims[0], self.dims[1], self.dims[2]).unwrap();
        writeln!(
            out,
            "# origin_nm {:.16e} {:.16e} {:.16e}",
            self.origin[0], self.origin[1], self.origin[2]
        )
        .unwrap();
        writeln!(
            out,
            "# spacing_nm {:.16e} {:.16e} {:.16e}",
            self.spacing[0], self.spacing[1], self.spacing[2]
        )
        .unwrap();
        for iz in 0..self.dims[2] {
            for iy in 0..self.dims[1] {
                for ix in 0..self.dims[0] {
                    let i = self.index(ix, iy, iz);
                    let e = &self.e_field[i];
                    writeln!(
                        out,
                        "{ix} {iy} {iz} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
                        self.epsilon[i], e[0].re, e[0].im, e[1].re, e[1].im, e[2].re, e[2].im
                    )
                    .unwrap();
                }
            }
        }
        let mut f = std::fs::File::create(path)?;
        f.write_all(out.as_bytes())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn uniform_grid(dims: [usize; 3], value: CVec3, eps: f64) -> FieldGrid {
        let n = dims[0] * dims[1] * dims[2];
        FieldGrid::from_parts(
            [0.0, 0.0, 0.0],
            [10.0, 10.0, 10.0],
            dims,
            637.0,
            vec![value; n],
            vec![eps; n],
        )
        .unwrap()
    }

    fn unit_x() -> CVec3 {
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]
    }

    #[test]
    fn minimal_uniform_grid() {
        let g = uniform_grid([2, 2, 2], unit_x(), 1.0);
        assert_eq!(g.dims(), [2, 2, 2]);
        assert!(!g.is_normalized());
    }

    #[test]
    fn normalize_uniform_closed_form() {
        // |E| = 1, eps = 1 on a box of volume V0 -> amplitude 1/sqrt(2 V0)
        let g = uniform_grid([3, 3, 3], unit_x(), 1.0);
        let v0: f64 = 27.0 * 1000.0; // 27 nodes * (10 nm)^3 node weight
        let n = g.normalize_unit_energy().unwrap();
        let e = n.e_at_node(1, 1, 1);
        assert_relative_eq!(e[0].re, 1.0 / (2.0 * v0).sqrt(), max_relative = 1e-12);
        assert!(n.is_normalized());
        assert_relative_eq!(n.energy_integral(), 1.0, max_relative = ENERGY_NORM_TOL);
    }

    #[test]
    fn normalize_is_idempotent_and_scale_invariant() {
        let g1 = uniform_grid([3, 4, 5], unit_x(), 2.25);
        let mut scaled = g1.clone();
        for e in &mut scaled.e_field {
            e[0] *= 7.3;
            e[1] *= 7.3;
            e[2] *= 7.3;
        }
        let n1 = g1.normalize_unit_energy().unwrap();
        let n2 = scaled.normalize_unit_energy().unwrap();
        let n1b = n1.clone().normalize_unit_energy().unwrap();
        for i in 0..3 {
            assert_relative_eq!(
                n1.e_at_node(1, 2, 3)[i].re,
                n2.e_at_node(1, 2, 3)[i].re,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                n1.e_at_node(1, 2, 3)[i].re,
                n1b.e_at_node(1, 2, 3)[i].re,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn normalize_rejects_zero_field() {
        let g = uniform_grid([2, 2, 2], [Complex64::new(0.0, 0.0); 3], 1.0);
        assert!(matches!(g.normalize_unit_energy(), Err(FieldError::DegenerateField)));
    }

    #[test]
    fn mode_volume_uniform_field() {
        let g = uniform_grid([4, 4, 4], unit_x(), 3.0);
        let mv = g.mode_volume().unwrap();
        // constant integrand: V equals the quadrature box volume (64 node weights)
        assert_relative_eq!(mv.volume_nm3, 64.0 * 1000.0, max_relative = 1e-12);
        assert_relative_eq!(mv.eps_max, 3.0);
        // scaling invariance
        let mut g2 = g.clone();
        for e in &mut g2.e_field {
            e[0] *= 5.5;
        }
        assert_relative_eq!(g2.mode_volume().unwrap().volume_nm3, mv.volume_nm3, max_relative = 1e-12);
    }

    #[test]
    fn field_at_node_and_midpoint() {
        let mut g = uniform_grid([2, 2, 2], unit_x(), 1.0);
        g.e_field[0] = [Complex64::new(2.0, -1.0), Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)];
        let at_node = g.field_at([0.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(at_node[0].re, 2.0);
        assert_relative_eq!(at_node[0].im, -1.0);
        // midpoint of the edge to node (1,0,0): average of the two values
        let mid = g.field_at([5.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(mid[0].re, (2.0 + 1.0) / 2.0);
        assert_relative_eq!(mid[0].im, -0.5);
        assert_relative_eq!(mid[2].re, 0.25);
    }

    #[test]
    fn field_at_outside_is_error() {
        let g = uniform_grid([2, 2, 2], unit_x(), 1.0);
        assert!(matches!(g.field_at([-10.0, 0.0, 0.0]), Err(FieldError::OutOfBounds(..))));
        assert!(matches!(g.field_at([0.0, 0.0, 20.0]), Err(FieldError::OutOfBounds(..))));
    }

    #[test]
    fn file_round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.field");
        let p2 = dir.path().join("b.field");
        let mut g = uniform_grid([2, 3, 2], unit_x(), 1.5);
        g.e_field[5] = [
            Complex64::new(std::f64::consts::PI, -1.0 / 3.0),
            Complex64::new(1e-30, 2.5),
            Complex64::new(-7.125, 0.1),
        ];
        g.write(&p1).unwrap();
        let g2 = FieldGrid::load(&p1).unwrap();
        assert!(!g2.is_normalized());
        g2.write(&p2).unwrap();
        let b1 = std::fs::read(&p1).unwrap();
        let b2 = std::fs::read(&p2).unwrap();
        assert_eq!(b1, b2);
        for i in 0..g.e_field.len() {
            assert_eq!(g.e_field[i], g2.e_field[i]);
            assert_eq!(g.epsilon[i], g2.epsilon[i]);
        }
    }

    #[test]
    fn load_detects_node_count_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("short.field");
        let mut content = String::from(
            "# wavelength_nm 637\n# dims 2 2 2\n# origin_nm 0 0 0\n# spacing_nm 1 1 1\n",
        );
        for iz in 0..2 {
            for iy in 0..2 {
                for ix in 0..2 {
                    if ix == 1 && iy == 1 && iz == 1 {
                        continue; // drop the last row
                    }
                    content.push_str(&format!("{ix} {iy} {iz} 1 1 0 0 0 0 0\n"));
                }
            }
        }
        std::fs::write(&p, content).unwrap();
        match FieldGrid::load(&p) {
            Err(FieldError::NodeCountMismatch { expected: 8, found: 7, .. }) => {}
            other => panic!("expected node count mismatch, got {other:?}"),
        }
    }

    #[test]
    fn load_detects_bad_epsilon_and_order() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.field");
        std::fs::write(
            &p,
            "# wavelength_nm 637\n# dims 2 2 2\n# origin_nm 0 0 0\n# spacing_nm 1 1 1\n\
             0 0 0 0.5 1 0 0 0 0 0\n",
        )
        .unwrap();
        assert!(matches!(FieldGrid::load(&p), Err(FieldError::EpsilonBelowOne { line: 5, .. })));

        std::fs::write(
            &p,
            "# wavelength_nm 637\n# dims 2 2 2\n# origin_nm 0 0 0\n# spacing_nm 1 1 1\n\
             1 0 0 1.0 1 0 0 0 0 0\n",
        )
        .unwrap();
        assert!(matches!(FieldGrid::load(&p), Err(FieldError::NonMonotonicGrid(_))));
    }
}
