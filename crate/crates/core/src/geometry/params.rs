//! Differentiable scene parameterization.
//!
//! The parameter vector θ is laid out as
//! `[translation (3), rotation (3, axis-angle), uniform_scale (1),
//!   vertex_offsets (3·V, optional), material_scalars (M, optional)]`
//! and maps a base mesh to world space as
//!
//! ```text
//! w(v) = R(rotation) · (scale · (v + offset_v)) + translation
//! ```
//!
//! so the translation block of every vertex Jacobian is the identity.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{skew, Mat3, Vec3};

use super::Mesh;

/// Differentiable parameters of the target object.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneParams {
    pub translation: Vec3,
    /// Axis-angle rotation vector (radians); the axis is `rotation / ‖rotation‖`.
    pub rotation: Vec3,
    pub uniform_scale: f64,
    /// Per-vertex displacements applied before scaling/rotation.
    pub vertex_offsets: Option<Vec<Vec3>>,
    /// Per-material reflection coefficients overriding the scene materials.
    pub material_scalars: Option<Vec<f64>>,
}

impl SceneParams {
    pub fn identity() -> Self {
        Self {
            translation: Vec3::zeros(),
            rotation: Vec3::zeros(),
            uniform_scale: 1.0,
            vertex_offsets: None,
            material_scalars: None,
        }
    }

    pub fn identity_with_offsets(n_vertices: usize) -> Self {
        Self {
            vertex_offsets: Some(vec![Vec3::zeros(); n_vertices]),
            ..Self::identity()
        }
    }

    /// Check every component is finite and the scale positive; errors name
    /// the offending parameter.
    pub fn validate(&self) -> Result<()> {
        let layout = ParamLayout::of(self);
        let theta = self.pack();
        for (i, v) in theta.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name: layout.name(i).to_string(),
                    reason: format!("non-finite value {v}"),
                });
            }
        }
        if self.uniform_scale <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "scale".into(),
                reason: format!("must be > 0, got {}", self.uniform_scale),
            });
        }
        Ok(())
    }

    /// Flatten into θ following the fixed layout order.
    pub fn pack(&self) -> DVector<f64> {
        let layout = ParamLayout::of(self);
        let mut theta = DVector::zeros(layout.len());
        theta[0] = self.translation.x;
        theta[1] = self.translation.y;
        theta[2] = self.translation.z;
        theta[3] = self.rotation.x;
        theta[4] = self.rotation.y;
        theta[5] = self.rotation.z;
        theta[6] = self.uniform_scale;
        if let Some(offsets) = &self.vertex_offsets {
            for (v, off) in offsets.iter().enumerate() {
                let base = layout.offset_start() + 3 * v;
                theta[base] = off.x;
                theta[base + 1] = off.y;
                theta[base + 2] = off.z;
            }
        }
        if let Some(mats) = &self.material_scalars {
            for (m, value) in mats.iter().enumerate() {
                theta[layout.material_start() + m] = *value;
            }
        }
        theta
    }

    /// Rebuild from a flat vector; inverse of [`SceneParams::pack`].
    pub fn unpack(layout: &ParamLayout, theta: &DVector<f64>) -> Result<Self> {
        if theta.len() != layout.len() {
            return Err(Error::ShapeMismatch(format!(
                "theta has {} entries, layout expects {}",
                theta.len(),
                layout.len()
            )));
        }
        let vertex_offsets = if layout.has_offsets() {
            let mut offsets = Vec::with_capacity(layout.n_vertices());
            for v in 0..layout.n_vertices() {
                let base = layout.offset_start() + 3 * v;
                offsets.push(Vec3::new(theta[base], theta[base + 1], theta[base + 2]));
            }
            Some(offsets)
        } else {
            None
        };
        let material_scalars = if layout.has_materials() {
            Some(
                (0..layout.n_materials())
                    .map(|m| theta[layout.material_start() + m])
                    .collect(),
            )
        } else {
            None
        };
        Ok(Self {
            translation: Vec3::new(theta[0], theta[1], theta[2]),
            rotation: Vec3::new(theta[3], theta[4], theta[5]),
            uniform_scale: theta[6],
            vertex_offsets,
            material_scalars,
        })
    }

    /// Rodrigues rotation matrix of the axis-angle vector.
    pub fn rotation_matrix(&self) -> Mat3 {
        rotation_matrix(&self.rotation)
    }
}

/// Stable name ↔ index map for one parameterization shape.
///
/// The order is fixed so gradient indices are reproducible across runs:
/// translation, rotation, scale, vertex offsets, material scalars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamLayout {
    n_vertices: usize,
    n_materials: usize,
    names: Vec<String>,
}

impl ParamLayout {
    pub fn of(params: &SceneParams) -> Self {
        let n_vertices = params.vertex_offsets.as_ref().map_or(0, Vec::len);
        let n_materials = params.material_scalars.as_ref().map_or(0, Vec::len);
        Self::with_counts(n_vertices, n_materials)
    }

    pub fn with_counts(n_vertices: usize, n_materials: usize) -> Self {
        let mut names = vec![
            "translation.x".to_string(),
            "translation.y".to_string(),
            "translation.z".to_string(),
            "rotation.x".to_string(),
            "rotation.y".to_string(),
            "rotation.z".to_string(),
            "scale".to_string(),
        ];
        for v in 0..n_vertices {
            for axis in ["x", "y", "z"] {
                names.push(format!("offset[{v}].{axis}"));
            }
        }
        for m in 0..n_materials {
            names.push(format!("material[{m}]"));
        }
        Self {
            n_vertices,
            n_materials,
            names,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rigid_len(&self) -> usize {
        7
    }

    pub fn offset_start(&self) -> usize {
        7
    }

    pub fn material_start(&self) -> usize {
        7 + 3 * self.n_vertices
    }

    pub fn has_offsets(&self) -> bool {
        self.n_vertices > 0
    }

    pub fn has_materials(&self) -> bool {
        self.n_materials > 0
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_materials(&self) -> usize {
        self.n_materials
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Indices whose name equals `prefix` or starts with `prefix.`/`prefix[`.
    pub fn indices_with_prefix(&self, prefix: &str) -> Vec<usize> {
        self.names
            .iter()
            .enumerate()
            .filter(|(_, n)| {
                n.as_str() == prefix
                    || n.starts_with(&format!("{prefix}."))
                    || n.starts_with(&format!("{prefix}["))
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// World-space mesh under `params`; topology is unchanged.
pub fn apply_params(mesh: &Mesh, params: &SceneParams) -> Result<Mesh> {
    params.validate()?;
    if let Some(offsets) = &params.vertex_offsets {
        if offsets.len() != mesh.vertex_count() {
            return Err(Error::ShapeMismatch(format!(
                "{} vertex offsets for a mesh with {} vertices",
                offsets.len(),
                mesh.vertex_count()
            )));
        }
    }
    let rot = params.rotation_matrix();
    let vertices = mesh
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let offset = params
                .vertex_offsets
                .as_ref()
                .map_or(Vec3::zeros(), |o| o[i]);
            rot * ((v + offset) * params.uniform_scale) + params.translation
        })
        .collect();
    mesh.with_vertices(vertices)
}

/// Jacobian of one world vertex w.r.t. θ, stored by block.
///
/// Columns of `d_rotation` are ∂w/∂rotation_k; `d_offset` right-multiplies
/// the vertex's own offset (all other offsets have zero influence).
#[derive(Debug, Clone)]
pub struct VertexJacobian {
    pub d_translation: Mat3,
    pub d_rotation: Mat3,
    pub d_scale: Vec3,
    pub d_offset: Mat3,
}

impl VertexJacobian {
    /// Densify into the 3×n row block for vertex `v` under `layout`.
    pub fn dense(&self, layout: &ParamLayout, v: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(3, layout.len());
        m.view_mut((0, 0), (3, 3)).copy_from(&self.d_translation);
        m.view_mut((0, 3), (3, 3)).copy_from(&self.d_rotation);
        m.view_mut((0, 6), (3, 1)).copy_from(&self.d_scale);
        if layout.has_offsets() {
            m.view_mut((0, layout.offset_start() + 3 * v), (3, 3))
                .copy_from(&self.d_offset);
        }
        m
    }

    /// Directional derivative of the world vertex along a θ perturbation.
    pub fn apply(&self, layout: &ParamLayout, v: usize, dtheta: &DVector<f64>) -> Vec3 {
        let dt = Vec3::new(dtheta[0], dtheta[1], dtheta[2]);
        let dr = Vec3::new(dtheta[3], dtheta[4], dtheta[5]);
        let mut out = self.d_translation * dt + self.d_rotation * dr + self.d_scale * dtheta[6];
        if layout.has_offsets() {
            let base = layout.offset_start() + 3 * v;
            let doff = Vec3::new(dtheta[base], dtheta[base + 1], dtheta[base + 2]);
            out += self.d_offset * doff;
        }
        out
    }

    /// Column `j` of the dense Jacobian for vertex `v`.
    pub fn column(&self, layout: &ParamLayout, v: usize, j: usize) -> Vec3 {
        if j < 3 {
            self.d_translation.column(j).into()
        } else if j < 6 {
            self.d_rotation.column(j - 3).into()
        } else if j == 6 {
            self.d_scale
        } else if layout.has_offsets() {
            let base = layout.offset_start() + 3 * v;
            if (base..base + 3).contains(&j) {
                self.d_offset.column(j - base).into()
            } else {
                Vec3::zeros()
            }
        } else {
            Vec3::zeros()
        }
    }
}

/// Analytic per-vertex world Jacobians.
pub fn vertex_jacobians(mesh: &Mesh, params: &SceneParams) -> Result<Vec<VertexJacobian>> {
    params.validate()?;
    let rot = params.rotation_matrix();
    let s = params.uniform_scale;
    Ok(mesh
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let offset = params
                .vertex_offsets
                .as_ref()
                .map_or(Vec3::zeros(), |o| o[i]);
            let local = (v + offset) * s;
            VertexJacobian {
                d_translation: Mat3::identity(),
                d_rotation: rotation_jacobian(&params.rotation, &local),
                d_scale: rot * (v + offset),
                d_offset: rot * s,
            }
        })
        .collect())
}

/// Dense 3×n Jacobian per vertex (the op-level surface; internals use the
/// block form from [`vertex_jacobians`]).
pub fn d_vertices_d_theta(mesh: &Mesh, params: &SceneParams) -> Result<Vec<DMatrix<f64>>> {
    let layout = ParamLayout::of(params);
    Ok(vertex_jacobians(mesh, params)?
        .iter()
        .enumerate()
        .map(|(v, j)| j.dense(&layout, v))
        .collect())
}

/// Rodrigues rotation matrix for an axis-angle vector ω.
pub fn rotation_matrix(omega: &Vec3) -> Mat3 {
    let theta = omega.norm();
    if theta < 1e-12 {
        let k = skew(omega);
        return Mat3::identity() + k + k * k * 0.5;
    }
    let k = skew(&(omega / theta));
    Mat3::identity() + k * theta.sin() + k * k * (1.0 - theta.cos())
}

/// Derivative of `R(ω)·v` w.r.t. ω, one column per rotation component.
///
/// Uses the compact closed form
/// `∂(Rv)/∂ω_i = ((ω_i [ω]× + [ω × ((I − R) e_i)]×) / ‖ω‖²) R v`
/// with a second-order Taylor fallback near ω = 0.
pub fn rotation_jacobian(omega: &Vec3, v: &Vec3) -> Mat3 {
    let theta2 = omega.norm_squared();
    if theta2 < 1e-8 {
        // R v ≈ v + ω×v + ½ ω×(ω×v); differentiate termwise.
        let j0 = -skew(v);
        let j1 = (-skew(&omega.cross(v)) - skew(omega) * skew(v)) * 0.5;
        return j0 + j1;
    }
    let r = rotation_matrix(omega);
    let rv = r * v;
    let mut jac = Mat3::zeros();
    for i in 0..3 {
        let e = Vec3::ith_axis(i).into_inner();
        let m = (skew(omega) * omega[i] + skew(&omega.cross(&((Mat3::identity() - r) * e))))
            / theta2;
        jac.set_column(i, &(m * rv));
    }
    jac
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_cube() -> Mesh {
        Mesh::cuboid(Vec3::zeros(), Vec3::new(0.5, 0.5, 0.5), 0)
    }

    #[test]
    fn identity_params_leave_vertices() {
        let mesh = unit_cube();
        let out = apply_params(&mesh, &SceneParams::identity()).unwrap();
        for (a, b) in mesh.vertices().iter().zip(out.vertices()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn translation_shifts_vertices() {
        let mesh = unit_cube();
        let params = SceneParams {
            translation: Vec3::new(1.0, 0.0, 0.0),
            ..SceneParams::identity()
        };
        let out = apply_params(&mesh, &params).unwrap();
        for (a, b) in mesh.vertices().iter().zip(out.vertices()) {
            assert_relative_eq!(b.x, a.x + 1.0, epsilon = 1e-15);
            assert_eq!(b.y, a.y);
            assert_eq!(b.z, a.z);
        }
    }

    #[test]
    fn quarter_turn_about_z() {
        let mesh = Mesh::new(
            vec![Vec3::new(1.0, 0.0, 0.0), Vec3::y(), Vec3::z()],
            vec![[0, 1, 2]],
            vec![0],
        )
        .unwrap();
        let params = SceneParams {
            rotation: Vec3::new(0.0, 0.0, std::f64::consts::FRAC_PI_2),
            ..SceneParams::identity()
        };
        let out = apply_params(&mesh, &params).unwrap();
        let got = out.vertices()[0];
        assert!((got - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn translate_then_back_is_exact() {
        let mesh = unit_cube();
        let t = Vec3::new(0.3, -1.7, 2.9);
        let fwd = apply_params(
            &mesh,
            &SceneParams {
                translation: t,
                ..SceneParams::identity()
            },
        )
        .unwrap();
        let back = apply_params(
            &fwd,
            &SceneParams {
                translation: -t,
                ..SceneParams::identity()
            },
        )
        .unwrap();
        for (a, b) in mesh.vertices().iter().zip(back.vertices()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn non_finite_parameter_is_named() {
        let params = SceneParams {
            rotation: Vec3::new(0.0, f64::NAN, 0.0),
            ..SceneParams::identity()
        };
        let err = apply_params(&unit_cube(), &params).unwrap_err();
        assert!(err.to_string().contains("rotation.y"), "{err}");
    }

    #[test]
    fn pack_unpack_roundtrip_exact() {
        let params = SceneParams {
            translation: Vec3::new(0.1, 0.2, 0.3),
            rotation: Vec3::new(-0.4, 0.5, 0.6),
            uniform_scale: 1.25,
            vertex_offsets: Some(vec![Vec3::new(1e-3, -2e-3, 3e-3); 8]),
            material_scalars: Some(vec![0.7, 0.9]),
        };
        let layout = ParamLayout::of(&params);
        let theta = params.pack();
        let back = SceneParams::unpack(&layout, &theta).unwrap();
        assert_eq!(theta, back.pack());
    }

    #[test]
    fn layout_names_and_lookup() {
        let layout = ParamLayout::with_counts(2, 1);
        assert_eq!(layout.len(), 7 + 6 + 1);
        assert_eq!(layout.index_of("translation.z"), Some(2));
        assert_eq!(layout.index_of("scale"), Some(6));
        assert_eq!(layout.index_of("offset[1].y"), Some(7 + 3 + 1));
        assert_eq!(layout.index_of("material[0]"), Some(13));
        assert_eq!(layout.indices_with_prefix("translation"), vec![0, 1, 2]);
    }

    #[test]
    fn translation_jacobian_is_identity() {
        let mesh = unit_cube();
        let jacs = vertex_jacobians(&mesh, &SceneParams::identity()).unwrap();
        for j in &jacs {
            assert_relative_eq!(j.d_translation, Mat3::identity());
        }
    }

    #[test]
    fn scale_column_equals_base_vertex() {
        let mesh = unit_cube();
        let jacs = vertex_jacobians(&mesh, &SceneParams::identity()).unwrap();
        for (j, v) in jacs.iter().zip(mesh.vertices()) {
            assert_relative_eq!(j.d_scale, *v, epsilon = 1e-15);
        }
    }

    /// Central-difference oracle for the full vertex Jacobian.
    fn fd_vertex_jacobian(
        mesh: &Mesh,
        params: &SceneParams,
        vertex: usize,
        h: f64,
    ) -> DMatrix<f64> {
        let layout = ParamLayout::of(params);
        let theta0 = params.pack();
        let mut jac = DMatrix::zeros(3, layout.len());
        for j in 0..layout.len() {
            let mut tp = theta0.clone();
            tp[j] += h;
            let mut tm = theta0.clone();
            tm[j] -= h;
            let pp = SceneParams::unpack(&layout, &tp).unwrap();
            let pm = SceneParams::unpack(&layout, &tm).unwrap();
            let wp = apply_params(mesh, &pp).unwrap().vertices()[vertex];
            let wm = apply_params(mesh, &pm).unwrap().vertices()[vertex];
            let col = (wp - wm) / (2.0 * h);
            jac.set_column(j, &col);
        }
        jac
    }

    #[test]
    fn jacobian_matches_fd_on_random_rigid_params() {
        let mesh = unit_cube();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let params = SceneParams {
                translation: Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.3),
                rotation: Vec3::new(
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-1.5..1.5),
                    rng.gen_range(-1.5..1.5),
                ),
                uniform_scale: rng.gen_range(0.5..2.0),
                vertex_offsets: None,
                material_scalars: None,
            };
            let layout = ParamLayout::of(&params);
            let analytic = vertex_jacobians(&mesh, &params).unwrap();
            for v in [0usize, 3, 7] {
                let dense = analytic[v].dense(&layout, v);
                let mut best = f64::INFINITY;
                for h in [1e-4, 1e-5, 1e-6] {
                    let fd = fd_vertex_jacobian(&mesh, &params, v, h);
                    let num = (&dense - &fd).abs().max();
                    let den = fd.abs().max().max(1e-12);
                    best = best.min(num / den);
                }
                assert!(best < 1e-5, "vertex {v}: best rel err {best:.3e}");
            }
        }
    }

    #[test]
    fn rotation_jacobian_matches_fd_near_zero() {
        let v = Vec3::new(0.3, -0.2, 0.9);
        for omega in [
            Vec3::zeros(),
            Vec3::new(1e-6, -2e-6, 1e-6),
            Vec3::new(1e-3, 2e-3, -1e-3),
        ] {
            let analytic = rotation_jacobian(&omega, &v);
            let h = 1e-6;
            let mut fd = Mat3::zeros();
            for i in 0..3 {
                let mut op = omega;
                op[i] += h;
                let mut om = omega;
                om[i] -= h;
                let col = (rotation_matrix(&op) * v - rotation_matrix(&om) * v) / (2.0 * h);
                fd.set_column(i, &col);
            }
            assert!(
                (analytic - fd).abs().max() < 1e-6,
                "omega {omega:?}: err {:.3e}",
                (analytic - fd).abs().max()
            );
        }
    }

    #[test]
    fn offsets_jacobian_matches_fd() {
        let mesh = Mesh::plate(Vec3::zeros(), Vec3::x(), Vec3::y(), 0.5, 0.5, 0);
        let params = SceneParams {
            rotation: Vec3::new(0.2, -0.1, 0.4),
            uniform_scale: 1.3,
            vertex_offsets: Some(vec![Vec3::new(0.01, -0.02, 0.005); 4]),
            ..SceneParams::identity()
        };
        let layout = ParamLayout::of(&params);
        let analytic = vertex_jacobians(&mesh, &params).unwrap();
        for v in 0..4 {
            let dense = analytic[v].dense(&layout, v);
            let fd = fd_vertex_jacobian(&mesh, &params, v, 1e-6);
            assert!((&dense - &fd).abs().max() < 1e-6);
        }
    }
}
