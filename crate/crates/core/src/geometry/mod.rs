//! Scenes, meshes, the differentiable parameterization θ → world geometry,
//! materials, and the mesh Laplacian used for regularization.

mod laplacian;
mod mesh;
mod params;
mod scene;

pub use laplacian::{build_laplacian, LaplacianMatrix};
pub use mesh::{Material, Mesh, MeshEdge};
pub use params::{
    apply_params, d_vertices_d_theta, vertex_jacobians, ParamLayout, SceneParams, VertexJacobian,
};
pub use scene::{Scene, TriangleSource, WorldScene, WorldTriangle};
