use crate::complex::{boundary_surface, build_cubical};
use crate::error::Result;
use crate::signature::{gait_signature_detailed, GaitSignature, PlaneResult, SignatureConfig};
use crate::silhouette::{stack, BitGrid, StackOptions};

/// Everything computed on the way from frames to a signature.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub signature: GaitSignature,
    pub planes: Vec<PlaneResult>,
    pub cubes: usize,
    pub vertices: usize,
    pub edges: usize,
    pub triangles: usize,
}

/// Frames → stacked image → cubical complex → boundary surface → signature.
pub fn extract(
    frames: &[BitGrid],
    opts: &StackOptions,
    cfg: &SignatureConfig,
) -> Result<Extraction> {
    let image = stack(frames, opts)?;
    let cubes = build_cubical(&image);
    let surface = boundary_surface(&cubes, &image)?;
    let (signature, planes) = gait_signature_detailed(&surface, cfg)?;
    Ok(Extraction {
        signature,
        planes,
        cubes: cubes.len(),
        vertices: surface.vertex_count(),
        edges: surface.edges().len(),
        triangles: surface.triangles().len(),
    })
}

pub fn signature_of_frames(
    frames: &[BitGrid],
    opts: &StackOptions,
    cfg: &SignatureConfig,
) -> Result<GaitSignature> {
    extract(frames, opts, cfg).map(|e| e.signature)
}
