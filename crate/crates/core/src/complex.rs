//! Cubical complex of a 3D binary image and its triangulated boundary surface.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::persistence::union_find::UnionFind;
use crate::silhouette::BinaryImage3D;

const CORNERS: [[i32; 3]; 8] = [
    [0, 0, 0],
    [0, 0, 1],
    [0, 1, 0],
    [0, 1, 1],
    [1, 0, 0],
    [1, 0, 1],
    [1, 1, 0],
    [1, 1, 1],
];

/// Unit cubes identified by their minimum corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicalComplex {
    cubes: Vec<[i32; 3]>,
}

impl CubicalComplex {
    pub fn from_cubes(cubes: impl IntoIterator<Item = [i32; 3]>) -> Self {
        let mut cubes: Vec<_> = cubes.into_iter().collect();
        cubes.sort_unstable();
        cubes.dedup();
        CubicalComplex { cubes }
    }

    pub fn cubes(&self) -> &[[i32; 3]] {
        &self.cubes
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }
}

/// Every cube whose 8 corners are foreground points.
pub fn build_cubical(image: &BinaryImage3D) -> CubicalComplex {
    let points: HashSet<[i32; 3]> = image.points().iter().copied().collect();
    let cubes = image
        .points()
        .iter()
        .copied()
        .filter(|&p| {
            CORNERS
                .iter()
                .all(|o| points.contains(&[p[0] + o[0], p[1] + o[1], p[2] + o[2]]))
        })
        .collect();
    // Anchors come from the already sorted foreground.
    CubicalComplex { cubes }
}

/// Surface made of vertices, edges and triangles, closed under faces.
/// Vertex ids follow the lexicographic order of the integer grid coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialComplex {
    grid: Vec<[i32; 3]>,
    coords: Vec<[f64; 3]>,
    /// Sorted; each pair ascending.
    edges: Vec<[u32; 2]>,
    /// Sorted; each triple ascending.
    triangles: Vec<[u32; 3]>,
}

impl SimplicialComplex {
    /// Closes a triangle list under faces. Vertex ids are re-assigned in
    /// lexicographic order of `grid`; `coords[i]` belongs to `grid[i]`.
    pub fn from_triangles(
        grid: Vec<[i32; 3]>,
        coords: Vec<[f64; 3]>,
        triangles: impl IntoIterator<Item = [u32; 3]>,
    ) -> Result<Self> {
        if grid.len() != coords.len() {
            return Err(Error::InvalidParameter(
                "grid and coordinate lists differ in length".into(),
            ));
        }
        let mut order: Vec<u32> = (0..grid.len() as u32).collect();
        order.sort_by_key(|&i| grid[i as usize]);
        if order
            .windows(2)
            .any(|w| grid[w[0] as usize] == grid[w[1] as usize])
        {
            return Err(Error::InvalidParameter(
                "duplicate vertex coordinates".into(),
            ));
        }
        let mut relabel = vec![0u32; grid.len()];
        for (new, &old) in order.iter().enumerate() {
            relabel[old as usize] = new as u32;
        }
        let mut tris = Vec::new();
        for t in triangles {
            if t.iter().any(|&v| v as usize >= grid.len()) {
                return Err(Error::UnknownSimplex(t.to_vec()));
            }
            let mut t = t.map(|v| relabel[v as usize]);
            t.sort_unstable();
            if t[0] == t[1] || t[1] == t[2] {
                return Err(Error::InvalidParameter(format!(
                    "degenerate triangle {t:?}"
                )));
            }
            tris.push(t);
        }
        let grid = order.iter().map(|&i| grid[i as usize]).collect();
        let coords = order.iter().map(|&i| coords[i as usize]).collect();
        Ok(Self::assemble(grid, coords, tris))
    }

    fn assemble(grid: Vec<[i32; 3]>, coords: Vec<[f64; 3]>, mut triangles: Vec<[u32; 3]>) -> Self {
        triangles.sort_unstable();
        triangles.dedup();
        let mut edges: Vec<[u32; 2]> = triangles
            .iter()
            .flat_map(|t| [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]])
            .collect();
        edges.sort_unstable();
        edges.dedup();
        SimplicialComplex {
            grid,
            coords,
            edges,
            triangles,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[[f64; 3]] {
        &self.coords
    }

    pub fn grid(&self) -> &[[i32; 3]] {
        &self.grid
    }

    pub fn edges(&self) -> &[[u32; 2]] {
        &self.edges
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn has_edge(&self, e: [u32; 2]) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    pub fn has_triangle(&self, t: [u32; 3]) -> bool {
        self.triangles.binary_search(&t).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn simplex_count(&self) -> usize {
        self.coords.len() + self.edges.len() + self.triangles.len()
    }

    pub fn connected_components(&self) -> usize {
        let mut uf = UnionFind::new(self.vertex_count());
        let mut components = self.vertex_count();
        for e in &self.edges {
            if uf.union(e[0] as usize, e[1] as usize) {
                components -= 1;
            }
        }
        components
    }

    /// Number of triangles incident to each edge, in edge order.
    pub fn edge_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.edges.len()];
        for t in &self.triangles {
            for e in [[t[0], t[1]], [t[0], t[2]], [t[1], t[2]]] {
                deg[self.edges.binary_search(&e).expect("closed under faces")] += 1;
            }
        }
        deg
    }

    /// Object File Format text: header, vertex coordinates, then triangles.
    pub fn to_off(&self) -> String {
        let mut s = format!("OFF\n{} {} 0\n", self.coords.len(), self.triangles.len());
        for c in &self.coords {
            let _ = writeln!(s, "{} {} {}", c[0], c[1], c[2]);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
        }
        s
    }
}

pub fn euler_characteristic(s: &SimplicialComplex) -> i64 {
    s.vertex_count() as i64 - s.edges.len() as i64 + s.triangles.len() as i64
}

fn unit(axis: usize) -> [i32; 3] {
    let mut e = [0; 3];
    e[axis] = 1;
    e
}

fn add(a: [i32; 3], b: [i32; 3]) -> [i32; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

/// Squares that are a face of exactly one cube, each split into two
/// triangles along the diagonal through its lexicographically smallest
/// corner. Coordinates are normalized with the image scales.
pub fn boundary_surface(q: &CubicalComplex, image: &BinaryImage3D) -> Result<SimplicialComplex> {
    if q.is_empty() {
        return Err(Error::NoVolume);
    }
    // Square key: (normal axis, minimum corner).
    let mut faces: HashMap<(u8, [i32; 3]), u8> = HashMap::with_capacity(q.len() * 3);
    for &c in q.cubes() {
        for axis in 0..3 {
            for anchor in [c, add(c, unit(axis))] {
                *faces.entry((axis as u8, anchor)).or_insert(0) += 1;
            }
        }
    }
    let mut squares: Vec<(u8, [i32; 3])> = faces
        .into_iter()
        .filter(|&(_, n)| n == 1)
        .map(|(k, _)| k)
        .collect();
    squares.sort_unstable();

    // Lexicographic corner order of a square spanned by axes u < v:
    // a, a+e_v, a+e_u, a+e_u+e_v.
    let corner_sets: Vec<[[i32; 3]; 4]> = squares
        .iter()
        .map(|&(axis, a)| {
            let (u, v) = match axis {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            [
                a,
                add(a, unit(v)),
                add(a, unit(u)),
                add(add(a, unit(u)), unit(v)),
            ]
        })
        .collect();

    let mut grid: Vec<[i32; 3]> = corner_sets.iter().flatten().copied().collect();
    grid.sort_unstable();
    grid.dedup();
    let id = |p: &[i32; 3]| grid.binary_search(p).expect("corner collected") as u32;

    let mut triangles = Vec::with_capacity(2 * corner_sets.len());
    for [a, b, c, d] in &corner_sets {
        let (a, b, c, d) = (id(a), id(b), id(c), id(d));
        // a < b < c < d in id order as well.
        triangles.push([a, b, d]);
        triangles.push([a, c, d]);
    }
    let coords = grid.iter().map(|&p| image.normalize(p)).collect();
    Ok(SimplicialComplex::assemble(grid, coords, triangles))
}

/// Cubes, then surface, from an image.
pub fn surface_of(image: &BinaryImage3D) -> Result<SimplicialComplex> {
    boundary_surface(&build_cubical(image), image)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(nx: i32, ny: i32, nz: i32, at: [i32; 3]) -> Vec<[i32; 3]> {
        let mut v = Vec::new();
        for x in 0..nx {
            for y in 0..ny {
                for z in 0..nz {
                    v.push([at[0] + x, at[1] + y, at[2] + z]);
                }
            }
        }
        v
    }

    fn image(points: Vec<[i32; 3]>) -> BinaryImage3D {
        BinaryImage3D::from_points(points).unwrap()
    }

    #[test]
    fn cube_counts() {
        assert_eq!(build_cubical(&image(block(2, 2, 2, [0; 3]))).len(), 1);
        let mut seven = block(2, 2, 2, [0; 3]);
        seven.pop();
        assert_eq!(build_cubical(&image(seven)).len(), 0);
        let q = build_cubical(&image(block(3, 3, 2, [0; 3])));
        assert_eq!(q.cubes(), &[[0, 0, 0], [0, 1, 0], [1, 0, 0], [1, 1, 0]]);
    }

    #[test]
    fn single_cube_surface() {
        let img = image(block(2, 2, 2, [0; 3]));
        let s = surface_of(&img).unwrap();
        assert_eq!(
            (s.vertex_count(), s.edges().len(), s.triangles().len()),
            (8, 18, 12)
        );
        assert_eq!(euler_characteristic(&s), 2);
        assert!(s.edge_degrees().iter().all(|&d| d == 2));
    }

    #[test]
    fn diagonal_goes_through_smallest_corner() {
        let img = image(block(2, 2, 2, [0; 3]));
        let s = surface_of(&img).unwrap();
        // Bottom face z=0: corners (0,0,0)=0, (0,1,0)=2, (1,0,0)=4, (1,1,0)=6.
        assert!(s.has_edge([0, 6]));
        assert!(!s.has_edge([2, 4]));
        assert!(s.has_triangle([0, 2, 6]) && s.has_triangle([0, 4, 6]));
    }

    #[test]
    fn two_by_two_block_is_a_sphere() {
        let s = surface_of(&image(block(3, 3, 2, [0; 3]))).unwrap();
        assert_eq!(euler_characteristic(&s), 2);
        assert_eq!(s.connected_components(), 1);
    }

    #[test]
    fn ring_is_a_torus() {
        // 3x3x1 cubes without the centre one. Its corners are all shared, so
        // the cube set is given directly.
        let q = CubicalComplex::from_cubes(
            (0..3)
                .flat_map(|x| (0..3).map(move |y| [x, y, 0]))
                .filter(|&c| c != [1, 1, 0]),
        );
        assert_eq!(q.len(), 8);
        let s = boundary_surface(&q, &image(block(4, 4, 2, [0; 3]))).unwrap();
        assert_eq!(euler_characteristic(&s), 0);
        assert!(s.edge_degrees().iter().all(|&d| d == 2));
    }

    #[test]
    fn punctured_slab_is_a_torus() {
        // Removing the centre point column kills the 4 cubes around it.
        let pts: Vec<_> = block(5, 5, 2, [0; 3])
            .into_iter()
            .filter(|p| !(p[0] == 2 && p[1] == 2))
            .collect();
        let img = image(pts);
        let q = build_cubical(&img);
        assert_eq!(q.len(), 12);
        let s = boundary_surface(&q, &img).unwrap();
        assert_eq!(euler_characteristic(&s), 0);
    }

    #[test]
    fn disjoint_cubes_add_up() {
        let mut pts = block(2, 2, 2, [0; 3]);
        pts.extend(block(2, 2, 2, [4, 0, 0]));
        let s = surface_of(&image(pts)).unwrap();
        assert_eq!(euler_characteristic(&s), 4);
        assert_eq!(s.connected_components(), 2);
    }

    #[test]
    fn thin_region_has_no_volume() {
        let img = image(block(5, 1, 4, [0; 3]));
        assert!(matches!(surface_of(&img), Err(Error::NoVolume)));
    }

    #[test]
    fn insertion_order_irrelevant() {
        let pts = block(3, 3, 2, [0; 3]);
        let img = image(pts);
        let q = build_cubical(&img);
        let rev = CubicalComplex::from_cubes(q.cubes().iter().rev().copied());
        assert_eq!(
            boundary_surface(&q, &img).unwrap(),
            boundary_surface(&rev, &img).unwrap()
        );
    }

    #[test]
    fn normalized_coordinates() {
        let img = image(block(3, 3, 3, [0; 3]));
        let s = surface_of(&img).unwrap();
        for c in s.coords() {
            assert!(c.iter().all(|v| (0.0..=1.0).contains(v)));
        }
        assert_eq!(s.coords().last(), Some(&[1.0, 1.0, 1.0]));
    }

    #[test]
    fn off_export() {
        let s = surface_of(&image(block(2, 2, 2, [0; 3]))).unwrap();
        let off = s.to_off();
        let mut lines = off.lines();
        assert_eq!(lines.next(), Some("OFF"));
        assert_eq!(lines.next(), Some("8 12 0"));
        assert_eq!(off.lines().count(), 2 + 8 + 12);
    }

    #[test]
    fn from_triangles_closes_faces() {
        let grid = vec![[0, 0, 0], [1, 0, 0], [0, 1, 0]];
        let coords = vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        let s = SimplicialComplex::from_triangles(grid, coords, [[2, 1, 0]]).unwrap();
        assert_eq!(s.edges().len(), 3);
        assert_eq!(s.triangles(), &[[0, 1, 2]]);
        // Vertex 1 was (1,0,0): lexicographically last, so it becomes id 2.
        assert_eq!(s.grid()[2], [1, 0, 0]);
    }
}
