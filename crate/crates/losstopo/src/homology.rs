//! Cubical complexes on grids and their Betti numbers over GF(2).
//!
//! A complex lives on a rectangular vertex grid. A cell is an elementary
//! cube: a base vertex plus a set of axes it extends along (`mask`), so
//! vertices have an empty mask, edges one bit, squares two, cubes three.
//! Sublevel complexes use the full-corner rule: a cell is included exactly
//! when all of its corner vertices pass the threshold, which makes the
//! result a genuine subcomplex.
//!
//! `betti_gf2` computes `b_k = dim ker d_k - rank d_{k+1}` by column
//! reduction of the sparse boundary matrices over GF(2). `betti_fast2d` is
//! the 2D shortcut: connected components by union-find plus the Euler
//! characteristic.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::landscape::ScalarField;
use crate::Real;

/// An elementary cube: base vertex (linear index into the vertex grid) and
/// the set of axes the cube extends along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub base: usize,
    pub mask: u8,
}

/// A cubical complex on a vertex grid, cells listed per dimension.
#[derive(Debug, Clone)]
pub struct CubicalComplex {
    /// Vertex counts per axis; axis 0 is the slowest-varying.
    shape: Vec<usize>,
    /// Linear index strides per axis (row-major).
    strides: Vec<usize>,
    /// cells[k] = all k-cells, sorted by (mask, base).
    cells: Vec<Vec<Cell>>,
}

impl CubicalComplex {
    /// Axis count of the ambient grid.
    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn cells(&self, k: usize) -> &[Cell] {
        &self.cells[k]
    }

    /// Number of cells per dimension 0..=d.
    pub fn cell_counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.cells[0].is_empty()
    }

    /// Euler characteristic from the cell counts.
    pub fn euler(&self) -> i64 {
        self.cells
            .iter()
            .enumerate()
            .map(|(k, cs)| {
                let n = cs.len() as i64;
                if k % 2 == 0 {
                    n
                } else {
                    -n
                }
            })
            .sum()
    }

    pub fn contains(&self, cell: Cell) -> bool {
        let k = cell.mask.count_ones() as usize;
        k < self.cells.len() && self.cells[k].binary_search(&cell).is_ok()
    }

    /// Build a complex from explicit cell lists (mainly for tests); cells are
    /// bounds-checked and sorted, closure is *not* enforced here but by
    /// [`betti_gf2`].
    pub fn from_cells(shape: Vec<usize>, mut cells: Vec<Vec<Cell>>) -> Result<Self> {
        let dim = shape.len();
        if dim == 0 || shape.contains(&0) {
            return Err(Error::InvalidInput("grid shape must be nonempty".into()));
        }
        cells.resize(dim + 1, Vec::new());
        let strides = strides_for(&shape);
        for (k, cs) in cells.iter_mut().enumerate() {
            for cell in cs.iter() {
                if cell.mask.count_ones() as usize != k {
                    return Err(Error::InvalidInput(format!(
                        "cell {cell:?} listed in dimension {k}"
                    )));
                }
                if cell.mask >> dim != 0 {
                    return Err(Error::InvalidInput(format!(
                        "cell {cell:?} extends beyond axis count {dim}"
                    )));
                }
                if cell.base >= shape.iter().product() {
                    return Err(Error::InvalidInput(format!(
                        "cell {cell:?} has an out-of-grid base vertex"
                    )));
                }
                let coords = coords_of(cell.base, &shape, &strides);
                for axis in 0..dim {
                    let extent = ((cell.mask >> axis) & 1) as usize;
                    if coords[axis] + extent > shape[axis] - 1 {
                        return Err(Error::InvalidInput(format!(
                            "cell {cell:?} leaves the grid on axis {axis}"
                        )));
                    }
                }
            }
            cs.sort_unstable();
            cs.dedup();
        }
        Ok(Self {
            shape,
            strides,
            cells,
        })
    }

    /// The two faces of `cell` along `axis` (which must be in its mask).
    fn faces_along(&self, cell: Cell, axis: usize) -> [Cell; 2] {
        let face_mask = cell.mask & !(1 << axis);
        [
            Cell {
                base: cell.base,
                mask: face_mask,
            },
            Cell {
                base: cell.base + self.strides[axis],
                mask: face_mask,
            },
        ]
    }

    /// Check the closure property: every face of every cell is present.
    pub fn verify_closure(&self) -> Result<()> {
        for k in 1..self.cells.len() {
            let lower = &self.cells[k - 1];
            for &cell in &self.cells[k] {
                for axis in 0..self.dim() {
                    if (cell.mask >> axis) & 1 == 0 {
                        continue;
                    }
                    for face in self.faces_along(cell, axis) {
                        if lower.binary_search(&face).is_err() {
                            return Err(Error::ClosureViolation(format!(
                                "{k}-cell {cell:?} is missing face {face:?}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn strides_for(shape: &[usize]) -> Vec<usize> {
    let d = shape.len();
    let mut strides = vec![1usize; d];
    for axis in (0..d.saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * shape[axis + 1];
    }
    strides
}

fn coords_of(linear: usize, shape: &[usize], strides: &[usize]) -> Vec<usize> {
    shape
        .iter()
        .zip(strides)
        .map(|(&s, &stride)| (linear / stride) % s)
        .collect()
}

/// The discretized sublevel set `{ value <= c }` as a cubical complex:
/// a vertex is included iff its field value is `<= c` (ties included), and a
/// higher cell iff all of its corner vertices are.
pub fn sublevel_complex<F: Real>(field: &ScalarField<F>, c: F) -> Result<CubicalComplex> {
    if !c.is_finite() {
        return Err(Error::InvalidInput("threshold must be finite".into()));
    }
    let shape = field.shape();
    let dim = shape.len();
    let strides = strides_for(&shape);
    let included: Vec<bool> = field.values().iter().map(|&v| v <= c).collect();

    let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); dim + 1];
    for mask in 0u8..(1 << dim) {
        let k = mask.count_ones() as usize;
        // corner offsets: sums of strides over subsets of the mask
        let mut corner_offsets = vec![0usize];
        for (axis, &stride) in strides.iter().enumerate() {
            if (mask >> axis) & 1 == 1 {
                let extended: Vec<usize> =
                    corner_offsets.iter().map(|&o| o + stride).collect();
                corner_offsets.extend(extended);
            }
        }

        // iterate over base vertices leaving room for the extent
        let limits: Vec<usize> = (0..dim)
            .map(|axis| {
                if (mask >> axis) & 1 == 1 {
                    shape[axis] - 1
                } else {
                    shape[axis]
                }
            })
            .collect();
        if limits.contains(&0) {
            continue;
        }
        let mut coords = vec![0usize; dim];
        'outer: loop {
            let base: usize = coords
                .iter()
                .zip(&strides)
                .map(|(&c, &s)| c * s)
                .sum();
            if corner_offsets.iter().all(|&o| included[base + o]) {
                cells[k].push(Cell { base, mask });
            }
            // odometer increment, axis d-1 fastest (row-major order)
            for axis in (0..dim).rev() {
                coords[axis] += 1;
                if coords[axis] < limits[axis] {
                    continue 'outer;
                }
                coords[axis] = 0;
            }
            break;
        }
    }
    for cs in &mut cells {
        cs.sort_unstable();
    }
    Ok(CubicalComplex {
        shape: shape.to_vec(),
        strides,
        cells,
    })
}

/// Betti numbers `b_0..b_d` of a complex on a d-axis grid, plus the Euler
/// characteristic. `empty` flags the degenerate no-vertex complex, whose
/// Betti numbers are all zero by convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiVector {
    pub b: Vec<u64>,
    pub euler: i64,
    pub empty: bool,
}

impl BettiVector {
    pub fn sum(&self) -> u64 {
        self.b.iter().sum()
    }
}

/// GF(2) rank of a sparse matrix given as columns of strictly increasing row
/// indices, by column reduction on the largest row index.
fn rank_gf2(mut columns: Vec<Vec<u32>>) -> usize {
    let mut pivot_owner: HashMap<u32, usize> = HashMap::new();
    let mut rank = 0usize;
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            match pivot_owner.get(&low) {
                Some(&k) => {
                    let merged = xor_sorted(&columns[j], &columns[k]);
                    columns[j] = merged;
                }
                None => {
                    pivot_owner.insert(low, j);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

/// Symmetric difference of two strictly increasing index lists.
fn xor_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Betti numbers over GF(2) from boundary-matrix ranks:
/// `b_k = #k-cells - rank d_k - rank d_{k+1}`.
pub fn betti_gf2(complex: &CubicalComplex) -> Result<BettiVector> {
    complex.verify_closure()?;
    let d = complex.dim();
    if complex.is_empty() {
        return Ok(BettiVector {
            b: vec![0; d + 1],
            euler: 0,
            empty: true,
        });
    }

    // ranks[k - 1] = rank of d_k for k = 1..=d (d_0 = 0, d_{d+1} empty)
    let ranks: Vec<usize> = (1..=d)
        .map(|k| {
            let rows: HashMap<Cell, u32> = complex.cells[k - 1]
                .iter()
                .enumerate()
                .map(|(i, &c)| (c, i as u32))
                .collect();
            let columns: Vec<Vec<u32>> = complex.cells[k]
                .iter()
                .map(|&cell| {
                    let mut col: Vec<u32> = (0..d)
                        .filter(|&axis| (cell.mask >> axis) & 1 == 1)
                        .flat_map(|axis| complex.faces_along(cell, axis))
                        .map(|face| rows[&face])
                        .collect();
                    col.sort_unstable();
                    col
                })
                .collect();
            rank_gf2(columns)
        })
        .collect();
    let rank_d = |k: usize| if k == 0 || k > d { 0 } else { ranks[k - 1] };

    let b: Vec<u64> = (0..=d)
        .map(|k| (complex.cells[k].len() - rank_d(k) - rank_d(k + 1)) as u64)
        .collect();
    Ok(BettiVector {
        b,
        euler: complex.euler(),
        empty: false,
    })
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra as usize] = rb;
        true
    }
}

/// Fast Betti numbers for 2-axis complexes: `b0` by union-find over vertices
/// joined through included edges, `b1 = b0 - chi` (planar subcomplexes have
/// no 2-cycles).
pub fn betti_fast2d(complex: &CubicalComplex) -> Result<BettiVector> {
    if complex.dim() != 2 {
        return Err(Error::InvalidInput(format!(
            "betti_fast2d needs a 2-axis complex, got {} axes",
            complex.dim()
        )));
    }
    if complex.is_empty() {
        return Ok(BettiVector {
            b: vec![0, 0, 0],
            euler: 0,
            empty: true,
        });
    }

    let vertex_ids: HashMap<usize, u32> = complex.cells[0]
        .iter()
        .enumerate()
        .map(|(i, c)| (c.base, i as u32))
        .collect();
    let mut uf = UnionFind::new(vertex_ids.len());
    let mut components = vertex_ids.len() as i64;
    for &edge in &complex.cells[1] {
        let axis = edge.mask.trailing_zeros() as usize;
        let a = vertex_ids[&edge.base];
        let b = vertex_ids[&(edge.base + complex.strides[axis])];
        if uf.union(a, b) {
            components -= 1;
        }
    }

    let euler = complex.euler();
    let b0 = components as u64;
    let b1 = (components - euler) as u64;
    Ok(BettiVector {
        b: vec![b0, b1, 0],
        euler,
        empty: false,
    })
}

/// Betti vector by the appropriate algorithm for the grid dimension.
pub fn betti(complex: &CubicalComplex) -> Result<BettiVector> {
    if complex.dim() == 2 {
        betti_fast2d(complex)
    } else {
        betti_gf2(complex)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscape::{Axis, ScalarField};

    /// Build a field holding 0.0 where `mask` is true and 1.0 elsewhere, so
    /// the sublevel complex at c = 0.5 is exactly the masked region.
    pub(crate) fn field_from_mask(shape: &[usize], mask: &[bool]) -> ScalarField<f64> {
        assert_eq!(mask.len(), shape.iter().product::<usize>());
        let axes = shape
            .iter()
            .enumerate()
            .map(|(i, &count)| Axis {
                index: i,
                min: 0.0,
                max: (count - 1) as f64,
                count,
            })
            .collect();
        let values = mask.iter().map(|&m| if m { 0.0 } else { 1.0 }).collect();
        ScalarField::from_parts(axes, Vec::new(), values).unwrap()
    }

    fn mask_complex(shape: &[usize], mask: &[bool]) -> CubicalComplex {
        sublevel_complex(&field_from_mask(shape, mask), 0.5).unwrap()
    }

    fn disk_mask(n: usize, cx: f64, cy: f64, r: f64) -> Vec<bool> {
        (0..n * n)
            .map(|i| {
                let (y, x) = ((i / n) as f64, (i % n) as f64);
                (x - cx).powi(2) + (y - cy).powi(2) <= r * r
            })
            .collect()
    }

    #[test]
    fn full_2x2_grid() {
        let complex = mask_complex(&[2, 2], &[true; 4]);
        assert_eq!(complex.cell_counts(), vec![4, 4, 1]);
        assert_eq!(complex.euler(), 1);
        let b = betti_gf2(&complex).unwrap();
        assert_eq!(b.b, vec![1, 0, 0]);
    }

    #[test]
    fn empty_complex() {
        let complex = mask_complex(&[3, 3], &[false; 9]);
        assert!(complex.is_empty());
        let b = betti_gf2(&complex).unwrap();
        assert!(b.empty);
        assert_eq!(b.b, vec![0, 0, 0]);
        let f = betti_fast2d(&complex).unwrap();
        assert!(f.empty);
        assert_eq!(f.b, vec![0, 0, 0]);
    }

    #[test]
    fn checkerboard_has_no_edges() {
        let n = 5;
        let mask: Vec<bool> = (0..n * n).map(|i| (i / n + i % n) % 2 == 0).collect();
        let complex = mask_complex(&[n, n], &mask);
        let included = mask.iter().filter(|&&m| m).count();
        assert_eq!(complex.cell_counts(), vec![included, 0, 0]);
        let b = betti_gf2(&complex).unwrap();
        assert_eq!(b.b[0] as usize, included);
    }

    #[test]
    fn disk_annulus_blobs() {
        let n = 33;
        let disk = mask_complex(&[n, n], &disk_mask(n, 16.0, 16.0, 10.0));
        assert_eq!(betti_gf2(&disk).unwrap().b[..2], [1, 0]);

        let annulus_mask: Vec<bool> = disk_mask(n, 16.0, 16.0, 10.0)
            .into_iter()
            .zip(disk_mask(n, 16.0, 16.0, 5.0))
            .map(|(outer, inner)| outer && !inner)
            .collect();
        let annulus = mask_complex(&[n, n], &annulus_mask);
        assert_eq!(betti_gf2(&annulus).unwrap().b[..2], [1, 1]);

        let blobs_mask: Vec<bool> = disk_mask(n, 8.0, 8.0, 5.0)
            .into_iter()
            .zip(disk_mask(n, 24.0, 24.0, 5.0))
            .map(|(a, b)| a || b)
            .collect();
        let blobs = mask_complex(&[n, n], &blobs_mask);
        assert_eq!(betti_gf2(&blobs).unwrap().b[..2], [2, 0]);

        // the fast path agrees on all three
        for c in [&disk, &annulus, &blobs] {
            assert_eq!(betti_fast2d(c).unwrap(), betti_gf2(c).unwrap());
        }
    }

    #[test]
    fn hollow_shell_3d() {
        // 5^3 vertex grid minus the interior: the boundary surface of a cube,
        // a topological sphere
        let n = 5;
        let mask: Vec<bool> = (0..n * n * n)
            .map(|i| {
                let (z, y, x) = (i / (n * n), (i / n) % n, i % n);
                [x, y, z].iter().any(|&c| c == 0 || c == n - 1)
            })
            .collect();
        let complex = mask_complex(&[n, n, n], &mask);
        let b = betti_gf2(&complex).unwrap();
        assert_eq!(b.b, vec![1, 0, 1, 0]);
        assert_eq!(b.euler, 2);
    }

    #[test]
    fn fast2d_rejects_other_dims() {
        let complex = mask_complex(&[2, 2, 2], &[true; 8]);
        assert!(betti_fast2d(&complex).is_err());
    }

    #[test]
    fn threshold_must_be_finite() {
        let field = field_from_mask(&[2, 2], &[true; 4]);
        assert!(sublevel_complex(&field, f64::NAN).is_err());
        assert!(sublevel_complex(&field, f64::INFINITY).is_err());
    }

    #[test]
    fn closure_violation_detected() {
        // an edge without one of its endpoints
        let complex = CubicalComplex::from_cells(
            vec![2, 2],
            vec![
                vec![Cell { base: 0, mask: 0 }],
                vec![Cell { base: 0, mask: 1 }],
            ],
        )
        .unwrap();
        assert!(matches!(
            betti_gf2(&complex),
            Err(Error::ClosureViolation(_))
        ));
    }

    #[test]
    fn euler_identity_on_random_masks() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..25 {
            let (rows, cols) = (rng.random_range(2..12), rng.random_range(2..12));
            let mask: Vec<bool> = (0..rows * cols).map(|_| rng.random_bool(0.55)).collect();
            let complex = mask_complex(&[rows, cols], &mask);
            let counts = complex.cell_counts();
            let chi = counts[0] as i64 - counts[1] as i64 + counts[2] as i64;
            let g = betti_gf2(&complex).unwrap();
            assert_eq!(chi, g.euler);
            assert_eq!(
                g.b.iter().enumerate().map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum::<i64>(),
                chi
            );
            assert_eq!(betti_fast2d(&complex).unwrap(), g);
            if !g.empty {
                assert!(g.b[0] >= 1);
            }
        }
    }

    #[test]
    fn boundary_of_boundary_vanishes() {
        // d(d(cell)) = 0 over GF(2): each face of a face appears twice
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        let mask: Vec<bool> = (0..6 * 6 * 6).map(|_| rng.random_bool(0.7)).collect();
        let complex = mask_complex(&[6, 6, 6], &mask);
        for k in 2..=3 {
            for &cell in complex.cells(k) {
                let mut grandfaces: Vec<Cell> = Vec::new();
                for axis in 0..3 {
                    if (cell.mask >> axis) & 1 == 0 {
                        continue;
                    }
                    for face in complex.faces_along(cell, axis) {
                        for sub_axis in 0..3 {
                            if (face.mask >> sub_axis) & 1 == 1 {
                                grandfaces.extend(complex.faces_along(face, sub_axis));
                            }
                        }
                    }
                }
                grandfaces.sort_unstable();
                assert_eq!(grandfaces.len() % 2, 0);
                for pair in grandfaces.chunks(2) {
                    assert_eq!(pair[0], pair[1], "unpaired grandface of {cell:?}");
                }
            }
        }
    }
}
