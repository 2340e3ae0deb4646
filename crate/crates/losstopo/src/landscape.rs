//! Loss fields over low-dimensional parameter slices.
//!
//! A slice freezes all but 2 or 3 coordinates of the parameter vector and
//! lays a regular grid over the varied ones. Sampling the loss on the grid
//! gives a [`ScalarField`]; thresholding the field gives the sublevel
//! complexes whose Betti numbers are measured against the bound.
//!
//! Field file format: one JSON header line
//! `{"axes":[{"index":…,"min":…,"max":…,"count":…},…],"base_point":[…]}`
//! followed by the values, one per line, in row-major order (axis 0
//! slowest).

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homology::{betti, sublevel_complex, BettiVector};
use crate::net::{loss_eval, Dataset, Network};
use crate::pfaffian::LossSpec;
use crate::{Real, Scalar};

/// One varied parameter: which coordinate, its closed range, and how many
/// grid points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis<F = Scalar> {
    pub index: usize,
    pub min: F,
    pub max: F,
    pub count: usize,
}

impl<F: Real> Axis<F> {
    /// Grid coordinate `i` of this axis, endpoints included.
    pub fn coord(&self, i: usize) -> F {
        let t = F::from(i).unwrap() / F::from(self.count - 1).unwrap();
        self.min + (self.max - self.min) * t
    }
}

/// A 2- or 3-dimensional slice through parameter space: varied axes plus the
/// full parameter vector holding the frozen coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSlice<F = Scalar> {
    axes: Vec<Axis<F>>,
    base_point: Vec<F>,
}

impl<F: Real> ParameterSlice<F> {
    pub fn new(
        varied_indices: &[usize],
        ranges: &[(F, F)],
        resolution: &[usize],
        base_point: Vec<F>,
    ) -> Result<Self> {
        let d = varied_indices.len();
        if !(2..=3).contains(&d) {
            return Err(Error::InvalidInput(format!(
                "a slice varies 2 or 3 parameters, got {d}"
            )));
        }
        if ranges.len() != d || resolution.len() != d {
            return Err(Error::DimensionMismatch(
                "varied_indices, ranges, and resolution must have equal length".into(),
            ));
        }
        for (i, &idx) in varied_indices.iter().enumerate() {
            if idx >= base_point.len() {
                return Err(Error::InvalidInput(format!(
                    "varied index {idx} exceeds parameter count {}",
                    base_point.len()
                )));
            }
            if varied_indices[..i].contains(&idx) {
                return Err(Error::InvalidInput(format!(
                    "varied index {idx} repeated"
                )));
            }
        }
        for (&(lo, hi), &res) in ranges.iter().zip(resolution) {
            if res < 2 {
                return Err(Error::InvalidInput(
                    "resolution must be >= 2 per axis".into(),
                ));
            }
            if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                return Err(Error::InvalidInput(
                    "axis range must be finite with min < max".into(),
                ));
            }
        }
        let axes = varied_indices
            .iter()
            .zip(ranges)
            .zip(resolution)
            .map(|((&index, &(min, max)), &count)| Axis {
                index,
                min,
                max,
                count,
            })
            .collect();
        Ok(Self { axes, base_point })
    }

    pub fn axes(&self) -> &[Axis<F>] {
        &self.axes
    }

    pub fn base_point(&self) -> &[F] {
        &self.base_point
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn num_nodes(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    fn node_coords(&self, node: &[usize]) -> Vec<F> {
        let mut point = self.base_point.clone();
        for (axis, &i) in self.axes.iter().zip(node) {
            point[axis.index] = axis.coord(i);
        }
        point
    }
}

/// Loss values sampled on a slice grid, row-major with axis 0 slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<F = Scalar> {
    axes: Vec<Axis<F>>,
    base_point: Vec<F>,
    values: Vec<F>,
}

impl<F: Real> ScalarField<F> {
    pub fn from_parts(axes: Vec<Axis<F>>, base_point: Vec<F>, values: Vec<F>) -> Result<Self> {
        let expected: usize = axes.iter().map(|a| a.count).product();
        if axes.is_empty() || values.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "field has {} values, grid needs {expected}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let shape: Vec<usize> = axes.iter().map(|a| a.count).collect();
            return Err(Error::NonFiniteValue {
                node: unravel(pos, &shape),
            });
        }
        Ok(Self {
            axes,
            base_point,
            values,
        })
    }

    /// Sample an analytic function of the grid coordinates (test fields,
    /// synthetic landscapes).
    pub fn from_fn(axes: Vec<Axis<F>>, f: impl Fn(&[F]) -> F) -> Result<Self> {
        let shape: Vec<usize> = axes.iter().map(|a| a.count).collect();
        let n: usize = shape.iter().product();
        let values = (0..n)
            .map(|linear| {
                let node = unravel(linear, &shape);
                let coords: Vec<F> = axes
                    .iter()
                    .zip(&node)
                    .map(|(a, &i)| a.coord(i))
                    .collect();
                f(&coords)
            })
            .collect();
        Self::from_parts(axes, Vec::new(), values)
    }

    pub fn axes(&self) -> &[Axis<F>] {
        &self.axes
    }

    pub fn base_point(&self) -> &[F] {
        &self.base_point
    }

    pub fn values(&self) -> &[F] {
        &self.values
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn value_at(&self, node: &[usize]) -> F {
        let shape = self.shape();
        self.values[ravel(node, &shape)]
    }

    /// Evenly spaced quantiles of the sampled values (nearest rank on the
    /// sorted data, deterministic), deduplicated and ascending. `k = 16` is
    /// the default threshold ladder; the top quantile is the maximum, so the
    /// last complex is the full grid.
    pub fn quantile_thresholds(&self, k: usize) -> Vec<F> {
        let mut sorted = self.values.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("values are finite by construction"));
        let n = sorted.len();
        let mut out: Vec<F> = (1..=k).map(|j| sorted[(n - 1) * j / k]).collect();
        out.dedup();
        out
    }
}

fn ravel(node: &[usize], shape: &[usize]) -> usize {
    node.iter()
        .zip(shape)
        .fold(0usize, |acc, (&i, &s)| acc * s + i)
}

fn unravel(mut linear: usize, shape: &[usize]) -> Vec<usize> {
    let mut node = vec![0usize; shape.len()];
    for axis in (0..shape.len()).rev() {
        node[axis] = linear % shape[axis];
        linear /= shape[axis];
    }
    node
}

/// Evaluate the loss at every node of the slice grid.
///
/// Node evaluation is parallel; the output ordering and any reported error
/// are independent of scheduling (the first failing node in row-major order
/// wins).
pub fn sample_field<F: Real>(
    net: &Network,
    data: &Dataset<F>,
    loss: &LossSpec,
    slice: &ParameterSlice<F>,
) -> Result<ScalarField<F>> {
    if slice.base_point().len() != net.num_params() {
        return Err(Error::DimensionMismatch(format!(
            "slice base point has {} coordinates, network has {} parameters",
            slice.base_point().len(),
            net.num_params()
        )));
    }
    let shape = slice.shape();
    let results: Vec<Result<F>> = (0..slice.num_nodes())
        .into_par_iter()
        .map(|linear| {
            let node = unravel(linear, &shape);
            let point = slice.node_coords(&node);
            loss_eval(net, &point, data, loss)
        })
        .collect();

    let mut values = Vec::with_capacity(results.len());
    for (linear, r) in results.into_iter().enumerate() {
        let v = r?;
        if !v.is_finite() {
            return Err(Error::NonFiniteValue {
                node: unravel(linear, &shape),
            });
        }
        values.push(v);
    }
    ScalarField::from_parts(slice.axes().to_vec(), slice.base_point().to_vec(), values)
}

/// Betti numbers of the sublevel complexes at each threshold. Thresholds
/// must be ascending, so the complexes are nested.
pub fn sweep_betti<F: Real>(
    field: &ScalarField<F>,
    thresholds: &[F],
) -> Result<Vec<(F, BettiVector)>> {
    if thresholds.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidInput(
            "thresholds must be sorted ascending".into(),
        ));
    }
    thresholds
        .iter()
        .map(|&c| {
            let complex = sublevel_complex(field, c)?;
            Ok((c, betti(&complex)?))
        })
        .collect()
}

/// Serde mirror of the field file header line.
#[derive(Serialize, Deserialize)]
struct FieldHeader {
    axes: Vec<AxisHeader>,
    base_point: Vec<Scalar>,
}

#[derive(Serialize, Deserialize)]
struct AxisHeader {
    index: usize,
    min: Scalar,
    max: Scalar,
    count: usize,
}

/// Write a field file: JSON header line, then one value per line.
pub fn write_field_file(field: &ScalarField<Scalar>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let header = FieldHeader {
        axes: field
            .axes()
            .iter()
            .map(|a| AxisHeader {
                index: a.index,
                min: a.min,
                max: a.max,
                count: a.count,
            })
            .collect(),
        base_point: field.base_point().to_vec(),
    };
    let mut out = String::new();
    out.push_str(&serde_json::to_string(&header).expect("header serializes"));
    out.push('\n');
    for v in field.values() {
        out.push_str(&format!("{v}\n"));
    }
    let mut file = std::fs::File::create(path)
        .map_err(|e| Error::io(path.display().to_string(), e))?;
    file.write_all(out.as_bytes())
        .map_err(|e| Error::io(path.display().to_string(), e))
}

/// Read a field file written by [`write_field_file`].
pub fn read_field_file(path: impl AsRef<Path>) -> Result<ScalarField<Scalar>> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let file =
        std::fs::File::open(path).map_err(|e| Error::io(display.clone(), e))?;
    let mut lines = BufReader::new(file).lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::Parse {
            path: display.clone(),
            message: "empty field file".into(),
        })?
        .map_err(|e| Error::io(display.clone(), e))?;
    let header: FieldHeader =
        serde_json::from_str(&header_line).map_err(|e| Error::Parse {
            path: display.clone(),
            message: format!("bad header: {e}"),
        })?;
    let axes: Vec<Axis<Scalar>> = header
        .axes
        .iter()
        .map(|a| Axis {
            index: a.index,
            min: a.min,
            max: a.max,
            count: a.count,
        })
        .collect();
    let mut values = Vec::new();
    for line in lines {
        let line = line.map_err(|e| Error::io(display.clone(), e))?;
        if line.is_empty() {
            continue;
        }
        values.push(line.parse::<Scalar>().map_err(|e| Error::Parse {
            path: display.clone(),
            message: format!("bad value {line:?}: {e}"),
        })?);
    }
    ScalarField::from_parts(axes, header.base_point, values)
}
