//! Shared helpers for the integration suites.
#![allow(dead_code)] // each suite uses a different subset

use losstopo::homology::{sublevel_complex, CubicalComplex};
use losstopo::landscape::{Axis, ScalarField};

/// Field that is 0.0 on the mask and 1.0 off it, so the sublevel complex at
/// c = 0.5 is exactly the masked region.
pub fn field_from_mask(shape: &[usize], mask: &[bool]) -> ScalarField<f64> {
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

pub fn mask_complex(shape: &[usize], mask: &[bool]) -> CubicalComplex {
    sublevel_complex(&field_from_mask(shape, mask), 0.5).unwrap()
}

pub fn disk_mask(n: usize, cx: f64, cy: f64, r: f64) -> Vec<bool> {
    (0..n * n)
        .map(|i| {
            let (y, x) = ((i / n) as f64, (i % n) as f64);
            (x - cx).powi(2) + (y - cy).powi(2) <= r * r
        })
        .collect()
}
