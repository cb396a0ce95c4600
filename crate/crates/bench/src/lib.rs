//! Shared inputs for the benchmarks.

use morrey_lab::{Grid, GridFunction, KernelParams, TestFunctionSpec};

/// `|x|^(0.5-1)/(1+|x|)`, the one-dimensional kernel of the default experiments.
pub fn kernel_1d() -> KernelParams {
    KernelParams::new(1, 0.5, 1.0).unwrap()
}

pub fn kernel_2d() -> KernelParams {
    KernelParams::new(2, 1.0, 1.0).unwrap()
}

/// Unit-ball indicator on an origin-centred grid of spacing `h` and half-width `extent`.
pub fn unit_ball(n: usize, h: f64, extent: f64) -> GridFunction {
    let grid = Grid::new(n, h, extent).unwrap();
    TestFunctionSpec::ball(&vec![0.0; n], 1.0).sample(&grid).unwrap()
}

pub fn gaussian(n: usize, h: f64, extent: f64) -> GridFunction {
    let grid = Grid::new(n, h, extent).unwrap();
    TestFunctionSpec::gaussian(&vec![0.0; n], 0.5).sample(&grid).unwrap()
}
