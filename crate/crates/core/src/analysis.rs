//! Post-processing: error norms, convergence rates, y-average decomposition
//! and the kinetic-energy spectrum of fluctuation fields.

use crate::error::{Error, Result};
use crate::grid::Grid2D;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    LInf,
}

/// Discrete error norm between two fields; L1 and L2 are cell-area weighted.
pub fn error_norm(numeric: &[f64], exact: &[f64], cell_area: f64, norm: Norm) -> Result<f64> {
    if numeric.len() != exact.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} vs {} samples",
            numeric.len(),
            exact.len()
        )));
    }
    let err = numeric.iter().zip(exact).map(|(a, b)| a - b);
    Ok(match norm {
        Norm::L1 => err.map(|e| e.abs()).sum::<f64>() * cell_area,
        Norm::L2 => (err.map(|e| e * e).sum::<f64>() * cell_area).sqrt(),
        Norm::LInf => err.map(|e| e.abs()).fold(0.0, f64::max),
    })
}

/// Observed order of accuracy from errors at N and 2N cells per direction.
pub fn convergence_rate(err_coarse: f64, err_fine: f64) -> Result<f64> {
    if !(err_coarse > 0.0 && err_fine > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "convergence rate needs positive errors, got ({err_coarse}, {err_fine})"
        )));
    }
    Ok((err_coarse / err_fine).log2())
}

/// Split a 2-D field (row-major, x fastest) into its per-column mean over y
/// and the residual fluctuation. The fluctuation has zero column mean.
pub fn y_average_decompose(field: &[f64], nx: usize, ny: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if field.len() != nx * ny {
        return Err(Error::ShapeMismatch(format!(
            "field has {} samples, expected {}x{}",
            field.len(),
            nx,
            ny
        )));
    }
    let mut mean = vec![0.0; nx];
    for k in 0..ny {
        for j in 0..nx {
            mean[j] += field[j + k * nx];
        }
    }
    for m in mean.iter_mut() {
        *m /= ny as f64;
    }
    let mut fluct = vec![0.0; nx * ny];
    for k in 0..ny {
        for j in 0..nx {
            fluct[j + k * nx] = field[j + k * nx] - mean[j];
        }
    }
    Ok((mean, fluct))
}

/// Shell-integrated kinetic-energy spectrum of a velocity fluctuation field.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Integer shell indices 0..=k_max.
    pub k: Vec<usize>,
    /// Shell energies; the k = 0 entry is the mean-mode energy (zero for
    /// fluctuation fields).
    pub e: Vec<f64>,
    /// One half of the mean squared fluctuation speed; equals the shell sum
    /// by Parseval's identity under the 1/(nx*ny) DFT normalization.
    pub total: f64,
}

/// Forward 2-D DFT normalized by the cell count.
fn dft2(field: &[f64], nx: usize, ny: usize) -> Vec<Complex<f64>> {
    let mut planner = FftPlanner::new();
    let fft_x = planner.plan_fft_forward(nx);
    let fft_y = planner.plan_fft_forward(ny);

    let mut data: Vec<Complex<f64>> = field.iter().map(|&v| Complex::new(v, 0.0)).collect();
    for row in data.chunks_mut(nx) {
        fft_x.process(row);
    }
    let mut column = vec![Complex::new(0.0, 0.0); ny];
    for j in 0..nx {
        for k in 0..ny {
            column[k] = data[j + k * nx];
        }
        fft_y.process(&mut column);
        for k in 0..ny {
            data[j + k * nx] = column[k];
        }
    }
    let scale = 1.0 / (nx * ny) as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
    data
}

/// Spectrum E(k) with integer shells k = round(sqrt(kx^2 + ky^2)) over the
/// signed integer mode numbers of each direction.
pub fn energy_spectrum(u: &[f64], v: &[f64], nx: usize, ny: usize) -> Result<SpectrumResult> {
    if u.len() != nx * ny || v.len() != nx * ny {
        return Err(Error::ShapeMismatch(format!(
            "velocity fields must both have {}x{} samples",
            nx, ny
        )));
    }
    let u_hat = dft2(u, nx, ny);
    let v_hat = dft2(v, nx, ny);

    let mode = |idx: usize, n: usize| -> i64 {
        if idx <= n / 2 {
            idx as i64
        } else {
            idx as i64 - n as i64
        }
    };
    let kx_max = nx / 2;
    let ky_max = ny / 2;
    let k_max = ((kx_max * kx_max + ky_max * ky_max) as f64).sqrt().round() as usize;
    let mut e = vec![0.0; k_max + 1];
    for ky in 0..ny {
        for kx in 0..nx {
            let i = kx + ky * nx;
            let mx = mode(kx, nx) as f64;
            let my = mode(ky, ny) as f64;
            let shell = (mx * mx + my * my).sqrt().round() as usize;
            let energy = 0.5 * (u_hat[i].norm_sqr() + v_hat[i].norm_sqr());
            e[shell] += energy;
        }
    }
    let total = 0.5
        * (u.iter().map(|a| a * a).sum::<f64>() + v.iter().map(|a| a * a).sum::<f64>())
        / (nx * ny) as f64;
    Ok(SpectrumResult {
        k: (0..=k_max).collect(),
        e,
        total,
    })
}

/// Grid-aware wrapper enforcing the uniform-spacing precondition.
pub fn energy_spectrum_grid(
    grid: &Grid2D,
    u: &[f64],
    v: &[f64],
) -> Result<SpectrumResult> {
    if (grid.dx - grid.dy).abs() > 1e-12 * grid.dx.max(grid.dy) {
        return Err(Error::ShapeMismatch(format!(
            "spectrum requires a uniform grid, got dx = {}, dy = {}",
            grid.dx, grid.dy
        )));
    }
    energy_spectrum(u, v, grid.nx, grid.ny)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn norms_on_constant_offset() {
        let a = vec![1.0; 100];
        let b = vec![0.75; 100];
        // unit domain: cell area 1/100
        assert!((error_norm(&a, &b, 0.01, Norm::L1).unwrap() - 0.25).abs() < 1e-15);
        assert!((error_norm(&a, &b, 0.01, Norm::LInf).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(error_norm(&a, &a, 0.01, Norm::L2).unwrap(), 0.0);
        assert!(error_norm(&a, &b[..50], 0.01, Norm::L1).is_err());
    }

    #[test]
    fn rates_from_geometric_errors() {
        assert!((convergence_rate(0.04, 0.01).unwrap() - 2.0).abs() < 1e-14);
        assert!((convergence_rate(0.04, 0.02).unwrap() - 1.0).abs() < 1e-14);
        assert!((convergence_rate(1e-3, 2.5e-4).unwrap() - 2.0).abs() < 1e-12);
        assert!(convergence_rate(0.0, 1.0).is_err());
    }

    #[test]
    fn y_average_splits_sine() {
        let (nx, ny) = (8, 16);
        let mut field = vec![0.0; nx * ny];
        for k in 0..ny {
            for j in 0..nx {
                field[j + k * nx] = (2.0 * PI * (k as f64 + 0.5) / ny as f64).sin();
            }
        }
        let (mean, fluct) = y_average_decompose(&field, nx, ny).unwrap();
        for m in &mean {
            assert!(m.abs() < 1e-14);
        }
        // column means of the fluctuation vanish
        for j in 0..nx {
            let col: f64 = (0..ny).map(|k| fluct[j + k * nx]).sum();
            assert!(col.abs() < 1e-13);
        }
        // y-independent field has zero fluctuation
        let uniform = vec![3.5; nx * ny];
        let (m, f) = y_average_decompose(&uniform, nx, ny).unwrap();
        assert!(m.iter().all(|v| (v - 3.5).abs() < 1e-15));
        assert!(f.iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn single_mode_concentrates_in_its_shell() {
        let (nx, ny) = (32, 24);
        let amp = 0.7;
        let mut u = vec![0.0; nx * ny];
        for k in 0..ny {
            for j in 0..nx {
                u[j + k * nx] = amp * (2.0 * PI * 3.0 * (j as f64) / nx as f64).cos();
            }
        }
        let v = vec![0.0; nx * ny];
        let spec = energy_spectrum(&u, &v, nx, ny).unwrap();
        assert!((spec.e[3] - amp * amp / 4.0).abs() < 1e-14);
        let off_shell: f64 = spec
            .e
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != 3)
            .map(|(_, e)| e)
            .sum();
        assert!(off_shell < 1e-14);
        let sum: f64 = spec.e.iter().sum();
        assert!((sum - spec.total).abs() < 1e-12 * spec.total.max(1.0));
    }

    #[test]
    fn zero_fields_give_zero_spectrum() {
        let spec = energy_spectrum(&[0.0; 64], &[0.0; 64], 8, 8).unwrap();
        assert_eq!(spec.total, 0.0);
        assert!(spec.e.iter().all(|&e| e == 0.0));
    }
}
