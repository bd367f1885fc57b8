//! WaveField serialization.
//!
//! Binary layout, all little-endian: `L: f64`, `N: u64`, `n: u64`,
//! representation flag `u8` (0 position, 1 momentum), then `N·n` complex
//! samples as `(re: f64, im: f64)` in row-major order (sample-major, component-minor).

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{Representation, WaveField};
use crate::grid::SpectralGrid;
use crate::linalg::CMatrix;

pub fn write_binary<W: Write>(field: &WaveField, mut w: W) -> Result<()> {
    let grid = field.grid();
    w.write_all(&grid.half_width().to_le_bytes())?;
    w.write_all(&(grid.len() as u64).to_le_bytes())?;
    w.write_all(&(field.dim() as u64).to_le_bytes())?;
    w.write_all(&[field.representation().flag()])?;
    let values = field.values();
    for j in 0..grid.len() {
        for i in 0..field.dim() {
            let z = values[(j, i)];
            w.write_all(&z.re.to_le_bytes())?;
            w.write_all(&z.im.to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

pub fn read_binary<R: Read>(mut r: R) -> Result<WaveField> {
    let half_width = read_f64(&mut r)?;
    let points = read_u64(&mut r)? as usize;
    let n = read_u64(&mut r)? as usize;
    let mut flag = [0u8; 1];
    r.read_exact(&mut flag)?;
    let repr = Representation::from_flag(flag[0])
        .ok_or_else(|| Error::Format(format!("unknown representation flag {}", flag[0])))?;
    let grid = SpectralGrid::new(half_width, points)?;
    if n == 0 || n > 4096 {
        return Err(Error::Format(format!("implausible internal dimension {n}")));
    }
    let mut values = CMatrix::zeros(points, n);
    for j in 0..points {
        for i in 0..n {
            let re = read_f64(&mut r)?;
            let im = read_f64(&mut r)?;
            values[(j, i)] = Complex64::new(re, im);
        }
    }
    WaveField::from_values(&grid, values, repr)
}

pub fn to_binary(field: &WaveField) -> Vec<u8> {
    let mut buf = Vec::with_capacity(25 + 16 * field.grid().len() * field.dim());
    write_binary(field, &mut buf).expect("writing to a Vec cannot fail");
    buf
}

pub fn from_binary(bytes: &[u8]) -> Result<WaveField> {
    read_binary(bytes)
}

/// Debug CSV: `z` (or `k`) followed by `re_i, im_i` per component.
pub fn write_csv<W: Write>(field: &WaveField, mut w: W) -> Result<()> {
    let grid = field.grid();
    let axis = match field.representation() {
        Representation::Position => "z",
        Representation::Momentum => "k",
    };
    let mut header = vec![axis.to_string()];
    for i in 0..field.dim() {
        header.push(format!("re_{i}"));
        header.push(format!("im_{i}"));
    }
    writeln!(w, "{}", header.join(","))?;
    for j in 0..grid.len() {
        let x = match field.representation() {
            Representation::Position => grid.z(j),
            Representation::Momentum => grid.k(j),
        };
        let mut row = vec![format!("{x:.16e}")];
        for i in 0..field.dim() {
            let z = field.values()[(j, i)];
            row.push(format!("{:.16e}", z.re));
            row.push(format!("{:.16e}", z.im));
        }
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
