//! Matrix export.
//!
//! Binary layout (little endian):
//!   magic   b"GLMX"
//!   u32     version (1)
//!   u32     label length, then the UTF-8 label bytes
//!   u32     K
//!   u32     dim
//!   u8      0 = real, 1 = complex
//!   then dim·dim entries row-major, f64 (complex: re, im pairs).

use std::io::{Read, Write};

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"GLMX";

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixData {
    Real(DMatrix<f64>),
    Complex(DMatrix<Complex<f64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExportedMatrix {
    pub label: String,
    pub k: u32,
    pub data: MatrixData,
}

pub fn write_binary<W: Write>(mut w: W, m: &ExportedMatrix) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&1u32.to_le_bytes())?;
    w.write_all(&(m.label.len() as u32).to_le_bytes())?;
    w.write_all(m.label.as_bytes())?;
    w.write_all(&m.k.to_le_bytes())?;
    match &m.data {
        MatrixData::Real(a) => {
            w.write_all(&(a.nrows() as u32).to_le_bytes())?;
            w.write_all(&[0u8])?;
            for i in 0..a.nrows() {
                for j in 0..a.ncols() {
                    w.write_all(&a[(i, j)].to_le_bytes())?;
                }
            }
        }
        MatrixData::Complex(a) => {
            w.write_all(&(a.nrows() as u32).to_le_bytes())?;
            w.write_all(&[1u8])?;
            for i in 0..a.nrows() {
                for j in 0..a.ncols() {
                    w.write_all(&a[(i, j)].re.to_le_bytes())?;
                    w.write_all(&a[(i, j)].im.to_le_bytes())?;
                }
            }
        }
    }
    Ok(())
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_binary<R: Read>(mut r: R) -> Result<ExportedMatrix> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Domain("not a matrix file".into()));
    }
    let version = read_u32(&mut r)?;
    if version != 1 {
        return Err(Error::Domain(format!("unsupported matrix file version {version}")));
    }
    let len = read_u32(&mut r)? as usize;
    let mut label = vec![0u8; len];
    r.read_exact(&mut label)?;
    let label = String::from_utf8(label).map_err(|e| Error::Domain(e.to_string()))?;
    let k = read_u32(&mut r)?;
    let n = read_u32(&mut r)? as usize;
    let mut flag = [0u8; 1];
    r.read_exact(&mut flag)?;
    let data = if flag[0] == 0 {
        let mut v = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            v.push(read_f64(&mut r)?);
        }
        MatrixData::Real(DMatrix::from_row_slice(n, n, &v))
    } else {
        let mut v = Vec::with_capacity(n * n);
        for _ in 0..n * n {
            let re = read_f64(&mut r)?;
            let im = read_f64(&mut r)?;
            v.push(Complex::new(re, im));
        }
        MatrixData::Complex(DMatrix::from_row_slice(n, n, &v))
    };
    Ok(ExportedMatrix { label, k, data })
}

/// CSV rows of `{:.16e}` values; only for dim ≤ 64.
pub fn write_csv<W: Write>(mut w: W, a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() > 64 {
        return Err(Error::Dimension(format!("CSV export limited to dim <= 64, got {}", a.nrows())));
    }
    for i in 0..a.nrows() {
        let row: Vec<String> = (0..a.ncols()).map(|j| format!("{:.16e}", a[(i, j)])).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}
