//! Matrix Market reader and writers. Reading accepts array and coordinate
//! formats with real, complex, or integer fields and expands symmetric,
//! hermitian, and skew-symmetric storage; writing emits dense complex
//! arrays or real coordinate files with full round-trip precision.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

#[derive(Clone, Copy, PartialEq, Eq)]
enum MmFormat {
    Array,
    Coordinate,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum MmField {
    Real,
    Complex,
    Integer,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum MmSymmetry {
    General,
    Symmetric,
    Hermitian,
    Skew,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<(MmFormat, MmField, MmSymmetry)> {
    let tokens: Vec<&str> = line.split_whitespace().collect();
    if tokens.len() != 5
        || !tokens[0].eq_ignore_ascii_case("%%MatrixMarket")
        || !tokens[1].eq_ignore_ascii_case("matrix")
    {
        return Err(parse_err(
            line_no,
            "header must read '%%MatrixMarket matrix <format> <field> <symmetry>'",
        ));
    }
    let format = match tokens[2].to_ascii_lowercase().as_str() {
        "array" => MmFormat::Array,
        "coordinate" => MmFormat::Coordinate,
        other => return Err(parse_err(line_no, format!("unsupported format '{other}'"))),
    };
    let field = match tokens[3].to_ascii_lowercase().as_str() {
        "real" => MmField::Real,
        "complex" => MmField::Complex,
        "integer" => MmField::Integer,
        "pattern" => {
            return Err(parse_err(
                line_no,
                "pattern matrices carry no values and cannot be read as dense data",
            ))
        }
        other => return Err(parse_err(line_no, format!("unsupported field '{other}'"))),
    };
    let symmetry = match tokens[4].to_ascii_lowercase().as_str() {
        "general" => MmSymmetry::General,
        "symmetric" => MmSymmetry::Symmetric,
        "hermitian" => MmSymmetry::Hermitian,
        "skew-symmetric" => MmSymmetry::Skew,
        other => {
            return Err(parse_err(
                line_no,
                format!("unsupported symmetry '{other}'"),
            ))
        }
    };
    Ok((format, field, symmetry))
}

fn parse_f64(line_no: usize, token: &str) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(line_no, format!("cannot parse '{token}' as a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line_no, format!("non-finite value '{token}'")));
    }
    Ok(v)
}

fn parse_usize(line_no: usize, token: &str) -> Result<usize> {
    token
        .parse()
        .map_err(|_| parse_err(line_no, format!("cannot parse '{token}' as an index")))
}

fn parse_value(line_no: usize, tokens: &[&str], field: MmField) -> Result<Complex64> {
    match field {
        MmField::Real | MmField::Integer => {
            if tokens.len() != 1 {
                return Err(parse_err(line_no, "expected one value"));
            }
            Ok(Complex64::new(parse_f64(line_no, tokens[0])?, 0.0))
        }
        MmField::Complex => {
            if tokens.len() != 2 {
                return Err(parse_err(
                    line_no,
                    "complex entries need a real and an imaginary part",
                ));
            }
            Ok(Complex64::new(
                parse_f64(line_no, tokens[0])?,
                parse_f64(line_no, tokens[1])?,
            ))
        }
    }
}

/// Parses Matrix Market text. Line numbers in errors are 1-based.
pub fn read_matrix_str(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (header_no, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file; missing header"))?;
    let (format, field, symmetry) = parse_header(header_no, header)?;

    let mut content = lines.filter(|(_, l)| {
        let t = l.trim_start();
        !t.is_empty() && !t.starts_with('%')
    });

    let (size_no, size_line) = content
        .next()
        .ok_or_else(|| parse_err(2, "missing size line"))?;
    let size_tokens: Vec<&str> = size_line.split_whitespace().collect();
    let expected_size_tokens = match format {
        MmFormat::Array => 2,
        MmFormat::Coordinate => 3,
    };
    if size_tokens.len() != expected_size_tokens {
        return Err(parse_err(
            size_no,
            format!("size line needs {expected_size_tokens} integers"),
        ));
    }
    let rows = parse_usize(size_no, size_tokens[0])?;
    let cols = parse_usize(size_no, size_tokens[1])?;
    if rows == 0 || cols == 0 {
        return Err(parse_err(size_no, "matrix dimensions must be positive"));
    }
    if symmetry != MmSymmetry::General && rows != cols {
        return Err(parse_err(
            size_no,
            "symmetric storage requires a square matrix",
        ));
    }

    let mut m = ComplexMatrix::zeros(rows, cols);
    match format {
        MmFormat::Array => {
            let mut slots: Vec<(usize, usize)> = Vec::new();
            for j in 0..cols {
                let start = match symmetry {
                    MmSymmetry::General => 0,
                    MmSymmetry::Skew => j + 1,
                    _ => j,
                };
                for i in start..rows {
                    slots.push((i, j));
                }
            }
            let mut filled = 0usize;
            let mut last_no = size_no;
            for (line_no, line) in content {
                last_no = line_no;
                if filled == slots.len() {
                    return Err(parse_err(line_no, "more data entries than the size allows"));
                }
                let tokens: Vec<&str> = line.split_whitespace().collect();
                let v = parse_value(line_no, &tokens, field)?;
                let (i, j) = slots[filled];
                m.set(i, j, v);
                filled += 1;
            }
            if filled != slots.len() {
                return Err(parse_err(
                    last_no + 1,
                    format!("expected {} data entries, found {filled}", slots.len()),
                ));
            }
        }
        MmFormat::Coordinate => {
            let nnz = parse_usize(size_no, size_tokens[2])?;
            let mut seen = 0usize;
            let mut last_no = size_no;
            for (line_no, line) in content {
                last_no = line_no;
                if seen == nnz {
                    return Err(parse_err(line_no, "more entries than the stated count"));
                }
                let tokens: Vec<&str> = line.split_whitespace().collect();
                if tokens.len() < 2 {
                    return Err(parse_err(line_no, "entry needs row and column indices"));
                }
                let i = parse_usize(line_no, tokens[0])?;
                let j = parse_usize(line_no, tokens[1])?;
                if i == 0 || i > rows || j == 0 || j > cols {
                    return Err(parse_err(
                        line_no,
                        format!("index ({i}, {j}) outside {rows}x{cols}"),
                    ));
                }
                let (i, j) = (i - 1, j - 1);
                let v = parse_value(line_no, &tokens[2..], field)?;
                match symmetry {
                    MmSymmetry::General => {
                        let cur = m.get(i, j);
                        m.set(i, j, cur + v);
                    }
                    MmSymmetry::Symmetric | MmSymmetry::Hermitian => {
                        if i < j {
                            return Err(parse_err(
                                line_no,
                                "symmetric storage lists only the lower triangle",
                            ));
                        }
                        let cur = m.get(i, j);
                        m.set(i, j, cur + v);
                        if i != j {
                            let mirrored = if symmetry == MmSymmetry::Hermitian {
                                v.conj()
                            } else {
                                v
                            };
                            let cur = m.get(j, i);
                            m.set(j, i, cur + mirrored);
                        }
                    }
                    MmSymmetry::Skew => {
                        if i <= j {
                            return Err(parse_err(
                                line_no,
                                "skew-symmetric storage lists only the strict lower triangle",
                            ));
                        }
                        let cur = m.get(i, j);
                        m.set(i, j, cur + v);
                        let cur = m.get(j, i);
                        m.set(j, i, cur - v);
                    }
                }
                seen += 1;
            }
            if seen != nnz {
                return Err(parse_err(
                    last_no + 1,
                    format!("expected {nnz} entries, found {seen}"),
                ));
            }
        }
    }

    if symmetry != MmSymmetry::General && format == MmFormat::Array {
        for j in 0..cols {
            for i in j + 1..rows {
                let v = m.get(i, j);
                let mirrored = match symmetry {
                    MmSymmetry::Symmetric => v,
                    MmSymmetry::Hermitian => v.conj(),
                    MmSymmetry::Skew => -v,
                    MmSymmetry::General => unreachable!(),
                };
                m.set(j, i, mirrored);
            }
        }
    }
    Ok(m)
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix> {
    read_matrix_str(&fs::read_to_string(path)?)
}

/// Dense column-major complex array text with 17-significant-digit values.
pub fn format_array_complex(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix array complex general\n");
    out.push_str(&format!("{} {}\n", m.rows(), m.cols()));
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            let v = m.get(i, j);
            out.push_str(&format!("{:.16e} {:.16e}\n", v.re, v.im));
        }
    }
    out
}

pub fn write_array_complex(path: &Path, m: &ComplexMatrix) -> Result<()> {
    fs::write(path, format_array_complex(m))?;
    Ok(())
}

/// Sparse real coordinate text; exact zeros are dropped. The input must be
/// real-valued.
pub fn format_coordinate_real(m: &ComplexMatrix) -> Result<String> {
    if m.imag_residue() != 0.0 {
        return Err(Error::InvalidParam(
            "coordinate real output requires a real-valued matrix".into(),
        ));
    }
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            let v = m.get(i, j).re;
            if v != 0.0 {
                entries.push((i + 1, j + 1, v));
            }
        }
    }
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    out.push_str(&format!("{} {} {}\n", m.rows(), m.cols(), entries.len()));
    for (i, j, v) in entries {
        out.push_str(&format!("{i} {j} {v:.16e}\n"));
    }
    Ok(out)
}

pub fn write_coordinate_real(path: &Path, m: &ComplexMatrix) -> Result<()> {
    fs::write(path, format_coordinate_real(m)?)?;
    Ok(())
}
