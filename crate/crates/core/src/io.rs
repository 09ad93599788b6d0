//! Matrix file formats: Matrix Market (array and coordinate, real /
//! integer / complex, general / symmetric / hermitian) and CSV with the
//! complex token grammar `<re>[±<im>i]`.
//!
//! The writer emits Matrix Market array format with 17 significant digits,
//! which round-trips f64 exactly.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Real, C};
use std::io::{BufRead, BufReader, Read, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    MatrixMarket,
    Csv,
}

/// Guess the format from a file name, falling back to content sniffing
/// (Matrix Market files start with `%%MatrixMarket`).
pub fn detect_format(path: &str, first_bytes: &[u8]) -> Format {
    let lower = path.to_ascii_lowercase();
    if lower.ends_with(".mtx") || lower.ends_with(".mm") {
        Format::MatrixMarket
    } else if lower.ends_with(".csv") {
        Format::Csv
    } else if first_bytes.starts_with(b"%%MatrixMarket") {
        Format::MatrixMarket
    } else {
        Format::Csv
    }
}

pub fn load_matrix<T: Real>(source: impl Read, format: Format) -> Result<Matrix<T>> {
    match format {
        Format::MatrixMarket => load_matrix_market(source),
        Format::Csv => load_csv(source),
    }
}

/// Hermitian detection tolerance for ingested matrices.
const INGEST_HERMITIAN_TOL: f64 = 1e-12;

#[derive(PartialEq, Clone, Copy)]
enum MmLayout {
    Array,
    Coordinate,
}

#[derive(PartialEq, Clone, Copy)]
enum MmField {
    Real,
    Integer,
    Complex,
}

#[derive(PartialEq, Clone, Copy)]
enum MmSymmetry {
    General,
    Symmetric,
    Hermitian,
}

fn load_matrix_market<T: Real>(source: impl Read) -> Result<Matrix<T>> {
    let reader = BufReader::new(source);
    let mut lines = reader.lines().enumerate();

    let (lineno, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty input"))?;
    let header = header?;
    let lineno = lineno + 1;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 5 || toks[0] != "%%MatrixMarket" || toks[1] != "matrix" {
        return Err(Error::parse(
            lineno,
            "header must be '%%MatrixMarket matrix <layout> <field> <symmetry>'",
        ));
    }
    let layout = match toks[2] {
        "array" => MmLayout::Array,
        "coordinate" => MmLayout::Coordinate,
        other => return Err(Error::parse(lineno, format!("unsupported layout '{other}'"))),
    };
    let field = match toks[3] {
        "real" => MmField::Real,
        "integer" => MmField::Integer,
        "complex" => MmField::Complex,
        other => return Err(Error::parse(lineno, format!("unsupported field '{other}'"))),
    };
    let symmetry = match toks[4] {
        "general" => MmSymmetry::General,
        "symmetric" => MmSymmetry::Symmetric,
        "hermitian" => MmSymmetry::Hermitian,
        other => {
            return Err(Error::parse(
                lineno,
                format!("unsupported symmetry '{other}'"),
            ))
        }
    };

    // Skip comments and blanks up to the size line.
    let (lineno, size_line) = loop {
        let (i, line) = lines
            .next()
            .ok_or_else(|| Error::parse(lineno, "missing size line"))?;
        let line = line?;
        let t = line.trim();
        if !t.is_empty() && !t.starts_with('%') {
            break (i + 1, line);
        }
    };

    let dims: Vec<&str> = size_line.split_whitespace().collect();
    let parse_dim = |s: &str, what: &str| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| Error::parse(lineno, format!("cannot parse {what} '{s}'")))
    };

    match layout {
        MmLayout::Array => {
            if dims.len() != 2 {
                return Err(Error::parse(lineno, "array size line must be 'rows cols'"));
            }
            let m = parse_dim(dims[0], "row count")?;
            let n = parse_dim(dims[1], "column count")?;
            if m == 0 || n == 0 {
                return Err(Error::parse(lineno, "dimensions must be positive"));
            }
            if symmetry != MmSymmetry::General && m != n {
                return Err(Error::parse(lineno, "symmetric/hermitian matrices must be square"));
            }
            let mut data = vec![C::new(T::zero(), T::zero()); m * n];
            let mut filled = vec![false; m * n];
            // Column-major entry order per the format; symmetric/hermitian
            // store the lower triangle only.
            let mut coords: Vec<(usize, usize)> = Vec::new();
            for j in 0..n {
                let start = if symmetry == MmSymmetry::General { 0 } else { j };
                for i in start..m {
                    coords.push((i, j));
                }
            }
            let mut next = 0usize;
            for (i, line) in lines {
                let lineno = i + 1;
                let t = line?;
                let t = t.trim();
                if t.is_empty() || t.starts_with('%') {
                    continue;
                }
                let toks: Vec<&str> = t.split_whitespace().collect();
                let value = parse_mm_value::<T>(&toks, field, lineno)?;
                if next >= coords.len() {
                    return Err(Error::parse(lineno, "more entries than the size line declares"));
                }
                let (r, c) = coords[next];
                data[r * n + c] = value;
                filled[r * n + c] = true;
                if symmetry != MmSymmetry::General && r != c {
                    let mirrored = if symmetry == MmSymmetry::Hermitian {
                        value.conj()
                    } else {
                        value
                    };
                    data[c * n + r] = mirrored;
                    filled[c * n + r] = true;
                }
                next += 1;
            }
            if next != coords.len() {
                return Err(Error::parse(
                    0,
                    format!("expected {} entries, found {next}", coords.len()),
                ));
            }
            debug_assert!(filled.iter().all(|&f| f));
            finish_load(m, n, data, symmetry)
        }
        MmLayout::Coordinate => {
            if dims.len() != 3 {
                return Err(Error::parse(lineno, "coordinate size line must be 'rows cols nnz'"));
            }
            let m = parse_dim(dims[0], "row count")?;
            let n = parse_dim(dims[1], "column count")?;
            let nnz = parse_dim(dims[2], "nonzero count")?;
            if m == 0 || n == 0 {
                return Err(Error::parse(lineno, "dimensions must be positive"));
            }
            if symmetry != MmSymmetry::General && m != n {
                return Err(Error::parse(lineno, "symmetric/hermitian matrices must be square"));
            }
            let mut data = vec![C::new(T::zero(), T::zero()); m * n];
            let mut seen = vec![false; m * n];
            let mut count = 0usize;
            for (i, line) in lines {
                let lineno = i + 1;
                let t = line?;
                let t = t.trim();
                if t.is_empty() || t.starts_with('%') {
                    continue;
                }
                let toks: Vec<&str> = t.split_whitespace().collect();
                if toks.len() < 3 {
                    return Err(Error::parse(lineno, "coordinate entry needs 'i j value'"));
                }
                let r: usize = toks[0]
                    .parse()
                    .map_err(|_| Error::parse_at(lineno, 1, "cannot parse row index"))?;
                let c: usize = toks[1]
                    .parse()
                    .map_err(|_| Error::parse_at(lineno, 2, "cannot parse column index"))?;
                if r < 1 || r > m || c < 1 || c > n {
                    return Err(Error::parse(lineno, format!("index ({r},{c}) out of range")));
                }
                let (r, c) = (r - 1, c - 1);
                let value = parse_mm_value::<T>(&toks[2..], field, lineno)?;
                if seen[r * n + c] {
                    return Err(Error::parse(lineno, format!("duplicate entry for ({},{})", r + 1, c + 1)));
                }
                data[r * n + c] = value;
                seen[r * n + c] = true;
                if symmetry != MmSymmetry::General && r != c {
                    let mirrored = if symmetry == MmSymmetry::Hermitian {
                        value.conj()
                    } else {
                        value
                    };
                    if seen[c * n + r] {
                        return Err(Error::parse(lineno, "mirrored entry already specified"));
                    }
                    data[c * n + r] = mirrored;
                    seen[c * n + r] = true;
                }
                count += 1;
            }
            if count != nnz {
                return Err(Error::parse(0, format!("expected {nnz} entries, found {count}")));
            }
            finish_load(m, n, data, symmetry)
        }
    }
}

fn parse_mm_value<T: Real>(toks: &[&str], field: MmField, lineno: usize) -> Result<C<T>> {
    let parse_f = |s: &str, what: &str| -> Result<T> {
        s.parse::<f64>()
            .map(T::of)
            .map_err(|_| Error::parse(lineno, format!("non-numeric {what} token '{s}'")))
    };
    match field {
        MmField::Real | MmField::Integer => {
            if toks.len() != 1 {
                return Err(Error::parse(lineno, "expected one value per entry"));
            }
            Ok(C::new(parse_f(toks[0], "value")?, T::zero()))
        }
        MmField::Complex => {
            if toks.len() != 2 {
                return Err(Error::parse(lineno, "complex entries need 're im'"));
            }
            Ok(C::new(
                parse_f(toks[0], "real part")?,
                parse_f(toks[1], "imaginary part")?,
            ))
        }
    }
}

fn finish_load<T: Real>(
    m: usize,
    n: usize,
    data: Vec<C<T>>,
    symmetry: MmSymmetry,
) -> Result<Matrix<T>> {
    let mat = Matrix::new(m, n, data)?;
    let declared = symmetry != MmSymmetry::General;
    if declared || (m == n && mat.hermitian_within(T::of(INGEST_HERMITIAN_TOL))) {
        mat.with_hermitian_flag(T::of(INGEST_HERMITIAN_TOL))
    } else {
        Ok(mat)
    }
}

fn load_csv<T: Real>(source: impl Read) -> Result<Matrix<T>> {
    let reader = BufReader::new(source);
    let mut rows: Vec<Vec<C<T>>> = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (col, tok) in t.split(',').enumerate() {
            let z = parse_complex_token::<T>(tok.trim())
                .ok_or_else(|| Error::parse_at(lineno, col + 1, format!("bad numeric token '{}'", tok.trim())))?;
            row.push(z);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::parse(
                    lineno,
                    format!("row has {} fields, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(1, "empty CSV input"));
    }
    let m = rows.len();
    let n = rows[0].len();
    let data = rows.into_iter().flatten().collect();
    let mat = Matrix::new(m, n, data)?;
    if m == n && mat.hermitian_within(T::of(INGEST_HERMITIAN_TOL)) {
        mat.with_hermitian_flag(T::of(INGEST_HERMITIAN_TOL))
    } else {
        Ok(mat)
    }
}

/// Parse `<re>[±<im>i]`; also accepts a pure imaginary `<im>i`.
pub fn parse_complex_token<T: Real>(tok: &str) -> Option<C<T>> {
    if tok.is_empty() {
        return None;
    }
    let lower = tok.to_ascii_lowercase();
    if !lower.ends_with('i') {
        return tok.parse::<f64>().ok().map(|x| C::new(T::of(x), T::zero()));
    }
    let body = &lower[..lower.len() - 1];
    // Split at the last +/- that is not the leading sign and not part of an
    // exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let b = bytes[k];
        if (b == b'+' || b == b'-') && bytes[k - 1] != b'e' {
            split = Some(k);
            break;
        }
    }
    match split {
        Some(k) => {
            let re: f64 = body[..k].parse().ok()?;
            let im_str = &body[k..];
            let im: f64 = if im_str == "+" {
                1.0
            } else if im_str == "-" {
                -1.0
            } else {
                im_str.parse().ok()?
            };
            Some(C::new(T::of(re), T::of(im)))
        }
        None => {
            let im: f64 = if body.is_empty() {
                1.0
            } else if body == "-" {
                -1.0
            } else {
                body.parse().ok()?
            };
            Some(C::new(T::zero(), T::of(im)))
        }
    }
}

/// Write Matrix Market array format with 17 significant digits. A set
/// Hermitian flag selects symmetric (real) or hermitian (complex) symmetry
/// with lower-triangle storage.
pub fn write_matrix_market<T: Real>(mat: &Matrix<T>, mut out: impl Write) -> Result<()> {
    let complex = !mat.is_real();
    let field = if complex { "complex" } else { "real" };
    let symmetry = if mat.is_hermitian() {
        if complex {
            "hermitian"
        } else {
            "symmetric"
        }
    } else {
        "general"
    };
    writeln!(out, "%%MatrixMarket matrix array {field} {symmetry}")?;
    writeln!(out, "{} {}", mat.rows(), mat.cols())?;
    let (m, n) = mat.shape();
    for j in 0..n {
        let start = if mat.is_hermitian() { j } else { 0 };
        for i in start..m {
            let z = mat.entry(i, j);
            if complex {
                writeln!(out, "{:.16e} {:.16e}", z.re.to64(), z.im.to64())?;
            } else {
                writeln!(out, "{:.16e}", z.re.to64())?;
            }
        }
    }
    Ok(())
}

/// Read a file as a vector: accepts a 1×n or m×1 matrix in either format.
pub fn load_vector<T: Real>(source: impl Read, format: Format) -> Result<Vec<C<T>>> {
    let m = load_matrix::<T>(source, format)?;
    if m.rows() != 1 && m.cols() != 1 {
        return Err(Error::Dimension(format!(
            "expected a vector (one row or one column), got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(m.entries().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mm_array_is_column_major() {
        let src = "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n";
        let m: Matrix<f64> = load_matrix(src.as_bytes(), Format::MatrixMarket).unwrap();
        // Entries 1 2 3 4 fill column-by-column.
        assert_eq!(m.entry(0, 0).re, 1.0);
        assert_eq!(m.entry(1, 0).re, 2.0);
        assert_eq!(m.entry(0, 1).re, 3.0);
        assert_eq!(m.entry(1, 1).re, 4.0);
    }

    #[test]
    fn csv_basic() {
        let m: Matrix<f64> = load_matrix("1,2\n3,4\n".as_bytes(), Format::Csv).unwrap();
        assert_eq!(m.entry(0, 0).re, 1.0);
        assert_eq!(m.entry(0, 1).re, 2.0);
        assert_eq!(m.entry(1, 0).re, 3.0);
        assert_eq!(m.entry(1, 1).re, 4.0);
    }

    #[test]
    fn csv_complex_tokens() {
        let m: Matrix<f64> = load_matrix("1.5+2i,3\n-1i,2-0.5i\n".as_bytes(), Format::Csv).unwrap();
        assert_eq!(m.entry(0, 0), C::new(1.5, 2.0));
        assert_eq!(m.entry(0, 1), C::new(3.0, 0.0));
        assert_eq!(m.entry(1, 0), C::new(0.0, -1.0));
        assert_eq!(m.entry(1, 1), C::new(2.0, -0.5));
    }

    #[test]
    fn csv_exponent_tokens() {
        let m: Matrix<f64> = load_matrix("1e-3+2e-4i,-5E2\n".as_bytes(), Format::Csv).unwrap();
        assert_eq!(m.entry(0, 0), C::new(1e-3, 2e-4));
        assert_eq!(m.entry(0, 1), C::new(-5e2, 0.0));
    }

    #[test]
    fn csv_bad_token_reports_position() {
        let err = load_matrix::<f64>("1,x\n".as_bytes(), Format::Csv).unwrap_err();
        match err {
            Error::Parse { line, col, .. } => {
                assert_eq!(line, 1);
                assert_eq!(col, Some(2));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn csv_ragged_rows_rejected() {
        assert!(load_matrix::<f64>("1,2\n3\n".as_bytes(), Format::Csv).is_err());
    }

    #[test]
    fn mm_symmetric_expands_lower_triangle() {
        let src = "%%MatrixMarket matrix array real symmetric\n2 2\n1\n5\n2\n";
        let m: Matrix<f64> = load_matrix(src.as_bytes(), Format::MatrixMarket).unwrap();
        assert_eq!(m.entry(0, 1).re, 5.0);
        assert_eq!(m.entry(1, 0).re, 5.0);
        assert!(m.is_hermitian());
    }

    #[test]
    fn mm_hermitian_conjugates_mirror() {
        let src = "%%MatrixMarket matrix coordinate complex hermitian\n2 2 2\n1 1 1 0\n2 1 3 4\n";
        let m: Matrix<f64> = load_matrix(src.as_bytes(), Format::MatrixMarket).unwrap();
        assert_eq!(m.entry(1, 0), C::new(3.0, 4.0));
        assert_eq!(m.entry(0, 1), C::new(3.0, -4.0));
        assert!(m.is_hermitian());
    }

    #[test]
    fn general_square_gets_post_load_hermitian_check() {
        let src = "%%MatrixMarket matrix array real general\n2 2\n1\n7\n7\n2\n";
        let m: Matrix<f64> = load_matrix(src.as_bytes(), Format::MatrixMarket).unwrap();
        assert!(m.is_hermitian());
    }

    #[test]
    fn roundtrip_exact() {
        let m: Matrix<f64> = Matrix::from_fn(3, 4, |i, j| {
            C::new(
                ((i * 7 + j) as f64 / 3.1).sin(),
                ((i + j * 5) as f64).cos() * 1e-7,
            )
        })
        .unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&m, &mut buf).unwrap();
        let m2: Matrix<f64> = load_matrix(buf.as_slice(), Format::MatrixMarket).unwrap();
        assert_eq!(m, m2);
        // And once more through the writer: identical bytes.
        let mut buf2 = Vec::new();
        write_matrix_market(&m2, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn roundtrip_hermitian() {
        let m: Matrix<f64> = Matrix::from_fn(3, 3, |i, j| {
            if i == j {
                C::new(i as f64, 0.0)
            } else {
                C::new(0.3 * (i + j) as f64, (i as f64 - j as f64) * 0.25)
            }
        })
        .unwrap()
        .with_hermitian_flag(0.0)
        .unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&m, &mut buf).unwrap();
        let m2: Matrix<f64> = load_matrix(buf.as_slice(), Format::MatrixMarket).unwrap();
        assert_eq!(m, m2);
        assert!(m2.is_hermitian());
    }

    #[test]
    fn nnz_mismatch_is_parse_error() {
        let src = "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.0\n2 2 2.0\n";
        assert!(load_matrix::<f64>(src.as_bytes(), Format::MatrixMarket).is_err());
    }
}
