//! File formats: MT3D tensors, MMAT1 transform matrices, and binary
//! PPM/PGM images.
//!
//! MT3D is an ASCII header `MTEN1\n<m> <n> <p> <0|1>\n` (trailing flag: 1
//! for complex payload) followed by little-endian IEEE-754 doubles,
//! slice-major and row-major within each slice, complex entries
//! interleaved (re, im). Transform files use the `MMAT1` magic, carry
//! `<p> <p> <p>` in the header, and store the single `p x p` matrix
//! row-major.

use std::fs;
use std::io::{Read as _, Write as _};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tensor::Tensor3;
use crate::transform::Transform;

const TENSOR_MAGIC: &str = "MTEN1";
const TRANSFORM_MAGIC: &str = "MMAT1";

fn parse_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        message: message.into(),
    }
}

/// Reads bytes up to and including the next `\n`, returned without it.
fn read_line(bytes: &[u8], pos: &mut usize, path: &Path) -> Result<String> {
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos] != b'\n' {
        *pos += 1;
    }
    if *pos == bytes.len() {
        return Err(parse_err(path, "unterminated header line"));
    }
    let line = std::str::from_utf8(&bytes[start..*pos])
        .map_err(|_| parse_err(path, "header is not valid UTF-8"))?
        .to_string();
    *pos += 1;
    Ok(line)
}

struct Header {
    m: usize,
    n: usize,
    p: usize,
    complex: bool,
    payload_start: usize,
}

fn read_header(bytes: &[u8], magic: &str, path: &Path) -> Result<Header> {
    let mut pos = 0;
    let got = read_line(bytes, &mut pos, path)?;
    if got != magic {
        return Err(parse_err(path, format!("bad magic {got:?}, expected {magic:?}")));
    }
    let dims = read_line(bytes, &mut pos, path)?;
    let fields: Vec<&str> = dims.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(parse_err(
            path,
            format!("header needs 4 fields (m n p flag), got {}", fields.len()),
        ));
    }
    let parse_dim = |name: &str, s: &str| -> Result<usize> {
        let v: usize = s
            .parse()
            .map_err(|_| parse_err(path, format!("field {name} is not an integer: {s:?}")))?;
        if v == 0 {
            return Err(parse_err(path, format!("field {name} must be positive")));
        }
        Ok(v)
    };
    let m = parse_dim("m", fields[0])?;
    let n = parse_dim("n", fields[1])?;
    let p = parse_dim("p", fields[2])?;
    let complex = match fields[3] {
        "0" => false,
        "1" => true,
        other => {
            return Err(parse_err(
                path,
                format!("field flag must be 0 or 1, got {other:?}"),
            ))
        }
    };
    Ok(Header {
        m,
        n,
        p,
        complex,
        payload_start: pos,
    })
}

fn read_payload(
    bytes: &[u8],
    start: usize,
    count: usize,
    complex: bool,
    path: &Path,
) -> Result<Vec<Complex64>> {
    let per_entry = if complex { 16 } else { 8 };
    let expected = count * per_entry;
    let payload = &bytes[start..];
    if payload.len() != expected {
        return Err(parse_err(
            path,
            format!("payload is {} bytes, expected {expected}", payload.len()),
        ));
    }
    let mut out = Vec::with_capacity(count);
    let f64_at = |off: usize| f64::from_le_bytes(payload[off..off + 8].try_into().unwrap());
    for idx in 0..count {
        let off = idx * per_entry;
        let re = f64_at(off);
        let im = if complex { f64_at(off + 8) } else { 0.0 };
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

fn write_payload(out: &mut Vec<u8>, entries: &[Complex64], complex: bool) {
    for v in entries {
        out.extend_from_slice(&v.re.to_le_bytes());
        if complex {
            out.extend_from_slice(&v.im.to_le_bytes());
        }
    }
}

fn has_imaginary(entries: &[Complex64]) -> bool {
    entries.iter().any(|v| v.im != 0.0)
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor3> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    let h = read_header(&bytes, TENSOR_MAGIC, path)?;
    let data = read_payload(&bytes, h.payload_start, h.m * h.n * h.p, h.complex, path)?;
    Tensor3::from_data(h.m, h.n, h.p, data)
}

/// Writes MT3D; the complex flag is set iff any entry has a nonzero
/// imaginary part.
pub fn write_tensor(path: impl AsRef<Path>, t: &Tensor3) -> Result<()> {
    let (m, n, p) = t.dims();
    let complex = has_imaginary(t.data());
    let mut out = format!("{TENSOR_MAGIC}\n{m} {n} {p} {}\n", complex as u8).into_bytes();
    write_payload(&mut out, t.data(), complex);
    fs::write(path, out)?;
    Ok(())
}

pub fn read_transform(path: impl AsRef<Path>) -> Result<Transform> {
    let path = path.as_ref();
    let bytes = fs::read(path)?;
    let h = read_header(&bytes, TRANSFORM_MAGIC, path)?;
    if h.m != h.n || h.n != h.p {
        return Err(parse_err(
            path,
            format!("transform header dims must agree, got {} {} {}", h.m, h.n, h.p),
        ));
    }
    let data = read_payload(&bytes, h.payload_start, h.p * h.p, h.complex, path)?;
    let mat = DMatrix::from_fn(h.p, h.p, |i, j| data[i * h.p + j]);
    Transform::new(mat)
}

pub fn write_transform(path: impl AsRef<Path>, t: &Transform) -> Result<()> {
    let p = t.order();
    let mat = t.matrix();
    let entries: Vec<Complex64> = (0..p)
        .flat_map(|i| (0..p).map(move |j| mat[(i, j)]))
        .collect();
    let complex = has_imaginary(&entries);
    let mut out = format!("{TRANSFORM_MAGIC}\n{p} {p} {p} {}\n", complex as u8).into_bytes();
    write_payload(&mut out, &entries, complex);
    fs::write(path, out)?;
    Ok(())
}

/// 8-bit image with interleaved channels, maxval 255.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
    pub data: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<u8>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::InvalidParameter(format!(
                "image must have 1 or 3 channels, got {channels}"
            )));
        }
        if data.len() != width * height * channels {
            return Err(Error::InvalidParameter(format!(
                "image data length {} != {width}x{height}x{channels}",
                data.len()
            )));
        }
        Ok(Image {
            width,
            height,
            channels,
            data,
        })
    }

    pub fn pixel(&self, x: usize, y: usize, c: usize) -> u8 {
        self.data[(y * self.width + x) * self.channels + c]
    }
}

/// Reads one whitespace-delimited token, skipping `#` comments.
fn read_pnm_token(reader: &mut impl std::io::Read, path: &Path) -> Result<String> {
    let mut tok = String::new();
    let mut in_comment = false;
    loop {
        let mut byte = [0u8; 1];
        let n = reader.read(&mut byte)?;
        if n == 0 {
            if tok.is_empty() {
                return Err(parse_err(path, "unexpected end of header"));
            }
            return Ok(tok);
        }
        let ch = byte[0];
        if in_comment {
            if ch == b'\n' {
                in_comment = false;
            }
            continue;
        }
        match ch {
            b'#' => in_comment = true,
            b' ' | b'\t' | b'\r' | b'\n' => {
                if !tok.is_empty() {
                    return Ok(tok);
                }
            }
            _ => tok.push(ch as char),
        }
    }
}

/// Reads a binary PPM (P6) or PGM (P5) with maxval 255.
pub fn read_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let mut file = std::io::BufReader::new(fs::File::open(path)?);
    let magic = read_pnm_token(&mut file, path)?;
    let channels = match magic.as_str() {
        "P6" => 3,
        "P5" => 1,
        other => {
            return Err(parse_err(
                path,
                format!("unsupported image magic {other:?}, need binary P5 or P6"),
            ))
        }
    };
    let dim = |name: &str, tok: String| -> Result<usize> {
        let v: usize = tok
            .parse()
            .map_err(|_| parse_err(path, format!("field {name} is not an integer: {tok:?}")))?;
        if v == 0 {
            return Err(parse_err(path, format!("field {name} must be positive")));
        }
        Ok(v)
    };
    let width = dim("width", read_pnm_token(&mut file, path)?)?;
    let height = dim("height", read_pnm_token(&mut file, path)?)?;
    let maxval = dim("maxval", read_pnm_token(&mut file, path)?)?;
    if maxval != 255 {
        return Err(parse_err(
            path,
            format!("field maxval must be 255, got {maxval}"),
        ));
    }
    let mut data = vec![0u8; width * height * channels];
    file.read_exact(&mut data)
        .map_err(|_| parse_err(path, "pixel payload is truncated"))?;
    let mut extra = [0u8; 1];
    if file.read(&mut extra)? != 0 {
        return Err(parse_err(path, "trailing bytes after pixel payload"));
    }
    Image::new(width, height, channels, data)
}

/// Writes P6 for 3-channel images and P5 for single-channel.
pub fn write_image(path: impl AsRef<Path>, img: &Image) -> Result<()> {
    let magic = if img.channels == 3 { "P6" } else { "P5" };
    let mut out = std::io::BufWriter::new(fs::File::create(path)?);
    write!(out, "{magic}\n{} {}\n255\n", img.width, img.height)?;
    out.write_all(&img.data)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use proptest::prelude::*;

    #[test]
    fn tensor_round_trip_real() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.mt3d");
        let mut rng = random::rng(1);
        let t = random::random_real_tensor(&mut rng, 3, 4, 2);
        write_tensor(&path, &t).unwrap();
        let back = read_tensor(&path).unwrap();
        assert_eq!(t, back);
        // real payload: header "MTEN1\n3 4 2 0\n" + 24 doubles
        let bytes = fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"MTEN1\n3 4 2 0\n"));
        assert_eq!(bytes.len(), 14 + 24 * 8);
    }

    #[test]
    fn tensor_round_trip_complex() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.mt3d");
        let mut rng = random::rng(2);
        let t = random::random_tensor(&mut rng, 2, 2, 3);
        write_tensor(&path, &t).unwrap();
        assert_eq!(read_tensor(&path).unwrap(), t);
        let bytes = fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"MTEN1\n2 2 3 1\n"));
        assert_eq!(bytes.len(), 14 + 12 * 16);
    }

    #[test]
    fn tensor_layout_is_slice_major_row_major() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.mt3d");
        let mut t = Tensor3::zeros(2, 3, 2);
        t[(1, 2, 0)] = Complex64::new(7.0, 0.0);
        t[(0, 1, 1)] = Complex64::new(9.0, 0.0);
        write_tensor(&path, &t).unwrap();
        let bytes = fs::read(&path).unwrap();
        let header = b"MTEN1\n2 3 2 0\n".len();
        let entry = |idx: usize| {
            f64::from_le_bytes(bytes[header + idx * 8..header + idx * 8 + 8].try_into().unwrap())
        };
        // (1,2,0) -> 0*6 + 1*3 + 2 = 5; (0,1,1) -> 1*6 + 0*3 + 1 = 7
        assert_eq!(entry(5), 7.0);
        assert_eq!(entry(7), 9.0);
    }

    #[test]
    fn tensor_rejects_bad_magic_and_sizes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.mt3d");

        fs::write(&path, b"MTENX\n1 1 1 0\n12345678").unwrap();
        assert!(matches!(read_tensor(&path), Err(Error::Parse { .. })));

        fs::write(&path, b"MTEN1\n1 1 0 0\n").unwrap();
        assert!(matches!(read_tensor(&path), Err(Error::Parse { .. })));

        fs::write(&path, b"MTEN1\n1 1 1 2\n12345678").unwrap();
        assert!(matches!(read_tensor(&path), Err(Error::Parse { .. })));

        // truncated and oversized payloads
        fs::write(&path, b"MTEN1\n1 1 1 0\n1234").unwrap();
        assert!(matches!(read_tensor(&path), Err(Error::Parse { .. })));
        fs::write(&path, b"MTEN1\n1 1 1 0\n123456789").unwrap();
        assert!(matches!(read_tensor(&path), Err(Error::Parse { .. })));
    }

    #[test]
    fn parse_error_names_offending_field() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.mt3d");
        fs::write(&path, b"MTEN1\n1 x 1 0\n12345678").unwrap();
        let msg = read_tensor(&path).unwrap_err().to_string();
        assert!(msg.contains("field n"), "message was: {msg}");
    }

    #[test]
    fn transform_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.mmat");
        let mut rng = random::rng(3);
        let t = random::random_transform(&mut rng, 3);
        write_transform(&path, &t).unwrap();
        let back = read_transform(&path).unwrap();
        assert_eq!(t.matrix(), back.matrix());
        let bytes = fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"MMAT1\n3 3 3 "));
    }

    #[test]
    fn transform_file_rejects_singular_matrix() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.mmat");
        let mut out = b"MMAT1\n2 2 2 0\n".to_vec();
        for v in [1.0f64, 2.0, 2.0, 4.0] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        fs::write(&path, out).unwrap();
        assert!(matches!(
            read_transform(&path),
            Err(Error::SingularTransform { .. })
        ));
    }

    #[test]
    fn tensor_magic_not_accepted_as_transform() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.mmat");
        let t = Transform::identity(2);
        write_transform(&path, &t).unwrap();
        assert!(matches!(read_tensor(&path), Err(Error::Parse { .. })));
    }

    #[test]
    fn ppm_round_trip_with_comment() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.ppm");
        let img = Image::new(2, 2, 3, (0..12u8).collect()).unwrap();
        write_image(&path, &img).unwrap();
        assert_eq!(read_image(&path).unwrap(), img);

        // comments anywhere in the header are skipped
        let mut bytes = b"P6\n# test image\n2 2\n# another\n255\n".to_vec();
        bytes.extend_from_slice(&img.data);
        fs::write(&path, bytes).unwrap();
        assert_eq!(read_image(&path).unwrap(), img);
    }

    #[test]
    fn pgm_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.pgm");
        let img = Image::new(3, 2, 1, vec![0, 64, 128, 192, 255, 7]).unwrap();
        write_image(&path, &img).unwrap();
        let back = read_image(&path).unwrap();
        assert_eq!(back, img);
        assert_eq!(back.pixel(1, 1, 0), 255);
    }

    #[test]
    fn image_rejects_malformed_headers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.ppm");

        fs::write(&path, b"P3\n2 2\n255\n").unwrap();
        assert!(matches!(read_image(&path), Err(Error::Parse { .. })));

        fs::write(&path, b"P6\n2 2\n65535\n").unwrap();
        assert!(matches!(read_image(&path), Err(Error::Parse { .. })));

        let mut short = b"P6\n2 2\n255\n".to_vec();
        short.extend_from_slice(&[0u8; 5]);
        fs::write(&path, short).unwrap();
        assert!(matches!(read_image(&path), Err(Error::Parse { .. })));
    }

    proptest! {
        #[test]
        fn tensor_file_round_trip(
            m in 1usize..5,
            n in 1usize..5,
            p in 1usize..4,
            seed in 0u64..1000,
            complex in proptest::bool::ANY,
        ) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("t.mt3d");
            let mut rng = random::rng(seed);
            let t = if complex {
                random::random_tensor(&mut rng, m, n, p)
            } else {
                random::random_real_tensor(&mut rng, m, n, p)
            };
            write_tensor(&path, &t).unwrap();
            prop_assert_eq!(read_tensor(&path).unwrap(), t);
        }
    }
}
