//! 8-bit grayscale PNG / binary PGM reading and writing.

use std::fs;
use std::io::Cursor;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::image::{Image, Volume};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Png,
    Pgm,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Format> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "png" => Some(Format::Png),
            "pgm" => Some(Format::Pgm),
            _ => None,
        }
    }
}

/// Quantizes an intensity to a byte: clamp to `[0, 1]`, scale by 255, round half up.
#[inline]
pub fn to_byte(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

#[inline]
pub fn from_byte(b: u8) -> f64 {
    b as f64 / 255.0
}

pub fn image_from_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Image> {
    Image::new(width, height, bytes.iter().copied().map(from_byte).collect())
}

pub fn image_to_bytes(img: &Image) -> Vec<u8> {
    img.data().iter().copied().map(to_byte).collect()
}

fn decode_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Decode {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn write_err(path: &Path, reason: impl ToString) -> Error {
    Error::Write {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

/// Reads an 8-bit grayscale PNG or P5 PGM; the format is sniffed from the magic bytes.
pub fn load_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| decode_err(path, e.to_string()))?;
    if bytes.starts_with(b"\x89PNG") {
        decode_png(path, &bytes)
    } else if bytes.starts_with(b"P5") {
        decode_pgm(path, &bytes)
    } else {
        Err(decode_err(path, "not a PNG or binary PGM file"))
    }
}

fn decode_png(path: &Path, bytes: &[u8]) -> Result<Image> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(|e| decode_err(path, e.to_string()))?;
    let (color, depth) = {
        let info = reader.info();
        (info.color_type, info.bit_depth)
    };
    if color != png::ColorType::Grayscale || depth != png::BitDepth::Eight {
        return Err(decode_err(
            path,
            format!("unsupported PNG layout {color:?}/{depth:?}, need 8-bit grayscale"),
        ));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| decode_err(path, "image too large"))?;
    let mut buf = vec![0u8; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| decode_err(path, e.to_string()))?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let stride = frame.line_size;
    let mut packed = Vec::with_capacity(w * h);
    for row in buf[..frame.buffer_size()].chunks(stride).take(h) {
        packed.extend_from_slice(&row[..w]);
    }
    image_from_bytes(w, h, &packed).map_err(|e| decode_err(path, e.to_string()))
}

fn decode_pgm(path: &Path, bytes: &[u8]) -> Result<Image> {
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and '#' comments may separate header tokens
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| decode_err(path, "malformed PGM header"))?;
    }
    let [w, h, maxval] = fields;
    if maxval != 255 {
        return Err(decode_err(path, format!("unsupported PGM maxval {maxval}, need 255")));
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(decode_err(path, "malformed PGM header"));
    }
    pos += 1;
    let pixels = bytes
        .get(pos..pos + w * h)
        .ok_or_else(|| decode_err(path, "truncated PGM pixel data"))?;
    image_from_bytes(w, h, pixels).map_err(|e| decode_err(path, e.to_string()))
}

pub fn encode_png(img: &Image) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut encoder = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder.write_header().map_err(|e| Error::InvalidImage(e.to_string()))?;
        writer
            .write_image_data(&image_to_bytes(img))
            .map_err(|e| Error::InvalidImage(e.to_string()))?;
    }
    Ok(out)
}

pub fn encode_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(image_to_bytes(img));
    out
}

/// Writes `img` as PNG or PGM according to the file extension.
pub fn save_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = match Format::from_path(path) {
        Some(Format::Png) => encode_png(img).map_err(|e| write_err(path, e))?,
        Some(Format::Pgm) => encode_pgm(img),
        None => return Err(write_err(path, "extension must be .png or .pgm")),
    };
    fs::write(path, bytes).map_err(|e| write_err(path, e))
}

/// Supported image files in `dir`, sorted by file name.
pub fn slice_files(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let entries = fs::read_dir(dir).map_err(|e| Error::Volume(format!("cannot read {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && Format::from_path(p).is_some())
        .collect();
    files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    Ok(files)
}

/// Loads every slice of `dir` in file-name order, returning the names alongside.
pub fn load_volume_named(dir: impl AsRef<Path>) -> Result<(Volume, Vec<String>)> {
    let dir = dir.as_ref();
    let files = slice_files(dir)?;
    if files.is_empty() {
        return Err(Error::Volume(format!("no PNG/PGM slices in {}", dir.display())));
    }
    let mut slices = Vec::with_capacity(files.len());
    let mut names = Vec::with_capacity(files.len());
    for f in &files {
        slices.push(load_image(f)?);
        names.push(f.file_name().unwrap().to_string_lossy().into_owned());
    }
    let dims = slices[0].dims();
    let offenders: Vec<String> = names
        .iter()
        .zip(&slices)
        .filter(|(_, s)| s.dims() != dims)
        .map(|(n, s)| format!("{n} ({}x{})", s.width(), s.height()))
        .collect();
    if !offenders.is_empty() {
        return Err(Error::Volume(format!(
            "slices must all be {}x{} like {}; offenders: {}",
            dims.0,
            dims.1,
            names[0],
            offenders.join(", ")
        )));
    }
    let subject = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "subject".to_string());
    Ok((Volume::new(subject, slices)?, names))
}

pub fn load_volume(dir: impl AsRef<Path>) -> Result<Volume> {
    load_volume_named(dir).map(|(v, _)| v)
}

/// Writes each slice of `vol` into `dir` under the matching name in `names`.
pub fn save_volume(vol: &Volume, dir: impl AsRef<Path>, names: &[String]) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    if names.len() != vol.len() {
        return Err(Error::Shape(format!("{} names for {} slices", names.len(), vol.len())));
    }
    fs::create_dir_all(dir).map_err(|e| write_err(dir, e))?;
    vol.slices()
        .iter()
        .zip(names)
        .map(|(s, n)| {
            let p = dir.join(n);
            save_image(s, &p).map(|_| p)
        })
        .collect()
}

/// Zero-padded slice names `000.png`, `001.png`, ...
pub fn numbered_names(count: usize, ext: &str) -> Vec<String> {
    let digits = count.saturating_sub(1).max(1).to_string().len().max(3);
    (0..count).map(|i| format!("{i:0digits$}.{ext}")).collect()
}
