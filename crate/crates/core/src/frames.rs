//! 8-bit grayscale frames and PNG directory IO.

use std::fs;
use std::path::{Path, PathBuf};

use image::{GrayImage, ImageReader};

#[derive(Debug, thiserror::Error)]
pub enum FrameError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("frame buffer of {len} bytes does not match {width}x{height}")]
    BadBuffer { width: u32, height: u32, len: usize },
    #[error("no files matching {0}")]
    Empty(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrayFrame {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayFrame {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self, FrameError> {
        if data.len() != width as usize * height as usize || width == 0 || height == 0 {
            return Err(FrameError::BadBuffer { width, height, len: data.len() });
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Self {
        Self { width, height, data: vec![value; width as usize * height as usize] }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn resolution(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[(y * self.width + x) as usize]
    }

    /// Decode any PNG; color and 16-bit images are reduced to 8-bit luma.
    pub fn load(path: &Path) -> Result<Self, FrameError> {
        let img = ImageReader::open(path)
            .map_err(|source| FrameError::Io { path: path.to_path_buf(), source })?
            .decode()
            .map_err(|source| FrameError::Image { path: path.to_path_buf(), source })?
            .into_luma8();
        let (width, height) = img.dimensions();
        Ok(Self { width, height, data: img.into_raw() })
    }

    pub fn save(&self, path: &Path) -> Result<(), FrameError> {
        let img = GrayImage::from_raw(self.width, self.height, self.data.clone()).expect("buffer size checked");
        img.save(path).map_err(|source| FrameError::Image { path: path.to_path_buf(), source })
    }
}

/// `{prefix}_{index:04}.png`, 1-based.
pub fn frame_name(prefix: &str, index: usize) -> String {
    format!("{prefix}_{index:04}.png")
}

/// Indices of files named `{prefix}_NNNN.png` in `dir`, sorted.
pub fn list_indices(dir: &Path, prefix: &str) -> Result<Vec<usize>, FrameError> {
    let io = |source| FrameError::Io { path: dir.to_path_buf(), source };
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let name = entry.map_err(io)?.file_name();
        let Some(name) = name.to_str() else { continue };
        let Some(rest) = name.strip_prefix(prefix).and_then(|r| r.strip_prefix('_')) else { continue };
        let Some(digits) = rest.strip_suffix(".png") else { continue };
        if digits.len() == 4 && digits.bytes().all(|b| b.is_ascii_digit()) {
            out.push(digits.parse().expect("four digits"));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Load `{prefix}_0001.png ..` from `dir`, requiring consecutive indices from 1.
pub fn load_sequence(dir: &Path, prefix: &str) -> Result<Vec<GrayFrame>, FrameError> {
    let indices = list_indices(dir, prefix)?;
    if indices.is_empty() {
        return Err(FrameError::Empty(dir.join(format!("{prefix}_NNNN.png")).display().to_string()));
    }
    (1..=indices.len())
        .map(|i| GrayFrame::load(&dir.join(frame_name(prefix, i))))
        .collect()
}

pub fn save_sequence(frames: &[GrayFrame], dir: &Path, prefix: &str) -> Result<Vec<PathBuf>, FrameError> {
    fs::create_dir_all(dir).map_err(|source| FrameError::Io { path: dir.to_path_buf(), source })?;
    frames
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let path = dir.join(frame_name(prefix, i + 1));
            f.save(&path).map(|_| path)
        })
        .collect()
}
