//! 8-bit RGB images from PNG or binary/ASCII PPM files, detected by
//! content. Rows run top to bottom, pixel `(0, 0)` is the top-left corner.

use std::io::Cursor;
use std::path::Path;

use gaussref_core::image::RgbImage;
use image::{ImageError, ImageFormat, ImageReader};

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;

pub fn load_image(path: &Path) -> Result<RgbImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes, path)
}

pub fn decode_image(bytes: &[u8], path: &Path) -> Result<RgbImage> {
    if bytes.is_empty() {
        return Err(Error::Truncated {
            path: path.to_path_buf(),
        });
    }
    let reader = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| Error::io(path, e))?;
    match reader.format() {
        Some(ImageFormat::Png | ImageFormat::Pnm) => {}
        _ => {
            return Err(Error::UnsupportedImage {
                path: path.to_path_buf(),
            })
        }
    }
    let decoded = reader.decode().map_err(|e| map_error(e, path))?;
    let rgb = decoded.to_rgb8();
    let (w, h) = rgb.dimensions();
    let pixels = rgb.pixels().map(|p| p.0).collect();
    RgbImage::from_pixels(w as usize, h as usize, pixels).ok_or_else(|| Error::Image {
        path: path.to_path_buf(),
        message: "pixel count does not match the image size".into(),
    })
}

fn map_error(e: ImageError, path: &Path) -> Error {
    match e {
        ImageError::Unsupported(_) => Error::UnsupportedImage {
            path: path.to_path_buf(),
        },
        ImageError::IoError(io) if io.kind() == std::io::ErrorKind::UnexpectedEof => Error::Truncated {
            path: path.to_path_buf(),
        },
        other => {
            let message = other.to_string();
            if message.to_ascii_lowercase().contains("eof") || message.contains("end of") {
                Error::Truncated {
                    path: path.to_path_buf(),
                }
            } else {
                Error::Image {
                    path: path.to_path_buf(),
                    message,
                }
            }
        }
    }
}

/// PNG bytes of an image.
pub fn encode_png(image: &RgbImage, path: &Path) -> Result<Vec<u8>> {
    let flat: Vec<u8> = image.pixels().iter().flatten().copied().collect();
    let buffer =
        image::RgbImage::from_raw(image.width() as u32, image.height() as u32, flat).ok_or_else(|| Error::Image {
            path: path.to_path_buf(),
            message: "pixel count does not match the image size".into(),
        })?;
    let mut out = Cursor::new(Vec::new());
    buffer
        .write_to(&mut out, ImageFormat::Png)
        .map_err(|e| map_error(e, path))?;
    Ok(out.into_inner())
}

pub fn save_png(image: &RgbImage, path: &Path) -> Result<()> {
    write_atomic(path, &encode_png(image, path)?)
}
