//! Binary PGM (P5) and PPM (P6) raster I/O with maxval 255.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{BinaryMask, Image};
use crate::{Error, Result};

fn header_tokens(bytes: &[u8]) -> Result<(Vec<String>, usize)> {
    let mut tokens = Vec::new();
    let mut i = 0;
    while tokens.len() < 4 {
        if i >= bytes.len() {
            return Err(Error::format("pnm", "truncated header"));
        }
        let c = bytes[i];
        if c == b'#' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else {
            let start = i;
            while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'#' {
                i += 1;
            }
            tokens.push(String::from_utf8_lossy(&bytes[start..i]).into_owned());
        }
    }
    // Exactly one whitespace byte separates the header from the samples.
    if i >= bytes.len() || !bytes[i].is_ascii_whitespace() {
        return Err(Error::format("pnm", "missing separator after header"));
    }
    Ok((tokens, i + 1))
}

/// Decodes a P5 or P6 byte stream.
pub fn decode(bytes: &[u8]) -> Result<Image> {
    let (tokens, offset) = header_tokens(bytes)?;
    let channels = match tokens[0].as_str() {
        "P5" => 1,
        "P6" => 3,
        other => return Err(Error::format("pnm", format!("unsupported magic {other:?}"))),
    };
    let parse = |s: &str, what: &str| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| Error::format("pnm", format!("bad {what} {s:?}")))
    };
    let width = parse(&tokens[1], "width")?;
    let height = parse(&tokens[2], "height")?;
    let maxval = parse(&tokens[3], "maxval")?;
    if maxval != 255 {
        return Err(Error::format("pnm", format!("maxval {maxval} unsupported")));
    }
    if width == 0 || height == 0 {
        return Err(Error::format("pnm", "zero-sized raster"));
    }
    let len = width * height * channels;
    let data = bytes
        .get(offset..offset + len)
        .ok_or_else(|| Error::format("pnm", "truncated sample data"))?;
    Image::from_raw(width, height, channels, data.to_vec())
}

pub fn encode(img: &Image) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

pub fn read_image(path: impl AsRef<Path>) -> Result<Image> {
    decode(&fs::read(path)?)
}

pub fn write_image(path: impl AsRef<Path>, img: &Image) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode(img))?;
    Ok(())
}

/// Reads a mask; any nonzero sample is foreground.
pub fn read_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    Ok(BinaryMask::from_image(&read_image(path)?))
}

/// Writes a mask as P5 with 0 = background, 255 = foreground.
pub fn write_mask(path: impl AsRef<Path>, mask: &BinaryMask) -> Result<()> {
    write_image(path, &mask.to_image())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_with_comment() {
        let mut bytes = b"P5\n# made by hand\n3 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 255, 10, 20, 30, 40]);
        let img = decode(&bytes).unwrap();
        assert_eq!(img.dims(), (3, 2));
        assert_eq!(img.pixel(1, 0), &[255]);
    }

    #[test]
    fn rgb_round_trip() {
        let mut img = Image::new(4, 3, 3);
        img.pixel_mut(2, 1).copy_from_slice(&[1, 2, 3]);
        assert_eq!(decode(&encode(&img)).unwrap(), img);
    }

    #[test]
    fn rejects_truncated_and_foreign_formats() {
        assert!(decode(b"P5\n4 4\n255\n\x00\x01").is_err());
        assert!(decode(b"P2\n1 1\n255\n0").is_err());
        assert!(decode(b"P5\n1 1\n65535\n\x00\x00").is_err());
        assert!(decode(b"").is_err());
    }

    #[test]
    fn mask_encoding_is_0_and_255() {
        let m = BinaryMask::from_ascii(&["#.", ".#"]);
        let bytes = encode(&m.to_image());
        assert!(bytes.ends_with(&[255, 0, 0, 255]));
        assert_eq!(BinaryMask::from_image(&decode(&bytes).unwrap()), m);
    }
}
