//! Deterministic scatter rendering to PNG.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use image::{ImageEncoder, RgbImage};
use rayon::prelude::*;
use thiserror::Error;

use crate::periods::PlotPoint;

const BAND_ROWS: usize = 32;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("cannot fit a view box to an empty point set")]
    EmptyPointSet,
    #[error("image must be at least 64x64, got {0}x{1}")]
    TooSmall(u32, u32),
    #[error("palette must contain at least one color")]
    EmptyPalette,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Image(#[from] image::ImageError),
}

pub type Result<T> = std::result::Result<T, RenderError>;

pub type Rgb = [u8; 3];

/// Color used for every point when the color modulus is 1.
pub const SINGLE_COLOR: Rgb = [0x1f, 0x77, 0xb4];

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> Rgb {
    let h6 = (h.rem_euclid(1.0)) * 6.0;
    let i = h6.floor();
    let f = h6 - i;
    let (p, q, t) = (v * (1.0 - s), v * (1.0 - s * f), v * (1.0 - s * (1.0 - f)));
    let (r, g, b) = match i as u32 % 6 {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [r, g, b].map(|x| (x * 255.0).round() as u8)
}

/// Hue `(index mod c)/c` on the HSV wheel at saturation 0.75 and value 0.9.
pub fn palette_color(index: u64, c: u64) -> Rgb {
    if c <= 1 {
        return SINGLE_COLOR;
    }
    hsv_to_rgb((index % c) as f64 / c as f64, 0.75, 0.9)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderStyle {
    pub width: u32,
    pub height: u32,
    /// Fraction of each side left blank.
    pub margin: f64,
    pub palette: Vec<Rgb>,
    /// Disc radius in pixels for a point of size 1.
    pub point_radius: f64,
    pub background: Rgb,
    pub axis_equal: bool,
}

impl RenderStyle {
    pub fn new(width: u32, height: u32, color_modulus: u64) -> Self {
        Self {
            width,
            height,
            margin: 0.04,
            palette: (0..color_modulus.max(1))
                .map(|k| palette_color(k, color_modulus))
                .collect(),
            point_radius: 1.0,
            background: [255, 255, 255],
            axis_equal: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.width < 64 || self.height < 64 {
            return Err(RenderError::TooSmall(self.width, self.height));
        }
        if self.palette.is_empty() {
            return Err(RenderError::EmptyPalette);
        }
        Ok(())
    }
}

impl Default for RenderStyle {
    fn default() -> Self {
        Self::new(1024, 1024, 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ViewBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

fn padded(lo: f64, hi: f64, pad: f64) -> (f64, f64) {
    let extent = hi - lo;
    if extent <= 0.0 || !extent.is_finite() {
        let mid = (lo + hi) / 2.0;
        (mid - 0.5, mid + 0.5)
    } else {
        (lo - pad * extent, hi + pad * extent)
    }
}

/// Bounding box of the values, each side pushed out by `pad` times its extent.
/// An axis with zero extent becomes a unit interval around the common value.
pub fn auto_viewbox(points: &[PlotPoint], pad: f64) -> Result<ViewBox> {
    let finite = points.iter().map(|p| p.value).filter(|v| v.re.is_finite() && v.im.is_finite());
    let mut bounds: Option<(f64, f64, f64, f64)> = None;
    for v in finite {
        bounds = Some(match bounds {
            None => (v.re, v.re, v.im, v.im),
            Some((a, b, c, d)) => (a.min(v.re), b.max(v.re), c.min(v.im), d.max(v.im)),
        });
    }
    let (r0, r1, i0, i1) = bounds.ok_or(RenderError::EmptyPointSet)?;
    let (re_min, re_max) = padded(r0, r1, pad);
    let (im_min, im_max) = padded(i0, i1, pad);
    Ok(ViewBox {
        re_min,
        re_max,
        im_min,
        im_max,
    })
}

// Affine map from the complex plane into pixel coordinates.
struct Transform {
    x0: f64,
    y0: f64,
    sx: f64,
    sy: f64,
    re_min: f64,
    im_max: f64,
}

impl Transform {
    fn new(style: &RenderStyle, vb: &ViewBox) -> Self {
        let (w, h) = (style.width as f64, style.height as f64);
        let (mx, my) = (style.margin * w, style.margin * h);
        let (dw, dh) = (w - 2.0 * mx, h - 2.0 * my);
        let (mut re_min, mut re_max, mut im_min, mut im_max) =
            (vb.re_min, vb.re_max, vb.im_min, vb.im_max);
        if style.axis_equal {
            let scale = ((re_max - re_min) / dw).max((im_max - im_min) / dh);
            let (cr, ci) = ((re_min + re_max) / 2.0, (im_min + im_max) / 2.0);
            re_min = cr - scale * dw / 2.0;
            re_max = cr + scale * dw / 2.0;
            im_min = ci - scale * dh / 2.0;
            im_max = ci + scale * dh / 2.0;
        }
        Self {
            x0: mx,
            y0: my,
            sx: dw / (re_max - re_min),
            sy: dh / (im_max - im_min),
            re_min,
            im_max,
        }
    }

    fn map(&self, re: f64, im: f64) -> (f64, f64) {
        (
            self.x0 + (re - self.re_min) * self.sx,
            self.y0 + (self.im_max - im) * self.sy,
        )
    }
}

struct Disc {
    cx: f64,
    cy: f64,
    r: f64,
    color: Rgb,
}

fn discs(points: &[PlotPoint], style: &RenderStyle, t: &Transform) -> Vec<Disc> {
    points
        .iter()
        .filter(|p| p.value.re.is_finite() && p.value.im.is_finite())
        .map(|p| {
            let (cx, cy) = t.map(p.value.re, p.value.im);
            Disc {
                cx,
                cy,
                r: style.point_radius * p.size.max(0.0),
                color: style.palette[(p.color % style.palette.len() as u64) as usize],
            }
        })
        .collect()
}

fn blend(dst: &mut [u8], color: Rgb, coverage: f64) {
    for (d, &c) in dst.iter_mut().zip(&color) {
        let v = *d as f64 * (1.0 - coverage) + c as f64 * coverage;
        *d = v.round().clamp(0.0, 255.0) as u8;
    }
}

// Draw into a band of rows `y0..y0 + rows` stored in `buf`.
fn draw_band(buf: &mut [u8], y0: usize, width: usize, discs: &[Disc]) {
    let rows = buf.len() / (3 * width);
    let (top, bottom) = (y0 as f64, (y0 + rows) as f64);
    for d in discs {
        let reach = d.r + 1.0;
        if d.cy + reach < top || d.cy - reach > bottom {
            continue;
        }
        let ylo = ((d.cy - reach).floor().max(top)) as usize;
        let yhi = ((d.cy + reach).ceil().min(bottom - 1.0)).max(ylo as f64) as usize;
        let xlo = (d.cx - reach).floor().max(0.0);
        let xhi = (d.cx + reach).ceil().min(width as f64 - 1.0);
        if xhi < xlo {
            continue;
        }
        for y in ylo..=yhi {
            if y < y0 || y >= y0 + rows {
                continue;
            }
            for x in xlo as usize..=xhi as usize {
                let dx = x as f64 + 0.5 - d.cx;
                let dy = y as f64 + 0.5 - d.cy;
                let cov = (d.r + 0.5 - (dx * dx + dy * dy).sqrt()).clamp(0.0, 1.0);
                if cov > 0.0 {
                    let at = ((y - y0) * width + x) * 3;
                    blend(&mut buf[at..at + 3], d.color, cov);
                }
            }
        }
    }
}

fn draw(canvas: &mut RgbImage, discs: &[Disc]) {
    let width = canvas.width() as usize;
    let raw: &mut [u8] = canvas;
    raw.par_chunks_mut(BAND_ROWS * width * 3)
        .enumerate()
        .for_each(|(i, band)| draw_band(band, i * BAND_ROWS, width, discs));
}

/// Filled anti-aliased discs drawn in input order over the background.
pub fn render_scatter(points: &[PlotPoint], style: &RenderStyle, viewbox: &ViewBox) -> Result<RgbImage> {
    style.validate()?;
    let mut canvas = RgbImage::from_pixel(style.width, style.height, image::Rgb(style.background));
    let t = Transform::new(style, viewbox);
    draw(&mut canvas, &discs(points, style, &t));
    Ok(canvas)
}

pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    image::codecs::png::PngEncoder::new(&mut out).write_image(
        img.as_raw(),
        img.width(),
        img.height(),
        image::ExtendedColorType::Rgb8,
    )?;
    Ok(out)
}

pub fn write_png(img: &RgbImage, path: &Path) -> Result<()> {
    fs::write(path, encode_png(img)?)?;
    Ok(())
}

/// `frame_00001.png`, … where frame `e` shows batches `1..=e`, all against
/// one view box.
pub fn write_frames(
    points: &[PlotPoint],
    batches: &[(usize, usize)],
    style: &RenderStyle,
    viewbox: &ViewBox,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    style.validate()?;
    fs::create_dir_all(dir)?;
    let t = Transform::new(style, viewbox);
    let mut canvas = RgbImage::from_pixel(style.width, style.height, image::Rgb(style.background));
    let mut paths = Vec::with_capacity(batches.len());
    for (e, &(start, end)) in batches.iter().enumerate() {
        draw(&mut canvas, &discs(&points[start..end], style, &t));
        let path = dir.join(format!("frame_{:05}.png", e + 1));
        write_png(&canvas, &path)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn pt(re: f64, im: f64, color: u64) -> PlotPoint {
        PlotPoint::new(&[0], Complex64::new(re, im), color)
    }

    #[test]
    fn viewbox_examples() {
        let vb = auto_viewbox(&[pt(0.0, 0.0, 0)], 0.1).unwrap();
        assert_eq!((vb.re_min, vb.re_max, vb.im_min, vb.im_max), (-0.5, 0.5, -0.5, 0.5));
        let vb = auto_viewbox(&[pt(-2.0, 0.0, 0), pt(2.0, 0.0, 0)], 0.05).unwrap();
        assert!((vb.re_min + 2.2).abs() < 1e-12 && (vb.re_max - 2.2).abs() < 1e-12);
        assert!(matches!(auto_viewbox(&[], 0.1), Err(RenderError::EmptyPointSet)));
    }

    #[test]
    fn palette_examples() {
        assert_eq!(palette_color(5, 1), palette_color(9, 1));
        assert_eq!(palette_color(2, 7), palette_color(9, 7));
        let hues: Vec<Rgb> = (0..3).map(|k| palette_color(k, 3)).collect();
        assert_eq!(hues[0], [230, 57, 57]);
        assert_eq!(hues[1], [57, 230, 57]);
        assert_eq!(hues[2], [57, 57, 230]);
    }

    #[test]
    fn empty_render_is_background() {
        let style = RenderStyle::new(64, 80, 1);
        let vb = ViewBox {
            re_min: -1.0,
            re_max: 1.0,
            im_min: -1.0,
            im_max: 1.0,
        };
        let img = render_scatter(&[], &style, &vb).unwrap();
        assert!(img.pixels().all(|p| p.0 == [255, 255, 255]));
        let small = RenderStyle::new(32, 80, 1);
        assert!(matches!(render_scatter(&[], &small, &vb), Err(RenderError::TooSmall(32, 80))));
    }

    #[test]
    fn centered_point_lands_in_the_middle() {
        let mut style = RenderStyle::new(101, 101, 1);
        style.point_radius = 3.0;
        let vb = ViewBox {
            re_min: -1.0,
            re_max: 1.0,
            im_min: -1.0,
            im_max: 1.0,
        };
        let img = render_scatter(&[pt(0.0, 0.0, 0)], &style, &vb).unwrap();
        assert_eq!(img.get_pixel(50, 50).0, SINGLE_COLOR);
        assert_eq!(img.get_pixel(50, 56).0, [255, 255, 255]);
        assert_eq!(img.get_pixel(0, 0).0, [255, 255, 255]);
    }

    #[test]
    fn upper_half_plane_is_drawn_at_the_top() {
        let mut style = RenderStyle::new(100, 100, 1);
        style.point_radius = 2.0;
        let vb = ViewBox {
            re_min: -1.0,
            re_max: 1.0,
            im_min: -1.0,
            im_max: 1.0,
        };
        let img = render_scatter(&[pt(0.9, 0.9, 0)], &style, &vb).unwrap();
        let dark = img
            .enumerate_pixels()
            .filter(|(_, _, p)| p.0 != [255, 255, 255])
            .map(|(x, y, _)| (x, y))
            .collect::<Vec<_>>();
        assert!(!dark.is_empty());
        assert!(dark.iter().all(|&(x, y)| x > 80 && y < 20));
    }

    #[test]
    fn rendering_is_deterministic_and_clips() {
        let pts: Vec<PlotPoint> = (0..500)
            .map(|k| {
                let t = k as f64 * 0.1;
                pt(3.0 * t.cos(), 2.5 * t.sin(), k)
            })
            .collect();
        let style = RenderStyle::new(128, 96, 5);
        let vb = ViewBox {
            re_min: -1.0,
            re_max: 1.0,
            im_min: -1.0,
            im_max: 1.0,
        };
        let a = encode_png(&render_scatter(&pts, &style, &vb).unwrap()).unwrap();
        let b = encode_png(&render_scatter(&pts, &style, &vb).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn frames_accumulate() {
        let dir = std::env::temp_dir().join(format!("gp-frames-{}", std::process::id()));
        let pts: Vec<PlotPoint> = (0..10).map(|k| pt(k as f64, (k * k) as f64, k)).collect();
        let style = RenderStyle::new(64, 64, 3);
        let vb = auto_viewbox(&pts, 0.05).unwrap();
        let batches = crate::periods::frame_batches(10, 3);
        let paths = write_frames(&pts, &batches, &style, &vb, &dir).unwrap();
        assert_eq!(paths.len(), 4);
        assert!(paths[3].ends_with("frame_00004.png"));
        let last = image::open(&paths[3]).unwrap().to_rgb8();
        assert_eq!(last, render_scatter(&pts, &style, &vb).unwrap());
        let first = image::open(&paths[0]).unwrap().to_rgb8();
        assert_eq!(first, render_scatter(&pts[..3], &style, &vb).unwrap());
        fs::remove_dir_all(&dir).unwrap();
    }
}
