//! Raster painting support for the corpus generator and the report
//! renderer: rectangle/circle/checkerboard primitives, two embedded
//! pixel fonts, hue rotation, and surrounding-color sampling.

use crate::model::{BoundingBox, Raster};

/// Fills `region ∩ canvas` with a solid color.
pub fn fill_rect(img: &mut Raster, region: &BoundingBox, color: [u8; 3]) {
    let canvas = BoundingBox::new(0, 0, img.width(), img.height());
    if let Some(b) = region.intersect(&canvas) {
        for y in b.y..b.bottom() {
            for x in b.x..b.right() {
                img.put_pixel(x as u32, y as u32, image::Rgb(color));
            }
        }
    }
}

/// Filled circle centered at (`cx`, `cy`), clipped to the canvas.
pub fn draw_circle(img: &mut Raster, cx: i32, cy: i32, r: i32, color: [u8; 3]) {
    let canvas = BoundingBox::new(0, 0, img.width(), img.height());
    let region = BoundingBox::new(cx - r, cy - r, (2 * r + 1) as u32, (2 * r + 1) as u32);
    if let Some(b) = region.intersect(&canvas) {
        for y in b.y..b.bottom() {
            for x in b.x..b.right() {
                let dx = x - cx;
                let dy = y - cy;
                if dx * dx + dy * dy <= r * r {
                    img.put_pixel(x as u32, y as u32, image::Rgb(color));
                }
            }
        }
    }
}

/// Checkerboard over `region` with `square`-pixel cells.
pub fn checkerboard(img: &mut Raster, region: &BoundingBox, square: u32, c1: [u8; 3], c2: [u8; 3]) {
    let canvas = BoundingBox::new(0, 0, img.width(), img.height());
    if let Some(b) = region.intersect(&canvas) {
        for y in b.y..b.bottom() {
            for x in b.x..b.right() {
                let cx = ((x - region.x) as u32 / square) % 2;
                let cy = ((y - region.y) as u32 / square) % 2;
                let color = if cx == cy { c1 } else { c2 };
                img.put_pixel(x as u32, y as u32, image::Rgb(color));
            }
        }
    }
}

/// Pastes `src` at (`x`, `y`), clipped to the destination canvas.
pub fn blit(img: &mut Raster, src: &Raster, x: i32, y: i32) {
    for sy in 0..src.height() {
        for sx in 0..src.width() {
            let dx = x + sx as i32;
            let dy = y + sy as i32;
            if dx >= 0 && dy >= 0 && (dx as u32) < img.width() && (dy as u32) < img.height() {
                img.put_pixel(dx as u32, dy as u32, *src.get_pixel(sx, sy));
            }
        }
    }
}

pub fn resize_nearest(src: &Raster, w: u32, h: u32) -> Raster {
    image::imageops::resize(src, w, h, image::imageops::FilterType::Nearest)
}

/// Most frequent color in the `ring`-pixel-wide frame around `region`,
/// clipped to the canvas. Ties resolve to the lowest packed RGB value.
pub fn mode_ring_color(img: &Raster, region: &BoundingBox, ring: u32) -> [u8; 3] {
    let canvas = BoundingBox::new(0, 0, img.width(), img.height());
    let outer = BoundingBox::new(
        region.x - ring as i32,
        region.y - ring as i32,
        region.w + 2 * ring,
        region.h + 2 * ring,
    );
    let mut counts: std::collections::HashMap<u32, u64> = std::collections::HashMap::new();
    if let Some(b) = outer.intersect(&canvas) {
        for y in b.y..b.bottom() {
            for x in b.x..b.right() {
                let inside_inner = x >= region.x
                    && x < region.right()
                    && y >= region.y
                    && y < region.bottom();
                if inside_inner {
                    continue;
                }
                let p = img.get_pixel(x as u32, y as u32).0;
                let packed = ((p[0] as u32) << 16) | ((p[1] as u32) << 8) | p[2] as u32;
                *counts.entry(packed).or_insert(0) += 1;
            }
        }
    }
    let best = counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(packed, _)| packed)
        .unwrap_or(0xFFFFFF);
    [(best >> 16) as u8, (best >> 8) as u8, best as u8]
}

// --- color space ---------------------------------------------------------

/// RGB -> HSV, h in [0, 360), s and v in [0, 1].
pub fn rgb_to_hsv(rgb: [u8; 3]) -> (f64, f64, f64) {
    let r = rgb[0] as f64 / 255.0;
    let g = rgb[1] as f64 / 255.0;
    let b = rgb[2] as f64 / 255.0;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * (((g - b) / delta).rem_euclid(6.0))
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    let s = if max == 0.0 { 0.0 } else { delta / max };
    (h, s, max)
}

/// HSV -> RGB with half-up rounding to 8-bit channels.
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let h = h.rem_euclid(360.0);
    let c = v * s;
    let x = c * (1.0 - ((h / 60.0).rem_euclid(2.0) - 1.0).abs());
    let m = v - c;
    let (r, g, b) = match (h / 60.0) as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let q = |v: f64| ((v + m) * 255.0 + 0.5).floor().clamp(0.0, 255.0) as u8;
    [q(r), q(g), q(b)]
}

/// Rotates hue by `degrees`, preserving saturation and value. Achromatic
/// pixels (zero saturation) pass through unchanged.
pub fn hue_shift(rgb: [u8; 3], degrees: f64) -> [u8; 3] {
    let (h, s, v) = rgb_to_hsv(rgb);
    if s == 0.0 {
        return rgb;
    }
    hsv_to_rgb(h + degrees, s, v)
}

/// Applies [`hue_shift`] to every pixel of `region ∩ canvas`.
pub fn hue_shift_region(img: &mut Raster, region: &BoundingBox, degrees: f64) {
    let canvas = BoundingBox::new(0, 0, img.width(), img.height());
    if let Some(b) = region.intersect(&canvas) {
        for y in b.y..b.bottom() {
            for x in b.x..b.right() {
                let p = img.get_pixel(x as u32, y as u32).0;
                img.put_pixel(x as u32, y as u32, image::Rgb(hue_shift(p, degrees)));
            }
        }
    }
}

// --- embedded pixel fonts -------------------------------------------------

/// The two embedded corpus fonts. Both carry identical per-glyph ink
/// counts (Slant is a row-sheared variant), so a face change moves glyph
/// pixels without moving the color histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FontFace {
    Block,
    Slant,
}

impl FontFace {
    pub fn name(&self) -> &'static str {
        match self {
            FontFace::Block => "Block",
            FontFace::Slant => "Slant",
        }
    }

    pub fn from_name(name: &str) -> Option<FontFace> {
        match name {
            "Block" => Some(FontFace::Block),
            "Slant" => Some(FontFace::Slant),
            _ => None,
        }
    }

    pub fn other(&self) -> FontFace {
        match self {
            FontFace::Block => FontFace::Slant,
            FontFace::Slant => FontFace::Block,
        }
    }

    /// Horizontal shear per glyph row, in cells.
    fn row_shift(&self, row: usize) -> i32 {
        match self {
            FontFace::Block => 0,
            FontFace::Slant => match row {
                0 | 1 => 2,
                2..=4 => 1,
                _ => 0,
            },
        }
    }
}

/// Glyph cell geometry: 5x7 glyphs on a 7-cell advance (2 cells of shear
/// headroom shared with inter-glyph spacing), 7 cells tall.
pub const GLYPH_COLS: u32 = 5;
pub const GLYPH_ROWS: u32 = 7;
pub const GLYPH_ADVANCE: u32 = 7;

/// 5-bit row masks, bit 4 = leftmost column.
fn glyph_rows(c: char) -> [u8; 7] {
    match c.to_ascii_uppercase() {
        'A' => [0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11],
        'B' => [0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E],
        'C' => [0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E],
        'D' => [0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E],
        'E' => [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F],
        'F' => [0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10],
        'G' => [0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F],
        'H' => [0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11],
        'I' => [0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x1F],
        'J' => [0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C],
        'K' => [0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11],
        'L' => [0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F],
        'M' => [0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11],
        'N' => [0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11],
        'O' => [0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E],
        'P' => [0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10],
        'Q' => [0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D],
        'R' => [0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11],
        'S' => [0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E],
        'T' => [0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04],
        'U' => [0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E],
        'V' => [0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04],
        'W' => [0x11, 0x11, 0x11, 0x15, 0x15, 0x1B, 0x11],
        'X' => [0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11],
        'Y' => [0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04],
        'Z' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F],
        '0' => [0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E],
        '1' => [0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E],
        '2' => [0x0E, 0x11, 0x01, 0x06, 0x08, 0x10, 0x1F],
        '3' => [0x1E, 0x01, 0x01, 0x0E, 0x01, 0x01, 0x1E],
        '4' => [0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02],
        '5' => [0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E],
        '6' => [0x0E, 0x10, 0x10, 0x1E, 0x11, 0x11, 0x0E],
        '7' => [0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08],
        '8' => [0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E],
        '9' => [0x0E, 0x11, 0x11, 0x0F, 0x01, 0x01, 0x0E],
        ' ' => [0x00; 7],
        '.' => [0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C],
        ',' => [0x00, 0x00, 0x00, 0x00, 0x0C, 0x04, 0x08],
        '!' => [0x04, 0x04, 0x04, 0x04, 0x04, 0x00, 0x04],
        '?' => [0x0E, 0x11, 0x01, 0x06, 0x04, 0x00, 0x04],
        ':' => [0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00],
        '-' => [0x00, 0x00, 0x00, 0x0E, 0x00, 0x00, 0x00],
        '+' => [0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00],
        _ => [0x1F, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1F],
    }
}

/// Pixel size of the box that contains `text` rendered at `scale` in
/// either face (shear headroom included).
pub fn text_box_size(text: &str, scale: u32) -> (u32, u32) {
    let n = text.chars().count() as u32;
    (n.max(1) * GLYPH_ADVANCE * scale, GLYPH_ROWS * scale)
}

/// Renders `text` with its top-left corner at (`x`, `y`). Each font cell
/// becomes a `scale` x `scale` pixel block; background is left untouched.
pub fn draw_text(
    img: &mut Raster,
    x: i32,
    y: i32,
    scale: u32,
    face: FontFace,
    color: [u8; 3],
    text: &str,
) {
    for (ci, c) in text.chars().enumerate() {
        let rows = glyph_rows(c);
        let cell_x = x + (ci as u32 * GLYPH_ADVANCE * scale) as i32;
        for (row, bits) in rows.iter().enumerate() {
            let shift = face.row_shift(row);
            for col in 0..GLYPH_COLS {
                if bits & (1 << (GLYPH_COLS - 1 - col)) != 0 {
                    let px = cell_x + ((col as i32 + shift) * scale as i32);
                    let py = y + (row as u32 * scale) as i32;
                    fill_rect(
                        img,
                        &BoundingBox::new(px, py, scale, scale),
                        color,
                    );
                }
            }
        }
    }
}

/// Total ink cells for `text` (font-independent by construction).
pub fn text_ink_cells(text: &str) -> u32 {
    text.chars()
        .map(|c| glyph_rows(c).iter().map(|r| r.count_ones()).sum::<u32>())
        .sum()
}
