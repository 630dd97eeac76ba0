use image::{GrayImage, Luma};

use super::svg::{baseline, IMAGE_LABEL};
use super::{BoxKind, LayoutBox, RenderSpec};

const WHITE: u8 = 255;
const BORDER: u8 = 0;
const PLACEHOLDER: u8 = 192;
const GLYPH: u8 = 64;

fn luma(hex: &str) -> u8 {
    let c = |i: usize| u32::from_str_radix(&hex[i..i + 2], 16).unwrap_or(255);
    ((299 * c(1) + 587 * c(3) + 114 * c(5)) / 1000) as u8
}

struct Canvas {
    img: GrayImage,
}

impl Canvas {
    /// Fill `[x0, x1) × [y0, y1)` intersected with the clip rect and canvas.
    fn fill(&mut self, x0: i32, y0: i32, x1: i32, y1: i32, clip: &LayoutBox, v: u8) {
        let (w, h) = (self.img.width() as i32, self.img.height() as i32);
        let x0 = x0.max(clip.x).max(0);
        let y0 = y0.max(clip.y).max(0);
        let x1 = x1.min(clip.x + clip.w).min(w);
        let y1 = y1.min(clip.y + clip.h).min(h);
        for y in y0..y1 {
            for x in x0..x1 {
                self.img.put_pixel(x as u32, y as u32, Luma([v]));
            }
        }
    }

    fn outline(&mut self, b: &LayoutBox) {
        if b.w == 0 || b.h == 0 {
            return;
        }
        let (x1, y1) = (b.x + b.w, b.y + b.h);
        self.fill(b.x, b.y, x1, b.y + 1, b, BORDER);
        self.fill(b.x, y1 - 1, x1, y1, b, BORDER);
        self.fill(b.x, b.y, b.x + 1, y1, b, BORDER);
        self.fill(x1 - 1, b.y, x1, y1, b, BORDER);
    }

    /// Text as a row of solid glyph blocks, one per non-space character.
    fn text_line(&mut self, b: &LayoutBox, spec: &RenderSpec, x: i32, top: i32, line: &str) {
        let advance = b.font_px as f64 * spec.char_width_ratio;
        let glyph_w = ((advance * 0.75) as i32).max(1);
        let glyph_h = (b.font_px * 7 / 10).max(1);
        let y0 = top + baseline(b.font_px) - glyph_h;
        for (i, ch) in line.chars().enumerate() {
            if ch.is_whitespace() {
                continue;
            }
            let gx = x + (i as f64 * advance).floor() as i32;
            self.fill(gx, y0, gx + glyph_w, y0 + glyph_h, b, GLYPH);
        }
    }
}

/// Software-rasterize boxes to an 8-bit grayscale image with the same
/// drawing rules as the SVG output (text drawn as glyph blocks).
pub fn rasterize(boxes: &[LayoutBox], spec: &RenderSpec) -> GrayImage {
    let mut canvas = Canvas {
        img: GrayImage::from_pixel(spec.width_px(), spec.height_px(), Luma([WHITE])),
    };
    for b in boxes {
        let fill = match b.kind {
            BoxKind::Image | BoxKind::Unsupported => Some(PLACEHOLDER),
            _ => b.background.as_deref().map(luma),
        };
        if let Some(v) = fill {
            canvas.fill(b.x, b.y, b.x + b.w, b.y + b.h, b, v);
        }
        if b.w == 0 || b.h == 0 {
            continue;
        }
        let line_h = spec.line_height(b.font_px);
        match b.kind {
            BoxKind::Image => {
                let width = spec.text_width(IMAGE_LABEL.len(), b.font_px);
                let top = b.y + (b.h - line_h) / 2;
                canvas.text_line(b, spec, b.x + b.w / 2 - width / 2, top, IMAGE_LABEL);
            }
            BoxKind::Text | BoxKind::Unsupported => {
                if let Some(text) = b.text.as_deref() {
                    for (i, line) in spec.wrap_lines(text, b.w, b.font_px).iter().enumerate() {
                        canvas.text_line(b, spec, b.x, b.y + i as i32 * line_h, line);
                    }
                }
            }
            _ => {}
        }
        canvas.outline(b);
    }
    canvas.img
}
