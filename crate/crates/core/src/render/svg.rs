use std::fmt::Write;

use crate::bundle::escape_xml;

use super::{BoxKind, LayoutBox, RenderSpec, RenderedPage};

pub(super) const PLACEHOLDER_FILL: &str = "#C0C0C0";
pub(super) const IMAGE_LABEL: &str = "IMG";

/// Baseline offset of a text line: 80% of the font size below the line top.
pub(super) fn baseline(font_px: i32) -> i32 {
    font_px * 4 / 5
}

/// Emit an SVG wireframe: one rect per box with a 1px border, text lines for
/// text-bearing boxes, gray placeholders for images and unsupported widgets.
/// Element order follows box order.
pub fn render_svg(owner: &str, boxes: &[LayoutBox], spec: &RenderSpec) -> RenderedPage {
    let (w, h) = (spec.width_px(), spec.height_px());
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        s,
        r##"  <rect x="0" y="0" width="{w}" height="{h}" fill="#FFFFFF"/>"##
    );
    for b in boxes {
        let fill = match b.kind {
            BoxKind::Image | BoxKind::Unsupported => PLACEHOLDER_FILL,
            _ => b.background.as_deref().unwrap_or("none"),
        };
        let _ = writeln!(
            s,
            r##"  <rect x="{}" y="{}" width="{}" height="{}" fill="{fill}" stroke="#000000" stroke-width="1" data-node="{}"/>"##,
            b.x, b.y, b.w, b.h, b.node
        );
        if b.w == 0 || b.h == 0 {
            continue;
        }
        match b.kind {
            BoxKind::Image => {
                let _ = writeln!(
                    s,
                    r##"  <text x="{}" y="{}" font-family="monospace" font-size="{}" text-anchor="middle" fill="#000000">{IMAGE_LABEL}</text>"##,
                    b.x + b.w / 2,
                    b.y + (b.h - spec.line_height(b.font_px)) / 2 + baseline(b.font_px),
                    b.font_px
                );
            }
            BoxKind::Text | BoxKind::Unsupported => {
                let Some(text) = b.text.as_deref() else {
                    continue;
                };
                let line_h = spec.line_height(b.font_px);
                for (i, line) in spec.wrap_lines(text, b.w, b.font_px).iter().enumerate() {
                    let _ = writeln!(
                        s,
                        r##"  <text x="{}" y="{}" font-family="monospace" font-size="{}" fill="#000000">{}</text>"##,
                        b.x,
                        b.y + i as i32 * line_h + baseline(b.font_px),
                        b.font_px,
                        escape_xml(line)
                    );
                }
            }
            _ => {}
        }
    }
    s.push_str("</svg>\n");
    RenderedPage {
        owner: owner.to_string(),
        svg: s,
        raster: None,
        width_px: w,
        height_px: h,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::{LayoutDocument, ResourceTable};
    use crate::render::measure_and_layout;
    use crate::synth::StaticLayoutTree;

    #[test]
    fn empty_box_list_is_a_blank_screen() {
        let page = render_svg("A", &[], &RenderSpec::default());
        assert_eq!((page.width_px, page.height_px), (720, 1280));
        assert!(page.svg.contains(r#"width="720" height="1280""#));
        assert_eq!(page.svg.matches("<rect").count(), 1);
        assert!(!page.svg.contains("<text"));
    }

    #[test]
    fn login_page_mentions_password_and_is_stable() {
        let doc = LayoutDocument::parse(
            "login",
            "login.xml",
            r#"<LinearLayout orientation="vertical"><TextView text="Password"/><EditText hint="a &lt; b"/><ImageView/></LinearLayout>"#,
        )
        .unwrap();
        let tree = StaticLayoutTree::from_static("Login", doc.root);
        let spec = RenderSpec::default();
        let render = || {
            let boxes = measure_and_layout(&tree, &spec, &ResourceTable::default());
            render_svg("Login", &boxes, &spec).svg
        };
        let svg = render();
        assert!(svg.contains(">Password</text>"));
        assert!(svg.contains(">a &lt; b</text>"));
        assert!(svg.contains(">IMG</text>"));
        assert_eq!(svg, render());
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
    }
}
