//! Box layout of static layout trees, SVG wireframes, grayscale rasters,
//! and pixel similarity metrics.

mod metrics;
mod raster;
mod svg;

use serde::Serialize;
use thiserror::Error;

use crate::bundle::{
    is_leaf_widget, is_view_group, normalize_color, parse_dp, ComponentNode, NodePath, ResourceRef,
    ResourceTable,
};
use crate::synth::StaticLayoutTree;

pub use metrics::{
    decode_gray, encode_pgm, image_similarity, mean_similarity, MetricError, Similarity,
};
pub use raster::rasterize;
pub use svg::render_svg;

pub use image::GrayImage;

/// Virtual screen and text metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenderSpec {
    pub screen_width_dp: u32,
    pub screen_height_dp: u32,
    /// Pixels per dp.
    pub density_scale: f64,
    pub font_size_default_dp: f64,
    /// Advance width of one character as a fraction of the font size.
    pub char_width_ratio: f64,
    /// Line height as a fraction of the font size.
    pub line_height_ratio: f64,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            screen_width_dp: 360,
            screen_height_dp: 640,
            density_scale: 2.0,
            font_size_default_dp: 14.0,
            char_width_ratio: 0.6,
            line_height_ratio: 1.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("render spec field `{0}` must be positive")]
    NonPositive(&'static str),
}

impl RenderSpec {
    pub fn validate(&self) -> Result<(), RenderError> {
        let checks = [
            ("screen_width_dp", self.screen_width_dp as f64),
            ("screen_height_dp", self.screen_height_dp as f64),
            ("density_scale", self.density_scale),
            ("font_size_default_dp", self.font_size_default_dp),
            ("char_width_ratio", self.char_width_ratio),
            ("line_height_ratio", self.line_height_ratio),
        ];
        for (name, v) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(RenderError::NonPositive(name));
            }
        }
        Ok(())
    }

    /// dp to whole pixels, rounded half away from zero.
    pub fn px(&self, dp: f64) -> i32 {
        (dp * self.density_scale).round() as i32
    }

    pub fn width_px(&self) -> u32 {
        self.px(self.screen_width_dp as f64) as u32
    }

    pub fn height_px(&self) -> u32 {
        self.px(self.screen_height_dp as f64) as u32
    }

    pub fn line_height(&self, font_px: i32) -> i32 {
        (font_px as f64 * self.line_height_ratio).ceil() as i32
    }

    /// Width of `chars` characters, rounded up.
    pub fn text_width(&self, chars: usize, font_px: i32) -> i32 {
        (chars as f64 * font_px as f64 * self.char_width_ratio).ceil() as i32
    }

    /// Break `text` into lines of at most as many characters as fit in
    /// `width` pixels (at least one per line).
    pub fn wrap_lines(&self, text: &str, width: i32, font_px: i32) -> Vec<String> {
        let chars: Vec<char> = text.chars().collect();
        if chars.is_empty() {
            return Vec::new();
        }
        let per_char = font_px as f64 * self.char_width_ratio;
        let fit = ((width.max(0) as f64) / per_char).floor().max(1.0) as usize;
        chars.chunks(fit).map(|c| c.iter().collect()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoxKind {
    Container,
    Text,
    Image,
    /// A widget outside the supported vocabulary, drawn as a labeled gray box.
    Unsupported,
    Plain,
}

/// One laid-out node, in absolute pixels, clipped to its parent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayoutBox {
    pub node: NodePath,
    pub tag: String,
    pub kind: BoxKind,
    pub x: i32,
    pub y: i32,
    pub w: i32,
    pub h: i32,
    /// Display text: widget text or hint, the tag for unsupported widgets.
    pub text: Option<String>,
    pub font_px: i32,
    /// Background as `#RRGGBB`.
    pub background: Option<String>,
}

impl LayoutBox {
    pub fn contains(&self, other: &LayoutBox) -> bool {
        other.x >= self.x
            && other.y >= self.y
            && other.x + other.w <= self.x + self.w
            && other.y + other.h <= self.y + self.h
    }
}

/// Output of rendering one page.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedPage {
    pub owner: String,
    pub svg: String,
    pub raster: Option<GrayImage>,
    pub width_px: u32,
    pub height_px: u32,
}

/// Lay out and render one tree; the raster is produced only on request.
pub fn render_page(
    tree: &StaticLayoutTree,
    spec: &RenderSpec,
    resources: &ResourceTable,
    with_raster: bool,
) -> RenderedPage {
    let boxes = measure_and_layout(tree, spec, resources);
    let mut page = render_svg(&tree.owner, &boxes, spec);
    if with_raster {
        page.raster = Some(rasterize(&boxes, spec));
    }
    page
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dim {
    Match,
    Wrap,
    Px(i32),
}

#[derive(Debug, Clone, Copy, Default)]
struct Insets {
    l: i32,
    t: i32,
    r: i32,
    b: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Arrange {
    Vertical,
    Horizontal,
    Overlay,
    Relative,
    Grid,
}

const TEXT_WIDGETS: &[&str] = &[
    "TextView",
    "Button",
    "EditText",
    "CheckBox",
    "RadioButton",
    "Switch",
    "ToggleButton",
    "AutoCompleteTextView",
];
const IMAGE_WIDGETS: &[&str] = &["ImageView", "ImageButton"];
const OVERLAY_GROUPS: &[&str] = &["FrameLayout", "CardView", "merge"];

struct Ctx<'a> {
    spec: &'a RenderSpec,
    resources: &'a ResourceTable,
}

impl Ctx<'_> {
    fn resolve<'v>(&self, value: &'v str) -> std::borrow::Cow<'v, str> {
        if ResourceRef::parse(value).is_some() {
            if let Ok(v) = self.resources.resolve(value) {
                return v.into();
            }
        }
        value.into()
    }

    fn length(&self, value: &str) -> Option<i32> {
        parse_dp(&self.resolve(value)).map(|dp| self.spec.px(dp))
    }

    fn dim(&self, node: &ComponentNode, attr: &str) -> Dim {
        match node.attributes.get(attr) {
            Some("match_parent") | Some("fill_parent") => Dim::Match,
            Some(v) => self.length(v).map_or(Dim::Wrap, Dim::Px),
            None => Dim::Wrap,
        }
    }

    fn insets(&self, node: &ComponentNode, base: &str) -> Insets {
        let get = |suffix: &str| {
            node.attributes
                .get(&format!("{base}{suffix}"))
                .and_then(|v| self.length(v))
        };
        let all = get("").unwrap_or(0);
        Insets {
            l: get("Left").or_else(|| get("Start")).unwrap_or(all),
            t: get("Top").unwrap_or(all),
            r: get("Right").or_else(|| get("End")).unwrap_or(all),
            b: get("Bottom").unwrap_or(all),
        }
    }

    fn font_px(&self, node: &ComponentNode) -> i32 {
        let dp = node
            .attributes
            .get("textSize")
            .and_then(|v| parse_dp(&self.resolve(v)))
            .unwrap_or(self.spec.font_size_default_dp);
        self.spec.px(dp).max(1)
    }

    fn background(&self, node: &ComponentNode) -> Option<String> {
        node.attributes
            .get("background")
            .and_then(|v| normalize_color(&self.resolve(v)))
    }
}

fn box_kind(node: &ComponentNode) -> BoxKind {
    let tag = node.simple_tag();
    if TEXT_WIDGETS.contains(&tag) {
        BoxKind::Text
    } else if IMAGE_WIDGETS.contains(&tag) {
        BoxKind::Image
    } else if is_view_group(&node.tag) {
        BoxKind::Container
    } else if is_leaf_widget(&node.tag) {
        BoxKind::Plain
    } else {
        BoxKind::Unsupported
    }
}

fn arrangement(node: &ComponentNode) -> Arrange {
    let tag = node.simple_tag();
    match tag {
        "LinearLayout" | "RadioGroup" => {
            if node.attributes.get("orientation") == Some("vertical") {
                Arrange::Vertical
            } else {
                Arrange::Horizontal
            }
        }
        "TableRow" | "HorizontalScrollView" => Arrange::Horizontal,
        "RelativeLayout" => Arrange::Relative,
        "GridView" => Arrange::Grid,
        t if OVERLAY_GROUPS.contains(&t) => Arrange::Overlay,
        _ => Arrange::Vertical,
    }
}

fn is_true(node: &ComponentNode, attr: &str) -> bool {
    node.attributes.get(attr) == Some("true")
}

fn id_of(value: &str) -> &str {
    value.rsplit_once('/').map_or(value, |(_, id)| id)
}

/// A laid-out subtree with boxes relative to its own origin.
struct Placed {
    w: i32,
    h: i32,
    boxes: Vec<LayoutBox>,
}

impl Placed {
    fn shift_into(self, dx: i32, dy: i32, out: &mut Vec<LayoutBox>) {
        out.extend(self.boxes.into_iter().map(|mut b| {
            b.x += dx;
            b.y += dy;
            b
        }));
    }
}

fn place(
    ctx: &Ctx<'_>,
    node: &ComponentNode,
    path: NodePath,
    avail_w: i32,
    avail_h: i32,
    force: (Option<i32>, Option<i32>),
) -> Placed {
    let avail_w = avail_w.max(0);
    let avail_h = avail_h.max(0);
    let pad = ctx.insets(node, "padding");
    let fixed = |forced: Option<i32>, d: Dim, avail: i32| {
        forced.or(match d {
            Dim::Match => Some(avail),
            Dim::Px(p) => Some(p),
            Dim::Wrap => None,
        })
    };
    let fixed_w = fixed(force.0, ctx.dim(node, "layout_width"), avail_w);
    let fixed_h = fixed(force.1, ctx.dim(node, "layout_height"), avail_h);
    let inner_w = (fixed_w.unwrap_or(avail_w) - pad.l - pad.r).max(0);
    let inner_h = (fixed_h.unwrap_or(avail_h) - pad.t - pad.b).max(0);

    let kind = box_kind(node);
    let font_px = ctx.font_px(node);
    let line_h = ctx.spec.line_height(font_px);
    let mut text = None;
    let mut children = Vec::new();
    let (content_w, content_h) = match kind {
        BoxKind::Text => {
            let raw = node
                .attributes
                .get("text")
                .filter(|t| !t.is_empty())
                .or_else(|| node.attributes.get("hint"))
                .unwrap_or("");
            let shown = ctx.resolve(raw).into_owned();
            let full = ctx.spec.text_width(shown.chars().count(), font_px);
            let size = if full <= inner_w {
                (full, line_h)
            } else {
                let lines = ctx.spec.wrap_lines(&shown, inner_w, font_px).len() as i32;
                (inner_w, line_h * lines)
            };
            text = Some(shown);
            size
        }
        BoxKind::Image => {
            let side = ctx.spec.px(48.0);
            (side, side)
        }
        BoxKind::Plain => match node.simple_tag() {
            "View" | "Space" => (0, 0),
            _ => (inner_w, ctx.spec.px(48.0)),
        },
        BoxKind::Container => {
            let (w, h, boxes) = arrange_children(ctx, node, &path, inner_w, inner_h);
            children = boxes;
            (w, h)
        }
        BoxKind::Unsupported => {
            // Label line, then any children stacked below it.
            let label = node.simple_tag().to_string();
            let label_w = ctx.spec.text_width(label.chars().count(), font_px);
            let (w, h, boxes) = stack(
                ctx,
                node,
                &path,
                inner_w,
                (inner_h - line_h).max(0),
                Arrange::Vertical,
            );
            for mut b in boxes {
                b.y += line_h;
                children.push(b);
            }
            text = Some(label);
            (label_w.max(w), line_h + h)
        }
    };
    let w = fixed_w.unwrap_or(content_w + pad.l + pad.r);
    let h = fixed_h.unwrap_or(content_h + pad.t + pad.b);
    let mut boxes = Vec::with_capacity(children.len() + 1);
    boxes.push(LayoutBox {
        node: path,
        tag: node.tag.clone(),
        kind,
        x: 0,
        y: 0,
        w,
        h,
        text,
        font_px,
        background: ctx.background(node),
    });
    for mut b in children {
        b.x += pad.l;
        b.y += pad.t;
        boxes.push(b);
    }
    Placed { w, h, boxes }
}

fn arrange_children(
    ctx: &Ctx<'_>,
    node: &ComponentNode,
    path: &NodePath,
    inner_w: i32,
    inner_h: i32,
) -> (i32, i32, Vec<LayoutBox>) {
    match arrangement(node) {
        a @ (Arrange::Vertical | Arrange::Horizontal) => {
            stack(ctx, node, path, inner_w, inner_h, a)
        }
        Arrange::Overlay => overlay(ctx, node, path, inner_w, inner_h),
        Arrange::Relative => relative(ctx, node, path, inner_w, inner_h),
        Arrange::Grid => grid(ctx, node, path, inner_w, inner_h),
    }
}

fn weight(node: &ComponentNode) -> f64 {
    node.attributes
        .get("layout_weight")
        .and_then(|w| w.parse::<f64>().ok())
        .filter(|w| w.is_finite() && *w > 0.0)
        .unwrap_or(0.0)
}

fn gravity_offset(node: &ComponentNode, free: i32, horizontal: bool) -> Option<i32> {
    let g = node.attributes.get("layout_gravity")?;
    let parts: Vec<&str> = g.split('|').map(str::trim).collect();
    let centered = parts.contains(&"center")
        || parts.contains(if horizontal {
            &"center_horizontal"
        } else {
            &"center_vertical"
        });
    let far = if horizontal {
        parts.contains(&"right") || parts.contains(&"end")
    } else {
        parts.contains(&"bottom")
    };
    if centered {
        Some(free / 2)
    } else if far {
        Some(free)
    } else {
        None
    }
}

/// Linear stacking along one axis. Children that match the parent along the
/// axis take whatever space remains at their position; weighted children
/// share the space left after unweighted ones.
fn stack(
    ctx: &Ctx<'_>,
    node: &ComponentNode,
    path: &NodePath,
    inner_w: i32,
    inner_h: i32,
    axis: Arrange,
) -> (i32, i32, Vec<LayoutBox>) {
    let vertical = axis == Arrange::Vertical;
    let (main_avail, cross_avail) = if vertical {
        (inner_h, inner_w)
    } else {
        (inner_w, inner_h)
    };
    let margins: Vec<Insets> = node
        .children
        .iter()
        .map(|c| ctx.insets(c, "layout_margin"))
        .collect();
    let split = |m: &Insets| {
        if vertical {
            (m.t, m.b, m.l, m.r)
        } else {
            (m.l, m.r, m.t, m.b)
        }
    };
    let weights: Vec<f64> = node.children.iter().map(weight).collect();
    let total_weight: f64 = weights.iter().sum();

    let mut placed: Vec<Option<Placed>> = Vec::with_capacity(node.children.len());
    let mut used = 0;
    for (i, child) in node.children.iter().enumerate() {
        let (m0, m1, c0, c1) = split(&margins[i]);
        if weights[i] > 0.0 {
            used += m0 + m1;
            placed.push(None);
            continue;
        }
        let main = main_avail - used - m0 - m1;
        let cross = cross_avail - c0 - c1;
        let p = if vertical {
            place(ctx, child, path.child(i), cross, main, (None, None))
        } else {
            place(ctx, child, path.child(i), main, cross, (None, None))
        };
        used += m0 + m1 + if vertical { p.h } else { p.w };
        placed.push(Some(p));
    }
    let leftover = (main_avail - used).max(0);
    let mut given = 0;
    let weighted: Vec<usize> = (0..weights.len()).filter(|&i| weights[i] > 0.0).collect();
    for (k, &i) in weighted.iter().enumerate() {
        let share = if k + 1 == weighted.len() {
            leftover - given
        } else {
            (leftover as f64 * weights[i] / total_weight).floor() as i32
        };
        given += share;
        let (_, _, c0, c1) = split(&margins[i]);
        let cross = cross_avail - c0 - c1;
        let child = &node.children[i];
        placed[i] = Some(if vertical {
            place(ctx, child, path.child(i), cross, share, (None, Some(share)))
        } else {
            place(ctx, child, path.child(i), share, cross, (Some(share), None))
        });
    }

    let mut boxes = Vec::new();
    let mut cursor = 0;
    let mut cross_extent = 0;
    for (i, p) in placed.into_iter().enumerate() {
        let p = p.expect("every child placed");
        let (m0, m1, c0, c1) = split(&margins[i]);
        let (pm, pc) = if vertical { (p.h, p.w) } else { (p.w, p.h) };
        let free = cross_avail - c0 - c1 - pc;
        let cross_off = c0 + gravity_offset(&node.children[i], free.max(0), vertical).unwrap_or(0);
        let main_off = cursor + m0;
        cross_extent = cross_extent.max(cross_off + pc + c1);
        cursor = main_off + pm + m1;
        if vertical {
            p.shift_into(cross_off, main_off, &mut boxes);
        } else {
            p.shift_into(main_off, cross_off, &mut boxes);
        }
    }
    if vertical {
        (cross_extent, cursor, boxes)
    } else {
        (cursor, cross_extent, boxes)
    }
}

fn overlay(
    ctx: &Ctx<'_>,
    node: &ComponentNode,
    path: &NodePath,
    inner_w: i32,
    inner_h: i32,
) -> (i32, i32, Vec<LayoutBox>) {
    let mut boxes = Vec::new();
    let (mut ew, mut eh) = (0, 0);
    for (i, child) in node.children.iter().enumerate() {
        let m = ctx.insets(child, "layout_margin");
        let p = place(
            ctx,
            child,
            path.child(i),
            inner_w - m.l - m.r,
            inner_h - m.t - m.b,
            (None, None),
        );
        let x = m.l + gravity_offset(child, (inner_w - m.l - m.r - p.w).max(0), true).unwrap_or(0);
        let y = m.t + gravity_offset(child, (inner_h - m.t - m.b - p.h).max(0), false).unwrap_or(0);
        ew = ew.max(x + p.w + m.r);
        eh = eh.max(y + p.h + m.b);
        p.shift_into(x, y, &mut boxes);
    }
    (ew, eh, boxes)
}

/// RelativeLayout subset: vertical `below`/`above`/`alignParentTop`/
/// `alignParentBottom`/`centerVertical`, horizontal `toRightOf`/`toLeftOf`/
/// `alignParentLeft`/`alignParentRight`/`centerHorizontal`, and
/// `centerInParent`. Sibling references resolve against earlier siblings.
fn relative(
    ctx: &Ctx<'_>,
    node: &ComponentNode,
    path: &NodePath,
    inner_w: i32,
    inner_h: i32,
) -> (i32, i32, Vec<LayoutBox>) {
    let mut rects: std::collections::HashMap<&str, (i32, i32, i32, i32)> = Default::default();
    let mut boxes = Vec::new();
    let (mut ew, mut eh) = (0, 0);
    for (i, child) in node.children.iter().enumerate() {
        let m = ctx.insets(child, "layout_margin");
        let p = place(
            ctx,
            child,
            path.child(i),
            inner_w - m.l - m.r,
            inner_h - m.t - m.b,
            (None, None),
        );
        let sibling = |attr: &str| {
            child
                .attributes
                .get(attr)
                .and_then(|v| rects.get(id_of(v)).copied())
        };
        let center = is_true(child, "layout_centerInParent");
        let mut x = m.l;
        if center || is_true(child, "layout_centerHorizontal") {
            x = (inner_w - p.w) / 2;
        } else if is_true(child, "layout_alignParentRight")
            || is_true(child, "layout_alignParentEnd")
        {
            x = inner_w - p.w - m.r;
        } else if let Some((sx, _, sw, _)) =
            sibling("layout_toRightOf").or_else(|| sibling("layout_toEndOf"))
        {
            x = sx + sw + m.l;
        } else if let Some((sx, _, _, _)) =
            sibling("layout_toLeftOf").or_else(|| sibling("layout_toStartOf"))
        {
            x = sx - p.w - m.r;
        }
        let mut y = m.t;
        if center || is_true(child, "layout_centerVertical") {
            y = (inner_h - p.h) / 2;
        } else if is_true(child, "layout_alignParentBottom") {
            y = inner_h - p.h - m.b;
        } else if let Some((_, sy, _, sh)) = sibling("layout_below") {
            y = sy + sh + m.t;
        } else if let Some((_, sy, _, _)) = sibling("layout_above") {
            y = sy - p.h - m.b;
        }
        if let Some(id) = child.attributes.get("id") {
            rects.insert(id_of(id), (x, y, p.w, p.h));
        }
        ew = ew.max(x + p.w + m.r);
        eh = eh.max(y + p.h + m.b);
        p.shift_into(x, y, &mut boxes);
    }
    (ew, eh, boxes)
}

fn grid(
    ctx: &Ctx<'_>,
    node: &ComponentNode,
    path: &NodePath,
    inner_w: i32,
    inner_h: i32,
) -> (i32, i32, Vec<LayoutBox>) {
    let cols = node
        .attributes
        .get("numColumns")
        .and_then(|c| c.parse::<i32>().ok())
        .filter(|c| *c > 0)
        .unwrap_or(2);
    let cell_w = inner_w / cols;
    let mut boxes = Vec::new();
    let (mut y, mut row_h) = (0, 0);
    for (i, child) in node.children.iter().enumerate() {
        let col = i as i32 % cols;
        if col == 0 && i > 0 {
            y += row_h;
            row_h = 0;
        }
        let p = place(ctx, child, path.child(i), cell_w, inner_h - y, (None, None));
        row_h = row_h.max(p.h);
        p.shift_into(col * cell_w, y, &mut boxes);
    }
    let rows_h = y + row_h;
    let used_w = if node.children.is_empty() {
        0
    } else {
        cell_w * cols.min(node.children.len() as i32)
    };
    (used_w, rows_h, boxes)
}

/// Two-pass box layout of `tree` on the virtual screen. The root always
/// fills the screen; every box is clipped to its parent. Boxes come out in
/// preorder, which is also draw order.
pub fn measure_and_layout(
    tree: &StaticLayoutTree,
    spec: &RenderSpec,
    resources: &ResourceTable,
) -> Vec<LayoutBox> {
    let ctx = Ctx { spec, resources };
    let (sw, sh) = (spec.width_px() as i32, spec.height_px() as i32);
    let mut boxes = place(
        &ctx,
        &tree.root,
        NodePath::root(),
        sw,
        sh,
        (Some(sw), Some(sh)),
    )
    .boxes;
    clip(&mut boxes);
    boxes
}

/// Intersect each box with its (already clipped) parent. Relies on preorder.
fn clip(boxes: &mut [LayoutBox]) {
    let mut stack: Vec<(i32, i32, i32, i32)> = Vec::new();
    for b in boxes.iter_mut() {
        let depth = b.node.depth();
        stack.truncate(depth);
        if let Some(&(px, py, pw, ph)) = stack.last() {
            let x0 = b.x.clamp(px, px + pw);
            let y0 = b.y.clamp(py, py + ph);
            let x1 = (b.x + b.w.max(0)).clamp(px, px + pw);
            let y1 = (b.y + b.h.max(0)).clamp(py, py + ph);
            b.x = x0;
            b.y = y0;
            b.w = x1 - x0;
            b.h = y1 - y0;
        }
        stack.push((b.x, b.y, b.w, b.h));
    }
}
