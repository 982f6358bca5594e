//! Synthetic screen generation and design-violation injection.
//!
//! `generate_screen` renders deterministic mock-up/implementation pairs
//! (identical before injection); the eight `inject_*` operations perturb
//! the implementation side only; `build_corpus` seeds a whole corpus
//! under the constraints: one to three violations per screen, at most one
//! per component, subtype counts by largest-remainder allocation over the
//! requested category distribution.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{emit_impl_xml, emit_mockup_spec};
use crate::model::{BoundingBox, Category, GuiComponent, Raster, Screen, ScreenKind, Subtype};
use crate::raster::{
    checkerboard, draw_circle, draw_text, fill_rect, hue_shift, hue_shift_region, mode_ring_color,
    resize_nearest, rgb_to_hsv, text_box_size, FontFace,
};

pub const CANVAS_W: u32 = 1080;
pub const CANVAS_H: u32 = 1920;
const CANVAS_BG: [u8; 3] = [246, 246, 244];
const HEADER_H: u32 = 96;
const HEADER_CONTAINER_H: u32 = 180;
const GRID_TOP: i32 = 180;
const CELL_W: u32 = 360;
const CELL_H: u32 = 340;
const GRID_COLS: u32 = 3;
const GRID_ROWS: u32 = 5;
/// Per-axis displacement cap for location injection. Keeps the worst-case
/// similarity delta of a moved pair (two axes) safely under the default
/// matching threshold of screen_width / 8.
const MAX_SHIFT: i32 = 60;
const BACKFILL_RING: u32 = 4;

/// Icon tone pairs (shape, background) curated so that: both tones stay
/// dark enough for the binarized-diff analysis of random-pixel
/// perturbation, the 30-degree hue shift preserves luma ordering with a
/// clear gap, and every shifted tone lands in a different histogram bin.
/// Verified by `palette_constraints` below.
const ICON_TONES: [([u8; 3], [u8; 3]); 2] = [
    ([0, 0, 190], [150, 40, 20]),
    ([50, 0, 110], [40, 110, 40]),
];

const PANEL_COLORS: [[u8; 3]; 6] = [
    [198, 68, 68],
    [68, 150, 88],
    [70, 104, 196],
    [188, 140, 60],
    [150, 70, 170],
    [60, 160, 160],
];

const LABEL_FG: [[u8; 3]; 3] = [[25, 25, 25], [0, 20, 160], [130, 10, 30]];
const LABEL_BG: [[u8; 3]; 3] = [[244, 244, 242], [232, 236, 244], [240, 234, 228]];
const BUTTON_BG: [u8; 3] = [60, 110, 200];
const BUTTON_FG: [u8; 3] = [245, 245, 245];

/// Chunky words keep glyph coverage high enough that a recolored label
/// clears the suspicious-density gate; `word_list_coverage` asserts it.
const WORDS: [&str; 20] = [
    "SAVE", "SEND", "OPEN", "HOME", "BACK", "NEXT", "DONE", "EDIT", "SHARE", "PHOTO", "MUSIC",
    "AUDIO", "VIDEO", "ALARM", "SEARCH", "UPDATE", "BROWSE", "UPLOAD", "ACCOUNT", "PROFILE",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementKind {
    Header,
    Label,
    Icon,
    Panel,
    Button,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IconShape {
    Circle,
    Ring,
    Checker,
    Diamond,
}

#[derive(Debug, Clone)]
pub struct Element {
    pub kind: ElementKind,
    pub bounds: BoundingBox,
    /// The box this element must stay inside when moved or grown.
    pub container: BoundingBox,
    pub row: Option<usize>,
    pub text: Option<String>,
    pub font: FontFace,
    pub fg: [u8; 3],
    pub bg: [u8; 3],
    pub shape: IconShape,
    pub class_name: String,
    pub resource_id: String,
    pub removed: bool,
    pub consumed: bool,
}

impl Element {
    fn paint(&self, img: &mut Raster) {
        if self.removed {
            return;
        }
        match self.kind {
            ElementKind::Header | ElementKind::Panel => {
                fill_rect(img, &self.bounds, self.bg);
            }
            ElementKind::Label => {
                fill_rect(img, &self.bounds, self.bg);
                let scale = self.bounds.h / crate::raster::GLYPH_ROWS;
                draw_text(
                    img,
                    self.bounds.x,
                    self.bounds.y,
                    scale,
                    self.font,
                    self.fg,
                    self.text.as_deref().unwrap_or(""),
                );
            }
            ElementKind::Button => {
                fill_rect(img, &self.bounds, self.bg);
                let text = self.text.as_deref().unwrap_or("");
                let scale = 4;
                let (tw, th) = text_box_size(text, scale);
                let tx = self.bounds.x + ((self.bounds.w.saturating_sub(tw)) / 2) as i32;
                let ty = self.bounds.y + ((self.bounds.h.saturating_sub(th)) / 2) as i32;
                draw_text(img, tx, ty, scale, self.font, self.fg, text);
            }
            ElementKind::Icon => {
                fill_rect(img, &self.bounds, self.bg);
                let b = &self.bounds;
                let (cx, cy) = (b.x + b.w as i32 / 2, b.y + b.h as i32 / 2);
                let side = b.w.min(b.h) as i32;
                match self.shape {
                    IconShape::Circle => draw_circle(img, cx, cy, side * 2 / 5, self.fg),
                    IconShape::Ring => {
                        draw_circle(img, cx, cy, side * 9 / 20, self.fg);
                        draw_circle(img, cx, cy, side * 28 / 100, self.bg);
                    }
                    IconShape::Checker => {
                        checkerboard(img, b, (side as u32 / 5).max(8), self.fg, self.bg)
                    }
                    IconShape::Diamond => {
                        for y in b.y..b.bottom() {
                            for x in b.x..b.right() {
                                if (x - cx).abs() + (y - cy).abs() <= side * 45 / 100 {
                                    img.put_pixel(x as u32, y as u32, image::Rgb(self.fg));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Vector description of a generated screen; the source of truth for
/// rendering, document emission, and injection bookkeeping.
#[derive(Debug, Clone)]
pub struct ScreenModel {
    pub width: u32,
    pub height: u32,
    pub elements: Vec<Element>,
}

impl ScreenModel {
    pub fn render(&self) -> Raster {
        let mut img = Raster::from_pixel(self.width, self.height, image::Rgb(CANVAS_BG));
        for e in &self.elements {
            e.paint(&mut img);
        }
        img
    }

    fn live(&self) -> impl Iterator<Item = (usize, &Element)> {
        self.elements.iter().enumerate().filter(|(_, e)| !e.removed)
    }

    /// Mock-up tree: root -> header object + one group per grid row.
    pub fn to_mockup_screen(&self, screenshot: Raster) -> Result<Screen> {
        let mut root = GuiComponent::new("m", BoundingBox::new(0, 0, self.width, self.height));
        root.name = Some("canvas".to_string());
        let mut top_idx = 0usize;
        // Header objects come first, mirroring element order.
        for (_, e) in self.live().filter(|(_, e)| e.row.is_none()) {
            root.children.push(self.mock_leaf(e, &format!("m/{top_idx}")));
            top_idx += 1;
        }
        for row in 0..GRID_ROWS as usize {
            let members: Vec<&Element> = self
                .live()
                .filter(|(_, e)| e.row == Some(row))
                .map(|(_, e)| e)
                .collect();
            if members.is_empty() {
                continue;
            }
            let id = format!("m/{top_idx}");
            let mut group = GuiComponent::new(
                id.clone(),
                BoundingBox::new(
                    0,
                    GRID_TOP + (row as i32) * CELL_H as i32,
                    self.width,
                    CELL_H,
                ),
            );
            group.name = Some(format!("row_{row}"));
            for (ci, e) in members.iter().enumerate() {
                group.children.push(self.mock_leaf(e, &format!("{id}/{ci}")));
            }
            root.children.push(group);
            top_idx += 1;
        }
        Screen::new(ScreenKind::Mockup, root, screenshot)
    }

    fn mock_leaf(&self, e: &Element, id: &str) -> GuiComponent {
        let mut gc = GuiComponent::new(id, e.bounds);
        gc.name = Some(e.resource_id.rsplit("id/").next().unwrap_or("object").to_string());
        gc.text = e.text.clone();
        if e.text.is_some() {
            gc.font = Some(e.font.name().to_string());
        }
        gc
    }

    /// Implementation tree: FrameLayout root -> header node + one
    /// LinearLayout per grid row. Ids are assigned in pre-order.
    pub fn to_impl_screen(&self, screenshot: Raster) -> Result<Screen> {
        let mut counter = 1usize; // root takes r0
        let mut root = GuiComponent::new("r0", BoundingBox::new(0, 0, self.width, self.height));
        root.class_name = Some("android.widget.FrameLayout".to_string());
        for (_, e) in self.live().filter(|(_, e)| e.row.is_none()) {
            root.children.push(self.impl_leaf(e, &mut counter));
        }
        for row in 0..GRID_ROWS as usize {
            let members: Vec<&Element> = self
                .live()
                .filter(|(_, e)| e.row == Some(row))
                .map(|(_, e)| e)
                .collect();
            if members.is_empty() {
                continue;
            }
            let mut group = GuiComponent::new(
                format!("r{counter}"),
                BoundingBox::new(
                    0,
                    GRID_TOP + (row as i32) * CELL_H as i32,
                    self.width,
                    CELL_H,
                ),
            );
            counter += 1;
            group.class_name = Some("android.widget.LinearLayout".to_string());
            for e in members {
                group.children.push(self.impl_leaf(e, &mut counter));
            }
            root.children.push(group);
        }
        Screen::new(ScreenKind::Implementation, root, screenshot)
    }

    fn impl_leaf(&self, e: &Element, counter: &mut usize) -> GuiComponent {
        let suffix = e.resource_id.rsplit("id/").next().unwrap_or("");
        let mut gc = GuiComponent::new(format!("r{}#{suffix}", *counter), e.bounds);
        *counter += 1;
        gc.class_name = Some(e.class_name.clone());
        gc.text = e.text.clone();
        gc.resource_id = Some(e.resource_id.clone());
        gc
    }

    /// Mock-up id of the element, resolved the same way the tree builder
    /// assigns them.
    pub fn mockup_id_of(&self, idx: usize) -> Option<String> {
        let mut top = 0usize;
        for (i, _) in self.live().filter(|(_, e)| e.row.is_none()) {
            if i == idx {
                return Some(format!("m/{top}"));
            }
            top += 1;
        }
        for row in 0..GRID_ROWS as usize {
            let members: Vec<usize> = self
                .live()
                .filter(|(_, e)| e.row == Some(row))
                .map(|(i, _)| i)
                .collect();
            if members.is_empty() {
                continue;
            }
            for (ci, i) in members.iter().enumerate() {
                if *i == idx {
                    return Some(format!("m/{top}/{ci}"));
                }
            }
            top += 1;
        }
        None
    }

    /// Implementation id of the element in the final (post-injection) tree.
    pub fn impl_id_of(&self, idx: usize) -> Option<String> {
        let mut counter = 1usize;
        for (i, e) in self.live().filter(|(_, e)| e.row.is_none()) {
            if i == idx {
                let suffix = e.resource_id.rsplit("id/").next().unwrap_or("");
                return Some(format!("r{counter}#{suffix}"));
            }
            counter += 1;
        }
        for row in 0..GRID_ROWS as usize {
            let members: Vec<(usize, &Element)> = self
                .live()
                .filter(|(_, e)| e.row == Some(row))
                .collect();
            if members.is_empty() {
                continue;
            }
            counter += 1; // row container
            for (i, e) in members {
                if i == idx {
                    let suffix = e.resource_id.rsplit("id/").next().unwrap_or("");
                    return Some(format!("r{counter}#{suffix}"));
                }
                counter += 1;
            }
        }
        None
    }
}

/// Layout recipe: how many of each component kind to place on the grid.
#[derive(Debug, Clone)]
pub struct ScreenRecipe {
    pub labels: usize,
    pub icons: usize,
    pub panels: usize,
    pub buttons: usize,
}

impl Default for ScreenRecipe {
    fn default() -> Self {
        Self {
            labels: 4,
            icons: 3,
            panels: 3,
            buttons: 2,
        }
    }
}

impl ScreenRecipe {
    fn total(&self) -> usize {
        self.labels + self.icons + self.panels + self.buttons
    }
}

/// Renders a deterministic synthetic screen. Same seed, same recipe:
/// bit-identical output.
pub fn generate_screen(seed: u64, recipe: &ScreenRecipe) -> Result<ScreenModel> {
    let cells_available = (GRID_COLS * GRID_ROWS) as usize;
    if recipe.total() > cells_available {
        return Err(Error::Recipe(format!(
            "{} components do not fit {} grid cells",
            recipe.total(),
            cells_available
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut elements = Vec::new();

    // Header strip.
    elements.push(Element {
        kind: ElementKind::Header,
        bounds: BoundingBox::new(0, 0, CANVAS_W, HEADER_H),
        container: BoundingBox::new(0, 0, CANVAS_W, HEADER_CONTAINER_H),
        row: None,
        text: None,
        font: FontFace::Block,
        fg: [0, 0, 0],
        bg: PANEL_COLORS[rng.gen_range(0..PANEL_COLORS.len())],
        shape: IconShape::Circle,
        class_name: "android.view.View".to_string(),
        resource_id: "com.uivet.app:id/header".to_string(),
        removed: false,
        consumed: false,
    });

    let mut cells: Vec<usize> = (0..cells_available).collect();
    cells.shuffle(&mut rng);

    let mut kinds = Vec::new();
    kinds.extend(std::iter::repeat(ElementKind::Label).take(recipe.labels));
    kinds.extend(std::iter::repeat(ElementKind::Icon).take(recipe.icons));
    kinds.extend(std::iter::repeat(ElementKind::Panel).take(recipe.panels));
    kinds.extend(std::iter::repeat(ElementKind::Button).take(recipe.buttons));

    let mut serial = 0usize;
    for (kind, cell) in kinds.into_iter().zip(cells) {
        let row = cell / GRID_COLS as usize;
        let col = cell % GRID_COLS as usize;
        let cell_box = BoundingBox::new(
            (col as i32) * CELL_W as i32,
            GRID_TOP + (row as i32) * CELL_H as i32,
            CELL_W,
            CELL_H,
        );
        let container = BoundingBox::new(0, cell_box.y, CANVAS_W, CELL_H);

        let (w, h, text, font, fg, bg, shape, class) = match kind {
            ElementKind::Label => {
                let text = WORDS[rng.gen_range(0..WORDS.len())].to_string();
                let font = if rng.gen_bool(0.5) {
                    FontFace::Block
                } else {
                    FontFace::Slant
                };
                let (w, h) = text_box_size(&text, 5);
                let fg = LABEL_FG[rng.gen_range(0..LABEL_FG.len())];
                let bg = LABEL_BG[rng.gen_range(0..LABEL_BG.len())];
                (w, h, Some(text), font, fg, bg, IconShape::Circle, "android.widget.TextView")
            }
            ElementKind::Icon => {
                let side = [120u32, 140, 160][rng.gen_range(0..3)];
                let (fg, bg) = ICON_TONES[rng.gen_range(0..ICON_TONES.len())];
                let shape = [
                    IconShape::Circle,
                    IconShape::Ring,
                    IconShape::Checker,
                    IconShape::Diamond,
                ][rng.gen_range(0..4)];
                (side, side, None, FontFace::Block, fg, bg, shape, "android.widget.ImageView")
            }
            ElementKind::Panel => {
                let w = [180u32, 220, 250][rng.gen_range(0..3)];
                let h = [80u32, 120, 160][rng.gen_range(0..3)];
                let bg = PANEL_COLORS[rng.gen_range(0..PANEL_COLORS.len())];
                (w, h, None, FontFace::Block, [0, 0, 0], bg, IconShape::Circle, "android.view.View")
            }
            ElementKind::Button => {
                let text = WORDS[rng.gen_range(0..WORDS.len())].to_string();
                (200, 64, Some(text), FontFace::Block, BUTTON_FG, BUTTON_BG, IconShape::Circle, "android.widget.Button")
            }
            ElementKind::Header => unreachable!(),
        };

        // Centered placement keeps cross-cell similarity scores far above
        // the matching threshold even after a capped move.
        let x = cell_box.x + ((CELL_W - w) / 2) as i32;
        let y = cell_box.y + ((CELL_H - h) / 2) as i32;
        let kind_tag = match kind {
            ElementKind::Label => "label",
            ElementKind::Icon => "icon",
            ElementKind::Panel => "panel",
            ElementKind::Button => "button",
            ElementKind::Header => "header",
        };
        elements.push(Element {
            kind,
            bounds: BoundingBox::new(x, y, w, h),
            container,
            row: Some(row),
            text,
            font,
            fg,
            bg,
            shape,
            class_name: class.to_string(),
            resource_id: format!("com.uivet.app:id/{kind_tag}_{serial}"),
            removed: false,
            consumed: false,
        });
        serial += 1;
    }

    Ok(ScreenModel {
        width: CANVAS_W,
        height: CANVAS_H,
        elements,
    })
}

// --- injection operations -------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InjectRule {
    Location,
    Size,
    Missing,
    Image,
    ImageColor,
    ComponentColor,
    Font,
    FontColor,
}

impl InjectRule {
    pub fn all() -> &'static [InjectRule] {
        use InjectRule::*;
        &[
            Location,
            Size,
            Missing,
            Image,
            ImageColor,
            ComponentColor,
            Font,
            FontColor,
        ]
    }

    pub fn category(&self) -> Category {
        use InjectRule::*;
        match self {
            Location | Size => Category::Layout,
            Missing | Image | ImageColor | ComponentColor => Category::Resource,
            Font | FontColor => Category::Text,
        }
    }

    fn is_geometry(&self) -> bool {
        matches!(self, InjectRule::Location | InjectRule::Size)
    }
}

/// One injected violation, recorded against the element it perturbed.
#[derive(Debug, Clone)]
pub struct InjectionRecord {
    pub element: usize,
    pub rule: InjectRule,
    pub subtype: Subtype,
    pub params: BTreeMap<String, String>,
}

fn record(element: usize, rule: InjectRule, subtype: Subtype) -> InjectionRecord {
    InjectionRecord {
        element,
        rule,
        subtype,
        params: BTreeMap::new(),
    }
}

fn crop_raster(img: &Raster, b: &BoundingBox) -> Raster {
    let mut out = Raster::new(b.w, b.h);
    for dy in 0..b.h {
        for dx in 0..b.w {
            out.put_pixel(dx, dy, *img.get_pixel(b.x as u32 + dx, b.y as u32 + dy));
        }
    }
    out
}

/// Moves the element horizontally, vertically, or both, bounded by the
/// per-axis cap and its container; exposed pixels take the most prominent
/// surrounding color.
pub fn inject_location(
    model: &mut ScreenModel,
    img: &mut Raster,
    idx: usize,
    rng: &mut ChaCha8Rng,
    lt: u32,
) -> Result<InjectionRecord> {
    let e = &model.elements[idx];
    let min_shift = lt as i32 + 1;
    let b = e.bounds;
    let c = e.container;
    // Signed room per direction.
    let room = [
        -(b.x - c.x),              // left (negative dx)
        c.right() - b.right(),     // right
        -(b.y - c.y),              // up (negative dy)
        c.bottom() - b.bottom(),   // down
    ];
    let h_ok = room[0].abs().max(room[1]) >= min_shift;
    let v_ok = room[2].abs().max(room[3]) >= min_shift;
    if !h_ok && !v_ok {
        return Err(Error::InjectionInfeasible(format!(
            "element {idx} has no {min_shift}px of room in any direction"
        )));
    }
    let mode = match (h_ok, v_ok) {
        (true, true) => *[0, 1, 2].choose(rng).unwrap(), // h, v, both
        (true, false) => 0,
        (false, true) => 1,
        _ => unreachable!(),
    };
    let mut pick_axis = |neg_room: i32, pos_room: i32| -> i32 {
        let neg = neg_room.abs() >= min_shift;
        let pos = pos_room >= min_shift;
        let positive = match (neg, pos) {
            (true, true) => rng.gen_bool(0.5),
            (false, true) => true,
            (true, false) => false,
            _ => unreachable!(),
        };
        let limit = if positive { pos_room } else { neg_room.abs() };
        let magnitude = rng.gen_range(min_shift..=limit.min(MAX_SHIFT));
        if positive {
            magnitude
        } else {
            -magnitude
        }
    };
    let (dx, dy) = match mode {
        0 => (pick_axis(room[0], room[1]), 0),
        1 => (0, pick_axis(room[2], room[3])),
        _ => {
            let dx = if h_ok { pick_axis(room[0], room[1]) } else { 0 };
            let dy = if v_ok { pick_axis(room[2], room[3]) } else { 0 };
            (dx, dy)
        }
    };
    debug_assert!(dx.unsigned_abs() + dy.unsigned_abs() <= CANVAS_W / 4);

    let new_box = BoundingBox::new(b.x + dx, b.y + dy, b.w, b.h);
    let pixels = crop_raster(img, &b);
    let backfill = mode_ring_color(img, &b, BACKFILL_RING);
    fill_rect(img, &b, backfill);
    crate::raster::blit(img, &pixels, new_box.x, new_box.y);

    model.elements[idx].bounds = new_box;
    let subtype = match (dx != 0, dy != 0) {
        (true, false) => Subtype::TranslationX,
        (false, true) => Subtype::TranslationY,
        _ => Subtype::TranslationXY,
    };
    let mut rec = record(idx, InjectRule::Location, subtype);
    rec.params.insert("dx".into(), dx.to_string());
    rec.params.insert("dy".into(), dy.to_string());
    rec.params.insert("old_box".into(), b.to_csv());
    rec.params.insert("box".into(), new_box.to_csv());
    rec.params.insert("backfill".into(), format!("{backfill:?}"));
    Ok(rec)
}

/// Scales the component raster to 120% or 80%, anchored top-left;
/// shrinking backfills the exposed strip with the surrounding color.
pub fn inject_size(
    model: &mut ScreenModel,
    img: &mut Raster,
    idx: usize,
    rng: &mut ChaCha8Rng,
) -> Result<InjectionRecord> {
    let e = &model.elements[idx];
    let b = e.bounds;
    if b.w < 30 || b.h < 30 {
        return Err(Error::InjectionInfeasible(format!(
            "element {idx} too small for a detectable 20% resize"
        )));
    }
    let grown = BoundingBox::new(
        b.x,
        b.y,
        (b.w as f64 * 1.2).round() as u32,
        (b.h as f64 * 1.2).round() as u32,
    );
    let grow_fits = e.container.contains_box(&grown);
    let grow = if grow_fits { rng.gen_bool(0.5) } else { false };
    let scale = if grow { 1.2 } else { 0.8 };
    let new_box = if grow {
        grown
    } else {
        BoundingBox::new(
            b.x,
            b.y,
            (b.w as f64 * 0.8).round() as u32,
            (b.h as f64 * 0.8).round() as u32,
        )
    };

    let pixels = crop_raster(img, &b);
    let resized = resize_nearest(&pixels, new_box.w, new_box.h);
    let backfill = mode_ring_color(img, &b, BACKFILL_RING);
    fill_rect(img, &b, backfill);
    crate::raster::blit(img, &resized, new_box.x, new_box.y);

    model.elements[idx].bounds = new_box;
    let mut rec = record(idx, InjectRule::Size, Subtype::SizeBoth);
    rec.params.insert("scale".into(), scale.to_string());
    rec.params.insert("old_box".into(), b.to_csv());
    rec.params.insert("box".into(), new_box.to_csv());
    Ok(rec)
}

/// Removes a leaf: pixels are backfilled and the dump node disappears.
pub fn inject_missing(model: &mut ScreenModel, img: &mut Raster, idx: usize) -> InjectionRecord {
    let b = model.elements[idx].bounds;
    let backfill = mode_ring_color(img, &b, BACKFILL_RING);
    fill_rect(img, &b, backfill);
    model.elements[idx].removed = true;
    let mut rec = record(idx, InjectRule::Missing, Subtype::MissingComponent);
    rec.params.insert("box".into(), b.to_csv());
    rec.params.insert("backfill".into(), format!("{backfill:?}"));
    rec
}

/// Perturbs exactly 40% of the component's pixels with uniformly random
/// RGB values.
pub fn inject_image(
    model: &mut ScreenModel,
    img: &mut Raster,
    idx: usize,
    rng: &mut ChaCha8Rng,
) -> InjectionRecord {
    let b = model.elements[idx].bounds;
    let area = (b.w * b.h) as usize;
    let n = (area as f64 * 0.4).floor() as usize;
    // Partial Fisher-Yates: first n slots of a virtual index shuffle.
    let mut indices: Vec<u32> = (0..area as u32).collect();
    for i in 0..n {
        let j = rng.gen_range(i..area);
        indices.swap(i, j);
    }
    for &pix in &indices[..n] {
        let x = b.x as u32 + pix % b.w;
        let y = b.y as u32 + pix / b.w;
        let color: [u8; 3] = rng.gen();
        img.put_pixel(x, y, image::Rgb(color));
    }
    let mut rec = record(idx, InjectRule::Image, Subtype::IncorrectImage);
    rec.params.insert("box".into(), b.to_csv());
    rec.params.insert("pixels_changed".into(), n.to_string());
    rec
}

/// Shifts the hue of every pixel in the component by +30 degrees.
pub fn inject_image_color(model: &mut ScreenModel, img: &mut Raster, idx: usize) -> InjectionRecord {
    let e = &model.elements[idx];
    let b = e.bounds;
    hue_shift_region(img, &b, 30.0);
    let mut rec = record(idx, InjectRule::ImageColor, Subtype::ImageColor);
    rec.params.insert("box".into(), b.to_csv());
    rec.params.insert("hue_degrees".into(), "30".into());
    rec.params
        .insert("fg_before".into(), format!("{:?}", e.fg));
    rec.params
        .insert("fg_after".into(), format!("{:?}", hue_shift(e.fg, 30.0)));
    rec
}

/// Shifts the hue of a solid component by 180 degrees.
pub fn inject_component_color(
    model: &mut ScreenModel,
    img: &mut Raster,
    idx: usize,
) -> InjectionRecord {
    let before = model.elements[idx].bg;
    let b = model.elements[idx].bounds;
    hue_shift_region(img, &b, 180.0);
    let after = hue_shift(before, 180.0);
    model.elements[idx].bg = after;
    let mut rec = record(idx, InjectRule::ComponentColor, Subtype::ComponentColor);
    rec.params.insert("box".into(), b.to_csv());
    rec.params.insert("hue_degrees".into(), "180".into());
    rec.params.insert("color_before".into(), format!("{before:?}"));
    rec.params.insert("color_after".into(), format!("{after:?}"));
    rec
}

/// Re-renders a label's text in the other embedded font. The dump keeps
/// the same text, so only the glyph raster moves.
pub fn inject_font(model: &mut ScreenModel, img: &mut Raster, idx: usize) -> InjectionRecord {
    let before = model.elements[idx].font;
    let after = before.other();
    model.elements[idx].font = after;
    let e = model.elements[idx].clone();
    fill_rect(img, &e.bounds, e.bg);
    e.paint(img);
    let mut rec = record(idx, InjectRule::Font, Subtype::FontStyle);
    rec.params.insert("box".into(), e.bounds.to_csv());
    rec.params.insert("font_before".into(), before.name().into());
    rec.params.insert("font_after".into(), after.name().into());
    rec
}

/// Recolors a label's glyph pixels by the 180-degree hue strategy;
/// achromatic glyphs take a fixed red substitute so the change is always
/// chromatic.
pub fn inject_font_color(model: &mut ScreenModel, img: &mut Raster, idx: usize) -> InjectionRecord {
    let before = model.elements[idx].fg;
    let (_, s, _) = rgb_to_hsv(before);
    let after = if s < 0.05 {
        [255, 0, 0]
    } else {
        hue_shift(before, 180.0)
    };
    model.elements[idx].fg = after;
    let e = model.elements[idx].clone();
    fill_rect(img, &e.bounds, e.bg);
    e.paint(img);
    let mut rec = record(idx, InjectRule::FontColor, Subtype::FontColor);
    rec.params.insert("box".into(), e.bounds.to_csv());
    rec.params.insert("color_before".into(), format!("{before:?}"));
    rec.params.insert("color_after".into(), format!("{after:?}"));
    rec
}

// --- manifest and corpus ----------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub screen_id: String,
    pub gc_id: String,
    pub category: Category,
    pub subtype: Subtype,
    pub params: BTreeMap<String, String>,
}

impl ManifestEntry {
    pub fn anchor_box(&self) -> Option<BoundingBox> {
        self.params.get("box").and_then(|s| BoundingBox::from_csv(s))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InjectionManifest {
    pub entries: Vec<ManifestEntry>,
}

impl InjectionManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path)?;
        let entries: Vec<ManifestEntry> = serde_json::from_str(&raw)?;
        Ok(Self { entries })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut out = serde_json::to_string_pretty(&self.entries)?;
        out.push('\n');
        std::fs::write(path, out)?;
        Ok(())
    }
}

/// Largest-remainder allocation of `total` across `weights`, remainders
/// tie-broken by lower index.
pub fn allocate_counts(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| total as f64 * w / sum).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = quotas[a] - quotas[a].floor();
        let rb = quotas[b] - quotas[b].floor();
        rb.partial_cmp(&ra).unwrap().then(a.cmp(&b))
    });
    for i in 0..(total - assigned) {
        counts[order[i % order.len()]] += 1;
    }
    counts
}

/// The default per-rule distribution: Layout 0.40, Resource 0.36, Text
/// 0.24, split uniformly within each category.
pub fn default_distribution() -> Vec<(InjectRule, f64)> {
    use InjectRule::*;
    vec![
        (Location, 0.20),
        (Size, 0.20),
        (Missing, 0.09),
        (Image, 0.09),
        (ImageColor, 0.09),
        (ComponentColor, 0.09),
        (Font, 0.12),
        (FontColor, 0.12),
    ]
}

#[derive(Debug, Clone)]
pub struct CorpusOptions {
    pub n_screens: usize,
    pub total_violations: usize,
    pub seed: u64,
    pub distribution: Vec<(InjectRule, f64)>,
    pub recipe: ScreenRecipe,
}

impl CorpusOptions {
    pub fn new(n_screens: usize, total_violations: usize, seed: u64) -> Self {
        Self {
            n_screens,
            total_violations,
            seed,
            distribution: default_distribution(),
            recipe: ScreenRecipe::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LeafInfo {
    pub mock_id: String,
    pub impl_id: Option<String>,
    pub bounds: BoundingBox,
    pub kind: String,
}

#[derive(Debug)]
pub struct BuiltScreen {
    pub screen_id: String,
    pub dir: PathBuf,
    pub leaves: Vec<LeafInfo>,
}

fn screen_seed(corpus_seed: u64, index: usize) -> u64 {
    corpus_seed.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn eligible(model: &ScreenModel, rule: InjectRule, idx: usize) -> bool {
    let e = &model.elements[idx];
    if e.removed || e.consumed {
        return false;
    }
    match rule {
        InjectRule::Location => {
            let b = e.bounds;
            let c = e.container;
            let room = (b.x - c.x)
                .max(c.right() - b.right())
                .max(b.y - c.y)
                .max(c.bottom() - b.bottom());
            room >= 6
        }
        InjectRule::Size => {
            b_ok(e) && e.bounds.w + e.bounds.h <= 675
        }
        InjectRule::Missing => true,
        InjectRule::Image | InjectRule::ImageColor => e.kind == ElementKind::Icon,
        InjectRule::ComponentColor => {
            matches!(e.kind, ElementKind::Panel | ElementKind::Header)
        }
        InjectRule::Font | InjectRule::FontColor => e.kind == ElementKind::Label,
    }
}

fn b_ok(e: &Element) -> bool {
    e.bounds.w >= 30 && e.bounds.h >= 30
}

struct ScreenState {
    model: ScreenModel,
    records: Vec<InjectionRecord>,
    has_missing: bool,
    has_geometry: bool,
}

impl ScreenState {
    fn compatible(&self, rule: InjectRule) -> Option<usize> {
        if self.records.len() >= 3 {
            return None;
        }
        // Removing a component can flip a neighbor's nearest-impl-leaf
        // relation and trigger a spurious mock-up merge, so missing never
        // shares a screen with geometry rules.
        if rule == InjectRule::Missing && self.has_geometry {
            return None;
        }
        if rule.is_geometry() && self.has_missing {
            return None;
        }
        (0..self.model.elements.len()).find(|&i| eligible(&self.model, rule, i))
    }
}

/// Builds a corpus on disk: one directory per screen with
/// `mockup.spec`, `mockup.png`, `impl.xml`, `impl.png`, `injected.json`,
/// plus a corpus-level `manifest.json`.
pub fn build_corpus(opts: &CorpusOptions, out_dir: &Path) -> Result<(InjectionManifest, Vec<BuiltScreen>)> {
    if opts.n_screens == 0 {
        return Err(Error::Corpus("corpus needs at least one screen".into()));
    }
    if opts.total_violations < opts.n_screens || opts.total_violations > 3 * opts.n_screens {
        return Err(Error::Corpus(format!(
            "{} violations cannot cover {} screens within the 1..=3 per-screen bound",
            opts.total_violations, opts.n_screens
        )));
    }
    let weight_sum: f64 = opts.distribution.iter().map(|(_, w)| w).sum();
    if (weight_sum - 1.0).abs() > 1e-9 {
        return Err(Error::Corpus(format!(
            "distribution weights sum to {weight_sum}, expected 1"
        )));
    }

    let weights: Vec<f64> = opts.distribution.iter().map(|(_, w)| *w).collect();
    let counts = allocate_counts(opts.total_violations, &weights);
    let mut instances: Vec<InjectRule> = Vec::new();
    for ((rule, _), count) in opts.distribution.iter().zip(&counts) {
        instances.extend(std::iter::repeat(*rule).take(*count));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut screens: Vec<ScreenState> = (0..opts.n_screens)
        .map(|i| {
            generate_screen(screen_seed(opts.seed, i), &opts.recipe).map(|model| ScreenState {
                model,
                records: Vec::new(),
                has_missing: false,
                has_geometry: false,
            })
        })
        .collect::<Result<_>>()?;

    instances.shuffle(&mut rng);

    // Phase one: every screen gets one injection.
    let mut screen_order: Vec<usize> = (0..opts.n_screens).collect();
    screen_order.shuffle(&mut rng);
    let mut remaining = instances;
    for &si in &screen_order {
        let Some(pos) = remaining
            .iter()
            .position(|&rule| screens[si].compatible(rule).is_some())
        else {
            return Err(Error::Corpus(format!(
                "no compatible rule left for screen {si}"
            )));
        };
        let rule = remaining.remove(pos);
        assign(&mut screens[si], rule, &mut rng)?;
    }
    // Phase two: spread the rest across the least-loaded screens.
    for rule in remaining {
        let target = (0..opts.n_screens)
            .filter(|&si| screens[si].compatible(rule).is_some())
            .min_by_key(|&si| (screens[si].records.len(), si));
        let Some(si) = target else {
            return Err(Error::Corpus(format!("rule {rule:?} has no compatible screen")));
        };
        assign(&mut screens[si], rule, &mut rng)?;
    }

    // Apply injections and write the corpus.
    std::fs::create_dir_all(out_dir)?;
    let mut manifest = InjectionManifest::default();
    let mut built = Vec::new();
    for (si, state) in screens.iter_mut().enumerate() {
        let screen_id = format!("screen_{si:03}");
        let dir = out_dir.join(&screen_id);
        std::fs::create_dir_all(&dir)?;

        let clean = state.model.render();
        let mock_screen = state.model.to_mockup_screen(clean.clone())?;
        std::fs::write(dir.join("mockup.spec"), emit_mockup_spec(&mock_screen))?;
        clean.save(dir.join("mockup.png"))?;

        // Pre-resolve mock ids (injection never alters the mock-up tree).
        let mock_ids: Vec<Option<String>> = (0..state.model.elements.len())
            .map(|i| state.model.mockup_id_of(i))
            .collect();

        let mut impl_img = clean;
        let mut records = std::mem::take(&mut state.records);
        records.sort_by_key(|r| (r.rule, r.element));
        let mut op_rng = ChaCha8Rng::seed_from_u64(screen_seed(opts.seed, si) ^ 0xA5A5_5A5A);
        let mut applied = Vec::new();
        for rec in records {
            applied.push(apply_to_element(
                &mut state.model,
                &mut impl_img,
                rec.rule,
                rec.element,
                &mut op_rng,
                5,
            )?);
        }

        let impl_screen = state.model.to_impl_screen(impl_img.clone())?;
        std::fs::write(dir.join("impl.xml"), emit_impl_xml(&impl_screen))?;
        impl_img.save(dir.join("impl.png"))?;

        let mut screen_entries = Vec::new();
        for rec in &applied {
            let gc_id = if rec.subtype == Subtype::MissingComponent {
                mock_ids[rec.element].clone().unwrap_or_default()
            } else {
                state.model.impl_id_of(rec.element).unwrap_or_default()
            };
            let mut params = rec.params.clone();
            if let Some(mid) = &mock_ids[rec.element] {
                params.insert("mockup_gc_id".into(), mid.clone());
            }
            let entry = ManifestEntry {
                screen_id: screen_id.clone(),
                gc_id,
                category: rec.rule.category(),
                subtype: rec.subtype,
                params,
            };
            screen_entries.push(entry.clone());
            manifest.entries.push(entry);
        }
        let mut injected = serde_json::to_string_pretty(&screen_entries)?;
        injected.push('\n');
        std::fs::write(dir.join("injected.json"), injected)?;

        let leaves = state
            .model
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| LeafInfo {
                mock_id: mock_ids[i].clone().unwrap_or_default(),
                impl_id: state.model.impl_id_of(i),
                bounds: e.bounds,
                kind: format!("{:?}", e.kind),
            })
            .collect();
        built.push(BuiltScreen {
            screen_id,
            dir,
            leaves,
        });
    }
    manifest.save(&out_dir.join("manifest.json"))?;
    Ok((manifest, built))
}

/// Applies one injection rule to a specific element.
pub fn apply_to_element(
    model: &mut ScreenModel,
    img: &mut Raster,
    rule: InjectRule,
    idx: usize,
    rng: &mut ChaCha8Rng,
    lt: u32,
) -> Result<InjectionRecord> {
    match rule {
        InjectRule::Location => inject_location(model, img, idx, rng, lt),
        InjectRule::Size => inject_size(model, img, idx, rng),
        InjectRule::Missing => Ok(inject_missing(model, img, idx)),
        InjectRule::Image => Ok(inject_image(model, img, idx, rng)),
        InjectRule::ImageColor => Ok(inject_image_color(model, img, idx)),
        InjectRule::ComponentColor => Ok(inject_component_color(model, img, idx)),
        InjectRule::Font => Ok(inject_font(model, img, idx)),
        InjectRule::FontColor => Ok(inject_font_color(model, img, idx)),
    }
}

/// Applies one rule to a randomly chosen eligible element, marking it
/// consumed. Suits in-memory single-screen use (e.g. interactive demos).
pub fn apply_rule(
    model: &mut ScreenModel,
    img: &mut Raster,
    rule: InjectRule,
    rng: &mut ChaCha8Rng,
    lt: u32,
) -> Result<InjectionRecord> {
    let options: Vec<usize> = (0..model.elements.len())
        .filter(|&i| eligible(model, rule, i))
        .collect();
    let &idx = options
        .choose(rng)
        .ok_or_else(|| Error::InjectionInfeasible(format!("no eligible element for {rule:?}")))?;
    model.elements[idx].consumed = true;
    apply_to_element(model, img, rule, idx, rng, lt)
}

fn assign(state: &mut ScreenState, rule: InjectRule, rng: &mut ChaCha8Rng) -> Result<()> {
    let options: Vec<usize> = (0..state.model.elements.len())
        .filter(|&i| eligible(&state.model, rule, i))
        .collect();
    let &idx = options
        .choose(rng)
        .ok_or_else(|| Error::Corpus(format!("no eligible element for {rule:?}")))?;
    state.model.elements[idx].consumed = true;
    state.has_missing |= rule == InjectRule::Missing;
    state.has_geometry |= rule.is_geometry();
    state.records.push(record(idx, rule, Subtype::TextContent)); // subtype resolved at apply time
    let last = state.records.len() - 1;
    state.records[last].rule = rule;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::text_ink_cells;

    #[test]
    fn palette_constraints() {
        // Luminance per the perceptual kernel's RGB weights, gamma 2.2.
        let lum = |c: [u8; 3]| {
            let d = |v: u8| (v as f64 / 255.0).powf(2.2);
            0.297361 * d(c[0]) + 0.627355 * d(c[1]) + 0.0752847 * d(c[2])
        };
        let luma8 = |c: [u8; 3]| 0.299 * c[0] as f64 + 0.587 * c[1] as f64 + 0.114 * c[2] as f64;
        let bin = crate::vision::ColorHistogram::bin_of;

        for (fg, bg) in ICON_TONES {
            assert!(luma8(fg) < 100.0 && luma8(bg) < 110.0, "tones must stay dark");
            assert!(luma8(bg) - luma8(fg) >= 40.0, "clean Otsu split needed");
            let fg2 = hue_shift(fg, 30.0);
            let bg2 = hue_shift(bg, 30.0);
            assert!(
                luma8(bg2) - luma8(fg2) >= 40.0,
                "hue shift must preserve ordering with a gap: {fg:?}/{bg:?}"
            );
            assert_ne!(bin(&fg), bin(&fg2), "shift must move the fg histogram bin");
            assert_ne!(bin(&bg), bin(&bg2), "shift must move the bg histogram bin");
            for (a, b) in [(fg, fg2), (bg, bg2)] {
                let visible = (lum(a) - lum(b)).abs() >= 0.02
                    || (lum(a).min(lum(b)) >= 0.105 && bin(&a) != bin(&b));
                assert!(visible, "shifted tone must stay perceptible: {a:?} -> {b:?}");
            }
        }

        for c in PANEL_COLORS {
            let shifted = hue_shift(c, 180.0);
            assert_ne!(bin(&c), bin(&shifted), "panel color must move bins: {c:?}");
            let (_, s, _) = rgb_to_hsv(c);
            assert!(s >= 0.4, "panel colors must be saturated: {c:?}");
        }

        for fg in LABEL_FG {
            for bg in LABEL_BG {
                assert!(luma8(bg) - luma8(fg) >= 80.0, "glyphs must contrast: {fg:?}/{bg:?}");
            }
            let (_, s, _) = rgb_to_hsv(fg);
            let after = if s < 0.05 { [255, 0, 0] } else { hue_shift(fg, 180.0) };
            assert_ne!(bin(&fg), bin(&after), "font recolor must move bins: {fg:?}");
        }
    }

    #[test]
    fn word_list_coverage() {
        for word in WORDS {
            let cells = word.chars().count() as u32
                * crate::raster::GLYPH_ADVANCE
                * crate::raster::GLYPH_ROWS;
            let coverage = text_ink_cells(word) as f64 / cells as f64;
            assert!(
                coverage >= 0.23,
                "word {word} coverage {coverage:.3} below the suspicion margin"
            );
        }
    }

    #[test]
    fn generate_is_deterministic() {
        let a = generate_screen(7, &ScreenRecipe::default()).unwrap();
        let b = generate_screen(7, &ScreenRecipe::default()).unwrap();
        assert_eq!(a.render(), b.render());
        let c = generate_screen(8, &ScreenRecipe::default()).unwrap();
        assert_ne!(a.render(), c.render());
    }

    #[test]
    fn recipe_overflow_rejected() {
        let recipe = ScreenRecipe {
            labels: 10,
            icons: 4,
            panels: 2,
            buttons: 0,
        };
        assert!(matches!(
            generate_screen(1, &recipe),
            Err(Error::Recipe(_))
        ));
    }

    #[test]
    fn generated_trees_mirror_each_other() {
        let model = generate_screen(3, &ScreenRecipe::default()).unwrap();
        let img = model.render();
        let mock = model.to_mockup_screen(img.clone()).unwrap();
        let imp = model.to_impl_screen(img).unwrap();
        let mock_leaves = crate::model::leaf_components(&mock);
        let impl_leaves = crate::model::leaf_components(&imp);
        assert_eq!(mock_leaves.len(), impl_leaves.len());
        assert_eq!(mock_leaves.len(), model.elements.len());
        for (m, r) in mock_leaves.iter().zip(&impl_leaves) {
            assert_eq!(m.bounds, r.bounds);
        }
        // Ids resolve consistently with the builders.
        for (i, _) in model.elements.iter().enumerate() {
            let mid = model.mockup_id_of(i).unwrap();
            let rid = model.impl_id_of(i).unwrap();
            assert_eq!(mock.find(&mid).unwrap().bounds, imp.find(&rid).unwrap().bounds);
        }
    }

    #[test]
    fn location_injection_bounds_and_backfill() {
        let mut model = generate_screen(11, &ScreenRecipe::default()).unwrap();
        let mut img = model.render();
        let idx = model
            .elements
            .iter()
            .position(|e| e.kind == ElementKind::Panel)
            .unwrap();
        let old = model.elements[idx].bounds;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rec = inject_location(&mut model, &mut img, idx, &mut rng, 5).unwrap();
        let new = model.elements[idx].bounds;
        let dx: i32 = rec.params["dx"].parse().unwrap();
        let dy: i32 = rec.params["dy"].parse().unwrap();
        assert!(dx.unsigned_abs().max(dy.unsigned_abs()) >= 6);
        assert!(dx.unsigned_abs() + dy.unsigned_abs() <= CANVAS_W / 4);
        assert!(model.elements[idx].container.contains_box(&new));
        // Exposed old-location pixels take the surrounding canvas color.
        if dx > 0 {
            let probe = img.get_pixel(old.x as u32, old.y as u32 + old.h / 2);
            assert_eq!(probe.0, CANVAS_BG);
        }
        // Pixels outside old-union-new are untouched.
        let union = old.union(&new);
        let reference = model.render();
        for y in 0..CANVAS_H {
            for x in 0..CANVAS_W {
                let b = BoundingBox::new(x as i32, y as i32, 1, 1);
                if union.intersect(&b).is_none() {
                    assert_eq!(img.get_pixel(x, y), reference.get_pixel(x, y));
                }
            }
        }
    }

    #[test]
    fn size_injection_arithmetic() {
        let mut model = generate_screen(13, &ScreenRecipe::default()).unwrap();
        let mut img = model.render();
        let idx = model
            .elements
            .iter()
            .position(|e| e.kind == ElementKind::Icon && e.bounds.w == 120)
            .or_else(|| model.elements.iter().position(|e| e.kind == ElementKind::Icon))
            .unwrap();
        let old = model.elements[idx].bounds;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rec = inject_size(&mut model, &mut img, idx, &mut rng).unwrap();
        let new = model.elements[idx].bounds;
        let scale: f64 = rec.params["scale"].parse().unwrap();
        assert_eq!(new.w, (old.w as f64 * scale).round() as u32);
        assert_eq!(new.h, (old.h as f64 * scale).round() as u32);
        assert_eq!((new.x, new.y), (old.x, old.y), "anchored top-left");
        if scale < 1.0 {
            // Backfill right of the shrunken box.
            let probe = img.get_pixel(old.right() as u32 - 2, old.y as u32 + 2);
            assert_eq!(probe.0, CANVAS_BG);
        }
    }

    #[test]
    fn missing_injection_removes_node_and_backfills() {
        let mut model = generate_screen(17, &ScreenRecipe::default()).unwrap();
        let mut img = model.render();
        let idx = model
            .elements
            .iter()
            .position(|e| e.kind == ElementKind::Icon)
            .unwrap();
        let b = model.elements[idx].bounds;
        let n_before = model.live().count();
        inject_missing(&mut model, &mut img, idx);
        assert_eq!(model.live().count(), n_before - 1);
        let center = img.get_pixel(b.x as u32 + b.w / 2, b.y as u32 + b.h / 2);
        assert_eq!(center.0, CANVAS_BG, "backfill equals the surrounding mode");
        let imp = model.to_impl_screen(img).unwrap();
        assert_eq!(crate::model::leaf_components(&imp).len(), n_before - 1);
    }

    #[test]
    fn image_injection_changes_exact_pixel_count() {
        let mut model = generate_screen(19, &ScreenRecipe::default()).unwrap();
        let mut img = model.render();
        let before = img.clone();
        let idx = model
            .elements
            .iter()
            .position(|e| e.kind == ElementKind::Icon)
            .unwrap();
        let b = model.elements[idx].bounds;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rec = inject_image(&mut model, &mut img, idx, &mut rng);
        let expected = ((b.w * b.h) as f64 * 0.4).floor() as usize;
        assert_eq!(rec.params["pixels_changed"], expected.to_string());
        let mut changed = 0;
        let mut outside = 0;
        for y in 0..CANVAS_H {
            for x in 0..CANVAS_W {
                if img.get_pixel(x, y) != before.get_pixel(x, y) {
                    changed += 1;
                    let inside = (x as i32) >= b.x
                        && (x as i32) < b.right()
                        && (y as i32) >= b.y
                        && (y as i32) < b.bottom();
                    if !inside {
                        outside += 1;
                    }
                }
            }
        }
        assert_eq!(outside, 0);
        // Random replacement can collide with the old color on rare
        // pixels, so changed <= expected with a tight slack.
        assert!(changed <= expected && changed >= expected - expected / 100);
    }

    #[test]
    fn hue_injections_touch_only_their_region() {
        let mut model = generate_screen(23, &ScreenRecipe::default()).unwrap();
        let mut img = model.render();
        let before = img.clone();
        let idx = model
            .elements
            .iter()
            .position(|e| e.kind == ElementKind::Panel)
            .unwrap();
        let b = model.elements[idx].bounds;
        inject_component_color(&mut model, &mut img, idx);
        for y in 0..CANVAS_H {
            for x in 0..CANVAS_W {
                let inside = (x as i32) >= b.x
                    && (x as i32) < b.right()
                    && (y as i32) >= b.y
                    && (y as i32) < b.bottom();
                if inside {
                    assert_ne!(img.get_pixel(x, y), before.get_pixel(x, y));
                } else {
                    assert_eq!(img.get_pixel(x, y), before.get_pixel(x, y));
                }
            }
        }
    }

    #[test]
    fn font_injection_preserves_text_and_moves_glyphs() {
        let mut model = generate_screen(29, &ScreenRecipe::default()).unwrap();
        let mut img = model.render();
        let before = img.clone();
        let idx = model
            .elements
            .iter()
            .position(|e| e.kind == ElementKind::Label)
            .unwrap();
        let text_before = model.elements[idx].text.clone();
        let rec = inject_font(&mut model, &mut img, idx);
        assert_eq!(model.elements[idx].text, text_before);
        assert_ne!(rec.params["font_before"], rec.params["font_after"]);
        assert_ne!(img, before, "glyph raster must differ");
    }

    #[test]
    fn font_color_injection_keeps_background() {
        let mut model = generate_screen(31, &ScreenRecipe::default()).unwrap();
        let mut img = model.render();
        let before = img.clone();
        let idx = model
            .elements
            .iter()
            .position(|e| e.kind == ElementKind::Label)
            .unwrap();
        let b = model.elements[idx].bounds;
        let bg = model.elements[idx].bg;
        inject_font_color(&mut model, &mut img, idx);
        let mut glyph_changed = 0;
        for y in b.y..b.bottom() {
            for x in b.x..b.right() {
                let (x, y) = (x as u32, y as u32);
                if img.get_pixel(x, y) != before.get_pixel(x, y) {
                    glyph_changed += 1;
                } else {
                    assert_eq!(before.get_pixel(x, y).0, bg, "only glyph pixels may change");
                }
            }
        }
        assert!(glyph_changed > 0);
        // No pixel outside the label moved.
        for y in 0..CANVAS_H {
            for x in 0..CANVAS_W {
                let inside = (x as i32) >= b.x
                    && (x as i32) < b.right()
                    && (y as i32) >= b.y
                    && (y as i32) < b.bottom();
                if !inside {
                    assert_eq!(img.get_pixel(x, y), before.get_pixel(x, y));
                }
            }
        }
    }

    #[test]
    fn allocate_counts_largest_remainder() {
        // 100 over the default distribution is exact.
        let weights: Vec<f64> = default_distribution().iter().map(|(_, w)| *w).collect();
        assert_eq!(
            allocate_counts(100, &weights),
            vec![20, 20, 9, 9, 9, 9, 12, 12]
        );
        // 7 over [0.5, 0.3, 0.2]: floors 3,2,1 = 6; largest remainder is
        // the first (0.5 -> 3.5).
        assert_eq!(allocate_counts(7, &[0.5, 0.3, 0.2]), vec![4, 2, 1]);
        let counts = allocate_counts(13, &weights);
        assert_eq!(counts.iter().sum::<usize>(), 13);
    }

    #[test]
    fn corpus_constraints_hold() {
        let dir = tempfile::tempdir().unwrap();
        let opts = CorpusOptions::new(8, 16, 99);
        let (manifest, built) = build_corpus(&opts, dir.path()).unwrap();
        assert_eq!(manifest.entries.len(), 16);
        assert_eq!(built.len(), 8);

        let mut per_screen: BTreeMap<&str, usize> = BTreeMap::new();
        let mut per_gc: BTreeMap<(String, String), usize> = BTreeMap::new();
        for e in &manifest.entries {
            *per_screen.entry(&e.screen_id).or_default() += 1;
            *per_gc
                .entry((e.screen_id.clone(), e.gc_id.clone()))
                .or_default() += 1;
            assert_eq!(e.category, e.subtype.category());
        }
        assert_eq!(per_screen.len(), 8, "every screen carries an injection");
        assert!(per_screen.values().all(|&n| (1..=3).contains(&n)));
        assert!(per_gc.values().all(|&n| n == 1), "at most one DV per GC");

        for b in &built {
            for f in ["mockup.spec", "mockup.png", "impl.xml", "impl.png", "injected.json"] {
                assert!(b.dir.join(f).exists(), "missing {f}");
            }
        }
    }

    #[test]
    fn corpus_is_bit_deterministic() {
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        let opts = CorpusOptions::new(3, 6, 1234);
        build_corpus(&opts, d1.path()).unwrap();
        build_corpus(&opts, d2.path()).unwrap();
        for entry in walkdir::WalkDir::new(d1.path()) {
            let entry = entry.unwrap();
            if !entry.file_type().is_file() {
                continue;
            }
            let rel = entry.path().strip_prefix(d1.path()).unwrap();
            let a = std::fs::read(entry.path()).unwrap();
            let b = std::fs::read(d2.path().join(rel)).unwrap();
            assert_eq!(a, b, "corpus file {rel:?} differs between runs");
        }
    }

    #[test]
    fn corpus_rejects_impossible_totals() {
        let dir = tempfile::tempdir().unwrap();
        assert!(build_corpus(&CorpusOptions::new(4, 2, 1), dir.path()).is_err());
        assert!(build_corpus(&CorpusOptions::new(4, 13, 1), dir.path()).is_err());
    }
}
