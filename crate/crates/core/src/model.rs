//! Domain types shared by all pipeline stages: bounding boxes, GUI
//! components, screens, violation records, and analysis configuration.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 8-bit RGB raster. Alpha is flattened against white at load time.
pub type Raster = image::RgbImage;

/// Axis-aligned pixel rectangle, origin top-left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x: i32,
    pub y: i32,
    pub w: u32,
    pub h: u32,
}

impl BoundingBox {
    pub fn new(x: i32, y: i32, w: u32, h: u32) -> Self {
        Self { x, y, w, h }
    }

    pub fn right(&self) -> i32 {
        self.x + self.w as i32
    }

    pub fn bottom(&self) -> i32 {
        self.y + self.h as i32
    }

    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    pub fn intersect(&self, other: &BoundingBox) -> Option<BoundingBox> {
        let x1 = self.x.max(other.x);
        let y1 = self.y.max(other.y);
        let x2 = self.right().min(other.right());
        let y2 = self.bottom().min(other.bottom());
        if x2 > x1 && y2 > y1 {
            Some(BoundingBox::new(x1, y1, (x2 - x1) as u32, (y2 - y1) as u32))
        } else {
            None
        }
    }

    pub fn union(&self, other: &BoundingBox) -> BoundingBox {
        let x1 = self.x.min(other.x);
        let y1 = self.y.min(other.y);
        let x2 = self.right().max(other.right());
        let y2 = self.bottom().max(other.bottom());
        BoundingBox::new(x1, y1, (x2 - x1) as u32, (y2 - y1) as u32)
    }

    /// Intersection over union; 0.0 when either box is degenerate.
    pub fn iou(&self, other: &BoundingBox) -> f64 {
        let inter = match self.intersect(other) {
            Some(b) => b.area() as f64,
            None => return 0.0,
        };
        let union = self.area() as f64 + other.area() as f64 - inter;
        if union <= 0.0 {
            0.0
        } else {
            inter / union
        }
    }

    pub fn contains_box(&self, other: &BoundingBox) -> bool {
        other.x >= self.x
            && other.y >= self.y
            && other.right() <= self.right()
            && other.bottom() <= self.bottom()
    }

    /// Clamps this box to lie within `outer`. Degenerates to a zero-area
    /// box on the nearest edge when there is no overlap.
    pub fn clamp_to(&self, outer: &BoundingBox) -> BoundingBox {
        let x1 = self.x.clamp(outer.x, outer.right());
        let y1 = self.y.clamp(outer.y, outer.bottom());
        let x2 = self.right().clamp(outer.x, outer.right());
        let y2 = self.bottom().clamp(outer.y, outer.bottom());
        BoundingBox::new(x1, y1, (x2 - x1).max(0) as u32, (y2 - y1).max(0) as u32)
    }

    /// Renders as `x,y,w,h`, the form used in evidence maps and CLI flags.
    pub fn to_csv(&self) -> String {
        format!("{},{},{},{}", self.x, self.y, self.w, self.h)
    }

    pub fn from_csv(s: &str) -> Option<BoundingBox> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return None;
        }
        Some(BoundingBox::new(
            parts[0].parse().ok()?,
            parts[1].parse().ok()?,
            parts[2].parse().ok()?,
            parts[3].parse().ok()?,
        ))
    }
}

/// One GUI component: a box, optional text, and source metadata. The
/// component image is the region of the owning screenshot under `bounds`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuiComponent {
    /// Unique within the owning screen. Implementation GCs are keyed by
    /// dump pre-order index (plus resource-id suffix when present),
    /// mock-up GCs by their path in the spec document.
    pub id: String,
    pub bounds: BoundingBox,
    pub text: Option<String>,
    /// Runtime component type from the dump, e.g. `android.widget.TextView`.
    pub class_name: Option<String>,
    /// Developer-assigned id from the dump, e.g. `com.app:id/login_btn`.
    pub resource_id: Option<String>,
    /// Layer name from the mock-up spec.
    pub name: Option<String>,
    /// Font name declared in the mock-up spec.
    pub font: Option<String>,
    pub children: Vec<GuiComponent>,
}

impl GuiComponent {
    pub fn new(id: impl Into<String>, bounds: BoundingBox) -> Self {
        Self {
            id: id.into(),
            bounds,
            text: None,
            class_name: None,
            resource_id: None,
            name: None,
            font: None,
            children: Vec::new(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Depth-first pre-order walk over this subtree.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a GuiComponent)) {
        visit(self);
        for child in &self.children {
            child.walk(visit);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScreenKind {
    Mockup,
    Implementation,
}

/// A canvas-sized rooted hierarchy of GUI components plus its screenshot.
#[derive(Debug, Clone)]
pub struct Screen {
    pub width: u32,
    pub height: u32,
    pub kind: ScreenKind,
    pub root: GuiComponent,
    pub screenshot: Raster,
}

impl Screen {
    /// Validates the structural invariants: root box spans the canvas,
    /// screenshot dimensions match, and ids are unique.
    pub fn new(kind: ScreenKind, root: GuiComponent, screenshot: Raster) -> Result<Self> {
        let (width, height) = screenshot.dimensions();
        if root.bounds != BoundingBox::new(0, 0, width, height) {
            return Err(Error::DimensionMismatch {
                expected_w: width,
                expected_h: height,
                found_w: root.bounds.w,
                found_h: root.bounds.h,
            });
        }
        let mut ids = std::collections::HashSet::new();
        let mut dup = None;
        root.walk(&mut |gc| {
            if !ids.insert(gc.id.clone()) && dup.is_none() {
                dup = Some(gc.id.clone());
            }
        });
        if let Some(id) = dup {
            return Err(Error::Parse {
                path: String::new(),
                message: format!("duplicate component id {id:?}"),
            });
        }
        Ok(Self {
            width,
            height,
            kind,
            root,
            screenshot,
        })
    }

    pub fn canvas(&self) -> BoundingBox {
        BoundingBox::new(0, 0, self.width, self.height)
    }

    pub fn find(&self, id: &str) -> Option<&GuiComponent> {
        let mut found = None;
        self.root.walk(&mut |gc| {
            if gc.id == id && found.is_none() {
                found = Some(gc);
            }
        });
        found
    }

    /// Pre-order ordinal of every component id, used for canonical
    /// violation ordering.
    pub fn preorder_index(&self) -> BTreeMap<String, usize> {
        let mut map = BTreeMap::new();
        let mut next = 0usize;
        self.root.walk(&mut |gc| {
            map.insert(gc.id.clone(), next);
            next += 1;
        });
        map
    }
}

/// Leaf components (zero children) in depth-first pre-order. Containers
/// are excluded; a childless root is itself the only leaf.
pub fn leaf_components(screen: &Screen) -> Vec<&GuiComponent> {
    let mut leaves = Vec::new();
    screen.root.walk(&mut |gc| {
        if gc.is_leaf() {
            leaves.push(gc);
        }
    });
    leaves
}

/// Pixel region of the screenshot under `bounds`, clipped to the canvas.
pub fn crop(screen: &Screen, bounds: &BoundingBox) -> Result<Raster> {
    let clipped = bounds
        .intersect(&screen.canvas())
        .ok_or(Error::EmptyCrop)?;
    let mut out = Raster::new(clipped.w, clipped.h);
    for dy in 0..clipped.h {
        for dx in 0..clipped.w {
            let px = *screen
                .screenshot
                .get_pixel((clipped.x as u32) + dx, (clipped.y as u32) + dy);
            out.put_pixel(dx, dy, px);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Layout,
    Text,
    Resource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Subtype {
    TranslationX,
    TranslationY,
    TranslationXY,
    SizeWidth,
    SizeHeight,
    SizeBoth,
    TextContent,
    FontColor,
    FontStyle,
    MissingComponent,
    ExtraneousComponent,
    IncorrectImage,
    ImageColor,
    ComponentColor,
}

impl Subtype {
    pub fn category(&self) -> Category {
        use Subtype::*;
        match self {
            TranslationX | TranslationY | TranslationXY | SizeWidth | SizeHeight | SizeBoth => {
                Category::Layout
            }
            TextContent | FontColor | FontStyle => Category::Text,
            MissingComponent | ExtraneousComponent | IncorrectImage | ImageColor
            | ComponentColor => Category::Resource,
        }
    }

    pub fn all() -> &'static [Subtype] {
        use Subtype::*;
        &[
            TranslationX,
            TranslationY,
            TranslationXY,
            SizeWidth,
            SizeHeight,
            SizeBoth,
            TextContent,
            FontColor,
            FontStyle,
            MissingComponent,
            ExtraneousComponent,
            IncorrectImage,
            ImageColor,
            ComponentColor,
        ]
    }
}

impl std::fmt::Display for Subtype {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A single classified mismatch between corresponding components.
///
/// MissingComponent carries only the mock-up id, ExtraneousComponent only
/// the implementation id; every other subtype carries both. Enforced at
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignViolation {
    pub category: Category,
    pub subtype: Subtype,
    pub mockup_gc: Option<String>,
    pub impl_gc: Option<String>,
    pub description: String,
    pub evidence: BTreeMap<String, String>,
}

impl DesignViolation {
    pub fn new(
        subtype: Subtype,
        mockup_gc: Option<String>,
        impl_gc: Option<String>,
        description: impl Into<String>,
    ) -> Self {
        match subtype {
            Subtype::MissingComponent => {
                assert!(
                    mockup_gc.is_some() && impl_gc.is_none(),
                    "MissingComponent must reference exactly the mock-up GC"
                );
            }
            Subtype::ExtraneousComponent => {
                assert!(
                    mockup_gc.is_none() && impl_gc.is_some(),
                    "ExtraneousComponent must reference exactly the implementation GC"
                );
            }
            _ => {
                assert!(
                    mockup_gc.is_some() && impl_gc.is_some(),
                    "{subtype:?} must reference both GCs"
                );
            }
        }
        Self {
            category: subtype.category(),
            subtype,
            mockup_gc,
            impl_gc,
            description: description.into(),
            evidence: BTreeMap::new(),
        }
    }

    pub fn with_evidence(mut self, key: &str, value: impl Into<String>) -> Self {
        self.evidence.insert(key.to_string(), value.into());
        self
    }

    /// Box used for report annotation and for manifest matching during
    /// evaluation: the implementation box when present, else the mock-up
    /// box (missing components).
    pub fn anchor_box(&self) -> Option<BoundingBox> {
        self.evidence
            .get("impl_box")
            .or_else(|| self.evidence.get("mockup_box"))
            .and_then(|s| BoundingBox::from_csv(s))
    }
}

/// Every tunable threshold plus dynamic-content exclusion regions.
///
/// `mt` defaults to one eighth of the implementation screen width and is
/// therefore resolved per screen; all other defaults are fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// GC-Matching Threshold in pixels; `None` means screen_width / 8.
    pub mt: Option<u32>,
    /// Difference Threshold: suspicious-pair density cut, fraction.
    pub dt: f64,
    /// Layout Threshold in pixels.
    pub lt: u32,
    /// Color Threshold: histogram similarity cut, fraction.
    pub ct: f64,
    /// Image Difference Threshold: binarized diff density cut, fraction.
    pub idt: f64,
    pub pid_fov_degrees: f64,
    pub pid_luminance_cdm2: f64,
    pub pid_color_factor: f64,
    pub exclusion_regions: Vec<BoundingBox>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            mt: None,
            dt: 0.20,
            lt: 5,
            ct: 0.85,
            idt: 0.20,
            pid_fov_degrees: 45.0,
            pid_luminance_cdm2: 100.0,
            pid_color_factor: 1.0,
            exclusion_regions: Vec::new(),
        }
    }
}

impl AnalysisConfig {
    pub fn mt_for_width(&self, screen_width: u32) -> u32 {
        self.mt.unwrap_or(screen_width / 8)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("dt", self.dt), ("ct", self.ct), ("idt", self.idt)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must be in [0,1], got {v}")));
            }
        }
        for (name, v) in [
            ("pid_fov_degrees", self.pid_fov_degrees),
            ("pid_luminance_cdm2", self.pid_luminance_cdm2),
        ] {
            if v <= 0.0 {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.pid_color_factor < 0.0 {
            return Err(Error::Config(format!(
                "pid_color_factor must be non-negative, got {}",
                self.pid_color_factor
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use image::Rgb;

    fn solid(w: u32, h: u32, c: [u8; 3]) -> Raster {
        Raster::from_pixel(w, h, Rgb(c))
    }

    fn screen_from_tree(root: GuiComponent, w: u32, h: u32) -> Screen {
        Screen::new(ScreenKind::Mockup, root, solid(w, h, [200, 200, 200])).unwrap()
    }

    #[test]
    fn leaf_components_root_only() {
        let root = GuiComponent::new("m", BoundingBox::new(0, 0, 10, 10));
        let screen = screen_from_tree(root, 10, 10);
        let leaves = leaf_components(&screen);
        assert_eq!(leaves.len(), 1);
        assert_eq!(leaves[0].id, "m");
    }

    #[test]
    fn leaf_components_preorder() {
        // root{A{B,C},D} -> [B,C,D]
        let mut root = GuiComponent::new("root", BoundingBox::new(0, 0, 100, 100));
        let mut a = GuiComponent::new("A", BoundingBox::new(0, 0, 50, 100));
        a.children.push(GuiComponent::new("B", BoundingBox::new(0, 0, 50, 50)));
        a.children.push(GuiComponent::new("C", BoundingBox::new(0, 50, 50, 50)));
        root.children.push(a);
        root.children.push(GuiComponent::new("D", BoundingBox::new(50, 0, 50, 100)));
        let screen = screen_from_tree(root, 100, 100);
        let ids: Vec<&str> = leaf_components(&screen).iter().map(|g| g.id.as_str()).collect();
        assert_eq!(ids, vec!["B", "C", "D"]);
    }

    #[test]
    fn leaf_components_sibling_permutation_permutes_output() {
        let mut root = GuiComponent::new("root", BoundingBox::new(0, 0, 100, 100));
        root.children.push(GuiComponent::new("D", BoundingBox::new(50, 0, 50, 100)));
        root.children.push(GuiComponent::new("B", BoundingBox::new(0, 0, 50, 50)));
        let screen = screen_from_tree(root, 100, 100);
        let ids: Vec<&str> = leaf_components(&screen).iter().map(|g| g.id.as_str()).collect();
        assert_eq!(ids, vec!["D", "B"]);
    }

    #[test]
    fn crop_full_canvas_identity() {
        let mut img = solid(8, 6, [10, 20, 30]);
        img.put_pixel(3, 2, Rgb([1, 2, 3]));
        let root = GuiComponent::new("m", BoundingBox::new(0, 0, 8, 6));
        let screen = Screen::new(ScreenKind::Mockup, root, img.clone()).unwrap();
        let out = crop(&screen, &BoundingBox::new(0, 0, 8, 6)).unwrap();
        assert_eq!(out, img);
    }

    #[test]
    fn crop_single_pixel() {
        let mut img = solid(8, 6, [10, 20, 30]);
        img.put_pixel(0, 0, Rgb([7, 8, 9]));
        let root = GuiComponent::new("m", BoundingBox::new(0, 0, 8, 6));
        let screen = Screen::new(ScreenKind::Mockup, root, img).unwrap();
        let out = crop(&screen, &BoundingBox::new(0, 0, 1, 1)).unwrap();
        assert_eq!(out.dimensions(), (1, 1));
        assert_eq!(out.get_pixel(0, 0).0, [7, 8, 9]);
    }

    #[test]
    fn crop_clips_overhang() {
        // Box extends 10 px past the right edge of a 100-px-wide canvas:
        // output width is original minus the overhang.
        let root = GuiComponent::new("m", BoundingBox::new(0, 0, 100, 40));
        let screen = screen_from_tree(root, 100, 40);
        let out = crop(&screen, &BoundingBox::new(70, 0, 40, 20)).unwrap();
        assert_eq!(out.dimensions(), (30, 20));
    }

    #[test]
    fn crop_empty_intersection_errors() {
        let root = GuiComponent::new("m", BoundingBox::new(0, 0, 10, 10));
        let screen = screen_from_tree(root, 10, 10);
        assert!(matches!(
            crop(&screen, &BoundingBox::new(20, 20, 5, 5)),
            Err(Error::EmptyCrop)
        ));
    }

    #[test]
    fn crop_paste_back_reproduces_original() {
        let mut img = solid(32, 24, [100, 150, 200]);
        for y in 0..24u32 {
            for x in 0..32u32 {
                img.put_pixel(x, y, Rgb([(x * 7 % 256) as u8, (y * 11 % 256) as u8, 33]));
            }
        }
        let root = GuiComponent::new("m", BoundingBox::new(0, 0, 32, 24));
        let screen = Screen::new(ScreenKind::Mockup, root, img.clone()).unwrap();
        let region = BoundingBox::new(5, 7, 12, 9);
        let piece = crop(&screen, &region).unwrap();
        let mut rebuilt = img.clone();
        for dy in 0..9u32 {
            for dx in 0..12u32 {
                rebuilt.put_pixel(5 + dx, 7 + dy, *piece.get_pixel(dx, dy));
            }
        }
        assert_eq!(rebuilt, img);
    }

    #[test]
    fn violation_field_consistency() {
        let v = DesignViolation::new(
            Subtype::MissingComponent,
            Some("m/1".into()),
            None,
            "missing",
        );
        assert_eq!(v.category, Category::Resource);
        let v = DesignViolation::new(
            Subtype::TranslationX,
            Some("m/1".into()),
            Some("r3".into()),
            "moved",
        );
        assert_eq!(v.category, Category::Layout);
    }

    #[test]
    #[should_panic]
    fn violation_missing_with_impl_gc_panics() {
        let _ = DesignViolation::new(
            Subtype::MissingComponent,
            Some("m/1".into()),
            Some("r3".into()),
            "bad",
        );
    }

    #[test]
    fn config_defaults_match_contract() {
        let c = AnalysisConfig::default();
        assert_eq!(c.mt_for_width(1080), 135);
        assert_eq!(c.dt, 0.20);
        assert_eq!(c.lt, 5);
        assert_eq!(c.ct, 0.85);
        assert_eq!(c.idt, 0.20);
        assert_eq!(c.pid_fov_degrees, 45.0);
        assert_eq!(c.pid_luminance_cdm2, 100.0);
        assert_eq!(c.pid_color_factor, 1.0);
        assert!(c.exclusion_regions.is_empty());
        assert!(c.validate().is_ok());
    }

    #[test]
    fn box_iou_and_clamp() {
        let a = BoundingBox::new(0, 0, 10, 10);
        let b = BoundingBox::new(5, 0, 10, 10);
        assert!((a.iou(&b) - 50.0 / 150.0).abs() < 1e-12);
        let child = BoundingBox::new(-3, 2, 20, 5);
        let clamped = child.clamp_to(&a);
        assert_eq!(clamped, BoundingBox::new(0, 2, 10, 5));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let mut root = GuiComponent::new("x", BoundingBox::new(0, 0, 10, 10));
        root.children.push(GuiComponent::new("x", BoundingBox::new(0, 0, 5, 5)));
        let img = solid(10, 10, [0, 0, 0]);
        assert!(Screen::new(ScreenKind::Mockup, root, img).is_err());
    }
}
