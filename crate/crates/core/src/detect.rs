//! The violation manager: orchestrates leaf matching and the vision
//! kernel into classified design violations.
//!
//! Layout checks are geometric and run on every matched pair. Visual
//! checks (text and resource detectors) run only on suspicious pairs,
//! i.e. pairs whose perceptual-difference density inside the
//! implementation box exceeds the difference threshold.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matching::{self, MatchResult};
use crate::model::{
    crop, leaf_components, AnalysisConfig, BoundingBox, DesignViolation, GuiComponent, Raster,
    Screen, Subtype,
};
use crate::raster::resize_nearest;
use crate::vision::{
    binarize, diff_density, histogram, histogram_similarity, perceptual_diff, top_colors,
    DifferenceImage,
};

/// A matched pair whose difference density cleared the DT gate.
#[derive(Debug, Clone, PartialEq)]
pub struct SuspiciousPair {
    pub mockup_id: String,
    pub impl_id: String,
    pub density: f64,
}

/// Full result of one screen comparison. `violations` is the
/// classified list; the rest feeds report rendering.
#[derive(Debug)]
pub struct Analysis {
    pub violations: Vec<DesignViolation>,
    pub diff: DifferenceImage,
    pub match_result: MatchResult,
    pub suspicious: Vec<SuspiciousPair>,
}

fn hex(c: [u8; 3]) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn color_list(h: &crate::vision::ColorHistogram) -> String {
    top_colors(h, 3)
        .into_iter()
        .map(hex)
        .collect::<Vec<_>>()
        .join(",")
}

fn display_name(mock: Option<&GuiComponent>, impl_gc: Option<&GuiComponent>) -> String {
    if let Some(m) = mock {
        if let Some(name) = &m.name {
            return name.clone();
        }
    }
    if let Some(r) = impl_gc {
        if let Some(res) = &r.resource_id {
            if let Some(suffix) = res.rsplit("id/").next() {
                return suffix.to_string();
            }
        }
        if let Some(class) = &r.class_name {
            if let Some(short) = class.rsplit('.').next() {
                return short.to_string();
            }
        }
    }
    mock.map(|g| g.id.clone())
        .or_else(|| impl_gc.map(|g| g.id.clone()))
        .unwrap_or_else(|| "component".to_string())
}

fn base_violation(
    subtype: Subtype,
    mock: Option<&GuiComponent>,
    impl_gc: Option<&GuiComponent>,
    description: String,
) -> DesignViolation {
    let mut v = DesignViolation::new(
        subtype,
        mock.map(|g| g.id.clone()),
        impl_gc.map(|g| g.id.clone()),
        description,
    );
    if let Some(m) = mock {
        v = v.with_evidence("mockup_box", m.bounds.to_csv());
    }
    if let Some(r) = impl_gc {
        v = v.with_evidence("impl_box", r.bounds.to_csv());
    }
    v
}

/// Layout detector: translation and size families, each firing when its
/// delta strictly exceeds the layout threshold. At most two violations
/// per pair (one per family).
pub fn detect_layout(
    mock: &GuiComponent,
    impl_gc: &GuiComponent,
    config: &AnalysisConfig,
) -> Vec<DesignViolation> {
    let lt = config.lt as i64;
    let name = display_name(Some(mock), Some(impl_gc));
    let dx = impl_gc.bounds.x as i64 - mock.bounds.x as i64;
    let dy = impl_gc.bounds.y as i64 - mock.bounds.y as i64;
    let dw = impl_gc.bounds.w as i64 - mock.bounds.w as i64;
    let dh = impl_gc.bounds.h as i64 - mock.bounds.h as i64;
    let mut out = Vec::new();

    let tx = dx.abs() > lt;
    let ty = dy.abs() > lt;
    if tx || ty {
        let (subtype, what) = match (tx, ty) {
            (true, false) => (Subtype::TranslationX, format!("{dx}px horizontally")),
            (false, true) => (Subtype::TranslationY, format!("{dy}px vertically")),
            _ => (
                Subtype::TranslationXY,
                format!("{dx}px horizontally and {dy}px vertically"),
            ),
        };
        out.push(
            base_violation(
                subtype,
                Some(mock),
                Some(impl_gc),
                format!("Component \"{name}\" is displaced by {what} from its intended position."),
            )
            .with_evidence("dx", dx.to_string())
            .with_evidence("dy", dy.to_string()),
        );
    }

    let sw = dw.abs() > lt;
    let sh = dh.abs() > lt;
    if sw || sh {
        let (subtype, what) = match (sw, sh) {
            (true, false) => (Subtype::SizeWidth, format!("width differs by {dw}px")),
            (false, true) => (Subtype::SizeHeight, format!("height differs by {dh}px")),
            _ => (
                Subtype::SizeBoth,
                format!("width differs by {dw}px and height by {dh}px"),
            ),
        };
        out.push(
            base_violation(
                subtype,
                Some(mock),
                Some(impl_gc),
                format!("Component \"{name}\" has the wrong size: {what}."),
            )
            .with_evidence("dw", dw.to_string())
            .with_evidence("dh", dh.to_string()),
        );
    }
    out
}

/// A pair is text-based when the implementation class is a text widget or
/// either side carries non-empty text.
pub fn is_text_based(mock: &GuiComponent, impl_gc: &GuiComponent) -> bool {
    if let Some(class) = &impl_gc.class_name {
        if class.contains("TextView") || class.contains("EditText") {
            return true;
        }
    }
    let has_text = |t: &Option<String>| t.as_deref().is_some_and(|s| !s.trim().is_empty());
    has_text(&mock.text) || has_text(&impl_gc.text)
}

fn normalize_text(t: Option<&str>) -> String {
    t.unwrap_or("")
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase()
}

/// Text detector, in check order: content mismatch, then font color, then
/// font style (the latter only when the pair has no layout violation).
/// At most one violation.
pub fn detect_text(
    mock: &GuiComponent,
    impl_gc: &GuiComponent,
    mock_crop: &Raster,
    impl_crop: &Raster,
    has_layout_violation: bool,
    config: &AnalysisConfig,
) -> Result<Vec<DesignViolation>> {
    let name = display_name(Some(mock), Some(impl_gc));
    let norm_m = normalize_text(mock.text.as_deref());
    let norm_r = normalize_text(impl_gc.text.as_deref());
    if norm_m != norm_r {
        return Ok(vec![base_violation(
            Subtype::TextContent,
            Some(mock),
            Some(impl_gc),
            format!(
                "Component \"{name}\" displays the wrong text: expected {:?}, found {:?}.",
                mock.text.as_deref().unwrap_or(""),
                impl_gc.text.as_deref().unwrap_or("")
            ),
        )
        .with_evidence("mockup_text", mock.text.clone().unwrap_or_default())
        .with_evidence("impl_text", impl_gc.text.clone().unwrap_or_default())
        .with_evidence("normalized_mockup", norm_m)
        .with_evidence("normalized_impl", norm_r)]);
    }

    let hm = histogram(mock_crop);
    let hr = histogram(impl_crop);
    let sim = histogram_similarity(&hm, &hr)?;
    if sim < config.ct {
        return Ok(vec![base_violation(
            Subtype::FontColor,
            Some(mock),
            Some(impl_gc),
            format!(
                "Text component \"{name}\" uses the wrong font color (histogram similarity {sim:.3})."
            ),
        )
        .with_evidence("histogram_similarity", format!("{sim:.6}"))
        .with_evidence("mockup_top_colors", color_list(&hm))
        .with_evidence("impl_top_colors", color_list(&hr))]);
    }

    if !has_layout_violation {
        return Ok(vec![base_violation(
            Subtype::FontStyle,
            Some(mock),
            Some(impl_gc),
            format!(
                "Text component \"{name}\" appears to use the wrong font style: the rendering differs although text and colors match."
            ),
        )
        .with_evidence("histogram_similarity", format!("{sim:.6}"))]);
    }
    Ok(Vec::new())
}

/// Resource detector: a binarized perceptual diff separates content
/// differences (incorrect image) from pure color differences, which the
/// histogram check then classifies by widget class. At most one
/// violation. Crops of unequal size are first resampled to the mock-up
/// crop's dimensions.
pub fn detect_resource(
    mock: &GuiComponent,
    impl_gc: &GuiComponent,
    mock_crop: &Raster,
    impl_crop: &Raster,
    config: &AnalysisConfig,
) -> Result<Vec<DesignViolation>> {
    let name = display_name(Some(mock), Some(impl_gc));
    let resized;
    let impl_aligned: &Raster = if impl_crop.dimensions() != mock_crop.dimensions() {
        resized = resize_nearest(impl_crop, mock_crop.width(), mock_crop.height());
        &resized
    } else {
        impl_crop
    };

    let bin_m = binarize(mock_crop);
    let bin_r = binarize(impl_aligned);
    let bdiff = perceptual_diff(
        &bin_m,
        &bin_r,
        config.pid_fov_degrees,
        config.pid_luminance_cdm2,
        config.pid_color_factor,
    )?;
    let b_density = bdiff.overall_density();
    if b_density > config.idt {
        return Ok(vec![base_violation(
            Subtype::IncorrectImage,
            Some(mock),
            Some(impl_gc),
            format!(
                "Component \"{name}\" shows the wrong image content (binarized difference density {b_density:.3})."
            ),
        )
        .with_evidence("b_pid_density", format!("{b_density:.6}"))]);
    }

    let hm = histogram(mock_crop);
    let hr = histogram(impl_crop);
    let sim = histogram_similarity(&hm, &hr)?;
    if sim < config.ct {
        let is_image = impl_gc
            .class_name
            .as_deref()
            .is_some_and(|c| c.contains("Image"));
        let subtype = if is_image {
            Subtype::ImageColor
        } else {
            Subtype::ComponentColor
        };
        let kind = if is_image { "image" } else { "component" };
        return Ok(vec![base_violation(
            subtype,
            Some(mock),
            Some(impl_gc),
            format!(
                "Component \"{name}\" uses the wrong {kind} color (histogram similarity {sim:.3})."
            ),
        )
        .with_evidence("b_pid_density", format!("{b_density:.6}"))
        .with_evidence("histogram_similarity", format!("{sim:.6}"))
        .with_evidence("mockup_top_colors", color_list(&hm))
        .with_evidence("impl_top_colors", color_list(&hr))]);
    }
    Ok(Vec::new())
}

/// Per-pixel exclusion bitmap for the configured dynamic-content regions.
pub struct ExclusionMask {
    width: u32,
    height: u32,
    mask: Vec<bool>,
    any: bool,
}

impl ExclusionMask {
    pub fn new(config: &AnalysisConfig, width: u32, height: u32) -> Self {
        let mut mask = vec![false; (width as usize) * (height as usize)];
        let canvas = BoundingBox::new(0, 0, width, height);
        let mut any = false;
        for region in &config.exclusion_regions {
            if let Some(b) = region.intersect(&canvas) {
                any = true;
                for y in b.y..b.bottom() {
                    for x in b.x..b.right() {
                        mask[(y as usize) * (width as usize) + x as usize] = true;
                    }
                }
            }
        }
        Self {
            width,
            height,
            mask,
            any,
        }
    }

    /// Fraction of `region ∩ canvas` covered by exclusion regions.
    pub fn covered_fraction(&self, region: &BoundingBox) -> f64 {
        if !self.any {
            return 0.0;
        }
        let canvas = BoundingBox::new(0, 0, self.width, self.height);
        let Some(b) = region.intersect(&canvas) else {
            return 0.0;
        };
        let mut n = 0u64;
        for y in b.y..b.bottom() {
            for x in b.x..b.right() {
                if self.mask[(y as usize) * (self.width as usize) + x as usize] {
                    n += 1;
                }
            }
        }
        n as f64 / b.area() as f64
    }

    pub fn clear_in(&self, diff: &mut DifferenceImage) {
        if !self.any {
            return;
        }
        for (i, &ex) in self.mask.iter().enumerate() {
            if ex {
                diff.mask[i] = false;
            }
        }
    }
}

/// Runs the full comparison pipeline on two same-dimension screens.
pub fn analyze(mockup: &Screen, impl_screen: &Screen, config: &AnalysisConfig) -> Result<Analysis> {
    if (mockup.width, mockup.height) != (impl_screen.width, impl_screen.height) {
        return Err(Error::DimensionMismatch {
            expected_w: impl_screen.width,
            expected_h: impl_screen.height,
            found_w: mockup.width,
            found_h: mockup.height,
        });
    }

    let mock_leaves_owned: Vec<GuiComponent> =
        leaf_components(mockup).into_iter().cloned().collect();
    let impl_leaves: Vec<&GuiComponent> = leaf_components(impl_screen);
    let impl_leaves_owned: Vec<GuiComponent> = impl_leaves.iter().map(|g| (*g).clone()).collect();

    // Mock-up preprocessing: collapse heavy overlaps, then merge
    // fragments that sit closer to a sibling than to any impl leaf.
    let overlap = matching::merge_overlapping(mock_leaves_owned);
    let fragments = matching::merge_fragmented(overlap.leaves, &impl_leaves_owned);
    let mut merges = overlap.merges;
    merges.extend(fragments.merges);
    let mock_leaves = fragments.leaves;

    let mut match_result =
        matching::match_leaves(&mock_leaves, &impl_leaves_owned, config, impl_screen.width);
    match_result.merges = merges;

    let exclusion = ExclusionMask::new(config, impl_screen.width, impl_screen.height);

    let mock_by_id: BTreeMap<&str, &GuiComponent> =
        mock_leaves.iter().map(|g| (g.id.as_str(), g)).collect();
    let impl_by_id: BTreeMap<&str, &GuiComponent> =
        impl_leaves_owned.iter().map(|g| (g.id.as_str(), g)).collect();

    let mut violations: Vec<DesignViolation> = Vec::new();

    // Missing / extraneous components.
    for mid in &match_result.unmatched_mockup {
        let gc = mock_by_id[mid.as_str()];
        if exclusion.covered_fraction(&gc.bounds) > 0.5 {
            continue;
        }
        let name = display_name(Some(gc), None);
        violations.push(base_violation(
            Subtype::MissingComponent,
            Some(gc),
            None,
            format!("Component \"{name}\" from the mock-up is missing in the implementation."),
        ));
    }
    for rid in &match_result.unmatched_impl {
        let gc = impl_by_id[rid.as_str()];
        if exclusion.covered_fraction(&gc.bounds) > 0.5 {
            continue;
        }
        let name = display_name(None, Some(gc));
        violations.push(base_violation(
            Subtype::ExtraneousComponent,
            None,
            Some(gc),
            format!("Component \"{name}\" in the implementation has no mock-up counterpart."),
        ));
    }

    // One perceptual diff over the full screenshots feeds suspicious-pair
    // selection; excluded regions are cleared before density queries.
    let mut diff = perceptual_diff(
        &mockup.screenshot,
        &impl_screen.screenshot,
        config.pid_fov_degrees,
        config.pid_luminance_cdm2,
        config.pid_color_factor,
    )?;
    exclusion.clear_in(&mut diff);

    let mut suspicious = Vec::new();
    for pair in &match_result.pairs {
        let mock_gc = mock_by_id[pair.mockup_id.as_str()];
        let impl_gc = impl_by_id[pair.impl_id.as_str()];
        if exclusion.covered_fraction(&impl_gc.bounds) > 0.5 {
            continue;
        }

        let layout = detect_layout(mock_gc, impl_gc, config);
        let has_layout = !layout.is_empty();
        for v in layout {
            violations.push(v.with_evidence("gamma", pair.gamma.to_string()));
        }

        if impl_gc.bounds.area() == 0 {
            continue; // degenerate boxes are never suspicious
        }
        let density = match diff_density(&diff, &impl_gc.bounds) {
            Ok(d) => d,
            Err(_) => continue,
        };
        if density <= config.dt {
            continue;
        }
        suspicious.push(SuspiciousPair {
            mockup_id: pair.mockup_id.clone(),
            impl_id: pair.impl_id.clone(),
            density,
        });

        let (Ok(mock_crop), Ok(impl_crop)) = (
            crop(mockup, &mock_gc.bounds),
            crop(impl_screen, &impl_gc.bounds),
        ) else {
            continue;
        };

        let found = if is_text_based(mock_gc, impl_gc) {
            detect_text(mock_gc, impl_gc, &mock_crop, &impl_crop, has_layout, config)?
        } else {
            detect_resource(mock_gc, impl_gc, &mock_crop, &impl_crop, config)?
        };
        for v in found {
            violations.push(v.with_evidence("density", format!("{density:.6}")));
        }
    }

    // Canonical ordering: implementation pre-order first, mock-up-only
    // violations (missing) after, then subtype.
    let impl_order = impl_screen.preorder_index();
    let mock_order = mockup.preorder_index();
    let sort_key = |v: &DesignViolation| {
        let primary = match &v.impl_gc {
            Some(id) => (0usize, impl_order.get(id).copied().unwrap_or(usize::MAX)),
            None => (
                1usize,
                v.mockup_gc
                    .as_ref()
                    .and_then(|id| mock_order.get(id).copied())
                    .unwrap_or(usize::MAX),
            ),
        };
        (primary, v.subtype)
    };
    violations.sort_by(|a, b| sort_key(a).cmp(&sort_key(b)).then(a.mockup_gc.cmp(&b.mockup_gc)));

    Ok(Analysis {
        violations,
        diff,
        match_result,
        suspicious,
    })
}
