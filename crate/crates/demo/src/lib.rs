//! Browser demo bindings: generate a synthetic screen pair with seeded
//! violations, run the full analysis on uploaded or generated bundles,
//! and explore the perceptual diff parameters interactively.
//!
//! Build with `wasm-pack build --target web crates/demo` (or
//! `cargo build --target wasm32-unknown-unknown` plus `wasm-bindgen`);
//! `www/index.html` loads the generated module.

use wasm_bindgen::prelude::*;

use uivet_core::detect::analyze;
use uivet_core::ingest::{emit_impl_xml, emit_mockup_spec, parse_bounds};
use uivet_core::inject::{
    self, generate_screen, CorpusOptions, InjectRule, ScreenRecipe,
};
use uivet_core::model::{AnalysisConfig, Raster};
use uivet_core::report::{annotate_screenshot, render_diff_overlay};
use uivet_core::vision::perceptual_diff;

fn png_bytes(img: &Raster) -> Result<Vec<u8>, JsError> {
    let mut out = std::io::Cursor::new(Vec::new());
    img.write_to(&mut out, image::ImageFormat::Png)
        .map_err(|e| JsError::new(&format!("png encode: {e}")))?;
    Ok(out.into_inner())
}

fn decode_png(bytes: &[u8]) -> Result<Raster, JsError> {
    let img = image::load_from_memory(bytes)
        .map_err(|e| JsError::new(&format!("png decode: {e}")))?;
    Ok(img.to_rgb8())
}

/// A generated mock-up/implementation pair with injected violations.
#[wasm_bindgen]
pub struct GeneratedPair {
    mockup_png: Vec<u8>,
    impl_png: Vec<u8>,
    mockup_spec: String,
    impl_xml: String,
    injected_json: String,
}

#[wasm_bindgen]
impl GeneratedPair {
    #[wasm_bindgen(getter)]
    pub fn mockup_png(&self) -> Vec<u8> {
        self.mockup_png.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn impl_png(&self) -> Vec<u8> {
        self.impl_png.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn mockup_spec(&self) -> String {
        self.mockup_spec.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn impl_xml(&self) -> String {
        self.impl_xml.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn injected_json(&self) -> String {
        self.injected_json.clone()
    }
}

/// Generates a screen pair and injects `n_violations` seeded faults
/// (1..=3). `kinds` filters the rule set with a comma-separated list of
/// `location,size,missing,image,image_color,component_color,font,font_color`;
/// empty means all.
#[wasm_bindgen]
pub fn generate_pair(seed: u32, n_violations: u32, kinds: &str) -> Result<GeneratedPair, JsError> {
    let n = n_violations.clamp(1, 3) as usize;
    let mut distribution: Vec<(InjectRule, f64)> = inject::default_distribution();
    if !kinds.trim().is_empty() {
        let wanted: Vec<&str> = kinds.split(',').map(str::trim).collect();
        let name = |r: InjectRule| match r {
            InjectRule::Location => "location",
            InjectRule::Size => "size",
            InjectRule::Missing => "missing",
            InjectRule::Image => "image",
            InjectRule::ImageColor => "image_color",
            InjectRule::ComponentColor => "component_color",
            InjectRule::Font => "font",
            InjectRule::FontColor => "font_color",
        };
        distribution.retain(|(r, _)| wanted.contains(&name(*r)));
        if distribution.is_empty() {
            return Err(JsError::new("no valid violation kinds selected"));
        }
        let share = 1.0 / distribution.len() as f64;
        for slot in distribution.iter_mut() {
            slot.1 = share;
        }
    }

    let dir = std::env::temp_dir().join(format!("uivet-demo-{seed}-{n}"));
    let _ = std::fs::remove_dir_all(&dir);
    let opts = CorpusOptions {
        n_screens: 1,
        total_violations: n,
        seed: seed as u64,
        distribution,
        recipe: ScreenRecipe::default(),
    };
    let (manifest, built) =
        inject::build_corpus(&opts, &dir).map_err(|e| JsError::new(&format!("{e}")))?;
    let screen = &built[0];
    let read = |name: &str| std::fs::read(screen.dir.join(name));
    let pair = GeneratedPair {
        mockup_png: read("mockup.png").map_err(|e| JsError::new(&format!("{e}")))?,
        impl_png: read("impl.png").map_err(|e| JsError::new(&format!("{e}")))?,
        mockup_spec: String::from_utf8_lossy(
            &read("mockup.spec").map_err(|e| JsError::new(&format!("{e}")))?,
        )
        .to_string(),
        impl_xml: String::from_utf8_lossy(
            &read("impl.xml").map_err(|e| JsError::new(&format!("{e}")))?,
        )
        .to_string(),
        injected_json: serde_json::to_string_pretty(&manifest.entries)
            .map_err(|e| JsError::new(&format!("{e}")))?,
    };
    let _ = std::fs::remove_dir_all(&dir);
    Ok(pair)
}

/// Result of one analysis run.
#[wasm_bindgen]
pub struct AnalysisResult {
    violations_json: String,
    annotated_png: Vec<u8>,
    diff_png: Vec<u8>,
    n_violations: u32,
}

#[wasm_bindgen]
impl AnalysisResult {
    #[wasm_bindgen(getter)]
    pub fn violations_json(&self) -> String {
        self.violations_json.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn annotated_png(&self) -> Vec<u8> {
        self.annotated_png.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn diff_png(&self) -> Vec<u8> {
        self.diff_png.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn n_violations(&self) -> u32 {
        self.n_violations
    }
}

/// Runs the full detection pipeline on a bundle (spec + dump + two PNGs)
/// with the given thresholds.
#[wasm_bindgen]
pub fn analyze_pair(
    mockup_spec: &str,
    mockup_png: &[u8],
    impl_xml: &str,
    impl_png: &[u8],
    lt: u32,
    dt: f64,
    ct: f64,
    idt: f64,
) -> Result<AnalysisResult, JsError> {
    let config = AnalysisConfig {
        lt,
        dt,
        ct,
        idt,
        ..AnalysisConfig::default()
    };
    config
        .validate()
        .map_err(|e| JsError::new(&format!("{e}")))?;

    let mock_shot = decode_png(mockup_png)?;
    let impl_shot = decode_png(impl_png)?;
    let mock = screen_from_spec(mockup_spec, mock_shot)?;
    let imp = screen_from_dump(impl_xml, impl_shot)?;
    let mock = uivet_core::ingest::scale_screen(&mock, imp.width, imp.height)
        .map_err(|e| JsError::new(&format!("{e}")))?;
    let analysis = analyze(&mock, &imp, &config).map_err(|e| JsError::new(&format!("{e}")))?;

    let annotated = annotate_screenshot(&imp, &analysis.violations);
    let overlay = render_diff_overlay(&imp.screenshot, &analysis.diff);
    Ok(AnalysisResult {
        violations_json: serde_json::to_string_pretty(&analysis.violations)
            .map_err(|e| JsError::new(&format!("{e}")))?,
        annotated_png: png_bytes(&annotated)?,
        diff_png: png_bytes(&overlay)?,
        n_violations: analysis.violations.len() as u32,
    })
}

fn screen_from_spec(
    spec: &str,
    screenshot: Raster,
) -> Result<uivet_core::model::Screen, JsError> {
    // Reuse the file parser via a round-trip through its string form.
    let doc = uivet_core::ingest::parse_mockup_spec(spec, "mockup.spec")
        .map_err(|e| JsError::new(&format!("{e}")))?;
    let emitted = serde_json::to_string(&doc).map_err(|e| JsError::new(&format!("{e}")))?;
    let doc2 = uivet_core::ingest::parse_mockup_spec(&emitted, "mockup.spec")
        .map_err(|e| JsError::new(&format!("{e}")))?;
    let _ = doc2;
    let dir = std::env::temp_dir().join(format!(
        "uivet-demo-spec-{}",
        screenshot.as_raw().iter().map(|&b| b as u64).sum::<u64>()
    ));
    std::fs::create_dir_all(&dir).map_err(|e| JsError::new(&format!("{e}")))?;
    std::fs::write(dir.join("m.spec"), spec).map_err(|e| JsError::new(&format!("{e}")))?;
    screenshot
        .save(dir.join("m.png"))
        .map_err(|e| JsError::new(&format!("{e}")))?;
    let screen = uivet_core::ingest::parse_mockup(&uivet_core::ingest::MockupBundle {
        spec_path: dir.join("m.spec"),
        screenshot_path: dir.join("m.png"),
    })
    .map_err(|e| JsError::new(&format!("{e}")))?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(screen)
}

fn screen_from_dump(
    xml: &str,
    screenshot: Raster,
) -> Result<uivet_core::model::Screen, JsError> {
    let dir = std::env::temp_dir().join(format!(
        "uivet-demo-dump-{}",
        screenshot.as_raw().iter().map(|&b| b as u64).sum::<u64>()
    ));
    std::fs::create_dir_all(&dir).map_err(|e| JsError::new(&format!("{e}")))?;
    std::fs::write(dir.join("ui.xml"), xml).map_err(|e| JsError::new(&format!("{e}")))?;
    screenshot
        .save(dir.join("i.png"))
        .map_err(|e| JsError::new(&format!("{e}")))?;
    let screen = uivet_core::ingest::parse_impl(&uivet_core::ingest::ImplBundle {
        dump_path: dir.join("ui.xml"),
        screenshot_path: dir.join("i.png"),
    })
    .map_err(|e| JsError::new(&format!("{e}")))?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(screen)
}

/// Perceptual-diff explorer: masks two equally sized PNGs under the given
/// field of view, adaptation luminance, and chroma factor.
#[wasm_bindgen]
pub struct DiffResult {
    diff_png: Vec<u8>,
    density: f64,
}

#[wasm_bindgen]
impl DiffResult {
    #[wasm_bindgen(getter)]
    pub fn diff_png(&self) -> Vec<u8> {
        self.diff_png.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn density(&self) -> f64 {
        self.density
    }
}

#[wasm_bindgen]
pub fn perceptual_mask(
    png_a: &[u8],
    png_b: &[u8],
    fov_degrees: f64,
    luminance: f64,
    color_factor: f64,
) -> Result<DiffResult, JsError> {
    let a = decode_png(png_a)?;
    let b = decode_png(png_b)?;
    let diff = perceptual_diff(&a, &b, fov_degrees, luminance, color_factor)
        .map_err(|e| JsError::new(&format!("{e}")))?;
    let overlay = render_diff_overlay(&a, &diff);
    Ok(DiffResult {
        diff_png: png_bytes(&overlay)?,
        density: diff.overall_density(),
    })
}

/// Version banner for the demo page.
#[wasm_bindgen]
pub fn toolkit_info() -> String {
    let _ = parse_bounds("[0,0][1,1]");
    let _ = emit_mockup_spec;
    let _ = emit_impl_xml;
    let _ = generate_screen;
    format!("uivet demo, core {}", env!("CARGO_PKG_VERSION"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_pair_analyzes_to_injected_count() {
        let pair = generate_pair(5, 2, "").unwrap();
        let result = analyze_pair(
            &pair.mockup_spec,
            &pair.mockup_png,
            &pair.impl_xml,
            &pair.impl_png,
            5,
            0.20,
            0.85,
            0.20,
        )
        .unwrap();
        assert!(result.n_violations >= 2, "expected the injected violations to surface");
        assert!(!result.annotated_png.is_empty());
        assert!(!result.diff_png.is_empty());
    }

    #[test]
    fn perceptual_mask_reports_density() {
        let pair = generate_pair(9, 1, "component_color").unwrap();
        let out = perceptual_mask(&pair.mockup_png, &pair.impl_png, 45.0, 100.0, 1.0).unwrap();
        assert!(out.density > 0.0);
        let same = perceptual_mask(&pair.mockup_png, &pair.mockup_png, 45.0, 100.0, 1.0).unwrap();
        assert_eq!(same.density, 0.0);
    }

    #[test]
    fn kind_filter_restricts_injections() {
        let pair = generate_pair(3, 1, "missing").unwrap();
        let injected: serde_json::Value = serde_json::from_str(&pair.injected_json).unwrap();
        assert_eq!(injected[0]["subtype"], "MissingComponent");
    }
}
