//! Report generation: a relocatable bundle with an HTML page, annotated
//! and difference images, per-violation crops, and a machine-readable
//! `report.json` that round-trips the violation list.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::detect::Analysis;
use crate::error::Result;
use crate::model::{crop, AnalysisConfig, BoundingBox, DesignViolation, Raster, Screen};
use crate::raster::{draw_text, fill_rect, FontFace};
use crate::vision::DifferenceImage;

const HIGHLIGHT: [u8; 3] = [255, 0, 0];
const BORDER_PX: u32 = 3;

#[derive(Debug, Serialize, Deserialize)]
pub struct ReportScreenInfo {
    pub width: u32,
    pub height: u32,
}

/// The machine-readable result document (`report.json`).
#[derive(Debug, Serialize, Deserialize)]
pub struct ReportDoc {
    pub screen: ReportScreenInfo,
    pub config: AnalysisConfig,
    pub generated_at: u64,
    pub violations: Vec<DesignViolation>,
}

impl ReportDoc {
    pub fn load(path: &Path) -> Result<ReportDoc> {
        let raw = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&raw)?)
    }
}

#[derive(Debug)]
pub struct ReportBundle {
    pub dir: PathBuf,
    pub violations: Vec<DesignViolation>,
}

fn draw_border(img: &mut Raster, b: &BoundingBox, thickness: u32, color: [u8; 3]) {
    let t = thickness;
    fill_rect(img, &BoundingBox::new(b.x, b.y, b.w, t), color);
    fill_rect(
        img,
        &BoundingBox::new(b.x, b.bottom() - t as i32, b.w, t),
        color,
    );
    fill_rect(img, &BoundingBox::new(b.x, b.y, t, b.h), color);
    fill_rect(
        img,
        &BoundingBox::new(b.right() - t as i32, b.y, t, b.h),
        color,
    );
}

fn draw_badge(img: &mut Raster, b: &BoundingBox, slot: usize, number: usize) {
    let size = 22u32;
    let x = b.x + (slot as i32) * (size as i32 + 2);
    let y = b.y - size as i32 - 2;
    let y = if y < 0 { b.y + 2 } else { y };
    let badge = BoundingBox::new(x, y, size, size);
    fill_rect(img, &badge, HIGHLIGHT);
    let text = number.to_string();
    let (tw, th) = crate::raster::text_box_size(&text, 2);
    draw_text(
        img,
        x + ((size.saturating_sub(tw)) / 2) as i32 + 1,
        y + ((size.saturating_sub(th)) / 2) as i32,
        2,
        FontFace::Block,
        [255, 255, 255],
        &text,
    );
}

/// Implementation screenshot with a highlight rectangle per violation and
/// stacked numbered badges where several violations hit one component.
pub fn annotate_screenshot(impl_screen: &Screen, violations: &[DesignViolation]) -> Raster {
    let mut img = impl_screen.screenshot.clone();
    let mut slots: std::collections::HashMap<String, usize> = std::collections::HashMap::new();
    for (i, v) in violations.iter().enumerate() {
        let Some(b) = v.anchor_box() else { continue };
        draw_border(&mut img, &b, BORDER_PX, HIGHLIGHT);
        let slot = slots.entry(b.to_csv()).or_insert(0);
        draw_badge(&mut img, &b, *slot, i + 1);
        *slot += 1;
    }
    img
}

/// Difference mask rendered over a dimmed grayscale of the screenshot.
pub fn render_diff_overlay(base: &Raster, diff: &DifferenceImage) -> Raster {
    let mut out = Raster::new(base.width(), base.height());
    for (i, (src, dst)) in base.pixels().zip(out.pixels_mut()).enumerate() {
        if i < diff.mask.len() && diff.mask[i] {
            dst.0 = HIGHLIGHT;
        } else {
            let g = ((0.299 * src.0[0] as f64 + 0.587 * src.0[1] as f64 + 0.114 * src.0[2] as f64)
                * 0.6) as u8;
            dst.0 = [g, g, g];
        }
    }
    out
}

/// Finds declarations of `resource_id`'s suffix under `src_dir/res`,
/// returning `(relative path, 1-based line)` pairs, path-sorted. A
/// missing `res/` directory yields an empty list.
pub fn link_source(resource_id: &str, src_dir: &Path) -> Result<Vec<(PathBuf, usize)>> {
    let suffix = resource_id.rsplit("id/").next().unwrap_or(resource_id);
    if suffix.is_empty() {
        return Ok(Vec::new());
    }
    let res_dir = src_dir.join("res");
    if !res_dir.exists() {
        return Ok(Vec::new());
    }
    let needles = [format!("@+id/{suffix}"), format!("@id/{suffix}")];
    let boundary = |line: &str, needle: &str| {
        line.match_indices(needle).any(|(at, _)| {
            line[at + needle.len()..]
                .chars()
                .next()
                .map_or(true, |c| !c.is_alphanumeric() && c != '_')
        })
    };
    let mut hits = Vec::new();
    for entry in walkdir::WalkDir::new(&res_dir).sort_by_file_name() {
        let entry = entry.map_err(|e| {
            crate::error::Error::Io(std::io::Error::other(format!("scan failed: {e}")))
        })?;
        if !entry.file_type().is_file()
            || entry.path().extension().and_then(|e| e.to_str()) != Some("xml")
        {
            continue;
        }
        let content = std::fs::read_to_string(entry.path())?;
        for (lineno, line) in content.lines().enumerate() {
            if needles.iter().any(|n| boundary(line, n)) {
                let rel = entry
                    .path()
                    .strip_prefix(src_dir)
                    .unwrap_or(entry.path())
                    .to_path_buf();
                hits.push((rel, lineno + 1));
            }
        }
    }
    hits.sort();
    Ok(hits)
}

fn html_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn swatches(colors: &str) -> String {
    colors
        .split(',')
        .filter(|c| !c.is_empty())
        .map(|c| {
            format!(
                "<span class=\"swatch\" style=\"background:{c}\"></span><code>{c}</code> "
            )
        })
        .collect()
}

/// Writes the full report bundle into `out_dir` and returns the enriched
/// violation list (crop references and source links added to evidence).
/// All referenced paths are relative, so the bundle is relocatable.
pub fn render_report(
    mockup: &Screen,
    impl_screen: &Screen,
    analysis: &Analysis,
    config: &AnalysisConfig,
    out_dir: &Path,
    src_dir: Option<&Path>,
    timestamp: Option<u64>,
) -> Result<ReportBundle> {
    std::fs::create_dir_all(out_dir)?;
    std::fs::create_dir_all(out_dir.join("crops"))?;

    let mut violations = analysis.violations.clone();

    // Crops of the affected components from both screenshots.
    for (i, v) in violations.iter_mut().enumerate() {
        if let Some(b) = v
            .evidence
            .get("mockup_box")
            .and_then(|s| BoundingBox::from_csv(s))
        {
            if let Ok(piece) = crop(mockup, &b) {
                let rel = format!("crops/v{i:03}_mockup.png");
                piece.save(out_dir.join(&rel))?;
                v.evidence.insert("mockup_crop".into(), rel);
            }
        }
        if let Some(b) = v
            .evidence
            .get("impl_box")
            .and_then(|s| BoundingBox::from_csv(s))
        {
            if let Ok(piece) = crop(impl_screen, &b) {
                let rel = format!("crops/v{i:03}_impl.png");
                piece.save(out_dir.join(&rel))?;
                v.evidence.insert("impl_crop".into(), rel);
            }
        }
        if let (Some(src), Some(impl_id)) = (src_dir, v.impl_gc.clone()) {
            if let Some(gc) = impl_screen.find(&impl_id) {
                if let Some(res_id) = &gc.resource_id {
                    let links = link_source(res_id, src)?;
                    if !links.is_empty() {
                        let joined = links
                            .iter()
                            .map(|(p, l)| format!("{}:{l}", p.display()))
                            .collect::<Vec<_>>()
                            .join(";");
                        v.evidence.insert("source_links".into(), joined);
                    }
                }
            }
        }
    }

    mockup.screenshot.save(out_dir.join("mockup.png"))?;
    impl_screen.screenshot.save(out_dir.join("impl.png"))?;
    annotate_screenshot(impl_screen, &violations).save(out_dir.join("annotated.png"))?;
    render_diff_overlay(&impl_screen.screenshot, &analysis.diff)
        .save(out_dir.join("diff.png"))?;

    let generated_at = timestamp.unwrap_or_else(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let doc = ReportDoc {
        screen: ReportScreenInfo {
            width: impl_screen.width,
            height: impl_screen.height,
        },
        config: config.clone(),
        generated_at,
        violations: violations.clone(),
    };
    let mut json = serde_json::to_string_pretty(&doc)?;
    json.push('\n');
    std::fs::write(out_dir.join("report.json"), json)?;

    let html = render_html(&doc);
    std::fs::write(out_dir.join("index.html"), html)?;

    Ok(ReportBundle {
        dir: out_dir.to_path_buf(),
        violations,
    })
}

fn render_html(doc: &ReportDoc) -> String {
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\">\n");
    out.push_str("<title>GUI verification report</title>\n<style>\n");
    out.push_str(
        "body{font-family:sans-serif;margin:24px;max-width:1100px}\
         .violation{border:1px solid #ccc;border-radius:6px;padding:12px;margin:16px 0}\
         .violation h3{margin-top:0}\
         .crops img{border:1px solid #999;margin-right:12px;max-width:320px;image-rendering:pixelated}\
         .swatch{display:inline-block;width:18px;height:18px;border:1px solid #333;\
                 vertical-align:middle;margin:0 4px}\
         table.evidence{border-collapse:collapse;font-size:13px}\
         table.evidence td{border:1px solid #ddd;padding:2px 8px}\
         img.shot{max-width:420px;border:1px solid #999}\n",
    );
    out.push_str("</style></head><body>\n");
    out.push_str("<h1>GUI verification report</h1>\n");
    out.push_str(&format!(
        "<p>Screen {}x{} &middot; generated_at {} &middot; {} violation(s)</p>\n",
        doc.screen.width,
        doc.screen.height,
        doc.generated_at,
        doc.violations.len()
    ));

    if doc.violations.is_empty() {
        out.push_str("<p><strong>No design violations detected.</strong></p>\n");
    }
    out.push_str(
        "<p><img class=\"shot\" src=\"mockup.png\" alt=\"mock-up\">\n\
         <img class=\"shot\" src=\"annotated.png\" alt=\"implementation, annotated\"></p>\n",
    );

    for (i, v) in doc.violations.iter().enumerate() {
        out.push_str(&format!(
            "<div class=\"violation\" id=\"v{}\">\n<h3>{}. {:?} &mdash; {:?}</h3>\n",
            i + 1,
            i + 1,
            v.category,
            v.subtype
        ));
        out.push_str(&format!("<p>{}</p>\n", html_escape(&v.description)));
        out.push_str("<p class=\"crops\">");
        if let Some(p) = v.evidence.get("mockup_crop") {
            out.push_str(&format!("<img src=\"{p}\" alt=\"mock-up crop\">"));
        }
        if let Some(p) = v.evidence.get("impl_crop") {
            out.push_str(&format!("<img src=\"{p}\" alt=\"implementation crop\">"));
        }
        out.push_str("</p>\n");
        if let Some(colors) = v.evidence.get("mockup_top_colors") {
            out.push_str(&format!("<p>Mock-up colors: {}</p>\n", swatches(colors)));
        }
        if let Some(colors) = v.evidence.get("impl_top_colors") {
            out.push_str(&format!(
                "<p>Implementation colors: {}</p>\n",
                swatches(colors)
            ));
        }
        if let Some(links) = v.evidence.get("source_links") {
            out.push_str("<p>Declared at: ");
            for link in links.split(';') {
                out.push_str(&format!("<code>{}</code> ", html_escape(link)));
            }
            out.push_str("</p>\n");
        }
        out.push_str("<table class=\"evidence\">\n");
        for (k, val) in &v.evidence {
            if k.ends_with("_crop") || k == "source_links" {
                continue;
            }
            out.push_str(&format!(
                "<tr><td>{}</td><td>{}</td></tr>\n",
                html_escape(k),
                html_escape(val)
            ));
        }
        out.push_str("</table>\n</div>\n");
    }

    out.push_str(
        "<details><summary>Perceptual difference image</summary>\
         <p><img class=\"shot\" src=\"diff.png\" alt=\"difference image\"></p></details>\n",
    );
    out.push_str("</body></html>\n");
    out
}
