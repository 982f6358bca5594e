//! Parses mock-up spec bundles and runtime hierarchy dumps (plus their
//! screenshots) into [`Screen`] values, and emits both document formats
//! back out for corpus generation and round-trip checks.
//!
//! Mock-up spec: UTF-8 JSON `{canvas:{width,height}, objects:[...]}`,
//! each object `{name, x, y, width, height, text?, font?, children?}`,
//! integer pixels, origin top-left.
//!
//! Runtime dump: uiautomator-shaped XML `<node>` hierarchy with `bounds`
//! (`[x1,y1][x2,y2]`, bottom-right exclusive), `class`, `text`,
//! `resource-id` attributes. Unrecognized attributes are ignored.

use std::path::{Path, PathBuf};

use quick_xml::events::{BytesStart, Event};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BoundingBox, GuiComponent, Raster, Screen, ScreenKind};

#[derive(Debug, Clone)]
pub struct MockupBundle {
    pub spec_path: PathBuf,
    pub screenshot_path: PathBuf,
}

#[derive(Debug, Clone)]
pub struct ImplBundle {
    pub dump_path: PathBuf,
    pub screenshot_path: PathBuf,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpecDoc {
    pub canvas: SpecCanvas,
    #[serde(default)]
    pub objects: Vec<SpecObject>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpecCanvas {
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SpecObject {
    pub name: String,
    pub x: i32,
    pub y: i32,
    pub width: u32,
    pub height: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub font: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<SpecObject>,
}

/// Loads a PNG as 8-bit RGB, flattening any alpha against white.
pub fn load_png_rgb(path: &Path) -> Result<Raster> {
    let dynimg = image::open(path)?;
    Ok(flatten_on_white(&dynimg))
}

fn flatten_on_white(img: &image::DynamicImage) -> Raster {
    let rgba = img.to_rgba8();
    let mut out = Raster::new(rgba.width(), rgba.height());
    for (src, dst) in rgba.pixels().zip(out.pixels_mut()) {
        let a = src.0[3] as u32;
        for c in 0..3 {
            let v = src.0[c] as u32;
            dst.0[c] = ((v * a + 255 * (255 - a) + 127) / 255) as u8;
        }
    }
    out
}

fn clamp_children(gc: &mut GuiComponent) {
    for child in &mut gc.children {
        child.bounds = child.bounds.clamp_to(&gc.bounds);
        clamp_children(child);
    }
}

/// Parses a mock-up bundle into a `Screen{kind: Mockup}` whose hierarchy
/// mirrors the spec's nesting. Mock-up GC ids are the object's path in
/// the document, e.g. `m/0/2`.
pub fn parse_mockup(bundle: &MockupBundle) -> Result<Screen> {
    let raw = std::fs::read_to_string(&bundle.spec_path)?;
    let screenshot = load_png_rgb(&bundle.screenshot_path)?;
    parse_mockup_parts(&raw, &bundle.spec_path.display().to_string(), screenshot)
}

/// In-memory variant of [`parse_mockup`].
pub fn parse_mockup_parts(spec_src: &str, path_label: &str, screenshot: Raster) -> Result<Screen> {
    let doc = parse_mockup_spec(spec_src, path_label)?;
    if screenshot.dimensions() != (doc.canvas.width, doc.canvas.height) {
        return Err(Error::DimensionMismatch {
            expected_w: doc.canvas.width,
            expected_h: doc.canvas.height,
            found_w: screenshot.width(),
            found_h: screenshot.height(),
        });
    }
    let root = spec_tree_to_gc(&doc);
    Screen::new(ScreenKind::Mockup, root, screenshot)
}

pub fn parse_mockup_spec(raw: &str, path: &str) -> Result<SpecDoc> {
    serde_json::from_str(raw).map_err(|e| Error::Parse {
        path: path.to_string(),
        message: format!("line {}, column {}: {}", e.line(), e.column(), e),
    })
}

fn spec_tree_to_gc(doc: &SpecDoc) -> GuiComponent {
    let mut root = GuiComponent::new(
        "m",
        BoundingBox::new(0, 0, doc.canvas.width, doc.canvas.height),
    );
    root.name = Some("canvas".to_string());
    for (i, obj) in doc.objects.iter().enumerate() {
        root.children.push(spec_object_to_gc(obj, &format!("m/{i}")));
    }
    clamp_children(&mut root);
    root
}

fn spec_object_to_gc(obj: &SpecObject, id: &str) -> GuiComponent {
    let mut gc = GuiComponent::new(id, BoundingBox::new(obj.x, obj.y, obj.width, obj.height));
    gc.name = Some(obj.name.clone());
    gc.text = obj.text.clone();
    gc.font = obj.font.clone();
    for (i, child) in obj.children.iter().enumerate() {
        gc.children.push(spec_object_to_gc(child, &format!("{id}/{i}")));
    }
    gc
}

/// Parses the exact `[x1,y1][x2,y2]` bounds pattern; width is x2 - x1
/// (bottom-right exclusive).
pub fn parse_bounds(raw: &str) -> Result<BoundingBox> {
    let err = || Error::BoundsFormat { raw: raw.to_string() };
    let inner = raw.strip_prefix('[').ok_or_else(err)?;
    let (first, rest) = inner.split_once("][").ok_or_else(err)?;
    let second = rest.strip_suffix(']').ok_or_else(err)?;
    let parse_pair = |s: &str| -> Result<(i32, i32)> {
        let (a, b) = s.split_once(',').ok_or_else(err)?;
        let a: i32 = a.trim().parse().map_err(|_| err())?;
        let b: i32 = b.trim().parse().map_err(|_| err())?;
        Ok((a, b))
    };
    let (x1, y1) = parse_pair(first)?;
    let (x2, y2) = parse_pair(second)?;
    if x2 < x1 || y2 < y1 {
        return Err(err());
    }
    Ok(BoundingBox::new(x1, y1, (x2 - x1) as u32, (y2 - y1) as u32))
}

#[derive(Debug)]
struct DumpNode {
    bounds: BoundingBox,
    class: Option<String>,
    text: Option<String>,
    resource_id: Option<String>,
    children: Vec<DumpNode>,
}

fn dump_node_from_tag(e: &BytesStart<'_>, path: &str) -> Result<DumpNode> {
    let parse_err = |message: String| Error::Parse {
        path: path.to_string(),
        message,
    };
    let mut bounds = None;
    let mut class = None;
    let mut text = None;
    let mut resource_id = None;
    for attr in e.attributes() {
        let attr = attr.map_err(|e| parse_err(format!("{e}")))?;
        let key = String::from_utf8_lossy(attr.key.as_ref()).to_string();
        let value = attr
            .unescape_value()
            .map_err(|e| parse_err(format!("{e}")))?
            .to_string();
        match key.as_str() {
            "bounds" => bounds = Some(parse_bounds(&value)?),
            "class" => class = Some(value),
            "text" => text = Some(value),
            "resource-id" => resource_id = Some(value),
            _ => {} // forward compatibility: unknown attributes are fine
        }
    }
    let bounds = bounds.ok_or_else(|| parse_err("node missing bounds attribute".into()))?;
    Ok(DumpNode {
        bounds,
        class,
        text,
        resource_id,
        children: Vec::new(),
    })
}

fn parse_dump_xml(raw: &str, path: &str) -> Result<Vec<DumpNode>> {
    let mut reader = quick_xml::Reader::from_str(raw);
    reader.config_mut().trim_text(true);
    let mut roots: Vec<DumpNode> = Vec::new();
    // One entry per open element; None for wrappers like <hierarchy>.
    let mut stack: Vec<Option<DumpNode>> = Vec::new();
    let parse_err = |message: String| Error::Parse {
        path: path.to_string(),
        message,
    };

    fn attach(node: DumpNode, stack: &mut [Option<DumpNode>], roots: &mut Vec<DumpNode>) {
        for slot in stack.iter_mut().rev() {
            if let Some(parent) = slot {
                parent.children.push(node);
                return;
            }
        }
        roots.push(node);
    }

    loop {
        match reader.read_event() {
            Err(e) => return Err(parse_err(format!("{e}"))),
            Ok(Event::Eof) => break,
            Ok(Event::Start(e)) => {
                let entry = if e.name().as_ref() == b"node" {
                    Some(dump_node_from_tag(&e, path)?)
                } else {
                    None
                };
                stack.push(entry);
            }
            Ok(Event::Empty(e)) => {
                if e.name().as_ref() == b"node" {
                    let node = dump_node_from_tag(&e, path)?;
                    attach(node, &mut stack, &mut roots);
                }
            }
            Ok(Event::End(_)) => match stack.pop() {
                Some(Some(node)) => attach(node, &mut stack, &mut roots),
                Some(None) => {}
                None => return Err(parse_err("unbalanced closing tag".into())),
            },
            Ok(_) => {}
        }
    }
    if !stack.is_empty() {
        return Err(parse_err("unclosed element".into()));
    }
    Ok(roots)
}

/// Implementation GC ids: `r{preorder}` plus the resource-id suffix when
/// one is present, e.g. `r4#login_btn`.
fn impl_gc_id(preorder: usize, resource_id: Option<&str>) -> String {
    match resource_id.and_then(|r| r.rsplit("id/").next()).filter(|s| !s.is_empty()) {
        Some(suffix) => format!("r{preorder}#{suffix}"),
        None => format!("r{preorder}"),
    }
}

fn dump_to_gc(node: &DumpNode, counter: &mut usize) -> GuiComponent {
    let id = impl_gc_id(*counter, node.resource_id.as_deref());
    *counter += 1;
    let mut gc = GuiComponent::new(id, node.bounds);
    gc.class_name = node.class.clone();
    gc.text = node.text.clone().filter(|t| !t.is_empty());
    gc.resource_id = node.resource_id.clone().filter(|t| !t.is_empty());
    for child in &node.children {
        gc.children.push(dump_to_gc(child, counter));
    }
    gc
}

/// Parses a runtime bundle into a `Screen{kind: Implementation}`. The
/// canvas comes from the screenshot; nodes are clamped into it (real
/// dumps contain off-by-one overflows) and children into their parents.
pub fn parse_impl(bundle: &ImplBundle) -> Result<Screen> {
    let raw = std::fs::read_to_string(&bundle.dump_path)?;
    let screenshot = load_png_rgb(&bundle.screenshot_path)?;
    parse_impl_parts(&raw, &bundle.dump_path.display().to_string(), screenshot)
}

/// In-memory variant of [`parse_impl`].
pub fn parse_impl_parts(xml_src: &str, path_label: &str, screenshot: Raster) -> Result<Screen> {
    let (w, h) = screenshot.dimensions();
    let roots = parse_dump_xml(xml_src, path_label)?;

    let canvas = BoundingBox::new(0, 0, w, h);
    let mut counter = 0usize;
    let root = if roots.len() == 1 && roots[0].bounds == canvas {
        let mut gc = dump_to_gc(&roots[0], &mut counter);
        gc.bounds = canvas;
        gc
    } else {
        let mut gc = GuiComponent::new("r", canvas);
        gc.class_name = Some("root".to_string());
        for node in &roots {
            gc.children.push(dump_to_gc(node, &mut counter));
        }
        gc
    };
    let mut root = root;
    root.bounds = root.bounds.clamp_to(&canvas);
    clamp_children(&mut root);
    Screen::new(ScreenKind::Implementation, root, screenshot)
}

/// Serializes a mock-up screen hierarchy back into the spec document.
pub fn emit_mockup_spec(screen: &Screen) -> String {
    fn to_obj(gc: &GuiComponent) -> SpecObject {
        SpecObject {
            name: gc.name.clone().unwrap_or_else(|| "object".to_string()),
            x: gc.bounds.x,
            y: gc.bounds.y,
            width: gc.bounds.w,
            height: gc.bounds.h,
            text: gc.text.clone(),
            font: gc.font.clone(),
            children: gc.children.iter().map(to_obj).collect(),
        }
    }
    let doc = SpecDoc {
        canvas: SpecCanvas {
            width: screen.width,
            height: screen.height,
        },
        objects: screen.root.children.iter().map(to_obj).collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("spec serialization");
    out.push('\n');
    out
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Serializes an implementation screen hierarchy back into the dump
/// document shape.
pub fn emit_impl_xml(screen: &Screen) -> String {
    fn write_node(gc: &GuiComponent, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        let b = &gc.bounds;
        out.push_str(&format!(
            "{pad}<node bounds=\"[{},{}][{},{}]\" class=\"{}\" text=\"{}\" resource-id=\"{}\"",
            b.x,
            b.y,
            b.right(),
            b.bottom(),
            xml_escape(gc.class_name.as_deref().unwrap_or("")),
            xml_escape(gc.text.as_deref().unwrap_or("")),
            xml_escape(gc.resource_id.as_deref().unwrap_or("")),
        ));
        if gc.children.is_empty() {
            out.push_str(" />\n");
        } else {
            out.push_str(">\n");
            for child in &gc.children {
                write_node(child, depth + 1, out);
            }
            out.push_str(&format!("{pad}</node>\n"));
        }
    }
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<hierarchy rotation=\"0\">\n");
    write_node(&screen.root, 1, &mut out);
    out.push_str("</hierarchy>\n");
    out
}

/// Scales a screen to the target dimensions: boxes by nearest-integer
/// per-axis factors, the screenshot by nearest-neighbor resampling.
/// Identity when dimensions already match.
pub fn scale_screen(screen: &Screen, target_w: u32, target_h: u32) -> Result<Screen> {
    if (screen.width, screen.height) == (target_w, target_h) {
        return Ok(screen.clone());
    }
    let sx = target_w as f64 / screen.width as f64;
    let sy = target_h as f64 / screen.height as f64;
    let scale_box = |b: &BoundingBox| {
        let x1 = (b.x as f64 * sx).round() as i32;
        let y1 = (b.y as f64 * sy).round() as i32;
        let x2 = (b.right() as f64 * sx).round() as i32;
        let y2 = (b.bottom() as f64 * sy).round() as i32;
        BoundingBox::new(x1, y1, (x2 - x1).max(0) as u32, (y2 - y1).max(0) as u32)
    };
    fn scale_tree(gc: &GuiComponent, f: &impl Fn(&BoundingBox) -> BoundingBox) -> GuiComponent {
        let mut out = gc.clone();
        out.bounds = f(&gc.bounds);
        out.children = gc.children.iter().map(|c| scale_tree(c, f)).collect();
        out
    }
    let mut root = scale_tree(&screen.root, &scale_box);
    root.bounds = BoundingBox::new(0, 0, target_w, target_h);
    clamp_children(&mut root);
    let screenshot = image::imageops::resize(
        &screen.screenshot,
        target_w,
        target_h,
        image::imageops::FilterType::Nearest,
    );
    Screen::new(screen.kind, root, screenshot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::leaf_components;
    use image::Rgb;

    fn write_png(path: &Path, w: u32, h: u32) {
        Raster::from_pixel(w, h, Rgb([240, 240, 240])).save(path).unwrap();
    }

    #[test]
    fn bounds_arithmetic() {
        let b = parse_bounds("[0,0][1080,1920]").unwrap();
        assert_eq!(b, BoundingBox::new(0, 0, 1080, 1920));
        let degenerate = parse_bounds("[10,20][10,20]").unwrap();
        assert_eq!(degenerate, BoundingBox::new(10, 20, 0, 0));
        assert!(parse_bounds("[10,20][5,20]").is_err());
        assert!(parse_bounds("10,20 5,20").is_err());
        assert!(parse_bounds("[a,b][c,d]").is_err());
    }

    #[test]
    fn mockup_single_group_single_text() {
        let dir = tempfile::tempdir().unwrap();
        let spec = dir.path().join("m.spec");
        let png = dir.path().join("m.png");
        std::fs::write(
            &spec,
            r#"{
  "canvas": {"width": 200, "height": 100},
  "objects": [
    {"name": "group", "x": 0, "y": 0, "width": 200, "height": 100,
     "children": [
       {"name": "ok_label", "x": 20, "y": 30, "width": 100, "height": 40, "text": "OK"}
     ]}
  ]
}"#,
        )
        .unwrap();
        write_png(&png, 200, 100);
        let screen = parse_mockup(&MockupBundle {
            spec_path: spec,
            screenshot_path: png,
        })
        .unwrap();
        assert_eq!(screen.kind, ScreenKind::Mockup);
        assert_eq!(screen.root.children.len(), 1);
        let leaves = leaf_components(&screen);
        assert_eq!(leaves.len(), 1);
        assert_eq!(leaves[0].text.as_deref(), Some("OK"));
        assert_eq!(leaves[0].bounds, BoundingBox::new(20, 30, 100, 40));
        assert_eq!(leaves[0].id, "m/0/0");
    }

    #[test]
    fn mockup_empty_artboard() {
        let dir = tempfile::tempdir().unwrap();
        let spec = dir.path().join("m.spec");
        let png = dir.path().join("m.png");
        std::fs::write(&spec, r#"{"canvas": {"width": 50, "height": 60}, "objects": []}"#).unwrap();
        write_png(&png, 50, 60);
        let screen = parse_mockup(&MockupBundle {
            spec_path: spec,
            screenshot_path: png,
        })
        .unwrap();
        assert!(screen.root.children.is_empty());
        assert_eq!(leaf_components(&screen).len(), 1); // root itself
    }

    #[test]
    fn mockup_dimension_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let spec = dir.path().join("m.spec");
        let png = dir.path().join("m.png");
        std::fs::write(&spec, r#"{"canvas": {"width": 50, "height": 60}, "objects": []}"#).unwrap();
        write_png(&png, 50, 61);
        assert!(matches!(
            parse_mockup(&MockupBundle {
                spec_path: spec,
                screenshot_path: png
            }),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mockup_malformed_reports_line() {
        let err = parse_mockup_spec("{\n  \"canvas\": {\"width\": 5,,}\n}", "m.spec").unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("line 2"), "got: {msg}");
    }

    #[test]
    fn impl_five_node_fixture() {
        let dir = tempfile::tempdir().unwrap();
        let xml = dir.path().join("ui.xml");
        let png = dir.path().join("ui.png");
        std::fs::write(
            &xml,
            r#"<?xml version="1.0" encoding="UTF-8"?>
<hierarchy rotation="0">
  <node bounds="[0,0][100,200]" class="android.widget.FrameLayout" text="" resource-id="" naf="true">
    <node bounds="[0,0][100,100]" class="android.widget.LinearLayout" text="" resource-id="">
      <node bounds="[10,10][60,40]" class="android.widget.TextView" text="Hi" resource-id="com.app:id/hello" />
      <node bounds="[10,50][60,90]" class="android.widget.Button" text="Go" resource-id="com.app:id/go" />
    </node>
    <node bounds="[0,100][100,200]" class="android.widget.ImageView" text="" resource-id="" />
  </node>
</hierarchy>"#,
        )
        .unwrap();
        write_png(&png, 100, 200);
        let screen = parse_impl(&ImplBundle {
            dump_path: xml,
            screenshot_path: png,
        })
        .unwrap();
        assert_eq!(screen.kind, ScreenKind::Implementation);
        // Pre-order ids with resource suffixes.
        assert_eq!(screen.root.id, "r0");
        let leaves = leaf_components(&screen);
        let ids: Vec<&str> = leaves.iter().map(|g| g.id.as_str()).collect();
        assert_eq!(ids, vec!["r2#hello", "r3#go", "r4"]);
        assert_eq!(leaves[0].text.as_deref(), Some("Hi"));
        assert_eq!(leaves[0].bounds, BoundingBox::new(10, 10, 50, 30));
        assert_eq!(
            leaves[1].class_name.as_deref(),
            Some("android.widget.Button")
        );
    }

    #[test]
    fn impl_clamps_overflowing_children() {
        let dir = tempfile::tempdir().unwrap();
        let xml = dir.path().join("ui.xml");
        let png = dir.path().join("ui.png");
        std::fs::write(
            &xml,
            r#"<hierarchy><node bounds="[0,0][100,100]" class="c" text="" resource-id="">
                 <node bounds="[90,90][101,101]" class="c" text="" resource-id="" />
               </node></hierarchy>"#,
        )
        .unwrap();
        write_png(&png, 100, 100);
        let screen = parse_impl(&ImplBundle {
            dump_path: xml,
            screenshot_path: png,
        })
        .unwrap();
        let leaves = leaf_components(&screen);
        assert_eq!(leaves[0].bounds, BoundingBox::new(90, 90, 10, 10));
    }

    #[test]
    fn impl_malformed_bounds_and_xml() {
        let dir = tempfile::tempdir().unwrap();
        let png = dir.path().join("ui.png");
        write_png(&png, 10, 10);

        let bad_bounds = dir.path().join("bad1.xml");
        std::fs::write(&bad_bounds, r#"<node bounds="[0,0][oops]" />"#).unwrap();
        assert!(matches!(
            parse_impl(&ImplBundle {
                dump_path: bad_bounds,
                screenshot_path: png.clone()
            }),
            Err(Error::BoundsFormat { .. })
        ));

        let bad_xml = dir.path().join("bad2.xml");
        std::fs::write(&bad_xml, "<hierarchy><node bounds=\"[0,0][5,5]\">").unwrap();
        assert!(matches!(
            parse_impl(&ImplBundle {
                dump_path: bad_xml,
                screenshot_path: png
            }),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn roundtrip_mockup_and_impl() {
        let dir = tempfile::tempdir().unwrap();
        let spec = dir.path().join("m.spec");
        let mpng = dir.path().join("m.png");
        std::fs::write(
            &spec,
            r#"{"canvas":{"width":120,"height":80},"objects":[
                {"name":"row","x":0,"y":0,"width":120,"height":40,"children":[
                  {"name":"t","x":4,"y":4,"width":60,"height":20,"text":"A b","font":"Block"}]},
                {"name":"icon","x":10,"y":50,"width":24,"height":24}]}"#,
        )
        .unwrap();
        write_png(&mpng, 120, 80);
        let bundle = MockupBundle {
            spec_path: spec.clone(),
            screenshot_path: mpng.clone(),
        };
        let screen = parse_mockup(&bundle).unwrap();
        let emitted = emit_mockup_spec(&screen);
        std::fs::write(&spec, &emitted).unwrap();
        let screen2 = parse_mockup(&bundle).unwrap();
        assert_eq!(screen.root, screen2.root);

        let xml = dir.path().join("ui.xml");
        let ipng = dir.path().join("ui.png");
        std::fs::write(
            &xml,
            "<hierarchy><node bounds=\"[0,0][120,80]\" class=\"android.widget.FrameLayout\" text=\"\" resource-id=\"\">\
               <node bounds=\"[4,4][64,24]\" class=\"android.widget.TextView\" text=\"A &quot;b&quot;\" resource-id=\"com.app:id/t\" />\
             </node></hierarchy>",
        )
        .unwrap();
        write_png(&ipng, 120, 80);
        let ibundle = ImplBundle {
            dump_path: xml.clone(),
            screenshot_path: ipng,
        };
        let impl_screen = parse_impl(&ibundle).unwrap();
        let emitted = emit_impl_xml(&impl_screen);
        std::fs::write(&xml, &emitted).unwrap();
        let impl_screen2 = parse_impl(&ibundle).unwrap();
        assert_eq!(impl_screen.root, impl_screen2.root);
        assert_eq!(
            impl_screen.root.children[0].text.as_deref(),
            Some("A \"b\"")
        );
    }

    #[test]
    fn leaf_count_matches_childless_nodes() {
        let dir = tempfile::tempdir().unwrap();
        let xml = dir.path().join("ui.xml");
        let png = dir.path().join("ui.png");
        let body = r#"<hierarchy>
          <node bounds="[0,0][50,50]" class="a" text="" resource-id="">
            <node bounds="[0,0][25,50]" class="b" text="" resource-id="" />
            <node bounds="[25,0][50,50]" class="b" text="" resource-id="">
              <node bounds="[25,0][50,25]" class="c" text="" resource-id="" />
            </node>
          </node>
        </hierarchy>"#;
        std::fs::write(&xml, body).unwrap();
        write_png(&png, 50, 50);
        let screen = parse_impl(&ImplBundle {
            dump_path: xml,
            screenshot_path: png,
        })
        .unwrap();
        let childless = body.matches("/>").count();
        assert_eq!(leaf_components(&screen).len(), childless);
    }

    #[test]
    fn scale_screen_doubles_boxes() {
        let mut root = GuiComponent::new("m", BoundingBox::new(0, 0, 100, 50));
        root.children
            .push(GuiComponent::new("m/0", BoundingBox::new(10, 5, 30, 20)));
        let screen = Screen::new(
            ScreenKind::Mockup,
            root,
            Raster::from_pixel(100, 50, Rgb([9, 9, 9])),
        )
        .unwrap();
        let scaled = scale_screen(&screen, 200, 100).unwrap();
        assert_eq!(scaled.width, 200);
        assert_eq!(
            scaled.root.children[0].bounds,
            BoundingBox::new(20, 10, 60, 40)
        );
        assert_eq!(scaled.screenshot.dimensions(), (200, 100));
    }

    #[test]
    fn alpha_flattens_on_white() {
        let dir = tempfile::tempdir().unwrap();
        let png = dir.path().join("a.png");
        let mut rgba = image::RgbaImage::new(2, 1);
        rgba.put_pixel(0, 0, image::Rgba([255, 0, 0, 255]));
        rgba.put_pixel(1, 0, image::Rgba([255, 0, 0, 0]));
        rgba.save(&png).unwrap();
        let img = load_png_rgb(&png).unwrap();
        assert_eq!(img.get_pixel(0, 0).0, [255, 0, 0]);
        assert_eq!(img.get_pixel(1, 0).0, [255, 255, 255]);
    }
}
