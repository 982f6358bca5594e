//! Scores detector reports against an injection manifest.
//!
//! A report matches a manifest entry when their anchor boxes overlap with
//! IOU >= 0.5 (implementation box, or the mock-up box for missing
//! components); pairing is greedy one-to-one by descending IOU. Detection
//! precision counts any matched report as a true positive; classification
//! precision additionally requires the subtype to agree.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inject::{InjectionManifest, ManifestEntry};
use crate::model::{DesignViolation, Subtype};

pub const IOU_MATCH_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SubtypeScores {
    pub injected: usize,
    pub reported: usize,
    /// Reports of this subtype that matched some injected entry.
    pub detected: usize,
    /// Reports of this subtype whose matched entry also has this subtype.
    pub classified: usize,
    /// Injected entries of this subtype that no report matched.
    pub missed: usize,
    pub dp: f64,
    pub cp: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalScores {
    pub dp: f64,
    pub cp: f64,
    pub r: f64,
    pub total_reports: usize,
    pub total_injected: usize,
    /// Matched reports (detection true positives).
    pub tp_detected: usize,
    /// Matched reports with agreeing subtype (classification TPs).
    pub tp_classified: usize,
    /// Reports that matched nothing.
    pub fp_spurious: usize,
    /// Matched reports with a disagreeing subtype.
    pub fp_misclassified: usize,
    /// Injected entries no report matched.
    pub fn_missed: usize,
    pub per_subtype: BTreeMap<String, SubtypeScores>,
    /// When set, classification agreement is scored at category level.
    pub category_level: bool,
}

fn ratio(num: usize, den: usize, empty_value: f64) -> f64 {
    if den == 0 {
        empty_value
    } else {
        num as f64 / den as f64
    }
}

/// Scores per-screen report lists against the manifest.
///
/// `category_level` scores classification at the category rather than the
/// subtype level.
pub fn score(
    reports: &[(String, Vec<DesignViolation>)],
    manifest: &InjectionManifest,
    category_level: bool,
) -> Result<EvalScores> {
    let mut by_screen: BTreeMap<&str, Vec<&ManifestEntry>> = BTreeMap::new();
    for entry in &manifest.entries {
        by_screen.entry(entry.screen_id.as_str()).or_default().push(entry);
    }
    let known: std::collections::BTreeSet<&str> =
        by_screen.keys().copied().collect();

    let mut flat_reports: Vec<(&str, &DesignViolation)> = Vec::new();
    for (screen_id, violations) in reports {
        if !known.contains(screen_id.as_str()) && !violations.is_empty() {
            return Err(Error::Eval(format!("unknown screen id {screen_id:?}")));
        }
        for v in violations {
            flat_reports.push((screen_id.as_str(), v));
        }
    }
    // Canonical order, independent of caller ordering.
    flat_reports.sort_by_key(|(sid, v)| {
        (
            sid.to_string(),
            v.anchor_box().map(|b| b.to_csv()).unwrap_or_default(),
            v.subtype,
            v.mockup_gc.clone(),
            v.impl_gc.clone(),
        )
    });

    let n_reports = flat_reports.len();
    let mut report_match: Vec<Option<usize>> = vec![None; n_reports]; // -> manifest entry index
    let mut entry_matched: Vec<bool> = vec![false; manifest.entries.len()];

    // Greedy one-to-one pairing by descending IOU per screen.
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new(); // (iou, entry idx, report idx)
    for (ri, (sid, v)) in flat_reports.iter().enumerate() {
        let Some(report_box) = v.anchor_box() else { continue };
        for (ei, entry) in manifest.entries.iter().enumerate() {
            if entry.screen_id != *sid {
                continue;
            }
            let Some(entry_box) = entry.anchor_box() else { continue };
            let iou = entry_box.iou(&report_box);
            if iou >= IOU_MATCH_THRESHOLD {
                candidates.push((iou, ei, ri));
            }
        }
    }
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    for (_, ei, ri) in candidates {
        if entry_matched[ei] || report_match[ri].is_some() {
            continue;
        }
        entry_matched[ei] = true;
        report_match[ri] = Some(ei);
    }

    let agree = |report: &DesignViolation, entry: &ManifestEntry| {
        if category_level {
            report.category == entry.category
        } else {
            report.subtype == entry.subtype
        }
    };

    let mut scores = EvalScores {
        dp: 0.0,
        cp: 0.0,
        r: 0.0,
        total_reports: n_reports,
        total_injected: manifest.entries.len(),
        tp_detected: 0,
        tp_classified: 0,
        fp_spurious: 0,
        fp_misclassified: 0,
        fn_missed: 0,
        per_subtype: BTreeMap::new(),
        category_level,
    };

    let sub = |s: Subtype| -> String { s.to_string() };
    for entry in &manifest.entries {
        scores.per_subtype.entry(sub(entry.subtype)).or_default().injected += 1;
    }
    for (ri, (_, v)) in flat_reports.iter().enumerate() {
        let slot = scores.per_subtype.entry(sub(v.subtype)).or_default();
        slot.reported += 1;
        match report_match[ri] {
            Some(ei) => {
                slot.detected += 1;
                scores.tp_detected += 1;
                if agree(v, &manifest.entries[ei]) {
                    slot.classified += 1;
                    scores.tp_classified += 1;
                } else {
                    scores.fp_misclassified += 1;
                }
            }
            None => {
                scores.fp_spurious += 1;
            }
        }
    }
    for (ei, entry) in manifest.entries.iter().enumerate() {
        if !entry_matched[ei] {
            scores.per_subtype.entry(sub(entry.subtype)).or_default().missed += 1;
            scores.fn_missed += 1;
        }
    }

    scores.dp = ratio(scores.tp_detected, scores.total_reports, 1.0);
    scores.cp = ratio(scores.tp_classified, scores.total_reports, 1.0);
    scores.r = ratio(
        scores.total_injected - scores.fn_missed,
        scores.total_injected,
        1.0,
    );
    for s in scores.per_subtype.values_mut() {
        s.dp = ratio(s.detected, s.reported, 1.0);
        s.cp = ratio(s.classified, s.reported, 1.0);
        s.r = ratio(s.injected - s.missed, s.injected, 1.0);
    }
    Ok(scores)
}

/// Plain-text summary: one row per subtype plus an overall row.
pub fn summary_table(scores: &EvalScores) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<20} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7} {:>7} {:>7}\n",
        "subtype", "injected", "reported", "det-TP", "cls-TP", "missed", "DP", "CP", "R"
    ));
    for (name, s) in &scores.per_subtype {
        out.push_str(&format!(
            "{:<20} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7.3} {:>7.3} {:>7.3}\n",
            name, s.injected, s.reported, s.detected, s.classified, s.missed, s.dp, s.cp, s.r
        ));
    }
    out.push_str(&format!(
        "{:<20} {:>8} {:>8} {:>8} {:>8} {:>8} {:>7.3} {:>7.3} {:>7.3}\n",
        "overall",
        scores.total_injected,
        scores.total_reports,
        scores.tp_detected,
        scores.tp_classified,
        scores.fn_missed,
        scores.dp,
        scores.cp,
        scores.r
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BoundingBox, Category};

    fn entry(screen: &str, subtype: Subtype, b: BoundingBox) -> ManifestEntry {
        let mut params = BTreeMap::new();
        params.insert("box".to_string(), b.to_csv());
        ManifestEntry {
            screen_id: screen.to_string(),
            gc_id: format!("gc-{}", b.to_csv()),
            category: subtype.category(),
            subtype,
            params,
        }
    }

    fn report(subtype: Subtype, b: BoundingBox) -> DesignViolation {
        let (m, r) = match subtype {
            Subtype::MissingComponent => (Some("m/x".to_string()), None),
            Subtype::ExtraneousComponent => (None, Some("r9".to_string())),
            _ => (Some("m/x".to_string()), Some("r9".to_string())),
        };
        let mut v = DesignViolation::new(subtype, m, r, "test");
        let key = if subtype == Subtype::MissingComponent {
            "mockup_box"
        } else {
            "impl_box"
        };
        v = v.with_evidence(key, b.to_csv());
        v
    }

    fn boxes(n: usize) -> Vec<BoundingBox> {
        (0..n)
            .map(|i| BoundingBox::new((i as i32) * 200, 100, 80, 60))
            .collect()
    }

    #[test]
    fn eq6_nine_of_ten_reports() {
        // Tp = 9, Fp = 1 -> DP = 0.9.
        let bs = boxes(9);
        let manifest = InjectionManifest {
            entries: bs.iter().map(|b| entry("s0", Subtype::TranslationX, *b)).collect(),
        };
        let mut violations: Vec<DesignViolation> =
            bs.iter().map(|b| report(Subtype::TranslationX, *b)).collect();
        violations.push(report(
            Subtype::TranslationX,
            BoundingBox::new(0, 1000, 80, 60), // matches nothing
        ));
        let s = score(&[("s0".into(), violations)], &manifest, false).unwrap();
        assert!((s.dp - 0.9).abs() < 1e-12);
        assert!((s.cp - 0.9).abs() < 1e-12);
        assert!((s.r - 1.0).abs() < 1e-12);
        assert_eq!(s.fp_spurious, 1);
    }

    #[test]
    fn eq6_all_correct() {
        let bs = boxes(5);
        let manifest = InjectionManifest {
            entries: bs.iter().map(|b| entry("s0", Subtype::FontColor, *b)).collect(),
        };
        let violations: Vec<DesignViolation> =
            bs.iter().map(|b| report(Subtype::FontColor, *b)).collect();
        let s = score(&[("s0".into(), violations)], &manifest, false).unwrap();
        assert_eq!((s.dp, s.cp, s.r), (1.0, 1.0, 1.0));
    }

    #[test]
    fn misclassification_moves_cp_not_dp() {
        // An ImageColor injection reported as IncorrectImage counts toward
        // DP's Tp but CP's Fp.
        let b = BoundingBox::new(0, 0, 100, 100);
        let manifest = InjectionManifest {
            entries: vec![entry("s0", Subtype::ImageColor, b)],
        };
        let s = score(
            &[("s0".into(), vec![report(Subtype::IncorrectImage, b)])],
            &manifest,
            false,
        )
        .unwrap();
        assert_eq!(s.dp, 1.0);
        assert_eq!(s.cp, 0.0);
        assert_eq!(s.r, 1.0);
        assert_eq!(s.fp_misclassified, 1);
        assert!(s.dp >= s.cp);

        // Category-level scoring forgives it (both Resource).
        let s = score(
            &[("s0".into(), vec![report(Subtype::IncorrectImage, b)])],
            &manifest,
            true,
        )
        .unwrap();
        assert_eq!(s.cp, 1.0);
        assert_eq!(
            Subtype::ImageColor.category(),
            Category::Resource
        );
    }

    #[test]
    fn missing_entries_match_on_mockup_box() {
        let b = BoundingBox::new(40, 40, 120, 80);
        let manifest = InjectionManifest {
            entries: vec![entry("s0", Subtype::MissingComponent, b)],
        };
        let s = score(
            &[("s0".into(), vec![report(Subtype::MissingComponent, b)])],
            &manifest,
            false,
        )
        .unwrap();
        assert_eq!((s.dp, s.cp, s.r), (1.0, 1.0, 1.0));
    }

    #[test]
    fn permutation_invariance() {
        let bs = boxes(4);
        let manifest = InjectionManifest {
            entries: bs
                .iter()
                .enumerate()
                .map(|(i, b)| {
                    entry(
                        "s0",
                        if i % 2 == 0 { Subtype::FontStyle } else { Subtype::SizeBoth },
                        *b,
                    )
                })
                .collect(),
        };
        let mut violations: Vec<DesignViolation> = bs
            .iter()
            .enumerate()
            .map(|(i, b)| {
                report(
                    if i == 0 { Subtype::FontColor } else if i % 2 == 0 { Subtype::FontStyle } else { Subtype::SizeBoth },
                    *b,
                )
            })
            .collect();
        let a = score(&[("s0".into(), violations.clone())], &manifest, false).unwrap();
        violations.reverse();
        let b = score(&[("s0".into(), violations)], &manifest, false).unwrap();
        assert_eq!(a.tp_detected, b.tp_detected);
        assert_eq!(a.tp_classified, b.tp_classified);
        assert_eq!(a.dp, b.dp);
        assert_eq!(a.cp, b.cp);
        assert_eq!(a.r, b.r);
    }

    #[test]
    fn spurious_reports_never_raise_r_or_dp() {
        let bs = boxes(3);
        let manifest = InjectionManifest {
            entries: bs.iter().map(|b| entry("s0", Subtype::ComponentColor, *b)).collect(),
        };
        let violations: Vec<DesignViolation> = bs
            .iter()
            .take(2)
            .map(|b| report(Subtype::ComponentColor, *b))
            .collect();
        let base = score(&[("s0".into(), violations.clone())], &manifest, false).unwrap();
        let mut more = violations;
        more.push(report(Subtype::ComponentColor, BoundingBox::new(900, 900, 10, 10)));
        let with_noise = score(&[("s0".into(), more)], &manifest, false).unwrap();
        assert!(with_noise.r <= base.r + 1e-12);
        assert!(with_noise.dp <= base.dp + 1e-12);
    }

    #[test]
    fn zero_denominator_conventions() {
        let manifest = InjectionManifest {
            entries: vec![entry("s0", Subtype::FontStyle, BoundingBox::new(0, 0, 10, 10))],
        };
        let s = score(&[("s0".into(), vec![])], &manifest, false).unwrap();
        assert_eq!((s.dp, s.cp), (1.0, 1.0), "no reports: precision is 1 by convention");
        assert_eq!(s.r, 0.0);

        let empty = InjectionManifest::default();
        let s = score(&[], &empty, false).unwrap();
        assert_eq!(s.r, 1.0, "no injections: recall is 1 by convention");
    }

    #[test]
    fn unknown_screen_id_is_an_error() {
        let manifest = InjectionManifest {
            entries: vec![entry("s0", Subtype::FontStyle, BoundingBox::new(0, 0, 10, 10))],
        };
        let err = score(
            &[("mystery".into(), vec![report(Subtype::FontStyle, BoundingBox::new(0, 0, 10, 10))])],
            &manifest,
            false,
        );
        assert!(matches!(err, Err(Error::Eval(_))));
    }

    #[test]
    fn summary_table_lists_every_subtype_and_overall() {
        let b = BoundingBox::new(0, 0, 50, 50);
        let manifest = InjectionManifest {
            entries: vec![entry("s0", Subtype::ImageColor, b)],
        };
        let s = score(
            &[("s0".into(), vec![report(Subtype::ImageColor, b)])],
            &manifest,
            false,
        )
        .unwrap();
        let table = summary_table(&s);
        assert!(table.contains("ImageColor"));
        assert!(table.contains("overall"));
    }
}
