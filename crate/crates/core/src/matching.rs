//! Corresponding-pair resolution between mock-up and implementation leaf
//! sets: the box similarity score, fragmented mock-up GC merging, and the
//! one-to-one threshold-bounded assignment.

use serde::{Deserialize, Serialize};

use crate::model::{AnalysisConfig, BoundingBox, GuiComponent};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchedPair {
    pub mockup_id: String,
    pub impl_id: String,
    pub gamma: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Merge {
    pub merged_from: Vec<String>,
    pub merged_into: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchResult {
    pub pairs: Vec<MatchedPair>,
    pub unmatched_mockup: Vec<String>,
    pub unmatched_impl: Vec<String>,
    pub merges: Vec<Merge>,
}

/// Box similarity: `|dx| + |dy| + |dw| + |dh|` in pixels. Smaller is
/// closer; zero iff the boxes are identical.
pub fn box_similarity(a: &BoundingBox, b: &BoundingBox) -> u32 {
    let dx = (a.x as i64 - b.x as i64).unsigned_abs();
    let dy = (a.y as i64 - b.y as i64).unsigned_abs();
    let dw = (a.w as i64 - b.w as i64).unsigned_abs();
    let dh = (a.h as i64 - b.h as i64).unsigned_abs();
    (dx + dy + dw + dh).min(u32::MAX as u64) as u32
}

pub fn similarity(a: &GuiComponent, b: &GuiComponent) -> u32 {
    box_similarity(&a.bounds, &b.bounds)
}

fn merge_two(a: &GuiComponent, b: &GuiComponent) -> GuiComponent {
    // Reading order: top-to-bottom, then left-to-right.
    let (first, second) = if (a.bounds.y, a.bounds.x) <= (b.bounds.y, b.bounds.x) {
        (a, b)
    } else {
        (b, a)
    };
    let mut merged = GuiComponent::new(
        format!("{}+{}", first.id, second.id),
        first.bounds.union(&second.bounds),
    );
    merged.text = match (&first.text, &second.text) {
        (None, None) => None,
        (t, None) => t.clone(),
        (None, t) => t.clone(),
        (Some(t1), Some(t2)) => Some(format!("{t1}{t2}")),
    };
    merged.name = first.name.clone().or_else(|| second.name.clone());
    merged.font = first.font.clone().or_else(|| second.font.clone());
    merged
}

#[derive(Debug, Clone)]
pub struct MergeOutcome {
    pub leaves: Vec<GuiComponent>,
    pub merges: Vec<Merge>,
}

/// Merges mock-up leaves that overlap heavily (IOU > 0.5). Mock-up tools
/// forbid overlapping component boxes; heavy overlap means one logical
/// component drawn as stacked objects.
pub fn merge_overlapping(mockup_leaves: Vec<GuiComponent>) -> MergeOutcome {
    let mut leaves = mockup_leaves;
    let mut merges = Vec::new();
    loop {
        let mut found: Option<(usize, usize)> = None;
        'outer: for i in 0..leaves.len() {
            for j in (i + 1)..leaves.len() {
                if leaves[i].bounds.iou(&leaves[j].bounds) > 0.5 {
                    found = Some((i, j));
                    break 'outer;
                }
            }
        }
        match found {
            None => break,
            Some((i, j)) => {
                let b = leaves.remove(j);
                let a = leaves.remove(i);
                let merged = merge_two(&a, &b);
                merges.push(Merge {
                    merged_from: vec![a.id.clone(), b.id.clone()],
                    merged_into: merged.id.clone(),
                });
                leaves.insert(i, merged);
            }
        }
    }
    MergeOutcome { leaves, merges }
}

/// Repeatedly merges any mock-up leaf whose nearest mock-up neighbor is
/// strictly closer than its nearest implementation leaf, until a full
/// pass makes no merge. Each merge reduces the list by one, so at most
/// n-1 iterations run.
pub fn merge_fragmented(
    mockup_leaves: Vec<GuiComponent>,
    impl_leaves: &[GuiComponent],
) -> MergeOutcome {
    let mut leaves = mockup_leaves;
    let mut merges = Vec::new();
    loop {
        let mut action: Option<(usize, usize)> = None;
        for i in 0..leaves.len() {
            let nearest_sibling = (0..leaves.len())
                .filter(|&j| j != i)
                .min_by_key(|&j| (similarity(&leaves[i], &leaves[j]), j));
            let Some(j) = nearest_sibling else { break };
            let sibling_gamma = similarity(&leaves[i], &leaves[j]);
            let impl_gamma = impl_leaves
                .iter()
                .map(|r| similarity(&leaves[i], r))
                .min();
            let closer_than_impl = match impl_gamma {
                Some(g) => sibling_gamma < g,
                None => true,
            };
            if closer_than_impl {
                action = Some((i, j));
                break;
            }
        }
        match action {
            None => break,
            Some((i, j)) => {
                let (lo, hi) = (i.min(j), i.max(j));
                let b = leaves.remove(hi);
                let a = leaves.remove(lo);
                let merged = merge_two(&a, &b);
                merges.push(Merge {
                    merged_from: vec![a.id.clone(), b.id.clone()],
                    merged_into: merged.id.clone(),
                });
                leaves.insert(lo, merged);
            }
        }
    }
    MergeOutcome { leaves, merges }
}

/// One-to-one assignment: all cross pairs with gamma <= MT, sorted
/// ascending by (gamma, mock-up id, implementation id), each assigned when
/// both endpoints are still free. Leftovers are reported unmatched.
pub fn match_leaves(
    mockup_leaves: &[GuiComponent],
    impl_leaves: &[GuiComponent],
    config: &AnalysisConfig,
    screen_width: u32,
) -> MatchResult {
    let mt = config.mt_for_width(screen_width);
    let mut candidates: Vec<(u32, &str, &str)> = Vec::new();
    for m in mockup_leaves {
        for r in impl_leaves {
            let gamma = similarity(m, r);
            if gamma <= mt {
                candidates.push((gamma, m.id.as_str(), r.id.as_str()));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(b.1)).then(a.2.cmp(b.2)));

    let mut used_m = std::collections::HashSet::new();
    let mut used_r = std::collections::HashSet::new();
    let mut pairs = Vec::new();
    for (gamma, mid, rid) in candidates {
        if used_m.contains(mid) || used_r.contains(rid) {
            continue;
        }
        used_m.insert(mid);
        used_r.insert(rid);
        pairs.push(MatchedPair {
            mockup_id: mid.to_string(),
            impl_id: rid.to_string(),
            gamma,
        });
    }
    let unmatched_mockup = mockup_leaves
        .iter()
        .filter(|m| !used_m.contains(m.id.as_str()))
        .map(|m| m.id.clone())
        .collect();
    let unmatched_impl = impl_leaves
        .iter()
        .filter(|r| !used_r.contains(r.id.as_str()))
        .map(|r| r.id.clone())
        .collect();
    MatchResult {
        pairs,
        unmatched_mockup,
        unmatched_impl,
        merges: Vec::new(),
    }
}
