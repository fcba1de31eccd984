//! Greedy string tiling over normalized token streams.
//!
//! An independent similarity engine for cross-checking the fingerprint
//! detector: repeatedly find the longest common substring of still-unmarked
//! tokens, mark it as a tile, and stop when no common run of at least the
//! minimum match length remains. Similarity is token coverage,
//! `2 * tiled / (|a| + |b|) * 100`, so it is symmetric by construction and
//! insensitive to where a shared run sits in either document.
//!
//! The search phase reuses the Karp-Rabin rolling hash from
//! [`crate::fingerprint`] and binary-searches the match length; every hash
//! hit is verified against the actual token codes before use, so hash
//! collisions cannot produce false tiles.

use std::collections::HashMap;
use std::ops::Range;

use crate::fingerprint::kgram_hashes;
use crate::lexnorm::NormalizedDocument;

/// Default minimum match length in tokens.
pub const DEFAULT_MML: usize = 9;

/// One maximal matched run: `a[start_a..start_a+length]` equals
/// `b[start_b..start_b+length]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tile {
    pub start_a: usize,
    pub start_b: usize,
    pub length: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TilingResult {
    /// Tiles in acceptance order: longest first, ties at the lowest start
    /// coordinates of the canonical pair orientation.
    pub tiles: Vec<Tile>,
    /// Tokens covered by tiles, counted once per document side.
    pub tiled_tokens: usize,
    /// `2 * tiled_tokens / (|a| + |b|) * 100`; 0 when both docs are empty.
    pub similarity: f64,
}

/// Tiles two documents' token-class streams.
pub fn gst_match(a: &NormalizedDocument, b: &NormalizedDocument, mml: usize) -> TilingResult {
    let codes_a: Vec<u64> = a.tokens.iter().map(|t| t.kind.code()).collect();
    let codes_b: Vec<u64> = b.tokens.iter().map(|t| t.kind.code()).collect();
    tile_codes(&codes_a, &codes_b, mml)
}

/// Core tiling over raw code streams.
///
/// The greedy rule alone is not symmetric: on self-overlapping streams the
/// first tie-broken tile can occlude different follow-up matches depending
/// on which document is "a". The pair is therefore canonicalized (smaller
/// stream lexicographically goes first) and tile coordinates are mirrored
/// back, which makes coverage independent of argument order.
pub fn tile_codes(a: &[u64], b: &[u64], mml: usize) -> TilingResult {
    if a <= b {
        tile_oriented(a, b, mml, false)
    } else {
        tile_oriented(b, a, mml, true)
    }
}

fn tile_oriented(a: &[u64], b: &[u64], mml: usize, mirror: bool) -> TilingResult {
    assert!(mml >= 1, "minimum match length must be at least 1");
    let mut marked_a = vec![false; a.len()];
    let mut marked_b = vec![false; b.len()];
    let mut tiles = Vec::new();
    while let Some(tile) = longest_unmarked_match(a, b, &marked_a, &marked_b, mml) {
        for i in 0..tile.length {
            marked_a[tile.start_a + i] = true;
            marked_b[tile.start_b + i] = true;
        }
        tiles.push(tile);
    }
    if mirror {
        for t in &mut tiles {
            std::mem::swap(&mut t.start_a, &mut t.start_b);
        }
    }
    let tiled_tokens: usize = tiles.iter().map(|t| t.length).sum();
    let total = a.len() + b.len();
    let similarity = if total == 0 {
        0.0
    } else {
        2.0 * tiled_tokens as f64 / total as f64 * 100.0
    };
    TilingResult {
        tiles,
        tiled_tokens,
        similarity,
    }
}

/// Longest common substring avoiding marked positions, at least `mml` long;
/// among equal-length candidates the lowest `start_a`, then lowest
/// `start_b`. Binary search on the length: existence at length L implies
/// existence at every shorter length, so the predicate is monotone.
fn longest_unmarked_match(
    a: &[u64],
    b: &[u64],
    marked_a: &[bool],
    marked_b: &[bool],
    mml: usize,
) -> Option<Tile> {
    let cap_a = longest_segment(marked_a);
    let cap_b = longest_segment(marked_b);
    let mut lo = mml;
    let mut hi = cap_a.min(cap_b);
    let mut best: Option<Tile> = None;
    while lo <= hi {
        let mid = lo + (hi - lo) / 2;
        match match_at_length(a, b, marked_a, marked_b, mid) {
            Some((start_a, start_b)) => {
                best = Some(Tile {
                    start_a,
                    start_b,
                    length: mid,
                });
                lo = mid + 1;
            }
            None => {
                if mid == 0 {
                    break;
                }
                hi = mid - 1;
            }
        }
    }
    best
}

/// Lowest `(start_a, start_b)` pair matching at exactly `len`, or None.
fn match_at_length(
    a: &[u64],
    b: &[u64],
    marked_a: &[bool],
    marked_b: &[bool],
    len: usize,
) -> Option<(usize, usize)> {
    let mut by_hash: HashMap<u64, Vec<usize>> = HashMap::new();
    for seg in unmarked_segments(marked_b) {
        if seg.len() < len {
            continue;
        }
        for (off, h) in kgram_hashes(&b[seg.clone()], len as u32).iter().enumerate() {
            by_hash.entry(*h).or_default().push(seg.start + off);
        }
    }
    if by_hash.is_empty() {
        return None;
    }
    for seg in unmarked_segments(marked_a) {
        if seg.len() < len {
            continue;
        }
        for (off, h) in kgram_hashes(&a[seg.clone()], len as u32).iter().enumerate() {
            let start_a = seg.start + off;
            if let Some(starts) = by_hash.get(h) {
                // Starts are ascending; verify to rule out hash collisions.
                for &start_b in starts {
                    if a[start_a..start_a + len] == b[start_b..start_b + len] {
                        return Some((start_a, start_b));
                    }
                }
            }
        }
    }
    None
}

/// Maximal runs of unmarked positions, ascending.
fn unmarked_segments(marked: &[bool]) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &m) in marked.iter().enumerate() {
        match (m, start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(s..i);
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(s..marked.len());
    }
    out
}

fn longest_segment(marked: &[bool]) -> usize {
    unmarked_segments(marked)
        .iter()
        .map(|r| r.len())
        .max()
        .unwrap_or(0)
}
