#!/usr/bin/env python3
"""Independent re-implementation of the toy tracking pipeline.

Reads a generated synthetic video (frames/ + annotations/ directories) and
re-derives, from scratch and without touching the C++ code paths:

  * the scene cuts (hue/saturation histograms + Bhattacharyya distance),
  * the per-frame masks produced by the toy pixel/concept backends under the
    scene-adaptive dispatcher (online, offline, and pixel-only modes),
  * J (IoU), F (boundary F-measure, Chebyshev tolerance), and J&F.

Used once to establish the golden numbers pinned in the acceptance suite.

Usage: pipeline_oracle.py VIDEO_DIR [--mode online|offline|none]
"""

import argparse
import json
import math
import os
import sys

import numpy as np
from PIL import Image

H_BINS = 32
S_BINS = 32
SCENE_THRESHOLD = 0.35
MEMORY_WINDOW = 22
KEYFRAME_CAPACITY = 6
DIVERSITY_THRESHOLD = 0.2
CONFIDENCE_THRESHOLD = 0.5
SEARCH_RADIUS = 16
TAU_PIX = 1500.0
TAU_CON = 0.6
PRESENCE_EPS = 1e-6
RESET_IOU = 0.5


def load_video(video_dir):
    frames_dir = os.path.join(video_dir, "frames")
    ann_dir = os.path.join(video_dir, "annotations")
    frames = []
    for name in sorted(os.listdir(frames_dir)):
        frames.append(np.asarray(Image.open(os.path.join(frames_dir, name)).convert("RGB"),
                                 dtype=np.float64))
    masks = {}
    for name in sorted(os.listdir(ann_dir)):
        ann = np.asarray(Image.open(os.path.join(ann_dir, name)))
        for obj in np.unique(ann):
            if obj == 0:
                continue
            masks.setdefault(int(obj), []).append(ann == obj)
    return frames, masks


def rgb_to_hs(frame):
    r, g, b = frame[..., 0] / 255.0, frame[..., 1] / 255.0, frame[..., 2] / 255.0
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = mx - mn
    sat = np.where(mx == 0.0, 0.0, np.divide(delta, mx, out=np.zeros_like(mx),
                                             where=mx != 0.0))
    hue = np.zeros_like(mx)
    nz = delta > 0.0
    rmax = nz & (mx == r)
    gmax = nz & (mx == g) & ~rmax
    bmax = nz & ~rmax & ~gmax
    hue[rmax] = 60.0 * ((g - b)[rmax] / delta[rmax])
    hue[gmax] = 60.0 * ((b - r)[gmax] / delta[gmax] + 2.0)
    hue[bmax] = 60.0 * ((r - g)[bmax] / delta[bmax] + 4.0)
    hue[hue < 0] += 360.0
    hue[hue >= 360.0] -= 360.0
    return hue, sat


def hs_histogram(frame, select=None):
    hue, sat = rgb_to_hs(frame)
    hb = np.clip((hue / 360.0 * H_BINS).astype(np.int64), 0, H_BINS - 1)
    sb = np.clip((sat * S_BINS).astype(np.int64), 0, S_BINS - 1)
    flat = hb * S_BINS + sb
    if select is not None:
        flat = flat[select]
    if flat.size == 0:
        return np.zeros(H_BINS * S_BINS)
    hist = np.bincount(flat.ravel(), minlength=H_BINS * S_BINS).astype(np.float64)
    return hist / flat.size


def bhattacharyya(p, q):
    return math.sqrt(max(0.0, 1.0 - float(np.sum(np.sqrt(p * q)))))


def scene_cuts(frames):
    cuts = []
    prev = None
    for t, frame in enumerate(frames):
        hist = hs_histogram(frame)
        if prev is not None and bhattacharyya(prev, hist) > SCENE_THRESHOLD:
            cuts.append(t)
        prev = hist
    return cuts


def bbox(mask):
    ys, xs = np.nonzero(mask)
    if len(xs) == 0:
        return None
    return int(xs.min()), int(ys.min()), int(xs.max() - xs.min() + 1), int(ys.max() - ys.min() + 1)


def translate(mask, dx, dy):
    out = np.zeros_like(mask)
    h, w = mask.shape
    ys, xs = np.nonzero(mask)
    xs2, ys2 = xs + dx, ys + dy
    keep = (xs2 >= 0) & (xs2 < w) & (ys2 >= 0) & (ys2 < h)
    out[ys2[keep], xs2[keep]] = True
    return out


def toy_pixel(frames, t, window):
    newest_index, newest_mask = window[-1]
    source = frames[newest_index]
    current = frames[t]
    box = bbox(newest_mask)
    if box is None:
        return np.zeros_like(newest_mask), 0.0
    x, y, w, h = box
    template = source[y:y + h, x:x + w, :]
    best = None
    H, W = current.shape[:2]
    for dy in range(-SEARCH_RADIUS, SEARCH_RADIUS + 1):
        ty = y + dy
        if ty < 0 or ty + h > H:
            continue
        for dx in range(-SEARCH_RADIUS, SEARCH_RADIUS + 1):
            tx = x + dx
            if tx < 0 or tx + w > W:
                continue
            diff = template - current[ty:ty + h, tx:tx + w, :]
            score = float(np.mean(diff * diff))
            key = (score, dy * dy + dx * dx, dy, dx)
            if best is None or key < best[0]:
                best = (key, dy, dx)
    (score, _, _, _), dy, dx = best
    presence = max(0.0, 1.0 - score / TAU_PIX)
    if presence <= 0.0:
        return np.zeros_like(newest_mask), 0.0
    return translate(newest_mask, dx, dy), presence


def toy_concept(frames, t, keyframes):
    contributing = []
    for frame_index, mask in keyframes:
        if mask.any():
            contributing.append(hs_histogram(frames[frame_index], select=mask))
    anchor_mask = keyframes[0][1]
    box = bbox(anchor_mask)
    current = frames[t]
    H, W = current.shape[:2]
    if not contributing or box is None:
        return np.zeros_like(anchor_mask), 0.0
    descriptor = np.mean(contributing, axis=0)
    bx, by, bw, bh = box
    stride_x = max(1, bw // 4)
    stride_y = max(1, bh // 4)
    xs = sorted(set(list(range(0, W - bw + 1, stride_x)) + [W - bw]))
    ys = sorted(set(list(range(0, H - bh + 1, stride_y)) + [H - bh]))
    best = None
    for wy in ys:
        for wx in xs:
            hist = hs_histogram(current[wy:wy + bh, wx:wx + bw, :])
            d = bhattacharyya(hist, descriptor)
            dy, dx = wy - by, wx - bx
            key = (d, dy * dy + dx * dx, dy, dx)
            if best is None or key < best[0]:
                best = (key, dy, dx)
    (d, _, _, _), dy, dx = best
    presence = max(0.0, 1.0 - d / TAU_CON)
    if presence <= 0.0:
        return np.zeros_like(anchor_mask), 0.0
    return translate(anchor_mask, dx, dy), presence


def iou(a, b):
    union = np.logical_or(a, b).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(a, b).sum()) / float(union)


def boundary(mask):
    if not mask.any():
        return np.zeros_like(mask)
    padded = np.pad(mask, 1, constant_values=False)
    interior = (padded[:-2, 1:-1] & padded[2:, 1:-1] &
                padded[1:-1, :-2] & padded[1:-1, 2:])
    return mask & ~interior


def dilate_chebyshev(mask, radius):
    out = mask.copy()
    for _ in range(radius):
        padded = np.pad(out, 1, constant_values=False)
        out = (padded[:-2, :-2] | padded[:-2, 1:-1] | padded[:-2, 2:] |
               padded[1:-1, :-2] | padded[1:-1, 1:-1] | padded[1:-1, 2:] |
               padded[2:, :-2] | padded[2:, 1:-1] | padded[2:, 2:])
    return out


def f_measure(pred, gt, tol):
    pe, ge = not pred.any(), not gt.any()
    if pe and ge:
        return 1.0
    if pe or ge:
        return 0.0
    bp, bg = boundary(pred), boundary(gt)
    bg_wide, bp_wide = dilate_chebyshev(bg, tol), dilate_chebyshev(bp, tol)
    precision = float((bp & bg_wide).sum()) / float(bp.sum())
    recall = float((bg & bp_wide).sum()) / float(bg.sum())
    if precision + recall == 0.0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


class KeyframeBank:
    def __init__(self, frame_hist, mask):
        self.entries = [(0, frame_hist, mask)]  # (frame, full-frame hist, mask)
        self.frozen = False

    def consider(self, t, frame_hist, mask, presence, confidence):
        if self.frozen:
            return False
        if confidence < CONFIDENCE_THRESHOLD or presence <= 0.0 or not mask.any():
            return False
        if min(bhattacharyya(frame_hist, h) for _, h, _ in self.entries) <= DIVERSITY_THRESHOLD:
            return False
        self.entries.append((t, frame_hist, mask))
        if len(self.entries) > 1 + KEYFRAME_CAPACITY:
            del self.entries[1]  # oldest recent; anchor stays
        return True

    def keyframes(self):
        return [(t, m) for t, _, m in self.entries]


def run_pass(frames, first_mask, mode, bank=None):
    """One tracking pass; returns (masks, bank, concept_invocations)."""
    n = len(frames)
    force_pixel = mode == "none"
    hist0 = hs_histogram(frames[0])
    if bank is None:
        bank = KeyframeBank(hist0, first_mask)
    memory = [(0, first_mask)]  # anchor + recents, presence-filtered
    last_pixel_mask = first_mask
    masks = [first_mask]
    prev_hist = hist0
    invocations = 0
    for t in range(1, n):
        hist = hs_histogram(frames[t])
        changed = bhattacharyya(prev_hist, hist) > SCENE_THRESHOLD
        prev_hist = hist
        if changed and not force_pixel:
            mask, presence = toy_concept(frames, t, bank.keyframes())
            invocations += 1
            if presence > 0.0 and iou(mask, last_pixel_mask) < RESET_IOU:
                memory = memory[:1]
        else:
            mask, presence = toy_pixel(frames, t, memory)
            last_pixel_mask = mask
        if presence > PRESENCE_EPS:
            memory.append((t, mask))
            if len(memory) > MEMORY_WINDOW:
                del memory[1]
        bank.consider(t, hist, mask, presence, presence)
        masks.append(mask)
    return masks, bank, invocations


def evaluate(pred, gt, tol):
    js = [iou(p, g) for p, g in zip(pred[1:], gt[1:])]
    fs = [f_measure(p, g, tol) for p, g in zip(pred[1:], gt[1:])]
    j, f = float(np.mean(js)), float(np.mean(fs))
    return j, f, (j + f) / 2.0


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("video_dir")
    parser.add_argument("--mode", default="online", choices=["online", "offline", "none"])
    args = parser.parse_args()

    frames, gt_objects = load_video(args.video_dir)
    if len(gt_objects) != 1:
        sys.exit("oracle handles single-object videos")
    gt = gt_objects[next(iter(gt_objects))]
    h, w = frames[0].shape[:2]
    tol = max(1, round(0.008 * math.hypot(w, h)))

    cuts = scene_cuts(frames)
    if args.mode == "offline":
        _, bank, inv1 = run_pass(frames, gt[0], "online")
        bank.frozen = True
        masks, _, inv2 = run_pass(frames, gt[0], "online", bank=bank)
        invocations = inv1 + inv2
    else:
        masks, _, invocations = run_pass(frames, gt[0], args.mode)

    j, f, jf = evaluate(masks, gt, tol)
    print(json.dumps({
        "mode": args.mode,
        "cuts": cuts,
        "concept_invocations": invocations,
        "J": j,
        "F": f,
        "JF": jf,
    }, indent=2))


if __name__ == "__main__":
    main()
