/**
 * Converter for face-tracking CSV output into canonical faces.jsonl.
 *
 * Documented source layout (the cited release; anything else fails loudly):
 * columns frame, bbox, detect_conf, sex_decision_function, sex_label, where
 * bbox is "(x1, y1, x2, y2)" in pixels (boxes may exceed the frame because
 * of the tool's 1.1 bounding-box scaling; they are clipped to the frame
 * before the height ratio is computed). The frame index converts to
 * milliseconds via the analysis rate (default 1 fps). The female score is
 * the logistic of the decision function, so the engine's 0.5 threshold
 * agrees with the tool's sign convention.
 *
 * Faces below the tool's own detection-confidence floor are passed through:
 * all filtering policy (height, score) lives in the engine.
 */

import { dataLines, splitCsvLine } from "./csv.js";
import type { ConversionResult, FaceRecord } from "./types.js";

export const FACES_TOOL = "face-tracking-csv";

/** Settings of the cited tool release, recorded for audit. */
export const FACES_TOOL_METADATA = {
  detection_confidence_threshold: 0.65,
  bbox_scaling: 1.1,
};

const HEADER = ["frame", "bbox", "detect_conf", "sex_decision_function", "sex_label"];

const BBOX_RE = /^\(\s*([-\d.]+)\s*,\s*([-\d.]+)\s*,\s*([-\d.]+)\s*,\s*([-\d.]+)\s*\)$/;

export interface FacesOptions {
  fps?: number;
  frameHeight: number;
}

function logistic(x: number): number {
  return 1 / (1 + Math.exp(-x));
}

export function convertFaces(
  text: string,
  mediaId: string,
  options: FacesOptions,
): ConversionResult<FaceRecord> {
  const fps = options.fps ?? 1.0;
  const frameHeight = options.frameHeight;
  if (!(fps > 0)) {
    throw new Error(`fps must be positive, got ${fps}`);
  }
  if (!(frameHeight > 0)) {
    throw new Error(`frame height must be positive, got ${frameHeight}`);
  }
  const lines = dataLines(text);
  if (lines.length === 0) {
    throw new Error("line 1: empty faces file");
  }
  const header = splitCsvLine(lines[0]).map((h) => h.trim().toLowerCase());
  if (header.length !== HEADER.length || !HEADER.every((h, i) => h === header[i])) {
    throw new Error(`line 1: unexpected header [${header.join(", ")}]; expected [${HEADER.join(", ")}]`);
  }

  const records: FaceRecord[] = [];
  const drops: ConversionResult<FaceRecord>["drops"] = [];
  for (let i = 1; i < lines.length; i++) {
    const lineNo = i + 1;
    const row = splitCsvLine(lines[i]).map((field) => field.trim());
    if (row.length !== HEADER.length) {
      throw new Error(`line ${lineNo}: expected ${HEADER.length} fields, got ${row.length}`);
    }
    const [frameText, bboxText, confText, decisionText] = row;
    const frame = Number(frameText);
    const conf = Number(confText);
    const decision = Number(decisionText);
    if (!Number.isFinite(frame) || frame < 0) {
      throw new Error(`line ${lineNo}: bad frame index "${frameText}"`);
    }
    if (!Number.isFinite(conf) || !Number.isFinite(decision)) {
      throw new Error(`line ${lineNo}: non-numeric confidence or decision`);
    }
    const bbox = BBOX_RE.exec(bboxText);
    if (bbox === null) {
      throw new Error(`line ${lineNo}: bbox "${bboxText}" not in "(x1, y1, x2, y2)" form`);
    }
    const y1 = Math.min(Math.max(Number(bbox[2]), 0), frameHeight);
    const y2 = Math.min(Math.max(Number(bbox[4]), 0), frameHeight);
    const heightRatio = (y2 - y1) / frameHeight;
    if (heightRatio <= 0) {
      drops.push({ line: lineNo, reason: `degenerate box after clipping: "${bboxText}"` });
      continue;
    }
    records.push({
      media_id: mediaId,
      frame_ms: Math.round((frame / fps) * 1000),
      height_ratio: heightRatio,
      female_score: logistic(decision),
    });
  }
  records.sort((a, b) => a.frame_ms - b.frame_ms);
  return {
    records,
    drops,
    rowsIn: lines.length - 1,
    metadata: { ...FACES_TOOL_METADATA, fps, frame_height: frameHeight },
  };
}
