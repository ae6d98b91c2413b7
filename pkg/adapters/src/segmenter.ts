/**
 * Converter for speech-segmenter CSV output (columns: label, start seconds,
 * stop seconds; tab- or comma-separated) into canonical segments.jsonl.
 *
 * Labels map {male, female, music, noEnergy/noise -> noise}; any other label
 * is dropped and logged. Seconds convert to integer milliseconds, half up.
 * Adjacent same-label rows are emitted as-is; the engine tolerates
 * adjacency.
 */

import { dataLines } from "./csv.js";
import type { ConversionResult, SegmentRecord } from "./types.js";

export const SEGMENTER_TOOL = "ina-speech-segmenter-csv";

const LABEL_MAP: Record<string, SegmentRecord["label"]> = {
  male: "male",
  female: "female",
  music: "music",
  noenergy: "noise",
  noise: "noise",
};

const HEADERS = [
  ["labels", "start", "stop"],
  ["label", "start", "stop"],
];

function splitRow(line: string, delimiter: string): string[] {
  return line.split(delimiter).map((field) => field.trim());
}

export function convertSegmenter(
  text: string,
  mediaId: string,
): ConversionResult<SegmentRecord> {
  const lines = dataLines(text);
  if (lines.length === 0) {
    throw new Error("line 1: empty segmenter file");
  }
  const delimiter = lines[0].includes("\t") ? "\t" : ",";
  const header = splitRow(lines[0], delimiter).map((h) => h.toLowerCase());
  if (!HEADERS.some((want) => want.length === header.length && want.every((h, i) => h === header[i]))) {
    throw new Error(`line 1: unexpected header [${header.join(", ")}]; ` +
      `expected label/labels, start, stop`);
  }

  const records: SegmentRecord[] = [];
  const drops: ConversionResult<SegmentRecord>["drops"] = [];
  for (let i = 1; i < lines.length; i++) {
    const lineNo = i + 1;
    const row = splitRow(lines[i], delimiter);
    if (row.length !== 3) {
      throw new Error(`line ${lineNo}: expected 3 fields, got ${row.length}`);
    }
    const [rawLabel, startText, stopText] = row;
    const start = Number(startText);
    const stop = Number(stopText);
    if (!Number.isFinite(start) || !Number.isFinite(stop)) {
      throw new Error(`line ${lineNo}: non-numeric start/stop (${startText}, ${stopText})`);
    }
    const label = LABEL_MAP[rawLabel.toLowerCase()];
    if (label === undefined) {
      drops.push({ line: lineNo, reason: `unknown label "${rawLabel}"` });
      continue;
    }
    const startMs = Math.round(start * 1000);
    const endMs = Math.round(stop * 1000);
    if (endMs <= startMs) {
      drops.push({ line: lineNo, reason: `empty interval after rounding (${startText}, ${stopText})` });
      continue;
    }
    records.push({ media_id: mediaId, start_ms: startMs, end_ms: endMs, label });
  }
  records.sort((a, b) => a.start_ms - b.start_ms || a.end_ms - b.end_ms);
  return { records, drops, rowsIn: lines.length - 1, metadata: { delimiter } };
}
