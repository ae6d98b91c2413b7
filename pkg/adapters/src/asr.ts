/**
 * Converter for utterance-timestamped ASR JSON output (an object with a
 * "segments" array of {start, end, text} in seconds; extra keys from the
 * source tool are ignored) into canonical utterances.jsonl.
 *
 * No semantic filtering happens here: hallucination-looking captions pass
 * through, the engine applies its own filter. Only records the canonical
 * format cannot express are dropped and logged: empty text, empty interval
 * after millisecond rounding.
 */

import type { ConversionResult, UtteranceRecord } from "./types.js";

export const ASR_TOOL = "whisperx-json";

interface RawSegment {
  start: unknown;
  end: unknown;
  text: unknown;
}

export function convertAsr(text: string, mediaId: string): ConversionResult<UtteranceRecord> {
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch (error) {
    throw new Error(`invalid ASR JSON: ${(error as Error).message}`);
  }
  if (typeof parsed !== "object" || parsed === null || !Array.isArray((parsed as { segments?: unknown }).segments)) {
    throw new Error('ASR JSON must be an object with a "segments" array');
  }
  const segments = (parsed as { segments: RawSegment[] }).segments;

  const records: UtteranceRecord[] = [];
  const drops: ConversionResult<UtteranceRecord>["drops"] = [];
  segments.forEach((segment, index) => {
    const where = index + 1;
    if (typeof segment !== "object" || segment === null) {
      throw new Error(`segment ${where}: not an object`);
    }
    const { start, end, text: segText } = segment;
    if (typeof start !== "number" || typeof end !== "number") {
      throw new Error(`segment ${where}: start/end must be numbers`);
    }
    if (typeof segText !== "string") {
      throw new Error(`segment ${where}: text must be a string`);
    }
    if (segText.trim() === "") {
      drops.push({ line: where, reason: "empty text" });
      return;
    }
    const startMs = Math.round(start * 1000);
    const endMs = Math.round(end * 1000);
    if (endMs <= startMs) {
      drops.push({ line: where, reason: `empty interval after rounding (${start}, ${end})` });
      return;
    }
    records.push({ media_id: mediaId, start_ms: startMs, end_ms: endMs, text: segText });
  });
  records.sort((a, b) => a.start_ms - b.start_ms || a.end_ms - b.end_ms);
  return { records, drops, rowsIn: segments.length, metadata: {} };
}
