/** Canonical ingest records (one JSON object per line on disk). */

export interface SegmentRecord {
  media_id: string;
  start_ms: number;
  end_ms: number;
  label: "male" | "female" | "music" | "noise";
}

export interface UtteranceRecord {
  media_id: string;
  start_ms: number;
  end_ms: number;
  text: string;
}

export interface FaceRecord {
  media_id: string;
  frame_ms: number;
  height_ratio: number;
  female_score: number;
}

export interface DropEntry {
  /** 1-based line of the source file (or segment index for JSON input). */
  line: number;
  reason: string;
}

/** Conversion audit trail written alongside every output file. */
export interface AdapterManifest {
  tool: string;
  tool_version: string;
  input_digest: string;
  rows_in: number;
  rows_out: number;
  drops: DropEntry[];
  metadata: Record<string, unknown>;
}

export interface ConversionResult<T> {
  records: T[];
  drops: DropEntry[];
  rowsIn: number;
  metadata: Record<string, unknown>;
}
