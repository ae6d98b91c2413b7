import { createHash } from "node:crypto";

import type { AdapterManifest, ConversionResult } from "./types.js";

export function sha256Hex(data: Buffer | string): string {
  return createHash("sha256").update(data).digest("hex");
}

/**
 * Assemble the audit manifest for one conversion. Enforces the accounting
 * invariant: every input row is either emitted or logged as a drop.
 */
export function buildManifest(
  tool: string,
  toolVersion: string,
  inputBytes: Buffer,
  result: ConversionResult<unknown>,
): AdapterManifest {
  if (result.records.length + result.drops.length !== result.rowsIn) {
    throw new Error(
      `accounting violation: ${result.rowsIn} rows in, ` +
        `${result.records.length} out + ${result.drops.length} dropped`,
    );
  }
  return {
    tool,
    tool_version: toolVersion,
    input_digest: sha256Hex(inputBytes),
    rows_in: result.rowsIn,
    rows_out: result.records.length,
    drops: result.drops,
    metadata: result.metadata,
  };
}

export function toJsonl(records: unknown[]): string {
  return records.map((record) => JSON.stringify(record)).join("\n") + (records.length ? "\n" : "");
}
