import { createHash } from "node:crypto";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { main } from "../src/cli.js";
import { INSEE_FIRST_NAMES_FILE, INSEE_FIRST_NAMES_PAGE } from "../src/insee.js";

const SAMPLES = join(__dirname, "../samples");

function sha256(path: string): string {
  return createHash("sha256").update(readFileSync(path)).digest("hex");
}

describe("wre-adapt CLI", () => {
  it("converts a segmenter file and writes the manifest alongside", async () => {
    const dir = mkdtempSync(join(tmpdir(), "adapt-"));
    const out = join(dir, "segments.jsonl");
    const code = await main(["segmenter", "--input", join(SAMPLES, "segmenter_sample.csv"),
      "--output", out, "--media-id", "m1", "--tool-version", "0.7.7"]);
    expect(code).toBe(0);
    const lines = readFileSync(out, "utf-8").trim().split("\n");
    expect(lines).toHaveLength(6);
    expect(JSON.parse(lines[0])).toMatchObject({ media_id: "m1", label: "noise" });

    const manifest = JSON.parse(readFileSync(`${out}.manifest.json`, "utf-8"));
    expect(manifest.tool).toBe("ina-speech-segmenter-csv");
    expect(manifest.tool_version).toBe("0.7.7");
    expect(manifest.input_digest).toBe(sha256(join(SAMPLES, "segmenter_sample.csv")));
    expect(manifest.rows_in).toBe(manifest.rows_out + manifest.drops.length);
  });

  it("converts ASR and faces samples", async () => {
    const dir = mkdtempSync(join(tmpdir(), "adapt-"));
    const utts = join(dir, "utterances.jsonl");
    expect(await main(["asr", "--input", join(SAMPLES, "asr_sample.json"),
      "--output", utts, "--media-id", "m1"])).toBe(0);
    expect(readFileSync(utts, "utf-8").trim().split("\n")).toHaveLength(4);

    const faces = join(dir, "faces.jsonl");
    expect(await main(["faces", "--input", join(SAMPLES, "faces_sample.csv"),
      "--output", faces, "--media-id", "m1", "--frame-height", "720"])).toBe(0);
    const manifest = JSON.parse(readFileSync(`${faces}.manifest.json`, "utf-8"));
    expect(manifest.metadata.frame_height).toBe(720);
    expect(manifest.rows_in).toBe(manifest.rows_out + manifest.drops.length);
  });

  it("rejects unknown commands and missing flags", async () => {
    expect(await main(["transmogrify"])).toBe(2);
    expect(await main(["segmenter", "--output", "x"])).toBe(1);
    expect(await main([])).toBe(2);
  });

  it("exposes the public names-database endpoints", () => {
    expect(INSEE_FIRST_NAMES_PAGE).toContain("insee.fr");
    expect(INSEE_FIRST_NAMES_FILE).toContain("insee.fr");
    expect(INSEE_FIRST_NAMES_FILE).toMatch(/\.zip$/);
  });
});
