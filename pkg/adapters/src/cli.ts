#!/usr/bin/env node
/**
 * wre-adapt: convert upstream tool outputs into canonical ingest files.
 *
 *   wre-adapt segmenter --input seg.csv --output segments.jsonl --media-id m1
 *   wre-adapt asr       --input asr.json --output utterances.jsonl --media-id m1
 *   wre-adapt faces     --input faces.csv --output faces.jsonl --media-id m1 \
 *                       --frame-height 720 [--fps 1]
 *   wre-adapt insee     --output names.zip [--url ...]
 *
 * A conversion manifest (tool, input digest, row accounting, drop log) is
 * written alongside every output as <output>.manifest.json.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { ASR_TOOL, convertAsr } from "./asr.js";
import { FACES_TOOL, convertFaces } from "./faces.js";
import { downloadNamesDb, INSEE_FIRST_NAMES_FILE } from "./insee.js";
import { buildManifest, toJsonl } from "./manifest.js";
import { convertSegmenter, SEGMENTER_TOOL } from "./segmenter.js";
import type { ConversionResult } from "./types.js";

const USAGE = "usage: wre-adapt <segmenter|asr|faces|insee> --input FILE --output FILE " +
  "--media-id ID [--fps N] [--frame-height PX] [--tool-version V] [--url URL]";

interface Flags {
  input?: string;
  output?: string;
  "media-id"?: string;
  fps?: string;
  "frame-height"?: string;
  "tool-version"?: string;
  url?: string;
}

function required(flags: Flags, name: keyof Flags): string {
  const value = flags[name];
  if (value === undefined) {
    throw new Error(`missing --${name}\n${USAGE}`);
  }
  return value;
}

export async function main(argv: string[]): Promise<number> {
  const { values, positionals } = parseArgs({
    args: argv,
    allowPositionals: true,
    options: {
      input: { type: "string" },
      output: { type: "string" },
      "media-id": { type: "string" },
      fps: { type: "string" },
      "frame-height": { type: "string" },
      "tool-version": { type: "string" },
      url: { type: "string" },
    },
  });
  const flags = values as Flags;
  const command = positionals[0];
  if (command === undefined || !["segmenter", "asr", "faces", "insee"].includes(command)) {
    console.error(command === undefined ? USAGE : `unknown command "${command}"\n${USAGE}`);
    return 2;
  }

  try {
    if (command === "insee") {
      const out = required(flags, "output");
      const bytes = await downloadNamesDb(out, flags.url ?? INSEE_FIRST_NAMES_FILE);
      console.log(`downloaded ${bytes} bytes to ${out}`);
      return 0;
    }

    const inputPath = required(flags, "input");
    const outputPath = required(flags, "output");
    const mediaId = required(flags, "media-id");
    const inputBytes = readFileSync(inputPath);
    const text = inputBytes.toString("utf-8");

    let tool: string;
    let result: ConversionResult<unknown>;
    if (command === "segmenter") {
      tool = SEGMENTER_TOOL;
      result = convertSegmenter(text, mediaId);
    } else if (command === "asr") {
      tool = ASR_TOOL;
      result = convertAsr(text, mediaId);
    } else {
      tool = FACES_TOOL;
      result = convertFaces(text, mediaId, {
        fps: flags.fps === undefined ? undefined : Number(flags.fps),
        frameHeight: Number(required(flags, "frame-height")),
      });
    }

    const manifest = buildManifest(tool, flags["tool-version"] ?? "unknown",
      inputBytes, result);
    writeFileSync(outputPath, toJsonl(result.records), "utf-8");
    writeFileSync(`${outputPath}.manifest.json`,
      JSON.stringify(manifest, null, 2) + "\n", "utf-8");
    console.log(`${tool}: ${manifest.rows_in} rows in, ${manifest.rows_out} out, ` +
      `${manifest.drops.length} dropped -> ${outputPath}`);
    return 0;
  } catch (error) {
    console.error(`error: ${(error as Error).message}`);
    return 1;
  }
}

const invokedDirectly = process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
