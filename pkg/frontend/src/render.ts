#!/usr/bin/env node
/**
 * SVG figure renderer for ghz-sensing CLI outputs.
 *
 * Usage:
 *   render --kind decoherence|scaling|mc_overlay|optimal_time \
 *          --in table.csv[,sidecar.json] --out figure.svg
 *
 * Rendering is deterministic: the same inputs always produce the same bytes.
 */

import { writeFileSync } from "fs";
import { parseArgs } from "util";

import { KINDS, Kind, buildFigure } from "./kinds.js";
import { SchemaError } from "./csv.js";

export interface RenderRequest {
  kind: Kind;
  inputs: string[];
  output: string;
}

export function renderFigure(request: RenderRequest): void {
  const svg = buildFigure(request.kind, request.inputs);
  writeFileSync(request.output, svg);
}

export function parseCli(argv: string[]): RenderRequest {
  const { values } = parseArgs({
    args: argv,
    options: {
      kind: { type: "string" },
      in: { type: "string", multiple: true },
      out: { type: "string" },
    },
  });
  const kind = values.kind as string | undefined;
  if (!kind || !(KINDS as readonly string[]).includes(kind)) {
    throw new SchemaError(`--kind must be one of: ${KINDS.join(", ")}`);
  }
  const inputs = (values.in ?? []).flatMap((entry) => entry.split(",")).filter((p) => p.length > 0);
  if (inputs.length === 0) {
    throw new SchemaError("--in requires at least one path");
  }
  if (!values.out) {
    throw new SchemaError("--out is required");
  }
  return { kind: kind as Kind, inputs, output: values.out };
}

function main(): number {
  try {
    const request = parseCli(process.argv.slice(2));
    renderFigure(request);
    console.log(`wrote ${request.output}`);
    return 0;
  } catch (error) {
    console.error(error instanceof Error ? error.message : String(error));
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("render.js")) {
  process.exit(main());
}
