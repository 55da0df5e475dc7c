import fs from "node:fs";
import path from "node:path";
import { MissingColumnsError, readSummaryCsv } from "./csv.js";
import {
  FacetKey,
  MethodFilterError,
  XAxisKey,
  frequencyGridOption,
  meanEstimateOption,
} from "./figures.js";
import { renderSvg } from "./render.js";

const USAGE = `usage:
  node dist/cli.js mean-estimate --summary <summary.csv> --out <figure.svg>
                                 [--x snr|p] [--facet-by snr|p|scenario|n]
                                 [--methods m1,m2,...]
  node dist/cli.js frequency-grid --summary <summary.csv> --out <figure.svg>
                                  [--methods m1,m2,...]

Reads a pesel bench summary CSV (schema "pesel-bench summary v1") and writes
an SVG figure. Statistics are taken from the CSV as-is, never recomputed.`;

interface Flags {
  [key: string]: string;
}

function parseFlags(argv: string[]): Flags {
  const flags: Flags = {};
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    const value = argv[i + 1];
    if (!key.startsWith("--") || value === undefined) {
      throw new Error(`malformed arguments near ${key}`);
    }
    flags[key.slice(2)] = value;
  }
  return flags;
}

function requireFlag(flags: Flags, name: string): string {
  const value = flags[name];
  if (!value) {
    throw new Error(`missing required flag --${name}`);
  }
  return value;
}

function oneOf<T extends string>(value: string, allowed: readonly T[]): T {
  if (!(allowed as readonly string[]).includes(value)) {
    throw new Error(`expected one of ${allowed.join(", ")}, got ${value}`);
  }
  return value as T;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (!command || command === "--help" || command === "-h") {
    console.log(USAGE);
    return command ? 0 : 1;
  }
  try {
    const flags = parseFlags(rest);
    const summaryPath = requireFlag(flags, "summary");
    const outPath = requireFlag(flags, "out");
    const methods = flags.methods ? flags.methods.split(",") : undefined;
    const rows = readSummaryCsv(summaryPath);

    let svg: string;
    if (command === "mean-estimate") {
      const x = oneOf<XAxisKey>(flags.x ?? "p", ["snr", "p"]);
      const facetBy = oneOf<FacetKey>(flags["facet-by"] ?? "snr", [
        "snr",
        "p",
        "scenario",
        "n",
      ]);
      svg = renderSvg(meanEstimateOption(rows, { x, facetBy, methods }), 920, 460);
    } else if (command === "frequency-grid") {
      svg = renderSvg(frequencyGridOption(rows, { methods }), 1000, 1200);
    } else {
      console.error(`unknown command ${command}\n${USAGE}`);
      return 1;
    }

    fs.mkdirSync(path.dirname(path.resolve(outPath)), { recursive: true });
    fs.writeFileSync(outPath, svg, "utf8");
    console.log(`wrote ${outPath}`);
    return 0;
  } catch (error) {
    if (error instanceof MissingColumnsError || error instanceof MethodFilterError) {
      console.error(`error: ${error.message}`);
    } else {
      console.error(`error: ${(error as Error).message}`);
    }
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
