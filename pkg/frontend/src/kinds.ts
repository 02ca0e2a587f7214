/**
 * Figure assembly for each supported kind, consuming the CLI table schemas.
 * This layer only reads and draws; it never recomputes any physics.
 */

import { SchemaError, Table, column, readJsonDocument, readTable, requireColumns } from "./csv.js";
import { ChartSpec, renderChart } from "./chart.js";

export const KINDS = ["decoherence", "scaling", "mc_overlay", "optimal_time"] as const;
export type Kind = (typeof KINDS)[number];

const BLUE = "#2458c5";
const RED = "#c53030";
const GREEN = "#1e7d43";
const GRAY = "#666666";
const ORANGE = "#d97706";

function decoherence(table: Table, source: string): ChartSpec {
  requireColumns(table, ["t", "gamma_classical", "gamma_1f_limit", "gamma_markov_limit"], source);
  const t = column(table, "t");
  const series = [
    { label: "full rate", color: BLUE, x: t, y: column(table, "gamma_classical") },
    { label: "short-time line", color: GREEN, x: t, y: column(table, "gamma_1f_limit"), dash: "6,4" },
    { label: "memoryless plateau", color: RED, x: t, y: column(table, "gamma_markov_limit"), dash: "2,4" },
  ];
  if (table.columns.includes("gamma_bosonic")) {
    series.push({ label: "bosonic bath", color: ORANGE, x: t, y: column(table, "gamma_bosonic"), dash: "8,3" });
  }
  return {
    title: "Single-spin decoherence rate",
    subtitle: "crossover from quadratic short-time decay to exponential decay",
    xLabel: "exposure time t",
    yLabel: "decay rate",
    series,
  };
}

function scaling(table: Table, source: string, sidecar?: Record<string, unknown>): ChartSpec {
  requireColumns(table, ["L", "t", "variance", "uncertainty"], source);
  const slope = sidecar && typeof sidecar.slope === "number" ? ` (fitted slope ${sidecar.slope.toFixed(3)})` : "";
  return {
    title: "Estimate uncertainty vs probe size",
    subtitle: `log-log with reference slopes${slope}`,
    xLabel: "probe size L",
    yLabel: "uncertainty",
    xLog: true,
    yLog: true,
    defaultX: [10, 1e4],
    defaultY: [1e-4, 1e-1],
    series: [
      {
        label: "scheduled probe",
        color: BLUE,
        x: column(table, "L"),
        y: column(table, "uncertainty"),
        points: true,
        line: false,
      },
    ],
    guides: [
      { slope: -0.5, label: "slope -1/2 (classical limit)", color: GRAY },
      { slope: -0.75, label: "slope -3/4", color: GREEN },
      { slope: -1.0, label: "slope -1 (noiseless limit)", color: RED },
    ],
  };
}

function mcOverlay(table: Table, source: string): ChartSpec {
  requireColumns(table, ["t", "mc_coherence", "mc_stderr", "analytic_coherence"], source);
  const t = column(table, "t");
  return {
    title: "Sampled coherence vs closed form",
    subtitle: "error bars: 3 standard errors",
    xLabel: "evolution time t",
    yLabel: "coherence",
    xLog: true,
    series: [
      { label: "closed form", color: GRAY, x: t, y: column(table, "analytic_coherence") },
      {
        label: "trajectory ensemble",
        color: BLUE,
        x: t,
        y: column(table, "mc_coherence"),
        yerr: column(table, "mc_stderr"),
        points: true,
        line: false,
      },
    ],
  };
}

function optimalTime(table: Table, source: string): ChartSpec {
  requireColumns(table, ["L", "t_star", "variance_star", "t_star_times_sqrtL"], source);
  return {
    title: "Optimal exposure time vs probe size",
    subtitle: "reference slope -1/2",
    xLabel: "probe size L",
    yLabel: "optimal exposure time",
    xLog: true,
    yLog: true,
    defaultX: [10, 1e4],
    defaultY: [1e-3, 1],
    series: [
      {
        label: "minimizer",
        color: BLUE,
        x: column(table, "L"),
        y: column(table, "t_star"),
        points: true,
      },
    ],
    guides: [{ slope: -0.5, label: "slope -1/2", color: GREEN }],
  };
}

export function buildFigure(kind: Kind, inputPaths: string[]): string {
  if (inputPaths.length === 0) {
    throw new SchemaError("at least one input path is required");
  }
  const [tablePath, ...extra] = inputPaths;
  const table = readTable(tablePath);
  let spec: ChartSpec;
  switch (kind) {
    case "decoherence":
      spec = decoherence(table, tablePath);
      break;
    case "scaling": {
      const sidecar = extra.length > 0 ? readJsonDocument(extra[0]) : undefined;
      spec = scaling(table, tablePath, sidecar);
      break;
    }
    case "mc_overlay":
      spec = mcOverlay(table, tablePath);
      break;
    case "optimal_time":
      spec = optimalTime(table, tablePath);
      break;
    default:
      throw new SchemaError(`unknown figure kind "${kind as string}"`);
  }
  return renderChart(spec);
}
