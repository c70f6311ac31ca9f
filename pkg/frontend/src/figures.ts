import type { EChartsOption, SeriesOption } from "echarts";
import { FederationRow, PerResourceRow } from "./csv.js";

export type FigureId =
  | "fed_earnings"
  | "fed_response"
  | "fed_budget"
  | "owner_mi"
  | "owner_earnings"
  | "owner_epp"
  | "user_response"
  | "user_budget"
  | "user_accepted"
  | "msgs_per_job"
  | "msgs_remote"
  | "msgs_local";

interface FederationFigure {
  source: "federation";
  column: keyof FederationRow;
  title: string;
  yLabel: string;
}

interface PerResourceFigure {
  source: "per_resource";
  column: keyof PerResourceRow;
  title: string;
  yLabel: string;
}

export const FIGURES: Record<FigureId, FederationFigure | PerResourceFigure> = {
  fed_earnings: {
    source: "federation", column: "total_earnings",
    title: "Total federation earnings", yLabel: "grid dollars",
  },
  fed_response: {
    source: "federation", column: "avg_response",
    title: "Average response time across the federation", yLabel: "sim units",
  },
  fed_budget: {
    source: "federation", column: "avg_budget",
    title: "Average budget spent across the federation", yLabel: "grid dollars",
  },
  owner_mi: {
    source: "per_resource", column: "mi_executed",
    title: "Total MI executed per resource", yLabel: "million instructions",
  },
  owner_earnings: {
    source: "per_resource", column: "earnings",
    title: "Total earnings per resource", yLabel: "grid dollars",
  },
  owner_epp: {
    source: "per_resource", column: "earnings_per_proc",
    title: "Earnings per processor", yLabel: "grid dollars",
  },
  user_response: {
    source: "per_resource", column: "avg_response",
    title: "Average response time per resource", yLabel: "sim units",
  },
  user_budget: {
    source: "per_resource", column: "avg_budget",
    title: "Average budget spent per resource", yLabel: "grid dollars",
  },
  user_accepted: {
    source: "per_resource", column: "jobs_accepted",
    title: "Jobs accepted per resource", yLabel: "jobs",
  },
  msgs_per_job: {
    source: "federation", column: "avg_msgs_per_job",
    title: "Average messages per job", yLabel: "messages",
  },
  msgs_remote: {
    source: "per_resource", column: "remote_msgs",
    title: "Remote bid messages received per resource", yLabel: "messages",
  },
  msgs_local: {
    source: "per_resource", column: "local_msgs",
    title: "Local job messages per resource", yLabel: "messages",
  },
};

export const FIGURE_IDS = Object.keys(FIGURES) as FigureId[];

const X_LABEL = "total SLA bid delay (% of deadline)";

function phiPercent(phi: number): number {
  return phi * 100;
}

function baseOption(title: string, yLabel: string, xValues: number[]): EChartsOption {
  return {
    animation: false,
    title: { text: title, left: "center" },
    grid: { left: 70, right: 30, top: 60, bottom: 60 },
    xAxis: {
      type: "category",
      name: X_LABEL,
      nameLocation: "middle",
      nameGap: 30,
      data: xValues.map(String),
    },
    yAxis: { type: "value", name: yLabel },
    legend: { bottom: 0 },
  };
}

export function federationFigure(
  figure: FederationFigure & { id?: string },
  rows: FederationRow[]
): EChartsOption {
  const sorted = [...rows].sort((a, b) => a.phi - b.phi);
  const option = baseOption(figure.title, figure.yLabel, sorted.map((r) => phiPercent(r.phi)));
  const series: SeriesOption = {
    type: "line",
    name: "federation",
    data: sorted.map((r) => r[figure.column] as number),
  };
  option.series = [series];
  return option;
}

export function perResourceFigure(
  figure: PerResourceFigure,
  rows: PerResourceRow[]
): EChartsOption {
  const phis = [...new Set(rows.map((r) => r.phi))].sort((a, b) => a - b);
  const resources = [...new Set(rows.map((r) => r.resource))];
  const option = baseOption(figure.title, figure.yLabel, phis.map(phiPercent));
  option.series = resources.map((name): SeriesOption => {
    const byPhi = new Map(
      rows.filter((r) => r.resource === name).map((r) => [r.phi, r[figure.column] as number])
    );
    return { type: "line", name, data: phis.map((phi) => byPhi.get(phi) ?? null) };
  });
  return option;
}

export function buildOption(
  id: FigureId,
  federation: FederationRow[],
  perResource: PerResourceRow[]
): EChartsOption {
  const figure = FIGURES[id];
  return figure.source === "federation"
    ? federationFigure(figure, federation)
    : perResourceFigure(figure, perResource);
}
