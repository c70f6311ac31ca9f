import { readFileSync } from "fs";
import Papa from "papaparse";

export interface PerResourceRow {
  phi: number;
  resource: string;
  earnings: number;
  earnings_per_proc: number;
  mi_executed: number;
  avg_response: number;
  avg_budget: number;
  jobs_accepted: number;
  jobs_dropped: number;
  local_msgs: number;
  remote_msgs: number;
}

export interface FederationRow {
  phi: number;
  total_earnings: number;
  avg_response: number;
  avg_budget: number;
  avg_msgs_per_job: number;
}

export const PER_RESOURCE_COLUMNS: (keyof PerResourceRow)[] = [
  "phi", "resource", "earnings", "earnings_per_proc", "mi_executed",
  "avg_response", "avg_budget", "jobs_accepted", "jobs_dropped",
  "local_msgs", "remote_msgs",
];

export const FEDERATION_COLUMNS: (keyof FederationRow)[] = [
  "phi", "total_earnings", "avg_response", "avg_budget", "avg_msgs_per_job",
];

export class SchemaError extends Error {}

function parseRows(path: string, expected: string[]): Record<string, string>[] {
  const text = readFileSync(path, "utf8");
  const result = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const fields = result.meta.fields ?? [];
  const missing = expected.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${path}: missing column(s) ${missing.join(", ")}; expected header: ${expected.join(",")}`
    );
  }
  if (result.data.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  return result.data;
}

function num(row: Record<string, string>, column: string, path: string): number {
  const value = Number(row[column]);
  if (!Number.isFinite(value)) {
    throw new SchemaError(`${path}: column ${column} has non-numeric value ${row[column]}`);
  }
  return value;
}

export function readPerResource(path: string): PerResourceRow[] {
  return parseRows(path, PER_RESOURCE_COLUMNS as string[]).map((row) => ({
    phi: num(row, "phi", path),
    resource: row.resource,
    earnings: num(row, "earnings", path),
    earnings_per_proc: num(row, "earnings_per_proc", path),
    mi_executed: num(row, "mi_executed", path),
    avg_response: num(row, "avg_response", path),
    avg_budget: num(row, "avg_budget", path),
    jobs_accepted: num(row, "jobs_accepted", path),
    jobs_dropped: num(row, "jobs_dropped", path),
    local_msgs: num(row, "local_msgs", path),
    remote_msgs: num(row, "remote_msgs", path),
  }));
}

export function readFederation(path: string): FederationRow[] {
  return parseRows(path, FEDERATION_COLUMNS as string[]).map((row) => ({
    phi: num(row, "phi", path),
    total_earnings: num(row, "total_earnings", path),
    avg_response: num(row, "avg_response", path),
    avg_budget: num(row, "avg_budget", path),
    avg_msgs_per_job: num(row, "avg_msgs_per_job", path),
  }));
}
