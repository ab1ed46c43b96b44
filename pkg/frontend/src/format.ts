// Display helpers kept pure so they can be unit tested.

import { DispatchRecord, provenance } from "./protocol.js";
import { ConsoleState } from "./state.js";

const BOOL_KEYS = new Set(["rain", "flame", "gas", "zone_breach", "worn"]);

export function formatAge(seconds: number): string {
  if (seconds < 10) return `${seconds.toFixed(1)} s`;
  if (seconds < 120) return `${Math.round(seconds)} s`;
  return `${(seconds / 60).toFixed(1)} min`;
}

export function formatValue(key: string, value: number): string {
  if (BOOL_KEYS.has(key)) return value >= 0.5 ? "yes" : "no";
  if (key === "temperature") return `${value.toFixed(1)} °C`;
  if (key === "plant_humidity") return `${value.toFixed(0)} %`;
  if (key === "time") return `${value.toFixed(2)} h`;
  const rounded = Math.round(value * 100) / 100;
  return `${rounded}`;
}

export function feedLine(rec: DispatchRecord): string {
  const a = rec.action;
  const who = provenance(a);
  switch (a.type) {
    case "message":
      return `${a.kind} ${a.id} (${who})`;
    case "actuator":
      return `${a.id} ${a.state} (${who})`;
    case "notify":
      return `notify ${a.kind}: ${a.detail}`;
    case "mode":
      return `mode → ${a.to} (${a.cause})`;
  }
}

export interface Tile {
  key: string;
  text: string; // "awaiting data" until the first reading lands
  age: string | null;
  stale: boolean;
}

// preferred tile order; anything else the bus reports appends after these
const TILE_ORDER = [
  "temperature",
  "plant_humidity",
  "rain",
  "flame",
  "gas",
  "movement",
  "game_score",
];

function isDerived(key: string): boolean {
  return key.includes("(") || key === "time" || key === "zone_breach";
}

export function sensorTiles(state: ConsoleState): Tile[] {
  const keys = new Set<string>(TILE_ORDER);
  for (const k of Object.keys(state.values)) if (!isDerived(k)) keys.add(k);
  for (const k of Object.keys(state.agesS)) {
    if (!isDerived(k) && k !== "position" && k !== "worn") keys.add(k);
  }
  const ordered = [
    ...TILE_ORDER,
    ...[...keys].filter((k) => !TILE_ORDER.includes(k)).sort(),
  ];
  return ordered.map((key) => {
    const value = state.values[key];
    const age = state.agesS[key];
    const stale = state.stale.includes(key);
    let text = "awaiting data";
    if (value !== undefined) text = formatValue(key, value);
    else if (stale) text = "stale";
    return {
      key,
      text,
      age: age !== undefined ? formatAge(age) : null,
      stale,
    };
  });
}
