// Wire contract for the decision service's WebSocket bridge.
//
// Inbound frames: one "snapshot" on connect (and again every tick), then
// "event" frames for each dispatch-log record and "ack" frames for commands.
// Outbound: {"type": "command", kind, payload, nonce}.

export type MessageKind = "voice" | "image" | "text";

export type DispatchAction =
  | {
      type: "message";
      kind: MessageKind;
      id: number;
      rule: number;
      src: "rule" | "caregiver";
      nonce?: string;
    }
  | {
      type: "actuator";
      id: string;
      state: "on" | "off";
      rule: number;
      src: "rule" | "caregiver";
    }
  | { type: "notify"; kind: string; detail: string }
  | { type: "mode"; to: "automated" | "semi"; cause: string };

/** One dispatch-log record; `seq` is the service's global dispatch counter. */
export interface DispatchRecord {
  seq: number;
  tick: number;
  t: number;
  action: DispatchAction;
  topic?: string;
  payload?: Record<string, unknown>;
}

export type ZoneShape =
  | { name: string; shape: "disc"; x: number; y: number; r: number }
  | { name: string; shape: "polygon"; points: [number, number][] };

export interface SmartObject {
  name: string;
  x: number;
  y: number;
}

export interface SnapshotData {
  t: number;
  mode: "automated" | "semi";
  active_endpoints: number;
  locked: boolean;
  pose: [number, number, number] | null; // x m, y m, facing deg
  worn: boolean | null;
  values: Record<string, number>;
  ages_s: Record<string, number>;
  stale: string[];
  zones: ZoneShape[];
  objects: SmartObject[];
  message_ids: Record<string, number[]>;
  feed: DispatchRecord[];
}

export interface AckData {
  ok: boolean;
  kind?: string;
  t?: number;
  nonce?: string;
  error?: string;
}

export type ServerFrame =
  | { type: "snapshot"; data: SnapshotData }
  | { type: "event"; data: DispatchRecord }
  | { type: "ack"; data: AckData };

export type CommandKind =
  | "reminder"
  | "lock"
  | "unlock"
  | "zone_add"
  | "zone_del"
  | "med_schedule"
  | "override";

export interface CommandFrame {
  type: "command";
  kind: CommandKind;
  payload: Record<string, unknown>;
  nonce: string;
}

function isRecord(v: unknown): v is Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v);
}

/**
 * Parse one inbound frame. Returns null for anything that does not look
 * like a bridge frame; the caller drops it rather than crashing the view.
 */
export function parseServerFrame(raw: string): ServerFrame | null {
  let obj: unknown;
  try {
    obj = JSON.parse(raw);
  } catch {
    return null;
  }
  if (!isRecord(obj) || !isRecord(obj.data)) return null;
  const data = obj.data;
  switch (obj.type) {
    case "snapshot":
      if (typeof data.t !== "number" || !isRecord(data.values)) return null;
      return { type: "snapshot", data: data as unknown as SnapshotData };
    case "event":
      if (typeof data.seq !== "number" || !isRecord(data.action)) return null;
      return { type: "event", data: data as unknown as DispatchRecord };
    case "ack":
      if (typeof data.ok !== "boolean") return null;
      return { type: "ack", data: data as unknown as AckData };
    default:
      return null;
  }
}

/** Provenance tag for a feed row: rule number or the caregiver. */
export function provenance(action: DispatchAction): string {
  if (action.type === "notify") return "service";
  if (action.type === "mode") return action.cause;
  return action.src === "caregiver" ? "caregiver" : `rule ${action.rule}`;
}
