// Console state as a pure function of the inbound frame stream.
//
// reduce() never touches the network or the clock on its own: sockets,
// timers and user gestures all arrive as Input values, and outbound
// command frames come back in the step result. Replaying the same input
// sequence therefore reproduces the same view, which is what the tests
// lean on.

import {
  AckData,
  CommandFrame,
  CommandKind,
  DispatchRecord,
  MessageKind,
  ServerFrame,
  SmartObject,
  SnapshotData,
  ZoneShape,
} from "./protocol.js";

export const FEED_LIMIT = 200;
export const PENDING_TIMEOUT_MS = 5000;

export interface Pose {
  x: number;
  y: number;
  facing: number;
}

export type PendingStatus = "pending" | "error" | "timeout";

export interface PendingCommand {
  nonce: string;
  kind: CommandKind;
  label: string;
  sentAtMs: number;
  status: PendingStatus;
  error?: string;
}

export type ZoneDraft =
  | { name: string; shape: "disc"; x: number; y: number; r: number }
  | { name: string; shape: "polygon"; points: [number, number][] };

export type Intent =
  | { kind: "reminder"; message: MessageKind; id: number }
  | { kind: "lock" }
  | { kind: "unlock" }
  | { kind: "zone_add"; zone: ZoneDraft }
  | { kind: "zone_del"; name: string }
  | { kind: "med_schedule"; time: string; voice: number; image?: number }
  | { kind: "override"; mode: "automated" | "semi" | "auto" }
  | { kind: "confirm" }
  | { kind: "cancel" }
  | { kind: "dismiss"; nonce: string };

export type Input =
  | { type: "socket"; status: "connected" | "disconnected" }
  | { type: "frame"; frame: ServerFrame }
  | { type: "clock"; nowMs: number }
  | { type: "intent"; intent: Intent; nowMs: number };

export interface ConsoleState {
  sessionId: string;
  connected: boolean;
  // last applied snapshot timestamp; frames older than this are stale relays
  snapshotT: number | null;
  mode: "automated" | "semi" | null;
  activeEndpoints: number | null;
  locked: boolean | null;
  pose: Pose | null;
  worn: boolean | null;
  values: Record<string, number>;
  agesS: Record<string, number>;
  stale: string[];
  zones: ZoneShape[];
  objects: SmartObject[];
  messageIds: Record<string, number[]>;
  actuators: Record<string, "on" | "off">;
  feed: DispatchRecord[];
  lastFeedSeq: number;
  nonceCounter: number;
  pending: Record<string, PendingCommand>;
  // a destructive intent parks here until the operator confirms it
  confirm: { intent: Intent; label: string } | null;
  notice: string | null;
}

export interface Step {
  state: ConsoleState;
  send: CommandFrame[];
}

export function initialState(sessionId: string): ConsoleState {
  return {
    sessionId,
    connected: false,
    snapshotT: null,
    mode: null,
    activeEndpoints: null,
    locked: null,
    pose: null,
    worn: null,
    values: {},
    agesS: {},
    stale: [],
    zones: [],
    objects: [],
    messageIds: {},
    actuators: {},
    feed: [],
    lastFeedSeq: 0,
    nonceCounter: 0,
    pending: {},
    confirm: null,
    notice: null,
  };
}

const DESTRUCTIVE: ReadonlySet<string> = new Set(["unlock", "zone_del"]);

export function reduce(state: ConsoleState, input: Input): Step {
  switch (input.type) {
    case "socket":
      return { state: applySocket(state, input.status), send: [] };
    case "frame":
      return { state: applyFrame(state, input.frame), send: [] };
    case "clock":
      return { state: applyClock(state, input.nowMs), send: [] };
    case "intent":
      return applyIntent(state, input.intent, input.nowMs);
  }
}

/** Fold a whole recorded stream; convenience for tests and replays. */
export function replay(state: ConsoleState, inputs: Input[]): ConsoleState {
  let s = state;
  for (const input of inputs) s = reduce(s, input).state;
  return s;
}

function applySocket(
  state: ConsoleState,
  status: "connected" | "disconnected",
): ConsoleState {
  if (status === "connected") {
    // a fresh connection resyncs from whatever snapshot arrives next
    return { ...state, connected: true, snapshotT: null, notice: null };
  }
  const pending: Record<string, PendingCommand> = {};
  for (const [nonce, cmd] of Object.entries(state.pending)) {
    pending[nonce] =
      cmd.status === "pending"
        ? { ...cmd, status: "timeout", error: "connection lost" }
        : cmd;
  }
  return { ...state, connected: false, confirm: null, pending };
}

function applyFrame(state: ConsoleState, frame: ServerFrame): ConsoleState {
  switch (frame.type) {
    case "snapshot":
      return applySnapshot(state, frame.data);
    case "event":
      return applyEvent(state, frame.data);
    case "ack":
      return applyAck(state, frame.data);
  }
}

function applySnapshot(state: ConsoleState, data: SnapshotData): ConsoleState {
  // the marker never moves backwards: drop frames older than the newest seen
  if (state.snapshotT !== null && data.t < state.snapshotT) return state;
  const [feed, lastFeedSeq] = mergeFeed(state.feed, state.lastFeedSeq, data.feed);
  return {
    ...state,
    snapshotT: data.t,
    mode: data.mode,
    activeEndpoints: data.active_endpoints,
    locked: data.locked,
    pose: data.pose
      ? { x: data.pose[0], y: data.pose[1], facing: data.pose[2] }
      : null,
    worn: data.worn,
    values: data.values,
    agesS: data.ages_s,
    stale: data.stale,
    zones: data.zones,
    objects: data.objects,
    messageIds: data.message_ids ?? state.messageIds,
    feed,
    lastFeedSeq,
  };
}

function mergeFeed(
  feed: DispatchRecord[],
  lastSeq: number,
  incoming: DispatchRecord[],
): [DispatchRecord[], number] {
  let merged = feed;
  let seq = lastSeq;
  for (const rec of incoming) {
    if (rec.seq <= seq) continue; // already seen via an event frame
    merged = merged === feed ? [...feed] : merged;
    merged.push(rec);
    seq = rec.seq;
  }
  if (merged.length > FEED_LIMIT) merged = merged.slice(-FEED_LIMIT);
  return [merged, seq];
}

function applyEvent(state: ConsoleState, rec: DispatchRecord): ConsoleState {
  if (rec.seq <= state.lastFeedSeq) return state; // already in the feed
  const feed = [...state.feed, rec].slice(-FEED_LIMIT);
  const next: ConsoleState = { ...state, feed, lastFeedSeq: rec.seq };
  const action = rec.action;
  if (action.type === "mode") {
    next.mode = action.to;
    const active = rec.payload?.active;
    if (typeof active === "number") next.activeEndpoints = active;
  } else if (action.type === "actuator") {
    next.actuators = { ...state.actuators, [action.id]: action.state };
    // the door tile follows the retained actuator echo
    if (action.id === "door-relay") next.locked = action.state === "on";
  }
  return next;
}

function applyAck(state: ConsoleState, ack: AckData): ConsoleState {
  if (ack.nonce === undefined || !(ack.nonce in state.pending)) {
    // unsolicited ack: surface rejections, ignore successes
    return ack.ok ? state : { ...state, notice: ack.error ?? "command rejected" };
  }
  const pending = { ...state.pending };
  if (ack.ok) {
    delete pending[ack.nonce];
    return { ...state, pending, notice: null };
  }
  const cmd = pending[ack.nonce]!;
  pending[ack.nonce] = {
    ...cmd,
    status: "error",
    error: ack.error ?? "rejected",
  };
  return { ...state, pending };
}

function applyClock(state: ConsoleState, nowMs: number): ConsoleState {
  let changed = false;
  const pending: Record<string, PendingCommand> = {};
  for (const [nonce, cmd] of Object.entries(state.pending)) {
    if (cmd.status === "pending" && nowMs - cmd.sentAtMs >= PENDING_TIMEOUT_MS) {
      pending[nonce] = { ...cmd, status: "timeout", error: "no ack" };
      changed = true;
    } else {
      pending[nonce] = cmd;
    }
  }
  return changed ? { ...state, pending } : state;
}

function applyIntent(state: ConsoleState, intent: Intent, nowMs: number): Step {
  if (intent.kind === "dismiss") {
    const pending = { ...state.pending };
    delete pending[intent.nonce];
    return { state: { ...state, pending }, send: [] };
  }
  if (intent.kind === "cancel") {
    return { state: { ...state, confirm: null }, send: [] };
  }
  // no control does anything while the bridge is down
  if (!state.connected) return { state, send: [] };
  if (intent.kind === "confirm") {
    if (state.confirm === null) return { state, send: [] };
    const armed = state.confirm.intent;
    return sendCommand({ ...state, confirm: null }, armed, nowMs);
  }
  if (DESTRUCTIVE.has(intent.kind)) {
    return {
      state: { ...state, confirm: { intent, label: describeIntent(intent) } },
      send: [],
    };
  }
  return sendCommand(state, intent, nowMs);
}

function sendCommand(state: ConsoleState, intent: Intent, nowMs: number): Step {
  const built = buildCommand(intent);
  if (built === null) return { state, send: [] };
  const counter = state.nonceCounter + 1;
  const nonce = `${state.sessionId}-${counter}`;
  const frame: CommandFrame = {
    type: "command",
    kind: built.kind,
    payload: { ...built.payload, nonce },
    nonce,
  };
  const pending: Record<string, PendingCommand> = {
    ...state.pending,
    [nonce]: {
      nonce,
      kind: built.kind,
      label: describeIntent(intent),
      sentAtMs: nowMs,
      status: "pending",
    },
  };
  return {
    state: { ...state, nonceCounter: counter, pending },
    send: [frame],
  };
}

function buildCommand(
  intent: Intent,
): { kind: CommandKind; payload: Record<string, unknown> } | null {
  switch (intent.kind) {
    case "reminder":
      return {
        kind: "reminder",
        payload: { kind: intent.message, id: intent.id },
      };
    case "lock":
      return { kind: "lock", payload: {} };
    case "unlock":
      return { kind: "unlock", payload: {} };
    case "zone_add":
      return { kind: "zone_add", payload: zonePayload(intent.zone) };
    case "zone_del":
      return { kind: "zone_del", payload: { name: intent.name } };
    case "med_schedule": {
      const payload: Record<string, unknown> = {
        time: intent.time,
        voice: intent.voice,
      };
      if (intent.image !== undefined) payload.image = intent.image;
      return { kind: "med_schedule", payload };
    }
    case "override":
      return { kind: "override", payload: { mode: intent.mode } };
    default:
      return null;
  }
}

function zonePayload(zone: ZoneDraft): Record<string, unknown> {
  if (zone.shape === "disc") {
    return { name: zone.name, shape: "disc", x: zone.x, y: zone.y, r: zone.r };
  }
  return { name: zone.name, shape: "polygon", points: zone.points };
}

export function describeIntent(intent: Intent): string {
  switch (intent.kind) {
    case "reminder":
      return `send ${intent.message} ${intent.id}`;
    case "lock":
      return "lock door";
    case "unlock":
      return "unlock door";
    case "zone_add":
      return `add zone ${intent.zone.name}`;
    case "zone_del":
      return `delete zone ${intent.name}`;
    case "med_schedule":
      return `medication at ${intent.time}`;
    case "override":
      return `mode ${intent.mode}`;
    default:
      return intent.kind;
  }
}
