import { describe, expect, it } from "vitest";

import {
  CommandFrame,
  DispatchRecord,
  SnapshotData,
} from "../src/protocol.js";
import {
  ConsoleState,
  FEED_LIMIT,
  initialState,
  Input,
  Intent,
  PENDING_TIMEOUT_MS,
  reduce,
  replay,
} from "../src/state.js";

function range(n: number): number[] {
  return Array.from({ length: n }, (_, i) => i + 1);
}

const BASE_SNAPSHOT: SnapshotData = {
  t: 5000,
  mode: "automated",
  active_endpoints: 22,
  locked: false,
  pose: [4.8, 2.8, 48.0],
  worn: null,
  values: { temperature: 21.0, rain: 1.0, time: 15.0, "distance(object1)": 2.83 },
  ages_s: { temperature: 0.4, rain: 1.2, position: 0.1 },
  stale: [],
  zones: [],
  objects: [
    { name: "object1", x: 5.0, y: 3.0 },
    { name: "object2", x: 1.5, y: 0.8 },
  ],
  message_ids: { voice: range(20), image: range(10), text: range(10) },
  feed: [],
};

function snapFrame(over: Partial<SnapshotData> = {}): Input {
  return {
    type: "frame",
    frame: { type: "snapshot", data: { ...BASE_SNAPSHOT, ...over } },
  };
}

function eventFrame(rec: DispatchRecord): Input {
  return { type: "frame", frame: { type: "event", data: rec } };
}

function ackFrame(data: {
  ok: boolean;
  kind?: string;
  nonce?: string;
  error?: string;
}): Input {
  return { type: "frame", frame: { type: "ack", data: { t: 0, ...data } } };
}

function intentAt(intent: Intent, nowMs = 0): Input {
  return { type: "intent", intent, nowMs };
}

function message(seq: number, t: number, id: number, rule: number): DispatchRecord {
  return {
    seq,
    tick: seq,
    t,
    action: { type: "message", kind: "voice", id, rule, src: "rule" },
  };
}

function connected(): ConsoleState {
  return reduce(initialState("s"), { type: "socket", status: "connected" }).state;
}

function live(): ConsoleState {
  return reduce(connected(), snapFrame()).state;
}

describe("snapshot hydration", () => {
  it("maps the frame onto the console state", () => {
    const s = live();
    expect(s.mode).toBe("automated");
    expect(s.activeEndpoints).toBe(22);
    expect(s.locked).toBe(false);
    expect(s.pose).toEqual({ x: 4.8, y: 2.8, facing: 48.0 });
    expect(s.values["temperature"]).toBe(21.0);
    expect(s.messageIds["voice"]).toHaveLength(20);
    expect(s.messageIds["image"]).toHaveLength(10);
  });

  it("keeps the marker hidden until a position arrives", () => {
    const s = reduce(connected(), snapFrame({ pose: null })).state;
    expect(s.pose).toBeNull();
  });

  it("never moves the marker backwards in time", () => {
    let s = live();
    s = reduce(s, snapFrame({ t: 6000, pose: [5.0, 3.0, 50.0] })).state;
    s = reduce(s, snapFrame({ t: 5500, pose: [1.0, 1.0, 0.0] })).state;
    expect(s.pose).toEqual({ x: 5.0, y: 3.0, facing: 50.0 });
    expect(s.snapshotT).toBe(6000);
  });

  it("accepts an older clock again after a reconnect", () => {
    let s = live();
    s = reduce(s, snapFrame({ t: 60000 })).state;
    s = reduce(s, { type: "socket", status: "disconnected" }).state;
    s = reduce(s, { type: "socket", status: "connected" }).state;
    // the service restarted; its clock starts over
    s = reduce(s, snapFrame({ t: 500, pose: [0.5, 0.5, 0.0] })).state;
    expect(s.snapshotT).toBe(500);
    expect(s.pose).toEqual({ x: 0.5, y: 0.5, facing: 0.0 });
  });

  it("flags stale sensors", () => {
    const s = reduce(
      connected(),
      snapFrame({ stale: ["temperature"], ages_s: { temperature: 42.0 } }),
    ).state;
    expect(s.stale).toContain("temperature");
  });
});

describe("dispatch feed", () => {
  it("appends events in dispatch-log order", () => {
    let s = live();
    s = reduce(s, eventFrame(message(1, 500, 6, 19))).state;
    s = reduce(s, eventFrame(message(2, 5000, 3, 1))).state;
    expect(s.feed.map((r) => r.seq)).toEqual([1, 2]);
  });

  it("merges the snapshot feed with later events without duplicates", () => {
    let s = connected();
    s = reduce(
      s,
      snapFrame({ feed: [message(1, 500, 6, 19), message(2, 5000, 3, 1)] }),
    ).state;
    // the bridge may relay an event the snapshot already contained
    s = reduce(s, eventFrame(message(2, 5000, 3, 1))).state;
    s = reduce(s, eventFrame(message(3, 5000, 3, 1))).state;
    // per-tick snapshots repeat the tail of the feed as well
    s = reduce(
      s,
      snapFrame({ t: 5500, feed: [message(2, 5000, 3, 1), message(3, 5000, 3, 1)] }),
    ).state;
    expect(s.feed.map((r) => r.seq)).toEqual([1, 2, 3]);
  });

  it("caps the feed length", () => {
    let s = live();
    for (let i = 1; i <= FEED_LIMIT + 25; i++) {
      s = reduce(s, eventFrame(message(i, i * 500, 1, 1))).state;
    }
    expect(s.feed).toHaveLength(FEED_LIMIT);
    expect(s.feed[0]!.seq).toBe(26);
    expect(s.feed[s.feed.length - 1]!.seq).toBe(FEED_LIMIT + 25);
  });

  it("keeps caregiver provenance on composed reminders", () => {
    const rec: DispatchRecord = {
      seq: 1,
      tick: 2,
      t: 1000,
      action: { type: "message", kind: "voice", id: 1, rule: 0, src: "caregiver" },
    };
    const s = reduce(live(), eventFrame(rec)).state;
    expect(s.feed[0]!.action).toMatchObject({ src: "caregiver" });
  });
});

describe("event side effects", () => {
  it("mode records flip the badge and endpoint count", () => {
    const rec: DispatchRecord = {
      seq: 1,
      tick: 40,
      t: 20000,
      action: { type: "mode", to: "semi", cause: "game_score high" },
      payload: { active: 14 },
    };
    const s = reduce(live(), eventFrame(rec)).state;
    expect(s.mode).toBe("semi");
    expect(s.activeEndpoints).toBe(14);
  });

  it("the door tile follows the door-relay echo", () => {
    const on: DispatchRecord = {
      seq: 1,
      tick: 1,
      t: 500,
      action: { type: "actuator", id: "door-relay", state: "on", rule: 0, src: "caregiver" },
    };
    const off: DispatchRecord = {
      seq: 2,
      tick: 2,
      t: 1000,
      action: { type: "actuator", id: "door-relay", state: "off", rule: 0, src: "caregiver" },
    };
    let s = reduce(live(), eventFrame(on)).state;
    expect(s.locked).toBe(true);
    s = reduce(s, eventFrame(off)).state;
    expect(s.locked).toBe(false);
  });

  it("other actuators land in the actuator map", () => {
    const rec: DispatchRecord = {
      seq: 1,
      tick: 80,
      t: 40000,
      action: { type: "actuator", id: "relay", state: "on", rule: 7, src: "rule" },
    };
    const s = reduce(live(), eventFrame(rec)).state;
    expect(s.actuators["relay"]).toBe("on");
    expect(s.locked).toBe(false);
  });
});

describe("commands and acks", () => {
  it("a reminder intent emits one command frame and a pending row", () => {
    const step = reduce(
      live(),
      intentAt({ kind: "reminder", message: "voice", id: 1 }, 1000),
    );
    expect(step.send).toHaveLength(1);
    const frame = step.send[0]!;
    expect(frame).toMatchObject({
      type: "command",
      kind: "reminder",
      payload: { kind: "voice", id: 1, nonce: "s-1" },
      nonce: "s-1",
    });
    expect(step.state.pending["s-1"]).toMatchObject({ status: "pending" });
  });

  it("a matching ok ack clears the pending row", () => {
    const step = reduce(
      live(),
      intentAt({ kind: "reminder", message: "voice", id: 1 }, 1000),
    );
    const s = reduce(step.state, ackFrame({ ok: true, kind: "reminder", nonce: "s-1" }))
      .state;
    expect(s.pending).toEqual({});
  });

  it("a nack keeps the row with the diagnostic", () => {
    const step = reduce(
      live(),
      intentAt({ kind: "reminder", message: "voice", id: 99 }, 1000),
    );
    const s = reduce(
      step.state,
      ackFrame({ ok: false, kind: "reminder", nonce: "s-1", error: "no such id" }),
    ).state;
    expect(s.pending["s-1"]).toMatchObject({ status: "error", error: "no such id" });
  });

  it("acks for unknown nonces do not disturb anything", () => {
    const before = live();
    const after = reduce(before, ackFrame({ ok: true, nonce: "other-7" })).state;
    expect(after).toEqual(before);
  });

  it("an unsolicited rejection surfaces as a notice", () => {
    const s = reduce(live(), ackFrame({ ok: false, error: "bad frame" })).state;
    expect(s.notice).toBe("bad frame");
  });

  it("nonces count up per session", () => {
    let step = reduce(live(), intentAt({ kind: "lock" }, 0));
    step = reduce(step.state, intentAt({ kind: "lock" }, 1));
    expect(step.send[0]!.nonce).toBe("s-2");
  });

  it("pending rows time out and can be dismissed", () => {
    let s = reduce(live(), intentAt({ kind: "lock" }, 1000)).state;
    s = reduce(s, { type: "clock", nowMs: 1000 + PENDING_TIMEOUT_MS }).state;
    expect(s.pending["s-1"]).toMatchObject({ status: "timeout" });
    s = reduce(s, intentAt({ kind: "dismiss", nonce: "s-1" })).state;
    expect(s.pending).toEqual({});
  });

  it("a disconnect marks in-flight commands as lost", () => {
    let s = reduce(live(), intentAt({ kind: "lock" }, 1000)).state;
    s = reduce(s, { type: "socket", status: "disconnected" }).state;
    expect(s.pending["s-1"]).toMatchObject({
      status: "timeout",
      error: "connection lost",
    });
  });
});

describe("disconnected guard", () => {
  it("no intent sends anything while the bridge is down", () => {
    const base = reduce(live(), { type: "socket", status: "disconnected" }).state;
    const intents: Intent[] = [
      { kind: "reminder", message: "voice", id: 1 },
      { kind: "lock" },
      { kind: "unlock" },
      { kind: "zone_del", name: "a" },
      { kind: "override", mode: "semi" },
      { kind: "med_schedule", time: "08:00", voice: 1 },
      { kind: "zone_add", zone: { name: "a", shape: "disc", x: 1, y: 1, r: 1 } },
      { kind: "confirm" },
    ];
    for (const intent of intents) {
      const step = reduce(base, intentAt(intent, 0));
      expect(step.send).toEqual([]);
      expect(step.state.pending).toEqual({});
      expect(step.state.confirm).toBeNull();
    }
  });
});

describe("confirm step for destructive actions", () => {
  it("unlock arms a confirmation instead of sending", () => {
    const step = reduce(live(), intentAt({ kind: "unlock" }, 0));
    expect(step.send).toEqual([]);
    expect(step.state.confirm?.label).toBe("unlock door");
  });

  it("confirm releases the armed command", () => {
    let step = reduce(live(), intentAt({ kind: "unlock" }, 0));
    step = reduce(step.state, intentAt({ kind: "confirm" }, 100));
    expect(step.send).toHaveLength(1);
    expect(step.send[0]!).toMatchObject({ kind: "unlock" });
    expect(step.state.confirm).toBeNull();
  });

  it("cancel disarms without sending", () => {
    let step = reduce(live(), intentAt({ kind: "zone_del", name: "patio" }, 0));
    expect(step.state.confirm?.label).toBe("delete zone patio");
    step = reduce(step.state, intentAt({ kind: "cancel" }, 50));
    expect(step.state.confirm).toBeNull();
    step = reduce(step.state, intentAt({ kind: "confirm" }, 60));
    expect(step.send).toEqual([]);
  });

  it("zone deletion goes out only after confirm", () => {
    let step = reduce(live(), intentAt({ kind: "zone_del", name: "patio" }, 0));
    step = reduce(step.state, intentAt({ kind: "confirm" }, 10));
    expect(step.send[0]!).toMatchObject({
      kind: "zone_del",
      payload: { name: "patio", nonce: "s-1" },
    });
  });
});

describe("zone and schedule payloads", () => {
  it("disc zones carry center and radius", () => {
    const step = reduce(
      live(),
      intentAt(
        { kind: "zone_add", zone: { name: "fireplace", shape: "disc", x: 2.5, y: 1.0, r: 1.2 } },
        0,
      ),
    );
    expect(step.send[0]!.payload).toEqual({
      name: "fireplace",
      shape: "disc",
      x: 2.5,
      y: 1.0,
      r: 1.2,
      nonce: "s-1",
    });
  });

  it("polygon zones carry their vertex list", () => {
    const points: [number, number][] = [
      [0, 0],
      [2, 0],
      [2, 2],
    ];
    const step = reduce(
      live(),
      intentAt({ kind: "zone_add", zone: { name: "patio", shape: "polygon", points } }, 0),
    );
    expect(step.send[0]!.payload).toMatchObject({ shape: "polygon", points });
  });

  it("medication schedules include the optional image id only when set", () => {
    const bare = reduce(
      live(),
      intentAt({ kind: "med_schedule", time: "08:00", voice: 1 }, 0),
    );
    expect(bare.send[0]!.payload).toEqual({ time: "08:00", voice: 1, nonce: "s-1" });
    const full = reduce(
      live(),
      intentAt({ kind: "med_schedule", time: "20:30", voice: 1, image: 1 }, 0),
    );
    expect(full.send[0]!.payload).toMatchObject({ time: "20:30", voice: 1, image: 1 });
  });

  it("mode override posts the requested mode", () => {
    const step = reduce(live(), intentAt({ kind: "override", mode: "auto" }, 0));
    expect(step.send[0]!).toMatchObject({ kind: "override", payload: { mode: "auto" } });
  });
});

describe("replay determinism", () => {
  function recordedStream(): Input[] {
    return [
      { type: "socket", status: "connected" },
      snapFrame(),
      eventFrame(message(1, 500, 6, 19)),
      intentAt({ kind: "reminder", message: "voice", id: 1 }, 700),
      eventFrame({
        seq: 2,
        tick: 2,
        t: 1000,
        action: { type: "message", kind: "voice", id: 1, rule: 0, src: "caregiver" },
      }),
      ackFrame({ ok: true, kind: "reminder", nonce: "s-1" }),
      snapFrame({ t: 6000, pose: [5.0, 2.9, 50.0] }),
      { type: "clock", nowMs: 9000 },
      { type: "socket", status: "disconnected" },
      { type: "socket", status: "connected" },
      snapFrame({ t: 6500 }),
    ];
  }

  it("the same stream always produces the same view", () => {
    const a = replay(initialState("s"), recordedStream());
    const b = replay(initialState("s"), recordedStream());
    expect(a).toEqual(b);
  });

  it("the view is a fold over inputs, not wall-clock dependent", () => {
    const stream = recordedStream();
    const all = replay(initialState("s"), stream);
    // replaying step by step through reduce gives the identical state
    let s = initialState("s");
    for (const input of stream) s = reduce(s, input).state;
    expect(s).toEqual(all);
  });
});
