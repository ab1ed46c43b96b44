// Entry point: one socket, one reducer loop, one view.

import { BridgeSocket } from "./client.js";
import { parseServerFrame } from "./protocol.js";
import { ConsoleState, initialState, Input, reduce } from "./state.js";
import { ConsoleView } from "./view.js";

function bridgeUrl(): string {
  const params = new URLSearchParams(location.search);
  const fromQuery = params.get("ws");
  if (fromQuery) return fromQuery;
  const host = location.hostname || "127.0.0.1";
  return `ws://${host}:8765`;
}

function main(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app");

  let state: ConsoleState = initialState(
    Math.random().toString(36).slice(2, 10),
  );

  const socket = new BridgeSocket(bridgeUrl(), {
    onOpen: () => dispatch({ type: "socket", status: "connected" }),
    onClose: () => dispatch({ type: "socket", status: "disconnected" }),
    onMessage: (raw) => {
      const frame = parseServerFrame(raw);
      if (frame) dispatch({ type: "frame", frame });
    },
  });

  const view = new ConsoleView(root, (intent) =>
    dispatch({ type: "intent", intent, nowMs: Date.now() }),
  );

  function dispatch(input: Input): void {
    const step = reduce(state, input);
    state = step.state;
    for (const frame of step.send) socket.send(JSON.stringify(frame));
    view.render(state);
  }

  setInterval(() => dispatch({ type: "clock", nowMs: Date.now() }), 1000);
  view.render(state);
  socket.start();
}

main();
