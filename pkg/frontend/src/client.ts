// Reconnecting WebSocket wrapper around the bridge endpoint.

export interface SocketHooks {
  onOpen(): void;
  onClose(): void;
  onMessage(raw: string): void;
}

const BACKOFF_MS = [500, 1000, 2000, 5000, 10000];

export class BridgeSocket {
  private ws: WebSocket | null = null;
  private attempt = 0;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private stopped = false;

  constructor(
    readonly url: string,
    private readonly hooks: SocketHooks,
  ) {}

  start(): void {
    this.stopped = false;
    this.connect();
  }

  stop(): void {
    this.stopped = true;
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = null;
    this.ws?.close();
    this.ws = null;
  }

  /** Send one frame; false when the socket is not open. */
  send(text: string): boolean {
    if (this.ws === null || this.ws.readyState !== WebSocket.OPEN) return false;
    this.ws.send(text);
    return true;
  }

  private connect(): void {
    if (this.stopped) return;
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.attempt = 0;
      this.hooks.onOpen();
    };
    ws.onmessage = (ev) => {
      if (typeof ev.data === "string") this.hooks.onMessage(ev.data);
    };
    ws.onclose = () => {
      if (this.ws !== ws) return; // superseded by a newer connection
      this.ws = null;
      this.hooks.onClose();
      this.scheduleReconnect();
    };
    ws.onerror = () => {
      // onclose follows; nothing to do here
    };
  }

  private scheduleReconnect(): void {
    if (this.stopped) return;
    const delay = BACKOFF_MS[Math.min(this.attempt, BACKOFF_MS.length - 1)]!;
    this.attempt += 1;
    this.timer = setTimeout(() => this.connect(), delay);
  }
}
