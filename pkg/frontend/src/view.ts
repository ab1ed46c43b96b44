// DOM view layer. All state lives in the reducer; this module only
// renders ConsoleState and turns gestures into Intent dispatches. The
// zone draft is form input, so it stays here, not in the reducer.

import { feedLine, sensorTiles } from "./format.js";
import { drawPlan, Transform } from "./plan.js";
import { ConsoleState, Intent, ZoneDraft } from "./state.js";
import { provenance } from "./protocol.js";

export type Dispatch = (intent: Intent) => void;

interface Refs {
  banner: HTMLElement;
  mode: HTMLElement;
  endpoints: HTMLElement;
  door: HTMLElement;
  worn: HTMLElement;
  canvas: HTMLCanvasElement;
  tiles: HTMLElement;
  feed: HTMLElement;
  pending: HTMLElement;
  confirmBar: HTMLElement;
  confirmLabel: HTMLElement;
  notice: HTMLElement;
  controls: HTMLFieldSetElement;
  reminderKind: HTMLSelectElement;
  reminderId: HTMLSelectElement;
  zoneName: HTMLInputElement;
  zoneShape: HTMLSelectElement;
  zoneRadius: HTMLInputElement;
  zoneHint: HTMLElement;
  zoneDelName: HTMLSelectElement;
  medTime: HTMLInputElement;
  medVoice: HTMLSelectElement;
  medImage: HTMLSelectElement;
}

export class ConsoleView {
  private refs: Refs;
  private draft: ZoneDraft | null = null;
  private transform: Transform | null = null;
  private lastState: ConsoleState | null = null;

  constructor(
    root: HTMLElement,
    private readonly dispatch: Dispatch,
  ) {
    root.innerHTML = PAGE;
    this.refs = collectRefs(root);
    this.wire();
  }

  render(state: ConsoleState): void {
    this.lastState = state;
    const r = this.refs;
    r.banner.textContent = state.connected ? "live" : "disconnected, retrying";
    r.banner.className = state.connected ? "banner live" : "banner down";
    r.mode.textContent = state.mode ?? "?";
    r.endpoints.textContent =
      state.activeEndpoints === null ? "" : `${state.activeEndpoints} endpoints`;
    r.door.textContent =
      state.locked === null ? "door ?" : state.locked ? "door locked" : "door unlocked";
    r.door.className = state.locked ? "tile locked" : "tile";
    r.worn.textContent =
      state.worn === null ? "band ?" : state.worn ? "band worn" : "band off";
    r.controls.disabled = !state.connected;
    r.notice.textContent = state.notice ?? "";

    this.renderTiles(state);
    this.renderFeed(state);
    this.renderPending(state);
    this.renderConfirm(state);
    this.refreshOptions(state);
    this.redraw(state);
  }

  private redraw(state: ConsoleState): void {
    const canvas = this.refs.canvas;
    const ctx = canvas.getContext("2d");
    if (!ctx) return;
    this.transform = drawPlan(ctx, state, this.draft, canvas.width, canvas.height);
  }

  private renderTiles(state: ConsoleState): void {
    const parts: string[] = [];
    for (const tile of sensorTiles(state)) {
      const cls = tile.stale ? "tile stale" : "tile";
      const age = tile.age ? `<span class="age">${tile.age}</span>` : "";
      parts.push(
        `<div class="${cls}"><span class="k">${tile.key}</span>` +
          `<span class="v">${tile.text}</span>${age}</div>`,
      );
    }
    this.refs.tiles.innerHTML = parts.join("");
  }

  private renderFeed(state: ConsoleState): void {
    // dispatch-log order, newest at the bottom
    const parts = state.feed.map((rec) => {
      const who = provenance(rec.action);
      const cls = who === "caregiver" ? "row caregiver" : "row";
      const t = (rec.t / 1000).toFixed(1);
      return `<div class="${cls}"><span class="seq">#${rec.seq}</span>` +
        `<span class="t">${t}s</span> ${feedLine(rec)}</div>`;
    });
    const el = this.refs.feed;
    const pinned = el.scrollHeight - el.scrollTop - el.clientHeight < 8;
    el.innerHTML = parts.join("");
    if (pinned) el.scrollTop = el.scrollHeight;
  }

  private renderPending(state: ConsoleState): void {
    const rows = Object.values(state.pending).map((cmd) => {
      const note =
        cmd.status === "pending" ? "…" : `${cmd.status}: ${cmd.error ?? ""}`;
      const retry =
        cmd.status === "pending"
          ? ""
          : `<button data-dismiss="${cmd.nonce}">dismiss</button>`;
      return `<div class="row ${cmd.status}">${cmd.label} - ${note} ${retry}</div>`;
    });
    this.refs.pending.innerHTML = rows.join("");
    for (const btn of this.refs.pending.querySelectorAll("button[data-dismiss]")) {
      btn.addEventListener("click", () =>
        this.dispatch({ kind: "dismiss", nonce: (btn as HTMLElement).dataset.dismiss! }),
      );
    }
  }

  private renderConfirm(state: ConsoleState): void {
    this.refs.confirmBar.style.display = state.confirm ? "flex" : "none";
    this.refs.confirmLabel.textContent = state.confirm
      ? `Really ${state.confirm.label}?`
      : "";
  }

  /** Composer and zone-delete options follow the live snapshot. */
  private refreshOptions(state: ConsoleState): void {
    const kind = this.refs.reminderKind.value || "voice";
    const ids = state.messageIds[kind] ?? [];
    syncOptions(this.refs.reminderId, ids.map(String));
    syncOptions(this.refs.medVoice, (state.messageIds["voice"] ?? []).map(String));
    syncOptions(
      this.refs.medImage,
      ["", ...(state.messageIds["image"] ?? []).map(String)],
    );
    syncOptions(this.refs.zoneDelName, state.zones.map((z) => z.name));
  }

  private wire(): void {
    const r = this.refs;
    byId<HTMLButtonElement>("send-reminder").addEventListener("click", () => {
      const message = r.reminderKind.value as "voice" | "image" | "text";
      const id = parseInt(r.reminderId.value, 10);
      if (Number.isFinite(id)) this.dispatch({ kind: "reminder", message, id });
    });
    r.reminderKind.addEventListener("change", () => {
      if (this.lastState) this.refreshOptions(this.lastState);
    });
    byId<HTMLButtonElement>("lock").addEventListener("click", () =>
      this.dispatch({ kind: "lock" }),
    );
    byId<HTMLButtonElement>("unlock").addEventListener("click", () =>
      this.dispatch({ kind: "unlock" }),
    );
    byId<HTMLButtonElement>("confirm-yes").addEventListener("click", () =>
      this.dispatch({ kind: "confirm" }),
    );
    byId<HTMLButtonElement>("confirm-no").addEventListener("click", () =>
      this.dispatch({ kind: "cancel" }),
    );
    byId<HTMLButtonElement>("med-send").addEventListener("click", () => {
      const voice = parseInt(r.medVoice.value, 10);
      const image = r.medImage.value ? parseInt(r.medImage.value, 10) : undefined;
      if (r.medTime.value && Number.isFinite(voice)) {
        this.dispatch({
          kind: "med_schedule",
          time: r.medTime.value,
          voice,
          ...(image !== undefined ? { image } : {}),
        });
      }
    });
    for (const mode of ["automated", "semi", "auto"] as const) {
      byId<HTMLButtonElement>(`override-${mode}`).addEventListener("click", () =>
        this.dispatch({ kind: "override", mode }),
      );
    }
    byId<HTMLButtonElement>("zone-add").addEventListener("click", () => {
      if (this.draft && this.draft.name) {
        this.dispatch({ kind: "zone_add", zone: this.draft });
        this.draft = null;
        if (this.lastState) this.redraw(this.lastState);
      }
    });
    byId<HTMLButtonElement>("zone-clear").addEventListener("click", () => {
      this.draft = null;
      if (this.lastState) this.redraw(this.lastState);
    });
    byId<HTMLButtonElement>("zone-del").addEventListener("click", () => {
      const name = r.zoneDelName.value;
      if (name) this.dispatch({ kind: "zone_del", name });
    });
    r.zoneName.addEventListener("input", () => {
      if (this.draft) {
        this.draft = { ...this.draft, name: r.zoneName.value };
        if (this.lastState) this.redraw(this.lastState);
      }
    });
    r.zoneRadius.addEventListener("input", () => {
      if (this.draft?.shape === "disc") {
        this.draft = { ...this.draft, r: parseFloat(r.zoneRadius.value) || 0.5 };
        if (this.lastState) this.redraw(this.lastState);
      }
    });
    r.canvas.addEventListener("click", (ev) => this.onPlanClick(ev));
  }

  private onPlanClick(ev: MouseEvent): void {
    if (!this.transform || !this.lastState?.connected) return;
    const rect = this.refs.canvas.getBoundingClientRect();
    const sx = this.refs.canvas.width / rect.width;
    const sy = this.refs.canvas.height / rect.height;
    const [wx, wy] = this.transform.toWorld(
      (ev.clientX - rect.left) * sx,
      (ev.clientY - rect.top) * sy,
    );
    const x = Math.round(wx * 10) / 10; // snap to the dm grid
    const y = Math.round(wy * 10) / 10;
    const name = this.refs.zoneName.value;
    if (this.refs.zoneShape.value === "disc") {
      const radius = parseFloat(this.refs.zoneRadius.value) || 0.5;
      this.draft = { name, shape: "disc", x, y, r: radius };
      this.refs.zoneHint.textContent = `disc at (${x}, ${y})`;
    } else {
      const points =
        this.draft?.shape === "polygon" ? [...this.draft.points] : [];
      points.push([x, y]);
      this.draft = { name, shape: "polygon", points };
      this.refs.zoneHint.textContent = `${points.length} vertices`;
    }
    if (this.lastState) this.redraw(this.lastState);
  }
}

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

function collectRefs(root: HTMLElement): Refs {
  return {
    banner: byId("banner"),
    mode: byId("mode"),
    endpoints: byId("endpoints"),
    door: byId("door"),
    worn: byId("worn"),
    canvas: byId<HTMLCanvasElement>("plan"),
    tiles: byId("tiles"),
    feed: byId("feed"),
    pending: byId("pending"),
    confirmBar: byId("confirm-bar"),
    confirmLabel: byId("confirm-label"),
    notice: byId("notice"),
    controls: byId<HTMLFieldSetElement>("controls"),
    reminderKind: byId<HTMLSelectElement>("reminder-kind"),
    reminderId: byId<HTMLSelectElement>("reminder-id"),
    zoneName: byId<HTMLInputElement>("zone-name"),
    zoneShape: byId<HTMLSelectElement>("zone-shape"),
    zoneRadius: byId<HTMLInputElement>("zone-radius"),
    zoneHint: byId("zone-hint"),
    zoneDelName: byId<HTMLSelectElement>("zone-del-name"),
    medTime: byId<HTMLInputElement>("med-time"),
    medVoice: byId<HTMLSelectElement>("med-voice"),
    medImage: byId<HTMLSelectElement>("med-image"),
  };
}

function syncOptions(select: HTMLSelectElement, values: string[]): void {
  const current = [...select.options].map((o) => o.value);
  if (current.length === values.length && current.every((v, i) => v === values[i])) {
    return; // unchanged; keep the user's selection
  }
  const keep = select.value;
  select.innerHTML = values
    .map((v) => `<option value="${v}">${v || "(none)"}</option>`)
    .join("");
  if (values.includes(keep)) select.value = keep;
}

const PAGE = `
<header>
  <h1>Caregiver console</h1>
  <span id="banner" class="banner down">connecting</span>
  <span id="mode" class="badge"></span>
  <span id="endpoints" class="badge"></span>
  <span id="door" class="tile"></span>
  <span id="worn" class="badge"></span>
</header>
<div id="confirm-bar" class="confirm" style="display:none">
  <span id="confirm-label"></span>
  <button id="confirm-yes">confirm</button>
  <button id="confirm-no">cancel</button>
</div>
<div id="notice" class="notice"></div>
<main>
  <section class="left">
    <canvas id="plan" width="760" height="520"></canvas>
    <fieldset id="zone-editor">
      <legend>danger zones</legend>
      <label>name <input id="zone-name" maxlength="40" placeholder="fireplace"></label>
      <label>shape
        <select id="zone-shape">
          <option value="disc">disc</option>
          <option value="polygon">polygon</option>
        </select>
      </label>
      <label>radius m <input id="zone-radius" type="number" value="1.0" step="0.1" min="0.1"></label>
      <span id="zone-hint" class="hint">click the plan to place</span>
      <button id="zone-add">add zone</button>
      <button id="zone-clear">clear draft</button>
      <label>remove <select id="zone-del-name"></select></label>
      <button id="zone-del">delete</button>
    </fieldset>
  </section>
  <section class="right">
    <fieldset id="controls">
      <legend>steering</legend>
      <div class="group">
        <label>reminder
          <select id="reminder-kind">
            <option value="voice">voice</option>
            <option value="image">image</option>
            <option value="text">text</option>
          </select>
          <select id="reminder-id"></select>
        </label>
        <button id="send-reminder">send</button>
      </div>
      <div class="group">
        <button id="lock">lock door</button>
        <button id="unlock">unlock door</button>
      </div>
      <div class="group">
        <label>medication <input id="med-time" type="time" value="08:00"></label>
        <label>voice <select id="med-voice"></select></label>
        <label>image <select id="med-image"></select></label>
        <button id="med-send">schedule</button>
      </div>
      <div class="group">
        mode:
        <button id="override-automated">automated</button>
        <button id="override-semi">semi</button>
        <button id="override-auto">release</button>
      </div>
    </fieldset>
    <div id="pending" class="pendinglist"></div>
    <h2>sensors</h2>
    <div id="tiles" class="tiles"></div>
    <h2>dispatch feed</h2>
    <div id="feed" class="feed"></div>
  </section>
</main>
`;
