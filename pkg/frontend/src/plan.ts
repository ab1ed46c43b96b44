// Floor-plan rendering: meters on the axes, a fine decimeter grid under a
// bolder meter grid so operators never misread the mixed units.

import { ConsoleState, Pose, ZoneDraft } from "./state.js";
import { SmartObject, ZoneShape } from "./protocol.js";

export interface Bounds {
  minX: number;
  minY: number;
  maxX: number;
  maxY: number;
}

const PAD_M = 1.0;
// a disc zone alarms out to its radius plus this service-side margin
export const ZONE_MARGIN_M = 0.5;

export function worldBounds(state: ConsoleState): Bounds {
  let minX = 0;
  let minY = 0;
  let maxX = 8;
  let maxY = 5;
  const grow = (x: number, y: number) => {
    minX = Math.min(minX, x);
    minY = Math.min(minY, y);
    maxX = Math.max(maxX, x);
    maxY = Math.max(maxY, y);
  };
  for (const o of state.objects) grow(o.x, o.y);
  for (const z of state.zones) {
    if (z.shape === "disc") {
      grow(z.x - z.r, z.y - z.r);
      grow(z.x + z.r, z.y + z.r);
    } else {
      for (const [x, y] of z.points) grow(x, y);
    }
  }
  if (state.pose) grow(state.pose.x, state.pose.y);
  return {
    minX: minX - PAD_M,
    minY: minY - PAD_M,
    maxX: maxX + PAD_M,
    maxY: maxY + PAD_M,
  };
}

export interface Transform {
  scale: number; // px per meter
  toPx(x: number, y: number): [number, number];
  toWorld(px: number, py: number): [number, number];
}

export function makeTransform(b: Bounds, width: number, height: number): Transform {
  const scale = Math.min(
    width / (b.maxX - b.minX),
    height / (b.maxY - b.minY),
  );
  const offX = (width - (b.maxX - b.minX) * scale) / 2;
  const offY = (height - (b.maxY - b.minY) * scale) / 2;
  return {
    scale,
    // canvas y grows downward, world y grows upward
    toPx: (x, y) => [
      offX + (x - b.minX) * scale,
      height - offY - (y - b.minY) * scale,
    ],
    toWorld: (px, py) => [
      b.minX + (px - offX) / scale,
      b.minY + (height - offY - py) / scale,
    ],
  };
}

export function drawPlan(
  ctx: CanvasRenderingContext2D,
  state: ConsoleState,
  draft: ZoneDraft | null,
  width: number,
  height: number,
): Transform {
  const bounds = worldBounds(state);
  const tf = makeTransform(bounds, width, height);
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#fafafa";
  ctx.fillRect(0, 0, width, height);
  drawGrid(ctx, bounds, tf, width, height);
  for (const zone of state.zones) drawZone(ctx, tf, zone, false);
  if (draft) drawZone(ctx, tf, draft as ZoneShape, true);
  for (const obj of state.objects) drawObject(ctx, tf, obj);
  if (state.pose) {
    drawMarker(ctx, tf, state.pose);
  } else {
    ctx.fillStyle = "#888";
    ctx.font = "14px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText("awaiting position data", width / 2, height / 2);
  }
  return tf;
}

function drawGrid(
  ctx: CanvasRenderingContext2D,
  b: Bounds,
  tf: Transform,
  width: number,
  height: number,
): void {
  // dm lines only once they are at least a few px apart
  if (tf.scale * 0.1 >= 4) {
    ctx.strokeStyle = "#eee";
    ctx.lineWidth = 1;
    gridLines(ctx, b, tf, 0.1);
  }
  ctx.strokeStyle = "#ccc";
  ctx.lineWidth = 1;
  gridLines(ctx, b, tf, 1.0);
  ctx.fillStyle = "#999";
  ctx.font = "10px sans-serif";
  ctx.textAlign = "left";
  for (let x = Math.ceil(b.minX); x <= b.maxX; x += 1) {
    const [px] = tf.toPx(x, b.minY);
    ctx.fillText(`${x} m`, px + 2, height - 4);
  }
  for (let y = Math.ceil(b.minY); y <= b.maxY; y += 1) {
    const [, py] = tf.toPx(b.minX, y);
    ctx.fillText(`${y} m`, 2, py - 2);
  }
}

function gridLines(
  ctx: CanvasRenderingContext2D,
  b: Bounds,
  tf: Transform,
  step: number,
): void {
  ctx.beginPath();
  for (let x = Math.ceil(b.minX / step) * step; x <= b.maxX; x += step) {
    const [px] = tf.toPx(x, 0);
    ctx.moveTo(px, 0);
    ctx.lineTo(px, ctx.canvas.height);
  }
  for (let y = Math.ceil(b.minY / step) * step; y <= b.maxY; y += step) {
    const [, py] = tf.toPx(0, y);
    ctx.moveTo(0, py);
    ctx.lineTo(ctx.canvas.width, py);
  }
  ctx.stroke();
}

function drawZone(
  ctx: CanvasRenderingContext2D,
  tf: Transform,
  zone: ZoneShape | ZoneDraft,
  isDraft: boolean,
): void {
  ctx.strokeStyle = isDraft ? "#2a7" : "#d33";
  ctx.fillStyle = isDraft ? "rgba(34,170,119,0.08)" : "rgba(221,51,51,0.08)";
  ctx.lineWidth = 2;
  if (zone.shape === "disc") {
    const [cx, cy] = tf.toPx(zone.x, zone.y);
    ctx.beginPath();
    ctx.arc(cx, cy, zone.r * tf.scale, 0, Math.PI * 2);
    ctx.fill();
    ctx.stroke();
    // dashed ring where the service's alarm margin actually ends
    ctx.setLineDash([4, 4]);
    ctx.beginPath();
    ctx.arc(cx, cy, (zone.r + ZONE_MARGIN_M) * tf.scale, 0, Math.PI * 2);
    ctx.stroke();
    ctx.setLineDash([]);
  } else if (zone.points.length >= 2) {
    ctx.beginPath();
    const first = zone.points[0]!;
    ctx.moveTo(...tf.toPx(first[0], first[1]));
    for (const [x, y] of zone.points.slice(1)) ctx.lineTo(...tf.toPx(x, y));
    ctx.closePath();
    ctx.fill();
    ctx.stroke();
  }
  const label = zone.name || (isDraft ? "(new zone)" : "");
  if (label) {
    const anchor =
      zone.shape === "disc"
        ? tf.toPx(zone.x, zone.y + zone.r)
        : tf.toPx(zone.points[0]![0], zone.points[0]![1]);
    ctx.fillStyle = isDraft ? "#2a7" : "#d33";
    ctx.font = "11px sans-serif";
    ctx.textAlign = "center";
    ctx.fillText(label, anchor[0], anchor[1] - 4);
  }
}

function drawObject(
  ctx: CanvasRenderingContext2D,
  tf: Transform,
  obj: SmartObject,
): void {
  const [px, py] = tf.toPx(obj.x, obj.y);
  ctx.fillStyle = "#46a";
  ctx.beginPath();
  ctx.arc(px, py, 5, 0, Math.PI * 2);
  ctx.fill();
  ctx.font = "11px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(obj.name, px, py - 8);
}

function drawMarker(
  ctx: CanvasRenderingContext2D,
  tf: Transform,
  pose: Pose,
): void {
  const [px, py] = tf.toPx(pose.x, pose.y);
  const rad = (pose.facing * Math.PI) / 180; // facing 0 = +x, counterclockwise
  ctx.fillStyle = "#181";
  ctx.beginPath();
  const tip = 10;
  const base = 5;
  ctx.moveTo(px + tip * Math.cos(rad), py - tip * Math.sin(rad));
  ctx.lineTo(
    px + base * Math.cos(rad + (Math.PI * 2) / 3),
    py - base * Math.sin(rad + (Math.PI * 2) / 3),
  );
  ctx.lineTo(
    px + base * Math.cos(rad - (Math.PI * 2) / 3),
    py - base * Math.sin(rad - (Math.PI * 2) / 3),
  );
  ctx.closePath();
  ctx.fill();
  ctx.font = "11px sans-serif";
  ctx.textAlign = "center";
  ctx.fillText(
    `(${pose.x.toFixed(1)}, ${pose.y.toFixed(1)}) ${pose.facing.toFixed(0)}°`,
    px,
    py + 18,
  );
}
