import init, { wallpaperGroups, basisSummary, basisHeatmap, orbitDistanceField, orbitPoints } from "./pkg/crystal_basis_web.js";

const GRID = 96;
const $ = (id) => document.getElementById(id);
let groups = [];
let point = [0.3, 0.15];

// Rows are the cell vectors; hexagonal groups use a 120° cell.
function cellFor(symbol) {
  const g = groups.find((x) => x.symbol === symbol);
  return g && g.lattice.startsWith("h") ? [[1, 0], [-0.5, Math.sqrt(3) / 2]] : [[1, 0], [0, 1]];
}

// Cartesian p = x1 b1 + x2 b2, so x = B^{-T} p.
function toFractional(cell, px, py) {
  const [[a, b], [c, d]] = cell;
  const det = a * d - b * c;
  return [(d * px - c * py) / det, (-b * px + a * py) / det];
}

function diverging(t) {
  // t in [-1, 1]: blue, white, red
  const s = Math.min(1, Math.abs(t));
  const w = Math.round(255 * (1 - s));
  return t < 0 ? [w, w, 255] : [255, w, w];
}

function sequential(t) {
  const stops = [[68, 1, 84], [59, 82, 139], [33, 145, 140], [94, 201, 98], [253, 231, 37]];
  const u = Math.max(0, Math.min(0.9999, t)) * (stops.length - 1);
  const i = Math.floor(u), f = u - i;
  return stops[i].map((v, k) => Math.round(v + f * (stops[i + 1][k] - v)));
}

// Paints a periodic grid of values (row j = x2) in Cartesian coordinates.
function paintPeriodic(canvas, cell, values, color) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const img = ctx.createImageData(w, h);
  const span = 2.4;
  for (let y = 0; y < h; y++) {
    for (let x = 0; x < w; x++) {
      const px = ((x + 0.5) / w) * span - 0.6;
      const py = ((h - y - 0.5) / h) * span - 0.6;
      let [f1, f2] = toFractional(cell, px, py);
      f1 -= Math.floor(f1);
      f2 -= Math.floor(f2);
      const i = Math.min(GRID - 1, Math.floor(f1 * GRID));
      const j = Math.min(GRID - 1, Math.floor(f2 * GRID));
      const [r, g, b] = color(values[j * GRID + i]);
      const o = 4 * (y * w + x);
      img.data[o] = r; img.data[o + 1] = g; img.data[o + 2] = b; img.data[o + 3] = 255;
    }
  }
  ctx.putImageData(img, 0, 0);
  const toCanvas = (fx, fy) => {
    const px = fx * cell[0][0] + fy * cell[1][0];
    const py = fx * cell[0][1] + fy * cell[1][1];
    return [((px + 0.6) / span) * w, h - ((py + 0.6) / span) * h];
  };
  ctx.strokeStyle = "#000";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  [[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]].forEach(([a, b], k) => {
    const [cx, cy] = toCanvas(a, b);
    k ? ctx.lineTo(cx, cy) : ctx.moveTo(cx, cy);
  });
  ctx.stroke();
  return { toCanvas, span };
}

function status(msg) {
  $("status").textContent = msg || "";
}

function state() {
  return { group: $("group").value, radius: Number($("radius").value), index: Number($("index").value), part: Number($("part").value) };
}

function drawOrbits(summary, selected) {
  const rows = summary.orbits.map((o, k) =>
    `<tr class="${k === selected ? "sel" : ""}" data-k="${k}"><td>${k}</td><td>(${o.reference.join(",")})</td><td>${o.size}</td><td>${o.eigenvalue_factor}</td></tr>`);
  $("orbits").innerHTML = `<table><tr><th>#</th><th>ξ</th><th>|O|</th><th>|ξ|²</th></tr>${rows.join("")}</table>`;
  $("orbits").querySelectorAll("tr[data-k]").forEach((tr) =>
    tr.addEventListener("click", () => { $("index").value = tr.dataset.k; redrawBasis(); }));
}

function redrawBasis() {
  const s = state();
  try {
    const summary = JSON.parse(basisSummary(s.group, s.radius));
    const k = summary.orbits.length;
    $("index").max = k - 1;
    $("count").textContent = `of ${k}`;
    if (s.index >= k) { $("index").value = k - 1; s.index = k - 1; }
    const raw = basisHeatmap(s.group, s.radius, s.index, GRID);
    const vals = new Float64Array(GRID * GRID);
    let max = 1e-12;
    for (let n = 0; n < vals.length; n++) {
      vals[n] = raw[2 * n + s.part];
      max = Math.max(max, Math.abs(vals[n]));
    }
    paintPeriodic($("heat"), cellFor(s.group), vals, (v) => diverging(v / max));
    drawOrbits(summary, s.index);
    status();
  } catch (e) {
    status(String(e));
  }
}

function redrawDistance() {
  const s = state();
  try {
    const field = orbitDistanceField(s.group, point[0], point[1], GRID);
    let max = 1e-12;
    for (const d of field) max = Math.max(max, d);
    const cell = cellFor(s.group);
    const { toCanvas } = paintPeriodic($("dist"), cell, field, (d) => sequential(d / max));
    const ctx = $("dist").getContext("2d");
    const pts = orbitPoints(s.group, point[0], point[1]);
    for (let n = 0; n < pts.length; n += 2) {
      for (const [sx, sy] of [[0, 0], [1, 0], [0, 1], [1, 1], [-1, 0], [0, -1]]) {
        const [cx, cy] = toCanvas(pts[n] + sx, pts[n + 1] + sy);
        ctx.fillStyle = "#fff";
        ctx.beginPath();
        ctx.arc(cx, cy, 3, 0, 2 * Math.PI);
        ctx.fill();
      }
    }
  } catch (e) {
    status(String(e));
  }
}

function onDistanceClick(ev) {
  const c = $("dist");
  const r = c.getBoundingClientRect();
  const span = 2.4;
  const px = ((ev.clientX - r.left) / r.width) * span - 0.6;
  const py = ((r.bottom - ev.clientY) / r.height) * span - 0.6;
  const f = toFractional(cellFor(state().group), px, py);
  point = f.map((v) => v - Math.floor(v));
  redrawDistance();
}

async function main() {
  await init();
  groups = JSON.parse(wallpaperGroups());
  $("group").innerHTML = groups.map((g) => `<option value="${g.symbol}">${g.number} ${g.symbol}</option>`).join("");
  $("group").value = "pg";
  for (const id of ["group", "radius"]) $(id).addEventListener("change", () => { redrawBasis(); redrawDistance(); });
  for (const id of ["index", "part"]) $(id).addEventListener("input", redrawBasis);
  $("dist").addEventListener("click", onDistanceClick);
  redrawBasis();
  redrawDistance();
}

main().catch((e) => status(`failed to load the WebAssembly module: ${e}`));
