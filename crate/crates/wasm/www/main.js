// Built with: wasm-bindgen --target web --out-dir www/pkg <spp_wasm.wasm>
import init, { meshView, solve, sweep } from "./pkg/spp_wasm.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const fmt = (v) => (Number.isFinite(v) ? v.toExponential(3) : "---");

function params() {
  return [num("eps1"), num("eps2"), num("n"), num("tau"), num("p")];
}

function report(el, fn) {
  try {
    fn();
  } catch (e) {
    el.innerHTML = `<span class="err">${e.message ?? e}</span>`;
  }
}

// Plot series [{x, y, color, dots}] with optional log axes.
function plot(canvas, series, { logX = false, logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  const pad = 30;
  ctx.clearRect(0, 0, w, h);
  const tx = (v) => (logX ? Math.log10(v) : v);
  const ty = (v) => (logY ? Math.log10(v) : v);
  const xs = series.flatMap((s) => Array.from(s.x, tx)).filter(Number.isFinite);
  const ys = series.flatMap((s) => Array.from(s.y, ty)).filter(Number.isFinite);
  const [x0, x1] = [Math.min(...xs), Math.max(...xs)];
  let [y0, y1] = [Math.min(...ys), Math.max(...ys)];
  if (y0 === y1) { y0 -= 1; y1 += 1; }
  const px = (v) => pad + ((tx(v) - x0) / (x1 - x0 || 1)) * (w - 2 * pad);
  const py = (v) => h - pad - ((ty(v) - y0) / (y1 - y0)) * (h - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, w - 2 * pad, h - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.fillText(logY ? `1e${y1.toFixed(1)}` : y1.toPrecision(3), 2, pad);
  ctx.fillText(logY ? `1e${y0.toFixed(1)}` : y0.toPrecision(3), 2, h - pad);
  for (const s of series) {
    ctx.strokeStyle = ctx.fillStyle = s.color;
    ctx.beginPath();
    s.x.forEach((xv, i) => {
      const [a, b] = [px(xv), py(s.y[i])];
      i === 0 ? ctx.moveTo(a, b) : ctx.lineTo(a, b);
      if (s.dots) ctx.fillRect(a - 2, b - 2, 4, 4);
    });
    ctx.stroke();
  }
}

function showMesh() {
  report($("mesh-info"), () => {
    const m = meshView(...params());
    const x = m.nodes;
    const steps = Array.from(x.slice(1), (v, i) => v - x[i]);
    const idx = steps.map((_, i) => i);
    $("mesh-info").textContent =
      `μ₀ = ${fmt(m.mu0)}, μ₁ = ${fmt(m.mu1)}, σ₀ = ${fmt(m.sigma0)}, σ₁ = ${fmt(m.sigma1)}; ` +
      `left ${m.leftGraded ? "graded" : "uniform fallback"}, right ${m.rightGraded ? "graded" : "uniform fallback"}. ` +
      `Plot: step size h_i against i (log scale).`;
    plot($("mesh-canvas"), [{ x: idx, y: steps, color: "#1565c0", dots: true }], { logY: true });
  });
}

function showSolve() {
  report($("solve-info"), () => {
    const [e1, e2, n, tau, p] = params();
    const s = solve(e1, e2, n, tau, p, num("quad"));
    $("solve-info").textContent =
      `‖u − uᴺ‖_E = ${fmt(s.energyError)}, ‖uᴵ − uᴺ‖_E = ${fmt(s.supercloseError)}, ` +
      `Galerkin residual = ${fmt(s.galerkinResidual)}. Black: exact u, red: uᴺ.`;
    plot($("solve-canvas"), [
      { x: s.exactX, y: s.exactU, color: "#000" },
      { x: s.nodes, y: s.uh, color: "#c62828", dots: true },
    ]);
  });
}

function showSweep() {
  const table = $("sweep-table");
  report(table, () => {
    const [e1, e2, , tau, p] = params();
    const s = sweep(e1, e2, num("nmax"), tau, p, num("quad"));
    const rows = Array.from(s.n, (n, i) =>
      `<tr><td>${n}</td><td>${fmt(s.energyError[i])}</td><td>${s.energyRate[i].toFixed?.(2) ?? ""}</td>` +
      `<td>${fmt(s.supercloseError[i])}</td><td>${s.supercloseRate[i].toFixed?.(2) ?? ""}</td></tr>`);
    table.innerHTML =
      "<tr><th>N</th><th>‖u − uᴺ‖_E</th><th>rate</th><th>‖uᴵ − uᴺ‖_E</th><th>rate</th></tr>" +
      rows.join("").replaceAll(">NaN<", ">---<");
    plot($("sweep-canvas"), [
      { x: s.n, y: s.energyError, color: "#1565c0", dots: true },
      { x: s.n, y: s.supercloseError, color: "#c62828", dots: true },
    ], { logX: true, logY: true });
  });
}

await init();
$("btn-mesh").onclick = showMesh;
$("btn-solve").onclick = showSolve;
$("btn-sweep").onclick = showSweep;
showMesh();
