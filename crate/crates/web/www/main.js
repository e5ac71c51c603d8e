import init, { kernel_profile, pair_profile, convergence_demo } from "./pkg/lap_lchs_web.js";

const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);

function call(fn, msgEl) {
  const out = JSON.parse(fn());
  if (out.error) {
    msgEl.textContent = out.error;
    msgEl.className = "msg err";
    return null;
  }
  msgEl.className = "msg";
  return out;
}

// Minimal line plot: series = [{ xs, ys, color }], optional log-y.
function plot(canvas, series, { logX = false, logY = false } = {}) {
  const ctx = canvas.getContext("2d");
  const W = canvas.width, H = canvas.height, pad = 40;
  ctx.clearRect(0, 0, W, H);
  const tx = (v) => (logX ? Math.log10(v) : v);
  const ty = (v) => (logY ? Math.log10(Math.max(v, 1e-300)) : v);
  const all = series.flatMap((s) => s.xs.map((x, i) => [tx(x), ty(s.ys[i])])).filter(([x, y]) => isFinite(x) && isFinite(y));
  if (all.length === 0) return;
  let [x0, x1] = [Math.min(...all.map((p) => p[0])), Math.max(...all.map((p) => p[0]))];
  let [y0, y1] = [Math.min(...all.map((p) => p[1])), Math.max(...all.map((p) => p[1]))];
  if (x1 === x0) x1 = x0 + 1;
  if (y1 === y0) y1 = y0 + 1;
  const sx = (x) => pad + ((x - x0) / (x1 - x0)) * (W - 2 * pad);
  const sy = (y) => H - pad - ((y - y0) / (y1 - y0)) * (H - 2 * pad);
  ctx.strokeStyle = "#999";
  ctx.strokeRect(pad, pad, W - 2 * pad, H - 2 * pad);
  ctx.fillStyle = "#555";
  ctx.font = "11px monospace";
  const fmt = (v, log) => (log ? `1e${v.toFixed(1)}` : v.toPrecision(3));
  ctx.fillText(fmt(y1, logY), 2, pad + 4);
  ctx.fillText(fmt(y0, logY), 2, H - pad);
  ctx.fillText(fmt(x0, logX), pad, H - pad + 14);
  ctx.fillText(fmt(x1, logX), W - pad - 40, H - pad + 14);
  if (!logY && y0 < 0 && y1 > 0) {
    ctx.strokeStyle = "#ddd";
    ctx.beginPath();
    ctx.moveTo(pad, sy(0));
    ctx.lineTo(W - pad, sy(0));
    ctx.stroke();
  }
  for (const s of series) {
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    let started = false;
    s.xs.forEach((x, i) => {
      const X = tx(x), Y = ty(s.ys[i]);
      if (!isFinite(X) || !isFinite(Y)) return;
      if (started) ctx.lineTo(sx(X), sy(Y));
      else ctx.moveTo(sx(X), sy(Y));
      started = true;
      if (s.marks) ctx.fillRect(sx(X) - 2, sy(Y) - 2, 4, 4);
    });
    ctx.stroke();
  }
}

function runKernel() {
  const out = call(() => kernel_profile(num("k-beta"), num("k-range"), 801, num("k-eps")), $("k-msg"));
  if (!out) return;
  const ks = out.points.map((p) => p[0]);
  plot($("k-plot"), [
    { xs: ks, ys: out.points.map((p) => p[1]), color: "#222" },
    { xs: ks, ys: out.points.map((p) => p[2]), color: "#1f77b4" },
    { xs: ks, ys: out.points.map((p) => p[3]), color: "#d62728" },
  ]);
  $("k-msg").textContent =
    `black |f(k)|, blue Re w(k), red Im w(k).  ‖f‖₁ = ${out.l1_norm.toFixed(6)}, K for tail ${num("k-eps")}: ${out.chosen_k.toFixed(2)}`;
}

function runPair() {
  const out = call(
    () => pair_profile($("p-name").value, num("p-t"), num("p-eta"), num("p-p"), num("p-gamma"), num("p-tmax"), 800),
    $("p-msg"),
  );
  if (!out) return;
  plot($("p-plot"), [{ xs: out.points.map((p) => p[0]), ys: out.points.map((p) => p[1]), color: "#2ca02c" }]);
  $("p-msg").textContent =
    `‖g‖₁ ${out.l1_exact ? "=" : "≤"} ${out.l1.toPrecision(6)}, shift ${out.shift}, tail beyond t max ≤ ${out.tail_at_t_max.toExponential(2)}`;
}

function runConvergence() {
  $("c-msg").textContent = "running…";
  // let the message paint before the synchronous computation
  setTimeout(() => {
    const out = call(
      () => convergence_demo($("c-name").value, num("c-dim"), num("c-seed"), num("c-gamma"), 1e-6, num("c-levels")),
      $("c-msg"),
    );
    if (!out) return;
    const terms = out.rows.map((r) => r.m_k * r.m_t);
    plot($("c-plot"), [{ xs: terms, ys: out.rows.map((r) => r.error), color: "#9467bd", marks: true }], { logX: true, logY: true });
    $("c-msg").textContent = `K = ${out.k_max.toFixed(1)}, T′ = ${out.t_prime.toFixed(2)}; error vs M_k·M_t (log-log)`;
    $("c-table").innerHTML =
      "<tr><th>M_k</th><th>M_t</th><th>error</th><th>a-priori bound</th></tr>" +
      out.rows
        .map((r) => `<tr><td>${r.m_k}</td><td>${r.m_t}</td><td>${r.error.toExponential(3)}</td><td>${r.bound === null ? "n/a" : r.bound.toExponential(2)}</td></tr>`)
        .join("");
  }, 10);
}

await init();
$("k-run").onclick = runKernel;
$("p-run").onclick = runPair;
$("c-run").onclick = runConvergence;
runKernel();
runPair();
