import init, { lambda_series, residue_pattern, construct } from "./pkg/purefields_web.js";

const $ = (id) => document.getElementById(id);

function call(f, ...args) {
  const v = JSON.parse(f(...args));
  if (v.error) throw new Error(v.error);
  return v;
}

function show(el, fn) {
  try {
    fn();
  } catch (e) {
    el.innerHTML = `<span class="err">${e.message}</span>`;
  }
}

function plotLambda() {
  show($("lout"), () => {
    const v = call(lambda_series, $("la").value, +$("ll").value, +$("lx").value);
    const t = v.tallies;
    $("lout").textContent =
      `Σ λ(p)/p = ${v.sum.toFixed(6)}; split ${t.split_complete}, one root ${t.one_linear}, ` +
      `no root ${t.no_linear}, skipped ${t.skipped_ramified}`;
    const c = $("lcanvas"), g = c.getContext("2d");
    g.clearRect(0, 0, c.width, c.height);
    const pts = v.points;
    if (!pts.length) return;
    const ys = pts.map((p) => p[2]);
    const lo = Math.min(0, ...ys), hi = Math.max(0, ...ys);
    const pad = 30, w = c.width - 2 * pad, h = c.height - 2 * pad;
    const lx = (p) => pad + (w * Math.log(p[0])) / Math.log(pts[pts.length - 1][0]);
    const ly = (y) => pad + h - (h * (y - lo)) / (hi - lo || 1);
    g.strokeStyle = "#ccc";
    g.beginPath(); g.moveTo(pad, ly(0)); g.lineTo(pad + w, ly(0)); g.stroke();
    g.strokeStyle = "#1f5fbf";
    g.beginPath();
    pts.forEach((p, i) => (i ? g.lineTo(lx(p), ly(p[2])) : g.moveTo(lx(p), ly(p[2]))));
    g.stroke();
    g.fillStyle = "#444";
    g.fillText(`${hi.toFixed(3)}`, 2, ly(hi) + 4);
    g.fillText(`${lo.toFixed(3)}`, 2, ly(lo));
    g.fillText("log p →", c.width - 60, c.height - 8);
  });
}

function plotResidues() {
  show($("rout"), () => {
    const v = call(residue_pattern, +$("rp").value, +$("rl").value, +$("rk").value);
    $("rout").textContent =
      `runs of ${v.k + 1} consecutive residues: ${v.consecutive_runs}; ` +
      `existence threshold ${v.threshold}; m0 = ${v.m0 ?? "none"}`;
    const c = $("rcanvas"), g = c.getContext("2d");
    const n = v.classes.length - 1;
    const cols = Math.ceil(Math.sqrt(n * 4.5)), rows = Math.ceil(n / cols);
    const s = Math.max(2, Math.floor(Math.min(c.width / cols, 400 / rows)));
    c.height = rows * s;
    g.clearRect(0, 0, c.width, c.height);
    for (let d = 1; d <= n; d++) {
      const cl = v.classes[d];
      g.fillStyle = cl === 0 ? "#1f3f7f" : `hsl(${(360 * cl) / v.l}, 55%, 80%)`;
      g.fillRect(((d - 1) % cols) * s, Math.floor((d - 1) / cols) * s, s - 1, s - 1);
    }
  });
}

function runConstruct() {
  show($("cout"), () => {
    const v = call(construct, +$("cl").value, +$("ck").value, $("cx").value,
      BigInt($("cs").value), BigInt($("cy").value), $("cstaged").checked);
    const head = `M = ${v.m_max}, q = ${v.q}, m0 = ${v.m0}, ${v.progression_len} candidates` +
      (v.override_regime ? " (override regime)" : "");
    const warn = v.warnings.map((w) => `<div class="note">${w}</div>`).join("");
    const rows = v.rows.map((r) =>
      `<tr><td>${r.m}</td><td>${r.j}</td><td>${r.radicand}</td>` +
      `<td>${r.log10_discriminant.toFixed(2)}</td><td>${r.bound_holds ? "✓" : "✗"}</td></tr>`).join("");
    $("cout").innerHTML = `<div>${head}</div>${warn}` + (v.rows.length
      ? `<table><tr><th>m</th><th>j</th><th>radicand</th><th>log₁₀ D</th><th>D·k^l ≥ Δ</th></tr>${rows}</table>`
      : "<p>No admissible m.</p>");
  });
}

await init();
$("lgo").onclick = plotLambda;
$("rgo").onclick = plotResidues;
$("cgo").onclick = runConstruct;
plotLambda();
plotResidues();
runConstruct();
