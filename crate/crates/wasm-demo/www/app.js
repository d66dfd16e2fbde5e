// Vanilla glue between the form controls and the wasm exports.
// Build the pkg/ directory with:
//   wasm-pack build crates/wasm-demo --target web --out-dir www/pkg
import init, { classify_color, recognize_tone, frame_membership } from "./pkg/clustering_machine_wasm.js";

const $ = (id) => document.getElementById(id);
const fmt = (x, d = 4) => Number(x).toFixed(d);

function table(headers, rows) {
  const h = headers.map((x) => `<th>${x}</th>`).join("");
  const body = rows
    .map((r) => `<tr>${r.map((c) => `<td>${c}</td>`).join("")}</tr>`)
    .join("");
  return `<table><tr>${h}</tr>${body}</table>`;
}

const badge = (m) => (m ? `<span class="in">in</span>` : `<span class="out">out</span>`);

function showError(el, text) {
  el.innerHTML = `<pre class="error">${text}</pre>`;
}

// ---- 1 · colors --------------------------------------------------------

function runColor() {
  const [r, g, b] = ["col-r", "col-g", "col-b"].map((id) => Number($(id).value));
  $("swatch").style.background = `rgb(${r * 255| 0}, ${g * 255 | 0}, ${b * 255 | 0})`;
  const out = JSON.parse(classify_color(r, g, b, Number($("col-hi").value), Number($("col-lo").value)));
  if (out.error) return showError($("color-out"), out.error);

  const scoreRows = out.scores.map((s) => [
    s.label,
    fmt(s.score),
    `<span class="bar" style="width:${Math.min(200, 200 * s.score / Math.max(out.norm_sq, 1e-9))}px"></span>`,
  ]);
  const refRows = out.references.map((c) => [c.name, fmt(c.sq_distance), fmt(c.dissimilarity_f)]);
  const v = out.verdict;
  const detail = v.group !== undefined ? ` → group ${v.group}` : "";
  $("color-out").innerHTML =
    `<p class="verdict">verdict: ${v.case}${detail}</p>` +
    table(["output", "q<sub>α</sub>", ""], scoreRows) +
    table(["reference", "‖P−f‖²", "F[P,f]"], refRows);
}

// ---- 2 · tones ---------------------------------------------------------

function drawSpectrum(spectrum, markers) {
  const canvas = $("spectrum");
  const ctx = canvas.getContext("2d");
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const peak = Math.max(...spectrum, 1e-9);
  const w = canvas.width / spectrum.length;
  ctx.fillStyle = "#4a8";
  spectrum.forEach((m, i) => {
    const h = (m / peak) * (canvas.height - 12);
    ctx.fillRect(i * w, canvas.height - h, Math.max(w, 0.5), h);
  });
  ctx.fillStyle = "#c43";
  for (const bin of markers) {
    if (bin - 1 < spectrum.length) ctx.fillRect((bin - 1) * w - 0.5, 0, 1.5, 8);
  }
}

function runTone() {
  const out = JSON.parse(recognize_tone(
    Number($("tone-k").value),
    $("tone-amps").value,
    Number($("tone-nh").value),
    $("tone-measure").value,
    Number($("tone-noise").value),
    Number($("tone-amp").value),
    Number($("tone-seed").value),
  ));
  if (out.error) return showError($("tone-out"), out.error);
  const rows = out.ranking.map((r, i) => [i + 1, r.tone, fmt(r.value, 6)]);
  $("tone-out").innerHTML =
    `<p class="verdict">recognized: ${out.recognized}</p>` +
    table(["#", "tone", "value"], rows);
  drawSpectrum(out.spectrum, out.marker_bins);
}

// ---- 3 · frame clusters ------------------------------------------------

function runFrame() {
  const out = JSON.parse(frame_membership(
    $("fr-center").value,
    $("fr-signal").value,
    $("fr-noise").value,
    Number($("fr-eps").value),
  ));
  if (out.error) return showError($("frame-out"), out.error);
  const row = (name, d) => [
    name,
    fmt(d.norm_distance), badge(d.member.norm),
    fmt(d.delta), badge(d.member.delta),
    fmt(d.nabla), badge(d.member.nabla),
  ];
  $("frame-out").innerHTML = table(
    ["signal", "‖P−f‖", "", "Δ", "", "∇", ""],
    [row("clean f", out.clean), row("f + ν", out.noised)],
  );
}

// ---- wiring ------------------------------------------------------------

await init();
for (const [section, handler] of [
  ["color-section", runColor],
  ["tone-section", runTone],
  ["frame-section", runFrame],
]) {
  $(section).addEventListener("input", () => {
    try { handler(); } catch (e) { showError($(section).querySelector("div[id$='-out']"), String(e)); }
  });
}
runColor();
runTone();
runFrame();
