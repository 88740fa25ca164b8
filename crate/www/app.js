// Demo page driver. Expects the wasm-bindgen "web" bundle in ./pkg
// (see README for the build command).
import init, { stationary_curves, heat_frames, lambda_sweep } from "./pkg/warpheat_wasm.js";

const css = (name) => getComputedStyle(document.documentElement).getPropertyValue(name).trim();

function plot(canvas, series, opts = {}) {
  const ctx = canvas.getContext("2d");
  const { width: w, height: h } = canvas;
  ctx.clearRect(0, 0, w, h);
  const pad = { l: 52, r: 12, t: 12, b: 26 };

  let xmin = Infinity, xmax = -Infinity, ymin = Infinity, ymax = -Infinity;
  for (const s of series) {
    for (let i = 0; i < s.x.length; i++) {
      const y = s.y[i];
      if (!Number.isFinite(y)) continue;
      xmin = Math.min(xmin, s.x[i]); xmax = Math.max(xmax, s.x[i]);
      ymin = Math.min(ymin, y); ymax = Math.max(ymax, y);
    }
  }
  if (opts.ymin !== undefined) ymin = opts.ymin;
  if (opts.ymax !== undefined) ymax = opts.ymax;
  if (ymin === ymax) { ymin -= 1; ymax += 1; }
  const yspan = ymax - ymin, xspan = xmax - xmin;
  ymin -= 0.05 * yspan; ymax += 0.05 * yspan;

  const X = (x) => pad.l + ((x - xmin) / xspan) * (w - pad.l - pad.r);
  const Y = (y) => h - pad.b - ((y - ymin) / (ymax - ymin)) * (h - pad.t - pad.b);

  ctx.strokeStyle = css("--line"); ctx.fillStyle = css("--muted");
  ctx.font = "11px system-ui"; ctx.lineWidth = 1;
  const ticks = 5;
  for (let i = 0; i <= ticks; i++) {
    const yv = ymin + ((ymax - ymin) * i) / ticks;
    ctx.beginPath(); ctx.moveTo(pad.l, Y(yv)); ctx.lineTo(w - pad.r, Y(yv)); ctx.stroke();
    ctx.fillText(yv.toPrecision(3), 4, Y(yv) + 4);
    const xv = xmin + (xspan * i) / ticks;
    ctx.fillText(xv.toPrecision(3), X(xv) - 8, h - 8);
  }
  if (ymin < 0 && ymax > 0) {
    ctx.strokeStyle = "#555a64";
    ctx.beginPath(); ctx.moveTo(pad.l, Y(0)); ctx.lineTo(w - pad.r, Y(0)); ctx.stroke();
  }

  for (const s of series) {
    ctx.strokeStyle = s.color; ctx.lineWidth = 1.6; ctx.beginPath();
    let started = false;
    for (let i = 0; i < s.x.length; i++) {
      const y = s.y[i];
      if (!Number.isFinite(y)) { started = false; continue; }
      const px = X(s.x[i]), py = Y(Math.min(Math.max(y, ymin), ymax));
      if (!started) { ctx.moveTo(px, py); started = true; } else { ctx.lineTo(px, py); }
    }
    ctx.stroke();
    if (s.dots) {
      ctx.fillStyle = s.color;
      for (let i = 0; i < s.x.length; i++) {
        ctx.beginPath(); ctx.arc(X(s.x[i]), Y(s.y[i]), 3.2, 0, 7); ctx.fill();
      }
    }
  }

  let lx = pad.l + 10;
  for (const s of series) {
    if (!s.label) continue;
    ctx.fillStyle = s.color; ctx.fillText(s.label, lx, pad.t + 10);
    lx += ctx.measureText(s.label).width + 18;
  }
}

const $ = (id) => document.getElementById(id);
const fail = (el, e) => { el.innerHTML = `<span class="err">${e}</span>`; };

function runStationary() {
  const readout = $("st-readout");
  try {
    const family = $("st-family").value;
    const req = {
      manifold: {
        warp: family === "example71" ? "euclidean" : $("st-warp").value,
        dimension: parseInt($("st-n").value, 10),
      },
      potential: {
        family,
        a: parseFloat($("st-a").value),
        b: parseFloat($("st-b").value),
        b_coef: parseFloat($("st-a").value) * 4,
      },
      r_max: parseFloat($("st-rmax").value),
      samples: 500,
    };
    const out = JSON.parse(stationary_curves(JSON.stringify(req)));
    plot($("st-canvas"), [
      { x: out.r, y: out.potential, color: css("--accent2"), label: "V(r)" },
      { x: out.r, y: out.profile, color: css("--accent"), label: "φ(r)" },
    ]);
    readout.innerHTML =
      `profile <b>${out.decay_tag}</b>, ` +
      `max |Δφ + m φ′ − Vφ| = <b>${out.max_abs_residual.toExponential(2)}</b> over ${out.r.length} radii`;
  } catch (e) { fail(readout, e); }
}

let heat = null;
function drawHeatFrame(k) {
  if (!heat) return;
  const t = heat.times[k];
  plot($("he-canvas"), [
    { x: heat.r, y: heat.frames[0], color: "#4a5160", label: "t = 0" },
    { x: heat.r, y: heat.frames[k], color: css("--accent"), label: `t = ${t.toFixed(4)}` },
  ], { ymin: 0 });
  $("he-readout").innerHTML =
    `${heat.weighted_view ? "gauge view w = u/φ" : "original u"} — ` +
    `sup norm <b>${heat.sup_norms[k].toExponential(3)}</b> at t = ${t.toFixed(4)}`;
}

function runHeat() {
  const readout = $("he-readout");
  try {
    const req = {
      manifold: { warp: "euclidean", dimension: 3 },
      potential: { family: $("he-family").value },
      radius: parseFloat($("he-radius").value),
      cells: 500,
      t_final: parseFloat($("he-T").value),
      dt: parseFloat($("he-T").value) / 120,
      view: $("he-view").value,
      max_frames: 60,
    };
    heat = JSON.parse(heat_frames(JSON.stringify(req)));
    const slider = $("he-slider");
    slider.max = heat.frames.length - 1;
    slider.value = 0;
    slider.disabled = false;
    drawHeatFrame(0);
  } catch (e) { fail(readout, e); }
}

function runSweep() {
  const readout = $("sw-readout");
  try {
    const radii = $("sw-radii").value.split(",").map((s) => parseFloat(s.trim()))
      .filter((x) => Number.isFinite(x) && x > 0);
    const n = parseInt($("sw-n").value, 10);
    const req = {
      manifold: { warp: $("sw-warp").value, dimension: n },
      potential: { family: "zero" },
      radii,
      cells_per_unit: 150,
    };
    const out = JSON.parse(lambda_sweep(JSON.stringify(req)));
    const bottom = $("sw-warp").value === "hyperbolic" ? ((n - 1) ** 2) / 4 : 0;
    plot($("sw-canvas"), [
      { x: out.radii, y: out.lambdas, color: css("--accent"), label: "λ₁(B_R)", dots: true },
      { x: out.radii, y: out.radii.map(() => bottom), color: css("--accent3"), label: "spectral bottom" },
    ]);
    readout.innerHTML =
      `extrapolated Λ₁ = <b>${out.extrapolated.toPrecision(6)}</b> ` +
      `(closed form: ${bottom})`;
  } catch (e) { fail(readout, e); }
}

init().then(() => {
  $("st-run").onclick = runStationary;
  $("he-run").onclick = runHeat;
  $("sw-run").onclick = runSweep;
  $("he-slider").oninput = (ev) => drawHeatFrame(parseInt(ev.target.value, 10));
  runStationary();
}).catch((e) => {
  for (const id of ["st-readout", "he-readout", "sw-readout"]) fail($(id), e);
});
