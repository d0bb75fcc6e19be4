import init, { solve_json, lambda_curve, residual_field } from './pkg/mintime_wasm.js';

const $ = (id) => document.getElementById(id);

function problem() {
  const p = {};
  for (const k of ['u1', 'v1', 'u2', 'v2', 'dx', 'dy']) p[k] = parseFloat($(k).value);
  p.accel_bound = parseFloat($('accel').value);
  return JSON.stringify(p);
}

// fit points into the canvas with equal axis scale
function frame(ctx, xs, ys, pad = 20) {
  const w = ctx.canvas.width, h = ctx.canvas.height;
  const x0 = Math.min(...xs), x1 = Math.max(...xs);
  const y0 = Math.min(...ys), y1 = Math.max(...ys);
  const s = Math.min((w - 2 * pad) / (x1 - x0 || 1), (h - 2 * pad) / (y1 - y0 || 1));
  return [(x) => pad + (x - x0) * s, (y) => h - pad - (y - y0) * s];
}

function drawPath(res) {
  const ctx = $('path').getContext('2d');
  ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
  const xs = res.samples.map((s) => s[1]), ys = res.samples.map((s) => s[2]);
  const [px, py] = frame(ctx, xs, ys);
  ctx.strokeStyle = '#36c';
  ctx.beginPath();
  res.samples.forEach((s, i) => (i ? ctx.lineTo : ctx.moveTo).call(ctx, px(s[1]), py(s[2])));
  ctx.stroke();
  // acceleration ticks
  ctx.strokeStyle = '#c63';
  for (let i = 0; i < res.samples.length; i += 10) {
    const [, x, y, ax, ay] = res.samples[i];
    ctx.beginPath();
    ctx.moveTo(px(x), py(y));
    ctx.lineTo(px(x) + 12 * ax, py(y) - 12 * ay);
    ctx.stroke();
  }
}

function runSolve() {
  const res = JSON.parse(solve_json(problem()));
  if (res.error) {
    $('summary').textContent = 'error: ' + res.error;
    return;
  }
  $('summary').textContent =
    `case ${res.case}, ${res.kind}, T = ${res.total_time.toPrecision(10)}, roots found ${res.roots}`;
  drawPath(res);
}

function runField() {
  const nt = 120, na = 240;
  const eta = parseInt($('eta').value, 10);
  const f = residual_field(problem(), eta, nt, na, parseFloat($('amin').value), parseFloat($('amax').value));
  const ctx = $('heat').getContext('2d');
  if (f.length === 0) {
    ctx.clearRect(0, 0, ctx.canvas.width, ctx.canvas.height);
    return;
  }
  const finite = Array.from(f).filter(Number.isFinite);
  const lo = Math.min(...finite), hi = Math.max(...finite);
  const img = ctx.createImageData(na, nt);
  for (let i = 0; i < nt; i++) {
    for (let j = 0; j < na; j++) {
      const v = f[i * na + j];
      const c = Number.isFinite(v) ? Math.round(255 * (v - lo) / (hi - lo || 1)) : 255;
      const k = 4 * ((nt - 1 - i) * na + j);
      img.data.set([c, c, Math.min(255, c + 40), 255], k);
    }
  }
  createImageBitmap(img).then((bmp) => {
    ctx.imageSmoothingEnabled = false;
    ctx.drawImage(bmp, 0, 0, ctx.canvas.width, ctx.canvas.height);
  });
}

function runLambda() {
  const T = parseFloat($('T').value);
  $('Tval').textContent = T;
  const c = lambda_curve(T, 201);
  const th = [], lam = [];
  for (let i = 0; i < c.length; i += 2) { th.push(c[i]); lam.push(Math.log10(c[i + 1])); }
  const ctx = $('lambda').getContext('2d');
  const w = ctx.canvas.width, h = ctx.canvas.height, pad = 20;
  ctx.clearRect(0, 0, w, h);
  const l0 = Math.min(...lam), l1 = Math.max(...lam);
  const px = (t) => pad + (t + Math.PI / 2) / Math.PI * (w - 2 * pad);
  const py = (l) => h - pad - (l - l0) / (l1 - l0 || 1) * (h - 2 * pad);
  ctx.strokeStyle = '#363';
  ctx.beginPath();
  th.forEach((t, i) => (i ? ctx.lineTo : ctx.moveTo).call(ctx, px(t), py(lam[i])));
  ctx.stroke();
  ctx.fillText(`log10 Lambda in [${l0.toFixed(2)}, ${l1.toFixed(2)}]`, pad, 12);
}

await init();
$('solve').onclick = runSolve;
$('field').onclick = runField;
$('T').oninput = runLambda;
runSolve();
runLambda();
