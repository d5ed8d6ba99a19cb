import init, { fusion_demo, ensemble_demo, scale_demo } from "./pkg/sdpa_web.js";

const SIZE = 128;
const $ = (id) => document.getElementById(id);
const num = (id) => Number($(id).value);
const seed = (id) => BigInt(Math.max(0, Math.floor(num(id))));
const fmt = (v) => (v === undefined || v === null ? "NA" : v.toFixed(4));

function draw(id, rgba, size) {
  const canvas = $(id);
  canvas.width = size;
  canvas.height = size;
  const data = new ImageData(new Uint8ClampedArray(rgba), size, size);
  canvas.getContext("2d").putImageData(data, 0, 0);
}

function guarded(outId, fn) {
  return () => {
    try {
      const t = performance.now();
      const text = fn();
      $(outId).textContent = `${text}\n(${(performance.now() - t).toFixed(0)} ms)`;
    } catch (err) {
      $(outId).textContent = `error: ${err.message ?? err}`;
    }
  };
}

const runFusion = guarded("f-out", () => {
  const d = fusion_demo(SIZE, num("f-slices"), num("f-looks"), seed("f-seed"), num("f-radius"), num("f-h"));
  draw("f-clean", d.clean_rgba(), d.size());
  draw("f-noisy", d.noisy_rgba(), d.size());
  draw("f-fused", d.fused_rgba(), d.size());
  const ratio = d.fused_mse() / d.noisy_mse();
  const text = `mean noisy MSE ${fmt(d.noisy_mse())}  fused MSE ${fmt(d.fused_mse())}  ratio ${fmt(ratio)}`;
  d.free();
  return text;
});

const runEnsemble = guarded("e-text", () => {
  const d = ensemble_demo(
    SIZE, num("e-looks"), seed("e-seed"), num("e-k"), num("e-stride"),
    num("e-wcnr"), num("e-wmsr"), num("e-wtp"), num("e-wep"),
  );
  draw("e-noisy", d.noisy_rgba(), d.size());
  draw("e-c0", d.candidate_rgba(0), d.size());
  draw("e-c1", d.candidate_rgba(1), d.size());
  draw("e-out", d.output_rgba(), d.size());
  draw("e-win", d.winner_rgba(), d.size());
  const [w0, w1] = d.wins();
  const [s0, s1, s2] = d.composites();
  const text = `patches won: median ${w0}, gaussian ${w1}\n` +
    `whole-image composite: median ${fmt(s0)}  gaussian ${fmt(s1)}  ensemble ${fmt(s2)}`;
  d.free();
  return text;
});

const runScale = guarded("s-out", () => {
  const d = scale_demo(SIZE, seed("s-seed"), num("s-lo"), num("s-hi"));
  draw("s-before", d.before_rgba(), d.size());
  draw("s-after", d.after_rgba(), d.size());
  const text = `CNR before ${fmt(d.cnr_before())}  after ${fmt(d.cnr_after())}`;
  d.free();
  return text;
});

await init();
$("f-run").addEventListener("click", runFusion);
$("e-run").addEventListener("click", runEnsemble);
$("s-run").addEventListener("click", runScale);
runFusion();
runEnsemble();
runScale();
