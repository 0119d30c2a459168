import init, { Demo, partial_weights, render_tone, strip_image, tone_sample_rate } from "./pkg/sonoplane_web.js";

const PARTIALS = 16;
const SESSION_SECONDS = 120;

await init();

const pad = document.getElementById("pad");
const ctx2d = pad.getContext("2d");
const statusLine = document.getElementById("status");
const outcomeLine = document.getElementById("outcome");
const cooldownLine = document.getElementById("cooldown");
const reveal = document.getElementById("reveal");

let audio = null;
let demo = null;
let timer = null;
let voice = null;
let lastTouch = -Infinity;

function audioContext() {
  audio ??= new AudioContext();
  return audio;
}

function periodicWave(ac, pitch, timbre, waveshape) {
  const weights = partial_weights(pitch, timbre, waveshape, PARTIALS);
  const real = new Float32Array(PARTIALS + 1);
  const imag = new Float32Array(PARTIALS + 1);
  imag.set(weights, 1);
  return ac.createPeriodicWave(real, imag, { disableNormalization: true });
}

function startVoice(ac) {
  const osc = ac.createOscillator();
  const gain = ac.createGain();
  gain.gain.value = 0;
  osc.connect(gain).connect(ac.destination);
  osc.start();
  return { osc, gain, shape: null };
}

function sound(frame) {
  const [, pitch, amplitude, timbre, waveshape] = frame;
  const now = audio.currentTime;
  voice.osc.frequency.setTargetAtTime(pitch, now, 0.01);
  voice.gain.gain.setTargetAtTime(amplitude * 0.5, now, 0.01);
  const shape = `${timbre.toFixed(2)}:${waveshape.toFixed(2)}:${Math.round(pitch / 20)}`;
  if (shape !== voice.shape) {
    voice.osc.setPeriodicWave(periodicWave(audio, pitch, timbre, waveshape));
    voice.shape = shape;
  }
}

function draw() {
  ctx2d.clearRect(0, 0, pad.width, pad.height);
  if (demo && reveal.checked) {
    const [x, y] = demo.target();
    ctx2d.fillStyle = "#e33";
    ctx2d.beginPath();
    ctx2d.arc(x * pad.width, (1 - y) * pad.height, 0.05 * pad.width, 0, 2 * Math.PI);
    ctx2d.fill();
  }
}

function tick() {
  if (!demo.advance()) {
    stop();
    return;
  }
  const outcome = demo.last_outcome();
  if (outcome) outcomeLine.textContent = outcome.replace("_", " ");
  statusLine.textContent = `score ${demo.score()} · speed level ${demo.speed_level()}`;
  const wait = 1 - (demo.frame()[0] - lastTouch);
  cooldownLine.textContent = wait > 0 ? `next touch in ${wait.toFixed(1)} s` : "";
  sound(demo.frame());
  draw();
}

function stop() {
  clearInterval(timer);
  timer = null;
  voice?.gain.gain.setTargetAtTime(0, audio.currentTime, 0.02);
  outcomeLine.textContent = `session over, score ${demo.score()}`;
}

document.getElementById("start").addEventListener("click", async () => {
  const ac = audioContext();
  await ac.resume();
  voice ??= startVoice(ac);
  if (timer) clearInterval(timer);
  demo = new Demo(BigInt(Date.now()), SESSION_SECONDS);
  lastTouch = -Infinity;
  outcomeLine.textContent = "";
  timer = setInterval(tick, demo.frame_period_ms());
});

pad.addEventListener("pointerdown", (e) => {
  if (!timer) return;
  const x = Math.min(Math.max(e.offsetX / pad.clientWidth, 0), 1);
  const y = Math.min(Math.max(1 - e.offsetY / pad.clientHeight, 0), 1);
  demo.touch(x, y);
  const t = demo.frame()[0];
  if (t - lastTouch >= 1) lastTouch = t;
});

reveal.addEventListener("change", draw);

const slider = (id) => Number(document.getElementById(id).value);
const pitchOf = (v) => 110 * Math.pow(2000 / 110, v);
const pitchOut = document.getElementById("pitch-out");
const showPitch = () => (pitchOut.textContent = `${pitchOf(slider("pitch")).toFixed(1)} Hz`);
document.getElementById("pitch").addEventListener("input", showPitch);
showPitch();

document.getElementById("play").addEventListener("click", async () => {
  const ac = audioContext();
  await ac.resume();
  const rate = tone_sample_rate();
  const samples = render_tone(pitchOf(slider("pitch")), slider("amplitude"), slider("timbre"), slider("waveshape"), 1.0);
  const buffer = ac.createBuffer(1, samples.length, rate);
  buffer.copyToChannel(samples, 0);
  const src = ac.createBufferSource();
  src.buffer = buffer;
  src.connect(ac.destination);
  src.start();
  drawStrip(strip_image(samples, rate));
});

function drawStrip(image) {
  const canvas = document.getElementById("strip");
  const w = image.width();
  const h = image.height();
  const gray = image.pixels();
  const rgba = new Uint8ClampedArray(w * h * 4);
  for (let i = 0; i < w * h; i++) {
    rgba.set([gray[i], gray[i], gray[i], 255], i * 4);
  }
  const off = new OffscreenCanvas(w, h);
  off.getContext("2d").putImageData(new ImageData(rgba, w, h), 0, 0);
  const g = canvas.getContext("2d");
  g.imageSmoothingEnabled = false;
  g.clearRect(0, 0, canvas.width, canvas.height);
  g.drawImage(off, 0, 0, canvas.width, canvas.height);
}
