import init, { describe, faces, mesh } from "./pkg/wythoff_web.js";

const $ = (id) => document.getElementById(id);
let current = null;
let angle = { x: 0.5, y: 0.6 };

function show(el, doc, render) {
  el.classList.toggle("error", !!doc.error);
  el.textContent = doc.error ? doc.error : render(doc);
}

function summary() {
  const doc = JSON.parse(describe($("diagram").value));
  show($("summary"), doc, (d) =>
    `families  ${d.families.join(" + ")}\norder     ${d.order}\nf-vector  ${d.f_vector.join(" ")}\n${d.verdict}`);
}

function faceList() {
  const doc = JSON.parse(faces($("diagram").value, Number($("rank").value)));
  show($("faces"), doc, (d) =>
    d.faces.map((f) => `${f.decoration}  S = {${f.s_set.join(", ")}}  x${f.count}`).join("\n") || "(none)");
}

function rotate([x, y, z]) {
  const [cy, sy, cx, sx] = [Math.cos(angle.y), Math.sin(angle.y), Math.cos(angle.x), Math.sin(angle.x)];
  const x1 = cy * x + sy * z, z1 = -sy * x + cy * z;
  return [x1, cx * y - sx * z1, sx * y + cx * z1];
}

function draw() {
  const c = $("view"), g = c.getContext("2d");
  g.clearRect(0, 0, c.width, c.height);
  if (!current || current.error) {
    g.fillStyle = "#b00";
    g.fillText(current ? current.error : "", 10, 20);
    return;
  }
  const pts = current.points.map(rotate);
  const r = Math.max(1e-9, ...pts.map((p) => Math.hypot(...p)));
  const s = (c.width / 2 - 20) / r;
  const xy = pts.map(([x, y]) => [c.width / 2 + s * x, c.height / 2 - s * y]);
  g.strokeStyle = "#246";
  g.beginPath();
  for (const [a, b] of current.edges) {
    g.moveTo(...xy[a]);
    g.lineTo(...xy[b]);
  }
  g.stroke();
  g.fillStyle = "#c33";
  for (const [x, y] of xy) g.fillRect(x - 2, y - 2, 4, 4);
}

function build() {
  summary();
  faceList();
  current = JSON.parse(mesh($("diagram").value));
  draw();
}

let drag = null;
$("view").addEventListener("pointerdown", (e) => (drag = [e.clientX, e.clientY]));
window.addEventListener("pointerup", () => (drag = null));
window.addEventListener("pointermove", (e) => {
  if (!drag) return;
  angle.y += (e.clientX - drag[0]) * 0.01;
  angle.x += (e.clientY - drag[1]) * 0.01;
  drag = [e.clientX, e.clientY];
  draw();
});
$("go").addEventListener("click", build);
$("diagram").addEventListener("keydown", (e) => e.key === "Enter" && build());
$("rank").addEventListener("input", faceList);

await init();
build();
