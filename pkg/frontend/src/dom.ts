// Thin DOM layer: renders the controller's view model into the five panels
// and plays the positive-feedback chime.

import { SessionController } from "./controller.js";
import { cubeScene, CubeScene, goalScene, isometricScene } from "./view.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function renderScene(svg: SVGSVGElement, scene: CubeScene): void {
  svg.setAttribute("viewBox", `0 0 ${scene.width} ${scene.height}`);
  svg.replaceChildren();
  for (const sticker of scene.stickers) {
    const poly = document.createElementNS(SVG_NS, "polygon");
    poly.setAttribute("points", sticker.points);
    poly.setAttribute("fill", sticker.grayout ? "#3a3a3a" : sticker.fill);
    poly.setAttribute("class",
      "sticker" + (sticker.highlight ? " highlight" : "")
      + (sticker.grayout ? " grayout" : ""));
    svg.appendChild(poly);
  }
  for (const arc of scene.arcs) {
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", arc.path);
    path.setAttribute("class", "block-arc");
    svg.appendChild(path);
  }
  for (const arrow of scene.arrows) {
    const path = document.createElementNS(SVG_NS, "path");
    path.setAttribute("d", arrow.path);
    path.setAttribute("class", "hint-arrow");
    path.setAttribute("marker-end", "url(#arrowhead)");
    svg.appendChild(path);
    const label = document.createElementNS(SVG_NS, "text");
    label.setAttribute("x", String(arrow.labelX));
    label.setAttribute("y", String(arrow.labelY));
    label.setAttribute("class", "hint-label");
    label.textContent = arrow.text;
    svg.appendChild(label);
  }
  const defs = document.createElementNS(SVG_NS, "defs");
  defs.innerHTML = `<marker id="arrowhead" markerWidth="8" markerHeight="8"
    refX="6" refY="3" orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="#ffd500"/></marker>`;
  svg.appendChild(defs);
}

export function chime(): void {
  const ctx = new AudioContext();
  const osc = ctx.createOscillator();
  const gain = ctx.createGain();
  osc.frequency.value = 880;
  gain.gain.setValueAtTime(0.2, ctx.currentTime);
  gain.gain.exponentialRampToValueAtTime(0.001, ctx.currentTime + 0.35);
  osc.connect(gain).connect(ctx.destination);
  osc.start();
  osc.stop(ctx.currentTime + 0.4);
}

export function renderAll(controller: SessionController): void {
  const vm = controller.vm;
  const playground = document.getElementById("playground") as unknown as SVGSVGElement;
  renderScene(playground, cubeScene(vm.localFacelet, vm.hint,
                                    vm.backCorner, vm.extendedViews));
  const iso = document.getElementById("iso") as unknown as SVGSVGElement;
  renderScene(iso, isometricScene(vm.localFacelet));
  const goal = document.getElementById("goal") as unknown as SVGSVGElement;
  renderScene(goal, goalScene(vm.stage));

  const status = document.getElementById("status")!;
  status.textContent =
    `${vm.mode} / ${vm.stage.replace("_", " ")}` +
    (vm.task && vm.task.status === "task" ? ` - task: ${vm.task.kc}` : "") +
    (vm.task && vm.task.status === "done" ? " - all components mastered" : "");

  const banner = document.getElementById("banner")!;
  banner.textContent = vm.banner ?? "";
  banner.style.display = vm.banner ? "block" : "none";

  const hintPanel = document.getElementById("hint-text")!;
  if (vm.hint) {
    const steps = vm.hint.steps.map((s) => s.text);
    hintPanel.textContent = steps.length
      ? steps.join("; ")
      : `level ${vm.hint.level}: watch the highlighted block`;
  } else {
    hintPanel.textContent = "press 1, 2 or 3 for a hint";
  }

  const meter = document.getElementById("skillometer")!;
  meter.replaceChildren();
  const rows = vm.rows.length
    ? vm.rows
    : vm.catalog.map((c) => ({ kc: c.id, score: 0, mastered: false, attempts: 0 }));
  for (const row of rows) {
    const div = document.createElement("div");
    div.className = "skill-row" + (row.mastered ? " mastered" : "");
    const bar = document.createElement("span");
    bar.className = "bar";
    bar.style.width = `${Math.round((row.score / 3) * 100)}%`;
    const label = document.createElement("span");
    label.className = "label";
    label.textContent = `${row.kc.replace("_", " ")} (${row.attempts})`;
    div.append(label, bar);
    meter.appendChild(div);
  }
}

export function bindKeyboard(controller: SessionController): void {
  document.addEventListener("keydown", (event) => {
    if (event.ctrlKey || event.metaKey || event.altKey) return;
    if (controller.handleKey(event.key)) event.preventDefault();
  });
}
