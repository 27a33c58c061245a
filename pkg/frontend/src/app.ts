/** Browser application: wires the service client, canvas, and controls.
 *
 * Everything drawn comes from server snapshots; the page computes no
 * layout of its own. The render loop drains a latest-wins mailbox once
 * per animation frame, so the canvas always shows one whole snapshot no
 * matter how fast the stream runs.
 */

import { ApiClient } from "./api.js";
import { DragController, nearestNode } from "./drag.js";
import { downloadText, exportLayoutJson, exportSvg } from "./export.js";
import {
  LONG_EDGE_COLOR,
  Renderer,
  SHORT_EDGE_COLOR,
  Viewport,
} from "./renderer.js";
import {
  SLIDER_MAX,
  WeightController,
  sliderFromWeight,
  weightFromSlider,
} from "./sliders.js";
import { drawSparkline, pushHistory } from "./sparkline.js";
import { LatestWins, pumpSnapshots } from "./stream.js";
import type {
  CreateSessionBody,
  CriterionId,
  EdgeIndex,
  GraphObj,
  Point,
  SessionDescription,
  Snapshot,
} from "./types.js";
import { CRITERIA, edgeIndices } from "./types.js";

const CANVAS_W = 840;
const CANVAS_H = 640;

const FAMILY_PARAMS: Record<string, string[]> = {
  cycle: ["n"],
  path: ["n"],
  grid: ["w", "h"],
  balanced_tree: ["branching", "depth"],
  complete: ["n"],
  complete_bipartite: ["a", "b"],
  cube: [],
  dodecahedron: [],
};

interface AppState {
  session: SessionDescription | null;
  edges: EdgeIndex[];
  positions: Point[];
  uploadedGraph: GraphObj | null;
  weightController: WeightController | null;
  dragController: DragController | null;
  lastViewport: Viewport | null;
  frozenViewport: Viewport | null;
  histories: Map<CriterionId, number[]>;
  streamDone: Promise<unknown> | null;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function setStatus(text: string): void {
  el<HTMLElement>("status").textContent = text;
}

export function startApp(): void {
  // ?service=http://host:port points the UI at a service on another
  // origin; the default assumes a same-origin reverse proxy
  const serviceBase =
    new URLSearchParams(window.location.search).get("service") ?? "";
  const api = new ApiClient(serviceBase);
  const mailbox = new LatestWins<Snapshot>();
  const canvas = el<HTMLCanvasElement>("layout-canvas");
  canvas.width = CANVAS_W;
  canvas.height = CANVAS_H;
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    throw new Error("2d canvas is unavailable");
  }
  const renderer = new Renderer(ctx, CANVAS_W, CANVAS_H);

  const state: AppState = {
    session: null,
    edges: [],
    positions: [],
    uploadedGraph: null,
    weightController: null,
    dragController: null,
    lastViewport: null,
    frozenViewport: null,
    histories: new Map(),
    streamDone: null,
  };

  buildLegend();
  const sliderInputs = buildSliders();

  function buildLegend(): void {
    const legend = el<HTMLElement>("edge-legend");
    legend.innerHTML =
      `<span style="color:${SHORT_EDGE_COLOR}">short</span>` +
      ` &mdash; edge length &mdash; ` +
      `<span style="color:${LONG_EDGE_COLOR}">long</span>`;
  }

  function buildSliders(): Map<CriterionId, HTMLInputElement> {
    const panel = el<HTMLElement>("sliders");
    const inputs = new Map<CriterionId, HTMLInputElement>();
    for (const cid of CRITERIA) {
      const row = document.createElement("div");
      row.className = "slider-row";
      const label = document.createElement("label");
      label.textContent = cid;
      const input = document.createElement("input");
      input.type = "range";
      input.min = "0";
      input.max = String(SLIDER_MAX);
      input.step = "0.1";
      input.value = "0";
      const value = document.createElement("span");
      value.className = "slider-value";
      value.textContent = "0";
      const spark = document.createElement("canvas");
      spark.width = 90;
      spark.height = 22;
      spark.className = "sparkline";
      input.addEventListener("input", () => {
        const pos = Number(input.value);
        value.textContent = weightFromSlider(pos).toPrecision(3);
        state.weightController?.sliderChanged(cid, pos);
      });
      row.append(label, input, value, spark);
      panel.append(row);
      inputs.set(cid, input);
    }
    return inputs;
  }

  function mirrorSliders(): void {
    const wc = state.weightController;
    if (!wc) {
      return;
    }
    const weights = wc.weights;
    for (const cid of CRITERIA) {
      const input = sliderInputs.get(cid)!;
      const w = weights[cid] ?? 0;
      input.value = String(sliderFromWeight(w));
      const label = input.nextElementSibling as HTMLElement | null;
      if (label) {
        label.textContent = w.toPrecision(3);
      }
    }
  }

  function drawSparklines(): void {
    const rows = el<HTMLElement>("sliders").children;
    Array.from(rows).forEach((row, i) => {
      const cid = CRITERIA[i]!;
      const spark = row.querySelector("canvas");
      const sctx = spark?.getContext("2d");
      const history = state.histories.get(cid);
      if (spark && sctx && history) {
        drawSparkline(sctx, spark.width, spark.height, history);
      }
    });
  }

  function applySnapshot(snap: Snapshot): void {
    state.positions = snap.positions;
    for (const cid of CRITERIA) {
      const v = snap.losses[cid];
      if (v !== undefined) {
        let h = state.histories.get(cid);
        if (!h) {
          h = [];
          state.histories.set(cid, h);
        }
        pushHistory(h, v);
      }
    }
    el<HTMLElement>("iteration").textContent =
      `iteration ${snap.iteration}, total loss ${snap.total.toPrecision(5)}`;
  }

  function frame(): void {
    const snap = mailbox.take();
    if (snap) {
      applySnapshot(snap);
      drawSparklines();
    }
    if (state.positions.length > 0) {
      const { viewport } = renderer.render(
        state.positions,
        state.edges,
        state.frozenViewport ?? undefined,
      );
      state.lastViewport = viewport;
    }
    requestAnimationFrame(frame);
  }
  requestAnimationFrame(frame);

  // -- session lifecycle ----------------------------------------------------

  const familySelect = el<HTMLSelectElement>("family");
  for (const name of Object.keys(FAMILY_PARAMS)) {
    const opt = document.createElement("option");
    opt.value = name;
    opt.textContent = name;
    familySelect.append(opt);
  }
  familySelect.value = "grid";
  familySelect.addEventListener("change", () => {
    el<HTMLInputElement>("family-params").placeholder =
      FAMILY_PARAMS[familySelect.value]!.map((p) => `${p}=5`).join(", ") ||
      "(no parameters)";
  });

  el<HTMLInputElement>("graph-file").addEventListener("change", async (ev) => {
    const file = (ev.target as HTMLInputElement).files?.[0];
    if (!file) {
      state.uploadedGraph = null;
      return;
    }
    state.uploadedGraph = JSON.parse(await file.text()) as GraphObj;
    setStatus(`graph file loaded: ${file.name}`);
  });

  function parseFamilyParams(): Record<string, number> {
    const raw = el<HTMLInputElement>("family-params").value.trim();
    const params: Record<string, number> = {};
    if (!raw) {
      return params;
    }
    for (const part of raw.split(",")) {
      const [k, v] = part.split("=").map((s) => s.trim());
      if (!k || v === undefined || Number.isNaN(Number(v))) {
        throw new Error(`bad parameter ${part.trim()}`);
      }
      params[k] = Number(v);
    }
    return params;
  }

  async function createSession(): Promise<void> {
    if (state.session) {
      await deleteSession();
    }
    const body: CreateSessionBody = {
      weights: { ST: 1.0 },
      cadence: 5,
      config: { iters: 5000 },
    };
    if (state.uploadedGraph) {
      body.graph = state.uploadedGraph;
    } else {
      body.family = { family: familySelect.value, ...parseFamilyParams() };
    }
    const desc = await api.createSession(body);
    state.session = desc;
    state.edges = edgeIndices(desc.graph);
    state.positions = desc.positions;
    state.histories = new Map();
    state.weightController = new WeightController(api, desc.id, desc.weights, {
      onAck: () => mirrorSliders(),
      onRevert: (_, error) => {
        mirrorSliders();
        setStatus(`weight change rejected: ${String(error)}`);
      },
    });
    state.dragController = new DragController(
      api,
      desc.id,
      () => state.frozenViewport ?? state.lastViewport!,
      CANVAS_W,
      CANVAS_H,
    );
    mirrorSliders();
    setStatus(`session ${desc.id}: ${desc.status}`);
    const stream = await api.openStream(desc.id);
    state.streamDone = pumpSnapshots(stream, mailbox, (event) => {
      if (event.type === "end") {
        setStatus(`session ended: ${event.status}` +
          (event.error ? ` (${event.error})` : ""));
      }
    });
  }

  async function deleteSession(): Promise<void> {
    const sid = state.session?.id;
    if (!sid) {
      return;
    }
    state.session = null;
    state.weightController = null;
    state.dragController = null;
    try {
      await api.deleteSession(sid);
    } finally {
      await state.streamDone?.catch?.(() => {});
      state.streamDone = null;
      state.positions = [];
      state.edges = [];
      const { viewport } = renderer.render([], []);
      state.lastViewport = viewport;
      setStatus("no session");
    }
  }

  async function refreshFromServer(): Promise<void> {
    if (!state.session) {
      return;
    }
    const desc = await api.getSession(state.session.id);
    state.session = desc;
    state.positions = desc.positions;
    setStatus(`session ${desc.id}: ${desc.status}`);
  }

  el<HTMLButtonElement>("create").addEventListener("click", () => {
    createSession().catch((e) => setStatus(String(e)));
  });
  el<HTMLButtonElement>("pause").addEventListener("click", () => {
    if (state.session) {
      api.pause(state.session.id).then(
        () => setStatus("paused"),
        (e) => setStatus(String(e)),
      );
    }
  });
  el<HTMLButtonElement>("resume").addEventListener("click", () => {
    if (state.session) {
      api.resume(state.session.id).then(
        () => setStatus("running"),
        (e) => setStatus(String(e)),
      );
    }
  });
  el<HTMLButtonElement>("delete").addEventListener("click", () => {
    deleteSession().catch((e) => setStatus(String(e)));
  });
  el<HTMLButtonElement>("export-json").addEventListener("click", () => {
    if (state.positions.length > 0) {
      downloadText("layout.json", exportLayoutJson(state.positions));
    }
  });
  el<HTMLButtonElement>("export-svg").addEventListener("click", () => {
    if (state.positions.length > 0) {
      downloadText(
        "layout.svg",
        exportSvg(state.positions, state.edges),
        "image/svg+xml",
      );
    }
  });

  // -- dragging -------------------------------------------------------------

  canvas.addEventListener("pointerdown", (ev) => {
    const dc = state.dragController;
    if (!dc || !state.lastViewport || state.positions.length === 0) {
      return;
    }
    const rect = canvas.getBoundingClientRect();
    const px = ev.clientX - rect.left;
    const py = ev.clientY - rect.top;
    const node = nearestNode(state.positions, state.lastViewport, px, py);
    if (node !== null) {
      state.frozenViewport = state.lastViewport;
      dc.pointerDown(node);
      canvas.setPointerCapture(ev.pointerId);
    }
  });
  canvas.addEventListener("pointermove", (ev) => {
    const dc = state.dragController;
    if (!dc || dc.dragging === null) {
      return;
    }
    const rect = canvas.getBoundingClientRect();
    dc.pointerMove(ev.clientX - rect.left, ev.clientY - rect.top);
  });
  canvas.addEventListener("pointerup", (ev) => {
    const dc = state.dragController;
    if (!dc || dc.dragging === null) {
      return;
    }
    const rect = canvas.getBoundingClientRect();
    dc.pointerUp(ev.clientX - rect.left, ev.clientY - rect.top)
      .then(() => refreshFromServer())
      .catch((e) => setStatus(String(e)))
      .finally(() => {
        state.frozenViewport = null;
      });
  });
}

startApp();
