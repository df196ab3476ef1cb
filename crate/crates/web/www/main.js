// Built by `wasm-bindgen --target web --out-dir www/pkg` (see README).
import init, { prevalence_view, roc_view } from "./pkg/assay_web.js";

const $ = (id) => document.getElementById(id);
const pct = (v, digits = 0) => (v === null || v === undefined ? "undefined" : `${(v * 100).toFixed(digits)}%`);

let lastRoc = null;

function rows(table, entries) {
  table.innerHTML = entries
    .map(([k, v]) => `<tr><td>${k}</td><td class="v">${v}</td></tr>`)
    .join("");
}

function updatePrevalence() {
  const sens = Number($("sens").value);
  const spec = Number($("spec").value);
  const prev = Number($("prev").value);
  $("sens-out").textContent = pct(sens, 1);
  $("spec-out").textContent = pct(spec, 1);
  $("prev-out").textContent = pct(prev, 1);
  const useCosts = $("use-costs").checked;
  const fa = useCosts ? Number($("cost-fa").value) : undefined;
  const md = useCosts ? Number($("cost-md").value) : undefined;
  try {
    const view = JSON.parse(prevalence_view(sens, spec, prev, fa, md));
    $("prev-plot").innerHTML = view.svg;
    const h = view.headline;
    const entries = [
      ["PPV", pct(h.ppv)],
      ["NPV", pct(h.npv, 1)],
      ["False alarms (of positives)", pct(h.false_alarm_rate)],
      ["Missed cases (of negatives)", pct(h.missed_case_rate, 1)],
      ["Tests per detected case", h.tests_per_detected_case === null ? "undefined" : h.tests_per_detected_case.toFixed(0)],
      ["Breakeven prevalence", pct(view.narrative.breakeven_prevalence, 1)],
    ];
    if (h.expected_cost !== null) entries.push(["Expected cost / person", h.expected_cost.toFixed(3)]);
    rows($("headline"), entries);
    $("prev-error").textContent = "";
  } catch (e) {
    $("prev-error").textContent = String(e);
  }
}

// Box-Muller; the demo data need not be reproducible
function gaussian() {
  const u = 1 - Math.random();
  const v = Math.random();
  return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
}

function simulate() {
  const d = Number($("dprime").value);
  const lines = ["score,label"];
  for (let i = 0; i < 60; i++) lines.push(`${(d + gaussian()).toFixed(3)},1`);
  for (let i = 0; i < 60; i++) lines.push(`${gaussian().toFixed(3)},0`);
  $("csv").value = lines.join("\n");
  analyze();
}

function analyze() {
  try {
    const view = JSON.parse(roc_view($("csv").value, $("pos-label").value, $("invert").checked));
    lastRoc = view;
    $("roc-plot").innerHTML = view.svg;
    const ci = view.auc_ci ? `${view.auc_ci.lower.toFixed(3)} to ${view.auc_ci.upper.toFixed(3)}` : "n/a";
    rows($("roc-stats"), [
      ["Samples", `${view.n_diseased} diseased, ${view.n_healthy} healthy`],
      ["AUC", view.auc.toFixed(3)],
      ["95% CI (DeLong)", ci],
      ["Youden cutoff", view.youden_threshold === null ? "none" : `score ≥ ${view.youden_threshold}`],
      ["Sensitivity / specificity", `${pct(view.youden_sensitivity, 1)} / ${pct(view.youden_specificity, 1)}`],
    ]);
    $("roc-error").textContent = "";
  } catch (e) {
    lastRoc = null;
    $("roc-error").textContent = String(e);
  }
}

function useYouden() {
  if (!lastRoc) return;
  $("sens").value = lastRoc.youden_sensitivity;
  $("spec").value = lastRoc.youden_specificity;
  updatePrevalence();
  $("prev-plot").scrollIntoView({ behavior: "smooth" });
}

await init();
for (const id of ["sens", "spec", "prev", "use-costs", "cost-fa", "cost-md"]) {
  $(id).addEventListener("input", updatePrevalence);
}
$("dprime").addEventListener("input", () => ($("dprime-out").textContent = $("dprime").value));
$("dprime-out").textContent = $("dprime").value;
$("simulate").addEventListener("click", simulate);
$("analyze").addEventListener("click", analyze);
$("use-youden").addEventListener("click", useYouden);
updatePrevalence();
simulate();
