/**
 * Instructor dashboard: category table, per-student fraction box plots,
 * usage-vs-performance scatter, and a query browser with a label editor.
 * All numbers come precomputed from the analytics report.
 */

import {
  CATEGORY_VALUES,
  CategoryRow,
  LogRecord,
  Report,
  fetchQueries,
  postLabel,
} from "./api.js";
import { boxPlot, scatterPlot } from "./charts.js";

const ROW_LABELS: Record<string, string> = {
  debugging: "Debugging (all)",
  implementation: "Implementation",
  understanding: "Understanding",
  nothing: "Nothing",
  "debugging:error_only": "Including error",
  "debugging:outcome_only": "Including outcome",
  "debugging:error_and_outcome": "Including error & outcome",
  short_issue: "Empty or short issue",
  copied: "Copied from exercise",
};

export interface DashboardHandlers {
  /** Called after a label is stored so the host can refresh the report. */
  onLabelStored?: () => void;
}

function categoryTable(rows: CategoryRow[], subRows: CategoryRow[]): HTMLTableElement {
  const table = document.createElement("table");
  table.className = "category-table";
  const head = table.createTHead().insertRow();
  for (const column of ["Category", "Count", "Percent", "Kappa"]) {
    const th = document.createElement("th");
    th.textContent = column;
    head.append(th);
  }
  const body = table.createTBody();
  const addRow = (row: CategoryRow, indent: boolean) => {
    const tr = body.insertRow();
    tr.insertCell().textContent =
      (indent ? " " : "") + (ROW_LABELS[row.category] ?? row.category);
    tr.insertCell().textContent = String(row.count);
    tr.insertCell().textContent = `${Math.round(row.percent)}%`;
    tr.insertCell().textContent =
      row.kappa === null ? "-" : row.kappa.toFixed(2);
  };
  rows.forEach((row) => {
    addRow(row, false);
    if (row.category === "debugging") {
      subRows.forEach((sub) => addRow(sub, true));
    }
  });
  return table;
}

function fractionBoxPlots(report: Report): SVGSVGElement {
  const fractions = report.per_user_fractions ?? {};
  const keys = [
    "debugging",
    "implementation",
    "understanding",
    "nothing",
    "short_issue",
    "copied",
  ];
  const series = keys.map((key) => ({
    label: ROW_LABELS[key] ?? key,
    values: Object.values(fractions)
      .map((f) => f[key])
      .filter((v): v is number => v !== undefined),
  }));
  return boxPlot(series);
}

async function queryBrowser(
  handlers: DashboardHandlers,
): Promise<HTMLElement> {
  const section = document.createElement("section");
  section.className = "query-browser";
  const heading = document.createElement("h3");
  heading.textContent = "Query log";
  section.append(heading);
  let page;
  try {
    page = await fetchQueries({ limit: 25 });
  } catch {
    const note = document.createElement("p");
    note.textContent = "Query log unavailable.";
    section.append(note);
    return section;
  }
  const list = document.createElement("ol");
  for (const record of page.records) {
    list.append(queryRow(record, handlers));
  }
  section.append(list);
  return section;
}

function queryRow(record: LogRecord, handlers: DashboardHandlers): HTMLLIElement {
  const item = document.createElement("li");
  item.className = "query-row";
  const summary = document.createElement("p");
  summary.textContent =
    `${record.user_id} @ ${record.timestamp}: ` +
    (record.issue || "(no issue text)");
  const select = document.createElement("select");
  select.className = "label-editor";
  const placeholder = document.createElement("option");
  placeholder.value = "";
  placeholder.textContent = "label…";
  select.append(placeholder);
  for (const value of CATEGORY_VALUES) {
    const option = document.createElement("option");
    option.value = value;
    option.textContent = value;
    select.append(option);
  }
  const status = document.createElement("span");
  status.className = "label-status";
  select.addEventListener("change", async () => {
    if (!select.value) return;
    try {
      await postLabel(record.id, "instructor", select.value);
      status.textContent = "stored";
      handlers.onLabelStored?.();
    } catch (err) {
      status.textContent = err instanceof Error ? err.message : "failed";
    }
  });
  item.append(summary, select, status);
  return item;
}

export async function renderDashboard(
  container: HTMLElement,
  report: Report,
  handlers: DashboardHandlers = {},
): Promise<void> {
  container.replaceChildren();

  const overview = document.createElement("p");
  overview.className = "overview";
  overview.textContent =
    `${report.queries.total} queries from ${report.queries.users} students; ` +
    `${report.dedup.duplicates_removed} duplicates removed, ` +
    `${report.dedup.kept} analyzed. ` +
    `Composite usage alpha ${report.composite.cronbach_alpha.toFixed(2)}.`;
  container.append(overview);

  if (report.categories) {
    const section = document.createElement("section");
    section.className = "categories";
    const heading = document.createElement("h3");
    heading.textContent = "Query categories";
    section.append(
      heading,
      categoryTable(report.categories.rows, report.categories.debugging_subcategories),
    );
    container.append(section);

    const plots = document.createElement("section");
    plots.className = "fractions";
    const plotHeading = document.createElement("h3");
    plotHeading.textContent = "Per-student query fractions";
    plots.append(plotHeading, fractionBoxPlots(report));
    container.append(plots);
  }

  const scatterSection = document.createElement("section");
  scatterSection.className = "usage-performance";
  const scatterHeading = document.createElement("h3");
  scatterHeading.textContent = "Usage vs. course performance";
  scatterSection.append(scatterHeading);
  if (report.correlation) {
    const stats = document.createElement("p");
    stats.textContent =
      `r = ${report.correlation.r.toFixed(2)}, ` +
      `p = ${report.correlation.p_two_tailed.toFixed(4)}, ` +
      `n = ${report.correlation.n}`;
    scatterSection.append(
      stats,
      scatterPlot(
        report.correlation.scatter.map((p) => ({
          x: p.usage,
          y: p.performance,
          label: p.user_id,
        })),
      ),
    );
  } else {
    const prompt = document.createElement("p");
    prompt.className = "upload-prompt";
    prompt.textContent =
      "No performance data yet. Place performance.csv in the service data " +
      "directory to see the usage-performance association.";
    scatterSection.append(prompt);
  }
  container.append(scatterSection);

  container.append(await queryBrowser(handlers));
}
