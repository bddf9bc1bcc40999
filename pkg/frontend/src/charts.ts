/**
 * Dependency-free SVG charts for the instructor dashboard. The charts only
 * lay out numbers the API already computed.
 */

const SVG_NS = "http://www.w3.org/2000/svg";

function svgElement<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

export interface BoxStats {
  low: number;
  q1: number;
  median: number;
  q3: number;
  high: number;
}

/** Quartiles by linear interpolation; whiskers at 1.5 IQR, clamped to data. */
export function boxStats(values: number[]): BoxStats {
  const sorted = [...values].sort((a, b) => a - b);
  const quantile = (q: number) => {
    const pos = (sorted.length - 1) * q;
    const base = Math.floor(pos);
    const rest = pos - base;
    return base + 1 < sorted.length
      ? sorted[base] + rest * (sorted[base + 1] - sorted[base])
      : sorted[base];
  };
  const q1 = quantile(0.25);
  const median = quantile(0.5);
  const q3 = quantile(0.75);
  const iqr = q3 - q1;
  const low = Math.min(
    ...sorted.filter((v) => v >= q1 - 1.5 * iqr),
  );
  const high = Math.max(
    ...sorted.filter((v) => v <= q3 + 1.5 * iqr),
  );
  return { low, q1, median, q3, high };
}

/**
 * Horizontal box-and-whisker rows, one per named series, with one dot per
 * underlying point (fractions in [0, 1]).
 */
export function boxPlot(
  series: Array<{ label: string; values: number[] }>,
  width = 520,
  rowHeight = 34,
): SVGSVGElement {
  const left = 150;
  const plotWidth = width - left - 20;
  const svg = svgElement("svg", {
    width,
    height: rowHeight * series.length + 24,
    role: "img",
    class: "boxplot",
  });
  const x = (v: number) => left + v * plotWidth;
  series.forEach((row, i) => {
    const cy = 16 + i * rowHeight + rowHeight / 2;
    const label = svgElement("text", { x: 4, y: cy + 4, "font-size": 12 });
    label.textContent = row.label;
    svg.append(label);
    if (!row.values.length) return;
    const stats = boxStats(row.values);
    for (const v of row.values) {
      svg.append(
        svgElement("circle", {
          cx: x(v),
          cy,
          r: 2,
          class: "boxplot-point",
          opacity: 0.35,
        }),
      );
    }
    svg.append(
      svgElement("line", {
        x1: x(stats.low), x2: x(stats.q1), y1: cy, y2: cy,
        class: "whisker", stroke: "currentColor",
      }),
      svgElement("line", {
        x1: x(stats.q3), x2: x(stats.high), y1: cy, y2: cy,
        class: "whisker", stroke: "currentColor",
      }),
      svgElement("rect", {
        x: x(stats.q1), y: cy - 8,
        width: Math.max(1, x(stats.q3) - x(stats.q1)), height: 16,
        class: "box", fill: "none", stroke: "currentColor",
      }),
      svgElement("line", {
        x1: x(stats.median), x2: x(stats.median), y1: cy - 8, y2: cy + 8,
        class: "median", stroke: "red",
      }),
    );
  });
  return svg;
}

/** Scatter of (usage, performance) pairs; both axes are standardized. */
export function scatterPlot(
  points: Array<{ x: number; y: number; label: string }>,
  width = 460,
  height = 360,
): SVGSVGElement {
  const margin = 36;
  const svg = svgElement("svg", {
    width,
    height,
    role: "img",
    class: "scatter",
  });
  if (!points.length) return svg;
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const span = (values: number[]) => {
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    const pad = (hi - lo || 1) * 0.08;
    return [lo - pad, hi + pad];
  };
  const [x0, x1] = span(xs);
  const [y0, y1] = span(ys);
  const sx = (v: number) => margin + ((v - x0) / (x1 - x0)) * (width - 2 * margin);
  const sy = (v: number) =>
    height - margin - ((v - y0) / (y1 - y0)) * (height - 2 * margin);
  svg.append(
    svgElement("line", {
      x1: margin, x2: width - margin, y1: sy(0), y2: sy(0),
      stroke: "currentColor", opacity: 0.3,
    }),
    svgElement("line", {
      x1: sx(0), x2: sx(0), y1: margin, y2: height - margin,
      stroke: "currentColor", opacity: 0.3,
    }),
  );
  for (const p of points) {
    const dot = svgElement("circle", {
      cx: sx(p.x), cy: sy(p.y), r: 4,
      class: "scatter-point", opacity: 0.7,
    });
    const tooltip = svgElement("title", {});
    tooltip.textContent = `${p.label}: usage ${p.x.toFixed(2)}, performance ${p.y.toFixed(2)}`;
    dot.append(tooltip);
    svg.append(dot);
  }
  return svg;
}
