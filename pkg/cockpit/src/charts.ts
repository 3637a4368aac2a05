/** SVG chart builders (pure string functions, no DOM needed).
 *
 * The sweep chart reads the same results.csv the CLI writes: four series
 * over team size with the effort-minimizing size highlighted.
 */

import { numericColumn, parseCsv } from "./csv.js";

export interface SweepSeries {
  teamSizes: number[];
  found: number[];
  missed: number[];
  effort: number[];
  duration: number[];
}

export function sweepSeriesFromCsv(text: string): SweepSeries {
  const table = parseCsv(text);
  return {
    teamSizes: numericColumn(table, "team_size"),
    found: numericColumn(table, "defects_found"),
    missed: numericColumn(table, "defects_missed"),
    effort: numericColumn(table, "total_effort"),
    duration: numericColumn(table, "duration"),
  };
}

export function argminIndex(values: number[]): number {
  if (values.length === 0) {
    throw new Error("argmin of empty series");
  }
  let best = 0;
  values.forEach((value, index) => {
    if (value < (values[best] as number)) {
      best = index;
    }
  });
  return best;
}

const WIDTH = 640;
const HEIGHT = 360;
const MARGIN = { top: 24, right: 16, bottom: 32, left: 44 };

interface Scale {
  (value: number): number;
}

function linearScale(domainLo: number, domainHi: number, rangeLo: number, rangeHi: number): Scale {
  const span = domainHi - domainLo || 1;
  return (value) => rangeLo + ((value - domainLo) / span) * (rangeHi - rangeLo);
}

function polyline(xs: number[], ys: number[], x: Scale, y: Scale, color: string, name: string): string {
  const points = xs.map((vx, i) => `${x(vx).toFixed(1)},${y(ys[i] as number).toFixed(1)}`).join(" ");
  return `<polyline class="series" data-series="${name}" fill="none" stroke="${color}" stroke-width="2" points="${points}"/>`;
}

const SERIES_COLORS: Record<string, string> = {
  found: "#2a7de1",
  missed: "#c0392b",
  effort: "#1e8e3e",
  duration: "#8e44ad",
};

/** Each series is normalized to its own [0,1] so all four shapes share one
 * plot, matching how the published figure overlays them. */
export function renderSweepChart(series: SweepSeries): string {
  const { teamSizes } = series;
  if (teamSizes.length === 0) {
    return '<svg class="sweep empty"><text x="10" y="20">no sweep data</text></svg>';
  }
  const x = linearScale(
    Math.min(...teamSizes),
    Math.max(...teamSizes),
    MARGIN.left,
    WIDTH - MARGIN.right,
  );
  const parts: string[] = [
    `<svg class="sweep" viewBox="0 0 ${WIDTH} ${HEIGHT}" xmlns="http://www.w3.org/2000/svg">`,
  ];
  for (const size of teamSizes) {
    const px = x(size).toFixed(1);
    parts.push(
      `<line x1="${px}" y1="${MARGIN.top}" x2="${px}" y2="${HEIGHT - MARGIN.bottom}" stroke="#eee"/>`,
      `<text x="${px}" y="${HEIGHT - 12}" text-anchor="middle" font-size="11">${size}</text>`,
    );
  }
  const normalized: Array<[keyof typeof SERIES_COLORS, number[]]> = [
    ["found", series.found],
    ["missed", series.missed],
    ["effort", series.effort],
    ["duration", series.duration],
  ];
  for (const [name, values] of normalized) {
    const y = linearScale(
      Math.min(...values),
      Math.max(...values),
      HEIGHT - MARGIN.bottom,
      MARGIN.top,
    );
    parts.push(polyline(teamSizes, values, x, y, SERIES_COLORS[name] as string, name));
    const lastY = y(values[values.length - 1] as number);
    parts.push(
      `<text x="${WIDTH - MARGIN.right + 2}" y="${lastY.toFixed(1)}" font-size="11" fill="${SERIES_COLORS[name]}">${name}</text>`,
    );
  }
  const best = argminIndex(series.effort);
  const bestSize = teamSizes[best] as number;
  const effortScale = linearScale(
    Math.min(...series.effort),
    Math.max(...series.effort),
    HEIGHT - MARGIN.bottom,
    MARGIN.top,
  );
  parts.push(
    `<circle class="argmin" data-team-size="${bestSize}" cx="${x(bestSize).toFixed(1)}" ` +
      `cy="${effortScale(series.effort[best] as number).toFixed(1)}" r="6" fill="none" ` +
      `stroke="#1e8e3e" stroke-width="2.5"/>`,
    `<text x="${x(bestSize).toFixed(1)}" y="${MARGIN.top - 8}" text-anchor="middle" font-size="12">` +
      `best effort at ${bestSize} inspectors</text>`,
  );
  parts.push("</svg>");
  return parts.join("");
}

export function renderBarChart(labels: string[], values: number[], title: string): string {
  if (labels.length !== values.length) {
    throw new Error("labels and values differ in length");
  }
  const peak = Math.max(...values, 0) || 1;
  const barWidth = (WIDTH - MARGIN.left - MARGIN.right) / Math.max(labels.length, 1);
  const parts = [
    `<svg class="bars" viewBox="0 0 ${WIDTH} ${HEIGHT}" xmlns="http://www.w3.org/2000/svg">`,
    `<text x="${MARGIN.left}" y="16" font-size="13">${title}</text>`,
  ];
  values.forEach((value, index) => {
    const height = ((HEIGHT - MARGIN.top - MARGIN.bottom) * value) / peak;
    const xPos = MARGIN.left + index * barWidth;
    const yPos = HEIGHT - MARGIN.bottom - height;
    parts.push(
      `<rect data-label="${labels[index]}" x="${(xPos + 4).toFixed(1)}" y="${yPos.toFixed(1)}" ` +
        `width="${(barWidth - 8).toFixed(1)}" height="${height.toFixed(1)}" fill="#2a7de1"/>`,
      `<text x="${(xPos + barWidth / 2).toFixed(1)}" y="${HEIGHT - 12}" text-anchor="middle" ` +
        `font-size="10">${labels[index]}</text>`,
      `<text x="${(xPos + barWidth / 2).toFixed(1)}" y="${(yPos - 4).toFixed(1)}" ` +
        `text-anchor="middle" font-size="10">${value.toFixed(0)}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("");
}
