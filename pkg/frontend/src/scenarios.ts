/**
 * Scenario save/compare workflow: named runs, chart overlays, and the
 * differences table fetched from the comparison endpoint.
 */

import { ApiClient, CompareDocument, ScenarioListEntry } from './api.js';

export class ScenarioPanel {
  selected = new Set<string>();
  private listElement: HTMLElement | null = null;
  onSelectionChange: (names: string[]) => void = () => undefined;

  constructor(private api: ApiClient) {}

  render(root: HTMLElement): void {
    root.innerHTML = `
      <h2>Saved scenarios</h2>
      <ul id="scenario-list" class="scenario-list"></ul>
      <div id="differences-wrap" style="display:none">
        <h3>Differences</h3>
        <table id="differences-table"><thead></thead><tbody></tbody></table>
      </div>`;
    this.listElement = root.querySelector('#scenario-list');
  }

  async refresh(): Promise<ScenarioListEntry[]> {
    const entries = await this.api.listScenarios();
    const list = this.listElement!;
    list.innerHTML = '';
    for (const entry of entries) {
      const item = document.createElement('li');
      const box = document.createElement('input');
      box.type = 'checkbox';
      box.dataset.scenario = entry.name;
      box.checked = this.selected.has(entry.name);
      box.addEventListener('change', () => {
        if (box.checked) this.selected.add(entry.name);
        else this.selected.delete(entry.name);
        this.onSelectionChange([...this.selected]);
      });
      const label = document.createElement('label');
      label.appendChild(box);
      label.appendChild(
        document.createTextNode(
          ` ${entry.name} [${entry.mode}] final f=${entry.summary.final_f.toFixed(3)}`,
        ),
      );
      item.appendChild(label);
      list.appendChild(item);
    }
    return entries;
  }

  /** Render the differences table; hidden unless 2+ scenarios are selected. */
  async renderDifferences(root: HTMLElement, names: string[]): Promise<void> {
    const wrap = root.querySelector<HTMLElement>('#differences-wrap')!;
    if (names.length < 2) {
      wrap.style.display = 'none';
      return;
    }
    const doc = await this.api.compare(names);
    wrap.style.display = '';
    const table = root.querySelector<HTMLTableElement>('#differences-table')!;
    renderCompareTable(table, doc, ['Y', 'f', 'growth']);
  }
}

export function renderCompareTable(
  table: HTMLTableElement,
  doc: CompareDocument,
  seriesFilter: string[],
): void {
  const keep = doc.columns
    .map((c, i) => [c, i] as const)
    .filter(
      ([c]) =>
        c === 'year' ||
        seriesFilter.some((s) => c.startsWith(`${s}[`) || c.startsWith(`d(${s})`)),
    );
  const thead = table.querySelector('thead')!;
  const tbody = table.querySelector('tbody')!;
  thead.innerHTML = '';
  tbody.innerHTML = '';
  const headRow = document.createElement('tr');
  for (const [name] of keep) {
    const th = document.createElement('th');
    th.textContent = name;
    headRow.appendChild(th);
  }
  thead.appendChild(headRow);
  for (const row of doc.rows) {
    const tr = document.createElement('tr');
    for (const [, i] of keep) {
      const td = document.createElement('td');
      const x = row[i];
      td.textContent = Number.isFinite(x) ? x.toPrecision(5) : String(x);
      tr.appendChild(td);
    }
    tbody.appendChild(tr);
  }
}
