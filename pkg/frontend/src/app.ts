/**
 * Single-page sandbox: edit parameters, launch solves, watch progress,
 * and compare saved scenarios side by side.
 */

import { ApiClient, ProgressRecord, SolveMode, TrajectoryDocument, ValidationError } from './api.js';
import { CHART_PANELS, LineChart, Series } from './charts.js';
import { ParameterControls } from './controls.js';
import { ScenarioPanel } from './scenarios.js';

export class SandboxApp {
  readonly api: ApiClient;
  controls!: ParameterControls;
  charts = new Map<string, LineChart>();
  scenarioPanel: ScenarioPanel;
  currentJobId: string | null = null;
  lastTrajectory: TrajectoryDocument | null = null;
  progressValues: number[] = [];

  constructor(private root: HTMLElement, baseUrl: string) {
    this.api = new ApiClient(baseUrl);
    this.scenarioPanel = new ScenarioPanel(this.api);
  }

  async start(): Promise<void> {
    this.root.innerHTML = `
      <header><h1>AI & growth scenario sandbox</h1>
        <div id="service-banner" class="banner" style="display:none"></div>
      </header>
      <main class="layout">
        <section id="controls-pane">
          <div id="controls"></div>
          <div class="run-bar">
            <select id="mode-select">
              <option value="deterministic">deterministic</option>
              <option value="externality">externality wedge</option>
              <option value="uncertainty">uncertainty</option>
            </select>
            <button id="run-button">Run</button>
            <input id="scenario-name" placeholder="scenario name" />
            <button id="save-button" disabled>Save as scenario</button>
          </div>
          <div id="progress-pane" style="display:none">
            <div id="progress-text"></div>
            <svg id="progress-sparkline" viewBox="0 0 200 40"></svg>
          </div>
          <div id="job-error" class="banner" style="display:none"></div>
        </section>
        <section id="charts-pane" class="charts-grid"></section>
        <aside id="scenario-pane"></aside>
      </main>`;

    let schema;
    try {
      schema = await this.api.schema();
    } catch (err) {
      this.banner(`service unreachable: ${err}`);
      throw err;
    }
    this.controls = new ParameterControls(schema);
    this.controls.render(this.query('#controls'));
    this.controls.onChange = () => this.refreshRunButton();

    const chartsPane = this.query('#charts-pane');
    for (const spec of CHART_PANELS) {
      const chart = new LineChart(spec);
      chartsPane.appendChild(chart.element);
      this.charts.set(spec.id, chart);
    }

    this.scenarioPanel.render(this.query('#scenario-pane'));
    this.scenarioPanel.onSelectionChange = (names) => void this.overlay(names);
    await this.scenarioPanel.refresh();

    this.query<HTMLButtonElement>('#run-button').addEventListener('click', () =>
      void this.run(),
    );
    this.query<HTMLButtonElement>('#save-button').addEventListener('click', () =>
      void this.saveScenario(),
    );
  }

  query<T extends HTMLElement = HTMLElement>(selector: string): T {
    const el = this.root.querySelector<T>(selector);
    if (!el) throw new Error(`missing element ${selector}`);
    return el;
  }

  private banner(message: string): void {
    const el = this.query('#service-banner');
    el.textContent = message;
    el.style.display = '';
  }

  private refreshRunButton(): void {
    this.query<HTMLButtonElement>('#run-button').disabled =
      this.controls.hasBlockingWarnings();
  }

  get mode(): SolveMode {
    return this.query<HTMLSelectElement>('#mode-select').value as SolveMode;
  }

  async run(): Promise<void> {
    const errorPane = this.query('#job-error');
    errorPane.style.display = 'none';
    const config = this.controls.deltaDocument();
    let submitted;
    try {
      submitted = await this.api.submitSolve(config, this.mode);
    } catch (err) {
      if (err instanceof ValidationError) {
        for (const violation of err.violations) {
          this.markControlInvalid(violation.field, violation.message);
        }
        this.refreshRunButton();
        return;
      }
      this.banner(String(err));
      return;
    }
    this.currentJobId = submitted.job_id;
    this.progressValues = [];
    this.query('#progress-pane').style.display = '';

    const streaming = this.api.streamProgress(submitted.job_id, (r) =>
      this.showProgress(r),
    );
    const status = await this.api.waitForJob(submitted.job_id);
    await streaming.catch(() => undefined);
    if (status.status === 'failed') {
      errorPane.textContent = status.error ?? 'job failed';
      errorPane.style.display = '';
      return;
    }
    this.lastTrajectory = await this.api.trajectory(submitted.job_id);
    this.renderTrajectory(this.lastTrajectory);
    this.query<HTMLButtonElement>('#save-button').disabled = false;
  }

  private markControlInvalid(field: string, message: string): void {
    const row = this.root.querySelector<HTMLElement>(
      `[data-param="${field}"] .range-warning`,
    );
    if (row) {
      row.textContent = message;
      row.style.display = '';
    } else {
      this.banner(`${field}: ${message}`);
    }
  }

  showProgress(record: ProgressRecord): void {
    this.progressValues.push(record.value);
    this.query('#progress-text').textContent =
      `iteration ${record.iteration}  V=${record.value.toPrecision(8)}  ` +
      `|grad|=${record.grad_norm.toExponential(2)}`;
    const svg = this.query<HTMLElement>('#progress-sparkline');
    const values = this.progressValues;
    const lo = Math.min(...values);
    const hi = Math.max(...values);
    const span = hi - lo || 1;
    const points = values
      .map((v, i) => {
        const x = (i / Math.max(values.length - 1, 1)) * 198 + 1;
        const y = 39 - ((v - lo) / span) * 38;
        return `${x.toFixed(1)},${y.toFixed(1)}`;
      })
      .join('L');
    svg.innerHTML = `<path d="M${points}" fill="none" stroke="#2563eb"/>`;
  }

  renderTrajectory(doc: TrajectoryDocument): void {
    const years = (n: number) => Array.from({ length: n }, (_, i) => i);
    const perScenario = (name: string, dashed = false): Series[] =>
      doc.scenarios.map((sc) => ({
        label: `${name} s${sc.scenario_id}`,
        years: years(sc.series[name].length),
        values: sc.series[name],
        weight: doc.scenarios.length > 1 ? 0.35 + 0.65 * sc.prob : 1,
        colorIndex: 0,
        dashed,
      }));
    this.charts.get('output')!.render(perScenario('Y'));
    this.charts.get('growth')!.render(perScenario('growth'));
    this.charts.get('automation')!.render(perScenario('f'));
    this.charts.get('compute')!.render([
      ...perScenario('C'),
      ...perScenario('CT', true),
    ]);
    this.charts.get('shares')!.render(
      ['share_consumption', 'share_capital', 'share_compute',
       'share_hardware_rd', 'share_software_rd'].flatMap((name, i) =>
        doc.scenarios.map((sc) => ({
          label: name,
          years: years(sc.series[name].length),
          values: sc.series[name],
          colorIndex: i,
          weight: doc.scenarios.length > 1 ? 0.35 + 0.65 * sc.prob : 1,
        })),
      ),
    );
    this.charts.get('efficiency')!.render([
      ...doc.scenarios.map((sc) => ({
        label: 'H',
        years: years(sc.series['H'].length),
        values: sc.series['H'],
        colorIndex: 0,
      })),
      ...doc.scenarios.map((sc) => ({
        label: 'S',
        years: years(sc.series['S'].length),
        values: sc.series['S'],
        colorIndex: 1,
        dashed: true,
      })),
    ]);
  }

  async saveScenario(): Promise<void> {
    if (!this.currentJobId) return;
    const name = this.query<HTMLInputElement>('#scenario-name').value.trim();
    if (!name) return;
    try {
      await this.api.saveScenario(name, this.currentJobId);
    } catch (err) {
      const overwrite = `${name}-${Date.now() % 10000}`;
      this.banner(`${err}; saved as ${overwrite}`);
      await this.api.saveScenario(overwrite, this.currentJobId);
    }
    await this.scenarioPanel.refresh();
  }

  /** Overlay the selected scenarios' series and refresh the differences table. */
  async overlay(names: string[]): Promise<void> {
    if (names.length < 2) {
      await this.scenarioPanel.renderDifferences(this.query('#scenario-pane'), names);
      return;
    }
    const fetched = await Promise.all(
      names.map((n) => this.api.scenarioTrajectory(n)),
    );
    const overlaySeries = (key: string): Series[] =>
      fetched.flatMap((doc, i) =>
        doc.scenarios.map((sc) => ({
          label: `${doc.name}`,
          years: sc.series['year'],
          values: sc.series[key],
          colorIndex: i,
        })),
      );
    this.charts.get('output')!.render(overlaySeries('Y'));
    this.charts.get('growth')!.render(overlaySeries('growth'));
    this.charts.get('automation')!.render(overlaySeries('f'));
    this.charts.get('compute')!.render(overlaySeries('C'));
    this.charts.get('efficiency')!.render([
      ...overlaySeries('H'),
      ...overlaySeries('S').map((s) => ({ ...s, dashed: true })),
    ]);
    await this.scenarioPanel.renderDifferences(this.query('#scenario-pane'), names);
  }
}

export async function mount(root: HTMLElement, baseUrl?: string): Promise<SandboxApp> {
  const app = new SandboxApp(
    root,
    baseUrl ?? `${location.protocol}//${location.host}`,
  );
  await app.start();
  return app;
}
