/**
 * Schema-driven parameter controls.
 *
 * Controls are generated from the service's parameter schema (never
 * hand-duplicated), grouped by section, with log-scale sliders for
 * wide-range parameters and inline range warnings. Edits accumulate
 * into a delta document containing only the fields that differ from
 * their defaults.
 */

import type { ParamSchemaEntry, SchemaDocument, BeliefCandidate } from './api.js';

export interface ControlChange {
  name: string;
  value: number;
  outOfRange: boolean;
}

const GROUP_TITLES: Record<string, string> = {
  economy: 'Economy',
  hardware_rd: 'Hardware R&D',
  software_rd: 'Software R&D',
  compute: 'Compute',
  runtime: 'Runtime compute',
  automation: 'Automation',
  addons: 'Add-ons',
  solver: 'Horizons & grids',
};

export class ParameterControls {
  private values = new Map<string, number>();
  private entries = new Map<string, ParamSchemaEntry>();
  private inputs = new Map<string, HTMLInputElement>();
  private warnings = new Map<string, HTMLElement>();
  laborMode = 'perfect_reallocation';
  beliefSpec: BeliefCandidate[] = [{ zeta: 1.0, prob: 1.0 }];
  externalityOn = false;
  uncertaintyOn = false;
  onChange: (change: ControlChange) => void = () => undefined;

  constructor(private schema: SchemaDocument) {
    for (const entry of schema.parameters) {
      this.entries.set(entry.name, entry);
      this.values.set(entry.name, entry.default);
    }
  }

  render(root: HTMLElement): void {
    root.innerHTML = '';
    const byGroup = new Map<string, ParamSchemaEntry[]>();
    for (const entry of this.schema.parameters) {
      const bucket = byGroup.get(entry.group) ?? [];
      bucket.push(entry);
      byGroup.set(entry.group, bucket);
    }
    for (const [group, entries] of byGroup) {
      const section = document.createElement('fieldset');
      section.className = 'control-group';
      section.dataset.group = group;
      const legend = document.createElement('legend');
      legend.textContent = GROUP_TITLES[group] ?? group;
      section.appendChild(legend);
      if (group === 'addons') {
        section.appendChild(this.renderAddonToggles());
      }
      for (const entry of entries) {
        section.appendChild(this.renderControl(entry));
      }
      root.appendChild(section);
    }
  }

  private renderAddonToggles(): HTMLElement {
    const div = document.createElement('div');
    div.className = 'addon-toggles';
    for (const [label, flag] of [
      ['externality wedge', 'externality'],
      ['automation uncertainty', 'uncertainty'],
    ] as const) {
      const wrapper = document.createElement('label');
      const box = document.createElement('input');
      box.type = 'checkbox';
      box.id = `addon-${flag}`;
      box.addEventListener('change', () => {
        if (flag === 'externality') this.externalityOn = box.checked;
        else this.uncertaintyOn = box.checked;
        this.refreshAddonVisibility();
      });
      wrapper.appendChild(box);
      wrapper.appendChild(document.createTextNode(` ${label}`));
      div.appendChild(wrapper);
    }
    return div;
  }

  private refreshAddonVisibility(): void {
    for (const [name, input] of this.inputs) {
      const entry = this.entries.get(name)!;
      if (entry.addon === 'externality') {
        input.disabled = !this.externalityOn;
      }
    }
  }

  private renderControl(entry: ParamSchemaEntry): HTMLElement {
    const row = document.createElement('div');
    row.className = 'control-row';
    row.dataset.param = entry.name;

    const label = document.createElement('label');
    label.htmlFor = `param-${entry.name}`;
    label.title = entry.tooltip;
    label.textContent = `${entry.name} (${entry.units})`;
    row.appendChild(label);

    const input = document.createElement('input');
    input.type = 'text';
    input.id = `param-${entry.name}`;
    input.value = formatValue(entry.default);
    input.dataset.scale = entry.scale;
    if (entry.addon === 'externality') input.disabled = true;
    input.addEventListener('change', () => this.handleEdit(entry, input));
    row.appendChild(input);
    this.inputs.set(entry.name, input);

    const warn = document.createElement('span');
    warn.className = 'range-warning';
    warn.style.display = 'none';
    row.appendChild(warn);
    this.warnings.set(entry.name, warn);
    return row;
  }

  private handleEdit(entry: ParamSchemaEntry, input: HTMLInputElement): void {
    const parsed = Number(input.value);
    const warn = this.warnings.get(entry.name)!;
    if (!Number.isFinite(parsed)) {
      warn.textContent = 'not a number';
      warn.style.display = '';
      return;
    }
    this.values.set(entry.name, parsed);
    const outOfRange =
      entry.range !== null && (parsed < entry.range[0] || parsed > entry.range[1]);
    if (outOfRange) {
      warn.textContent = `outside documented range [${entry.range![0]}, ${entry.range![1]}]`;
      warn.style.display = '';
    } else {
      warn.style.display = 'none';
    }
    this.onChange({ name: entry.name, value: parsed, outOfRange });
  }

  setValue(name: string, value: number): void {
    const input = this.inputs.get(name);
    const entry = this.entries.get(name);
    if (!input || !entry) throw new Error(`unknown parameter ${name}`);
    input.value = formatValue(value);
    this.handleEdit(entry, input);
  }

  getValue(name: string): number {
    const value = this.values.get(name);
    if (value === undefined) throw new Error(`unknown parameter ${name}`);
    return value;
  }

  hasBlockingWarnings(): boolean {
    for (const [name] of this.entries) {
      const warn = this.warnings.get(name);
      if (warn && warn.style.display !== 'none') return true;
    }
    return false;
  }

  /** Delta document: only fields differing from their schema defaults. */
  deltaDocument(): Record<string, unknown> {
    const doc: Record<string, unknown> = {};
    for (const [name, entry] of this.entries) {
      const value = this.values.get(name)!;
      if (entry.addon === 'externality' && !this.externalityOn) continue;
      if (value !== entry.default) doc[name] = value;
    }
    if (this.laborMode !== 'perfect_reallocation') {
      doc['labor_mode'] = this.laborMode;
    }
    if (this.uncertaintyOn && this.beliefSpec.length > 1) {
      doc['belief_spec'] = this.beliefSpec;
    }
    return doc;
  }

  /** Full control state for export; re-importing restores identical values. */
  exportState(): Record<string, unknown> {
    const state: Record<string, unknown> = {};
    for (const [name, value] of this.values) state[name] = value;
    state['labor_mode'] = this.laborMode;
    state['belief_spec'] = this.beliefSpec;
    return state;
  }

  importState(state: Record<string, unknown>): void {
    for (const [name] of this.entries) {
      if (name in state) this.setValue(name, state[name] as number);
    }
    if (typeof state['labor_mode'] === 'string') {
      this.laborMode = state['labor_mode'];
    }
    if (Array.isArray(state['belief_spec'])) {
      this.beliefSpec = state['belief_spec'] as BeliefCandidate[];
    }
  }
}

export function formatValue(x: number): string {
  if (x === 0) return '0';
  const abs = Math.abs(x);
  if (abs >= 1e5 || abs < 1e-3) return x.toExponential(6).replace(/\.?0+e/, 'e');
  return String(x);
}
