// DOM wiring for the console. The interesting logic lives in console.ts;
// this file only renders view models and forwards events to the gateway.

import { ApiClient, ApiError } from './api.js';
import {
  alertRows,
  anomalyRows,
  buildTree,
  composerPreview,
  describeDecision,
  policyRows,
  type ComposerPreview,
  type TreeView,
} from './console.js';

const POLL_MS = 2000;
const DEBOUNCE_MS = 300;

const api = new ApiClient(
  new URLSearchParams(location.search).get('gateway') ?? 'http://127.0.0.1:8000',
);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

function renderPreview(preview: ComposerPreview | null): void {
  const box = el<HTMLDivElement>('preview');
  clear(box);
  if (!preview) return;
  if (preview.status === 'parse-error') {
    const pre = document.createElement('pre');
    pre.className = 'error';
    pre.textContent = `${preview.errorMarker}\n${preview.errorDetail}`;
    box.appendChild(pre);
    return;
  }
  for (const program of preview.programs) {
    const head = document.createElement('div');
    head.className = 'program-head';
    head.textContent = `${program.policyId} (${program.user})`;
    const pre = document.createElement('pre');
    pre.textContent = program.lines.join('\n');
    box.append(head, pre);
  }
  for (const note of preview.notes) {
    const div = document.createElement('div');
    div.className = 'note';
    div.textContent = note;
    box.appendChild(div);
  }
  el<HTMLDivElement>('composer-status').textContent =
    preview.status === 'applied' ? 'applied' : 'dry run, nothing stored yet';
}

let debounceTimer: number | undefined;

async function dryRun(): Promise<void> {
  const text = el<HTMLTextAreaElement>('intent-text').value.trim();
  if (!text) {
    renderPreview(null);
    return;
  }
  try {
    const response = await api.submitIntent(text, { dryRun: true });
    renderPreview(composerPreview(text, response));
  } catch (err) {
    el<HTMLDivElement>('composer-status').textContent =
      err instanceof ApiError ? JSON.stringify(err.detail) : String(err);
  }
}

async function apply(): Promise<void> {
  const text = el<HTMLTextAreaElement>('intent-text').value.trim();
  if (!text) return;
  try {
    const response = await api.submitIntent(text);
    renderPreview(composerPreview(text, response));
    await refresh();
  } catch (err) {
    el<HTMLDivElement>('composer-status').textContent =
      err instanceof ApiError ? JSON.stringify(err.detail) : String(err);
  }
}

function renderTree(nodes: TreeView[], into: HTMLElement): void {
  const list = document.createElement('ul');
  for (const node of nodes) {
    const item = document.createElement('li');
    const label = document.createElement('span');
    label.textContent = `${node.kind} ${node.label}`;
    item.appendChild(label);
    if (node.allowBadge || node.blockBadge) {
      const badge = document.createElement('span');
      badge.className = 'badge';
      badge.textContent = ` allow:${node.allowBadge} block:${node.blockBadge}`;
      item.appendChild(badge);
    }
    for (const asset of node.assets) {
      const row = document.createElement('div');
      row.className = 'asset';
      row.textContent = `${asset.id}: ${asset.description}`;
      item.appendChild(row);
    }
    if (node.children.length) renderTree(node.children, item);
    list.appendChild(item);
  }
  into.appendChild(list);
}

async function refresh(): Promise<void> {
  const [policies, hierarchy, alerts, anomalies, health] = await Promise.all([
    api.policies(),
    api.hierarchy(),
    api.alerts({ includeAcknowledged: true }),
    api.anomalies(),
    api.health(),
  ]);

  el<HTMLSpanElement>('health').textContent =
    `store v${health.store_version}, ${health.policies} policies`;

  const tree = el<HTMLDivElement>('tree');
  clear(tree);
  renderTree(buildTree(hierarchy, policies), tree);

  const tbody = el<HTMLTableSectionElement>('policy-body');
  clear(tbody);
  for (const row of policyRows(policies)) {
    const tr = document.createElement('tr');
    if (row.status !== 'active') tr.className = 'superseded';
    for (const cell of [row.id, row.user, row.effect, row.spot, row.shifts, row.exceptions, row.status]) {
      const td = document.createElement('td');
      td.textContent = cell;
      tr.appendChild(td);
    }
    tbody.appendChild(tr);
  }

  const alertBox = el<HTMLDivElement>('alerts');
  clear(alertBox);
  for (const row of alertRows(alerts)) {
    const div = document.createElement('div');
    div.className = row.acknowledged ? 'alert acked' : 'alert';
    div.textContent = `${row.id} [${row.organization}] ${row.message}`;
    if (!row.acknowledged) {
      const button = document.createElement('button');
      button.textContent = 'ack';
      button.addEventListener('click', async () => {
        await api.acknowledgeAlert(row.id);
        await refresh();
      });
      div.appendChild(button);
    }
    alertBox.appendChild(div);
  }

  const anomalyBox = el<HTMLDivElement>('anomalies');
  clear(anomalyBox);
  for (const row of anomalyRows(anomalies)) {
    const div = document.createElement('div');
    div.className = 'anomaly';
    div.textContent = row.summary;
    const button = document.createElement('button');
    button.textContent = 'draft block intent';
    button.addEventListener('click', () => {
      el<HTMLTextAreaElement>('intent-text').value = row.suggestion;
      void dryRun();
    });
    div.appendChild(button);
    anomalyBox.appendChild(div);
  }
}

async function probeDecision(): Promise<void> {
  const user = el<HTMLInputElement>('probe-user').value.trim();
  const asset = el<HTMLInputElement>('probe-asset').value.trim();
  const time = el<HTMLInputElement>('probe-time').value.trim();
  const out = el<HTMLDivElement>('probe-result');
  try {
    const decision = await api.queryDecision(user, asset, time);
    out.textContent = describeDecision(decision);
    out.className = decision.verdict === 'allowed' ? 'verdict-allow' : 'verdict-block';
  } catch (err) {
    out.textContent = err instanceof ApiError ? JSON.stringify(err.detail) : String(err);
    out.className = 'error';
  }
}

export function start(): void {
  el<HTMLTextAreaElement>('intent-text').addEventListener('input', () => {
    window.clearTimeout(debounceTimer);
    debounceTimer = window.setTimeout(() => void dryRun(), DEBOUNCE_MS);
  });
  el<HTMLButtonElement>('apply').addEventListener('click', () => void apply());
  el<HTMLButtonElement>('probe').addEventListener('click', () => void probeDecision());
  void refresh();
  window.setInterval(() => void refresh(), POLL_MS);
}

start();
