// Pure view-model builders for the console. Everything here is plain
// data in, plain data out, so it can be unit tested without a DOM.

import type {
  AlertDocument,
  AnomalyFlagDocument,
  CompilationDocument,
  DecisionResponse,
  HierarchyDocument,
  HierarchyNode,
  ParseErrorInfo,
  RenderedPolicy,
  SubmissionResponse,
} from './types.js';

export interface ProgramPreview {
  policyId: string;
  user: string;
  lines: string[];
}

export interface ComposerPreview {
  status: 'parse-error' | 'ready' | 'applied';
  errorDetail: string | null;
  errorMarker: string | null;
  programs: ProgramPreview[];
  notes: string[];
}

/** Two lines: the offending text and a caret under the error position. */
export function caretMarker(text: string, position: number): string {
  const column = Math.max(0, Math.min(position, text.length));
  return `${text}\n${' '.repeat(column)}^`;
}

function parseErrorDetail(error: ParseErrorInfo): string {
  return `expected ${error.expected}, found ${error.found} at position ${error.position}`;
}

function conflictNotes(compilation: CompilationDocument): string[] {
  // conflicts and resolutions are parallel lists
  const notes = compilation.conflicts.map((conflict, i) => {
    const resolution = compilation.resolutions[i];
    let note =
      `${conflict.new_intent} conflicts with ${conflict.existing_policy} ` +
      `(${conflict.relation}); resolved by ${resolution.kind}`;
    if (resolution.exception) {
      const shifts = resolution.exception.shifts.join(', ');
      note += `, carving ${resolution.exception.spot} at ${shifts}`;
    }
    return note;
  });
  for (const alert of compilation.alerts) {
    notes.push(`alert for ${alert.admin}: ${alert.message}`);
  }
  return notes;
}

/**
 * Shape one intent submission (dry-run or applied) for the composer
 * panel: per-user program listings plus conflict and alert notes.
 */
export function composerPreview(text: string, response: SubmissionResponse): ComposerPreview {
  if ('error' in response.parse) {
    return {
      status: 'parse-error',
      errorDetail: parseErrorDetail(response.parse.error),
      errorMarker: caretMarker(text, response.parse.error.position),
      programs: [],
      notes: [],
    };
  }
  const compilation = response.compilation!;
  return {
    status: response.applied ? 'applied' : 'ready',
    errorDetail: null,
    errorMarker: null,
    programs: compilation.programs.map((program, i) => ({
      policyId: program.id,
      user: program.user,
      lines: response.rendered_policies[i],
    })),
    notes: conflictNotes(compilation),
  };
}

export interface PolicyRow {
  id: string;
  user: string;
  effect: string;
  spot: string;
  shifts: string;
  status: string;
  exceptions: string;
  lines: string[];
}

export function policyRows(policies: RenderedPolicy[]): PolicyRow[] {
  return policies.map((p) => ({
    id: p.id,
    user: p.user,
    effect: p.effect,
    spot: p.scope.spot,
    shifts: p.shifts.join(', '),
    status: p.status,
    exceptions: p.exceptions
      .map((e) => `${e.spot} (${e.shifts.join(', ')})`)
      .join('; '),
    lines: p.lines,
  }));
}

export interface TreeView {
  id: string;
  kind: string;
  label: string;
  allowBadge: number;
  blockBadge: number;
  children: TreeView[];
  assets: { id: string; description: string }[];
}

/**
 * Hierarchy tree annotated with per-node badges counting the active
 * policies scoped exactly at that node.
 */
export function buildTree(hierarchy: HierarchyDocument, policies: RenderedPolicy[]): TreeView[] {
  const allowCounts = new Map<string, number>();
  const blockCounts = new Map<string, number>();
  for (const policy of policies) {
    if (policy.status !== 'active') continue;
    const counts = policy.effect === 'allow' ? allowCounts : blockCounts;
    counts.set(policy.scope.spot, (counts.get(policy.scope.spot) ?? 0) + 1);
  }

  const convert = (node: HierarchyNode): TreeView => ({
    id: node.id,
    kind: node.kind,
    label: node.admin ? `${node.id} (admin: ${node.admin})` : node.id,
    allowBadge: allowCounts.get(node.id) ?? 0,
    blockBadge: blockCounts.get(node.id) ?? 0,
    children: (node.children ?? []).map(convert),
    assets: (node.assets ?? []).map((a) => ({ id: a.id, description: a.description })),
  });
  return hierarchy.organizations.map(convert);
}

export interface AlertRow {
  id: string;
  admin: string;
  organization: string;
  message: string;
  acknowledged: boolean;
}

/** Pending alerts first, each group ordered oldest first. */
export function alertRows(alerts: AlertDocument[]): AlertRow[] {
  const ordinal = (id: string) => Number(id.replace(/^a-/, '')) || 0;
  return alerts
    .slice()
    .sort((a, b) =>
      a.acknowledged === b.acknowledged
        ? ordinal(a.id) - ordinal(b.id)
        : Number(a.acknowledged) - Number(b.acknowledged),
    )
    .map((a) => ({
      id: a.id,
      admin: a.admin,
      organization: a.organization,
      message: a.message,
      acknowledged: a.acknowledged,
    }));
}

export interface AnomalyRow {
  user: string;
  summary: string;
  suggestion: string;
}

export function anomalyRows(flags: AnomalyFlagDocument[]): AnomalyRow[] {
  return flags.map((flag) => ({
    user: flag.user,
    summary:
      `${flag.count} blocked attempts by ${flag.user}, ` +
      `mostly in ${flag.organization}, window closing ` +
      new Date(flag.window_end * 1000).toISOString().slice(11, 19) + ' UTC',
    suggestion: flag.suggested_intent,
  }));
}

export function describeDecision(decision: DecisionResponse): string {
  if (decision.default_applied) {
    return 'blocked (no policy applies, default deny)';
  }
  return `${decision.verdict} per ${decision.justification.join(', ')}`;
}
