// JSON payload shapes of the gateway API. Field names mirror the wire
// format exactly; keep them in sync with the Python serializers.

export type Permission = 'allow' | 'block';
export type ScopeKind = 'organization' | 'realm' | 'domain';
export type ShiftName = 'morning' | 'late' | 'night';

export interface IntentDocument {
  users: string[];
  permission: Permission;
  scope_kind: ScopeKind;
  spot: string;
  timeframes: ShiftName[];
}

export interface ParseErrorInfo {
  position: number;
  expected: string;
  found: string;
}

export interface ExceptionDocument {
  spot: string;
  shifts: ShiftName[];
}

export interface PolicyDocument {
  id: string;
  user: string;
  effect: Permission;
  scope: { kind: ScopeKind; spot: string };
  exceptions: ExceptionDocument[];
  shifts: ShiftName[];
  status: 'active' | 'superseded';
  provenance: { intent_id: string; seq: number };
}

// GET /policies decorates each policy with its rendered program.
export interface RenderedPolicy extends PolicyDocument {
  lines: string[];
}

export interface ConflictDocument {
  new_intent: string;
  existing_policy: string;
  relation: 'existing-inside-new' | 'new-inside-existing' | 'equal-scope';
  overlapping_shifts: ShiftName[];
}

export interface ResolutionDocument {
  kind:
    | 'carve-exception-in-new'
    | 'carve-exception-in-existing'
    | 'supersede-existing';
  target_policy: string;
  exception: ExceptionDocument | null;
}

export interface AlertDocument {
  id: string;
  admin: string;
  organization: string;
  message: string;
  source: string;
  acknowledged: boolean;
}

export interface CompilationDocument {
  intent_id: string;
  base_version: number;
  programs: PolicyDocument[];
  conflicts: ConflictDocument[];
  resolutions: ResolutionDocument[];
  alerts: AlertDocument[];
}

export interface SubmissionResponse {
  parse: { intent: IntentDocument } | { error: ParseErrorInfo };
  compilation: CompilationDocument | null;
  applied: boolean;
  rendered_policies: string[][];
}

export interface DecisionResponse {
  verdict: 'allowed' | 'blocked';
  justification: string[];
  default_applied: boolean;
}

export interface AnomalyFlagDocument {
  user: string;
  count: number;
  window_end: number;
  organization: string;
  suggested_intent: string;
}

export interface AssetDocument {
  id: string;
  description: string;
}

export interface HierarchyNode {
  id: string;
  kind: ScopeKind;
  admin?: string;
  children?: HierarchyNode[];
  assets?: AssetDocument[];
}

export interface HierarchyDocument {
  organizations: HierarchyNode[];
  users: { id: string; display_name: string }[];
}

export interface EnforcementEntry {
  policy_id: string;
  user: string;
  effect: Permission;
  spot: string;
  lines: string[];
}

export interface HealthDocument {
  status: string;
  store_version: number;
  policies: number;
  test_mode: boolean;
}
