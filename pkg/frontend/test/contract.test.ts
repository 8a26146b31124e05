// Contract test against the real gateway: seeds a demo knowledge base,
// boots `scintent serve` on a free port, and drives the console's client
// through the conflicting-intent flow.

import { afterAll, beforeAll, expect, test } from 'vitest';
import { spawn, spawnSync, type ChildProcess } from 'node:child_process';
import { mkdtempSync, rmSync } from 'node:fs';
import { createServer } from 'node:net';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

import { ApiClient } from '../src/api.js';
import { composerPreview } from '../src/console.js';

const INTENT_BLOCK_REALM = 'user-x is not allowed to access to realm o1-r1';
const INTENT_ALLOW_ORG = 'user-x is allowed to access to organization o1';
const CARVED_LINE = 'allow user-x to access assets in o1 except o1-r1';

let kbDir: string;
let server: ChildProcess;
let api: ApiClient;

function freePort(): Promise<number> {
  return new Promise((resolve, reject) => {
    const probe = createServer();
    probe.once('error', reject);
    probe.listen(0, '127.0.0.1', () => {
      const { port } = probe.address() as { port: number };
      probe.close(() => resolve(port));
    });
  });
}

beforeAll(async () => {
  kbDir = mkdtempSync(join(tmpdir(), 'scintent-kb-'));
  const seeded = spawnSync('scintent', ['kb', 'init', '--kb-dir', kbDir, '--demo']);
  expect(seeded.status).toBe(0);

  const port = await freePort();
  server = spawn('scintent', [
    'serve', '--kb-dir', kbDir, '--port', String(port), '--test-mode',
  ]);
  api = new ApiClient(`http://127.0.0.1:${port}`);

  const deadline = Date.now() + 20000;
  for (;;) {
    try {
      const health = await api.health();
      expect(health.status).toBe('ok');
      break;
    } catch {
      if (Date.now() > deadline) throw new Error('gateway did not come up');
      await new Promise((r) => setTimeout(r, 150));
    }
  }
});

afterAll(() => {
  server?.kill('SIGTERM');
  rmSync(kbDir, { recursive: true, force: true });
});

test('dry-run previews the carved program, apply adds exactly one policy', async () => {
  const first = await api.submitIntent(INTENT_BLOCK_REALM);
  expect(first.applied).toBe(true);
  expect(await api.policies()).toHaveLength(1);

  // preview before applying: the exception must already be visible
  const dry = await api.submitIntent(INTENT_ALLOW_ORG, { dryRun: true });
  const preview = composerPreview(INTENT_ALLOW_ORG, dry);
  expect(preview.status).toBe('ready');
  expect(preview.programs).toHaveLength(1);
  expect(preview.programs[0].lines).toContain(CARVED_LINE);
  expect(preview.notes.some((n) => n.includes('existing-inside-new'))).toBe(true);

  // the dry run stored nothing
  expect(await api.policies()).toHaveLength(1);

  const applied = await api.submitIntent(INTENT_ALLOW_ORG);
  expect(applied.applied).toBe(true);
  const after = await api.policies();
  expect(after).toHaveLength(2);
  const added = after.find((p) => p.effect === 'allow');
  expect(added?.lines).toContain(CARVED_LINE);
  expect(added?.status).toBe('active');
});

test('alert feed carries the conflict notification', async () => {
  const pending = await api.alerts({ admin: 'o1-admin' });
  expect(pending.length).toBeGreaterThan(0);
  expect(pending[0].message).toContain('existing-inside-new');

  const acked = await api.acknowledgeAlert(pending[0].id);
  expect(acked.acknowledged).toBe(true);
});

test('decision probe reflects the carved exception', async () => {
  // asset-11 sits in the blocked realm, asset-21 outside it
  const inRealm = await api.queryDecision('user-x', 'asset-11', '10:00');
  expect(inRealm.verdict).toBe('blocked');
  expect(inRealm.default_applied).toBe(false);

  const outside = await api.queryDecision('user-x', 'asset-21', '10:00');
  expect(outside.verdict).toBe('allowed');
});
