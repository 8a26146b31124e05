import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    // the contract test boots the Python gateway, give it room
    testTimeout: 30000,
    hookTimeout: 30000,
  },
});
